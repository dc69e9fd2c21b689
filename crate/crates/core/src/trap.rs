//! Quantized 1D ion-chain mechanics: equilibrium positions, normal modes,
//! thermal truncation, per-mode-state logical couplings and the
//! non-degenerate gate fidelity.
//!
//! Ions sit in a harmonic trap along x with mutual Coulomb repulsion. In
//! dimensionless coordinates (lengths in units of `L`, `L^3 = chi/omega^2`)
//! the equilibrium positions and the Hessian eigensystem depend only on the
//! ion count; redimensionalization scales positions by `L` and mode
//! frequencies by `omega`. A thermal state over the modes makes the logical
//! coupling a discrete random variable: each retained occupation vector
//! contributes its diagonal coupling matrix element, evaluated by
//! Gauss-Hermite quadrature in mode coordinates.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fidelity::{zz_damping_fidelity, BlockEvolution, GateTime};
use crate::geometry::{CouplingLaw, LogicalVector};
use crate::noise::{CouplingDistribution, CouplingKernel};
use crate::quad::{hermite_normalized, GaussHermite, Odometer};
use crate::scalar::{cv, Scalar};

/// Largest chain the equilibrium solver accepts.
pub const MAX_IONS: usize = 12;

/// Default Gauss-Hermite base order per active mode.
pub const DEFAULT_MODE_ORDER: usize = 20;
/// Smallest base order the cap-fitting is allowed to fall back to.
const MIN_MODE_ORDER: usize = 8;
/// Cap on the tensor quadrature grid per mode state.
pub const MODE_NODE_CAP: usize = 1_000_000;

/// Same-line separations below this fraction of the smallest equilibrium
/// gap invalidate the harmonic small-displacement model.
const GAP_FRACTION: f64 = 0.1;
/// Quadrature tails may put a little probability mass inside the invalid
/// region even for sound parameters; such separations are clamped at the
/// threshold (which keeps the integrand bounded and the doubling test
/// stable). If the invalid mass exceeds this budget the model itself is
/// broken and we refuse to continue.
const INVALID_MASS_BUDGET: f64 = 1e-6;

/// Harmonic trap parameters for one chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapSpec<T: Scalar> {
    n_ions: usize,
    omega: T,
    length_scale: T,
}

impl<T: Scalar> TrapSpec<T> {
    pub fn new(n_ions: usize, omega: T, length_scale: T) -> Result<Self> {
        if n_ions == 0 || n_ions > MAX_IONS {
            return Err(Error::validation(format!(
                "ion count must be 1..={MAX_IONS}, got {n_ions}"
            )));
        }
        if !(Float::is_finite(omega) && omega > T::zero()) {
            return Err(Error::validation("trap frequency must be finite and > 0"));
        }
        if !(Float::is_finite(length_scale) && length_scale > T::zero()) {
            return Err(Error::validation("length scale must be finite and > 0"));
        }
        Ok(TrapSpec {
            n_ions,
            omega,
            length_scale,
        })
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn length_scale(&self) -> T {
        self.length_scale
    }
}

/// Gradient of the dimensionless potential
/// `V = 1/2 sum x_i^2 + sum_{i<j} 1/|x_i - x_j|`.
fn potential_gradient<T: Scalar>(x: &[T]) -> Vec<T> {
    let k = x.len();
    let mut g = x.to_vec();
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let d = x[i] - x[j];
            let sign = if d > T::zero() { T::one() } else { -T::one() };
            g[i] -= sign / (d * d);
        }
    }
    g
}

/// Dimensionless Hessian at the given positions.
fn potential_hessian<T: Scalar>(x: &[T]) -> DMatrix<T> {
    let k = x.len();
    let two = cv::<T>(2.0);
    DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            let mut acc = T::one();
            for l in 0..k {
                if l != i {
                    let d = Float::abs(x[i] - x[l]);
                    acc += two / (d * d * d);
                }
            }
            acc
        } else {
            let d = Float::abs(x[i] - x[j]);
            -two / (d * d * d)
        }
    })
}

fn grad_norm<T: Scalar>(g: &[T]) -> T {
    Float::sqrt(g.iter().map(|v| *v * *v).sum())
}

/// Dimensionless equilibrium positions of a `k`-ion chain, antisymmetric
/// about the trap center and strictly ascending.
pub fn equilibrium_positions<T: Scalar>(k: usize) -> Result<Vec<T>> {
    if k == 0 || k > MAX_IONS {
        return Err(Error::validation(format!(
            "ion count must be 1..={MAX_IONS}, got {k}"
        )));
    }
    if k == 1 {
        return Ok(vec![T::zero()]);
    }
    // Uniform-spacing start, centered on the trap.
    let mut x: Vec<T> =
        (0..k).map(|i| cv::<T>(i as f64 - (k as f64 - 1.0) / 2.0)).collect();

    let ordered = |x: &[T]| x.windows(2).all(|w| w[1] > w[0]);
    let mut g = potential_gradient(&x);
    for _ in 0..200 {
        let norm = grad_norm(&g);
        if norm < cv(1e-13) {
            break;
        }
        let hess = potential_hessian(&x);
        let rhs = nalgebra::DVector::from_iterator(k, g.iter().map(|v| -*v));
        let step = hess
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::numeric("singular Hessian in equilibrium solve"))?;
        // Damped update: keep the chain ordered and the gradient shrinking.
        let mut scale = T::one();
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<T> = x
                .iter()
                .zip(step.iter())
                .map(|(xi, si)| *xi + scale * *si)
                .collect();
            if ordered(&trial) {
                let trial_g = potential_gradient(&trial);
                if grad_norm(&trial_g) < norm {
                    x = trial;
                    g = trial_g;
                    accepted = true;
                    break;
                }
            }
            scale /= cv::<T>(2.0);
        }
        if !accepted {
            break;
        }
    }
    let residual = grad_norm(&potential_gradient(&x));
    if residual > cv(1e-12) {
        return Err(Error::numeric(format!(
            "equilibrium solve for K={k} stalled at gradient norm {:e}",
            residual.to_f64().unwrap_or(f64::NAN)
        )));
    }
    // Symmetrize: the solution is antisymmetric about the center.
    let half = cv::<T>(0.5);
    let sym: Vec<T> = (0..k).map(|i| (x[i] - x[k - 1 - i]) * half).collect();
    Ok(sym)
}

/// Normal-mode data of one chain.
#[derive(Debug, Clone)]
pub struct ModeDecomposition<T: Scalar> {
    /// Dimensional equilibrium positions `L * xbar_i`, ascending.
    equilibrium: Vec<T>,
    /// Dimensionless equilibrium positions.
    equilibrium_dimensionless: Vec<T>,
    /// Hessian eigenvalues, ascending; `lambda_1 = 1` is the center of mass.
    lambdas: Vec<T>,
    /// Orthonormal eigenvectors as matrix columns.
    mode_vectors: DMatrix<T>,
    /// Mode frequencies `nu_m = sqrt(lambda_m) * omega`.
    frequencies: Vec<T>,
}

impl<T: Scalar> ModeDecomposition<T> {
    pub fn equilibrium(&self) -> &[T] {
        &self.equilibrium
    }

    pub fn equilibrium_dimensionless(&self) -> &[T] {
        &self.equilibrium_dimensionless
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn mode_vectors(&self) -> &DMatrix<T> {
        &self.mode_vectors
    }

    pub fn frequencies(&self) -> &[T] {
        &self.frequencies
    }

    pub fn n_modes(&self) -> usize {
        self.lambdas.len()
    }
}

/// Solve the chain mechanics for a trap.
pub fn mode_decomposition<T: Scalar>(spec: &TrapSpec<T>) -> Result<ModeDecomposition<T>> {
    let k = spec.n_ions;
    let xbar = equilibrium_positions::<T>(k)?;
    let hess = potential_hessian(&xbar);
    let eigen = hess.clone().symmetric_eigen();

    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&i, &j| {
        eigen.eigenvalues[i]
            .partial_cmp(&eigen.eigenvalues[j])
            .expect("finite eigenvalues")
    });
    let lambdas: Vec<T> = idx.iter().map(|&i| eigen.eigenvalues[i]).collect();
    for w in lambdas.windows(2) {
        if Float::abs(w[1] - w[0]) < cv(1e-10) {
            return Err(Error::numeric(
                "degenerate chain eigenvalues; mode basis is ill-defined",
            ));
        }
    }
    let mut vectors = DMatrix::<T>::zeros(k, k);
    for (col, &i) in idx.iter().enumerate() {
        let mut v: Vec<T> = (0..k).map(|r| eigen.eigenvectors[(r, i)]).collect();
        // Deterministic sign: largest-magnitude component positive.
        let mut lead = 0;
        for (r, val) in v.iter().enumerate() {
            if Float::abs(*val) > Float::abs(v[lead]) {
                lead = r;
            }
        }
        if v[lead] < T::zero() {
            for val in &mut v {
                *val = -*val;
            }
        }
        for (r, val) in v.into_iter().enumerate() {
            vectors[(r, col)] = val;
        }
    }

    if Float::abs(lambdas[0] - T::one()) > cv(1e-10) {
        return Err(Error::numeric("center-of-mass eigenvalue differs from 1"));
    }

    Ok(ModeDecomposition {
        equilibrium: xbar.iter().map(|x| *x * spec.length_scale).collect(),
        equilibrium_dimensionless: xbar,
        lambdas: lambdas.clone(),
        mode_vectors: vectors,
        frequencies: lambdas
            .iter()
            .map(|l| Float::sqrt(*l) * spec.omega)
            .collect(),
    })
}

/// One retained occupation state of the thermal ensemble.
#[derive(Debug, Clone)]
pub struct ThermalState<T: Scalar> {
    pub occupations: Vec<u32>,
    pub energy: T,
    pub probability: T,
}

/// Lowest-energy occupation states carrying at least `(1 - epsilon)` of the
/// Boltzmann mass, renormalized.
#[derive(Debug, Clone)]
pub struct ThermalTruncation<T: Scalar> {
    pub temperature: T,
    pub epsilon: T,
    pub states: Vec<ThermalState<T>>,
    /// Pre-normalization retained mass as a fraction of the exact partition
    /// function; at least `1 - epsilon` by construction.
    pub retained_fraction: T,
}

#[derive(PartialEq)]
struct HeapKey<T: Scalar>(T, Vec<u32>);

impl<T: Scalar> Eq for HeapKey<T> {}

impl<T: Scalar> PartialOrd for HeapKey<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for HeapKey<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .partial_cmp(&other.0)
            .expect("finite energies")
            .then_with(|| self.1.cmp(&other.1))
    }
}

/// Best-first enumeration of occupation vectors over the combined modes of
/// one or two chains.
///
/// The exact partition function is the closed-form product over modes;
/// states are popped in ascending energy until the unnormalized mass
/// reaches `(1 - epsilon)` of it.
pub fn thermal_truncation<T: Scalar>(
    decomps: &[&ModeDecomposition<T>],
    temperature: T,
    epsilon: T,
    cap: usize,
) -> Result<ThermalTruncation<T>> {
    if decomps.is_empty() || decomps.len() > 2 {
        return Err(Error::validation("expected one or two mode decompositions"));
    }
    if !(Float::is_finite(temperature) && temperature > T::zero()) {
        return Err(Error::validation("temperature must be finite and > 0"));
    }
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::validation("epsilon must lie in (0, 1)"));
    }
    let frequencies: Vec<T> = decomps
        .iter()
        .flat_map(|d| d.frequencies().iter().copied())
        .collect();
    let n_modes = frequencies.len();

    // Z * exp(E_0 / T) = prod_m 1 / (1 - exp(-nu_m / T)).
    let mut z_rel = T::one();
    for nu in &frequencies {
        z_rel /= T::one() - Float::exp(-*nu / temperature);
    }
    let target = (T::one() - epsilon) * z_rel;
    let ground_energy: T = frequencies.iter().map(|nu| *nu / cv::<T>(2.0)).sum();

    let energy_of = |occ: &[u32]| -> T {
        ground_energy
            + occ
                .iter()
                .zip(&frequencies)
                .map(|(n, nu)| cv::<T>(*n as f64) * *nu)
                .sum::<T>()
    };

    let mut heap: BinaryHeap<Reverse<HeapKey<T>>> = BinaryHeap::new();
    heap.push(Reverse(HeapKey(ground_energy, vec![0u32; n_modes])));
    let mut states: Vec<ThermalState<T>> = Vec::new();
    let mut mass = T::zero();

    while let Some(Reverse(HeapKey(energy, occ))) = heap.pop() {
        let weight = Float::exp(-(energy - ground_energy) / temperature);
        mass += weight;
        states.push(ThermalState {
            occupations: occ.clone(),
            energy,
            probability: weight,
        });
        if mass >= target {
            break;
        }
        if states.len() >= cap {
            return Err(Error::size(format!(
                "thermal truncation exceeded {cap} states before reaching the \
                 (1 - epsilon) mass target; raise epsilon or lower the temperature"
            )));
        }
        // Children: increment mode i for i <= lowest occupied index, which
        // generates every occupation vector exactly once.
        let lowest = occ.iter().position(|&n| n > 0).unwrap_or(n_modes);
        for i in 0..=lowest.min(n_modes - 1) {
            let mut child = occ.clone();
            child[i] += 1;
            heap.push(Reverse(HeapKey(energy_of(&child), child)));
        }
    }

    let retained_fraction = mass / z_rel;
    for s in &mut states {
        s.probability /= mass;
    }
    Ok(ThermalTruncation {
        temperature,
        epsilon,
        states,
        retained_fraction,
    })
}

/// The three trap arrangements of the quantized study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrapVariant {
    /// One chain; module A is the left part, module B the rest.
    SingleTrapSplit,
    /// Two parallel traps; the stiff multi-ion A mediates for a single hot
    /// ion in B.
    ColdMediator,
    /// Two parallel traps of equal size and equal equilibrium positions.
    TwinTraps,
}

/// A pair of encoded modules realized with trapped ion chains.
#[derive(Debug, Clone)]
pub struct TrapPairConfig<T: Scalar> {
    pub variant: TrapVariant,
    pub trap_a: TrapSpec<T>,
    pub trap_b: Option<TrapSpec<T>>,
    /// Inter-trap separation along y (zero for the single-trap split).
    pub dy: T,
    pub a: LogicalVector<T>,
    pub b: LogicalVector<T>,
    pub law: CouplingLaw<T>,
}

impl<T: Scalar> TrapPairConfig<T> {
    /// One chain of `n_a + n_b` ions split into two logical modules.
    pub fn single_trap_split(
        trap: TrapSpec<T>,
        a: LogicalVector<T>,
        b: LogicalVector<T>,
        law: CouplingLaw<T>,
    ) -> Result<Self> {
        if trap.n_ions != a.len() + b.len() {
            return Err(Error::validation(
                "ion count must equal the combined encoding length",
            ));
        }
        Ok(TrapPairConfig {
            variant: TrapVariant::SingleTrapSplit,
            trap_a: trap,
            trap_b: None,
            dy: T::zero(),
            a,
            b,
            law,
        })
    }

    /// Stiff chain A mediating for a single hot ion B at separation `dy`.
    pub fn cold_mediator(
        trap_a: TrapSpec<T>,
        omega_b: T,
        dy: T,
        a: LogicalVector<T>,
        b: LogicalVector<T>,
        law: CouplingLaw<T>,
    ) -> Result<Self> {
        if b.len() != 1 {
            return Err(Error::validation("the hot module must hold a single ion"));
        }
        if a.len() != trap_a.n_ions {
            return Err(Error::validation("encoding a must match the mediator size"));
        }
        if !(dy > T::zero()) {
            return Err(Error::validation("inter-trap separation must be > 0"));
        }
        let trap_b = TrapSpec::new(1, omega_b, trap_a.length_scale)?;
        Ok(TrapPairConfig {
            variant: TrapVariant::ColdMediator,
            trap_a,
            trap_b: Some(trap_b),
            dy,
            a,
            b,
            law,
        })
    }

    /// Equal-size parallel traps with matched equilibrium positions
    /// (`L_A = L_B`, realized by tuning the ionization).
    pub fn twin_traps(
        n_per_module: usize,
        omega_a: T,
        omega_b: T,
        length_scale: T,
        dy: T,
        a: LogicalVector<T>,
        b: LogicalVector<T>,
        law: CouplingLaw<T>,
    ) -> Result<Self> {
        if a.len() != n_per_module || b.len() != n_per_module {
            return Err(Error::validation("encodings must match the per-module size"));
        }
        if !(dy > T::zero()) {
            return Err(Error::validation("inter-trap separation must be > 0"));
        }
        Ok(TrapPairConfig {
            variant: TrapVariant::TwinTraps,
            trap_a: TrapSpec::new(n_per_module, omega_a, length_scale)?,
            trap_b: Some(TrapSpec::new(n_per_module, omega_b, length_scale)?),
            dy,
            a,
            b,
            law,
        })
    }

    pub fn n_a(&self) -> usize {
        self.a.len()
    }

    pub fn n_b(&self) -> usize {
        self.b.len()
    }
}

/// Mechanics of one chain within the pair.
struct ChainMechanics<T: Scalar> {
    /// Dimensional equilibrium x positions, ascending.
    xs: Vec<T>,
    modes: ModeDecomposition<T>,
    /// Smallest equilibrium gap (None for single-ion chains).
    min_gap: Option<T>,
}

struct PairMechanics<T: Scalar> {
    chains: Vec<ChainMechanics<T>>,
    /// (chain index, local ion index) for each of the `n_a + n_b` ions,
    /// module A first.
    ion_map: Vec<(usize, usize)>,
    n_a: usize,
    n_b: usize,
    single: bool,
}

fn chain_mechanics<T: Scalar>(spec: &TrapSpec<T>) -> Result<ChainMechanics<T>> {
    let modes = mode_decomposition(spec)?;
    let xs = modes.equilibrium().to_vec();
    let min_gap = xs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(None, |acc: Option<T>, g| {
            Some(acc.map_or(g, |m| Float::min(m, g)))
        });
    Ok(ChainMechanics { xs, modes, min_gap })
}

fn pair_mechanics<T: Scalar>(config: &TrapPairConfig<T>) -> Result<PairMechanics<T>> {
    let n_a = config.n_a();
    let n_b = config.n_b();
    match config.variant {
        TrapVariant::SingleTrapSplit => {
            let chain = chain_mechanics(&config.trap_a)?;
            let ion_map = (0..n_a + n_b).map(|i| (0, i)).collect();
            Ok(PairMechanics {
                chains: vec![chain],
                ion_map,
                n_a,
                n_b,
                single: true,
            })
        }
        TrapVariant::ColdMediator | TrapVariant::TwinTraps => {
            let trap_b = config
                .trap_b
                .as_ref()
                .ok_or_else(|| Error::validation("two-trap variant requires trap B"))?;
            let chain_a = chain_mechanics(&config.trap_a)?;
            let chain_b = chain_mechanics(trap_b)?;
            let mut ion_map: Vec<(usize, usize)> = (0..n_a).map(|i| (0, i)).collect();
            ion_map.extend((0..n_b).map(|j| (1, j)));
            Ok(PairMechanics {
                chains: vec![chain_a, chain_b],
                ion_map,
                n_a,
                n_b,
                single: false,
            })
        }
    }
}

/// Combined mode bookkeeping: which chain, which local mode.
struct CombinedMode<T: Scalar> {
    chain: usize,
    local: usize,
    frequency: T,
    /// Uniform vectors translate the chain rigidly; in the single-trap
    /// arrangement that changes no distance, so the mode needs no
    /// quadrature resolution.
    insensitive: bool,
}

fn combined_modes<T: Scalar>(mech: &PairMechanics<T>) -> Vec<CombinedMode<T>> {
    let mut out = Vec::new();
    for (ci, chain) in mech.chains.iter().enumerate() {
        let k = chain.modes.n_modes();
        for m in 0..k {
            let mut uniform = true;
            let v0 = chain.modes.mode_vectors()[(0, m)];
            for r in 1..k {
                if Float::abs(chain.modes.mode_vectors()[(r, m)] - v0) > cv(1e-12) {
                    uniform = false;
                    break;
                }
            }
            out.push(CombinedMode {
                chain: ci,
                local: m,
                frequency: chain.modes.frequencies()[m],
                insensitive: uniform && mech.single,
            });
        }
    }
    out
}

/// Per-state coupling tables.
#[derive(Debug, Clone)]
pub struct StateTables<T: Scalar> {
    /// `<E_k| mu(r_i, q_j) |E_k>` over cross pairs.
    pub cross: DMatrix<T>,
    /// Intra-module tables (upper triangle populated).
    pub self_a: DMatrix<T>,
    pub self_b: DMatrix<T>,
    /// Quadrature mass evaluated with clamped separations (far tail of the
    /// harmonic state leaking past the validity guard).
    pub invalid_mass: T,
}

/// Quadrature orders per combined mode: insensitive modes collapse to a
/// single node; active ones get `base + 2 n` nodes, with the base lowered
/// (not below `MIN_MODE_ORDER`) until the tensor grid fits the cap.
fn mode_orders<T: Scalar>(
    modes: &[CombinedMode<T>],
    occupations: &[u32],
    base_order: usize,
) -> Result<Vec<usize>> {
    let mut base = base_order.max(MIN_MODE_ORDER);
    loop {
        let orders: Vec<usize> = modes
            .iter()
            .zip(occupations)
            .map(|(m, &n)| {
                if m.insensitive && n == 0 {
                    1
                } else {
                    base + 2 * n as usize
                }
            })
            .collect();
        let total: usize = orders.iter().product();
        if total <= MODE_NODE_CAP {
            return Ok(orders);
        }
        if base == MIN_MODE_ORDER {
            return Err(Error::size(format!(
                "mode quadrature grid needs {total} nodes even at the minimum \
                 base order; reduce the ion count or the temperature"
            )));
        }
        base = (base - 4).max(MIN_MODE_ORDER);
    }
}

/// Diagonal matrix elements of every pairwise coupling in one occupation
/// state, by tensor Gauss-Hermite quadrature over the mode coordinates.
fn state_tables<T: Scalar>(
    config: &TrapPairConfig<T>,
    mech: &PairMechanics<T>,
    modes: &[CombinedMode<T>],
    rules: &HashMap<usize, GaussHermite<T>>,
    occupations: &[u32],
    base_order: usize,
) -> Result<StateTables<T>> {
    let n_a = mech.n_a;
    let n_b = mech.n_b;
    let n_ions = n_a + n_b;
    let orders = mode_orders(modes, occupations, base_order)?;

    // Per-mode node tables: displacement coordinate and normalized weight
    // including the |h_n|^2 occupation factor.
    let mut node_u: Vec<Vec<T>> = Vec::with_capacity(modes.len());
    let mut node_w: Vec<Vec<T>> = Vec::with_capacity(modes.len());
    for ((mode, &n), &order) in modes.iter().zip(occupations).zip(&orders) {
        let rule = rules
            .get(&order)
            .ok_or_else(|| Error::numeric("missing quadrature rule"))?;
        let sqrt_nu = Float::sqrt(mode.frequency);
        let mut us = Vec::with_capacity(rule.order());
        let mut ws = Vec::with_capacity(rule.order());
        let mut total = T::zero();
        for (y, w) in rule.nodes().iter().zip(rule.weights()) {
            let h = hermite_normalized(n as usize, *y);
            let weight = *w * h * h;
            us.push(*y / sqrt_nu);
            ws.push(weight);
            total += weight;
        }
        for w in &mut ws {
            *w /= total;
        }
        node_u.push(us);
        node_w.push(ws);
    }

    let guard_frac = cv::<T>(GAP_FRACTION);
    // Per-chain clamp threshold for same-line separations; single-ion
    // chains never produce same-line pairs.
    let thresholds: Vec<T> = mech
        .chains
        .iter()
        .map(|c| c.min_gap.map_or(T::zero(), |g| guard_frac * g))
        .collect();

    let mut cross = DMatrix::<T>::zeros(n_a, n_b);
    let mut self_a = DMatrix::<T>::zeros(n_a, n_a);
    let mut self_b = DMatrix::<T>::zeros(n_b, n_b);
    let mut invalid_mass = T::zero();

    let mut positions = vec![T::zero(); n_ions];
    for idx in Odometer::new(orders.clone()) {
        let mut weight = T::one();
        for (m, &k) in idx.iter().enumerate() {
            weight *= node_w[m][k];
        }

        // Ion x positions: equilibrium plus the mode superposition.
        for (ion, &(chain_idx, local)) in mech.ion_map.iter().enumerate() {
            positions[ion] = mech.chains[chain_idx].xs[local];
        }
        for (m, mode) in modes.iter().enumerate() {
            let u = node_u[m][idx[m]];
            if u == T::zero() {
                continue;
            }
            let chain = &mech.chains[mode.chain];
            for (ion, &(chain_idx, local)) in mech.ion_map.iter().enumerate() {
                if chain_idx == mode.chain {
                    positions[ion] += u * chain.modes.mode_vectors()[(local, mode.local)];
                }
            }
        }

        // Validity guard: same-line neighbors past the harmonic regime are
        // evaluated with the separation clamped at the threshold, and their
        // total mass is accounted against the budget.
        for (ci, chain) in mech.chains.iter().enumerate() {
            let Some(min_gap) = chain.min_gap else { continue };
            let threshold = guard_frac * min_gap;
            let mut prev: Option<T> = None;
            let mut violated = false;
            for (ion, &(c, _)) in mech.ion_map.iter().enumerate() {
                if c != ci {
                    continue;
                }
                if let Some(p) = prev {
                    if positions[ion] - p < threshold {
                        violated = true;
                        break;
                    }
                }
                prev = Some(positions[ion]);
            }
            if violated {
                invalid_mass += weight;
                break;
            }
        }

        let dy = config.dy;
        // Same-line distances are clamped from below at the chain threshold.
        let line_dist = |xa: T, xb: T, chain: usize| -> T {
            Float::max(Float::abs(xa - xb), thresholds[chain])
        };
        let cross_dist = |xa: T, xb: T| -> T {
            if mech.single {
                line_dist(xa, xb, 0)
            } else {
                Float::sqrt((xa - xb) * (xa - xb) + dy * dy)
            }
        };
        for i in 0..n_a {
            for j in 0..n_b {
                let d = cross_dist(positions[i], positions[n_a + j]);
                cross[(i, j)] += weight * config.law.at_distance(d)?;
            }
        }
        for i in 0..n_a {
            for i2 in (i + 1)..n_a {
                let chain = mech.ion_map[i].0;
                let d = line_dist(positions[i2], positions[i], chain);
                self_a[(i, i2)] += weight * config.law.at_distance(d)?;
            }
        }
        for j in 0..n_b {
            for j2 in (j + 1)..n_b {
                let chain = mech.ion_map[n_a + j].0;
                let d = line_dist(positions[n_a + j2], positions[n_a + j], chain);
                self_b[(j, j2)] += weight * config.law.at_distance(d)?;
            }
        }
    }

    if invalid_mass > cv(INVALID_MASS_BUDGET) {
        return Err(Error::domain(format!(
            "occupation state {:?} puts probability mass {:e} outside the \
             harmonic small-displacement regime (same-line ions within 10% \
             of the equilibrium gap); the model is invalid for these parameters",
            occupations,
            invalid_mass.to_f64().unwrap_or(f64::NAN)
        )));
    }

    Ok(StateTables {
        cross,
        self_a,
        self_b,
        invalid_mass,
    })
}

/// Thermal ensemble of per-state coupling tables for a trap pair.
#[derive(Debug, Clone)]
pub struct ThermalCouplings<T: Scalar> {
    pub truncation: ThermalTruncation<T>,
    pub tables: Vec<StateTables<T>>,
    /// Smallest nonzero gap between retained energies.
    pub min_energy_gap: T,
    n_a: usize,
    n_b: usize,
}

impl<T: Scalar> ThermalCouplings<T> {
    /// Cross couplings as a kernel usable by the encoding optimizer.
    pub fn kernel(&self) -> CouplingKernel<T> {
        CouplingKernel::from_parts(
            self.truncation
                .states
                .iter()
                .map(|s| s.probability)
                .collect(),
            self.tables.iter().map(|t| t.cross.clone()).collect(),
            false,
        )
    }

    /// Distribution of the logical coupling for given encodings.
    pub fn distribution(
        &self,
        a: &LogicalVector<T>,
        b: &LogicalVector<T>,
    ) -> Result<CouplingDistribution<T>> {
        self.kernel().distribution(a, b)
    }

    /// Per-state self-interaction phases `mu^a_k`, `mu^b_k`.
    pub fn self_couplings(
        &self,
        a: &LogicalVector<T>,
        b: &LogicalVector<T>,
    ) -> Result<(Vec<T>, Vec<T>)> {
        if a.len() != self.n_a || b.len() != self.n_b {
            return Err(Error::validation("encoding sizes do not match the config"));
        }
        let quad = |table: &DMatrix<T>, v: &[T]| -> T {
            let mut acc = T::zero();
            for i in 0..v.len() {
                for j in (i + 1)..v.len() {
                    acc += v[i] * v[j] * table[(i, j)];
                }
            }
            acc
        };
        Ok((
            self.tables
                .iter()
                .map(|t| quad(&t.self_a, a.entries()))
                .collect(),
            self.tables
                .iter()
                .map(|t| quad(&t.self_b, b.entries()))
                .collect(),
        ))
    }

    /// Largest cross-coupling reachable by any box encoding.
    pub fn max_coupling_bound(&self) -> T {
        let mut bound = T::zero();
        for t in &self.tables {
            let mut acc = T::zero();
            for v in t.cross.iter() {
                acc += Float::abs(*v);
            }
            bound = Float::max(bound, acc);
        }
        bound
    }
}

/// Build the thermal coupling ensemble for a trap pair.
pub fn thermal_couplings<T: Scalar>(
    config: &TrapPairConfig<T>,
    temperature: T,
    epsilon: T,
    base_order: usize,
    state_cap: usize,
) -> Result<ThermalCouplings<T>> {
    let mech = pair_mechanics(config)?;
    let decomp_refs: Vec<&ModeDecomposition<T>> =
        mech.chains.iter().map(|c| &c.modes).collect();
    let truncation = thermal_truncation(&decomp_refs, temperature, epsilon, state_cap)?;
    let modes = combined_modes(&mech);

    // Precompute every quadrature rule order the states will need.
    let mut orders_needed: Vec<usize> = vec![1];
    for s in &truncation.states {
        orders_needed.extend(mode_orders(&modes, &s.occupations, base_order)?);
    }
    orders_needed.sort_unstable();
    orders_needed.dedup();
    let mut rules = HashMap::new();
    for order in orders_needed {
        rules.insert(order, GaussHermite::<T>::new(order)?);
    }

    use rayon::prelude::*;
    let tables: Vec<Result<StateTables<T>>> = truncation
        .states
        .par_iter()
        .map(|s| state_tables(config, &mech, &modes, &rules, &s.occupations, base_order))
        .collect();
    let tables = tables.into_iter().collect::<Result<Vec<_>>>()?;

    // Smallest nonzero energy gap among the retained states.
    let mut energies: Vec<T> = truncation.states.iter().map(|s| s.energy).collect();
    energies.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let scale = energies.last().copied().unwrap_or(T::one());
    let mut min_gap = T::infinity();
    for w in energies.windows(2) {
        let gap = w[1] - w[0];
        if gap > cv::<T>(1e-9) * Float::max(scale, T::one()) {
            min_gap = Float::min(min_gap, gap);
        }
    }

    Ok(ThermalCouplings {
        truncation,
        tables,
        min_energy_gap: min_gap,
        n_a: config.n_a(),
        n_b: config.n_b(),
    })
}

/// Diagonal logical coupling of a single occupation state.
pub fn diagonal_mode_coupling<T: Scalar>(
    config: &TrapPairConfig<T>,
    occupations: &[u32],
    base_order: usize,
) -> Result<T> {
    let mech = pair_mechanics(config)?;
    let modes = combined_modes(&mech);
    if occupations.len() != modes.len() {
        return Err(Error::validation("occupation vector must cover every mode"));
    }
    let orders = mode_orders(&modes, occupations, base_order)?;
    let mut rules = HashMap::new();
    for order in orders {
        rules.entry(order).or_insert(GaussHermite::<T>::new(order)?);
    }
    rules.entry(1).or_insert(GaussHermite::<T>::new(1)?);
    let tables = state_tables(config, &mech, &modes, &rules, occupations, base_order)?;
    let mut mu = T::zero();
    for (i, ai) in config.a.entries().iter().enumerate() {
        for (j, bj) in config.b.entries().iter().enumerate() {
            mu += *ai * *bj * tables.cross[(i, j)];
        }
    }
    Ok(mu)
}

/// Thermal gate fidelity in the non-degenerate (rotating-wave) regime:
/// `sum_k p_k cos^2(pi/4 - mu_k dt)`.
///
/// The self-interaction phases are computed alongside but do not enter the
/// fidelity; per mode branch they are global phases.
pub fn nondegenerate_fidelity<T: Scalar>(
    config: &TrapPairConfig<T>,
    temperature: T,
    epsilon: T,
    t: GateTime<T>,
) -> Result<T> {
    let couplings = thermal_couplings(
        config,
        temperature,
        epsilon,
        DEFAULT_MODE_ORDER,
        DEFAULT_STATE_CAP,
    )?;
    fidelity_from_couplings(&couplings, config, t)
}

/// Default cap on retained thermal states.
pub const DEFAULT_STATE_CAP: usize = 50_000;

/// Fidelity from a prebuilt coupling ensemble (kernel reuse across a grid).
pub fn fidelity_from_couplings<T: Scalar>(
    couplings: &ThermalCouplings<T>,
    config: &TrapPairConfig<T>,
    t: GateTime<T>,
) -> Result<T> {
    let bound = couplings.max_coupling_bound();
    if couplings.min_energy_gap < cv::<T>(10.0) * bound {
        log::warn!(
            "rotating-wave scale separation is marginal: min energy gap {:?} \
             vs coupling bound {:?}",
            couplings.min_energy_gap.to_f64(),
            bound.to_f64()
        );
    }
    // Self couplings are evaluated to honor the contract; they cancel in the
    // fidelity and are intentionally unused.
    let _ = couplings.self_couplings(&config.a, &config.b)?;
    let dist = couplings.distribution(&config.a, &config.b)?;
    Ok(zz_damping_fidelity(&dist, t))
}

/// Exact (non-RWA) twin-trap fidelity for one ion per module.
///
/// Evolves the joint oscillator pair in a truncated number basis with the
/// full coupling operator and traces out the mechanics; the comparison with
/// [`nondegenerate_fidelity`] bounds the rotating-wave error.
pub fn exact_twin_fidelity<T: Scalar>(
    config: &TrapPairConfig<T>,
    temperature: T,
    epsilon: T,
    t: GateTime<T>,
    level_buffer: usize,
) -> Result<T> {
    if config.n_a() != 1 || config.n_b() != 1 {
        return Err(Error::validation(
            "exact evolution is implemented for one ion per module",
        ));
    }
    let trap_b = config
        .trap_b
        .as_ref()
        .ok_or_else(|| Error::validation("exact evolution needs two traps"))?;
    let nu_a = config.trap_a.omega;
    let nu_b = trap_b.omega;

    // Levels: enough to hold the thermal truncation plus dynamical headroom.
    let mech = pair_mechanics(config)?;
    let decomp_refs: Vec<&ModeDecomposition<T>> =
        mech.chains.iter().map(|c| &c.modes).collect();
    let truncation = thermal_truncation(&decomp_refs, temperature, epsilon, DEFAULT_STATE_CAP)?;
    let max_occ = |mode: usize| -> usize {
        truncation
            .states
            .iter()
            .map(|s| s.occupations[mode] as usize)
            .max()
            .unwrap_or(0)
    };
    let la = max_occ(0) + level_buffer + 1;
    let lb = max_occ(1) + level_buffer + 1;
    let dim = la * lb;

    // Coupling operator in the number basis by 2D Gauss-Hermite quadrature.
    let order = (la.max(lb) + DEFAULT_MODE_ORDER).max(24);
    let rule = GaussHermite::<T>::new(order)?;
    let mut mu_op = DMatrix::<T>::zeros(dim, dim);
    let sqrt_a = Float::sqrt(nu_a);
    let sqrt_b = Float::sqrt(nu_b);
    let mut h_a = vec![vec![T::zero(); rule.order()]; la];
    let mut h_b = vec![vec![T::zero(); rule.order()]; lb];
    for (k, y) in rule.nodes().iter().enumerate() {
        for (n, row) in h_a.iter_mut().enumerate() {
            row[k] = hermite_normalized(n, *y);
        }
        for (n, row) in h_b.iter_mut().enumerate() {
            row[k] = hermite_normalized(n, *y);
        }
    }
    for (ka, ya) in rule.nodes().iter().enumerate() {
        let ua = *ya / sqrt_a;
        let wa = rule.weights()[ka];
        for (kb, yb) in rule.nodes().iter().enumerate() {
            let ub = *yb / sqrt_b;
            let w = wa * rule.weights()[kb];
            let d = Float::sqrt((ua - ub) * (ua - ub) + config.dy * config.dy);
            let mu = config.law.at_distance(d)?;
            for na in 0..la {
                for nap in na..la {
                    let fa = h_a[na][ka] * h_a[nap][ka];
                    for nb in 0..lb {
                        for nbp in 0..lb {
                            if nap == na && nbp < nb {
                                continue;
                            }
                            let val = w * fa * h_b[nb][kb] * h_b[nbp][kb] * mu;
                            mu_op[(na * lb + nb, nap * lb + nbp)] += val;
                        }
                    }
                }
            }
        }
    }
    // Mirror the computed upper block to the full Hermitian operator.
    for r in 0..dim {
        for c in 0..r {
            mu_op[(r, c)] = mu_op[(c, r)];
        }
    }

    let sign_ab = config.a.entries()[0] * config.b.entries()[0];
    let mut h_plus = DMatrix::<Complex<T>>::zeros(dim, dim);
    let mut h_minus = DMatrix::<Complex<T>>::zeros(dim, dim);
    let half = cv::<T>(0.5);
    for na in 0..la {
        for nb in 0..lb {
            let idx = na * lb + nb;
            let e = nu_a * (cv::<T>(na as f64) + half) + nu_b * (cv::<T>(nb as f64) + half);
            h_plus[(idx, idx)] = Complex::new(e, T::zero());
            h_minus[(idx, idx)] = Complex::new(e, T::zero());
        }
    }
    for r in 0..dim {
        for c in 0..dim {
            let v = sign_ab * mu_op[(r, c)];
            h_plus[(r, c)] += Complex::new(v, T::zero());
            h_minus[(r, c)] -= Complex::new(v, T::zero());
        }
    }

    // Thermal mechanical state embedded in the truncated number basis.
    let mut rho = DMatrix::<Complex<T>>::zeros(dim, dim);
    for s in &truncation.states {
        let (na, nb) = (s.occupations[0] as usize, s.occupations[1] as usize);
        rho[(na * lb + nb, na * lb + nb)] = Complex::new(s.probability, T::zero());
    }

    BlockEvolution::new(h_plus, h_minus)?.fidelity(&rho, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{logical_coupling_reference, ModuleLayout, ModulePair, SpatialVector};
    use approx::assert_abs_diff_eq;

    #[test]
    fn equilibrium_single_ion_at_center() {
        let x = equilibrium_positions::<f64>(1).unwrap();
        assert_eq!(x, vec![0.0]);
    }

    #[test]
    fn equilibrium_two_ions_closed_form() {
        // Minimize d^2/4 + 1/d: d^3 = 2, x = -+2^(-2/3).
        let x = equilibrium_positions::<f64>(2).unwrap();
        let expected = 2.0f64.powf(-2.0 / 3.0);
        assert_abs_diff_eq!(x[0], -expected, epsilon = 1e-10);
        assert_abs_diff_eq!(x[1], expected, epsilon = 1e-10);
    }

    #[test]
    fn equilibrium_three_ions_closed_form() {
        let x = equilibrium_positions::<f64>(3).unwrap();
        let expected = 1.25f64.powf(1.0 / 3.0);
        assert_abs_diff_eq!(x[0], -expected, epsilon = 1e-10);
        assert_abs_diff_eq!(x[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x[2], expected, epsilon = 1e-10);
    }

    #[test]
    fn equilibrium_all_sizes_converge() {
        for k in 1..=MAX_IONS {
            let x = equilibrium_positions::<f64>(k).unwrap();
            assert!(x.windows(2).all(|w| w[1] > w[0]), "K={k} not ascending");
            let g = potential_gradient(&x);
            assert!(grad_norm(&g) < 1e-12, "K={k} residual {}", grad_norm(&g));
            // Antisymmetric about the center.
            for i in 0..k {
                assert_abs_diff_eq!(x[i], -x[k - 1 - i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn modes_three_ions_known_spectrum() {
        let spec = TrapSpec::new(3, 1.0, 1.0).unwrap();
        let modes = mode_decomposition(&spec).unwrap();
        assert_abs_diff_eq!(modes.lambdas()[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(modes.lambdas()[1], 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(modes.lambdas()[2], 29.0 / 5.0, epsilon = 1e-10);

        // Known mode vectors up to sign.
        let v = modes.mode_vectors();
        let s3 = 3.0f64.sqrt().recip();
        let s2 = 2.0f64.sqrt().recip();
        let s6 = 6.0f64.sqrt().recip();
        let expect = [
            vec![s3, s3, s3],
            vec![s2, 0.0, -s2],
            vec![s6, -2.0 * s6, s6],
        ];
        for (m, exp) in expect.iter().enumerate() {
            let dot: f64 = (0..3).map(|r| v[(r, m)] * exp[r]).sum();
            assert_abs_diff_eq!(dot.abs(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn modes_orthonormal_and_reconstruct_hessian() {
        for k in [2usize, 4, 6, 9] {
            let spec = TrapSpec::new(k, 2.0, 3.0).unwrap();
            let modes = mode_decomposition(&spec).unwrap();
            let v = modes.mode_vectors();
            let gram = v.transpose() * v;
            for i in 0..k {
                for j in 0..k {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(gram[(i, j)], expected, epsilon = 1e-10);
                }
            }
            // lambda_1 = 1 with a uniform vector.
            assert_abs_diff_eq!(modes.lambdas()[0], 1.0, epsilon = 1e-10);

            let xbar = modes.equilibrium_dimensionless();
            let hess = potential_hessian(xbar);
            let mut rebuilt = DMatrix::<f64>::zeros(k, k);
            for m in 0..k {
                let col = v.column(m);
                rebuilt += col * col.transpose() * modes.lambdas()[m];
            }
            for i in 0..k {
                for j in 0..k {
                    assert_abs_diff_eq!(rebuilt[(i, j)], hess[(i, j)], epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn modes_scale_with_omega_and_length_only() {
        let base = mode_decomposition(&TrapSpec::new(4, 1.0, 1.0).unwrap()).unwrap();
        let scaled = mode_decomposition(&TrapSpec::new(4, 2.5, 3.0).unwrap()).unwrap();
        for m in 0..4 {
            assert_abs_diff_eq!(scaled.lambdas()[m], base.lambdas()[m], epsilon = 1e-12);
            assert_abs_diff_eq!(
                scaled.frequencies()[m],
                2.5 * base.frequencies()[m],
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                scaled.equilibrium()[m],
                3.0 * base.equilibrium()[m],
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn truncation_cold_limit_is_ground_state() {
        let modes = mode_decomposition(&TrapSpec::new(3, 1.0, 1.0).unwrap()).unwrap();
        let tr = thermal_truncation(&[&modes], 1e-6, 0.5, 1000).unwrap();
        assert_eq!(tr.states.len(), 1);
        assert_eq!(tr.states[0].occupations, vec![0, 0, 0]);
        assert_abs_diff_eq!(tr.states[0].probability, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn truncation_single_mode_geometric_count() {
        // T = nu, epsilon = 0.05: smallest n with 1 - e^{-(n+1)} >= 0.95 is 2.
        let modes = mode_decomposition(&TrapSpec::new(1, 1.0, 1.0).unwrap()).unwrap();
        let tr = thermal_truncation(&[&modes], 1.0, 0.05, 1000).unwrap();
        assert_eq!(tr.states.len(), 3);
        assert!(tr.retained_fraction >= 0.95);
        let p_total: f64 = tr.states.iter().map(|s| s.probability).sum();
        assert_abs_diff_eq!(p_total, 1.0, epsilon = 1e-14);
        // Sorted ascending in energy.
        assert!(tr.states.windows(2).all(|w| w[0].energy <= w[1].energy));
    }

    #[test]
    fn truncation_mass_bound_fig6a_preset() {
        let spec = TrapSpec::new(4, 1.0, 4.78).unwrap();
        let modes = mode_decomposition(&spec).unwrap();
        let tr = thermal_truncation(&[&modes], 1.3, 0.07, 50_000).unwrap();
        assert!(tr.retained_fraction >= 0.93, "retained {}", tr.retained_fraction);
        let p_total: f64 = tr.states.iter().map(|s| s.probability).sum();
        assert_abs_diff_eq!(p_total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn truncation_enumeration_has_no_duplicates() {
        let spec = TrapSpec::new(3, 1.0, 1.0).unwrap();
        let modes = mode_decomposition(&spec).unwrap();
        let tr = thermal_truncation(&[&modes], 2.0, 0.02, 50_000).unwrap();
        let mut seen = std::collections::HashSet::new();
        for s in &tr.states {
            assert!(seen.insert(s.occupations.clone()), "duplicate {:?}", s.occupations);
        }
    }

    fn twin_config(n: usize, omega_a: f64, omega_b: f64, l: f64, dy: f64) -> TrapPairConfig<f64> {
        TrapPairConfig::twin_traps(
            n,
            omega_a,
            omega_b,
            l,
            dy,
            LogicalVector::trivial(n),
            LogicalVector::trivial(n),
            CouplingLaw::new(1.0, 3).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn stiff_trap_limit_matches_frozen_geometry() {
        // Very stiff traps: the ground-state coupling approaches the
        // frozen-geometry logical coupling.
        let config = twin_config(2, 1e6, 1e6, 8.31, 2.0);
        let mech = pair_mechanics(&config).unwrap();
        let modes = combined_modes(&mech);
        let mu = diagonal_mode_coupling(&config, &vec![0; modes.len()], 20).unwrap();

        let xs = mode_decomposition(&TrapSpec::new(2, 1e6, 8.31).unwrap())
            .unwrap()
            .equilibrium()
            .to_vec();
        let layout_a = ModuleLayout::new(
            xs.iter()
                .map(|x| SpatialVector::new(vec![*x, 0.0]).unwrap())
                .collect(),
        )
        .unwrap();
        let layout_b = ModuleLayout::new(
            xs.iter()
                .map(|x| SpatialVector::new(vec![*x, 2.0]).unwrap())
                .collect(),
        )
        .unwrap();
        let pair = ModulePair::new(
            layout_a,
            layout_b,
            LogicalVector::trivial(2),
            LogicalVector::trivial(2),
            CouplingLaw::new(1.0, 3).unwrap(),
        )
        .unwrap();
        let frozen = logical_coupling_reference(&pair).unwrap();
        assert_abs_diff_eq!(mu, frozen, epsilon = 1e-6);
    }

    #[test]
    fn zero_encoding_zero_coupling() {
        let mut config = twin_config(2, 1.0, 1.0, 8.31, 2.0);
        config.a = LogicalVector::new(vec![0.0, 0.0]).unwrap();
        let mech = pair_mechanics(&config).unwrap();
        let modes = combined_modes(&mech);
        let mu = diagonal_mode_coupling(&config, &vec![0; modes.len()], 12).unwrap();
        assert_eq!(mu, 0.0);
    }

    #[test]
    fn single_ion_pair_matches_direct_quadrature() {
        // One ion per trap: the diagonal coupling is a plain 2D integral of
        // J ((xA - xB)^2 + dy^2)^(-gamma/2) against the two densities,
        // evaluated here with an independent trapezoid rule.
        let config = twin_config(1, 1.0, 0.5, 10.0, 6.0);
        let occ = [1u32, 2u32];
        let mu = diagonal_mode_coupling(&config, &occ, 28).unwrap();

        let psi2 = |n: usize, nu: f64, x: f64| {
            let p = crate::quad::oscillator_wavefunction(n, nu, x);
            p * p
        };
        let mut direct = 0.0;
        let h = 0.01;
        let half_range = 14.0;
        let mut xa = -half_range;
        while xa <= half_range {
            let mut xb = -half_range;
            let wa = psi2(occ[0] as usize, 1.0, xa);
            while xb <= half_range {
                let d2 = (xa - xb) * (xa - xb) + 36.0;
                direct += wa * psi2(occ[1] as usize, 0.5, xb) / d2.powf(1.5) * h * h;
                xb += h;
            }
            xa += h;
        }
        assert_abs_diff_eq!(mu, direct, epsilon = 1e-6);
    }

    #[test]
    fn thermal_fidelity_cold_limit_and_zero_time() {
        let config = twin_config(2, 1.0, 1.0 / 3.0, 8.31, 2.0);
        // dt = 0 -> 1/2 regardless of temperature.
        let f0 = nondegenerate_fidelity(&config, 0.2, 0.01, GateTime::new(0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(f0, 0.5, epsilon = 1e-14);

        // T -> 0: fidelity equals the single ground-state coupling's.
        let couplings = thermal_couplings(&config, 1e-7, 0.5, 20, 1000).unwrap();
        assert_eq!(couplings.truncation.states.len(), 1);
        let mu0 = couplings.tables[0]
            .cross
            .iter()
            .copied()
            .sum::<f64>();
        let dt = 0.3 / mu0;
        let f = fidelity_from_couplings(&couplings, &config, GateTime::new(dt).unwrap()).unwrap();
        let expected = (std::f64::consts::FRAC_PI_4 - mu0 * dt).cos().powi(2);
        assert_abs_diff_eq!(f, expected, epsilon = 1e-12);
    }

    #[test]
    fn self_couplings_do_not_affect_fidelity() {
        let config = twin_config(2, 1.0, 1.0 / 3.0, 8.31, 2.0);
        let couplings = thermal_couplings(&config, 0.2, 0.01, 16, 10_000).unwrap();
        let t = GateTime::new(5.0).unwrap();
        let f = fidelity_from_couplings(&couplings, &config, t).unwrap();

        let mut zeroed = couplings.clone();
        for tables in &mut zeroed.tables {
            tables.self_a.fill(0.0);
            tables.self_b.fill(0.0);
        }
        let f_zeroed = fidelity_from_couplings(&zeroed, &config, t).unwrap();
        assert_eq!(f, f_zeroed);
    }

    #[test]
    fn quadrature_doubling_single_trap() {
        // Same-line gamma = 3 arrangement with the fig6a parameters at the
        // default size: the per-state couplings must be stable under
        // doubling the base order.
        let trap = TrapSpec::new(4, 1.0, 4.78).unwrap();
        let config = TrapPairConfig::single_trap_split(
            trap,
            LogicalVector::trivial(2),
            LogicalVector::trivial(2),
            CouplingLaw::new(1.0, 3).unwrap(),
        )
        .unwrap();
        let c1 = thermal_couplings(&config, 1.3, 0.07, 20, 50_000).unwrap();
        let c2 = thermal_couplings(&config, 1.3, 0.07, 40, 50_000).unwrap();
        let a = LogicalVector::trivial(2);
        let b = LogicalVector::trivial(2);
        let d1 = c1.distribution(&a, &b).unwrap();
        let d2 = c2.distribution(&a, &b).unwrap();
        let mut worst = 0.0f64;
        for (n1, n2) in d1.nodes().iter().zip(d2.nodes()) {
            worst = worst.max((n1.0 - n2.0).abs());
        }
        assert!(worst < 1e-7, "doubling changed a coupling by {worst:e}");
    }

    #[test]
    fn quadrature_doubling_two_trap_variants() {
        // The fig6b and fig6c arrangements at their default sizes.
        let cold = TrapPairConfig::cold_mediator(
            TrapSpec::new(2, 1.0, 15.97).unwrap(),
            0.01,
            20.0,
            LogicalVector::trivial(2),
            LogicalVector::trivial(1),
            CouplingLaw::new(1.0, 3).unwrap(),
        )
        .unwrap();
        let twin = twin_config(2, 1.0, 1.0 / 3.0, 8.31, 2.0);
        for (config, temperature, epsilon, label) in
            [(&cold, 0.1, 0.05, "cold"), (&twin, 0.2, 0.01, "twin")]
        {
            let c1 = thermal_couplings(config, temperature, epsilon, 20, 50_000).unwrap();
            let c2 = thermal_couplings(config, temperature, epsilon, 40, 50_000).unwrap();
            let d1 = c1.distribution(&config.a, &config.b).unwrap();
            let d2 = c2.distribution(&config.a, &config.b).unwrap();
            let mut worst = 0.0f64;
            for (n1, n2) in d1.nodes().iter().zip(d2.nodes()) {
                worst = worst.max((n1.0 - n2.0).abs());
            }
            assert!(worst < 1e-7, "{label}: doubling changed a coupling by {worst:e}");
        }
    }

    #[test]
    fn rwa_agrees_with_exact_twin_evolution() {
        // Strong scale separation: omega / mu_bar > 1e3.
        let config = twin_config(1, 1.0, 1.0, 10.0, 12.0);
        let couplings = thermal_couplings(&config, 0.5, 0.01, 24, 10_000).unwrap();
        let mu0: f64 = couplings.tables[0].cross[(0, 0)];
        assert!(1.0 / mu0.abs() > 1e3, "separation only {}", 1.0 / mu0.abs());
        for dt in [0.2 / mu0, 0.8 / mu0] {
            let t = GateTime::new(dt).unwrap();
            let rwa = fidelity_from_couplings(&couplings, &config, t).unwrap();
            let exact = exact_twin_fidelity(&config, 0.5, 0.01, t, 4).unwrap();
            assert!(
                (rwa - exact).abs() < 1e-3,
                "RWA {} vs exact {} at dt {}",
                rwa,
                exact,
                dt
            );
        }
    }
}
