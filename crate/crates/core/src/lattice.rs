//! Fully quantized 2D lattice of independently trapped particles.
//!
//! Each particle sits in its own isotropic harmonic well on a 2D lattice:
//! module A occupies the column at `x = 0`, module B the column at
//! `x = dx`, with `dy` between rows. The mechanical space of a particle is
//! truncated to the fixed three-level set {ground, one x quantum, one y
//! quantum}. The joint Hamiltonian is diagonal in the logical Z basis, so
//! the evolution reduces to two mechanical blocks whose exact propagators
//! give the reduced two-qubit channel; no rotating-wave approximation is
//! involved, which is what makes this module the oracle for the trap
//! module's RWA path.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fidelity::{choi_fidelity, BlockEvolution, GateTime, TwoQubitChannel};
use crate::geometry::{CouplingLaw, LogicalVector};
use crate::quad::{hermite_normalized, GaussHermite, Odometer};
use crate::scalar::{cv, Scalar};

/// States per particle: |00>, |01> (one y quantum), |10> (one x quantum).
pub const LEVELS_PER_PARTICLE: usize = 3;
/// Mechanical dimension cap (3^(2N), so N <= 3).
pub const MECH_DIM_CAP: usize = 729;
/// Default Gauss-Hermite order per displacement coordinate for the
/// pair-coupling matrix elements.
pub const DEFAULT_COUPLING_ORDER: usize = 24;

/// Configuration of the quantized lattice.
#[derive(Debug, Clone)]
pub struct LatticeConfig<T: Scalar> {
    pub n_per_module: usize,
    pub omega: T,
    pub dx: T,
    pub dy: T,
    pub a: LogicalVector<T>,
    pub b: LogicalVector<T>,
    pub law: CouplingLaw<T>,
    /// Quadrature order per coordinate for the coupling matrix elements.
    pub coupling_order: usize,
}

impl<T: Scalar> LatticeConfig<T> {
    pub fn new(
        n_per_module: usize,
        omega: T,
        dx: T,
        dy: T,
        a: LogicalVector<T>,
        b: LogicalVector<T>,
        law: CouplingLaw<T>,
    ) -> Result<Self> {
        if n_per_module == 0 {
            return Err(Error::validation("need at least one particle per module"));
        }
        if a.len() != n_per_module || b.len() != n_per_module {
            return Err(Error::validation("encodings must match the module size"));
        }
        if !(Float::is_finite(omega) && omega > T::zero()) {
            return Err(Error::validation("trap frequency must be finite and > 0"));
        }
        if !(dx > T::zero() && dy > T::zero()) {
            return Err(Error::validation("lattice spacings must be > 0"));
        }
        let config = LatticeConfig {
            n_per_module,
            omega,
            dx,
            dy,
            a,
            b,
            law,
            coupling_order: DEFAULT_COUPLING_ORDER,
        };
        config.mech_dim()?;
        Ok(config)
    }

    /// Total mechanical dimension `3^(2N)`, capped.
    pub fn mech_dim(&self) -> Result<usize> {
        let mut dim = 1usize;
        for _ in 0..2 * self.n_per_module {
            dim *= LEVELS_PER_PARTICLE;
            if dim > MECH_DIM_CAP {
                return Err(Error::size(format!(
                    "mechanical dimension 3^(2N) exceeds the cap {MECH_DIM_CAP}; N <= 3"
                )));
            }
        }
        Ok(dim)
    }

    /// Equilibrium position of particle `i` of module A (column x = 0) or
    /// B (column x = dx).
    fn equilibrium(&self, module: usize, i: usize) -> (T, T) {
        let x = if module == 0 { T::zero() } else { self.dx };
        (x, cv::<T>(i as f64) * self.dy)
    }
}

/// A mechanical density matrix over the truncated lattice space.
#[derive(Debug, Clone)]
pub struct MechanicalState<T: Scalar> {
    density: DMatrix<Complex<T>>,
}

impl<T: Scalar> MechanicalState<T> {
    pub fn new(density: DMatrix<Complex<T>>) -> Result<Self> {
        let dim = density.nrows();
        if density.ncols() != dim {
            return Err(Error::validation("density matrix must be square"));
        }
        let tol = cv::<T>(1e-12);
        for i in 0..dim {
            for j in 0..=i {
                let d = density[(i, j)] - density[(j, i)].conj();
                if Float::max(Float::abs(d.re), Float::abs(d.im)) > tol {
                    return Err(Error::validation("density matrix is not Hermitian"));
                }
            }
        }
        let trace = density.trace();
        if Float::abs(trace.re - T::one()) > tol || Float::abs(trace.im) > tol {
            return Err(Error::validation("density matrix must have unit trace"));
        }
        let eigs = density.clone().symmetric_eigenvalues();
        if eigs.iter().any(|e| *e < -tol) {
            return Err(Error::validation("density matrix has negative eigenvalues"));
        }
        Ok(MechanicalState { density })
    }

    /// The maximally mixed state `1 / 3^(2N)`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let p = Complex::new(T::one() / cv::<T>(dim as f64), T::zero());
        MechanicalState {
            density: DMatrix::from_diagonal_element(dim, dim, p),
        }
    }

    pub fn density(&self) -> &DMatrix<Complex<T>> {
        &self.density
    }

    pub fn dim(&self) -> usize {
        self.density.nrows()
    }
}

/// Per-particle basis labels: (x quanta, y quanta).
const PARTICLE_STATES: [(usize, usize); LEVELS_PER_PARTICLE] = [(0, 0), (0, 1), (1, 0)];

/// Coupling operator between one particle of A and one of B over their
/// joint 9-dimensional truncated space.
///
/// Matrix elements are 4D Gauss-Hermite integrals over both particles' x
/// and y displacements, with the oscillator wave functions supplying the
/// weight and the normalized Hermite factors.
pub fn coupling_operator<T: Scalar>(
    config: &LatticeConfig<T>,
    i: usize,
    j: usize,
) -> Result<DMatrix<T>> {
    if i >= config.n_per_module || j >= config.n_per_module {
        return Err(Error::validation("particle index out of range"));
    }
    let (xi, yi) = config.equilibrium(0, i);
    let (xj, yj) = config.equilibrium(1, j);
    pair_operator(config, (xi, yi), (xj, yj))
}

/// Same quadrature for an arbitrary pair of equilibrium positions; used for
/// both cross-module and intra-module couplings.
fn pair_operator<T: Scalar>(
    config: &LatticeConfig<T>,
    eq_1: (T, T),
    eq_2: (T, T),
) -> Result<DMatrix<T>> {
    let order = config.coupling_order.max(2);
    let rule = GaussHermite::<T>::new(order)?;
    let sqrt_omega = Float::sqrt(config.omega);

    // Hermite factors h_m(y) h_m'(y) for m, m' in {0, 1} at every node.
    let n_nodes = rule.order();
    let mut h = [vec![T::zero(); n_nodes], vec![T::zero(); n_nodes]];
    for (k, y) in rule.nodes().iter().enumerate() {
        h[0][k] = hermite_normalized(0, *y);
        h[1][k] = hermite_normalized(1, *y);
    }

    let dim = LEVELS_PER_PARTICLE * LEVELS_PER_PARTICLE;
    let mut op = DMatrix::<T>::zeros(dim, dim);

    // 4D tensor: displacements (x1, y1, x2, y2) in node units.
    for idx in Odometer::new(vec![n_nodes; 4]) {
        let mut w = T::one();
        for &k in &idx {
            w *= rule.weights()[k];
        }
        let u = |k: usize| rule.nodes()[k] / sqrt_omega;
        let x1 = eq_1.0 + u(idx[0]);
        let y1 = eq_1.1 + u(idx[1]);
        let x2 = eq_2.0 + u(idx[2]);
        let y2 = eq_2.1 + u(idx[3]);
        let d = Float::sqrt((x1 - x2) * (x1 - x2) + (y1 - y2) * (y1 - y2));
        if d < cv(crate::noise::NODE_GUARD) {
            return Err(Error::domain(
                "quadrature node collapses the particle separation",
            ));
        }
        let mu = config.law.at_distance(d)? * w;

        for (row, (s1r, s2r)) in particle_pairs().enumerate() {
            let fr = h[s1r.0][idx[0]] * h[s1r.1][idx[1]] * h[s2r.0][idx[2]] * h[s2r.1][idx[3]];
            for (col, (s1c, s2c)) in particle_pairs().enumerate() {
                let fc =
                    h[s1c.0][idx[0]] * h[s1c.1][idx[1]] * h[s2c.0][idx[2]] * h[s2c.1][idx[3]];
                op[(row, col)] += mu * fr * fc;
            }
        }
    }
    Ok(op)
}

fn particle_pairs() -> impl Iterator<Item = ((usize, usize), (usize, usize))> {
    PARTICLE_STATES
        .iter()
        .flat_map(|s1| PARTICLE_STATES.iter().map(move |s2| (*s1, *s2)))
}

/// Embed a two-particle operator into the full mechanical space.
///
/// Particles are ordered A_0..A_{N-1}, B_0..B_{N-1}; the basis is the
/// tensor product with the last particle's index fastest.
fn embed_pair<T: Scalar>(
    op: &DMatrix<T>,
    p1: usize,
    p2: usize,
    n_particles: usize,
) -> DMatrix<T> {
    debug_assert!(p1 < p2);
    let dim = LEVELS_PER_PARTICLE.pow(n_particles as u32);
    let mut out = DMatrix::<T>::zeros(dim, dim);
    let digit = |state: usize, p: usize| -> usize {
        let shift = n_particles - 1 - p;
        (state / LEVELS_PER_PARTICLE.pow(shift as u32)) % LEVELS_PER_PARTICLE
    };
    let replace = |state: usize, p: usize, val: usize| -> usize {
        let shift = n_particles - 1 - p;
        let base = LEVELS_PER_PARTICLE.pow(shift as u32) as isize;
        (state as isize + (val as isize - digit(state, p) as isize) * base) as usize
    };
    for row in 0..dim {
        let r1 = digit(row, p1);
        let r2 = digit(row, p2);
        for c1 in 0..LEVELS_PER_PARTICLE {
            for c2 in 0..LEVELS_PER_PARTICLE {
                let val = op[(r1 * LEVELS_PER_PARTICLE + r2, c1 * LEVELS_PER_PARTICLE + c2)];
                if val == T::zero() {
                    continue;
                }
                let col = replace(replace(row, p1, c1), p2, c2);
                out[(row, col)] += val;
            }
        }
    }
    out
}

/// The two distinct logical-block Hamiltonians (`++`/`--` and `+-`/`-+`).
pub struct LatticeHamiltonian<T: Scalar> {
    pub h_plus: DMatrix<Complex<T>>,
    pub h_minus: DMatrix<Complex<T>>,
}

/// Assemble the mechanical blocks: the harmonic term, the cross-module
/// coupling with the logical sign, and the sign-free intra-module
/// self-interactions (which act on the mechanics even though they are
/// trivial on the logical qubits).
pub fn build_hamiltonian<T: Scalar>(config: &LatticeConfig<T>) -> Result<LatticeHamiltonian<T>> {
    let n = config.n_per_module;
    let n_particles = 2 * n;
    let dim = config.mech_dim()?;

    // Harmonic part: omega (m + n + 1) per particle.
    let mut h_m = DMatrix::<T>::zeros(dim, dim);
    for state in 0..dim {
        let mut e = T::zero();
        let mut rest = state;
        for _ in 0..n_particles {
            let digit = rest % LEVELS_PER_PARTICLE;
            rest /= LEVELS_PER_PARTICLE;
            let (mx, my) = PARTICLE_STATES[digit];
            e += config.omega * cv::<T>((mx + my + 1) as f64);
        }
        h_m[(state, state)] = e;
    }

    // Cross couplings sum_{ij} a_i b_j mu_hat(A_i, B_j).
    let mut cross = DMatrix::<T>::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            let weight = config.a.entries()[i] * config.b.entries()[j];
            if weight == T::zero() {
                continue;
            }
            let op = coupling_operator(config, i, j)?;
            cross += embed_pair(&op, i, n + j, n_particles) * weight;
        }
    }

    // Intra-module couplings (i < i').
    let mut selfs = DMatrix::<T>::zeros(dim, dim);
    for module in 0..2usize {
        let enc = if module == 0 { &config.a } else { &config.b };
        for i in 0..n {
            for i2 in (i + 1)..n {
                let weight = enc.entries()[i] * enc.entries()[i2];
                if weight == T::zero() {
                    continue;
                }
                let op = pair_operator(
                    config,
                    config.equilibrium(module, i),
                    config.equilibrium(module, i2),
                )?;
                let (p1, p2) = (module * n + i, module * n + i2);
                selfs += embed_pair(&op, p1, p2, n_particles) * weight;
            }
        }
    }

    let to_complex = |m: &DMatrix<T>| -> DMatrix<Complex<T>> {
        DMatrix::from_fn(dim, dim, |r, c| Complex::new(m[(r, c)], T::zero()))
    };
    let base = &h_m + &selfs;
    Ok(LatticeHamiltonian {
        h_plus: to_complex(&(&base + &cross)),
        h_minus: to_complex(&(&base - &cross)),
    })
}

/// Prepared lattice evolution: block eigendecompositions, reusable across
/// interaction times and mechanical states.
pub struct LatticeSystem<T: Scalar> {
    evolution: BlockEvolution<T>,
    dim: usize,
}

impl<T: Scalar> LatticeSystem<T> {
    pub fn new(config: &LatticeConfig<T>) -> Result<Self> {
        let h = build_hamiltonian(config)?;
        let dim = h.h_plus.nrows();
        Ok(LatticeSystem {
            evolution: BlockEvolution::new(h.h_plus, h.h_minus)?,
            dim,
        })
    }

    pub fn mech_dim(&self) -> usize {
        self.dim
    }

    /// The reduced two-qubit channel after time `t`.
    pub fn channel(
        &self,
        rho_m: &MechanicalState<T>,
        t: GateTime<T>,
    ) -> Result<TwoQubitChannel<T>> {
        self.evolution.channel(rho_m.density(), t)
    }

    /// Choi fidelity of the channel against `exp(-i pi/4 ZZ)`.
    pub fn fidelity(&self, rho_m: &MechanicalState<T>, t: GateTime<T>) -> Result<T> {
        let channel = self.channel(rho_m, t)?;
        Ok(choi_fidelity(&channel, T::pi() / cv::<T>(4.0)))
    }

    /// Specialize to one mechanical state for cheap time-grid sweeps.
    pub fn prepare(
        &self,
        rho_m: &MechanicalState<T>,
    ) -> Result<crate::fidelity::PreparedEvolution<T>> {
        self.evolution.prepare(rho_m.density())
    }
}

/// One-shot channel construction (building the blocks each call; use
/// [`LatticeSystem`] to sweep a time grid).
pub fn evolve_channel<T: Scalar>(
    config: &LatticeConfig<T>,
    rho_m: &MechanicalState<T>,
    t: GateTime<T>,
) -> Result<TwoQubitChannel<T>> {
    LatticeSystem::new(config)?.channel(rho_m, t)
}

/// One-shot fidelity of the lattice evolution against the target gate.
pub fn lattice_fidelity<T: Scalar>(
    config: &LatticeConfig<T>,
    rho_m: &MechanicalState<T>,
    t: GateTime<T>,
) -> Result<T> {
    let channel = evolve_channel(config, rho_m, t)?;
    Ok(choi_fidelity(&channel, T::pi() / cv::<T>(4.0)))
}
