//! Classical position-noise models and the coupling distributions they
//! induce.
//!
//! Each model turns a probability distribution over qubit positions into a
//! discrete distribution of the logical coupling strength `mu_bar`:
//! Gaussian models via a weighted-trapezoid normal rule (see
//! [`crate::quad::NormalRule`] for why that beats Gauss-Hermite when the
//! coupling varies on scales narrower than sigma), the independent discrete
//! model via exhaustive enumeration. A [`CouplingKernel`] caches the
//! per-node pairwise coupling tables so that `mu_bar` can be re-evaluated
//! for any encoding without redoing the quadrature; the encoding optimizer
//! leans on this.

use nalgebra::DMatrix;
use num_traits::Float;
use rand::distributions::uniform::SampleUniform;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{distance, CouplingLaw, LogicalVector, ModuleLayout, SpatialVector};
use crate::quad::{NormalRule, Odometer};
use crate::scalar::{cv, Scalar};

/// Distance at which a noise-generated configuration counts as singular.
/// Stricter than the raw coupling guard: a quadrature node this close to a
/// site signals a misconfigured model, not a numerical accident.
pub const NODE_GUARD: f64 = 1e-9;

/// Default quadrature order for one-dimensional Gaussian integrals.
///
/// The step must resolve the fastest oscillation of
/// `cos^2(pi/4 - mu_bar dt)` across the Gaussian support at the largest
/// interaction time of interest; this order is converged well past
/// `dt = 10` in the inverse-coupling units of the presets.
pub const DEFAULT_ORDER_1D: usize = 1025;
/// Default quadrature order per axis for two-dimensional Gaussian integrals.
pub const DEFAULT_ORDER_2D: usize = 257;
/// Default cap on exhaustive enumeration size.
pub const DEFAULT_ENUM_CAP: usize = 10_000_000;

/// Samples per RNG stream when sampling is split across threads. The
/// partition is part of the sampling contract: results are identical no
/// matter how many threads execute the chunks.
const SAMPLE_CHUNK: usize = 65_536;

/// Discrete distribution of the logical coupling strength.
#[derive(Debug, Clone)]
pub struct CouplingDistribution<T: Scalar> {
    nodes: Vec<(T, T)>,
    exact: bool,
}

impl<T: Scalar> CouplingDistribution<T> {
    pub fn new(nodes: Vec<(T, T)>, exact: bool) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::validation("coupling distribution needs at least one node"));
        }
        let mut total = T::zero();
        for &(mu, w) in &nodes {
            if !Float::is_finite(mu) {
                return Err(Error::validation("coupling node is non-finite"));
            }
            if !(w > T::zero()) {
                return Err(Error::validation("coupling weights must be positive"));
            }
            total += w;
        }
        let tol = cv::<T>(if exact { 1e-12 } else { 1e-10 });
        if Float::abs(total - T::one()) > tol {
            return Err(Error::validation(format!(
                "coupling weights sum to {:?}, expected 1",
                total.to_f64()
            )));
        }
        // Store exactly normalized weights.
        let nodes = nodes.into_iter().map(|(mu, w)| (mu, w / total)).collect();
        Ok(CouplingDistribution { nodes, exact })
    }

    /// `(mu_bar, weight)` pairs; weights sum to one.
    pub fn nodes(&self) -> &[(T, T)] {
        &self.nodes
    }

    /// Whether the distribution enumerates the sample space exhaustively
    /// (true) or discretizes a continuous one by quadrature (false).
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Weighted expectation of `f(mu_bar)`.
    pub fn expectation<F>(&self, mut f: F) -> T
    where
        F: FnMut(T) -> T,
    {
        self.nodes.iter().map(|&(mu, w)| w * f(mu)).sum()
    }

    pub fn mean(&self) -> T {
        self.expectation(|mu| mu)
    }

    pub fn variance(&self) -> T {
        let m = self.mean();
        self.expectation(|mu| (mu - m) * (mu - m))
    }
}

/// Cached per-node pairwise coupling tables.
///
/// Node `k` carries a weight and an `N_A x N_B` table of `mu(r_i, q_j)` at
/// that node's positions, so `mu_bar(a, b)` is the bilinear form
/// `a^T C_k b`.
#[derive(Debug, Clone)]
pub struct CouplingKernel<T: Scalar> {
    weights: Vec<T>,
    tables: Vec<DMatrix<T>>,
    exact: bool,
}

impl<T: Scalar> CouplingKernel<T> {
    fn new(weights: Vec<T>, tables: Vec<DMatrix<T>>, exact: bool) -> Self {
        debug_assert_eq!(weights.len(), tables.len());
        CouplingKernel {
            weights,
            tables,
            exact,
        }
    }

    /// Assemble a kernel from externally computed node weights and pairwise
    /// coupling tables (the quantized modules produce these).
    pub fn from_parts(weights: Vec<T>, tables: Vec<DMatrix<T>>, exact: bool) -> Self {
        CouplingKernel::new(weights, tables, exact)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn n_a(&self) -> usize {
        self.tables[0].nrows()
    }

    pub fn n_b(&self) -> usize {
        self.tables[0].ncols()
    }

    pub fn weight(&self, k: usize) -> T {
        self.weights[k]
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Logical coupling at node `k` for the given encodings.
    #[inline]
    pub fn coupling_at(&self, k: usize, a: &[T], b: &[T]) -> T {
        let table = &self.tables[k];
        let mut acc = T::zero();
        for (j, bj) in b.iter().enumerate() {
            let mut col = T::zero();
            for (i, ai) in a.iter().enumerate() {
                col += *ai * table[(i, j)];
            }
            acc += col * *bj;
        }
        acc
    }

    /// Distribution of `mu_bar` for the given encodings.
    pub fn distribution(
        &self,
        a: &LogicalVector<T>,
        b: &LogicalVector<T>,
    ) -> Result<CouplingDistribution<T>> {
        if a.len() != self.n_a() || b.len() != self.n_b() {
            return Err(Error::validation(format!(
                "encoding sizes ({}, {}) do not match kernel ({}, {})",
                a.len(),
                b.len(),
                self.n_a(),
                self.n_b()
            )));
        }
        let nodes = (0..self.len())
            .map(|k| {
                (
                    self.coupling_at(k, a.entries(), b.entries()),
                    self.weights[k],
                )
            })
            .collect();
        CouplingDistribution::new(nodes, self.exact)
    }
}

/// A model that reduces to a discrete distribution over `mu_bar`.
pub trait CouplingModel<T: Scalar> {
    /// Number of qubits in modules A and B.
    fn module_sizes(&self) -> (usize, usize);

    /// Build the cached coupling kernel.
    fn kernel(&self, law: &CouplingLaw<T>) -> Result<CouplingKernel<T>>;
}

fn displaced_coords<T: Scalar>(p: &SpatialVector<T>, shift: &[T]) -> Vec<T> {
    p.coords().iter().zip(shift).map(|(c, s)| *c + *s).collect()
}

/// Cross-module coupling table with the node guard applied.
fn cross_table<T: Scalar>(
    law: &CouplingLaw<T>,
    pos_a: &[Vec<T>],
    pos_b: &[Vec<T>],
) -> Result<DMatrix<T>> {
    let mut table = DMatrix::<T>::zeros(pos_a.len(), pos_b.len());
    for (i, r) in pos_a.iter().enumerate() {
        for (j, q) in pos_b.iter().enumerate() {
            let d = distance(r, q);
            if d < cv(NODE_GUARD) {
                return Err(Error::domain(format!(
                    "noise configuration brings qubits A{i} and B{j} within {:e}",
                    d.to_f64().unwrap_or(0.0)
                )));
            }
            table[(i, j)] = law.at_distance(d)?;
        }
    }
    Ok(table)
}

/// Module A fixed, module B a single qubit with a Gaussian position.
///
/// The 1D setting fluctuates only along x at fixed transverse offset; the
/// general constructor takes a mean position and an explicit set of noisy
/// axes, which also covers the 2D arrangement.
#[derive(Debug, Clone)]
pub struct ColdMediatorModel<T: Scalar> {
    chain: ModuleLayout<T>,
    mean: SpatialVector<T>,
    noisy_axes: Vec<usize>,
    sigma: T,
    order: usize,
}

impl<T: Scalar> ColdMediatorModel<T> {
    pub fn new(
        chain: ModuleLayout<T>,
        mean: SpatialVector<T>,
        noisy_axes: Vec<usize>,
        sigma: T,
        order: usize,
    ) -> Result<Self> {
        if !(Float::is_finite(sigma) && sigma > T::zero()) {
            return Err(Error::validation("sigma must be finite and > 0"));
        }
        if mean.dim() != chain.dim() {
            return Err(Error::validation("mean position dimension must match the chain"));
        }
        if noisy_axes.is_empty() || noisy_axes.iter().any(|&ax| ax >= mean.dim()) {
            return Err(Error::validation("noisy axes must be a non-empty subset of coordinates"));
        }
        if order == 0 {
            return Err(Error::validation("quadrature order must be >= 1"));
        }
        Ok(ColdMediatorModel {
            chain,
            mean,
            noisy_axes,
            sigma,
            order,
        })
    }

    /// 1D-chain setting: module A along x at `y = 0`, qubit B at transverse
    /// offset `dy` with `x ~ Normal(mean_x, sigma^2)`.
    pub fn new_1d(
        chain: ModuleLayout<T>,
        offset: T,
        mean_x: T,
        sigma: T,
        order: usize,
    ) -> Result<Self> {
        let mean = SpatialVector::new(vec![mean_x, offset])?;
        ColdMediatorModel::new(chain, mean, vec![0], sigma, order)
    }

    pub fn chain(&self) -> &ModuleLayout<T> {
        &self.chain
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    fn node_positions(&self) -> Result<(Vec<T>, Vec<Vec<T>>)> {
        let rule = NormalRule::new(self.order)?;
        let step = self.sigma;
        let dims = vec![rule.order(); self.noisy_axes.len()];
        let mut weights = Vec::new();
        let mut positions = Vec::new();
        for idx in Odometer::new(dims) {
            let mut w = T::one();
            let mut q: Vec<T> = self.mean.coords().to_vec();
            for (axis_slot, &node_idx) in idx.iter().enumerate() {
                w *= rule.weights()[node_idx];
                q[self.noisy_axes[axis_slot]] += step * rule.nodes()[node_idx];
            }
            weights.push(w);
            positions.push(q);
        }
        Ok((weights, positions))
    }
}

impl<T: Scalar> CouplingModel<T> for ColdMediatorModel<T> {
    fn module_sizes(&self) -> (usize, usize) {
        (self.chain.len(), 1)
    }

    fn kernel(&self, law: &CouplingLaw<T>) -> Result<CouplingKernel<T>> {
        let chain: Vec<Vec<T>> = self
            .chain
            .positions()
            .iter()
            .map(|p| p.coords().to_vec())
            .collect();
        let (weights, positions) = self.node_positions()?;
        let tables = positions
            .iter()
            .map(|q| cross_table(law, &chain, std::slice::from_ref(q)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CouplingKernel::new(weights, tables, false))
    }
}

/// Both modules rigid, their common frames displaced by i.i.d. Gaussians.
///
/// Because `mu_bar` depends only on the relative displacement, the two
/// Gaussians reduce to one Gaussian in the difference with variance
/// `2 sigma^2` per noisy axis; the reduction is validated against Monte
/// Carlo sampling of the original pair of displacements.
#[derive(Debug, Clone)]
pub struct CollectiveGaussianModel<T: Scalar> {
    layout_a: ModuleLayout<T>,
    layout_b: ModuleLayout<T>,
    sigma: T,
    noisy_axes: Vec<usize>,
    order: usize,
}

impl<T: Scalar> CollectiveGaussianModel<T> {
    pub fn new(
        layout_a: ModuleLayout<T>,
        layout_b: ModuleLayout<T>,
        sigma: T,
        noisy_axes: Vec<usize>,
        order: usize,
    ) -> Result<Self> {
        if !(Float::is_finite(sigma) && sigma > T::zero()) {
            return Err(Error::validation("sigma must be finite and > 0"));
        }
        if layout_a.dim() != layout_b.dim() {
            return Err(Error::validation("modules must share a dimension"));
        }
        if noisy_axes.is_empty() || noisy_axes.iter().any(|&ax| ax >= layout_a.dim()) {
            return Err(Error::validation("noisy axes must be a non-empty subset of coordinates"));
        }
        if order == 0 {
            return Err(Error::validation("quadrature order must be >= 1"));
        }
        Ok(CollectiveGaussianModel {
            layout_a,
            layout_b,
            sigma,
            noisy_axes,
            order,
        })
    }

    pub fn layout_a(&self) -> &ModuleLayout<T> {
        &self.layout_a
    }

    pub fn layout_b(&self) -> &ModuleLayout<T> {
        &self.layout_b
    }
}

impl<T: Scalar> CouplingModel<T> for CollectiveGaussianModel<T> {
    fn module_sizes(&self) -> (usize, usize) {
        (self.layout_a.len(), self.layout_b.len())
    }

    fn kernel(&self, law: &CouplingLaw<T>) -> Result<CouplingKernel<T>> {
        let rule = NormalRule::new(self.order)?;
        // Difference displacement r - q has std sqrt(2) sigma per axis.
        let step = Float::sqrt(cv::<T>(2.0)) * self.sigma;
        let dim = self.layout_a.dim();
        let pos_b: Vec<Vec<T>> = self
            .layout_b
            .positions()
            .iter()
            .map(|p| p.coords().to_vec())
            .collect();

        let dims = vec![rule.order(); self.noisy_axes.len()];
        let mut weights = Vec::new();
        let mut tables = Vec::new();
        for idx in Odometer::new(dims) {
            let mut w = T::one();
            let mut shift = vec![T::zero(); dim];
            for (axis_slot, &node_idx) in idx.iter().enumerate() {
                w *= rule.weights()[node_idx];
                shift[self.noisy_axes[axis_slot]] = step * rule.nodes()[node_idx];
            }
            let pos_a: Vec<Vec<T>> = self
                .layout_a
                .positions()
                .iter()
                .map(|p| displaced_coords(p, &shift))
                .collect();
            weights.push(w);
            tables.push(cross_table(law, &pos_a, &pos_b)?);
        }
        Ok(CouplingKernel::new(weights, tables, false))
    }
}

/// Every qubit displaced independently by one of `kappa` discrete offsets.
#[derive(Debug, Clone)]
pub struct IndependentDiscreteModel<T: Scalar> {
    layout_a: ModuleLayout<T>,
    layout_b: ModuleLayout<T>,
    displacements: Vec<(Vec<T>, T)>,
    cap: usize,
}

impl<T: Scalar> IndependentDiscreteModel<T> {
    pub fn new(
        layout_a: ModuleLayout<T>,
        layout_b: ModuleLayout<T>,
        displacements: Vec<(Vec<T>, T)>,
        cap: usize,
    ) -> Result<Self> {
        if layout_a.dim() != layout_b.dim() {
            return Err(Error::validation("modules must share a dimension"));
        }
        if displacements.is_empty() {
            return Err(Error::validation("need at least one displacement"));
        }
        let dim = layout_a.dim();
        let mut total = T::zero();
        for (off, p) in &displacements {
            if off.len() != dim {
                return Err(Error::validation("displacement dimension mismatch"));
            }
            if !(*p > T::zero()) {
                return Err(Error::validation("displacement probabilities must be > 0"));
            }
            total += *p;
        }
        if Float::abs(total - T::one()) > cv(1e-12) {
            return Err(Error::validation(format!(
                "displacement probabilities sum to {:?}, expected 1",
                total.to_f64()
            )));
        }
        Ok(IndependentDiscreteModel {
            layout_a,
            layout_b,
            displacements,
            cap,
        })
    }

    pub fn kappa(&self) -> usize {
        self.displacements.len()
    }

    fn config_count(&self) -> Result<usize> {
        let n = self.layout_a.len() + self.layout_b.len();
        let mut total: usize = 1;
        for _ in 0..n {
            total = total.checked_mul(self.kappa()).ok_or_else(|| {
                Error::size("enumeration size overflows; reduce module sizes or kappa")
            })?;
            if total > self.cap {
                return Err(Error::size(format!(
                    "enumeration needs kappa^(N_A+N_B) = {}^{} configurations, above the cap {}; \
                     reduce module sizes or kappa",
                    self.kappa(),
                    n,
                    self.cap
                )));
            }
        }
        Ok(total)
    }
}

impl<T: Scalar> CouplingModel<T> for IndependentDiscreteModel<T> {
    fn module_sizes(&self) -> (usize, usize) {
        (self.layout_a.len(), self.layout_b.len())
    }

    fn kernel(&self, law: &CouplingLaw<T>) -> Result<CouplingKernel<T>> {
        self.config_count()?;
        let n_a = self.layout_a.len();
        let n_total = n_a + self.layout_b.len();
        let mut weights = Vec::new();
        let mut tables = Vec::new();
        for idx in Odometer::new(vec![self.kappa(); n_total]) {
            let mut w = T::one();
            for &choice in &idx {
                w *= self.displacements[choice].1;
            }
            let pos_a: Vec<Vec<T>> = self
                .layout_a
                .positions()
                .iter()
                .enumerate()
                .map(|(i, p)| displaced_coords(p, &self.displacements[idx[i]].0))
                .collect();
            let pos_b: Vec<Vec<T>> = self
                .layout_b
                .positions()
                .iter()
                .enumerate()
                .map(|(j, p)| displaced_coords(p, &self.displacements[idx[n_a + j]].0))
                .collect();
            weights.push(w);
            tables.push(cross_table(law, &pos_a, &pos_b)?);
        }
        Ok(CouplingKernel::new(weights, tables, true))
    }
}

/// Quadrature discretization of the cold-mediator model.
pub fn distribution_cold_mediator<T: Scalar>(
    model: &ColdMediatorModel<T>,
    a: &LogicalVector<T>,
    b1: T,
    law: &CouplingLaw<T>,
) -> Result<CouplingDistribution<T>> {
    let b = LogicalVector::new(vec![b1])?;
    model.kernel(law)?.distribution(a, &b)
}

/// Quadrature discretization of the collective-noise model over the
/// difference displacement.
pub fn distribution_collective<T: Scalar>(
    model: &CollectiveGaussianModel<T>,
    a: &LogicalVector<T>,
    b: &LogicalVector<T>,
    law: &CouplingLaw<T>,
) -> Result<CouplingDistribution<T>> {
    model.kernel(law)?.distribution(a, b)
}

/// Exhaustive enumeration of the independent discrete model.
pub fn distribution_independent<T: Scalar>(
    model: &IndependentDiscreteModel<T>,
    a: &LogicalVector<T>,
    b: &LogicalVector<T>,
    law: &CouplingLaw<T>,
) -> Result<CouplingDistribution<T>> {
    model.kernel(law)?.distribution(a, b)
}

/// Any of the classical noise models, for sampling and scenario dispatch.
#[derive(Debug, Clone)]
pub enum ClassicalModel<T: Scalar> {
    ColdMediator(ColdMediatorModel<T>),
    Collective(CollectiveGaussianModel<T>),
    Independent(IndependentDiscreteModel<T>),
}

impl<T: Scalar> CouplingModel<T> for ClassicalModel<T> {
    fn module_sizes(&self) -> (usize, usize) {
        match self {
            ClassicalModel::ColdMediator(m) => m.module_sizes(),
            ClassicalModel::Collective(m) => m.module_sizes(),
            ClassicalModel::Independent(m) => m.module_sizes(),
        }
    }

    fn kernel(&self, law: &CouplingLaw<T>) -> Result<CouplingKernel<T>> {
        match self {
            ClassicalModel::ColdMediator(m) => m.kernel(law),
            ClassicalModel::Collective(m) => m.kernel(law),
            ClassicalModel::Independent(m) => m.kernel(law),
        }
    }
}

/// Draw `n` i.i.d. samples of `mu_bar` under the model.
///
/// Sampling is split into fixed-size chunks, each driven by its own ChaCha
/// stream derived from the seed, so results do not depend on how chunks are
/// scheduled across threads.
pub fn sample_coupling<T>(
    model: &ClassicalModel<T>,
    a: &LogicalVector<T>,
    b: &LogicalVector<T>,
    law: &CouplingLaw<T>,
    rng_seed: u64,
    n: usize,
) -> Result<Vec<T>>
where
    T: Scalar + SampleUniform,
    StandardNormal: Distribution<T>,
{
    if n == 0 {
        return Err(Error::validation("sample count must be >= 1"));
    }
    let (n_a, n_b) = model.module_sizes();
    if a.len() != n_a || b.len() != n_b {
        return Err(Error::validation("encoding sizes do not match the model"));
    }

    use rayon::prelude::*;
    let n_chunks = n.div_ceil(SAMPLE_CHUNK);
    let chunks: Vec<Result<Vec<T>>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(chunk as u64);
            let count = SAMPLE_CHUNK.min(n - chunk * SAMPLE_CHUNK);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                out.push(sample_one(model, a, b, law, &mut rng)?);
            }
            Ok(out)
        })
        .collect();

    let mut samples = Vec::with_capacity(n);
    for chunk in chunks {
        samples.extend(chunk?);
    }
    Ok(samples)
}

fn sample_one<T>(
    model: &ClassicalModel<T>,
    a: &LogicalVector<T>,
    b: &LogicalVector<T>,
    law: &CouplingLaw<T>,
    rng: &mut ChaCha8Rng,
) -> Result<T>
where
    T: Scalar + SampleUniform,
    StandardNormal: Distribution<T>,
{
    match model {
        ClassicalModel::ColdMediator(m) => {
            let normal = Normal::new(T::zero(), m.sigma)
                .map_err(|e| Error::validation(format!("normal distribution: {e}")))?;
            let mut q: Vec<T> = m.mean.coords().to_vec();
            for &axis in &m.noisy_axes {
                q[axis] += normal.sample(rng);
            }
            let mut total = T::zero();
            for (ai, r) in a.entries().iter().zip(m.chain.positions()) {
                let d = distance(r.coords(), &q);
                if d < cv(NODE_GUARD) {
                    return Err(Error::domain("sampled position coincides with a chain site"));
                }
                total += *ai * law.at_distance(d)?;
            }
            Ok(total * b.entries()[0])
        }
        ClassicalModel::Collective(m) => {
            let normal = Normal::new(T::zero(), m.sigma)
                .map_err(|e| Error::validation(format!("normal distribution: {e}")))?;
            // Sample the two frame displacements independently; this is the
            // un-reduced model, which doubles as the oracle for the
            // difference-variable reduction used in the quadrature path.
            let dim = m.layout_a.dim();
            let mut shift_a = vec![T::zero(); dim];
            let mut shift_b = vec![T::zero(); dim];
            for &axis in &m.noisy_axes {
                shift_a[axis] = normal.sample(rng);
                shift_b[axis] = normal.sample(rng);
            }
            let mut total = T::zero();
            for (ai, r) in a.entries().iter().zip(m.layout_a.positions()) {
                let ra = displaced_coords(r, &shift_a);
                for (bj, q) in b.entries().iter().zip(m.layout_b.positions()) {
                    let qb = displaced_coords(q, &shift_b);
                    let d = distance(&ra, &qb);
                    if d < cv(NODE_GUARD) {
                        return Err(Error::domain("sampled configuration is singular"));
                    }
                    total += *ai * *bj * law.at_distance(d)?;
                }
            }
            Ok(total)
        }
        ClassicalModel::Independent(m) => {
            let n_a = m.layout_a.len();
            let pick = |rng: &mut ChaCha8Rng| -> usize {
                let u: T = rng.gen_range(T::zero()..T::one());
                let mut acc = T::zero();
                for (k, (_, p)) in m.displacements.iter().enumerate() {
                    acc += *p;
                    if u < acc {
                        return k;
                    }
                }
                m.displacements.len() - 1
            };
            let choices_a: Vec<usize> = (0..n_a).map(|_| pick(rng)).collect();
            let choices_b: Vec<usize> = (0..m.layout_b.len()).map(|_| pick(rng)).collect();
            let mut total = T::zero();
            for (i, (ai, r)) in a.entries().iter().zip(m.layout_a.positions()).enumerate() {
                let ra = displaced_coords(r, &m.displacements[choices_a[i]].0);
                for (j, (bj, q)) in b.entries().iter().zip(m.layout_b.positions()).enumerate() {
                    let qb = displaced_coords(q, &m.displacements[choices_b[j]].0);
                    let d = distance(&ra, &qb);
                    if d < cv(NODE_GUARD) {
                        return Err(Error::domain("sampled configuration is singular"));
                    }
                    total += *ai * *bj * law.at_distance(d)?;
                }
            }
            Ok(total)
        }
    }
}
