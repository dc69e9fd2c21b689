//! Gauss-Hermite quadrature and harmonic-oscillator wave functions.
//!
//! The rules here integrate `exp(-y^2) f(y)` over the real line. Nodes and
//! weights come from the Golub-Welsch eigenvalue problem on the symmetric
//! tridiagonal companion matrix (0 diagonal, sqrt(k/2) off-diagonal).
//!
//! Oscillator wave functions are evaluated through the normalized Hermite
//! three-term recurrence, which is stable far beyond the factorial-based
//! closed form.

use nalgebra::DMatrix;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{cv, Scalar};

/// A one-dimensional Gauss-Hermite rule.
#[derive(Debug, Clone)]
pub struct GaussHermite<T: Scalar> {
    nodes: Vec<T>,
    /// Weights normalized to sum to 1 (probabilist's view of exp(-y^2)).
    weights: Vec<T>,
}

impl<T: Scalar> GaussHermite<T> {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::validation("quadrature order must be >= 1"));
        }
        if order == 1 {
            return Ok(GaussHermite {
                nodes: vec![T::zero()],
                weights: vec![T::one()],
            });
        }
        let mut companion = DMatrix::<T>::zeros(order, order);
        for k in 0..order - 1 {
            let e = Float::sqrt(cv::<T>((k + 1) as f64) / cv::<T>(2.0));
            companion[(k, k + 1)] = e;
            companion[(k + 1, k)] = e;
        }
        // Eigenvalues of the symmetric tridiagonal companion matrix are the
        // nodes, and they are well conditioned. The eigenvector-based weight
        // formula is not: extreme-node first components underflow to pure
        // noise, so weights come from 1/(n * h_{n-1}(x)^2) instead, which the
        // recurrence delivers with full relative precision.
        let mut nodes: Vec<T> = companion.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));

        let sqrt_2n = Float::sqrt(cv::<T>(2.0 * order as f64));
        let n_t = cv::<T>(order as f64);
        let mut pairs = Vec::with_capacity(order);
        let mut total = T::zero();
        for x in &mut nodes {
            // Newton polish on the normalized Hermite root.
            for _ in 0..3 {
                let h = hermite_normalized(order, *x);
                let dh = sqrt_2n * hermite_normalized(order - 1, *x);
                if dh != T::zero() {
                    *x -= h / dh;
                }
            }
            let hm1 = hermite_normalized(order - 1, *x);
            let w = T::one() / (n_t * hm1 * hm1);
            // Extreme-node weights underflow around order ~190; such nodes
            // contribute nothing and would break weight positivity.
            if w > T::zero() && Float::is_finite(w) {
                pairs.push((*x, w));
                total += w;
            }
        }
        let (nodes, weights) = pairs
            .into_iter()
            .map(|(x, w)| (x, w / total))
            .unzip();
        Ok(GaussHermite { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Expectation of `f` under a standard normal after the substitution
    /// `x = mean + sqrt(2) * sigma * y`.
    pub fn normal_expectation<F>(&self, mean: T, sigma: T, mut f: F) -> T
    where
        F: FnMut(T) -> T,
    {
        let s = Float::sqrt(cv::<T>(2.0)) * sigma;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(y, w)| *w * f(mean + s * *y))
            .sum()
    }
}

/// Quadrature rule for expectations under a standard normal.
///
/// Plain trapezoid nodes over `[-8.5, 8.5]` standard deviations, weighted by
/// the normal density. For integrands analytic near the real axis the
/// trapezoid rule is exponentially accurate in the node count, and unlike
/// Gauss-Hermite it keeps converging when the integrand varies on scales
/// much narrower than the Gaussian itself (e.g. a transverse offset well
/// below sigma), because its resolution is the step size rather than a
/// polynomial degree.
#[derive(Debug, Clone)]
pub struct NormalRule<T: Scalar> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

/// Half-width of the [`NormalRule`] node range, in standard deviations.
/// The truncated tail mass is ~2e-16.
pub const NORMAL_RULE_RANGE: f64 = 8.5;

impl<T: Scalar> NormalRule<T> {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::validation("quadrature order must be >= 1"));
        }
        if order == 1 {
            return Ok(NormalRule {
                nodes: vec![T::zero()],
                weights: vec![T::one()],
            });
        }
        let half = cv::<T>(NORMAL_RULE_RANGE);
        let step = cv::<T>(2.0) * half / cv::<T>((order - 1) as f64);
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        let mut total = T::zero();
        for k in 0..order {
            let y = -half + step * cv::<T>(k as f64);
            let w = Float::exp(-y * y / cv::<T>(2.0));
            nodes.push(y);
            weights.push(w);
            total += w;
        }
        for w in &mut weights {
            *w /= total;
        }
        Ok(NormalRule { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Standardized nodes (units of one standard deviation).
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Weights, normalized to sum to one.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Expectation of `f(X)` with `X ~ Normal(mean, sigma^2)`.
    pub fn expectation<F>(&self, mean: T, sigma: T, mut f: F) -> T
    where
        F: FnMut(T) -> T,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(y, w)| *w * f(mean + sigma * *y))
            .sum()
    }
}

/// Normalized Hermite polynomial `H_n(y) / sqrt(2^n n!)`, orthonormal under
/// the weight `exp(-y^2)/sqrt(pi)`.
#[inline]
pub fn hermite_normalized<T: Scalar>(n: usize, y: T) -> T {
    let mut h_prev = T::zero();
    let mut h = T::one();
    for k in 0..n {
        let kf = cv::<T>(k as f64);
        let next = y * Float::sqrt(cv::<T>(2.0) / (kf + T::one())) * h
            - Float::sqrt(kf / (kf + T::one())) * h_prev;
        h_prev = h;
        h = next;
    }
    h
}

/// Harmonic-oscillator wave function `Psi^nu_n(x)` for unit mass and hbar:
/// `(nu/pi)^(1/4) exp(-nu x^2 / 2) H_n(sqrt(nu) x) / sqrt(2^n n!)`.
pub fn oscillator_wavefunction<T: Scalar>(n: usize, nu: T, x: T) -> T {
    let y = Float::sqrt(nu) * x;
    let norm = Float::powf(nu / T::pi(), cv(0.25));
    norm * Float::exp(-y * y / cv(2.0)) * hermite_normalized(n, y)
}

/// Multi-index iterator over a tensor product of per-axis orders.
///
/// Yields indices in odometer order (last axis fastest), which keeps tensor
/// quadrature sums deterministic.
pub struct Odometer {
    dims: Vec<usize>,
    state: Vec<usize>,
    done: bool,
}

impl Odometer {
    pub fn new(dims: Vec<usize>) -> Self {
        let done = dims.is_empty() || dims.contains(&0);
        let state = vec![0; dims.len()];
        Odometer { dims, state, done }
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.state.clone();
        for axis in (0..self.dims.len()).rev() {
            self.state[axis] += 1;
            if self.state[axis] < self.dims[axis] {
                return Some(out);
            }
            self.state[axis] = 0;
        }
        self.done = true;
        Some(out)
    }
}
