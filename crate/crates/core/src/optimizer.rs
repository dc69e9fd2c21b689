//! Search for the logical encodings that maximize the gate fidelity, and
//! the optimal-infidelity curve over an interaction-time grid.
//!
//! The objective (fidelity as a function of the two logical vectors) is
//! smooth, cheap through a cached [`CouplingKernel`], and box-constrained to
//! `[-1, 1]^(N_A + N_B)`, so a derivative-free simplex search with restarts
//! is enough. Probes outside the box are clamped. Grid points are processed
//! in order, each warm-started from the previous optimum.

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fidelity::{zz_damping_fidelity, GateTime};
use crate::geometry::LogicalVector;
use crate::noise::{CouplingDistribution, CouplingKernel};
use crate::scalar::{cv, Scalar};

/// Optimizer settings shared by single-point searches and curve sweeps.
#[derive(Debug, Clone)]
pub struct OptimizationConfig<T: Scalar> {
    /// Interaction times, strictly ascending.
    pub dt_grid: Vec<T>,
    /// Number of restarts per grid point (>= 1). The first four are the
    /// warm start, the trivial encoding, the mirrored warm start and a
    /// seeded random point; further ones are additional random points.
    pub restarts: usize,
    /// Stop when the simplex objective spread falls below this.
    pub tolerance: T,
    /// Objective-evaluation budget per simplex run; 0 means `5000 * dim`.
    pub max_iters: usize,
    /// Warm-start each grid point from the previous optimum.
    pub warm_start: bool,
    /// Seed for the random restarts.
    pub seed: u64,
}

impl<T: Scalar> OptimizationConfig<T> {
    pub fn new(dt_grid: Vec<T>) -> Result<Self> {
        let config = OptimizationConfig {
            dt_grid,
            restarts: 4,
            tolerance: cv(1e-9),
            max_iters: 0,
            warm_start: true,
            seed: 0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dt_grid.is_empty() {
            return Err(Error::validation("dt grid must be non-empty"));
        }
        if self
            .dt_grid
            .windows(2)
            .any(|w| !(w[1] > w[0]) || !Float::is_finite(w[0]))
        {
            return Err(Error::validation("dt grid must be strictly ascending and finite"));
        }
        if self.restarts == 0 {
            return Err(Error::validation("need at least one restart"));
        }
        if !(self.tolerance > T::zero()) {
            return Err(Error::validation("tolerance must be > 0"));
        }
        Ok(())
    }

    fn iter_budget(&self, dim: usize) -> usize {
        if self.max_iters == 0 {
            5000 * dim
        } else {
            self.max_iters
        }
    }
}

/// Log-spaced grid of `points` interaction times over `[min, max]`.
pub fn log_grid<T: Scalar>(min: T, max: T, points: usize) -> Result<Vec<T>> {
    if !(min > T::zero() && max > min) || points < 2 {
        return Err(Error::validation("grid needs 0 < min < max and >= 2 points"));
    }
    let lmin = Float::ln(min);
    let lmax = Float::ln(max);
    let n1 = cv::<T>((points - 1) as f64);
    Ok((0..points)
        .map(|k| Float::exp(lmin + (lmax - lmin) * cv::<T>(k as f64) / n1))
        .collect())
}

#[inline]
fn clamp_box<T: Scalar>(x: &mut [T]) {
    for xi in x {
        *xi = Float::min(Float::max(*xi, -T::one()), T::one());
    }
}

/// Nelder-Mead simplex maximization on the clamped box.
fn simplex_maximize<T, F>(
    f: &mut F,
    start: &[T],
    tolerance: T,
    budget: usize,
) -> Result<(Vec<T>, T)>
where
    T: Scalar,
    F: FnMut(&[T]) -> Result<T>,
{
    let n = start.len();
    let mut evals = 0usize;
    let mut eval = |x: &[T], evals: &mut usize| -> Result<T> {
        *evals += 1;
        let v = f(x)?;
        if !Float::is_finite(v) {
            return Err(Error::optimization("objective returned a non-finite value"));
        }
        Ok(v)
    };

    // Initial simplex: start plus one step along each axis, flipped when the
    // step would leave the box without moving.
    let step = cv::<T>(0.25);
    let mut simplex: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    let mut start_c = start.to_vec();
    clamp_box(&mut start_c);
    simplex.push(start_c.clone());
    for i in 0..n {
        let mut p = start_c.clone();
        p[i] = if p[i] + step <= T::one() {
            p[i] + step
        } else {
            p[i] - step
        };
        simplex.push(p);
    }
    let mut values: Vec<T> = Vec::with_capacity(n + 1);
    for p in &simplex {
        values.push(eval(p, &mut evals)?);
    }

    let (alpha, gamma, rho, sigma) = (T::one(), cv::<T>(2.0), cv::<T>(0.5), cv::<T>(0.5));

    while evals < budget {
        // Descending by value: index 0 is the best vertex.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).expect("finite objective"));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        if values[best] - values[worst] < tolerance {
            break;
        }

        let mut centroid = vec![T::zero(); n];
        for &i in order.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += *x;
            }
        }
        let inv = T::one() / cv::<T>(n as f64);
        for c in &mut centroid {
            *c *= inv;
        }

        let blend = |t: T, from: &[T], to: &[T]| -> Vec<T> {
            let mut p: Vec<T> = from
                .iter()
                .zip(to)
                .map(|(c, w)| *c + t * (*c - *w))
                .collect();
            clamp_box(&mut p);
            p
        };

        let reflected = blend(alpha, &centroid, &simplex[worst]);
        let f_reflected = eval(&reflected, &mut evals)?;

        if f_reflected > values[best] {
            let expanded = blend(gamma, &centroid, &simplex[worst]);
            let f_expanded = eval(&expanded, &mut evals)?;
            if f_expanded > f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if f_reflected > values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            // Contraction: outside if the reflection helped over the worst,
            // inside otherwise.
            let contracted = if f_reflected > values[worst] {
                blend(-rho, &centroid, &reflected)
            } else {
                blend(-rho, &centroid, &simplex[worst])
            };
            let f_contracted = eval(&contracted, &mut evals)?;
            if f_contracted > Float::max(f_reflected, values[worst]) {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                // Shrink toward the best vertex.
                let best_point = simplex[best].clone();
                for i in 0..=n {
                    if i == best {
                        continue;
                    }
                    let mut p: Vec<T> = best_point
                        .iter()
                        .zip(&simplex[i])
                        .map(|(b, x)| *b + sigma * (*x - *b))
                        .collect();
                    clamp_box(&mut p);
                    values[i] = eval(&p, &mut evals)?;
                    simplex[i] = p;
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] > values[best] {
            best = i;
        }
    }
    Ok((simplex.swap_remove(best), values[best]))
}

fn l1<T: Scalar>(x: &[T]) -> T {
    x.iter().map(|v| Float::abs(*v)).sum()
}

/// Maximize an objective over the two logical vectors on their box.
///
/// Runs the configured restarts (warm start, trivial, mirrored warm start,
/// seeded random) and keeps the best result; exact ties within the
/// tolerance break toward the larger combined L1 norm, i.e. the stronger
/// coupling.
pub fn optimize_at<T, F>(
    mut objective: F,
    init: (&LogicalVector<T>, &LogicalVector<T>),
    config: &OptimizationConfig<T>,
    salt: u64,
) -> Result<(LogicalVector<T>, LogicalVector<T>, T)>
where
    T: Scalar,
    F: FnMut(&[T], &[T]) -> Result<T>,
{
    config.validate()?;
    let n_a = init.0.len();
    let n_b = init.1.len();
    let dim = n_a + n_b;
    let budget = config.iter_budget(dim);

    let mut flat = |x: &[T]| -> Result<T> { objective(&x[..n_a], &x[n_a..]) };

    let mut warm: Vec<T> = init.0.entries().to_vec();
    warm.extend_from_slice(init.1.entries());

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(salt);

    let mut starts: Vec<Vec<T>> = Vec::with_capacity(config.restarts);
    for r in 0..config.restarts {
        match r {
            0 => starts.push(warm.clone()),
            1 => starts.push(vec![T::one(); dim]),
            2 => starts.push(warm.iter().map(|x| -*x).collect()),
            _ => starts.push(
                (0..dim)
                    .map(|_| cv::<T>(rng.gen_range(-1.0..=1.0)))
                    .collect(),
            ),
        }
    }

    let mut best: Option<(Vec<T>, T)> = None;
    for start in starts {
        let (point, value) = simplex_maximize(&mut flat, &start, config.tolerance, budget)?;
        best = Some(match best {
            None => (point, value),
            Some((bp, bv)) => {
                let strictly_better = value > bv + config.tolerance;
                let tie_with_stronger_coupling =
                    value > bv - config.tolerance && l1(&point) > l1(&bp);
                if strictly_better || tie_with_stronger_coupling {
                    (point, value)
                } else {
                    (bp, bv)
                }
            }
        });
    }
    let (point, value) = best.expect("at least one restart");
    Ok((
        LogicalVector::new(point[..n_a].to_vec())?,
        LogicalVector::new(point[n_a..].to_vec())?,
        value,
    ))
}

/// One optimized grid point of an infidelity curve.
#[derive(Debug, Clone)]
pub struct CurvePoint<T: Scalar> {
    pub delta_t: T,
    pub fidelity: T,
    pub a: LogicalVector<T>,
    pub b: LogicalVector<T>,
}

/// Optimal and trivial-encoding fidelities over the interaction-time grid.
#[derive(Debug, Clone)]
pub struct InfidelityCurve<T: Scalar> {
    pub points: Vec<CurvePoint<T>>,
    pub trivial_fidelity: Vec<T>,
}

/// Fidelity of the kernel-backed model for given encodings and time.
pub fn kernel_fidelity<T: Scalar>(kernel: &CouplingKernel<T>, a: &[T], b: &[T], dt: T) -> T {
    let quarter_pi = T::pi() / cv::<T>(4.0);
    let mut f = T::zero();
    for k in 0..kernel.len() {
        let mu = kernel.coupling_at(k, a, b);
        let c = Float::cos(quarter_pi - mu * dt);
        f += kernel.weight(k) * c * c;
    }
    Float::min(Float::max(f, T::zero()), T::one())
}

/// Optimize the encodings across the whole time grid with warm-started
/// continuation, recording the trivial-encoding fidelity alongside.
pub fn infidelity_curve<T: Scalar>(
    kernel: &CouplingKernel<T>,
    config: &OptimizationConfig<T>,
) -> Result<InfidelityCurve<T>> {
    config.validate()?;
    let n_a = kernel.n_a();
    let n_b = kernel.n_b();
    let trivial_a = LogicalVector::<T>::trivial(n_a);
    let trivial_b = LogicalVector::<T>::trivial(n_b);

    let mut points: Vec<CurvePoint<T>> = Vec::with_capacity(config.dt_grid.len());
    let mut trivial_fidelity = Vec::with_capacity(config.dt_grid.len());
    let mut warm: Option<(LogicalVector<T>, LogicalVector<T>)> = None;

    for (k, &dt) in config.dt_grid.iter().enumerate() {
        trivial_fidelity.push(kernel_fidelity(
            kernel,
            trivial_a.entries(),
            trivial_b.entries(),
            dt,
        ));

        let (init_a, init_b) = match (&warm, config.warm_start) {
            (Some((a, b)), true) => (a.clone(), b.clone()),
            _ => (trivial_a.clone(), trivial_b.clone()),
        };
        let objective =
            |a: &[T], b: &[T]| -> Result<T> { Ok(kernel_fidelity(kernel, a, b, dt)) };
        let (a, b, fidelity) = optimize_at(objective, (&init_a, &init_b), config, k as u64)?;
        warm = Some((a.clone(), b.clone()));
        points.push(CurvePoint {
            delta_t: dt,
            fidelity,
            a,
            b,
        });
    }

    Ok(InfidelityCurve {
        points,
        trivial_fidelity,
    })
}

/// Slow down the effective interaction by scaling one encoding:
/// `F^{(c a) b}(dt) = F^{a b}(c dt)`.
pub fn scale_encoding<T: Scalar>(
    a: &LogicalVector<T>,
    b: &LogicalVector<T>,
    c: T,
) -> Result<(LogicalVector<T>, LogicalVector<T>)> {
    Ok((a.scaled(c)?, b.clone()))
}

/// Direct fidelity evaluation on a distribution, for identities and tests.
pub fn distribution_fidelity<T: Scalar>(dist: &CouplingDistribution<T>, dt: T) -> Result<T> {
    Ok(zz_damping_fidelity(dist, GateTime::new(dt)?))
}
