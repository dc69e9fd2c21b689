//! Fidelity functionals for the noisy ZZ gate.
//!
//! The target gate throughout is `U = exp(-i pi/4 ZZ)`. Position noise turns
//! the interaction into a ZZ-damping channel (a mixture of ZZ rotations with
//! random angle), whose Choi fidelity against the target reduces to
//! `<cos^2(pi/4 - theta)>`. This module provides that reduction, the general
//! Choi fidelity for arbitrary two-qubit channels, the product rule for a
//! gate mediated through an auxiliary system, the half-time echo that
//! cancels a static background field, and the timed-flip schedule that
//! realizes fractional logical weights.
//!
//! Choi convention: the stored matrix is `C = sum_nm |n><m| (x) U(|n><m|)`
//! (trace 4 for a trace-preserving channel). The unit-trace Choi state is
//! `C/4`, and the fidelity formula divides accordingly, so
//! `F = <cos^2(pi/4 - theta)>` comes out exactly.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::noise::CouplingDistribution;
use crate::scalar::{cv, Scalar};

/// Interaction time of the entangling evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateTime<T: Scalar>(T);

impl<T: Scalar> GateTime<T> {
    pub fn new(delta_t: T) -> Result<Self> {
        if !(Float::is_finite(delta_t) && delta_t >= T::zero()) {
            return Err(Error::validation("gate time must be finite and >= 0"));
        }
        Ok(GateTime(delta_t))
    }

    pub fn get(&self) -> T {
        self.0
    }
}

/// Tolerance for channel validation (Hermiticity, trace, positivity).
const CHANNEL_TOL: f64 = 1e-10;

/// A two-qubit channel in Choi representation.
#[derive(Debug, Clone)]
pub struct TwoQubitChannel<T: Scalar> {
    choi: DMatrix<Complex<T>>,
}

impl<T: Scalar> TwoQubitChannel<T> {
    /// Wraps a 16x16 Choi matrix, validating Hermiticity, trace 4 and
    /// complete positivity.
    pub fn new(choi: DMatrix<Complex<T>>) -> Result<Self> {
        if choi.nrows() != 16 || choi.ncols() != 16 {
            return Err(Error::validation("Choi matrix must be 16x16"));
        }
        let tol = cv::<T>(CHANNEL_TOL);
        for i in 0..16 {
            for j in 0..16 {
                let d = choi[(i, j)] - choi[(j, i)].conj();
                if Float::max(Float::abs(d.re), Float::abs(d.im)) > tol {
                    return Err(Error::validation("Choi matrix is not Hermitian"));
                }
            }
        }
        let trace = choi.trace();
        if Float::abs(trace.re - cv::<T>(4.0)) > tol || Float::abs(trace.im) > tol {
            return Err(Error::validation(format!(
                "Choi trace {:?} differs from the trace-4 convention",
                trace.re.to_f64()
            )));
        }
        let eigs = choi.clone().symmetric_eigenvalues();
        if eigs.iter().any(|e| *e < -tol) {
            return Err(Error::validation("channel is not completely positive"));
        }
        Ok(TwoQubitChannel { choi })
    }

    pub fn choi(&self) -> &DMatrix<Complex<T>> {
        &self.choi
    }

    /// Smallest Choi eigenvalue (complete positivity margin).
    pub fn min_choi_eigenvalue(&self) -> T {
        let eigs = self.choi.clone().symmetric_eigenvalues();
        eigs.iter().copied().fold(T::infinity(), Float::min)
    }

    /// Choi matrix of a mixture of two-qubit unitaries.
    pub fn from_unitary_mixture(terms: &[(T, DMatrix<Complex<T>>)]) -> Result<Self> {
        let mut choi = DMatrix::<Complex<T>>::zeros(16, 16);
        for (w, u) in terms {
            if u.nrows() != 4 || u.ncols() != 4 {
                return Err(Error::validation("unitary terms must be 4x4"));
            }
            // vec(U) = sum_n |n> (x) U|n>; Choi += w vec(U) vec(U)^dag.
            let mut v = DMatrix::<Complex<T>>::zeros(16, 1);
            for n in 0..4 {
                for i in 0..4 {
                    v[(n * 4 + i, 0)] = u[(i, n)];
                }
            }
            let wc = Complex::new(*w, T::zero());
            choi += (&v * v.adjoint()) * wc;
        }
        TwoQubitChannel::new(choi)
    }

    /// Choi matrix of the ZZ-damping channel with rotation angles
    /// `theta_k = mu_k * dt`.
    pub fn zz_damping(dist: &CouplingDistribution<T>, t: GateTime<T>) -> Result<Self> {
        let terms: Vec<(T, DMatrix<Complex<T>>)> = dist
            .nodes()
            .iter()
            .map(|&(mu, w)| (w, zz_rotation(mu * t.get())))
            .collect();
        TwoQubitChannel::from_unitary_mixture(&terms)
    }
}

/// ZZ eigenvalue (+1 or -1) of the computational basis state `n` (0..4).
#[inline]
fn zz_sign<T: Scalar>(n: usize) -> T {
    if (n ^ (n >> 1)) & 1 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// The two-qubit unitary `exp(-i theta ZZ)` (diagonal).
pub fn zz_rotation<T: Scalar>(theta: T) -> DMatrix<Complex<T>> {
    let mut u = DMatrix::<Complex<T>>::zeros(4, 4);
    for n in 0..4 {
        let phase = -theta * zz_sign::<T>(n);
        u[(n, n)] = Complex::new(Float::cos(phase), Float::sin(phase));
    }
    u
}

/// Gate fidelity of the ZZ-damping channel built from a coupling
/// distribution: `sum_k w_k cos^2(pi/4 - mu_k dt)`.
pub fn zz_damping_fidelity<T: Scalar>(dist: &CouplingDistribution<T>, t: GateTime<T>) -> T {
    let quarter_pi = T::pi() / cv::<T>(4.0);
    let f = dist.expectation(|mu| {
        let c = Float::cos(quarter_pi - mu * t.get());
        c * c
    });
    Float::min(Float::max(f, T::zero()), T::one())
}

/// Choi fidelity of an arbitrary two-qubit channel against the target
/// `exp(-i target_angle ZZ)`.
pub fn choi_fidelity<T: Scalar>(channel: &TwoQubitChannel<T>, target_angle: T) -> T {
    // |Phi_U> = 1/2 sum_n e^{-i alpha s_n} |n n>, so only the 16 entries at
    // diagonal dyads contribute: F = 1/16 sum_nm e^{i alpha (s_n - s_m)} C[(nn),(mm)].
    let mut acc = Complex::new(T::zero(), T::zero());
    for n in 0..4 {
        for m in 0..4 {
            let phase = target_angle * (zz_sign::<T>(n) - zz_sign::<T>(m));
            let rot = Complex::new(Float::cos(phase), Float::sin(phase));
            acc += rot * channel.choi[(n * 4 + n, m * 4 + m)];
        }
    }
    let f = acc.re / cv::<T>(16.0);
    Float::min(Float::max(f, T::zero()), T::one())
}

/// Fidelity of a gate mediated through a cooled auxiliary system: the
/// product of the two mediator-to-data gate fidelities.
pub fn mediated_fidelity<T: Scalar>(
    dist1: &CouplingDistribution<T>,
    dist2: &CouplingDistribution<T>,
    t: GateTime<T>,
) -> T {
    zz_damping_fidelity(dist1, t) * zz_damping_fidelity(dist2, t)
}

/// Background field strengths and total evolution time for the echo check.
#[derive(Debug, Clone)]
pub struct EchoSpec<T: Scalar> {
    pub fields: Vec<T>,
    pub tau: T,
}

impl<T: Scalar> EchoSpec<T> {
    pub fn new(fields: Vec<T>, tau: T) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::validation("echo needs at least one qubit"));
        }
        if fields.iter().any(|h| !Float::is_finite(*h)) {
            return Err(Error::validation("field strengths must be finite"));
        }
        if !(Float::is_finite(tau) && tau > T::zero()) {
            return Err(Error::validation("tau must be finite and > 0"));
        }
        Ok(EchoSpec { fields, tau })
    }
}

/// Largest supported echo register.
pub const ECHO_MAX_QUBITS: usize = 6;

/// Operator 2-norm of
/// `X^K e^{-i(Hzz+Hext) tau/2} X^K e^{-i(Hzz+Hext) tau/2} - e^{-i Hzz tau}`.
///
/// Both Hamiltonians are diagonal in the computational basis, so the exact
/// 2^K matrix exponentials are elementwise and the global flip is the
/// bit-complement permutation; the difference stays diagonal and its 2-norm
/// is the largest entry modulus. The identity is exact, so the result is
/// rounding noise.
pub fn echo_residual<T: Scalar>(spec: &EchoSpec<T>, hzz: &DMatrix<T>, k: usize) -> Result<T> {
    if k == 0 || k > ECHO_MAX_QUBITS {
        return Err(Error::size(format!(
            "echo register must have 1..={ECHO_MAX_QUBITS} qubits, got {k}"
        )));
    }
    if spec.fields.len() != k {
        return Err(Error::validation("field list length must equal qubit count"));
    }
    if hzz.nrows() != k || hzz.ncols() != k {
        return Err(Error::validation("hzz table must be K x K"));
    }
    let dim = 1usize << k;
    let half_tau = spec.tau / cv::<T>(2.0);
    let mut residual = T::zero();
    for state in 0..dim {
        let flipped = !state & (dim - 1);
        let e = diagonal_energy(hzz, &spec.fields, state, k);
        let e_flip = diagonal_energy(hzz, &spec.fields, flipped, k);
        let zz_only = diagonal_energy(hzz, &vec![T::zero(); k], state, k);

        let seq = complex_phase(-(e + e_flip) * half_tau);
        let target = complex_phase(-zz_only * spec.tau);
        let diff = seq - target;
        residual = Float::max(residual, Float::sqrt(diff.norm_sqr()));
    }
    Ok(residual)
}

/// Energy `sum_{i<j} hzz_ij s_i s_j + sum_i h_i s_i` of a computational
/// basis state, with `s_i = +1` for bit 0.
fn diagonal_energy<T: Scalar>(hzz: &DMatrix<T>, fields: &[T], state: usize, k: usize) -> T {
    let sign = |i: usize| -> T {
        if (state >> i) & 1 == 0 {
            T::one()
        } else {
            -T::one()
        }
    };
    let mut e = T::zero();
    for i in 0..k {
        e += fields[i] * sign(i);
        for j in (i + 1)..k {
            e += hzz[(i, j)] * sign(i) * sign(j);
        }
    }
    e
}

#[inline]
fn complex_phase<T: Scalar>(phi: T) -> Complex<T> {
    Complex::new(Float::cos(phi), Float::sin(phi))
}

/// Exact evolution of two encoded qubits coupled to a mechanical register.
///
/// When every term of the Hamiltonian is diagonal in the logical Z basis,
/// the joint Hamiltonian splits into one mechanical block per logical basis
/// state, and the blocks for `|++>`/`|-->` coincide, as do `|+->`/`|-+>`.
/// The reduced channel on the logical qubits acts on dyads as
/// `U(|s><s'|) = tr_m[U_s rho_m U_s'^dag] |s><s'|`; this struct holds the
/// two distinct block eigendecompositions and assembles that channel.
pub struct BlockEvolution<T: Scalar> {
    evals: [Vec<T>; 2],
    evecs: [DMatrix<Complex<T>>; 2],
    dim: usize,
}

impl<T: Scalar> BlockEvolution<T> {
    /// Eigendecomposes the two distinct mechanical blocks (`h_plus` for the
    /// even-ZZ logical states, `h_minus` for the odd ones).
    pub fn new(h_plus: DMatrix<Complex<T>>, h_minus: DMatrix<Complex<T>>) -> Result<Self> {
        let dim = h_plus.nrows();
        if h_plus.ncols() != dim || h_minus.nrows() != dim || h_minus.ncols() != dim {
            return Err(Error::validation("blocks must be square and equal-sized"));
        }
        let tol = cv::<T>(1e-12);
        for h in [&h_plus, &h_minus] {
            for i in 0..dim {
                for j in 0..=i {
                    let d = h[(i, j)] - h[(j, i)].conj();
                    if Float::max(Float::abs(d.re), Float::abs(d.im)) > tol {
                        return Err(Error::validation("block Hamiltonian is not Hermitian"));
                    }
                }
            }
        }
        let mut evals = [Vec::new(), Vec::new()];
        let mut evecs = [DMatrix::zeros(0, 0), DMatrix::zeros(0, 0)];
        for (slot, h) in [h_plus, h_minus].into_iter().enumerate() {
            let eigen = h.symmetric_eigen();
            evals[slot] = eigen.eigenvalues.iter().copied().collect();
            evecs[slot] = eigen.eigenvectors;
        }
        Ok(BlockEvolution { evals, evecs, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Precompute the time-independent overlap data for one mechanical
    /// state; sweeping a time grid then costs `O(dim^2)` per point.
    pub fn prepare(&self, rho_m: &DMatrix<Complex<T>>) -> Result<PreparedEvolution<T>> {
        if rho_m.nrows() != self.dim || rho_m.ncols() != self.dim {
            return Err(Error::validation("mechanical state dimension mismatch"));
        }
        // W^{bb'}_{mn} = (V_b^dag rho V_b')_{mn} (V_b'^dag V_b)_{nm}, so that
        // tr[U_b rho U_b'^dag] = sum_mn W_mn e^{-i (e^b_m - e^b'_n) t}.
        let mut tables = Vec::with_capacity(4);
        for b in 0..2 {
            for bp in 0..2 {
                let a = self.evecs[b].adjoint() * rho_m * &self.evecs[bp];
                let g = self.evecs[bp].adjoint() * &self.evecs[b];
                let w = DMatrix::from_fn(self.dim, self.dim, |m, n| a[(m, n)] * g[(n, m)]);
                tables.push(w);
            }
        }
        Ok(PreparedEvolution {
            evals: self.evals.clone(),
            tables,
            dim: self.dim,
        })
    }

    /// The reduced two-qubit channel after a time `t`, starting from the
    /// mechanical state `rho_m`.
    pub fn channel(&self, rho_m: &DMatrix<Complex<T>>, t: GateTime<T>) -> Result<TwoQubitChannel<T>> {
        self.prepare(rho_m)?.channel(t)
    }

    /// Fidelity against `exp(-i pi/4 ZZ)` through the assembled channel.
    pub fn fidelity(&self, rho_m: &DMatrix<Complex<T>>, t: GateTime<T>) -> Result<T> {
        let channel = self.channel(rho_m, t)?;
        Ok(choi_fidelity(&channel, T::pi() / cv::<T>(4.0)))
    }
}

/// Block evolution specialized to one mechanical state.
pub struct PreparedEvolution<T: Scalar> {
    evals: [Vec<T>; 2],
    /// Overlap tables indexed by `2 b + b'`.
    tables: Vec<DMatrix<Complex<T>>>,
    dim: usize,
}

impl<T: Scalar> PreparedEvolution<T> {
    fn overlap(&self, b: usize, bp: usize, t: T) -> Complex<T> {
        let w = &self.tables[2 * b + bp];
        let mut acc = Complex::new(T::zero(), T::zero());
        for m in 0..self.dim {
            for n in 0..self.dim {
                let phase = -(self.evals[b][m] - self.evals[bp][n]) * t;
                acc += complex_phase(phase) * w[(m, n)];
            }
        }
        acc
    }

    /// The reduced two-qubit channel after a time `t`.
    pub fn channel(&self, t: GateTime<T>) -> Result<TwoQubitChannel<T>> {
        // c[n][m] = tr[U_{b(n)} rho U_{b(m)}^dag]; block index 0 for even ZZ
        // parity, 1 for odd.
        let block = |n: usize| -> usize {
            if zz_sign::<T>(n) == T::one() {
                0
            } else {
                1
            }
        };
        let mut cached: [[Option<Complex<T>>; 2]; 2] = [[None, None], [None, None]];
        let mut choi = DMatrix::<Complex<T>>::zeros(16, 16);
        for n in 0..4 {
            for m in 0..4 {
                let (b, bp) = (block(n), block(m));
                let c = *cached[b][bp].get_or_insert_with(|| self.overlap(b, bp, t.get()));
                choi[(n * 4 + n, m * 4 + m)] = c;
            }
        }
        TwoQubitChannel::new(choi)
    }

    /// Fidelity against `exp(-i pi/4 ZZ)`.
    pub fn fidelity(&self, t: GateTime<T>) -> Result<T> {
        Ok(choi_fidelity(&self.channel(t)?, T::pi() / cv::<T>(4.0)))
    }
}

/// One timed X flip on a qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipEvent<T: Scalar> {
    pub qubit: usize,
    pub time: T,
}

/// Piecewise-constant flip schedule realizing fractional logical weights.
///
/// Qubit `i` gets a single flip at `tau (1 + v_i)/2` and a frame-restoring
/// flip at `tau`, so its coupling sign is `+1` for a fraction `(1+v_i)/2`
/// of the window and `-1` for the rest; the time-averaged effective weight
/// is exactly `v_i`.
pub fn fractional_flip_schedule<T: Scalar>(
    v: &crate::geometry::LogicalVector<T>,
    tau: T,
) -> Result<Vec<FlipEvent<T>>> {
    if !(Float::is_finite(tau) && tau > T::zero()) {
        return Err(Error::validation("tau must be finite and > 0"));
    }
    let half = cv::<T>(0.5);
    let mut events = Vec::new();
    for (i, &vi) in v.entries().iter().enumerate() {
        let flip_at = tau * (T::one() + vi) * half;
        events.push(FlipEvent { qubit: i, time: flip_at });
        events.push(FlipEvent { qubit: i, time: tau });
    }
    events.sort_by(|a, b| {
        a.time
            .partial_cmp(&b.time)
            .expect("flip times are finite")
            .then(a.qubit.cmp(&b.qubit))
    });
    Ok(events)
}
