//! Qubit module geometry and the physical coupling law.
//!
//! Positions are dimensionless (each preset adopts its figure's length
//! convention, e.g. unit lattice spacing). A module is a list of positions;
//! a logical vector assigns each qubit a weight in `[-1, 1]`. The coupling
//! between two qubits at distance `d` is `J * d^(-gamma)`, and the coupling
//! between two encoded modules is the bilinear sum over all cross pairs.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{cv, Scalar};

/// Distance below which two positions are treated as coincident. Couplings
/// diverge there, so we refuse to evaluate rather than return infinities.
pub const COINCIDENCE_GUARD: f64 = 1e-12;

/// A point in 1-, 2- or 3-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialVector<T: Scalar> {
    coords: Vec<T>,
}

impl<T: Scalar> SpatialVector<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() || coords.len() > 3 {
            return Err(Error::validation(format!(
                "spatial vector must have 1-3 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !Float::is_finite(*c)) {
            return Err(Error::validation("spatial vector has non-finite coordinate"));
        }
        Ok(SpatialVector { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    /// Euclidean distance to another point of the same dimension.
    pub fn distance(&self, other: &Self) -> T {
        distance(&self.coords, &other.coords)
    }

    pub fn translated(&self, shift: &[T]) -> Self {
        SpatialVector {
            coords: self
                .coords
                .iter()
                .zip(shift)
                .map(|(c, s)| *c + *s)
                .collect(),
        }
    }
}

/// Distance between two coordinate slices. Slices must have equal length;
/// this is the allocation-free path used by quadrature kernels.
#[inline]
pub fn distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        let d = *x - *y;
        acc += d * d;
    }
    Float::sqrt(acc)
}

/// The physical two-body interaction `mu(r, q) = J * |r - q|^(-gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingLaw<T: Scalar> {
    j: T,
    gamma: u32,
}

impl<T: Scalar> CouplingLaw<T> {
    pub fn new(j: T, gamma: u32) -> Result<Self> {
        if !(Float::is_finite(j) && j > T::zero()) {
            return Err(Error::validation("coupling constant J must be finite and > 0"));
        }
        if gamma == 0 {
            return Err(Error::validation("decay exponent gamma must be >= 1"));
        }
        Ok(CouplingLaw { j, gamma })
    }

    pub fn j(&self) -> T {
        self.j
    }

    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    /// Coupling strength at a given separation. Errors on separations inside
    /// the coincidence guard.
    #[inline]
    pub fn at_distance(&self, d: T) -> Result<T> {
        if d < cv(COINCIDENCE_GUARD) {
            return Err(Error::domain(format!(
                "singular coupling: separation {:e} below coincidence guard",
                d.to_f64().unwrap_or(0.0)
            )));
        }
        Ok(self.j * Float::powi(d, -(self.gamma as i32)))
    }
}

/// Reference positions of the physical qubits of one module.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleLayout<T: Scalar> {
    positions: Vec<SpatialVector<T>>,
}

impl<T: Scalar> ModuleLayout<T> {
    pub fn new(positions: Vec<SpatialVector<T>>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::validation("module must contain at least one qubit"));
        }
        let dim = positions[0].dim();
        if positions.iter().any(|p| p.dim() != dim) {
            return Err(Error::validation("all module positions must share one dimension"));
        }
        for i in 0..positions.len() {
            for j in (i + 1)..positions.len() {
                if positions[i].distance(&positions[j]) < cv(COINCIDENCE_GUARD) {
                    return Err(Error::validation(format!(
                        "module positions {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(ModuleLayout { positions })
    }

    /// Builds a 1D chain along the x axis embedded in 2D: qubit `i` sits at
    /// `(i * dx, y)` for `i = 0..n-1`.
    pub fn chain(n: usize, dx: T, y: T) -> Result<Self> {
        let positions = (0..n)
            .map(|i| SpatialVector::new(vec![cv::<T>(i as f64) * dx, y]))
            .collect::<Result<Vec<_>>>()?;
        ModuleLayout::new(positions)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.positions[0].dim()
    }

    pub fn positions(&self) -> &[SpatialVector<T>] {
        &self.positions
    }

    pub fn translated(&self, shift: &[T]) -> Self {
        ModuleLayout {
            positions: self.positions.iter().map(|p| p.translated(shift)).collect(),
        }
    }
}

/// Weights in `[-1, 1]` selecting the logical subspace of a module.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalVector<T: Scalar> {
    entries: Vec<T>,
}

impl<T: Scalar> LogicalVector<T> {
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::validation("logical vector must be non-empty"));
        }
        for (i, e) in entries.iter().enumerate() {
            if !Float::is_finite(*e) || Float::abs(*e) > T::one() {
                return Err(Error::validation(format!(
                    "logical vector entry {i} outside [-1, 1]"
                )));
            }
        }
        Ok(LogicalVector { entries })
    }

    /// The trivial encoding `(1, ..., 1)`.
    pub fn trivial(n: usize) -> Self {
        LogicalVector {
            entries: vec![T::one(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// L1 norm, used by the optimizer's deterministic tie-break.
    pub fn l1_norm(&self) -> T {
        self.entries.iter().map(|e| Float::abs(*e)).sum()
    }

    /// Entry-wise scaling by `c in (0, 1]`; stays inside the box.
    pub fn scaled(&self, c: T) -> Result<Self> {
        if !(c > T::zero() && c <= T::one()) {
            return Err(Error::validation("scale factor must lie in (0, 1]"));
        }
        Ok(LogicalVector {
            entries: self.entries.iter().map(|e| *e * c).collect(),
        })
    }

    pub fn negated(&self) -> Self {
        LogicalVector {
            entries: self.entries.iter().map(|e| -*e).collect(),
        }
    }
}

/// Two modules with their logical encodings and the coupling law.
#[derive(Debug, Clone)]
pub struct ModulePair<T: Scalar> {
    pub module_a: ModuleLayout<T>,
    pub module_b: ModuleLayout<T>,
    pub a: LogicalVector<T>,
    pub b: LogicalVector<T>,
    pub law: CouplingLaw<T>,
}

impl<T: Scalar> ModulePair<T> {
    pub fn new(
        module_a: ModuleLayout<T>,
        module_b: ModuleLayout<T>,
        a: LogicalVector<T>,
        b: LogicalVector<T>,
        law: CouplingLaw<T>,
    ) -> Result<Self> {
        if a.len() != module_a.len() {
            return Err(Error::validation(format!(
                "logical vector a has {} entries for a {}-qubit module",
                a.len(),
                module_a.len()
            )));
        }
        if b.len() != module_b.len() {
            return Err(Error::validation(format!(
                "logical vector b has {} entries for a {}-qubit module",
                b.len(),
                module_b.len()
            )));
        }
        Ok(ModulePair {
            module_a,
            module_b,
            a,
            b,
            law,
        })
    }
}

/// `mu(r, q) = J * |r - q|^(-gamma)` for two qubit positions.
pub fn pairwise_coupling<T: Scalar>(
    law: &CouplingLaw<T>,
    r: &SpatialVector<T>,
    q: &SpatialVector<T>,
) -> Result<T> {
    law.at_distance(r.distance(q))
}

/// Logical coupling strength between the two encoded modules at explicit
/// positions: `sum_ij a_i b_j mu(r_i, q_j)`.
pub fn logical_coupling<T: Scalar>(
    pair: &ModulePair<T>,
    pos_a: &[SpatialVector<T>],
    pos_b: &[SpatialVector<T>],
) -> Result<T> {
    if pos_a.len() != pair.a.len() || pos_b.len() != pair.b.len() {
        return Err(Error::validation("position lists must match module sizes"));
    }
    let mut total = T::zero();
    for (ai, r) in pair.a.entries().iter().zip(pos_a) {
        for (bj, q) in pair.b.entries().iter().zip(pos_b) {
            total += *ai * *bj * pairwise_coupling(&pair.law, r, q)?;
        }
    }
    Ok(total)
}

/// Coupling of the two modules at their reference positions.
pub fn logical_coupling_reference<T: Scalar>(pair: &ModulePair<T>) -> Result<T> {
    logical_coupling(pair, pair.module_a.positions(), pair.module_b.positions())
}

/// Intra-module phase `f(v) = sum_{i<j} v_i v_j mu(r_i, r_j)`.
///
/// Classically this is a global phase on the logical subspace; it only
/// matters on the quantized path where the same sum becomes an operator on
/// mechanical states.
pub fn self_phase<T: Scalar>(
    module: &ModuleLayout<T>,
    v: &LogicalVector<T>,
    law: &CouplingLaw<T>,
) -> Result<T> {
    if v.len() != module.len() {
        return Err(Error::validation("logical vector must match module size"));
    }
    let pos = module.positions();
    let mut total = T::zero();
    for i in 0..pos.len() {
        for j in (i + 1)..pos.len() {
            total += v.entries()[i] * v.entries()[j] * pairwise_coupling(law, &pos[i], &pos[j])?;
        }
    }
    Ok(total)
}
