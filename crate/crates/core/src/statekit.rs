//! Pure states, indexed state sets, Gram matrices and unitary equivalence.
//!
//! Two indexed families of pure states are related by a unitary exactly when
//! their Gram matrices agree. [`unitary_equivalence`] constructs that unitary
//! from a shared factorization of the Gram matrix, and [`realize_from_gram`]
//! builds a family with a prescribed Gram matrix.

use std::collections::HashSet;

use num_complex::Complex64;

use crate::linalg::{
    self, c, hermitian_deviation, hermitian_eigen, max_abs_diff, nearest_isometry,
    orthogonal_complement, CMatrix, CVector, ZERO,
};
use crate::{Error, Result, Tolerances};

/// Unit-norm vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: CVector,
}

impl StateVector {
    /// Validates the norm against the default tolerance.
    pub fn new(amps: CVector) -> Result<Self> {
        Self::with_tolerance(amps, Tolerances::default().norm)
    }

    pub fn with_tolerance(amps: CVector, norm_tol: f64) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Empty("state amplitudes"));
        }
        let norm = amps.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > norm_tol {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if amps.is_empty() || !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amps: amps.unscale(norm),
        })
    }

    pub fn from_complex(amps: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amps))
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(CVector::from_iterator(amps.len(), amps.iter().map(|&x| c(x, 0.0))))
    }

    /// Computational basis state `|index>` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut amps = CVector::zeros(dim);
        amps[index] = c(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            amps: linalg::kron_vec(&self.amps, &other.amps),
        }
    }

    pub fn padded(&self, dim: usize) -> StateVector {
        StateVector {
            amps: linalg::pad(&self.amps, dim),
        }
    }

    pub fn projector(&self) -> CMatrix {
        linalg::projector(&self.amps)
    }
}

/// Indexed family of pure states sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSet {
    dim: usize,
    labels: Vec<String>,
    states: Vec<StateVector>,
}

impl StateSet {
    pub fn new(labels: Vec<String>, states: Vec<StateVector>) -> Result<Self> {
        let first = states.first().ok_or(Error::Empty("state set"))?;
        if labels.len() != states.len() {
            return Err(Error::CardinalityMismatch {
                left: labels.len(),
                right: states.len(),
            });
        }
        let dim = first.dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::DuplicateLabel(dup.clone()));
        }
        Ok(Self { dim, labels, states })
    }

    /// Labels the states by their index.
    pub fn from_states(states: Vec<StateVector>) -> Result<Self> {
        let labels = (0..states.len()).map(|i| i.to_string()).collect();
        Self::new(labels, states)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &StateVector {
        &self.states[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// `dim x len` matrix whose columns are the states, zero padded to `dim`.
    pub fn column_matrix(&self, dim: usize) -> CMatrix {
        assert!(dim >= self.dim);
        CMatrix::from_fn(dim, self.len(), |r, col| {
            if r < self.dim {
                self.states[col].amps[r]
            } else {
                ZERO
            }
        })
    }

    pub fn padded(&self, dim: usize) -> StateSet {
        StateSet {
            dim,
            labels: self.labels.clone(),
            states: self.states.iter().map(|s| s.padded(dim)).collect(),
        }
    }

    /// Same states under new labels.
    pub fn relabeled(&self, labels: Vec<String>) -> Result<StateSet> {
        StateSet::new(labels, self.states.clone())
    }
}

/// Hermitian, unit-diagonal, positive semidefinite matrix of inner products.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: CMatrix,
}

impl GramMatrix {
    pub fn new(entries: CMatrix, tol: &Tolerances) -> Result<Self> {
        let n = linalg::ensure_square(&entries)?;
        if n == 0 {
            return Err(Error::Empty("Gram matrix"));
        }
        let deviation = hermitian_deviation(&entries);
        if deviation > tol.herm {
            return Err(Error::NotHermitian { deviation });
        }
        for i in 0..n {
            let d = entries[(i, i)];
            if (d.re - 1.0).abs() > tol.norm || d.im.abs() > tol.norm {
                return Err(Error::NotUnitDiagonal {
                    index: i,
                    value: d.re,
                });
            }
        }
        let (psd, min_eigenvalue) = psd_check(&entries, tol.psd, tol.herm)?;
        if !psd {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        Ok(Self { entries })
    }

    pub(crate) fn new_unchecked(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }
}

/// Square matrix with `U^dagger U = I` within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMap {
    matrix: CMatrix,
}

impl UnitaryMap {
    pub fn new(matrix: CMatrix, unit_tol: f64) -> Result<Self> {
        let d = linalg::ensure_square(&matrix)?;
        if d == 0 {
            return Err(Error::Empty("unitary"));
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation.is_nan() || deviation > unit_tol {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &UnitaryMap) -> UnitaryMap {
        UnitaryMap {
            matrix: &self.matrix * &first.matrix,
        }
    }
}

/// Spectral norm of `U^dagger U - I`.
///
/// The Frobenius norm bounds the spectral norm from above and is cheap, so the
/// eigensolver only runs when the bound is inconclusive.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let d = u.nrows();
    let defect = u.adjoint() * u - CMatrix::identity(d, d);
    let frob = defect.norm();
    if frob <= 1e-12 || !frob.is_finite() {
        return frob;
    }
    hermitian_eigen(&defect).spectral_norm()
}

/// `entries[i][j] = <psi_i|psi_j>`.
pub fn gram(set: &StateSet) -> GramMatrix {
    let m = set.column_matrix(set.dim());
    GramMatrix::new_unchecked(m.adjoint() * m)
}

/// Builds a state set whose Gram matrix is `g`.
///
/// The dimension of the result is the numerical rank of `g`: eigenvalues at
/// or below `tol.psd` times the spectral norm are dropped.
pub fn realize_from_gram(g: &GramMatrix, tol: &Tolerances) -> Result<StateSet> {
    let eig = hermitian_eigen(g.entries());
    let scale = eig.spectral_norm();
    let floor = tol.psd * scale;
    if eig.min() < -floor {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    let kept: Vec<usize> = (0..eig.values.len())
        .rev()
        .filter(|&k| eig.values[k] > floor)
        .collect();
    let rank = kept.len().max(1);
    let n = g.len();
    let states = (0..n)
        .map(|i| {
            let amps = CVector::from_fn(rank, |r, _| match kept.get(r) {
                Some(&k) => eig.vectors[(i, k)].conj() * eig.values[k].sqrt(),
                None => ZERO,
            });
            StateVector::normalized(amps)
        })
        .collect::<Result<Vec<_>>>()?;
    StateSet::from_states(states)
}

/// Outcome of [`unitary_equivalence`].
#[derive(Debug, Clone)]
pub enum Equivalence {
    Unitary(UnitaryMap),
    Infeasible { max_gram_deviation: f64 },
}

impl Equivalence {
    pub fn unitary(self) -> Option<UnitaryMap> {
        match self {
            Equivalence::Unitary(u) => Some(u),
            Equivalence::Infeasible { .. } => None,
        }
    }
}

/// Finds `U` with `U a_i = b_i` for every `i`, or reports the largest Gram
/// deviation when the two sets are not unitarily related.
///
/// Both sets are embedded in a common space of dimension
/// `max(a.dim(), b.dim())`. Orthonormal frames for the two spans come from
/// the same coefficient matrix (the shared Gram eigenbasis), and the
/// orthogonal complements are matched by their Householder bases.
pub fn unitary_equivalence(
    a: &StateSet,
    b: &StateSet,
    gram_tol: f64,
    tol: &Tolerances,
) -> Result<Equivalence> {
    if a.len() != b.len() {
        return Err(Error::CardinalityMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let dim = a.dim().max(b.dim());
    let ma = a.column_matrix(dim);
    let mb = b.column_matrix(dim);
    let ga = ma.adjoint() * &ma;
    let gb = mb.adjoint() * &mb;
    let deviation = max_abs_diff(&ga, &gb);
    if deviation > gram_tol {
        return Ok(Equivalence::Infeasible {
            max_gram_deviation: deviation,
        });
    }

    let shared = (&ga + &gb) * c(0.5, 0.0);
    let eig = hermitian_eigen(&shared);
    // Directions with eigenvalue near the Gram mismatch cannot be matched
    // reliably; anything below that level is left to the complement map.
    let floor = (10.0 * deviation).max(1e-13) * eig.spectral_norm();
    let kept: Vec<usize> = (0..eig.values.len())
        .rev()
        .filter(|&k| eig.values[k] > floor)
        .collect();
    let coeffs = CMatrix::from_fn(a.len(), kept.len(), |i, r| {
        let k = kept[r];
        eig.vectors[(i, k)] / eig.values[k].sqrt()
    });
    let frame_a = nearest_isometry(&(&ma * &coeffs));
    let frame_b = nearest_isometry(&(&mb * &coeffs));
    let comp_a = orthogonal_complement(&frame_a);
    let comp_b = orthogonal_complement(&frame_b);
    let u = &frame_b * frame_a.adjoint() + &comp_b * comp_a.adjoint();
    let unitary = UnitaryMap::new(u, tol.unit)?;

    let residual = (0..a.len())
        .map(|i| (unitary.apply(&ma.column(i).into_owned()) - mb.column(i)).norm())
        .fold(0.0_f64, f64::max);
    if residual > tol.map {
        return Err(Error::Verification {
            what: "unitary equivalence",
            residual,
        });
    }
    Ok(Equivalence::Unitary(unitary))
}

/// First pair `(i, j)` whose overlap modulus is below `delta`.
pub fn find_orthogonal_pair(set: &StateSet, delta: f64) -> Option<(usize, usize, f64)> {
    let n = set.len();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, set.state(i).inner(set.state(j)).norm()))
        .find(|&(_, _, modulus)| modulus < delta)
}

/// True iff every pairwise overlap modulus is at least `delta`.
pub fn check_min_overlap(set: &StateSet, delta: f64) -> bool {
    find_orthogonal_pair(set, delta).is_none()
}

/// Errors with [`Error::OrthogonalPair`] naming the first offending pair.
pub fn require_min_overlap(set: &StateSet, delta: f64) -> Result<()> {
    match find_orthogonal_pair(set, delta) {
        None => Ok(()),
        Some((i, j, modulus)) => Err(Error::OrthogonalPair {
            first: set.label(i).to_owned(),
            second: set.label(j).to_owned(),
            modulus,
            min_overlap: delta,
        }),
    }
}

/// Positive semidefiniteness test relative to the spectral norm.
///
/// Returns whether `min eigenvalue >= -tol * ||h||` together with the
/// minimum eigenvalue itself.
pub fn psd_check(h: &CMatrix, tol: f64, herm_tol: f64) -> Result<(bool, f64)> {
    linalg::ensure_square(h)?;
    let deviation = hermitian_deviation(h);
    if deviation > herm_tol {
        return Err(Error::NotHermitian { deviation });
    }
    let values = linalg::hermitian_eigenvalues(h);
    let min = values.first().copied().unwrap_or(0.0);
    let norm = values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    Ok((min >= -tol * norm, min))
}
