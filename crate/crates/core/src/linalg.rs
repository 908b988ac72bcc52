//! Dense complex linear algebra on top of `nalgebra`.
//!
//! Tensor products use row-major register ordering: for registers of
//! dimensions `(d1, d2)` the basis index of `|i>|j>` is `i * d2 + j`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, QR, SVD};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in ascending
/// order; column `k` of `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Largest eigenvalue modulus, i.e. the spectral norm.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// Symmetrizes before decomposing, so only the Hermitian part of `m` counts.
pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    if n == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let h = hermitian_part(m);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    HermitianEigen { values, vectors }
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Largest entrywise modulus of `m - m^dagger`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().fold(0.0_f64, |acc, s| acc.max(*s))
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let nb = b.len();
    CVector::from_fn(a.len() * nb, |i, _| a[i / nb] * b[i % nb])
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Reduced density matrices of a bipartite pure state `phi` on registers of
/// dimensions `(da, db)`: returns `(rho_a, rho_b)`.
pub fn reduced_states(phi: &CVector, da: usize, db: usize) -> (CMatrix, CMatrix) {
    debug_assert_eq!(phi.len(), da * db);
    let m = CMatrix::from_fn(da, db, |i, j| phi[i * db + j]);
    let rho_a = &m * m.adjoint();
    let rho_b = m.transpose() * m.map(|z| z.conj());
    (rho_a, rho_b)
}

/// Closest matrix with orthonormal columns (polar factor of a tall matrix).
pub fn nearest_isometry(m: &CMatrix) -> CMatrix {
    if m.ncols() == 0 {
        return m.clone();
    }
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    u * v_t
}

/// Orthonormal basis of the orthogonal complement of the column span of an
/// isometry `frame` (`d x r`, `r <= d`), returned as a `d x (d - r)` matrix.
///
/// The basis is the tail of the full Householder `Q` of `frame`, so it is a
/// deterministic function of the input.
pub fn orthogonal_complement(frame: &CMatrix) -> CMatrix {
    let (d, r) = frame.shape();
    debug_assert!(r <= d);
    if r == 0 {
        return CMatrix::identity(d, d);
    }
    if r == d {
        return CMatrix::zeros(d, 0);
    }
    let qr = QR::new(frame.clone());
    let mut q_adj = CMatrix::identity(d, d);
    qr.q_tr_mul(&mut q_adj);
    let q = q_adj.adjoint();
    q.columns(r, d - r).into_owned()
}

/// Embeds `v` into a larger space by zero padding.
pub fn pad(v: &CVector, dim: usize) -> CVector {
    debug_assert!(dim >= v.len());
    CVector::from_fn(dim, |i, _| if i < v.len() { v[i] } else { ZERO })
}
