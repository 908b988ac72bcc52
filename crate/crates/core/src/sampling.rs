//! Seeded random states, unitaries and density matrices.
//!
//! Every generator takes the RNG explicitly; [`stream`] derives independent,
//! reproducible per-instance streams from one base seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rand::SeedableRng;

use crate::linalg::{c, CMatrix, CVector};
use crate::statekit::{StateVector, UnitaryMap};

/// Independent generator number `index` for the run seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Gaussian matrix with independent standard normal parts.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(gaussian(rng), gaussian(rng)))
}

/// Haar-distributed pure state.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        let v = CVector::from_fn(dim, |_, _| c(gaussian(rng), gaussian(rng)));
        if v.norm() > 1e-6 {
            return StateVector::normalized(v).expect("non-zero vector");
        }
    }
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> UnitaryMap {
    let qr = ginibre(rng, dim, dim).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMap::new(q, 1e-9).expect("QR factor is unitary")
}

/// Random density matrix of the given rank with a random spectrum.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> CMatrix {
    assert!(rank >= 1 && rank <= dim);
    let frame = haar_unitary(rng, dim).into_matrix();
    let mut weights: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut rho = CMatrix::zeros(dim, dim);
    for (k, w) in weights.iter().enumerate() {
        let v = frame.column(k);
        rho += (v * v.adjoint()) * c(*w, 0.0);
    }
    rho
}
