//! Oracles and instance generators shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use qperm::cloning::MixedStateSet;
use qperm::linalg::{c, CMatrix, CVector};
use qperm::sampling::{self, haar_state, haar_unitary, random_density};
use qperm::statekit::{StateSet, StateVector};
use qperm::Tolerances;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Eigenvalues of a complex Hermitian matrix through its real symmetric
/// embedding `[[A, -B], [B, A]]`, which doubles every eigenvalue.
pub fn embedded_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let real = DMatrix::from_fn(2 * d, 2 * d, |r, col| {
        let z = m[(r % d, col % d)];
        match (r < d, col < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut values: Vec<f64> = SymmetricEigen::new(real).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Entropy in bits of `sum_i p_i |s_i><s_i|` from the embedded spectrum.
pub fn dense_entropy(states: &[StateVector], probs: &[f64]) -> f64 {
    let d = states[0].dim();
    let mut rho = CMatrix::zeros(d, d);
    for (s, p) in states.iter().zip(probs) {
        let a = s.amplitudes();
        rho += a * a.adjoint() * c(*p, 0.0);
    }
    embedded_eigenvalues(&rho)
        .into_iter()
        .filter(|l| *l > 1e-14)
        .map(|l| -l * l.log2())
        .sum()
}

/// Sum of the `kept` largest eigenvalues of `rho^(x)n`, by sorting all `2^n`
/// products (ties go to fewer minor factors).
pub fn brute_force_weight(lambda: f64, n: usize, kept: usize) -> f64 {
    let mut values: Vec<(f64, u32)> = (0..1u64 << n)
        .map(|x| {
            let k = x.count_ones();
            let v = (0..n).fold(1.0, |acc, bit| {
                acc * if x >> bit & 1 == 1 { 1.0 - lambda } else { lambda }
            });
            (v, k)
        })
        .collect();
    values.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    values.iter().take(kept).map(|(v, _)| v).sum()
}

fn kron_all(factors: &[DVector<f64>]) -> DVector<f64> {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

/// Dense simulation of block compression for the equiprobable source
/// `{|0>, g|0> + sqrt(1-g^2)|1>}`: builds the explicit `2^n x 2^n`
/// projector and returns `(retained weight, mean squared projection weight)`.
pub fn dense_schumacher(g: f64, n: usize, kept: usize) -> (f64, f64) {
    let half = g.acos() / 2.0;
    let major = DVector::from_vec(vec![half.cos(), half.sin()]);
    let minor = DVector::from_vec(vec![-half.sin(), half.cos()]);
    let (l_major, l_minor) = ((1.0 + g) / 2.0, (1.0 - g) / 2.0);

    let dim = 1usize << n;
    let mut order: Vec<(usize, f64, u32)> = (0..dim)
        .map(|x| {
            let k = (x as u64).count_ones();
            (x, l_major.powi(n as i32 - k as i32) * l_minor.powi(k as i32), k)
        })
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.2.cmp(&b.2)).then(a.0.cmp(&b.0)));

    let mut kept_vectors = DMatrix::zeros(dim, kept);
    for (col, &(x, _, _)) in order.iter().take(kept).enumerate() {
        let factors: Vec<_> = (0..n)
            .map(|pos| if x >> (n - 1 - pos) & 1 == 1 { minor.clone() } else { major.clone() })
            .collect();
        kept_vectors.set_column(col, &kron_all(&factors));
    }
    let projector = &kept_vectors * kept_vectors.transpose();

    let s0 = DVector::from_vec(vec![1.0, 0.0]);
    let s1 = DVector::from_vec(vec![g, (1.0 - g * g).sqrt()]);
    let rho = (&s0 * s0.transpose() + &s1 * s1.transpose()) * 0.5;
    let rho_n = (1..n).fold(rho.clone(), |acc, _| acc.kronecker(&rho));
    let weight = rho_n.component_mul(&projector).sum();

    let mut avg = 0.0;
    for signal in 0..dim {
        let factors: Vec<_> = (0..n)
            .map(|pos| if signal >> pos & 1 == 1 { s1.clone() } else { s0.clone() })
            .collect();
        let psi = kron_all(&factors);
        let w = psi.dot(&(&projector * &psi));
        avg += w * w;
    }
    (weight, avg / dim as f64)
}

/// Haar-random states with every pairwise overlap modulus at least `min`.
pub fn non_orthogonal_set(rng: &mut ChaCha8Rng, count: usize, dim: usize, min: f64) -> StateSet {
    loop {
        let states: Vec<_> = (0..count).map(|_| haar_state(rng, dim)).collect();
        let ok = (0..count).all(|i| (i + 1..count).all(|j| states[i].inner(&states[j]).norm() >= min));
        if ok {
            return StateSet::from_states(states).unwrap();
        }
    }
}

/// A state at overlap modulus exactly `g` from `s`, with a random phase.
pub fn state_at_overlap(rng: &mut ChaCha8Rng, s: &StateVector, g: f64) -> StateVector {
    let d = s.dim();
    let a = s.amplitudes();
    let r = haar_state(rng, d).into_amplitudes();
    let perp = &r - a * a.dotc(&r);
    let perp = &perp / c(perp.norm(), 0.0);
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let v = (a * c(g, 0.0) + perp * c((1.0 - g * g).sqrt(), 0.0)) * c(phase.cos(), phase.sin());
    StateVector::normalized(v).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AncillaKind {
    RandomPure,
    Orthonormal,
    ConstructedPure,
    ConstructedMixed,
    RandomMixed,
}

pub struct Instance {
    pub kind: AncillaKind,
    pub psi: StateSet,
    pub ancilla: MixedStateSet,
    /// The ancillas as pure states when every one is pure.
    pub pure: Option<StateSet>,
}

const KINDS: [AncillaKind; 5] = [
    AncillaKind::RandomPure,
    AncillaKind::Orthonormal,
    AncillaKind::ConstructedPure,
    AncillaKind::ConstructedMixed,
    AncillaKind::RandomMixed,
];

/// Instance number `index` of the sweep seeded with `seed`: 2 to 5 signal
/// states of dimension 2 to 6 with overlaps at least `1e-3`, and ancillas of
/// one of five kinds. Constructed ancillas `V (psi_i (x) c_i)` always admit
/// generation.
pub fn sweep_instance(seed: u64, index: u64) -> Instance {
    let mut rng = sampling::stream(seed, index);
    let kind = KINDS[(index % KINDS.len() as u64) as usize];
    let count = rng.gen_range(2..=5);
    let d = rng.gen_range(2..=6);
    let psi = non_orthogonal_set(&mut rng, count, d, 1e-3);
    let tol = Tolerances::default();
    let labels = psi.labels().to_vec();

    let pure_set = |states: Vec<StateVector>| StateSet::new(labels.clone(), states).unwrap();
    let (ancilla, pure) = match kind {
        AncillaKind::RandomPure => {
            let da = rng.gen_range(2..=6);
            let set = pure_set((0..count).map(|_| haar_state(&mut rng, da)).collect());
            (MixedStateSet::from_pure(&set), Some(set))
        }
        AncillaKind::Orthonormal => {
            let u = haar_unitary(&mut rng, count.max(2));
            let set = pure_set(
                (0..count)
                    .map(|i| StateVector::normalized(u.matrix().column(i).into_owned()).unwrap())
                    .collect(),
            );
            (MixedStateSet::from_pure(&set), Some(set))
        }
        AncillaKind::ConstructedPure => {
            let m = rng.gen_range(1..=(6 / d).max(1));
            let v = haar_unitary(&mut rng, d * m);
            let set = pure_set(
                psi.states()
                    .iter()
                    .map(|s| {
                        let extra = haar_state(&mut rng, m);
                        StateVector::normalized(v.apply(s.tensor(&extra).amplitudes())).unwrap()
                    })
                    .collect(),
            );
            (MixedStateSet::from_pure(&set), Some(set))
        }
        AncillaKind::ConstructedMixed => {
            let m = rng.gen_range(1..=(6 / d).max(1));
            let v = haar_unitary(&mut rng, d * m);
            let rhos = psi
                .states()
                .iter()
                .map(|s| {
                    let rank = rng.gen_range(1..=3);
                    let weights: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.1..1.0)).collect();
                    let total: f64 = weights.iter().sum();
                    let mut rho = CMatrix::zeros(d * m, d * m);
                    for w in weights {
                        let extra = haar_state(&mut rng, m);
                        let a: CVector = v.apply(s.tensor(&extra).amplitudes());
                        rho += &a * a.adjoint() * c(w / total, 0.0);
                    }
                    rho
                })
                .collect();
            (MixedStateSet::new(labels.clone(), rhos, &tol).unwrap(), None)
        }
        AncillaKind::RandomMixed => {
            let da = rng.gen_range(2..=6);
            let rhos = (0..count)
                .map(|_| {
                    let rank = rng.gen_range(1..=3.min(da));
                    random_density(&mut rng, da, rank)
                })
                .collect();
            (MixedStateSet::new(labels.clone(), rhos, &tol).unwrap(), None)
        }
    };
    Instance {
        kind,
        psi,
        ancilla,
        pure,
    }
}
