//! Assisted cloning versus generation from the ancilla alone.
//!
//! For signal states `psi_i` without orthogonal pairs and ancillas `rho_i`, a
//! physical map `psi_i (x) rho_i -> psi_i psi_i` exists exactly when a map
//! `rho_i -> psi_i` exists. Both reduce to one Gram criterion: split every
//! `rho_i` into pure components `alpha_k^(i)` and form
//!
//! ```text
//! H[(i,k)][(j,l)] = <alpha_k^(i)|alpha_l^(j)> / <psi_i|psi_j>
//! ```
//!
//! The transformation exists iff `H` is positive semidefinite; `H` is then the
//! Gram matrix of the environment states left behind.
//!
//! [`cloning_feasible`] evaluates the `n`-copy cloning criterion from the
//! joint input and output Gram entries without cancelling the common factor,
//! so agreement with [`generation_feasible`] is checked rather than assumed.

use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{self, hermitian_deviation, hermitian_eigen, CMatrix, CVector};
use crate::statekit::{
    self, gram, psd_check, realize_from_gram, require_min_overlap, Equivalence, GramMatrix,
    StateSet, StateVector, UnitaryMap,
};
use crate::{Error, Result, Tolerances};

/// Indexed family of density matrices on a common space.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStateSet {
    dim: usize,
    labels: Vec<String>,
    rhos: Vec<CMatrix>,
}

impl MixedStateSet {
    pub fn new(labels: Vec<String>, rhos: Vec<CMatrix>, tol: &Tolerances) -> Result<Self> {
        let first = rhos.first().ok_or(Error::Empty("ancilla set"))?;
        if labels.len() != rhos.len() {
            return Err(Error::CardinalityMismatch {
                left: labels.len(),
                right: rhos.len(),
            });
        }
        let dim = linalg::ensure_square(first)?;
        for rho in &rhos {
            let d = linalg::ensure_square(rho)?;
            if d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: d,
                });
            }
            validate_density(rho, tol)?;
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::DuplicateLabel(dup.clone()));
        }
        Ok(Self { dim, labels, rhos })
    }

    /// Projectors onto the given pure states.
    pub fn from_pure(states: &StateSet) -> Self {
        Self {
            dim: states.dim(),
            labels: states.labels().to_vec(),
            rhos: states.states().iter().map(StateVector::projector).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rhos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhos.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rhos(&self) -> &[CMatrix] {
        &self.rhos
    }

    pub fn rho(&self, i: usize) -> &CMatrix {
        &self.rhos[i]
    }

    /// Eigenvectors of each `rho_i` whose eigenvalue exceeds `tol.mix` times
    /// the largest eigenvalue of that `rho_i`.
    pub fn pure_components(&self, tol: &Tolerances) -> Vec<Vec<CVector>> {
        self.rhos
            .iter()
            .map(|rho| {
                let eig = hermitian_eigen(rho);
                let cutoff = tol.mix * eig.max();
                (0..eig.values.len())
                    .rev()
                    .filter(|&k| eig.values[k] > cutoff)
                    .map(|k| eig.vectors.column(k).into_owned())
                    .collect()
            })
            .collect()
    }
}

/// Hermitian, PSD and unit-trace checks for a density matrix.
pub fn validate_density(rho: &CMatrix, tol: &Tolerances) -> Result<()> {
    let deviation = hermitian_deviation(rho);
    if deviation > tol.herm {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = linalg::trace(rho).re;
    if (trace - 1.0).abs() > tol.norm {
        return Err(Error::NotUnitTrace { trace });
    }
    let (psd, min_eigenvalue) = psd_check(rho, tol.psd, tol.herm)?;
    if !psd {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    Ok(())
}

/// Verdict of a feasibility criterion together with its witness data.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub min_eigenvalue: f64,
    #[serde(with = "crate::io::complex_matrix")]
    pub h_matrix: CMatrix,
    /// Gram matrix of the environment states when feasible.
    pub witness_gram: Option<GramMatrix>,
    /// `(state index, component index)` for each row of `h_matrix`.
    pub rows: Vec<(usize, usize)>,
}

struct Criterion {
    signal_gram: CMatrix,
    components: Vec<CVector>,
    rows: Vec<(usize, usize)>,
}

fn prepare(psi: &StateSet, ancilla: &MixedStateSet, tol: &Tolerances) -> Result<Criterion> {
    if psi.len() != ancilla.len() {
        return Err(Error::CardinalityMismatch {
            left: psi.len(),
            right: ancilla.len(),
        });
    }
    if psi.labels() != ancilla.labels() {
        let at = psi
            .labels()
            .iter()
            .zip(ancilla.labels())
            .position(|(a, b)| a != b)
            .unwrap_or(0);
        return Err(Error::LabelMismatch(format!(
            "signal `{}` is paired with ancilla `{}`",
            psi.label(at),
            ancilla.labels()[at]
        )));
    }
    require_min_overlap(psi, tol.min_overlap)?;

    let mut components = Vec::new();
    let mut rows = Vec::new();
    for (i, comps) in ancilla.pure_components(tol).into_iter().enumerate() {
        for (k, v) in comps.into_iter().enumerate() {
            rows.push((i, k));
            components.push(v);
        }
    }
    Ok(Criterion {
        signal_gram: gram(psi).into_entries(),
        components,
        rows,
    })
}

fn judge(h: CMatrix, rows: Vec<(usize, usize)>, tol: &Tolerances) -> Result<FeasibilityReport> {
    // Entries scale like 1 / min overlap, and so does their rounding error.
    let scale = h.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
    let (feasible, min_eigenvalue) = psd_check(&h, tol.psd, tol.herm * scale)?;
    let h = linalg::hermitian_part(&h);
    let witness_gram = feasible.then(|| GramMatrix::new_unchecked(h.clone()));
    Ok(FeasibilityReport {
        feasible,
        min_eigenvalue,
        h_matrix: h,
        witness_gram,
        rows,
    })
}

/// Decides whether some physical operation maps every `rho_i` to `psi_i`.
pub fn generation_feasible(
    psi: &StateSet,
    ancilla: &MixedStateSet,
    tol: &Tolerances,
) -> Result<FeasibilityReport> {
    let Criterion {
        signal_gram,
        components,
        rows,
    } = prepare(psi, ancilla, tol)?;
    let m = rows.len();
    let h = CMatrix::from_fn(m, m, |a, b| {
        let (i, _) = rows[a];
        let (j, _) = rows[b];
        components[a].dotc(&components[b]) / signal_gram[(i, j)]
    });
    judge(h, rows, tol)
}

/// Decides whether `psi_i^(x)n (x) rho_i -> psi_i^(x)(n+1)` is physical.
///
/// Entries are formed as the joint input inner product
/// `<psi_i|psi_j>^n <alpha|alpha'>` divided by the joint output inner
/// product `<psi_i|psi_j>^(n+1)`.
pub fn cloning_feasible(
    psi: &StateSet,
    ancilla: &MixedStateSet,
    copies: usize,
    tol: &Tolerances,
) -> Result<FeasibilityReport> {
    if copies == 0 {
        return Err(Error::OutOfRange {
            name: "copies",
            value: 0.0,
            expected: "at least 1",
        });
    }
    let Criterion {
        signal_gram,
        components,
        rows,
    } = prepare(psi, ancilla, tol)?;
    let exponent = i32::try_from(copies).map_err(|_| Error::OverlapUnderflow { copies })?;
    let floor = tol.min_overlap.powi(exponent.saturating_add(1));

    let n = psi.len();
    let mut input_power = CMatrix::zeros(n, n);
    let mut output_power = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let g = signal_gram[(i, j)];
            let out = g.powi(exponent + 1);
            let modulus = out.norm();
            if floor == 0.0 || !modulus.is_normal() || modulus < floor {
                return Err(Error::OverlapUnderflow { copies });
            }
            input_power[(i, j)] = g.powi(exponent);
            output_power[(i, j)] = out;
        }
    }
    let m = rows.len();
    let h = CMatrix::from_fn(m, m, |a, b| {
        let (i, _) = rows[a];
        let (j, _) = rows[b];
        let joint_in: Complex64 = input_power[(i, j)] * components[a].dotc(&components[b]);
        joint_in / output_power[(i, j)]
    });
    judge(h, rows, tol)
}

/// Register sizes of a constructed cloner.
///
/// The unitary acts on `system (x) system (x) ancilla (x) environment`, with the
/// blank clone register and the environment both starting in `|0>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClonerLayout {
    pub system: usize,
    pub ancilla: usize,
    pub environment: usize,
}

impl ClonerLayout {
    pub fn total(&self) -> usize {
        self.system * self.system * self.ancilla * self.environment
    }
}

#[derive(Debug, Clone)]
pub struct Cloner {
    pub unitary: UnitaryMap,
    pub layout: ClonerLayout,
    /// Final states `C_i` of the ancilla and environment registers.
    pub environment: StateSet,
    /// `<psi_i psi_i| tr_env(U input_i) |psi_i psi_i>` for every `i`.
    pub fidelities: Vec<f64>,
}

/// Builds a unitary `|psi_i>|0>|alpha_i>|0> -> |psi_i>|psi_i>|C_i>` from pure
/// ancillas, refusing with the feasibility report when none exists.
pub fn construct_cloner(psi: &StateSet, ancilla: &StateSet, tol: &Tolerances) -> Result<Cloner> {
    let report = generation_feasible(psi, &MixedStateSet::from_pure(ancilla), tol)?;
    if !report.feasible {
        return Err(Error::Infeasible(Box::new(report)));
    }
    let n = psi.len();
    let witness = CMatrix::from_fn(n, n, |i, j| {
        ancilla.state(i).inner(ancilla.state(j)) / psi.state(i).inner(psi.state(j))
    });
    let witness = GramMatrix::new_unchecked(linalg::hermitian_part(&witness));
    let env_states = realize_from_gram(&witness, tol)?;

    let d = psi.dim();
    let da = ancilla.dim();
    let de = env_states.dim().div_ceil(da).max(1);
    let layout = ClonerLayout {
        system: d,
        ancilla: da,
        environment: de,
    };
    let blank = StateVector::basis(d, 0);
    let env_init = StateVector::basis(de, 0);
    let out_dim = da * de;

    let mut inputs = Vec::with_capacity(psi.len());
    let mut outputs = Vec::with_capacity(psi.len());
    let mut environment = Vec::with_capacity(psi.len());
    for i in 0..psi.len() {
        let s = psi.state(i);
        inputs.push(s.tensor(&blank).tensor(ancilla.state(i)).tensor(&env_init));
        let c_i = env_states.state(i).padded(out_dim);
        outputs.push(s.tensor(s).tensor(&c_i));
        environment.push(c_i);
    }
    let inputs = StateSet::new(psi.labels().to_vec(), inputs)?;
    let outputs = StateSet::new(psi.labels().to_vec(), outputs)?;
    let unitary = match statekit::unitary_equivalence(&inputs, &outputs, tol.gram, tol)? {
        Equivalence::Unitary(u) => u,
        Equivalence::Infeasible { max_gram_deviation } => {
            return Err(Error::GramMismatch {
                max_deviation: max_gram_deviation,
            })
        }
    };

    let fidelities = (0..psi.len())
        .map(|i| {
            let out = unitary.apply(inputs.state(i).amplitudes());
            let (rho_clones, _) = linalg::reduced_states(&out, d * d, out_dim);
            let target = psi.state(i).tensor(psi.state(i));
            let t = target.amplitudes();
            t.dotc(&(&rho_clones * t)).re
        })
        .collect::<Vec<_>>();
    let worst = fidelities.iter().fold(1.0_f64, |acc, f| acc.min(*f));
    if worst < 1.0 - tol.map {
        return Err(Error::Verification {
            what: "cloner",
            residual: 1.0 - worst,
        });
    }
    Ok(Cloner {
        unitary,
        layout,
        environment: StateSet::new(psi.labels().to_vec(), environment)?,
        fidelities,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassicalAncillaReport {
    pub commuting: bool,
    pub feasible: bool,
    pub supports_orthogonal: bool,
}

/// Checks whether classical (mutually commuting) ancillas that allow
/// generation must carry the full label identity, i.e. have pairwise
/// orthogonal supports wherever the signal states differ.
pub fn classical_ancilla_check(
    psi: &StateSet,
    ancilla: &MixedStateSet,
    tol: &Tolerances,
) -> Result<ClassicalAncillaReport> {
    let feasible = generation_feasible(psi, ancilla, tol)?.feasible;
    let n = ancilla.len();
    let pairs = || (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));

    let commuting = pairs().all(|(i, j)| {
        let (a, b) = (ancilla.rho(i), ancilla.rho(j));
        let commutator = a * b - b * a;
        commutator.iter().all(|z| z.norm() <= tol.commute)
    });

    let components = ancilla.pure_components(tol);
    let supports_orthogonal = pairs()
        .filter(|&(i, j)| 1.0 - psi.state(i).fidelity(psi.state(j)) > tol.gram)
        .all(|(i, j)| {
            components[i]
                .iter()
                .all(|u| components[j].iter().all(|v| u.dotc(v).norm() <= tol.commute))
        });

    Ok(ClassicalAncillaReport {
        commuting,
        feasible,
        supports_orthogonal,
    })
}
