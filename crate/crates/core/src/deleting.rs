//! Deleting unitaries and the resurrection of deleted copies.
//!
//! A deleter acts on `(system 1, system 2, environment)` and sends
//! `|psi_i>|psi_i>|A> -> |psi_i>|0>|A_i>`. Unitarity forces the environment
//! records `{A_i}` to have the same Gram matrix as `{psi_i}`, so the deleted
//! copy can always be recovered from the environment alone.
//!
//! Registers are indexed row-major: basis state `|x1>|x2>|y>` has index
//! `(x1 * d + x2) * env_dim + y`.

use serde::Serialize;

use crate::io::StateSetFile;
use crate::linalg::{self, hermitian_eigen, max_abs_diff, CMatrix, CVector, ZERO};
use crate::statekit::{
    gram, require_min_overlap, unitary_equivalence, Equivalence, StateSet, StateVector,
    UnitaryMap,
};
use crate::{Error, Result, Tolerances};

/// Swaps register 2 with the first `d` levels of the environment, then
/// applies `v` (if given) to the environment.
///
/// Started from environment `|0>`, the blank `|0>` lands in register 2 and
/// the copy moves into the environment.
pub fn make_swap_deleter(
    dim: usize,
    env_dim: usize,
    v: Option<&CMatrix>,
    tol: &Tolerances,
) -> Result<UnitaryMap> {
    if dim == 0 {
        return Err(Error::Empty("system dimension"));
    }
    if env_dim < dim + 1 {
        return Err(Error::EnvironmentTooSmall { dim, env_dim });
    }
    let env_unitary = match v {
        Some(m) => {
            let u = UnitaryMap::new(m.clone(), tol.unit)?;
            if u.dim() != env_dim {
                return Err(Error::DimensionMismatch {
                    expected: env_dim,
                    found: u.dim(),
                });
            }
            u.into_matrix()
        }
        None => CMatrix::identity(env_dim, env_dim),
    };

    let total = dim * dim * env_dim;
    let mut u = CMatrix::zeros(total, total);
    for x1 in 0..dim {
        for x2 in 0..dim {
            for y in 0..env_dim {
                let col = (x1 * dim + x2) * env_dim + y;
                let (t2, ty) = if y < dim { (y, x2) } else { (x2, y) };
                let block = (x1 * dim + t2) * env_dim;
                for r in 0..env_dim {
                    u[(block + r, col)] = env_unitary[(r, ty)];
                }
            }
        }
    }
    UnitaryMap::new(u, tol.unit)
}

/// Per-state outcome of running a candidate deleter.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DeletionTrace {
    pub valid: bool,
    #[serde(serialize_with = "serialize_state_set")]
    pub environment_states: StateSet,
    /// `<psi_i 0| rho_12 |psi_i 0>`.
    pub residual_fidelity: Vec<f64>,
    /// `tr(rho_env^2)`.
    pub environment_purity: Vec<f64>,
}

fn serialize_state_set<S: serde::Serializer>(
    set: &StateSet,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    StateSetFile::from_state_set(set).serialize(s)
}

/// Applies `u` to `|psi_i>|psi_i>|env_init>` and inspects the result.
///
/// Environment states are the dominant eigenvectors of the reduced
/// environment states, with the phase taken from the partial overlap
/// `(<psi_i|<blank| (x) 1) U |psi_i psi_i env_init>` so that their Gram
/// matrix is meaningful.
pub fn is_valid_deleter(
    u: &UnitaryMap,
    psi: &StateSet,
    blank: &StateVector,
    env_init: &StateVector,
    tol: &Tolerances,
) -> Result<DeletionTrace> {
    let d = psi.dim();
    if blank.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: blank.dim(),
        });
    }
    let de = env_init.dim();
    if u.dim() != d * d * de {
        return Err(Error::DimensionMismatch {
            expected: d * d * de,
            found: u.dim(),
        });
    }

    let mut residual_fidelity = Vec::with_capacity(psi.len());
    let mut environment_purity = Vec::with_capacity(psi.len());
    let mut environment = Vec::with_capacity(psi.len());
    for s in psi.states() {
        let input = s.tensor(s).tensor(env_init);
        let out = u.apply(input.amplitudes());
        let (rho_sys, rho_env) = linalg::reduced_states(&out, d * d, de);
        let target = s.tensor(blank);
        let t = target.amplitudes();
        residual_fidelity.push(t.dotc(&(&rho_sys * t)).re);
        environment_purity.push(rho_env.iter().map(|z| z.norm_sqr()).sum());

        let eig = hermitian_eigen(&rho_env);
        let mut dominant = eig.vectors.column(de - 1).into_owned();
        let record = CVector::from_fn(de, |y, _| {
            (0..d * d).fold(ZERO, |acc, x| acc + t[x].conj() * out[x * de + y])
        });
        let overlap = dominant.dotc(&record);
        if overlap.norm() > 0.0 {
            dominant *= overlap / overlap.norm();
        }
        environment.push(StateVector::normalized(dominant)?);
    }

    let floor = 1.0 - tol.deletion;
    let valid = residual_fidelity.iter().all(|&f| f >= floor)
        && environment_purity.iter().all(|&p| p >= floor);
    Ok(DeletionTrace {
        valid,
        environment_states: StateSet::new(psi.labels().to_vec(), environment)?,
        residual_fidelity,
        environment_purity,
    })
}

/// Unitary `W` with `W env_i = psi_i`, defined on a space of dimension
/// `max(psi.dim(), env.dim())`.
pub fn recover_deleted(psi: &StateSet, env: &StateSet, tol: &Tolerances) -> Result<UnitaryMap> {
    if psi.len() != env.len() {
        return Err(Error::CardinalityMismatch {
            left: psi.len(),
            right: env.len(),
        });
    }
    require_min_overlap(psi, tol.min_overlap)?;
    let max_deviation = max_abs_diff(gram(psi).entries(), gram(env).entries());
    if max_deviation > tol.gram {
        return Err(Error::GramMismatch { max_deviation });
    }
    match unitary_equivalence(env, psi, tol.gram, tol)? {
        Equivalence::Unitary(w) => Ok(w),
        Equivalence::Infeasible { max_gram_deviation } => Err(Error::GramMismatch {
            max_deviation: max_gram_deviation,
        }),
    }
}

/// `|<psi_i| W |env_i>|^2` for each `i`, in the padded common space.
pub fn recovery_fidelities(w: &UnitaryMap, psi: &StateSet, env: &StateSet) -> Vec<f64> {
    let dim = w.dim();
    psi.states()
        .iter()
        .zip(env.states())
        .map(|(p, e)| {
            let image = w.apply(e.padded(dim).amplitudes());
            p.padded(dim).amplitudes().dotc(&image).norm_sqr()
        })
        .collect()
}

/// One measurement outcome of the collapse-based deleter.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CollapseBranch {
    pub outcome: usize,
    pub probability: f64,
    /// Rotation taking the post-measurement state `|outcome>` to `|0>`.
    #[serde(with = "crate::io::complex_matrix")]
    pub correction: CMatrix,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CollapseDemo {
    pub label: String,
    pub basis: &'static str,
    pub branches: Vec<CollapseBranch>,
    /// Always true: measurement collapse is not a trace-preserving
    /// completely positive map on the pure input and is outside the model
    /// the deleting theorem speaks about.
    pub outside_physical_model: bool,
}

/// Deletion by complete computational-basis measurement followed by an
/// outcome-dependent rotation to `|0>`.
pub fn collapse_deleter_demo(psi: &StateSet) -> Vec<CollapseDemo> {
    let d = psi.dim();
    psi.labels()
        .iter()
        .zip(psi.states())
        .map(|(label, s)| {
            let branches = (0..d)
                .map(|k| {
                    let mut correction = CMatrix::identity(d, d);
                    if k != 0 {
                        correction.swap_columns(0, k);
                    }
                    CollapseBranch {
                        outcome: k,
                        probability: s.amplitudes()[k].norm_sqr(),
                        correction,
                    }
                })
                .collect();
            CollapseDemo {
                label: label.clone(),
                basis: "computational",
                branches,
                outside_physical_model: true,
            }
        })
        .collect()
}
