//! Exact three-qubit teleportation.
//!
//! Qubit 0 carries the input, qubits 1 and 2 share `|Phi+>`. Amplitudes are
//! indexed `q0 * 4 + q1 * 2 + q2`. Bell outcomes are ordered
//! `Phi+, Psi+, Phi-, Psi-` and corrected on qubit 2 with `I, X, Z, XZ`.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::linalg::{c, CMatrix, CVector, ONE, ZERO};
use crate::statekit::StateVector;
use crate::{Error, Result};

/// Maximum deviation from the uniform distribution accepted by
/// [`independence_check`].
pub const INDEPENDENCE_TOL: f64 = 1e-10;

pub const BELL_LABELS: [&str; 4] = ["Phi+", "Psi+", "Phi-", "Psi-"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementBasis {
    Bell,
    /// Negative control: measures qubits 0 and 1 in the computational basis
    /// and applies the same corrections.
    Computational,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TeleportTrace {
    #[serde(serialize_with = "serialize_state")]
    pub input: StateVector,
    pub basis: MeasurementBasis,
    pub outcome_probs: [f64; 4],
    #[serde(serialize_with = "serialize_states")]
    pub corrected_outputs: Vec<StateVector>,
    pub fidelities: [f64; 4],
}

fn amps(s: &StateVector) -> Vec<[f64; 2]> {
    s.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

fn serialize_state<S: serde::Serializer>(s: &StateVector, ser: S) -> std::result::Result<S::Ok, S::Error> {
    amps(s).serialize(ser)
}

fn serialize_states<S: serde::Serializer>(
    v: &[StateVector],
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(amps).collect::<Vec<_>>().serialize(ser)
}

/// Measurement vectors on qubits 0 and 1, indexed `q0 * 2 + q1`.
fn measurement_vectors(basis: MeasurementBasis) -> [[f64; 4]; 4] {
    let h = FRAC_1_SQRT_2;
    match basis {
        MeasurementBasis::Bell => [
            [h, 0.0, 0.0, h],
            [0.0, h, h, 0.0],
            [h, 0.0, 0.0, -h],
            [0.0, h, -h, 0.0],
        ],
        MeasurementBasis::Computational => [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
    }
}

fn corrections() -> [CMatrix; 4] {
    let i = CMatrix::identity(2, 2);
    let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let z = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    let xz = &x * &z;
    [i, x, z, xz]
}

fn joint_state(psi: &StateVector) -> CVector {
    let h = c(FRAC_1_SQRT_2, 0.0);
    let bell = CVector::from_vec(vec![h, ZERO, ZERO, h]);
    psi.amplitudes().kronecker(&bell)
}

fn require_qubit(psi: &StateVector) -> Result<()> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: psi.dim(),
        });
    }
    Ok(())
}

/// Unnormalized qubit-2 state for each outcome.
fn branches(psi: &StateVector, basis: MeasurementBasis) -> [CVector; 4] {
    let joint = joint_state(psi);
    let vectors = measurement_vectors(basis);
    std::array::from_fn(|k| {
        CVector::from_fn(2, |q2, _| {
            (0..4).map(|ab| joint[ab * 2 + q2] * vectors[k][ab]).sum()
        })
    })
}

pub fn teleport(psi: &StateVector) -> Result<TeleportTrace> {
    teleport_with(psi, MeasurementBasis::Bell)
}

/// Runs every measurement branch exactly. Branches of zero probability
/// report the input itself as output.
pub fn teleport_with(psi: &StateVector, basis: MeasurementBasis) -> Result<TeleportTrace> {
    require_qubit(psi)?;
    let fix = corrections();
    let mut outcome_probs = [0.0; 4];
    let mut fidelities = [0.0; 4];
    let mut corrected_outputs = Vec::with_capacity(4);
    for (k, branch) in branches(psi, basis).into_iter().enumerate() {
        let p = branch.norm_squared();
        outcome_probs[k] = p;
        let out = if p > 0.0 {
            StateVector::normalized(&fix[k] * branch)?
        } else {
            psi.clone()
        };
        fidelities[k] = psi.fidelity(&out).clamp(0.0, 1.0);
        corrected_outputs.push(out);
    }
    Ok(TeleportTrace {
        input: psi.clone(),
        basis,
        outcome_probs,
        corrected_outputs,
        fidelities,
    })
}

pub fn outcome_distribution(psi: &StateVector) -> Result<[f64; 4]> {
    outcome_distribution_with(psi, MeasurementBasis::Bell)
}

pub fn outcome_distribution_with(psi: &StateVector, basis: MeasurementBasis) -> Result<[f64; 4]> {
    require_qubit(psi)?;
    Ok(branches(psi, basis).map(|b| b.norm_squared()))
}

/// Whether every outcome distribution over `sample` is uniform within
/// [`INDEPENDENCE_TOL`]. Empty samples and non-qubit states fail.
pub fn independence_check(sample: &[StateVector]) -> bool {
    independence_check_with(sample, MeasurementBasis::Bell)
}

pub fn independence_check_with(sample: &[StateVector], basis: MeasurementBasis) -> bool {
    !sample.is_empty()
        && sample.iter().all(|psi| {
            outcome_distribution_with(psi, basis)
                .map(|d| d.iter().all(|p| (p - 0.25).abs() <= INDEPENDENCE_TOL))
                .unwrap_or(false)
        })
}
