//! JSON file formats.
//!
//! Complex numbers are always two-element `[re, im]` arrays and matrices are
//! arrays of rows.
//!
//! ```text
//! state set  { "dim": 2, "states": [ { "label": "a", "amps": [[1,0],[0,0]] } ] }
//! ancillas   same, each entry carrying either "amps" (pure) or "rho" (matrix)
//! ensemble   state set plus "probs": [0.5, 0.5]
//! unitary    { "dim": 4, "matrix": [[[1,0], ...], ...] }
//! ```

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize, Serializer};

use crate::cloning::MixedStateSet;
use crate::compression::Ensemble;
use crate::linalg::{c, CMatrix, CVector};
use crate::statekit::{GramMatrix, StateSet, StateVector, UnitaryMap};
use crate::{Error, Result, Tolerances};

pub type ComplexPair = [f64; 2];

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|col| [m[(r, col)].re, m[(r, col)].im]).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<ComplexPair>], field: &str) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(r) = rows.iter().position(|row| row.len() != ncols) {
        return Err(schema(
            format!("{field}[{r}]"),
            format!("row has {} entries, expected {ncols}", rows[r].len()),
        ));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |r, col| {
        let [re, im] = rows[r][col];
        c(re, im)
    }))
}

fn schema(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Schema {
        field: field.into(),
        reason: reason.into(),
    }
}

/// `#[serde(with = ...)]` adapter for dense complex matrices.
pub mod complex_matrix {
    use super::*;
    use serde::Deserializer;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<ComplexPair>>::deserialize(d)?;
        rows_to_matrix(&rows, "matrix").map_err(serde::de::Error::custom)
    }
}

impl Serialize for GramMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_rows(self.entries()).serialize(s)
    }
}

impl Serialize for UnitaryMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile::from_matrix(self.matrix()).serialize(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateEntry {
    pub label: String,
    pub amps: Vec<ComplexPair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSetFile {
    pub dim: usize,
    pub states: Vec<StateEntry>,
}

fn entry_vector(amps: &[ComplexPair], dim: usize, field: &str, tol: &Tolerances) -> Result<StateVector> {
    if amps.len() != dim {
        return Err(schema(
            format!("{field}.amps"),
            format!("{} amplitudes for dimension {dim}", amps.len()),
        ));
    }
    let v = CVector::from_iterator(dim, amps.iter().map(|&[re, im]| c(re, im)));
    StateVector::with_tolerance(v, tol.norm).map_err(|e| schema(format!("{field}.amps"), e.to_string()))
}

impl StateSetFile {
    pub fn from_state_set(set: &StateSet) -> Self {
        Self {
            dim: set.dim(),
            states: set
                .labels()
                .iter()
                .zip(set.states())
                .map(|(label, s)| StateEntry {
                    label: label.clone(),
                    amps: s.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
                })
                .collect(),
        }
    }

    pub fn to_state_set(&self, tol: &Tolerances) -> Result<StateSet> {
        if self.states.is_empty() {
            return Err(schema("states", "no states given"));
        }
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(i, e)| entry_vector(&e.amps, self.dim, &format!("states[{i}]"), tol))
            .collect::<Result<Vec<_>>>()?;
        let labels = self.states.iter().map(|e| e.label.clone()).collect();
        StateSet::new(labels, states).map_err(|e| schema("states", e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AncillaEntry {
    Pure { label: String, amps: Vec<ComplexPair> },
    Mixed { label: String, rho: Vec<Vec<ComplexPair>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AncillaFile {
    pub dim: usize,
    pub states: Vec<AncillaEntry>,
}

impl AncillaFile {
    pub fn to_mixed_state_set(&self, tol: &Tolerances) -> Result<MixedStateSet> {
        if self.states.is_empty() {
            return Err(schema("states", "no ancillas given"));
        }
        let mut labels = Vec::new();
        let mut rhos = Vec::new();
        for (i, entry) in self.states.iter().enumerate() {
            let field = format!("states[{i}]");
            match entry {
                AncillaEntry::Pure { label, amps } => {
                    labels.push(label.clone());
                    rhos.push(entry_vector(amps, self.dim, &field, tol)?.projector());
                }
                AncillaEntry::Mixed { label, rho } => {
                    let m = rows_to_matrix(rho, &format!("{field}.rho"))?;
                    if m.shape() != (self.dim, self.dim) {
                        return Err(schema(
                            format!("{field}.rho"),
                            format!("shape {:?} for dimension {}", m.shape(), self.dim),
                        ));
                    }
                    crate::cloning::validate_density(&m, tol)
                        .map_err(|e| schema(format!("{field}.rho"), e.to_string()))?;
                    labels.push(label.clone());
                    rhos.push(m);
                }
            }
        }
        MixedStateSet::new(labels, rhos, tol).map_err(|e| schema("states", e.to_string()))
    }

    /// The pure ancillas, if every entry is pure.
    pub fn to_pure_state_set(&self, tol: &Tolerances) -> Result<Option<StateSet>> {
        let mut pure = Vec::new();
        for entry in &self.states {
            match entry {
                AncillaEntry::Pure { label, amps } => pure.push(StateEntry {
                    label: label.clone(),
                    amps: amps.clone(),
                }),
                AncillaEntry::Mixed { .. } => return Ok(None),
            }
        }
        StateSetFile {
            dim: self.dim,
            states: pure,
        }
        .to_state_set(tol)
        .map(Some)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub dim: usize,
    pub states: Vec<StateEntry>,
    pub probs: Vec<f64>,
}

impl EnsembleFile {
    pub fn from_ensemble(e: &Ensemble) -> Self {
        let set = StateSetFile::from_state_set(e.states());
        Self {
            dim: set.dim,
            states: set.states,
            probs: e.probs().to_vec(),
        }
    }

    pub fn to_ensemble(&self, tol: &Tolerances) -> Result<Ensemble> {
        let states = StateSetFile {
            dim: self.dim,
            states: self.states.clone(),
        }
        .to_state_set(tol)?;
        Ensemble::new(states, self.probs.clone()).map_err(|e| schema("probs", e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub matrix: Vec<Vec<ComplexPair>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self {
            dim: m.nrows(),
            matrix: matrix_to_rows(m),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let m = rows_to_matrix(&self.matrix, "matrix")?;
        if m.shape() != (self.dim, self.dim) {
            return Err(schema(
                "matrix",
                format!("shape {:?} for dimension {}", m.shape(), self.dim),
            ));
        }
        Ok(m)
    }

    pub fn to_unitary(&self, tol: &Tolerances) -> Result<UnitaryMap> {
        UnitaryMap::new(self.to_matrix()?, tol.unit).map_err(|e| schema("matrix", e.to_string()))
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| schema(path.display().to_string(), e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting_matches_printf_g() {
        assert_eq!(format_sig(0.8535533905932737, 12), "0.853553390593");
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(0.4, 12), "0.4");
        assert_eq!(format_sig(1.5e-7, 12), "1.5e-07");
        assert_eq!(format_sig(123456789012345.0, 12), "1.23456789012e+14");
        assert_eq!(format_sig(-2.5, 12), "-2.5");
        assert_eq!(format_sig(0.0001, 12), "0.0001");
    }

    #[test]
    fn state_set_file_reports_offending_field() {
        let file: StateSetFile = serde_json::from_str(
            r#"{"dim": 2, "states": [
                {"label": "a", "amps": [[1,0],[0,0]]},
                {"label": "b", "amps": [[1,0],[1,0]]}
            ]}"#,
        )
        .unwrap();
        match file.to_state_set(&Tolerances::default()) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "states[1].amps"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ancilla_entries_may_be_pure_or_mixed() {
        let file: AncillaFile = serde_json::from_str(
            r#"{"dim": 2, "states": [
                {"label": "a", "amps": [[0,0],[1,0]]},
                {"label": "b", "rho": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}
            ]}"#,
        )
        .unwrap();
        let set = file.to_mixed_state_set(&Tolerances::default()).unwrap();
        assert_eq!(set.len(), 2);
        assert!(file.to_pure_state_set(&Tolerances::default()).unwrap().is_none());
    }
}
