use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every module.
///
/// Relative tolerances (`psd`, `mix`) are scaled by the spectral norm of the
/// matrix they are applied to; the rest are absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tolerances {
    /// Deviation of a state norm from 1.
    pub norm: f64,
    /// Entrywise deviation from Hermiticity.
    pub herm: f64,
    /// Relative eigenvalue floor for positive semidefiniteness and rank.
    pub psd: f64,
    /// Spectral-norm deviation of `U^dagger U` from the identity.
    pub unit: f64,
    /// Distance allowed between a mapped state and its target.
    pub map: f64,
    /// Entrywise Gram agreement.
    pub gram: f64,
    /// Relative eigenvalue cutoff when splitting mixed states into pure parts.
    pub mix: f64,
    /// Fidelity and purity slack for deleters.
    pub deletion: f64,
    /// Commutator norm below which two density matrices commute.
    pub commute: f64,
    /// Smallest admissible overlap modulus between signal states.
    pub min_overlap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm: 1e-10,
            herm: 1e-10,
            psd: 1e-9,
            unit: 1e-9,
            map: 1e-8,
            gram: 1e-8,
            mix: 1e-12,
            deletion: 1e-8,
            commute: 1e-9,
            min_overlap: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn with_min_overlap(mut self, delta: f64) -> Self {
        self.min_overlap = delta;
        self
    }

    /// Returns the name of the first non-positive tolerance.
    pub fn first_invalid(&self) -> Option<&'static str> {
        [
            ("norm", self.norm),
            ("herm", self.herm),
            ("psd", self.psd),
            ("unit", self.unit),
            ("map", self.map),
            ("gram", self.gram),
            ("mix", self.mix),
            ("deletion", self.deletion),
            ("commute", self.commute),
            ("min_overlap", self.min_overlap),
        ]
        .into_iter()
        .find(|(_, v)| !(v.is_finite() && *v > 0.0))
        .map(|(name, _)| name)
    }
}
