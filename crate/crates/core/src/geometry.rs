//! Entropy landscape of three equiprobable pure states.
//!
//! Up to unitaries a triple of states is fixed by its squared overlaps
//! `a12, a23, a31` and the phase `xi` of the triple product
//! `<1|2><2|3><3|1>`. The Gram matrix is PSD iff
//! `1 - a12 - a23 - a31 + 2 sqrt(a12 a23 a31) cos(xi) >= 0`.
//!
//! Besides the `cos(xi)` scan, this module searches for pairs of triples where
//! every pairwise overlap grows and yet the entropy grows too, something that
//! cannot happen for two states.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::compression::{density_matrix, entropy_of_spectrum, two_state_entropy, von_neumann_entropy, Ensemble};
use crate::linalg::{c, hermitian_eigenvalues, CMatrix};
use crate::sampling;
use crate::statekit::{gram, realize_from_gram, GramMatrix, StateSet};
use crate::{Error, Result, Tolerances};

/// Minimum gap between overlaps and between entropies in a certificate.
pub const SEPARATION: f64 = 1e-4;

/// Monotonicity slack used by [`xi_scan`].
pub const SCAN_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleInvariants {
    pub a12: f64,
    pub a23: f64,
    pub a31: f64,
    /// Phase of the triple product, in `(-pi, pi]`.
    pub xi: f64,
}

impl TripleInvariants {
    pub fn new(a12: f64, a23: f64, a31: f64, xi: f64) -> Result<Self> {
        for (name, a) in [("a12", a12), ("a23", a23), ("a31", a31)] {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::OutOfRange {
                    name,
                    value: a,
                    expected: "[0, 1]",
                });
            }
        }
        if !xi.is_finite() {
            return Err(Error::OutOfRange {
                name: "xi",
                value: xi,
                expected: "a finite angle",
            });
        }
        Ok(Self {
            a12,
            a23,
            a31,
            xi: wrap_phase(xi),
        })
    }

    pub fn overlaps(&self) -> [f64; 3] {
        [self.a12, self.a23, self.a31]
    }

    /// Closed-form Gram determinant.
    pub fn determinant(&self) -> f64 {
        1.0 - self.a12 - self.a23 - self.a31
            + 2.0 * (self.a12 * self.a23 * self.a31).sqrt() * self.xi.cos()
    }
}

fn wrap_phase(xi: f64) -> f64 {
    let mut x = xi.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// Gram matrix in the gauge where the whole phase sits on the `(1,2)` entry:
/// `G12 = sqrt(a12) e^(i xi)`, `G23 = sqrt(a23)`, `G31 = sqrt(a31)`.
pub fn gram_entries(t: &TripleInvariants) -> CMatrix {
    let g12 = c(t.xi.cos(), t.xi.sin()) * t.a12.sqrt();
    let g23 = c(t.a23.sqrt(), 0.0);
    let g31 = c(t.a31.sqrt(), 0.0);
    let one = c(1.0, 0.0);
    CMatrix::from_row_slice(
        3,
        3,
        &[one, g12, g31.conj(), g12.conj(), one, g23, g31, g23.conj(), one],
    )
}

#[derive(Debug, Clone)]
pub enum TripleGram {
    Feasible(GramMatrix),
    Infeasible { det: f64 },
}

impl TripleGram {
    pub fn feasible(self) -> Option<GramMatrix> {
        match self {
            TripleGram::Feasible(g) => Some(g),
            TripleGram::Infeasible { .. } => None,
        }
    }
}

pub fn gram_from_invariants(t: &TripleInvariants, tol: &Tolerances) -> TripleGram {
    let det = t.determinant();
    if det < -tol.psd {
        return TripleGram::Infeasible { det };
    }
    match GramMatrix::new(gram_entries(t), tol) {
        Ok(g) => TripleGram::Feasible(g),
        Err(_) => TripleGram::Infeasible { det },
    }
}

/// Overlaps and triple-product phase of three states.
pub fn invariants_from_states(set: &StateSet, tol: &Tolerances) -> Result<TripleInvariants> {
    if set.len() != 3 {
        return Err(Error::CardinalityMismatch {
            left: 3,
            right: set.len(),
        });
    }
    let s = set.states();
    let g12 = s[0].inner(&s[1]);
    let g23 = s[1].inner(&s[2]);
    let g31 = s[2].inner(&s[0]);
    for (pair, g) in [("12", g12), ("23", g23), ("31", g31)] {
        if g.norm() < tol.min_overlap {
            return Err(Error::UndefinedPhase { pair });
        }
    }
    let a = |g: num_complex::Complex64| g.norm_sqr().min(1.0);
    TripleInvariants::new(a(g12), a(g23), a(g31), (g12 * g23 * g31).arg())
}

/// Entropy of the three states weighted by `p`, from the spectrum of
/// `sqrt(p_i p_j) G_ij`.
pub fn entropy_from_invariants(t: &TripleInvariants, p: [f64; 3], tol: &Tolerances) -> Result<f64> {
    let g = match gram_from_invariants(t, tol) {
        TripleGram::Feasible(g) => g,
        TripleGram::Infeasible { det } => return Err(Error::InfeasibleInvariants { det }),
    };
    Ok(weighted_gram_entropy(g.entries(), &p))
}

fn weighted_gram_entropy(g: &CMatrix, p: &[f64]) -> f64 {
    let w = CMatrix::from_fn(g.nrows(), g.ncols(), |i, j| g[(i, j)] * (p[i] * p[j]).sqrt());
    entropy_of_spectrum(&hermitian_eigenvalues(&w))
}

const EQUIPROBABLE: [f64; 3] = [1.0 / 3.0; 3];

fn equiprobable_entropy(t: &TripleInvariants, tol: &Tolerances) -> Option<f64> {
    entropy_from_invariants(t, EQUIPROBABLE, tol).ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct XiRow {
    pub xi: f64,
    pub cos_xi: f64,
    pub entropy_bits: f64,
    pub det: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct XiScan {
    pub a12: f64,
    pub a23: f64,
    pub a31: f64,
    /// Rows in order of increasing `xi`.
    pub rows: Vec<XiRow>,
    /// Whether `S` never rises (beyond [`SCAN_MARGIN`]) as `cos(xi)` grows.
    pub non_increasing_in_cos: bool,
    /// Whether `S` never falls (beyond [`SCAN_MARGIN`]) as `cos(xi)` grows.
    pub non_decreasing_in_cos: bool,
    /// Grid points on the feasibility boundary (`|det| <= tol.psd`).
    pub boundary_points: usize,
}

/// Scans `xi` over the feasible part of `[0, pi]` for fixed overlaps.
///
/// `S` depends on `xi` only through `cos(xi)`, so `[0, pi]` covers every
/// distinct Gram spectrum.
pub fn xi_scan(a12: f64, a23: f64, a31: f64, grid: usize, tol: &Tolerances) -> Result<XiScan> {
    if grid < 2 {
        return Err(Error::OutOfRange {
            name: "grid",
            value: grid as f64,
            expected: "at least 2",
        });
    }
    let base = TripleInvariants::new(a12, a23, a31, 0.0)?;
    for (pair, a) in [("12", a12), ("23", a23), ("31", a31)] {
        if a <= 0.0 {
            return Err(Error::UndefinedPhase { pair });
        }
    }
    let root = 2.0 * (a12 * a23 * a31).sqrt();
    let cos_min = (a12 + a23 + a31 - 1.0) / root;
    if cos_min > 1.0 + tol.psd / root {
        return Err(Error::InfeasibleInvariants {
            det: base.determinant(),
        });
    }
    let xi_max = cos_min.clamp(-1.0, 1.0).acos();

    let rows = (0..grid)
        .map(|k| {
            let xi = xi_max * k as f64 / (grid - 1) as f64;
            let t = TripleInvariants { xi, ..base };
            let det = t.determinant();
            // Grid points are feasible by construction up to rounding at the
            // boundary, where the determinant is clamped for evaluation.
            let g = gram_entries(&t);
            let entropy_bits = weighted_gram_entropy(&g, &EQUIPROBABLE);
            XiRow {
                xi,
                cos_xi: xi.cos(),
                entropy_bits,
                det,
            }
        })
        .collect::<Vec<_>>();

    // Increasing xi means decreasing cos(xi).
    let non_increasing_in_cos = rows
        .windows(2)
        .all(|w| w[1].entropy_bits >= w[0].entropy_bits - SCAN_MARGIN);
    let non_decreasing_in_cos = rows
        .windows(2)
        .all(|w| w[1].entropy_bits <= w[0].entropy_bits + SCAN_MARGIN);
    let boundary_points = rows.iter().filter(|r| r.det.abs() <= tol.psd).count();
    Ok(XiScan {
        a12,
        a23,
        a31,
        rows,
        non_increasing_in_cos,
        non_decreasing_in_cos,
        boundary_points,
    })
}

pub const XI_SCAN_HEADER: &str = "xi,cos_xi,S_bits";

pub fn xi_scan_csv(scan: &XiScan) -> String {
    use crate::io::format_sig;
    let mut out = String::from(XI_SCAN_HEADER);
    out.push('\n');
    for r in &scan.rows {
        out.push_str(&format!(
            "{},{},{}\n",
            format_sig(r.xi, 12),
            format_sig(r.cos_xi, 12),
            format_sig(r.entropy_bits, 12)
        ));
    }
    out
}

/// Two equiprobable triples where every squared overlap and the entropy all
/// increase from the first to the second.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CounterexamplePair {
    pub first: TripleInvariants,
    pub second: TripleInvariants,
    pub gram1: GramMatrix,
    pub gram2: GramMatrix,
    pub entropy1: f64,
    pub entropy2: f64,
    /// `a(second) - a(first)` for the pairs 12, 23, 31.
    pub overlap_deltas: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMethod {
    Grid,
    Random,
    Hillclimb,
}

impl std::str::FromStr for SearchMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "grid" => Ok(Self::Grid),
            "random" => Ok(Self::Random),
            "hillclimb" => Ok(Self::Hillclimb),
            other => Err(format!("unknown search method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchStats {
    /// Candidate pairs evaluated, the unit of the budget.
    pub evaluations: u64,
    /// Candidates where both triples were feasible.
    pub feasible: u64,
    /// Best `min(overlap deltas, entropy gain)` seen.
    pub best_margin: f64,
}

impl SearchStats {
    fn new() -> Self {
        Self {
            evaluations: 0,
            feasible: 0,
            best_margin: f64::NEG_INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum SearchOutcome<T> {
    Found { certificate: T, stats: SearchStats },
    NotFound { stats: SearchStats },
}

impl<T> SearchOutcome<T> {
    pub fn certificate(&self) -> Option<&T> {
        match self {
            SearchOutcome::Found { certificate, .. } => Some(certificate),
            SearchOutcome::NotFound { .. } => None,
        }
    }

    pub fn stats(&self) -> &SearchStats {
        match self {
            SearchOutcome::Found { stats, .. } | SearchOutcome::NotFound { stats } => stats,
        }
    }
}

struct Evaluated {
    margin: f64,
    gain: f64,
    deltas: [f64; 3],
    entropies: (f64, f64),
}

fn evaluate(
    first: &TripleInvariants,
    second: &TripleInvariants,
    tol: &Tolerances,
    stats: &mut SearchStats,
) -> Option<Evaluated> {
    stats.evaluations += 1;
    let s1 = equiprobable_entropy(first, tol)?;
    let s2 = equiprobable_entropy(second, tol)?;
    stats.feasible += 1;
    let a1 = first.overlaps();
    let a2 = second.overlaps();
    let deltas = [a2[0] - a1[0], a2[1] - a1[1], a2[2] - a1[2]];
    let gain = s2 - s1;
    let margin = deltas.iter().copied().fold(gain, f64::min);
    stats.best_margin = stats.best_margin.max(margin);
    Some(Evaluated {
        margin,
        gain,
        deltas,
        entropies: (s1, s2),
    })
}

fn certify(
    first: &TripleInvariants,
    second: &TripleInvariants,
    ev: &Evaluated,
    tol: &Tolerances,
) -> Option<CounterexamplePair> {
    if ev.margin <= SEPARATION {
        return None;
    }
    Some(CounterexamplePair {
        first: *first,
        second: *second,
        gram1: gram_from_invariants(first, tol).feasible()?,
        gram2: gram_from_invariants(second, tol).feasible()?,
        entropy1: ev.entropies.0,
        entropy2: ev.entropies.1,
        overlap_deltas: ev.deltas,
    })
}

fn triple(a: [f64; 3], xi: f64) -> Option<TripleInvariants> {
    TripleInvariants::new(a[0], a[1], a[2], xi).ok()
}

/// Searches for a [`CounterexamplePair`] within `budget` candidate pairs.
///
/// Deterministic for a given `seed` (the grid method ignores it).
pub fn overlap_dominance_counterexample(
    seed: u64,
    budget: u64,
    method: SearchMethod,
    tol: &Tolerances,
) -> SearchOutcome<CounterexamplePair> {
    match method {
        SearchMethod::Grid => grid_search(budget, tol),
        SearchMethod::Random => random_search(seed, budget, tol),
        SearchMethod::Hillclimb => hill_climb(seed, budget, tol),
    }
}

fn grid_search(budget: u64, tol: &Tolerances) -> SearchOutcome<CounterexamplePair> {
    const LEVELS: usize = 9;
    const PHASES: usize = 9;
    const STEPS: [f64; 3] = [0.01, 0.05, 0.1];
    let level = |k: usize| 0.1 * (k + 1) as f64;
    let phase = |k: usize| PI * k as f64 / (PHASES - 1) as f64;

    let mut stats = SearchStats::new();
    for i in 0..LEVELS {
        for j in 0..LEVELS {
            for k in 0..LEVELS {
                let a = [level(i), level(j), level(k)];
                for p1 in 0..PHASES {
                    let Some(first) = triple(a, phase(p1)) else { continue };
                    for step in STEPS {
                        let a2 = a.map(|x| x + step);
                        for p2 in 0..PHASES {
                            if stats.evaluations >= budget {
                                return SearchOutcome::NotFound { stats };
                            }
                            let Some(second) = triple(a2, phase(p2)) else {
                                stats.evaluations += 1;
                                continue;
                            };
                            if let Some(ev) = evaluate(&first, &second, tol, &mut stats) {
                                if let Some(certificate) = certify(&first, &second, &ev, tol) {
                                    return SearchOutcome::Found { certificate, stats };
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    SearchOutcome::NotFound { stats }
}

fn random_pair<R: Rng>(rng: &mut R) -> Option<(TripleInvariants, TripleInvariants)> {
    let a: [f64; 3] = [rng.gen_range(0.0..0.9), rng.gen_range(0.0..0.9), rng.gen_range(0.0..0.9)];
    let a2 = a.map(|x| (x + rng.gen_range(SEPARATION..0.1)).min(1.0));
    let first = triple(a, rng.gen_range(0.0..PI))?;
    let second = triple(a2, rng.gen_range(0.0..PI))?;
    Some((first, second))
}

fn random_search(seed: u64, budget: u64, tol: &Tolerances) -> SearchOutcome<CounterexamplePair> {
    let mut rng = sampling::stream(seed, 0);
    let mut stats = SearchStats::new();
    while stats.evaluations < budget {
        let Some((first, second)) = random_pair(&mut rng) else {
            stats.evaluations += 1;
            continue;
        };
        if let Some(ev) = evaluate(&first, &second, tol, &mut stats) {
            if let Some(certificate) = certify(&first, &second, &ev, tol) {
                return SearchOutcome::Found { certificate, stats };
            }
        }
    }
    SearchOutcome::NotFound { stats }
}

/// Penalized objective: entropy gain minus a charge for every overlap delta
/// short of twice the separation.
fn objective(ev: &Evaluated) -> f64 {
    const PENALTY: f64 = 10.0;
    let shortfall: f64 = ev
        .deltas
        .iter()
        .map(|d| (2.0 * SEPARATION - d).max(0.0))
        .sum();
    ev.gain - PENALTY * shortfall
}

fn hill_climb(seed: u64, budget: u64, tol: &Tolerances) -> SearchOutcome<CounterexamplePair> {
    const INITIAL_STEP: f64 = 0.1;
    const MIN_STEP: f64 = 1e-6;

    let mut stats = SearchStats::new();
    let mut restart = 0_u64;
    while stats.evaluations < budget {
        let mut rng = sampling::stream(seed, restart);
        restart += 1;

        // Feasible starting pair.
        let (mut first, mut second, mut current) = loop {
            if stats.evaluations >= budget {
                return SearchOutcome::NotFound { stats };
            }
            let Some((f, s)) = random_pair(&mut rng) else {
                stats.evaluations += 1;
                continue;
            };
            if let Some(ev) = evaluate(&f, &s, tol, &mut stats) {
                break (f, s, ev);
            }
        };
        if let Some(certificate) = certify(&first, &second, &current, tol) {
            return SearchOutcome::Found { certificate, stats };
        }

        let mut step = INITIAL_STEP;
        while step >= MIN_STEP && stats.evaluations < budget {
            let mut jitter = || step * rng.sample::<f64, _>(StandardNormal);
            let f = triple(
                [first.a12 + jitter(), first.a23 + jitter(), first.a31 + jitter()],
                first.xi + jitter(),
            );
            let s = triple(
                [second.a12 + jitter(), second.a23 + jitter(), second.a31 + jitter()],
                second.xi + jitter(),
            );
            let proposal = match (f, s) {
                (Some(f), Some(s)) => evaluate(&f, &s, tol, &mut stats).map(|ev| (f, s, ev)),
                _ => {
                    stats.evaluations += 1;
                    None
                }
            };
            match proposal {
                Some((f, s, ev)) if objective(&ev) > objective(&current) => {
                    first = f;
                    second = s;
                    current = ev;
                    if let Some(certificate) = certify(&first, &second, &current, tol) {
                        return SearchOutcome::Found { certificate, stats };
                    }
                }
                _ => step /= 2.0,
            }
        }
    }
    SearchOutcome::NotFound { stats }
}

/// Two-state analogue: squared overlaps `a1 < a2` with entropy rising.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairCounterexample {
    pub a1: f64,
    pub a2: f64,
    pub entropy1: f64,
    pub entropy2: f64,
}

/// Random search over equiprobable two-state sources; the entropy of two
/// states falls strictly with their overlap, so this never succeeds.
pub fn pair_dominance_counterexample(seed: u64, budget: u64) -> SearchOutcome<PairCounterexample> {
    let mut rng = sampling::stream(seed, 0);
    let mut stats = SearchStats::new();
    while stats.evaluations < budget {
        stats.evaluations += 1;
        let a1: f64 = rng.gen_range(0.0..1.0 - SEPARATION);
        let a2: f64 = rng.gen_range(a1 + SEPARATION..=1.0);
        let (Ok(s1), Ok(s2)) = (two_state_entropy(a1.sqrt(), 0.5), two_state_entropy(a2.sqrt(), 0.5)) else {
            continue;
        };
        stats.feasible += 1;
        let margin = (a2 - a1).min(s2 - s1);
        stats.best_margin = stats.best_margin.max(margin);
        if margin > SEPARATION {
            return SearchOutcome::Found {
                certificate: PairCounterexample {
                    a1,
                    a2,
                    entropy1: s1,
                    entropy2: s2,
                },
                stats,
            };
        }
    }
    SearchOutcome::NotFound { stats }
}

/// Independent re-check of a certificate: both Gram matrices are realized as
/// explicit states, their overlaps recomputed, and the entropies taken from
/// the diagonalized density matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verification {
    pub valid: bool,
    pub entropy1: f64,
    pub entropy2: f64,
    pub overlap_deltas: [f64; 3],
}

pub fn verify_counterexample(pair: &CounterexamplePair, tol: &Tolerances) -> Result<Verification> {
    let realize = |g: &GramMatrix| -> Result<(f64, [f64; 3])> {
        let states = realize_from_gram(g, tol)?;
        let g = gram(&states);
        let overlaps = [
            g.get(0, 1).norm_sqr(),
            g.get(1, 2).norm_sqr(),
            g.get(2, 0).norm_sqr(),
        ];
        let rho = density_matrix(&Ensemble::uniform(states));
        Ok((von_neumann_entropy(&rho), overlaps))
    };
    let (entropy1, o1) = realize(&pair.gram1)?;
    let (entropy2, o2) = realize(&pair.gram2)?;
    let overlap_deltas = [o2[0] - o1[0], o2[1] - o1[1], o2[2] - o1[2]];
    let valid = overlap_deltas.iter().all(|d| *d > SEPARATION) && entropy2 > entropy1 + SEPARATION;
    Ok(Verification {
        valid,
        entropy1,
        entropy2,
        overlap_deltas,
    })
}
