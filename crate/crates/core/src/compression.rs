//! Entropies, ensemble equivalence and Schumacher compression.
//!
//! The compression simulator handles a source of two equiprobable qubit
//! states. A block of `n` signals is projected onto the span of the `keptDim`
//! largest eigenvectors of `rho^(x)n`; the figure of merit is the ensemble
//! average of `<psi_I|P|psi_I>^2`, a lower bound on the average fidelity of the
//! standard scheme (the contribution of the junk state substituted on failure
//! is dropped).
//!
//! Nothing of size `2^n` is ever built. Eigenvalues of `rho^(x)n` come in type
//! classes indexed by the number `k` of minor-eigenvalue factors, so both the
//! retained weight and the per-block projection weights reduce to sums over
//! `k`, with the signal-dependence handled by a dynamic program over block
//! positions.

use serde::{Serialize, Serializer};

use crate::linalg::{c, hermitian_eigen, hermitian_eigenvalues, CMatrix};
use crate::statekit::{StateSet, StateVector};
use crate::{Error, Result, Tolerances};

/// Eigenvalues at or below this are treated as exact zeros in entropies.
pub const ENTROPY_CUTOFF: f64 = 1e-14;

/// Default upper limit on the block length of the simulator.
pub const DEFAULT_MAX_BLOCK: usize = 256;

/// Pure states with prior probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    states: StateSet,
    probs: Vec<f64>,
}

impl Ensemble {
    pub fn new(states: StateSet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != states.len() {
            return Err(Error::CardinalityMismatch {
                left: states.len(),
                right: probs.len(),
            });
        }
        if let Some(&p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::OutOfRange {
                name: "probability",
                value: p,
                expected: "a non-negative number",
            });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::OutOfRange {
                name: "sum of probabilities",
                value: total,
                expected: "1 within 1e-10",
            });
        }
        Ok(Self { states, probs })
    }

    /// Uniform prior over `states`.
    pub fn uniform(states: StateSet) -> Self {
        let n = states.len();
        Self {
            states,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn states(&self) -> &StateSet {
        &self.states
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        crate::cloning::validate_density(&matrix, tol)?;
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// `sum_i p_i |psi_i><psi_i|`.
pub fn density_matrix(ensemble: &Ensemble) -> DensityMatrix {
    let d = ensemble.states.dim();
    let mut rho = CMatrix::zeros(d, d);
    for (s, &p) in ensemble.states.states().iter().zip(&ensemble.probs) {
        rho += s.projector() * c(p, 0.0);
    }
    DensityMatrix { matrix: rho }
}

/// `-sum lambda log2 lambda` over a spectrum, skipping eigenvalues at or below
/// [`ENTROPY_CUTOFF`].
pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&v| v > ENTROPY_CUTOFF)
        .map(|&v| -v * v.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

/// Shannon entropy in bits; zero probabilities contribute nothing.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Entropy of `{psi_1, psi_2; p, 1-p}` with `|<psi_1|psi_2>| = overlap`.
///
/// The weighted Gram matrix `[[p, sqrt(p(1-p)) g], [.., 1-p]]` has eigenvalues
/// `(1 +- sqrt(1 - 4 p (1-p) (1 - g^2))) / 2`.
pub fn two_state_entropy(overlap: f64, p: f64) -> Result<f64> {
    check_unit_interval("overlap", overlap)?;
    check_unit_interval("p", p)?;
    let disc = (1.0 - 4.0 * p * (1.0 - p) * (1.0 - overlap * overlap)).max(0.0);
    let root = disc.sqrt();
    Ok(entropy_of_spectrum(&[(1.0 + root) / 2.0, (1.0 - root) / 2.0]))
}

fn check_unit_interval(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            name,
            value: x,
            expected: "[0, 1]",
        });
    }
    Ok(())
}

/// Whether the two ensembles have the same density matrix, measured in
/// spectral norm.
pub fn ensembles_equivalent(a: &Ensemble, b: &Ensemble, tol: f64) -> Result<bool> {
    if a.states.dim() != b.states.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.states.dim(),
            found: b.states.dim(),
        });
    }
    let diff = density_matrix(a).matrix - density_matrix(b).matrix;
    Ok(hermitian_eigen(&diff).spectral_norm() <= tol)
}

/// Two equiprobable qubit signals with overlap modulus `overlap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateSource {
    overlap: f64,
}

impl TwoStateSource {
    pub fn new(overlap: f64) -> Result<Self> {
        if !(overlap > 0.0 && overlap < 1.0) {
            return Err(Error::OutOfRange {
                name: "overlap",
                value: overlap,
                expected: "the open interval (0, 1)",
            });
        }
        Ok(Self { overlap })
    }

    /// Two qubit states at 45 degrees.
    pub fn forty_five_degrees() -> Self {
        Self {
            overlap: std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    pub fn overlap(&self) -> f64 {
        self.overlap
    }

    /// `|0>` and `g|0> + sqrt(1 - g^2)|1>`.
    pub fn states(&self) -> StateSet {
        let g = self.overlap;
        StateSet::from_states(vec![
            StateVector::basis(2, 0),
            StateVector::normalized(crate::linalg::CVector::from_vec(vec![
                c(g, 0.0),
                c((1.0 - g * g).sqrt(), 0.0),
            ]))
            .expect("unit vector"),
        ])
        .expect("two qubit states")
    }

    pub fn ensemble(&self) -> Ensemble {
        Ensemble::uniform(self.states())
    }

    /// Larger eigenvalue `(1 + g) / 2` of the source density matrix.
    pub fn larger_eigenvalue(&self) -> f64 {
        (1.0 + self.overlap) / 2.0
    }

    pub fn entropy(&self) -> f64 {
        two_state_entropy(self.overlap, 0.5).expect("overlap in range")
    }
}

/// `2^floor(rate * n)` clamped to `[1, 2^n]`.
///
/// Dimensions are carried as `f64`, which represents every power of two the
/// simulator can reach exactly.
pub fn kept_dimension(n: usize, rate: f64) -> Result<f64> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::OutOfRange {
            name: "rate",
            value: rate,
            expected: "a non-negative number",
        });
    }
    let exponent = (rate * n as f64).floor().min(n as f64);
    Ok(exponent.exp2().max(1.0))
}

/// `C(n, k)` for `k = 0..=n` as floating point.
fn binomials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut value = 1.0_f64;
    for k in 0..=n {
        out.push(value);
        value = value * (n - k) as f64 / (k + 1) as f64;
    }
    out
}

/// How many eigenvectors of each type class the greedy projector keeps.
///
/// Class `k` holds the `C(n, k)` eigenvalues `lambda^(n-k) (1-lambda)^k`. For
/// `lambda >= 1/2` classes are visited in order of decreasing eigenvalue, which
/// is increasing `k`; when all eigenvalues tie the smaller `k` goes first
/// anyway. The last class touched may be kept partially.
fn kept_per_class(n: usize, kept_dim: f64) -> Vec<f64> {
    let mut remaining = kept_dim;
    binomials(n)
        .into_iter()
        .map(|size| {
            let take = size.min(remaining);
            remaining -= take;
            take
        })
        .collect()
}

fn check_block(lambda: f64, n: usize, kept_dim: f64) -> Result<()> {
    if !(0.5..=1.0).contains(&lambda) {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
            expected: "[1/2, 1]",
        });
    }
    let full = (n as f64).exp2();
    if !(kept_dim >= 1.0 && kept_dim <= full && kept_dim.fract() == 0.0) {
        return Err(Error::OutOfRange {
            name: "keptDim",
            value: kept_dim,
            expected: "an integer in [1, 2^n]",
        });
    }
    Ok(())
}

/// `tr(rho^(x)n P)` for the projector `P` onto the `kept_dim` largest
/// eigenvectors of `rho^(x)n`, where `rho` has eigenvalues `lambda` and
/// `1 - lambda`.
pub fn schumacher_weight(lambda: f64, n: usize, kept_dim: f64) -> Result<f64> {
    check_block(lambda, n, kept_dim)?;
    let minor = 1.0 - lambda;
    let weight: f64 = kept_per_class(n, kept_dim)
        .into_iter()
        .enumerate()
        .filter(|(_, m)| *m > 0.0)
        .map(|(k, m)| m * lambda.powi((n - k) as i32) * minor.powi(k as i32))
        .sum();
    Ok(weight.min(1.0))
}

/// One `(n, rate)` operating point of the compression simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CompressionPoint {
    pub n: usize,
    pub rate: f64,
    #[serde(serialize_with = "serialize_count")]
    pub kept_dim: f64,
    pub retained_weight: f64,
    #[serde(rename = "avgFidelityLB")]
    pub avg_fidelity_lb: f64,
}

fn serialize_count<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if *x <= u64::MAX as f64 {
        s.serialize_u64(*x as u64)
    } else {
        s.serialize_f64(*x)
    }
}

/// Distribution of the number of successes over independent positions with
/// the given success probabilities; `O(len^2)`.
fn count_distribution(probs: impl Iterator<Item = f64>, len: usize) -> Vec<f64> {
    let mut dist = vec![0.0; len + 1];
    dist[0] = 1.0;
    for (pos, q) in probs.enumerate() {
        for k in (0..=pos + 1).rev() {
            let stay = dist[k] * (1.0 - q);
            let step = if k > 0 { dist[k - 1] * q } else { 0.0 };
            dist[k] = stay + step;
        }
    }
    dist
}

/// Simulates Schumacher compression of `n`-blocks at `rate` qubits per signal.
///
/// For a block carrying signal 2 at `s` positions, the probability mass on
/// each eigenbasis string depends only on its type class `k`, so the
/// projection weight is `w(s) = sum_k P_s(k) m_k / C(n, k)` with `P_s` the
/// distribution of minor-eigenvector counts and `m_k` the number of kept
/// class-`k` eigenvectors. The ensemble average is the binomial mixture
/// `sum_s C(n, s) 2^-n w(s)^2`.
pub fn schumacher_avg_fidelity(
    source: &TwoStateSource,
    n: usize,
    rate: f64,
    max_block: usize,
) -> Result<CompressionPoint> {
    if n == 0 || n > max_block {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as f64,
            expected: "1 <= n <= maximum block length",
        });
    }
    let kept_dim = kept_dimension(n, rate)?;
    let lambda = source.larger_eigenvalue();
    let retained_weight = schumacher_weight(lambda, n, kept_dim)?;

    // Probability of the minor eigenvector for each signal, read off the
    // source's own eigenbasis.
    let eig = hermitian_eigen(density_matrix(&source.ensemble()).matrix());
    let minor_vec = eig.vectors.column(0).into_owned();
    let states = source.states();
    let q: Vec<f64> = states
        .states()
        .iter()
        .map(|s| minor_vec.dotc(s.amplitudes()).norm_sqr())
        .collect();

    let sizes = binomials(n);
    let kept_fraction: Vec<f64> = kept_per_class(n, kept_dim)
        .iter()
        .zip(&sizes)
        .map(|(m, size)| m / size)
        .collect();
    let mixture = count_distribution(std::iter::repeat_n(0.5, n), n);

    let avg_fidelity_lb: f64 = (0..=n)
        .map(|s| {
            let per_position = std::iter::repeat_n(q[0], n - s)
                .chain(std::iter::repeat_n(q[1], s));
            let dist = count_distribution(per_position, n);
            let w: f64 = dist
                .iter()
                .zip(&kept_fraction)
                .map(|(p, f)| p * f)
                .sum::<f64>()
                .clamp(0.0, 1.0);
            mixture[s] * w * w
        })
        .sum::<f64>()
        .clamp(0.0, 1.0);

    Ok(CompressionPoint {
        n,
        rate,
        kept_dim,
        retained_weight,
        avg_fidelity_lb,
    })
}

/// Every `(n, rate)` pair, `n` outermost, in input order.
pub fn rate_scan(
    source: &TwoStateSource,
    n_list: &[usize],
    rate_list: &[f64],
    max_block: usize,
) -> Result<Vec<CompressionPoint>> {
    if n_list.is_empty() {
        return Err(Error::Empty("block length list"));
    }
    if rate_list.is_empty() {
        return Err(Error::Empty("rate list"));
    }
    n_list
        .iter()
        .flat_map(|&n| rate_list.iter().map(move |&rate| (n, rate)))
        .map(|(n, rate)| schumacher_avg_fidelity(source, n, rate, max_block))
        .collect()
}

pub const RATE_SCAN_HEADER: &str = "n,rate,keptDim,retainedWeight,avgFidelityLB";

/// CSV rendering with 12 significant digits for real columns.
pub fn rate_scan_csv(points: &[CompressionPoint]) -> String {
    use crate::io::format_sig;
    let mut out = String::from(RATE_SCAN_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{:.0},{},{}\n",
            p.n,
            format_sig(p.rate, 12),
            p.kept_dim,
            format_sig(p.retained_weight, 12),
            format_sig(p.avg_fidelity_lb, 12),
        ));
    }
    out
}
