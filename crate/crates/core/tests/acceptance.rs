//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILING` are reported as FAIL without failing
//! the run; any other failure exits non-zero.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use qperm::cloning::{cloning_feasible, construct_cloner, generation_feasible, MixedStateSet};
use qperm::compression::{
    density_matrix, ensembles_equivalent, schumacher_avg_fidelity, schumacher_weight,
    shannon_entropy, two_state_entropy, von_neumann_entropy, Ensemble, TwoStateSource,
    DEFAULT_MAX_BLOCK,
};
use qperm::deleting::{is_valid_deleter, make_swap_deleter, recover_deleted, recovery_fidelities};
use qperm::geometry::{
    overlap_dominance_counterexample, pair_dominance_counterexample, verify_counterexample,
    xi_scan, SearchMethod, TripleInvariants,
};
use qperm::linalg::max_abs_diff;
use qperm::sampling::{self, haar_state, haar_unitary};
use qperm::statekit::{gram, StateSet, StateVector};
use qperm::teleport::{outcome_distribution, teleport};
use qperm::Tolerances;
use rand::Rng;

use common::{brute_force_weight, dense_schumacher, non_orthogonal_set, state_at_overlap, sweep_instance};

/// S is observed to increase with cos(xi), against the claimed decrease.
const KNOWN_FAILING: &[u8] = &[8];

const SEED: u64 = 20_240_601;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn entropy_fixture() -> Verdict {
    let start = Instant::now();
    let s = two_state_entropy(FRAC_1_SQRT_2, 0.5).unwrap();
    let h = shannon_entropy(&[0.5, 0.5]);
    let elapsed = start.elapsed();
    let dense = von_neumann_entropy(&density_matrix(&TwoStateSource::forty_five_degrees().ensemble()));
    let pass = (s - 0.601).abs() <= 5e-4
        && (dense - 0.601).abs() <= 5e-4
        && h == 1.0
        && elapsed < Duration::from_millis(1);
    verdict(
        pass,
        format!("S = {s:.6} bits (density matrix {dense:.6}), H = {h} bit, {elapsed:?}"),
    )
}

fn near_orthogonal_fixture() -> Verdict {
    let g = 1e-9;
    let states = StateSet::from_states(vec![
        StateVector::basis(2, 0),
        StateVector::from_real(&[g, (1.0 - g * g).sqrt()]).unwrap(),
    ])
    .unwrap();
    let s = von_neumann_entropy(&density_matrix(&Ensemble::uniform(states)));
    let closed = two_state_entropy(g, 0.5).unwrap();
    let pass = (s - 1.0).abs() <= 1e-9 && (closed - 1.0).abs() <= 1e-9;
    verdict(pass, format!("1 - S = {:.3e} (closed form {:.3e})", 1.0 - s, 1.0 - closed))
}

const SWEEP: u64 = 1200;

fn equivalence_sweep() -> Verdict {
    let tol = Tolerances::default();
    let start = Instant::now();
    let (mut feasible, mut disagreements, mut exceptions) = (0, 0, 0);
    let mut worst = 0.0_f64;
    for index in 0..SWEEP {
        let inst = sweep_instance(SEED, index);
        let Ok(generation) = generation_feasible(&inst.psi, &inst.ancilla, &tol) else {
            exceptions += 1;
            continue;
        };
        feasible += usize::from(generation.feasible);
        for n in 1..=4 {
            match cloning_feasible(&inst.psi, &inst.ancilla, n, &tol) {
                Ok(report) => {
                    worst = worst.max(max_abs_diff(&report.h_matrix, &generation.h_matrix));
                    disagreements += usize::from(report.feasible != generation.feasible);
                }
                Err(_) => exceptions += 1,
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = disagreements == 0 && exceptions == 0 && worst <= 1e-9 && elapsed < Duration::from_secs(60);
    verdict(
        pass,
        format!(
            "{SWEEP} instances ({feasible} feasible), {disagreements} verdict disagreements, \
             {exceptions} errors, max |H' - H| = {worst:.2e}, {elapsed:.2?}"
        ),
    )
}

fn no_cloning_baseline() -> Verdict {
    let tol = Tolerances::default();
    let trials = 500;
    let mut infeasible = 0;
    for t in 0..trials {
        let mut rng = sampling::stream(SEED ^ 0x4, t);
        let d = rng.gen_range(2..=6);
        let psi = if t % 2 == 0 {
            non_orthogonal_set(&mut rng, 2, d, tol.min_overlap)
        } else {
            let first = haar_state(&mut rng, d);
            let g = rng.gen_range(1e-3..1.0 - 1e-6);
            let second = state_at_overlap(&mut rng, &first, g);
            StateSet::from_states(vec![first, second]).unwrap()
        };
        let da = rng.gen_range(2..=6);
        let blank = haar_state(&mut rng, da);
        let ancilla = MixedStateSet::from_pure(&StateSet::from_states(vec![blank.clone(), blank]).unwrap());
        let generation = generation_feasible(&psi, &ancilla, &tol).map(|r| r.feasible);
        let cloning = cloning_feasible(&psi, &ancilla, 1, &tol).map(|r| r.feasible);
        if matches!((generation, cloning), (Ok(false), Ok(false))) {
            infeasible += 1;
        }
    }
    verdict(infeasible == trials, format!("{infeasible}/{trials} judged infeasible"))
}

fn cloner_soundness() -> Verdict {
    let tol = Tolerances::default();
    let (mut built, mut failed) = (0, 0);
    let mut worst = 1.0_f64;
    for index in 0..SWEEP {
        let inst = sweep_instance(SEED, index);
        let Some(pure) = &inst.pure else { continue };
        if !generation_feasible(&inst.psi, &inst.ancilla, &tol).is_ok_and(|r| r.feasible) {
            continue;
        }
        match construct_cloner(&inst.psi, pure, &tol) {
            Ok(cloner) => {
                built += 1;
                worst = cloner.fidelities.iter().fold(worst, |acc, f| acc.min(*f));
            }
            Err(_) => failed += 1,
        }
    }
    let pass = failed == 0 && built > 0 && worst >= 1.0 - 1e-8;
    verdict(
        pass,
        format!("{built} cloners built, {failed} failures, worst fidelity 1 - {:.2e}", 1.0 - worst),
    )
}

fn deletion_pipeline() -> Verdict {
    let tol = Tolerances::default();
    let trials = 200;
    let (mut ok, mut worst_gram, mut worst_fidelity) = (0, 0.0_f64, 1.0_f64);
    for t in 0..trials {
        let mut rng = sampling::stream(SEED ^ 0x6, t);
        let d = rng.gen_range(2..=4);
        let de = rng.gen_range(d + 1..=d + 2);
        let v = haar_unitary(&mut rng, de);
        let psi = non_orthogonal_set(&mut rng, 3, d, 1e-3);
        let run = || -> qperm::Result<(bool, f64, f64)> {
            let u = make_swap_deleter(d, de, Some(v.matrix()), &tol)?;
            let trace = is_valid_deleter(&u, &psi, &StateVector::basis(d, 0), &StateVector::basis(de, 0), &tol)?;
            let dev = max_abs_diff(gram(&trace.environment_states).entries(), gram(&psi).entries());
            let w = recover_deleted(&psi, &trace.environment_states, &tol)?;
            let fid = recovery_fidelities(&w, &psi, &trace.environment_states)
                .into_iter()
                .fold(1.0_f64, f64::min);
            Ok((trace.valid, dev, fid))
        };
        if let Ok((valid, dev, fid)) = run() {
            worst_gram = worst_gram.max(dev);
            worst_fidelity = worst_fidelity.min(fid);
            if valid && dev <= 1e-8 && fid >= 1.0 - 1e-8 {
                ok += 1;
            }
        }
    }
    verdict(
        ok == trials,
        format!(
            "{ok}/{trials} deleters pass, max Gram deviation {worst_gram:.2e}, \
             worst recovery fidelity 1 - {:.2e}",
            1.0 - worst_fidelity
        ),
    )
}

fn schumacher_trends() -> Verdict {
    let source = TwoStateSource::forty_five_degrees();
    let start = Instant::now();
    let sizes = [8, 16, 32, 64];
    let high: Vec<f64> = sizes
        .iter()
        .map(|&n| schumacher_avg_fidelity(&source, n, 0.8, DEFAULT_MAX_BLOCK).unwrap().avg_fidelity_lb)
        .collect();
    let low: Vec<f64> = sizes
        .iter()
        .map(|&n| schumacher_avg_fidelity(&source, n, 0.4, DEFAULT_MAX_BLOCK).unwrap().retained_weight)
        .collect();
    let elapsed = start.elapsed();
    let increasing = high.windows(2).all(|w| w[1] > w[0]);
    let decreasing = low.windows(2).all(|w| w[1] < w[0]);

    let mut oracle_gap = 0.0_f64;
    for n in 1..=10 {
        for rate in [0.0, 0.4, 0.8, 1.0] {
            let p = schumacher_avg_fidelity(&source, n, rate, DEFAULT_MAX_BLOCK).unwrap();
            let (weight, avg) = dense_schumacher(source.overlap(), n, p.kept_dim as usize);
            oracle_gap = oracle_gap
                .max((weight - p.retained_weight).abs())
                .max((avg - p.avg_fidelity_lb).abs());
        }
    }
    let kept = 1usize << 12;
    let lambda = source.larger_eigenvalue();
    let brute_gap = (schumacher_weight(lambda, 16, kept as f64).unwrap() - brute_force_weight(lambda, 16, kept)).abs();

    let pass = increasing && decreasing && oracle_gap <= 1e-9 && brute_gap <= 1e-9 && elapsed < Duration::from_secs(30);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ");
    verdict(
        pass,
        format!(
            "fidelity LB at rate 0.8: {}; retained weight at rate 0.4: {}; \
             dense oracle gap {oracle_gap:.1e}, n=16 enumeration gap {brute_gap:.1e}, {elapsed:.2?}",
            fmt(&high),
            fmt(&low)
        ),
    )
}

fn cos_xi_monotonicity() -> Verdict {
    let tol = Tolerances::default();
    let mut rng = sampling::stream(SEED ^ 0x8, 0);
    let target = 200;
    let (mut tested, mut holds, mut increasing) = (0, 0, 0);
    while tested < target {
        let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(1e-3..1.0));
        let Ok(t) = TripleInvariants::new(a[0], a[1], a[2], 0.0) else { continue };
        if t.determinant() < 0.0 {
            continue;
        }
        let scan = xi_scan(a[0], a[1], a[2], 101, &tol).unwrap();
        tested += 1;
        holds += usize::from(scan.non_increasing_in_cos);
        increasing += usize::from(scan.non_decreasing_in_cos);
    }
    verdict(
        holds == target,
        format!(
            "S non-increasing in cos(xi) for {holds}/{target} triples; \
             non-decreasing for {increasing}/{target}"
        ),
    )
}

fn overlap_dominance() -> Verdict {
    let tol = Tolerances::default();
    let start = Instant::now();
    let budget = 100_000;
    let outcome = overlap_dominance_counterexample(SEED, budget, SearchMethod::Hillclimb, &tol);
    let control = pair_dominance_counterexample(SEED, budget);
    let elapsed = start.elapsed();
    let Some(pair) = outcome.certificate() else {
        return verdict(false, format!("no certificate within {budget} evaluations"));
    };
    let check = verify_counterexample(pair, &tol).unwrap();
    let separated = check.overlap_deltas.iter().all(|d| *d >= 1e-4) && check.entropy2 - check.entropy1 >= 1e-4;
    let pass = check.valid && separated && control.certificate().is_none() && elapsed < Duration::from_secs(120);
    verdict(
        pass,
        format!(
            "certificate after {} evaluations: overlap gains {:.2e} {:.2e} {:.2e}, \
             entropy gain {:.2e} (dense recheck {}); two-state control found {}, {elapsed:.2?}",
            outcome.stats().evaluations,
            check.overlap_deltas[0],
            check.overlap_deltas[1],
            check.overlap_deltas[2],
            check.entropy2 - check.entropy1,
            if check.valid { "valid" } else { "invalid" },
            if control.certificate().is_some() { "a pair" } else { "nothing" },
        ),
    )
}

fn teleportation() -> Verdict {
    let mut rng = sampling::stream(SEED ^ 0xa, 0);
    let (mut fid_gap, mut dist_gap) = (0.0_f64, 0.0_f64);
    for _ in 0..100 {
        let psi = haar_state(&mut rng, 2);
        let trace = teleport(&psi).unwrap();
        fid_gap = trace.fidelities.iter().fold(fid_gap, |acc, f| acc.max((1.0 - f).abs()));
        dist_gap = outcome_distribution(&psi)
            .unwrap()
            .iter()
            .fold(dist_gap, |acc, p| acc.max((p - 0.25).abs()));
    }
    verdict(
        fid_gap <= 1e-10 && dist_gap <= 1e-12,
        format!("max fidelity gap {fid_gap:.1e}, max outcome deviation {dist_gap:.1e}"),
    )
}

fn indistinguishability() -> Verdict {
    let h = FRAC_1_SQRT_2;
    let uniform = |states: Vec<StateVector>| Ensemble::uniform(StateSet::from_states(states).unwrap());
    let computational = uniform(vec![StateVector::basis(2, 0), StateVector::basis(2, 1)]);
    let hadamard = uniform(vec![
        StateVector::from_real(&[h, h]).unwrap(),
        StateVector::from_real(&[h, -h]).unwrap(),
    ]);
    let tilted = TwoStateSource::forty_five_degrees().ensemble();
    let same = ensembles_equivalent(&computational, &hadamard, 1e-9).unwrap();
    let differ_a = !ensembles_equivalent(&tilted, &computational, 1e-9).unwrap();
    let differ_b = !ensembles_equivalent(&tilted, &hadamard, 1e-9).unwrap();
    verdict(
        same && differ_a && differ_b,
        format!(
            "{{0,1}} ~ {{+,-}}: {same}; 45-degree pair distinct from both: {}",
            differ_a && differ_b
        ),
    )
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn cli_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let at = |name: &str| dir.path().join(name);
    write(
        &at("states.json"),
        r#"{"dim": 2, "states": [
            {"label": "a", "amps": [[1,0],[0,0]]},
            {"label": "b", "amps": [[0.7071067811865476,0],[0.7071067811865476,0]]}
        ]}"#,
    );
    write(
        &at("ancilla.json"),
        r#"{"dim": 2, "states": [
            {"label": "a", "amps": [[1,0],[0,0]]},
            {"label": "b", "rho": [[[0,0],[0,0]],[[0,0],[1,0]]]}
        ]}"#,
    );
    write(
        &at("ensemble.json"),
        r#"{"dim": 2, "probs": [0.5, 0.5], "states": [
            {"label": "a", "amps": [[1,0],[0,0]]},
            {"label": "b", "amps": [[0.7071067811865476,0],[0.7071067811865476,0]]}
        ]}"#,
    );
    let p = |name: &str| at(name).display().to_string();
    let runs: Vec<(Vec<String>, Vec<PathBuf>)> = vec![
        (vec!["make-deleter", "--dim", "2", "--random-v", "--out", &p("deleter.json")], vec![at("deleter.json")]),
        (
            vec![
                "delete-verify", "--unitary", &p("deleter.json"), "--states", &p("states.json"),
                "--recovery-out", &p("recovery.json"), "--out", &p("deletion.json"),
            ],
            vec![at("deletion.json"), at("recovery.json")],
        ),
        (
            vec!["clone-check", "--states", &p("states.json"), "--ancilla", &p("ancilla.json"), "--out", &p("clone.json")],
            vec![at("clone.json")],
        ),
        (vec!["entropy", "--ensemble", &p("ensemble.json"), "--out", &p("entropy.json")], vec![at("entropy.json")]),
        (
            vec!["schumacher", "--n", "8,16", "--rate", "0.4,0.8", "--out", &p("rate.csv")],
            vec![at("rate.csv"), at("rate.csv.meta.json")],
        ),
        (
            vec!["geometry-scan", "--a12", "0.5", "--a23", "0.4", "--a31", "0.3", "--out", &p("xi.csv")],
            vec![at("xi.csv"), at("xi.csv.meta.json")],
        ),
        (
            vec!["counterexample", "--budget", "20000", "--out", &p("cx.json")],
            vec![at("cx.json")],
        ),
        (
            vec!["counterexample", "--method", "random", "--budget", "20000", "--out", &p("cx-random.json")],
            vec![at("cx-random.json")],
        ),
        (
            vec!["counterexample", "--two-state", "--budget", "5000", "--out", &p("cx2.json")],
            vec![at("cx2.json")],
        ),
        (vec!["teleport-demo", "--random", "--out", &p("teleport.json")], vec![at("teleport.json")]),
    ]
    .into_iter()
    .map(|(args, files)| (args.into_iter().map(String::from).collect(), files))
    .collect();

    let exe = env!("CARGO_BIN_EXE_qperm");
    let run_all = || -> Option<BTreeMap<PathBuf, Vec<u8>>> {
        let mut artifacts = BTreeMap::new();
        for (args, files) in &runs {
            let status = Command::new(exe).args(args).args(["--seed", "11"]).output().ok()?.status;
            if status.code()? == 2 {
                return None;
            }
            for f in files {
                artifacts.insert(f.clone(), std::fs::read(f).ok()?);
            }
        }
        Some(artifacts)
    };
    let (Some(first), Some(second)) = (run_all(), run_all()) else {
        return verdict(false, "a command failed to run");
    };
    let differing: Vec<_> = first
        .iter()
        .filter(|(k, v)| second.get(*k) != Some(v))
        .map(|(k, _)| k.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    verdict(
        differing.is_empty() && first.len() == second.len(),
        format!(
            "{} commands, {} artifacts compared, {} differ{}",
            runs.len(),
            first.len(),
            differing.len(),
            if differing.is_empty() { String::new() } else { format!(": {}", differing.join(", ")) }
        ),
    )
}

type Criterion = (u8, &'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "entropy fixture", entropy_fixture),
        (2, "near-orthogonal fixture", near_orthogonal_fixture),
        (3, "cloning/generation equivalence sweep", equivalence_sweep),
        (4, "no-cloning baseline", no_cloning_baseline),
        (5, "constructed cloner soundness", cloner_soundness),
        (6, "no-deleting pipeline", deletion_pipeline),
        (7, "compression trends", schumacher_trends),
        (8, "cos(xi) monotonicity", cos_xi_monotonicity),
        (9, "overlap-dominance counterexample", overlap_dominance),
        (10, "teleportation", teleportation),
        (11, "ensemble indistinguishability", indistinguishability),
        (12, "CLI determinism", cli_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, check) in criteria {
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let note = if !v.pass && KNOWN_FAILING.contains(&id) { " (known)" } else { "" };
        println!("{tag} {id:>2} {name}: {}{note}", v.detail);
        if !v.pass && !KNOWN_FAILING.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: no unexpected failures");
    } else {
        println!("acceptance: unexpected failures in criteria {unexpected:?}");
        std::process::exit(1);
    }
}
