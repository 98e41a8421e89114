//! Acceptance criteria. Every test prints one `[PASS]` / `[FAIL]` line per
//! criterion (run with `--nocapture` to see them) and then asserts it.
//!
//! The Monte Carlo criteria use the default 27-point sigma_c2 grid, n = 2000,
//! alpha = 0.1 and `RUNS` replicates with common random numbers across
//! indicators.

use std::collections::BTreeSet;
use std::fs;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use indicator_sim::distributions::{RngState, UnitMeanLogNormal};
use indicator_sim::experiments::{
    sweep_figure1, sweep_figure3, sweep_world_runs, Executor, Preset, SweepSpec, WorldRuns,
    DEFAULT_MASTER_SEED,
};
use indicator_sim::metrics::{citation_scores, if_scores, AccuracySpec, HighValueSet, Indicator};
use indicator_sim::scenario::{
    breakdown, citation_selection_accuracy, if_selection_accuracy, DiscreteScenario, Rational,
};
use indicator_sim::simulation::{assign_journals, run_simulation, ModelParams};

/// Replicates per Monte Carlo cell (criteria 5-7 require at least 300).
const RUNS: usize = 400;
/// Slack, in standard errors, for the "at least as good" comparisons.
const SLACK_SE: f64 = 2.0;
/// Required margin, in paired standard errors, for strict wins (5b).
const WIN_SE: f64 = 2.0;
/// Per-point z bound for "statistically indistinguishable" across the 27
/// grid points and 3 pairs of m: two-sided Bonferroni at family level 0.04.
const INDISTINGUISHABLE_Z: f64 = 3.5;

const C: Indicator = Indicator::Citations;
const IF: Indicator = Indicator::ImpactFactor;
const H25: Indicator = Indicator::Hybrid { weight_if: 0.25 };
const H75: Indicator = Indicator::Hybrid { weight_if: 0.75 };

fn report(id: &str, what: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!(
        "[{tag}] criterion {id}: {what}{}",
        if detail.is_empty() {
            String::new()
        } else {
            format!(" -- {detail}")
        }
    );
}

fn check(id: &str, what: &str, failures: &[String]) {
    report(id, what, failures.is_empty(), &failures.join("; "));
    assert!(
        failures.is_empty(),
        "criterion {id} failed: {}",
        failures.join("; ")
    );
}

fn spec(sigma_r2_list: Vec<f64>, m_list: Vec<usize>) -> SweepSpec {
    SweepSpec {
        sigma_r2_list,
        m_list,
        runs: RUNS,
        ..SweepSpec::preset(Preset::Figure1)
    }
}

/// sigma_r2 in {0, 0.4, 1.6}, m = 20; pure and hybrid indicators on the same
/// worlds.
fn m20_worlds() -> &'static [WorldRuns] {
    static CACHE: OnceLock<Vec<WorldRuns>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let s = spec(vec![0.0, 0.4, 1.6], vec![20]);
        sweep_world_runs(&s, &[C, IF, H25, H75], &Executor::serial()).unwrap()
    })
}

fn m10_m40_worlds() -> &'static [WorldRuns] {
    static CACHE: OnceLock<Vec<WorldRuns>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let s = spec(vec![0.4], vec![10, 40]);
        sweep_world_runs(&s, &[C, IF], &Executor::serial()).unwrap()
    })
}

fn select(worlds: &[WorldRuns], sigma_r2: f64, m: usize) -> Vec<&WorldRuns> {
    let out: Vec<&WorldRuns> = worlds
        .iter()
        .filter(|w| w.world.sigma_r2 == sigma_r2 && w.world.m == m)
        .collect();
    assert_eq!(out.len(), 27);
    out
}

/// Failures where `a` falls short of `b` by more than `slack` paired stderrs.
fn not_below(
    worlds: &[&WorldRuns],
    a: Indicator,
    b: Indicator,
    min_c2: f64,
    slack: f64,
) -> Vec<String> {
    worlds
        .iter()
        .filter(|w| w.world.sigma_c2 >= min_c2)
        .filter_map(|w| {
            let (diff, se) = w.paired_difference(&a, &b);
            (diff < -slack * se).then(|| {
                format!(
                    "sigma_c2={:.2}: {a}-{b} = {diff:.3} (paired se {se:.3})",
                    w.world.sigma_c2
                )
            })
        })
        .collect()
}

fn elapsed_ok(id: &str, start: Instant, limit: Duration) -> Vec<String> {
    let t = start.elapsed();
    if t < limit {
        Vec::new()
    } else {
        vec![format!("criterion {id} took {t:?}, limit {limit:?}")]
    }
}

#[test]
fn criterion_1_scenario_exactness() {
    let start = Instant::now();
    let r = Rational::from_integer;
    let mut failures = Vec::new();
    for (name, s, totals, if_acc, cit_acc) in [
        (
            "scenario 1",
            DiscreteScenario::scenario_1(),
            (74, 26),
            80,
            90,
        ),
        (
            "scenario 2",
            DiscreteScenario::scenario_2(),
            (62, 38),
            80,
            70,
        ),
    ] {
        let b = breakdown(&s);
        let got = (
            b.journals[0].highly_cited_total(),
            b.journals[1].highly_cited_total(),
        );
        if got != (r(totals.0), r(totals.1)) {
            failures.push(format!("{name}: highly cited totals {}/{}", got.0, got.1));
        }
        let a = if_selection_accuracy(&s, 100).unwrap();
        if a != r(if_acc) {
            failures.push(format!("{name}: IF accuracy {a}"));
        }
        let c = citation_selection_accuracy(&s).unwrap();
        if c != r(cit_acc) {
            failures.push(format!("{name}: citation accuracy {c}"));
        }
    }
    failures.extend(elapsed_ok("1", start, Duration::from_millis(1)));
    check(
        "1",
        "scenario tables 74/26 80% 90% and 62/38 80% 70%, exact",
        &failures,
    );
}

#[test]
fn criterion_2_sampler_calibration() {
    let start = Instant::now();
    let d = UnitMeanLogNormal::new(1.3).unwrap();
    let mut rng = RngState::from_seed(DEFAULT_MASTER_SEED);
    let n = 1_000_000;
    let draws: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let logs: Vec<f64> = draws.iter().map(|x| x.ln()).collect();
    let log_mean = logs.iter().sum::<f64>() / n as f64;
    let log_var = logs.iter().map(|l| (l - log_mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let mut failures = Vec::new();
    if (mean - 1.0).abs() > 0.01 {
        failures.push(format!("mean {mean}"));
    }
    if (log_var - 1.3).abs() > 0.04 {
        failures.push(format!("log variance {log_var}"));
    }
    failures.extend(elapsed_ok("2", start, Duration::from_secs(5)));
    check(
        "2",
        &format!("1e6 logN(1.3) draws: mean {mean:.4}, log-variance {log_var:.4}"),
        &failures,
    );
}

#[test]
fn criterion_3_noiseless_sorting() {
    let start = Instant::now();
    let mut rng = RngState::from_seed(3);
    let shapes = [
        (2000, 20),
        (2000, 10),
        (2000, 40),
        (600, 6),
        (100, 100),
        (50, 1),
        (12, 4),
    ];
    let mut failures = Vec::new();
    for instance in 0..200 {
        let (n, m) = shapes[instance % shapes.len()];
        let sigma_v2 = 0.1 + 2.0 * rng.next_f64();
        let d = UnitMeanLogNormal::new(sigma_v2).unwrap();
        let values: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
        let distinct: BTreeSet<u64> = values.iter().map(|v| v.to_bits()).collect();
        assert_eq!(
            distinct.len(),
            n,
            "instance {instance} has duplicate values"
        );

        let params = ModelParams {
            n,
            m,
            sigma_v2,
            sigma_c2: 0.5,
            sigma_r2: 0.0,
            seed: instance as u64,
        };
        let got =
            assign_journals(&values, &params, &mut RngState::from_seed(instance as u64)).unwrap();

        let mut ids: Vec<usize> = (0..n).collect();
        ids.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
        let mut want = vec![0; n];
        for (rank, id) in ids.into_iter().enumerate() {
            want[id] = rank / (n / m) + 1;
        }
        if got != want {
            failures.push(format!("instance {instance} (n={n}, m={m})"));
        }
    }
    failures.extend(elapsed_ok("3", start, Duration::from_secs(5)));
    check(
        "3",
        "200 noiseless cascades equal the blocked descending sort",
        &failures,
    );
}

#[test]
fn criterion_4_one_article_journals() {
    let spec = AccuracySpec::new(0.1).unwrap();
    let mut failures = Vec::new();
    for run in 0..50u64 {
        let params = ModelParams {
            n: 2000,
            m: 2000,
            sigma_v2: 0.65,
            sigma_c2: 0.65,
            sigma_r2: 0.4,
            seed: DEFAULT_MASTER_SEED ^ run,
        };
        let out = run_simulation(&params).unwrap();
        let values: Vec<f64> = out.articles.iter().map(|a| a.value).collect();
        let high = HighValueSet::new(&values, &spec).unwrap();
        let by_if = high.accuracy_of(&if_scores(&out)).unwrap();
        let by_cit = high.accuracy_of(&citation_scores(&out)).unwrap();
        if by_if != by_cit {
            failures.push(format!("run {run}: IF {by_if} vs citations {by_cit}"));
        }
    }
    check(
        "4",
        "m = n = 2000: IF accuracy equals citation accuracy on all 50 runs",
        &failures,
    );
}

#[test]
fn criterion_5a_perfect_review_favours_if() {
    let worlds = select(m20_worlds(), 0.0, 20);
    let failures = not_below(&worlds, IF, C, 0.0, SLACK_SE);
    check(
        "5a",
        "sigma_r2 = 0: IF >= citations at every sigma_c2 (2 paired se)",
        &failures,
    );
}

#[test]
fn criterion_5b_crossover_at_moderate_review_noise() {
    let worlds = select(m20_worlds(), 0.4, 20);
    let at = |c2: f64| {
        *worlds
            .iter()
            .find(|w| (w.world.sigma_c2 - c2).abs() < 1e-9)
            .unwrap()
    };
    let mut failures = Vec::new();
    let (d_low, se_low) = at(0.1).paired_difference(&C, &IF);
    if d_low <= WIN_SE * se_low {
        failures.push(format!(
            "sigma_c2=0.1: citations-IF = {d_low:.3} (se {se_low:.3})"
        ));
    }
    let (d_high, se_high) = at(1.2).paired_difference(&IF, &C);
    if d_high <= WIN_SE * se_high {
        failures.push(format!(
            "sigma_c2=1.2: IF-citations = {d_high:.3} (se {se_high:.3})"
        ));
    }
    check(
        "5b",
        &format!(
            "sigma_r2 = 0.4: citations win at sigma_c2=0.1 by {d_low:.2} (se {se_low:.2}), IF wins at 1.2 by {d_high:.2} (se {se_high:.2})"
        ),
        &failures,
    );
}

#[test]
fn criterion_5c_noisy_review_favours_citations() {
    let worlds = select(m20_worlds(), 1.6, 20);
    let failures = not_below(&worlds, C, IF, 0.0, SLACK_SE);
    check(
        "5c",
        "sigma_r2 = 1.6: citations >= IF at every sigma_c2 (2 paired se)",
        &failures,
    );
}

#[test]
fn criterion_6_more_journals() {
    let m20 = select(m20_worlds(), 0.4, 20);
    let m10 = select(m10_m40_worlds(), 0.4, 10);
    let m40 = select(m10_m40_worlds(), 0.4, 40);
    let mut failures = Vec::new();
    for i in 0..27 {
        let c2 = m20[i].world.sigma_c2;
        let ladder = [m10[i], m20[i], m40[i]];
        for pair in ladder.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let se = lo.stderr(&IF).hypot(hi.stderr(&IF));
            let diff = hi.mean(&IF) - lo.mean(&IF);
            if diff < -SLACK_SE * se {
                failures.push(format!(
                    "IF sigma_c2={c2:.2}: m={} -> m={} changes by {diff:.3} (se {se:.3})",
                    lo.world.m, hi.world.m
                ));
            }
        }
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            let (a, b) = (ladder[a], ladder[b]);
            let se = a.stderr(&C).hypot(b.stderr(&C));
            let diff = a.mean(&C) - b.mean(&C);
            if (se > 0.0 && (diff / se).abs() > INDISTINGUISHABLE_Z) || (se == 0.0 && diff != 0.0) {
                failures.push(format!(
                    "citations sigma_c2={c2:.2}: m={} vs m={} differ by {diff:.3} (se {se:.3})",
                    a.world.m, b.world.m
                ));
            }
        }
    }
    check(
        "6",
        "sigma_r2 = 0.4: IF non-decreasing over m = 10, 20, 40 (2 se); citations indistinguishable across m",
        &failures,
    );
}

#[test]
fn criterion_7_hybrids() {
    let worlds = select(m20_worlds(), 0.4, 20);
    let h75 = not_below(&worlds, H75, IF, 0.0, SLACK_SE);
    let h25 = not_below(&worlds, H25, C, 0.3 - 1e-9, SLACK_SE);
    let verdict = |f: &[String]| if f.is_empty() { "holds" } else { "violated" };
    let what = format!(
        "hybrid 0.75 >= IF everywhere ({}); hybrid 0.25 >= citations for sigma_c2 >= 0.3 ({}) (2 paired se)",
        verdict(&h75),
        verdict(&h25)
    );
    check("7", &what, &[h75, h25].concat());
}

#[test]
fn criterion_8_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_indicator-sim"))
            .args([
                "sweep",
                "--preset",
                "fig1",
                "--runs",
                "50",
                "--workers",
                workers,
                "--out",
            ])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        fs::read(out).unwrap()
    };
    let first = sweep("a.csv", "1");
    let second = sweep("b.csv", "1");
    let parallel = sweep("c.csv", "8");
    let mut failures = Vec::new();
    if first != second {
        failures.push("repeat run differs".to_owned());
    }
    if first != parallel {
        failures.push("workers=8 differs from workers=1".to_owned());
    }
    if first.is_empty() {
        failures.push("empty csv".to_owned());
    }
    check(
        "8",
        "fig1 --runs 50 is byte-identical across repeats and worker counts",
        &failures,
    );
}

#[test]
fn criterion_9_hybrid_boundary_identities() {
    let s = SweepSpec {
        sigma_r2_list: vec![0.4],
        runs: 50,
        ..SweepSpec::preset(Preset::Figure3)
    };
    let hybrids = sweep_figure3(&s, &Executor::serial()).unwrap();
    let pure = sweep_figure1(&s, &Executor::serial()).unwrap();
    let mut failures = Vec::new();
    let mut compared = 0;
    for h in &hybrids {
        let target = match h.indicator {
            Indicator::Hybrid { weight_if: 0.0 } => C,
            Indicator::Hybrid { weight_if: 1.0 } => IF,
            _ => continue,
        };
        let p = pure
            .iter()
            .find(|p| p.indicator == target && p.sigma_c2 == h.sigma_c2)
            .unwrap();
        compared += 1;
        if (h.accuracy_mean, h.accuracy_stderr) != (p.accuracy_mean, p.accuracy_stderr) {
            failures.push(format!(
                "sigma_c2={:.2} {}: {} vs {}",
                h.sigma_c2, h.indicator, h.accuracy_mean, p.accuracy_mean
            ));
        }
    }
    assert_eq!(compared, 54);
    check(
        "9",
        "hybrid weights 0 and 1 reproduce the pure cells exactly (54 cells)",
        &failures,
    );
}
