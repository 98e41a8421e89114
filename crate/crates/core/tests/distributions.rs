use std::fs;
use std::path::PathBuf;

use indicator_sim::distributions::{
    derive_substream, sample_standard_normal, RngState, UnitMeanLogNormal,
};
use proptest::prelude::*;

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/draws_seed42.txt")
}

fn golden_draws() -> Vec<(String, f64)> {
    let mut rng = RngState::from_seed(42);
    let mut out: Vec<(String, f64)> = (0..4)
        .map(|i| (format!("normal[{i}]"), sample_standard_normal(&mut rng)))
        .collect();
    let d = UnitMeanLogNormal::new(1.3).unwrap();
    let mut rng = RngState::from_seed(42);
    out.extend((0..4).map(|i| (format!("lognormal_1.3[{i}]"), d.sample(&mut rng))));
    out
}

fn render(draws: &[(String, f64)]) -> String {
    draws
        .iter()
        .map(|(name, x)| format!("{name} {:016x} {x:?}\n", x.to_bits()))
        .collect()
}

/// Set `UPDATE_GOLDEN=1` to regenerate after an intentional stream change.
#[test]
fn seed_42_matches_golden_file() {
    let rendered = render(&golden_draws());
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(golden_path(), &rendered).unwrap();
    }
    let frozen = fs::read_to_string(golden_path()).expect("golden file missing");
    assert_eq!(rendered, frozen);
}

fn stats(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[test]
fn standard_normal_moments() {
    let mut rng = RngState::from_seed(2024);
    let xs: Vec<f64> = (0..1_000_000)
        .map(|_| sample_standard_normal(&mut rng))
        .collect();
    let (mean, var) = stats(&xs);
    assert!(mean.abs() < 0.01, "mean {mean}");
    assert!((var - 1.0).abs() < 0.02, "variance {var}");
}

#[test]
fn lognormal_mean_and_median() {
    let d = UnitMeanLogNormal::new(1.3).unwrap();
    let mut rng = RngState::from_seed(77);
    let mut xs: Vec<f64> = (0..1_000_000).map(|_| d.sample(&mut rng)).collect();
    let (mean, _) = stats(&xs);
    assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    xs.sort_by(f64::total_cmp);
    let median = (xs[499_999] + xs[500_000]) / 2.0;
    assert!((median - (-0.65f64).exp()).abs() < 0.01, "median {median}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lognormal_draws_positive_and_finite(sigma2 in 0.0f64..10.0, seed: u64) {
        let d = UnitMeanLogNormal::new(sigma2).unwrap();
        let mut rng = RngState::from_seed(seed);
        for _ in 0..1000 {
            let x = d.sample(&mut rng);
            prop_assert!(x > 0.0 && x.is_finite());
        }
    }

    #[test]
    fn replay_is_bit_identical(master: u64, run in 0u64..1_000_000) {
        let mut a = derive_substream(master, run);
        let mut b = derive_substream(master, run);
        for _ in 0..64 {
            prop_assert_eq!(sample_standard_normal(&mut a).to_bits(), sample_standard_normal(&mut b).to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn lognormal_mean_and_log_variance_converge(sigma2 in 0.1f64..1.3, seed: u64) {
        const N: usize = 100_000;
        let d = UnitMeanLogNormal::new(sigma2).unwrap();
        let mut rng = RngState::from_seed(seed);
        let xs: Vec<f64> = (0..N).map(|_| d.sample(&mut rng)).collect();
        let (mean, _) = stats(&xs);
        let stderr = ((sigma2.exp() - 1.0) / N as f64).sqrt();
        prop_assert!((mean - 1.0).abs() <= 6.0 * stderr, "mean {} stderr {}", mean, stderr);
        let logs: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let (_, log_var) = stats(&logs);
        prop_assert!((log_var - sigma2).abs() <= 0.05 * sigma2, "log variance {}", log_var);
    }
}
