//! Statistical agreement between the Monte Carlo sampler and the exact
//! probability calculus, bit-level determinism of sampled runs, and the
//! scaling behaviour of both modes.

use holesim::{phase_scan, run_scenario, ExperimentConfig, RunMode, Scenario, SimError};

fn cfg(scenario: Scenario, mode: RunMode, n_pulses: u64) -> ExperimentConfig {
    ExperimentConfig { scenario, mode, n_pulses, ..ExperimentConfig::default() }
}

/// Gaussian z-score of a Monte Carlo count against a Binomial expectation.
fn pull(observed: f64, expected_count: f64, n: f64) -> f64 {
    let p = expected_count / n;
    let sigma = (expected_count * (1.0 - p)).sqrt().max(1.0);
    (observed - expected_count) / sigma
}

#[test]
fn monte_carlo_matches_exact_expectations_within_five_sigma() {
    for scenario in [Scenario::Fig3a, Scenario::Fig3c, Scenario::Fig3d] {
        let n = 1_000_000u64;
        let exact = run_scenario(&cfg(scenario, RunMode::Exact, n)).unwrap().summary;
        let mc = run_scenario(&cfg(scenario, RunMode::MonteCarlo, n)).unwrap().summary;
        let nf = n as f64;

        let z_zero = pull(
            mc.zero_delay_peak.unwrap(),
            exact.zero_delay_peak.unwrap(),
            nf,
        );
        let z_sa = pull(mc.singles_a, exact.singles_a, nf);
        let z_sb = pull(mc.singles_b, exact.singles_b, nf);
        assert!(z_zero.abs() < 5.0, "{scenario}: zero-delay pull {z_zero:.2}");
        assert!(z_sa.abs() < 5.0, "{scenario}: singles-A pull {z_sa:.2}");
        assert!(z_sb.abs() < 5.0, "{scenario}: singles-B pull {z_sb:.2}");

        // Side peaks share clicks between pairings, so their mean is more
        // correlated than a Binomial count; allow a wider band.
        let z_side = pull(mc.mean_side_peak.unwrap(), exact.mean_side_peak.unwrap(), nf);
        assert!(z_side.abs() < 10.0, "{scenario}: side-peak pull {z_side:.2}");
    }
}

#[test]
fn sampled_runs_are_bit_identical_for_a_seed() {
    let c = cfg(Scenario::Fig3c, RunMode::MonteCarlo, 200_000);
    let r1 = run_scenario(&c).unwrap();
    let r2 = run_scenario(&c).unwrap();
    assert_eq!(r1, r2);

    // Strong phase jitter: enough to flip sampled clicks, not just nudge
    // probabilities below the resolution of the shared uniform draws.
    let mut jittered = c.clone();
    jittered.locked_phase_jitter = 0.8;
    let j1 = run_scenario(&jittered).unwrap();
    let j2 = run_scenario(&jittered).unwrap();
    assert_eq!(j1, j2);
    assert_ne!(j1, r1, "jittered run should differ from the locked run");

    let mut reseeded = c.clone();
    reseeded.seed = 1;
    assert_ne!(run_scenario(&reseeded).unwrap(), r1);

    let phis: Vec<f64> = (0..5).map(|i| i as f64).collect();
    let s1 = phase_scan(&cfg(Scenario::PhaseScan, RunMode::MonteCarlo, 100_000), &phis).unwrap();
    let s2 = phase_scan(&cfg(Scenario::PhaseScan, RunMode::MonteCarlo, 100_000), &phis).unwrap();
    assert_eq!(s1, s2);
}

/// Exact mode reports expectation values, so doubling the pulse count doubles
/// every count-like output exactly (multiplication by two is lossless).
#[test]
fn exact_mode_scales_exactly_linearly_in_pulse_count() {
    let base = run_scenario(&cfg(Scenario::Fig3c, RunMode::Exact, 500_000)).unwrap().summary;
    let doubled = run_scenario(&cfg(Scenario::Fig3c, RunMode::Exact, 1_000_000)).unwrap().summary;
    assert_eq!(doubled.zero_delay_peak.unwrap(), 2.0 * base.zero_delay_peak.unwrap());
    assert_eq!(doubled.mean_side_peak.unwrap(), 2.0 * base.mean_side_peak.unwrap());
    assert_eq!(doubled.singles_a, 2.0 * base.singles_a);
    assert_eq!(doubled.singles_b, 2.0 * base.singles_b);
    assert_eq!(doubled.visibility, base.visibility);
}

/// Monte Carlo counts scale linearly up to shot noise.
#[test]
fn monte_carlo_counts_scale_linearly_up_to_shot_noise() {
    let base = run_scenario(&cfg(Scenario::Fig3d, RunMode::MonteCarlo, 1_000_000))
        .unwrap()
        .summary;
    let doubled = run_scenario(&cfg(Scenario::Fig3d, RunMode::MonteCarlo, 2_000_000))
        .unwrap()
        .summary;
    let ratio = doubled.zero_delay_peak.unwrap() / base.zero_delay_peak.unwrap();
    assert!((1.7..2.3).contains(&ratio), "zero-delay ratio {ratio}");
    let singles_ratio = doubled.singles_a / base.singles_a;
    assert!((1.95..2.05).contains(&singles_ratio), "singles ratio {singles_ratio}");
}

/// With the photodetectors blinded (efficiency 0) and a dark-count
/// probability per gate, the histogram is a flat accidental floor: every
/// peak at expectation n * d^2, with no zero-delay suppression.
#[test]
fn dark_counts_alone_build_a_flat_accidental_floor() {
    let n = 1_000_000u64;
    let c = ExperimentConfig {
        scenario: Scenario::Fig3c,
        mode: RunMode::MonteCarlo,
        n_pulses: n,
        efficiency: 0.0,
        dark_prob: 0.01,
        ..ExperimentConfig::default()
    };
    let result = run_scenario(&c).unwrap();
    let hist = result.histogram.unwrap();
    let period = 1.0 / c.rep_rate_hz;
    let peaks = holesim::extract_peaks(&hist, period).unwrap();
    assert!(peaks.len() >= 7, "expected at least 7 peaks, got {}", peaks.len());
    for &(k, count) in &peaks {
        let expected = (n - k.unsigned_abs() as u64) as f64 * 0.01 * 0.01;
        let sigma = expected.sqrt();
        assert!(
            (count as f64 - expected).abs() < 5.0 * sigma,
            "peak {k}: {count} counts vs expectation {expected:.1}"
        );
    }
    // No dip at zero delay: the center peak sits at the same level.
    let center = peaks.iter().find(|&&(k, _)| k == 0).unwrap().1 as f64;
    let side_mean = peaks.iter().filter(|&&(k, _)| k != 0).map(|&(_, c)| c as f64).sum::<f64>()
        / (peaks.len() - 1) as f64;
    assert!((center / side_mean - 1.0).abs() < 0.1, "center {center} vs sides {side_mean}");
}

/// Exact mode has no per-pulse phase history to average over, so it refuses
/// configurations with a jittering source lock.
#[test]
fn exact_mode_rejects_phase_jitter() {
    let mut c = cfg(Scenario::Fig3c, RunMode::Exact, 1000);
    c.locked_phase_jitter = 0.05;
    match run_scenario(&c) {
        Err(SimError::JitterUnsupported) => {}
        other => panic!("expected JitterUnsupported, got {other:?}"),
    }
}
