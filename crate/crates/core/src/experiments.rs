//! Scenario orchestration: wires sources, apparatus and detection into the
//! canonical runs (single-source calibrations, the two-source phase settings,
//! phase scans, the Bell stage, and the absorber/interference comparison),
//! in both Monte Carlo and exact-probability modes.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

use crate::analysis::{extract_peaks, fit_fringe, g2_zero, normalize_angle, poisson_pmf, total_variation};
use crate::apparatus::{
    chsh_optimal_settings, chsh_s, franson_coincidence_rate, franson_fringe,
    idealized_tpa, incoherent_baseline, photon_hole_pulse, FransonConfig, MixOutput,
};
use crate::detection::{
    accumulate_coincidences, joint_click_probabilities, joint_click_probabilities_grouped,
    ClickProbabilities, DetectorConfig, PulseClickSampler, TacHistogram,
};
use crate::error::{Result, SimError};
use crate::fock::ModeLabel;
use crate::sources::{
    coherent_pulse, matched_alpha, pulse_train_phases, PulseTrainConfig, SourceParams,
    COHERENT_LOCK_PHASE, DEFAULT_TRUNCATION,
};

/// Pulses per Monte Carlo batch; each batch gets its own counter-derived RNG
/// stream, so results are independent of thread scheduling.
const BATCH_PULSES: u64 = 65_536;
/// RNG stream reserved for detector arrival-time jitter.
const JITTER_STREAM: u64 = u64::MAX;
/// RNG stream reserved for per-pulse source lock-phase errors.
const PHASE_STREAM: u64 = u64::MAX - 1;

/// Named experiment wiring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// Coherent source only (pair source blocked).
    Fig3a,
    /// Pair source only (coherent source blocked).
    Fig3b,
    /// Both sources, destructive phase (photon holes).
    Fig3c,
    /// Both sources, constructive phase.
    Fig3d,
    /// Coincidence probability versus source phase; run via `phase_scan`.
    PhaseScan,
    /// Unbalanced-interferometer correlation test.
    Bell,
    /// Absorber route versus interference route; run via `tpa_compare`.
    TpaCompare,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Fig3a,
        Scenario::Fig3b,
        Scenario::Fig3c,
        Scenario::Fig3d,
        Scenario::PhaseScan,
        Scenario::Bell,
        Scenario::TpaCompare,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Fig3a => "fig3a",
            Scenario::Fig3b => "fig3b",
            Scenario::Fig3c => "fig3c",
            Scenario::Fig3d => "fig3d",
            Scenario::PhaseScan => "phase_scan",
            Scenario::Bell => "bell",
            Scenario::TpaCompare => "tpa_compare",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| SimError::Format(format!("unknown scenario `{s}`")))
    }
}

/// Whether to sample pulse-by-pulse or compute expectations directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    MonteCarlo,
    Exact,
}

impl RunMode {
    pub fn name(&self) -> &'static str {
        match self {
            RunMode::MonteCarlo => "monte_carlo",
            RunMode::Exact => "exact",
        }
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RunMode {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monte_carlo" => Ok(RunMode::MonteCarlo),
            "exact" => Ok(RunMode::Exact),
            other => Err(SimError::Format(format!("unknown mode `{other}`"))),
        }
    }
}

/// Complete run description. Fields mirror the config-file keys and keep
/// their units (degrees, nanoseconds); accessors convert to the internal
/// radian/second types. `alpha_mag` of `None` means "match the coherent
/// amplitude to the pair amplitude".
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub alpha_mag: Option<f64>,
    pub xi: f64,
    pub phase_deg: f64,
    pub overlap: f64,
    pub efficiency: f64,
    pub dark_prob: f64,
    pub rep_rate_hz: f64,
    pub n_pulses: u64,
    pub seed: u64,
    pub scenario: Scenario,
    pub mode: RunMode,
    pub bin_width_ns: f64,
    pub window_ns: f64,
    pub delay_pulses: u32,
    pub phase_a_deg: f64,
    pub phase_b_deg: f64,
    /// Pulse-to-pulse lock-phase error (radians std); not a config-file key.
    pub locked_phase_jitter: f64,
    /// Detector arrival-time smear (seconds std); not a config-file key.
    pub jitter_sigma: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alpha_mag: None,
            xi: 0.04,
            phase_deg: 180.0,
            overlap: 0.85,
            efficiency: 1.0,
            dark_prob: 0.0,
            rep_rate_hz: 76e6,
            n_pulses: 1_000_000,
            seed: 0,
            scenario: Scenario::Fig3c,
            mode: RunMode::MonteCarlo,
            bin_width_ns: 0.5,
            window_ns: 45.0,
            delay_pulses: 1,
            phase_a_deg: 0.0,
            phase_b_deg: 0.0,
            locked_phase_jitter: 0.0,
            jitter_sigma: 300e-12,
        }
    }
}

impl ExperimentConfig {
    /// Source parameters in internal units; the coherent amplitude is matched
    /// to `xi` when no explicit magnitude is set.
    pub fn source_params(&self) -> Result<SourceParams> {
        let alpha = match self.alpha_mag {
            Some(mag) => Complex64::from_polar(mag, COHERENT_LOCK_PHASE),
            None => matched_alpha(self.xi)?,
        };
        let params = SourceParams {
            alpha,
            xi: self.xi,
            phi: self.phase_deg.to_radians(),
            overlap: self.overlap,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn train(&self) -> PulseTrainConfig {
        PulseTrainConfig {
            rep_rate_hz: self.rep_rate_hz,
            n_pulses: self.n_pulses,
            locked_phase_jitter: self.locked_phase_jitter,
        }
    }

    pub fn detectors(&self) -> DetectorConfig {
        DetectorConfig {
            efficiency: self.efficiency,
            dark_prob: self.dark_prob,
            jitter_sigma: self.jitter_sigma,
        }
    }

    pub fn franson(&self) -> FransonConfig {
        FransonConfig {
            delay_pulses: self.delay_pulses,
            phase_a: self.phase_a_deg.to_radians(),
            phase_b: self.phase_b_deg.to_radians(),
        }
    }

    pub fn histogram(&self) -> Result<TacHistogram> {
        TacHistogram::new(self.bin_width_ns * 1e-9, self.window_ns * 1e-9)
    }
}

/// Headline numbers of a run. Counts are realized counts in Monte Carlo mode
/// and expected counts in exact mode; fields not produced by a scenario stay
/// `None`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub visibility: Option<f64>,
    pub chsh_s: Option<f64>,
    pub singles_a: f64,
    pub singles_b: f64,
    pub zero_delay_peak: Option<f64>,
    pub mean_side_peak: Option<f64>,
}

/// Everything a scenario run produces.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub mode: RunMode,
    /// Coincidence histogram (Monte Carlo TAC scenarios only).
    pub histogram: Option<TacHistogram>,
    /// Per-pulse click probabilities of the prepared state.
    pub exact: Option<ClickProbabilities>,
    pub summary: Summary,
}

/// Source parameters with the scenario's blocking/phase overrides applied.
/// The matched amplitude is resolved against the configured pair amplitude
/// before any blocking, so single-source calibration runs stay comparable to
/// the two-source runs.
fn effective_sources(cfg: &ExperimentConfig) -> Result<SourceParams> {
    let mut s = cfg.source_params()?;
    match cfg.scenario {
        Scenario::Fig3a => s.xi = 0.0,
        Scenario::Fig3b => s.alpha = Complex64::new(0.0, 0.0),
        Scenario::Fig3c => s.phi = std::f64::consts::PI,
        Scenario::Fig3d => s.phi = 0.0,
        _ => {}
    }
    Ok(s)
}

/// Per-pulse click-outcome probabilities as a trigonometric polynomial in the
/// source phase. Photons from the pair source always arrive in pairs, so
/// interference terms carry even powers of e^{i phi/2}: the three click
/// channels are exactly degree-2 trigonometric polynomials in phi, and eight
/// equally spaced samples determine them exactly.
struct ClickFringeModel {
    // For each of (both, a_only, b_only): [c0, a1, b1, a2, b2].
    coeffs: [[f64; 5]; 3],
}

impl ClickFringeModel {
    fn build(base: &SourceParams, det: &DetectorConfig, truncation: u32) -> Result<Self> {
        const N: usize = 8;
        let mut samples = [[0.0f64; N]; 3];
        for m in 0..N {
            let phi = 2.0 * std::f64::consts::PI * m as f64 / N as f64;
            let s = SourceParams { phi, ..*base };
            let mix = photon_hole_pulse(&s, 0, truncation)?;
            let p = joint_click_probabilities_grouped(&mix.state, &mix.out_a, &mix.out_b, det)?;
            samples[0][m] = p.both;
            samples[1][m] = p.a_only;
            samples[2][m] = p.b_only;
        }
        let mut coeffs = [[0.0f64; 5]; 3];
        for (ch, sample) in samples.iter().enumerate() {
            coeffs[ch][0] = sample.iter().sum::<f64>() / N as f64;
            for k in 1..=2usize {
                let (mut a, mut b) = (0.0, 0.0);
                for (m, &y) in sample.iter().enumerate() {
                    let ang = 2.0 * std::f64::consts::PI * (k * m) as f64 / N as f64;
                    a += y * ang.cos();
                    b += y * ang.sin();
                }
                coeffs[ch][2 * k - 1] = 2.0 * a / N as f64;
                coeffs[ch][2 * k] = 2.0 * b / N as f64;
            }
        }
        Ok(Self { coeffs })
    }

    fn channel(&self, ch: usize, phi: f64) -> f64 {
        let c = &self.coeffs[ch];
        c[0] + c[1] * phi.cos() + c[2] * phi.sin()
            + c[3] * (2.0 * phi).cos() + c[4] * (2.0 * phi).sin()
    }

    fn probabilities(&self, phi: f64) -> ClickProbabilities {
        let mut both = self.channel(0, phi).max(0.0);
        let mut a_only = self.channel(1, phi).max(0.0);
        let mut b_only = self.channel(2, phi).max(0.0);
        let sum = both + a_only + b_only;
        if sum > 1.0 {
            both /= sum;
            a_only /= sum;
            b_only /= sum;
        }
        ClickProbabilities { both, a_only, b_only, none: 1.0 - (both + a_only + b_only) }
    }
}

/// Sample the per-pulse click stream in parallel batches. Batch `b` uses RNG
/// stream `b` of the run seed, so the event stream is a pure function of
/// (config, seed) regardless of thread count.
fn sample_event_stream(
    n_pulses: u64,
    seed: u64,
    sampler_for: impl Fn(u64) -> PulseClickSampler + Sync,
) -> Vec<(bool, bool)> {
    let n_batches = (n_pulses + BATCH_PULSES - 1) / BATCH_PULSES;
    let chunks: Vec<Vec<(bool, bool)>> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let start = b * BATCH_PULSES;
            let count = BATCH_PULSES.min(n_pulses - start);
            (0..count).map(|i| sampler_for(start + i).sample(&mut rng)).collect()
        })
        .collect();
    chunks.concat()
}

/// Generate the full Monte Carlo event stream for one prepared pulse state.
fn monte_carlo_events(
    cfg: &ExperimentConfig,
    sources: &SourceParams,
    det: &DetectorConfig,
) -> Result<Vec<(bool, bool)>> {
    let train = cfg.train();
    train.validate()?;
    if train.locked_phase_jitter == 0.0 {
        let mix = photon_hole_pulse(sources, 0, DEFAULT_TRUNCATION)?;
        let sampler = PulseClickSampler::new(&mix.state, &mix.out_a, &mix.out_b, det)?;
        Ok(sample_event_stream(train.n_pulses, cfg.seed, |_| sampler))
    } else {
        let model = ClickFringeModel::build(sources, det, DEFAULT_TRUNCATION)?;
        let mut phase_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        phase_rng.set_stream(PHASE_STREAM);
        let errors = pulse_train_phases(&train, &mut phase_rng)?;
        let base = sources.phi;
        Ok(sample_event_stream(train.n_pulses, cfg.seed, |i| {
            let p = model.probabilities(base + errors[i as usize]);
            PulseClickSampler::from_probabilities(&p)
        }))
    }
}

fn exact_summary(n_pulses: u64, p: &ClickProbabilities) -> Summary {
    let n = n_pulses as f64;
    Summary {
        visibility: None,
        chsh_s: None,
        singles_a: n * p.p_a(),
        singles_b: n * p.p_b(),
        zero_delay_peak: Some(n * p.both),
        mean_side_peak: Some(n * p.p_a() * p.p_b()),
    }
}

fn run_tac_scenario(cfg: &ExperimentConfig, sources: &SourceParams) -> Result<ScenarioResult> {
    sources.validate()?;
    let det = cfg.detectors();
    det.validate()?;
    let train = cfg.train();
    train.validate()?;

    match cfg.mode {
        RunMode::Exact => {
            if train.locked_phase_jitter != 0.0 {
                return Err(SimError::JitterUnsupported);
            }
            let mix = photon_hole_pulse(sources, 0, DEFAULT_TRUNCATION)?;
            let p = joint_click_probabilities_grouped(&mix.state, &mix.out_a, &mix.out_b, &det)?;
            Ok(ScenarioResult {
                scenario: cfg.scenario,
                mode: cfg.mode,
                histogram: None,
                exact: Some(p),
                summary: exact_summary(train.n_pulses, &p),
            })
        }
        RunMode::MonteCarlo => {
            let events = monte_carlo_events(cfg, sources, &det)?;
            let mut hist = cfg.histogram()?;
            let mut jitter_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            jitter_rng.set_stream(JITTER_STREAM);
            accumulate_coincidences(&events, &train, &det, &mut hist, &mut jitter_rng)?;

            let peaks = extract_peaks(&hist, train.period())?;
            let zero = peaks
                .iter()
                .find(|&&(k, _)| k == 0)
                .map(|&(_, c)| c as f64)
                .unwrap_or(0.0);
            let sides: Vec<u64> =
                peaks.iter().filter(|&&(k, _)| k != 0).map(|&(_, c)| c).collect();
            let mean_side = if sides.is_empty() {
                None
            } else {
                Some(sides.iter().sum::<u64>() as f64 / sides.len() as f64)
            };
            let singles_a = events.iter().filter(|e| e.0).count() as f64;
            let singles_b = events.iter().filter(|e| e.1).count() as f64;
            Ok(ScenarioResult {
                scenario: cfg.scenario,
                mode: cfg.mode,
                histogram: Some(hist),
                exact: None,
                summary: Summary {
                    visibility: None,
                    chsh_s: None,
                    singles_a,
                    singles_b,
                    zero_delay_peak: Some(zero),
                    mean_side_peak: mean_side,
                },
            })
        }
    }
}

/// Run the Bell-stage scenario: compute the coincidence fringe exactly,
/// calibrate the convention-dependent fringe offset from a 16-point phase
/// scan, and evaluate the CHSH statistic at the locally optimal settings.
/// The fringe law is an exact amplitude computation, so the result does not
/// depend on the sampling mode.
fn run_bell_scenario(cfg: &ExperimentConfig, sources: &SourceParams) -> Result<ScenarioResult> {
    let train = cfg.train();
    let f = cfg.franson();
    let fringe = franson_fringe(sources, &f, &train)?;

    const POINTS: usize = 16;
    let deltas: Vec<f64> = (0..POINTS)
        .map(|i| 2.0 * std::f64::consts::PI * i as f64 / POINTS as f64)
        .collect();
    let rates = deltas
        .iter()
        .map(|&d| {
            let setting = FransonConfig { phase_a: d, phase_b: 0.0, ..f };
            franson_coincidence_rate(sources, &setting, &train)
        })
        .collect::<Result<Vec<f64>>>()?;
    let fit = fit_fringe(&deltas, &rates)?;
    // rate = r0 - r0 V cos(delta + phi0) fits as amplitude r0 V at phase
    // phi0 + pi; undo the sign flip to recover the calibrated offset.
    let phi0 = normalize_angle(fit.phase + std::f64::consts::PI);
    let visibility = if fringe.visibility > 0.0 { fit.visibility } else { 0.0 };
    let s = chsh_s(sources, &f, &train, chsh_optimal_settings(phi0))?;

    let mix = photon_hole_pulse(sources, 0, DEFAULT_TRUNCATION)?;
    let det = cfg.detectors();
    let p = joint_click_probabilities_grouped(&mix.state, &mix.out_a, &mix.out_b, &det)?;
    let n = train.n_pulses as f64;
    Ok(ScenarioResult {
        scenario: cfg.scenario,
        mode: cfg.mode,
        histogram: None,
        exact: Some(p),
        summary: Summary {
            visibility: Some(visibility),
            chsh_s: Some(s),
            singles_a: n * p.p_a(),
            singles_b: n * p.p_b(),
            zero_delay_peak: None,
            mean_side_peak: None,
        },
    })
}

/// Run the configured scenario. Results are a pure function of the config
/// (including the seed); scan and comparison scenarios have dedicated entry
/// points with richer return types.
pub fn run_scenario(cfg: &ExperimentConfig) -> Result<ScenarioResult> {
    let sources = effective_sources(cfg)?;
    match cfg.scenario {
        Scenario::Fig3a | Scenario::Fig3b | Scenario::Fig3c | Scenario::Fig3d => {
            run_tac_scenario(cfg, &sources)
        }
        Scenario::Bell => run_bell_scenario(cfg, &sources),
        Scenario::PhaseScan => Err(SimError::WrongEntryPoint("phase_scan", "phase_scan()")),
        Scenario::TpaCompare => Err(SimError::WrongEntryPoint("tpa_compare", "tpa_compare()")),
    }
}

/// Both-click probability (exact) or frequency (Monte Carlo) at each source
/// phase. Monte Carlo points run on decorrelated sub-seeds of the run seed.
pub fn phase_scan(cfg: &ExperimentConfig, phis: &[f64]) -> Result<Vec<(f64, f64)>> {
    if phis.is_empty() {
        return Err(SimError::Format("phase scan needs at least one phase".into()));
    }
    let base = cfg.source_params()?;
    let det = cfg.detectors();
    det.validate()?;
    match cfg.mode {
        RunMode::Exact => {
            if cfg.locked_phase_jitter != 0.0 {
                return Err(SimError::JitterUnsupported);
            }
            phis.par_iter()
                .map(|&phi| {
                    let s = SourceParams { phi, ..base };
                    let mix = photon_hole_pulse(&s, 0, DEFAULT_TRUNCATION)?;
                    let p = joint_click_probabilities_grouped(
                        &mix.state, &mix.out_a, &mix.out_b, &det,
                    )?;
                    Ok((phi, p.both))
                })
                .collect()
        }
        RunMode::MonteCarlo => {
            let train = cfg.train();
            train.validate()?;
            phis.iter()
                .enumerate()
                .map(|(i, &phi)| {
                    let point_cfg = ExperimentConfig {
                        seed: cfg
                            .seed
                            .wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
                        ..cfg.clone()
                    };
                    let s = SourceParams { phi, ..base };
                    let events = monte_carlo_events(&point_cfg, &s, &det)?;
                    let both = events.iter().filter(|e| e.0 && e.1).count() as f64;
                    Ok((phi, both / train.n_pulses as f64))
                })
                .collect()
        }
    }
}

/// Exact diagnostics of one beam: occupation distribution, its mean, the
/// normalized pair correlation, and the distance to a Poisson law of the
/// same mean.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamReport {
    pub marginal: Vec<f64>,
    pub mean: f64,
    pub g2: f64,
    pub tv_poisson: f64,
}

impl BeamReport {
    fn from_marginal(marginal: Vec<f64>) -> Result<Self> {
        let mean: f64 = marginal.iter().enumerate().map(|(n, &p)| n as f64 * p).sum();
        let g2 = g2_zero(&marginal)?;
        let poisson: Vec<f64> =
            (0..marginal.len() as u32).map(|n| poisson_pmf(mean, n)).collect();
        let tv_poisson = total_variation(&marginal, &poisson);
        Ok(Self { marginal, mean, g2, tv_poisson })
    }
}

/// One generation route of the comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct RouteReport {
    pub p_both: f64,
    pub beam_a: BeamReport,
    pub beam_b: BeamReport,
}

/// Side-by-side report of the two photon-hole generation routes.
#[derive(Clone, Debug, PartialEq)]
pub struct TpaComparison {
    pub interference: RouteReport,
    pub absorber: RouteReport,
    /// Incoherent (overlap 0) coincidence probability of the interference
    /// route's sources — the common suppression reference.
    pub baseline_p_both: f64,
    /// Probability mass the absorber removed from its input.
    pub removed_mass: f64,
    /// Total-variation distances between the routes' beam marginals.
    pub marginal_tv_a: f64,
    pub marginal_tv_b: f64,
}

/// Compare the interference route against the idealized-absorber route on
/// matched inputs: the absorber route feeds two coherent beams whose means
/// equal the interference route's output beam means, so the output marginals
/// are directly comparable.
pub fn tpa_compare(cfg: &ExperimentConfig) -> Result<TpaComparison> {
    let sources = cfg.source_params()?;
    sources.validate()?;
    let det = cfg.detectors();
    det.validate()?;
    let truncation = DEFAULT_TRUNCATION;

    let mix = photon_hole_pulse(&sources, 0, truncation)?;
    let p_int = joint_click_probabilities_grouped(&mix.state, &mix.out_a, &mix.out_b, &det)?;
    let interference = RouteReport {
        p_both: p_int.both,
        beam_a: BeamReport::from_marginal(mix.state.number_distribution_grouped(&mix.out_a)?)?,
        beam_b: BeamReport::from_marginal(mix.state.number_distribution_grouped(&mix.out_b)?)?,
    };

    let mode_a = ModeLabel::new("beam-A", 0);
    let mode_b = ModeLabel::new("beam-B", 0);
    let in_a = coherent_pulse(
        Complex64::new(interference.beam_a.mean.sqrt(), 0.0),
        mode_a.clone(),
        truncation,
    )?;
    let in_b = coherent_pulse(
        Complex64::new(interference.beam_b.mean.sqrt(), 0.0),
        mode_b.clone(),
        truncation,
    )?;
    let joint = in_a.tensor(&in_b)?;
    let (filtered, removed_mass) = idealized_tpa(
        &joint,
        std::slice::from_ref(&mode_a),
        std::slice::from_ref(&mode_b),
    )?;
    let p_tpa = joint_click_probabilities(&filtered, &mode_a, &mode_b, &det)?;
    let absorber = RouteReport {
        p_both: p_tpa.both,
        beam_a: BeamReport::from_marginal(filtered.number_distribution(&mode_a)?)?,
        beam_b: BeamReport::from_marginal(filtered.number_distribution(&mode_b)?)?,
    };

    let baseline_p_both = incoherent_baseline(sources.alpha, sources.xi, truncation)?;
    let marginal_tv_a =
        total_variation(&interference.beam_a.marginal, &absorber.beam_a.marginal);
    let marginal_tv_b =
        total_variation(&interference.beam_b.marginal, &absorber.beam_b.marginal);
    Ok(TpaComparison {
        interference,
        absorber,
        baseline_p_both,
        removed_mass,
        marginal_tv_a,
        marginal_tv_b,
    })
}

/// Convenience used by diagnostics and tests: the prepared single-pulse mix
/// for a config's effective sources.
pub fn prepared_pulse(cfg: &ExperimentConfig) -> Result<MixOutput> {
    let sources = effective_sources(cfg)?;
    photon_hole_pulse(&sources, 0, DEFAULT_TRUNCATION)
}
