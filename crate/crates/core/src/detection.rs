//! Threshold click detectors and the start-stop coincidence histogram.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Result, SimError};
use crate::fock::{FockState, ModeLabel};
use crate::sources::PulseTrainConfig;

/// Non-number-resolving detector: efficiency, per-pulse-window dark-count
/// probability, and a Gaussian arrival-time smear used for histogram display.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorConfig {
    pub efficiency: f64,
    pub dark_prob: f64,
    pub jitter_sigma: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self { efficiency: 1.0, dark_prob: 0.0, jitter_sigma: 300e-12 }
    }
}

impl DetectorConfig {
    pub fn ideal() -> Self {
        Self { efficiency: 1.0, dark_prob: 0.0, jitter_sigma: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(SimError::BadParameter {
                name: "efficiency",
                value: self.efficiency,
                range: "[0, 1]",
            });
        }
        if !(0.0..=1.0).contains(&self.dark_prob) {
            return Err(SimError::BadParameter {
                name: "dark_prob",
                value: self.dark_prob,
                range: "[0, 1]",
            });
        }
        if !(self.jitter_sigma >= 0.0) {
            return Err(SimError::BadParameter {
                name: "jitter_sigma",
                value: self.jitter_sigma,
                range: "[0, inf)",
            });
        }
        Ok(())
    }

    /// Click probability on n incident photons:
    /// 1 - (1 - dark)(1 - efficiency)^n.
    pub fn click_prob(&self, n: u32) -> f64 {
        1.0 - (1.0 - self.dark_prob) * (1.0 - self.efficiency).powi(n as i32)
    }
}

/// Exact per-pulse joint click outcome probabilities for two detectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClickProbabilities {
    pub both: f64,
    pub a_only: f64,
    pub b_only: f64,
    pub none: f64,
}

impl ClickProbabilities {
    pub fn p_a(&self) -> f64 {
        self.both + self.a_only
    }

    pub fn p_b(&self) -> f64 {
        self.both + self.b_only
    }
}

/// Joint click probabilities for two single-mode detectors.
pub fn joint_click_probabilities(
    state: &FockState,
    mode_a: &ModeLabel,
    mode_b: &ModeLabel,
    det: &DetectorConfig,
) -> Result<ClickProbabilities> {
    joint_click_probabilities_grouped(
        state,
        std::slice::from_ref(mode_a),
        std::slice::from_ref(mode_b),
        det,
    )
}

/// Joint click probabilities when each detector spans a group of sub-modes
/// (it responds to the summed photon number of its group).
pub fn joint_click_probabilities_grouped(
    state: &FockState,
    group_a: &[ModeLabel],
    group_b: &[ModeLabel],
    det: &DetectorConfig,
) -> Result<ClickProbabilities> {
    det.validate()?;
    let joint = state.joint_number_distribution(group_a, group_b)?;
    let mut p = ClickProbabilities { both: 0.0, a_only: 0.0, b_only: 0.0, none: 0.0 };
    for (na, row) in joint.iter().enumerate() {
        let ca = det.click_prob(na as u32);
        for (nb, &w) in row.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let cb = det.click_prob(nb as u32);
            p.both += w * ca * cb;
            p.a_only += w * ca * (1.0 - cb);
            p.b_only += w * (1.0 - ca) * cb;
            p.none += w * (1.0 - ca) * (1.0 - cb);
        }
    }
    Ok(p)
}

/// Precomputed sampler for per-pulse click outcomes of one fixed state.
#[derive(Clone, Copy, Debug)]
pub struct PulseClickSampler {
    // Cumulative bounds of (both, a_only, b_only, none).
    cum_both: f64,
    cum_a: f64,
    cum_b: f64,
}

impl PulseClickSampler {
    pub fn new(
        state: &FockState,
        group_a: &[ModeLabel],
        group_b: &[ModeLabel],
        det: &DetectorConfig,
    ) -> Result<Self> {
        Ok(Self::from_probabilities(&joint_click_probabilities_grouped(
            state, group_a, group_b, det,
        )?))
    }

    pub fn from_probabilities(p: &ClickProbabilities) -> Self {
        Self {
            cum_both: p.both,
            cum_a: p.both + p.a_only,
            cum_b: p.both + p.a_only + p.b_only,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (bool, bool) {
        let u: f64 = rng.gen();
        if u < self.cum_both {
            (true, true)
        } else if u < self.cum_a {
            (true, false)
        } else if u < self.cum_b {
            (false, true)
        } else {
            (false, false)
        }
    }
}

/// One-shot sampled click pair for a single pulse.
pub fn sample_pulse_clicks<R: Rng + ?Sized>(
    state: &FockState,
    out_a: &ModeLabel,
    out_b: &ModeLabel,
    det: &DetectorConfig,
    rng: &mut R,
) -> Result<(bool, bool)> {
    let p = joint_click_probabilities(state, out_a, out_b, det)?;
    Ok(PulseClickSampler::from_probabilities(&p).sample(rng))
}

/// Binned counts of detection-time differences (stop minus start) over
/// [-window, +window]. Two histograms merge only with identical geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct TacHistogram {
    bin_width: f64,
    window: f64,
    counts: Vec<u64>,
    n_starts: u64,
}

impl TacHistogram {
    /// `bin_width` and `window` in seconds; bins must exactly tile
    /// [-window, +window].
    pub fn new(bin_width: f64, window: f64) -> Result<Self> {
        if !(bin_width > 0.0) || !(window > 0.0) {
            return Err(SimError::BadBinning { bin_width: bin_width * 1e9, window: window * 1e9 });
        }
        let ratio = 2.0 * window / bin_width;
        let n_bins = ratio.round();
        if n_bins < 1.0 || (ratio - n_bins).abs() > 1e-9 * ratio.max(1.0) {
            return Err(SimError::BadBinning { bin_width: bin_width * 1e9, window: window * 1e9 });
        }
        Ok(Self { bin_width, window, counts: vec![0; n_bins as usize], n_starts: 0 })
    }

    /// Rebuild from raw parts (used by the import path). Count vector length
    /// must match the bin geometry.
    pub fn from_parts(
        bin_width: f64,
        window: f64,
        counts: Vec<u64>,
        n_starts: u64,
    ) -> Result<Self> {
        let mut h = Self::new(bin_width, window)?;
        if counts.len() != h.counts.len() {
            return Err(SimError::Format(format!(
                "expected {} bins for this geometry, got {}",
                h.counts.len(),
                counts.len()
            )));
        }
        h.counts = counts;
        h.n_starts = n_starts;
        Ok(h)
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n_starts(&self) -> u64 {
        self.n_starts
    }

    pub fn add_starts(&mut self, n: u64) {
        self.n_starts += n;
    }

    /// Lower edge of bin i in seconds.
    pub fn bin_start(&self, i: usize) -> f64 {
        -self.window + i as f64 * self.bin_width
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        self.bin_start(i) + 0.5 * self.bin_width
    }

    pub fn total_counts(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Record one delay (seconds). Delays outside [-window, window) are
    /// silently dropped (bins are half-open on the right).
    pub fn record(&mut self, delay: f64) {
        let idx = ((delay + self.window) / self.bin_width).floor();
        if idx >= 0.0 && (idx as usize) < self.counts.len() {
            self.counts[idx as usize] += 1;
        }
    }

    /// Bin-wise addition; errors unless the bin geometry matches exactly.
    pub fn merge(&mut self, other: &TacHistogram) -> Result<()> {
        if self.bin_width != other.bin_width || self.window != other.window {
            return Err(SimError::HistogramMismatch);
        }
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        self.n_starts += other.n_starts;
        Ok(())
    }
}

/// Fold per-pulse click records into the histogram: every (A-click at pulse i,
/// B-click at pulse j) pair with |i-j| * T_rep <= window contributes one count
/// at (j-i) * T_rep plus per-click Gaussian jitter. Jitter is drawn in pulse
/// order, one draw per click, so results are deterministic for a given RNG
/// stream.
pub fn accumulate_coincidences<R: Rng + ?Sized>(
    events: &[(bool, bool)],
    train: &PulseTrainConfig,
    det: &DetectorConfig,
    hist: &mut TacHistogram,
    rng: &mut R,
) -> Result<()> {
    train.validate()?;
    det.validate()?;
    let period = train.period();
    let k_max = (hist.window() / period).floor() as i64;

    let normal = if det.jitter_sigma > 0.0 {
        Some(Normal::new(0.0, det.jitter_sigma).map_err(|e| {
            SimError::Format(format!("bad jitter distribution: {e}"))
        })?)
    } else {
        None
    };
    let draw = |rng: &mut R| normal.as_ref().map_or(0.0, |n| n.sample(rng));

    let mut starts: Vec<(i64, f64)> = Vec::new();
    let mut stops: Vec<(i64, f64)> = Vec::new();
    for (i, &(a, b)) in events.iter().enumerate() {
        if a {
            starts.push((i as i64, draw(rng)));
        }
        if b {
            stops.push((i as i64, draw(rng)));
        }
    }
    hist.add_starts(starts.len() as u64);

    // Two-pointer sweep: stops are sorted by pulse index.
    let mut lo = 0usize;
    for &(i, ja) in &starts {
        while lo < stops.len() && stops[lo].0 < i - k_max {
            lo += 1;
        }
        for &(j, jb) in stops[lo..].iter().take_while(|&&(j, _)| j <= i + k_max) {
            let delay = (j - i) as f64 * period + jb - ja;
            hist.record(delay);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockState;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair_state(occ_a: u32, occ_b: u32) -> (FockState, ModeLabel, ModeLabel) {
        let a = ModeLabel::new("a", 0);
        let b = ModeLabel::new("b", 0);
        let st = FockState::from_amplitudes(
            vec![a.clone(), b.clone()],
            4,
            &[(vec![occ_a, occ_b], Complex64::new(1.0, 0.0))],
        )
        .unwrap();
        (st, a, b)
    }

    #[test]
    fn vacuum_never_clicks_without_darks() {
        let (st, a, b) = pair_state(0, 0);
        let det = DetectorConfig::ideal();
        let p = joint_click_probabilities(&st, &a, &b, &det).unwrap();
        assert_eq!(p.both, 0.0);
        assert_eq!(p.none, 1.0);
    }

    #[test]
    fn perfect_detection_of_a_pair() {
        let (st, a, b) = pair_state(1, 1);
        let det = DetectorConfig::ideal();
        let p = joint_click_probabilities(&st, &a, &b, &det).unwrap();
        assert!((p.both - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_efficiency_thins_independently() {
        let (st, a, b) = pair_state(1, 1);
        let det = DetectorConfig { efficiency: 0.5, dark_prob: 0.0, jitter_sigma: 0.0 };
        let p = joint_click_probabilities(&st, &a, &b, &det).unwrap();
        for v in [p.both, p.a_only, p.b_only, p.none] {
            assert!((v - 0.25).abs() < 1e-12);
        }
        let total = p.both + p.a_only + p.b_only + p.none;
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dark_counts_or_with_photons() {
        let (st, a, b) = pair_state(0, 1);
        let det = DetectorConfig { efficiency: 1.0, dark_prob: 0.25, jitter_sigma: 0.0 };
        let p = joint_click_probabilities(&st, &a, &b, &det).unwrap();
        assert!((p.p_a() - 0.25).abs() < 1e-12);
        assert!((p.p_b() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampler_matches_probabilities() {
        let (st, a, b) = pair_state(1, 1);
        let det = DetectorConfig { efficiency: 0.5, dark_prob: 0.0, jitter_sigma: 0.0 };
        let sampler =
            PulseClickSampler::new(&st, &[a.clone()], &[b.clone()], &det).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let mut both = 0u64;
        for _ in 0..n {
            if sampler.sample(&mut rng) == (true, true) {
                both += 1;
            }
        }
        // 5 sigma around p = 0.25.
        let sigma = (0.25 * 0.75 / n as f64).sqrt();
        assert!((both as f64 / n as f64 - 0.25).abs() < 5.0 * sigma);
    }

    #[test]
    fn histogram_geometry_checks() {
        assert!(TacHistogram::new(0.5e-9, 45e-9).is_ok());
        assert!(matches!(
            TacHistogram::new(0.7e-9, 45e-9),
            Err(SimError::BadBinning { .. })
        ));
        let h = TacHistogram::new(0.5e-9, 45e-9).unwrap();
        assert_eq!(h.n_bins(), 180);
        assert!((h.bin_start(0) + 45e-9).abs() < 1e-18);
    }

    #[test]
    fn record_and_merge() {
        let mut h1 = TacHistogram::new(1e-9, 5e-9).unwrap();
        let mut h2 = TacHistogram::new(1e-9, 5e-9).unwrap();
        h1.record(0.1e-9);
        h2.record(0.1e-9);
        h2.record(-4.9e-9);
        h2.record(99e-9); // outside: dropped
        h1.add_starts(1);
        h2.add_starts(2);
        let mut merged = h1.clone();
        merged.merge(&h2).unwrap();
        assert_eq!(merged.total_counts(), 3);
        assert_eq!(merged.n_starts(), 3);

        let other_geom = TacHistogram::new(0.5e-9, 5e-9).unwrap();
        assert!(matches!(merged.merge(&other_geom), Err(SimError::HistogramMismatch)));
    }

    #[test]
    fn coincidences_land_on_pulse_grid() {
        let train = PulseTrainConfig { rep_rate_hz: 76e6, n_pulses: 6, locked_phase_jitter: 0.0 };
        let det = DetectorConfig { efficiency: 1.0, dark_prob: 0.0, jitter_sigma: 0.0 };
        let mut hist = TacHistogram::new(0.5e-9, 45e-9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // A clicks at pulses 0 and 2; B clicks at pulses 0 and 5.
        let events = [
            (true, true),
            (false, false),
            (true, false),
            (false, false),
            (false, false),
            (false, true),
        ];
        accumulate_coincidences(&events, &train, &det, &mut hist, &mut rng).unwrap();
        assert_eq!(hist.n_starts(), 2);
        // Pairs within |k| <= 3: (0,0) at delay 0, (2,0) at -2T, (2,5) at +3T.
        // (0,5) at +5T is outside the window.
        assert_eq!(hist.total_counts(), 3);
        let period = train.period();
        let expect_bins: Vec<usize> = [0.0, -2.0, 3.0]
            .iter()
            .map(|k| ((k * period + 45e-9) / 0.5e-9).floor() as usize)
            .collect();
        for bin in expect_bins {
            assert_eq!(hist.counts()[bin], 1, "missing count in bin {bin}");
        }
    }

    #[test]
    fn jitter_spreads_but_preserves_counts() {
        let train = PulseTrainConfig { rep_rate_hz: 76e6, n_pulses: 2000, locked_phase_jitter: 0.0 };
        let det = DetectorConfig { efficiency: 1.0, dark_prob: 0.0, jitter_sigma: 300e-12 };
        let mut hist = TacHistogram::new(0.5e-9, 45e-9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let events: Vec<(bool, bool)> = (0..2000).map(|i| (i % 10 == 0, i % 10 == 0)).collect();
        accumulate_coincidences(&events, &train, &det, &mut hist, &mut rng).unwrap();
        // 200 same-pulse pairs, all reachable; jitter never pushes a
        // zero-delay pair out of a +/-45 ns window.
        assert_eq!(hist.total_counts(), 200);
        // Smeared across more than one bin around zero delay; the combined
        // smear has sigma ~ 0.42 ns, so +-3 ns catches everything.
        let zero_bin = ((45e-9) / 0.5e-9) as usize;
        assert!(hist.counts()[zero_bin] < 200);
        let near: u64 = hist.counts()[zero_bin - 6..=zero_bin + 6].iter().sum();
        assert_eq!(near, 200);
    }
}
