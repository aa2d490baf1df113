//! Input states: the weak coherent pulse train and the bunched collinear PDC
//! pairs, phase-locked so their two-photon amplitudes can interfere.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Result, SimError};
use crate::fock::{FockState, ModeLabel};

/// Default per-mode photon-number cutoff. The sources are weak (|alpha|^2 ~
/// 0.04, xi ~ 0.04), but couplers can concentrate both inputs into one
/// output mode; a cutoff of 5 keeps the probability mass clipped by any
/// beam-splitter application below 1e-9.
pub const DEFAULT_TRUNCATION: u32 = 5;

/// Carrier phase of the coherent source relative to the PDC pump.
///
/// The bunched PDC pair enters the primary coupler with two-photon amplitude
/// i*xi/sqrt(2) (one reflection at the bunching coupler), while the coherent
/// two-photon amplitude is alpha^2/sqrt(2). Locking arg(alpha) to pi/4 makes
/// arg(alpha^2) = pi/2, so the two pair amplitudes are parallel and the
/// source phase knob phi alone moves them from cancellation (phi = pi) to
/// doubling (phi = 0).
pub const COHERENT_LOCK_PHASE: f64 = std::f64::consts::FRAC_PI_4;

/// Physical knobs of the two phase-locked sources feeding the primary coupler.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceParams {
    /// Coherent amplitude per pulse (lower input).
    pub alpha: Complex64,
    /// PDC pair amplitude per pulse (upper input, before bunching).
    pub xi: f64,
    /// Relative phase between the sources.
    pub phi: f64,
    /// Mode overlap of the two interfering two-photon amplitudes.
    pub overlap: f64,
}

impl SourceParams {
    pub fn validate(&self) -> Result<()> {
        let mean = self.alpha.norm_sqr();
        if !(0.0..=0.25).contains(&mean) || !mean.is_finite() {
            return Err(SimError::BadParameter {
                name: "alpha",
                value: self.alpha.norm(),
                range: "|alpha|^2 in [0, 0.25]",
            });
        }
        if !(0.0..=0.1).contains(&self.xi) {
            return Err(SimError::BadParameter { name: "xi", value: self.xi, range: "[0, 0.1]" });
        }
        if !self.phi.is_finite() {
            return Err(SimError::BadParameter { name: "phi", value: self.phi, range: "finite" });
        }
        if !(0.0..=1.0).contains(&self.overlap) {
            return Err(SimError::BadParameter {
                name: "overlap",
                value: self.overlap,
                range: "[0, 1]",
            });
        }
        Ok(())
    }
}

/// Pulse-train timing and phase stability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseTrainConfig {
    pub rep_rate_hz: f64,
    pub n_pulses: u64,
    /// Standard deviation of the pulse-to-pulse error in the source lock
    /// phase. Zero models a perfectly stable mode-locked laser.
    pub locked_phase_jitter: f64,
}

impl PulseTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rep_rate_hz > 0.0) || !self.rep_rate_hz.is_finite() {
            return Err(SimError::BadParameter {
                name: "rep_rate_hz",
                value: self.rep_rate_hz,
                range: "(0, inf)",
            });
        }
        if self.n_pulses == 0 {
            return Err(SimError::BadParameter {
                name: "n_pulses",
                value: 0.0,
                range: "[1, ...]",
            });
        }
        if !(self.locked_phase_jitter >= 0.0) {
            return Err(SimError::BadParameter {
                name: "locked_phase_jitter",
                value: self.locked_phase_jitter,
                range: "[0, inf)",
            });
        }
        Ok(())
    }

    /// Inter-pulse period in seconds.
    pub fn period(&self) -> f64 {
        1.0 / self.rep_rate_hz
    }
}

/// Truncated coherent state |alpha> on one mode, renormalized on the kept
/// occupations. Errors when the excluded tail mass exceeds 1e-8.
pub fn coherent_pulse(alpha: Complex64, mode: ModeLabel, truncation: u32) -> Result<FockState> {
    let mean_n = alpha.norm_sqr();
    let mut terms = Vec::with_capacity(truncation as usize + 1);
    let mut amp = Complex64::new((-mean_n / 2.0).exp(), 0.0);
    let mut kept_mass = 0.0;
    for n in 0..=truncation {
        if n > 0 {
            amp *= alpha / (n as f64).sqrt();
        }
        kept_mass += amp.norm_sqr();
        terms.push((vec![n], amp));
    }
    let tail = (1.0 - kept_mass).max(0.0);
    if tail > 1e-8 {
        return Err(SimError::CoherentTail { mean_n, truncation, tail });
    }
    FockState::from_amplitudes(vec![mode], truncation, &terms)?.normalized()
}

/// Weak two-mode squeezed vacuum kept to second order:
/// |0,0> + xi |1,1> + xi^2 |2,2>, normalized.
pub fn pdc_pair_state(
    xi: f64,
    signal: ModeLabel,
    idler: ModeLabel,
    truncation: u32,
) -> Result<FockState> {
    if !(0.0..=0.1).contains(&xi) {
        return Err(SimError::BadParameter { name: "xi", value: xi, range: "[0, 0.1]" });
    }
    let one = Complex64::new(1.0, 0.0);
    let terms = [
        (vec![0, 0], one),
        (vec![1, 1], one * xi),
        (vec![2, 2], one * xi * xi),
    ];
    FockState::from_amplitudes(vec![signal, idler], truncation, &terms)?.normalized()
}

/// 50/50 coupler on the PDC outputs: the Hong-Ou-Mandel effect bunches the
/// |1,1> component into (i/sqrt(2))(|2,0> + |0,2>).
pub fn hom_bunch(mut state: FockState, signal: &ModeLabel, idler: &ModeLabel) -> Result<FockState> {
    state.apply_beam_splitter(signal, idler, 0.5, 0.0)?;
    Ok(state)
}

/// Coherent amplitude whose two-photon component balances the bunched PDC
/// pair amplitude: the equal-time coincidence probability at phi = pi,
/// overlap 1 is minimized over the (real) magnitude, and the lock phase is
/// attached. To leading order |alpha|^2 = xi.
pub fn matched_alpha(xi: f64) -> Result<Complex64> {
    if !(0.0..=0.1).contains(&xi) {
        return Err(SimError::BadParameter { name: "xi", value: xi, range: "[0, 0.1]" });
    }
    if xi == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // Coincidence probability as a function of the coherent magnitude. A
    // higher cutoff keeps the bracket endpoints clear of the tail check.
    let objective = |r: f64| -> Result<f64> {
        let alpha = Complex64::from_polar(r, COHERENT_LOCK_PHASE);
        crate::apparatus::hole_coincidence_probability(alpha, xi, std::f64::consts::PI, 1.0, 6)
    };
    let sqrt_xi = xi.sqrt();
    let mut lo = 0.25 * sqrt_xi;
    let mut hi = (2.0 * sqrt_xi).min(0.5);
    // Golden-section search; the objective is smooth and unimodal on the
    // bracket (quartic-like in r around the matched point).
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    for _ in 0..90 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2)?;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let r = 0.5 * (lo + hi);
    Ok(Complex64::from_polar(r, COHERENT_LOCK_PHASE))
}

/// Per-pulse lock-phase errors; all zero for a perfectly stable train.
pub fn pulse_train_phases<R: Rng + ?Sized>(
    cfg: &PulseTrainConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let n = cfg.n_pulses as usize;
    if cfg.locked_phase_jitter == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let normal = Normal::new(0.0, cfg.locked_phase_jitter)
        .map_err(|e| SimError::Format(format!("bad jitter distribution: {e}")))?;
    Ok((0..n).map(|_| normal.sample(rng)).collect())
}
