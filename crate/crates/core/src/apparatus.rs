//! Optical transformations specific to the experiment: the primary 50/50
//! mixer with phase and mode-overlap knobs, trajectory attenuation, the
//! idealized two-photon absorber, and the unbalanced-interferometer Bell
//! stage.

use num_complex::Complex64;
use rand::Rng;

use crate::detection::{joint_click_probabilities_grouped, DetectorConfig};
use crate::error::{Result, SimError};
use crate::fock::{FockState, ModeLabel};
use crate::sources::{
    coherent_pulse, hom_bunch, pdc_pair_state, PulseTrainConfig, SourceParams,
};

/// Primary-mixer knobs. The coupler itself is a fixed 50/50 splitter; `phi`
/// is the relative source phase applied to the lower input and `overlap` the
/// mode overlap of the two interfering two-photon amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixerConfig {
    pub phi: f64,
    pub overlap: f64,
}

impl MixerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.overlap) {
            return Err(SimError::BadParameter {
                name: "overlap",
                value: self.overlap,
                range: "[0, 1]",
            });
        }
        if !self.phi.is_finite() {
            return Err(SimError::BadParameter { name: "phi", value: self.phi, range: "finite" });
        }
        Ok(())
    }
}

/// Joint output state of the primary mixer. Each physical port carries a
/// matched sub-mode and an orthogonal (distinguishable) sub-mode; a detector
/// on the port responds to their combined photon number.
#[derive(Clone, Debug)]
pub struct MixOutput {
    pub state: FockState,
    pub out_a: [ModeLabel; 2],
    pub out_b: [ModeLabel; 2],
}

/// Mix the upper (PDC) and lower (coherent) inputs on the primary 50/50
/// coupler.
///
/// The lower input is first split into a matched and an orthogonal component
/// with per-photon amplitudes sqrt(overlap) and i*sqrt(1-overlap), so the
/// interfering two-photon amplitude carries weight `overlap` — which is then
/// exactly the coincidence fringe visibility. The relative source phase is
/// applied as phi/2 per photon so that a two-photon amplitude advances by
/// phi; the coincidence rate then varies as cos(phi) with no offset.
pub fn primary_mix(
    upper: FockState,
    upper_in: &ModeLabel,
    lower: FockState,
    lower_in: &ModeLabel,
    cfg: &MixerConfig,
) -> Result<MixOutput> {
    cfg.validate()?;
    let mut joint = upper.tensor(&lower)?;
    joint.apply_phase(lower_in, cfg.phi / 2.0)?;

    let pulse = upper_in.pulse();
    let lower_ortho = ModeLabel::new(format!("{}-ortho", lower_in.path()), lower_in.pulse());
    let upper_ortho = ModeLabel::new(format!("{}-ortho", upper_in.path()), pulse);
    joint.add_vacuum_mode(lower_ortho.clone())?;
    joint.add_vacuum_mode(upper_ortho.clone())?;
    joint.apply_beam_splitter(lower_in, &lower_ortho, cfg.overlap, 0.0)?;

    // Matched components meet on the primary coupler; orthogonal components
    // pass an identical coupler with nothing to interfere with.
    joint.apply_beam_splitter(upper_in, lower_in, 0.5, 0.0)?;
    joint.apply_beam_splitter(&upper_ortho, &lower_ortho, 0.5, 0.0)?;

    let out_a = ModeLabel::new("out-A", pulse);
    let out_a_ortho = ModeLabel::new("out-A-ortho", pulse);
    let out_b = ModeLabel::new("out-B", pulse);
    let out_b_ortho = ModeLabel::new("out-B-ortho", pulse);
    joint.rename_mode(upper_in, out_a.clone())?;
    joint.rename_mode(&upper_ortho, out_a_ortho.clone())?;
    joint.rename_mode(lower_in, out_b.clone())?;
    joint.rename_mode(&lower_ortho, out_b_ortho.clone())?;

    Ok(MixOutput {
        state: joint,
        out_a: [out_a, out_a_ortho],
        out_b: [out_b, out_b_ortho],
    })
}

/// Scalar attenuation as a quantum trajectory: couple the mode to a fresh
/// ancilla on a beam splitter of transmissivity `transmission`, measure the
/// ancilla, and discard it.
pub fn attenuate<R: Rng + ?Sized>(
    state: &FockState,
    mode: &ModeLabel,
    transmission: f64,
    rng: &mut R,
) -> Result<FockState> {
    if !(0.0..=1.0).contains(&transmission) {
        return Err(SimError::BadParameter {
            name: "transmission",
            value: transmission,
            range: "[0, 1]",
        });
    }
    let ancilla = ModeLabel::new(format!("{}-loss", mode.path()), mode.pulse());
    let mut st = state.clone();
    st.add_vacuum_mode(ancilla.clone())?;
    st.apply_beam_splitter(mode, &ancilla, transmission, 0.0)?;
    let (_, mut collapsed, _) = st.measure_mode(&ancilla, rng)?;
    collapsed.remove_mode(&ancilla)?;
    Ok(collapsed)
}

/// Idealized two-photon absorber in the strong-absorption limit: every
/// amplitude with at least one photon in each detector group is removed, and
/// the survivor is renormalized. Returns the filtered state and the removed
/// probability mass.
pub fn idealized_tpa(
    joint: &FockState,
    group_a: &[ModeLabel],
    group_b: &[ModeLabel],
) -> Result<(FockState, f64)> {
    let ia = group_a
        .iter()
        .map(|m| joint.mode_index(m).ok_or_else(|| SimError::UnknownMode(m.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let ib = group_b
        .iter()
        .map(|m| joint.mode_index(m).ok_or_else(|| SimError::UnknownMode(m.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let total = joint.norm_sqr();
    let (kept, removed) = joint.filter_terms(|occ| {
        let na: u32 = ia.iter().map(|&i| occ[i]).sum();
        let nb: u32 = ib.iter().map(|&i| occ[i]).sum();
        na == 0 || nb == 0
    });
    let removed_mass = removed / total;
    let kept = kept.normalized().map_err(|_| SimError::ZeroState)?;
    Ok((kept, removed_mass))
}

/// Build the full photon-hole output for one pulse: PDC pair state, HOM
/// bunching into the upper port, weak coherent state into the lower port,
/// primary mixing. The idler-side HOM port stays in the state as a spectator.
pub fn photon_hole_pulse(sources: &SourceParams, pulse: u32, truncation: u32) -> Result<MixOutput> {
    sources.validate()?;
    let signal = ModeLabel::new("pdc-signal", pulse);
    let idler = ModeLabel::new("pdc-idler", pulse);
    let pdc = pdc_pair_state(sources.xi, signal.clone(), idler, truncation)?;
    let bunched = hom_bunch(pdc, &signal, &ModeLabel::new("pdc-idler", pulse))?;

    let laser = ModeLabel::new("laser", pulse);
    let coherent = coherent_pulse(sources.alpha, laser.clone(), truncation)?;

    primary_mix(
        bunched,
        &signal,
        coherent,
        &laser,
        &MixerConfig { phi: sources.phi, overlap: sources.overlap },
    )
}

/// Exact equal-time both-click probability of the mixer output at unit
/// efficiency and zero dark counts.
pub fn hole_coincidence_probability(
    alpha: Complex64,
    xi: f64,
    phi: f64,
    overlap: f64,
    truncation: u32,
) -> Result<f64> {
    let sources = SourceParams { alpha, xi, phi, overlap };
    let mix = photon_hole_pulse(&sources, 0, truncation)?;
    let det = DetectorConfig::ideal();
    let p = joint_click_probabilities_grouped(&mix.state, &mix.out_a, &mix.out_b, &det)?;
    Ok(p.both)
}

/// Both-click probability with the cross term switched off (overlap 0): the
/// incoherent sum of the two sources' coincidence contributions.
pub fn incoherent_baseline(alpha: Complex64, xi: f64, truncation: u32) -> Result<f64> {
    hole_coincidence_probability(alpha, xi, 0.0, 0.0, truncation)
}

/// Unbalanced-interferometer stage: path-length difference in whole pulse
/// periods and one local phase per side. Both couplers are fixed 50/50.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FransonConfig {
    pub delay_pulses: u32,
    pub phase_a: f64,
    pub phase_b: f64,
}

impl FransonConfig {
    pub fn validate(&self, train: &PulseTrainConfig) -> Result<()> {
        if self.delay_pulses == 0 || (self.delay_pulses as u64) >= train.n_pulses {
            return Err(SimError::BadDelay {
                delay: self.delay_pulses,
                n_pulses: train.n_pulses,
            });
        }
        if !self.phase_a.is_finite() || !self.phase_b.is_finite() {
            return Err(SimError::BadParameter {
                name: "interferometer phase",
                value: f64::NAN,
                range: "finite",
            });
        }
        Ok(())
    }
}

/// Calibrated coincidence fringe of the Bell stage:
/// R(phi_a, phi_b) = r0 * [1 - visibility * cos(phi_a - phi_b + phase_offset)].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FransonFringe {
    pub r0: f64,
    pub visibility: f64,
    pub phase_offset: f64,
}

/// Compute the fringe parameters from the exact single-pulse hole state.
///
/// With the pair coincidences suppressed by the holes, a cross-slot
/// coincidence behind the interferometers can only come from one background
/// photon per side taking opposite-length paths; the two path configurations
/// (A-short/B-long and A-long/B-short) interfere in the phase difference.
/// The fringe parameters follow from exactly computed quantities:
/// * visibility = hole depth, (baseline - p_both) / baseline, where baseline
///   is the incoherent (overlap 0) coincidence probability — complete
///   suppression gives V = 1, no suppression gives V = 0;
/// * r0 = p_A * p_B / 8: singles products through the per-path amplitude 1/2
///   of each interferometer, summed over the two path configurations;
/// * phase_offset from the interfering path amplitudes under the repo's
///   coupler convention (see below).
pub fn franson_fringe(
    sources: &SourceParams,
    f: &FransonConfig,
    train: &PulseTrainConfig,
) -> Result<FransonFringe> {
    train.validate()?;
    f.validate(train)?;
    if train.locked_phase_jitter != 0.0 {
        return Err(SimError::JitterUnsupported);
    }
    let truncation = crate::sources::DEFAULT_TRUNCATION;
    let mix = photon_hole_pulse(sources, 0, truncation)?;
    let det = DetectorConfig::ideal();
    let clicks = joint_click_probabilities_grouped(&mix.state, &mix.out_a, &mix.out_b, &det)?;
    let baseline = incoherent_baseline(sources.alpha, sources.xi, truncation)?;
    if baseline <= 0.0 {
        return Err(SimError::ZeroState);
    }
    let visibility = (baseline - clicks.both) / baseline;
    let r0 = clicks.p_a() * clicks.p_b() / 8.0;

    // Each interferometer hands its detector short-path amplitude
    // (1/sqrt2)(1/sqrt2) = 1/2 (two transmissions) and long-path amplitude
    // (i/sqrt2)(i/sqrt2) e^{i phase} = -e^{i phase}/2 (two reflections). The
    // A-long/B-short and A-short/B-long configurations of identical pulses
    // therefore interfere with cross product (long*short)(short*long)* — real
    // and positive — so the rate is maximal at phi_a = phi_b, and writing it
    // in the 1 - V*cos form puts the offset at pi.
    let t = Complex64::new(0.5f64.sqrt(), 0.0);
    let short_amp = t * t;
    let long_amp = (Complex64::i() * t) * (Complex64::i() * t);
    let cross = (long_amp * short_amp) * (short_amp * long_amp).conj();
    let phase_offset = std::f64::consts::PI + cross.arg();

    Ok(FransonFringe { r0, visibility, phase_offset })
}

/// Equal-time cross-slot both-click probability per pulse slot at the far
/// detectors, at the configured local phases.
pub fn franson_coincidence_rate(
    sources: &SourceParams,
    f: &FransonConfig,
    train: &PulseTrainConfig,
) -> Result<f64> {
    let fringe = franson_fringe(sources, f, train)?;
    Ok(fringe.r0
        * (1.0 - fringe.visibility * (f.phase_a - f.phase_b + fringe.phase_offset).cos()))
}

/// Locally optimal CHSH analyzer phases for a fringe with the given offset:
/// returns the four (phi_a, phi_b) setting pairs for
/// S = |E(1) - E(2) + E(3) + E(4)|, which reaches 2*sqrt(2)*V.
pub fn chsh_optimal_settings(phase_offset: f64) -> [(f64, f64); 4] {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    let a = 0.0;
    let a2 = FRAC_PI_2;
    let b = phase_offset + FRAC_PI_4;
    let b2 = b + FRAC_PI_2;
    [(a, b), (a, b2), (a2, b), (a2, b2)]
}

/// CHSH statistic from coincidence rates. Each correlation is estimated from
/// the four analyzer output ports (a port swap shifts the local phase by pi):
/// E = (R++ + R-- - R+- - R-+) / (sum), evaluated at all 16 phase
/// combinations, then S = |E1 - E2 + E3 + E4|.
pub fn chsh_s(
    sources: &SourceParams,
    f_base: &FransonConfig,
    train: &PulseTrainConfig,
    settings: [(f64, f64); 4],
) -> Result<f64> {
    let fringe = franson_fringe(sources, f_base, train)?;
    let rate = |pa: f64, pb: f64| {
        fringe.r0 * (1.0 - fringe.visibility * (pa - pb + fringe.phase_offset).cos())
    };
    let pi = std::f64::consts::PI;
    let mut es = [0.0f64; 4];
    for (i, &(pa, pb)) in settings.iter().enumerate() {
        let rpp = rate(pa, pb);
        let rpm = rate(pa, pb + pi);
        let rmp = rate(pa + pi, pb);
        let rmm = rate(pa + pi, pb + pi);
        let total = rpp + rpm + rmp + rmm;
        if total <= 0.0 {
            return Err(SimError::ZeroState);
        }
        es[i] = (rpp + rmm - rpm - rmp) / total;
    }
    Ok((es[0] - es[1] + es[2] + es[3]).abs())
}
