//! Post-processing of simulated data: fringe fitting, visibility extraction,
//! photon-statistics diagnostics, and coincidence-histogram reduction.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::detection::TacHistogram;
use crate::error::{Result, SimError};

/// Least-squares fit of samples (x_i, y_i) to y = mean + amplitude*cos(x + phase).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FringeFit {
    pub mean: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub visibility: f64,
    pub residual_rms: f64,
}

/// Fit y = m + a*cos(x) + b*sin(x) by solving the 3x3 normal equations, then
/// report amplitude = sqrt(a^2+b^2) and phase with y = m + A*cos(x + phase).
///
/// Needs at least three distinct sample phases; with fewer the normal matrix
/// is singular and an error is returned.
pub fn fit_fringe(xs: &[f64], ys: &[f64]) -> Result<FringeFit> {
    if xs.len() != ys.len() {
        return Err(SimError::Format(format!(
            "fringe fit needs matching sample lengths, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(SimError::Format(format!(
            "fringe fit needs at least 3 samples, got {}",
            xs.len()
        )));
    }
    // Normal equations for the design matrix [1, cos x, sin x].
    let n = xs.len() as f64;
    let (mut sc, mut ss, mut scc, mut sss, mut scs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut sy, mut syc, mut sys) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (s, c) = x.sin_cos();
        sc += c;
        ss += s;
        scc += c * c;
        sss += s * s;
        scs += c * s;
        sy += y;
        syc += y * c;
        sys += y * s;
    }
    let m = [[n, sc, ss], [sc, scc, scs], [ss, scs, sss]];
    let rhs = [sy, syc, sys];
    let det3 = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(&m);
    let scale = n * scc.max(sss).max(1.0);
    if d.abs() < 1e-12 * scale {
        return Err(SimError::Format(
            "fringe fit is degenerate: sample phases do not span a fringe".into(),
        ));
    }
    let mut solved = [0.0f64; 3];
    for (k, out) in solved.iter_mut().enumerate() {
        let mut mk = m;
        for row in 0..3 {
            mk[row][k] = rhs[row];
        }
        *out = det3(&mk) / d;
    }
    let (mean, a, b) = (solved[0], solved[1], solved[2]);
    // y = m + a cos x + b sin x = m + A cos(x + phase) with A cos(phase) = a,
    // A sin(phase) = -b.
    let amplitude = a.hypot(b);
    let phase = (-b).atan2(a);
    let visibility = if mean.abs() > 0.0 { amplitude / mean } else { f64::INFINITY };
    let mut ssr = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (mean + a * x.cos() + b * x.sin());
        ssr += r * r;
    }
    let residual_rms = (ssr / n).sqrt();
    Ok(FringeFit { mean, amplitude, phase, visibility, residual_rms })
}

/// Map an angle to (-pi, pi].
pub fn normalize_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = x.rem_euclid(two_pi);
    if y > std::f64::consts::PI {
        y -= two_pi;
    }
    y
}

/// How a [`VisibilityReport`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VisibilityMethod {
    /// Ratio of two extremal values (constructive vs destructive run).
    PeakRatio,
    /// Amplitude/mean of a sinusoidal fit over a phase scan.
    FringeFit,
}

/// Interference contrast with the two extremal levels it was computed from.
/// For nonnegative inputs with `c_constructive >= c_destructive` the
/// visibility lies in [0, 1]; an inverted fringe yields a negative value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisibilityReport {
    pub c_constructive: f64,
    pub c_destructive: f64,
    pub visibility: f64,
    pub method: VisibilityMethod,
}

impl VisibilityReport {
    /// Contrast of a fitted fringe: the extremal levels are mean +-
    /// amplitude, so the visibility equals amplitude/mean.
    pub fn from_fringe_fit(fit: &FringeFit) -> Self {
        Self {
            c_constructive: fit.mean + fit.amplitude,
            c_destructive: fit.mean - fit.amplitude,
            visibility: fit.visibility,
            method: VisibilityMethod::FringeFit,
        }
    }
}

/// Michelson visibility from the constructive and destructive extreme
/// values: (c0 - cpi) / (c0 + cpi). Both values must be finite and
/// nonnegative and not both zero.
pub fn visibility_from_peaks(c_constructive: f64, c_destructive: f64) -> Result<VisibilityReport> {
    if !(c_constructive.is_finite() && c_destructive.is_finite())
        || c_constructive < 0.0
        || c_destructive < 0.0
        || c_constructive + c_destructive <= 0.0
    {
        return Err(SimError::Format(format!(
            "visibility needs finite nonnegative peaks, not both zero, got \
             constructive={c_constructive}, destructive={c_destructive}"
        )));
    }
    Ok(VisibilityReport {
        c_constructive,
        c_destructive,
        visibility: (c_constructive - c_destructive) / (c_constructive + c_destructive),
        method: VisibilityMethod::PeakRatio,
    })
}

/// Normalized zero-delay second-order coherence of a photon-number
/// distribution: g2 = <n(n-1)> / <n>^2.
pub fn g2_zero(dist: &[f64]) -> Result<f64> {
    let mean: f64 = dist.iter().enumerate().map(|(n, &p)| n as f64 * p).sum();
    if mean <= 0.0 {
        return Err(SimError::Format("g2 undefined for a zero-mean distribution".into()));
    }
    let pairs: f64 =
        dist.iter().enumerate().map(|(n, &p)| (n as f64) * (n as f64 - 1.0) * p).sum();
    Ok(pairs / (mean * mean))
}

/// Poisson probability mass function.
pub fn poisson_pmf(mean: f64, n: u32) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let mut log_p = -mean + n as f64 * mean.ln();
    for k in 1..=n {
        log_p -= (k as f64).ln();
    }
    log_p.exp()
}

/// Total variation distance between two probability vectors; the shorter one
/// is padded with zeros.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let mut tv = 0.0;
    for i in 0..len {
        let a = p.get(i).copied().unwrap_or(0.0);
        let b = q.get(i).copied().unwrap_or(0.0);
        tv += (a - b).abs();
    }
    tv / 2.0
}

/// p-value of a chi-square test of `counts` against a uniform expectation.
pub fn chi_square_uniform_pvalue(counts: &[u64]) -> Result<f64> {
    if counts.len() < 2 {
        return Err(SimError::Format("chi-square test needs at least 2 cells".into()));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(SimError::Format("chi-square test needs nonzero total counts".into()));
    }
    let expected = total as f64 / counts.len() as f64;
    let chi2: f64 =
        counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = (counts.len() - 1) as f64;
    let dist = ChiSquared::new(dof)
        .map_err(|e| SimError::Format(format!("chi-square setup failed: {e}")))?;
    Ok(1.0 - dist.cdf(chi2))
}

/// Sum histogram counts into peaks at integer multiples of `period_s`:
/// every bin is assigned to the nearest multiple k (by bin center), and the
/// sums are returned as (k, counts) ordered by k over the covered range.
pub fn extract_peaks(hist: &TacHistogram, period_s: f64) -> Result<Vec<(i32, u64)>> {
    if !(period_s.is_finite() && period_s > 0.0) {
        return Err(SimError::BadParameter {
            name: "period_s",
            value: period_s,
            range: "positive",
        });
    }
    let k_max = (hist.window() / period_s).floor() as i32;
    let mut peaks: Vec<(i32, u64)> = (-k_max..=k_max).map(|k| (k, 0)).collect();
    for (i, &c) in hist.counts().iter().enumerate() {
        let center = hist.bin_center(i);
        let k = (center / period_s).round() as i32;
        if k.abs() <= k_max {
            peaks[(k + k_max) as usize].1 += c;
        }
    }
    Ok(peaks)
}
