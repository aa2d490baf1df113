//! Sparse state algebra on a truncated multimode bosonic Hilbert space.
//!
//! States are complex amplitude maps over occupation vectors of a small set of
//! labeled modes. Occupations are packed four bits per mode into a `u128`, so a
//! state can hold at most [`MODE_CAP`] modes and the per-mode cutoff is capped
//! at [`MAX_TRUNCATION`] (beam-splitter expansion temporarily doubles an
//! occupation, and 2 * 7 still fits in a nibble).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, SimError};

/// Maximum number of modes a single state can carry.
pub const MODE_CAP: usize = 32;
/// Largest supported per-mode photon-number cutoff.
pub const MAX_TRUNCATION: u32 = 7;
/// Clipped probability mass above this bound is an error rather than silent loss.
pub const OVERFLOW_TOLERANCE: f64 = 1e-9;
/// Amplitudes smaller than this in magnitude are dropped from the sparse map.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

const BITS_PER_MODE: u32 = 4;
const OCC_MASK: u128 = 0xF;

/// A bosonic mode, identified by a path name and the pulse of the train it
/// belongs to. Displayed as `path@pulse`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeLabel {
    path: String,
    pulse: u32,
}

impl ModeLabel {
    pub fn new(path: impl Into<String>, pulse: u32) -> Self {
        Self { path: path.into(), pulse }
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn pulse(&self) -> u32 {
        self.pulse
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.path, self.pulse)
    }
}

fn occ_of(key: u128, idx: usize) -> u32 {
    ((key >> (BITS_PER_MODE as usize * idx)) & OCC_MASK) as u32
}

fn with_occ(key: u128, idx: usize, n: u32) -> u128 {
    let shift = BITS_PER_MODE as usize * idx;
    (key & !(OCC_MASK << shift)) | ((n as u128) << shift)
}

fn binomial(n: u32, k: u32) -> f64 {
    // n <= 14 here, so u64 arithmetic is exact.
    let mut acc: u64 = 1;
    for i in 0..k as u64 {
        acc = acc * (n as u64 - i) / (i + 1);
    }
    acc as f64
}

fn sqrt_factorial(n: u32) -> f64 {
    let mut acc = 1.0f64;
    for i in 2..=n as u64 {
        acc *= i as f64;
    }
    acc.sqrt()
}

/// Pure state over labeled modes with a shared photon-number cutoff.
#[derive(Clone, Debug)]
pub struct FockState {
    modes: Vec<ModeLabel>,
    truncation: u32,
    amps: BTreeMap<u128, Complex64>,
}

impl FockState {
    /// Vacuum over the given modes.
    pub fn vacuum(modes: Vec<ModeLabel>, truncation: u32) -> Result<Self> {
        Self::check_geometry(&modes, truncation)?;
        let mut amps = BTreeMap::new();
        amps.insert(0u128, Complex64::new(1.0, 0.0));
        Ok(Self { modes, truncation, amps })
    }

    /// State from explicit (occupation vector, amplitude) terms. Terms on the
    /// same occupation vector accumulate. The result is not normalized.
    pub fn from_amplitudes(
        modes: Vec<ModeLabel>,
        truncation: u32,
        terms: &[(Vec<u32>, Complex64)],
    ) -> Result<Self> {
        Self::check_geometry(&modes, truncation)?;
        let mut amps: BTreeMap<u128, Complex64> = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.len() != modes.len() {
                return Err(SimError::Format(format!(
                    "occupation vector has {} entries for {} modes",
                    occ.len(),
                    modes.len()
                )));
            }
            let mut key = 0u128;
            for (i, &n) in occ.iter().enumerate() {
                if n > truncation {
                    return Err(SimError::OccupationOverflow { occ: n, truncation });
                }
                key = with_occ(key, i, n);
            }
            *amps.entry(key).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        amps.retain(|_, a| a.norm_sqr() > PRUNE_THRESHOLD * PRUNE_THRESHOLD);
        Ok(Self { modes, truncation, amps })
    }

    fn check_geometry(modes: &[ModeLabel], truncation: u32) -> Result<()> {
        if modes.is_empty() {
            return Err(SimError::Format("state needs at least one mode".into()));
        }
        if modes.len() > MODE_CAP {
            return Err(SimError::TooManyModes { count: modes.len(), cap: MODE_CAP });
        }
        if truncation == 0 || truncation > MAX_TRUNCATION {
            return Err(SimError::BadTruncation { given: truncation, max: MAX_TRUNCATION });
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(SimError::DuplicateMode(m.to_string()));
            }
        }
        Ok(())
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn mode_index(&self, mode: &ModeLabel) -> Option<usize> {
        self.modes.iter().position(|m| m == mode)
    }

    fn require_index(&self, mode: &ModeLabel) -> Result<usize> {
        self.mode_index(mode)
            .ok_or_else(|| SimError::UnknownMode(mode.to_string()))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Rescale to unit norm.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= 0.0 {
            return Err(SimError::ZeroState);
        }
        let inv = 1.0 / n.sqrt();
        for a in self.amps.values_mut() {
            *a *= inv;
        }
        Ok(self)
    }

    /// Amplitude on one occupation vector (zero when absent).
    ///
    /// Panics if `occ` has the wrong length; that is a programming error, not
    /// a runtime condition.
    pub fn amplitude(&self, occ: &[u32]) -> Complex64 {
        assert_eq!(occ.len(), self.modes.len(), "occupation vector length mismatch");
        let mut key = 0u128;
        for (i, &n) in occ.iter().enumerate() {
            key = with_occ(key, i, n);
        }
        self.amps.get(&key).copied().unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    /// All stored (occupation vector, amplitude) pairs in deterministic order.
    pub fn terms(&self) -> Vec<(Vec<u32>, Complex64)> {
        self.amps
            .iter()
            .map(|(&key, &amp)| {
                let occ = (0..self.modes.len()).map(|i| occ_of(key, i)).collect();
                (occ, amp)
            })
            .collect()
    }

    /// Number of stored basis terms.
    pub fn term_count(&self) -> usize {
        self.amps.len()
    }

    /// Two-mode passive coupler: transmission amplitude sqrt(t), reflection
    /// amplitude i*sqrt(1-t)*exp(i*extra_phase). Photon number is conserved;
    /// mass pushed past the cutoff is clipped, and clipping more than
    /// [`OVERFLOW_TOLERANCE`] is an error.
    pub fn apply_beam_splitter(
        &mut self,
        a: &ModeLabel,
        b: &ModeLabel,
        transmissivity: f64,
        extra_phase: f64,
    ) -> Result<()> {
        if !(0.0..=1.0).contains(&transmissivity) {
            return Err(SimError::BadParameter {
                name: "transmissivity",
                value: transmissivity,
                range: "[0, 1]",
            });
        }
        let ai = self.require_index(a)?;
        let bi = self.require_index(b)?;
        if ai == bi {
            return Err(SimError::DuplicateMode(a.to_string()));
        }

        let st = transmissivity.sqrt();
        let sr = (1.0 - transmissivity).sqrt();
        // a -> st*a + refl_a*b ; b -> refl_b*a + st*b
        let refl_a = Complex64::i() * sr * Complex64::from_polar(1.0, extra_phase);
        let refl_b = Complex64::i() * sr * Complex64::from_polar(1.0, -extra_phase);

        let mut out: BTreeMap<u128, Complex64> = BTreeMap::new();
        for (&key, &amp) in &self.amps {
            let m = occ_of(key, ai);
            let n = occ_of(key, bi);
            if m == 0 && n == 0 {
                *out.entry(key).or_insert(Complex64::new(0.0, 0.0)) += amp;
                continue;
            }
            let norm_in = sqrt_factorial(m) * sqrt_factorial(n);
            for j in 0..=m {
                for k in 0..=n {
                    // j photons of a stay in a, k photons of b stay in b.
                    let p = j + n - k;
                    let q = m - j + k;
                    let coeff = binomial(m, j)
                        * binomial(n, k)
                        * st.powi((j + k) as i32)
                        * sqrt_factorial(p)
                        * sqrt_factorial(q)
                        / norm_in;
                    let phase = refl_a.powu(m - j) * refl_b.powu(n - k);
                    let contrib = amp * coeff * phase;
                    let nk = with_occ(with_occ(key, ai, p), bi, q);
                    *out.entry(nk).or_insert(Complex64::new(0.0, 0.0)) += contrib;
                }
            }
        }

        let truncation = self.truncation;
        let mut clipped = 0.0f64;
        out.retain(|&key, amp| {
            if amp.norm_sqr() <= PRUNE_THRESHOLD * PRUNE_THRESHOLD {
                return false;
            }
            if occ_of(key, ai) > truncation || occ_of(key, bi) > truncation {
                clipped += amp.norm_sqr();
                return false;
            }
            true
        });
        if clipped > OVERFLOW_TOLERANCE {
            return Err(SimError::TruncationOverflow { mass: clipped, tol: OVERFLOW_TOLERANCE });
        }
        self.amps = out;
        Ok(())
    }

    /// Multiply each basis amplitude by exp(i * n_mode * phi).
    pub fn apply_phase(&mut self, mode: &ModeLabel, phi: f64) -> Result<()> {
        let idx = self.require_index(mode)?;
        for (&key, amp) in self.amps.iter_mut() {
            let n = occ_of(key, idx);
            if n > 0 {
                *amp *= Complex64::from_polar(1.0, phi * n as f64);
            }
        }
        Ok(())
    }

    /// Marginal photon-number distribution of one mode, entries 0..=truncation.
    pub fn number_distribution(&self, mode: &ModeLabel) -> Result<Vec<f64>> {
        let idx = self.require_index(mode)?;
        let total = self.norm_sqr();
        if total <= 0.0 {
            return Err(SimError::ZeroState);
        }
        let mut dist = vec![0.0; self.truncation as usize + 1];
        for (&key, amp) in &self.amps {
            dist[occ_of(key, idx) as usize] += amp.norm_sqr();
        }
        for p in &mut dist {
            *p /= total;
        }
        Ok(dist)
    }

    /// Distribution of the photon-number sum over a group of modes (what a
    /// detector spanning several sub-modes responds to).
    pub fn number_distribution_grouped(&self, group: &[ModeLabel]) -> Result<Vec<f64>> {
        let idxs = group
            .iter()
            .map(|m| self.require_index(m))
            .collect::<Result<Vec<_>>>()?;
        let total = self.norm_sqr();
        if total <= 0.0 {
            return Err(SimError::ZeroState);
        }
        let mut dist = vec![0.0; self.truncation as usize * group.len().max(1) + 1];
        for (&key, amp) in &self.amps {
            let n: u32 = idxs.iter().map(|&i| occ_of(key, i)).sum();
            dist[n as usize] += amp.norm_sqr();
        }
        for p in &mut dist {
            *p /= total;
        }
        Ok(dist)
    }

    /// Joint distribution of the grouped photon numbers of two detector groups;
    /// `out[na][nb]` is P(n_A = na, n_B = nb).
    pub fn joint_number_distribution(
        &self,
        group_a: &[ModeLabel],
        group_b: &[ModeLabel],
    ) -> Result<Vec<Vec<f64>>> {
        let ia = group_a
            .iter()
            .map(|m| self.require_index(m))
            .collect::<Result<Vec<_>>>()?;
        let ib = group_b
            .iter()
            .map(|m| self.require_index(m))
            .collect::<Result<Vec<_>>>()?;
        let total = self.norm_sqr();
        if total <= 0.0 {
            return Err(SimError::ZeroState);
        }
        let na_max = self.truncation as usize * group_a.len().max(1) + 1;
        let nb_max = self.truncation as usize * group_b.len().max(1) + 1;
        let mut dist = vec![vec![0.0; nb_max]; na_max];
        for (&key, amp) in &self.amps {
            let na: u32 = ia.iter().map(|&i| occ_of(key, i)).sum();
            let nb: u32 = ib.iter().map(|&i| occ_of(key, i)).sum();
            dist[na as usize][nb as usize] += amp.norm_sqr();
        }
        for row in &mut dist {
            for p in row.iter_mut() {
                *p /= total;
            }
        }
        Ok(dist)
    }

    /// Projective number measurement on one mode. Returns the sampled outcome,
    /// the renormalized post-measurement state (the mode stays present with a
    /// definite occupation) and the outcome probability.
    pub fn measure_mode<R: Rng + ?Sized>(
        &self,
        mode: &ModeLabel,
        rng: &mut R,
    ) -> Result<(u32, FockState, f64)> {
        let idx = self.require_index(mode)?;
        let dist = self.number_distribution(mode)?;
        let draw: f64 = rng.gen();
        let mut acc = 0.0;
        let mut outcome = 0u32;
        for (n, &p) in dist.iter().enumerate() {
            acc += p;
            if draw < acc || n == dist.len() - 1 {
                outcome = n as u32;
                if p <= 0.0 {
                    // Numerical edge: walk back to the last outcome with mass.
                    outcome = dist
                        .iter()
                        .rposition(|&q| q > 0.0)
                        .ok_or(SimError::ZeroState)? as u32;
                }
                break;
            }
        }
        let probability = dist[outcome as usize];
        let mut collapsed = self.clone();
        collapsed.amps.retain(|&key, _| occ_of(key, idx) == outcome);
        let collapsed = collapsed.normalized()?;
        Ok((outcome, collapsed, probability))
    }

    /// Tensor product with a state on disjoint modes (same truncation).
    pub fn tensor(&self, other: &FockState) -> Result<FockState> {
        if self.truncation != other.truncation {
            return Err(SimError::Format(format!(
                "cannot tensor states with truncations {} and {}",
                self.truncation, other.truncation
            )));
        }
        let mut modes = self.modes.clone();
        for m in &other.modes {
            if modes.contains(m) {
                return Err(SimError::DuplicateMode(m.to_string()));
            }
            modes.push(m.clone());
        }
        if modes.len() > MODE_CAP {
            return Err(SimError::TooManyModes { count: modes.len(), cap: MODE_CAP });
        }
        let shift = BITS_PER_MODE as usize * self.modes.len();
        let mut amps = BTreeMap::new();
        for (&k1, &a1) in &self.amps {
            for (&k2, &a2) in &other.amps {
                let amp = a1 * a2;
                if amp.norm_sqr() > PRUNE_THRESHOLD * PRUNE_THRESHOLD {
                    amps.insert(k1 | (k2 << shift), amp);
                }
            }
        }
        Ok(FockState { modes, truncation: self.truncation, amps })
    }

    /// Append a fresh mode in the vacuum state.
    pub fn add_vacuum_mode(&mut self, mode: ModeLabel) -> Result<()> {
        if self.modes.contains(&mode) {
            return Err(SimError::DuplicateMode(mode.to_string()));
        }
        if self.modes.len() + 1 > MODE_CAP {
            return Err(SimError::TooManyModes { count: self.modes.len() + 1, cap: MODE_CAP });
        }
        self.modes.push(mode);
        Ok(())
    }

    /// Drop a mode whose occupation is definite (the same in every basis term),
    /// e.g. after measurement. Removing an indefinite mode would silently
    /// discard coherence, so it is an error.
    pub fn remove_mode(&mut self, mode: &ModeLabel) -> Result<()> {
        let idx = self.require_index(mode)?;
        let mut occs = self.amps.keys().map(|&k| occ_of(k, idx));
        let first = occs.next().ok_or(SimError::ZeroState)?;
        if occs.any(|n| n != first) {
            return Err(SimError::IndefiniteOccupation(mode.to_string()));
        }
        let shift = BITS_PER_MODE as usize * idx;
        let low_mask = (1u128 << shift) - 1;
        let amps = self
            .amps
            .iter()
            .map(|(&k, &a)| {
                let low = k & low_mask;
                let high = (k >> (shift + BITS_PER_MODE as usize)) << shift;
                (low | high, a)
            })
            .collect();
        self.amps = amps;
        self.modes.remove(idx);
        Ok(())
    }

    pub fn rename_mode(&mut self, from: &ModeLabel, to: ModeLabel) -> Result<()> {
        let idx = self.require_index(from)?;
        if to != self.modes[idx] && self.modes.contains(&to) {
            return Err(SimError::DuplicateMode(to.to_string()));
        }
        self.modes[idx] = to;
        Ok(())
    }

    /// Keep only basis terms whose occupation vector satisfies `keep`; returns
    /// the filtered state (not renormalized) and the removed probability mass.
    pub fn filter_terms(&self, keep: impl Fn(&[u32]) -> bool) -> (FockState, f64) {
        let mut kept = BTreeMap::new();
        let mut removed = 0.0;
        let n_modes = self.modes.len();
        let mut occ = vec![0u32; n_modes];
        for (&key, &amp) in &self.amps {
            for (i, slot) in occ.iter_mut().enumerate() {
                *slot = occ_of(key, i);
            }
            if keep(&occ) {
                kept.insert(key, amp);
            } else {
                removed += amp.norm_sqr();
            }
        }
        (
            FockState { modes: self.modes.clone(), truncation: self.truncation, amps: kept },
            removed,
        )
    }

    /// Inner product <self|other>; both states must carry the same mode list.
    pub fn overlap(&self, other: &FockState) -> Result<Complex64> {
        if self.modes != other.modes || self.truncation != other.truncation {
            return Err(SimError::Format(
                "overlap requires identical mode lists and truncation".into(),
            ));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (key, amp) in &self.amps {
            if let Some(b) = other.amps.get(key) {
                acc += amp.conj() * b;
            }
        }
        Ok(acc)
    }

    /// True when both states have the same modes and all amplitudes agree
    /// within `tol` (absolute, per basis vector, including global phase).
    pub fn approx_eq(&self, other: &FockState, tol: f64) -> bool {
        if self.modes != other.modes || self.truncation != other.truncation {
            return false;
        }
        let zero = Complex64::new(0.0, 0.0);
        for (key, amp) in &self.amps {
            let b = other.amps.get(key).copied().unwrap_or(zero);
            if (amp - b).norm() > tol {
                return false;
            }
        }
        for (key, amp) in &other.amps {
            if !self.amps.contains_key(key) && amp.norm() > tol {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_modes() -> (ModeLabel, ModeLabel) {
        (ModeLabel::new("a", 0), ModeLabel::new("b", 0))
    }

    #[test]
    fn vacuum_has_unit_amplitude_on_zeros() {
        let m = ModeLabel::new("a", 0);
        let st = FockState::vacuum(vec![m], 4).unwrap();
        assert_eq!(st.amplitude(&[0]), c(1.0, 0.0));
        assert!((st.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn duplicate_labels_rejected() {
        let m = ModeLabel::new("a", 0);
        let err = FockState::vacuum(vec![m.clone(), m], 2);
        assert!(matches!(err, Err(SimError::DuplicateMode(_))));
    }

    #[test]
    fn single_photon_splits_evenly() {
        let (a, b) = two_modes();
        let mut st = FockState::from_amplitudes(
            vec![a.clone(), b.clone()],
            4,
            &[(vec![1, 0], c(1.0, 0.0))],
        )
        .unwrap();
        st.apply_beam_splitter(&a, &b, 0.5, 0.0).unwrap();
        let r = 0.5f64.sqrt();
        assert!((st.amplitude(&[1, 0]) - c(r, 0.0)).norm() < 1e-12);
        assert!((st.amplitude(&[0, 1]) - c(0.0, r)).norm() < 1e-12);
    }

    #[test]
    fn hom_dip_cancels_coincidence() {
        for theta in [0.0, 0.7, -2.1] {
            let (a, b) = two_modes();
            let mut st = FockState::from_amplitudes(
                vec![a.clone(), b.clone()],
                4,
                &[(vec![1, 1], c(1.0, 0.0))],
            )
            .unwrap();
            st.apply_beam_splitter(&a, &b, 0.5, theta).unwrap();
            assert!(st.amplitude(&[1, 1]).norm() < 1e-12);
            let r = 0.5f64.sqrt();
            let expect_20 = Complex64::i() * r * Complex64::from_polar(1.0, -theta);
            let expect_02 = Complex64::i() * r * Complex64::from_polar(1.0, theta);
            assert!((st.amplitude(&[2, 0]) - expect_20).norm() < 1e-12);
            assert!((st.amplitude(&[0, 2]) - expect_02).norm() < 1e-12);
        }
    }

    #[test]
    fn two_photons_one_port_split() {
        let (a, b) = two_modes();
        let mut st = FockState::from_amplitudes(
            vec![a.clone(), b.clone()],
            4,
            &[(vec![2, 0], c(1.0, 0.0))],
        )
        .unwrap();
        st.apply_beam_splitter(&a, &b, 0.5, 0.0).unwrap();
        let r = 0.5f64.sqrt();
        assert!((st.amplitude(&[2, 0]) - c(0.5, 0.0)).norm() < 1e-12);
        assert!((st.amplitude(&[1, 1]) - c(0.0, r)).norm() < 1e-12);
        assert!((st.amplitude(&[0, 2]) - c(-0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn beam_splitter_preserves_norm_and_photon_number() {
        let (a, b) = two_modes();
        let mut st = FockState::from_amplitudes(
            vec![a.clone(), b.clone()],
            4,
            &[
                (vec![0, 0], c(0.8, 0.0)),
                (vec![2, 1], c(0.3, 0.4)),
                (vec![1, 3], c(-0.1, 0.2)),
            ],
        )
        .unwrap()
        .normalized()
        .unwrap();
        let before = st.norm_sqr();
        st.apply_beam_splitter(&a, &b, 0.37, 1.1).unwrap();
        assert!((st.norm_sqr() - before).abs() < 1e-12);
        for (occ, amp) in st.terms() {
            let total: u32 = occ.iter().sum();
            assert!(total == 0 || total == 3 || total == 4, "bad term {occ:?} {amp}");
        }
    }

    #[test]
    fn truncation_overflow_detected() {
        let (a, b) = two_modes();
        let mut st = FockState::from_amplitudes(
            vec![a.clone(), b.clone()],
            4,
            &[(vec![4, 4], c(1.0, 0.0))],
        )
        .unwrap();
        let err = st.apply_beam_splitter(&a, &b, 0.5, 0.0);
        assert!(matches!(err, Err(SimError::TruncationOverflow { .. })));
    }

    #[test]
    fn phase_shift_scales_with_occupation() {
        let m = ModeLabel::new("a", 0);
        let mut st = FockState::from_amplitudes(
            vec![m.clone()],
            4,
            &[(vec![0], c(0.5, 0.0)), (vec![1], c(0.5, 0.0)), (vec![2], c(0.5, 0.0))],
        )
        .unwrap();
        st.apply_phase(&m, std::f64::consts::PI).unwrap();
        assert!((st.amplitude(&[0]) - c(0.5, 0.0)).norm() < 1e-14);
        assert!((st.amplitude(&[1]) - c(-0.5, 0.0)).norm() < 1e-14);
        assert!((st.amplitude(&[2]) - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn measurement_collapses_and_reports_probability() {
        use rand::SeedableRng;
        let m = ModeLabel::new("a", 0);
        let st = FockState::from_amplitudes(
            vec![m.clone()],
            4,
            &[(vec![0], c(0.6, 0.0)), (vec![1], c(0.0, 0.8))],
        )
        .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut seen = [false; 2];
        for _ in 0..64 {
            let (n, collapsed, p) = st.measure_mode(&m, &mut rng).unwrap();
            match n {
                0 => {
                    assert!((p - 0.36).abs() < 1e-12);
                    assert!((collapsed.amplitude(&[0]).norm() - 1.0).abs() < 1e-12);
                }
                1 => {
                    assert!((p - 0.64).abs() < 1e-12);
                    assert!((collapsed.amplitude(&[1]).norm() - 1.0).abs() < 1e-12);
                }
                other => panic!("impossible outcome {other}"),
            }
            seen[n as usize] = true;
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn vacuum_measurement_is_certain() {
        use rand::SeedableRng;
        let m = ModeLabel::new("a", 0);
        let st = FockState::vacuum(vec![m.clone()], 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let (n, _, p) = st.measure_mode(&m, &mut rng).unwrap();
        assert_eq!(n, 0);
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grouped_distribution_sums_sub_modes() {
        let a = ModeLabel::new("a", 0);
        let b = ModeLabel::new("b", 0);
        let st = FockState::from_amplitudes(
            vec![a.clone(), b.clone()],
            4,
            &[(vec![1, 1], c(0.5f64.sqrt(), 0.0)), (vec![2, 0], c(0.0, 0.5f64.sqrt()))],
        )
        .unwrap();
        let dist = st.number_distribution_grouped(&[a, b]).unwrap();
        assert!((dist[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_then_remove_roundtrip() {
        let a = ModeLabel::new("a", 0);
        let b = ModeLabel::new("b", 0);
        let sa = FockState::from_amplitudes(vec![a.clone()], 4, &[(vec![1], c(1.0, 0.0))]).unwrap();
        let sb = FockState::from_amplitudes(vec![b.clone()], 4, &[(vec![2], c(0.0, 1.0))]).unwrap();
        let mut joint = sa.tensor(&sb).unwrap();
        assert_eq!(joint.modes().len(), 2);
        assert!((joint.amplitude(&[1, 2]) - c(0.0, 1.0)).norm() < 1e-15);
        joint.remove_mode(&b).unwrap();
        assert!((joint.amplitude(&[1]) - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(joint.modes(), &[a]);
    }

    #[test]
    fn indefinite_mode_removal_rejected() {
        let (a, b) = two_modes();
        let mut st = FockState::from_amplitudes(
            vec![a.clone(), b],
            4,
            &[(vec![0, 1], c(0.7, 0.0)), (vec![1, 0], c(0.7, 0.0))],
        )
        .unwrap();
        assert!(matches!(
            st.remove_mode(&a),
            Err(SimError::IndefiniteOccupation(_))
        ));
    }

    #[test]
    fn mode_label_displays_path_and_pulse() {
        assert_eq!(ModeLabel::new("out-A", 3).to_string(), "out-A@3");
    }
}
