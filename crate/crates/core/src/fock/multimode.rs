use num_complex::Complex64;

use super::vector::{FockVector, TAIL_TOLERANCE};
use crate::error::{NlaError, Result};

/// Pure (possibly unnormalized) state of several modes, each with its own cutoff.
///
/// Amplitudes are stored row-major: mode 0 varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiModeState {
    cutoffs: Vec<usize>,
    amplitudes: Vec<Complex64>,
    truncation: f64,
}

impl MultiModeState {
    pub fn new(cutoffs: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if cutoffs.is_empty() || cutoffs.contains(&0) {
            return Err(NlaError::InvalidParameter(format!(
                "mode cutoffs must be nonempty and positive, got {cutoffs:?}"
            )));
        }
        let dim: usize = cutoffs.iter().product();
        if dim != amplitudes.len() {
            return Err(NlaError::DimensionMismatch(format!(
                "cutoffs {cutoffs:?} need {dim} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        Ok(Self {
            cutoffs,
            amplitudes,
            truncation: 0.0,
        })
    }

    pub fn vacuum(cutoffs: &[usize]) -> Result<Self> {
        Self::basis(cutoffs, &vec![0; cutoffs.len()])
    }

    /// Product number state `|n_0, n_1, ...>`.
    pub fn basis(cutoffs: &[usize], occupation: &[usize]) -> Result<Self> {
        if occupation.len() != cutoffs.len() {
            return Err(NlaError::DimensionMismatch(
                "occupation list length differs from mode count".into(),
            ));
        }
        if let Some(mode) = occupation.iter().zip(cutoffs).position(|(n, c)| n >= c) {
            return Err(NlaError::PhotonOverflow { mode, dropped: 1.0 });
        }
        let dim: usize = cutoffs.iter().product();
        let mut state = Self::new(cutoffs.to_vec(), vec![Complex64::default(); dim])?;
        let idx = state.index(occupation);
        state.amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub(crate) fn with_truncation(mut self, truncation: f64) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn amplitude(&self, occupation: &[usize]) -> Complex64 {
        if occupation.iter().zip(&self.cutoffs).any(|(n, c)| n >= c) {
            return Complex64::default();
        }
        self.amplitudes[self.index(occupation)]
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.cutoffs)
    }

    pub fn index(&self, occupation: &[usize]) -> usize {
        occupation
            .iter()
            .zip(self.strides())
            .map(|(n, s)| n * s)
            .sum()
    }

    pub fn occupation(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.cutoffs.len()];
        for (m, c) in self.cutoffs.iter().enumerate().rev() {
            occ[m] = index % c;
            index /= c;
        }
        occ
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sq().sqrt();
        if norm == 0.0 {
            return Err(NlaError::ZeroNorm);
        }
        Ok(Self {
            cutoffs: self.cutoffs.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a / norm).collect(),
            truncation: self.truncation,
        })
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            cutoffs: self.cutoffs.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
            truncation: self.truncation,
        }
    }

    /// `<self|other>`; both states must share cutoffs.
    pub fn inner(&self, other: &MultiModeState) -> Result<Complex64> {
        if self.cutoffs != other.cutoffs {
            return Err(NlaError::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.cutoffs, other.cutoffs
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Re-embeds the state with new cutoffs. Shrinking a mode that carries
    /// amplitude is an overflow error.
    pub fn with_cutoffs(&self, cutoffs: &[usize]) -> Result<Self> {
        if cutoffs.len() != self.cutoffs.len() {
            return Err(NlaError::DimensionMismatch(
                "cannot change the number of modes".into(),
            ));
        }
        let mut out = Self::new(
            cutoffs.to_vec(),
            vec![Complex64::default(); cutoffs.iter().product()],
        )?;
        for (i, amp) in self.amplitudes.iter().enumerate() {
            if *amp == Complex64::default() {
                continue;
            }
            let occ = self.occupation(i);
            if let Some(mode) = occ.iter().zip(cutoffs).position(|(n, c)| n >= c) {
                return Err(NlaError::PhotonOverflow {
                    mode,
                    dropped: amp.norm_sqr(),
                });
            }
            let j = out.index(&occ);
            out.amplitudes[j] = *amp;
        }
        out.truncation = self.truncation;
        Ok(out)
    }

    /// Conditional (unnormalized) state after finding `n` photons in `mode`.
    /// The measured mode is removed.
    pub fn project(&self, mode: usize, n: usize) -> Result<Self> {
        self.check_mode(mode)?;
        if self.modes() == 1 {
            return Err(NlaError::InvalidParameter(
                "cannot project away the only mode".into(),
            ));
        }
        let mut cutoffs = self.cutoffs.clone();
        cutoffs.remove(mode);
        let dim: usize = cutoffs.iter().product();
        let mut amplitudes = vec![Complex64::default(); dim];
        if n < self.cutoffs[mode] {
            let stride = self.strides()[mode];
            let c = self.cutoffs[mode];
            // outer = modes before `mode`, inner = modes after
            let inner = stride;
            let outer = self.dim() / (stride * c);
            for o in 0..outer {
                for i in 0..inner {
                    amplitudes[o * inner + i] = self.amplitudes[o * c * inner + n * inner + i];
                }
            }
        }
        Ok(Self {
            cutoffs,
            amplitudes,
            truncation: self.truncation,
        })
    }

    /// Marginal photon-number distribution of one mode (unnormalized).
    pub fn marginal(&self, mode: usize) -> Result<Vec<f64>> {
        self.check_mode(mode)?;
        let mut p = vec![0.0; self.cutoffs[mode]];
        for (i, a) in self.amplitudes.iter().enumerate() {
            p[self.occupation(i)[mode]] += a.norm_sqr();
        }
        Ok(p)
    }

    /// Reorders modes so that new mode `k` is old mode `order[k]`.
    pub fn permute_modes(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.modes()];
        if order.len() != self.modes() {
            return Err(NlaError::DimensionMismatch("permutation length".into()));
        }
        for &m in order {
            self.check_mode(m)?;
            if std::mem::replace(&mut seen[m], true) {
                return Err(NlaError::InvalidParameter("repeated mode in permutation".into()));
            }
        }
        let cutoffs: Vec<usize> = order.iter().map(|&m| self.cutoffs[m]).collect();
        let mut out = Self::new(cutoffs, vec![Complex64::default(); self.dim()])?;
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let occ = self.occupation(i);
            let new_occ: Vec<usize> = order.iter().map(|&m| occ[m]).collect();
            let j = out.index(&new_occ);
            out.amplitudes[j] = *amp;
        }
        out.truncation = self.truncation;
        Ok(out)
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes() {
            return Err(NlaError::InvalidMode {
                index: mode,
                modes: self.modes(),
            });
        }
        Ok(())
    }
}

impl From<&FockVector> for MultiModeState {
    fn from(v: &FockVector) -> Self {
        Self {
            cutoffs: vec![v.cutoff()],
            amplitudes: v.amplitudes().to_vec(),
            truncation: v.truncation(),
        }
    }
}

impl From<FockVector> for MultiModeState {
    fn from(v: FockVector) -> Self {
        (&v).into()
    }
}

pub(crate) fn strides(cutoffs: &[usize]) -> Vec<usize> {
    let mut s = vec![1; cutoffs.len()];
    for m in (0..cutoffs.len().saturating_sub(1)).rev() {
        s[m] = s[m + 1] * cutoffs[m + 1];
    }
    s
}

/// Kronecker product; mode lists concatenate.
pub fn tensor(a: &MultiModeState, b: &MultiModeState) -> MultiModeState {
    let mut amplitudes = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amplitudes {
        for y in &b.amplitudes {
            amplitudes.push(x * y);
        }
    }
    let mut cutoffs = a.cutoffs.clone();
    cutoffs.extend_from_slice(&b.cutoffs);
    MultiModeState {
        cutoffs,
        amplitudes,
        truncation: a.truncation + b.truncation - a.truncation * b.truncation,
    }
}

/// Two-mode squeezed (EPR) state `sqrt(1-chi²) sum chi^n |n>|n>`, truncated at `cutoff`.
///
/// The dropped geometric tail `chi^(2 cutoff)` is reported via
/// [`MultiModeState::truncation`].
pub fn epr_state(chi: f64, cutoff: usize) -> Result<MultiModeState> {
    if !(0.0..1.0).contains(&chi) {
        return Err(NlaError::InvalidParameter(format!(
            "EPR parameter must satisfy 0 <= chi < 1, got {chi}"
        )));
    }
    if cutoff == 0 {
        return Err(NlaError::InvalidParameter("cutoff must be at least 1".into()));
    }
    let mut state = MultiModeState::vacuum(&[cutoff, cutoff])?;
    let scale = (1.0 - chi * chi).sqrt();
    let mut weight = scale;
    for n in 0..cutoff {
        let idx = state.index(&[n, n]);
        state.amplitudes[idx] = Complex64::new(weight, 0.0);
        weight *= chi;
    }
    Ok(state.with_truncation(chi.powi(2 * cutoff as i32)))
}

/// EPR state whose dropped tail is below the default tolerance.
pub fn epr_state_auto(chi: f64) -> Result<MultiModeState> {
    epr_state(chi, super::vector::min_cutoff_epr(chi, TAIL_TOLERANCE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::vector::number_state;

    #[test]
    fn epr_zero_is_vacuum() {
        let s = epr_state(0.0, 3).unwrap();
        assert_eq!(s.amplitude(&[0, 0]), Complex64::new(1.0, 0.0));
        assert!((s.norm_sq() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn epr_half_cutoff_two() {
        let s = epr_state(0.5, 2).unwrap();
        let r = 0.75f64.sqrt();
        assert!((s.amplitude(&[0, 0]).re - r).abs() < 1e-15);
        assert!((s.amplitude(&[1, 1]).re - 0.5 * r).abs() < 1e-15);
        assert_eq!(s.amplitude(&[0, 1]), Complex64::default());
    }

    #[test]
    fn epr_tail_small_at_fifteen() {
        let s = epr_state(0.0997, 15).unwrap();
        assert!(s.truncation() < 1e-12);
        assert!((1.0 - s.norm_sq() - s.truncation()).abs() < 1e-14);
    }

    #[test]
    fn epr_rejects_unit_chi() {
        assert!(epr_state(1.0, 4).is_err());
        assert!(epr_state(-0.1, 4).is_err());
    }

    #[test]
    fn tensor_basis_states() {
        let one = MultiModeState::from(number_state(1, 3).unwrap());
        let zero = MultiModeState::from(number_state(0, 2).unwrap());
        let t = tensor(&one, &zero);
        assert_eq!(t.cutoffs(), &[3, 2]);
        assert_eq!(t.amplitude(&[1, 0]), Complex64::new(1.0, 0.0));
        assert!((t.norm_sq() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn project_picks_slice() {
        let s = epr_state(0.5, 3).unwrap();
        let p = s.project(0, 1).unwrap();
        assert_eq!(p.cutoffs(), &[3]);
        assert!((p.amplitudes()[1].re - 0.5 * 0.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.amplitudes()[0], Complex64::default());
    }

    #[test]
    fn permute_round_trip() {
        let a = MultiModeState::basis(&[2, 3, 4], &[1, 2, 3]).unwrap();
        let p = a.permute_modes(&[2, 0, 1]).unwrap();
        assert_eq!(p.cutoffs(), &[4, 2, 3]);
        assert_eq!(p.amplitude(&[3, 1, 2]), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn shrinking_occupied_mode_overflows() {
        let a = MultiModeState::basis(&[3, 3], &[2, 0]).unwrap();
        assert!(matches!(
            a.with_cutoffs(&[2, 3]),
            Err(NlaError::PhotonOverflow { mode: 0, .. })
        ));
        assert!(a.with_cutoffs(&[4, 1]).is_ok());
    }
}
