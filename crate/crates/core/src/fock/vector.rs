use num_complex::Complex64;

use crate::error::{NlaError, Result};

/// Dropped tail mass below which a truncated expansion counts as exact.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Whether a vector is a physical (unit-norm) state or carries a heralding weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Normalized,
    /// Squared norm is a probability (heralded output) or the vector was truncated.
    Unnormalized,
}

/// Single-mode state over the truncated number basis `|0>..|cutoff-1>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Vec<Complex64>,
    normalization: Normalization,
    truncation: f64,
}

impl FockVector {
    /// Wraps raw amplitudes; the result is flagged normalized only if its norm is 1.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(NlaError::InvalidParameter("cutoff must be at least 1".into()));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>();
        let normalization = if (norm - 1.0).abs() < TAIL_TOLERANCE {
            Normalization::Normalized
        } else {
            Normalization::Unnormalized
        };
        Ok(Self {
            amplitudes,
            normalization,
            truncation: 0.0,
        })
    }

    /// Heralded or otherwise unnormalized vector; norm² is physical data.
    pub fn unnormalized(amplitudes: Vec<Complex64>) -> Self {
        assert!(!amplitudes.is_empty(), "cutoff must be at least 1");
        Self {
            amplitudes,
            normalization: Normalization::Unnormalized,
            truncation: 0.0,
        }
    }

    pub fn vacuum(cutoff: usize) -> Result<Self> {
        number_state(0, cutoff)
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amplitudes.get(n).copied().unwrap_or_default()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn is_normalized(&self) -> bool {
        self.normalization == Normalization::Normalized
    }

    /// Probability mass of the exact expansion that the cutoff dropped.
    pub fn truncation(&self) -> f64 {
        self.truncation
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
            amplitudes: self.amplitudes.iter().map(|a| a / norm).collect(),
            normalization: Normalization::Normalized,
            truncation: self.truncation,
        })
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
            normalization: Normalization::Unnormalized,
            truncation: self.truncation,
        }
    }

    /// Zero-pads (or truncates, if smaller) to a new cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.resize(cutoff.max(1), Complex64::default());
        Self {
            amplitudes,
            normalization: self.normalization,
            truncation: self.truncation,
        }
    }

    /// `<self|other>` with implicit zero-padding.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Photon-number distribution `|<n|psi>|²`.
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        let norm = self.norm_sq();
        if norm == 0.0 {
            return 0.0;
        }
        self.populations()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum::<f64>()
            / norm
    }
}

/// `|n>` in a basis of the given cutoff.
pub fn number_state(n: usize, cutoff: usize) -> Result<FockVector> {
    if n >= cutoff {
        return Err(NlaError::InvalidParameter(format!(
            "number state |{n}> does not fit cutoff {cutoff}"
        )));
    }
    let mut amplitudes = vec![Complex64::default(); cutoff];
    amplitudes[n] = Complex64::new(1.0, 0.0);
    FockVector::from_amplitudes(amplitudes)
}

/// Coherent state `|alpha>` truncated at `cutoff`.
///
/// The vector is flagged normalized only when the dropped Poisson tail is below
/// [`TAIL_TOLERANCE`]; otherwise it is unnormalized and reports the dropped mass
/// through [`FockVector::truncation`].
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<FockVector> {
    if cutoff == 0 {
        return Err(NlaError::InvalidParameter("cutoff must be at least 1".into()));
    }
    let amplitudes = coherent_amplitudes(alpha, cutoff);
    let tail = coherent_tail_mass(alpha.norm_sqr(), cutoff);
    Ok(FockVector {
        amplitudes,
        normalization: if tail < TAIL_TOLERANCE {
            Normalization::Normalized
        } else {
            Normalization::Unnormalized
        },
        truncation: tail,
    })
}

/// Like [`coherent_state`] but fails if the cutoff drops more than `tolerance`.
pub fn coherent_state_strict(alpha: Complex64, cutoff: usize, tolerance: f64) -> Result<FockVector> {
    let state = coherent_state(alpha, cutoff)?;
    if state.truncation >= tolerance {
        return Err(NlaError::Truncation {
            cutoff,
            tail_mass: state.truncation,
            tolerance,
        });
    }
    Ok(state)
}

fn coherent_amplitudes(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut amplitudes = Vec::with_capacity(cutoff);
    let mut current = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..cutoff {
        if n > 0 {
            current = current * alpha / (n as f64).sqrt();
        }
        amplitudes.push(current);
    }
    amplitudes
}

/// Poisson mass `sum_{n >= cutoff} e^{-m} m^n / n!` for mean `m = |alpha|²`.
pub fn coherent_tail_mass(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    // first dropped term, built in log space
    let log_first = -mean + cutoff as f64 * mean.ln() - ln_factorial(cutoff);
    let mut term = log_first.exp();
    let mut total = 0.0;
    let mut n = cutoff;
    loop {
        total += term;
        n += 1;
        term *= mean / n as f64;
        if (n as f64) > mean && term < total * 1e-17 {
            break;
        }
        if n > cutoff + 10_000 {
            break;
        }
    }
    total.min(1.0)
}

/// Smallest cutoff whose dropped coherent-state tail is below `tolerance`.
pub fn min_cutoff_coherent(alpha: Complex64, tolerance: f64) -> usize {
    let mean = alpha.norm_sqr();
    assert!(mean.is_finite(), "coherent amplitude must be finite");
    let mut cutoff = 1;
    while coherent_tail_mass(mean, cutoff) >= tolerance {
        cutoff += 1;
    }
    cutoff
}

/// Smallest cutoff whose dropped two-mode squeezed tail `chi^(2 cutoff)` is below `tolerance`.
pub fn min_cutoff_epr(chi: f64, tolerance: f64) -> usize {
    if chi == 0.0 {
        return 1;
    }
    let c = (tolerance.ln() / (2.0 * chi.abs().ln())).floor() as usize + 1;
    c.max(1)
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_from_zero_amplitude() {
        let v = coherent_state(Complex64::default(), 4).unwrap();
        assert_eq!(v.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(v.amplitudes()[1..].iter().all(|a| *a == Complex64::default()));
        assert!(v.is_normalized());
    }

    #[test]
    fn strict_truncation_error_reports_tail() {
        let err = coherent_state_strict(Complex64::new(1.0, 0.0), 2, TAIL_TOLERANCE).unwrap_err();
        match err {
            NlaError::Truncation { tail_mass, .. } => {
                assert!((tail_mass - (1.0 - 2.0 * (-1.0f64).exp())).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        let loose = coherent_state(Complex64::new(1.0, 0.0), 2).unwrap();
        assert!(!loose.is_normalized());
    }

    #[test]
    fn half_amplitude_expansion() {
        let v = coherent_state(Complex64::new(0.5, 0.0), 20).unwrap();
        assert!((v.amplitudes()[1].re - (-0.125f64).exp() * 0.5).abs() < 1e-15);
        assert!((v.amplitudes()[1].re - 0.4412).abs() < 1e-4);
        assert!(v.is_normalized());
    }

    #[test]
    fn tail_mass_matches_complement() {
        for &(alpha, cutoff) in &[(0.3, 3), (1.0, 4), (2.0, 6), (1.5, 12)] {
            let v = coherent_state(Complex64::new(alpha, 0.0), cutoff).unwrap();
            assert!((v.truncation() - (1.0 - v.norm_sq())).abs() < 1e-14);
        }
    }

    #[test]
    fn minimal_cutoffs_respect_tolerance() {
        let alpha = Complex64::new(0.7, -0.4);
        let c = min_cutoff_coherent(alpha, 1e-12);
        assert!(coherent_tail_mass(alpha.norm_sqr(), c) < 1e-12);
        assert!(coherent_tail_mass(alpha.norm_sqr(), c - 1) >= 1e-12);

        let chi: f64 = 0.0997;
        let c = min_cutoff_epr(chi, 1e-12);
        assert!(chi.powi(2 * c as i32) < 1e-12);
        assert!(chi.powi(2 * (c as i32 - 1)) >= 1e-12);
    }

    #[test]
    fn number_state_out_of_range() {
        assert!(number_state(3, 3).is_err());
        assert_eq!(number_state(2, 3).unwrap().amplitude(2).re, 1.0);
    }
}
