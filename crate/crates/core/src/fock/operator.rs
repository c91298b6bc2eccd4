use nalgebra::DMatrix;
use num_complex::Complex64;

use super::vector::FockVector;
use crate::error::{NlaError, Result};

/// Linear map between single-mode truncated bases (`out_cutoff x in_cutoff`).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    matrix: DMatrix<Complex64>,
}

impl ModeOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Self {
        Self { matrix }
    }

    pub fn from_fn(out_cutoff: usize, in_cutoff: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        Self::new(DMatrix::from_fn(out_cutoff, in_cutoff, f))
    }

    pub fn identity(cutoff: usize) -> Self {
        Self::new(DMatrix::identity(cutoff, cutoff))
    }

    /// `a`, with `a|n> = sqrt(n)|n-1>`.
    pub fn annihilation(cutoff: usize) -> Self {
        Self::from_fn(cutoff, cutoff, |r, c| {
            if c == r + 1 {
                Complex64::new((c as f64).sqrt(), 0.0)
            } else {
                Complex64::default()
            }
        })
    }

    /// `a^dagger` from `in_cutoff` into `out_cutoff`; use `out = in + 1` to keep it exact.
    pub fn creation(in_cutoff: usize, out_cutoff: usize) -> Self {
        Self::from_fn(out_cutoff, in_cutoff, |r, c| {
            if r == c + 1 {
                Complex64::new((r as f64).sqrt(), 0.0)
            } else {
                Complex64::default()
            }
        })
    }

    pub fn number(cutoff: usize) -> Self {
        Self::from_fn(cutoff, cutoff, |r, c| {
            if r == c {
                Complex64::new(r as f64, 0.0)
            } else {
                Complex64::default()
            }
        })
    }

    pub fn diagonal(coeffs: &[f64]) -> Self {
        let n = coeffs.len();
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(coeffs[r], 0.0)
            } else {
                Complex64::default()
            }
        })
    }

    pub fn in_cutoff(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn out_cutoff(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.matrix.adjoint())
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &ModeOperator) -> Result<Self> {
        if self.in_cutoff() != other.out_cutoff() {
            return Err(NlaError::DimensionMismatch(format!(
                "compose {}x{} after {}x{}",
                self.out_cutoff(),
                self.in_cutoff(),
                other.out_cutoff(),
                other.in_cutoff()
            )));
        }
        Ok(Self::new(&self.matrix * &other.matrix))
    }

    /// Applies the operator; the input is zero-padded or must not lose amplitude.
    pub fn apply(&self, state: &FockVector) -> Result<FockVector> {
        let input = if state.cutoff() <= self.in_cutoff() {
            state.with_cutoff(self.in_cutoff())
        } else {
            let dropped: f64 = state.amplitudes()[self.in_cutoff()..]
                .iter()
                .map(|a| a.norm_sqr())
                .sum();
            if dropped > 0.0 {
                return Err(NlaError::PhotonOverflow { mode: 0, dropped });
            }
            state.with_cutoff(self.in_cutoff())
        };
        let v = nalgebra::DVector::from_column_slice(input.amplitudes());
        let out = &self.matrix * v;
        Ok(FockVector::unnormalized(out.iter().copied().collect()))
    }
}
