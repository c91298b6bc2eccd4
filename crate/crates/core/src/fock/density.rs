use nalgebra::DMatrix;
use num_complex::Complex64;

use super::multimode::{strides, MultiModeState};
use super::vector::FockVector;
use crate::error::{NlaError, Result};

const HERMITIAN_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-10;

/// Density operator over a (multi)mode truncated basis.
///
/// The trace may be below one: heralded outputs keep their success
/// probability in the trace until [`DensityOperator::normalized`] is called.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    cutoffs: Vec<usize>,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    /// Validating constructor: Hermitian, positive semidefinite, trace in (0, 1].
    pub fn try_new(cutoffs: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::from_parts(cutoffs, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Shape-checked constructor without the spectral validation.
    pub fn from_parts(cutoffs: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim: usize = cutoffs.iter().product();
        if cutoffs.is_empty() || matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(NlaError::DimensionMismatch(format!(
                "cutoffs {cutoffs:?} need a {dim}x{dim} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { cutoffs, matrix })
    }

    pub fn from_pure(state: &MultiModeState) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self {
            cutoffs: state.cutoffs().to_vec(),
            matrix: &v * v.adjoint(),
        }
    }

    pub fn from_fock(state: &FockVector) -> Self {
        Self::from_pure(&state.into())
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn norm_sq(&self) -> f64 {
        self.trace()
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t <= 0.0 {
            return Err(NlaError::ZeroNorm);
        }
        Ok(Self {
            cutoffs: self.cutoffs.clone(),
            matrix: self.matrix.map(|x| x / t),
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            cutoffs: self.cutoffs.clone(),
            matrix: self.matrix.map(|x| x * factor),
        }
    }

    pub fn add(&self, other: &DensityOperator) -> Result<Self> {
        if self.cutoffs != other.cutoffs {
            return Err(NlaError::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.cutoffs, other.cutoffs
            )));
        }
        Ok(Self {
            cutoffs: self.cutoffs.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    /// `Tr(rho²) / Tr(rho)²`.
    pub fn purity(&self) -> f64 {
        let t = self.trace();
        let sq: f64 = self.matrix.iter().map(|x| x.norm_sqr()).sum();
        sq / (t * t)
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = hermitian_part(&self.matrix);
        h.symmetric_eigenvalues().iter().copied().collect()
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(NlaError::InvalidDensity(format!(
                "hermiticity violation {herm:.3e}"
            )));
        }
        let tr = self.matrix.trace();
        if tr.im.abs() > HERMITIAN_TOL || tr.re <= 0.0 || tr.re > 1.0 + HERMITIAN_TOL {
            return Err(NlaError::InvalidDensity(format!("trace {tr}")));
        }
        let min = self
            .eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -EIGEN_TOL {
            return Err(NlaError::InvalidDensity(format!("eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// Element `<row| rho |col>` addressed by occupation lists.
    pub fn element(&self, row: &[usize], col: &[usize]) -> Complex64 {
        let s = strides(&self.cutoffs);
        let idx = |occ: &[usize]| -> Option<usize> {
            if occ.iter().zip(&self.cutoffs).any(|(n, c)| n >= c) {
                None
            } else {
                Some(occ.iter().zip(&s).map(|(n, s)| n * s).sum())
            }
        };
        match (idx(row), idx(col)) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            _ => Complex64::default(),
        }
    }

    /// Zero-pads each mode to the given cutoffs (which must not shrink).
    pub fn with_cutoffs(&self, cutoffs: &[usize]) -> Result<Self> {
        if cutoffs.len() != self.modes() || cutoffs.iter().zip(&self.cutoffs).any(|(n, o)| n < o)
        {
            return Err(NlaError::DimensionMismatch(format!(
                "cannot pad {:?} to {cutoffs:?}",
                self.cutoffs
            )));
        }
        if cutoffs == self.cutoffs.as_slice() {
            return Ok(self.clone());
        }
        let map = embedding(&self.cutoffs, cutoffs);
        let dim: usize = cutoffs.iter().product();
        let mut m = DMatrix::zeros(dim, dim);
        for (i, &ii) in map.iter().enumerate() {
            for (j, &jj) in map.iter().enumerate() {
                m[(ii, jj)] = self.matrix[(i, j)];
            }
        }
        Ok(Self {
            cutoffs: cutoffs.to_vec(),
            matrix: m,
        })
    }

    /// `K rho K^dagger` for a diagonal `K` acting on one mode.
    pub fn apply_diagonal(&self, mode: usize, coeffs: &[f64]) -> Result<Self> {
        if mode >= self.modes() {
            return Err(NlaError::InvalidMode {
                index: mode,
                modes: self.modes(),
            });
        }
        let s = strides(&self.cutoffs);
        let c = self.cutoffs[mode];
        let factor: Vec<f64> = (0..self.dim())
            .map(|i| {
                let n = (i / s[mode]) % c;
                coeffs.get(n).copied().unwrap_or(0.0)
            })
            .collect();
        let mut m = self.matrix.clone();
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                m[(i, j)] *= factor[i] * factor[j];
            }
        }
        Ok(Self {
            cutoffs: self.cutoffs.clone(),
            matrix: m,
        })
    }
}

/// Index map from a smaller basis into a zero-padded larger one.
fn embedding(small: &[usize], large: &[usize]) -> Vec<usize> {
    let ls = strides(large);
    let dim: usize = small.iter().product();
    (0..dim)
        .map(|mut i| {
            let mut j = 0;
            for m in (0..small.len()).rev() {
                j += (i % small[m]) * ls[m];
                i /= small[m];
            }
            j
        })
        .collect()
}

pub(crate) fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()).map(|x| x * 0.5)
}

/// Index list of kept modes, in ascending order, after removing `traced`.
fn kept_modes(modes: usize, traced: &[usize]) -> Result<Vec<usize>> {
    for &t in traced {
        if t >= modes {
            return Err(NlaError::InvalidMode { index: t, modes });
        }
    }
    let kept: Vec<usize> = (0..modes).filter(|m| !traced.contains(m)).collect();
    if kept.is_empty() {
        return Err(NlaError::InvalidParameter(
            "partial trace over every mode leaves nothing".into(),
        ));
    }
    Ok(kept)
}

/// Reduced density operator of a pure multimode state.
pub fn partial_trace_pure(state: &MultiModeState, traced: &[usize]) -> Result<DensityOperator> {
    let kept = kept_modes(state.modes(), traced)?;
    let mut order = kept.clone();
    order.extend((0..state.modes()).filter(|m| !kept.contains(m)));
    let permuted = state.permute_modes(&order)?;
    let kept_cutoffs: Vec<usize> = kept.iter().map(|&m| state.cutoffs()[m]).collect();
    let kept_dim: usize = kept_cutoffs.iter().product();
    let env_dim = state.dim() / kept_dim;
    // psi as a kept x env matrix (row-major storage)
    let psi = DMatrix::from_row_slice(kept_dim, env_dim, permuted.amplitudes());
    DensityOperator::from_parts(kept_cutoffs, &psi * psi.adjoint())
}

/// Reduced density operator of a mixed multimode state.
pub fn partial_trace(rho: &DensityOperator, traced: &[usize]) -> Result<DensityOperator> {
    let kept = kept_modes(rho.modes(), traced)?;
    if kept.len() == rho.modes() {
        return Ok(rho.clone());
    }
    let cut = rho.cutoffs();
    let s = strides(cut);
    let kept_cutoffs: Vec<usize> = kept.iter().map(|&m| cut[m]).collect();
    let traced_modes: Vec<usize> = (0..rho.modes()).filter(|m| !kept.contains(m)).collect();
    let traced_cutoffs: Vec<usize> = traced_modes.iter().map(|&m| cut[m]).collect();
    let kept_dim: usize = kept_cutoffs.iter().product();
    let env_dim: usize = traced_cutoffs.iter().product();

    let offsets = |modes: &[usize], cutoffs: &[usize], dim: usize| -> Vec<usize> {
        (0..dim)
            .map(|mut i| {
                let mut off = 0;
                for k in (0..modes.len()).rev() {
                    off += (i % cutoffs[k]) * s[modes[k]];
                    i /= cutoffs[k];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept, &kept_cutoffs, kept_dim);
    let env_off = offsets(&traced_modes, &traced_cutoffs, env_dim);

    let m = rho.matrix();
    let out = DMatrix::from_fn(kept_dim, kept_dim, |i, j| {
        env_off
            .iter()
            .map(|e| m[(kept_off[i] + e, kept_off[j] + e)])
            .sum()
    });
    DensityOperator::from_parts(kept_cutoffs, out)
}
