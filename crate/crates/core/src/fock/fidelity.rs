//! Fidelity between pure and mixed states.
//!
//! All values use the squared convention: `|<a|b>|²` for pure states and
//! `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))²` for mixed ones. Inputs are normalized
//! first and a global phase never matters. [`amplitude_fidelity`] gives the
//! square root for callers that quote the other convention.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::density::{hermitian_part, DensityOperator};
use super::multimode::MultiModeState;
use super::vector::FockVector;
use crate::error::{NlaError, Result};

/// Borrowed view of anything fidelity can compare.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Fock(&'a FockVector),
    Pure(&'a MultiModeState),
    Mixed(&'a DensityOperator),
}

impl<'a> From<&'a FockVector> for StateRef<'a> {
    fn from(v: &'a FockVector) -> Self {
        StateRef::Fock(v)
    }
}

impl<'a> From<&'a MultiModeState> for StateRef<'a> {
    fn from(v: &'a MultiModeState) -> Self {
        StateRef::Pure(v)
    }
}

impl<'a> From<&'a DensityOperator> for StateRef<'a> {
    fn from(v: &'a DensityOperator) -> Self {
        StateRef::Mixed(v)
    }
}

enum Owned {
    Pure(MultiModeState),
    Mixed(DensityOperator),
}

impl Owned {
    fn cutoffs(&self) -> &[usize] {
        match self {
            Owned::Pure(s) => s.cutoffs(),
            Owned::Mixed(r) => r.cutoffs(),
        }
    }

    fn pad(self, cutoffs: &[usize]) -> Result<Self> {
        Ok(match self {
            Owned::Pure(s) => Owned::Pure(s.with_cutoffs(cutoffs)?),
            Owned::Mixed(r) => Owned::Mixed(r.with_cutoffs(cutoffs)?),
        })
    }

    fn normalized(self) -> Result<Self> {
        Ok(match self {
            Owned::Pure(s) => Owned::Pure(s.normalized()?),
            Owned::Mixed(r) => Owned::Mixed(r.normalized()?),
        })
    }
}

fn to_owned(s: StateRef<'_>) -> Owned {
    match s {
        StateRef::Fock(v) => Owned::Pure(v.into()),
        StateRef::Pure(v) => Owned::Pure(v.clone()),
        StateRef::Mixed(r) => Owned::Mixed(r.clone()),
    }
}

/// Squared-convention fidelity in `[0, 1]`; cutoffs are zero-padded to match.
pub fn fidelity<'a, 'b>(a: impl Into<StateRef<'a>>, b: impl Into<StateRef<'b>>) -> Result<f64> {
    let (a, b) = (to_owned(a.into()), to_owned(b.into()));
    if a.cutoffs().len() != b.cutoffs().len() {
        return Err(NlaError::DimensionMismatch(format!(
            "{} modes vs {} modes",
            a.cutoffs().len(),
            b.cutoffs().len()
        )));
    }
    let common: Vec<usize> = a
        .cutoffs()
        .iter()
        .zip(b.cutoffs())
        .map(|(x, y)| *x.max(y))
        .collect();
    let a = a.pad(&common)?.normalized()?;
    let b = b.pad(&common)?.normalized()?;
    let f = match (&a, &b) {
        (Owned::Pure(x), Owned::Pure(y)) => x.inner(y)?.norm_sqr(),
        (Owned::Pure(x), Owned::Mixed(r)) | (Owned::Mixed(r), Owned::Pure(x)) => {
            expectation(r.matrix(), x.amplitudes())
        }
        (Owned::Mixed(r), Owned::Mixed(s)) => uhlmann(r.matrix(), s.matrix()),
    };
    Ok(f.clamp(0.0, 1.0))
}

/// `sqrt` of [`fidelity`]: the amplitude-overlap convention.
pub fn amplitude_fidelity<'a, 'b>(
    a: impl Into<StateRef<'a>>,
    b: impl Into<StateRef<'b>>,
) -> Result<f64> {
    fidelity(a, b).map(f64::sqrt)
}

fn expectation(rho: &DMatrix<Complex64>, psi: &[Complex64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(psi);
    (v.adjoint() * rho * &v)[(0, 0)].re
}

/// Eigenvalues below this fraction of the largest are treated as round-off.
const RANK_CUTOFF: f64 = 1e-13;

/// Uhlmann fidelity, evaluated block by block over the joint sparsity pattern.
///
/// Each block uses low-rank factors `rho = A A†`, `sigma = B B†`, for which
/// `sqrt(F) = || A† B ||_1` (sum of singular values).
fn uhlmann(rho: &DMatrix<Complex64>, sigma: &DMatrix<Complex64>) -> f64 {
    let blocks = connected_blocks(rho, sigma);
    let scale_r = max_abs_diag(rho);
    let scale_s = max_abs_diag(sigma);
    let mut root_fid = 0.0;
    for block in blocks {
        let (Some(a), Some(b)) = (
            factor(&submatrix(rho, &block), scale_r),
            factor(&submatrix(sigma, &block), scale_s),
        ) else {
            continue;
        };
        let overlap = a.adjoint() * b;
        root_fid += overlap.singular_values().iter().sum::<f64>();
    }
    root_fid * root_fid
}

fn max_abs_diag(m: &DMatrix<Complex64>) -> f64 {
    m.diagonal().iter().map(|x| x.re.abs()).fold(0.0, f64::max)
}

/// `A` with `m = A A†`, keeping eigenvalues above the global round-off floor.
fn factor(m: &DMatrix<Complex64>, scale: f64) -> Option<DMatrix<Complex64>> {
    let eig = hermitian_part(m).symmetric_eigen();
    let floor = RANK_CUTOFF * scale;
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > floor)
        .collect();
    if keep.is_empty() {
        return None;
    }
    let v = &eig.eigenvectors;
    Some(DMatrix::from_fn(m.nrows(), keep.len(), |r, c| {
        v[(r, keep[c])] * eig.eigenvalues[keep[c]].sqrt()
    }))
}

fn submatrix(m: &DMatrix<Complex64>, idx: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Connected components of the graph whose edges are nonzero entries of either matrix.
fn connected_blocks(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for j in 0..n {
        for i in 0..j {
            let zero = Complex64::default();
            if a[(i, j)] != zero || b[(i, j)] != zero || a[(j, i)] != zero || b[(j, i)] != zero {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}
