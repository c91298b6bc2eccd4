use num_complex::Complex64;

use crate::error::{NlaError, Result};
use crate::fock::{DensityOperator, MultiModeState};

/// Squeezed/anti-squeezed EPR correlations of a two-mode state.
///
/// Quadratures are `X = a + a†`, `P = -i(a - a†)` with vacuum variance 1, so a
/// pure EPR state with `chi = tanh r` gives `v_minus = e^{-2r}`,
/// `v_plus = e^{2r}` and a product of exactly 1. Mixedness raises the product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityReport {
    pub v_minus: f64,
    pub v_plus: f64,
    pub product: f64,
    /// Trace of the (possibly heralded) input operator.
    pub success_prob: f64,
}

#[derive(Clone, Copy)]
enum Ladder {
    Lower,
    Raise,
}

/// Basis index reached by a ladder monomial (applied right to left) from
/// index `j`, with its matrix element; `None` if it leaves the basis.
fn ladder_step(
    j: usize,
    cut: &[usize],
    strides: &[usize],
    ops: &[(usize, Ladder)],
) -> Option<(usize, f64)> {
    let mut occ: Vec<usize> = (0..cut.len()).map(|k| (j / strides[k]) % cut[k]).collect();
    let mut coeff = 1.0;
    for &(mode, op) in ops.iter().rev() {
        match op {
            Ladder::Lower => {
                if occ[mode] == 0 {
                    return None;
                }
                coeff *= (occ[mode] as f64).sqrt();
                occ[mode] -= 1;
            }
            Ladder::Raise => {
                occ[mode] += 1;
                if occ[mode] >= cut[mode] {
                    return None;
                }
                coeff *= (occ[mode] as f64).sqrt();
            }
        }
    }
    Some((occ.iter().zip(strides).map(|(n, s)| n * s).sum(), coeff))
}

fn strides_of(cut: &[usize]) -> Vec<usize> {
    (0..cut.len()).map(|m| cut[m + 1..].iter().product()).collect()
}

/// `Tr(rho O)` for a monomial `O` of ladder operators.
fn moment(rho: &DensityOperator, ops: &[(usize, Ladder)]) -> f64 {
    let cut = rho.cutoffs();
    let strides = strides_of(cut);
    let m = rho.matrix();
    let mut total = Complex64::default();
    for j in 0..rho.dim() {
        if let Some((i, c)) = ladder_step(j, cut, &strides, ops) {
            // Tr(rho O) = sum_j <j|rho|i> <i|O|j>
            total += m[(j, i)] * c;
        }
    }
    total.re
}

/// `<psi|O|psi>` for a pure multimode state (other modes act as identity).
fn pure_moment(state: &MultiModeState, ops: &[(usize, Ladder)]) -> f64 {
    let cut = state.cutoffs();
    let strides = strides_of(cut);
    let amps = state.amplitudes();
    let mut total = Complex64::default();
    for (j, a) in amps.iter().enumerate() {
        if *a == Complex64::default() {
            continue;
        }
        if let Some((i, c)) = ladder_step(j, cut, &strides, ops) {
            total += amps[i].conj() * a * c;
        }
    }
    total.re
}

fn report(moment: impl Fn(&[(usize, Ladder)]) -> f64, a: usize, b: usize, success_prob: f64) -> PurityReport {
    use Ladder::*;
    let x_sq = |mode| {
        moment(&[(mode, Lower), (mode, Lower)])
            + moment(&[(mode, Raise), (mode, Raise)])
            + 2.0 * moment(&[(mode, Raise), (mode, Lower)])
            + 1.0
    };
    let cross = moment(&[(a, Lower), (b, Lower)])
        + moment(&[(a, Raise), (b, Raise)])
        + moment(&[(a, Raise), (b, Lower)])
        + moment(&[(a, Lower), (b, Raise)]);
    let (xa, xb) = (x_sq(a), x_sq(b));
    let diff = (xa + xb - 2.0 * cross) / 2.0;
    let sum = (xa + xb + 2.0 * cross) / 2.0;
    let (v_minus, v_plus) = (diff.min(sum), diff.max(sum));
    PurityReport {
        v_minus,
        v_plus,
        product: v_minus * v_plus,
        success_prob,
    }
}

/// Squeezed and anti-squeezed correlation variances of a two-mode operator.
pub fn purity_product(rho: &DensityOperator) -> Result<PurityReport> {
    if rho.modes() != 2 {
        return Err(NlaError::DimensionMismatch(format!(
            "purity product needs two modes, got {}",
            rho.modes()
        )));
    }
    let success_prob = rho.trace();
    let rho = rho.normalized()?;
    Ok(report(|ops| moment(&rho, ops), 0, 1, success_prob))
}

/// Same report for modes `a`, `b` of a pure state, tracing the rest implicitly.
pub fn purity_product_pure(state: &MultiModeState, a: usize, b: usize) -> Result<PurityReport> {
    if a == b || a >= state.modes() || b >= state.modes() {
        return Err(NlaError::InvalidParameter(format!(
            "need two distinct modes of a {}-mode state, got {a} and {b}",
            state.modes()
        )));
    }
    let success_prob = state.norm_sq();
    let state = state.normalized()?;
    Ok(report(|ops| pure_moment(&state, ops), a, b, success_prob))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{epr_state, MultiModeState};

    #[test]
    fn vacuum_has_unit_variances() {
        let v = DensityOperator::from_pure(&MultiModeState::vacuum(&[4, 4]).unwrap());
        let r = purity_product(&v).unwrap();
        assert!((r.v_minus - 1.0).abs() < 1e-14);
        assert!((r.v_plus - 1.0).abs() < 1e-14);
        assert!((r.product - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pure_epr_variances() {
        for r in [0.1f64, 0.4, 0.7] {
            let s = epr_state(r.tanh(), 40).unwrap();
            let rep = purity_product(&DensityOperator::from_pure(&s)).unwrap();
            assert!((rep.v_minus - (-2.0 * r).exp()).abs() < 1e-10, "r={r}");
            assert!((rep.v_plus - (2.0 * r).exp()).abs() < 1e-10, "r={r}");
            assert!((rep.product - 1.0).abs() < 1e-10);
            let pure = purity_product_pure(&s, 0, 1).unwrap();
            assert!((pure.v_minus - rep.v_minus).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_mode_count() {
        let v = DensityOperator::from_pure(&MultiModeState::vacuum(&[2, 2, 2]).unwrap());
        assert!(purity_product(&v).is_err());
    }
}
