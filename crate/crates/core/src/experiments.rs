//! Parameter sweeps behind the figure-style experiments.
//!
//! Each function computes one sweep point so callers can parallelize freely
//! and keep rows in sweep order.

use num_complex::Complex64;

use crate::applications::{
    distill_cutoff, distill_numeric, distill_params, lossy_epr_purification, purity_product,
    purity_product_pure, Amplifier,
};
use crate::error::{NlaError, Result};
use crate::fock::{coherent_state, fidelity, min_cutoff_coherent, TAIL_TOLERANCE};
use crate::nla::{eta_for_gain, nla_operator};

/// One point of a fidelity-versus-target-gain curve for a coherent input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig3Row {
    pub eta: f64,
    pub alpha: f64,
    /// Intensity gain `G`; the target state is `|sqrt(G) alpha>`.
    pub target_gain: f64,
    pub fidelity: f64,
    pub success_prob: f64,
}

/// Fidelity of the heralded finite-N output of `|alpha>` with `|sqrt(G) alpha>`
/// for every `G` in `target_gains`.
pub fn fig3_curve(alpha: f64, arms: usize, eta: f64, target_gains: &[f64]) -> Result<Vec<Fig3Row>> {
    let op = nla_operator(arms, eta, arms + 1)?;
    let input = coherent_state(Complex64::new(alpha, 0.0), arms + 1)?;
    let (out, record) = op.apply(&input);
    target_gains
        .iter()
        .map(|&g2| {
            if !(g2 > 0.0) {
                return Err(NlaError::InvalidParameter(format!("target gain {g2} must be positive")));
            }
            let amp = Complex64::new(alpha * g2.sqrt(), 0.0);
            let target = coherent_state(amp, min_cutoff_coherent(amp, TAIL_TOLERANCE))?;
            Ok(Fig3Row {
                eta,
                alpha,
                target_gain: g2,
                fidelity: fidelity(&out, &target)?,
                success_prob: record.success_probability,
            })
        })
        .collect()
}

/// Gain at the largest fidelity of a curve (first maximum on ties).
pub fn curve_peak(rows: &[Fig3Row]) -> Option<Fig3Row> {
    rows.iter().copied().fold(None, |best, r| match best {
        Some(b) if b.fidelity >= r.fidelity => Some(b),
        _ => Some(r),
    })
}

/// Purity-versus-probability trade-off point for EPR distillation through loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig4Row {
    pub chi_source: f64,
    /// Amplitude gain of the amplifier.
    pub gain: f64,
    pub arms: usize,
    pub eta: f64,
    pub success_prob: f64,
    pub v_minus: f64,
    pub v_plus: f64,
    pub product: f64,
    /// Squared-convention fidelity with the effective lossy EPR state.
    pub fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig4Settings {
    /// Channel transmission.
    pub epsilon: f64,
    /// Squeezing parameter whose `e^{-2r}` sets the target squeezed variance.
    pub target_r: f64,
    /// Arm count of the amplifier, shared by every point.
    pub arms: usize,
}

impl Default for Fig4Settings {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            target_r: 0.4,
            arms: 4,
        }
    }
}

/// Default amplitude gains for the trade-off sweep (`g² = 4 .. 30`).
pub fn fig4_default_gains() -> Vec<f64> {
    [4.0f64, 6.0, 9.0, 14.0, 20.0, 30.0]
        .iter()
        .map(|g2| g2.sqrt())
        .collect()
}

/// Largest effective EPR parameter the source search will visit.
const MAX_CHI_PRIME: f64 = 0.7;

fn heralded_v_minus(chi: f64, g: f64, arms: usize, epsilon: f64) -> Result<f64> {
    let op = nla_operator(arms, eta_for_gain(g), arms + 1)?;
    let params = distill_params(chi, epsilon, g)?;
    let cutoff = distill_cutoff(chi, params.chi_prime);
    let global = lossy_epr_purification(chi, epsilon, cutoff)?;
    let (amplified, _) = op.apply_mode(&global, 1)?;
    Ok(purity_product_pure(&amplified, 0, 1)?.v_minus)
}

/// Source strength at which the heralded squeezed variance first reaches
/// `target` as `chi` grows from zero, or `None` if it never does below the
/// search cap.
pub fn solve_source(g: f64, arms: usize, epsilon: f64, target: f64) -> Result<Option<f64>> {
    let v = |chi: f64| heralded_v_minus(chi, g, arms, epsilon);
    let chi_cap = MAX_CHI_PRIME / (1.0 + (g * g - 1.0) * epsilon).sqrt();
    let steps = 32;
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=steps {
        let chi = chi_cap * k as f64 / steps as f64;
        if v(chi)? <= target {
            hi = Some(chi);
            break;
        }
        lo = chi;
    }
    let Some(mut hi) = hi else { return Ok(None) };
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        if v(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Full report for one source strength and gain.
pub fn fig4_eval(chi: f64, g: f64, arms: usize, epsilon: f64) -> Result<Fig4Row> {
    let eta = eta_for_gain(g);
    let op = nla_operator(arms, eta, arms + 1)?;
    let out = distill_numeric(chi, epsilon, Amplifier::Finite(&op), None)?;
    let rep = purity_product(&out.state)?;
    Ok(Fig4Row {
        chi_source: chi,
        gain: g,
        arms,
        eta,
        success_prob: rep.success_prob,
        v_minus: rep.v_minus,
        v_plus: rep.v_plus,
        product: rep.product,
        fidelity: out.fidelity,
    })
}

/// One trade-off point: Bob uses amplitude gain `g`, and Alice picks the source
/// strength that brings the heralded squeezed variance to `e^{-2 target_r}`.
/// `None` if that correlation is out of reach at this gain.
pub fn fig4_point(g: f64, settings: &Fig4Settings) -> Result<Option<Fig4Row>> {
    if !(g > 1.0) {
        return Err(NlaError::InvalidParameter(format!(
            "distillation gain must exceed 1, got {g}"
        )));
    }
    let target = (-2.0 * settings.target_r).exp();
    match solve_source(g, settings.arms, settings.epsilon, target)? {
        Some(chi) => fig4_eval(chi, g, settings.arms, settings.epsilon).map(Some),
        None => Ok(None),
    }
}
