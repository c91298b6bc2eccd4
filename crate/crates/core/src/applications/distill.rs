use crate::error::{NlaError, Result};
use crate::fock::{
    amplitude_fidelity, epr_state, fidelity, min_cutoff_epr, partial_trace_pure, DensityOperator,
    MultiModeState, TAIL_TOLERANCE,
};
use crate::nla::{AsymptoticAmplifier, DiagonalAmplifierOp, HeraldRecord};
use crate::optics::loss_channel_purified;

/// Largest per-mode cutoff the dense distillation pipeline will build.
pub const MAX_DISTILL_CUTOFF: usize = 48;

/// Equivalent lossy-EPR parameters after heralded amplification of Bob's arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveEprParams {
    pub chi_prime: f64,
    pub eps_prime: f64,
    pub physical: bool,
}

/// `chi' = chi sqrt(1 + (g² - 1) eps)`, `eps' = g² eps / (1 + (g² - 1) eps)`.
pub fn distill_params(chi: f64, epsilon: f64, gain: f64) -> Result<EffectiveEprParams> {
    if !(0.0..1.0).contains(&chi) {
        return Err(NlaError::InvalidParameter(format!("chi must lie in [0, 1), got {chi}")));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(NlaError::InvalidParameter(format!(
            "transmission must lie in [0, 1], got {epsilon}"
        )));
    }
    if !(gain > 0.0) {
        return Err(NlaError::InvalidParameter(format!("gain must be positive, got {gain}")));
    }
    let g2 = gain * gain;
    let stretch = 1.0 + (g2 - 1.0) * epsilon;
    let chi_prime = chi * stretch.sqrt();
    Ok(EffectiveEprParams {
        chi_prime,
        eps_prime: g2 * epsilon / stretch,
        physical: chi_prime < 1.0,
    })
}

/// EPR state sent through loss on Bob's arm, environment kept: modes (Alice, Bob, loss).
pub fn lossy_epr_purification(chi: f64, epsilon: f64, cutoff: usize) -> Result<MultiModeState> {
    let epr = epr_state(chi, cutoff)?;
    loss_channel_purified(&epr, epsilon, 1)
}

/// Two-mode density operator of an EPR state whose second arm suffered loss.
pub fn lossy_epr(chi: f64, epsilon: f64, cutoff: usize) -> Result<DensityOperator> {
    partial_trace_pure(&lossy_epr_purification(chi, epsilon, cutoff)?, &[2])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Amplifier<'a> {
    Finite(&'a DiagonalAmplifierOp),
    Asymptotic(AsymptoticAmplifier),
}

impl Amplifier<'_> {
    pub fn gain(&self) -> f64 {
        match self {
            Amplifier::Finite(op) => op.gain(),
            Amplifier::Asymptotic(op) => op.gain(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DistillOutput {
    /// Heralded Alice-Bob operator; trace is the success probability for the finite amplifier.
    pub state: DensityOperator,
    pub record: Option<HeraldRecord>,
    pub params: EffectiveEprParams,
    /// Normalized lossy EPR state with the effective parameters.
    pub target: DensityOperator,
    /// Squared-convention fidelity with the target.
    pub fidelity: f64,
    /// Amplitude-convention fidelity with the target.
    pub amplitude_fidelity: f64,
    pub cutoff: usize,
}

/// Cutoff leaving less than the default tail for both the input and the effective state.
pub fn distill_cutoff(chi: f64, chi_prime: f64) -> usize {
    min_cutoff_epr(chi.max(chi_prime), TAIL_TOLERANCE).max(2)
}

/// Heralded Alice-Bob operator after amplifying Bob's arm of a lossy EPR state.
pub fn distilled_state(
    chi: f64,
    epsilon: f64,
    amplifier: Amplifier<'_>,
    cutoff: usize,
) -> Result<(DensityOperator, Option<HeraldRecord>)> {
    let global = lossy_epr_purification(chi, epsilon, cutoff)?;
    let (amplified, record) = match amplifier {
        Amplifier::Finite(op) => {
            let (s, r) = op.apply_mode(&global, 1)?;
            (s, Some(r))
        }
        Amplifier::Asymptotic(op) => (op.apply_mode(&global, 1)?, None),
    };
    Ok((partial_trace_pure(&amplified, &[2])?, record))
}

/// Builds the lossy EPR purification, amplifies Bob's mode, traces the loss mode,
/// and compares against the effective lossy EPR state.
pub fn distill_numeric(
    chi: f64,
    epsilon: f64,
    amplifier: Amplifier<'_>,
    cutoff: Option<usize>,
) -> Result<DistillOutput> {
    let params = distill_params(chi, epsilon, amplifier.gain())?;
    if !params.physical {
        return Err(NlaError::NonConvergent(format!(
            "effective chi' = {:.6} >= 1; the distilled state is unnormalizable",
            params.chi_prime
        )));
    }
    let cutoff = cutoff.unwrap_or_else(|| distill_cutoff(chi, params.chi_prime));
    if cutoff > MAX_DISTILL_CUTOFF {
        return Err(NlaError::Truncation {
            cutoff: MAX_DISTILL_CUTOFF,
            tail_mass: params.chi_prime.powi(2 * MAX_DISTILL_CUTOFF as i32),
            tolerance: TAIL_TOLERANCE,
        });
    }
    let (state, record) = distilled_state(chi, epsilon, amplifier, cutoff)?;
    let target = lossy_epr(params.chi_prime, params.eps_prime, cutoff)?.normalized()?;
    let f = fidelity(&state, &target)?;
    Ok(DistillOutput {
        fidelity: f,
        amplitude_fidelity: amplitude_fidelity(&state, &target)?,
        state,
        record,
        params,
        target,
        cutoff,
    })
}
