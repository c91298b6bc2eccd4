use num_complex::Complex64;

use crate::error::{NlaError, Result};
use crate::fock::{DensityOperator, FockVector, MultiModeState};

/// Amplitude gain `sqrt((1 - eta) / eta)` of a scissor with ancilla beamsplitter transmission `eta`.
pub fn gain(eta: f64) -> f64 {
    ((1.0 - eta) / eta).sqrt()
}

/// Transmission giving amplitude gain `g`.
pub fn eta_for_gain(g: f64) -> f64 {
    1.0 / (1.0 + g * g)
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(NlaError::InvalidParameter(format!(
            "eta must lie in (0, 1), got {eta}"
        )));
    }
    Ok(())
}

/// Heralding bookkeeping for one amplifier run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeraldRecord {
    /// Norm² (or trace) of the unnormalized heralded output.
    pub success_probability: f64,
    /// Detector patterns accepted as success: two per arm.
    pub accepted_patterns: u64,
}

/// Exact finite-N amplifier, diagonal in the number basis:
/// `|n> -> eta^(N/2) N!/((N-n)! N^n) g^n |n>` for `n <= N`, and zero above.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalAmplifierOp {
    arms: usize,
    eta: f64,
    gain: f64,
    coeffs: Vec<f64>,
}

impl DiagonalAmplifierOp {
    pub fn new(arms: usize, eta: f64, cutoff: usize) -> Result<Self> {
        if arms == 0 {
            return Err(NlaError::InvalidParameter("need at least one arm".into()));
        }
        check_eta(eta)?;
        let g = gain(eta);
        let mut coeffs = Vec::with_capacity(cutoff);
        let mut c = eta.powf(arms as f64 / 2.0);
        for n in 0..cutoff {
            if n > 0 {
                // N!/((N-n)! N^n) grows by (N - n + 1)/N per photon
                c *= g * (arms as f64 - n as f64 + 1.0).max(0.0) / arms as f64;
            }
            coeffs.push(c);
        }
        Ok(Self {
            arms,
            eta,
            gain: g,
            coeffs,
        })
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient for `|n>`, valid beyond the stored cutoff.
    pub fn coeff(&self, n: usize) -> f64 {
        if n > self.arms {
            return 0.0;
        }
        if let Some(c) = self.coeffs.get(n) {
            return *c;
        }
        Self::new(self.arms, self.eta, n + 1).expect("validated").coeffs[n]
    }

    fn coeffs_for(&self, cutoff: usize) -> Vec<f64> {
        (0..cutoff).map(|n| self.coeff(n)).collect()
    }

    pub fn accepted_patterns(&self) -> u64 {
        1u64 << self.arms.min(63)
    }

    fn record(&self, p: f64) -> HeraldRecord {
        HeraldRecord {
            success_probability: p,
            accepted_patterns: self.accepted_patterns(),
        }
    }

    /// Heralded output for a single-mode input.
    pub fn apply(&self, state: &FockVector) -> (FockVector, HeraldRecord) {
        let out = scale_fock(state, &self.coeffs_for(state.cutoff()));
        let p = out.norm_sq();
        (out, self.record(p))
    }

    /// Heralded output when the amplifier acts on `mode` of a pure multimode state.
    pub fn apply_mode(
        &self,
        state: &MultiModeState,
        mode: usize,
    ) -> Result<(MultiModeState, HeraldRecord)> {
        let out = scale_mode(state, mode, &self.coeffs_for(state.cutoffs().get(mode).copied().unwrap_or(0)))?;
        let p = out.norm_sq();
        Ok((out, self.record(p)))
    }

    /// `K rho K†` on one mode; the trace of the result is the success probability.
    pub fn apply_density(
        &self,
        rho: &DensityOperator,
        mode: usize,
    ) -> Result<(DensityOperator, HeraldRecord)> {
        let c = rho.cutoffs().get(mode).copied().unwrap_or(0);
        let out = rho.apply_diagonal(mode, &self.coeffs_for(c))?;
        let p = out.trace();
        Ok((out, self.record(p)))
    }
}

/// Shorthand for [`DiagonalAmplifierOp::new`].
pub fn nla_operator(arms: usize, eta: f64, cutoff: usize) -> Result<DiagonalAmplifierOp> {
    DiagonalAmplifierOp::new(arms, eta, cutoff)
}

/// Large-N amplifier `|n> -> g^n |n>` with the herald prefactor dropped.
///
/// There is no success probability in this limit. Applying it fails with
/// [`NlaError::NonConvergent`] when the amplified photon-number distribution
/// is not decaying at the cutoff, i.e. the output would be unnormalizable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticAmplifier {
    gain: f64,
}

impl AsymptoticAmplifier {
    pub fn new(gain: f64) -> Result<Self> {
        if !(gain > 0.0 && gain.is_finite()) {
            return Err(NlaError::InvalidParameter(format!("gain must be positive, got {gain}")));
        }
        Ok(Self { gain })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn coeffs(&self, cutoff: usize) -> Vec<f64> {
        (0..cutoff).map(|n| self.gain.powi(n as i32)).collect()
    }

    pub fn apply(&self, state: &FockVector) -> Result<FockVector> {
        let out = scale_fock(state, &self.coeffs(state.cutoff()));
        check_decay(&out.populations())?;
        Ok(out)
    }

    pub fn apply_mode(&self, state: &MultiModeState, mode: usize) -> Result<MultiModeState> {
        let c = state.cutoffs().get(mode).copied().unwrap_or(0);
        let out = scale_mode(state, mode, &self.coeffs(c))?;
        check_decay(&out.marginal(mode)?)?;
        Ok(out)
    }

    pub fn apply_density(&self, rho: &DensityOperator, mode: usize) -> Result<DensityOperator> {
        let c = rho.cutoffs().get(mode).copied().unwrap_or(0);
        let out = rho.apply_diagonal(mode, &self.coeffs(c))?;
        let marginal = crate::fock::partial_trace(
            &out,
            &(0..out.modes()).filter(|&m| m != mode).collect::<Vec<_>>(),
        )?;
        let p: Vec<f64> = (0..c).map(|n| marginal.matrix()[(n, n)].re).collect();
        check_decay(&p)?;
        Ok(out)
    }
}

pub fn asymptotic_operator(gain: f64) -> Result<AsymptoticAmplifier> {
    AsymptoticAmplifier::new(gain)
}

/// The last two populated levels must be decreasing.
fn check_decay(populations: &[f64]) -> Result<()> {
    let last = populations.iter().rposition(|p| *p > 0.0);
    if let Some(n) = last {
        if n > 0 && populations[n - 1] > 0.0 && populations[n] >= populations[n - 1] {
            return Err(NlaError::NonConvergent(format!(
                "amplified population is not decaying at the cutoff \
                 (p[{}] = {:.3e} >= p[{}] = {:.3e}); the large-N output is unnormalizable",
                n,
                populations[n],
                n - 1,
                populations[n - 1]
            )));
        }
    }
    Ok(())
}

fn scale_fock(state: &FockVector, coeffs: &[f64]) -> FockVector {
    FockVector::unnormalized(
        state
            .amplitudes()
            .iter()
            .zip(coeffs)
            .map(|(a, c)| a * *c)
            .collect(),
    )
}

fn scale_mode(state: &MultiModeState, mode: usize, coeffs: &[f64]) -> Result<MultiModeState> {
    if mode >= state.modes() {
        return Err(NlaError::InvalidMode {
            index: mode,
            modes: state.modes(),
        });
    }
    let stride = state.strides()[mode];
    let c = state.cutoffs()[mode];
    let amps: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| a * coeffs[(i / stride) % c])
        .collect();
    Ok(MultiModeState::new(state.cutoffs().to_vec(), amps)?.with_truncation(state.truncation()))
}

/// Large-N success probability `eta^N exp(-(1 - g²)|alpha|²)` for a coherent input.
pub fn success_probability_asymptotic(alpha: Complex64, arms: usize, eta: f64) -> f64 {
    let g2 = gain(eta).powi(2);
    eta.powi(arms as i32) * (-(1.0 - g2) * alpha.norm_sqr()).exp()
}
