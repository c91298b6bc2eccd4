//! First-order model of ancilla sources that fail to fire.
//!
//! With source efficiency `1 - gamma`, at most one ancilla misfires per run to
//! first order. The heralded output is then a two-term mixture: the ideal
//! `N`-arm output weighted by `1 - gamma`, plus an `(N-1)`-arm output weighted
//! by `gamma |alpha|²` and one less factor of `eta`. Higher orders in `gamma`
//! are dropped.

use num_complex::Complex64;

use super::operator::gain;
use crate::error::{NlaError, Result};
use crate::fock::{fidelity, ln_factorial, DensityOperator, FockVector};

/// Above this `gamma` the first-order truncation is flagged.
pub const FIRST_ORDER_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct MisfireMixture {
    /// `sqrt((1-g) e^{-|a|²} eta^N) (1 + g a† alpha/N)^N |0>`
    pub ideal: FockVector,
    /// `sqrt(g |a|² e^{-|a|²} eta^(N-1)) (1 + g a† alpha/N)^(N-1) |0>`
    pub misfire: FockVector,
    /// `|ideal><ideal| + |misfire><misfire|`; trace is the acceptance probability.
    pub density: DensityOperator,
    pub warning: Option<String>,
}

impl MisfireMixture {
    pub fn acceptance_probability(&self) -> f64 {
        self.density.trace()
    }

    pub fn normalized_density(&self) -> Result<DensityOperator> {
        self.density.normalized()
    }

    /// Fidelity between the two normalized terms.
    pub fn term_fidelity(&self) -> Result<f64> {
        fidelity(&self.ideal, &self.misfire)
    }
}

/// `(1 + x a†)^m |0>` = `sum_n C(m,n) x^n sqrt(n!) |n>`, zero-padded to `cutoff`.
fn truncated_binomial_state(x: Complex64, m: usize, cutoff: usize) -> Vec<Complex64> {
    (0..cutoff)
        .map(|n| {
            if n > m {
                return Complex64::default();
            }
            let ln_c = ln_factorial(m) - ln_factorial(n) - ln_factorial(m - n) + 0.5 * ln_factorial(n);
            x.powu(n as u32) * ln_c.exp()
        })
        .collect()
}

pub fn misfire_density(alpha: Complex64, arms: usize, eta: f64, gamma: f64) -> Result<MisfireMixture> {
    if arms == 0 {
        return Err(NlaError::InvalidParameter("need at least one arm".into()));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(NlaError::InvalidParameter(format!("eta must lie in (0, 1), got {eta}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(NlaError::InvalidParameter(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    let g = gain(eta);
    let cutoff = arms + 1;
    let x = alpha * g / arms as f64;
    let mean = alpha.norm_sqr();

    let w_ideal = ((1.0 - gamma) * (-mean).exp() * eta.powi(arms as i32)).sqrt();
    let w_misfire = (gamma * mean * (-mean).exp() * eta.powi(arms as i32 - 1)).sqrt();
    let ideal = FockVector::unnormalized(
        truncated_binomial_state(x, arms, cutoff)
            .into_iter()
            .map(|a| a * w_ideal)
            .collect(),
    );
    let misfire = FockVector::unnormalized(
        truncated_binomial_state(x, arms - 1, cutoff)
            .into_iter()
            .map(|a| a * w_misfire)
            .collect(),
    );
    let density = DensityOperator::from_fock(&ideal).add(&DensityOperator::from_fock(&misfire))?;
    let warning = (gamma > FIRST_ORDER_LIMIT).then(|| {
        format!("gamma = {gamma} exceeds {FIRST_ORDER_LIMIT}; the first-order misfire model is unreliable")
    });
    Ok(MisfireMixture {
        ideal,
        misfire,
        density,
        warning,
    })
}
