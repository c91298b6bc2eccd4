use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{NlaError, Result};

/// Variance of the coherent-amplitude prior after heralding.
///
/// A complex Gaussian prior `p(alpha) ∝ exp(-|alpha|²/d)` reweighted by the
/// large-N acceptance `∝ exp((g² - 1)|alpha|²)` is again Gaussian with
/// variance `d / (1 - (g² - 1) d)`; at `g² = 2` this is `d / (1 - d)`.
pub fn postselected_prior_variance(d: f64, gain: f64) -> Result<f64> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(NlaError::InvalidParameter(format!("prior variance must be >= 0, got {d}")));
    }
    let excess = gain * gain - 1.0;
    let denom = 1.0 - excess * d;
    if denom <= 0.0 {
        return Err(NlaError::NonConvergent(format!(
            "(g² - 1) d = {:.6} >= 1: the heralded prior does not normalize",
            excess * d
        )));
    }
    Ok(d / denom)
}

/// Monte-Carlo estimate of `E|alpha|²` under the heralded prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub accepted: usize,
    pub drawn: usize,
}

/// Draws `samples` amplitudes from the prior and accepts each with probability
/// `exp((g² - 1)(|alpha|² - R²))` inside radius `R`, rejecting beyond it.
///
/// `R` is chosen so the heralded distribution has mass below `1e-7` outside it.
pub fn prior_monte_carlo(d: f64, gain: f64, samples: usize, seed: u64) -> Result<PriorEstimate> {
    let target = postselected_prior_variance(d, gain)?;
    let excess = gain * gain - 1.0;
    let radius_sq = 16.0 * target.max(d);
    let normal = Normal::new(0.0, (d / 2.0).sqrt())
        .map_err(|e| NlaError::InvalidParameter(e.to_string()))?;
    // acceptance weight peaks at the rim for g > 1 and at the origin otherwise
    let reference = if excess >= 0.0 { radius_sq } else { 0.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq, mut accepted) = (0.0, 0.0, 0usize);
    for _ in 0..samples {
        let re: f64 = normal.sample(&mut rng);
        let im: f64 = normal.sample(&mut rng);
        let m = re * re + im * im;
        if m > radius_sq {
            continue;
        }
        let accept = (excess * (m - reference)).exp();
        if rng.gen::<f64>() < accept {
            sum += m;
            sum_sq += m * m;
            accepted += 1;
        }
    }
    if accepted < 2 {
        return Err(NlaError::InvalidParameter("too few accepted samples".into()));
    }
    let n = accepted as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(PriorEstimate {
        mean,
        std_err: (var / n).sqrt(),
        accepted,
        drawn: samples,
    })
}
