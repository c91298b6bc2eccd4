use num_complex::Complex64;

use crate::error::{NlaError, Result};
use crate::fock::ModeOperator;

/// Which single-click pattern heralded the scissor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeraldSign {
    Plus,
    Minus,
}

/// Kraus operator of one heralded scissor outcome: keeps `{|0>, |1>}` and
/// rescales `|1>` by the gain.
#[derive(Debug, Clone, PartialEq)]
pub struct ScissorOutcome {
    pub sign: HeraldSign,
    pub kraus: ModeOperator,
}

impl ScissorOutcome {
    /// `|0> -> sqrt(eta/2)|0>`, `|1> -> ±sqrt((1-eta)/2)|1>`, `|n>=2> -> 0`.
    pub fn new(eta: f64, sign: HeraldSign, in_cutoff: usize) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(NlaError::InvalidParameter(format!("eta must lie in (0, 1), got {eta}")));
        }
        let s = match sign {
            HeraldSign::Plus => 1.0,
            HeraldSign::Minus => -1.0,
        };
        let kraus = ModeOperator::from_fn(2, in_cutoff.max(2), |r, c| match (r, c) {
            (0, 0) => Complex64::new((eta / 2.0).sqrt(), 0.0),
            (1, 1) => Complex64::new(s * ((1.0 - eta) / 2.0).sqrt(), 0.0),
            _ => Complex64::default(),
        });
        Ok(Self { sign, kraus })
    }
}
