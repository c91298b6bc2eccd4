//! The heralded noiseless linear amplifier.

mod circuit;
mod misfire;
mod operator;
mod scissors;

pub use circuit::{
    physical_circuit, physical_circuit_with, scissor_arm, CircuitOptions, CircuitOutput,
    DEFAULT_ORACLE_ARMS,
};
pub use misfire::{misfire_density, MisfireMixture, FIRST_ORDER_LIMIT};
pub use operator::{
    asymptotic_operator, eta_for_gain, gain, nla_operator, success_probability_asymptotic,
    AsymptoticAmplifier, DiagonalAmplifierOp, HeraldRecord,
};
pub use scissors::{HeraldSign, ScissorOutcome};
