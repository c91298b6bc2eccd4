//! Coherent-state cloning and EPR distillation built on the amplifier.

mod cloning;
mod distill;
mod prior;
mod purity;

pub use cloning::{clone_coherent, CloneModel, CloneOutput, CLONER_ETA};
pub use distill::{
    distill_cutoff, distill_numeric, distilled_state, distill_params, lossy_epr, lossy_epr_purification, Amplifier,
    DistillOutput, EffectiveEprParams, MAX_DISTILL_CUTOFF,
};
pub use prior::{postselected_prior_variance, prior_monte_carlo, PriorEstimate};
pub use purity::{purity_product, purity_product_pure, PurityReport};
