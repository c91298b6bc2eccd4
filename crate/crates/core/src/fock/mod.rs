//! Truncated Fock-space states and operators.

mod density;
mod fidelity;
mod multimode;
mod operator;
mod vector;

pub use density::{partial_trace, partial_trace_pure, DensityOperator};
pub use fidelity::{amplitude_fidelity, fidelity, StateRef};
pub use multimode::{epr_state, epr_state_auto, tensor, MultiModeState};
pub use operator::ModeOperator;
pub use vector::{
    coherent_state, coherent_state_strict, coherent_tail_mass, min_cutoff_coherent,
    min_cutoff_epr, number_state, FockVector, Normalization, TAIL_TOLERANCE,
};
pub(crate) use vector::ln_factorial;
