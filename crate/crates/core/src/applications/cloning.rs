use num_complex::Complex64;

use crate::error::{NlaError, Result};
use crate::fock::{
    coherent_state, fidelity, min_cutoff_coherent, partial_trace_pure, tensor, DensityOperator,
    MultiModeState, TAIL_TOLERANCE,
};
use crate::nla::{asymptotic_operator, nla_operator, HeraldRecord};
use crate::optics::{apply_beamsplitter, BeamsplitterSpec};

/// Scissor transmission giving exact intensity gain 2.
pub const CLONER_ETA: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CloneModel {
    /// Large-N amplifier with gain exactly `sqrt(2)`.
    Asymptotic,
    Finite { arms: usize, eta: f64 },
}

#[derive(Debug, Clone)]
pub struct CloneOutput {
    /// Normalized two-mode state leaving the splitter.
    pub state: MultiModeState,
    pub record: Option<HeraldRecord>,
    pub clones: [DensityOperator; 2],
    /// Fidelity of each clone with the input coherent state.
    pub clone_fidelities: [f64; 2],
}

/// Amplify `|alpha>` then split it on a 50:50 beamsplitter against vacuum.
pub fn clone_coherent(alpha: Complex64, model: CloneModel) -> Result<CloneOutput> {
    let (amplified, record) = match model {
        CloneModel::Asymptotic => {
            let g = 2f64.sqrt();
            let cutoff = min_cutoff_coherent(alpha * g, TAIL_TOLERANCE) + 2;
            let input = coherent_state(alpha, cutoff)?;
            (asymptotic_operator(g)?.apply(&input)?, None)
        }
        CloneModel::Finite { arms, eta } => {
            // the operator annihilates |n > N>, so cutoff N + 1 is exact
            let input = coherent_state(alpha, arms + 1)?;
            let (out, rec) = nla_operator(arms, eta, arms + 1)?.apply(&input);
            (out, Some(rec))
        }
    };
    let amplified = amplified.normalized().map_err(|_| NlaError::ZeroNorm)?;
    let cutoff = amplified.cutoff();
    // signal enters the second port so both clones carry +alpha
    let joint = tensor(&MultiModeState::vacuum(&[cutoff])?, &amplified.into());
    let state = apply_beamsplitter(&joint, &BeamsplitterSpec::new(0.5, 0, 1)?)?;
    let clones = [
        partial_trace_pure(&state, &[1])?,
        partial_trace_pure(&state, &[0])?,
    ];
    let reference = coherent_state(alpha, min_cutoff_coherent(alpha, TAIL_TOLERANCE).max(cutoff))?;
    let clone_fidelities = [
        fidelity(&clones[0], &reference)?,
        fidelity(&clones[1], &reference)?,
    ];
    Ok(CloneOutput {
        state,
        record,
        clones,
        clone_fidelities,
    })
}
