//! Brute-force simulation of the linear-optical amplifier circuit.
//!
//! The input mode is split over `N` arms by an N-splitter. Every arm meets a
//! scissor: a single-photon ancilla is divided by a beamsplitter of
//! transmission `eta`, the transmitted part is mixed with the arm on a 50:50
//! beamsplitter, and the two outputs of that 50:50 are counted. Exactly one
//! click in total heralds the arm; the reflected ancilla port becomes the new
//! arm mode. After all arms, the inverse N-splitter recombines them and every
//! port other than the output must be empty.
//!
//! Under the beamsplitter convention in [`crate::optics`], a click on the arm
//! side of the 50:50 flips the sign of `|1>`; that branch gets a phase
//! feedforward of `pi` on the arm output.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::HeraldRecord;
use super::scissors::HeraldSign;
use crate::error::{NlaError, Result};
use crate::fock::{tensor, DensityOperator, FockVector, MultiModeState};
use crate::optics::{apply_beamsplitter, apply_nsplitter, phase_shift, BeamsplitterSpec, NsplitterSpec};

pub const DEFAULT_ORACLE_ARMS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitOptions {
    pub max_arms: usize,
    /// Phase applied to an arm output after a minus-sign herald.
    pub feedforward_phase: f64,
}

impl Default for CircuitOptions {
    fn default() -> Self {
        Self {
            max_arms: DEFAULT_ORACLE_ARMS,
            feedforward_phase: std::f64::consts::PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitOutput {
    /// Dominant pure component of the heralded mixture, scaled so its norm² is
    /// that component's weight. Equals the full output when the mixture is pure.
    pub state: FockVector,
    /// Sum over accepted patterns of the conditional (unnormalized) outputs.
    pub mixture: DensityOperator,
    pub record: HeraldRecord,
    /// Probability of each accepted pattern; bit `k` set means arm `k` clicked
    /// on the ancilla side.
    pub pattern_probabilities: Vec<f64>,
}

/// Runs the full circuit on a single-mode input.
pub fn physical_circuit(input: &FockVector, arms: usize, eta: f64) -> Result<CircuitOutput> {
    physical_circuit_with(input, arms, eta, CircuitOptions::default())
}

pub fn physical_circuit_with(
    input: &FockVector,
    arms: usize,
    eta: f64,
    options: CircuitOptions,
) -> Result<CircuitOutput> {
    if arms == 0 {
        return Err(NlaError::InvalidParameter("need at least one arm".into()));
    }
    if arms > options.max_arms {
        return Err(NlaError::OracleLimit {
            arms,
            limit: options.max_arms,
        });
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(NlaError::InvalidParameter(format!("eta must lie in (0, 1), got {eta}")));
    }
    let support = input
        .amplitudes()
        .iter()
        .rposition(|a| *a != Complex64::default())
        .unwrap_or(0);
    let arm_cutoff = support + 1;

    let mut arms_state: MultiModeState = input.with_cutoff(arm_cutoff).into();
    for _ in 1..arms {
        arms_state = tensor(&arms_state, &MultiModeState::vacuum(&[arm_cutoff])?);
    }
    let splitter = NsplitterSpec::new(arms)?;
    let split = apply_nsplitter(&arms_state, &splitter, false)?;

    let mut branches = Vec::with_capacity(1 << arms);
    herald_arms(split, 0, 0, eta, &options, &mut branches)?;
    branches.sort_by_key(|(p, _)| *p);

    let out_photons = support.min(arms);
    let out_cutoff = out_photons + 1;
    let mut outputs = Vec::with_capacity(branches.len());
    for (_, state) in branches {
        let padded = state.with_cutoffs(&vec![out_cutoff; arms])?;
        let mut joined = apply_nsplitter(&padded, &splitter, true)?;
        // every port but the output must be dark
        for mode in (1..arms).rev() {
            joined = joined.project(mode, 0)?;
        }
        outputs.push(joined.amplitudes().to_vec());
    }

    let mut mixture = DMatrix::<Complex64>::zeros(out_cutoff, out_cutoff);
    let mut pattern_probabilities = Vec::with_capacity(outputs.len());
    for v in &outputs {
        let col = nalgebra::DVector::from_column_slice(v);
        mixture += &col * col.adjoint();
        pattern_probabilities.push(v.iter().map(|a| a.norm_sqr()).sum());
    }
    let mixture = DensityOperator::from_parts(vec![out_cutoff], mixture)?;
    let p = mixture.trace();
    Ok(CircuitOutput {
        state: dominant_component(&mixture),
        mixture,
        record: HeraldRecord {
            success_probability: p,
            accepted_patterns: outputs.len() as u64,
        },
        pattern_probabilities,
    })
}

/// Heralds arm `k` onward, branching on both accepted click patterns.
fn herald_arms(
    state: MultiModeState,
    k: usize,
    pattern: usize,
    eta: f64,
    options: &CircuitOptions,
    out: &mut Vec<(usize, MultiModeState)>,
) -> Result<()> {
    if k == state.modes() {
        out.push((pattern, state));
        return Ok(());
    }
    for (bit, sign) in [(0usize, HeraldSign::Minus), (1, HeraldSign::Plus)] {
        let next = scissor_arm(&state, k, eta, sign, options.feedforward_phase)?;
        herald_arms(next, k + 1, pattern | (bit << k), eta, options, out)?;
    }
    Ok(())
}

/// One heralded scissor on `mode`; the returned state has the same mode layout
/// with `mode` replaced by the scissor output.
pub fn scissor_arm(
    state: &MultiModeState,
    mode: usize,
    eta: f64,
    sign: HeraldSign,
    feedforward_phase: f64,
) -> Result<MultiModeState> {
    let arm_photons = state.cutoffs()[mode] - 1;
    let det_cutoff = arm_photons + 2;
    let mut cutoffs = state.cutoffs().to_vec();
    cutoffs[mode] = det_cutoff;
    let padded = state.with_cutoffs(&cutoffs)?;

    let ancilla = MultiModeState::basis(&[det_cutoff, 2], &[1, 0])?;
    let joint = tensor(&padded, &ancilla);
    let s = joint.modes() - 2;
    let v = joint.modes() - 1;
    let joint = apply_beamsplitter(&joint, &BeamsplitterSpec::new(eta, s, v)?)?;
    let joint = apply_beamsplitter(&joint, &BeamsplitterSpec::new(0.5, mode, s)?)?;

    // Minus: click on the arm port; Plus: click on the ancilla port.
    let (arm_clicks, ancilla_clicks) = match sign {
        HeraldSign::Minus => (1, 0),
        HeraldSign::Plus => (0, 1),
    };
    let conditioned = joint.project(s, ancilla_clicks)?.project(mode, arm_clicks)?;
    // the output port is now last; move it back into the arm's slot
    let last = conditioned.modes() - 1;
    let mut order: Vec<usize> = (0..last).collect();
    order.insert(mode, last);
    let placed = conditioned.permute_modes(&order)?;
    match sign {
        HeraldSign::Minus => phase_shift(&placed, feedforward_phase, mode),
        HeraldSign::Plus => Ok(placed),
    }
}

fn dominant_component(rho: &DensityOperator) -> FockVector {
    let eig = rho.matrix().clone().symmetric_eigen();
    let (idx, lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, l)| if *l > best.1 { (i, *l) } else { best });
    let col = eig.eigenvectors.column(idx);
    let lead = col
        .iter()
        .copied()
        .find(|a| a.norm() > 1e-12)
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    let scale = lambda.max(0.0).sqrt();
    FockVector::unnormalized(col.iter().map(|a| a * phase * scale).collect())
}
