//! Linear-optical elements acting on Fock-space states.
//!
//! Beamsplitter convention (Schrodinger picture, on creation operators of the
//! mode pair `(a, b)` with intensity transmissivity `t`):
//!
//! ```text
//! a† -> sqrt(t) a† - sqrt(1-t) b†
//! b† -> sqrt(1-t) a† + sqrt(t) b†
//! ```
//!
//! so `|1,0> -> (|1,0> - |0,1>)/sqrt(2)` at `t = 1/2`, and a coherent state in
//! port `a` leaves as `|sqrt(t) alpha> |-sqrt(1-t) alpha>`. The inverse of a
//! beamsplitter is the same transmissivity with the mode pair swapped.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{NlaError, Result};
use crate::fock::{ln_factorial, partial_trace_pure, DensityOperator, FockVector, MultiModeState};

/// Dropped norm² that still counts as "nothing left the truncated basis".
pub const OVERFLOW_TOLERANCE: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamsplitterSpec {
    transmissivity: f64,
    modes: (usize, usize),
}

impl BeamsplitterSpec {
    pub fn new(transmissivity: f64, a: usize, b: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmissivity) {
            return Err(NlaError::InvalidParameter(format!(
                "transmissivity {transmissivity} outside [0, 1]"
            )));
        }
        if a == b {
            return Err(NlaError::InvalidParameter(
                "beamsplitter needs two distinct modes".into(),
            ));
        }
        Ok(Self {
            transmissivity,
            modes: (a, b),
        })
    }

    pub fn transmissivity(&self) -> f64 {
        self.transmissivity
    }

    pub fn modes(&self) -> (usize, usize) {
        self.modes
    }

    pub fn inverse(&self) -> Self {
        Self {
            transmissivity: self.transmissivity,
            modes: (self.modes.1, self.modes.0),
        }
    }
}

/// Amplitudes `(p, c)` with `|n, m> -> sum_p c |p, n+m-p>` for one sector.
fn sector_row(n: usize, m: usize, t: f64) -> Vec<(usize, f64)> {
    let st = t.sqrt();
    let r = (1.0 - t).sqrt();
    let total = n + m;
    let mut poly = vec![0.0; total + 1];
    for i in 0..=n {
        let ci = binomial(n, i) * st.powi(i as i32) * (-r).powi((n - i) as i32);
        if ci == 0.0 {
            continue;
        }
        for j in 0..=m {
            let cj = binomial(m, j) * r.powi(j as i32) * st.powi((m - j) as i32);
            poly[i + j] += ci * cj;
        }
    }
    let ln_norm = 0.5 * (ln_factorial(n) + ln_factorial(m));
    poly.into_iter()
        .enumerate()
        .filter(|(_, c)| *c != 0.0)
        .map(|(p, c)| {
            let scale = (0.5 * (ln_factorial(p) + ln_factorial(total - p)) - ln_norm).exp();
            (p, c * scale)
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))
        .exp()
        .round()
}

/// Applies a beamsplitter; fails if amplitude would leave the truncated basis.
pub fn apply_beamsplitter(state: &MultiModeState, spec: &BeamsplitterSpec) -> Result<MultiModeState> {
    let (a, b) = spec.modes;
    state.check_mode(a)?;
    state.check_mode(b)?;
    let t = spec.transmissivity;
    let cut = state.cutoffs().to_vec();
    let strides = state.strides();
    let mut out = vec![Complex64::default(); state.dim()];
    let mut spilled: BTreeMap<(usize, usize, usize), Complex64> = BTreeMap::new();
    let mut rows: BTreeMap<(usize, usize), Vec<(usize, f64)>> = BTreeMap::new();

    for (idx, amp) in state.amplitudes().iter().enumerate() {
        if *amp == Complex64::default() {
            continue;
        }
        let n = (idx / strides[a]) % cut[a];
        let m = (idx / strides[b]) % cut[b];
        let base = idx - n * strides[a] - m * strides[b];
        let row = rows.entry((n, m)).or_insert_with(|| sector_row(n, m, t));
        for &(p, c) in row.iter() {
            let q = n + m - p;
            if p < cut[a] && q < cut[b] {
                out[base + p * strides[a] + q * strides[b]] += amp * c;
            } else {
                *spilled.entry((base, p, q)).or_default() += amp * c;
            }
        }
    }
    let dropped: f64 = spilled.values().map(|x| x.norm_sqr()).sum();
    if dropped > OVERFLOW_TOLERANCE {
        let mode = spilled
            .keys()
            .find(|(_, p, _)| *p >= cut[a])
            .map(|_| a)
            .unwrap_or(b);
        return Err(NlaError::PhotonOverflow { mode, dropped });
    }
    Ok(MultiModeState::new(cut, out)?.with_truncation(state.truncation()))
}

/// Cascade of beamsplitters dividing mode 0 evenly over `arms` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct NsplitterSpec {
    arms: usize,
    construction: Vec<BeamsplitterSpec>,
}

impl NsplitterSpec {
    /// Arm `k` (1..N) is split from mode 0, carrying away `1/(N-k+1)` of what
    /// remains there.
    pub fn new(arms: usize) -> Result<Self> {
        if arms == 0 {
            return Err(NlaError::InvalidParameter("N-splitter needs at least one arm".into()));
        }
        let construction = (1..arms)
            .map(|k| {
                let remaining = (arms - k + 1) as f64;
                BeamsplitterSpec::new((remaining - 1.0) / remaining, 0, k)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { arms, construction })
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn construction(&self) -> &[BeamsplitterSpec] {
        &self.construction
    }

    /// Mode-space matrix `S`: input creation operator `j` maps to `sum_k S[k][j] b_k†`.
    pub fn unitary(&self) -> DMatrix<f64> {
        let mut s = DMatrix::<f64>::identity(self.arms, self.arms);
        for bs in &self.construction {
            let (a, b) = bs.modes;
            let st = bs.transmissivity.sqrt();
            let r = (1.0 - bs.transmissivity).sqrt();
            let mut step = DMatrix::<f64>::identity(self.arms, self.arms);
            step[(a, a)] = st;
            step[(b, a)] = -r;
            step[(a, b)] = r;
            step[(b, b)] = st;
            s = step * s;
        }
        s
    }
}

/// Applies the N-splitter (or its inverse) to the first `arms` modes of `state`.
pub fn apply_nsplitter(
    state: &MultiModeState,
    spec: &NsplitterSpec,
    inverse: bool,
) -> Result<MultiModeState> {
    if state.modes() < spec.arms {
        return Err(NlaError::DimensionMismatch(format!(
            "{}-arm splitter on a {}-mode state",
            spec.arms,
            state.modes()
        )));
    }
    let mut out = state.clone();
    if inverse {
        for bs in spec.construction.iter().rev() {
            out = apply_beamsplitter(&out, &bs.inverse())?;
        }
    } else {
        for bs in &spec.construction {
            out = apply_beamsplitter(&out, bs)?;
        }
    }
    Ok(out)
}

fn check_transmission(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(NlaError::InvalidParameter(format!(
            "transmission {epsilon} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Loss on `mode`, keeping the environment as a new last mode (same cutoff).
pub fn loss_channel_purified(
    state: &MultiModeState,
    epsilon: f64,
    mode: usize,
) -> Result<MultiModeState> {
    check_transmission(epsilon)?;
    state.check_mode(mode)?;
    let env = MultiModeState::vacuum(&[state.cutoffs()[mode]])?;
    let joint = crate::fock::tensor(state, &env);
    let env_mode = joint.modes() - 1;
    // the environment enters the first port so the signal keeps +sqrt(eps)
    apply_beamsplitter(&joint, &BeamsplitterSpec::new(epsilon, env_mode, mode)?)
}

/// Loss on `mode` of a pure state, returning the reduced density operator.
pub fn loss_channel(state: &MultiModeState, epsilon: f64, mode: usize) -> Result<DensityOperator> {
    let purified = loss_channel_purified(state, epsilon, mode)?;
    partial_trace_pure(&purified, &[purified.modes() - 1])
}

/// Loss on `mode` of a density operator via its Kraus decomposition
/// `E_k |n> = sqrt(C(n,k)) (1-eps)^(k/2) eps^((n-k)/2) |n-k>`.
pub fn loss_channel_mixed(
    rho: &DensityOperator,
    epsilon: f64,
    mode: usize,
) -> Result<DensityOperator> {
    check_transmission(epsilon)?;
    if mode >= rho.modes() {
        return Err(NlaError::InvalidMode {
            index: mode,
            modes: rho.modes(),
        });
    }
    let cut = rho.cutoffs().to_vec();
    let c = cut[mode];
    let stride: usize = cut[mode + 1..].iter().product();
    let dim = rho.dim();
    let m = rho.matrix();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    let kraus_elem = |n: usize, k: usize| -> f64 {
        let ln = 0.5 * (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k));
        let loss = if k == 0 { 1.0 } else { (1.0 - epsilon).powf(k as f64 / 2.0) };
        let keep = if n == k { 1.0 } else { epsilon.powf((n - k) as f64 / 2.0) };
        ln.exp() * loss * keep
    };
    for k in 0..c {
        // rows/cols with n >= k map to n - k
        let coeff: Vec<Option<(usize, f64)>> = (0..dim)
            .map(|i| {
                let n = (i / stride) % c;
                (n >= k).then(|| (i - k * stride, kraus_elem(n, k)))
            })
            .collect();
        for j in 0..dim {
            let Some((jj, cj)) = coeff[j] else { continue };
            if cj == 0.0 {
                continue;
            }
            for i in 0..dim {
                let Some((ii, ci)) = coeff[i] else { continue };
                out[(ii, jj)] += m[(i, j)] * (ci * cj);
            }
        }
    }
    DensityOperator::from_parts(cut, out)
}

/// Multiplies `|n>` in `mode` by `e^{i n theta}`.
pub fn phase_shift(state: &MultiModeState, theta: f64, mode: usize) -> Result<MultiModeState> {
    state.check_mode(mode)?;
    let c = state.cutoffs()[mode];
    let stride = state.strides()[mode];
    let mut out = state.clone();
    for (i, amp) in out.amplitudes_mut().iter_mut().enumerate() {
        let n = (i / stride) % c;
        *amp *= Complex64::from_polar(1.0, n as f64 * theta);
    }
    Ok(out)
}

pub fn phase_shift_fock(state: &FockVector, theta: f64) -> FockVector {
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, a)| a * Complex64::from_polar(1.0, n as f64 * theta))
        .collect();
    if state.is_normalized() {
        FockVector::from_amplitudes(amps).expect("nonempty")
    } else {
        FockVector::unnormalized(amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, epr_state, fidelity, number_state, tensor};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn unit_transmission_is_identity() {
        let s = epr_state(0.4, 6).unwrap();
        let out = apply_beamsplitter(&s, &BeamsplitterSpec::new(1.0, 0, 1).unwrap()).unwrap();
        for (x, y) in s.amplitudes().iter().zip(out.amplitudes()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn single_photon_balanced_split() {
        let s = MultiModeState::basis(&[2, 2], &[1, 0]).unwrap();
        let out = apply_beamsplitter(&s, &BeamsplitterSpec::new(0.5, 0, 1).unwrap()).unwrap();
        let h = 0.5f64.sqrt();
        assert!((out.amplitude(&[1, 0]) - c(h)).norm() < 1e-15);
        assert!((out.amplitude(&[0, 1]) - c(-h)).norm() < 1e-15);
    }

    #[test]
    fn two_photon_sector_hong_ou_mandel() {
        // |1,1> at t = 1/2 has no coincidence term
        let s = MultiModeState::basis(&[3, 3], &[1, 1]).unwrap();
        let out = apply_beamsplitter(&s, &BeamsplitterSpec::new(0.5, 0, 1).unwrap()).unwrap();
        assert!(out.amplitude(&[1, 1]).norm() < 1e-15);
        assert!((out.amplitude(&[2, 0]).norm_sqr() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn coherent_split_matches_displacement() {
        let alpha = Complex64::new(0.8, 0.3);
        let t = 0.3;
        let input = tensor(
            &coherent_state(alpha, 22).unwrap().into(),
            &MultiModeState::vacuum(&[22]).unwrap(),
        );
        let out = apply_beamsplitter(&input, &BeamsplitterSpec::new(t, 0, 1).unwrap()).unwrap();
        let target = tensor(
            &coherent_state(alpha * t.sqrt(), 22).unwrap().into(),
            &coherent_state(-alpha * (1.0 - t).sqrt(), 22).unwrap().into(),
        );
        assert!(1.0 - fidelity(&out, &target).unwrap() < 1e-10);
    }

    #[test]
    fn overflow_is_reported() {
        let s = MultiModeState::basis(&[2, 2], &[1, 1]).unwrap();
        let err = apply_beamsplitter(&s, &BeamsplitterSpec::new(0.5, 0, 1).unwrap()).unwrap_err();
        assert!(matches!(err, NlaError::PhotonOverflow { .. }));
    }

    #[test]
    fn nsplitter_first_column_uniform() {
        for n in 1..=6 {
            let u = NsplitterSpec::new(n).unwrap().unitary();
            for k in 0..n {
                assert!((u[(k, 0)].powi(2) - 1.0 / n as f64).abs() < 1e-12);
            }
            assert!((u.transpose() * &u - DMatrix::identity(n, n)).norm() < 1e-12);
        }
    }

    #[test]
    fn nsplitter_coherent_product() {
        let alpha = Complex64::new(0.5, 0.2);
        let n = 3;
        let cut = 14;
        let spec = NsplitterSpec::new(n).unwrap();
        let mut input: MultiModeState = coherent_state(alpha, cut).unwrap().into();
        for _ in 1..n {
            input = tensor(&input, &MultiModeState::vacuum(&[cut]).unwrap());
        }
        let out = apply_nsplitter(&input, &spec, false).unwrap();
        let u = spec.unitary();
        let mut target: Option<MultiModeState> = None;
        for k in 0..n {
            let arm: MultiModeState = coherent_state(alpha * u[(k, 0)], cut).unwrap().into();
            assert!(((alpha * u[(k, 0)]).norm() - alpha.norm() / (n as f64).sqrt()).abs() < 1e-12);
            target = Some(match target {
                None => arm,
                Some(t) => tensor(&t, &arm),
            });
        }
        assert!(1.0 - fidelity(&out, &target.unwrap()).unwrap() < 1e-10);

        let back = apply_nsplitter(&out, &spec, true).unwrap();
        for (x, y) in back.amplitudes().iter().zip(input.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn single_arm_splitter_is_identity() {
        let s: MultiModeState = coherent_state(c(0.4), 8).unwrap().into();
        let out = apply_nsplitter(&s, &NsplitterSpec::new(1).unwrap(), false).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn loss_limits() {
        let one: MultiModeState = number_state(1, 3).unwrap().into();
        let id = loss_channel(&one, 1.0, 0).unwrap();
        assert!((id.element(&[1], &[1]).re - 1.0).abs() < 1e-15);
        let dead = loss_channel(&one, 0.0, 0).unwrap();
        assert!((dead.element(&[0], &[0]).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn purified_loss_on_epr_matches_binomial_amplitudes() {
        let chi: f64 = 0.3;
        let eps: f64 = 0.5;
        let cut = 8;
        let s = epr_state(chi, cut).unwrap();
        let p = loss_channel_purified(&s, eps, 1).unwrap();
        let norm = (1.0 - chi * chi).sqrt();
        for n in 0..cut {
            for k in 0..=n {
                let expect = norm
                    * chi.powi(n as i32)
                    * binomial(n, k).sqrt()
                    * (1.0 - eps).powf(k as f64 / 2.0)
                    * eps.powf((n - k) as f64 / 2.0);
                let got = p.amplitude(&[n, n - k, k]);
                assert!((got - c(expect)).norm() < 1e-14, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn phase_shift_cases() {
        let h = 0.5f64.sqrt();
        let plus = FockVector::from_amplitudes(vec![c(h), c(h)]).unwrap();
        let minus = phase_shift_fock(&plus, std::f64::consts::PI);
        assert!((minus.amplitude(1) - c(-h)).norm() < 1e-15);
        let back = phase_shift_fock(&minus, std::f64::consts::PI);
        assert!((back.amplitude(1) - c(h)).norm() < 1e-15);
        assert_eq!(phase_shift_fock(&plus, 0.0), plus);
    }
}
