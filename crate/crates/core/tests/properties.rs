//! Invariants that must hold across random inputs.

use nla_core::applications::{
    clone_coherent, distill_numeric, distill_params, lossy_epr, purity_product, Amplifier,
    CloneModel, CLONER_ETA,
};
use nla_core::fock::{
    epr_state, fidelity, partial_trace, partial_trace_pure, tensor, DensityOperator, FockVector,
    MultiModeState,
};
use nla_core::nla::{
    asymptotic_operator, gain, misfire_density, nla_operator, physical_circuit,
    success_probability_asymptotic,
};
use nla_core::optics::{
    apply_beamsplitter, apply_nsplitter, loss_channel_mixed, loss_channel_purified,
    BeamsplitterSpec, NsplitterSpec,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut impl Rng, cutoffs: &[usize]) -> MultiModeState {
    let dim: usize = cutoffs.iter().product();
    let amps = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    MultiModeState::new(cutoffs.to_vec(), amps).unwrap().normalized().unwrap()
}

fn random_mixed(rng: &mut impl Rng, cutoffs: &[usize], rank: usize) -> DensityOperator {
    let mut rho: Option<DensityOperator> = None;
    for _ in 0..rank {
        let w = rng.gen_range(0.1..1.0);
        let term = DensityOperator::from_pure(&random_state(rng, cutoffs)).scaled(w);
        rho = Some(match rho {
            None => term,
            Some(r) => r.add(&term).unwrap(),
        });
    }
    rho.unwrap().normalized().unwrap()
}

#[test]
fn partial_trace_preserves_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..1000 {
        let cutoffs = [2 + i % 3, 2 + (i / 3) % 2, 2];
        let traced: &[usize] = match i % 3 {
            0 => &[0],
            1 => &[1, 2],
            _ => &[2],
        };
        let s = random_state(&mut rng, &cutoffs).scaled(Complex64::new(0.7, 0.0));
        let r = partial_trace_pure(&s, traced).unwrap();
        assert!((r.trace() - s.norm_sq()).abs() < 1e-12);
        if i % 10 == 0 {
            let full = DensityOperator::from_pure(&s);
            let r2 = partial_trace(&full, traced).unwrap();
            assert!((r2.trace() - s.norm_sq()).abs() < 1e-12);
        }
    }
}

#[test]
fn tensor_then_trace_recovers_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let a = random_state(&mut rng, &[3, 2]);
        let b = random_state(&mut rng, &[4]);
        let r = partial_trace_pure(&tensor(&a, &b), &[2]).unwrap();
        let expect = DensityOperator::from_pure(&a);
        assert!((r.matrix() - expect.matrix()).norm() < 1e-12);
    }
}

#[test]
fn constructed_operators_are_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let rho = random_mixed(&mut rng, &[3, 3], 3);
        rho.validate().unwrap();
        let reduced = partial_trace(&rho, &[0]).unwrap();
        reduced.validate().unwrap();
        let lossy = loss_channel_mixed(&rho, rng.gen_range(0.0..1.0), 1).unwrap();
        lossy.validate().unwrap();
    }
    lossy_epr(0.5, 0.3, 20).unwrap().validate().unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fidelity_is_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_state(&mut rng, &[4]);
        let b = random_state(&mut rng, &[4]);
        let fa = fidelity(&a, &b).unwrap();
        prop_assert!((fa - fidelity(&b, &a).unwrap()).abs() < 1e-10);
        let r = random_mixed(&mut rng, &[4], 2);
        let s = random_mixed(&mut rng, &[4], 3);
        prop_assert!((fidelity(&r, &s).unwrap() - fidelity(&s, &r).unwrap()).abs() < 1e-10);
        prop_assert!((fidelity(&r, &a).unwrap() - fidelity(&a, &r).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn pure_fidelity_one_only_up_to_phase(seed in any::<u64>(), phase in 0.0..std::f64::consts::TAU) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_state(&mut rng, &[3, 2]);
        let rotated = a.scaled(Complex64::from_polar(1.0, phase));
        prop_assert!((fidelity(&a, &rotated).unwrap() - 1.0).abs() < 1e-12);
        let b = random_state(&mut rng, &[3, 2]);
        prop_assert!(fidelity(&a, &b).unwrap() < 1.0 - 1e-6);
    }

    #[test]
    fn beamsplitter_preserves_norm_and_photon_sectors(seed in any::<u64>(), t in 0.0..=1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // keep modes 0 and 1 jointly below 4 photons so the mix fits cutoff 4
        let raw = random_state(&mut rng, &[4, 4, 2]);
        let amps = raw.amplitudes().iter().enumerate()
            .map(|(j, x)| { let o = raw.occupation(j); if o[0] + o[1] > 3 { Complex64::default() } else { *x } })
            .collect();
        let s = MultiModeState::new(raw.cutoffs().to_vec(), amps).unwrap();
        let out = apply_beamsplitter(&s, &BeamsplitterSpec::new(t, 0, 1).unwrap());
        prop_assert!(out.is_ok(), "{:?}", out.as_ref().err());
        let out = out.unwrap();
        prop_assert!((out.norm_sq() - s.norm_sq()).abs() < 1e-12);
        let sector = |st: &MultiModeState| {
            let mut w = vec![0.0; 14];
            for (i, a) in st.amplitudes().iter().enumerate() {
                let o = st.occupation(i);
                w[o[0] + o[1] + 7 * o[2]] += a.norm_sqr();
            }
            w
        };
        for (x, y) in sector(&s).iter().zip(sector(&out)) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_composes(seed in any::<u64>(), e1 in 0.0..=1.0f64, e2 in 0.0..=1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed(&mut rng, &[5, 2], 2);
        let twice = loss_channel_mixed(&loss_channel_mixed(&rho, e1, 0).unwrap(), e2, 0).unwrap();
        let once = loss_channel_mixed(&rho, e1 * e2, 0).unwrap();
        prop_assert!((twice.matrix() - once.matrix()).norm() < 1e-10);
    }

    #[test]
    fn purified_loss_matches_kraus(seed in any::<u64>(), eps in 0.0..=1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(&mut rng, &[3, 4]);
        let via_env = partial_trace_pure(&loss_channel_purified(&s, eps, 1).unwrap(), &[2]).unwrap();
        let direct = loss_channel_mixed(&DensityOperator::from_pure(&s), eps, 1).unwrap();
        prop_assert!((via_env.matrix() - direct.matrix()).norm() < 1e-12);
    }

    #[test]
    fn amplifier_blocks_photons_above_arm_count(seed in any::<u64>(), arms in 1usize..6, eta in 0.05..0.95f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(&mut rng, &[9]);
        let v = FockVector::from_amplitudes(s.amplitudes().to_vec()).unwrap();
        let (out, _) = nla_operator(arms, eta, 9).unwrap().apply(&v);
        for n in arms + 1..9 {
            prop_assert_eq!(out.amplitude(n), Complex64::default());
        }
    }

    #[test]
    fn unit_gain_is_pure_truncation(seed in any::<u64>(), arms in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(&mut rng, &[2]);
        let v = FockVector::from_amplitudes(s.amplitudes().to_vec()).unwrap();
        let (out, _) = nla_operator(arms, 0.5, 2).unwrap().apply(&v);
        // on {|0>,|1>} the only effect is a global herald factor
        prop_assert!((fidelity(&out, &v).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!((gain(0.5) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn oracle_patterns_contribute_equally() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for arms in 1..=3 {
        for _ in 0..5 {
            let s = random_state(&mut rng, &[4]);
            let v = FockVector::from_amplitudes(s.amplitudes().to_vec()).unwrap();
            let out = physical_circuit(&v, arms, 0.3).unwrap();
            assert_eq!(out.pattern_probabilities.len(), 1 << arms);
            let first = out.pattern_probabilities[0];
            for p in &out.pattern_probabilities {
                assert!((p - first).abs() <= 1e-12 * first);
            }
        }
    }
}

#[test]
fn asymptotic_probability_within_five_percent() {
    // holds once N >= 20 g² |alpha|²
    let eta = 1.0 / 3.0;
    let g2 = gain(eta).powi(2);
    for &a in &[0.2, 0.4, 0.6] {
        let alpha = Complex64::new(a, 0.0);
        let arms = (20.0 * g2 * a * a).ceil() as usize;
        let op = nla_operator(arms, eta, arms + 1).unwrap();
        let (_, rec) = op.apply(&nla_core::fock::coherent_state(alpha, 40).unwrap());
        let asym = success_probability_asymptotic(alpha, arms, eta);
        assert!((rec.success_probability / asym - 1.0).abs() < 0.05, "alpha={a} N={arms}");
    }
}

#[test]
fn distill_asymptotic_grid() {
    let g = 1.8;
    for i in 0..5 {
        for j in 0..5 {
            let chi = 0.05 + 0.08 * i as f64;
            let eps = 0.2 + 0.2 * j as f64;
            let p = distill_params(chi, eps, g).unwrap();
            assert!(p.physical);
            let out = distill_numeric(chi, eps, Amplifier::Asymptotic(asymptotic_operator(g).unwrap()), None).unwrap();
            assert!(1.0 - out.fidelity < 1e-9, "chi={chi} eps={eps}: {}", out.fidelity);
        }
    }
}

#[test]
fn effective_parameters_increase() {
    for gi in 1..=5 {
        let g = 1.0 + 0.5 * gi as f64;
        for ci in 1..=5 {
            for ei in 1..=9 {
                let chi = 0.05 * ci as f64;
                let eps = 0.1 * ei as f64;
                let p = distill_params(chi, eps, g).unwrap();
                assert!(p.chi_prime > chi && p.eps_prime > eps);
                assert!(p.eps_prime <= 1.0);
            }
        }
    }
}

#[test]
fn clones_are_identical() {
    for model in [
        CloneModel::Asymptotic,
        CloneModel::Finite { arms: 4, eta: CLONER_ETA },
    ] {
        let out = clone_coherent(Complex64::new(0.45, 0.2), model).unwrap();
        assert!((out.clones[0].matrix() - out.clones[1].matrix()).norm() < 1e-12);
    }
}

#[test]
fn lossy_epr_purity_product() {
    for &chi in &[0.1, 0.3, 0.5] {
        for &eps in &[0.0, 0.3, 0.7, 0.99, 1.0] {
            let rho = lossy_epr(chi, eps, 40).unwrap();
            let rep = purity_product(&rho).unwrap();
            assert!(rep.product >= 1.0 - 1e-9);
            if eps == 1.0 {
                assert!((rep.product - 1.0).abs() < 1e-9);
            } else {
                assert!(rep.product > 1.0 + 1e-9, "chi={chi} eps={eps}");
            }
        }
    }
}

#[test]
fn misfire_mixing_follows_gamma_alpha_over_eta() {
    // mixedness grows with gamma |alpha|² / eta at fixed N
    let arms = 4;
    let mut last = -1.0;
    for &(gamma, a, eta) in &[
        (0.001, 0.2, 0.5),
        (0.01, 0.2, 0.5),
        (0.01, 0.4, 0.5),
        (0.01, 0.4, 0.2),
        (0.05, 0.6, 0.2),
    ] {
        let m = misfire_density(Complex64::new(a, 0.0), arms, eta, gamma).unwrap();
        let mixing = 1.0 - m.normalized_density().unwrap().purity();
        assert!(mixing > last, "gamma={gamma} a={a} eta={eta}");
        last = mixing;
    }
    let small = misfire_density(Complex64::new(0.2, 0.0), arms, 0.5, 0.001).unwrap();
    assert!(1.0 - small.normalized_density().unwrap().purity() < 1e-3);
}

#[test]
fn nsplitter_preserves_norm_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for arms in 2..=4 {
        let spec = NsplitterSpec::new(arms).unwrap();
        let mut cutoffs = vec![3; arms];
        cutoffs[0] = 3;
        // two photons at most in the first mode, vacuum elsewhere
        let first = random_state(&mut rng, &[3]);
        let mut s = first.clone();
        for _ in 1..arms {
            s = tensor(&s, &MultiModeState::vacuum(&[3]).unwrap());
        }
        let out = apply_nsplitter(&s, &spec, false).unwrap();
        assert!((out.norm_sq() - 1.0).abs() < 1e-12);
        let back = apply_nsplitter(&out, &spec, true).unwrap();
        assert!(1.0 - fidelity(&back, &s).unwrap() < 1e-12);
    }
}

#[test]
fn amplified_epr_matches_gain_times_chi() {
    for &(chi, g) in &[(0.1, 3.0), (0.3, 2.0), (0.45, 1.5)] {
        let cut = 60;
        let out = asymptotic_operator(g).unwrap().apply_mode(&epr_state(chi, cut).unwrap(), 1).unwrap();
        assert!(1.0 - fidelity(&out, &epr_state(g * chi, cut).unwrap()).unwrap() < 1e-12);
    }
}
