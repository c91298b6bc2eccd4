//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use nla_core::applications::{
    distill_numeric, distill_params, postselected_prior_variance, prior_monte_carlo,
    purity_product_pure, Amplifier,
};
use nla_core::experiments::{curve_peak, fig3_curve, fig4_point, fig4_default_gains, Fig4Settings};
use nla_core::fock::{amplitude_fidelity, coherent_state, epr_state, fidelity, FockVector};
use nla_core::nla::{asymptotic_operator, eta_for_gain, misfire_density, nla_operator, physical_circuit};
use nla_core::NlaError;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, detail: String) {
        if !ok {
            self.failures += 1;
        }
        println!("[{}] {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn headline(r: &mut Report) {
    let start = Instant::now();
    let chi = 0.1f64.tanh();
    let op = nla_operator(2, 0.05, 3).unwrap();
    let out = distill_numeric(chi, 1.0, Amplifier::Finite(&op), Some(15)).unwrap();
    let target = epr_state(0.4f64.tanh(), 30).unwrap();
    let state = out.state.with_cutoffs(&[30, 30]).unwrap();
    let f_sq = fidelity(&state, &target).unwrap();
    let f_amp = amplitude_fidelity(&state, &target).unwrap();
    let p = out.record.unwrap().success_probability;
    let elapsed = start.elapsed();

    let sq_ok = (f_sq - 0.993).abs() <= 0.003;
    let amp_ok = (f_amp - 0.993).abs() <= 0.003;
    let convention = match (sq_ok, amp_ok) {
        (true, true) => "both conventions",
        (true, false) => "squared-overlap convention",
        (false, true) => "amplitude convention",
        _ => "neither convention",
    };
    r.line(
        "1a headline fidelity",
        sq_ok || amp_ok,
        format!("F_squared = {f_sq:.6}, F_amplitude = {f_amp:.6}; target 0.993 +/- 0.003 met under {convention}"),
    );
    r.line(
        "1b headline success probability",
        (p - 0.002).abs() <= 0.0005,
        format!("P = {p:.6e} ({:.4}%); target 0.2% +/- 0.05%", 100.0 * p),
    );
    r.line(
        "1c headline runtime",
        elapsed < Duration::from_secs(1),
        format!("{elapsed:?} (< 1 s)"),
    );
}

fn variance_halving(r: &mut Report) {
    for (rr, expect) in [(0.1f64, 0.8187), (0.4, 0.4493)] {
        let s = epr_state(rr.tanh(), 60).unwrap();
        let rep = purity_product_pure(&s, 0, 1).unwrap();
        r.line(
            &format!("2 squeezed variance r={rr}"),
            (rep.v_minus - expect).abs() <= 1e-3,
            format!("v_minus = {:.6}, expected {expect} within 1e-3", rep.v_minus),
        );
    }
}

fn oracle_equivalence(r: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_f, mut worst_p) = (0.0f64, 0.0f64);
    for arms in 1..=3 {
        for &eta in &[0.05, 1.0 / 3.0, 0.5] {
            let op = nla_operator(arms, eta, 6).unwrap();
            for _ in 0..20 {
                let amps = (0..6)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let input = FockVector::from_amplitudes(amps).unwrap().normalized().unwrap();
                let (closed, rec) = op.apply(&input);
                let circ = physical_circuit(&input, arms, eta).unwrap();
                let f = fidelity(&circ.mixture, &closed).unwrap();
                let p = circ.record.success_probability;
                worst_f = worst_f.max(1.0 - f);
                worst_p = worst_p.max((p - rec.success_probability).abs() / rec.success_probability);
            }
        }
    }
    let elapsed = start.elapsed();
    r.line(
        "3 oracle equivalence",
        worst_f <= 1e-10 && worst_p <= 1e-9,
        format!("max 1-F = {worst_f:.2e} (<= 1e-10), max rel P err = {worst_p:.2e} (<= 1e-9), 180 inputs"),
    );
    r.line("3 oracle runtime", elapsed < Duration::from_secs(60), format!("{elapsed:?} (< 1 min)"));
}

fn fig3(r: &mut Report) {
    let gains: Vec<f64> = (5..=40).map(|k| 0.1 * k as f64).collect();
    let eta = 1.0 / 3.0;
    let mut peaks = Vec::new();
    for &a in &[0.1, 0.25, 0.5, 1.0] {
        let peak = curve_peak(&fig3_curve(a, 5, eta, &gains).unwrap()).unwrap();
        peaks.push((a, peak));
    }
    // "near g² = 2": within 20% of 2 on a 0.1 grid
    let small: Vec<_> = peaks.iter().filter(|(a, _)| *a <= 0.5).collect();
    let near = small.iter().all(|(_, p)| (p.target_gain - 2.0).abs() <= 0.4 && p.fidelity > 0.95);
    let desc = small
        .iter()
        .map(|(a, p)| format!("|a|={a}: G={:.1} F={:.5}", p.target_gain, p.fidelity))
        .collect::<Vec<_>>()
        .join(", ");
    r.line("4a fig3 peaks near G=2 with F > 0.95", near, desc);
    let g025 = peaks[1].1.target_gain;
    let g1 = peaks[3].1.target_gain;
    r.line(
        "4b fig3 gain saturation",
        g1 < g025,
        format!("peak G at |a|=1: {g1:.1} < at |a|=0.25: {g025:.1}"),
    );
    for (eta, g2, expect) in [(1.0 / 3.0, 2.0, 0.005), (eta_for_gain(6f64.sqrt()), 6.0, 0.0001)] {
        let p = fig3_curve(0.1, 5, eta, &[g2]).unwrap()[0].success_prob;
        r.line(
            &format!("4c fig3 success probability eta={eta:.4}"),
            p >= expect / 2.0 && p <= expect * 2.0,
            format!("P = {p:.4e} ({:.4}%) within factor 2 of {:.2}%", 100.0 * p, 100.0 * expect),
        );
    }
}

fn identities(r: &mut Report) {
    // effective squeezing exactly g chi
    let mut worst = 0.0f64;
    for &chi in &[0.05, 0.1, 0.2, 0.3] {
        for &g in &[1.2, 2.0, 3.0] {
            if g * chi < 1.0 {
                let p = distill_params(chi, 1.0, g).unwrap();
                worst = worst.max((p.chi_prime - g * chi).abs());
            }
        }
    }
    r.line("5a chi' = g chi", worst == 0.0, format!("max |chi' - g chi| = {worst:e}"));

    let g = 1.8;
    let mut worst_f = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            let chi = 0.05 + 0.08 * i as f64;
            let eps = 0.2 + 0.2 * j as f64;
            let out = distill_numeric(chi, eps, Amplifier::Asymptotic(asymptotic_operator(g).unwrap()), None).unwrap();
            worst_f = worst_f.max(1.0 - out.fidelity);
        }
    }
    r.line(
        "5b effective lossy EPR reproduced numerically",
        worst_f <= 1e-9,
        format!("max 1-F = {worst_f:.2e} over 5x5 (chi, eps) grid at g = {g}"),
    );

    let d = 0.1;
    let est = prior_monte_carlo(d, 2f64.sqrt(), 1_000_000, 7).unwrap();
    let expect = d / (1.0 - d);
    let z = (est.mean - expect).abs() / est.std_err;
    r.line(
        "5c post-selected prior variance (Monte Carlo)",
        z <= 3.0,
        format!("d' = {:.6} +/- {:.6} vs d/(1-d) = {expect:.6} ({z:.2} sigma, {} accepted of 1e6)", est.mean, est.std_err, est.accepted),
    );

    let mut ok = true;
    let mut cases = Vec::new();
    for &(chi, g) in &[(0.5, 1.999), (0.5, 2.0), (0.5, 2.001), (0.25, 3.99), (0.25, 4.0)] {
        let raised = matches!(
            asymptotic_operator(g).unwrap().apply_mode(&epr_state(chi, 40).unwrap(), 1),
            Err(NlaError::NonConvergent(_))
        ) && matches!(distill_params(chi, 1.0, g).map(|p| p.physical), Ok(false));
        let should = g * chi >= 1.0;
        ok &= raised == should;
        cases.push(format!("g chi={:.4}:{}", g * chi, if raised { "err" } else { "ok" }));
    }
    // gains with exactly representable squares so the boundary is hit exactly
    for &(d, g) in &[(0.33, 2.0), (1.0 / 3.0, 2.0), (0.34, 2.0), (0.12, 3.0), (0.125, 3.0)] {
        let raised = matches!(postselected_prior_variance(d, g), Err(NlaError::NonConvergent(_)));
        let should = (g * g - 1.0) * d >= 1.0;
        ok &= raised == should;
        cases.push(format!("(g²-1)d={:.4}:{}", (g * g - 1.0) * d, if raised { "err" } else { "ok" }));
    }
    r.line("5d nonconvergence boundary", ok, cases.join(", "));
}

fn fig4(r: &mut Report) {
    let settings = Fig4Settings::default();
    let rows: Vec<_> = fig4_default_gains()
        .into_iter()
        .filter_map(|g| fig4_point(g, &settings).unwrap())
        .collect();
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| b.success_prob.partial_cmp(&a.success_prob).unwrap());
    let decreasing = sorted.windows(2).all(|w| w[1].product < w[0].product);
    let above_one = rows.iter().all(|x| x.product > 1.0);
    let min_f = rows.iter().map(|x| x.fidelity).fold(1.0, f64::min);
    r.line(
        "6 fig4 purity/probability trend",
        rows.len() >= 3 && decreasing && above_one && min_f > 0.99,
        format!(
            "{} points, product {:.4} -> {:.4} as P {:.2e} -> {:.2e}, min F = {min_f:.5}",
            rows.len(),
            sorted[0].product,
            sorted.last().unwrap().product,
            sorted[0].success_prob,
            sorted.last().unwrap().success_prob
        ),
    );
}

fn misfire(r: &mut Report) {
    let alpha = Complex64::new(0.3, 0.0);
    let fs: Vec<(usize, f64)> = [5, 10, 15, 20]
        .iter()
        .map(|&n| (n, misfire_density(alpha, n, 1.0 / 3.0, 0.01).unwrap().term_fidelity().unwrap()))
        .collect();
    let at10 = fs.iter().find(|(n, _)| *n == 10).unwrap().1;
    let increasing = fs.windows(2).all(|w| w[1].1 > w[0].1);
    r.line(
        "7 misfire terms converge",
        at10 > 0.99 && increasing,
        fs.iter().map(|(n, f)| format!("N={n}: {f:.6}")).collect::<Vec<_>>().join(", "),
    );
}

fn convergence(r: &mut Report) {
    let alpha = Complex64::new(0.3, 0.0);
    let target = coherent_state(alpha * 2f64.sqrt(), 30).unwrap();
    let op = nla_operator(20, eta_for_gain(2f64.sqrt()), 21).unwrap();
    let (out, _) = op.apply(&coherent_state(alpha, 21).unwrap());
    let f = fidelity(&out, &target).unwrap();
    r.line("8 large-N convergence", 1.0 - f < 1e-3, format!("N=20: 1-F = {:.3e} (< 1e-3)", 1.0 - f));
}

fn main() {
    let mut r = Report { failures: 0 };
    headline(&mut r);
    variance_halving(&mut r);
    oracle_equivalence(&mut r);
    fig3(&mut r);
    identities(&mut r);
    fig4(&mut r);
    misfire(&mut r);
    convergence(&mut r);
    println!("acceptance: {} failing line(s)", r.failures);
    if r.failures > 0 {
        std::process::exit(1);
    }
}
