//! WebAssembly bindings for the demo page in `www/`.
//!
//! The [`api`] functions are plain Rust so they are testable natively; the
//! exported wrappers only convert errors to JS exceptions.

use wasm_bindgen::prelude::*;

pub mod api {
    use nla_core::applications::{distill_numeric, purity_product, Amplifier};
    use nla_core::experiments::fig3_curve;
    use nla_core::fock::{coherent_state, fidelity, min_cutoff_coherent, TAIL_TOLERANCE};
    use nla_core::nla::nla_operator;
    use num_complex::Complex64;

    /// Largest arm count the page lets through; keeps a frame responsive.
    pub const MAX_ARMS: usize = 60;

    fn check_arms(arms: usize) -> Result<(), String> {
        if (1..=MAX_ARMS).contains(&arms) {
            Ok(())
        } else {
            Err(format!("arms must lie in 1..={MAX_ARMS}"))
        }
    }

    /// `steps` points of fidelity versus intensity gain in `[g_min, g_max]`,
    /// flattened as `[G0, F0, G1, F1, ...]`, followed by the success probability.
    pub fn fidelity_curve(alpha: f64, arms: usize, eta: f64, g_min: f64, g_max: f64, steps: usize) -> Result<Vec<f64>, String> {
        check_arms(arms)?;
        if steps < 2 || !(g_min > 0.0 && g_max > g_min) {
            return Err("need 0 < g_min < g_max and at least two steps".into());
        }
        let gains: Vec<f64> = (0..steps)
            .map(|k| g_min + (g_max - g_min) * k as f64 / (steps - 1) as f64)
            .collect();
        let rows = fig3_curve(alpha, arms, eta, &gains).map_err(|e| e.to_string())?;
        let mut out: Vec<f64> = rows.iter().flat_map(|r| [r.target_gain, r.fidelity]).collect();
        out.push(rows[0].success_prob);
        Ok(out)
    }

    /// Heralded output of a coherent input: `[P, F, gain, p_0, p_1, ...]` where
    /// `F` compares with `|g alpha>` and `p_n` are the normalized photon populations.
    pub fn amplify(re: f64, im: f64, arms: usize, eta: f64) -> Result<Vec<f64>, String> {
        check_arms(arms)?;
        let alpha = Complex64::new(re, im);
        if !(alpha.norm() <= 5.0) {
            return Err("|alpha| must be at most 5".into());
        }
        let cutoff = min_cutoff_coherent(alpha, TAIL_TOLERANCE).max(arms + 1);
        let input = coherent_state(alpha, cutoff).map_err(|e| e.to_string())?;
        let op = nla_operator(arms, eta, cutoff).map_err(|e| e.to_string())?;
        let (out, rec) = op.apply(&input);
        let t = alpha * op.gain();
        let target = coherent_state(t, min_cutoff_coherent(t, TAIL_TOLERANCE)).map_err(|e| e.to_string())?;
        let f = fidelity(&out, &target).map_err(|e| e.to_string())?;
        let pops = out.normalized().map_err(|e| e.to_string())?.populations();
        let mut v = vec![rec.success_probability, f, op.gain()];
        v.extend(pops.into_iter().take(arms + 1));
        Ok(v)
    }

    /// Distillation of a lossy EPR state:
    /// `[P, F, chi', eps', v_minus, v_plus, product]`.
    pub fn distill(chi: f64, epsilon: f64, arms: usize, eta: f64) -> Result<Vec<f64>, String> {
        check_arms(arms)?;
        let op = nla_operator(arms, eta, arms + 1).map_err(|e| e.to_string())?;
        let out = distill_numeric(chi, epsilon, Amplifier::Finite(&op), None).map_err(|e| e.to_string())?;
        let rep = purity_product(&out.state).map_err(|e| e.to_string())?;
        Ok(vec![
            out.record.map_or(f64::NAN, |r| r.success_probability),
            out.fidelity,
            out.params.chi_prime,
            out.params.eps_prime,
            rep.v_minus,
            rep.v_plus,
            rep.product,
        ])
    }
}

#[wasm_bindgen]
pub fn fidelity_curve(alpha: f64, arms: usize, eta: f64, g_min: f64, g_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    api::fidelity_curve(alpha, arms, eta, g_min, g_max, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn amplify(re: f64, im: f64, arms: usize, eta: f64) -> Result<Vec<f64>, JsError> {
    api::amplify(re, im, arms, eta).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn distill(chi: f64, epsilon: f64, arms: usize, eta: f64) -> Result<Vec<f64>, JsError> {
    api::distill(chi, epsilon, arms, eta).map_err(|e| JsError::new(&e))
}
