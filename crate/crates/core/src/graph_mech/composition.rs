use crate::error::{param, Result};

/// Per-mechanism epsilon so that `k` adaptively composed mechanisms are
/// jointly `(eps_total, k * delta_i + delta_prime)`-DP.
pub fn advanced_composition_epsilon(k: usize, eps_total: f64, delta_prime: f64) -> Result<f64> {
    if k == 0 {
        return Err(param("composition needs at least one mechanism"));
    }
    if !(eps_total > 0.0 && eps_total <= 1.0) {
        return Err(param(format!("total epsilon must lie in (0, 1], got {eps_total}")));
    }
    if !(delta_prime > 0.0 && delta_prime < 1.0) {
        return Err(param(format!("delta' must lie in (0, 1), got {delta_prime}")));
    }
    Ok(eps_total / (2.0 * (2.0 * k as f64 * (1.0 / delta_prime).ln()).sqrt()))
}
