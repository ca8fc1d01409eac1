use serde::Serialize;

use super::msf::MsfProblem;
use crate::error::{param, Result};

/// Instance size `(n, d)` chosen for the item-level reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ItemPlan {
    pub n: usize,
    pub d: usize,
    /// Steps the generated stream uses, `xi(n) + 2 n d`.
    pub steps: usize,
    pub vertices: usize,
}

/// `sup { y : f(y) <= x }` for a nondecreasing `f`; `None` when unbounded
/// within the search range.
pub fn generalized_inverse(f: impl Fn(usize) -> usize, x: usize) -> Option<usize> {
    const LIMIT: usize = 1 << 40;
    if f(0) > x {
        return Some(0);
    }
    let mut hi = 1;
    while f(hi) <= x {
        if hi >= LIMIT {
            return None;
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if f(mid) <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Factor applied to the row cap; with a factor of 1 the cap alone already
/// needs `2 d n = 2T` steps.
pub const DEFAULT_ROW_SCALE: f64 = 0.25;

/// Chooses `(n, d)` for horizon `T`, vertex budget `N` and privacy `(eps, delta)`
/// using [`DEFAULT_ROW_SCALE`].
pub fn plan_item_level(problem: MsfProblem, horizon: usize, vertices: usize, epsilon: f64, delta: f64) -> Result<ItemPlan> {
    plan_item_level_with(problem, horizon, vertices, epsilon, delta, DEFAULT_ROW_SCALE)
}

/// With `delta > 0`: `d = floor((T eps)^(2/3))`, row cap `c = floor(s sqrt(d) / eps)`.
/// With `delta = 0`: `d = floor(sqrt(T eps))`, `c = floor(s sqrt(T / eps))`.
/// Then `n = min(c, nu^-(N), xi^-(T - 2 d c))`.
pub fn plan_item_level_with(
    problem: MsfProblem,
    horizon: usize,
    vertices: usize,
    epsilon: f64,
    delta: f64,
    scale: f64,
) -> Result<ItemPlan> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(param(format!("row scale must lie in (0, 1], got {scale}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) || !(0.0..1.0).contains(&delta) {
        return Err(param(format!("invalid privacy parameters eps = {epsilon}, delta = {delta}")));
    }
    let te = horizon as f64 * epsilon;
    let (d, cap) = if delta > 0.0 {
        let d = te.powf(2.0 / 3.0).floor() as usize;
        (d, (scale * (d as f64).sqrt() / epsilon).floor() as usize)
    } else {
        (te.sqrt().floor() as usize, (scale * (horizon as f64 / epsilon).sqrt()).floor() as usize)
    };
    let room = horizon.checked_sub(2 * d * cap);
    let nu_inv = generalized_inverse(|y| problem.size(y).0, vertices);
    let xi_inv = match room {
        Some(r) => generalized_inverse(|y| problem.size(y).1, r),
        None => Some(0),
    };
    let n = [Some(cap), nu_inv, xi_inv].into_iter().flatten().min().unwrap_or(0);
    if n == 0 || d == 0 {
        return Err(param(format!(
            "no feasible item-level plan for T = {horizon}, N = {vertices}, eps = {epsilon} (n = {n}, d = {d})"
        )));
    }
    let (nu, xi) = problem.size(n);
    Ok(ItemPlan { n, d, steps: xi + 2 * n * d, vertices: nu })
}
