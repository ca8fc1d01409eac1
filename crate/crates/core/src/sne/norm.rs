use std::fmt;
use std::sync::Arc;

use crate::error::{param, Result};
use crate::privacy::RandomSource;

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A monotone symmetric norm on `R^n`.
#[derive(Clone)]
pub enum NormSpec {
    Lp(f64),
    /// Sum of the `k` largest absolute entries.
    TopK(usize),
    /// Caller-supplied norm together with its value on a standard basis vector.
    Custom { evaluator: Evaluator, unit: f64, name: String },
}

impl fmt::Debug for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::Lp(p) => write!(f, "Lp({p})"),
            NormSpec::TopK(k) => write!(f, "TopK({k})"),
            NormSpec::Custom { name, unit, .. } => write!(f, "Custom({name}, unit={unit})"),
        }
    }
}

impl NormSpec {
    pub fn custom(
        name: impl Into<String>,
        unit: f64,
        evaluator: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        NormSpec::Custom { evaluator: Arc::new(evaluator), unit, name: name.into() }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            NormSpec::Lp(p) if !(p >= 1.0) => Err(param(format!("l_p needs p >= 1, got {p}"))),
            NormSpec::TopK(k) if k == 0 || k > n => {
                Err(param(format!("Top-k needs k in [1, {n}], got {k}")))
            }
            NormSpec::Custom { unit, .. } if !(unit > 0.0 && unit.is_finite()) => {
                Err(param(format!("custom norm needs a positive unit value, got {unit}")))
            }
            _ => Ok(()),
        }
    }

    /// `L(e_1)`.
    pub fn unit_value(&self) -> f64 {
        match self {
            NormSpec::Lp(_) | NormSpec::TopK(_) => 1.0,
            NormSpec::Custom { unit, .. } => *unit,
        }
    }

    pub fn label(&self) -> String {
        match self {
            NormSpec::Lp(p) => format!("l{p}"),
            NormSpec::TopK(k) => format!("top{k}"),
            NormSpec::Custom { name, .. } => name.clone(),
        }
    }
}

pub fn eval_norm(spec: &NormSpec, v: &[f64]) -> Result<f64> {
    spec.validate(v.len())?;
    Ok(match spec {
        NormSpec::Lp(p) => lp_norm(v, *p),
        NormSpec::TopK(k) => topk_prefix_sums(v)[*k - 1],
        NormSpec::Custom { evaluator, .. } => evaluator(v),
    })
}

fn lp_norm(v: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        v.iter().map(|x| x.abs()).sum()
    } else if p == 2.0 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    } else if p.is_infinite() {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Absolute values sorted descending; equal magnitudes keep index order.
pub fn sorted_magnitudes(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    idx.into_iter().map(|i| v[i].abs()).collect()
}

/// All Top-k norms at once: entry `k - 1` is `||v||_topk`.
pub fn topk_prefix_sums(v: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    sorted_magnitudes(v)
        .into_iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

/// Randomized audit that a norm is symmetric and monotone on `R^n`:
/// permuting or shrinking coordinates in magnitude must keep the value or
/// lower it. Returns the first violating pair.
pub fn audit_norm(
    spec: &NormSpec,
    n: usize,
    trials: usize,
    rng: &mut RandomSource,
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    spec.validate(n)?;
    let tol = 1e-9;
    for _ in 0..trials {
        let v: Vec<f64> = (0..n).map(|_| rng.uniform(-10.0, 10.0)).collect();
        let base = eval_norm(spec, &v)?;
        let mut perm = v.clone();
        for i in (1..n).rev() {
            perm.swap(i, rng.below(i + 1));
        }
        for x in perm.iter_mut() {
            if rng.bernoulli(0.5) {
                *x = -*x;
            }
        }
        if (eval_norm(spec, &perm)? - base).abs() > tol * (1.0 + base) {
            return Ok(Some((v, perm)));
        }
        let shrunk: Vec<f64> = v.iter().map(|x| x * rng.uniform(0.0, 1.0)).collect();
        if eval_norm(spec, &shrunk)? > base + tol * (1.0 + base) {
            return Ok(Some((v, shrunk)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topk_values() {
        let f = [3.0, 3.0, 2.0, 0.0];
        let got: Vec<f64> = (1..=4).map(|k| eval_norm(&NormSpec::TopK(k), &f).unwrap()).collect();
        assert_eq!(got, vec![3.0, 6.0, 8.0, 8.0]);
        assert_eq!(topk_prefix_sums(&[-5.0, 1.0]), vec![5.0, 6.0]);
    }

    #[test]
    fn lp_values() {
        assert_eq!(eval_norm(&NormSpec::Lp(2.0), &[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(eval_norm(&NormSpec::Lp(1.0), &[3.0, -4.0]).unwrap(), 7.0);
        assert!((eval_norm(&NormSpec::Lp(3.0), &[1.0, 1.0]).unwrap() - 2f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(eval_norm(&NormSpec::Lp(0.5), &[1.0]).is_err());
        assert!(eval_norm(&NormSpec::TopK(0), &[1.0]).is_err());
        assert!(eval_norm(&NormSpec::TopK(3), &[1.0, 2.0]).is_err());
    }

    #[test]
    fn l1_dominates_scaled_norms() {
        let mut rng = RandomSource::new(4);
        let specs = [NormSpec::Lp(2.0), NormSpec::Lp(3.5), NormSpec::TopK(3), NormSpec::Lp(f64::INFINITY)];
        for _ in 0..200 {
            let v: Vec<f64> = (0..6).map(|_| rng.uniform(-5.0, 5.0)).collect();
            let l1 = eval_norm(&NormSpec::Lp(1.0), &v).unwrap();
            for s in &specs {
                assert!(eval_norm(s, &v).unwrap() <= s.unit_value() * l1 + 1e-9);
            }
        }
    }

    #[test]
    fn audit_accepts_norms_and_flags_non_norms() {
        let mut rng = RandomSource::new(1);
        let ok = NormSpec::custom("2*top2", 2.0, |v| 2.0 * topk_prefix_sums(v)[1]);
        assert!(audit_norm(&ok, 5, 200, &mut rng).unwrap().is_none());
        let first_only = NormSpec::custom("first", 1.0, |v| v[0].abs());
        assert!(audit_norm(&first_only, 5, 200, &mut rng).unwrap().is_some());
    }
}
