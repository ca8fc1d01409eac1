use super::mechanism::SneMechanism;
use super::norm::{eval_norm, NormSpec};
use crate::error::{param, state, Result};
use crate::privacy::{PrivacyBudget, RandomSource};
use crate::stream::Update;

/// `m = ceil(ln(T / beta))` independent SNE copies, each at `eps / m`,
/// answering norm queries with the median over copies.
#[derive(Debug, Clone)]
pub struct BoostedSne {
    copies: Vec<SneMechanism>,
}

impl BoostedSne {
    pub fn new(
        n: usize,
        horizon: usize,
        zeta: f64,
        budget: &PrivacyBudget,
        mut rng: RandomSource,
    ) -> Result<Self> {
        budget.validate()?;
        let m = boosting_copies(horizon, budget.beta);
        let each = budget.split(m as f64)?;
        let copies = (0..m)
            .map(|_| SneMechanism::new(n, horizon, zeta, &each, rng.fork()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { copies })
    }

    pub fn copies(&self) -> &[SneMechanism] {
        &self.copies
    }

    pub fn step(&mut self, update: &Update) -> Result<()> {
        for c in &mut self.copies {
            c.step(update)?;
        }
        Ok(())
    }

    pub fn query(&self, spec: &NormSpec) -> Result<f64> {
        boosted_query(&self.copies, spec)
    }
}

pub fn boosting_copies(horizon: usize, beta: f64) -> usize {
    ((horizon as f64 / beta).ln().ceil() as usize).max(1)
}

/// Median of `spec` over the copies' current estimates.
pub fn boosted_query(copies: &[SneMechanism], spec: &NormSpec) -> Result<f64> {
    let values = copies
        .iter()
        .map(|c| eval_norm(spec, c.estimate()))
        .collect::<Result<Vec<_>>>()?;
    median(&values)
}

/// Median; the lower of the two middle values for even lengths.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(state("median of zero copies"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(param("median of NaN"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v[(v.len() - 1) / 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::privacy::NoiseMode;

    #[test]
    fn median_values() {
        assert_eq!(median(&[1.0, 100.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]).unwrap(), 2.0);
        assert!(median(&[]).is_err());
    }

    #[test]
    fn copy_count() {
        assert_eq!(boosting_copies(5000, 0.1), 11);
        assert_eq!(boosting_copies(1, 0.9), 1);
    }

    #[test]
    fn empty_copies_is_state_error() {
        assert!(matches!(boosted_query(&[], &NormSpec::Lp(1.0)), Err(crate::Error::State(_))));
    }

    #[test]
    fn identical_copies_agree() {
        let budget = PrivacyBudget::pure(1.0, 0.1).unwrap().with_noise(NoiseMode::Off);
        let one = SneMechanism::with_threshold(3, 4, 0.5, &budget, 2.0, RandomSource::new(3)).unwrap();
        let copies = vec![one.clone(), one.clone(), one];
        let single = eval_norm(&NormSpec::Lp(1.0), copies[0].estimate()).unwrap();
        assert_eq!(boosted_query(&copies, &NormSpec::Lp(1.0)).unwrap(), single);
    }
}
