use crate::counting::{calibrated_bound, BoundRequest, HistogramMechanism};
use crate::error::{input, param, Result};
use crate::privacy::{PrivacyBudget, RandomSource};
use crate::stream::Update;

/// Randomized thresholds and derived constants of one SNE instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SneParameters {
    pub zeta: f64,
    /// Calibrated error bound of the element histogram.
    pub element_bound: f64,
    pub tau_f: f64,
    pub levels: usize,
    /// Calibrated error bound of the level histogram.
    pub level_bound: f64,
    pub tau_b: f64,
}

impl SneParameters {
    /// Additive slack `A = tau_f * tau_b * (1 + zeta)^3 / zeta`, in units of `L(e_1)`.
    pub fn additive_slack(&self) -> f64 {
        self.tau_f * self.tau_b * (1.0 + self.zeta).powi(3) / self.zeta
    }

    /// Lower and upper sandwich bounds on `L(E)` given the true `L(f)`.
    pub fn sandwich(&self, true_norm: f64, unit: f64) -> (f64, f64) {
        let z = self.zeta;
        ((1.0 - 3.0 * z) / (1.0 + z) * true_norm - self.additive_slack() * unit, (1.0 + z) * true_norm)
    }

    /// Level `i` in `1..=levels` of a frequency `1 <= f <= tau_f`.
    pub fn level_of(&self, f: u64) -> Option<usize> {
        level_index(f, self.zeta, self.tau_f, self.levels)
    }
}

fn level_index(f: u64, zeta: f64, tau_f: f64, levels: usize) -> Option<usize> {
    if f == 0 || f as f64 > tau_f {
        return None;
    }
    let base = 1.0 + zeta;
    // Smallest i with f < base^i, corrected for rounding in the logarithm.
    let mut i = ((f as f64).ln() / base.ln()).floor() as i64 + 1;
    while i > 1 && (f as f64) < base.powi(i as i32 - 1) {
        i -= 1;
    }
    while (f as f64) >= base.powi(i as i32) {
        i += 1;
    }
    Some((i as usize).min(levels).max(1))
}

/// Continual private proxy vector `E` whose monotone symmetric norms track
/// those of the true frequency vector.
///
/// A shifted element histogram reports heavy elements directly; elements at
/// or below `tau_f` are grouped into geometric levels whose sizes come from a
/// second shifted histogram, and each large level contributes copies of its
/// rounded frequency.
#[derive(Debug, Clone)]
pub struct SneMechanism {
    params: SneParameters,
    n: usize,
    freq: Vec<u64>,
    level_sizes: Vec<i64>,
    elements: HistogramMechanism,
    level_hist: HistogramMechanism,
    estimate: Vec<f64>,
}

impl SneMechanism {
    pub fn new(
        n: usize,
        horizon: usize,
        zeta: f64,
        budget: &PrivacyBudget,
        mut rng: RandomSource,
    ) -> Result<Self> {
        check_zeta(zeta)?;
        let half = budget.split(2.0)?;
        let element_bound = calibrated_bound(&BoundRequest::new(n.max(1), &half, horizon))?;
        let lo = 4.0 * element_bound / (zeta * zeta);
        let hi = (4.0 + 2.0 * zeta) * element_bound / (zeta * zeta);
        // Drawn even in noise-off mode: the threshold is part of the mechanism.
        let tau_f = rng.uniform(lo, hi);
        Self::with_threshold(n, horizon, zeta, budget, tau_f, rng)
    }

    /// Instance with a fixed `tau_f` instead of a random draw.
    pub fn with_threshold(
        n: usize,
        horizon: usize,
        zeta: f64,
        budget: &PrivacyBudget,
        tau_f: f64,
        mut rng: RandomSource,
    ) -> Result<Self> {
        check_zeta(zeta)?;
        budget.validate()?;
        if n == 0 {
            return Err(param("SNE needs at least one element"));
        }
        if !(tau_f > 0.0 && tau_f.is_finite()) {
            return Err(param(format!("tau_f must be positive, got {tau_f}")));
        }
        let half = budget.split(2.0)?;
        let elements = HistogramMechanism::new(n, horizon, &half, true, rng.fork())?;
        let levels = level_count(tau_f, zeta);
        let level_budget = budget.split(2.0 * levels as f64)?;
        let level_hist = HistogramMechanism::new(levels, horizon, &level_budget, true, rng.fork())?;
        let params = SneParameters {
            zeta,
            element_bound: elements.bound(),
            tau_f,
            levels,
            level_bound: level_hist.bound(),
            tau_b: level_hist.bound() / zeta,
        };
        Ok(Self {
            params,
            n,
            freq: vec![0; n],
            level_sizes: vec![0; levels],
            elements,
            level_hist,
            estimate: vec![0.0; n],
        })
    }

    pub fn parameters(&self) -> &SneParameters {
        &self.params
    }

    pub fn frequencies(&self) -> &[u64] {
        &self.freq
    }

    /// Exact level sizes `b_1..b_levels`.
    pub fn level_sizes(&self) -> &[i64] {
        &self.level_sizes
    }

    pub fn estimate(&self) -> &[f64] {
        &self.estimate
    }

    pub fn step(&mut self, update: &Update) -> Result<&[f64]> {
        let deltas = match *update {
            Update::Noop => {
                self.elements.step_idle()?;
                Vec::new()
            }
            Update::InsertElement(j) => {
                if j >= self.n {
                    return Err(input(format!("element {j} outside 0..{}", self.n)));
                }
                let old = self.freq[j];
                self.freq[j] += 1;
                self.elements.step(j, 1)?;
                level_transition(&self.params, old, old + 1)
            }
            Update::DeleteElement(_) => {
                return Err(input("insertions-only mechanism received a deletion"));
            }
            other => return Err(input(format!("SNE received graph update {other}"))),
        };
        for &(level, d) in &deltas {
            self.level_sizes[level] += d;
        }
        self.level_hist.step_sparse(&deltas)?;
        self.rebuild();
        Ok(&self.estimate)
    }

    fn rebuild(&mut self) {
        let tau_f = self.params.tau_f;
        let mut pos = 0;
        for &y in self.elements.outputs() {
            if y > tau_f {
                self.estimate[pos] = y;
                pos += 1;
            }
        }
        let base = 1.0 + self.params.zeta;
        for (i, &b) in self.level_hist.outputs().iter().enumerate() {
            if b >= self.params.tau_b && pos < self.n {
                let copies = (b.floor() as usize).min(self.n - pos);
                let value = base.powi(i as i32 + 1);
                self.estimate[pos..pos + copies].fill(value);
                pos += copies;
            }
        }
        self.estimate[pos..].fill(0.0);
    }
}

/// Free-function form of [`SneMechanism::step`].
pub fn sne_step(s: &mut SneMechanism, update: &Update) -> Result<Vec<f64>> {
    s.step(update).map(<[f64]>::to_vec)
}

fn check_zeta(zeta: f64) -> Result<()> {
    if zeta > 0.0 && zeta <= 0.5 {
        Ok(())
    } else {
        Err(param(format!("zeta must lie in (0, 1/2], got {zeta}")))
    }
}

/// `ceil(log_{1+zeta} tau_f)`, at least 1.
pub fn level_count(tau_f: f64, zeta: f64) -> usize {
    let raw = tau_f.ln() / (1.0 + zeta).ln();
    let mut levels = raw.ceil().max(1.0) as usize;
    while levels > 1 && (1.0 + zeta).powi(levels as i32 - 1) >= tau_f {
        levels -= 1;
    }
    levels
}

/// Level-histogram inputs `(level index from 0, delta)` caused by one
/// element moving from frequency `old` to `new`.
pub fn level_transition(params: &SneParameters, old: u64, new: u64) -> Vec<(usize, i64)> {
    let from = params.level_of(old);
    let to = params.level_of(new);
    if from == to {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(2);
    if let Some(i) = from {
        out.push((i - 1, -1));
    }
    if let Some(i) = to {
        out.push((i - 1, 1));
    }
    out
}

/// The full level-histogram input stream an insertion-only element stream
/// induces under fixed thresholds.
pub fn level_stream(params: &SneParameters, n: usize, updates: &[Update]) -> Result<Vec<Vec<(usize, i64)>>> {
    let mut freq = vec![0u64; n];
    updates
        .iter()
        .map(|u| match *u {
            Update::Noop => Ok(Vec::new()),
            Update::InsertElement(j) if j < n => {
                freq[j] += 1;
                Ok(level_transition(params, freq[j] - 1, freq[j]))
            }
            other => Err(input(format!("level stream needs insertions below {n}, got {other}"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::privacy::NoiseMode;
    use crate::sne::norm::{eval_norm, NormSpec};

    fn off() -> PrivacyBudget {
        PrivacyBudget::pure(1.0, 0.1).unwrap().with_noise(NoiseMode::Off)
    }

    fn params(zeta: f64, tau_f: f64) -> SneParameters {
        SneParameters {
            zeta,
            element_bound: 0.0,
            tau_f,
            levels: level_count(tau_f, zeta),
            level_bound: 0.0,
            tau_b: 0.0,
        }
    }

    #[test]
    fn level_boundaries() {
        let p = params(0.5, 10.0);
        assert_eq!(p.levels, 6);
        assert_eq!(p.level_of(0), None);
        assert_eq!(p.level_of(1), Some(1));
        assert_eq!(p.level_of(2), Some(2));
        assert_eq!(p.level_of(3), Some(3));
        assert_eq!(p.level_of(5), Some(4));
        assert_eq!(p.level_of(10), Some(6));
        assert_eq!(p.level_of(11), None);
    }

    #[test]
    fn level_count_exact_power() {
        assert_eq!(level_count(2.25, 0.5), 2);
        assert_eq!(level_count(1.0, 0.5), 1);
    }

    #[test]
    fn transitions_and_exit() {
        let p = params(0.5, 10.0);
        assert_eq!(level_transition(&p, 0, 1), vec![(0, 1)]);
        assert_eq!(level_transition(&p, 1, 2), vec![(0, -1), (1, 1)]);
        assert!(level_transition(&p, 4, 5).is_empty());
        assert_eq!(level_transition(&p, 10, 11), vec![(5, -1)]);
        assert!(level_transition(&p, 11, 12).is_empty());
    }

    #[test]
    fn empty_stream_gives_zero_vector() {
        let mut s = SneMechanism::new(4, 5, 0.25, &off(), RandomSource::new(1)).unwrap();
        for _ in 0..5 {
            assert!(s.step(&Update::Noop).unwrap().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn repeated_element_sandwich() {
        let mut s = SneMechanism::new(4, 10, 0.25, &off(), RandomSource::new(1)).unwrap();
        for _ in 0..10 {
            s.step(&Update::InsertElement(0)).unwrap();
        }
        let l1 = eval_norm(&NormSpec::Lp(1.0), s.estimate()).unwrap();
        assert!(l1 <= 1.25 * 10.0);
    }

    #[test]
    fn small_threshold_reports_heavy_and_levels() {
        // With bounds forced to zero, heavy elements appear verbatim and each
        // light element appears as its level's rounded frequency.
        let mut s = SneMechanism::with_threshold(4, 20, 0.5, &off(), 3.0, RandomSource::new(0)).unwrap();
        s.elements = s.elements.clone().with_bound(0.0).unwrap();
        s.level_hist = s.level_hist.clone().with_bound(0.0).unwrap();
        s.params.tau_b = 0.0;
        for u in [0, 0, 0, 0, 1, 1, 2] {
            s.step(&Update::InsertElement(u)).unwrap();
        }
        let mut e = s.estimate().to_vec();
        e.sort_by(f64::total_cmp);
        assert_eq!(e, vec![0.0, 1.5, 2.25, 4.0]);
        let b: i64 = s.level_sizes().iter().sum();
        assert_eq!(b, 2);
    }

    #[test]
    fn rejects_deletions_and_bad_zeta() {
        let mut s = SneMechanism::new(4, 5, 0.25, &off(), RandomSource::new(1)).unwrap();
        assert!(s.step(&Update::DeleteElement(0)).is_err());
        assert!(SneMechanism::new(4, 5, 0.75, &off(), RandomSource::new(1)).is_err());
    }
}
