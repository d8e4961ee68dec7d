use crate::error::{Error, Result};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Streaming mean / sum of squared deviations (Welford), with exact removal.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MomentAccumulator {
    pub const fn new() -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
        }
    }

    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = Self::new();
        for v in values {
            acc.push(v);
        }
        acc
    }

    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    /// Removes a previously pushed value.
    pub fn remove(&mut self, value: f64) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                available: self.count as usize,
            });
        }
        let remaining = (self.count - 1) as f64;
        let mean = self.mean - (value - self.mean) / remaining;
        self.m2 = (self.m2 - (value - mean) * (value - self.mean)).max(0.0);
        self.mean = mean;
        self.count -= 1;
        Ok(())
    }

    /// Chan et al. parallel combination.
    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        self.mean += delta * nb / n as f64;
        self.m2 += other.m2 + delta * delta * na * nb / n as f64;
        self.count = n;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// Unbiased (`n - 1`) variance; `None` below two observations.
    pub fn variance(&self) -> Option<f64> {
        (self.count >= 2).then(|| self.m2 / (self.count - 1) as f64)
    }

    pub fn std_dev(&self) -> Option<f64> {
        self.variance().map(f64::sqrt)
    }
}

/// Leave-one-out view: `acc` with `value` removed.
pub fn loo_downdate(acc: MomentAccumulator, value: f64) -> Result<MomentAccumulator> {
    let mut out = acc;
    out.remove(value)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn downdate_to_two_values() {
        let acc = MomentAccumulator::from_values([1.0, 2.0, 3.0]);
        let loo = loo_downdate(acc, 3.0).unwrap();
        assert_eq!(loo.count(), 2);
        assert!((loo.mean() - 1.5).abs() < 1e-15);
        assert!((loo.variance().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn downdate_duplicate() {
        let acc = MomentAccumulator::from_values([4.25, 4.25]);
        let loo = loo_downdate(acc, 4.25).unwrap();
        assert_eq!(loo.count(), 1);
        assert_eq!(loo.mean(), 4.25);
        assert_eq!(loo.m2(), 0.0);
        assert_eq!(loo.variance(), None);
    }

    #[test]
    fn downdate_needs_two() {
        let acc = MomentAccumulator::from_values([1.0]);
        assert!(loo_downdate(acc, 1.0).is_err());
    }

    #[test]
    fn merge_matches_sequential() {
        let a = MomentAccumulator::from_values([1.0, 5.0, 2.0]);
        let b = MomentAccumulator::from_values([7.0, -1.0]);
        let mut merged = a;
        merged.merge(&b);
        let all = MomentAccumulator::from_values([1.0, 5.0, 2.0, 7.0, -1.0]);
        assert_eq!(merged.count(), all.count());
        assert!((merged.mean() - all.mean()).abs() < 1e-14);
        assert!((merged.m2() - all.m2()).abs() < 1e-12);
    }
}
