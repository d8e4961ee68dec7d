use crate::error::{Error, Result};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Order statistic at index `ceil(p * n) - 1` of an ascending slice.
pub fn empirical_quantile(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InsufficientData {
            needed: 1,
            available: 0,
        });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("empirical_quantile requires 0 < p < 1"));
    }
    let n = sorted.len();
    let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
    Ok(sorted[idx])
}

/// Smallest observed value `τ` with `#{v > τ} <= floor(alpha * n)`.
///
/// Guarantees the realized exceedance fraction is at most `alpha`. Returns
/// the threshold together with the number of values strictly above it.
pub fn upper_tail_threshold(sorted: &[f64], alpha: f64) -> Result<(f64, usize)> {
    if sorted.is_empty() {
        return Err(Error::InsufficientData {
            needed: 1,
            available: 0,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha must lie in (0, 1)"));
    }
    let n = sorted.len();
    let budget = ((alpha * n as f64).floor() as usize).min(n - 1);
    let tau = sorted[n - 1 - budget];
    // Ties with τ sit in the acceptance region.
    let above = n - sorted.partition_point(|&v| v <= tau);
    Ok((tau, above))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn order_statistic() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(empirical_quantile(&v, 0.8).unwrap(), 4.0);
        assert_eq!(empirical_quantile(&v, 0.01).unwrap(), 1.0);
        assert_eq!(empirical_quantile(&v, 0.99).unwrap(), 5.0);
    }

    #[test]
    fn single_element() {
        for p in [0.001, 0.5, 0.999] {
            assert_eq!(empirical_quantile(&[7.5], p).unwrap(), 7.5);
        }
    }

    #[test]
    fn empty_is_error() {
        assert!(empirical_quantile(&[], 0.5).is_err());
        assert!(upper_tail_threshold(&[], 0.5).is_err());
    }

    #[test]
    fn exceedance_fraction_bounded_brute_force() {
        let v: Vec<f64> = (0..37).map(|i| ((i * 17) % 11) as f64).collect();
        let mut sorted = v.clone();
        sorted.sort_by(f64::total_cmp);
        for k in 1..100 {
            let p = k as f64 / 100.0;
            let q = empirical_quantile(&sorted, p).unwrap();
            let above = v.iter().filter(|&&x| x > q).count() as f64;
            assert!(above / v.len() as f64 <= 1.0 - p + 1e-12);
        }
    }

    #[test]
    fn threshold_is_smallest_admissible_value() {
        let v = [1.0, 2.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0];
        let (tau, above) = upper_tail_threshold(&v, 0.2).unwrap();
        assert_eq!((tau, above), (7.0, 2));
        // ties: three copies of the top value, budget 1 -> nothing above the max
        let t = [1.0, 5.0, 5.0, 5.0];
        let (tau, above) = upper_tail_threshold(&t, 0.3).unwrap();
        assert_eq!((tau, above), (5.0, 0));
        for alpha in [0.01, 0.1, 0.25, 0.5, 0.9] {
            let (tau, above) = upper_tail_threshold(&v, alpha).unwrap();
            assert!(above as f64 <= alpha * v.len() as f64);
            // every smaller observed value violates the budget
            for &w in v.iter().filter(|&&w| w < tau) {
                let count = v.iter().filter(|&&x| x > w).count() as f64;
                assert!(count > alpha * v.len() as f64);
            }
        }
    }
}
