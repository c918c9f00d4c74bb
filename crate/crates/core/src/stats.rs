//! Deterministic accumulation helpers.

use crate::error::{Error, Result};

/// Neumaier compensated sum. Adding terms in a fixed order gives a result
/// that does not depend on how work was split across threads.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

/// Inclusive grid `start, start + step, ..., stop` built by index, not by accumulation.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::InvalidConfig(format!(
            "bad grid {start}..{stop} step {step}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn recovers_cancelled_terms() {
        let s: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn grid_counts() {
        assert_eq!(linear_grid(0.0, 360.0, 1.0).unwrap().len(), 361);
        assert_eq!(linear_grid(0.0, 180.0, 5.0).unwrap().len(), 37);
        assert_eq!(linear_grid(0.0, 180.0, 5.0).unwrap()[36], 180.0);
        assert!(linear_grid(0.0, 1.0, 0.0).is_err());
        assert!(linear_grid(2.0, 1.0, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn mean_of_constant_is_exact(v in -1.0f64..1.0, n in 1usize..5000) {
            let s: CompensatedSum = std::iter::repeat_n(v, n).collect();
            prop_assert!((s.value() / n as f64 - v).abs() <= f64::EPSILON * v.abs());
        }
    }
}
