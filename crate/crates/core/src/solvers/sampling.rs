use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Draws index `k` with probability `w_k / Σw` by inverting the cumulative
/// distribution with one uniform variate. Zero weights are never drawn.
#[derive(Clone, Debug)]
pub struct WeightedSampler {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl WeightedSampler {
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Parameter("sampling weights must be finite and nonnegative".into()));
        }
        let last_positive = weights
            .iter()
            .rposition(|&w| w > 0.0)
            .ok_or_else(|| Error::Domain("all sampling weights are zero".into()))?;
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(WeightedSampler {
            cumulative,
            last_positive,
        })
    }

    pub fn total(&self) -> f64 {
        self.cumulative[self.last_positive]
    }

    pub fn probability(&self, k: usize) -> f64 {
        let lo = if k == 0 { 0.0 } else { self.cumulative[k - 1] };
        (self.cumulative[k] - lo) / self.total()
    }

    pub fn sample(&self, rng: &mut Rng) -> usize {
        let u = rng.random::<f64>() * self.total();
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.last_positive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn zero_weights_never_drawn() {
        let s = WeightedSampler::new(&[0.0, 2.0, 0.0, 1.0, 0.0]).unwrap();
        let mut rng = stream(3, Stream::Sampling);
        let mut counts = [0usize; 5];
        for _ in 0..30_000 {
            counts[s.sample(&mut rng)] += 1;
        }
        assert_eq!(counts[0] + counts[2] + counts[4], 0);
        let frac = counts[1] as f64 / 30_000.0;
        assert!((frac - 2.0 / 3.0).abs() < 0.02, "{frac}");
    }

    #[test]
    fn equal_weights_are_uniform() {
        let s = WeightedSampler::new(&[4.0; 4]).unwrap();
        for k in 0..4 {
            assert!((s.probability(k) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_degenerate_weights() {
        assert!(WeightedSampler::new(&[0.0, 0.0]).is_err());
        assert!(WeightedSampler::new(&[1.0, -1.0]).is_err());
        assert!(WeightedSampler::new(&[]).is_err());
    }
}
