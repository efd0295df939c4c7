//! Normal return law: parameters, density, cdf/quantile and MLE.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::special::{norm_cdf, norm_pdf, norm_quantile};
use crate::{Error, Result};

/// Location/scale parameters of a Normal law, in per-day return units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalParams<T> {
    pub mu: T,
    pub sigma: T,
}

impl<T: Real> NormalParams<T> {
    pub fn new(mu: T, sigma: T) -> Result<Self> {
        if !(mu.is_finite() && sigma.is_finite() && sigma > T::zero()) {
            return Err(Error::Domain(format!(
                "normal parameters need finite mu and sigma > 0, got mu={mu}, sigma={sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn pdf(&self, x: T) -> T {
        norm_pdf((x - self.mu) / self.sigma) / self.sigma
    }

    pub fn ln_pdf(&self, x: T) -> T {
        let z = (x - self.mu) / self.sigma;
        T::of(-0.918_938_533_204_672_7) - self.sigma.ln() - z * z / T::of(2.0)
    }

    pub fn cdf(&self, x: T) -> T {
        norm_cdf((x - self.mu) / self.sigma)
    }

    pub fn quantile(&self, u: T) -> Result<T> {
        Ok(self.mu + self.sigma * norm_quantile(u)?)
    }

    pub fn log_likelihood(&self, samples: &[T]) -> T {
        samples.iter().map(|&x| self.ln_pdf(x)).sum()
    }

    /// Deterministic draws for a given seed.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<T>
    where
        StandardNormal: Distribution<T>,
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let z: T = StandardNormal.sample(&mut rng);
                self.mu + self.sigma * z
            })
            .collect()
    }
}

/// Maximum-likelihood Normal parameters: sample mean and the divisor-`n`
/// scale. Requires `n >= 2` and positive sample variance.
pub fn normal_mle<T: Real>(samples: &[T]) -> Result<NormalParams<T>> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::DegenerateSample(format!(
            "normal fit needs at least 2 samples, got {n}"
        )));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateSample(
            "samples contain non-finite values".to_string(),
        ));
    }
    let n_t = T::from_count(n);
    let mean = samples.iter().copied().sum::<T>() / n_t;
    let m2 = samples
        .iter()
        .map(|&x| (x - mean) * (x - mean))
        .sum::<T>()
        / n_t;
    if m2 <= T::zero() {
        return Err(Error::DegenerateSample(
            "sample variance is zero".to_string(),
        ));
    }
    NormalParams::new(mean, m2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn symmetric_two_point_mle() {
        let fit = normal_mle(&[-1.0, 1.0]).unwrap();
        assert_eq!(fit.mu, 0.0);
        assert_eq!(fit.sigma, 1.0);
    }

    #[test]
    fn constant_sample_is_degenerate() {
        let err = normal_mle(&[0.3; 5]).unwrap_err();
        assert!(matches!(err, Error::DegenerateSample(_)));
        assert!(normal_mle(&[1.0]).is_err());
    }

    #[test]
    fn monte_carlo_recovery() {
        // 10,000 draws from Normal(0.0005, 0.01); bounds from the
        // standard-error oracle: 3*sigma/sqrt(n) for the mean.
        let truth = NormalParams::new(0.0005_f64, 0.01).unwrap();
        let draws = truth.sample(10_000, 42);
        let fit = normal_mle(&draws).unwrap();
        assert!((fit.mu - 0.0005).abs() < 3.0 * 0.01 / 100.0);
        assert!((fit.sigma - 0.01).abs() < 0.0005);
    }

    #[test]
    fn loglik_matches_closed_form_at_mle() {
        let samples = [-0.01, 0.0, 0.02, 0.03, -0.015];
        let fit = normal_mle(&samples).unwrap();
        let n = samples.len() as f64;
        // at the MLE the exponent sums to -n/2
        let want = -n / 2.0 * ((2.0 * std::f64::consts::PI * fit.sigma * fit.sigma).ln() + 1.0);
        assert_relative_eq!(fit.log_likelihood(&samples), want, epsilon = 1e-12);
    }

    #[test]
    fn cdf_quantile_round_trip() {
        let p = NormalParams::new(0.001_f64, 0.02).unwrap();
        for &u in &[0.01, 0.2, 0.5, 0.9, 0.999] {
            let x = p.quantile(u).unwrap();
            assert_relative_eq!(p.cdf(x), u, epsilon = 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = NormalParams::new(0.0_f64, 1.0).unwrap();
        assert_eq!(p.sample(16, 7), p.sample(16, 7));
        assert_ne!(p.sample(16, 7), p.sample(16, 8));
    }
}
