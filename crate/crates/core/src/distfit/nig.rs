//! Normal-Inverse-Gaussian return law in the classical (alpha, beta, mu,
//! delta) parameterization, gamma = sqrt(alpha^2 - beta^2).
//!
//! Not the invariant (alpha-bar, beta-bar) = (delta*alpha, delta*beta)
//! convention; every interface here takes the classical parameters.
//!
//! The density is evaluated in log space with the algebraic identity
//! `delta*gamma - alpha*s = -(delta^2 beta^2 + alpha^2 d^2) / (delta*gamma +
//! alpha*s)`, which avoids cancellation even in near-Gaussian regimes
//! (alpha -> infinity). The cdf integrates the density once over a
//! tail-bounded window into a panel table; point queries then cost one
//! fixed 15-node rule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, InverseGaussian, StandardNormal, StandardUniform};
use serde::{Deserialize, Serialize};

use crate::quad::{adaptive_panels, gauss15, Panel};
use crate::scalar::Real;
use crate::solve::nelder_mead;
use crate::special::bessel_k1_scaled;
use crate::{Error, Result};

/// Classical NIG parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NigParams<T> {
    /// Tail heaviness, alpha > |beta|.
    pub alpha: T,
    /// Asymmetry.
    pub beta: T,
    /// Location.
    pub mu: T,
    /// Scale, delta > 0.
    pub delta: T,
}

impl<T: Real> NigParams<T> {
    pub fn new(alpha: T, beta: T, mu: T, delta: T) -> Result<Self> {
        let all_finite =
            alpha.is_finite() && beta.is_finite() && mu.is_finite() && delta.is_finite();
        if !all_finite || !(alpha > beta.abs()) || !(delta > T::zero()) {
            return Err(Error::Domain(format!(
                "invalid NIG parameters: alpha={alpha}, beta={beta}, mu={mu}, delta={delta} \
                 (need alpha > |beta| >= 0, delta > 0, all finite)"
            )));
        }
        let params = Self {
            alpha,
            beta,
            mu,
            delta,
        };
        if !(params.gamma() > T::zero()) || !params.gamma().is_finite() {
            return Err(Error::Domain(format!(
                "degenerate gamma for alpha={alpha}, beta={beta}"
            )));
        }
        Ok(params)
    }

    pub fn gamma(&self) -> T {
        ((self.alpha - self.beta) * (self.alpha + self.beta)).sqrt()
    }

    pub fn mean(&self) -> T {
        self.mu + self.delta * self.beta / self.gamma()
    }

    pub fn variance(&self) -> T {
        let g = self.gamma();
        self.delta * self.alpha * self.alpha / (g * g * g)
    }

    /// Log-density, finite on all of R.
    pub fn ln_pdf(&self, x: T) -> T {
        let d = x - self.mu;
        let s = (self.delta * self.delta + d * d).sqrt();
        let g = self.gamma();
        let dg = self.delta * g;
        let als = self.alpha * s;
        // delta*gamma - alpha*s, cancellation-free
        let shift = -(self.delta * self.delta * self.beta * self.beta
            + self.alpha * self.alpha * d * d)
            / (dg + als);
        (self.alpha * self.delta / T::of(std::f64::consts::PI)).ln() - s.ln()
            + bessel_k1_scaled(als).ln()
            + shift
            + self.beta * d
    }

    /// Density, nonnegative; underflows to zero in the far tails.
    pub fn pdf(&self, x: T) -> T {
        self.ln_pdf(x).exp()
    }

    /// Deterministic draws via the normal variance-mean mixture
    /// `X = mu + beta V + sqrt(V) Z`, `V ~ InverseGaussian(delta/gamma, delta^2)`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<T>
    where
        StandardNormal: Distribution<T>,
        StandardUniform: Distribution<T>,
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mixing = InverseGaussian::new(self.delta / self.gamma(), self.delta * self.delta)
            .expect("valid NIG params imply a valid mixing law");
        (0..n)
            .map(|_| {
                let v: T = mixing.sample(&mut rng);
                let z: T = StandardNormal.sample(&mut rng);
                self.mu + self.beta * v + v.sqrt() * z
            })
            .collect()
    }
}

/// NIG distribution with a prepared cdf table.
#[derive(Debug, Clone)]
pub struct Nig<T> {
    params: NigParams<T>,
    /// Panel edges, ascending.
    edges: Vec<T>,
    /// Cumulative probability at each edge (cum[0] = left tail bound).
    cum: Vec<T>,
    left_tail: T,
    right_tail: T,
    left_rate: T,
    right_rate: T,
}

/// Truncation budget for each tail of the cdf table.
const TAIL_BUDGET: f64 = 1e-13;

impl<T: Real> Nig<T> {
    /// Builds the cdf table: one adaptive sweep over a window whose ends
    /// carry provably negligible tail mass.
    pub fn new(params: NigParams<T>) -> Result<Self> {
        let g = params.gamma();
        let left_rate = params.alpha + params.beta;
        let right_rate = params.alpha - params.beta;
        let width = T::of(40.0) * params.delta.max(g.recip());

        let budget = T::of(TAIL_BUDGET);
        let mut lo = params.mu - width;
        for _ in 0..200 {
            if params.pdf(lo) / left_rate <= budget {
                break;
            }
            lo = lo - T::of(10.0) / left_rate;
        }
        let mut hi = params.mu + width;
        for _ in 0..200 {
            if params.pdf(hi) / right_rate <= budget {
                break;
            }
            hi = hi + T::of(10.0) / right_rate;
        }

        let tol = T::of(1e-11).max(T::epsilon() * T::of(16.0));
        let pdf = |x: T| params.pdf(x);
        let panels: Vec<Panel<T>> = adaptive_panels(&pdf, lo, hi, tol, 48);

        let left_tail = params.pdf(lo) / left_rate;
        let right_tail = params.pdf(hi) / right_rate;
        let mut edges = Vec::with_capacity(panels.len() + 1);
        let mut cum = Vec::with_capacity(panels.len() + 1);
        edges.push(lo);
        cum.push(left_tail);
        let mut acc = left_tail;
        for p in &panels {
            acc = acc + p.integral;
            edges.push(p.hi);
            cum.push(acc);
        }
        Ok(Self {
            params,
            edges,
            cum,
            left_tail,
            right_tail,
            left_rate,
            right_rate,
        })
    }

    pub fn params(&self) -> &NigParams<T> {
        &self.params
    }

    /// Cdf with absolute accuracy well inside 1e-8; monotone nondecreasing
    /// and exact at +/- infinity.
    pub fn cdf(&self, x: T) -> T {
        if x.is_nan() {
            return x;
        }
        if x == T::infinity() {
            return T::one();
        }
        if x == T::neg_infinity() {
            return T::zero();
        }
        let lo = self.edges[0];
        let hi = *self.edges.last().unwrap();
        if x <= lo {
            return (self.left_tail * (self.left_rate * (x - lo)).exp()).min(T::one());
        }
        if x >= hi {
            let top = *self.cum.last().unwrap();
            let tail = T::one() - self.right_tail * (-self.right_rate * (x - hi)).exp();
            return tail.max(top).min(T::one());
        }
        let j = match self
            .edges
            .binary_search_by(|e| e.partial_cmp(&x).expect("finite edge"))
        {
            Ok(exact) => return self.cum[exact].min(T::one()),
            Err(insertion) => insertion, // edges[j-1] < x < edges[j]
        };
        let partial = gauss15(&|t| self.params.pdf(t), self.edges[j - 1], x);
        (self.cum[j - 1] + partial).min(T::one())
    }

    /// Quantile: inverts the table cdf by bracketed bisection with secant
    /// polish, strictly increasing on (0, 1).
    pub fn quantile(&self, u: T) -> Result<T> {
        if !(u > T::zero() && u < T::one()) {
            return Err(Error::Domain(format!(
                "NIG quantile requires u in (0,1), got {u}"
            )));
        }
        let lo_edge = self.edges[0];
        let hi_edge = *self.edges.last().unwrap();
        if u <= self.left_tail {
            return Ok(lo_edge + (u / self.left_tail).ln() / self.left_rate);
        }
        let top = *self.cum.last().unwrap();
        if u >= top {
            let residual = (T::one() - u).max(T::min_positive_value());
            return Ok(hi_edge + (self.right_tail / residual).ln().max(T::zero()) / self.right_rate);
        }
        // cum is strictly increasing; find first edge with cum >= u
        let j = match self
            .cum
            .binary_search_by(|c| c.partial_cmp(&u).expect("finite cum"))
        {
            Ok(exact) => return Ok(self.edges[exact]),
            Err(insertion) => insertion,
        };
        let (origin, mut a, mut b) = (self.edges[j - 1], self.edges[j - 1], self.edges[j]);
        let base = self.cum[j - 1];
        let eval = |x: T| base + gauss15(&|t| self.params.pdf(t), origin, x) - u;
        let mut fa = self.cum[j - 1] - u; // eval(origin) without quadrature noise
        let mut fb = self.cum[j] - u;
        let mut x = (a + b) * T::of(0.5);
        for _ in 0..100 {
            let fx = eval(x);
            if fx == T::zero() {
                return Ok(x);
            }
            if fx.signum() == fa.signum() {
                a = x;
                fa = fx;
            } else {
                b = x;
                fb = fx;
            }
            if (b - a).abs() <= T::epsilon() * (T::one() + x.abs()) {
                break;
            }
            // secant proposal, bisection fallback
            let secant = b - fb * (b - a) / (fb - fa);
            x = if secant > a && secant < b {
                secant
            } else {
                (a + b) * T::of(0.5)
            };
        }
        Ok(x)
    }
}

/// Method-of-moments parameters from (mean, variance, skewness, excess
/// kurtosis); `None` when the moment map is infeasible (3K <= 5S^2 or a
/// non-positive kurtosis surplus).
fn moments_to_params<T: Real>(mean: T, var: T, skew: T, exkurt: T) -> Option<NigParams<T>> {
    let three = T::of(3.0);
    let five_thirds = T::of(5.0 / 3.0);
    let four_thirds = T::of(4.0 / 3.0);
    let surplus = exkurt - five_thirds * skew * skew;
    if !(surplus > T::zero()) || !(var > T::zero()) {
        return None;
    }
    let gamma = (three / (var * surplus)).sqrt();
    let delta_gamma = three / (exkurt - four_thirds * skew * skew);
    let rho = skew * delta_gamma.sqrt() / three;
    if !(rho.abs() < T::one()) {
        return None;
    }
    let delta = delta_gamma / gamma;
    let alpha = gamma / (T::one() - rho * rho).sqrt();
    let beta = rho * alpha;
    let mu = mean - delta * beta / gamma;
    NigParams::new(alpha, beta, mu, delta).ok()
}

/// Symmetric fallback initialization: beta = 0, alpha from kurtosis,
/// mu = mean, delta from variance.
fn symmetric_init<T: Real>(mean: T, var: T, exkurt: T) -> NigParams<T> {
    let k = exkurt.max(T::of(0.05));
    let delta_gamma = T::of(3.0) / k;
    let gamma = (delta_gamma / var).sqrt();
    NigParams {
        alpha: gamma,
        beta: T::zero(),
        mu: mean,
        delta: delta_gamma / gamma,
    }
}

/// Near-Gaussian candidate matching the sample mean and variance with a
/// very large tail index; keeps the NIG family competitive on light-tailed
/// data, where the likelihood surface flattens toward the Gaussian limit.
fn near_gaussian_init<T: Real>(mean: T, var: T) -> NigParams<T> {
    let k = T::of(1e5);
    NigParams {
        alpha: (k / var).sqrt(),
        beta: T::zero(),
        mu: mean,
        delta: (var * k).sqrt(),
    }
}

/// Unconstrained optimizer coordinates: (mu, ln delta, ln gamma, t) with
/// beta = gamma * tanh(t). Any coordinate value maps to valid parameters.
fn to_unconstrained<T: Real>(p: &NigParams<T>) -> [T; 4] {
    let g = p.gamma();
    let ratio = (p.beta / g).max(T::of(-0.999)).min(T::of(0.999));
    [p.mu, p.delta.ln(), g.ln(), ratio.atanh()]
}

fn from_unconstrained<T: Real>(theta: &[T]) -> NigParams<T> {
    let delta = theta[1].exp();
    let gamma = theta[2].exp();
    let beta = gamma * theta[3].tanh();
    let alpha = (gamma * gamma + beta * beta).sqrt();
    NigParams {
        alpha,
        beta,
        mu: theta[0],
        delta,
    }
}

fn mean_neg_loglik<T: Real>(theta: &[T], samples: &[T]) -> T {
    let p = from_unconstrained(theta);
    if !(p.delta.is_finite() && p.alpha.is_finite() && p.alpha > p.beta.abs()) {
        return T::of(1e30);
    }
    let mut acc = T::zero();
    for &x in samples {
        let l = p.ln_pdf(x);
        if !l.is_finite() {
            return T::of(1e30);
        }
        acc += l;
    }
    -acc / T::from_count(samples.len())
}

/// Maximum-likelihood NIG parameters.
///
/// Initialized from method-of-moments (symmetric fallback when the moment
/// map is infeasible) and polished by Nelder-Mead in the unconstrained
/// coordinates; a near-Gaussian start is optimized alongside and the better
/// optimum wins. The returned log-likelihood never falls below the
/// initialization point.
pub fn nig_mle<T: Real>(samples: &[T]) -> Result<NigParams<T>> {
    let n = samples.len();
    if n < 8 {
        return Err(Error::DegenerateSample(format!(
            "NIG fit needs at least 8 samples, got {n}"
        )));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateSample(
            "samples contain non-finite values".to_string(),
        ));
    }
    let n_t = T::from_count(n);
    let mean = samples.iter().copied().sum::<T>() / n_t;
    let mut m2 = T::zero();
    let mut m3 = T::zero();
    let mut m4 = T::zero();
    for &x in samples {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n_t;
    m3 /= n_t;
    m4 /= n_t;
    if m2 <= T::zero() {
        return Err(Error::DegenerateSample(
            "sample variance is zero".to_string(),
        ));
    }
    let skew = m3 / (m2 * m2.sqrt());
    let exkurt = m4 / (m2 * m2) - T::of(3.0);

    let init = moments_to_params(mean, m2, skew, exkurt)
        .unwrap_or_else(|| symmetric_init(mean, m2, exkurt));
    let starts = [init, near_gaussian_init(mean, m2)];

    let param_tol = T::of(1e-8);
    let steps = [
        m2.sqrt() * T::of(0.25),
        T::of(0.2),
        T::of(0.2),
        T::of(0.2),
    ];
    let mut best: Option<(T, Vec<T>)> = None;
    for start in &starts {
        let theta0 = to_unconstrained(start);
        let result = nelder_mead(
            |theta| mean_neg_loglik(theta, samples),
            &theta0,
            &steps,
            param_tol,
            500,
        );
        if best.as_ref().map_or(true, |(v, _)| result.value < *v) {
            best = Some((result.value, result.point));
        }
    }
    let (value, theta) = best.expect("at least one start");
    let params = from_unconstrained(&theta);
    let valid = value.is_finite()
        && NigParams::new(params.alpha, params.beta, params.mu, params.delta).is_ok();
    if !valid {
        let init_theta = to_unconstrained(&init);
        return Err(Error::Fit {
            message: "NIG likelihood optimization produced non-finite parameters".to_string(),
            init: init_theta.iter().map(|v| v.as_f64()).collect(),
            last: theta.iter().map(|v| v.as_f64()).collect(),
        });
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn std_nig() -> NigParams<f64> {
        NigParams::new(1.0, 0.0, 0.0, 1.0).unwrap()
    }

    // Precomputed with 30-digit arithmetic.
    const PDF_AT_0: f64 = 0.520803829991670046415395693131;
    const PDF_AT_3: f64 = 0.00905414392571896354536685994799;
    const CDF_AT_1: f64 = 0.875965221100531508507283542589;
    const Q_AT_99: f64 = 2.70189434111520157143365926104;

    #[test]
    fn params_validation() {
        assert!(NigParams::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(NigParams::new(1.0, -1.5, 0.0, 1.0).is_err());
        assert!(NigParams::new(1.0, 0.0, 0.0, 0.0).is_err());
        assert!(NigParams::new(f64::NAN, 0.0, 0.0, 1.0).is_err());
        assert!(NigParams::new(2.0, -1.0, 0.1, 0.5).is_ok());
    }

    #[test]
    fn pdf_spot_values() {
        let p = std_nig();
        assert_relative_eq!(p.pdf(0.0), PDF_AT_0, max_relative = 1e-12);
        assert_relative_eq!(p.pdf(3.0), PDF_AT_3, max_relative = 1e-12);
    }

    #[test]
    fn pdf_symmetric_when_beta_zero() {
        let p = std_nig();
        assert_relative_eq!(p.pdf(0.7), p.pdf(-0.7), epsilon = 1e-12);
        assert_relative_eq!(p.pdf(2.3), p.pdf(-2.3), epsilon = 1e-14);
    }

    #[test]
    fn cdf_spot_and_limits() {
        let dist = Nig::new(std_nig()).unwrap();
        assert_relative_eq!(dist.cdf(0.0), 0.5, epsilon = 1e-9);
        assert_relative_eq!(dist.cdf(1.0), CDF_AT_1, epsilon = 1e-9);
        assert_eq!(dist.cdf(f64::INFINITY), 1.0);
        assert_eq!(dist.cdf(f64::NEG_INFINITY), 0.0);
        assert!(dist.cdf(-60.0) >= 0.0 && dist.cdf(-60.0) < 1e-10);
    }

    #[test]
    fn quantile_round_trip_and_spot() {
        let dist = Nig::new(std_nig()).unwrap();
        assert_relative_eq!(dist.quantile(0.5).unwrap(), 0.0, epsilon = 1e-7);
        assert_relative_eq!(dist.quantile(0.99).unwrap(), Q_AT_99, epsilon = 1e-6);
        for &x in &[-2.0, 0.0, 2.0] {
            let u = dist.cdf(x);
            assert_relative_eq!(dist.quantile(u).unwrap(), x, epsilon = 1e-6);
        }
        for &u in &[0.001, 0.2, 0.8, 0.999] {
            assert_relative_eq!(dist.cdf(dist.quantile(u).unwrap()), u, epsilon = 1e-9);
        }
    }

    #[test]
    fn quantile_rejects_bad_domain() {
        let dist = Nig::new(std_nig()).unwrap();
        assert!(dist.quantile(0.0).is_err());
        assert!(dist.quantile(1.0).is_err());
        assert!(dist.quantile(-0.1).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = std_nig();
        assert_eq!(p.sample(32, 9), p.sample(32, 9));
        assert_ne!(p.sample(32, 9), p.sample(32, 10));
    }

    #[test]
    fn sample_mean_matches_mixture_moments() {
        // mixture-moments oracle: mean = mu + delta*beta/gamma
        let p = NigParams::new(10.0, 0.0, 0.0, 0.01).unwrap();
        let draws = p.sample(100_000, 1234);
        let mean: f64 = draws.iter().sum::<f64>() / draws.len() as f64;
        let se = (p.variance() / draws.len() as f64).sqrt();
        assert!(mean.abs() < 4.0 * se, "mean {mean} vs 4se {}", 4.0 * se);
    }

    #[test]
    fn sample_passes_ks_against_cdf() {
        let p = NigParams::new(10.0, -2.0, 0.001, 0.02).unwrap();
        let n = 100_000;
        let mut draws = p.sample(n, 777);
        crate::scalar::sort_ascending(&mut draws);
        let dist = Nig::new(p).unwrap();
        let mut ks = 0.0f64;
        for (i, &x) in draws.iter().enumerate() {
            let f = dist.cdf(x);
            let hi = (i + 1) as f64 / n as f64 - f;
            let lo = f - i as f64 / n as f64;
            ks = ks.max(hi.max(lo));
        }
        // 1% critical value oracle: 1.63 / sqrt(n)
        assert!(ks < 1.63 / (n as f64).sqrt(), "ks = {ks}");
    }

    #[test]
    fn moment_map_round_trips() {
        let p = NigParams::new(50.0, -10.0, 0.001, 0.02).unwrap();
        let got = moments_to_params(p.mean(), p.variance(), nig_skew(&p), nig_exkurt(&p)).unwrap();
        assert_relative_eq!(got.alpha, p.alpha, max_relative = 1e-9);
        assert_relative_eq!(got.beta, p.beta, max_relative = 1e-9);
        assert_relative_eq!(got.mu, p.mu, max_relative = 1e-9);
        assert_relative_eq!(got.delta, p.delta, max_relative = 1e-9);
    }

    fn nig_skew(p: &NigParams<f64>) -> f64 {
        3.0 * p.beta / (p.alpha * (p.delta * p.gamma()).sqrt())
    }

    fn nig_exkurt(p: &NigParams<f64>) -> f64 {
        3.0 * (1.0 + 4.0 * p.beta * p.beta / (p.alpha * p.alpha)) / (p.delta * p.gamma())
    }

    #[test]
    fn infeasible_moments_fall_back() {
        // 3K < 5S^2
        assert!(moments_to_params(0.0, 1.0, 2.0, 1.0).is_none());
        let init = symmetric_init(0.3, 2.0, -1.0);
        assert_eq!(init.beta, 0.0);
        assert!(NigParams::new(init.alpha, init.beta, init.mu, init.delta).is_ok());
    }

    #[test]
    fn mle_rejects_degenerate_samples() {
        assert!(matches!(
            nig_mle(&[0.5; 20]),
            Err(Error::DegenerateSample(_))
        ));
        assert!(matches!(
            nig_mle(&[0.1, 0.2, 0.3]),
            Err(Error::DegenerateSample(_))
        ));
    }

    #[test]
    fn mle_recovers_seeded_draws() {
        let truth = NigParams::new(50.0, -10.0, 0.001, 0.02).unwrap();
        let draws = truth.sample(50_000, 2024);
        let fit = nig_mle(&draws).unwrap();
        assert!((fit.alpha - truth.alpha).abs() / truth.alpha < 0.15);
        assert!((fit.delta - truth.delta).abs() / truth.delta < 0.15);
        assert!((fit.beta - truth.beta).abs() < 0.25 * truth.beta.abs());
    }
}
