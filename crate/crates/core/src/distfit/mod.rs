//! Distribution fitting: Normal and Normal-Inverse-Gaussian laws with
//! AIC/BIC/KS model-selection metrics.

pub mod nig;
pub mod normal;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use nig::{Nig, NigParams};
pub use normal::NormalParams;

use crate::scalar::{sort_ascending, Real};
use crate::{Error, Result};

/// Return-law family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Normal,
    #[serde(rename = "NIG")]
    Nig,
}

impl Family {
    /// Free parameter count: 2 for Normal, 4 for NIG.
    pub fn parameter_count(self) -> usize {
        match self {
            Family::Normal => 2,
            Family::Nig => 4,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Normal => write!(f, "Normal"),
            Family::Nig => write!(f, "NIG"),
        }
    }
}

/// Fitted parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FitParams<T> {
    Normal(NormalParams<T>),
    Nig(NigParams<T>),
}

/// A fitted law with its goodness-of-fit metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFit<T> {
    pub family: Family,
    pub params: FitParams<T>,
    #[serde(rename = "loglik")]
    pub log_likelihood: T,
    pub n: usize,
    pub aic: T,
    pub bic: T,
    pub ks: T,
}

impl<T: Real> DistributionFit<T> {
    fn build(family: Family, params: FitParams<T>, log_likelihood: T, samples: &[T]) -> Result<Self> {
        let mut fit = Self {
            family,
            params,
            log_likelihood,
            n: samples.len(),
            aic: T::zero(),
            bic: T::zero(),
            ks: T::zero(),
        };
        let metrics = gof_metrics(&fit, samples)?;
        fit.aic = metrics.aic;
        fit.bic = metrics.bic;
        fit.ks = metrics.ks;
        Ok(fit)
    }

    /// Materialized cdf/quantile evaluator (builds the NIG table once).
    pub fn evaluator(&self) -> Result<Evaluator<T>> {
        match self.params {
            FitParams::Normal(p) => Ok(Evaluator::Normal(p)),
            FitParams::Nig(p) => Ok(Evaluator::Nig(Box::new(Nig::new(p)?))),
        }
    }
}

/// Point-query evaluator for a fitted law.
pub enum Evaluator<T> {
    Normal(NormalParams<T>),
    Nig(Box<Nig<T>>),
}

impl<T: Real> Evaluator<T> {
    pub fn cdf(&self, x: T) -> T {
        match self {
            Evaluator::Normal(p) => p.cdf(x),
            Evaluator::Nig(d) => d.cdf(x),
        }
    }

    pub fn quantile(&self, u: T) -> Result<T> {
        match self {
            Evaluator::Normal(p) => p.quantile(u),
            Evaluator::Nig(d) => d.quantile(u),
        }
    }
}

/// Fits a Normal law by maximum likelihood and populates metrics.
pub fn fit_normal<T: Real>(samples: &[T]) -> Result<DistributionFit<T>> {
    let params = normal::normal_mle(samples)?;
    let loglik = params.log_likelihood(samples);
    DistributionFit::build(Family::Normal, FitParams::Normal(params), loglik, samples)
}

/// Fits a NIG law by maximum likelihood and populates metrics.
pub fn fit_nig<T: Real>(samples: &[T]) -> Result<DistributionFit<T>> {
    let params = nig::nig_mle(samples)?;
    let loglik: T = samples.iter().map(|&x| params.ln_pdf(x)).sum();
    DistributionFit::build(Family::Nig, FitParams::Nig(params), loglik, samples)
}

/// AIC, BIC and the Kolmogorov-Smirnov statistic.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GofMetrics<T> {
    pub aic: T,
    pub bic: T,
    pub ks: T,
}

/// Computes `aic = 2k - 2L`, `bic = k ln n - 2L` and the raw KS statistic
/// `sup_x |F_emp - F_fit|` evaluated at the sorted sample points.
///
/// No Lilliefors small-sample correction is applied.
pub fn gof_metrics<T: Real>(fit: &DistributionFit<T>, samples: &[T]) -> Result<GofMetrics<T>> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::InsufficientData(
            "KS statistic needs at least one sample".to_string(),
        ));
    }
    let k = T::from_count(fit.family.parameter_count());
    let two = T::of(2.0);
    let aic = two * k - two * fit.log_likelihood;
    let bic = k * T::from_count(n).ln() - two * fit.log_likelihood;

    let evaluator = fit.evaluator()?;
    let mut sorted = samples.to_vec();
    sort_ascending(&mut sorted);
    let n_t = T::from_count(n);
    let mut ks = T::zero();
    for (i, &x) in sorted.iter().enumerate() {
        let f = evaluator.cdf(x);
        let upper = (T::from_count(i + 1) / n_t - f).abs();
        let lower = (T::from_count(i) / n_t - f).abs();
        ks = ks.max(upper.max(lower));
    }
    Ok(GofMetrics { aic, bic, ks })
}

/// QQ-plot data at plotting positions `(i - 0.5) / n`:
/// (theoretical quantile, empirical quantile) pairs.
pub fn qq_points<T: Real>(fit: &DistributionFit<T>, samples: &[T]) -> Result<Vec<(T, T)>> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::InsufficientData("QQ plot needs samples".to_string()));
    }
    let evaluator = fit.evaluator()?;
    let mut sorted = samples.to_vec();
    sort_ascending(&mut sorted);
    let n_t = T::from_count(n);
    let half = T::of(0.5);
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let u = (T::from_count(i + 1) - half) / n_t;
            Ok((evaluator.quantile(u)?, x))
        })
        .collect()
}

/// Writes QQ data as `theoretical_quantile,empirical_quantile` CSV.
pub fn write_qq_csv<T: Real, W: Write>(points: &[(T, T)], mut w: W) -> Result<()> {
    writeln!(w, "theoretical_quantile,empirical_quantile")?;
    for (theo, emp) in points {
        writeln!(
            w,
            "{},{}",
            crate::market_data::format_sig12(theo.as_f64()),
            crate::market_data::format_sig12(emp.as_f64())
        )?;
    }
    Ok(())
}
