//! Moment estimation, Sharpe tangency and Rockafellar-Uryasev CVaR
//! programs over the long-only simplex.
//!
//! Sign convention: CVaR is expressed in LOSS space (positive = loss), the
//! average loss beyond the confidence quantile.

mod cvar;
mod sharpe;

pub use cvar::{cvar_frontier, cvar_tangency, min_cvar, portfolio_cvar, tangency_ratio};
pub use sharpe::sharpe_tangency;

use serde::{Deserialize, Serialize};

use crate::market_data::ReturnPanel;
use crate::scalar::Real;
use crate::{Error, Result};

/// Sample mean vector and covariance matrix of daily returns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentEstimates<T> {
    pub mu: Vec<T>,
    /// N x N, symmetric.
    pub sigma: Vec<Vec<T>>,
}

/// Long-only, fully invested portfolio weights on the N-simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights<T> {
    w: Vec<T>,
}

impl<T: Real> Weights<T> {
    /// Validates `w_i >= 0` and `sum w = 1` within 1e-8.
    pub fn new(w: Vec<T>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Domain("weights vector is empty".to_string()));
        }
        if w.iter().any(|x| !x.is_finite() || *x < T::zero()) {
            return Err(Error::Domain(format!("weights must be nonnegative: {w:?}")));
        }
        let sum: T = w.iter().copied().sum();
        if (sum - T::one()).abs() > T::of(1e-8) {
            return Err(Error::Domain(format!(
                "weights must sum to 1 within 1e-8, got {sum}"
            )));
        }
        Ok(Self { w })
    }

    /// Cleans solver output: clamps small negative round-off (>= -1e-7) to
    /// zero and renormalizes, then validates.
    pub fn from_solver(raw: &[T]) -> Result<Self> {
        if raw.iter().any(|x| *x < T::of(-1e-7)) {
            return Err(Error::Optimization {
                status: format!("solver weights violate the long-only bound: {raw:?}"),
            });
        }
        let clamped: Vec<T> = raw.iter().map(|&x| x.max(T::zero())).collect();
        let sum: T = clamped.iter().copied().sum();
        if !(sum > T::zero()) {
            return Err(Error::Optimization {
                status: "solver weights sum to zero".to_string(),
            });
        }
        Self::new(clamped.into_iter().map(|x| x / sum).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            w: vec![T::one() / T::from_count(n); n],
        }
    }

    pub fn single() -> Self {
        Self { w: vec![T::one()] }
    }

    /// Vertex portfolio `e_i`.
    pub fn vertex(n: usize, i: usize) -> Self {
        let mut w = vec![T::zero(); n];
        w[i] = T::one();
        Self { w }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Largest per-asset difference to another weight vector.
    pub fn sup_distance(&self, other: &Weights<T>) -> T {
        self.w
            .iter()
            .zip(other.w.iter())
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }
}

/// A solved CVaR program: weights, the auxiliary VaR level and the attained
/// CVaR, all in daily loss units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvarSolution<T> {
    pub weights: Weights<T>,
    /// VaR at the confidence level (the Rockafellar-Uryasev zeta).
    pub zeta: T,
    /// Attained CVaR (>= zeta when the tail is nonempty).
    pub cvar: T,
    /// mu^T w, per day.
    pub expected_return: T,
}

/// Feasibility status of a frontier point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrontierStatus {
    Optimal,
    /// Target numerically above the attainable maximum; risk/weights are
    /// placeholders and downstream plotting skips the point.
    Infeasible,
}

/// One point of the mean-CVaR frontier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontierPoint<T> {
    pub target_return: T,
    /// CVaR at the confidence level, per-day loss units.
    pub risk: T,
    pub weights: Weights<T>,
    pub status: FrontierStatus,
}

/// Column means and the divisor-(T-1) sample covariance, symmetrized as
/// `(S + S^T) / 2`.
pub fn estimate_moments<T: Real>(panel: &ReturnPanel<T>) -> Result<MomentEstimates<T>> {
    let t_len = panel.n_rows();
    let n = panel.n_assets();
    if t_len < 2 {
        return Err(Error::InsufficientData(format!(
            "moment estimation needs at least 2 rows, got {t_len}"
        )));
    }
    let t_t = T::from_count(t_len);
    let mut mu = vec![T::zero(); n];
    for row in &panel.returns {
        for (m, &r) in mu.iter_mut().zip(row.iter()) {
            *m += r;
        }
    }
    for m in mu.iter_mut() {
        *m /= t_t;
    }

    let denom = T::from_count(t_len - 1);
    let mut sigma = vec![vec![T::zero(); n]; n];
    for row in &panel.returns {
        for i in 0..n {
            let di = row[i] - mu[i];
            for j in i..n {
                sigma[i][j] += di * (row[j] - mu[j]);
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            let v = sigma[i][j] / denom;
            sigma[i][j] = v;
            sigma[j][i] = v; // exact symmetry by construction
        }
    }
    Ok(MomentEstimates { mu, sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    pub(crate) fn panel_from_rows(rows: Vec<Vec<f64>>) -> ReturnPanel<f64> {
        let n = rows[0].len();
        let start = NaiveDate::from_ymd_opt(2021, 1, 4).unwrap();
        ReturnPanel {
            tickers: (0..n).map(|i| format!("A{i:02}")).collect(),
            dates: (0..rows.len())
                .map(|t| start + chrono::Days::new(t as u64))
                .collect(),
            returns: rows,
        }
    }

    #[test]
    fn two_point_single_asset_moments() {
        let panel = panel_from_rows(vec![vec![0.01], vec![0.03]]);
        let m = estimate_moments(&panel).unwrap();
        assert!((m.mu[0] - 0.02).abs() < 1e-18);
        // (0.01^2 + 0.01^2) / 1
        assert!((m.sigma[0][0] - 0.0002).abs() < 1e-18);
    }

    #[test]
    fn duplicate_columns_rank_one_and_symmetric() {
        let rows = vec![vec![0.01, 0.01], vec![-0.02, -0.02], vec![0.005, 0.005]];
        let m = estimate_moments(&panel_from_rows(rows)).unwrap();
        assert_eq!(m.sigma[0][1], m.sigma[1][0]);
        assert_eq!(m.sigma[0][0], m.sigma[1][1]);
        assert_eq!(m.sigma[0][0], m.sigma[0][1]);
    }

    #[test]
    fn insufficient_rows_error() {
        let panel = panel_from_rows(vec![vec![0.01]]);
        assert!(matches!(
            estimate_moments(&panel),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn weights_validation() {
        assert!(Weights::new(vec![0.5, 0.5]).is_ok());
        assert!(Weights::new(vec![0.5, 0.6]).is_err());
        assert!(Weights::new(vec![1.1, -0.1]).is_err());
        let cleaned = Weights::from_solver(&[1.0000000001, -1e-10]).unwrap();
        assert_eq!(cleaned.as_slice()[1], 0.0);
    }
}
