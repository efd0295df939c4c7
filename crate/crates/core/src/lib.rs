//! Tail-risk portfolio toolkit: mean-CVaR frontiers and tangency portfolios
//! from daily price data, Normal / Normal-Inverse-Gaussian return fitting
//! with goodness-of-fit diagnostics, rolling out-of-sample backtests, and
//! implied probability-weighting curves that quantify fear/greed
//! distortions.
//!
//! The numeric core is generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the aliases below fix the common `f64` instantiation.

pub mod backtest;
pub mod distfit;
pub mod error;
pub mod fixture;
pub mod market_data;
pub mod optimizer;
pub mod pwf;
pub mod quad;
pub mod scalar;
pub mod seeding;
pub mod solve;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Real;

/// Daily return panel over `f64`.
pub type Panel = market_data::ReturnPanel<f64>;
/// Price series over `f64`.
pub type Prices = market_data::PriceSeries<f64>;
/// Risk-free rate over `f64`.
pub type Rate = market_data::RiskFreeRate<f64>;
/// Fitted distribution over `f64`.
pub type Fit = distfit::DistributionFit<f64>;
/// Long-only portfolio weights over `f64`.
pub type Portfolio = optimizer::Weights<f64>;
/// CVaR solution over `f64`.
pub type Solution = optimizer::CvarSolution<f64>;
/// Implied probability-weighting curve over `f64`.
pub type Curve = pwf::PwfCurve<f64>;
