//! Long-only Sharpe-maximizing tangency portfolio.
//!
//! The ratio (mu^T w - r_f) / sqrt(w^T Sigma w) is pseudo-concave where the
//! excess return is positive, so any KKT point over the simplex is the
//! global maximum. The solver runs projected gradient ascent with
//! backtracking from two starts (uniform weights and the clipped,
//! renormalized unconstrained solution of Sigma w = mu - r_f 1), then
//! polishes with a closed-form solve on the detected support.

use crate::market_data::RiskFreeRate;
use crate::optimizer::{MomentEstimates, Weights};
use crate::scalar::Real;
use crate::solve::{cholesky_solve, project_simplex};
use crate::{Error, Result};

/// Maximizes `(mu^T w - r_f) / sqrt(w^T Sigma w)` over `{w >= 0, 1^T w = 1}`.
///
/// Pass `rf = 0` for the raw-mean objective. Errors when no asset offers a
/// positive excess return. Near-singular covariance is repaired with a
/// logged ridge `1e-10 * trace(Sigma) / N`.
pub fn sharpe_tangency<T: Real>(
    moments: &MomentEstimates<T>,
    rf: &RiskFreeRate<T>,
) -> Result<Weights<T>> {
    let n = moments.mu.len();
    if n == 0 || moments.sigma.len() != n {
        return Err(Error::Domain(
            "moment estimates have inconsistent dimensions".to_string(),
        ));
    }
    if n == 1 {
        return Ok(Weights::single());
    }
    let rate = rf.daily_rate;
    let excess: Vec<T> = moments.mu.iter().map(|&m| m - rate).collect();
    let best_vertex = argmax(&excess);
    if excess[best_vertex] <= T::zero() {
        return Err(Error::InfeasibleTangency(format!(
            "no asset return exceeds the risk-free rate {rate}"
        )));
    }

    let sigma = repaired_covariance(&moments.sigma);
    let objective = |w: &[T]| -> T {
        let var = quadratic_form(&sigma, w);
        if var <= T::zero() {
            return T::neg_infinity();
        }
        dot(&excess, w) / var.sqrt()
    };

    // start (a): uniform, pulled toward the best vertex until the excess
    // return is positive so ascent begins on the pseudo-concave region
    let mut uniform = Weights::<T>::uniform(n).as_slice().to_vec();
    for _ in 0..64 {
        if dot(&excess, &uniform) > T::zero() {
            break;
        }
        for (i, w) in uniform.iter_mut().enumerate() {
            let toward = if i == best_vertex { T::one() } else { T::zero() };
            *w = (*w + toward) * T::of(0.5);
        }
    }
    // start (b): clipped, renormalized unconstrained tangency Sigma^-1 excess
    let unconstrained = cholesky_solve(&sigma, &excess)
        .map(|y| {
            let clipped: Vec<T> = y.iter().map(|&v| v.max(T::zero())).collect();
            let sum: T = clipped.iter().copied().sum();
            if sum > T::zero() {
                clipped.into_iter().map(|v| v / sum).collect()
            } else {
                Weights::<T>::vertex(n, best_vertex).as_slice().to_vec()
            }
        })
        .unwrap_or_else(|| Weights::<T>::vertex(n, best_vertex).as_slice().to_vec());

    let mut candidates: Vec<Vec<T>> = Vec::new();
    for start in [uniform, unconstrained] {
        let w = ascend(&excess, &sigma, start, &objective);
        if let Some(polished) = support_polish(&excess, &sigma, &w) {
            candidates.push(polished);
        }
        candidates.push(w);
    }

    // best objective, ties broken by the lexicographically smallest vector
    let mut best = candidates[0].clone();
    let mut best_value = objective(&best);
    for cand in candidates.into_iter().skip(1) {
        let value = objective(&cand);
        let tie = (value - best_value).abs() <= T::of(1e-12) * (T::one() + best_value.abs());
        if value > best_value && !tie || (tie && lex_less(&cand, &best)) {
            best = cand;
            best_value = value;
        }
    }
    Weights::from_solver(&best)
}

/// KKT stationarity residual of the simplex-constrained ratio program at
/// `w`: support gradients must equal the multiplier, off-support gradients
/// must not exceed it.
pub fn kkt_residual<T: Real>(
    moments: &MomentEstimates<T>,
    rf: &RiskFreeRate<T>,
    weights: &Weights<T>,
) -> T {
    let excess: Vec<T> = moments.mu.iter().map(|&m| m - rf.daily_rate).collect();
    let sigma = repaired_covariance(&moments.sigma);
    let w = weights.as_slice();
    let grad = gradient(&excess, &sigma, w);
    let lambda = dot(&grad, w);
    let mut residual = T::zero();
    for (i, &g) in grad.iter().enumerate() {
        let r = if w[i] > T::of(1e-10) {
            (g - lambda).abs()
        } else {
            (g - lambda).max(T::zero())
        };
        residual = residual.max(r);
    }
    residual
}

fn ascend<T: Real>(
    excess: &[T],
    sigma: &[Vec<T>],
    mut w: Vec<T>,
    objective: &impl Fn(&[T]) -> T,
) -> Vec<T> {
    let mut value = objective(&w);
    let mut step = T::one();
    for _ in 0..20_000 {
        let grad = gradient(excess, sigma, &w);
        let mut improved = false;
        for _ in 0..60 {
            let trial: Vec<T> = w.iter().zip(grad.iter()).map(|(&x, &g)| x + step * g).collect();
            let projected = project_simplex(&trial);
            let trial_value = objective(&projected);
            if trial_value > value {
                let gain = trial_value - value;
                w = projected;
                value = trial_value;
                step = step * T::of(1.25);
                improved = true;
                if gain <= T::of(1e-15) * (T::one() + value.abs()) {
                    return w;
                }
                break;
            }
            step = step * T::of(0.5);
            if step < T::of(1e-18) {
                return w;
            }
        }
        if !improved {
            return w;
        }
    }
    w
}

/// Exact tangency on the positive support: solve Sigma_SS y = excess_S and
/// renormalize; accepted only if it is long-only feasible.
fn support_polish<T: Real>(excess: &[T], sigma: &[Vec<T>], w: &[T]) -> Option<Vec<T>> {
    let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > T::of(1e-9)).collect();
    if support.is_empty() {
        return None;
    }
    let sub_sigma: Vec<Vec<T>> = support
        .iter()
        .map(|&i| support.iter().map(|&j| sigma[i][j]).collect())
        .collect();
    let sub_excess: Vec<T> = support.iter().map(|&i| excess[i]).collect();
    let y = cholesky_solve(&sub_sigma, &sub_excess)?;
    if y.iter().any(|&v| v < T::zero()) {
        return None;
    }
    let total: T = y.iter().copied().sum();
    if !(total > T::zero()) {
        return None;
    }
    let mut full = vec![T::zero(); w.len()];
    for (&i, &v) in support.iter().zip(y.iter()) {
        full[i] = v / total;
    }
    Some(full)
}

fn gradient<T: Real>(excess: &[T], sigma: &[Vec<T>], w: &[T]) -> Vec<T> {
    let var = quadratic_form(sigma, w);
    let vol = var.sqrt();
    let mean = dot(excess, w);
    let sigma_w = mat_vec(sigma, w);
    excess
        .iter()
        .zip(sigma_w.iter())
        .map(|(&e, &sw)| e / vol - mean * sw / (var * vol))
        .collect()
}

fn repaired_covariance<T: Real>(sigma: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = sigma.len();
    if cholesky_solve(sigma, &vec![T::one(); n]).is_some() {
        return sigma.to_vec();
    }
    let trace: T = (0..n).map(|i| sigma[i][i]).sum();
    let mut ridge = T::of(1e-10) * trace / T::from_count(n);
    let mut repaired = sigma.to_vec();
    for _ in 0..8 {
        for (i, row) in repaired.iter_mut().enumerate() {
            row[i] = sigma[i][i] + ridge;
        }
        if cholesky_solve(&repaired, &vec![T::one(); n]).is_some() {
            log::warn!("covariance repaired with ridge {ridge}");
            return repaired;
        }
        ridge = ridge * T::of(10.0);
    }
    log::warn!("covariance still near-singular after ridge escalation");
    repaired
}

fn quadratic_form<T: Real>(sigma: &[Vec<T>], w: &[T]) -> T {
    mat_vec(sigma, w)
        .iter()
        .zip(w.iter())
        .map(|(&a, &b)| a * b)
        .sum()
}

fn mat_vec<T: Real>(m: &[Vec<T>], v: &[T]) -> Vec<T> {
    m.iter()
        .map(|row| row.iter().zip(v.iter()).map(|(&a, &b)| a * b).sum())
        .collect()
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b.iter()).map(|(&x, &y)| x * y).sum()
}

fn argmax<T: Real>(v: &[T]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

fn lex_less<T: Real>(a: &[T], b: &[T]) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}
