//! Small numeric building blocks: dense Cholesky, projection onto the
//! probability simplex, Nelder–Mead minimization and golden-section search.

use crate::scalar::Real;

/// Solves `A x = b` for symmetric positive-definite `A` via Cholesky.
/// Returns `None` when a pivot is not strictly positive.
pub fn cholesky_solve<T: Real>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    let mut l = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum = sum - l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= T::zero() {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    // forward, then backward substitution
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum = sum - l[i][k] * y[k];
        }
        y[i] = sum / l[i][i];
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in (i + 1)..n {
            sum = sum - l[k][i] * x[k];
        }
        x[i] = sum / l[i][i];
    }
    Some(x)
}

/// Euclidean projection onto the probability simplex `{w >= 0, sum w = 1}`.
///
/// Sort-based algorithm; exact up to rounding.
pub fn project_simplex<T: Real>(v: &[T]) -> Vec<T> {
    let n = v.len();
    let mut sorted = v.to_vec();
    crate::scalar::sort_ascending(&mut sorted);
    sorted.reverse();
    let mut cumsum = T::zero();
    let mut tau = T::zero();
    let mut found = false;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - T::one()) / T::from_count(k + 1);
        if u - t > T::zero() {
            tau = t;
        } else {
            found = true;
            break;
        }
    }
    if !found {
        tau = (cumsum - T::one()) / T::from_count(n);
    }
    v.iter().map(|&x| (x - tau).max(T::zero())).collect()
}

/// Nelder–Mead minimization result.
pub struct NelderMead<T> {
    pub point: Vec<T>,
    pub value: T,
    pub iterations: usize,
}

/// Minimizes `f` from `start` with the classic Nelder–Mead simplex.
///
/// Stops when the simplex diameter falls below `param_tol` or after
/// `max_iter` iterations. The returned point is the best vertex ever seen,
/// so the value never exceeds `f(start)`.
pub fn nelder_mead<T: Real, F: FnMut(&[T]) -> T>(
    mut f: F,
    start: &[T],
    step: &[T],
    param_tol: T,
    max_iter: usize,
) -> NelderMead<T> {
    let n = start.len();
    let (alpha, gamma, rho, sigma) = (T::one(), T::of(2.0), T::of(0.5), T::of(0.5));

    let mut simplex: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += step[i];
        simplex.push(v);
    }
    let mut values: Vec<T> = simplex.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        // diameter of the simplex in the parameter max-norm
        let mut diameter = T::zero();
        for v in &simplex {
            for (a, b) in v.iter().zip(simplex[best].iter()) {
                diameter = diameter.max((*a - *b).abs());
            }
        }
        if diameter < param_tol {
            break;
        }

        let mut centroid = vec![T::zero(); n];
        for (idx, v) in simplex.iter().enumerate() {
            if idx == worst {
                continue;
            }
            for (c, x) in centroid.iter_mut().zip(v.iter()) {
                *c += *x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= T::from_count(n);
        }

        let reflect: Vec<T> = centroid
            .iter()
            .zip(simplex[worst].iter())
            .map(|(&c, &w)| c + alpha * (c - w))
            .collect();
        let f_reflect = f(&reflect);

        if f_reflect < values[best] {
            let expand: Vec<T> = centroid
                .iter()
                .zip(reflect.iter())
                .map(|(&c, &r)| c + gamma * (r - c))
                .collect();
            let f_expand = f(&expand);
            if f_expand < f_reflect {
                simplex[worst] = expand;
                values[worst] = f_expand;
            } else {
                simplex[worst] = reflect;
                values[worst] = f_reflect;
            }
        } else if f_reflect < values[second_worst] {
            simplex[worst] = reflect;
            values[worst] = f_reflect;
        } else {
            let contract: Vec<T> = centroid
                .iter()
                .zip(simplex[worst].iter())
                .map(|(&c, &w)| c + rho * (w - c))
                .collect();
            let f_contract = f(&contract);
            if f_contract < values[worst] {
                simplex[worst] = contract;
                values[worst] = f_contract;
            } else {
                // shrink toward the best vertex
                let best_point = simplex[best].clone();
                for idx in 0..=n {
                    if idx == best {
                        continue;
                    }
                    for (x, b) in simplex[idx].iter_mut().zip(best_point.iter()) {
                        *x = *b + sigma * (*x - *b);
                    }
                    values[idx] = f(&simplex[idx]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    NelderMead {
        point: simplex[best].clone(),
        value: values[best],
        iterations,
    }
}

/// Golden-section search maximizing a unimodal `f` on `[a, b]`.
/// Returns the abscissa of the best point found.
pub fn golden_section_max<T: Real, F: FnMut(T) -> T>(mut f: F, mut a: T, mut b: T, tol: T) -> T {
    let inv_phi = T::of(0.618_033_988_749_894_8);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        c
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = vec![vec![4.0, 2.0], vec![2.0, 3.0]];
        let b = vec![2.0, 1.0];
        let x = cholesky_solve(&a, &b).unwrap();
        // verify A x = b
        assert_relative_eq!(4.0 * x[0] + 2.0 * x[1], 2.0, epsilon = 1e-14);
        assert_relative_eq!(2.0 * x[0] + 3.0 * x[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(cholesky_solve(&a, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn simplex_projection_properties() {
        let w = project_simplex(&[0.4, 0.4, 0.4]);
        let sum: f64 = w.iter().sum();
        assert_relative_eq!(sum, 1.0, epsilon = 1e-12);
        // already-feasible points are fixed points
        let v = vec![0.2, 0.3, 0.5];
        let p = project_simplex(&v);
        for (a, b) in v.iter().zip(p.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        // dominant coordinate wins fully when others are far negative
        let p = project_simplex(&[5.0, -5.0, -5.0]);
        assert_relative_eq!(p[0], 1.0, epsilon = 1e-12);
        assert_eq!(p[1], 0.0);
    }

    #[test]
    fn nelder_mead_minimizes_quadratic() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2);
        let result = nelder_mead(f, &[0.0, 0.0], &[0.5, 0.5], 1e-10, 500);
        assert_relative_eq!(result.point[0], 1.5, epsilon = 1e-6);
        assert_relative_eq!(result.point[1], -0.5, epsilon = 1e-6);
    }

    #[test]
    fn golden_section_finds_peak() {
        let x = golden_section_max(|x: f64| -(x - 0.3).powi(2), 0.0, 1.0, 1e-10);
        assert_relative_eq!(x, 0.3, epsilon = 1e-8);
    }
}
