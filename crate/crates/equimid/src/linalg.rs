//! Small dense helpers for the low-dimensional Newton solves.

use crate::error::{Error, Result};
use crate::Scalar;

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    norm(&sub(a, b))
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when the pivot degenerates.
#[allow(clippy::needless_range_loop)]
pub fn solve<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() <= T::epsilon() * crate::c(1e3) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] = a[row][k] - factor * a[col][k];
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Determinant via elimination; used for Jacobian conditioning evidence.
#[allow(clippy::needless_range_loop)]
pub fn det<T: Scalar>(mut a: Vec<Vec<T>>) -> T {
    let n = a.len();
    let mut result = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if a[pivot][col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            a.swap(col, pivot);
            result = -result;
        }
        result = result * a[col][col];
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] = a[row][k] - factor * a[col][k];
            }
        }
    }
    result
}

/// Damped Newton iteration for `map(u) = target`.
///
/// Full steps are tried first; when the residual norm does not strictly
/// decrease the step is halved, down to a floor, before giving up.
#[allow(clippy::type_complexity)]
pub fn damped_newton<T: Scalar>(
    map: &dyn Fn(&[T]) -> Result<Vec<T>>,
    jacobian: &dyn Fn(&[T]) -> Result<Vec<Vec<T>>>,
    target: &[T],
    init: &[T],
    tol: T,
    max_iter: usize,
) -> Result<Vec<T>> {
    let mut u = init.to_vec();
    let mut r = sub(&map(&u)?, target);
    let mut rn = norm(&r);
    for _ in 0..max_iter {
        if rn <= tol {
            return Ok(u);
        }
        let jac = jacobian(&u)?;
        let neg_r: Vec<T> = r.iter().map(|&x| -x).collect();
        let step = solve(jac, neg_r).ok_or(Error::NoConvergence {
            iterations: max_iter,
            residual: rn.to_f64().unwrap_or(f64::NAN),
        })?;
        let mut alpha = T::one();
        let floor = crate::c::<T>(2f64.powi(-30));
        loop {
            let trial: Vec<T> = u
                .iter()
                .zip(&step)
                .map(|(&ui, &si)| ui + alpha * si)
                .collect();
            let tr = sub(&map(&trial)?, target);
            let trn = norm(&tr);
            if trn < rn {
                u = trial;
                r = tr;
                rn = trn;
                break;
            }
            alpha = alpha * crate::c(0.5);
            if alpha < floor {
                return Err(Error::NoConvergence {
                    iterations: max_iter,
                    residual: rn.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    if rn <= tol {
        Ok(u)
    } else {
        Err(Error::NoConvergence {
            iterations: max_iter,
            residual: rn.to_f64().unwrap_or(f64::NAN),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_3x3_system() {
        let a: Vec<Vec<f64>> = vec![
            vec![2.0, 1.0, -1.0],
            vec![-3.0, -1.0, 2.0],
            vec![-2.0, 1.0, 2.0],
        ];
        let b = vec![8.0, -11.0, -3.0];
        let x = solve(a, b).unwrap();
        let expect = [2.0, 3.0, -1.0];
        for i in 0..3 {
            assert!((x[i] - expect[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve(a, vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn determinant_sign_and_value() {
        let a: Vec<Vec<f64>> = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!((det(a) + 1.0).abs() < 1e-15);
        let b: Vec<Vec<f64>> = vec![vec![3.0, 0.0], vec![0.0, 0.5]];
        assert!((det(b) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn newton_inverts_a_nonlinear_map() {
        // map(u) = (u0 + u1^3, u1) is a bijection
        let map = |u: &[f64]| -> crate::Result<Vec<f64>> { Ok(vec![u[0] + u[1].powi(3), u[1]]) };
        let jac = |u: &[f64]| -> crate::Result<Vec<Vec<f64>>> {
            Ok(vec![vec![1.0, 3.0 * u[1] * u[1]], vec![0.0, 1.0]])
        };
        let target = [5.0, 2.0];
        let u = damped_newton(&map, &jac, &target, &[0.0, 0.0], 1e-12, 100).unwrap();
        assert!((u[0] + 8.0 - 5.0).abs() < 1e-10);
        assert!((u[1] - 2.0).abs() < 1e-12);
    }
}
