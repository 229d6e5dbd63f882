//! Small dense row-major helpers. Sizes here are tiny (n <= a few dozen), so
//! plain Gaussian elimination is all that's needed.

use crate::scalar::Scalar;

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
/// `a` is `n x n` row-major. Returns `None` when a pivot falls below `tol`.
pub(crate) fn solve_in_place<T: Scalar>(a: &mut [T], b: &mut [T], tol: T) -> Option<()> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i * n + col]
                .abs()
                .partial_cmp(&a[j * n + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if !(a[pivot * n + col].abs() > tol) {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let p = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            if factor == T::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * b[k];
        }
        b[row] = acc / a[row * n + row];
    }
    Some(())
}

/// Minimum-norm solution of the underdetermined system `J dx = rhs`, where
/// `jac` holds the rows of `J`: `dx = J^T (J J^T)^{-1} rhs`.
pub(crate) fn min_norm_solve<T: Scalar>(jac: &[Vec<T>], rhs: &[T]) -> Option<Vec<T>> {
    let m = jac.len();
    if m == 0 {
        return None;
    }
    let n = jac[0].len();
    let mut gram = vec![T::zero(); m * m];
    let mut scale = T::zero();
    for i in 0..m {
        for j in 0..m {
            let v: T = jac[i].iter().zip(&jac[j]).map(|(&a, &b)| a * b).sum();
            gram[i * m + j] = v;
            scale = scale.max(v.abs());
        }
    }
    let mut y = rhs.to_vec();
    solve_in_place(&mut gram, &mut y, scale * T::epsilon() * T::lit(1e3))?;
    let mut dx = vec![T::zero(); n];
    for (row, &yi) in jac.iter().zip(&y) {
        for (d, &r) in dx.iter_mut().zip(row) {
            *d += r * yi;
        }
    }
    Some(dx)
}

/// `y = A x` for a row-major `n x n` matrix.
pub(crate) fn mat_vec<T: Scalar>(a: &[T], x: &[T], y: &mut [T]) {
    let n = x.len();
    for (i, yi) in y.iter_mut().enumerate() {
        *yi = a[i * n..(i + 1) * n]
            .iter()
            .zip(x)
            .map(|(&p, &q)| p * q)
            .sum();
    }
}

pub(crate) fn identity<T: Scalar>(n: usize) -> Vec<T> {
    let mut m = vec![T::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = T::one();
    }
    m
}
