use crate::error::{check_dim, contract, Result};
use crate::linalg::min_norm_solve;
use crate::problem::Problem;
use crate::scalar::Scalar;

use super::budget::{Meter, Stop};

/// Central-difference Jacobian of the constraint values, one row per constraint.
pub fn numerical_gradient<T: Scalar>(problem: &Problem<T>, x: &[T], h: T) -> Result<Vec<Vec<T>>> {
    check_dim(problem.dimension(), x.len())?;
    if !(h > T::zero()) {
        return Err(contract("finite-difference step must be > 0"));
    }
    let jac = jacobian(x, h, problem.constraints().len(), |p| {
        Ok::<_, std::convert::Infallible>(problem.constraint_values(p).expect("dimension checked"))
    });
    Ok(jac.unwrap_or_else(|never| match never {}))
}

/// Shared central-difference loop; `values` returns all constraint values at a point.
fn jacobian<T: Scalar, E>(
    x: &[T],
    h: T,
    m: usize,
    mut values: impl FnMut(&[T]) -> std::result::Result<Vec<T>, E>,
) -> std::result::Result<Vec<Vec<T>>, E> {
    let n = x.len();
    let mut jac = vec![vec![T::zero(); n]; m];
    let mut probe = x.to_vec();
    let two_h = h + h;
    for k in 0..n {
        probe[k] = x[k] + h;
        let plus = values(&probe)?;
        probe[k] = x[k] - h;
        let minus = values(&probe)?;
        probe[k] = x[k];
        for (row, (p, q)) in jac.iter_mut().zip(plus.iter().zip(&minus)) {
            row[k] = (*p - *q) / two_h;
        }
    }
    Ok(jac)
}

/// One least-squares repair step toward the feasible region: solves
/// `J dx = -c` for the violated constraints (minimum norm), then clamps.
/// The `2n` probe evaluations are charged to the meter.
pub(crate) fn repair_step<T: Scalar>(
    meter: &mut Meter<'_, T>,
    x: &[T],
    violations: &[T],
    h: T,
) -> Result<Option<Vec<T>>, Stop> {
    let violated: Vec<usize> = (0..violations.len())
        .filter(|&i| violations[i] > T::zero())
        .collect();
    if violated.is_empty() {
        return Ok(None);
    }
    let jac = jacobian(x, h, violations.len(), |p| {
        meter.eval_full(p).map(|(_, _, g)| g)
    })?;
    let rows: Vec<Vec<T>> = violated.iter().map(|&i| jac[i].clone()).collect();
    let rhs: Vec<T> = violated.iter().map(|&i| -violations[i]).collect();
    Ok(min_norm_solve(&rows, &rhs).map(|dx| {
        let mut y: Vec<T> = x.iter().zip(&dx).map(|(&a, &d)| a + d).collect();
        meter.problem().bounds().clamp(&mut y);
        y
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Constraint, Objective};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_rows_are_the_coefficients() {
        let a: Vec<f64> = vec![1.5, -2.0, 3.25];
        let p = Problem::with_default_bounds(
            Objective::Sphere,
            3,
            vec![Constraint::linear(a.clone(), -1.0).unwrap()],
        )
        .unwrap();
        let jac = numerical_gradient(&p, &[0.3, -1.7, 2.2], 1e-6).unwrap();
        for (g, want) in jac[0].iter().zip(&a) {
            assert!((g - want).abs() < 1e-8, "{g} vs {want}");
        }
    }

    #[test]
    fn quadratic_rows_match_analytic_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let coeffs: Vec<f64> = (0..6).map(|_| rng.random_range(-5.0..5.0)).collect();
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let c = Constraint::quadratic(coeffs.clone(), -2.0).unwrap();
            let p = Problem::with_default_bounds(Objective::Sphere, 3, vec![c]).unwrap();
            let fine = numerical_gradient(&p, &x, 1e-6).unwrap();
            let coarse = numerical_gradient(&p, &x, 1e-5).unwrap();
            for k in 0..3 {
                let analytic = 2.0 * coeffs[2 * k] * x[k] + coeffs[2 * k + 1];
                assert!((fine[0][k] - analytic).abs() < 1e-6);
                assert!((fine[0][k] - coarse[0][k]).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn rejects_bad_step_and_dimension() {
        let p = Problem::<f64>::with_default_bounds(Objective::Sphere, 2, vec![]).unwrap();
        assert!(numerical_gradient(&p, &[0.0, 0.0], 0.0).is_err());
        assert!(numerical_gradient(&p, &[0.0], 1e-6).is_err());
        assert!(numerical_gradient(&p, &[0.0, 0.0], 1e-6)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn repair_reaches_linear_boundary_and_charges_probes() {
        let c = Constraint::linear(vec![3.0, 4.0], -5.0).unwrap();
        let p = Problem::with_default_bounds(Objective::Sphere, 2, vec![c]).unwrap();
        let mut meter = Meter::new(&p, 1000, 1e-12);
        let x = [3.0f64, 4.0];
        let g = p.constraint_values(&x).unwrap();
        let y = repair_step(&mut meter, &x, &g, 1e-6).unwrap().unwrap();
        assert_eq!(meter.fen(), 4);
        assert!(p.constraint_values(&y).unwrap()[0].abs() < 1e-6);
    }
}
