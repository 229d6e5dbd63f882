//! (1+1)-CMA-ES with active constraint handling.
//!
//! The offspring distribution is `x + sigma * A z`. When an offspring violates
//! constraint `j`, an exponentially smoothed vector `v_j` of the violating
//! steps is updated and `A` is contracted along it, which reduces the variance
//! of future offspring in the direction of the constraint normal. Successful
//! feasible steps adapt `A` through a rank-one update along an evolution path,
//! and `sigma` follows a success-rate rule.
//!
//! Box bounds are handled as `2n` extra linear constraints. While the parent is
//! infeasible the search runs in a plain (1+1) mode that minimises the
//! violation first (feasibility rules), since the constraint-vector machinery
//! needs a feasible parent.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{identity, mat_vec, solve_in_place};
use crate::problem::Problem;
use crate::scalar::Scalar;

use super::budget::{Meter, Stop};
use super::{feas_cmp, SolveOutcome, SolverConfig, SolverKind};

struct Constants<T> {
    smoothing: T,
    shrink: T,
    success_up: T,
    success_down: T,
    path: T,
    path_norm: T,
    cov: T,
}

impl<T: Scalar> Constants<T> {
    fn new(config: &SolverConfig, n: usize) -> Self {
        let nf = n as f64;
        let p = &config.es;
        let damping = p.damping.unwrap_or(1.0 + nf / 2.0);
        let target = p.target_success_rate;
        let path = 2.0 / (nf + 2.0);
        Self {
            smoothing: T::lit(p.constraint_smoothing.unwrap_or(1.0 / (nf + 2.0))),
            shrink: T::lit(p.constraint_shrink.unwrap_or(0.1 / (nf + 2.0))),
            success_up: T::lit((1.0 / damping).exp()),
            success_down: T::lit((-target / (damping * (1.0 - target))).exp()),
            path: T::lit(path),
            path_norm: T::lit((path * (2.0 - path)).sqrt()),
            cov: T::lit(2.0 / (nf * nf + 6.0)),
        }
    }
}

pub fn solve_es<T: Scalar>(
    problem: &Problem<T>,
    config: &SolverConfig,
    seed: u64,
) -> Result<SolveOutcome<T>> {
    config.expect_kind(SolverKind::Es)?;
    let mut meter = Meter::new(problem, config.max_fen, config.target_gap);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let _ = run(&mut meter, config, &mut rng);
    Ok(meter.finish())
}

struct State<T> {
    x: Vec<T>,
    fit: (T, T),
    sigma: T,
    a: Vec<T>,
    path: Vec<T>,
    /// One smoothed direction per problem constraint, then 2n box faces.
    directions: Vec<Vec<T>>,
}

fn restart<T: Scalar>(
    meter: &mut Meter<'_, T>,
    rng: &mut ChaCha8Rng,
    sigma0: T,
) -> Result<State<T>, Stop> {
    let problem = meter.problem();
    let n = problem.dimension();
    let x = problem.bounds().sample(rng);
    let fit = meter.eval(&x)?;
    Ok(State {
        x,
        fit,
        sigma: sigma0,
        a: identity(n),
        path: vec![T::zero(); n],
        directions: vec![vec![T::zero(); n]; problem.constraints().len() + 2 * n],
    })
}

fn run<T: Scalar>(
    meter: &mut Meter<'_, T>,
    config: &SolverConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(), Stop> {
    let problem = meter.problem();
    let bounds = problem.bounds();
    let n = problem.dimension();
    let m = problem.constraints().len();
    let k = Constants::<T>::new(config, n);
    let sigma0 = T::lit(config.es.initial_step_fraction) * bounds.mean_width();
    let sigma_floor = sigma0 * T::lit(1e-12);

    let mut s = restart(meter, rng, sigma0)?;
    let mut z = vec![T::zero(); n];
    let mut az = vec![T::zero(); n];
    let mut y = vec![T::zero(); n];
    let mut violated: Vec<usize> = Vec::with_capacity(m + 2 * n);
    loop {
        if s.sigma < sigma_floor || !s.sigma.is_finite() {
            s = restart(meter, rng, sigma0)?;
        }
        for zi in z.iter_mut() {
            *zi = T::standard_normal(rng);
        }
        mat_vec(&s.a, &z, &mut az);
        for i in 0..n {
            y[i] = s.x[i] + s.sigma * az[i];
        }
        let (fy, phi, g) = meter.eval_full(&y)?;

        let box_excess: T = (0..n)
            .map(|i| {
                (bounds.lower()[i] - y[i]).max(T::zero())
                    + (y[i] - bounds.upper()[i]).max(T::zero())
            })
            .sum();
        let parent_feasible = s.fit.1 == T::zero();

        if !parent_feasible {
            let cand = (fy, phi + box_excess);
            if feas_cmp(cand, s.fit).is_le() {
                s.x.copy_from_slice(&y);
                s.fit = cand;
                s.sigma *= k.success_up;
            } else {
                s.sigma *= k.success_down;
            }
            continue;
        }

        violated.clear();
        violated.extend((0..m).filter(|&j| g[j] > T::zero()));
        for i in 0..n {
            if y[i] < bounds.lower()[i] {
                violated.push(m + 2 * i);
            } else if y[i] > bounds.upper()[i] {
                violated.push(m + 2 * i + 1);
            }
        }
        if !violated.is_empty() {
            shrink_along_violations(&mut s, &violated, &az, &k);
            continue;
        }

        if fy <= s.fit.0 {
            s.x.copy_from_slice(&y);
            s.fit = (fy, T::zero());
            s.sigma *= k.success_up;
            update_covariance(&mut s, &az, &k);
        } else {
            s.sigma *= k.success_down;
        }
    }
}

/// `v_j <- (1 - c) v_j + c A z` for each violated `j`, then
/// `A <- A - beta / |V| * sum_j v_j w_j^T / (w_j^T w_j)` with `w_j = A^{-1} v_j`.
fn shrink_along_violations<T: Scalar>(
    s: &mut State<T>,
    violated: &[usize],
    az: &[T],
    k: &Constants<T>,
) {
    let n = az.len();
    let mut delta = vec![T::zero(); n * n];
    let scale = k.shrink / T::from_usize(violated.len()).unwrap_or_else(T::one);
    for &j in violated {
        let v = &mut s.directions[j];
        for (vi, &a) in v.iter_mut().zip(az) {
            *vi = (T::one() - k.smoothing) * *vi + k.smoothing * a;
        }
        let mut w = v.clone();
        let mut lu = s.a.clone();
        if solve_in_place(&mut lu, &mut w, T::min_positive_value()).is_none() {
            continue;
        }
        let ww: T = w.iter().map(|&t| t * t).sum();
        if !(ww > T::zero()) {
            continue;
        }
        for r in 0..n {
            for c in 0..n {
                delta[r * n + c] += scale * v[r] * w[c] / ww;
            }
        }
    }
    for (a, d) in s.a.iter_mut().zip(&delta) {
        *a -= *d;
    }
}

/// Evolution path and rank-one update of the Cholesky factor after a success.
fn update_covariance<T: Scalar>(s: &mut State<T>, az: &[T], k: &Constants<T>) {
    let n = az.len();
    for (p, &a) in s.path.iter_mut().zip(az) {
        *p = (T::one() - k.path) * *p + k.path_norm * a;
    }
    let mut w = s.path.clone();
    let mut lu = s.a.clone();
    if solve_in_place(&mut lu, &mut w, T::min_positive_value()).is_none() {
        return;
    }
    let ww: T = w.iter().map(|&t| t * t).sum();
    if !(ww > T::zero()) {
        return;
    }
    let keep = (T::one() - k.cov).sqrt();
    let coef = keep / ww * ((T::one() + k.cov * ww / (T::one() - k.cov)).sqrt() - T::one());
    for r in 0..n {
        for c in 0..n {
            s.a[r * n + c] = keep * s.a[r * n + c] + coef * s.path[r] * w[c];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Bounds, Constraint, Objective};

    #[test]
    fn feasible_start_at_target_solves_in_one_evaluation() {
        let bounds = Bounds::uniform(3, -1e-3, 1e-3).unwrap();
        let c = Constraint::linear(vec![1.0, 1.0, 1.0], -1.0).unwrap();
        let p = Problem::new(Objective::Sphere, bounds, vec![c]).unwrap();
        let out = solve_es(&p, &SolverConfig::desk(SolverKind::Es), 9).unwrap();
        assert!(out.solved);
        assert_eq!(out.fen, 1);
    }

    #[test]
    fn empty_feasible_set_uses_whole_budget() {
        let c = Constraint::linear(vec![1.0, 0.0, 0.0], 10.0).unwrap();
        let p = Problem::with_default_bounds(Objective::Sphere, 3, vec![c]).unwrap();
        let mut cfg = SolverConfig::desk(SolverKind::Es);
        cfg.max_fen = 4000;
        let out = solve_es(&p, &cfg, 2).unwrap();
        assert!(!out.solved);
        assert_eq!(out.fen, 4000);
    }

    #[test]
    fn shrinking_reduces_variance_along_the_violated_direction() {
        let n = 3;
        let cfg = SolverConfig::desk(SolverKind::Es);
        let k = Constants::<f64>::new(&cfg, n);
        let mut s = State {
            x: vec![0.0; n],
            fit: (0.0, 0.0),
            sigma: 1.0,
            a: identity(n),
            path: vec![0.0; n],
            directions: vec![vec![0.0; n]],
        };
        for _ in 0..50 {
            shrink_along_violations(&mut s, &[0], &[1.0, 0.0, 0.0], &k);
        }
        // A A^T restricted to e_1 shrank; the orthogonal directions did not.
        let row_norm = |r: usize| (0..n).map(|c| s.a[r * n + c].powi(2)).sum::<f64>();
        assert!(row_norm(0) < 0.9);
        assert!((row_norm(1) - 1.0).abs() < 1e-12);
    }
}
