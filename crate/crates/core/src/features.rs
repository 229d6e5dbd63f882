//! Constraint features: coefficient spread, angles between linear constraint
//! normals, distance from the optimum (origin) to each constraint boundary,
//! feasibility ratio near the optimum, and constraint count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Bounds, Constraint, ConstraintKind, Problem};
use crate::scalar::{dot, norm, Scalar};

fn population_std<T: Scalar>(values: &[T]) -> T {
    let n = T::from_usize(values.len()).unwrap_or_else(T::one);
    let mean = values.iter().copied().sum::<T>() / n;
    (values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n).sqrt()
}

/// `(std of a)` for linear constraints; `(std of quadratic terms, std of linear terms)` for quadratic ones.
pub fn coefficient_stddev<T: Scalar>(constraint: &Constraint<T>) -> (T, Option<T>) {
    match constraint.kind() {
        ConstraintKind::Linear => (population_std(constraint.coeffs()), None),
        ConstraintKind::Quadratic => (
            population_std(&constraint.quadratic_terms()),
            Some(population_std(&constraint.linear_terms())),
        ),
    }
}

/// Angle in degrees, in `[0, 180]`, between the normals of two linear constraints.
pub fn pairwise_angle<T: Scalar>(c1: &Constraint<T>, c2: &Constraint<T>) -> Result<T> {
    for c in [c1, c2] {
        if c.kind() != ConstraintKind::Linear {
            return Err(Error::UnsupportedKind(c.kind()));
        }
    }
    crate::error::check_dim(c1.dimension(), c2.dimension())?;
    let (a, b) = (c1.coeffs(), c2.coeffs());
    let (na, nb) = (norm(a), norm(b));
    if na == T::zero() || nb == T::zero() {
        return Err(Error::UndefinedAngle);
    }
    let cos = (dot(a, b) / (na * nb)).max(-T::one()).min(T::one());
    Ok(cos.acos().to_degrees())
}

/// Euclidean distance from the origin to the boundary `g(x) = 0`.
pub fn shortest_distance<T: Scalar>(constraint: &Constraint<T>) -> Result<T> {
    let b = constraint.offset();
    if b == T::zero() {
        return Ok(T::zero());
    }
    match constraint.kind() {
        ConstraintKind::Linear => {
            let a = norm(constraint.coeffs());
            if a == T::zero() {
                Err(Error::NoBoundary)
            } else {
                Ok(b.abs() / a)
            }
        }
        ConstraintKind::Quadratic => quadratic_distance(constraint),
    }
}

/// With `g(0) = b < 0` (flipping signs when `b > 0`), the distance is the
/// smallest `r` for which `max_{|x| <= r} g(x) >= 0`. That maximum is a
/// trust-region problem with a diagonal Hessian, solved per coordinate for a
/// given multiplier; `r` is then bracketed and bisected.
fn quadratic_distance<T: Scalar>(constraint: &Constraint<T>) -> Result<T> {
    let sign = if constraint.offset() < T::zero() {
        T::one()
    } else {
        -T::one()
    };
    let target = -(sign * constraint.offset());
    let quad: Vec<T> = constraint
        .quadratic_terms()
        .into_iter()
        .map(|q| sign * q)
        .collect();
    let lin: Vec<T> = constraint
        .linear_terms()
        .into_iter()
        .map(|l| sign * l)
        .collect();
    if quad.iter().all(|&q| q <= T::zero()) && lin.iter().all(|&l| l == T::zero()) {
        return Err(Error::NoBoundary);
    }

    let reaches = |r: T| max_on_ball(&quad, &lin, r) >= target;
    let mut lo = T::zero();
    let mut hi = T::one();
    let mut doublings = 0;
    while !reaches(hi) {
        lo = hi;
        hi = hi + hi;
        doublings += 1;
        if doublings > 200 || !hi.is_finite() {
            return Err(Error::NoBoundary);
        }
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if reaches(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `max sum_k (q_k x_k^2 + l_k x_k)` subject to `|x| <= r`.
///
/// Stationary points are `x_k(mu) = l_k / (2 (mu - q_k))` with
/// `mu >= max(0, max q)`; the global maximiser takes the `mu` where the norm
/// hits `r`, or the interior/hard-case point when the norm never reaches it.
fn max_on_ball<T: Scalar>(quad: &[T], lin: &[T], r: T) -> T {
    let value = |x: &[T]| -> T {
        x.iter()
            .zip(quad.iter().zip(lin))
            .map(|(&v, (&q, &l))| q * v * v + l * v)
            .sum()
    };
    let two = T::lit(2.0);
    let q_max = quad.iter().copied().fold(T::neg_infinity(), T::max);
    let mu_lo = q_max.max(T::zero());
    let at = |mu: T| -> Vec<T> {
        quad.iter()
            .zip(lin)
            .map(|(&q, &l)| {
                let d = mu - q;
                if d > T::zero() {
                    l / (two * d)
                } else if l == T::zero() {
                    T::zero()
                } else {
                    T::infinity()
                }
            })
            .collect()
    };

    let x_lo = at(mu_lo);
    let norm_lo = norm(&x_lo);
    if norm_lo <= r {
        if mu_lo == T::zero() {
            return value(&x_lo);
        }
        // Hard case: put the remaining radius on a coordinate with q_k = mu_lo.
        let k = quad
            .iter()
            .position(|&q| q == q_max)
            .expect("q_max is attained");
        let mut x = x_lo;
        x[k] = (r * r - norm_lo * norm_lo).max(T::zero()).sqrt();
        return value(&x);
    }

    // |x(mu)| is decreasing on (mu_lo, inf); |x(mu)| <= |l| / (2 (mu - mu_lo)).
    let mut lo = mu_lo;
    let mut hi = mu_lo + norm(lin) / (two * r) + T::epsilon();
    for _ in 0..200 {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if norm(&at(mid)) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    value(&at(hi))
}

/// Fraction of uniform samples from the box `[-rho_i, rho_i]` (intersected with
/// the problem bounds) that satisfy every constraint, where
/// `rho_i = radius_fraction * (upper_i - lower_i) / 2`.
pub fn feasibility_ratio<T: Scalar>(
    problem: &Problem<T>,
    radius_fraction: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if !(radius_fraction > 0.0 && radius_fraction <= 1.0) {
        return Err(crate::error::contract("radius_fraction must lie in (0, 1]"));
    }
    if samples == 0 {
        return Err(crate::error::contract("samples must be >= 1"));
    }
    let region = vicinity(problem.bounds(), T::lit(radius_fraction))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut feasible = 0usize;
    for _ in 0..samples {
        let x = region.sample(&mut rng);
        if problem
            .constraints()
            .iter()
            .all(|c| c.value(&x) <= T::zero())
        {
            feasible += 1;
        }
    }
    Ok(feasible as f64 / samples as f64)
}

/// The sampling box around the origin used by [`feasibility_ratio`].
pub fn vicinity<T: Scalar>(bounds: &Bounds<T>, radius_fraction: T) -> Result<Bounds<T>> {
    let half = T::lit(0.5);
    let (lower, upper) = bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(&l, &u)| {
            let rho = radius_fraction * (u - l) * half;
            ((-rho).max(l), rho.min(u))
        })
        .unzip();
    Bounds::new(lower, upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub radius_fraction: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            radius_fraction: 0.05,
            samples: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientStd {
    pub primary: f64,
    /// Spread of the linear-term coefficients of a quadratic constraint.
    pub linear_term: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAngle {
    pub i: usize,
    pub j: usize,
    pub degrees: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub per_constraint_stddev: Vec<CoefficientStd>,
    /// Upper triangle `i < j`, linear pairs only.
    pub pairwise_angles_deg: Vec<PairAngle>,
    /// `None` where the boundary is empty.
    pub shortest_distances: Vec<Option<f64>>,
    pub feasibility_ratio: f64,
    pub constraint_count: usize,
}

pub fn feature_vector<T: Scalar>(
    problem: &Problem<T>,
    mc: &MonteCarloConfig,
) -> Result<FeatureVector> {
    let cs = problem.constraints();
    let per_constraint_stddev = cs
        .iter()
        .map(|c| {
            let (p, l) = coefficient_stddev(c);
            CoefficientStd {
                primary: p.to_f64_lossy(),
                linear_term: l.map(T::to_f64_lossy),
            }
        })
        .collect();
    let mut pairwise_angles_deg = Vec::new();
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            if cs[i].kind() == ConstraintKind::Linear && cs[j].kind() == ConstraintKind::Linear {
                let degrees = pairwise_angle(&cs[i], &cs[j]).ok().map(T::to_f64_lossy);
                pairwise_angles_deg.push(PairAngle { i, j, degrees });
            }
        }
    }
    let shortest_distances = cs
        .iter()
        .map(|c| shortest_distance(c).ok().map(T::to_f64_lossy))
        .collect();
    Ok(FeatureVector {
        per_constraint_stddev,
        pairwise_angles_deg,
        shortest_distances,
        feasibility_ratio: feasibility_ratio(problem, mc.radius_fraction, mc.samples, mc.seed)?,
        constraint_count: cs.len(),
    })
}
