//! Constrained continuous problems: box bounds, linear and separable quadratic
//! inequality constraints, and three objectives shifted so their minimum is 0
//! at the origin.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, contract, Result};
use crate::scalar::Scalar;

/// Default tolerance used when an equality constraint is relaxed to `|h| - eps <= 0`.
pub const EQUALITY_EPSILON: f64 = 1e-4;

/// Default coefficient range of generated constraints.
pub const DEFAULT_COEFF_RANGE: (f64, f64) = (-5.0, 5.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Sphere,
    Ackley,
    Rosenbrock,
}

impl Objective {
    pub const ALL: [Objective; 3] = [Objective::Sphere, Objective::Ackley, Objective::Rosenbrock];

    pub fn name(self) -> &'static str {
        match self {
            Objective::Sphere => "sphere",
            Objective::Ackley => "ackley",
            Objective::Rosenbrock => "rosenbrock",
        }
    }

    /// Coordinate of the unshifted minimizer (the same in every dimension).
    fn natural_minimizer<T: Scalar>(self) -> T {
        match self {
            Objective::Rosenbrock => T::one(),
            Objective::Sphere | Objective::Ackley => T::zero(),
        }
    }

    /// Evaluates the objective at `x`, shifted so the minimizer is the origin.
    pub fn value<T: Scalar>(self, x: &[T]) -> T {
        let shift = self.natural_minimizer::<T>();
        match self {
            Objective::Sphere => x.iter().map(|&v| v * v).sum(),
            Objective::Ackley => {
                let n = T::from_usize(x.len()).unwrap_or_else(T::one);
                let mean_sq = x.iter().map(|&v| v * v).sum::<T>() / n;
                let two_pi = T::lit(2.0 * std::f64::consts::PI);
                let mean_cos = x.iter().map(|&v| (two_pi * v).cos()).sum::<T>() / n;
                // 20 (1 - e^{-0.2 r}) + e (1 - e^{c - 1}); both terms are >= 0
                // and exactly 0 at the origin.
                let radial = -T::lit(20.0) * (-T::lit(0.2) * mean_sq.sqrt()).exp_m1();
                let periodic = -T::lit(std::f64::consts::E) * (mean_cos - T::one()).exp_m1();
                radial + periodic
            }
            Objective::Rosenbrock => {
                if x.len() == 1 {
                    let z = x[0] + shift;
                    return (T::one() - z) * (T::one() - z);
                }
                x.windows(2)
                    .map(|w| {
                        let zi = w[0] + shift;
                        let zj = w[1] + shift;
                        let a = zj - zi * zi;
                        let b = T::one() - zi;
                        T::lit(100.0) * a * a + b * b
                    })
                    .sum()
            }
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" => Ok(Objective::Sphere),
            "ackley" => Ok(Objective::Ackley),
            "rosenbrock" => Ok(Objective::Rosenbrock),
            other => Err(format!("unknown objective `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Bounds<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> Bounds<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(contract("bounds must have at least one dimension"));
        }
        for (i, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(contract(format!(
                    "bounds[{i}]: need finite lower < upper, got [{l}, {u}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lo, hi]` in every one of `n` dimensions.
    pub fn uniform(n: usize, lo: T, hi: T) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dimension()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&l, &u))| v >= l && v <= u)
    }

    pub fn clamp(&self, x: &mut [T]) {
        for (v, (&l, &u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.max(l).min(u);
        }
    }

    /// Mean edge length of the box.
    pub fn mean_width(&self) -> T {
        let n = T::from_usize(self.dimension()).unwrap_or_else(T::one);
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| u - l)
            .sum::<T>()
            / n
    }

    /// Uniform point in the box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| (l + (u - l) * T::unit(rng)).min(u))
            .collect()
    }
}

/// Uniform point in `bounds`, reproducible from `seed`.
pub fn sample_uniform<T: Scalar>(bounds: &Bounds<T>, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    bounds.sample(&mut rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    Linear,
    Quadratic,
}

impl ConstraintKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::Linear => "linear",
            ConstraintKind::Quadratic => "quadratic",
        }
    }

    /// Number of coefficients a constraint of this kind carries in dimension `n`.
    pub fn coeff_len(self, n: usize) -> usize {
        match self {
            ConstraintKind::Linear => n,
            ConstraintKind::Quadratic => 2 * n,
        }
    }
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ConstraintKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(ConstraintKind::Linear),
            "quadratic" => Ok(ConstraintKind::Quadratic),
            other => Err(format!("unknown constraint kind `{other}`")),
        }
    }
}

/// Inequality constraint `g(x) <= 0`.
///
/// * linear: `g(x) = b + a_1 x_1 + ... + a_n x_n`
/// * quadratic: `g(x) = b + sum_k (a_{2k-1} x_k^2 + a_{2k} x_k)`, stored as
///   `(quadratic, linear)` pairs per variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Constraint<T> {
    kind: ConstraintKind,
    coeffs: Vec<T>,
    #[serde(rename = "b")]
    offset: T,
}

impl<T: Scalar> Constraint<T> {
    pub fn new(kind: ConstraintKind, coeffs: Vec<T>, offset: T) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(contract("constraint needs at least one coefficient"));
        }
        if kind == ConstraintKind::Quadratic && !coeffs.len().is_multiple_of(2) {
            return Err(contract(
                "quadratic constraint needs an even number of coefficients",
            ));
        }
        if !offset.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(contract("constraint coefficients must be finite"));
        }
        Ok(Self {
            kind,
            coeffs,
            offset,
        })
    }

    pub fn linear(coeffs: Vec<T>, offset: T) -> Result<Self> {
        Self::new(ConstraintKind::Linear, coeffs, offset)
    }

    pub fn quadratic(coeffs: Vec<T>, offset: T) -> Result<Self> {
        Self::new(ConstraintKind::Quadratic, coeffs, offset)
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn dimension(&self) -> usize {
        match self.kind {
            ConstraintKind::Linear => self.coeffs.len(),
            ConstraintKind::Quadratic => self.coeffs.len() / 2,
        }
    }

    /// Quadratic-term coefficients `a_1, a_3, ...` (empty for linear constraints).
    pub fn quadratic_terms(&self) -> Vec<T> {
        match self.kind {
            ConstraintKind::Linear => Vec::new(),
            ConstraintKind::Quadratic => self.coeffs.iter().step_by(2).copied().collect(),
        }
    }

    /// Linear-term coefficients: all of `a` for linear, `a_2, a_4, ...` for quadratic.
    pub fn linear_terms(&self) -> Vec<T> {
        match self.kind {
            ConstraintKind::Linear => self.coeffs.clone(),
            ConstraintKind::Quadratic => self.coeffs.iter().skip(1).step_by(2).copied().collect(),
        }
    }

    /// `g(x)`. The caller guarantees `x.len() == self.dimension()`.
    #[inline]
    pub fn value(&self, x: &[T]) -> T {
        match self.kind {
            ConstraintKind::Linear => {
                self.offset + x.iter().zip(&self.coeffs).map(|(&v, &a)| v * a).sum::<T>()
            }
            ConstraintKind::Quadratic => {
                self.offset
                    + x.iter()
                        .zip(self.coeffs.chunks_exact(2))
                        .map(|(&v, pair)| pair[0] * v * v + pair[1] * v)
                        .sum::<T>()
            }
        }
    }

    /// True when the offset is non-positive and every coefficient is inside `[lo, hi]`,
    /// i.e. the constraint is a valid generated instance (origin feasible).
    pub fn is_generated_form(&self, lo: T, hi: T) -> bool {
        self.offset <= T::zero() && self.coeffs.iter().all(|&c| c >= lo && c <= hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T> {
    pub objective_value: T,
    pub violations: Vec<T>,
    pub total_violation: T,
}

impl<T: Scalar> Evaluation<T> {
    pub fn is_feasible(&self) -> bool {
        self.total_violation == T::zero()
    }
}

/// Sum of positive parts.
pub fn total_violation<T: Scalar>(violations: &[T]) -> T {
    violations.iter().map(|&g| g.max(T::zero())).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem<T> {
    objective: Objective,
    bounds: Bounds<T>,
    constraints: Vec<Constraint<T>>,
}

impl<T: Scalar> Problem<T> {
    pub fn new(
        objective: Objective,
        bounds: Bounds<T>,
        constraints: Vec<Constraint<T>>,
    ) -> Result<Self> {
        let n = bounds.dimension();
        for c in &constraints {
            check_dim(n, c.dimension())?;
        }
        Ok(Self {
            objective,
            bounds,
            constraints,
        })
    }

    /// Problem on the default box `[-5, 5]^n`.
    pub fn with_default_bounds(
        objective: Objective,
        n: usize,
        constraints: Vec<Constraint<T>>,
    ) -> Result<Self> {
        Self::new(
            objective,
            Bounds::uniform(n, T::lit(-5.0), T::lit(5.0))?,
            constraints,
        )
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dimension()
    }

    pub fn bounds(&self) -> &Bounds<T> {
        &self.bounds
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    /// Appends a constraint, keeping everything else.
    pub fn with_constraint(&self, c: Constraint<T>) -> Result<Self> {
        let mut constraints = self.constraints.clone();
        constraints.push(c);
        Self::new(self.objective, self.bounds.clone(), constraints)
    }

    pub fn evaluate_objective(&self, x: &[T]) -> Result<T> {
        check_dim(self.dimension(), x.len())?;
        Ok(self.objective.value(x))
    }

    pub fn constraint_values(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.dimension(), x.len())?;
        Ok(self.constraints.iter().map(|c| c.value(x)).collect())
    }

    pub fn evaluate(&self, x: &[T]) -> Result<Evaluation<T>> {
        check_dim(self.dimension(), x.len())?;
        let violations: Vec<T> = self.constraints.iter().map(|c| c.value(x)).collect();
        Ok(Evaluation {
            objective_value: self.objective.value(x),
            total_violation: total_violation(&violations),
            violations,
        })
    }

    pub fn is_feasible(&self, x: &[T]) -> Result<bool> {
        check_dim(self.dimension(), x.len())?;
        Ok(self.bounds.contains(x) && self.constraints.iter().all(|c| c.value(x) <= T::zero()))
    }

    /// True when every constraint is in generated form for the coefficient range.
    pub fn is_generated_form(&self, lo: T, hi: T) -> bool {
        self.constraints.iter().all(|c| c.is_generated_form(lo, hi))
    }
}

/// Relaxes an equality constraint value `h(x)` to the inequality value `|h| - epsilon`.
pub fn transform_equality<T: Scalar>(h_value: T, epsilon: T) -> Result<T> {
    if !(epsilon > T::zero()) {
        return Err(contract(format!(
            "equality epsilon must be > 0, got {epsilon}"
        )));
    }
    Ok(h_value.abs() - epsilon)
}
