//! Orderings on `(objective, violation)` pairs.

use std::cmp::Ordering;

use crate::error::{contract, Result};
use crate::scalar::Scalar;

/// Objective value and total violation of one candidate.
pub type Fitness<T> = (T, T);

fn check<T: Scalar>(p: Fitness<T>) -> Result<()> {
    if p.0.is_nan() || p.1.is_nan() {
        return Err(contract("NaN in comparison input"));
    }
    if p.1 < T::zero() {
        return Err(contract(format!("violation must be >= 0, got {}", p.1)));
    }
    Ok(())
}

/// ε-level comparison: violations at or below `epsilon_level` count as equal
/// and the objective decides; otherwise the smaller violation wins, with the
/// objective breaking exact violation ties.
pub fn epsilon_compare<T: Scalar>(
    lhs: Fitness<T>,
    rhs: Fitness<T>,
    epsilon_level: T,
) -> Result<Ordering> {
    check(lhs)?;
    check(rhs)?;
    if epsilon_level.is_nan() || epsilon_level < T::zero() {
        return Err(contract("epsilon level must be >= 0"));
    }
    Ok(eps_cmp(lhs, rhs, epsilon_level))
}

/// Unchecked ε-level comparison for hot loops.
#[inline]
pub(crate) fn eps_cmp<T: Scalar>(lhs: Fitness<T>, rhs: Fitness<T>, eps: T) -> Ordering {
    let (f1, p1) = lhs;
    let (f2, p2) = rhs;
    let by_f = || f1.partial_cmp(&f2).unwrap_or(Ordering::Equal);
    if (p1 <= eps && p2 <= eps) || p1 == p2 {
        by_f()
    } else {
        p1.partial_cmp(&p2).unwrap_or(Ordering::Equal)
    }
}

/// Feasibility rules: a feasible candidate beats an infeasible one, feasible
/// candidates compare by objective, infeasible ones by violation (objective
/// breaks ties).
pub fn feasibility_compare<T: Scalar>(lhs: Fitness<T>, rhs: Fitness<T>) -> Result<Ordering> {
    check(lhs)?;
    check(rhs)?;
    Ok(feas_cmp(lhs, rhs))
}

#[inline]
pub(crate) fn feas_cmp<T: Scalar>(lhs: Fitness<T>, rhs: Fitness<T>) -> Ordering {
    let zero = T::zero();
    match (lhs.1 == zero, rhs.1 == zero) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => lhs.0.partial_cmp(&rhs.0).unwrap_or(Ordering::Equal),
        (false, false) => lhs
            .1
            .partial_cmp(&rhs.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| lhs.0.partial_cmp(&rhs.0).unwrap_or(Ordering::Equal)),
    }
}
