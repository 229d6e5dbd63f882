use crate::problem::Problem;
use crate::scalar::Scalar;

use super::{eps_cmp, SolveOutcome};

/// Why a run stopped before its loop finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stop {
    Exhausted,
    Solved,
}

/// Counts evaluations against `max_fen` and remembers the best point seen.
pub(crate) struct Meter<'p, T> {
    problem: &'p Problem<T>,
    max_fen: u64,
    target_gap: T,
    fen: u64,
    solved_at: Option<u64>,
    best_x: Vec<T>,
    best: Option<(T, T)>,
}

impl<'p, T: Scalar> Meter<'p, T> {
    pub fn new(problem: &'p Problem<T>, max_fen: u64, target_gap: f64) -> Self {
        Self {
            problem,
            max_fen,
            target_gap: T::lit(target_gap),
            fen: 0,
            solved_at: None,
            best_x: Vec::new(),
            best: None,
        }
    }

    pub fn problem(&self) -> &'p Problem<T> {
        self.problem
    }

    #[cfg(test)]
    pub fn fen(&self) -> u64 {
        self.fen
    }

    /// Evaluates `x`, returning `(f, phi)`. Fails once the budget is spent or
    /// the point solves the problem.
    pub fn eval(&mut self, x: &[T]) -> Result<(T, T), Stop> {
        self.eval_full(x).map(|(f, phi, _)| (f, phi))
    }

    /// Like [`Meter::eval`] but also returns the per-constraint values.
    pub fn eval_full(&mut self, x: &[T]) -> Result<(T, T, Vec<T>), Stop> {
        if self.solved_at.is_some() {
            return Err(Stop::Solved);
        }
        if self.fen >= self.max_fen {
            return Err(Stop::Exhausted);
        }
        self.fen += 1;
        let e = self
            .problem
            .evaluate(x)
            .expect("solver points have the problem dimension");
        let key = (e.objective_value, e.total_violation);
        if self.best.is_none_or(|b| eps_cmp(key, b, T::zero()).is_lt()) {
            self.best = Some(key);
            self.best_x.clear();
            self.best_x.extend_from_slice(x);
        }
        if e.total_violation == T::zero()
            && e.objective_value <= self.target_gap
            && self.problem.bounds().contains(x)
        {
            self.solved_at = Some(self.fen);
            return Err(Stop::Solved);
        }
        Ok((e.objective_value, e.total_violation, e.violations))
    }

    pub fn finish(self) -> SolveOutcome<T> {
        let (best_f, best_violation) = self.best.unwrap_or((T::infinity(), T::infinity()));
        SolveOutcome {
            fen: self.solved_at.unwrap_or(self.max_fen),
            solved: self.solved_at.is_some(),
            best_x: self.best_x,
            best_f,
            best_violation,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Constraint, Objective};

    #[test]
    fn stops_at_budget_and_reports_penalty() {
        let p = Problem::with_default_bounds(Objective::Sphere, 2, vec![]).unwrap();
        let mut m = Meter::new(&p, 2, 1e-2);
        assert!(m.eval(&[1.0, 1.0]).is_ok());
        assert!(m.eval(&[2.0, 1.0]).is_ok());
        assert_eq!(m.eval(&[0.0, 0.0]), Err(Stop::Exhausted));
        let out = m.finish();
        assert_eq!(out.fen, 2);
        assert!(!out.solved);
        assert_eq!(out.best_x, vec![1.0, 1.0]);
    }

    #[test]
    fn solved_point_stops_the_run() {
        let c = Constraint::linear(vec![1.0, 0.0], 0.0).unwrap();
        let p = Problem::with_default_bounds(Objective::Sphere, 2, vec![c]).unwrap();
        let mut m = Meter::new(&p, 100, 1e-2);
        // feasible but far, then close but infeasible, then solved
        assert!(m.eval(&[-1.0, 0.0]).is_ok());
        assert!(m.eval(&[0.01, 0.0]).is_ok());
        assert_eq!(m.eval(&[-0.01, 0.0]), Err(Stop::Solved));
        assert_eq!(m.eval(&[-0.01, 0.0]), Err(Stop::Solved));
        let out = m.finish();
        assert_eq!((out.fen, out.solved), (3, true));
        assert_eq!(out.best_x, vec![-0.01, 0.0]);
    }
}
