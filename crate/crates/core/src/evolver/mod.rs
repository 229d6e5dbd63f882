//! Evolution of constraint coefficients toward instances that are hard (or
//! easy) for a solver, using the median FEN over repeated runs as fitness.

mod demo;
mod pareto;
mod single;

use serde::{Deserialize, Serialize};

pub use demo::{evolve_multi, select_discriminating};
pub use pareto::{
    crowding_distance, dominates, nondominated_sort, truncate, FitnessVector, Orientation,
};
pub use single::{evolve_single, Direction};

use crate::error::{check_dim, contract, Result};
use crate::problem::{Bounds, Constraint, ConstraintKind, Objective, Problem, DEFAULT_COEFF_RANGE};
use crate::scalar::{median, Scalar};
use crate::solvers::{solve, SolverConfig};

/// Fixed part of an evolved instance: everything except the coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Template {
    pub objective: Objective,
    pub dimension: usize,
    pub kinds: Vec<ConstraintKind>,
    /// Decision-space box, the same interval in every dimension.
    pub bounds: (f64, f64),
    pub coeff_range: (f64, f64),
}

impl Template {
    /// `count` constraints of one kind on the default `[-5, 5]^n` box.
    pub fn new(objective: Objective, dimension: usize, kind: ConstraintKind, count: usize) -> Self {
        Self {
            objective,
            dimension,
            kinds: vec![kind; count],
            bounds: (-5.0, 5.0),
            coeff_range: DEFAULT_COEFF_RANGE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(contract("template dimension must be positive"));
        }
        if !(self.bounds.0 < self.bounds.1) || !(self.coeff_range.0 < self.coeff_range.1) {
            return Err(contract("template ranges must have lower < upper"));
        }
        if self.coeff_range.0 > 0.0 || self.coeff_range.1 < 0.0 {
            return Err(contract("coefficient range must contain 0"));
        }
        Ok(())
    }

    pub fn gene_len(&self) -> usize {
        self.kinds
            .iter()
            .map(|k| k.coeff_len(self.dimension) + 1)
            .sum()
    }

    /// Lowest admissible offset `b`; the upper limit is always 0.
    pub fn offset_floor(&self) -> f64 {
        -self.coeff_range.1.abs() * self.dimension as f64
    }

    /// Box of every gene, coefficients first then the offset, per constraint.
    pub fn gene_bounds(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.gene_len());
        for kind in &self.kinds {
            out.extend(std::iter::repeat_n(
                self.coeff_range,
                kind.coeff_len(self.dimension),
            ));
            out.push((self.offset_floor(), 0.0));
        }
        out
    }

    pub fn problem_bounds<T: Scalar>(&self) -> Result<Bounds<T>> {
        Bounds::uniform(self.dimension, T::lit(self.bounds.0), T::lit(self.bounds.1))
    }

    /// Uniformly random genome.
    pub fn random_genome<T: Scalar, R: rand::Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> InstanceGenome<T> {
        let genes = self
            .gene_bounds()
            .into_iter()
            .map(|(lo, hi)| T::lit(lo) + (T::lit(hi) - T::lit(lo)) * T::unit(rng))
            .collect();
        InstanceGenome {
            template: self.clone(),
            genes,
        }
    }
}

/// Flattened constraint coefficients of one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct InstanceGenome<T> {
    pub template: Template,
    pub genes: Vec<T>,
}

impl<T: Scalar> InstanceGenome<T> {
    pub fn new(template: Template, genes: Vec<T>) -> Result<Self> {
        template.validate()?;
        check_dim(template.gene_len(), genes.len())?;
        Ok(Self { template, genes })
    }

    pub fn encode(problem: &Problem<T>, template: &Template) -> Result<Self> {
        template.validate()?;
        if problem.objective() != template.objective {
            return Err(contract("objective differs from template"));
        }
        check_dim(template.dimension, problem.dimension())?;
        if problem.bounds() != &template.problem_bounds::<T>()? {
            return Err(contract("bounds differ from template"));
        }
        let kinds: Vec<_> = problem.constraints().iter().map(|c| c.kind()).collect();
        if kinds != template.kinds {
            return Err(contract("constraint kinds differ from template"));
        }
        let mut genes = Vec::with_capacity(template.gene_len());
        for c in problem.constraints() {
            genes.extend_from_slice(c.coeffs());
            genes.push(c.offset());
        }
        Ok(Self {
            template: template.clone(),
            genes,
        })
    }

    pub fn decode(&self) -> Result<Problem<T>> {
        check_dim(self.template.gene_len(), self.genes.len())?;
        let n = self.template.dimension;
        let mut rest = self.genes.as_slice();
        let mut constraints = Vec::with_capacity(self.template.kinds.len());
        for &kind in &self.template.kinds {
            let len = kind.coeff_len(n);
            let (coeffs, tail) = rest.split_at(len);
            constraints.push(Constraint::new(kind, coeffs.to_vec(), tail[0])?);
            rest = &tail[1..];
        }
        Problem::new(
            self.template.objective,
            self.template.problem_bounds()?,
            constraints,
        )
    }

    /// Clamps every gene into its box (offsets into `[floor, 0]`).
    pub fn clamp(&mut self) {
        for (g, (lo, hi)) in self.genes.iter_mut().zip(self.template.gene_bounds()) {
            *g = g.max(T::lit(lo)).min(T::lit(hi));
        }
    }

    pub fn is_within_bounds(&self) -> bool {
        self.genes
            .iter()
            .zip(self.template.gene_bounds())
            .all(|(&g, (lo, hi))| g >= T::lit(lo) && g <= T::lit(hi))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolverConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub scale_factor: f64,
    /// Solver runs per fitness evaluation; fitness is their median FEN.
    pub repeats: usize,
    pub seed: u64,
}

impl Default for EvolverConfig {
    fn default() -> Self {
        Self::paper(0)
    }
}

impl EvolverConfig {
    /// Population 40, CR 0.5, F 0.9, 5000 generations, 5 repeats.
    pub fn paper(seed: u64) -> Self {
        Self {
            population_size: 40,
            generations: 5000,
            crossover_rate: 0.5,
            scale_factor: 0.9,
            repeats: 5,
            seed,
        }
    }

    /// Population 20, 30 generations, 3 repeats.
    pub fn desk(seed: u64) -> Self {
        Self {
            population_size: 20,
            generations: 30,
            repeats: 3,
            ..Self::paper(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 {
            return Err(contract("evolver population_size must be >= 4"));
        }
        if self.repeats == 0 {
            return Err(contract("repeats must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) || !(self.scale_factor > 0.0) {
            return Err(contract("evolver needs CR in [0, 1] and F > 0"));
        }
        Ok(())
    }
}

/// Mixes `parts` into `base` with SplitMix64 so that every
/// (seed, generation, index, repeat) tuple gets an independent stream.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    parts.iter().fold(mix(base), |acc, &p| mix(acc ^ mix(p)))
}

/// Median FEN of `repeats` runs of `solver` on the decoded genome.
pub fn fen_fitness<T: Scalar>(
    genome: &InstanceGenome<T>,
    solver: &SolverConfig,
    repeats: usize,
    seed: u64,
) -> Result<f64> {
    if repeats == 0 {
        return Err(contract("repeats must be >= 1"));
    }
    let problem = genome.decode()?;
    let fens = (0..repeats)
        .map(|r| solve(&problem, solver, derive_seed(seed, &[r as u64])).map(|o| o.fen as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(median(&fens).expect("repeats >= 1"))
}

/// DE/rand/1/bin offspring of member `target` built from three distinct other
/// members of `population`, clamped into the gene box.
pub(crate) fn de_offspring<T: Scalar, R: rand::Rng + ?Sized>(
    population: &[&InstanceGenome<T>],
    target: usize,
    config: &EvolverConfig,
    rng: &mut R,
) -> InstanceGenome<T> {
    let np = population.len();
    let picked = rand::seq::index::sample(rng, np - 1, 3);
    let mut d = [0usize; 3];
    for (slot, k) in d.iter_mut().zip(picked.iter()) {
        *slot = if k >= target { k + 1 } else { k };
    }
    let (a, b, c) = (
        &population[d[0]].genes,
        &population[d[1]].genes,
        &population[d[2]].genes,
    );
    let parent = population[target];
    let f = T::lit(config.scale_factor);
    let forced = rng.random_range(0..parent.genes.len());
    let genes = (0..parent.genes.len())
        .map(|j| {
            if j == forced || rng.random::<f64>() < config.crossover_rate {
                a[j] + f * (b[j] - c[j])
            } else {
                parent.genes[j]
            }
        })
        .collect();
    let mut child = InstanceGenome {
        template: parent.template.clone(),
        genes,
    };
    child.clamp();
    child
}
