use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessVector {
    pub values: Vec<f64>,
    pub orientation: Vec<Orientation>,
}

impl FitnessVector {
    pub fn new(values: Vec<f64>, orientation: Vec<Orientation>) -> Result<Self> {
        if values.len() != orientation.len() || values.is_empty() {
            return Err(contract(
                "fitness values and orientations must have equal non-zero length",
            ));
        }
        Ok(Self {
            values,
            orientation,
        })
    }

    pub fn minimizing(values: Vec<f64>) -> Self {
        let orientation = vec![Orientation::Minimize; values.len()];
        Self {
            values,
            orientation,
        }
    }

    /// `values[i]` expressed so that smaller is better.
    fn cost(&self, i: usize) -> f64 {
        match self.orientation[i] {
            Orientation::Minimize => self.values[i],
            Orientation::Maximize => -self.values[i],
        }
    }
}

/// `u` is no worse than `v` everywhere and strictly better somewhere.
pub fn dominates(u: &FitnessVector, v: &FitnessVector) -> Result<bool> {
    if u.values.len() != v.values.len() || u.orientation != v.orientation {
        return Err(contract("fitness vectors differ in length or orientation"));
    }
    Ok(dominates_unchecked(u, v))
}

fn dominates_unchecked(u: &FitnessVector, v: &FitnessVector) -> bool {
    let mut strictly = false;
    for i in 0..u.values.len() {
        let (a, b) = (u.cost(i), v.cost(i));
        if a > b {
            return false;
        }
        strictly |= a < b;
    }
    strictly
}

/// Fast non-dominated sorting. Returns fronts of indices, best first, each in
/// ascending index order.
pub fn nondominated_sort(population: &[FitnessVector]) -> Result<Vec<Vec<usize>>> {
    if population.is_empty() {
        return Err(contract("cannot sort an empty population"));
    }
    for p in &population[1..] {
        if p.values.len() != population[0].values.len()
            || p.orientation != population[0].orientation
        {
            return Err(contract("fitness vectors differ in length or orientation"));
        }
    }
    let n = population.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominated: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates_unchecked(&population[i], &population[j]) {
                dominated[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates_unchecked(&population[j], &population[i]) {
                dominated[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    Ok(fronts)
}

/// Crowding distance of each member of one front. Boundary points of every
/// objective get `+inf`; an objective with zero range contributes nothing.
pub fn crowding_distance(front: &[FitnessVector]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].values.len();
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        order.sort_by(|&a, &b| {
            front[a].values[k]
                .partial_cmp(&front[b].values[k])
                .unwrap_or(Ordering::Equal)
        });
        let lo = front[order[0]].values[k];
        let hi = front[order[n - 1]].values[k];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if !(range > 0.0) {
            continue;
        }
        for w in 1..n - 1 {
            let gap = front[order[w + 1]].values[k] - front[order[w - 1]].values[k];
            dist[order[w]] += gap / range;
        }
    }
    dist
}

/// Indices to keep when cutting `population` down to `size`: whole fronts
/// while they fit, then the most isolated members of the first front that does not.
pub fn truncate(population: &[FitnessVector], size: usize) -> Result<Vec<usize>> {
    let mut keep = Vec::with_capacity(size);
    for front in nondominated_sort(population)? {
        if keep.len() + front.len() <= size {
            keep.extend_from_slice(&front);
            continue;
        }
        let members: Vec<FitnessVector> = front.iter().map(|&i| population[i].clone()).collect();
        let dist = crowding_distance(&members);
        let mut ranked: Vec<usize> = (0..front.len()).collect();
        ranked.sort_by(|&a, &b| {
            dist[b]
                .partial_cmp(&dist[a])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });
        keep.extend(ranked.into_iter().take(size - keep.len()).map(|r| front[r]));
        break;
    }
    keep.sort_unstable();
    Ok(keep)
}
