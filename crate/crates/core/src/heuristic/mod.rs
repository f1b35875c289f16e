//! Construction plus adaptive large neighbourhood search over routes and
//! fleet mix.

mod alns;
mod construct;
mod insert;
mod state;

use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{objective, validate_solution, Solution};
use crate::model::Instance;

pub use construct::construct;
use state::State;

/// Initial roulette weights of the search operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorWeights {
    pub random_removal: f64,
    pub worst_removal: f64,
    pub route_removal: f64,
    pub type_swap: f64,
    pub merge: f64,
    pub split: f64,
    pub greedy_repair: f64,
    pub regret_repair: f64,
}

impl Default for OperatorWeights {
    fn default() -> Self {
        OperatorWeights {
            random_removal: 1.0,
            worst_removal: 1.0,
            route_removal: 1.0,
            type_swap: 0.5,
            merge: 0.5,
            split: 0.5,
            greedy_repair: 1.0,
            regret_repair: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub seed: u64,
    /// Iterations per restart. Zero leaves the start solution untouched.
    pub iterations: usize,
    /// Upper bound on the share of clients removed per destroy step.
    pub destroy_fraction: f64,
    pub restart_count: usize,
    /// Annealing temperatures at the first and last iteration, as
    /// fractions of the start cost.
    pub temperature: (f64, f64),
    pub operator_weights: OperatorWeights,
    /// Wall-clock cap per restart. Results then depend on machine speed.
    pub time_limit: Option<Duration>,
    /// Worker threads for restarts; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            seed: 0,
            iterations: 2000,
            destroy_fraction: 0.3,
            restart_count: 4,
            temperature: (0.02, 0.0005),
            operator_weights: OperatorWeights::default(),
            time_limit: None,
            threads: None,
        }
    }
}

impl SearchParams {
    fn check(&self) -> Result<()> {
        if !(self.destroy_fraction > 0.0 && self.destroy_fraction < 1.0) {
            return Err(Error::DegenerateInput("destroy_fraction must lie in (0, 1)".into()));
        }
        let (a, b) = self.temperature;
        if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::DegenerateInput("temperatures must be finite and non-negative".into()));
        }
        if self.restart_count == 0 || self.threads == Some(0) {
            return Err(Error::DegenerateInput("restart_count and threads must be positive".into()));
        }
        Ok(())
    }

    /// Seed of restart `r`; restart 0 uses `seed` itself.
    pub fn restart_seed(&self, r: usize) -> u64 {
        self.seed.wrapping_add((r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

/// Improves a feasible start. The result is never worse than `start`, and
/// `start` comes back verbatim when nothing better is found, when
/// `iterations` is zero, or when `start` is not feasible.
pub fn improve(instance: &Instance, start: &Solution, params: &SearchParams) -> Solution {
    improve_with_trace(instance, start, params).0
}

/// As [`improve`], also returning the best cost after each iteration.
pub fn improve_with_trace(instance: &Instance, start: &Solution, params: &SearchParams) -> (Solution, Vec<f64>) {
    if params.iterations == 0 || params.check().is_err() || !validate_solution(start, instance).is_empty() {
        return (start.clone(), Vec::new());
    }
    let Some(state) = State::from_solution(instance, start) else {
        return (start.clone(), Vec::new());
    };
    let (best, trace) = alns::run(instance, state, params);
    let sol = best.to_solution(instance);
    match (objective(&sol, instance), objective(start, instance)) {
        (Ok(a), Ok(b)) if a < b && validate_solution(&sol, instance).is_empty() => (sol, trace),
        _ => (start.clone(), trace),
    }
}

/// Construction and improvement over `restart_count` seeds; the cheapest
/// result wins, ties going to the lower restart index. Deterministic for
/// a given seed unless a time limit cuts the search short.
pub fn solve(instance: &Instance, params: &SearchParams) -> Result<Solution> {
    params.check()?;
    let run = |r: usize| -> Result<(f64, Solution)> {
        let seed = params.restart_seed(r);
        let start = construct(instance, seed)?;
        let p = SearchParams { seed, ..params.clone() };
        let sol = improve(instance, &start, &p);
        Ok((objective(&sol, instance)?, sol))
    };
    let results: Vec<Result<(f64, Solution)>> = match params.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::DegenerateInput(format!("thread pool: {e}")))?
            .install(|| (0..params.restart_count).into_par_iter().map(run).collect()),
        None => (0..params.restart_count).into_par_iter().map(run).collect(),
    };
    let mut best: Option<(f64, Solution)> = None;
    for res in results {
        let (c, s) = res?;
        if best.as_ref().is_none_or(|(bc, _)| c < *bc) {
            best = Some((c, s));
        }
    }
    Ok(best.expect("restart_count is positive").1)
}
