//! Exact search for small instances.
//!
//! Both solvers optimize the same objective over the same space and share
//! one tie-break rule, so they return identical certificates:
//!
//! * candidate costs are always computed by [`cost_breakdown`] on the
//!   canonical form of the solution;
//! * two costs within `1e-9 * max(1, |c|)` of each other are ties;
//! * among ties the lexicographically smallest canonical encoding wins.
//!
//! The search space is every feasible solution with at most
//! `min(max_active_slots, V_tot)` active slots.

mod bnb;
mod brute;

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{cost_breakdown, validate_solution, Encoding, Route, Solution};
use crate::model::Instance;

pub use bnb::solve_bnb;
pub use brute::solve_brute;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchLimits {
    pub max_clients: usize,
    pub max_active_slots: usize,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_clients: 8,
            max_active_slots: 4,
            time_limit: None,
            node_limit: None,
        }
    }
}

impl SearchLimits {
    fn check(&self) -> Result<()> {
        if self.max_clients == 0 || self.max_active_slots == 0 {
            return Err(Error::DegenerateInput("search limits must be positive".into()));
        }
        if self.time_limit.is_some_and(|t| t.is_zero()) || self.node_limit == Some(0) {
            return Err(Error::DegenerateInput("search limits must be positive".into()));
        }
        Ok(())
    }

    /// Upper bound on simultaneously active routes.
    fn route_cap(&self, instance: &Instance) -> usize {
        self.max_active_slots
            .min(instance.total_fleet_cap())
            .min(instance.slot_count())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactResult {
    /// Canonical optimal (or best found) solution.
    pub solution: Solution,
    pub cost: f64,
    /// False when a limit stopped the search early.
    pub proved: bool,
    pub nodes: u64,
}

pub(crate) fn tie_tolerance(cost: f64) -> f64 {
    1e-9 * cost.abs().max(1.0)
}

struct Best {
    cost: f64,
    solution: Solution,
    encoding: Encoding,
}

/// Best candidate so far under the shared tie-break rule.
#[derive(Default)]
pub(crate) struct Incumbent {
    best: Option<Best>,
}

impl Incumbent {
    pub(crate) fn bound(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.cost)
    }

    /// True if `approx` could still win or tie. Used before paying for an
    /// exact evaluation; the margin covers summation-order differences.
    pub(crate) fn worth(&self, approx: f64) -> bool {
        let b = self.bound();
        approx <= b + 1e-6 * b.abs().max(1.0)
    }

    /// Evaluates `routes` exactly and keeps them if they beat the incumbent.
    /// Infeasible candidates are ignored.
    pub(crate) fn offer(&mut self, instance: &Instance, routes: Vec<Route>) {
        let solution = Solution::from_routes(instance, routes).canonical();
        if !solution.unserved.is_empty() || !validate_solution(&solution, instance).is_empty() {
            return;
        }
        let Ok(cost) = cost_breakdown(&solution, instance).map(|c| c.objective_total) else {
            return;
        };
        let encoding = solution.encoding();
        let replace = match &self.best {
            None => true,
            Some(b) => {
                let tol = tie_tolerance(b.cost);
                cost < b.cost - tol || (cost <= b.cost + tol && encoding < b.encoding)
            }
        };
        if replace {
            self.best = Some(Best { cost, solution, encoding });
        }
    }

    pub(crate) fn finish(self, proved: bool, nodes: u64) -> Result<ExactResult> {
        match self.best {
            Some(b) => Ok(ExactResult { solution: b.solution, cost: b.cost, proved, nodes }),
            None if proved => Err(Error::Infeasible("no assignment passes validation".into())),
            None => Err(Error::SearchLimit(format!("stopped after {nodes} nodes"))),
        }
    }
}

/// Node and wall-clock budget shared by the search loops.
pub(crate) struct Budget {
    start: Instant,
    time_limit: Option<Duration>,
    node_limit: Option<u64>,
    pub(crate) nodes: u64,
    pub(crate) exhausted: bool,
}

impl Budget {
    pub(crate) fn new(limits: &SearchLimits) -> Self {
        Budget {
            start: Instant::now(),
            time_limit: limits.time_limit,
            node_limit: limits.node_limit,
            nodes: 0,
            exhausted: false,
        }
    }

    /// Counts one node; returns false once any limit is hit.
    pub(crate) fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        self.nodes += 1;
        let over_nodes = self.node_limit.is_some_and(|l| self.nodes > l);
        let over_time =
            self.nodes.is_multiple_of(1024) && self.time_limit.is_some_and(|t| self.start.elapsed() > t);
        self.exhausted = over_nodes || over_time;
        !self.exhausted
    }
}

pub(crate) fn check_size(instance: &Instance, limits: &SearchLimits) -> Result<()> {
    limits.check()?;
    if instance.n_clients() > limits.max_clients {
        return Err(Error::InstanceTooLarge {
            clients: instance.n_clients(),
            limit: limits.max_clients,
        });
    }
    Ok(())
}


#[cfg(test)]
mod tests {
    use super::testing::small_instance;
    use super::*;
    use crate::model::{Client, VehicleType};

    fn relabel(instance: &Instance, perm: &[usize]) -> Instance {
        // Client `perm[k]` of the original becomes client k + 1.
        let clients: Vec<Client> = perm
            .iter()
            .enumerate()
            .map(|(k, &old)| Client { id: k + 1, ..instance.client(old).unwrap().clone() })
            .collect();
        instance.with_clients(clients).unwrap()
    }

    #[test]
    fn invariant_under_relabelling_and_inactive_types() {
        for seed in 300..330 {
            let inst = small_instance(seed, 5);
            let base = solve_bnb(&inst, &SearchLimits::default());
            let mut perm: Vec<usize> = (1..=5).collect();
            perm.rotate_left(seed as usize % 5);
            perm.swap(0, 3);
            let relabelled = solve_bnb(&relabel(&inst, &perm), &SearchLimits::default());

            let mut types = inst.types().to_vec();
            types.push(VehicleType { name: "Idle".into(), max_slots: 0, min_slots: 0, ..types[0].clone() });
            let padded = solve_bnb(&inst.with_types(types), &SearchLimits::default());
            match (base, relabelled, padded) {
                (Ok(a), Ok(b), Ok(c)) => {
                    assert!((a.cost - b.cost).abs() <= tie_tolerance(a.cost), "seed {seed}");
                    assert_eq!(a.cost, c.cost);
                    assert_eq!(a.solution, c.solution);
                }
                (Err(_), Err(_), Err(_)) => {}
                _ => panic!("seed {seed}: feasibility changed"),
            }
        }
    }
}
