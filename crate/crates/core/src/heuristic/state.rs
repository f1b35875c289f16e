use crate::eval::{route_totals, route_within_limits, Route, Solution};
use crate::model::{Instance, Slot};

/// Objective of `stops` on type `tau`, or `None` if the route breaks a
/// battery, fuel or horizon limit.
pub(crate) fn route_cost(instance: &Instance, tau: usize, stops: &[usize]) -> Option<f64> {
    let totals = route_totals(instance, tau, stops);
    route_within_limits(instance, tau, &totals).then(|| totals.objective(instance, tau))
}

#[derive(Debug, Clone)]
pub(crate) struct Tour {
    pub tau: usize,
    pub stops: Vec<usize>,
    pub cost: f64,
}

/// Working solution with cached route costs and per-type counts.
#[derive(Debug, Clone)]
pub(crate) struct State {
    pub tours: Vec<Tour>,
    pub counts: Vec<usize>,
}

/// Where a client can go: an existing tour, or a fresh slot of `tau`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Insertion {
    pub client: usize,
    pub tour: Option<usize>,
    pub tau: usize,
    pub pos: usize,
    pub delta: f64,
}

impl State {
    pub fn new(n_types: usize) -> Self {
        State { tours: Vec::new(), counts: vec![0; n_types] }
    }

    /// `None` if some route is infeasible or unknown.
    pub fn from_solution(instance: &Instance, solution: &Solution) -> Option<Self> {
        let mut s = State::new(instance.types().len());
        for r in &solution.routes {
            if r.slot.vtype >= instance.types().len() || r.stops.iter().any(|&j| instance.client(j).is_none()) {
                return None;
            }
            let cost = route_cost(instance, r.slot.vtype, &r.stops)?;
            s.push(Tour { tau: r.slot.vtype, stops: r.stops.clone(), cost });
        }
        Some(s)
    }

    pub fn to_solution(&self, instance: &Instance) -> Solution {
        let mut idx = vec![0; self.counts.len()];
        let routes = self
            .tours
            .iter()
            .map(|t| {
                idx[t.tau] += 1;
                Route::new(Slot::new(t.tau, idx[t.tau] - 1), t.stops.clone())
            })
            .collect();
        Solution::from_routes(instance, routes).canonical()
    }

    pub fn cost(&self) -> f64 {
        self.tours.iter().map(|t| t.cost).sum()
    }

    pub fn push(&mut self, tour: Tour) {
        self.counts[tour.tau] += 1;
        self.tours.push(tour);
    }

    pub fn take(&mut self, k: usize) -> Tour {
        let t = self.tours.swap_remove(k);
        self.counts[t.tau] -= 1;
        t
    }

    /// Whether one more slot of `tau` fits, after `freed` slots of each
    /// listed type are released.
    pub fn can_open(&self, instance: &Instance, tau: usize, freed: &[usize]) -> bool {
        let freed_tau = freed.iter().filter(|&&t| t == tau).count();
        self.counts[tau] - freed_tau < instance.vtype(tau).max_slots
            && self.tours.len() - freed.len() < instance.total_fleet_cap()
    }

    pub fn meets_minimums(&self, instance: &Instance) -> bool {
        self.counts.iter().zip(instance.types()).all(|(&c, t)| c >= t.min_slots)
    }

    pub fn served(&self) -> usize {
        self.tours.iter().map(|t| t.stops.len()).sum()
    }

    /// Removes `j` wherever it is; drops the tour if it empties.
    pub fn remove_client(&mut self, instance: &Instance, j: usize) {
        let Some(k) = self.tours.iter().position(|t| t.stops.contains(&j)) else { return };
        let t = &mut self.tours[k];
        t.stops.retain(|&c| c != j);
        if t.stops.is_empty() {
            self.take(k);
        } else {
            // Removing a stop never breaks a limit under the triangle
            // inequality, but matrices need not satisfy it.
            t.cost = route_cost(instance, t.tau, &t.stops).unwrap_or(f64::INFINITY);
        }
    }

    pub fn remove_empty(&mut self) {
        let mut k = 0;
        while k < self.tours.len() {
            if self.tours[k].stops.is_empty() {
                self.take(k);
            } else {
                k += 1;
            }
        }
    }

    /// Cheapest position of `j` in tour `k`.
    pub fn best_in_tour(&self, instance: &Instance, k: usize, j: usize) -> Option<Insertion> {
        let t = &self.tours[k];
        let mut stops = Vec::with_capacity(t.stops.len() + 1);
        let mut best: Option<Insertion> = None;
        for pos in 0..=t.stops.len() {
            stops.clear();
            stops.extend_from_slice(&t.stops[..pos]);
            stops.push(j);
            stops.extend_from_slice(&t.stops[pos..]);
            if let Some(c) = route_cost(instance, t.tau, &stops) {
                let delta = c - t.cost;
                if best.is_none_or(|b| delta < b.delta) {
                    best = Some(Insertion { client: j, tour: Some(k), tau: t.tau, pos, delta });
                }
            }
        }
        best
    }

    /// Singleton route of `j` on each openable type.
    pub fn new_tour_options(&self, instance: &Instance, j: usize) -> Vec<Insertion> {
        (0..instance.types().len())
            .filter(|&tau| self.can_open(instance, tau, &[]))
            .filter_map(|tau| {
                route_cost(instance, tau, &[j]).map(|delta| Insertion { client: j, tour: None, tau, pos: 0, delta })
            })
            .collect()
    }

    /// Options over existing tours (best position per tour) and, when
    /// `open` says so, fresh slots. Sorted by delta, then tour order.
    pub fn options(&self, instance: &Instance, j: usize, open: OpenPolicy) -> Vec<Insertion> {
        let mut opts: Vec<Insertion> =
            (0..self.tours.len()).filter_map(|k| self.best_in_tour(instance, k, j)).collect();
        let fresh = match open {
            OpenPolicy::AnyType => true,
            OpenPolicy::CheapestWhenStuck => opts.is_empty(),
        };
        if fresh {
            let mut news = self.new_tour_options(instance, j);
            if open == OpenPolicy::CheapestWhenStuck {
                news.sort_by(|a, b| a.delta.total_cmp(&b.delta));
                news.truncate(1);
            }
            opts.extend(news);
        }
        opts.sort_by(|a, b| a.delta.total_cmp(&b.delta));
        opts
    }

    pub fn apply(&mut self, instance: &Instance, ins: Insertion) {
        match ins.tour {
            Some(k) => {
                let t = &mut self.tours[k];
                t.stops.insert(ins.pos, ins.client);
                t.cost += ins.delta;
                // Re-price exactly to avoid drift from accumulated deltas.
                t.cost = route_cost(instance, t.tau, &t.stops).unwrap_or(t.cost);
            }
            None => self.push(Tour { tau: ins.tau, stops: vec![ins.client], cost: ins.delta }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum OpenPolicy {
    /// Construction: open only the cheapest type, and only if no tour fits.
    CheapestWhenStuck,
    /// Repair: every openable type competes with existing tours.
    AnyType,
}
