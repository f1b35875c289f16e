use super::{check_size, tie_tolerance, Budget, ExactResult, Incumbent, SearchLimits};
use crate::error::Result;
use crate::eval::{excess, Route};
use crate::model::{Instance, Slot};

/// Route under construction.
#[derive(Clone)]
struct Open {
    tau: usize,
    /// Smallest unassigned client when the route was opened; the route
    /// must visit it, which fixes the order in which routes are created.
    anchor: usize,
    stops: Vec<usize>,
    clock: f64,
    energy: f64,
    fuel: f64,
}

impl Open {
    fn prev(&self) -> usize {
        self.stops.last().copied().unwrap_or(0)
    }
}

enum Child {
    Extend(usize, Open),
    Close,
}

/// Lower bound on what serving `j` adds to any completion: its cheapest
/// service labour plus the cheapest arc that can enter it. Every client
/// still unassigned is entered by exactly one arc, and all other cost terms
/// are non-negative.
fn client_bounds(instance: &Instance) -> Vec<f64> {
    let c = instance.coeffs();
    let n = instance.n_clients();
    let usable: Vec<usize> = (0..instance.types().len()).filter(|&t| instance.vtype(t).max_slots > 0).collect();
    let signs_ok = [c.alpha, c.beta, c.zeta, c.lambda_w, c.delta, c.epsilon].iter().all(|&x| x >= 0.0);
    let mut lb = vec![0.0; n + 1];
    if !signs_ok || usable.is_empty() {
        return lb;
    }
    for (j, slot) in lb.iter_mut().enumerate().skip(1) {
        let service = usable.iter().map(|&t| c.alpha * instance.service_time(j, t)).fold(f64::INFINITY, f64::min);
        let mut arc = f64::INFINITY;
        for i in (0..=n).filter(|&i| i != j) {
            let (t, d) = (instance.travel_time(i, j), instance.distance(i, j));
            for &tau in &usable {
                let vt = instance.vtype(tau);
                arc = arc.min((c.alpha + c.zeta * vt.opex_hr) * t + c.beta * vt.fuel_rate * d);
            }
        }
        *slot = service + arc;
    }
    lb
}

struct Search<'a> {
    instance: &'a Instance,
    route_cap: usize,
    client_lb: Vec<f64>,
    assigned: Vec<bool>,
    remaining_lb: f64,
    remaining: usize,
    closed: Vec<(usize, Vec<usize>)>,
    counts: Vec<usize>,
    incumbent: Incumbent,
    budget: Budget,
    prune: bool,
    #[cfg(test)]
    audit: Vec<(f64, f64)>,
}

impl Search<'_> {
    fn first_unassigned(&self) -> Option<usize> {
        (1..=self.instance.n_clients()).find(|&j| !self.assigned[j])
    }

    fn extend(&self, open: &Open, j: usize) -> Option<(f64, Open)> {
        let inst = self.instance;
        let c = inst.coeffs();
        let vt = inst.vtype(open.tau);
        let client = inst.client(j)?;
        let prev = open.prev();
        let (t, d) = (inst.travel_time(prev, j), inst.distance(prev, j));
        let arrival = open.clock + t;
        let start = arrival.max(client.window_open);
        let s = inst.service_time(j, open.tau);
        let departure = start + s;
        let energy = open.energy + client.energy_demand;
        let fuel = open.fuel + d * vt.fuel_rate;
        // Prefix checks are necessary conditions: the remaining legs only
        // add fuel and time.
        if excess(energy, inst.battery_budget(open.tau)).is_some()
            || excess(fuel, inst.fuel_budget(open.tau)).is_some()
            || excess(departure, c.horizon).is_some()
        {
            return None;
        }
        let late = (departure - client.window_close).max(0.0);
        let inc = c.alpha * (t + s)
            + c.lambda_w * (start - arrival)
            + c.beta * vt.fuel_rate * d
            + c.delta * late
            + c.zeta * vt.opex_hr * t;
        let mut stops = open.stops.clone();
        stops.push(j);
        Some((inc, Open { tau: open.tau, anchor: open.anchor, stops, clock: departure, energy, fuel }))
    }

    fn close_cost(&self, open: &Open) -> Option<f64> {
        if open.stops.is_empty() || !open.stops.contains(&open.anchor) {
            return None;
        }
        let inst = self.instance;
        let c = inst.coeffs();
        let vt = inst.vtype(open.tau);
        let (t, d) = (inst.travel_time(open.prev(), 0), inst.distance(open.prev(), 0));
        if excess(open.fuel + d * vt.fuel_rate, inst.fuel_budget(open.tau)).is_some()
            || excess(open.clock + t, c.horizon).is_some()
        {
            return None;
        }
        Some((c.alpha + c.zeta * vt.opex_hr) * t + c.beta * vt.fuel_rate * d)
    }

    fn assign(&mut self, j: usize, on: bool) {
        self.assigned[j] = on;
        if on {
            self.remaining_lb -= self.client_lb[j];
            self.remaining -= 1;
        } else {
            self.remaining_lb += self.client_lb[j];
            self.remaining += 1;
        }
    }

    fn leaf(&mut self, committed: f64) -> f64 {
        let types = self.instance.types();
        if self.counts.iter().zip(types).any(|(&c, t)| c < t.min_slots) {
            return f64::INFINITY;
        }
        if self.incumbent.worth(committed) {
            let mut idx = vec![0; types.len()];
            let routes = self
                .closed
                .iter()
                .map(|(tau, stops)| {
                    idx[*tau] += 1;
                    Route::new(Slot::new(*tau, idx[*tau] - 1), stops.clone())
                })
                .collect();
            self.incumbent.offer(self.instance, routes);
        }
        committed
    }

    /// Depth-first search; returns the cheapest completion found below.
    fn dfs(&mut self, committed: f64, open: Option<Open>) -> f64 {
        if !self.budget.tick() {
            return f64::INFINITY;
        }
        let lb = committed + self.remaining_lb;
        let bound = self.incumbent.bound();
        if self.prune && lb > bound + tie_tolerance(bound) {
            return f64::INFINITY;
        }
        let best = match open {
            None => self.open_route(committed),
            Some(open) => self.branch(committed, open),
        };
        #[cfg(test)]
        self.audit.push((lb, best));
        best
    }

    fn open_route(&mut self, committed: f64) -> f64 {
        let Some(anchor) = self.first_unassigned() else {
            return self.leaf(committed);
        };
        if self.closed.len() >= self.route_cap {
            return f64::INFINITY;
        }
        let c = self.instance.coeffs();
        let t_start = c.t_start;
        let mut kids: Vec<(f64, usize)> = (0..self.instance.types().len())
            .filter(|&tau| self.counts[tau] < self.instance.vtype(tau).max_slots)
            .map(|tau| (c.epsilon * self.instance.vtype(tau).capex_day, tau))
            .collect();
        kids.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut best = f64::INFINITY;
        for (inc, tau) in kids {
            let open = Open { tau, anchor, stops: Vec::new(), clock: t_start, energy: 0.0, fuel: 0.0 };
            self.counts[tau] += 1;
            best = best.min(self.dfs(committed + inc, Some(open)));
            self.counts[tau] -= 1;
        }
        best
    }

    fn branch(&mut self, committed: f64, open: Open) -> f64 {
        let mut kids: Vec<(f64, Child)> = (1..=self.instance.n_clients())
            .filter(|&j| !self.assigned[j])
            .filter_map(|j| self.extend(&open, j).map(|(inc, o)| (inc, Child::Extend(j, o))))
            .collect();
        if let Some(inc) = self.close_cost(&open) {
            kids.push((inc, Child::Close));
        }
        kids.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = f64::INFINITY;
        for (inc, kid) in kids {
            let sub = match kid {
                Child::Extend(j, next) => {
                    self.assign(j, true);
                    let v = self.dfs(committed + inc, Some(next));
                    self.assign(j, false);
                    v
                }
                Child::Close => {
                    self.closed.push((open.tau, open.stops.clone()));
                    let v = self.dfs(committed + inc, None);
                    self.closed.pop();
                    v
                }
            };
            best = best.min(sub);
        }
        best
    }
}

fn search<'a>(instance: &'a Instance, limits: &SearchLimits, prune: bool) -> Search<'a> {
    let client_lb = client_bounds(instance);
    let n = instance.n_clients();
    Search {
        instance,
        route_cap: limits.route_cap(instance),
        remaining_lb: client_lb.iter().sum(),
        client_lb,
        assigned: vec![false; n + 1],
        remaining: n,
        closed: Vec::new(),
        counts: vec![0; instance.types().len()],
        incumbent: Incumbent::default(),
        budget: Budget::new(limits),
        prune,
        #[cfg(test)]
        audit: Vec::new(),
    }
}

/// Depth-first branch and bound. Each node either extends the open route
/// with an unassigned client or closes it; a new route takes the next free
/// index of its type. Children are explored cheapest first, and a node is
/// cut only when its bound exceeds the incumbent by more than the tie
/// tolerance, so equal-cost alternatives still reach the tie-break.
///
/// When a limit stops the search the incumbent is returned with
/// `proved = false`.
pub fn solve_bnb(instance: &Instance, limits: &SearchLimits) -> Result<ExactResult> {
    check_size(instance, limits)?;
    let mut s = search(instance, limits, true);
    s.dfs(0.0, None);
    debug_assert!(s.budget.exhausted || s.remaining == instance.n_clients());
    let proved = !s.budget.exhausted;
    let nodes = s.budget.nodes;
    s.incumbent.finish(proved, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::exact::solve_brute;
    use crate::exact::testing::small_instance;
    use crate::model::{catalog, Client, CostCoefficients, Location};

    #[test]
    fn agrees_with_brute() {
        for seed in 100..160 {
            let inst = small_instance(seed, 2 + seed as usize % 5);
            let lim = SearchLimits::default();
            match (solve_brute(&inst, &lim), solve_bnb(&inst, &lim)) {
                (Ok(a), Ok(b)) => {
                    assert!(b.proved);
                    assert_eq!(a.cost, b.cost, "seed {seed}");
                    assert_eq!(a.solution, b.solution, "seed {seed}");
                }
                (Err(Error::Infeasible(_)), Err(Error::Infeasible(_))) => {}
                (a, b) => panic!("seed {seed}: {:?} vs {:?}", a.map(|r| r.cost), b.map(|r| r.cost)),
            }
        }
    }

    #[test]
    fn bound_is_admissible() {
        for seed in 200..230 {
            let inst = small_instance(seed, 1 + seed as usize % 4);
            let mut s = search(&inst, &SearchLimits::default(), false);
            s.dfs(0.0, None);
            for &(lb, best) in &s.audit {
                assert!(lb <= best + 1e-9 * best.abs().max(1.0), "seed {seed}: {lb} > {best}");
            }
        }
    }

    #[test]
    fn empty_without_minimums() {
        let inst = Instance::from_coordinates(
            "e",
            Location::Planar { x: 0.0, y: 0.0 },
            vec![],
            catalog::default_catalog(),
            36,
            CostCoefficients::default(),
            1.3,
        )
        .unwrap();
        let r = solve_bnb(&inst, &SearchLimits::default()).unwrap();
        assert_eq!(r.cost, 0.0);
        assert!(r.solution.routes.is_empty());
    }

    #[test]
    fn infeasible_client() {
        let inst = Instance::from_coordinates(
            "x",
            Location::Planar { x: 0.0, y: 0.0 },
            vec![Client::new(1, Location::Planar { x: 300.0, y: 0.0 }, 40.0, 150.0, 0.0, 24.0)],
            catalog::default_catalog(),
            36,
            CostCoefficients::default(),
            1.3,
        )
        .unwrap();
        assert!(matches!(solve_bnb(&inst, &SearchLimits::default()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn node_limit_drops_proof() {
        let inst = small_instance(7, 6);
        let lim = SearchLimits { node_limit: Some(50), ..Default::default() };
        match solve_bnb(&inst, &lim) {
            Ok(r) => assert!(!r.proved),
            Err(e) => assert_eq!(e.kind(), "search_limit"),
        }
    }
}
