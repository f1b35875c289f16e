use itertools::Itertools;

use super::{check_size, tie_tolerance, Budget, ExactResult, Incumbent, SearchLimits};
use crate::error::Result;
use crate::eval::{route_totals, route_within_limits, Route};
use crate::model::{Instance, Slot};

/// Best visiting order of one client subset on one type.
#[derive(Clone)]
struct Ordering {
    cost: f64,
    stops: Vec<usize>,
}

fn best_ordering(instance: &Instance, tau: usize, members: &[usize], budget: &mut Budget) -> Option<Ordering> {
    let mut best: Option<Ordering> = None;
    // Permutations of a sorted list come out in lexicographic order, so a
    // strict improvement test keeps the smallest order among ties.
    for perm in members.iter().copied().permutations(members.len()) {
        if !budget.tick() {
            return best;
        }
        let totals = route_totals(instance, tau, &perm);
        if !route_within_limits(instance, tau, &totals) {
            continue;
        }
        let cost = totals.objective(instance, tau);
        if best.as_ref().is_none_or(|b| cost < b.cost - tie_tolerance(b.cost)) {
            best = Some(Ordering { cost, stops: perm });
        }
    }
    best
}

struct Search<'a> {
    instance: &'a Instance,
    route_cap: usize,
    /// `memo[mask][tau]`, filled lazily.
    memo: Vec<Vec<Option<Option<Ordering>>>>,
    incumbent: Incumbent,
    budget: Budget,
}

impl Search<'_> {
    fn ordering(&mut self, mask: usize, tau: usize) -> Option<Ordering> {
        if let Some(o) = &self.memo[mask][tau] {
            return o.clone();
        }
        let members: Vec<usize> = (0..self.instance.n_clients()).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        let o = best_ordering(self.instance, tau, &members, &mut self.budget);
        if !self.budget.exhausted {
            self.memo[mask][tau] = Some(o.clone());
        }
        o
    }

    /// Restricted growth strings: client `i` joins an existing block or
    /// opens the next one.
    fn partitions(&mut self, i: usize, blocks: &mut Vec<usize>) {
        if self.budget.exhausted {
            return;
        }
        if i == self.instance.n_clients() {
            let mut counts = vec![0; self.instance.types().len()];
            let mut chosen = Vec::with_capacity(blocks.len());
            self.assign_types(blocks, 0, 0.0, &mut counts, &mut chosen);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            self.partitions(i + 1, blocks);
            blocks[b] &= !(1 << i);
        }
        if blocks.len() < self.route_cap {
            blocks.push(1 << i);
            self.partitions(i + 1, blocks);
            blocks.pop();
        }
    }

    fn assign_types(
        &mut self,
        blocks: &[usize],
        b: usize,
        partial: f64,
        counts: &mut Vec<usize>,
        chosen: &mut Vec<(usize, Vec<usize>)>,
    ) {
        if !self.incumbent.worth(partial) || self.budget.exhausted {
            return;
        }
        if b == blocks.len() {
            let types = self.instance.types();
            if counts.iter().zip(types).any(|(&c, t)| c < t.min_slots) {
                return;
            }
            let mut idx = vec![0; types.len()];
            let routes = chosen
                .iter()
                .map(|(tau, stops)| {
                    idx[*tau] += 1;
                    Route::new(Slot::new(*tau, idx[*tau] - 1), stops.clone())
                })
                .collect();
            self.incumbent.offer(self.instance, routes);
            return;
        }
        for tau in 0..self.instance.types().len() {
            if counts[tau] >= self.instance.vtype(tau).max_slots {
                continue;
            }
            let Some(o) = self.ordering(blocks[b], tau) else { continue };
            counts[tau] += 1;
            chosen.push((tau, o.stops));
            self.assign_types(blocks, b + 1, partial + o.cost, counts, chosen);
            chosen.pop();
            counts[tau] -= 1;
        }
    }
}

/// Exhaustive optimum: every partition of the clients into at most
/// `route_cap` routes, every type assignment within fleet bounds, and for
/// each (subset, type) pair the best of all visiting orders.
///
/// Exponential in the client count; guarded by `limits.max_clients`.
pub fn solve_brute(instance: &Instance, limits: &SearchLimits) -> Result<ExactResult> {
    check_size(instance, limits)?;
    let n = instance.n_clients();
    let mut search = Search {
        instance,
        route_cap: limits.route_cap(instance),
        memo: vec![vec![None; instance.types().len()]; 1 << n],
        incumbent: Incumbent::default(),
        budget: Budget::new(limits),
    };
    search.partitions(0, &mut Vec::new());
    let proved = !search.budget.exhausted;
    let nodes = search.budget.nodes;
    search.incumbent.finish(proved, nodes)
}
