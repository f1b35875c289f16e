use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{objective_terms, Names};
use crate::error::{Error, Result};
use crate::eval::{objective, schedule_route, validate_solution, Route, Solution, Violation};
use crate::model::Instance;

/// Distance from {0, 1} tolerated on binary variables.
const BINARY_TOL: f64 = 1e-4;

/// Parses `name = value` (or `name value`) lines. `#` starts a comment.
pub fn parse_assignment(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, value) = match line.split_once('=') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => match line.split_once(char::is_whitespace) {
                Some((a, b)) => (a.trim(), b.trim()),
                None => return Err(Error::Assignment(format!("line {}: expected `name = value`", n + 1))),
            },
        };
        let v: f64 = value
            .parse()
            .map_err(|_| Error::Assignment(format!("line {}: `{value}` is not a number", n + 1)))?;
        if name.is_empty() || !v.is_finite() {
            return Err(Error::Assignment(format!("line {}: bad entry `{line}`", n + 1)));
        }
        if out.insert(name.to_string(), v).is_some() {
            return Err(Error::Assignment(format!("line {}: `{name}` assigned twice", n + 1)));
        }
    }
    Ok(out)
}

/// The MILP point of a solution under earliest-arrival scheduling. Slots
/// that do not visit a client get `A = max(0, open - W)` there, and
/// `u = 1`.
pub fn solution_to_assignment(instance: &Instance, solution: &Solution) -> Result<BTreeMap<String, f64>> {
    let nn = instance.n_nodes();
    let t_start = instance.coeffs().t_start;
    let mut wait = vec![0.0; nn];
    let mut late = vec![0.0; nn];
    let mut by_slot = BTreeMap::new();
    for r in &solution.routes {
        let k = instance
            .slot_number(r.slot)
            .ok_or(Error::UnknownSlot { vtype: r.slot.vtype, index: r.slot.index })?;
        let sched = schedule_route(r, instance)?;
        for s in &sched.stops {
            wait[s.client] = s.wait;
            late[s.client] = s.lateness;
        }
        by_slot.insert(k, (r, sched));
    }

    let mut p = BTreeMap::new();
    for (k, slot) in instance.slots().enumerate().map(|(k, s)| (k + 1, s)) {
        for i in 0..nn {
            for j in (0..nn).filter(|&j| j != i) {
                p.insert(Names::x(i, j, k), 0.0);
            }
        }
        p.insert(Names::a(0, k), t_start);
        for j in 1..nn {
            let open = instance.clients()[j - 1].window_open;
            p.insert(Names::a(j, k), (open - wait[j]).max(0.0));
            p.insert(Names::u(j, k), 1.0);
        }
        let used = by_slot.get(&k);
        p.insert(Names::y(slot.vtype, slot.index), if used.is_some() { 1.0 } else { 0.0 });
        p.insert(Names::r(k), used.map_or(0.0, |(_, s)| s.depot_return));
        if let Some((route, sched)) = used {
            let mut prev = 0;
            for (pos, s) in sched.stops.iter().enumerate() {
                p.insert(Names::x(prev, s.client, k), 1.0);
                p.insert(Names::a(s.client, k), s.arrival);
                p.insert(Names::u(s.client, k), (pos + 1) as f64);
                prev = s.client;
            }
            if !route.stops.is_empty() {
                p.insert(Names::x(prev, 0, k), 1.0);
            }
        }
    }
    for j in 1..nn {
        p.insert(Names::w(j), wait[j]);
        p.insert(Names::l(j), late[j]);
    }
    Ok(p)
}

#[derive(Debug, Clone, Serialize)]
pub struct ImportReport {
    pub solution: Solution,
    /// Objective of the assignment as the MILP prices it.
    pub imported_objective: f64,
    /// Objective of the rebuilt routes under earliest-arrival scheduling.
    pub reevaluated_objective: f64,
    /// `reevaluated_objective - imported_objective`.
    pub difference: f64,
    pub imported_wait_hours: f64,
    pub earliest_wait_hours: f64,
    /// Set when the assignment books less waiting than its routes need,
    /// i.e. arrival times were pushed later to absorb waits.
    pub arrival_inflation: bool,
    pub violations: Vec<Violation>,
}

fn parse_indices(name: &str, prefix: &str, n: usize) -> Option<Vec<usize>> {
    let rest = name.strip_prefix(prefix)?;
    let parts: Vec<usize> = rest.split('_').map(|p| p.parse().ok()).collect::<Option<_>>()?;
    (parts.len() == n).then_some(parts)
}

/// Rebuilds routes from the `x` arcs of an assignment and re-prices them.
/// Variables the model does not know are ignored; missing ones count as 0.
pub fn import_solution(instance: &Instance, values: &BTreeMap<String, f64>) -> Result<ImportReport> {
    let nn = instance.n_nodes();
    let nk = instance.slot_count();
    let mut succ: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for (name, &v) in values {
        let is_x = name.starts_with("x_");
        if !is_x && !name.starts_with("y_") {
            continue;
        }
        if (v - v.round()).abs() > BINARY_TOL || !(-BINARY_TOL..=1.0 + BINARY_TOL).contains(&v) {
            return Err(Error::FractionalBinary { name: name.clone(), value: v });
        }
        if !is_x || v < 0.5 {
            continue;
        }
        let Some([i, j, k]) = parse_indices(name, "x_", 3).map(|p| [p[0], p[1], p[2]]) else {
            return Err(Error::Assignment(format!("unrecognised arc variable `{name}`")));
        };
        if i >= nn || j >= nn || i == j || k == 0 || k > nk {
            return Err(Error::Assignment(format!("arc variable `{name}` is outside the model")));
        }
        if let Some(other) = succ.entry(k).or_default().insert(i, j) {
            return Err(Error::Assignment(format!("node {i} on slot {k} leaves to both {other} and {j}")));
        }
    }

    let mut routes = Vec::new();
    for (&k, arcs) in &succ {
        let mut left = arcs.clone();
        let mut stops = Vec::new();
        if let Some(mut cur) = left.remove(&0) {
            while cur != 0 {
                stops.push(cur);
                cur = left
                    .remove(&cur)
                    .ok_or_else(|| Error::Assignment(format!("route of slot {k} stops at node {cur}")))?;
            }
        }
        if let Some((&start, _)) = left.iter().next() {
            let mut cycle = vec![start];
            let mut seen = BTreeSet::from([start]);
            let mut cur = left[&start];
            while seen.insert(cur) {
                cycle.push(cur);
                cur = *left
                    .get(&cur)
                    .ok_or_else(|| Error::Assignment(format!("dangling arc path on slot {k} at node {cur}")))?;
            }
            let at = cycle.iter().position(|&c| c == cur).unwrap_or(0);
            return Err(Error::SubtourDetected { slot: k, cycle: cycle[at..].to_vec() });
        }
        let slot = instance.slot_by_number(k).expect("slot range checked");
        routes.push(Route::new(slot, stops));
    }
    let solution = Solution::from_routes(instance, routes).canonical();
    let violations = validate_solution(&solution, instance);

    let imported_objective = objective_terms(instance)
        .iter()
        .map(|(c, v)| c * values.get(v).copied().unwrap_or(0.0))
        .sum::<f64>();
    let reevaluated_objective = objective(&solution, instance)?;
    let imported_wait_hours: f64 = (1..nn).map(|j| values.get(&Names::w(j)).copied().unwrap_or(0.0)).sum();
    let mut earliest_wait_hours = 0.0;
    for r in solution.routes.iter().filter(|r| !r.stops.is_empty()) {
        earliest_wait_hours += schedule_route(r, instance)?.totals.wait_hours;
    }
    Ok(ImportReport {
        solution,
        imported_objective,
        reevaluated_objective,
        difference: reevaluated_objective - imported_objective,
        imported_wait_hours,
        earliest_wait_hours,
        arrival_inflation: imported_wait_hours < earliest_wait_hours - 1e-6,
        violations,
    })
}
