use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::schedule::{route_totals, RouteTotals};
use super::{EvalPolicy, Solution};
use crate::model::{Instance, Slot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Client not served, or a route names a client that does not exist.
    Coverage,
    DuplicateVisit,
    BatteryBudget,
    FuelBudget,
    FleetBoundTotal,
    FleetBoundTypeMin,
    /// Lateness under strict windows.
    WindowHard,
    /// Depot return after the horizon.
    Horizon,
    SlotReuse,
    /// Slot outside the instance's type catalog or slot range.
    InvalidSlot,
    /// Active slot without clients.
    EmptyRoute,
}

impl ViolationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ViolationKind::Coverage => "coverage",
            ViolationKind::DuplicateVisit => "duplicate_visit",
            ViolationKind::BatteryBudget => "battery_budget",
            ViolationKind::FuelBudget => "fuel_budget",
            ViolationKind::FleetBoundTotal => "fleet_bound_total",
            ViolationKind::FleetBoundTypeMin => "fleet_bound_type_min",
            ViolationKind::WindowHard => "window_hard",
            ViolationKind::Horizon => "horizon",
            ViolationKind::SlotReuse => "slot_reuse",
            ViolationKind::InvalidSlot => "invalid_slot",
            ViolationKind::EmptyRoute => "empty_route",
        }
    }
}

/// One constraint breach. `magnitude` is in the units of the violated
/// quantity (kWh, gallons, hours, vehicles or visits) and always positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub route: Option<usize>,
    pub slot: Option<Slot>,
    pub client: Option<usize>,
    pub vtype: Option<usize>,
    pub magnitude: f64,
}

impl Violation {
    fn new(kind: ViolationKind, magnitude: f64) -> Self {
        Violation {
            kind,
            route: None,
            slot: None,
            client: None,
            vtype: None,
            magnitude,
        }
    }

    fn on_route(mut self, idx: usize, slot: Slot) -> Self {
        self.route = Some(idx);
        self.slot = Some(slot);
        self
    }

    fn at_client(mut self, client: usize) -> Self {
        self.client = Some(client);
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.as_str())?;
        if let Some(r) = self.route {
            write!(f, " route={r}")?;
        }
        if let Some(s) = self.slot {
            write!(f, " slot={s}")?;
        }
        if let Some(c) = self.client {
            write!(f, " client={c}")?;
        }
        if let Some(t) = self.vtype {
            write!(f, " type={}", t + 1)?;
        }
        write!(f, " magnitude={}", self.magnitude)
    }
}

/// Budget comparisons allow for summation round-off.
pub(crate) fn excess(value: f64, limit: f64) -> Option<f64> {
    let over = value - limit;
    (over > 1e-9 * limit.abs().max(1.0)).then_some(over)
}

/// Battery, fuel and horizon check on one route's totals.
pub(crate) fn route_within_limits(instance: &Instance, tau: usize, totals: &RouteTotals) -> bool {
    excess(totals.energy_kwh, instance.battery_budget(tau)).is_none()
        && excess(totals.fuel_gallons, instance.fuel_budget(tau)).is_none()
        && excess(totals.depot_return, instance.coeffs().horizon).is_none()
}

/// Hard-constraint audit under the default (soft window) policy.
pub fn validate_solution(solution: &Solution, instance: &Instance) -> Vec<Violation> {
    validate_solution_with(solution, instance, &EvalPolicy::default())
}

pub fn validate_solution_with(solution: &Solution, instance: &Instance, policy: &EvalPolicy) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();
    let n = instance.n_clients();
    let mut visits = vec![0usize; n + 1];
    let mut slot_uses: HashMap<Slot, usize> = HashMap::new();
    let mut per_type = vec![0usize; instance.types().len()];

    for (idx, route) in solution.routes.iter().enumerate() {
        let slot = route.slot;
        let valid_slot = instance.slot_number(slot).is_some();
        if !valid_slot {
            out.push(Violation::new(InvalidSlot, 1.0).on_route(idx, slot));
        } else {
            *slot_uses.entry(slot).or_default() += 1;
            per_type[slot.vtype] += 1;
        }
        if route.stops.is_empty() {
            out.push(Violation::new(EmptyRoute, 1.0).on_route(idx, slot));
        }
        let mut known = true;
        for &j in &route.stops {
            if (1..=n).contains(&j) {
                visits[j] += 1;
            } else {
                known = false;
                out.push(Violation::new(Coverage, 1.0).on_route(idx, slot).at_client(j));
            }
        }
        if !valid_slot || !known || route.stops.is_empty() {
            continue;
        }

        let tau = slot.vtype;
        let mut late = Vec::new();
        let totals = super::schedule::forward_pass(instance, tau, &route.stops, |s| {
            if s.lateness > 0.0 {
                late.push((s.client, s.lateness));
            }
        });
        debug_assert_eq!(totals, route_totals(instance, tau, &route.stops));
        if let Some(e) = excess(totals.energy_kwh, instance.battery_budget(tau)) {
            out.push(Violation::new(BatteryBudget, e).on_route(idx, slot));
        }
        if let Some(e) = excess(totals.fuel_gallons, instance.fuel_budget(tau)) {
            out.push(Violation::new(FuelBudget, e).on_route(idx, slot));
        }
        if let Some(e) = excess(totals.depot_return, instance.coeffs().horizon) {
            out.push(Violation::new(Horizon, e).on_route(idx, slot));
        }
        if policy.strict_windows {
            for (client, l) in late {
                out.push(Violation::new(WindowHard, l).on_route(idx, slot).at_client(client));
            }
        }
    }

    let mut reused: Vec<_> = slot_uses.into_iter().filter(|&(_, n)| n > 1).collect();
    reused.sort();
    for (slot, uses) in reused {
        let mut v = Violation::new(SlotReuse, (uses - 1) as f64);
        v.slot = Some(slot);
        out.push(v);
    }

    for (j, &count) in visits.iter().enumerate().skip(1) {
        match count {
            0 => out.push(Violation::new(Coverage, 1.0).at_client(j)),
            1 => {}
            c => out.push(Violation::new(DuplicateVisit, (c - 1) as f64).at_client(j)),
        }
    }

    for (tau, t) in instance.types().iter().enumerate() {
        if per_type[tau] < t.min_slots {
            let mut v = Violation::new(FleetBoundTypeMin, (t.min_slots - per_type[tau]) as f64);
            v.vtype = Some(tau);
            out.push(v);
        }
    }
    let active: usize = per_type.iter().sum();
    if active > instance.total_fleet_cap() {
        out.push(Violation::new(FleetBoundTotal, (active - instance.total_fleet_cap()) as f64));
    }
    out
}
