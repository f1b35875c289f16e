use serde::Serialize;

use super::Route;
use crate::error::{Error, Result};
use crate::model::Instance;

/// Timing of one client visit. All times are hours from midnight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopSchedule {
    pub client: usize,
    pub arrival: f64,
    pub wait: f64,
    pub service_start: f64,
    pub service_duration: f64,
    pub departure: f64,
    pub lateness: f64,
}

/// Earliest-arrival timetable of a route plus its resource totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub stops: Vec<StopSchedule>,
    pub depot_departure: f64,
    pub depot_return: f64,
    pub totals: RouteTotals,
}

/// Resource and time sums over one route, depot legs included.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RouteTotals {
    pub travel_hours: f64,
    pub service_hours: f64,
    pub wait_hours: f64,
    pub lateness_hours: f64,
    pub distance_miles: f64,
    pub fuel_gallons: f64,
    pub energy_kwh: f64,
    /// Sum of C^op * t over traversed arcs, USD before the zeta weight.
    pub opex_base: f64,
    pub depot_return: f64,
}

impl RouteTotals {
    /// Objective contribution of the route, excluding capital cost.
    pub fn operating_objective(&self, instance: &Instance) -> f64 {
        let c = instance.coeffs();
        c.alpha * (self.travel_hours + self.service_hours)
            + c.lambda_w * self.wait_hours
            + c.beta * self.fuel_gallons
            + c.delta * self.lateness_hours
            + c.zeta * self.opex_base
    }

    /// Objective contribution including the slot's capital cost.
    pub fn objective(&self, instance: &Instance, tau: usize) -> f64 {
        self.operating_objective(instance) + instance.coeffs().epsilon * instance.vtype(tau).capex_day
    }
}

/// Forward pass shared by every route evaluation. Vehicles leave the depot
/// at `t_start`, start service at `max(arrival, window_open)`, and leave
/// right after service. `visit` sees each stop in order.
///
/// Callers guarantee that `tau` and all stop ids are valid.
pub(crate) fn forward_pass(
    instance: &Instance,
    tau: usize,
    stops: &[usize],
    mut visit: impl FnMut(StopSchedule),
) -> RouteTotals {
    let vt = instance.vtype(tau);
    let mut tot = RouteTotals::default();
    let mut clock = instance.coeffs().t_start;
    let mut prev = 0;
    for &j in stops {
        let c = &instance.clients()[j - 1];
        let t = instance.travel_time(prev, j);
        let d = instance.distance(prev, j);
        tot.travel_hours += t;
        tot.distance_miles += d;
        tot.fuel_gallons += d * vt.fuel_rate;
        tot.opex_base += vt.opex_hr * t;
        let arrival = clock + t;
        let service_start = arrival.max(c.window_open);
        let wait = service_start - arrival;
        let s = instance.service_time(j, tau);
        let departure = service_start + s;
        let lateness = (departure - c.window_close).max(0.0);
        tot.service_hours += s;
        tot.wait_hours += wait;
        tot.lateness_hours += lateness;
        tot.energy_kwh += c.energy_demand;
        visit(StopSchedule {
            client: j,
            arrival,
            wait,
            service_start,
            service_duration: s,
            departure,
            lateness,
        });
        clock = departure;
        prev = j;
    }
    if !stops.is_empty() {
        let t = instance.travel_time(prev, 0);
        let d = instance.distance(prev, 0);
        tot.travel_hours += t;
        tot.distance_miles += d;
        tot.fuel_gallons += d * vt.fuel_rate;
        tot.opex_base += vt.opex_hr * t;
        clock += t;
    }
    tot.depot_return = clock;
    tot
}

/// Allocation-free route totals for search inner loops.
pub(crate) fn route_totals(instance: &Instance, tau: usize, stops: &[usize]) -> RouteTotals {
    forward_pass(instance, tau, stops, |_| {})
}

pub(crate) fn check_route(instance: &Instance, route: &Route) -> Result<()> {
    let t = instance
        .types()
        .get(route.slot.vtype)
        .ok_or(Error::UnknownSlot { vtype: route.slot.vtype, index: route.slot.index })?;
    if route.slot.index >= t.max_slots {
        return Err(Error::UnknownSlot { vtype: route.slot.vtype, index: route.slot.index });
    }
    if let Some(&bad) = route.stops.iter().find(|&&j| instance.client(j).is_none()) {
        return Err(Error::UnknownClient(bad));
    }
    Ok(())
}

pub(crate) fn check_route_totals(instance: &Instance, route: &Route) -> Result<RouteTotals> {
    check_route(instance, route)?;
    Ok(route_totals(instance, route.slot.vtype, &route.stops))
}

/// Earliest-arrival schedule of `route`.
pub fn schedule_route(route: &Route, instance: &Instance) -> Result<Schedule> {
    check_route(instance, route)?;
    let mut stops = Vec::with_capacity(route.stops.len());
    let totals = forward_pass(instance, route.slot.vtype, &route.stops, |s| stops.push(s));
    Ok(Schedule {
        stops,
        depot_departure: instance.coeffs().t_start,
        depot_return: totals.depot_return,
        totals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{catalog, Client, CostCoefficients, DistanceMatrix, Location, Slot};
    use proptest::prelude::*;

    const ORIGIN: Location = Location::Planar { x: 0.0, y: 0.0 };

    /// Instance over an explicit matrix; speed 1 mph so travel time equals
    /// distance, and the client power cap pins service time to E / rho.
    fn line_instance(dist: Vec<Vec<f64>>, clients: Vec<Client>) -> Instance {
        let co = CostCoefficients { speed: 1.0, ..Default::default() };
        Instance::with_matrix(
            "s",
            ORIGIN,
            clients,
            DistanceMatrix::from_rows(dist).unwrap(),
            catalog::default_catalog(),
            36,
            co,
        )
        .unwrap()
    }

    fn client(id: usize, energy: f64, open: f64, close: f64) -> Client {
        // rho = 50 kW, below every charger rating.
        Client::new(id, ORIGIN, energy, 50.0, open, close)
    }

    #[test]
    fn waits_for_window_open() {
        let inst = line_instance(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![client(1, 25.0, 3.0, 5.0)]);
        let s = schedule_route(&Route::new(Slot::new(4, 0), vec![1]), &inst).unwrap();
        let st = s.stops[0];
        assert_eq!(st.arrival, 1.0);
        assert_eq!(st.wait, 2.0);
        assert_eq!(st.service_start, 3.0);
        assert_eq!(st.service_duration, 0.5);
        assert_eq!(st.lateness, 0.0);
        assert_eq!(s.depot_return, 4.5);
        assert_eq!(s.depot_departure, 0.0);
    }

    #[test]
    fn open_window_has_no_wait() {
        let inst = line_instance(vec![vec![0.0, 2.0], vec![2.0, 0.0]], vec![client(1, 50.0, 0.0, 24.0)]);
        let s = schedule_route(&Route::new(Slot::new(4, 0), vec![1]), &inst).unwrap();
        assert_eq!(s.stops[0].wait, 0.0);
        assert_eq!(s.stops[0].lateness, 0.0);
        assert_eq!(s.depot_return, 5.0);
    }

    #[test]
    fn second_client_runs_late() {
        // Hand simulation: client 1 served 1..2; client 2 reached at 3,
        // served 3..4, window closes at 2, so lateness is 2.
        let dist = vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        let inst = line_instance(dist, vec![client(1, 50.0, 0.0, 2.0), client(2, 50.0, 0.0, 2.0)]);
        let s = schedule_route(&Route::new(Slot::new(4, 0), vec![1, 2]), &inst).unwrap();
        assert_eq!(s.stops[0].lateness, 0.0);
        assert_eq!(s.stops[1].service_start, 3.0);
        assert_eq!(s.stops[1].lateness, 2.0);
        assert_eq!(s.totals.lateness_hours, 2.0);
        assert_eq!(s.totals.travel_hours, 3.0);
    }

    #[test]
    fn unknown_ids() {
        let inst = line_instance(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![client(1, 25.0, 3.0, 5.0)]);
        assert!(matches!(
            schedule_route(&Route::new(Slot::new(4, 0), vec![2]), &inst),
            Err(Error::UnknownClient(2))
        ));
        assert!(matches!(
            schedule_route(&Route::new(Slot::new(4, 3), vec![1]), &inst),
            Err(Error::UnknownSlot { .. })
        ));
    }

    proptest! {
        #[test]
        fn schedule_identities(
            coords in prop::collection::vec((0.5f64..20.0, 0.5f64..20.0), 1..7),
            windows in prop::collection::vec((0.0f64..20.0, 0.2f64..6.0, 10.0f64..200.0), 7),
            tau in 0usize..5,
        ) {
            let clients: Vec<Client> = coords.iter().enumerate().map(|(i, &(x, y))| {
                let (open, len, e) = windows[i];
                Client::new(i + 1, Location::Planar { x, y }, e, 150.0, open, open + len)
            }).collect();
            let n = clients.len();
            let inst = Instance::from_coordinates(
                "p", ORIGIN, clients, catalog::default_catalog(), 36, CostCoefficients::default(), 1.3,
            ).unwrap();
            let stops: Vec<usize> = (1..=n).collect();
            let s = schedule_route(&Route::new(Slot::new(tau, 0), stops), &inst).unwrap();
            let mut prev_dep = inst.coeffs().t_start;
            let mut prev_node = 0;
            for st in &s.stops {
                let c = inst.client(st.client).unwrap();
                prop_assert!((st.arrival - (prev_dep + inst.travel_time(prev_node, st.client))).abs() < 1e-12);
                prop_assert_eq!(st.wait, (c.window_open - st.arrival).max(0.0));
                prop_assert!((st.service_start - (st.arrival + st.wait)).abs() < 1e-12);
                prop_assert_eq!(st.departure, st.service_start + st.service_duration);
                prop_assert_eq!(st.lateness, (st.departure - c.window_close).max(0.0));
                prop_assert!(st.service_start > prev_dep - 1e-12);
                prev_dep = st.departure;
                prev_node = st.client;
            }
            for w in s.stops.windows(2) {
                prop_assert!(w[1].service_start > w[0].service_start);
            }
            prop_assert!((s.depot_return - (prev_dep + inst.travel_time(prev_node, 0))).abs() < 1e-12);
        }
    }
}
