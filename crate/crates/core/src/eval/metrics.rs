use serde::Serialize;

use super::{schedule_route, Solution};
use crate::error::Result;
use crate::model::{Instance, Slot};

/// Share of the onboard battery handed to clients.
pub fn utilization(delivered_kwh: f64, battery_kwh: f64) -> f64 {
    delivered_kwh / battery_kwh
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VehicleMetrics {
    pub slot: Slot,
    /// One-based index in the global slot list.
    pub slot_number: usize,
    pub type_name: String,
    pub clients: usize,
    pub energy_kwh: f64,
    pub utilization: f64,
    pub distance_miles: f64,
    pub fuel_gallons: f64,
    pub travel_hours: f64,
    pub service_hours: f64,
    pub wait_hours: f64,
    pub lateness_hours: f64,
    pub depot_departure: f64,
    pub depot_return: f64,
    pub duration_hours: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub travel_hours: f64,
    pub service_hours: f64,
    pub wait_hours: f64,
    pub lateness_hours: f64,
    pub fuel_gallons: f64,
    pub distance_miles: f64,
    pub energy_kwh: f64,
    pub clients_served: usize,
    pub clients_total: usize,
    /// Served fraction in [0, 1]; zero for an empty client set.
    pub completion_rate: f64,
    pub vehicles: Vec<VehicleMetrics>,
}

pub fn metrics(solution: &Solution, instance: &Instance) -> Result<Metrics> {
    let mut m = Metrics {
        travel_hours: 0.0,
        service_hours: 0.0,
        wait_hours: 0.0,
        lateness_hours: 0.0,
        fuel_gallons: 0.0,
        distance_miles: 0.0,
        energy_kwh: 0.0,
        clients_served: 0,
        clients_total: instance.n_clients(),
        completion_rate: 0.0,
        vehicles: Vec::with_capacity(solution.routes.len()),
    };
    for r in &solution.routes {
        let s = schedule_route(r, instance)?;
        let t = &s.totals;
        let vt = instance.vtype(r.slot.vtype);
        m.travel_hours += t.travel_hours;
        m.service_hours += t.service_hours;
        m.wait_hours += t.wait_hours;
        m.lateness_hours += t.lateness_hours;
        m.fuel_gallons += t.fuel_gallons;
        m.distance_miles += t.distance_miles;
        m.energy_kwh += t.energy_kwh;
        m.clients_served += r.stops.len();
        m.vehicles.push(VehicleMetrics {
            slot: r.slot,
            slot_number: instance.slot_number(r.slot).unwrap_or(0),
            type_name: vt.name.clone(),
            clients: r.stops.len(),
            energy_kwh: t.energy_kwh,
            utilization: utilization(t.energy_kwh, vt.battery),
            distance_miles: t.distance_miles,
            fuel_gallons: t.fuel_gallons,
            travel_hours: t.travel_hours,
            service_hours: t.service_hours,
            wait_hours: t.wait_hours,
            lateness_hours: t.lateness_hours,
            depot_departure: s.depot_departure,
            depot_return: s.depot_return,
            duration_hours: s.depot_return - s.depot_departure,
        });
    }
    if m.clients_total > 0 {
        m.completion_rate = m.clients_served as f64 / m.clients_total as f64;
    }
    Ok(m)
}
