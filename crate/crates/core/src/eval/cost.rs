use serde::{Deserialize, Serialize};

use super::schedule::{check_route_totals, RouteTotals};
use super::Solution;
use crate::error::Result;
use crate::model::{amortized_capex, CostCoefficients, Instance};

/// Reporting and validation switches. None of these affect the
/// optimization objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalPolicy {
    /// Include OPEX in the reported daily total.
    pub opex_in_reported: bool,
    /// Separate per-vehicle base vehicle and trailer charge, USD/day.
    pub vehicle_trailer_capex_per_vehicle: f64,
    /// Report the vehicle and trailer charge inside the fleet CAPEX line.
    pub fold_vehicle_trailer: bool,
    /// Treat any lateness as a hard violation.
    pub strict_windows: bool,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        EvalPolicy {
            opex_in_reported: false,
            // 80 kUSD vehicle and trailer over 20 years of 365 operating days.
            vehicle_trailer_capex_per_vehicle: amortized_capex(80_000.0, 0.0, 0.0, 20.0, 1.0, 365.0)
                .expect("constant lifespans are positive"),
            fold_vehicle_trailer: false,
            strict_windows: false,
        }
    }
}

/// Solution-wide sums from which every cost line is priced.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub travel_hours: f64,
    pub service_hours: f64,
    pub wait_hours: f64,
    pub lateness_hours: f64,
    pub fuel_gallons: f64,
    pub distance_miles: f64,
    pub energy_kwh: f64,
    /// Sum of C^op * t over traversed arcs, USD.
    pub opex_base: f64,
    /// Sum of C^cap over active slots, USD/day.
    pub capex_base: f64,
    pub vehicles: usize,
    pub clients_served: usize,
}

impl Aggregates {
    pub fn add_route(&mut self, totals: &RouteTotals, capex_day: f64, clients: usize) {
        self.travel_hours += totals.travel_hours;
        self.service_hours += totals.service_hours;
        self.wait_hours += totals.wait_hours;
        self.lateness_hours += totals.lateness_hours;
        self.fuel_gallons += totals.fuel_gallons;
        self.distance_miles += totals.distance_miles;
        self.energy_kwh += totals.energy_kwh;
        self.opex_base += totals.opex_base;
        self.capex_base += capex_day;
        self.vehicles += 1;
        self.clients_served += clients;
    }

    pub fn of(solution: &Solution, instance: &Instance) -> Result<Aggregates> {
        let mut agg = Aggregates::default();
        for r in &solution.routes {
            let totals = check_route_totals(instance, r)?;
            agg.add_route(&totals, instance.vtype(r.slot.vtype).capex_day, r.stops.len());
        }
        Ok(agg)
    }
}

/// Daily cost lines in USD.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub travel_labor: f64,
    pub service_labor: f64,
    /// `travel_labor + service_labor`.
    pub travel_and_service: f64,
    pub wait: f64,
    pub fuel: f64,
    pub lateness: f64,
    pub capex: f64,
    pub opex: f64,
    pub energy_transfer: f64,
    pub vehicle_trailer_capex: f64,
    /// The six optimized components.
    pub objective_total: f64,
    /// Full daily economic cost under the pricing policy.
    pub reported_total: f64,
}

/// Prices aggregates. Linear in every coefficient and every aggregate.
pub fn price(agg: &Aggregates, coeffs: &CostCoefficients, policy: &EvalPolicy) -> CostBreakdown {
    let travel_labor = coeffs.alpha * agg.travel_hours;
    let service_labor = coeffs.alpha * agg.service_hours;
    let travel_and_service = travel_labor + service_labor;
    let wait = coeffs.lambda_w * agg.wait_hours;
    let fuel = coeffs.beta * agg.fuel_gallons;
    let lateness = coeffs.delta * agg.lateness_hours;
    let capex = coeffs.epsilon * agg.capex_base;
    let opex = coeffs.zeta * agg.opex_base;
    let energy_transfer = coeffs.gamma * agg.energy_kwh;
    let vehicle_trailer_capex = policy.vehicle_trailer_capex_per_vehicle * agg.vehicles as f64;
    let objective_total = travel_and_service + wait + fuel + lateness + capex + opex;
    let mut reported_total =
        travel_and_service + wait + fuel + lateness + capex + energy_transfer + vehicle_trailer_capex;
    if policy.opex_in_reported {
        reported_total += opex;
    }
    CostBreakdown {
        travel_labor,
        service_labor,
        travel_and_service,
        wait,
        fuel,
        lateness,
        capex,
        opex,
        energy_transfer,
        vehicle_trailer_capex,
        objective_total,
        reported_total,
    }
}

/// Prices a solution under the default policy.
pub fn cost_breakdown(solution: &Solution, instance: &Instance) -> Result<CostBreakdown> {
    cost_breakdown_with(solution, instance, &EvalPolicy::default())
}

pub fn cost_breakdown_with(solution: &Solution, instance: &Instance, policy: &EvalPolicy) -> Result<CostBreakdown> {
    Ok(price(&Aggregates::of(solution, instance)?, instance.coeffs(), policy))
}

/// Optimization objective of a solution.
pub fn objective(solution: &Solution, instance: &Instance) -> Result<f64> {
    Ok(cost_breakdown(solution, instance)?.objective_total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Route;
    use crate::model::{catalog, Client, DistanceMatrix, Location, Slot};

    const ORIGIN: Location = Location::Planar { x: 0.0, y: 0.0 };

    #[test]
    fn empty_solution_costs_nothing() {
        let inst = Instance::from_coordinates(
            "e",
            ORIGIN,
            vec![],
            catalog::default_catalog(),
            36,
            CostCoefficients::default(),
            1.3,
        )
        .unwrap();
        let cb = cost_breakdown(&Solution::empty(&inst), &inst).unwrap();
        for v in [
            cb.travel_and_service,
            cb.wait,
            cb.fuel,
            cb.lateness,
            cb.capex,
            cb.opex,
            cb.energy_transfer,
            cb.vehicle_trailer_capex,
            cb.objective_total,
            cb.reported_total,
        ] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn standard_fuel_for_ten_mile_leg() {
        let inst = Instance::with_matrix(
            "f",
            ORIGIN,
            vec![Client::new(1, ORIGIN, 40.0, 150.0, 0.0, 24.0)],
            DistanceMatrix::from_rows(vec![vec![0.0, 10.0], vec![10.0, 0.0]]).unwrap(),
            catalog::default_catalog(),
            36,
            CostCoefficients::default(),
        )
        .unwrap();
        let sol = Solution::from_routes(&inst, vec![Route::new(Slot::new(0, 0), vec![1])]);
        let cb = cost_breakdown(&sol, &inst).unwrap();
        assert!((cb.fuel - 7.60).abs() < 1e-12);
        assert_eq!(cb.capex, 65.75);
        // 20 mi at 30 mph, 40 kWh at 50 kW.
        assert!((cb.travel_labor - 30.0 * 20.0 / 30.0).abs() < 1e-12);
        assert!((cb.service_labor - 30.0 * 0.8).abs() < 1e-12);
        assert!((cb.opex - 1.0 * 20.0 / 30.0).abs() < 1e-12);
        assert!((cb.energy_transfer - 4.0).abs() < 1e-12);
        let six = cb.travel_and_service + cb.wait + cb.fuel + cb.lateness + cb.capex + cb.opex;
        assert!((cb.objective_total - six).abs() <= 1e-6 * six);
    }

    #[test]
    fn published_urban_aggregates() {
        let agg = Aggregates {
            travel_hours: 13.9,
            service_hours: 1.38,
            wait_hours: 17.1287,
            fuel_gallons: 82.7,
            energy_kwh: 988.0,
            capex_base: 258.64 + 668.59,
            vehicles: 2,
            ..Default::default()
        };
        let cb = price(&agg, &CostCoefficients::default(), &EvalPolicy::default());
        assert!((cb.travel_labor - 417.0).abs() < 0.02);
        assert!((cb.service_labor - 41.4).abs() < 0.02);
        assert!((cb.travel_and_service - 458.4).abs() < 0.02);
        assert!((cb.wait - 513.86).abs() < 0.02);
        assert!((cb.fuel - 314.26).abs() < 0.02);
        assert!((cb.energy_transfer - 98.8).abs() < 0.02);
        assert!((cb.capex - 927.23).abs() < 1e-9);
        assert!((cb.vehicle_trailer_capex - 21.92).abs() < 0.01);
    }

    #[test]
    fn opex_policy_switch() {
        let agg = Aggregates { opex_base: 10.0, travel_hours: 1.0, ..Default::default() };
        let co = CostCoefficients::default();
        let off = price(&agg, &co, &EvalPolicy::default());
        let on = price(&agg, &co, &EvalPolicy { opex_in_reported: true, ..Default::default() });
        assert_eq!(on.reported_total - off.reported_total, 10.0);
        assert_eq!(on.objective_total, off.objective_total);
    }
}
