use std::fmt;

use super::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IssueKind {
    ClientEnergy,
    ClientPower,
    WindowOrder,
    WindowOutsideHorizon,
    EnergyExceedsBattery,
    WindowTooShort,
    UnreachableClient,
    HorizonUnreachable,
    VehicleType,
    FleetCap,
    Coefficients,
    Matrix,
}

impl IssueKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            IssueKind::ClientEnergy => "client_energy",
            IssueKind::ClientPower => "client_power",
            IssueKind::WindowOrder => "window_order",
            IssueKind::WindowOutsideHorizon => "window_outside_horizon",
            IssueKind::EnergyExceedsBattery => "energy_exceeds_battery",
            IssueKind::WindowTooShort => "window_too_short",
            IssueKind::UnreachableClient => "unreachable_client",
            IssueKind::HorizonUnreachable => "horizon_unreachable",
            IssueKind::VehicleType => "vehicle_type",
            IssueKind::FleetCap => "fleet_cap",
            IssueKind::Coefficients => "coefficients",
            IssueKind::Matrix => "matrix",
        }
    }
}

/// A problem found in an instance. Validation never fails; it reports.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceIssue {
    pub kind: IssueKind,
    pub client: Option<usize>,
    pub vtype: Option<usize>,
    pub detail: String,
}

impl fmt::Display for InstanceIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.as_str())?;
        if let Some(c) = self.client {
            write!(f, " client={c}")?;
        }
        if let Some(t) = self.vtype {
            write!(f, " type={}", t + 1)?;
        }
        write!(f, ": {}", self.detail)
    }
}

struct Issues(Vec<InstanceIssue>);

impl Issues {
    fn push(&mut self, kind: IssueKind, client: Option<usize>, vtype: Option<usize>, detail: String) {
        self.0.push(InstanceIssue {
            kind,
            client,
            vtype,
            detail,
        });
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

/// Checks every data invariant plus per-client serviceability. The result
/// is empty iff the instance is acceptable to all solvers.
pub fn validate_instance(instance: &Instance) -> Vec<InstanceIssue> {
    let mut out = Issues(Vec::new());
    let co = instance.coeffs();

    let non_negative = [
        ("alpha", co.alpha),
        ("lambda_w", co.lambda_w),
        ("beta", co.beta),
        ("delta", co.delta),
        ("epsilon", co.epsilon),
        ("zeta", co.zeta),
        ("gamma", co.gamma),
        ("t_start", co.t_start),
    ];
    for (name, v) in non_negative {
        if !(v.is_finite() && v >= 0.0) {
            out.push(IssueKind::Coefficients, None, None, format!("{name} = {v} must be >= 0"));
        }
    }
    if !positive(co.speed) {
        out.push(IssueKind::Coefficients, None, None, format!("speed = {} must be > 0", co.speed));
    }
    for (name, v) in [("sigma_batt", co.sigma_batt), ("sigma_fuel", co.sigma_fuel)] {
        if !(v > 0.0 && v <= 1.0) {
            out.push(IssueKind::Coefficients, None, None, format!("{name} = {v} must be in (0, 1]"));
        }
    }
    if !(co.horizon.is_finite() && co.horizon > co.t_start) {
        out.push(
            IssueKind::Coefficients,
            None,
            None,
            format!("horizon {} must exceed t_start {}", co.horizon, co.t_start),
        );
    }

    for (tau, t) in instance.types().iter().enumerate() {
        let fields = [
            ("p_max", t.p_max),
            ("battery", t.battery),
            ("fuel_cap", t.fuel_cap),
            ("fuel_rate", t.fuel_rate),
            ("capex_day", t.capex_day),
            ("opex_hr", t.opex_hr),
        ];
        for (name, v) in fields {
            if !positive(v) {
                out.push(IssueKind::VehicleType, None, Some(tau), format!("{} {name} = {v} must be > 0", t.name));
            }
        }
        if t.min_slots > t.max_slots {
            out.push(
                IssueKind::VehicleType,
                None,
                Some(tau),
                format!("{} min_slots {} > max_slots {}", t.name, t.min_slots, t.max_slots),
            );
        }
    }
    let slots = instance.slot_count();
    let required: usize = instance.types().iter().map(|t| t.min_slots).sum();
    if instance.total_fleet_cap() > slots {
        out.push(
            IssueKind::FleetCap,
            None,
            None,
            format!("total fleet cap {} exceeds available slots {slots}", instance.total_fleet_cap()),
        );
    }
    if required > instance.total_fleet_cap() {
        out.push(
            IssueKind::FleetCap,
            None,
            None,
            format!("minimum fleet {required} exceeds total fleet cap {}", instance.total_fleet_cap()),
        );
    }

    let d = instance.distance_matrix();
    let n = d.size();
    'outer: for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j);
            if !(v.is_finite() && v >= 0.0) {
                out.push(IssueKind::Matrix, None, None, format!("d[{i}][{j}] = {v}"));
                break 'outer;
            }
            if i == j && v != 0.0 {
                out.push(IssueKind::Matrix, None, None, format!("nonzero diagonal d[{i}][{i}] = {v}"));
                break 'outer;
            }
        }
    }
    let asym = d.max_asymmetry();
    if asym > 1e-9 {
        out.push(IssueKind::Matrix, None, None, format!("matrix is not symmetric (max |d_ij - d_ji| = {asym})"));
    }

    let types_ok = !instance.types().is_empty()
        && instance.types().iter().all(|t| positive(t.p_max));
    for c in instance.clients() {
        let id = Some(c.id);
        if !positive(c.energy_demand) {
            out.push(IssueKind::ClientEnergy, id, None, format!("energy demand {} must be > 0", c.energy_demand));
        }
        if !positive(c.max_accept_power) {
            out.push(IssueKind::ClientPower, id, None, format!("accepted power {} must be > 0", c.max_accept_power));
        }
        if !(c.window_open < c.window_close) {
            out.push(
                IssueKind::WindowOrder,
                id,
                None,
                format!("window [{}, {}] is not ordered", c.window_open, c.window_close),
            );
        }
        if !(c.window_open >= 0.0 && c.window_close <= co.horizon) {
            out.push(
                IssueKind::WindowOutsideHorizon,
                id,
                None,
                format!("window [{}, {}] outside [0, {}]", c.window_open, c.window_close, co.horizon),
            );
        }
        if let Some(b) = c.equipment_battery {
            if c.energy_demand > b {
                out.push(
                    IssueKind::EnergyExceedsBattery,
                    id,
                    None,
                    format!("demand {} kWh exceeds equipment battery {b} kWh", c.energy_demand),
                );
            }
        }
        if !types_ok || !positive(c.energy_demand) || !positive(c.max_accept_power) {
            continue;
        }

        let j = c.id;
        let service: Vec<f64> = (0..instance.types().len()).map(|tau| instance.service_time(j, tau)).collect();
        let fastest = service.iter().copied().fold(f64::INFINITY, f64::min);
        if c.window_close - c.window_open < fastest {
            out.push(
                IssueKind::WindowTooShort,
                id,
                None,
                format!(
                    "window length {} h is shorter than the fastest service {fastest} h",
                    c.window_close - c.window_open
                ),
            );
        }

        let round_trip = instance.distance(0, j) + instance.distance(j, 0);
        let budget_ok: Vec<bool> = (0..instance.types().len())
            .map(|tau| {
                let t = instance.vtype(tau);
                t.max_slots > 0
                    && c.energy_demand <= instance.battery_budget(tau)
                    && round_trip * t.fuel_rate <= instance.fuel_budget(tau)
            })
            .collect();
        if !budget_ok.iter().any(|&ok| ok) {
            out.push(
                IssueKind::UnreachableClient,
                id,
                None,
                format!(
                    "no vehicle type covers {} kWh and a {round_trip} mi round trip within its budgets",
                    c.energy_demand
                ),
            );
            continue;
        }
        let on_time = (0..instance.types().len()).any(|tau| {
            let start = (co.t_start + instance.travel_time(0, j)).max(c.window_open);
            budget_ok[tau] && start + service[tau] + instance.travel_time(j, 0) <= co.horizon
        });
        if !on_time {
            out.push(
                IssueKind::HorizonUnreachable,
                id,
                None,
                format!("no feasible vehicle type can serve the client and return by {}", co.horizon),
            );
        }
    }
    out.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{catalog, Client, CostCoefficients, Location, VehicleType};

    fn planar(x: f64, y: f64) -> Location {
        Location::Planar { x, y }
    }

    fn instance(clients: Vec<Client>, types: Vec<VehicleType>) -> Instance {
        let cap = types.iter().map(|t| t.max_slots).sum();
        Instance::from_coordinates("v", planar(0.0, 0.0), clients, types, cap, CostCoefficients::default(), 1.3)
            .unwrap()
    }

    fn kinds(issues: &[InstanceIssue]) -> Vec<IssueKind> {
        issues.iter().map(|i| i.kind).collect()
    }

    #[test]
    fn well_formed_instance_has_no_issues() {
        let clients = vec![
            Client::new(1, planar(2.0, 3.0), 60.0, 150.0, 1.0, 6.0),
            Client::from_battery(2, planar(-4.0, 1.0), 600.0, 350.0, 8.0, 14.0),
        ];
        let inst = instance(clients, catalog::default_catalog());
        assert!(validate_instance(&inst).is_empty(), "{:?}", validate_instance(&inst));
    }

    #[test]
    fn reversed_window() {
        let clients = vec![Client::new(1, planar(1.0, 1.0), 40.0, 150.0, 10.0, 9.0)];
        let inst = instance(clients, catalog::default_catalog());
        assert!(kinds(&validate_instance(&inst)).contains(&IssueKind::WindowOrder));
    }

    #[test]
    fn demand_beyond_every_battery() {
        let clients = vec![Client::new(1, planar(1.0, 1.0), 900.0, 150.0, 0.0, 24.0)];
        let standard_only = vec![catalog::default_catalog()[0].clone()];
        let issues = validate_instance(&instance(clients, standard_only));
        assert_eq!(kinds(&issues), vec![IssueKind::UnreachableClient]);
    }

    #[test]
    fn window_shorter_than_fastest_service() {
        // 100 kWh at 150 kW takes 0.667 h at best.
        let clients = vec![Client::new(1, planar(1.0, 1.0), 100.0, 150.0, 5.0, 5.5)];
        let issues = validate_instance(&instance(clients, catalog::default_catalog()));
        assert_eq!(kinds(&issues), vec![IssueKind::WindowTooShort]);
    }

    #[test]
    fn fuel_out_of_range() {
        // 2 * 300 mi * 1.3 * 0.25 gal/mi = 195 gal exceeds 150 * 0.9 gal.
        let clients = vec![Client::new(1, planar(300.0, 0.0), 50.0, 150.0, 0.0, 24.0)];
        let mega = vec![catalog::default_catalog()[4].clone()];
        let issues = validate_instance(&instance(clients, mega));
        assert_eq!(kinds(&issues), vec![IssueKind::UnreachableClient]);
    }

    #[test]
    fn late_window_cannot_return_in_time() {
        let clients = vec![Client::new(1, planar(30.0, 0.0), 200.0, 150.0, 22.5, 24.0)];
        let issues = validate_instance(&instance(clients, catalog::default_catalog()));
        assert_eq!(kinds(&issues), vec![IssueKind::HorizonUnreachable]);
    }

    #[test]
    fn bad_types_and_fleet() {
        let mut types = catalog::default_catalog();
        types[1].fuel_rate = 0.0;
        types[2].min_slots = 9;
        let inst = instance(vec![], types).with_total_fleet_cap(40);
        let k = kinds(&validate_instance(&inst));
        assert_eq!(k.iter().filter(|&&k| k == IssueKind::VehicleType).count(), 2);
        assert!(k.contains(&IssueKind::FleetCap));
    }

    #[test]
    fn bad_coefficients() {
        let co = CostCoefficients { sigma_batt: 0.0, alpha: -1.0, ..Default::default() };
        let inst = instance(vec![], catalog::default_catalog()).with_coeffs(co).unwrap();
        let k = kinds(&validate_instance(&inst));
        assert_eq!(k, vec![IssueKind::Coefficients, IssueKind::Coefficients]);
    }

    #[test]
    fn asymmetric_matrix() {
        use crate::model::DistanceMatrix;
        let clients = vec![Client::new(1, planar(1.0, 1.0), 40.0, 150.0, 0.0, 24.0)];
        let inst = instance(clients, catalog::default_catalog());
        let m = DistanceMatrix::from_rows(vec![vec![0.0, 2.0], vec![3.0, 0.0]]).unwrap();
        let k = kinds(&validate_instance(&inst.with_distance(m).unwrap()));
        assert_eq!(k, vec![IssueKind::Matrix]);
    }

    #[test]
    fn validation_is_deterministic() {
        let clients = vec![
            Client::new(1, planar(1.0, 1.0), 900.0, 150.0, 10.0, 9.0),
            Client::new(2, planar(1.0, 1.0), -5.0, 0.0, 0.0, 30.0),
        ];
        let inst = instance(clients, catalog::default_catalog());
        assert_eq!(validate_instance(&inst), validate_instance(&inst));
    }
}
