//! Closed-form parameter derivations applied before any optimization.

use super::{Client, VehicleType};
use crate::error::{Error, Result};

/// Lower clamp on the per-client energy demand, kWh.
pub const MIN_DEMAND_KWH: f64 = 30.0;
/// Upper clamp on the per-client energy demand, kWh.
pub const MAX_DEMAND_KWH: f64 = 250.0;
/// Fraction of the equipment battery replenished per off-hour visit.
pub const REPLENISH_FRACTION: f64 = 0.25;

/// Charging power actually achieved when `vtype` serves `client`: the
/// smaller of the charger rating and the client's acceptance limit.
pub fn effective_power(client: &Client, vtype: &VehicleType) -> f64 {
    vtype.p_max.min(client.max_accept_power)
}

/// Constant-power charging session length in hours.
pub fn service_time(client: &Client, vtype: &VehicleType) -> Result<f64> {
    let power = effective_power(client, vtype);
    if !(power > 0.0) {
        return Err(Error::DegenerateInput(format!(
            "effective power {power} kW for client {} and type {}",
            client.id, vtype.name
        )));
    }
    Ok(client.energy_demand / power)
}

/// Off-hour top-up demand derived from the equipment battery size.
pub fn demand_from_battery(battery_kwh: f64) -> f64 {
    (REPLENISH_FRACTION * battery_kwh).clamp(MIN_DEMAND_KWH, MAX_DEMAND_KWH)
}

pub fn travel_time(distance_mi: f64, speed_mph: f64) -> Result<f64> {
    if !(speed_mph > 0.0) {
        return Err(Error::DegenerateInput(format!("speed {speed_mph} mph")));
    }
    Ok(distance_mi / speed_mph)
}

/// Daily amortized capital cost of one vehicle: straight-line depreciation
/// of the base vehicle/trailer and of the DC fast charger over their
/// respective lifespans, spread over the operating days of a year.
pub fn amortized_capex(
    vehicle_cost: f64,
    trailer_cost: f64,
    dcfc_cost: f64,
    life_vehicle_years: f64,
    life_dcfc_years: f64,
    days_per_year: f64,
) -> Result<f64> {
    if !(life_vehicle_years > 0.0) || !(life_dcfc_years > 0.0) {
        return Err(Error::DegenerateInput(format!(
            "lifespans must be positive (vehicle {life_vehicle_years}, dcfc {life_dcfc_years})"
        )));
    }
    if !(days_per_year > 0.0) {
        return Err(Error::DegenerateInput(format!("days per year {days_per_year}")));
    }
    Ok(((vehicle_cost + trailer_cost) / life_vehicle_years + dcfc_cost / life_dcfc_years)
        / days_per_year)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{catalog, Location};
    use proptest::prelude::*;

    fn client(energy: f64, rho: f64) -> Client {
        Client::new(1, Location::Planar { x: 0.0, y: 0.0 }, energy, rho, 0.0, 24.0)
    }

    fn vtype(p_max: f64) -> VehicleType {
        let mut t = catalog::default_catalog()[0].clone();
        t.p_max = p_max;
        t
    }

    #[test]
    fn effective_power_cases() {
        assert_eq!(effective_power(&client(10.0, 150.0), &vtype(1000.0)), 150.0);
        assert_eq!(effective_power(&client(10.0, 150.0), &vtype(50.0)), 50.0);
        assert_eq!(effective_power(&client(10.0, 350.0), &vtype(350.0)), 350.0);
    }

    #[test]
    fn service_time_cases() {
        assert_eq!(service_time(&client(100.0, 200.0), &vtype(50.0)).unwrap(), 2.0);
        let s = service_time(&client(250.0, 150.0), &vtype(1000.0)).unwrap();
        assert!((s - 250.0 / 150.0).abs() < 1e-12);
        assert!((s - 1.6667).abs() < 1e-4);
        assert!(matches!(
            service_time(&client(100.0, 0.0), &vtype(50.0)),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn demand_clamp() {
        assert_eq!(demand_from_battery(100.0), 30.0);
        assert_eq!(demand_from_battery(400.0), 100.0);
        assert_eq!(demand_from_battery(2000.0), 250.0);
    }

    #[test]
    fn travel_time_cases() {
        assert_eq!(travel_time(30.0, 30.0).unwrap(), 1.0);
        assert_eq!(travel_time(0.0, 30.0).unwrap(), 0.0);
        assert_eq!(travel_time(45.0, 30.0).unwrap(), 1.5);
        assert!(travel_time(1.0, 0.0).is_err());
        assert!(travel_time(1.0, -3.0).is_err());
    }

    #[test]
    fn capex_cases() {
        let c = amortized_capex(80_000.0, 0.0, 0.0, 10.0, 1.0, 365.0).unwrap();
        assert!((c - 21.92).abs() < 0.005);
        assert_eq!(amortized_capex(0.0, 0.0, 0.0, 10.0, 5.0, 365.0).unwrap(), 0.0);
        let c = amortized_capex(0.0, 0.0, 365_000.0, 10.0, 1.0, 365.0).unwrap();
        assert!((c - 1000.0).abs() < 1e-9);
        assert!(amortized_capex(1.0, 1.0, 1.0, 0.0, 1.0, 365.0).is_err());
        assert!(amortized_capex(1.0, 1.0, 1.0, 1.0, -1.0, 365.0).is_err());
    }

    proptest! {
        #[test]
        fn effective_power_is_one_of_the_bounds(rho in 1.0f64..2000.0, p in 1.0f64..2000.0) {
            let e = effective_power(&client(50.0, rho), &vtype(p));
            prop_assert!(e <= rho && e <= p);
            prop_assert!(e == rho || e == p);
        }

        #[test]
        fn service_time_non_increasing_in_charger_power(
            rho in 1.0f64..2000.0, p in 1.0f64..2000.0, dp in 0.0f64..500.0, e in 1.0f64..400.0
        ) {
            let c = client(e, rho);
            let slow = service_time(&c, &vtype(p)).unwrap();
            let fast = service_time(&c, &vtype(p + dp)).unwrap();
            prop_assert!(fast <= slow);
        }

        #[test]
        fn demand_in_clamp_range(b in 0.01f64..10_000.0) {
            let d = demand_from_battery(b);
            prop_assert!((MIN_DEMAND_KWH..=MAX_DEMAND_KWH).contains(&d));
            let raw = 0.25 * b;
            if (MIN_DEMAND_KWH..=MAX_DEMAND_KWH).contains(&raw) {
                prop_assert_eq!(d, raw);
            }
        }

        #[test]
        fn capex_linear_and_homogeneous(
            v in 0.0f64..1e6, t in 0.0f64..1e6, d in 0.0f64..1e6,
            lv in 1.0f64..30.0, ld in 1.0f64..30.0, days in 1.0f64..400.0
        ) {
            let base = amortized_capex(v, t, d, lv, ld, days).unwrap();
            let doubled = amortized_capex(2.0 * v, 2.0 * t, 2.0 * d, lv, ld, days).unwrap();
            prop_assert!((doubled - 2.0 * base).abs() <= 1e-9 * (1.0 + base));
            let half_days = amortized_capex(v, t, d, lv, ld, 2.0 * days).unwrap();
            prop_assert!((half_days - 0.5 * base).abs() <= 1e-9 * (1.0 + base));
            let split = amortized_capex(v, 0.0, 0.0, lv, ld, days).unwrap()
                + amortized_capex(0.0, t, 0.0, lv, ld, days).unwrap()
                + amortized_capex(0.0, 0.0, d, lv, ld, days).unwrap();
            prop_assert!((split - base).abs() <= 1e-9 * (1.0 + base));
        }
    }
}
