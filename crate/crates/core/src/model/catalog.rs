//! Default vehicle catalog and objective coefficients.

use super::{CostCoefficients, VehicleType};

pub const DEFAULT_TOTAL_FLEET_CAP: usize = 36;

/// The five mobile charger classes, Standard through Mega.
pub fn default_catalog() -> Vec<VehicleType> {
    //   name        kW     kWh    gal   gal/mi  USD/day  USD/h  max
    let rows: [(&str, f64, f64, f64, f64, f64, f64, usize); 5] = [
        ("Standard", 50.0, 80.0, 40.0, 0.10, 65.75, 1.0, 10),
        ("Medium", 200.0, 160.0, 60.0, 0.12, 147.95, 1.2, 10),
        ("High", 350.0, 300.0, 80.0, 0.15, 258.64, 1.5, 8),
        ("Ultra", 500.0, 500.0, 100.0, 0.18, 367.12, 1.8, 5),
        ("Mega", 1000.0, 1000.0, 150.0, 0.25, 668.59, 2.5, 3),
    ];
    rows.iter()
        .map(|&(name, p_max, battery, fuel_cap, fuel_rate, capex_day, opex_hr, max_slots)| {
            VehicleType {
                name: name.to_string(),
                p_max,
                battery,
                fuel_cap,
                fuel_rate,
                capex_day,
                opex_hr,
                max_slots,
                min_slots: 0,
            }
        })
        .collect()
}

impl Default for CostCoefficients {
    fn default() -> Self {
        CostCoefficients {
            alpha: 30.0,
            lambda_w: 30.0,
            beta: 3.80,
            delta: 100.0,
            epsilon: 1.0,
            zeta: 1.0,
            gamma: 0.10,
            speed: 30.0,
            sigma_batt: 0.9,
            sigma_fuel: 0.9,
            t_start: 0.0,
            horizon: 24.0,
        }
    }
}
