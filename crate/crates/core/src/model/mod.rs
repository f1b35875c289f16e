//! Problem data: clients, vehicle types, cost coefficients and the
//! immutable [`Instance`] tying them to a distance network.

pub mod catalog;
mod matrix;
pub mod params;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use matrix::DistanceMatrix;
pub use params::{amortized_capex, demand_from_battery, effective_power, service_time, travel_time};
pub use validate::{validate_instance, InstanceIssue, IssueKind};

/// Mean Earth radius in statute miles.
const EARTH_RADIUS_MI: f64 = 3958.7613;

/// Road-network distance inflation applied over straight-line distance when
/// no matrix is supplied.
pub const DEFAULT_ROAD_FACTOR: f64 = 1.3;

/// Geographic position of a node, either WGS84 degrees or planar miles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Location {
    LatLon { lat: f64, lon: f64 },
    Planar { x: f64, y: f64 },
}

impl Location {
    /// Straight-line distance in miles. Returns `None` when the two
    /// locations use different coordinate systems.
    pub fn straight_line_miles(&self, other: &Location) -> Option<f64> {
        match (*self, *other) {
            (Location::Planar { x: x1, y: y1 }, Location::Planar { x: x2, y: y2 }) => {
                Some((x1 - x2).hypot(y1 - y2))
            }
            (Location::LatLon { lat: a1, lon: o1 }, Location::LatLon { lat: a2, lon: o2 }) => {
                let (p1, p2) = (a1.to_radians(), a2.to_radians());
                let dp = p2 - p1;
                let dl = (o2 - o1).to_radians();
                let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
                Some(2.0 * EARTH_RADIUS_MI * h.sqrt().min(1.0).asin())
            }
            _ => None,
        }
    }
}

/// A piece of equipment requiring an off-hour top-up.
#[derive(Debug, Clone, PartialEq)]
pub struct Client {
    /// Node index, 1..=n.
    pub id: usize,
    pub location: Location,
    /// Energy to deliver, kWh.
    pub energy_demand: f64,
    /// Equipment battery size, kWh, when known.
    pub equipment_battery: Option<f64>,
    /// Maximum power the equipment accepts, kW.
    pub max_accept_power: f64,
    /// Earliest service start, hours from midnight.
    pub window_open: f64,
    /// Latest service completion before lateness accrues, hours from midnight.
    pub window_close: f64,
}

impl Client {
    pub fn new(
        id: usize,
        location: Location,
        energy_demand: f64,
        max_accept_power: f64,
        window_open: f64,
        window_close: f64,
    ) -> Self {
        Client {
            id,
            location,
            energy_demand,
            equipment_battery: None,
            max_accept_power,
            window_open,
            window_close,
        }
    }

    /// Client whose demand is derived from its battery via
    /// [`demand_from_battery`].
    pub fn from_battery(
        id: usize,
        location: Location,
        battery_kwh: f64,
        max_accept_power: f64,
        window_open: f64,
        window_close: f64,
    ) -> Self {
        Client {
            equipment_battery: Some(battery_kwh),
            ..Client::new(
                id,
                location,
                demand_from_battery(battery_kwh),
                max_accept_power,
                window_open,
                window_close,
            )
        }
    }
}

/// One mobile charger class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleType {
    pub name: String,
    /// Charger rating, kW.
    pub p_max: f64,
    /// Onboard battery, kWh.
    pub battery: f64,
    /// Fuel tank, gallons.
    pub fuel_cap: f64,
    /// Fuel consumption, gallons per mile.
    pub fuel_rate: f64,
    /// Daily amortized capital cost, USD/day.
    pub capex_day: f64,
    /// Operating cost while driving, USD/hour.
    pub opex_hr: f64,
    pub max_slots: usize,
    #[serde(default)]
    pub min_slots: usize,
}

/// Objective weights and global operating parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostCoefficients {
    /// Labor while driving and charging, USD/h.
    pub alpha: f64,
    /// Labor while idle, USD/h.
    pub lambda_w: f64,
    /// Diesel price, USD/gal.
    pub beta: f64,
    /// Lateness penalty, USD/h.
    pub delta: f64,
    pub epsilon: f64,
    pub zeta: f64,
    /// Electricity purchase price, USD/kWh.
    pub gamma: f64,
    /// Nominal travel speed, mph.
    pub speed: f64,
    pub sigma_batt: f64,
    pub sigma_fuel: f64,
    /// Depot departure time, hours from midnight.
    pub t_start: f64,
    /// Latest depot return, hours from midnight.
    pub horizon: f64,
}

/// A potential vehicle: the `index`-th slot of vehicle type `vtype`
/// (both zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub vtype: usize,
    pub index: usize,
}

impl Slot {
    pub fn new(vtype: usize, index: usize) -> Self {
        Slot { vtype, index }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.vtype + 1, self.index + 1)
    }
}

/// How the distance matrix of an instance was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceSource {
    /// Straight-line distance times a road factor.
    Coordinates { road_factor: f64 },
    /// Supplied explicitly (e.g. a road-network matrix file).
    Matrix,
}

/// Immutable problem description.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    depot: Location,
    clients: Vec<Client>,
    distance: DistanceMatrix,
    travel_time: DistanceMatrix,
    distance_source: DistanceSource,
    types: Vec<VehicleType>,
    total_fleet_cap: usize,
    coeffs: CostCoefficients,
}

impl Instance {
    /// Builds an instance whose distances are straight-line miles between
    /// coordinates scaled by `road_factor`.
    pub fn from_coordinates(
        name: impl Into<String>,
        depot: Location,
        clients: Vec<Client>,
        types: Vec<VehicleType>,
        total_fleet_cap: usize,
        coeffs: CostCoefficients,
        road_factor: f64,
    ) -> Result<Self> {
        let distance = coordinate_matrix(&depot, &clients, road_factor)?;
        Self::build(
            name.into(),
            depot,
            clients,
            distance,
            DistanceSource::Coordinates { road_factor },
            types,
            total_fleet_cap,
            coeffs,
        )
    }

    /// Builds an instance from an explicit distance matrix over depot and
    /// clients (node 0 is the depot).
    pub fn with_matrix(
        name: impl Into<String>,
        depot: Location,
        clients: Vec<Client>,
        distance: DistanceMatrix,
        types: Vec<VehicleType>,
        total_fleet_cap: usize,
        coeffs: CostCoefficients,
    ) -> Result<Self> {
        Self::build(
            name.into(),
            depot,
            clients,
            distance,
            DistanceSource::Matrix,
            types,
            total_fleet_cap,
            coeffs,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        name: String,
        depot: Location,
        clients: Vec<Client>,
        distance: DistanceMatrix,
        distance_source: DistanceSource,
        types: Vec<VehicleType>,
        total_fleet_cap: usize,
        coeffs: CostCoefficients,
    ) -> Result<Self> {
        if let Some((pos, c)) = clients.iter().enumerate().find(|(i, c)| c.id != i + 1) {
            return Err(Error::DegenerateInput(format!(
                "client at position {pos} has id {}, expected ids 1..=n in order",
                c.id
            )));
        }
        if distance.size() != clients.len() + 1 {
            return Err(Error::DegenerateInput(format!(
                "distance matrix is {0}x{0}, expected {1}x{1}",
                distance.size(),
                clients.len() + 1
            )));
        }
        let travel_time = distance.try_map(|d| travel_time(d, coeffs.speed))?;
        Ok(Instance {
            name,
            depot,
            clients,
            distance,
            travel_time,
            distance_source,
            types,
            total_fleet_cap,
            coeffs,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn depot(&self) -> Location {
        self.depot
    }

    pub fn clients(&self) -> &[Client] {
        &self.clients
    }

    pub fn n_clients(&self) -> usize {
        self.clients.len()
    }

    /// Number of nodes including the depot.
    pub fn n_nodes(&self) -> usize {
        self.clients.len() + 1
    }

    pub fn client(&self, id: usize) -> Option<&Client> {
        id.checked_sub(1).and_then(|i| self.clients.get(i))
    }

    pub fn types(&self) -> &[VehicleType] {
        &self.types
    }

    pub fn vtype(&self, tau: usize) -> &VehicleType {
        &self.types[tau]
    }

    pub fn total_fleet_cap(&self) -> usize {
        self.total_fleet_cap
    }

    pub fn coeffs(&self) -> &CostCoefficients {
        &self.coeffs
    }

    pub fn distance_matrix(&self) -> &DistanceMatrix {
        &self.distance
    }

    pub fn distance_source(&self) -> DistanceSource {
        self.distance_source
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distance.get(i, j)
    }

    #[inline]
    pub fn travel_time(&self, i: usize, j: usize) -> f64 {
        self.travel_time.get(i, j)
    }

    /// Service duration of client `j` (node index) by type `tau`. Node 0
    /// (the depot) has zero service time.
    #[inline]
    pub fn service_time(&self, j: usize, tau: usize) -> f64 {
        if j == 0 {
            return 0.0;
        }
        let c = &self.clients[j - 1];
        c.energy_demand / effective_power(c, &self.types[tau])
    }

    #[inline]
    pub fn energy(&self, j: usize) -> f64 {
        self.clients[j - 1].energy_demand
    }

    /// Usable energy per route for type `tau`.
    pub fn battery_budget(&self, tau: usize) -> f64 {
        self.types[tau].battery * self.coeffs.sigma_batt
    }

    /// Usable fuel per route for type `tau`.
    pub fn fuel_budget(&self, tau: usize) -> f64 {
        self.types[tau].fuel_cap * self.coeffs.sigma_fuel
    }

    /// All vehicle slots ordered by type, then by index within the type.
    pub fn slots(&self) -> impl Iterator<Item = Slot> + '_ {
        self.types
            .iter()
            .enumerate()
            .flat_map(|(tau, t)| (0..t.max_slots).map(move |v| Slot::new(tau, v)))
    }

    pub fn slot_count(&self) -> usize {
        self.types.iter().map(|t| t.max_slots).sum()
    }

    /// One-based position of `slot` in [`Instance::slots`], or `None` if
    /// the slot does not exist.
    pub fn slot_number(&self, slot: Slot) -> Option<usize> {
        let t = self.types.get(slot.vtype)?;
        if slot.index >= t.max_slots {
            return None;
        }
        let before: usize = self.types[..slot.vtype].iter().map(|t| t.max_slots).sum();
        Some(before + slot.index + 1)
    }

    /// Inverse of [`Instance::slot_number`].
    pub fn slot_by_number(&self, k: usize) -> Option<Slot> {
        let mut rem = k.checked_sub(1)?;
        for (tau, t) in self.types.iter().enumerate() {
            if rem < t.max_slots {
                return Some(Slot::new(tau, rem));
            }
            rem -= t.max_slots;
        }
        None
    }

    pub fn with_name(&self, name: impl Into<String>) -> Self {
        Instance {
            name: name.into(),
            ..self.clone()
        }
    }

    /// Same network, different client records. For coordinate-based
    /// instances distances are recomputed; for matrix-based instances the
    /// client count must not change.
    pub fn with_clients(&self, clients: Vec<Client>) -> Result<Self> {
        let distance = match self.distance_source {
            DistanceSource::Coordinates { road_factor } => {
                coordinate_matrix(&self.depot, &clients, road_factor)?
            }
            DistanceSource::Matrix => self.distance.clone(),
        };
        Self::build(
            self.name.clone(),
            self.depot,
            clients,
            distance,
            self.distance_source,
            self.types.clone(),
            self.total_fleet_cap,
            self.coeffs.clone(),
        )
    }

    pub fn with_types(&self, types: Vec<VehicleType>) -> Self {
        Instance {
            types,
            ..self.clone()
        }
    }

    pub fn with_total_fleet_cap(&self, total_fleet_cap: usize) -> Self {
        Instance {
            total_fleet_cap,
            ..self.clone()
        }
    }

    /// Same instance with new coefficients; travel times follow the new speed.
    pub fn with_coeffs(&self, coeffs: CostCoefficients) -> Result<Self> {
        Self::build(
            self.name.clone(),
            self.depot,
            self.clients.clone(),
            self.distance.clone(),
            self.distance_source,
            self.types.clone(),
            self.total_fleet_cap,
            coeffs,
        )
    }

    /// Same instance over an explicit distance matrix.
    pub fn with_distance(&self, distance: DistanceMatrix) -> Result<Self> {
        Self::build(
            self.name.clone(),
            self.depot,
            self.clients.clone(),
            distance,
            DistanceSource::Matrix,
            self.types.clone(),
            self.total_fleet_cap,
            self.coeffs.clone(),
        )
    }
}

fn coordinate_matrix(depot: &Location, clients: &[Client], road_factor: f64) -> Result<DistanceMatrix> {
    if !(road_factor > 0.0) {
        return Err(Error::DegenerateInput(format!("road factor {road_factor}")));
    }
    let locs: Vec<Location> = std::iter::once(*depot)
        .chain(clients.iter().map(|c| c.location))
        .collect();
    let n = locs.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = locs[i].straight_line_miles(&locs[j]).ok_or_else(|| {
                Error::DegenerateInput("depot and clients mix lat/lon and planar coordinates".into())
            })? * road_factor;
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    DistanceMatrix::new(n, data)
}
