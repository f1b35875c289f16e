//! Instance JSON documents.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::matrix::{read_matrix_csv, write_matrix_csv};
use crate::error::{Error, Result};
use crate::model::{
    catalog, demand_from_battery, Client, CostCoefficients, DistanceSource, Instance, Location, VehicleType,
    DEFAULT_ROAD_FACTOR,
};

pub const INSTANCE_SCHEMA: &str = "fleetmix-instance/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    name: String,
    #[serde(default = "default_units")]
    units: String,
    #[serde(default = "default_horizon")]
    horizon: f64,
    #[serde(default)]
    t_start: f64,
    /// Straight-line inflation; ignored when a matrix is referenced.
    #[serde(default = "default_road_factor")]
    road_factor: f64,
}

fn default_units() -> String {
    "mi".into()
}
fn default_horizon() -> f64 {
    CostCoefficients::default().horizon
}
fn default_road_factor() -> f64 {
    DEFAULT_ROAD_FACTOR
}
fn default_fleet_cap() -> usize {
    catalog::DEFAULT_TOTAL_FLEET_CAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Coeffs {
    alpha: f64,
    lambda_w: f64,
    beta: f64,
    delta: f64,
    epsilon: f64,
    zeta: f64,
    gamma: f64,
    speed: f64,
    sigma_batt: f64,
    sigma_fuel: f64,
}

impl Default for Coeffs {
    fn default() -> Self {
        Coeffs::from(&CostCoefficients::default())
    }
}

impl From<&CostCoefficients> for Coeffs {
    fn from(c: &CostCoefficients) -> Self {
        Coeffs {
            alpha: c.alpha,
            lambda_w: c.lambda_w,
            beta: c.beta,
            delta: c.delta,
            epsilon: c.epsilon,
            zeta: c.zeta,
            gamma: c.gamma,
            speed: c.speed,
            sigma_batt: c.sigma_batt,
            sigma_fuel: c.sigma_fuel,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Point {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
}

impl Point {
    fn location(&self, path: &str) -> Result<Location> {
        match (self.lat, self.lon, self.x, self.y) {
            (Some(lat), Some(lon), None, None) => Ok(Location::LatLon { lat, lon }),
            (None, None, Some(x), Some(y)) => Ok(Location::Planar { x, y }),
            _ => Err(Error::Schema {
                path: path.into(),
                message: "expected either lat and lon, or x and y".into(),
            }),
        }
    }

    fn of(loc: Location) -> Point {
        match loc {
            Location::LatLon { lat, lon } => Point { lat: Some(lat), lon: Some(lon), ..Default::default() },
            Location::Planar { x, y } => Point { x: Some(x), y: Some(y), ..Default::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClientDoc {
    id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
    #[serde(rename = "B_j", default, skip_serializing_if = "Option::is_none")]
    battery: Option<f64>,
    #[serde(rename = "E_j", default, skip_serializing_if = "Option::is_none")]
    energy: Option<f64>,
    rho: f64,
    window: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    schema: String,
    meta: Meta,
    #[serde(default)]
    coeffs: Coeffs,
    #[serde(default = "catalog::default_catalog")]
    types: Vec<VehicleType>,
    #[serde(default = "default_fleet_cap")]
    total_fleet_cap: usize,
    depot: Point,
    clients: Vec<ClientDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix_ref: Option<String>,
}

fn schema_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

fn parse_doc(text: &str) -> Result<InstanceDoc> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: InstanceDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema_err(path, e.into_inner().to_string())
    })?;
    if doc.schema != INSTANCE_SCHEMA {
        return Err(schema_err("schema", format!("unsupported schema `{}`, expected `{INSTANCE_SCHEMA}`", doc.schema)));
    }
    if doc.meta.units != "mi" {
        return Err(schema_err("meta.units", format!("unsupported units `{}`, only `mi` is accepted", doc.meta.units)));
    }
    Ok(doc)
}

fn doc_to_instance(doc: InstanceDoc, matrix: Option<crate::model::DistanceMatrix>) -> Result<Instance> {
    let depot = doc.depot.location("depot")?;
    let mut clients = Vec::with_capacity(doc.clients.len());
    for (i, c) in doc.clients.iter().enumerate() {
        let path = format!("clients[{i}]");
        let location = Point { lat: c.lat, lon: c.lon, x: c.x, y: c.y }.location(&path)?;
        let [open, close] = c.window;
        let client = match (c.battery, c.energy) {
            (Some(b), None) => Client::from_battery(c.id, location, b, c.rho, open, close),
            (None, Some(e)) => Client::new(c.id, location, e, c.rho, open, close),
            _ => return Err(schema_err(path, "exactly one of B_j or E_j is required")),
        };
        clients.push(client);
    }
    let k = doc.coeffs;
    let coeffs = CostCoefficients {
        alpha: k.alpha,
        lambda_w: k.lambda_w,
        beta: k.beta,
        delta: k.delta,
        epsilon: k.epsilon,
        zeta: k.zeta,
        gamma: k.gamma,
        speed: k.speed,
        sigma_batt: k.sigma_batt,
        sigma_fuel: k.sigma_fuel,
        t_start: doc.meta.t_start,
        horizon: doc.meta.horizon,
    };
    match matrix {
        Some(m) => Instance::with_matrix(doc.meta.name, depot, clients, m, doc.types, doc.total_fleet_cap, coeffs),
        None => Instance::from_coordinates(
            doc.meta.name,
            depot,
            clients,
            doc.types,
            doc.total_fleet_cap,
            coeffs,
            doc.meta.road_factor,
        ),
    }
}

fn instance_to_doc(instance: &Instance, matrix_ref: Option<String>) -> InstanceDoc {
    let c = instance.coeffs();
    let road_factor = match instance.distance_source() {
        DistanceSource::Coordinates { road_factor } => road_factor,
        DistanceSource::Matrix => DEFAULT_ROAD_FACTOR,
    };
    InstanceDoc {
        schema: INSTANCE_SCHEMA.into(),
        meta: Meta {
            name: instance.name().into(),
            units: default_units(),
            horizon: c.horizon,
            t_start: c.t_start,
            road_factor,
        },
        coeffs: Coeffs::from(c),
        types: instance.types().to_vec(),
        total_fleet_cap: instance.total_fleet_cap(),
        depot: Point::of(instance.depot()),
        clients: instance
            .clients()
            .iter()
            .map(|cl| {
                // Keep B_j only when it reproduces the stored demand.
                let battery = cl.equipment_battery.filter(|&b| demand_from_battery(b) == cl.energy_demand);
                let at = Point::of(cl.location);
                ClientDoc {
                    id: cl.id,
                    lat: at.lat,
                    lon: at.lon,
                    x: at.x,
                    y: at.y,
                    battery,
                    energy: battery.is_none().then_some(cl.energy_demand),
                    rho: cl.max_accept_power,
                    window: [cl.window_open, cl.window_close],
                }
            })
            .collect(),
        matrix_ref,
    }
}

/// Parses an instance document whose matrix, if any, is resolved relative
/// to `base_dir`.
pub fn instance_from_json(text: &str, base_dir: &Path) -> Result<Instance> {
    let doc = parse_doc(text)?;
    let matrix = match &doc.matrix_ref {
        Some(r) => {
            let path = base_dir.join(r);
            let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
            Some(read_matrix_csv(file)?)
        }
        None => None,
    };
    doc_to_instance(doc, matrix)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    instance_from_json(&text, path.parent().unwrap_or(Path::new(".")))
}

/// Pretty JSON for coordinate-based instances. Matrix-based instances need
/// [`save_instance`], which also writes the matrix file.
pub fn instance_to_json(instance: &Instance, matrix_ref: Option<&str>) -> String {
    let doc = instance_to_doc(instance, matrix_ref.map(str::to_string));
    serde_json::to_string_pretty(&doc).expect("document serializes") + "\n"
}

/// Writes the instance; a matrix-based instance also gets
/// `<stem>.matrix.csv` beside it. Returns every file written.
pub fn save_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<Vec<PathBuf>> {
    let path = path.as_ref();
    let mut written = Vec::new();
    let matrix_ref = match instance.distance_source() {
        DistanceSource::Matrix => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
            let name = format!("{stem}.matrix.csv");
            let mpath = path.with_file_name(&name);
            let file = fs::File::create(&mpath).map_err(|e| Error::io(&mpath, e))?;
            write_matrix_csv(instance.distance_matrix(), file)?;
            written.push(mpath);
            Some(name)
        }
        DistanceSource::Coordinates { .. } => None,
    };
    fs::write(path, instance_to_json(instance, matrix_ref.as_deref())).map_err(|e| Error::io(path, e))?;
    written.insert(0, path.to_path_buf());
    Ok(written)
}

/// SHA-256 over the instance content (document plus any matrix), hex.
pub fn instance_hash(instance: &Instance) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(&instance_to_doc(instance, None)).expect("document serializes"));
    if instance.distance_source() == DistanceSource::Matrix {
        let mut buf = Vec::new();
        write_matrix_csv(instance.distance_matrix(), &mut buf).expect("writing to memory");
        h.update(b"\n");
        h.update(&buf);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DistanceMatrix;

    const MINIMAL: &str = r#"{
        "schema": "fleetmix-instance/1",
        "meta": {"name": "mini", "horizon": 24, "t_start": 0},
        "depot": {"lat": 34.05, "lon": -118.25},
        "clients": [
            {"id": 1, "lat": 34.10, "lon": -118.30, "B_j": 400, "rho": 150, "window": [8, 12]},
            {"id": 2, "lat": 34.00, "lon": -118.20, "E_j": 75.5, "rho": 50, "window": [9, 17]}
        ]
    }"#;

    #[test]
    fn battery_implies_clamped_demand() {
        let inst = instance_from_json(MINIMAL, Path::new(".")).unwrap();
        assert_eq!(inst.client(1).unwrap().energy_demand, 100.0);
        assert_eq!(inst.client(2).unwrap().energy_demand, 75.5);
        assert_eq!(inst.types(), &catalog::default_catalog()[..]);
        assert_eq!(inst.coeffs(), &CostCoefficients::default());
    }

    #[test]
    fn json_round_trip_is_identity() {
        let inst = instance_from_json(MINIMAL, Path::new(".")).unwrap();
        let again = instance_from_json(&instance_to_json(&inst, None), Path::new(".")).unwrap();
        assert_eq!(inst, again);
        assert_eq!(instance_hash(&inst), instance_hash(&again));
        assert_eq!(instance_hash(&inst).len(), 64);
    }

    #[test]
    fn matrix_round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let inst = instance_from_json(MINIMAL, Path::new(".")).unwrap();
        let m = DistanceMatrix::from_rows(vec![vec![0.0, 3.0, 4.5], vec![3.0, 0.0, 2.0], vec![4.5, 2.0, 0.0]]).unwrap();
        let inst = inst.with_distance(m).unwrap();
        let path = dir.path().join("net.json");
        let files = save_instance(&path, &inst).unwrap();
        assert_eq!(files.len(), 2);
        assert_eq!(load_instance(&path).unwrap(), inst);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let missing_rho = MINIMAL.replace(r#""rho": 150, "#, "");
        match instance_from_json(&missing_rho, Path::new(".")) {
            Err(Error::Schema { path, message }) => {
                assert!(path.starts_with("clients[0]") || path.starts_with("clients"), "{path}");
                assert!(message.contains("rho"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let both = MINIMAL.replace(r#""E_j": 75.5"#, r#""E_j": 75.5, "B_j": 300"#);
        assert!(matches!(instance_from_json(&both, Path::new(".")), Err(Error::Schema { path, .. }) if path == "clients[1]"));
        let typo = MINIMAL.replace(r#""horizon": 24"#, r#""horizon": "late""#);
        assert!(matches!(instance_from_json(&typo, Path::new(".")), Err(Error::Schema { path, .. }) if path == "meta.horizon"));
        let schema = MINIMAL.replace("fleetmix-instance/1", "fleetmix-instance/9");
        assert!(matches!(instance_from_json(&schema, Path::new(".")), Err(Error::Schema { .. })));
    }
}
