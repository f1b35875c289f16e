//! Report CSVs. Each file starts with a `# instance_hash=` comment line.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::eval::{ReportBundle, TimelineRow};

fn csv_text(hash: &str, header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input");
    format!("# instance_hash={hash}\n{body}")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn fleet_csv(bundle: &ReportBundle, hash: &str) -> String {
    let mut rows: Vec<Vec<String>> = bundle
        .fleet
        .rows
        .iter()
        .map(|r| vec![r.vehicle_type.clone(), r.count.to_string(), opt(r.utilization.map(|u| u * 100.0))])
        .collect();
    rows.push(vec!["Total fleet size".into(), bundle.fleet.total_fleet_size.to_string(), String::new()]);
    rows.push(vec!["Amortized CAPEX (USD/day)".into(), bundle.fleet.amortized_capex.to_string(), String::new()]);
    csv_text(hash, &["vehicle_type", "count", "utilization_pct"], rows)
}

pub fn performance_csv(bundle: &ReportBundle, hash: &str) -> String {
    let rows = bundle.performance.iter().map(|r| vec![r.label.clone(), r.value.to_string()]).collect();
    csv_text(hash, &["metric", "value"], rows)
}

pub fn costs_csv(bundle: &ReportBundle, hash: &str) -> String {
    let c = &bundle.costs;
    let mut rows: Vec<Vec<String>> = c.rows.iter().map(|r| vec![r.label.clone(), r.value.to_string()]).collect();
    rows.push(vec!["Total Daily Cost".into(), c.total.to_string()]);
    rows.push(vec!["Cost per kWh Delivered".into(), opt(c.cost_per_kwh)]);
    rows.push(vec!["Cost per Client Served".into(), opt(c.cost_per_client)]);
    csv_text(hash, &["component", "usd"], rows)
}

pub fn timeline_csv(rows: &[TimelineRow], hash: &str) -> String {
    let rows = rows
        .iter()
        .map(|r| {
            vec![
                r.vehicle.clone(),
                r.client.to_string(),
                r.arrival.to_string(),
                r.wait.to_string(),
                r.service_start.to_string(),
                r.service_end.to_string(),
                r.lateness.to_string(),
            ]
        })
        .collect();
    csv_text(hash, &["vehicle", "client", "arrival", "wait", "service_start", "service_end", "lateness"], rows)
}

fn write(dir: &Path, name: String, text: String) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `<prefix>fleet.csv`, `<prefix>performance.csv` and
/// `<prefix>costs.csv` into `dir`.
pub fn write_report_csvs(dir: &Path, prefix: &str, bundle: &ReportBundle, hash: &str) -> Result<Vec<PathBuf>> {
    Ok(vec![
        write(dir, format!("{prefix}fleet.csv"), fleet_csv(bundle, hash))?,
        write(dir, format!("{prefix}performance.csv"), performance_csv(bundle, hash))?,
        write(dir, format!("{prefix}costs.csv"), costs_csv(bundle, hash))?,
    ])
}

pub fn write_timeline_csv(dir: &Path, prefix: &str, bundle: &ReportBundle, hash: &str) -> Result<PathBuf> {
    write(dir, format!("{prefix}timeline.csv"), timeline_csv(&bundle.timeline, hash))
}

/// The whole bundle as JSON, with the instance hash alongside.
pub fn report_json(bundle: &ReportBundle, hash: &str) -> String {
    let v = serde_json::json!({ "instance_hash": hash, "report": bundle });
    serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
}
