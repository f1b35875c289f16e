//! Flat `key = value` solution files with `#` comments.
//!
//! ```text
//! format = fleetmix-solution/1
//! instance = rural_sparse-n6-s3
//! instance_hash = 5f1c...
//! method = bnb
//! objective = 1181.0420513368557
//! route = 4 1 : 3 1 6 2
//! ```
//!
//! `route` lines give the one-based type and slot index, then the stops.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{objective, Route, Solution};
use crate::model::{Instance, Slot};

pub const SOLUTION_FORMAT: &str = "fleetmix-solution/1";

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub solution: Solution,
    pub instance_name: Option<String>,
    pub instance_hash: Option<String>,
    pub method: Option<String>,
    pub objective: Option<f64>,
}

pub fn solution_to_text(solution: &Solution, instance: &Instance, hash: &str, method: &str) -> Result<String> {
    let mut out = String::from("# fleetmix solution\n");
    out += &format!("format = {SOLUTION_FORMAT}\n");
    out += &format!("instance = {}\n", instance.name());
    out += &format!("instance_hash = {hash}\n");
    out += &format!("method = {method}\n");
    out += &format!("objective = {}\n", objective(solution, instance)?);
    for r in &solution.routes {
        let stops: Vec<String> = r.stops.iter().map(|j| j.to_string()).collect();
        out += &format!("route = {} {} : {}\n", r.slot.vtype + 1, r.slot.index + 1, stops.join(" "));
    }
    if !solution.unserved.is_empty() {
        let u: Vec<String> = solution.unserved.iter().map(|j| j.to_string()).collect();
        out += &format!("unserved = {}\n", u.join(" "));
    }
    Ok(out)
}

fn line_err(line: usize, message: impl Into<String>) -> Error {
    Error::Schema { path: format!("line {line}"), message: message.into() }
}

fn numbers(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace().map(|t| t.parse().map_err(|_| line_err(line, format!("bad integer `{t}`")))).collect()
}

pub fn parse_solution(text: &str) -> Result<SolutionFile> {
    let mut file = SolutionFile {
        solution: Solution::default(),
        instance_name: None,
        instance_hash: None,
        method: None,
        objective: None,
    };
    let mut format_seen = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| line_err(line, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "format" => {
                if value != SOLUTION_FORMAT {
                    return Err(line_err(line, format!("unsupported format `{value}`")));
                }
                format_seen = true;
            }
            "instance" => file.instance_name = Some(value.to_string()),
            "instance_hash" => file.instance_hash = Some(value.to_string()),
            "method" => file.method = Some(value.to_string()),
            "objective" => {
                file.objective = Some(value.parse().map_err(|_| line_err(line, format!("bad number `{value}`")))?)
            }
            "route" => {
                let (head, stops) = value.split_once(':').ok_or_else(|| line_err(line, "route needs `type slot : stops`"))?;
                let head = numbers(line, head)?;
                let [tau, v] = head[..] else {
                    return Err(line_err(line, "route needs a type and a slot index"));
                };
                if tau == 0 || v == 0 {
                    return Err(line_err(line, "type and slot indices are one-based"));
                }
                file.solution.routes.push(Route::new(Slot::new(tau - 1, v - 1), numbers(line, stops)?));
            }
            "unserved" => file.solution.unserved = numbers(line, value)?,
            other => return Err(line_err(line, format!("unknown key `{other}`"))),
        }
    }
    if !format_seen {
        return Err(line_err(0, "missing `format` line"));
    }
    Ok(file)
}

pub fn save_solution(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_solution(path: impl AsRef<Path>) -> Result<SolutionFile> {
    let path = path.as_ref();
    parse_solution(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{solve_bnb, SearchLimits};
    use crate::io::{generate, instance_hash, GeneratorConfig, Profile};

    #[test]
    fn round_trip_reproduces_objective() {
        let inst = generate(&GeneratorConfig::new(Profile::RuralSparse, 5, 2)).unwrap();
        let r = solve_bnb(&inst, &SearchLimits::default()).unwrap();
        let hash = instance_hash(&inst);
        let text = solution_to_text(&r.solution, &inst, &hash, "bnb").unwrap();
        let back = parse_solution(&text).unwrap();
        assert_eq!(back.solution.routes, r.solution.routes);
        assert_eq!(back.instance_hash.as_deref(), Some(hash.as_str()));
        let stored = back.objective.unwrap();
        let again = objective(&back.solution, &inst).unwrap();
        assert!((stored - again).abs() <= 1e-9 * stored.abs());
    }

    #[test]
    fn malformed_lines() {
        assert!(parse_solution("route = 1 1 : 2\n").is_err());
        let base = format!("format = {SOLUTION_FORMAT}\n");
        assert!(parse_solution(&(base.clone() + "route = 0 1 : 2\n")).is_err());
        assert!(parse_solution(&(base.clone() + "route = 1 : 2\n")).is_err());
        assert!(parse_solution(&(base.clone() + "colour = red\n")).is_err());
        assert!(parse_solution(&(base + "objective = 12 # comment\n")).unwrap().objective == Some(12.0));
    }
}
