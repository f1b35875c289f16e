//! Arc-based MILP export in CPLEX LP format, and import of external solver
//! assignments.
//!
//! Variable names (`k` is the one-based slot number from
//! [`Instance::slot_number`], `tau` and `v` are one-based, node 0 is the
//! depot):
//!
//! | name      | meaning                                   |
//! |-----------|-------------------------------------------|
//! | `x_i_j_k` | slot `k` drives arc `i -> j` (binary)     |
//! | `y_tau_v` | slot `v` of type `tau` is deployed        |
//! | `A_i_k`   | arrival of slot `k` at node `i`           |
//! | `R_k`     | return of slot `k` to the depot           |
//! | `W_j`     | waiting time at client `j`                |
//! | `L_j`     | lateness at client `j`                    |
//! | `u_j_k`   | visit order of client `j` on slot `k`     |
//!
//! `R_k` carries the time-propagation rows that end at the depot, since
//! `A_0_k` is pinned to the start time.

mod import;
pub mod lp;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Instance;

pub use import::{import_solution, parse_assignment, solution_to_assignment, ImportReport};
pub use lp::{LpModel, Row, Sense};

/// Largest magnitude written as an exact integer-valued float.
const MAX_EXACT: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BigMMode {
    /// One global time constant on every conditional row.
    PaperDefault,
    /// Per-row constants valid for every earliest-arrival schedule.
    Tightened,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BigMPolicy {
    pub mtz_m: f64,
    pub time_m: f64,
    pub mode: BigMMode,
}

impl BigMPolicy {
    /// `mtz_m = |J|`, `time_m = horizon + max service + max travel`.
    pub fn paper_default(instance: &Instance) -> Self {
        BigMPolicy { mtz_m: instance.n_clients() as f64, time_m: global_time_m(instance), mode: BigMMode::PaperDefault }
    }

    pub fn tightened(instance: &Instance) -> Self {
        BigMPolicy { mode: BigMMode::Tightened, ..Self::paper_default(instance) }
    }

    fn check(&self, instance: &Instance) -> Result<()> {
        for m in [self.mtz_m, self.time_m] {
            if !m.is_finite() || m.abs() >= MAX_EXACT {
                return Err(Error::BigMOverflow(m));
            }
        }
        if self.mtz_m < instance.n_clients() as f64 {
            return Err(Error::DegenerateInput(format!(
                "mtz_m = {} is below the client count {}",
                self.mtz_m,
                instance.n_clients()
            )));
        }
        let floor = global_time_m(instance);
        if self.time_m < floor {
            return Err(Error::DegenerateInput(format!("time_m = {} is below the safe bound {floor}", self.time_m)));
        }
        Ok(())
    }
}

fn global_time_m(instance: &Instance) -> f64 {
    let nn = instance.n_nodes();
    let mut max_s: f64 = 0.0;
    for j in 1..nn {
        for (tau, t) in instance.types().iter().enumerate() {
            if t.max_slots > 0 {
                max_s = max_s.max(instance.service_time(j, tau));
            }
        }
    }
    let mut max_t: f64 = 0.0;
    for i in 0..nn {
        for j in 0..nn {
            max_t = max_t.max(instance.travel_time(i, j));
        }
    }
    instance.coeffs().horizon + max_s + max_t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExportOptions {
    pub big_m: BigMPolicy,
    /// Adds `y_tau_v <= y_tau_(v-1)` rows.
    pub symmetry_breaking: bool,
}

impl ExportOptions {
    pub fn new(big_m: BigMPolicy) -> Self {
        ExportOptions { big_m, symmetry_breaking: false }
    }
}

struct Names;

impl Names {
    fn x(i: usize, j: usize, k: usize) -> String {
        format!("x_{i}_{j}_{k}")
    }
    fn y(tau: usize, v: usize) -> String {
        format!("y_{}_{}", tau + 1, v + 1)
    }
    fn a(i: usize, k: usize) -> String {
        format!("A_{i}_{k}")
    }
    fn r(k: usize) -> String {
        format!("R_{k}")
    }
    fn w(j: usize) -> String {
        format!("W_{j}")
    }
    fn l(j: usize) -> String {
        format!("L_{j}")
    }
    fn u(j: usize, k: usize) -> String {
        format!("u_{j}_{k}")
    }
}

/// Coefficient of `x_i_j_k` in the objective for a slot of type `tau`.
fn arc_cost(instance: &Instance, i: usize, j: usize, tau: usize) -> f64 {
    let c = instance.coeffs();
    let vt = instance.vtype(tau);
    let t = instance.travel_time(i, j);
    c.alpha * (t + instance.service_time(j, tau))
        + c.beta * instance.distance(i, j) * vt.fuel_rate
        + c.zeta * vt.opex_hr * t
}

/// Objective terms in emission order.
fn objective_terms(instance: &Instance) -> Vec<(f64, String)> {
    let c = instance.coeffs();
    let nn = instance.n_nodes();
    let mut obj = Vec::new();
    for (k, slot) in instance.slots().enumerate().map(|(k, s)| (k + 1, s)) {
        for i in 0..nn {
            for j in (0..nn).filter(|&j| j != i) {
                obj.push((arc_cost(instance, i, j, slot.vtype), Names::x(i, j, k)));
            }
        }
    }
    for j in 1..nn {
        obj.push((c.lambda_w, Names::w(j)));
    }
    for j in 1..nn {
        obj.push((c.delta, Names::l(j)));
    }
    for slot in instance.slots() {
        obj.push((c.epsilon * instance.vtype(slot.vtype).capex_day, Names::y(slot.vtype, slot.index)));
    }
    obj
}

/// Builds the model. Rows are grouped by family in a fixed order, so equal
/// inputs give equal models.
pub fn build_model(instance: &Instance, options: &ExportOptions) -> Result<LpModel> {
    let big_m = &options.big_m;
    big_m.check(instance)?;
    let c = instance.coeffs();
    let nn = instance.n_nodes();
    let nj = instance.n_clients();
    let slots: Vec<_> = instance.slots().enumerate().map(|(k, s)| (k + 1, s)).collect();
    let clients = 1..nn;
    let arcs: Vec<(usize, usize)> = (0..nn).flat_map(|i| (0..nn).filter(move |&j| j != i).map(move |j| (i, j))).collect();

    let row = |name: String, terms: Vec<(f64, String)>, sense: Sense, rhs: f64| Row { name, terms, sense, rhs };
    let mut rows = Vec::new();

    for j in clients.clone() {
        let terms = slots
            .iter()
            .flat_map(|&(k, _)| (0..nn).filter(move |&i| i != j).map(move |i| (1.0, Names::x(i, j, k))))
            .collect();
        rows.push(row(format!("cover_{j}"), terms, Sense::Eq, 1.0));
    }
    for &(k, s) in &slots {
        let y = Names::y(s.vtype, s.index);
        let mut out: Vec<_> = clients.clone().map(|j| (1.0, Names::x(0, j, k))).collect();
        out.push((-1.0, y.clone()));
        rows.push(row(format!("deploy_out_{k}"), out, Sense::Eq, 0.0));
        let mut inn: Vec<_> = clients.clone().map(|i| (1.0, Names::x(i, 0, k))).collect();
        inn.push((-1.0, y));
        rows.push(row(format!("deploy_in_{k}"), inn, Sense::Eq, 0.0));
    }
    for &(k, _) in &slots {
        for j in clients.clone() {
            let mut terms: Vec<_> = (0..nn).filter(|&i| i != j).map(|i| (1.0, Names::x(i, j, k))).collect();
            terms.extend((0..nn).filter(|&i| i != j).map(|i| (-1.0, Names::x(j, i, k))));
            rows.push(row(format!("flow_{j}_{k}"), terms, Sense::Eq, 0.0));
        }
    }
    let m = big_m.mtz_m;
    for &(k, _) in &slots {
        for &(i, j) in arcs.iter().filter(|&&(i, j)| i != 0 && j != 0) {
            let terms = vec![(1.0, Names::u(i, k)), (-1.0, Names::u(j, k)), (m, Names::x(i, j, k))];
            rows.push(row(format!("mtz_{i}_{j}_{k}"), terms, Sense::Le, m - 1.0));
        }
    }
    for &(k, s) in &slots {
        for &(i, j) in &arcs {
            let terms = vec![(1.0, Names::x(i, j, k)), (-1.0, Names::y(s.vtype, s.index))];
            rows.push(row(format!("couple_{i}_{j}_{k}"), terms, Sense::Le, 0.0));
        }
    }
    for (tau, t) in instance.types().iter().enumerate().filter(|(_, t)| t.max_slots > 0) {
        let terms = (0..t.max_slots).map(|v| (1.0, Names::y(tau, v))).collect();
        rows.push(row(format!("fleet_min_{}", tau + 1), terms, Sense::Ge, t.min_slots as f64));
    }
    let all_y: Vec<_> = slots.iter().map(|&(_, s)| (1.0, Names::y(s.vtype, s.index))).collect();
    if !all_y.is_empty() {
        rows.push(row("fleet_max".into(), all_y, Sense::Le, instance.total_fleet_cap() as f64));
    }

    let horizon = c.horizon;
    for &(k, s) in &slots {
        let tau = s.vtype;
        for &(i, j) in &arcs {
            let t = instance.travel_time(i, j);
            let s_i = instance.service_time(i, tau);
            let m = match big_m.mode {
                BigMMode::PaperDefault => big_m.time_m,
                // Largest left side with the arc unused: a visited node's
                // service starts no later than horizon - s_i, an unvisited
                // one's A + W sits at its window opening.
                BigMMode::Tightened if i == 0 => c.t_start + t,
                BigMMode::Tightened => {
                    horizon.max(instance.clients()[i - 1].window_open + s_i) + t
                }
            };
            let target = if j == 0 { Names::r(k) } else { Names::a(j, k) };
            let mut terms = vec![(1.0, target), (-1.0, Names::a(i, k))];
            if i != 0 {
                terms.push((-1.0, Names::w(i)));
            }
            terms.push((-m, Names::x(i, j, k)));
            rows.push(row(format!("time_{i}_{j}_{k}"), terms, Sense::Ge, s_i + t - m));
        }
    }
    for &(k, _) in &slots {
        for j in clients.clone() {
            let open = instance.clients()[j - 1].window_open;
            rows.push(row(format!("win_open_{j}_{k}"), vec![(1.0, Names::a(j, k)), (1.0, Names::w(j))], Sense::Ge, open));
        }
    }
    for &(k, s) in &slots {
        for j in clients.clone() {
            let cl = &instance.clients()[j - 1];
            let s_j = instance.service_time(j, s.vtype);
            let m = match big_m.mode {
                BigMMode::PaperDefault => big_m.time_m,
                BigMMode::Tightened => (cl.window_open + s_j - cl.window_close).max(0.0),
            };
            let mut terms = vec![(1.0, Names::a(j, k)), (1.0, Names::w(j)), (-1.0, Names::l(j))];
            terms.extend((0..nn).filter(|&i| i != j).map(|i| (m, Names::x(i, j, k))));
            rows.push(row(format!("win_close_{j}_{k}"), terms, Sense::Le, cl.window_close - s_j + m));
        }
    }
    for &(k, s) in &slots {
        let y = Names::y(s.vtype, s.index);
        let mut batt = Vec::new();
        for j in clients.clone() {
            batt.extend((0..nn).filter(|&i| i != j).map(|i| (instance.energy(j), Names::x(i, j, k))));
        }
        batt.push((-instance.battery_budget(s.vtype), y.clone()));
        rows.push(row(format!("budget_batt_{k}"), batt, Sense::Le, 0.0));
        let phi = instance.vtype(s.vtype).fuel_rate;
        let mut fuel: Vec<_> = arcs.iter().map(|&(i, j)| (instance.distance(i, j) * phi, Names::x(i, j, k))).collect();
        fuel.push((-instance.fuel_budget(s.vtype), y));
        rows.push(row(format!("budget_fuel_{k}"), fuel, Sense::Le, 0.0));
    }
    if options.symmetry_breaking {
        for &(_, s) in slots.iter().filter(|(_, s)| s.index > 0) {
            let terms = vec![(1.0, Names::y(s.vtype, s.index)), (-1.0, Names::y(s.vtype, s.index - 1))];
            rows.push(row(format!("sym_{}_{}", s.vtype + 1, s.index + 1), terms, Sense::Le, 0.0));
        }
    }

    let mut bounds = BTreeMap::new();
    for &(k, _) in &slots {
        bounds.insert(Names::a(0, k), (c.t_start, c.t_start));
        for j in clients.clone() {
            bounds.insert(Names::a(j, k), (0.0, horizon));
            bounds.insert(Names::u(j, k), (1.0, nj as f64));
        }
        bounds.insert(Names::r(k), (0.0, horizon));
    }
    for j in clients.clone() {
        bounds.insert(Names::w(j), (0.0, f64::INFINITY));
        bounds.insert(Names::l(j), (0.0, f64::INFINITY));
    }

    let mut binaries = Vec::new();
    for &(k, _) in &slots {
        binaries.extend(arcs.iter().map(|&(i, j)| Names::x(i, j, k)));
    }
    binaries.extend(slots.iter().map(|&(_, s)| Names::y(s.vtype, s.index)));
    let generals = slots.iter().flat_map(|&(k, _)| clients.clone().map(move |j| Names::u(j, k))).collect();

    let model = LpModel {
        header: vec![
            format!("instance: {}", instance.name()),
            format!(
                "big-M: mode={} mtz_m={} time_m={}",
                match big_m.mode {
                    BigMMode::PaperDefault => "paper",
                    BigMMode::Tightened => "tight",
                },
                big_m.mtz_m,
                big_m.time_m
            ),
        ],
        objective: objective_terms(instance),
        rows,
        bounds,
        binaries,
        generals,
    };
    check_finite(&model)?;
    Ok(model)
}

fn check_finite(model: &LpModel) -> Result<()> {
    let coefs = model
        .objective
        .iter()
        .map(|t| t.0)
        .chain(model.rows.iter().flat_map(|r| r.terms.iter().map(|t| t.0).chain([r.rhs])));
    for v in coefs {
        if !v.is_finite() || v.abs() >= MAX_EXACT {
            return Err(Error::BigMOverflow(v));
        }
    }
    Ok(())
}

/// LP text of the model under the given big-M policy, without symmetry
/// breaking.
pub fn emit(instance: &Instance, policy: &BigMPolicy) -> Result<String> {
    emit_with(instance, &ExportOptions::new(*policy))
}

pub fn emit_with(instance: &Instance, options: &ExportOptions) -> Result<String> {
    Ok(build_model(instance, options)?.to_lp_string())
}

/// Variable and row counts per name family. The family of a name is the
/// name with its trailing `_<number>` groups removed (`win_open_3_2` is
/// `win_open`, `x_0_1_1` is `x`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ModelSummary {
    pub variables: BTreeMap<String, usize>,
    pub constraints: BTreeMap<String, usize>,
    pub binaries: usize,
    pub generals: usize,
}

pub fn family(name: &str) -> &str {
    let mut end = name.len();
    while let Some(p) = name[..end].rfind('_') {
        let tail = &name[p + 1..end];
        if tail.is_empty() || !tail.bytes().all(|b| b.is_ascii_digit()) {
            break;
        }
        end = p;
    }
    &name[..end]
}

impl ModelSummary {
    pub fn of(model: &LpModel) -> Self {
        let mut s = ModelSummary { binaries: model.binaries.len(), generals: model.generals.len(), ..Default::default() };
        for v in model.variables() {
            *s.variables.entry(family(v).to_string()).or_default() += 1;
        }
        for r in &model.rows {
            *s.constraints.entry(family(&r.name).to_string()).or_default() += 1;
        }
        s
    }

    /// Closed-form counts for `instance`. Families with zero members are
    /// omitted.
    pub fn expected(instance: &Instance, options: &ExportOptions) -> Self {
        let nj = instance.n_clients();
        let nn = nj + 1;
        let nk = instance.slot_count();
        let arcs = nn * (nn - 1);
        let deployed_types = instance.types().iter().filter(|t| t.max_slots > 0).count();
        let sym: usize = instance.types().iter().map(|t| t.max_slots.saturating_sub(1)).sum();
        let vars = [
            ("x", nk * arcs),
            ("y", nk),
            ("A", nk * nn),
            ("R", nk),
            ("W", nj),
            ("L", nj),
            ("u", nk * nj),
        ];
        let rows = [
            ("cover", nj),
            ("deploy_out", nk),
            ("deploy_in", nk),
            ("flow", nj * nk),
            ("mtz", nk * nj * nj.saturating_sub(1)),
            ("couple", nk * arcs),
            ("fleet_min", deployed_types),
            ("fleet_max", usize::from(nk > 0)),
            ("time", nk * arcs),
            ("win_open", nj * nk),
            ("win_close", nj * nk),
            ("budget_batt", nk),
            ("budget_fuel", nk),
            ("sym", if options.symmetry_breaking { sym } else { 0 }),
        ];
        let keep = |it: &[(&str, usize)]| it.iter().filter(|e| e.1 > 0).map(|&(n, c)| (n.to_string(), c)).collect();
        ModelSummary { variables: keep(&vars), constraints: keep(&rows), binaries: nk * arcs + nk, generals: nk * nj }
    }
}

/// Reads LP text and counts its variable and row families.
pub fn parse_model(text: &str) -> Result<ModelSummary> {
    Ok(ModelSummary::of(&LpModel::parse(text)?))
}
