//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use fleetmix::eval::{objective, price, utilization, Aggregates, CostTable, EvalPolicy};
use fleetmix::exact::{solve_bnb, solve_brute, SearchLimits};
use fleetmix::heuristic::{solve, SearchParams};
use fleetmix::io::{generate, oracle_instance, GeneratorConfig, Profile};
use fleetmix::milp::{emit, emit_with, import_solution, parse_assignment, parse_model, BigMPolicy, ExportOptions, ModelSummary};
use fleetmix::model::{catalog, CostCoefficients, Instance};

enum Verdict {
    Pass(String),
    Fail(String),
    Skipped(String),
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

/// Prices reference aggregates and compares the cost rows.
fn table_v(agg: Aggregates, rows: [(&str, f64); 5], total: f64, clients: usize) -> (bool, String, CostTable) {
    let policy = EvalPolicy::default();
    let cb = price(&agg, &CostCoefficients::default(), &policy);
    let table = CostTable::new(&cb, agg.energy_kwh, clients, &policy);
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, want) in rows {
        let got = table.rows.iter().find(|r| r.label == label).map_or(f64::NAN, |r| r.value);
        ok &= close(got, want, 0.02);
        parts.push(format!("{label}={got:.3}/{want}"));
    }
    ok &= close(table.total, total, 1.0);
    parts.push(format!("total={:.2}/{total}", table.total));
    (ok, parts.join(" "), table)
}

fn c1() -> Verdict {
    let t = Instant::now();
    let agg = Aggregates {
        travel_hours: 13.9,
        service_hours: 1.38,
        wait_hours: 17.1287,
        fuel_gallons: 82.7,
        energy_kwh: 988.0,
        capex_base: 258.64 + 668.59,
        vehicles: 2,
        clients_served: 25,
        ..Default::default()
    };
    let rows = [
        ("Travel Time Cost", 417.00),
        ("Service Time Labor", 41.40),
        ("Waiting Time Labor", 513.86),
        ("Fuel Cost", 314.26),
        ("Energy Transfer Cost", 98.80),
    ];
    let (ok, detail, _) = table_v(agg, rows, 2335.35, 25);
    let el = t.elapsed();
    check(ok && el < Duration::from_secs(1), format!("{detail} in {el:?}"))
}

fn c2() -> Verdict {
    // Service hours carry one more digit than the rest; 0.62 h would not
    // give the 18.71 labor row.
    let agg = Aggregates {
        travel_hours: 4.59,
        service_hours: 0.6237,
        wait_hours: 18.41,
        fuel_gallons: 23.13,
        energy_kwh: 311.88,
        capex_base: 367.12,
        vehicles: 1,
        clients_served: 6,
        ..Default::default()
    };
    let rows = [
        ("Travel Time Cost", 137.69),
        ("Service Time Labor", 18.71),
        ("Waiting Time Labor", 552.30),
        ("Fuel Cost", 87.90),
        ("Energy Transfer Cost", 31.19),
    ];
    let (mut ok, detail, table) = table_v(agg, rows, 1205.83, 6);
    let per_kwh = table.cost_per_kwh.unwrap_or(f64::NAN);
    let per_client = table.cost_per_client.unwrap_or(f64::NAN);
    ok &= close(per_kwh, 3.86, 0.01) && close(per_client, 200.97, 0.01);
    check(ok, format!("{detail} usd/kwh={per_kwh:.4}/3.86 usd/client={per_client:.3}/200.97"))
}

fn c3() -> Verdict {
    let cases = [(209.0, 300.0, 69.8), (778.3, 1000.0, 77.8), (311.8, 500.0, 62.3)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (e, b, want) in cases {
        let got = 100.0 * utilization(e, b);
        ok &= close(got, want, 0.2);
        parts.push(format!("{got:.2}%/{want}%"));
    }
    check(ok, parts.join(" "))
}

struct Sweep {
    feasible: usize,
    mismatches: Vec<String>,
    gaps: Vec<f64>,
    below_oracle: Vec<String>,
    exact_time: Duration,
    slowest_alns: Duration,
}

/// One pass over the oracle sweep feeds criteria 4 and 5.
fn sweep() -> Sweep {
    let mut s = Sweep {
        feasible: 0,
        mismatches: Vec::new(),
        gaps: Vec::new(),
        below_oracle: Vec::new(),
        exact_time: Duration::ZERO,
        slowest_alns: Duration::ZERO,
    };
    let lim = SearchLimits::default();
    for seed in 0..200u64 {
        let n = 2 + (seed as usize % 5);
        let inst = oracle_instance(n, seed);
        let t = Instant::now();
        let (a, b) = (solve_brute(&inst, &lim), solve_bnb(&inst, &lim));
        s.exact_time += t.elapsed();
        match (a, b) {
            (Ok(a), Ok(b)) => {
                s.feasible += 1;
                if a.cost != b.cost || a.solution != b.solution {
                    s.mismatches.push(format!("seed {seed}: brute {} bnb {}", a.cost, b.cost));
                }
                let params = SearchParams { seed, time_limit: Some(Duration::from_secs(2)), ..SearchParams::default() };
                let t = Instant::now();
                let h = solve(&inst, &params).expect("heuristic finds a solution when one exists");
                s.slowest_alns = s.slowest_alns.max(t.elapsed());
                let c = objective(&h, &inst).unwrap();
                if c < a.cost * (1.0 - 1e-9) {
                    s.below_oracle.push(format!("seed {seed}: {c} < {}", a.cost));
                }
                s.gaps.push(c / a.cost - 1.0);
            }
            (Err(_), Err(_)) => {}
            (a, b) => s.mismatches.push(format!("seed {seed}: brute ok={} bnb ok={}", a.is_ok(), b.is_ok())),
        }
    }
    s.gaps.sort_by(f64::total_cmp);
    s
}

fn c4(s: &Sweep) -> Verdict {
    let ok = s.mismatches.is_empty() && s.exact_time < Duration::from_secs(300);
    check(
        ok,
        format!(
            "200 instances, {} feasible, {} mismatches {:?}, exact solvers {:.2?}",
            s.feasible,
            s.mismatches.len(),
            s.mismatches.iter().take(3).collect::<Vec<_>>(),
            s.exact_time
        ),
    )
}

fn c5(s: &Sweep) -> Verdict {
    let median = s.gaps.get(s.gaps.len() / 2).copied().unwrap_or(f64::NAN);
    let max = s.gaps.last().copied().unwrap_or(f64::NAN);
    let ok = s.below_oracle.is_empty() && median <= 0.02 && max <= 0.10 && s.slowest_alns <= Duration::from_millis(2500);
    check(
        ok,
        format!(
            "{} instances, median gap {:.4}%, max gap {:.4}%, below oracle {}, slowest {:.2?}",
            s.gaps.len(),
            100.0 * median,
            100.0 * max,
            s.below_oracle.len(),
            s.slowest_alns
        ),
    )
}

fn c6() -> Verdict {
    let lim = SearchLimits::default();
    let (mut eligible, mut single, mut seed) = (0, 0, 0u64);
    while eligible < 50 && seed < 1000 {
        let inst = generate(&GeneratorConfig::new(Profile::RuralSparse, 6, seed)).unwrap();
        seed += 1;
        let demand: f64 = inst.clients().iter().map(|c| c.energy_demand).sum();
        let covered = (0..inst.types().len()).any(|t| inst.vtype(t).max_slots > 0 && inst.battery_budget(t) >= demand);
        let Ok(res) = solve_bnb(&inst, &lim) else { continue };
        if !covered {
            continue;
        }
        eligible += 1;
        single += usize::from(res.solution.routes.len() == 1);
    }
    let (mut urban, mut multi) = (0, 0);
    for seed in 0..50u64 {
        let inst = generate(&GeneratorConfig::new(Profile::UrbanDense, 25, seed)).unwrap();
        let params = SearchParams { seed, time_limit: Some(Duration::from_secs(2)), ..SearchParams::default() };
        if let Ok(sol) = solve(&inst, &params) {
            urban += 1;
            multi += usize::from(sol.routes.len() >= 2);
        }
    }
    let rural_share = single as f64 / eligible.max(1) as f64;
    let urban_share = multi as f64 / 50.0;
    check(
        eligible == 50 && rural_share >= 0.9 && urban_share >= 0.9,
        format!(
            "rural n=6: {single}/{eligible} single-vehicle ({:.0}%); urban n=25: {multi}/50 multi-vehicle ({:.0}%, {urban} solved)",
            100.0 * rural_share,
            100.0 * urban_share
        ),
    )
}

/// Random instance for the structural audit: client count, slot pool,
/// minimum fleet rows and fleet cap all vary.
fn audit_instance(i: u64) -> Instance {
    let n = (i % 7) as usize;
    let base = oracle_instance(n, 1000 + i);
    if i.is_multiple_of(3) {
        let mut types = catalog::default_catalog();
        for (tau, t) in types.iter_mut().enumerate() {
            t.max_slots = 1 + (tau + i as usize) % 3;
            t.min_slots = usize::from((tau as u64 + i) % 4 == 0);
        }
        base.with_types(types).with_total_fleet_cap(5 + (i as usize % 4))
    } else {
        base
    }
}

fn c7() -> Verdict {
    let mut bad = Vec::new();
    for i in 0..50u64 {
        let inst = audit_instance(i);
        for mode in 0..2 {
            let big_m = if mode == 0 { BigMPolicy::paper_default(&inst) } else { BigMPolicy::tightened(&inst) };
            let opts = ExportOptions { big_m, symmetry_breaking: !i.is_multiple_of(2) };
            let text = emit_with(&inst, &opts).unwrap();
            if text != emit_with(&inst, &opts).unwrap() {
                bad.push(format!("instance {i}: emits differ"));
            }
            match parse_model(&text) {
                Ok(s) if s == ModelSummary::expected(&inst, &opts) => {}
                Ok(s) => bad.push(format!("instance {i}: counts {s:?}")),
                Err(e) => bad.push(format!("instance {i}: {e}")),
            }
        }
    }
    check(bad.is_empty(), format!("50 instances x 2 big-M modes, {} failures {:?}", bad.len(), bad.iter().take(2).collect::<Vec<_>>()))
}

fn highs_available() -> bool {
    Command::new("python3").args(["-c", "import highspy"]).output().is_ok_and(|o| o.status.success())
}

fn c8() -> Verdict {
    if !highs_available() {
        return Verdict::Skipped("no external MILP solver (python3 with highspy) found".into());
    }
    let script = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scripts/highs_solve.py");
    let dir = tempfile::tempdir().unwrap();
    let (lp, sol) = (dir.path().join("m.lp"), dir.path().join("m.sol"));
    let lim = SearchLimits::default();
    let (mut matched, mut inflated, mut tried) = (0, 0, 0);
    let mut bad = Vec::new();
    for seed in 0..40u64 {
        let n = 2 + (seed as usize % 4);
        let inst = oracle_instance(n, seed);
        let Ok(best) = solve_brute(&inst, &lim) else { continue };
        tried += 1;
        std::fs::write(&lp, emit(&inst, &BigMPolicy::paper_default(&inst)).unwrap()).unwrap();
        let out = Command::new("python3").arg(script).arg(&lp).arg(&sol).arg("120").output().unwrap();
        if !out.status.success() {
            bad.push(format!("seed {seed}: solver: {}", String::from_utf8_lossy(&out.stderr).trim()));
            continue;
        }
        let values = parse_assignment(&std::fs::read_to_string(&sol).unwrap()).unwrap();
        match import_solution(&inst, &values) {
            Ok(rep) if (rep.reevaluated_objective - best.cost).abs() <= 1e-4 * best.cost => matched += 1,
            Ok(rep) if rep.arrival_inflation => {
                inflated += 1;
                println!(
                    "      seed {seed}: arrival inflation, MILP {:.4} vs earliest-arrival {:.4} (oracle {:.4}), waits {:.3} h booked vs {:.3} h",
                    rep.imported_objective, rep.reevaluated_objective, best.cost, rep.imported_wait_hours, rep.earliest_wait_hours
                );
            }
            Ok(rep) => bad.push(format!("seed {seed}: imported {} vs oracle {}", rep.reevaluated_objective, best.cost)),
            Err(e) => bad.push(format!("seed {seed}: {e}")),
        }
    }
    check(
        bad.is_empty() && tried > 0,
        format!("HiGHS on {tried} instances (n<=5): {matched} match oracle, {inflated} arrival inflation detected, {} unexplained {:?}", bad.len(), bad),
    )
}

fn main() {
    let mut failed = 0;
    let mut line = |id: &str, title: &str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        let el = t.elapsed();
        let (tag, detail) = match v {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Verdict::Skipped(d) => ("SKIPPED", d),
        };
        println!("[{tag}] {id} {title}: {detail} ({el:.2?})");
    };
    line("C1", "urban cost table from reference aggregates", &mut c1);
    line("C2", "rural cost table and unit ratios", &mut c2);
    line("C3", "utilization of reference deliveries", &mut c3);
    let s = sweep();
    line("C4", "branch-and-bound equals enumeration", &mut || c4(&s));
    line("C5", "heuristic gap to the oracle", &mut || c5(&s));
    line("C6", "fleet structure by geography", &mut c6);
    line("C7", "MILP structural audit", &mut c7);
    line("C8", "MILP semantic audit (external solver)", &mut c8);
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
