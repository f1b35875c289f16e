use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use fleetmix::eval::{report, validate_solution_with, EvalPolicy, Solution};
use fleetmix::exact::{solve_bnb, solve_brute, SearchLimits};
use fleetmix::heuristic::{solve, SearchParams};
use fleetmix::io::{
    generate, instance_hash, load_instance, load_solution, report_json, save_instance, save_solution,
    solution_to_text, write_report_csvs, write_timeline_csv, GeneratorConfig, Profile, WindowStyle,
};
use fleetmix::milp::{emit_with, import_solution, parse_assignment, BigMPolicy, ExportOptions};
use fleetmix::model::{validate_instance, Instance};
use fleetmix::Error;

#[derive(Parser)]
#[command(name = "fleetmix", version, about = "Fleet size and mix routing for mobile fast-charging vehicles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic instance.
    Gen(GenArgs),
    /// Check an instance; exits 1 if any issue is found.
    Validate { instance: PathBuf },
    /// Solve an instance and write the solution and report tables.
    Solve(SolveArgs),
    /// Write the MILP model in LP format.
    ExportLp(ExportArgs),
    /// Rebuild a solution from an external solver's `name = value` output.
    ImportSol(ImportArgs),
    /// Cost, fleet, performance and timeline tables for a solution file.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    UrbanDense,
    RuralSparse,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    NarrowOverlapping,
    WideOffset,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    profile: ProfileArg,
    #[arg(long)]
    clients: usize,
    /// Service area in square miles; defaults to the profile's.
    #[arg(long)]
    area: Option<f64>,
    /// Window style; defaults to the profile's.
    #[arg(long, value_enum)]
    windows: Option<WindowArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Brute,
    Bnb,
    Alns,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Bnb => "bnb",
            Method::Alns => "alns",
        }
    }
}

#[derive(clap::Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "alns")]
    method: Method,
    /// Heuristic seed; drawn and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// Exact solvers: largest client count accepted.
    #[arg(long)]
    max_clients: Option<usize>,
    /// Exact solvers: most vehicles a solution may deploy.
    #[arg(long)]
    max_active_slots: Option<usize>,
    /// Output directory for the solution and report files.
    #[arg(long, short, default_value = ".")]
    out_dir: PathBuf,
    /// File name prefix for everything written.
    #[arg(long, default_value = "")]
    prefix: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum BigMArg {
    Paper,
    Tight,
}

#[derive(clap::Args)]
struct ExportArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "paper")]
    bigm: BigMArg,
    /// Add y_tau_v <= y_tau_(v-1) rows.
    #[arg(long)]
    symmetry_breaking: bool,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ImportArgs {
    instance: PathBuf,
    assignment: PathBuf,
    /// Write the rebuilt routes as a solution file.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Print the import report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct ReportArgs {
    instance: PathBuf,
    solution: PathBuf,
    #[arg(long, short, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, default_value = "")]
    prefix: String,
    /// Also write the whole report as JSON.
    #[arg(long)]
    json: bool,
    /// Count operating cost in the reported total.
    #[arg(long)]
    opex_in_total: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Validate { instance } => validate(&instance),
        Command::Solve(a) => run_solve(a),
        Command::ExportLp(a) => export(a),
        Command::ImportSol(a) => import(a),
        Command::Report(a) => run_report(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let msg = e.to_string().replace('\\', "\\\\").replace('"', "\\\"");
            eprintln!("error: kind={} message=\"{msg}\"", e.kind());
            ExitCode::FAILURE
        }
    }
}

type Outcome = Result<ExitCode, Error>;

fn seed_or_draw(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random();
        println!("seed = {s}");
        s
    })
}

fn gen(a: GenArgs) -> Outcome {
    let profile = match a.profile {
        ProfileArg::UrbanDense => Profile::UrbanDense,
        ProfileArg::RuralSparse => Profile::RuralSparse,
    };
    let mut cfg = GeneratorConfig::new(profile, a.clients, seed_or_draw(a.seed));
    if let Some(area) = a.area {
        cfg.area = area;
    }
    if let Some(w) = a.windows {
        cfg.window_style = match w {
            WindowArg::NarrowOverlapping => WindowStyle::NarrowOverlapping,
            WindowArg::WideOffset => WindowStyle::WideOffset,
        };
    }
    let mut inst = generate(&cfg)?;
    if let Some(name) = a.name {
        inst = inst.with_name(name);
    }
    for p in save_instance(&a.out, &inst)? {
        println!("wrote {}", p.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(path: &Path) -> Outcome {
    let inst = load_instance(path)?;
    let issues = validate_instance(&inst);
    for i in &issues {
        println!("{i}");
    }
    if issues.is_empty() {
        println!("ok: {} clients, {} vehicle slots", inst.n_clients(), inst.slot_count());
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}

fn run_solve(a: SolveArgs) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let time_limit = match a.time_limit {
        Some(t) if !(t.is_finite() && t >= 0.0) => {
            return Err(Error::DegenerateInput(format!("--time-limit must be a non-negative number of seconds, got {t}")))
        }
        t => t.map(Duration::from_secs_f64),
    };
    let note;
    let solution = match a.method {
        Method::Brute | Method::Bnb => {
            let mut lim = SearchLimits { time_limit, ..SearchLimits::default() };
            if let Some(m) = a.max_clients {
                lim.max_clients = m;
            }
            if let Some(m) = a.max_active_slots {
                lim.max_active_slots = m;
            }
            let res = if a.method == Method::Brute { solve_brute(&inst, &lim)? } else { solve_bnb(&inst, &lim)? };
            note = format!("# proved = {}\n# nodes = {}\n", res.proved, res.nodes);
            println!("proved = {}", res.proved);
            res.solution
        }
        Method::Alns => {
            let seed = seed_or_draw(a.seed);
            let mut p = SearchParams { seed, time_limit, threads: a.threads, ..SearchParams::default() };
            if let Some(i) = a.iterations {
                p.iterations = i;
            }
            if let Some(r) = a.restarts {
                p.restart_count = r;
            }
            note = format!("# seed = {seed}\n");
            solve(&inst, &p)?
        }
    };
    let hash = instance_hash(&inst);
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    let sol_path = a.out_dir.join(format!("{}solution.txt", a.prefix));
    save_solution(&sol_path, &(solution_to_text(&solution, &inst, &hash, a.method.name())? + &note))?;
    println!("wrote {}", sol_path.display());
    let bundle = report(&solution, &inst, &EvalPolicy::default())?;
    for p in write_report_csvs(&a.out_dir, &a.prefix, &bundle, &hash)? {
        println!("wrote {}", p.display());
    }
    print_summary(&inst, &solution, &bundle.breakdown);
    Ok(ExitCode::SUCCESS)
}

fn print_summary(inst: &Instance, solution: &Solution, cost: &fleetmix::eval::CostBreakdown) {
    println!("objective = {}", cost.objective_total);
    println!("reported_total = {}", cost.reported_total);
    for r in &solution.routes {
        let stops: Vec<String> = r.stops.iter().map(|j| j.to_string()).collect();
        println!("route {} : {}", fleetmix::eval::vehicle_label(inst, r.slot), stops.join(" "));
    }
    if !solution.unserved.is_empty() {
        println!("unserved = {:?}", solution.unserved);
    }
}

fn export(a: ExportArgs) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let big_m = match a.bigm {
        BigMArg::Paper => BigMPolicy::paper_default(&inst),
        BigMArg::Tight => BigMPolicy::tightened(&inst),
    };
    let opts = ExportOptions { big_m, symmetry_breaking: a.symmetry_breaking };
    let text = format!("\\ instance_hash: {}\n{}", instance_hash(&inst), emit_with(&inst, &opts)?);
    match a.out {
        Some(p) => {
            std::fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
            println!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn import(a: ImportArgs) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let text = std::fs::read_to_string(&a.assignment)
        .map_err(|e| Error::io(&a.assignment, e))?;
    let rep = import_solution(&inst, &parse_assignment(&text)?)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&rep).expect("report serializes"));
    } else {
        println!("imported_objective = {}", rep.imported_objective);
        println!("reevaluated_objective = {}", rep.reevaluated_objective);
        println!("difference = {}", rep.difference);
        println!("imported_wait_hours = {}", rep.imported_wait_hours);
        println!("earliest_wait_hours = {}", rep.earliest_wait_hours);
        println!("arrival_inflation = {}", rep.arrival_inflation);
        for v in &rep.violations {
            println!("violation: {v}");
        }
    }
    if let Some(out) = a.out {
        let body = solution_to_text(&rep.solution, &inst, &instance_hash(&inst), "milp-import")?;
        save_solution(&out, &body)?;
        println!("wrote {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_report(a: ReportArgs) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let file = load_solution(&a.solution)?;
    let hash = instance_hash(&inst);
    if let Some(h) = &file.instance_hash {
        if *h != hash {
            eprintln!("warning: solution was written for instance hash {h}, not {hash}");
        }
    }
    let policy = EvalPolicy { opex_in_reported: a.opex_in_total, ..EvalPolicy::default() };
    for v in validate_solution_with(&file.solution, &inst, &policy) {
        eprintln!("violation: {v}");
    }
    let bundle = report(&file.solution, &inst, &policy)?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    let mut written = write_report_csvs(&a.out_dir, &a.prefix, &bundle, &hash)?;
    written.push(write_timeline_csv(&a.out_dir, &a.prefix, &bundle, &hash)?);
    if a.json {
        let p = a.out_dir.join(format!("{}report.json", a.prefix));
        std::fs::write(&p, report_json(&bundle, &hash)).map_err(|e| Error::io(&p, e))?;
        written.push(p);
    }
    for p in written {
        println!("wrote {}", p.display());
    }
    for row in &bundle.costs.rows {
        println!("{:<40} {:>12.2}", row.label, row.value);
    }
    println!("{:<40} {:>12.2}", "Total", bundle.costs.total);
    Ok(ExitCode::SUCCESS)
}
