use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use symext::hierarchy::{
    self, ppt_test, robustness, run_built, ExtensionMode, ExtensionTest, Level, Outcome, TestSettings, ROBUSTNESS_WIDTH,
};
use symext::io::{load_state_source, ResultRecord, StateFile, WitnessFile, WitnessSummary};
use symext::sdp::{min_t_augment, write_dump, SolverSettings};
use symext::witness::{extract_witness, verify_sos, SEESAW_SEED, SEESAW_STARTS};
use symext::zoo;

/// Environment variable holding the sweep worker count.
const WORKERS_ENV: &str = "SYMEXT_WORKERS";

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_NOT_DETECTED: u8 = 3;

#[derive(Parser)]
#[command(name = "symext", version, about = "Symmetric-extension entanglement tests for bipartite states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Tolerances {
    /// Largest optimal shift t* still read as "extension found".
    #[arg(long, default_value_t = hierarchy::T_TOL)]
    t_tol: f64,
    /// Interior-point convergence tolerance.
    #[arg(long, default_value_t = SolverSettings::default().tol)]
    solver_tol: f64,
    #[arg(long, default_value_t = SolverSettings::default().max_iter)]
    max_iter: usize,
}

impl Tolerances {
    fn settings(&self) -> TestSettings {
        let solver = SolverSettings { tol: self.solver_tol, max_iter: self.max_iter, ..SolverSettings::default() };
        TestSettings { t_tol: self.t_tol, solver }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the PPT test and the requested hierarchy levels on one state.
    Test {
        /// State file (JSON) or zoo reference such as `zoo:rho_alpha?alpha=3.5`.
        state: String,
        /// Level `k,l`; repeat for several levels.
        #[arg(long = "level", default_values_t = [Level::new(1, 1), Level::new(2, 1)])]
        levels: Vec<Level>,
        /// `swap` (level 2,1 only) or `sym`.
        #[arg(long)]
        mode: Option<ExtensionMode>,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Test a one-parameter family over a grid.
    Sweep {
        /// rho_alpha, isotropic-<d>, horodecki-3x3 or horodecki-2x4.
        family: String,
        #[arg(long, default_value = "2,1")]
        level: Level,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        /// Also write the rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Extract and verify an entanglement witness.
    Witness {
        state: String,
        #[arg(long, default_value = "2,1")]
        level: Level,
        #[arg(long)]
        mode: Option<ExtensionMode>,
        #[arg(long)]
        out: PathBuf,
        /// Random starts of the product-state search.
        #[arg(long, default_value_t = SEESAW_STARTS)]
        trials: usize,
        #[arg(long, default_value_t = SEESAW_SEED)]
        seed: u64,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// White-noise robustness p* at one level.
    Robustness {
        state: String,
        #[arg(long, default_value = "1,1")]
        level: Level,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Write a state as a JSON state file.
    ExportState {
        state: String,
        /// Output path; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the SDP of one level in the plain-text dump format.
    Dump {
        state: String,
        #[arg(long, default_value = "2,1")]
        level: Level,
        #[arg(long)]
        mode: Option<ExtensionMode>,
        /// Dump the min-t form instead of the feasibility problem.
        #[arg(long)]
        augmented: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

type CliResult = Result<u8, String>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    let result = match cli.command {
        Command::Test { state, levels, mode, tol } => cmd_test(&state, &levels, mode, &tol.settings()),
        Command::Sweep { family, level, from, to, step, csv, tol } => {
            cmd_sweep(&family, level, from, to, step, csv, &tol.settings())
        }
        Command::Witness { state, level, mode, out, trials, seed, tol } => {
            cmd_witness(&state, level, mode, &out, trials, seed, &tol.settings())
        }
        Command::Robustness { state, level, tol } => cmd_robustness(&state, level, &tol.settings()),
        Command::ExportState { state, out } => cmd_export(&state, out),
        Command::Dump { state, level, mode, augmented, out } => cmd_dump(&state, level, mode, augmented, out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn print_json(value: &impl Serialize) -> Result<(), String> {
    println!("{}", serde_json::to_string(value).map_err(err)?);
    Ok(())
}

fn cmd_test(src: &str, levels: &[Level], mode: Option<ExtensionMode>, settings: &TestSettings) -> CliResult {
    let source = load_state_source(src).map_err(err)?;
    let ppt = ppt_test(&source.rho).map_err(err)?;
    let mut code = EXIT_OK;
    for &level in levels {
        let test = ExtensionTest::build(&source.rho, level, mode).map_err(err)?;
        let verdict = run_built(&test, settings);
        if verdict.outcome == Outcome::Inconclusive {
            code = EXIT_INCONCLUSIVE;
        }
        print_json(&ResultRecord::from_verdict(&source.label, &verdict, Some(ppt), settings))?;
    }
    Ok(code)
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    index: usize,
    family: String,
    parameter: &'static str,
    value: f64,
    level: String,
    outcome: Outcome,
    t_star: Option<f64>,
    ppt: bool,
    ppt_min_eigenvalue: f64,
    solve_seconds: f64,
}

fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, String> {
    if !(step > 0.0) {
        return Err(format!("step must be positive, got {step}"));
    }
    if from > to {
        return Ok(Vec::new());
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| from + i as f64 * step).collect())
}

fn workers() -> usize {
    std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()).filter(|&n| n >= 1).unwrap_or(1)
}

fn sweep_point(family: &zoo::Family, name: &str, index: usize, value: f64, level: Level, settings: &TestSettings) -> Result<SweepRow, String> {
    let state = family.at(value).map_err(err)?;
    let ppt = ppt_test(&state.rho).map_err(err)?;
    let verdict = hierarchy::run_test_with(&state.rho, level, None, settings).map_err(err)?;
    Ok(SweepRow {
        index,
        family: name.to_string(),
        parameter: family.parameter(),
        value,
        level: level.to_string(),
        outcome: verdict.outcome,
        t_star: verdict.t_star.is_finite().then_some(verdict.t_star),
        ppt: ppt.is_ppt,
        ppt_min_eigenvalue: ppt.min_eigenvalue,
        solve_seconds: verdict.solve_seconds,
    })
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::ExtensionFound => "extension-found",
        Outcome::Entangled => "entangled",
        Outcome::Inconclusive => "inconclusive",
    }
}

fn cmd_sweep(
    name: &str,
    level: Level,
    from: Option<f64>,
    to: Option<f64>,
    step: f64,
    csv_path: Option<PathBuf>,
    settings: &TestSettings,
) -> CliResult {
    let family = zoo::load_literature_family(name).map_err(err)?;
    let (lo, hi) = family.range();
    let points = grid(from.unwrap_or(lo), to.unwrap_or(hi), step)?;
    let slots: Mutex<Vec<Option<Result<SweepRow, String>>>> = Mutex::new(vec![None; points.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers().min(points.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&value) = points.get(i) else { break };
                let row = sweep_point(&family, name, i, value, level, settings);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(row);
            });
        }
    });
    let rows: Vec<SweepRow> = slots
        .into_inner()
        .map_err(err)?
        .into_iter()
        .map(|r| r.expect("every grid point evaluated"))
        .collect::<Result<_, _>>()?;

    println!("{:>5}  {:>10}  {:<16} {:>12}  {:>4}", "index", family.parameter(), "outcome", "t*", "ppt");
    for r in &rows {
        let t = r.t_star.map_or("nan".to_string(), |t| format!("{t:.4e}"));
        println!("{:>5}  {:>10.4}  {:<16} {:>12}  {:>4}", r.index, r.value, outcome_name(r.outcome), t, if r.ppt { "yes" } else { "no" });
    }
    for w in rows.windows(2) {
        if w[0].outcome != w[1].outcome {
            println!(
                "crossing between {}={:.4} ({}) and {:.4} ({})",
                family.parameter(),
                w[0].value,
                outcome_name(w[0].outcome),
                w[1].value,
                outcome_name(w[1].outcome)
            );
        }
    }
    if let Some(path) = csv_path {
        let mut wtr = csv::Writer::from_path(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        for r in &rows {
            wtr.serialize(r).map_err(err)?;
        }
        wtr.flush().map_err(err)?;
    }
    let inconclusive = rows.iter().any(|r| r.outcome == Outcome::Inconclusive);
    Ok(if inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK })
}

fn cmd_witness(
    src: &str,
    level: Level,
    mode: Option<ExtensionMode>,
    out: &PathBuf,
    trials: usize,
    seed: u64,
    settings: &TestSettings,
) -> CliResult {
    let source = load_state_source(src).map_err(err)?;
    let test = ExtensionTest::build(&source.rho, level, mode).map_err(err)?;
    let verdict = run_built(&test, settings);
    if !verdict.is_entangled() {
        eprintln!(
            "state not detected at level {level}: {} ({})",
            outcome_name(verdict.outcome),
            verdict.diagnostic
        );
        return Ok(EXIT_NOT_DETECTED);
    }
    let witness = extract_witness(&verdict, &test, trials, seed).map_err(err)?;
    let sos = if level == Level::new(2, 1) {
        let z = verdict.certificate.as_ref().expect("entangled verdicts carry a certificate");
        Some(verify_sos(&test, z, 1000, seed).map_err(err)?)
    } else {
        None
    };
    let file = WitnessFile::new(&source.label, level, verdict.mode, source.rho.dim_a(), source.rho.dim_b(), &witness, sos);
    std::fs::write(out, file.to_json() + "\n").map_err(|e| format!("{}: {e}", out.display()))?;
    let ppt = ppt_test(&source.rho).map_err(err)?;
    let mut record = ResultRecord::from_verdict(&source.label, &verdict, Some(ppt), settings);
    record.witness = Some(WitnessSummary::new(&witness, sos));
    print_json(&record)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct RobustnessRecord {
    state: String,
    level: String,
    p_star: f64,
    p_detected: Option<f64>,
    width: f64,
    evaluations: usize,
    inconclusive: usize,
}

fn cmd_robustness(src: &str, level: Level, settings: &TestSettings) -> CliResult {
    let source = load_state_source(src).map_err(err)?;
    let r = robustness(&source.rho, level, settings).map_err(err)?;
    print_json(&RobustnessRecord {
        state: source.label,
        level: level.to_string(),
        p_star: r.p_star,
        p_detected: r.p_detected.is_finite().then_some(r.p_detected),
        width: ROBUSTNESS_WIDTH,
        evaluations: r.evaluations,
        inconclusive: r.inconclusive,
    })?;
    Ok(if r.inconclusive > 0 { EXIT_INCONCLUSIVE } else { EXIT_OK })
}

fn cmd_export(src: &str, out: Option<PathBuf>) -> CliResult {
    let file = if src.starts_with("zoo:") {
        StateFile::from_labeled(&zoo::from_uri(src).map_err(err)?)
    } else {
        StateFile::from_state(&load_state_source(src).map_err(err)?.rho, None, None)
    };
    match out {
        Some(path) => file.write(&path).map_err(err)?,
        None => println!("{}", file.to_json()),
    }
    Ok(EXIT_OK)
}

fn cmd_dump(src: &str, level: Level, mode: Option<ExtensionMode>, augmented: bool, out: Option<PathBuf>) -> CliResult {
    let source = load_state_source(src).map_err(err)?;
    let test = ExtensionTest::build(&source.rho, level, mode).map_err(err)?;
    let problem = if augmented { min_t_augment(test.problem()).map_err(err)? } else { test.problem().clone() };
    let mut sink: Box<dyn Write> = match &out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| format!("{}: {e}", path.display()))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    write_dump(&problem, &mut sink).map_err(err)?;
    sink.flush().map_err(err)?;
    Ok(EXIT_OK)
}
