//! Command-line front end: seeded recovery runs, Monte Carlo sweeps,
//! phase-transition diagrams, sample-complexity arithmetic, and brute-force
//! restricted isometry constants.
//!
//! Exit codes: 0 on success, 1 on validation errors (bad flags, bad config),
//! 2 on I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::Deserialize;
use serde_json::json;

use siht::complexity;
use siht::error::SihtError;
use siht::experiment::{
    recover_once, run_phase_diagram, run_recovery_sweep, EnsembleChoice, ExperimentConfig,
    PhaseDiagramConfig, RunMode,
};
use siht::matrix::Matrix;
use siht::ric;

const USAGE: &str = "\
siht - sequential iterative hard thresholding toolkit

USAGE:
  siht <SUBCOMMAND> [FLAGS]

SUBCOMMANDS:
  recover        Run one seeded recovery and print a JSON trace
  sweep          Recovery-probability sweep over the sparsity grid (CSV)
  phase-diagram  Recovery probability over the (a, b) size grid (CSV + PGM)
  complexity     Dynamic sample complexity and related bounds (JSON)
  ric            Exact restricted isometry constant of a CSV matrix (JSON)

COMMON FLAGS:
  --config PATH    JSON config file; explicit flags override file values
  --seed U64       Master seed (required for recover/sweep/phase-diagram)
  --n N            Signal dimension (default 1000)
  --t T            Iteration horizon (default 100)
  --threshold X    Success threshold on the final error (default 1e-3)
  --ensemble E     gaussian | rademacher | uniform-symmetric | identity
  --workers N      Worker threads (SIHT_WORKERS env var overrides)

recover:
  --k K            Sparsity (default 5)
  --a A --b B      Run phase-wise with sizes uniform on [A, B]
  --m M            Run offline with a fixed M-row matrix
  --stop-at-threshold   Stop at the first step that reaches the threshold
  (default mode: phase-wise with a=20, b=150; identity ensemble defaults
   to offline with m = n)

sweep:
  --k-grid LIST    Comma-separated sparsity levels (default 5,10,...,35)
  --trials N       Trials per cell (default 100)
  --a A --b B      Phase-wise size range (default 20,150)
  --offline-m LIST Offline baselines (default 100,200,250; 'none' disables)
  --out PATH       Output CSV (default sweep.csv)

phase-diagram:
  --k K            Sparsity (default 5)
  --trials N       Trials per cell (default 100)
  --a-min/--a-max/--a-step   Grid for a (default 1..200 step 1)
  --b-min/--b-max/--b-step   Grid for b (default 1..200 step 1)
  --out PATH       Output CSV (default phase_diagram.csv)
  --pgm PATH       Output PGM image (default phase_diagram.pgm)

complexity:
  --m LIST         Phase measurement counts, e.g. 4,16,4,16
  --p LIST         Phase fractions, e.g. 0.25,0.25,0.25,0.25
  --schedule LIST  Alternative to --p: boundaries, e.g. 0,2,10
  --k K --n N --epsilon X --c-tilde X   Also evaluate the threshold check
  --bound-a A --bound-b B               Expected-complexity lower bound
  --estimate --a A --b B --s S --trials N --seed U64
                                        Monte Carlo estimate of E[M_d]

ric:
  --input PATH     CSV matrix, one row per line
  --order R        Constant order
  --cap N          Subset enumeration cap (default 1000000)
";

enum CliError {
    /// Bad flags or bad parameter values; prints usage.
    Validation(String),
    /// Filesystem problems; reported with the path.
    Io(String),
}

impl From<SihtError> for CliError {
    fn from(e: SihtError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}\n");
            eprintln!("{USAGE}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &[String]) -> Result<(), CliError> {
    let Some(subcommand) = args.first() else {
        return Err(CliError::Validation("missing subcommand".into()));
    };
    let rest = &args[1..];
    match subcommand.as_str() {
        "recover" => cmd_recover(rest),
        "sweep" => cmd_sweep(rest),
        "phase-diagram" => cmd_phase_diagram(rest),
        "complexity" => cmd_complexity(rest),
        "ric" => cmd_ric(rest),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(())
        }
        other => Err(CliError::Validation(format!("unknown subcommand '{other}'"))),
    }
}

/// Flag parser: every flag takes exactly one value except the listed switches.
struct Flags {
    pairs: Vec<(String, String)>,
    switches: Vec<String>,
}

impl Flags {
    fn parse(args: &[String], switch_names: &[&str]) -> Result<Self, CliError> {
        let mut pairs = Vec::new();
        let mut switches = Vec::new();
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            let Some(name) = arg.strip_prefix("--") else {
                return Err(CliError::Validation(format!("unexpected argument '{arg}'")));
            };
            if switch_names.contains(&name) {
                switches.push(name.to_string());
            } else {
                let value = it
                    .next()
                    .ok_or_else(|| CliError::Validation(format!("missing value for --{name}")))?;
                pairs.push((name.to_string(), value.clone()));
            }
        }
        Ok(Flags { pairs, switches })
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.pairs
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    fn has_switch(&self, name: &str) -> bool {
        self.switches.iter().any(|s| s == name)
    }

    fn reject_unknown(&self, known: &[&str]) -> Result<(), CliError> {
        for (name, _) in &self.pairs {
            if !known.contains(&name.as_str()) {
                return Err(CliError::Validation(format!("unknown flag '--{name}'")));
            }
        }
        Ok(())
    }

    fn parse_value<T: std::str::FromStr>(&self, name: &str) -> Result<Option<T>, CliError> {
        match self.get(name) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Validation(format!("invalid value '{raw}' for --{name}"))
            }),
        }
    }

    fn parse_list<T: std::str::FromStr>(&self, name: &str) -> Result<Option<Vec<T>>, CliError> {
        match self.get(name) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|piece| piece.trim().parse::<T>())
                .collect::<Result<Vec<T>, _>>()
                .map(Some)
                .map_err(|_| CliError::Validation(format!("invalid list '{raw}' for --{name}"))),
        }
    }
}

/// Optional values accepted from a JSON config file. Flags override these.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<usize>,
    t: Option<usize>,
    k: Option<usize>,
    k_grid: Option<Vec<usize>>,
    trials: Option<usize>,
    threshold: Option<f64>,
    a: Option<usize>,
    b: Option<usize>,
    offline_m: Option<Vec<usize>>,
    a_min: Option<usize>,
    a_max: Option<usize>,
    a_step: Option<usize>,
    b_min: Option<usize>,
    b_max: Option<usize>,
    b_step: Option<usize>,
    ensemble: Option<String>,
    workers: Option<usize>,
    master_seed: Option<u64>,
}

fn load_file_config(flags: &Flags) -> Result<FileConfig, CliError> {
    let Some(path) = flags.get("config") else {
        return Ok(FileConfig::default());
    };
    let path = PathBuf::from(path);
    let text = fs::read_to_string(&path).map_err(|e| io_error(&path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
}

fn resolve_ensemble(flags: &Flags, file: &FileConfig) -> Result<EnsembleChoice, CliError> {
    let name = flags
        .get("ensemble")
        .map(str::to_string)
        .or_else(|| file.ensemble.clone());
    match name {
        None => Ok(EnsembleChoice::Gaussian),
        Some(raw) => EnsembleChoice::parse(&raw)
            .ok_or_else(|| CliError::Validation(format!("unknown ensemble '{raw}'"))),
    }
}

fn resolve_seed(flags: &Flags, file: &FileConfig) -> Result<u64, CliError> {
    flags
        .parse_value::<u64>("seed")?
        .or(file.master_seed)
        .ok_or_else(|| CliError::Validation("--seed is required".into()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

fn cmd_recover(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &["stop-at-threshold"])?;
    flags.reject_unknown(&[
        "config", "seed", "n", "t", "k", "threshold", "ensemble", "a", "b", "m", "workers",
    ])?;
    let file = load_file_config(&flags)?;

    let n = flags.parse_value("n")?.or(file.n).unwrap_or(1000);
    let t = flags.parse_value("t")?.or(file.t).unwrap_or(100);
    let k = flags.parse_value("k")?.or(file.k).unwrap_or(5);
    let threshold = flags.parse_value("threshold")?.or(file.threshold).unwrap_or(1e-3);
    let ensemble = resolve_ensemble(&flags, &file)?;
    let master_seed = resolve_seed(&flags, &file)?;

    let a = flags.parse_value::<usize>("a")?.or(file.a);
    let b = flags.parse_value::<usize>("b")?.or(file.b);
    let m = flags.parse_value::<usize>("m")?;
    let mode = match (a, b, m) {
        (Some(_), None, _) | (None, Some(_), _) => {
            return Err(CliError::Validation("--a and --b must be given together".into()));
        }
        (Some(a), Some(b), Some(_)) => {
            let _ = (a, b);
            return Err(CliError::Validation("choose either --a/--b or --m, not both".into()));
        }
        (Some(a), Some(b), None) => RunMode::Siht { a, b },
        (None, None, Some(m)) => RunMode::Offline { m },
        (None, None, None) => {
            if ensemble == EnsembleChoice::Identity {
                RunMode::Offline { m: n }
            } else {
                RunMode::Siht { a: 20, b: 150 }
            }
        }
    };

    let cfg = ExperimentConfig {
        dimension: n,
        horizon: t,
        k_grid: vec![k],
        trials: 1,
        threshold,
        modes: vec![mode],
        ensemble,
        master_seed,
        workers: None,
    };
    let report = recover_once(&cfg, mode, k, flags.has_switch("stop-at-threshold"))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(())
}

fn cmd_sweep(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &[])?;
    flags.reject_unknown(&[
        "config",
        "seed",
        "n",
        "t",
        "k-grid",
        "trials",
        "threshold",
        "ensemble",
        "a",
        "b",
        "offline-m",
        "workers",
        "out",
    ])?;
    let file = load_file_config(&flags)?;
    let master_seed = resolve_seed(&flags, &file)?;

    let mut cfg = ExperimentConfig::paper_defaults(master_seed);
    if let Some(n) = flags.parse_value("n")?.or(file.n) {
        cfg.dimension = n;
    }
    if let Some(t) = flags.parse_value("t")?.or(file.t) {
        cfg.horizon = t;
    }
    if let Some(grid) = flags.parse_list("k-grid")?.or_else(|| file.k_grid.clone()) {
        cfg.k_grid = grid;
    }
    if let Some(trials) = flags.parse_value("trials")?.or(file.trials) {
        cfg.trials = trials;
    }
    if let Some(threshold) = flags.parse_value("threshold")?.or(file.threshold) {
        cfg.threshold = threshold;
    }
    cfg.ensemble = resolve_ensemble(&flags, &file)?;
    cfg.workers = flags.parse_value("workers")?.or(file.workers);

    let a = flags.parse_value("a")?.or(file.a).unwrap_or(20);
    let b = flags.parse_value("b")?.or(file.b).unwrap_or(150);
    let offline = match flags.get("offline-m") {
        Some("none") => Vec::new(),
        Some(_) => flags.parse_list::<usize>("offline-m")?.expect("flag present"),
        None => file.offline_m.unwrap_or_else(|| vec![100, 200, 250]),
    };
    cfg.modes = std::iter::once(RunMode::Siht { a, b })
        .chain(offline.into_iter().map(|m| RunMode::Offline { m }))
        .collect();

    let result = run_recovery_sweep(&cfg)?;
    let mut csv = Vec::new();
    result
        .write_csv(&mut csv)
        .expect("writing to memory cannot fail");
    let out = PathBuf::from(flags.get("out").unwrap_or("sweep.csv"));
    write_file(&out, &csv)?;
    for row in &result.rows {
        println!(
            "k={} mode={} probability={:.3} successes={}/{}",
            row.k,
            row.mode.label(),
            row.probability,
            row.successes,
            row.trials
        );
    }
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn grid_values(
    flags: &Flags,
    prefix: &str,
    file_range: (Option<usize>, Option<usize>, Option<usize>),
) -> Result<Vec<usize>, CliError> {
    let min = flags.parse_value(&format!("{prefix}-min"))?.or(file_range.0).unwrap_or(1);
    let max = flags.parse_value(&format!("{prefix}-max"))?.or(file_range.1).unwrap_or(200);
    let step = flags.parse_value(&format!("{prefix}-step"))?.or(file_range.2).unwrap_or(1);
    if step == 0 {
        return Err(CliError::Validation(format!("--{prefix}-step must be positive")));
    }
    if min > max {
        return Err(CliError::Validation(format!(
            "--{prefix}-min must not exceed --{prefix}-max"
        )));
    }
    Ok((min..=max).step_by(step).collect())
}

fn cmd_phase_diagram(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &[])?;
    flags.reject_unknown(&[
        "config", "seed", "n", "t", "k", "trials", "threshold", "ensemble", "workers", "a-min",
        "a-max", "a-step", "b-min", "b-max", "b-step", "out", "pgm",
    ])?;
    let file = load_file_config(&flags)?;
    let master_seed = resolve_seed(&flags, &file)?;

    let cfg = PhaseDiagramConfig {
        dimension: flags.parse_value("n")?.or(file.n).unwrap_or(1000),
        horizon: flags.parse_value("t")?.or(file.t).unwrap_or(100),
        sparsity: flags.parse_value("k")?.or(file.k).unwrap_or(5),
        trials: flags.parse_value("trials")?.or(file.trials).unwrap_or(100),
        threshold: flags.parse_value("threshold")?.or(file.threshold).unwrap_or(1e-3),
        a_values: grid_values(&flags, "a", (file.a_min, file.a_max, file.a_step))?,
        b_values: grid_values(&flags, "b", (file.b_min, file.b_max, file.b_step))?,
        ensemble: resolve_ensemble(&flags, &file)?,
        master_seed,
        workers: flags.parse_value("workers")?.or(file.workers),
    };

    let diagram = run_phase_diagram(&cfg)?;

    let mut csv = Vec::new();
    diagram
        .write_csv(&mut csv)
        .expect("writing to memory cannot fail");
    let csv_path = PathBuf::from(flags.get("out").unwrap_or("phase_diagram.csv"));
    write_file(&csv_path, &csv)?;

    let mut image = Vec::new();
    diagram
        .write_pgm(&mut image)
        .expect("writing to memory cannot fail");
    let pgm_path = PathBuf::from(flags.get("pgm").unwrap_or("phase_diagram.pgm"));
    write_file(&pgm_path, &image)?;

    let valid = diagram.cells.iter().filter(|c| c.valid).count();
    eprintln!(
        "wrote {} and {} ({} cells, {valid} valid)",
        csv_path.display(),
        pgm_path.display(),
        diagram.cells.len()
    );
    Ok(())
}

fn cmd_complexity(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &["estimate"])?;
    flags.reject_unknown(&[
        "m", "p", "schedule", "k", "n", "epsilon", "c-tilde", "bound-a", "bound-b", "a", "b", "s",
        "trials", "seed",
    ])?;

    let mut output = serde_json::Map::new();
    let mut breakdown = None;

    if let Some(counts) = flags.parse_list::<usize>("m")? {
        let result = match (flags.parse_list::<f64>("p")?, flags.parse_list::<usize>("schedule")?) {
            (Some(fractions), None) => complexity::breakdown_from_fractions(&counts, &fractions)?,
            (None, Some(boundaries)) => {
                let schedule = siht::PhaseSchedule::from_boundaries(&boundaries)?;
                complexity::dynamic_sample_complexity(&counts, &schedule)?
            }
            (None, None) => {
                // Without fractions the counts are taken as one phase per step.
                let schedule = siht::PhaseSchedule::per_step(counts.len())?;
                complexity::dynamic_sample_complexity(&counts, &schedule)?
            }
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(
                    "give either --p or --schedule, not both".into(),
                ));
            }
        };
        let value = serde_json::to_value(&result).expect("breakdown serializes");
        for (key, val) in value.as_object().expect("object").iter() {
            output.insert(key.clone(), val.clone());
        }
        breakdown = Some(result);
    }

    if let (Some(k), Some(n)) = (flags.parse_value::<usize>("k")?, flags.parse_value::<usize>("n")?) {
        let epsilon = flags.parse_value("epsilon")?.unwrap_or(0.5);
        let c_tilde = flags.parse_value("c-tilde")?.unwrap_or(96.0);
        match &breakdown {
            Some(b) => {
                let check = complexity::satisfies_theorem(b, k, n, epsilon, c_tilde)?;
                output.insert("theorem".into(), serde_json::to_value(&check).expect("serializes"));
            }
            None => {
                let rhs = complexity::theorem_rhs(k, n, epsilon, c_tilde)?;
                output.insert("theorem".into(), json!({ "rhs": rhs }));
            }
        }
    }

    if let (Some(a), Some(b)) = (
        flags.parse_value::<usize>("bound-a")?,
        flags.parse_value::<usize>("bound-b")?,
    ) {
        output.insert(
            "expected_lower_bound".into(),
            json!(complexity::expected_md_lower_bound(a, b)?),
        );
    }

    if flags.has_switch("estimate") {
        let a = flags
            .parse_value::<usize>("a")?
            .ok_or_else(|| CliError::Validation("--estimate needs --a".into()))?;
        let b = flags
            .parse_value::<usize>("b")?
            .ok_or_else(|| CliError::Validation("--estimate needs --b".into()))?;
        let s = flags
            .parse_value::<usize>("s")?
            .ok_or_else(|| CliError::Validation("--estimate needs --s".into()))?;
        let trials = flags.parse_value("trials")?.unwrap_or(10_000);
        let seed = flags
            .parse_value::<u64>("seed")?
            .ok_or_else(|| CliError::Validation("--estimate needs --seed".into()))?;
        let estimate = complexity::estimate_expected_md(a, b, s, trials, seed)?;
        output.insert("estimate".into(), serde_json::to_value(&estimate).expect("serializes"));
    }

    if output.is_empty() {
        return Err(CliError::Validation(
            "complexity needs at least one of --m, --k/--n, --bound-a/--bound-b, --estimate".into(),
        ));
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::Value::Object(output)).expect("serializes")
    );
    Ok(())
}

fn cmd_ric(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &[])?;
    flags.reject_unknown(&["input", "order", "cap"])?;
    let input = flags
        .get("input")
        .ok_or_else(|| CliError::Validation("--input is required".into()))?;
    let order = flags
        .parse_value::<usize>("order")?
        .ok_or_else(|| CliError::Validation("--order is required".into()))?;
    let cap = flags.parse_value::<u128>("cap")?.unwrap_or(ric::DEFAULT_SUBSET_CAP);

    let path = PathBuf::from(input);
    let text = fs::read_to_string(&path).map_err(|e| io_error(&path, e))?;
    let matrix= parse_csv_matrix(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;

    let result = ric::ric_with_cap(&matrix, order, cap)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "order": result.order,
            "value": result.value,
            "witness": result.witness.indices(),
        }))
        .expect("serializes")
    );
    Ok(())
}

fn parse_csv_matrix(text: &str) -> Result<Matrix, String> {
    let mut rows = Vec::new();
    for (line_number, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = trimmed.split(',').map(|v| v.trim().parse::<f64>()).collect();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => return Err(format!("line {}: {e}", line_number + 1)),
        }
    }
    Matrix::from_rows(rows).map_err(|e| e.to_string())
}
