//! Command-line front end: simulate spectra, predict/detect peaks, sweep and
//! optimize chirp parameters, run the Gauss-sum factor scan, validate the
//! cross-form oracles, and emit the built-in fixture configs.

mod config;
mod output;

use clap::{Parser, Subcommand};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biphoton::engine::{closed_form_density, density_from_amplitude, double_sum_density};
use biphoton::engine::{phase_mismatch, DK_FALLBACK_THRESHOLD};
use biphoton::gaussfactor::{factor_scan, DEFAULT_FACTOR_THRESHOLD};
use biphoton::model::StructureSpec;
use biphoton::optimize::{optimize_zeta, sweep};
use biphoton::spectra::{detect_peaks, evaluate_spectrum, predict_peaks, Scenario};
use biphoton::{fixtures, Error as CoreError};

use config::{parse_config, scenario_to_toml, OutputFormat, RunConfig};
use output::sig9;

/// Application-level error, carrying the exit-code class.
#[derive(Debug)]
pub enum AppError {
    /// Bad configuration or flags (exit 2).
    Config(String),
    /// Numeric-domain failure while running (exit 3).
    Numeric(String),
    /// Filesystem failure (exit 4).
    Io(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Numeric(_) => 3,
            AppError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Config(m) | AppError::Numeric(m) | AppError::Io(m) => m,
        }
    }
}

fn numeric(e: CoreError) -> AppError {
    AppError::Numeric(e.to_string())
}

fn io_err(e: std::io::Error) -> AppError {
    AppError::Io(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "biphoton",
    version,
    about = "Biphoton spectra of chirped quasi-phase-matched stacks"
)]
struct Cli {
    /// Worker threads for grid and sweep evaluation (0 = all cores).
    /// The BIPHOTON_THREADS environment variable overrides this flag.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a spectrum and write it as CSV or JSON lines.
    Simulate {
        #[arg(long, conflicts_with = "fixture")]
        config: Option<PathBuf>,
        /// Built-in fixture name (see `fixtures`).
        #[arg(long)]
        fixture: Option<String>,
        /// Output file; stdout when omitted and no [output] path is set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv | jsonl
        #[arg(long)]
        format: Option<String>,
        /// closed | general | double
        #[arg(long)]
        method: Option<String>,
    },
    /// Predicted and detected peak table for a scenario.
    Peaks {
        #[arg(long, conflicts_with = "fixture")]
        config: Option<PathBuf>,
        #[arg(long)]
        fixture: Option<String>,
        /// Detection threshold relative to the global maximum.
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the \[sweep\] section of a config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the \[optimize\] section of a config (chirp against an objective).
    Optimize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gauss-sum factor scan of an integer.
    Factor {
        #[arg(long)]
        n: u64,
        /// Truncation of the quadratic sum.
        #[arg(long, default_value_t = 8)]
        m: u32,
        /// Acceptance threshold (default 1/sqrt(2)).
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the closed forms, the generic layer sum, and the expanded
    /// double sums on the built-in fixtures; reports max deviations.
    Validate {
        /// Restrict to one fixture.
        #[arg(long)]
        fixture: Option<String>,
    },
    /// Write the built-in fixture parameter sets as ready-to-run configs.
    Fixtures {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
    },
}

fn load_config(path: &Path) -> Result<RunConfig, AppError> {
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

fn scenario_from_flags(
    config: &Option<PathBuf>,
    fixture: &Option<String>,
) -> Result<(Scenario, Option<PathBuf>, OutputFormat), AppError> {
    match (config, fixture) {
        (Some(path), None) => {
            let rc = load_config(path)?;
            Ok((rc.scenario, rc.out_path, rc.format))
        }
        (None, Some(name)) => {
            let f = fixtures::by_name(name).ok_or_else(|| {
                AppError::Config(format!(
                    "unknown fixture `{name}`; known: {}",
                    fixtures::names().join(" ")
                ))
            })?;
            Ok((f.scenario, None, OutputFormat::Csv))
        }
        _ => Err(AppError::Config(
            "give exactly one of --config or --fixture".into(),
        )),
    }
}

fn open_sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, AppError> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent).map_err(io_err)?;
                }
            }
            Ok(Box::new(
                fs::File::create(p).map_err(|e| AppError::Io(format!("{}: {e}", p.display())))?,
            ))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn cmd_simulate(
    config: Option<PathBuf>,
    fixture: Option<String>,
    out: Option<PathBuf>,
    format: Option<String>,
    method: Option<String>,
) -> Result<(), AppError> {
    let (mut scenario, cfg_out, cfg_format) = scenario_from_flags(&config, &fixture)?;
    if let Some(m) = method {
        scenario.method = match m.as_str() {
            "closed" => biphoton::spectra::Method::ClosedForm,
            "general" => biphoton::spectra::Method::GeneralSum,
            "double" => biphoton::spectra::Method::DoubleSum,
            other => {
                return Err(AppError::Config(format!(
                    "unknown method `{other}` (expected closed, general, or double)"
                )))
            }
        };
    }
    let format = match format {
        Some(f) => OutputFormat::parse(&f)?,
        None => cfg_format,
    };
    let sr = evaluate_spectrum(
        &scenario.structure,
        &scenario.dispersion,
        &scenario.grid,
        scenario.method,
    )
    .map_err(numeric)?;
    let path = out.or(cfg_out);
    let mut sink = open_sink(&path)?;
    output::write_spectrum(&mut sink, &sr, format)?;
    if let Some(p) = path {
        eprintln!("wrote {} rows to {}", sr.omega_over_c.len(), p.display());
    }
    Ok(())
}

fn cmd_peaks(
    config: Option<PathBuf>,
    fixture: Option<String>,
    threshold: f64,
    out: Option<PathBuf>,
) -> Result<(), AppError> {
    let (scenario, cfg_out, _) = scenario_from_flags(&config, &fixture)?;
    let sr = evaluate_spectrum(
        &scenario.structure,
        &scenario.dispersion,
        &scenario.grid,
        scenario.method,
    )
    .map_err(numeric)?;
    let detected = detect_peaks(&sr, threshold).map_err(numeric)?;
    let predicted = match &scenario.structure {
        StructureSpec::Photonic(spec) => {
            Some(predict_peaks(spec, &scenario.dispersion).map_err(numeric)?)
        }
        _ => None,
    };
    let path = out.or(cfg_out);
    let mut sink = open_sink(&path)?;
    output::write_peak_table(&mut sink, predicted.as_ref(), &detected)?;
    drop(sink);
    if let Some(ps) = &predicted {
        eprintln!("predicted: {} lines, resolved={}", ps.peaks.len(), ps.resolved);
    }
    eprintln!(
        "detected: {} peaks, resolved={}, threshold={threshold}",
        detected.peaks.len(),
        detected.resolved
    );
    Ok(())
}

fn cmd_sweep(config: PathBuf, out: Option<PathBuf>) -> Result<(), AppError> {
    let rc = load_config(&config)?;
    let spec = rc.sweep.ok_or_else(|| {
        AppError::Config(format!("{}: missing [sweep] section", config.display()))
    })?;
    let rows = sweep(&spec).map_err(numeric)?;
    let path = out.or(rc.out_path);
    let mut sink = open_sink(&path)?;
    output::write_sweep_table(&mut sink, &spec, &rows)?;
    Ok(())
}

fn cmd_optimize(config: PathBuf, out: Option<PathBuf>) -> Result<(), AppError> {
    let rc = load_config(&config)?;
    let oc = rc.optimize.ok_or_else(|| {
        AppError::Config(format!("{}: missing [optimize] section", config.display()))
    })?;
    let result = optimize_zeta(
        oc.n_layers,
        oc.total_len,
        &rc.scenario.dispersion,
        oc.objective,
    )
    .map_err(numeric)?;
    println!(
        "best zeta = {} um, objective({}) = {}, evaluations = {}",
        sig9(result.best_value),
        oc.objective.name(),
        sig9(result.best_objective),
        result.trace.len()
    );
    if let Some(p) = out.or(rc.out_path) {
        let mut sink = open_sink(&Some(p))?;
        output::write_optimize_trace(&mut sink, &result)?;
    }
    Ok(())
}

fn cmd_factor(
    n: u64,
    m: u32,
    threshold: Option<f64>,
    out: Option<PathBuf>,
) -> Result<(), AppError> {
    let threshold = threshold.unwrap_or(DEFAULT_FACTOR_THRESHOLD);
    let result = factor_scan(n, m, threshold).map_err(numeric)?;
    let mut sink = open_sink(&out)?;
    output::write_factor_report(&mut sink, &result)?;
    Ok(())
}

/// Coarsened copy of a fixture grid for the validation pass.
fn coarse_points(scenario: &Scenario, n_target: usize) -> Vec<f64> {
    let step = (scenario.grid.n_points / n_target).max(1);
    (0..scenario.grid.n_points)
        .step_by(step)
        .map(|i| scenario.grid.point(i))
        .collect()
}

fn cmd_validate(only: Option<String>) -> Result<(), AppError> {
    let tol = 1e-9;
    let tol_fallback = 1e-7;
    let mut failed = false;
    let mut ran = 0usize;
    for f in fixtures::all() {
        if let Some(name) = &only {
            if f.name != name.as_str() {
                continue;
            }
        }
        ran += 1;
        let sc = &f.scenario;
        let seq = sc.structure.build().map_err(numeric)?;
        let l_max = seq.max_layer_len();
        let points = coarse_points(sc, 800);

        // Scale for the relative-deviation floor: the spectral peak.
        let mut scale = 0.0_f64;
        let densities: Vec<(f64, f64, f64, f64)> = points
            .iter()
            .map(|&u| {
                let dk = phase_mismatch(u, &sc.dispersion);
                let closed = closed_form_density(&sc.structure, dk).map_err(numeric)?;
                let general = density_from_amplitude(&seq, dk);
                let double = double_sum_density(&sc.structure, dk).map_err(numeric)?;
                Ok((dk, closed, general, double))
            })
            .collect::<Result<_, AppError>>()?;
        for &(_, c, g, d) in &densities {
            scale = scale.max(c).max(g).max(d);
        }

        let mut max_dev = 0.0_f64;
        let mut max_dev_fb = 0.0_f64;
        for &(dk, c, g, d) in &densities {
            // Densities below 1e-5 of the peak are compared against that
            // floor: the double-sum route carries O(N^2 eps) cancellation
            // noise, so a bare relative test is vacuous there.
            let floor = 1e-5 * scale;
            let dev = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(floor);
            let worst = dev(c, g).max(dev(c, d)).max(dev(g, d));
            if (dk * l_max).abs() < 2.0 * DK_FALLBACK_THRESHOLD {
                max_dev_fb = max_dev_fb.max(worst);
            } else {
                max_dev = max_dev.max(worst);
            }
        }

        let ok = max_dev < tol && max_dev_fb < tol_fallback;
        failed |= !ok;
        println!(
            "fixture {:>5}: points={} max_rel_dev={} fallback_dev={} {}",
            f.name,
            densities.len(),
            sig9(max_dev),
            sig9(max_dev_fb),
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if ran == 0 {
        return Err(AppError::Config(format!(
            "unknown fixture `{}`; known: {}",
            only.unwrap_or_default(),
            fixtures::names().join(" ")
        )));
    }
    if failed {
        return Err(AppError::Numeric(
            "cross-form deviation above tolerance".into(),
        ));
    }
    println!("validate: all cross-form checks passed (tolerance {})", sig9(tol));
    Ok(())
}

fn cmd_fixtures(dir: PathBuf) -> Result<(), AppError> {
    fs::create_dir_all(&dir).map_err(io_err)?;
    let mut count = 0;
    for f in fixtures::all() {
        let text = scenario_to_toml(f.name, &f.scenario, f.note);
        let path = dir.join(format!("{}.toml", f.name));
        fs::write(&path, text).map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
        count += 1;
    }
    println!("wrote {count} fixture configs to {}", dir.display());
    Ok(())
}

fn run() -> Result<(), AppError> {
    let cli = Cli::parse();

    let threads = match std::env::var("BIPHOTON_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .map_err(|_| AppError::Config(format!("BIPHOTON_THREADS=`{v}` is not a number")))?,
        Err(_) => cli.threads,
    };
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| AppError::Config(format!("thread pool: {e}")))?;
    }

    match cli.command {
        Command::Simulate {
            config,
            fixture,
            out,
            format,
            method,
        } => cmd_simulate(config, fixture, out, format, method),
        Command::Peaks {
            config,
            fixture,
            threshold,
            out,
        } => cmd_peaks(config, fixture, threshold, out),
        Command::Sweep { config, out } => cmd_sweep(config, out),
        Command::Optimize { config, out } => cmd_optimize(config, out),
        Command::Factor {
            n,
            m,
            threshold,
            out,
        } => cmd_factor(n, m, threshold, out),
        Command::Validate { fixture } => cmd_validate(fixture),
        Command::Fixtures { dir } => cmd_fixtures(dir),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
