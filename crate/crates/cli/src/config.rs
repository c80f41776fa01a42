//! Config-file parsing: flat TOML sections mapping onto the library types.
//!
//! Units are canonical everywhere (um, um^-1, um^-2, dimensionless B); the
//! one annotation accepted is `alpha_cm2`, converted by 1e-8 to um^-2 at
//! parse time.

use serde::Deserialize;
use std::path::PathBuf;

use biphoton::model::{
    solve_l0, AperiodicPolingSpec, DispersionParams, Layer, LayerSequence, PhotonicChirpSpec,
    StructureSpec,
};
use biphoton::optimize::{Objective, SweepParam, SweepSpec};
use biphoton::spectra::{FrequencyGrid, Method, Scenario};
use biphoton::{fixtures, Error as CoreError};

use crate::AppError;

/// Conversion for the `alpha_cm2` annotation: 1 cm^-2 = 1e-8 um^-2.
pub const CM2_TO_UM2: f64 = 1e-8;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    method: Option<String>,
    structure: RawStructure,
    dispersion: RawDispersion,
    grid: Option<RawGrid>,
    output: Option<RawOutput>,
    sweep: Option<RawSweep>,
    optimize: Option<RawOptimize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    kind: String,
    n_layers: Option<usize>,
    layer_len: Option<f64>,
    total_len: Option<f64>,
    alpha: Option<f64>,
    alpha_cm2: Option<f64>,
    l0: Option<f64>,
    zeta: Option<f64>,
    chi0: Option<f64>,
    /// Explicit stacks: rows of [length_um, chi, dk_offset_um_inv].
    layers: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDispersion {
    lambda0: f64,
    b_walkoff: f64,
    #[serde(default)]
    dk0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    min: f64,
    max: f64,
    n_points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    param: String,
    values: Vec<f64>,
    objectives: Option<Vec<String>>,
    peak_threshold: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptimize {
    n_layers: usize,
    total_len: f64,
    objective: Option<String>,
    peak_threshold: Option<f64>,
}

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, AppError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(AppError::Config(format!(
                "unknown output format `{other}` (expected csv or jsonl)"
            ))),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub out_path: Option<PathBuf>,
    pub format: OutputFormat,
    pub sweep: Option<SweepSpec>,
    pub optimize: Option<OptimizeConfig>,
}

#[derive(Debug, Clone)]
pub struct OptimizeConfig {
    pub n_layers: usize,
    pub total_len: f64,
    pub objective: Objective,
}

fn cfg_err(e: CoreError) -> AppError {
    AppError::Config(e.to_string())
}

fn parse_method(s: &str) -> Result<Method, AppError> {
    match s {
        "closed" => Ok(Method::ClosedForm),
        "general" => Ok(Method::GeneralSum),
        "double" => Ok(Method::DoubleSum),
        other => Err(AppError::Config(format!(
            "unknown method `{other}` (expected closed, general, or double)"
        ))),
    }
}

fn parse_objective(name: &str, peak_threshold: f64) -> Result<Objective, AppError> {
    match name {
        "bandwidth" => Ok(Objective::Bandwidth),
        "peak_count" => Ok(Objective::PeakCount {
            rel_threshold: peak_threshold,
        }),
        "max_density" => Ok(Objective::MaxDensity),
        other => Err(AppError::Config(format!(
            "unknown objective `{other}` (expected bandwidth, peak_count, or max_density)"
        ))),
    }
}

fn exactly_one<T>(
    section: &str,
    a_name: &str,
    a: Option<T>,
    b_name: &str,
    b: Option<T>,
) -> Result<(Option<T>, Option<T>), AppError> {
    match (&a, &b) {
        (Some(_), Some(_)) => Err(AppError::Config(format!(
            "[{section}] give either {a_name} or {b_name}, not both"
        ))),
        (None, None) => Err(AppError::Config(format!(
            "[{section}] requires {a_name} or {b_name}"
        ))),
        _ => Ok((a, b)),
    }
}

fn require<T>(section: &str, name: &str, v: Option<T>) -> Result<T, AppError> {
    v.ok_or_else(|| AppError::Config(format!("[{section}] requires {name}")))
}

fn build_structure(raw: &RawStructure) -> Result<StructureSpec, AppError> {
    let chi0 = raw.chi0.unwrap_or(1.0);
    match raw.kind.as_str() {
        "photonic" => {
            let n_layers = require("structure", "n_layers", raw.n_layers)?;
            let (layer_len, total_len) = exactly_one(
                "structure",
                "layer_len",
                raw.layer_len,
                "total_len",
                raw.total_len,
            )?;
            let layer_len =
                layer_len.unwrap_or_else(|| total_len.unwrap() / n_layers.max(1) as f64);
            let alpha = match exactly_one(
                "structure",
                "alpha",
                raw.alpha,
                "alpha_cm2",
                raw.alpha_cm2,
            )? {
                (Some(a), None) => a,
                (None, Some(a_cm2)) => a_cm2 * CM2_TO_UM2,
                _ => unreachable!(),
            };
            let spec =
                PhotonicChirpSpec::new(n_layers, layer_len, chi0, alpha).map_err(cfg_err)?;
            Ok(StructureSpec::Photonic(spec))
        }
        "aperiodic" => {
            let n_layers = require("structure", "n_layers", raw.n_layers)?;
            let zeta = require("structure", "zeta", raw.zeta)?;
            let (l0, total_len) =
                exactly_one("structure", "l0", raw.l0, "total_len", raw.total_len)?;
            let l0 = match (l0, total_len) {
                (Some(v), None) => v,
                (None, Some(total)) => solve_l0(n_layers, zeta, total).map_err(cfg_err)?,
                _ => unreachable!(),
            };
            let spec = AperiodicPolingSpec::new(n_layers, l0, zeta, chi0).map_err(cfg_err)?;
            Ok(StructureSpec::Aperiodic(spec))
        }
        "periodic" => {
            let n_layers = require("structure", "n_layers", raw.n_layers)?;
            let (l0, total_len) =
                exactly_one("structure", "l0", raw.l0, "total_len", raw.total_len)?;
            let l0 = l0.unwrap_or_else(|| total_len.unwrap() / n_layers.max(1) as f64);
            if l0 <= 0.0 || n_layers == 0 {
                return Err(AppError::Config(
                    "[structure] periodic stack needs n_layers >= 1 and l0 > 0".into(),
                ));
            }
            Ok(StructureSpec::Periodic {
                n_layers,
                l0,
                chi0,
            })
        }
        "explicit" => {
            let rows = require("structure", "layers", raw.layers.clone())?;
            let layers = rows
                .iter()
                .map(|r| Layer {
                    length: r[0],
                    chi: r[1],
                    dk_offset: r[2],
                })
                .collect();
            let seq = LayerSequence::new(layers).map_err(cfg_err)?;
            Ok(StructureSpec::Explicit(seq))
        }
        other => Err(AppError::Config(format!(
            "unknown structure kind `{other}` (expected photonic, aperiodic, periodic, or explicit)"
        ))),
    }
}

fn default_grid_for(
    structure: &StructureSpec,
    d: &DispersionParams,
) -> Result<FrequencyGrid, AppError> {
    match structure {
        StructureSpec::Photonic(_) | StructureSpec::Periodic { .. } => Ok(fixtures::default_grid()),
        StructureSpec::Aperiodic(spec) => Ok(fixtures::aperiodic_grid(spec, d)),
        StructureSpec::Explicit(_) => Err(AppError::Config(
            "[grid] is required for explicit layer stacks".into(),
        )),
    }
}

fn build_sweep(
    raw: &RawSweep,
    base: &Scenario,
) -> Result<SweepSpec, AppError> {
    let param = match raw.param.as_str() {
        "alpha" => SweepParam::Alpha,
        "zeta" => SweepParam::Zeta,
        "n_layers" => SweepParam::NLayers,
        "dk0" => SweepParam::Dk0,
        "b_walkoff" => SweepParam::BWalkoff,
        other => {
            return Err(AppError::Config(format!(
                "unknown sweep param `{other}` (expected alpha, zeta, n_layers, dk0, or b_walkoff)"
            )))
        }
    };
    let threshold = raw.peak_threshold.unwrap_or(0.1);
    let names = raw.objectives.clone().unwrap_or_else(|| {
        vec![
            "bandwidth".to_string(),
            "peak_count".to_string(),
            "max_density".to_string(),
        ]
    });
    let objectives = names
        .iter()
        .map(|n| parse_objective(n, threshold))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = SweepSpec {
        base: base.clone(),
        param,
        values: raw.values.clone(),
        objectives,
    };
    spec.validate().map_err(cfg_err)?;
    Ok(spec)
}

/// Parse a config file. TOML syntax errors come back with line/column from
/// the parser; semantic errors name the section and field.
pub fn parse_config(text: &str) -> Result<RunConfig, AppError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| AppError::Config(format!("config parse error: {e}")))?;

    let dispersion = DispersionParams::new(
        raw.dispersion.lambda0,
        raw.dispersion.b_walkoff,
        raw.dispersion.dk0,
    )
    .map_err(cfg_err)?;
    let structure = build_structure(&raw.structure)?;
    let grid = match &raw.grid {
        Some(g) => FrequencyGrid::new(g.min, g.max, g.n_points).map_err(cfg_err)?,
        None => default_grid_for(&structure, &dispersion)?,
    };
    let method = match &raw.method {
        Some(m) => parse_method(m)?,
        None => Method::ClosedForm,
    };
    let scenario = Scenario {
        structure,
        dispersion,
        grid,
        method,
    };

    let sweep = raw
        .sweep
        .as_ref()
        .map(|s| build_sweep(s, &scenario))
        .transpose()?;
    let optimize = raw
        .optimize
        .as_ref()
        .map(|o| {
            let threshold = o.peak_threshold.unwrap_or(0.1);
            let objective = match &o.objective {
                Some(name) => parse_objective(name, threshold)?,
                None => Objective::Bandwidth,
            };
            Ok::<_, AppError>(OptimizeConfig {
                n_layers: o.n_layers,
                total_len: o.total_len,
                objective,
            })
        })
        .transpose()?;

    let (out_path, format) = match &raw.output {
        Some(o) => {
            let format = match &o.format {
                Some(f) => OutputFormat::parse(f)?,
                None => OutputFormat::Csv,
            };
            (o.path.clone(), format)
        }
        None => (None, OutputFormat::Csv),
    };

    Ok(RunConfig {
        scenario,
        out_path,
        format,
        sweep,
        optimize,
    })
}

/// Format a float so that TOML reads it back as a float with the identical
/// value (shortest round-trip representation, decimal point enforced).
pub fn toml_f64(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

/// Render a scenario as a ready-to-run config file.
pub fn scenario_to_toml(name: &str, sc: &Scenario, note: Option<&str>) -> String {
    let mut s = String::new();
    if let Some(n) = note {
        s.push_str(&format!("# {name}: {n}\n"));
    }
    s.push_str(&format!("method = \"{}\"\n\n[structure]\n", sc.method.name()));
    match &sc.structure {
        StructureSpec::Photonic(p) => {
            s.push_str("kind = \"photonic\"\n");
            s.push_str(&format!("n_layers = {}\n", p.n_layers));
            s.push_str(&format!("layer_len = {}\n", toml_f64(p.layer_len)));
            s.push_str(&format!("alpha = {}\n", toml_f64(p.alpha)));
            s.push_str(&format!("chi0 = {}\n", toml_f64(p.chi0)));
        }
        StructureSpec::Aperiodic(a) => {
            s.push_str("kind = \"aperiodic\"\n");
            s.push_str(&format!("n_layers = {}\n", a.n_layers));
            s.push_str(&format!("l0 = {}\n", toml_f64(a.l0)));
            s.push_str(&format!("zeta = {}\n", toml_f64(a.zeta)));
            s.push_str(&format!("chi0 = {}\n", toml_f64(a.chi0)));
        }
        StructureSpec::Periodic { n_layers, l0, chi0 } => {
            s.push_str("kind = \"periodic\"\n");
            s.push_str(&format!("n_layers = {n_layers}\n"));
            s.push_str(&format!("l0 = {}\n", toml_f64(*l0)));
            s.push_str(&format!("chi0 = {}\n", toml_f64(*chi0)));
        }
        StructureSpec::Explicit(seq) => {
            s.push_str("kind = \"explicit\"\nlayers = [\n");
            for layer in seq.layers() {
                s.push_str(&format!(
                    "  [{}, {}, {}],\n",
                    toml_f64(layer.length),
                    toml_f64(layer.chi),
                    toml_f64(layer.dk_offset)
                ));
            }
            s.push_str("]\n");
        }
    }
    s.push_str(&format!(
        "\n[dispersion]\nlambda0 = {}\nb_walkoff = {}\ndk0 = {}\n",
        toml_f64(sc.dispersion.lambda0),
        toml_f64(sc.dispersion.b_walkoff),
        toml_f64(sc.dispersion.dk0)
    ));
    s.push_str(&format!(
        "\n[grid]\nmin = {}\nmax = {}\nn_points = {}\n",
        toml_f64(sc.grid.min),
        toml_f64(sc.grid.max),
        sc.grid.n_points
    ));
    s.push_str(&format!("\n[output]\npath = \"{name}.csv\"\nformat = \"csv\"\n"));
    s
}
