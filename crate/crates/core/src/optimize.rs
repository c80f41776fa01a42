//! Parameter sweeps and scalar optimization of chirp parameters against
//! spectral objectives.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{AperiodicPolingSpec, DispersionParams, StructureSpec};
use crate::spectra::{bandwidth, detect_peaks, evaluate_spectrum, FrequencyGrid, Scenario};
use crate::spectra::{predict_support_aperiodic, Method};

/// Swept parameter. `Alpha` applies to photonic stacks, `Zeta` to aperiodic
/// ones, the rest to any structure carrying them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Alpha,
    Zeta,
    NLayers,
    Dk0,
    BWalkoff,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Alpha => "alpha",
            SweepParam::Zeta => "zeta",
            SweepParam::NLayers => "n_layers",
            SweepParam::Dk0 => "dk0",
            SweepParam::BWalkoff => "b_walkoff",
        }
    }
}

/// Scalar objective evaluated on a sampled spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// Half-max superlevel measure in omega/c.
    Bandwidth,
    /// Number of detected peaks above the relative threshold.
    PeakCount { rel_threshold: f64 },
    /// Global maximum of the normalized density.
    MaxDensity,
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::Bandwidth => "bandwidth",
            Objective::PeakCount { .. } => "peak_count",
            Objective::MaxDensity => "max_density",
        }
    }

    pub fn evaluate(&self, sr: &crate::spectra::SpectrumResult) -> Result<f64> {
        match self {
            Objective::Bandwidth => Ok(bandwidth(sr)?.width_omega),
            Objective::PeakCount { rel_threshold } => {
                Ok(detect_peaks(sr, *rel_threshold)?.peaks.len() as f64)
            }
            Objective::MaxDensity => Ok(sr.max_density()),
        }
    }
}

/// A sweep: one base scenario, one swept parameter, a value list, and the
/// objectives to record per value.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: Scenario,
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub objectives: Vec<Objective>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid("values", "value list must be non-empty"));
        }
        if self.objectives.is_empty() {
            return Err(Error::invalid("objectives", "need at least one objective"));
        }
        let ok = matches!(
            (self.param, &self.base.structure),
            (SweepParam::Alpha, StructureSpec::Photonic(_))
                | (SweepParam::Zeta, StructureSpec::Aperiodic(_))
                | (SweepParam::NLayers, StructureSpec::Photonic(_))
                | (SweepParam::NLayers, StructureSpec::Aperiodic(_))
                | (SweepParam::NLayers, StructureSpec::Periodic { .. })
                | (SweepParam::Dk0, _)
                | (SweepParam::BWalkoff, _)
        );
        if !ok {
            return Err(Error::invalid(
                "param",
                format!(
                    "{} cannot be swept on structure `{}`",
                    self.param.name(),
                    self.base.structure.descriptor()
                ),
            ));
        }
        Ok(())
    }
}

/// One sweep row: the substituted value and either the objective values (in
/// the order of `SweepSpec::objectives`) or the row-level error message.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub objectives: Vec<f64>,
    pub error: Option<String>,
}

fn substituted(base: &Scenario, param: SweepParam, value: f64) -> Result<Scenario> {
    let mut sc = base.clone();
    let int_value = || -> Result<usize> {
        if value.fract() != 0.0 || !(1.0..=1e9).contains(&value) {
            return Err(Error::invalid(
                "n_layers",
                format!("{value} is not a positive integer"),
            ));
        }
        Ok(value as usize)
    };
    match param {
        SweepParam::Dk0 => sc.dispersion.dk0 = value,
        SweepParam::BWalkoff => {
            sc.dispersion.b_walkoff = value;
            sc.dispersion.validate()?;
        }
        SweepParam::Alpha => match &mut sc.structure {
            StructureSpec::Photonic(s) => s.alpha = value,
            _ => unreachable!("validated by SweepSpec"),
        },
        SweepParam::Zeta => match &mut sc.structure {
            StructureSpec::Aperiodic(s) => {
                s.zeta = value;
                s.validate()?;
            }
            _ => unreachable!("validated by SweepSpec"),
        },
        SweepParam::NLayers => {
            let n = int_value()?;
            match &mut sc.structure {
                StructureSpec::Photonic(s) => s.n_layers = n,
                StructureSpec::Aperiodic(s) => {
                    s.n_layers = n;
                    s.validate()?;
                }
                StructureSpec::Periodic { n_layers, .. } => *n_layers = n,
                StructureSpec::Explicit(_) => unreachable!("validated by SweepSpec"),
            }
        }
    }
    Ok(sc)
}

fn eval_scenario(sc: &Scenario, objectives: &[Objective]) -> Result<Vec<f64>> {
    let sr = evaluate_spectrum(&sc.structure, &sc.dispersion, &sc.grid, sc.method)?;
    objectives.iter().map(|o| o.evaluate(&sr)).collect()
}

/// Run the sweep. Rows are produced in input order; a failing point is
/// recorded as a row-level error without aborting the sweep. Errors out only
/// if every point fails.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let rows: Vec<SweepRow> = spec
        .values
        .par_iter()
        .map(|&value| {
            let run = substituted(&spec.base, spec.param, value)
                .and_then(|sc| eval_scenario(&sc, &spec.objectives));
            match run {
                Ok(objectives) => SweepRow {
                    value,
                    objectives,
                    error: None,
                },
                Err(e) => SweepRow {
                    value,
                    objectives: Vec::new(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    if rows.iter().all(|r| r.error.is_some()) {
        return Err(Error::Infeasible("every sweep point failed".into()));
    }
    Ok(rows)
}

/// Result of a scalar optimization: the best parameter value, its objective,
/// and the full evaluation trace in evaluation order.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub best_value: f64,
    pub best_objective: f64,
    pub trace: Vec<(f64, f64)>,
}

/// Grid resolution used for objective evaluations inside the optimizer.
const OPT_GRID_POINTS: usize = 4001;

/// Seed values folded into the coarse scan when feasible; published chirp
/// settings make useful anchors.
const ZETA_SEEDS: [f64; 4] = [0.18, 0.55, 1.0, 2.82];

fn zeta_objective(
    n_layers: usize,
    total_len: f64,
    d: &DispersionParams,
    objective: Objective,
    zeta: f64,
) -> Result<f64> {
    let l0 = crate::model::solve_l0(n_layers, zeta, total_len)?;
    let spec = AperiodicPolingSpec::new(n_layers, l0, zeta, 1.0)?;
    let band = predict_support_aperiodic(&spec, d)?;
    let pad = 0.5 * band.omega_width() + 30.0 / (d.b_walkoff.abs() * spec.total_len());
    let grid = FrequencyGrid::new(band.omega_lo - pad, band.omega_hi + pad, OPT_GRID_POINTS)?;
    let sr = evaluate_spectrum(&StructureSpec::Aperiodic(spec), d, &grid, Method::ClosedForm)?;
    objective.evaluate(&sr)
}

/// Maximize the objective over the poling chirp for an even-N stack of fixed
/// total length. The feasible interval (0, 2L/(N(N+1))) follows from l0 > 0
/// under the caption layer convention; the search is a 32-point coarse scan
/// (plus seeds) followed by golden-section refinement to 1e-3 relative. The
/// objective landscapes are oscillatory, which is why the scan comes first.
pub fn optimize_zeta(
    n_layers: usize,
    total_len: f64,
    d: &DispersionParams,
    objective: Objective,
) -> Result<OptimizationResult> {
    d.validate()?;
    if n_layers < 2 || !n_layers.is_multiple_of(2) {
        return Err(Error::invalid("n_layers", "need an even layer count >= 2"));
    }
    if !(total_len.is_finite() && total_len > 0.0) {
        return Err(Error::invalid("total_len", "total length must be > 0"));
    }
    let n = n_layers as f64;
    let zeta_max = 2.0 * total_len / (n * (n + 1.0));
    if !(zeta_max.is_finite() && zeta_max > 0.0) {
        return Err(Error::Infeasible(format!(
            "no feasible chirp range for N = {n_layers}, L = {total_len}"
        )));
    }

    let mut trace: Vec<(f64, f64)> = Vec::new();
    let probe = |zeta: f64, trace: &mut Vec<(f64, f64)>| -> Result<f64> {
        let v = zeta_objective(n_layers, total_len, d, objective, zeta)?;
        trace.push((zeta, v));
        Ok(v)
    };

    // Coarse scan over the open interval, with seeds folded in.
    let mut scan: Vec<f64> = (1..=32).map(|i| zeta_max * i as f64 / 33.0).collect();
    scan.extend(
        ZETA_SEEDS
            .iter()
            .copied()
            .filter(|&z| z > 0.0 && z < zeta_max * (1.0 - 1e-9)),
    );
    scan.sort_by(|a, b| a.partial_cmp(b).unwrap());
    scan.dedup();

    let mut best_i = 0usize;
    for &z in &scan {
        let v = probe(z, &mut trace)?;
        if v > trace[best_i].1 {
            best_i = trace.len() - 1;
        }
    }

    // Golden-section refinement in the bracket around the best scan point.
    let best_z = trace[best_i].0;
    let pos = scan.iter().position(|&z| z == best_z).unwrap();
    let mut a = if pos == 0 { best_z * 0.5 } else { scan[pos - 1] };
    let mut b = if pos + 1 == scan.len() {
        (best_z + zeta_max) * 0.5
    } else {
        scan[pos + 1]
    };
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = probe(x1, &mut trace)?;
    let mut f2 = probe(x2, &mut trace)?;
    while (b - a) > 1e-3 * 0.5 * (a + b) {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = probe(x1, &mut trace)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = probe(x2, &mut trace)?;
        }
    }

    // Best over the whole trace, ties to the earliest evaluation.
    let (mut best_value, mut best_objective) = trace[0];
    for &(z, v) in &trace[1..] {
        if v > best_objective {
            best_value = z;
            best_objective = v;
        }
    }
    Ok(OptimizationResult {
        best_value,
        best_objective,
        trace,
    })
}
