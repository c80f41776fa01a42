//! Deterministic data export: fixed 9-significant-digit formatting, LF line
//! endings, byte-identical for identical inputs.

use std::io::Write;

use biphoton::gaussfactor::FactorScanResult;
use biphoton::optimize::{OptimizationResult, SweepRow, SweepSpec};
use biphoton::spectra::{PeakSet, SpectrumResult};

use crate::config::OutputFormat;
use crate::AppError;

/// 9 significant digits, exponent notation.
pub fn sig9(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn write_spectrum(
    w: &mut dyn Write,
    sr: &SpectrumResult,
    format: OutputFormat,
) -> Result<(), AppError> {
    let io = |e: std::io::Error| AppError::Io(e.to_string());
    match format {
        OutputFormat::Csv => {
            writeln!(w, "omega_over_c_um_inv,wavelength_um,density_norm").map_err(io)?;
            for i in 0..sr.omega_over_c.len() {
                writeln!(
                    w,
                    "{},{},{}",
                    sig9(sr.omega_over_c[i]),
                    sig9(sr.signal_wavelength[i]),
                    sig9(sr.density[i])
                )
                .map_err(io)?;
            }
        }
        OutputFormat::Jsonl => {
            for i in 0..sr.omega_over_c.len() {
                writeln!(
                    w,
                    "{{\"omega_over_c_um_inv\":{},\"wavelength_um\":{},\"density_norm\":{}}}",
                    sig9(sr.omega_over_c[i]),
                    sig9(sr.signal_wavelength[i]),
                    sig9(sr.density[i])
                )
                .map_err(io)?;
            }
        }
    }
    Ok(())
}

pub fn write_peak_table(
    w: &mut dyn Write,
    predicted: Option<&PeakSet>,
    detected: &PeakSet,
) -> Result<(), AppError> {
    let io = |e: std::io::Error| AppError::Io(e.to_string());
    writeln!(
        w,
        "source,omega_over_c_um_inv,wavelength_um,height_norm,width_um_inv"
    )
    .map_err(io)?;
    if let Some(ps) = predicted {
        for p in &ps.peaks {
            writeln!(
                w,
                "predicted,{},{},{},{}",
                sig9(p.omega_over_c),
                sig9(p.wavelength),
                sig9(p.height),
                sig9(p.width)
            )
            .map_err(io)?;
        }
    }
    for p in &detected.peaks {
        writeln!(
            w,
            "detected,{},{},{},{}",
            sig9(p.omega_over_c),
            sig9(p.wavelength),
            sig9(p.height),
            sig9(p.width)
        )
        .map_err(io)?;
    }
    Ok(())
}

pub fn write_sweep_table(
    w: &mut dyn Write,
    spec: &SweepSpec,
    rows: &[SweepRow],
) -> Result<(), AppError> {
    let io = |e: std::io::Error| AppError::Io(e.to_string());
    let names: Vec<&str> = spec.objectives.iter().map(|o| o.name()).collect();
    writeln!(w, "param,value,{},error", names.join(",")).map_err(io)?;
    for row in rows {
        let objs: Vec<String> = if row.error.is_none() {
            row.objectives.iter().map(|v| sig9(*v)).collect()
        } else {
            vec![String::new(); spec.objectives.len()]
        };
        let err = row
            .error
            .as_deref()
            .map(|e| e.replace(',', ";"))
            .unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{}",
            spec.param.name(),
            sig9(row.value),
            objs.join(","),
            err
        )
        .map_err(io)?;
    }
    Ok(())
}

pub fn write_optimize_trace(
    w: &mut dyn Write,
    result: &OptimizationResult,
) -> Result<(), AppError> {
    let io = |e: std::io::Error| AppError::Io(e.to_string());
    writeln!(w, "zeta_um,objective").map_err(io)?;
    for &(z, v) in &result.trace {
        writeln!(w, "{},{}", sig9(z), sig9(v)).map_err(io)?;
    }
    Ok(())
}

pub fn write_factor_report(w: &mut dyn Write, r: &FactorScanResult) -> Result<(), AppError> {
    let io = |e: std::io::Error| AppError::Io(e.to_string());
    writeln!(
        w,
        "factor scan n={} m={} threshold={}",
        r.n,
        r.m_trunc,
        sig9(r.threshold)
    )
    .map_err(io)?;
    for &(trial, mag) in &r.candidates {
        let mark = if mag > r.threshold {
            format!(" accepted cofactor={}", r.n / trial)
        } else {
            String::new()
        };
        writeln!(w, "l={trial} magnitude={}{mark}", sig9(mag)).map_err(io)?;
    }
    let accepted: Vec<String> = r.accepted.iter().map(u64::to_string).collect();
    if accepted.is_empty() {
        writeln!(w, "accepted: none (no nontrivial factors found)").map_err(io)?;
    } else {
        writeln!(w, "accepted: {}", accepted.join(" ")).map_err(io)?;
    }
    Ok(())
}
