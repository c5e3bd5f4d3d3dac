//! CSV and summary writers. Floats are written with the shortest
//! round-trip decimal representation, so identical runs produce
//! byte-identical files.

use std::io::Write;

use crate::arz::FluidState;
use crate::diagnostics::SweepRow;
use crate::error::Result;
use crate::monte_carlo::McReport;

/// Snapshot of modal coefficients, one row per cell:
/// `x, rho_0.., q_0..`, preceded by comment lines carrying the run
/// parameters.
pub fn write_snapshot_csv(
    mut out: impl Write,
    state: &FluidState,
    gamma: u32,
    epsilon: f64,
) -> Result<()> {
    let n = state.n_modes;
    writeln!(
        out,
        "# t={} k={} gamma={} epsilon={} dx={}",
        state.time, n, gamma, epsilon, state.mesh.dx
    )?;
    write!(out, "x")?;
    for i in 0..n {
        write!(out, ",rho_{i}")?;
    }
    for i in 0..n {
        write!(out, ",q_{i}")?;
    }
    writeln!(out)?;
    for c in 0..state.mesh.n_cells {
        write!(out, "{}", state.mesh.center(c))?;
        for v in state.rho_cell(c) {
            write!(out, ",{v}")?;
        }
        for v in state.q_cell(c) {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Sweep table: `rho0, sigma, n_v, gamma, probability`.
pub fn write_sweep_csv(mut out: impl Write, rows: &[SweepRow]) -> Result<()> {
    writeln!(out, "rho0,sigma,n_v,gamma,probability")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.rho0, r.sigma, r.n_v, r.gamma, r.probability
        )?;
    }
    Ok(())
}

/// Instability field: `x, probability, band_lower, band_upper, mean`.
pub fn write_field_csv(
    mut out: impl Write,
    centers: &[f64],
    probability: &[f64],
    bands: &[(f64, f64)],
    means: &[f64],
) -> Result<()> {
    writeln!(out, "x,probability,band_lower,band_upper,mean")?;
    for (((x, p), (lo, hi)), m) in centers
        .iter()
        .zip(probability)
        .zip(bands)
        .zip(means)
    {
        writeln!(out, "{x},{p},{lo},{hi},{m}")?;
    }
    Ok(())
}

/// Sample-vs-expansion comparison:
/// `t, x, mean_mc, mean_gpc, var_mc, var_gpc, abs_err_mean, abs_err_var`.
pub fn write_mc_csv(mut out: impl Write, report: &McReport) -> Result<()> {
    writeln!(
        out,
        "t,x,mean_mc,mean_gpc,var_mc,var_gpc,abs_err_mean,abs_err_var"
    )?;
    for (t, rows) in report.times.iter().zip(&report.rows) {
        for (x, mean_mc, mean_gpc, var_mc, var_gpc) in rows {
            writeln!(
                out,
                "{t},{x},{mean_mc},{mean_gpc},{var_mc},{var_gpc},{},{}",
                (mean_mc - mean_gpc).abs(),
                (var_mc - var_gpc).abs()
            )?;
        }
    }
    Ok(())
}

/// Flat key/value run summary.
pub fn write_summary(mut out: impl Write, entries: &[(String, String)]) -> Result<()> {
    for (key, value) in entries {
        writeln!(out, "{key} = {value}")?;
    }
    Ok(())
}
