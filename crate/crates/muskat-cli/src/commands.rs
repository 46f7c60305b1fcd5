//! Drivers behind the subcommands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use muskat::diffraction::solve_potentials;
use muskat::evolution::{linearized_matrix, rayleigh_taylor, simulate, SimOptions, Trajectory};
use muskat::symbols::{frozen_constants, lambda_symbol, ode_oracle_lambda, ode_oracle_phi, phi_symbol, FrozenPoint};
use num_complex::Complex;

use crate::config::{SimConfig, SCHEMA};
use crate::output::{finite, InterfaceRow, RtOutput, RunMetadata, SampleRecord, SpectrumRow, SymbolRow};
use crate::CliError;

fn write_csv<R: serde::Serialize>(path: &Path, rows: &[R]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<R: serde::Serialize>(path: &Path, value: &R) -> Result<(), CliError> {
    let mut file = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file)?;
    Ok(())
}

pub fn sim_options(cfg: &SimConfig) -> SimOptions {
    SimOptions {
        n_y: cfg.n_y,
        t_end: cfg.t_end,
        rtol: cfg.rtol,
        atol: cfg.atol,
        dt_max: cfg.dt_max,
        dt_init: (cfg.dt_max / 100.0).min(1e-3),
        cfl_st: cfg.cfl_st,
        surface_tension: cfg.surface_tension,
        stop_on_rt: cfg.stop_on_rt,
        ..SimOptions::default()
    }
}

/// Runs the configured simulation and writes snapshots plus `run.json`.
/// Returns the metadata that was written.
pub fn simulate_cmd(cfg: &SimConfig, out: &Path) -> Result<RunMetadata, CliError> {
    let pair = cfg.pair()?;
    let b = cfg.bottom();
    let opts = sim_options(cfg);
    opts.validate()?;
    let traj: Trajectory = simulate(&pair, &|_| b.clone(), &cfg.fluid(), &opts)?;
    fs::create_dir_all(out)?;
    let nodes = cfg.grid().nodes();
    let last = traj.samples.len().saturating_sub(1);
    let mut records = Vec::with_capacity(traj.samples.len());
    for (i, s) in traj.samples.iter().enumerate() {
        let snapshot = if i % cfg.snapshot_stride == 0 || i == last {
            let name = format!("snapshot_{i:06}.csv");
            let rows: Vec<InterfaceRow> = nodes
                .iter()
                .zip(&s.f)
                .zip(&s.h)
                .map(|((&x, &f), &h)| InterfaceRow { x, f, h })
                .collect();
            write_csv(&out.join(&name), &rows)?;
            Some(name)
        } else {
            None
        };
        records.push(SampleRecord {
            t: s.t,
            dt_used: s.dt_used,
            margin_f: finite(s.rt.margin_f),
            margin_h: finite(s.rt.margin_h),
            rt_satisfied: s.rt.satisfied,
            snapshot,
        });
    }
    let meta = RunMetadata {
        schema: SCHEMA,
        n_x: cfg.n_x,
        n_y: cfg.n_y,
        termination: traj.termination.as_str().to_string(),
        message: traj.message.clone(),
        samples: records,
    };
    write_json(&out.join("run.json"), &meta)?;
    Ok(meta)
}

pub fn rtcheck_cmd(cfg: &SimConfig) -> Result<RtOutput, CliError> {
    let rep = rayleigh_taylor(&cfg.pair()?, &cfg.bottom(), &cfg.fluid(), cfg.n_y)?;
    Ok(RtOutput {
        schema: SCHEMA,
        margin_f: rep.margin_f,
        margin_h: rep.margin_h,
        satisfied: rep.satisfied,
    })
}

pub struct SymbolTables {
    pub lambda: Vec<SymbolRow>,
    pub phi: Vec<SymbolRow>,
}

pub fn frozen_point(cfg: &SimConfig, x: f64) -> Result<FrozenPoint<f64>, CliError> {
    let pair = cfg.pair()?;
    let sol = solve_potentials(&pair, &cfg.bottom(), &cfg.fluid(), cfg.n_y)?;
    Ok(frozen_constants(&pair, &sol, &cfg.fluid(), x)?)
}

/// Symbol tables for `m = 1..=m_max` at the frozen point `x` of the
/// configured initial state.
pub fn symbols_cmd(cfg: &SimConfig, m_max: i64, tau: f64, x: f64, oracle: bool) -> Result<SymbolTables, CliError> {
    if m_max < 1 {
        return Err(CliError::Config("--m-max must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(CliError::Config("--tau must lie in [0, 1]".into()));
    }
    if !x.is_finite() {
        return Err(CliError::Config("--x must be finite".into()));
    }
    let fp = frozen_point(cfg, x)?;
    let p = cfg.fluid();
    let row = |m: i64, formula: Complex<f64>, reference: Option<Complex<f64>>| SymbolRow {
        m,
        re_formula: formula.re,
        im_formula: formula.im,
        re_oracle: reference.map(|z| z.re),
        im_oracle: reference.map(|z| z.im),
    };
    let mut tables = SymbolTables {
        lambda: Vec::new(),
        phi: Vec::new(),
    };
    for m in 1..=m_max {
        let ol = oracle.then(|| ode_oracle_lambda(&fp, m, tau, &p)).transpose()?;
        let op = oracle.then(|| ode_oracle_phi(&fp, m, tau, &p)).transpose()?;
        tables
            .lambda
            .push(row(m, lambda_symbol(&fp, m, tau, &p)?, ol.map(|s| s.symbol_value)));
        tables
            .phi
            .push(row(m, phi_symbol(&fp, m, tau, &p)?, op.map(|s| s.symbol_value)));
    }
    Ok(tables)
}

pub fn write_symbols(tables: &SymbolTables, out: &Path) -> Result<(PathBuf, PathBuf), CliError> {
    fs::create_dir_all(out)?;
    let (l, p) = (out.join("symbols_lambda.csv"), out.join("symbols_phi.csv"));
    write_csv(&l, &tables.lambda)?;
    write_csv(&p, &tables.phi)?;
    Ok((l, p))
}

/// Parses `a..b` (inclusive) with `1 <= a <= b`.
pub fn parse_modes(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("--modes expects a..b with 1 <= a <= b, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn eigenvalues(j: [[f64; 2]; 2]) -> (Complex<f64>, Complex<f64>) {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = Complex::new(tr * tr / 4.0 - det, 0.0).sqrt();
    (tr / 2.0 + disc, tr / 2.0 - disc)
}

/// Per-mode linearized matrices about the configured flat state.
pub fn spectrum_cmd(cfg: &SimConfig, modes: (usize, usize)) -> Result<Vec<SpectrumRow>, CliError> {
    if !(cfg.initial.f.is_flat() && cfg.initial.h.is_flat() && cfg.b.as_ref().is_none_or(|b| b.is_flat())) {
        return Err(CliError::Config(
            "spectrum needs flat interfaces and a constant bottom datum".into(),
        ));
    }
    if modes.1 >= cfg.n_x / 2 {
        return Err(CliError::Config(format!(
            "mode {} is not resolved by n_x = {}",
            modes.1, cfg.n_x
        )));
    }
    let pair = cfg.pair()?;
    let b = cfg.bottom();
    let p = cfg.fluid();
    (modes.0..=modes.1)
        .map(|m| {
            let j = linearized_matrix(&pair, &b, &p, m, cfg.surface_tension, 1e-6, cfg.n_y)?;
            let (e1, e2) = eigenvalues(j);
            Ok(SpectrumRow {
                m,
                j11: j[0][0],
                j12: j[0][1],
                j21: j[1][0],
                j22: j[1][1],
                eig1_re: e1.re,
                eig1_im: e1.im,
                eig2_re: e2.re,
                eig2_im: e2.im,
            })
        })
        .collect()
}

pub fn write_spectrum(rows: &[SpectrumRow], out: &Path) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out)?;
    let path = out.join("spectrum.csv");
    write_csv(&path, rows)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_ranges() {
        assert_eq!(parse_modes("1..4").unwrap(), (1, 4));
        assert_eq!(parse_modes("3..3").unwrap(), (3, 3));
        assert!(parse_modes("0..2").is_err());
        assert!(parse_modes("4..2").is_err());
        assert!(parse_modes("2-4").is_err());
    }

    #[test]
    fn eigenvalues_of_triangular_and_rotation() {
        let (a, b) = eigenvalues([[-1.0, 5.0], [0.0, -2.0]]);
        assert!((a - Complex::new(-1.0, 0.0)).norm() < 1e-14 && (b - Complex::new(-2.0, 0.0)).norm() < 1e-14);
        let (a, _) = eigenvalues([[0.0, -1.0], [1.0, 0.0]]);
        assert!((a.im.abs() - 1.0).abs() < 1e-14);
    }
}
