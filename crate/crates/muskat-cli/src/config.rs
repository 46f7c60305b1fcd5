//! JSON run configuration.

use std::path::{Path, PathBuf};

use muskat::geometry::{make_grid, InterfacePair, PeriodicFn, PeriodicGrid};
use muskat::operators::FluidParams;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA: u32 = 1;

/// `constant + Σ cos_amp·cos(mx) + sin_amp·sin(mx)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    #[serde(default)]
    pub constant: f64,
    /// Entries `(m, cos_amp, sin_amp)`.
    #[serde(default)]
    pub modes: Vec<(u32, f64, f64)>,
}

impl Profile {
    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            modes: Vec::new(),
        }
    }

    pub fn sample(&self, grid: PeriodicGrid<f64>) -> PeriodicFn<f64> {
        PeriodicFn::from_fn(grid, |x| {
            self.modes.iter().fold(self.constant, |acc, &(m, a, b)| {
                let m = f64::from(m);
                acc + a * (m * x).cos() + b * (m * x).sin()
            })
        })
    }

    pub fn is_flat(&self) -> bool {
        self.modes.iter().all(|&(_, a, b)| a == 0.0 && b == 0.0)
    }

    fn check(&self, name: &str, n_x: usize) -> Result<(), CliError> {
        if !self.constant.is_finite() {
            return Err(CliError::Config(format!("{name}.constant must be finite")));
        }
        for &(m, a, b) in &self.modes {
            if !a.is_finite() || !b.is_finite() {
                return Err(CliError::Config(format!("{name}: non-finite amplitude for mode {m}")));
            }
            if m as usize >= n_x / 2 {
                return Err(CliError::Config(format!(
                    "{name}: mode {m} is not resolved by n_x = {n_x}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub k: f64,
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub g: f64,
    #[serde(default)]
    pub gamma_f: f64,
    #[serde(default)]
    pub gamma_h: f64,
    /// Height of the bottom line.
    pub d: f64,
}

impl Default for Params {
    fn default() -> Self {
        let u = FluidParams::<f64>::unit();
        Self {
            k: u.k,
            mu_minus: u.mu_minus,
            mu_plus: u.mu_plus,
            rho_minus: u.rho_minus,
            rho_plus: u.rho_plus,
            g: u.g,
            gamma_f: u.gamma_f,
            gamma_h: u.gamma_h,
            d: u.d,
        }
    }
}

impl From<&Params> for FluidParams<f64> {
    fn from(p: &Params) -> Self {
        FluidParams {
            k: p.k,
            mu_minus: p.mu_minus,
            mu_plus: p.mu_plus,
            rho_minus: p.rho_minus,
            rho_plus: p.rho_plus,
            g: p.g,
            gamma_f: p.gamma_f,
            gamma_h: p.gamma_h,
            d: p.d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub f: Profile,
    pub h: Profile,
}

fn default_n_y() -> usize {
    16
}
fn default_t_end() -> f64 {
    1.0
}
fn default_rtol() -> f64 {
    1e-6
}
fn default_atol() -> f64 {
    1e-9
}
fn default_dt_max() -> f64 {
    0.1
}
fn default_cfl() -> f64 {
    1.0
}
fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub schema: u32,
    pub n_x: usize,
    #[serde(default = "default_n_y")]
    pub n_y: usize,
    #[serde(default)]
    pub params: Params,
    pub initial: Initial,
    /// Bottom pressure datum; `g·ρ₊` when absent.
    #[serde(default)]
    pub b: Option<Profile>,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    #[serde(default = "default_cfl")]
    pub cfl_st: f64,
    #[serde(default)]
    pub surface_tension: bool,
    #[serde(default)]
    pub stop_on_rt: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: SimConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA {
            return Err(CliError::Config(format!(
                "unsupported schema {} (expected {SCHEMA})",
                self.schema
            )));
        }
        make_grid::<f64>(self.n_x).map_err(|e| CliError::Config(e.to_string()))?;
        if self.n_y < 8 {
            return Err(CliError::Config("n_y must be >= 8".into()));
        }
        self.fluid().validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.initial.f.check("initial.f", self.n_x)?;
        self.initial.h.check("initial.h", self.n_x)?;
        if let Some(b) = &self.b {
            b.check("b", self.n_x)?;
        }
        for (name, v) in [
            ("t_end", self.t_end),
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("dt_max", self.dt_max),
            ("cfl_st", self.cfl_st),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(CliError::Config(format!("{name} must be finite and non-negative")));
            }
        }
        if self.snapshot_stride == 0 {
            return Err(CliError::Config("snapshot_stride must be >= 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> PeriodicGrid<f64> {
        make_grid(self.n_x).expect("validated grid size")
    }

    pub fn fluid(&self) -> FluidParams<f64> {
        (&self.params).into()
    }

    pub fn pair(&self) -> Result<InterfacePair<f64>, CliError> {
        let grid = self.grid();
        Ok(InterfacePair::new(
            self.initial.f.sample(grid),
            self.initial.h.sample(grid),
            self.params.d,
        )?)
    }

    pub fn bottom(&self) -> PeriodicFn<f64> {
        let p = self.fluid();
        let profile = self.b.clone().unwrap_or_else(|| Profile::constant(p.g * p.rho_plus));
        profile.sample(self.grid())
    }

    /// `--out` wins over the configured directory.
    pub fn out_dir(&self, cli: Option<&Path>) -> PathBuf {
        cli.map(Path::to_path_buf)
            .or_else(|| self.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("muskat-out"))
    }
}
