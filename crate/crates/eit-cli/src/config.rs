//! Flat key=value configuration handling and sweep-axis parsing.

use std::fmt;
use std::path::Path;

use eit_core::params::{CouplingSpec, Distribution, MediumSpec, ModelParams};
use eit_core::{hot_gas_params, VgMode};

/// Exit-code-bearing CLI error.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments (exit 2).
    Config(String),
    /// Numerical failure (exit 3).
    Numerical(String),
    /// I/O failure (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<eit_core::Error> for CliError {
    fn from(e: eit_core::Error) -> Self {
        match e {
            eit_core::Error::Parameter(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Dispersion problem orientation selected in the config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationArg {
    Ivp,
    Bvp,
}

/// Fully resolved run configuration: model parameters plus the
/// subcommand-specific settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    /// Probe frequency detuning; defaults to the EIT center (delta_d).
    pub probe_d_omega: Option<f64>,
    /// Probe wavenumber detuning; defaults to 0.
    pub probe_d_k: f64,
    pub orientation: OrientationArg,
    /// Grid size for dispersion solves without an explicit sweep.
    pub grid_count: usize,
    /// Grid half-width for dispersion solves; default 2 dk'_EIT (initial
    /// value) or 2 gamma_k (boundary value).
    pub grid_halfwidth: Option<f64>,
    // kinematics
    pub cell_length: f64,
    pub n_z: usize,
    pub omega0: f64,
    pub pulse_z0: f64,
    /// Pulse duration; default 0.05 L / v_g(0).
    pub pulse_duration: Option<f64>,
    /// Trajectory times; default {0, tau, 2 tau, 3 tau}.
    pub times: Option<Vec<f64>>,
    pub vg_mode: VgMode,
    /// Optional drive-profile override: path to a two-column (z, Omega)
    /// text table.
    pub drive_table: Option<std::path::PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            // reference hot-gas parameter set (drive-selected beam at v_d = 1)
            params: hot_gas_params(0.25, 1e-3, 100.0, -100.0, 1.1),
            probe_d_omega: None,
            probe_d_k: 0.0,
            orientation: OrientationArg::Ivp,
            grid_count: 201,
            grid_halfwidth: None,
            cell_length: 2500.0 * std::f64::consts::PI,
            n_z: 201,
            omega0: 0.8,
            pulse_z0: 0.0,
            pulse_duration: None,
            times: None,
            vg_mode: VgMode::Resonance,
            drive_table: None,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> CliResult<f64> {
    value
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("key '{key}': expected a number, got '{value}'")))
}

fn parse_usize(key: &str, value: &str) -> CliResult<usize> {
    value
        .parse::<usize>()
        .map_err(|_| CliError::Config(format!("key '{key}': expected an integer, got '{value}'")))
}

impl RunConfig {
    /// Apply one key=value setting.
    pub fn apply(&mut self, key: &str, value: &str) -> CliResult<()> {
        let key_lc = key.to_ascii_lowercase();
        match key_lc.as_str() {
            "gamma_cb" => self.params.atom.gamma_cb = parse_f64(key, value)?,
            "omega_rabi" => self.params.drive.omega_rabi = parse_f64(key, value)?,
            "delta_d" => self.params.drive.delta_d = parse_f64(key, value)?,
            "doppler" => self.params.drive.doppler = parse_f64(key, value)?,
            "c_over_vt" => self.params.drive.c_over_vt = parse_f64(key, value)?,
            "density_ratio" => {
                self.params.atom.coupling = CouplingSpec::DensityRatio(parse_f64(key, value)?)
            }
            "coupling_g" => {
                self.params.atom.coupling = CouplingSpec::CouplingG(parse_f64(key, value)?)
            }
            "medium" => match value.to_ascii_lowercase().as_str() {
                "beam" => {
                    let v = match self.params.medium {
                        MediumSpec::Beam { v } => v,
                        _ => 0.0,
                    };
                    self.params.medium = MediumSpec::Beam { v };
                }
                "hot" | "hot_gas" | "hotgas" | "gas" => {
                    let dist = self.params.medium.distribution();
                    self.params.medium = MediumSpec::HotGas { dist };
                }
                other => {
                    return Err(CliError::Config(format!(
                        "key 'medium': expected beam|hot, got '{other}'"
                    )))
                }
            },
            "distribution" => {
                let dist = match value.to_ascii_lowercase().as_str() {
                    "lorentzian" => Distribution::Lorentzian,
                    "maxwellian" => Distribution::Maxwellian,
                    other => {
                        return Err(CliError::Config(format!(
                            "key 'distribution': expected lorentzian|maxwellian, got '{other}'"
                        )))
                    }
                };
                match self.params.medium {
                    MediumSpec::HotGas { .. } => {
                        self.params.medium = MediumSpec::HotGas { dist }
                    }
                    _ => {
                        return Err(CliError::Config(
                            "key 'distribution' applies to the hot-gas medium".into(),
                        ))
                    }
                }
            }
            "beam_velocity" => {
                let v = parse_f64(key, value)?;
                match self.params.medium {
                    MediumSpec::Beam { .. } => self.params.medium = MediumSpec::Beam { v },
                    _ => {
                        return Err(CliError::Config(
                            "key 'beam_velocity' requires medium=beam (set medium first)".into(),
                        ))
                    }
                }
            }
            "d_omega" => self.probe_d_omega = Some(parse_f64(key, value)?),
            "d_k" => self.probe_d_k = parse_f64(key, value)?,
            "orientation" => {
                self.orientation = match value.to_ascii_lowercase().as_str() {
                    "ivp" | "initial" | "initial_value" => OrientationArg::Ivp,
                    "bvp" | "boundary" | "boundary_value" => OrientationArg::Bvp,
                    other => {
                        return Err(CliError::Config(format!(
                            "key 'orientation': expected ivp|bvp, got '{other}'"
                        )))
                    }
                }
            }
            "grid_count" => {
                self.grid_count = parse_usize(key, value)?;
                if self.grid_count < 2 {
                    return Err(CliError::Config("grid_count must be >= 2".into()));
                }
            }
            "grid_halfwidth" => self.grid_halfwidth = Some(parse_f64(key, value)?),
            "cell_length" => self.cell_length = parse_f64(key, value)?,
            "n_z" => self.n_z = parse_usize(key, value)?,
            "omega0" => self.omega0 = parse_f64(key, value)?,
            "pulse_z0" => self.pulse_z0 = parse_f64(key, value)?,
            "pulse_duration" => self.pulse_duration = Some(parse_f64(key, value)?),
            "times" => {
                let mut ts = Vec::new();
                for tok in value.split(',') {
                    ts.push(parse_f64(key, tok.trim())?);
                }
                self.times = Some(ts);
            }
            "drive_table" => {
                self.drive_table = Some(std::path::PathBuf::from(value));
            }
            "vg_mode" => {
                self.vg_mode = match value.to_ascii_lowercase().as_str() {
                    "resonance" => VgMode::Resonance,
                    "numeric" => VgMode::Numeric,
                    other => {
                        return Err(CliError::Config(format!(
                            "key 'vg_mode': expected resonance|numeric, got '{other}'"
                        )))
                    }
                }
            }
            _ => {
                return Err(CliError::Config(format!("unknown config key '{key}'")));
            }
        }
        Ok(())
    }

    /// Apply a numeric sweep value; only numeric model/probe keys are
    /// sweepable.
    pub fn apply_sweep_value(&mut self, key: &str, value: f64) -> CliResult<()> {
        const SWEEPABLE: [&str; 10] = [
            "gamma_cb",
            "omega_rabi",
            "delta_d",
            "doppler",
            "c_over_vt",
            "density_ratio",
            "coupling_g",
            "beam_velocity",
            "d_omega",
            "d_k",
        ];
        let key_lc = key.to_ascii_lowercase();
        if !SWEEPABLE.contains(&key_lc.as_str()) {
            return Err(CliError::Config(format!(
                "parameter '{key}' is not sweepable (numeric model/probe keys only)"
            )));
        }
        // 17 significant digits survive the round trip exactly.
        self.apply(&key_lc, &format!("{value:.16e}"))
    }

    /// Load key=value lines from a file ('#' comments and blank lines
    /// ignored).
    pub fn load_file(&mut self, path: &Path) -> CliResult<()> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }
}

/// One parsed sweep axis.
#[derive(Debug, Clone)]
pub struct SweepAxis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepAxis {
    /// Parse "name:start:stop:count".
    pub fn parse(spec: &str) -> CliResult<SweepAxis> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 4 {
            return Err(CliError::Config(format!(
                "sweep spec '{spec}' must be name:start:stop:count"
            )));
        }
        let start = parse_f64("sweep start", parts[1])?;
        let stop = parse_f64("sweep stop", parts[2])?;
        let count = parse_usize("sweep count", parts[3])?;
        if count < 2 {
            return Err(CliError::Config("sweep count must be >= 2".into()));
        }
        Ok(SweepAxis {
            name: parts[0].to_string(),
            start,
            stop,
            count,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count)
            .map(|i| {
                self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
            })
            .collect()
    }
}
