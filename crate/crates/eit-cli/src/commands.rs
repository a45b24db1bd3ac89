//! Dataset builders for the CLI subcommands and figure presets.

use std::f64::consts::PI;

use eit_core::dispersion::{
    group_velocity_numeric, solve_boundary_value, solve_initial_value, vg_resonance_at,
};
use eit_core::kinematics::{
    drive_profile, pulse_trajectory, vg_profile, CellSpec, DriveAttenuation,
};
use eit_core::params::{
    to_si, CouplingSpec, MediumSpec, ModelParams, SiReference,
};
use eit_core::susceptibility::{ChiModel, PopulationModel, ProbePoint};
use eit_core::{hot_gas_params, AtomParams, DriveParams, Error};

use crate::config::{CliError, CliResult, OrientationArg, RunConfig, SweepAxis};
use crate::output::{meta_block, Dataset};

/// Resolve the susceptibility model: the flag if given, else the medium's
/// natural exact model.
pub fn resolve_model(flag: Option<&str>, params: &ModelParams) -> CliResult<ChiModel> {
    match flag {
        None => Ok(match params.medium {
            MediumSpec::Beam { .. } => ChiModel::Beam(PopulationModel::Idealized),
            MediumSpec::HotGas { .. } => ChiModel::Residue,
        }),
        Some("beam") => Ok(ChiModel::Beam(PopulationModel::Idealized)),
        Some("beam-steady") => Ok(ChiModel::Beam(PopulationModel::SteadyState)),
        Some("residue") => Ok(ChiModel::Residue),
        Some("quadrature") => Ok(ChiModel::Quadrature),
        Some("eit") => Ok(ChiModel::EitApprox),
        Some(other) => Err(CliError::Config(format!(
            "unknown model '{other}' (expected beam|residue|quadrature|eit)"
        ))),
    }
}

/// Cartesian product of up to two sweep axes; yields (axis values, config).
fn sweep_points(
    base: &RunConfig,
    axes: &[SweepAxis],
) -> CliResult<Vec<(Vec<f64>, RunConfig)>> {
    if axes.len() > 2 {
        return Err(CliError::Config("at most two sweep axes are supported".into()));
    }
    let mut out = Vec::new();
    match axes {
        [] => out.push((Vec::new(), base.clone())),
        [a] => {
            for va in a.values() {
                let mut cfg = base.clone();
                cfg.apply_sweep_value(&a.name, va)?;
                out.push((vec![va], cfg));
            }
        }
        [a, b] => {
            for va in a.values() {
                for vb in b.values() {
                    let mut cfg = base.clone();
                    cfg.apply_sweep_value(&a.name, va)?;
                    cfg.apply_sweep_value(&b.name, vb)?;
                    out.push((vec![va, vb], cfg));
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// Per-point evaluation outcome: numerical failures become NaN cells,
/// parameter errors abort the run.
fn nan_on_numerical<const N: usize>(
    r: Result<[f64; N], Error>,
) -> CliResult<[f64; N]> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::Parameter(m)) => Err(CliError::Config(m)),
        Err(_) => Ok([f64::NAN; N]),
    }
}

fn probe_of(cfg: &RunConfig) -> ProbePoint {
    ProbePoint {
        d_omega: cfg.probe_d_omega.unwrap_or(cfg.params.drive.delta_d),
        d_k: cfg.probe_d_k,
    }
}

/// `chi` subcommand: susceptibility at a probe point, optionally swept.
pub fn run_chi(cfg: &RunConfig, model: ChiModel, axes: &[SweepAxis]) -> CliResult<Dataset> {
    let mut columns: Vec<String> = axes.iter().map(|a| a.name.clone()).collect();
    columns.extend(
        ["d_omega", "d_k", "Re_chi", "Im_chi"]
            .iter()
            .map(|s| s.to_string()),
    );
    let mut rows = Vec::new();
    for (axis_vals, point_cfg) in sweep_points(cfg, axes)? {
        let p = probe_of(&point_cfg);
        let vals = nan_on_numerical(
            model
                .eval(p, &point_cfg.params)
                .map(|r| [r.chi.re, r.chi.im]),
        )?;
        let mut row = axis_vals;
        row.extend([p.d_omega, p.d_k, vals[0], vals[1]]);
        rows.push(row);
    }
    let mut meta = meta_block(&cfg.params);
    meta.push(format!("model = {}", model.label()));
    Ok(Dataset {
        meta,
        columns,
        rows,
    })
}

/// `groupvel` subcommand.  Without --model: the closed resonance form
/// (hot gas only).  With --model: the numeric group velocity at the probe
/// point on the given susceptibility model.
pub fn run_groupvel(
    cfg: &RunConfig,
    model: Option<ChiModel>,
    axes: &[SweepAxis],
) -> CliResult<Dataset> {
    let mut columns: Vec<String> = axes.iter().map(|a| a.name.clone()).collect();
    let mut rows = Vec::new();
    match model {
        None => {
            columns.extend(
                ["delta_d", "v_d_over_vT", "vg_over_vT"]
                    .iter()
                    .map(|s| s.to_string()),
            );
            for (axis_vals, point_cfg) in sweep_points(cfg, axes)? {
                let derived = point_cfg.params.derive().map_err(CliError::from)?;
                let vals = nan_on_numerical(
                    vg_resonance_at(derived.v_d, &point_cfg.params).map(|vg| [vg]),
                )?;
                let mut row = axis_vals;
                row.extend([point_cfg.params.drive.delta_d, derived.v_d, vals[0]]);
                rows.push(row);
            }
        }
        Some(m) => {
            columns.extend(
                [
                    "d_omega",
                    "d_k",
                    "vg_over_vT",
                    "vg_imag_ratio",
                    "vg_temporal",
                    "vg_spatial",
                ]
                .iter()
                .map(|s| s.to_string()),
            );
            for (axis_vals, point_cfg) in sweep_points(cfg, axes)? {
                let p = probe_of(&point_cfg);
                let vals = nan_on_numerical(group_velocity_numeric(p, m, &point_cfg.params).map(
                    |g| [g.vg, g.vg_imag_ratio, g.temporal, g.spatial],
                ))?;
                let mut row = axis_vals;
                row.extend([p.d_omega, p.d_k]);
                row.extend(vals);
                rows.push(row);
            }
        }
    }
    let mut meta = meta_block(&cfg.params);
    meta.push(format!(
        "group velocity = {}",
        match model {
            None => "closed resonance form".to_string(),
            Some(m) => format!("numeric on model '{}'", m.label()),
        }
    ));
    Ok(Dataset {
        meta,
        columns,
        rows,
    })
}

/// `dispersion` subcommand: one solved branch.  The grid comes from a single
/// sweep axis (d_k for the initial-value problem, d_omega for the
/// boundary-value problem) or from grid_count/grid_halfwidth defaults.
pub fn run_dispersion(
    cfg: &RunConfig,
    model: ChiModel,
    axes: &[SweepAxis],
) -> CliResult<Dataset> {
    let params = &cfg.params;
    let derived = params.derive().map_err(CliError::from)?;
    let default_halfwidth = match (cfg.orientation, params.medium) {
        (OrientationArg::Ivp, MediumSpec::HotGas { .. }) => 2.0 * derived.dk_eit_prime,
        (OrientationArg::Ivp, MediumSpec::Beam { .. }) => {
            3.0 * params.drive.omega_rabi * params.atom.gamma_cb.sqrt() / derived.vg_tilde
        }
        (OrientationArg::Bvp, MediumSpec::HotGas { .. }) => 2.0 * derived.gamma_k,
        (OrientationArg::Bvp, MediumSpec::Beam { .. }) => 2.0 * derived.domega_eit,
    };
    let halfwidth = cfg.grid_halfwidth.unwrap_or(default_halfwidth);
    if !(halfwidth > 0.0) || !halfwidth.is_finite() {
        return Err(CliError::Config(format!(
            "dispersion grid half-width must be positive and finite, got {halfwidth}"
        )));
    }
    let center = match cfg.orientation {
        OrientationArg::Ivp => 0.0,
        OrientationArg::Bvp => params.drive.delta_d,
    };

    let grid: Vec<f64> = match axes {
        [] => (0..cfg.grid_count)
            .map(|i| {
                center - halfwidth
                    + 2.0 * halfwidth * i as f64 / (cfg.grid_count - 1) as f64
            })
            .collect(),
        [a] => {
            let expected = match cfg.orientation {
                OrientationArg::Ivp => "d_k",
                OrientationArg::Bvp => "d_omega",
            };
            if a.name.to_ascii_lowercase() != expected {
                return Err(CliError::Config(format!(
                    "dispersion sweep axis must be '{expected}' for this orientation, got '{}'",
                    a.name
                )));
            }
            a.values()
        }
        _ => {
            return Err(CliError::Config(
                "dispersion accepts at most one sweep axis".into(),
            ))
        }
    };

    let (columns, rows, label) = match cfg.orientation {
        OrientationArg::Ivp => {
            let branch =
                solve_initial_value(&grid, model, params).map_err(CliError::from)?;
            let rows: Vec<Vec<f64>> = branch
                .samples
                .iter()
                .map(|&(dk, dw)| vec![dk, dw.re, dw.im])
                .collect();
            (
                vec![
                    "d_k".to_string(),
                    "Re_domega".to_string(),
                    "Im_domega".to_string(),
                ],
                rows,
                "initial value (omega of k)",
            )
        }
        OrientationArg::Bvp => {
            let branch =
                solve_boundary_value(&grid, model, params).map_err(CliError::from)?;
            let rows: Vec<Vec<f64>> = branch
                .samples
                .iter()
                .map(|&(dw, dk)| vec![dw, dk.re, dk.im])
                .collect();
            (
                vec![
                    "d_omega".to_string(),
                    "Re_dk".to_string(),
                    "Im_dk".to_string(),
                ],
                rows,
                "boundary value (k of omega)",
            )
        }
    };
    let mut meta = meta_block(params);
    meta.push(format!("model = {}", model.label()));
    meta.push(format!("orientation = {label}"));
    Ok(Dataset {
        meta,
        columns,
        rows,
    })
}

fn load_drive_table(path: &std::path::Path) -> CliResult<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if cols.len() != 2 {
            return Err(CliError::Config(format!(
                "{}:{}: drive table rows need two columns (z, Omega)",
                path.display(),
                lineno + 1
            )));
        }
        let z = cols[0].parse::<f64>().map_err(|_| {
            CliError::Config(format!("{}:{}: bad z value", path.display(), lineno + 1))
        })?;
        let om = cols[1].parse::<f64>().map_err(|_| {
            CliError::Config(format!("{}:{}: bad Omega value", path.display(), lineno + 1))
        })?;
        rows.push((z, om));
    }
    Ok(rows)
}

/// `kinematics` subcommand (and the fig5 preset): four datasets
/// (omega, vg, trajectory, snapshots).
pub fn run_kinematics(cfg: &RunConfig) -> CliResult<Vec<(String, Dataset)>> {
    let params = &cfg.params;
    let atten = match &cfg.drive_table {
        Some(path) => DriveAttenuation::Table(load_drive_table(path)?),
        None => DriveAttenuation::SelfConsistent,
    };
    // Provisional cell for the profile stage; the pulse entries are filled
    // once v_g(0) is known.
    let mut cell = CellSpec {
        length: cfg.cell_length,
        n_z: cfg.n_z,
        omega0: cfg.omega0,
        pulse_z0: cfg.pulse_z0,
        pulse_duration: cfg.pulse_duration.unwrap_or(1.0),
    };
    let drive = drive_profile(&cell, &atten, params).map_err(CliError::from)?;
    let vgp = vg_profile(&drive, cfg.vg_mode, params).map_err(CliError::from)?;
    let vg0 = vgp.vg.eval(cell.pulse_z0);
    if !(vg0 > 0.0) || !vg0.is_finite() {
        return Err(CliError::Numerical(format!(
            "entry group velocity v_g(z0) = {vg0} is not positive; no forward propagation"
        )));
    }
    if cfg.pulse_duration.is_none() {
        cell.pulse_duration = 0.05 * cell.length / vg0;
    }
    let tau = 3.0 * cell.length / (2.0 * vg0);
    let times = cfg
        .times
        .clone()
        .unwrap_or_else(|| vec![0.0, tau, 2.0 * tau, 3.0 * tau]);
    let trace =
        pulse_trajectory(&cell, &drive, &vgp, &times, params).map_err(CliError::from)?;

    let mut meta = meta_block(params);
    meta.push(format!(
        "cell: length = {:.16e}, n_z = {}, omega0 = {:.16e}, pulse_z0 = {:.16e}, pulse_duration = {:.16e}",
        cell.length, cell.n_z, cell.omega0, cell.pulse_z0, cell.pulse_duration
    ));
    meta.push(format!("tau = {tau:.16e} (3 L / 2 v_g(0), v_g(0) = {vg0:.16e})"));
    match trace.freeze_point {
        Some(zs) => meta.push(format!("freeze point z* = {zs:.16e} (z*/L = {:.6})", zs / cell.length)),
        None => meta.push("freeze point: none in [0, L]".to_string()),
    }
    match trace.threshold_crossing {
        Some(z) => meta.push(format!(
            "warning: drive falls below the EIT threshold sqrt(gamma_cb gamma) at z = {z:.16e}"
        )),
        None => meta.push("drive stays above the EIT threshold across the cell".to_string()),
    }
    if trace.linearized_tail {
        meta.push("note: trajectory used the linearized local model near z*".to_string());
    }

    let ds = |columns: Vec<&str>, rows: Vec<Vec<f64>>| Dataset {
        meta: meta.clone(),
        columns: columns.into_iter().map(|s| s.to_string()).collect(),
        rows,
    };
    let omega_rows: Vec<Vec<f64>> = trace
        .omega_of_z
        .z
        .iter()
        .zip(trace.omega_of_z.value.iter())
        .map(|(&z, &om)| vec![z, om])
        .collect();
    let vg_rows: Vec<Vec<f64>> = trace
        .vg_of_z
        .z
        .iter()
        .zip(trace.vg_of_z.value.iter())
        .map(|(&z, &vg)| vec![z, vg])
        .collect();
    let traj_rows: Vec<Vec<f64>> = trace
        .trajectory
        .iter()
        .map(|&(t, z)| vec![t, z])
        .collect();
    let snap_rows: Vec<Vec<f64>> = trace
        .snapshots
        .iter()
        .map(|s| vec![s.t, s.center, s.width, s.amplitude])
        .collect();
    Ok(vec![
        ("omega".to_string(), ds(vec!["z", "omega"], omega_rows)),
        ("vg".to_string(), ds(vec!["z", "vg_over_vT"], vg_rows)),
        (
            "trajectory".to_string(),
            ds(vec!["t", "z_p"], traj_rows),
        ),
        (
            "snapshots".to_string(),
            ds(vec!["t", "center", "width", "amplitude"], snap_rows),
        ),
    ])
}

/// Reference hot-gas parameters shared by the figure presets.
fn preset_base(density_ratio: f64) -> ModelParams {
    hot_gas_params(0.25, 1e-3, 100.0, -100.0, density_ratio)
}

/// Beam parameters matching the hot-gas drifting beam: density equals the
/// drifting-beam fraction of nu N_cr at v = v_d = 1.
fn preset_beam_params() -> CliResult<ModelParams> {
    let hot = preset_base(1.1);
    let d = hot.derive().map_err(CliError::from)?;
    let dist = hot.medium.distribution();
    // N_beam = nu N_cr pi F(v_d) gamma G / k_d.
    let g_beam = d.coupling_g * PI * dist.f(d.v_d) * d.gamma_g / hot.drive.doppler;
    Ok(ModelParams {
        atom: AtomParams {
            gamma: 1.0,
            gamma_cb: hot.atom.gamma_cb,
            coupling: CouplingSpec::CouplingG(g_beam),
        },
        drive: DriveParams {
            omega_rabi: hot.drive.omega_rabi,
            delta_d: hot.drive.delta_d,
            doppler: hot.drive.doppler,
            c_over_vt: hot.drive.c_over_vt,
        },
        medium: MediumSpec::Beam { v: 1.0 },
    })
}

/// fig2: closed-form resonance group velocity against drive detuning for
/// three densities.
pub fn preset_fig2() -> CliResult<Dataset> {
    let columns = vec![
        "delta_d_over_gamma".to_string(),
        "v_d_over_vT".to_string(),
        "vg_over_vT__N0.6".to_string(),
        "vg_over_vT__N1.0".to_string(),
        "vg_over_vT__N1.5".to_string(),
    ];
    let base = preset_base(1.1);
    let doppler = base.drive.doppler;
    let mut rows = Vec::new();
    for i in 0..401 {
        let v_d = 4.0 * i as f64 / 400.0;
        let delta_d = -doppler * v_d;
        let mut row = vec![delta_d, v_d];
        for nu in [0.6, 1.0, 1.5] {
            let p = hot_gas_params(0.25, 1e-3, 100.0, delta_d, nu);
            let vg = vg_resonance_at(v_d, &p).map_err(CliError::from)?;
            row.push(vg);
        }
        rows.push(row);
    }
    let mut meta = meta_block(&base);
    meta.push("preset fig2: resonance group velocity vs drive detuning for N/N_cr in {0.6, 1.0, 1.5}".to_string());
    Ok(Dataset {
        meta,
        columns,
        rows,
    })
}

/// fig3a: beam dispersion and decay spectra (initial-value problem).
pub fn preset_fig3a() -> CliResult<Dataset> {
    let params = preset_beam_params()?;
    let d = params.derive().map_err(CliError::from)?;
    let halfwidth =
        3.0 * params.drive.omega_rabi * params.atom.gamma_cb.sqrt() / d.vg_tilde;
    let grid: Vec<f64> = (0..201)
        .map(|i| -halfwidth + 2.0 * halfwidth * i as f64 / 200.0)
        .collect();
    let branch = solve_initial_value(&grid, ChiModel::Beam(PopulationModel::Idealized), &params)
        .map_err(CliError::from)?;
    let rows: Vec<Vec<f64>> = branch
        .samples
        .iter()
        .map(|&(dk, dw)| vec![dk, dw.re, dw.im])
        .collect();
    let mut meta = meta_block(&params);
    meta.push("preset fig3a: beam polariton branch omega(k), idealized populations".to_string());
    Ok(Dataset {
        meta,
        columns: vec![
            "d_k".to_string(),
            "Re_domega".to_string(),
            "Im_domega".to_string(),
        ],
        rows,
    })
}

/// fig3b: hot-gas dispersion and decay spectra (initial-value problem,
/// residue model).
pub fn preset_fig3b() -> CliResult<Dataset> {
    let params = preset_base(1.1);
    let d = params.derive().map_err(CliError::from)?;
    let halfwidth = 2.0 * d.dk_eit_prime;
    let grid: Vec<f64> = (0..201)
        .map(|i| -halfwidth + 2.0 * halfwidth * i as f64 / 200.0)
        .collect();
    let branch =
        solve_initial_value(&grid, ChiModel::Residue, &params).map_err(CliError::from)?;
    let rows: Vec<Vec<f64>> = branch
        .samples
        .iter()
        .map(|&(dk, dw)| vec![dk, dw.re, dw.im])
        .collect();
    let mut meta = meta_block(&params);
    meta.push("preset fig3b: hot-gas polariton branch omega(k), velocity-averaged model".to_string());
    Ok(Dataset {
        meta,
        columns: vec![
            "d_k".to_string(),
            "Re_domega".to_string(),
            "Im_domega".to_string(),
        ],
        rows,
    })
}

/// fig5: drive profile, group-velocity profile, trajectory, and snapshots
/// for a 10 cm cell with the fig3b parameters.
pub fn preset_fig5() -> CliResult<Vec<(String, Dataset)>> {
    let params = preset_base(1.1);
    let si = to_si(&params, &SiReference::rb_like()).map_err(CliError::from)?;
    let mut cfg = RunConfig {
        params,
        ..RunConfig::default()
    };
    cfg.cell_length = si.cm_to_length(10.0);
    cfg.omega0 = 0.8;
    run_kinematics(&cfg)
}
