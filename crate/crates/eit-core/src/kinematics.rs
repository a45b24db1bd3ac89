//! Pulse kinematics in a cell with a spatially attenuating drive: drive
//! intensity profile Omega(z), local group velocity v_g(z), and the
//! geometric-optics trajectory of an ultra-slow pulse decelerating toward
//! its freezing point.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dispersion::{group_velocity_numeric, vg_resonance_at};
use crate::error::{Error, Result};
use crate::params::{CouplingSpec, MediumSpec, ModelParams};
use crate::quadrature::integrate_complex;
use crate::susceptibility::{populations_steady_state, ChiModel, ProbePoint};

/// Cell geometry and pulse entry conditions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CellSpec {
    /// Cell length in units of v_T / gamma.
    pub length: f64,
    /// Number of spatial samples for the profiles (>= 2).
    pub n_z: usize,
    /// Drive Rabi frequency at the entry face, Omega(0).
    pub omega0: f64,
    /// Pulse center at t = 0.
    pub pulse_z0: f64,
    /// Pulse duration T (units of 1/gamma); entry width is v_g(z0) T.
    pub pulse_duration: f64,
}

impl CellSpec {
    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        if !(self.length > 0.0) {
            return Err(Error::Parameter("cell length must be positive".into()));
        }
        if self.n_z < 2 {
            return Err(Error::Parameter(
                "cell grid needs at least two samples".into(),
            ));
        }
        let threshold = (params.atom.gamma_cb * params.atom.gamma).sqrt();
        if !(self.omega0 > threshold) {
            return Err(Error::Parameter(format!(
                "entry drive Omega(0) = {} must exceed the EIT threshold sqrt(gamma_cb gamma) = {}",
                self.omega0, threshold
            )));
        }
        if !(self.pulse_z0 >= 0.0 && self.pulse_z0 < self.length) {
            return Err(Error::Parameter(
                "pulse entry position must lie inside the cell".into(),
            ));
        }
        if !(self.pulse_duration > 0.0) {
            return Err(Error::Parameter("pulse duration must be positive".into()));
        }
        Ok(())
    }
}

/// How the drive attenuates along the cell.
#[derive(Debug, Clone)]
pub enum DriveAttenuation {
    /// Beer law with the self-consistent absorption coefficient kappa_d(Omega)
    /// from the velocity-averaged drive-only coherence.
    SelfConsistent,
    /// Beer law with a fixed intensity absorption coefficient (test hook).
    ConstantKappa(f64),
    /// User-supplied (z, Omega) table, linearly interpolated.
    Table(Vec<(f64, f64)>),
}

/// A sampled profile with linear interpolation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Profile {
    pub z: Vec<f64>,
    pub value: Vec<f64>,
}

impl Profile {
    pub fn eval(&self, z: f64) -> f64 {
        let n = self.z.len();
        if z <= self.z[0] {
            return self.value[0];
        }
        if z >= self.z[n - 1] {
            return self.value[n - 1];
        }
        let i = match self
            .z
            .binary_search_by(|x| x.partial_cmp(&z).unwrap())
        {
            Ok(i) => return self.value[i],
            Err(i) => i,
        };
        let (z0, z1) = (self.z[i - 1], self.z[i]);
        let t = (z - z0) / (z1 - z0);
        self.value[i - 1] * (1.0 - t) + self.value[i] * t
    }
}

/// Sampled drive profile with threshold diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriveProfile {
    pub omega: Profile,
    /// First z where Omega(z) falls below sqrt(gamma_cb gamma), if any.
    pub threshold_crossing: Option<f64>,
}

/// Group-velocity profile with the freezing point, if one exists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VgProfile {
    pub vg: Profile,
    /// z* with v_g(z*) = 0, located by bisection on the sampled profile.
    pub freeze_point: Option<f64>,
}

/// Which group-velocity evaluator the kinematics uses at each z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VgMode {
    /// Closed resonance form (Eq.-7-style), cheap and exact at line center.
    Resonance,
    /// Numeric group velocity from the dispersion solver at the EIT center.
    Numeric,
}

/// Pulse envelope snapshot under geometric-optics transport.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub center: f64,
    /// Spatial width v_g(z_p) T.
    pub width: f64,
    /// Amplitude decay factor exp(-gamma_cb t).
    pub amplitude: f64,
}

/// Full kinematics result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KinematicsTrace {
    pub omega_of_z: Profile,
    pub vg_of_z: Profile,
    pub trajectory: Vec<(f64, f64)>,
    pub freeze_point: Option<f64>,
    pub snapshots: Vec<Snapshot>,
    pub threshold_crossing: Option<f64>,
    /// True if the integrator had to fall back to the linearized local model
    /// near the freezing point.
    pub linearized_tail: bool,
}

/// Drive intensity absorption coefficient kappa_d(Omega): Beer-law
/// coefficient from the velocity-averaged drive-only a-c coherence,
/// kappa_d = -4 pi k_d Im chi_d.
pub fn kappa_drive(omega: f64, params: &ModelParams) -> Result<f64> {
    let dist = match params.medium {
        MediumSpec::HotGas { dist } => dist,
        _ => {
            return Err(Error::Parameter(
                "drive attenuation is defined for the hot gas".into(),
            ))
        }
    };
    let q = with_drive_amplitude(omega, params)?;
    let derived = q.derive()?;
    if derived.coupling_g == 0.0 {
        return Ok(0.0);
    }
    let gamma = q.atom.gamma;
    let kd = q.drive.doppler;
    let integrand = |v: f64| -> C64 {
        let pop = populations_steady_state(v, &q.drive, &q.atom);
        let d1 = q.drive.delta_d + kd * v;
        // Drive coherence rho_ca per unit Rabi frequency:
        // -i n_ca / (gamma - i Delta_1).
        dist.f(v) * (-C64::i() * pop.n_ca) / C64::new(gamma, -d1)
    };
    let half_width = gamma * derived.big_g / kd;
    let vcut = 30f64.max(derived.v_d.abs() + 20.0);
    let breaks = [
        derived.v_d - half_width,
        derived.v_d,
        derived.v_d + half_width,
        0.0,
    ];
    let r = integrate_complex(&integrand, -vcut, vcut, &breaks, 1e-14, 1e-8, 200_000)?;
    let chi_d = derived.coupling_g * r.value;
    Ok(-4.0 * PI * kd * chi_d.im)
}

/// Adaptive Dormand-Prince RK45 for a scalar ODE, integrating from t0 to t1
/// (t1 > t0) and returning y(t1).  `f` may be evaluated slightly outside
/// [t0, t1] only at internal stage points within the last step.
pub fn rk45_to<F>(f: &F, t0: f64, t1: f64, y0: f64, rtol: f64, atol: f64) -> Result<(f64, bool)>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if t1 <= t0 {
        return Ok((y0, false));
    }
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut t = t0;
    let mut y = y0;
    let mut k0 = f(t, y)?;
    let mut h = (t1 - t0) * 1e-3;
    let h_min = (t1 - t0) * 1e-13;
    let mut underflow = false;
    let max_steps = 1_000_000usize;
    for _ in 0..max_steps {
        if t >= t1 {
            return Ok((y, underflow));
        }
        if h > t1 - t {
            h = t1 - t;
        }
        let mut k = [k0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for s in 0..6 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(s + 1) {
                yi += h * A[s][j] * kj;
            }
            k[s + 1] = f(t + C[s] * h, yi)?;
        }
        // 5th-order solution is the 6th stage's argument (FSAL property).
        let mut y5 = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            y5 += h * A[5][j] * kj;
        }
        let mut y4 = y;
        for (j, kj) in k.iter().enumerate() {
            y4 += h * B4[j] * kj;
        }
        let err = (y5 - y4).abs();
        let tol = atol + rtol * y.abs().max(y5.abs());
        if err <= tol || h <= h_min {
            if err > tol {
                underflow = true;
            }
            t += h;
            y = y5;
            k0 = k[6];
        }
        let fac = if err > 0.0 {
            (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * fac).max(h_min);
    }
    Err(Error::Numerical(
        "ODE integrator exceeded the step budget".into(),
    ))
}

/// Drive profile Omega(z) on the cell grid.
pub fn drive_profile(
    cell: &CellSpec,
    atten: &DriveAttenuation,
    params: &ModelParams,
) -> Result<DriveProfile> {
    cell.validate(params)?;
    let n = cell.n_z;
    let zs: Vec<f64> = (0..n)
        .map(|i| cell.length * i as f64 / (n - 1) as f64)
        .collect();
    let omegas: Vec<f64> = match atten {
        DriveAttenuation::Table(table) => {
            if table.len() < 2 {
                return Err(Error::Parameter(
                    "drive table needs at least two rows".into(),
                ));
            }
            let mut sorted = table.clone();
            sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            if sorted[0].0 > 0.0 || sorted.last().unwrap().0 < cell.length {
                return Err(Error::Parameter(
                    "drive table must cover the full cell [0, L]".into(),
                ));
            }
            let prof = Profile {
                z: sorted.iter().map(|r| r.0).collect(),
                value: sorted.iter().map(|r| r.1).collect(),
            };
            zs.iter().map(|&z| prof.eval(z)).collect()
        }
        DriveAttenuation::ConstantKappa(kappa) => {
            let kappa = *kappa;
            let rhs = move |_z: f64, om: f64| -> Result<f64> { Ok(-0.5 * kappa * om) };
            let mut vals = Vec::with_capacity(n);
            let mut om = cell.omega0;
            vals.push(om);
            for w in zs.windows(2) {
                om = rk45_to(&rhs, w[0], w[1], om, 1e-10, 1e-14)?.0;
                vals.push(om);
            }
            vals
        }
        DriveAttenuation::SelfConsistent => {
            // d Omega^2/dz = -kappa_d(Omega) Omega^2  =>
            // d Omega /dz = -kappa_d(Omega) Omega / 2.
            let rhs = |_z: f64, om: f64| -> Result<f64> {
                if om <= 0.0 {
                    return Ok(0.0);
                }
                Ok(-0.5 * kappa_drive(om, params)? * om)
            };
            let mut vals = Vec::with_capacity(n);
            let mut om = cell.omega0;
            vals.push(om);
            for w in zs.windows(2) {
                om = rk45_to(&rhs, w[0], w[1], om, 1e-8, 1e-12)?.0;
                vals.push(om);
            }
            vals
        }
    };
    for &om in &omegas {
        if !(om > 0.0) {
            return Err(Error::Numerical(
                "drive amplitude vanished inside the cell".into(),
            ));
        }
    }
    let threshold = (params.atom.gamma_cb * params.atom.gamma).sqrt();
    let omega = Profile {
        z: zs,
        value: omegas,
    };
    let threshold_crossing = omega
        .z
        .iter()
        .zip(omega.value.iter())
        .find(|(_, &om)| om < threshold)
        .map(|(&z, _)| z);
    Ok(DriveProfile {
        omega,
        threshold_crossing,
    })
}

/// Parameters with the drive amplitude replaced at fixed atomic density.
/// The coupling is pinned to the coupling strength g of the base parameter
/// set before the Rabi frequency changes: the critical density scales with
/// the drive, so a fixed density ratio would silently rescale the medium.
fn with_drive_amplitude(omega: f64, params: &ModelParams) -> Result<ModelParams> {
    let mut q = *params;
    q.atom.coupling = CouplingSpec::CouplingG(params.derive()?.coupling_g);
    q.drive.omega_rabi = omega;
    Ok(q)
}

/// Local group velocity for drive amplitude `omega`.
fn vg_local(omega: f64, mode: VgMode, params: &ModelParams) -> Result<f64> {
    let q = with_drive_amplitude(omega, params)?;
    match mode {
        VgMode::Resonance => {
            let derived = q.derive()?;
            vg_resonance_at(derived.v_d, &q)
        }
        VgMode::Numeric => {
            let g = group_velocity_numeric(
                ProbePoint {
                    d_omega: q.drive.delta_d,
                    d_k: 0.0,
                },
                ChiModel::Residue,
                &q,
            )?;
            Ok(g.vg)
        }
    }
}

/// Group-velocity profile from a drive profile.
pub fn vg_profile(
    drive: &DriveProfile,
    mode: VgMode,
    params: &ModelParams,
) -> Result<VgProfile> {
    let mut vgs = Vec::with_capacity(drive.omega.z.len());
    for &om in &drive.omega.value {
        vgs.push(vg_local(om, mode, params)?);
    }
    let prof = Profile {
        z: drive.omega.z.clone(),
        value: vgs,
    };
    // locate the first sign change and bisect on the continuous model
    // vg(Omega(z)) with Omega interpolated.
    let mut freeze = None;
    for i in 1..prof.z.len() {
        if prof.value[i - 1] > 0.0 && prof.value[i] <= 0.0 {
            let f = |z: f64| -> Result<f64> { vg_local(drive.omega.eval(z), mode, params) };
            let (mut a, mut b) = (prof.z[i - 1], prof.z[i]);
            let mut fa = f(a)?;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = f(m)?;
                if fa.signum() == fm.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            freeze = Some(0.5 * (a + b));
            break;
        }
    }
    Ok(VgProfile {
        vg: prof,
        freeze_point: freeze,
    })
}

/// Integrate the pulse center dz_p/dt = v_g(z_p) and build snapshots at the
/// requested times (which must be non-negative and sorted ascending).
pub fn pulse_trajectory(
    cell: &CellSpec,
    drive: &DriveProfile,
    vgp: &VgProfile,
    times: &[f64],
    params: &ModelParams,
) -> Result<KinematicsTrace> {
    cell.validate(params)?;
    if times.is_empty() {
        return Err(Error::Parameter("no trajectory times requested".into()));
    }
    let mut ts = times.to_vec();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if ts[0] < 0.0 {
        return Err(Error::Parameter("trajectory times must be >= 0".into()));
    }

    let zstar = vgp.freeze_point;
    let l = cell.length;
    // Clamp the lookup coordinate so the pulse can neither overshoot the
    // freezing point (where vg turns negative) nor leave the cell.
    let rhs = |_t: f64, z: f64| -> Result<f64> {
        let zc = match zstar {
            Some(zs) => z.min(zs),
            None => z.min(l),
        };
        let v = vgp.vg.eval(zc);
        Ok(if zstar.is_none() { v.max(0.0) } else { v })
    };

    let mut trajectory = Vec::with_capacity(ts.len());
    let mut snapshots = Vec::with_capacity(ts.len());
    let mut t_prev = 0.0;
    let mut z = cell.pulse_z0;
    let mut linearized_tail = false;
    for &t in &ts {
        let (znew, underflow) = rk45_to(&rhs, t_prev, t, z, 1e-11, 1e-13 * l)?;
        z = znew;
        if underflow {
            // Fall back to the linearized approach toward z*:
            // vg ~ s (z* - z)  =>  z(t) = z* - (z* - z_c) exp(-s dt).
            linearized_tail = true;
            if let Some(zs) = zstar {
                let dz = 1e-6 * l;
                let s = (vgp.vg.eval(zs - dz) / dz).max(0.0);
                z = zs - (zs - z) * (-s * (t - t_prev)).exp().min(1.0);
            }
        }
        if let Some(zs) = zstar {
            if z > zs {
                z = zs;
            }
        }
        t_prev = t;
        trajectory.push((t, z));
        let vg_here = vgp.vg.eval(match zstar {
            Some(zs) => z.min(zs),
            None => z.min(l),
        });
        snapshots.push(Snapshot {
            t,
            center: z,
            width: vg_here.max(0.0) * cell.pulse_duration,
            amplitude: (-params.atom.gamma_cb * t).exp(),
        });
    }
    Ok(KinematicsTrace {
        omega_of_z: drive.omega.clone(),
        vg_of_z: vgp.vg.clone(),
        trajectory,
        freeze_point: zstar,
        snapshots,
        threshold_crossing: drive.threshold_crossing,
        linearized_tail,
    })
}

/// Convenience driver: drive profile, group-velocity profile, and trajectory
/// in one call.
pub fn simulate(
    cell: &CellSpec,
    atten: &DriveAttenuation,
    mode: VgMode,
    times: &[f64],
    params: &ModelParams,
) -> Result<KinematicsTrace> {
    let drive = drive_profile(cell, atten, params)?;
    let vgp = vg_profile(&drive, mode, params)?;
    pulse_trajectory(cell, &drive, &vgp, times, params)
}
