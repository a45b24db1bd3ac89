//! Polariton dispersion: numeric solution of k c = omega n(omega, k) in both
//! problem orientations, group velocity from the numeric partials, and the
//! closed forms (quadratic boundary expansion, hot-gas initial-value law,
//! resonance group velocity, EIT widths).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{DerivedParams, Distribution, MediumSpec, ModelParams};
use crate::susceptibility::{ChiModel, ProbePoint};

const I: C64 = C64::new(0.0, 1.0);

/// Problem orientation of a solved branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Real Delta k maps to complex Delta omega (pulse prepared in space).
    InitialValue,
    /// Real Delta omega maps to complex Delta k (pulse injected at a boundary).
    BoundaryValue,
}

/// A sampled complex dispersion curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DispersionBranch {
    pub orientation: Orientation,
    /// (input detuning, complex output), sorted by input.
    pub samples: Vec<(f64, C64)>,
    /// Relative dispersion residual |kc - omega n| / |kc| at each sample.
    pub residuals: Vec<f64>,
    /// Label of the susceptibility model that produced the branch.
    pub model: &'static str,
}

impl DispersionBranch {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Group velocity at a probe point, with the diagnostics needed to apply the
/// validity rule (negligible imaginary part).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GroupVelocityPoint {
    /// Re d(omega)/dk in units of v_T.
    pub vg: f64,
    /// |Im d(omega)/dk| / |Re d(omega)/dk|.
    pub vg_imag_ratio: f64,
    /// Temporal-dispersion contribution Re[c / (n + omega dn/domega)].
    pub temporal: f64,
    /// Spatial-dispersion contribution Re[omega dn/dk / (n + omega dn/domega)];
    /// vg = temporal - spatial.
    pub spatial: f64,
    /// Full complex derivative d(omega)/dk.
    pub d_omega_d_k: C64,
}

/// omega_ab in units of gamma, from the drive geometry.
fn omega_ab(params: &ModelParams) -> f64 {
    params.drive.doppler * params.drive.c_over_vt - params.drive.delta_d
}

/// Residual of the dispersion equation k c = omega n(omega, k) expressed in
/// detunings: c dk - (dw - delta_d) - 2 pi (omega_ab + dw) chi.
fn dispersion_residual(dw: C64, dk: C64, chi: C64, params: &ModelParams) -> C64 {
    let c = params.drive.c_over_vt;
    c * dk - (dw - params.drive.delta_d) - 2.0 * PI * (omega_ab(params) + dw) * chi
}

/// Magnitude of k c, the natural scale for relative residuals.
fn kc_scale(params: &ModelParams) -> f64 {
    params.drive.doppler * params.drive.c_over_vt
}

/// Relative residual bound every accepted branch point must satisfy.
pub const RESIDUAL_REL_BOUND: f64 = 1e-8;

const NEWTON_MAX_ITERS: usize = 50;

/// Complex Newton iteration with a central-difference derivative.
fn newton<F>(f: &F, seed: C64, z_ref: C64, scale_min: f64) -> Result<C64>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut z = seed;
    let mut last_step = f64::INFINITY;
    for _ in 0..NEWTON_MAX_ITERS {
        let fz = f(z)?;
        let h = 1e-7 * (z - z_ref).norm().max(scale_min);
        let df = (f(z + h)? - f(z - h)?) / (2.0 * h);
        if df.norm() == 0.0 {
            return Err(Error::RootFind {
                iters: NEWTON_MAX_ITERS,
                last: z,
                residual: fz.norm(),
            });
        }
        let dz = -fz / df;
        z += dz;
        let scale = (z - z_ref).norm().max(scale_min);
        if dz.norm() <= 1e-13 * scale {
            return Ok(z);
        }
        // Stalled at the floating-point noise floor: the step is already
        // far below any physical scale and no longer contracting.
        if dz.norm() <= 1e-9 * scale && dz.norm() >= 0.25 * last_step {
            return Ok(z);
        }
        last_step = dz.norm();
    }
    let resid = f(z).map(|v| v.norm()).unwrap_or(f64::NAN);
    Err(Error::RootFind {
        iters: NEWTON_MAX_ITERS,
        last: z,
        residual: resid,
    })
}

/// Group velocity from central finite differences of n(omega, k) with one
/// level of Richardson refinement.  Steps are 1e-4 of the local width scales
/// (gamma_k in omega, the EIT wavenumber half-width in k).
pub fn group_velocity_numeric(
    p: ProbePoint,
    model: ChiModel,
    params: &ModelParams,
) -> Result<GroupVelocityPoint> {
    model.check_medium(params)?;
    let derived = params.derive()?;

    let n_of = |dw: f64, dk: f64| -> Result<C64> {
        let chi = model.eval_complex(dw.into(), dk.into(), params, &derived)?;
        Ok(1.0 + 2.0 * PI * chi)
    };

    let h_w = 1e-4 * derived.gamma_k;
    let scale_k = match params.medium {
        MediumSpec::Beam { .. } => derived.dk_eit,
        MediumSpec::HotGas { .. } => derived.dk_eit_prime,
    };
    let h_k = 1e-4 * scale_k;
    if !(h_w > 0.0) || !(h_k > 0.0) || !h_k.is_finite() {
        return Err(Error::Numerical(
            "degenerate finite-difference step for group velocity".into(),
        ));
    }

    let central = |h: f64, axis_k: bool| -> Result<C64> {
        let (pa, pb) = if axis_k {
            ((p.d_omega, p.d_k + h), (p.d_omega, p.d_k - h))
        } else {
            ((p.d_omega + h, p.d_k), (p.d_omega - h, p.d_k))
        };
        Ok((n_of(pa.0, pa.1)? - n_of(pb.0, pb.1)?) / (2.0 * h))
    };
    let richardson = |h: f64, axis_k: bool| -> Result<C64> {
        let d1 = central(h, axis_k)?;
        let d2 = central(0.5 * h, axis_k)?;
        Ok((4.0 * d2 - d1) / 3.0)
    };

    let n = n_of(p.d_omega, p.d_k)?;
    let dn_dw = richardson(h_w, false)?;
    let dn_dk = richardson(h_k, true)?;

    let omega = omega_ab(params) + p.d_omega;
    let c = params.drive.c_over_vt;
    let denom = n + omega * dn_dw;
    if denom.norm() < 1e-14 * (omega * dn_dw).norm() {
        return Err(Error::SingularDispersion {
            denom_abs: denom.norm(),
        });
    }

    let d_omega_d_k = (c - omega * dn_dk) / denom;
    let temporal = (c / denom).re;
    let spatial = (omega * dn_dk / denom).re;
    let vg = d_omega_d_k.re;
    Ok(GroupVelocityPoint {
        vg,
        vg_imag_ratio: d_omega_d_k.im.abs() / vg.abs(),
        temporal,
        spatial,
        d_omega_d_k,
    })
}

/// Linear seed slope d(Delta omega)/d(Delta k) of the resonant branch.
fn seed_slope(params: &ModelParams, derived: &DerivedParams) -> f64 {
    match params.medium {
        MediumSpec::Beam { v } => derived.vg_tilde - v,
        MediumSpec::HotGas { .. } => derived.vg_tilde_prime - derived.v_d,
    }
}

/// Solve the initial-value problem omega = omega(k) on a grid of real
/// wavenumber detunings, tracking the resonant (EIT) branch by
/// seed-and-continuation.
pub fn solve_initial_value(
    dk_grid: &[f64],
    model: ChiModel,
    params: &ModelParams,
) -> Result<DispersionBranch> {
    model.check_medium(params)?;
    let derived = params.derive()?;
    if dk_grid.is_empty() {
        return Err(Error::Parameter("empty wavenumber grid".into()));
    }
    let mut grid: Vec<f64> = dk_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let delta_d = params.drive.delta_d;
    let c = params.drive.c_over_vt;
    let scale = kc_scale(params);
    let gamma = params.atom.gamma;

    let solve_point = |dk: f64, seed: C64| -> Result<C64> {
        if derived.coupling_g == 0.0 {
            // Vacuum: c dk = dw - delta_d exactly.
            return Ok(C64::new(delta_d + c * dk, 0.0));
        }
        let f = |dw: C64| -> Result<C64> {
            let chi = model.eval_complex(dw, dk.into(), params, &derived)?;
            Ok(dispersion_residual(dw, dk.into(), chi, params))
        };
        let root = newton(&f, seed, C64::from(delta_d), derived.gamma_k)?;
        if (root - delta_d).norm() >= gamma {
            return Err(Error::WrongBranch { root });
        }
        Ok(root)
    };

    let slope = seed_slope(params, &derived);
    let start = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap();

    let mut out: Vec<Option<C64>> = vec![None; grid.len()];
    let seed0 = C64::from(delta_d) + grid[start] * slope;
    out[start] = Some(solve_point(grid[start], seed0)?);
    for i in (start + 1)..grid.len() {
        let prev = out[i - 1].unwrap();
        let seed = prev + (grid[i] - grid[i - 1]) * slope;
        out[i] = Some(solve_point(grid[i], seed)?);
    }
    for i in (0..start).rev() {
        let prev = out[i + 1].unwrap();
        let seed = prev + (grid[i] - grid[i + 1]) * slope;
        out[i] = Some(solve_point(grid[i], seed)?);
    }

    let samples: Vec<(f64, C64)> = grid
        .iter()
        .zip(out.iter())
        .map(|(dk, z)| (*dk, z.unwrap()))
        .collect();
    let mut residuals = Vec::with_capacity(samples.len());
    for &(dk, dw) in &samples {
        let chi = if derived.coupling_g == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            model.eval_complex(dw, dk.into(), params, &derived)?
        };
        let rel = dispersion_residual(dw, dk.into(), chi, params).norm() / scale;
        if rel > RESIDUAL_REL_BOUND {
            return Err(Error::RootFind {
                iters: NEWTON_MAX_ITERS,
                last: dw,
                residual: rel,
            });
        }
        residuals.push(rel);
    }
    Ok(DispersionBranch {
        orientation: Orientation::InitialValue,
        samples,
        residuals,
        model: model.label(),
    })
}

/// Solve the boundary-value problem k = k(omega) on a grid of real frequency
/// detunings.
pub fn solve_boundary_value(
    domega_grid: &[f64],
    model: ChiModel,
    params: &ModelParams,
) -> Result<DispersionBranch> {
    model.check_medium(params)?;
    let derived = params.derive()?;
    if domega_grid.is_empty() {
        return Err(Error::Parameter("empty frequency grid".into()));
    }
    let mut grid: Vec<f64> = domega_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let delta_d = params.drive.delta_d;
    let c = params.drive.c_over_vt;
    let scale = kc_scale(params);
    let slope = seed_slope(params, &derived);
    let k_scale = (derived.kappa0 / derived.alpha.abs().max(1e-6)).max(1e-300);

    let solve_point = |dw: f64, seed: C64| -> Result<C64> {
        if derived.coupling_g == 0.0 {
            return Ok(C64::new((dw - delta_d) / c, 0.0));
        }
        let f = |dk: C64| -> Result<C64> {
            let chi = model.eval_complex(dw.into(), dk, params, &derived)?;
            Ok(dispersion_residual(dw.into(), dk, chi, params))
        };
        let root = newton(&f, seed, C64::new(0.0, 0.0), k_scale)?;
        // The vacuum branch has negligible absorption; the resonant branch
        // carries at least the residual EIT absorption.
        if root.im.abs() < 1e-3 * k_scale {
            return Err(Error::WrongBranch { root });
        }
        Ok(root)
    };

    // Start at the grid point closest to the EIT center.
    let start = grid
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - delta_d)
                .abs()
                .partial_cmp(&(b.1 - delta_d).abs())
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();

    let seed_at = |dw: f64| -> C64 {
        let dom = dw - delta_d;
        let re = if slope.abs() > 1e-12 { dom / slope } else { 0.0 };
        let alpha = if derived.alpha.abs() > 1e-6 {
            derived.alpha
        } else {
            1e-6
        };
        C64::new(re, -derived.kappa0 / alpha)
    };

    let mut out: Vec<Option<C64>> = vec![None; grid.len()];
    out[start] = Some(solve_point(grid[start], seed_at(grid[start]))?);
    for i in (start + 1)..grid.len() {
        let prev = out[i - 1].unwrap();
        let seed = prev
            + if slope.abs() > 1e-12 {
                (grid[i] - grid[i - 1]) / slope
            } else {
                0.0
            };
        out[i] = Some(solve_point(grid[i], seed)?);
    }
    for i in (0..start).rev() {
        let prev = out[i + 1].unwrap();
        let seed = prev
            + if slope.abs() > 1e-12 {
                (grid[i] - grid[i + 1]) / slope
            } else {
                0.0
            };
        out[i] = Some(solve_point(grid[i], seed)?);
    }

    let samples: Vec<(f64, C64)> = grid
        .iter()
        .zip(out.iter())
        .map(|(dw, z)| (*dw, z.unwrap()))
        .collect();
    let mut residuals = Vec::with_capacity(samples.len());
    for &(dw, dk) in &samples {
        let chi = if derived.coupling_g == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            model.eval_complex(dw.into(), dk, params, &derived)?
        };
        let rel = dispersion_residual(dw.into(), dk, chi, params).norm() / scale;
        if rel > RESIDUAL_REL_BOUND {
            return Err(Error::RootFind {
                iters: NEWTON_MAX_ITERS,
                last: dk,
                residual: rel,
            });
        }
        residuals.push(rel);
    }
    Ok(DispersionBranch {
        orientation: Orientation::BoundaryValue,
        samples,
        residuals,
        model: model.label(),
    })
}

/// Coefficients of the quadratic boundary-value expansion
/// dk = dk0 + (1/alpha) [dw/vg - i kappa0 - i xi (dw/alpha)^2].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadraticExpansion {
    pub dk0: f64,
    pub kappa0: f64,
    pub xi: f64,
    pub alpha: f64,
    pub vg_tilde: f64,
    /// Detuning at which absorption doubles, |vg - v| Omega sqrt(gamma_cb/gamma) / vg.
    pub ddomega_eit: f64,
    /// EIT frequency half-width, dk_eit |vg - v|.
    pub domega_eit: f64,
}

impl QuadraticExpansion {
    /// Evaluate Delta k at probe offset d_omega (relative to the EIT center).
    pub fn eval(&self, d_omega: f64) -> C64 {
        let a = self.alpha;
        self.dk0
            + (1.0 / a)
                * (C64::from(d_omega / self.vg_tilde)
                    - I * self.kappa0
                    - I * self.xi * (d_omega / a).powi(2))
    }
}

/// Closed-form coefficients of the boundary-value expansion for a beam at
/// one-photon resonance (delta_d = 0).
pub fn boundary_quadratic(params: &ModelParams) -> Result<QuadraticExpansion> {
    let v = match params.medium {
        MediumSpec::Beam { v } => v,
        _ => {
            return Err(Error::Parameter(
                "boundary expansion is defined for a beam medium".into(),
            ))
        }
    };
    if params.drive.delta_d != 0.0 {
        return Err(Error::Parameter(
            "closed-form boundary expansion coefficients require delta_d = 0".into(),
        ));
    }
    let derived = params.derive()?;
    if derived.alpha == 0.0 {
        return Err(Error::ExpansionSingular);
    }
    let _ = v;
    Ok(QuadraticExpansion {
        dk0: 0.0,
        kappa0: derived.kappa0,
        xi: derived.xi,
        alpha: derived.alpha,
        vg_tilde: derived.vg_tilde,
        ddomega_eit: derived.alpha.abs()
            * params.drive.omega_rabi
            * (params.atom.gamma_cb / params.atom.gamma).sqrt(),
        domega_eit: derived.domega_eit,
    })
}

/// Closed hot-gas initial-value dispersion law:
/// dw = delta_d - v_d dk + i gamma_k(dk) + Omega^2/(gamma(1+G)) / (A + i),
/// A = gamma G dk / (2 pi g (N'/N) k_d).  At dk = 0 the drive terms cancel
/// to delta_d + i gamma_cb exactly.
pub fn closed_dispersion(dk: f64, params: &ModelParams) -> Result<C64> {
    match params.medium {
        MediumSpec::HotGas { .. } => {}
        _ => {
            return Err(Error::Parameter(
                "closed dispersion law applies to the hot gas".into(),
            ))
        }
    }
    let derived = params.derive()?;
    let gamma = params.atom.gamma;
    let om = params.drive.omega_rabi;
    let gamma_k = derived.gamma_k_at(dk, params);
    let a = derived.gamma_g * dk
        / (2.0 * PI * derived.coupling_g * derived.n_prime_ratio * params.drive.doppler);
    Ok(C64::from(params.drive.delta_d - derived.v_d * dk)
        + I * gamma_k
        + om * om / (gamma * (1.0 + derived.big_g)) / C64::new(a, 1.0))
}

/// Group velocity, zeros, and minimum at the EIT resonance from the
/// resonance closed form v_g = beta N_cr / (N F(v_d)) - v_d.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VgResonance {
    /// v_g at the parameter set's own v_d.
    pub vg: f64,
    /// Drift velocities where v_g crosses zero (exist iff N >= N_cr).
    pub zeros: Option<(f64, f64)>,
    /// Minimum of v_g over v_d.
    pub vg_min: f64,
    /// Location of the minimum.
    pub v_d_at_min: f64,
}

/// Resonance group velocity as a function of drift velocity.
pub fn vg_resonance_at(v_d: f64, params: &ModelParams) -> Result<f64> {
    let derived = params.derive()?;
    let dist = match params.medium {
        MediumSpec::HotGas { dist } => dist,
        _ => {
            return Err(Error::Parameter(
                "resonance group velocity applies to the hot gas".into(),
            ))
        }
    };
    let nu = derived.density_ratio;
    if nu == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(derived.beta / (nu * dist.f(v_d)) - v_d)
}

/// Full resonance group-velocity summary.
pub fn vg_resonance(params: &ModelParams) -> Result<VgResonance> {
    let derived = params.derive()?;
    let dist = match params.medium {
        MediumSpec::HotGas { dist } => dist,
        _ => {
            return Err(Error::Parameter(
                "resonance group velocity applies to the hot gas".into(),
            ))
        }
    };
    let nu = derived.density_ratio;
    let vg = vg_resonance_at(derived.v_d, params)?;
    match dist {
        Distribution::Lorentzian => {
            // v_g(v_d) = (1 + v_d^2)/(2 nu) - v_d.
            let zeros = if nu >= 1.0 {
                let s = (nu * nu - 1.0).sqrt();
                Some((nu - s, nu + s))
            } else {
                None
            };
            Ok(VgResonance {
                vg,
                zeros,
                vg_min: (1.0 - nu * nu) / (2.0 * nu),
                v_d_at_min: nu,
            })
        }
        Distribution::Maxwellian => {
            // No closed zeros: scan and bisect numerically.
            let f = |v: f64| derived.beta / (nu * dist.f(v)) - v;
            let hi = 2.0 + 3.0 * nu;
            let n = 4000;
            let mut vg_min = f64::INFINITY;
            let mut v_at = 0.0;
            let mut crossings: Vec<f64> = Vec::new();
            let mut prev = f(0.0);
            for i in 1..=n {
                let v = hi * i as f64 / n as f64;
                let val = f(v);
                if val < vg_min {
                    vg_min = val;
                    v_at = v;
                }
                if prev.signum() != val.signum() {
                    let (mut a, mut b) = (hi * (i - 1) as f64 / n as f64, v);
                    for _ in 0..200 {
                        let m = 0.5 * (a + b);
                        if f(a).signum() == f(m).signum() {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    crossings.push(0.5 * (a + b));
                }
                prev = val;
            }
            let zeros = if crossings.len() >= 2 {
                Some((crossings[0], *crossings.last().unwrap()))
            } else {
                None
            };
            Ok(VgResonance {
                vg,
                zeros,
                vg_min,
                v_d_at_min: v_at,
            })
        }
    }
}

/// Beam EIT widths (only defined for beam media).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BeamWidths {
    /// Delta k_EIT = Omega^2 / (gamma vg_tilde).
    pub dk_eit: f64,
    /// Delta omega_EIT = Delta k_EIT |vg_tilde - v|.
    pub domega_eit: f64,
    /// Absorption-doubling detuning |vg_tilde - v| Omega sqrt(gamma_cb/gamma) / vg_tilde.
    pub ddomega_eit: f64,
}

/// All EIT width symbols.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EitMetrics {
    /// Beam widths; None for hot-gas media.
    pub beam: Option<BeamWidths>,
    /// Hot-gas EIT half-width gamma_k / vg_tilde_prime.
    pub dk_eit_prime: f64,
    /// Hot-gas decay-doubling detuning sqrt(gamma_cb gamma_k) / vg_tilde_prime.
    pub ddk_eit_prime: f64,
}

/// Compute the EIT width set.
pub fn eit_metrics(params: &ModelParams) -> Result<EitMetrics> {
    let derived = params.derive()?;
    assert!(
        derived.ddk_eit_prime <= derived.dk_eit_prime,
        "decay-doubling detuning must not exceed the EIT half-width"
    );
    let beam = match params.medium {
        MediumSpec::Beam { v } => Some(BeamWidths {
            dk_eit: derived.dk_eit,
            domega_eit: derived.domega_eit,
            ddomega_eit: (derived.vg_tilde - v).abs()
                * params.drive.omega_rabi
                * (params.atom.gamma_cb / params.atom.gamma).sqrt()
                / derived.vg_tilde,
        }),
        MediumSpec::HotGas { .. } => None,
    };
    Ok(EitMetrics {
        beam,
        dk_eit_prime: derived.dk_eit_prime,
        ddk_eit_prime: derived.ddk_eit_prime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{hot_gas_params, AtomParams, CouplingSpec, DriveParams};
    use crate::susceptibility::PopulationModel;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn fig3b() -> ModelParams {
        hot_gas_params(0.25, 1e-3, 100.0, -100.0, 1.1)
    }

    /// Beam parameters deep in the EIT regime where the idealized closed
    /// forms are accurate: Omega^2/(gamma_cb gamma) = 2.5e4.
    fn deep_beam(v: f64, vg_target: f64) -> ModelParams {
        let omega: f64 = 0.5;
        let g = omega * omega / (2.0 * PI * 100.0 * vg_target);
        ModelParams {
            atom: AtomParams {
                gamma: 1.0,
                gamma_cb: 1e-5,
                coupling: CouplingSpec::CouplingG(g),
            },
            drive: DriveParams {
                omega_rabi: omega,
                delta_d: 0.0,
                doppler: 100.0,
                c_over_vt: 1e6,
            },
            medium: MediumSpec::Beam { v },
        }
    }

    #[test]
    fn vacuum_initial_value_branch() {
        let mut p = hot_gas_params(0.25, 1e-3, 100.0, 0.0, 0.0);
        p.atom.coupling = CouplingSpec::CouplingG(0.0);
        let grid = [-1e-6, 0.0, 2e-6];
        let b = solve_initial_value(&grid, ChiModel::Residue, &p).unwrap();
        for &(dk, dw) in &b.samples {
            assert_abs_diff_eq!(dw.re, 1e6 * dk, epsilon = 1e-12);
            assert_eq!(dw.im, 0.0);
        }
    }

    #[test]
    fn vacuum_boundary_value_branch() {
        let mut p = hot_gas_params(0.25, 1e-3, 100.0, 0.0, 0.0);
        p.atom.coupling = CouplingSpec::CouplingG(0.0);
        let grid = [-0.5, 0.0, 0.25];
        let b = solve_boundary_value(&grid, ChiModel::Residue, &p).unwrap();
        for &(dw, dk) in &b.samples {
            assert_abs_diff_eq!(dk.re, dw / 1e6, epsilon = 1e-18);
            assert_eq!(dk.im, 0.0);
        }
    }

    #[test]
    fn closed_dispersion_center_cancellation() {
        let p = fig3b();
        let dw = closed_dispersion(0.0, &p).unwrap();
        assert_relative_eq!(dw.re, p.drive.delta_d, max_relative = 1e-14);
        assert_relative_eq!(dw.im, p.atom.gamma_cb, max_relative = 1e-12);
    }

    #[test]
    fn closed_dispersion_decay_growth_at_doubling_detuning() {
        // At dk = sqrt(gamma_cb gamma_k)/vg' the quadratic term alone would
        // double the decay; the full law adds the linear |dk| broadening as
        // well.  Frozen value for the reference parameter set.
        let p = fig3b();
        let d = p.derive().unwrap();
        let dw = closed_dispersion(d.ddk_eit_prime, &p).unwrap();
        assert_relative_eq!(dw.im, 2.263023e-3, max_relative = 1e-5);
        assert!(dw.im > 1.9 * p.atom.gamma_cb && dw.im < 2.6 * p.atom.gamma_cb);
    }

    #[test]
    fn closed_dispersion_linearization() {
        // For |dk| << dk'_EIT: Re(dw) - delta_d = dk (vg' - v_d) and
        // Im(dw) = gamma_cb + |dk| gamma G / k_d + [Omega^2/(gamma(1+G))] A^2,
        // since the power-broadening part of gamma_k cancels against the
        // resonant term at A = 0.
        let p = fig3b();
        let d = p.derive().unwrap();
        let dk = 0.01 * d.dk_eit_prime;
        let dw = closed_dispersion(dk, &p).unwrap();
        assert_relative_eq!(
            dw.re - p.drive.delta_d,
            dk * (d.vg_tilde_prime - d.v_d),
            max_relative = 0.01
        );
        let a = d.gamma_g * dk
            / (2.0 * PI * d.coupling_g * d.n_prime_ratio * p.drive.doppler);
        let lin_im = p.atom.gamma_cb
            + dk.abs() * d.gamma_g / p.drive.doppler
            + p.drive.omega_rabi.powi(2) / (p.atom.gamma * (1.0 + d.big_g)) * a * a;
        assert_relative_eq!(dw.im, lin_im, max_relative = 1e-6);
    }

    #[test]
    fn closed_dispersion_agrees_with_solver_in_window() {
        let p = fig3b();
        let d = p.derive().unwrap();
        let grid: Vec<f64> = (-5..=5).map(|i| 0.1 * i as f64 * d.dk_eit_prime).collect();
        let b = solve_initial_value(&grid, ChiModel::Residue, &p).unwrap();
        for &(dk, dw) in &b.samples {
            let closed = closed_dispersion(dk, &p).unwrap();
            assert!(
                (dw - closed).norm() / dw.norm() < 0.05,
                "dk={dk}: solver {dw} closed {closed}"
            );
        }
    }

    #[test]
    fn vg_resonance_closed_values() {
        // N = 1.5 N_cr
        let p = hot_gas_params(0.25, 1e-3, 100.0, -150.0, 1.5);
        let r = vg_resonance(&p).unwrap();
        let (z1, z2) = r.zeros.unwrap();
        assert_relative_eq!(z1, 1.5 - 1.25f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(z2, 1.5 + 1.25f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(r.vg_min, -0.41666666666666666, max_relative = 1e-12);
        assert_relative_eq!(r.v_d_at_min, 1.5, max_relative = 1e-12);
        // quadratic-form cross-check: vg = (vd - z1)(vd - z2)/(2 nu)
        let vd = 1.5;
        assert_relative_eq!(
            r.vg,
            (vd - z1) * (vd - z2) / (2.0 * 1.5),
            max_relative = 1e-10,
            epsilon = 1e-12
        );

        // N = N_cr: double zero at v_d = 1.
        let p = hot_gas_params(0.25, 1e-3, 100.0, -100.0, 1.0);
        let r = vg_resonance(&p).unwrap();
        let (z1, z2) = r.zeros.unwrap();
        assert_relative_eq!(z1, 1.0, max_relative = 1e-12);
        assert_relative_eq!(z2, 1.0, max_relative = 1e-12);
        assert_abs_diff_eq!(r.vg_min, 0.0, epsilon = 1e-14);

        // N = 0.6 N_cr: no zeros, vg(v_d = 0) = 1/(2*0.6).
        let p = hot_gas_params(0.25, 1e-3, 100.0, -0.0, 0.6);
        let r = vg_resonance(&p).unwrap();
        assert!(r.zeros.is_none());
        assert!(r.vg_min > 0.0);
        assert_relative_eq!(
            vg_resonance_at(0.0, &p).unwrap(),
            1.0 / 1.2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn vg_resonance_sign_structure() {
        for nu in [0.6, 1.0, 1.5, 2.5] {
            let p = hot_gas_params(0.25, 1e-3, 100.0, -100.0, nu);
            let r = vg_resonance(&p).unwrap();
            for vd in [0.0, 0.3, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0] {
                let vg = vg_resonance_at(vd, &p).unwrap();
                let inside = r
                    .zeros
                    .map(|(a, b)| vd > a && vd < b)
                    .unwrap_or(false);
                assert_eq!(vg < 0.0, inside, "nu={nu} vd={vd} vg={vg}");
            }
        }
    }

    #[test]
    fn vg_resonance_maxwellian_numeric() {
        let mut p = hot_gas_params(0.25, 1e-3, 100.0, -100.0, 1.5);
        p.medium = MediumSpec::HotGas {
            dist: Distribution::Maxwellian,
        };
        let r = vg_resonance(&p).unwrap();
        assert!(r.vg_min < r.vg);
        if let Some((a, b)) = r.zeros {
            assert!(a < b);
            assert!(vg_resonance_at(0.5 * (a + b), &p).unwrap() < 0.0);
        }
    }

    #[test]
    fn eit_metrics_identities() {
        let p = fig3b();
        let d = p.derive().unwrap();
        let m = eit_metrics(&p).unwrap();
        assert!(m.beam.is_none());
        assert_relative_eq!(
            m.ddk_eit_prime / m.dk_eit_prime,
            (p.atom.gamma_cb / d.gamma_k).sqrt(),
            max_relative = 1e-12
        );

        let b = deep_beam(0.0, 0.02);
        let metrics = eit_metrics(&b).unwrap().beam.unwrap();
        let db = b.derive().unwrap();
        // at rest: Delta omega_EIT = Omega^2/gamma
        assert_relative_eq!(
            metrics.domega_eit,
            b.drive.omega_rabi.powi(2),
            max_relative = 1e-10
        );
        assert_relative_eq!(metrics.dk_eit, db.dk_eit, max_relative = 1e-15);
    }

    #[test]
    fn group_velocity_beam_at_rest() {
        // No spatial dispersion at v = 0: v_s = 0 and vg = vg_tilde.
        let p = deep_beam(0.0, 0.02);
        let d = p.derive().unwrap();
        let g = group_velocity_numeric(
            ProbePoint { d_omega: 0.0, d_k: 0.0 },
            ChiModel::Beam(PopulationModel::Idealized),
            &p,
        )
        .unwrap();
        assert_abs_diff_eq!(g.spatial, 0.0, epsilon = 1e-8 * g.vg.abs());
        assert_relative_eq!(g.vg, d.vg_tilde, max_relative = 0.01);
    }

    #[test]
    fn group_velocity_beam_galilean_identity() {
        let d0 = deep_beam(0.0, 0.02).derive().unwrap();
        for v in [0.005, 0.01, 0.035] {
            let p = deep_beam(v, 0.02);
            let g = group_velocity_numeric(
                ProbePoint { d_omega: 0.0, d_k: 0.0 },
                ChiModel::Beam(PopulationModel::Idealized),
                &p,
            )
            .unwrap();
            assert_relative_eq!(g.vg, d0.vg_tilde - v, max_relative = 0.01);
        }
    }

    #[test]
    fn boundary_quadratic_closed_forms() {
        // v = 0: alpha = 1.
        let p0 = deep_beam(0.0, 0.02);
        let q0 = boundary_quadratic(&p0).unwrap();
        assert_eq!(q0.alpha, 1.0);
        assert_eq!(q0.dk0, 0.0);

        // v = vg/2: alpha = 1/2 and absorption at fixed d_omega doubles
        // (the kappa0 term) or more (the xi term grows x8).
        let d = p0.derive().unwrap();
        let ph = deep_beam(0.5 * d.vg_tilde, 0.02);
        let qh = boundary_quadratic(&ph).unwrap();
        assert_relative_eq!(qh.alpha, 0.5, max_relative = 1e-9);
        assert_relative_eq!(
            qh.eval(0.0).im,
            2.0 * q0.eval(0.0).im,
            max_relative = 1e-9
        );

        // alpha = 0 is singular.
        let ps = deep_beam(p0.derive().unwrap().vg_tilde, 0.02);
        assert!(matches!(
            boundary_quadratic(&ps),
            Err(Error::ExpansionSingular)
        ));

        // hot gas is rejected
        assert!(boundary_quadratic(&fig3b()).is_err());
    }

    #[test]
    fn boundary_quadratic_matches_solver() {
        let p = deep_beam(0.005, 0.02);
        let q = boundary_quadratic(&p).unwrap();
        let grid: Vec<f64> = (-4..=4).map(|i| 0.25 * i as f64 * q.ddomega_eit).collect();
        let b = solve_boundary_value(&grid, ChiModel::Beam(PopulationModel::Idealized), &p)
            .unwrap();
        for &(dw, dk) in &b.samples {
            let closed = q.eval(dw);
            assert!(
                (dk - closed).norm() / dk.norm() < 0.05,
                "dw={dw}: solver {dk} closed {closed}"
            );
        }
    }

    #[test]
    fn boundary_center_absorption_is_kappa0() {
        let p = deep_beam(0.0, 0.02);
        let d = p.derive().unwrap();
        let b = solve_boundary_value(&[0.0], ChiModel::Beam(PopulationModel::Idealized), &p)
            .unwrap();
        let dk = b.samples[0].1;
        assert_relative_eq!(-dk.im, d.kappa0, max_relative = 0.02);
    }

    #[test]
    fn initial_value_branch_beam_center_decay() {
        // Beam initial-value problem: decay at the dip center equals
        // gamma_cb (idealized populations).
        let p = deep_beam(0.01, 0.02);
        let b = solve_initial_value(&[0.0], ChiModel::Beam(PopulationModel::Idealized), &p)
            .unwrap();
        assert_relative_eq!(b.samples[0].1.im, p.atom.gamma_cb, max_relative = 0.01);
        assert!(b.max_residual() <= RESIDUAL_REL_BOUND);
    }

    #[test]
    fn branch_samples_are_sorted_and_bounded() {
        let p = fig3b();
        let d = p.derive().unwrap();
        let grid = [
            0.5 * d.dk_eit_prime,
            -0.5 * d.dk_eit_prime,
            0.0,
            0.25 * d.dk_eit_prime,
        ];
        let b = solve_initial_value(&grid, ChiModel::Residue, &p).unwrap();
        for w in b.samples.windows(2) {
            assert!(w[0].0 < w[1].0);
        }
        assert!(b.max_residual() <= RESIDUAL_REL_BOUND);
    }

    #[test]
    fn group_velocity_matches_branch_slope_where_valid() {
        // Where |Im d(omega)/dk| / |Re| < 0.2, the numeric group velocity
        // agrees with the local slope of the solved branch within 2%.
        let p = fig3b();
        let d = p.derive().unwrap();
        for frac in [0.3, 0.5, 0.8] {
            let dk = frac * d.dk_eit_prime;
            let g = group_velocity_numeric(
                ProbePoint { d_omega: p.drive.delta_d, d_k: dk },
                ChiModel::Residue,
                &p,
            );
            let g = match g {
                Ok(g) => g,
                Err(_) => continue,
            };
            if g.vg_imag_ratio >= 0.2 {
                continue;
            }
            // slope of Re branch by solving at dk +- h. The branch point at
            // this dk has d_omega != delta_d, so evaluate the numeric group
            // velocity there instead of at the center.
            let h = 1e-3 * d.dk_eit_prime;
            let b = solve_initial_value(&[dk - h, dk, dk + h], ChiModel::Residue, &p).unwrap();
            let slope = (b.samples[2].1.re - b.samples[0].1.re) / (2.0 * h);
            let gb = group_velocity_numeric(
                ProbePoint {
                    d_omega: b.samples[1].1.re,
                    d_k: dk,
                },
                ChiModel::Residue,
                &p,
            )
            .unwrap();
            if gb.vg_imag_ratio < 0.2 {
                assert_relative_eq!(gb.vg, slope, max_relative = 0.02);
            }
        }
    }
}
