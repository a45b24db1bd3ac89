//! Complex probe susceptibility chi(omega, k) in four models: mono-velocity
//! beam, hot-gas residue formula, hot-gas velocity quadrature (oracle), and
//! the resonant EIT-exciton approximation.
//!
//! Sign convention: fields vary as exp(+i(omega t - k z)), so an absorbing
//! medium has Im chi <= 0, decaying initial-value branches have
//! Im(Delta omega) >= 0, and absorbing boundary-value branches have
//! Im(Delta k) <= 0.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{AtomParams, DerivedParams, Distribution, DriveParams, MediumSpec, ModelParams};
use crate::quadrature::integrate_complex;

const I: C64 = C64::new(0.0, 1.0);

/// Probe detunings: d_omega = omega - omega_ab (units of gamma) and
/// d_k = k - k_d - omega_cb/c (units of gamma/v_T).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub d_omega: f64,
    pub d_k: f64,
}

/// Level populations and the two inversion combinations entering the beam
/// susceptibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Populations {
    pub rho_aa: f64,
    pub rho_bb: f64,
    pub rho_cc: f64,
    /// rho_aa - rho_bb.
    pub n_ab: f64,
    /// rho_cc - rho_aa.
    pub n_ca: f64,
}

impl Populations {
    fn from_rho(rho_aa: f64, rho_bb: f64, rho_cc: f64) -> Self {
        Populations {
            rho_aa,
            rho_bb,
            rho_cc,
            n_ab: rho_aa - rho_bb,
            n_ca: rho_cc - rho_aa,
        }
    }

    /// Strong-drive optical-pumping limit n_ab -> -1, n_ca -> 0, the limit
    /// in which the beam group-velocity closed forms are exact.
    pub fn idealized() -> Self {
        Populations::from_rho(0.0, 1.0, 0.0)
    }

    /// Zero-field values: the two lower levels share the population.
    pub fn zero_field() -> Self {
        Populations::from_rho(0.0, 0.5, 0.5)
    }
}

/// Which population model the beam susceptibility uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PopulationModel {
    /// Drive-only steady state at the atom's velocity.
    SteadyState,
    /// n_ab = -1, n_ca = 0.
    Idealized,
}

/// A single susceptibility value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexResponse {
    pub chi: C64,
}

/// Drive-only steady state of the three-level system.
///
/// Rate model: the excited state a decays at gamma/2 each to b and c; b and c
/// exchange population incoherently at gamma_cb/2 each way; the drive couples
/// a-c with Rabi frequency Omega at one-photon detuning
/// Delta_1 = delta_d + k_d v.  Eliminating the a-c coherence gives the pump
/// rate R = 2 Omega^2 gamma / (gamma^2 + Delta_1^2) and the closed form below.
pub fn populations_steady_state(v: f64, drive: &DriveParams, atom: &AtomParams) -> Populations {
    let gamma = atom.gamma;
    let gcb = atom.gamma_cb;
    let om = drive.omega_rabi;
    let delta1 = drive.delta_d + drive.doppler * v;
    let r = 2.0 * om * om * gamma / (gamma * gamma + delta1 * delta1);
    let rho_cc = 1.0 / (2.0 + (r / (r + gamma)) * (1.0 + gamma / gcb));
    let rho_aa = r * rho_cc / (r + gamma);
    let rho_bb = rho_cc + gamma * rho_aa / gcb;
    Populations::from_rho(rho_aa, rho_bb, rho_cc)
}

/// Analytic continuation of |dk| used inside the residue and EIT-exciton
/// formulas when the wavenumber detuning is complex (boundary-value solves):
/// equals |dk| for real dk and is analytic within each half-plane
/// Re dk >= 0 / Re dk < 0.
fn abs_continued(dk: C64) -> C64 {
    if dk.re >= 0.0 {
        dk
    } else {
        -dk
    }
}

/// Beam susceptibility at complex detunings.
pub fn chi_beam_complex(
    d_omega: C64,
    d_k: C64,
    v: f64,
    pops: &Populations,
    params: &ModelParams,
    derived: &DerivedParams,
) -> C64 {
    let gamma = params.atom.gamma;
    let gcb = params.atom.gamma_cb;
    let om = params.drive.omega_rabi;
    let delta_d = params.drive.delta_d;
    let kd = params.drive.doppler;
    let g = derived.coupling_g;

    let gamma_ac_conj = C64::new(gamma, -(delta_d + kd * v));
    let gamma_ab = gamma + I * (d_omega + (kd + d_k) * v);
    let gamma_cb = gcb + I * (d_omega - delta_d + d_k * v);
    I * g * (pops.n_ab * gamma_cb + om * om * pops.n_ca / gamma_ac_conj)
        / (gamma_ab * gamma_cb + om * om)
}

/// Hot-gas susceptibility from the two-pole residue formula at complex
/// detunings.
pub fn chi_hot_residue_complex(
    d_omega: C64,
    d_k: C64,
    params: &ModelParams,
    derived: &DerivedParams,
) -> C64 {
    let gamma = params.atom.gamma;
    let gcb = params.atom.gamma_cb;
    let om = params.drive.omega_rabi;
    let om2 = om * om;
    let delta_d = params.drive.delta_d;
    let kd = params.drive.doppler;
    let big_g = derived.big_g;
    let g = derived.coupling_g;

    let k = kd + d_k;
    let abs_dk = abs_continued(d_k);

    let g1ab = gamma + k + I * d_omega;
    let g2ab = gamma * (1.0 + big_g * k / kd) + I * (d_omega - k * delta_d / kd);
    let g1ac = C64::new(gamma + kd, delta_d);
    let g1cb = gcb + abs_dk + I * (d_omega - delta_d);
    let g2cb =
        gcb + abs_dk * gamma * big_g / kd + I * (d_omega - delta_d - d_k * delta_d / kd);
    let r1 = om2 / (gamma * gamma + (C64::new(delta_d, -kd)).powi(2));
    let r2 = om2 / (kd * kd + (C64::new(delta_d, gamma * big_g)).powi(2));

    let eta1 = (r1 * g1ac - g1cb * (1.0 + 2.0 * gamma * r1 / gcb))
        / (1.0 + gamma * gamma * (big_g * big_g - 1.0) * r1 / om2);
    let eta2 = kd * r2 * (om2 / (big_g - 1.0) - g2cb * gamma) / (gcb * gamma * big_g);

    0.5 * I * g * (eta1 / (om2 + g1ab * g1cb) + eta2 / (om2 + g2ab * g2cb))
}

/// EIT-exciton (resonant two-term) approximation at complex detunings.
pub fn chi_eit_complex(
    d_omega: C64,
    d_k: C64,
    params: &ModelParams,
    derived: &DerivedParams,
) -> C64 {
    let gamma = params.atom.gamma;
    let om = params.drive.omega_rabi;
    let kd = params.drive.doppler;
    let big_g = derived.big_g;

    let gamma_k = derived.gamma_k + abs_continued(d_k) * derived.gamma_g / kd;
    // omega - omega_k with omega_k = omega_ab + delta_d k/k_d + i gamma_k.
    let resonant = (d_omega - params.drive.delta_d) + derived.v_d * d_k - I * gamma_k;
    derived.coupling_g * derived.n_prime_ratio / (gamma * big_g)
        * (om * om / (gamma * (1.0 + big_g) * resonant) - I)
}

/// Hot-gas susceptibility by direct velocity quadrature at complex detunings.
pub fn chi_hot_quadrature_complex(
    d_omega: C64,
    d_k: C64,
    params: &ModelParams,
    derived: &DerivedParams,
    dist: Distribution,
) -> Result<C64> {
    let kd = params.drive.doppler;
    let v_d = derived.v_d;
    let beam_width = derived.gamma_g / kd;

    let integrand = |v: f64| {
        let pops = populations_steady_state(v, &params.drive, &params.atom);
        dist.f(v) * chi_beam_complex(d_omega, d_k, v, &pops, params, derived)
    };

    // Subdivision hints: the drifting beam and its power-broadened wings, the
    // distribution core, and the two-photon-resonant velocity class.
    let mut pts = vec![v_d, v_d - beam_width, v_d + beam_width, 0.0, -1.0, 1.0];
    if d_k.norm() > 1e-12 {
        let v_two_photon = (d_omega - params.drive.delta_d) / (-d_k);
        pts.push(v_two_photon.re);
    }

    let cutoff = 10f64.max(v_d.abs() + 10.0 * beam_width);
    let abs_tol = 1e-14;
    let rel_tol = 1e-8;

    let core = integrate_complex(&integrand, -cutoff, cutoff, &pts, abs_tol, rel_tol, 80_000)?;
    let mut value = core.value;
    let mut err = core.abs_error;

    // Far tails |v| > cutoff via the substitution u = 1/v, which maps each
    // tail onto (0, 1/cutoff] with a bounded integrand (the Lorentzian's
    // slowly decaying wings are handled exactly; Maxwellian tails vanish).
    for sign in [1.0f64, -1.0] {
        let tail = |u: f64| {
            let v = sign / u;
            let weight = match dist {
                Distribution::Lorentzian => {
                    1.0 / (std::f64::consts::PI * (1.0 + u * u))
                }
                Distribution::Maxwellian => dist.f(v) / (u * u),
            };
            let pops = populations_steady_state(v, &params.drive, &params.atom);
            weight * chi_beam_complex(d_omega, d_k, v, &pops, params, derived)
        };
        let t = integrate_complex(&tail, 0.0, 1.0 / cutoff, &[], abs_tol, rel_tol, 10_000)?;
        value += t.value;
        err += t.abs_error;
    }

    let target = 1e-6 * value.norm() + 1e-12;
    if err > target {
        return Err(Error::Quadrature {
            achieved: err,
            requested: target,
            evals: core.evals,
        });
    }
    Ok(value)
}

/// Beam susceptibility (Eq.-2 style) at a real probe point.
pub fn chi_beam(
    p: ProbePoint,
    v: f64,
    pops: &Populations,
    params: &ModelParams,
) -> Result<ComplexResponse> {
    let derived = params.derive()?;
    Ok(ComplexResponse {
        chi: chi_beam_complex(p.d_omega.into(), p.d_k.into(), v, pops, params, &derived),
    })
}

/// Hot-gas susceptibility from the residue formula at a real probe point.
///
/// Requires a hot-gas medium with the Lorentzian distribution (the residue
/// evaluation exists only for it).
pub fn chi_hot_residue(p: ProbePoint, params: &ModelParams) -> Result<ComplexResponse> {
    match params.medium {
        MediumSpec::HotGas {
            dist: Distribution::Lorentzian,
        } => {}
        MediumSpec::HotGas {
            dist: Distribution::Maxwellian,
        } => {
            return Err(Error::Parameter(
                "residue susceptibility requires the Lorentzian distribution; use the quadrature model for Maxwellian".into(),
            ))
        }
        MediumSpec::Beam { .. } => {
            return Err(Error::Parameter(
                "residue susceptibility requires a hot-gas medium".into(),
            ))
        }
    }
    let derived = params.derive()?;
    Ok(ComplexResponse {
        chi: chi_hot_residue_complex(p.d_omega.into(), p.d_k.into(), params, &derived),
    })
}

/// Hot-gas susceptibility by direct velocity quadrature at a real probe
/// point; supports both distributions.
pub fn chi_hot_quadrature(
    p: ProbePoint,
    params: &ModelParams,
    dist: Distribution,
) -> Result<ComplexResponse> {
    let derived = params.derive()?;
    Ok(ComplexResponse {
        chi: chi_hot_quadrature_complex(p.d_omega.into(), p.d_k.into(), params, &derived, dist)?,
    })
}

/// Resonant EIT-exciton approximation at a real probe point.
pub fn chi_eit_approx(p: ProbePoint, params: &ModelParams) -> Result<ComplexResponse> {
    let derived = params.derive()?;
    Ok(ComplexResponse {
        chi: chi_eit_complex(p.d_omega.into(), p.d_k.into(), params, &derived),
    })
}

/// Susceptibility model selector used by the dispersion solvers and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChiModel {
    /// Mono-velocity beam (requires a Beam medium).
    Beam(PopulationModel),
    /// Hot-gas residue formula (requires HotGas + Lorentzian).
    Residue,
    /// Hot-gas velocity quadrature with the medium's distribution.
    Quadrature,
    /// EIT-exciton approximation.
    EitApprox,
}

impl ChiModel {
    pub fn label(&self) -> &'static str {
        match self {
            ChiModel::Beam(PopulationModel::Idealized) => "beam",
            ChiModel::Beam(PopulationModel::SteadyState) => "beam-steady-state",
            ChiModel::Residue => "residue",
            ChiModel::Quadrature => "quadrature",
            ChiModel::EitApprox => "eit",
        }
    }

    /// Validate that the model is applicable to the medium.
    pub fn check_medium(&self, params: &ModelParams) -> Result<()> {
        match (self, params.medium) {
            (ChiModel::Beam(_), MediumSpec::Beam { .. }) => Ok(()),
            (ChiModel::Beam(_), _) => Err(Error::Parameter(
                "beam susceptibility model requires a Beam medium".into(),
            )),
            (
                ChiModel::Residue,
                MediumSpec::HotGas {
                    dist: Distribution::Lorentzian,
                },
            ) => Ok(()),
            (ChiModel::Residue, _) => Err(Error::Parameter(
                "residue model requires a hot-gas medium with Lorentzian distribution".into(),
            )),
            (ChiModel::Quadrature, MediumSpec::HotGas { .. }) => Ok(()),
            (ChiModel::Quadrature, _) => Err(Error::Parameter(
                "quadrature model requires a hot-gas medium".into(),
            )),
            (ChiModel::EitApprox, _) => Ok(()),
        }
    }

    /// Evaluate chi at complex detunings.
    pub fn eval_complex(
        &self,
        d_omega: C64,
        d_k: C64,
        params: &ModelParams,
        derived: &DerivedParams,
    ) -> Result<C64> {
        match self {
            ChiModel::Beam(pop_model) => {
                let v = match params.medium {
                    MediumSpec::Beam { v } => v,
                    _ => {
                        return Err(Error::Parameter(
                            "beam susceptibility model requires a Beam medium".into(),
                        ))
                    }
                };
                let pops = match pop_model {
                    PopulationModel::Idealized => Populations::idealized(),
                    PopulationModel::SteadyState => {
                        populations_steady_state(v, &params.drive, &params.atom)
                    }
                };
                Ok(chi_beam_complex(d_omega, d_k, v, &pops, params, derived))
            }
            ChiModel::Residue => Ok(chi_hot_residue_complex(d_omega, d_k, params, derived)),
            ChiModel::Quadrature => chi_hot_quadrature_complex(
                d_omega,
                d_k,
                params,
                derived,
                params.medium.distribution(),
            ),
            ChiModel::EitApprox => Ok(chi_eit_complex(d_omega, d_k, params, derived)),
        }
    }

    /// Evaluate chi at a real probe point.
    pub fn eval(&self, p: ProbePoint, params: &ModelParams) -> Result<ComplexResponse> {
        self.check_medium(params)?;
        let derived = params.derive()?;
        Ok(ComplexResponse {
            chi: self.eval_complex(p.d_omega.into(), p.d_k.into(), params, &derived)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{hot_gas_params, CouplingSpec};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn fig3b() -> ModelParams {
        hot_gas_params(0.25, 1e-3, 100.0, -100.0, 1.1)
    }

    #[test]
    fn populations_zero_field() {
        let mut p = fig3b();
        p.drive.omega_rabi = 1e-12;
        let pops = populations_steady_state(0.3, &p.drive, &p.atom);
        assert_abs_diff_eq!(pops.rho_bb, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(pops.rho_cc, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(pops.rho_aa, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(pops.n_ab, -0.5, epsilon = 1e-9);
    }

    #[test]
    fn populations_far_detuned_revert_to_zero_field() {
        let p = fig3b();
        // Delta_1 enormous: the drive decouples.
        let pops = populations_steady_state(1e7, &p.drive, &p.atom);
        assert_abs_diff_eq!(pops.rho_bb, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(pops.rho_cc, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn populations_strong_drive_pump_into_b() {
        let mut p = fig3b();
        p.drive.omega_rabi = 50.0; // Omega^2/(gamma_cb gamma) = 2.5e6
        let v = p.derive().unwrap().v_d; // Delta_1 = 0
        let pops = populations_steady_state(v, &p.drive, &p.atom);
        // Optical pumping deposits nearly everything in |b>; the residual
        // deviation ~3e-3 comes from the small populations kept in |a>, |c>.
        assert!(pops.n_ab < -0.99 && pops.n_ab > -1.0);
        assert_relative_eq!(pops.n_ab, -0.9970087748718744, max_relative = 1e-12);
        assert_abs_diff_eq!(pops.n_ca, 0.0, epsilon = 2e-3);
    }

    #[test]
    fn populations_normalized_and_bounded() {
        let p = fig3b();
        for v in [-5.0, -1.0, 0.0, 0.5, 1.0, 1.001, 2.0, 10.0] {
            let pops = populations_steady_state(v, &p.drive, &p.atom);
            assert_abs_diff_eq!(
                pops.rho_aa + pops.rho_bb + pops.rho_cc,
                1.0,
                epsilon = 1e-12
            );
            for r in [pops.rho_aa, pops.rho_bb, pops.rho_cc] {
                assert!((0.0..=1.0).contains(&r));
            }
        }
    }

    /// Independent oracle: solve the 5x5 steady-state linear system
    /// (three populations + Re/Im of the a-c coherence) directly.
    #[test]
    fn populations_match_liouvillian_solve() {
        let p = fig3b();
        let gamma = p.atom.gamma;
        let gcb = p.atom.gamma_cb;
        let om = p.drive.omega_rabi;
        for v in [0.0, 0.9, 1.0, 1.05, 3.0] {
            let delta1 = p.drive.delta_d + p.drive.doppler * v;
            // Unknowns x = [rho_aa, rho_bb, rho_cc, Re rho_ac, Im rho_ac].
            // Steady state of:
            //   rho_aa' = -gamma rho_aa + 2 Omega Im(rho_ac)
            //   rho_bb' = gamma/2 rho_aa + gamma_cb/2 (rho_cc - rho_bb)
            //   rho_cc' = gamma/2 rho_aa - 2 Omega Im(rho_ac)
            //             + gamma_cb/2 (rho_bb - rho_cc)
            //   rho_ac' = -(gamma + i delta1) rho_ac + i Omega (rho_cc - rho_aa)
            // with trace 1 replacing the redundant rho_cc equation.
            let a = nalgebra::Matrix5::new(
                -gamma, 0.0, 0.0, 0.0, 2.0 * om,
                0.5 * gamma, -0.5 * gcb, 0.5 * gcb, 0.0, 0.0,
                1.0, 1.0, 1.0, 0.0, 0.0,
                -0.0, 0.0, 0.0, -gamma, delta1,
                -om, 0.0, om, -delta1, -gamma,
            );
            let b = nalgebra::Vector5::new(0.0, 0.0, 1.0, 0.0, 0.0);
            let x = a.lu().solve(&b).expect("steady state solvable");
            let pops = populations_steady_state(v, &p.drive, &p.atom);
            assert_relative_eq!(pops.rho_aa, x[0], max_relative = 1e-10, epsilon = 1e-12);
            assert_relative_eq!(pops.rho_bb, x[1], max_relative = 1e-10, epsilon = 1e-12);
            assert_relative_eq!(pops.rho_cc, x[2], max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn chi_beam_two_level_limit() {
        // Drive off, atom at rest: chi = -i g / (2 (gamma + i d_omega)).
        let mut p = fig3b();
        p.drive.omega_rabi = 1e-9;
        p.medium = MediumSpec::Beam { v: 0.0 };
        p.atom.coupling = CouplingSpec::CouplingG(1e-3);
        let pops = Populations::zero_field();
        for dw in [-2.0, 0.0, 0.7] {
            let chi = chi_beam(ProbePoint { d_omega: dw, d_k: 0.0 }, 0.0, &pops, &p)
                .unwrap()
                .chi;
            let expected = -I * 1e-3 / (2.0 * C64::new(1.0, dw));
            assert_relative_eq!(chi.re, expected.re, max_relative = 1e-9, epsilon = 1e-18);
            assert_relative_eq!(chi.im, expected.im, max_relative = 1e-9, epsilon = 1e-18);
        }
    }

    #[test]
    fn chi_beam_two_photon_suppression() {
        // At the two-photon resonance a strong drive suppresses |chi| by
        // ~gamma_cb*gamma/Omega^2 relative to the drive-off value.
        let mut p = fig3b();
        p.medium = MediumSpec::Beam { v: 0.0 };
        p.drive.delta_d = 0.0;
        p.atom.coupling = CouplingSpec::CouplingG(1e-3);
        let pops = Populations::idealized();
        let pt = ProbePoint { d_omega: 0.0, d_k: 0.0 };
        let with_drive = chi_beam(pt, 0.0, &pops, &p).unwrap().chi;
        let mut p0 = p;
        p0.drive.omega_rabi = 1e-9;
        let without = chi_beam(pt, 0.0, &pops, &p0).unwrap().chi;
        let ratio = with_drive.norm() / without.norm();
        let expected = p.atom.gamma_cb * p.atom.gamma / p.drive.omega_rabi.powi(2);
        assert!(ratio < 2.0 * expected, "ratio {ratio} vs {expected}");
    }

    #[test]
    fn chi_beam_galilean_shift_identity() {
        // chi(dw, dk, v) equals chi at rest with dw -> dw + (k_d + dk) v and
        // delta_d -> delta_d + k_d v.
        let mut p = fig3b();
        p.medium = MediumSpec::Beam { v: 0.0 };
        let derived = p.derive().unwrap();
        let mut worst: f64 = 0.0;
        let mut x = 0.4321_f64; // deterministic pseudo-random sequence
        for _ in 0..100 {
            x = (x * 997.0).fract();
            let dw = -3.0 + 6.0 * x;
            x = (x * 997.0).fract();
            let dk = -0.5 + 1.0 * x;
            x = (x * 997.0).fract();
            let v = -2.0 + 4.0 * x;
            let pops = populations_steady_state(v, &p.drive, &p.atom);
            let lhs = chi_beam_complex(dw.into(), dk.into(), v, &pops, &p, &derived);
            let mut shifted = p;
            shifted.drive.delta_d += p.drive.doppler * v;
            let derived_s = shifted.derive().unwrap();
            let pops_s = populations_steady_state(0.0, &shifted.drive, &shifted.atom);
            let rhs = chi_beam_complex(
                (dw + (p.drive.doppler + dk) * v).into(),
                dk.into(),
                0.0,
                &pops_s,
                &shifted,
                &derived_s,
            );
            worst = worst.max((lhs - rhs).norm() / lhs.norm());
        }
        assert!(worst <= 1e-12, "worst relative mismatch {worst:e}");
    }

    #[test]
    fn residue_continuous_at_dk_zero() {
        let p = fig3b();
        let eps = 1e-9;
        let at = |dk: f64| {
            chi_hot_residue(ProbePoint { d_omega: p.drive.delta_d + 0.002, d_k: dk }, &p)
                .unwrap()
                .chi
        };
        let plus = at(eps);
        let minus = at(-eps);
        assert!((plus - minus).norm() / plus.norm() < 1e-6);
    }

    #[test]
    fn residue_zero_drive_reduces_to_doppler_two_level() {
        let mut p = fig3b();
        p.drive.omega_rabi = 1e-6;
        p.atom.coupling = CouplingSpec::CouplingG(1e-3);
        let derived = p.derive().unwrap();
        for dw in [-250.0, -30.0, 0.0, 120.0] {
            let chi = chi_hot_residue(ProbePoint { d_omega: dw, d_k: 0.0 }, &p)
                .unwrap()
                .chi;
            // -i g / (2 Gamma_ab^(1)) with Gamma_ab^(1) = gamma + k v_T + i dw
            let expected = -I * derived.coupling_g
                / (2.0 * C64::new(p.atom.gamma + p.drive.doppler, dw));
            assert_relative_eq!(chi.re, expected.re, max_relative = 1e-8, epsilon = 1e-16);
            assert_relative_eq!(chi.im, expected.im, max_relative = 1e-8, epsilon = 1e-16);
        }
    }

    #[test]
    fn residue_requires_hot_lorentzian() {
        let mut beam = fig3b();
        beam.medium = MediumSpec::Beam { v: 1.0 };
        assert!(chi_hot_residue(ProbePoint { d_omega: 0.0, d_k: 0.0 }, &beam).is_err());
        let mut maxw = fig3b();
        maxw.medium = MediumSpec::HotGas {
            dist: Distribution::Maxwellian,
        };
        assert!(chi_hot_residue(ProbePoint { d_omega: 0.0, d_k: 0.0 }, &maxw).is_err());
    }

    #[test]
    fn eit_approx_tracks_residue_variation() {
        // The exact velocity-averaged response carries a slowly varying
        // non-resonant background that the EIT-exciton approximation drops,
        // so the absolute values differ; the variation across the EIT
        // window (what sets dispersion and group velocity) agrees to ~10%.
        let p = fig3b();
        let at = |dk: f64| ProbePoint {
            d_omega: p.drive.delta_d,
            d_k: dk,
        };
        let res0 = chi_hot_residue(at(0.0), &p).unwrap().chi;
        let eit0 = chi_eit_approx(at(0.0), &p).unwrap().chi;
        let bg0 = res0 - eit0;
        for dk in [1e-3, 3e-3, 5e-3] {
            let dres = chi_hot_residue(at(dk), &p).unwrap().chi - res0;
            let deit = chi_eit_approx(at(dk), &p).unwrap().chi - eit0;
            assert!(
                (dres - deit).norm() / dres.norm() < 0.10,
                "dk={dk}: residue variation {dres} vs eit variation {deit}"
            );
            // and the background really is slowly varying:
            let bg = chi_hot_residue(at(dk), &p).unwrap().chi
                - chi_eit_approx(at(dk), &p).unwrap().chi;
            assert!((bg - bg0).norm() < 0.2 * bg0.norm());
        }
    }

    #[test]
    fn eit_approx_depends_on_resonant_combination_only() {
        // Shifting d_omega or choosing dk with the same (omega - omega_k)
        // and the same |dk| gives the same value.
        let p = fig3b();
        let derived = p.derive().unwrap();
        let dk = 0.002;
        let a = chi_eit_complex(
            (p.drive.delta_d + 0.001).into(),
            dk.into(),
            &p,
            &derived,
        );
        // move the offset from d_omega into the v_d * dk term:
        let b = chi_eit_complex(
            (p.drive.delta_d + 0.001 + derived.v_d * dk).into(),
            C64::new(0.0, 0.0),
            &p,
            &derived,
        );
        // gamma_k differs by |dk| gamma G / k_d between the two, so only
        // compare after removing that: use a dk of the same magnitude.
        let c = chi_eit_complex(
            (p.drive.delta_d + 0.001 + 2.0 * derived.v_d * dk).into(),
            (-dk).into(),
            &p,
            &derived,
        );
        // identical up to floating-point cancellation in the large delta_d
        assert!((a - c).norm() / a.norm() < 1e-9);
        // and the dk=0 evaluation differs only through gamma_k:
        assert!((a - b).norm() / a.norm() < 0.2);
    }

    #[test]
    fn eit_center_value_and_sign() {
        // At the EIT center the response is purely set by gamma_k; in the
        // exp(+i(omega t - k z)) convention absorption means Im chi <= 0.
        let p = fig3b();
        let d = p.derive().unwrap();
        let chi = chi_eit_approx(
            ProbePoint {
                d_omega: p.drive.delta_d,
                d_k: 0.0,
            },
            &p,
        )
        .unwrap()
        .chi;
        let expected = d.coupling_g * d.n_prime_ratio / d.big_g
            * (p.drive.omega_rabi.powi(2)
                / ((1.0 + d.big_g) * C64::new(0.0, -d.gamma_k))
                - I);
        assert_relative_eq!(chi.re, expected.re, max_relative = 1e-12, epsilon = 1e-20);
        assert_relative_eq!(chi.im, expected.im, max_relative = 1e-12);
        assert!(chi.im < 0.0);
    }

    #[test]
    fn quadrature_zero_drive_matches_closed_form() {
        let mut p = fig3b();
        p.drive.omega_rabi = 1e-6;
        p.atom.coupling = CouplingSpec::CouplingG(1e-3);
        let derived = p.derive().unwrap();
        for dw in [-150.0, 0.0, 80.0] {
            let chi = chi_hot_quadrature(
                ProbePoint { d_omega: dw, d_k: 0.0 },
                &p,
                Distribution::Lorentzian,
            )
            .unwrap()
            .chi;
            // With zero drive the steady state has n_ab = -1/2, so the
            // Lorentzian-convolved two-level response applies.
            let expected = -I * derived.coupling_g
                / (2.0 * C64::new(p.atom.gamma + p.drive.doppler, dw));
            assert!(
                (chi - expected).norm() / expected.norm() < 1e-6,
                "dw={dw}: {chi} vs {expected}"
            );
        }
    }

    #[test]
    fn quadrature_narrow_distribution_approaches_beam() {
        // Convolving the beam response with a delta-like velocity profile
        // (width 1e-3 v_T) reproduces the v = 0 beam value.
        let mut p = fig3b();
        p.drive.delta_d = 0.0;
        let derived = p.derive().unwrap();
        let dw = 0.05;
        let w = 1e-4;
        let f = |v: f64| {
            let pops = populations_steady_state(v, &p.drive, &p.atom);
            (w / std::f64::consts::PI / (v * v + w * w))
                * chi_beam_complex(dw.into(), C64::new(0.0, 0.0), v, &pops, &p, &derived)
        };
        let narrow = integrate_complex(&f, -1.0, 1.0, &[0.0], 1e-14, 1e-9, 80_000)
            .unwrap()
            .value;
        let pops0 = populations_steady_state(0.0, &p.drive, &p.atom);
        let beam = chi_beam_complex(dw.into(), C64::new(0.0, 0.0), 0.0, &pops0, &p, &derived);
        // the Lorentzian velocity profile has heavy tails, so convergence to
        // the beam value is first order in the width: ~0.6% at w = 1e-4.
        assert!((narrow - beam).norm() / beam.norm() < 0.02);
    }

    #[test]
    fn quadrature_maxwellian_is_finite_and_absorbing() {
        let mut p = fig3b();
        p.medium = MediumSpec::HotGas {
            dist: Distribution::Maxwellian,
        };
        let chi = chi_hot_quadrature(
            ProbePoint {
                d_omega: p.drive.delta_d + 0.01,
                d_k: 0.0,
            },
            &p,
            Distribution::Maxwellian,
        )
        .unwrap()
        .chi;
        assert!(chi.re.is_finite() && chi.im.is_finite());
        assert!(chi.im < 0.0);
    }

    #[test]
    fn residue_matches_quadrature_at_window_center() {
        let p = fig3b();
        let pt = ProbePoint {
            d_omega: p.drive.delta_d,
            d_k: 0.0,
        };
        let r = chi_hot_residue(pt, &p).unwrap().chi;
        let q = chi_hot_quadrature(pt, &p, Distribution::Lorentzian).unwrap().chi;
        assert!((r - q).norm() / q.norm() < 0.01, "res {r} quad {q}");
    }
}
