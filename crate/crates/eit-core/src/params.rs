//! Physical parameters, the dimensionless unit system, derived quantities,
//! and regime-validity checks.
//!
//! Unit system: the optical decay rate sets the frequency unit (gamma = 1)
//! and the thermal velocity sets the velocity unit (v_T = 1).  The Doppler
//! width `doppler = k_d v_T` is therefore also the optical wavenumber k_d in
//! units of gamma/v_T, and wavenumber detunings Delta k carry units of
//! gamma/v_T.  The Gaussian-units convention n = 1 + 2*pi*chi is used
//! throughout.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// How the medium density is specified: either the raw coupling constant
/// g = mu_ab^2 N / hbar (in units of gamma) or the density ratio nu = N/N_cr.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CouplingSpec {
    /// g = mu_ab^2 N / hbar in units of gamma.
    CouplingG(f64),
    /// nu = N / N_cr (N_cr depends on the drive Rabi frequency and the
    /// velocity distribution through beta).
    DensityRatio(f64),
}

/// Atomic relaxation rates and medium density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    /// Optical (a-b and a-c) coherence decay rate; fixes the frequency unit,
    /// must equal 1.
    pub gamma: f64,
    /// b-c coherence decay rate in units of gamma.
    pub gamma_cb: f64,
    /// Density specification (exactly one form).
    pub coupling: CouplingSpec,
}

/// Drive-field parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Drive Rabi frequency Omega in units of gamma.
    pub omega_rabi: f64,
    /// Drive detuning Delta_omega_d in units of gamma.
    pub delta_d: f64,
    /// Doppler width D = k_d v_T in units of gamma.
    pub doppler: f64,
    /// Ratio c / v_T (default 1e6).
    pub c_over_vt: f64,
}

impl DriveParams {
    pub const DEFAULT_C_OVER_VT: f64 = 1e6;
}

/// Thermal velocity distribution of the hot gas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Distribution {
    /// F(v) = v_T / [pi (v_T^2 + v^2)] — normative choice.
    Lorentzian,
    /// F(v) = exp(-v^2/v_T^2) / (v_T sqrt(pi)) — robustness check.
    Maxwellian,
}

impl Distribution {
    /// Distribution value F(v) with v in units of v_T.
    pub fn f(&self, v: f64) -> f64 {
        match self {
            Distribution::Lorentzian => 1.0 / (PI * (1.0 + v * v)),
            Distribution::Maxwellian => (-v * v).exp() / PI.sqrt(),
        }
    }

    /// beta = max over v of v F(v).
    pub fn beta(&self) -> f64 {
        match self {
            // maximum of v/[pi(1+v^2)] at v = 1
            Distribution::Lorentzian => 1.0 / (2.0 * PI),
            // maximum of v exp(-v^2)/sqrt(pi) at v = 1/sqrt(2)
            Distribution::Maxwellian => 1.0 / (2.0 * PI * std::f64::consts::E).sqrt(),
        }
    }
}

/// Medium kind: a mono-velocity beam or a thermal gas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MediumSpec {
    /// Mono-velocity beam drifting at v (units of v_T).
    Beam { v: f64 },
    /// Hot gas with the given velocity distribution.
    HotGas { dist: Distribution },
}

impl MediumSpec {
    /// The velocity relevant to kinematic factors: the beam drift velocity,
    /// or the drive-selected drift velocity v_d for a hot gas.
    pub fn kinematic_velocity(&self, v_d: f64) -> f64 {
        match self {
            MediumSpec::Beam { v } => *v,
            MediumSpec::HotGas { .. } => v_d,
        }
    }

    /// Velocity distribution used for averaging (Lorentzian for a beam's
    /// derived beta bookkeeping).
    pub fn distribution(&self) -> Distribution {
        match self {
            MediumSpec::Beam { .. } => Distribution::Lorentzian,
            MediumSpec::HotGas { dist } => *dist,
        }
    }
}

/// Full model parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub atom: AtomParams,
    pub drive: DriveParams,
    pub medium: MediumSpec,
}

impl ModelParams {
    /// Validate invariants on the raw inputs.
    pub fn validate(&self) -> Result<()> {
        if self.atom.gamma != 1.0 {
            return Err(Error::Parameter(format!(
                "gamma fixes the frequency unit and must be 1, got {}",
                self.atom.gamma
            )));
        }
        if !(self.atom.gamma_cb > 0.0) || !self.atom.gamma_cb.is_finite() {
            return Err(Error::Parameter(format!(
                "gamma_cb must be positive and finite, got {}",
                self.atom.gamma_cb
            )));
        }
        match self.atom.coupling {
            CouplingSpec::CouplingG(g) => {
                if !(g >= 0.0) || !g.is_finite() {
                    return Err(Error::Parameter(format!(
                        "coupling_g must be non-negative and finite, got {g}"
                    )));
                }
            }
            CouplingSpec::DensityRatio(nu) => {
                if !(nu >= 0.0) || !nu.is_finite() {
                    return Err(Error::Parameter(format!(
                        "density_ratio must be non-negative and finite, got {nu}"
                    )));
                }
            }
        }
        if !(self.drive.omega_rabi > 0.0) || !self.drive.omega_rabi.is_finite() {
            return Err(Error::Parameter(format!(
                "omega_rabi must be positive, got {}",
                self.drive.omega_rabi
            )));
        }
        if !(self.drive.doppler > 0.0) || !self.drive.doppler.is_finite() {
            return Err(Error::Parameter(format!(
                "doppler must be positive, got {}",
                self.drive.doppler
            )));
        }
        if !self.drive.delta_d.is_finite() {
            return Err(Error::Parameter("delta_d must be finite".into()));
        }
        if !(self.drive.c_over_vt > 10.0 * self.drive.doppler) {
            return Err(Error::Parameter(format!(
                "c_over_vT ({}) must greatly exceed the Doppler width ({})",
                self.drive.c_over_vt, self.drive.doppler
            )));
        }
        if let MediumSpec::Beam { v } = self.medium {
            if !v.is_finite() {
                return Err(Error::Parameter("beam velocity must be finite".into()));
            }
        }
        Ok(())
    }

    /// Compute all derived quantities.
    pub fn derive(&self) -> Result<DerivedParams> {
        self.validate()?;
        let gamma = self.atom.gamma;
        let gcb = self.atom.gamma_cb;
        let om = self.drive.omega_rabi;
        let delta_d = self.drive.delta_d;
        let d = self.drive.doppler;

        let big_g = (1.0 + om * om / (gcb * gamma)).sqrt();
        let gamma_g = gamma * big_g;
        let v_d = -delta_d / d;
        let beta = self.medium.distribution().beta();

        // Coupling at the critical density: g_cr = mu^2 N_cr / hbar with
        // N_cr = hbar Omega sqrt(gamma_cb/gamma) / (2 pi^2 beta mu^2).
        let g_cr = om * (gcb / gamma).sqrt() / (2.0 * PI * PI * beta);
        let (coupling_g, density_ratio) = match self.atom.coupling {
            CouplingSpec::CouplingG(g) => (g, g / g_cr),
            CouplingSpec::DensityRatio(nu) => (nu * g_cr, nu),
        };

        let n_prime_ratio = gamma_g * d / (d * d + delta_d * delta_d);
        // Beam EIT group velocity (strong-drive, idealized-population limit).
        let vg_tilde = if coupling_g > 0.0 {
            om * om / (2.0 * PI * d * coupling_g)
        } else {
            f64::INFINITY
        };
        // Hot-gas EIT group velocity, consistent with the n = 1 + 2*pi*chi
        // convention of the closed dispersion law.
        let vg_tilde_prime = if coupling_g > 0.0 {
            om * om * (d * d + delta_d * delta_d)
                / (2.0 * PI * (1.0 + big_g) * coupling_g * gamma * d * d)
        } else {
            f64::INFINITY
        };
        let gamma_k = gcb + om * om / (gamma * (1.0 + big_g));

        let v_kin = self.medium.kinematic_velocity(v_d);
        let dk_eit = om * om / (gamma * vg_tilde);
        let dk_eit_prime = gamma_k / vg_tilde_prime;
        let ddk_eit_prime = (gcb * gamma_k).sqrt() / vg_tilde_prime;
        let domega_eit = dk_eit * (vg_tilde - v_kin).abs();

        // Quadratic-expansion coefficients of the boundary problem; beam
        // media use the beam forms, hot gases the drifting-beam (primed)
        // forms.
        let (kappa0, xi, alpha) = match self.medium {
            MediumSpec::Beam { v } => (
                gcb / vg_tilde,
                gamma / (om * om * vg_tilde),
                1.0 - v / vg_tilde,
            ),
            MediumSpec::HotGas { .. } => (
                gcb / vg_tilde_prime,
                1.0 / (gamma_k * vg_tilde_prime),
                1.0 - v_d / vg_tilde_prime,
            ),
        };

        Ok(DerivedParams {
            coupling_g,
            density_ratio,
            big_g,
            gamma_g,
            v_d,
            n_prime_ratio,
            vg_tilde,
            vg_tilde_prime,
            gamma_k,
            beta,
            dk_eit,
            dk_eit_prime,
            ddk_eit_prime,
            domega_eit,
            kappa0,
            xi,
            alpha,
        })
    }
}

/// All secondary symbols computed from `ModelParams`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// g = mu_ab^2 N / hbar in units of gamma.
    pub coupling_g: f64,
    /// nu = N / N_cr.
    pub density_ratio: f64,
    /// Power-broadening factor G = sqrt(1 + Omega^2/(gamma_cb gamma)).
    pub big_g: f64,
    /// gamma G — velocity width (times k_d) of the drive-selected beam.
    pub gamma_g: f64,
    /// Drift velocity of the drive-selected beam, v_d = -delta_d / k_d.
    pub v_d: f64,
    /// N'/N — fraction of atoms in the drifting beam.
    pub n_prime_ratio: f64,
    /// Beam EIT group velocity (units of v_T).
    pub vg_tilde: f64,
    /// Hot-gas EIT group velocity (units of v_T).
    pub vg_tilde_prime: f64,
    /// EIT-exciton decay at Delta k = 0.
    pub gamma_k: f64,
    /// beta = max over v of v F(v).
    pub beta: f64,
    /// Beam EIT half-width in wavenumber, Omega^2 / (gamma vg_tilde).
    pub dk_eit: f64,
    /// Hot-gas EIT half-width, gamma_k / vg_tilde_prime.
    pub dk_eit_prime: f64,
    /// Hot-gas decay-doubling detuning, sqrt(gamma_cb gamma_k)/vg_tilde_prime.
    pub ddk_eit_prime: f64,
    /// Beam EIT frequency half-width, dk_eit * |vg_tilde - v|.
    pub domega_eit: f64,
    /// Residual center absorption of the boundary problem.
    pub kappa0: f64,
    /// Parabolic absorption coefficient of the boundary problem.
    pub xi: f64,
    /// Kinematic narrowing factor (vg - v)/vg.
    pub alpha: f64,
}

impl DerivedParams {
    /// EIT-exciton decay at finite wavenumber detuning,
    /// gamma_k(dk) = gamma_cb + Omega^2/(gamma(1+G)) + |dk| gamma G / k_d.
    pub fn gamma_k_at(&self, dk: f64, params: &ModelParams) -> f64 {
        self.gamma_k + dk.abs() * self.gamma_g / params.drive.doppler
    }
}

/// One validity condition: name, the two compared sides, and whether the
/// condition holds (with a factor of 10 interpreting "much less/greater").
#[derive(Debug, Clone, Serialize)]
pub struct RegimeCondition {
    pub name: &'static str,
    pub left: f64,
    pub right: f64,
    pub satisfied: bool,
}

/// Report over all validity conditions; purely informational, never fails.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub conditions: Vec<RegimeCondition>,
}

impl RegimeReport {
    pub fn all_satisfied(&self) -> bool {
        self.conditions.iter().all(|c| c.satisfied)
    }

    /// Find a condition by name.
    pub fn get(&self, name: &str) -> Option<&RegimeCondition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// One-line summary suitable for dataset headers.
    pub fn summary(&self) -> String {
        self.conditions
            .iter()
            .map(|c| {
                format!(
                    "{}: {} ({:.6e} vs {:.6e})",
                    c.name,
                    if c.satisfied { "ok" } else { "VIOLATED" },
                    c.left,
                    c.right
                )
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Factor interpreting the asymptotic inequalities "much less/greater than".
const MUCH: f64 = 10.0;

/// Evaluate every validity condition of the freezing-polariton regime.
pub fn check_regime(params: &ModelParams) -> Result<RegimeReport> {
    let d = params.derive()?;
    let gamma = params.atom.gamma;
    let gcb = params.atom.gamma_cb;
    let om = params.drive.omega_rabi;
    let dop = params.drive.doppler;
    let delta_d = params.drive.delta_d;

    let mut conditions = Vec::new();

    conditions.push(RegimeCondition {
        name: "gamma_cb << gamma",
        left: gcb,
        right: gamma,
        satisfied: MUCH * gcb <= gamma,
    });
    conditions.push(RegimeCondition {
        name: "gamma*G << doppler",
        left: d.gamma_g,
        right: dop,
        satisfied: MUCH * d.gamma_g <= dop,
    });
    conditions.push(RegimeCondition {
        name: "|delta_d| >> gamma*G",
        left: delta_d.abs(),
        right: d.gamma_g,
        satisfied: delta_d.abs() >= MUCH * d.gamma_g,
    });
    conditions.push(RegimeCondition {
        name: "Omega^2 > gamma_cb*gamma",
        left: om * om,
        right: gcb * gamma,
        satisfied: om * om > gcb * gamma,
    });

    // Negligibility of the third (off-contour) velocity pole:
    // N << k_d^3 (gamma_cb/gamma) sqrt(k_d v_T / Omega).  The density in
    // wavenumber units follows from the radiative-decay dipole convention
    // mu^2/hbar = (3/2) gamma / k_d^3, so N = (2/3) g k_d^3.
    let n_dimless = (2.0 / 3.0) * d.coupling_g * dop.powi(3) / gamma;
    let v3_bound = dop.powi(3) * (gcb / gamma) * (dop / om).sqrt();
    conditions.push(RegimeCondition {
        name: "v3 pole negligible: N << k_d^3 (gamma_cb/gamma) sqrt(D/Omega)",
        left: n_dimless,
        right: v3_bound,
        satisfied: MUCH * n_dimless <= v3_bound,
    });

    // Validity of the quadratic boundary expansion:
    // kappa0 * xi << (1 - v/vg)^2 / v^2 = (alpha / v)^2.
    let v_kin = params.medium.kinematic_velocity(d.v_d);
    let rhs = if v_kin == 0.0 {
        f64::INFINITY
    } else {
        (d.alpha / v_kin).powi(2)
    };
    conditions.push(RegimeCondition {
        name: "kappa0*xi << (1 - v/vg)^2 / v^2",
        left: d.kappa0 * d.xi,
        right: rhs,
        satisfied: MUCH * d.kappa0 * d.xi <= rhs,
    });

    Ok(RegimeReport { conditions })
}

/// Like `check_regime` but fails if any condition is violated.
pub fn check_regime_strict(params: &ModelParams) -> Result<RegimeReport> {
    let report = check_regime(params)?;
    if report.all_satisfied() {
        Ok(report)
    } else {
        let bad: Vec<&str> = report
            .conditions
            .iter()
            .filter(|c| !c.satisfied)
            .map(|c| c.name)
            .collect();
        Err(Error::Parameter(format!(
            "regime conditions violated: {}",
            bad.join(", ")
        )))
    }
}

/// Reference scales tying the dimensionless system to laboratory units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiReference {
    /// Optical wavelength of the a-c (drive) transition, meters.
    pub lambda_m: f64,
    /// gamma / (2 pi) in Hz.
    pub gamma_hz: f64,
    /// Thermal velocity v_T in m/s.
    pub v_t_mps: f64,
}

impl SiReference {
    /// A rubidium-D1-like reference cell.
    pub fn rb_like() -> Self {
        SiReference {
            lambda_m: 795e-9,
            gamma_hz: 3e6,
            v_t_mps: 240.0,
        }
    }
}

/// Laboratory-unit values of the key quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiValues {
    /// Critical density in cm^-3.
    pub n_cr_per_cm3: f64,
    /// Actual density N in cm^-3.
    pub n_per_cm3: f64,
    /// Thermal velocity in m/s.
    pub v_t_mps: f64,
    /// Beam EIT group velocity in m/s.
    pub vg_tilde_mps: f64,
    /// Hot-gas EIT group velocity in m/s.
    pub vg_tilde_prime_mps: f64,
    /// The unit of length v_T/gamma expressed in cm.
    pub length_unit_cm: f64,
}

impl SiValues {
    /// Convert a dimensionless group velocity (units of v_T) to m/s.
    pub fn vg_to_mps(&self, vg: f64) -> f64 {
        vg * self.v_t_mps
    }

    /// Convert a dimensionless length (units of v_T/gamma) to cm.
    pub fn length_to_cm(&self, length: f64) -> f64 {
        length * self.length_unit_cm
    }

    /// Convert a length in cm to dimensionless units of v_T/gamma.
    pub fn cm_to_length(&self, cm: f64) -> f64 {
        cm / self.length_unit_cm
    }
}

/// Express the model in laboratory units.
///
/// The dipole moment follows the radiative-decay convention: the excited
/// state decays at the full rate A = 2*gamma, so in Gaussian units
/// mu^2 = 3 hbar c^3 A / (4 omega^3).  With that convention the critical
/// density reduces to N_cr = Omega sqrt(gamma_cb/gamma) (2 pi / lambda)^3 /
/// (3 pi^2 beta), independent of gamma itself.
pub fn to_si(params: &ModelParams, reference: &SiReference) -> Result<SiValues> {
    if !(reference.lambda_m > 0.0) || !(reference.gamma_hz > 0.0) || !(reference.v_t_mps > 0.0) {
        return Err(Error::Parameter(
            "SI reference values must all be positive".into(),
        ));
    }
    let d = params.derive()?;
    let lambda_cm = reference.lambda_m * 100.0;
    let k_per_cm = 2.0 * PI / lambda_cm;
    let n_cr_per_cm3 = params.drive.omega_rabi
        * (params.atom.gamma_cb / params.atom.gamma).sqrt()
        * k_per_cm.powi(3)
        / (3.0 * PI * PI * d.beta);
    let gamma_ang = 2.0 * PI * reference.gamma_hz;
    let length_unit_cm = reference.v_t_mps / gamma_ang * 100.0;
    Ok(SiValues {
        n_cr_per_cm3,
        n_per_cm3: d.density_ratio * n_cr_per_cm3,
        v_t_mps: reference.v_t_mps,
        vg_tilde_mps: d.vg_tilde * reference.v_t_mps,
        vg_tilde_prime_mps: d.vg_tilde_prime * reference.v_t_mps,
        length_unit_cm,
    })
}

/// Convenience constructor used widely in tests and presets: hot Lorentzian
/// gas with the standard drive geometry.
pub fn hot_gas_params(
    omega_rabi: f64,
    gamma_cb: f64,
    doppler: f64,
    delta_d: f64,
    density_ratio: f64,
) -> ModelParams {
    ModelParams {
        atom: AtomParams {
            gamma: 1.0,
            gamma_cb,
            coupling: CouplingSpec::DensityRatio(density_ratio),
        },
        drive: DriveParams {
            omega_rabi,
            delta_d,
            doppler,
            c_over_vt: DriveParams::DEFAULT_C_OVER_VT,
        },
        medium: MediumSpec::HotGas {
            dist: Distribution::Lorentzian,
        },
    }
}
