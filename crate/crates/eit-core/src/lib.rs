//! Optical response, polariton dispersion, group velocity, and pulse
//! kinematics for a coherently driven three-level Lambda medium with atomic
//! motion.
//!
//! Units: the optical coherence decay rate gamma fixes the frequency unit
//! and the thermal velocity v_T fixes the velocity unit.  The refractive
//! index convention is n = 1 + 2 pi chi with carrier e^{+i(omega t - k z)},
//! so absorption corresponds to Im chi <= 0, decay in time to
//! Im Delta omega >= 0, and decay in space to Im Delta k <= 0.
//!
//! Modules:
//! - [`params`]: parameter sets, derived symbols, regime checks, SI mapping.
//! - [`susceptibility`]: probe response chi for a mono-velocity beam, the
//!   velocity-averaged gas (exact residue form and direct quadrature), and
//!   the near-resonance EIT approximation.
//! - [`dispersion`]: complex dispersion roots in both orientations, group
//!   velocity, closed laws, and EIT width metrics.
//! - [`kinematics`]: drive attenuation profile, local group velocity along a
//!   cell, and the decelerating-pulse trajectory.

pub mod dispersion;
pub mod error;
pub mod kinematics;
pub mod params;
pub mod quadrature;
pub mod susceptibility;

pub use dispersion::{
    boundary_quadratic, closed_dispersion, eit_metrics, group_velocity_numeric,
    solve_boundary_value, solve_initial_value, vg_resonance, vg_resonance_at, BeamWidths,
    DispersionBranch, EitMetrics, GroupVelocityPoint, Orientation, QuadraticExpansion,
    VgResonance,
};
pub use error::{Error, Result};
pub use kinematics::{
    drive_profile, kappa_drive, pulse_trajectory, rk45_to, simulate, vg_profile, CellSpec,
    DriveAttenuation, DriveProfile, KinematicsTrace, Profile, Snapshot, VgMode, VgProfile,
};
pub use params::{
    hot_gas_params, AtomParams, CouplingSpec, DerivedParams, Distribution, DriveParams,
    MediumSpec, ModelParams, RegimeReport, SiReference, SiValues,
};
pub use susceptibility::{
    chi_beam, chi_eit_approx, chi_hot_quadrature, chi_hot_residue, populations_steady_state,
    ChiModel, ComplexResponse, PopulationModel, Populations, ProbePoint,
};
