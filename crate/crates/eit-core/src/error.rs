//! Error types shared by all modules.

use num_complex::Complex64;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid or inconsistent model parameters.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e} after {evals} evaluations")]
    Quadrature {
        achieved: f64,
        requested: f64,
        evals: usize,
    },

    /// Complex Newton iteration failed to converge on a dispersion root.
    #[error("root finding failed after {iters} iterations: last iterate {last}, |residual| = {residual:.3e}")]
    RootFind {
        iters: usize,
        last: Complex64,
        residual: f64,
    },

    /// The Newton iteration converged onto the vacuum (photon-like) branch
    /// instead of the resonant one.
    #[error("branch selection failed: converged to the non-resonant branch at {root}")]
    WrongBranch { root: Complex64 },

    /// The group-velocity denominator n + omega dn/domega vanished.
    #[error("singular dispersion: |n + omega dn/domega| = {denom_abs:.3e}")]
    SingularDispersion { denom_abs: f64 },

    /// The quadratic boundary expansion is singular (alpha = 0, drift at the
    /// freezing velocity of the boundary problem).
    #[error("boundary expansion singular: v equals the EIT group velocity (alpha = 0)")]
    ExpansionSingular,

    /// Generic numerical failure (non-finite intermediate value).
    #[error("numerical error: {0}")]
    Numerical(String),
}
