//! Model parameters and the secondary constants derived from them.

use std::f64::consts::PI;

use thiserror::Error;

/// Deviation from unit norm beyond which a zeta pair is rejected instead of
/// renormalized.
pub const ZETA_NORM_TOL: f64 = 1e-9;

/// Physical configuration of one charging scenario.
///
/// `zeta1` and `zeta2` are the relative interaction strengths of the
/// charger-reservoir and battery-reservoir couplings; they must satisfy
/// `zeta1^2 + zeta2^2 = 1`. The initial state is
/// `sin(theta) e^{i phi} |eg> + cos(theta) |ge>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Spectral width of the reservoir (inverse-time units); `1/lambda` is
    /// the reservoir correlation time.
    pub lambda: f64,
    /// Dimensionless coupling ratio `R = L / lambda` with `L` the vacuum
    /// Rabi frequency. `R >> 1` is the strong (non-Markovian) regime.
    pub coupling_ratio: f64,
    /// Relative charger-reservoir interaction strength, in `[0, 1]`.
    pub zeta1: f64,
    /// Relative battery-reservoir interaction strength, in `[0, 1]`.
    pub zeta2: f64,
    /// Initial-state angle in `[0, pi/2]` (radians).
    pub theta: f64,
    /// Relative phase of the initial state, wrapped into `[0, 2*pi)`.
    pub phi: f64,
    /// Qubit transition frequency (energy units). All reported energies are
    /// the dimensionless ratio `E / omega0`.
    pub omega0: f64,
}

impl Default for ModelParams {
    /// Symmetric couplings and a separable initial state with the
    /// excitation on the charger.
    fn default() -> Self {
        ModelParams {
            lambda: 1.0,
            coupling_ratio: 0.3,
            zeta1: std::f64::consts::FRAC_1_SQRT_2,
            zeta2: std::f64::consts::FRAC_1_SQRT_2,
            theta: PI / 2.0,
            phi: 0.0,
            omega0: 1.0,
        }
    }
}

/// Constants derived from [`ModelParams`] and used by the kernel branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// Vacuum Rabi frequency `L = R * lambda` (inverse-time units).
    pub vacuum_rabi: f64,
    /// `kappa^2 = lambda^2 - 4 L^2`, kept signed; the sign selects the
    /// kernel regime.
    pub kappa_sq: f64,
    /// `chi1 = sqrt(1 - 4 R^2)`, defined for `R <= 0.5`.
    pub chi1: Option<f64>,
    /// `chi2 = sqrt(4 R^2 - 1)`, defined for `R >= 0.5`.
    pub chi2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("coupling ratio R must be nonnegative, got {0}")]
    NegativeCouplingRatio(f64),
    #[error("omega0 must be positive, got {0}")]
    NonPositiveOmega0(f64),
    #[error("zeta pair ({0}, {1}) must lie in [0, 1]")]
    ZetaOutOfRange(f64, f64),
    #[error("zeta1^2 + zeta2^2 = {0} deviates from 1 by more than {ZETA_NORM_TOL}")]
    ZetaNotNormalized(f64),
    #[error("theta must lie in [0, pi/2], got {0}")]
    ThetaOutOfRange(f64),
}

/// Checks all parameter invariants and returns the normalized parameters.
///
/// The zeta pair is renormalized to exact unit Euclidean norm when within
/// [`ZETA_NORM_TOL`] of it, and `phi` is wrapped into `[0, 2*pi)`.
pub fn validate(params: ModelParams) -> Result<ModelParams, ParamError> {
    let mut p = params;
    if !(p.lambda > 0.0) || !p.lambda.is_finite() {
        return Err(ParamError::NonPositiveLambda(p.lambda));
    }
    if !(p.coupling_ratio >= 0.0) || !p.coupling_ratio.is_finite() {
        return Err(ParamError::NegativeCouplingRatio(p.coupling_ratio));
    }
    if !(p.omega0 > 0.0) || !p.omega0.is_finite() {
        return Err(ParamError::NonPositiveOmega0(p.omega0));
    }
    let norm_sq = p.zeta1 * p.zeta1 + p.zeta2 * p.zeta2;
    if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > ZETA_NORM_TOL {
        return Err(ParamError::ZetaNotNormalized(norm_sq));
    }
    let norm = norm_sq.sqrt();
    p.zeta1 /= norm;
    p.zeta2 /= norm;
    if p.zeta1 < 0.0 || p.zeta1 > 1.0 || p.zeta2 < 0.0 || p.zeta2 > 1.0 {
        return Err(ParamError::ZetaOutOfRange(params.zeta1, params.zeta2));
    }
    if !p.theta.is_finite() || p.theta < 0.0 || p.theta > PI / 2.0 {
        return Err(ParamError::ThetaOutOfRange(p.theta));
    }
    if !p.phi.is_finite() {
        return Err(ParamError::ThetaOutOfRange(p.phi));
    }
    p.phi = p.phi.rem_euclid(2.0 * PI);
    Ok(p)
}

/// Derives `L`, `kappa^2` and the branch constants `chi1`, `chi2`.
///
/// Exactly one of `chi1`/`chi2` is present except at `R = 0.5`, where both
/// are zero. Pure and deterministic.
pub fn derive(params: &ModelParams) -> DerivedConstants {
    let r = params.coupling_ratio;
    let vacuum_rabi = r * params.lambda;
    let kappa_sq = params.lambda * params.lambda - 4.0 * vacuum_rabi * vacuum_rabi;
    let chi1 = (r <= 0.5).then(|| (1.0 - 4.0 * r * r).max(0.0).sqrt());
    let chi2 = (r >= 0.5).then(|| (4.0 * r * r - 1.0).max(0.0).sqrt());
    DerivedConstants {
        vacuum_rabi,
        kappa_sq,
        chi1,
        chi2,
    }
}
