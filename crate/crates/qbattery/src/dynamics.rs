//! Memory kernel `mu(t)` and the single-excitation probability amplitudes.

use num_complex::Complex64;
use thiserror::Error;

use crate::params::{self, ModelParams};

/// Width of the critical window around `R = 0.5` handled by the closed-form
/// limit branch; both kernel branches are 0/0 there.
const CRITICAL_WINDOW: f64 = 1e-9;

/// Complex amplitudes of `|eg>` and `|ge>` in the single-excitation sector.
///
/// The missing population `1 - |eta1|^2 - |eta2|^2` has leaked into the
/// reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    /// Amplitude of `|e>_A |g>_B` (excitation on the charger).
    pub eta1: Complex64,
    /// Amplitude of `|g>_A |e>_B` (excitation on the battery).
    pub eta2: Complex64,
}

impl AmplitudePair {
    pub fn new(eta1: Complex64, eta2: Complex64) -> Self {
        AmplitudePair { eta1, eta2 }
    }

    /// Initial amplitudes `eta01 = sin(theta) e^{i phi}`, `eta02 = cos(theta)`.
    pub fn initial(params: &ModelParams) -> Self {
        AmplitudePair {
            eta1: Complex64::from_polar(params.theta.sin(), params.phi),
            eta2: Complex64::new(params.theta.cos(), 0.0),
        }
    }

    /// Total two-qubit excited population `|eta1|^2 + |eta2|^2`.
    pub fn population(&self) -> f64 {
        self.eta1.norm_sqr() + self.eta2.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DynamicsError {
    /// At `R = 0` nothing decays, so `mu(t) = 1` for all times and no steady
    /// state exists.
    #[error("no steady state exists for R = 0 (the kernel never decays)")]
    NoSteadyState,
}

enum Branch {
    /// `R = 0`: no coupling, `mu = 1` identically.
    Uncoupled,
    /// `R < 0.5`: hyperbolic (overdamped, Markovian) branch.
    Sub { chi1: f64 },
    /// `|R - 0.5| <= 1e-9`: critical limit `e^{-lt/2} (1 + lt/2)`.
    Critical,
    /// `R > 0.5`: trigonometric (oscillatory, non-Markovian) branch.
    Super { chi2: f64 },
}

/// Evaluator for `mu` at fixed parameters; caches the branch selection so
/// sweeps do not redo it per time point.
pub struct Kernel {
    branch: Branch,
}

impl Kernel {
    pub fn new(p: &ModelParams) -> Self {
        let r = p.coupling_ratio;
        let branch = if r == 0.0 {
            Branch::Uncoupled
        } else if (r - 0.5).abs() <= CRITICAL_WINDOW {
            Branch::Critical
        } else if r < 0.5 {
            let chi1 = params::derive(p).chi1.expect("R < 0.5 has chi1");
            Branch::Sub { chi1 }
        } else {
            let chi2 = params::derive(p).chi2.expect("R > 0.5 has chi2");
            Branch::Super { chi2 }
        };
        Kernel { branch }
    }

    /// `mu` at dimensionless time `lt = lambda * t >= 0`.
    pub fn mu(&self, lt: f64) -> f64 {
        assert!(lt >= 0.0, "kernel is defined for lt >= 0, got {lt}");
        let s = lt;
        match self.branch {
            Branch::Uncoupled => 1.0,
            Branch::Critical => (-s / 2.0).exp() * (1.0 + s / 2.0),
            Branch::Sub { chi1 } => {
                let x = chi1 * s / 2.0;
                if x < 1.0 {
                    // sinh(x)/chi1 = (s/2) * sinhc(x); regular as chi1 -> 0
                    (-s / 2.0).exp() * (x.cosh() + s / 2.0 * sinhc(x))
                } else {
                    // exponential-sum form, safe from cosh overflow at large lt
                    let a = 0.5 * (1.0 + 1.0 / chi1);
                    let b = 0.5 * (1.0 - 1.0 / chi1);
                    a * ((chi1 - 1.0) * s / 2.0).exp() + b * (-(chi1 + 1.0) * s / 2.0).exp()
                }
            }
            Branch::Super { chi2 } => {
                let y = chi2 * s / 2.0;
                (-s / 2.0).exp() * (y.cos() + s / 2.0 * sinc(y))
            }
        }
    }
}

/// `sinh(x)/x`, series near zero to avoid cancellation when `R` sits just
/// inside a branch and `chi * lt` is tiny.
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

/// `sin(x)/x`, series near zero.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// The memory kernel of the amplitude dynamics.
///
/// Piecewise: `e^{-lt/2} [cosh(x) + sinh(x)/chi1]` with `x = chi1*lt/2` for
/// `R < 0.5`; `e^{-lt/2} [cos(y) + sin(y)/chi2]` with `y = chi2*lt/2` for
/// `R > 0.5`; the limit `e^{-lt/2} (1 + lt/2)` inside the critical window.
pub fn kernel_mu(params: &ModelParams, lt: f64) -> f64 {
    Kernel::new(params).mu(lt)
}

/// Amplitudes at dimensionless time `lt`, given the kernel value `mu`.
///
/// Algebraically identical to
/// `eta1 = [z2^2 + z1^2 mu] eta01 - z1 z2 [1 - mu] eta02` (and the mirrored
/// expression for `eta2`), rearranged around the bright-mode amplitude
/// `B = z1 eta01 + z2 eta02` so `mu = 1` reproduces the initial amplitudes
/// exactly.
pub fn amplitudes_with_mu(params: &ModelParams, mu: f64) -> AmplitudePair {
    let init = AmplitudePair::initial(params);
    let bright = init.eta1 * params.zeta1 + init.eta2 * params.zeta2;
    let decay = bright * (1.0 - mu);
    AmplitudePair {
        eta1: init.eta1 - decay * params.zeta1,
        eta2: init.eta2 - decay * params.zeta2,
    }
}

/// Time-dependent amplitudes `eta1(t)`, `eta2(t)`.
pub fn amplitudes(params: &ModelParams, lt: f64) -> AmplitudePair {
    amplitudes_with_mu(params, kernel_mu(params, lt))
}

/// Long-time amplitudes, obtained by substituting `mu = 0` exactly:
/// `eta1(inf) = z2^2 eta01 - z1 z2 eta02`, `eta2(inf) = z1^2 eta02 - z1 z2 eta01`.
pub fn steady_amplitudes(params: &ModelParams) -> Result<AmplitudePair, DynamicsError> {
    if params.coupling_ratio == 0.0 {
        return Err(DynamicsError::NoSteadyState);
    }
    Ok(amplitudes_with_mu(params, 0.0))
}
