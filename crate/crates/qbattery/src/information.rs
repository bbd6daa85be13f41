//! Concurrence and the two- and three-measurement entropic uncertainty
//! relations with quantum memory, in closed form over the amplitude moduli.
//!
//! The left sides use the post-measurement eigenvalue sets
//! `gamma^x = {(1 -+ D)/4}` (doubly degenerate) and
//! `gamma^z = {0, |eta1|^2, |eta2|^2, 1 - |eta1|^2 - |eta2|^2}`; the right
//! sides are `U_r^2 = 1 + S(A|B)` and `U_r^3 = 2 U_r^2 - 1`, with the
//! complementarity term fixed at 1 bit by the mutual unbiasedness of the
//! Pauli axes. Everything here is scalar arithmetic on `|eta_i|^2`; the
//! matrix-and-eigensolver route lives in [`crate::oracle`] and is used to
//! cross-validate these formulas.

use thiserror::Error;

use crate::density::{binary_entropy, entropy_from_probs, TwoQubitState};
use crate::dynamics::{self, AmplitudePair, DynamicsError};
use crate::params::ModelParams;

/// Off-X-pattern matrix entries larger than this disqualify a state from
/// the X-state concurrence formula.
pub const X_PATTERN_TOL: f64 = 1e-12;

/// Number of Pauli measurements entering an uncertainty relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementSet {
    /// `sigma_x` and `sigma_z`.
    Two,
    /// `sigma_x`, `sigma_y` and `sigma_z`.
    Three,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfoError {
    #[error("matrix is not X-type: off-pattern entry of magnitude {0}")]
    NotXState(f64),
}

/// Both uncertainty relations and their ingredients at one amplitude pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    pub u_left_xz: f64,
    pub u_right_2: f64,
    pub tightness_xz: f64,
    pub u_left_xyz: f64,
    pub u_right_3: f64,
    pub tightness_xyz: f64,
    /// `D = sqrt(1 - 4|eta2|^2 + 4|eta1|^2|eta2|^2 + 4|eta2|^4)`, in `[0, 1]`
    /// for feasible amplitudes.
    pub d_factor: f64,
    /// Eigenvalues of the x-measurement post-measurement state.
    pub gamma_x: [f64; 4],
    /// Eigenvalues of the z-measurement post-measurement state.
    pub gamma_z: [f64; 4],
}

/// `D` as a function of the amplitude moduli.
pub fn d_factor(amps: &AmplitudePair) -> f64 {
    let a = amps.eta1.norm_sqr();
    let b = amps.eta2.norm_sqr();
    (1.0 - 4.0 * b + 4.0 * a * b + 4.0 * b * b).max(0.0).sqrt()
}

/// Eigenvalues `{(1-D)/4, (1-D)/4, (1+D)/4, (1+D)/4}` of the post-x-measurement state.
pub fn gamma_x(amps: &AmplitudePair) -> [f64; 4] {
    let d = d_factor(amps);
    let lo = ((1.0 - d) / 4.0).max(0.0);
    let hi = (1.0 + d) / 4.0;
    [lo, lo, hi, hi]
}

/// Eigenvalues `{0, |eta1|^2, |eta2|^2, 1 - |eta1|^2 - |eta2|^2}` of the
/// post-z-measurement state.
pub fn gamma_z(amps: &AmplitudePair) -> [f64; 4] {
    let a = amps.eta1.norm_sqr();
    let b = amps.eta2.norm_sqr();
    [0.0, a, b, (1.0 - a - b).max(0.0)]
}

/// Concurrence of the model state, `C = 2 |eta1 eta2*|`.
pub fn concurrence(amps: &AmplitudePair) -> f64 {
    2.0 * (amps.eta1 * amps.eta2.conj()).norm()
}

/// Wootters concurrence of an X-type two-qubit state,
/// `C = 2 max{0, |rho14| - sqrt(rho22 rho33), |rho23| - sqrt(rho11 rho44)}`.
///
/// Entries outside the X pattern must vanish to within [`X_PATTERN_TOL`].
pub fn concurrence_xstate(state: &TwoQubitState) -> Result<f64, InfoError> {
    let m = &state.matrix;
    let x_pattern = [
        (0usize, 0usize),
        (1, 1),
        (2, 2),
        (3, 3),
        (0, 3),
        (3, 0),
        (1, 2),
        (2, 1),
    ];
    for i in 0..4 {
        for j in 0..4 {
            if !x_pattern.contains(&(i, j)) && m[i][j].norm() > X_PATTERN_TOL {
                return Err(InfoError::NotXState(m[i][j].norm()));
            }
        }
    }
    let inner = m[0][3].norm() - (m[1][1].re * m[2][2].re).max(0.0).sqrt();
    let outer = m[1][2].norm() - (m[0][0].re * m[3][3].re).max(0.0).sqrt();
    Ok(2.0 * inner.max(outer).max(0.0))
}

/// Left side and lower bound of the two-measurement (x, z) relation:
/// `U_l = S(gamma^x) + S(gamma^z) - 2 S(rho_B)`,
/// `U_r = 1 + S(rho_AB) - S(rho_B)`, using the closed-form eigenvalue sets
/// (`rho_B` has eigenvalues `{|eta2|^2, 1-|eta2|^2}`, `rho_AB` has
/// `{p, 1-p}` with `p` the excited population).
pub fn eur_two(amps: &AmplitudePair) -> (f64, f64) {
    let b = amps.eta2.norm_sqr();
    let p = amps.population();
    let s_b = binary_entropy(b);
    let u_left = entropy_from_probs(&gamma_x(amps)) + entropy_from_probs(&gamma_z(amps))
        - 2.0 * s_b;
    let u_right = 1.0 + binary_entropy(p) - s_b;
    (u_left, u_right)
}

/// Left side and lower bound of the three-measurement (x, y, z) relation.
///
/// The y channel has the same spectrum as the x channel (only the moduli of
/// the coherences enter), so `U_l = 2 S(gamma^x) + S(gamma^z) - 3 S(rho_B)`;
/// the bound is `U_r^3 = 2 U_r^2 - 1` identically.
pub fn eur_three(amps: &AmplitudePair) -> (f64, f64) {
    let b = amps.eta2.norm_sqr();
    let s_b = binary_entropy(b);
    let u_left = 2.0 * entropy_from_probs(&gamma_x(amps)) + entropy_from_probs(&gamma_z(amps))
        - 3.0 * s_b;
    let (_, u_right_2) = eur_two(amps);
    (u_left, 2.0 * u_right_2 - 1.0)
}

/// `x log2(y)` with the `0 log 0 := 0` convention on either factor.
fn xlog2(x: f64, y: f64) -> f64 {
    if x == 0.0 || y <= 0.0 {
        0.0
    } else {
        x * y.log2()
    }
}

/// Steady-state two-measurement relation in closed form over
/// `|eta1(inf)|^2`, `|eta2(inf)|^2`, `M = 1 - |eta1|^2 - |eta2|^2` and
/// `F = sqrt(1 + 4|eta1|^2|eta2|^2 - 4|eta2|^2 + 4|eta2|^4)`.
///
/// Agrees with [`eur_two`] evaluated at [`dynamics::steady_amplitudes`] to
/// 1e-10.
pub fn eur_two_steady(params: &ModelParams) -> Result<(f64, f64), DynamicsError> {
    let amps = dynamics::steady_amplitudes(params)?;
    let n1 = amps.eta1.norm_sqr();
    let n2 = amps.eta2.norm_sqr();
    let m = (1.0 - n1 - n2).max(0.0);
    let f = (1.0 + 4.0 * n1 * n2 - 4.0 * n2 + 4.0 * n2 * n2).max(0.0).sqrt();
    let u_left = xlog2(n2, n2) - xlog2(m, m) - 2.0 * xlog2(n2 - 1.0, 1.0 - n2)
        - xlog2(n1, n1)
        + xlog2(f - 1.0, (1.0 - f) / 4.0) / 2.0
        - xlog2(f + 1.0, (f + 1.0) / 4.0) / 2.0;
    let u_right = 1.0 + xlog2(n2, n2) - xlog2(n2 - 1.0, 1.0 - n2) - xlog2(m, m)
        - xlog2(1.0 - m, 1.0 - m);
    Ok((u_left, u_right))
}

/// Tightness `Delta U = U_l - U_r` of the chosen measurement set;
/// nonnegative up to numerical noise.
pub fn tightness(amps: &AmplitudePair, set: MeasurementSet) -> f64 {
    match set {
        MeasurementSet::Two => {
            let (l, r) = eur_two(amps);
            l - r
        }
        MeasurementSet::Three => {
            let (l, r) = eur_three(amps);
            l - r
        }
    }
}

/// Assembles the full report for one amplitude pair.
pub fn uncertainty_report(amps: &AmplitudePair) -> UncertaintyReport {
    let (u_left_xz, u_right_2) = eur_two(amps);
    let (u_left_xyz, u_right_3) = eur_three(amps);
    UncertaintyReport {
        u_left_xz,
        u_right_2,
        tightness_xz: u_left_xz - u_right_2,
        u_left_xyz,
        u_right_3,
        tightness_xyz: u_left_xyz - u_right_3,
        d_factor: d_factor(amps),
        gamma_x: gamma_x(amps),
        gamma_z: gamma_z(amps),
    }
}
