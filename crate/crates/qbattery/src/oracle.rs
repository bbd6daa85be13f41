//! Independent numerical ground truth used to validate every closed form:
//! a fixed-step RK4 integrator for the kernel ODE, a cyclic complex Jacobi
//! eigensolver for small Hermitian matrices, explicit Pauli measurement
//! channels, a generic partial trace, and the brute-force entropic
//! uncertainty evaluation built from them.

use num_complex::Complex64;
use thiserror::Error;

use crate::density::{self, TwoQubitState};
use crate::params::ModelParams;

type C = Complex64;

/// Asymmetry tolerated by the Hermiticity check.
pub const HERMITICITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("RK4 step {step} too large for R = {r}: need 4*R*step < 0.5")]
    StepTooLarge { r: f64, step: f64 },
    #[error("invalid integration range or step: {0}")]
    BadRange(String),
    #[error("matrix deviates from Hermitian by {0}")]
    NotHermitian(f64),
    #[error("axes must be 2 or 3 distinct Pauli axes")]
    UnsupportedAxes,
    #[error("state rejected by the entropy path: {0}")]
    InvalidState(String),
}

// ---------------------------------------------------------------------------
// Kernel ODE
// ---------------------------------------------------------------------------

/// Samples of the kernel ODE `mu'' + mu' + R^2 mu = 0` (dimensionless time
/// `lt = lambda t`), `mu(0) = 1`, `mu'(0) = 0`, on a uniform grid.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub step: f64,
    pub lts: Vec<f64>,
    pub mu: Vec<f64>,
    pub dmu: Vec<f64>,
}

/// Default integration step: fine enough that the R = 50 sup-error against
/// the closed form stays below 1e-8 over `lt` in `[0, 10]`.
pub fn default_ode_step(r: f64) -> f64 {
    f64::min(1e-3, 0.025 / f64::max(1.0, 4.0 * r))
}

/// Classical fixed-step RK4 integration of the kernel ODE.
///
/// In dimensionless time the characteristic roots are `(-1 +- chi)/2`, the
/// same pair that generates the closed-form kernel branches.
pub fn integrate_mu(
    params: &ModelParams,
    lt_max: f64,
    step: f64,
) -> Result<OdeSolution, OracleError> {
    if !(lt_max > 0.0) || !lt_max.is_finite() || !(step > 0.0) || !step.is_finite() {
        return Err(OracleError::BadRange(format!(
            "lt_max = {lt_max}, step = {step}"
        )));
    }
    let r = params.coupling_ratio;
    if 4.0 * r * step >= 0.5 {
        return Err(OracleError::StepTooLarge { r, step });
    }
    let n = (lt_max / step).ceil() as usize;
    if n > 200_000_000 {
        return Err(OracleError::BadRange(format!("{n} steps requested")));
    }
    let r2 = r * r;
    let f = |mu: f64, dmu: f64| (dmu, -dmu - r2 * mu);
    let mut mu = 1.0;
    let mut dmu = 0.0;
    let mut out = OdeSolution {
        step,
        lts: Vec::with_capacity(n + 1),
        mu: Vec::with_capacity(n + 1),
        dmu: Vec::with_capacity(n + 1),
    };
    out.lts.push(0.0);
    out.mu.push(mu);
    out.dmu.push(dmu);
    for i in 1..=n {
        let (k1m, k1d) = f(mu, dmu);
        let (k2m, k2d) = f(mu + step / 2.0 * k1m, dmu + step / 2.0 * k1d);
        let (k3m, k3d) = f(mu + step / 2.0 * k2m, dmu + step / 2.0 * k2d);
        let (k4m, k4d) = f(mu + step * k3m, dmu + step * k3d);
        mu += step / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        dmu += step / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        out.lts.push(i as f64 * step);
        out.mu.push(mu);
        out.dmu.push(dmu);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver (cyclic complex Jacobi)
// ---------------------------------------------------------------------------

/// Eigendecomposition of a small Hermitian matrix; `vectors[i][j]` is
/// component `i` of the eigenvector belonging to `values[j]` (columns),
/// eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: [[C; N]; N],
}

fn matmul<const N: usize>(a: &[[C; N]; N], b: &[[C; N]; N]) -> [[C; N]; N] {
    let mut out = [[C::new(0.0, 0.0); N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..N {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn adjoint<const N: usize>(a: &[[C; N]; N]) -> [[C; N]; N] {
    let mut out = [[C::new(0.0, 0.0); N]; N];
    for i in 0..N {
        for j in 0..N {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

fn identity<const N: usize>() -> [[C; N]; N] {
    let mut out = [[C::new(0.0, 0.0); N]; N];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = C::new(1.0, 0.0);
    }
    out
}

/// Eigenvalues and orthonormal eigenvectors of an `N x N` complex Hermitian
/// matrix by cyclic Jacobi rotations.
///
/// Each rotation first strips the phase of the pivot `A[p][q]` and then
/// applies the classical real rotation that annihilates it; off-diagonal
/// mass shrinks quadratically once small, so a handful of sweeps suffices
/// for `N <= 4`.
pub fn eig_hermitian<const N: usize>(
    matrix: &[[C; N]; N],
) -> Result<HermitianEigen<N>, OracleError> {
    let mut dev: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for i in 0..N {
        for j in 0..N {
            dev = dev.max((matrix[i][j] - matrix[j][i].conj()).norm());
            scale = scale.max(matrix[i][j].norm());
        }
    }
    if dev > HERMITICITY_TOL {
        return Err(OracleError::NotHermitian(dev));
    }
    // symmetrize to kill the tolerated asymmetry
    let mut a = [[C::new(0.0, 0.0); N]; N];
    for i in 0..N {
        for j in 0..N {
            a[i][j] = (matrix[i][j] + matrix[j][i].conj()) / 2.0;
        }
    }
    let mut v = identity::<N>();
    let off_tol = 1e-15 * scale;
    for _sweep in 0..64 {
        let mut off: f64 = 0.0;
        for p in 0..N {
            for q in (p + 1)..N {
                off = off.max(a[p][q].norm());
            }
        }
        if off <= off_tol {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let z = a[p][q];
                let r = z.norm();
                if r <= off_tol {
                    continue;
                }
                let phase = z / r;
                let tau = (a[q][q].re - a[p][p].re) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // plane rotation W = diag(1, conj(phase)) * [[c, s], [-s, c]]
                let mut w = identity::<N>();
                w[p][p] = C::new(c, 0.0);
                w[p][q] = C::new(s, 0.0);
                w[q][p] = -phase.conj() * s;
                w[q][q] = phase.conj() * c;
                a = matmul(&adjoint(&w), &matmul(&a, &w));
                v = matmul(&v, &w);
            }
        }
    }
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[i][i].re.partial_cmp(&a[j][j].re).unwrap());
    let mut values = [0.0; N];
    let mut vectors = [[C::new(0.0, 0.0); N]; N];
    for (col, &src) in order.iter().enumerate() {
        values[col] = a[src][src].re;
        for row in 0..N {
            vectors[row][col] = v[row][src];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Max-norm of `V L V^dag - M`; the decomposition quality metric.
pub fn reconstruction_error<const N: usize>(
    matrix: &[[C; N]; N],
    eig: &HermitianEigen<N>,
) -> f64 {
    let mut err: f64 = 0.0;
    for i in 0..N {
        for j in 0..N {
            let mut acc = C::new(0.0, 0.0);
            for k in 0..N {
                acc += eig.vectors[i][k] * eig.values[k] * eig.vectors[j][k].conj();
            }
            err = err.max((acc - matrix[i][j]).norm());
        }
    }
    err
}

// ---------------------------------------------------------------------------
// Measurement channels and partial trace
// ---------------------------------------------------------------------------

/// Pauli axis measured on the charger qubit A.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// The Pauli matrix for `axis` in the `{|e>, |g>}` basis.
pub fn pauli(axis: Axis) -> [[C; 2]; 2] {
    let z = C::new(0.0, 0.0);
    match axis {
        Axis::X => [[z, C::new(1.0, 0.0)], [C::new(1.0, 0.0), z]],
        Axis::Y => [[z, C::new(0.0, -1.0)], [C::new(0.0, 1.0), z]],
        Axis::Z => [[C::new(1.0, 0.0), z], [z, C::new(-1.0, 0.0)]],
    }
}

fn kron(a: &[[C; 2]; 2], b: &[[C; 2]; 2]) -> [[C; 4]; 4] {
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// Post-measurement state `(rho + (sigma_axis x I) rho (sigma_axis x I)) / 2`;
/// trace preserving and Hermitian.
pub fn measurement_channel(state: &TwoQubitState, axis: Axis) -> TwoQubitState {
    let eye = [
        [C::new(1.0, 0.0), C::new(0.0, 0.0)],
        [C::new(0.0, 0.0), C::new(1.0, 0.0)],
    ];
    let op = kron(&pauli(axis), &eye);
    let flipped = matmul(&op, &matmul(&state.matrix, &op));
    let mut out = TwoQubitState::zero();
    for i in 0..4 {
        for j in 0..4 {
            out.matrix[i][j] = (state.matrix[i][j] + flipped[i][j]) / 2.0;
        }
    }
    out
}

/// Which qubit to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    A,
    B,
}

/// Generic bipartite partial trace over one qubit of a 4x4 operator in the
/// `{|ee>, |eg>, |ge>, |gg>}` basis (index `2a + b`). Tracing out `A`
/// returns `rho_B` and vice versa.
pub fn partial_trace(matrix: &[[C; 4]; 4], traced: Part) -> [[C; 2]; 2] {
    let mut out = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let (row, col) = match traced {
                    Part::A => (2 * k + i, 2 * k + j),
                    Part::B => (2 * i + k, 2 * j + k),
                };
                out[i][j] += matrix[row][col];
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Brute-force entropic uncertainty
// ---------------------------------------------------------------------------

/// Left and right side of the quantum-memory-assisted entropic uncertainty
/// relation evaluated entirely through measurement channels and the
/// eigensolver: `left = sum_axes [S(channel(rho, axis)) - S(rho_B)]`,
/// `right = (|axes| - 1) S(A|B) + 1`.
///
/// The complementarity constant is exactly 1 bit for any pair drawn from
/// the mutually unbiased Pauli triple, which fixes the additive term for
/// both the two- and three-measurement settings.
pub fn brute_eur(state: &TwoQubitState, axes: &[Axis]) -> Result<(f64, f64), OracleError> {
    if axes.len() < 2 || axes.len() > 3 {
        return Err(OracleError::UnsupportedAxes);
    }
    for (i, a) in axes.iter().enumerate() {
        if axes[i + 1..].contains(a) {
            return Err(OracleError::UnsupportedAxes);
        }
    }
    let entropy = |m: &TwoQubitState| -> Result<f64, OracleError> {
        m.entropy()
            .map_err(|e| OracleError::InvalidState(e.to_string()))
    };
    let s_b = density::von_neumann_entropy(&density::reduce_b(state).matrix)
        .map_err(|e| OracleError::InvalidState(e.to_string()))?;
    let s_ab = entropy(state)?;
    let mut left = 0.0;
    for &axis in axes {
        left += entropy(&measurement_channel(state, axis))? - s_b;
    }
    let right = (axes.len() as f64 - 1.0) * (s_ab - s_b) + 1.0;
    Ok((left, right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::joint_state;
    use crate::dynamics::{self, AmplitudePair};
    use crate::params;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn with_r(r: f64) -> ModelParams {
        params::validate(ModelParams {
            coupling_ratio: r,
            ..ModelParams::default()
        })
        .unwrap()
    }

    fn re(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn ode_uncoupled_stays_at_one() {
        let sol = integrate_mu(&with_r(0.0), 5.0, 1e-3).unwrap();
        for &m in &sol.mu {
            assert!((m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ode_matches_critical_closed_form() {
        let sol = integrate_mu(&with_r(0.5), 10.0, 1e-3).unwrap();
        for (i, &lt) in sol.lts.iter().enumerate() {
            let exact = (-lt / 2.0).exp() * (1.0 + lt / 2.0);
            assert!((sol.mu[i] - exact).abs() < 1e-8, "lt = {lt}");
        }
    }

    #[test]
    fn ode_matches_kernel_strong_coupling() {
        let p = with_r(2.0);
        let sol = integrate_mu(&p, 10.0, default_ode_step(2.0)).unwrap();
        let kernel = dynamics::Kernel::new(&p);
        let mut sup: f64 = 0.0;
        for (i, &lt) in sol.lts.iter().enumerate() {
            sup = sup.max((sol.mu[i] - kernel.mu(lt)).abs());
        }
        assert!(sup < 1e-8, "sup error {sup}");
    }

    #[test]
    fn ode_rejects_too_large_step() {
        assert!(matches!(
            integrate_mu(&with_r(50.0), 1.0, 0.01),
            Err(OracleError::StepTooLarge { .. })
        ));
        assert!(matches!(
            integrate_mu(&with_r(0.3), -1.0, 0.01),
            Err(OracleError::BadRange(_))
        ));
    }

    #[test]
    fn ode_fourth_order_convergence() {
        // halving the step should shrink the sup error by ~16x; demand >= 12x
        let p = with_r(1.0);
        let kernel = dynamics::Kernel::new(&p);
        let sup_err = |step: f64| {
            let sol = integrate_mu(&p, 5.0, step).unwrap();
            sol.lts
                .iter()
                .enumerate()
                .map(|(i, &lt)| (sol.mu[i] - kernel.mu(lt)).abs())
                .fold(0.0f64, f64::max)
        };
        let coarse = sup_err(0.05);
        let fine = sup_err(0.025);
        assert!(
            coarse / fine >= 12.0,
            "convergence ratio {} (coarse {coarse}, fine {fine})",
            coarse / fine
        );
    }

    #[test]
    fn eig_diagonal_matrices() {
        let m = [[re(0.5), re(0.0)], [re(0.0), re(0.5)]];
        let e = eig_hermitian(&m).unwrap();
        assert!((e.values[0] - 0.5).abs() < 1e-14);
        assert!((e.values[1] - 0.5).abs() < 1e-14);

        let mut d = [[re(0.0); 4]; 4];
        for (i, v) in [0.4, 0.2, 0.3, 0.1].iter().enumerate() {
            d[i][i] = re(*v);
        }
        let e = eig_hermitian(&d).unwrap();
        for (got, want) in e.values.iter().zip([0.1, 0.2, 0.3, 0.4]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn eig_model_state_rank_structure() {
        for (e1, e2) in [
            (C::new(0.5, 0.2), C::new(-0.3, 0.4)),
            (C::from_polar(0.7, 2.0), C::from_polar(0.55, -0.9)),
        ] {
            let amps = AmplitudePair::new(e1, e2);
            let rho = joint_state(&amps).unwrap();
            let eig = eig_hermitian(&rho.matrix).unwrap();
            let p = amps.population();
            let mut expect = [0.0, 0.0, 1.0 - p, p];
            expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (got, want) in eig.values.iter().zip(expect) {
                assert!((got - want).abs() < 1e-12, "{got} vs {want}");
            }
            assert!(reconstruction_error(&rho.matrix, &eig) < 1e-10);
        }
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        // deterministic pseudo-random Hermitian fill
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..50 {
            let mut m = [[C::new(0.0, 0.0); 4]; 4];
            for i in 0..4 {
                m[i][i] = re(next());
                for j in (i + 1)..4 {
                    m[i][j] = C::new(next(), next());
                    m[j][i] = m[i][j].conj();
                }
            }
            let eig = eig_hermitian(&m).unwrap();
            assert!(reconstruction_error(&m, &eig) < 1e-10);
            // orthonormality of columns
            for a in 0..4 {
                for b in 0..4 {
                    let mut dot = C::new(0.0, 0.0);
                    for i in 0..4 {
                        dot += eig.vectors[i][a].conj() * eig.vectors[i][b];
                    }
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - re(want)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = [[re(0.0); 2]; 2];
        m[0][1] = re(1.0);
        assert!(matches!(
            eig_hermitian(&m),
            Err(OracleError::NotHermitian(_))
        ));
    }

    #[test]
    fn channel_z_leaves_ground_state_alone() {
        let rho = joint_state(&AmplitudePair::new(re(0.0), re(0.0))).unwrap();
        let out = measurement_channel(&rho, Axis::Z);
        for i in 0..4 {
            for j in 0..4 {
                assert!((out.matrix[i][j] - rho.matrix[i][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn channel_x_mixes_ground_state() {
        // |gg><gg| -> (|gg><gg| + |eg><eg|)/2
        let rho = joint_state(&AmplitudePair::new(re(0.0), re(0.0))).unwrap();
        let out = measurement_channel(&rho, Axis::X);
        assert!((out.matrix[1][1].re - 0.5).abs() < 1e-15);
        assert!((out.matrix[3][3].re - 0.5).abs() < 1e-15);
        assert!((out.trace() - re(1.0)).norm() < 1e-15);
    }

    #[test]
    fn channel_preserves_trace_and_hermiticity() {
        let rho = joint_state(&AmplitudePair::new(
            C::new(0.5, 0.3),
            C::new(-0.4, 0.2),
        ))
        .unwrap();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let out = measurement_channel(&rho, axis);
            assert!((out.trace() - re(1.0)).norm() < 1e-14);
            for i in 0..4 {
                for j in 0..4 {
                    assert!((out.matrix[i][j] - out.matrix[j][i].conj()).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn channel_is_unital() {
        let mut max_mixed = TwoQubitState::zero();
        for i in 0..4 {
            max_mixed.matrix[i][i] = re(0.25);
        }
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let out = measurement_channel(&max_mixed, axis);
            for i in 0..4 {
                for j in 0..4 {
                    assert!((out.matrix[i][j] - max_mixed.matrix[i][j]).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn ground_state_brute_eur() {
        let rho = joint_state(&AmplitudePair::new(re(0.0), re(0.0))).unwrap();
        let (l, r) = brute_eur(&rho, &[Axis::X, Axis::Z]).unwrap();
        assert!((l - 1.0).abs() < 1e-10);
        assert!((r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn brute_eur_rejects_bad_axes() {
        let rho = joint_state(&AmplitudePair::new(re(0.0), re(0.0))).unwrap();
        assert!(matches!(
            brute_eur(&rho, &[Axis::X]),
            Err(OracleError::UnsupportedAxes)
        ));
        assert!(matches!(
            brute_eur(&rho, &[Axis::X, Axis::X]),
            Err(OracleError::UnsupportedAxes)
        ));
    }

    #[test]
    fn brute_eur_inequality_holds_on_samples() {
        for k in 0..200 {
            let frac = (k % 20) as f64 / 20.0;
            let p = (k as f64 + 0.5) / 200.0;
            let amps = AmplitudePair::new(
                C::from_polar((p * frac).sqrt(), 0.7 * k as f64),
                C::from_polar((p * (1.0 - frac)).sqrt(), -1.3 * k as f64),
            );
            let rho = joint_state(&amps).unwrap();
            for axes in [vec![Axis::X, Axis::Z], vec![Axis::X, Axis::Y, Axis::Z]] {
                let (l, r) = brute_eur(&rho, &axes).unwrap();
                assert!(l >= r - 1e-10, "axes {axes:?}: left {l} < right {r}");
            }
        }
    }

    #[test]
    fn partial_trace_of_bell_like_state() {
        let rho = joint_state(&AmplitudePair::new(re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)))
            .unwrap();
        let b = partial_trace(&rho.matrix, Part::A);
        assert!((b[0][0].re - 0.5).abs() < 1e-14);
        assert!((b[1][1].re - 0.5).abs() < 1e-14);
        let tr = b[0][0] + b[1][1];
        assert!((tr - re(1.0)).norm() < 1e-14);
    }
}
