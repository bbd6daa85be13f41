//! Joint and reduced density operators and von Neumann entropies (in bits).
//!
//! All 4x4 matrices use the product basis `{|ee>, |eg>, |ge>, |gg>}` (qubit A
//! first, `|e>` before `|g>`); 2x2 matrices use `{|e>, |g>}`.

use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::AmplitudePair;
use crate::oracle::{self, OracleError};

/// Excess population over 1 tolerated before [`joint_state`] errors.
pub const POPULATION_TOL: f64 = 1e-10;
/// Eigenvalues may stray outside `[0, 1]` by this much and are clipped;
/// larger violations are reported as errors instead of silently fixed.
pub const EIGENVALUE_CLIP_TOL: f64 = 1e-10;
/// Eigenvalues at or below this threshold are dropped from entropy sums
/// (the `0 log 0 := 0` convention).
pub const EIGENVALUE_DROP_TOL: f64 = 1e-14;

/// 4x4 Hermitian density operator of the charger-battery pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    pub matrix: [[Complex64; 4]; 4],
}

/// 2x2 Hermitian density operator of a single qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub matrix: [[Complex64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("|eta1|^2 + |eta2|^2 = {0} exceeds 1 beyond tolerance")]
    PopulationOverflow(f64),
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("eigenvalue {0} outside [0, 1] beyond the clip tolerance")]
    EigenvalueOutOfRange(f64),
}

impl TwoQubitState {
    pub fn zero() -> Self {
        TwoQubitState {
            matrix: [[Complex64::new(0.0, 0.0); 4]; 4],
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.matrix[i][i]).sum()
    }

    /// `S(rho_AB)` in bits.
    pub fn entropy(&self) -> Result<f64, DensityError> {
        von_neumann_entropy(&self.matrix)
    }
}

impl QubitState {
    pub fn trace(&self) -> Complex64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    pub fn entropy(&self) -> Result<f64, DensityError> {
        von_neumann_entropy(&self.matrix)
    }
}

/// Builds `rho_AB(t)` from the amplitude pair.
///
/// Populates `|eg><eg|`, `|ge><ge|`, the `eta1 eta2*` coherences and the
/// leaked population `1 - |eta1|^2 - |eta2|^2` on `|gg><gg|`; the `|ee>`
/// row and column are identically zero.
pub fn joint_state(amps: &AmplitudePair) -> Result<TwoQubitState, DensityError> {
    let pop = amps.population();
    if pop > 1.0 + POPULATION_TOL {
        return Err(DensityError::PopulationOverflow(pop));
    }
    let mut rho = TwoQubitState::zero();
    rho.matrix[1][1] = Complex64::new(amps.eta1.norm_sqr(), 0.0);
    rho.matrix[2][2] = Complex64::new(amps.eta2.norm_sqr(), 0.0);
    rho.matrix[1][2] = amps.eta1 * amps.eta2.conj();
    rho.matrix[2][1] = amps.eta1.conj() * amps.eta2;
    rho.matrix[3][3] = Complex64::new(1.0 - pop, 0.0);
    Ok(rho)
}

/// Partial trace over the charger: `rho_B[b1][b2] = sum_a rho[2a+b1][2a+b2]`.
///
/// For model states this is `diag(|eta2|^2, 1 - |eta2|^2)`.
pub fn reduce_b(state: &TwoQubitState) -> QubitState {
    let m = &state.matrix;
    QubitState {
        matrix: [
            [m[0][0] + m[2][2], m[0][1] + m[2][3]],
            [m[1][0] + m[3][2], m[1][1] + m[3][3]],
        ],
    }
}

/// Partial trace over the battery: `rho_A[a1][a2] = sum_b rho[2a1+b][2a2+b]`.
pub fn reduce_a(state: &TwoQubitState) -> QubitState {
    let m = &state.matrix;
    QubitState {
        matrix: [
            [m[0][0] + m[1][1], m[0][2] + m[1][3]],
            [m[2][0] + m[3][1], m[2][2] + m[3][3]],
        ],
    }
}

/// Entropy `-sum p log2 p` of a probability vector, skipping entries at or
/// below [`EIGENVALUE_DROP_TOL`].
pub fn entropy_from_probs(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > EIGENVALUE_DROP_TOL)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Binary entropy `h(p)` in bits, with the argument clamped to `[0, 1]`.
pub fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    entropy_from_probs(&[p, 1.0 - p])
}

/// `S(rho) = -tr(rho log2 rho)` for a Hermitian PSD unit-trace matrix.
///
/// Eigenvalues within [`EIGENVALUE_CLIP_TOL`] of `[0, 1]` are clipped before
/// the logs; anything further out is an error, to distinguish numerical
/// noise from bugs.
pub fn von_neumann_entropy<const N: usize>(
    matrix: &[[Complex64; N]; N],
) -> Result<f64, DensityError> {
    let eig = oracle::eig_hermitian(matrix).map_err(|e| match e {
        OracleError::NotHermitian(_) => DensityError::NotHermitian,
        other => panic!("unexpected eigensolver failure: {other}"),
    })?;
    let mut probs = [0.0; N];
    for (i, &v) in eig.values.iter().enumerate() {
        if v < -EIGENVALUE_CLIP_TOL || v > 1.0 + EIGENVALUE_CLIP_TOL {
            return Err(DensityError::EigenvalueOutOfRange(v));
        }
        probs[i] = v.clamp(0.0, 1.0);
    }
    Ok(entropy_from_probs(&probs))
}

/// Conditional entropy `S(A|B) = S(rho_AB) - S(rho_B)`; negative values
/// signal entanglement.
pub fn conditional_entropy_ab(state: &TwoQubitState) -> Result<f64, DensityError> {
    Ok(state.entropy()? - reduce_b(state).entropy()?)
}
