//! Cross-validation suite: every closed form checked against the
//! independent numerics in [`crate::oracle`] on randomized inputs with a
//! fixed seed. Drives the `verify` CLI subcommand and the acceptance tests.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::density::{self, joint_state};
use crate::dynamics::{self, AmplitudePair, Kernel};
use crate::information::{self};
use crate::oracle::{self, Axis};
use crate::params::{self, ModelParams};
use crate::sweeps::{self, AxisSpec};

/// Tolerances of the individual checks; defaults match the advertised
/// guarantees of each route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Kernel closed form vs RK4, sup-norm over `lt` in `[0, 10]`.
    pub ode_sup: f64,
    /// Closed-form uncertainty quantities vs measurement channels + eigensolver.
    pub eur: f64,
    /// `2|eta1 eta2*|` vs the X-state Wootters formula.
    pub concurrence: f64,
    /// Eigendecomposition reconstruction and orthonormality.
    pub eig: f64,
    /// Model partial trace vs the generic one.
    pub partial_trace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode_sup: 1e-8,
            eur: 1e-10,
            concurrence: 1e-12,
            eig: 1e-10,
            partial_trace: 1e-12,
        }
    }
}

/// Outcome of one cross-check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn from_worst(name: &'static str, worst: f64, tol: f64) -> Self {
        Check {
            name,
            passed: worst <= tol,
            detail: format!("max deviation {worst:.3e} (tolerance {tol:.1e})"),
        }
    }
}

fn with_r(r: f64) -> ModelParams {
    params::validate(ModelParams {
        coupling_ratio: r,
        ..ModelParams::default()
    })
    .unwrap()
}

/// Random feasible amplitude pair; `complex_phases` draws both phases from
/// `[0, 2 pi)`, otherwise amplitudes are real with random signs.
fn random_amps<R: Rng>(rng: &mut R, complex_phases: bool) -> AmplitudePair {
    let total: f64 = rng.gen();
    let frac: f64 = rng.gen();
    let a = total * frac;
    let b = total * (1.0 - frac);
    let (p1, p2) = if complex_phases {
        (
            rng.gen::<f64>() * std::f64::consts::TAU,
            rng.gen::<f64>() * std::f64::consts::TAU,
        )
    } else {
        (
            if rng.gen::<bool>() { 0.0 } else { std::f64::consts::PI },
            if rng.gen::<bool>() { 0.0 } else { std::f64::consts::PI },
        )
    };
    AmplitudePair::new(
        Complex64::from_polar(a.sqrt(), p1),
        Complex64::from_polar(b.sqrt(), p2),
    )
}

/// Kernel closed form vs RK4 over the spreading R set.
pub fn check_kernel_vs_ode(tol: &Tolerances) -> Check {
    let mut worst: f64 = 0.0;
    for r in [0.1, 0.3, 0.5, 0.7, 1.0, 5.0, 50.0] {
        let p = with_r(r);
        let sol = oracle::integrate_mu(&p, 10.0, oracle::default_ode_step(r)).unwrap();
        let kernel = Kernel::new(&p);
        for (i, &lt) in sol.lts.iter().enumerate() {
            worst = worst.max((sol.mu[i] - kernel.mu(lt)).abs());
        }
    }
    Check::from_worst("kernel-vs-rk4", worst, tol.ode_sup)
}

/// Amplitudes driven by the closed-form kernel vs the same affine map fed
/// with the integrated kernel samples.
pub fn check_amplitudes_vs_ode(tol: &Tolerances) -> Check {
    let mut worst: f64 = 0.0;
    for r in [0.3, 2.0] {
        let p = params::validate(ModelParams {
            coupling_ratio: r,
            theta: 0.8,
            phi: 1.1,
            zeta1: 0.6,
            zeta2: 0.8,
            ..ModelParams::default()
        })
        .unwrap();
        let sol = oracle::integrate_mu(&p, 10.0, oracle::default_ode_step(r)).unwrap();
        for (i, &lt) in sol.lts.iter().enumerate() {
            let closed = dynamics::amplitudes(&p, lt);
            let from_ode = dynamics::amplitudes_with_mu(&p, sol.mu[i]);
            worst = worst
                .max((closed.eta1 - from_ode.eta1).norm())
                .max((closed.eta2 - from_ode.eta2).norm());
        }
    }
    Check::from_worst("amplitudes-vs-rk4", worst, tol.ode_sup)
}

/// RK4 is fourth order: halving the step must shrink the sup-error by at
/// least 12x.
pub fn check_ode_convergence_order() -> Check {
    let p = with_r(1.0);
    let kernel = Kernel::new(&p);
    let sup_err = |step: f64| {
        let sol = oracle::integrate_mu(&p, 5.0, step).unwrap();
        sol.lts
            .iter()
            .enumerate()
            .map(|(i, &lt)| (sol.mu[i] - kernel.mu(lt)).abs())
            .fold(0.0f64, f64::max)
    };
    let ratio = sup_err(0.05) / sup_err(0.025);
    Check {
        name: "rk4-convergence-order",
        passed: ratio >= 12.0,
        detail: format!("error ratio {ratio:.1} on step halving (need >= 12)"),
    }
}

fn eur_worst_over(samples: usize, complex_phases: bool, seed: u64) -> f64 {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let amps = random_amps(&mut rng, complex_phases);
        let rho = joint_state(&amps).unwrap();
        let (l2, r2) = information::eur_two(&amps);
        let (bl2, br2) = oracle::brute_eur(&rho, &[Axis::X, Axis::Z]).unwrap();
        let (l3, r3) = information::eur_three(&amps);
        let (bl3, br3) = oracle::brute_eur(&rho, &[Axis::X, Axis::Y, Axis::Z]).unwrap();
        worst = worst
            .max((l2 - bl2).abs())
            .max((r2 - br2).abs())
            .max((l3 - bl3).abs())
            .max((r3 - br3).abs());
    }
    worst
}

/// Closed-form uncertainty relations vs the channel/eigensolver route on
/// random real amplitudes.
pub fn check_eur_closed_vs_channels_real(tol: &Tolerances, samples: usize) -> Check {
    Check::from_worst(
        "eur-closed-vs-channels-real",
        eur_worst_over(samples, false, 0x5eed_0001),
        tol.eur,
    )
}

/// Same comparison with fully complex amplitudes. The closed forms depend
/// only on the moduli, and the channel spectra agree, so this passes at the
/// same tolerance as the real case.
pub fn check_eur_closed_vs_channels_complex(tol: &Tolerances, samples: usize) -> Check {
    Check::from_worst(
        "eur-closed-vs-channels-complex",
        eur_worst_over(samples, true, 0x5eed_0002),
        tol.eur,
    )
}

/// `C = 2|eta1 eta2*|` vs the X-state Wootters formula on the built state.
pub fn check_concurrence_consistency(tol: &Tolerances, samples: usize) -> Check {
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_0003);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let amps = random_amps(&mut rng, true);
        let rho = joint_state(&amps).unwrap();
        let via_matrix = information::concurrence_xstate(&rho).unwrap();
        worst = worst.max((via_matrix - information::concurrence(&amps)).abs());
    }
    Check::from_worst("concurrence-xstate", worst, tol.concurrence)
}

/// Eigendecomposition quality on random Hermitian matrices: reconstruction
/// and orthonormality in max-norm.
pub fn check_eigensolver(tol: &Tolerances, samples: usize) -> Check {
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_0004);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            m[i][i] = Complex64::new(rng.gen::<f64>() - 0.5, 0.0);
            for j in (i + 1)..4 {
                m[i][j] = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                m[j][i] = m[i][j].conj();
            }
        }
        let eig = oracle::eig_hermitian(&m).unwrap();
        worst = worst.max(oracle::reconstruction_error(&m, &eig));
        for a in 0..4 {
            for b in 0..4 {
                let mut dot = Complex64::new(0.0, 0.0);
                for i in 0..4 {
                    dot += eig.vectors[i][a].conj() * eig.vectors[i][b];
                }
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - Complex64::new(want, 0.0)).norm());
            }
        }
    }
    Check::from_worst("eigensolver-reconstruction", worst, tol.eig)
}

/// Model-specific reductions vs the generic partial trace.
pub fn check_partial_trace(tol: &Tolerances, samples: usize) -> Check {
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_0005);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let rho = joint_state(&random_amps(&mut rng, true)).unwrap();
        let b = density::reduce_b(&rho);
        let b_generic = oracle::partial_trace(&rho.matrix, oracle::Part::A);
        let a = density::reduce_a(&rho);
        let a_generic = oracle::partial_trace(&rho.matrix, oracle::Part::B);
        for i in 0..2 {
            for j in 0..2 {
                worst = worst
                    .max((b.matrix[i][j] - b_generic[i][j]).norm())
                    .max((a.matrix[i][j] - a_generic[i][j]).norm());
            }
        }
    }
    Check::from_worst("partial-trace", worst, tol.partial_trace)
}

/// Steady-state closed forms vs the generic formulas at the steady
/// amplitudes over random parameters.
pub fn check_steady_closed_forms(tol: &Tolerances, samples: usize) -> Check {
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_0006);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let zeta1 = rng.gen::<f64>();
        let p = params::validate(ModelParams {
            theta: rng.gen::<f64>() * std::f64::consts::FRAC_PI_2,
            phi: rng.gen::<f64>() * std::f64::consts::TAU,
            zeta1,
            zeta2: (1.0 - zeta1 * zeta1).sqrt(),
            coupling_ratio: 0.1 + rng.gen::<f64>() * 5.0,
            ..ModelParams::default()
        })
        .unwrap();
        let closed = information::eur_two_steady(&p).unwrap();
        let generic = information::eur_two(&dynamics::steady_amplitudes(&p).unwrap());
        worst = worst
            .max((closed.0 - generic.0).abs())
            .max((closed.1 - generic.1).abs());
    }
    Check::from_worst("steady-closed-forms", worst, tol.eur)
}

/// The uncertainty inequalities over random complex amplitudes, plus the
/// exact arithmetic identity between the two lower bounds.
pub fn check_eur_inequalities(samples: usize) -> Check {
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_0007);
    let mut worst_violation: f64 = 0.0;
    let mut worst_identity: f64 = 0.0;
    for _ in 0..samples {
        let amps = random_amps(&mut rng, true);
        let (l2, r2) = information::eur_two(&amps);
        let (l3, r3) = information::eur_three(&amps);
        worst_violation = worst_violation.max(r2 - l2).max(r3 - l3);
        worst_identity = worst_identity.max((r3 - (2.0 * r2 - 1.0)).abs());
    }
    Check {
        name: "eur-inequalities",
        passed: worst_violation <= 1e-10 && worst_identity <= 1e-12,
        detail: format!(
            "max bound violation {worst_violation:.3e} (tol 1e-10), \
             max |U_r^3 - (2 U_r^2 - 1)| {worst_identity:.3e} (tol 1e-12)"
        ),
    }
}

/// A small grid rendered twice and under different worker counts must be
/// byte-identical.
pub fn check_sweep_determinism() -> Check {
    let p = ModelParams::default();
    let r = AxisSpec::new("R", 0.0, 2.0, 9).unwrap();
    let lt = AxisSpec::new("lt", 0.0, 4.0, 41).unwrap();
    let one = sweeps::with_worker_pool(1, || {
        sweeps::sweep_dynamics(&p, &r, &lt, Some(1)).unwrap().to_csv()
    });
    let again = sweeps::with_worker_pool(1, || {
        sweeps::sweep_dynamics(&p, &r, &lt, Some(1)).unwrap().to_csv()
    });
    let wide = sweeps::with_worker_pool(4, || {
        sweeps::sweep_dynamics(&p, &r, &lt, Some(1)).unwrap().to_csv()
    });
    Check {
        name: "sweep-determinism",
        passed: one == again && one == wide,
        detail: format!("{} bytes, repeat and 4-worker runs identical", one.len()),
    }
}

/// Runs the whole suite with the given tolerances.
pub fn run_all(tol: &Tolerances) -> Vec<Check> {
    vec![
        check_kernel_vs_ode(tol),
        check_amplitudes_vs_ode(tol),
        check_ode_convergence_order(),
        check_eur_closed_vs_channels_real(tol, 10_000),
        check_eur_closed_vs_channels_complex(tol, 10_000),
        check_concurrence_consistency(tol, 10_000),
        check_eigensolver(tol, 200),
        check_partial_trace(tol, 10_000),
        check_steady_closed_forms(tol, 10_000),
        check_eur_inequalities(100_000),
        check_sweep_determinism(),
    ]
}
