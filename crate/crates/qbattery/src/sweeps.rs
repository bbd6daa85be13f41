//! Deterministic parameter-sweep grids: time/coupling dynamics, steady-state
//! parameter planes and the energy-transfer plane, with CSV emission.
//!
//! Grids are row-major over the axes in declared order and bit-identical
//! across runs and worker counts: every row is computed independently from
//! its grid indices and gathered in declared order.

use std::io::{self, Write};

use thiserror::Error;

use crate::dynamics::{self, DynamicsError, Kernel};
use crate::energetics;
use crate::information::{self};
use crate::params::{self, ModelParams, ParamError};

/// Cap on the automatic time-axis densification factor; beyond this the
/// output volume stops being useful as a CSV artifact and callers should
/// pass an explicit factor instead.
pub const MAX_AUTO_DENSIFY: usize = 64;

/// One sweep axis: `points` uniformly spaced values on `[min, max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl AxisSpec {
    pub fn new(name: &str, min: f64, max: f64, points: usize) -> Result<Self, SweepError> {
        if !min.is_finite() || !max.is_finite() || min > max || points == 0 {
            return Err(SweepError::BadAxis(format!(
                "{name}: [{min}, {max}] x {points}"
            )));
        }
        Ok(AxisSpec {
            name: name.to_string(),
            min,
            max,
            points,
        })
    }

    /// The `i`-th grid value; endpoints are exact.
    pub fn value(&self, i: usize) -> f64 {
        if self.points == 1 {
            self.min
        } else if i == self.points - 1 {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.points - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }
}

/// One output row; `None` marks fields that are undefined at that point
/// (printed as empty CSV cells).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepRecord {
    pub lt: Option<f64>,
    pub r: Option<f64>,
    pub zeta1: Option<f64>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub delta_e_b: Option<f64>,
    pub delta_e_a: Option<f64>,
    pub power: Option<f64>,
    pub transfer_rate: Option<f64>,
    pub concurrence: Option<f64>,
    pub u_left_xz: Option<f64>,
    pub u_right_2: Option<f64>,
    pub tightness_xz: Option<f64>,
    pub u_left_xyz: Option<f64>,
    pub u_right_3: Option<f64>,
    pub tightness_xyz: Option<f64>,
}

/// CSV header shared by every subcommand that emits grids.
pub const CSV_HEADER: &str = "lt,R,zeta1,theta,phi,delta_e_b,delta_e_a,power,transfer_rate,\
concurrence,u_left_xz,u_right_2,tightness_xz,u_left_xyz,u_right_3,tightness_xyz";

/// Floats are printed with 12 significant digits in scientific notation so
/// the CSV is a stable, diff-able regression artifact.
pub fn fmt_value(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(x) => format!("{x:.11e}"),
    }
}

impl SweepRecord {
    pub fn to_csv_row(&self) -> String {
        [
            self.lt,
            self.r,
            self.zeta1,
            self.theta,
            self.phi,
            self.delta_e_b,
            self.delta_e_a,
            self.power,
            self.transfer_rate,
            self.concurrence,
            self.u_left_xz,
            self.u_right_2,
            self.tightness_xz,
            self.u_left_xyz,
            self.u_right_3,
            self.tightness_xyz,
        ]
        .iter()
        .map(|&v| fmt_value(v))
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// A computed grid: axis specs, one record per point (row-major over the
/// axes in declared order) and a timestamp-free run descriptor.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub axes: Vec<AxisSpec>,
    pub rows: Vec<SweepRecord>,
    pub descriptor: String,
}

impl SweepGrid {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 + self.rows.len() * 64);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv_row());
            out.push('\n');
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("invalid axis {0}")]
    BadAxis(String),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Runs `f` on a worker pool capped at `workers` threads (0 means the
/// default pool). Output is independent of the worker count.
#[cfg(feature = "parallel")]
pub fn with_worker_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool")
            .install(f)
    }
}

/// Serial fallback when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn with_worker_pool<T>(workers: usize, f: impl FnOnce() -> T) -> T {
    let _ = workers;
    f()
}

#[cfg(feature = "parallel")]
fn map_rows<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_rows<T>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

fn with_zeta1(template: &ModelParams, zeta1: f64) -> Result<ModelParams, ParamError> {
    params::validate(ModelParams {
        zeta1,
        zeta2: (1.0 - zeta1 * zeta1).max(0.0).sqrt(),
        ..*template
    })
}

/// Full observable record at a dynamical grid point.
fn dynamics_record(p: &ModelParams, kernel: &Kernel, lt: f64) -> SweepRecord {
    let amps = dynamics::amplitudes_with_mu(p, kernel.mu(lt));
    let energy = energetics::energy_report_from(&amps, p.theta, lt);
    let unc = information::uncertainty_report(&amps);
    SweepRecord {
        lt: Some(lt),
        r: Some(p.coupling_ratio),
        zeta1: Some(p.zeta1),
        theta: Some(p.theta),
        phi: Some(p.phi),
        delta_e_b: Some(energy.delta_e_b),
        delta_e_a: Some(energy.delta_e_a),
        power: Some(energy.power),
        transfer_rate: energy.transfer_rate,
        concurrence: Some(information::concurrence(&amps)),
        u_left_xz: Some(unc.u_left_xz),
        u_right_2: Some(unc.u_right_2),
        tightness_xz: Some(unc.tightness_xz),
        u_left_xyz: Some(unc.u_left_xyz),
        u_right_3: Some(unc.u_right_3),
        tightness_xyz: Some(unc.tightness_xyz),
    }
}

/// One-point record at dimensionless time `lt` (the `point` subcommand).
pub fn point_record(params: &ModelParams, lt: f64) -> Result<SweepRecord, SweepError> {
    let p = params::validate(*params)?;
    Ok(dynamics_record(&p, &Kernel::new(&p), lt))
}

/// Grid of all observables over (R, lt).
///
/// The time axis is densified by `densify` (default: `ceil(max(1, R_max))`
/// capped at [`MAX_AUTO_DENSIFY`]) so non-Markovian oscillations of period
/// `~ 2 pi / chi2` stay resolved; the requested points remain a subgrid.
pub fn sweep_dynamics(
    template: &ModelParams,
    r_axis: &AxisSpec,
    lt_axis: &AxisSpec,
    densify: Option<usize>,
) -> Result<SweepGrid, SweepError> {
    let base = params::validate(*template)?;
    if r_axis.min < 0.0 {
        return Err(SweepError::BadAxis(format!(
            "{}: coupling ratio must be nonnegative",
            r_axis.name
        )));
    }
    if lt_axis.min < 0.0 {
        return Err(SweepError::BadAxis(format!(
            "{}: dimensionless time must be nonnegative",
            lt_axis.name
        )));
    }
    let factor = densify
        .unwrap_or_else(|| (r_axis.max.ceil().max(1.0) as usize).min(MAX_AUTO_DENSIFY))
        .max(1);
    let lt_dense = AxisSpec::new(
        &lt_axis.name,
        lt_axis.min,
        lt_axis.max,
        if lt_axis.points == 1 {
            1
        } else {
            (lt_axis.points - 1) * factor + 1
        },
    )?;
    let n_r = r_axis.points;
    let n_lt = lt_dense.points;
    let rows = map_rows(n_r * n_lt, |idx| {
        let p = ModelParams {
            coupling_ratio: r_axis.value(idx / n_lt),
            ..base
        };
        dynamics_record(&p, &Kernel::new(&p), lt_dense.value(idx % n_lt))
    });
    let descriptor = format!(
        "dynamics lambda={} theta={} phi={} zeta1={} omega0={} densify={factor}",
        base.lambda, base.theta, base.phi, base.zeta1, base.omega0
    );
    Ok(SweepGrid {
        axes: vec![r_axis.clone(), lt_dense],
        rows,
        descriptor,
    })
}

/// Steady-state observables over (theta, zeta1) at fixed relative phase.
///
/// The steady state depends only on the dark-state projection, so `lt`, `R`
/// and the power column are emitted empty; the uncertainty columns use the
/// steady-state closed forms.
pub fn sweep_steady(
    template: &ModelParams,
    theta_axis: &AxisSpec,
    zeta1_axis: &AxisSpec,
) -> Result<SweepGrid, SweepError> {
    let base = params::validate(*template)?;
    if base.coupling_ratio == 0.0 {
        return Err(SweepError::Dynamics(DynamicsError::NoSteadyState));
    }
    if theta_axis.min < 0.0 || theta_axis.max > std::f64::consts::FRAC_PI_2 + 1e-12 {
        return Err(SweepError::BadAxis(format!(
            "{}: theta must stay within [0, pi/2]",
            theta_axis.name
        )));
    }
    if zeta1_axis.min < 0.0 || zeta1_axis.max > 1.0 {
        return Err(SweepError::BadAxis(format!(
            "{}: zeta1 must stay within [0, 1]",
            zeta1_axis.name
        )));
    }
    let n_t = theta_axis.points;
    let n_z = zeta1_axis.points;
    let rows = map_rows(n_t * n_z, |idx| {
        let theta = theta_axis.value(idx / n_z);
        let zeta1 = zeta1_axis.value(idx % n_z);
        let p = with_zeta1(&ModelParams { theta, ..base }, zeta1).expect("axis-checked");
        let amps = dynamics::steady_amplitudes(&p).expect("R > 0 checked");
        let (u_left_xz, u_right_2) = information::eur_two_steady(&p).expect("R > 0 checked");
        let (u_left_xyz, u_right_3) = information::eur_three(&amps);
        let cos2 = theta.cos() * theta.cos();
        let sin2 = theta.sin() * theta.sin();
        let delta_e_b = amps.eta2.norm_sqr() - cos2;
        let delta_e_a = amps.eta1.norm_sqr() - sin2;
        let transfer_rate = if delta_e_a.abs() < energetics::TRANSFER_RATE_FLOOR {
            None
        } else {
            Some(delta_e_b / delta_e_a.abs())
        };
        SweepRecord {
            lt: None,
            r: None,
            zeta1: Some(zeta1),
            theta: Some(theta),
            phi: Some(p.phi),
            delta_e_b: Some(delta_e_b),
            delta_e_a: Some(delta_e_a),
            power: None,
            transfer_rate,
            concurrence: Some(information::concurrence(&amps)),
            u_left_xz: Some(u_left_xz),
            u_right_2: Some(u_right_2),
            tightness_xz: Some(u_left_xz - u_right_2),
            u_left_xyz: Some(u_left_xyz),
            u_right_3: Some(u_right_3),
            tightness_xyz: Some(u_left_xyz - u_right_3),
        }
    });
    let descriptor = format!(
        "steady phi={} lambda={} omega0={}",
        base.phi, base.lambda, base.omega0
    );
    Ok(SweepGrid {
        axes: vec![theta_axis.clone(), zeta1_axis.clone()],
        rows,
        descriptor,
    })
}

/// Observables over the energy-transfer plane, parameterized directly by
/// the populations `a = |eta1|^2`, `b = |eta2|^2` with real nonnegative
/// amplitudes (separable `theta = pi/2` start).
///
/// Axes are reported as `Delta E_A = a - 1` and `Delta E_B = b`; points
/// with `a + b > 1` are infeasible and carry empty observable columns.
pub fn sweep_transfer_plane(
    a_axis: &AxisSpec,
    b_axis: &AxisSpec,
) -> Result<SweepGrid, SweepError> {
    for axis in [a_axis, b_axis] {
        if axis.min < 0.0 {
            return Err(SweepError::BadAxis(format!(
                "{}: populations must be nonnegative",
                axis.name
            )));
        }
    }
    let theta = std::f64::consts::FRAC_PI_2;
    let n_a = a_axis.points;
    let n_b = b_axis.points;
    let rows = map_rows(n_a * n_b, |idx| {
        let a = a_axis.value(idx / n_b);
        let b = b_axis.value(idx % n_b);
        let mut rec = SweepRecord {
            theta: Some(theta),
            phi: Some(0.0),
            delta_e_a: Some(a - 1.0),
            delta_e_b: Some(b),
            ..SweepRecord::default()
        };
        if a + b <= 1.0 + 1e-12 {
            let amps = dynamics::AmplitudePair::new(
                num_complex::Complex64::new(a.sqrt(), 0.0),
                num_complex::Complex64::new(b.sqrt(), 0.0),
            );
            let unc = information::uncertainty_report(&amps);
            rec.transfer_rate = if 1.0 - a < energetics::TRANSFER_RATE_FLOOR {
                None
            } else {
                Some(b / (1.0 - a))
            };
            rec.concurrence = Some(information::concurrence(&amps));
            rec.u_left_xz = Some(unc.u_left_xz);
            rec.u_right_2 = Some(unc.u_right_2);
            rec.tightness_xz = Some(unc.tightness_xz);
            rec.u_left_xyz = Some(unc.u_left_xyz);
            rec.u_right_3 = Some(unc.u_right_3);
            rec.tightness_xyz = Some(unc.tightness_xyz);
        }
        rec
    });
    Ok(SweepGrid {
        axes: vec![a_axis.clone(), b_axis.clone()],
        rows,
        descriptor: "plane theta=pi/2 real-amplitudes".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn base() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn axis_endpoints_are_exact() {
        let ax = AxisSpec::new("x", 0.25 * PI, 0.5 * PI, 201).unwrap();
        assert_eq!(ax.value(0), 0.25 * PI);
        assert_eq!(ax.value(200), 0.5 * PI);
        assert_eq!(ax.values().len(), 201);
    }

    #[test]
    fn axis_rejects_nonsense() {
        assert!(AxisSpec::new("x", 1.0, 0.0, 5).is_err());
        assert!(AxisSpec::new("x", 0.0, 1.0, 0).is_err());
        assert!(AxisSpec::new("x", f64::NAN, 1.0, 5).is_err());
    }

    #[test]
    fn dynamics_grid_shape_and_order() {
        let r = AxisSpec::new("R", 0.0, 1.0, 3).unwrap();
        let lt = AxisSpec::new("lt", 0.0, 2.0, 5).unwrap();
        let g = sweep_dynamics(&base(), &r, &lt, Some(1)).unwrap();
        assert_eq!(g.rows.len(), 15);
        // row-major: R outer, lt inner
        assert_eq!(g.rows[0].r, Some(0.0));
        assert_eq!(g.rows[0].lt, Some(0.0));
        assert_eq!(g.rows[4].lt, Some(2.0));
        assert_eq!(g.rows[5].r, Some(0.5));
        assert_eq!(g.rows[14].r, Some(1.0));
    }

    #[test]
    fn auto_densify_keeps_requested_points_as_subgrid() {
        let r = AxisSpec::new("R", 0.0, 3.0, 2).unwrap();
        let lt = AxisSpec::new("lt", 0.0, 1.0, 11).unwrap();
        let g = sweep_dynamics(&base(), &r, &lt, None).unwrap();
        // factor ceil(3) = 3: 31 points per R row
        assert_eq!(g.axes[1].points, 31);
        assert_eq!(g.rows.len(), 62);
        assert_eq!(g.rows[30].lt, Some(1.0));
    }

    #[test]
    fn grid_rows_satisfy_observable_invariants() {
        let r = AxisSpec::new("R", 0.0, 5.0, 6).unwrap();
        let lt = AxisSpec::new("lt", 0.0, 8.0, 30).unwrap();
        let g = sweep_dynamics(&base(), &r, &lt, Some(2)).unwrap();
        for row in &g.rows {
            assert!(row.tightness_xz.unwrap() >= -1e-10);
            assert!(row.tightness_xyz.unwrap() >= -1e-10);
            assert!(row.delta_e_b.unwrap() + row.delta_e_a.unwrap() <= 1e-12);
            assert!(row.concurrence.unwrap() >= 0.0);
            if let Some(rate) = row.transfer_rate {
                if row.delta_e_b.unwrap() >= 0.0 {
                    assert!((-1e-12..=1.0 + 1e-12).contains(&rate));
                }
            }
        }
    }

    #[test]
    fn dynamics_grid_max_in_upper_markovian_band() {
        // over R in [0.5, 1] the stored energy tops out near 0.34 around
        // lt = 3.6, at the largest coupling
        let r = AxisSpec::new("R", 0.5, 1.0, 3).unwrap();
        let lt = AxisSpec::new("lt", 0.0, 20.0, 801).unwrap();
        let g = sweep_dynamics(&base(), &r, &lt, Some(1)).unwrap();
        let (mut best, mut at) = (f64::MIN, (0.0, 0.0));
        for row in &g.rows {
            let v = row.delta_e_b.unwrap();
            if v > best {
                best = v;
                at = (row.r.unwrap(), row.lt.unwrap());
            }
        }
        assert!((best - 0.338).abs() < 5e-3, "grid max {best}");
        assert_eq!(at.0, 1.0);
        assert!((at.1 - 3.63).abs() < 0.1, "at lt {}", at.1);
    }

    #[test]
    fn steady_symmetric_point_stores_one_quarter() {
        let theta = AxisSpec::new("theta", FRAC_PI_2, FRAC_PI_2, 1).unwrap();
        let zeta = AxisSpec::new("zeta1", FRAC_1_SQRT_2, FRAC_1_SQRT_2, 1).unwrap();
        let g = sweep_steady(&base(), &theta, &zeta).unwrap();
        assert_eq!(g.rows.len(), 1);
        assert!((g.rows[0].delta_e_b.unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn steady_separable_row_never_discharges() {
        // theta = pi/2 keeps Delta E_B(inf) >= 0 for every zeta1
        let theta = AxisSpec::new("theta", FRAC_PI_2, FRAC_PI_2, 1).unwrap();
        let zeta = AxisSpec::new("zeta1", 0.0, 1.0, 101).unwrap();
        let g = sweep_steady(&base(), &theta, &zeta).unwrap();
        for row in &g.rows {
            assert!(row.delta_e_b.unwrap() >= -1e-12);
        }
    }

    #[test]
    fn steady_requires_coupling() {
        let theta = AxisSpec::new("theta", 0.0, FRAC_PI_2, 3).unwrap();
        let zeta = AxisSpec::new("zeta1", 0.0, 1.0, 3).unwrap();
        let p = ModelParams {
            coupling_ratio: 0.0,
            ..base()
        };
        assert!(matches!(
            sweep_steady(&p, &theta, &zeta),
            Err(SweepError::Dynamics(DynamicsError::NoSteadyState))
        ));
    }

    #[test]
    fn plane_interior_point_concurrence() {
        let a = AxisSpec::new("a", 0.25, 0.25, 1).unwrap();
        let b = AxisSpec::new("b", 0.25, 0.25, 1).unwrap();
        let g = sweep_transfer_plane(&a, &b).unwrap();
        assert!((g.rows[0].concurrence.unwrap() - 0.5).abs() < 1e-12);
        assert!((g.rows[0].delta_e_a.unwrap() + 0.75).abs() < 1e-15);
        assert!((g.rows[0].delta_e_b.unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn plane_edges_have_no_entanglement() {
        let a = AxisSpec::new("a", 0.0, 1.0, 21).unwrap();
        let b = AxisSpec::new("b", 0.0, 0.0, 1).unwrap();
        let g = sweep_transfer_plane(&a, &b).unwrap();
        for row in &g.rows {
            assert_eq!(row.concurrence, Some(0.0));
        }
    }

    #[test]
    fn plane_marks_infeasible_points_empty() {
        let a = AxisSpec::new("a", 0.8, 0.8, 1).unwrap();
        let b = AxisSpec::new("b", 0.8, 0.8, 1).unwrap();
        let g = sweep_transfer_plane(&a, &b).unwrap();
        let row = &g.rows[0];
        assert_eq!(row.concurrence, None);
        assert_eq!(row.u_left_xz, None);
        assert_eq!(row.delta_e_b, Some(0.8));
        assert_eq!(row.delta_e_a, Some(0.8 - 1.0));
    }

    #[test]
    fn csv_has_header_and_stable_shape() {
        let a = AxisSpec::new("a", 0.0, 1.0, 3).unwrap();
        let b = AxisSpec::new("b", 0.0, 1.0, 3).unwrap();
        let g = sweep_transfer_plane(&a, &b).unwrap();
        let csv = g.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), 9);
        for line in csv.lines().skip(1) {
            assert_eq!(line.matches(',').count(), 15);
        }
    }

    #[test]
    fn runs_are_bit_identical() {
        let theta = AxisSpec::new("theta", 0.25 * PI, 0.5 * PI, 31).unwrap();
        let zeta = AxisSpec::new("zeta1", 0.0, 1.0, 31).unwrap();
        let first = sweep_steady(&base(), &theta, &zeta).unwrap().to_csv();
        let second = sweep_steady(&base(), &theta, &zeta).unwrap().to_csv();
        assert_eq!(first, second);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let r = AxisSpec::new("R", 0.0, 2.0, 7).unwrap();
        let lt = AxisSpec::new("lt", 0.0, 5.0, 40).unwrap();
        let p = base();
        let serial =
            with_worker_pool(1, || sweep_dynamics(&p, &r, &lt, Some(1)).unwrap().to_csv());
        let parallel =
            with_worker_pool(4, || sweep_dynamics(&p, &r, &lt, Some(1)).unwrap().to_csv());
        assert_eq!(serial, parallel);
    }

    #[test]
    fn point_record_uncoupled() {
        let p = ModelParams {
            coupling_ratio: 0.0,
            ..base()
        };
        let rec = point_record(&p, 5.0).unwrap();
        assert_eq!(rec.delta_e_b, Some(0.0));
        // cos(pi/2) is ~6e-17 in f64, so the concurrence is zero only to
        // machine precision
        assert!(rec.concurrence.unwrap() < 1e-15);
        assert_eq!(rec.transfer_rate, None);
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_value(Some(0.25)), "2.50000000000e-1");
        assert_eq!(fmt_value(None), "");
    }
}
