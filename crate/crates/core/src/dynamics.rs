//! Hamiltonian flow of a system and conservation diagnostics along it.
//!
//! The integrator is the Dormand-Prince 5(4) pair with a PI step-size
//! controller. Observables are evaluated at accepted steps only.

use serde::{Deserialize, Serialize};

use crate::error::{DomainError, Error, Result};
use crate::jets::{Observable, PhasePoint, DIM, ETA, P_ETA, P_XI, XI};
use crate::poisson::Integrals;
use crate::systems::constants::ConstantPolys;
use crate::systems::{
    build_fns, hamiltonian, SampleDomain, SystemFns, SystemObservable, SystemSpec,
};

pub const DEFAULT_T_END: f64 = 10.0;
pub const MIN_DT: f64 = 1e-14;
/// Bound on `|H|` enforced by [`clamp_momenta`].
pub const MAX_ABS_ENERGY: f64 = 10.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order weights minus the embedded fourth-order ones.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const PI_ALPHA: f64 = 0.7 / 5.0;
const PI_BETA: f64 = 0.4 / 5.0;

type State = [f64; DIM];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 5_000_000,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Termination {
    Completed,
    /// The step ending at `t` left the admissible region; it is not stored.
    DomainExit {
        t: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub min_dt: f64,
    pub max_dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    pub stats: StepStats,
    pub termination: Termination,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> (f64, PhasePoint) {
        let i = self.times.len() - 1;
        (self.times[i], self.states[i])
    }
}

/// Hamilton's equations `(H_p, -H_q)` of one system.
struct VectorField {
    h: SystemObservable,
}

impl VectorField {
    fn eval(&self, y: &State) -> Result<State, DomainError> {
        let g = self.h.eval(&PhasePoint::from_array(*y))?.grad;
        let f = [g[P_XI], g[P_ETA], -g[XI], -g[ETA]];
        if f.iter().all(|v| v.is_finite()) {
            Ok(f)
        } else {
            Err(DomainError::new("vector field", f64::NAN))
        }
    }
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        *o += h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>();
    }
    out
}

fn error_norm(err: &State, y: &State, y_new: &State, opts: &IntegratorOptions) -> f64 {
    let s: f64 = (0..DIM)
        .map(|i| {
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (s / DIM as f64).sqrt()
}

/// Fifth-order solution, error estimate and the derivative at its end.
fn dopri_step(
    f: &VectorField,
    y: &State,
    k1: &State,
    h: f64,
) -> Result<(State, State, State), DomainError> {
    let k2 = f.eval(&axpy(y, h, &[(A21, k1)]))?;
    let k3 = f.eval(&axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = f.eval(&axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = f.eval(&axpy(
        y,
        h,
        &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)],
    ))?;
    let k6 = f.eval(&axpy(
        y,
        h,
        &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
    ))?;
    let y_new = axpy(
        y,
        h,
        &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = f.eval(&y_new)?;
    let mut err = [0.0; DIM];
    for (i, e) in err.iter_mut().enumerate() {
        *e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Ok((y_new, err, k7))
}

/// Starting step from the size of the state and its derivative.
fn initial_step(f: &VectorField, y: &State, k1: &State, opts: &IntegratorOptions) -> f64 {
    let zeros = [0.0; DIM];
    let d0 = error_norm(y, y, &zeros, opts);
    let d1 = error_norm(k1, y, &zeros, opts);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let d2 = f
        .eval(&axpy(y, h0, &[(1.0, k1)]))
        .map(|k| {
            let diff: State = std::array::from_fn(|i| k[i] - k1[i]);
            error_norm(&diff, y, &zeros, opts) / h0
        })
        .unwrap_or(f64::INFINITY);
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1)
}

/// Signs of `g` and of whichever of `xi - eta`, `xi + eta` the class
/// excludes a strip around; a change between steps means the step crossed
/// a curve where the system is singular.
fn side(fns: &SystemFns, domain: &SampleDomain, y: &State) -> [bool; 3] {
    let g = fns.metric_value(y[XI], y[ETA]).unwrap_or(f64::NAN);
    [
        domain.min_abs_diff.is_some() && y[XI] > y[ETA],
        (domain.min_abs_sum.is_some() || domain.min_sum.is_some()) && y[XI] + y[ETA] > 0.0,
        g > 0.0,
    ]
}

/// Integrates Hamilton's equations from `initial` over `[0, t_end]`.
pub fn integrate(
    spec: &SystemSpec,
    initial: PhasePoint,
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Trajectory> {
    integrate_with(
        spec,
        initial,
        t_end,
        &IntegratorOptions::with_tolerances(rel_tol, abs_tol),
    )
}

pub fn integrate_with(
    spec: &SystemSpec,
    initial: PhasePoint,
    t_end: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Invalid(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(Error::Invalid("tolerances must be positive".into()));
    }
    let domain = SampleDomain::for_class(spec.class);
    if !initial.is_finite() || !domain.admits_configuration(spec, initial.xi, initial.eta) {
        return Err(Error::Invalid(format!(
            "initial point {:?} is outside the {} domain",
            initial.to_array(),
            spec.class
        )));
    }
    let field = VectorField {
        h: hamiltonian(spec),
    };
    let fns = build_fns(spec);
    let mut y = initial.to_array();
    let mut k1 = field.eval(&y)?;
    let mut t = 0.0;
    let mut h = initial_step(&field, &y, &k1, opts).min(t_end);
    let mut err_old = 1e-4_f64;
    let mut stats = StepStats {
        accepted: 0,
        rejected: 0,
        min_dt: f64::INFINITY,
        max_dt: 0.0,
    };
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![initial],
        stats,
        termination: Termination::Completed,
    };
    while t < t_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepFailure { t, dt: h });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h < MIN_DT {
            return Err(Error::StepFailure { t, dt: h });
        }
        let (y_new, err, k7) = match dopri_step(&field, &y, &k1, h) {
            Ok(r) => r,
            Err(_) => {
                stats.rejected += 1;
                h *= 0.25;
                continue;
            }
        };
        let e = error_norm(&err, &y, &y_new, opts);
        if !(e <= 1.0) {
            stats.rejected += 1;
            let fac = if e.is_finite() {
                (SAFETY * e.powf(-1.0 / 5.0)).max(FAC_MIN)
            } else {
                FAC_MIN
            };
            h *= fac;
            continue;
        }
        if side(&fns, &domain, &y_new) != side(&fns, &domain, &y) {
            // Stepped across a singular curve; shorten until the step lands
            // in the excluded strip instead.
            stats.rejected += 1;
            h *= 0.5;
            continue;
        }
        let t_new = if last { t_end } else { t + h };
        stats.accepted += 1;
        stats.min_dt = stats.min_dt.min(h);
        stats.max_dt = stats.max_dt.max(h);
        if !domain.admits_configuration(spec, y_new[XI], y_new[ETA])
            || !y_new.iter().all(|v| v.is_finite())
        {
            traj.termination = Termination::DomainExit { t: t_new };
            break;
        }
        t = t_new;
        y = y_new;
        k1 = k7;
        traj.times.push(t);
        traj.states.push(PhasePoint::from_array(y));
        let e = e.max(1e-10);
        let fac = (SAFETY * e.powf(-PI_ALPHA) * err_old.powf(PI_BETA)).clamp(FAC_MIN, FAC_MAX);
        err_old = e;
        h *= fac;
    }
    traj.stats = stats;
    Ok(traj)
}

/// Scales the momenta of `point` so that `|H| <= MAX_ABS_ENERGY`.
pub fn clamp_momenta(spec: &SystemSpec, point: PhasePoint) -> Result<PhasePoint> {
    let h = hamiltonian(spec);
    let e = h.value(&point)?;
    if e.abs() <= MAX_ABS_ENERGY {
        return Ok(point);
    }
    let w = h.value(&PhasePoint::new(point.xi, point.eta, 0.0, 0.0))?;
    if w.abs() > MAX_ABS_ENERGY {
        return Err(Error::Invalid(format!(
            "potential energy {w:.3e} alone exceeds the bound {MAX_ABS_ENERGY}"
        )));
    }
    // H is affine in the square of a common momentum scale.
    let kinetic = e - w;
    let s2 = (MAX_ABS_ENERGY.copysign(e) - w) / kinetic;
    let s = s2.clamp(0.0, 1.0).sqrt();
    Ok(PhasePoint::new(
        point.xi,
        point.eta,
        s * point.p_xi,
        s * point.p_eta,
    ))
}

/// `H, A, B` and the Casimir combination at one state, with the magnitude
/// of the Casimir terms for normalization.
#[derive(Debug, Clone, Copy)]
struct Conserved {
    values: [f64; 4],
    casimir_scale: f64,
}

fn conserved(integrals: &Integrals, polys: &ConstantPolys, p: &PhasePoint) -> Result<Conserved> {
    let q = integrals.at(p)?;
    let consts = polys.at_energy(q.h.val);
    let terms = consts.casimir_terms(q.a.val, q.b.val, q.c.val);
    Ok(Conserved {
        values: [q.h.val, q.a.val, q.b.val, terms.iter().sum()],
        casimir_scale: terms.iter().map(|t| t.abs()).sum(),
    })
}

pub const CONSERVED_NAMES: [&str; 4] = ["H", "A", "B", "casimir"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub name: String,
    pub initial: f64,
    /// `max |Q(t) - Q(0)|`.
    pub absolute: f64,
    /// Absolute drift over `1 + |Q(0)|`; for the Casimir the sum of the
    /// magnitudes of its terms replaces `|Q(0)|`.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub drifts: Vec<Drift>,
}

impl DriftReport {
    pub fn max_normalized(&self) -> f64 {
        crate::report::max_residual(self.drifts.iter().map(|d| d.normalized))
    }

    pub fn get(&self, name: &str) -> Option<&Drift> {
        self.drifts.iter().find(|d| d.name == name)
    }
}

pub fn drift_report(spec: &SystemSpec, traj: &Trajectory) -> Result<DriftReport> {
    let first = traj
        .states
        .first()
        .ok_or_else(|| Error::Invalid("empty trajectory".into()))?;
    let integrals = Integrals::new(spec);
    let polys = ConstantPolys::for_spec(spec);
    let q0 = conserved(&integrals, &polys, first)?;
    let mut abs = [0.0_f64; 4];
    for p in &traj.states {
        let q = conserved(&integrals, &polys, p)?;
        for i in 0..4 {
            let d = (q.values[i] - q0.values[i]).abs();
            abs[i] = if d.is_nan() {
                f64::INFINITY
            } else {
                abs[i].max(d)
            };
        }
    }
    let drifts = CONSERVED_NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let scale = if i == 3 {
                q0.casimir_scale
            } else {
                q0.values[i].abs()
            };
            Drift {
                name: name.to_string(),
                initial: q0.values[i],
                absolute: abs[i],
                normalized: abs[i] / (1.0 + scale),
            }
        })
        .collect();
    Ok(DriftReport { drifts })
}

/// Integrates to `t_end`, flips the momenta and integrates back; returns
/// the max over coordinates of `|x - x0| / (1 + |x0|)` after flipping again.
pub fn time_reversal_error(
    spec: &SystemSpec,
    initial: PhasePoint,
    t_end: f64,
    opts: &IntegratorOptions,
) -> Result<f64> {
    let forward = integrate_with(spec, initial, t_end, opts)?;
    if forward.termination != Termination::Completed {
        return Err(Error::Invalid("forward run left the domain".into()));
    }
    let back = integrate_with(spec, forward.last().1.reversed(), t_end, opts)?;
    if back.termination != Termination::Completed {
        return Err(Error::Invalid("backward run left the domain".into()));
    }
    let end = back.last().1.reversed().to_array();
    let start = initial.to_array();
    Ok(crate::report::max_residual((0..DIM).map(|i| {
        (end[i] - start[i]).abs() / (1.0 + start[i].abs())
    })))
}

pub const CSV_HEADER: &str = "t,xi,eta,p_xi,p_eta,H,A,B,K";

/// One row per accepted step; `K` is the Casimir combination.
pub fn to_csv(spec: &SystemSpec, traj: &Trajectory) -> Result<String> {
    let integrals = Integrals::new(spec);
    let polys = ConstantPolys::for_spec(spec);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (t, p) in traj.times.iter().zip(&traj.states) {
        let q = conserved(&integrals, &polys, p)?;
        let row: Vec<String> = [*t, p.xi, p.eta, p.p_xi, p.p_eta]
            .into_iter()
            .chain(q.values)
            .map(|v| format!("{v:.16e}"))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}
