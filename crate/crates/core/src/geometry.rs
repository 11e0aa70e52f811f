//! Curvature of `ds^2 = g dxi deta`, surfaces of revolution and linear
//! integrals.
//!
//! Revolution and linear-integral tests can be run in a [`Frame`]: new
//! coordinates `X(xi)`, `Y(eta)` with `dxi/dX = s(xi)`, in which the metric
//! reads `g s(xi) s(eta) dX dY` and the momenta are `p_X = s(xi) p_xi`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DomainError, Error, Result};
use crate::jets::{FnObservable, Jet2, Observable, PhasePoint, DIM, ETA, P_ETA, P_XI, XI};
use crate::poisson::{bracket_first, bracket_magnitude, identity_residual, sample_points};
use crate::systems::{build_fns, hamiltonian, Pair, SampleDomain, SystemFns, SystemSpec};

pub const TOL_ZERO: f64 = 1e-8;
pub const TOL_CONST: f64 = 1e-8;
pub const TOL_REVOLUTION: f64 = 1e-9;
pub const TOL_LINEAR: f64 = 1e-9;

fn metric_jet(fns: &SystemFns, xi: f64, eta: f64) -> Result<Jet2, DomainError> {
    fns.combined(
        Pair::Metric,
        Jet2::variable(XI, xi),
        Jet2::variable(ETA, eta),
    )
}

/// `K = -(g g_xieta - g_xi g_eta) / (2 g^3)`; requires only `g != 0`.
pub fn curvature(spec: &SystemSpec, xi: f64, eta: f64) -> Result<f64, DomainError> {
    curvature_with(&build_fns(spec), xi, eta)
}

fn curvature_with(fns: &SystemFns, xi: f64, eta: f64) -> Result<f64, DomainError> {
    let g = metric_jet(fns, xi, eta)?;
    if g.val == 0.0 || !g.val.is_finite() {
        return Err(DomainError::new("metric", g.val));
    }
    Ok(-(g.val * g.hess(XI, ETA) - g.grad[XI] * g.grad[ETA]) / (2.0 * g.val.powi(3)))
}

/// `K = -(1/2g) d^2 ln g / dxi deta`, defined where `g > 0`.
pub fn curvature_log_form(spec: &SystemSpec, xi: f64, eta: f64) -> Result<f64, DomainError> {
    let g = metric_jet(&build_fns(spec), xi, eta)?;
    let ln_g = g.ln()?;
    Ok(-ln_g.hess(XI, ETA) / (2.0 * g.val))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CurvatureTag {
    Zero,
    Constant(f64),
    NonConstant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureClass {
    pub tag: CurvatureTag,
    pub max_abs: f64,
    pub mean: f64,
    pub stddev: f64,
}

impl CurvatureClass {
    pub fn from_samples(samples: &[f64], tol_zero: f64, tol_const: f64) -> Self {
        let n = samples.len().max(1) as f64;
        let max_abs = samples.iter().fold(0.0_f64, |m, k| m.max(k.abs()));
        let mean = samples.iter().sum::<f64>() / n;
        let stddev = (samples.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / n).sqrt();
        let tag = if max_abs <= tol_zero {
            CurvatureTag::Zero
        } else if stddev <= tol_const {
            CurvatureTag::Constant(mean)
        } else {
            CurvatureTag::NonConstant
        };
        Self {
            tag,
            max_abs,
            mean,
            stddev,
        }
    }
}

/// Curvature at `n_points` configurations of the class domain.
pub fn curvature_samples(spec: &SystemSpec, n_points: usize, seed: u64) -> Result<Vec<f64>> {
    let fns = build_fns(spec);
    sample_points(spec, n_points, seed)?
        .par_iter()
        .map(|p| curvature_with(&fns, p.xi, p.eta).map_err(Error::from))
        .collect()
}

pub fn classify_curvature(spec: &SystemSpec, n_points: usize, seed: u64) -> Result<CurvatureClass> {
    let k = curvature_samples(spec, n_points, seed)?;
    Ok(CurvatureClass::from_samples(&k, TOL_ZERO, TOL_CONST))
}

/// Coordinates in which revolution and linear integrals are tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// `(xi, eta)` themselves.
    Liouville,
    /// The class map `X = int dxi / sqrt(A(xi))`, `s = sqrt(A)`.
    ClassMap,
    /// `X = ln xi`, `s = xi`; needs positive coordinates.
    Logarithmic,
}

impl Frame {
    pub const ALL: [Frame; 3] = [Frame::Liouville, Frame::ClassMap, Frame::Logarithmic];

    pub fn as_str(self) -> &'static str {
        match self {
            Frame::Liouville => "liouville",
            Frame::ClassMap => "class-map",
            Frame::Logarithmic => "logarithmic",
        }
    }

    /// Whether the frame is defined on the whole sampling domain of `spec`.
    pub fn applies_to(self, spec: &SystemSpec) -> bool {
        let d = SampleDomain::for_class(spec.class);
        match self {
            Frame::Logarithmic => d.xi_range.lo > 0.0 && d.eta_range.lo > 0.0,
            _ => true,
        }
    }

    fn scale(self, fns: &SystemFns, s: Jet2) -> Result<Jet2, DomainError> {
        match self {
            Frame::Liouville => Ok(Jet2::constant(1.0)),
            Frame::ClassMap => fns.characteristic_sqrt(s),
            Frame::Logarithmic => {
                if s.val > 0.0 {
                    Ok(s)
                } else {
                    Err(DomainError::new("ln", s.val))
                }
            }
        }
    }
}

impl std::str::FromStr for Frame {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Frame::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown frame {s:?}")))
    }
}

/// Direction along which the frame metric is invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Revolution {
    /// Metric depends on `X + Y` only.
    SumOnly,
    /// Metric depends on `X - Y` only.
    DiffOnly,
    /// Metric depends on `X` only.
    XOnly,
    /// Metric depends on `Y` only.
    YOnly,
    /// More than one of the above (e.g. a constant metric).
    Several,
    Neither,
}

impl Revolution {
    pub fn is_revolution(self) -> bool {
        self != Revolution::Neither
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Revolution::SumOnly => "sum-only",
            Revolution::DiffOnly => "diff-only",
            Revolution::XOnly => "x-only",
            Revolution::YOnly => "y-only",
            Revolution::Several => "several",
            Revolution::Neither => "neither",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevolutionEvidence {
    pub frame: Frame,
    pub outcome: Revolution,
    /// Max normalized `|(d_X - d_Y) g~|`; zero for a function of `X + Y`.
    pub sum_residual: f64,
    /// Max normalized `|(d_X + d_Y) g~|`; zero for a function of `X - Y`.
    pub diff_residual: f64,
    /// Max normalized `|d_Y g~|`; zero for a function of `X`.
    pub x_residual: f64,
    /// Max normalized `|d_X g~|`; zero for a function of `Y`.
    pub y_residual: f64,
}

impl RevolutionEvidence {
    pub fn best_residual(&self) -> f64 {
        self.sum_residual
            .min(self.diff_residual)
            .min(self.x_residual)
            .min(self.y_residual)
    }
}

/// Directional derivatives `(d_X g~, d_Y g~)` of the metric in `frame`.
fn frame_metric_derivatives(
    fns: &SystemFns,
    frame: Frame,
    xi: f64,
    eta: f64,
) -> Result<(f64, f64), DomainError> {
    let x = Jet2::variable(XI, xi);
    let y = Jet2::variable(ETA, eta);
    let (sx, sy) = (frame.scale(fns, x)?, frame.scale(fns, y)?);
    let g = fns.combined(Pair::Metric, x, y)? * sx * sy;
    Ok((sx.val * g.grad[XI], sy.val * g.grad[ETA]))
}

pub fn revolution_check(spec: &SystemSpec, n_points: usize, seed: u64) -> Result<Revolution> {
    revolution_check_in(spec, Frame::Liouville, n_points, seed).map(|e| e.outcome)
}

pub fn revolution_check_in(
    spec: &SystemSpec,
    frame: Frame,
    n_points: usize,
    seed: u64,
) -> Result<RevolutionEvidence> {
    if !frame.applies_to(spec) {
        return Err(Error::Invalid(format!(
            "{} frame is not defined on the {} domain",
            frame.as_str(),
            spec.class
        )));
    }
    let fns = build_fns(spec);
    let derivs: Vec<(f64, f64)> = sample_points(spec, n_points, seed)?
        .par_iter()
        .map(|p| frame_metric_derivatives(&fns, frame, p.xi, p.eta).map_err(Error::from))
        .collect::<Result<_>>()?;
    let mut r = [0.0_f64; 4];
    for (dx, dy) in derivs {
        let scale = dx.abs() + dy.abs();
        r[0] = r[0].max(identity_residual(dx, dy, scale));
        r[1] = r[1].max(identity_residual(dx, -dy, scale));
        r[2] = r[2].max(identity_residual(dy, 0.0, scale));
        r[3] = r[3].max(identity_residual(dx, 0.0, scale));
    }
    let kinds = [
        Revolution::SumOnly,
        Revolution::DiffOnly,
        Revolution::XOnly,
        Revolution::YOnly,
    ];
    let mut hits = kinds.iter().zip(r).filter(|(_, v)| *v <= TOL_REVOLUTION);
    let outcome = match (hits.next(), hits.next()) {
        (None, _) => Revolution::Neither,
        (Some((k, _)), None) => *k,
        _ => Revolution::Several,
    };
    Ok(RevolutionEvidence {
        frame,
        outcome,
        sum_residual: r[0],
        diff_residual: r[1],
        x_residual: r[2],
        y_residual: r[3],
    })
}

/// Generator of a candidate linear integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `p_X + p_Y`.
    Plus,
    /// `p_X - p_Y`.
    Minus,
    /// `p_X`.
    X,
    /// `p_Y`.
    Y,
}

impl Direction {
    pub const SIGNS: [Direction; 2] = [Direction::Plus, Direction::Minus];
    pub const ALL: [Direction; 4] = [
        Direction::Plus,
        Direction::Minus,
        Direction::X,
        Direction::Y,
    ];

    /// Weights of `(p_X, p_Y)`.
    pub fn weights(self) -> (f64, f64) {
        match self {
            Direction::Plus => (1.0, 1.0),
            Direction::Minus => (1.0, -1.0),
            Direction::X => (1.0, 0.0),
            Direction::Y => (0.0, 1.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Plus => "plus",
            Direction::Minus => "minus",
            Direction::X => "x",
            Direction::Y => "y",
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plus" | "+" => Ok(Direction::Plus),
            "minus" | "-" => Ok(Direction::Minus),
            "x" => Ok(Direction::X),
            "y" => Ok(Direction::Y),
            _ => Err(Error::Invalid(format!("unknown direction {s:?}"))),
        }
    }
}

/// `L = a p_X + b p_Y = a s(xi) p_xi + b s(eta) p_eta` in `frame`.
pub fn linear_observable(spec: &SystemSpec, frame: Frame, dir: Direction) -> impl Observable {
    let fns = build_fns(spec);
    let (a, b) = dir.weights();
    FnObservable::new("L", move |v: &[Jet2; DIM]| {
        let sx = frame.scale(&fns, v[XI])?;
        let sy = frame.scale(&fns, v[ETA])?;
        Ok(sx * v[P_XI] * a + sy * v[P_ETA] * b)
    })
}

/// Max normalized `|{H, L}|` for the Liouville-frame generator `dir`.
pub fn linear_integral_check(
    spec: &SystemSpec,
    dir: Direction,
    n_points: usize,
    seed: u64,
) -> Result<f64> {
    linear_integral_check_in(spec, Frame::Liouville, dir, n_points, seed)
}

pub fn linear_integral_check_in(
    spec: &SystemSpec,
    frame: Frame,
    dir: Direction,
    n_points: usize,
    seed: u64,
) -> Result<f64> {
    if !frame.applies_to(spec) {
        return Err(Error::Invalid(format!(
            "{} frame is not defined on the {} domain",
            frame.as_str(),
            spec.class
        )));
    }
    let h = hamiltonian(spec);
    let l = linear_observable(spec, frame, dir);
    let residuals: Vec<f64> = sample_points(spec, n_points, seed)?
        .par_iter()
        .map(|p: &PhasePoint| {
            let hj = h.eval(p)?.first_order();
            let lj = l.eval(p)?.first_order();
            Ok(identity_residual(
                bracket_first(&hj, &lj),
                0.0,
                bracket_magnitude(&hj, &lj),
            ))
        })
        .collect::<Result<_, DomainError>>()?;
    Ok(crate::report::max_residual(residuals))
}
