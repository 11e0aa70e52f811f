//! Order-2 truncated Taylor arithmetic over the four phase variables
//! `(xi, eta, p_xi, p_eta)`, plus a central finite-difference oracle used to
//! cross-check it.
//!
//! A [`Jet2`] carries a value, its gradient and the upper triangle of its
//! Hessian. Every primitive propagates all three exactly, so one evaluation
//! of an observable yields everything a nested Poisson bracket needs.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::DomainError;

/// Number of phase variables.
pub const DIM: usize = 4;
/// Stored Hessian entries (upper triangle of a 4x4 matrix).
pub const HESS_LEN: usize = DIM * (DIM + 1) / 2;

pub const XI: usize = 0;
pub const ETA: usize = 1;
pub const P_XI: usize = 2;
pub const P_ETA: usize = 3;

/// A point of phase space in Liouville (or Lie) coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub xi: f64,
    pub eta: f64,
    pub p_xi: f64,
    pub p_eta: f64,
}

impl PhasePoint {
    pub const fn new(xi: f64, eta: f64, p_xi: f64, p_eta: f64) -> Self {
        Self {
            xi,
            eta,
            p_xi,
            p_eta,
        }
    }

    pub fn from_array(v: [f64; DIM]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(&self) -> [f64; DIM] {
        [self.xi, self.eta, self.p_xi, self.p_eta]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// Same configuration, momenta reversed.
    pub fn reversed(&self) -> Self {
        Self::new(self.xi, self.eta, -self.p_xi, -self.p_eta)
    }
}

/// Index of `(i, j)` in the packed upper-triangular Hessian.
#[inline]
pub const fn hess_index(i: usize, j: usize) -> usize {
    let (r, c) = if i <= j { (i, j) } else { (j, i) };
    r * DIM - r * (r + 1) / 2 + c
}

/// Value, gradient and Hessian of a scalar with respect to the phase variables.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub val: f64,
    pub grad: [f64; DIM],
    hess: [f64; HESS_LEN],
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet2")
            .field("val", &self.val)
            .field("grad", &self.grad)
            .field("hess", &self.hess_matrix())
            .finish()
    }
}

impl Jet2 {
    pub const fn constant(val: f64) -> Self {
        Self {
            val,
            grad: [0.0; DIM],
            hess: [0.0; HESS_LEN],
        }
    }

    /// The coordinate jet of variable `index` at value `val`.
    pub fn variable(index: usize, val: f64) -> Self {
        let mut grad = [0.0; DIM];
        grad[index] = 1.0;
        Self {
            val,
            grad,
            hess: [0.0; HESS_LEN],
        }
    }

    pub fn from_parts(val: f64, grad: [f64; DIM], hess: [f64; HESS_LEN]) -> Self {
        Self { val, grad, hess }
    }

    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[hess_index(i, j)]
    }

    pub fn hess_packed(&self) -> &[f64; HESS_LEN] {
        &self.hess
    }

    pub fn hess_matrix(&self) -> [[f64; DIM]; DIM] {
        let mut m = [[0.0; DIM]; DIM];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.hess(i, j);
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.val.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().all(|h| h.is_finite())
    }

    /// Drops the second-order part.
    pub fn first_order(&self) -> Jet1 {
        Jet1 {
            val: self.val,
            grad: self.grad,
        }
    }

    /// Applies a univariate function given its value and first two
    /// derivatives at `self.val`.
    #[inline]
    pub fn lift(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Self::constant(f0);
        for i in 0..DIM {
            out.grad[i] = f1 * self.grad[i];
        }
        for i in 0..DIM {
            for j in i..DIM {
                let k = hess_index(i, j);
                out.hess[k] = f1 * self.hess[k] + f2 * self.grad[i] * self.grad[j];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.val *= s;
        out.grad.iter_mut().for_each(|g| *g *= s);
        out.hess.iter_mut().for_each(|h| *h *= s);
        out
    }

    pub fn recip(&self) -> Result<Self, DomainError> {
        let x = self.val;
        if x == 0.0 || !x.is_finite() {
            return Err(DomainError::new("inv", x));
        }
        let r = 1.0 / x;
        Ok(self.lift(r, -r * r, 2.0 * r * r * r))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, DomainError> {
        if rhs.val == 0.0 || !rhs.val.is_finite() {
            return Err(DomainError::new("div", rhs.val));
        }
        Ok(*self * rhs.recip()?)
    }

    pub fn sqrt(&self) -> Result<Self, DomainError> {
        let x = self.val;
        if !(x > 0.0) || !x.is_finite() {
            return Err(DomainError::new("sqrt", x));
        }
        let s = x.sqrt();
        Ok(self.lift(s, 0.5 / s, -0.25 / (s * x)))
    }

    pub fn exp(&self) -> Self {
        let e = self.val.exp();
        self.lift(e, e, e)
    }

    pub fn ln(&self) -> Result<Self, DomainError> {
        let x = self.val;
        if !(x > 0.0) || !x.is_finite() {
            return Err(DomainError::new("ln", x));
        }
        Ok(self.lift(x.ln(), 1.0 / x, -1.0 / (x * x)))
    }

    pub fn powi(&self, n: i32) -> Result<Self, DomainError> {
        let x = self.val;
        match n {
            0 => Ok(Self::constant(1.0)),
            1 => Ok(*self),
            2 => Ok(*self * *self),
            _ => {
                if n < 0 && x == 0.0 {
                    return Err(DomainError::new("pow_int", x));
                }
                let nf = f64::from(n);
                Ok(self.lift(
                    x.powi(n),
                    nf * x.powi(n - 1),
                    nf * (nf - 1.0) * x.powi(n - 2),
                ))
            }
        }
    }

    pub fn powf(&self, r: f64) -> Result<Self, DomainError> {
        let x = self.val;
        if !(x > 0.0) || !x.is_finite() {
            return Err(DomainError::new("pow_real", x));
        }
        Ok(self.lift(
            x.powf(r),
            r * x.powf(r - 1.0),
            r * (r - 1.0) * x.powf(r - 2.0),
        ))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.lift(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.lift(c, -s, -c)
    }

    pub fn tan(&self) -> Result<Self, DomainError> {
        let x = self.val;
        let c = x.cos();
        if c == 0.0 || !x.is_finite() {
            return Err(DomainError::new("tan", x));
        }
        let t = x.tan();
        let sec2 = 1.0 + t * t;
        Ok(self.lift(t, sec2, 2.0 * t * sec2))
    }

    pub fn atan(&self) -> Self {
        let x = self.val;
        let d = 1.0 / (1.0 + x * x);
        self.lift(x.atan(), d, -2.0 * x * d * d)
    }

    pub fn sinh(&self) -> Self {
        let (e, ei) = (self.val.exp(), (-self.val).exp());
        let (s, c) = (0.5 * (e - ei), 0.5 * (e + ei));
        self.lift(s, c, s)
    }

    pub fn cosh(&self) -> Self {
        let (e, ei) = (self.val.exp(), (-self.val).exp());
        let (s, c) = (0.5 * (e - ei), 0.5 * (e + ei));
        self.lift(c, s, c)
    }
}

impl From<f64> for Jet2 {
    fn from(v: f64) -> Self {
        Self::constant(v)
    }
}

impl Add for Jet2 {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self.val += rhs.val;
        for i in 0..DIM {
            self.grad[i] += rhs.grad[i];
        }
        for k in 0..HESS_LEN {
            self.hess[k] += rhs.hess[k];
        }
        self
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for Jet2 {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::constant(self.val * rhs.val);
        for i in 0..DIM {
            out.grad[i] = self.val * rhs.grad[i] + rhs.val * self.grad[i];
        }
        for i in 0..DIM {
            for j in i..DIM {
                let k = hess_index(i, j);
                out.hess[k] = self.val * rhs.hess[k]
                    + rhs.val * self.hess[k]
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i];
            }
        }
        out
    }
}

impl Add<f64> for Jet2 {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.val += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.val -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        rhs + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        -rhs + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs.scale(self)
    }
}

/// Value and gradient only; the result type of a Poisson bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    pub val: f64,
    pub grad: [f64; DIM],
}

impl Jet1 {
    pub fn constant(val: f64) -> Self {
        Self {
            val,
            grad: [0.0; DIM],
        }
    }
}

impl From<Jet2> for Jet1 {
    fn from(j: Jet2) -> Self {
        j.first_order()
    }
}

/// The four coordinate jets at `point`, in the order `(xi, eta, p_xi, p_eta)`.
pub fn jet_seed(point: &PhasePoint) -> [Jet2; DIM] {
    let v = point.to_array();
    [
        Jet2::variable(XI, v[XI]),
        Jet2::variable(ETA, v[ETA]),
        Jet2::variable(P_XI, v[P_XI]),
        Jet2::variable(P_ETA, v[P_ETA]),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnaryFn {
    Neg,
    Inv,
    Sqrt,
    Exp,
    Ln,
    PowInt(i32),
    PowReal(f64),
    Sin,
    Cos,
    Tan,
    Atan,
    Sinh,
    Cosh,
}

pub fn jet_arith(a: &Jet2, b: &Jet2, op: BinaryOp) -> Result<Jet2, DomainError> {
    Ok(match op {
        BinaryOp::Add => *a + *b,
        BinaryOp::Sub => *a - *b,
        BinaryOp::Mul => *a * *b,
        BinaryOp::Div => a.checked_div(b)?,
    })
}

pub fn jet_fn(a: &Jet2, f: UnaryFn) -> Result<Jet2, DomainError> {
    match f {
        UnaryFn::Neg => Ok(-*a),
        UnaryFn::Inv => a.recip(),
        UnaryFn::Sqrt => a.sqrt(),
        UnaryFn::Exp => Ok(a.exp()),
        UnaryFn::Ln => a.ln(),
        UnaryFn::PowInt(n) => a.powi(n),
        UnaryFn::PowReal(r) => a.powf(r),
        UnaryFn::Sin => Ok(a.sin()),
        UnaryFn::Cos => Ok(a.cos()),
        UnaryFn::Tan => a.tan(),
        UnaryFn::Atan => Ok(a.atan()),
        UnaryFn::Sinh => Ok(a.sinh()),
        UnaryFn::Cosh => Ok(a.cosh()),
    }
}

/// A pure phase-space function that can be evaluated with order-2 jets.
pub trait Observable: Send + Sync {
    fn label(&self) -> &str;

    fn eval(&self, point: &PhasePoint) -> Result<Jet2, DomainError>;

    fn value(&self, point: &PhasePoint) -> Result<f64, DomainError> {
        self.eval(point).map(|j| j.val)
    }
}

/// An [`Observable`] built from a closure over the seeded coordinate jets.
pub struct FnObservable<F> {
    label: String,
    f: F,
}

impl<F> FnObservable<F>
where
    F: Fn(&[Jet2; DIM]) -> Result<Jet2, DomainError> + Send + Sync,
{
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self {
            label: label.into(),
            f,
        }
    }
}

impl<F> Observable for FnObservable<F>
where
    F: Fn(&[Jet2; DIM]) -> Result<Jet2, DomainError> + Send + Sync,
{
    fn label(&self) -> &str {
        &self.label
    }

    fn eval(&self, point: &PhasePoint) -> Result<Jet2, DomainError> {
        (self.f)(&jet_seed(point))
    }
}

/// Coordinate observable, e.g. `coordinate(P_XI)` is the momentum `p_xi`.
pub fn coordinate(index: usize) -> impl Observable {
    const LABELS: [&str; DIM] = ["xi", "eta", "p_xi", "p_eta"];
    FnObservable::new(LABELS[index], move |v: &[Jet2; DIM]| Ok(v[index]))
}

/// Step sizes for the finite-difference oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSteps {
    pub grad: f64,
    pub hess: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        Self {
            grad: 1e-5,
            hess: 1e-4,
        }
    }
}

impl FdSteps {
    pub fn uniform(h: f64) -> Self {
        Self { grad: h, hess: h }
    }
}

/// Central finite-difference gradient and packed Hessian of `obs` at `point`,
/// using only its values.
pub fn fd_derivatives(
    obs: &dyn Observable,
    point: &PhasePoint,
    steps: FdSteps,
) -> Result<([f64; DIM], [f64; HESS_LEN]), DomainError> {
    let base = point.to_array();
    let at = |offsets: &[(usize, f64)]| -> Result<f64, DomainError> {
        let mut v = base;
        for &(i, d) in offsets {
            v[i] += d;
        }
        obs.value(&PhasePoint::from_array(v))
    };

    let h = steps.grad;
    let mut grad = [0.0; DIM];
    for (i, g) in grad.iter_mut().enumerate() {
        *g = (at(&[(i, h)])? - at(&[(i, -h)])?) / (2.0 * h);
    }

    let h = steps.hess;
    let f0 = at(&[])?;
    let mut hess = [0.0; HESS_LEN];
    for i in 0..DIM {
        for j in i..DIM {
            hess[hess_index(i, j)] = if i == j {
                (at(&[(i, h)])? - 2.0 * f0 + at(&[(i, -h)])?) / (h * h)
            } else {
                (at(&[(i, h), (j, h)])? - at(&[(i, h), (j, -h)])? - at(&[(i, -h), (j, h)])?
                    + at(&[(i, -h), (j, -h)])?)
                    / (4.0 * h * h)
            };
        }
    }
    Ok((grad, hess))
}

/// `|a - b| / (1 + max(|a|, |b|))`.
#[inline]
pub fn normalized_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}
