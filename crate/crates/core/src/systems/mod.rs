//! The six subclasses of superintegrable systems with two quadratic
//! integrals: parameters, closed-form building blocks, the observables
//! `H`, `A`, `B`, and the structural identities they satisfy.

pub mod constants;
pub mod domain;
pub mod forms;
mod observables;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{DomainError, Error};
use crate::jets::{normalized_diff, Jet2, ETA, XI};

pub use constants::{algebra_constants, ConstantPolys, EnergyPoly};
pub use domain::SampleDomain;
pub use forms::Quad;
pub use observables::{hamiltonian, integral_a, integral_b, SystemObservable, Which};

/// Subclass tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    I1,
    I2,
    I3,
    II1,
    II2,
    II3,
}

impl Class {
    pub const ALL: [Class; 6] = [
        Class::I1,
        Class::I2,
        Class::I3,
        Class::II1,
        Class::II2,
        Class::II3,
    ];

    /// Liouville surfaces (`g = F(xi+eta) + G(xi-eta)`); otherwise a Lie surface.
    pub fn is_liouville(self) -> bool {
        matches!(self, Class::I1 | Class::I2 | Class::I3)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Class::I1 => "I1",
            Class::I2 => "I2",
            Class::I3 => "I3",
            Class::II1 => "II1",
            Class::II2 => "II2",
            Class::II3 => "II3",
        }
    }

    /// `(alpha, gamma, a)` of the characteristic equation
    /// `6 A'^2 = 3 gamma A^2 + 3 alpha A - a`.
    pub fn characteristic_constants(self) -> (f64, f64, f64) {
        match self {
            Class::I1 | Class::II2 => (0.0, 0.0, -6.0),
            Class::I2 | Class::II3 => (8.0, 0.0, 0.0),
            Class::I3 => (-32.0, 8.0, 0.0),
            Class::II1 => (0.0, 0.0, 0.0),
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Class {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Class::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown class tag {s:?}")))
    }
}

/// Selects one superintegrable system: a subclass plus four metric and four
/// potential parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub class: Class,
    pub kappa: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    pub k: f64,
    pub ell: f64,
    pub m: f64,
    pub n: f64,
}

/// Which pair of univariate functions to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pair {
    /// `(F, G)`, building the conformal factor `g`.
    Metric,
    /// `(f, g)`, building the potential numerator `w`.
    Potential,
}

impl SystemSpec {
    pub fn new(class: Class, metric: [f64; 4], potential: [f64; 4]) -> Self {
        Self {
            class,
            kappa: metric[0],
            lambda: metric[1],
            mu: metric[2],
            nu: metric[3],
            k: potential[0],
            ell: potential[1],
            m: potential[2],
            n: potential[3],
        }
    }

    /// Free motion (no potential).
    pub fn free(class: Class, metric: [f64; 4]) -> Self {
        Self::new(class, metric, [0.0; 4])
    }

    pub fn metric(&self) -> [f64; 4] {
        [self.kappa, self.lambda, self.mu, self.nu]
    }

    pub fn potential(&self) -> [f64; 4] {
        [self.k, self.ell, self.m, self.n]
    }

    pub fn quad(&self, pair: Pair) -> Quad {
        let [c1, c2, c3, c4] = match pair {
            Pair::Metric => self.metric(),
            Pair::Potential => self.potential(),
        };
        Quad::new(c1, c2, c3, c4)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self
            .metric()
            .iter()
            .chain(self.potential().iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::Invalid("parameters must be finite".into()));
        }
        if self.quad(Pair::Metric).is_zero() {
            return Err(Error::Invalid(
                "metric parameters are all zero; the conformal factor vanishes identically".into(),
            ));
        }
        Ok(())
    }

    /// Adds `c` to the potential: `(f, g) -> (f + c F, g + c G)`, realised by
    /// shifting the potential parameters along the metric parameters.
    pub fn with_potential_shift(&self, c: f64) -> Self {
        let mut out = *self;
        out.k += c * self.kappa;
        out.ell += c * self.lambda;
        out.m += c * self.mu;
        out.n += c * self.nu;
        out
    }
}

/// Closed-form functions of one system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemFns {
    spec: SystemSpec,
}

pub fn build_fns(spec: &SystemSpec) -> SystemFns {
    SystemFns { spec: *spec }
}

impl SystemFns {
    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn class(&self) -> Class {
        self.spec.class
    }

    /// `F` or `f`.
    pub fn first(&self, pair: Pair, s: Jet2) -> Result<Jet2, DomainError> {
        forms::first(self.class(), &self.spec.quad(pair), s)
    }

    /// `G` or `g`.
    pub fn second(&self, pair: Pair, s: Jet2) -> Result<Jet2, DomainError> {
        forms::second(self.class(), &self.spec.quad(pair), s)
    }

    pub fn first_tilde(&self, pair: Pair, u: Jet2) -> Result<Jet2, DomainError> {
        forms::first_tilde(self.class(), &self.spec.quad(pair), u)
    }

    pub fn second_tilde(&self, pair: Pair, v: Jet2) -> Result<Jet2, DomainError> {
        forms::second_tilde(self.class(), &self.spec.quad(pair), v)
    }

    /// `integral F d eta` (or of `f`); `None` for Class I.
    pub fn first_antiderivative(&self, pair: Pair, s: Jet2) -> Option<Result<Jet2, DomainError>> {
        forms::first_antiderivative(self.class(), &self.spec.quad(pair), s)
    }

    /// `A(xi)`; the same function gives `B(eta)`.
    pub fn characteristic(&self, s: Jet2) -> Result<Jet2, DomainError> {
        forms::characteristic(self.class(), s)
    }

    pub fn characteristic_sqrt(&self, s: Jet2) -> Result<Jet2, DomainError> {
        forms::characteristic_sqrt(self.class(), s)
    }

    /// `X(xi)` (and `Y(eta)`).
    pub fn characteristic_coordinate(&self, s: Jet2) -> Result<Jet2, DomainError> {
        forms::characteristic_coordinate(self.class(), s)
    }

    /// The conformal factor `g(xi, eta)` (metric pair) or the potential
    /// numerator `w(xi, eta)` (potential pair).
    pub fn combined(&self, pair: Pair, xi: Jet2, eta: Jet2) -> Result<Jet2, DomainError> {
        if self.class().is_liouville() {
            Ok(self.first(pair, xi + eta)? + self.second(pair, xi - eta)?)
        } else {
            Ok(self.first(pair, eta)? * xi + self.second(pair, eta)?)
        }
    }

    pub fn metric_value(&self, xi: f64, eta: f64) -> Result<f64, DomainError> {
        self.combined(Pair::Metric, Jet2::constant(xi), Jet2::constant(eta))
            .map(|g| g.val)
    }
}

/// A residual together with the magnitude scale it is normalised against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    /// `|value| / (1 + scale)`.
    pub fn normalized(&self) -> f64 {
        self.value.abs() / (1.0 + self.scale)
    }
}

/// `6 A'(xi)^2 - 3 gamma A^2 - 3 alpha A + a`; identically zero.
pub fn characteristic_residual(spec: &SystemSpec, xi: f64) -> Result<Residual, DomainError> {
    let fns = build_fns(spec);
    let (alpha, gamma, a) = spec.class.characteristic_constants();
    let big_a = fns.characteristic(Jet2::variable(XI, xi))?;
    let deriv = big_a.grad[XI];
    let lhs = 6.0 * deriv * deriv;
    let rhs = 3.0 * gamma * big_a.val * big_a.val + 3.0 * alpha * big_a.val - a;
    Ok(Residual {
        value: lhs - rhs,
        scale: lhs.abs().max(rhs.abs()),
    })
}

/// Left-hand side of the structural equation
/// `(A'' - B'') h + 3 A' h_xi - 3 B' h_eta + 2 A h_xixi - 2 B h_etaeta = 0`
/// with `h` the conformal factor (metric pair) or the potential numerator
/// (potential pair).
pub fn structural_pde_residual(
    spec: &SystemSpec,
    which: Pair,
    xi: f64,
    eta: f64,
) -> Result<Residual, DomainError> {
    let fns = build_fns(spec);
    let x = Jet2::variable(XI, xi);
    let y = Jet2::variable(ETA, eta);
    let h = fns.combined(which, x, y)?;
    let a = fns.characteristic(x)?;
    let b = fns.characteristic(y)?;
    let terms = [
        (a.hess(XI, XI) - b.hess(ETA, ETA)) * h.val,
        3.0 * a.grad[XI] * h.grad[XI],
        -3.0 * b.grad[ETA] * h.grad[ETA],
        2.0 * a.val * h.hess(XI, XI),
        -2.0 * b.val * h.hess(ETA, ETA),
    ];
    Ok(Residual {
        value: terms.iter().sum(),
        scale: terms.iter().fold(0.0_f64, |m, t| m.max(t.abs())),
    })
}

/// `|g - (F(xi+eta) + G(xi-eta))|` (Class I) or `|g - (F(eta) xi + G(eta))|`
/// (Class II), computed through independent calls to the building blocks.
pub fn separability_residual(spec: &SystemSpec, xi: f64, eta: f64) -> Result<f64, DomainError> {
    let fns = build_fns(spec);
    let g = fns.metric_value(xi, eta)?;
    let c = |v: f64| Jet2::constant(v);
    let parts = if spec.class.is_liouville() {
        fns.first(Pair::Metric, c(xi + eta))?.val + fns.second(Pair::Metric, c(xi - eta))?.val
    } else {
        fns.first(Pair::Metric, c(eta))?.val * xi + fns.second(Pair::Metric, c(eta))?.val
    };
    Ok(normalized_diff(g, parts))
}
