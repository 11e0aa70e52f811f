//! Closed-form building blocks of the six subclasses.
//!
//! Each block is a univariate function of one argument whose shape depends
//! only on the subclass and on four coefficients. The metric pair `(F, G)`
//! uses `(kappa, lambda, mu, nu)`; the potential pair `(f, g)` has the same
//! shape with `(k, ell, m, n)`.

use crate::error::DomainError;
use crate::jets::Jet2;

use super::Class;

/// Four coefficients feeding one pair of functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl Quad {
    pub const fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        Self { c1, c2, c3, c4 }
    }

    pub fn is_zero(&self) -> bool {
        self.c1 == 0.0 && self.c2 == 0.0 && self.c3 == 0.0 && self.c4 == 0.0
    }
}

type R = Result<Jet2, DomainError>;

fn sq(x: Jet2) -> Jet2 {
    x * x
}

/// `(c_a e^{2s} + c_b e^s (1 + e^{2s})) / (e^{2s} - 1)^2`, the Class I3 shape.
fn hyperbolic_block(ca: f64, cb: f64, s: Jet2) -> R {
    let e1 = s.exp();
    let e2 = (s * 2.0).exp();
    let num = e2 * ca + e1 * (e2 + 1.0) * cb;
    num.checked_div(&sq(e2 - 1.0))
}

/// `F` (Class I, argument `xi + eta`) or the coefficient of `xi` (Class II,
/// argument `eta`).
pub fn first(class: Class, q: &Quad, s: Jet2) -> R {
    let Quad { c1, c2, c3: _, c4 } = *q;
    match class {
        Class::I1 => Ok(sq(s) * (4.0 * c2) + s * c1 + c4 / 2.0),
        Class::I2 => Ok(sq(s) * c2 + sq(s).recip()? * c1 + c4 / 2.0),
        Class::I3 => hyperbolic_block(c1, c2, s),
        Class::II1 => Ok(s * c1 + c2),
        Class::II2 => Ok(s.sqrt()?.recip()? * c1 + c2),
        Class::II3 => Ok(s * c2 + s.powi(-3)? * c1),
    }
}

/// `G` (Class I, argument `xi - eta`) or the free term (Class II, argument `eta`).
pub fn second(class: Class, q: &Quad, s: Jet2) -> R {
    let Quad { c1, c2, c3, c4 } = *q;
    match class {
        Class::I1 | Class::I2 => Ok(sq(s) * (-c2) + sq(s).recip()? * c3 + c4 / 2.0),
        Class::I3 => hyperbolic_block(c3, c4, s),
        Class::II1 => Ok(s * c3 + c4),
        Class::II2 => {
            let r = s.sqrt()?;
            Ok(r * (3.0 * c1) + s * c2 + r.recip()? * c3 + c4)
        }
        Class::II3 => Ok(sq(s).recip()? * c3 + c4),
    }
}

/// Antiderivative of [`first`] in `eta` with zero integration constant.
/// Only Class II needs it.
pub fn first_antiderivative(class: Class, q: &Quad, s: Jet2) -> Option<R> {
    let Quad { c1, c2, .. } = *q;
    Some(match class {
        Class::II1 => Ok(sq(s) * (c1 / 2.0) + s * c2),
        Class::II2 => s.sqrt().map(|r| r * (2.0 * c1) + s * c2),
        Class::II3 => sq(s).recip().map(|r| sq(s) * (c2 / 2.0) - r * (c1 / 2.0)),
        Class::I1 | Class::I2 | Class::I3 => return None,
    })
}

/// `F~`, the sum-argument function of the conformal factor in the `(X, Y)`
/// coordinates attached to the second integral.
pub fn first_tilde(class: Class, q: &Quad, u: Jet2) -> R {
    let Quad { c1, c2, c3, c4 } = *q;
    match class {
        Class::I1 => {
            let u2 = sq(u);
            let u4 = sq(u2);
            Ok(u4 * u2 * (c2 / 256.0) + u4 * (c1 / 128.0) + u2 * (c4 / 16.0) - u2.recip()? * c3)
        }
        Class::I2 | Class::II3 => {
            let lead = if class == Class::I2 { 4.0 * c2 } else { c2 };
            Ok((u * 2.0).exp() * lead + u.exp() * c4)
        }
        Class::I3 => {
            let t2 = sq(u.tan()?);
            Ok(t2 * ((c1 + 2.0 * c2) / 4.0)
                + t2.recip()? * ((2.0 * c4 - c3) / 4.0)
                + (c2 + c4) / 2.0)
        }
        Class::II1 => Ok(sq(u) * (c1 / 4.0) + u * ((c2 + c3) / 2.0) + c4 / 2.0),
        Class::II2 => {
            let u2 = sq(u);
            Ok(sq(u2) * (c2 / 128.0) + u2 * u * (c1 / 16.0) + u2 * (c4 / 16.0) + u * (c3 / 4.0))
        }
    }
}

/// `G~`, the difference-argument companion of [`first_tilde`].
pub fn second_tilde(class: Class, q: &Quad, v: Jet2) -> R {
    let Quad { c1, c2, c3, c4 } = *q;
    match class {
        Class::I1 => {
            let v2 = sq(v);
            let v4 = sq(v2);
            Ok(v4 * v2 * (-c2 / 256.0) - v4 * (c1 / 128.0) - v2 * (c4 / 16.0) + v2.recip()? * c3)
        }
        Class::I2 => {
            let e = v.exp();
            Ok((e * c1).checked_div(&sq(e + 1.0))? + (e * c3).checked_div(&sq(e - 1.0))?)
        }
        Class::I3 => {
            let t2 = sq(v.tan()?);
            Ok(t2 * ((2.0 * c2 - c1) / 4.0)
                + t2.recip()? * ((c3 + 2.0 * c4) / 4.0)
                + (c2 + c4) / 2.0)
        }
        Class::II1 => Ok(sq(v) * (-c1 / 4.0) + v * ((c2 - c3) / 2.0) + c4 / 2.0),
        Class::II2 => {
            let v2 = sq(v);
            Ok(sq(v2) * (-c2 / 128.0) + v2 * v * (c1 / 16.0) + v * (c3 / 4.0) - v2 * (c4 / 16.0))
        }
        Class::II3 => Ok((v * 2.0).exp() * c1 + v.exp() * c3),
    }
}

/// Solution `A(xi)` (equivalently `B(eta)`) of the characteristic equation.
pub fn characteristic(class: Class, s: Jet2) -> R {
    match class {
        Class::I1 | Class::II2 => Ok(s),
        Class::I2 | Class::II3 => Ok(sq(s)),
        Class::I3 => Ok(sq(s.exp() + (-s).exp())),
        Class::II1 => Ok(Jet2::constant(1.0)),
    }
}

/// `sqrt(A(s))`: the factor with `p_X = sqrt(A(xi)) p_xi`.
pub fn characteristic_sqrt(class: Class, s: Jet2) -> R {
    match class {
        Class::I1 | Class::II2 => s.sqrt(),
        Class::I2 | Class::II3 => Ok(s),
        Class::I3 => Ok(s.exp() + (-s).exp()),
        Class::II1 => Ok(Jet2::constant(1.0)),
    }
}

/// `X(s) = integral of ds / sqrt(A(s))` with the subclass's printed constant.
pub fn characteristic_coordinate(class: Class, s: Jet2) -> R {
    match class {
        Class::I1 | Class::II2 => Ok(s.sqrt()? * 2.0),
        Class::I2 | Class::II3 => s.ln(),
        Class::I3 => Ok(s.exp().atan()),
        Class::II1 => Ok(s),
    }
}
