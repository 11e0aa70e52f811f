//! Structure constants of the quadratic Poisson algebra per subclass.
//!
//! The energy-dependent constants are polynomials in `H` of degree at most
//! three; they are kept as [`EnergyPoly`] so the Casimir can also be expanded
//! as a polynomial in `(H, A, B)`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::poisson::AlgebraConstants;

use super::{Class, SystemSpec};

/// Polynomial in the energy, `c[0] + c[1] E + c[2] E^2 + c[3] E^3`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyPoly(pub [f64; 4]);

impl EnergyPoly {
    pub const ZERO: Self = Self([0.0; 4]);

    pub fn constant(c: f64) -> Self {
        Self([c, 0.0, 0.0, 0.0])
    }

    /// `slope * E - offset`, the shape every printed constant is built from.
    pub fn affine(slope: f64, offset: f64) -> Self {
        Self([-offset, slope, 0.0, 0.0])
    }

    pub fn eval(&self, e: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * e + c)
    }

    pub fn scale(self, s: f64) -> Self {
        Self(self.0.map(|c| c * s))
    }

    pub fn coeffs(&self) -> &[f64; 4] {
        &self.0
    }
}

impl Add for EnergyPoly {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for EnergyPoly {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for EnergyPoly {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

/// Truncated product; every product formed here has degree at most three.
impl Mul for EnergyPoly {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = [0.0; 4];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                if i + j < 4 {
                    out[i + j] += a * b;
                } else {
                    debug_assert!(a * b == 0.0, "energy polynomial degree overflow");
                }
            }
        }
        Self(out)
    }
}

impl Mul<f64> for EnergyPoly {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

/// The structure constants of one system before fixing the energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantPolys {
    pub alpha: f64,
    pub gamma: f64,
    pub a: f64,
    pub delta: EnergyPoly,
    pub epsilon: EnergyPoly,
    pub zeta: EnergyPoly,
    pub d: EnergyPoly,
    pub z: EnergyPoly,
    pub casimir: EnergyPoly,
}

impl ConstantPolys {
    pub fn for_spec(spec: &SystemSpec) -> Self {
        let SystemSpec {
            class,
            kappa,
            lambda,
            mu,
            nu,
            k,
            ell,
            m,
            n,
        } = *spec;
        let p = EnergyPoly::affine;
        let (alpha, gamma, a) = class.characteristic_constants();
        let (ka, la, mu_, nu_) = (p(kappa, k), p(lambda, ell), p(mu, m), p(nu, n));
        let zero = EnergyPoly::ZERO;

        let (delta, epsilon, zeta, d, z, casimir) = match class {
            Class::I1 => (
                ka * 16.0,
                la * 256.0,
                ka * nu_ * -32.0,
                nu_ * 8.0,
                nu_ * nu_ * 8.0 - la * mu_ * 128.0,
                nu_ * nu_ * nu_ * 32.0 + la * mu_ * nu_ * 512.0 - ka * ka * mu_ * 64.0,
            ),
            Class::I2 => {
                let sum = p(kappa + mu, k + m);
                let diff = p(kappa - mu, k - m);
                (
                    zero,
                    la * 256.0,
                    nu_ * nu_ * -32.0 + la * p(mu - kappa, m - k) * 256.0,
                    zero,
                    sum * nu_ * 32.0,
                    la * sum * sum * 256.0 + diff * nu_ * nu_ * 128.0,
                )
            }
            Class::I3 => {
                let l_minus_n = p(lambda - nu, ell - n);
                (
                    zero,
                    zero,
                    la * nu_ * -32.0,
                    p(kappa - mu, k - m) * -64.0,
                    l_minus_n * l_minus_n * 32.0 - ka * mu_ * 32.0,
                    ka * nu_ * nu_ * 64.0 - la * la * mu_ * 64.0,
                )
            }
            Class::II1 => (
                ka * -8.0,
                zero,
                la * la * 8.0,
                ka * -16.0,
                la * la * 8.0 - mu_ * mu_ * 8.0,
                nu_ * nu_ * ka * 16.0 - la * mu_ * nu_ * 32.0,
            ),
            Class::II2 => (
                la * -4.0,
                zero,
                ka * ka * 8.0,
                nu_ * 8.0,
                ka * mu_ * -8.0 - nu_ * nu_ * 2.0,
                la * mu_ * mu_ * 8.0 - ka * mu_ * nu_ * 16.0,
            ),
            Class::II3 => (
                zero,
                zero,
                ka * la * 32.0,
                zero,
                mu_ * nu_ * 32.0,
                la * mu_ * mu_ * 64.0 - ka * nu_ * nu_ * 64.0,
            ),
        };
        Self {
            alpha,
            gamma,
            a,
            delta,
            epsilon,
            zeta,
            d,
            z,
            casimir,
        }
    }

    pub fn at_energy(&self, e: f64) -> AlgebraConstants {
        AlgebraConstants {
            alpha: self.alpha,
            beta: 0.0,
            gamma: self.gamma,
            a: self.a,
            delta: self.delta.eval(e),
            epsilon: self.epsilon.eval(e),
            zeta: self.zeta.eval(e),
            d: self.d.eval(e),
            z: self.z.eval(e),
            k_casimir: self.casimir.eval(e),
        }
    }
}

/// The structure constants of `spec` evaluated on the energy surface `H = e`.
pub fn algebra_constants(spec: &SystemSpec, e: f64) -> AlgebraConstants {
    ConstantPolys::for_spec(spec).at_energy(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i1_delta_example() {
        let spec = SystemSpec::free(Class::I1, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(algebra_constants(&spec, 2.0).delta, 32.0);
    }

    #[test]
    fn ii3_fixed_entries() {
        for (params, e) in [([1.0, 0.5, -0.3, 2.0], 0.7), ([-2.0, 1.0, 0.0, 3.0], -4.0)] {
            let spec = SystemSpec::new(Class::II3, params, [0.4, -0.1, 0.2, 1.0]);
            let c = algebra_constants(&spec, e);
            assert_eq!((c.alpha, c.beta, c.gamma, c.a), (8.0, 0.0, 0.0, 0.0));
            assert_eq!((c.delta, c.epsilon), (0.0, 0.0));
        }
    }

    #[test]
    fn i3_zero_parameters() {
        let spec = SystemSpec::free(Class::I3, [0.0; 4]);
        let c = algebra_constants(&spec, 1.3);
        assert_eq!((c.alpha, c.gamma), (-32.0, 8.0));
        for v in [
            c.beta,
            c.a,
            c.delta,
            c.epsilon,
            c.zeta,
            c.d,
            c.z,
            c.k_casimir,
        ] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn free_i1_casimir_is_cubic_in_energy() {
        let spec = SystemSpec::free(Class::I1, [0.0, 0.0, 0.0, 1.0]);
        for e in [0.5, 1.0, 3.0] {
            assert_eq!(algebra_constants(&spec, e).k_casimir, 32.0 * e * e * e);
        }
    }

    #[test]
    fn energy_poly_arithmetic() {
        let a = EnergyPoly::affine(2.0, 1.0);
        let b = EnergyPoly::affine(-1.0, 3.0);
        let prod = a * b * a;
        for e in [-1.5, 0.0, 0.3, 2.0] {
            let expected = (2.0 * e - 1.0) * (-e - 3.0) * (2.0 * e - 1.0);
            assert!((prod.eval(e) - expected).abs() < 1e-12);
        }
    }
}
