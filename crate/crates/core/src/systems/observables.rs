use crate::error::DomainError;
use crate::jets::{jet_seed, Jet2, Observable, PhasePoint, DIM, ETA, P_ETA, P_XI, XI};

use super::{build_fns, Pair, SystemFns, SystemSpec};

/// Which of the three quadratic integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    H,
    A,
    B,
}

impl Which {
    pub fn label(self) -> &'static str {
        match self {
            Which::H => "H",
            Which::A => "A",
            Which::B => "B",
        }
    }
}

/// `H`, `A` or `B` of one system, evaluated with order-2 jets.
#[derive(Debug, Clone, Copy)]
pub struct SystemObservable {
    fns: SystemFns,
    which: Which,
    min_abs_g: f64,
}

pub const DEFAULT_MIN_ABS_G: f64 = 1e-3;

pub fn hamiltonian(spec: &SystemSpec) -> SystemObservable {
    SystemObservable::new(spec, Which::H)
}

pub fn integral_a(spec: &SystemSpec) -> SystemObservable {
    SystemObservable::new(spec, Which::A)
}

pub fn integral_b(spec: &SystemSpec) -> SystemObservable {
    SystemObservable::new(spec, Which::B)
}

impl SystemObservable {
    pub fn new(spec: &SystemSpec, which: Which) -> Self {
        Self {
            fns: build_fns(spec),
            which,
            min_abs_g: DEFAULT_MIN_ABS_G,
        }
    }

    pub fn with_min_abs_g(mut self, min_abs_g: f64) -> Self {
        self.min_abs_g = min_abs_g;
        self
    }

    pub fn which(&self) -> Which {
        self.which
    }

    pub fn eval_jets(&self, v: &[Jet2; DIM]) -> Result<Jet2, DomainError> {
        let (xi, eta, p_xi, p_eta) = (v[XI], v[ETA], v[P_XI], v[P_ETA]);
        let g = self.fns.combined(Pair::Metric, xi, eta)?;
        if !(g.val.abs() >= self.min_abs_g) {
            return Err(DomainError::new("metric", g.val));
        }
        match self.which {
            Which::H => {
                let w = self.fns.combined(Pair::Potential, xi, eta)?;
                (p_xi * p_eta + w).checked_div(&g)
            }
            Which::A => self.first_integral(xi, eta, p_xi, p_eta, g),
            Which::B => self.second_integral(xi, eta, p_xi, p_eta),
        }
    }

    fn first_integral(
        &self,
        xi: Jet2,
        eta: Jet2,
        p_xi: Jet2,
        p_eta: Jet2,
        g: Jet2,
    ) -> Result<Jet2, DomainError> {
        let fns = &self.fns;
        let inv_g = g.recip()?;
        if fns.class().is_liouville() {
            let (u, v) = (xi + eta, xi - eta);
            let big_f = fns.first(Pair::Metric, u)?;
            let big_g = fns.second(Pair::Metric, v)?;
            let small_f = fns.first(Pair::Potential, u)?;
            let small_g = fns.second(Pair::Potential, v)?;
            Ok(
                p_xi * p_xi + p_eta * p_eta - p_xi * p_eta * (big_f - big_g) * inv_g * 2.0
                    + (small_f * big_g - small_g * big_f) * inv_g * 4.0,
            )
        } else {
            let int_big = antiderivative(fns, Pair::Metric, eta)?;
            let int_small = antiderivative(fns, Pair::Potential, eta)?;
            let w = fns.combined(Pair::Potential, xi, eta)?;
            Ok(
                p_xi * p_xi - p_xi * p_eta * int_big * inv_g * 2.0 - w * int_big * inv_g * 2.0
                    + int_small * 2.0,
            )
        }
    }

    /// Liouville form in the `(X, Y)` coordinates where `B` plays the role
    /// of the first integral; for Class II1 the map is the identity.
    fn second_integral(
        &self,
        xi: Jet2,
        eta: Jet2,
        p_xi: Jet2,
        p_eta: Jet2,
    ) -> Result<Jet2, DomainError> {
        let fns = &self.fns;
        let x = fns.characteristic_coordinate(xi)?;
        let y = fns.characteristic_coordinate(eta)?;
        let p_x = fns.characteristic_sqrt(xi)? * p_xi;
        let p_y = fns.characteristic_sqrt(eta)? * p_eta;
        let (u, v) = (x + y, x - y);
        let big_f = fns.first_tilde(Pair::Metric, u)?;
        let big_g = fns.second_tilde(Pair::Metric, v)?;
        let small_f = fns.first_tilde(Pair::Potential, u)?;
        let small_g = fns.second_tilde(Pair::Potential, v)?;
        let inv = (big_f + big_g).recip()?;
        Ok(
            p_x * p_x + p_y * p_y - p_x * p_y * (big_f - big_g) * inv * 2.0
                + (small_f * big_g - small_g * big_f) * inv * 4.0,
        )
    }
}

fn antiderivative(fns: &SystemFns, pair: Pair, eta: Jet2) -> Result<Jet2, DomainError> {
    fns.first_antiderivative(pair, eta)
        .unwrap_or(Err(DomainError::new("antiderivative", eta.val)))
}

impl Observable for SystemObservable {
    fn label(&self) -> &str {
        self.which.label()
    }

    fn eval(&self, point: &PhasePoint) -> Result<Jet2, DomainError> {
        self.eval_jets(&jet_seed(point))
    }
}
