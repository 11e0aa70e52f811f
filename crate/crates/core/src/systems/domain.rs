//! Sampling domains keeping every primitive away from its poles and branch
//! cuts by a fixed margin.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::jets::PhasePoint;

use super::{build_fns, Class, SystemSpec};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.lo + (self.hi - self.lo) * rng.gen::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleDomain {
    pub xi_range: Interval,
    pub eta_range: Interval,
    pub momentum_range: Interval,
    /// `|xi - eta| >= min_abs_diff`.
    pub min_abs_diff: Option<f64>,
    /// `|xi + eta| >= min_abs_sum`.
    pub min_abs_sum: Option<f64>,
    /// `xi + eta >= min_sum`.
    pub min_sum: Option<f64>,
    pub min_abs_g: f64,
    /// Whether the class's primitives need `xi > 0` and `eta > 0`.
    pub positive_coordinates: bool,
}

/// Candidate budget per requested point; exceeding it means more than 90%
/// of the draws were rejected.
const ATTEMPTS_PER_POINT: usize = 10;

impl SampleDomain {
    pub fn for_class(class: Class) -> Self {
        let i = Interval::new;
        let base = Self {
            xi_range: i(0.2, 2.0),
            eta_range: i(0.2, 2.0),
            momentum_range: i(-2.0, 2.0),
            min_abs_diff: None,
            min_abs_sum: None,
            min_sum: None,
            min_abs_g: super::observables::DEFAULT_MIN_ABS_G,
            positive_coordinates: true,
        };
        match class {
            Class::I1 => Self {
                min_abs_diff: Some(0.15),
                ..base
            },
            Class::I2 => Self {
                xi_range: i(0.3, 2.0),
                eta_range: i(0.3, 2.0),
                min_abs_diff: Some(0.15),
                min_sum: Some(0.4),
                ..base
            },
            Class::I3 => Self {
                xi_range: i(-1.0, 1.0),
                eta_range: i(-1.0, 1.0),
                min_abs_diff: Some(0.2),
                min_abs_sum: Some(0.2),
                positive_coordinates: false,
                ..base
            },
            Class::II1 => Self {
                xi_range: i(0.5, 2.0),
                eta_range: i(0.5, 2.0),
                positive_coordinates: false,
                ..base
            },
            Class::II2 => Self {
                xi_range: i(0.2, 2.0),
                eta_range: i(0.3, 2.0),
                ..base
            },
            Class::II3 => Self {
                xi_range: i(0.3, 2.0),
                eta_range: i(0.3, 2.0),
                ..base
            },
        }
    }

    /// Exclusion margins, positivity and the `|g|` floor, without the
    /// coordinate box. This is the region a trajectory may wander in.
    pub fn admits_configuration(&self, spec: &SystemSpec, xi: f64, eta: f64) -> bool {
        if !(xi.is_finite() && eta.is_finite()) {
            return false;
        }
        if self.positive_coordinates && !(xi > 0.0 && eta > 0.0) {
            return false;
        }
        if self.min_abs_diff.is_some_and(|d| (xi - eta).abs() < d)
            || self.min_abs_sum.is_some_and(|d| (xi + eta).abs() < d)
            || self.min_sum.is_some_and(|d| xi + eta < d)
        {
            return false;
        }
        build_fns(spec)
            .metric_value(xi, eta)
            .is_ok_and(|g| g.abs() >= self.min_abs_g)
    }

    pub fn contains(&self, spec: &SystemSpec, p: &PhasePoint) -> bool {
        self.xi_range.contains(p.xi)
            && self.eta_range.contains(p.eta)
            && self.momentum_range.contains(p.p_xi)
            && self.momentum_range.contains(p.p_eta)
            && self.admits_configuration(spec, p.xi, p.eta)
    }

    /// Draws `n` points by rejection.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        spec: &SystemSpec,
        n: usize,
        rng: &mut R,
    ) -> Result<Vec<PhasePoint>, Error> {
        spec.validate()?;
        let budget = ATTEMPTS_PER_POINT * n.max(1);
        let mut points = Vec::with_capacity(n);
        let mut attempts = 0;
        while points.len() < n {
            if attempts >= budget {
                return Err(Error::Sampling {
                    attempted: attempts,
                    rejected: attempts - points.len(),
                    reason: format!("domain of {} too small for {spec:?}", spec.class),
                });
            }
            attempts += 1;
            let xi = self.xi_range.sample(rng);
            let eta = self.eta_range.sample(rng);
            if !self.admits_configuration(spec, xi, eta) {
                continue;
            }
            let p_xi = self.momentum_range.sample(rng);
            let p_eta = self.momentum_range.sample(rng);
            points.push(PhasePoint::new(xi, eta, p_xi, p_eta));
        }
        Ok(points)
    }

    /// Draws `n` configurations `(xi, eta)`; momenta are set to zero.
    pub fn sample_configurations<R: Rng + ?Sized>(
        &self,
        spec: &SystemSpec,
        n: usize,
        rng: &mut R,
    ) -> Result<Vec<(f64, f64)>, Error> {
        Ok(self
            .sample(spec, n, rng)?
            .into_iter()
            .map(|p| (p.xi, p.eta))
            .collect())
    }
}

/// Draws a spec of `class` with all eight parameters uniform in `[-2, 2]`,
/// redrawing until the class domain admits a small probe sample.
pub fn random_spec<R: Rng + ?Sized>(class: Class, rng: &mut R) -> SystemSpec {
    let range = Interval::new(-2.0, 2.0);
    let domain = SampleDomain::for_class(class);
    loop {
        let metric = std::array::from_fn(|_| range.sample(rng));
        let potential = std::array::from_fn(|_| range.sample(rng));
        let spec = SystemSpec::new(class, metric, potential);
        let mut probe = rand_chacha::ChaCha8Rng::seed_from_u64(rng.gen());
        if domain.sample(&spec, 20, &mut probe).is_ok() {
            return spec;
        }
    }
}
