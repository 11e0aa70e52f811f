//! Poisson brackets on jets, the integral `C = {A, B}`, and verifiers for
//! the quadratic algebra, its Casimir and polynomial membership.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DomainError, Error, Result};
use crate::jets::{Jet1, Jet2, Observable, PhasePoint, DIM, ETA, P_ETA, P_XI, XI};
use crate::linalg::{relative_rms, scaled_ridge_lstsq};
use crate::report::{max_residual, Correction, IdentityResult, Tolerances, VerificationReport};
use crate::systems::{
    hamiltonian, integral_a, integral_b, ConstantPolys, EnergyPoly, SampleDomain, SystemObservable,
    SystemSpec,
};

/// Structure constants of the quadratic algebra on one energy surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraConstants {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub a: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub zeta: f64,
    pub d: f64,
    pub z: f64,
    pub k_casimir: f64,
}

impl AlgebraConstants {
    /// Terms of `alpha A^2 + 2 gamma A B + delta A + epsilon B + zeta`.
    pub fn rhs_ac_terms(&self, a: f64, b: f64) -> [f64; 5] {
        [
            self.alpha * a * a,
            2.0 * self.gamma * a * b,
            self.delta * a,
            self.epsilon * b,
            self.zeta,
        ]
    }

    /// Terms of `a A^2 - gamma B^2 - 2 alpha A B + d A - delta B + z`.
    pub fn rhs_bc_terms(&self, a: f64, b: f64) -> [f64; 6] {
        [
            self.a * a * a,
            -self.gamma * b * b,
            -2.0 * self.alpha * a * b,
            self.d * a,
            -self.delta * b,
            self.z,
        ]
    }

    pub fn rhs_ac(&self, a: f64, b: f64) -> f64 {
        self.rhs_ac_terms(a, b).iter().sum()
    }

    pub fn rhs_bc(&self, a: f64, b: f64) -> f64 {
        self.rhs_bc_terms(a, b).iter().sum()
    }

    /// Terms of
    /// `C^2 - 2 alpha A^2 B - 2 gamma A B^2 - 2 delta A B - epsilon B^2
    ///  - 2 zeta B + (2/3) a A^3 + d A^2 + 2 z A`.
    pub fn casimir_terms(&self, a: f64, b: f64, c: f64) -> [f64; 9] {
        [
            c * c,
            -2.0 * self.alpha * a * a * b,
            -2.0 * self.gamma * a * b * b,
            -2.0 * self.delta * a * b,
            -self.epsilon * b * b,
            -2.0 * self.zeta * b,
            2.0 / 3.0 * self.a * a * a * a,
            self.d * a * a,
            2.0 * self.z * a,
        ]
    }

    pub fn casimir_combination(&self, a: f64, b: f64, c: f64) -> f64 {
        self.casimir_terms(a, b, c).iter().sum()
    }
}

/// `{F, G}` of two order-1 quantities (value only).
pub fn bracket_first(f: &Jet1, g: &Jet1) -> f64 {
    f.grad[XI] * g.grad[P_XI] - f.grad[P_XI] * g.grad[XI] + f.grad[ETA] * g.grad[P_ETA]
        - f.grad[P_ETA] * g.grad[ETA]
}

/// `{F, G}` with its gradient, assembled from both Hessians.
pub fn bracket_jets(f: &Jet2, g: &Jet2) -> Jet1 {
    let pairs = [(XI, P_XI), (ETA, P_ETA)];
    let mut grad = [0.0; DIM];
    for (k, slot) in grad.iter_mut().enumerate() {
        *slot = pairs
            .iter()
            .map(|&(q, p)| {
                f.hess(q, k) * g.grad[p] + f.grad[q] * g.hess(p, k)
                    - f.hess(p, k) * g.grad[q]
                    - f.grad[p] * g.hess(q, k)
            })
            .sum();
    }
    Jet1 {
        val: bracket_first(&f.first_order(), &g.first_order()),
        grad,
    }
}

/// `sum |F_q G_p| + |F_p G_q|`, the absolute-value evaluation of
/// [`bracket_first`]; it bounds the rounding error of the bracket.
pub fn bracket_magnitude(f: &Jet1, g: &Jet1) -> f64 {
    (f.grad[XI] * g.grad[P_XI]).abs()
        + (f.grad[P_XI] * g.grad[XI]).abs()
        + (f.grad[ETA] * g.grad[P_ETA]).abs()
        + (f.grad[P_ETA] * g.grad[ETA]).abs()
}

/// Absolute-value evaluation of [`bracket_jets`], value and gradient.
pub fn bracket_jets_magnitude(f: &Jet2, g: &Jet2) -> Jet1 {
    let pairs = [(XI, P_XI), (ETA, P_ETA)];
    let mut grad = [0.0; DIM];
    for (k, slot) in grad.iter_mut().enumerate() {
        *slot = pairs
            .iter()
            .map(|&(q, p)| {
                (f.hess(q, k) * g.grad[p]).abs()
                    + (f.grad[q] * g.hess(p, k)).abs()
                    + (f.hess(p, k) * g.grad[q]).abs()
                    + (f.grad[p] * g.hess(q, k)).abs()
            })
            .sum();
    }
    Jet1 {
        val: bracket_magnitude(&f.first_order(), &g.first_order()),
        grad,
    }
}

fn abs_jet(j: &Jet1) -> Jet1 {
    Jet1 {
        val: j.val.abs(),
        grad: j.grad.map(f64::abs),
    }
}

pub fn bracket(
    f: &dyn Observable,
    g: &dyn Observable,
    point: &PhasePoint,
) -> Result<Jet1, DomainError> {
    Ok(bracket_jets(&f.eval(point)?, &g.eval(point)?))
}

/// `C = {A, B}` of one system, with first derivatives.
#[derive(Debug, Clone, Copy)]
pub struct CObservable {
    a: SystemObservable,
    b: SystemObservable,
}

pub fn c_observable(spec: &SystemSpec) -> CObservable {
    CObservable {
        a: integral_a(spec),
        b: integral_b(spec),
    }
}

impl CObservable {
    pub fn label(&self) -> &str {
        "C"
    }

    pub fn eval(&self, point: &PhasePoint) -> Result<Jet1, DomainError> {
        Ok(bracket_jets(&self.a.eval(point)?, &self.b.eval(point)?))
    }

    pub fn value(&self, point: &PhasePoint) -> Result<f64, DomainError> {
        self.eval(point).map(|c| c.val)
    }
}

/// `H`, `A`, `B` (order 2) and `C` (order 1) at one point.
#[derive(Debug, Clone, Copy)]
pub struct PointIntegrals {
    pub h: Jet2,
    pub a: Jet2,
    pub b: Jet2,
    pub c: Jet1,
    /// Absolute-value evaluation of `c`, the rounding scale of `C`.
    pub c_magnitude: Jet1,
}

impl PointIntegrals {
    /// `{H,A}`, `{H,B}`, `{H,C}`, `{A,C}`, `{B,C}` with the magnitude each
    /// bracket is normalised against.
    pub fn brackets(&self) -> [(f64, f64); 5] {
        let (h, a, b) = (
            self.h.first_order(),
            self.a.first_order(),
            self.b.first_order(),
        );
        let nested = |x: &Jet1| {
            (
                bracket_first(x, &self.c),
                bracket_magnitude(&abs_jet(x), &self.c_magnitude),
            )
        };
        [
            (bracket_first(&h, &a), bracket_magnitude(&h, &a)),
            (bracket_first(&h, &b), bracket_magnitude(&h, &b)),
            nested(&h),
            nested(&a),
            nested(&b),
        ]
    }
}

/// The observables of one system, built once and evaluated at many points.
#[derive(Debug, Clone, Copy)]
pub struct Integrals {
    pub h: SystemObservable,
    pub a: SystemObservable,
    pub b: SystemObservable,
}

impl Integrals {
    pub fn new(spec: &SystemSpec) -> Self {
        Self {
            h: hamiltonian(spec),
            a: integral_a(spec),
            b: integral_b(spec),
        }
    }

    pub fn at(&self, point: &PhasePoint) -> Result<PointIntegrals, DomainError> {
        let h = self.h.eval(point)?;
        let a = self.a.eval(point)?;
        let b = self.b.eval(point)?;
        Ok(PointIntegrals {
            h,
            a,
            b,
            c: bracket_jets(&a, &b),
            c_magnitude: bracket_jets_magnitude(&a, &b),
        })
    }

    /// Values of `(H, A, B, C)`.
    pub fn values(&self, point: &PhasePoint) -> Result<[f64; 4], DomainError> {
        let p = self.at(point)?;
        Ok([p.h.val, p.a.val, p.b.val, p.c.val])
    }
}

/// `|lhs - rhs| / (1 + max(|lhs|, |rhs|))`.
pub fn normalized_residual(lhs: f64, rhs: f64) -> f64 {
    identity_residual(lhs, rhs, 0.0)
}

/// `|lhs - rhs| / (1 + max(|lhs|, |rhs|, scale))`, where `scale` is the
/// absolute-value evaluation of the two sides. Near the zero set of `g` the
/// individual terms of a bracket grow like powers of `1/g` while their sum
/// stays moderate; `scale` keeps rounding in those terms from reading as a
/// violated identity.
pub fn identity_residual(lhs: f64, rhs: f64, scale: f64) -> f64 {
    (lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs()).max(scale))
}

fn abs_sum(terms: &[f64]) -> f64 {
    terms.iter().map(|t| t.abs()).sum()
}

pub const ALGEBRA_IDENTITIES: [&str; 5] = ["HA", "HB", "HC", "AC-row", "BC-row"];

/// Draws `n` points from the class domain with a fresh generator.
pub fn sample_points(spec: &SystemSpec, n: usize, seed: u64) -> Result<Vec<PhasePoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SampleDomain::for_class(spec.class).sample(spec, n, &mut rng)
}

/// Per-point evaluation fanned out over rayon, collected in point order.
fn per_point<T, F>(points: &[PhasePoint], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&PhasePoint) -> Result<T, DomainError> + Sync,
{
    points
        .par_iter()
        .map(|p| f(p).map_err(Error::from))
        .collect()
}

struct AlgebraSample {
    energy: f64,
    a: f64,
    b: f64,
    residuals: [f64; 5],
    ac: f64,
    bc: f64,
}

/// Checks `{H,A} = {H,B} = {H,C} = 0` and both rows of the quadratic
/// algebra with the printed constants at `E = H(point)`.
pub fn verify_algebra(
    spec: &SystemSpec,
    n_points: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let polys = ConstantPolys::for_spec(spec);
    verify_algebra_with(spec, n_points, seed, tol, &|e| polys.at_energy(e))
}

/// As [`verify_algebra`] with caller-supplied constants (fault injection).
pub fn verify_algebra_with(
    spec: &SystemSpec,
    n_points: usize,
    seed: u64,
    tol: &Tolerances,
    constants: &(dyn Fn(f64) -> AlgebraConstants + Sync),
) -> Result<VerificationReport> {
    let points = sample_points(spec, n_points, seed)?;
    let ints = Integrals::new(spec);
    let samples = per_point(&points, |p| {
        let v = ints.at(p)?;
        let consts = constants(v.h.val);
        let [ha, hb, hc, ac, bc] = v.brackets();
        let ac_rhs = consts.rhs_ac_terms(v.a.val, v.b.val);
        let bc_rhs = consts.rhs_bc_terms(v.a.val, v.b.val);
        Ok(AlgebraSample {
            energy: v.h.val,
            a: v.a.val,
            b: v.b.val,
            residuals: [
                identity_residual(ha.0, 0.0, ha.1),
                identity_residual(hb.0, 0.0, hb.1),
                identity_residual(hc.0, 0.0, hc.1),
                identity_residual(ac.0, ac_rhs.iter().sum(), ac.1 + abs_sum(&ac_rhs)),
                identity_residual(bc.0, bc_rhs.iter().sum(), bc.1 + abs_sum(&bc_rhs)),
            ],
            ac: ac.0,
            bc: bc.0,
        })
    })?;

    let mut report = VerificationReport::new(Some(*spec), seed, n_points);
    let tolerances = [
        tol.first_bracket,
        tol.first_bracket,
        tol.first_bracket,
        tol.nested_bracket,
        tol.nested_bracket,
    ];
    for (i, name) in ALGEBRA_IDENTITIES.iter().enumerate() {
        let r = max_residual(samples.iter().map(|s| s.residuals[i]));
        report.push(IdentityResult::new(*name, r, tolerances[i]));
    }
    for (i, name) in [(3, "AC-row"), (4, "BC-row")] {
        if report.identities[i].pass {
            continue;
        }
        let rows: Vec<Vec<f64>> = samples
            .iter()
            .map(|s| row_basis(s.energy, s.a, s.b))
            .collect();
        let rhs: Vec<f64> = samples
            .iter()
            .map(|s| if i == 3 { s.ac } else { s.bc })
            .collect();
        if let Some(c) = refit(name, &rows, &rhs) {
            report.corrections.push(c);
            report.correction_applied = true;
        }
    }
    Ok(report)
}

/// `{A^2, AB, B^2, A, B, 1} x {1, E, E^2, E^3}`, the most general right-hand
/// side of either algebra row.
fn row_basis(e: f64, a: f64, b: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(24);
    for m in [a * a, a * b, b * b, a, b, 1.0] {
        let mut p = 1.0;
        for _ in 0..4 {
            out.push(m * p);
            p *= e;
        }
    }
    out
}

fn refit(identity: &str, rows: &[Vec<f64>], rhs: &[f64]) -> Option<Correction> {
    let sol = scaled_ridge_lstsq(rows, rhs, RIDGE_FACTOR).ok()?;
    Some(Correction {
        identity: identity.to_string(),
        refit_residual: relative_rms(rows, rhs, &sol.coefficients),
        refit_coefficients: sol.coefficients,
    })
}

/// Checks the degree-six Casimir combination against the printed `K(E)`.
pub fn verify_casimir(
    spec: &SystemSpec,
    n_points: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let polys = ConstantPolys::for_spec(spec);
    verify_casimir_with(spec, n_points, seed, tol, &|e| polys.at_energy(e))
}

pub fn verify_casimir_with(
    spec: &SystemSpec,
    n_points: usize,
    seed: u64,
    tol: &Tolerances,
    constants: &(dyn Fn(f64) -> AlgebraConstants + Sync),
) -> Result<VerificationReport> {
    let points = sample_points(spec, n_points, seed)?;
    let ints = Integrals::new(spec);
    let samples = per_point(&points, |p| {
        let v = ints.at(p)?;
        let [h, a, b, c] = [v.h.val, v.a.val, v.b.val, v.c.val];
        let consts = constants(h);
        let terms = consts.casimir_terms(a, b, c);
        // C^2 carries the rounding of C twice.
        let scale = abs_sum(&terms[1..]) + 2.0 * c.abs() * v.c_magnitude.val;
        let r = identity_residual(terms.iter().sum(), consts.k_casimir, scale);
        Ok(([h, a, b, c], r))
    })?;
    let mut report = VerificationReport::new(Some(*spec), seed, n_points);
    let r = max_residual(samples.iter().map(|s| s.1));
    report.push(IdentityResult::new("casimir", r, tol.casimir));
    if !report.identities[0].pass {
        let monomials = monomials(3, 3);
        let rows: Vec<Vec<f64>> = samples
            .iter()
            .map(|([h, a, b, _], _)| monomial_row(&monomials, &[*h, *a, *b]))
            .collect();
        let rhs: Vec<f64> = samples.iter().map(|([.., c], _)| c * c).collect();
        if let Some(c) = refit("casimir", &rows, &rhs) {
            report.corrections.push(c);
            report.correction_applied = true;
        }
    }
    Ok(report)
}

/// Ridge weight relative to the largest singular value of the scaled design.
pub const RIDGE_FACTOR: f64 = 1e-12;
/// Scaled normal systems above this condition estimate are rejected.
pub const MAX_NORMAL_CONDITION: f64 = 1e12;

/// All exponent tuples of `n_vars` variables with total degree at most
/// `degree`, in graded lexicographic order.
pub fn monomials(n_vars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, left: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            if budget == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for e in (0..=budget).rev() {
            prefix.push(e);
            rec(prefix, left - 1, budget - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=degree {
        rec(&mut Vec::new(), n_vars, total, &mut out);
    }
    out
}

pub fn monomial_row(monomials: &[Vec<u32>], values: &[f64]) -> Vec<f64> {
    monomials
        .iter()
        .map(|m| {
            m.iter()
                .zip(values)
                .map(|(&e, &v)| v.powi(e as i32))
                .product()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipFit {
    /// Exponents `(i, j, k)` of `H^i A^j B^k`, one per coefficient.
    pub monomials: Vec<Vec<u32>>,
    pub coefficients: Vec<f64>,
    /// Relative rms residual of the row-equilibrated system on the held-out
    /// last 20% of the points.
    pub holdout_residual: f64,
    pub normal_condition: f64,
}

impl MembershipFit {
    pub fn coefficient(&self, exponents: &[u32]) -> Option<f64> {
        self.monomials
            .iter()
            .position(|m| m == exponents)
            .map(|i| self.coefficients[i])
    }
}

/// Least-squares fit of `target` over the monomials of `generators` up to
/// `degree`. The first 80% of `points` train the fit; the remainder is
/// held out for the reported residual.
pub fn polynomial_membership(
    target: &(dyn Fn(&PhasePoint) -> Result<f64, DomainError> + Sync),
    generators: &[&dyn Observable],
    degree: u32,
    points: &[PhasePoint],
    ridge_factor: f64,
) -> Result<MembershipFit> {
    let monomials = monomials(generators.len(), degree);
    if points.len() < 2 * monomials.len() {
        return Err(Error::Invalid(format!(
            "membership needs at least {} points, got {}",
            2 * monomials.len(),
            points.len()
        )));
    }
    let data = per_point(points, |p| {
        let vals = generators
            .iter()
            .map(|g| g.value(p))
            .collect::<Result<Vec<f64>, _>>()?;
        Ok((monomial_row(&monomials, &vals), target(p)?))
    })?;
    // Rows are equilibrated to unit norm; an exact polynomial relation is
    // unaffected, while points near the zero set of g stop dominating.
    let (rows, rhs): (Vec<Vec<f64>>, Vec<f64>) = data
        .into_iter()
        .map(|(row, y)| {
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            (row.iter().map(|v| v / norm).collect(), y / norm)
        })
        .unzip();
    let n_train = points.len() - points.len() / 5;
    let sol = scaled_ridge_lstsq(&rows[..n_train], &rhs[..n_train], ridge_factor)?;
    if !(sol.normal_condition <= MAX_NORMAL_CONDITION) {
        return Err(Error::IllConditioned {
            condition: sol.normal_condition,
        });
    }
    let holdout_residual = relative_rms(&rows[n_train..], &rhs[n_train..], &sol.coefficients);
    Ok(MembershipFit {
        monomials,
        coefficients: sol.coefficients,
        holdout_residual,
        normal_condition: sol.normal_condition,
    })
}

/// Coefficients of `C^2` as a polynomial in `(H, A, B)` implied by the
/// Casimir relation, keyed by exponents `[i, j, k]` of `H^i A^j B^k`.
pub fn casimir_expansion(polys: &ConstantPolys) -> Vec<([u32; 3], f64)> {
    let mut terms: Vec<([u32; 3], f64)> = Vec::new();
    let mut add = |ab: [u32; 2], p: EnergyPoly| {
        for (i, &c) in p.coeffs().iter().enumerate() {
            if c != 0.0 {
                let key = [i as u32, ab[0], ab[1]];
                match terms.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, v)) => *v += c,
                    None => terms.push((key, c)),
                }
            }
        }
    };
    let k = EnergyPoly::constant;
    add([0, 0], polys.casimir);
    add([2, 1], k(2.0 * polys.alpha));
    add([1, 2], k(2.0 * polys.gamma));
    add([1, 1], polys.delta * 2.0);
    add([0, 2], polys.epsilon);
    add([0, 1], polys.zeta * 2.0);
    add([3, 0], k(-2.0 / 3.0 * polys.a));
    add([2, 0], -polys.d);
    add([1, 0], polys.z * -2.0);
    terms.sort_by_key(|t| t.0);
    terms
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::coordinate;
    use crate::systems::Class;

    fn generic(class: Class) -> SystemSpec {
        SystemSpec::new(class, [1.0, 0.5, -0.3, 2.0], [0.4, -0.1, 0.2, 1.0])
    }

    #[test]
    fn canonical_pair() {
        let p = PhasePoint::new(0.3, -1.2, 2.0, 0.7);
        let b = bracket(&coordinate(XI), &coordinate(P_XI), &p).unwrap();
        assert_eq!(b.val, 1.0);
        assert_eq!(b.grad, [0.0; 4]);
        let b = bracket(&coordinate(P_ETA), &coordinate(ETA), &p).unwrap();
        assert_eq!(b.val, -1.0);
    }

    #[test]
    fn self_bracket_vanishes_exactly() {
        let spec = generic(Class::I1);
        let h = hamiltonian(&spec);
        let b = bracket(&h, &h, &PhasePoint::new(1.2, 0.4, 0.7, -1.1)).unwrap();
        assert_eq!(b.val, 0.0);
    }

    #[test]
    fn hamiltonian_commutes_with_first_integral() {
        let spec = generic(Class::I1);
        let p = PhasePoint::new(1.2, 0.4, 0.7, -1.1);
        let (h, a) = (
            hamiltonian(&spec).eval(&p).unwrap(),
            integral_a(&spec).eval(&p).unwrap(),
        );
        let b = bracket_jets(&h, &a);
        let scale = bracket_magnitude(&h.first_order(), &a.first_order());
        assert!(identity_residual(b.val, 0.0, scale) < 1e-9, "{}", b.val);
    }

    #[test]
    fn c_is_antisymmetric() {
        let spec = generic(Class::I2);
        let c = c_observable(&spec);
        let (a, b) = (integral_a(&spec), integral_b(&spec));
        for p in sample_points(&spec, 100, 3).unwrap() {
            let c1 = c.value(&p).unwrap();
            let c2 = bracket(&b, &a, &p).unwrap().val;
            assert!((c1 + c2).abs() <= 1e-12 * (1.0 + c1.abs()));
        }
    }

    #[test]
    fn generic_i1_and_ii3_pass() {
        for class in [Class::I1, Class::II3] {
            let r = verify_algebra(&generic(class), 100, 12648430, &Tolerances::default()).unwrap();
            assert!(r.passed(), "{}", r.to_human());
            assert!(!r.correction_applied);
        }
    }

    #[test]
    fn corrupted_delta_is_detected() {
        let spec = generic(Class::I1);
        let polys = ConstantPolys::for_spec(&spec);
        let bad = |e: f64| AlgebraConstants {
            delta: polys.at_energy(e).delta + 1.0,
            ..polys.at_energy(e)
        };
        let r = verify_algebra_with(&spec, 50, 1, &Tolerances::default(), &bad).unwrap();
        assert!(!r.identity("AC-row").unwrap().pass);
        assert!(!r.identity("BC-row").unwrap().pass);
        assert!(r.identity("HA").unwrap().pass);
        assert!(r.correction_applied);
    }

    #[test]
    fn casimir_i2_and_free_motion() {
        let r = verify_casimir(&generic(Class::I2), 100, 5, &Tolerances::default()).unwrap();
        assert!(r.passed(), "{}", r.to_human());
        let free = SystemSpec::free(Class::I1, [0.0, 0.0, 0.0, 1.0]);
        assert!(verify_casimir(&free, 50, 5, &Tolerances::default())
            .unwrap()
            .passed());
    }

    #[test]
    fn corrupted_casimir_is_detected() {
        let spec = generic(Class::I1);
        let polys = ConstantPolys::for_spec(&spec);
        let bad = |e: f64| AlgebraConstants {
            k_casimir: polys.at_energy(e).k_casimir + 0.01 * e * e * e,
            ..polys.at_energy(e)
        };
        let r = verify_casimir_with(&spec, 100, 2, &Tolerances::default(), &bad).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(3, 3).len(), 20);
        assert_eq!(monomials(3, 3)[0], vec![0, 0, 0]);
        assert_eq!(monomials(2, 2).len(), 6);
    }

    #[test]
    fn membership_of_h_squared() {
        let spec = generic(Class::I1);
        let points = sample_points(&spec, 200, 9).unwrap();
        let ints = Integrals::new(&spec);
        let gens: [&dyn Observable; 3] = [&ints.h, &ints.a, &ints.b];
        let target = |p: &PhasePoint| ints.h.value(p).map(|h| h * h);
        let fit = polynomial_membership(&target, &gens, 3, &points, RIDGE_FACTOR).unwrap();
        for (m, c) in fit.monomials.iter().zip(&fit.coefficients) {
            let expected = if m == &vec![2, 0, 0] { 1.0 } else { 0.0 };
            assert!((c - expected).abs() < 1e-8, "{m:?}: {c}");
        }
        assert!(fit.holdout_residual < 1e-9);
    }

    #[test]
    fn odd_target_is_rejected() {
        let spec = generic(Class::I1);
        let points = sample_points(&spec, 200, 9).unwrap();
        let ints = Integrals::new(&spec);
        let gens: [&dyn Observable; 3] = [&ints.h, &ints.a, &ints.b];
        let target = |p: &PhasePoint| Ok(p.p_xi);
        let fit = polynomial_membership(&target, &gens, 3, &points, RIDGE_FACTOR).unwrap();
        assert!(fit.holdout_residual > 0.1);
    }
}
