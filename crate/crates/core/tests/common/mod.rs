//! Fixtures and oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use superint::jets::{jet_arith, jet_fn, BinaryOp, FnObservable, Jet2, Observable, UnaryFn, DIM};
use superint::{Class, DomainError, PhasePoint, SystemSpec};

/// Parameters used with every class for the frozen Casimir coefficients.
pub const ORACLE_METRIC: [f64; 4] = [0.7, 0.5, -0.3, 1.3];
pub const ORACLE_POTENTIAL: [f64; 4] = [0.4, -0.1, 0.2, 1.0];

pub fn oracle_spec(class: Class) -> SystemSpec {
    SystemSpec::new(class, ORACLE_METRIC, ORACLE_POTENTIAL)
}

pub type Coefficients = &'static [([u32; 3], f64)];

/// Coefficients of `C^2` in `H^i A^j B^k` for [`oracle_spec`], expanded
/// symbolically from the structure constants. Missing monomials are zero.
pub const CASIMIR_ORACLE: [(Class, Coefficients); 6] = [
    (
        Class::I1,
        &[
            ([0, 0, 0], -19.712),
            ([0, 0, 1], -25.6),
            ([0, 0, 2], 25.6),
            ([0, 1, 0], -21.12),
            ([0, 1, 1], -12.8),
            ([0, 2, 0], 8.0),
            ([0, 3, 0], 4.0),
            ([1, 0, 0], 173.952),
            ([1, 0, 1], 78.08),
            ([1, 0, 2], 128.0),
            ([1, 1, 0], 8.32),
            ([1, 1, 1], 22.4),
            ([1, 2, 0], -10.4),
            ([2, 0, 0], -176.448),
            ([2, 0, 1], -58.24),
            ([2, 1, 0], -65.44),
            ([3, 0, 0], -20.128),
        ],
    ),
    (
        Class::I2,
        &[
            ([0, 0, 0], -16.384),
            ([0, 0, 1], -53.76),
            ([0, 0, 2], 25.6),
            ([0, 1, 0], -38.4),
            ([0, 2, 1], 16.0),
            ([1, 0, 0], 228.352),
            ([1, 0, 1], 166.4),
            ([1, 0, 2], 128.0),
            ([1, 1, 0], 75.52),
            ([2, 0, 0], -433.408),
            ([2, 0, 1], -364.16),
            ([2, 1, 0], -33.28),
            ([3, 0, 0], 236.8),
        ],
    ),
    (
        Class::I3,
        &[
            ([0, 0, 0], -25.472),
            ([0, 0, 1], 6.4),
            ([0, 1, 0], -72.32),
            ([0, 1, 2], 16.0),
            ([0, 2, 0], -12.8),
            ([0, 2, 1], -64.0),
            ([1, 0, 0], 112.832),
            ([1, 0, 1], 23.68),
            ([1, 1, 0], 111.36),
            ([1, 2, 0], 64.0),
            ([2, 0, 0], -154.624),
            ([2, 0, 1], -41.6),
            ([2, 1, 0], -54.4),
            ([3, 0, 0], 80.512),
        ],
    ),
    (
        Class::II1,
        &[
            ([0, 0, 0], -7.04),
            ([0, 0, 1], 0.16),
            ([0, 1, 0], 0.48),
            ([0, 1, 1], 6.4),
            ([0, 2, 0], -6.4),
            ([1, 0, 0], 24.512),
            ([1, 0, 1], 1.6),
            ([1, 1, 0], 0.32),
            ([1, 1, 1], -11.2),
            ([1, 2, 0], 11.2),
            ([2, 0, 0], -39.328),
            ([2, 0, 1], 4.0),
            ([2, 1, 0], -2.56),
            ([3, 0, 0], 25.168),
        ],
    ),
    (
        Class::II2,
        &[
            ([0, 0, 0], 1.312),
            ([0, 0, 1], 2.56),
            ([0, 1, 0], 5.28),
            ([0, 1, 1], -0.8),
            ([0, 2, 0], 8.0),
            ([0, 3, 0], 4.0),
            ([1, 0, 0], -1.728),
            ([1, 0, 1], -8.96),
            ([1, 1, 0], -10.72),
            ([1, 1, 1], -4.0),
            ([1, 2, 0], -10.4),
            ([2, 0, 0], -2.392),
            ([2, 0, 1], 7.84),
            ([2, 1, 0], 3.4),
            ([3, 0, 0], 4.728),
        ],
    ),
    (
        Class::II3,
        &[
            ([0, 0, 0], 25.856),
            ([0, 0, 1], -2.56),
            ([0, 1, 0], -12.8),
            ([0, 2, 1], 16.0),
            ([1, 0, 0], -109.312),
            ([1, 0, 1], -8.32),
            ([1, 1, 0], -2.56),
            ([2, 0, 0], 164.16),
            ([2, 0, 1], 22.4),
            ([2, 1, 0], 24.96),
            ([3, 0, 0], -72.832),
        ],
    ),
];

pub fn casimir_oracle(class: Class, exponents: [u32; 3]) -> f64 {
    CASIMIR_ORACLE
        .iter()
        .find(|(c, _)| *c == class)
        .and_then(|(_, t)| t.iter().find(|(e, _)| *e == exponents))
        .map_or(0.0, |(_, v)| *v)
}

/// Spec and initial point pairs that stay in their domain up to `t = 10`.
pub struct Fixture {
    pub spec: SystemSpec,
    pub initials: [PhasePoint; 2],
}

pub fn dynamics_fixtures() -> Vec<Fixture> {
    let f = |class, metric, potential, a: [f64; 4], b: [f64; 4]| Fixture {
        spec: SystemSpec::new(class, metric, potential),
        initials: [PhasePoint::from_array(a), PhasePoint::from_array(b)],
    };
    vec![
        f(
            Class::I1,
            [-0.708135, -1.812145, -0.088176, -0.759293],
            [-0.153179, -0.936129, -0.512006, 1.219712],
            [1.651828, 0.951876, 0.635541, 1.770267],
            [1.246249, 1.659589, 1.671706, -0.384857],
        ),
        f(
            Class::I2,
            [-1.70304, -1.07468, -1.730122, 1.934016],
            [0.389762, 1.504375, -0.98182, 1.301027],
            [0.515282, 1.675702, -1.788921, -0.787314],
            [1.659686, 0.570145, -1.642243, -0.358602],
        ),
        f(
            Class::II1,
            [-0.965233, 0.418668, 1.508048, 1.764948],
            [-0.514083, 1.561472, -1.431031, -1.618124],
            [1.498261, 1.448961, -1.555587, -1.419138],
            [1.06793, 0.922343, 0.234198, 0.10775],
        ),
        f(
            Class::II2,
            [-1.897742, -0.150291, -0.886632, 0.118958],
            [0.094014, 0.847741, -1.012502, 0.074642],
            [0.832442, 1.183467, -1.707891, -0.172991],
            [1.901859, 1.804386, 0.419577, -1.519033],
        ),
        f(
            Class::II3,
            [-1.113379, -1.475344, -1.9247, -1.908656],
            [1.264345, 0.167294, 0.764414, 0.5259],
            [1.272214, 0.463721, 0.407222, 1.905427],
            [1.176962, 0.381226, -1.887294, -0.085632],
        ),
    ]
}

/// One step of a straight-line jet program over registers seeded with the
/// four phase coordinates.
#[derive(Debug, Clone, Copy)]
pub enum Step {
    Unary(UnaryFn, usize),
    Binary(BinaryOp, usize, usize),
}

const UNARY: [UnaryFn; 14] = [
    UnaryFn::Neg,
    UnaryFn::Inv,
    UnaryFn::Sqrt,
    UnaryFn::Exp,
    UnaryFn::Ln,
    UnaryFn::PowInt(3),
    UnaryFn::PowInt(-2),
    UnaryFn::PowReal(1.7),
    UnaryFn::Sin,
    UnaryFn::Cos,
    UnaryFn::Tan,
    UnaryFn::Atan,
    UnaryFn::Sinh,
    UnaryFn::Cosh,
];

const BINARY: [BinaryOp; 4] = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div];

pub fn random_program<R: Rng>(rng: &mut R, len: usize) -> Vec<Step> {
    (0..len)
        .map(|i| {
            let regs = DIM + i;
            if rng.gen_bool(0.5) {
                Step::Unary(UNARY[rng.gen_range(0..UNARY.len())], rng.gen_range(0..regs))
            } else {
                Step::Binary(
                    BINARY[rng.gen_range(0..BINARY.len())],
                    rng.gen_range(0..regs),
                    rng.gen_range(0..regs),
                )
            }
        })
        .collect()
}

/// Maps any real into the domain of `f` (or a range where it stays tame).
fn guard(x: Jet2, f: UnaryFn) -> Jet2 {
    match f {
        UnaryFn::Inv | UnaryFn::Sqrt | UnaryFn::Ln | UnaryFn::PowInt(_) | UnaryFn::PowReal(_) => {
            x * x + 0.5
        }
        UnaryFn::Exp | UnaryFn::Sinh | UnaryFn::Cosh => x.atan(),
        UnaryFn::Tan => x.atan() * 0.5,
        _ => x,
    }
}

pub fn run_program(program: &[Step], seed: &[Jet2; DIM]) -> Result<Jet2, DomainError> {
    let mut regs: Vec<Jet2> = seed.to_vec();
    for step in program {
        let v = match *step {
            Step::Unary(f, i) => jet_fn(&guard(regs[i], f), f)?,
            Step::Binary(BinaryOp::Div, i, j) => {
                jet_arith(&regs[i], &(regs[j] * regs[j] + 0.5), BinaryOp::Div)?
            }
            Step::Binary(op, i, j) => jet_arith(&regs[i], &regs[j], op)?,
        };
        // Keep magnitudes bounded so the finite-difference oracle stays sharp.
        regs.push(v.atan() * 2.0);
    }
    Ok(*regs.last().expect("programs are nonempty"))
}

pub fn program_observable(program: Vec<Step>) -> impl Observable {
    FnObservable::new("program", move |v: &[Jet2; DIM]| run_program(&program, v))
}
