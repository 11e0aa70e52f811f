//! The classification tables as data: each row is a set of parameter
//! constraints together with the properties it claims.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    curvature_samples, linear_integral_check_in, revolution_check_in, CurvatureClass, Direction,
    Frame, TOL_CONST, TOL_LINEAR, TOL_REVOLUTION, TOL_ZERO,
};
use crate::poisson::verify_algebra;
use crate::report::{IdentityResult, Tolerances, VerificationReport};
use crate::systems::domain::Interval;
use crate::systems::{Class, SampleDomain, SystemSpec};

static CATALOG_JSON: &str = include_str!("../data/catalog.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TableId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
}

impl TableId {
    pub const ALL: [TableId; 8] = [
        TableId::T1,
        TableId::T2,
        TableId::T3,
        TableId::T4,
        TableId::T5,
        TableId::T6,
        TableId::T7,
        TableId::T8,
    ];
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for TableId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown table {s:?}")))
    }
}

/// One of the eight parameters of a [`SystemSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Kappa,
    Lambda,
    Mu,
    Nu,
    K,
    Ell,
    M,
    N,
}

impl Param {
    pub const ALL: [Param; 8] = [
        Param::Kappa,
        Param::Lambda,
        Param::Mu,
        Param::Nu,
        Param::K,
        Param::Ell,
        Param::M,
        Param::N,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Param::Kappa => "kappa",
            Param::Lambda => "lambda",
            Param::Mu => "mu",
            Param::Nu => "nu",
            Param::K => "k",
            Param::Ell => "ell",
            Param::M => "m",
            Param::N => "n",
        }
    }
}

impl FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Constraint(format!("unknown parameter {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Free,
    Fixed(f64),
    /// `value / K` for the curvature `K` of the row.
    PerK(f64),
    /// `factor` times another parameter.
    Tied {
        to: Param,
        factor: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraints {
    pub kappa: Constraint,
    pub lambda: Constraint,
    pub mu: Constraint,
    pub nu: Constraint,
    pub k: Constraint,
    pub ell: Constraint,
    pub m: Constraint,
    pub n: Constraint,
}

impl Constraints {
    pub fn get(&self, p: Param) -> Constraint {
        match p {
            Param::Kappa => self.kappa,
            Param::Lambda => self.lambda,
            Param::Mu => self.mu,
            Param::Nu => self.nu,
            Param::K => self.k,
            Param::Ell => self.ell,
            Param::M => self.m,
            Param::N => self.n,
        }
    }

    pub fn set(&mut self, p: Param, c: Constraint) {
        let slot = match p {
            Param::Kappa => &mut self.kappa,
            Param::Lambda => &mut self.lambda,
            Param::Mu => &mut self.mu,
            Param::Nu => &mut self.nu,
            Param::K => &mut self.k,
            Param::Ell => &mut self.ell,
            Param::M => &mut self.m,
            Param::N => &mut self.n,
        };
        *slot = c;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    CurvatureZero,
    CurvatureConstant,
    /// `frame: None` marks a row whose revolution structure only appears in
    /// coordinates outside the real frames; it is carried unchecked.
    Revolution {
        frame: Option<Frame>,
    },
    LinearIntegral {
        frame: Option<Frame>,
        direction: Option<Direction>,
    },
    KoenigsForm {
        label: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimKind {
    CurvatureZero,
    CurvatureConstant,
    Revolution,
    LinearIntegral,
    KoenigsForm,
}

impl Claim {
    pub fn kind(&self) -> ClaimKind {
        match self {
            Claim::CurvatureZero => ClaimKind::CurvatureZero,
            Claim::CurvatureConstant => ClaimKind::CurvatureConstant,
            Claim::Revolution { .. } => ClaimKind::Revolution,
            Claim::LinearIntegral { .. } => ClaimKind::LinearIntegral,
            Claim::KoenigsForm { .. } => ClaimKind::KoenigsForm,
        }
    }
}

impl FromStr for ClaimKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
            .map_err(|_| Error::Invalid(format!("unknown claim {s:?}")))
    }
}

pub const UNCHECKED_REVOLUTION: &str = "revolution in transformed coordinates: unchecked";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub table: TableId,
    pub row_id: String,
    pub class: Class,
    pub constraints: Constraints,
    pub claims: Vec<Claim>,
    #[serde(default)]
    pub literature: Vec<String>,
    /// Principal row this one is marked equivalent to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alias_of: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CatalogEntry {
    pub fn is_principal(&self) -> bool {
        self.alias_of.is_none()
    }

    /// Whether any claim can be checked numerically.
    pub fn is_checkable(&self) -> bool {
        self.claims
            .iter()
            .any(|c| c.kind() != ClaimKind::KoenigsForm)
    }

    pub fn has_claim(&self, kind: ClaimKind) -> bool {
        self.claims.iter().any(|c| c.kind() == kind)
    }

    pub fn free_params(&self) -> Vec<Param> {
        Param::ALL
            .into_iter()
            .filter(|&p| self.constraints.get(p) == Constraint::Free)
            .collect()
    }

    pub fn uses_curvature(&self) -> bool {
        Param::ALL
            .into_iter()
            .any(|p| matches!(self.constraints.get(p), Constraint::PerK(_)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableInfo {
    pub id: TableId,
    pub caption: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub tables: Vec<TableInfo>,
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn from_json(text: &str) -> Result<Self> {
        let cat: Catalog = serde_json::from_str(text)?;
        for e in &cat.entries {
            for p in Param::ALL {
                if let Constraint::Tied { to, .. } = e.constraints.get(p) {
                    if matches!(e.constraints.get(to), Constraint::Tied { .. }) {
                        return Err(Error::Constraint(format!(
                            "{}: {} is tied to the tied parameter {}",
                            e.row_id,
                            p.as_str(),
                            to.as_str()
                        )));
                    }
                }
            }
        }
        Ok(cat)
    }

    pub fn entry(&self, row_id: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.row_id == row_id)
    }

    /// Matching rows in catalog order.
    pub fn lookup(&self, filter: &Filter) -> Vec<&CatalogEntry> {
        self.entries.iter().filter(|e| filter.matches(e)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serialization is infallible")
    }
}

/// The embedded catalog.
pub fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| Catalog::from_json(CATALOG_JSON).expect("embedded catalog is valid"))
}

pub fn lookup(filter: &Filter) -> Vec<&'static CatalogEntry> {
    catalog().lookup(filter)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Filter {
    pub table: Option<TableId>,
    pub class: Option<Class>,
    pub claim: Option<ClaimKind>,
}

impl Filter {
    pub fn table(table: TableId) -> Self {
        Self {
            table: Some(table),
            ..Self::default()
        }
    }

    pub fn matches(&self, e: &CatalogEntry) -> bool {
        self.table.is_none_or(|t| t == e.table)
            && self.class.is_none_or(|c| c == e.class)
            && self.claim.is_none_or(|k| e.has_claim(k))
    }
}

/// Concrete spec for `entry`. `free_values` must name exactly the free
/// parameters; `curvature` is required (and nonzero) for rows written in
/// terms of `1/K`.
pub fn instantiate(
    entry: &CatalogEntry,
    free_values: &BTreeMap<Param, f64>,
    curvature: Option<f64>,
) -> Result<SystemSpec> {
    let free = entry.free_params();
    for p in &free {
        if !free_values.contains_key(p) {
            return Err(Error::Constraint(format!(
                "{}: missing value for free parameter {}",
                entry.row_id,
                p.as_str()
            )));
        }
    }
    if let Some(extra) = free_values.keys().find(|p| !free.contains(p)) {
        return Err(Error::Constraint(format!(
            "{}: {} is not a free parameter",
            entry.row_id,
            extra.as_str()
        )));
    }
    let direct = |p: Param| -> Result<Option<f64>> {
        Ok(match entry.constraints.get(p) {
            Constraint::Free => Some(free_values[&p]),
            Constraint::Fixed(v) => Some(v),
            Constraint::PerK(c) => match curvature {
                Some(k) if k != 0.0 && k.is_finite() => Some(c / k),
                _ => {
                    return Err(Error::Constraint(format!(
                        "{}: a nonzero curvature is required",
                        entry.row_id
                    )))
                }
            },
            Constraint::Tied { .. } => None,
        })
    };
    let mut values = [0.0; 8];
    for (i, p) in Param::ALL.into_iter().enumerate() {
        values[i] = match direct(p)? {
            Some(v) => v,
            None => match entry.constraints.get(p) {
                Constraint::Tied { to, factor } => {
                    factor * direct(to)?.expect("ties to tied parameters are rejected at load")
                }
                _ => unreachable!(),
            },
        };
    }
    let spec = SystemSpec::new(
        entry.class,
        [values[0], values[1], values[2], values[3]],
        [values[4], values[5], values[6], values[7]],
    );
    spec.validate()?;
    Ok(spec)
}

/// Range the free parameters are drawn from.
pub const FREE_RANGE: Interval = Interval::new(-2.0, 2.0);
const DRAW_ATTEMPTS: usize = 200;
/// Free values smaller than this are redrawn so a "free" slot is generic.
const MIN_FREE_ABS: f64 = 0.05;

/// Draws free values until the class domain admits a probe sample.
pub fn draw_spec<R: Rng + ?Sized>(
    entry: &CatalogEntry,
    curvature: Option<f64>,
    rng: &mut R,
) -> Result<SystemSpec> {
    let domain = SampleDomain::for_class(entry.class);
    for _ in 0..DRAW_ATTEMPTS {
        let values: BTreeMap<Param, f64> = entry
            .free_params()
            .into_iter()
            .map(|p| {
                let mut v = FREE_RANGE.sample(rng);
                while v.abs() < MIN_FREE_ABS {
                    v = FREE_RANGE.sample(rng);
                }
                (p, v)
            })
            .collect();
        let spec = instantiate(entry, &values, curvature)?;
        let mut probe = ChaCha8Rng::seed_from_u64(rng.gen());
        if domain.sample(&spec, 20, &mut probe).is_ok() {
            return Ok(spec);
        }
    }
    Err(Error::Sampling {
        attempted: DRAW_ATTEMPTS,
        rejected: DRAW_ATTEMPTS,
        reason: format!("{}: no admissible free-parameter draw", entry.row_id),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryOptions {
    pub draws: usize,
    pub n_points: usize,
    pub seed: u64,
    /// Curvature used for `1/K` rows (default 1).
    pub curvature: Option<f64>,
    pub tolerances: Tolerances,
    /// Also run the algebra verification on every draw.
    pub algebra: bool,
}

impl Default for EntryOptions {
    fn default() -> Self {
        Self {
            draws: 5,
            n_points: 50,
            seed: crate::report::DEFAULT_SEED,
            curvature: None,
            tolerances: Tolerances::default(),
            algebra: true,
        }
    }
}

/// Instantiates `entry` at random free values and checks every claim, plus
/// the quadratic algebra of each instance.
pub fn verify_entry(entry: &CatalogEntry, opts: &EntryOptions) -> Result<VerificationReport> {
    if !entry.is_checkable() {
        return Err(Error::Unverifiable(format!(
            "{} carries metadata only",
            entry.row_id
        )));
    }
    let curvature = if entry.uses_curvature() {
        Some(opts.curvature.unwrap_or(1.0))
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = VerificationReport::new(None, opts.seed, opts.n_points)
        .with_label(format!("{} {}", entry.table, entry.row_id));
    for _ in 0..opts.draws {
        let spec = draw_spec(entry, curvature, &mut rng)?;
        let seed: u64 = rng.gen();
        for claim in &entry.claims {
            check_claim(claim, &spec, curvature, opts, seed, &mut report)?;
        }
        if opts.algebra {
            report.absorb(verify_algebra(
                &spec,
                opts.n_points,
                seed,
                &opts.tolerances,
            )?);
        }
        report.spec = Some(spec);
    }
    Ok(report)
}

fn check_claim(
    claim: &Claim,
    spec: &SystemSpec,
    curvature: Option<f64>,
    opts: &EntryOptions,
    seed: u64,
    report: &mut VerificationReport,
) -> Result<()> {
    let n = opts.n_points;
    match claim {
        Claim::CurvatureZero => {
            let k = curvature_samples(spec, n, seed)?;
            let c = CurvatureClass::from_samples(&k, TOL_ZERO, TOL_CONST);
            report.merge(IdentityResult::new("curvature-zero", c.max_abs, TOL_ZERO));
        }
        Claim::CurvatureConstant => {
            let target = curvature.unwrap_or(1.0);
            let k = curvature_samples(spec, n, seed)?;
            let c = CurvatureClass::from_samples(&k, TOL_ZERO, TOL_CONST);
            report.merge(
                IdentityResult::new("curvature-mean", (c.mean - target).abs(), 1e-7)
                    .with_detail(format!("K = {target}")),
            );
            report.merge(IdentityResult::new("curvature-stddev", c.stddev, TOL_CONST));
        }
        Claim::Revolution { frame: None } => {
            if !report.notes.iter().any(|s| s == UNCHECKED_REVOLUTION) {
                report.notes.push(UNCHECKED_REVOLUTION.to_string());
            }
        }
        Claim::Revolution { frame: Some(frame) } => {
            let ev = revolution_check_in(spec, *frame, n, seed)?;
            report.merge(
                IdentityResult::new("revolution", ev.best_residual(), TOL_REVOLUTION)
                    .with_detail(format!("{} frame, {}", frame.as_str(), ev.outcome.as_str())),
            );
        }
        Claim::LinearIntegral { frame, direction } => {
            let frames: Vec<Frame> = match frame {
                Some(f) => vec![*f],
                None => Frame::ALL
                    .into_iter()
                    .filter(|f| f.applies_to(spec))
                    .collect(),
            };
            let dirs: Vec<Direction> = match direction {
                Some(d) => vec![*d],
                None => Direction::ALL.to_vec(),
            };
            let mut best: Option<(f64, Frame, Direction)> = None;
            for &f in &frames {
                for &s in &dirs {
                    let r = linear_integral_check_in(spec, f, s, n, seed)?;
                    if best.is_none_or(|(b, _, _)| r < b) {
                        best = Some((r, f, s));
                    }
                }
            }
            let (r, f, s) = best.expect("at least one frame applies");
            report.merge(
                IdentityResult::new("linear-integral", r, TOL_LINEAR).with_detail(format!(
                    "{} frame, {}",
                    f.as_str(),
                    s.as_str()
                )),
            );
        }
        Claim::KoenigsForm { .. } => {}
    }
    Ok(())
}

/// Outcome of one row in a table sweep.
#[derive(Debug)]
pub struct RowOutcome {
    pub row_id: String,
    pub result: Result<VerificationReport>,
}

impl RowOutcome {
    pub fn passed(&self) -> bool {
        self.result.as_ref().is_ok_and(|r| r.passed())
    }
}

/// Verifies every checkable principal row of `table`.
pub fn sweep_table(table: TableId, opts: &EntryOptions) -> Vec<RowOutcome> {
    lookup(&Filter::table(table))
        .into_iter()
        .filter(|e| e.is_checkable() && e.is_principal())
        .map(|e| RowOutcome {
            row_id: e.row_id.clone(),
            result: verify_entry(e, opts),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(table: TableId) -> usize {
        lookup(&Filter::table(table)).len()
    }

    #[test]
    fn row_counts() {
        assert_eq!(count(TableId::T1), 6);
        assert_eq!(count(TableId::T2), 13);
        assert_eq!(count(TableId::T3), 11);
        assert_eq!(count(TableId::T4), 7);
        assert_eq!(count(TableId::T6), 4);
        assert_eq!(count(TableId::T7), 8);
        assert_eq!(count(TableId::T8), 3);
        let t2: Vec<_> = lookup(&Filter::table(TableId::T2))
            .iter()
            .map(|e| e.row_id.clone())
            .collect();
        assert_eq!(t2.first().unwrap(), "R_1");
        assert_eq!(t2.last().unwrap(), "R_13");
    }

    #[test]
    fn row_ids_are_unique() {
        let mut ids: Vec<_> = catalog().entries.iter().map(|e| &e.row_id).collect();
        let n = ids.len();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn linear_table_with_aliases() {
        let rows = lookup(&Filter {
            table: Some(TableId::T5),
            claim: Some(ClaimKind::LinearIntegral),
            ..Filter::default()
        });
        let principals: Vec<_> = rows
            .iter()
            .filter(|e| e.is_principal())
            .map(|e| e.row_id.as_str())
            .collect();
        assert_eq!(
            principals,
            ["GL_1", "GL_2", "GL_3", "GL_4", "GL_5", "GL_6+", "GL_6-", "GL_7"]
        );
        assert_eq!(rows.len(), 12);
        for alias in rows.iter().filter_map(|e| e.alias_of.as_ref()) {
            assert!(catalog().entry(alias).is_some());
        }
    }

    #[test]
    fn instantiate_examples() {
        let c1 = catalog().entry("C_1").unwrap();
        let free: BTreeMap<Param, f64> = [
            (Param::K, 0.1),
            (Param::Ell, 0.2),
            (Param::M, 0.3),
            (Param::N, 0.4),
        ]
        .into();
        let spec = instantiate(c1, &free, Some(1.0)).unwrap();
        assert_eq!(spec.metric(), [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(spec.potential(), [0.1, 0.2, 0.3, 0.4]);

        let c6 = catalog().entry("C_6").unwrap();
        let spec = instantiate(c6, &free, Some(2.0)).unwrap();
        assert_eq!(spec.metric(), [-1.0, -0.5, 1.0, -0.5]);

        let f4 = catalog().entry("F_4").unwrap();
        let mut f4_free = free.clone();
        f4_free.insert(Param::Kappa, 1.5);
        let spec = instantiate(f4, &f4_free, None).unwrap();
        assert_eq!(
            (spec.class, spec.metric()),
            (Class::II1, [1.5, 0.0, 0.0, 0.0])
        );

        let r11 = catalog().entry("R_11").unwrap();
        assert_eq!(r11.class, Class::II2);
        assert_eq!(r11.free_params()[..2], [Param::Lambda, Param::Nu]);
    }

    #[test]
    fn instantiate_rejects_bad_values() {
        let f4 = catalog().entry("F_4").unwrap();
        let too_few: BTreeMap<Param, f64> = [(Param::Kappa, 1.0)].into();
        assert!(matches!(
            instantiate(f4, &too_few, None),
            Err(Error::Constraint(_))
        ));
        let mut extra: BTreeMap<Param, f64> = Param::ALL.iter().map(|&p| (p, 1.0)).collect();
        assert!(matches!(
            instantiate(f4, &extra, None),
            Err(Error::Constraint(_))
        ));
        extra.retain(|p, _| f4.free_params().contains(p));
        assert!(instantiate(f4, &extra, None).is_ok());

        let c1 = catalog().entry("C_1").unwrap();
        let free: BTreeMap<Param, f64> = c1.free_params().into_iter().map(|p| (p, 1.0)).collect();
        assert!(matches!(
            instantiate(c1, &free, None),
            Err(Error::Constraint(_))
        ));
        assert!(matches!(
            instantiate(c1, &free, Some(0.0)),
            Err(Error::Constraint(_))
        ));
    }

    #[test]
    fn metadata_rows_are_unverifiable() {
        let ko = catalog().entry("KO_I1").unwrap();
        assert!(matches!(
            verify_entry(ko, &EntryOptions::default()),
            Err(Error::Unverifiable(_))
        ));
    }

    #[test]
    fn dump_round_trips() {
        let back = Catalog::from_json(&catalog().to_json()).unwrap();
        assert_eq!(&back, catalog());
    }
}
