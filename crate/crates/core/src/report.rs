//! Serializable verification reports shared by every checker.

use serde::{Deserialize, Serialize};

use crate::systems::SystemSpec;

pub const SCHEMA: &str = "superint-report/1";
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

/// Pass thresholds for the normalized residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `{H,A}`, `{H,B}`, `{H,C}` and linear-integral brackets.
    pub first_bracket: f64,
    /// The `{A,C}` and `{B,C}` rows.
    pub nested_bracket: f64,
    pub casimir: f64,
    pub curvature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            first_bracket: 1e-9,
            nested_bracket: 1e-8,
            casimir: 1e-8,
            curvature: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Self {
            first_bracket: tol,
            nested_bracket: tol,
            casimir: tol,
            curvature: tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl IdentityResult {
    pub fn new(name: impl Into<String>, max_residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// A boolean check with no natural residual (e.g. a classification).
    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            max_residual: if pass { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass,
            detail: None,
        }
    }
}

/// Outcome of refitting the structure constants of an identity that failed
/// with the printed ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub identity: String,
    /// Relative rms residual of the refit; small values mean the printed
    /// constants drifted from a convention the data still satisfies.
    pub refit_residual: f64,
    pub refit_coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub spec: Option<SystemSpec>,
    pub seed: u64,
    pub n_points: usize,
    pub identities: Vec<IdentityResult>,
    pub correction_applied: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub corrections: Vec<Correction>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl VerificationReport {
    pub fn new(spec: Option<SystemSpec>, seed: u64, n_points: usize) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            spec,
            seed,
            n_points,
            identities: Vec::new(),
            correction_applied: false,
            corrections: Vec::new(),
            notes: Vec::new(),
            label: None,
            timestamp: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn push(&mut self, result: IdentityResult) {
        self.identities.push(result);
    }

    /// Adds `result`, or folds it into an identity of the same name keeping
    /// the worse residual.
    pub fn merge(&mut self, result: IdentityResult) {
        match self.identities.iter_mut().find(|r| r.name == result.name) {
            Some(existing) => {
                let pass = existing.pass && result.pass;
                if !(result.max_residual <= existing.max_residual) {
                    *existing = result;
                }
                existing.pass = pass;
            }
            None => self.identities.push(result),
        }
    }

    /// Merges every identity of `other` and carries over its diagnostics.
    pub fn absorb(&mut self, other: VerificationReport) {
        for r in other.identities {
            self.merge(r);
        }
        self.correction_applied |= other.correction_applied;
        self.corrections.extend(other.corrections);
        for n in other.notes {
            if !self.notes.contains(&n) {
                self.notes.push(n);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.identities.iter().all(|r| r.pass)
    }

    pub fn identity(&self, name: &str) -> Option<&IdentityResult> {
        self.identities.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    /// One line per identity.
    pub fn to_human(&self) -> String {
        let mut out = String::new();
        if let Some(label) = &self.label {
            out.push_str(&format!("# {label}\n"));
        }
        for r in &self.identities {
            out.push_str(&format!(
                "{:<4} {:<28} residual {:.3e}  tol {:.1e}",
                if r.pass { "PASS" } else { "FAIL" },
                r.name,
                r.max_residual,
                r.tolerance
            ));
            if let Some(d) = &r.detail {
                out.push_str(&format!("  ({d})"));
            }
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str(&format!("note {n}\n"));
        }
        for c in &self.corrections {
            out.push_str(&format!(
                "note {:<28} refit residual {:.3e}\n",
                c.identity, c.refit_residual
            ));
        }
        out
    }
}

/// Deterministic max that propagates NaN as infinity.
pub fn max_residual<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().fold(
        0.0,
        |m, r| {
            if r.is_nan() {
                f64::INFINITY
            } else {
                m.max(r)
            }
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_within_tolerance() {
        assert!(IdentityResult::new("x", 1e-9, 1e-9).pass);
        assert!(!IdentityResult::new("x", 2e-9, 1e-9).pass);
        assert!(!IdentityResult::new("x", f64::NAN, 1e-9).pass);
    }

    #[test]
    fn nan_poisons_the_max() {
        assert_eq!(max_residual([1.0, f64::NAN, 2.0]), f64::INFINITY);
        assert_eq!(max_residual([1.0, 3.0, 2.0]), 3.0);
        assert_eq!(max_residual(std::iter::empty()), 0.0);
    }

    #[test]
    fn merge_keeps_worst() {
        let mut r = VerificationReport::new(None, 0, 1);
        r.merge(IdentityResult::new("x", 1e-12, 1e-9));
        r.merge(IdentityResult::new("x", 1e-6, 1e-9).with_detail("bad"));
        r.merge(IdentityResult::new("x", 1e-10, 1e-9));
        assert_eq!(r.identities.len(), 1);
        assert_eq!(r.identities[0].max_residual, 1e-6);
        assert_eq!(r.identities[0].detail.as_deref(), Some("bad"));
        assert!(!r.passed());
    }

    #[test]
    fn json_round_trip() {
        let mut r = VerificationReport::new(None, DEFAULT_SEED, 3);
        r.push(IdentityResult::new("HA", 1e-12, 1e-9));
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_json().contains("\"schema\": \"superint-report/1\""));
    }
}
