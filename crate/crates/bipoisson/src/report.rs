//! Outcome type shared by all verification passes.
//!
//! Every check reduces to the same shape: a named pass over a finite family
//! of exact identities, either all of which hold, or a first witness that
//! fails. Witnesses carry the offending object (a coordinate triple, a
//! tensor index sextuple, …) rendered as text together with the nonzero
//! residual, so a failure is reproducible from the report alone.

use serde::Serialize;

/// Result of one verification pass.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    /// Stable identifier of the check (e.g. `jacobi`, `fp4`).
    pub name: String,
    /// Whether every identity in the pass held exactly.
    pub passed: bool,
    /// Number of identities evaluated.
    pub checked: usize,
    /// First failing identity in deterministic order, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Free-form details safe to print on one line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// A reproducible description of a failed identity.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    /// Which identity failed (e.g. `{{S[1,2],S[2,1]},S[1,1]} + cyc`).
    pub location: String,
    /// The nonzero residual, printed in canonical polynomial form.
    pub residual: String,
}

impl Report {
    /// A passing report over `checked` identities.
    pub fn pass(name: impl Into<String>, checked: usize) -> Self {
        Report {
            name: name.into(),
            passed: true,
            checked,
            witness: None,
            detail: None,
        }
    }

    /// A failing report with its first witness.
    pub fn fail(
        name: impl Into<String>,
        checked: usize,
        location: impl Into<String>,
        residual: impl Into<String>,
    ) -> Self {
        Report {
            name: name.into(),
            passed: false,
            checked,
            witness: Some(Witness {
                location: location.into(),
                residual: residual.into(),
            }),
            detail: None,
        }
    }

    /// Attach a human-readable annotation.
    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// One-line summary: `name: ok (n identities)` or the witness.
    pub fn summary(&self) -> String {
        let mut s = if self.passed {
            format!("{}: ok ({} identities)", self.name, self.checked)
        } else {
            match &self.witness {
                Some(w) => format!(
                    "{}: FAILED at {} with residual {}",
                    self.name, w.location, w.residual
                ),
                None => format!("{}: FAILED", self.name),
            }
        };
        if let Some(d) = &self.detail {
            s.push_str(" — ");
            s.push_str(d);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summaries_read_cleanly() {
        let ok = Report::pass("jacobi", 120);
        assert_eq!(ok.summary(), "jacobi: ok (120 identities)");
        let bad = Report::fail("fp4", 729, "(i,j,k,l,m,n)=(2,1,1,1,2,1)", "-2/3");
        assert!(bad.summary().contains("FAILED"));
        assert!(bad.summary().contains("(2,1,1,1,2,1)"));
    }

    #[test]
    fn witness_is_omitted_from_json_when_passing() {
        let ok = Report::pass("compat", 36);
        let js = serde_json::to_string(&ok).unwrap();
        assert!(!js.contains("witness"));
        let bad = Report::fail("compat", 36, "pair", "S0");
        let js = serde_json::to_string(&bad).unwrap();
        assert!(js.contains("residual"));
    }
}
