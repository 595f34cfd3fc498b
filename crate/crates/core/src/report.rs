//! Outcome of an exact law check.

use std::fmt;

use crate::exactlin::{format_scalar, Scalar};

/// The first failing instance of a law, in lexicographic order of `indices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Short name of the law, e.g. `"associativity"` or `"hder"`.
    pub law: String,
    /// Index tuple identifying the failing instance (meaning depends on the law).
    pub indices: Vec<usize>,
    pub lhs: Vec<Scalar>,
    pub rhs: Vec<Scalar>,
}

impl Violation {
    pub fn new(law: impl Into<String>, indices: Vec<usize>, lhs: Vec<Scalar>, rhs: Vec<Scalar>) -> Self {
        Violation { law: law.into(), indices, lhs, rhs }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[Scalar]| v.iter().map(format_scalar).collect::<Vec<_>>().join(", ");
        write!(f, "{} at {:?}: lhs ({}) != rhs ({})", self.law, self.indices, show(&self.lhs), show(&self.rhs))
    }
}

/// `ok` iff no violation was found. Only the first violation is kept.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CheckReport {
    pub first_violation: Option<Violation>,
    /// Free-form remarks that do not affect `ok` (e.g. skipped checks).
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn ok() -> Self {
        CheckReport::default()
    }

    pub fn failed(v: Violation) -> Self {
        CheckReport { first_violation: Some(v), notes: Vec::new() }
    }

    pub fn is_ok(&self) -> bool {
        self.first_violation.is_none()
    }

    /// Keeps the earlier violation, appending notes.
    pub fn merge(mut self, other: CheckReport) -> Self {
        if self.first_violation.is_none() {
            self.first_violation = other.first_violation;
        }
        self.notes.extend(other.notes);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Scans instances in order and stops at the first mismatch.
pub(crate) fn first_mismatch<I>(law: &str, instances: I) -> CheckReport
where
    I: IntoIterator<Item = (Vec<usize>, Vec<Scalar>, Vec<Scalar>)>,
{
    for (idx, lhs, rhs) in instances {
        if lhs != rhs {
            return CheckReport::failed(Violation::new(law, idx, lhs, rhs));
        }
    }
    CheckReport::ok()
}
