//! Named pass/fail verdicts with margins, collected from every engine.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A sufficient condition whose own premise does not hold.
    Inconclusive,
}

/// Whether a failure should surface as a failed run. Sufficient conditions
/// are advisory: their failure says nothing about the property itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Required,
    Advisory,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionEntry {
    pub name: String,
    pub status: Status,
    pub severity: Severity,
    /// Smallest slack across `slacks`; its sign carries the verdict.
    pub margin: f64,
    pub slacks: Vec<f64>,
    pub notes: Vec<String>,
}

impl ConditionEntry {
    /// Entry whose verdict is decided by `pass(slack)` on every slack.
    pub fn from_slacks(
        name: impl Into<String>,
        severity: Severity,
        slacks: Vec<f64>,
        pass: impl Fn(f64) -> bool,
    ) -> Self {
        let margin = slacks.iter().copied().fold(f64::INFINITY, f64::min);
        let status = if slacks.iter().all(|&s| pass(s)) { Status::Pass } else { Status::Fail };
        ConditionEntry { name: name.into(), status, severity, margin, slacks, notes: Vec::new() }
    }

    /// Strict inequality: every slack must be > 0.
    pub fn strict(name: impl Into<String>, severity: Severity, slacks: Vec<f64>) -> Self {
        Self::from_slacks(name, severity, slacks, |s| s > 0.0)
    }

    /// Weak inequality: every slack must be ≥ 0.
    pub fn weak(name: impl Into<String>, severity: Severity, slacks: Vec<f64>) -> Self {
        Self::from_slacks(name, severity, slacks, |s| s >= 0.0)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConditionReport {
    pub entries: Vec<ConditionEntry>,
}

impl ConditionReport {
    pub fn push(&mut self, entry: ConditionEntry) {
        self.entries.push(entry);
    }

    pub fn extend(&mut self, other: ConditionReport) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, name: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn has_required_failures(&self) -> bool {
        self.entries.iter().any(|e| e.severity == Severity::Required && e.status != Status::Pass)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_vs_weak_at_zero() {
        assert_eq!(ConditionEntry::strict("a", Severity::Advisory, vec![1.0, 0.0]).status, Status::Fail);
        let e = ConditionEntry::weak("a", Severity::Advisory, vec![1.0, 0.0]);
        assert_eq!((e.status, e.margin), (Status::Pass, 0.0));
    }

    #[test]
    fn only_required_failures_count() {
        let mut r = ConditionReport::default();
        r.push(ConditionEntry::weak("adv", Severity::Advisory, vec![-1.0]));
        assert!(!r.has_required_failures());
        r.push(ConditionEntry::weak("req", Severity::Required, vec![-1.0]));
        assert!(r.has_required_failures());
    }
}
