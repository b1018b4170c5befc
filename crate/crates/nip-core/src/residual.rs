//! Named relative residuals with pass/fail bookkeeping.

use serde::Serialize;

/// A single checked quantity: a relative operator-norm residual against its
/// tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ResidualReport {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, passed: value <= tolerance }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} {:<40} value={:.3e} tolerance={:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.tolerance
        )
    }
}

/// True when every report passed.
pub fn all_passed(reports: &[ResidualReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_within_tolerance() {
        assert!(ResidualReport::new("a", 1e-9, 1e-8).passed);
        assert!(ResidualReport::new("b", 1e-8, 1e-8).passed);
        assert!(!ResidualReport::new("c", 2e-8, 1e-8).passed);
    }
}
