//! Named pass/fail checks shared by the verification routines.

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: Option<f64>,
    pub certificate: String,
}

impl Check {
    /// Passes iff `residual < tol`.
    pub fn residual(
        name: impl Into<String>,
        residual: f64,
        tol: f64,
        certificate: impl Into<String>,
    ) -> Self {
        Check {
            name: name.into(),
            passed: residual.is_finite() && residual < tol,
            residual: Some(residual),
            certificate: certificate.into(),
        }
    }

    pub fn boolean(name: impl Into<String>, passed: bool, certificate: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            residual: None,
            certificate: certificate.into(),
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
