use serde::Serialize;

/// Worst-case residual of a sampled check against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ResidualReport {
    /// `passed` iff every residual is finite and at most `tolerance`.
    pub fn from_residuals(residuals: impl IntoIterator<Item = f64>, tolerance: f64) -> Self {
        let mut samples = 0;
        let mut max_residual: f64 = 0.0;
        let mut finite = true;
        for r in residuals {
            samples += 1;
            finite &= r.is_finite();
            max_residual = if r.is_nan() {
                f64::NAN
            } else {
                max_residual.max(r)
            };
        }
        Self {
            samples,
            max_residual,
            tolerance,
            passed: finite && max_residual <= tolerance,
        }
    }
}
