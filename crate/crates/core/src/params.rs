use crate::error::{Error, Result};

/// Validated (lambda, nu) parameter pair.
///
/// Admissible region: lambda > 0 with nu > 0, or 0 < lambda < 1 with nu = 0
/// (the geometric boundary case).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmpParams {
    lambda: f64,
    nu: f64,
}

impl CmpParams {
    pub fn new(lambda: f64, nu: f64) -> Result<Self> {
        if !lambda.is_finite() || !nu.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "lambda and nu must be finite, got lambda={lambda}, nu={nu}"
            )));
        }
        let admissible = (lambda > 0.0 && nu > 0.0) || (lambda > 0.0 && lambda < 1.0 && nu == 0.0);
        if !admissible {
            return Err(Error::InvalidParameters(format!(
                "(lambda={lambda}, nu={nu}) is outside the admissible region \
                 (lambda>0, nu>0) or (0<lambda<1, nu=0)"
            )));
        }
        Ok(CmpParams { lambda, nu })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// True on the geometric boundary nu = 0.
    pub fn is_geometric(&self) -> bool {
        self.nu == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility() {
        assert!(CmpParams::new(1.0, 1.0).is_ok());
        assert!(CmpParams::new(0.5, 0.0).is_ok());
        assert!(CmpParams::new(1.5, 0.0).is_err()); // nu=0 needs lambda<1
        assert!(CmpParams::new(1.0, 0.0).is_err());
        assert!(CmpParams::new(-1.0, 1.0).is_err());
        assert!(CmpParams::new(0.0, 1.0).is_err());
        assert!(CmpParams::new(1.0, -0.5).is_err());
        assert!(CmpParams::new(f64::NAN, 1.0).is_err());
        assert!(CmpParams::new(1.0, f64::INFINITY).is_err());
    }
}
