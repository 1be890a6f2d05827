//! Process parameters: discount a and concentration b.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Parameter pair (a, b) of the two-parameter Poisson-Dirichlet process:
/// discount 0 <= a < 1 and concentration b > -a.
///
/// a = 0 recovers the Dirichlet process. The domain deliberately admits
/// negative b: the fragmentation and coagulation constructions run the
/// restaurant process with (a1, -a1*a2), which satisfies b > -a whenever
/// a2 < 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdParams {
    a: f64,
    b: f64,
}

impl PdParams {
    pub fn new(a: f64, b: f64) -> Result<PdParams> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!("parameters must be finite, got a={a}, b={b}")));
        }
        if !(0.0..1.0).contains(&a) {
            return Err(Error::invalid(format!("discount a must lie in [0, 1), got {a}")));
        }
        if b <= -a {
            return Err(Error::invalid(format!("concentration b must exceed -a = {}, got {b}", -a)));
        }
        Ok(PdParams { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_dirichlet(&self) -> bool {
        self.a == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid_pairs() {
        assert!(PdParams::new(0.0, 1.0).is_ok());
        assert!(PdParams::new(0.5, 1.0).is_ok());
        assert!(PdParams::new(0.9, -0.5).is_ok());
        // fragmentation-style pair (a1, -a1*a2)
        assert!(PdParams::new(0.5, -0.5 * 0.8).is_ok());
        // b = 0 is valid whenever a > 0
        assert!(PdParams::new(0.3, 0.0).is_ok());
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(PdParams::new(1.0, 1.0).is_err());
        assert!(PdParams::new(-0.1, 1.0).is_err());
        assert!(PdParams::new(0.5, -0.5).is_err());
        assert!(PdParams::new(0.0, 0.0).is_err());
        assert!(PdParams::new(f64::NAN, 1.0).is_err());
        assert!(PdParams::new(0.2, f64::INFINITY).is_err());
    }
}
