//! Rising factorials (Pochhammer symbols) in log space.
//!
//! `(x)_n = x (x+1) ... (x+n-1)` and the incremented form
//! `(x|y)_n = x (x+y) ... (x+(n-1)y)`, with `(x|0)_n = x^n`.
//! Evaluation goes through log-gamma differences so that n around 1e5
//! stays far from overflow.

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// A real number carried as (sign, log of absolute value).
/// `sign == 0` encodes exact zero, with `log_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: i8,
    pub log_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0, log_abs: f64::NEG_INFINITY };
    pub const ONE: SignedLog = SignedLog { sign: 1, log_abs: 0.0 };

    pub fn from_value(v: f64) -> SignedLog {
        if v == 0.0 {
            SignedLog::ZERO
        } else {
            SignedLog { sign: if v > 0.0 { 1 } else { -1 }, log_abs: v.abs().ln() }
        }
    }

    pub fn value(self) -> f64 {
        self.sign as f64 * self.log_abs.exp()
    }

    pub fn mul(self, other: SignedLog) -> SignedLog {
        if self.sign == 0 || other.sign == 0 {
            return SignedLog::ZERO;
        }
        SignedLog { sign: self.sign * other.sign, log_abs: self.log_abs + other.log_abs }
    }
}

/// log of `(x)_n`; requires every factor `x + i` to be positive.
///
/// A zero factor reports `DegeneratePochhammer`; a negative factor is a
/// domain error directing callers to the signed variant.
pub fn log_pochhammer(x: f64, n: usize) -> Result<f64> {
    log_pochhammer_inc(x, 1.0, n)
}

/// log of `(x|y)_n`; requires every factor `x + i y` to be positive.
pub fn log_pochhammer_inc(x: f64, y: f64, n: usize) -> Result<f64> {
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::invalid(format!("pochhammer arguments must be finite, got x={x}, y={y}")));
    }
    if n == 0 {
        return Ok(0.0);
    }
    if y == 0.0 {
        if x == 0.0 {
            return Err(Error::DegeneratePochhammer { x, step: y, n, index: 0 });
        }
        if x < 0.0 {
            return Err(Error::invalid(format!(
                "pochhammer factor x={x} negative with step 0; use the signed variant"
            )));
        }
        return Ok(n as f64 * x.ln());
    }
    if x > 0.0 && y > 0.0 {
        // (x|y)_n = y^n Gamma(x/y + n) / Gamma(x/y)
        let r = x / y;
        return Ok(n as f64 * y.ln() + ln_gamma(r + n as f64) - ln_gamma(r));
    }
    // Mixed signs: factors may still all be positive, walk them directly.
    let mut acc = 0.0;
    for i in 0..n {
        let f = x + i as f64 * y;
        if f == 0.0 {
            return Err(Error::DegeneratePochhammer { x, step: y, n, index: i });
        }
        if f < 0.0 {
            return Err(Error::invalid(format!(
                "pochhammer factor {f} at index {i} of ({x} | {y})_{n} is negative; use the signed variant"
            )));
        }
        acc += f.ln();
    }
    Ok(acc)
}

/// Signed log of `(x|y)_n`. Negative factors flip the sign; a zero factor
/// makes the whole product exactly zero (sign 0), which is a valid value
/// here rather than an error.
pub fn signed_log_pochhammer_inc(x: f64, y: f64, n: usize) -> Result<SignedLog> {
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::invalid(format!("pochhammer arguments must be finite, got x={x}, y={y}")));
    }
    let mut sign = 1i8;
    let mut log_abs = 0.0;
    for i in 0..n {
        let f = x + i as f64 * y;
        if f == 0.0 {
            return Ok(SignedLog::ZERO);
        }
        if f < 0.0 {
            sign = -sign;
        }
        log_abs += f.abs().ln();
    }
    // Once factors turn positive they stay positive for y >= 0, so the scan
    // could stop tracking signs early; n stays small where this is used.
    Ok(SignedLog { sign, log_abs })
}

/// log of the ratio `(b|a)_m / (b)_n` for m, n >= 1, with the leading factor
/// `b` cancelled analytically.
///
/// Under the parameter constraint b > -a every remaining factor is positive,
/// so the ratio is well defined even when b <= 0 (the fragmentation /
/// coagulation constructions evaluate it at b = -a1*a2).
pub fn log_poch_ratio(b: f64, a: f64, m: usize, n: usize) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::invalid(format!(
            "log_poch_ratio requires m >= 1 and n >= 1, got m={m}, n={n}"
        )));
    }
    // numerator: prod_{i=1}^{m-1} (b + i a)
    let num = if m == 1 {
        0.0
    } else if a == 0.0 {
        if b <= 0.0 {
            return Err(Error::invalid(format!("log_poch_ratio with a=0 requires b > 0, got b={b}")));
        }
        (m - 1) as f64 * b.ln()
    } else {
        // b + i a = a (b/a + i); b/a + 1 > 0 holds whenever b > -a
        log_pochhammer_inc(b + a, a, m - 1)?
    };
    // denominator: prod_{i=1}^{n-1} (b + i); b + 1 > 0 whenever b > -1
    let den = log_pochhammer_inc(b + 1.0, 1.0, n - 1)?;
    Ok(num - den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_pochhammer_values() {
        // (1)_3 = 6
        assert!((log_pochhammer(1.0, 3).unwrap() - 6.0_f64.ln()).abs() < 1e-13);
        // (x)_0 = 1
        assert_eq!(log_pochhammer(3.7, 0).unwrap(), 0.0);
        // (0.5)_2 = 0.75
        assert!((log_pochhammer(0.5, 2).unwrap() - 0.75_f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn incremented_pochhammer_values() {
        // (1 | 1)_3 = 6
        assert!((log_pochhammer_inc(1.0, 1.0, 3).unwrap() - 6.0_f64.ln()).abs() < 1e-13);
        // (1 | 0.5)_2 = 1 * 1.5
        assert!((log_pochhammer_inc(1.0, 0.5, 2).unwrap() - 1.5_f64.ln()).abs() < 1e-13);
        // (x | 0)_n = x^n
        assert!((log_pochhammer_inc(2.0, 0.0, 5).unwrap() - 5.0 * 2.0_f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn degenerate_and_domain_errors() {
        assert!(matches!(
            log_pochhammer(0.0, 2),
            Err(Error::DegeneratePochhammer { .. })
        ));
        assert!(matches!(
            log_pochhammer_inc(0.0, 0.5, 4),
            Err(Error::DegeneratePochhammer { index: 0, .. })
        ));
        // negative factor encountered first is a domain error, not degeneracy
        assert!(matches!(log_pochhammer_inc(-1.0, 0.5, 4), Err(Error::InvalidConfig(_))));
        assert!(matches!(log_pochhammer(-0.5, 2), Err(Error::InvalidConfig(_))));
        assert!(matches!(log_pochhammer_inc(-1.0, 0.0, 2), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn signed_variant_tracks_signs_and_zero() {
        // (-0.5 | 1)_3 = (-0.5)(0.5)(1.5) = -0.375
        let s = signed_log_pochhammer_inc(-0.5, 1.0, 3).unwrap();
        assert_eq!(s.sign, -1);
        assert!((s.log_abs - 0.375_f64.ln()).abs() < 1e-13);
        // zero factor collapses to exact zero
        let z = signed_log_pochhammer_inc(-1.0, 0.5, 4).unwrap();
        assert_eq!(z, SignedLog::ZERO);
        // (-1.5 | 1)_3 = (-1.5)(-0.5)(0.5) = +0.375
        let p = signed_log_pochhammer_inc(-1.5, 1.0, 3).unwrap();
        assert_eq!(p.sign, 1);
        assert!((p.log_abs - 0.375_f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn gamma_path_matches_direct_product() {
        // cross-check the Gamma fast path against the naive product
        let cases = [(0.7, 0.3, 9usize), (2.0, 1.0, 15), (0.05, 2.5, 6), (3.0, 0.0, 7)];
        for (x, y, n) in cases {
            let direct: f64 = (0..n).map(|i| (x + i as f64 * y).ln()).sum();
            let fast = log_pochhammer_inc(x, y, n).unwrap();
            assert!(
                (fast - direct).abs() < 1e-11 * (1.0 + direct.abs()),
                "({x}|{y})_{n}: {fast} vs {direct}"
            );
        }
    }

    #[test]
    fn ratio_cancels_leading_factor() {
        // (b|a)_M / (b)_N at a=0.5, b=1, M=2, N=3: (1*1.5)/(1*2*3) = 0.25
        let r = log_poch_ratio(1.0, 0.5, 2, 3).unwrap();
        assert!((r - 0.25_f64.ln()).abs() < 1e-13);
        // negative b: b = -0.25 = -(a1 a2) with a = a1 = 0.5
        // (b|a)_2 / (b)_2 = (-0.25)(0.25) / (-0.25)(0.75) = 1/3
        let r = log_poch_ratio(-0.25, 0.5, 2, 2).unwrap();
        assert!((r - (1.0f64 / 3.0).ln()).abs() < 1e-13);
        // b = 0 with a > 0: (0|a)_M / (0)_N finite by cancellation
        let r = log_poch_ratio(0.0, 0.5, 2, 2).unwrap();
        assert!((r - 0.5_f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn large_n_no_overflow() {
        let r = log_poch_ratio(10.0, 0.5, 1000, 100_000).unwrap();
        assert!(r.is_finite());
    }
}
