//! Exact partition laws: the restaurant-process distribution over
//! size-biased partitions, the block-count pmf and its moments, series
//! bounds on the expected block count, and evidence for non-atomic bases.

use crate::error::{Error, Result};
use crate::params::PdParams;
use crate::pochhammer::log_poch_ratio;
use crate::special::{digamma, ln_gamma, log_sum_exp, trigamma, zeta};
use crate::stirling::LogStirlingTable;

/// Normalization drift beyond this signals a corrupted Stirling table.
pub const PMF_DRIFT_TOL: f64 = 1e-6;

fn validate_counts(counts: &[usize]) -> Result<usize> {
    if counts.is_empty() {
        return Err(Error::invalid("partition needs at least one block"));
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::invalid("block counts must be positive"));
    }
    Ok(counts.iter().sum())
}

/// log probability of a size-biased partition with the given block counts:
/// `(b|a)_M / (b)_N * prod_m (1-a)_{n_m - 1}`.
///
/// Valid for the full parameter domain b > -a, including the negative-b
/// pairs used inside fragmentation; the leading numerator and denominator
/// factors share the sign of b and cancel analytically.
pub fn crd_log_prob(counts: &[usize], params: PdParams) -> Result<f64> {
    let n = validate_counts(counts)?;
    let m = counts.len();
    let (a, b) = (params.a(), params.b());
    let lg1ma = ln_gamma(1.0 - a);
    let blocks: f64 = counts
        .iter()
        .map(|&nm| ln_gamma(nm as f64 - a) - lg1ma)
        .sum();
    Ok(log_poch_ratio(b, a, m, n)? + blocks)
}

/// pmf of the block count M for a sample of size n:
/// `p(M) = (b|a)_M / (b)_N * S(n, M)`, M = 1..=n.
///
/// Computed in log space and normalized by log-sum-exp; drift of the raw
/// normalizer beyond [`PMF_DRIFT_TOL`] is reported as an error rather than
/// silently rescaled away.
pub fn partition_size_pmf(n: usize, params: PdParams, table: &LogStirlingTable) -> Result<Vec<f64>> {
    let log_p = partition_size_log_weights(n, params, table)?;
    let z = log_sum_exp(&log_p);
    if !(z.abs() <= PMF_DRIFT_TOL) {
        return Err(Error::Numeric(format!(
            "partition-size pmf normalizer drifted to {z:+e} (|drift| > {PMF_DRIFT_TOL:e}); table corrupt?"
        )));
    }
    Ok(log_p.into_iter().map(|lp| (lp - z).exp()).collect())
}

/// Unnormalized log-weights `log P(M_n = m)` for m = 1..=n, before the
/// normalizer correction applied by [`partition_size_pmf`]. In exact
/// arithmetic these sum to one; the residual drift measures accumulated
/// table and Pochhammer rounding.
pub fn partition_size_log_weights(
    n: usize,
    params: PdParams,
    table: &LogStirlingTable,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("pmf needs n >= 1"));
    }
    if table.a().to_bits() != params.a().to_bits() {
        return Err(Error::invalid(format!(
            "table built for a={}, parameters have a={}",
            table.a(),
            params.a()
        )));
    }
    let (a, b) = (params.a(), params.b());
    let mut log_p = Vec::with_capacity(n);
    for m in 1..=n {
        log_p.push(log_poch_ratio(b, a, m, n)? + table.log_s(n, m)?);
    }
    Ok(log_p)
}

/// `(b + shift)_n / (b + 1)_{n-1}` via log-gamma; requires b + shift > 0 and
/// b + 1 > 0, which the parameter domain guarantees for shift in {a, 2a}.
/// Multiplying by 1/b would give the textbook ratio `(b+shift)_n / (b)_n`;
/// keeping b out makes the moment formulas below finite at b = 0.
fn shifted_growth(b: f64, shift: f64, n: usize) -> f64 {
    let nf = n as f64;
    (ln_gamma(b + shift + nf) - ln_gamma(b + shift) - ln_gamma(b + nf) + ln_gamma(b + 1.0)).exp()
}

/// Expected block count E[M] for a sample of size n.
pub fn expected_m(n: usize, params: PdParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("moments need n >= 1"));
    }
    let (a, b) = (params.a(), params.b());
    if a == 0.0 {
        Ok(b * (digamma(b + n as f64) - digamma(b)))
    } else {
        // (b/a) ((b+a)_n / (b)_n) - b/a, with the b cancelled into the ratio
        Ok(shifted_growth(b, a, n) / a - b / a)
    }
}

/// Variance of the block count M for a sample of size n.
pub fn var_m(n: usize, params: PdParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("moments need n >= 1"));
    }
    let (a, b) = (params.a(), params.b());
    if a == 0.0 {
        let e = b * (digamma(b + n as f64) - digamma(b));
        Ok(e + b * b * (trigamma(b + n as f64) - trigamma(b)))
    } else {
        let s1 = shifted_growth(b, a, n); // (b/a) (b+a)_n/(b)_n = s1/a
        let s2 = shifted_growth(b, 2.0 * a, n);
        Ok((a + b) / (a * a) * s2 - s1 / a - (s1 / a) * (s1 / a))
    }
}

/// Closed-form approximation to E[M], accurate for n, b >> a.
pub fn approx_expected_m(n: usize, params: PdParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("moments need n >= 1"));
    }
    let (a, b) = (params.a(), params.b());
    if b <= 0.0 {
        return Err(Error::invalid(format!("approximation requires b > 0, got {b}")));
    }
    let nf = n as f64;
    if a == 0.0 {
        Ok(b * (nf / b).ln_1p())
    } else {
        Ok(b / a * (1.0 + nf / b).powf(a) * (a * nf / (2.0 * b * (b + nf))).exp() - b / a)
    }
}

/// Closed-form approximation to Var[M], accurate for n, b >> a.
pub fn approx_var_m(n: usize, params: PdParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("moments need n >= 1"));
    }
    let (a, b) = (params.a(), params.b());
    if b <= 0.0 {
        return Err(Error::invalid(format!("approximation requires b > 0, got {b}")));
    }
    let nf = n as f64;
    if a == 0.0 {
        Ok(b * (nf / b).ln_1p())
    } else {
        Ok(b / a * (1.0 + nf / b).powf(2.0 * a) * (a * nf / (b * (b + nf))).exp())
    }
}

/// Exact E[M] when n items are drawn iid from a fixed probability vector q:
/// `sum_k (1 - (1 - q_k)^n)`, evaluated through expm1/ln_1p so tiny atoms
/// do not lose precision. Callers truncate infinite supports; dropping tail
/// atoms only lowers the value.
pub fn expected_m_oracle(q: &[f64], n: usize) -> Result<f64> {
    if q.is_empty() {
        return Err(Error::invalid("probability vector must be nonempty"));
    }
    if n == 0 {
        return Err(Error::invalid("needs n >= 1"));
    }
    let mut total = 0.0;
    for &qk in q {
        if !(qk > 0.0 && qk <= 1.0) {
            return Err(Error::invalid(format!("atom masses must lie in (0, 1], got {qk}")));
        }
        total += qk;
    }
    if total > 1.0 + 1e-9 {
        return Err(Error::invalid(format!("atom masses sum to {total} > 1")));
    }
    Ok(q.iter().map(|&qk| -((n as f64) * (-qk).ln_1p()).exp_m1()).sum())
}

/// Upper bound on E[M] for geometric atom masses `q_k = r^(k-1) (1 - r)`:
/// `log N / log(1/r) + (1 + 2 log(1/r) + log log(1/r)) / log(1/r)`.
pub fn geometric_bound(r: f64, n: usize) -> Result<f64> {
    if !(0.0 < r && r < 1.0) {
        return Err(Error::invalid(format!("geometric ratio must lie in (0, 1), got {r}")));
    }
    if n == 0 {
        return Err(Error::invalid("needs n >= 1"));
    }
    let l = (1.0 / r).ln();
    Ok((n as f64).ln() / l + (1.0 + 2.0 * l + l.ln()) / l)
}

/// Upper bound on E[M] for Dirichlet-series atom masses `q_k = k^-s / zeta(s)`:
/// `3/2 + (s / (s - 1)) (N / zeta(s))^(1/s)`.
pub fn dirichlet_series_bound(s: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("needs n >= 1"));
    }
    let z = zeta(s)?;
    Ok(1.5 + s / (s - 1.0) * (n as f64 / z).powf(1.0 / s))
}

/// log probability of a Dirichlet-multinomial count vector:
/// `1 / (b)_N * prod_k (alpha_k)_{n_k}` with `b = sum alpha`.
pub fn dirichlet_multinomial_log_prob(counts: &[usize], alpha: &[f64]) -> Result<f64> {
    if counts.len() != alpha.len() || alpha.is_empty() {
        return Err(Error::invalid(format!(
            "counts ({}) and alpha ({}) must have equal nonzero length",
            counts.len(),
            alpha.len()
        )));
    }
    if alpha.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::invalid("alpha entries must be positive and finite"));
    }
    let b: f64 = alpha.iter().sum();
    let n: usize = counts.iter().sum();
    let num: f64 = counts
        .iter()
        .zip(alpha)
        .map(|(&nk, &ak)| ln_gamma(ak + nk as f64) - ln_gamma(ak))
        .sum();
    Ok(num - (ln_gamma(b + n as f64) - ln_gamma(b)))
}

/// Evidence of a sample from a non-atomic base: every distinct observed
/// value is one block, so the marginal is the partition probability times
/// the base density at each block's value.
pub fn evidence_nonatomic(counts: &[usize], params: PdParams, log_base: &[f64]) -> Result<f64> {
    if counts.len() != log_base.len() {
        return Err(Error::invalid(format!(
            "{} blocks but {} base log-masses",
            counts.len(),
            log_base.len()
        )));
    }
    if log_base.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("base log-masses must be finite"));
    }
    Ok(crd_log_prob(counts, params)? + log_base.iter().sum::<f64>())
}
