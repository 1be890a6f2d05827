//! Generalized Stirling numbers of type (-1, -a, 0) in log space.
//!
//! `S(n, t)` appears in every partition-size law in this crate. The primary
//! representation is a table of `log S` filled by the linear recursion
//! `S(n+1, t) = S(n, t-1) + (n - t a) S(n, t)`; for large n with moderate t
//! a companion table of adjacent ratios avoids log/exp entirely and stays
//! accurate in double precision where direct tabulation of float ratios
//! breaks down in single precision.

use crate::error::{Error, Result};
use crate::pochhammer::signed_log_pochhammer_inc;
use crate::special::{ln_gamma, log_add_exp, log_binomial, log_diff_exp, log_sum_exp};
use std::io::Write;

pub const DEFAULT_T_MAX: usize = 1000;
pub const DEFAULT_DENSE_T: usize = 64;
pub const DEFAULT_STRIPE: usize = 1;
pub const DEFAULT_MEM_CAP: u64 = 2 << 30;

/// Largest block count accepted by the explicit alternating-sum formula;
/// beyond this the cancellation makes double precision meaningless.
pub const EXPLICIT_M_CAP: usize = 25;

/// One step of the linear recursion in log space:
/// `log S(n+1, t)` from `log S(n, t-1)`, `log S(n, t)` and `c = n - t a`.
///
/// When `S(n, t)` is zero (t > n) the result collapses to `log S(n, t-1)`;
/// whenever `S(n, t)` is nonzero the coefficient is positive, so the
/// log-add is well defined.
#[inline]
fn recursion_step(prev_tm1: f64, prev_t: f64, coeff: f64) -> f64 {
    if prev_t == f64::NEG_INFINITY {
        prev_tm1
    } else {
        debug_assert!(coeff > 0.0);
        log_add_exp(prev_tm1, prev_t + coeff.ln())
    }
}

/// Build configuration for [`LogStirlingTable`].
#[derive(Debug, Clone)]
pub struct LogTableConfig {
    pub a: f64,
    pub n_max: usize,
    pub t_max: usize,
    /// Rows keep all entries with t at or below this threshold.
    pub dense_t: usize,
    /// Above the dense zone only every stripe-th row is retained in full;
    /// skipped entries are reconstructed on demand.
    pub stripe: usize,
    pub mem_cap_bytes: u64,
}

impl LogTableConfig {
    pub fn new(a: f64, n_max: usize) -> LogTableConfig {
        LogTableConfig {
            a,
            n_max,
            t_max: DEFAULT_T_MAX.min(n_max.max(1)),
            dense_t: DEFAULT_DENSE_T,
            stripe: DEFAULT_STRIPE,
            mem_cap_bytes: DEFAULT_MEM_CAP,
        }
    }

    pub fn t_max(mut self, t_max: usize) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn dense_t(mut self, dense_t: usize) -> Self {
        self.dense_t = dense_t;
        self
    }

    pub fn stripe(mut self, stripe: usize) -> Self {
        self.stripe = stripe;
        self
    }

    pub fn mem_cap_bytes(mut self, cap: u64) -> Self {
        self.mem_cap_bytes = cap;
        self
    }
}

/// Triangular table of `log S(n, t)` for 0 <= t <= min(n, t_max),
/// n <= n_max, at a fixed discount a.
///
/// Exact zeros (t > n, or t = 0 with n > 0) are the -inf sentinel rather
/// than omitted coordinates. Memory is estimated before allocation and
/// checked against the configured cap.
#[derive(Debug, Clone)]
pub struct LogStirlingTable {
    a: f64,
    n_max: usize,
    t_max: usize,
    dense_t: usize,
    stripe: usize,
    /// rows[n] holds t = 1..=stored_cap(n) at index t-1.
    rows: Vec<Vec<f64>>,
}

impl LogStirlingTable {
    pub fn build(cfg: &LogTableConfig) -> Result<LogStirlingTable> {
        if !(0.0..1.0).contains(&cfg.a) {
            return Err(Error::invalid(format!("discount a must lie in [0, 1), got {}", cfg.a)));
        }
        if cfg.n_max == 0 || cfg.t_max == 0 {
            return Err(Error::invalid("table needs n_max >= 1 and t_max >= 1"));
        }
        if cfg.stripe == 0 {
            return Err(Error::invalid("stripe must be >= 1"));
        }
        let stored_cap = |n: usize| -> usize {
            let full = n.min(cfg.t_max);
            if cfg.stripe == 1 || n % cfg.stripe == 0 || n == cfg.n_max {
                full
            } else {
                full.min(cfg.dense_t)
            }
        };
        let needed: u64 = (0..=cfg.n_max).map(|n| stored_cap(n) as u64 * 8).sum::<u64>()
            + (cfg.n_max as u64 + 1) * 24;
        if needed > cfg.mem_cap_bytes {
            return Err(Error::ResourceCap { needed, cap: cfg.mem_cap_bytes });
        }

        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(cfg.n_max + 1);
        rows.push(Vec::new()); // n = 0 has only t = 0
        let mut prev: Vec<f64> = Vec::new();
        for n in 1..=cfg.n_max {
            let cap = n.min(cfg.t_max);
            let mut cur = vec![f64::NEG_INFINITY; cap];
            for t in 1..=cap {
                let prev_tm1 = if t == 1 {
                    if n == 1 { 0.0 } else { f64::NEG_INFINITY } // log S(n-1, 0)
                } else {
                    prev.get(t - 2).copied().unwrap_or(f64::NEG_INFINITY)
                };
                let prev_t = prev.get(t - 1).copied().unwrap_or(f64::NEG_INFINITY);
                let coeff = (n - 1) as f64 - t as f64 * cfg.a;
                cur[t - 1] = recursion_step(prev_tm1, prev_t, coeff);
            }
            let keep = stored_cap(n);
            rows.push(cur[..keep].to_vec());
            prev = cur;
        }
        Ok(LogStirlingTable {
            a: cfg.a,
            n_max: cfg.n_max,
            t_max: cfg.t_max,
            dense_t: cfg.dense_t,
            stripe: cfg.stripe,
            rows,
        })
    }

    /// Fully retained table with no striping.
    pub fn dense(a: f64, n_max: usize, t_max: usize) -> Result<LogStirlingTable> {
        LogStirlingTable::build(&LogTableConfig::new(a, n_max).t_max(t_max))
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn dense_t(&self) -> usize {
        self.dense_t
    }

    pub fn stripe(&self) -> usize {
        self.stripe
    }

    fn is_stored(&self, n: usize, t: usize) -> bool {
        t >= 1 && t <= self.rows[n].len()
    }

    /// `log S(n, t)`, reconstructing skipped striped entries by running the
    /// recursion forward from the nearest fully retained row.
    pub fn log_s(&self, n: usize, t: usize) -> Result<f64> {
        if n > self.n_max {
            return Err(self.coverage_err(n, t));
        }
        if t == 0 {
            return Ok(if n == 0 { 0.0 } else { f64::NEG_INFINITY });
        }
        if t > n {
            return Ok(f64::NEG_INFINITY);
        }
        if t > self.t_max {
            return Err(self.coverage_err(n, t));
        }
        if self.is_stored(n, t) {
            return Ok(self.rows[n][t - 1]);
        }
        // nearest fully retained row at or below n
        let n0 = (n / self.stripe) * self.stripe;
        let j = n - n0;
        debug_assert!(j >= 1);
        // seed log S(n0, t') for t' in [t-j ..= t]
        let lo = t.saturating_sub(j);
        let seed = |tp: usize| -> f64 {
            if tp == 0 {
                if n0 == 0 { 0.0 } else { f64::NEG_INFINITY }
            } else if tp > n0 {
                f64::NEG_INFINITY
            } else {
                self.rows[n0][tp - 1]
            }
        };
        let mut win: Vec<f64> = (lo..=t).map(seed).collect();
        for s in 1..=j {
            let src_n = n0 + s - 1;
            // entries below t - (j - s) are no longer needed at this step;
            // sweeping top-down lets each slot read its own old value and its
            // left neighbor in place (the neighbor index stays >= lo)
            let lo_needed = t.saturating_sub(j - s).max(1);
            let mut tp = t;
            loop {
                let idx = tp - lo;
                let prev_t = win[idx];
                let prev_tm1 = if tp == 1 {
                    if src_n == 0 { 0.0 } else { f64::NEG_INFINITY }
                } else {
                    win[idx - 1]
                };
                let coeff = src_n as f64 - tp as f64 * self.a;
                win[idx] = recursion_step(prev_tm1, prev_t, coeff);
                if tp == lo_needed {
                    break;
                }
                tp -= 1;
            }
        }
        Ok(win[t - lo])
    }

    /// Iterates stored coordinates `(n, t, log_s)` in row-major order.
    pub fn stored_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(n, row)| row.iter().enumerate().map(move |(i, &v)| (n, i + 1, v)))
    }

    fn coverage_err(&self, n: usize, t: usize) -> Error {
        Error::TableCoverage { n, t, n_max: self.n_max, t_max: self.t_max }
    }
}

/// Build configuration for [`StirlingRatioTable`].
#[derive(Debug, Clone)]
pub struct RatioTableConfig {
    pub a: f64,
    pub n_max: usize,
    pub t_max: usize,
    pub mem_cap_bytes: u64,
}

impl RatioTableConfig {
    pub fn new(a: f64, n_max: usize) -> RatioTableConfig {
        RatioTableConfig {
            a,
            n_max,
            t_max: DEFAULT_T_MAX.min(n_max.max(1)),
            mem_cap_bytes: DEFAULT_MEM_CAP,
        }
    }

    pub fn t_max(mut self, t_max: usize) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn mem_cap_bytes(mut self, cap: u64) -> Self {
        self.mem_cap_bytes = cap;
        self
    }
}

/// Adjacent-ratio tables `V(n, t) = S(n, t) / S(n, t-1)` for
/// 2 <= t <= min(n, t_max), n <= n_max, with `U(n, t) = S(n+1, t) / S(n, t)`
/// derived on demand (`U(n, 1) = n - a` inline).
///
/// The fill loop is pure arithmetic on doubles; no log or exp calls.
#[derive(Debug, Clone)]
pub struct StirlingRatioTable {
    a: f64,
    n_max: usize,
    t_max: usize,
    /// rows[n] holds V(n, t) for t = 2..=min(n, t_max) at index t-2.
    rows: Vec<Vec<f64>>,
}

impl StirlingRatioTable {
    pub fn build(cfg: &RatioTableConfig) -> Result<StirlingRatioTable> {
        if !(0.0..1.0).contains(&cfg.a) {
            return Err(Error::invalid(format!("discount a must lie in [0, 1), got {}", cfg.a)));
        }
        if cfg.n_max < 2 || cfg.t_max < 2 {
            return Err(Error::invalid("ratio table needs n_max >= 2 and t_max >= 2"));
        }
        let row_len = |n: usize| n.min(cfg.t_max).saturating_sub(1);
        let needed: u64 = (0..=cfg.n_max).map(|n| row_len(n) as u64 * 8).sum::<u64>()
            + (cfg.n_max as u64 + 1) * 24;
        if needed > cfg.mem_cap_bytes {
            return Err(Error::ResourceCap { needed, cap: cfg.mem_cap_bytes });
        }
        let a = cfg.a;
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(cfg.n_max + 1);
        rows.push(Vec::new()); // n = 0
        rows.push(Vec::new()); // n = 1
        for n in 2..=cfg.n_max {
            let pn = (n - 1) as f64;
            let prev: &Vec<f64> = &rows[n - 1];
            // U(n-1, t) from the previous row
            let u_prev = |t: usize| -> f64 {
                if t == 1 {
                    pn - a
                } else {
                    1.0 / prev[t - 2] + (pn - t as f64 * a)
                }
            };
            let cap = n.min(cfg.t_max);
            let mut cur = Vec::with_capacity(cap - 1);
            for t in 2..=cap {
                let v = if t == n {
                    1.0 / u_prev(n - 1)
                } else {
                    (1.0 + (pn - t as f64 * a) * prev[t - 2]) / u_prev(t - 1)
                };
                cur.push(v);
            }
            rows.push(cur);
        }
        Ok(StirlingRatioTable { a, n_max: cfg.n_max, t_max: cfg.t_max, rows })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    /// `V(n, t) = S(n, t) / S(n, t-1)` for 2 <= t <= min(n, t_max).
    pub fn v(&self, n: usize, t: usize) -> Result<f64> {
        if t < 2 {
            return Err(Error::invalid(format!("V(n, t) is defined for t >= 2, got t={t}")));
        }
        if n > self.n_max || t > self.t_max || t > n {
            return Err(Error::TableCoverage { n, t, n_max: self.n_max, t_max: self.t_max });
        }
        Ok(self.rows[n][t - 2])
    }

    /// `U(n, t) = S(n+1, t) / S(n, t)` for 1 <= t <= min(n, t_max).
    pub fn u(&self, n: usize, t: usize) -> Result<f64> {
        if t == 0 {
            return Err(Error::invalid("U(n, t) is defined for t >= 1"));
        }
        if t == 1 {
            if n == 0 || n > self.n_max {
                return Err(Error::TableCoverage { n, t, n_max: self.n_max, t_max: self.t_max });
            }
            return Ok(n as f64 - self.a);
        }
        let v = self.v(n, t)?;
        Ok(1.0 / v + (n as f64 - t as f64 * self.a))
    }

    pub fn stored_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(n, row)| row.iter().enumerate().map(move |(i, &v)| (n, i + 2, v)))
    }
}

/// log of `S(n, m)` by the explicit alternating binomial sum, for a > 0.
/// The outer alternating signs cancel catastrophically as m grows, so m is
/// capped at [`EXPLICIT_M_CAP`]; within the cap the signed log-magnitude
/// accumulation keeps full double accuracy.
pub fn log_stirling_explicit(n: usize, m: usize, a: f64) -> Result<f64> {
    if !(0.0 < a && a < 1.0) {
        return Err(Error::invalid(format!(
            "explicit formula requires 0 < a < 1, got {a} (use the table for a = 0)"
        )));
    }
    if m == 0 || m > n {
        return Err(Error::invalid(format!("requires 1 <= m <= n, got n={n}, m={m}")));
    }
    if m > EXPLICIT_M_CAP {
        return Err(Error::invalid(format!(
            "explicit formula unstable for m > {EXPLICIT_M_CAP}, got m={m}"
        )));
    }
    // sum_{j=1}^{m} C(m, j) (-1)^j prod_{h=0}^{n-1} (h - a j); j = 0 vanishes
    let mut pos = Vec::with_capacity(m);
    let mut neg = Vec::with_capacity(m);
    for j in 1..=m {
        let prod = signed_log_pochhammer_inc(-a * j as f64, 1.0, n)?;
        if prod.sign == 0 {
            continue;
        }
        let sign = if j % 2 == 0 { prod.sign } else { -prod.sign };
        let log_mag = log_binomial(m, j) + prod.log_abs;
        if sign > 0 {
            pos.push(log_mag);
        } else {
            neg.push(log_mag);
        }
    }
    let log_pos = log_sum_exp(&pos);
    let log_neg = log_sum_exp(&neg);
    let log_sum = log_diff_exp(log_pos, log_neg).map_err(|_| {
        Error::Numeric(format!(
            "alternating sum for S({n}, {m}) at a={a} lost all significance"
        ))
    })?;
    Ok(log_sum - ln_gamma(m as f64 + 1.0) - m as f64 * a.ln())
}

/// First-order asymptotic for `log S(n, m)` at large n, together with the
/// scale `m / n^a` of its relative error; values with scale near or above
/// one should be treated as out of the formula's domain.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticStirling {
    pub log_value: f64,
    pub accuracy_scale: f64,
}

pub fn log_stirling_asymptotic(n: usize, m: usize, a: f64) -> Result<AsymptoticStirling> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::invalid(format!("discount a must lie in [0, 1), got {a}")));
    }
    if m == 0 || m > n {
        return Err(Error::invalid(format!("requires 1 <= m <= n, got n={n}, m={m}")));
    }
    if a == 0.0 && m > 1 {
        return Err(Error::invalid("asymptotic form needs a > 0 unless m = 1"));
    }
    let nf = n as f64;
    let mf = m as f64;
    let log_a_term = if m == 1 { 0.0 } else { (mf - 1.0) * a.ln() };
    let log_value = ln_gamma(nf) - ln_gamma(1.0 - a) - ln_gamma(mf) - log_a_term - a * nf.ln();
    Ok(AsymptoticStirling { log_value, accuracy_scale: mf / nf.powf(a) })
}

/// Evaluates the multiplicative decomposition
/// `S(n, m) = sum_{n'} C(n, n') / C(m, k) * S(n', k) * S(n - n', m - k)`
/// in log space; agreement with the directly tabulated `log S(n, m)` is a
/// strong structural check on a table.
pub fn mult_recursion_check(table: &LogStirlingTable, n: usize, m: usize, split_k: usize) -> Result<f64> {
    if m < 2 || m > n {
        return Err(Error::invalid(format!("requires 2 <= m <= n, got n={n}, m={m}")));
    }
    if split_k == 0 || split_k >= m {
        return Err(Error::invalid(format!("split must satisfy 0 < k < m, got k={split_k}")));
    }
    let mut terms = Vec::with_capacity(n - m + 1);
    let log_cmk = log_binomial(m, split_k);
    for np in split_k..=(n - (m - split_k)) {
        let term = log_binomial(n, np) - log_cmk
            + table.log_s(np, split_k)?
            + table.log_s(n - np, m - split_k)?;
        terms.push(term);
    }
    Ok(log_sum_exp(&terms))
}

/// Writes stored log-table entries as CSV (`n,t,log_S`), 17 significant
/// digits so values round-trip bit-exactly.
pub fn write_log_table_csv<W: Write>(table: &LogStirlingTable, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "n,t,log_S")?;
    for (n, t, v) in table.stored_entries() {
        writeln!(w, "{n},{t},{v:.16e}")?;
    }
    Ok(())
}

/// Writes ratio-table entries as CSV (`n,t,V`), 17 significant digits.
pub fn write_ratio_table_csv<W: Write>(table: &StirlingRatioTable, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "n,t,V")?;
    for (n, t, v) in table.stored_entries() {
        writeln!(w, "{n},{t},{v:.16e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(x: f64, y: f64) -> f64 {
        ((x - y) / y).abs()
    }

    /// Unsigned Stirling numbers of the first kind, exact in u64 for n <= 20.
    fn stirling_first_kind(n_max: usize) -> Vec<Vec<u64>> {
        let mut s = vec![vec![0u64; n_max + 1]; n_max + 1];
        s[0][0] = 1;
        for n in 0..n_max {
            for k in 1..=n + 1 {
                s[n + 1][k] = s[n][k - 1] + n as u64 * s[n][k];
            }
        }
        s
    }

    #[test]
    fn log_table_small_exact_values() {
        let t = LogStirlingTable::dense(0.0, 6, 6).unwrap();
        assert!((t.log_s(3, 2).unwrap().exp() - 3.0).abs() < 1e-12);
        assert!((t.log_s(4, 2).unwrap().exp() - 11.0).abs() < 1e-11);
        let t5 = LogStirlingTable::dense(0.5, 6, 6).unwrap();
        assert!((t5.log_s(3, 2).unwrap().exp() - 1.5).abs() < 1e-12);
        assert!((t5.log_s(3, 1).unwrap().exp() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn log_table_boundaries() {
        let t = LogStirlingTable::dense(0.3, 8, 8).unwrap();
        assert_eq!(t.log_s(0, 0).unwrap(), 0.0);
        assert_eq!(t.log_s(5, 0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(t.log_s(4, 7).unwrap(), f64::NEG_INFINITY);
        for n in 1..=8 {
            assert!(t.log_s(n, n).unwrap().abs() < 1e-12, "S(n, n) = 1");
        }
    }

    #[test]
    fn log_table_matches_integer_stirling_at_a0() {
        let exact = stirling_first_kind(12);
        let t = LogStirlingTable::dense(0.0, 12, 12).unwrap();
        for n in 1..=12usize {
            for k in 1..=n {
                let got = t.log_s(n, k).unwrap();
                let want = (exact[n][k] as f64).ln();
                assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()), "S({n}, {k})");
            }
        }
    }

    #[test]
    fn first_column_is_gamma_ratio() {
        // S(n, 1) = Gamma(n - a) / Gamma(1 - a)
        for &a in &[0.0, 0.3, 0.5, 0.9] {
            let t = LogStirlingTable::dense(a, 40, 4).unwrap();
            for n in 1..=40usize {
                let want = ln_gamma(n as f64 - a) - ln_gamma(1.0 - a);
                assert!((t.log_s(n, 1).unwrap() - want).abs() < 1e-10 * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn striped_table_reproduces_dense() {
        let dense = LogStirlingTable::dense(0.5, 60, 60).unwrap();
        let cfg = LogTableConfig::new(0.5, 60).t_max(60).dense_t(8).stripe(7);
        let striped = LogStirlingTable::build(&cfg).unwrap();
        for n in 1..=60usize {
            for t in 1..=n {
                let d = dense.log_s(n, t).unwrap();
                let s = striped.log_s(n, t).unwrap();
                if striped.is_stored(n, t) {
                    assert_eq!(d.to_bits(), s.to_bits(), "stored ({n}, {t})");
                } else {
                    assert!(
                        (d - s).abs() <= 1e-10 * (1.0 + d.abs()),
                        "reconstructed ({n}, {t}): {s} vs {d}"
                    );
                }
            }
        }
    }

    #[test]
    fn memory_cap_is_enforced() {
        let cfg = LogTableConfig::new(0.5, 4000).t_max(4000).mem_cap_bytes(100_000);
        assert!(matches!(LogStirlingTable::build(&cfg), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn coverage_errors() {
        let t = LogStirlingTable::dense(0.5, 10, 5).unwrap();
        assert!(matches!(t.log_s(11, 2), Err(Error::TableCoverage { .. })));
        assert!(matches!(t.log_s(10, 6), Err(Error::TableCoverage { .. })));
        assert!(t.log_s(10, 5).is_ok());
    }

    #[test]
    fn ratio_table_small_values() {
        let r = StirlingRatioTable::build(&RatioTableConfig::new(0.5, 10)).unwrap();
        // V(2, 2) = 1 / U(1, 1) = 1 / (1 - a)
        assert!((r.v(2, 2).unwrap() - 2.0).abs() < 1e-14);
        assert!((r.u(3, 1).unwrap() - 2.5).abs() < 1e-14);
        assert!(r.v(10, 1).is_err());
        assert!(r.v(11, 2).is_err());
    }

    #[test]
    fn ratio_table_matches_log_table() {
        for &a in &[0.0, 0.5, 0.9] {
            let log_t = LogStirlingTable::dense(a, 60, 60).unwrap();
            let r = StirlingRatioTable::build(&RatioTableConfig::new(a, 60).t_max(60)).unwrap();
            for n in 2..=60usize {
                for t in 2..=n {
                    let want = (log_t.log_s(n, t).unwrap() - log_t.log_s(n, t - 1).unwrap()).exp();
                    assert!(
                        rel(r.v(n, t).unwrap(), want) < 1e-10,
                        "V({n}, {t}) at a={a}"
                    );
                }
                // U against the log table: S(n+1, t) / S(n, t)
                if n < 60 {
                    for t in 1..=n.min(59) {
                        let want = (log_t.log_s(n + 1, t).unwrap() - log_t.log_s(n, t).unwrap()).exp();
                        assert!(rel(r.u(n, t).unwrap(), want) < 1e-10, "U({n}, {t}) at a={a}");
                    }
                }
            }
        }
    }

    #[test]
    fn explicit_matches_table() {
        for &a in &[0.3, 0.5, 0.9] {
            let t = LogStirlingTable::dense(a, 12, 12).unwrap();
            for n in 1..=12usize {
                for m in 1..=n.min(6) {
                    let got = log_stirling_explicit(n, m, a).unwrap();
                    let want = t.log_s(n, m).unwrap();
                    assert!(
                        (got - want).abs() < 1e-9 * (1.0 + want.abs()),
                        "explicit S({n}, {m}) at a={a}: {got} vs {want}"
                    );
                }
            }
        }
        // frozen spot value: S(3, 2) at a = 0.5 is 1.5
        assert!((log_stirling_explicit(3, 2, 0.5).unwrap().exp() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn explicit_guards() {
        assert!(log_stirling_explicit(30, 26, 0.5).is_err());
        assert!(log_stirling_explicit(5, 2, 0.0).is_err());
        assert!(log_stirling_explicit(3, 4, 0.5).is_err());
    }

    #[test]
    fn asymptotic_m1_is_exact_form() {
        // m = 1 reduces to log(Gamma(n) / (Gamma(1-a) n^a))
        let got = log_stirling_asymptotic(50, 1, 0.5).unwrap();
        let want = ln_gamma(50.0) - ln_gamma(0.5) - 0.5 * 50.0_f64.ln();
        assert!((got.log_value - want).abs() < 1e-12);
        assert!(got.accuracy_scale < 1.0);
    }

    #[test]
    fn asymptotic_flags_out_of_domain() {
        let r = log_stirling_asymptotic(10, 9, 0.5).unwrap();
        assert!(r.log_value.is_finite());
        assert!(r.accuracy_scale > 1.0, "m >> n^a must be flagged");
        assert!(log_stirling_asymptotic(10, 2, 0.0).is_err());
    }

    #[test]
    fn mult_recursion_identities() {
        let t = LogStirlingTable::dense(0.0, 8, 8).unwrap();
        // S(4, 2) = 11 at a = 0
        let got = mult_recursion_check(&t, 4, 2, 1).unwrap();
        assert!((got.exp() - 11.0).abs() < 1e-11);
        // n = m collapses to a single unit term
        let t5 = LogStirlingTable::dense(0.5, 8, 8).unwrap();
        let got = mult_recursion_check(&t5, 5, 5, 2).unwrap();
        assert!(got.abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let t = LogStirlingTable::dense(0.5, 5, 5).unwrap();
        let mut buf = Vec::new();
        write_log_table_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "n,t,log_S");
        for line in lines {
            let parts: Vec<&str> = line.split(',').collect();
            let (n, t_idx): (usize, usize) = (parts[0].parse().unwrap(), parts[1].parse().unwrap());
            let v: f64 = parts[2].parse().unwrap();
            assert_eq!(v.to_bits(), t.log_s(n, t_idx).unwrap().to_bits(), "({n}, {t_idx})");
        }
    }
}
