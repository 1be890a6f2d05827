//! Discrete base distributions: evidence of a sample when distinct blocks
//! can share values (tracked by multiplicities or per-item indicators),
//! Gibbs updates for multiplicities, and the prior moments of the sampled
//! measure over a finite support.

use rand::{Rng, RngExt};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::PdParams;
use crate::partition::{IndicatorVector, MultiplicityVector};
use crate::pochhammer::log_poch_ratio;
use crate::samplers::BaseDistribution;
use crate::special::log_binomial;
use crate::stirling::{LogStirlingTable, StirlingRatioTable};

/// Finite discrete base: labeled atoms with masses theta.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteBase {
    labels: Vec<String>,
    theta: Vec<f64>,
}

fn validate_theta(theta: &[f64]) -> Result<()> {
    if theta.is_empty() {
        return Err(Error::invalid("theta must be nonempty"));
    }
    if theta.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::invalid("theta entries must be positive and finite"));
    }
    let total: f64 = theta.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("theta sums to {total}, expected 1")));
    }
    Ok(())
}

impl DiscreteBase {
    pub fn new(theta: Vec<f64>) -> Result<DiscreteBase> {
        let labels = (1..=theta.len()).map(|k| k.to_string()).collect();
        DiscreteBase::with_labels(labels, theta)
    }

    pub fn with_labels(labels: Vec<String>, theta: Vec<f64>) -> Result<DiscreteBase> {
        validate_theta(&theta)?;
        if labels.len() != theta.len() {
            return Err(Error::invalid(format!(
                "{} labels for {} masses",
                labels.len(),
                theta.len()
            )));
        }
        Ok(DiscreteBase { labels, theta })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl BaseDistribution for DiscreteBase {
    /// 0-based index into the support.
    type Value = usize;

    fn sample_value(&self, rng: &mut dyn rand::Rng) -> usize {
        let mut u: f64 = rng.random();
        for (k, &t) in self.theta.iter().enumerate() {
            if u < t {
                return k;
            }
            u -= t;
        }
        self.theta.len() - 1
    }

    fn log_mass(&self, value: &usize) -> Option<f64> {
        self.theta.get(*value).map(|t| t.ln())
    }

    fn is_discrete(&self) -> bool {
        true
    }
}

/// log joint probability of an observed sample and a multiplicity vector:
/// `(b|a)_T / (b)_N * prod_m theta_m^{t_m} S(n_m, t_m)` where T = sum t_m.
/// `log_theta[m]` is the log base mass of block m's value.
pub fn evidence_multiplicities(
    counts: &[usize],
    t: &[usize],
    log_theta: &[f64],
    params: PdParams,
    table: &LogStirlingTable,
) -> Result<f64> {
    let mult = MultiplicityVector::new(t.to_vec(), counts)?;
    if log_theta.len() != counts.len() {
        return Err(Error::invalid(format!(
            "{} blocks but {} base log-masses",
            counts.len(),
            log_theta.len()
        )));
    }
    if log_theta.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("base log-masses must be finite"));
    }
    if table.a().to_bits() != params.a().to_bits() {
        return Err(Error::invalid(format!(
            "table built for a={}, parameters have a={}",
            table.a(),
            params.a()
        )));
    }
    let n: usize = counts.iter().sum();
    let total_t = mult.total();
    let mut log_p = log_poch_ratio(params.b(), params.a(), total_t, n)?;
    for ((&nm, &tm), &lt) in counts.iter().zip(mult.values()).zip(log_theta) {
        log_p += tm as f64 * lt + table.log_s(nm, tm)?;
    }
    Ok(log_p)
}

/// log joint probability of a sample and per-item table indicators: the
/// multiplicity value spread uniformly over the C(n_m, t_m) indicator
/// patterns per block.
pub fn evidence_indicators(
    counts: &[usize],
    indicators: &[IndicatorVector],
    log_theta: &[f64],
    params: PdParams,
    table: &LogStirlingTable,
) -> Result<f64> {
    if indicators.len() != counts.len() {
        return Err(Error::invalid(format!(
            "{} blocks but {} indicator vectors",
            counts.len(),
            indicators.len()
        )));
    }
    let mut t = Vec::with_capacity(counts.len());
    for (m, (ind, &nm)) in indicators.iter().zip(counts).enumerate() {
        if ind.values().len() != nm {
            return Err(Error::invalid(format!(
                "indicator vector {} has length {}, block has {nm} items",
                m + 1,
                ind.values().len()
            )));
        }
        t.push(ind.multiplicity());
    }
    let mut log_p = evidence_multiplicities(counts, &t, log_theta, params, table)?;
    for (&nm, &tm) in counts.iter().zip(&t) {
        log_p -= log_binomial(nm, tm);
    }
    Ok(log_p)
}

/// How [`gibbs_resample_multiplicity`] updates the multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GibbsMode {
    /// Evaluate all n conditional weights by chaining V ratios, then draw.
    FullScan,
    /// Remove one uniformly chosen indicator and re-add it from its
    /// conditional odds; one cheap step of a chain whose stationary law is
    /// the full-scan distribution.
    IndicatorStep,
}

/// Resamples the multiplicity t of a block with n items and base mass
/// theta, conditional on the other blocks' total multiplicity `t_rest`.
/// The conditional weights are `theta^t S(n, t) (b|a)_{t_rest + t}` up to
/// scale; both modes use only ratio-table entries, never log Stirling
/// numbers. `current_t` seeds the indicator step and is ignored by the
/// full scan.
pub fn gibbs_resample_multiplicity<R: Rng + ?Sized>(
    n: usize,
    theta: f64,
    params: PdParams,
    ratios: &StirlingRatioTable,
    t_rest: usize,
    current_t: usize,
    mode: GibbsMode,
    rng: &mut R,
) -> Result<usize> {
    if n == 0 {
        return Err(Error::invalid("block must contain at least one item"));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::invalid(format!("base mass must lie in (0, 1], got {theta}")));
    }
    if ratios.a().to_bits() != params.a().to_bits() {
        return Err(Error::invalid(format!(
            "ratio table built for a={}, parameters have a={}",
            ratios.a(),
            params.a()
        )));
    }
    if current_t == 0 || current_t > n {
        return Err(Error::invalid(format!(
            "current multiplicity {current_t} out of range 1..={n}"
        )));
    }
    if n == 1 {
        return Ok(1);
    }
    let (a, b) = (params.a(), params.b());
    match mode {
        GibbsMode::FullScan => {
            let mut weights = Vec::with_capacity(n);
            weights.push(1.0_f64);
            let mut cur = 1.0_f64;
            for t in 2..=n {
                let step = theta * ratios.v(n, t)? * (b + (t_rest + t - 1) as f64 * a);
                cur *= step;
                weights.push(cur);
                // keep the chain inside f64 range; rescaling preserves
                // proportions
                if cur > 1e250 {
                    for w in weights.iter_mut() {
                        *w /= cur;
                    }
                    cur = 1.0;
                }
            }
            let total: f64 = weights.iter().sum();
            if !total.is_finite() || total <= 0.0 {
                return Err(Error::Numeric(format!(
                    "conditional weights degenerate (total {total}) at n={n}"
                )));
            }
            let mut u = rng.random::<f64>() * total;
            for (i, &w) in weights.iter().enumerate() {
                if u < w {
                    return Ok(i + 1);
                }
                u -= w;
            }
            Ok(n)
        }
        GibbsMode::IndicatorStep => {
            // a uniformly chosen indicator is currently 1 w.p. t/n
            let removed = rng.random::<f64>() < current_t as f64 / n as f64;
            let tp = current_t - usize::from(removed);
            if tp == 0 {
                // every other indicator is 0, so this one is forced to 1
                return Ok(1);
            }
            let odds = theta
                * ratios.v(n, tp + 1)?
                * (b + (t_rest + tp) as f64 * a)
                * ((tp + 1) as f64 / (n - tp) as f64);
            let p_one = odds / (1.0 + odds);
            Ok(tp + usize::from(rng.random::<f64>() < p_one))
        }
    }
}

/// Prior mean and second central moments of the random measure over a
/// finite support: the covariance matrix carries the variances on its
/// diagonal.
#[derive(Debug, Clone, Serialize)]
pub struct PdpMoments {
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

/// E[p_k] = theta_k, Var[p_k] = (1-a)/(b+1) theta_k (1-theta_k),
/// Cov[p_j, p_k] = -(1-a)/(b+1) theta_j theta_k.
pub fn pdp_moments(theta: &[f64], params: PdParams) -> Result<PdpMoments> {
    validate_theta(theta)?;
    let factor = (1.0 - params.a()) / (params.b() + 1.0);
    let covariance = theta
        .iter()
        .enumerate()
        .map(|(j, &tj)| {
            theta
                .iter()
                .enumerate()
                .map(|(k, &tk)| if j == k { factor * tj * (1.0 - tj) } else { -factor * tj * tk })
                .collect()
        })
        .collect();
    Ok(PdpMoments { mean: theta.to_vec(), covariance })
}

/// Third central moment E[(p_k1 - theta_k1)(p_k2 - theta_k2)(p_k3 - theta_k3)]
/// with 0-based support indices; three cases by coincidence pattern.
pub fn third_central_moment(
    theta: &[f64],
    params: PdParams,
    k1: usize,
    k2: usize,
    k3: usize,
) -> Result<f64> {
    validate_theta(theta)?;
    if [k1, k2, k3].iter().any(|&k| k >= theta.len()) {
        return Err(Error::invalid(format!(
            "support index out of range 0..{}",
            theta.len()
        )));
    }
    let (a, b) = (params.a(), params.b());
    let factor = (1.0 - a) * (2.0 - a) / ((b + 1.0) * (b + 2.0));
    Ok(if k1 == k2 && k2 == k3 {
        let t = theta[k1];
        factor * t * (1.0 - t) * (1.0 - 2.0 * t)
    } else if k1 == k2 || k1 == k3 || k2 == k3 {
        // exactly two coincide: the repeated index enters quadratically
        let (rep, lone) = if k1 == k2 {
            (k1, k3)
        } else if k1 == k3 {
            (k1, k2)
        } else {
            (k2, k1)
        };
        factor * (2.0 * theta[rep] - 1.0) * theta[rep] * theta[lone]
    } else {
        2.0 * factor * theta[k1] * theta[k2] * theta[k3]
    })
}

/// E[sum_k p_k^r] for a non-atomic base: prod_{i=1}^{r-1} (i-a)/(i+b).
/// Defined here for r in 2..=5.
pub fn power_sum_expectation(params: PdParams, r: usize) -> Result<f64> {
    if !(2..=5).contains(&r) {
        return Err(Error::invalid(format!("power-sum order must lie in 2..=5, got {r}")));
    }
    let (a, b) = (params.a(), params.b());
    Ok((1..r).map(|i| (i as f64 - a) / (i as f64 + b)).product())
}

/// Concentration of the Dirichlet distribution whose first and second
/// moments match the random measure over a finite support: (a+b)/(1-a).
/// Exact at a = 0; the distributions differ at higher moments otherwise.
pub fn dirichlet_equivalent_concentration(params: PdParams) -> f64 {
    (params.a() + params.b()) / (1.0 - params.a())
}
