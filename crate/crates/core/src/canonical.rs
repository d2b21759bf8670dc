//! Discrete q-exponential distributions and their q-log canonical form.
//!
//! With frequencies `n_i = exp_q(-x_i + c)` and total `n = Σ n_i`, the
//! probabilities `p_i = n_i/n` can be written with the shift `c = c1 + c2`
//! split in many ways, each rescaling the argument differently. The q-log
//! form `ln_q p_i = -n^(q-1) x_i + n^(q-1) c - ln_{2-q} n` is the same for
//! every split.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use crate::combinatorics::CompensatedSum;
use crate::error::{QError, Result};
use crate::qcore::{exp_bracket, q_exp, q_log, q_log_of_ratio, EntropicIndex};

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteQDistribution {
    q: EntropicIndex,
    xs: Vec<f64>,
    c: f64,
    frequencies: Vec<f64>,
    total: f64,
    probabilities: Vec<f64>,
}

impl DiscreteQDistribution {
    pub fn q(&self) -> EntropicIndex {
        self.q
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `n_i = exp_q(-x_i + c)`; positive reals rather than counts.
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `ln_q p_i` from `ln_q(y/x) = x^(q-1)(ln_q y - ln_q x)` with
    /// `y = n_i`, `x = n`.
    pub fn derived_log_probability(&self, i: usize) -> Result<f64> {
        q_log_of_ratio(self.q, self.frequencies[i], self.total)
    }
}

pub fn build_distribution(q: EntropicIndex, xs: &[f64], c: f64) -> Result<DiscreteQDistribution> {
    if xs.is_empty() {
        return Err(QError::InvalidInput(
            "at least one data value is required".into(),
        ));
    }
    let frequencies = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if !x.is_finite() {
                return Err(QError::InvalidInput(format!("x[{i}] is not finite")));
            }
            let n = q_exp(q, -x + c).map_err(|e| e.at_index(i))?;
            if !(n > 0.0 && n.is_finite()) {
                return Err(QError::DomainViolation {
                    constraint: exp_bracket(q, -x + c),
                    index: Some(i),
                });
            }
            Ok(n)
        })
        .collect::<Result<Vec<f64>>>()?;
    let total = frequencies
        .iter()
        .copied()
        .collect::<CompensatedSum>()
        .value();
    let probabilities = frequencies.iter().map(|n| n / total).collect();
    Ok(DiscreteQDistribution {
        q,
        xs: xs.to_vec(),
        c,
        frequencies,
        total,
        probabilities,
    })
}

fn normalized(v: Vec<f64>) -> Vec<f64> {
    let s = v.iter().copied().collect::<CompensatedSum>().value();
    v.into_iter().map(|x| x / s).collect()
}

/// `exp_q((-x_i + b) / exp_q(a)^(1-q))`, normalized over `i`.
fn rescaled_form(q: EntropicIndex, xs: &[f64], a: f64, b: f64) -> Result<Vec<f64>> {
    let unit = exp_bracket(q, a);
    if !(unit > 0.0) {
        return Err(QError::domain(unit));
    }
    let v = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| q_exp(q, (-x + b) / unit).map_err(|e| e.at_index(i)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(normalized(v))
}

/// The two representations obtained by pulling `exp_q(c1)` or `exp_q(c2)`
/// out of `exp_q(-x_i + c1 + c2)`.
pub fn split_representation(
    q: EntropicIndex,
    xs: &[f64],
    c1: f64,
    c2: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((rescaled_form(q, xs, c1, c2)?, rescaled_form(q, xs, c2, c1)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalQLogForm {
    pub q: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl CanonicalQLogForm {
    pub fn log_probability(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    pub fn probability(&self, x: f64) -> Result<f64> {
        q_exp(EntropicIndex::new(self.q)?, self.log_probability(x))
    }
}

/// `slope = -n^(q-1)`, `intercept = n^(q-1) c - ln_{2-q} n`.
pub fn canonical_form(dist: &DiscreteQDistribution) -> CanonicalQLogForm {
    let q = dist.q;
    let n = dist.total;
    let w = if q.is_classical() {
        1.0
    } else {
        n.powf(q.value() - 1.0)
    };
    let lnd = q_log(q.dual(), n).expect("total frequency is positive");
    CanonicalQLogForm {
        q: q.value(),
        slope: -w,
        intercept: w * dist.c - lnd,
    }
}

/// Largest relative error of `exp_q(slope·x_i + intercept)` against `p_i`.
pub fn reproduction_error(dist: &DiscreteQDistribution, form: &CanonicalQLogForm) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, (&x, &p)) in dist.xs.iter().zip(&dist.probabilities).enumerate() {
        let r = q_exp(dist.q, form.log_probability(x)).map_err(|e| e.at_index(i))?;
        worst = worst.max((r - p).abs() / p);
    }
    Ok(worst)
}

/// Open interval of `c1` for which both sub-shifts of `c = c1 + c2` keep
/// `1 + (1-q)c_j > 0`. Unbounded sides are `±∞`.
pub fn feasible_split_interval(q: EntropicIndex, c: f64) -> (f64, f64) {
    let k = q.one_minus();
    if k == 0.0 {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else if k > 0.0 {
        (-1.0 / k, c + 1.0 / k)
    } else {
        (c + 1.0 / k, -1.0 / k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub q: f64,
    pub c: f64,
    pub n_splits: usize,
    pub accepted: usize,
    pub rejected: usize,
    /// Largest relative deviation of any split representation from `n_i/n`.
    pub max_probability_deviation: f64,
    /// Distinct argument rescalings `exp_q(c1)^(1-q)` among accepted splits.
    pub distinct_parameterizations: usize,
    pub distinct_canonical_forms: usize,
    pub canonical: CanonicalQLogForm,
    pub max_reproduction_error: f64,
}

const SPLIT_HALF_RANGE: f64 = 10.0;

/// Draws `n_splits` values of `c1` (with `c2 = c - c1`) uniformly from the
/// feasible interval, shrunk by 1% on each side and clipped to
/// `c/2 ± 10`. Draws that still violate a domain condition are counted as
/// rejected.
pub fn verify_uniqueness<R: Rng + ?Sized>(
    q: EntropicIndex,
    xs: &[f64],
    c: f64,
    n_splits: usize,
    rng: &mut R,
) -> Result<UniquenessReport> {
    let dist = build_distribution(q, xs, c)?;
    let (lo, hi) = feasible_split_interval(q, c);
    let (lo, hi) = (
        lo.max(0.5 * c - SPLIT_HALF_RANGE),
        hi.min(0.5 * c + SPLIT_HALF_RANGE),
    );
    let margin = 0.01 * (hi - lo);
    let (lo, hi) = (lo + margin, hi - margin);

    let mut accepted = 0;
    let mut rejected = 0;
    let mut max_dev: f64 = 0.0;
    let mut units = BTreeSet::new();
    let mut forms = BTreeSet::new();
    let mut max_repro: f64 = 0.0;
    for _ in 0..n_splits {
        let c1 = rng.random_range(lo..hi);
        let c2 = c - c1;
        let Ok((a, b)) = split_representation(q, xs, c1, c2) else {
            rejected += 1;
            continue;
        };
        accepted += 1;
        for (pa, pb, p) in a
            .iter()
            .zip(&b)
            .zip(&dist.probabilities)
            .map(|((a, b), p)| (a, b, p))
        {
            max_dev = max_dev.max((pa - p).abs() / p).max((pb - p).abs() / p);
        }
        units.insert(exp_bracket(q, c1).to_bits());
        // The canonical form depends on the data and the total shift only.
        let form = canonical_form(&dist);
        forms.insert((form.slope.to_bits(), form.intercept.to_bits()));
        max_repro = max_repro.max(reproduction_error(&dist, &form)?);
    }
    let canonical = canonical_form(&dist);
    Ok(UniquenessReport {
        q: q.value(),
        c,
        n_splits,
        accepted,
        rejected,
        max_probability_deviation: max_dev,
        distinct_parameterizations: units.len(),
        distinct_canonical_forms: forms.len(),
        canonical,
        max_reproduction_error: max_repro,
    })
}
