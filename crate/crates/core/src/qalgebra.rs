//! q-product, q-ratio and the scale drift of sequential shifts.
//!
//! `x ⊗_q y = [x^(1-q) + y^(1-q) - 1]^(1/(1-q))`. The bracket equals
//! `1 + (1-q)(ln_q x + ln_q y)`, so the product is evaluated as
//! `exp_q(ln_q x + ln_q y)` which keeps full precision near `q = 1`.

use crate::error::{QError, Result};
use crate::qcore::{exp_bracket, q_exp, q_log, EntropicIndex};

pub fn q_product(q: EntropicIndex, x: f64, y: f64) -> Result<f64> {
    let s = q_log(q, x)? + q_log(q, y)?;
    q_exp(q, s)
}

/// Inverse of [`q_product`]: `q_ratio(x ⊗_q y, y) = x`.
pub fn q_ratio(q: EntropicIndex, x: f64, y: f64) -> Result<f64> {
    let d = q_log(q, x)? - q_log(q, y)?;
    q_exp(q, d)
}

/// Relative gap between `exp_q(x1 + x2)` and `exp_q(x1) ⊗_q exp_q(x2)`.
pub fn q_exp_law_check(q: EntropicIndex, x1: f64, x2: f64) -> Result<f64> {
    let lhs = q_exp(q, x1 + x2)?;
    let rhs = q_product(q, q_exp(q, x1)?, q_exp(q, x2)?)?;
    Ok((lhs - rhs).abs() / lhs)
}

/// Left fold of [`q_product`]. Domain errors carry the index of the factor
/// whose fold step failed.
pub fn q_product_fold(q: EntropicIndex, factors: &[f64]) -> Result<f64> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| QError::InvalidInput("empty factor list".into()))?;
    if !(*first > 0.0) {
        return Err(QError::NonPositiveArgument { value: *first });
    }
    rest.iter().enumerate().try_fold(*first, |acc, (i, &f)| {
        q_product(q, acc, f).map_err(|e| e.at_index(i + 1))
    })
}

/// Shifts `x_1..x_n` in one scale unit together with the drifted values
/// `x'_t = x_t / (1 + (1-q) Σ_{i<t} x_i)` seen when the same sum is
/// factorised into ordinary products of q-exponentials.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSequence {
    q: EntropicIndex,
    shifts: Vec<f64>,
    observed: Vec<f64>,
}

impl ObservationSequence {
    pub fn q(&self) -> EntropicIndex {
        self.q
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn observed(&self) -> &[f64] {
        &self.observed
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    /// `Π_t exp_q(x'_t)`.
    pub fn product_of_exponentials(&self) -> Result<f64> {
        self.observed
            .iter()
            .enumerate()
            .try_fold(1.0, |acc, (i, &x)| {
                Ok(acc * q_exp(self.q, x).map_err(|e| e.at_index(i))?)
            })
    }

    /// `exp_q(Σ x_t)`.
    pub fn exponential_of_sum(&self) -> Result<f64> {
        q_exp(self.q, self.shifts.iter().sum())
    }
}

/// Expand a list of same-unit shifts into their drifted observed values.
///
/// Every partial sum `S_t = Σ_{i<t} x_i` must keep `1 + (1-q)S_t > 0`; the
/// first failing step is reported by index. The full sum is not checked
/// here: [`ObservationSequence::product_of_exponentials`] reports it.
pub fn scale_drift_expand(q: EntropicIndex, shifts: &[f64]) -> Result<ObservationSequence> {
    if shifts.is_empty() {
        return Err(QError::InvalidInput("empty shift list".into()));
    }
    let mut observed = Vec::with_capacity(shifts.len());
    let mut partial = 0.0;
    for (t, &x) in shifts.iter().enumerate() {
        let denom = exp_bracket(q, partial);
        if !(denom > 0.0) {
            return Err(QError::DomainViolation {
                constraint: denom,
                index: Some(t),
            });
        }
        observed.push(if q.is_classical() { x } else { x / denom });
        partial += x;
    }
    Ok(ObservationSequence {
        q,
        shifts: shifts.to_vec(),
        observed,
    })
}
