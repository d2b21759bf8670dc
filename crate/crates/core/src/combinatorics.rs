//! q-factorials, q-multinomial coefficients, q-Stirling's formula and
//! Tsallis entropy.
//!
//! For large `n` the q-log of the q-multinomial coefficient approaches
//! `n^(2-q)/(2-q) · S_{2-q}(n_1/n, ..., n_k/n)` (and a logarithmic form at
//! `q = 2`). The functions here return both sides so the approach can be
//! measured.

use crate::error::{QError, Result};
use crate::qcore::{q_log_unchecked, EntropicIndex};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Positive block sizes `n_1..n_k` with total `n = Σ n_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector {
    counts: Vec<u64>,
    total: u64,
}

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(QError::InvalidInput(
                "count vector must be non-empty".into(),
            ));
        }
        if let Some(i) = counts.iter().position(|&c| c == 0) {
            return Err(QError::InvalidInput(format!("count at index {i} is zero")));
        }
        let total = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| QError::InvalidInput("count total overflows".into()))?;
        Ok(CountVector { counts, total })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Empirical probabilities `n_i / n`.
    pub fn frequencies(&self) -> ProbabilityVector {
        let n = self.total as f64;
        ProbabilityVector {
            p: self.counts.iter().map(|&c| c as f64 / n).collect(),
        }
    }
}

/// Probabilities summing to one (within `1e-12`).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    p: Vec<f64>,
}

pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(QError::InvalidInput(
                "probability vector must be non-empty".into(),
            ));
        }
        if let Some(i) = p.iter().position(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(QError::InvalidInput(format!(
                "probability at index {i} is {} (outside [0, 1])",
                p[i]
            )));
        }
        let s: f64 = p.iter().copied().collect::<CompensatedSum>().value();
        if (s - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(QError::InvalidInput(format!(
                "probabilities sum to {s}, not 1"
            )));
        }
        Ok(ProbabilityVector { p })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(QError::InvalidInput("uniform vector needs k >= 1".into()));
        }
        Ok(ProbabilityVector {
            p: vec![1.0 / k as f64; k],
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// `ln_q n!_q = Σ_{k=1}^n ln_q k`, summed exactly (compensated).
pub fn q_log_factorial(q: EntropicIndex, n: u64) -> f64 {
    (2..=n)
        .map(|k| q_log_unchecked(q, k as f64))
        .collect::<CompensatedSum>()
        .value()
}

/// q-Stirling approximation of [`q_log_factorial`].
///
/// `q ≠ 2`: `n/(2-q) ln_q n - n/(2-q) + ln_q(n)/2 + 1/(2-q)`;
/// `q = 2`: `n - ln n - 1/(2n) - 1/2`.
pub fn q_stirling(q: EntropicIndex, n: u64) -> f64 {
    let nf = n as f64;
    if q.value() == 2.0 {
        return nf - nf.ln() - 0.5 / nf - 0.5;
    }
    let d = 2.0 - q.value();
    let l = q_log_unchecked(q, nf);
    nf / d * l - nf / d + 0.5 * l + 1.0 / d
}

/// `ln_q [n; n_1 .. n_k]_q = ln_q n!_q - Σ ln_q n_i!_q`.
pub fn q_log_multinomial(q: EntropicIndex, cv: &CountVector) -> f64 {
    let parts: CompensatedSum = cv.counts.iter().map(|&c| q_log_factorial(q, c)).collect();
    q_log_factorial(q, cv.total) - parts.value()
}

/// Tsallis entropy `(1 - Σ p_i^q)/(q - 1)`; Shannon entropy (nats) at `q = 1`.
///
/// Evaluated as `Σ p_i ln_q(1/p_i)` over `p_i > 0`, which is the same sum
/// without the cancellation near `q = 1`.
pub fn tsallis_entropy(q: EntropicIndex, p: &ProbabilityVector) -> f64 {
    p.p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * q_log_unchecked(q, 1.0 / v))
        .collect::<CompensatedSum>()
        .value()
}

/// Both sides of the large-`n` correspondence and their relative gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

impl Correspondence {
    fn new(lhs: f64, rhs: f64) -> Self {
        let gap = (lhs - rhs).abs();
        let rel_err = if lhs == 0.0 { gap } else { gap / lhs.abs() };
        Correspondence { lhs, rhs, rel_err }
    }
}

/// `ln_q [n; n_i]_q` against `n^(2-q)/(2-q) · S_{2-q}(n_i/n)`, for `q ≠ 2`.
pub fn tsallis_correspondence(q: EntropicIndex, cv: &CountVector) -> Result<Correspondence> {
    if q.value() == 2.0 {
        return Err(QError::InvalidInput(
            "q = 2 uses tsallis_correspondence_q2".into(),
        ));
    }
    let lhs = q_log_multinomial(q, cv);
    let d = 2.0 - q.value();
    let n = cv.total as f64;
    let rhs = n.powf(d) / d * tsallis_entropy(q.dual(), &cv.frequencies());
    Ok(Correspondence::new(lhs, rhs))
}

/// `q = 2`: `ln_2 [n; n_i]_2` against `-ln n + Σ ln n_i`.
pub fn tsallis_correspondence_q2(cv: &CountVector) -> Correspondence {
    let q2 = EntropicIndex::new(2.0).expect("finite");
    let lhs = q_log_multinomial(q2, cv);
    let parts: CompensatedSum = cv.counts.iter().map(|&c| (c as f64).ln()).collect();
    let rhs = -(cv.total as f64).ln() + parts.value();
    Correspondence::new(lhs, rhs)
}

/// Dispatch on `q == 2`.
pub fn multinomial_correspondence(q: EntropicIndex, cv: &CountVector) -> Correspondence {
    if q.value() == 2.0 {
        tsallis_correspondence_q2(cv)
    } else {
        tsallis_correspondence(q, cv).expect("q != 2")
    }
}

/// `|q_stirling - q_log_factorial| / |q_log_factorial|`.
pub fn stirling_relative_error(q: EntropicIndex, n: u64) -> f64 {
    let exact = q_log_factorial(q, n);
    (q_stirling(q, n) - exact).abs() / exact.abs()
}
