//! q-logarithm and q-exponential.
//!
//! `ln_q y = (y^(1-q) - 1)/(1-q)` and its inverse
//! `exp_q x = [1 + (1-q)x]^(1/(1-q))` on `1 + (1-q)x > 0`.
//!
//! Near the classical point both go through `expm1`/`ln_1p` so that the
//! deformed branch stays accurate as `q` approaches 1. The classical branch (`ln`, `exp`) is
//! taken only when `q == 1` exactly.

use crate::error::{QError, Result};

/// The deformation parameter `q`. Always finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntropicIndex(f64);

impl EntropicIndex {
    pub const CLASSICAL: EntropicIndex = EntropicIndex(1.0);

    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() {
            Ok(EntropicIndex(q))
        } else {
            Err(QError::NonFiniteIndex(q))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// True only for `q == 1` exactly; no tolerance band.
    #[inline]
    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }

    /// `1 - q`.
    #[inline]
    pub fn one_minus(self) -> f64 {
        1.0 - self.0
    }

    /// The dual index `2 - q`, as used by `ln_{2-q}`.
    #[inline]
    pub fn dual(self) -> EntropicIndex {
        EntropicIndex(2.0 - self.0)
    }
}

impl TryFrom<f64> for EntropicIndex {
    type Error = QError;

    fn try_from(q: f64) -> Result<Self> {
        EntropicIndex::new(q)
    }
}

impl std::fmt::Display for EntropicIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Behaviour of `exp_q` outside `1 + (1-q)x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DomainMode {
    /// Report a [`QError::DomainViolation`].
    #[default]
    Strict,
    /// Tsallis cutoff: `exp_q x := 0` when the bracket is non-positive and
    /// `q < 1`. For `q > 1` the bracket still raises an error since the
    /// function diverges there.
    Cutoff,
}

/// An argument known to lie in the domain of `exp_q` for a given index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QDomainPoint {
    q: EntropicIndex,
    x: f64,
}

impl QDomainPoint {
    pub fn new(q: EntropicIndex, x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(QError::InvalidInput(format!("non-finite argument {x}")));
        }
        check_exp_domain(q, x)?;
        Ok(QDomainPoint { q, x })
    }

    pub fn q(&self) -> EntropicIndex {
        self.q
    }

    pub fn x(&self) -> f64 {
        self.x
    }
}

/// The bracket `1 + (1-q)x`.
#[inline]
pub fn exp_bracket(q: EntropicIndex, x: f64) -> f64 {
    1.0 + q.one_minus() * x
}

fn check_exp_domain(q: EntropicIndex, x: f64) -> Result<()> {
    if q.is_classical() {
        return Ok(());
    }
    // `u > -1` is the exact form of `1 + u > 0`; the latter can round to a
    // positive value when `u` sits just below -1.
    let u = q.one_minus() * x;
    if u > -1.0 {
        Ok(())
    } else {
        Err(QError::domain(1.0 + u))
    }
}

/// `ln_q y` for `y > 0`.
pub fn q_log(q: EntropicIndex, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(QError::NonPositiveArgument { value: y });
    }
    Ok(q_log_unchecked(q, y))
}

#[inline]
pub(crate) fn q_log_unchecked(q: EntropicIndex, y: f64) -> f64 {
    if q.is_classical() {
        y.ln()
    } else {
        let a = q.one_minus();
        (a * y.ln()).exp_m1() / a
    }
}

/// `exp_q x`, erroring outside `1 + (1-q)x > 0`.
pub fn q_exp(q: EntropicIndex, x: f64) -> Result<f64> {
    check_exp_domain(q, x)?;
    Ok(q_exp_unchecked(q, x))
}

/// `exp_q x` with an explicit choice of out-of-domain behaviour.
pub fn q_exp_with(q: EntropicIndex, x: f64, mode: DomainMode) -> Result<f64> {
    match check_exp_domain(q, x) {
        Ok(()) => Ok(q_exp_unchecked(q, x)),
        Err(e) => match mode {
            DomainMode::Cutoff if q.value() < 1.0 => Ok(0.0),
            _ => Err(e),
        },
    }
}

#[inline]
pub(crate) fn q_exp_unchecked(q: EntropicIndex, x: f64) -> f64 {
    if q.is_classical() {
        return x.exp();
    }
    let a = q.one_minus();
    let u = a * x;
    if u.abs() >= 0.5 {
        // Exact when the bracket is, e.g. exp_0.5(6) = 16.
        (1.0 + u).powf(1.0 / a)
    } else {
        (u.ln_1p() / a).exp()
    }
}

/// `ln_q(y/x)` through `x^(q-1) (ln_q y - ln_q x)`.
pub fn q_log_of_ratio(q: EntropicIndex, y: f64, x: f64) -> Result<f64> {
    let ly = q_log(q, y)?;
    let lx = q_log(q, x)?;
    if q.is_classical() {
        return Ok(ly - lx);
    }
    Ok(x.powf(-q.one_minus()) * (ly - lx))
}

/// `|ln_q(exp_q x) - x|`.
pub fn round_trip_check(point: QDomainPoint) -> Result<f64> {
    let y = q_exp(point.q, point.x)?;
    let back = q_log(point.q, y)?;
    Ok((back - point.x).abs())
}
