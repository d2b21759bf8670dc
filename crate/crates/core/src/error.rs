use thiserror::Error;

/// Errors raised by the q-deformed calculus.
///
/// Domain errors carry the offending constraint value so callers can report
/// how far outside the admissible region an input was.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("entropic index must be finite, got {0}")]
    NonFiniteIndex(f64),

    #[error("argument must be positive, got {value}")]
    NonPositiveArgument { value: f64 },

    /// `constraint` is the bracket that must be strictly positive, e.g.
    /// `1 + (1-q)x` for the q-exponential.
    #[error("domain violation{}: constraint value {constraint} must be > 0", fmt_index(.index))]
    DomainViolation {
        constraint: f64,
        index: Option<usize>,
    },

    #[error("integration left the solution domain at x = {x} (y = {y})")]
    BlowupDetected { x: f64, y: f64 },

    #[error("q-Gaussian with q = {q} is not normalizable (requires q < 3)")]
    UnnormalizableModel { q: f64 },

    #[error("quadrature did not converge: estimated error {error_estimate} after {subdivisions} subdivisions")]
    QuadratureFailed {
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

fn fmt_index(index: &Option<usize>) -> String {
    match index {
        Some(i) => format!(" at index {i}"),
        None => String::new(),
    }
}

impl QError {
    pub(crate) fn domain(constraint: f64) -> Self {
        QError::DomainViolation {
            constraint,
            index: None,
        }
    }

    /// Attach an element index to a domain violation; other variants pass through.
    pub fn at_index(self, i: usize) -> Self {
        match self {
            QError::DomainViolation { constraint, .. } => QError::DomainViolation {
                constraint,
                index: Some(i),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, QError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_message_names_index() {
        let e = QError::domain(-0.25).at_index(3);
        let msg = e.to_string();
        assert!(msg.contains("index 3"), "{msg}");
        assert!(msg.contains("-0.25"), "{msg}");
    }

    #[test]
    fn at_index_leaves_other_variants() {
        let e = QError::NonPositiveArgument { value: -1.0 }.at_index(2);
        assert_eq!(e, QError::NonPositiveArgument { value: -1.0 });
    }
}
