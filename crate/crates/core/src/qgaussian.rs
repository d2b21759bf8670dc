//! q-Gaussian densities and the q-log likelihood of a location parameter.
//!
//! A density whose q-log likelihood `Σ ln_q f(x_i - θ)` peaks at the sample
//! mean satisfies `f'(e)/f(e)^q = a_q e`, i.e. `ln_q f(e) = a_q e²/2 + C_q`.
//! With `β_q = -a_q / (2(1 + (1-q)C_q))` this is the q-Gaussian
//! `exp_q(-β_q e²)/Z`. The integration constant `C_q` stays free; it fixes
//! the scale `c = exp_q(C_q)` of the unnormalized frequency curve.

use crate::combinatorics::CompensatedSum;
use crate::error::{QError, Result};
use crate::figure::{FigureRow, FigureTable, Grid};
use crate::qcore::{exp_bracket, q_exp, q_exp_unchecked, q_log, EntropicIndex};
use crate::quadrature::{integrate, Tolerance};

/// `β_q = -a_q / (2(1 + (1-q)C_q))`.
pub fn beta_from(q: EntropicIndex, a_q: f64, c_q: f64) -> Result<f64> {
    if !(a_q < 0.0 && a_q.is_finite()) {
        return Err(QError::InvalidInput(format!(
            "a_q must be negative, got {a_q}"
        )));
    }
    let b = exp_bracket(q, c_q);
    if !(b > 0.0) {
        return Err(QError::domain(b));
    }
    Ok(-a_q / (2.0 * b))
}

/// `Z = ∫ exp_q(-β e²) de` over the support.
///
/// * `q < 1`: compact support `|e| < 1/sqrt(β(1-q))`, integrated up to the
///   edge.
/// * `q = 1`: Gaussian, integrated until the tail bound
///   `exp(-βE²)/(2βE)` is negligible.
/// * `1 < q < 3`: the integrand decays like `e^(-2/(q-1))`. The half line is
///   covered by doubling panels until `s E² ≥ 10³·max(m, 1)` with
///   `s = (q-1)β`, `m = 1/(q-1)`; the remaining tail
///   `∫_E^∞ (1 + s e²)^(-m) de` is added from its convergent binomial series.
///   Panels stop early if the integrand underflows.
///
/// Absolute accuracy is better than `1e-10` for the cases exercised in the
/// test suite.
pub fn normalization(q: EntropicIndex, beta: f64) -> Result<f64> {
    let qv = q.value();
    if qv >= 3.0 {
        return Err(QError::UnnormalizableModel { q: qv });
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(QError::InvalidInput(format!(
            "beta must be positive, got {beta}"
        )));
    }
    if qv < 1.0 {
        let edge = 1.0 / (beta * q.one_minus()).sqrt();
        let f = |e: f64| {
            let b = 1.0 - q.one_minus() * beta * e * e;
            if b > 0.0 {
                q_exp_unchecked(q, -beta * e * e)
            } else {
                0.0
            }
        };
        let r = integrate(f, 0.0, edge, tolerance_for(edge))?;
        return Ok(2.0 * r.value);
    }
    Ok(2.0 * half_line_mass(q, beta)?)
}

fn tolerance_for(width: f64) -> Tolerance {
    Tolerance {
        abs: 1e-15 * width,
        rel: 1e-13,
        max_subdivisions: 4000,
    }
}

const MAX_PANELS: usize = 1100;
const SERIES_THRESHOLD: f64 = 1e3;

fn half_line_mass(q: EntropicIndex, beta: f64) -> Result<f64> {
    let f = |e: f64| q_exp_unchecked(q, -beta * e * e);
    let width = 1.0 / beta.sqrt();
    let mut total = CompensatedSum::default();
    let (mut a, mut b) = (0.0, width);
    for _ in 0..MAX_PANELS {
        total.add(integrate(f, a, b, tolerance_for(b - a))?.value);
        let fb = f(b);
        if q.is_classical() {
            let tail = fb / (2.0 * beta * b);
            if tail < 1e-17 * total.value() {
                return Ok(total.value());
            }
        } else {
            let s = (q.value() - 1.0) * beta;
            let m = 1.0 / (q.value() - 1.0);
            if s * b * b >= SERIES_THRESHOLD * m.max(1.0) {
                total.add(power_tail(s, m, b)?);
                return Ok(total.value());
            }
            if fb < 1e-300 {
                return Ok(total.value());
            }
        }
        a = b;
        b *= 2.0;
    }
    Err(QError::QuadratureFailed {
        error_estimate: f64::NAN,
        subdivisions: MAX_PANELS,
    })
}

/// `∫_E^∞ (1 + s e²)^(-m) de` for `s E² > m`, `m > 1/2`:
/// `Σ_k C(-m, k) s^(-m-k) E^(1-2m-2k) / (2m + 2k - 1)`.
pub(crate) fn power_tail(s: f64, m: f64, edge: f64) -> Result<f64> {
    let lead = (-m * s.ln() + (1.0 - 2.0 * m) * edge.ln()).exp();
    let ratio = 1.0 / (s * edge * edge);
    let mut coeff = 1.0;
    let mut power = 1.0;
    let mut sum = CompensatedSum::default();
    for k in 0..400 {
        let kf = k as f64;
        let term = coeff * power / (2.0 * m + 2.0 * kf - 1.0);
        sum.add(term);
        if term.abs() < 1e-18 * sum.value().abs() {
            return Ok(lead * sum.value());
        }
        coeff *= (-m - kf) / (kf + 1.0);
        power *= ratio;
    }
    Err(QError::QuadratureFailed {
        error_estimate: f64::NAN,
        subdivisions: 400,
    })
}

/// A q-Gaussian parameterised by the coefficients of `ln_q f = a_q e²/2 + C_q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QGaussianModel {
    q: EntropicIndex,
    a_q: f64,
    c_q: f64,
    beta: f64,
    z: f64,
}

impl QGaussianModel {
    pub fn new(q: EntropicIndex, a_q: f64, c_q: f64) -> Result<Self> {
        if q.value() >= 3.0 {
            return Err(QError::UnnormalizableModel { q: q.value() });
        }
        let beta = beta_from(q, a_q, c_q)?;
        let z = normalization(q, beta)?;
        Ok(QGaussianModel {
            q,
            a_q,
            c_q,
            beta,
            z,
        })
    }

    /// The model with the given `β` and `C_q = 0` (`a_q = -2β`).
    pub fn with_beta(q: EntropicIndex, beta: f64) -> Result<Self> {
        Self::new(q, -2.0 * beta, 0.0)
    }

    pub fn q(&self) -> EntropicIndex {
        self.q
    }

    pub fn a_q(&self) -> f64 {
        self.a_q
    }

    pub fn c_q(&self) -> f64 {
        self.c_q
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `γ_q = -a_q/2`.
    pub fn gamma(&self) -> f64 {
        -0.5 * self.a_q
    }

    /// `c = exp_q(C_q)`.
    pub fn scale(&self) -> f64 {
        q_exp_unchecked(self.q, self.c_q)
    }

    pub fn normalization(&self) -> f64 {
        self.z
    }

    /// Half-width of the support for `q < 1`.
    pub fn support_half_width(&self) -> Option<f64> {
        (self.q.value() < 1.0).then(|| 1.0 / (self.beta * self.q.one_minus()).sqrt())
    }

    /// `exp_q(-β e²)/Z`, zero outside a compact support.
    pub fn pdf(&self, e: f64) -> f64 {
        let x = -self.beta * e * e;
        if self.q.value() < 1.0 && exp_bracket(self.q, x) <= 0.0 {
            return 0.0;
        }
        q_exp_unchecked(self.q, x) / self.z
    }

    /// `exp_q(a_q e²/2 + C_q)`: the density before the free constant is
    /// fixed by normalization. Equals `c · exp_q(-β e²)`.
    pub fn unnormalized(&self, e: f64) -> Result<f64> {
        q_exp(self.q, 0.5 * self.a_q * e * e + self.c_q)
    }

    /// `∫ pdf`, by a scheme independent of [`normalization`]: the symmetric
    /// support directly for `q < 1`; otherwise `[0, w]` plus the tail under
    /// `e = w·exp(v)`, cut where an upper bound on the rest drops below
    /// `1e-13`.
    pub fn total_mass(&self) -> Result<f64> {
        let tol = Tolerance {
            abs: 1e-14,
            rel: 1e-12,
            max_subdivisions: 4000,
        };
        if let Some(edge) = self.support_half_width() {
            return Ok(integrate(|e| self.pdf(e), -edge, edge, tol)?.value);
        }
        let w = 1.0 / self.beta.sqrt();
        let ln_cut = if self.q.is_classical() {
            // exp(-βE²)/(2βE) < 1e-13 well before βE² = 40.
            0.5 * (40.0 / self.beta).ln()
        } else {
            // ∫_E^∞ (1 + s e²)^(-m) < s^(-m) E^(1-2m) / (2m - 1).
            let s = (self.q.value() - 1.0) * self.beta;
            let m = 1.0 / (self.q.value() - 1.0);
            ((1e-13 * (2.0 * m - 1.0) * self.z).ln() + m * s.ln()) / (1.0 - 2.0 * m)
        };
        let v_max = (ln_cut - w.ln()).max(1.0);
        let core = integrate(|e| self.pdf(e), 0.0, w, tol)?.value;
        let tail = integrate(
            |v: f64| {
                let e = w * v.exp();
                self.pdf(e) * e
            },
            0.0,
            v_max,
            tol,
        )?
        .value;
        Ok(2.0 * (core + tail))
    }
}

/// Values `x_1..x_n` sharing one scale unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(QError::InvalidInput("sample set must be non-empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(QError::InvalidInput(format!("sample {i} is not finite")));
        }
        Ok(SampleSet { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `θ* = (x_1 + ... + x_n)/n`.
    pub fn mean(&self) -> f64 {
        let s: CompensatedSum = self.values.iter().copied().collect();
        s.value() / self.values.len() as f64
    }

    /// Population standard deviation.
    pub fn spread(&self) -> f64 {
        let m = self.mean();
        let s: CompensatedSum = self.values.iter().map(|v| (v - m) * (v - m)).collect();
        (s.value() / self.values.len() as f64).sqrt()
    }
}

/// Treatment of samples outside a compact support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LikelihoodMode {
    #[default]
    Strict,
    /// Use the limit `ln_q(0⁺) = -1/(1-q)` (finite for `q < 1`).
    Penalty,
}

/// `Σ_i ln_q f(x_i - θ)`.
pub fn q_log_likelihood(
    model: &QGaussianModel,
    theta: f64,
    samples: &SampleSet,
    mode: LikelihoodMode,
) -> Result<f64> {
    let q = model.q();
    let mut sum = CompensatedSum::default();
    for (i, &x) in samples.values.iter().enumerate() {
        let e = x - theta;
        let density = model.pdf(e);
        if density > 0.0 {
            sum.add(q_log(q, density)?);
        } else {
            match mode {
                LikelihoodMode::Strict => {
                    return Err(QError::DomainViolation {
                        constraint: exp_bracket(q, -model.beta() * e * e),
                        index: Some(i),
                    })
                }
                LikelihoodMode::Penalty => sum.add(-1.0 / q.one_minus()),
            }
        }
    }
    Ok(sum.value())
}

/// Finite-difference derivatives of the q-log likelihood at the sample mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stationarity {
    pub theta_star: f64,
    pub gradient: f64,
    pub curvature: f64,
    pub scale: f64,
}

/// Relative size of the gradient allowed at a stationary point.
pub const STATIONARITY_TOL: f64 = 1e-6;

impl Stationarity {
    /// `|grad| / (|curvature| · scale)`, or `∞` when the curvature is not negative.
    pub fn normalized_gradient(&self) -> f64 {
        if !(self.curvature < 0.0) {
            return f64::INFINITY;
        }
        self.gradient.abs() / (self.curvature.abs() * self.scale)
    }

    pub fn is_maximum(&self) -> bool {
        self.normalized_gradient() <= STATIONARITY_TOL
    }
}

/// Gradient by central difference with step `1e-6·scale`; curvature by
/// second difference with step `1e-4·scale`. `scale` is the sample spread.
pub fn mlp_stationarity(model: &QGaussianModel, samples: &SampleSet) -> Result<Stationarity> {
    let scale = samples.spread();
    if !(scale > 0.0) {
        return Err(QError::InvalidInput(
            "stationarity needs at least two distinct samples".into(),
        ));
    }
    let theta = samples.mean();
    let ll = |t: f64| q_log_likelihood(model, t, samples, LikelihoodMode::Strict);
    let h1 = 1e-6 * scale;
    let gradient = (ll(theta + h1)? - ll(theta - h1)?) / (2.0 * h1);
    let h2 = 1e-4 * scale;
    let curvature = (ll(theta + h2)? - 2.0 * ll(theta)? + ll(theta - h2)?) / (h2 * h2);
    Ok(Stationarity {
        theta_star: theta,
        gradient,
        curvature,
        scale,
    })
}

/// `f'(e)/f(e)^q - a_q e` for `f = exp_q(a_q e²/2 + C_q)`, `f'` by central
/// difference with step `1e-6`.
pub fn defining_ode_residual(model: &QGaussianModel, e: f64) -> Result<f64> {
    const H: f64 = 1e-6;
    let f = model.unnormalized(e)?;
    let fp = (model.unnormalized(e + H)? - model.unnormalized(e - H)?) / (2.0 * H);
    Ok(fp / f.powf(model.q().value()) - model.a_q() * e)
}

/// Largest relative deviation of the second differences of `ln_q pdf` on
/// `grid` from the first one. Zero for an exactly quadratic `ln_q pdf`.
pub fn lnq_quadraticity(model: &QGaussianModel, grid: Grid) -> Result<f64> {
    let vals = grid
        .nodes()
        .enumerate()
        .map(|(i, e)| q_log(model.q(), model.pdf(e)).map_err(|err| err.at_index(i)))
        .collect::<Result<Vec<f64>>>()?;
    let d2: Vec<f64> = vals.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect();
    let Some(&first) = d2.first() else {
        return Err(QError::InvalidInput("grid needs at least 3 points".into()));
    };
    Ok(d2
        .iter()
        .map(|d| (d - first).abs() / first.abs())
        .fold(0.0, f64::max))
}

/// The unnormalized frequency curve `f(e) = exp_q(-γ e² + C_q)` for one
/// `C_q`, sampled at `e = ẽ · c^((1-q)/2)` for each rescaled node `ẽ`.
/// Rescaled ordinates `f/c` trace `exp_q(-γ ẽ²)` whatever `C_q` is.
pub fn frequency_rescale(
    q: EntropicIndex,
    gamma: f64,
    c_q: f64,
    grid: Grid,
    curve: usize,
) -> Result<Vec<FigureRow>> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(QError::InvalidInput(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let c = q_exp(q, c_q)?;
    let unit = if q.is_classical() {
        1.0
    } else {
        c.powf(0.5 * q.one_minus())
    };
    grid.nodes()
        .enumerate()
        .map(|(i, et)| {
            let e = et * unit;
            let lnq_f = -gamma * e * e + c_q;
            let f = q_exp(q, lnq_f).map_err(|err| err.at_index(i))?;
            Ok(FigureRow {
                curve,
                scale: c,
                x_raw: e,
                y_raw: f,
                x_rescaled: e / unit,
                y_rescaled: f / c,
                qlog_y: lnq_f,
            })
        })
        .collect()
}

pub const FIG3_Q: f64 = 1.7;
pub const FIG3_SCALES: [f64; 3] = [1.0, 10.0, 100.0];

pub fn fig3_default_grid() -> Grid {
    Grid {
        min: -5.0,
        max: 5.0,
        points: 501,
    }
}

/// Frequency curves `y/c = exp_q(-(x / c^((1-q)/2))²)` for each scale `c`
/// (`γ = 1`, `C_q = ln_q c`). Row `qlog_y` is `-x² + ln_q c`.
pub fn fig3_data(q: EntropicIndex, scales: &[f64], grid: Grid) -> Result<FigureTable> {
    let mut rows = Vec::with_capacity(scales.len() * grid.points);
    for (k, &c) in scales.iter().enumerate() {
        let c_q = q_log(q, c).map_err(|e| e.at_index(k))?;
        let mut curve = frequency_rescale(q, 1.0, c_q, grid, k)?;
        // Record the requested scale rather than its exp_q(ln_q c) round trip.
        for r in &mut curve {
            r.scale = c;
        }
        rows.extend(curve);
    }
    Ok(FigureTable {
        figure: "fig3".into(),
        q: q.value(),
        scales: scales.to_vec(),
        grid,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn q(v: f64) -> EntropicIndex {
        EntropicIndex::new(v).unwrap()
    }

    /// Closed forms via the Gamma function (independent of the quadrature).
    fn z_closed(qv: f64, beta: f64) -> f64 {
        use statrs::function::gamma::ln_gamma;
        if qv == 1.0 {
            (PI / beta).sqrt()
        } else if qv < 1.0 {
            let m = 1.0 / (1.0 - qv);
            (PI / ((1.0 - qv) * beta)).sqrt() * (ln_gamma(m + 1.0) - ln_gamma(m + 1.5)).exp()
        } else {
            let m = 1.0 / (qv - 1.0);
            (PI / ((qv - 1.0) * beta)).sqrt() * (ln_gamma(m - 0.5) - ln_gamma(m)).exp()
        }
    }

    #[test]
    fn beta_examples() {
        for qv in [0.2, 1.0, 1.7, 2.9] {
            assert_eq!(beta_from(q(qv), -2.0, 0.0).unwrap(), 1.0);
        }
        for c in [-3.0, 0.0, 4.0] {
            assert_eq!(beta_from(q(1.0), -3.0, c).unwrap(), 1.5);
        }
        let b = beta_from(q(1.7), -2.0, 0.5).unwrap();
        assert!((b - 1.0 / 0.65).abs() < 1e-15);
        assert!(beta_from(q(1.7), 2.0, 0.0).is_err());
        assert!(matches!(
            beta_from(q(2.0), -2.0, 1.0),
            Err(QError::DomainViolation { .. })
        ));
    }

    #[test]
    fn normalization_examples() {
        assert!((normalization(q(1.0), 1.0).unwrap() - PI.sqrt()).abs() < 1e-10);
        for qv in [1.0 - 1e-6, 1.0 + 1e-6] {
            assert!((normalization(q(qv), 1.0).unwrap() - PI.sqrt()).abs() < 1e-4);
        }
        assert!((normalization(q(0.0), 1.0).unwrap() - 4.0 / 3.0).abs() < 1e-10);
        assert!(matches!(
            normalization(q(3.0), 1.0),
            Err(QError::UnnormalizableModel { .. })
        ));
        assert!(normalization(q(1.5), 0.0).is_err());
    }

    #[test]
    fn normalization_matches_gamma_closed_form() {
        for qv in [-0.5, 0.0, 0.5, 0.9, 1.0, 1.1, 1.5, 2.0, 2.5, 2.8] {
            for beta in [0.5, 1.0, 2.0] {
                let z = normalization(q(qv), beta).unwrap();
                let exact = z_closed(qv, beta);
                assert!(
                    (z - exact).abs() < 1e-10 * exact.max(1.0),
                    "q={qv} beta={beta}: {z} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn power_tail_against_quadrature() {
        // q = 2: (1 + βe²)^-1, tail from E is (π/2 - atan(sqrt(β)E))/sqrt(β).
        let (s, e) = (1.0, 40.0);
        let t = power_tail(s, 1.0, e).unwrap();
        let exact = PI / 2.0 - e.atan();
        assert!((t - exact).abs() < 1e-16);
    }

    #[test]
    fn pdf_examples() {
        let g = QGaussianModel::with_beta(q(1.0), 1.0).unwrap();
        assert!((g.pdf(0.0) - 1.0 / PI.sqrt()).abs() < 1e-12);
        let m = QGaussianModel::new(q(1.7), -2.0, 0.5).unwrap();
        assert_eq!(m.pdf(0.0), 1.0 / m.normalization());
        for e in [0.1, 0.77, 3.2, 40.0] {
            assert_eq!(m.pdf(e), m.pdf(-e));
        }
        let compact = QGaussianModel::with_beta(q(0.5), 1.0).unwrap();
        assert!((compact.support_half_width().unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(compact.pdf(1.5), 0.0);
        assert!(matches!(
            QGaussianModel::with_beta(q(3.0), 1.0),
            Err(QError::UnnormalizableModel { .. })
        ));
    }

    #[test]
    fn pdf_integrates_to_one() {
        for qv in [0.0, 0.5, 1.0, 1.5, 2.0, 2.5] {
            for beta in [0.5, 1.0, 2.0] {
                let m = QGaussianModel::with_beta(q(qv), beta).unwrap();
                let closed = z_closed(qv, beta);
                assert!((m.normalization() / closed - 1.0).abs() < 1e-8);
                assert!((m.total_mass().unwrap() - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn unnormalized_is_scaled_q_gaussian() {
        let m = QGaussianModel::new(q(1.7), -2.0, 0.5).unwrap();
        let c = m.scale();
        for e in [0.0, 0.4, 1.3, 7.0] {
            let lhs = m.unnormalized(e).unwrap();
            let rhs = c * q_exp(q(1.7), -m.beta() * e * e).unwrap();
            assert!((lhs - rhs).abs() < 1e-14 * rhs);
        }
    }

    #[test]
    fn likelihood_classical_reduction() {
        let m = QGaussianModel::with_beta(q(1.0), 0.5).unwrap();
        let s = SampleSet::new(vec![0.3, -1.2, 2.0]).unwrap();
        let ll = q_log_likelihood(&m, 0.1, &s, LikelihoodMode::Strict).unwrap();
        let classical: f64 = s
            .values()
            .iter()
            .map(|x| -0.5 * (x - 0.1) * (x - 0.1) - (2.0 * PI).sqrt().ln())
            .sum();
        assert!((ll - classical).abs() < 1e-12);
    }

    #[test]
    fn likelihood_single_sample_peaks_at_sample() {
        let m = QGaussianModel::with_beta(q(1.7), 1.0).unwrap();
        let s = SampleSet::new(vec![2.5]).unwrap();
        let at = q_log_likelihood(&m, 2.5, &s, LikelihoodMode::Strict).unwrap();
        for d in [-0.5, -1e-3, 1e-3, 0.5] {
            assert!(q_log_likelihood(&m, 2.5 + d, &s, LikelihoodMode::Strict).unwrap() < at);
        }
    }

    #[test]
    fn likelihood_argmax_by_search_is_mean() {
        // Oracle: coarse grid followed by golden-section refinement.
        let m = QGaussianModel::with_beta(q(1.7), 1.0).unwrap();
        let xs = vec![0.4, -1.1, 2.3, 0.9, -0.2, 1.7, 3.1, -0.6, 0.05, 1.2];
        let s = SampleSet::new(xs).unwrap();
        let ll = |t: f64| q_log_likelihood(&m, t, &s, LikelihoodMode::Strict).unwrap();
        let step = 1e-3;
        let best = (-3000..=4000)
            .map(|i| i as f64 * step)
            .max_by(|a, b| ll(*a).total_cmp(&ll(*b)))
            .unwrap();
        assert!((best - s.mean()).abs() <= step);
        let (mut lo, mut hi) = (best - step, best + step);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..60 {
            let (c, d) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if ll(c) > ll(d) {
                hi = d;
            } else {
                lo = c;
            }
        }
        assert!((0.5 * (lo + hi) - s.mean()).abs() < 1e-6);
    }

    #[test]
    fn likelihood_outside_support() {
        let m = QGaussianModel::with_beta(q(0.5), 1.0).unwrap();
        let s = SampleSet::new(vec![0.0, 3.0]).unwrap();
        match q_log_likelihood(&m, 0.0, &s, LikelihoodMode::Strict) {
            Err(QError::DomainViolation { index, constraint }) => {
                assert_eq!(index, Some(1));
                assert!(constraint <= 0.0);
            }
            other => panic!("{other:?}"),
        }
        let pen = q_log_likelihood(&m, 0.0, &s, LikelihoodMode::Penalty).unwrap();
        let inside = q_log(q(0.5), m.pdf(0.0)).unwrap();
        assert!((pen - (inside - 2.0)).abs() < 1e-14);
    }

    #[test]
    fn stationarity_examples() {
        let m = QGaussianModel::with_beta(q(1.7), 1.0).unwrap();
        let sym = SampleSet::new(vec![-1.5, -0.5, 0.5, 1.5]).unwrap();
        let st = mlp_stationarity(&m, &sym).unwrap();
        assert_eq!(st.theta_star, 0.0);
        assert!(st.gradient.abs() < 1e-9);
        assert!(st.is_maximum());

        let s = SampleSet::new(vec![-1.0, 0.0, 0.5, 2.0]).unwrap();
        let st = mlp_stationarity(&m, &s).unwrap();
        assert_eq!(st.theta_star, 0.375);
        assert!(st.curvature < 0.0);
        assert!(st.is_maximum(), "{st:?}");

        let g = QGaussianModel::with_beta(q(1.0), 0.5).unwrap();
        let st = mlp_stationarity(&g, &s).unwrap();
        // Classical: curvature = -n β·2 = -4 for β = 1/2.
        assert!((st.curvature + 4.0).abs() < 1e-5);
        assert!(st.is_maximum());

        let flat = SampleSet::new(vec![1.0, 1.0]).unwrap();
        assert!(mlp_stationarity(&m, &flat).is_err());
    }

    #[test]
    fn ode_residual_examples() {
        let m = QGaussianModel::new(q(1.7), -2.0, 0.5).unwrap();
        assert_eq!(defining_ode_residual(&m, 0.0).unwrap(), 0.0);
        let r = defining_ode_residual(&m, 0.3).unwrap();
        assert!(r.abs() <= 1e-5 * (2.0 * 0.3) + 1e-8, "{r}");
        let g = QGaussianModel::new(q(1.0), -2.0, 0.0).unwrap();
        for e in [0.2, -0.9, 1.4] {
            let r = defining_ode_residual(&g, e).unwrap();
            assert!(r.abs() <= 1e-5 * (2.0 * e).abs() + 1e-8);
        }
    }

    #[test]
    fn lnq_pdf_is_quadratic() {
        for qv in [0.5, 1.3, 1.7] {
            let m = QGaussianModel::with_beta(q(qv), 1.0).unwrap();
            let grid = Grid::new(-1.2, 1.2, 241).unwrap();
            assert!(lnq_quadraticity(&m, grid).unwrap() < 1e-6);
        }
    }

    #[test]
    fn frequency_rescale_examples() {
        let g = Grid::new(-2.0, 2.0, 41).unwrap();
        let rows = frequency_rescale(q(1.7), 1.0, 0.0, g, 0).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.x_raw == r.x_rescaled && r.y_raw == r.y_rescaled));

        let rows = frequency_rescale(q(1.0), 0.7, 1.2, g, 0).unwrap();
        assert!(rows.iter().all(|r| r.x_raw == r.x_rescaled));

        let c10 = q_log(q(1.7), 10.0).unwrap();
        let a = frequency_rescale(q(1.7), 1.0, 0.0, g, 0).unwrap();
        let b = frequency_rescale(q(1.7), 1.0, c10, g, 1).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            assert!((ra.y_rescaled - rb.y_rescaled).abs() < 1e-12 * ra.y_rescaled);
        }
    }

    #[test]
    fn fig3_defaults() {
        let t = fig3_data(q(FIG3_Q), &FIG3_SCALES, fig3_default_grid()).unwrap();
        assert_eq!(t.rows.len(), 3 * 501);
        assert!(t.max_rescaled_gap() < 1e-12);
        let centre = t.curve(0).find(|r| r.x_raw == 0.0).unwrap();
        assert_eq!(centre.y_raw, 1.0);
        let c100 = t.curve(2).find(|r| r.x_raw == 0.0).unwrap();
        // (100^-0.7 - 1)/(-0.7), 40-digit reference.
        assert!((c100.qlog_y - 1.371_698_975_635_214_7).abs() < 1e-14);
    }
}
