//! The nonlinear system `dy/dx = λ y^q`, `λ = ±1`.
//!
//! In q-log coordinates the system is linear, `ln_q y = λx + ln_q C0`, so
//! every solution is `y = C0 exp_q(λx / C0^(1-q))`. The constant `C0` is fixed
//! by the initial condition and sets the scale unit of both axes: the rescaled
//! pair `(x / C0^(1-q), y / C0)` always traces `exp_q(λx)`.
//!
//! A fixed-step RK4 integrator is provided as an independent check on the
//! closed form.

use crate::error::{QError, Result};
use crate::figure::{FigureRow, FigureTable, Grid};
use crate::qcore::{exp_bracket, q_exp, q_log, EntropicIndex};

/// Sign of the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Growth,
    Decay,
}

impl Direction {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Direction::Growth => 1.0,
            Direction::Decay => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition {
    pub x0: f64,
    pub y0: f64,
}

impl InitialCondition {
    pub fn new(x0: f64, y0: f64) -> Result<Self> {
        if !x0.is_finite() {
            return Err(QError::InvalidInput(format!("non-finite x0 {x0}")));
        }
        if !(y0 > 0.0 && y0.is_finite()) {
            return Err(QError::NonPositiveArgument { value: y0 });
        }
        Ok(InitialCondition { x0, y0 })
    }
}

/// The positive constant `C0` with `ln_q C0 = ln_q y0 - λ x0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RescaleFactor(f64);

impl RescaleFactor {
    pub fn new(c0: f64) -> Result<Self> {
        if c0 > 0.0 && c0.is_finite() {
            Ok(RescaleFactor(c0))
        } else {
            Err(QError::NonPositiveArgument { value: c0 })
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `C0^(1-q)`, the unit of the x axis.
    pub fn x_unit(self, q: EntropicIndex) -> f64 {
        if q.is_classical() {
            1.0
        } else {
            self.0.powf(q.one_minus())
        }
    }
}

/// `C0 = exp_q(ln_q y0 - x0)` for the growth system `dy/dx = y^q`.
pub fn rescale_factor(q: EntropicIndex, ic: InitialCondition) -> Result<RescaleFactor> {
    rescale_factor_directed(q, ic, Direction::Growth)
}

/// `C0 = exp_q(ln_q y0 - λ x0)`.
pub fn rescale_factor_directed(
    q: EntropicIndex,
    ic: InitialCondition,
    direction: Direction,
) -> Result<RescaleFactor> {
    let arg = q_log(q, ic.y0)? - direction.sign() * ic.x0;
    RescaleFactor::new(q_exp(q, arg)?)
}

/// `C0 exp_q(λx / C0^(1-q))`.
pub fn analytic_solution(
    q: EntropicIndex,
    c0: RescaleFactor,
    direction: Direction,
    x: f64,
) -> Result<f64> {
    let arg = direction.sign() * x / c0.x_unit(q);
    Ok(c0.value() * q_exp(q, arg)?)
}

/// Points `(x, ln_q y)` on the line `ln_q y = λx + ln_q C0`, evaluated from
/// the line itself. Each `x` must lie where the solution exists.
pub fn q_log_line(
    q: EntropicIndex,
    c0: RescaleFactor,
    direction: Direction,
    xs: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let intercept = q_log(q, c0.value())?;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let v = direction.sign() * x + intercept;
            let b = exp_bracket(q, v);
            if q.is_classical() || b > 0.0 {
                Ok((x, v))
            } else {
                Err(QError::DomainViolation {
                    constraint: b,
                    index: Some(i),
                })
            }
        })
        .collect()
}

/// Samples of a numerically integrated solution, `x` strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub q: EntropicIndex,
    pub direction: Direction,
    pub samples: Vec<(f64, f64)>,
}

impl Trajectory {
    /// Largest relative gap to the closed-form solution with rescale factor `c0`.
    pub fn max_deviation_from_analytic(&self, c0: RescaleFactor) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &(x, y) in &self.samples {
            let exact = analytic_solution(self.q, c0, self.direction, x)?;
            worst = worst.max((y - exact).abs() / exact);
        }
        Ok(worst)
    }

    /// Rescale to `(x / C0^(1-q), y / C0)` and compare the central-difference
    /// slope at each interior sample against `λ ỹ^q`. Returns the largest
    /// relative error.
    pub fn rescaling_invariance_residual(&self, c0: RescaleFactor) -> f64 {
        let unit = c0.x_unit(self.q);
        let scaled: Vec<(f64, f64)> = self
            .samples
            .iter()
            .map(|&(x, y)| (x / unit, y / c0.value()))
            .collect();
        let lambda = self.direction.sign();
        let qv = self.q.value();
        scaled
            .windows(3)
            .map(|w| {
                let slope = (w[2].1 - w[0].1) / (w[2].0 - w[0].0);
                let rhs = lambda * w[1].1.powf(qv);
                (slope - rhs).abs() / rhs.abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Guard for the finite-time singularity (growth, q > 1) and the support
/// edge (decay, q < 1).
const BRACKET_FLOOR: f64 = 1e-12;
const Y_MAX: f64 = 1e300;

/// Classical fixed-step RK4 for `dy/dx = λ y^q` on `[x0, x_end]`.
///
/// The last step is shortened to land on `x_end`. Integration stops with
/// [`QError::BlowupDetected`] if `y` leaves `(0, 1e300)` or the closed-form
/// bracket `1 + (1-q)(λ(x - x0) + ln_q y0)` drops below `1e-12`.
pub fn integrate_ode(
    q: EntropicIndex,
    ic: InitialCondition,
    direction: Direction,
    x_end: f64,
    step: f64,
) -> Result<Trajectory> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(QError::InvalidInput(format!(
            "step must be positive, got {step}"
        )));
    }
    if !(x_end > ic.x0 && x_end.is_finite()) {
        return Err(QError::InvalidInput(format!(
            "x_end = {x_end} must exceed x0 = {}",
            ic.x0
        )));
    }
    let lambda = direction.sign();
    let qv = q.value();
    let lnq_y0 = q_log(q, ic.y0)?;
    let bracket = |x: f64| exp_bracket(q, lambda * (x - ic.x0) + lnq_y0);
    let rhs = |y: f64| -> Option<f64> {
        if y > 0.0 && y < Y_MAX {
            Some(lambda * y.powf(qv))
        } else {
            None
        }
    };

    let span = x_end - ic.x0;
    // A ratio within rounding of an integer is that integer, so no sliver
    // step is appended.
    let ratio = span / step;
    let n_steps = if (ratio - ratio.round()).abs() <= 1e-9 * ratio {
        ratio.round()
    } else {
        ratio.ceil()
    }
    .max(1.0) as usize;
    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push((ic.x0, ic.y0));
    let mut y = ic.y0;
    let mut x = ic.x0;
    for i in 1..=n_steps {
        let x_next = if i == n_steps {
            x_end
        } else {
            ic.x0 + i as f64 * step
        };
        let h = x_next - x;
        if !q.is_classical() && bracket(x_next) < BRACKET_FLOOR {
            return Err(QError::BlowupDetected { x: x_next, y });
        }
        let blowup = || QError::BlowupDetected { x, y };
        let k1 = rhs(y).ok_or_else(blowup)?;
        let k2 = rhs(y + 0.5 * h * k1).ok_or_else(blowup)?;
        let k3 = rhs(y + 0.5 * h * k2).ok_or_else(blowup)?;
        let k4 = rhs(y + h * k3).ok_or_else(blowup)?;
        let y_next = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        if !(y_next > 0.0 && y_next < Y_MAX) {
            return Err(QError::BlowupDetected {
                x: x_next,
                y: y_next,
            });
        }
        x = x_next;
        y = y_next;
        samples.push((x, y));
    }
    Ok(Trajectory {
        q,
        direction,
        samples,
    })
}

/// The rescaling induced by a shift `x ↦ x + c`:
/// `exp_q(x + c) = y_scale · exp_q(x / x_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftRescaling {
    pub y_scale: f64,
    pub x_scale: f64,
}

impl ShiftRescaling {
    /// `y_scale · exp_q(x / x_scale)`.
    pub fn apply(&self, q: EntropicIndex, x: f64) -> Result<f64> {
        Ok(self.y_scale * q_exp(q, x / self.x_scale)?)
    }
}

/// `y_scale = exp_q(c)`, `x_scale = exp_q(c)^(1-q) = 1 + (1-q)c`.
pub fn shift_expansion(q: EntropicIndex, c: f64) -> Result<ShiftRescaling> {
    let y_scale = q_exp(q, c)?;
    let x_scale = if q.is_classical() {
        1.0
    } else {
        exp_bracket(q, c)
    };
    Ok(ShiftRescaling { y_scale, x_scale })
}

/// Shift by `c1`, then by `c2` measured in the rescaled unit left by the
/// first shift. Scales multiply.
pub fn compose_shifts(q: EntropicIndex, c1: f64, c2: f64) -> Result<ShiftRescaling> {
    let a = shift_expansion(q, c1)?;
    let b = shift_expansion(q, c2)?;
    Ok(ShiftRescaling {
        y_scale: a.y_scale * b.y_scale,
        x_scale: a.x_scale * b.x_scale,
    })
}

/// The single same-unit shift equivalent to [`compose_shifts`]`(c1, c2)`:
/// `c1 + c2 + (1-q) c1 c2`. The second shift is worth `c2 (1 + (1-q) c1)` in
/// the original unit, so shifts only add when `q = 1`.
pub fn equivalent_single_shift(q: EntropicIndex, c1: f64, c2: f64) -> f64 {
    c1 + c2 + q.one_minus() * c1 * c2
}

pub const FIG2_Q: f64 = 1.3;
pub const FIG2_SCALES: [f64; 3] = [1.0, 10.0, 20.0];

pub fn fig2_default_grid() -> Grid {
    Grid {
        min: 0.0,
        max: 5.0,
        points: 501,
    }
}

/// Decay curves `y = C exp_q(-x / C^(1-q))` for each `C`, sampled on a common
/// grid of rescaled abscissae `x̃ = x / C^(1-q)`.
///
/// Row `qlog_y` is the line `ln_q y = -x + ln_q C`.
pub fn fig2_data(q: EntropicIndex, scales: &[f64], grid: Grid) -> Result<FigureTable> {
    let mut rows = Vec::with_capacity(scales.len() * grid.points);
    for (k, &c) in scales.iter().enumerate() {
        let c0 = RescaleFactor::new(c).map_err(|e| e.at_index(k))?;
        let unit = c0.x_unit(q);
        let intercept = q_log(q, c)?;
        for (i, xt) in grid.nodes().enumerate() {
            let x_raw = xt * unit;
            let y_raw =
                analytic_solution(q, c0, Direction::Decay, x_raw).map_err(|e| e.at_index(i))?;
            rows.push(FigureRow {
                curve: k,
                scale: c,
                x_raw,
                y_raw,
                x_rescaled: x_raw / unit,
                y_rescaled: y_raw / c,
                qlog_y: -x_raw + intercept,
            });
        }
    }
    Ok(FigureTable {
        figure: "fig2".into(),
        q: q.value(),
        scales: scales.to_vec(),
        grid,
        rows,
    })
}
