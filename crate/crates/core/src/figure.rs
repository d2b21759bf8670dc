//! Tabular curve data emitted by the figure generators.

use serde::Serialize;

use crate::error::{QError, Result};

/// Uniform grid on `[min, max]` with `points >= 2` nodes (or a single node
/// when `min == max`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || max < min {
            return Err(QError::InvalidInput(format!(
                "grid bounds must be finite with min <= max, got [{min}, {max}]"
            )));
        }
        if points == 0 || (points == 1 && min != max) {
            return Err(QError::InvalidInput(format!(
                "grid on [{min}, {max}] needs at least 2 points, got {points}"
            )));
        }
        Ok(Grid { min, max, points })
    }

    /// Node `i`, computed as `min + i*h` so endpoints are exact.
    pub fn node(&self, i: usize) -> f64 {
        if self.points == 1 {
            return self.min;
        }
        if i + 1 == self.points {
            return self.max;
        }
        let h = (self.max - self.min) / (self.points - 1) as f64;
        self.min + i as f64 * h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.node(i))
    }
}

/// One sample of one curve, in raw and rescaled coordinates.
///
/// `qlog_y` is `ln_q` of the raw ordinate, taken from the linear q-log form
/// rather than by logging `y_raw`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FigureRow {
    pub curve: usize,
    pub scale: f64,
    pub x_raw: f64,
    pub y_raw: f64,
    pub x_rescaled: f64,
    pub y_rescaled: f64,
    pub qlog_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureTable {
    pub figure: String,
    pub q: f64,
    pub scales: Vec<f64>,
    pub grid: Grid,
    pub rows: Vec<FigureRow>,
}

impl FigureTable {
    /// Rows of curve `k`, in grid order.
    pub fn curve(&self, k: usize) -> impl Iterator<Item = &FigureRow> + '_ {
        self.rows.iter().filter(move |r| r.curve == k)
    }

    /// Largest relative gap between the rescaled ordinates of every curve and
    /// those of the first curve at the same grid node.
    pub fn max_rescaled_gap(&self) -> f64 {
        let reference: Vec<f64> = self.curve(0).map(|r| r.y_rescaled).collect();
        let mut worst: f64 = 0.0;
        for k in 1..self.scales.len() {
            for (r, &y0) in self.curve(k).zip(&reference) {
                worst = worst.max((r.y_rescaled - y0).abs() / y0.abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = Grid::new(0.0, 5.0, 501).unwrap();
        let nodes: Vec<f64> = g.nodes().collect();
        assert_eq!(nodes.len(), 501);
        assert_eq!(nodes[0], 0.0);
        assert_eq!(nodes[500], 5.0);
        assert!((nodes[100] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_bad_bounds() {
        assert!(Grid::new(1.0, 0.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        assert!(Grid::new(0.0, f64::NAN, 3).is_err());
        assert_eq!(Grid::new(2.0, 2.0, 1).unwrap().node(0), 2.0);
    }
}
