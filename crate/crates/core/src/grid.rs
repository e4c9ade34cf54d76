//! Uniform time partitions of `[0, T]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Equidistant partition `0 = t_0 < t_1 < ... < t_N = T` with step `h = T / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
    step: f64,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "horizon must be finite and > 0, got {horizon}"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidGrid("steps must be >= 1".into()));
        }
        Ok(Self {
            horizon,
            steps,
            step: horizon / steps as f64,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Step size `h`.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Node `t_n`. The last node is returned as `T` exactly.
    pub fn node(&self, n: usize) -> f64 {
        assert!(n <= self.steps, "node index {n} beyond N={}", self.steps);
        if n == self.steps {
            self.horizon
        } else {
            n as f64 * self.step
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |n| self.node(n))
    }

    /// Number of fine steps per step of `coarse`, if `coarse` divides `self`.
    pub fn refinement_of(&self, coarse: &TimeGrid) -> Option<usize> {
        if self.horizon != coarse.horizon || !self.steps.is_multiple_of(coarse.steps) {
            return None;
        }
        Some(self.steps / coarse.steps)
    }
}

/// Builds the uniform grid with `N` steps on `[0, T]`.
pub fn make_grid(horizon: f64, steps: usize) -> Result<TimeGrid> {
    TimeGrid::new(horizon, steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_year_twenty_steps() {
        let g = make_grid(0.25, 20).unwrap();
        assert!((g.step() - 0.0125).abs() < 1e-15);
        assert_eq!(g.node(20), 0.25);
        assert_eq!(g.node(0), 0.0);
    }

    #[test]
    fn single_step() {
        let g = make_grid(1.0, 1).unwrap();
        assert_eq!(g.step(), 1.0);
        assert_eq!(g.nodes().collect::<Vec<_>>(), vec![0.0, 1.0]);
    }

    #[test]
    fn thirty_steps() {
        let g = make_grid(0.25, 30).unwrap();
        assert!((g.step() - 0.25 / 30.0).abs() < 1e-18);
        assert!((g.step() * 30.0 - 0.25).abs() <= f64::EPSILON * 0.25);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_grid(0.25, 0).is_err());
        assert!(make_grid(0.0, 4).is_err());
        assert!(make_grid(-1.0, 4).is_err());
        assert!(make_grid(f64::NAN, 4).is_err());
    }

    #[test]
    fn nodes_strictly_increasing() {
        for steps in [1, 2, 3, 7, 20, 264] {
            let g = make_grid(0.25, steps).unwrap();
            let nodes: Vec<f64> = g.nodes().collect();
            assert!(nodes.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(*nodes.last().unwrap(), 0.25);
        }
    }

    #[test]
    fn refinement() {
        let fine = make_grid(1.0, 12).unwrap();
        assert_eq!(fine.refinement_of(&make_grid(1.0, 4).unwrap()), Some(3));
        assert_eq!(fine.refinement_of(&make_grid(1.0, 5).unwrap()), None);
        assert_eq!(fine.refinement_of(&make_grid(2.0, 4).unwrap()), None);
    }
}
