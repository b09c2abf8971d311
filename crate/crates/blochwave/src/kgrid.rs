//! Uniform periodic k grids.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub points: usize,
    /// Lattice constant along the axis, Å.
    pub a: f64,
    /// Fraction of the Brillouin zone covered, centred on k = 0.
    #[serde(default = "one")]
    pub extent: f64,
}

fn one() -> f64 {
    1.0
}

impl Axis {
    /// Points k_i = −f π/a + i f 2π/(a N); the far endpoint is the periodic image of the first.
    pub fn values(&self) -> Vec<f64> {
        let span = self.extent * 2.0 * PI / self.a;
        (0..self.points)
            .map(|i| -0.5 * span + span * i as f64 / self.points as f64)
            .collect()
    }

    pub fn spacing(&self) -> f64 {
        self.extent * 2.0 * PI / (self.a * self.points as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KGrid {
    pub axes: Vec<Axis>,
}

impl KGrid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(Error::InvalidInput("k grid must have 1 to 3 axes".into()));
        }
        for ax in &axes {
            if ax.points < 2 {
                return Err(Error::InvalidInput("each k axis needs at least 2 points".into()));
            }
            if !(ax.a > 0.0) || !(ax.extent > 0.0 && ax.extent <= 1.0) {
                return Err(Error::InvalidInput("k axis needs a > 0 and extent in (0, 1]".into()));
            }
        }
        Ok(Self { axes })
    }

    /// Full Brillouin zone in one dimension.
    pub fn line(points: usize, a: f64) -> Result<Self> {
        Self::new(vec![Axis { points, a, extent: 1.0 }])
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points along the first axis.
    pub fn points_1d(&self) -> Vec<f64> {
        self.axes[0].values()
    }

    /// All points as coordinate vectors, first axis fastest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let per_axis: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect();
        (0..self.len())
            .map(|mut idx| {
                per_axis
                    .iter()
                    .map(|vals| {
                        let v = vals[idx % vals.len()];
                        idx /= vals.len();
                        v
                    })
                    .collect()
            })
            .collect()
    }
}
