//! Functions known only through their values on a finite set of probe points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Point};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub points: Vec<Point>,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(points: Vec<Point>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::Domain("points and values differ in length".into()));
        }
        Ok(SampledFunction { points, values })
    }

    /// Value at a stored probe (matched within `1e-12`).
    pub fn value_at(&self, x: &[f64]) -> Result<f64> {
        self.points
            .iter()
            .position(|p| p.len() == x.len() && linalg::approx_eq(p, x, 1e-12))
            .map(|k| self.values[k])
            .ok_or_else(|| Error::Domain("point is not a probe of the sampled function".into()))
    }

    /// Largest absolute difference to another function on the same probes.
    pub fn sup_distance(&self, other: &SampledFunction) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(Error::Domain("sampled functions live on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// CSV with one row per probe: coordinates then value.
    pub fn to_csv(&self) -> Result<String> {
        let dim = self.points.first().map_or(0, |p| p.len());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = (0..dim).map(|j| format!("x{j}")).collect();
        header.push("value".into());
        w.write_record(&header).map_err(|e| Error::Domain(e.to_string()))?;
        for (p, v) in self.points.iter().zip(&self.values) {
            let mut row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            row.push(v.to_string());
            w.write_record(&row).map_err(|e| Error::Domain(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Domain(e.to_string()))
    }
}
