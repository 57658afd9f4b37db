//! The standardized 1 MWp turbine power curve and its polynomial form.

use std::path::Path;

use crate::error::{Error, Result};

/// The 23 tabulated (speed m/s, power kW) points of the bundled curve.
pub const STANDARD_POINTS: [(f64, f64); 23] = [
    (0.0, 0.0),
    (3.5, 0.0),
    (4.0, 24.0),
    (4.5, 44.0),
    (5.0, 69.33),
    (5.5, 100.0),
    (6.0, 136.67),
    (6.5, 179.33),
    (7.0, 229.33),
    (7.5, 285.33),
    (8.0, 352.0),
    (8.5, 429.33),
    (9.0, 516.0),
    (9.5, 617.67),
    (10.0, 719.33),
    (10.5, 807.33),
    (11.0, 894.67),
    (11.5, 934.0),
    (12.0, 973.33),
    (12.5, 984.67),
    (13.0, 996.0),
    (13.5, 1000.0),
    (25.0, 1000.0),
];

/// Coefficients a1..a6 of the sixth-order fit in (v - cut_in) on the
/// partial-load branch.
pub const STANDARD_POLY_COEFFS: [f64; 6] = [
    11.629989, 51.785673, -26.361878, 6.651802, -0.696387, 0.025188,
];

pub const CUT_IN_MPS: f64 = 3.5;
pub const RATED_SPEED_MPS: f64 = 13.5;
pub const CUT_OUT_MPS: f64 = 25.0;
pub const RATED_POWER_KW: f64 = 1000.0;

/// Deviation statistics of the polynomial against the tabulated points.
#[derive(Debug, Clone, Copy)]
pub struct CurveFitErrors {
    pub mad_kw: f64,
    pub rmse_kw: f64,
    pub max_abs_dev_kw: f64,
    /// Speed at which the largest absolute deviation occurs.
    pub argmax_speed_mps: f64,
}

/// Tabulated turbine power curve. Immutable after construction.
///
/// Output is zero at or below cut-in, rated between the rated speed and
/// cut-out, and zero above cut-out (shutdown). In between, the tabulated
/// points are interpolated linearly.
#[derive(Debug, Clone)]
pub struct PowerCurve {
    points: Vec<(f64, f64)>,
    cut_in: f64,
    rated_speed: f64,
    cut_out: f64,
    rated_power: f64,
    poly_coeffs: Option<[f64; 6]>,
}

impl PowerCurve {
    /// The bundled standardized 1 MWp curve.
    pub fn standard() -> Self {
        Self {
            points: STANDARD_POINTS.to_vec(),
            cut_in: CUT_IN_MPS,
            rated_speed: RATED_SPEED_MPS,
            cut_out: CUT_OUT_MPS,
            rated_power: RATED_POWER_KW,
            poly_coeffs: Some(STANDARD_POLY_COEFFS),
        }
    }

    /// Build a user curve from (speed, power) pairs.
    ///
    /// The same invariants as the bundled curve apply: first point (0, 0),
    /// strictly increasing speeds, nondecreasing power bounded by the
    /// final (rated) value. Cut-in is the last zero-power speed and the
    /// rated speed is the first at full power.
    pub fn from_points(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Curve(format!(
                "need at least 2 points, have {}",
                points.len()
            )));
        }
        if points[0] != (0.0, 0.0) {
            return Err(Error::Curve(format!(
                "first point must be (0, 0), found ({}, {})",
                points[0].0, points[0].1
            )));
        }
        for pair in points.windows(2) {
            if !(pair[1].0 > pair[0].0) {
                return Err(Error::Curve(format!(
                    "speeds must be strictly increasing ({} then {})",
                    pair[0].0, pair[1].0
                )));
            }
            if !(pair[1].1 >= pair[0].1) {
                return Err(Error::Curve(format!(
                    "power must be nondecreasing ({} kW then {} kW)",
                    pair[0].1, pair[1].1
                )));
            }
        }
        if points.iter().any(|(v, p)| !v.is_finite() || !p.is_finite()) {
            return Err(Error::Curve("non-finite entry in curve".to_string()));
        }
        let rated_power = points.last().unwrap().1;
        if !(rated_power > 0.0) {
            return Err(Error::Curve("curve never produces power".to_string()));
        }
        let cut_out = points.last().unwrap().0;
        let cut_in = points
            .iter()
            .take_while(|(_, p)| *p == 0.0)
            .last()
            .map(|(v, _)| *v)
            .unwrap_or(0.0);
        let rated_speed = points
            .iter()
            .find(|(_, p)| *p == rated_power)
            .map(|(v, _)| *v)
            .unwrap();
        Ok(Self {
            points,
            cut_in,
            rated_speed,
            cut_out,
            rated_power,
            poly_coeffs: None,
        })
    }

    /// Load a user curve from a two-column CSV (`speed_mps,power_kw`).
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("").trim();
        if header != "speed_mps,power_kw" {
            return Err(Error::Schema(format!(
                "curve header must be 'speed_mps,power_kw', found '{header}'"
            )));
        }
        let mut points = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let (v, p) = (cols.next(), cols.next());
            let parse = |s: Option<&str>, col: &str| -> Result<f64> {
                s.and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Schema(format!("curve row {}: bad {col}", i + 2)))
            };
            points.push((parse(v, "speed_mps")?, parse(p, "power_kw")?));
        }
        Self::from_points(points)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn cut_in(&self) -> f64 {
        self.cut_in
    }

    pub fn rated_speed(&self) -> f64 {
        self.rated_speed
    }

    pub fn cut_out(&self) -> f64 {
        self.cut_out
    }

    pub fn rated_power(&self) -> f64 {
        self.rated_power
    }

    pub fn poly_coeffs(&self) -> Option<[f64; 6]> {
        self.poly_coeffs
    }

    /// Electric output (kW) by linear interpolation of the table.
    pub fn power_tabular(&self, v: f64) -> Result<f64> {
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("power requires v >= 0, got {v}")));
        }
        if v > self.cut_out {
            return Ok(0.0);
        }
        if v >= self.rated_speed {
            return Ok(self.rated_power);
        }
        if v <= self.cut_in {
            return Ok(0.0);
        }
        // bracketing segment; v is strictly inside (cut_in, rated_speed)
        let idx = self.points.partition_point(|(s, _)| *s <= v);
        let (v0, p0) = self.points[idx - 1];
        let (v1, p1) = self.points[idx];
        Ok(p0 + (p1 - p0) * (v - v0) / (v1 - v0))
    }

    /// Electric output (kW) from the sixth-order branch, clamped to the
    /// physical band [0, rated].
    pub fn power_polynomial(&self, v: f64) -> Result<f64> {
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("power requires v >= 0, got {v}")));
        }
        let coeffs = self
            .poly_coeffs
            .ok_or_else(|| Error::Curve("this curve has no polynomial coefficients".to_string()))?;
        if v > self.cut_out {
            return Ok(0.0);
        }
        if v >= self.rated_speed {
            return Ok(self.rated_power);
        }
        if v < self.cut_in {
            return Ok(0.0);
        }
        let x = v - self.cut_in;
        // Horner over a1..a6 with the constant term absent
        let mut acc = 0.0;
        for &a in coeffs.iter().rev() {
            acc = (acc + a) * x;
        }
        Ok(acc.clamp(0.0, self.rated_power))
    }

    /// MAD, RMSE, and worst deviation of the polynomial vs the table.
    pub fn fit_errors(&self) -> Result<CurveFitErrors> {
        let n = self.points.len() as f64;
        let mut abs_sum = 0.0;
        let mut sq_sum = 0.0;
        let mut max_abs = 0.0_f64;
        let mut argmax = self.points[0].0;
        for &(v, p) in &self.points {
            let dev = self.power_polynomial(v)? - p;
            abs_sum += dev.abs();
            sq_sum += dev * dev;
            if dev.abs() > max_abs {
                max_abs = dev.abs();
                argmax = v;
            }
        }
        Ok(CurveFitErrors {
            mad_kw: abs_sum / n,
            rmse_kw: (sq_sum / n).sqrt(),
            max_abs_dev_kw: max_abs,
            argmax_speed_mps: argmax,
        })
    }
}
