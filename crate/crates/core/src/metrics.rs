//! Wind-energy performance metrics over a fitted model.

use crate::error::{Error, Result};
use crate::powercurve::PowerCurve;
use crate::quad;
use crate::weibull::{gamma, WeibullModel};

/// Hours in the 365-day reference year used by the energy integral.
pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Default exceedance threshold marking a good site, m/s.
pub const DEFAULT_EXCEEDANCE_THRESHOLD_MPS: f64 = 6.0;

/// Which power-curve evaluator feeds the energy integral. The tabulated
/// curve is primary; the polynomial is an alternative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CurveEvaluator {
    #[default]
    Tabular,
    Polynomial,
}

/// Options for the annual-energy integration.
#[derive(Debug, Clone)]
pub struct NaepOptions {
    pub evaluator: CurveEvaluator,
    pub tau_hours: f64,
    /// Absolute quadrature tolerance on the expected power, kW.
    pub abs_tol_kw: f64,
}

impl Default for NaepOptions {
    fn default() -> Self {
        Self {
            evaluator: CurveEvaluator::Tabular,
            tau_hours: HOURS_PER_YEAR,
            abs_tol_kw: 1e-9,
        }
    }
}

/// Per-site performance bundle at a given air density.
#[derive(Debug, Clone, Copy)]
pub struct SiteMetrics {
    /// Wind power density, W/m^2.
    pub wpd: f64,
    /// Probability of exceeding the threshold speed.
    pub p_exceed: f64,
    pub exceed_threshold: f64,
    /// Normalized annual energy production, GWh/MWp/year.
    pub naep: f64,
    pub air_density: f64,
    pub hours_per_year: f64,
}

/// Available wind power per unit swept area, W/m^2: rho v^3 / 2.
pub fn instantaneous_power_density(v: f64, rho: f64) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::Domain(format!("wind speed must be >= 0, got {v}")));
    }
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("air density must be > 0, got {rho}")));
    }
    Ok(0.5 * rho * v * v * v)
}

/// Expected wind power density of the regime, rho c^3 gamma(1 + 3/k) / 2.
pub fn wind_power_density(model: &WeibullModel, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("air density must be > 0, got {rho}")));
    }
    let c = model.scale();
    Ok(0.5 * rho * c * c * c * gamma(1.0 + 3.0 / model.shape())?)
}

/// Probability that the wind speed exceeds `v_threshold`.
pub fn exceedance_probability(model: &WeibullModel, v_threshold: f64) -> Result<f64> {
    if !(v_threshold >= 0.0) {
        return Err(Error::Domain(format!(
            "threshold must be >= 0, got {v_threshold}"
        )));
    }
    Ok((-(v_threshold / model.scale()).powf(model.shape())).exp())
}

/// Normalized annual energy production in GWh per MWp per year.
///
/// Integrates f(v) P(v) between cut-in and cut-out. The integration is
/// split at every tabulated node (the interpolant has derivative jumps
/// there) and the full-power plateau uses the exact closed form
/// `rated * (F(cut_out) - F(rated))`.
pub fn naep(model: &WeibullModel, curve: &PowerCurve, options: &NaepOptions) -> Result<f64> {
    if !(options.tau_hours > 0.0) {
        return Err(Error::Domain(format!(
            "tau_hours must be > 0, got {}",
            options.tau_hours
        )));
    }
    if !(options.abs_tol_kw > 0.0) {
        return Err(Error::Domain(format!(
            "quadrature tolerance must be > 0, got {}",
            options.abs_tol_kw
        )));
    }
    let rated = curve.rated_speed();
    let cut_in = curve.cut_in();
    let cut_out = curve.cut_out();

    // breakpoints of the partial-load branch
    let mut nodes: Vec<f64> = match options.evaluator {
        CurveEvaluator::Tabular => curve
            .points()
            .iter()
            .map(|(v, _)| *v)
            .filter(|v| *v > cut_in && *v < rated)
            .collect(),
        CurveEvaluator::Polynomial => Vec::new(),
    };
    nodes.insert(0, cut_in);
    nodes.push(rated);

    let power = |v: f64| -> f64 {
        let p = match options.evaluator {
            CurveEvaluator::Tabular => curve.power_tabular(v),
            CurveEvaluator::Polynomial => curve.power_polynomial(v),
        };
        p.expect("curve evaluated inside its domain")
    };

    let segments = nodes.len() - 1;
    let seg_tol = options.abs_tol_kw / (segments as f64 + 1.0);
    let mut expected_kw = 0.0;
    let mut err_total = 0.0;
    for pair in nodes.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let q = quad::integrate(&|v| model.pdf(v).unwrap() * power(v), a, b, seg_tol);
        expected_kw += q.value;
        err_total += q.abs_error;
    }
    // plateau at rated power up to cut-out, then shutdown
    expected_kw += curve.rated_power() * (model.cdf(cut_out)? - model.cdf(rated)?);

    if err_total > options.abs_tol_kw {
        return Err(Error::Accuracy {
            estimate: expected_kw * options.tau_hours / 1e6,
            achieved: err_total,
            target: options.abs_tol_kw,
        });
    }
    // kW * h = kWh; 1 GWh = 1e6 kWh
    Ok(expected_kw * options.tau_hours / 1e6)
}

/// Assemble WPD, exceedance, and NAEP for one site.
pub fn site_metrics(
    model: &WeibullModel,
    curve: &PowerCurve,
    rho: f64,
    tau_hours: f64,
    exceed_threshold: f64,
    evaluator: CurveEvaluator,
) -> Result<SiteMetrics> {
    let options = NaepOptions {
        evaluator,
        tau_hours,
        ..NaepOptions::default()
    };
    Ok(SiteMetrics {
        wpd: wind_power_density(model, rho)?,
        p_exceed: exceedance_probability(model, exceed_threshold)?,
        exceed_threshold,
        naep: naep(model, curve, &options)?,
        air_density: rho,
        hours_per_year: tau_hours,
    })
}
