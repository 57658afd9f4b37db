//! ISA troposphere air density and the altitude correction of site metrics.

use crate::error::{Error, Result};
use crate::metrics::SiteMetrics;

/// Sea-level air density, kg/m^3.
pub const SEA_LEVEL_DENSITY: f64 = 1.225;
/// Sea-level temperature, K.
pub const SEA_LEVEL_TEMPERATURE: f64 = 288.15;
/// Temperature lapse rate, K/m.
pub const LAPSE_RATE: f64 = 0.0065;
/// Exponent of the density ratio: g/(R L) - 1.
pub const DENSITY_EXPONENT: f64 = 4.2559;
/// Exponent of the pressure ratio: g/(R L). Exposed as a diagnostic only;
/// all corrections use the density exponent.
pub const PRESSURE_EXPONENT: f64 = 5.2559;
/// The lapse-rate law holds through the troposphere only.
pub const MAX_ALTITUDE: f64 = 11_000.0;

/// Site metrics rescaled to the air density at station altitude.
#[derive(Debug, Clone, Copy)]
pub struct CorrectedMetrics {
    /// Air density at altitude, kg/m^3.
    pub air_density: f64,
    /// rho / rho0.
    pub density_ratio: f64,
    /// WPD rescaled by the density ratio, W/m^2.
    pub wpd_corrected: f64,
    /// NAEP rescaled by the density ratio, GWh/MWp/year.
    pub naep_corrected: f64,
}

fn temperature_ratio(altitude_m: f64) -> Result<f64> {
    if !(0.0..=MAX_ALTITUDE).contains(&altitude_m) {
        return Err(Error::Domain(format!(
            "altitude must be in [0, {MAX_ALTITUDE}] m, got {altitude_m}"
        )));
    }
    Ok(1.0 - LAPSE_RATE * altitude_m / SEA_LEVEL_TEMPERATURE)
}

/// ISA air density at altitude: rho0 (1 - L h / T0)^4.2559.
pub fn air_density(altitude_m: f64) -> Result<f64> {
    Ok(SEA_LEVEL_DENSITY * temperature_ratio(altitude_m)?.powf(DENSITY_EXPONENT))
}

/// Density ratio rho(h) / rho0.
pub fn density_ratio(altitude_m: f64) -> Result<f64> {
    Ok(temperature_ratio(altitude_m)?.powf(DENSITY_EXPONENT))
}

/// ISA pressure ratio p(h) / p0 (diagnostic; not used for corrections).
pub fn pressure_ratio(altitude_m: f64) -> Result<f64> {
    Ok(temperature_ratio(altitude_m)?.powf(PRESSURE_EXPONENT))
}

/// Rescale WPD and NAEP by the density ratio at the station altitude.
///
/// This is a pure scalar correction: the sea-level 1.225 kg/m^3 inputs
/// are multiplied by rho(h)/rho0 rather than reshaping the power curve.
pub fn correct_metrics(metrics: &SiteMetrics, altitude_m: f64) -> Result<CorrectedMetrics> {
    let ratio = density_ratio(altitude_m)?;
    Ok(CorrectedMetrics {
        air_density: SEA_LEVEL_DENSITY * ratio,
        density_ratio: ratio,
        wpd_corrected: ratio * metrics.wpd,
        naep_corrected: ratio * metrics.naep,
    })
}
