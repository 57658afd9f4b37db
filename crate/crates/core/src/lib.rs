//! Wind-resource assessment from station observations.
//!
//! Fits two-parameter Weibull wind-speed models to raw observations by
//! maximum likelihood and derives the standard site metrics on top of
//! them: characteristic speeds, wind power density, exceedance
//! probability, and normalized annual energy production against a bundled
//! 1 MWp reference power curve; plus ISA altitude corrections, 36-sector
//! wind roses, and reproduction of the bundled reference station tables.

// domain guards use negated comparisons (`!(v >= 0.0)`) so NaN is rejected
// along with out-of-range values; tabulated constants keep their published
// digits even where f64 rounds them
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod atmosphere;
pub mod error;
pub mod estimation;
pub mod ingest;
pub mod metrics;
pub mod powercurve;
pub mod quad;
pub mod reference;
pub mod report;
pub mod stations;
pub mod weibull;
pub mod windrose;

pub use error::{Error, Result};
pub use estimation::{fit_mle, FitOptions, FitResult};
pub use metrics::{CurveEvaluator, SiteMetrics};
pub use powercurve::PowerCurve;
pub use report::{AnalysisConfig, SiteReport};
pub use stations::{Registry, StationMeta};
pub use weibull::{CharacteristicSpeeds, WeibullModel};
pub use windrose::WindRose;
