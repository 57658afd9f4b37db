//! Per-station analysis pipeline and table rendering.

use crate::atmosphere::{self, CorrectedMetrics};
use crate::error::{Error, Result};
use crate::estimation::{self, FitOptions, FitResult, Validation};
use crate::ingest::ObservationSeries;
use crate::metrics::{self, CurveEvaluator, SiteMetrics};
use crate::powercurve::PowerCurve;
use crate::stations::StationMeta;
use crate::weibull::CharacteristicSpeeds;
use crate::windrose::{self, DominantDirections, WindRose};

/// Everything configurable about a station analysis run.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub fit: FitOptions,
    pub air_density: f64,
    pub tau_hours: f64,
    pub exceed_threshold_mps: f64,
    pub evaluator: CurveEvaluator,
    /// Observations below this speed carry no meaningful direction.
    pub calm_threshold_mps: f64,
    pub bin_width_mps: f64,
    /// Modeled-vs-numerical mean gap allowed by the fit validation.
    pub mean_gap_threshold: f64,
    pub secondary_direction_threshold: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            fit: FitOptions::default(),
            air_density: atmosphere::SEA_LEVEL_DENSITY,
            tau_hours: metrics::HOURS_PER_YEAR,
            exceed_threshold_mps: metrics::DEFAULT_EXCEEDANCE_THRESHOLD_MPS,
            evaluator: CurveEvaluator::Tabular,
            calm_threshold_mps: 0.5,
            bin_width_mps: 0.5,
            mean_gap_threshold: 0.02,
            secondary_direction_threshold: windrose::DEFAULT_SECONDARY_THRESHOLD,
        }
    }
}

/// Density-normalized speed histogram with bins [i w, (i+1) w) from zero.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub bin_width: f64,
    pub counts: Vec<u64>,
    pub n: u64,
}

impl Histogram {
    /// Bin heights normalized so that sum(height * width) = 1, making the
    /// histogram directly comparable with a probability density.
    pub fn densities(&self) -> Vec<f64> {
        let norm = self.n as f64 * self.bin_width;
        self.counts.iter().map(|&c| c as f64 / norm).collect()
    }

    pub fn bin_edges(&self, index: usize) -> (f64, f64) {
        (
            index as f64 * self.bin_width,
            (index + 1) as f64 * self.bin_width,
        )
    }
}

/// Histogram of speeds with a fixed bin width starting at zero.
pub fn histogram(speeds: &[f64], bin_width: f64) -> Result<Histogram> {
    if !(bin_width > 0.0) {
        return Err(Error::Domain(format!(
            "bin width must be > 0, got {bin_width}"
        )));
    }
    if speeds.is_empty() {
        return Err(Error::InsufficientData(
            "histogram of an empty speed list".to_string(),
        ));
    }
    let mut counts: Vec<u64> = Vec::new();
    for &v in speeds {
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("histogram requires v >= 0, got {v}")));
        }
        let bin = (v / bin_width).floor() as usize;
        if bin >= counts.len() {
            counts.resize(bin + 1, 0);
        }
        counts[bin] += 1;
    }
    Ok(Histogram {
        bin_width,
        counts,
        n: speeds.len() as u64,
    })
}

/// Full per-station result bundle.
#[derive(Debug, Clone)]
pub struct SiteReport {
    pub meta: StationMeta,
    pub fit: FitResult,
    pub validation: Validation,
    pub speeds: CharacteristicSpeeds,
    pub metrics: SiteMetrics,
    pub corrected: CorrectedMetrics,
    /// Absent when the series carries no usable directions.
    pub rose: Option<WindRose>,
    pub dominant: Option<DominantDirections>,
    pub histogram: Histogram,
}

/// Run the whole pipeline for one station.
pub fn analyze_station(
    series: &ObservationSeries,
    meta: &StationMeta,
    curve: &PowerCurve,
    config: &AnalysisConfig,
) -> Result<SiteReport> {
    let inner = || -> Result<SiteReport> {
        let speeds = series.speeds();
        let fit = estimation::fit_mle(&speeds, &config.fit)?;
        let validation = estimation::validate_fit(&fit, config.mean_gap_threshold);
        let characteristic = fit.model.characteristic_speeds();
        let site_metrics = metrics::site_metrics(
            &fit.model,
            curve,
            config.air_density,
            config.tau_hours,
            config.exceed_threshold_mps,
            config.evaluator,
        )?;
        let corrected = atmosphere::correct_metrics(&site_metrics, meta.altitude_m)?;
        let hist = histogram(&speeds, config.bin_width_mps)?;
        let rose_dirs = series.rose_directions(config.calm_threshold_mps);
        let rose = windrose::bin_directions(&rose_dirs).ok();
        let dominant = rose
            .as_ref()
            .map(|r| windrose::dominant_directions(r, config.secondary_direction_threshold));
        Ok(SiteReport {
            meta: meta.clone(),
            fit,
            validation,
            speeds: characteristic,
            metrics: site_metrics,
            corrected,
            rose,
            dominant,
            histogram: hist,
        })
    };
    inner().map_err(|e| e.for_station(&meta.key))
}

/// Analyze many stations, optionally in parallel. Outputs keep the input
/// order regardless of the thread count, so runs are byte-reproducible.
pub fn analyze_all(
    jobs: &[(&ObservationSeries, &StationMeta)],
    curve: &PowerCurve,
    config: &AnalysisConfig,
    threads: usize,
) -> Result<Vec<SiteReport>> {
    let threads = threads.max(1).min(jobs.len().max(1));
    if threads == 1 || jobs.len() <= 1 {
        return jobs
            .iter()
            .map(|(series, meta)| analyze_station(series, meta, curve, config))
            .collect();
    }
    let mut slots: Vec<Option<Result<SiteReport>>> = Vec::new();
    slots.resize_with(jobs.len(), || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots_mutex = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= jobs.len() {
                    break;
                }
                let (series, meta) = jobs[i];
                let report = analyze_station(series, meta, curve, config);
                slots_mutex.lock().unwrap()[i] = Some(report);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.expect("all jobs ran"))
        .collect()
}

/// Which published-table layout to render.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// Weibull parameters and the two mean speeds.
    Params,
    /// The four characteristic speeds.
    Speeds,
    /// WPD, exceedance probability, NAEP.
    Metrics,
    /// Altitude-corrected density and power metrics.
    Corrected,
}

impl TableKind {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "params" => Ok(Self::Params),
            "speeds" => Ok(Self::Speeds),
            "metrics" => Ok(Self::Metrics),
            "corrected" => Ok(Self::Corrected),
            other => Err(Error::Usage(format!(
                "unknown table '{other}' (expected params|speeds|metrics|corrected)"
            ))),
        }
    }
}

/// A rendered table; the CSV and aligned-text forms share cell values.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&csv_line(&self.header));
        for row in &self.rows {
            out.push_str(&csv_line(row));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row.iter()) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let render = |cells: &[String], widths: &[usize]| -> String {
            let mut line = String::new();
            for (i, (cell, w)) in cells.iter().zip(widths.iter()).enumerate() {
                if i > 0 {
                    line.push_str("  ");
                }
                line.push_str(&format!("{cell:<w$}"));
            }
            line.trim_end().to_string()
        };
        out.push_str(&render(&self.header, &widths));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&render(row, &widths));
            out.push('\n');
        }
        out
    }
}

fn csv_line(cells: &[String]) -> String {
    let escaped: Vec<String> = cells
        .iter()
        .map(|c| {
            if c.contains(',') || c.contains('"') || c.contains('\n') {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.clone()
            }
        })
        .collect();
    format!("{}\n", escaped.join(","))
}

/// Format with 6 significant digits by default (matching the precision of
/// the bundled reference tables).
pub fn fmt_sig(x: f64, sig: u32) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if magnitude >= sig as i32 + 6 || magnitude < -9 {
        return format!("{:.*e}", sig as usize - 1, x);
    }
    let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Render one of the published-table layouts for a set of reports.
pub fn report_table(reports: &[SiteReport], kind: TableKind) -> Result<Table> {
    if reports.is_empty() {
        return Err(Error::Usage("no reports to tabulate".to_string()));
    }
    let f = |x: f64| fmt_sig(x, 6);
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match kind {
        TableKind::Params => (
            vec![
                "station",
                "shape_k",
                "scale_c_mps",
                "distribution_mean_mps",
                "arithmetic_mean_mps",
            ],
            reports
                .iter()
                .map(|r| {
                    vec![
                        r.meta.name.clone(),
                        f(r.fit.model.shape()),
                        f(r.fit.model.scale()),
                        f(r.fit.distribution_mean),
                        f(r.fit.arithmetic_mean),
                    ]
                })
                .collect(),
        ),
        TableKind::Speeds => (
            vec![
                "station",
                "mode_mps",
                "median_mps",
                "mean_mps",
                "max_energy_mps",
            ],
            reports
                .iter()
                .map(|r| {
                    vec![
                        r.meta.name.clone(),
                        f(r.speeds.mode),
                        f(r.speeds.median),
                        f(r.speeds.mean),
                        f(r.speeds.max_energy),
                    ]
                })
                .collect(),
        ),
        TableKind::Metrics => (
            vec![
                "station",
                "wpd_w_per_m2",
                "p_exceed_pct",
                "naep_gwh_per_mwp_year",
            ],
            reports
                .iter()
                .map(|r| {
                    vec![
                        r.meta.name.clone(),
                        f(r.metrics.wpd),
                        f(r.metrics.p_exceed * 100.0),
                        f(r.metrics.naep),
                    ]
                })
                .collect(),
        ),
        TableKind::Corrected => (
            vec![
                "station",
                "air_density_kg_per_m3",
                "density_ratio",
                "wpd_corrected_w_per_m2",
                "naep_corrected_gwh_per_mwp_year",
            ],
            reports
                .iter()
                .map(|r| {
                    vec![
                        r.meta.name.clone(),
                        f(r.corrected.air_density),
                        f(r.corrected.density_ratio),
                        f(r.corrected.wpd_corrected),
                        f(r.corrected.naep_corrected),
                    ]
                })
                .collect(),
        ),
    };
    Ok(Table {
        header: header.into_iter().map(String::from).collect(),
        rows,
    })
}

/// CSV rendering of a histogram (`bin_lo_mps,bin_hi_mps,count,density`).
pub fn histogram_csv(hist: &Histogram) -> String {
    let mut out = String::from("bin_lo_mps,bin_hi_mps,count,density\n");
    let densities = hist.densities();
    for (i, (&count, density)) in hist.counts.iter().zip(densities).enumerate() {
        let (lo, hi) = hist.bin_edges(i);
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_sig(lo, 6),
            fmt_sig(hi, 6),
            count,
            fmt_sig(density, 6)
        ));
    }
    out
}

/// SVG bar chart of a histogram with the fitted density overlaid.
pub fn histogram_svg(hist: &Histogram, model: &crate::weibull::WeibullModel) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const MARGIN: f64 = 40.0;
    let densities = hist.densities();
    let v_max = hist.counts.len() as f64 * hist.bin_width;
    let d_max = densities
        .iter()
        .cloned()
        .fold(0.0_f64, f64::max)
        .max(
            model
                .pdf(model.characteristic_speeds().mode.max(1e-9))
                .unwrap_or(0.0),
        )
        .max(1e-12);
    let sx = |v: f64| MARGIN + (W - 2.0 * MARGIN) * v / v_max;
    let sy = |d: f64| H - MARGIN - (H - 2.0 * MARGIN) * d / d_max;

    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    svg.push('\n');
    for (i, d) in densities.iter().enumerate() {
        let (lo, hi) = hist.bin_edges(i);
        let x = sx(lo);
        let width = sx(hi) - x;
        let y = sy(*d);
        let height = H - MARGIN - y;
        svg.push_str(&format!(
            r##"<rect x="{x:.2}" y="{y:.2}" width="{width:.2}" height="{height:.2}" fill="#9ec5e8" stroke="#4878a8" stroke-width="0.5"/>"##
        ));
        svg.push('\n');
    }
    svg.push_str(r#"<path d=""#);
    let steps = 256;
    for i in 0..=steps {
        let v = v_max * i as f64 / steps as f64;
        let d = model.pdf(v.max(1e-12)).unwrap_or(0.0);
        svg.push_str(&format!(
            "{}{:.2} {:.2}",
            if i == 0 { "M" } else { " L" },
            sx(v),
            sy(d)
        ));
    }
    svg.push_str(r##"" fill="none" stroke="#c0392b" stroke-width="2"/>"##);
    svg.push('\n');
    svg.push_str(&format!(
        r#"<line x1="{MARGIN}" y1="{y}" x2="{x2}" y2="{y}" stroke="black" stroke-width="1"/>"#,
        y = H - MARGIN,
        x2 = W - MARGIN
    ));
    svg.push_str("\n</svg>\n");
    svg
}
