//! Command-line front end: ingest observation files, fit per-station
//! Weibull models, emit report tables, roses, and histograms, and verify
//! the bundled reference results.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use windstat::error::{Error, Result};
use windstat::ingest::{ingest_observations, IngestOptions, ObservationSeries};
use windstat::metrics::CurveEvaluator;
use windstat::powercurve::PowerCurve;
use windstat::report::{self, fmt_sig, AnalysisConfig, TableKind};
use windstat::stations::{Registry, StationMeta};
use windstat::weibull::WeibullModel;
use windstat::{estimation, reference, windrose};

#[derive(Parser)]
#[command(
    name = "windstat",
    version,
    about = "Weibull-based wind resource assessment from station observations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit Weibull parameters per station from an observation CSV.
    Fit(FitArgs),
    /// Run the full pipeline and emit the four report tables.
    Report(ReportArgs),
    /// Wind-direction rose for one station.
    Rose(RoseArgs),
    /// Speed histogram for one station.
    Histogram(HistogramArgs),
    /// Deviation statistics of the curve's polynomial against its table.
    CurveCheck(CurveCheckArgs),
    /// Recompute the bundled reference stations and check every value.
    Verify(VerifyArgs),
    /// Generate a synthetic observation CSV from a Weibull model.
    Synth(SynthArgs),
}

#[derive(Args)]
struct CommonIngest {
    /// Observation CSV (station_key,timestamp_iso8601,speed_mps,direction_deg).
    #[arg(long)]
    input: PathBuf,
    /// Analyze only this station key.
    #[arg(long)]
    station: Option<String>,
    /// Turn malformed rows into errors instead of dropping them.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    ingest: CommonIngest,
    /// Allowed relative gap between modeled and numerical mean.
    #[arg(long, default_value_t = 0.02)]
    mean_gap: f64,
    #[arg(long, value_parser = ["csv", "text"], default_value = "text")]
    format: String,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    ingest: CommonIngest,
    /// Station registry TOML overlaying the bundled one.
    #[arg(long)]
    stations: Option<PathBuf>,
    /// User power curve CSV (speed_mps,power_kw).
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Which table to print: params, speeds, metrics, corrected, or all.
    #[arg(long, default_value = "all")]
    table: String,
    #[arg(long, default_value_t = 8760.0)]
    tau_hours: f64,
    /// Air density for WPD, kg/m^3.
    #[arg(long, default_value_t = 1.225)]
    density: f64,
    /// Exceedance threshold, m/s.
    #[arg(long, default_value_t = 6.0)]
    threshold: f64,
    /// Power-curve evaluator for the energy integral.
    #[arg(long, value_parser = ["tabular", "polynomial"], default_value = "tabular")]
    evaluator: String,
    /// Speeds below this have no usable direction, m/s.
    #[arg(long, default_value_t = 0.5)]
    calm_threshold: f64,
    #[arg(long, default_value_t = 0.5)]
    bin_width: f64,
    #[arg(long, default_value_t = 0.02)]
    mean_gap: f64,
    /// Worker threads for per-station analysis.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_parser = ["csv", "text"], default_value = "text")]
    format: String,
    /// Directory for per-table CSV/text files instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RoseArgs {
    #[command(flatten)]
    ingest: CommonIngest,
    #[arg(long, default_value_t = 0.5)]
    calm_threshold: f64,
    /// Minimum share for reporting a secondary direction.
    #[arg(long, default_value_t = 0.15)]
    secondary_threshold: f64,
    #[arg(long, value_parser = ["csv", "text", "svg"], default_value = "text")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HistogramArgs {
    #[command(flatten)]
    ingest: CommonIngest,
    #[arg(long, default_value_t = 0.5)]
    bin_width: f64,
    #[arg(long, value_parser = ["csv", "text", "svg"], default_value = "text")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveCheckArgs {
    /// User power curve CSV; defaults to the bundled curve.
    #[arg(long)]
    curve: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "text"], default_value = "text")]
    format: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_parser = ["csv", "text"], default_value = "text")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Station key written into the generated rows.
    #[arg(long)]
    station: String,
    #[arg(long)]
    shape: f64,
    #[arg(long)]
    scale: f64,
    /// Number of observation rows.
    #[arg(long, short = 'n')]
    count: usize,
    #[arg(long)]
    seed: u64,
    /// First timestamp (ISO 8601, hourly cadence).
    #[arg(long, default_value = "2000-01-01T00:00:00")]
    start: String,
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return;
        }
        Err(e) => {
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Report(args) => cmd_report(args),
        Command::Rose(args) => cmd_rose(args),
        Command::Histogram(args) => cmd_histogram(args),
        Command::CurveCheck(args) => cmd_curve_check(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Synth(args) => cmd_synth(args),
    }
}

fn ingest(common: &CommonIngest) -> Result<Vec<ObservationSeries>> {
    let options = IngestOptions {
        strict: common.strict,
        station: common.station.clone(),
    };
    ingest_observations(&common.input, &options)
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_fit(args: FitArgs) -> Result<i32> {
    let series = ingest(&args.ingest)?;
    let mut table = report::Table {
        header: [
            "station_key",
            "n_raw",
            "n_used",
            "n_dropped",
            "shape_k",
            "scale_c_mps",
            "log_likelihood",
            "distribution_mean_mps",
            "arithmetic_mean_mps",
            "mean_gap",
            "mean_gap_ok",
            "iterations",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        rows: Vec::new(),
    };
    for s in &series {
        let fit = estimation::fit_mle(&s.speeds(), &estimation::FitOptions::default())
            .map_err(|e| e.for_station(&s.station_key))?;
        let validation = estimation::validate_fit(&fit, args.mean_gap);
        table.rows.push(vec![
            s.station_key.clone(),
            s.n_raw.to_string(),
            fit.n_used.to_string(),
            (fit.n_dropped + s.n_dropped).to_string(),
            fmt_sig(fit.model.shape(), 6),
            fmt_sig(fit.model.scale(), 6),
            fmt_sig(fit.log_likelihood, 9),
            fmt_sig(fit.distribution_mean, 6),
            fmt_sig(fit.arithmetic_mean, 6),
            fmt_sig(validation.gap, 6),
            validation.passed.to_string(),
            fit.iterations.to_string(),
        ]);
    }
    let content = match args.format.as_str() {
        "csv" => table.to_csv(),
        _ => table.to_text(),
    };
    emit(&args.out, &content)?;
    Ok(0)
}

fn load_registry(path: &Option<PathBuf>) -> Result<Registry> {
    let builtin = Registry::builtin();
    match path {
        Some(p) => builtin.with_overrides(Registry::from_toml_path(p)?),
        None => Ok(builtin),
    }
}

fn load_curve(path: &Option<PathBuf>) -> Result<PowerCurve> {
    match path {
        Some(p) => PowerCurve::from_csv_path(p),
        None => Ok(PowerCurve::standard()),
    }
}

/// Fall-back metadata for stations absent from the registry: flat terrain
/// at sea level so the pipeline still runs; the key is kept visible.
fn synthetic_meta(key: &str) -> StationMeta {
    StationMeta {
        key: key.to_string(),
        name: key.to_string(),
        governorate: String::new(),
        coastal: false,
        latitude_deg: 0.0,
        longitude_deg: 0.0,
        altitude_m: 0.0,
        icao: String::new(),
        wmo: None,
    }
}

fn cmd_report(args: ReportArgs) -> Result<i32> {
    // validate table selection before touching the input
    let kinds: Vec<(TableKind, &str)> = match args.table.as_str() {
        "all" => vec![
            (TableKind::Params, "params"),
            (TableKind::Speeds, "speeds"),
            (TableKind::Metrics, "metrics"),
            (TableKind::Corrected, "corrected"),
        ],
        name => vec![(TableKind::parse(name)?, name)],
    };
    let series = ingest(&args.ingest)?;
    let registry = load_registry(&args.stations)?;
    let curve = load_curve(&args.curve)?;
    let config = AnalysisConfig {
        air_density: args.density,
        tau_hours: args.tau_hours,
        exceed_threshold_mps: args.threshold,
        evaluator: if args.evaluator == "polynomial" {
            CurveEvaluator::Polynomial
        } else {
            CurveEvaluator::Tabular
        },
        calm_threshold_mps: args.calm_threshold,
        bin_width_mps: args.bin_width,
        mean_gap_threshold: args.mean_gap,
        ..AnalysisConfig::default()
    };

    let metas: Vec<StationMeta> = series
        .iter()
        .map(|s| match registry.get(&s.station_key) {
            Some(meta) => meta.clone(),
            None => synthetic_meta(&s.station_key),
        })
        .collect();
    let jobs: Vec<(&ObservationSeries, &StationMeta)> = series.iter().zip(metas.iter()).collect();
    let reports = report::analyze_all(&jobs, &curve, &config, args.threads)?;

    for (kind, name) in kinds {
        let table = report::report_table(&reports, kind)?;
        match (&args.out, args.format.as_str()) {
            (Some(dir), format) => {
                std::fs::create_dir_all(dir).map_err(|source| Error::Io {
                    path: dir.clone(),
                    source,
                })?;
                let ext = if format == "csv" { "csv" } else { "txt" };
                let path = dir.join(format!("{name}.{ext}"));
                let content = if format == "csv" {
                    table.to_csv()
                } else {
                    table.to_text()
                };
                std::fs::write(&path, content).map_err(|source| Error::Io { path, source })?;
            }
            (None, "csv") => print!("{}", table.to_csv()),
            (None, _) => {
                println!("[{name}]");
                print!("{}", table.to_text());
                println!();
            }
        }
    }
    Ok(0)
}

fn single_series(common: &CommonIngest) -> Result<ObservationSeries> {
    let mut series = ingest(common)?;
    if series.len() > 1 {
        return Err(Error::Usage(format!(
            "input holds {} stations; pick one with --station",
            series.len()
        )));
    }
    Ok(series.remove(0))
}

fn cmd_rose(args: RoseArgs) -> Result<i32> {
    let series = single_series(&args.ingest)?;
    let dirs = series.rose_directions(args.calm_threshold);
    let rose = windrose::bin_directions(&dirs).map_err(|e| e.for_station(&series.station_key))?;
    let content = match args.format.as_str() {
        "csv" => windrose::rose_csv(&rose),
        "svg" => windrose::rose_svg(&rose),
        _ => {
            let dominant = windrose::dominant_directions(&rose, args.secondary_threshold);
            let mut text = format!(
                "station {}: {} observations binned, {} calm or invalid\n",
                series.station_key,
                rose.n_observations(),
                rose.n_calm_or_invalid()
            );
            text.push_str(&format!(
                "primary direction {} deg ({}) share {}\n",
                dominant.primary_sector_deg,
                dominant.compass_label,
                fmt_sig(dominant.primary_share, 6)
            ));
            match (dominant.secondary_sector_deg, dominant.secondary_share) {
                (Some(deg), Some(share)) => text.push_str(&format!(
                    "secondary direction {} deg ({}) share {}\n",
                    deg,
                    windrose::compass_label(deg),
                    fmt_sig(share, 6)
                )),
                _ => text.push_str("secondary direction: none\n"),
            }
            text.push_str(&windrose::rose_csv(&rose));
            text
        }
    };
    emit(&args.out, &content)?;
    Ok(0)
}

fn cmd_histogram(args: HistogramArgs) -> Result<i32> {
    let series = single_series(&args.ingest)?;
    let speeds = series.speeds();
    let hist = report::histogram(&speeds, args.bin_width)
        .map_err(|e| e.for_station(&series.station_key))?;
    let content = match args.format.as_str() {
        "svg" => {
            let fit = estimation::fit_mle(&speeds, &estimation::FitOptions::default())
                .map_err(|e| e.for_station(&series.station_key))?;
            report::histogram_svg(&hist, &fit.model)
        }
        _ => report::histogram_csv(&hist),
    };
    emit(&args.out, &content)?;
    Ok(0)
}

fn cmd_curve_check(args: CurveCheckArgs) -> Result<i32> {
    let curve = load_curve(&args.curve)?;
    let errors = curve.fit_errors()?;
    let content = match args.format.as_str() {
        "csv" => format!(
            "mad_kw,rmse_kw,max_abs_dev_kw,argmax_speed_mps\n{},{},{},{}\n",
            fmt_sig(errors.mad_kw, 6),
            fmt_sig(errors.rmse_kw, 6),
            fmt_sig(errors.max_abs_dev_kw, 6),
            fmt_sig(errors.argmax_speed_mps, 6)
        ),
        _ => format!(
            "polynomial vs tabulated points over {} nodes\n\
             MAD  {} kW\nRMSE {} kW\nmax  {} kW at {} m/s\n",
            curve.points().len(),
            fmt_sig(errors.mad_kw, 6),
            fmt_sig(errors.rmse_kw, 6),
            fmt_sig(errors.max_abs_dev_kw, 6),
            fmt_sig(errors.argmax_speed_mps, 6)
        ),
    };
    print!("{content}");
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let report = reference::verify(args.threads)?;
    let content = match args.format.as_str() {
        "csv" => report.to_csv(),
        _ => report.to_text(),
    };
    emit(&args.out, &content)?;
    if args.out.is_some() {
        // keep a human-readable summary on stdout even when writing a file
        println!(
            "{} of {} cells passed",
            report.cells.len() - report.n_failed(),
            report.cells.len()
        );
    }
    if report.all_passed() {
        Ok(0)
    } else {
        eprintln!("error: {} reference cells failed", report.n_failed());
        Ok(4)
    }
}

fn cmd_synth(args: SynthArgs) -> Result<i32> {
    if args.count == 0 {
        return Err(Error::Usage("--count must be at least 1".to_string()));
    }
    let start = chrono::NaiveDateTime::parse_from_str(&args.start, "%Y-%m-%dT%H:%M:%S")
        .map_err(|e| Error::Usage(format!("bad --start '{}': {e}", args.start)))?;
    let model = WeibullModel::new(args.shape, args.scale)?;
    let speeds = model.sample(args.count, args.seed)?;
    // directions reuse the same stream, offset so they do not correlate
    // with the speeds
    let mut dir_rng = windstat::weibull::SplitMix64::new(args.seed ^ 0x9E37_79B9_7F4A_7C15);
    let mut out = String::from("station_key,timestamp_iso8601,speed_mps,direction_deg\n");
    for (i, v) in speeds.iter().enumerate() {
        let ts = start + chrono::Duration::hours(i as i64);
        let direction = (dir_rng.next_f64() * 360.0).floor();
        out.push_str(&format!(
            "{},{},{},{}\n",
            args.station,
            ts.format("%Y-%m-%dT%H:%M:%S"),
            fmt_sig(*v, 9),
            direction
        ));
    }
    std::fs::write(&args.out, out).map_err(|source| Error::Io {
        path: args.out.clone(),
        source,
    })?;
    eprintln!(
        "wrote {} rows for '{}' to {}",
        args.count,
        args.station,
        args.out.display()
    );
    Ok(0)
}
