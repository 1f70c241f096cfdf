use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trendcast::eval::{reports_to_json, reports_to_table, EvalParams};
use trendcast::forecast::{ForecastParams, Horizon, Method, DEFAULT_EPS};
use trendcast::series::{emit_csv, parse_csv, GapPolicy, TimeSeries};
use trendcast::synth::{generate, TrafficScenario};
use trendcast::trend::{centered_mean, MeanKind};
use trendcast::volatility::{forecast_volatility, rolling_volatility, FORECAST_HORIZON, FORECAST_WINDOW};
use trendcast::{build_report, exec, run_forecaster, Error};

#[derive(Parser)]
#[command(name = "trendcast", version, about = "Model-free short-term traffic flow forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic series from a scenario file.
    Synth {
        #[arg(long, value_name = "SCENARIO.json")]
        synth: PathBuf,
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },
    /// Write per-method, per-horizon forecast CSVs.
    Forecast(RunArgs),
    /// Score methods against the centered trend and write the gain table.
    Eval(RunArgs),
    /// Rolling volatility at several scales, optionally forecast.
    Volatility {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_value = "100,250,500")]
        vol_windows: Vec<usize>,
        /// Mean used for the analysis series: causal or centered.
        #[arg(long)]
        mean: Option<MeanKind>,
        /// Also forecast the causal volatility with the algebraic method.
        #[arg(long)]
        forecast: bool,
        #[arg(long, default_value_t = FORECAST_WINDOW)]
        forecast_scale: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_name = "PATH", conflicts_with = "synth", required_unless_present = "synth")]
    input: Option<PathBuf>,
    #[arg(long, value_name = "SCENARIO.json")]
    synth: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "pe,al,mi")]
    methods: Vec<Method>,
    #[arg(long, value_delimiter = ',')]
    horizons: Option<Vec<usize>>,
    #[arg(long, default_value_t = 100)]
    trend_window: usize,
    #[arg(long, default_value_t = 100)]
    slope_window: usize,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

enum Failure {
    /// Not enough data for the requested computation.
    Data(String),
    /// Bad flags, unreadable or malformed input.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_data_insufficiency() {
            Failure::Data(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type CmdResult = Result<(), Failure>;

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

/// Write-then-rename so readers never see partial files.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> CmdResult {
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| io_failure(&tmp, e))?;
    fs::rename(&tmp, &target).map_err(|e| io_failure(&target, e))?;
    Ok(())
}

fn load_scenario(path: &Path) -> Result<TrafficScenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    TrafficScenario::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

impl RunArgs {
    fn load(&self) -> Result<TimeSeries, Failure> {
        if let Some(path) = &self.synth {
            return Ok(generate(&load_scenario(path)?)?);
        }
        let path = self.input.as_ref().expect("clap enforces --input or --synth");
        let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
        let parsed = parse_csv(&text, &GapPolicy::default())
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        if parsed.interpolated > 0 {
            eprintln!("interpolated {} missing samples", parsed.interpolated);
        }
        Ok(parsed.series)
    }

    fn horizons(&self, default: &[usize]) -> Result<Vec<Horizon>, Failure> {
        self.horizons
            .as_deref()
            .unwrap_or(default)
            .iter()
            .map(|&h| Horizon::new(h).map_err(Failure::from))
            .collect()
    }

    fn forecast_params(&self) -> Result<ForecastParams, Failure> {
        if self.trend_window < 2 || self.slope_window < 2 {
            return Err(Failure::Usage("windows must be at least 2".into()));
        }
        Ok(ForecastParams {
            trend_window: self.trend_window,
            slope_window: self.slope_window,
            eps: self.eps,
        })
    }
}

fn summary(series: &TimeSeries) -> String {
    let v = series.values();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    format!("{} samples, mean {mean:.3}, min {min:.3}, max {max:.3}", v.len())
}

fn cmd_synth(scenario: &Path, out: &Path) -> CmdResult {
    let series = generate(&load_scenario(scenario)?)?;
    let name = scenario
        .file_stem()
        .map(|s| format!("{}.csv", s.to_string_lossy()))
        .unwrap_or_else(|| "series.csv".into());
    write_atomic(out, &name, &emit_csv(&series))?;
    println!("{}: {}", out.join(&name).display(), summary(&series));
    Ok(())
}

fn cmd_forecast(args: &RunArgs) -> CmdResult {
    let series = args.load()?;
    let params = args.forecast_params()?;
    let horizons = args.horizons(&trendcast::forecast::DEFAULT_HORIZONS)?;
    let mut jobs: Vec<(Method, Horizon)> = Vec::new();
    for &m in &args.methods {
        for &h in &horizons {
            if !jobs.contains(&(m, h)) {
                jobs.push((m, h));
            }
        }
    }
    let reference = centered_mean(&series, args.trend_window).ok();
    let runs = exec::map(&jobs, |&(m, h)| run_forecaster(&series, m, h, &params));
    for ((m, h), run) in jobs.iter().zip(runs) {
        let run = run?;
        let name = format!("forecast_{}_h{}.csv", m.label(), h);
        write_atomic(&args.out, &name, &run.to_csv(&series, reference.as_ref()))?;
        println!("{name}: {} valid forecasts", run.valid_count());
    }
    Ok(())
}

fn cmd_eval(args: &RunArgs) -> CmdResult {
    let series = args.load()?;
    let params = EvalParams {
        forecast: args.forecast_params()?,
        reference_window: args.trend_window,
    };
    let horizons = args.horizons(&trendcast::forecast::DEFAULT_HORIZONS)?;
    let reports = build_report(&series, &args.methods, &horizons, &params)?;
    let step = series.step_minutes();
    let table = reports_to_table(&reports, step);
    write_atomic(&args.out, "report.json", &reports_to_json(&reports, step))?;
    write_atomic(&args.out, "report.txt", &table)?;
    print!("{table}");
    Ok(())
}

fn cmd_volatility(
    args: &RunArgs,
    windows: &[usize],
    mean: Option<MeanKind>,
    forecast: bool,
    forecast_scale: usize,
) -> CmdResult {
    if forecast && mean == Some(MeanKind::Centered) {
        return Err(Failure::Usage(
            "--forecast needs a causal mean; a centered volatility uses future samples".into(),
        ));
    }
    if windows.iter().any(|&w| w < 2) {
        return Err(Failure::Usage("volatility windows must be at least 2".into()));
    }
    let series = args.load()?;
    let kind = mean.unwrap_or(MeanKind::Centered);
    let vols = exec::map(windows, |&w| rolling_volatility(&series, w, kind));
    for (w, vol) in windows.iter().zip(vols) {
        let vol = vol?;
        let name = format!("volatility_w{w}.csv");
        write_atomic(&args.out, &name, &vol.to_csv())?;
        let v = vol.values.values();
        println!("{name}: mean volatility {:.4}", v.iter().sum::<f64>() / v.len() as f64);
    }
    if forecast {
        let dt = args.horizons(&[FORECAST_HORIZON])?[0];
        let vol = rolling_volatility(&series, forecast_scale, MeanKind::Causal)?;
        let run = forecast_volatility(&vol, dt, args.slope_window)?;
        let name = format!("volatility_forecast_w{forecast_scale}_h{dt}.csv");
        write_atomic(&args.out, &name, &run.to_csv(&vol.to_series()?, None))?;
        println!("{name}: {} valid forecasts", run.valid_count());
    }
    Ok(())
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var("TRENDCAST_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match &cli.command {
        Command::Synth { synth, out } => cmd_synth(synth, out),
        Command::Forecast(args) => cmd_forecast(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Volatility {
            run,
            vol_windows,
            mean,
            forecast,
            forecast_scale,
        } => cmd_volatility(run, vol_windows, *mean, *forecast, *forecast_scale),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
