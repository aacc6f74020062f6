use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use cohdisp::density::EntropyUnit;
use cohdisp::maximal::optimal_rank;
use cohdisp::multicopy::{ncopy_dispersion, ncopy_l1, ncopy_predictability_sq, ncopy_purity};
use cohdisp::scan::{
    emit_records, emit_report, format_sig12, reproduce_figure, run_scan, window_report, write_records, write_report,
    FigureId, OutputFormat, ScanConfig,
};
use cohdisp::thermal::{find_tau_star, ATP_ADP_GAP_EV};
use cohdisp::{DensityMatrix, DispersionModel, Error, LogScalar, PsdCheck, SingleCopySummary, ThermalParams, C64};

#[derive(Parser)]
#[command(
    name = "cohdisp",
    version,
    about = "Coherence dispersion of quantum states and thermal ladders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coherence statistics of a density matrix given as JSON.
    Stats {
        /// JSON file: rows of [re, im] pairs, or one flat row-major list.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        no_psd_check: bool,
        /// Report entropies in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Optimal rank and maximal dispersion as CSV rows `D,s,r,dispersion`.
    Maximal {
        #[arg(long)]
        dim: usize,
        /// Print every dimension from `--dim` up to this one.
        #[arg(long)]
        table: Option<usize>,
    },
    /// n-copy scaling of a single-copy summary.
    Multicopy {
        #[arg(long)]
        purity: f64,
        #[arg(long)]
        psq: f64,
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n: u64,
    },
    /// Thermal-ladder dispersion optimum
    Thermal {
        #[command(subcommand)]
        command: ThermalCommand,
    },
    /// Parameter sweeps, temperature windows and figure data
    Scan {
        #[command(subcommand)]
        command: ScanCommand,
    },
}

#[derive(Subcommand)]
enum ThermalCommand {
    /// Temperature of maximal dispersion.
    Taustar(TauStarArgs),
}

#[derive(Args)]
struct TauStarArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = ATP_ADP_GAP_EV)]
    eps_ev: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    total_n: Option<u64>,
    #[arg(long, value_enum, default_value_t = ModelArg::Plain)]
    model: ModelArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Subcommand)]
enum ScanCommand {
    /// Evaluate the dispersion on every grid point of a config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        #[arg(long)]
        eps_ev: Option<f64>,
    },
    /// Report the window of maximizing temperatures as JSON.
    Window {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        #[arg(long)]
        eps_ev: Option<f64>,
    },
    /// Write the grid and maxima CSVs behind one figure.
    Figure {
        #[arg(long, value_parser = ["fig3", "fig3zoom", "buffer_fig7", "buffer_fig8"])]
        id: String,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Plain,
    Buffered,
}

impl From<ModelArg> for DispersionModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Plain => DispersionModel::Plain,
            ModelArg::Buffered => DispersionModel::Buffered,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ConfigInvalid { .. }
        | Error::ParamOutOfRange { .. }
        | Error::DimensionTooSmall { .. }
        | Error::RankOutOfRange { .. }
        | Error::EmptyDimension
        | Error::ShapeMismatch { .. }
        | Error::BufferSmallerThanCoherent { .. } => 2,
        Error::InputUnreadable { .. } | Error::OutputUnwritable { .. } => 3,
        _ => 1,
    }
}

fn stdout_error(source: io::Error) -> Error {
    Error::OutputUnwritable {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn parse_pair(v: &Value) -> Option<C64> {
    match v.as_array()?.as_slice() {
        [re, im] => Some(C64::new(re.as_f64()?, im.as_f64()?)),
        _ => None,
    }
}

fn read_matrix(path: &Path, psd: PsdCheck) -> cohdisp::Result<DensityMatrix> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::InputUnreadable {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |reason: &str| Error::ConfigInvalid {
        field: "in".into(),
        reason: reason.into(),
    };
    let value: Value = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
    let items = value.as_array().ok_or_else(|| bad("expected a JSON array"))?;
    let nested = items
        .first()
        .and_then(Value::as_array)
        .and_then(|row| row.first())
        .is_some_and(Value::is_array);
    let pairs: Vec<&Value> = if nested {
        items
            .iter()
            .map(|row| row.as_array().ok_or_else(|| bad("rows must be arrays")))
            .collect::<cohdisp::Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect()
    } else {
        items.iter().collect()
    };
    let entries = pairs
        .into_iter()
        .map(|p| parse_pair(p).ok_or_else(|| bad("entries must be [re, im] number pairs")))
        .collect::<cohdisp::Result<Vec<_>>>()?;
    let dim = (entries.len() as f64).sqrt().round() as usize;
    DensityMatrix::new(dim, entries, psd)
}

fn stats(input: &Path, psd: PsdCheck, unit: EntropyUnit) -> cohdisp::Result<()> {
    let rho = read_matrix(input, psd)?;
    let mut s = rho.stats()?;
    s.rel_entropy_coherence = unit.from_nats(s.rel_entropy_coherence);
    let mut value = serde_json::to_value(s).map_err(|e| stdout_error(io::Error::other(e)))?;
    value["entropy_unit"] = Value::from(if matches!(unit, EntropyUnit::Bits) {
        "bits"
    } else {
        "nats"
    });
    value["complementarity_residual"] = Value::from(s.complementarity_residual());
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &value).map_err(|e| stdout_error(e.into()))?;
    writeln!(out).map_err(stdout_error)
}

fn maximal(dim: usize, table: Option<usize>) -> cohdisp::Result<()> {
    let last = table.unwrap_or(dim);
    let mut out = io::stdout().lock();
    writeln!(out, "D,s,r,dispersion").map_err(stdout_error)?;
    for d in dim..=last {
        let r = optimal_rank(d)?;
        writeln!(
            out,
            "{d},{},{},{}",
            format_sig12(r.s_continuous),
            r.rank,
            format_sig12(r.dispersion_at_rank)
        )
        .map_err(stdout_error)?;
    }
    Ok(())
}

fn log_row(out: &mut impl Write, name: &str, v: LogScalar) -> io::Result<()> {
    writeln!(
        out,
        "{name},{},{},{}",
        v.sign(),
        format_sig12(v.log10_abs()),
        format_sig12(v.to_f64())
    )
}

fn multicopy(purity: f64, psq: f64, c1: f64, dim: usize, n: u64) -> cohdisp::Result<()> {
    let summary = SingleCopySummary::new(dim, purity, psq, c1)?;
    let dispersion = ncopy_dispersion(&summary, n)?;
    let mut out = io::stdout().lock();
    (|| {
        writeln!(out, "quantity,sign,log10_magnitude,approx_value")?;
        log_row(&mut out, "predictability_sq", ncopy_predictability_sq(&summary, n))?;
        log_row(&mut out, "purity", ncopy_purity(&summary, n))?;
        log_row(&mut out, "l1_coherence", ncopy_l1(&summary, n))?;
        log_row(&mut out, "dispersion", dispersion)
    })()
    .map_err(stdout_error)
}

fn taustar(a: &TauStarArgs) -> cohdisp::Result<()> {
    let mut params = ThermalParams::new(a.d, a.lambda, a.n).with_epsilon(a.eps_ev);
    if let Some(t) = a.total_n {
        params = params.with_total(t);
    }
    let model = DispersionModel::from(a.model);
    let r = find_tau_star(&params, model)?;
    let mut out = io::stdout().lock();
    match a.format {
        FormatArg::Json => {
            let value = serde_json::json!({
                "model": model.to_string(),
                "d": params.d,
                "eps_ev": params.epsilon_ev,
                "lambda": params.lambda,
                "n": params.n,
                "total_n": params.total(),
                "tau_star": r.tau_star,
                "log10_dispersion": r.log_dispersion_at_max.log10_abs(),
                "kelvin": r.kelvin,
                "celsius": r.celsius,
                "bracket": [r.bracket.0, r.bracket.1],
                "iterations": r.iterations,
            });
            serde_json::to_writer_pretty(&mut out, &value).map_err(|e| stdout_error(e.into()))?;
            writeln!(out).map_err(stdout_error)
        }
        FormatArg::Csv => (|| {
            writeln!(
                out,
                "model,d,eps_ev,lambda,n,total_n,tau_star,log10_dispersion,kelvin,celsius"
            )?;
            writeln!(
                out,
                "{model},{},{},{},{},{},{},{},{},{}",
                params.d,
                format_sig12(params.epsilon_ev),
                format_sig12(params.lambda),
                params.n,
                params.total(),
                format_sig12(r.tau_star),
                format_sig12(r.log_dispersion_at_max.log10_abs()),
                format_sig12(r.kelvin),
                format_sig12(r.celsius),
            )
        })()
        .map_err(stdout_error),
    }
}

fn load_config(path: &Path, model: Option<ModelArg>, eps_ev: Option<f64>) -> cohdisp::Result<ScanConfig> {
    let mut config = ScanConfig::from_path(path)?;
    if let Some(m) = model {
        config.model = m.into();
    }
    if let Some(e) = eps_ev {
        config.epsilon_ev = e;
    }
    config.validate()?;
    Ok(config)
}

fn scan(command: ScanCommand) -> cohdisp::Result<()> {
    match command {
        ScanCommand::Run {
            config,
            out,
            format,
            model,
            eps_ev,
        } => {
            let mut config = load_config(&config, model, eps_ev)?;
            if let Some(f) = format {
                config.format = f.into();
            }
            if out.is_some() {
                config.output = out;
            }
            let result = run_scan(&config)?;
            for p in &result.flat {
                eprintln!(
                    "no interior maximum: d={} lambda={} n={} total_n={}",
                    p.d,
                    p.lambda,
                    p.n,
                    p.total()
                );
            }
            match &config.output {
                Some(path) => emit_records(&result.records, config.format, path),
                None => write_records(&result.records, config.format, io::stdout().lock()).map_err(stdout_error),
            }
        }
        ScanCommand::Window {
            config,
            out,
            model,
            eps_ev,
        } => {
            let config = load_config(&config, model, eps_ev)?;
            let report = window_report(&config)?;
            match out {
                Some(path) => emit_report(&report, &path),
                None => write_report(&report, io::stdout().lock()).map_err(stdout_error),
            }
        }
        ScanCommand::Figure { id, out_dir } => {
            let figure: FigureId = id.parse()?;
            let output = reproduce_figure(figure, &out_dir)?;
            println!("{}", output.grid_path.display());
            println!("{}", output.maxima_path.display());
            Ok(())
        }
    }
}

fn run(cli: Cli) -> cohdisp::Result<()> {
    match cli.command {
        Command::Stats {
            input,
            no_psd_check,
            bits,
        } => {
            let unit = if bits { EntropyUnit::Bits } else { EntropyUnit::Nats };
            stats(&input, PsdCheck::from(!no_psd_check), unit)
        }
        Command::Maximal { dim, table } => maximal(dim, table),
        Command::Multicopy {
            purity,
            psq,
            c1,
            dim,
            n,
        } => multicopy(purity, psq, c1, dim, n),
        Command::Thermal {
            command: ThermalCommand::Taustar(args),
        } => taustar(&args),
        Command::Scan { command } => scan(command),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
