//! Parameter sweeps of the thermal model.
//!
//! A [`ScanConfig`] names a `τ` grid and lists of ladder sizes `d`,
//! coherence levels `λ`, coherent-site counts `n` and (for the buffered
//! model) total-site counts `N`. [`run_scan`] evaluates the dispersion on
//! every grid point and flags the refined maximum of each parameter
//! combination; [`window_report`] reduces the maxima to the temperature
//! window they span.
//!
//! Config files are flat TOML:
//!
//! ```toml
//! model = "plain"            # or "buffered"
//! tau_lo = 0.05
//! tau_hi = 2.0
//! tau_points = 200
//! tau_spacing = "log"        # or "linear"
//! n_values = [5000]          # and/or n_range = [lo, hi, points] (log-spaced)
//! lambda_values = [0.1]
//! d_values = [2]
//! epsilon_ev = 0.316
//! total_n = [1000000]        # buffered only; or total_n_range = [lo, hi, points]
//! output = "scan.csv"
//! format = "csv"             # or "json"
//! ```

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{linear_grid, log_grid};
use crate::thermal::{
    find_tau_star_with, kelvin_to_celsius, log_objective, tau_to_kelvin, DispersionModel, TauSearch, ThermalParams,
    ATP_ADP_GAP_EV,
};

pub const CSV_HEADER: [&str; 9] = [
    "model",
    "d",
    "eps_ev",
    "lambda",
    "n",
    "total_n",
    "tau",
    "log10_dispersion",
    "is_max",
];

/// Written in place of `log10(0)`.
pub const ZERO_SENTINEL: &str = "-inf";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::config("format", format!("unknown format `{other}`"))),
        }
    }
}

/// `[lo, hi, points]`, expanded to log-spaced integers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRange(pub u64, pub u64, pub usize);

impl CountRange {
    pub fn expand(&self) -> Vec<u64> {
        let CountRange(lo, hi, points) = *self;
        if points <= 1 || lo == hi {
            return vec![lo];
        }
        log_grid(lo as f64, hi as f64, points)
            .into_iter()
            .map(|x| x.round() as u64)
            .collect()
    }
}

fn one_or_many<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<u64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(u64),
        Many(Vec<u64>),
    }
    Ok(match OneOrMany::deserialize(de)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

fn default_epsilon() -> f64 {
    ATP_ADP_GAP_EV
}

fn default_search_min() -> f64 {
    TauSearch::default().tau_min
}

fn default_search_max() -> f64 {
    TauSearch::default().tau_max
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default)]
    pub model: DispersionModel,
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub tau_points: usize,
    #[serde(default)]
    pub tau_spacing: Spacing,
    #[serde(default)]
    pub n_values: Vec<u64>,
    #[serde(default)]
    pub n_range: Option<CountRange>,
    pub lambda_values: Vec<f64>,
    pub d_values: Vec<usize>,
    #[serde(default = "default_epsilon")]
    pub epsilon_ev: f64,
    #[serde(default, deserialize_with = "one_or_many")]
    pub total_n: Vec<u64>,
    #[serde(default)]
    pub total_n_range: Option<CountRange>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Bounds of the `τ*` search, independent of the output grid.
    #[serde(default = "default_search_min")]
    pub search_tau_min: f64,
    #[serde(default = "default_search_max")]
    pub search_tau_max: f64,
}

fn merged_counts(values: &[u64], range: Option<CountRange>) -> Vec<u64> {
    let mut all: Vec<u64> = values.to_vec();
    if let Some(r) = range {
        all.extend(r.expand());
    }
    all.sort_unstable();
    all.dedup();
    all
}

impl ScanConfig {
    /// Single-point plain-model config with the default `τ` grid.
    pub fn single(d: usize, lambda: f64, n: u64) -> Self {
        ScanConfig {
            model: DispersionModel::Plain,
            tau_lo: 0.05,
            tau_hi: 2.0,
            tau_points: 200,
            tau_spacing: Spacing::Log,
            n_values: vec![n],
            n_range: None,
            lambda_values: vec![lambda],
            d_values: vec![d],
            epsilon_ev: ATP_ADP_GAP_EV,
            total_n: Vec::new(),
            total_n_range: None,
            output: None,
            format: OutputFormat::Csv,
            search_tau_min: default_search_min(),
            search_tau_max: default_search_max(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ScanConfig = toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let field = message.split('`').nth(1).unwrap_or("config").to_string();
            Error::config(field, message)
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::InputUnreadable {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn n_list(&self) -> Vec<u64> {
        merged_counts(&self.n_values, self.n_range)
    }

    pub fn total_list(&self) -> Vec<u64> {
        merged_counts(&self.total_n, self.total_n_range)
    }

    pub fn search(&self) -> TauSearch {
        TauSearch {
            tau_min: self.search_tau_min,
            tau_max: self.search_tau_max,
            ..TauSearch::default()
        }
    }

    pub fn tau_grid(&self) -> Vec<f64> {
        match self.tau_spacing {
            Spacing::Linear => linear_grid(self.tau_lo, self.tau_hi, self.tau_points),
            Spacing::Log => log_grid(self.tau_lo, self.tau_hi, self.tau_points),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_lo > 0.0 && self.tau_lo.is_finite()) {
            return Err(Error::config("tau_lo", "must be positive"));
        }
        if !(self.tau_hi > self.tau_lo && self.tau_hi.is_finite()) {
            return Err(Error::config("tau_hi", "must exceed tau_lo"));
        }
        if self.tau_points == 0 {
            return Err(Error::config("tau_points", "must be at least 1"));
        }
        if let Some(CountRange(lo, hi, _)) = self.n_range {
            if lo == 0 || hi < lo {
                return Err(Error::config("n_range", "need 1 <= lo <= hi"));
            }
        }
        if let Some(CountRange(lo, hi, _)) = self.total_n_range {
            if lo == 0 || hi < lo {
                return Err(Error::config("total_n_range", "need 1 <= lo <= hi"));
            }
        }
        let ns = self.n_list();
        if ns.is_empty() {
            return Err(Error::config("n_values", "no coherent counts given"));
        }
        if ns.contains(&0) {
            return Err(Error::config("n_values", "counts must be positive"));
        }
        if self.lambda_values.is_empty() {
            return Err(Error::config("lambda_values", "must not be empty"));
        }
        if let Some(l) = self.lambda_values.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(Error::config("lambda_values", format!("{l} outside [0, 1]")));
        }
        if self.d_values.is_empty() {
            return Err(Error::config("d_values", "must not be empty"));
        }
        if let Some(d) = self.d_values.iter().find(|&&d| d < 2) {
            return Err(Error::config("d_values", format!("{d} < 2")));
        }
        if !(self.epsilon_ev > 0.0 && self.epsilon_ev.is_finite()) {
            return Err(Error::config("epsilon_ev", "must be positive"));
        }
        if !(self.search_tau_min > 0.0 && self.search_tau_max > self.search_tau_min) {
            return Err(Error::config(
                "search_tau_min",
                "need 0 < search_tau_min < search_tau_max",
            ));
        }
        if self.model == DispersionModel::Buffered {
            let totals = self.total_list();
            if totals.is_empty() {
                return Err(Error::config("total_n", "buffered model needs total counts"));
            }
            if self.combinations().is_empty() {
                return Err(Error::config("total_n", "no total count is >= any coherent count"));
            }
        }
        Ok(())
    }

    /// All parameter combinations in lexicographic `(d, λ, n, N)` order. For
    /// the buffered model only pairs with `n ≤ N` are kept; for the plain
    /// model `N = n`.
    pub fn combinations(&self) -> Vec<ThermalParams> {
        let mut ds = self.d_values.clone();
        ds.sort_unstable();
        ds.dedup();
        let mut lambdas = self.lambda_values.clone();
        lambdas.sort_by(f64::total_cmp);
        lambdas.dedup();
        let ns = self.n_list();
        let totals = self.total_list();
        let mut out = Vec::new();
        for &d in &ds {
            for &lambda in &lambdas {
                for &n in &ns {
                    let base = ThermalParams::new(d, lambda, n).with_epsilon(self.epsilon_ev);
                    match self.model {
                        DispersionModel::Plain => out.push(base),
                        DispersionModel::Buffered => {
                            out.extend(totals.iter().filter(|&&t| t >= n).map(|&t| base.with_total(t)))
                        }
                    }
                }
            }
        }
        out
    }
}

/// One grid point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRecord {
    pub model: DispersionModel,
    pub d: usize,
    pub eps_ev: f64,
    pub lambda: f64,
    pub n: u64,
    pub total_n: u64,
    pub tau: f64,
    /// `-inf` where the dispersion vanishes.
    pub log10_dispersion: f64,
    pub is_max: bool,
}

impl ScanRecord {
    fn new(model: DispersionModel, p: &ThermalParams, tau: f64, ln_value: f64, is_max: bool) -> Self {
        ScanRecord {
            model,
            d: p.d,
            eps_ev: p.epsilon_ev,
            lambda: p.lambda,
            n: p.n,
            total_n: p.total(),
            tau,
            log10_dispersion: ln_value / std::f64::consts::LN_10,
            is_max,
        }
    }

    pub fn params(&self) -> ThermalParams {
        ThermalParams {
            d: self.d,
            epsilon_ev: self.eps_ev,
            lambda: self.lambda,
            n: self.n,
            total_n: Some(self.total_n),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub records: Vec<ScanRecord>,
    /// Combinations without an interior maximum (e.g. `λ = 0`).
    pub flat: Vec<ThermalParams>,
}

impl ScanResult {
    pub fn maxima(&self) -> Vec<ScanRecord> {
        self.records.iter().filter(|r| r.is_max).copied().collect()
    }
}

enum Combo {
    Peaked(Vec<ScanRecord>),
    Flat(Vec<ScanRecord>, ThermalParams),
}

fn scan_combination(model: DispersionModel, params: &ThermalParams, grid: &[f64], search: &TauSearch) -> Result<Combo> {
    let mut records = grid
        .iter()
        .map(|&tau| log_objective(params, model, tau).map(|v| ScanRecord::new(model, params, tau, v, false)))
        .collect::<Result<Vec<_>>>()?;
    match find_tau_star_with(params, model, search) {
        Ok(star) => {
            let max = ScanRecord::new(model, params, star.tau_star, star.log_dispersion_at_max.ln_abs(), true);
            let at = records.partition_point(|r| r.tau <= star.tau_star);
            records.insert(at, max);
            Ok(Combo::Peaked(records))
        }
        Err(Error::FlatObjective) => Ok(Combo::Flat(records, *params)),
        Err(e) => Err(e),
    }
}

/// Evaluates every `(combination, τ)` grid point. Each combination also
/// gets one extra record at its refined `τ*` with `is_max` set.
pub fn run_scan(config: &ScanConfig) -> Result<ScanResult> {
    config.validate()?;
    let grid = config.tau_grid();
    let search = config.search();
    let combos = config.combinations();
    let parts = combos
        .par_iter()
        .map(|p| scan_combination(config.model, p, &grid, &search))
        .collect::<Result<Vec<_>>>()?;
    let mut result = ScanResult {
        records: Vec::new(),
        flat: Vec::new(),
    };
    for part in parts {
        match part {
            Combo::Peaked(records) => result.records.extend(records),
            Combo::Flat(records, p) => {
                result.records.extend(records);
                result.flat.push(p);
            }
        }
    }
    Ok(result)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowReport {
    pub tau_star_min: f64,
    pub tau_star_max: f64,
    pub kelvin_min: f64,
    pub kelvin_max: f64,
    pub celsius_min: f64,
    pub celsius_max: f64,
    pub min_point: ScanRecord,
    pub max_point: ScanRecord,
}

/// Range of `τ*` over all combinations of `config`, in `τ`, K and °C.
/// Combinations without an interior maximum are skipped.
pub fn window_report(config: &ScanConfig) -> Result<WindowReport> {
    config.validate()?;
    let search = config.search();
    let model = config.model;
    let stars = config
        .combinations()
        .par_iter()
        .map(|p| match find_tau_star_with(p, model, &search) {
            Ok(s) => Ok(Some(ScanRecord::new(
                model,
                p,
                s.tau_star,
                s.log_dispersion_at_max.ln_abs(),
                true,
            ))),
            Err(Error::FlatObjective) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    let stars: Vec<ScanRecord> = stars.into_iter().flatten().collect();
    let first = *stars.first().ok_or(Error::FlatObjective)?;
    let (min_point, max_point) = stars.iter().fold((first, first), |(lo, hi), r| {
        (
            if r.tau < lo.tau { *r } else { lo },
            if r.tau > hi.tau { *r } else { hi },
        )
    });
    let kelvin_min = tau_to_kelvin(min_point.tau, config.epsilon_ev);
    let kelvin_max = tau_to_kelvin(max_point.tau, config.epsilon_ev);
    Ok(WindowReport {
        tau_star_min: min_point.tau,
        tau_star_max: max_point.tau,
        kelvin_min,
        kelvin_max,
        celsius_min: kelvin_to_celsius(kelvin_min),
        celsius_max: kelvin_to_celsius(kelvin_max),
        min_point,
        max_point,
    })
}

/// Smallest coherent count whose `τ*` does not exceed `target_tau`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InverseResult {
    pub n: u64,
    pub tau_star: f64,
}

/// Bisects `n ∈ [n_lo, n_hi]` for the plain model, using that `τ*` falls
/// as `n` grows.
pub fn n_for_tau_star(
    target_tau: f64,
    d: usize,
    lambda: f64,
    epsilon_ev: f64,
    n_lo: u64,
    n_hi: u64,
) -> Result<InverseResult> {
    let search = TauSearch::default();
    let star = |n: u64| {
        find_tau_star_with(
            &ThermalParams::new(d, lambda, n).with_epsilon(epsilon_ev),
            DispersionModel::Plain,
            &search,
        )
        .map(|r| r.tau_star)
    };
    if n_lo == 0 || n_hi < n_lo {
        return Err(Error::config("n bounds", "need 1 <= lo <= hi"));
    }
    let (t_lo, t_hi) = (star(n_lo)?, star(n_hi)?);
    if !(target_tau <= t_lo && target_tau >= t_hi) {
        return Err(Error::ParamOutOfRange {
            name: "target_tau",
            value: target_tau,
            reason: "outside the tau* range spanned by the n bounds",
        });
    }
    if t_lo <= target_tau {
        return Ok(InverseResult {
            n: n_lo,
            tau_star: t_lo,
        });
    }
    let (mut lo, mut hi, mut t_at_hi) = (n_lo, n_hi, t_hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let t = star(mid)?;
        if t <= target_tau {
            hi = mid;
            t_at_hi = t;
        } else {
            lo = mid;
        }
    }
    Ok(InverseResult {
        n: hi,
        tau_star: t_at_hi,
    })
}

/// Twelve significant digits, as `d.ddddddddddde±x`.
pub fn format_sig12(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        ZERO_SENTINEL.to_string()
    } else {
        format!("{x:.11e}")
    }
}

fn round_sig12(x: f64) -> Option<f64> {
    x.is_finite().then(|| format!("{x:.11e}").parse().unwrap_or(x))
}

/// Writes records as CSV (fixed header) or as a JSON array of flat objects.
pub fn write_records<W: Write>(records: &[ScanRecord], format: OutputFormat, out: W) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(CSV_HEADER).map_err(io::Error::other)?;
            for r in records {
                w.write_record([
                    r.model.to_string(),
                    r.d.to_string(),
                    format_sig12(r.eps_ev),
                    format_sig12(r.lambda),
                    r.n.to_string(),
                    r.total_n.to_string(),
                    format_sig12(r.tau),
                    format_sig12(r.log10_dispersion),
                    r.is_max.to_string(),
                ])
                .map_err(io::Error::other)?;
            }
            w.flush()
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = records.iter().map(record_json).collect();
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &rows)?;
            out.write_all(b"\n")
        }
    }
}

fn record_json(r: &ScanRecord) -> serde_json::Value {
    serde_json::json!({
        "model": r.model.to_string(),
        "d": r.d,
        "eps_ev": round_sig12(r.eps_ev),
        "lambda": round_sig12(r.lambda),
        "n": r.n,
        "total_n": r.total_n,
        "tau": round_sig12(r.tau),
        "log10_dispersion": round_sig12(r.log10_dispersion),
        "is_max": r.is_max,
    })
}

/// Window report as one JSON object.
pub fn write_report<W: Write>(report: &WindowReport, mut out: W) -> io::Result<()> {
    let value = serde_json::json!({
        "tau_star_min": round_sig12(report.tau_star_min),
        "tau_star_max": round_sig12(report.tau_star_max),
        "kelvin_min": round_sig12(report.kelvin_min),
        "kelvin_max": round_sig12(report.kelvin_max),
        "celsius_min": round_sig12(report.celsius_min),
        "celsius_max": round_sig12(report.celsius_max),
        "min_point": record_json(&report.min_point),
        "max_point": record_json(&report.max_point),
    });
    serde_json::to_writer_pretty(&mut out, &value)?;
    out.write_all(b"\n")
}

fn create(path: &Path) -> Result<io::BufWriter<fs::File>> {
    fs::File::create(path)
        .map(io::BufWriter::new)
        .map_err(|source| Error::OutputUnwritable {
            path: path.to_path_buf(),
            source,
        })
}

pub fn emit_records(records: &[ScanRecord], format: OutputFormat, path: &Path) -> Result<()> {
    let file = create(path)?;
    write_records(records, format, file).map_err(|source| Error::OutputUnwritable {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_report(report: &WindowReport, path: &Path) -> Result<()> {
    let file = create(path)?;
    write_report(report, file).map_err(|source| Error::OutputUnwritable {
        path: path.to_path_buf(),
        source,
    })
}

/// Sweeps behind the contour figures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    /// `Δc(τ, n)` for `n` from 5000 to 3×10⁶, `λ = 0.1`, `d = 2`.
    Fig3,
    /// The `5000 ≤ n ≤ 50000` part of [`FigureId::Fig3`].
    Fig3Zoom,
    /// Buffered model at `N = 10⁶`, varying `n`.
    BufferFig7,
    /// Buffered model at `n = 5×10⁴`, varying `N` up to `10⁶`.
    BufferFig8,
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig3" => Ok(FigureId::Fig3),
            "fig3zoom" => Ok(FigureId::Fig3Zoom),
            "buffer_fig7" => Ok(FigureId::BufferFig7),
            "buffer_fig8" => Ok(FigureId::BufferFig8),
            other => Err(Error::config("id", format!("unknown figure `{other}`"))),
        }
    }
}

impl FigureId {
    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig3 => "fig3",
            FigureId::Fig3Zoom => "fig3zoom",
            FigureId::BufferFig7 => "buffer_fig7",
            FigureId::BufferFig8 => "buffer_fig8",
        }
    }

    pub fn config(&self) -> ScanConfig {
        let mut c = ScanConfig::single(2, 0.1, 5000);
        c.tau_lo = 0.1;
        c.tau_hi = 0.8;
        c.tau_points = 141;
        c.tau_spacing = Spacing::Linear;
        c.n_values.clear();
        match self {
            FigureId::Fig3 => c.n_range = Some(CountRange(5_000, 3_000_000, 40)),
            FigureId::Fig3Zoom => c.n_range = Some(CountRange(5_000, 50_000, 30)),
            FigureId::BufferFig7 => {
                c.model = DispersionModel::Buffered;
                c.n_range = Some(CountRange(5_000, 1_000_000, 25));
                c.total_n = vec![1_000_000];
            }
            FigureId::BufferFig8 => {
                c.model = DispersionModel::Buffered;
                c.n_values = vec![50_000];
                c.total_n_range = Some(CountRange(50_000, 1_000_000, 25));
            }
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureOutput {
    pub grid_path: PathBuf,
    pub maxima_path: PathBuf,
    pub maxima: Vec<ScanRecord>,
}

/// Writes `<id>_grid.csv` (every grid point) and `<id>_maxima.csv` (the
/// locus of maxima) under `out_dir`.
pub fn reproduce_figure(figure: FigureId, out_dir: &Path) -> Result<FigureOutput> {
    fs::create_dir_all(out_dir).map_err(|source| Error::OutputUnwritable {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let result = run_scan(&figure.config())?;
    let grid_path = out_dir.join(format!("{}_grid.csv", figure.name()));
    let maxima_path = out_dir.join(format!("{}_maxima.csv", figure.name()));
    let maxima = result.maxima();
    emit_records(&result.records, OutputFormat::Csv, &grid_path)?;
    emit_records(&maxima, OutputFormat::Csv, &maxima_path)?;
    Ok(FigureOutput {
        grid_path,
        maxima_path,
        maxima,
    })
}
