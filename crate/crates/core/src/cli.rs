//! Command-line front end: run configuration, the `design`, `analyze` and
//! `sweep` commands, and the CSV/JSON artifacts they write.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use crate::analysis::{analyze_acf, compare_psd, mainlobe_width, autocorrelation, AcfReport, Autocorrelation, PsdComparison};
use crate::error::{Error, Result};
use crate::sweep::{default_grid, sweep_family, SweepConfig, SweepRow};
use crate::synthesis::{design, lfm_reference, Design, WaveformParams};
use crate::windows::{WindowFamily, WindowSpec, MIN_GRID_LEN};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Run configuration in human-scale units. Field names are the JSON keys of
/// the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub pulse_width_us: f64,
    pub bandwidth_mhz: f64,
    pub sample_rate_ghz: f64,
    pub window: WindowSpec,
    pub grid_n: usize,
    pub pad_factor: usize,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pulse_width_us: 2.5,
            bandwidth_mhz: 100.0,
            sample_rate_ghz: 1.0,
            window: WindowSpec::RaisedCosine { k: 0.08 },
            grid_n: 2501,
            pad_factor: 4,
            output_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn params(&self) -> WaveformParams {
        WaveformParams {
            pulse_width: self.pulse_width_us * 1e-6,
            bandwidth: self.bandwidth_mhz * 1e6,
            sample_rate: self.sample_rate_ghz * 1e9,
            amplitude: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_n < MIN_GRID_LEN || self.grid_n % 2 == 0 {
            return Err(Error::domain(format!(
                "grid_n must be odd and at least {MIN_GRID_LEN}, got {}",
                self.grid_n
            )));
        }
        if self.pad_factor < 1 {
            return Err(Error::domain("pad_factor must be at least 1"));
        }
        self.params().validate()?;
        self.window.validate()
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            params: self.params(),
            grid_len: self.grid_n,
            pad_factor: self.pad_factor,
            parallel: true,
        }
    }
}

/// Representative shape parameter used when `--window` is given alone.
pub fn representative_param(family: WindowFamily) -> f64 {
    match family {
        WindowFamily::RaisedCosine => 0.08,
        WindowFamily::Taylor => -35.0,
        WindowFamily::Chebyshev => 3.0,
        WindowFamily::Kaiser => 6.0,
    }
}

#[derive(Debug, Parser)]
#[command(name = "nlfm", version, about = "Stationary-phase NLFM pulse design and analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a waveform and write waveform + design files.
    Design(CommonArgs),
    /// Measure autocorrelation and PSD of a design.
    Analyze(CommonArgs),
    /// Sweep a window family's shape parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// raised_cosine, taylor, chebyshev or kaiser.
    #[arg(long)]
    pub window: Option<String>,
    /// Shape parameter: k, Taylor sidelobe level in dB, alpha, or beta.
    #[arg(long, allow_hyphen_values = true)]
    pub param: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated parameter values replacing the default grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub grid: Option<Vec<f64>>,
}

/// Builds the effective config: file (or defaults), then flag overrides.
pub fn resolve_config(args: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(name) = &args.window {
        let family: WindowFamily = name.parse()?;
        let param = args.param.unwrap_or_else(|| representative_param(family));
        cfg.window = family.spec(param)?;
    } else if let Some(param) = args.param {
        cfg.window = cfg.window.family().spec(param)?;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Some(fmt) = args.format {
        cfg.format = fmt;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Columnar table written either as CSV or as a JSON object of columns.
struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    fn to_json(&self) -> Result<Vec<u8>> {
        let mut obj = serde_json::Map::new();
        for (c, h) in self.headers.iter().enumerate() {
            let col: Vec<serde_json::Value> = self
                .rows
                .iter()
                .map(|r| {
                    let cell = &r[c];
                    match cell.parse::<f64>() {
                        Ok(v) if v.is_finite() => serde_json::json!(v),
                        _ if cell.is_empty() => serde_json::Value::Null,
                        _ => serde_json::Value::String(cell.clone()),
                    }
                })
                .collect();
            obj.insert(h.to_string(), serde_json::Value::Array(col));
        }
        json_bytes(&obj)
    }

    fn write(&self, dir: &Path, stem: &str, format: OutputFormat) -> Result<PathBuf> {
        match format {
            OutputFormat::Csv => write_atomic(dir, &format!("{stem}.csv"), &self.to_csv()?),
            OutputFormat::Json => write_atomic(dir, &format!("{stem}.json"), &self.to_json()?),
        }
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes through a temporary file in `dir` and renames it into place.
fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let target = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(&target).map_err(|e| Error::Io(e.error))?;
    Ok(target)
}

#[derive(Debug, Serialize)]
struct ParamsRecord {
    pulse_width_s: f64,
    bandwidth_hz: f64,
    sample_rate_hz: f64,
    amplitude: f64,
}

#[derive(Debug, Serialize)]
struct DesignRecord {
    params: ParamsRecord,
    window: WindowSpec,
    k1: f64,
    k2: f64,
    sample_count: usize,
    grid_n: usize,
    psd_clamped: bool,
}

fn waveform_table(d: &Design) -> Table {
    let wf = &d.waveform;
    let rows = wf
        .times()
        .iter()
        .zip(&wf.samples)
        .zip(wf.freq_law.iter().zip(&wf.phase))
        .map(|((t, s), (f, p))| vec![fmt_f64(*t), fmt_f64(s.re), fmt_f64(s.im), fmt_f64(*f), fmt_f64(*p)])
        .collect();
    Table {
        headers: vec!["t_s", "i", "q", "freq_hz", "phase_rad"],
        rows,
    }
}

/// Synthesizes the configured design and writes `waveform.*` and `design.json`.
pub fn cmd_design(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let params = cfg.params();
    let d = design(&cfg.window, &params, cfg.grid_n)?;
    let record = DesignRecord {
        params: ParamsRecord {
            pulse_width_s: params.pulse_width,
            bandwidth_hz: params.bandwidth,
            sample_rate_hz: params.sample_rate,
            amplitude: params.amplitude,
        },
        window: d.spec,
        k1: d.group_delay.k1,
        k2: d.group_delay.k2,
        sample_count: d.waveform.len(),
        grid_n: cfg.grid_n,
        psd_clamped: d.psd.clamped,
    };
    let dir = &cfg.output_dir;
    Ok(vec![
        waveform_table(&d).write(dir, "waveform", cfg.format)?,
        write_atomic(dir, "design.json", &json_bytes(&record)?)?,
    ])
}

/// Measurements written by `analyze`.
#[derive(Debug, Clone)]
pub struct AnalysisArtifacts {
    pub report: AcfReport,
    pub lfm_acf: Autocorrelation,
    pub psd: PsdComparison,
}

#[derive(Debug, Serialize)]
struct MetricsRecord {
    window: WindowSpec,
    psl_db: Option<f64>,
    z1_s: Option<f64>,
    mainlobe_width_s: f64,
    normalized_width: f64,
    psd_error_percent: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

pub fn analyze_config(cfg: &RunConfig) -> Result<AnalysisArtifacts> {
    cfg.validate()?;
    let params = cfg.params();
    let d = design(&cfg.window, &params, cfg.grid_n)?;
    let lfm = lfm_reference(&params, cfg.grid_n)?;
    let lfm_acf = autocorrelation(&lfm)?;
    let lfm_width = mainlobe_width(&lfm_acf)?;
    let report = analyze_acf(&d.waveform, lfm_width)?;
    let psd = compare_psd(&d.waveform, &d.psd, cfg.pad_factor)?;
    Ok(AnalysisArtifacts {
        report,
        lfm_acf,
        psd,
    })
}

fn acf_table(acf: &Autocorrelation) -> Table {
    let rows = acf
        .lags
        .iter()
        .zip(&acf.magnitude)
        .map(|(l, m)| vec![fmt_f64(*l), fmt_f64(*m), fmt_f64(20.0 * m.log10())])
        .collect();
    Table {
        headers: vec!["lag_s", "magnitude", "magnitude_db"],
        rows,
    }
}

/// Writes `acf.*`, `acf_lfm.*`, `psd.*` and `metrics.json`.
pub fn write_analysis(
    a: &AnalysisArtifacts,
    window: &WindowSpec,
    dir: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    let psd_rows = a
        .psd
        .freqs
        .iter()
        .zip(a.psd.desired.iter().zip(&a.psd.simulated))
        .map(|(f, (d, s))| vec![fmt_f64(*f), fmt_f64(*d), fmt_f64(*s)])
        .collect();
    let psd = Table {
        headers: vec!["freq_hz", "desired", "simulated"],
        rows: psd_rows,
    };
    let metrics = MetricsRecord {
        window: *window,
        psl_db: a.report.psl_db,
        z1_s: a.report.first_null,
        mainlobe_width_s: a.report.mainlobe_width,
        normalized_width: a.report.normalized_width,
        psd_error_percent: a.psd.error_percent,
        reason: a.report.psl_unavailable.clone(),
    };
    Ok(vec![
        acf_table(&a.report.acf).write(dir, "acf", format)?,
        acf_table(&a.lfm_acf).write(dir, "acf_lfm", format)?,
        psd.write(dir, "psd", format)?,
        write_atomic(dir, "metrics.json", &json_bytes(&metrics)?)?,
    ])
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let a = analyze_config(cfg)?;
    write_analysis(&a, &cfg.window, &cfg.output_dir, cfg.format)
}

pub const SWEEP_HEADERS: [&str; 7] = [
    "family",
    "param_value",
    "psl_db",
    "mainlobe_width_s",
    "normalized_width",
    "psd_error_percent",
    "status",
];

fn sweep_table(rows: &[SweepRow]) -> Table {
    let rows = rows
        .iter()
        .map(|r| {
            vec![
                r.family.to_string(),
                fmt_f64(r.param_value),
                fmt_opt(r.psl_db),
                fmt_opt(r.mainlobe_width),
                fmt_opt(r.normalized_width),
                fmt_opt(r.psd_error_percent),
                r.status.to_string(),
            ]
        })
        .collect();
    Table {
        headers: SWEEP_HEADERS.to_vec(),
        rows,
    }
}

/// Sweeps each requested family (all four when `families` is empty) and
/// writes one `sweep_<family>.*` table per family.
pub fn cmd_sweep(cfg: &RunConfig, families: &[WindowFamily], grid: Option<&[f64]>) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let families = if families.is_empty() {
        WindowFamily::ALL.to_vec()
    } else {
        families.to_vec()
    };
    let sweep_cfg = cfg.sweep_config();
    let mut written = Vec::new();
    for family in families {
        let values = grid.map(<[f64]>::to_vec).unwrap_or_else(|| default_grid(family));
        let rows = sweep_family(family, &values, &sweep_cfg)?;
        written.push(sweep_table(&rows).write(&cfg.output_dir, &format!("sweep_{family}"), cfg.format)?);
    }
    Ok(written)
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    match &cli.command {
        Command::Design(args) => cmd_design(&resolve_config(args)?),
        Command::Analyze(args) => cmd_analyze(&resolve_config(args)?),
        Command::Sweep(args) => {
            let families = match &args.common.window {
                Some(name) => vec![name.parse::<WindowFamily>()?],
                None => vec![],
            };
            // --param alone selects a one-point grid
            let grid = args
                .grid
                .clone()
                .or_else(|| args.common.param.map(|p| vec![p]));
            let mut common = args.common.clone();
            common.param = None;
            common.window = None;
            let cfg = resolve_config(&common)?;
            cmd_sweep(&cfg, &families, grid.as_deref())
        }
    }
}

/// Runs a parsed command line and maps the outcome to the exit-code contract.
pub fn run(cli: &Cli) -> ExitCode {
    match execute(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::from(EXIT_OK)
        }
        Err(e) => {
            eprintln!("nlfm: {e}");
            ExitCode::from(if e.is_validation() { EXIT_VALIDATION } else { EXIT_IO })
        }
    }
}
