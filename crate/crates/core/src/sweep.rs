//! Parameter sweeps over one window family and the trade-off tables they
//! produce.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{analyze_acf, compare_psd, lfm_mainlobe_width, DEFAULT_PAD_FACTOR};
use crate::error::{Error, Result};
use crate::synthesis::{design, WaveformParams, DEFAULT_GRID_LEN};
use crate::windows::WindowFamily;

/// Outcome tag of a single design in a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// The desired PSD had negative samples clamped to zero.
    ClampedPsd,
    /// The ACF has no first null, so PSL is undefined.
    NoNull,
    Failed(String),
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Ok => f.write_str("ok"),
            RowStatus::ClampedPsd => f.write_str("clamped_psd"),
            RowStatus::NoNull => f.write_str("no_null"),
            RowStatus::Failed(msg) => write!(f, "failed: {msg}"),
        }
    }
}

/// One design in a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: WindowFamily,
    /// `k`, Taylor sidelobe level in dB, `alpha` or `beta`.
    pub param_value: f64,
    pub psl_db: Option<f64>,
    pub mainlobe_width: Option<f64>,
    pub normalized_width: Option<f64>,
    pub psd_error_percent: Option<f64>,
    pub status: RowStatus,
}

impl SweepRow {
    fn failed(family: WindowFamily, param_value: f64, err: Error) -> Self {
        SweepRow {
            family,
            param_value,
            psl_db: None,
            mainlobe_width: None,
            normalized_width: None,
            psd_error_percent: None,
            status: RowStatus::Failed(err.to_string()),
        }
    }

    /// PSL and normalized width, when both were measured.
    pub fn tradeoff_point(&self) -> Option<(f64, f64)> {
        Some((self.normalized_width?, self.psl_db?))
    }
}

/// Shared settings for every design in a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub params: WaveformParams,
    pub grid_len: usize,
    pub pad_factor: usize,
    pub parallel: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            params: WaveformParams::default(),
            grid_len: DEFAULT_GRID_LEN,
            pad_factor: DEFAULT_PAD_FACTOR,
            parallel: true,
        }
    }
}

pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| start + step * i as f64).collect();
            v[n - 1] = stop;
            v
        }
    }
}

pub fn logspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = linspace(start.ln(), stop.ln(), n)
        .into_iter()
        .map(f64::exp)
        .collect();
    if let Some(first) = v.first_mut() {
        *first = start;
    }
    if let Some(last) = v.last_mut() {
        *last = stop;
    }
    v
}

/// Default parameter grid for a family, ascending.
///
/// Each grid covers the range over which sidelobe level still trades against
/// mainlobe width at the default timing: raised cosine `k ∈ [0.1, 1]`
/// (50 log-spaced), Taylor `n̄ = 2` sidelobe level `-120…-15 dB` (1 dB steps),
/// Chebyshev `α ∈ [1, 3.5]` and Kaiser `β ∈ [0, 8]` (50 linear each).
pub fn default_grid(family: WindowFamily) -> Vec<f64> {
    match family {
        WindowFamily::RaisedCosine => logspace(0.1, 1.0, 50),
        WindowFamily::Taylor => linspace(-120.0, -15.0, 106),
        WindowFamily::Chebyshev => linspace(1.0, 3.5, 50),
        WindowFamily::Kaiser => linspace(0.0, 8.0, 50),
    }
}

fn evaluate(family: WindowFamily, value: f64, cfg: &SweepConfig, lfm_width: f64) -> SweepRow {
    let run = || -> Result<SweepRow> {
        let spec = family.spec(value)?;
        let d = design(&spec, &cfg.params, cfg.grid_len)?;
        let report = analyze_acf(&d.waveform, lfm_width)?;
        let cmp = compare_psd(&d.waveform, &d.psd, cfg.pad_factor)?;
        let status = if report.psl_db.is_none() {
            RowStatus::NoNull
        } else if d.psd.clamped {
            RowStatus::ClampedPsd
        } else {
            RowStatus::Ok
        };
        Ok(SweepRow {
            family,
            param_value: value,
            psl_db: report.psl_db,
            mainlobe_width: Some(report.mainlobe_width),
            normalized_width: Some(report.normalized_width),
            psd_error_percent: Some(cmp.error_percent),
            status,
        })
    };
    run().unwrap_or_else(|e| SweepRow::failed(family, value, e))
}

/// Designs and measures one waveform per grid value.
///
/// Rows come back sorted by `param_value`. A design that fails to measure is
/// kept as a row with a failure status; an invalid parameter rejects the
/// whole sweep.
pub fn sweep_family(family: WindowFamily, grid: &[f64], cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Empty("sweep grid is empty"));
    }
    cfg.params.validate()?;
    for &v in grid {
        family.spec(v)?;
    }
    let lfm_width = lfm_mainlobe_width(&cfg.params, cfg.grid_len)?;

    let mut rows: Vec<SweepRow> = if cfg.parallel {
        grid.par_iter()
            .map(|&v| evaluate(family, v, cfg, lfm_width))
            .collect()
    } else {
        grid.iter()
            .map(|&v| evaluate(family, v, cfg, lfm_width))
            .collect()
    };
    rows.sort_by(|a, b| a.param_value.total_cmp(&b.param_value));
    Ok(rows)
}

/// Rows not dominated in (lower PSL, lower normalized width), sorted by width.
pub fn pareto_front(rows: &[SweepRow]) -> Vec<SweepRow> {
    let points: Vec<(usize, (f64, f64))> = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.tradeoff_point().map(|p| (i, p)))
        .collect();
    let mut front: Vec<SweepRow> = points
        .iter()
        .filter(|(_, (w, p))| {
            !points.iter().any(|(_, (w2, p2))| {
                w2 <= w && p2 <= p && (w2 < w || p2 < p)
            })
        })
        .map(|(i, _)| rows[*i].clone())
        .collect();
    front.sort_by(|a, b| {
        a.normalized_width
            .unwrap()
            .total_cmp(&b.normalized_width.unwrap())
    });
    front
}

/// Counts adjacent pairs, ordered by normalized width, whose PSL rises as the
/// width grows. Returns `(violations, pairs)`.
pub fn tradeoff_violations(rows: &[SweepRow]) -> (usize, usize) {
    let mut pts: Vec<(f64, f64)> = rows.iter().filter_map(SweepRow::tradeoff_point).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let pairs = pts.len().saturating_sub(1);
    let bad = pts.windows(2).filter(|w| w[1].1 > w[0].1).count();
    (bad, pairs)
}

/// Average ranks (1-based), ties share the mean rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = 0.5 * (i + j) as f64 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation; `None` for fewer than two points or a constant
/// series.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Spearman correlation between PSL and PSD error over the measured rows.
pub fn error_trend(rows: &[SweepRow]) -> Option<f64> {
    let (psl, err): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| Some((r.psl_db?, r.psd_error_percent?)))
        .unzip();
    spearman(&psl, &err)
}
