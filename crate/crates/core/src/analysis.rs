//! Autocorrelation and spectral measurements of a synthesized pulse.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::synthesis::{lfm_reference, Waveform, WaveformParams};
use crate::windows::DesiredPsd;

/// Linear magnitude of the -3 dB level.
pub fn half_power_level() -> f64 {
    10f64.powf(-3.0 / 20.0)
}

/// Default zero-padding factor for the periodogram.
pub const DEFAULT_PAD_FACTOR: usize = 4;

/// Normalized autocorrelation magnitude at all `2S - 1` lags.
#[derive(Debug, Clone, PartialEq)]
pub struct Autocorrelation {
    /// Lag spacing in seconds.
    pub lag_step: f64,
    /// Lags in seconds, from `-(S-1)` to `S-1` samples.
    pub lags: Vec<f64>,
    /// `|R(τ)| / |R(0)|`.
    pub magnitude: Vec<f64>,
}

impl Autocorrelation {
    /// Builds a symmetric ACF from its non-negative half (`half[0]` is lag 0).
    pub fn from_positive_half(half: &[f64], lag_step: f64) -> Self {
        let s = half.len();
        let peak = half[0];
        let mut magnitude = Vec::with_capacity(2 * s - 1);
        magnitude.extend(half[1..].iter().rev().map(|v| v / peak));
        magnitude.extend(half.iter().map(|v| v / peak));
        let lags = (0..2 * s - 1)
            .map(|i| (i as f64 - (s - 1) as f64) * lag_step)
            .collect();
        Autocorrelation {
            lag_step,
            lags,
            magnitude,
        }
    }

    /// Index of lag zero.
    pub fn center(&self) -> usize {
        self.magnitude.len() / 2
    }

    /// Magnitudes at lags `0, 1, …, S-1` samples.
    pub fn positive(&self) -> &[f64] {
        &self.magnitude[self.center()..]
    }

    /// Magnitudes at lags `0, -1, …, -(S-1)` samples.
    fn negative(&self) -> impl Iterator<Item = f64> + '_ {
        self.magnitude[..=self.center()].iter().rev().copied()
    }

    /// Last positive-lag index that is within `max_lag` seconds.
    fn index_limit(&self, max_lag: f64) -> usize {
        let limit = (max_lag / self.lag_step * (1.0 + 1e-12)).floor() as usize;
        limit.min(self.positive().len() - 1)
    }
}

/// Full linear autocorrelation of raw samples via a zero-padded FFT.
pub fn autocorrelation_of(samples: &[Complex64], lag_step: f64) -> Result<Autocorrelation> {
    let s = samples.len();
    if s == 0 {
        return Err(Error::Empty("waveform has no samples"));
    }
    let n = (2 * s).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..s].copy_from_slice(samples);
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    buf.iter_mut().for_each(|z| *z = Complex64::new(z.norm_sqr(), 0.0));
    planner.plan_fft_inverse(n).process(&mut buf);

    // r[l] at buf[l] for l >= 0 and at buf[n + l] for l < 0
    let mut magnitude = Vec::with_capacity(2 * s - 1);
    magnitude.extend(buf[n - (s - 1)..].iter().map(|z| z.norm()));
    magnitude.extend(buf[..s].iter().map(|z| z.norm()));
    let peak = magnitude[s - 1];
    if !(peak > 0.0) {
        return Err(Error::Degenerate("autocorrelation peak is zero".into()));
    }
    magnitude.iter_mut().for_each(|m| *m /= peak);
    let lags = (0..2 * s - 1)
        .map(|i| (i as f64 - (s - 1) as f64) * lag_step)
        .collect();
    Ok(Autocorrelation {
        lag_step,
        lags,
        magnitude,
    })
}

/// Autocorrelation of a waveform at its own sample spacing.
pub fn autocorrelation(wf: &Waveform) -> Result<Autocorrelation> {
    autocorrelation_of(&wf.samples, wf.params.sample_period())
}

/// Discrete first null: the earliest positive lag sample that is a local
/// minimum, searched up to `max_lag`.
fn first_null_index(acf: &Autocorrelation, max_lag: f64) -> Result<usize> {
    let p = acf.positive();
    let limit = acf.index_limit(max_lag);
    (1..limit.min(p.len() - 1))
        .find(|&i| p[i] < p[i - 1] && p[i] <= p[i + 1])
        .ok_or(Error::NoNull { max_lag_s: max_lag })
}

/// First null `z1` in seconds, refined by a parabola through the three
/// samples around the discrete minimum.
pub fn first_null(acf: &Autocorrelation, max_lag: f64) -> Result<f64> {
    let i = first_null_index(acf, max_lag)?;
    let p = acf.positive();
    let (y0, y1, y2) = (p[i - 1], p[i], p[i + 1]);
    let curvature = y0 - 2.0 * y1 + y2;
    let offset = if curvature > 0.0 {
        (0.5 * (y0 - y2) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    Ok((i as f64 + offset) * acf.lag_step)
}

/// Peak sidelobe level in dB: the largest magnitude over `z1 ≤ |τ| ≤ T/2`.
pub fn peak_sidelobe_level(acf: &Autocorrelation, pulse_width: f64) -> Result<f64> {
    let max_lag = 0.5 * pulse_width;
    let start = first_null_index(acf, max_lag)?;
    let end = acf.index_limit(max_lag);
    let p = acf.positive();
    let peak = p[start..=end].iter().cloned().fold(0.0, f64::max);
    Ok(20.0 * peak.log10())
}

/// Interpolated lag (in samples) at which a decaying sequence first drops
/// below `level`.
fn crossing<I: Iterator<Item = f64>>(mut seq: I, level: f64) -> Option<f64> {
    let mut prev = seq.next()?;
    for (i, v) in seq.enumerate() {
        if v < level {
            return Some(i as f64 + (prev - level) / (prev - v));
        }
        prev = v;
    }
    None
}

/// Full -3 dB mainlobe width in seconds.
pub fn mainlobe_width(acf: &Autocorrelation) -> Result<f64> {
    let level = half_power_level();
    let right = crossing(acf.positive().iter().copied(), level).ok_or(Error::NoMainlobeEdge)?;
    let left = crossing(acf.negative(), level).ok_or(Error::NoMainlobeEdge)?;
    Ok((left + right) * acf.lag_step)
}

/// Mainlobe width of the linear chirp with the same timing.
pub fn lfm_mainlobe_width(params: &WaveformParams, grid_len: usize) -> Result<f64> {
    let lfm = lfm_reference(params, grid_len)?;
    mainlobe_width(&autocorrelation(&lfm)?)
}

/// Ratio of a mainlobe width to that of the reference linear chirp.
pub fn normalized_mainlobe_width(
    width: f64,
    params: &WaveformParams,
    grid_len: usize,
) -> Result<f64> {
    Ok(width / lfm_mainlobe_width(params, grid_len)?)
}

/// Autocorrelation measurements of one waveform.
#[derive(Debug, Clone)]
pub struct AcfReport {
    pub acf: Autocorrelation,
    /// `None` when the ACF has no null before `T/2`.
    pub first_null: Option<f64>,
    pub psl_db: Option<f64>,
    pub mainlobe_width: f64,
    pub normalized_width: f64,
    /// Why `psl_db` is missing, if it is.
    pub psl_unavailable: Option<String>,
}

/// Measures a waveform against an LFM mainlobe width computed beforehand.
pub fn analyze_acf(wf: &Waveform, lfm_width: f64) -> Result<AcfReport> {
    let acf = autocorrelation(wf)?;
    let width = mainlobe_width(&acf)?;
    let t = wf.params.pulse_width;
    let (first_null, psl_db, psl_unavailable) = match first_null(&acf, 0.5 * t) {
        Ok(z1) => (Some(z1), Some(peak_sidelobe_level(&acf, t)?), None),
        Err(e @ Error::NoNull { .. }) => (None, None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(AcfReport {
        acf,
        first_null,
        psl_db,
        mainlobe_width: width,
        normalized_width: width / lfm_width,
        psl_unavailable,
    })
}

/// Centered periodogram `|DFT|² / S` of zero-padded samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
}

pub fn periodogram(samples: &[Complex64], sample_rate: f64, pad_factor: usize) -> Result<Periodogram> {
    let s = samples.len();
    if s == 0 {
        return Err(Error::Empty("waveform has no samples"));
    }
    if pad_factor < 1 {
        return Err(Error::domain("pad factor must be at least 1"));
    }
    let n = pad_factor * s;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..s].copy_from_slice(samples);
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    // bins 0..n rotated so that the first entry is the most negative frequency
    let neg = n / 2;
    let scale = 1.0 / s as f64;
    let mut freqs = Vec::with_capacity(n);
    let mut power = Vec::with_capacity(n);
    for j in 0..n {
        let k = (j + n - neg) % n;
        let signed = j as f64 - neg as f64;
        freqs.push(signed * sample_rate / n as f64);
        power.push(buf[k].norm_sqr() * scale);
    }
    Ok(Periodogram { freqs, power })
}

/// Linear interpolation of a uniformly spaced, ascending series.
fn resample(freqs: &[f64], values: &[f64], at: f64) -> f64 {
    let step = freqs[1] - freqs[0];
    let u = (at - freqs[0]) / step;
    let last = freqs.len() - 1;
    if u <= 0.0 {
        return values[0];
    }
    if u >= last as f64 {
        return values[last];
    }
    let i = u.floor() as usize;
    let frac = u - i as f64;
    values[i] + frac * (values[i + 1] - values[i])
}

/// Periodogram of `wf` resampled onto `grid` (inside `[-B/2, B/2]`) and
/// normalized to unit peak.
pub fn estimate_psd(wf: &Waveform, pad_factor: usize, grid: &[f64]) -> Result<Vec<f64>> {
    let pg = periodogram(&wf.samples, wf.params.sample_rate, pad_factor)?;
    let half_band = 0.5 * wf.params.bandwidth * (1.0 + 1e-12);
    if grid.iter().any(|f| f.abs() > half_band) {
        return Err(Error::GridMismatch("PSD grid extends beyond [-B/2, B/2]".into()));
    }
    let mut out: Vec<f64> = grid.iter().map(|&f| resample(&pg.freqs, &pg.power, f)).collect();
    let peak = out.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Degenerate("periodogram is zero inside the band".into()));
    }
    out.iter_mut().for_each(|v| *v /= peak);
    Ok(out)
}

/// `100 · Σ|simulated - desired| / Σ desired`.
pub fn psd_error_percent(simulated: &[f64], desired: &[f64]) -> Result<f64> {
    if simulated.len() != desired.len() {
        return Err(Error::GridMismatch(format!(
            "simulated PSD has {} samples, desired has {}",
            simulated.len(),
            desired.len()
        )));
    }
    let mass: f64 = desired.iter().sum();
    if !(mass > 0.0) {
        return Err(Error::Degenerate("desired PSD has zero mass".into()));
    }
    let dev: f64 = simulated
        .iter()
        .zip(desired)
        .map(|(s, d)| (s - d).abs())
        .sum();
    Ok(100.0 * dev / mass)
}

/// Desired and measured PSD on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdComparison {
    pub freqs: Vec<f64>,
    pub desired: Vec<f64>,
    pub simulated: Vec<f64>,
    pub error_percent: f64,
}

impl PsdComparison {
    pub fn new(freqs: Vec<f64>, desired: Vec<f64>, simulated: Vec<f64>) -> Result<Self> {
        if freqs.len() != desired.len() {
            return Err(Error::GridMismatch("frequency and PSD lengths differ".into()));
        }
        let error_percent = psd_error_percent(&simulated, &desired)?;
        Ok(PsdComparison {
            freqs,
            desired,
            simulated,
            error_percent,
        })
    }
}

pub fn compare_psd(wf: &Waveform, desired: &DesiredPsd, pad_factor: usize) -> Result<PsdComparison> {
    let simulated = estimate_psd(wf, pad_factor, &desired.freqs)?;
    PsdComparison::new(desired.freqs.clone(), desired.values.clone(), simulated)
}
