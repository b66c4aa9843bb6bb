//! Stationary-phase synthesis of constant-envelope NLFM pulses.
//!
//! The chain is: desired PSD → cumulative integral → group delay `T_g(f)`
//! pinned to `±T/2` at the band edges → inverse `f(t)` → phase `φ(t)` →
//! samples `A·exp(jφ)`.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::windows::{desired_psd, DesiredPsd, WindowSpec};

/// Default number of frequency samples for the design grid.
pub const DEFAULT_GRID_LEN: usize = 2501;

/// Minimum time-bandwidth product accepted for synthesis.
pub const MIN_TIME_BANDWIDTH: f64 = 10.0;

/// Below this product the stationary phase approximation gets loose.
pub const WARN_TIME_BANDWIDTH: f64 = 50.0;

/// Pulse timing and sampling, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveformParams {
    /// Pulse width `T` in seconds.
    pub pulse_width: f64,
    /// Swept bandwidth `B` in Hz.
    pub bandwidth: f64,
    /// Complex sample rate in Hz.
    pub sample_rate: f64,
    /// Constant envelope amplitude.
    pub amplitude: f64,
}

impl Default for WaveformParams {
    /// 2.5 µs pulse, 100 MHz sweep, 1 GHz sampling.
    fn default() -> Self {
        WaveformParams {
            pulse_width: 2.5e-6,
            bandwidth: 100e6,
            sample_rate: 1e9,
            amplitude: 1.0,
        }
    }
}

impl WaveformParams {
    pub fn new(pulse_width: f64, bandwidth: f64, sample_rate: f64) -> Result<Self> {
        let p = WaveformParams {
            pulse_width,
            bandwidth,
            sample_rate,
            amplitude: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.pulse_width) {
            return Err(Error::domain(format!(
                "pulse width must be positive, got {}",
                self.pulse_width
            )));
        }
        if !positive(self.bandwidth) {
            return Err(Error::domain(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth
            )));
        }
        if !positive(self.amplitude) {
            return Err(Error::domain(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        if !(self.sample_rate >= 2.0 * self.bandwidth) || !self.sample_rate.is_finite() {
            return Err(Error::domain(format!(
                "sample rate {} Hz is below 2B = {} Hz",
                self.sample_rate,
                2.0 * self.bandwidth
            )));
        }
        let tb = self.time_bandwidth();
        if tb < MIN_TIME_BANDWIDTH {
            return Err(Error::domain(format!(
                "time-bandwidth product {tb} is below {MIN_TIME_BANDWIDTH}"
            )));
        }
        if tb < WARN_TIME_BANDWIDTH {
            warn!("time-bandwidth product {tb} is small; stationary phase design will be coarse");
        }
        Ok(())
    }

    pub fn time_bandwidth(&self) -> f64 {
        self.pulse_width * self.bandwidth
    }

    /// Number of samples on the half-open pulse interval, `round(T·fs)`.
    pub fn sample_count(&self) -> usize {
        (self.pulse_width * self.sample_rate).round() as usize
    }

    pub fn sample_period(&self) -> f64 {
        1.0 / self.sample_rate
    }

    /// Sample instants `t_i = -T/2 + i/fs`.
    pub fn times(&self) -> Vec<f64> {
        let t0 = -0.5 * self.pulse_width;
        (0..self.sample_count())
            .map(|i| t0 + i as f64 / self.sample_rate)
            .collect()
    }
}

/// Tabulated group delay `T_g(f) = k1·∫Z² + k2` on the PSD grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDelayTable {
    pub freqs: Vec<f64>,
    pub delays: Vec<f64>,
    /// Seconds per unit of integrated PSD (PSD·Hz).
    pub k1: f64,
    /// Offset in seconds, `-T/2`.
    pub k2: f64,
    pub pulse_width: f64,
}

impl GroupDelayTable {
    /// Piecewise-linear evaluation of the tabulated `T_g` at `f`.
    pub fn eval(&self, f: f64) -> f64 {
        let n = self.freqs.len();
        if f <= self.freqs[0] {
            return self.delays[0];
        }
        if f >= self.freqs[n - 1] {
            return self.delays[n - 1];
        }
        let hi = self.freqs.partition_point(|&x| x <= f).min(n - 1);
        let lo = hi - 1;
        let u = (f - self.freqs[lo]) / (self.freqs[hi] - self.freqs[lo]);
        self.delays[lo] + u * (self.delays[hi] - self.delays[lo])
    }
}

/// Integrates the PSD (trapezoid rule) and rescales so that
/// `T_g(-B/2) = -T/2` and `T_g(B/2) = T/2`.
pub fn group_delay(psd: &DesiredPsd, pulse_width: f64) -> Result<GroupDelayTable> {
    if !(pulse_width > 0.0) {
        return Err(Error::domain(format!("pulse width must be positive, got {pulse_width}")));
    }
    let n = psd.values.len();
    if n < 2 || psd.freqs.len() != n {
        return Err(Error::GridMismatch(format!(
            "PSD has {} frequencies and {} values",
            psd.freqs.len(),
            n
        )));
    }

    let mut cumulative = Vec::with_capacity(n);
    let mut acc = 0.0;
    cumulative.push(0.0);
    for i in 1..n {
        let df = psd.freqs[i] - psd.freqs[i - 1];
        acc += 0.5 * (psd.values[i] + psd.values[i - 1]) * df;
        cumulative.push(acc);
    }
    if !(acc > 0.0) || !acc.is_finite() {
        return Err(Error::Degenerate(
            "PSD integrates to zero; group delay boundary conditions cannot be met".into(),
        ));
    }

    let half = 0.5 * pulse_width;
    let k1 = pulse_width / acc;
    let k2 = -half;
    let mut delays: Vec<f64> = cumulative.iter().map(|&c| k2 + k1 * c).collect();
    delays[0] = -half;
    delays[n - 1] = half;

    Ok(GroupDelayTable {
        freqs: psd.freqs.clone(),
        delays,
        k1,
        k2,
        pulse_width,
    })
}

fn check_band(f: f64, bandwidth: f64) -> Result<()> {
    if !(bandwidth > 0.0) || !(f.abs() <= 0.5 * bandwidth * (1.0 + 1e-12)) {
        return Err(Error::domain(format!(
            "frequency {f} Hz lies outside [-B/2, B/2] for B = {bandwidth} Hz"
        )));
    }
    Ok(())
}

/// Closed-form group delay of the raised cosine PSD:
/// `T·(f/B + ((1-k)/(1+k))·sin(2πf/B)/(2π))`.
pub fn group_delay_raised_cosine_closed_form(
    k: f64,
    f: f64,
    pulse_width: f64,
    bandwidth: f64,
) -> Result<f64> {
    WindowSpec::RaisedCosine { k }.validate()?;
    check_band(f, bandwidth)?;
    let ratio = (1.0 - k) / (1.0 + k);
    let x = f / bandwidth;
    Ok(pulse_width * (x + ratio * (2.0 * PI * x).sin() / (2.0 * PI)))
}

/// Closed-form group delay of the two-term Taylor PSD:
/// `T·(f/B + (F1/2π)·sin(2πf/B))`.
pub fn group_delay_taylor_closed_form(
    f1: f64,
    f: f64,
    pulse_width: f64,
    bandwidth: f64,
) -> Result<f64> {
    group_delay_taylor_series(&[f1], f, pulse_width, bandwidth)
}

/// General Taylor group delay `T·(f/B + (1/2π)·Σ (F_m/m)·sin(2πmf/B))`.
pub fn group_delay_taylor_series(
    coeffs: &[f64],
    f: f64,
    pulse_width: f64,
    bandwidth: f64,
) -> Result<f64> {
    check_band(f, bandwidth)?;
    let x = f / bandwidth;
    let ripple: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(i, fm)| {
            let m = (i + 1) as f64;
            fm / m * (2.0 * PI * m * x).sin()
        })
        .sum();
    Ok(pulse_width * (x + ripple / (2.0 * PI)))
}

/// Solves `T_g(f) = t` on the tabulated group delay.
///
/// Bisection brackets `t` between two grid delays; the answer is then linearly
/// interpolated inside that cell. A flat run of delays (zero PSD) resolves to
/// the midpoint of the run.
pub fn invert_group_delay(table: &GroupDelayTable, t: f64) -> Result<f64> {
    let half = 0.5 * table.pulse_width;
    let slack = 1e-12 * table.pulse_width;
    if !(t >= -half - slack && t <= half + slack) {
        return Err(Error::domain(format!(
            "time {t} s lies outside [-T/2, T/2] for T = {} s",
            table.pulse_width
        )));
    }
    let t = t.clamp(-half, half);
    let d = &table.delays;
    let f = &table.freqs;
    let n = d.len();

    let flat = 1e-15 * table.pulse_width;
    let first = d.partition_point(|&x| x < t - flat);
    let last = d.partition_point(|&x| x <= t + flat);
    if last > first + 1 {
        let (l, r) = (first, last - 1);
        warn!(
            "group delay is flat between {} Hz and {} Hz; using the midpoint",
            f[l], f[r]
        );
        return Ok(0.5 * (f[l] + f[r]));
    }

    let (mut lo, mut hi) = (0usize, n - 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if d[mid] <= t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let span = d[hi] - d[lo];
    if span <= 0.0 {
        return Ok(0.5 * (f[lo] + f[hi]));
    }
    let u = ((t - d[lo]) / span).clamp(0.0, 1.0);
    Ok(f[lo] + u * (f[hi] - f[lo]))
}

/// Instantaneous frequency `f(t) = T_g⁻¹(t)` at each sample instant.
pub fn frequency_law(table: &GroupDelayTable, params: &WaveformParams) -> Result<Vec<f64>> {
    params
        .times()
        .into_iter()
        .map(|t| invert_group_delay(table, t))
        .collect()
}

/// `φ(t_i) = 2π·∫ f dt` from the first sample, trapezoid rule, `φ(t_0) = 0`.
pub fn phase_from_frequency(freq_law: &[f64], params: &WaveformParams) -> Vec<f64> {
    let dt = params.sample_period();
    let mut phase = Vec::with_capacity(freq_law.len());
    let mut acc = 0.0;
    for (i, &f) in freq_law.iter().enumerate() {
        if i > 0 {
            acc += 0.5 * (f + freq_law[i - 1]) * dt;
        }
        phase.push(2.0 * PI * acc);
    }
    phase
}

/// Complex baseband pulse with its design trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<Complex64>,
    /// Instantaneous frequency in Hz per sample.
    pub freq_law: Vec<f64>,
    /// Phase in radians per sample.
    pub phase: Vec<f64>,
    pub params: WaveformParams,
}

impl Waveform {
    /// Builds samples `A·exp(jφ)` from a frequency law.
    pub fn from_frequency_law(freq_law: Vec<f64>, params: WaveformParams) -> Self {
        let phase = phase_from_frequency(&freq_law, &params);
        let samples = phase
            .iter()
            .map(|&p| Complex64::from_polar(params.amplitude, p))
            .collect();
        Waveform {
            samples,
            freq_law,
            phase,
            params,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.params.times()
    }
}

/// Everything produced on the way from a window spec to a waveform.
#[derive(Debug, Clone)]
pub struct Design {
    pub spec: WindowSpec,
    pub psd: DesiredPsd,
    pub group_delay: GroupDelayTable,
    pub waveform: Waveform,
}

/// Runs the synthesis chain starting from an already sampled PSD.
pub fn synthesize_from_psd(psd: &DesiredPsd, params: &WaveformParams) -> Result<(GroupDelayTable, Waveform)> {
    params.validate()?;
    if (psd.bandwidth - params.bandwidth).abs() > 1e-9 * params.bandwidth {
        return Err(Error::GridMismatch(format!(
            "PSD bandwidth {} Hz differs from waveform bandwidth {} Hz",
            psd.bandwidth, params.bandwidth
        )));
    }
    let table = group_delay(psd, params.pulse_width)?;
    let law = frequency_law(&table, params)?;
    let wf = Waveform::from_frequency_law(law, *params);
    Ok((table, wf))
}

/// Full design on a PSD grid of `grid_len` points.
pub fn design(spec: &WindowSpec, params: &WaveformParams, grid_len: usize) -> Result<Design> {
    params.validate()?;
    let psd = desired_psd(spec, params.bandwidth, grid_len)?;
    let (group_delay, waveform) = synthesize_from_psd(&psd, params)?;
    Ok(Design {
        spec: *spec,
        psd,
        group_delay,
        waveform,
    })
}

/// Synthesizes the waveform for `spec` on the default grid.
pub fn synthesize(spec: &WindowSpec, params: &WaveformParams) -> Result<Waveform> {
    design(spec, params, DEFAULT_GRID_LEN).map(|d| d.waveform)
}

/// Linear chirp reference with identical timing: the design of a flat PSD.
pub fn lfm_reference(params: &WaveformParams, grid_len: usize) -> Result<Waveform> {
    design(&WindowSpec::RaisedCosine { k: 1.0 }, params, grid_len).map(|d| d.waveform)
}
