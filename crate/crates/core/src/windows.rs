//! Desired power spectral densities built from four window families.
//!
//! Raised cosine and Taylor are evaluated continuously in frequency. Chebyshev
//! and Kaiser are generated as discrete windows of length `N` and mapped onto
//! the frequency grid through `f = n·B/(N-1)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use log::warn;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest grid accepted by [`desired_psd`].
pub const MIN_GRID_LEN: usize = 64;

/// Smallest discrete window length for Chebyshev and Kaiser.
pub const MIN_WINDOW_LEN: usize = 8;

/// Relative slack allowed on the band edge so grid endpoints survive rounding.
const EDGE_SLACK: f64 = 1e-12;

/// Window family and shape parameter used as the design PSD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WindowSpec {
    /// `k + (1-k)·cos²(πf/B)`; `k` is the pedestal in `[0, 1]`.
    RaisedCosine { k: f64 },
    /// Taylor weighting with linear mainlobe-to-sidelobe ratio `eta` and
    /// `nbar` nearly equal sidelobes.
    Taylor { eta: f64, nbar: usize },
    /// Dolph-Chebyshev with sidelobes at `-20·alpha` dB.
    Chebyshev { alpha: f64 },
    /// Kaiser with shape `beta = π·α`.
    Kaiser { beta: f64 },
}

impl WindowSpec {
    pub fn family(&self) -> WindowFamily {
        match self {
            WindowSpec::RaisedCosine { .. } => WindowFamily::RaisedCosine,
            WindowSpec::Taylor { .. } => WindowFamily::Taylor,
            WindowSpec::Chebyshev { .. } => WindowFamily::Chebyshev,
            WindowSpec::Kaiser { .. } => WindowFamily::Kaiser,
        }
    }

    /// Taylor spec from a design sidelobe level in dB (negative, e.g. `-35`).
    pub fn taylor_from_sll_db(sll_db: f64, nbar: usize) -> Result<Self> {
        let spec = WindowSpec::Taylor {
            eta: sll_db_to_eta(sll_db)?,
            nbar,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WindowSpec::RaisedCosine { k } => {
                if !(0.0..=1.0).contains(&k) {
                    return Err(Error::domain(format!(
                        "raised cosine pedestal k must lie in [0, 1], got {k}"
                    )));
                }
            }
            WindowSpec::Taylor { eta, nbar } => {
                if !(eta > 1.0) || !eta.is_finite() {
                    return Err(Error::domain(format!("Taylor eta must exceed 1, got {eta}")));
                }
                if nbar < 2 {
                    return Err(Error::domain(format!("Taylor nbar must be >= 2, got {nbar}")));
                }
            }
            WindowSpec::Chebyshev { alpha } => {
                if !(alpha > 0.0) || !alpha.is_finite() {
                    return Err(Error::domain(format!(
                        "Chebyshev alpha must be positive, got {alpha}"
                    )));
                }
            }
            WindowSpec::Kaiser { beta } => {
                if !(beta >= 0.0) || !beta.is_finite() {
                    return Err(Error::domain(format!(
                        "Kaiser beta must be non-negative, got {beta}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Family tag without shape parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowFamily {
    RaisedCosine,
    Taylor,
    Chebyshev,
    Kaiser,
}

impl WindowFamily {
    pub const ALL: [WindowFamily; 4] = [
        WindowFamily::RaisedCosine,
        WindowFamily::Taylor,
        WindowFamily::Chebyshev,
        WindowFamily::Kaiser,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            WindowFamily::RaisedCosine => "raised_cosine",
            WindowFamily::Taylor => "taylor",
            WindowFamily::Chebyshev => "chebyshev",
            WindowFamily::Kaiser => "kaiser",
        }
    }

    /// Builds a spec from the family's scalar sweep parameter: `k`, Taylor
    /// sidelobe level in dB (with `nbar = 2`), `alpha`, or `beta`.
    pub fn spec(&self, param: f64) -> Result<WindowSpec> {
        let spec = match self {
            WindowFamily::RaisedCosine => WindowSpec::RaisedCosine { k: param },
            WindowFamily::Taylor => return WindowSpec::taylor_from_sll_db(param, 2),
            WindowFamily::Chebyshev => WindowSpec::Chebyshev { alpha: param },
            WindowFamily::Kaiser => WindowSpec::Kaiser { beta: param },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for WindowFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WindowFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "raised_cosine" | "rc" => Ok(WindowFamily::RaisedCosine),
            "taylor" => Ok(WindowFamily::Taylor),
            "chebyshev" | "dolph_chebyshev" => Ok(WindowFamily::Chebyshev),
            "kaiser" => Ok(WindowFamily::Kaiser),
            other => Err(Error::domain(format!(
                "unknown window family '{other}' (expected raised_cosine, taylor, chebyshev or kaiser)"
            ))),
        }
    }
}

/// Converts a design sidelobe level in dB into the linear ratio `eta`.
///
/// The sign is ignored so `-35` and `35` both mean sidelobes 35 dB down.
pub fn sll_db_to_eta(sll_db: f64) -> Result<f64> {
    if !sll_db.is_finite() || sll_db == 0.0 {
        return Err(Error::domain(format!(
            "sidelobe level must be a non-zero number of dB, got {sll_db}"
        )));
    }
    Ok(10f64.powf(sll_db.abs() / 20.0))
}

/// Sampled design PSD `Z²(f)` on a uniform grid over `[-B/2, B/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesiredPsd {
    pub freqs: Vec<f64>,
    /// Peak-normalized, non-negative, even-symmetric samples.
    pub values: Vec<f64>,
    pub bandwidth: f64,
    /// Set when negative window values had to be clamped to zero.
    pub clamped: bool,
}

impl DesiredPsd {
    /// The flat spectrum that yields a linear chirp.
    pub fn flat(bandwidth: f64, n: usize) -> Result<Self> {
        check_grid(bandwidth, n)?;
        Ok(DesiredPsd {
            freqs: frequency_grid(bandwidth, n),
            values: vec![1.0; n],
            bandwidth,
            clamped: false,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.bandwidth / (self.len() - 1) as f64
    }
}

/// `n` uniformly spaced frequencies from `-B/2` to `+B/2` inclusive.
pub fn frequency_grid(bandwidth: f64, n: usize) -> Vec<f64> {
    let half = (n as f64 - 1.0) / 2.0;
    let step = bandwidth / (n as f64 - 1.0);
    (0..n).map(|i| (i as f64 - half) * step).collect()
}

fn check_grid(bandwidth: f64, n: usize) -> Result<()> {
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(Error::domain(format!("bandwidth must be positive, got {bandwidth}")));
    }
    if n < MIN_GRID_LEN {
        return Err(Error::domain(format!(
            "grid size must be at least {MIN_GRID_LEN}, got {n}"
        )));
    }
    if n % 2 == 0 {
        return Err(Error::domain(format!(
            "grid size must be odd so that f = 0 lies on the grid, got {n}"
        )));
    }
    Ok(())
}

fn check_in_band(f: f64, bandwidth: f64) -> Result<()> {
    if !(bandwidth > 0.0) {
        return Err(Error::domain(format!("bandwidth must be positive, got {bandwidth}")));
    }
    if !(f.abs() <= 0.5 * bandwidth * (1.0 + EDGE_SLACK)) {
        return Err(Error::domain(format!(
            "frequency {f} Hz lies outside [-B/2, B/2] for B = {bandwidth} Hz"
        )));
    }
    Ok(())
}

/// Second-order raised cosine `k + (1-k)·cos²(πf/B)`.
pub fn eval_raised_cosine(k: f64, f: f64, bandwidth: f64) -> Result<f64> {
    WindowSpec::RaisedCosine { k }.validate()?;
    check_in_band(f, bandwidth)?;
    let c = (PI * f / bandwidth).cos();
    Ok(k + (1.0 - k) * c * c)
}

/// Taylor weighting `1 + Σ F_m·cos(2πmf/B)`, unclamped.
pub fn eval_taylor(coeffs: &[f64], f: f64, bandwidth: f64) -> Result<f64> {
    check_in_band(f, bandwidth)?;
    let x = 2.0 * PI * f / bandwidth;
    Ok(1.0
        + coeffs
            .iter()
            .enumerate()
            .map(|(i, fm)| fm * ((i + 1) as f64 * x).cos())
            .sum::<f64>())
}

/// Taylor coefficients `F_1 … F_{nbar-1}` for the expansion `1 + Σ F_m cos(…)`.
///
/// With `A = acosh(eta)/π` and `σ² = nbar² / (A² + (nbar - ½)²)`:
///
/// ```text
/// F_m = (-1)^(m+1) · Π_{n=1}^{nbar-1} [1 - m² / (σ²·(A² + (n - ½)²))]
///                  / Π_{n=1, n≠m}^{nbar-1} [1 - m² / n²]
/// ```
///
/// These are twice the half-amplitude coefficients of the `1 + 2 Σ F_m cos`
/// form found in most window libraries.
pub fn taylor_coefficients(eta: f64, nbar: usize) -> Result<Vec<f64>> {
    WindowSpec::Taylor { eta, nbar }.validate()?;
    let a = eta.acosh() / PI;
    let a2 = a * a;
    let nb = nbar as f64;
    let sigma2 = nb * nb / (a2 + (nb - 0.5) * (nb - 0.5));

    let coeffs = (1..nbar)
        .map(|m| {
            let m2 = (m * m) as f64;
            let numer: f64 = (1..nbar)
                .map(|n| {
                    let nh = n as f64 - 0.5;
                    1.0 - m2 / (sigma2 * (a2 + nh * nh))
                })
                .product();
            let denom: f64 = (1..nbar)
                .filter(|&n| n != m)
                .map(|n| 1.0 - m2 / (n * n) as f64)
                .product();
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            sign * numer / denom
        })
        .collect();
    Ok(coeffs)
}

/// Zeroth-order modified Bessel function of the first kind, by power series.
pub fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 1.0;
    while j < 2000.0 {
        term *= q / (j * j);
        sum += term;
        if term < 1e-15 * sum {
            break;
        }
        j += 1.0;
    }
    sum
}

/// Kaiser window `I0(β·√(1 - (n/(M/2))²)) / I0(β)` for `|n| ≤ (M-1)/2`.
pub fn kaiser_window(m: usize, beta: f64) -> Result<Vec<f64>> {
    WindowSpec::Kaiser { beta }.validate()?;
    if m < MIN_WINDOW_LEN {
        return Err(Error::domain(format!(
            "window length must be at least {MIN_WINDOW_LEN}, got {m}"
        )));
    }
    let denom = bessel_i0(beta);
    if !denom.is_finite() {
        return Err(Error::domain(format!("Kaiser beta {beta} overflows I0")));
    }
    let half_len = m as f64 / 2.0;
    let center = (m as f64 - 1.0) / 2.0;
    Ok((0..m)
        .map(|i| {
            let r = (i as f64 - center) / half_len;
            let arg = (1.0 - r * r).max(0.0).sqrt();
            bessel_i0(beta * arg) / denom
        })
        .collect())
}

/// Chebyshev polynomial of degree `order` at any real `x`.
fn chebyshev_poly(order: f64, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        (order * x.acos()).cos()
    } else {
        // hyperbolic branch; sign follows T_n(-x) = (-1)^n T_n(x)
        let v = (order * x.abs().acosh()).cosh();
        if x < 0.0 && order as u64 % 2 == 1 {
            -v
        } else {
            v
        }
    }
}

/// Frequency-domain samples `W(m)`, `m = 0 … M-1`, of the Dolph-Chebyshev
/// window, normalized by `cosh(order·acosh(β))`.
///
/// The polynomial order is `M - 1`, which keeps the transform symmetric
/// (`W(m) = W(M-m)` up to the half-sample twiddle) for both odd and even `M`.
pub fn chebyshev_transform(m: usize, alpha: f64) -> Result<Vec<f64>> {
    WindowSpec::Chebyshev { alpha }.validate()?;
    if m < MIN_WINDOW_LEN {
        return Err(Error::domain(format!(
            "window length must be at least {MIN_WINDOW_LEN}, got {m}"
        )));
    }
    let order = (m - 1) as f64;
    let ripple = 10f64.powf(alpha);
    let beta = (ripple.acosh() / order).cosh();
    let norm = (order * beta.acosh()).cosh();
    Ok((0..m)
        .map(|i| chebyshev_poly(order, beta * (PI * i as f64 / m as f64).cos()) / norm)
        .collect())
}

/// Zero-phase inverse DFT of [`chebyshev_transform`] before the imaginary
/// part is discarded. Index `i` holds `n = i - (M-1)/2`.
pub(crate) fn chebyshev_window_complex(m: usize, alpha: f64) -> Result<Vec<Complex64>> {
    let w = chebyshev_transform(m, alpha)?;
    let shift = (m as f64 - 1.0) / 2.0;
    // w(n) = 1/M Σ W(k) e^{j2πk(i - shift)/M}; the shift is folded into W(k)
    let mut buf: Vec<Complex64> = w
        .iter()
        .enumerate()
        .map(|(k, &wk)| Complex64::from_polar(wk, -2.0 * PI * k as f64 * shift / m as f64))
        .collect();
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    buf.iter_mut().for_each(|z| *z *= scale);
    Ok(buf)
}

/// Dolph-Chebyshev window of length `m`, scaled to 1 at the center.
pub fn chebyshev_window(m: usize, alpha: f64) -> Result<Vec<f64>> {
    let full = chebyshev_window_complex(m, alpha)?;
    let mut w: Vec<f64> = full.iter().map(|z| z.re).collect();
    let center = w[(m - 1) / 2];
    w.iter_mut().for_each(|v| *v /= center);
    Ok(w)
}

/// Samples the selected window family as a peak-normalized PSD on an odd
/// grid of `n` points spanning `[-B/2, B/2]`.
pub fn desired_psd(spec: &WindowSpec, bandwidth: f64, n: usize) -> Result<DesiredPsd> {
    spec.validate()?;
    check_grid(bandwidth, n)?;
    let freqs = frequency_grid(bandwidth, n);
    let mut values: Vec<f64> = match *spec {
        WindowSpec::RaisedCosine { k } => freqs
            .iter()
            .map(|&f| eval_raised_cosine(k, f, bandwidth))
            .collect::<Result<_>>()?,
        WindowSpec::Taylor { eta, nbar } => {
            let coeffs = taylor_coefficients(eta, nbar)?;
            freqs
                .iter()
                .map(|&f| eval_taylor(&coeffs, f, bandwidth))
                .collect::<Result<_>>()?
        }
        WindowSpec::Chebyshev { alpha } => chebyshev_window(n, alpha)?,
        WindowSpec::Kaiser { beta } => kaiser_window(n, beta)?,
    };

    for i in 0..n / 2 {
        let j = n - 1 - i;
        let mean = 0.5 * (values[i] + values[j]);
        values[i] = mean;
        values[j] = mean;
    }

    let mut clamped = false;
    for v in values.iter_mut() {
        if *v < 0.0 {
            clamped = true;
            *v = 0.0;
        }
    }
    if clamped {
        warn!("{spec:?}: window dips below zero; negative PSD samples clamped to 0");
    }

    let peak = values.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::Degenerate(format!("{spec:?} yields no positive PSD samples")));
    }
    values.iter_mut().for_each(|v| *v /= peak);

    Ok(DesiredPsd {
        freqs,
        values,
        bandwidth,
        clamped,
    })
}
