//! Triangular mel/bark/linear filterbanks and sampled gammatone responses.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use super::spectrum::{bin_frequencies, n_bins};
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyScale {
    Mel,
    Bark,
    Linear,
    Gammatone,
}

impl fmt::Display for FrequencyScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mel => "mel",
            Self::Bark => "bark",
            Self::Linear => "linear",
            Self::Gammatone => "gammatone",
        })
    }
}

impl FromStr for FrequencyScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mel" => Ok(Self::Mel),
            "bark" => Ok(Self::Bark),
            "linear" => Ok(Self::Linear),
            "gammatone" => Ok(Self::Gammatone),
            other => Err(invalid(format!("unknown frequency scale '{other}'"))),
        }
    }
}

pub fn hz_to_mel(f: f64) -> f64 {
    1127.0 * (1.0 + f / 700.0).ln()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * ((m / 1127.0).exp() - 1.0)
}

pub fn hz_to_bark(f: f64) -> f64 {
    6.0 * (f / 600.0).asinh()
}

pub fn bark_to_hz(b: f64) -> f64 {
    600.0 * (b / 6.0).sinh()
}

/// Equivalent rectangular bandwidth (Glasberg & Moore) in Hz.
pub fn erb_hz(f: f64) -> f64 {
    24.7 * (4.37e-3 * f + 1.0)
}

pub fn hz_to_erb_rate(f: f64) -> f64 {
    21.4 * (1.0 + 4.37e-3 * f).log10()
}

pub fn erb_rate_to_hz(e: f64) -> f64 {
    (10f64.powf(e / 21.4) - 1.0) / 4.37e-3
}

/// `n` centre frequencies uniformly spaced on the ERB-rate scale over `[lo, hi]`.
pub fn erb_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![erb_rate_to_hz(0.5 * (hz_to_erb_rate(lo) + hz_to_erb_rate(hi)))];
    }
    let (a, b) = (hz_to_erb_rate(lo), hz_to_erb_rate(hi));
    (0..n)
        .map(|i| erb_rate_to_hz(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

/// Magnitude response of a 4th-order gammatone filter centred at `fc`,
/// `(1 + ((f - fc) / b)^2)^-2` with `b = 1.019 ERB(fc)`. Unity at `fc`.
pub fn gammatone_magnitude(f: f64, fc: f64) -> f64 {
    let b = 1.019 * erb_hz(fc);
    let d = (f - fc) / b;
    (1.0 + d * d).powi(-2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank<T> {
    /// `n_filters x n_bins`.
    pub weights: Array2<T>,
    pub scale: FrequencyScale,
    pub center_freqs_hz: Vec<f64>,
    /// Lower and upper support edge of each filter in Hz. For gammatone
    /// filters these are `fc -/+ 2 ERB`, a nominal passband rather than a
    /// hard support.
    pub edges_hz: Vec<(f64, f64)>,
}

impl<T: Scalar> FilterBank<T> {
    pub fn n_filters(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_bins(&self) -> usize {
        self.weights.ncols()
    }

    /// Filter energies `weights . spectrum` for one frame.
    pub fn apply_into(&self, spectrum: &[T], out: &mut [T]) {
        for (o, row) in out.iter_mut().zip(self.weights.rows()) {
            *o = row.iter().zip(spectrum).fold(T::zero(), |acc, (&w, &p)| acc + w * p);
        }
    }
}

pub fn make_filterbank<T: Scalar>(
    scale: FrequencyScale,
    n_filters: usize,
    n_fft: usize,
    sample_rate_hz: u32,
    f_lo: f64,
    f_hi: f64,
) -> Result<FilterBank<T>> {
    let nyquist = sample_rate_hz as f64 / 2.0;
    if n_filters == 0 {
        return Err(invalid("filterbank needs at least one filter"));
    }
    if !(f_lo >= 0.0 && f_lo < f_hi && f_hi <= nyquist) {
        return Err(invalid(format!(
            "band edges must satisfy 0 <= f_lo < f_hi <= fs/2 (got {f_lo}, {f_hi}, fs/2={nyquist})"
        )));
    }
    let freqs = bin_frequencies(n_fft, sample_rate_hz);
    let bins = n_bins(n_fft);

    if scale == FrequencyScale::Gammatone {
        let centers = erb_space(f_lo, f_hi, n_filters);
        let weights = Array2::from_shape_fn((n_filters, bins), |(m, k)| {
            T::lit(gammatone_magnitude(freqs[k], centers[m]))
        });
        let edges = centers
            .iter()
            .map(|&c| ((c - 2.0 * erb_hz(c)).max(0.0), (c + 2.0 * erb_hz(c)).min(nyquist)))
            .collect();
        return finish(weights, scale, centers, edges);
    }

    type Warp = fn(f64) -> f64;
    let (warp, unwarp): (Warp, Warp) = match scale {
        FrequencyScale::Mel => (hz_to_mel, mel_to_hz),
        FrequencyScale::Bark => (hz_to_bark, bark_to_hz),
        _ => (|f| f, |f| f),
    };
    let (lo, hi) = (warp(f_lo), warp(f_hi));
    let points: Vec<f64> = (0..n_filters + 2)
        .map(|i| unwarp(lo + (hi - lo) * i as f64 / (n_filters + 1) as f64))
        .collect();
    let mut weights = Array2::zeros((n_filters, bins));
    for m in 0..n_filters {
        let (l, c, r) = (points[m], points[m + 1], points[m + 2]);
        for (k, &f) in freqs.iter().enumerate() {
            let w = if f > l && f <= c {
                (f - l) / (c - l)
            } else if f > c && f < r {
                (r - f) / (r - c)
            } else {
                0.0
            };
            weights[[m, k]] = T::lit(w);
        }
    }
    let centers = points[1..=n_filters].to_vec();
    let edges = (0..n_filters).map(|m| (points[m], points[m + 2])).collect();
    finish(weights, scale, centers, edges)
}

fn finish<T: Scalar>(
    weights: Array2<T>,
    scale: FrequencyScale,
    center_freqs_hz: Vec<f64>,
    edges_hz: Vec<(f64, f64)>,
) -> Result<FilterBank<T>> {
    for (m, row) in weights.rows().into_iter().enumerate() {
        if !row.iter().any(|&w| w > T::zero()) {
            return Err(invalid(format!(
                "{scale} filter {m} (centre {:.1} Hz) covers no FFT bin; use fewer filters or a larger n_fft",
                center_freqs_hz[m]
            )));
        }
    }
    if center_freqs_hz.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("filter centre frequencies are not strictly increasing"));
    }
    Ok(FilterBank {
        weights,
        scale,
        center_freqs_hz,
        edges_hz,
    })
}
