//! Analysis windows and the sine-taper family used by the multi-taper
//! spectrum estimator.

use ndarray::Array2;

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Symmetric Hamming window `0.54 - 0.46 cos(2 pi t / (n - 1))`.
/// A length-1 window is defined as `[1.0]`.
pub fn hamming_window<T: Scalar>(n: usize) -> Result<Vec<T>> {
    if n == 0 {
        return Err(invalid("window length must be at least 1"));
    }
    if n == 1 {
        return Ok(vec![T::one()]);
    }
    let denom = (n - 1) as f64;
    Ok((0..n)
        .map(|t| T::lit(0.54 - 0.46 * (2.0 * std::f64::consts::PI * t as f64 / denom).cos()))
        .collect())
}

pub fn rectangular_window<T: Scalar>(n: usize) -> Vec<T> {
    vec![T::one(); n]
}

/// How the per-taper weights of a sine-taper set are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TaperWeighting {
    /// `lambda(j)` proportional to `cos^2(pi j / (2 (K + 1)))`, normalized to sum 1.
    #[default]
    Swce,
    /// `1 / K` for every taper.
    Uniform,
}

/// `K` tapers of length `N` with their spectral weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TaperSet<T> {
    /// `K x N`, one taper per row.
    pub tapers: Array2<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> TaperSet<T> {
    pub fn n_tapers(&self) -> usize {
        self.tapers.nrows()
    }

    pub fn taper_len(&self) -> usize {
        self.tapers.ncols()
    }

    /// Wraps a single window as a one-taper set with weight 1.
    pub fn single(window: &[T]) -> Self {
        Self {
            tapers: Array2::from_shape_vec((1, window.len()), window.to_vec()).expect("row vector shape"),
            weights: vec![T::one()],
        }
    }
}

/// Sine tapers `w_j(t) = sqrt(2/(n+1)) sin(pi j (t+1) / (n+1))`, `j = 1..=k`.
pub fn sine_tapers<T: Scalar>(n: usize, k: usize, weighting: TaperWeighting) -> Result<TaperSet<T>> {
    if k == 0 || k >= n {
        return Err(invalid(format!("need 1 <= k < n for sine tapers (k={k}, n={n})")));
    }
    let pi = std::f64::consts::PI;
    let scale = (2.0 / (n as f64 + 1.0)).sqrt();
    let tapers = Array2::from_shape_fn((k, n), |(j, t)| {
        let j = (j + 1) as f64;
        T::lit(scale * (pi * j * (t as f64 + 1.0) / (n as f64 + 1.0)).sin())
    });
    let raw: Vec<f64> = match weighting {
        TaperWeighting::Uniform => vec![1.0; k],
        TaperWeighting::Swce => (1..=k)
            .map(|j| (pi * j as f64 / (2.0 * (k as f64 + 1.0))).cos().powi(2))
            .collect(),
    };
    let total: f64 = raw.iter().sum();
    let weights = raw.into_iter().map(|v| T::lit(v / total)).collect();
    Ok(TaperSet { tapers, weights })
}
