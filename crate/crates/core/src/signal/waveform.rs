use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Mono sampled audio.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform<T> {
    samples: Vec<T>,
    sample_rate_hz: u32,
}

impl<T: Scalar> Waveform<T> {
    pub fn new(samples: Vec<T>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(invalid("sample rate must be positive"));
        }
        if samples.is_empty() {
            return Err(Error::EmptyInput("waveform has no samples".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(invalid(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Number of samples spanned by `ms` milliseconds, rounded.
    pub fn ms_to_samples(&self, ms: f64) -> usize {
        (ms * 1e-3 * self.sample_rate_hz as f64).round() as usize
    }

    /// Returns a copy with every sample multiplied by `gain`.
    pub fn scaled(&self, gain: T) -> Self {
        Self {
            samples: self.samples.iter().map(|&s| s * gain).collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    /// First-order pre-emphasis `y[n] = x[n] - coeff * x[n-1]`, with `y[0] = x[0]`.
    /// A zero coefficient returns an unchanged copy.
    pub fn pre_emphasized(&self, coeff: T) -> Self {
        if coeff == T::zero() {
            return self.clone();
        }
        let x = &self.samples;
        let mut out = Vec::with_capacity(x.len());
        out.push(x[0]);
        out.extend(x.windows(2).map(|w| w[1] - coeff * w[0]));
        Self {
            samples: out,
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }
}
