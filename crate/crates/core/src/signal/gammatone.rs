//! Time-domain 4th-order gammatone filtering.
//!
//! The signal is shifted down by the centre frequency, passed through four
//! cascaded one-pole low-pass sections with pole `exp(-2 pi b / fs)`
//! (`b = 1.019 ERB(fc)`) and shifted back up. The cascade's impulse response
//! is `C(n+3, 3) p^n e^{i w n}`, a sampled gammatone of order 4. Each
//! section has unit DC gain, so the real output has unit gain at `fc`.

use num_complex::Complex64;

use super::filterbank::erb_hz;
use crate::scalar::Scalar;

pub fn gammatone_filter<T: Scalar>(x: &[T], center_hz: f64, sample_rate_hz: u32) -> Vec<T> {
    let fs = sample_rate_hz as f64;
    let b = 1.019 * erb_hz(center_hz);
    let pole = (-2.0 * std::f64::consts::PI * b / fs).exp();
    let gain = 1.0 - pole;
    let omega = 2.0 * std::f64::consts::PI * center_hz / fs;
    let step = Complex64::from_polar(1.0, omega);
    let mut carrier = Complex64::new(1.0, 0.0);
    let mut state = [Complex64::new(0.0, 0.0); 4];
    let mut out = Vec::with_capacity(x.len());
    for (n, &v) in x.iter().enumerate() {
        if n % 1024 == 0 {
            carrier = Complex64::from_polar(1.0, omega * n as f64);
        }
        let mut u = carrier.conj() * v.as_f64();
        for s in state.iter_mut() {
            *s = *s * pole + u * gain;
            u = *s;
        }
        out.push(T::lit(2.0 * (u * carrier).re));
        carrier *= step;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone_gain(f: f64, fc: f64) -> f64 {
        let fs = 16000;
        let x: Vec<f64> = (0..16000)
            .map(|t| (2.0 * PI * f * t as f64 / fs as f64).cos())
            .collect();
        let y = gammatone_filter(&x, fc, fs);
        let tail = &y[8000..];
        (2.0 * tail.iter().map(|v| v * v).sum::<f64>() / tail.len() as f64).sqrt()
    }

    #[test]
    fn unit_gain_at_centre() {
        assert!((tone_gain(1000.0, 1000.0) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn attenuates_off_centre() {
        let g = tone_gain(2000.0, 1000.0);
        assert!(g < 0.01, "{g}");
        // One ERB bandwidth away the 4th-order response is well below unity.
        assert!(tone_gain(1000.0 + 1.019 * erb_hz(1000.0), 1000.0) < 0.3);
    }
}
