use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{FrameMatrix, TaperSet};
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Half-spectrum DFT of each frame: bins `0..=n_fft/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrogram<T> {
    pub real_part: Array2<T>,
    pub imag_part: Array2<T>,
    pub n_fft: usize,
    pub sample_rate_hz: u32,
}

impl<T: Scalar> ComplexSpectrogram<T> {
    pub fn n_frames(&self) -> usize {
        self.real_part.nrows()
    }

    pub fn n_bins(&self) -> usize {
        self.real_part.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrogram<T> {
    pub power: Array2<T>,
    pub n_fft: usize,
    pub sample_rate_hz: u32,
}

impl<T: Scalar> PowerSpectrogram<T> {
    pub fn n_frames(&self) -> usize {
        self.power.nrows()
    }

    pub fn n_bins(&self) -> usize {
        self.power.ncols()
    }
}

pub fn n_bins(n_fft: usize) -> usize {
    n_fft / 2 + 1
}

/// Centre frequency in Hz of each half-spectrum bin.
pub fn bin_frequencies(n_fft: usize, sample_rate_hz: u32) -> Vec<f64> {
    let df = sample_rate_hz as f64 / n_fft as f64;
    (0..n_bins(n_fft)).map(|k| k as f64 * df).collect()
}

/// Zero-padded forward DFT of real input, unnormalized.
pub(crate) struct RealDft<T: Scalar> {
    fft: Arc<dyn Fft<T>>,
    buf: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: Scalar> RealDft<T> {
    pub fn new(n_fft: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(n_fft);
        let scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        Self {
            fft,
            buf: vec![Complex::default(); n_fft],
            scratch,
        }
    }

    /// Transforms `x` (length at most `n_fft`); returns the full spectrum.
    pub fn transform<I>(&mut self, x: I) -> &[Complex<T>]
    where
        I: IntoIterator<Item = T>,
    {
        self.buf.fill(Complex::default());
        for (slot, v) in self.buf.iter_mut().zip(x) {
            slot.re = v;
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        &self.buf
    }
}

fn check_fft_size(n_fft: usize, frame_len: usize) -> Result<()> {
    if !n_fft.is_power_of_two() {
        return Err(invalid(format!("n_fft={n_fft} is not a power of two")));
    }
    if n_fft < frame_len {
        return Err(invalid(format!(
            "n_fft={n_fft} is shorter than the {frame_len}-sample frame"
        )));
    }
    Ok(())
}

/// DFT of each windowed, zero-padded frame.
pub fn dft_complex<T: Scalar>(frames: &FrameMatrix<T>, window: &[T], n_fft: usize) -> Result<ComplexSpectrogram<T>> {
    let len = frames.frame_len_samples;
    check_fft_size(n_fft, len)?;
    if window.len() != len {
        return Err(Error::LengthMismatch {
            what: "window vs frame length",
            expected: len,
            actual: window.len(),
        });
    }
    let bins = n_bins(n_fft);
    let n = frames.n_frames();
    let mut real_part = Array2::zeros((n, bins));
    let mut imag_part = Array2::zeros((n, bins));
    let mut dft = RealDft::new(n_fft);
    for i in 0..n {
        let spec = dft.transform(frames.frame(i).iter().zip(window).map(|(&x, &w)| x * w));
        for k in 0..bins {
            real_part[[i, k]] = spec[k].re;
            imag_part[[i, k]] = spec[k].im;
        }
    }
    Ok(ComplexSpectrogram {
        real_part,
        imag_part,
        n_fft,
        sample_rate_hz: frames.sample_rate_hz,
    })
}

pub fn power_spectrum<T: Scalar>(spec: &ComplexSpectrogram<T>) -> PowerSpectrogram<T> {
    let power = ndarray::Zip::from(&spec.real_part)
        .and(&spec.imag_part)
        .map_collect(|&re, &im| re * re + im * im);
    PowerSpectrogram {
        power,
        n_fft: spec.n_fft,
        sample_rate_hz: spec.sample_rate_hz,
    }
}

/// Weighted sum of single-taper periodograms,
/// `S(f) = sum_j lambda_j |sum_t w_j(t) x(t) e^{-i 2 pi t f / N}|^2`.
pub fn multitaper_spectrum<T: Scalar>(
    frames: &FrameMatrix<T>,
    tapers: &TaperSet<T>,
    n_fft: usize,
) -> Result<PowerSpectrogram<T>> {
    let len = frames.frame_len_samples;
    check_fft_size(n_fft, len)?;
    if tapers.taper_len() != len {
        return Err(Error::LengthMismatch {
            what: "taper vs frame length",
            expected: len,
            actual: tapers.taper_len(),
        });
    }
    let bins = n_bins(n_fft);
    let mut power = Array2::zeros((frames.n_frames(), bins));
    let mut dft = RealDft::new(n_fft);
    for i in 0..frames.n_frames() {
        let frame = frames.frame(i);
        for (taper, &weight) in tapers.tapers.rows().into_iter().zip(&tapers.weights) {
            let spec = dft.transform(frame.iter().zip(taper.iter()).map(|(&x, &w)| x * w));
            for k in 0..bins {
                power[[i, k]] = power[[i, k]] + weight * spec[k].norm_sqr();
            }
        }
    }
    Ok(PowerSpectrogram {
        power,
        n_fft,
        sample_rate_hz: frames.sample_rate_hz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{frame_signal, hamming_window, rectangular_window, sine_tapers, TaperWeighting, Waveform};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one_frame(x: Vec<f64>) -> FrameMatrix<f64> {
        let n = x.len();
        crate::signal::framing::frame_samples(&x, n, n, 16000).unwrap()
    }

    /// O(n^2) reference DFT.
    fn direct_dft(x: &[f64], n_fft: usize) -> Vec<(f64, f64)> {
        (0..n_fft)
            .map(|k| {
                x.iter().enumerate().fold((0.0, 0.0), |(re, im), (t, &v)| {
                    let ph = -2.0 * std::f64::consts::PI * (k * t) as f64 / n_fft as f64;
                    (re + v * ph.cos(), im + v * ph.sin())
                })
            })
            .collect()
    }

    #[test]
    fn zero_frame_zero_spectrum() {
        let f = one_frame(vec![0.0; 8]);
        let s = dft_complex(&f, &rectangular_window(8), 8).unwrap();
        assert!(s.real_part.iter().chain(s.imag_part.iter()).all(|&v| v == 0.0));
    }

    #[test]
    fn impulse_is_flat() {
        let mut x = vec![0.0; 8];
        x[0] = 1.0;
        let s = dft_complex(&one_frame(x), &rectangular_window(8), 16).unwrap();
        assert_eq!(s.n_bins(), 9);
        for k in 0..9 {
            assert!((s.real_part[[0, k]] - 1.0).abs() < 1e-15);
            assert!(s.imag_part[[0, k]].abs() < 1e-15);
        }
    }

    #[test]
    fn cosine_matches_direct_dft() {
        let x: Vec<f64> = (0..8)
            .map(|t| (2.0 * std::f64::consts::PI * 3.0 * t as f64 / 8.0).cos())
            .collect();
        let s = dft_complex(&one_frame(x.clone()), &rectangular_window(8), 8).unwrap();
        let oracle = direct_dft(&x, 8);
        for k in 0..5 {
            assert!((s.real_part[[0, k]] - oracle[k].0).abs() < 1e-12);
            assert!((s.imag_part[[0, k]] - oracle[k].1).abs() < 1e-12);
            let p = s.real_part[[0, k]].powi(2) + s.imag_part[[0, k]].powi(2);
            if k == 3 {
                assert!((p - 16.0).abs() < 1e-9);
            } else {
                assert!(p < 1e-20);
            }
        }
    }

    #[test]
    fn power_is_modulus_squared() {
        let spec = ComplexSpectrogram {
            real_part: Array2::from_elem((1, 1), 3.0),
            imag_part: Array2::from_elem((1, 1), 4.0),
            n_fft: 2,
            sample_rate_hz: 16000,
        };
        assert_eq!(power_spectrum(&spec).power[[0, 0]], 25.0);
    }

    #[test]
    fn rejects_bad_sizes() {
        let f = one_frame(vec![0.0; 400]);
        assert!(dft_complex(&f, &rectangular_window(400), 256).is_err());
        assert!(dft_complex(&f, &rectangular_window(400), 500).is_err());
        assert!(dft_complex(&f, &rectangular_window(399), 512).is_err());
    }

    #[test]
    fn multitaper_single_hamming_reduces_to_periodogram() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..4000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w = Waveform::new(x, 16000).unwrap();
        let frames = frame_signal(&w, 25.0, 10.0).unwrap();
        let ham = hamming_window(400).unwrap();
        let direct = power_spectrum(&dft_complex(&frames, &ham, 512).unwrap());
        let mt = multitaper_spectrum(&frames, &TaperSet::single(&ham), 512).unwrap();
        for (a, b) in direct.power.iter().zip(mt.power.iter()) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn multitaper_zero_and_mismatch() {
        let f = one_frame(vec![0.0; 400]);
        let set = sine_tapers::<f64>(400, 8, TaperWeighting::Swce).unwrap();
        let p = multitaper_spectrum(&f, &set, 512).unwrap();
        assert!(p.power.iter().all(|&v| v == 0.0));
        let short = sine_tapers::<f64>(300, 8, TaperWeighting::Swce).unwrap();
        assert!(multitaper_spectrum(&f, &short, 512).is_err());
    }
}
