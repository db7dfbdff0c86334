//! Constant-Q transform.
//!
//! Bin `k` has centre `f_k = f_min 2^(k/B)`, quality `Q = 1 / (2^(1/B) - 1)`
//! and a periodic Hann window of `N_k = ceil(Q fs / f_k)` samples centred on
//! the analysis frame centre. The coefficient of bin `k` at centre `c` is
//!
//! ```text
//! X_k(c) = sum_{m=0}^{N_k-1} x[s+m] w_k[m] e^{-i w_k (s+m-c)},  s = c - floor(N_k/2)
//! ```
//!
//! with `x` zero outside the signal. Like the STFT, the sum is left
//! unnormalized; dividing by `N_k` would push single-bin powers of the long
//! low-frequency windows towards the log floor. Frames are centred on the STFT frames
//! (25 ms / 10 ms by default) so every extractor yields the same row count.
//!
//! [`cqt`] evaluates this sum exactly through running sums: the Hann window
//! is a combination of three complex exponentials, so each windowed inner
//! product is a difference of three prefix sums of `x[n] e^{-i theta n}`.
//! The cost is `O(bins x samples)` instead of `O(bins x frames x N_k)`,
//! which matters because the lowest bins span several seconds.
//! [`cqt_direct`] is the literal per-frame inner product.

use ndarray::Array2;
use num_complex::Complex64;

use super::framing::{frame_count, frame_geometry};
use super::Waveform;
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CqtConfig {
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub bins_per_octave: usize,
    pub hop_ms: f64,
    /// Length of the STFT frame the CQT frames are aligned with.
    pub frame_ms: f64,
}

impl CqtConfig {
    /// `n_octaves` octaves ending at `fs/2`.
    pub fn octaves_below_nyquist(sample_rate_hz: u32, bins_per_octave: usize, n_octaves: u32) -> Self {
        let f_max = sample_rate_hz as f64 / 2.0;
        Self {
            f_min_hz: f_max / 2f64.powi(n_octaves as i32),
            f_max_hz: f_max,
            bins_per_octave,
            hop_ms: 10.0,
            frame_ms: 25.0,
        }
    }

    pub fn quality(&self) -> f64 {
        1.0 / (2f64.powf(1.0 / self.bins_per_octave as f64) - 1.0)
    }

    /// Number of bins with centre strictly below `f_max`.
    pub fn n_bins(&self) -> usize {
        let span = self.bins_per_octave as f64 * (self.f_max_hz / self.f_min_hz).log2();
        (span - 1e-9).ceil().max(1.0) as usize
    }

    pub fn center_frequencies(&self) -> Vec<f64> {
        let b = self.bins_per_octave as f64;
        (0..self.n_bins())
            .map(|k| self.f_min_hz * 2f64.powf(k as f64 / b))
            .collect()
    }

    pub fn window_lengths(&self, sample_rate_hz: u32) -> Vec<usize> {
        let q = self.quality();
        self.center_frequencies()
            .iter()
            .map(|&f| (q * sample_rate_hz as f64 / f).ceil() as usize)
            .collect()
    }

    fn validate(&self, sample_rate_hz: u32) -> Result<()> {
        let nyquist = sample_rate_hz as f64 / 2.0;
        if self.bins_per_octave == 0 {
            return Err(invalid("bins_per_octave must be at least 1"));
        }
        if !(self.f_min_hz > 0.0 && self.f_min_hz < self.f_max_hz && self.f_max_hz <= nyquist) {
            return Err(invalid(format!(
                "CQT band must satisfy 0 < f_min < f_max <= fs/2 (got {}, {}, fs/2={nyquist})",
                self.f_min_hz, self.f_max_hz
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CqtSpectrogram<T> {
    /// `n_frames x n_bins`, `|X|`.
    pub magnitude: Array2<T>,
    /// Wrapped to `(-pi, pi]`; zero where the magnitude is zero.
    pub phase: Array2<T>,
    pub bins_per_octave: usize,
    pub f_min_hz: f64,
    pub center_freqs_hz: Vec<f64>,
}

impl<T: Scalar> CqtSpectrogram<T> {
    pub fn n_frames(&self) -> usize {
        self.magnitude.nrows()
    }

    pub fn n_bins(&self) -> usize {
        self.magnitude.ncols()
    }
}

struct Layout {
    centers: Vec<i64>,
    freqs: Vec<f64>,
    lengths: Vec<usize>,
}

fn layout(w_len: usize, sample_rate_hz: u32, cfg: &CqtConfig) -> Result<Layout> {
    cfg.validate(sample_rate_hz)?;
    let (frame_len, shift) = frame_geometry(sample_rate_hz, cfg.frame_ms, cfg.hop_ms)?;
    let n_frames = frame_count(w_len, frame_len, shift);
    if n_frames == 0 {
        return Err(Error::EmptyInput(format!(
            "signal of {w_len} samples is shorter than one {frame_len}-sample frame"
        )));
    }
    Ok(Layout {
        centers: (0..n_frames).map(|i| (i * shift + frame_len / 2) as i64).collect(),
        freqs: cfg.center_frequencies(),
        lengths: cfg.window_lengths(sample_rate_hz),
    })
}

fn finish<T: Scalar>(coeffs: Vec<Vec<Complex64>>, cfg: &CqtConfig, freqs: Vec<f64>) -> CqtSpectrogram<T> {
    let n_frames = coeffs.first().map_or(0, Vec::len);
    let n_bins = coeffs.len();
    let mut magnitude = Array2::zeros((n_frames, n_bins));
    let mut phase = Array2::zeros((n_frames, n_bins));
    for (k, column) in coeffs.iter().enumerate() {
        for (i, z) in column.iter().enumerate() {
            let mag = z.norm();
            magnitude[[i, k]] = T::lit(mag);
            phase[[i, k]] = T::lit(wrapped_phase(*z));
        }
    }
    CqtSpectrogram {
        magnitude,
        phase,
        bins_per_octave: cfg.bins_per_octave,
        f_min_hz: cfg.f_min_hz,
        center_freqs_hz: freqs,
    }
}

fn wrapped_phase(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    let p = z.im.atan2(z.re);
    if p <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        p
    }
}

/// Exact CQT by prefix sums; see the module docs.
pub fn cqt<T: Scalar>(w: &Waveform<T>, cfg: &CqtConfig) -> Result<CqtSpectrogram<T>> {
    let fs = w.sample_rate_hz();
    let lay = layout(w.len(), fs, cfg)?;
    let x: Vec<f64> = w.samples().iter().map(|v| v.as_f64()).collect();
    let tau = 2.0 * std::f64::consts::PI;
    let coeffs = lay
        .freqs
        .iter()
        .zip(&lay.lengths)
        .map(|(&f, &n)| bin_by_prefix_sums(&x, &lay.centers, tau * f / fs as f64, n))
        .collect();
    Ok(finish(coeffs, cfg, lay.freqs))
}

/// Literal per-frame windowed inner products. Quadratic in the window
/// length; meant for checking [`cqt`] on short signals.
pub fn cqt_direct<T: Scalar>(w: &Waveform<T>, cfg: &CqtConfig) -> Result<CqtSpectrogram<T>> {
    let fs = w.sample_rate_hz();
    let lay = layout(w.len(), fs, cfg)?;
    let x: Vec<f64> = w.samples().iter().map(|v| v.as_f64()).collect();
    let tau = 2.0 * std::f64::consts::PI;
    let coeffs = lay
        .freqs
        .iter()
        .zip(&lay.lengths)
        .map(|(&f, &n)| {
            let omega = tau * f / fs as f64;
            lay.centers
                .iter()
                .map(|&c| {
                    let s = c - (n / 2) as i64;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for m in 0..n {
                        let idx = s + m as i64;
                        if idx < 0 || idx >= x.len() as i64 {
                            continue;
                        }
                        let win = 0.5 - 0.5 * (tau * m as f64 / n as f64).cos();
                        acc += Complex64::from_polar(x[idx as usize] * win, -omega * (idx - c) as f64);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(finish(coeffs, cfg, lay.freqs))
}

/// Upper bound on a run of the rotation recurrence before its phasor is
/// recomputed from scratch.
const RESYNC: usize = 1024;

fn bin_by_prefix_sums(x: &[f64], centers: &[i64], omega: f64, n: usize) -> Vec<Complex64> {
    let len = x.len() as i64;
    let half = (n / 2) as i64;
    let starts: Vec<usize> = centers.iter().map(|&c| (c - half).clamp(0, len) as usize).collect();
    let ends: Vec<usize> = centers
        .iter()
        .map(|&c| (c - half + n as i64).clamp(0, len) as usize)
        .collect();

    // w[m] = 0.5 - 0.25 e^{i beta m} - 0.25 e^{-i beta m}; the three
    // frequencies below pair with weights 0.5, -0.25, -0.25.
    let beta = 2.0 * std::f64::consts::PI / n as f64;
    let thetas = [omega, omega - beta, omega + beta];
    let weights = [0.5, -0.25, -0.25];
    let steps = thetas.map(|t| Complex64::from_polar(1.0, -t));

    let n_frames = centers.len();
    let mut at_start = vec![[Complex64::new(0.0, 0.0); 3]; n_frames];
    let mut at_end = vec![[Complex64::new(0.0, 0.0); 3]; n_frames];
    let (mut is, mut ie) = (0usize, 0usize);
    let first = starts[0];
    let last = *ends.last().expect("at least one frame");
    let mut sums = [Complex64::new(0.0, 0.0); 3];
    let mut phasors = [Complex64::new(0.0, 0.0); 3];
    let mut pos = first;
    let mut next_resync = first;
    loop {
        while is < n_frames && starts[is] == pos {
            at_start[is] = sums;
            is += 1;
        }
        while ie < n_frames && ends[ie] == pos {
            at_end[ie] = sums;
            ie += 1;
        }
        if pos >= last {
            break;
        }
        let next_mark = starts.get(is).copied().unwrap_or(last).min(ends[ie]);
        if pos >= next_resync {
            phasors = thetas.map(|t| Complex64::from_polar(1.0, -t * pos as f64));
            next_resync = pos + RESYNC;
        }
        let stop = next_mark.min(next_resync);
        rotate_accumulate(&x[pos..stop], &mut sums, &mut phasors, &steps);
        pos = stop;
    }

    centers
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let s = c - half;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..3 {
                let seg = at_end[i][j] - at_start[i][j];
                acc += seg * Complex64::from_polar(weights[j], thetas[j] * s as f64);
            }
            acc * Complex64::from_polar(1.0, -omega * (s - c) as f64)
        })
        .collect()
}

/// `sums[j] += x[n] z_j; z_j *= step_j` over a run of samples, the three
/// recurrences interleaved.
#[inline]
fn rotate_accumulate(x: &[f64], sums: &mut [Complex64; 3], z: &mut [Complex64; 3], steps: &[Complex64; 3]) {
    for &v in x {
        for j in 0..3 {
            sums[j] += z[j] * v;
            z[j] *= steps[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn small_cfg() -> CqtConfig {
        CqtConfig {
            f_min_hz: 110.0,
            f_max_hz: 3520.0,
            bins_per_octave: 12,
            hop_ms: 10.0,
            frame_ms: 25.0,
        }
    }

    #[test]
    fn geometric_centres() {
        let cfg = CqtConfig {
            f_min_hz: 55.0,
            ..small_cfg()
        };
        let f = cfg.center_frequencies();
        assert_eq!(f[12], 110.0);
        assert_eq!(f[24], 220.0);
        for w in f.windows(2) {
            assert!((w[1] / w[0] - 2f64.powf(1.0 / 12.0)).abs() < 1e-12);
        }
        assert_eq!(small_cfg().n_bins(), 60);
        let full = CqtConfig::octaves_below_nyquist(16000, 96, 9);
        assert_eq!(full.n_bins(), 864);
    }

    #[test]
    fn prefix_sums_match_direct_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..4800).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w = Waveform::new(x, 16000).unwrap();
        let fast = cqt::<f64>(&w, &small_cfg()).unwrap();
        let slow = cqt_direct::<f64>(&w, &small_cfg()).unwrap();
        assert_eq!(fast.magnitude.dim(), slow.magnitude.dim());
        assert_eq!(fast.n_frames(), 28);
        let scale = slow.magnitude.iter().cloned().fold(0.0, f64::max);
        for (a, b) in fast.magnitude.iter().zip(slow.magnitude.iter()) {
            assert!((a - b).abs() < 1e-9 * scale, "{a} vs {b}");
        }
        for ((pa, pb), m) in fast.phase.iter().zip(slow.phase.iter()).zip(slow.magnitude.iter()) {
            if *m > 1e-6 * scale {
                let d = (pa - pb).rem_euclid(2.0 * PI);
                assert!(d.min(2.0 * PI - d) < 1e-6);
            }
        }
    }

    #[test]
    fn tone_peaks_at_its_bin() {
        let cfg = small_cfg();
        let f0 = cfg.center_frequencies()[30];
        let x: Vec<f64> = (0..16000).map(|t| (2.0 * PI * f0 * t as f64 / 16000.0).sin()).collect();
        let spec = cqt::<f64>(&Waveform::new(x, 16000).unwrap(), &cfg).unwrap();
        let longest = cfg.window_lengths(16000)[0] as i64;
        for i in 0..spec.n_frames() {
            let c = (i * 160 + 200) as i64;
            if c < longest || c + longest > 16000 {
                continue;
            }
            let row = spec.magnitude.row(i);
            let argmax = (0..row.len()).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
            assert_eq!(argmax, 30, "frame {i}");
        }
    }

    #[test]
    fn silence_has_zero_magnitude_and_phase() {
        let w = Waveform::new(vec![0.0f64; 3200], 16000).unwrap();
        let spec = cqt::<f64>(&w, &small_cfg()).unwrap();
        assert!(spec.magnitude.iter().all(|&v| v == 0.0));
        assert!(spec.phase.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn phase_range() {
        assert_eq!(wrapped_phase(Complex64::new(-1.0, -0.0)), PI);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..3200).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let spec = cqt::<f64>(&Waveform::new(x, 16000).unwrap(), &small_cfg()).unwrap();
        assert!(spec.phase.iter().all(|&p| p > -PI && p <= PI));
    }

    #[test]
    fn invalid_band() {
        let w = Waveform::new(vec![0.0f64; 3200], 16000).unwrap();
        let bad = CqtConfig {
            f_max_hz: 9000.0,
            ..small_cfg()
        };
        assert!(cqt::<f64>(&w, &bad).is_err());
        let bad = CqtConfig {
            f_min_hz: 4000.0,
            f_max_hz: 3000.0,
            ..small_cfg()
        };
        assert!(cqt::<f64>(&w, &bad).is_err());
        let bad = CqtConfig {
            bins_per_octave: 0,
            ..small_cfg()
        };
        assert!(cqt::<f64>(&w, &bad).is_err());
    }
}
