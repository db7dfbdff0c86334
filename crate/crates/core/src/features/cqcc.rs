//! Constant-Q cepstral coefficients.

use ndarray::Array2;

use super::common::{check_ceps, dct_rows};
use super::config::CqccConfig;
use super::{FeatureKind, FeatureMatrix};
use crate::error::{invalid, Result};
use crate::scalar::{floored_ln, Scalar};
use crate::signal::{cqt, CqtConfig, Waveform};

/// Interpolation taps `(lower bin, fraction)` that map a geometric CQT bin
/// axis onto `n` points spaced uniformly in Hz between the first and last
/// bin centres.
pub fn uniform_resampling_taps(center_freqs_hz: &[f64], bins_per_octave: usize, n: usize) -> Vec<(usize, f64)> {
    let k = center_freqs_hz.len();
    let (f0, f1) = (center_freqs_hz[0], center_freqs_hz[k - 1]);
    (0..n)
        .map(|j| {
            let f = if n == 1 {
                f0
            } else {
                f0 + (f1 - f0) * j as f64 / (n - 1) as f64
            };
            let u = (bins_per_octave as f64 * (f / f0).log2()).clamp(0.0, (k - 1) as f64);
            let lo = (u.floor() as usize).min(k.saturating_sub(2));
            (lo, u - lo as f64)
        })
        .collect()
}

/// `|CQT|^2` of the raw waveform, log-compressed, resampled to
/// `cfg.n_uniform` linearly spaced frequencies and DCT'd; coefficient 0 is
/// kept.
pub fn cqcc<T: Scalar>(w: &Waveform<T>, cfg: &CqccConfig) -> Result<FeatureMatrix<T>> {
    check_ceps(cfg.n_ceps, cfg.n_uniform, "cqcc")?;
    let mut cq_cfg = CqtConfig::octaves_below_nyquist(w.sample_rate_hz(), cfg.bins_per_octave, cfg.n_octaves);
    cq_cfg.hop_ms = cfg.framing.shift_ms;
    cq_cfg.frame_ms = cfg.framing.frame_ms;
    let spec = cqt(w, &cq_cfg)?;
    if spec.n_bins() < 2 {
        return Err(invalid("cqcc needs at least two constant-Q bins"));
    }
    let taps = uniform_resampling_taps(&spec.center_freqs_hz, cfg.bins_per_octave, cfg.n_uniform);
    let mut uniform = Array2::zeros((spec.n_frames(), cfg.n_uniform));
    let mut log_power = vec![T::zero(); spec.n_bins()];
    for (mag, mut out) in spec.magnitude.rows().into_iter().zip(uniform.rows_mut()) {
        log_power
            .iter_mut()
            .zip(mag.iter())
            .for_each(|(l, &m)| *l = floored_ln(m * m));
        for (o, &(lo, frac)) in out.iter_mut().zip(&taps) {
            let frac = T::lit(frac);
            *o = log_power[lo] * (T::one() - frac) + log_power[lo + 1] * frac;
        }
    }
    let values = dct_rows(uniform.view(), cfg.n_ceps)?;
    Ok(FeatureMatrix::new(values, FeatureKind::Cqcc, cfg.framing.shift_ms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{silence, white_noise};

    #[test]
    fn taps_hit_bin_centres_at_the_ends() {
        let freqs: Vec<f64> = (0..25).map(|k| 55.0 * 2f64.powf(k as f64 / 12.0)).collect();
        let taps = uniform_resampling_taps(&freqs, 12, 9);
        assert_eq!(taps[0], (0, 0.0));
        let (lo, frac) = taps[8];
        assert!((lo as f64 + frac - 24.0).abs() < 1e-9);
        // The middle point sits at the arithmetic mean frequency.
        let mid: f64 = 0.5 * (55.0 + 220.0);
        let (lo, frac) = taps[4];
        assert!((lo as f64 + frac - 12.0 * (mid / 55.0).log2()).abs() < 1e-9);
    }

    #[test]
    fn dimension_gain_and_silence() {
        let cfg = CqccConfig::default();
        let w = white_noise(16000, 0.3, 21);
        let base = cqcc(&w, &cfg).unwrap();
        assert_eq!(base.dim(), 60);
        assert_eq!(base.n_frames(), 98);
        for g in [0.1, 10.0] {
            let other = cqcc(&w.scaled(g), &cfg).unwrap();
            for (i, j) in (0..base.n_frames()).flat_map(|i| (1..60).map(move |j| (i, j))) {
                assert!((base.values[[i, j]] - other.values[[i, j]]).abs() < 1e-6);
            }
        }
        let s = cqcc(&silence(4000), &cfg).unwrap();
        for r in 1..s.n_frames() {
            assert_eq!(s.row(r), s.row(0));
        }
    }
}
