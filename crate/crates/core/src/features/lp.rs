//! Linear-prediction cepstra: LPCC from the windowed frame and PLPCC from a
//! perceptually warped auditory spectrum.

use ndarray::Array2;

use super::common::{frames, hamming_power};
use super::config::CepstralConfig;
use super::{FeatureKind, FeatureMatrix};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;
use crate::signal::filterbank::FrequencyScale;
use crate::signal::lpc::SILENCE_EPS;
use crate::signal::{autocorrelation, hamming_window, levinson_durbin, lpc_to_cepstrum, make_filterbank, Waveform};

/// Cepstrum `c_1..c_n` of the LP model fitted to `autocorr`, or zeros when
/// the zero-lag value marks the frame as silent.
fn cepstrum_row<T: Scalar>(autocorr: &[T], order: usize, n_ceps: usize, out: &mut [T]) -> Result<()> {
    if autocorr[0] <= T::lit(SILENCE_EPS) {
        out.fill(T::zero());
        return Ok(());
    }
    let lp = levinson_durbin(autocorr, order)?;
    let c = lpc_to_cepstrum(&lp, n_ceps)?;
    out.copy_from_slice(&c[1..]);
    Ok(())
}

fn check_lp(cfg: &CepstralConfig) -> Result<()> {
    if cfg.lp_order == 0 || cfg.n_ceps == 0 {
        return Err(invalid("lp_order and n_ceps must be at least 1"));
    }
    Ok(())
}

/// LP cepstra `c_1..c_n` from Hamming-windowed frames.
pub fn lpcc<T: Scalar>(w: &Waveform<T>, cfg: &CepstralConfig) -> Result<FeatureMatrix<T>> {
    check_lp(cfg)?;
    let fr = frames(w, &cfg.framing)?;
    let window: Vec<T> = hamming_window(fr.frame_len_samples)?;
    let mut values = Array2::zeros((fr.n_frames(), cfg.n_ceps));
    let mut buf = vec![T::zero(); fr.frame_len_samples];
    for (i, mut row) in values.rows_mut().into_iter().enumerate() {
        buf.iter_mut()
            .zip(fr.frame(i).iter().zip(&window))
            .for_each(|(b, (&x, &h))| *b = x * h);
        let r = autocorrelation(&buf, cfg.lp_order);
        cepstrum_row(
            &r,
            cfg.lp_order,
            cfg.n_ceps,
            row.as_slice_mut().expect("standard layout"),
        )?;
    }
    Ok(FeatureMatrix::new(values, FeatureKind::Lpcc, cfg.framing.shift_ms))
}

/// Equal-loudness weight at `f_hz`:
/// `E(w) = (w^2 + 56.8e6) w^4 / ((w^2 + 6.3e6)^2 (w^2 + 0.38e9))`, `w = 2 pi f`.
pub fn equal_loudness(f_hz: f64) -> f64 {
    let w2 = (2.0 * std::f64::consts::PI * f_hz).powi(2);
    (w2 + 56.8e6) * w2 * w2 / ((w2 + 6.3e6).powi(2) * (w2 + 0.38e9))
}

/// Autocorrelation lags `0..=order` of the symmetric power spectrum whose
/// non-negative half is `a` (length `K`, spanning DC to Nyquist).
fn spectrum_autocorrelation<T: Scalar>(a: &[T], cos_table: &Array2<T>, out: &mut [T]) {
    let k = a.len();
    let scale = T::one() / T::count(2 * (k - 1));
    for (l, o) in out.iter_mut().enumerate() {
        let sign = if l % 2 == 0 { T::one() } else { -T::one() };
        let inner = (1..k - 1).fold(T::zero(), |acc, j| acc + a[j] * cos_table[[l, j]]);
        *o = scale * (a[0] + sign * a[k - 1] + T::lit(2.0) * inner);
    }
}

/// Perceptual LP cepstra: bark-band energies, equal-loudness weighting,
/// cube-root compression, an all-pole fit to the resulting auditory
/// spectrum and its cepstrum `c_1..c_n`.
pub fn plpcc<T: Scalar>(w: &Waveform<T>, cfg: &CepstralConfig) -> Result<FeatureMatrix<T>> {
    check_lp(cfg)?;
    let fs = w.sample_rate_hz();
    let fb = make_filterbank::<T>(
        FrequencyScale::Bark,
        cfg.n_filters,
        cfg.n_fft,
        fs,
        cfg.f_lo_hz,
        cfg.f_hi(fs),
    )?;
    // The auditory spectrum gets its edge bands repeated so it spans DC to
    // Nyquist with K = n_filters + 2 points.
    let k = cfg.n_filters + 2;
    if cfg.lp_order > k - 1 {
        return Err(invalid(format!(
            "plpcc lp_order {} exceeds the {} lags available from {} bands",
            cfg.lp_order,
            k - 1,
            cfg.n_filters
        )));
    }
    let loudness: Vec<T> = fb.center_freqs_hz.iter().map(|&f| T::lit(equal_loudness(f))).collect();
    let cos_table = Array2::from_shape_fn((cfg.lp_order + 1, k), |(l, j)| {
        T::lit((std::f64::consts::PI * (j * l) as f64 / (k - 1) as f64).cos())
    });
    let fr = frames(w, &cfg.framing)?;
    let power = hamming_power(&fr, cfg.n_fft)?;
    let energies = power.power.dot(&fb.weights.t());
    let third = T::lit(1.0 / 3.0);
    let mut values = Array2::zeros((fr.n_frames(), cfg.n_ceps));
    let mut aud = vec![T::zero(); k];
    let mut r = vec![T::zero(); cfg.lp_order + 1];
    for (e, mut row) in energies.rows().into_iter().zip(values.rows_mut()) {
        for (m, (&v, &q)) in e.iter().zip(&loudness).enumerate() {
            aud[m + 1] = (v * q).powf(third);
        }
        aud[0] = aud[1];
        aud[k - 1] = aud[k - 2];
        spectrum_autocorrelation(&aud, &cos_table, &mut r);
        cepstrum_row(
            &r,
            cfg.lp_order,
            cfg.n_ceps,
            row.as_slice_mut().expect("standard layout"),
        )?;
    }
    Ok(FeatureMatrix::new(values, FeatureKind::Plpcc, cfg.framing.shift_ms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::config::Framing;
    use crate::testutil::gaussian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ar2(n: usize) -> Waveform<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut x = vec![0.0f64; n];
        for t in 0..n {
            let e = 0.1 * gaussian(&mut rng);
            let p1 = if t >= 1 { x[t - 1] } else { 0.0 };
            let p2 = if t >= 2 { x[t - 2] } else { 0.0 };
            x[t] = e + 0.75 * p1 - 0.125 * p2;
        }
        Waveform::new(x, 16000).unwrap()
    }

    #[test]
    fn ar2_cepstrum_matches_generator() {
        // A(z) = (1 - 0.5 z^-1)(1 - 0.25 z^-1), so c_n = (0.5^n + 0.25^n) / n.
        let cfg = CepstralConfig {
            framing: Framing::default().without_pre_emphasis(),
            ..CepstralConfig::default()
        };
        let fm = lpcc(&ar2(16000), &cfg).unwrap();
        assert_eq!(fm.dim(), 30);
        let mean = fm.values.mean_axis(ndarray::Axis(0)).unwrap();
        for n in 1..=2 {
            let want = (0.5f64.powi(n) + 0.25f64.powi(n)) / n as f64;
            assert!(
                (mean[n as usize - 1] - want).abs() < 5e-2,
                "c{n}: {} vs {want}",
                mean[n as usize - 1]
            );
        }
    }

    #[test]
    fn silence_gives_zero_rows() {
        let w = Waveform::new(vec![0.0f64; 4000], 16000).unwrap();
        let cfg = CepstralConfig::default();
        assert!(lpcc(&w, &cfg).unwrap().values.iter().all(|&v| v == 0.0));
        let p = plpcc(&w, &cfg).unwrap();
        assert_eq!(p.dim(), 30);
        assert!(p.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn white_noise_is_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let w = Waveform::new((0..8000).map(|_| gaussian(&mut rng)).collect(), 16000).unwrap();
        let cfg = CepstralConfig::default();
        assert!(lpcc(&w, &cfg).unwrap().is_finite());
        let p = plpcc(&w, &cfg).unwrap();
        assert!(p.is_finite());
        assert_eq!(p.dim(), 30);
    }

    #[test]
    fn equal_loudness_rises_through_low_band() {
        let grid: Vec<f64> = (0..=150).map(|i| 10.0 * i as f64).collect();
        for pair in grid.windows(2) {
            assert!(equal_loudness(pair[1]) > equal_loudness(pair[0]));
        }
    }

    #[test]
    fn cosine_autocorrelation_matches_full_inverse_dft() {
        // Mirror the half spectrum to 2(K-1) points and take a direct IDFT.
        let a = [1.0f64, 0.7, 0.3, 0.9, 0.2];
        let k = a.len();
        let n = 2 * (k - 1);
        let full: Vec<f64> = (0..n).map(|j| if j < k { a[j] } else { a[n - j] }).collect();
        let table = Array2::from_shape_fn((k, k), |(l, j)| {
            (std::f64::consts::PI * (j * l) as f64 / (k - 1) as f64).cos()
        });
        let mut got = vec![0.0; k];
        spectrum_autocorrelation(&a, &table, &mut got);
        for l in 0..k {
            let want: f64 = full
                .iter()
                .enumerate()
                .map(|(j, v)| v * (2.0 * std::f64::consts::PI * (j * l) as f64 / n as f64).cos())
                .sum::<f64>()
                / n as f64;
            assert!((got[l] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn order_beyond_band_count_is_rejected() {
        let w = Waveform::new(vec![0.1f64; 4000], 16000).unwrap();
        let cfg = CepstralConfig {
            n_filters: 10,
            ..CepstralConfig::default()
        };
        assert!(plpcc(&w, &cfg).is_err());
    }
}
