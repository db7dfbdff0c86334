//! Features built on long-term processing: mean Hilbert envelope
//! coefficients (MHEC) and power-normalized cepstral coefficients (PNCC).

use ndarray::{Array2, Axis};

use super::common::{check_ceps, dct_rows, frames, hamming_power, log_dct_rows};
use super::config::{MhecConfig, PnccConfig};
use super::{FeatureKind, FeatureMatrix};
use crate::error::{invalid, Result};
use crate::scalar::{Scalar, LOG_FLOOR};
use crate::signal::filterbank::{erb_space, FrequencyScale};
use crate::signal::{gammatone_filter, hilbert_envelope, make_filterbank, Waveform};

/// Hilbert envelopes of a gammatone filterbank, one row per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeBank<T> {
    /// `n_channels x n_samples`, non-negative.
    pub envelopes: Array2<T>,
    /// Increasing.
    pub channel_center_freqs_hz: Vec<f64>,
}

pub fn envelope_bank<T: Scalar>(x: &[T], sample_rate_hz: u32, centers_hz: &[f64]) -> Result<EnvelopeBank<T>> {
    let mut envelopes = Array2::zeros((centers_hz.len(), x.len()));
    for (mut row, &fc) in envelopes.rows_mut().into_iter().zip(centers_hz) {
        let band = gammatone_filter(x, fc, sample_rate_hz);
        row.iter_mut().zip(hilbert_envelope(&band)?).for_each(|(r, e)| *r = e);
    }
    Ok(EnvelopeBank {
        envelopes,
        channel_center_freqs_hz: centers_hz.to_vec(),
    })
}

/// First-order low-pass `y[n] = y[n-1] + a (x[n] - y[n-1])`,
/// `a = 1 - exp(-2 pi fc / fs)`, started at `y[0] = x[0]`.
pub fn one_pole_lowpass<T: Scalar>(x: &mut [T], cutoff_hz: f64, sample_rate_hz: u32) {
    let a = T::lit(1.0 - (-2.0 * std::f64::consts::PI * cutoff_hz / sample_rate_hz as f64).exp());
    let mut y = match x.first() {
        Some(&v) => v,
        None => return,
    };
    for v in x.iter_mut() {
        y = y + a * (*v - y);
        *v = y;
    }
}

/// Output dimension is `min(n_ceps, n_channels)`.
pub fn mhec<T: Scalar>(w: &Waveform<T>, cfg: &MhecConfig) -> Result<FeatureMatrix<T>> {
    let fs = w.sample_rate_hz();
    let nyquist = fs as f64 / 2.0;
    let f_hi = cfg.f_hi_hz.unwrap_or(0.9 * nyquist);
    if cfg.n_channels == 0 || !(cfg.f_lo_hz > 0.0 && cfg.f_lo_hz < f_hi && f_hi <= nyquist) {
        return Err(invalid(format!(
            "mhec needs channels and 0 < f_lo < f_hi <= fs/2 (got {} channels, {} to {f_hi} Hz)",
            cfg.n_channels, cfg.f_lo_hz
        )));
    }
    if !(cfg.lowpass_hz > 0.0) {
        return Err(invalid("mhec low-pass cutoff must be positive"));
    }
    let dim = cfg.n_ceps.min(cfg.n_channels);
    check_ceps(dim, cfg.n_channels, "mhec")?;
    // Framing first so a too-short input fails before the filterbank runs.
    let fr = frames(w, &cfg.framing)?;
    let pre = if cfg.framing.pre_emphasis != 0.0 {
        w.pre_emphasized(T::lit(cfg.framing.pre_emphasis)).into_samples()
    } else {
        w.samples().to_vec()
    };
    let centers = erb_space(cfg.f_lo_hz, f_hi, cfg.n_channels);
    let bank = envelope_bank(&pre, fs, &centers)?;
    let (len, shift) = (fr.frame_len_samples, fr.frame_shift_samples);
    let n_frames = fr.n_frames();
    let mut energy = Array2::zeros((n_frames, cfg.n_channels));
    let inv_len = T::one() / T::count(len);
    for (j, env) in bank.envelopes.rows().into_iter().enumerate() {
        let mut smooth = env.to_vec();
        one_pole_lowpass(&mut smooth, cfg.lowpass_hz, fs);
        for i in 0..n_frames {
            let seg = &smooth[i * shift..i * shift + len];
            energy[[i, j]] = seg.iter().copied().sum::<T>() * inv_len;
        }
    }
    let values = log_dct_rows(energy.view(), dim)?;
    Ok(FeatureMatrix::new(values, FeatureKind::Mhec, cfg.framing.shift_ms))
}

/// Asymmetric low-pass filter run along time for each channel (column):
/// `y[m] = l y[m-1] + (1 - l) x[m]` with `l = lambda_a` when the input is at
/// or above the previous output and `l = lambda_b` otherwise. Rises slowly
/// and falls fast, so it follows the lower envelope. Starts at `y[0] = x[0]`.
pub fn asymmetric_lowpass<T: Scalar>(x: &Array2<T>, lambda_a: f64, lambda_b: f64) -> Array2<T> {
    let (la, lb) = (T::lit(lambda_a), T::lit(lambda_b));
    let mut y = x.clone();
    for mut col in y.columns_mut() {
        let mut prev = col[0];
        for v in col.iter_mut() {
            let l = if *v >= prev { la } else { lb };
            prev = l * prev + (T::one() - l) * *v;
            *v = prev;
        }
    }
    y
}

/// Mean over the `2M+1` frames centred on each frame, truncated at the
/// utterance edges.
pub fn medium_time_power<T: Scalar>(p: &Array2<T>, m: usize) -> Array2<T> {
    let n = p.nrows();
    let mut out = Array2::zeros(p.dim());
    for i in 0..n {
        let (lo, hi) = (i.saturating_sub(m), (i + m).min(n - 1));
        let mean = p
            .slice(ndarray::s![lo..=hi, ..])
            .mean_axis(Axis(0))
            .expect("non-empty window");
        out.row_mut(i).assign(&mean);
    }
    out
}

/// Temporal masking: the peak power `Q_p` decays by `lambda_t` per frame;
/// an onset that clears the decayed peak passes, anything weaker is replaced
/// by `mu_t` times the decayed peak.
fn temporal_masking<T: Scalar>(q0: &Array2<T>, lambda_t: f64, mu_t: f64) -> Array2<T> {
    let (lt, mt) = (T::lit(lambda_t), T::lit(mu_t));
    let mut out = q0.clone();
    for mut col in out.columns_mut() {
        let mut peak = T::zero();
        for v in col.iter_mut() {
            let decayed = lt * peak;
            let q = *v;
            peak = decayed.max(q);
            *v = if q >= decayed { q } else { mt * decayed };
        }
    }
    out
}

/// Gammatone power cepstra with medium-time noise suppression, temporal
/// masking, channel-smoothed gain, running mean-power normalization and a
/// `1/15` power law in place of the logarithm.
pub fn pncc<T: Scalar>(w: &Waveform<T>, cfg: &PnccConfig) -> Result<FeatureMatrix<T>> {
    check_ceps(cfg.n_ceps, cfg.n_channels, "pncc")?;
    let fs = w.sample_rate_hz();
    let f_hi = cfg.f_hi_hz.unwrap_or(fs as f64 / 2.0);
    let fb = make_filterbank::<T>(
        FrequencyScale::Gammatone,
        cfg.n_channels,
        cfg.n_fft,
        fs,
        cfg.f_lo_hz,
        f_hi,
    )?;
    let squared = fb.weights.mapv(|v| v * v);
    let fr = frames(w, &cfg.framing)?;
    let power = hamming_power(&fr, cfg.n_fft)?;
    let p = power.power.dot(&squared.t());

    let floor = T::lit(LOG_FLOOR);
    let q_tilde = medium_time_power(&p, cfg.medium_time_frames);
    let q_le = asymmetric_lowpass(&q_tilde, cfg.lambda_a, cfg.lambda_b);
    let q0 = ndarray::Zip::from(&q_tilde)
        .and(&q_le)
        .map_collect(|&q, &le| (q - le).max(T::zero()));
    let q_f = asymmetric_lowpass(&q0, cfg.lambda_a, cfg.lambda_b);
    let masked = temporal_masking(&q0, cfg.lambda_t, cfg.mu_t);
    let c = T::lit(cfg.excitation_factor);
    let r = ndarray::Zip::from(&q_tilde)
        .and(&q_le)
        .and(&masked)
        .and(&q_f)
        .map_collect(|&q, &le, &tm, &qf| if q >= c * le { tm.max(qf) } else { qf });

    let (n_frames, l) = p.dim();
    let half = cfg.smoothing_channels;
    let mut t = Array2::zeros((n_frames, l));
    for i in 0..n_frames {
        for ch in 0..l {
            let (lo, hi) = (ch.saturating_sub(half), (ch + half).min(l - 1));
            let gain = (lo..=hi).map(|k| r[[i, k]] / q_tilde[[i, k]].max(floor)).sum::<T>() / T::count(hi - lo + 1);
            t[[i, ch]] = p[[i, ch]] * gain;
        }
    }

    // Running mean power, started from the utterance average so the first
    // frames are not divided by a cold estimate.
    let frame_mean = t.mean_axis(Axis(1)).expect("channels present");
    let mut mu = frame_mean.mean().expect("frames present");
    let lm = T::lit(cfg.lambda_mu);
    let exponent = T::lit(cfg.power_exponent);
    let mut v = Array2::zeros((n_frames, l));
    for i in 0..n_frames {
        mu = lm * mu + (T::one() - lm) * frame_mean[i];
        let denom = mu.max(floor);
        for ch in 0..l {
            v[[i, ch]] = (t[[i, ch]] / denom).powf(exponent);
        }
    }
    let values = dct_rows(v.view(), cfg.n_ceps)?;
    Ok(FeatureMatrix::new(values, FeatureKind::Pncc, cfg.framing.shift_ms))
}
