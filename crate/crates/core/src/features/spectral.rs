//! Magnitude-spectrum features: MFCC, multi-taper MFCC, spectral centroid
//! frequencies (SCFC) and spectral centroid magnitudes (SCMC).

use ndarray::{Array2, Axis};

use super::common::{check_ceps, frames, hamming_power, log_dct_rows};
use super::config::{CepstralConfig, MultitaperConfig};
use super::{FeatureKind, FeatureMatrix};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::signal::filterbank::FrequencyScale;
use crate::signal::spectrum::bin_frequencies;
use crate::signal::{make_filterbank, multitaper_spectrum, sine_tapers, FilterBank, PowerSpectrogram, Waveform};

fn filterbank<T: Scalar>(scale: FrequencyScale, cfg: &CepstralConfig, fs: u32) -> Result<FilterBank<T>> {
    make_filterbank(scale, cfg.n_filters, cfg.n_fft, fs, cfg.f_lo_hz, cfg.f_hi(fs))
}

/// Filterbank energies of every frame, `n_frames x n_filters`.
pub fn filterbank_energies<T: Scalar>(power: &PowerSpectrogram<T>, fb: &FilterBank<T>) -> Array2<T> {
    power.power.dot(&fb.weights.t())
}

/// `DCT(ln(max(fb . P, floor)))` for each frame, first `n_ceps` coefficients.
pub fn filterbank_cepstra<T: Scalar>(
    power: &PowerSpectrogram<T>,
    fb: &FilterBank<T>,
    n_ceps: usize,
) -> Result<Array2<T>> {
    check_ceps(n_ceps, fb.n_filters(), "filterbank cepstra")?;
    log_dct_rows(filterbank_energies(power, fb).view(), n_ceps)
}

/// Mel cepstra from Hamming-windowed power spectra. Coefficient 0 is kept.
pub fn mfcc<T: Scalar>(w: &Waveform<T>, cfg: &CepstralConfig) -> Result<FeatureMatrix<T>> {
    check_ceps(cfg.n_ceps, cfg.n_filters, "mfcc")?;
    let fr = frames(w, &cfg.framing)?;
    let power = hamming_power(&fr, cfg.n_fft)?;
    let fb = filterbank(FrequencyScale::Mel, cfg, w.sample_rate_hz())?;
    let values = filterbank_cepstra(&power, &fb, cfg.n_ceps)?;
    Ok(FeatureMatrix::new(values, FeatureKind::Mfcc, cfg.framing.shift_ms))
}

/// MFCC with the power spectrum estimated from `mt.n_tapers` sine tapers
/// instead of a Hamming periodogram.
pub fn multitaper_mfcc<T: Scalar>(
    w: &Waveform<T>,
    cfg: &CepstralConfig,
    mt: &MultitaperConfig,
) -> Result<FeatureMatrix<T>> {
    check_ceps(cfg.n_ceps, cfg.n_filters, "multi-taper mfcc")?;
    let fr = frames(w, &cfg.framing)?;
    let tapers = sine_tapers(fr.frame_len_samples, mt.n_tapers, mt.weighting)?;
    let power = multitaper_spectrum(&fr, &tapers, cfg.n_fft)?;
    let fb = filterbank(FrequencyScale::Mel, cfg, w.sample_rate_hz())?;
    let values = filterbank_cepstra(&power, &fb, cfg.n_ceps)?;
    Ok(FeatureMatrix::new(
        values,
        FeatureKind::MultiTaper,
        cfg.framing.shift_ms,
    ))
}

/// Subband centroid frequencies in Hz, one per mel subband, without log or
/// DCT. A subband with no energy reports its centre frequency.
pub fn scfc<T: Scalar>(w: &Waveform<T>, cfg: &CepstralConfig) -> Result<FeatureMatrix<T>> {
    let fr = frames(w, &cfg.framing)?;
    let power = hamming_power(&fr, cfg.n_fft)?;
    let fb: FilterBank<T> = filterbank(FrequencyScale::Mel, cfg, w.sample_rate_hz())?;
    let freqs: Vec<T> = bin_frequencies(cfg.n_fft, w.sample_rate_hz())
        .into_iter()
        .map(T::lit)
        .collect();
    let freq_weighted = &fb.weights * &ndarray::ArrayView1::from(&freqs).insert_axis(Axis(0));
    let num = power.power.dot(&freq_weighted.t());
    let den = filterbank_energies(&power, &fb);
    let values = Array2::from_shape_fn(num.dim(), |(i, m)| {
        if den[[i, m]] > T::zero() {
            num[[i, m]] / den[[i, m]]
        } else {
            T::lit(fb.center_freqs_hz[m])
        }
    });
    Ok(FeatureMatrix::new(values, FeatureKind::Scfc, cfg.framing.shift_ms))
}

/// Subband centroid magnitudes: the mean power of each mel subband weighted
/// by the normalized frequency `k / n_bins`, then log and DCT.
pub fn scmc<T: Scalar>(w: &Waveform<T>, cfg: &CepstralConfig) -> Result<FeatureMatrix<T>> {
    check_ceps(cfg.n_ceps, cfg.n_filters, "scmc")?;
    let fr = frames(w, &cfg.framing)?;
    let power = hamming_power(&fr, cfg.n_fft)?;
    let fb: FilterBank<T> = filterbank(FrequencyScale::Mel, cfg, w.sample_rate_hz())?;
    let bins = fb.n_bins();
    let fhat: Vec<T> = (0..bins).map(|k| T::count(k) / T::count(bins)).collect();
    let weighted = &fb.weights * &ndarray::ArrayView1::from(&fhat).insert_axis(Axis(0));
    let norm = weighted.sum_axis(Axis(1));
    let mut scm = power.power.dot(&weighted.t());
    for mut row in scm.rows_mut() {
        row.iter_mut()
            .zip(&norm)
            .for_each(|(v, &n)| *v = *v / n.max(T::min_positive_value()));
    }
    let values = log_dct_rows(scm.view(), cfg.n_ceps)?;
    Ok(FeatureMatrix::new(values, FeatureKind::Scmc, cfg.framing.shift_ms))
}
