//! Short-term phase features: modified group delay (MGDF), all-pole group
//! delay (APGDF), cosine of the unwrapped phase and the constant-Q
//! magnitude-phase octave coefficients (CMPOC).

use ndarray::Array2;
use num_complex::Complex;

use super::common::{check_ceps, dct_rows, frames};
use super::config::{ApgdfConfig, CmpocConfig, CosphaseConfig, MgdfConfig};
use super::{FeatureKind, FeatureMatrix};
use crate::error::{invalid, Result};
use crate::scalar::{floored_ln, Scalar, LOG_FLOOR};
use crate::signal::lpc::SILENCE_EPS;
use crate::signal::spectrum::{n_bins, RealDft};
use crate::signal::{autocorrelation, cqt, hamming_window, levinson_durbin, CqtConfig, Dct, Waveform};

/// How the magnitude spectrum in the MGDF denominator is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothing {
    /// Keep this many low quefrencies of the real cepstrum of `|X|`.
    Cepstral { lifter: usize },
    /// Use `|X|` as is.
    Raw,
}

impl MgdfConfig {
    pub fn smoothing(&self) -> Smoothing {
        if self.lifter == 0 {
            Smoothing::Raw
        } else {
            Smoothing::Cepstral { lifter: self.lifter }
        }
    }
}

/// Reusable buffers for the per-frame group-delay computations.
pub struct GroupDelayScratch<T: Scalar> {
    dft: RealDft<T>,
    n_fft: usize,
    x: Vec<Complex<T>>,
    y: Vec<Complex<T>>,
    log_mag: Vec<T>,
}

impl<T: Scalar> GroupDelayScratch<T> {
    pub fn new(n_fft: usize) -> Result<Self> {
        if !n_fft.is_power_of_two() {
            return Err(invalid(format!("n_fft={n_fft} is not a power of two")));
        }
        Ok(Self {
            dft: RealDft::new(n_fft),
            n_fft,
            x: vec![Complex::default(); n_fft],
            y: vec![Complex::default(); n_fft],
            log_mag: vec![T::zero(); n_fft],
        })
    }

    /// Spectra of `x[n]` and `n x[n]`.
    fn transform_pair(&mut self, x: &[T]) -> Result<()> {
        if x.len() > self.n_fft {
            return Err(invalid(format!(
                "frame of {} samples exceeds n_fft={}",
                x.len(),
                self.n_fft
            )));
        }
        self.x.copy_from_slice(self.dft.transform(x.iter().copied()));
        let ramp = x.iter().enumerate().map(|(n, &v)| T::count(n) * v);
        self.y.copy_from_slice(self.dft.transform(ramp));
        Ok(())
    }

    /// Cepstrally smoothed `|X|` for bins `0..=n_fft/2`, written to `out`.
    fn smoothed_magnitude(&mut self, lifter: usize, out: &mut [T]) {
        let n = self.n_fft;
        for (l, x) in self.log_mag.iter_mut().zip(&self.x) {
            *l = x.norm().max(T::lit(LOG_FLOOR)).ln();
        }
        // The log magnitude is real and even, so its inverse DFT is the
        // forward DFT scaled by 1/N and is itself real and even.
        let scale = T::one() / T::count(n);
        let cep: Vec<T> = self
            .dft
            .transform(self.log_mag.iter().copied())
            .iter()
            .map(|c| c.re * scale)
            .collect();
        let keep = lifter.min(n / 2);
        let liftered = cep
            .iter()
            .enumerate()
            .map(|(q, &c)| if q < keep || q > n - keep { c } else { T::zero() });
        let smooth = self.dft.transform(liftered);
        for (o, s) in out.iter_mut().zip(smooth) {
            *o = s.re.exp();
        }
    }
}

/// Modified group delay of one (already windowed) frame, bins `0..=n_fft/2`:
/// `tau = sign(p) |p / S^(2 gamma)|^alpha` with `p = X_R Y_R + X_I Y_I`,
/// `Y` the DFT of `n x[n]` and `S` the (smoothed) magnitude of `X`.
pub fn modified_group_delay<T: Scalar>(
    frame: &[T],
    alpha: f64,
    gamma: f64,
    smoothing: Smoothing,
    scratch: &mut GroupDelayScratch<T>,
    out: &mut [T],
) -> Result<()> {
    scratch.transform_pair(frame)?;
    let bins = n_bins(scratch.n_fft);
    match smoothing {
        Smoothing::Raw => {
            for (o, x) in out.iter_mut().zip(&scratch.x[..bins]) {
                *o = x.norm();
            }
        }
        Smoothing::Cepstral { lifter } => scratch.smoothed_magnitude(lifter, out),
    }
    let (alpha, two_gamma) = (T::lit(alpha), T::lit(2.0 * gamma));
    for k in 0..bins {
        let (x, y) = (scratch.x[k], scratch.y[k]);
        let p = x.re * y.re + x.im * y.im;
        let s = out[k].max(T::lit(LOG_FLOOR)).powf(two_gamma);
        let mag = (p / s).abs().powf(alpha);
        out[k] = if p < T::zero() {
            -mag
        } else if p > T::zero() {
            mag
        } else {
            T::zero()
        };
    }
    Ok(())
}

pub fn mgdf<T: Scalar>(w: &Waveform<T>, cfg: &MgdfConfig) -> Result<FeatureMatrix<T>> {
    if !(cfg.alpha > 0.0 && cfg.alpha <= 1.0 && cfg.gamma > 0.0 && cfg.gamma <= 1.0) {
        return Err(invalid(format!(
            "mgdf needs 0 < alpha <= 1 and 0 < gamma <= 1 (got {}, {})",
            cfg.alpha, cfg.gamma
        )));
    }
    let bins = n_bins(cfg.n_fft);
    check_ceps(cfg.n_ceps, bins, "mgdf")?;
    let fr = frames(w, &cfg.framing)?;
    let window: Vec<T> = hamming_window(fr.frame_len_samples)?;
    let mut scratch = GroupDelayScratch::new(cfg.n_fft)?;
    let mut tau = Array2::zeros((fr.n_frames(), bins));
    let mut buf = vec![T::zero(); fr.frame_len_samples];
    for (i, mut row) in tau.rows_mut().into_iter().enumerate() {
        buf.iter_mut()
            .zip(fr.frame(i).iter().zip(&window))
            .for_each(|(b, (&x, &h))| *b = x * h);
        let out = row.as_slice_mut().expect("standard layout");
        modified_group_delay(&buf, cfg.alpha, cfg.gamma, cfg.smoothing(), &mut scratch, out)?;
    }
    let values = dct_rows(tau.view(), cfg.n_ceps)?;
    Ok(FeatureMatrix::new(values, FeatureKind::Mgdf, cfg.framing.shift_ms))
}

/// Group delay of `1 / A(e^jw)` for the polynomial `[1, a_1, .., a_p]`,
/// bins `0..=n_fft/2`. Equals minus the group delay of `A`.
pub fn all_pole_group_delay<T: Scalar>(poly: &[T], scratch: &mut GroupDelayScratch<T>, out: &mut [T]) -> Result<()> {
    scratch.transform_pair(poly)?;
    for (o, (a, b)) in out.iter_mut().zip(scratch.x.iter().zip(&scratch.y)) {
        let den = a.norm_sqr().max(T::lit(LOG_FLOOR));
        *o = -(a.re * b.re + a.im * b.im) / den;
    }
    Ok(())
}

/// Per-frame all-pole group delay before the DCT, `n_frames x (n_fft/2+1)`.
/// Silent frames are all zero.
pub fn apgdf_spectra<T: Scalar>(w: &Waveform<T>, cfg: &ApgdfConfig) -> Result<Array2<T>> {
    if cfg.lp_order == 0 {
        return Err(invalid("apgdf lp_order must be at least 1"));
    }
    let fr = frames(w, &cfg.framing)?;
    let window: Vec<T> = hamming_window(fr.frame_len_samples)?;
    let mut scratch = GroupDelayScratch::new(cfg.n_fft)?;
    let mut gd = Array2::zeros((fr.n_frames(), n_bins(cfg.n_fft)));
    let mut buf = vec![T::zero(); fr.frame_len_samples];
    for (i, mut row) in gd.rows_mut().into_iter().enumerate() {
        buf.iter_mut()
            .zip(fr.frame(i).iter().zip(&window))
            .for_each(|(b, (&x, &h))| *b = x * h);
        let r = autocorrelation(&buf, cfg.lp_order);
        if r[0] <= T::lit(SILENCE_EPS) {
            continue;
        }
        let lp = levinson_durbin(&r, cfg.lp_order)?;
        all_pole_group_delay(
            &lp.polynomial(),
            &mut scratch,
            row.as_slice_mut().expect("standard layout"),
        )?;
    }
    Ok(gd)
}

pub fn apgdf<T: Scalar>(w: &Waveform<T>, cfg: &ApgdfConfig) -> Result<FeatureMatrix<T>> {
    check_ceps(cfg.n_ceps, n_bins(cfg.n_fft), "apgdf")?;
    let gd = apgdf_spectra(w, cfg)?;
    let values = dct_rows(gd.view(), cfg.n_ceps)?;
    Ok(FeatureMatrix::new(values, FeatureKind::Apgdf, cfg.framing.shift_ms))
}

/// Unwraps phase along frequency: each value is moved by a multiple of
/// `2 pi` to lie within `pi` of its predecessor. Bins flagged in `weak`
/// (magnitude below the floor) repeat the previous unwrapped value.
pub fn unwrap_phase<T: Scalar>(phase: &[T], weak: impl Fn(usize) -> bool, out: &mut [T]) {
    let two_pi = T::TAU();
    let mut prev = T::zero();
    for (k, (o, &p)) in out.iter_mut().zip(phase).enumerate() {
        *o = if weak(k) {
            prev
        } else if k == 0 {
            p
        } else {
            p + two_pi * ((prev - p) / two_pi).round()
        };
        prev = *o;
    }
}

pub fn cosphase<T: Scalar>(w: &Waveform<T>, cfg: &CosphaseConfig) -> Result<FeatureMatrix<T>> {
    let bins = n_bins(cfg.n_fft);
    check_ceps(cfg.n_ceps, bins, "cosphase")?;
    let fr = frames(w, &cfg.framing)?;
    let window: Vec<T> = hamming_window(fr.frame_len_samples)?;
    if cfg.n_fft < fr.frame_len_samples || !cfg.n_fft.is_power_of_two() {
        return Err(invalid(format!(
            "n_fft={} unusable for {}-sample frames",
            cfg.n_fft, fr.frame_len_samples
        )));
    }
    let mut dft = RealDft::new(cfg.n_fft);
    let mut cos = Array2::zeros((fr.n_frames(), bins));
    let mut phase = vec![T::zero(); bins];
    let mut unwrapped = vec![T::zero(); bins];
    let floor = T::lit(LOG_FLOOR);
    for (i, mut row) in cos.rows_mut().into_iter().enumerate() {
        let spec = dft.transform(fr.frame(i).iter().zip(&window).map(|(&x, &h)| x * h));
        let spec = &spec[..bins];
        phase.iter_mut().zip(spec).for_each(|(p, x)| *p = x.arg());
        unwrap_phase(&phase, |k| spec[k].norm() < floor, &mut unwrapped);
        row.iter_mut().zip(&unwrapped).for_each(|(c, &u)| *c = u.cos());
    }
    let values = dct_rows(cos.view(), cfg.n_ceps)?;
    Ok(FeatureMatrix::new(values, FeatureKind::Cosphase, cfg.framing.shift_ms))
}

/// `sqrt(ln(max(|X|, floor))^2 + phi^2)`.
pub fn magnitude_phase_spectrum<T: Scalar>(magnitude: T, phase: T) -> T {
    let l = floored_ln(magnitude);
    (l * l + phase * phase).sqrt()
}

/// Reorders per-octave DCT blocks coefficient-major: the first coefficient
/// of every octave (lowest octave first), then every second coefficient,
/// and so on. Octaves with fewer coefficients are skipped once exhausted.
fn interleave_octaves<T: Scalar>(blocks: &[Vec<T>], out: &mut Vec<T>) {
    out.clear();
    let longest = blocks.iter().map(Vec::len).max().unwrap_or(0);
    for q in 0..longest {
        out.extend(blocks.iter().filter_map(|b| b.get(q).copied()));
    }
}

pub fn cmpoc<T: Scalar>(w: &Waveform<T>, cfg: &CmpocConfig) -> Result<FeatureMatrix<T>> {
    let mut cq_cfg = CqtConfig::octaves_below_nyquist(w.sample_rate_hz(), cfg.bins_per_octave, cfg.n_octaves);
    cq_cfg.hop_ms = cfg.framing.shift_ms;
    cq_cfg.frame_ms = cfg.framing.frame_ms;
    let spec = cqt(w, &cq_cfg)?;
    check_ceps(cfg.n_ceps, spec.n_bins(), "cmpoc")?;
    let b = cfg.bins_per_octave;
    let octave_dcts: Vec<Dct<T>> = (0..spec.n_bins())
        .step_by(b)
        .map(|start| Dct::new((spec.n_bins() - start).min(b), (spec.n_bins() - start).min(b)))
        .collect::<Result<_>>()?;
    let mut values = Array2::zeros((spec.n_frames(), cfg.n_ceps));
    let mut log_mps = vec![T::zero(); spec.n_bins()];
    let mut blocks: Vec<Vec<T>> = octave_dcts.iter().map(|d| vec![T::zero(); d.n_out()]).collect();
    let mut merged = Vec::with_capacity(spec.n_bins());
    for i in 0..spec.n_frames() {
        for (k, l) in log_mps.iter_mut().enumerate() {
            *l = floored_ln(magnitude_phase_spectrum(spec.magnitude[[i, k]], spec.phase[[i, k]]));
        }
        for (o, (dct, block)) in octave_dcts.iter().zip(blocks.iter_mut()).enumerate() {
            dct.apply_into(&log_mps[o * b..o * b + dct.n_in()], block);
        }
        interleave_octaves(&blocks, &mut merged);
        values.row_mut(i).iter_mut().zip(&merged).for_each(|(v, &m)| *v = m);
    }
    Ok(FeatureMatrix::new(values, FeatureKind::Cmpoc, cfg.framing.shift_ms))
}
