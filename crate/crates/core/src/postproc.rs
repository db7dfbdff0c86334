//! Energy speech activity detection, utterance mean normalization, delta
//! features and pitch appending.

use ndarray::{concatenate, s, Array2, Axis};

use crate::error::{invalid, Error, Result};
use crate::features::FeatureMatrix;
use crate::pitch::PitchTrack;
use crate::scalar::{floored_ln, Scalar};
use crate::signal::framing::{frame_count, frame_geometry};
use crate::signal::Waveform;

/// Frame energies are measured on the 16-bit PCM scale, so the threshold is
/// an absolute level independent of how samples were normalized on load.
pub const PCM16_SCALE: f64 = 32768.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SadConfig {
    pub frame_ms: f64,
    pub shift_ms: f64,
    /// Absolute log-energy offset.
    pub threshold: f64,
    /// Weight of the utterance mean log-energy.
    pub mean_scale: f64,
}

impl Default for SadConfig {
    fn default() -> Self {
        Self {
            frame_ms: 25.0,
            shift_ms: 10.0,
            threshold: 5.5,
            mean_scale: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SadMask {
    pub keep: Vec<bool>,
}

impl SadMask {
    pub fn len(&self) -> usize {
        self.keep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keep.is_empty()
    }

    pub fn n_kept(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }
}

/// Keeps frame `i` iff `E_i > threshold + mean_scale * mean(E)`, where
/// `E_i = ln(max(sum (32768 x)^2, floor))` over the frame's samples.
/// Gain-sensitive by design: the threshold is an absolute floor.
pub fn sad_mask<T: Scalar>(w: &Waveform<T>, cfg: &SadConfig) -> Result<SadMask> {
    let (len, shift) = frame_geometry(w.sample_rate_hz(), cfg.frame_ms, cfg.shift_ms)?;
    let n = frame_count(w.len(), len, shift);
    if n == 0 {
        return Err(Error::EmptyInput(format!(
            "{} samples is shorter than one {len}-sample frame",
            w.len()
        )));
    }
    let x = w.samples();
    let energies: Vec<f64> = (0..n)
        .map(|i| {
            let e: f64 = x[i * shift..i * shift + len]
                .iter()
                .map(|&v| (v.as_f64() * PCM16_SCALE).powi(2))
                .sum();
            floored_ln(e)
        })
        .collect();
    let mean = energies.iter().sum::<f64>() / n as f64;
    let cut = cfg.threshold + cfg.mean_scale * mean;
    Ok(SadMask {
        keep: energies.iter().map(|&e| e > cut).collect(),
    })
}

/// Drops the rows the mask rejects.
pub fn apply_mask<T: Scalar>(f: &FeatureMatrix<T>, mask: &SadMask) -> Result<FeatureMatrix<T>> {
    if mask.len() != f.n_frames() {
        return Err(Error::LengthMismatch {
            what: "SAD mask vs feature frames",
            expected: f.n_frames(),
            actual: mask.len(),
        });
    }
    let rows: Vec<usize> = (0..mask.len()).filter(|&i| mask.keep[i]).collect();
    Ok(FeatureMatrix {
        values: f.values.select(Axis(0), &rows),
        ..f.clone()
    })
}

/// Subtracts the utterance mean from every column not listed in `exempt`.
pub fn cmn<T: Scalar>(f: &FeatureMatrix<T>, exempt: &[usize]) -> Result<FeatureMatrix<T>> {
    if f.n_frames() == 0 {
        return Err(Error::EmptyInput(
            "mean normalization of a matrix with no frames".into(),
        ));
    }
    let mean = f.values.mean_axis(Axis(0)).expect("frames present");
    let mut out = f.clone();
    for (j, mut col) in out.values.columns_mut().into_iter().enumerate() {
        if !exempt.contains(&j) {
            col.mapv_inplace(|v| v - mean[j]);
        }
    }
    Ok(out)
}

/// Regression delta with half-width `w` and edge replication:
/// `d_t = sum_{k=1}^{w} k (x_{t+k} - x_{t-k}) / (2 sum k^2)`.
pub fn delta_series<T: Scalar>(x: &[T], w: usize) -> Vec<T> {
    let n = x.len() as isize;
    let at = |t: isize| x[t.clamp(0, n - 1) as usize];
    let denom = T::count(2 * (1..=w).map(|k| k * k).sum::<usize>());
    (0..n)
        .map(|t| {
            let num = (1..=w as isize).fold(T::zero(), |acc, k| acc + T::count(k as usize) * (at(t + k) - at(t - k)));
            num / denom
        })
        .collect()
}

fn delta_matrix<T: Scalar>(x: &Array2<T>, w: usize) -> Array2<T> {
    let mut out = Array2::zeros(x.dim());
    for (src, mut dst) in x.columns().into_iter().zip(out.columns_mut()) {
        let d = delta_series(&src.to_vec(), w);
        dst.iter_mut().zip(d).for_each(|(o, v)| *o = v);
    }
    out
}

/// Half-width of the delta regression window.
pub const DELTA_WINDOW: usize = 2;

/// `[static | delta]` for order 1 or `[static | delta | delta-delta]` for
/// order 2.
pub fn deltas<T: Scalar>(f: &FeatureMatrix<T>, order: usize) -> Result<FeatureMatrix<T>> {
    if !(1..=2).contains(&order) {
        return Err(invalid(format!("delta order must be 1 or 2 (got {order})")));
    }
    if f.n_frames() < 2 * DELTA_WINDOW + 1 {
        return Err(Error::EmptyInput(format!(
            "deltas need at least {} frames, got {}",
            2 * DELTA_WINDOW + 1,
            f.n_frames()
        )));
    }
    let mut blocks = vec![f.values.clone()];
    for _ in 0..order {
        let next = delta_matrix(blocks.last().expect("static block"), DELTA_WINDOW);
        blocks.push(next);
    }
    let views: Vec<_> = blocks.iter().map(|b| b.view()).collect();
    Ok(FeatureMatrix {
        values: concatenate(Axis(1), &views).expect("equal row counts"),
        ..f.clone()
    })
}

/// Appends `[pov, log pitch, delta pitch]` and marks those columns exempt
/// from mean normalization.
pub fn append_pitch<T: Scalar>(f: &FeatureMatrix<T>, p: &PitchTrack<T>) -> Result<FeatureMatrix<T>> {
    if p.n_frames() != f.n_frames() {
        return Err(Error::LengthMismatch {
            what: "pitch track vs feature frames",
            expected: f.n_frames(),
            actual: p.n_frames(),
        });
    }
    let d = f.dim();
    let mut values = Array2::zeros((f.n_frames(), d + 3));
    values.slice_mut(s![.., ..d]).assign(&f.values);
    for i in 0..f.n_frames() {
        values[[i, d]] = p.pov[i];
        values[[i, d + 1]] = p.log_pitch[i];
        values[[i, d + 2]] = p.delta_pitch[i];
    }
    let mut cmn_exempt = f.cmn_exempt.clone();
    cmn_exempt.extend([d, d + 1, d + 2]);
    Ok(FeatureMatrix {
        values,
        cmn_exempt,
        ..f.clone()
    })
}

/// Standard chain: drop frames rejected by SAD (when given), then mean
/// normalize the surviving rows (when requested) leaving the matrix's
/// exempt columns alone.
pub fn postprocess<T: Scalar>(
    w: &Waveform<T>,
    f: &FeatureMatrix<T>,
    sad: Option<&SadConfig>,
    apply_cmn: bool,
) -> Result<FeatureMatrix<T>> {
    let kept = match sad {
        Some(cfg) => apply_mask(f, &sad_mask(w, cfg)?)?,
        None => f.clone(),
    };
    if apply_cmn {
        cmn(&kept, &kept.cmn_exempt)
    } else {
        Ok(kept)
    }
}
