use ndarray::{Array2, ArrayView1};

use super::Waveform;
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Frame length and shift used throughout: 25 ms / 10 ms.
pub const DEFAULT_FRAME_MS: f64 = 25.0;
pub const DEFAULT_SHIFT_MS: f64 = 10.0;

/// Overlapping frames cut from a waveform, one frame per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix<T> {
    pub frames: Array2<T>,
    pub frame_len_samples: usize,
    pub frame_shift_samples: usize,
    pub sample_rate_hz: u32,
}

impl<T: Scalar> FrameMatrix<T> {
    pub fn n_frames(&self) -> usize {
        self.frames.nrows()
    }

    pub fn frame(&self, i: usize) -> ArrayView1<'_, T> {
        self.frames.row(i)
    }
}

/// Number of whole frames that fit in `n_samples`; the trailing partial
/// frame is dropped.
pub fn frame_count(n_samples: usize, frame_len: usize, shift: usize) -> usize {
    if n_samples < frame_len || shift == 0 {
        0
    } else {
        1 + (n_samples - frame_len) / shift
    }
}

/// Frame length and shift in samples for a waveform at `sample_rate_hz`.
pub fn frame_geometry(sample_rate_hz: u32, frame_ms: f64, shift_ms: f64) -> Result<(usize, usize)> {
    if !(shift_ms > 0.0) || !(frame_ms >= shift_ms) {
        return Err(invalid(format!(
            "frame/shift must satisfy frame >= shift > 0 (got {frame_ms} ms / {shift_ms} ms)"
        )));
    }
    let fs = sample_rate_hz as f64;
    let len = (frame_ms * 1e-3 * fs).round() as usize;
    let shift = (shift_ms * 1e-3 * fs).round() as usize;
    if len == 0 || shift == 0 {
        return Err(invalid("frame or shift rounds to zero samples"));
    }
    Ok((len, shift))
}

pub fn frame_signal<T: Scalar>(w: &Waveform<T>, frame_ms: f64, shift_ms: f64) -> Result<FrameMatrix<T>> {
    let (len, shift) = frame_geometry(w.sample_rate_hz(), frame_ms, shift_ms)?;
    frame_samples(w.samples(), len, shift, w.sample_rate_hz())
}

pub(crate) fn frame_samples<T: Scalar>(
    x: &[T],
    len: usize,
    shift: usize,
    sample_rate_hz: u32,
) -> Result<FrameMatrix<T>> {
    let n = frame_count(x.len(), len, shift);
    if n == 0 {
        return Err(Error::EmptyInput(format!(
            "signal of {} samples is shorter than one {len}-sample frame",
            x.len()
        )));
    }
    let frames = Array2::from_shape_fn((n, len), |(i, t)| x[i * shift + t]);
    Ok(FrameMatrix {
        frames,
        frame_len_samples: len,
        frame_shift_samples: shift,
        sample_rate_hz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> Waveform<f64> {
        Waveform::new((0..n).map(|i| i as f64).collect(), 16000).unwrap()
    }

    #[test]
    fn exact_single_frame() {
        let f = frame_signal(&ramp(400), 25.0, 10.0).unwrap();
        assert_eq!(f.n_frames(), 1);
        assert_eq!(f.frame_len_samples, 400);
        assert_eq!(f.frame_shift_samples, 160);
    }

    #[test]
    fn frame_count_formula() {
        let f = frame_signal(&ramp(1000), 25.0, 10.0).unwrap();
        assert_eq!(f.n_frames(), 4);
        // Last frame ends at 3*160+400 = 880; samples 880..1000 are dropped.
        assert_eq!(f.frame(3)[399], 879.0);
    }

    #[test]
    fn rows_are_shifted_slices() {
        let f = frame_signal(&ramp(1000), 25.0, 10.0).unwrap();
        assert_eq!(f.frame(2)[0], 320.0);
    }

    #[test]
    fn too_short_is_empty_input() {
        let err = frame_signal(&ramp(399), 25.0, 10.0).unwrap_err();
        assert!(matches!(err, Error::EmptyInput(_)));
    }

    #[test]
    fn shift_longer_than_frame_rejected() {
        assert!(frame_signal(&ramp(1000), 10.0, 25.0).is_err());
        assert!(frame_signal(&ramp(1000), 25.0, 0.0).is_err());
    }
}
