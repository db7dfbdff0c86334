use std::borrow::Cow;

use ndarray::{Array2, ArrayView2};

use super::config::Framing;
use crate::error::{invalid, Result};
use crate::scalar::{floored_ln, Scalar};
use crate::signal::{
    dft_complex, frame_signal, hamming_window, power_spectrum, Dct, FrameMatrix, PowerSpectrogram, Waveform,
};

/// Pre-emphasizes (when enabled) and frames the waveform.
pub(crate) fn frames<T: Scalar>(w: &Waveform<T>, framing: &Framing) -> Result<FrameMatrix<T>> {
    let src = if framing.pre_emphasis != 0.0 {
        Cow::Owned(w.pre_emphasized(T::lit(framing.pre_emphasis)))
    } else {
        Cow::Borrowed(w)
    };
    frame_signal(&src, framing.frame_ms, framing.shift_ms)
}

pub(crate) fn hamming_power<T: Scalar>(frames: &FrameMatrix<T>, n_fft: usize) -> Result<PowerSpectrogram<T>> {
    let window = hamming_window(frames.frame_len_samples)?;
    Ok(power_spectrum(&dft_complex(frames, &window, n_fft)?))
}

pub(crate) fn check_ceps(n_ceps: usize, available: usize, what: &str) -> Result<()> {
    if n_ceps == 0 || n_ceps > available {
        return Err(invalid(format!(
            "{what}: n_ceps must be in 1..={available} (got {n_ceps})"
        )));
    }
    Ok(())
}

/// Row-wise DCT-II keeping `n_out` coefficients.
pub(crate) fn dct_rows<T: Scalar>(x: ArrayView2<'_, T>, n_out: usize) -> Result<Array2<T>> {
    let dct = Dct::new(x.ncols(), n_out)?;
    let mut out = Array2::zeros((x.nrows(), n_out));
    let mut buf = vec![T::zero(); x.ncols()];
    for (row, mut dst) in x.rows().into_iter().zip(out.rows_mut()) {
        buf.iter_mut().zip(row.iter()).for_each(|(b, &v)| *b = v);
        dct.apply_into(&buf, dst.as_slice_mut().expect("standard layout"));
    }
    Ok(out)
}

/// Row-wise floored natural log followed by DCT-II.
pub(crate) fn log_dct_rows<T: Scalar>(x: ArrayView2<'_, T>, n_out: usize) -> Result<Array2<T>> {
    dct_rows(x.mapv(floored_ln).view(), n_out)
}
