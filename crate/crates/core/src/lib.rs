//! Acoustic front ends for speaker verification: fourteen feature
//! extractors over a shared DSP substrate, frame post-processing (energy
//! SAD, mean normalization, deltas, pitch), and detection metrics with
//! equal-weight score fusion.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below name the common concrete types.
//!
//! ```
//! use spkfeat::{extract, FeatureKind, FrontEndConfig, Waveform64};
//!
//! let tone: Vec<f64> = (0..16000).map(|t| (t as f64 * 0.2).sin() * 0.3).collect();
//! let w = Waveform64::new(tone, 16000).unwrap();
//! let mfcc = extract(FeatureKind::Mfcc, &w, &FrontEndConfig::default()).unwrap();
//! assert_eq!((mfcc.n_frames(), mfcc.dim()), (98, 30));
//! ```

// `!(x > 0.0)` is how NaN parameters get rejected, and index loops that
// mirror a formula's subscripts read better than zipped iterators.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod features;
pub mod io;
pub mod metrics;
pub mod pitch;
pub mod postproc;
pub mod scalar;
pub mod signal;
pub mod synth;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use features::{extract, FeatureKind, FeatureMatrix, FrontEndConfig};
pub use metrics::{det_points, eer, fuse_scores, min_dcf, DcfParams, DetCurve, Label, Trial, TrialScores};
pub use pitch::{extract_pitch, PitchConfig, PitchTrack};
pub use postproc::{append_pitch, cmn, deltas, postprocess, sad_mask, SadConfig, SadMask};
pub use scalar::Scalar;
pub use signal::Waveform;

pub type Waveform64 = Waveform<f64>;
pub type Waveform32 = Waveform<f32>;
pub type FeatureMatrix64 = FeatureMatrix<f64>;
pub type FeatureMatrix32 = FeatureMatrix<f32>;
pub type PitchTrack64 = PitchTrack<f64>;
pub type PitchTrack32 = PitchTrack<f32>;
pub type PowerSpectrogram64 = signal::PowerSpectrogram<f64>;
pub type ComplexSpectrogram64 = signal::ComplexSpectrogram<f64>;
pub type CqtSpectrogram64 = signal::CqtSpectrogram<f64>;
pub type FilterBank64 = signal::FilterBank<f64>;
pub type LpModel64 = signal::LpModel<f64>;
