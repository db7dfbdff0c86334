//! Shared DSP substrate: framing, windows and tapers, spectral transforms,
//! filterbanks, linear prediction, analytic signal and the constant-Q
//! transform.

pub mod cqt;
pub mod dct;
pub mod filterbank;
pub mod framing;
pub mod gammatone;
pub mod hilbert;
pub mod lpc;
pub mod spectrum;
pub mod waveform;
pub mod window;

pub use cqt::{cqt, cqt_direct, CqtConfig, CqtSpectrogram};
pub use dct::{dct2, Dct};
pub use filterbank::{make_filterbank, FilterBank, FrequencyScale};
pub use framing::{frame_signal, FrameMatrix};
pub use gammatone::gammatone_filter;
pub use hilbert::{analytic_signal, hilbert_envelope};
pub use lpc::{autocorrelation, levinson_durbin, lpc_to_cepstrum, LpModel};
pub use spectrum::{dft_complex, multitaper_spectrum, power_spectrum, ComplexSpectrogram, PowerSpectrogram};
pub use waveform::Waveform;
pub use window::{hamming_window, rectangular_window, sine_tapers, TaperSet, TaperWeighting};
