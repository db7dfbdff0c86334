//! The fourteen extractors and their shared output type.

mod common;
pub mod config;
pub mod cqcc;
pub mod lp;
pub mod phase;
pub mod robust;
pub mod spectral;

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;
use crate::signal::Waveform;

pub use config::{
    ApgdfConfig, CepstralConfig, CmpocConfig, CosphaseConfig, CqccConfig, Framing, FrontEndConfig, MgdfConfig,
    MhecConfig, MultitaperConfig, PnccConfig,
};
pub use cqcc::cqcc;
pub use lp::{equal_loudness, lpcc, plpcc};
pub use phase::{apgdf, cmpoc, cosphase, mgdf, Smoothing};
pub use robust::{mhec, pncc};
pub use spectral::{mfcc, multitaper_mfcc, scfc, scmc};

/// Feature families, in the order used for on-disk kind codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureKind {
    Mfcc,
    Cqcc,
    Lpcc,
    Plpcc,
    Scfc,
    Scmc,
    MultiTaper,
    Mgdf,
    Apgdf,
    Cosphase,
    Cmpoc,
    Mhec,
    Pncc,
    MfccPitch,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 14] = [
        Self::Mfcc,
        Self::Cqcc,
        Self::Lpcc,
        Self::Plpcc,
        Self::Scfc,
        Self::Scmc,
        Self::MultiTaper,
        Self::Mgdf,
        Self::Apgdf,
        Self::Cosphase,
        Self::Cmpoc,
        Self::Mhec,
        Self::Pncc,
        Self::MfccPitch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Mfcc => "mfcc",
            Self::Cqcc => "cqcc",
            Self::Lpcc => "lpcc",
            Self::Plpcc => "plpcc",
            Self::Scfc => "scfc",
            Self::Scmc => "scmc",
            Self::MultiTaper => "multitaper",
            Self::Mgdf => "mgdf",
            Self::Apgdf => "apgdf",
            Self::Cosphase => "cosphase",
            Self::Cmpoc => "cmpoc",
            Self::Mhec => "mhec",
            Self::Pncc => "pncc",
            Self::MfccPitch => "mfcc-pitch",
        }
    }

    pub fn code(self) -> u32 {
        Self::ALL.iter().position(|&k| k == self).expect("kind listed in ALL") as u32
    }

    pub fn from_code(code: u32) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    /// Output dimension with default settings.
    pub fn default_dim(self) -> usize {
        match self {
            Self::Cqcc => 60,
            Self::MfccPitch => 33,
            _ => 30,
        }
    }

    /// Columns that bypass mean normalization by default.
    pub fn default_cmn_exempt(self) -> Vec<usize> {
        match self {
            Self::MfccPitch => vec![30, 31, 32],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        let alias = match norm.as_str() {
            "multi-taper" | "mt-mfcc" => "multitaper",
            "mfcc+pitch" | "mfccpitch" => "mfcc-pitch",
            other => other,
        };
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == alias)
            .ok_or_else(|| invalid(format!("unknown feature kind '{s}'")))
    }
}

/// `n_frames x dim` feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    pub values: Array2<T>,
    pub kind: FeatureKind,
    pub frame_shift_ms: f64,
    pub source_id: String,
    /// Columns left untouched by mean normalization.
    pub cmn_exempt: Vec<usize>,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(values: Array2<T>, kind: FeatureKind, frame_shift_ms: f64) -> Self {
        Self {
            values,
            kind,
            frame_shift_ms,
            source_id: String::new(),
            cmn_exempt: kind.default_cmn_exempt(),
        }
    }

    pub fn with_source(mut self, id: impl Into<String>) -> Self {
        self.source_id = id.into();
        self
    }

    pub fn n_frames(&self) -> usize {
        self.values.nrows()
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, T> {
        self.values.row(i)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Runs the extractor for `kind` with the settings in `cfg`.
pub fn extract<T: Scalar>(kind: FeatureKind, w: &Waveform<T>, cfg: &FrontEndConfig) -> Result<FeatureMatrix<T>> {
    let fm = match kind {
        FeatureKind::Mfcc => mfcc(w, &cfg.mfcc()),
        FeatureKind::MultiTaper => multitaper_mfcc(w, &cfg.mfcc(), &cfg.multitaper),
        FeatureKind::Lpcc => lpcc(w, &cfg.lpcc()),
        FeatureKind::Plpcc => plpcc(w, &cfg.plpcc()),
        FeatureKind::Scfc => scfc(w, &cfg.scfc()),
        FeatureKind::Scmc => scmc(w, &cfg.scmc()),
        FeatureKind::Cqcc => cqcc(w, &cfg.cqcc()),
        FeatureKind::Mgdf => mgdf(w, &cfg.mgdf()),
        FeatureKind::Apgdf => apgdf(w, &cfg.apgdf()),
        FeatureKind::Cosphase => cosphase(w, &cfg.cosphase()),
        FeatureKind::Cmpoc => cmpoc(w, &cfg.cmpoc()),
        FeatureKind::Mhec => mhec(w, &cfg.mhec()),
        FeatureKind::Pncc => pncc(w, &cfg.pncc()),
        FeatureKind::MfccPitch => {
            let base = mfcc(w, &cfg.mfcc())?;
            let track = crate::pitch::extract_pitch(w, &cfg.pitch())?;
            let mut fm = crate::postproc::append_pitch(&base, &track)?;
            fm.kind = FeatureKind::MfccPitch;
            Ok(fm)
        }
    }?;
    Ok(fm)
}
