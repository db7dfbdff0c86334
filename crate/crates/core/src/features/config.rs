//! Extractor settings. Defaults reproduce the reference configuration:
//! 25 ms / 10 ms Hamming frames, 512-point FFT, 30 filters and 30
//! coefficients for the cepstral families, LP order 30, 8 sine tapers,
//! MGDF `alpha = 0.4`, `gamma = 0.9`, 96 CQT bins per octave and 60 CQCC
//! coefficients.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pitch::PitchConfig;
use crate::postproc::SadConfig;
use crate::signal::TaperWeighting;

#[derive(Debug, Clone, PartialEq)]
pub struct Framing {
    pub frame_ms: f64,
    pub shift_ms: f64,
    /// Pre-emphasis coefficient; `0` disables it. Ignored by CQT-based
    /// features.
    pub pre_emphasis: f64,
}

impl Default for Framing {
    fn default() -> Self {
        Self {
            frame_ms: 25.0,
            shift_ms: 10.0,
            pre_emphasis: 0.97,
        }
    }
}

impl Framing {
    pub fn without_pre_emphasis(mut self) -> Self {
        self.pre_emphasis = 0.0;
        self
    }
}

/// Settings shared by the filterbank and linear-prediction cepstra.
#[derive(Debug, Clone, PartialEq)]
pub struct CepstralConfig {
    pub framing: Framing,
    pub n_filters: usize,
    pub n_ceps: usize,
    pub n_fft: usize,
    pub lp_order: usize,
    pub f_lo_hz: f64,
    /// `None` means `fs / 2`.
    pub f_hi_hz: Option<f64>,
}

impl Default for CepstralConfig {
    fn default() -> Self {
        Self {
            framing: Framing::default(),
            n_filters: 30,
            n_ceps: 30,
            n_fft: 512,
            lp_order: 30,
            f_lo_hz: 20.0,
            f_hi_hz: None,
        }
    }
}

impl CepstralConfig {
    pub fn f_hi(&self, sample_rate_hz: u32) -> f64 {
        self.f_hi_hz.unwrap_or(sample_rate_hz as f64 / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultitaperConfig {
    pub n_tapers: usize,
    pub weighting: TaperWeighting,
}

impl Default for MultitaperConfig {
    fn default() -> Self {
        Self {
            n_tapers: 8,
            weighting: TaperWeighting::Swce,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CqccConfig {
    pub framing: Framing,
    pub bins_per_octave: usize,
    /// Octaves below `fs / 2`.
    pub n_octaves: u32,
    /// Points of the uniform frequency grid the log power is resampled to.
    pub n_uniform: usize,
    pub n_ceps: usize,
}

impl Default for CqccConfig {
    fn default() -> Self {
        Self {
            framing: Framing::default().without_pre_emphasis(),
            bins_per_octave: 96,
            n_octaves: 9,
            n_uniform: 512,
            n_ceps: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MgdfConfig {
    pub framing: Framing,
    pub alpha: f64,
    pub gamma: f64,
    /// Quefrency bins kept when smoothing `|X|`; `0` uses `|X|` unsmoothed.
    pub lifter: usize,
    pub n_fft: usize,
    pub n_ceps: usize,
}

impl Default for MgdfConfig {
    fn default() -> Self {
        Self {
            framing: Framing::default(),
            alpha: 0.4,
            gamma: 0.9,
            lifter: 30,
            n_fft: 512,
            n_ceps: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApgdfConfig {
    pub framing: Framing,
    pub lp_order: usize,
    pub n_fft: usize,
    pub n_ceps: usize,
}

impl Default for ApgdfConfig {
    fn default() -> Self {
        Self {
            framing: Framing::default(),
            lp_order: 30,
            n_fft: 512,
            n_ceps: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CosphaseConfig {
    pub framing: Framing,
    pub n_fft: usize,
    pub n_ceps: usize,
}

impl Default for CosphaseConfig {
    fn default() -> Self {
        Self {
            framing: Framing::default(),
            n_fft: 512,
            n_ceps: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmpocConfig {
    pub framing: Framing,
    pub bins_per_octave: usize,
    pub n_octaves: u32,
    pub n_ceps: usize,
}

impl Default for CmpocConfig {
    fn default() -> Self {
        Self {
            framing: Framing::default().without_pre_emphasis(),
            bins_per_octave: 96,
            n_octaves: 9,
            n_ceps: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MhecConfig {
    pub framing: Framing,
    /// Output dimension is `min(n_ceps, n_channels)`.
    pub n_channels: usize,
    pub n_ceps: usize,
    pub f_lo_hz: f64,
    /// `None` means `0.9 fs / 2`.
    pub f_hi_hz: Option<f64>,
    pub lowpass_hz: f64,
}

impl Default for MhecConfig {
    fn default() -> Self {
        Self {
            framing: Framing::default(),
            n_channels: 30,
            n_ceps: 30,
            f_lo_hz: 100.0,
            f_hi_hz: None,
            lowpass_hz: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PnccConfig {
    pub framing: Framing,
    pub n_fft: usize,
    pub n_channels: usize,
    pub n_ceps: usize,
    pub f_lo_hz: f64,
    /// `None` means `fs / 2`.
    pub f_hi_hz: Option<f64>,
    /// Medium-time half window `M` (frames on each side).
    pub medium_time_frames: usize,
    pub lambda_a: f64,
    pub lambda_b: f64,
    /// Excitation test factor `c`.
    pub excitation_factor: f64,
    pub lambda_t: f64,
    pub mu_t: f64,
    /// Channel half-width `N` of the weight smoothing.
    pub smoothing_channels: usize,
    pub lambda_mu: f64,
    pub power_exponent: f64,
}

impl Default for PnccConfig {
    fn default() -> Self {
        Self {
            framing: Framing::default(),
            n_fft: 512,
            n_channels: 40,
            n_ceps: 30,
            f_lo_hz: 200.0,
            f_hi_hz: None,
            medium_time_frames: 2,
            lambda_a: 0.999,
            lambda_b: 0.5,
            excitation_factor: 2.0,
            lambda_t: 0.85,
            mu_t: 0.2,
            smoothing_channels: 4,
            lambda_mu: 0.999,
            power_exponent: 1.0 / 15.0,
        }
    }
}

/// Complete front-end configuration, addressable by `section.key` names.
///
/// `frame.*` and `frame.n_fft` apply to every extractor; the framing stored
/// inside the per-feature structs is overwritten when a feature config is
/// resolved through the accessor methods.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontEndConfig {
    pub framing: Framing,
    pub n_fft: usize,
    pub mfcc: CepstralConfig,
    pub multitaper: MultitaperConfig,
    pub lpcc: CepstralConfig,
    pub plpcc: CepstralConfig,
    pub scfc: CepstralConfig,
    pub scmc: CepstralConfig,
    pub cqcc: CqccConfig,
    pub mgdf: MgdfConfig,
    pub apgdf: ApgdfConfig,
    pub cosphase: CosphaseConfig,
    pub cmpoc: CmpocConfig,
    pub mhec: MhecConfig,
    pub pncc: PnccConfig,
    pub pitch: PitchConfig,
    pub sad: SadConfig,
}

impl Default for FrontEndConfig {
    fn default() -> Self {
        Self {
            framing: Framing::default(),
            n_fft: 512,
            mfcc: CepstralConfig::default(),
            multitaper: MultitaperConfig::default(),
            lpcc: CepstralConfig::default(),
            plpcc: CepstralConfig::default(),
            scfc: CepstralConfig::default(),
            scmc: CepstralConfig::default(),
            cqcc: CqccConfig::default(),
            mgdf: MgdfConfig::default(),
            apgdf: ApgdfConfig::default(),
            cosphase: CosphaseConfig::default(),
            cmpoc: CmpocConfig::default(),
            mhec: MhecConfig::default(),
            pncc: PnccConfig::default(),
            pitch: PitchConfig::default(),
            sad: SadConfig::default(),
        }
    }
}

/// Every key accepted by [`FrontEndConfig::set`].
pub const CONFIG_KEYS: &[&str] = &[
    "frame.length_ms",
    "frame.shift_ms",
    "frame.pre_emphasis",
    "frame.n_fft",
    "mfcc.n_filters",
    "mfcc.n_ceps",
    "mfcc.f_lo",
    "mfcc.f_hi",
    "multitaper.n_tapers",
    "multitaper.weighting",
    "lpcc.lp_order",
    "lpcc.n_ceps",
    "plpcc.lp_order",
    "plpcc.n_filters",
    "plpcc.n_ceps",
    "plpcc.f_lo",
    "plpcc.f_hi",
    "scfc.n_filters",
    "scfc.f_lo",
    "scfc.f_hi",
    "scmc.n_filters",
    "scmc.n_ceps",
    "scmc.f_lo",
    "scmc.f_hi",
    "cqcc.bins_per_octave",
    "cqcc.n_octaves",
    "cqcc.n_uniform",
    "cqcc.n_ceps",
    "mgdf.alpha",
    "mgdf.gamma",
    "mgdf.lifter",
    "mgdf.n_ceps",
    "apgdf.lp_order",
    "apgdf.n_ceps",
    "cosphase.n_ceps",
    "cmpoc.bins_per_octave",
    "cmpoc.n_octaves",
    "cmpoc.n_ceps",
    "mhec.n_channels",
    "mhec.n_ceps",
    "mhec.f_lo",
    "mhec.f_hi",
    "mhec.lowpass_hz",
    "pncc.n_channels",
    "pncc.n_ceps",
    "pncc.f_lo",
    "pncc.f_hi",
    "pitch.min_hz",
    "pitch.max_hz",
    "pitch.octave_cost",
    "pitch.voicing_threshold",
    "sad.threshold",
    "sad.mean_scale",
];

fn parse<V: FromStr>(key: &str, value: &str) -> Result<V> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse '{value}' for key '{key}'")))
}

impl FrontEndConfig {
    /// Sets one parameter by its `section.key` name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        macro_rules! put {
            ($field:expr) => {
                $field = parse(key, value)?
            };
        }
        match key {
            "frame.length_ms" => put!(self.framing.frame_ms),
            "frame.shift_ms" => put!(self.framing.shift_ms),
            "frame.pre_emphasis" => put!(self.framing.pre_emphasis),
            "frame.n_fft" => put!(self.n_fft),
            "mfcc.n_filters" => put!(self.mfcc.n_filters),
            "mfcc.n_ceps" => put!(self.mfcc.n_ceps),
            "mfcc.f_lo" => put!(self.mfcc.f_lo_hz),
            "mfcc.f_hi" => self.mfcc.f_hi_hz = Some(parse(key, value)?),
            "multitaper.n_tapers" => put!(self.multitaper.n_tapers),
            "multitaper.weighting" => {
                self.multitaper.weighting = match value.trim() {
                    "swce" => TaperWeighting::Swce,
                    "uniform" => TaperWeighting::Uniform,
                    other => return Err(Error::Config(format!("unknown taper weighting '{other}'"))),
                }
            }
            "lpcc.lp_order" => put!(self.lpcc.lp_order),
            "lpcc.n_ceps" => put!(self.lpcc.n_ceps),
            "plpcc.lp_order" => put!(self.plpcc.lp_order),
            "plpcc.n_filters" => put!(self.plpcc.n_filters),
            "plpcc.n_ceps" => put!(self.plpcc.n_ceps),
            "plpcc.f_lo" => put!(self.plpcc.f_lo_hz),
            "plpcc.f_hi" => self.plpcc.f_hi_hz = Some(parse(key, value)?),
            "scfc.n_filters" => put!(self.scfc.n_filters),
            "scfc.f_lo" => put!(self.scfc.f_lo_hz),
            "scfc.f_hi" => self.scfc.f_hi_hz = Some(parse(key, value)?),
            "scmc.n_filters" => put!(self.scmc.n_filters),
            "scmc.n_ceps" => put!(self.scmc.n_ceps),
            "scmc.f_lo" => put!(self.scmc.f_lo_hz),
            "scmc.f_hi" => self.scmc.f_hi_hz = Some(parse(key, value)?),
            "cqcc.bins_per_octave" => put!(self.cqcc.bins_per_octave),
            "cqcc.n_octaves" => put!(self.cqcc.n_octaves),
            "cqcc.n_uniform" => put!(self.cqcc.n_uniform),
            "cqcc.n_ceps" => put!(self.cqcc.n_ceps),
            "mgdf.alpha" => put!(self.mgdf.alpha),
            "mgdf.gamma" => put!(self.mgdf.gamma),
            "mgdf.lifter" => put!(self.mgdf.lifter),
            "mgdf.n_ceps" => put!(self.mgdf.n_ceps),
            "apgdf.lp_order" => put!(self.apgdf.lp_order),
            "apgdf.n_ceps" => put!(self.apgdf.n_ceps),
            "cosphase.n_ceps" => put!(self.cosphase.n_ceps),
            "cmpoc.bins_per_octave" => put!(self.cmpoc.bins_per_octave),
            "cmpoc.n_octaves" => put!(self.cmpoc.n_octaves),
            "cmpoc.n_ceps" => put!(self.cmpoc.n_ceps),
            "mhec.n_channels" => put!(self.mhec.n_channels),
            "mhec.n_ceps" => put!(self.mhec.n_ceps),
            "mhec.f_lo" => put!(self.mhec.f_lo_hz),
            "mhec.f_hi" => self.mhec.f_hi_hz = Some(parse(key, value)?),
            "mhec.lowpass_hz" => put!(self.mhec.lowpass_hz),
            "pncc.n_channels" => put!(self.pncc.n_channels),
            "pncc.n_ceps" => put!(self.pncc.n_ceps),
            "pncc.f_lo" => put!(self.pncc.f_lo_hz),
            "pncc.f_hi" => self.pncc.f_hi_hz = Some(parse(key, value)?),
            "pitch.min_hz" => put!(self.pitch.min_hz),
            "pitch.max_hz" => put!(self.pitch.max_hz),
            "pitch.octave_cost" => put!(self.pitch.octave_cost),
            "pitch.voicing_threshold" => put!(self.pitch.voicing_threshold),
            "sad.threshold" => put!(self.sad.threshold),
            "sad.mean_scale" => put!(self.sad.mean_scale),
            _ => return Err(Error::Config(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines. `#` and `;` start comments; a
    /// `[section]` header prefixes the keys that follow it.
    pub fn apply_ini(&mut self, text: &str) -> Result<()> {
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            let k = k.trim();
            let key = if section.is_empty() || k.contains('.') {
                k.to_string()
            } else {
                format!("{section}.{k}")
            };
            self.set(&key, v).map_err(|e| Error::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn from_ini(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_ini(text)?;
        Ok(cfg)
    }

    fn framed(&self, mut c: CepstralConfig) -> CepstralConfig {
        c.framing = self.framing.clone();
        c.n_fft = self.n_fft;
        c
    }

    pub fn mfcc(&self) -> CepstralConfig {
        self.framed(self.mfcc.clone())
    }

    pub fn lpcc(&self) -> CepstralConfig {
        self.framed(self.lpcc.clone())
    }

    pub fn plpcc(&self) -> CepstralConfig {
        self.framed(self.plpcc.clone())
    }

    pub fn scfc(&self) -> CepstralConfig {
        self.framed(self.scfc.clone())
    }

    pub fn scmc(&self) -> CepstralConfig {
        self.framed(self.scmc.clone())
    }

    pub fn cqcc(&self) -> CqccConfig {
        CqccConfig {
            framing: self.framing.clone().without_pre_emphasis(),
            ..self.cqcc.clone()
        }
    }

    pub fn mgdf(&self) -> MgdfConfig {
        MgdfConfig {
            framing: self.framing.clone(),
            n_fft: self.n_fft,
            ..self.mgdf.clone()
        }
    }

    pub fn apgdf(&self) -> ApgdfConfig {
        ApgdfConfig {
            framing: self.framing.clone(),
            n_fft: self.n_fft,
            ..self.apgdf.clone()
        }
    }

    pub fn cosphase(&self) -> CosphaseConfig {
        CosphaseConfig {
            framing: self.framing.clone(),
            n_fft: self.n_fft,
            ..self.cosphase.clone()
        }
    }

    pub fn cmpoc(&self) -> CmpocConfig {
        CmpocConfig {
            framing: self.framing.clone().without_pre_emphasis(),
            ..self.cmpoc.clone()
        }
    }

    pub fn mhec(&self) -> MhecConfig {
        MhecConfig {
            framing: self.framing.clone(),
            ..self.mhec.clone()
        }
    }

    pub fn pncc(&self) -> PnccConfig {
        PnccConfig {
            framing: self.framing.clone(),
            n_fft: self.n_fft,
            ..self.pncc.clone()
        }
    }

    pub fn pitch(&self) -> PitchConfig {
        PitchConfig {
            frame_ms: self.framing.frame_ms,
            shift_ms: self.framing.shift_ms,
            ..self.pitch.clone()
        }
    }

    pub fn sad(&self) -> SadConfig {
        SadConfig {
            frame_ms: self.framing.frame_ms,
            shift_ms: self.framing.shift_ms,
            ..self.sad.clone()
        }
    }
}
