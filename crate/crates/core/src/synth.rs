//! Deterministic speech-like signals for demos, tests and the bundled
//! corpus: a jittered glottal pulse train, shaped by a cascade of formant
//! resonators, under a syllabic amplitude envelope.
//!
//! Nothing here claims to be realistic speech. The signals carry a
//! speaker-dependent pitch and spectral envelope, pauses that SAD can
//! drop, and per-utterance variation, which is what front-end tests need.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::signal::Waveform;

const SAMPLE_RATE_HZ: u32 = 16000;

#[derive(Debug, Clone, PartialEq)]
pub struct Voice {
    pub f0_hz: f64,
    /// `(centre, bandwidth)` pairs in Hz.
    pub formants_hz: Vec<(f64, f64)>,
    /// Aspiration noise level relative to the pulse excitation.
    pub breathiness: f64,
}

impl Voice {
    /// A reproducible family of distinct voices indexed by `speaker`.
    pub fn speaker(speaker: usize) -> Self {
        let s = speaker as f64;
        Self {
            f0_hz: 95.0 + 41.0 * ((speaker * 3) % 7) as f64,
            formants_hz: vec![
                (420.0 + 55.0 * ((speaker * 5) % 7) as f64, 80.0),
                (1150.0 + 170.0 * ((speaker * 3) % 8) as f64, 110.0),
                (2350.0 + 90.0 * ((speaker * 7) % 6) as f64, 150.0),
                (3400.0 + 40.0 * (s % 5.0), 200.0),
            ],
            breathiness: 0.02 + 0.01 * (speaker % 4) as f64,
        }
    }
}

/// Per-utterance draw of a voice: pitch, formants, speaking rate and the
/// excitation noise all vary with `seed`.
pub fn speech_like(voice: &Voice, duration_s: f64, seed: u64) -> Result<Waveform<f64>> {
    if !(duration_s > 0.0) || voice.f0_hz <= 0.0 {
        return Err(invalid("duration and f0 must be positive"));
    }
    let fs = SAMPLE_RATE_HZ as f64;
    let n = (duration_s * fs).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let f0 = voice.f0_hz * rng.gen_range(0.95..1.05);
    let syllable_hz = rng.gen_range(3.0..4.5);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let lead = (0.15 * fs) as usize;

    // Glottal pulses with 1% jitter and a slow intonation contour.
    let mut excitation = vec![0.0; n];
    let mut t = 0.0;
    while (t as usize) < n {
        let secs = t / fs;
        let contour = 1.0 + 0.08 * (std::f64::consts::TAU * 0.7 * secs + phase).sin();
        let period = fs / (f0 * contour) * (1.0 + 0.01 * rng.sample::<f64, _>(StandardNormal));
        excitation[t as usize] = 1.0;
        t += period.max(1.0);
    }
    for e in excitation.iter_mut() {
        *e += voice.breathiness * rng.sample::<f64, _>(StandardNormal);
    }

    // Glottal spectral tilt, then the vocal tract.
    let mut x = one_pole(&excitation, 0.9);
    for &(fc, bw) in &voice.formants_hz {
        let jitter = rng.gen_range(0.97..1.03);
        x = resonator(&x, fc * jitter, bw);
    }

    for (i, v) in x.iter_mut().enumerate() {
        let env = if i < lead || i + lead >= n {
            0.0
        } else {
            let s = (std::f64::consts::TAU * syllable_hz * i as f64 / fs + phase).sin();
            s.max(0.0).powf(0.6)
        };
        *v *= env;
    }
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if peak > 0.0 { 0.5 / peak } else { 0.0 };
    let floor_rms = 3e-4;
    let samples = x
        .into_iter()
        .map(|v| v * scale + floor_rms * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Waveform::new(samples, SAMPLE_RATE_HZ)
}

/// Zero-mean Gaussian noise with the given RMS.
pub fn white_noise(n: usize, rms: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rms * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// `clean` plus white noise scaled so the mean-power ratio is `snr_db`.
pub fn add_white_noise(clean: &Waveform<f64>, snr_db: f64, seed: u64) -> Result<Waveform<f64>> {
    let x = clean.samples();
    let power = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    let rms = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    let noise = white_noise(x.len(), rms, seed);
    Waveform::new(
        x.iter().zip(noise).map(|(a, b)| a + b).collect(),
        clean.sample_rate_hz(),
    )
}

fn one_pole(x: &[f64], a: f64) -> Vec<f64> {
    let mut y = 0.0;
    x.iter()
        .map(|&v| {
            y = v + a * y;
            y
        })
        .collect()
}

/// Two-pole resonance, input scaled by `1 - r`.
fn resonator(x: &[f64], fc: f64, bw: f64) -> Vec<f64> {
    let fs = SAMPLE_RATE_HZ as f64;
    let r = (-std::f64::consts::PI * bw / fs).exp();
    let c = 2.0 * r * (std::f64::consts::TAU * fc / fs).cos();
    let g = 1.0 - r;
    let (mut y1, mut y2) = (0.0, 0.0);
    x.iter()
        .map(|&v| {
            let y = g * v + c * y1 - r * r * y2;
            y2 = y1;
            y1 = y;
            y
        })
        .collect()
}
