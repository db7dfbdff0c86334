//! Signal generators shared by unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::signal::Waveform;

/// Box-Muller standard normal draw.
pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn white_noise(n: usize, amplitude: f64, seed: u64) -> Waveform<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Waveform::new((0..n).map(|_| amplitude * gaussian(&mut rng)).collect(), 16000).unwrap()
}

pub fn tone(hz: f64, n: usize) -> Waveform<f64> {
    let w = 2.0 * std::f64::consts::PI * hz / 16000.0;
    Waveform::new((0..n).map(|t| 0.5 * (w * t as f64).sin()).collect(), 16000).unwrap()
}

/// Five equal harmonics of `f0`, peak-normalized to 0.8.
pub fn harmonic_tone(f0: f64, n: usize) -> Waveform<f64> {
    let w = 2.0 * std::f64::consts::PI * f0 / 16000.0;
    let x: Vec<f64> = (0..n)
        .map(|t| (1..=5).map(|h| (h as f64 * w * t as f64).sin()).sum::<f64>())
        .collect();
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Waveform::new(x.into_iter().map(|v| 0.8 * v / peak).collect(), 16000).unwrap()
}

pub fn silence(n: usize) -> Waveform<f64> {
    Waveform::new(vec![0.0; n], 16000).unwrap()
}
