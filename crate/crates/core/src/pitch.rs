//! NCCF pitch tracker producing the three-dimensional pitch vector
//! (probability of voicing, log pitch, delta log pitch) appended to MFCCs.
//!
//! Each frame picks the lag with the highest normalized cross-correlation
//! after a small per-octave penalty that favours the shorter lag among
//! near-equal peaks, refines it by parabolic interpolation and smooths the
//! contour with a 5-point median. Frames below the voicing threshold take
//! a pitch interpolated from their voiced neighbours so the contour stays
//! continuous.

use crate::error::{invalid, Error, Result};
use crate::postproc::delta_series;
use crate::scalar::Scalar;
use crate::signal::framing::{frame_count, frame_geometry};
use crate::signal::Waveform;

/// Added to the energy product in the NCCF denominator, on the scale of
/// the frame normalized to unit peak. Scaling `eps` with the frame keeps
/// the NCCF scale-free even in near-silent frames, where a fixed `eps`
/// would be comparable to the energies themselves.
pub const NCCF_EPS: f64 = 1e-10;

/// NCCF values are rounded to this grid. A gain change perturbs the
/// correlation sums in their last bits only; rounding far above that level
/// makes the whole track bit-identical under gain, short of a value landing
/// within roundoff of a grid point.
pub const NCCF_QUANTUM: f64 = 1.0 / (1u64 << 24) as f64;

#[derive(Debug, Clone, PartialEq)]
pub struct PitchConfig {
    pub frame_ms: f64,
    pub shift_ms: f64,
    pub min_hz: f64,
    pub max_hz: f64,
    /// Score penalty per octave of lag above the shortest lag.
    pub octave_cost: f64,
    /// Frames whose peak NCCF falls below this count as unvoiced.
    pub voicing_threshold: f64,
    /// Width of the median smoother (odd).
    pub median_width: usize,
    /// Half-width of the delta regression.
    pub delta_window: usize,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            frame_ms: 25.0,
            shift_ms: 10.0,
            min_hz: 50.0,
            max_hz: 400.0,
            octave_cost: 0.01,
            voicing_threshold: 0.3,
            median_width: 5,
            delta_window: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PitchTrack<T> {
    /// Probability of voicing in `[0, 1]`.
    pub pov: Vec<T>,
    /// Natural log of the pitch in Hz.
    pub log_pitch: Vec<T>,
    pub delta_pitch: Vec<T>,
}

impl<T> PitchTrack<T> {
    pub fn n_frames(&self) -> usize {
        self.pov.len()
    }
}

fn quantize(v: f64) -> f64 {
    (v / NCCF_QUANTUM).round() * NCCF_QUANTUM
}

/// NCCF over the first `n_terms` samples:
/// `sum x[n] x[n+l] / sqrt(sum x[n]^2 sum x[n+l]^2 + eps peak^4)`, which is
/// the plain `eps` form evaluated on `x / peak`.
fn nccf_terms<T: Scalar>(x: &[T], n_terms: usize, lag: usize) -> f64 {
    let (mut num, mut e1, mut e2, mut peak) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in x[..n_terms].iter().zip(&x[lag..lag + n_terms]) {
        let (a, b) = (a.as_f64(), b.as_f64());
        num += a * b;
        e1 += a * a;
        e2 += b * b;
        peak = peak.max(a.abs()).max(b.abs());
    }
    let p2 = peak * peak;
    quantize(num / (e1 * e2 + NCCF_EPS * p2 * p2).sqrt())
}

/// Normalized cross-correlation of `frame` with itself at `lag`, summed over
/// the `len - lag` overlapping samples.
pub fn nccf<T: Scalar>(frame: &[T], lag: usize) -> Result<T> {
    if lag >= frame.len() {
        return Err(invalid(format!(
            "lag {lag} must be shorter than the {}-sample frame",
            frame.len()
        )));
    }
    Ok(T::lit(nccf_terms(frame, frame.len() - lag, lag)))
}

struct Peak {
    period: f64,
    strength: f64,
}

fn best_lag<T: Scalar>(
    seg: &[T],
    len: usize,
    lags: std::ops::RangeInclusive<usize>,
    octave_cost: f64,
    r: &mut Vec<f64>,
) -> Peak {
    let min_lag = *lags.start();
    r.clear();
    for lag in lags.clone() {
        let n_terms = len.min(seg.len().saturating_sub(lag));
        r.push(if n_terms == 0 {
            0.0
        } else {
            nccf_terms(seg, n_terms, lag)
        });
    }
    // Candidates are local maxima refined by a parabola through the peak
    // and its neighbours, so a period falling between integer lags is not
    // outscored by its better-aligned multiple.
    let mut best = Peak {
        period: min_lag as f64,
        strength: f64::NEG_INFINITY,
    };
    let mut best_score = f64::NEG_INFINITY;
    for i in 0..r.len() {
        let left = if i > 0 { r[i - 1] } else { f64::NEG_INFINITY };
        let right = r.get(i + 1).copied().unwrap_or(f64::NEG_INFINITY);
        if r[i] < left || r[i] < right {
            continue;
        }
        let (mut offset, mut value) = (0.0, r[i]);
        if i > 0 && i + 1 < r.len() {
            let curv = left - 2.0 * r[i] + right;
            if curv < 0.0 {
                offset = (0.5 * (left - right) / curv).clamp(-0.5, 0.5);
                value = r[i] - 0.25 * (left - right) * offset;
            }
        }
        let period = (min_lag + i) as f64 + offset;
        let score = value - octave_cost * (period / min_lag as f64).log2();
        if score > best_score {
            best_score = score;
            best = Peak {
                period,
                strength: value,
            };
        }
    }
    best
}

/// Linear interpolation of `values` across frames where `voiced` is false;
/// leading and trailing gaps copy the nearest voiced value.
fn fill_unvoiced(values: &mut [f64], voiced: &[bool], fallback: f64) {
    let anchors: Vec<usize> = (0..values.len()).filter(|&i| voiced[i]).collect();
    if anchors.is_empty() {
        values.fill(fallback);
        return;
    }
    let (first, last) = (anchors[0], *anchors.last().expect("non-empty"));
    let (vf, vl) = (values[first], values[last]);
    values[..first].fill(vf);
    values[last + 1..].fill(vl);
    for pair in anchors.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        for i in a + 1..b {
            let t = (i - a) as f64 / (b - a) as f64;
            values[i] = values[a] + t * (values[b] - values[a]);
        }
    }
}

/// Running median with the window shrunk symmetrically at the edges.
fn median_filter(x: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    let mut buf = Vec::with_capacity(width);
    (0..x.len())
        .map(|i| {
            let reach = half.min(i).min(x.len() - 1 - i);
            buf.clear();
            buf.extend_from_slice(&x[i - reach..=i + reach]);
            buf.sort_by(f64::total_cmp);
            buf[buf.len() / 2]
        })
        .collect()
}

/// Frame-synchronous pitch track of the raw waveform; frame count matches
/// the spectral extractors for the same frame length and shift.
pub fn extract_pitch<T: Scalar>(w: &Waveform<T>, cfg: &PitchConfig) -> Result<PitchTrack<T>> {
    if !(cfg.min_hz > 0.0 && cfg.min_hz < cfg.max_hz) {
        return Err(invalid(format!(
            "pitch range must satisfy 0 < min < max (got {}..{})",
            cfg.min_hz, cfg.max_hz
        )));
    }
    if cfg.median_width == 0 || cfg.median_width.is_multiple_of(2) {
        return Err(invalid("median width must be odd"));
    }
    let fs = w.sample_rate_hz() as f64;
    let (len, shift) = frame_geometry(w.sample_rate_hz(), cfg.frame_ms, cfg.shift_ms)?;
    let n_frames = frame_count(w.len(), len, shift);
    if n_frames == 0 {
        return Err(Error::EmptyInput(format!(
            "{} samples is shorter than one {len}-sample frame",
            w.len()
        )));
    }
    let min_lag = ((fs / cfg.max_hz).floor() as usize).max(1);
    let max_lag = (fs / cfg.min_hz).ceil() as usize;
    if min_lag >= len {
        return Err(invalid("pitch lag range does not fit in the frame"));
    }
    let x = w.samples();
    let mut r = Vec::with_capacity(max_lag - min_lag + 1);
    let mut pov = Vec::with_capacity(n_frames);
    let mut pitch = Vec::with_capacity(n_frames);
    let mut voiced = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let start = i * shift;
        let seg = &x[start..(start + len + max_lag).min(x.len())];
        let peak = best_lag(seg, len, min_lag..=max_lag, cfg.octave_cost, &mut r);
        pov.push(peak.strength.clamp(0.0, 1.0));
        pitch.push(fs / peak.period);
        voiced.push(peak.strength >= cfg.voicing_threshold);
    }
    fill_unvoiced(&mut pitch, &voiced, (cfg.min_hz * cfg.max_hz).sqrt());
    let log_pitch: Vec<T> = median_filter(&pitch, cfg.median_width)
        .into_iter()
        .map(|p| T::lit(p.ln()))
        .collect();
    let delta_pitch = delta_series(&log_pitch, cfg.delta_window);
    Ok(PitchTrack {
        pov: pov.into_iter().map(T::lit).collect(),
        log_pitch,
        delta_pitch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{harmonic_tone, tone, white_noise};

    fn median(v: &[f64]) -> f64 {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        s[s.len() / 2]
    }

    #[test]
    fn nccf_at_period_and_half_period() {
        // 200 Hz at 16 kHz: period 80 samples.
        let w = tone(200.0, 400);
        assert!((nccf(w.samples(), 80).unwrap() - 1.0).abs() < 1e-3);
        assert!((nccf(w.samples(), 40).unwrap() + 1.0).abs() < 1e-3);
    }

    #[test]
    fn nccf_matches_direct_summation_on_noise() {
        let w = white_noise(400, 1.0, 51);
        let x = w.samples();
        for lag in [1usize, 37, 150, 399] {
            let n = x.len() - lag;
            let num: f64 = (0..n).map(|i| x[i] * x[i + lag]).sum();
            let e1: f64 = (0..n).map(|i| x[i] * x[i]).sum();
            let e2: f64 = (0..n).map(|i| x[i + lag] * x[i + lag]).sum();
            let peak = x[..n].iter().chain(&x[lag..]).fold(0.0f64, |m, v| m.max(v.abs()));
            let want = num / (e1 * e2 + 1e-10 * peak.powi(4)).sqrt();
            let got = nccf(x, lag).unwrap();
            assert!((got - want).abs() <= NCCF_QUANTUM);
            if lag < 200 {
                assert!(got.abs() < 0.25);
            }
        }
        assert!(nccf(x, 400).is_err());
    }

    #[test]
    fn harmonic_tones_are_tracked() {
        let cfg = PitchConfig::default();
        let mut medians = Vec::new();
        for f0 in [120.0, 220.0, 330.0] {
            let track = extract_pitch(&harmonic_tone(f0, 16000), &cfg).unwrap();
            let hz: Vec<f64> = track.log_pitch.iter().map(|l| l.exp()).collect();
            let m = median(&hz);
            assert!((m - f0).abs() < 0.02 * f0, "{f0}: {m}");
            // Interior of a constant tone is constant after smoothing.
            let interior = &track.log_pitch[5..track.n_frames() - 5];
            assert!(interior.iter().all(|&v| (v - interior[0]).abs() < 1e-3));
            assert!(track.pov.iter().all(|&p| (0.0..=1.0).contains(&p)));
            medians.push(median(&track.log_pitch));
        }
        assert!(medians[0] < medians[1] && medians[1] < medians[2]);
    }

    #[test]
    fn noise_is_mostly_unvoiced() {
        let track = extract_pitch(&white_noise(16000, 0.3, 52), &PitchConfig::default()).unwrap();
        let mean = track.pov.iter().sum::<f64>() / track.n_frames() as f64;
        assert!(mean < 0.5, "{mean}");
        assert!(track.log_pitch.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn gain_leaves_track_bit_identical() {
        let w = harmonic_tone(180.0, 8000);
        let cfg = PitchConfig::default();
        let base = extract_pitch(&w, &cfg).unwrap();
        for g in [10.0, 0.1, 8.0] {
            assert_eq!(extract_pitch(&w.scaled(g), &cfg).unwrap(), base, "gain {g}");
        }
        // Near-silent noise, where a fixed eps would dominate the energies.
        let quiet = white_noise(4000, 1e-4, 9);
        let loud = quiet.scaled(10.0);
        for lag in 40..320 {
            let (a, b) = (
                nccf(&quiet.samples()[..800], lag).unwrap(),
                nccf(&loud.samples()[..800], lag).unwrap(),
            );
            assert_eq!(a.to_bits(), b.to_bits(), "lag {lag}");
        }
        assert_eq!(
            extract_pitch(&quiet, &cfg).unwrap(),
            extract_pitch(&loud, &cfg).unwrap()
        );
    }

    #[test]
    fn unvoiced_gaps_are_interpolated() {
        let mut v = vec![0.0, 100.0, 0.0, 0.0, 130.0, 0.0];
        fill_unvoiced(&mut v, &[false, true, false, false, true, false], 1.0);
        assert_eq!(v, vec![100.0, 100.0, 110.0, 120.0, 130.0, 130.0]);
    }

    #[test]
    fn median_shrinks_at_edges() {
        assert_eq!(
            median_filter(&[5.0, 1.0, 9.0, 2.0, 7.0, 3.0], 5),
            vec![5.0, 5.0, 5.0, 3.0, 3.0, 3.0]
        );
    }

    #[test]
    fn too_short_input() {
        let w = Waveform::new(vec![0.1f64; 300], 16000).unwrap();
        assert!(matches!(
            extract_pitch(&w, &PitchConfig::default()),
            Err(Error::EmptyInput(_))
        ));
    }
}
