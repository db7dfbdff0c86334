//! File formats: PCM16 WAV input, the `fmx` binary feature format and CSV.
//!
//! `fmx` layout: magic `FMX1`, then little-endian `u32 n_frames`,
//! `u32 dim`, `u32 kind code`, `f32 frame_shift_ms`, followed by the
//! matrix in row-major `f32`.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{invalid, Error, Result};
use crate::features::{FeatureKind, FeatureMatrix};
use crate::scalar::Scalar;
use crate::signal::Waveform;

/// The only sample rate accepted from disk; inputs are never resampled.
pub const REQUIRED_SAMPLE_RATE_HZ: u32 = 16000;

const FMX_MAGIC: &[u8; 4] = b"FMX1";

/// Reads a mono 16-bit PCM WAV at 16 kHz, scaling samples to `[-1, 1)`.
pub fn read_wav<T: Scalar>(path: impl AsRef<Path>) -> Result<Waveform<T>> {
    let path = path.as_ref();
    let reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    let unsupported = |what: String| Error::UnsupportedAudio(format!("{}: {what}", path.display()));
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(unsupported(format!(
            "expected 16-bit PCM, found {}-bit {:?}",
            spec.bits_per_sample, spec.sample_format
        )));
    }
    if spec.channels != 1 {
        return Err(unsupported(format!("expected mono, found {} channels", spec.channels)));
    }
    if spec.sample_rate != REQUIRED_SAMPLE_RATE_HZ {
        return Err(unsupported(format!(
            "sample rate {} Hz is not {REQUIRED_SAMPLE_RATE_HZ} Hz (resampling is not performed)",
            spec.sample_rate
        )));
    }
    let scale = 1.0 / 32768.0;
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| T::lit(v as f64 * scale)))
        .collect::<std::result::Result<Vec<T>, _>>()?;
    Waveform::new(samples, spec.sample_rate).map_err(|e| unsupported(e.to_string()))
}

/// Writes a mono 16-bit PCM WAV, rounding and clipping to the PCM range.
pub fn write_wav<T: Scalar>(path: impl AsRef<Path>, w: &Waveform<T>) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: w.sample_rate_hz(),
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for &s in w.samples() {
        let v = (s.as_f64() * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(v)?;
    }
    writer.finalize()?;
    Ok(())
}

pub fn write_fmx<T: Scalar, W: Write>(mut out: W, f: &FeatureMatrix<T>) -> Result<()> {
    let header_u32 =
        |v: usize, what: &str| u32::try_from(v).map_err(|_| invalid(format!("{what} {v} does not fit the fmx header")));
    out.write_all(FMX_MAGIC)?;
    out.write_all(&header_u32(f.n_frames(), "frame count")?.to_le_bytes())?;
    out.write_all(&header_u32(f.dim(), "dimension")?.to_le_bytes())?;
    out.write_all(&f.kind.code().to_le_bytes())?;
    out.write_all(&(f.frame_shift_ms as f32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(4 * f.values.len());
    for &v in f.values.iter() {
        buf.extend_from_slice(&(v.as_f64() as f32).to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

/// Reads an fmx stream. Values are stored as `f32`, so an `f32` matrix
/// round-trips bit-exactly.
pub fn read_fmx<T: Scalar, R: Read>(mut input: R) -> Result<FeatureMatrix<T>> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != FMX_MAGIC {
        return Err(invalid("not an fmx stream (bad magic)"));
    }
    let n_frames = read_u32(&mut input)? as usize;
    let dim = read_u32(&mut input)? as usize;
    let code = read_u32(&mut input)?;
    let kind = FeatureKind::from_code(code).ok_or_else(|| invalid(format!("unknown fmx kind code {code}")))?;
    let shift = f32::from_le_bytes(read_u32(&mut input)?.to_le_bytes());
    let mut raw = vec![0u8; 4 * n_frames * dim];
    input.read_exact(&mut raw)?;
    let data: Vec<T> = raw
        .chunks_exact(4)
        .map(|c| T::lit(f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64))
        .collect();
    let values = Array2::from_shape_vec((n_frames, dim), data).expect("length checked by read_exact");
    Ok(FeatureMatrix::new(values, kind, shift as f64))
}

/// One row per line, comma-separated, 9 significant digits, no header.
pub fn write_csv<T: Scalar, W: Write>(mut out: W, f: &FeatureMatrix<T>) -> Result<()> {
    let mut line = String::new();
    for row in f.values.rows() {
        line.clear();
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format!("{:.8e}", v.as_f64()));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Parses CSV written by [`write_csv`]. The file carries no metadata, so
/// the caller supplies the kind and frame shift.
pub fn read_csv<T: Scalar, R: Read>(input: R, kind: FeatureKind, frame_shift_ms: f64) -> Result<FeatureMatrix<T>> {
    let mut data = Vec::new();
    let mut dim = None;
    let mut rows = 0;
    for (n, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse { line: n + 1, message };
        let before = data.len();
        for field in line.split(',') {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| bad(format!("invalid number '{field}'")))?;
            data.push(T::lit(v));
        }
        let width = data.len() - before;
        match dim {
            None => dim = Some(width),
            Some(d) if d != width => return Err(bad(format!("expected {d} columns, found {width}"))),
            _ => {}
        }
        rows += 1;
    }
    let values = Array2::from_shape_vec((rows, dim.unwrap_or(0)), data).expect("rectangular by construction");
    Ok(FeatureMatrix::new(values, kind, frame_shift_ms))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FeatureFormat {
    #[default]
    Fmx,
    Csv,
}

impl FeatureFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Fmx => "fmx",
            Self::Csv => "csv",
        }
    }
}

impl fmt::Display for FeatureFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for FeatureFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fmx" => Ok(Self::Fmx),
            "csv" => Ok(Self::Csv),
            _ => Err(invalid(format!("unknown feature format '{s}' (expected fmx or csv)"))),
        }
    }
}

pub fn save_features<T: Scalar>(path: impl AsRef<Path>, f: &FeatureMatrix<T>, format: FeatureFormat) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        FeatureFormat::Fmx => write_fmx(&mut out, f)?,
        FeatureFormat::Csv => write_csv(&mut out, f)?,
    }
    out.flush()?;
    Ok(())
}

/// Loads an fmx file. CSV files need [`read_csv`] since they carry no kind.
pub fn load_fmx<T: Scalar>(path: impl AsRef<Path>) -> Result<FeatureMatrix<T>> {
    read_fmx(BufReader::new(File::open(path)?))
}
