//! `spkfeat`: feature extraction, SAD, mean normalization and scoring
//! tools over the `spkfeat` library.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use spkfeat::io::{load_fmx, read_wav, save_features, FeatureFormat};
use spkfeat::metrics::{eer_from_curve, format_scores, read_scores};
use spkfeat::postproc::apply_mask;
use spkfeat::{
    cmn, deltas, det_points, extract, fuse_scores, min_dcf, sad_mask, DcfParams, FeatureKind, FeatureMatrix64,
    FrontEndConfig, TrialScores, Waveform64,
};

#[derive(Parser)]
#[command(name = "spkfeat", version, about = "Speaker-verification front ends and scoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract one feature kind from 16 kHz PCM16 mono WAV files.
    Extract(ExtractArgs),
    /// Write the energy SAD decision (one 0/1 per frame) for WAV files.
    Vad(VadArgs),
    /// Mean-normalize fmx feature files.
    Cmn(CmnArgs),
    /// Report EER and minDCF for score files.
    Eval(EvalArgs),
    /// Equal-weight fusion of score files.
    Fuse(FuseArgs),
    /// DET operating points of a score file as CSV.
    Det(DetArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// INI-style `key = value` configuration file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<FrontEndConfig> {
        let mut cfg = FrontEndConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            cfg.apply_ini(&text).with_context(|| format!("in {}", path.display()))?;
        }
        for kv in &self.overrides {
            let Some((k, v)) = kv.split_once('=') else {
                bail!("--set expects KEY=VALUE, got '{kv}'");
            };
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(required = true, value_name = "WAV")]
    inputs: Vec<PathBuf>,
    #[arg(short, long, default_value = "mfcc")]
    feature: FeatureKind,
    #[arg(long, default_value = "fmx")]
    format: FeatureFormat,
    #[command(flatten)]
    config: ConfigArgs,
    /// Drop frames rejected by the energy SAD.
    #[arg(long)]
    sad: bool,
    /// Subtract the per-utterance mean (pitch columns are left alone).
    #[arg(long)]
    cmn: bool,
    /// Append delta (1) or delta and delta-delta (2) coefficients.
    #[arg(long, value_name = "ORDER")]
    deltas: Option<usize>,
    /// Output directory; defaults to each input's directory.
    #[arg(short, long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VadArgs {
    #[arg(required = true, value_name = "WAV")]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(short, long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct CmnArgs {
    #[arg(required = true, value_name = "FMX")]
    inputs: Vec<PathBuf>,
    /// Columns to leave untouched; defaults to those recorded for the kind.
    #[arg(long, value_delimiter = ',', value_name = "COLS")]
    exempt: Option<Vec<usize>>,
    #[arg(short, long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct DcfArgs {
    #[arg(long, default_value_t = 0.001)]
    p_target: f64,
    #[arg(long, default_value_t = 1.0)]
    c_miss: f64,
    #[arg(long, default_value_t = 1.0)]
    c_fa: f64,
}

impl DcfArgs {
    fn params(&self) -> DcfParams {
        DcfParams {
            p_target: self.p_target,
            c_miss: self.c_miss,
            c_fa: self.c_fa,
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(required = true, value_name = "SCORES")]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    dcf: DcfArgs,
    /// Also report the equal-weight fusion of all systems.
    #[arg(long)]
    fuse: bool,
    /// Write DET points of the fused system (or of the only system).
    #[arg(long, value_name = "CSV")]
    det: Option<PathBuf>,
}

#[derive(Args)]
struct FuseArgs {
    #[arg(required = true, value_name = "SCORES")]
    inputs: Vec<PathBuf>,
    /// Output score file; stdout when absent.
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetArgs {
    #[arg(value_name = "SCORES")]
    input: PathBuf,
    /// Output CSV; stdout when absent.
    #[arg(short, long, value_name = "CSV")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Extract(a) => cmd_extract(&a),
        Command::Vad(a) => cmd_vad(&a),
        Command::Cmn(a) => cmd_cmn(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Fuse(a) => cmd_fuse(&a),
        Command::Det(a) => cmd_det(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Runs `job` on every input, reporting failures as they happen, and fails
/// overall if any input failed.
fn for_each_input(inputs: &[PathBuf], mut job: impl FnMut(&Path) -> Result<()>) -> Result<()> {
    let mut failed = 0;
    for path in inputs {
        if let Err(e) = job(path) {
            eprintln!("error: {}: {e:#}", path.display());
            failed += 1;
        }
    }
    if failed > 0 {
        bail!("{failed} of {} inputs failed", inputs.len());
    }
    Ok(())
}

fn output_path(input: &Path, out_dir: Option<&Path>, suffix: &str) -> Result<PathBuf> {
    let stem = input
        .file_stem()
        .with_context(|| format!("{} has no file name", input.display()))?
        .to_string_lossy();
    let dir = match out_dir {
        Some(d) => d.to_path_buf(),
        None => input.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    Ok(dir.join(format!("{stem}.{suffix}")))
}

fn ensure_dir(dir: Option<&Path>) -> Result<()> {
    if let Some(d) = dir {
        fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    Ok(())
}

fn cmd_extract(a: &ExtractArgs) -> Result<()> {
    let cfg = a.config.load()?;
    if let Some(order) = a.deltas {
        if !(1..=2).contains(&order) {
            bail!("--deltas must be 1 or 2");
        }
    }
    let out_dir = a.out_dir.as_deref();
    ensure_dir(out_dir)?;
    let suffix = format!("{}.{}", a.feature.name(), a.format.extension());
    for_each_input(&a.inputs, |path| {
        let w: Waveform64 = read_wav(path)?;
        let mut f = extract(a.feature, &w, &cfg)?.with_source(path.display().to_string());
        if a.sad {
            f = apply_mask(&f, &sad_mask(&w, &cfg.sad())?)?;
        }
        if a.cmn {
            f = cmn(&f, &f.cmn_exempt.clone())?;
        }
        if let Some(order) = a.deltas {
            f = deltas(&f, order)?;
        }
        save_features(output_path(path, out_dir, &suffix)?, &f, a.format)?;
        Ok(())
    })
}

fn cmd_vad(a: &VadArgs) -> Result<()> {
    let sad = a.config.load()?.sad();
    let out_dir = a.out_dir.as_deref();
    ensure_dir(out_dir)?;
    for_each_input(&a.inputs, |path| {
        let w: Waveform64 = read_wav(path)?;
        let mask = sad_mask(&w, &sad)?;
        let mut text = String::with_capacity(2 * mask.len());
        for &keep in &mask.keep {
            text.push_str(if keep { "1\n" } else { "0\n" });
        }
        fs::write(output_path(path, out_dir, "vad")?, text)?;
        println!("{}: kept {} of {} frames", path.display(), mask.n_kept(), mask.len());
        Ok(())
    })
}

fn cmd_cmn(a: &CmnArgs) -> Result<()> {
    let out_dir = a.out_dir.as_deref();
    ensure_dir(out_dir)?;
    for_each_input(&a.inputs, |path| {
        let f: FeatureMatrix64 = load_fmx(path)?;
        let exempt = a.exempt.clone().unwrap_or_else(|| f.cmn_exempt.clone());
        let normalized = cmn(&f, &exempt)?;
        save_features(output_path(path, out_dir, "cmn.fmx")?, &normalized, FeatureFormat::Fmx)?;
        Ok(())
    })
}

fn system_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load_systems(paths: &[PathBuf]) -> Result<Vec<TrialScores>> {
    paths
        .iter()
        .map(|p| read_scores(p).with_context(|| format!("reading {}", p.display())))
        .collect()
}

fn report_line(name: &str, t: &TrialScores, dcf: &DcfParams) -> Result<String> {
    let curve = det_points(t)?;
    let eer = eer_from_curve(&curve);
    let cost = min_dcf(t, dcf)?;
    Ok(format!("{name}\tEER {:.2}% minDCF {:.4}", 100.0 * eer, cost))
}

fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let dcf = a.dcf.params();
    let systems = load_systems(&a.inputs)?;
    for (path, t) in a.inputs.iter().zip(&systems) {
        println!("{}", report_line(&system_name(path), t, &dcf)?);
    }
    let fused = if a.fuse {
        let f = fuse_scores(&systems)?;
        println!("{}", report_line("fused", &f, &dcf)?);
        Some(f)
    } else {
        None
    };
    if let Some(det_path) = &a.det {
        let t = match (&fused, systems.as_slice()) {
            (Some(f), _) => f,
            (None, [only]) => only,
            _ => bail!("--det needs a single score file or --fuse"),
        };
        write_det(t, fs::File::create(det_path)?)?;
    }
    Ok(())
}

fn cmd_fuse(a: &FuseArgs) -> Result<()> {
    let fused = fuse_scores(&load_systems(&a.inputs)?)?;
    let text = format_scores(&fused);
    match &a.out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_det(a: &DetArgs) -> Result<()> {
    let t = read_scores(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    match &a.out {
        Some(p) => write_det(&t, fs::File::create(p)?),
        None => write_det(&t, io::stdout().lock()),
    }
}

fn write_det(t: &TrialScores, out: impl Write) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "p_fa,p_miss,threshold")?;
    for p in det_points(t)?.points {
        writeln!(out, "{},{},{}", p.p_fa, p.p_miss, p.threshold)?;
    }
    out.flush()?;
    Ok(())
}
