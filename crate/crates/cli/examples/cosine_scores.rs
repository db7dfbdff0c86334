//! Toy back end for the bundled corpus: scores each trial by the cosine
//! similarity of the two utterances' mean feature vectors (c0 dropped).
//!
//! ```text
//! cosine_scores <trials.txt> <feature-dir> <suffix, e.g. mfcc.fmx> <out.scores>
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use spkfeat::io::load_fmx;
use spkfeat::metrics::write_scores;
use spkfeat::{FeatureMatrix64, Label, Trial, TrialScores};

fn mean_vector(path: &Path) -> Result<Vec<f64>> {
    let f: FeatureMatrix64 = load_fmx(path).with_context(|| format!("loading {}", path.display()))?;
    if f.n_frames() == 0 {
        bail!("{} has no frames", path.display());
    }
    let n = f.n_frames() as f64;
    Ok((1..f.dim()).map(|j| f.values.column(j).sum() / n).collect())
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (norm(a) * norm(b)).max(1e-30)
}

fn main() -> Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [trials, dir, suffix, out] = args.as_slice() else {
        bail!("usage: cosine_scores <trials.txt> <feature-dir> <suffix> <out.scores>");
    };
    let mut scored = Vec::new();
    for (n, line) in std::fs::read_to_string(trials)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let [a, b, label] = line.split_whitespace().collect::<Vec<_>>()[..] else {
            bail!("{trials}:{}: expected '<enroll> <test> <label>'", n + 1);
        };
        let va = mean_vector(&Path::new(dir).join(format!("{a}.{suffix}")))?;
        let vb = mean_vector(&Path::new(dir).join(format!("{b}.{suffix}")))?;
        scored.push(Trial {
            id: format!("{a}:{b}"),
            label: label.parse::<Label>()?,
            score: cosine(&va, &vb),
        });
    }
    write_scores(out, &TrialScores::new(scored))?;
    Ok(())
}
