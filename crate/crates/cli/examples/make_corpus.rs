//! Regenerates the bundled synthetic corpus: four voices, three 1.5 s
//! utterances each, plus a trial list pairing every two utterances.
//!
//! ```text
//! cargo run -p spkfeat-cli --example make_corpus -- corpus
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use spkfeat::io::write_wav;
use spkfeat::synth::{speech_like, Voice};

const SPEAKERS: usize = 4;
const UTTERANCES: usize = 3;

fn main() -> Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "corpus".into()));
    std::fs::create_dir_all(&dir)?;
    let mut names = Vec::new();
    for s in 0..SPEAKERS {
        let voice = Voice::speaker(s);
        for u in 0..UTTERANCES {
            let name = format!("spk{s}_utt{u}");
            let w = speech_like(&voice, 1.5, (100 * s + u) as u64)?;
            write_wav(dir.join(format!("{name}.wav")), &w)?;
            names.push((s, name));
        }
    }
    let mut trials = String::from("# enroll test label\n");
    for (i, (si, a)) in names.iter().enumerate() {
        for (sj, b) in &names[i + 1..] {
            let label = if si == sj { "target" } else { "nontarget" };
            writeln!(trials, "{a} {b} {label}")?;
        }
    }
    std::fs::write(dir.join("trials.txt"), trials)?;
    println!("wrote {} utterances to {}", names.len(), dir.display());
    Ok(())
}
