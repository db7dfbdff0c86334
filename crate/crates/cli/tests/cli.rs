use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spkfeat::io::{load_fmx, read_csv, read_wav, write_wav};
use spkfeat::synth::{speech_like, Voice};
use spkfeat::{extract, FeatureKind, FeatureMatrix64, FrontEndConfig, Waveform64};
use tempfile::TempDir;

fn spkfeat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spkfeat"))
        .args(args)
        .output()
        .expect("spawn spkfeat")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn utterance(dir: &Path, name: &str, seed: u64) -> PathBuf {
    let path = dir.join(format!("{name}.wav"));
    write_wav(&path, &speech_like(&Voice::speaker(1), 1.0, seed).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn extract_mfcc_writes_thirty_columns() {
    let tmp = TempDir::new().unwrap();
    let wav = utterance(tmp.path(), "a", 1);
    let o = spkfeat(&["extract", "--feature", "mfcc", s(&wav)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let f: FeatureMatrix64 = load_fmx(tmp.path().join("a.mfcc.fmx")).unwrap();
    assert_eq!((f.dim(), f.kind), (30, FeatureKind::Mfcc));

    // The file holds the library's output rounded to f32.
    let w: Waveform64 = read_wav(&wav).unwrap();
    let direct = extract(FeatureKind::Mfcc, &w, &FrontEndConfig::default()).unwrap();
    assert_eq!(f.values.dim(), direct.values.dim());
    for (a, b) in f.values.iter().zip(direct.values.iter()) {
        assert_eq!(*a, *b as f32 as f64);
    }
}

#[test]
fn extract_cqcc_csv_has_sixty_columns() {
    let tmp = TempDir::new().unwrap();
    let wav = utterance(tmp.path(), "a", 2);
    let out = tmp.path().join("feats");
    let o = spkfeat(&[
        "extract",
        "--feature",
        "cqcc",
        "--format",
        "csv",
        "-o",
        s(&out),
        s(&wav),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read(out.join("a.cqcc.csv")).unwrap();
    let f: FeatureMatrix64 = read_csv(&text[..], FeatureKind::Cqcc, 10.0).unwrap();
    assert_eq!(f.dim(), 60);
    assert_eq!(f.n_frames(), 98);
}

#[test]
fn eight_khz_input_is_refused_without_output() {
    let tmp = TempDir::new().unwrap();
    let wav = tmp.path().join("narrow.wav");
    write_wav(&wav, &Waveform64::new(vec![0.1; 8000], 8000).unwrap()).unwrap();
    let o = spkfeat(&["extract", "--feature", "mfcc", s(&wav)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("narrow.wav"), "{}", stderr(&o));
    assert!(!tmp.path().join("narrow.mfcc.fmx").exists());

    // A good file next to a bad one is still processed, but the run fails.
    let good = utterance(tmp.path(), "good", 3);
    let o = spkfeat(&["extract", s(&wav), s(&good)]);
    assert!(!o.status.success());
    assert!(tmp.path().join("good.mfcc.fmx").exists());
    assert!(!tmp.path().join("narrow.mfcc.fmx").exists());
}

#[test]
fn configuration_keys_are_checked() {
    let tmp = TempDir::new().unwrap();
    let wav = utterance(tmp.path(), "a", 4);
    let o = spkfeat(&["extract", "--set", "mfcc.bogus=3", s(&wav)]);
    assert!(!o.status.success());
    assert!(!tmp.path().join("a.mfcc.fmx").exists());

    let cfg = tmp.path().join("front.ini");
    fs::write(&cfg, "[mfcc]\nn_ceps = 20 # fewer\n").unwrap();
    let o = spkfeat(&["extract", "--config", s(&cfg), s(&wav)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let f: FeatureMatrix64 = load_fmx(tmp.path().join("a.mfcc.fmx")).unwrap();
    assert_eq!(f.dim(), 20);
}

#[test]
fn sad_cmn_and_deltas() {
    let tmp = TempDir::new().unwrap();
    let wav = utterance(tmp.path(), "a", 5);
    let o = spkfeat(&[
        "extract",
        "--feature",
        "mfcc-pitch",
        "--sad",
        "--cmn",
        "--deltas",
        "2",
        s(&wav),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let f: FeatureMatrix64 = load_fmx(tmp.path().join("a.mfcc-pitch.fmx")).unwrap();
    assert_eq!(f.dim(), 99);
    assert!(f.n_frames() < 98 && f.n_frames() > 20, "{} frames kept", f.n_frames());
    let mean = |j: usize| f.values.column(j).sum() / f.n_frames() as f64;
    assert!(mean(5).abs() < 1e-4);

    let o = spkfeat(&["vad", s(&wav)]);
    assert!(o.status.success());
    let mask = fs::read_to_string(tmp.path().join("a.vad")).unwrap();
    let kept = mask.lines().filter(|l| *l == "1").count();
    assert_eq!(mask.lines().count(), 98);
    assert_eq!(kept, f.n_frames());
    assert!(stdout(&o).contains(&format!("kept {kept} of 98")));
}

#[test]
fn cmn_subcommand_zeroes_column_means() {
    let tmp = TempDir::new().unwrap();
    let wav = utterance(tmp.path(), "a", 6);
    assert!(spkfeat(&["extract", s(&wav)]).status.success());
    let fmx = tmp.path().join("a.mfcc.fmx");
    let o = spkfeat(&["cmn", s(&fmx)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let f: FeatureMatrix64 = load_fmx(tmp.path().join("a.mfcc.cmn.fmx")).unwrap();
    for j in 0..f.dim() {
        assert!((f.values.column(j).sum() / f.n_frames() as f64).abs() < 1e-4);
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn eval_reports() {
    let tmp = TempDir::new().unwrap();
    let perfect = write(
        tmp.path(),
        "toy.scores",
        "a target 2.0\nb target 1.5\nc nontarget -1\nd nontarget 0.5\n",
    );
    let o = spkfeat(&["eval", s(&perfect)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("EER 0.00% minDCF 0.0000"), "{}", stdout(&o));

    let fixture = write(
        tmp.path(),
        "six.scores",
        "# six trials\nt1 target 0.9\nt2 target 0.4\nt3 target 0.3\nn1 nontarget 0.8\nn2 nontarget 0.2\nn3 nontarget 0.1\n",
    );
    let o = spkfeat(&["eval", s(&fixture)]);
    assert!(stdout(&o).contains("six\tEER 33.33% minDCF 0.6667"), "{}", stdout(&o));

    let copy = write(tmp.path(), "copy.scores", &fs::read_to_string(&fixture).unwrap());
    let o = spkfeat(&["eval", "--fuse", s(&fixture), s(&copy)]);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 3);
    let metrics = |l: &str| l.split_once('\t').unwrap().1.to_owned();
    assert_eq!(metrics(&lines[2]), metrics(&lines[0]));
    assert!(lines[2].starts_with("fused\t"));
}

#[test]
fn malformed_score_line_is_reported_with_its_number() {
    let tmp = TempDir::new().unwrap();
    let bad = write(tmp.path(), "bad.scores", "a target 1\nb nontarget\n");
    let o = spkfeat(&["eval", s(&bad)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn det_and_fuse_outputs() {
    let tmp = TempDir::new().unwrap();
    let a = write(tmp.path(), "a.scores", "x target 0.9\ny nontarget 0.1\nz target 0.4\n");
    let b = write(tmp.path(), "b.scores", "z target 0.0\nx target 0.5\ny nontarget 0.3\n");
    let o = spkfeat(&["det", s(&a)]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p_fa,p_miss,threshold"));
    assert_eq!(lines.next(), Some("1,0,-inf"));
    assert_eq!(lines.last(), Some("0,1,inf"));

    let fused = tmp.path().join("fused.scores");
    assert!(spkfeat(&["fuse", "-o", s(&fused), s(&a), s(&b)]).status.success());
    let t = spkfeat::metrics::read_scores(&fused).unwrap();
    let score = |id: &str| t.trials.iter().find(|tr| tr.id == id).unwrap().score;
    assert!((score("x") - 0.7).abs() < 1e-12);
    assert!((score("y") - 0.2).abs() < 1e-12);
    assert!((score("z") - 0.2).abs() < 1e-12);

    let det = tmp.path().join("det.csv");
    assert!(spkfeat(&["eval", "--fuse", "--det", s(&det), s(&a), s(&b)])
        .status
        .success());
    assert!(fs::read_to_string(&det).unwrap().starts_with("p_fa,p_miss,threshold\n"));
    assert!(!spkfeat(&["eval", "--det", s(&det), s(&a), s(&b)]).status.success());
}

fn mean_vector(path: &Path) -> Vec<f64> {
    let f: FeatureMatrix64 = load_fmx(path).unwrap();
    (1..f.dim())
        .map(|j| f.values.column(j).sum() / f.n_frames() as f64)
        .collect()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (norm(a) * norm(b))
}

#[test]
fn bundled_corpus_extract_then_eval() {
    let corpus = corpus_dir();
    let tmp = TempDir::new().unwrap();
    let mut wavs: Vec<PathBuf> = fs::read_dir(&corpus)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "wav"))
        .collect();
    wavs.sort();
    assert_eq!(wavs.len(), 12);
    let mut args = vec!["extract", "--feature", "mfcc", "--sad", "-o", s(tmp.path())];
    args.extend(wavs.iter().map(|p| s(p)));
    let o = spkfeat(&args);
    assert!(o.status.success(), "{}", stderr(&o));

    let mut scores = String::new();
    for line in fs::read_to_string(corpus.join("trials.txt")).unwrap().lines() {
        if line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let a = mean_vector(&tmp.path().join(format!("{}.mfcc.fmx", f[0])));
        let b = mean_vector(&tmp.path().join(format!("{}.mfcc.fmx", f[1])));
        scores.push_str(&format!("{}:{} {} {}\n", f[0], f[1], f[2], cosine(&a, &b)));
    }
    let score_file = write(tmp.path(), "mfcc.scores", &scores);
    let o = spkfeat(&["eval", "--fuse", s(&score_file)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = stdout(&o);
    let eer: f64 = report
        .split("EER ")
        .nth(1)
        .and_then(|r| r.split('%').next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(eer < 10.0, "{report}");
}
