//! Verification metrics (EER, minDCF, DET points), equal-weight score
//! fusion and the plain-text score file format.
//!
//! A trial is accepted iff its score is at or above the threshold. The
//! sweep visits `-inf`, every midpoint between adjacent distinct scores and
//! `+inf`, so each operating point is an exact empirical
//! `(P_fa, P_miss)` pair.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Target,
    Nontarget,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Target => "target",
            Label::Nontarget => "nontarget",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "target" | "tgt" => Ok(Label::Target),
            "nontarget" | "nontgt" | "non-target" | "impostor" => Ok(Label::Nontarget),
            _ => Err(Error::Metric(format!("unknown trial label '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub id: String,
    pub label: Label,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrialScores {
    pub trials: Vec<Trial>,
}

impl TrialScores {
    pub fn new(trials: Vec<Trial>) -> Self {
        Self { trials }
    }

    /// Builds anonymous trials from separate target and nontarget scores.
    pub fn from_scores(targets: &[f64], nontargets: &[f64]) -> Self {
        let tagged = targets
            .iter()
            .map(|&s| (Label::Target, s))
            .chain(nontargets.iter().map(|&s| (Label::Nontarget, s)));
        Self::new(
            tagged
                .enumerate()
                .map(|(i, (label, score))| Trial {
                    id: format!("t{i}"),
                    label,
                    score,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    fn split(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut tgt = Vec::new();
        let mut non = Vec::new();
        for t in &self.trials {
            if !t.score.is_finite() {
                return Err(Error::Metric(format!("trial '{}' has non-finite score", t.id)));
            }
            match t.label {
                Label::Target => tgt.push(t.score),
                Label::Nontarget => non.push(t.score),
            }
        }
        if tgt.is_empty() || non.is_empty() {
            return Err(Error::Metric(format!(
                "need at least one target and one nontarget trial (got {} and {})",
                tgt.len(),
                non.len()
            )));
        }
        Ok((tgt, non))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcfParams {
    pub p_target: f64,
    pub c_fa: f64,
    pub c_miss: f64,
}

impl Default for DcfParams {
    fn default() -> Self {
        Self {
            p_target: 0.001,
            c_fa: 1.0,
            c_miss: 1.0,
        }
    }
}

impl DcfParams {
    fn validate(&self) -> Result<()> {
        if !(self.p_target > 0.0 && self.p_target < 1.0) || !(self.c_fa > 0.0) || !(self.c_miss > 0.0) {
            return Err(Error::Metric(format!("invalid DCF parameters {self:?}")));
        }
        Ok(())
    }

    /// Cost of the operating point divided by the cost of the better
    /// trivial system (accept all or reject all).
    pub fn normalized_cost(&self, p_miss: f64, p_fa: f64) -> f64 {
        let raw = self.c_miss * self.p_target * p_miss + self.c_fa * (1.0 - self.p_target) * p_fa;
        raw / (self.c_miss * self.p_target).min(self.c_fa * (1.0 - self.p_target))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetPoint {
    pub p_fa: f64,
    pub p_miss: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetCurve {
    /// Ordered by increasing threshold.
    pub points: Vec<DetPoint>,
}

/// Operating points at `-inf`, each midpoint between adjacent distinct
/// scores, and `+inf`.
pub fn det_points(t: &TrialScores) -> Result<DetCurve> {
    let (tgt, non) = t.split()?;
    let mut all: Vec<(f64, Label)> = tgt
        .iter()
        .map(|&s| (s, Label::Target))
        .chain(non.iter().map(|&s| (s, Label::Nontarget)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nt, nn) = (tgt.len() as f64, non.len() as f64);
    // Everything is accepted at -inf.
    let (mut misses, mut false_accepts) = (0usize, non.len());
    let mut points = vec![DetPoint {
        p_fa: 1.0,
        p_miss: 0.0,
        threshold: f64::NEG_INFINITY,
    }];
    let mut i = 0;
    while i < all.len() {
        let s = all[i].0;
        // Move every trial tied at `s` below the next threshold.
        while i < all.len() && all[i].0 == s {
            match all[i].1 {
                Label::Target => misses += 1,
                Label::Nontarget => false_accepts -= 1,
            }
            i += 1;
        }
        let threshold = if i < all.len() {
            0.5 * (s + all[i].0)
        } else {
            f64::INFINITY
        };
        points.push(DetPoint {
            p_fa: false_accepts as f64 / nn,
            p_miss: misses as f64 / nt,
            threshold,
        });
    }
    Ok(DetCurve { points })
}

/// Equal error rate, linearly interpolated between the two operating points
/// on either side of `P_miss = P_fa`.
pub fn eer(t: &TrialScores) -> Result<f64> {
    Ok(eer_from_curve(&det_points(t)?))
}

pub fn eer_from_curve(curve: &DetCurve) -> f64 {
    let pts = &curve.points;
    let gap = |p: &DetPoint| p.p_miss - p.p_fa;
    let i = pts
        .iter()
        .position(|p| gap(p) >= 0.0)
        .expect("+inf point has P_miss = 1 >= P_fa = 0");
    if gap(&pts[i]) == 0.0 || i == 0 {
        return pts[i].p_fa;
    }
    let (a, b) = (&pts[i - 1], &pts[i]);
    let alpha = -gap(a) / (gap(b) - gap(a));
    a.p_fa + alpha * (b.p_fa - a.p_fa)
}

/// Minimum normalized detection cost over all thresholds; 1.0 means no
/// better than the best trivial decision.
pub fn min_dcf(t: &TrialScores, p: &DcfParams) -> Result<f64> {
    p.validate()?;
    Ok(det_points(t)?
        .points
        .iter()
        .map(|pt| p.normalized_cost(pt.p_miss, pt.p_fa))
        .fold(f64::INFINITY, f64::min))
}

/// Equal-weight linear fusion: each trial's fused score is the mean of its
/// scores across systems. Trial order follows the first system.
pub fn fuse_scores(systems: &[TrialScores]) -> Result<TrialScores> {
    let first = systems.first().ok_or_else(|| Error::Metric("nothing to fuse".into()))?;
    let mut index: HashMap<&str, usize> = HashMap::with_capacity(first.len());
    for (i, t) in first.trials.iter().enumerate() {
        if index.insert(t.id.as_str(), i).is_some() {
            return Err(Error::Metric(format!("duplicate trial id '{}' in system 1", t.id)));
        }
    }
    let mut sums: Vec<f64> = vec![0.0; first.len()];
    for (s, sys) in systems.iter().enumerate() {
        if sys.len() != first.len() {
            return Err(Error::Metric(format!(
                "system {} has {} trials, system 1 has {}",
                s + 1,
                sys.len(),
                first.len()
            )));
        }
        let mut seen = vec![false; first.len()];
        for t in &sys.trials {
            let &i = index.get(t.id.as_str()).ok_or_else(|| {
                Error::Metric(format!("trial '{}' of system {} is missing from system 1", t.id, s + 1))
            })?;
            if seen[i] {
                return Err(Error::Metric(format!(
                    "duplicate trial id '{}' in system {}",
                    t.id,
                    s + 1
                )));
            }
            seen[i] = true;
            if t.label != first.trials[i].label {
                return Err(Error::Metric(format!(
                    "trial '{}' has conflicting labels across systems",
                    t.id
                )));
            }
            sums[i] += t.score;
        }
    }
    let n = systems.len() as f64;
    Ok(TrialScores::new(
        first
            .trials
            .iter()
            .zip(sums)
            .map(|(t, sum)| Trial {
                id: t.id.clone(),
                label: t.label,
                score: sum / n,
            })
            .collect(),
    ))
}

/// Parses `<trial_id> <target|nontarget> <score>` lines. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_scores(text: &str) -> Result<TrialScores> {
    let mut trials = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Parse { line: n + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad(format!(
                "expected '<trial_id> <target|nontarget> <score>', got '{line}'"
            )));
        }
        let label = fields[1].parse::<Label>().map_err(|e| bad(e.to_string()))?;
        let score: f64 = fields[2]
            .parse()
            .map_err(|_| bad(format!("invalid score '{}'", fields[2])))?;
        if !score.is_finite() {
            return Err(bad(format!("non-finite score '{}'", fields[2])));
        }
        trials.push(Trial {
            id: fields[0].to_string(),
            label,
            score,
        });
    }
    Ok(TrialScores::new(trials))
}

pub fn format_scores(t: &TrialScores) -> String {
    t.trials
        .iter()
        .map(|tr| format!("{} {} {}\n", tr.id, tr.label, tr.score))
        .collect()
}

pub fn read_scores(path: impl AsRef<Path>) -> Result<TrialScores> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_scores(&text).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

pub fn write_scores(path: impl AsRef<Path>, t: &TrialScores) -> Result<()> {
    Ok(std::fs::write(path, format_scores(t))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Counts errors directly at every candidate threshold: each distinct
    /// score (accept >= s) and +inf. O(n^2) and independent of the sorted
    /// sweep above.
    fn brute_points(tgt: &[f64], non: &[f64]) -> Vec<(f64, f64)> {
        let mut cands: Vec<f64> = tgt.iter().chain(non).copied().collect();
        cands.push(f64::INFINITY);
        cands.sort_by(f64::total_cmp);
        cands.dedup();
        cands
            .iter()
            .map(|&th| {
                let miss = tgt.iter().filter(|&&s| s < th).count() as f64 / tgt.len() as f64;
                let fa = non.iter().filter(|&&s| s >= th).count() as f64 / non.len() as f64;
                (fa, miss)
            })
            .collect()
    }

    fn brute_eer(tgt: &[f64], non: &[f64]) -> f64 {
        let pts = brute_points(tgt, non);
        for w in pts.windows(2) {
            let (d0, d1) = (w[0].1 - w[0].0, w[1].1 - w[1].0);
            if d0 == 0.0 {
                return w[0].0;
            }
            if d0 < 0.0 && d1 == 0.0 {
                return w[1].0;
            }
            if d0 < 0.0 && d1 > 0.0 {
                let a = d0 / (d0 - d1);
                return w[0].0 + a * (w[1].0 - w[0].0);
            }
        }
        pts.last().unwrap().0
    }

    fn brute_min_dcf(tgt: &[f64], non: &[f64], p: f64) -> f64 {
        brute_points(tgt, non)
            .iter()
            .map(|&(fa, miss)| (p * miss + (1.0 - p) * fa) / p.min(1.0 - p))
            .fold(f64::INFINITY, f64::min)
    }

    fn fixture() -> TrialScores {
        TrialScores::from_scores(&[0.9, 0.4, 0.3], &[0.8, 0.2, 0.1])
    }

    #[test]
    fn six_trial_fixture() {
        let t = fixture();
        assert!((eer(&t).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let dcf = min_dcf(&t, &DcfParams::default()).unwrap();
        assert!((dcf - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(eer(&t).unwrap(), brute_eer(&[0.9, 0.4, 0.3], &[0.8, 0.2, 0.1]));
        assert_eq!(det_points(&t).unwrap().points.len(), 7);
    }

    #[test]
    fn separation_and_symmetry() {
        let t = TrialScores::from_scores(&[0.9, 0.8], &[0.2, 0.1]);
        assert_eq!(eer(&t).unwrap(), 0.0);
        assert_eq!(min_dcf(&t, &DcfParams::default()).unwrap(), 0.0);
        let same = TrialScores::from_scores(&[0.1, 0.5, 0.7], &[0.1, 0.5, 0.7]);
        assert_eq!(eer(&same).unwrap(), 0.5);
        // Reversed scores: rejecting everything is the best available.
        let reversed = TrialScores::from_scores(&[0.1], &[0.9]);
        assert_eq!(min_dcf(&reversed, &DcfParams::default()).unwrap(), 1.0);
    }

    #[test]
    fn det_endpoints() {
        let c = det_points(&fixture()).unwrap();
        let (first, last) = (c.points[0], *c.points.last().unwrap());
        assert_eq!((first.p_fa, first.p_miss), (1.0, 0.0));
        assert_eq!((last.p_fa, last.p_miss), (0.0, 1.0));
    }

    #[test]
    fn missing_class_is_an_error() {
        assert!(eer(&TrialScores::from_scores(&[0.3], &[])).is_err());
        assert!(min_dcf(&TrialScores::from_scores(&[], &[0.3]), &DcfParams::default()).is_err());
    }

    #[test]
    fn fusion_identities() {
        let t = fixture();
        let self_fused = fuse_scores(&[t.clone(), t.clone()]).unwrap();
        assert_eq!(eer(&self_fused).unwrap(), eer(&t).unwrap());
        let neg = TrialScores::new(
            t.trials
                .iter()
                .map(|tr| Trial {
                    score: -tr.score,
                    ..tr.clone()
                })
                .collect(),
        );
        let zero = fuse_scores(&[t.clone(), neg]).unwrap();
        assert!(zero.trials.iter().all(|tr| tr.score == 0.0));
        assert_eq!(eer(&zero).unwrap(), 0.5);

        let shifted = |d: f64| {
            TrialScores::new(
                t.trials
                    .iter()
                    .map(|tr| Trial {
                        score: tr.score + d,
                        ..tr.clone()
                    })
                    .collect(),
            )
        };
        let fused = fuse_scores(&[t.clone(), shifted(0.3), shifted(-0.6)]).unwrap();
        for (f, o) in fused.trials.iter().zip(&t.trials) {
            assert!((f.score - (o.score + (0.3 - 0.6) / 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn fusion_rejects_mismatches() {
        let t = fixture();
        let mut renamed = t.clone();
        renamed.trials[0].id = "other".into();
        assert!(fuse_scores(&[t.clone(), renamed]).is_err());
        let mut relabeled = t.clone();
        relabeled.trials[0].label = Label::Nontarget;
        assert!(fuse_scores(&[t.clone(), relabeled]).is_err());
        let mut shorter = t.clone();
        shorter.trials.pop();
        assert!(fuse_scores(&[t, shorter]).is_err());
    }

    #[test]
    fn score_file_round_trip_and_errors() {
        let text = "# header\na target 0.5\n\nb nontarget -1.25e-3\n";
        let t = parse_scores(text).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(parse_scores(&format_scores(&t)).unwrap(), t);
        match parse_scores("a target 1\nb maybe 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_scores("a target x\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse_scores("a target\n"), Err(Error::Parse { line: 1, .. })));
    }

    fn trial_sets() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (
            proptest::collection::vec((-20i32..20).prop_map(|v| v as f64 / 4.0), 1..25),
            proptest::collection::vec((-20i32..20).prop_map(|v| v as f64 / 4.0), 1..25),
        )
    }

    proptest! {
        #[test]
        fn sweep_matches_brute_force((tgt, non) in trial_sets()) {
            let t = TrialScores::from_scores(&tgt, &non);
            prop_assert!((eer(&t).unwrap() - brute_eer(&tgt, &non)).abs() < 1e-12);
            for p in [0.001, 0.01, 0.5] {
                let params = DcfParams { p_target: p, ..DcfParams::default() };
                prop_assert!((min_dcf(&t, &params).unwrap() - brute_min_dcf(&tgt, &non, p)).abs() < 1e-9);
            }
        }

        #[test]
        fn rank_statistics_only((tgt, non) in trial_sets()) {
            let t = TrialScores::from_scores(&tgt, &non);
            let warp = |v: f64| (v / 2.0).exp() + v;
            let w = TrialScores::from_scores(
                &tgt.iter().map(|&v| warp(v)).collect::<Vec<_>>(),
                &non.iter().map(|&v| warp(v)).collect::<Vec<_>>(),
            );
            prop_assert_eq!(eer(&t).unwrap(), eer(&w).unwrap());
            prop_assert_eq!(min_dcf(&t, &DcfParams::default()).unwrap(), min_dcf(&w, &DcfParams::default()).unwrap());
        }

        #[test]
        fn negation_with_swapped_labels((tgt, non) in trial_sets()) {
            let t = TrialScores::from_scores(&tgt, &non);
            let neg = |v: &Vec<f64>| v.iter().map(|x| -x).collect::<Vec<_>>();
            let swapped = TrialScores::from_scores(&neg(&non), &neg(&tgt));
            prop_assert!((eer(&t).unwrap() - eer(&swapped).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn det_is_monotone_and_sized((tgt, non) in trial_sets()) {
            let t = TrialScores::from_scores(&tgt, &non);
            let c = det_points(&t).unwrap();
            let mut distinct: Vec<f64> = tgt.iter().chain(&non).copied().collect();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            prop_assert_eq!(c.points.len(), distinct.len() + 1);
            for w in c.points.windows(2) {
                prop_assert!(w[1].threshold > w[0].threshold);
                prop_assert!(w[1].p_fa <= w[0].p_fa);
                prop_assert!(w[1].p_miss >= w[0].p_miss);
            }
        }

        #[test]
        fn min_dcf_never_exceeds_cost_at_eer_point((tgt, non) in trial_sets()) {
            let t = TrialScores::from_scores(&tgt, &non);
            let p = DcfParams::default();
            let c = det_points(&t).unwrap();
            let best = min_dcf(&t, &p).unwrap();
            // The operating point nearest the crossing.
            let at_eer = c.points.iter().min_by(|a, b| (a.p_miss - a.p_fa).abs().total_cmp(&(b.p_miss - b.p_fa).abs())).unwrap();
            prop_assert!(best <= p.normalized_cost(at_eer.p_miss, at_eer.p_fa) + 1e-12);
        }
    }
}
