//! Statistical machinery for perception studies: 2AFC vote aggregation,
//! Pearson correlation, t-tests, one-way ANOVA, and the regression refit.
//!
//! Scores are kept on a 0..1 scale throughout (multiply by 100 for the
//! percentage display convention).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TerrainError};

mod regression;
pub mod special;

pub use regression::{fit_mlr, RegressionFit};
pub(crate) use regression::fit_dropping_collinear;

/// Which side of a 2AFC pair the rater picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Choice {
    Left,
    Right,
}

/// One two-alternative forced choice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteRecord {
    pub left_id: String,
    pub right_id: String,
    pub choice: Choice,
    pub rater_id: String,
}

impl VoteRecord {
    pub fn winner(&self) -> &str {
        match self.choice {
            Choice::Left => &self.left_id,
            Choice::Right => &self.right_id,
        }
    }
}

/// Per-terrain win counts with scores normalized so the most-picked
/// terrain scores exactly 1.0.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    /// Sorted by descending win count, then id.
    pub entries: Vec<RankEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub id: String,
    pub win_count: u64,
    pub normalized_score: f64,
}

impl RankTable {
    pub fn score_of(&self, id: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.id == id)
            .map(|e| e.normalized_score)
    }
}

/// Tally wins and normalize by the maximum count. Every terrain that
/// appears in any pair gets an entry, including pure losers at 0.
pub fn rank_from_votes(votes: &[VoteRecord]) -> Result<RankTable> {
    if votes.is_empty() {
        return Err(TerrainError::EmptyInput("no votes".into()));
    }
    let mut wins: BTreeMap<&str, u64> = BTreeMap::new();
    for vote in votes {
        if vote.left_id == vote.right_id {
            return Err(TerrainError::InvalidParameter(format!(
                "vote pairs a terrain with itself: {}",
                vote.left_id
            )));
        }
        wins.entry(&vote.left_id).or_insert(0);
        wins.entry(&vote.right_id).or_insert(0);
        *wins.entry(vote.winner()).or_insert(0) += 1;
    }
    let max = *wins.values().max().expect("non-empty vote list") as f64;
    let mut entries: Vec<RankEntry> = wins
        .into_iter()
        .map(|(id, win_count)| RankEntry {
            id: id.to_string(),
            win_count,
            normalized_score: win_count as f64 / max,
        })
        .collect();
    entries.sort_by(|a, b| b.win_count.cmp(&a.win_count).then(a.id.cmp(&b.id)));
    Ok(RankTable { entries })
}

/// Parse votes from CSV with header `left_id,right_id,choice,rater_id`.
pub fn parse_votes_csv(text: &str) -> Result<Vec<VoteRecord>> {
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .map(|(_, l)| l.trim())
        .ok_or_else(|| TerrainError::EmptyInput("empty votes file".into()))?;
    if header != "left_id,right_id,choice,rater_id" {
        return Err(TerrainError::InvalidParameter(format!(
            "unexpected votes header: {header}"
        )));
    }
    let mut votes = Vec::new();
    for (lineno, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(TerrainError::InvalidParameter(format!(
                "votes line {} has {} fields, expected 4",
                lineno + 1,
                fields.len()
            )));
        }
        let choice = match fields[2] {
            "left" => Choice::Left,
            "right" => Choice::Right,
            other => {
                return Err(TerrainError::InvalidParameter(format!(
                    "votes line {}: choice must be left or right, got {other}",
                    lineno + 1
                )))
            }
        };
        votes.push(VoteRecord {
            left_id: fields[0].to_string(),
            right_id: fields[1].to_string(),
            choice,
            rater_id: fields[3].to_string(),
        });
    }
    Ok(votes)
}

pub fn read_votes_csv(path: &Path) -> Result<Vec<VoteRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| TerrainError::io(path, e))?;
    parse_votes_csv(&text)
}

/// Write a rank table as CSV: `id,win_count,score`.
pub fn write_ranks_csv(table: &RankTable, path: &Path) -> Result<()> {
    let mut out = String::from("id,win_count,score\n");
    for entry in &table.entries {
        out.push_str(&format!(
            "{},{},{}\n",
            entry.id, entry.win_count, entry.normalized_score
        ));
    }
    std::fs::write(path, out).map_err(|e| TerrainError::io(path, e))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(TerrainError::InvalidParameter(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(TerrainError::EmptyInput(
            "pearson needs at least 2 observations".into(),
        ));
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(TerrainError::DegenerateVariance(
            "pearson is undefined for a constant sample".into(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// A t statistic with its degrees of freedom and two-tailed p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    pub p_two_tailed: f64,
}

fn t_result(t: f64, df: f64) -> TTestResult {
    TTestResult {
        t,
        df,
        p_two_tailed: special::t_two_tailed_p(t, df),
    }
}

/// Welch's unequal-variance two-sample t-test.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(TerrainError::EmptyInput(
            "each sample needs at least 2 observations".into(),
        ));
    }
    let (va, vb) = (sample_variance(a), sample_variance(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let se2 = va / na + vb / nb;
    if se2 == 0.0 {
        if mean(a) == mean(b) {
            return Ok(t_result(0.0, na + nb - 2.0));
        }
        return Err(TerrainError::DegenerateVariance(
            "zero variance in both samples with unequal means".into(),
        ));
    }
    let t = (mean(a) - mean(b)) / se2.sqrt();
    let df = se2 * se2
        / ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
    Ok(t_result(t, df))
}

/// Pooled-variance (Student) two-sample t-test.
pub fn student_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(TerrainError::EmptyInput(
            "each sample needs at least 2 observations".into(),
        ));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled = ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b))
        / (na + nb - 2.0);
    if pooled == 0.0 {
        if mean(a) == mean(b) {
            return Ok(t_result(0.0, na + nb - 2.0));
        }
        return Err(TerrainError::DegenerateVariance(
            "zero pooled variance with unequal means".into(),
        ));
    }
    let t = (mean(a) - mean(b)) / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    Ok(t_result(t, na + nb - 2.0))
}

/// Paired t-test over per-item differences (df = n - 1).
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() != b.len() {
        return Err(TerrainError::InvalidParameter(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(TerrainError::EmptyInput(
            "paired test needs at least 2 pairs".into(),
        ));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let var = sample_variance(&diffs);
    let m = mean(&diffs);
    if var == 0.0 {
        if m == 0.0 {
            return Ok(t_result(0.0, (diffs.len() - 1) as f64));
        }
        // All differences identical and nonzero: the statistic diverges.
        return Err(TerrainError::DegenerateVariance(
            "paired differences are constant and nonzero".into(),
        ));
    }
    let n = diffs.len() as f64;
    let t = m / (var / n).sqrt();
    Ok(t_result(t, n - 1.0))
}

/// A one-way ANOVA F statistic with its degrees of freedom and p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnovaResult {
    pub f: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p: f64,
}

/// One-way analysis of variance across two or more groups.
pub fn anova_oneway(groups: &[&[f64]]) -> Result<AnovaResult> {
    if groups.len() < 2 {
        return Err(TerrainError::EmptyInput("anova needs at least 2 groups".into()));
    }
    for (i, g) in groups.iter().enumerate() {
        if g.len() < 2 {
            return Err(TerrainError::EmptyInput(format!(
                "anova group {i} needs at least 2 observations"
            )));
        }
    }
    let n: usize = groups.iter().map(|g| g.len()).sum();
    let k = groups.len();
    let grand: f64 = groups.iter().flat_map(|g| g.iter()).sum::<f64>() / n as f64;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let gm = mean(g);
        ss_between += g.len() as f64 * (gm - grand) * (gm - grand);
        ss_within += g.iter().map(|&x| (x - gm) * (x - gm)).sum::<f64>();
    }
    let df_between = k - 1;
    let df_within = n - k;
    if ss_within == 0.0 {
        return Err(TerrainError::DegenerateVariance(
            "zero within-group variance".into(),
        ));
    }
    let f = (ss_between / df_between as f64) / (ss_within / df_within as f64);
    Ok(AnovaResult {
        f,
        df_between,
        df_within,
        p: special::f_upper_tail_p(f, df_between as f64, df_within as f64),
    })
}
