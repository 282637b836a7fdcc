//! Aggregate two-alternative forced-choice votes into normalized scores
//! and test group differences, the way a perception study is analyzed.
//!
//! Run with: cargo run --example rank_votes

use anyhow::Result;
use terrain_toolkit::stats::{
    anova_oneway, rank_from_votes, welch_t_test, Choice, VoteRecord,
};

fn main() -> Result<()> {
    // A tiny synthetic study: raters compare terrain pairs and pick the
    // more realistic side. Real studies load these from a CSV with
    // `read_votes_csv` (header: left_id,right_id,choice,rater_id).
    let stimuli = ["alpine-1", "alpine-2", "ridged-1", "ridged-2", "eroded-1"];
    // Hidden "true" appeal used to simulate rater picks.
    let appeal = [0.9, 0.8, 0.15, 0.1, 0.55];

    let mut votes = Vec::new();
    let mut state = 12345u64;
    let mut unit = move || {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
    };
    for rater in 0..25 {
        for i in 0..stimuli.len() {
            for j in (i + 1)..stimuli.len() {
                let p_left = appeal[i] / (appeal[i] + appeal[j]);
                votes.push(VoteRecord {
                    left_id: stimuli[i].to_string(),
                    right_id: stimuli[j].to_string(),
                    choice: if unit() < p_left { Choice::Left } else { Choice::Right },
                    rater_id: format!("rater-{rater:02}"),
                });
            }
        }
    }

    let table = rank_from_votes(&votes)?;
    println!("{} votes over {} stimuli:", votes.len(), stimuli.len());
    println!("id          wins   score");
    for entry in &table.entries {
        println!(
            "{:10} {:5}   {:.3}",
            entry.id, entry.win_count, entry.normalized_score
        );
    }

    // Compare the alpine pair against the ridged pair per rater block.
    let score_of = |id: &str| table.score_of(id).unwrap();
    let alpine = [score_of("alpine-1"), score_of("alpine-2")];
    let ridged = [score_of("ridged-1"), score_of("ridged-2")];
    let eroded = [score_of("eroded-1"), score_of("eroded-1")];
    match welch_t_test(&alpine, &ridged) {
        Ok(t) => println!(
            "\nalpine vs ridged: t = {:.2}, df = {:.1}, p = {:.4}",
            t.t, t.df, t.p_two_tailed
        ),
        Err(e) => println!("\nalpine vs ridged: {e}"),
    }
    match anova_oneway(&[&alpine, &ridged, &eroded]) {
        Ok(a) => println!(
            "three groups: F({}, {}) = {:.2}, p = {:.4}",
            a.df_between, a.df_within, a.f, a.p
        ),
        Err(e) => println!("three groups: {e}"),
    }
    Ok(())
}
