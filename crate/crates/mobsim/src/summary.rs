//! Plain-text descriptive tables for a batch of runs.

use std::collections::BTreeSet;
use std::fmt::Write;

use mobsim_core::harness::CellStats;
use mobsim_core::{summarize, RunRecord};

const COLUMNS: &str = "runs  unanimous  partial  failed  unanimous_rate_pct  mean_participation  sd_participation";

fn row(out: &mut String, label: &str, s: &CellStats) {
    let sd = s.sd_participation.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
    let _ = writeln!(
        out,
        "{label:<18}{:>4}  {:>9}  {:>7}  {:>6}  {:>18.2}  {:>18.2}  {:>16}",
        s.n, s.counts.unanimous, s.counts.partial, s.counts.failed, s.unanimous_rate_pct, s.mean_participation, sd
    );
}

fn section(out: &mut String, title: &str) {
    let _ = writeln!(out);
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{:<18}{COLUMNS}", "");
}

/// Depends only on the records, so the same text comes back from a
/// `runs.csv` read from disk.
pub fn summary_text(records: &[RunRecord]) -> String {
    let mut out = String::new();
    let Some(s) = summarize(records) else {
        out.push_str("no runs\n");
        return out;
    };
    let worlds: BTreeSet<u32> = records.iter().map(|r| r.world_id).collect();
    let _ = writeln!(out, "runs: {}", records.len());
    let _ = writeln!(out, "worlds: {}", worlds.len());
    let _ = writeln!(out, "participation_pct: percent of the group mobbing at the end of a run");
    let _ = writeln!(out, "sd_participation: sample standard deviation (n - 1)");

    section(&mut out, "overall");
    row(&mut out, "all", &s.overall);
    if let Some(n) = &s.non_unanimous {
        row(&mut out, "non-unanimous", n);
    }

    section(&mut out, "by condition");
    for (c, cell) in &s.by_condition {
        row(&mut out, &format!("range={} n={}", c.range_policy, c.group_size), cell);
    }

    section(&mut out, "by range");
    for (r, cell) in &s.by_range {
        row(&mut out, &format!("range={r}"), cell);
    }

    section(&mut out, "by group size");
    for (g, cell) in &s.by_group_size {
        row(&mut out, &format!("n={g}"), cell);
    }
    out
}
