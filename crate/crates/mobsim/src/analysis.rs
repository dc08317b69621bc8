//! Repeated-measures analysis of a `runs.csv`: worlds are the subjects,
//! communication range is factor A and group size factor B.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write;

use mobsim_core::stats::{
    bonferroni, planned_contrast, rm_anova_2way, AnovaResult, ContrastResult, EffectTest, Factor,
    WithinSubjectsTable,
};
use mobsim_core::{RangePolicy, RunRecord, Status};

use crate::error::{Error, Result};

pub const ANOVA_HEADER: &str = "effect,ss,df,error_ss,error_df,f,p,p_bonferroni";

/// Canonical contrasts over the three range levels (unlimited, mid, low).
pub const CONTRASTS: [(&str, [f64; 3]); 2] = [
    ("range: unlimited vs limited", [2.0, -1.0, -1.0]),
    ("range: mid vs low", [0.0, 1.0, -1.0]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Response {
    /// `participation_pct` of each run.
    Participation,
    /// 100 for a unanimous run, 0 otherwise.
    Unanimous,
}

impl Response {
    pub fn value(self, r: &RunRecord) -> f64 {
        match self {
            Response::Participation => r.participation_pct,
            Response::Unanimous => {
                if r.status == Status::Unanimous {
                    100.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Response::Participation => "participation_pct (percent of the group mobbing at the end of the run)",
            Response::Unanimous => "unanimous mobbing, coded 100 for a unanimous run and 0 otherwise",
        }
    }
}

/// Unlimited first, then longest to shortest.
fn range_order(a: &RangePolicy, b: &RangePolicy) -> Ordering {
    match (a, b) {
        (RangePolicy::Infinite, RangePolicy::Infinite) => Ordering::Equal,
        (RangePolicy::Infinite, _) => Ordering::Less,
        (_, RangePolicy::Infinite) => Ordering::Greater,
        (RangePolicy::Meters(x), RangePolicy::Meters(y)) => y.total_cmp(x),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub worlds: Vec<u32>,
    pub ranges: Vec<RangePolicy>,
    /// Largest group first.
    pub group_sizes: Vec<usize>,
    pub table: WithinSubjectsTable,
}

/// Arranges one response per (world, range, group size). Every cell must be
/// present exactly once.
pub fn build_design(records: &[RunRecord], response: Response) -> Result<Design> {
    let mut worlds: Vec<u32> = records.iter().map(|r| r.world_id).collect();
    worlds.sort_unstable();
    worlds.dedup();
    let mut ranges: Vec<RangePolicy> = Vec::new();
    for r in records {
        if !ranges.contains(&r.range_policy) {
            ranges.push(r.range_policy);
        }
    }
    ranges.sort_by(range_order);
    let mut group_sizes: Vec<usize> = records.iter().map(|r| r.group_size).collect();
    group_sizes.sort_unstable_by(|a, b| b.cmp(a));
    group_sizes.dedup();

    let mut cells: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
    for r in records {
        let i = worlds.binary_search(&r.world_id).unwrap();
        let j = ranges.iter().position(|p| *p == r.range_policy).unwrap();
        let k = group_sizes.iter().position(|g| *g == r.group_size).unwrap();
        if cells.insert((i, j, k), response.value(r)).is_some() {
            return Err(Error::Data(format!(
                "duplicate run for world {}, range {}, group size {}",
                r.world_id, r.range_policy, r.group_size
            )));
        }
    }
    for (i, w) in worlds.iter().enumerate() {
        for (j, range) in ranges.iter().enumerate() {
            for (k, g) in group_sizes.iter().enumerate() {
                if !cells.contains_key(&(i, j, k)) {
                    return Err(Error::Data(format!(
                        "missing run for world {w}, range {range}, group size {g}"
                    )));
                }
            }
        }
    }
    let table = WithinSubjectsTable::from_fn(worlds.len(), ranges.len(), group_sizes.len(), |i, j, k| {
        cells[&(i, j, k)]
    })
    .map_err(|e| Error::Data(e.to_string()))?;
    Ok(Design {
        worlds,
        ranges,
        group_sizes,
        table,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contrast {
    pub name: &'static str,
    pub result: ContrastResult,
    pub p_bonferroni: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub response: Response,
    pub design: Design,
    pub anova: AnovaResult,
    /// Empty unless there are exactly three range levels.
    pub contrasts: Vec<Contrast>,
}

pub fn analyze(records: &[RunRecord], response: Response) -> Result<Analysis> {
    let design = build_design(records, response)?;
    let anova = rm_anova_2way(&design.table).map_err(|e| Error::Data(format!("cannot run the ANOVA: {e}")))?;
    let mut contrasts = Vec::new();
    if design.ranges.len() == CONTRASTS.len() + 1 {
        for (name, w) in CONTRASTS {
            let result =
                planned_contrast(&design.table, Factor::A, &w).map_err(|e| Error::Data(e.to_string()))?;
            let p_bonferroni = bonferroni(result.p, CONTRASTS.len());
            contrasts.push(Contrast {
                name,
                result,
                p_bonferroni,
            });
        }
    }
    Ok(Analysis {
        response,
        design,
        anova,
        contrasts,
    })
}

// Shortest round-trip decimal, switching to exponent form for very small or
// large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Analysis {
    fn effects(&self) -> [(&'static str, &EffectTest); 3] {
        [
            ("range", &self.anova.a),
            ("group_size", &self.anova.b),
            ("range:group_size", &self.anova.ab),
        ]
    }

    /// ANOVA effects (uncorrected, so `p_bonferroni` equals `p`) followed by
    /// the planned contrasts corrected for two comparisons.
    pub fn anova_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{ANOVA_HEADER}");
        for (name, e) in self.effects() {
            let _ = writeln!(
                out,
                "{name},{},{},{},{},{},{},{}",
                num(e.ss),
                e.df,
                num(e.error_ss),
                e.error_df,
                num(e.f),
                num(e.p),
                num(e.p)
            );
        }
        for c in &self.contrasts {
            let r = &c.result;
            let _ = writeln!(
                out,
                "\"{}\",{},{},{},{},{},{},{}",
                c.name,
                num(r.ss),
                r.df1,
                num(r.error_ss),
                r.df2,
                num(r.f),
                num(r.p),
                num(c.p_bonferroni)
            );
        }
        out
    }

    pub fn report(&self) -> String {
        let d = &self.design;
        let mut out = String::new();
        let _ = writeln!(out, "Two-way repeated-measures ANOVA");
        let _ = writeln!(out, "response: {}", self.response.describe());
        let _ = writeln!(out, "subjects: {} worlds", d.worlds.len());
        let list = |v: Vec<String>| v.join(", ");
        let _ = writeln!(
            out,
            "range levels (m): {}",
            list(d.ranges.iter().map(|r| r.to_string()).collect())
        );
        let _ = writeln!(
            out,
            "group sizes: {}",
            list(d.group_sizes.iter().map(|g| g.to_string()).collect())
        );
        let _ = writeln!(out, "sphericity is assumed; degrees of freedom are uncorrected");
        let _ = writeln!(out);
        for (label, e) in [
            ("Main effect of range", &self.anova.a),
            ("Main effect of group size", &self.anova.b),
            ("Range x group size interaction", &self.anova.ab),
        ] {
            let _ = writeln!(out, "{label}: {}", apa(e.df, e.error_df, e.f, e.p, e.degenerate));
        }
        if !self.contrasts.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "Planned contrasts on range, Bonferroni-corrected for 2 comparisons:");
            for c in &self.contrasts {
                let r = &c.result;
                let w: Vec<String> = r
                    .weights
                    .iter()
                    .map(|&w| if w == 0.0 { "0".to_string() } else { format!("{w:+}") })
                    .collect();
                let _ = writeln!(
                    out,
                    "{} ({}): estimate = {:.2}, {}",
                    c.name,
                    w.join(", "),
                    r.estimate,
                    apa(r.df1, r.df2, r.f, c.p_bonferroni, r.degenerate)
                );
            }
        }
        out
    }
}

fn apa(df1: f64, df2: f64, f: f64, p: f64, degenerate: bool) -> String {
    let f_text = if f.is_finite() { format!("{f:.2}") } else { "inf".to_string() };
    let p_text = if p < 0.001 {
        "p < .001".to_string()
    } else {
        let s = format!("{p:.3}");
        format!("p = {}", s.strip_prefix('0').unwrap_or(&s))
    };
    let flag = if degenerate { " (degenerate: zero error variance)" } else { "" };
    format!("F({df1}, {df2}) = {f_text}, {p_text}{flag}")
}
