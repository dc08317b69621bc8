//! The range × group-size experiment over a batch of generated worlds.

use alloc::vec::Vec;

use crate::comms::RangePolicy;
use crate::engine::{run_observed, RunOutput, RunRecord, SimConfig, Status};
use crate::world::{generate_world, reduce_to_group, WorldError, WorldSpec};

pub const CANONICAL_ROBOTS: usize = 10;
pub const CANONICAL_BOXES: usize = 3;
pub const CANONICAL_WORLDS: usize = 10;
pub const DEFAULT_MASTER_SEED: u64 = 2024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub range_policy: RangePolicy,
    pub group_size: usize,
}

/// Range levels (unlimited, 0.5 m, 0.1 m) crossed with group sizes (10, 3),
/// range-major.
pub fn canonical_conditions() -> Vec<Condition> {
    let mut out = Vec::with_capacity(6);
    for range_policy in [
        RangePolicy::Infinite,
        RangePolicy::Meters(0.5),
        RangePolicy::Meters(0.1),
    ] {
        for group_size in [10, 3] {
            out.push(Condition {
                range_policy,
                group_size,
            });
        }
    }
    out
}

/// Seed of world `world_id` (1-based).
pub fn world_seed(master_seed: u64, world_id: u32) -> u64 {
    master_seed.wrapping_add(world_id as u64)
}

pub fn build_worlds(master_seed: u64, n_worlds: usize) -> Result<Vec<WorldSpec>, WorldError> {
    (1..=n_worlds as u32)
        .map(|id| generate_world(world_seed(master_seed, id), CANONICAL_ROBOTS, CANONICAL_BOXES))
        .collect()
}

/// One observation: `world` reduced to the condition's group size and run
/// under its range policy.
pub fn run_condition(
    world: &WorldSpec,
    world_id: u32,
    condition: &Condition,
    config: &SimConfig,
) -> Result<RunRecord, WorldError> {
    run_condition_output(world, world_id, condition, config, false).map(|o| o.record)
}

/// Like [`run_condition`], keeping the event log and optionally the physics
/// audit.
pub fn run_condition_output(
    world: &WorldSpec,
    world_id: u32,
    condition: &Condition,
    config: &SimConfig,
    audit: bool,
) -> Result<RunOutput, WorldError> {
    let group = reduce_to_group(world, condition.group_size)?;
    let cfg = SimConfig {
        range_policy: condition.range_policy,
        ..config.clone()
    };
    let mut out = run_observed(&group, &cfg, audit, |_| {});
    out.record.world_id = world_id;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub master_seed: u64,
    pub config: SimConfig,
    pub conditions: Vec<Condition>,
    /// `n_worlds * conditions.len()` records, world-major.
    pub records: Vec<RunRecord>,
}

impl SweepResult {
    pub fn n_worlds(&self) -> usize {
        if self.conditions.is_empty() {
            0
        } else {
            self.records.len() / self.conditions.len()
        }
    }

    /// `(run_id, world_seed, record)` in canonical order; run ids start at 1.
    pub fn rows(&self) -> impl Iterator<Item = (usize, u64, &RunRecord)> {
        self.records
            .iter()
            .enumerate()
            .map(move |(i, r)| (i + 1, world_seed(self.master_seed, r.world_id), r))
    }
}

pub fn sweep(
    master_seed: u64,
    n_worlds: usize,
    conditions: &[Condition],
    config: &SimConfig,
) -> Result<SweepResult, WorldError> {
    let worlds = build_worlds(master_seed, n_worlds)?;
    let mut records = Vec::with_capacity(n_worlds * conditions.len());
    for (w, world) in worlds.iter().enumerate() {
        for c in conditions {
            records.push(run_condition(world, w as u32 + 1, c, config)?);
        }
    }
    Ok(SweepResult {
        master_seed,
        config: config.clone(),
        conditions: conditions.to_vec(),
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StatusCounts {
    pub unanimous: usize,
    pub partial: usize,
    pub failed: usize,
}

impl StatusCounts {
    pub fn total(&self) -> usize {
        self.unanimous + self.partial + self.failed
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    pub n: usize,
    pub counts: StatusCounts,
    pub unanimous_rate_pct: f64,
    pub mean_participation: f64,
    /// Sample (n - 1) standard deviation; `None` for a single record.
    pub sd_participation: Option<f64>,
}

impl CellStats {
    pub fn of<'a, I>(records: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a RunRecord>,
    {
        let mut counts = StatusCounts::default();
        let mut values = Vec::new();
        for r in records {
            match r.status {
                Status::Unanimous => counts.unanimous += 1,
                Status::Partial => counts.partial += 1,
                Status::Failed => counts.failed += 1,
            }
            values.push(r.participation_pct);
        }
        let n = values.len();
        if n == 0 {
            return None;
        }
        let (mean, sd) = mean_sd(&values);
        Some(CellStats {
            n,
            counts,
            unanimous_rate_pct: 100.0 * counts.unanimous as f64 / n as f64,
            mean_participation: mean,
            sd_participation: sd,
        })
    }
}

/// Mean and sample standard deviation.
pub fn mean_sd(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, Some(libm::sqrt(ss / (n - 1.0))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub overall: CellStats,
    /// Records that did not end unanimous; `None` if every run did.
    pub non_unanimous: Option<CellStats>,
    pub by_condition: Vec<(Condition, CellStats)>,
    pub by_range: Vec<(RangePolicy, CellStats)>,
    pub by_group_size: Vec<(usize, CellStats)>,
}

fn levels<T: PartialEq + Copy>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for t in items {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// Descriptive tables. `None` when there are no records.
pub fn summarize(records: &[RunRecord]) -> Option<Summary> {
    let overall = CellStats::of(records)?;
    let non_unanimous = CellStats::of(records.iter().filter(|r| r.status != Status::Unanimous));
    let conditions = levels(records.iter().map(|r| Condition {
        range_policy: r.range_policy,
        group_size: r.group_size,
    }));
    let by_condition = conditions
        .iter()
        .filter_map(|c| {
            CellStats::of(
                records
                    .iter()
                    .filter(|r| r.range_policy == c.range_policy && r.group_size == c.group_size),
            )
            .map(|s| (*c, s))
        })
        .collect();
    let by_range = levels(records.iter().map(|r| r.range_policy))
        .into_iter()
        .filter_map(|p| CellStats::of(records.iter().filter(|r| r.range_policy == p)).map(|s| (p, s)))
        .collect();
    let by_group_size = levels(records.iter().map(|r| r.group_size))
        .into_iter()
        .filter_map(|g| CellStats::of(records.iter().filter(|r| r.group_size == g)).map(|s| (g, s)))
        .collect();
    Some(Summary {
        overall,
        non_unanimous,
        by_condition,
        by_range,
        by_group_size,
    })
}
