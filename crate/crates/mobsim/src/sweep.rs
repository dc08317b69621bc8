//! Experiment sweeps spread over worker threads.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use mobsim_core::engine::PhysicsAudit;
use mobsim_core::harness::{build_worlds, run_condition_output};
use mobsim_core::{Condition, RunOutput, SimConfig, SweepResult, WorldError};

use crate::error::{Error, Result};
use crate::records::{write_robots, write_runs};
use crate::summary::summary_text;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub result: SweepResult,
    /// Worst violations over every tick of every run, when audited.
    pub audit: Option<PhysicsAudit>,
}

/// Runs every (world, condition) pair on `jobs` threads. Records come back
/// in world-major order whatever the scheduling, so the output does not
/// depend on `jobs`.
pub fn run_sweep(
    master_seed: u64,
    n_worlds: usize,
    conditions: &[Condition],
    config: &SimConfig,
    jobs: usize,
    audit: bool,
) -> std::result::Result<SweepOutput, WorldError> {
    let worlds = build_worlds(master_seed, n_worlds)?;
    let n_tasks = worlds.len() * conditions.len();
    let task = |i: usize| {
        let w = i / conditions.len();
        run_condition_output(&worlds[w], w as u32 + 1, &conditions[i % conditions.len()], config, audit)
    };
    let mut slots: Vec<Option<std::result::Result<RunOutput, WorldError>>> = (0..n_tasks).map(|_| None).collect();
    let jobs = jobs.clamp(1, n_tasks.max(1));
    if jobs == 1 {
        for (i, slot) in slots.iter_mut().enumerate() {
            *slot = Some(task(i));
        }
    } else {
        let next = AtomicUsize::new(0);
        let done: Vec<Vec<(usize, _)>> = thread::scope(|s| {
            let workers: Vec<_> = (0..jobs)
                .map(|_| {
                    s.spawn(|| {
                        let mut out = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            if i >= n_tasks {
                                break out;
                            }
                            out.push((i, task(i)));
                        }
                    })
                })
                .collect();
            workers.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
        });
        for (i, r) in done.into_iter().flatten() {
            slots[i] = Some(r);
        }
    }

    let mut records = Vec::with_capacity(n_tasks);
    let mut total = audit.then(PhysicsAudit::default);
    for slot in slots {
        let out = slot.expect("every task ran")?;
        if let (Some(t), Some(a)) = (total.as_mut(), out.audit.as_ref()) {
            t.merge(a);
        }
        records.push(out.record);
    }
    Ok(SweepOutput {
        result: SweepResult {
            master_seed,
            config: config.clone(),
            conditions: conditions.to_vec(),
            records,
        },
        audit: total,
    })
}

pub fn audit_text(a: &PhysicsAudit) -> String {
    format!(
        "ticks_audited: {}\nmax_robot_overlap_m: {:e}\nmax_box_overlap_m: {:e}\nmax_wall_excursion_m: {:e}\n",
        a.ticks, a.max_robot_overlap, a.max_box_overlap, a.max_wall_excursion
    )
}

/// Writes `runs.csv`, `robots.csv`, `summary.txt` and, when audited,
/// `audit.txt` into `dir`.
pub fn write_sweep(dir: &Path, out: &SweepOutput) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let res = &out.result;
    let path = dir.join("runs.csv");
    let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_runs(BufWriter::new(f), res.rows().map(|(id, seed, r)| (id, Some(seed), r))).map_err(|e| Error::io(&path, e))?;

    let path = dir.join("robots.csv");
    let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_robots(BufWriter::new(f), res.rows().map(|(id, _, r)| (id, r))).map_err(|e| Error::io(&path, e))?;

    let path = dir.join("summary.txt");
    fs::write(&path, summary_text(&res.records)).map_err(|e| Error::io(&path, e))?;

    if let Some(a) = &out.audit {
        let path = dir.join("audit.txt");
        fs::write(&path, audit_text(a)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
