//! Run tables (`runs.csv`, `robots.csv`), the JSONL event log and the pose
//! trace.

use std::io::{self, Read, Write};

use mobsim_core::{Event, Mode, RangePolicy, RobotId, RunRecord, Status};
use serde::Serialize;

use crate::error::{Error, Result};

pub const RUNS_HEADER: [&str; 9] = [
    "run_id",
    "world_id",
    "world_seed",
    "range_m",
    "group_size",
    "status",
    "n_mobbing",
    "participation_pct",
    "first_call_t_s",
];
pub const ROBOTS_HEADER: [&str; 4] = ["run_id", "robot_id", "mobbed", "decision_t_s"];
pub const TRACE_HEADER: [&str; 6] = ["tick", "robot_id", "x", "y", "heading", "mode"];

/// One line of `runs.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub run_id: usize,
    pub world_seed: Option<u64>,
    pub record: RunRecord,
}

fn time(t: f64) -> String {
    format!("{t:.6}")
}

fn pct(p: f64) -> String {
    format!("{p:.2}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Data(e.to_string())
}

pub fn write_runs<'a, W: Write>(out: W, rows: impl IntoIterator<Item = (usize, Option<u64>, &'a RunRecord)>) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUNS_HEADER)?;
    for (run_id, seed, r) in rows {
        w.write_record([
            run_id.to_string(),
            r.world_id.to_string(),
            seed.map(|s| s.to_string()).unwrap_or_default(),
            r.range_policy.to_string(),
            r.group_size.to_string(),
            r.status.as_str().to_string(),
            r.n_mobbing.to_string(),
            pct(r.participation_pct),
            r.first_call_time.map(time).unwrap_or_default(),
        ])?;
    }
    w.flush()
}

pub fn write_robots<'a, W: Write>(out: W, rows: impl IntoIterator<Item = (usize, &'a RunRecord)>) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ROBOTS_HEADER)?;
    for (run_id, r) in rows {
        for (id, t) in &r.decision_times {
            w.write_record([
                run_id.to_string(),
                id.to_string(),
                if t.is_some() { "1" } else { "0" }.to_string(),
                t.map(time).unwrap_or_default(),
            ])?;
        }
    }
    w.flush()
}

fn parse<T: std::str::FromStr>(line: u64, column: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Data(format!("runs.csv line {line}: bad {column} {s:?}")))
}

fn parse_status(line: u64, s: &str) -> Result<Status> {
    match s.trim() {
        "unanimous" => Ok(Status::Unanimous),
        "partial" => Ok(Status::Partial),
        "failed" => Ok(Status::Failed),
        _ => Err(Error::Data(format!("runs.csv line {line}: bad status {s:?}"))),
    }
}

/// Reads `runs.csv`. Participation is recomputed from `n_mobbing` and
/// `group_size`, and must agree with the rounded column. Per-robot decision
/// times are not part of this file and come back empty.
pub fn read_runs<R: Read>(input: R) -> Result<Vec<RunRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(RUNS_HEADER) {
        return Err(Error::Data(format!(
            "runs.csv header is {:?}, expected {}",
            header.iter().collect::<Vec<_>>().join(","),
            RUNS_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let seed = match rec[2].trim() {
            "" => None,
            s => Some(parse(line, "world_seed", s)?),
        };
        let range_policy =
            RangePolicy::parse(&rec[3]).map_err(|e| Error::Data(format!("runs.csv line {line}: {e}")))?;
        let group_size: usize = parse(line, "group_size", &rec[4])?;
        let n_mobbing: usize = parse(line, "n_mobbing", &rec[6])?;
        if group_size == 0 || n_mobbing > group_size {
            return Err(Error::Data(format!(
                "runs.csv line {line}: {n_mobbing} mobbing out of a group of {group_size}"
            )));
        }
        let participation_pct = 100.0 * n_mobbing as f64 / group_size as f64;
        let stated: f64 = parse(line, "participation_pct", &rec[7])?;
        if (stated - participation_pct).abs() > 0.005 + 1e-9 {
            return Err(Error::Data(format!(
                "runs.csv line {line}: participation_pct {stated} disagrees with {n_mobbing}/{group_size}"
            )));
        }
        let first_call_time = match rec[8].trim() {
            "" => None,
            s => Some(parse(line, "first_call_t_s", s)?),
        };
        rows.push(RunRow {
            run_id: parse(line, "run_id", &rec[0])?,
            world_seed: seed,
            record: RunRecord {
                world_id: parse(line, "world_id", &rec[1])?,
                range_policy,
                group_size,
                status: parse_status(line, &rec[5])?,
                n_mobbing,
                participation_pct,
                decision_times: Vec::new(),
                first_call_time,
            },
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct EventLine {
    time_s: f64,
    robot_id: RobotId,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    payload: Option<&'static str>,
}

pub fn write_events<W: Write>(mut out: W, events: &[Event]) -> io::Result<()> {
    for e in events {
        let line = EventLine {
            time_s: e.time,
            robot_id: e.robot_id,
            kind: e.kind.as_str(),
            payload: e.kind.payload(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// One robot's pose after a given tick (tick 0 is the spawn pose).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub tick: u64,
    pub robot_id: RobotId,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub mode: Mode,
}

/// Streams trace rows as they are produced.
pub struct TraceWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W) -> io::Result<Self> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(TRACE_HEADER)?;
        Ok(TraceWriter { inner })
    }

    pub fn push(&mut self, row: &TraceRow) -> io::Result<()> {
        self.inner
            .write_record([
                row.tick.to_string(),
                row.robot_id.to_string(),
                format!("{:.6}", row.x),
                format!("{:.6}", row.y),
                format!("{:.6}", row.heading),
                row.mode.as_str().to_string(),
            ])
            .map_err(io::Error::from)
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(Error::Data(format!("trace header must be {}", TRACE_HEADER.join(","))));
    }
    let bad = |line: u64, what: &str| Error::Data(format!("trace line {line}: bad {what}"));
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize, what: &str| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(line, what))
        };
        let mode = match rec[5].trim() {
            "avoiding" => Mode::Avoiding,
            "mobbing" => Mode::Mobbing,
            _ => return Err(bad(line, "mode")),
        };
        rows.push(TraceRow {
            tick: rec[0].trim().parse().map_err(|_| bad(line, "tick"))?,
            robot_id: rec[1].trim().parse().map_err(|_| bad(line, "robot_id"))?,
            x: num(2, "x")?,
            y: num(3, "y")?,
            heading: num(4, "heading")?,
            mode,
        });
    }
    Ok(rows)
}
