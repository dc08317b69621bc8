//! SVG picture of a world and the robot paths recorded in a trace.

use std::collections::BTreeMap;
use std::fmt::Write;

use mobsim_core::world::{LIGHT_PLACEMENT_RADIUS, ROBOT_RADIUS};
use mobsim_core::{Mode, RobotId, WorldSpec};

use crate::error::{Error, Result};
use crate::records::TraceRow;

pub const VIEWPORT: f64 = 1000.0;

const PATH_COLORS: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79",
];
const AVOIDING_FILL: &str = "#6baed6";
const MOBBING_FILL: &str = "#d62728";

struct View {
    scale: f64,
    side: f64,
}

impl View {
    fn x(&self, x: f64) -> f64 {
        x * self.scale
    }

    // SVG y grows downward; the arena's grows upward
    fn y(&self, y: f64) -> f64 {
        (self.side - y) * self.scale
    }

    fn len(&self, d: f64) -> f64 {
        d * self.scale
    }
}

/// `detection_radius` is drawn as a dashed ring around the light.
pub fn render_svg(world: &WorldSpec, trace: &[TraceRow], detection_radius: f64) -> Result<String> {
    let mut paths: BTreeMap<RobotId, Vec<&TraceRow>> = BTreeMap::new();
    for row in trace {
        if !world.robots.iter().any(|r| r.id == row.robot_id) {
            return Err(Error::Data(format!(
                "trace has robot {} but the world has robots 1..={}",
                row.robot_id,
                world.robots.len()
            )));
        }
        paths.entry(row.robot_id).or_default().push(row);
    }
    for rows in paths.values_mut() {
        rows.sort_by_key(|r| r.tick);
    }

    let v = View {
        scale: VIEWPORT / world.arena_side,
        side: world.arena_side,
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{VIEWPORT}" height="{VIEWPORT}" viewBox="0 0 {VIEWPORT} {VIEWPORT}">"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{VIEWPORT}" height="{VIEWPORT}" fill="#ffffff" stroke="#000000" stroke-width="4"/>"##
    );
    for b in &world.boxes {
        let lo = b.min();
        let _ = writeln!(
            s,
            r##"<rect class="box" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#8c6d46"/>"##,
            v.x(lo.x),
            v.y(lo.y + 2.0 * b.half_extent),
            v.len(2.0 * b.half_extent),
            v.len(2.0 * b.half_extent)
        );
    }
    let (lx, ly) = (v.x(world.light.position.x), v.y(world.light.position.y));
    let _ = writeln!(
        s,
        r##"<circle class="light" cx="{lx:.2}" cy="{ly:.2}" r="{:.2}" fill="#ffcc00" stroke="#b38f00" stroke-width="2"/>"##,
        v.len(LIGHT_PLACEMENT_RADIUS)
    );
    if detection_radius > 0.0 {
        let _ = writeln!(
            s,
            r##"<circle class="detection" cx="{lx:.2}" cy="{ly:.2}" r="{:.2}" fill="none" stroke="#b38f00" stroke-width="2" stroke-dasharray="12 8"/>"##,
            v.len(detection_radius)
        );
    }
    for (id, rows) in &paths {
        let color = PATH_COLORS[(*id as usize - 1) % PATH_COLORS.len()];
        let points: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", v.x(r.x), v.y(r.y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="path" data-robot="{id}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.join(" ")
        );
    }
    for (id, rows) in &paths {
        let last = rows[rows.len() - 1];
        let fill = match last.mode {
            Mode::Avoiding => AVOIDING_FILL,
            Mode::Mobbing => MOBBING_FILL,
        };
        let (cx, cy) = (v.x(last.x), v.y(last.y));
        let r = v.len(ROBOT_RADIUS);
        let _ = writeln!(
            s,
            r##"<circle class="robot {}" data-robot="{id}" cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{fill}" stroke="#000000" stroke-width="2"/>"##,
            last.mode.as_str()
        );
        let _ = writeln!(
            s,
            r##"<line x1="{cx:.2}" y1="{cy:.2}" x2="{:.2}" y2="{:.2}" stroke="#000000" stroke-width="2"/>"##,
            cx + r * last.heading.cos(),
            cy - r * last.heading.sin()
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

