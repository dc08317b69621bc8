//! TOML world files.
//!
//! ```toml
//! seed = 2025
//! arena_side = 1.0
//!
//! [light]
//! x = 0.41
//! y = 0.77
//! intensity = 2.0
//!
//! [[boxes]]
//! x = 0.2
//! y = 0.3
//! half = 0.05
//!
//! [[robots]]
//! id = 1
//! x = 0.6
//! y = 0.5
//! heading = -1.2
//! ```
//!
//! `seed` is optional and records the generator seed. Lengths are meters,
//! headings radians counter-clockwise from +x. Robot ids run 1, 2, 3, ...

use std::fs;
use std::path::Path;

use mobsim_core::geom::{AxisBox, Pose, Vec2};
use mobsim_core::{LightSource, RobotSpawn, WorldSpec};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WorldFile {
    pub seed: Option<u64>,
    pub world: WorldSpec,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    arena_side: f64,
    light: LightDoc,
    #[serde(default)]
    boxes: Vec<BoxDoc>,
    #[serde(default)]
    robots: Vec<RobotDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LightDoc {
    x: f64,
    y: f64,
    intensity: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxDoc {
    x: f64,
    y: f64,
    half: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RobotDoc {
    id: u32,
    x: f64,
    y: f64,
    heading: f64,
}

impl WorldFile {
    pub fn to_toml(&self) -> String {
        let w = &self.world;
        let doc = Doc {
            seed: self.seed,
            arena_side: w.arena_side,
            light: LightDoc {
                x: w.light.position.x,
                y: w.light.position.y,
                intensity: w.light.intensity,
            },
            boxes: w
                .boxes
                .iter()
                .map(|b| BoxDoc {
                    x: b.center.x,
                    y: b.center.y,
                    half: b.half_extent,
                })
                .collect(),
            robots: w
                .robots
                .iter()
                .map(|r| RobotDoc {
                    id: r.id,
                    x: r.pose.position.x,
                    y: r.pose.position.y,
                    heading: r.pose.heading,
                })
                .collect(),
        };
        toml::to_string(&doc).expect("world documents always serialize")
    }

    /// Parses and validates a world document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: Doc = toml::from_str(text).map_err(|e| Error::Data(format!("bad world file: {e}")))?;
        let world = WorldSpec {
            arena_side: doc.arena_side,
            light: LightSource {
                position: Vec2::new(doc.light.x, doc.light.y),
                intensity: doc.light.intensity,
            },
            boxes: doc
                .boxes
                .iter()
                .map(|b| AxisBox::new(Vec2::new(b.x, b.y), b.half))
                .collect(),
            robots: doc
                .robots
                .iter()
                .map(|r| RobotSpawn {
                    id: r.id,
                    pose: Pose::new(Vec2::new(r.x, r.y), r.heading),
                })
                .collect(),
        };
        world.validate().map_err(|e| Error::Data(format!("bad world file: {e}")))?;
        Ok(WorldFile { seed: doc.seed, world })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_toml()).map_err(|e| Error::io(path, e))
    }
}
