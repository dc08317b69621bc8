//! Reference scenarios and brute-force oracles for checking `mobsim-core`.

use std::f64::consts::FRAC_PI_2;

use mobsim_core::geom::{Pose, Vec2};
use mobsim_core::world::DEFAULT_LIGHT_INTENSITY;
use mobsim_core::{LightSource, RobotSpawn, WorldSpec};

/// Two robots 0.2 m apart side by side, facing a light 0.3 m ahead of them;
/// no boxes.
pub fn pair_world() -> WorldSpec {
    WorldSpec {
        arena_side: 1.0,
        light: LightSource {
            position: Vec2::new(0.5, 0.6),
            intensity: DEFAULT_LIGHT_INTENSITY,
        },
        boxes: vec![],
        robots: vec![
            RobotSpawn {
                id: 1,
                pose: Pose::new(Vec2::new(0.4, 0.3), FRAC_PI_2),
            },
            RobotSpawn {
                id: 2,
                pose: Pose::new(Vec2::new(0.6, 0.3), FRAC_PI_2),
            },
        ],
    }
}

/// Sums of squares of a subjects × A × B within-subjects design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMeanSs {
    pub a: f64,
    pub b: f64,
    pub ab: f64,
    pub a_err: f64,
    pub b_err: f64,
    pub ab_err: f64,
}

/// Sums of squares from the cell-mean model, one explicit loop per term.
/// `y[i][j][k]` is subject `i` at level `j` of A and `k` of B.
pub fn cell_mean_ss(y: &[Vec<Vec<f64>>]) -> CellMeanSs {
    let n = y.len();
    let a = y[0].len();
    let b = y[0][0].len();
    let mut g = 0.0;
    let mut m_s = vec![0.0; n];
    let mut m_a = vec![0.0; a];
    let mut m_b = vec![0.0; b];
    let mut m_ab = vec![vec![0.0; b]; a];
    let mut m_as = vec![vec![0.0; a]; n];
    let mut m_bs = vec![vec![0.0; b]; n];
    for i in 0..n {
        for j in 0..a {
            for k in 0..b {
                let v = y[i][j][k];
                g += v / (n * a * b) as f64;
                m_s[i] += v / (a * b) as f64;
                m_a[j] += v / (n * b) as f64;
                m_b[k] += v / (n * a) as f64;
                m_ab[j][k] += v / n as f64;
                m_as[i][j] += v / b as f64;
                m_bs[i][k] += v / a as f64;
            }
        }
    }
    let mut ss = CellMeanSs {
        a: 0.0,
        b: 0.0,
        ab: 0.0,
        a_err: 0.0,
        b_err: 0.0,
        ab_err: 0.0,
    };
    for i in 0..n {
        for j in 0..a {
            for k in 0..b {
                let sq = |x: f64| x * x;
                ss.a += sq(m_a[j] - g);
                ss.b += sq(m_b[k] - g);
                ss.ab += sq(m_ab[j][k] - m_a[j] - m_b[k] + g);
                ss.a_err += sq(m_as[i][j] - m_a[j] - m_s[i] + g);
                ss.b_err += sq(m_bs[i][k] - m_b[k] - m_s[i] + g);
                ss.ab_err += sq(y[i][j][k] - m_ab[j][k] - m_as[i][j] - m_bs[i][k] + m_a[j] + m_b[k] + m_s[i] - g);
            }
        }
    }
    ss
}
