//! Boundary random-walk model of the causal-cone width.
//!
//! Each boundary of the cone moves by -1, 0, +1 with probabilities 1/5, 1/5,
//! 3/5 per round; the width step is the sum of two independent boundaries.
//! After `D` rounds the width is divided by `r` (coarse-graining). Width never
//! drops below 2.

use rand::Rng;
use serde::Serialize;

/// Width step and its probability in 25ths.
pub const STEP_WEIGHTS: [(i32, u32); 5] = [(-2, 1), (-1, 2), (0, 7), (1, 6), (2, 9)];
pub const FLOOR: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkMode {
    Analytic,
    MonteCarlo { trajectories: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkTrace {
    /// Mean width after the D rounds of each scale, before coarse-graining.
    pub peak_by_scale: Vec<f64>,
    /// Mean width after dividing by r.
    pub coarse_by_scale: Vec<f64>,
    /// Fixed point 0.8 D r / (r - 1).
    pub steady_width: f64,
}

pub fn mean_step() -> f64 {
    STEP_WEIGHTS
        .iter()
        .map(|&(s, w)| s as f64 * w as f64)
        .sum::<f64>()
        / 25.0
}

pub fn sample_step<R: Rng + ?Sized>(rng: &mut R) -> i32 {
    let mut u = rng.random_range(0..25u32);
    for &(s, w) in &STEP_WEIGHTS {
        if u < w {
            return s;
        }
        u -= w;
    }
    unreachable!("weights sum to 25")
}

pub fn random_walk_width<R: Rng + ?Sized>(
    depth: u32,
    r: u32,
    scales: u32,
    mode: WalkMode,
    rng: &mut R,
) -> WalkTrace {
    let rf = r as f64;
    let steady_width = mean_step() * depth as f64 * rf / (rf - 1.0);
    let mut peak = vec![0.0; scales as usize];
    let mut coarse = vec![0.0; scales as usize];
    match mode {
        WalkMode::Analytic => {
            let mut w = FLOOR;
            for s in 0..scales as usize {
                w += mean_step() * depth as f64;
                peak[s] = w;
                w = (w / rf).max(FLOOR);
                coarse[s] = w;
            }
        }
        WalkMode::MonteCarlo { trajectories } => {
            for _ in 0..trajectories {
                let mut w = FLOOR;
                for s in 0..scales as usize {
                    for _ in 0..depth {
                        w = (w + sample_step(rng) as f64).max(FLOOR);
                    }
                    peak[s] += w;
                    w = (w / rf).max(FLOOR);
                    coarse[s] += w;
                }
            }
            let t = trajectories.max(1) as f64;
            peak.iter_mut().chain(coarse.iter_mut()).for_each(|x| *x /= t);
        }
    }
    WalkTrace {
        peak_by_scale: peak,
        coarse_by_scale: coarse,
        steady_width,
    }
}
