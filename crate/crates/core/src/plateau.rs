//! Random-Clifford template Monte Carlo for the gradient-variance bound.
//!
//! A template marks each wire I or V (some non-identity Pauli). Walking the
//! cone backwards, a gate with both inputs I stays I; otherwise its output
//! pattern is (I,V), (V,I) or (V,V) with probabilities 3/15, 3/15, 9/15.
//! V entries on a wire freeze into |K| when the walk crosses the scale at
//! which that wire was introduced.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{build_dmera, Circuit, DmeraParams, QubitCoord};
use crate::error::{DmeraError, Result};
use crate::payload::CliffordTags;
use crate::pcc::extract_pcc;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TemplateRecord {
    pub total_weight: u32,
    /// Frozen V count per scale, index `s - 1`.
    pub per_scale: Vec<u32>,
    pub seed: u64,
    pub observable_id: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientBoundEstimate {
    pub per_operator_means: Vec<f64>,
    pub grand_mean: f64,
    pub sigma: f64,
    pub sample_count: usize,
    pub operator_count: usize,
}

/// Cone of one observable in compact form, ready for repeated walks.
#[derive(Clone, Debug)]
pub struct TemplateWalker {
    seeds: [usize; 2],
    /// Per scale, outermost first: kept gates in reverse order, then the
    /// compact wires introduced at that scale.
    scales: Vec<(u32, Vec<[usize; 2]>, Vec<usize>)>,
    width: usize,
    n: u32,
}

fn check_pair(c: &Circuit, support: &[QubitCoord; 2]) -> Result<[usize; 2]> {
    let p = &c.params;
    let w0 = c.wire_of(&support[0])?;
    let w1 = c.wire_of(&support[1])?;
    if support.iter().any(|q| q.scale != p.n) {
        return Err(DmeraError::InvalidSupport("template seeds must be at the final scale".into()));
    }
    let l = p.linear_size();
    let a = c.canonical(w0);
    let b = c.canonical(w1);
    let dist = |x: usize, y: usize| {
        let t = x.abs_diff(y);
        t.min(l - t)
    };
    let total = dist(a[0], b[0]) + dist(a[1], b[1]);
    if total != 1 {
        return Err(DmeraError::InvalidSupport(format!(
            "{} and {} are not nearest neighbours",
            support[0], support[1]
        )));
    }
    Ok([w0, w1])
}

impl TemplateWalker {
    pub fn new(c: &Circuit, support: &[QubitCoord; 2]) -> Result<Self> {
        let wires = check_pair(c, support)?;
        let rc = extract_pcc(c, support)?;
        let mut compact = std::collections::BTreeMap::new();
        let idx = |w: usize, m: &mut std::collections::BTreeMap<usize, usize>| {
            let k = m.len();
            *m.entry(w).or_insert(k)
        };
        let seeds = [idx(wires[0], &mut compact), idx(wires[1], &mut compact)];
        let mut scales = Vec::new();
        for block in c.blocks.iter().rev() {
            let gates: Vec<[usize; 2]> = rc.kept_by_scale[&block.scale]
                .iter()
                .rev()
                .map(|&g| {
                    let w = c.gate(g).wires;
                    [idx(w[0], &mut compact), idx(w[1], &mut compact)]
                })
                .collect();
            scales.push((block.scale, gates, Vec::new()));
        }
        for (scale, _, fresh) in scales.iter_mut() {
            let block = &c.blocks[*scale as usize - 1];
            fresh.extend(block.fresh_wires.iter().filter_map(|w| compact.get(w).copied()));
        }
        Ok(TemplateWalker {
            seeds,
            scales,
            width: compact.len(),
            n: c.params.n,
        })
    }

    pub fn gate_count(&self) -> usize {
        self.scales.iter().map(|s| s.1.len()).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, seed: u64, observable_id: u32) -> TemplateRecord {
        let mut v = vec![false; self.width];
        v[self.seeds[0]] = true;
        v[self.seeds[1]] = true;
        let mut per_scale = vec![0u32; self.n as usize];
        for (scale, gates, fresh) in &self.scales {
            for &[a, b] in gates {
                if !(v[a] || v[b]) {
                    continue;
                }
                let u = rng.random_range(0..15u32);
                (v[a], v[b]) = match u {
                    0..=2 => (false, true),
                    3..=5 => (true, false),
                    _ => (true, true),
                };
            }
            for &f in fresh {
                if v[f] {
                    per_scale[*scale as usize - 1] += 1;
                    v[f] = false;
                }
            }
        }
        TemplateRecord {
            total_weight: per_scale.iter().sum(),
            per_scale,
            seed,
            observable_id,
        }
    }
}

pub fn propagate_template<R: Rng + ?Sized>(
    c: &Circuit,
    support: &[QubitCoord; 2],
    rng: &mut R,
) -> Result<TemplateRecord> {
    Ok(TemplateWalker::new(c, support)?.sample(rng, 0, 0))
}

pub fn estimate_gradient_upper_bound(records: &[TemplateRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(DmeraError::InvalidArgument("no template records".into()));
    }
    Ok(records
        .iter()
        .map(|r| 3f64.powi(-(r.total_weight as i32)))
        .sum::<f64>()
        / records.len() as f64)
}

/// Dirichlet(1, ..., 1)-weighted means; returns their mean and standard deviation.
pub fn bayesian_bootstrap<R: Rng + ?Sized>(
    values: &[f64],
    resamples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(DmeraError::InvalidArgument("bootstrap of an empty list".into()));
    }
    if resamples == 0 {
        return Err(DmeraError::InvalidArgument("resamples must be at least 1".into()));
    }
    let mut means = Vec::with_capacity(resamples);
    let mut w = vec![0.0; values.len()];
    for _ in 0..resamples {
        for x in w.iter_mut() {
            *x = rng.sample::<f64, _>(Exp1);
        }
        let total: f64 = w.iter().sum();
        means.push(w.iter().zip(values).map(|(a, b)| a * b).sum::<f64>() / total);
    }
    let mean = means.iter().sum::<f64>() / resamples as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / resamples as f64;
    Ok((mean, var.sqrt()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub ns: Vec<u32>,
    pub depths: Vec<u32>,
    pub d: u32,
    pub r: u32,
    pub operators: usize,
    pub samples: usize,
    pub seed: u64,
    pub bootstrap_resamples: usize,
}

/// One CSV row: statistics of one operator at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorRow {
    pub n: u32,
    #[serde(rename = "D")]
    pub depth: u32,
    pub operator_id: u32,
    pub samples: usize,
    #[serde(rename = "mean_K")]
    pub mean_k: f64,
    pub estimate: f64,
    /// Standard error of `estimate`.
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub n: u32,
    #[serde(rename = "D")]
    pub depth: u32,
    pub mean_k: f64,
    pub rows: Vec<OperatorRow>,
    pub estimate: GradientBoundEstimate,
}

fn stream(seed: u64, n: u32, depth: u32, lane: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 48) | ((depth as u64) << 32) | lane as u64);
    rng
}

const SUPPORT_LANE: u32 = u32::MAX;
const BOOTSTRAP_LANE: u32 = u32::MAX - 1;

/// Nearest-neighbour pairs drawn uniformly with replacement.
pub fn sample_supports<R: Rng + ?Sized>(p: &DmeraParams, count: usize, rng: &mut R) -> Vec<[QubitCoord; 2]> {
    let l = p.linear_size();
    (0..count)
        .map(|_| {
            let pos: Vec<usize> = (0..p.d).map(|_| rng.random_range(0..l)).collect();
            let axis = rng.random_range(0..p.d as usize);
            let mut other = pos.clone();
            other[axis] = (other[axis] + 1) % l;
            [QubitCoord { scale: p.n, pos }, QubitCoord { scale: p.n, pos: other }]
        })
        .collect()
}

/// Template statistics over the (n, D) grid. Every (grid point, operator)
/// pair owns its RNG stream, so output does not depend on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<GridPoint>> {
    if cfg.operators == 0 || cfg.samples == 0 {
        return Err(DmeraError::InvalidArgument("operators and samples must be positive".into()));
    }
    let mut points = Vec::new();
    for &n in &cfg.ns {
        for &depth in &cfg.depths {
            let p = DmeraParams::new(n, depth, cfg.r, cfg.d, 1)?;
            let c = build_dmera(p, &mut CliffordTags)?;
            let supports = sample_supports(&p, cfg.operators, &mut stream(cfg.seed, n, depth, SUPPORT_LANE));
            let walkers = supports
                .iter()
                .map(|s| TemplateWalker::new(&c, s))
                .collect::<Result<Vec<_>>>()?;
            let rows: Vec<OperatorRow> = walkers
                .par_iter()
                .enumerate()
                .map(|(j, walker)| {
                    let mut rng = stream(cfg.seed, n, depth, j as u32);
                    let (mut s1, mut s2, mut sk) = (0.0, 0.0, 0.0);
                    for _ in 0..cfg.samples {
                        let rec = walker.sample(&mut rng, cfg.seed, j as u32);
                        let x = 3f64.powi(-(rec.total_weight as i32));
                        s1 += x;
                        s2 += x * x;
                        sk += rec.total_weight as f64;
                    }
                    let m = cfg.samples as f64;
                    let mean = s1 / m;
                    let var = (s2 / m - mean * mean).max(0.0);
                    OperatorRow {
                        n,
                        depth,
                        operator_id: j as u32,
                        samples: cfg.samples,
                        mean_k: sk / m,
                        estimate: mean,
                        sigma: (var / m).sqrt(),
                    }
                })
                .collect();
            let means: Vec<f64> = rows.iter().map(|r| r.estimate).collect();
            let (_, sigma) = bayesian_bootstrap(
                &means,
                cfg.bootstrap_resamples.max(1),
                &mut stream(cfg.seed, n, depth, BOOTSTRAP_LANE),
            )?;
            let grand = means.iter().sum::<f64>() / means.len() as f64;
            points.push(GridPoint {
                n,
                depth,
                mean_k: rows.iter().map(|r| r.mean_k).sum::<f64>() / rows.len() as f64,
                rows,
                estimate: GradientBoundEstimate {
                    per_operator_means: means,
                    grand_mean: grand,
                    sigma,
                    sample_count: cfg.samples,
                    operator_count: cfg.operators,
                },
            });
        }
    }
    Ok(points)
}

/// Least-squares fit y = a x1 + b x2 + c.
pub fn fit_plane(points: &[(f64, f64, f64)]) -> Result<[f64; 3]> {
    if points.len() < 3 {
        return Err(DmeraError::InvalidArgument("need at least three points".into()));
    }
    let mut m = [[0.0f64; 4]; 3];
    for &(x1, x2, y) in points {
        let row = [x1, x2, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            m[i][3] += row[i] * y;
        }
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("non-empty range");
        if m[piv][col].abs() < 1e-12 {
            return Err(DmeraError::InvalidArgument("degenerate design".into()));
        }
        m.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Ok([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Coefficient of determination of the ordinary least-squares line.
pub fn r_squared(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy * sxy / (sxx * syy)
}
