//! Past causal cones: backward reachability from a local observable.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::{json, Value};

use crate::circuit::{Circuit, ClassId, QubitCoord};
use crate::error::{DmeraError, Result};

/// Active wires after one backward step: after a layer (`layer = Some`) or
/// after crossing the fine-graining marker of `scale` (`layer = None`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepStep {
    pub scale: u32,
    pub layer: Option<u32>,
    pub active: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ReducedCircuit<'c> {
    pub source: &'c Circuit,
    pub observable_support: Vec<QubitCoord>,
    pub observable_wires: Vec<usize>,
    /// Ascending, i.e. original circuit order.
    pub kept_gate_ids: Vec<usize>,
    pub kept_by_scale: BTreeMap<u32, Vec<usize>>,
    pub active_sets: Vec<SweepStep>,
    /// Largest active set while sweeping each scale, including the set that
    /// enters the scale from above.
    pub width_profile: BTreeMap<u32, usize>,
}

impl ReducedCircuit<'_> {
    pub fn gate_count(&self) -> usize {
        self.kept_gate_ids.len()
    }

    pub fn max_width(&self) -> usize {
        self.width_profile.values().copied().max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        let kept: BTreeSet<usize> = self.kept_gate_ids.iter().copied().collect();
        let c = self.source;
        let blocks: Vec<Value> = c
            .blocks
            .iter()
            .map(|b| {
                let layers: Vec<Value> = b
                    .layers
                    .iter()
                    .map(|layer| {
                        let gates: Vec<&crate::circuit::Gate> = layer
                            .gates
                            .iter()
                            .filter(|g| kept.contains(g))
                            .map(|&g| c.gate(g))
                            .collect();
                        json!({"axis": layer.axis, "parity": layer.parity, "gates": gates})
                    })
                    .collect();
                json!({"scale": b.scale, "fresh": b.fresh, "layers": layers})
            })
            .collect();
        let profile: BTreeMap<String, usize> = self
            .width_profile
            .iter()
            .map(|(s, w)| (s.to_string(), *w))
            .collect();
        json!({
            "params": c.params,
            "observable_support": self.observable_support,
            "blocks": blocks,
            "width_profile": profile,
        })
    }
}

fn support_wires(c: &Circuit, support: &[QubitCoord]) -> Result<Vec<usize>> {
    if support.is_empty() {
        return Err(DmeraError::InvalidSupport("empty support".into()));
    }
    let mut wires = Vec::with_capacity(support.len());
    for q in support {
        if q.scale != c.params.n {
            return Err(DmeraError::InvalidSupport(format!(
                "{q} is not at the final scale {}",
                c.params.n
            )));
        }
        wires.push(c.wire_of(q)?);
    }
    Ok(wires)
}

pub fn extract_pcc<'c>(c: &'c Circuit, support: &[QubitCoord]) -> Result<ReducedCircuit<'c>> {
    let wires = support_wires(c, support)?;
    let mut active = vec![false; c.num_wires()];
    let mut count = 0usize;
    for &w in &wires {
        if !active[w] {
            active[w] = true;
            count += 1;
        }
    }
    let snapshot = |active: &[bool]| -> Vec<usize> {
        active
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(w, _)| w)
            .collect()
    };
    let mut kept = Vec::new();
    let mut kept_by_scale = BTreeMap::new();
    let mut steps = Vec::new();
    let mut profile = BTreeMap::new();
    for block in c.blocks.iter().rev() {
        let mut w = count;
        let mut here = Vec::new();
        for layer in block.layers.iter().rev() {
            for &g in layer.gates.iter().rev() {
                let gw = c.gate(g).wires;
                if active[gw[0]] || active[gw[1]] {
                    here.push(g);
                    for x in gw {
                        if !active[x] {
                            active[x] = true;
                            count += 1;
                        }
                    }
                }
            }
            w = w.max(count);
            steps.push(SweepStep {
                scale: block.scale,
                layer: Some(layer.layer_index),
                active: snapshot(&active),
            });
        }
        profile.insert(block.scale, w);
        for &f in &block.fresh_wires {
            if active[f] {
                active[f] = false;
                count -= 1;
            }
        }
        steps.push(SweepStep {
            scale: block.scale,
            layer: None,
            active: snapshot(&active),
        });
        here.reverse();
        kept.extend_from_slice(&here);
        kept_by_scale.insert(block.scale, here);
    }
    kept.sort_unstable();
    Ok(ReducedCircuit {
        source: c,
        observable_support: support.to_vec(),
        observable_wires: wires,
        kept_gate_ids: kept,
        kept_by_scale,
        active_sets: steps,
        width_profile: profile,
    })
}

pub fn width_profile(rc: &ReducedCircuit<'_>) -> (BTreeMap<u32, usize>, usize) {
    (rc.width_profile.clone(), rc.max_width())
}

/// (D r / (r - 1))^d.
pub fn predicted_width_bound(depth: u32, r: u32, d: u32) -> f64 {
    (depth as f64 * r as f64 / (r as f64 - 1.0)).powi(d as i32)
}

type GateKey = (ClassId, [usize; 2]);

fn keyed(c: &Circuit, ids: &[usize], shift: [usize; 2]) -> BTreeSet<GateKey> {
    let l = c.params.linear_size();
    ids.iter()
        .map(|&g| {
            let gate = c.gate(g);
            let mut ws = gate.wires.map(|w| {
                let xy = c.canonical(w);
                let x = (xy[0] + shift[0]) % l;
                let y = (xy[1] + shift[1]) % l;
                y * l + x
            });
            ws.sort_unstable();
            (gate.class_id, ws)
        })
        .collect()
}

/// Whether the cone of the translated support is, scale by scale, the
/// translate of the original cone (gates compared by class and support).
pub fn check_shift_equivalence(c: &Circuit, support: &[QubitCoord], shift: &[i64]) -> Result<bool> {
    let p = &c.params;
    if shift.len() != p.d as usize {
        return Err(DmeraError::InvalidArgument(format!(
            "shift has {} components, expected {}",
            shift.len(),
            p.d
        )));
    }
    let t = p.period as i64;
    if let Some(s) = shift.iter().find(|&&s| s % t != 0) {
        return Err(DmeraError::InvalidArgument(format!(
            "shift component {s} is not a multiple of T = {t}"
        )));
    }
    let l = p.linear_size() as i64;
    let mut sh = [0usize; 2];
    for (a, &s) in shift.iter().enumerate() {
        sh[a] = s.rem_euclid(l) as usize;
    }
    let base = extract_pcc(c, support)?;
    let moved: Vec<QubitCoord> = base
        .observable_wires
        .iter()
        .map(|&w| {
            let xy = c.canonical(w);
            let pos: Vec<usize> = (0..p.d as usize)
                .map(|a| (xy[a] + sh[a]) % p.linear_size())
                .collect();
            QubitCoord { scale: p.n, pos }
        })
        .collect();
    let other = extract_pcc(c, &moved)?;
    for s in 1..=p.n {
        let a = keyed(c, &base.kept_by_scale[&s], sh);
        let b = keyed(c, &other.kept_by_scale[&s], [0, 0]);
        if a != b {
            return Ok(false);
        }
    }
    Ok(true)
}
