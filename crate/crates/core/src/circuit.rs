//! DMERA circuit data model and the regular (n, D, r, d, T) builder.
//!
//! Wires are identified by canonical final-lattice addresses; a scale-`s`
//! site `p` sits at `p * r^(n-s)`. The wire index of a canonical address
//! `(x, y)` is `y * L + x`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{DmeraError, Result};
use crate::payload::{Payload, PayloadSource, Unitary4};

/// Upper limit on `r^(d n)`; keeps dense per-wire bookkeeping bounded.
pub const MAX_SYSTEM_SIZE: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DmeraParams {
    pub n: u32,
    #[serde(rename = "D")]
    pub depth: u32,
    pub r: u32,
    pub d: u32,
    #[serde(rename = "T")]
    pub period: u32,
}

impl DmeraParams {
    pub fn new(n: u32, depth: u32, r: u32, d: u32, period: u32) -> Result<Self> {
        let p = DmeraParams {
            n,
            depth,
            r,
            d,
            period,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DmeraError::InvalidParams(m));
        if self.n < 1 {
            return bad("n must be at least 1".into());
        }
        if self.depth < 1 {
            return bad("D must be at least 1".into());
        }
        if self.r < 2 {
            return bad(format!("r must be at least 2, got {}", self.r));
        }
        if self.d != 1 && self.d != 2 {
            return bad(format!("d must be 1 or 2, got {}", self.d));
        }
        let side = (self.r as usize)
            .checked_pow(self.n)
            .filter(|l| l.checked_pow(self.d).is_some_and(|v| v <= MAX_SYSTEM_SIZE));
        let Some(side) = side else {
            return bad(format!(
                "system size r^(d n) exceeds the limit of {MAX_SYSTEM_SIZE} qubits"
            ));
        };
        if self.period < 1 {
            return bad("T must be at least 1".into());
        }
        let mut t = 1usize;
        while t < self.period as usize {
            t *= self.r as usize;
        }
        if t != self.period as usize {
            return bad(format!("T = {} is not a power of r = {}", self.period, self.r));
        }
        if t > side {
            return bad(format!("T = {} exceeds the linear size {side}", self.period));
        }
        Ok(())
    }

    /// L = r^n.
    pub fn linear_size(&self) -> usize {
        (self.r as usize).pow(self.n)
    }

    /// N = r^(d n).
    pub fn system_size(&self) -> usize {
        self.linear_size().pow(self.d)
    }

    /// Side of the scale-`s` lattice.
    pub fn side(&self, scale: u32) -> usize {
        (self.r as usize).pow(scale)
    }

    /// Distance in final-lattice units between neighbouring scale-`s` sites.
    pub fn spacing(&self, scale: u32) -> usize {
        (self.r as usize).pow(self.n - scale)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QubitCoord {
    pub scale: u32,
    pub pos: Vec<usize>,
}

impl QubitCoord {
    pub fn new(scale: u32, pos: &[usize]) -> Self {
        QubitCoord {
            scale,
            pos: pos.to_vec(),
        }
    }
}

impl fmt::Display for QubitCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}{:?}", self.scale, self.pos)
    }
}

/// Parameter-sharing key: scale, layer index and the canonical address of the
/// first support qubit reduced mod T on each axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassId {
    pub scale: u32,
    pub layer: u32,
    pub offset: [usize; 2],
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(scale {}, layer {}, offset {:?})",
            self.scale, self.layer, self.offset
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gate {
    pub id: usize,
    pub class_id: ClassId,
    pub support: [QubitCoord; 2],
    #[serde(skip)]
    pub wires: [usize; 2],
    #[serde(skip)]
    pub axis: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub scale: u32,
    pub layer_index: u32,
    pub axis: usize,
    pub parity: usize,
    /// Gate ids in emission order.
    pub gates: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub scale: u32,
    /// Fine-graining marker: qubits introduced in |0> at this scale.
    pub fresh: Vec<QubitCoord>,
    pub fresh_wires: Vec<usize>,
    pub layers: Vec<Layer>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub params: DmeraParams,
    pub blocks: Vec<Block>,
    gates: Vec<Gate>,
    payloads: BTreeMap<ClassId, Payload>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CircuitStats {
    pub depth: usize,
    pub final_qubit_count: usize,
    pub two_qubit_gate_count: usize,
}

impl Circuit {
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: usize) -> &Gate {
        &self.gates[id]
    }

    pub fn payload(&self, gate_id: usize) -> &Payload {
        &self.payloads[&self.gates[gate_id].class_id]
    }

    pub fn payloads(&self) -> &BTreeMap<ClassId, Payload> {
        &self.payloads
    }

    pub fn num_wires(&self) -> usize {
        self.params.system_size()
    }

    pub fn layers(&self) -> impl DoubleEndedIterator<Item = &Layer> {
        self.blocks.iter().flat_map(|b| b.layers.iter())
    }

    /// The unitary of a gate, if its payload is one.
    pub fn unitary(&self, gate_id: usize) -> Option<&Unitary4> {
        match self.gates.get(gate_id).map(|g| &self.payloads[&g.class_id]) {
            Some(Payload::Unitary(u)) => Some(u),
            _ => None,
        }
    }

    /// Canonical final-lattice coordinates of a wire (unused axes are 0).
    pub fn canonical(&self, wire: usize) -> [usize; 2] {
        let l = self.params.linear_size();
        [wire % l, wire / l]
    }

    pub fn wire_of(&self, q: &QubitCoord) -> Result<usize> {
        let p = &self.params;
        if q.scale < 1 || q.scale > p.n {
            return Err(DmeraError::InvalidSupport(format!("{q}: scale out of range")));
        }
        if q.pos.len() != p.d as usize {
            return Err(DmeraError::InvalidSupport(format!(
                "{q}: expected {} coordinates",
                p.d
            )));
        }
        let side = p.side(q.scale);
        if q.pos.iter().any(|&x| x >= side) {
            return Err(DmeraError::InvalidSupport(format!(
                "{q}: coordinate outside [0, {side})"
            )));
        }
        let sp = p.spacing(q.scale);
        let l = p.linear_size();
        let x = q.pos[0] * sp;
        let y = q.pos.get(1).map_or(0, |&y| y * sp);
        Ok(y * l + x)
    }

    /// Coordinate of a wire at the final scale.
    pub fn coord_at_top(&self, wire: usize) -> QubitCoord {
        let c = self.canonical(wire);
        QubitCoord::new(self.params.n, &c[..self.params.d as usize])
    }

    pub fn to_json(&self) -> Value {
        let blocks: Vec<Value> = self
            .blocks
            .iter()
            .map(|b| {
                let layers: Vec<Value> = b
                    .layers
                    .iter()
                    .map(|layer| {
                        let gates: Vec<Value> = layer
                            .gates
                            .iter()
                            .map(|&g| serde_json::to_value(&self.gates[g]).expect("gate json"))
                            .collect();
                        json!({"axis": layer.axis, "parity": layer.parity, "gates": gates})
                    })
                    .collect();
                json!({"scale": b.scale, "fresh": b.fresh, "layers": layers})
            })
            .collect();
        json!({"params": self.params, "blocks": blocks})
    }
}

fn coord_pos(d: u32, a: usize, b: usize, axis: usize) -> Vec<usize> {
    // a runs along the pairing axis, b along the other one
    match (d, axis) {
        (1, _) => vec![a],
        (_, 0) => vec![a, b],
        _ => vec![b, a],
    }
}

/// Sites paired by a brick-wall layer on a ring of `side` sites.
fn brick_pairs(side: usize, parity: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut a = parity;
    while a + 1 <= side {
        let b = a + 1;
        if b < side {
            out.push((a, b));
        } else if side % 2 == 0 && side >= 2 {
            out.push((a, 0));
        }
        a += 2;
    }
    out
}

pub fn build_dmera(params: DmeraParams, source: &mut dyn PayloadSource) -> Result<Circuit> {
    params.validate()?;
    let d = params.d;
    let r = params.r as usize;
    let t = params.period as usize;
    let l = params.linear_size();
    let mut gates = Vec::new();
    let mut blocks = Vec::with_capacity(params.n as usize);
    for s in 1..=params.n {
        let side = params.side(s);
        let sp = params.spacing(s);
        let lines = if d == 1 { 1 } else { side };
        let mut fresh = Vec::new();
        let mut fresh_wires = Vec::new();
        for y in 0..lines {
            for x in 0..side {
                let pos = if d == 1 { vec![x] } else { vec![x, y] };
                if s == 1 || pos.iter().any(|c| c % r != 0) {
                    fresh_wires.push(y * sp * l + x * sp);
                    fresh.push(QubitCoord { scale: s, pos });
                }
            }
        }
        let mut layers = Vec::with_capacity(params.depth as usize);
        for li in 0..params.depth {
            let axis = (li % d) as usize;
            let parity = ((li / d) % 2) as usize;
            let mut ids = Vec::new();
            for other in 0..lines {
                for (a, b) in brick_pairs(side, parity) {
                    let q0 = QubitCoord {
                        scale: s,
                        pos: coord_pos(d, a, other, axis),
                    };
                    let q1 = QubitCoord {
                        scale: s,
                        pos: coord_pos(d, b, other, axis),
                    };
                    let canon = |q: &QubitCoord| -> [usize; 2] {
                        [q.pos[0] * sp, q.pos.get(1).map_or(0, |v| v * sp)]
                    };
                    let c0 = canon(&q0);
                    let c1 = canon(&q1);
                    let id = gates.len();
                    gates.push(Gate {
                        id,
                        class_id: ClassId {
                            scale: s,
                            layer: li,
                            offset: [c0[0] % t, c0[1] % t],
                        },
                        wires: [c0[1] * l + c0[0], c1[1] * l + c1[0]],
                        support: [q0, q1],
                        axis,
                    });
                    ids.push(id);
                }
            }
            layers.push(Layer {
                scale: s,
                layer_index: li,
                axis,
                parity,
                gates: ids,
            });
        }
        blocks.push(Block {
            scale: s,
            fresh,
            fresh_wires,
            layers,
        });
    }
    let classes: BTreeSet<ClassId> = gates.iter().map(|g| g.class_id).collect();
    let mut payloads = BTreeMap::new();
    for c in classes {
        let p = source.payload_for(&c)?;
        payloads.insert(c, p);
    }
    Ok(Circuit {
        params,
        blocks,
        gates,
        payloads,
    })
}

pub fn circuit_stats(c: &Circuit) -> CircuitStats {
    CircuitStats {
        depth: c.layers().count(),
        final_qubit_count: c.num_wires(),
        two_qubit_gate_count: c.layers().map(|l| l.gates.len()).sum(),
    }
}
