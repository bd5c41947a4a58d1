//! Qubit-reuse compilation: layer sweep and minimum-cone peeling.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::circuit::Circuit;
use crate::pcc::ReducedCircuit;
use crate::physical::{LiveInterval, PhysicalCircuit, PhysicalInstruction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GateOp {
    pub id: usize,
    pub wires: [usize; 2],
}

/// Generic layered two-qubit circuit. Output wires are never reset.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LayeredCircuit {
    pub layers: Vec<Vec<GateOp>>,
    pub outputs: BTreeSet<usize>,
}

impl LayeredCircuit {
    pub fn from_circuit(c: &Circuit, outputs: &[usize]) -> Self {
        let layers = c
            .layers()
            .map(|l| {
                l.gates
                    .iter()
                    .map(|&g| GateOp {
                        id: g,
                        wires: c.gate(g).wires,
                    })
                    .collect()
            })
            .collect();
        LayeredCircuit {
            layers,
            outputs: outputs.iter().copied().collect(),
        }
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn wires(&self) -> BTreeSet<usize> {
        self.layers
            .iter()
            .flatten()
            .flat_map(|g| g.wires)
            .chain(self.outputs.iter().copied())
            .collect()
    }

    /// Identity placement: machine qubit = wire, no resets.
    pub fn embed(&self, num_wires: usize) -> PhysicalCircuit {
        let instructions = self
            .layers
            .iter()
            .flatten()
            .map(|g| PhysicalInstruction::ApplyGate {
                gate_id: g.id,
                qubits: g.wires,
            })
            .collect();
        PhysicalCircuit {
            machine_qubit_count: num_wires,
            instructions,
            ..Default::default()
        }
    }
}

impl ReducedCircuit<'_> {
    /// Kept gates, layer structure preserved, empty layers dropped.
    pub fn to_layered(&self) -> LayeredCircuit {
        let kept: BTreeSet<usize> = self.kept_gate_ids.iter().copied().collect();
        let c = self.source;
        let layers = c
            .layers()
            .map(|l| {
                l.gates
                    .iter()
                    .filter(|g| kept.contains(g))
                    .map(|&g| GateOp {
                        id: g,
                        wires: c.gate(g).wires,
                    })
                    .collect::<Vec<_>>()
            })
            .filter(|l| !l.is_empty())
            .collect();
        LayeredCircuit {
            layers,
            outputs: self.observable_wires.iter().copied().collect(),
        }
    }
}

struct Allocator {
    free: BTreeSet<usize>,
    high: usize,
    map: BTreeMap<usize, usize>,
    out: PhysicalCircuit,
}

impl Allocator {
    fn new() -> Self {
        Allocator {
            free: BTreeSet::new(),
            high: 0,
            map: BTreeMap::new(),
            out: PhysicalCircuit::default(),
        }
    }

    fn machine(&mut self, wire: usize) -> usize {
        if let Some(&m) = self.map.get(&wire) {
            return m;
        }
        let m = match self.free.pop_first() {
            Some(m) => m,
            None => {
                self.high += 1;
                self.high - 1
            }
        };
        self.map.insert(wire, m);
        self.out
            .assignment_log
            .entry(wire)
            .or_default()
            .push(LiveInterval {
                machine: m,
                start: self.out.instructions.len(),
                end: None,
            });
        m
    }

    fn apply(&mut self, g: &GateOp) {
        let qubits = [self.machine(g.wires[0]), self.machine(g.wires[1])];
        self.out
            .instructions
            .push(PhysicalInstruction::ApplyGate { gate_id: g.id, qubits });
    }

    fn reset(&mut self, wire: usize) {
        let m = self.map.remove(&wire).expect("reset of unassigned wire");
        let idx = self.out.instructions.len();
        self.out
            .instructions
            .push(PhysicalInstruction::Reset { qubit: m });
        if let Some(iv) = self.out.assignment_log.get_mut(&wire).and_then(|v| v.last_mut()) {
            iv.end = Some(idx);
        }
        self.free.insert(m);
    }

    fn finish(mut self, outputs: &BTreeSet<usize>) -> PhysicalCircuit {
        for &w in outputs {
            self.machine(w);
        }
        self.out.machine_qubit_count = self.high;
        self.out
    }
}

/// Layer-by-layer assignment; after each layer, wires with no future use are
/// reset and their machine qubits returned to the pool.
pub fn compile_layer_sweep(lc: &LayeredCircuit) -> PhysicalCircuit {
    let mut last = BTreeMap::new();
    for (i, layer) in lc.layers.iter().enumerate() {
        for g in layer {
            for w in g.wires {
                last.insert(w, i);
            }
        }
    }
    let mut alloc = Allocator::new();
    for (i, layer) in lc.layers.iter().enumerate() {
        for g in layer {
            alloc.apply(g);
        }
        let done: BTreeSet<usize> = layer
            .iter()
            .flat_map(|g| g.wires)
            .filter(|w| last[w] == i && !lc.outputs.contains(w))
            .collect();
        for w in done {
            alloc.reset(w);
        }
    }
    alloc.finish(&lc.outputs)
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn intersects(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).any(|(a, b)| a & b != 0)
    }
    fn subtract(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a &= !b;
        }
    }
    fn union(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= b;
        }
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }
}

/// Repeatedly emits the smallest remaining past causal cone (by qubit count,
/// ties to the lowest wire), resetting every wire that cone finishes.
pub fn compile_min_pcc_peel(lc: &LayeredCircuit) -> PhysicalCircuit {
    let gates: Vec<GateOp> = lc.layers.iter().flatten().copied().collect();
    let ng = gates.len();
    let wires: Vec<usize> = gates
        .iter()
        .flat_map(|g| g.wires)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let dense: BTreeMap<usize, usize> = wires.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let nq = wires.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); ng];
    let mut last_gate = vec![usize::MAX; nq];
    for (k, g) in gates.iter().enumerate() {
        for w in g.wires {
            let q = dense[&w];
            if last_gate[q] != usize::MAX {
                preds[k].push(last_gate[q]);
            }
            last_gate[q] = k;
        }
    }
    let mut removed = Bits::new(ng);
    // stamp-based qubit counting
    let mut stamp = vec![0usize; nq];
    let mut epoch = 0usize;
    let mut count_qubits = |set: &Bits, stamp: &mut Vec<usize>| -> usize {
        epoch += 1;
        let mut n = 0;
        for k in set.ones() {
            for w in gates[k].wires {
                let q = dense[&w];
                if stamp[q] != epoch {
                    stamp[q] = epoch;
                    n += 1;
                }
            }
        }
        n
    };
    let cone = |q: usize, removed: &Bits| -> Bits {
        let mut set = Bits::new(ng);
        let mut stack = vec![last_gate[q]];
        while let Some(k) = stack.pop() {
            if set.get(k) || removed.get(k) {
                continue;
            }
            set.set(k);
            stack.extend_from_slice(&preds[k]);
        }
        set
    };
    let mut cones: Vec<Bits> = (0..nq).map(|q| cone(q, &removed)).collect();
    let mut sizes: Vec<usize> = cones
        .iter()
        .map(|c| count_qubits(c, &mut stamp))
        .collect();
    let mut active: BTreeSet<usize> = (0..nq).collect();
    let mut alloc = Allocator::new();
    while let Some(&qmin) = active
        .iter()
        .min_by_key(|&&q| (sizes[q], wires[q]))
    {
        let peel = cones[qmin].clone();
        for k in peel.ones() {
            alloc.apply(&gates[k]);
        }
        removed.union(&peel);
        let finished: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&q| removed.get(last_gate[q]))
            .collect();
        for &q in &finished {
            active.remove(&q);
            if !lc.outputs.contains(&wires[q]) {
                alloc.reset(wires[q]);
            }
        }
        for &q in &active {
            if cones[q].intersects(&peel) {
                cones[q].subtract(&peel);
                sizes[q] = count_qubits(&cones[q], &mut stamp);
            }
        }
    }
    alloc.finish(&lc.outputs)
}

pub fn machine_qubit_count(pc: &PhysicalCircuit) -> usize {
    pc.machine_qubit_count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_dmera, DmeraParams, QubitCoord};
    use crate::payload::{CliffordTags, SeededUnitaries};
    use crate::pcc::extract_pcc;
    use crate::physical::{Pauli, PauliString};
    use crate::sim::{simulate_expectation, Observable, SimMode};
    use proptest::prelude::*;

    /// Checks the reuse invariants of a compiled stream and returns the peak
    /// number of simultaneously live wires.
    fn audit(pc: &PhysicalCircuit, source_gates: usize) -> usize {
        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        let mut peak = 0;
        let mut events: Vec<(usize, bool, usize, usize)> = Vec::new();
        for (&w, ivs) in &pc.assignment_log {
            for iv in ivs {
                events.push((iv.start, true, iv.machine, w));
                if let Some(e) = iv.end {
                    events.push((e, false, iv.machine, w));
                }
            }
        }
        events.sort_by_key(|e| (e.0, e.1));
        for (_, start, m, w) in events {
            if start {
                assert!(owner.insert(m, w).is_none(), "machine {m} shared");
                peak = peak.max(owner.len());
            } else {
                assert_eq!(owner.remove(&m), Some(w));
            }
        }
        assert_eq!(pc.gate_count(), source_gates);
        for ins in &pc.instructions {
            for q in ins.qubits() {
                assert!(q < pc.machine_qubit_count);
            }
        }
        peak
    }

    /// Interval colouring: peak number of wires alive across a layer index.
    fn interval_oracle(lc: &LayeredCircuit) -> usize {
        let mut span: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for (i, l) in lc.layers.iter().enumerate() {
            for g in l {
                for w in g.wires {
                    let e = span.entry(w).or_insert((i, i));
                    e.1 = i;
                }
            }
        }
        let end = lc.layers.len();
        for w in &lc.outputs {
            if let Some(e) = span.get_mut(w) {
                e.1 = end;
            }
        }
        (0..=end)
            .map(|i| span.values().filter(|(a, b)| *a <= i && i <= *b).count())
            .max()
            .unwrap_or(0)
    }

    fn chain() -> Circuit {
        build_dmera(DmeraParams::new(3, 1, 2, 1, 1).unwrap(), &mut CliffordTags).unwrap()
    }

    #[test]
    fn chain_cone_needs_two_qubits() {
        let c = chain();
        let rc = extract_pcc(&c, &[QubitCoord::new(3, &[0])]).unwrap();
        let lc = rc.to_layered();
        for pc in [compile_layer_sweep(&lc), compile_min_pcc_peel(&lc)] {
            assert_eq!(machine_qubit_count(&pc), 2);
            assert_eq!(pc.gate_count(), 3);
            assert!(pc.reset_count() >= 1);
            assert_eq!(audit(&pc, 3), 2);
        }
    }

    #[test]
    fn empty_circuit() {
        let lc = LayeredCircuit::default();
        for pc in [compile_layer_sweep(&lc), compile_min_pcc_peel(&lc)] {
            assert_eq!(pc.machine_qubit_count, 0);
            assert!(pc.instructions.is_empty());
        }
    }

    #[test]
    fn single_gate_algorithms_agree() {
        let mut lc = LayeredCircuit::default();
        lc.layers.push(vec![GateOp { id: 0, wires: [3, 5] }]);
        let a = compile_layer_sweep(&lc);
        let b = compile_min_pcc_peel(&lc);
        assert_eq!(a, b);
        assert_eq!(a.machine_qubit_count, 2);
    }

    #[test]
    fn layer_sweep_matches_interval_colouring() {
        for seed in 0..10u64 {
            let c = build_dmera(DmeraParams::new(4, 2, 2, 1, 1).unwrap(), &mut CliffordTags).unwrap();
            let x = (seed as usize * 5) % 16;
            let rc = extract_pcc(&c, &[QubitCoord::new(4, &[x]), QubitCoord::new(4, &[(x + 1) % 16])])
                .unwrap();
            let lc = rc.to_layered();
            let pc = compile_layer_sweep(&lc);
            assert_eq!(pc.machine_qubit_count, interval_oracle(&lc));
            assert_eq!(audit(&pc, lc.gate_count()), pc.machine_qubit_count);
        }
    }

    fn z_on(q: usize) -> Observable {
        Observable::pauli(PauliString::new(vec![(q, Pauli::Z)]))
    }

    #[test]
    fn full_chain_single_qubit_z_preserved() {
        let c = build_dmera(DmeraParams::new(3, 1, 2, 1, 1).unwrap(), &mut SeededUnitaries::new(4))
            .unwrap();
        let outputs: Vec<usize> = (0..8).collect();
        let lc = LayeredCircuit::from_circuit(&c, &outputs);
        let reference = lc.embed(8);
        for pc in [compile_layer_sweep(&lc), compile_min_pcc_peel(&lc)] {
            for w in 0..8 {
                let m = pc.final_machine(w).unwrap();
                let a = simulate_expectation(&reference, &c, &z_on(w), &SimMode::ExactBranchSum).unwrap();
                let b = simulate_expectation(&pc, &c, &z_on(m), &SimMode::ExactBranchSum).unwrap();
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn reuse_invariants(n in 2u32..=5, depth in 1u32..=4, d in 1u32..=2, x in 0usize..1024, y in 0usize..1024) {
            prop_assume!(d == 1 || n <= 4);
            let c = build_dmera(DmeraParams::new(n, depth, 2, d, 1).unwrap(), &mut CliffordTags).unwrap();
            let l = c.params.linear_size();
            let pos = if d == 1 { vec![x % l] } else { vec![x % l, y % l] };
            let rc = extract_pcc(&c, &[QubitCoord::new(n, &pos)]).unwrap();
            let lc = rc.to_layered();
            let a = compile_layer_sweep(&lc);
            let b = compile_min_pcc_peel(&lc);
            prop_assert_eq!(a.machine_qubit_count, audit(&a, lc.gate_count()));
            prop_assert_eq!(b.machine_qubit_count, audit(&b, lc.gate_count()));
            prop_assert_eq!(a.machine_qubit_count, interval_oracle(&lc));
        }
    }
}
