//! Coherent shift-averaged sampling: controlled cyclic shifts (cShift) and the
//! reset-free state-preparation unitary built from them.
//!
//! Scale `s` carries `d` registers holding c uniform over {0..T-1}. After the
//! cone gates of scale `s`, content at site p + v moves to p, with
//! v = c (scale n) or v = (T / r) c (coarser scales), in scale-`s` sites.
//! The total translation x = c_n + T * sum_s c_s r^(n-1-s) is uniform on
//! Z_L, so the output at the representative pair is the lattice average of
//! the local reduced state.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::{json, Value};

use crate::circuit::Circuit;
use crate::error::{DmeraError, Result};
use crate::physical::{PhysicalCircuit, PhysicalInstruction};

/// ceil(log2 t), zero for t <= 1.
pub fn ceil_log2(t: usize) -> usize {
    let mut b = 0;
    while (1usize << b) < t {
        b += 1;
    }
    b
}

fn cswap(out: &mut Vec<PhysicalInstruction>, c: usize, a: usize, b: usize) {
    out.push(PhysicalInstruction::Cnot { control: b, target: a });
    out.push(PhysicalInstruction::Toffoli { controls: [c, a], target: b });
    out.push(PhysicalInstruction::Cnot { control: b, target: a });
}

/// Cycles of i -> (i + k) mod len, length >= 2 only.
fn shift_cycles(len: usize, k: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; len];
    let mut cycles = Vec::new();
    for start in 0..len {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut i = start;
        loop {
            seen[i] = true;
            cyc.push(i);
            i = (i + k) % len;
            if i == start {
                break;
            }
        }
        if cyc.len() > 1 {
            cycles.push(cyc);
        }
    }
    cycles
}

/// Controlled σ_k on `wires`: when `control` is 1, the content of
/// `wires[i]` moves to `wires[(i + k) mod len]`. Returns the Toffoli count.
fn controlled_shift(out: &mut Vec<PhysicalInstruction>, wires: &[usize], control: usize, k: usize) -> usize {
    let mut toffoli = 0;
    for cyc in shift_cycles(wires.len(), k % wires.len()) {
        for &j in &cyc[1..] {
            cswap(out, control, wires[cyc[0]], wires[j]);
            toffoli += 1;
        }
    }
    toffoli
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CShiftBlock {
    pub instructions: Vec<PhysicalInstruction>,
    /// Data wires; for the grid form, wire (x, y) is `y * ell + x`.
    pub wires: Vec<usize>,
    /// Control registers, least significant bit first; x register then y.
    pub controls: Vec<Vec<usize>>,
    pub toffoli: usize,
    pub cnot: usize,
}

impl CShiftBlock {
    pub fn t_gates(&self) -> usize {
        8 * self.toffoli
    }

    pub fn qubit_count(&self) -> usize {
        self.wires.len() + self.controls.iter().map(Vec::len).sum::<usize>()
    }
}

fn check_shift_args(ell: usize, period: usize) -> Result<()> {
    if ell < 2 {
        return Err(DmeraError::InvalidArgument(format!("cShift needs ell >= 2, got {ell}")));
    }
    if period < 1 {
        return Err(DmeraError::InvalidArgument("T must be at least 1".into()));
    }
    Ok(())
}

/// One-dimensional cShift on wires 0..ell controlled by wires ell.. .
pub fn build_cshift(ell: usize, period: usize) -> Result<CShiftBlock> {
    check_shift_args(ell, period)?;
    let bits = ceil_log2(period);
    let wires: Vec<usize> = (0..ell).collect();
    let reg: Vec<usize> = (ell..ell + bits).collect();
    let mut out = Vec::new();
    let mut toffoli = 0;
    for (b, &c) in reg.iter().enumerate() {
        toffoli += controlled_shift(&mut out, &wires, c, (1usize << b) % ell);
    }
    Ok(CShiftBlock { instructions: out, wires, controls: vec![reg], toffoli, cnot: 2 * toffoli })
}

/// Two-dimensional cShift on an ell x ell block: row shifts by the x
/// register, then column shifts by the y register.
pub fn build_cshift_grid(ell: usize, period: usize) -> Result<CShiftBlock> {
    check_shift_args(ell, period)?;
    let bits = ceil_log2(period);
    let n = ell * ell;
    let wires: Vec<usize> = (0..n).collect();
    let rx: Vec<usize> = (n..n + bits).collect();
    let ry: Vec<usize> = (n + bits..n + 2 * bits).collect();
    let mut out = Vec::new();
    let mut toffoli = 0;
    for (b, &c) in rx.iter().enumerate() {
        for y in 0..ell {
            let row: Vec<usize> = (0..ell).map(|x| y * ell + x).collect();
            toffoli += controlled_shift(&mut out, &row, c, (1usize << b) % ell);
        }
    }
    for (b, &c) in ry.iter().enumerate() {
        for x in 0..ell {
            let col: Vec<usize> = (0..ell).map(|y| y * ell + x).collect();
            toffoli += controlled_shift(&mut out, &col, c, (1usize << b) % ell);
        }
    }
    Ok(CShiftBlock { instructions: out, wires, controls: vec![rx, ry], toffoli, cnot: 2 * toffoli })
}

/// Uniform superposition over {0..values-1} on a little-endian register, by
/// a tree of (multi-)controlled Ry rotations, most significant bit first.
pub fn uniform_prep(qubits: &[usize], values: usize) -> Vec<PhysicalInstruction> {
    let bits = qubits.len();
    let mut out = Vec::new();
    for j in (0..bits).rev() {
        let block = 1usize << (j + 1);
        let half = 1usize << j;
        let mut angles = Vec::new();
        for h in 0..(1usize << (bits - j - 1)) {
            let base = h * block;
            let c0 = values.saturating_sub(base).min(half);
            let c1 = values.saturating_sub(base + half).min(half);
            if c0 + c1 == 0 {
                continue;
            }
            let p1 = c1 as f64 / (c0 + c1) as f64;
            angles.push((h, 2.0 * p1.sqrt().asin()));
        }
        let uniform = angles.windows(2).all(|w| w[0].1 == w[1].1);
        if uniform {
            if let Some(&(_, a)) = angles.first() {
                if a != 0.0 {
                    out.push(PhysicalInstruction::ControlledRy { controls: vec![], target: qubits[j], angle: a });
                }
            }
            continue;
        }
        for (h, a) in angles {
            if a == 0.0 {
                continue;
            }
            let controls = (0..bits - j - 1)
                .map(|k| (qubits[j + 1 + k], (h >> k) & 1 == 1))
                .collect();
            out.push(PhysicalInstruction::ControlledRy { controls, target: qubits[j], angle: a });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftRegister {
    pub scale: u32,
    pub axis: usize,
    pub qubits: Vec<usize>,
    /// Shift per register unit, in scale-`s` sites.
    pub unit: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrepMarker {
    pub qubits: Vec<usize>,
    pub values: usize,
}

/// Sites permuted by a scale's shift: an arc per axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleWindow {
    pub scale: u32,
    pub origin: [usize; 2],
    pub len: [usize; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherentCircuit {
    pub base: PhysicalCircuit,
    pub shift_registers: Vec<ShiftRegister>,
    pub prep_markers: Vec<PrepMarker>,
    pub observable_support: [usize; 2],
    pub windows: Vec<ScaleWindow>,
    pub data_qubits: usize,
    pub ancilla_qubits: usize,
    pub cone_gates: usize,
    pub toffoli: usize,
    pub cnot: usize,
}

impl CoherentCircuit {
    /// Largest window side over scales and axes.
    pub fn ell(&self) -> usize {
        self.windows
            .iter()
            .flat_map(|w| w.len)
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.base.to_json();
        v["shift_registers"] = json!(self.shift_registers);
        v["prep_markers"] = json!(self.prep_markers);
        v["observable_support"] = json!(self.observable_support);
        v["windows"] = json!(self.windows);
        v
    }
}

/// Shortest arc of a ring of `side` sites covering `coords`: (origin, len).
fn covering_arc(coords: &BTreeSet<usize>, side: usize) -> (usize, usize) {
    let pts: Vec<usize> = coords.iter().copied().collect();
    if pts.is_empty() {
        return (0, 0);
    }
    let mut best_gap = 0;
    let mut origin = pts[0];
    for (i, &p) in pts.iter().enumerate() {
        let next = if i + 1 < pts.len() { pts[i + 1] } else { pts[0] + side };
        let gap = next - p;
        if gap > best_gap {
            best_gap = gap;
            origin = next % side;
        }
    }
    (origin, side - best_gap + 1)
}

type Site = [usize; 2];

/// Scale-by-scale plan computed by the backward pass.
struct ScalePlan {
    kept: Vec<usize>,
    window: ScaleWindow,
    /// Shift amounts per axis (scale-`s` sites), register unit already applied.
    unit: usize,
    full: [bool; 2],
}

pub fn build_coherent_sampler(c: &Circuit, axis: usize) -> Result<CoherentCircuit> {
    let p = c.params;
    let d = p.d as usize;
    if axis >= d {
        return Err(DmeraError::InvalidArgument(format!("axis {axis} out of range for d = {d}")));
    }
    let t = p.period as usize;
    let r = p.r as usize;
    if t >= 2 && r % 2 == 1 {
        return Err(DmeraError::InvalidArgument(
            "shift averaging needs an even r so shifted brick layers keep their parity".into(),
        ));
    }
    let bits = ceil_log2(t);
    let shifting = t >= 2;
    let mut rep: Site = [0, 0];
    let mut need: BTreeSet<Site> = BTreeSet::new();
    need.insert(rep);
    rep[axis] = 1;
    need.insert(rep);

    let mut plans: BTreeMap<u32, ScalePlan> = BTreeMap::new();
    for s in (1..=p.n).rev() {
        let side = p.side(s);
        let unit = if s == p.n { 1 } else { t / r };
        let mut window = ScaleWindow { scale: s, origin: [0, 0], len: [1, 1] };
        let mut full = [false, false];
        if shifting {
            let vmax = unit * (t - 1);
            // undo the last pass (y in 2D) first
            for ax in (0..d).rev() {
                let after = need.clone();
                for &q in &after {
                    for k in 0..t {
                        let mut m = q;
                        m[ax] = (m[ax] + unit * k) % side;
                        need.insert(m);
                    }
                }
                let coords: BTreeSet<usize> = need.iter().map(|q| q[ax]).collect();
                let (origin, len) = covering_arc(&coords, side);
                let fits = len < side
                    && after.iter().all(|q| (q[ax] + side - origin) % side + vmax < len);
                if fits {
                    window.origin[ax] = origin;
                    window.len[ax] = len;
                } else {
                    window.origin[ax] = 0;
                    window.len[ax] = side;
                    full[ax] = true;
                }
            }
        }
        let mut kept = Vec::new();
        let block = &c.blocks[s as usize - 1];
        for layer in block.layers.iter().rev() {
            for &g in layer.gates.iter().rev() {
                let gate = c.gate(g);
                let sites: [Site; 2] = [0, 1].map(|i| {
                    let pos = &gate.support[i].pos;
                    [pos[0], pos.get(1).copied().unwrap_or(0)]
                });
                if sites.iter().any(|q| need.contains(q)) {
                    kept.push(g);
                    need.extend(sites);
                }
            }
        }
        kept.reverse();
        plans.insert(s, ScalePlan { kept, window, unit, full });
        need = need
            .iter()
            .filter(|q| q[0] % r == 0 && q[1] % r == 0)
            .map(|q| [q[0] / r, q[1] / r])
            .collect();
    }

    // forward emission; ancillas are numbered after the data qubits
    const ANC: usize = 1 << 40;
    let l = p.linear_size();
    let mut data: BTreeMap<usize, usize> = BTreeMap::new();
    let dq = |wire: usize, data: &mut BTreeMap<usize, usize>| -> usize {
        let k = data.len();
        *data.entry(wire).or_insert(k)
    };
    let mut out = Vec::new();
    let mut registers = Vec::new();
    let mut preps = Vec::new();
    if shifting {
        for s in 1..=p.n {
            for ax in 0..d {
                let k = registers.len();
                let qubits: Vec<usize> = (0..bits).map(|b| ANC + k * bits + b).collect();
                out.extend(uniform_prep(&qubits, t));
                preps.push(PrepMarker { qubits: qubits.clone(), values: t });
                registers.push(ShiftRegister { scale: s, axis: ax, qubits, unit: plans[&s].unit });
            }
        }
    }
    let mut toffoli = 0;
    let mut cone_gates = 0;
    for s in 1..=p.n {
        let plan = &plans[&s];
        let sp = p.spacing(s);
        let side = p.side(s);
        for &g in &plan.kept {
            let w = c.gate(g).wires;
            let qubits = [dq(w[0], &mut data), dq(w[1], &mut data)];
            out.push(PhysicalInstruction::ApplyGate { gate_id: g, qubits });
            cone_gates += 1;
        }
        if !shifting {
            continue;
        }
        let win = &plan.window;
        let site_wire = |x: usize, y: usize| y * sp * l + x * sp;
        for ax in 0..d {
            let reg = registers
                .iter()
                .find(|rg| rg.scale == s && rg.axis == ax)
                .expect("register per scale and axis")
                .qubits
                .clone();
            let other = 1 - ax;
            let len = win.len[ax];
            let lines: Vec<usize> = (0..win.len[other]).map(|i| (win.origin[other] + i) % side).collect();
            for line in lines {
                let wires: Vec<usize> = (0..len)
                    .map(|i| {
                        let a = (win.origin[ax] + i) % side;
                        let (x, y) = if ax == 0 { (a, line) } else { (line, a) };
                        dq(site_wire(x, y), &mut data)
                    })
                    .collect();
                for (b, &ctrl) in reg.iter().enumerate() {
                    let v = plan.unit * (1usize << b);
                    let v = if plan.full[ax] { v % side } else { v };
                    // content at i + v moves to i
                    let k = (len - v % len) % len;
                    toffoli += controlled_shift(&mut out, &wires, ctrl, k);
                }
            }
        }
    }
    let data_qubits = data.len();
    let ancilla_qubits = registers.len() * bits;
    let remap = |q: usize| if q >= ANC { data_qubits + (q - ANC) } else { q };
    let instructions: Vec<PhysicalInstruction> = out.iter().map(|i| i.map_qubits(remap)).collect();
    for rg in registers.iter_mut() {
        rg.qubits = rg.qubits.iter().map(|&q| remap(q)).collect();
    }
    for pm in preps.iter_mut() {
        pm.qubits = pm.qubits.iter().map(|&q| remap(q)).collect();
    }
    let mut rep_wires = [0usize, 0];
    rep_wires[1] = if axis == 0 { 1 } else { l };
    let observable_support = rep_wires.map(|w| dq(w, &mut data));
    let data_qubits = data.len();
    let windows = plans.values().map(|pl| pl.window.clone()).collect();
    Ok(CoherentCircuit {
        base: PhysicalCircuit {
            machine_qubit_count: data_qubits + ancilla_qubits,
            instructions,
            assignment_log: BTreeMap::new(),
            classical_bits: 0,
        },
        shift_registers: registers,
        prep_markers: preps,
        observable_support,
        windows,
        data_qubits,
        ancilla_qubits,
        cone_gates,
        toffoli,
        cnot: 2 * toffoli,
    })
}
