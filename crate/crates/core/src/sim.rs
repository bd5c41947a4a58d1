//! Dense statevector and density-matrix simulation of physical instruction
//! streams. Qubit `q` is bit `q` of the basis index.
//!
//! Tolerances used across the test suites: 1e-9 for expectation values,
//! 1e-12 for norms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{DmeraError, Result};
use crate::payload::{Unitary4, C64};
use crate::physical::{Pauli, PauliString, PhysicalCircuit, PhysicalInstruction};

pub const MAX_STATEVECTOR_QUBITS: usize = 22;
pub const MAX_DENSITY_QUBITS: usize = 12;
pub const MAX_UNITARY_QUBITS: usize = 10;
/// Measurement branches below this probability are dropped by the exact mode.
pub const BRANCH_CUTOFF: f64 = 1e-15;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Looks up the unitary behind an `ApplyGate` id.
pub trait GateLookup {
    fn gate_unitary(&self, gate_id: usize) -> Option<&Unitary4>;
}

impl GateLookup for Circuit {
    fn gate_unitary(&self, gate_id: usize) -> Option<&Unitary4> {
        self.unitary(gate_id)
    }
}

impl GateLookup for std::collections::BTreeMap<usize, Unitary4> {
    fn gate_unitary(&self, gate_id: usize) -> Option<&Unitary4> {
        self.get(&gate_id)
    }
}

/// For streams without `ApplyGate`.
pub struct NoGates;

impl GateLookup for NoGates {
    fn gate_unitary(&self, _gate_id: usize) -> Option<&Unitary4> {
        None
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub terms: Vec<(f64, PauliString)>,
}

impl Observable {
    pub fn pauli(ps: PauliString) -> Self {
        Observable {
            terms: vec![(1.0, ps)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    ExactBranchSum,
    Trajectories { count: usize, seed: u64 },
    Density,
}

fn pauli_mask_phase(ps: &PauliString, conj: bool) -> (usize, impl Fn(usize) -> C64 + '_) {
    let mask = ps
        .0
        .iter()
        .filter(|(_, p)| matches!(p, Pauli::X | Pauli::Y))
        .fold(0usize, |m, (q, _)| m | (1 << q));
    let phase = move |k: usize| {
        let mut ph = ONE;
        for &(q, p) in &ps.0 {
            let bit = (k >> q) & 1;
            match p {
                Pauli::Y => {
                    let y = if bit == 0 { I } else { -I };
                    ph *= if conj { y.conj() } else { y };
                }
                Pauli::Z if bit == 1 => ph = -ph,
                _ => {}
            }
        }
        ph
    };
    (mask, phase)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Result<Self> {
        Self::zero_with_limit(n, MAX_STATEVECTOR_QUBITS)
    }

    fn zero_with_limit(n: usize, limit: usize) -> Result<Self> {
        if n > limit {
            return Err(DmeraError::SizeLimit(format!(
                "{n} qubits exceeds the limit of {limit}"
            )));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(StateVector { n, amps })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n)?;
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        Ok(s)
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n || n > MAX_STATEVECTOR_QUBITS {
            return Err(DmeraError::SizeLimit(
                "amplitude count must be a power of two within the qubit limit".into(),
            ));
        }
        Ok(StateVector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_1q(&mut self, q: usize, m: &[[C64; 2]; 2]) {
        self.apply_controlled_1q(&[], q, m);
    }

    pub fn apply_controlled_1q(&mut self, controls: &[(usize, bool)], q: usize, m: &[[C64; 2]; 2]) {
        let bit = 1usize << q;
        let (cmask, cval) = controls.iter().fold((0usize, 0usize), |(m, v), &(c, b)| {
            (m | 1 << c, if b { v | 1 << c } else { v })
        });
        for i in 0..self.amps.len() {
            if i & bit != 0 || i & cmask != cval {
                continue;
            }
            let a0 = self.amps[i];
            let a1 = self.amps[i | bit];
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    pub fn apply_2q(&mut self, q0: usize, q1: usize, u: &Unitary4) {
        let b0 = 1usize << q0;
        let b1 = 1usize << q1;
        for i in 0..self.amps.len() {
            if i & (b0 | b1) != 0 {
                continue;
            }
            let idx = [i, i | b1, i | b0, i | b0 | b1];
            let a = idx.map(|k| self.amps[k]);
            for (row, &k) in idx.iter().enumerate() {
                self.amps[k] = (0..4).map(|c| u.0[row][c] * a[c]).sum();
            }
        }
    }

    fn apply_pauli(&mut self, ps: &PauliString, conj: bool) {
        let (mask, phase) = pauli_mask_phase(ps, conj);
        let mut out = vec![ZERO; self.amps.len()];
        for (k, a) in self.amps.iter().enumerate() {
            out[k ^ mask] = phase(k) * a;
        }
        self.amps = out;
    }

    pub fn apply_pauli_string(&mut self, ps: &PauliString) {
        self.apply_pauli(ps, false);
    }

    fn apply_pauli_rotation(&mut self, ps: &PauliString, angle: f64, conj: bool) {
        let mut p = self.clone();
        p.apply_pauli(ps, conj);
        let c = C64::new((angle / 2.0).cos(), 0.0);
        let s = if conj { I } else { -I } * (angle / 2.0).sin();
        for (a, pa) in self.amps.iter_mut().zip(p.amps) {
            *a = c * *a + s * pa;
        }
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects qubit `q` onto `outcome` and renormalises.
    pub fn collapse(&mut self, q: usize, outcome: bool, prob: f64) {
        let bit = 1usize << q;
        let scale = 1.0 / prob.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit) != 0) == outcome {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
    }

    pub fn expectation_pauli(&self, ps: &PauliString) -> f64 {
        let (mask, phase) = pauli_mask_phase(ps, false);
        self.amps
            .iter()
            .enumerate()
            .map(|(k, a)| (self.amps[k ^ mask].conj() * phase(k) * a).re)
            .sum()
    }

    pub fn expectation(&self, obs: &Observable) -> f64 {
        obs.terms
            .iter()
            .map(|(w, ps)| w * self.expectation_pauli(ps))
            .sum()
    }

    /// Applies a reversible instruction; `offset`/`conj` let the density
    /// matrix reuse this on its column index.
    fn apply_reversible(
        &mut self,
        instr: &PhysicalInstruction,
        gates: &dyn GateLookup,
        offset: usize,
        conj: bool,
    ) -> Result<()> {
        use PhysicalInstruction::*;
        let cj = |z: C64| if conj { z.conj() } else { z };
        let x = [[ZERO, ONE], [ONE, ZERO]];
        match instr {
            ApplyGate { gate_id, qubits } => {
                let u = gates
                    .gate_unitary(*gate_id)
                    .ok_or(DmeraError::UnknownGate(*gate_id))?;
                let u = if conj {
                    Unitary4(u.0.map(|row| row.map(|z| z.conj())))
                } else {
                    u.clone()
                };
                self.apply_2q(qubits[0] + offset, qubits[1] + offset, &u);
            }
            PauliRotation { paulis, angle } => {
                let shifted =
                    PauliString(paulis.0.iter().map(|&(q, p)| (q + offset, p)).collect());
                self.apply_pauli_rotation(&shifted, *angle, conj);
            }
            ControlledPhase { qubits, theta } => {
                let ph = [[ONE, ZERO], [ZERO, cj(C64::from_polar(1.0, *theta))]];
                self.apply_controlled_1q(&[(qubits[0] + offset, true)], qubits[1] + offset, &ph);
            }
            Cnot { control, target } => {
                self.apply_controlled_1q(&[(control + offset, true)], target + offset, &x);
            }
            Toffoli { controls, target } => {
                let cs = [(controls[0] + offset, true), (controls[1] + offset, true)];
                self.apply_controlled_1q(&cs, target + offset, &x);
            }
            ControlledRy {
                controls,
                target,
                angle,
            } => {
                let (s, c) = (angle / 2.0).sin_cos();
                let m = [[C64::new(c, 0.0), C64::new(-s, 0.0)], [
                    C64::new(s, 0.0),
                    C64::new(c, 0.0),
                ]];
                let cs: Vec<(usize, bool)> =
                    controls.iter().map(|&(q, v)| (q + offset, v)).collect();
                self.apply_controlled_1q(&cs, target + offset, &m);
            }
            Reset { .. } | MeasureZ { .. } | ConditionalPauliString { .. } => {
                return Err(DmeraError::Irreversible(format!("{instr:?}")));
            }
        }
        Ok(())
    }
}

/// Density matrix stored as a vectorised 2n-qubit state: entry (row, col)
/// lives at index `row + col * 2^n`.
#[derive(Clone, Debug)]
struct DensityMatrix {
    n: usize,
    v: StateVector,
}

impl DensityMatrix {
    fn zero(n: usize) -> Result<Self> {
        if n > MAX_DENSITY_QUBITS {
            return Err(DmeraError::SizeLimit(format!(
                "{n} qubits exceeds the density-mode limit of {MAX_DENSITY_QUBITS}"
            )));
        }
        Ok(DensityMatrix {
            n,
            v: StateVector::zero_with_limit(2 * n, 2 * MAX_DENSITY_QUBITS)?,
        })
    }

    fn apply_unitary(&mut self, instr: &PhysicalInstruction, gates: &dyn GateLookup) -> Result<()> {
        self.v.apply_reversible(instr, gates, 0, false)?;
        self.v.apply_reversible(instr, gates, self.n, true)
    }

    fn trace(&self) -> f64 {
        let dim = 1usize << self.n;
        (0..dim).map(|i| self.v.amps[i + i * dim].re).sum()
    }

    /// Unnormalised projection of qubit `q` onto `outcome` on both sides.
    fn project(&mut self, q: usize, outcome: bool) {
        let (rb, cb) = (1usize << q, 1usize << (q + self.n));
        for (k, a) in self.v.amps.iter_mut().enumerate() {
            if ((k & rb) != 0) != outcome || ((k & cb) != 0) != outcome {
                *a = ZERO;
            }
        }
    }

    fn reset(&mut self, q: usize) {
        let (rb, cb) = (1usize << q, 1usize << (q + self.n));
        for k in 0..self.v.amps.len() {
            if k & (rb | cb) == 0 {
                let moved = self.v.amps[k | rb | cb];
                self.v.amps[k] += moved;
            }
        }
        for (k, a) in self.v.amps.iter_mut().enumerate() {
            if k & (rb | cb) != 0 {
                *a = ZERO;
            }
        }
    }

    fn apply_pauli(&mut self, ps: &PauliString) {
        self.v.apply_pauli(ps, false);
        let shifted = PauliString(ps.0.iter().map(|&(q, p)| (q + self.n, p)).collect());
        self.v.apply_pauli(&shifted, true);
    }

    fn expectation(&self, obs: &Observable) -> f64 {
        let dim = 1usize << self.n;
        obs.terms
            .iter()
            .map(|(w, ps)| {
                let (mask, phase) = pauli_mask_phase(ps, false);
                let t: C64 = (0..dim)
                    .map(|k| {
                        let j = k ^ mask;
                        phase(k) * self.v.amps[k + j * dim]
                    })
                    .sum();
                w * t.re
            })
            .sum()
    }
}

fn check_indices(pc: &PhysicalCircuit) -> Result<()> {
    for instr in &pc.instructions {
        if let Some(q) = instr.qubits().into_iter().find(|&q| q >= pc.machine_qubit_count) {
            return Err(DmeraError::InvalidArgument(format!(
                "instruction {instr:?} touches qubit {q} >= {}",
                pc.machine_qubit_count
            )));
        }
    }
    Ok(())
}

fn branch_sum(
    instrs: &[PhysicalInstruction],
    mut state: StateVector,
    mut bits: Vec<bool>,
    gates: &dyn GateLookup,
    obs: &Observable,
) -> Result<f64> {
    for (k, instr) in instrs.iter().enumerate() {
        match instr {
            PhysicalInstruction::Reset { qubit } | PhysicalInstruction::MeasureZ { qubit, .. } => {
                let p1 = state.prob_one(*qubit);
                let mut total = 0.0;
                for (outcome, p) in [(false, 1.0 - p1), (true, p1)] {
                    if p < BRANCH_CUTOFF {
                        continue;
                    }
                    let mut s = state.clone();
                    s.collapse(*qubit, outcome, p);
                    let mut b = bits.clone();
                    match instr {
                        PhysicalInstruction::Reset { .. } if outcome => {
                            s.apply_pauli_string(&PauliString(vec![(*qubit, Pauli::X)]));
                        }
                        PhysicalInstruction::MeasureZ { bit, .. } => b[*bit] = outcome,
                        _ => {}
                    }
                    total += p * branch_sum(&instrs[k + 1..], s, b, gates, obs)?;
                }
                return Ok(total);
            }
            PhysicalInstruction::ConditionalPauliString { paulis, bit, value } => {
                if bits[*bit] == *value {
                    state.apply_pauli_string(paulis);
                }
            }
            _ => state.apply_reversible(instr, gates, 0, false)?,
        }
    }
    bits.clear();
    Ok(state.expectation(obs))
}

fn run_trajectory<R: Rng>(
    pc: &PhysicalCircuit,
    gates: &dyn GateLookup,
    rng: &mut R,
) -> Result<StateVector> {
    let mut state = StateVector::zero(pc.machine_qubit_count)?;
    let mut bits = vec![false; pc.classical_bits];
    for instr in &pc.instructions {
        match instr {
            PhysicalInstruction::Reset { qubit } | PhysicalInstruction::MeasureZ { qubit, .. } => {
                let p1 = state.prob_one(*qubit);
                let outcome = rng.random::<f64>() < p1;
                let p = if outcome { p1 } else { 1.0 - p1 };
                state.collapse(*qubit, outcome, p);
                match instr {
                    PhysicalInstruction::Reset { .. } if outcome => {
                        state.apply_pauli_string(&PauliString(vec![(*qubit, Pauli::X)]));
                    }
                    PhysicalInstruction::MeasureZ { bit, .. } => bits[*bit] = outcome,
                    _ => {}
                }
            }
            PhysicalInstruction::ConditionalPauliString { paulis, bit, value } => {
                if bits[*bit] == *value {
                    state.apply_pauli_string(paulis);
                }
            }
            _ => state.apply_reversible(instr, gates, 0, false)?,
        }
    }
    Ok(state)
}

fn density_run(pc: &PhysicalCircuit, gates: &dyn GateLookup, obs: &Observable) -> Result<f64> {
    let mut branches = vec![(vec![false; pc.classical_bits], DensityMatrix::zero(pc.machine_qubit_count)?)];
    for instr in &pc.instructions {
        match instr {
            PhysicalInstruction::Reset { qubit } => {
                for (_, rho) in branches.iter_mut() {
                    rho.reset(*qubit);
                }
            }
            PhysicalInstruction::MeasureZ { qubit, bit } => {
                let mut next = Vec::with_capacity(branches.len() * 2);
                for (bits, rho) in branches {
                    for outcome in [false, true] {
                        let mut r = rho.clone();
                        r.project(*qubit, outcome);
                        if r.trace() > BRANCH_CUTOFF {
                            let mut b = bits.clone();
                            b[*bit] = outcome;
                            next.push((b, r));
                        }
                    }
                }
                branches = next;
            }
            PhysicalInstruction::ConditionalPauliString { paulis, bit, value } => {
                for (bits, rho) in branches.iter_mut() {
                    if bits[*bit] == *value {
                        rho.apply_pauli(paulis);
                    }
                }
            }
            _ => {
                for (_, rho) in branches.iter_mut() {
                    rho.apply_unitary(instr, gates)?;
                }
            }
        }
    }
    Ok(branches.iter().map(|(_, rho)| rho.expectation(obs)).sum())
}

pub fn simulate_expectation(
    pc: &PhysicalCircuit,
    gates: &dyn GateLookup,
    obs: &Observable,
    mode: &SimMode,
) -> Result<f64> {
    check_indices(pc)?;
    if let Some(q) = obs
        .terms
        .iter()
        .flat_map(|(_, ps)| ps.qubits())
        .find(|&q| q >= pc.machine_qubit_count)
    {
        return Err(DmeraError::InvalidArgument(format!(
            "observable touches qubit {q} outside the circuit"
        )));
    }
    match mode {
        SimMode::ExactBranchSum => branch_sum(
            &pc.instructions,
            StateVector::zero(pc.machine_qubit_count)?,
            vec![false; pc.classical_bits],
            gates,
            obs,
        ),
        SimMode::Trajectories { count, seed } => {
            if *count == 0 {
                return Err(DmeraError::InvalidArgument("zero trajectories".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut acc = 0.0;
            for _ in 0..*count {
                acc += run_trajectory(pc, gates, &mut rng)?.expectation(obs);
            }
            Ok(acc / *count as f64)
        }
        SimMode::Density => density_run(pc, gates, obs),
    }
}

/// Final state of a reset-free stream.
pub fn run_unitary(pc: &PhysicalCircuit, gates: &dyn GateLookup) -> Result<StateVector> {
    check_indices(pc)?;
    let mut s = StateVector::zero(pc.machine_qubit_count)?;
    for instr in &pc.instructions {
        s.apply_reversible(instr, gates, 0, false)?;
    }
    Ok(s)
}

/// Applies a reversible block to an existing state.
pub fn apply_block(
    state: &mut StateVector,
    block: &[PhysicalInstruction],
    gates: &dyn GateLookup,
) -> Result<()> {
    for instr in block {
        state.apply_reversible(instr, gates, 0, false)?;
    }
    Ok(())
}

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl Matrix {
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn unitary_of(block: &[PhysicalInstruction], m: usize, gates: &dyn GateLookup) -> Result<Matrix> {
    if m > MAX_UNITARY_QUBITS {
        return Err(DmeraError::SizeLimit(format!(
            "{m} qubits exceeds the unitary limit of {MAX_UNITARY_QUBITS}"
        )));
    }
    if let Some(bad) = block.iter().find(|i| !i.is_reversible()) {
        return Err(DmeraError::Irreversible(format!("{bad:?}")));
    }
    let pc = PhysicalCircuit {
        machine_qubit_count: m,
        instructions: block.to_vec(),
        ..Default::default()
    };
    check_indices(&pc)?;
    let dim = 1usize << m;
    let mut data = vec![ZERO; dim * dim];
    for col in 0..dim {
        let mut s = StateVector::basis(m, col)?;
        apply_block(&mut s, block, gates)?;
        for (row, a) in s.amps.iter().enumerate() {
            data[row * dim + col] = *a;
        }
    }
    Ok(Matrix { dim, data })
}
