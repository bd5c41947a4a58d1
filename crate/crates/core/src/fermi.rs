//! Fermionic gates, their Jordan-Wigner images, and fermion resets.
//!
//! Convention: qubit |1> is an occupied mode, Z = I - 2n, and
//! a_k = Z_{<k} (X_k + i Y_k) / 2 in the chosen mode ordering. Gates are
//! exp(i theta G) with G one of e^{i phi} a_i^dag a_j + h.c.,
//! e^{i phi} a_i^dag a_j^dag + h.c., or n_i n_j.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, ClassId, QubitCoord};
use crate::compile::{compile_layer_sweep, compile_min_pcc_peel};
use crate::error::{DmeraError, Result};
use crate::payload::{Payload, PayloadSource};
use crate::pcc::extract_pcc;
use crate::physical::{Pauli, PauliString, PhysicalCircuit, PhysicalInstruction};
use crate::sim::Observable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FermionKind {
    Hop,
    Pair,
    Density,
}

/// Gate parameters without modes; the payload of a fermionic class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FermionTemplate {
    pub kind: FermionKind,
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FermionGate {
    pub kind: FermionKind,
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
    pub modes: [usize; 2],
}

impl FermionGate {
    pub fn new(t: FermionTemplate, modes: [usize; 2]) -> Self {
        FermionGate {
            kind: t.kind,
            theta: t.theta,
            phi: t.phi,
            modes,
        }
    }
}

/// Mode id -> Jordan-Wigner index, 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeOrdering(pub BTreeMap<usize, usize>);

impl ModeOrdering {
    /// Ascending mode id order (row-major for canonical addresses).
    pub fn row_major(modes: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = modes.into_iter().collect();
        ModeOrdering(set.into_iter().enumerate().map(|(i, m)| (m, i + 1)).collect())
    }

    pub fn index(&self, mode: usize) -> Result<usize> {
        self.0.get(&mode).copied().ok_or(DmeraError::UnmappedMode(mode))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Random fermionic payloads: kind uniform, theta in [-pi, pi), phi in [0, 2 pi).
#[derive(Clone, Debug)]
pub struct RandomFermionic {
    rng: ChaCha8Rng,
}

impl RandomFermionic {
    pub fn new(seed: u64) -> Self {
        RandomFermionic {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl PayloadSource for RandomFermionic {
    fn payload_for(&mut self, _class: &ClassId) -> Result<Payload> {
        use std::f64::consts::PI;
        let kind = match self.rng.random_range(0..3) {
            0 => FermionKind::Hop,
            1 => FermionKind::Pair,
            _ => FermionKind::Density,
        };
        let theta = self.rng.random_range(-PI..PI);
        let phi = match kind {
            FermionKind::Density => 0.0,
            _ => self.rng.random_range(0.0..2.0 * PI),
        };
        Ok(Payload::Fermionic(FermionTemplate { kind, theta, phi }))
    }
}

fn string_with(between: &[usize], ends: [(usize, Pauli); 2]) -> PauliString {
    let mut t: Vec<(usize, Pauli)> = between.iter().map(|&q| (q, Pauli::Z)).collect();
    t.extend(ends);
    PauliString::new(t)
}

fn rz(q: usize, angle: f64) -> PhysicalInstruction {
    PhysicalInstruction::PauliRotation {
        paulis: PauliString::new(vec![(q, Pauli::Z)]),
        angle,
    }
}

/// Gate on machine qubits `qa` (mode i) and `qb` (mode j); `between` holds
/// the qubits whose Z-string separates them.
fn map_on(g: &FermionTemplate, qa: usize, qb: usize, between: &[usize]) -> Vec<PhysicalInstruction> {
    use PhysicalInstruction::PauliRotation;
    if g.theta == 0.0 {
        return Vec::new();
    }
    let xx = || string_with(between, [(qa, Pauli::X), (qb, Pauli::X)]);
    let yy = || string_with(between, [(qa, Pauli::Y), (qb, Pauli::Y)]);
    let mut out = Vec::new();
    match g.kind {
        FermionKind::Density => out.push(PhysicalInstruction::ControlledPhase {
            qubits: [qa, qb],
            theta: g.theta,
        }),
        FermionKind::Hop => {
            // phase rides on a_j: conjugate by Rz_j(-phi)
            if g.phi != 0.0 {
                out.push(rz(qb, g.phi));
            }
            out.push(PauliRotation { paulis: xx(), angle: -g.theta });
            out.push(PauliRotation { paulis: yy(), angle: -g.theta });
            if g.phi != 0.0 {
                out.push(rz(qb, -g.phi));
            }
        }
        FermionKind::Pair => {
            // a_i^dag a_j^dag picks up a sign when i sits above j
            let phi = if qa > qb { g.phi + std::f64::consts::PI } else { g.phi };
            if phi != 0.0 {
                out.push(rz(qb, -phi));
            }
            out.push(PauliRotation { paulis: xx(), angle: -g.theta });
            out.push(PauliRotation { paulis: yy(), angle: g.theta });
            if phi != 0.0 {
                out.push(rz(qb, phi));
            }
        }
    }
    out
}

/// Jordan-Wigner image of `g`; qubit = JW index - 1.
pub fn jw_map_gate(g: &FermionGate, ord: &ModeOrdering) -> Result<Vec<PhysicalInstruction>> {
    let a = ord.index(g.modes[0])? - 1;
    let b = ord.index(g.modes[1])? - 1;
    if a == b {
        return Err(DmeraError::InvalidArgument("fermion gate modes must differ".into()));
    }
    let between: Vec<usize> = (a.min(b) + 1..a.max(b)).collect();
    let t = FermionTemplate {
        kind: g.kind,
        theta: g.theta,
        phi: g.phi,
    };
    Ok(map_on(&t, a, b, &between))
}

/// Generator G of a gate as a Pauli sum on machine qubits, same conventions
/// as [`jw_map_gate`].
pub fn jw_generator(g: &FermionTemplate, qa: usize, qb: usize, between: &[usize]) -> Observable {
    let (c, s) = (g.phi.cos(), g.phi.sin());
    let term = |w: f64, pa: Pauli, pb: Pauli| (w, string_with(between, [(qa, pa), (qb, pb)]));
    let terms = match g.kind {
        FermionKind::Hop => vec![
            term(c / 2.0, Pauli::X, Pauli::X),
            term(c / 2.0, Pauli::Y, Pauli::Y),
            term(-s / 2.0, Pauli::X, Pauli::Y),
            term(s / 2.0, Pauli::Y, Pauli::X),
        ],
        FermionKind::Pair => {
            let sign = if qa > qb { -1.0 } else { 1.0 };
            vec![
                term(sign * c / 2.0, Pauli::X, Pauli::X),
                term(-sign * c / 2.0, Pauli::Y, Pauli::Y),
                term(sign * s / 2.0, Pauli::X, Pauli::Y),
                term(sign * s / 2.0, Pauli::Y, Pauli::X),
            ]
        }
        FermionKind::Density => vec![
            (0.25, PauliString::default()),
            (-0.25, PauliString::new(vec![(qa, Pauli::Z)])),
            (-0.25, PauliString::new(vec![(qb, Pauli::Z)])),
            (0.25, PauliString::new(vec![(qa, Pauli::Z), (qb, Pauli::Z)])),
        ],
    };
    Observable { terms }
}

/// Occupation number n_q = (I - Z_q) / 2.
pub fn jw_number(q: usize) -> Observable {
    Observable {
        terms: vec![
            (0.5, PauliString::default()),
            (-0.5, PauliString::new(vec![(q, Pauli::Z)])),
        ],
    }
}

/// Measure n on `q`, then apply the JW image of a_q (or a_q^dag when
/// `occupied`) if the outcome calls for it. `below` are the qubits whose
/// Z-string precedes `q`.
fn reset_on(q: usize, below: &[usize], bit: usize, occupied: bool) -> Vec<PhysicalInstruction> {
    let mut t: Vec<(usize, Pauli)> = below.iter().map(|&b| (b, Pauli::Z)).collect();
    t.push((q, Pauli::X));
    vec![
        PhysicalInstruction::MeasureZ { qubit: q, bit },
        PhysicalInstruction::ConditionalPauliString {
            paulis: PauliString::new(t),
            bit,
            // outcome 1 is occupied
            value: !occupied,
        },
    ]
}

/// Fermion reset of mode `k` to the empty state, recording the outcome in
/// classical bit 0.
pub fn fermion_reset_instructions(k: usize, ord: &ModeOrdering) -> Result<Vec<PhysicalInstruction>> {
    fermion_reset_with(k, ord, 0, false)
}

/// As [`fermion_reset_instructions`], with explicit classical bit and an
/// option to reset to the occupied state instead.
pub fn fermion_reset_with(
    k: usize,
    ord: &ModeOrdering,
    bit: usize,
    occupied: bool,
) -> Result<Vec<PhysicalInstruction>> {
    let q = ord.index(k)? - 1;
    let below: Vec<usize> = (0..q).collect();
    Ok(reset_on(q, &below, bit, occupied))
}

/// Qubit-path compiler used before the Jordan-Wigner step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    LayerSweep,
    MinPccPeel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FermionicCompilation {
    pub physical: PhysicalCircuit,
    /// Machine qubit of each support mode, in support order.
    pub output_qubits: Vec<usize>,
    /// Machine qubits needed by the plain qubit compilation of the same cone.
    pub qubit_path_count: usize,
    /// Longest Z-string emitted.
    pub max_string: usize,
}

/// Cone extraction on gate supports, qubit-reuse compilation, then a
/// Jordan-Wigner image in machine-qubit order. Strings run over qubits that
/// currently hold a mode; freed qubits are in |0> and contribute nothing.
pub fn compile_fermionic_pcc(
    fc: &Circuit,
    support: &[QubitCoord],
    algorithm: Algorithm,
) -> Result<FermionicCompilation> {
    let rc = extract_pcc(fc, support)?;
    let lc = rc.to_layered();
    let qpc = match algorithm {
        Algorithm::LayerSweep => compile_layer_sweep(&lc),
        Algorithm::MinPccPeel => compile_min_pcc_peel(&lc),
    };
    let mut live: BTreeSet<usize> = BTreeSet::new();
    let mut out = Vec::new();
    let mut bits = 0;
    let mut max_string = 0;
    for ins in &qpc.instructions {
        match ins {
            PhysicalInstruction::ApplyGate { gate_id, qubits } => {
                let Payload::Fermionic(t) = fc.payload(*gate_id) else {
                    return Err(DmeraError::InvalidArgument(format!(
                        "gate {gate_id} has no fermionic payload"
                    )));
                };
                live.extend(qubits);
                let (lo, hi) = (qubits[0].min(qubits[1]), qubits[0].max(qubits[1]));
                let between: Vec<usize> = live.range(lo + 1..hi).copied().collect();
                max_string = max_string.max(between.len());
                out.extend(map_on(t, qubits[0], qubits[1], &between));
            }
            PhysicalInstruction::Reset { qubit } => {
                let below: Vec<usize> = live.range(..*qubit).copied().collect();
                max_string = max_string.max(below.len());
                out.extend(reset_on(*qubit, &below, bits, false));
                bits += 1;
                live.remove(qubit);
            }
            other => {
                return Err(DmeraError::InvalidArgument(format!(
                    "unexpected instruction {other:?} in qubit compilation"
                )))
            }
        }
    }
    let output_qubits = rc
        .observable_wires
        .iter()
        .map(|&w| qpc.final_machine(w).expect("outputs stay live"))
        .collect();
    Ok(FermionicCompilation {
        physical: PhysicalCircuit {
            machine_qubit_count: qpc.machine_qubit_count,
            instructions: out,
            assignment_log: qpc.assignment_log.clone(),
            classical_bits: bits,
        },
        output_qubits,
        qubit_path_count: qpc.machine_qubit_count,
        max_string,
    })
}
