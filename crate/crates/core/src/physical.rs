//! Machine-level instruction stream shared by the compilers, the coherent
//! sampler and the fermionic path.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// Product of single-qubit Paulis; qubits are sorted and distinct.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliString(pub Vec<(usize, Pauli)>);

impl PauliString {
    pub fn new(mut terms: Vec<(usize, Pauli)>) -> Self {
        terms.retain(|(_, p)| *p != Pauli::I);
        terms.sort_by_key(|(q, _)| *q);
        debug_assert!(terms.windows(2).all(|w| w[0].0 != w[1].0));
        PauliString(terms)
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|(q, _)| *q)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum PhysicalInstruction {
    ApplyGate {
        gate_id: usize,
        qubits: [usize; 2],
    },
    Reset {
        qubit: usize,
    },
    MeasureZ {
        qubit: usize,
        bit: usize,
    },
    /// Applies `paulis` when classical `bit` equals `value`.
    ConditionalPauliString {
        paulis: PauliString,
        bit: usize,
        value: bool,
    },
    /// exp(-i angle P / 2).
    PauliRotation {
        paulis: PauliString,
        angle: f64,
    },
    /// diag(1, 1, 1, e^{i theta}).
    ControlledPhase {
        qubits: [usize; 2],
        theta: f64,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Toffoli {
        controls: [usize; 2],
        target: usize,
    },
    /// Ry(angle) on `target` when every control qubit holds its listed value.
    ControlledRy {
        controls: Vec<(usize, bool)>,
        target: usize,
        angle: f64,
    },
}

impl PhysicalInstruction {
    pub fn qubits(&self) -> Vec<usize> {
        use PhysicalInstruction::*;
        match self {
            ApplyGate { qubits, .. } | ControlledPhase { qubits, .. } => qubits.to_vec(),
            Reset { qubit } | MeasureZ { qubit, .. } => vec![*qubit],
            ConditionalPauliString { paulis, .. } | PauliRotation { paulis, .. } => {
                paulis.qubits().collect()
            }
            Cnot { control, target } => vec![*control, *target],
            Toffoli { controls, target } => vec![controls[0], controls[1], *target],
            ControlledRy {
                controls, target, ..
            } => controls
                .iter()
                .map(|c| c.0)
                .chain(std::iter::once(*target))
                .collect(),
        }
    }

    /// Same instruction with every qubit index passed through `f`.
    pub fn map_qubits(&self, f: impl Fn(usize) -> usize) -> Self {
        use PhysicalInstruction::*;
        let ps = |p: &PauliString| PauliString::new(p.0.iter().map(|&(q, x)| (f(q), x)).collect());
        match self {
            ApplyGate { gate_id, qubits } => ApplyGate {
                gate_id: *gate_id,
                qubits: qubits.map(&f),
            },
            Reset { qubit } => Reset { qubit: f(*qubit) },
            MeasureZ { qubit, bit } => MeasureZ {
                qubit: f(*qubit),
                bit: *bit,
            },
            ConditionalPauliString { paulis, bit, value } => ConditionalPauliString {
                paulis: ps(paulis),
                bit: *bit,
                value: *value,
            },
            PauliRotation { paulis, angle } => PauliRotation {
                paulis: ps(paulis),
                angle: *angle,
            },
            ControlledPhase { qubits, theta } => ControlledPhase {
                qubits: qubits.map(&f),
                theta: *theta,
            },
            Cnot { control, target } => Cnot {
                control: f(*control),
                target: f(*target),
            },
            Toffoli { controls, target } => Toffoli {
                controls: controls.map(&f),
                target: f(*target),
            },
            ControlledRy {
                controls,
                target,
                angle,
            } => ControlledRy {
                controls: controls.iter().map(|&(q, v)| (f(q), v)).collect(),
                target: f(*target),
                angle: *angle,
            },
        }
    }

    pub fn is_reversible(&self) -> bool {
        !matches!(
            self,
            PhysicalInstruction::Reset { .. }
                | PhysicalInstruction::MeasureZ { .. }
                | PhysicalInstruction::ConditionalPauliString { .. }
        )
    }
}

/// One tenancy of a circuit qubit on a machine qubit, as instruction indices.
/// `end` is the index of the freeing reset, or `None` if live at the end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiveInterval {
    pub machine: usize,
    pub start: usize,
    pub end: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhysicalCircuit {
    pub machine_qubit_count: usize,
    pub instructions: Vec<PhysicalInstruction>,
    pub assignment_log: BTreeMap<usize, Vec<LiveInterval>>,
    pub classical_bits: usize,
}

impl PhysicalCircuit {
    pub fn gate_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, PhysicalInstruction::ApplyGate { .. }))
            .count()
    }

    pub fn reset_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, PhysicalInstruction::Reset { .. }))
            .count()
    }

    /// Machine qubit holding `circuit_qubit` at the end of the stream.
    pub fn final_machine(&self, circuit_qubit: usize) -> Option<usize> {
        self.assignment_log
            .get(&circuit_qubit)?
            .last()
            .filter(|iv| iv.end.is_none())
            .map(|iv| iv.machine)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "machine_qubits": self.machine_qubit_count,
            "classical_bits": self.classical_bits,
            "instructions": self.instructions,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instruction_json_is_tagged() {
        let v = serde_json::to_value(PhysicalInstruction::Reset { qubit: 3 }).unwrap();
        assert_eq!(v, json!({"op": "reset", "qubit": 3}));
        let v = serde_json::to_value(PhysicalInstruction::ConditionalPauliString {
            paulis: PauliString::new(vec![(1, Pauli::X), (0, Pauli::Z)]),
            bit: 0,
            value: true,
        })
        .unwrap();
        assert_eq!(v["paulis"], json!([[0, "z"], [1, "x"]]));
    }
}
