//! Deep MERA circuits: construction, past-causal-cone extraction, qubit-reuse
//! compilation, random-Clifford template Monte Carlo, fault-tolerant cost
//! accounting, coherent shift-averaged sampling, fermionic compilation, and a
//! dense simulator used as the reference oracle.

pub mod circuit;
pub mod compile;
pub mod cost;
pub mod error;
pub mod fermi;
pub mod payload;
pub mod pcc;
pub mod physical;
pub mod plateau;
pub mod sampler;
pub mod sim;
pub mod walk;

pub use circuit::{
    build_dmera, circuit_stats, Block, Circuit, CircuitStats, ClassId, DmeraParams, Gate, Layer,
    QubitCoord,
};
pub use compile::{
    compile_layer_sweep, compile_min_pcc_peel, machine_qubit_count, GateOp, LayeredCircuit,
};
pub use cost::{
    coherent_budget, cshift_cost, hubbard_coeffs, energy_offset, incoherent_budget,
    sample_complexity, CShiftCost, CoherentOptions, CostReport, HamiltonianSpec, PccStats,
    Strategy, TGateModel,
};
pub use error::{DmeraError, Result};
pub use fermi::{
    compile_fermionic_pcc, fermion_reset_instructions, jw_map_gate, FermionGate, FermionKind,
    ModeOrdering,
};
pub use payload::{CliffordTags, Payload, PayloadSource, SeededUnitaries, Unitary4, C64};
pub use pcc::{
    check_shift_equivalence, extract_pcc, predicted_width_bound, width_profile, ReducedCircuit,
};
pub use physical::{Pauli, PauliString, PhysicalCircuit, PhysicalInstruction};
pub use plateau::{
    bayesian_bootstrap, estimate_gradient_upper_bound, propagate_template, GradientBoundEstimate,
    TemplateRecord,
};
pub use sampler::{build_coherent_sampler, build_cshift, CShiftBlock, CoherentCircuit};
pub use sim::{simulate_expectation, unitary_of, Observable, SimMode, StateVector};
pub use walk::{random_walk_width, WalkMode};
