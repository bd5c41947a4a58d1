//! Shift-averaged sampler against the brute-force average, over every lattice
//! site, of the full circuit's two-site reduced state.

use dmera_core::sim::run_unitary;
use dmera_core::*;

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

fn full_state(c: &Circuit) -> StateVector {
    let all: Vec<usize> = (0..c.num_wires()).collect();
    let pc = LayeredCircuit::from_circuit(c, &all).embed(c.num_wires());
    run_unitary(&pc, c).unwrap()
}

fn pair_at(c: &Circuit, origin: [usize; 2], axis: usize) -> [usize; 2] {
    let l = c.params.linear_size();
    let mut b = origin;
    b[axis] = (b[axis] + 1) % l;
    [origin[1] * l + origin[0], b[1] * l + b[0]]
}

/// Mean over the given origins of <P_a P_b> on the full state.
fn lattice_mean(c: &Circuit, s: &StateVector, origins: &[[usize; 2]], axis: usize, a: Pauli, b: Pauli) -> f64 {
    let mut acc = 0.0;
    for &o in origins {
        let [w0, w1] = pair_at(c, o, axis);
        acc += s.expectation_pauli(&PauliString::new(vec![(w0, a), (w1, b)]));
    }
    acc / origins.len() as f64
}

fn grid(side: usize, d: u32) -> Vec<[usize; 2]> {
    let ys = if d == 1 { 1 } else { side };
    (0..ys).flat_map(|y| (0..side).map(move |x| [x, y])).collect()
}

fn check(params: DmeraParams, seed: u64, axis: usize) {
    let c = build_dmera(params, &mut SeededUnitaries::new(seed)).unwrap();
    let cc = build_coherent_sampler(&c, axis).unwrap();
    assert!(cc.base.instructions.iter().all(|i| i.is_reversible()));
    let full = full_state(&c);
    let sampled = run_unitary(&cc.base, &c).unwrap();
    let l = params.linear_size();
    // period one has no registers: the sampler is the cone at the origin
    let origins = if params.period == 1 { vec![[0, 0]] } else { grid(l, params.d) };
    let [q0, q1] = cc.observable_support;
    for a in PAULIS {
        for b in PAULIS {
            if a == Pauli::I && b == Pauli::I {
                continue;
            }
            let got = sampled.expectation_pauli(&PauliString::new(vec![(q0, a), (q1, b)]));
            let want = lattice_mean(&c, &full, &origins, axis, a, b);
            assert!((got - want).abs() < 1e-9, "{params:?} {a:?}{b:?}: {got} vs {want}");
        }
    }
}

#[test]
fn one_dimensional_toy() {
    check(DmeraParams::new(2, 1, 2, 1, 2).unwrap(), 1, 0);
}

#[test]
fn one_dimensional_deeper() {
    for seed in 0..3 {
        check(DmeraParams::new(3, 2, 2, 1, 2).unwrap(), seed, 0);
        check(DmeraParams::new(3, 2, 2, 1, 4).unwrap(), seed, 0);
    }
    check(DmeraParams::new(3, 3, 2, 1, 8).unwrap(), 7, 0);
    check(DmeraParams::new(4, 2, 2, 1, 4).unwrap(), 8, 0);
}

#[test]
fn two_dimensional_both_axes() {
    check(DmeraParams::new(1, 2, 2, 2, 2).unwrap(), 3, 0);
    check(DmeraParams::new(2, 1, 2, 2, 2).unwrap(), 4, 0);
    check(DmeraParams::new(2, 2, 2, 2, 2).unwrap(), 5, 1);
}

#[test]
fn period_one_is_the_plain_cone() {
    let p = DmeraParams::new(3, 2, 2, 1, 1).unwrap();
    let c = build_dmera(p, &mut SeededUnitaries::new(2)).unwrap();
    let cc = build_coherent_sampler(&c, 0).unwrap();
    assert_eq!(cc.ancilla_qubits, 0);
    assert!(cc.shift_registers.is_empty());
    let support = [QubitCoord::new(3, &[0]), QubitCoord::new(3, &[1])];
    let rc = extract_pcc(&c, &support).unwrap();
    assert_eq!(cc.cone_gates, rc.gate_count());
    check(p, 2, 0);
}

#[test]
fn ancilla_count() {
    let p = DmeraParams::new(3, 1, 2, 2, 4).unwrap();
    let c = build_dmera(p, &mut CliffordTags).unwrap();
    let cc = build_coherent_sampler(&c, 0).unwrap();
    assert_eq!(cc.ancilla_qubits, 12);
    assert_eq!(cc.shift_registers.len(), 6);
}

#[test]
fn odd_r_with_shifts_is_rejected() {
    let p = DmeraParams::new(2, 1, 3, 1, 3).unwrap();
    let c = build_dmera(p, &mut CliffordTags).unwrap();
    assert!(build_coherent_sampler(&c, 0).is_err());
}
