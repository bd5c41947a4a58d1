//! Desk-scale oracle suite: compiled cones, cShift, the coherent sampler,
//! the fermionic path and cost bookkeeping, each against brute force.

use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use dmera_core::fermi::{Algorithm, RandomFermionic};
use dmera_core::sampler::ceil_log2;
use dmera_core::sim::{run_unitary, NoGates};
use dmera_core::*;

use crate::commands::fermi_check;
use crate::output::{emit, VERSION};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Random compiler instances.
    #[arg(long, default_value_t = 20)]
    pub instances: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
const TOL: f64 = 1e-9;

struct Check {
    name: &'static str,
    worst: f64,
    detail: String,
}

fn full_state(c: &Circuit) -> Result<StateVector> {
    let all: Vec<usize> = (0..c.num_wires()).collect();
    run_unitary(&LayeredCircuit::from_circuit(c, &all).embed(c.num_wires()), c)
}

fn pair(a: usize, b: usize, x: Pauli, y: Pauli) -> PauliString {
    PauliString::new(vec![(a, x), (b, y)])
}

fn compiler(instances: usize, seed: u64) -> anyhow::Result<Check> {
    const SHAPES: [(u32, u32, u32); 5] = [(1, 2, 1), (2, 2, 1), (3, 2, 1), (2, 3, 1), (1, 3, 2)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut not_better = 0;
    for inst in 0..instances {
        let (n, r, d) = SHAPES[rng.random_range(0..SHAPES.len())];
        let p = DmeraParams::new(n, rng.random_range(1..=4), r, d, r.pow(rng.random_range(0..=n)))?;
        let c = build_dmera(p, &mut SeededUnitaries::new(seed ^ inst as u64))?;
        let full = full_state(&c)?;
        let side = p.side(n);
        let mut pos: Vec<usize> = (0..d).map(|_| rng.random_range(0..side)).collect();
        let q0 = QubitCoord::new(n, &pos);
        let axis = rng.random_range(0..d as usize);
        pos[axis] = (pos[axis] + 1) % side;
        let support = [q0, QubitCoord::new(n, &pos)];
        let w = [c.wire_of(&support[0])?, c.wire_of(&support[1])?];
        let rc = extract_pcc(&c, &support)?;
        let lc = rc.to_layered();
        let sweep = compile_layer_sweep(&lc);
        let peel = compile_min_pcc_peel(&lc);
        if machine_qubit_count(&peel) > machine_qubit_count(&sweep) {
            not_better += 1;
        }
        for pc in [&sweep, &peel] {
            if pc.gate_count() != rc.gate_count() {
                worst = f64::INFINITY;
            }
            let m = [pc.final_machine(w[0]).unwrap_or(0), pc.final_machine(w[1]).unwrap_or(0)];
            for x in PAULIS {
                for y in PAULIS {
                    let want = full.expectation_pauli(&pair(w[0], w[1], x, y));
                    let obs = Observable::pauli(pair(m[0], m[1], x, y));
                    let got = simulate_expectation(pc, &c, &obs, &SimMode::ExactBranchSum)?;
                    worst = worst.max((got - want).abs());
                }
            }
        }
    }
    if not_better > 0 {
        worst = f64::INFINITY;
    }
    Ok(Check {
        name: "compiled cones vs uncompiled circuit",
        worst,
        detail: format!("{instances} instances, peel worse than sweep on {not_better}"),
    })
}

fn cshift() -> anyhow::Result<Check> {
    let mut worst: f64 = 0.0;
    for ell in 2..=5 {
        for t in 1..=8 {
            let blk = build_cshift(ell, t)?;
            let m = ell + ceil_log2(t);
            let u = unitary_of(&blk.instructions, m, &NoGates)?;
            for col in 0..1usize << m {
                let x = col >> ell;
                let mut row = col & !((1 << ell) - 1);
                for k in 0..ell {
                    if col >> k & 1 == 1 {
                        row |= 1 << ((k + x) % ell);
                    }
                }
                worst = worst.max((u.get(row, col) - C64::new(1.0, 0.0)).norm());
            }
            let f = cshift_cost(ell, t, 1)?;
            if blk.toffoli > f.toffoli || blk.cnot != 2 * blk.toffoli {
                worst = f64::INFINITY;
            }
        }
    }
    Ok(Check { name: "cShift permutations", worst, detail: "ell 2..5, T 1..8".into() })
}

fn sampler(seed: u64) -> anyhow::Result<Check> {
    let mut worst: f64 = 0.0;
    let cases = [(2, 1, 2), (3, 2, 2), (3, 2, 4), (3, 1, 8)];
    for (n, depth, t) in cases {
        let p = DmeraParams::new(n, depth, 2, 1, t)?;
        let c = build_dmera(p, &mut SeededUnitaries::new(seed))?;
        let cc = build_coherent_sampler(&c, 0)?;
        let full = full_state(&c)?;
        let got_state = run_unitary(&cc.base, &c)?;
        let l = p.linear_size();
        let [q0, q1] = cc.observable_support;
        for x in PAULIS {
            for y in PAULIS {
                let got = got_state.expectation_pauli(&pair(q0, q1, x, y));
                let want = (0..l)
                    .map(|s| full.expectation_pauli(&pair(s, (s + 1) % l, x, y)))
                    .sum::<f64>()
                    / l as f64;
                worst = worst.max((got - want).abs());
            }
        }
    }
    Ok(Check { name: "coherent sampler vs lattice average", worst, detail: format!("{} instances", cases.len()) })
}

fn fermion(seed: u64) -> anyhow::Result<Check> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (n, depth, t) in [(2, 1, 1), (2, 2, 2), (3, 1, 2), (3, 2, 4)] {
        let p = DmeraParams::new(n, depth, 2, 1, t)?;
        let c = build_dmera(p, &mut RandomFermionic::new(seed))?;
        let l = p.linear_size();
        for x in 0..l {
            let support = [QubitCoord::new(n, &[x]), QubitCoord::new(n, &[(x + 1) % l])];
            for alg in [Algorithm::LayerSweep, Algorithm::MinPccPeel] {
                let fc = compile_fermionic_pcc(&c, &support, alg)?;
                worst = worst.max(fermi_check(&c, &support, &fc)?.0);
                if fc.physical.machine_qubit_count != fc.qubit_path_count {
                    worst = f64::INFINITY;
                }
                count += 1;
            }
        }
    }
    Ok(Check { name: "fermionic cones vs uncompiled chain", worst, detail: format!("{count} compilations") })
}

fn costs() -> anyhow::Result<Check> {
    let p = DmeraParams::new(4, 2, 2, 2, 2)?;
    let opts = CoherentOptions::default();
    let a = coherent_budget(p, TGateModel::Amortized, 0.01, &opts)?;
    let b = coherent_budget(p, TGateModel::Amortized, 0.005, &opts)?;
    let worst = [
        (a.items_sum() - a.total_t).abs() / a.total_t,
        (b.total_t / a.total_t - 2.0).abs(),
        (b.machine_qubits as f64 - a.machine_qubits as f64).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(Check { name: "coherent report bookkeeping", worst, detail: "items sum, 1/eps scaling".into() })
}

pub fn run(a: VerifyArgs) -> anyhow::Result<bool> {
    let checks = [compiler(a.instances, a.seed)?, cshift()?, sampler(a.seed)?, fermion(a.seed)?, costs()?];
    let all_ok = checks.iter().all(|c| c.worst < TOL);
    let mut text = format!(
        "# dmera {VERSION}\n# command: verify\n# config: {}\n# seed: {}\n",
        json!({"instances": a.instances, "tolerance": TOL}),
        a.seed
    );
    for c in &checks {
        let verdict = if c.worst < TOL { "PASS" } else { "FAIL" };
        text += &format!("{verdict} {}: max deviation {:.3e} ({})\n", c.name, c.worst, c.detail);
    }
    text += if all_ok { "all checks passed\n" } else { "some checks failed\n" };
    emit(&a.out, &text)?;
    Ok(all_ok)
}
