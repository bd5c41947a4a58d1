//! Fault-tolerant resource accounting: sample counts, T-gate totals and
//! qubit budgets for incoherent sampling and amplitude estimation.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::circuit::{build_dmera, Circuit, DmeraParams, QubitCoord};
use crate::compile::{compile_min_pcc_peel, machine_qubit_count};
use crate::error::{DmeraError, Result};
use crate::payload::CliffordTags;
use crate::pcc::extract_pcc;
use crate::sampler::{build_coherent_sampler, ceil_log2};

/// Cited T-count of the best known phase-estimation approach, kept for comparison.
pub const QPE_BASELINE_T: f64 = 2.0e6;
/// T gates charged per ancilla bit for the uniform-superposition preparation.
pub const DEFAULT_C_PREP: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondAxis {
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerm {
    pub coefficient: f64,
    pub axis: BondAxis,
    pub kind: String,
}

/// Nearest-neighbour translation-invariant Hamiltonian. Every term is taken
/// to have operator norm at most 1; that is the caller's contract.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub terms: Vec<HamiltonianTerm>,
}

impl HamiltonianSpec {
    pub fn coefficient_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }
}

/// Fermi-Hubbard with hopping `t` and on-site `u`, after the shift that
/// makes the interaction term (u/4) Z Z. Hopping counts with norm t per bond
/// direction.
pub fn hubbard_coeffs(t: f64, u: f64) -> HamiltonianSpec {
    let term = |coefficient, axis, kind: &str| HamiltonianTerm { coefficient, axis, kind: kind.into() };
    HamiltonianSpec {
        terms: vec![
            term(t, BondAxis::X, "hopping"),
            term(t, BondAxis::Y, "hopping"),
            term(u / 4.0, BondAxis::X, "interaction"),
        ],
    }
}

/// Constant subtracted from the shifted Hamiltonian at filling `eta`.
pub fn energy_offset(u: f64, eta: f64) -> f64 {
    u * (eta / 2.0 - 0.25)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(DmeraError::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

/// Ceiling that ignores float noise a few ulps above an integer.
fn ceil_clean(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// M = ceil((sum |coefficients|)^2 / eps^2).
pub fn sample_complexity(spec: &HamiltonianSpec, epsilon: f64) -> Result<u64> {
    check_epsilon(epsilon)?;
    let ratio = spec.coefficient_sum() / epsilon;
    Ok(ceil_clean(ratio * ratio) as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "value", rename_all = "snake_case")]
pub enum TGateModel {
    Amortized,
    PerRotation(u32),
    Pessimistic,
    Custom(f64),
}

impl TGateModel {
    pub const ALL_FIXED: [TGateModel; 4] = [
        TGateModel::Amortized,
        TGateModel::PerRotation(10),
        TGateModel::PerRotation(50),
        TGateModel::Pessimistic,
    ];

    /// T gates per two-qubit gate.
    pub fn c_t(&self) -> Result<f64> {
        match *self {
            TGateModel::Amortized => Ok(4.0),
            TGateModel::PerRotation(k) if (10..=50).contains(&k) => Ok(15.0 * k as f64),
            TGateModel::PerRotation(k) => Err(DmeraError::InvalidArgument(format!(
                "per-rotation cost must lie in 10..=50, got {k}"
            ))),
            TGateModel::Pessimistic => Ok(750.0),
            TGateModel::Custom(c) if c >= 4.0 && c.is_finite() => Ok(c),
            TGateModel::Custom(c) => {
                Err(DmeraError::InvalidArgument(format!("custom C_T must be at least 4, got {c}")))
            }
        }
    }

    /// Parses `amortized`, `per-rotation:K`, `pessimistic` or `custom:C`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || DmeraError::InvalidArgument(format!("unknown T-gate model '{s}'"));
        let m = match s.split_once(':') {
            None if s == "amortized" => TGateModel::Amortized,
            None if s == "pessimistic" => TGateModel::Pessimistic,
            Some(("per-rotation", k)) => TGateModel::PerRotation(k.parse().map_err(|_| bad())?),
            Some(("custom", c)) => TGateModel::Custom(c.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        m.c_t()?;
        Ok(m)
    }

    pub fn label(&self) -> String {
        match self {
            TGateModel::Amortized => "amortized".into(),
            TGateModel::PerRotation(k) => format!("per-rotation:{k}"),
            TGateModel::Pessimistic => "pessimistic".into(),
            TGateModel::Custom(c) => format!("custom:{c}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Incoherent,
    Coherent,
}

/// Size of one incoherent run: cone gates and compiled machine qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PccStats {
    pub two_qubit_gates: usize,
    pub machine_qubits: usize,
}

impl PccStats {
    /// Cone of a nearest-neighbour pair at the origin along x, compiled with
    /// the cone-peeling allocator.
    pub fn for_params(params: DmeraParams) -> Result<Self> {
        let c = build_dmera(params, &mut CliffordTags)?;
        let mut b = vec![0; params.d as usize];
        b[0] = 1;
        let support = [QubitCoord::new(params.n, &vec![0; params.d as usize]), QubitCoord::new(params.n, &b)];
        Self::for_support(&c, &support)
    }

    pub fn for_support(c: &Circuit, support: &[QubitCoord]) -> Result<Self> {
        let rc = extract_pcc(c, support)?;
        let pc = compile_min_pcc_peel(&rc.to_layered());
        Ok(PccStats { two_qubit_gates: rc.gate_count(), machine_qubits: machine_qubit_count(&pc) })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostItem {
    pub label: String,
    pub per_run: f64,
    pub t_gates: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub strategy: Strategy,
    pub machine_qubits: usize,
    pub two_qubit_gates_per_run: usize,
    #[serde(rename = "C_T")]
    pub c_t: f64,
    pub measurements_or_queries: u64,
    #[serde(rename = "total_T")]
    pub total_t: f64,
    #[serde(rename = "baseline_T")]
    pub baseline_t: f64,
    pub items: Vec<CostItem>,
    pub notes: Vec<String>,
    pub params: Value,
}

impl CostReport {
    pub fn items_sum(&self) -> f64 {
        self.items.iter().map(|i| i.t_gates).sum()
    }

    pub fn exceeds_baseline(&self) -> bool {
        self.total_t > self.baseline_t
    }
}

/// total = M * n_2Q * C_T.
pub fn incoherent_budget(stats: &PccStats, tmodel: TGateModel, m: u64) -> Result<CostReport> {
    let c_t = tmodel.c_t()?;
    let per_run = stats.two_qubit_gates as f64 * c_t;
    let total = m as f64 * per_run;
    Ok(CostReport {
        strategy: Strategy::Incoherent,
        machine_qubits: stats.machine_qubits,
        two_qubit_gates_per_run: stats.two_qubit_gates,
        c_t,
        measurements_or_queries: m,
        total_t: total,
        baseline_t: QPE_BASELINE_T,
        items: vec![CostItem { label: "circuit runs".into(), per_run, t_gates: total }],
        notes: vec![],
        params: json!({"t_model": tmodel.label(), "M": m}),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CShiftCost {
    pub toffoli: usize,
    pub cnot: usize,
    pub t_gates: usize,
    pub ancilla: usize,
}

/// Closed-form cost of one cShift: ell^d ceil(log2 T) Toffolis, two CNOTs
/// and eight T gates per Toffoli, d ceil(log2 T) control qubits.
pub fn cshift_cost(ell: usize, period: usize, d: u32) -> Result<CShiftCost> {
    if ell < 1 || period < 1 || !(1..=2).contains(&d) {
        return Err(DmeraError::InvalidArgument(format!(
            "cshift_cost needs ell >= 1, T >= 1, d in {{1, 2}}; got ({ell}, {period}, {d})"
        )));
    }
    let bits = ceil_log2(period);
    let toffoli = ell.pow(d) * bits;
    Ok(CShiftCost { toffoli, cnot: 2 * toffoli, t_gates: 8 * toffoli, ancilla: d as usize * bits })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentOptions {
    /// Queries = query_constant / epsilon.
    pub query_constant: f64,
    /// T gates per ancilla bit of the uniform-superposition preparation.
    pub c_prep: f64,
}

impl Default for CoherentOptions {
    fn default() -> Self {
        CoherentOptions { query_constant: 1.0, c_prep: DEFAULT_C_PREP }
    }
}

/// Amplitude estimation with Q = U R0 U^dagger R. U is the shift-averaged
/// sampler with no resets; the query count is kept real so the total scales
/// exactly as 1/epsilon, and its ceiling is what gets reported.
pub fn coherent_budget(
    params: DmeraParams,
    tmodel: TGateModel,
    epsilon: f64,
    opts: &CoherentOptions,
) -> Result<CostReport> {
    check_epsilon(epsilon)?;
    if !(opts.query_constant > 0.0) || !(opts.c_prep >= 0.0) {
        return Err(DmeraError::InvalidArgument("query constant must be positive and c_prep non-negative".into()));
    }
    let c_t = tmodel.c_t()?;
    let c = build_dmera(params, &mut CliffordTags)?;
    let cc = build_coherent_sampler(&c, 0)?;
    let n = params.n as f64;
    let d = params.d;
    let bits = ceil_log2(params.period as usize);
    let ell = cc.ell().max(1);
    let shift = cshift_cost(ell, params.period as usize, d)?;
    let qubits = cc.data_qubits + params.n as usize * d as usize * bits;
    let queries = opts.query_constant / epsilon;

    let u_gates = cc.cone_gates as f64 * c_t;
    // one cShift pass per axis per scale
    let u_shift = n * d as f64 * shift.t_gates as f64;
    let u_prep = opts.c_prep * n * d as f64 * bits as f64;
    let u_total = u_gates + u_shift + u_prep;
    // reflection about |0...0>: an (m-1)-controlled Z, m-2 Toffolis at 4 T each
    let r0 = 4.0 * qubits.saturating_sub(2) as f64;
    let per_query = [
        ("U cone gates", u_gates),
        ("U cShift", u_shift),
        ("U superposition prep", u_prep),
        ("U dagger", u_total),
        ("R0 reflection", r0),
        ("R observable reflection", 0.0),
    ];
    let items: Vec<CostItem> = per_query
        .iter()
        .map(|&(label, per_run)| CostItem { label: label.into(), per_run, t_gates: per_run * queries })
        .collect();
    let total = items.iter().map(|i| i.t_gates).sum();
    Ok(CostReport {
        strategy: Strategy::Coherent,
        machine_qubits: qubits,
        two_qubit_gates_per_run: cc.cone_gates,
        c_t,
        measurements_or_queries: ceil_clean(queries) as u64,
        total_t: total,
        baseline_t: QPE_BASELINE_T,
        items,
        notes: vec![
            format!("query constant {} (queries = constant / epsilon)", opts.query_constant),
            format!("superposition prep charged {} T per ancilla bit", opts.c_prep),
            format!("ell = {ell} from the widest shift window"),
        ],
        params: json!({
            "n": params.n, "D": params.depth, "r": params.r, "d": params.d, "T": params.period,
            "t_model": tmodel.label(), "epsilon": epsilon,
        }),
    })
}
