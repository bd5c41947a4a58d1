use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use dmera_core::cost::{HamiltonianTerm, BondAxis, PccStats};
use dmera_core::fermi::{jw_generator, jw_number, Algorithm, FermionTemplate, RandomFermionic};
use dmera_core::plateau::{fit_plane, r_squared, run_sweep, SweepConfig};
use dmera_core::sim::{run_unitary, NoGates};
use dmera_core::*;

use crate::output::{csv_body, csv_header, emit, json_doc};
use crate::ranges::parse_list;
use crate::usage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PayloadKind {
    Clifford,
    Unitary,
    Fermionic,
}

/// Geometry flags shared by most subcommands.
#[derive(Args, Clone, Debug, Serialize)]
pub struct Geometry {
    /// Expansion factor per scale and axis.
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    /// Spatial dimension (1 or 2).
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    /// Gate-sharing period in final-lattice units (a power of r).
    #[arg(long = "T", default_value_t = 1)]
    #[serde(rename = "T")]
    pub period: u32,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long = "D")]
    pub depth: u32,
    #[command(flatten)]
    pub geo: Geometry,
    #[arg(long, value_enum, default_value_t = PayloadKind::Clifford)]
    pub payload: PayloadKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn params(n: u32, depth: u32, g: &Geometry) -> anyhow::Result<DmeraParams> {
    Ok(DmeraParams::new(n, depth, g.r, g.d, g.period)?)
}

fn build_with(p: DmeraParams, kind: PayloadKind, seed: u64) -> anyhow::Result<Circuit> {
    Ok(match kind {
        PayloadKind::Clifford => build_dmera(p, &mut CliffordTags)?,
        PayloadKind::Unitary => build_dmera(p, &mut SeededUnitaries::new(seed))?,
        PayloadKind::Fermionic => build_dmera(p, &mut RandomFermionic::new(seed))?,
    })
}

pub fn build(a: BuildArgs) -> anyhow::Result<bool> {
    let p = params(a.n, a.depth, &a.geo)?;
    let c = build_with(p, a.payload, a.seed)?;
    let stats = circuit_stats(&c);
    let config = json!({"n": a.n, "D": a.depth, "geometry": a.geo, "payload": a.payload});
    let result = json!({"stats": stats, "circuit": c.to_json()});
    emit(&a.out, &json_doc("build", config, Some(a.seed), result))?;
    Ok(true)
}

/// Nearest-neighbour pair at the origin along x.
fn origin_pair(p: &DmeraParams, x: usize) -> [QubitCoord; 2] {
    let l = p.linear_size();
    let mut a = vec![0; p.d as usize];
    a[0] = x % l;
    let mut b = a.clone();
    b[0] = (x + 1) % l;
    [QubitCoord::new(p.n, &a), QubitCoord::new(p.n, &b)]
}

#[derive(Args, Debug)]
#[command(after_help = "CSV columns: n, D, d, r, pcc_gates, max_width, width_bound, walk_width, widths\n(widths: per-scale cone widths, fine to coarse, separated by ';')")]
pub struct PccArgs {
    /// Scale counts: `6`, `3..6` or `3,5`.
    #[arg(long)]
    pub n: String,
    /// Depths, same forms as --n.
    #[arg(long = "D")]
    pub depth: String,
    #[command(flatten)]
    pub geo: Geometry,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Columns: n, D, d, r, pcc_gates, max_width, width_bound (2Dr/(r-1))^d,
/// walk_width (0.8 D r/(r-1))^d, widths (per scale, fine to coarse, `;`).
#[derive(Serialize)]
struct PccRow {
    n: u32,
    #[serde(rename = "D")]
    depth: u32,
    d: u32,
    r: u32,
    pcc_gates: usize,
    max_width: usize,
    width_bound: f64,
    walk_width: f64,
    widths: String,
}

pub fn pcc(a: PccArgs) -> anyhow::Result<bool> {
    let ns = parse_list(&a.n)?;
    let ds = parse_list(&a.depth)?;
    let grid: Vec<(u32, u32)> = ns.iter().flat_map(|&n| ds.iter().map(move |&d| (n, d))).collect();
    let rows = grid
        .par_iter()
        .map(|&(n, depth)| -> anyhow::Result<PccRow> {
            let p = params(n, depth, &a.geo)?;
            let c = build_dmera(p, &mut CliffordTags)?;
            let rc = extract_pcc(&c, &origin_pair(&p, 0))?;
            let (profile, max_width) = width_profile(&rc);
            let rf = p.r as f64;
            Ok(PccRow {
                n,
                depth,
                d: p.d,
                r: p.r,
                pcc_gates: rc.gate_count(),
                max_width,
                width_bound: (2.0 * depth as f64 * rf / (rf - 1.0)).powi(p.d as i32),
                walk_width: (0.8 * depth as f64 * rf / (rf - 1.0)).powi(p.d as i32),
                widths: profile.values().rev().map(|w| w.to_string()).collect::<Vec<_>>().join(";"),
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let config = json!({"n": ns, "D": ds, "geometry": a.geo});
    let text = match a.format {
        Format::Csv => csv_header("pcc", &config, None) + &csv_body(&rows)?,
        Format::Json => json_doc("pcc", config, None, json!(rows)),
    };
    emit(&a.out, &text)?;
    Ok(true)
}

#[derive(Args, Debug)]
#[command(after_help = "CSV columns: n, D, d, r, pcc_gates, cone_wires, sweep_qubits, peel_qubits, sweep_resets, peel_resets, sweep_ms, peel_ms\n(timing columns are empty unless --timing is given)")]
pub struct CompileArgs {
    #[arg(long)]
    pub n: String,
    #[arg(long = "D")]
    pub depth: String,
    #[command(flatten)]
    pub geo: Geometry,
    /// Fill the wall-clock columns (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Columns: n, D, d, r, pcc_gates, cone_wires, sweep_qubits, peel_qubits,
/// sweep_resets, peel_resets, sweep_ms, peel_ms (blank without --timing).
#[derive(Serialize)]
struct CompileRow {
    n: u32,
    #[serde(rename = "D")]
    depth: u32,
    d: u32,
    r: u32,
    pcc_gates: usize,
    cone_wires: usize,
    sweep_qubits: usize,
    peel_qubits: usize,
    sweep_resets: usize,
    peel_resets: usize,
    sweep_ms: Option<f64>,
    peel_ms: Option<f64>,
}

pub fn compile(a: CompileArgs) -> anyhow::Result<bool> {
    let ns = parse_list(&a.n)?;
    let ds = parse_list(&a.depth)?;
    let grid: Vec<(u32, u32)> = ns.iter().flat_map(|&n| ds.iter().map(move |&d| (n, d))).collect();
    // timings are taken sequentially so they do not compete for cores
    let run_point = |&(n, depth): &(u32, u32)| -> anyhow::Result<CompileRow> {
        let p = params(n, depth, &a.geo)?;
        let c = build_dmera(p, &mut CliffordTags)?;
        let rc = extract_pcc(&c, &origin_pair(&p, 0))?;
        let lc = rc.to_layered();
        let t0 = Instant::now();
        let sweep = compile_layer_sweep(&lc);
        let t1 = Instant::now();
        let peel = compile_min_pcc_peel(&lc);
        let t2 = Instant::now();
        let ms = |d: std::time::Duration| a.timing.then(|| d.as_secs_f64() * 1e3);
        Ok(CompileRow {
            n,
            depth,
            d: p.d,
            r: p.r,
            pcc_gates: rc.gate_count(),
            cone_wires: lc.wires().len(),
            sweep_qubits: machine_qubit_count(&sweep),
            peel_qubits: machine_qubit_count(&peel),
            sweep_resets: sweep.reset_count(),
            peel_resets: peel.reset_count(),
            sweep_ms: ms(t1 - t0),
            peel_ms: ms(t2 - t1),
        })
    };
    let rows = if a.timing {
        grid.iter().map(run_point).collect::<anyhow::Result<Vec<_>>>()?
    } else {
        grid.par_iter().map(run_point).collect::<anyhow::Result<Vec<_>>>()?
    };
    let config = json!({"n": ns, "D": ds, "geometry": a.geo, "timing": a.timing});
    let text = match a.format {
        Format::Csv => csv_header("compile", &config, None) + &csv_body(&rows)?,
        Format::Json => json_doc("compile", config, None, json!(rows)),
    };
    emit(&a.out, &text)?;
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlateauTable {
    Points,
    Operators,
}

#[derive(Args, Debug)]
#[command(after_help = "CSV columns (--table points): n, D, operators, samples, mean_K, estimate, sigma, ln_estimate\nCSV columns (--table operators): n, D, operator_id, samples, mean_K, estimate, sigma\nA final '# fit:' comment line holds the log-linear fit over the grid.")]
pub struct PlateauArgs {
    #[arg(long, default_value = "3..6")]
    pub n: String,
    #[arg(long = "D", default_value = "1..4")]
    pub depth: String,
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    /// Spatial dimension; the template experiment is two-dimensional by default.
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Measurement operators per grid point.
    #[arg(long, default_value_t = 20)]
    pub ops: usize,
    /// Templates per operator.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
    /// 100 operators x 10^6 templates; overrides --ops and --samples.
    #[arg(long)]
    pub full_scale: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `points`: one row per (n, D); `operators`: one row per operator.
    #[arg(long, value_enum, default_value_t = PlateauTable::Points)]
    pub table: PlateauTable,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Columns: n, D, operators, samples, mean_K, estimate, sigma (bootstrap
/// over operators), ln_estimate.
#[derive(Serialize)]
struct PointRow {
    n: u32,
    #[serde(rename = "D")]
    depth: u32,
    operators: usize,
    samples: usize,
    #[serde(rename = "mean_K")]
    mean_k: f64,
    estimate: f64,
    sigma: f64,
    ln_estimate: f64,
}

pub fn plateau(a: PlateauArgs) -> anyhow::Result<bool> {
    let cfg = SweepConfig {
        ns: parse_list(&a.n)?,
        depths: parse_list(&a.depth)?,
        d: a.d,
        r: a.r,
        operators: if a.full_scale { 100 } else { a.ops },
        samples: if a.full_scale { 1_000_000 } else { a.samples },
        seed: a.seed,
        bootstrap_resamples: a.bootstrap,
    };
    let points = run_sweep(&cfg)?;
    let rows: Vec<PointRow> = points
        .iter()
        .map(|p| PointRow {
            n: p.n,
            depth: p.depth,
            operators: p.estimate.operator_count,
            samples: p.estimate.sample_count,
            mean_k: p.mean_k,
            estimate: p.estimate.grand_mean,
            sigma: p.estimate.sigma,
            ln_estimate: p.estimate.grand_mean.ln(),
        })
        .collect();
    let fit = summary_fit(&points);
    let config = json!({"sweep": cfg, "table": a.table});
    let text = match (a.format, a.table) {
        (Format::Csv, table) => {
            let body = match table {
                PlateauTable::Points => csv_body(&rows)?,
                PlateauTable::Operators => {
                    csv_body(&points.iter().flat_map(|p| p.rows.iter()).collect::<Vec<_>>())?
                }
            };
            let tail = match &fit {
                Some(f) => format!("# fit: {f}\n"),
                None => String::new(),
            };
            csv_header("plateau", &config, Some(a.seed)) + &body + &tail
        }
        (Format::Json, PlateauTable::Points) => {
            json_doc("plateau", config, Some(a.seed), json!({"points": rows, "fit": fit}))
        }
        (Format::Json, PlateauTable::Operators) => json_doc(
            "plateau",
            config,
            Some(a.seed),
            json!({"operators": points.iter().flat_map(|p| p.rows.iter()).collect::<Vec<_>>(), "fit": fit}),
        ),
    };
    emit(&a.out, &text)?;
    Ok(true)
}

/// ln(estimate) = a D + b n + c, and R^2 of mean |K| against D^2 n.
fn summary_fit(points: &[dmera_core::plateau::GridPoint]) -> Option<Value> {
    let pts: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|p| (p.depth as f64, p.n as f64, p.estimate.grand_mean.ln()))
        .collect();
    let plane = fit_plane(&pts).ok()?;
    let xs: Vec<f64> = points.iter().map(|p| (p.depth * p.depth * p.n) as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_k).collect();
    Some(json!({
        "slope_D": plane[0],
        "slope_n": plane[1],
        "intercept": plane[2],
        "r2_mean_K_vs_D2n": r_squared(&xs, &ys),
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Hubbard,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyArg {
    Incoherent,
    Coherent,
    Both,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long, value_enum, default_value_t = Model::Hubbard)]
    pub model: Model,
    /// Hubbard hopping.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Hubbard on-site interaction.
    #[arg(long, default_value_t = 4.0)]
    pub u: f64,
    /// Filling; when given, the energy offset is reported.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Custom model: comma-separated bond coefficients.
    #[arg(long)]
    pub coeffs: Option<String>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Both)]
    pub strategy: StrategyArg,
    /// amortized | per-rotation:K | pessimistic | custom:C
    #[arg(long, default_value = "amortized")]
    pub ct: String,
    /// Circuit used for n_2Q, qubits and the coherent sampler.
    #[arg(long, default_value_t = 6)]
    pub n: u32,
    #[arg(long = "D", default_value_t = 2)]
    pub depth: u32,
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long = "T", default_value_t = 2)]
    pub period: u32,
    #[arg(long, default_value_t = 1.0)]
    pub query_constant: f64,
    #[arg(long, default_value_t = dmera_core::cost::DEFAULT_C_PREP)]
    pub c_prep: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn estimate(a: EstimateArgs) -> anyhow::Result<bool> {
    let spec = match a.model {
        Model::Hubbard => hubbard_coeffs(a.t, a.u),
        Model::Custom => {
            let raw = a.coeffs.as_deref().ok_or_else(|| usage("--model custom needs --coeffs"))?;
            let terms = raw
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map(|coefficient| HamiltonianTerm { coefficient, axis: BondAxis::X, kind: "custom".into() })
                        .map_err(|_| usage(format!("bad coefficient '{c}'")))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            HamiltonianSpec { terms }
        }
    };
    let tmodel = TGateModel::parse(&a.ct)?;
    let m = sample_complexity(&spec, a.eps)?;
    let p = DmeraParams::new(a.n, a.depth, a.r, a.d, a.period)?;
    let mut reports = Vec::new();
    if matches!(a.strategy, StrategyArg::Incoherent | StrategyArg::Both) {
        let stats = PccStats::for_params(p)?;
        reports.push(incoherent_budget(&stats, tmodel, m)?);
    }
    if matches!(a.strategy, StrategyArg::Coherent | StrategyArg::Both) {
        let opts = CoherentOptions { query_constant: a.query_constant, c_prep: a.c_prep };
        reports.push(coherent_budget(p, tmodel, a.eps, &opts).context("coherent budget")?);
    }
    let config = json!({
        "model": a.model, "t": a.t, "u": a.u, "eta": a.eta, "coeffs": a.coeffs, "eps": a.eps,
        "strategy": a.strategy, "ct": tmodel.label(), "params": p,
        "query_constant": a.query_constant, "c_prep": a.c_prep,
    });
    let result = json!({
        "hamiltonian": spec,
        "coefficient_sum": spec.coefficient_sum(),
        "M": m,
        "energy_offset": a.eta.map(|eta| energy_offset(a.u, eta)),
        "reports": reports,
    });
    emit(&a.out, &json_doc("estimate", config, None, result))?;
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgArg {
    Sweep,
    Peel,
}

#[derive(Args, Debug)]
pub struct FermiArgs {
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long = "D", default_value_t = 1)]
    pub depth: u32,
    #[arg(long = "T", default_value_t = 1)]
    pub period: u32,
    /// Left site of the observed pair.
    #[arg(long, default_value_t = 0)]
    pub x: usize,
    #[arg(long, value_enum, default_value_t = AlgArg::Peel)]
    pub alg: AlgArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Two-mode observables: n_i, n_j, and the real and imaginary parts of the
/// hopping and pairing bilinears, as JW images on qubits (qa, qb).
pub fn pair_observables(qa: usize, qb: usize, between: &[usize]) -> Vec<(&'static str, Observable)> {
    use std::f64::consts::FRAC_PI_2;
    let g = |kind, phi| jw_generator(&FermionTemplate { kind, theta: 1.0, phi }, qa, qb, between);
    vec![
        ("n_i", jw_number(qa)),
        ("n_j", jw_number(qb)),
        ("n_i n_j", g(FermionKind::Density, 0.0)),
        ("hop_re", g(FermionKind::Hop, 0.0)),
        ("hop_im", g(FermionKind::Hop, FRAC_PI_2)),
        ("pair_re", g(FermionKind::Pair, 0.0)),
        ("pair_im", g(FermionKind::Pair, FRAC_PI_2)),
    ]
}

/// Largest deviation between the compiled cone and the uncompiled circuit
/// mapped in wire order.
pub fn fermi_check(c: &Circuit, support: &[QubitCoord; 2], fc: &dmera_core::fermi::FermionicCompilation) -> anyhow::Result<(f64, Vec<Value>)> {
    let nw = c.num_wires();
    let ord = ModeOrdering::row_major(0..nw);
    let mut ins = Vec::new();
    for layer in c.layers() {
        for &g in &layer.gates {
            let Payload::Fermionic(t) = c.payload(g) else {
                return Err(usage("fermionic payload expected"));
            };
            ins.extend(jw_map_gate(&FermionGate::new(*t, c.gate(g).wires), &ord)?);
        }
    }
    let full = run_unitary(&PhysicalCircuit { machine_qubit_count: nw, instructions: ins, ..Default::default() }, &NoGates)?;
    let [wi, wj] = [c.wire_of(&support[0])?, c.wire_of(&support[1])?];
    let [qa, qb] = [fc.output_qubits[0], fc.output_qubits[1]];
    let between = |a: usize, b: usize| -> Vec<usize> { (a.min(b) + 1..a.max(b)).collect() };
    let full_obs = pair_observables(wi, wj, &between(wi, wj));
    let comp_obs = pair_observables(qa, qb, &between(qa, qb));
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for ((name, fo), (_, co)) in full_obs.iter().zip(&comp_obs) {
        let want = full.expectation(fo);
        let got = simulate_expectation(&fc.physical, &NoGates, co, &SimMode::ExactBranchSum)?;
        worst = worst.max((want - got).abs());
        rows.push(json!({"observable": name, "uncompiled": want, "compiled": got}));
    }
    Ok((worst, rows))
}

pub fn fermi(a: FermiArgs) -> anyhow::Result<bool> {
    let p = DmeraParams::new(a.n, a.depth, 2, 1, a.period)?;
    if p.system_size() > 22 {
        return Err(usage("the cross-check simulates the full chain: keep 2^n <= 22 modes"));
    }
    let c = build_dmera(p, &mut RandomFermionic::new(a.seed))?;
    let support = origin_pair(&p, a.x);
    let alg = match a.alg {
        AlgArg::Sweep => Algorithm::LayerSweep,
        AlgArg::Peel => Algorithm::MinPccPeel,
    };
    let fc = compile_fermionic_pcc(&c, &support, alg)?;
    let (worst, rows) = fermi_check(&c, &support, &fc)?;
    let ok = worst < 1e-9;
    let config = json!({"params": p, "x": a.x, "alg": a.alg});
    let result = json!({
        "machine_qubits": fc.physical.machine_qubit_count,
        "qubit_path_qubits": fc.qubit_path_count,
        "resets": fc.physical.reset_count(),
        "instructions": fc.physical.instructions.len(),
        "max_z_string": fc.max_string,
        "observables": rows,
        "max_deviation": worst,
        "pass": ok,
        "physical": fc.physical.to_json(),
    });
    emit(&a.out, &json_doc("fermi", config, Some(a.seed), result))?;
    Ok(ok)
}

pub use crate::verify::VerifyArgs;
