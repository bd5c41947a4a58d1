use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dmera_core::plateau::TemplateWalker;
use dmera_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn circuit(n: u32, depth: u32) -> (Circuit, [QubitCoord; 2]) {
    let p = DmeraParams::new(n, depth, 2, 2, 2).unwrap();
    let c = build_dmera(p, &mut CliffordTags).unwrap();
    (c, [QubitCoord::new(n, &[0, 0]), QubitCoord::new(n, &[1, 0])])
}

fn pcc_extraction(cr: &mut Criterion) {
    let mut g = cr.benchmark_group("extract_pcc");
    for depth in [2, 4, 6] {
        let (c, support) = circuit(6, depth);
        g.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |b, _| {
            b.iter(|| extract_pcc(black_box(&c), &support).unwrap())
        });
    }
    g.finish();
}

fn compilers(cr: &mut Criterion) {
    let mut g = cr.benchmark_group("compile");
    for depth in [2, 4] {
        let (c, support) = circuit(6, depth);
        let lc = extract_pcc(&c, &support).unwrap().to_layered();
        g.bench_with_input(BenchmarkId::new("sweep", depth), &lc, |b, lc| b.iter(|| compile_layer_sweep(black_box(lc))));
        g.bench_with_input(BenchmarkId::new("peel", depth), &lc, |b, lc| b.iter(|| compile_min_pcc_peel(black_box(lc))));
    }
    g.finish();
}

fn template_mc(cr: &mut Criterion) {
    let mut g = cr.benchmark_group("template_sample");
    for depth in [1, 4] {
        let (c, support) = circuit(6, depth);
        let walker = TemplateWalker::new(&c, &support).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        g.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |b, _| {
            b.iter(|| walker.sample(&mut rng, 0, 0))
        });
    }
    g.finish();
}

criterion_group!(benches, pcc_extraction, compilers, template_mc);
criterion_main!(benches);
