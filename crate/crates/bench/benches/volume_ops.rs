use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use tumorseg::morphology::{connected_components, dilate, distance_transform};
use tumorseg::{compose_region, evaluate_case, run_pipeline, Connectivity, LesionwiseParams, PostprocRules, RegionId};
use tumorseg_bench::{case, BRATS_DIMS};

fn morphology(c: &mut Criterion) {
    let mut group = c.benchmark_group("morphology");
    group.sample_size(10);
    for dims in [[64, 64, 48], BRATS_DIMS] {
        let label = format!("{}x{}x{}", dims[0], dims[1], dims[2]);
        let wt = compose_region(&case(dims, 3).gt, RegionId::Wt);
        for conn in [Connectivity::Face6, Connectivity::Vertex26] {
            group.bench_with_input(BenchmarkId::new(format!("ccl_{}", conn.neighbor_count()), &label), &wt, |b, m| {
                b.iter(|| connected_components(black_box(m), conn).unwrap())
            });
        }
        group.bench_with_input(BenchmarkId::new("edt", &label), &wt, |b, m| {
            b.iter(|| distance_transform(black_box(m)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("dilate_1mm", &label), &wt, |b, m| {
            b.iter(|| dilate(black_box(m), 1.0))
        });
    }
    group.finish();
}

fn end_to_end(c: &mut Criterion) {
    let mut group = c.benchmark_group("case");
    group.sample_size(10);
    let params = LesionwiseParams::default();
    let rules = PostprocRules::default();
    for dims in [[64, 64, 48], BRATS_DIMS] {
        let label = format!("{}x{}x{}", dims[0], dims[1], dims[2]);
        let input = case(dims, 5);
        group.bench_function(BenchmarkId::new("evaluate_case", &label), |b| {
            b.iter(|| evaluate_case("bench", black_box(&input.pred), black_box(&input.gt), &params).unwrap())
        });
        group.bench_function(BenchmarkId::new("pipeline", &label), |b| {
            b.iter(|| run_pipeline(std::slice::from_ref(black_box(&input.probs)), &rules).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, morphology, end_to_end);
criterion_main!(benches);
