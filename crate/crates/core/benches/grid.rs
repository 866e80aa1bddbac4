use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quadpart::{FieldContext, Parallelism, PartitionGrid};

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid");
    group.sample_size(10);
    for (d, max_x) in [(2, 40), (17, 80), (13, 60)] {
        let ctx = FieldContext::new(d).unwrap();
        for (name, par) in [
            ("sequential", Parallelism::Sequential),
            ("parallel", Parallelism::Parallel),
        ] {
            group.bench_with_input(
                BenchmarkId::new(name, format!("D={d},x≤{max_x}")),
                &ctx,
                |b, ctx| {
                    b.iter(|| {
                        let mut g = PartitionGrid::with_parallelism(ctx.clone(), par);
                        g.extend_to(max_x).unwrap();
                        g
                    })
                },
            );
        }
    }
    group.finish();
}

criterion_group!(benches, build);
criterion_main!(benches);
