use criterion::{black_box, criterion_group, criterion_main, Criterion};

use cmpz::{percent_error, z_asymptotic, z_exact, CmpParams, ErrorTable};

fn bench_z_exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("z_exact");
    for &(l, n) in &[(1.9, 0.1), (1.0, 1.0), (10.0, 3.0), (400.0, 0.5)] {
        let p = CmpParams::new(l, n).unwrap();
        g.bench_function(format!("lambda={l},nu={n}"), |b| {
            b.iter(|| z_exact(black_box(p), 1e-13).unwrap())
        });
    }
    g.finish();
}

fn bench_z_asymptotic(c: &mut Criterion) {
    let mut g = c.benchmark_group("z_asymptotic");
    let p = CmpParams::new(1.9, 0.1).unwrap();
    for order in [1u32, 3, 8] {
        g.bench_function(format!("order={order}"), |b| {
            b.iter(|| z_asymptotic(black_box(p), order).unwrap())
        });
    }
    g.finish();
}

fn bench_percent_error(c: &mut Criterion) {
    let p = CmpParams::new(1.9, 1.9).unwrap();
    c.bench_function("percent_error order=3", |b| {
        b.iter(|| percent_error(black_box(p), 3, 1e-13).unwrap())
    });
}

fn bench_table1(c: &mut Criterion) {
    let mut g = c.benchmark_group("tables");
    g.sample_size(10);
    g.bench_function("preset_table1", |b| {
        b.iter(|| ErrorTable::preset_table1(black_box(1e-13)).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_z_exact,
    bench_z_asymptotic,
    bench_percent_error,
    bench_table1
);
criterion_main!(benches);
