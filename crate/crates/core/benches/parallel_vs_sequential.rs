use criterion::{criterion_group, criterion_main, Criterion};

use cwewt::potential::{grid_scan, GridSpec, Plane};
use cwewt::trap_analysis::minima_map;
use cwewt::{load_preset, Execution, TrapModel};

fn model(exec: Execution) -> TrapModel {
    let mut cfg = load_preset("C1").expect("preset");
    cfg.analysis.execution = exec;
    TrapModel::new(cfg).expect("model")
}

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("parallel_vs_sequential");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let m = model(exec);
        let spec = GridSpec::plane(Plane::Y0X, 3e-6, (50e-9, 800e-9), 201);
        group.bench_function(format!("grid_scan_y0x_201/{exec:?}"), |b| {
            b.iter(|| grid_scan(&m, &spec, exec).expect("scan"))
        });
        group.bench_function(format!("minima_map_41/{exec:?}"), |b| {
            b.iter(|| minima_map(&m, 2e-6, 41).expect("map"))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
