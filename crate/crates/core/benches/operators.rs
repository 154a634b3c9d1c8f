use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use maxlip_core::par::{self, Backend};
use maxlip_core::{hl_max, lambda_var, max_commutator, sharp_max, CubeFamily, Grid, GridFunction, VariableExponent};
use std::hint::black_box;

const BACKENDS: [(&str, Backend); 2] = [("sequential", Backend::Sequential), ("parallel", Backend::Parallel)];

fn wavy(grid: Grid) -> GridFunction {
    GridFunction::sample(grid, |x| (7.0 * x[0]).sin() + x.get(1).map_or(0.0, |y| (3.0 * y).cos())).unwrap()
}

fn maximal(c: &mut Criterion) {
    let mut group = c.benchmark_group("maximal");
    group.sample_size(10).warm_up_time(Duration::from_millis(500));
    for (dim, n) in [(1, 1024), (2, 64)] {
        let grid = Grid::unit(dim, n).unwrap();
        let f = wavy(grid);
        for (name, backend) in BACKENDS {
            let id = format!("{name}/d{dim}n{n}");
            par::set_backend(backend);
            group.bench_function(BenchmarkId::new("hl_max", &id), |bch| {
                bch.iter(|| black_box(hl_max(&f, CubeFamily::Full)))
            });
            group.bench_function(BenchmarkId::new("sharp_max", &id), |bch| {
                bch.iter(|| black_box(sharp_max(&f, CubeFamily::Full)))
            });
        }
        let small = Grid::unit(dim, if dim == 1 { 256 } else { 16 }).unwrap();
        let (fs, bs) = (wavy(small), GridFunction::sample(small, |x| x[0]).unwrap());
        for (name, backend) in BACKENDS {
            par::set_backend(backend);
            let id = format!("{name}/d{dim}n{}", small.cells_per_axis());
            group.bench_function(BenchmarkId::new("max_commutator", &id), |bch| {
                bch.iter(|| black_box(max_commutator(&bs, &fs, CubeFamily::Full).unwrap()))
            });
        }
    }
    par::set_backend(Backend::Parallel);
    group.finish();
}

fn functionals(c: &mut Criterion) {
    let mut group = c.benchmark_group("lipschitz");
    group.sample_size(10).warm_up_time(Duration::from_millis(500));
    let grid = Grid::unit(1, 128).unwrap();
    let b = GridFunction::sample(grid, |x| x[0]).unwrap();
    let q = VariableExponent::new(GridFunction::sample(grid, |x| 2.0 + x[0]).unwrap()).unwrap();
    for (name, backend) in BACKENDS {
        par::set_backend(backend);
        group.bench_function(BenchmarkId::new("lambda_var", name), |bch| {
            bch.iter(|| black_box(lambda_var(&b, 0.5, &q, CubeFamily::Full).unwrap()))
        });
    }
    par::set_backend(Backend::Parallel);
    group.finish();
}

criterion_group!(benches, maximal, functionals);
criterion_main!(benches);
