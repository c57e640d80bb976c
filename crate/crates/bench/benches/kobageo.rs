use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use kobageo::dynamics::{iterate_orbit, HoloMap, Moebius};
use kobageo::metric::{estimate_m_shell, metric_bounds, ShellBudget};
use kobageo::paths::{estimate_distance, DistanceBudget};
use kobageo::{Direction, C64};
use kobageo_bench::{ball2, bidisk, example51, example52, point};

fn metric(c: &mut Criterion) {
    let d51 = example51();
    let d52 = example52();
    let z = d51.base_point().clone();
    let w = point(&[(0.0, 0.0), (0.0, (-4.0f64).exp())]);
    let v = Direction::real(&[1.0, 0.0]).unwrap();
    let mut g = c.benchmark_group("metric_bounds");
    g.bench_function("example51_base", |b| b.iter(|| metric_bounds(&d51, black_box(&z), &v).unwrap()));
    g.bench_function("example52_flat", |b| b.iter(|| metric_bounds(&d52, black_box(&w), &v).unwrap()));
    g.bench_function("ball_exact", |b| {
        let d = ball2();
        let z = point(&[(0.3, 0.1), (0.0, 0.2)]);
        b.iter(|| metric_bounds(&d, black_box(&z), &v).unwrap())
    });
    g.finish();
}

fn distance(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimate_distance");
    g.sample_size(10);
    let bd = bidisk();
    let (z, w) = (point(&[(0.0, 0.0), (0.0, 0.0)]), point(&[(0.5, 0.0), (0.3, 0.0)]));
    let budget = DistanceBudget {
        max_segments: 16,
        ..DistanceBudget::default()
    };
    g.bench_function("bidisk_16_segments", |b| b.iter(|| estimate_distance(&bd, &z, &w, &budget).unwrap()));
    let d = example51();
    let base = d.base_point().clone();
    let other = point(&[(0.05, 0.0), (0.0, base.coords()[1].im + 0.05)]);
    let budget = DistanceBudget::for_domain(&d);
    g.bench_function("example51_default", |b| b.iter(|| estimate_distance(&d, &base, &other, &budget).unwrap()));
    g.finish();
}

fn shell(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimate_m_shell");
    g.sample_size(10);
    let d = example52();
    let budget = ShellBudget {
        points: 8,
        directions: 8,
        seed: 1,
    };
    g.bench_function("example52_r_1e-4", |b| b.iter(|| estimate_m_shell(&d, 1e-4, None, &budget).unwrap()));
    g.finish();
}

fn orbit(c: &mut Criterion) {
    let d = kobageo::Domain::from_spec(&kobageo::DomainSpec::unit_disk()).unwrap();
    let one = C64::new(1.0, 0.0);
    let f = HoloMap::DiskMoebius(Moebius::new(2.0 * one, one, one, 2.0 * one));
    let z = point(&[(0.0, 0.0)]);
    c.bench_function("iterate_orbit_disk_200", |b| b.iter(|| iterate_orbit(&d, &f, black_box(&z), 200).unwrap()));
}

criterion_group!(benches, metric, distance, shell, orbit);
criterion_main!(benches);
