//! Hot-path benchmarks: Weyl matrix assembly, twisted positive-definiteness
//! Gram builds, symbol quantization, and the chemical-potential solve.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ndarray::{Array1, Array2};

use cylwig_core::bosegas::{solve_mu, GasConfig};
use cylwig_core::cylmeasure::{bochner_pd_check, CylMeasure};
use cylwig_core::fockrep::{FockOracle, FourierGrid};
use cylwig_core::genfun::{twisted_pd_check, StateFamily};
use cylwig_core::semiclassics::Symbol2D;
use cylwig_core::{C64, PhaseSpace};

fn grid(n: usize) -> Vec<Vec<f64>> {
    let mut pts = Vec::new();
    let step = 1.8 / (n - 1) as f64;
    for i in 0..n {
        for j in 0..n {
            pts.push(vec![-0.9 + step * i as f64, -0.9 + step * j as f64]);
        }
    }
    pts
}

fn bench_weyl_matrix(c: &mut Criterion) {
    let mut g = c.benchmark_group("weyl_matrix");
    for &n in &[64usize, 128, 256] {
        let o = FockOracle::new(1, 0.1, n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| o.weyl_matrix(&[0.7, -0.4]).unwrap())
        });
    }
    g.finish();
}

fn bench_twisted_gram(c: &mut Criterion) {
    let sp = PhaseSpace::standard(1);
    let s = StateFamily::coherent(sp, vec![C64::new(0.4, -0.3)]).unwrap();
    let mut g = c.benchmark_group("twisted_pd_gram");
    for &n in &[5usize, 8] {
        let pts = grid(n);
        g.bench_with_input(BenchmarkId::from_parameter(pts.len()), &pts, |b, pts| {
            b.iter(|| twisted_pd_check(&s, 0.1, pts, 1e-10).unwrap())
        });
    }
    g.finish();
}

fn bench_bochner_gram(c: &mut Criterion) {
    let sp = PhaseSpace::standard(1);
    let m = CylMeasure::gaussian(sp, Array1::zeros(2), Array2::<f64>::eye(2)).unwrap();
    let pts = grid(5);
    c.bench_function("bochner_gram_25", |b| {
        b.iter(|| bochner_pd_check(&m, &pts, 1e-10).unwrap())
    });
}

fn bench_quantize(c: &mut Criterion) {
    let grid = FourierGrid { delta: 0.05, half_points: 16 };
    let sym = Symbol2D::gaussian_bump([0.3, -0.2], 1.0, grid);
    let o = FockOracle::new(1, 0.1, 64).unwrap();
    c.bench_function("quantize_33sq_n64", |b| {
        b.iter(|| o.quantize(|x| (sym.fhat)(x), &grid).unwrap())
    });
}

fn bench_solve_mu(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_mu");
    for &(d, beta, h) in &[(3usize, 500.0, 1e-4), (1usize, 2.0, 1e-4)] {
        let cfg = GasConfig::new(d, 1.0, beta, h).unwrap();
        g.bench_with_input(
            BenchmarkId::from_parameter(format!("d{d}_beta{beta}_h{h:.0e}")),
            &cfg,
            |b, cfg| b.iter(|| solve_mu(cfg).unwrap()),
        );
    }
    g.finish();
}

criterion_group!(
    benches,
    bench_weyl_matrix,
    bench_twisted_gram,
    bench_bochner_gram,
    bench_quantize,
    bench_solve_mu
);
criterion_main!(benches);
