use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mixident::transforms::gil_pelaez_pdf;
use mixident::{
    accessibility, mixtures, CharacteristicFunction, DifferentiatedErrorFunction, KernelDistribution,
    MixingDensity, MixtureModel, QuadratureConfig,
};

fn kernels(c: &mut Criterion) {
    let nb: KernelDistribution = "negbin:r=2.5,p=0.4".parse().unwrap();
    c.bench_function("negbin density", |b| b.iter(|| nb.density(black_box(7.0))));
    let g: KernelDistribution = "gamma:r=2,theta=1".parse().unwrap();
    c.bench_function("gamma cdf", |b| b.iter(|| g.cdf(black_box(1.7))));
    let de = DifferentiatedErrorFunction::new(1.0, 4.0).unwrap();
    c.bench_function("defun pdf", |b| b.iter(|| de.pdf(black_box(2.3))));
}

fn inversion(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let n: KernelDistribution = "normal:m=0,var=1".parse().unwrap();
    let cf = CharacteristicFunction::of_kernel(&n);
    c.bench_function("gil-pelaez normal", |b| b.iter(|| gil_pelaez_pdf(&cf, black_box(1.3), &cfg).unwrap()));
    let l: KernelDistribution = "laplace:m=0,sigma=1".parse().unwrap();
    let cf = CharacteristicFunction::of_kernel(&l);
    c.bench_function("gil-pelaez laplace", |b| b.iter(|| gil_pelaez_pdf(&cf, black_box(1.3), &cfg).unwrap()));
}

fn mixing(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let g = MixingDensity::parse("gamma:r=2,theta=1").unwrap();
    let mm = MixtureModel::new("poisson:lambda=1".parse().unwrap(), g).unwrap();
    c.bench_function("gamma-poisson cdf", |b| b.iter(|| mixtures::mixture_cdf(&mm, black_box(4.0), &cfg).unwrap()));
    c.bench_function("gamma-poisson sample 1e4", |b| b.iter(|| mixtures::sample_mixture(&mm, 10_000, 1).unwrap()));
    let m = accessibility::lookup("exp-to-laplace").unwrap();
    c.bench_function("verify exp-to-laplace", |b| b.iter(|| accessibility::verify_default(&m, 1e-10).unwrap()));
}

criterion_group!(benches, kernels, inversion, mixing);
criterion_main!(benches);
