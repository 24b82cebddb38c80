use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use maxklin_bench::{enumeration_instance, quench_instance, solver_instance};
use maxklin_core::classical::{greedy_step, run_once, RunConfig, Variant};
use maxklin_core::instance::{round_randomized, Assignment, FractionalAssignment};
use maxklin_core::oracle::brute_force_optimum;
use maxklin_core::polycombine::{combine_dichotomy, restrict_to_line};
use maxklin_core::quench::{Observable, QuenchSim};
use maxklin_core::rng::{derive_seed, rng_from_seed, uniform01, uniform_sign};

fn bench_evaluate(c: &mut Criterion) {
    let inst = solver_instance();
    let mut rng = rng_from_seed(1);
    let z = Assignment::new((0..inst.n()).map(|_| uniform_sign(&mut rng)).collect()).unwrap();
    let v = FractionalAssignment::new(
        (0..inst.n())
            .map(|_| uniform01(&mut rng) * 2.0 - 1.0)
            .collect(),
    )
    .unwrap();
    c.bench_function("evaluate_spin_360_terms", |b| {
        b.iter(|| inst.evaluate(black_box(&z)).unwrap())
    });
    c.bench_function("evaluate_fractional_360_terms", |b| {
        b.iter(|| inst.evaluate_fractional(black_box(&v)).unwrap())
    });
    c.bench_function("force_all_sites", |b| {
        b.iter(|| {
            (0..inst.n())
                .map(|i| inst.force(&v, i).unwrap())
                .sum::<f64>()
        })
    });
}

fn bench_combining(c: &mut Criterion) {
    let inst = solver_instance();
    let step = greedy_step(&inst, 7);
    c.bench_function("restrict_to_line_k3", |b| {
        b.iter(|| restrict_to_line(&inst, black_box(&step.w1), black_box(&step.w2)).unwrap())
    });
    c.bench_function("combine_dichotomy_k3_grid1e4", |b| {
        b.iter(|| combine_dichotomy(&inst, &step.w1, &step.w2, 1.0, 10_000).unwrap())
    });
    let config = RunConfig {
        variant: Variant::Greedy,
        epsilon: 1.0,
        repetitions: 1,
        grid_points: 10_000,
        seed: 0,
    };
    let mut seed = 0u64;
    c.bench_function("solver_run_once_n120", |b| {
        b.iter_batched(
            || {
                seed += 1;
                let mut cfg = config.clone();
                cfg.seed = derive_seed(99, seed);
                cfg
            },
            |cfg| run_once(&inst, &cfg).unwrap(),
            BatchSize::SmallInput,
        )
    });
    let u = FractionalAssignment::new(vec![0.3; inst.n()]).unwrap();
    c.bench_function("round_randomized_n120", |b| {
        b.iter(|| round_randomized(black_box(&u), 5))
    });
}

fn bench_enumeration(c: &mut Criterion) {
    let inst = enumeration_instance();
    let mut group = c.benchmark_group("enumeration");
    group.sample_size(10);
    group.bench_function("brute_force_n20", |b| {
        b.iter(|| brute_force_optimum(&inst, 24).unwrap())
    });
    group.finish();
}

fn bench_propagation(c: &mut Criterion) {
    let inst = quench_instance();
    let sim = QuenchSim::new(&inst, 2.0, 20).unwrap();
    let psi = sim.plus_state();
    c.bench_function("apply_h_n12", |b| b.iter(|| sim.apply_h(black_box(&psi))));
    let mut group = c.benchmark_group("propagation");
    group.sample_size(20);
    group.bench_function("evolve_n12_t1", |b| {
        b.iter(|| sim.evolve(&psi, 1.0, 1e-10).unwrap())
    });
    let evolved = sim.evolve(&psi, 0.5, 1e-10).unwrap();
    group.bench_function("duality_observable_n12", |b| {
        b.iter(|| sim.duality_observable(black_box(&evolved)))
    });
    group.bench_function("expectation_x_n12", |b| {
        b.iter(|| sim.expectation(black_box(&evolved), Observable::X))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_evaluate,
    bench_combining,
    bench_enumeration,
    bench_propagation
);
criterion_main!(benches);
