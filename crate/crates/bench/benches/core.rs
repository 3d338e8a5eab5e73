use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use rsponge::dyadic::codec;
use rsponge::equidecomp::{build_xy, ProbabilityExperiment, ProbabilityMode, ProbabilityQuery};
use rsponge::motions::{f_cover, q, GridMatrix, RigidMotion};
use rsponge::search::{detect_subcongruent_exact, Disjointness};
use rsponge::sponge::{generate, DEFAULT_BUDGET};
use rsponge::{DyadicComplex, Schedule};

fn toy() -> Schedule {
    Schedule::toy(&[(1, 1), (1, 2), (1, 2), (1, 2)], &[1, 1, 1, 1]).unwrap()
}

fn generation(c: &mut Criterion) {
    let s = toy();
    let mut g = c.benchmark_group("generate");
    for depth in [1usize, 2, 3] {
        g.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |b, &d| {
            b.iter(|| generate(&s, black_box(7), d, DEFAULT_BUDGET).unwrap())
        });
    }
    g.finish();
}

fn codec_round_trip(c: &mut Criterion) {
    let m = generate(&toy(), 3, 3, DEFAULT_BUDGET).unwrap().last().clone();
    let text = codec::encode(&m);
    c.bench_function("dycx/encode", |b| b.iter(|| codec::encode(black_box(&m))));
    c.bench_function("dycx/decode", |b| b.iter(|| codec::decode(black_box(&text)).unwrap()));
}

fn detector(c: &mut Criterion) {
    let t = generate(&toy(), 11, 1, DEFAULT_BUDGET).unwrap();
    let m = t.last().clone();
    // a single cube: the search runs to exhaustion
    let lone = DyadicComplex::from_coords(2, [[1, 2, 1]]).unwrap();
    c.bench_function("detect/level2_half", |b| {
        b.iter(|| detect_subcongruent_exact(black_box(&m), 1, 2, Disjointness::Closed).unwrap())
    });
    c.bench_function("detect/level2_exhaustive", |b| {
        b.iter(|| detect_subcongruent_exact(black_box(&lone), 1, 2, Disjointness::Closed).unwrap())
    });
}

fn cover(c: &mut Criterion) {
    let r = RigidMotion::from_quaternion([2, 1, 0, 0], [q(1, 8), q(0, 1), q(1, 16)]).unwrap();
    let b3 = DyadicComplex::full(3);
    let mut g = c.benchmark_group("f_cover");
    for n in [3u32, 5] {
        let grid = GridMatrix::round(&r.to_mat4(), n).unwrap().to_int_affine();
        g.bench_with_input(BenchmarkId::from_parameter(n), &grid, |bch, grid| bch.iter(|| f_cover(grid, black_box(&b3))));
    }
    g.finish();
}

fn two_copies(c: &mut Criterion) {
    let t = generate(&toy(), 5, 3, DEFAULT_BUDGET).unwrap();
    c.bench_function("build_xy/depth3", |b| b.iter(|| build_xy(black_box(&t.complexes), 1).unwrap()));
}

fn probability(c: &mut Criterion) {
    let s = Schedule::toy(&[(1, 1), (2, 64)], &[0, 2]).unwrap();
    let q = ProbabilityQuery {
        depth: 1,
        s_level: 2,
        resolution: 2,
        disjointness: Disjointness::Closed,
    };
    c.bench_function("probability/exact_pairs", |b| {
        b.iter(|| {
            let mut x = ProbabilityExperiment::new(&s, q).unwrap();
            x.run(ProbabilityMode::Exact { budget: 10_000 }).unwrap()
        })
    });
}

criterion_group!(benches, generation, codec_round_trip, detector, cover, two_copies, probability);
criterion_main!(benches);
