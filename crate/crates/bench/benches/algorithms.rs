use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resfin_core::matrix::{c, cut_projection, encode_action, extract_finite_action, CMatrix, Tolerances};
use resfin_core::paradox::{decide_paradoxical, invariant_measure_lp, ActionContext, ContextCaps};
use resfin_core::rational::q;
use resfin_core::symbolic::snf::{circulant, smith_normal_form};
use resfin_core::zsystems::{chain_recurrent_set, EpsGraph};
use resfin_core::FiniteAction;
use std::hint::black_box;

fn random_graph(n: usize, degree: usize, rng: &mut ChaCha8Rng) -> EpsGraph {
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..degree).map(move |_| a)).map(|a| (a, rng.gen_range(0..n))).collect();
    EpsGraph::from_edges(n, &edges, q(1, 10))
}

fn scc(cr: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut g = cr.benchmark_group("chain_recurrent_set");
    for n in [1_000, 10_000, 100_000] {
        let graph = random_graph(n, 2, &mut rng);
        g.bench_with_input(BenchmarkId::from_parameter(n), &graph, |b, graph| b.iter(|| chain_recurrent_set(black_box(graph))));
    }
    g.finish();
}

fn snf(cr: &mut Criterion) {
    let mut g = cr.benchmark_group("smith_normal_form");
    for n in [8, 32, 64] {
        let mut coeffs = vec![0i64; n];
        coeffs[0] = 3;
        coeffs[1] = -1;
        coeffs[n - 1] += -1;
        let m = circulant(&coeffs);
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| smith_normal_form(black_box(m))));
    }
    g.finish();
}

fn paradox(cr: &mut Criterion) {
    let caps = ContextCaps::default();
    let ctx = ActionContext::boundary(2, 2, 2, &caps).unwrap();
    let all: Vec<usize> = (0..ctx.domain.len()).collect();
    cr.bench_function("decide_paradoxical/boundary_2_2_2", |b| {
        b.iter(|| decide_paradoxical(black_box(&ctx), &all, 2, 1, &caps).unwrap())
    });
    let finite = FiniteAction::new(5, vec![vec![1, 2, 0, 4, 3], vec![0, 3, 2, 4, 1]]).unwrap();
    let fctx = ActionContext::finite(&finite, 2, &caps).unwrap();
    let fall: Vec<usize> = (0..fctx.domain.len()).collect();
    cr.bench_function("invariant_measure_lp/finite_5_r2", |b| b.iter(|| invariant_measure_lp(black_box(&fctx), &fall).unwrap()));
}

fn orthogonal(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0))).qr().q()
}

fn matrices(cr: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tol = Tolerances::default();
    let mut g = cr.benchmark_group("cut_projection");
    for d in [8, 32, 64] {
        let u = orthogonal(d, &mut rng);
        let (s, co) = (1e-3f64, (1.0 - 1e-6f64).sqrt());
        let p = u.column(0) * u.column(0).adjoint();
        let x = u.column(1) * c(co) + u.column(0) * c(s);
        let qm = &x * x.adjoint();
        g.bench_with_input(BenchmarkId::from_parameter(d), &(p, qm), |b, (p, qm)| {
            b.iter(|| cut_projection(black_box(p), black_box(qm), 0.25, &tol).unwrap())
        });
    }
    g.finish();

    let mut g = cr.benchmark_group("extract_finite_action");
    for n in [8, 32, 64] {
        let shift: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let flip: Vec<usize> = (0..n).map(|i| n - 1 - i).collect();
        let tuple = encode_action(&FiniteAction::new(n, vec![shift, flip]).unwrap());
        g.bench_with_input(BenchmarkId::from_parameter(n), &tuple, |b, t| b.iter(|| extract_finite_action(black_box(t), &tol).unwrap()));
    }
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = scc, snf, paradox, matrices
}
criterion_main!(benches);
