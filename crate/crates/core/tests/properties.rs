use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use resfin_core::matrix::{encode_action, extract_finite_action, Tolerances};
use resfin_core::paradox::{
    block_masses, decide_paradoxical, equidecompose, invariant_measure_lp, measure_to_model, verify_certificate,
    verify_equidecomposition, verify_measure, ActionContext, ContextCaps, MeasuredJoin,
};
use resfin_core::rational::{q, Rational};
use resfin_core::symbolic::algebraic_fixed_points;
use resfin_core::symbolic::snf::{abs_determinant, smith_normal_form};
use resfin_core::system::{FiniteSample, GroupRingElement, Polytope, SampleImage, SampleMetric, ShiftSpace};
use resfin_core::zsystems::{build_eps_graph, chain_recurrent_set, EpsGraph};
use resfin_core::{check_witness, Error, FiniteAction, Point, Resolution, SystemDescriptor};
use serde::{Deserialize, Serialize};

const DEN: i64 = 48;

fn arc(a: i64, b: i64) -> i64 {
    let d = (a - b).rem_euclid(DEN);
    d.min(DEN - d)
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

/// Distinct circle points `k/DEN`, arbitrary images, a threshold `e/DEN`.
fn circle_sample() -> impl Strategy<Value = (Vec<i64>, Vec<i64>, i64)> {
    (1usize..=10).prop_flat_map(|n| {
        (
            proptest::sample::subsequence((0..DEN).collect::<Vec<_>>(), n).prop_shuffle(),
            proptest::collection::vec(0..DEN, n),
            1..=DEN / 2,
        )
    })
}

fn sample_of(points: &[i64], images: &[i64]) -> FiniteSample {
    FiniteSample::new(
        SampleMetric::Circle(points.iter().map(|&x| q(x, DEN)).collect()),
        vec![images.iter().map(|&y| SampleImage::Coordinate(q(y, DEN))).collect()],
    )
    .unwrap()
}

fn small_action(max: usize, rank: usize) -> impl Strategy<Value = FiniteAction> {
    (1..=max).prop_flat_map(move |n| {
        proptest::collection::vec(permutation(n), rank).prop_map(move |t| FiniteAction::new(n, t).unwrap())
    })
}

fn det_oracle(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det_oracle(&minor)
        })
        .sum()
}

#[derive(Serialize, Deserialize)]
struct Wrapped(#[serde(with = "resfin_core::rational::serde_rational")] Rational);

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn actions_accept_exactly_bijections(table in proptest::collection::vec(0usize..6, 1..7)) {
        let n = table.len();
        let bijective = table.iter().all(|&x| x < n) && {
            let mut s = table.clone();
            s.sort_unstable();
            s.dedup();
            s.len() == n
        };
        prop_assert_eq!(FiniteAction::new(n, vec![table]).is_ok(), bijective);
    }

    #[test]
    fn witness_defects_are_exact_suprema((points, images, e) in circle_sample(), seed in any::<u64>()) {
        let n = points.len();
        let sample = sample_of(&points, &images);
        let system = SystemDescriptor::FiniteSample(sample);
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.rotate_left((seed as usize) % n);
        let action = FiniteAction::new(n, vec![sigma.clone()]).unwrap();
        let zeta: Vec<Point> = (0..n).map(Point::Sample).collect();
        let eps = q(e, DEN);
        let w = check_witness(&system, &action, &zeta, &[0], &eps, &Resolution::default()).unwrap();
        let worst = (0..n).map(|z| arc(images[z], points[sigma[z]])).max().unwrap();
        prop_assert_eq!(&w.equivariance_defect, &q(worst, DEN));
        prop_assert_eq!(&w.density_defect, &Rational::zero());
        prop_assert_eq!(w.passes(), w.density_defect < eps && w.equivariance_defect < eps);
    }

    #[test]
    fn eps_graph_edges_are_exact((points, images, e) in circle_sample()) {
        let n = points.len();
        let g = build_eps_graph(&sample_of(&points, &images), &q(e, DEN)).unwrap();
        let want: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| arc(images[i], points[j]) < e).collect();
        prop_assert_eq!(g.edges(), want);
        let mesh = (0..n).map(|i| (0..n).map(|j| arc(images[i], points[j])).min().unwrap()).max().unwrap();
        if e > mesh {
            prop_assert!(g.adj.iter().all(|l| !l.is_empty()));
        }
    }

    #[test]
    fn chain_recurrence_is_return_reachability(
        n in 1usize..=12,
        edges in proptest::collection::vec((0usize..12, 0usize..12), 0..40),
    ) {
        let edges: Vec<(usize, usize)> = edges.into_iter().filter(|&(a, b)| a < n && b < n).collect();
        let g = EpsGraph::from_edges(n, &edges, q(1, 2));
        let mut reach = vec![vec![false; n]; n];
        for &(a, b) in &edges {
            reach[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    reach[i][j] |= reach[i][k] && reach[k][j];
                }
            }
        }
        let want: Vec<usize> = (0..n).filter(|&x| reach[x][x]).collect();
        prop_assert_eq!(chain_recurrent_set(&g), want);
    }

    #[test]
    fn table_metrics_accepted_iff_metric(upper in proptest::collection::vec(1i64..8, 6)) {
        // 4 points, upper triangle in row order
        let mut t = vec![vec![0i64; 4]; 4];
        let mut it = upper.iter();
        for i in 0..4 {
            for j in i + 1..4 {
                let v = *it.next().unwrap();
                t[i][j] = v;
                t[j][i] = v;
            }
        }
        let triangle = (0..4).all(|i| (0..4).all(|j| (0..4).all(|k| t[i][k] <= t[i][j] + t[j][k])));
        let table = t.iter().map(|r| r.iter().map(|&v| q(v, 1)).collect()).collect();
        let maps = vec![(0..4).map(|i| SampleImage::Index((i + 1) % 4)).collect()];
        prop_assert_eq!(FiniteSample::new(SampleMetric::Table(table), maps).is_ok(), triangle);
    }

    #[test]
    fn smith_form_divides_and_keeps_determinant(entries in proptest::collection::vec(-6i64..=6, 16), n in 1usize..=4) {
        let m: Vec<Vec<i64>> = (0..n).map(|i| entries[i * 4..i * 4 + n].to_vec()).collect();
        let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        let snf = smith_normal_form(&big);
        for w in snf.diagonal.windows(2) {
            prop_assert!(!w[0].is_negative());
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && (&w[1] % &w[0]).is_zero()));
        }
        let prod: BigInt = snf.diagonal.iter().product();
        let det = det_oracle(&m).abs();
        prop_assert_eq!(abs_determinant(&big), BigInt::from(det));
        prop_assert_eq!(prod, BigInt::from(det));
    }

    #[test]
    fn periodic_point_counts_match_fourier_product(
        terms in proptest::collection::vec((-2i64..=2, -3i64..=3), 1..4),
        n in 1usize..=6,
    ) {
        let f = GroupRingElement::new(terms.iter().copied());
        prop_assert!(f.terms().iter().all(|&(_, c)| c != 0));
        let prod: f64 = (0..n)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                let (re, im) = terms.iter().fold((0.0, 0.0), |(re, im), &(e, c)| {
                    (re + c as f64 * (e as f64 * theta).cos(), im + c as f64 * (e as f64 * theta).sin())
                });
                re.hypot(im)
            })
            .product();
        match algebraic_fixed_points(&f, n) {
            Ok((order, factors)) => {
                prop_assert!((order.to_f64().unwrap() - prod).abs() <= 1e-6 * prod.max(1.0));
                prop_assert_eq!(factors.iter().product::<BigInt>(), order);
            }
            Err(Error::Infinite) => prop_assert!(prod.abs() < 1e-6),
            Err(e) => prop_assert!(false, "unexpected {}", e),
        }
    }

    #[test]
    fn rationals_round_trip_as_strings(p in -1000i64..1000, d in 1i64..1000) {
        let r = q(p, d);
        let json = serde_json::to_string(&Wrapped(r.clone())).unwrap();
        let expect = if r.is_integer() { format!("\"{}\"", r.numer()) } else { format!("\"{}/{}\"", r.numer(), r.denom()) };
        prop_assert_eq!(&json, &expect);
        let back: Wrapped = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.0, r);
    }

    #[test]
    fn exact_permutation_matrices_give_back_the_action(action in small_action(12, 2)) {
        let got = extract_finite_action(&encode_action(&action), &Tolerances::default()).unwrap();
        prop_assert_eq!(got.action, action);
    }

    #[test]
    fn interval_maps_accepted_iff_hull_is_invariant(a in -3i64..=3, b in -3i64..=3, d in 1i64..=3) {
        let (a, b) = (q(a, d), q(b, d));
        let inside = |x: &Rational| *x >= Rational::zero() && *x <= q(1, 1);
        let ok = inside(&b) && inside(&(&a + &b));
        let p = Polytope::new(vec![vec![q(0, 1)], vec![q(1, 1)]], vec![vec![a]], vec![b]);
        prop_assert_eq!(p.is_ok(), ok);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn paradox_and_measure_exclude_each_other(action in small_action(5, 2), mask in 1u32..32) {
        let caps = ContextCaps::default();
        let ctx = ActionContext::finite(&action, 1, &caps).unwrap();
        let target: Vec<usize> = (0..ctx.domain.len()).filter(|&a| mask >> (a % 5) & 1 == 1).collect();
        prop_assume!(!target.is_empty());
        let cert = decide_paradoxical(&ctx, &target, 2, 1, &caps).unwrap();
        let lp = invariant_measure_lp(&ctx, &target).unwrap();
        if let Some(c) = &cert {
            prop_assert!(verify_certificate(&ctx, c).unwrap());
            prop_assert!(lp.is_none());
        }
        if let Some(m) = &lp {
            prop_assert!(verify_measure(&ctx, m).unwrap());
        }
        // finite actions carry the counting measure
        prop_assert!(cert.is_none());
    }

    #[test]
    fn equidecompositions_balance_invariant_measures(action in small_action(5, 2), mask in 1u32..32) {
        let caps = ContextCaps::default();
        let ctx = ActionContext::finite(&action, 1, &caps).unwrap();
        let n = ctx.domain.len();
        let source: Vec<usize> = (0..n).filter(|&a| mask >> (a % 5) & 1 == 1).collect();
        prop_assume!(!source.is_empty());
        let moved: Vec<usize> = source.iter().map(|&a| action.apply(0, a)).collect();
        let src: Vec<(usize, u32)> = source.iter().map(|&a| (a, 0)).collect();
        let dst: Vec<(usize, u32)> = moved.iter().map(|&a| (a, 0)).collect();
        let eq = equidecompose(&ctx, &src, &dst, &caps).unwrap();
        let eq = eq.expect("a set and its translate are equidecomposable");
        prop_assert!(verify_equidecomposition(&ctx, &eq).unwrap());
        let all: Vec<usize> = (0..n).collect();
        let m = invariant_measure_lp(&ctx, &all).unwrap().expect("finite action has a measure");
        let mass = |atoms: &[usize]| -> Rational {
            atoms.iter().flat_map(|&a| ctx.refine[a].iter()).map(|&e| m.weights[e].clone()).sum()
        };
        for piece in &eq.pieces {
            let image: Vec<usize> = piece.atoms.iter().flat_map(|&a| ctx.image[piece.translator][a].clone()).collect();
            let from = mass(&piece.atoms);
            let to: Rational = image.iter().map(|&e| m.weights[e].clone()).sum();
            prop_assert_eq!(from, to);
        }
        prop_assert_eq!(mass(&source), mass(&moved));
    }

    #[test]
    fn product_measure_models_are_exact(a in 1i64..20, b in 1i64..20) {
        let space = ShiftSpace::full(2, 1);
        let weights = [q(a, a + b), q(b, a + b)];
        let join = MeasuredJoin::bernoulli(&space, &weights).unwrap();
        let system = SystemDescriptor::Shift(space);
        let radius = q(1, 100);
        let model = measure_to_model(&system, &join, &q(1, 1), &radius, 1000, &Resolution::default()).unwrap();
        prop_assert!(model.perturbation <= radius);
        for (mass, atom) in block_masses(&model).iter().zip(&join.atoms) {
            let gap = if *mass > atom.mass { mass - &atom.mass } else { &atom.mass - mass };
            prop_assert!(gap <= model.perturbation);
        }
        prop_assert_eq!(model.witness.equivariance_defect, Rational::zero());
    }
}
