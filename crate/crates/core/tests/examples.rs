use num_complex::Complex64;
use resfin_core::matrix::{
    berg_projection, cut_projection, op_norm, threshold_value, CMatrix, OrbitRepresentation, Tolerances,
};
use resfin_core::paradox::{decide_paradoxical, invariant_measure_lp, verify_certificate, ActionContext, ContextCaps};
use resfin_core::rational::{q, Rational};
use resfin_core::system::{CompactPoint, CompactifiedZ, FiniteSample, PeriodicConfig, SampleImage, SampleMetric, ShiftSpace};
use resfin_core::zsystems::{build_eps_graph, chain_recurrent_set, model_from_chains, recurrence_scan};
use resfin_core::{check_witness, Error, FiniteAction, Point, Resolution, SystemDescriptor};
use std::collections::BTreeSet;

fn period_two_model() -> (SystemDescriptor, FiniteAction, Vec<Point>) {
    let words: [&[usize]; 4] = [&[0], &[1], &[0, 1], &[1, 0]];
    let zeta = words.iter().map(|w| Point::Config(PeriodicConfig::periodic(w).unwrap())).collect();
    let action = FiniteAction::new(4, vec![vec![0, 1, 3, 2]]).unwrap();
    (SystemDescriptor::Shift(ShiftSpace::full(2, 1)), action, zeta)
}

#[test]
fn period_two_points_miss_a_radius_one_window() {
    // windows of length 3 read off the four points
    let words: [&[usize]; 4] = [&[0], &[1], &[0, 1], &[1, 0]];
    let seen: BTreeSet<Vec<usize>> =
        words.iter().flat_map(|w| (0..w.len()).map(move |s| (0..3).map(|i| w[(s + i) % w.len()]).collect())).collect();
    assert_eq!(seen.len(), 4);
    assert!(!seen.contains(&vec![0, 0, 1]));

    let (sys, action, zeta) = period_two_model();
    let res = Resolution::default();
    let w = check_witness(&sys, &action, &zeta, &[0], &q(1, 2), &res).unwrap();
    assert_eq!(w.density_defect, q(1, 2));
    assert_eq!(w.equivariance_defect, q(0, 1));
    assert!(!w.passes());
    assert!(check_witness(&sys, &action, &zeta, &[0], &q(3, 5), &res).unwrap().passes());
}

fn north_south() -> FiniteSample {
    let pts: Vec<Rational> = (0..16).map(|k| q(k, 16)).collect();
    let maps = vec![(0..16)
        .map(|k| match k {
            0 | 8 => SampleImage::Index(k),
            k if k < 8 => SampleImage::Index(k + 1),
            k => SampleImage::Index(k - 1),
        })
        .collect()];
    FiniteSample::new(SampleMetric::Circle(pts), maps).unwrap()
}

#[test]
fn north_south_chains_stay_at_the_poles() {
    let s = north_south();
    let eps = q(1, 20);
    let g = build_eps_graph(&s, &eps).unwrap();
    // brute force: walks of length <= 16 returning home
    let recurrent: Vec<usize> = (0..16)
        .filter(|&x| {
            let mut frontier: BTreeSet<usize> = [x].into();
            (0..16).any(|_| {
                frontier = frontier.iter().flat_map(|&v| g.adj[v].iter().copied()).collect();
                frontier.contains(&x)
            })
        })
        .collect();
    assert_eq!(chain_recurrent_set(&g), recurrent);
    assert_eq!(recurrent, vec![0, 8]);

    let w = model_from_chains(&s, &eps, &Resolution::default()).unwrap();
    assert_eq!(w.zeta, vec![Point::Sample(0), Point::Sample(8)]);
    assert_eq!(w.action, FiniteAction::trivial(2, 1));
    assert_eq!(w.density_defect, q(1, 4));
}

#[test]
fn acyclic_samples_have_no_chains() {
    let s = FiniteSample::new(
        SampleMetric::Line(vec![q(0, 1), q(1, 1), q(2, 1)]),
        vec![vec![SampleImage::Coordinate(q(1, 1)), SampleImage::Coordinate(q(2, 1)), SampleImage::Coordinate(q(3, 1))]],
    )
    .unwrap();
    assert!(matches!(model_from_chains(&s, &q(1, 2), &Resolution::default()), Err(Error::NoChain)));
}

#[test]
fn golden_rotation_recurs_and_translation_does_not() {
    let (p, den) = (144i64, 233i64);
    let pts: Vec<Rational> = (0..den).map(|k| q(k, den)).collect();
    let maps = vec![(0..den as usize).map(|k| SampleImage::Index((k + p as usize) % den as usize)).collect()];
    let sys = SystemDescriptor::FiniteSample(FiniteSample::new(SampleMetric::Circle(pts), maps).unwrap());
    let r = recurrence_scan(&sys, &Point::Sample(0), &q(1, 20), 1, 200).unwrap().expect("rotation recurs");
    let arc = |k: i64| {
        let d = k.rem_euclid(den);
        d.min(den - d)
    };
    assert!(20 * arc(p * (r.n as i64 + r.m as i64)) < den);
    // lexicographically least
    for n in 1..=r.n as i64 {
        let last = if n == r.n as i64 { r.m as i64 - 1 } else { 200 };
        assert!((1..=last).all(|m| 20 * arc(p * (n + m)) >= den), "({n}, m) recurs earlier");
    }

    let z = SystemDescriptor::CompactifiedZ(CompactifiedZ::standard());
    let zero = Point::Compact(CompactPoint::Int { copy: 0, n: 0 });
    assert_eq!(recurrence_scan(&z, &zero, &q(1, 4), 1, 100).unwrap(), None);
}

#[test]
fn boundary_certificate_survives_serialization_and_rejects_tampering() {
    let caps = ContextCaps::default();
    let ctx = ActionContext::boundary(2, 2, 2, &caps).unwrap();
    let all: Vec<usize> = (0..ctx.domain.len()).collect();
    let cert = decide_paradoxical(&ctx, &all, 2, 1, &caps).unwrap().expect("Tarski pieces");
    let back = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
    assert!(verify_certificate(&ctx, &back).unwrap());
    assert!(invariant_measure_lp(&ctx, &all).unwrap().is_none());

    let mut short = cert.clone();
    short.pieces.pop();
    assert!(!verify_certificate(&ctx, &short).unwrap());
    let mut stale = ctx.clone();
    stale.translators.pop();
    assert!(matches!(verify_certificate(&stale, &cert), Err(Error::StaleContext(_))));
}

#[test]
fn compactified_line_is_not_paradoxical() {
    let caps = ContextCaps::default();
    let ctx = ActionContext::compactified(&CompactifiedZ::standard(), 2, 5, &caps).unwrap();
    let all: Vec<usize> = (0..ctx.domain.len()).collect();
    assert_eq!(decide_paradoxical(&ctx, &all, 2, 1, &caps).unwrap(), None);
    assert!(invariant_measure_lp(&ctx, &all).unwrap().is_some());
}

#[test]
fn threshold_at_a_fifth() {
    // ((1 + d)^2 + (1 + d) + 1) d
    assert!((threshold_value(0.2) - 0.728).abs() < 1e-12);
    assert!(threshold_value(0.2) >= 0.25);
    assert!(threshold_value(0.01) < 0.25);
}

#[test]
fn two_dimensional_cut_matches_geometry() {
    let s = 0.01f64;
    let c = (1.0 - s * s).sqrt();
    let re = |v: [f64; 4]| CMatrix::from_row_slice(2, 2, &v.map(|x| Complex64::new(x, 0.0)));
    let p = re([1.0, 0.0, 0.0, 0.0]);
    let qm = re([s * s, s * c, s * c, c * c]);
    let rep = cut_projection(&p, &qm, 0.25, &Tolerances::default()).unwrap();
    // q' is the projection onto e_2; ||q' - q|| = sin
    assert!(op_norm(&(&rep.q_prime - re([0.0, 0.0, 0.0, 1.0]))) < 1e-12);
    assert!((rep.q_prime_minus_q - s).abs() < 1e-12);
    assert!(rep.q_prime_minus_q <= 0.06);
    assert!((rep.pq_norm - s).abs() < 1e-12);
}

#[test]
fn berg_placement_needs_r_beyond_n() {
    let orbit = OrbitRepresentation::rotation(0.618_033_988_75, 0.0, -200, 400, &[1]);
    assert!(matches!(berg_projection(&orbit, 8, 8, -30), Err(Error::PlacementError(_))));
    assert!(matches!(berg_projection(&orbit, 8, 20, -10), Err(Error::PlacementError(_))));
}
