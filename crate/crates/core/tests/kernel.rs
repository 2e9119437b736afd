use std::time::Instant;

use euclid_core::{
    canonical_key, intersect, Circle, Line, Point, Primitive, RigidMotion, Tolerance,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SPAN: f64 = 100.0;

fn random_primitive(rng: &mut impl Rng) -> Primitive {
    if rng.gen_bool(0.5) {
        let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        Line::from_coeffs(t.cos(), t.sin(), rng.gen_range(-SPAN..SPAN)).unwrap().into()
    } else {
        let c = Point::new(rng.gen_range(-SPAN..SPAN), rng.gen_range(-SPAN..SPAN));
        Circle::new(c, rng.gen_range(1.0..SPAN)).unwrap().into()
    }
}

/// Bounding diagonal of everything the pair can reach inside the sampling box.
fn pair_tolerance() -> Tolerance {
    Tolerance::with_diameter(2.0 * (4.0 * SPAN) * std::f64::consts::SQRT_2).unwrap()
}

#[test]
fn random_pairs_incidence_and_symmetry() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xE0C1);
    let tol = pair_tolerance();
    let bound = 1e-9 * tol.scene_diameter();
    let (mut pairs, mut points) = (0, 0);
    while pairs < 10_000 {
        let p = random_primitive(&mut rng);
        let q = random_primitive(&mut rng);
        let Ok(pq) = intersect(&p, &q, &tol) else { continue };
        let qp = intersect(&q, &p, &tol).unwrap();
        assert_eq!(pq, qp, "asymmetric intersection of {p:?} and {q:?}");
        for x in &pq {
            assert!(p.residual(x) <= bound, "{x} off {p:?} by {}", p.residual(x));
            assert!(q.residual(x) <= bound, "{x} off {q:?} by {}", q.residual(x));
        }
        points += pq.len();
        pairs += 1;
    }
    assert!(points > 5_000, "too few intersecting pairs: {points}");
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn identical_circles_error_both_ways() {
    let c: Primitive = Circle::new(Point::new(1.0, 2.0), 3.0).unwrap().into();
    let tol = Tolerance::default();
    assert!(intersect(&c, &c, &tol).is_err());
}

#[test]
fn key_is_stable_under_sub_epsilon_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let tol = pair_tolerance();
    for _ in 0..2_000 {
        let p = random_primitive(&mut rng);
        let d = tol.eps() * 0.4;
        let q = match p {
            Primitive::Line(l) => Line::from_coeffs(l.a(), l.b(), l.c() + d).unwrap().into(),
            Primitive::Circle(c) => Circle::new(c.center(), c.radius() + d).unwrap().into(),
        };
        let (kp, kq) = (canonical_key(&p, &tol), canonical_key(&q, &tol));
        assert!(kp.is_adjacent(&kq) || kp.is_adjacent_flipped(&kq));
        assert!(p.approx_eq(&q, tol.eps()));
    }
}

fn arb_primitive() -> impl Strategy<Value = Primitive> {
    prop_oneof![
        (0.0..std::f64::consts::TAU, -SPAN..SPAN)
            .prop_map(|(t, c)| Line::from_coeffs(t.cos(), t.sin(), c).unwrap().into()),
        (-SPAN..SPAN, -SPAN..SPAN, 1.0..SPAN)
            .prop_map(|(x, y, r)| Circle::new(Point::new(x, y), r).unwrap().into()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn rigid_motion_equivariance(
        p in arb_primitive(),
        q in arb_primitive(),
        angle in 0.0..std::f64::consts::TAU,
        dx in -SPAN..SPAN,
        dy in -SPAN..SPAN,
    ) {
        let tol = pair_tolerance();
        let m = RigidMotion::new(angle, dx, dy);
        let Ok(before) = intersect(&p, &q, &tol) else { return Ok(()) };
        let after = intersect(&m.apply_primitive(&p), &m.apply_primitive(&q), &tol).unwrap();
        // Near-tangent pairs may legitimately flip between 1 and 2 points.
        let slack = 1e3 * tol.eps();
        let near_tangent = before.len() == 2 && before[0].distance(&before[1]) < slack;
        prop_assume!(!near_tangent && before.len() != 1);
        prop_assert_eq!(before.len(), after.len());
        for x in &before {
            let y = m.apply(x);
            let nearest = after.iter().map(|a| a.distance(&y)).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest <= 1e-9 * tol.scene_diameter(), "{} vs {:?}", y, after);
        }
    }
}
