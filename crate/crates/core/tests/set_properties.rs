mod common;

use nalgebra::{DMatrix, DVector, Vector2};
use proptest::prelude::*;
use rand::Rng;

use setprop_core::matrix::LinearOperator;
use setprop_core::sets::{
    box_approximation, support_expression, support_zonotope, Hyperrectangle, SetExpression,
    Zonotope,
};

use common::{random_unit, rng};

fn random_zonotope(seed: u64, n: usize, p: usize) -> Zonotope {
    let mut r = rng(seed);
    let c = DVector::from_fn(n, |_, _| r.random_range(-3.0..3.0));
    let g = DMatrix::from_fn(n, p, |_, _| r.random_range(-1.0..1.0));
    Zonotope::new(c, g).unwrap()
}

fn random_box(seed: u64, n: usize) -> Hyperrectangle {
    let mut r = rng(seed);
    let c: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
    let rad: Vec<f64> = (0..n).map(|_| r.random_range(0.0..2.0)).collect();
    Hyperrectangle::from_slices(&c, &rad).unwrap()
}

fn canonical(n: usize) -> Vec<DVector<f64>> {
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        out.push(e.clone());
        out.push(-e);
    }
    out
}

fn cross(o: Vector2<f64>, a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    (a - o).perp(&(b - o))
}

/// Vertices of the parallelogram `c + G[-1,1]²` in counter-clockwise order.
fn parallelogram(z: &Zonotope) -> Vec<Vector2<f64>> {
    let c = Vector2::new(z.center()[0], z.center()[1]);
    let g1 = Vector2::new(z.generators()[(0, 0)], z.generators()[(1, 0)]);
    let g2 = Vector2::new(z.generators()[(0, 1)], z.generators()[(1, 1)]);
    let mut v = vec![c - g1 - g2, c + g1 - g2, c + g1 + g2, c - g1 + g2];
    if cross(v[0], v[1], v[2]) < 0.0 {
        v.reverse();
    }
    v
}

/// Sutherland-Hodgman clipping of a convex polygon by a convex CCW polygon.
fn clip(subject: &[Vector2<f64>], clipper: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
    let mut out = subject.to_vec();
    for i in 0..clipper.len() {
        let (a, b) = (clipper[i], clipper[(i + 1) % clipper.len()]);
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let (p, q) = (input[j], input[(j + 1) % input.len()]);
            let (sp, sq) = (cross(a, b, p), cross(a, b, q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                out.push(p + (q - p) * (sp / (sp - sq)));
            }
        }
        if out.is_empty() {
            break;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn support_width_is_nonnegative(seed in any::<u64>(), n in 1usize..=6, p in 0usize..=8) {
        let z = random_zonotope(seed, n, p);
        let d = random_unit(&mut rng(seed ^ 1), n);
        prop_assert!(support_zonotope(&z, &d).unwrap() + support_zonotope(&z, &(-&d)).unwrap() >= 0.0);
    }

    #[test]
    fn box_to_zonotope_keeps_canonical_supports(seed in any::<u64>(), n in 1usize..=6) {
        let h = random_box(seed, n);
        let z = h.to_zonotope();
        for d in canonical(n) {
            prop_assert_eq!(h.support(&d).unwrap(), z.support(&d).unwrap());
        }
    }

    #[test]
    fn linear_map_moves_direction(seed in any::<u64>(), n in 1usize..=6, m in 1usize..=6, p in 0usize..=6) {
        let z = random_zonotope(seed, n, p);
        let mut r = rng(seed ^ 2);
        let a = DMatrix::from_fn(m, n, |_, _| r.random_range(-2.0..2.0));
        let d = random_unit(&mut r, m);
        let mapped = z.linear_map(&LinearOperator::Dense(a.clone())).unwrap();
        let lhs = support_zonotope(&mapped, &d).unwrap();
        let rhs = support_zonotope(&z, &(a.transpose() * &d)).unwrap();
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn box_approximation_of_box_is_identity(seed in any::<u64>(), n in 1usize..=6) {
        let h = random_box(seed, n);
        prop_assert_eq!(box_approximation(&h.clone().into()).unwrap(), h);
    }

    #[test]
    fn box_approximation_of_map_is_tight(seed in any::<u64>(), n in 1usize..=5) {
        let h = random_box(seed, n);
        let mut r = rng(seed ^ 5);
        let a = DMatrix::from_fn(n, n, |_, _| r.random_range(-2.0..2.0));
        let x = SetExpression::linear_map(LinearOperator::Dense(a.clone()), &h.clone().into()).unwrap();
        let b = box_approximation(&x).unwrap();
        // |A| r is the exact half-width of A·H.
        let want = a.abs() * h.radius();
        for i in 0..n {
            prop_assert!((b.radius()[i] - want[i]).abs() <= 1e-12 * (1.0 + want[i]));
        }
    }

    #[test]
    fn intersection_support_is_an_upper_bound(seed in any::<u64>()) {
        let z1 = random_zonotope(seed, 2, 2);
        let mut z2 = random_zonotope(seed ^ 3, 2, 2);
        // Pull the second parallelogram close enough to overlap often.
        z2 = Zonotope::new(z1.center() + (z2.center() - z1.center()) * 0.3, z2.generators().clone()).unwrap();
        let poly = clip(&parallelogram(&z1), &parallelogram(&z2));
        prop_assume!(poly.len() >= 3);
        let expr = SetExpression::intersection(&z1.clone().into(), &z2.clone().into()).unwrap();
        let mut r = rng(seed ^ 4);
        for _ in 0..16 {
            let d = random_unit(&mut r, 2);
            let exact = poly.iter().map(|v| d[0] * v.x + d[1] * v.y).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(support_expression(&expr, &d).unwrap() >= exact - 1e-12);
        }
    }

    #[test]
    fn sampled_points_respect_support(seed in any::<u64>(), n in 1usize..=6, p in 0usize..=8) {
        let z = random_zonotope(seed, n, p);
        let mut r = rng(seed ^ 6);
        for _ in 0..1000 {
            let xi: Vec<f64> = (0..p).map(|_| r.random_range(-1.0..=1.0)).collect();
            let x = z.point(&xi).unwrap();
            let d = random_unit(&mut r, n);
            prop_assert!(d.dot(&x) <= support_zonotope(&z, &d).unwrap() + 1e-12);
        }
    }

    #[test]
    fn cartesian_product_of_boxes_is_a_box(s1 in any::<u64>(), s2 in any::<u64>(), n in 1usize..=4, m in 1usize..=4) {
        let (a, b) = (random_box(s1, n), random_box(s2, m));
        let prod = SetExpression::cartesian_product(&[a.clone().into(), b.clone().into()]).unwrap();
        let h = box_approximation(&prod).unwrap();
        let c: Vec<f64> = a.center().iter().chain(b.center().iter()).copied().collect();
        let r: Vec<f64> = a.radius().iter().chain(b.radius().iter()).copied().collect();
        prop_assert!((h.center() - DVector::from_vec(c)).amax() <= 1e-15);
        prop_assert!((h.radius() - DVector::from_vec(r)).amax() <= 1e-15);
    }
}
