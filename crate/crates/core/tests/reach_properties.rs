mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

use setprop_core::discretize::{discretize, DiscretizationMode};
use setprop_core::matfun::expm;
use setprop_core::matrix::StateMatrix;
use setprop_core::model::LinearSystem;
use setprop_core::propagate::{
    flowpipe_bounds, propagate_box, propagate_support, propagate_zonotope, Geometry, Query,
};
use setprop_core::sets::{box_approximation, Hyperrectangle, SetExpression, Zonotope};

use common::{exact_flow, random_stable, random_unit, rng};

fn random_problem(seed: u64, n: usize) -> (DMatrix<f64>, Hyperrectangle, f64) {
    let mut r = rng(seed);
    let a = random_stable(&mut r, n);
    let c: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
    let rad: Vec<f64> = (0..n).map(|_| r.random_range(0.0..0.5)).collect();
    (a, Hyperrectangle::from_slices(&c, &rad).unwrap(), r.random_range(0.01..0.2))
}

fn system(a: &DMatrix<f64>, x0: &Hyperrectangle) -> LinearSystem {
    LinearSystem::new(StateMatrix::dense(a.clone()).unwrap(), x0.clone().into()).unwrap()
}

fn directions(r: &mut impl Rng, n: usize, extra: usize) -> Vec<DVector<f64>> {
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        out.push(e.clone());
        out.push(-e);
    }
    let mut c = rng(r.random());
    out.extend((0..extra).map(|_| random_unit(&mut c, n)));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_step_set_contains_trajectories(seed in any::<u64>(), n in 1usize..=6) {
        let (a, x0, delta) = random_problem(seed, n);
        let d = discretize(&system(&a, &x0), delta, 1, DiscretizationMode::Box).unwrap();
        let mut r = rng(seed ^ 1);
        let dirs = directions(&mut r, n, 20);
        let rho: Vec<f64> = dirs.iter().map(|v| d.omega0().support(v).unwrap()).collect();
        let boxed = d.omega0_box().unwrap();
        for _ in 0..1000 {
            let p = DVector::from_fn(n, |i, _| x0.center()[i] + r.random_range(-1.0..=1.0) * x0.radius()[i]);
            let x = exact_flow(&a, &p, r.random_range(0.0..=delta));
            for (v, s) in dirs.iter().zip(&rho) {
                prop_assert!(v.dot(&x) <= s + 1e-9);
            }
            for i in 0..n {
                prop_assert!((x[i] - boxed.center()[i]).abs() <= boxed.radius()[i] + 1e-9);
            }
        }
    }

    #[test]
    fn first_step_set_shrinks_with_step(seed in any::<u64>(), n in 1usize..=6) {
        let (a, x0, _) = random_problem(seed, n);
        let sys = system(&a, &x0);
        let mut delta = 0.2;
        let mut prev = discretize(&sys, delta, 1, DiscretizationMode::Box).unwrap().omega0_box().unwrap().radius().clone();
        for _ in 0..5 {
            delta /= 2.0;
            let next = discretize(&sys, delta, 1, DiscretizationMode::Box).unwrap().omega0_box().unwrap().radius().clone();
            for i in 0..n {
                prop_assert!(next[i] <= prev[i] + 1e-12);
            }
            prev = next;
        }
    }

    #[test]
    fn backward_pass_never_hurts(seed in any::<u64>(), n in 1usize..=6) {
        let (a, x0, delta) = random_problem(seed, n);
        let d = discretize(&system(&a, &x0), delta, 1, DiscretizationMode::Box).unwrap();
        let fwd = box_approximation(d.omega_forward()).unwrap();
        for i in 0..n {
            prop_assert!(d.omega0_box().unwrap().radius()[i] <= fwd.radius()[i] + 1e-15);
        }
    }

    #[test]
    fn flowpipe_contains_trajectories(seed in any::<u64>(), n in 1usize..=6) {
        let (a, x0, delta) = random_problem(seed, n);
        let steps = 40;
        let d = discretize(&system(&a, &x0), delta, steps, DiscretizationMode::Symbolic).unwrap();
        let mut r = rng(seed ^ 2);
        let dirs = directions(&mut r, n, 20);
        let fp = propagate_support(d.phi(), d.omega0(), &dirs, steps, delta).unwrap();
        for _ in 0..1000 {
            let p = DVector::from_fn(n, |i, _| x0.center()[i] + r.random_range(-1.0..=1.0) * x0.radius()[i]);
            let t = r.random_range(0.0..steps as f64 * delta);
            let k = fp.step_at(t).unwrap();
            let x = exact_flow(&a, &p, t);
            let Geometry::Support(b) = &fp.reach_sets()[k].geometry else { unreachable!() };
            for (v, (lo, hi)) in dirs.iter().zip(b) {
                let y = v.dot(&x);
                prop_assert!(y >= lo - 1e-9 && y <= hi + 1e-9);
            }
        }
    }

    #[test]
    fn schemes_agree_on_canonical_bounds(seed in any::<u64>(), n in 1usize..=4) {
        let (a, x0, delta) = random_problem(seed, n);
        let steps = 50;
        let d = discretize(&system(&a, &x0), delta, steps, DiscretizationMode::Box).unwrap();
        let h = d.omega0_box().unwrap();
        let fb = propagate_box(d.phi(), h, steps, delta).unwrap();
        let fz = propagate_zonotope(d.phi(), &h.to_zonotope(), steps, delta).unwrap();
        let mut r = rng(seed);
        let fs = propagate_support(d.phi(), &h.clone().into(), &directions(&mut r, n, 0), steps, delta).unwrap();
        for i in 0..n {
            let q = Query::Index(i);
            let (b, z, s) = (flowpipe_bounds(&fb, &q).unwrap(), flowpipe_bounds(&fz, &q).unwrap(), flowpipe_bounds(&fs, &q).unwrap());
            for k in 0..steps {
                let scale = b[k].lo.abs().max(b[k].hi.abs()).max(1e-300);
                for other in [&z[k], &s[k]] {
                    prop_assert!((b[k].lo - other.lo).abs() <= 1e-12 * scale);
                    prop_assert!((b[k].hi - other.hi).abs() <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn zonotope_steps_match_matrix_powers(seed in any::<u64>(), n in 1usize..=4, p in 1usize..=4) {
        let mut r = rng(seed);
        let phi = DMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
        let z0 = Zonotope::new(DVector::from_fn(n, |_, _| r.random_range(-1.0..1.0)), DMatrix::from_fn(n, p, |_, _| r.random_range(-1.0..1.0))).unwrap();
        let fp = propagate_zonotope(&StateMatrix::dense(phi.clone()).unwrap(), &z0, 6, 0.1).unwrap();
        let mut power = DMatrix::identity(n, n);
        for k in 0..6 {
            let Geometry::Zonotope(z) = &fp.reach_sets()[k].geometry else { unreachable!() };
            prop_assert!((z.center() - &power * z0.center()).amax() <= 1e-12);
            prop_assert!((z.generators() - &power * z0.generators()).amax() <= 1e-12);
            power = &phi * power;
        }
    }

    #[test]
    fn area_scales_with_determinant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_stable(&mut r, 2);
        let delta = r.random_range(0.01..0.1);
        let phi = expm(&StateMatrix::dense(a).unwrap(), delta).unwrap();
        let z0 = Hyperrectangle::from_slices(&[1.0, 0.5], &[0.3, 0.2]).unwrap().to_zonotope();
        let fp = propagate_zonotope(&phi, &z0, 50, delta).unwrap();
        let det = phi.to_dense().determinant().abs();
        let a0 = z0.area().unwrap();
        for (k, rs) in fp.reach_sets().iter().enumerate() {
            let Geometry::Zonotope(z) = &rs.geometry else { unreachable!() };
            let want = a0 * det.powi(k as i32);
            prop_assert!((z.area().unwrap() - want).abs() <= 1e-9 * want);
        }
    }
}

#[test]
fn diagonal_box_radii_are_powers() {
    let phi = StateMatrix::dense(DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, -2.0, 1.0]))).unwrap();
    let h0 = Hyperrectangle::from_slices(&[1.0, 1.0, 1.0], &[0.25, 0.5, 0.0]).unwrap();
    let fp = propagate_box(&phi, &h0, 5, 1.0).unwrap();
    for (k, rs) in fp.reach_sets().iter().enumerate() {
        let Geometry::Box(h) = &rs.geometry else { unreachable!() };
        let k = k as i32;
        assert_eq!(h.radius().as_slice(), &[0.25 * 0.5f64.powi(k), 0.5 * 2f64.powi(k), 0.0]);
    }
}

#[test]
fn singleton_support_flowpipe_starts_with_reference_box() {
    let w = 4.0 * std::f64::consts::PI;
    let a = StateMatrix::dense(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -w * w, 0.0])).unwrap();
    let x0: SetExpression = Hyperrectangle::from_slices(&[1.0, 0.0], &[0.1, 0.1]).unwrap().into();
    let sys = LinearSystem::new(a, x0).unwrap();
    let d = discretize(&sys, 0.025, 4, DiscretizationMode::Box).unwrap();
    let mut r = rng(0);
    let fp = propagate_support(d.phi(), d.omega0(), &directions(&mut r, 2, 0), 4, 0.025).unwrap();
    let b = flowpipe_bounds(&fp, &Query::Index(0)).unwrap();
    assert!((0.5 * (b[0].lo + b[0].hi) - 0.97471).abs() < 1e-5);
    assert!((0.5 * (b[0].hi - b[0].lo) - 0.12868).abs() < 1e-5);
}
