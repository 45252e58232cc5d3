//! End-to-end acceptance checks, one line of output per criterion.
//!
//! Run with `cargo test -p setprop-core --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::CsrMatrix;
use rand::Rng;

use setprop_core::analysis::{
    analytic_clamped_bar, analytic_heat_rod, estimate_amplitude_decay, estimate_period,
    flowpipe_envelope_metrics, trajectory_amplitude, trajectory_period, amplitude_decay,
    period_elongation, BarParams, EnvelopeBuilder, VertexSampler,
};
use setprop_core::discretize::{discretize, DiscretizationMode};
use setprop_core::integrators::{backward_euler_observe, bathe, newmark, newmark_observe, no_forcing};
use setprop_core::matfun::{e_plus, expm, p_series};
use setprop_core::matrix::{LinearOperator, StateMatrix};
use setprop_core::model::{
    assemble_bar_1d, assemble_heat_1d, homogenize, InputModel, InputTerm, LinearSystem,
    SecondOrderSystem,
};
use setprop_core::propagate::{
    flowpipe_bounds, propagate_box, propagate_support, propagate_zonotope, Bound, Flowpipe,
    Geometry, Query,
};
use setprop_core::sets::{Hyperrectangle, SetExpression};

use common::{exact_flow, heat_profile, random_stable, random_unit, rk4, rng, ModalResponse};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

type Check = fn() -> Outcome;

fn main() {
    let criteria: [(&str, f64, Check); 9] = [
        ("1 oscillator reference values", 1.0, oscillator_reference_values),
        ("2 period elongation and amplitude decay", 10.0, period_and_decay),
        ("3 containment of sampled trajectories", 60.0, containment_suite),
        ("4 box/zonotope/support agreement", f64::INFINITY, scheme_agreement),
        ("5 constant zonotope area", f64::INFINITY, wrapping_free),
        ("6 clamped bar enclosure", 120.0, clamped_bar),
        ("7 heat rod enclosure", 120.0, heat_rod),
        ("8 envelope dominance", f64::INFINITY, envelope_dominance),
        ("9 homogenization", f64::INFINITY, homogenization),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let out = check();
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs < limit;
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = if limit.is_finite() {
            format!(", limit {limit} s")
        } else {
            String::new()
        };
        println!(
            "criterion {name}: {} ({}; {secs:.2} s{budget})",
            if pass { "PASS" } else { "FAIL" },
            out.detail
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn oscillator(omega: f64) -> StateMatrix {
    StateMatrix::dense(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -omega * omega, 0.0])).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn oscillator_reference_values() -> Outcome {
    let a = oscillator(4.0 * PI);
    let delta = 0.025;
    let x0: SetExpression = Hyperrectangle::from_slices(&[1.0, 0.0], &[0.1, 0.1]).unwrap().into();

    let phi = expm(&a, delta).unwrap().to_dense();
    let p = p_series(&StateMatrix::new(a.op().abs()).unwrap(), delta).unwrap().to_dense();
    let e = e_plus(&a, &x0, delta).unwrap();
    let sys = LinearSystem::new(a.clone(), x0).unwrap();
    let d = discretize(&sys, delta, 6, DiscretizationMode::Box).unwrap();
    let h0 = d.omega0_box().unwrap().clone();
    let z = propagate_zonotope(d.phi(), &h0.to_zonotope(), 6, delta).unwrap();
    let b = propagate_box(d.phi(), &h0, 6, delta).unwrap();
    let Geometry::Zonotope(z6) = &z.reach_sets()[5].geometry else {
        return Outcome::new(false, "zonotope flowpipe has wrong geometry");
    };
    let Geometry::Box(h6) = &b.reach_sets()[5].geometry else {
        return Outcome::new(false, "box flowpipe has wrong geometry");
    };

    // Row-major reference values.
    let checks: Vec<(&str, Vec<f64>, Vec<f64>)> = vec![
        (
            "Phi",
            vec![phi[(0, 0)], phi[(0, 1)], phi[(1, 0)], phi[(1, 1)]],
            vec![0.95105652, 0.02459079, -3.88322208, 0.95105652],
        ),
        (
            "P",
            vec![p[(0, 0)], p[(0, 1)], p[(1, 0)], p[(1, 1)]],
            vec![0.00031508, 0.00000262, 0.00041327, 0.00031508],
        ),
        (
            "E+",
            e.center().iter().chain(e.radius().iter()).copied().collect(),
            vec![0.0, 0.0, 0.05477208, 0.07676220],
        ),
        (
            "Omega0 box",
            h0.center().iter().chain(h0.radius().iter()).copied().collect(),
            vec![0.97471, -2.13332, 0.12868, 2.23332],
        ),
        (
            "Z6",
            z6.center()
                .iter()
                .copied()
                .chain([
                    z6.generators()[(0, 0)],
                    z6.generators()[(0, 1)],
                    z6.generators()[(1, 0)],
                    z6.generators()[(1, 1)],
                ])
                .collect(),
            vec![-0.16976461, -12.24853154, 0.0, 0.17772235, -1.61711795, 0.0],
        ),
        (
            "H6",
            h6.center().iter().chain(h6.radius().iter()).copied().collect(),
            vec![-0.16976, -12.24853, 0.17772, 1.61712],
        ),
    ];
    let mut worst = (0.0, "");
    for (name, got, want) in &checks {
        let err = max_abs_diff(got, want);
        if err > worst.0 {
            worst = (err, name);
        }
    }
    Outcome::new(
        worst.0 <= 1e-5,
        format!("max abs deviation {:.2e} in {}", worst.0, worst.1),
    )
}

fn period_and_decay() -> Outcome {
    let omega = 4.0 * PI;
    let t_nat = 0.5;
    let n_a = 50;
    let a = oscillator(omega);
    let sdof = SecondOrderSystem::dynamics(
        CsrMatrix::identity(1),
        CsrMatrix::zeros(1, 1),
        CsrMatrix::from(&DMatrix::from_element(1, 1, omega * omega)),
    )
    .unwrap();
    let u0 = DVector::from_element(1, 1.0);
    let v0 = DVector::zeros(1);

    // Fan of (u, v) directions so the {v = 0} slice is bounded tightly.
    let mut dirs = vec![DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![0.0, 1.0])];
    for j in 1..64 {
        let angle = -PI / 2.0 + PI * j as f64 / 64.0;
        dirs.push(DVector::from_vec(vec![1.0, angle.tan() / omega]));
    }

    let mut pass = true;
    let mut rows = Vec::new();
    let mut newmark_pe = Vec::new();
    let mut bathe_ad = Vec::new();
    for alpha in [0.025, 0.05, 0.1] {
        let delta = alpha * t_nat;
        // Two spare periods so the slower integrators still reach the
        // 50th maximum.
        let steps = ((n_a as f64 + 2.0) / alpha).round() as usize;
        let x0 = SetExpression::singleton(DVector::from_vec(vec![1.0, 0.0]));
        let sys = LinearSystem::new(a.clone(), x0).unwrap();
        let d = discretize(&sys, delta, steps, DiscretizationMode::Box).unwrap();
        let fp = propagate_support(d.phi(), d.omega0(), &dirs, steps, delta).unwrap();
        let st = estimate_period(&fp, 0, 1, n_a).unwrap();
        let sp_ad = estimate_amplitude_decay(&fp, 0, 1, n_a, 1.0).unwrap();
        let fpb = propagate_box(d.phi(), d.omega0_box().unwrap(), steps, delta).unwrap();
        let box_ad = estimate_amplitude_decay(&fpb, 0, 1, n_a, 1.0).unwrap();

        let nm = newmark(&sdof, no_forcing(1), &u0, &v0, delta, steps).unwrap();
        let bt = bathe(&sdof, no_forcing(1), &u0, &v0, delta, steps).unwrap();
        let metrics = |u: &[f64]| {
            let pe = period_elongation(trajectory_period(&nm.times, u).unwrap(), t_nat);
            let ad = amplitude_decay(trajectory_amplitude(u, n_a).unwrap(), 1.0, n_a);
            (pe, ad)
        };
        let (nm_pe, nm_ad) = metrics(&nm.component(0));
        let (bt_pe, bt_ad) = metrics(&bt.component(0));

        pass &= st.s_t.contains(t_nat) && sp_ad < 0.0015 && nm_ad.abs() < 1e-4 && nm_pe > 0.0;
        pass &= bt_ad > 0.0;
        newmark_pe.push(nm_pe);
        bathe_ad.push(bt_ad);
        rows.push(format!(
            "a={alpha}: S_T=[{:.5},{:.5}] AD sp {:.3}% (box rule {:.3}%) NM PE {:.3}% AD {:.1e}% BT PE {:.3}% AD {:.3}%",
            st.s_t.lo(),
            st.s_t.hi(),
            100.0 * sp_ad,
            100.0 * box_ad,
            100.0 * nm_pe,
            100.0 * nm_ad,
            100.0 * bt_pe,
            100.0 * bt_ad
        ));
    }
    pass &= newmark_pe.windows(2).all(|w| w[1] > w[0]);
    pass &= bathe_ad.windows(2).all(|w| w[1] > w[0]);
    Outcome::new(pass, rows.join("; "))
}

struct RandomCase {
    a: DMatrix<f64>,
    x0: Hyperrectangle,
    delta: f64,
}

fn random_cases(count: usize, seed: u64) -> Vec<RandomCase> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.random_range(1..=6);
            let a = random_stable(&mut r, n);
            let c: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
            let rad: Vec<f64> = (0..n).map(|_| r.random_range(0.0..0.5)).collect();
            RandomCase {
                a,
                x0: Hyperrectangle::from_slices(&c, &rad).unwrap(),
                delta: r.random_range(0.005..0.1),
            }
        })
        .collect()
}

fn containment_suite() -> Outcome {
    let steps = 60;
    let samples = 10_000;
    let mut r = rng(3);
    let mut worst = f64::INFINITY;
    for case in random_cases(50, 1) {
        let n = case.a.nrows();
        let mut dirs = Vec::new();
        for i in 0..n {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            dirs.push(e.clone());
            dirs.push(-e);
        }
        for _ in 0..20 {
            dirs.push(random_unit(&mut r, n));
        }
        let sys = LinearSystem::new(StateMatrix::dense(case.a.clone()).unwrap(), case.x0.clone().into())
            .unwrap();
        let d = discretize(&sys, case.delta, steps, DiscretizationMode::Symbolic).unwrap();
        let fp = propagate_support(d.phi(), d.omega0(), &dirs, steps, case.delta).unwrap();
        let horizon = steps as f64 * case.delta;
        for s in 0..samples {
            let x0 = DVector::from_fn(n, |i, _| {
                let (c, rad) = (case.x0.center()[i], case.x0.radius()[i]);
                // Alternate between vertices and interior points.
                if s % 2 == 0 {
                    c + if r.random::<bool>() { rad } else { -rad }
                } else {
                    c + r.random_range(-1.0..=1.0) * rad
                }
            });
            let t = r.random_range(0.0..horizon);
            let k = ((t / case.delta) as usize).min(steps - 1);
            let x = exact_flow(&case.a, &x0, t);
            let Geometry::Support(bounds) = &fp.reach_sets()[k].geometry else {
                unreachable!()
            };
            for (dir, (lo, hi)) in dirs.iter().zip(bounds) {
                let v = dir.dot(&x);
                worst = worst.min(v - lo).min(hi - v);
            }
        }
    }
    Outcome::new(
        worst >= -1e-9,
        format!("50 systems x 10^4 samples, minimum slack {worst:.3e}"),
    )
}

fn scheme_agreement() -> Outcome {
    let steps = 201;
    let mut cases = random_cases(50, 2);
    cases.push(RandomCase {
        a: oscillator(4.0 * PI).to_dense(),
        x0: Hyperrectangle::from_slices(&[1.0, 0.0], &[0.1, 0.1]).unwrap(),
        delta: 0.025,
    });
    let mut worst: f64 = 0.0;
    for case in &cases {
        let n = case.a.nrows();
        let sys = LinearSystem::new(StateMatrix::dense(case.a.clone()).unwrap(), case.x0.clone().into())
            .unwrap();
        let d = discretize(&sys, case.delta, steps, DiscretizationMode::Box).unwrap();
        let h0 = d.omega0_box().unwrap();
        let dirs: Vec<DVector<f64>> = (0..n)
            .map(|i| {
                let mut e = DVector::zeros(n);
                e[i] = 1.0;
                e
            })
            .collect();
        let fb = propagate_box(d.phi(), h0, steps, case.delta).unwrap();
        let fz = propagate_zonotope(d.phi(), &h0.to_zonotope(), steps, case.delta).unwrap();
        let fs = propagate_support(d.phi(), &h0.clone().into(), &dirs, steps, case.delta).unwrap();
        for i in 0..n {
            let q = Query::Index(i);
            let b = flowpipe_bounds(&fb, &q).unwrap();
            let z = flowpipe_bounds(&fz, &q).unwrap();
            let s = flowpipe_bounds(&fs, &q).unwrap();
            for k in 0..steps {
                worst = worst.max(rel_gap(&b[k], &z[k])).max(rel_gap(&b[k], &s[k]));
            }
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!("{} systems, k <= 200, max relative gap {worst:.2e}", cases.len()),
    )
}

fn rel_gap(a: &Bound, b: &Bound) -> f64 {
    let scale = a.lo.abs().max(a.hi.abs()).max(f64::MIN_POSITIVE);
    (a.lo - b.lo).abs().max((a.hi - b.hi).abs()) / scale
}

fn wrapping_free() -> Outcome {
    let a = oscillator(4.0 * PI);
    let x0: SetExpression = Hyperrectangle::from_slices(&[1.0, 0.0], &[0.1, 0.1]).unwrap().into();
    let sys = LinearSystem::new(a, x0).unwrap();
    let d = discretize(&sys, 0.025, 201, DiscretizationMode::Box).unwrap();
    let fp = propagate_zonotope(d.phi(), &d.omega0_box().unwrap().to_zonotope(), 201, 0.025).unwrap();
    let area = |k: usize| match &fp.reach_sets()[k].geometry {
        Geometry::Zonotope(z) => z.area().unwrap(),
        _ => unreachable!(),
    };
    let a0 = area(0);
    let worst = (1..=200).map(|k| (area(k) / a0 - 1.0).abs()).fold(0.0, f64::max);
    Outcome::new(
        worst <= 1e-9,
        format!("area {a0:.6}, max relative drift {worst:.2e} over 200 steps"),
    )
}

/// Bounds of reach-sets `k − 1` and `k`, the two sets touching `t = kδ`.
fn around(bounds: &[Bound], k: usize) -> [Option<&Bound>; 2] {
    [k.checked_sub(1).and_then(|j| bounds.get(j)), bounds.get(k)]
}

/// Distance by which `x` misses the closest of the candidate intervals
/// (zero when inside one of them).
fn miss(cands: [Option<&Bound>; 2], x: f64) -> f64 {
    cands
        .iter()
        .flatten()
        .map(|b| (b.lo - x).max(x - b.hi).max(0.0))
        .fold(f64::INFINITY, f64::min)
}

fn clamped_bar() -> Outcome {
    let p = BarParams::reference();
    let elements = 200;
    let node = 140;
    let dof = node - 1;
    let delta = 1e-6;
    let steps = 10_000;

    let bar = assemble_bar_1d(p.young, p.area, p.density, p.length, elements).unwrap();
    let n = bar.dofs();
    let mut f0 = DVector::zeros(n);
    f0[n - 1] = p.force;
    let load = InputTerm::new(f0.clone(), InputModel::constant(1.0)).unwrap();
    let x0 = SetExpression::singleton(DVector::zeros(2 * n));
    let sys = homogenize(&bar, &[load], &x0).unwrap();
    let d = discretize(&sys, delta, steps, DiscretizationMode::Symbolic).unwrap();
    let mut e_u = DVector::zeros(sys.dim());
    e_u[dof] = 1.0;
    let fp = propagate_support(d.phi(), d.omega0(), &[e_u], steps, delta).unwrap();
    let bounds = flowpipe_bounds(&fp, &Query::Index(dof)).unwrap();

    let mass = DVector::from(DMatrix::from(bar.mass().unwrap()).diagonal());
    let modal = ModalResponse::new(&mass, &DMatrix::from(bar.stiffness()), &f0, dof);
    let x = node as f64 * p.length / elements as f64;
    let scale = 2.0 * p.force * p.length / (p.young * p.area);

    let mut ode_miss: f64 = 0.0;
    let mut spatial: f64 = 0.0;
    let mut pde = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 * delta;
        let u = modal.displacement(t);
        ode_miss = ode_miss.max(miss(around(&bounds, k), u));
        if k < steps {
            let tm = t + 0.5 * delta;
            ode_miss = ode_miss.max(miss([None, Some(&bounds[k])], modal.displacement(tm)));
        }
        let w = analytic_clamped_bar(&p, x, t, 2000);
        spatial = spatial.max((w - u).abs());
        pde.push(w);
    }
    let mut pde_miss: f64 = 0.0;
    for (k, w) in pde.iter().enumerate() {
        pde_miss = pde_miss.max(miss(around(&bounds, k), *w) - spatial);
    }
    let tol = 1e-9 * scale;
    Outcome::new(
        ode_miss <= tol && pde_miss <= tol,
        format!(
            "N=200, node {node}, {steps} steps: ODE outside by {ode_miss:.2e}, spatial error {spatial:.2e}, PDE outside inflated band by {:.2e}",
            pde_miss.max(0.0)
        ),
    )
}

fn heat_rod() -> Outcome {
    let elements = 100;
    let delta = 1e-5;
    let steps = 10_000;
    let samples = 1000;
    let h = 1.0 / elements as f64;
    let rod = assemble_heat_1d(1.0, 1.0, 1.0, 1.0, elements, true).unwrap();
    let n = rod.dofs();
    let g = heat_profile(elements);
    let shape = LinearOperator::Dense(DMatrix::from_column_slice(n, 1, g.as_slice()));
    let eps = Hyperrectangle::from_slices(&[1.0], &[0.1]).unwrap();
    let x0 = SetExpression::linear_map(shape, &eps.into()).unwrap();
    let sys = homogenize(&rod, &[], &x0).unwrap();
    let d = discretize(&sys, delta, steps, DiscretizationMode::Box).unwrap();
    let omega0 = d.omega0_box().unwrap();

    // Temperatures from the box scheme, gradients from support functions,
    // both started from the box enclosure of the first step.
    let centre = elements / 2 - 1;
    let temps = propagate_box(d.phi(), omega0, steps, delta).unwrap();
    let t_bounds = flowpipe_bounds(&temps, &Query::Index(centre)).unwrap();
    // Gradient over the element between nodes j and j + 1.
    let elems = [10, 33, 50, 66, 90];
    let dirs: Vec<DVector<f64>> = elems
        .iter()
        .map(|&j| {
            let mut d = DVector::zeros(n);
            d[j] += 1.0 / h;
            d[j - 1] -= 1.0 / h;
            d
        })
        .collect();
    let grads = propagate_support(d.phi(), &omega0.clone().into(), &dirs, steps, delta).unwrap();
    let g_bounds: Vec<Vec<Bound>> = dirs
        .iter()
        .map(|d| flowpipe_bounds(&grads, &Query::Direction(d.clone())).unwrap())
        .collect();

    let mut analytic_miss: f64 = 0.0;
    for eps in [-0.1, 0.1] {
        for k in 0..=steps {
            let t = k as f64 * delta;
            analytic_miss =
                analytic_miss.max(miss(around(&t_bounds, k), analytic_heat_rod(eps, 0.5, t)));
        }
    }

    let mut r = rng(7);
    let mut temp_miss: f64 = 0.0;
    let mut grad_miss: f64 = 0.0;
    for s in 0..samples {
        let e = match s {
            0 => -0.1,
            1 => 0.1,
            _ => r.random_range(-0.1..=0.1),
        };
        let theta0 = &g * (1.0 + e);
        backward_euler_observe(&rod, no_forcing(n), &theta0, delta, steps, |st| {
            temp_miss = temp_miss.max(miss(around(&t_bounds, st.k), st.u[centre]));
            for (b, d) in g_bounds.iter().zip(&dirs) {
                grad_miss = grad_miss.max(miss(around(b, st.k), d.dot(st.u)));
            }
        })
        .unwrap();
    }
    let tol = 1e-9;
    Outcome::new(
        analytic_miss <= tol && temp_miss <= tol && grad_miss <= tol,
        format!(
            "x=0.5 analytic eps=+-0.1 outside by {analytic_miss:.2e}; {samples} Backward Euler runs: temperature outside by {temp_miss:.2e}, gradients outside by {grad_miss:.2e}"
        ),
    )
}

fn envelope_dominance() -> Outcome {
    let p = BarParams::reference();
    let elements = 20;
    let dof = elements - 1;
    let delta = 4e-6;
    let steps = 500;
    let samples = 10_000;

    let bar = assemble_bar_1d(p.young, p.area, p.density, p.length, elements).unwrap();
    let n = bar.dofs();
    let mut f0 = DVector::zeros(n);
    f0[n - 1] = p.force;
    let load = InputTerm::new(f0.clone(), InputModel::constant(1.0)).unwrap();
    // Ten percent of the peak end displacement and velocity of the
    // unperturbed bar.
    let du = 0.1 * 2.0 * p.force * p.length / (p.young * p.area);
    let dv = 0.1 * p.force / (p.area * p.density * p.wave_speed());
    let u_box = Hyperrectangle::new(
        DVector::zeros(2 * n),
        DVector::from_fn(2 * n, |i, _| if i < n { du } else { dv }),
    )
    .unwrap();
    let sys = homogenize(&bar, &[load], &u_box.clone().into()).unwrap();
    let d = discretize(&sys, delta, steps, DiscretizationMode::Symbolic).unwrap();
    let v_idx = n + dof;
    let mut e_v = DVector::zeros(sys.dim());
    e_v[v_idx] = 1.0;
    let fp: Flowpipe = propagate_support(d.phi(), d.omega0(), &[e_v], steps, delta).unwrap();
    let set = flowpipe_envelope_metrics(&fp, &Query::Index(v_idx)).unwrap();

    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * delta).collect();
    let mut env = EnvelopeBuilder::new(times);
    let force = move |_t: f64| f0.clone();
    for x in VertexSampler::new(&u_box, 11).take(samples) {
        let u0 = x.rows(0, n).into_owned();
        let v0 = x.rows(n, n).into_owned();
        newmark_observe(&bar, &force, &u0, &v0, delta, steps, |s| {
            env.add_at(s.k, s.v.unwrap()[dof]);
        })
        .unwrap();
        env.finish_sample();
    }
    let mc = env.build().unwrap().metrics();
    Outcome::new(
        set.l1 >= mc.l1 && set.linf >= mc.linf,
        format!(
            "bar N=20 end velocity: flowpipe L1 {:.4e} Linf {:.4e} vs {samples} Newmark vertex samples L1 {:.4e} Linf {:.4e}",
            set.l1, set.linf, mc.l1, mc.linf
        ),
    )
}

fn homogenization() -> Outcome {
    let n = 2;
    let m = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0]));
    let k = DMatrix::from_row_slice(2, 2, &[6.0, -2.0, -2.0, 4.0]);
    let c = DMatrix::from_row_slice(2, 2, &[0.3, -0.1, -0.1, 0.2]);
    let sys = SecondOrderSystem::dynamics(
        CsrMatrix::from(&m),
        CsrMatrix::from(&c),
        CsrMatrix::from(&k),
    )
    .unwrap();
    let terms = vec![
        ("constant", InputTerm::new(DVector::from_vec(vec![1.0, 0.5]), InputModel::constant(1.5)).unwrap()),
        (
            "exponential",
            InputTerm::new(
                DVector::from_vec(vec![0.0, 2.0]),
                InputModel::Exponential {
                    rate: -2.0,
                    initial: setprop_core::sets::Interval::point(1.0),
                },
            )
            .unwrap(),
        ),
        (
            "sinusoid",
            InputTerm::new(
                DVector::from_vec(vec![1.0, -1.0]),
                InputModel::sinusoid_with_phase(3.0, 0.7, -PI / 2.0).unwrap(),
            )
            .unwrap(),
        ),
    ];

    // First-order forced system built directly with a dense inverse.
    let m_inv = m.clone().try_inverse().unwrap();
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, n), (n, n)).copy_from(&DMatrix::identity(n, n));
    a.view_mut((n, 0), (n, n)).copy_from(&(-&m_inv * &k));
    a.view_mut((n, n), (n, n)).copy_from(&(-&m_inv * &c));
    let state0 = DVector::from_vec(vec![0.1, -0.2, 0.0, 0.3]);

    let h = 1e-4;
    let ref_steps = 10_000;
    let mut worst: f64 = 0.0;
    let mut cases: Vec<(String, Vec<InputTerm>)> = terms
        .iter()
        .map(|(name, t)| (name.to_string(), vec![t.clone()]))
        .collect();
    cases.push(("all".into(), terms.iter().map(|(_, t)| t.clone()).collect()));
    let mut rows = Vec::new();
    for (name, inputs) in &cases {
        let hs = homogenize(&sys, inputs, &SetExpression::singleton(state0.clone())).unwrap();
        let z0 = DVector::from_iterator(
            hs.dim(),
            state0
                .iter()
                .copied()
                .chain(inputs.iter().flat_map(|t| t.nominal_initial())),
        );
        let forcing = |t: f64| {
            let mut g = DVector::zeros(2 * n);
            for term in inputs {
                let eta = term.model().eval(t, &term.nominal_initial());
                let acc = &m_inv * term.f0() * eta;
                for i in 0..n {
                    g[n + i] += acc[i];
                }
            }
            g
        };
        let reference = rk4(&a, forcing, &state0, h, ref_steps);
        let peak = reference.iter().map(|x| x.amax()).fold(0.0, f64::max);
        let mut err: f64 = 0.0;
        for j in 1..=20 {
            let t = j as f64 * 0.05;
            let phi = expm(hs.a(), t).unwrap();
            let z = phi.mul_vec(&z0);
            let r = &reference[j * 500];
            err = err.max((z.rows(0, 2 * n) - r).amax() / peak);
        }
        worst = worst.max(err);
        rows.push(format!("{name} {err:.1e}"));
    }
    Outcome::new(
        worst <= 1e-6,
        format!("max relative error over [0, 1]: {}", rows.join(", ")),
    )
}
