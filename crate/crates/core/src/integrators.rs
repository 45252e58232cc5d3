//! Classical time integrators: Backward Euler for heat problems, Newmark
//! (average acceleration) and Bathe (composite, two sub-steps) for dynamics.

use nalgebra::DVector;
use nalgebra_sparse::CsrMatrix;

use crate::error::{check_dim, Error, Result};
use crate::linsolve::Factorization;
use crate::model::{SecondOrderSystem, SystemKind};

/// Point solution at `t_k = kΔt`. For heat problems `values` are
/// temperatures and the derivative fields are empty; for dynamics `values`
/// are displacements.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub values: Vec<DVector<f64>>,
    pub velocities: Vec<DVector<f64>>,
    pub accelerations: Vec<DVector<f64>>,
}

impl Trajectory {
    fn new(dt: f64, steps: usize) -> Self {
        Trajectory {
            dt,
            times: Vec::with_capacity(steps + 1),
            values: Vec::with_capacity(steps + 1),
            velocities: Vec::new(),
            accelerations: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Time series of one entry of `values`.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[i]).collect()
    }

    pub fn velocity_component(&self, i: usize) -> Vec<f64> {
        self.velocities.iter().map(|v| v[i]).collect()
    }

    /// Projection `dᵀx_k` of the first-order state `x = θ` or `x = (u, v)`.
    pub fn project(&self, d: &DVector<f64>) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let u = &self.values[k];
                let n = u.len();
                let mut s = d.rows(0, n).dot(u);
                if d.len() > n && !self.velocities.is_empty() {
                    s += d.rows(n, n).dot(&self.velocities[k]);
                }
                s
            })
            .collect()
    }
}

/// State handed to observers at every time point.
#[derive(Debug, Clone, Copy)]
pub struct StepState<'a> {
    pub k: usize,
    pub t: f64,
    pub u: &'a DVector<f64>,
    pub v: Option<&'a DVector<f64>>,
    pub a: Option<&'a DVector<f64>>,
}

/// Zero load for `n` equations.
pub fn no_forcing(n: usize) -> impl Fn(f64) -> DVector<f64> {
    move |_| DVector::zeros(n)
}

fn check_run(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )))
    }
}

fn require_kind(sys: &SecondOrderSystem, kind: SystemKind, method: &str) -> Result<()> {
    if sys.kind() == kind {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{method} needs a {} system",
            kind.name()
        )))
    }
}

fn combo(terms: &[(f64, &CsrMatrix<f64>)]) -> CsrMatrix<f64> {
    let mut acc = terms[0].1 * terms[0].0;
    for (s, m) in &terms[1..] {
        acc = &acc + &(*m * *s);
    }
    acc
}

fn spmv(m: &CsrMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    let mut y = DVector::zeros(m.nrows());
    for (i, row) in m.row_iter().enumerate() {
        let mut acc = 0.0;
        for (&j, &v) in row.col_indices().iter().zip(row.values()) {
            acc += v * x[j];
        }
        y[i] = acc;
    }
    y
}

fn finite(x: &DVector<f64>, k: usize, context: &'static str) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            context,
            step: Some(k),
        })
    }
}

/// Backward Euler, `(KΔt + C)θ_{k+1} = f_{k+1}Δt + Cθ_k`, calling
/// `observe` at every time point instead of storing the trajectory.
pub fn backward_euler_observe<F, O>(
    sys: &SecondOrderSystem,
    f: F,
    theta0: &DVector<f64>,
    dt: f64,
    steps: usize,
    mut observe: O,
) -> Result<()>
where
    F: Fn(f64) -> DVector<f64>,
    O: FnMut(StepState<'_>),
{
    require_kind(sys, SystemKind::Heat, "backward Euler")?;
    check_run(dt)?;
    let n = sys.dofs();
    check_dim("initial temperature", n, theta0.len())?;
    let c = sys.damping();
    let lhs = Factorization::new(&combo(&[(dt, sys.stiffness()), (1.0, c)]), "backward Euler matrix")?;
    let mut theta = theta0.clone();
    observe(StepState {
        k: 0,
        t: 0.0,
        u: &theta,
        v: None,
        a: None,
    });
    for k in 1..=steps {
        let t = k as f64 * dt;
        let fk = f(t);
        check_dim("load vector", n, fk.len())?;
        let mut rhs = spmv(c, &theta) + fk * dt;
        lhs.solve_in_place(&mut rhs);
        theta = rhs;
        finite(&theta, k, "backward Euler")?;
        observe(StepState {
            k,
            t,
            u: &theta,
            v: None,
            a: None,
        });
    }
    Ok(())
}

pub fn backward_euler<F>(
    sys: &SecondOrderSystem,
    f: F,
    theta0: &DVector<f64>,
    dt: f64,
    steps: usize,
) -> Result<Trajectory>
where
    F: Fn(f64) -> DVector<f64>,
{
    let mut tr = Trajectory::new(dt, steps);
    backward_euler_observe(sys, f, theta0, dt, steps, |s| {
        tr.times.push(s.t);
        tr.values.push(s.u.clone());
    })?;
    Ok(tr)
}

struct DynamicsStart {
    u: DVector<f64>,
    v: DVector<f64>,
    a: DVector<f64>,
}

fn start_dynamics<F>(
    sys: &SecondOrderSystem,
    f: &F,
    u0: &DVector<f64>,
    v0: &DVector<f64>,
    dt: f64,
    method: &str,
) -> Result<DynamicsStart>
where
    F: Fn(f64) -> DVector<f64>,
{
    require_kind(sys, SystemKind::Dynamics, method)?;
    check_run(dt)?;
    let n = sys.dofs();
    check_dim("initial displacement", n, u0.len())?;
    check_dim("initial velocity", n, v0.len())?;
    let f0 = f(0.0);
    check_dim("load vector", n, f0.len())?;
    let m = sys.factor_leading()?;
    let rhs = f0 - spmv(sys.damping(), v0) - spmv(sys.stiffness(), u0);
    Ok(DynamicsStart {
        u: u0.clone(),
        v: v0.clone(),
        a: m.solve(&rhs),
    })
}

/// Average-acceleration Newmark with `b₀ = 4/Δt²`, `b₁ = 2/Δt`, `b₂ = 4/Δt`.
pub fn newmark_observe<F, O>(
    sys: &SecondOrderSystem,
    f: F,
    u0: &DVector<f64>,
    v0: &DVector<f64>,
    dt: f64,
    steps: usize,
    mut observe: O,
) -> Result<()>
where
    F: Fn(f64) -> DVector<f64>,
    O: FnMut(StepState<'_>),
{
    let DynamicsStart {
        mut u,
        mut v,
        mut a,
    } = start_dynamics(sys, &f, u0, v0, dt, "Newmark")?;
    let (b0, b1, b2) = (4.0 / (dt * dt), 2.0 / dt, 4.0 / dt);
    let mass = sys.mass().expect("dynamics system");
    let damp = sys.damping();
    let lhs = Factorization::new(
        &combo(&[(b0, mass), (b1, damp), (1.0, sys.stiffness())]),
        "Newmark effective matrix",
    )?;
    observe(StepState {
        k: 0,
        t: 0.0,
        u: &u,
        v: Some(&v),
        a: Some(&a),
    });
    for k in 1..=steps {
        let t = k as f64 * dt;
        let mut rhs = f(t) + spmv(mass, &(&u * b0 + &v * b2 + &a)) + spmv(damp, &(&u * b1 + &v));
        lhs.solve_in_place(&mut rhs);
        let a_new = (&rhs - &u) * b0 - &v * b2 - &a;
        v += (&a + &a_new) * (dt / 2.0);
        u = rhs;
        a = a_new;
        finite(&u, k, "Newmark")?;
        observe(StepState {
            k,
            t,
            u: &u,
            v: Some(&v),
            a: Some(&a),
        });
    }
    Ok(())
}

/// Bathe composite scheme: trapezoidal rule over `Δt/2`, then the
/// three-point backward difference over the full step.
pub fn bathe_observe<F, O>(
    sys: &SecondOrderSystem,
    f: F,
    u0: &DVector<f64>,
    v0: &DVector<f64>,
    dt: f64,
    steps: usize,
    mut observe: O,
) -> Result<()>
where
    F: Fn(f64) -> DVector<f64>,
    O: FnMut(StepState<'_>),
{
    let DynamicsStart {
        mut u,
        mut v,
        mut a,
    } = start_dynamics(sys, &f, u0, v0, dt, "Bathe")?;
    let a0 = 16.0 / (dt * dt);
    let a1 = 4.0 / dt;
    let a2 = 9.0 / (dt * dt);
    let a3 = 3.0 / dt;
    let a4 = 8.0 / dt;
    let a5 = 12.0 / (dt * dt);
    let a6 = -3.0 / (dt * dt);
    let a7 = -1.0 / dt;
    let mass = sys.mass().expect("dynamics system");
    let damp = sys.damping();
    let k_mat = sys.stiffness();
    let lhs1 = Factorization::new(
        &combo(&[(a0, mass), (a1, damp), (1.0, k_mat)]),
        "Bathe first sub-step matrix",
    )?;
    let lhs2 = Factorization::new(
        &combo(&[(a2, mass), (a3, damp), (1.0, k_mat)]),
        "Bathe second sub-step matrix",
    )?;
    observe(StepState {
        k: 0,
        t: 0.0,
        u: &u,
        v: Some(&v),
        a: Some(&a),
    });
    for k in 1..=steps {
        let t_prev = (k - 1) as f64 * dt;
        let t = k as f64 * dt;

        let mut u_half = f(t_prev + dt / 2.0)
            + spmv(mass, &(&u * a0 + &v * a4 + &a))
            + spmv(damp, &(&u * a1 + &v));
        lhs1.solve_in_place(&mut u_half);
        let v_half = (&u_half - &u) * a1 - &v;

        let mut u_new = f(t)
            + spmv(mass, &(&u_half * a5 + &u * a6 + &v_half * a1 + &v * a7))
            + spmv(damp, &(&u_half * a1 + &u * a7));
        lhs2.solve_in_place(&mut u_new);
        let v_new = -(&u * a7) - &u_half * a1 + &u_new * a3;
        let a_new = -(&v * a7) - &v_half * a1 + &v_new * a3;

        u = u_new;
        v = v_new;
        a = a_new;
        finite(&u, k, "Bathe")?;
        observe(StepState {
            k,
            t,
            u: &u,
            v: Some(&v),
            a: Some(&a),
        });
    }
    Ok(())
}

fn collect_dynamics(dt: f64, steps: usize) -> (Trajectory, impl FnMut(&mut Trajectory, StepState<'_>)) {
    let tr = Trajectory {
        velocities: Vec::with_capacity(steps + 1),
        accelerations: Vec::with_capacity(steps + 1),
        ..Trajectory::new(dt, steps)
    };
    let push = |tr: &mut Trajectory, s: StepState<'_>| {
        tr.times.push(s.t);
        tr.values.push(s.u.clone());
        tr.velocities.push(s.v.expect("dynamics state").clone());
        tr.accelerations.push(s.a.expect("dynamics state").clone());
    };
    (tr, push)
}

pub fn newmark<F>(
    sys: &SecondOrderSystem,
    f: F,
    u0: &DVector<f64>,
    v0: &DVector<f64>,
    dt: f64,
    steps: usize,
) -> Result<Trajectory>
where
    F: Fn(f64) -> DVector<f64>,
{
    let (mut tr, mut push) = collect_dynamics(dt, steps);
    newmark_observe(sys, f, u0, v0, dt, steps, |s| push(&mut tr, s))?;
    Ok(tr)
}

pub fn bathe<F>(
    sys: &SecondOrderSystem,
    f: F,
    u0: &DVector<f64>,
    v0: &DVector<f64>,
    dt: f64,
    steps: usize,
) -> Result<Trajectory>
where
    F: Fn(f64) -> DVector<f64>,
{
    let (mut tr, mut push) = collect_dynamics(dt, steps);
    bathe_observe(sys, f, u0, v0, dt, steps, |s| push(&mut tr, s))?;
    Ok(tr)
}
