//! Matrix functions used by the conservative discretization.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::matrix::StateMatrix;
use crate::sets::{symmetric_interval_hull, Hyperrectangle, SetExpression};

/// `e^{Aδ}` by scaling and squaring with Padé approximants (Higham 2005).
pub fn expm(a: &StateMatrix, delta: f64) -> Result<StateMatrix> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {delta}"
        )));
    }
    let scaled = a.to_dense() * delta;
    let e = expm_dense(&scaled)?;
    StateMatrix::dense(e).map_err(|_| Error::NonFinite {
        context: "matrix exponential",
        step: None,
    })
}

/// Dense `e^{M}`.
pub fn expm_dense(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    check_dim("matrix exponential (square)", n, m.ncols())?;
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "matrix exponential input",
            step: None,
        });
    }
    let norm1 = m
        .column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);

    let (u, v, squarings) = if norm1 < 1.495585217958292e-2 {
        let (u, v) = pade_low(m, &PADE3);
        (u, v, 0)
    } else if norm1 < 2.539398330063230e-1 {
        let (u, v) = pade_low(m, &PADE5);
        (u, v, 0)
    } else if norm1 < 9.504178996162932e-1 {
        let (u, v) = pade_low(m, &PADE7);
        (u, v, 0)
    } else if norm1 < 2.097847961257068 {
        let (u, v) = pade_low(m, &PADE9);
        (u, v, 0)
    } else {
        const THETA13: f64 = 5.371920351148152;
        let s = (norm1 / THETA13).log2().ceil().max(0.0) as i32;
        let ms = m * 2f64.powi(-s);
        let (u, v) = pade13(&ms);
        (u, v, s as u32)
    };

    let numer = &u + &v;
    let denom = v - u;
    let mut r = denom.lu().solve(&numer).ok_or(Error::Singular("Padé denominator"))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            context: "matrix exponential",
            step: None,
        });
    }
    Ok(r)
}

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Odd coefficients go to U (multiplied by A), even ones to V.
fn pade_low(a: &DMatrix<f64>, b: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let a2 = a * a;
    let mut pow = DMatrix::identity(n, n);
    let mut u = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    for k in 0..b.len() / 2 {
        u += &pow * b[2 * k + 1];
        v += &pow * b[2 * k];
        pow = &pow * &a2;
    }
    (a * u, v)
}

fn pade13(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let b = &PADE13;
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a2 * b[9] + &a4 * b[11] + &a6 * b[13];
    let u = a * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let inner_v = &a2 * b[8] + &a4 * b[10] + &a6 * b[12];
    let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    (u, v)
}

const P_SERIES_MIN_TERMS: usize = 11;
const P_SERIES_MAX_TERMS: usize = 10_000;

/// `P(A, δ) = Σ_{i≥0} Aⁱ δ^{i+2} / (i+2)!`, summed over at least `i = 0..=10`
/// and then until the next term drops below `1e-16` of the partial sum
/// (max-norm).
pub fn p_series(a: &StateMatrix, delta: f64) -> Result<StateMatrix> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {delta}"
        )));
    }
    let n = a.dim();
    let dense = a.to_dense();
    // Alternating terms of a large stiff matrix cancel catastrophically;
    // read P off an augmented exponential instead.
    if dense.iter().any(|v| *v < 0.0) && dense.amax() * n as f64 * delta > 1.0 {
        return p_from_block_exponential(&dense, delta);
    }
    let mut term = DMatrix::<f64>::identity(n, n) * (delta * delta / 2.0);
    let mut sum = term.clone();
    let mut i = 0;
    loop {
        // term_{i+1} = A term_i δ / (i + 3)
        let next = a.op().mul_mat(&term) * (delta / (i as f64 + 3.0));
        i += 1;
        let small = next.amax() < 1e-16 * sum.amax();
        if i >= P_SERIES_MIN_TERMS && small {
            break;
        }
        sum += &next;
        term = next;
        if sum.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "P series",
                step: Some(i),
            });
        }
        if i >= P_SERIES_MAX_TERMS {
            return Err(Error::NonFinite {
                context: "P series (no convergence)",
                step: Some(i),
            });
        }
    }
    StateMatrix::dense(sum)
}

/// `P` as the top-right block of `exp([[Aδ, Iδ, 0], [0, 0, Iδ], [0, 0, 0]])`.
fn p_from_block_exponential(a: &DMatrix<f64>, delta: f64) -> Result<StateMatrix> {
    let n = a.nrows();
    let mut m = DMatrix::zeros(3 * n, 3 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&(a * delta));
    for i in 0..n {
        m[(i, n + i)] = delta;
        m[(n + i, 2 * n + i)] = delta;
    }
    let e = expm_dense(&m)?;
    StateMatrix::dense(e.view((0, 2 * n), (n, n)).into_owned())
}

/// Bloating box `E⁺(A, X, δ) = ⊡(P(|A|, δ) ⊡(A² X))`.
pub fn e_plus(a: &StateMatrix, x: &SetExpression, delta: f64) -> Result<Hyperrectangle> {
    check_dim("bloating set", a.dim(), x.dim())?;
    let p = p_series(&StateMatrix::new(a.op().abs())?, delta)?;
    e_plus_with(a, &p.to_dense(), x)
}

/// `E⁺` with a precomputed `P(|A|, δ)`.
pub(crate) fn e_plus_with(
    a: &StateMatrix,
    p_abs: &DMatrix<f64>,
    x: &SetExpression,
) -> Result<Hyperrectangle> {
    let n = a.dim();
    check_dim("bloating set", n, x.dim())?;
    let op = Arc::new(a.op().clone());
    let ax = SetExpression::linear_map(op.clone(), x)?;
    let a2x = SetExpression::linear_map(op, &ax)?;
    let inner = symmetric_interval_hull(&a2x)?;
    // ⊡(M H) for an origin-centred box H has radius |M| r.
    let radius: DVector<f64> = p_abs.abs() * inner.radius();
    Hyperrectangle::new(DVector::zeros(n), radius).map_err(|_| Error::NonFinite {
        context: "bloating box",
        step: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn osc() -> StateMatrix {
        let w = 4.0 * PI;
        StateMatrix::dense(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -w * w, 0.0])).unwrap()
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = StateMatrix::dense(DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(expm(&z, 0.1).unwrap().to_dense(), DMatrix::identity(3, 3));
    }

    #[test]
    fn expm_oscillator_digits() {
        let phi = expm(&osc(), 0.025).unwrap().to_dense();
        let expected = DMatrix::from_row_slice(
            2,
            2,
            &[0.95105652, 0.02459079, -3.88322208, 0.95105652],
        );
        assert!((phi - expected).amax() < 1e-8);
    }

    #[test]
    fn expm_diagonal() {
        let lam = [-3.0, 0.5, -100.0, 2.0];
        let a = StateMatrix::dense(DMatrix::from_diagonal(&DVector::from_column_slice(&lam)))
            .unwrap();
        let e = expm(&a, 0.3).unwrap().to_dense();
        for (i, l) in lam.iter().enumerate() {
            let x = (l * 0.3f64).exp();
            assert!(((e[(i, i)] - x) / x).abs() < 1e-13);
        }
    }

    #[test]
    fn expm_rejects_bad_step() {
        assert!(expm(&osc(), 0.0).is_err());
        assert!(expm(&osc(), f64::NAN).is_err());
    }

    #[test]
    fn p_series_zero_matrix() {
        let z = StateMatrix::dense(DMatrix::zeros(2, 2)).unwrap();
        let p = p_series(&z, 0.2).unwrap().to_dense();
        assert!((p - DMatrix::identity(2, 2) * 0.02).amax() < 1e-16);
    }

    #[test]
    fn p_series_oscillator_digits() {
        let abs = StateMatrix::new(osc().op().abs()).unwrap();
        let p = p_series(&abs, 0.025).unwrap().to_dense();
        let expected = DMatrix::from_row_slice(
            2,
            2,
            &[3.15078680e-04, 2.61704795e-06, 4.13267648e-04, 3.15078680e-04],
        );
        assert!((p - expected).amax() < 1e-12);
    }

    #[test]
    fn p_series_sparse_matches_dense() {
        let t = [(0, 0, -2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -2.0), (2, 2, -0.5)];
        let csr = crate::matrix::csr_from_triplets(3, 3, &t).unwrap();
        let d = StateMatrix::dense(DMatrix::from(&csr)).unwrap();
        let s = StateMatrix::new(csr).unwrap();
        let pd = p_series(&d, 0.1).unwrap().to_dense();
        let ps = p_series(&s, 0.1).unwrap().to_dense();
        assert!((pd - ps).amax() < 1e-18);
    }

    #[test]
    fn e_plus_oscillator_digits() {
        let x0: SetExpression = Hyperrectangle::from_slices(&[1.0, 0.0], &[0.1, 0.1])
            .unwrap()
            .into();
        let e = e_plus(&osc(), &x0, 0.025).unwrap();
        assert_eq!(e.center(), &DVector::zeros(2));
        assert!((e.radius()[0] - 0.05477208).abs() < 1e-7);
        assert!((e.radius()[1] - 0.07676220).abs() < 1e-7);
    }

    #[test]
    fn e_plus_of_origin_is_zero() {
        let x = SetExpression::singleton(DVector::zeros(2));
        let e = e_plus(&osc(), &x, 0.025).unwrap();
        assert_eq!(e.radius(), &DVector::zeros(2));
    }
}
