//! Matrix-free preconditioned conjugate gradient for the SPD systems arising
//! from implicit diffusion and the steady-state Helmholtz operator.

use crate::Error;

pub struct CgStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Solve A x = b with Jacobi preconditioning. `apply` computes y = A x;
/// `diag` is the matrix diagonal. Converges when ||r|| <= tol_rel * ||b||.
pub fn solve(
    apply: impl Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol_rel: f64,
    max_iter: usize,
) -> Result<CgStats, Error> {
    let n = b.len();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        x.fill(0.0);
        return Ok(CgStats {
            iterations: 0,
            residual: 0.0,
        });
    }
    let tol = tol_rel * b_norm;

    let mut r = vec![0.0; n];
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    for i in 0..n {
        r[i] = b[i] - ax[i];
    }
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz: f64 = dot(&r, &z);
    let mut res = norm(&r);

    for iter in 0..max_iter {
        if res <= tol {
            return Ok(CgStats {
                iterations: iter,
                residual: res,
            });
        }
        apply(&p, &mut ax);
        let pap = dot(&p, &ax);
        if pap <= 0.0 {
            // matrix is expected SPD; a nonpositive curvature means breakdown
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ax[i];
        }
        res = norm(&r);
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }

    if res <= tol {
        return Ok(CgStats {
            iterations: max_iter,
            residual: res,
        });
    }
    Err(Error::SolverNonConvergence {
        residual: res / b_norm,
        iterations: max_iter,
        tolerance: tol_rel,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
