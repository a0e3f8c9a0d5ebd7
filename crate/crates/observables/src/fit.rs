use crate::{Error, Result};

/// Result of fitting signal(τ) = baseline + amplitude·e^(−rate·τ).
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub rate: f64,
    pub baseline: f64,
    pub amplitude: f64,
    pub residual_norm: f64,
}

const MAX_ITER: usize = 200;

/// Three-parameter exponential fit by Levenberg-Marquardt.
pub fn fit_rate(samples: &[(f64, f64)]) -> Result<RateFit> {
    if samples.len() < 4 {
        return Err(Error::invalid("samples", "need at least 4 (tau, signal) points"));
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::invalid("samples", "taus must be strictly increasing"));
    }
    let y_max = samples.iter().map(|&(_, y)| y.abs()).fold(0.0f64, f64::max);
    let y_spread = samples.iter().map(|&(_, y)| y).fold(f64::NEG_INFINITY, f64::max)
        - samples.iter().map(|&(_, y)| y).fold(f64::INFINITY, f64::min);
    if y_spread <= 1e-12 * y_max.max(1e-300) {
        return Err(Error::Unidentifiable("signal is flat; amplitude ~ 0".into()));
    }

    // initial guess: baseline from the tail, amplitude from the head, rate
    // from the tau scale
    let tail = samples[samples.len() - 1].1;
    let head = samples[0].1;
    let span = samples[samples.len() - 1].0 - samples[0].0;
    let mut p = [3.0 / span, tail, head - tail];

    let mut lambda = 1e-3;
    let chi2 = |p: &[f64; 3]| -> f64 {
        samples
            .iter()
            .map(|&(t, y)| {
                let r = y - (p[1] + p[2] * (-p[0] * t).exp());
                r * r
            })
            .sum()
    };
    let mut cost = chi2(&p);

    for _ in 0..MAX_ITER {
        // J^T J and J^T r for the current parameters
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for &(t, y) in samples {
            let e = (-p[0] * t).exp();
            let r = y - (p[1] + p[2] * e);
            let j = [-p[2] * t * e, 1.0, e]; // d(model)/d(rate, baseline, amplitude)
            for i in 0..3 {
                jtr[i] += j[i] * r;
                for k in 0..3 {
                    jtj[i][k] += j[i] * j[k];
                }
            }
        }
        // damped normal equations
        let mut a = jtj;
        for i in 0..3 {
            a[i][i] *= 1.0 + lambda;
        }
        let Some(step) = solve3(a, jtr) else {
            lambda *= 10.0;
            if lambda > 1e12 {
                return Err(Error::Unidentifiable("singular normal equations".into()));
            }
            continue;
        };
        let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
        let trial_cost = chi2(&trial);
        if trial_cost < cost {
            let improvement = cost - trial_cost;
            p = trial;
            cost = trial_cost;
            lambda = (lambda * 0.3).max(1e-12);
            if improvement <= 1e-14 * cost.max(1e-300)
                && step.iter().zip(&p).all(|(s, q)| s.abs() <= 1e-10 * q.abs().max(1e-300))
            {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }

    let residual_norm = cost.sqrt();
    if p[2].abs() <= 1e-9 * y_max.max(1e-300) {
        return Err(Error::Unidentifiable("fitted amplitude ~ 0".into()));
    }
    if !p[0].is_finite() || p[0] <= 0.0 {
        return Err(Error::FitDiverged {
            iterations: MAX_ITER,
            residual: residual_norm,
        });
    }
    Ok(RateFit {
        rate: p[0],
        baseline: p[1],
        amplitude: p[2],
        residual_norm,
    })
}

/// Solve a 3x3 linear system by Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in (row + 1)..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
