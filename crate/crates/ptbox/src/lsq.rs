//! Damped Gauss–Newton with a central-difference Jacobian.
//!
//! Square systems reduce to Newton's method; overdetermined ones are solved
//! in the least-squares sense through an SVD of the Jacobian.

use nalgebra::{DMatrix, DVector};

/// Solver settings.
#[derive(Debug, Clone, Copy)]
pub struct LsqOptions {
    pub max_iter: usize,
    /// Stop once `‖δ‖ ≤ step_tol·max(‖x‖, 1)`.
    pub step_tol: f64,
    /// Stop once `‖r‖ ≤ residual_tol`.
    pub residual_tol: f64,
    /// Relative finite-difference step, floored at `fd_floor`.
    pub fd_rel: f64,
    pub fd_floor: f64,
    /// Step halvings tried when the residual grows.
    pub max_halvings: usize,
}

impl Default for LsqOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            step_tol: 1e-15,
            residual_tol: 0.0,
            fd_rel: 1e-7,
            fd_floor: 1e-7,
            max_halvings: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsqStatus {
    /// Step or residual tolerance met.
    Converged,
    /// No damped step reduces the residual: a local minimum of `‖r‖`.
    Stalled,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct LsqSolution {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub status: LsqStatus,
}

/// Minimizes `‖r(x)‖₂` where `r` writes `m` residuals into its output slice.
pub fn gauss_newton<F>(r: F, m: usize, x0: &[f64], opts: &LsqOptions) -> LsqSolution
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut res = vec![0.0; m];
    r(&x, &mut res);
    let mut norm = l2(&res);
    let mut jac = DMatrix::<f64>::zeros(m, n);
    let mut plus = vec![0.0; m];
    let mut minus = vec![0.0; m];
    let mut trial = vec![0.0; n];
    let mut trial_res = vec![0.0; m];

    for iter in 0..opts.max_iter {
        if norm <= opts.residual_tol {
            return LsqSolution { x, residual_norm: norm, iterations: iter, status: LsqStatus::Converged };
        }
        for j in 0..n {
            let h = opts.fd_rel * x[j].abs().max(opts.fd_floor / opts.fd_rel);
            let saved = x[j];
            x[j] = saved + h;
            r(&x, &mut plus);
            x[j] = saved - h;
            r(&x, &mut minus);
            x[j] = saved;
            for i in 0..m {
                jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
            }
        }
        let rhs = DVector::from_iterator(m, res.iter().map(|v| -v));
        let svd = jac.clone().svd(true, true);
        let Ok(step) = svd.solve(&rhs, 1e-14 * svd.singular_values.max()) else {
            return LsqSolution { x, residual_norm: norm, iterations: iter, status: LsqStatus::Stalled };
        };

        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            for j in 0..n {
                trial[j] = x[j] + scale * step[j];
            }
            r(&trial, &mut trial_res);
            let t = l2(&trial_res);
            if t.is_finite() && t <= norm {
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return LsqSolution { x, residual_norm: norm, iterations: iter, status: LsqStatus::Stalled };
        }
        let step_norm = scale * step.norm();
        let x_norm = l2(&x).max(1.0);
        x.copy_from_slice(&trial);
        res.copy_from_slice(&trial_res);
        norm = l2(&res);
        if step_norm <= opts.step_tol * x_norm {
            return LsqSolution { x, residual_norm: norm, iterations: iter + 1, status: LsqStatus::Converged };
        }
    }
    LsqSolution { x, residual_norm: norm, iterations: opts.max_iter, status: LsqStatus::MaxIterations }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_square_system() {
        // x² + y² = 4, x = y.
        let sol = gauss_newton(
            |p, out| {
                out[0] = p[0] * p[0] + p[1] * p[1] - 4.0;
                out[1] = p[0] - p[1];
            },
            2,
            &[1.0, 0.5],
            &LsqOptions::default(),
        );
        assert_eq!(sol.status, LsqStatus::Converged);
        assert!((sol.x[0] - 2f64.sqrt()).abs() < 1e-14);
        assert!((sol.x[1] - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn fits_exponential_decay() {
        let xs: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * (-1.3 * x).exp()).collect();
        let sol = gauss_newton(
            |p, out| {
                for (i, (x, y)) in xs.iter().zip(&ys).enumerate() {
                    out[i] = p[0] * (-p[1] * x).exp() - y;
                }
            },
            xs.len(),
            &[1.0, 0.5],
            &LsqOptions::default(),
        );
        assert!((sol.x[0] - 2.5).abs() < 1e-10);
        assert!((sol.x[1] - 1.3).abs() < 1e-10);
    }

    #[test]
    fn inconsistent_system_stalls_at_least_squares_point() {
        // x = 1 and x = 3 have least-squares solution x = 2.
        let sol = gauss_newton(
            |p, out| {
                out[0] = p[0] - 1.0;
                out[1] = p[0] - 3.0;
            },
            2,
            &[0.0],
            &LsqOptions::default(),
        );
        assert!((sol.x[0] - 2.0).abs() < 1e-12);
        assert!((sol.residual_norm - 2f64.sqrt()).abs() < 1e-12);
    }
}
