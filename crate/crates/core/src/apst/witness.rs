//! Search for a density matrix that reproduces a set of measurement
//! outcomes while lying far from a given pure state.
//!
//! States are parametrized as `rho = A^dag A / tr(A^dag A)` for complex `A`.
//! The objective maximizes the infidelity `1 - <psi|rho|psi>` (a lower bound
//! on the trace distance) against a quadratic penalty on the outcome
//! residuals, with the penalty weight raised in stages. Each restart is a
//! BFGS run from a random `A`.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quantum::seeded_rng;
use crate::{DensityMatrix, Observable, PureState, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WitnessParams {
    pub restarts: usize,
    /// Only points with squared residual at most this count as witnesses.
    pub residual_tol: f64,
    pub penalty_start: f64,
    pub penalty_end: f64,
    pub penalty_growth: f64,
    pub iters_per_stage: usize,
}

impl Default for WitnessParams {
    fn default() -> Self {
        Self {
            restarts: 24,
            residual_tol: 1e-8,
            penalty_start: 10.0,
            penalty_end: 1e10,
            penalty_growth: 10.0,
            iters_per_stage: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    /// Largest trace distance to the reconstruction among feasible points.
    pub max_distance: f64,
    /// Residual at that point.
    pub residual: f64,
    /// Restarts that ended at a feasible point.
    pub feasible_restarts: usize,
    pub restarts: usize,
    /// The best feasible witness, if any.
    #[serde(skip)]
    pub witness: Option<DensityMatrix>,
}

/// Search for a state matching `outcomes` (squared residual below
/// `params.residual_tol`) with the largest trace distance from
/// `reconstructed`.
pub fn uda_witness_search(
    outcomes: &[(Observable, f64)],
    reconstructed: &PureState,
    dim: usize,
    seed: u64,
    params: &WitnessParams,
) -> WitnessReport {
    let target = reconstructed.density_matrix();
    let problem = Problem {
        dim,
        projector: target.matrix().clone(),
        outcomes,
    };
    let runs: Vec<(DMatrix<C64>, f64)> = (0..params.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = seeded_rng(seed.wrapping_add(r as u64));
            let x0: DVector<f64> =
                DVector::from_fn(2 * dim * dim, |_, _| StandardNormal.sample(&mut rng));
            let x = problem.solve(x0, params);
            let rho = problem.density(&x);
            let residual = problem.residual(&rho);
            (rho, residual)
        })
        .collect();

    let mut report = WitnessReport {
        max_distance: 0.0,
        residual: f64::INFINITY,
        feasible_restarts: 0,
        restarts: runs.len(),
        witness: None,
    };
    for (rho, residual) in runs {
        if residual > params.residual_tol {
            continue;
        }
        report.feasible_restarts += 1;
        let rho = DensityMatrix::from_matrix_unchecked(rho);
        let distance = rho.trace_distance(&target).unwrap_or(f64::NAN);
        if report.witness.is_none() || distance > report.max_distance {
            report.max_distance = distance;
            report.residual = residual;
            report.witness = Some(rho);
        }
    }
    report
}

struct Problem<'a> {
    dim: usize,
    projector: DMatrix<C64>,
    outcomes: &'a [(Observable, f64)],
}

impl Problem<'_> {
    fn unpack(&self, x: &DVector<f64>) -> DMatrix<C64> {
        let d2 = self.dim * self.dim;
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            let idx = i * self.dim + j;
            C64::new(x[idx], x[d2 + idx])
        })
    }

    fn density(&self, x: &DVector<f64>) -> DMatrix<C64> {
        let a = self.unpack(x);
        let m = a.adjoint() * &a;
        let t = m.trace().re;
        m / C64::new(t, 0.0)
    }

    fn residual(&self, rho: &DMatrix<C64>) -> f64 {
        self.outcomes
            .iter()
            .map(|(o, v)| {
                let r = expect(rho, o.matrix()) - v;
                r * r
            })
            .sum()
    }

    /// Loss `<psi|rho|psi> + mu * residual` and its gradient in the packed
    /// real parameters.
    fn loss_grad(&self, x: &DVector<f64>, mu: f64) -> (f64, DVector<f64>) {
        let a = self.unpack(x);
        let t = a.norm_squared();
        let rho = a.adjoint() * &a / C64::new(t, 0.0);
        // d f_H / dA (complex form): A (H - f_H) / t
        let grad_of = |h: &DMatrix<C64>, f: f64| -> DMatrix<C64> {
            (&a * h - &a * C64::new(f, 0.0)) / C64::new(t, 0.0)
        };
        let fp = expect(&rho, &self.projector);
        let mut loss = fp;
        let mut g = grad_of(&self.projector, fp);
        for (o, v) in self.outcomes {
            let f = expect(&rho, o.matrix());
            let r = f - v;
            loss += mu * r * r;
            g += grad_of(o.matrix(), f) * C64::new(2.0 * mu * r, 0.0);
        }
        let d2 = self.dim * self.dim;
        let mut grad = DVector::zeros(2 * d2);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let idx = i * self.dim + j;
                grad[idx] = 2.0 * g[(i, j)].re;
                grad[d2 + idx] = 2.0 * g[(i, j)].im;
            }
        }
        (loss, grad)
    }

    fn solve(&self, mut x: DVector<f64>, params: &WitnessParams) -> DVector<f64> {
        let mut mu = params.penalty_start;
        loop {
            x = bfgs(|y| self.loss_grad(y, mu), x, params.iters_per_stage);
            // keep the scale of A near one; the objective is scale invariant
            let n = x.norm();
            if n > 0.0 {
                x /= n;
            }
            if mu >= params.penalty_end {
                break;
            }
            mu = (mu * params.penalty_growth).min(params.penalty_end);
        }
        x
    }
}

fn expect(rho: &DMatrix<C64>, h: &DMatrix<C64>) -> f64 {
    crate::quantum::trace_product(rho, h).re
}

/// Quasi-Newton minimization with an Armijo backtracking line search.
fn bfgs<F>(f: F, mut x: DVector<f64>, max_iter: usize) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> (f64, DVector<f64>),
{
    let n = x.len();
    let mut h = DMatrix::<f64>::identity(n, n);
    let (mut fx, mut g) = f(&x);
    for _ in 0..max_iter {
        if g.norm() < 1e-14 {
            break;
        }
        let mut p = -(&h * &g);
        let mut slope = g.dot(&p);
        if slope >= 0.0 {
            h = DMatrix::identity(n, n);
            p = -g.clone();
            slope = g.dot(&p);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn = &x + &p * step;
            let (fn_, gn) = f(&xn);
            if fn_ <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fn_, gn));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            break;
        };
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            // H+ = H - rho (s hy^T + hy s^T) + (rho^2 yHy + rho) s s^T
            h -= (&s * hy.transpose() + &hy * s.transpose()) * rho;
            h += (&s * s.transpose()) * (rho * rho * yhy + rho);
        }
        let converged = (fx - fn_).abs() <= 1e-16 * fx.abs().max(1.0);
        x = xn;
        fx = fn_;
        g = gn;
        if converged {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bfgs_minimizes_a_quadratic() {
        let x = bfgs(
            |x| {
                let f = (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2);
                let g = DVector::from_vec(vec![2.0 * (x[0] - 1.0), 20.0 * (x[1] + 2.0)]);
                (f, g)
            },
            DVector::from_vec(vec![0.0, 0.0]),
            100,
        );
        assert!((x[0] - 1.0).abs() < 1e-8 && (x[1] + 2.0).abs() < 1e-8);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let psi = crate::quantum::haar_random_state::<f64>(3, 1).unwrap();
        let outcomes = vec![
            (Observable::projector(3, 0).unwrap(), 0.3),
            (Observable::coherence_y(3, 0, 2).unwrap(), -0.1),
        ];
        let p = Problem {
            dim: 3,
            projector: psi.density_matrix().into_matrix(),
            outcomes: &outcomes,
        };
        let mut rng = seeded_rng(4);
        let x: DVector<f64> = DVector::from_fn(18, |_, _| StandardNormal.sample(&mut rng));
        let (_, g) = p.loss_grad(&x, 7.0);
        let h = 1e-6;
        for i in 0..18 {
            let mut xp = x.clone();
            xp[i] += h;
            let mut xm = x.clone();
            xm[i] -= h;
            let fd = (p.loss_grad(&xp, 7.0).0 - p.loss_grad(&xm, 7.0).0) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6, "component {i}: {fd} vs {}", g[i]);
        }
    }
}
