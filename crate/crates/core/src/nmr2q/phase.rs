//! Inter-column phase from an interference measurement.
//!
//! With known columns `alpha`, `beta` (weights folded in), the output of
//! the superposed input has amplitudes `A_n = alpha_n + e^{i theta} beta_n`.
//! A measured relative phase `arg(conj(A_i) A_j)` is inverted for `theta`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::C64;

const GRID: usize = 4096;
const BISECTION_TOL: f64 = 1e-12;
/// Roots closer than this are the same root.
const MERGE_TOL: f64 = 1e-9;
/// Candidates whose discrepancies differ by less than this are tied.
const TIE_TOL: f64 = 1e-9;

/// Extra data used to choose between several roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseCheck {
    /// Measured `arg(conj(A_i) A_j)` for another element pair.
    Phase { pair: (usize, usize), theta: f64 },
    /// Measured `|conj(A_i) A_j|`.
    Modulus { pair: (usize, usize), modulus: f64 },
}

/// Wrap into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

/// `conj(A_i) A_j` at `theta`.
pub fn interference(alpha: &[C64], beta: &[C64], theta: f64, (i, j): (usize, usize)) -> C64 {
    let z = C64::from_polar(1.0, theta);
    (alpha[i] + z * beta[i]).conj() * (alpha[j] + z * beta[j])
}

/// Solve `phase(alpha_i + e^{i theta} beta_i, alpha_j + e^{i theta} beta_j)
/// = theta_exp` for `theta` in `[0, 2 pi)`. Fails with `AmbiguousSolution`
/// when more than one root exists.
pub fn phase_solve(alpha: &[C64], beta: &[C64], theta_exp: f64, pair: (usize, usize)) -> Result<f64> {
    phase_solve_with(alpha, beta, theta_exp, pair, &[])
}

/// As [`phase_solve`], choosing among several roots the one that best
/// agrees with `checks`.
pub fn phase_solve_with(
    alpha: &[C64],
    beta: &[C64],
    theta_exp: f64,
    pair: (usize, usize),
    checks: &[PhaseCheck],
) -> Result<f64> {
    validate_pair(alpha, beta, pair)?;
    for c in checks {
        let (PhaseCheck::Phase { pair, .. } | PhaseCheck::Modulus { pair, .. }) = *c;
        validate_pair(alpha, beta, pair)?;
    }
    let roots = phase_roots(alpha, beta, theta_exp, pair);
    match roots.len() {
        0 => Err(Error::PhaseSolveNoSolution(theta_exp)),
        1 => Ok(roots[0]),
        _ => {
            if checks.is_empty() {
                return Err(Error::AmbiguousSolution(roots[0], roots[1]));
            }
            let mut scored: Vec<(f64, f64)> = roots
                .iter()
                .map(|&r| (discrepancy(alpha, beta, r, checks), r))
                .collect();
            scored.sort_by(|a, b| a.0.total_cmp(&b.0));
            if scored[1].0 - scored[0].0 <= TIE_TOL {
                return Err(Error::AmbiguousSolution(scored[0].1, scored[1].1));
            }
            Ok(scored[0].1)
        }
    }
}

fn validate_pair(alpha: &[C64], beta: &[C64], (i, j): (usize, usize)) -> Result<()> {
    if alpha.len() != beta.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha.len(),
            actual: beta.len(),
        });
    }
    if i == j || i >= alpha.len() || j >= alpha.len() {
        return Err(Error::InvalidPair(i, j));
    }
    Ok(())
}

fn discrepancy(alpha: &[C64], beta: &[C64], theta: f64, checks: &[PhaseCheck]) -> f64 {
    checks
        .iter()
        .map(|c| match *c {
            PhaseCheck::Phase { pair, theta: measured } => {
                wrap_angle(interference(alpha, beta, theta, pair).arg() - measured).abs()
            }
            PhaseCheck::Modulus { pair, modulus } => (interference(alpha, beta, theta, pair).norm() - modulus).abs(),
        })
        .sum()
}

/// All roots in `[0, 2 pi)`, by grid scan and bisection.
pub fn phase_roots(alpha: &[C64], beta: &[C64], theta_exp: f64, pair: (usize, usize)) -> Vec<f64> {
    let scale: f64 = alpha
        .iter()
        .chain(beta)
        .map(|a| a.norm_sqr())
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    let f = |theta: f64| wrap_angle(interference(alpha, beta, theta, pair).arg() - theta_exp);
    let step = TAU / GRID as f64;
    let mut roots: Vec<f64> = Vec::new();
    let mut push = |r: f64| {
        let r = r.rem_euclid(TAU);
        // a vanishing amplitude makes the phase meaningless there
        if interference(alpha, beta, r, pair).norm() <= 1e-12 * scale {
            return;
        }
        if roots.iter().all(|&q| wrap_angle(q - r).abs() > MERGE_TOL) {
            roots.push(r);
        }
    };
    let mut a = 0.0;
    let mut fa = f(a);
    for k in 1..=GRID {
        let b = k as f64 * step;
        let fb = f(b);
        if fa == 0.0 {
            push(a);
        } else if fa * fb < 0.0 && (fa - fb).abs() < PI {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    roots.sort_by(f64::total_cmp);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_columns() {
        let alpha = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let beta = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        for theta in [0.0, 0.3, 1.0, 2.5, -1.2, 3.0] {
            let got = phase_solve(&alpha, &beta, theta, (0, 1)).unwrap();
            assert!(wrap_angle(got - theta).abs() < 1e-10, "{theta} -> {got}");
        }
    }

    #[test]
    fn wrap() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let a = [c(1.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(phase_solve(&a, &a, 0.0, (0, 0)), Err(Error::InvalidPair(0, 0))));
        assert!(matches!(phase_solve(&a, &a, 0.0, (0, 2)), Err(Error::InvalidPair(0, 2))));
        // A_1 = 0 for every theta: nothing to solve
        assert!(matches!(phase_solve(&a, &a, 0.4, (0, 1)), Err(Error::PhaseSolveNoSolution(_))));
    }

    #[test]
    fn modulus_check_separates_two_roots() {
        // origin outside the interference ellipse: two roots on the ray
        let alpha = [c(0.8, 0.0), c(0.6, 0.0)];
        let beta = [c(0.1, 0.0), c(0.0, 0.1)];
        let truth = 1.1;
        let g = interference(&alpha, &beta, truth, (0, 1));
        let roots = phase_roots(&alpha, &beta, g.arg(), (0, 1));
        assert!(roots.len() >= 2, "{roots:?}");
        assert!(matches!(phase_solve(&alpha, &beta, g.arg(), (0, 1)), Err(Error::AmbiguousSolution(..))));
        let got = phase_solve_with(
            &alpha,
            &beta,
            g.arg(),
            (0, 1),
            &[PhaseCheck::Modulus {
                pair: (0, 1),
                modulus: g.norm(),
            }],
        )
        .unwrap();
        assert!(wrap_angle(got - truth).abs() < 1e-10);
    }
}
