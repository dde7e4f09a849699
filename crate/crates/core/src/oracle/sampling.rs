//! Projective measurement of a Hermitian observable with finite shots.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::{Observable, C64};

/// Eigenvalues closer than this are merged into one outcome.
const DEGENERACY_TOL: f64 = 1e-9;

/// Outcome distribution of measuring `obs` on `rho`: distinct eigenvalues
/// with the summed weight of their eigenprojectors.
pub(crate) fn outcome_distribution(rho: &DMatrix<C64>, obs: &Observable) -> Vec<(f64, f64)> {
    let eig = obs.matrix().clone().symmetric_eigen();
    let mut outcomes: Vec<(f64, f64)> = (0..eig.eigenvalues.len())
        .map(|k| {
            let v = eig.eigenvectors.column(k);
            let p = v.dotc(&(rho * v)).re.max(0.0);
            (eig.eigenvalues[k], p)
        })
        .collect();
    outcomes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(outcomes.len());
    for (value, p) in outcomes {
        match merged.last_mut() {
            Some(last) if (value - last.0).abs() <= DEGENERACY_TOL => last.1 += p,
            _ => merged.push((value, p)),
        }
    }
    let total: f64 = merged.iter().map(|o| o.1).sum();
    if total > 0.0 {
        for o in &mut merged {
            o.1 /= total;
        }
    }
    merged
}

/// Sample mean of `shots` outcomes, drawn as a multinomial through a chain
/// of conditional binomials.
pub(crate) fn sample_mean<R: Rng + ?Sized>(distribution: &[(f64, f64)], shots: u64, rng: &mut R) -> f64 {
    let mut remaining = shots;
    let mut mass = 1.0;
    let mut sum = 0.0;
    for (i, &(value, p)) in distribution.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let k = if i + 1 == distribution.len() || mass <= 0.0 {
            remaining
        } else {
            let q = (p / mass).clamp(0.0, 1.0);
            Binomial::new(remaining, q).expect("valid binomial").sample(rng)
        };
        sum += value * k as f64;
        remaining -= k;
        mass -= p;
    }
    sum / shots as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::seeded_rng;
    use crate::PureState;

    #[test]
    fn degenerate_eigenvalues_are_merged() {
        let rho = PureState::basis(4, 1).unwrap().density_matrix().into_matrix();
        let obs = Observable::projector(4, 1).unwrap();
        let dist = outcome_distribution(&rho, &obs);
        assert_eq!(dist.len(), 2);
        assert!((dist[0].0 - 0.0).abs() < 1e-12 && dist[0].1.abs() < 1e-12);
        assert!((dist[1].0 - 1.0).abs() < 1e-12 && (dist[1].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sample_mean_is_unbiased() {
        let dist = [(-1.0, 0.3), (0.5, 0.2), (2.0, 0.5)];
        let exact: f64 = dist.iter().map(|(v, p)| v * p).sum();
        let mut rng = seeded_rng(3);
        let m = sample_mean(&dist, 1_000_000, &mut rng);
        assert!((m - exact).abs() < 0.01);
    }
}
