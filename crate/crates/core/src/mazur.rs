//! Constructive convex-combination step: given a tail `f_m, ..., f_{k_m}` of
//! a uniformly bounded sequence, find simplex weights and an analytic
//! polynomial `u_m` making `sum alpha_n f_n - u_m` uniformly small.
//!
//! Weights and correction are found by one joint convex program rather than
//! by an existence argument. When the program's value cannot be pushed
//! below the target the step reports the best value together with a Hankel
//! lower bound for the combination it found.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circle::{certified_sup_norm_banded, AnalyticPolynomial, SampledFunction};
use crate::error::{Error, Result};
use crate::nehari::hankel_lower_bound_of;
use crate::solver::{certify_samples, residual, solve, SolverOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexWeights {
    pub m: usize,
    pub k_m: usize,
    pub alpha: Vec<f64>,
}

impl SimplexWeights {
    pub fn is_on_simplex(&self) -> bool {
        self.alpha.iter().all(|a| *a >= 0.0) && (self.alpha.iter().sum::<f64>() - 1.0).abs() <= 1e-12
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinationResult {
    pub weights: SimplexWeights,
    pub approximant: AnalyticPolynomial,
    /// Certified sup over the circle of `sum alpha_n f_n - u_m`.
    pub achieved: f64,
    /// Certified sup of `u_m`.
    pub u_bound: f64,
    pub target: f64,
    pub success: bool,
    /// `max_j |sum alpha_n f_n - u_m|` before certification.
    pub grid_value: f64,
    /// Common claimed bound `M` of the tail.
    pub tail_bound: f64,
    /// Hankel lower bound on the distance of the combination to the disk
    /// algebra; filled in when the target was not reached.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_witness: Option<f64>,
    pub solver_converged: bool,
}

impl CombinationResult {
    /// `u_bound <= M + achieved`, the grid form of the bound on `u_m`
    /// implied by the combination being within `achieved` of it.
    pub fn u_bound_consistent(&self) -> bool {
        self.u_bound <= self.tail_bound + self.achieved
    }

    pub fn combination(&self, tail: &[SampledFunction]) -> Result<SampledFunction> {
        let refs: Vec<&SampledFunction> = tail.iter().collect();
        let zero = AnalyticPolynomial::zero();
        SampledFunction::new(*tail[0].grid(), residual(&refs, &self.weights.alpha, &zero))
    }

    /// Re-evaluates and re-certifies `achieved` from the components.
    pub fn recompute_achieved(&self, tail: &[SampledFunction], oversample: usize) -> Result<f64> {
        if tail.len() != self.weights.alpha.len() {
            return Err(Error::LengthMismatch {
                expected: self.weights.alpha.len(),
                got: tail.len(),
            });
        }
        let refs: Vec<&SampledFunction> = tail.iter().collect();
        certify_samples(&residual(&refs, &self.weights.alpha, &self.approximant), oversample)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MazurOptions {
    pub hankel_size: usize,
    pub seed: u64,
    pub solver: SolverOptions,
}

impl Default for MazurOptions {
    fn default() -> Self {
        MazurOptions {
            hankel_size: 16,
            seed: 0,
            solver: SolverOptions::default(),
        }
    }
}

/// `tail[i]` is `f_{m+i}`. Every member must carry a claimed bound; `M` is
/// taken as the largest of them.
pub fn find_convex_combination(
    tail: &[SampledFunction],
    m: usize,
    d: usize,
    target: f64,
    opts: &MazurOptions,
) -> Result<CombinationResult> {
    let Some(first) = tail.first() else {
        return Err(Error::invalid("tail", "tail is empty"));
    };
    if !(target > 0.0) {
        return Err(Error::invalid("target", "must be positive"));
    }
    let grid = *first.grid();
    if grid.len() as f64 <= PI * d as f64 {
        return Err(Error::GridTooCoarse {
            n: grid.len(),
            degree: d,
        });
    }
    let mut bound: f64 = 0.0;
    for (i, f) in tail.iter().enumerate() {
        crate::circle::ensure_same_grid(&grid, f.grid())?;
        let b = f.claimed_bound().ok_or_else(|| {
            Error::Precondition(format!("tail member {} carries no claimed bound", m + i))
        })?;
        bound = bound.max(b);
    }

    let refs: Vec<&SampledFunction> = tail.iter().collect();
    let sol = solve(&refs, d, &opts.solver)?;
    let oversample = opts.solver.certify_oversample;
    let achieved = certify_samples(&residual(&refs, &sol.alpha, &sol.poly), oversample)?;
    let u_bound = certified_sup_norm_banded(&sol.poly, grid.len() * oversample.max(1))?;
    let success = achieved < target;
    let weights = SimplexWeights {
        m,
        k_m: m + tail.len() - 1,
        alpha: sol.alpha,
    };
    let mut result = CombinationResult {
        weights,
        approximant: sol.poly,
        achieved,
        u_bound,
        target,
        success,
        grid_value: sol.grid_value,
        tail_bound: bound,
        lower_witness: None,
        solver_converged: sol.converged,
    };
    if !success {
        let comb = result.combination(tail)?;
        result.lower_witness = Some(hankel_lower_bound_of(&comb, opts.hankel_size, opts.seed)?);
    }
    Ok(result)
}

/// Tail `f_start ..= f_end` and degree budget for step `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailPlan {
    pub start: usize,
    pub end: usize,
    pub degree: usize,
}

/// Linear schedule `k_m = tail_factor * m`, `d_m = degree_factor * m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TailSchedule {
    pub tail_factor: usize,
    pub degree_factor: usize,
}

impl Default for TailSchedule {
    fn default() -> Self {
        TailSchedule {
            tail_factor: 4,
            degree_factor: 32,
        }
    }
}

impl TailSchedule {
    pub fn plan(&self, m: usize) -> Result<TailPlan> {
        if m == 0 {
            return Err(Error::invalid("m", "steps are numbered from 1"));
        }
        if self.tail_factor == 0 || self.degree_factor == 0 {
            return Err(Error::invalid("schedule", "factors must be positive"));
        }
        Ok(TailPlan {
            start: m,
            end: (self.tail_factor * m).max(m),
            degree: self.degree_factor * m,
        })
    }
}

/// Default schedule: `(m, 4m, 32m)`.
pub fn greedy_tail_schedule(m: usize) -> Result<TailPlan> {
    TailSchedule::default().plan(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::CircleGrid;
    use crate::hardy::{radial_boundary_samples, BoundedAnalyticWitness, RadialSchedule};
    use crate::C64;

    #[test]
    fn schedule_formula() {
        let p = |m| greedy_tail_schedule(m).unwrap();
        assert_eq!(p(1), TailPlan { start: 1, end: 4, degree: 32 });
        assert_eq!(p(3), TailPlan { start: 3, end: 12, degree: 96 });
        assert_eq!(p(8), TailPlan { start: 8, end: 32, degree: 256 });
        assert!(greedy_tail_schedule(0).is_err());
    }

    #[test]
    fn repeated_polynomial_tail() {
        let grid = CircleGrid::new(512).unwrap();
        let p = AnalyticPolynomial::new(vec![C64::new(0.3, 0.0), C64::new(0.0, 0.4), C64::new(-0.2, 0.1)]).unwrap();
        let f = p.sample_on(grid).with_bound(1.0).unwrap();
        let tail = vec![f.clone(), f.clone(), f];
        let r = find_convex_combination(&tail, 1, 4, 0.1, &MazurOptions::default()).unwrap();
        assert!(r.success && r.achieved <= 1e-6);
        assert!(r.weights.is_on_simplex());
        for (a, b) in r.approximant.coeffs().iter().zip(p.coeffs()) {
            assert!((a - b).norm() < 1e-9);
        }
        let again = r.recompute_achieved(&tail, 32).unwrap();
        assert!((again - r.achieved).abs() <= 1e-9);
    }

    #[test]
    fn conjugate_tail_is_obstructed() {
        let grid = CircleGrid::new(512).unwrap();
        let f = SampledFunction::from_fn(grid, |t| C64::from_polar(1.0, -t))
            .unwrap()
            .with_bound(1.0)
            .unwrap();
        let tail = vec![f; 5];
        for d in [4, 16, 64] {
            let r = find_convex_combination(&tail, 1, d, 0.5, &MazurOptions::default()).unwrap();
            assert!(!r.success);
            assert!(r.achieved >= 1.0 - 5e-2);
            assert!(r.lower_witness.unwrap() >= 1.0 - 1e-3);
        }
    }

    #[test]
    fn blaschke_dilates_reach_target() {
        let grid = CircleGrid::new(1024).unwrap();
        let g = BoundedAnalyticWitness::blaschke(vec![C64::new(0.5, 0.0)]).unwrap();
        let sched = RadialSchedule::Geometric;
        let tail: Vec<SampledFunction> = (4..=12)
            .map(|n| radial_boundary_samples(&g, grid, sched.radius(n).unwrap()).unwrap())
            .collect();
        let r = find_convex_combination(&tail, 4, 64, 0.25, &MazurOptions::default()).unwrap();
        assert!(r.success && r.achieved < 0.25);
        assert!(r.u_bound_consistent(), "{} vs {}", r.u_bound, r.achieved);
        assert_eq!(r.weights.k_m, 12);
    }

    #[test]
    fn rejects_unbounded_or_mixed_tails() {
        let g1 = CircleGrid::new(64).unwrap();
        let g2 = CircleGrid::new(128).unwrap();
        let a = SampledFunction::zero(g1);
        let b = SampledFunction::zero(g2);
        assert!(matches!(
            find_convex_combination(&[a.clone(), b], 1, 4, 0.1, &MazurOptions::default()),
            Err(Error::GridMismatch { .. })
        ));
        let unbounded = SampledFunction::new(g1, vec![C64::new(0.0, 0.0); 64]).unwrap();
        assert!(matches!(
            find_convex_combination(&[unbounded], 1, 4, 0.1, &MazurOptions::default()),
            Err(Error::Precondition(_))
        ));
        assert!(find_convex_combination(&[a], 1, 4, 0.0, &MazurOptions::default()).is_err());
    }
}
