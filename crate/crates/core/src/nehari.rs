//! Two-sided bounds on the quotient distance `dist(h, A)` from a boundary
//! function to the disk algebra.
//!
//! The lower bound is the top singular value of a finite section of the
//! Hankel operator built from the negative Fourier coefficients of `h`; by
//! Nehari's theorem the full operator norm equals the distance, and every
//! finite section can only underestimate it. The upper bound is the certified
//! sup norm of `h - u` for a discrete minimax approximant `u`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circle::{fourier_window, AnalyticPolynomial, CircleGrid, SampledFunction, TrigCoefficients};
use crate::error::{Error, Result};
use crate::solver::{certify_samples, residual, solve, SolverOptions};
use crate::C64;

const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 1000;

/// `H[j][k] = c_{-(j+k+1)}` for `j, k < s`.
#[derive(Clone, Debug, PartialEq)]
pub struct HankelTruncation {
    size: usize,
    // anti[m] = c_{-(m+1)}, m = 0..2s-2
    anti: Vec<C64>,
}

impl HankelTruncation {
    pub fn from_coefficients(c: &TrigCoefficients, s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::invalid("s", "Hankel size must be positive"));
        }
        let need = 2 * s - 1;
        if need > c.half_width() {
            return Err(Error::InsufficientWindow {
                s,
                need,
                k: c.half_width(),
            });
        }
        Ok(HankelTruncation {
            size: s,
            anti: (0..need).map(|m| c.get(-(m as i64 + 1))).collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, j: usize, k: usize) -> C64 {
        self.anti[j + k]
    }

    fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.size)
            .map(|j| (0..self.size).map(|k| self.anti[j + k] * v[k]).sum())
            .collect()
    }

    fn apply_adjoint(&self, w: &[C64]) -> Vec<C64> {
        (0..self.size)
            .map(|k| (0..self.size).map(|j| self.anti[j + k].conj() * w[j]).sum())
            .collect()
    }

    /// Power iteration on `H^* H`. Every iterate gives `|Hv| / |v| <= sigma_1`,
    /// so the returned value never overestimates.
    pub fn largest_singular_value(&self, seed: u64) -> f64 {
        if self.anti.iter().all(|c| c.norm() == 0.0) {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<C64> = (0..self.size)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        normalize(&mut v);
        let mut best: f64 = 0.0;
        let mut prev = 0.0;
        for _ in 0..POWER_MAX_ITER {
            let hv = self.apply(&v);
            let sigma = norm(&hv);
            best = best.max(sigma);
            if sigma == 0.0 {
                break;
            }
            v = self.apply_adjoint(&hv);
            normalize(&mut v);
            if (sigma - prev).abs() <= POWER_TOL * sigma {
                break;
            }
            prev = sigma;
        }
        best
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) {
    let n = norm(v);
    if n > 0.0 {
        for x in v {
            *x /= n;
        }
    }
}

/// Largest singular value of the `s x s` Hankel section of `c`.
pub fn hankel_lower_bound(c: &TrigCoefficients, s: usize) -> Result<f64> {
    Ok(HankelTruncation::from_coefficients(c, s)?.largest_singular_value(0))
}

/// Hankel lower bound computed straight from samples: takes the window
/// `K = 2s - 1` the section needs.
pub fn hankel_lower_bound_of(h: &SampledFunction, s: usize, seed: u64) -> Result<f64> {
    if s == 0 {
        return Err(Error::invalid("s", "Hankel size must be positive"));
    }
    let window = fourier_window(h, 2 * s - 1)?;
    Ok(HankelTruncation::from_coefficients(&window, s)?.largest_singular_value(seed))
}

#[derive(Clone, Debug)]
pub struct UpperBound {
    /// Certified sup over the circle of `h - approximant`.
    pub value: f64,
    pub approximant: AnalyticPolynomial,
    /// `max_j |h - approximant|` on the grid.
    pub grid_value: f64,
    /// Lower bound on the optimal grid value from the final weights.
    pub grid_lower: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn check_degree(grid: &CircleGrid, d: usize) -> Result<()> {
    if grid.len() as f64 <= PI * d as f64 {
        return Err(Error::GridTooCoarse {
            n: grid.len(),
            degree: d,
        });
    }
    Ok(())
}

/// Minimax approximant of degree `<= d` and the certified error bound.
pub fn chebyshev_upper_bound(h: &SampledFunction, d: usize) -> Result<(f64, AnalyticPolynomial)> {
    let ub = chebyshev_upper_bound_with(h, d, &SolverOptions::default())?;
    Ok((ub.value, ub.approximant))
}

pub fn chebyshev_upper_bound_with(
    h: &SampledFunction,
    d: usize,
    opts: &SolverOptions,
) -> Result<UpperBound> {
    check_degree(h.grid(), d)?;
    let sol = solve(&[h], d, opts)?;
    let e = residual(&[h], &sol.alpha, &sol.poly);
    let value = certify_samples(&e, opts.certify_oversample)?;
    Ok(UpperBound {
        value,
        approximant: sol.poly,
        grid_value: sol.grid_value,
        grid_lower: sol.grid_lower,
        converged: sol.converged,
        iterations: sol.iterations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NehariConfig {
    pub degree: usize,
    pub hankel_size: usize,
    pub seed: u64,
    /// `tol_cert = tol_abs + tol_rel * upper`.
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub solver: SolverOptions,
}

impl Default for NehariConfig {
    fn default() -> Self {
        NehariConfig {
            degree: 32,
            hankel_size: 16,
            seed: 0,
            tol_abs: 1e-6,
            tol_rel: 1e-2,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceCertificate {
    pub lower: f64,
    pub upper: f64,
    pub approximant: AnalyticPolynomial,
    #[serde(rename = "n")]
    pub grid_used: CircleGrid,
}

pub fn distance_to_disk_algebra(h: &SampledFunction, cfg: &NehariConfig) -> Result<DistanceCertificate> {
    check_degree(h.grid(), cfg.degree)?;
    let lower = hankel_lower_bound_of(h, cfg.hankel_size, cfg.seed)?;
    let ub = chebyshev_upper_bound_with(h, cfg.degree, &cfg.solver)?;
    let tol = cfg.tol_abs + cfg.tol_rel * ub.value;
    if lower > ub.value + tol {
        return Err(Error::CertificateInconsistency {
            lower,
            upper: ub.value,
            tol,
        });
    }
    Ok(DistanceCertificate {
        lower,
        upper: ub.value,
        approximant: ub.approximant,
        grid_used: *h.grid(),
    })
}
