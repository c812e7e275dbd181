//! Discrete complex minimax over convex combinations plus analytic
//! corrections:
//!
//! ```text
//! min_{alpha in simplex, a in C^{d+1}}  max_j | sum_n alpha_n f_n(theta_j) - sum_k a_k e^{ik theta_j} |
//! ```
//!
//! Solved with Lawson's iteratively reweighted least squares. For weights
//! `w` on the simplex, `min_x sum_j w_j |e_j(x)|^2` never exceeds the squared
//! minimax value, so every iteration yields a lower bound next to the
//! running upper bound `max_j |e_j|`; iteration stops once the two meet.
//! The weighted normal equations are Toeplitz in the analytic block (their
//! entries are trigonometric moments of `w`) and are assembled with FFTs.

use serde::{Deserialize, Serialize};

use crate::circle::{max_modulus, AnalyticPolynomial, SampledFunction, TrigPolynomial};
use crate::error::{Error, Result};
use crate::fft::Dft;
use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Stop when `upper - lower <= rel_gap * upper`.
    pub rel_gap: f64,
    /// ... or when `upper - lower <= abs_gap * scale`, `scale` the largest
    /// sample modulus of the inputs.
    pub abs_gap: f64,
    /// Certificates evaluate the error interpolant on `oversample * N` points.
    pub certify_oversample: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 2000,
            rel_gap: 1e-7,
            abs_gap: 1e-13,
            certify_oversample: 32,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Solution {
    pub alpha: Vec<f64>,
    pub poly: AnalyticPolynomial,
    /// `max_j |e_j|` of the returned pair.
    pub grid_value: f64,
    /// Best Lawson lower bound on the grid optimum.
    pub grid_lower: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Certified bound on the sup over the circle of the interpolant of `error`.
pub(crate) fn certify_samples(error: &[C64], oversample: usize) -> Result<f64> {
    let n = error.len();
    TrigPolynomial::from_samples(error).certified_sup_bound(n * oversample.max(1))
}

/// `sum_n alpha_n f_n - u` on the grid.
pub(crate) fn residual(
    tail: &[&SampledFunction],
    alpha: &[f64],
    poly: &AnalyticPolynomial,
) -> Vec<C64> {
    let n = tail[0].grid().len();
    let u = poly.to_trig_polynomial().evaluate_on(n);
    let mut e: Vec<C64> = u.into_iter().map(|v| -v).collect();
    for (f, a) in tail.iter().zip(alpha) {
        if *a != 0.0 {
            for (ej, fj) in e.iter_mut().zip(f.values()) {
                *ej += fj * *a;
            }
        }
    }
    e
}

pub(crate) fn solve(
    tail: &[&SampledFunction],
    degree: usize,
    opts: &SolverOptions,
) -> Result<Solution> {
    let Some(first) = tail.first() else {
        return Err(Error::invalid("tail", "need at least one function"));
    };
    let grid = *first.grid();
    for f in tail {
        crate::circle::ensure_same_grid(&grid, f.grid())?;
    }
    let n = grid.len();
    let dim = degree + 1;
    if 2 * degree >= n {
        return Err(Error::GridTooCoarse { n, degree });
    }
    let count = tail.len();
    let scale = tail.iter().map(|f| f.max_modulus()).fold(0.0, f64::max);
    let mut alpha = vec![0.0; count];
    alpha[0] = 1.0;
    if scale == 0.0 {
        return Ok(Solution {
            alpha,
            poly: AnalyticPolynomial::new(vec![C64::new(0.0, 0.0); dim])?,
            grid_value: 0.0,
            grid_lower: 0.0,
            iterations: 0,
            converged: true,
        });
    }

    let dft = Dft::new(n);
    let tie_floor = 1e-24 * scale * scale;
    let mut w = vec![1.0 / n as f64; n];
    let mut best: Option<(f64, Vec<f64>, Vec<C64>)> = None;
    let mut lower: f64 = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    let mut buf = vec![C64::new(0.0, 0.0); n];

    for it in 0..opts.max_iterations.max(1) {
        iterations = it + 1;
        // moments m_k = sum_j w_j e^{ik theta_j}
        for (b, wj) in buf.iter_mut().zip(&w) {
            *b = C64::new(*wj, 0.0);
        }
        dft.inverse(&mut buf);
        let moments = &buf[..dim];
        let mut gram = vec![C64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                gram[r * dim + c] = if c >= r {
                    moments[c - r]
                } else {
                    moments[r - c].conj()
                };
            }
        }
        // rhs[:, i] = sum_j w_j f_i(theta_j) e^{-ik theta_j}
        let mut rhs = vec![C64::new(0.0, 0.0); dim * count];
        let mut fbuf = vec![C64::new(0.0, 0.0); n];
        for (i, f) in tail.iter().enumerate() {
            for ((b, fv), wj) in fbuf.iter_mut().zip(f.values()).zip(&w) {
                *b = fv * *wj;
            }
            dft.forward(&mut fbuf);
            for k in 0..dim {
                rhs[k * count + i] = fbuf[k];
            }
        }
        let chol = Cholesky::factor_with_ridge(&gram, dim)?;
        let mut sol = rhs.clone();
        for i in 0..count {
            let mut col: Vec<C64> = (0..dim).map(|k| sol[k * count + i]).collect();
            chol.solve_in_place(&mut col);
            for k in 0..dim {
                sol[k * count + i] = col[k];
            }
        }

        if count > 1 {
            let mut q = vec![0.0; count * count];
            for i in 0..count {
                for m in i..count {
                    let direct: C64 = tail[i]
                        .values()
                        .iter()
                        .zip(tail[m].values())
                        .zip(&w)
                        .map(|((a, b), wj)| a.conj() * b * *wj)
                        .sum();
                    let proj: C64 = (0..dim)
                        .map(|k| rhs[k * count + i].conj() * sol[k * count + m])
                        .sum();
                    let v = (direct - proj).re;
                    q[i * count + m] = v;
                    q[m * count + i] = v;
                }
            }
            alpha = simplex_qp(&q, count, &alpha, tie_floor);
        }

        let coeffs: Vec<C64> = (0..dim)
            .map(|k| (0..count).map(|i| sol[k * count + i] * alpha[i]).sum())
            .collect();
        let poly = AnalyticPolynomial::new(coeffs)
            .map_err(|_| Error::SolverFailure("non-finite least-squares coefficients".into()))?;
        let e = residual(tail, &alpha, &poly);
        let upper = max_modulus(&e);
        if !upper.is_finite() {
            return Err(Error::SolverFailure("non-finite residual".into()));
        }
        let weighted: f64 = e.iter().zip(&w).map(|(ej, wj)| ej.norm_sqr() * wj).sum();
        lower = lower.max(weighted.max(0.0).sqrt());
        if best.as_ref().is_none_or(|b| upper < b.0) {
            best = Some((upper, alpha.clone(), poly.coeffs().to_vec()));
        }
        let best_upper = best.as_ref().unwrap().0;
        if best_upper - lower <= (opts.rel_gap * best_upper).max(opts.abs_gap * scale) {
            converged = true;
            break;
        }

        let mut total = 0.0;
        for (wj, ej) in w.iter_mut().zip(&e) {
            *wj *= ej.norm();
            total += *wj;
        }
        if !(total > 0.0) {
            converged = true;
            break;
        }
        for wj in &mut w {
            *wj /= total;
        }
    }

    let (grid_value, alpha, coeffs) = best.expect("at least one iteration ran");
    Ok(Solution {
        alpha,
        poly: AnalyticPolynomial::new(coeffs)?,
        grid_value,
        grid_lower: lower.min(grid_value),
        iterations,
        converged,
    })
}

/// Lower-triangular factor of a Hermitian positive definite matrix,
/// row-major.
struct Cholesky {
    dim: usize,
    l: Vec<C64>,
}

impl Cholesky {
    fn factor(a: &[C64], dim: usize, ridge: f64) -> Option<Self> {
        let mut l = vec![C64::new(0.0, 0.0); dim * dim];
        for j in 0..dim {
            let mut s = a[j * dim + j].re + ridge;
            for k in 0..j {
                s -= l[j * dim + k].norm_sqr();
            }
            if !(s > 0.0) {
                return None;
            }
            let d = s.sqrt();
            l[j * dim + j] = C64::new(d, 0.0);
            for i in j + 1..dim {
                let mut v = a[i * dim + j];
                for k in 0..j {
                    v -= l[i * dim + k] * l[j * dim + k].conj();
                }
                l[i * dim + j] = v / d;
            }
        }
        Some(Cholesky { dim, l })
    }

    fn factor_with_ridge(a: &[C64], dim: usize) -> Result<Self> {
        let diag = a[0].re.abs().max(f64::MIN_POSITIVE);
        let mut ridge = 1e-14 * diag;
        while ridge <= 1e-4 * diag {
            if let Some(c) = Cholesky::factor(a, dim, ridge) {
                return Ok(c);
            }
            ridge *= 100.0;
        }
        Err(Error::SolverFailure(
            "weighted normal equations are numerically singular".into(),
        ))
    }

    #[allow(clippy::needless_range_loop)]
    fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.dim;
        for i in 0..n {
            let mut v = b[i];
            for k in 0..i {
                v -= self.l[i * n + k] * b[k];
            }
            b[i] = v / self.l[i * n + i].re;
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            for k in i + 1..n {
                v -= self.l[k * n + i].conj() * b[k];
            }
            b[i] = v / self.l[i * n + i].re;
        }
    }
}

/// Euclidean projection onto `{x >= 0, sum x = 1}` (sort-based).
pub(crate) fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
        }
    }
    let mut x: Vec<f64> = v.iter().map(|vi| (vi - theta).max(0.0)).collect();
    let s: f64 = x.iter().sum();
    if s > 0.0 {
        for xi in &mut x {
            *xi /= s;
        }
    } else {
        x = vec![1.0 / v.len() as f64; v.len()];
    }
    x
}

/// Accelerated projected gradient for `min alpha^T Q alpha` on the simplex,
/// started from `start`. Curvature below `floor` is treated as flat, so
/// ties at rounding level keep the starting point.
fn simplex_qp(q: &[f64], count: usize, start: &[f64], floor: f64) -> Vec<f64> {
    let gersh = (0..count)
        .map(|i| q[i * count..(i + 1) * count].iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let lip = 2.0 * gersh.max(floor);
    let grad = |y: &[f64]| -> Vec<f64> {
        (0..count)
            .map(|i| 2.0 * (0..count).map(|m| q[i * count + m] * y[m]).sum::<f64>())
            .collect()
    };
    let mut x = start.to_vec();
    let mut y = x.clone();
    let mut t = 1.0f64;
    for _ in 0..2000 {
        let g = grad(&y);
        let step: Vec<f64> = y.iter().zip(&g).map(|(yi, gi)| yi - gi / lip).collect();
        let x_new = project_simplex(&step);
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let moved = x_new
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        y = x_new
            .iter()
            .zip(&x)
            .map(|(a, b)| a + (t - 1.0) / t_new * (a - b))
            .collect();
        x = x_new;
        t = t_new;
        if moved < 1e-15 {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::CircleGrid;

    #[test]
    fn projection_lands_on_simplex() {
        let x = project_simplex(&[0.3, -2.0, 5.0, 0.1]);
        assert!(x.iter().all(|v| *v >= 0.0));
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(x, vec![0.0, 0.0, 1.0, 0.0]);
        let y = project_simplex(&[0.25, 0.25, 0.25, 0.25]);
        assert_eq!(y, vec![0.25; 4]);
    }

    #[test]
    fn qp_finds_interior_minimum() {
        // (a0 - a1)^2 + a1^2 ... Q = [[1, -1], [-1, 2]] minimized at a = (3/5, 2/5)
        let q = [1.0, -1.0, -1.0, 2.0];
        let a = simplex_qp(&q, 2, &[1.0, 0.0], 1e-30);
        assert!((a[0] - 0.6).abs() < 1e-9 && (a[1] - 0.4).abs() < 1e-9, "{a:?}");
    }

    #[test]
    fn analytic_target_is_reproduced() {
        let grid = CircleGrid::new(128).unwrap();
        let p = AnalyticPolynomial::new(vec![
            C64::new(0.2, 0.1),
            C64::new(-0.4, 0.0),
            C64::new(0.0, 0.3),
        ])
        .unwrap();
        let f = p.sample_on(grid);
        let s = solve(&[&f], 4, &SolverOptions::default()).unwrap();
        assert!(s.grid_value < 1e-12);
        assert!(s.converged);
        for (a, b) in s.poly.coeffs().iter().zip(p.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn lawson_brackets_the_grid_optimum() {
        let grid = CircleGrid::new(256).unwrap();
        let f = SampledFunction::from_fn(grid, |t| {
            C64::from_polar(1.0, -t) * 0.7 + C64::from_polar(0.4, -3.0 * t) + C64::new(t.cos().abs(), 0.0)
        })
        .unwrap();
        let s = solve(&[&f], 12, &SolverOptions::default()).unwrap();
        assert!(s.grid_lower <= s.grid_value);
        let e = residual(&[&f], &s.alpha, &s.poly);
        assert!((max_modulus(&e) - s.grid_value).abs() < 1e-15);
    }
}
