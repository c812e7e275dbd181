//! Finite-prefix weak-star convergence checks for uniformly bounded
//! boundary sequences.
//!
//! For a sequence bounded by `M` in `L^inf`, the pairings against `L^1`
//! functions are equicontinuous in the `L^1` argument, so convergence of the
//! pairings against trigonometric monomials (a dense family) is equivalent
//! to weak-star convergence. The checker therefore compares Fourier windows
//! `c_k(f_n)` and `c_k(g)`, `|k| <= K`, and reports the deviation curves.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circle::{
    certified_sup_norm_banded, ensure_same_grid, fourier_window, AnalyticPolynomial, CircleGrid,
    SampledFunction, ROUNDING_SLACK,
};
use crate::error::{Error, Result};
use crate::hardy::BoundedAnalyticWitness;
use crate::C64;

/// An indexed family `n -> f_n` (`n >= 1`) on a fixed grid, uniformly
/// bounded by `uniform_bound()`.
pub trait SequenceProvider: Sync {
    fn grid(&self) -> CircleGrid;
    fn uniform_bound(&self) -> f64;
    /// Length of the available prefix.
    fn available(&self) -> usize;
    fn member(&self, n: usize) -> Result<SampledFunction>;
}

/// Provider backed by a stored list; `members[0]` is `f_1`.
#[derive(Clone, Debug)]
pub struct StoredSequence {
    grid: CircleGrid,
    bound: f64,
    members: Vec<SampledFunction>,
}

impl StoredSequence {
    pub fn new(members: Vec<SampledFunction>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::invalid("members", "sequence is empty"));
        };
        let grid = *first.grid();
        let mut bound: f64 = 0.0;
        for f in &members {
            ensure_same_grid(&grid, f.grid())?;
            bound = bound.max(f.claimed_bound().unwrap_or_else(|| f.max_modulus()));
        }
        let members = members
            .into_iter()
            .map(|f| {
                if f.claimed_bound().is_some() {
                    Ok(f)
                } else {
                    f.with_bound(bound)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StoredSequence {
            grid,
            bound,
            members,
        })
    }

    pub fn members(&self) -> &[SampledFunction] {
        &self.members
    }
}

impl SequenceProvider for StoredSequence {
    fn grid(&self) -> CircleGrid {
        self.grid
    }
    fn uniform_bound(&self) -> f64 {
        self.bound
    }
    fn available(&self) -> usize {
        self.members.len()
    }
    fn member(&self, n: usize) -> Result<SampledFunction> {
        if n == 0 || n > self.members.len() {
            return Err(Error::IndexUnavailable {
                n,
                reason: format!("stored sequence has {} members", self.members.len()),
            });
        }
        Ok(self.members[n - 1].clone())
    }
}

/// Provider sampling `f(n, theta)`.
pub struct FnSequence<F> {
    grid: CircleGrid,
    bound: f64,
    len: usize,
    f: F,
}

impl<F> FnSequence<F>
where
    F: Fn(usize, f64) -> C64 + Sync,
{
    pub fn new(grid: CircleGrid, bound: f64, len: usize, f: F) -> Self {
        FnSequence { grid, bound, len, f }
    }
}

impl<F> SequenceProvider for FnSequence<F>
where
    F: Fn(usize, f64) -> C64 + Sync,
{
    fn grid(&self) -> CircleGrid {
        self.grid
    }
    fn uniform_bound(&self) -> f64 {
        self.bound
    }
    fn available(&self) -> usize {
        self.len
    }
    fn member(&self, n: usize) -> Result<SampledFunction> {
        if n == 0 || n > self.len {
            return Err(Error::IndexUnavailable {
                n,
                reason: format!("prefix has {} members", self.len),
            });
        }
        SampledFunction::from_fn(self.grid, |t| (self.f)(n, t))?.with_bound(self.bound)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converged,
    NotConverged,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Converged => "converged",
            Verdict::NotConverged => "not-converged",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub k: i64,
    pub n: usize,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakStarReport {
    pub window: usize,
    pub tol: f64,
    pub prefix: usize,
    /// `deviations[n-1][k+K] = |c_k(f_n) - c_k(g)|`.
    pub deviations: Vec<Vec<f64>>,
    /// `max_k deviations[n-1][k]`.
    pub max_deviation: Vec<f64>,
    pub verdict: Verdict,
    /// Largest deviation over the last quarter of the prefix.
    pub witness: Witness,
}

impl WeakStarReport {
    pub fn deviation(&self, n: usize, k: i64) -> f64 {
        self.deviations[n - 1][(k + self.window as i64) as usize]
    }

    /// Rows `n`, columns `k = -K..K`, '.' decimals, '\n' line ends.
    pub fn to_csv(&self) -> String {
        let k = self.window as i64;
        let mut out = String::from("n");
        for kk in -k..=k {
            let _ = write!(out, ",k{kk}");
        }
        out.push('\n');
        for (i, row) in self.deviations.iter().enumerate() {
            let _ = write!(out, "{}", i + 1);
            for v in row {
                let _ = write!(out, ",{v:e}");
            }
            out.push('\n');
        }
        out
    }
}

/// Start of the last quarter of a prefix of length `len` (1-based).
fn last_quarter_start(len: usize) -> usize {
    len - (len / 4).max(1) + 1
}

/// Classifies a deviation curve. Converged: final value within `tol` and no
/// increase beyond `2 tol` over the last quarter. Not converged: the last
/// quarter either increases beyond the slack while exceeding `tol`, or sits
/// above `tol` without decreasing. Anything else is inconclusive.
pub(crate) fn classify(curve: &[f64], tol: f64) -> Verdict {
    let len = curve.len();
    let start = last_quarter_start(len) - 1;
    let tail = &curve[start..];
    let last = curve[len - 1];
    let rises = tail.windows(2).any(|w| w[1] > w[0] + 2.0 * tol);
    if last <= tol && !rises {
        return Verdict::Converged;
    }
    let tail_max = tail.iter().copied().fold(0.0, f64::max);
    let stalled = last > tol && last >= tail[0] - 2.0 * tol;
    if (rises && tail_max > tol) || stalled {
        Verdict::NotConverged
    } else {
        Verdict::Inconclusive
    }
}

pub fn check_weak_star(
    seq: &dyn SequenceProvider,
    g: &SampledFunction,
    k_max: usize,
    tol: f64,
    prefix: usize,
) -> Result<WeakStarReport> {
    let grid = seq.grid();
    ensure_same_grid(&grid, g.grid())?;
    if 2 * k_max + 1 > grid.len() {
        return Err(Error::WindowTooLarge {
            k: k_max,
            n: grid.len(),
        });
    }
    if prefix == 0 || prefix > seq.available() {
        return Err(Error::invalid(
            "L",
            format!("prefix {prefix} outside 1..={}", seq.available()),
        ));
    }
    if !(tol >= 0.0) {
        return Err(Error::invalid("tol", "must be nonnegative"));
    }
    let target = fourier_window(g, k_max)?;
    let mut deviations = Vec::with_capacity(prefix);
    for n in 1..=prefix {
        let f = seq.member(n)?;
        ensure_same_grid(&grid, f.grid())?;
        let c = fourier_window(&f, k_max)?;
        deviations.push(
            c.as_slice()
                .iter()
                .zip(target.as_slice())
                .map(|(a, b)| (a - b).norm())
                .collect::<Vec<f64>>(),
        );
    }
    let max_deviation: Vec<f64> = deviations
        .iter()
        .map(|row| row.iter().copied().fold(0.0, f64::max))
        .collect();
    let verdict = classify(&max_deviation, tol);
    let mut witness = Witness {
        k: 0,
        n: prefix,
        deviation: -1.0,
    };
    for n in last_quarter_start(prefix)..=prefix {
        for (i, v) in deviations[n - 1].iter().enumerate() {
            if *v > witness.deviation {
                witness = Witness {
                    k: i as i64 - k_max as i64,
                    n,
                    deviation: *v,
                };
            }
        }
    }
    Ok(WeakStarReport {
        window: k_max,
        tol,
        prefix,
        deviations,
        max_deviation,
        verdict,
        witness,
    })
}

/// Interior sample ring used when none is given.
pub const DEFAULT_INTERIOR_RADIUS: f64 = 0.5;
pub const DEFAULT_INTERIOR_COUNT: usize = 16;

pub fn default_interior_ring() -> Vec<C64> {
    interior_ring(DEFAULT_INTERIOR_RADIUS, DEFAULT_INTERIOR_COUNT)
}

/// `count` points on the circle `|z| = radius`.
pub fn interior_ring(radius: f64, count: usize) -> Vec<C64> {
    (0..count)
        .map(|j| C64::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / count as f64))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhavinsonReport {
    /// `max_z |P_n(z) - g(z)|` over the interior samples, per member.
    pub interior_errors: Vec<f64>,
    pub interior_converged: bool,
    pub boundary: WeakStarReport,
    pub verdict: Verdict,
    /// Interior convergence held but the boundary check rejected: impossible
    /// for a correct implementation.
    pub consistency_violation: bool,
}

#[derive(Clone, Debug)]
pub struct KhavinsonCheck<'a> {
    pub bound: f64,
    pub interior_samples: &'a [C64],
    pub window: usize,
    pub tol: f64,
    pub grid: CircleGrid,
    /// Points used to certify each member's sup norm.
    pub certify_points: usize,
}

/// Interior pointwise convergence of a uniformly bounded polynomial family to
/// `g`, followed by the boundary weak-star check against `g`'s boundary
/// values.
pub fn verify_khavinson(
    family: &[AnalyticPolynomial],
    g: &BoundedAnalyticWitness,
    check: &KhavinsonCheck<'_>,
) -> Result<KhavinsonReport> {
    if family.is_empty() {
        return Err(Error::invalid("family", "family is empty"));
    }
    if check.interior_samples.iter().any(|z| !(z.norm() < 1.0)) {
        return Err(Error::invalid("interior_samples", "samples must lie strictly inside the disk"));
    }
    for p in family {
        let sup = certified_sup_norm_banded(p, check.certify_points.max(p.degree() + 1))?;
        if sup > check.bound * (1.0 + ROUNDING_SLACK) {
            return Err(Error::BoundViolated {
                bound: check.bound,
                max: sup,
            });
        }
    }
    let mut interior_errors = Vec::with_capacity(family.len());
    for p in family {
        let mut worst: f64 = 0.0;
        for z in check.interior_samples {
            worst = worst.max((p.evaluate(*z) - g.eval(*z)?).norm());
        }
        interior_errors.push(worst);
    }
    let interior_converged = *interior_errors.last().unwrap() <= check.tol;
    let members = family
        .iter()
        .map(|p| p.sample_on(check.grid).with_bound(check.bound))
        .collect::<Result<Vec<_>>>()?;
    let seq = StoredSequence::new(members)?;
    let boundary = check_weak_star(
        &seq,
        &g.boundary_samples(check.grid)?,
        check.window,
        check.tol,
        family.len(),
    )?;
    let consistency_violation = interior_converged && boundary.verdict == Verdict::NotConverged;
    let verdict = if !interior_converged {
        Verdict::Inconclusive
    } else {
        boundary.verdict
    };
    Ok(KhavinsonReport {
        interior_errors,
        interior_converged,
        boundary,
        verdict,
        consistency_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shifting(grid: CircleGrid, len: usize) -> FnSequence<impl Fn(usize, f64) -> C64 + Sync> {
        FnSequence::new(grid, 1.0, len, |n, t| C64::from_polar(1.0, n as f64 * t))
    }

    #[test]
    fn shifting_monomials_converge_to_zero() {
        let grid = CircleGrid::new(128).unwrap();
        let r = check_weak_star(&shifting(grid, 32), &SampledFunction::zero(grid), 8, 1e-9, 32).unwrap();
        assert_eq!(r.verdict, Verdict::Converged);
        for n in 9..=32 {
            for k in -8..=8 {
                assert!(r.deviation(n, k) < 1e-12);
            }
        }
        assert!((r.deviation(3, 3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alternating_constants_do_not_converge() {
        let grid = CircleGrid::new(64).unwrap();
        let seq = FnSequence::new(grid, 1.0, 32, |n, _| C64::new((n % 2) as f64, 0.0));
        for g in [0.0, 0.5, 1.0] {
            let target = SampledFunction::from_fn(grid, |_| C64::new(g, 0.0)).unwrap();
            let r = check_weak_star(&seq, &target, 4, 1e-6, 32).unwrap();
            assert_eq!(r.verdict, Verdict::NotConverged, "g={g}");
            assert_eq!(r.witness.k, 0);
        }
    }

    #[test]
    fn fixed_sequence_has_zero_deviation() {
        let grid = CircleGrid::new(64).unwrap();
        let f = SampledFunction::from_fn(grid, |t| C64::new(t.sin(), t.cos() * 0.5)).unwrap();
        let seq = StoredSequence::new(vec![f.clone(); 12]).unwrap();
        let r = check_weak_star(&seq, &f, 6, 0.0, 12).unwrap();
        assert_eq!(r.verdict, Verdict::Converged);
        assert!(r.deviations.iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn slowly_decreasing_curve_is_inconclusive() {
        let curve: Vec<f64> = (1..=16).map(|n| 1.0 / n as f64).collect();
        assert_eq!(classify(&curve, 1e-3), Verdict::Inconclusive);
        assert_eq!(classify(&[1.0, 1.0, 1.0, 1.0], 1e-3), Verdict::NotConverged);
        assert_eq!(classify(&[1.0, 0.5, 0.0, 0.0], 1e-3), Verdict::Converged);
    }

    #[test]
    fn csv_layout() {
        let grid = CircleGrid::new(16).unwrap();
        let r = check_weak_star(&shifting(grid, 2), &SampledFunction::zero(grid), 1, 1e-9, 2).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,k-1,k0,k1");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,"));
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }

    #[test]
    fn khavinson_on_monomials() {
        let grid = CircleGrid::new(128).unwrap();
        let family: Vec<AnalyticPolynomial> = (1..=32).map(AnalyticPolynomial::monomial).collect();
        let g = BoundedAnalyticWitness::polynomial(AnalyticPolynomial::zero(), 1.0).unwrap();
        let ring = default_interior_ring();
        let check = KhavinsonCheck {
            bound: 1.0,
            interior_samples: &ring,
            window: 8,
            tol: 1e-6,
            grid,
            certify_points: 4096,
        };
        let r = verify_khavinson(&family, &g, &check).unwrap();
        for (i, e) in r.interior_errors.iter().enumerate() {
            assert!(*e <= 0.5f64.powi(i as i32 + 1) * (1.0 + 1e-12));
        }
        assert_eq!(r.verdict, Verdict::Converged);
        assert!(!r.consistency_violation);

        let bad: Vec<AnalyticPolynomial> = (1..=3)
            .map(|n| AnalyticPolynomial::monomial(1).scale(C64::new(n as f64, 0.0)))
            .collect();
        assert!(matches!(
            verify_khavinson(&bad, &g, &check),
            Err(Error::BoundViolated { .. })
        ));
    }
}
