//! Uniform grids on the unit circle, sampled boundary functions, Fourier
//! windows, analytic polynomials and certified supremum norms.
//!
//! Every supremum over the circle is replaced by a one-sided certificate:
//! the maximum over a finite grid, inflated through Bernstein's inequality
//! `|t'| <= sigma * sup|t|` for a trigonometric polynomial whose spectrum
//! spans an interval of half-width `sigma`. With mesh radius `pi/N` this
//! gives `sup|t| <= max_grid|t| / (1 - pi*sigma/N)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Dft;
use crate::C64;

/// Relative slack allowed when checking a modulus claim on grid values that
/// were themselves produced by rounding (e.g. `|e^{i theta}|`).
pub const ROUNDING_SLACK: f64 = 1e-12;

/// Uniform grid `theta_j = 2 pi j / N`, `j = 0..N-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct CircleGrid {
    n: usize,
}

impl CircleGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::GridTooSmall(n));
        }
        Ok(CircleGrid { n })
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n as f64
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.angle(j))
    }

    /// `e^{i theta_j}`.
    pub fn point(&self, j: usize) -> C64 {
        C64::from_polar(1.0, self.angle(j))
    }

    pub fn points(&self) -> Vec<C64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Samples `f(theta)` at every grid angle.
    pub fn sample(&self, f: impl Fn(f64) -> C64) -> Vec<C64> {
        self.angles().map(f).collect()
    }

    /// `e^{-2 pi i m / N}` for `m = 0..N-1`; products of grid powers index
    /// into this table modulo `N`.
    fn twiddles(&self) -> Vec<C64> {
        (0..self.n)
            .map(|m| C64::from_polar(1.0, -2.0 * PI * m as f64 / self.n as f64))
            .collect()
    }
}

impl TryFrom<usize> for CircleGrid {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        CircleGrid::new(n)
    }
}

impl From<CircleGrid> for usize {
    fn from(g: CircleGrid) -> usize {
        g.n
    }
}

pub(crate) fn max_modulus(values: &[C64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Complex samples of a boundary function on a [`CircleGrid`], optionally
/// carrying a sup-norm claim that the samples honour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampledRepr", into = "SampledRepr")]
pub struct SampledFunction {
    grid: CircleGrid,
    values: Vec<C64>,
    claimed_bound: Option<f64>,
}

impl SampledFunction {
    pub fn new(grid: CircleGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("values", "samples must be finite"));
        }
        Ok(SampledFunction {
            grid,
            values,
            claimed_bound: None,
        })
    }

    pub fn from_fn(grid: CircleGrid, f: impl Fn(f64) -> C64) -> Result<Self> {
        SampledFunction::new(grid, grid.sample(f))
    }

    pub fn zero(grid: CircleGrid) -> Self {
        SampledFunction {
            grid,
            values: vec![C64::new(0.0, 0.0); grid.len()],
            claimed_bound: Some(0.0),
        }
    }

    /// Attaches a sup-norm claim, checking it against the samples up to
    /// [`ROUNDING_SLACK`].
    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        if !(bound >= 0.0) || !bound.is_finite() {
            return Err(Error::invalid("bound", "must be a finite nonnegative number"));
        }
        let max = self.max_modulus();
        if max > bound * (1.0 + ROUNDING_SLACK) + f64::MIN_POSITIVE {
            return Err(Error::BoundViolated { bound, max });
        }
        self.claimed_bound = Some(bound);
        Ok(self)
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn claimed_bound(&self) -> Option<f64> {
        self.claimed_bound
    }

    pub fn max_modulus(&self) -> f64 {
        max_modulus(&self.values)
    }

    pub fn scale(&self, factor: C64) -> SampledFunction {
        SampledFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
            claimed_bound: self.claimed_bound.map(|b| b * factor.norm()),
        }
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<SampledFunction> {
        ensure_same_grid(&self.grid, &other.grid)?;
        SampledFunction::new(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// The trigonometric interpolant of the samples, frequencies in
    /// `[-floor(N/2), N - 1 - floor(N/2)]`.
    pub fn spectrum(&self) -> TrigPolynomial {
        TrigPolynomial::from_samples(&self.values)
    }
}

pub(crate) fn ensure_same_grid(a: &CircleGrid, b: &CircleGrid) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampledRepr {
    n: usize,
    values: Vec<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
}

impl TryFrom<SampledRepr> for SampledFunction {
    type Error = Error;
    fn try_from(r: SampledRepr) -> Result<Self> {
        let f = SampledFunction::new(CircleGrid::new(r.n)?, r.values)?;
        match r.bound {
            Some(b) => f.with_bound(b),
            None => Ok(f),
        }
    }
}

impl From<SampledFunction> for SampledRepr {
    fn from(f: SampledFunction) -> Self {
        SampledRepr {
            n: f.grid.len(),
            values: f.values,
            bound: f.claimed_bound,
        }
    }
}

/// Fourier window `c_k`, `|k| <= K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrigRepr", into = "TrigRepr")]
pub struct TrigCoefficients {
    half_width: usize,
    coeffs: Vec<C64>,
}

impl TrigCoefficients {
    /// `coeffs` lists `c_{-K}, ..., c_K`.
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::invalid("coeffs", "window must have odd length 2K+1"));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("coeffs", "coefficients must be finite"));
        }
        Ok(TrigCoefficients {
            half_width: coeffs.len() / 2,
            coeffs,
        })
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// `c_k`, zero outside the window.
    pub fn get(&self, k: i64) -> C64 {
        let idx = k + self.half_width as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let k0 = -(self.half_width as i64);
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (k0 + i as i64, *c))
    }

    pub fn max_modulus(&self) -> f64 {
        max_modulus(&self.coeffs)
    }

    /// Nonnegative-frequency part as an analytic polynomial.
    pub fn analytic_part(&self) -> AnalyticPolynomial {
        AnalyticPolynomial::new(self.coeffs[self.half_width..].to_vec())
            .expect("window always has a c_0 entry")
    }

    /// `sum_{k<0} |c_k|`: the sup-norm cost of dropping the conjugate-analytic part.
    pub fn negative_mass(&self) -> f64 {
        self.coeffs[..self.half_width].iter().map(|c| c.norm()).sum()
    }

    pub fn to_trig_polynomial(&self) -> TrigPolynomial {
        TrigPolynomial::new(-(self.half_width as i64), self.coeffs.clone())
    }

    /// Evaluates `sum c_k e^{ik theta}` on a grid.
    pub fn sample_on(&self, grid: CircleGrid) -> Result<SampledFunction> {
        SampledFunction::new(grid, self.to_trig_polynomial().evaluate_on(grid.len()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrigRepr {
    k: usize,
    coeffs: Vec<C64>,
}

impl TryFrom<TrigRepr> for TrigCoefficients {
    type Error = Error;
    fn try_from(r: TrigRepr) -> Result<Self> {
        if r.coeffs.len() != 2usize.saturating_mul(r.k).saturating_add(1) {
            return Err(Error::LengthMismatch {
                expected: 2usize.saturating_mul(r.k).saturating_add(1),
                got: r.coeffs.len(),
            });
        }
        TrigCoefficients::new(r.coeffs)
    }
}

impl From<TrigCoefficients> for TrigRepr {
    fn from(c: TrigCoefficients) -> Self {
        TrigRepr {
            k: c.half_width,
            coeffs: c.coeffs,
        }
    }
}

/// `sum_{k=0}^{d} a_k z^k`. The degree is an upper bound: trailing
/// coefficients may vanish.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct AnalyticPolynomial {
    coeffs: Vec<C64>,
}

impl AnalyticPolynomial {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("coeffs", "need at least the constant term"));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("coeffs", "coefficients must be finite"));
        }
        Ok(AnalyticPolynomial { coeffs })
    }

    pub fn constant(c: C64) -> Self {
        AnalyticPolynomial { coeffs: vec![c] }
    }

    pub fn zero() -> Self {
        AnalyticPolynomial::constant(C64::new(0.0, 0.0))
    }

    /// `z^d`.
    pub fn monomial(d: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); d + 1];
        coeffs[d] = C64::new(1.0, 0.0);
        AnalyticPolynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn evaluate(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, a| acc * z + a)
    }

    pub fn scale(&self, factor: C64) -> AnalyticPolynomial {
        AnalyticPolynomial {
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn add(&self, other: &AnalyticPolynomial) -> AnalyticPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = C64::new(0.0, 0.0);
        AnalyticPolynomial {
            coeffs: (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero)
                        + other.coeffs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        }
    }

    /// Boundary values on a grid.
    pub fn sample_on(&self, grid: CircleGrid) -> SampledFunction {
        let values = self.to_trig_polynomial().evaluate_on(grid.len());
        SampledFunction {
            grid,
            values,
            claimed_bound: None,
        }
    }

    pub fn to_trig_polynomial(&self) -> TrigPolynomial {
        TrigPolynomial::new(0, self.coeffs.clone())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyRepr {
    degree: usize,
    coeffs: Vec<C64>,
}

impl TryFrom<PolyRepr> for AnalyticPolynomial {
    type Error = Error;
    fn try_from(r: PolyRepr) -> Result<Self> {
        if r.coeffs.len() != r.degree.saturating_add(1) {
            return Err(Error::LengthMismatch {
                expected: r.degree.saturating_add(1),
                got: r.coeffs.len(),
            });
        }
        AnalyticPolynomial::new(r.coeffs)
    }
}

impl From<AnalyticPolynomial> for PolyRepr {
    fn from(p: AnalyticPolynomial) -> Self {
        PolyRepr {
            degree: p.degree(),
            coeffs: p.coeffs,
        }
    }
}

/// Trigonometric polynomial with an arbitrary contiguous frequency range
/// `lowest ..= lowest + len - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial {
    lowest: i64,
    coeffs: Vec<C64>,
}

const BAND_THRESHOLDS: [f64; 12] = [
    0.0, 1e-17, 1e-16, 1e-15, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-6,
];

impl TrigPolynomial {
    pub fn new(lowest: i64, coeffs: Vec<C64>) -> Self {
        TrigPolynomial { lowest, coeffs }
    }

    /// Normalized DFT of grid samples.
    pub fn from_samples(values: &[C64]) -> Self {
        let n = values.len();
        let dft = Dft::new(n);
        let mut buf = values.to_vec();
        dft.forward(&mut buf);
        let scale = 1.0 / n as f64;
        let lowest = -((n / 2) as i64);
        let coeffs = (0..n)
            .map(|i| {
                let k = lowest + i as i64;
                buf[k.rem_euclid(n as i64) as usize] * scale
            })
            .collect();
        TrigPolynomial { lowest, coeffs }
    }

    pub fn lowest(&self) -> i64 {
        self.lowest
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn span(&self) -> usize {
        self.coeffs.len()
    }

    /// Values at `theta_j = 2 pi j / n`. Frequencies are folded modulo `n`,
    /// so the result is exact only when `n >= span()`.
    pub fn evaluate_on(&self, n: usize) -> Vec<C64> {
        let mut buf = vec![C64::new(0.0, 0.0); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.lowest + i as i64;
            buf[k.rem_euclid(n as i64) as usize] += c;
        }
        Dft::new(n).inverse(&mut buf);
        buf
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Certified upper bound on `sup_T |t|` from values on an
    /// `eval_points`-point grid.
    ///
    /// Splits the spectrum into a central band `[lo, hi]` and a tail. The
    /// band part obeys Bernstein's inequality with half-width
    /// `sigma = (hi - lo)/2` after recentring, the tail is bounded by its
    /// coefficient l1 mass. The minimum over a fixed family of bands (and the
    /// plain l1 bound) is returned.
    pub fn certified_sup_bound(&self, eval_points: usize) -> Result<f64> {
        if eval_points < self.span() {
            return Err(Error::GridTooCoarse {
                n: eval_points,
                degree: self.span().saturating_sub(1),
            });
        }
        let l1 = self.l1_norm();
        if l1 == 0.0 {
            return Ok(0.0);
        }
        let grid_max = max_modulus(&self.evaluate_on(eval_points));
        let cmax = max_modulus(&self.coeffs);
        let mut best = l1;
        for t in BAND_THRESHOLDS {
            let cut = t * cmax;
            let Some(lo) = self.coeffs.iter().position(|c| c.norm() > cut) else {
                continue;
            };
            let hi = self.coeffs.iter().rposition(|c| c.norm() > cut).unwrap();
            let tail: f64 = self.coeffs[..lo]
                .iter()
                .chain(&self.coeffs[hi + 1..])
                .map(|c| c.norm())
                .sum();
            let sigma = (hi - lo) as f64 / 2.0;
            let denom = 1.0 - PI * sigma / eval_points as f64;
            if denom <= 0.0 {
                continue;
            }
            best = best.min((grid_max + tail) / denom + tail);
        }
        Ok(best.max(grid_max))
    }
}

/// `c_k = (1/N) sum_j f(theta_j) e^{-ik theta_j}` for `|k| <= K`, by direct
/// quadrature.
pub fn fourier_window(f: &SampledFunction, k_max: usize) -> Result<TrigCoefficients> {
    let n = f.grid.len();
    if 2 * k_max + 1 > n {
        return Err(Error::WindowTooLarge { k: k_max, n });
    }
    let tw = f.grid.twiddles();
    let inv_n = 1.0 / n as f64;
    let coeffs = (-(k_max as i64)..=k_max as i64)
        .map(|k| {
            let step = k.rem_euclid(n as i64) as usize;
            let mut idx = 0usize;
            let mut acc = C64::new(0.0, 0.0);
            for v in &f.values {
                acc += v * tw[idx];
                idx += step;
                if idx >= n {
                    idx -= n;
                }
            }
            acc * inv_n
        })
        .collect();
    Ok(TrigCoefficients {
        half_width: k_max,
        coeffs,
    })
}

pub fn evaluate_poly(p: &AnalyticPolynomial, z: C64) -> C64 {
    p.evaluate(z)
}

/// `B = max_grid|p| / (1 - pi d / N)` over an `n`-point grid.
pub fn certified_sup_norm(p: &AnalyticPolynomial, n: usize) -> Result<f64> {
    let d = p.degree();
    if (n as f64) <= PI * d as f64 || n < 4 {
        return Err(Error::GridTooCoarse { n, degree: d });
    }
    let grid = CircleGrid::new(n)?;
    let grid_max = (0..n)
        .map(|j| p.evaluate(grid.point(j)).norm())
        .fold(0.0, f64::max);
    Ok(grid_max / (1.0 - PI * d as f64 / n as f64))
}

/// Band-aware certificate for an analytic polynomial, see
/// [`TrigPolynomial::certified_sup_bound`]. Never larger than the l1 norm of
/// the coefficients and usually much tighter than [`certified_sup_norm`] for
/// polynomials with decaying coefficients.
pub fn certified_sup_norm_banded(p: &AnalyticPolynomial, eval_points: usize) -> Result<f64> {
    p.to_trig_polynomial().certified_sup_bound(eval_points)
}

/// Cesaro mean `sigma_n` with weights `1 - |k|/(n+1)`.
pub fn fejer_mean(c: &TrigCoefficients, n: usize) -> Result<TrigCoefficients> {
    if n > c.half_width {
        return Err(Error::WindowExceeded {
            n,
            k: c.half_width,
        });
    }
    let coeffs = (-(n as i64)..=n as i64)
        .map(|k| c.get(k) * (1.0 - k.unsigned_abs() as f64 / (n as f64 + 1.0)))
        .collect();
    Ok(TrigCoefficients {
        half_width: n,
        coeffs,
    })
}
