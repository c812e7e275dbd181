//! End-to-end construction of uniformly bounded polynomials converging on a
//! target set, and the converse check of the two conditions any such
//! sequence must satisfy.
//!
//! Step `m` of the construction:
//! 1. convex combination of the tail `f_m..f_{k_m}` plus analytic correction
//!    `u_m` with certified error below `1/m`;
//! 2. `Q_m := u_m` (already a polynomial);
//! 3. `P_m := M / (M + 2/m) * Q_m`, certified `sup_T |P_m| <= M`;
//! 4. pointwise errors on the target samples and Fourier deviations from `g`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{
    certified_sup_norm_banded, fejer_mean, fourier_window, AnalyticPolynomial, CircleGrid,
    SampledFunction, TrigPolynomial, ROUNDING_SLACK,
};
use crate::error::{Error, Result};
use crate::hardy::BoundedAnalyticWitness;
use crate::mazur::{find_convex_combination, MazurOptions, TailSchedule};
use crate::scenarios::TargetDescriptor;
use crate::solver::{certify_samples, SolverOptions};
use crate::weakstar::{check_weak_star, classify, StoredSequence, SequenceProvider, Verdict, WeakStarReport};
use crate::C64;

/// Finite sample `(theta_i, f(theta_i))` of a target set `E` and function `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSet {
    angles: Vec<f64>,
    values: Vec<C64>,
    descriptor: TargetDescriptor,
}

impl TargetSet {
    pub fn new(angles: Vec<f64>, values: Vec<C64>, descriptor: TargetDescriptor) -> Result<Self> {
        if angles.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: angles.len(),
                got: values.len(),
            });
        }
        if angles.is_empty() {
            return Err(Error::invalid("angles", "target set is empty"));
        }
        if angles.iter().any(|t| !(0.0..2.0 * std::f64::consts::PI).contains(t)) {
            return Err(Error::invalid("angles", "angles must lie in [0, 2pi)"));
        }
        let mut sorted = angles.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("angles", "angles must be distinct"));
        }
        Ok(TargetSet {
            angles,
            values,
            descriptor,
        })
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn descriptor(&self) -> &TargetDescriptor {
        &self.descriptor
    }

    /// `|p(e^{i theta_i}) - f(theta_i)|`.
    pub fn errors(&self, p: &AnalyticPolynomial) -> Vec<f64> {
        self.angles
            .iter()
            .zip(&self.values)
            .map(|(t, f)| (p.evaluate(C64::from_polar(1.0, *t)) - f).norm())
            .collect()
    }

    fn errors_of_samples(&self, s: &SampledFunction) -> Vec<f64> {
        let spec = s.spectrum();
        self.angles
            .iter()
            .zip(&self.values)
            .map(|(t, f)| (eval_trig(&spec, *t) - f).norm())
            .collect()
    }
}

fn eval_trig(p: &TrigPolynomial, theta: f64) -> C64 {
    p.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * C64::from_polar(1.0, (p.lowest() + i as i64) as f64 * theta))
        .sum()
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(rename = "M")]
    pub bound: f64,
    pub grid: usize,
    pub schedule: TailSchedule,
    #[serde(rename = "K")]
    pub window: usize,
    pub steps: usize,
    pub tol: f64,
    pub hankel_size: usize,
    pub seed: u64,
    pub solver: SolverOptions,
    /// Run even when the sequence is not certified to converge weak-star to
    /// the witness (negative demonstrations).
    pub override_precondition: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            bound: 1.0,
            grid: 4096,
            schedule: TailSchedule::default(),
            window: 32,
            steps: 8,
            tol: 1e-3,
            hankel_size: 16,
            seed: 0,
            solver: SolverOptions::default(),
            override_precondition: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<CircleGrid> {
        if !(self.bound > 0.0 && self.bound.is_finite()) {
            return Err(Error::invalid("M", "uniform bound must be positive and finite"));
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps", "need at least one step"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol", "must be positive"));
        }
        let grid = CircleGrid::new(self.grid).map_err(|e| Error::invalid("grid", e.to_string()))?;
        let d_max = self.schedule.plan(self.steps)?.degree;
        if self.grid as f64 <= std::f64::consts::PI * d_max as f64 {
            return Err(Error::invalid(
                "grid",
                format!(
                    "grid too coarse: {} points cannot certify degree {d_max} (need N > pi*d)",
                    self.grid
                ),
            ));
        }
        if 2 * self.window + 1 > self.grid {
            return Err(Error::invalid("K", "window needs 2K+1 <= grid"));
        }
        if self.hankel_size == 0 || 2 * (2 * self.hankel_size - 1) + 1 > self.grid {
            return Err(Error::invalid("hankel_size", "Hankel window does not fit the grid"));
        }
        Ok(grid)
    }

    pub fn certify_points(&self) -> usize {
        self.grid * self.solver.certify_oversample.max(1)
    }

    fn mazur_options(&self) -> MazurOptions {
        MazurOptions {
            hankel_size: self.hankel_size,
            seed: self.seed,
            solver: self.solver.clone(),
        }
    }
}

/// `M / (M + 2/m)`.
pub fn rescale_factor(bound: f64, m: usize) -> f64 {
    bound / (bound + 2.0 / m as f64)
}

/// `P = M / (M + 2/m) * Q`, requiring certified `sup|Q| <= M + 2/m`.
pub fn rescale_to_bound(
    q: &AnalyticPolynomial,
    bound: f64,
    m: usize,
    certify_points: usize,
) -> Result<AnalyticPolynomial> {
    if m == 0 {
        return Err(Error::invalid("m", "steps are numbered from 1"));
    }
    let limit = bound + 2.0 / m as f64;
    let q_sup = certified_sup_norm_banded(q, certify_points.max(q.degree() + 1))?;
    if q_sup > limit {
        return Err(Error::Precondition(format!(
            "certified sup {q_sup} of Q exceeds M + 2/m = {limit}"
        )));
    }
    let p = q.scale(C64::new(rescale_factor(bound, m), 0.0));
    let p_sup = certified_sup_norm_banded(&p, certify_points.max(p.degree() + 1))?;
    if p_sup > bound {
        return Err(Error::Precondition(format!(
            "rescaled sup {p_sup} exceeds M = {bound} after rounding"
        )));
    }
    Ok(p)
}

/// Polynomial within `tol` of a sampled disk-algebra element: Fejer means of
/// doubling degree until the certified deviation drops below `tol`.
pub fn polynomial_from_samples(
    u: &SampledFunction,
    tol: f64,
    oversample: usize,
) -> Result<(AnalyticPolynomial, f64)> {
    let grid = *u.grid();
    let k_max = (grid.len() - 1) / 2;
    let mut n = 1;
    let mut best = f64::INFINITY;
    loop {
        let n_eff = n.min(k_max);
        let sigma = fejer_mean(&fourier_window(u, n_eff)?, n_eff)?;
        let q = sigma.analytic_part();
        let dev = certify_samples(u.sub(&q.sample_on(grid))?.values(), oversample)?;
        if dev < tol {
            return Ok((q, dev));
        }
        best = best.min(dev);
        if n_eff == k_max {
            return Err(Error::Precondition(format!(
                "no Fejer mean within {tol} of the samples (best {best})"
            )));
        }
        n *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub m: usize,
    pub tail_start: usize,
    pub tail_end: usize,
    pub degree: usize,
    pub target: f64,
    /// Certified quotient-norm bound reached by the convex program.
    pub achieved: f64,
    pub success: bool,
    pub u_bound: f64,
    /// `u_bound < M + 1/m + 1e-9`.
    pub u_bound_within: bool,
    pub alpha: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_witness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_sup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_err_e: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median_err_e: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fourier_deviation: Option<f64>,
    pub solver_converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineVerdict {
    /// Every step reached its target.
    Converging,
    /// No step reached its target.
    Stalled,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionsVerdict {
    pub tol: f64,
    pub sup_bounds: Vec<f64>,
    pub max_errors: Vec<f64>,
    pub bound_ok: bool,
    pub pointwise_ok: bool,
    pub condition_i: bool,
    pub condition_ii: Verdict,
    pub weak_star: WeakStarReport,
}

impl ConditionsVerdict {
    pub fn passes(&self) -> bool {
        self.condition_i && self.condition_ii == Verdict::Converged
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    #[serde(rename = "M")]
    pub bound: f64,
    pub grid: usize,
    pub target_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precondition: Option<Verdict>,
    pub steps: Vec<StepRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<ConditionsVerdict>,
    pub verdict: PipelineVerdict,
}

impl PipelineReport {
    /// Rows `m`; columns achieved, sup, max_err_E, median_err_E. Missing
    /// values (failed steps) are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,achieved,sup,max_err_E,median_err_E\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{},{:e},{},{},{}",
                s.m,
                s.achieved,
                opt(s.p_sup),
                opt(s.max_err_e),
                opt(s.median_err_e)
            );
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmittedPolynomial {
    pub m: usize,
    pub poly: AnalyticPolynomial,
}

/// Tolerance a run ending at step `m` can be held to: the bias `(1 - c_m) M`
/// of the rescaling plus the step target `1/m`.
pub fn horizon_tolerance(bound: f64, m: usize, tol: f64) -> f64 {
    (1.0 - rescale_factor(bound, m)) * bound + 1.0 / m as f64 + tol
}

pub fn run_sufficiency(
    seq: &dyn SequenceProvider,
    target: &TargetSet,
    g: Option<&BoundedAnalyticWitness>,
    cfg: &PipelineConfig,
) -> Result<(Vec<EmittedPolynomial>, PipelineReport)> {
    let grid = cfg.validate()?;
    if seq.grid() != grid {
        return Err(Error::invalid(
            "grid",
            format!("sequence lives on {} points, config says {}", seq.grid().len(), grid.len()),
        ));
    }
    if seq.uniform_bound() > cfg.bound * (1.0 + ROUNDING_SLACK) {
        return Err(Error::invalid(
            "M",
            format!("sequence bound {} exceeds M = {}", seq.uniform_bound(), cfg.bound),
        ));
    }
    let last_plan = cfg.schedule.plan(cfg.steps)?;
    if last_plan.end > seq.available() {
        return Err(Error::invalid(
            "steps",
            format!(
                "step {} needs f_{}, the sequence provides {}",
                cfg.steps,
                last_plan.end,
                seq.available()
            ),
        ));
    }
    let g_boundary = g.map(|w| w.boundary_samples(grid)).transpose()?;
    let precondition = match &g_boundary {
        Some(gb) => {
            let r = check_weak_star(seq, gb, cfg.window, cfg.tol, last_plan.end)?;
            Some(r.verdict)
        }
        None => None,
    };
    if !cfg.override_precondition && precondition != Some(Verdict::Converged) {
        return Err(Error::Precondition(match precondition {
            None => "no witness g supplied; set override_precondition to run anyway".into(),
            Some(v) => format!("sequence is {v} weak-star against g; set override_precondition to run anyway"),
        }));
    }
    let g_window = g_boundary.as_ref().map(|gb| fourier_window(gb, cfg.window)).transpose()?;
    let opts = cfg.mazur_options();
    let certify_points = cfg.certify_points();

    let steps: Vec<(StepRecord, Option<AnalyticPolynomial>)> = (1..=cfg.steps)
        .into_par_iter()
        .map(|m| -> Result<_> {
            let plan = cfg.schedule.plan(m)?;
            let tail = (plan.start..=plan.end)
                .map(|n| seq.member(n))
                .collect::<Result<Vec<_>>>()?;
            let target_m = 1.0 / m as f64;
            let comb = find_convex_combination(&tail, m, plan.degree, target_m, &opts)?;
            let mut rec = StepRecord {
                m,
                tail_start: plan.start,
                tail_end: plan.end,
                degree: plan.degree,
                target: target_m,
                achieved: comb.achieved,
                success: comb.success,
                u_bound: comb.u_bound,
                u_bound_within: comb.u_bound < cfg.bound + target_m + 1e-9,
                alpha: comb.weights.alpha.clone(),
                lower_witness: comb.lower_witness,
                p_sup: None,
                max_err_e: None,
                median_err_e: None,
                fourier_deviation: None,
                solver_converged: comb.solver_converged,
                note: None,
            };
            if !comb.success {
                rec.note = Some("target not reached".into());
                return Ok((rec, None));
            }
            let p = match rescale_to_bound(&comb.approximant, cfg.bound, m, certify_points) {
                Ok(p) => p,
                Err(e) => {
                    rec.note = Some(e.to_string());
                    return Ok((rec, None));
                }
            };
            rec.p_sup = Some(certified_sup_norm_banded(&p, certify_points)?);
            let errs = target.errors(&p);
            rec.max_err_e = Some(errs.iter().copied().fold(0.0, f64::max));
            rec.median_err_e = Some(median(&errs));
            if let Some(gw) = &g_window {
                let pw = fourier_window(&p.sample_on(grid), cfg.window)?;
                rec.fourier_deviation = Some(
                    pw.as_slice()
                        .iter()
                        .zip(gw.as_slice())
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max),
                );
            }
            Ok((rec, Some(p)))
        })
        .collect::<Result<Vec<_>>>()?;

    let successes = steps.iter().filter(|(r, _)| r.success).count();
    let verdict = if successes == cfg.steps {
        PipelineVerdict::Converging
    } else if successes == 0 {
        PipelineVerdict::Stalled
    } else {
        PipelineVerdict::Mixed
    };
    let mut records = Vec::with_capacity(steps.len());
    let mut emitted = Vec::new();
    for (rec, p) in steps {
        if let Some(poly) = p {
            emitted.push(EmittedPolynomial { m: rec.m, poly });
        }
        records.push(rec);
    }
    let conditions = match (&g_boundary, emitted.last()) {
        (Some(gb), Some(last)) => {
            let polys: Vec<AnalyticPolynomial> = emitted.iter().map(|e| e.poly.clone()).collect();
            let tol = horizon_tolerance(cfg.bound, last.m, cfg.tol);
            Some(verify_conditions(&polys, target, cfg.bound, gb, cfg.window, tol, certify_points)?)
        }
        _ => None,
    };
    let report = PipelineReport {
        bound: cfg.bound,
        grid: grid.len(),
        target_samples: target.len(),
        precondition,
        steps: records,
        conditions,
        verdict,
    };
    Ok((emitted, report))
}

/// Checks on a polynomial sequence: (i) certified sup `<= M + tol` and the
/// pointwise errors on `E` settle below `tol`; (ii) the boundary values
/// converge weak-star to `g`.
pub fn verify_conditions(
    polys: &[AnalyticPolynomial],
    target: &TargetSet,
    bound: f64,
    g: &SampledFunction,
    window: usize,
    tol: f64,
    certify_points: usize,
) -> Result<ConditionsVerdict> {
    if polys.is_empty() {
        return Err(Error::invalid("P_seq", "sequence is empty"));
    }
    let grid = *g.grid();
    let sup_bounds = polys
        .iter()
        .map(|p| certified_sup_norm_banded(p, certify_points.max(p.degree() + 1)))
        .collect::<Result<Vec<_>>>()?;
    let max_errors: Vec<f64> = polys
        .iter()
        .map(|p| target.errors(p).into_iter().fold(0.0, f64::max))
        .collect();
    let samples: Vec<SampledFunction> = polys.iter().map(|p| p.sample_on(grid)).collect();
    conditions_from_parts(samples, sup_bounds, max_errors, bound, g, window, tol)
}

/// [`verify_conditions`] for sequences given only by samples; the continuum
/// function is the trigonometric interpolant of the samples.
pub fn verify_sampled_conditions(
    members: &[SampledFunction],
    target: &TargetSet,
    bound: f64,
    g: &SampledFunction,
    window: usize,
    tol: f64,
    oversample: usize,
) -> Result<ConditionsVerdict> {
    if members.is_empty() {
        return Err(Error::invalid("P_seq", "sequence is empty"));
    }
    let sup_bounds = members
        .iter()
        .map(|f| certify_samples(f.values(), oversample))
        .collect::<Result<Vec<_>>>()?;
    let max_errors: Vec<f64> = members
        .iter()
        .map(|f| target.errors_of_samples(f).into_iter().fold(0.0, f64::max))
        .collect();
    conditions_from_parts(members.to_vec(), sup_bounds, max_errors, bound, g, window, tol)
}

fn conditions_from_parts(
    samples: Vec<SampledFunction>,
    sup_bounds: Vec<f64>,
    max_errors: Vec<f64>,
    bound: f64,
    g: &SampledFunction,
    window: usize,
    tol: f64,
) -> Result<ConditionsVerdict> {
    let len = samples.len();
    let bound_ok = sup_bounds.iter().all(|b| *b <= bound + tol);
    let pointwise_ok = classify(&max_errors, tol) == Verdict::Converged;
    let stripped = samples
        .into_iter()
        .map(|f| {
            let grid = *f.grid();
            SampledFunction::new(grid, f.values().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let seq = StoredSequence::new(stripped)?;
    let weak_star = check_weak_star(&seq, g, window, tol, len)?;
    Ok(ConditionsVerdict {
        tol,
        sup_bounds,
        max_errors,
        bound_ok,
        pointwise_ok,
        condition_i: bound_ok && pointwise_ok,
        condition_ii: weak_star.verdict,
        weak_star,
    })
}
