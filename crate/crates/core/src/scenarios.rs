//! Reproducible experiment builders: radial-dilate sequences, target sets
//! on the circle, and the conjugate-symbol obstruction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circle::{CircleGrid, SampledFunction};
use crate::error::{Error, Result};
use crate::hardy::{radial_boundary_samples, BoundedAnalyticWitness, RadialSchedule};
use crate::pipeline::TargetSet;
use crate::weakstar::{FnSequence, SequenceProvider, StoredSequence};
use crate::C64;

const MAX_CANTOR_DEPTH: u32 = 12;
const MAX_ARC_SAMPLES: usize = 1 << 20;

/// `f_n(theta) = g(r_n e^{i theta})`.
#[derive(Clone, Debug)]
pub struct DilateSequence {
    witness: BoundedAnalyticWitness,
    schedule: RadialSchedule,
    grid: CircleGrid,
}

impl DilateSequence {
    pub fn witness(&self) -> &BoundedAnalyticWitness {
        &self.witness
    }
}

impl SequenceProvider for DilateSequence {
    fn grid(&self) -> CircleGrid {
        self.grid
    }
    fn uniform_bound(&self) -> f64 {
        self.witness.bound()
    }
    fn available(&self) -> usize {
        self.schedule.len()
    }
    fn member(&self, n: usize) -> Result<SampledFunction> {
        radial_boundary_samples(&self.witness, self.grid, self.schedule.radius(n)?)
    }
}

/// Radial dilates of `g`. They converge to `g`'s boundary function at every
/// point of the circle, hence dominated-converge in every `L^1` pairing.
pub fn build_dilate_sequence(
    g: &BoundedAnalyticWitness,
    sched: &RadialSchedule,
    grid: CircleGrid,
) -> Result<DilateSequence> {
    sched.validate()?;
    Ok(DilateSequence {
        witness: g.clone(),
        schedule: sched.clone(),
        grid,
    })
}

/// `f_n(theta) = e^{-i theta}` for every `n`, bound 1.
#[derive(Clone, Debug)]
pub struct ConjugateSequence {
    grid: CircleGrid,
    len: usize,
}

impl SequenceProvider for ConjugateSequence {
    fn grid(&self) -> CircleGrid {
        self.grid
    }
    fn uniform_bound(&self) -> f64 {
        1.0
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
        SampledFunction::new(self.grid, self.grid.points().into_iter().map(|z| z.conj()).collect())?
            .with_bound(1.0)
    }
}

pub fn build_negative_witness(grid: CircleGrid) -> ConjugateSequence {
    ConjugateSequence { grid, len: 1024 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetDescriptor {
    /// `count` equispaced angles from `start` to `end` inclusive.
    Arc { start: f64, end: f64, count: usize },
    Finite { angles: Vec<f64> },
    /// Endpoints of the `2^depth` intervals left by the middle-third
    /// construction on `[start, end]`.
    CantorLike { start: f64, end: f64, depth: u32 },
}

fn normalize_angle(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

impl TargetDescriptor {
    pub fn angles(&self) -> Result<Vec<f64>> {
        let raw = match self {
            TargetDescriptor::Arc { start, end, count } => {
                if !(start.is_finite() && end.is_finite() && start < end) {
                    return Err(Error::invalid("arc", "endpoints must be finite with start < end"));
                }
                if end - start > 2.0 * PI {
                    return Err(Error::invalid("arc", "arc longer than the circle"));
                }
                if *count == 0 || *count > MAX_ARC_SAMPLES {
                    return Err(Error::invalid("count", format!("must lie in 1..={MAX_ARC_SAMPLES}")));
                }
                if *count == 1 {
                    vec![*start]
                } else {
                    let h = (end - start) / (*count as f64 - 1.0);
                    (0..*count).map(|i| start + h * i as f64).collect()
                }
            }
            TargetDescriptor::Finite { angles } => {
                if angles.is_empty() {
                    return Err(Error::invalid("angles", "need at least one angle"));
                }
                if angles.iter().any(|a| !a.is_finite()) {
                    return Err(Error::invalid("angles", "angles must be finite"));
                }
                angles.clone()
            }
            TargetDescriptor::CantorLike { start, end, depth } => {
                if !(start.is_finite() && end.is_finite() && start < end && end - start <= 2.0 * PI) {
                    return Err(Error::invalid("cantor", "need finite start < end within one turn"));
                }
                if *depth > MAX_CANTOR_DEPTH {
                    return Err(Error::invalid("depth", format!("at most {MAX_CANTOR_DEPTH}")));
                }
                let mut intervals = vec![(*start, *end)];
                for _ in 0..*depth {
                    intervals = intervals
                        .into_iter()
                        .flat_map(|(a, b)| {
                            let third = (b - a) / 3.0;
                            [(a, a + third), (b - third, b)]
                        })
                        .collect();
                }
                intervals.into_iter().flat_map(|(a, b)| [a, b]).collect()
            }
        };
        let angles: Vec<f64> = raw.into_iter().map(normalize_angle).collect();
        let mut sorted = angles.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[1] - w[0] < 1e-14) || (sorted.len() > 1 && sorted[0] + 2.0 * PI - sorted[sorted.len() - 1] < 1e-14) {
            return Err(Error::invalid("angles", "target angles must be distinct on the circle"));
        }
        Ok(angles)
    }
}

/// Samples the descriptor and evaluates `f` at each angle.
pub fn build_target_set(desc: &TargetDescriptor, f: impl Fn(f64) -> Result<C64>) -> Result<TargetSet> {
    let angles = desc.angles()?;
    let values = angles.iter().map(|t| f(*t)).collect::<Result<Vec<_>>>()?;
    TargetSet::new(angles, values, desc.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Obstruction {
    /// `f_n = conj(z)` on the whole circle.
    Conjugate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<BoundedAnalyticWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<Obstruction>,
    pub target: TargetDescriptor,
    #[serde(default)]
    pub schedule: RadialSchedule,
    pub expected: Expected,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        match self.expected {
            Expected::Positive if self.witness.is_none() => {
                Err(Error::invalid("witness", "positive scenarios need a witness"))
            }
            Expected::Negative if self.obstruction.is_none() => {
                Err(Error::invalid("obstruction", "negative scenarios need an obstruction symbol"))
            }
            _ => {
                self.schedule.validate()?;
                self.target.angles()?;
                Ok(())
            }
        }
    }

    /// The sequence `{f_n}` the scenario feeds to the pipeline.
    pub fn provider(&self, grid: CircleGrid) -> Result<Box<dyn SequenceProvider>> {
        self.validate()?;
        match (&self.witness, self.obstruction) {
            (_, Some(Obstruction::Conjugate)) => Ok(Box::new(build_negative_witness(grid))),
            (Some(g), None) => Ok(Box::new(build_dilate_sequence(g, &self.schedule, grid)?)),
            (None, None) => Err(Error::invalid("witness", "scenario defines no sequence")),
        }
    }

    /// The target `(E, f)`: boundary values of the witness, or of the
    /// obstruction symbol.
    pub fn target_set(&self) -> Result<TargetSet> {
        self.validate()?;
        match (&self.witness, self.obstruction) {
            (_, Some(Obstruction::Conjugate)) => {
                build_target_set(&self.target, |t| Ok(C64::from_polar(1.0, -t)))
            }
            (Some(g), None) => build_target_set(&self.target, |t| g.eval(C64::from_polar(1.0, t))),
            (None, None) => Err(Error::invalid("witness", "scenario defines no target function")),
        }
    }
}

/// Scenarios shipped with the CLI.
pub fn builtin_scenarios() -> Vec<ScenarioSpec> {
    let half = BoundedAnalyticWitness::blaschke(vec![C64::new(0.5, 0.0)]).expect("valid zero");
    let pair = BoundedAnalyticWitness::blaschke(vec![C64::new(0.3, 0.4), C64::new(-0.5, 0.0)])
        .expect("valid zeros");
    vec![
        ScenarioSpec {
            name: "blaschke-arc".into(),
            witness: Some(half),
            obstruction: None,
            target: TargetDescriptor::Arc {
                start: -PI / 2.0,
                end: PI / 2.0,
                count: 101,
            },
            schedule: RadialSchedule::Geometric,
            expected: Expected::Positive,
        },
        ScenarioSpec {
            name: "blaschke-cantor".into(),
            witness: Some(pair),
            obstruction: None,
            target: TargetDescriptor::CantorLike {
                start: 0.0,
                end: 2.0 * PI / 3.0,
                depth: 4,
            },
            schedule: RadialSchedule::Geometric,
            expected: Expected::Positive,
        },
        ScenarioSpec {
            name: "negative-conjugate".into(),
            witness: None,
            obstruction: Some(Obstruction::Conjugate),
            target: TargetDescriptor::Arc {
                start: -PI / 2.0,
                end: PI / 2.0,
                count: 101,
            },
            schedule: RadialSchedule::Geometric,
            expected: Expected::Negative,
        },
    ]
}

pub fn find_builtin(name: &str) -> Option<ScenarioSpec> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

/// Sequence descriptions accepted by the `weakstar` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProviderSpec {
    /// `f_n = e^{i n theta}`.
    ShiftingMonomial {
        #[serde(default = "default_len")]
        len: usize,
    },
    /// `f_n = low` for odd `n`, `high` for even `n`.
    Alternating {
        #[serde(default = "zero")]
        low: C64,
        #[serde(default = "one")]
        high: C64,
        #[serde(default = "default_len")]
        len: usize,
    },
    RadialDilates {
        witness: BoundedAnalyticWitness,
        #[serde(default)]
        schedule: RadialSchedule,
    },
    Conjugate,
    Samples { members: Vec<SampledFunction> },
}

fn default_len() -> usize {
    64
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

impl ProviderSpec {
    pub fn build(&self, grid: CircleGrid) -> Result<Box<dyn SequenceProvider>> {
        Ok(match self {
            ProviderSpec::ShiftingMonomial { len } => Box::new(FnSequence::new(grid, 1.0, *len, |n, t| {
                C64::from_polar(1.0, n as f64 * t)
            })),
            ProviderSpec::Alternating { low, high, len } => {
                let (low, high) = (*low, *high);
                if !(low.norm().is_finite() && high.norm().is_finite()) {
                    return Err(Error::invalid("alternating", "values must be finite"));
                }
                let bound = low.norm().max(high.norm());
                Box::new(FnSequence::new(grid, bound, *len, move |n, _| {
                    if n % 2 == 1 {
                        low
                    } else {
                        high
                    }
                }))
            }
            ProviderSpec::RadialDilates { witness, schedule } => {
                Box::new(build_dilate_sequence(witness, schedule, grid)?)
            }
            ProviderSpec::Conjugate => Box::new(build_negative_witness(grid)),
            ProviderSpec::Samples { members } => {
                let seq = StoredSequence::new(members.clone())?;
                if seq.grid() != grid {
                    return Err(Error::GridMismatch {
                        left: seq.grid().len(),
                        right: grid.len(),
                    });
                }
                Box::new(seq)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::AnalyticPolynomial;
    use crate::weakstar::{check_weak_star, Verdict};

    #[test]
    fn zero_witness_gives_zero_sequence() {
        let grid = CircleGrid::new(32).unwrap();
        let g = BoundedAnalyticWitness::polynomial(AnalyticPolynomial::zero(), 0.0).unwrap();
        let seq = build_dilate_sequence(&g, &RadialSchedule::Geometric, grid).unwrap();
        for n in 1..=10 {
            assert!(seq.member(n).unwrap().values().iter().all(|v| *v == C64::new(0.0, 0.0)));
        }
    }

    #[test]
    fn identity_witness_dilates() {
        let grid = CircleGrid::new(32).unwrap();
        let g = BoundedAnalyticWitness::polynomial(AnalyticPolynomial::monomial(1), 1.0).unwrap();
        let seq = build_dilate_sequence(&g, &RadialSchedule::Geometric, grid).unwrap();
        for n in [1, 5, 20] {
            let r = 1.0 - 0.5f64.powi(n as i32);
            let f = seq.member(n).unwrap();
            for (j, v) in f.values().iter().enumerate() {
                assert!((v - grid.point(j) * r).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn blaschke_dilates_converge_weak_star() {
        let grid = CircleGrid::new(256).unwrap();
        let g = BoundedAnalyticWitness::blaschke(vec![C64::new(0.5, 0.0)]).unwrap();
        let seq = build_dilate_sequence(&g, &RadialSchedule::Geometric, grid).unwrap();
        let r = check_weak_star(&seq, &g.boundary_samples(grid).unwrap(), 32, 1e-2, 16).unwrap();
        assert_eq!(r.verdict, Verdict::Converged);
    }

    #[test]
    fn target_set_kinds() {
        let arc = TargetDescriptor::Arc {
            start: 0.0,
            end: PI,
            count: 3,
        };
        let a = arc.angles().unwrap();
        assert_eq!(a.len(), 3);
        assert!((a[1] - PI / 2.0).abs() < 1e-15 && (a[2] - PI).abs() < 1e-15);

        let t = build_target_set(&TargetDescriptor::Finite { angles: vec![PI / 4.0] }, |_| {
            Ok(C64::new(1.0, 0.0))
        })
        .unwrap();
        assert_eq!(t.len(), 1);

        // depth 2 on [0, 2pi/3]: [0,2/27],[4/27,6/27],[12/27,14/27],[16/27,18/27] times pi
        let c = TargetDescriptor::CantorLike {
            start: 0.0,
            end: 2.0 * PI / 3.0,
            depth: 2,
        };
        let got = c.angles().unwrap();
        let want: Vec<f64> = [0.0, 2.0, 4.0, 6.0, 12.0, 14.0, 16.0, 18.0]
            .iter()
            .map(|x| x * PI / 27.0)
            .collect();
        assert_eq!(got.len(), 8);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-14);
        }
    }

    #[test]
    fn invalid_targets() {
        assert!(TargetDescriptor::Arc { start: 1.0, end: 0.0, count: 3 }.angles().is_err());
        assert!(TargetDescriptor::Arc { start: 0.0, end: 2.0 * PI, count: 5 }.angles().is_err());
        assert!(TargetDescriptor::Finite { angles: vec![0.1, 0.1] }.angles().is_err());
        assert!(TargetDescriptor::CantorLike { start: 0.0, end: 1.0, depth: 13 }.angles().is_err());
    }

    #[test]
    fn negative_witness_members() {
        let grid = CircleGrid::new(16).unwrap();
        let seq = build_negative_witness(grid);
        for n in [1, 7, 100] {
            let f = seq.member(n).unwrap();
            for (j, v) in f.values().iter().enumerate() {
                assert!((v - C64::from_polar(1.0, -grid.angle(j))).norm() < 1e-15);
            }
            assert_eq!(f.claimed_bound(), Some(1.0));
        }
        let p = AnalyticPolynomial::new(vec![C64::new(0.2, 0.0), C64::new(0.1, 0.0)]).unwrap();
        let r = check_weak_star(&seq, &p.sample_on(grid), 4, 1e-3, 16).unwrap();
        assert_eq!(r.verdict, Verdict::NotConverged);
        assert!(r.deviation(16, -1) >= 1.0 - 1e-12);
    }

    #[test]
    fn builtins_validate() {
        for s in builtin_scenarios() {
            s.validate().unwrap();
            let back: ScenarioSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
            assert_eq!(back, s);
        }
        assert!(find_builtin("blaschke-arc").is_some());
    }
}
