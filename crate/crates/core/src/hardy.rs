//! Bounded analytic witnesses, radial boundary sampling and the Cauchy
//! pairing `oint_T f(z) G(z) dz` against analytic polynomial symbols.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circle::{
    certified_sup_norm_banded, AnalyticPolynomial, CircleGrid, SampledFunction, ROUNDING_SLACK,
};
use crate::error::{Error, Result};
use crate::C64;

/// Evaluation points the polynomial-witness bound check is certified on.
const WITNESS_CERT_POINTS: usize = 1 << 14;

/// A bounded analytic function on the disk that extends continuously to the
/// circle, with a sup-norm claim `bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WitnessRepr", into = "WitnessRepr")]
pub enum BoundedAnalyticWitness {
    Polynomial {
        poly: AnalyticPolynomial,
        bound: f64,
    },
    /// `unimodular * prod_i (z - a_i) / (1 - conj(a_i) z)`.
    Blaschke {
        zeros: Vec<C64>,
        unimodular: C64,
        bound: f64,
    },
    /// `factor * inner(dilation * z)` with `0 < dilation <= 1`.
    ScaledComposition {
        inner: Box<BoundedAnalyticWitness>,
        factor: C64,
        dilation: f64,
        bound: f64,
    },
}

impl BoundedAnalyticWitness {
    pub fn blaschke(zeros: Vec<C64>) -> Result<Self> {
        Self::Blaschke {
            zeros,
            unimodular: C64::new(1.0, 0.0),
            bound: 1.0,
        }
        .validated()
    }

    pub fn polynomial(poly: AnalyticPolynomial, bound: f64) -> Result<Self> {
        Self::Polynomial { poly, bound }.validated()
    }

    pub fn scaled(inner: BoundedAnalyticWitness, factor: C64, dilation: f64) -> Result<Self> {
        let bound = factor.norm() * inner.bound();
        Self::ScaledComposition {
            inner: Box::new(inner),
            factor,
            dilation,
            bound,
        }
        .validated()
    }

    pub fn bound(&self) -> f64 {
        match self {
            Self::Polynomial { bound, .. }
            | Self::Blaschke { bound, .. }
            | Self::ScaledComposition { bound, .. } => *bound,
        }
    }

    fn validated(self) -> Result<Self> {
        let bound = self.bound();
        if !bound.is_finite() || bound < 0.0 {
            return Err(Error::invalid("bound", "must be finite and nonnegative"));
        }
        match &self {
            Self::Polynomial { poly, bound } => {
                let sup = certified_sup_norm_banded(poly, WITNESS_CERT_POINTS.max(poly.degree() + 1))?;
                if sup > bound * (1.0 + ROUNDING_SLACK) {
                    return Err(Error::BoundViolated { bound: *bound, max: sup });
                }
            }
            Self::Blaschke {
                zeros,
                unimodular,
                bound,
            } => {
                if zeros.iter().any(|a| !a.re.is_finite() || !a.im.is_finite() || a.norm() >= 1.0) {
                    return Err(Error::invalid("zeros", "every zero must lie strictly inside the disk"));
                }
                if !((unimodular.norm() - 1.0).abs() <= 1e-12) {
                    return Err(Error::invalid("unimodular", "front constant must have modulus 1"));
                }
                if *bound < 1.0 {
                    return Err(Error::BoundViolated { bound: *bound, max: 1.0 });
                }
            }
            Self::ScaledComposition {
                inner,
                factor,
                dilation,
                bound,
            } => {
                if !factor.re.is_finite() || !factor.im.is_finite() {
                    return Err(Error::invalid("factor", "must be finite"));
                }
                if !(*dilation > 0.0 && *dilation <= 1.0) {
                    return Err(Error::invalid("dilation", "must lie in (0, 1]"));
                }
                let implied = factor.norm() * inner.bound();
                if implied > bound * (1.0 + ROUNDING_SLACK) {
                    return Err(Error::BoundViolated { bound: *bound, max: implied });
                }
            }
        }
        Ok(self)
    }

    /// `g(z)` for `|z| <= 1`; every shipped kind extends continuously to the
    /// closed disk.
    pub fn eval(&self, z: C64) -> Result<C64> {
        if !(z.norm() <= 1.0 + 1e-12) {
            return Err(Error::Domain { re: z.re, im: z.im });
        }
        Ok(self.eval_unchecked(z))
    }

    fn eval_unchecked(&self, z: C64) -> C64 {
        match self {
            Self::Polynomial { poly, .. } => poly.evaluate(z),
            Self::Blaschke {
                zeros, unimodular, ..
            } => zeros
                .iter()
                .fold(*unimodular, |acc, a| acc * (z - a) / (1.0 - a.conj() * z)),
            Self::ScaledComposition {
                inner,
                factor,
                dilation,
                ..
            } => factor * inner.eval_unchecked(z * *dilation),
        }
    }

    /// Boundary values `g(e^{i theta_j})` with the witness bound attached.
    pub fn boundary_samples(&self, grid: CircleGrid) -> Result<SampledFunction> {
        SampledFunction::new(grid, grid.points().into_iter().map(|z| self.eval_unchecked(z)).collect())?
            .with_bound(self.bound())
    }
}

pub fn witness_eval(g: &BoundedAnalyticWitness, z: C64) -> Result<C64> {
    g.eval(z)
}

/// `values_j = g(r e^{i theta_j})`, claimed bound `M`.
pub fn radial_boundary_samples(
    g: &BoundedAnalyticWitness,
    grid: CircleGrid,
    r: f64,
) -> Result<SampledFunction> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::invalid("r", format!("radius {r} must lie in (0, 1)")));
    }
    let values = grid
        .points()
        .into_iter()
        .map(|z| g.eval(z * r))
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(grid, values)?.with_bound(g.bound())
}

/// `oint_T f(z) G(z) dz ~ i (2 pi / N) sum_j f(theta_j) G(e^{i theta_j}) e^{i theta_j}`.
pub fn cauchy_pairing(f: &SampledFunction, symbol: &AnalyticPolynomial) -> Result<C64> {
    let grid = *f.grid();
    let n = grid.len();
    if n < 4 * (symbol.degree() + 1) {
        return Err(Error::GridTooCoarse {
            n,
            degree: symbol.degree(),
        });
    }
    let g_vals = symbol.sample_on(grid);
    let sum: C64 = f
        .values()
        .iter()
        .zip(g_vals.values())
        .enumerate()
        .map(|(j, (fv, gv))| fv * gv * grid.point(j))
        .sum();
    Ok(C64::new(0.0, 2.0 * PI / n as f64) * sum)
}

/// `r_n = 1 - 2^{-n}` or an explicit strictly increasing list in `(0, 1)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum RadialSchedule {
    #[default]
    Geometric,
    Explicit { radii: Vec<f64> },
}

impl RadialSchedule {
    /// Members of the sequence are indexed from 1.
    pub fn radius(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::IndexUnavailable {
                n,
                reason: "sequences are indexed from 1".into(),
            });
        }
        match self {
            RadialSchedule::Geometric => {
                if n > self.len() {
                    return Err(Error::IndexUnavailable {
                        n,
                        reason: "1 - 2^-n rounds to 1 in double precision".into(),
                    });
                }
                Ok(1.0 - (0.5f64).powi(n as i32))
            }
            RadialSchedule::Explicit { radii } => {
                radii.get(n - 1).copied().ok_or_else(|| Error::IndexUnavailable {
                    n,
                    reason: format!("explicit schedule has {} radii", radii.len()),
                })
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            RadialSchedule::Geometric => 52,
            RadialSchedule::Explicit { radii } => radii.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if let RadialSchedule::Explicit { radii } = self {
            if radii.is_empty() {
                return Err(Error::invalid("radii", "schedule is empty"));
            }
            if radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
                return Err(Error::invalid("radii", "every radius must lie in (0, 1)"));
            }
            if radii.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid("radii", "radii must be strictly increasing"));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum WitnessRepr {
    Polynomial {
        coeffs: Vec<C64>,
        bound: f64,
    },
    Blaschke {
        zeros: Vec<C64>,
        #[serde(default = "one")]
        unimodular: C64,
        #[serde(default = "unit")]
        bound: f64,
    },
    ScaledComposition {
        inner: Box<BoundedAnalyticWitness>,
        factor: C64,
        #[serde(default = "unit")]
        dilation: f64,
        bound: f64,
    },
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn unit() -> f64 {
    1.0
}

impl TryFrom<WitnessRepr> for BoundedAnalyticWitness {
    type Error = Error;
    fn try_from(r: WitnessRepr) -> Result<Self> {
        match r {
            WitnessRepr::Polynomial { coeffs, bound } => Self::Polynomial {
                poly: AnalyticPolynomial::new(coeffs)?,
                bound,
            },
            WitnessRepr::Blaschke {
                zeros,
                unimodular,
                bound,
            } => Self::Blaschke {
                zeros,
                unimodular,
                bound,
            },
            WitnessRepr::ScaledComposition {
                inner,
                factor,
                dilation,
                bound,
            } => Self::ScaledComposition {
                inner,
                factor,
                dilation,
                bound,
            },
        }
        .validated()
    }
}

impl From<BoundedAnalyticWitness> for WitnessRepr {
    fn from(w: BoundedAnalyticWitness) -> Self {
        match w {
            BoundedAnalyticWitness::Polynomial { poly, bound } => WitnessRepr::Polynomial {
                coeffs: poly.coeffs().to_vec(),
                bound,
            },
            BoundedAnalyticWitness::Blaschke {
                zeros,
                unimodular,
                bound,
            } => WitnessRepr::Blaschke {
                zeros,
                unimodular,
                bound,
            },
            BoundedAnalyticWitness::ScaledComposition {
                inner,
                factor,
                dilation,
                bound,
            } => WitnessRepr::ScaledComposition {
                inner,
                factor,
                dilation,
                bound,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn degenerate_and_simple_blaschke() {
        let g = BoundedAnalyticWitness::blaschke(vec![c(0.0, 0.0)]).unwrap();
        assert!((g.eval(c(0.5, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        let g = BoundedAnalyticWitness::blaschke(vec![c(0.5, 0.0)]).unwrap();
        assert_eq!(g.eval(c(0.5, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(matches!(g.eval(c(1.1, 0.0)), Err(Error::Domain { .. })));
    }

    #[test]
    fn blaschke_is_unimodular_on_circle() {
        let g = BoundedAnalyticWitness::blaschke(vec![c(0.5, 0.0), c(-0.3, 0.6), c(0.0, -0.9)]).unwrap();
        let grid = CircleGrid::new(4096).unwrap();
        let b = g.boundary_samples(grid).unwrap();
        let worst = b.values().iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn invalid_witnesses_rejected() {
        assert!(BoundedAnalyticWitness::blaschke(vec![c(1.0, 0.0)]).is_err());
        let p = AnalyticPolynomial::new(vec![c(0.5, 0.0), c(0.6, 0.0)]).unwrap();
        assert!(BoundedAnalyticWitness::polynomial(p.clone(), 1.0).is_err());
        assert!(BoundedAnalyticWitness::polynomial(p, 1.1).is_ok());
        let inner = BoundedAnalyticWitness::blaschke(vec![c(0.2, 0.0)]).unwrap();
        assert!(BoundedAnalyticWitness::scaled(inner, c(0.0, 2.0), 1.5).is_err());
    }

    #[test]
    fn radial_samples_examples() {
        let grid = CircleGrid::new(64).unwrap();
        let id = BoundedAnalyticWitness::polynomial(AnalyticPolynomial::monomial(1), 1.0).unwrap();
        let s = radial_boundary_samples(&id, grid, 0.9).unwrap();
        for (j, v) in s.values().iter().enumerate() {
            assert!((v - grid.point(j) * 0.9).norm() < 1e-15);
        }
        assert_eq!(s.claimed_bound(), Some(1.0));

        let k = BoundedAnalyticWitness::polynomial(AnalyticPolynomial::constant(c(0.3, 0.1)), 0.5).unwrap();
        for r in [0.1, 0.5, 0.99] {
            let s = radial_boundary_samples(&k, grid, r).unwrap();
            assert!(s.values().iter().all(|v| *v == c(0.3, 0.1)));
        }
        assert!(radial_boundary_samples(&k, grid, 1.0).is_err());
        assert!(radial_boundary_samples(&k, grid, 0.0).is_err());
    }

    #[test]
    fn radial_samples_approach_boundary() {
        let grid = CircleGrid::new(1024).unwrap();
        let g = BoundedAnalyticWitness::blaschke(vec![c(0.5, 0.0)]).unwrap();
        let edge = g.boundary_samples(grid).unwrap();
        let dev = |r: f64| {
            let s = radial_boundary_samples(&g, grid, r).unwrap();
            s.sub(&edge).unwrap().max_modulus()
        };
        assert!(dev(1.0 - 2f64.powi(-8)) <= 0.05);
        let sched = RadialSchedule::Geometric;
        let devs: Vec<f64> = (1..=20).map(|n| dev(sched.radius(n).unwrap())).collect();
        assert!(devs.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }

    #[test]
    fn pairing_examples() {
        let grid = CircleGrid::new(64).unwrap();
        let conj = SampledFunction::from_fn(grid, |t| C64::from_polar(1.0, -t)).unwrap();
        let v = cauchy_pairing(&conj, &AnalyticPolynomial::constant(c(1.0, 0.0))).unwrap();
        assert!((v - c(0.0, 2.0 * PI)).norm() < 1e-10);
        let zero = SampledFunction::zero(grid);
        let v = cauchy_pairing(&zero, &AnalyticPolynomial::monomial(3)).unwrap();
        assert_eq!(v, c(0.0, 0.0));
        assert!(matches!(
            cauchy_pairing(&zero, &AnalyticPolynomial::monomial(16)),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn schedule_rules() {
        let s = RadialSchedule::Geometric;
        assert_eq!(s.radius(1).unwrap(), 0.5);
        assert_eq!(s.radius(3).unwrap(), 0.875);
        assert!(s.radius(0).is_err());
        assert!(s.radius(53).is_err());
        assert!(s.radius(52).unwrap() < 1.0);
        let bad = RadialSchedule::Explicit { radii: vec![0.5, 0.4] };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn witness_json_shape() {
        let g = BoundedAnalyticWitness::blaschke(vec![c(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"blaschke","zeros":[[0.5,0.0]],"unimodular":[1.0,0.0],"bound":1.0}"#
        );
        let back: BoundedAnalyticWitness = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<BoundedAnalyticWitness>(
            r#"{"kind":"blaschke","zeros":[[1.5,0.0]],"unimodular":[1,0],"bound":1}"#
        )
        .is_err());
    }
}
