//! Probability measures on the generated algebras.
//!
//! A [`Measure`] is an evaluator with enough structure to serialize, to
//! decompose, and to rebuild from a certificate. Evaluation returns `None`
//! when the value is not resolvable exactly.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::natset::{FamilySubst, Profile, SetTerm, MAX_TRACE_PERIOD};
use crate::rational::Q;

mod decompose;
mod finsupp;
mod level;
mod ops;

pub use decompose::{
    decompose, Component, ComponentClass, Decomposition, NonAtomicStep, TAIL_BLOCKS,
};
pub use finsupp::FinSupp;
pub use level::{dyadic_preset, lebesgue, LevelMeasure, Tower};
pub use ops::{generator_distance, reweight, restrict_rescale, validate_partition};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Measure {
    FinSupp(FinSupp),
    Level(LevelMeasure),
    /// A copy of `inner` carried by block `block`.
    BlockLifted { block: u32, inner: Box<Measure> },
    /// The weak* limit of the Dirac measures at `x^n_c` as `n → ∞`.
    PointLimit { limit_point: u64 },
    /// `base(· ∩ to) / base(to)`.
    Restricted { restrict: Box<Measure>, to: SetTerm },
    /// `Σ_j c_j · base(· ∩ A_j)` over a partition `(A_j)`.
    Reweighted { reweight: Box<Measure>, density: Vec<(SetTerm, Q)> },
    /// Convex combination with weights summing to 1.
    Mixture { mix: Vec<(Q, Measure)> },
}

impl From<FinSupp> for Measure {
    fn from(m: FinSupp) -> Measure {
        Measure::FinSupp(m)
    }
}

impl From<LevelMeasure> for Measure {
    fn from(m: LevelMeasure) -> Measure {
        Measure::Level(m)
    }
}

impl Measure {
    pub fn level(level: u32) -> Result<Measure> {
        LevelMeasure::new(level).map(Measure::Level)
    }

    pub fn dirac(x: u64) -> Measure {
        Measure::FinSupp(FinSupp::dirac(x))
    }

    pub fn block_lifted(block: u32, inner: Measure) -> Measure {
        Measure::BlockLifted { block, inner: Box::new(inner) }
    }

    pub fn point_limit(c: u64) -> Measure {
        Measure::PointLimit { limit_point: c }
    }

    pub fn mixture(parts: Vec<(Q, Measure)>) -> Result<Measure> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("empty mixture".into()));
        }
        if let Some((w, _)) = parts.iter().find(|(w, _)| w.is_negative()) {
            return Err(Error::InvalidArgument(format!("negative mixture weight {w}")));
        }
        let total: Q = parts.iter().map(|(w, _)| w).sum();
        if total != Q::one() {
            return Err(Error::Normalization(total));
        }
        Ok(Measure::Mixture { mix: parts })
    }

    pub fn eval(&self, t: &SetTerm) -> Option<Q> {
        match self {
            Measure::FinSupp(m) => Some(m.eval(t)),
            Measure::Level(m) => m.eval(t),
            Measure::BlockLifted { block, inner } => inner.eval(&t.trace(*block)),
            Measure::PointLimit { limit_point } => point_limit_eval(*limit_point, t),
            Measure::Restricted { restrict, to } => {
                let mass = restrict.eval(to)?;
                if mass.is_zero() {
                    return None;
                }
                Some(restrict.eval(&SetTerm::inter(vec![t.clone(), to.clone()]))? / mass)
            }
            Measure::Reweighted { reweight, density } => {
                let mut sum = Q::zero();
                for (a, c) in density {
                    if !c.is_zero() {
                        sum = sum + reweight.eval(&SetTerm::inter(vec![t.clone(), a.clone()]))? * c;
                    }
                }
                Some(sum)
            }
            Measure::Mixture { mix } => {
                let mut sum = Q::zero();
                for (w, m) in mix {
                    if !w.is_zero() {
                        sum = sum + m.eval(t)? * w;
                    }
                }
                Some(sum)
            }
        }
    }

    pub fn eval_or_err(&self, t: &SetTerm) -> Result<Q> {
        self.eval(t).ok_or_else(|| Error::UndefinedValue(format!("{self} on {t}")))
    }

    /// Blocks carrying all of the mass, when finitely many do.
    pub fn block_support(&self) -> Option<BTreeSet<u32>> {
        match self {
            Measure::FinSupp(m) => Some(m.blocks()),
            Measure::BlockLifted { block, .. } => Some(BTreeSet::from([*block])),
            Measure::Restricted { restrict: base, .. } | Measure::Reweighted { reweight: base, .. } => {
                base.block_support()
            }
            Measure::Mixture { mix } => {
                let mut out = BTreeSet::new();
                for (w, m) in mix {
                    if !w.is_zero() {
                        out.extend(m.block_support()?);
                    }
                }
                Some(out)
            }
            Measure::Level(_) | Measure::PointLimit { .. } => None,
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Measure::FinSupp(m) if m.points().len() == 1 => write!(f, "delta_{}", m.points()[0]),
            Measure::FinSupp(m) => write!(f, "finsupp[{}]", m.points().len()),
            Measure::Level(m) => write!(f, "{m}"),
            Measure::BlockLifted { block, inner } => write!(f, "({inner})^{block}"),
            Measure::PointLimit { limit_point } => write!(f, "lim delta_x^n_{limit_point}"),
            Measure::Restricted { restrict, to } => write!(f, "{restrict}|{to}"),
            Measure::Reweighted { reweight, density } => {
                write!(f, "f.{reweight} (f has {} steps)", density.len())
            }
            Measure::Mixture { mix } => {
                for (i, (w, m)) in mix.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{w}*{m}")?;
                }
                Ok(())
            }
        }
    }
}

/// `lim_n [c ∈ trace(t, n)]`.
fn point_limit_eval(c: u64, t: &SetTerm) -> Option<Q> {
    let prof = Profile::of(t);
    if prof.period > MAX_TRACE_PERIOD {
        return None;
    }
    // a vanishing family member contains c for all large n exactly when c = 0
    let subst = if c == 0 { FamilySubst::Full } else { FamilySubst::Empty };
    let hit = t.trace_with(prof.threshold, subst).member(c);
    for r in 1..prof.period as u32 {
        if t.trace_with(prof.threshold + r, subst).member(c) != hit {
            return None;
        }
    }
    Some(if hit { Q::one() } else { Q::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natset::{Family, Point};

    #[test]
    fn json_forms() {
        let m: Measure = serde_json::from_str(r#"{"level":2,"tower":"uniform"}"#).unwrap();
        assert_eq!(m, Measure::level(2).unwrap());
        let d: Measure = serde_json::from_str(r#"{"points":[3],"weights":[["1","1"]]}"#).unwrap();
        assert_eq!(d, Measure::dirac(3));
        let mix = Measure::mixture(vec![
            (Q::new(3, 10), Measure::dirac(5)),
            (Q::new(7, 10), Measure::level(1).unwrap()),
        ])
        .unwrap();
        let s = serde_json::to_string(&mix).unwrap();
        assert_eq!(serde_json::from_str::<Measure>(&s).unwrap(), mix);
        let pl = Measure::block_lifted(2, Measure::point_limit(4));
        let s = serde_json::to_string(&pl).unwrap();
        assert_eq!(s, r#"{"block":2,"inner":{"limit_point":4}}"#);
        assert_eq!(serde_json::from_str::<Measure>(&s).unwrap(), pl);
    }

    #[test]
    fn point_limits() {
        let p = Measure::point_limit(3);
        assert_eq!(p.eval(&SetTerm::Block(7)), Some(Q::zero()));
        assert_eq!(p.eval(&SetTerm::diagonal_const(SetTerm::finite([3]))), Some(Q::one()));
        assert_eq!(p.eval(&SetTerm::diagonal_const(SetTerm::dyadic(2, [3]))), Some(Q::one()));
        let mult = SetTerm::Diagonal(Family::Multiples { offset: 0 });
        assert_eq!(p.eval(&mult), Some(Q::zero()));
        assert_eq!(Measure::point_limit(0).eval(&mult), Some(Q::one()));
        // the point sits in the all-ones cell of every plain dyadic partition
        assert_eq!(p.eval(&SetTerm::dyadic(3, [7])), Some(Q::one()));
    }

    #[test]
    fn block_lifted_and_support() {
        let m = Measure::block_lifted(4, Measure::level(1).unwrap());
        assert_eq!(m.eval(&SetTerm::lift(4, SetTerm::evens())), Some(Q::new(1, 2)));
        assert_eq!(m.eval(&SetTerm::Block(3)), Some(Q::zero()));
        assert_eq!(m.block_support(), Some(BTreeSet::from([4])));
        let f = Measure::FinSupp(FinSupp::dirac_at(Point::new(vec![9], 2)));
        assert_eq!(f.block_support(), Some(BTreeSet::from([9])));
        assert_eq!(Measure::level(2).unwrap().block_support(), None);
    }

    #[test]
    fn complement_rule_for_finsupp() {
        let m = Measure::FinSupp(FinSupp::uniform_below(6));
        for t in [SetTerm::evens(), SetTerm::Block(1), SetTerm::finite([2, 40])] {
            let a = m.eval(&t).unwrap();
            let b = m.eval(&SetTerm::compl(t)).unwrap();
            assert_eq!(a + b, Q::one());
        }
    }
}
