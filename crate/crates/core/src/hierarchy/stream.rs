//! Witness streams: sequences of finitely supported measures indexed by stage.
//!
//! Every stream can materialize a stage as a [`FinSupp`], and evaluates
//! stages on a term directly, which is much cheaper for the uniform and
//! diagonal streams than building the stage first.

use crate::error::{Error, Result};
use crate::measure::{FinSupp, Measure};
use crate::natset::{prefix_unchecked, Point, SetTerm};
use crate::rational::Q;

/// How far a conditioned stream looks ahead for a stage of positive mass.
pub const MAX_SKIP: u64 = 1 << 12;

pub trait WitnessStream: Send + Sync {
    /// Lowest `α` the stream's limit is certified to lie in `S_α` by construction.
    fn level(&self) -> u32;

    fn provenance(&self) -> String;

    fn stage(&self, s: u64) -> Result<FinSupp>;

    fn eval_stage(&self, s: u64, t: &SetTerm) -> Result<Q> {
        Ok(self.stage(s)?.eval(t))
    }

    /// Values of stages `0..=horizon` on `t`.
    fn eval_stages(&self, t: &SetTerm, horizon: u64) -> Result<Vec<Q>> {
        (0..=horizon).map(|s| self.eval_stage(s, t)).collect()
    }
}

/// Uniform measure on `{0, …, s}`.
pub struct Uniform;

impl WitnessStream for Uniform {
    fn level(&self) -> u32 {
        1
    }

    fn provenance(&self) -> String {
        "uniform".into()
    }

    fn stage(&self, s: u64) -> Result<FinSupp> {
        Ok(FinSupp::uniform_below(s))
    }

    fn eval_stage(&self, s: u64, t: &SetTerm) -> Result<Q> {
        let hits = prefix_unchecked(t, s + 1).into_iter().filter(|&b| b).count() as u64;
        Ok(Q::ratio_u64(hits, s + 1))
    }

    fn eval_stages(&self, t: &SetTerm, horizon: u64) -> Result<Vec<Q>> {
        let mut hits = 0u64;
        Ok(prefix_unchecked(t, horizon + 1)
            .into_iter()
            .enumerate()
            .map(|(s, b)| {
                hits += b as u64;
                Q::ratio_u64(hits, s as u64 + 1)
            })
            .collect())
    }
}

/// Stage `s` is stage `s` of `inner` pushed into block `s`.
pub struct Diagonal {
    pub inner: Box<dyn WitnessStream>,
}

impl WitnessStream for Diagonal {
    fn level(&self) -> u32 {
        self.inner.level() + 1
    }

    fn provenance(&self) -> String {
        format!("diagonal({})", self.inner.provenance())
    }

    fn stage(&self, s: u64) -> Result<FinSupp> {
        Ok(self.inner.stage(s)?.push_into(block_index(s)?))
    }

    fn eval_stage(&self, s: u64, t: &SetTerm) -> Result<Q> {
        self.inner.eval_stage(s, &t.trace(block_index(s)?))
    }
}

fn block_index(s: u64) -> Result<u32> {
    u32::try_from(s).map_err(|_| Error::InvalidArgument(format!("stage {s} exceeds the block range")))
}

/// Every stage of `inner` pushed into the fixed block `block`.
pub struct InBlock {
    pub block: u32,
    pub inner: Box<dyn WitnessStream>,
}

impl WitnessStream for InBlock {
    fn level(&self) -> u32 {
        self.inner.level()
    }

    fn provenance(&self) -> String {
        format!("block{}({})", self.block, self.inner.provenance())
    }

    fn stage(&self, s: u64) -> Result<FinSupp> {
        Ok(self.inner.stage(s)?.push_into(self.block))
    }

    fn eval_stage(&self, s: u64, t: &SetTerm) -> Result<Q> {
        self.inner.eval_stage(s, &t.trace(self.block))
    }

    fn eval_stages(&self, t: &SetTerm, horizon: u64) -> Result<Vec<Q>> {
        self.inner.eval_stages(&t.trace(self.block), horizon)
    }
}

/// Dirac measures at `x^s_c`.
pub struct PointLimit {
    pub point: u64,
}

impl WitnessStream for PointLimit {
    fn level(&self) -> u32 {
        1
    }

    fn provenance(&self) -> String {
        format!("dirac(x^s_{})", self.point)
    }

    fn stage(&self, s: u64) -> Result<FinSupp> {
        Ok(FinSupp::dirac_at(Point::new(vec![block_index(s)?], self.point)))
    }

    fn eval_stage(&self, s: u64, t: &SetTerm) -> Result<Q> {
        let hit = t.trace(block_index(s)?).member(self.point);
        Ok(if hit { Q::one() } else { Q::zero() })
    }
}

pub struct Constant {
    pub measure: FinSupp,
}

impl WitnessStream for Constant {
    fn level(&self) -> u32 {
        0
    }

    fn provenance(&self) -> String {
        "constant".into()
    }

    fn stage(&self, _s: u64) -> Result<FinSupp> {
        Ok(self.measure.clone())
    }

    fn eval_stages(&self, t: &SetTerm, horizon: u64) -> Result<Vec<Q>> {
        Ok(vec![self.measure.eval(t); horizon as usize + 1])
    }
}

pub struct Mixture {
    pub parts: Vec<(Q, Box<dyn WitnessStream>)>,
}

impl WitnessStream for Mixture {
    fn level(&self) -> u32 {
        self.parts.iter().map(|(_, s)| s.level()).max().unwrap_or(0)
    }

    fn provenance(&self) -> String {
        let inner: Vec<String> =
            self.parts.iter().map(|(w, s)| format!("{w}*{}", s.provenance())).collect();
        format!("mix({})", inner.join(", "))
    }

    fn stage(&self, s: u64) -> Result<FinSupp> {
        let mut masses = Vec::new();
        for (w, part) in &self.parts {
            let st = part.stage(s)?;
            masses.extend(st.iter().map(|(p, v)| (p.clone(), v.clone() * w)));
        }
        FinSupp::from_masses(masses)
    }

    fn eval_stage(&self, s: u64, t: &SetTerm) -> Result<Q> {
        let mut sum = Q::zero();
        for (w, part) in &self.parts {
            sum = sum + part.eval_stage(s, t)? * w;
        }
        Ok(sum)
    }

    fn eval_stages(&self, t: &SetTerm, horizon: u64) -> Result<Vec<Q>> {
        let mut acc = vec![Q::zero(); horizon as usize + 1];
        for (w, part) in &self.parts {
            for (a, v) in acc.iter_mut().zip(part.eval_stages(t, horizon)?) {
                *a = a.clone() + v * w;
            }
        }
        Ok(acc)
    }
}

/// `ν_s(· ∩ A)` weighted by `c_A` over the steps `(A, c_A)`, then normalized.
///
/// A single step `(Y, 1)` is the conditional stream on `Y`. Stages of zero
/// mass are replaced by the next stage of positive mass.
pub struct Conditioned {
    pub inner: Box<dyn WitnessStream>,
    pub steps: Vec<(SetTerm, Q)>,
}

impl Conditioned {
    pub fn restricted(inner: Box<dyn WitnessStream>, y: SetTerm) -> Conditioned {
        Conditioned { inner, steps: vec![(y, Q::one())] }
    }

    fn weighted(&self, s: u64, t: Option<&SetTerm>) -> Result<Q> {
        let mut sum = Q::zero();
        for (a, c) in &self.steps {
            if c.is_zero() {
                continue;
            }
            let set = match t {
                Some(t) => SetTerm::inter(vec![t.clone(), a.clone()]),
                None => a.clone(),
            };
            sum = sum + self.inner.eval_stage(s, &set)? * c;
        }
        Ok(sum)
    }

    /// First stage at or after `s` with positive mass.
    fn effective(&self, s: u64) -> Result<(u64, Q)> {
        for e in s..=s + MAX_SKIP {
            let mass = self.weighted(e, None)?;
            if mass.is_positive() {
                return Ok((e, mass));
            }
        }
        Err(Error::ZeroMass)
    }
}

impl WitnessStream for Conditioned {
    fn level(&self) -> u32 {
        self.inner.level()
    }

    fn provenance(&self) -> String {
        format!("conditioned({}, {} steps)", self.inner.provenance(), self.steps.len())
    }

    fn stage(&self, s: u64) -> Result<FinSupp> {
        let (e, _) = self.effective(s)?;
        let st = self.inner.stage(e)?;
        let masses = st.iter().map(|(p, w)| {
            let c = self
                .steps
                .iter()
                .find(|(a, _)| a.member_point(p))
                .map(|(_, c)| c.clone())
                .unwrap_or_else(Q::zero);
            (p.clone(), w.clone() * c)
        });
        FinSupp::from_masses(masses)
    }

    fn eval_stage(&self, s: u64, t: &SetTerm) -> Result<Q> {
        let (e, mass) = self.effective(s)?;
        Ok(self.weighted(e, Some(t))? / mass)
    }

    fn eval_stages(&self, t: &SetTerm, horizon: u64) -> Result<Vec<Q>> {
        let mut num = vec![Q::zero(); horizon as usize + 1];
        let mut den = vec![Q::zero(); horizon as usize + 1];
        for (a, c) in &self.steps {
            if c.is_zero() {
                continue;
            }
            let hit = SetTerm::inter(vec![t.clone(), a.clone()]);
            for (x, v) in num.iter_mut().zip(self.inner.eval_stages(&hit, horizon)?) {
                *x = x.clone() + v * c;
            }
            for (x, v) in den.iter_mut().zip(self.inner.eval_stages(a, horizon)?) {
                *x = x.clone() + v * c;
            }
        }
        let mut out = Vec::with_capacity(num.len());
        for s in 0..num.len() {
            match (s..num.len()).find(|&e| den[e].is_positive()) {
                Some(e) => out.push(num[e].clone() / &den[e]),
                None => out.push(self.eval_stage(s as u64, t)?),
            }
        }
        Ok(out)
    }
}

/// The level-α witness stream for μ⁽ᵅ⁾.
pub fn level_stream(level: u32) -> Box<dyn WitnessStream> {
    let mut s: Box<dyn WitnessStream> = Box::new(Uniform);
    for _ in 1..level {
        s = Box::new(Diagonal { inner: s });
    }
    s
}

/// Uniform measure on `{0, …, n}`.
pub fn witness_level1(n: u64) -> FinSupp {
    FinSupp::uniform_below(n)
}

/// The level-α witness at stage `inner_depth`, pushed into block `m`.
pub fn witness_next(level: u32, m: u32, inner_depth: u64) -> Result<FinSupp> {
    if level < 2 {
        return Err(Error::LevelOutOfRange { level, max: u32::MAX });
    }
    Ok(level_stream(level - 1).stage(inner_depth)?.push_into(m))
}

/// A witness stream converging to a structured measure.
pub fn witness_for(m: &Measure) -> Result<Box<dyn WitnessStream>> {
    Ok(match m {
        Measure::FinSupp(f) => Box::new(Constant { measure: f.clone() }),
        Measure::Level(l) => level_stream(l.level()),
        Measure::BlockLifted { block, inner } => {
            Box::new(InBlock { block: *block, inner: witness_for(inner)? })
        }
        Measure::PointLimit { limit_point } => Box::new(PointLimit { point: *limit_point }),
        Measure::Restricted { restrict, to } => {
            Box::new(Conditioned::restricted(witness_for(restrict)?, to.clone()))
        }
        Measure::Reweighted { reweight, density } => {
            Box::new(Conditioned { inner: witness_for(reweight)?, steps: density.clone() })
        }
        Measure::Mixture { mix } => Box::new(Mixture {
            parts: mix
                .iter()
                .map(|(w, m)| Ok((w.clone(), witness_for(m)?)))
                .collect::<Result<_>>()?,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::reweight;

    #[test]
    fn level_one_examples() {
        assert_eq!(witness_level1(9).eval(&SetTerm::dyadic(1, [0])), Q::new(1, 2));
        assert_eq!(witness_level1(0), FinSupp::dirac(0));
        // brute-force count of B0 = evens below 100
        let b0 = (0..100u64).filter(|x| SetTerm::Block(0).member(*x)).count() as u64;
        assert_eq!(b0, 50);
        assert_eq!(witness_level1(99).eval(&SetTerm::Block(0)), Q::ratio_u64(b0, 100));
    }

    #[test]
    fn next_level_examples() {
        let w = witness_next(2, 7, 9).unwrap();
        assert_eq!(w.eval(&SetTerm::diagonal_const(SetTerm::evens())), Q::new(1, 2));
        assert_eq!(w.eval(&SetTerm::Block(7)), Q::one());
        assert_eq!(witness_next(2, 3, 9).unwrap().eval(&SetTerm::Block(2)), Q::zero());
        let far = witness_next(3, 200, 100).unwrap();
        assert_eq!(far.eval(&SetTerm::Block(200)), Q::one());
    }

    #[test]
    fn fast_paths_agree_with_stages() {
        let streams: Vec<Box<dyn WitnessStream>> = vec![
            level_stream(1),
            level_stream(2),
            level_stream(3),
            Box::new(PointLimit { point: 2 }),
            Box::new(InBlock { block: 2, inner: level_stream(1) }),
            Box::new(Conditioned::restricted(level_stream(1), SetTerm::dyadic(2, [1, 2]))),
            witness_for(
                &reweight(
                    &Measure::level(1).unwrap(),
                    &[(SetTerm::evens(), Q::new(3, 2)), (SetTerm::odds(), Q::new(1, 2))],
                )
                .unwrap(),
            )
            .unwrap(),
        ];
        let terms = [
            SetTerm::dyadic(2, [1]),
            SetTerm::diagonal_const(SetTerm::dyadic(1, [1])),
            SetTerm::lift(2, SetTerm::evens()),
        ];
        for st in &streams {
            for t in &terms {
                let fast = st.eval_stages(t, 40).unwrap();
                for (s, v) in fast.iter().enumerate() {
                    let stage = st.stage(s as u64).unwrap();
                    assert_eq!(stage.weights().iter().sum::<Q>(), Q::one());
                    assert_eq!(&stage.eval(t), v, "{} stage {s} on {t}", st.provenance());
                    assert_eq!(&st.eval_stage(s as u64, t).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn conditioned_skips_empty_stages() {
        let st = Conditioned::restricted(level_stream(1), SetTerm::finite([5, 6]));
        assert_eq!(st.stage(0).unwrap(), FinSupp::dirac(5));
        assert_eq!(st.eval_stage(2, &SetTerm::finite([5])).unwrap(), Q::one());
        let none = Conditioned::restricted(level_stream(1), SetTerm::empty());
        assert_eq!(none.stage(0), Err(Error::ZeroMass));
    }
}
