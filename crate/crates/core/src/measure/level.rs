//! The tower measures μ⁽ᵅ⁾.
//!
//! μ⁽¹⁾ is asymptotic density. For α ≥ 2 every block carries a copy of
//! μ⁽ᵅ⁻¹⁾ and μ⁽ᵅ⁾(t) is the limit over n of μ⁽ᵅ⁻¹⁾(trace(t, n)). The limit is
//! read off the term's [`Profile`]: past the threshold the traces repeat with
//! the profile period, and vanishing families only perturb them by sets whose
//! measure tends to zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::natset::{decide_empty, density_value, FamilySubst, Profile, SetTerm, MAX_TRACE_PERIOD};
use crate::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tower {
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelMeasure {
    level: u32,
    tower: Tower,
}

impl LevelMeasure {
    pub fn new(level: u32) -> Result<LevelMeasure> {
        if level == 0 {
            return Err(Error::LevelOutOfRange { level, max: u32::MAX });
        }
        Ok(LevelMeasure { level, tower: Tower::Uniform })
    }

    /// μ⁽¹⁾.
    pub fn density() -> LevelMeasure {
        LevelMeasure { level: 1, tower: Tower::Uniform }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// The measure carried by each block, for α ≥ 2.
    pub fn block_measure(&self) -> Option<LevelMeasure> {
        (self.level >= 2).then(|| LevelMeasure { level: self.level - 1, tower: self.tower })
    }

    pub fn eval(&self, t: &SetTerm) -> Option<Q> {
        eval_level(self.level, t)
    }

    /// `μ′_n(t ∩ B_n)`: the block measure applied to the trace.
    ///
    /// At level 1 the blocks are the singletons `{n}`.
    pub fn block_value(&self, t: &SetTerm, n: u32) -> Option<Q> {
        if self.level == 1 {
            return Some(if t.member(n as u64) { Q::one() } else { Q::zero() });
        }
        eval_level(self.level - 1, &t.trace(n))
    }

    /// Upper bound on `sup_{n ≥ from} block_value(t, n)`, exact when the term has no
    /// vanishing families.
    pub fn tail_sup_bound(&self, t: &SetTerm, from: u32) -> Option<Q> {
        if self.level == 1 {
            let beyond = SetTerm::inter(vec![
                t.clone(),
                SetTerm::compl(SetTerm::finite(0..from as u64)),
            ]);
            return decide_empty(&beyond).map(|e| if e { Q::zero() } else { Q::one() });
        }
        let prof = Profile::of(t);
        if prof.period > MAX_TRACE_PERIOD {
            return None;
        }
        let mut sup = Q::zero();
        for n in from..prof.threshold {
            sup = sup.max(self.block_value(t, n)?);
        }
        let start = from.max(prof.threshold);
        let below = self.block_measure()?;
        for r in 0..prof.period as u32 {
            let lo = below.eval(&t.trace_with(prof.threshold + r, FamilySubst::Empty))?;
            sup = sup.max(lo + prof.family_bound(start));
        }
        Some(sup)
    }

    /// Tower generators `φ_α(M)` for the preset dyadic sets `M`.
    pub fn generators(&self, max_k: u32) -> Vec<SetTerm> {
        dyadic_preset(max_k).into_iter().map(|m| m.tower_lift(self.level - 1)).collect()
    }
}

impl std::fmt::Display for LevelMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "mu^({})", self.level)
    }
}

fn eval_level(level: u32, t: &SetTerm) -> Option<Q> {
    if level == 1 {
        return density_value(t);
    }
    if t.is_syntactically_empty() {
        return Some(Q::zero());
    }
    if t.is_syntactically_full() {
        return Some(Q::one());
    }
    let prof = Profile::of(t);
    if prof.period > MAX_TRACE_PERIOD {
        return None;
    }
    let mut value: Option<Q> = None;
    for r in 0..prof.period as u32 {
        let v = eval_level(level - 1, &t.trace_with(prof.threshold + r, FamilySubst::Empty))?;
        match &value {
            None => value = Some(v),
            // the per-block values oscillate: no limit
            Some(w) if *w != v => return None,
            Some(_) => {}
        }
    }
    value
}

/// Dyadic sets `Dyadic(k, S)` with `k ≤ max_k` used as the default generator family.
///
/// For each level: the singleton residues below 4, then `{0, 2^k - 1}` and the lower half.
pub fn dyadic_preset(max_k: u32) -> Vec<SetTerm> {
    let mut out = Vec::new();
    for k in 1..=max_k {
        let size = 1u64 << k;
        for r in 0..size.min(4) {
            out.push(SetTerm::dyadic(k, [r]));
        }
        if k >= 2 {
            out.push(SetTerm::dyadic(k, [0, size - 1]));
            out.push(SetTerm::dyadic(k, 0..size / 2 + 1));
        }
    }
    out
}

/// Lebesgue measure of the dyadic set a `Dyadic` term realizes.
pub fn lebesgue(m: &SetTerm) -> Option<Q> {
    match m {
        SetTerm::Dyadic { k, residues } => {
            Some(Q::ratio_u64(residues.len() as u64, 1) * Q::pow2_neg(*k))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natset::Family;

    fn mu(level: u32) -> LevelMeasure {
        LevelMeasure::new(level).unwrap()
    }

    #[test]
    fn preset_has_twenty_generators() {
        let g = dyadic_preset(4);
        assert_eq!(g.len(), 20);
        let distinct: std::collections::BTreeSet<_> = g.iter().map(|t| t.to_string()).collect();
        assert_eq!(distinct.len(), 20);
    }

    #[test]
    fn level_one_is_density() {
        assert_eq!(mu(1).eval(&SetTerm::dyadic(2, [0, 1])), Some(Q::new(1, 2)));
        assert_eq!(mu(1).eval(&SetTerm::finite(0..100)), Some(Q::zero()));
        assert_eq!(mu(1).eval(&SetTerm::full()), Some(Q::one()));
    }

    #[test]
    fn metric_isomorphism_on_generators() {
        for level in 1..=3 {
            for m in dyadic_preset(4) {
                let lifted = m.clone().tower_lift(level - 1);
                assert_eq!(mu(level).eval(&lifted), lebesgue(&m), "{m} at {level}");
            }
        }
    }

    #[test]
    fn blocks_are_null() {
        for m in 0..=32 {
            assert_eq!(mu(2).eval(&SetTerm::Block(m)), Some(Q::zero()));
            assert_eq!(mu(3).eval(&SetTerm::lift(m, SetTerm::full())), Some(Q::zero()));
        }
        assert_eq!(mu(2).eval(&SetTerm::blocks_below(10)), Some(Q::zero()));
    }

    #[test]
    fn vanishing_families() {
        // per-block values 1 - 1/(n+1) tend to 1
        let f = SetTerm::compl(SetTerm::Diagonal(Family::Multiples { offset: 0 }));
        assert_eq!(mu(2).eval(&f), Some(Q::one()));
        assert_eq!(mu(2).block_value(&f, 3), Some(Q::new(3, 4)));
        let v = SetTerm::Diagonal(Family::Multiples { offset: 0 });
        assert_eq!(mu(2).tail_sup_bound(&v, 4), Some(Q::new(1, 5)));
        // plain dyadic sets are not level-2 generators
        assert_eq!(mu(2).eval(&SetTerm::evens()), Some(Q::zero()));
        assert_eq!(mu(2).eval(&SetTerm::odds()), Some(Q::one()));
    }

    #[test]
    fn oscillating_traces_have_no_limit() {
        // the trace of the residue class alternates between {0} and {2} mod 3
        let r = SetTerm::residue(3, [0]);
        assert_eq!(mu(2).eval(&r), Some(Q::new(1, 3)));
        let t = SetTerm::inter(vec![r.clone(), SetTerm::diagonal_const(r)]);
        assert_eq!(mu(2).eval(&t), None);
        assert_eq!(mu(1).eval(&t), Some(Q::new(2, 9)));
    }

    #[test]
    fn singleton_blocks_at_level_one() {
        assert_eq!(mu(1).block_value(&SetTerm::finite([4]), 4), Some(Q::one()));
        assert_eq!(mu(1).tail_sup_bound(&SetTerm::finite([0, 1]), 2), Some(Q::zero()));
        assert_eq!(mu(1).tail_sup_bound(&SetTerm::finite([0, 1]), 1), Some(Q::one()));
    }
}
