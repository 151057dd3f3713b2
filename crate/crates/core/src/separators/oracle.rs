use std::collections::BTreeSet;

use crate::measure::{LevelMeasure, Measure};
use crate::natset::SetTerm;
use crate::rational::Q;

/// Finds, inside one block, a large set that the given measures barely see.
pub trait BlockOracle: Send + Sync {
    fn name(&self) -> &'static str;

    /// A set `a` in the coordinates of block `n` with `μ′(a) > 1 − eps` and
    /// `λ(a^n) < eps_prime` for every `λ`, where `μ′` is the block measure of
    /// `target`.
    fn separate(
        &self,
        target: &LevelMeasure,
        n: u32,
        lambdas: &[&Measure],
        eps: &Q,
        eps_prime: &Q,
    ) -> Option<SetTerm>;
}

/// Removes the heaviest dyadic cells `φ(Dyadic(k, {r}))` until every `λ` is small.
#[derive(Debug, Clone, Copy)]
pub struct DyadicCellOracle {
    pub max_k: u32,
}

impl Default for DyadicCellOracle {
    fn default() -> Self {
        DyadicCellOracle { max_k: 12 }
    }
}

impl DyadicCellOracle {
    fn try_level(
        &self,
        depth: u32,
        n: u32,
        k: u32,
        lambdas: &[&Measure],
        eps_prime: &Q,
    ) -> Option<BTreeSet<u64>> {
        let cells = 1u64 << k;
        let mut removed = BTreeSet::new();
        for lambda in lambdas {
            let mut remaining = lambda.eval(&SetTerm::Block(n))?;
            let mut masses = Vec::new();
            for r in 0..cells {
                let cell = SetTerm::lift(n, SetTerm::dyadic(k, [r]).tower_lift(depth));
                let m = lambda.eval(&cell)?;
                if removed.contains(&r) {
                    remaining = remaining - &m;
                } else if m.is_positive() {
                    masses.push((m, r));
                }
            }
            masses.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            let mut it = masses.into_iter();
            while remaining >= *eps_prime {
                let (m, r) = it.next()?;
                remaining = remaining - m;
                removed.insert(r);
            }
        }
        Some(removed)
    }
}

impl BlockOracle for DyadicCellOracle {
    fn name(&self) -> &'static str {
        "dyadic-cells"
    }

    fn separate(
        &self,
        target: &LevelMeasure,
        n: u32,
        lambdas: &[&Measure],
        eps: &Q,
        eps_prime: &Q,
    ) -> Option<SetTerm> {
        let below = target.block_measure()?;
        let depth = below.level() - 1;
        let quiet = lambdas
            .iter()
            .all(|l| l.eval(&SetTerm::Block(n)).is_some_and(|m| m < *eps_prime));
        if quiet {
            return Some(SetTerm::full());
        }
        for k in 1..=self.max_k {
            let Some(removed) = self.try_level(depth, n, k, lambdas, eps_prime) else {
                continue;
            };
            if Q::ratio_u64(removed.len() as u64, 1u64 << k) >= *eps {
                continue;
            }
            let kept = (0..1u64 << k).filter(|r| !removed.contains(r));
            let a = SetTerm::dyadic(k, kept).tower_lift(depth);
            let large = below.eval(&a).is_some_and(|v| v > Q::one() - eps);
            let small = lambdas
                .iter()
                .all(|l| l.eval(&SetTerm::lift(n, a.clone())).is_some_and(|v| v < *eps_prime));
            if large && small {
                return Some(a);
            }
        }
        None
    }
}
