//! Eventually-periodic normal form for terms without diagonal families.
//!
//! Every such term denotes a set that agrees with a periodic pattern
//! except at finitely many points. The normal form stores the pattern
//! (`period`, `bits`) and the exceptional points (`flips`), which gives
//! exact density, exact emptiness and exact prefix counts.

use std::collections::BTreeSet;

use num_integer::Integer;

use super::term::{block_point, SetTerm};
use crate::rational::Q;

/// Default cap on the period of a normal form.
pub const DEFAULT_MAX_PERIOD: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicNf {
    period: u64,
    bits: Vec<bool>,
    flips: BTreeSet<u64>,
}

impl PeriodicNf {
    /// `None` when the term has a diagonal family or the period exceeds `max_period`.
    pub fn build(t: &SetTerm, max_period: u64) -> Option<PeriodicNf> {
        match t {
            SetTerm::Finite(s) => Some(PeriodicNf { period: 1, bits: vec![false], flips: s.clone() }),
            SetTerm::Dyadic { k, residues } => {
                if *k >= 63 || (1u64 << k) > max_period {
                    return None;
                }
                let p = 1u64 << k;
                let mut bits = vec![false; p as usize];
                for &r in residues {
                    bits[r as usize] = true;
                }
                Some(PeriodicNf { period: p, bits, flips: BTreeSet::new() })
            }
            SetTerm::Residue { m, residues } => {
                if *m > max_period {
                    return None;
                }
                let mut bits = vec![false; *m as usize];
                for &r in residues {
                    bits[r as usize] = true;
                }
                Some(PeriodicNf { period: *m, bits, flips: BTreeSet::new() })
            }
            SetTerm::Block(n) => {
                if *n >= 62 || (2u64 << n) > max_period {
                    return None;
                }
                let p = 2u64 << n;
                let mut bits = vec![false; p as usize];
                bits[((1u64 << n) - 1) as usize] = true;
                Some(PeriodicNf { period: p, bits, flips: BTreeSet::new() })
            }
            SetTerm::Lift(n, inner) => {
                let inner = PeriodicNf::build(inner, max_period)?;
                if !inner.bits.iter().any(|&b| b) {
                    let flips: Option<BTreeSet<u64>> =
                        inner.flips.iter().map(|&i| block_point(*n, i)).collect();
                    return Some(PeriodicNf { period: 1, bits: vec![false], flips: flips? });
                }
                if *n >= 62 {
                    return None;
                }
                let scale = 2u64 << n;
                let p = scale.checked_mul(inner.period).filter(|&p| p <= max_period)?;
                let mut bits = vec![false; p as usize];
                let offset = (1u64 << n) - 1;
                for r in 0..inner.period {
                    if inner.bits[r as usize] {
                        bits[(scale * r + offset) as usize] = true;
                    }
                }
                let flips: Option<BTreeSet<u64>> =
                    inner.flips.iter().map(|&i| block_point(*n, i)).collect();
                Some(PeriodicNf { period: p, bits, flips: flips? })
            }
            SetTerm::Diagonal(_) => None,
            SetTerm::Compl(inner) => {
                let mut nf = PeriodicNf::build(inner, max_period)?;
                nf.bits.iter_mut().for_each(|b| *b = !*b);
                Some(nf)
            }
            SetTerm::Union(a) => combine(a, max_period, false, |acc, x| acc || x),
            SetTerm::Inter(a) => combine(a, max_period, true, |acc, x| acc && x),
            SetTerm::Diff(a) => {
                let (first, rest) = a.split_first()?;
                let first = PeriodicNf::build(first, max_period)?;
                let rest = combine(rest, max_period, false, |acc, x| acc || x)?;
                first.binary(&rest, max_period, |x, y| x && !y)
            }
        }
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn exceptional_points(&self) -> usize {
        self.flips.len()
    }

    pub fn member(&self, x: u64) -> bool {
        self.bits[(x % self.period) as usize] ^ self.flips.contains(&x)
    }

    pub fn density(&self) -> Q {
        let pop = self.bits.iter().filter(|&&b| b).count() as u64;
        Q::ratio_u64(pop, self.period)
    }

    pub fn is_empty(&self) -> bool {
        // a set pattern bit means infinitely many members; flips on clear bits are members
        !self.bits.iter().any(|&b| b) && self.flips.is_empty()
    }

    /// `|{x < len : x ∈ self}|`.
    pub fn count_below(&self, len: u64) -> u64 {
        let pop = self.bits.iter().filter(|&&b| b).count() as u64;
        let full = len / self.period;
        let rem = len % self.period;
        let partial = self.bits[..rem as usize].iter().filter(|&&b| b).count() as u64;
        let mut count = full * pop + partial;
        for &x in self.flips.range(..len) {
            if self.bits[(x % self.period) as usize] {
                count -= 1;
            } else {
                count += 1;
            }
        }
        count
    }

    fn binary(
        &self,
        other: &PeriodicNf,
        max_period: u64,
        op: impl Fn(bool, bool) -> bool,
    ) -> Option<PeriodicNf> {
        let p = self.period.lcm(&other.period);
        if p > max_period {
            return None;
        }
        let bits: Vec<bool> = (0..p)
            .map(|r| {
                op(
                    self.bits[(r % self.period) as usize],
                    other.bits[(r % other.period) as usize],
                )
            })
            .collect();
        let flips = self
            .flips
            .union(&other.flips)
            .copied()
            .filter(|&x| op(self.member(x), other.member(x)) != bits[(x % p) as usize])
            .collect();
        Some(PeriodicNf { period: p, bits, flips })
    }
}

fn combine(
    args: &[SetTerm],
    max_period: u64,
    unit: bool,
    op: impl Fn(bool, bool) -> bool + Copy,
) -> Option<PeriodicNf> {
    let mut acc = PeriodicNf { period: 1, bits: vec![unit], flips: BTreeSet::new() };
    for a in args {
        let nf = PeriodicNf::build(a, max_period)?;
        acc = acc.binary(&nf, max_period, op)?;
    }
    Some(acc)
}
