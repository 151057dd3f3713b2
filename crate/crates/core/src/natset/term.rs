use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Q;

/// Largest residue-class modulus accepted by `Residue` terms.
pub const MAX_RESIDUE_MODULUS: u64 = 1 << 24;
/// Largest dyadic level accepted by `Dyadic` terms.
pub const MAX_DYADIC_LEVEL: u32 = 120;

/// Block index and position of `x`: `x + 1 = 2^n (2i + 1)`.
pub fn block_of(x: u64) -> (u32, u64) {
    let y = x as u128 + 1;
    let n = y.trailing_zeros();
    (n, (y >> (n + 1)) as u64)
}

/// The `i`-th element of block `n`, if it fits in a `u64`.
pub fn block_point(n: u32, i: u64) -> Option<u64> {
    if n >= 64 {
        return None;
    }
    let y = (1u128 << n).checked_mul(2 * i as u128 + 1)?;
    u64::try_from(y - 1).ok()
}

/// Number of indices `i` with `block_point(n, i) < len`.
pub fn block_prefix_len(n: u32, len: u64) -> u64 {
    if n >= 64 {
        return 0;
    }
    ((len >> n) + 1) / 2
}

/// A point of ℕ addressed through nested blocks.
///
/// `path = [m0, m1, ..]` with `index = i` denotes `x^{m0}_{x^{m1}_{..i}}`.
/// Points that fit in a `u64` are kept with an empty path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Plain(u64),
    Addressed { path: Vec<u32>, index: u64 },
}

impl Point {
    pub fn new(path: Vec<u32>, index: u64) -> Point {
        let mut path = path;
        let mut index = index;
        while let Some(&last) = path.last() {
            match block_point(last, index) {
                Some(x) => {
                    index = x;
                    path.pop();
                }
                None => break,
            }
        }
        if path.is_empty() {
            Point::Plain(index)
        } else {
            Point::Addressed { path, index }
        }
    }

    /// The image of this point under the lift into block `n`.
    pub fn push_into(&self, n: u32) -> Point {
        let (path, index) = self.parts();
        let mut p = Vec::with_capacity(path.len() + 1);
        p.push(n);
        p.extend_from_slice(path);
        Point::new(p, index)
    }

    pub fn parts(&self) -> (&[u32], u64) {
        match self {
            Point::Plain(x) => (&[], *x),
            Point::Addressed { path, index } => (path, *index),
        }
    }

    /// Outermost block containing the point, with the remaining address inside it.
    pub fn split_block(&self) -> (u32, Point) {
        match self {
            Point::Plain(x) => {
                let (n, i) = block_of(*x);
                (n, Point::Plain(i))
            }
            Point::Addressed { path, index } => {
                (path[0], Point::new(path[1..].to_vec(), *index))
            }
        }
    }

    /// The singleton `{self}` as a term.
    pub fn to_term(&self) -> SetTerm {
        let (path, index) = self.parts();
        path.iter()
            .rev()
            .fold(SetTerm::finite([index]), |t, &n| SetTerm::lift(n, t))
    }

    pub fn as_plain(&self) -> Option<u64> {
        match self {
            Point::Plain(x) => Some(*x),
            Point::Addressed { .. } => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Plain(x) => write!(f, "{x}"),
            Point::Addressed { path, index } => {
                for n in path {
                    write!(f, "B{n}:")?;
                }
                write!(f, "{index}")
            }
        }
    }
}

/// A per-block family of index sets, used by [`SetTerm::Diagonal`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// The same set in every block.
    Const { inner: Box<SetTerm> },
    /// Explicit sets for the first blocks, then `tail` in every later block.
    Listed { head: Vec<SetTerm>, tail: Box<SetTerm> },
    /// Block `n` carries the multiples of `n + 1 + offset`.
    Multiples { offset: u64 },
    /// Block `n` carries the multiples of `2^(n + 1 + offset)`.
    Pow2Multiples { offset: u32 },
}

impl Family {
    pub fn member(&self, n: u32) -> SetTerm {
        match self {
            Family::Const { inner } => (**inner).clone(),
            Family::Listed { head, tail } => match head.get(n as usize) {
                Some(t) => t.clone(),
                None => (**tail).clone(),
            },
            Family::Multiples { offset } => SetTerm::Residue {
                m: n as u64 + 1 + offset,
                residues: BTreeSet::from([0]),
            },
            Family::Pow2Multiples { offset } => SetTerm::Dyadic {
                k: (n + 1 + offset).min(MAX_DYADIC_LEVEL),
                residues: BTreeSet::from([0]),
            },
        }
    }

    /// Families whose members shrink to measure zero at every tower level.
    pub fn is_vanishing(&self) -> bool {
        matches!(self, Family::Multiples { .. } | Family::Pow2Multiples { .. })
    }

    /// Upper bound on the tower measure of `member(n)`, non-increasing in `n`.
    pub fn vanishing_bound(&self, n: u32) -> Option<Q> {
        match self {
            Family::Multiples { offset } => Some(Q::ratio_u64(1, n as u64 + 1 + offset)),
            Family::Pow2Multiples { offset } => Some(Q::pow2_neg(n + 1 + offset)),
            _ => None,
        }
    }

    /// Block index from which `member` no longer depends on the head list.
    pub fn threshold(&self) -> u32 {
        match self {
            Family::Listed { head, .. } => head.len() as u32,
            _ => 0,
        }
    }
}

/// A symbolic computable subset of ℕ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "repr::Repr", try_from = "repr::Repr")]
pub enum SetTerm {
    Finite(BTreeSet<u64>),
    /// `{x : x mod 2^k ∈ residues}`.
    Dyadic { k: u32, residues: BTreeSet<u64> },
    /// `{x : x mod m ∈ residues}`.
    Residue { m: u64, residues: BTreeSet<u64> },
    Block(u32),
    /// `{x^n_i : i ∈ inner}`.
    Lift(u32, Box<SetTerm>),
    /// `⋃_n Lift(n, family(n))`.
    Diagonal(Family),
    Union(Vec<SetTerm>),
    Inter(Vec<SetTerm>),
    /// First argument minus all the others.
    Diff(Vec<SetTerm>),
    Compl(Box<SetTerm>),
}

/// What to put in place of vanishing families when taking generic block traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySubst {
    Actual,
    Empty,
    Full,
}

impl SetTerm {
    pub fn empty() -> SetTerm {
        SetTerm::Finite(BTreeSet::new())
    }

    pub fn full() -> SetTerm {
        SetTerm::Compl(Box::new(SetTerm::empty()))
    }

    pub fn finite<I: IntoIterator<Item = u64>>(elems: I) -> SetTerm {
        SetTerm::Finite(elems.into_iter().collect())
    }

    pub fn dyadic<I: IntoIterator<Item = u64>>(k: u32, residues: I) -> SetTerm {
        SetTerm::Dyadic { k, residues: residues.into_iter().collect() }
    }

    pub fn residue<I: IntoIterator<Item = u64>>(m: u64, residues: I) -> SetTerm {
        SetTerm::Residue { m, residues: residues.into_iter().collect() }
    }

    pub fn evens() -> SetTerm {
        SetTerm::dyadic(1, [0])
    }

    pub fn odds() -> SetTerm {
        SetTerm::dyadic(1, [1])
    }

    pub fn lift(n: u32, inner: SetTerm) -> SetTerm {
        SetTerm::Lift(n, Box::new(inner))
    }

    pub fn diagonal_const(inner: SetTerm) -> SetTerm {
        SetTerm::Diagonal(Family::Const { inner: Box::new(inner) })
    }

    /// `depth`-fold uniform lift through the tower: the image of a level-1
    /// term in the level-`depth + 1` algebra.
    pub fn tower_lift(self, depth: u32) -> SetTerm {
        (0..depth).fold(self, |t, _| SetTerm::diagonal_const(t))
    }

    pub fn blocks_below(n: u32) -> SetTerm {
        SetTerm::union((0..n).map(SetTerm::Block).collect())
    }

    pub fn is_syntactically_empty(&self) -> bool {
        matches!(self, SetTerm::Finite(s) if s.is_empty())
    }

    pub fn is_syntactically_full(&self) -> bool {
        matches!(self, SetTerm::Compl(inner) if inner.is_syntactically_empty())
    }

    /// Union with trivial simplifications.
    pub fn union(args: Vec<SetTerm>) -> SetTerm {
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            if a.is_syntactically_full() {
                return SetTerm::full();
            }
            if !a.is_syntactically_empty() {
                out.push(a);
            }
        }
        match out.len() {
            0 => SetTerm::empty(),
            1 => out.pop().unwrap(),
            _ => SetTerm::Union(out),
        }
    }

    pub fn inter(args: Vec<SetTerm>) -> SetTerm {
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            if a.is_syntactically_empty() {
                return SetTerm::empty();
            }
            if !a.is_syntactically_full() {
                out.push(a);
            }
        }
        match out.len() {
            0 => SetTerm::full(),
            1 => out.pop().unwrap(),
            _ => SetTerm::Inter(out),
        }
    }

    pub fn diff(args: Vec<SetTerm>) -> SetTerm {
        let mut it = args.into_iter();
        let Some(first) = it.next() else {
            return SetTerm::empty();
        };
        if first.is_syntactically_empty() {
            return SetTerm::empty();
        }
        let mut out = vec![first];
        for a in it {
            if a.is_syntactically_full() {
                return SetTerm::empty();
            }
            if !a.is_syntactically_empty() {
                out.push(a);
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            SetTerm::Diff(out)
        }
    }

    pub fn compl(arg: SetTerm) -> SetTerm {
        match arg {
            SetTerm::Compl(inner) => *inner,
            other => SetTerm::Compl(Box::new(other)),
        }
    }

    pub fn member(&self, x: u64) -> bool {
        match self {
            SetTerm::Finite(s) => s.contains(&x),
            SetTerm::Dyadic { k, residues } => {
                let r = if *k >= 64 { x } else { x & ((1u64 << k) - 1) };
                residues.contains(&r)
            }
            SetTerm::Residue { m, residues } => residues.contains(&(x % m)),
            SetTerm::Block(n) => block_of(x).0 == *n,
            SetTerm::Lift(n, inner) => {
                let (b, i) = block_of(x);
                b == *n && inner.member(i)
            }
            SetTerm::Diagonal(fam) => {
                let (b, i) = block_of(x);
                fam.member(b).member(i)
            }
            SetTerm::Union(a) => a.iter().any(|t| t.member(x)),
            SetTerm::Inter(a) => a.iter().all(|t| t.member(x)),
            SetTerm::Diff(a) => match a.split_first() {
                Some((first, rest)) => first.member(x) && !rest.iter().any(|t| t.member(x)),
                None => false,
            },
            SetTerm::Compl(inner) => !inner.member(x),
        }
    }

    pub fn member_point(&self, p: &Point) -> bool {
        match p {
            Point::Plain(x) => self.member(*x),
            Point::Addressed { path, index } => {
                let mut t = self.trace(path[0]);
                for &n in &path[1..] {
                    t = t.trace(n);
                }
                t.member(*index)
            }
        }
    }

    /// `{i : x^n_i ∈ self}`.
    pub fn trace(&self, n: u32) -> SetTerm {
        self.trace_with(n, FamilySubst::Actual)
    }

    /// Block trace where vanishing families are replaced according to `subst`.
    pub fn trace_with(&self, n: u32, subst: FamilySubst) -> SetTerm {
        match self {
            SetTerm::Finite(s) => SetTerm::Finite(
                s.iter()
                    .map(|&x| block_of(x))
                    .filter(|&(b, _)| b == n)
                    .map(|(_, i)| i)
                    .collect(),
            ),
            SetTerm::Dyadic { k, residues } => {
                if n >= *k {
                    let top = (1u128 << *k) - 1;
                    if top <= u64::MAX as u128 && residues.contains(&(top as u64)) {
                        SetTerm::full()
                    } else {
                        SetTerm::empty()
                    }
                } else {
                    let inner: BTreeSet<u64> = residues
                        .iter()
                        .map(|&s| block_of(s))
                        .filter(|&(b, _)| b == n)
                        .map(|(_, i)| i)
                        .collect();
                    SetTerm::Dyadic { k: k - n - 1, residues: inner }
                }
            }
            SetTerm::Residue { m, residues } => {
                let m = *m;
                // x^n_i mod m = (2^{n+1} i + 2^n - 1) mod m
                let p = pow2_mod(n, m) as u128;
                let step = (2 * p) % m as u128;
                let base = (p + m as u128 - 1) % m as u128;
                let inner: BTreeSet<u64> = (0..m)
                    .filter(|&i| {
                        let r = (base + step * i as u128) % m as u128;
                        residues.contains(&(r as u64))
                    })
                    .collect();
                if inner.is_empty() {
                    SetTerm::empty()
                } else if inner.len() as u64 == m {
                    SetTerm::full()
                } else {
                    SetTerm::Residue { m, residues: inner }
                }
            }
            SetTerm::Block(b) => {
                if *b == n {
                    SetTerm::full()
                } else {
                    SetTerm::empty()
                }
            }
            SetTerm::Lift(b, inner) => {
                if *b == n {
                    (**inner).clone()
                } else {
                    SetTerm::empty()
                }
            }
            SetTerm::Diagonal(fam) => {
                if fam.is_vanishing() {
                    match subst {
                        FamilySubst::Actual => fam.member(n),
                        FamilySubst::Empty => SetTerm::empty(),
                        FamilySubst::Full => SetTerm::full(),
                    }
                } else {
                    fam.member(n)
                }
            }
            SetTerm::Union(a) => SetTerm::union(a.iter().map(|t| t.trace_with(n, subst)).collect()),
            SetTerm::Inter(a) => SetTerm::inter(a.iter().map(|t| t.trace_with(n, subst)).collect()),
            SetTerm::Diff(a) => SetTerm::diff(a.iter().map(|t| t.trace_with(n, subst)).collect()),
            SetTerm::Compl(inner) => SetTerm::compl(inner.trace_with(n, subst)),
        }
    }

    pub fn has_diagonal(&self) -> bool {
        match self {
            SetTerm::Diagonal(_) => true,
            SetTerm::Lift(_, inner) | SetTerm::Compl(inner) => inner.has_diagonal(),
            SetTerm::Union(a) | SetTerm::Inter(a) | SetTerm::Diff(a) => {
                a.iter().any(|t| t.has_diagonal())
            }
            _ => false,
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            SetTerm::Lift(_, inner) | SetTerm::Compl(inner) => 1 + inner.size(),
            SetTerm::Union(a) | SetTerm::Inter(a) | SetTerm::Diff(a) => {
                1 + a.iter().map(|t| t.size()).sum::<usize>()
            }
            SetTerm::Diagonal(Family::Const { inner }) => 1 + inner.size(),
            SetTerm::Diagonal(Family::Listed { head, tail }) => {
                1 + tail.size() + head.iter().map(|t| t.size()).sum::<usize>()
            }
            _ => 1,
        }
    }

    /// Structural well-formedness: moduli and levels in range, residues reduced.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            SetTerm::Finite(_) | SetTerm::Block(_) => Ok(()),
            SetTerm::Dyadic { k, residues } => {
                if *k > MAX_DYADIC_LEVEL {
                    return Err(format!("dyadic level {k} exceeds {MAX_DYADIC_LEVEL}"));
                }
                if *k < 64 {
                    if let Some(r) = residues.iter().find(|&&r| r >> k != 0) {
                        return Err(format!("residue {r} out of range for level {k}"));
                    }
                }
                Ok(())
            }
            SetTerm::Residue { m, residues } => {
                if *m == 0 || *m > MAX_RESIDUE_MODULUS {
                    return Err(format!("residue modulus {m} out of range"));
                }
                if let Some(r) = residues.iter().find(|&&r| r >= *m) {
                    return Err(format!("residue {r} not reduced modulo {m}"));
                }
                Ok(())
            }
            SetTerm::Lift(_, inner) | SetTerm::Compl(inner) => inner.validate(),
            SetTerm::Diagonal(fam) => match fam {
                Family::Const { inner } => inner.validate(),
                Family::Listed { head, tail } => {
                    head.iter().try_for_each(|t| t.validate())?;
                    tail.validate()
                }
                Family::Multiples { offset } => {
                    if *offset > MAX_RESIDUE_MODULUS {
                        Err(format!("multiples offset {offset} too large"))
                    } else {
                        Ok(())
                    }
                }
                Family::Pow2Multiples { .. } => Ok(()),
            },
            SetTerm::Union(a) | SetTerm::Inter(a) | SetTerm::Diff(a) => {
                a.iter().try_for_each(|t| t.validate())
            }
        }
    }
}

pub(crate) fn pow2_mod(n: u32, m: u64) -> u64 {
    let m = m as u128;
    let mut result = 1u128 % m;
    let mut base = 2u128 % m;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    result as u64
}

/// Multiplicative order of 2 modulo an odd `b` (1 for `b = 1`).
pub(crate) fn order_of_two(b: u64) -> u64 {
    if b == 1 {
        return 1;
    }
    let mut x = 2 % b;
    let mut k = 1;
    while x != 1 {
        x = ((x as u128 * 2) % b as u128) as u64;
        k += 1;
    }
    k
}

impl fmt::Display for SetTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, name: &str, a: &[SetTerm]) -> fmt::Result {
            write!(f, "{name}(")?;
            for (i, t) in a.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, ")")
        }
        match self {
            SetTerm::Finite(s) if s.is_empty() => write!(f, "∅"),
            SetTerm::Finite(s) => write!(f, "{s:?}"),
            SetTerm::Dyadic { k, residues } => write!(f, "D{k}{residues:?}"),
            SetTerm::Residue { m, residues } => write!(f, "R{m}{residues:?}"),
            SetTerm::Block(n) => write!(f, "B{n}"),
            SetTerm::Lift(n, inner) => write!(f, "Lift{n}({inner})"),
            SetTerm::Diagonal(Family::Const { inner }) => write!(f, "Diag({inner})"),
            SetTerm::Diagonal(Family::Listed { head, tail }) => {
                write!(f, "Diag[{} listed; {tail}]", head.len())
            }
            SetTerm::Diagonal(Family::Multiples { offset }) => write!(f, "Diag(mult+{offset})"),
            SetTerm::Diagonal(Family::Pow2Multiples { offset }) => write!(f, "Diag(pow2+{offset})"),
            SetTerm::Union(a) => list(f, "∪", a),
            SetTerm::Inter(a) => list(f, "∩", a),
            SetTerm::Diff(a) => list(f, "∖", a),
            SetTerm::Compl(inner) if inner.is_syntactically_empty() => write!(f, "ℕ"),
            SetTerm::Compl(inner) => write!(f, "¬{inner}"),
        }
    }
}

mod repr {
    use std::collections::BTreeSet;

    use serde::{Deserialize, Serialize};

    use super::{Family, SetTerm};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub enum Repr {
        Gen(Gen),
        Op(Op),
    }

    #[derive(Serialize, Deserialize)]
    #[serde(tag = "gen", rename_all = "lowercase", deny_unknown_fields)]
    pub enum Gen {
        Finite { elems: Vec<u64> },
        Dyadic { k: u32, residues: Vec<u64> },
        Residue { m: u64, residues: Vec<u64> },
        Block { n: u32 },
        Lift { n: u32, inner: Box<SetTerm> },
        Diag { family: Family },
    }

    #[derive(Serialize, Deserialize)]
    #[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
    pub enum Op {
        Union { args: Vec<SetTerm> },
        Inter { args: Vec<SetTerm> },
        Diff { args: Vec<SetTerm> },
        Compl { arg: Box<SetTerm> },
    }

    impl From<SetTerm> for Repr {
        fn from(t: SetTerm) -> Repr {
            match t {
                SetTerm::Finite(s) => Repr::Gen(Gen::Finite { elems: s.into_iter().collect() }),
                SetTerm::Dyadic { k, residues } => {
                    Repr::Gen(Gen::Dyadic { k, residues: residues.into_iter().collect() })
                }
                SetTerm::Residue { m, residues } => {
                    Repr::Gen(Gen::Residue { m, residues: residues.into_iter().collect() })
                }
                SetTerm::Block(n) => Repr::Gen(Gen::Block { n }),
                SetTerm::Lift(n, inner) => Repr::Gen(Gen::Lift { n, inner }),
                SetTerm::Diagonal(family) => Repr::Gen(Gen::Diag { family }),
                SetTerm::Union(args) => Repr::Op(Op::Union { args }),
                SetTerm::Inter(args) => Repr::Op(Op::Inter { args }),
                SetTerm::Diff(args) => Repr::Op(Op::Diff { args }),
                SetTerm::Compl(arg) => Repr::Op(Op::Compl { arg }),
            }
        }
    }

    impl TryFrom<Repr> for SetTerm {
        type Error = String;

        fn try_from(r: Repr) -> Result<SetTerm, String> {
            let t = match r {
                Repr::Gen(Gen::Finite { elems }) => SetTerm::Finite(elems.into_iter().collect()),
                Repr::Gen(Gen::Dyadic { k, residues }) => SetTerm::Dyadic {
                    k,
                    residues: residues.into_iter().collect::<BTreeSet<_>>(),
                },
                Repr::Gen(Gen::Residue { m, residues }) => SetTerm::Residue {
                    m,
                    residues: residues.into_iter().collect::<BTreeSet<_>>(),
                },
                Repr::Gen(Gen::Block { n }) => SetTerm::Block(n),
                Repr::Gen(Gen::Lift { n, inner }) => SetTerm::Lift(n, inner),
                Repr::Gen(Gen::Diag { family }) => SetTerm::Diagonal(family),
                Repr::Op(Op::Union { args }) => SetTerm::Union(args),
                Repr::Op(Op::Inter { args }) => SetTerm::Inter(args),
                Repr::Op(Op::Diff { args }) => SetTerm::Diff(args),
                Repr::Op(Op::Compl { arg }) => SetTerm::Compl(arg),
            };
            t.validate()?;
            Ok(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_encoding_examples() {
        assert_eq!(block_of(0), (0, 0));
        assert_eq!(block_of(1), (1, 0));
        assert_eq!(block_of(5), (1, 1));
        assert_eq!(block_point(1, 2), Some(9));
        assert_eq!(block_point(63, 0), Some(u64::MAX >> 1));
        assert_eq!(block_point(63, 1), None);
        for x in 0..5000u64 {
            let (n, i) = block_of(x);
            assert_eq!(block_point(n, i), Some(x));
        }
    }

    #[test]
    fn block_prefix_len_counts() {
        for n in 0..8 {
            for len in 0..300u64 {
                let brute = (0..len).filter(|&x| block_of(x).0 == n).count() as u64;
                assert_eq!(block_prefix_len(n, len), brute, "n={n} len={len}");
            }
        }
    }

    #[test]
    fn member_examples() {
        assert!(SetTerm::dyadic(1, [0]).member(4));
        assert!(!SetTerm::compl(SetTerm::finite([1, 2])).member(2));
        assert!(SetTerm::Block(0).member(0));
        assert!(SetTerm::Block(1).member(5));
        assert!(!SetTerm::Block(1).member(3));
    }

    #[test]
    fn trace_examples() {
        let evens = SetTerm::evens();
        assert_eq!(SetTerm::lift(3, evens.clone()).trace(3), evens);
        assert!(SetTerm::Block(3).trace(3).is_syntactically_full());
        assert!(SetTerm::Block(2).trace(3).is_syntactically_empty());
    }

    #[test]
    fn trace_matches_membership() {
        let terms = vec![
            SetTerm::dyadic(4, [1, 3, 7, 15]),
            SetTerm::residue(12, [0, 5, 11]),
            SetTerm::finite([0, 1, 2, 5, 9, 100, 1023]),
            SetTerm::diagonal_const(SetTerm::dyadic(2, [1])),
            SetTerm::Diagonal(Family::Multiples { offset: 0 }),
            SetTerm::Diagonal(Family::Pow2Multiples { offset: 1 }),
            SetTerm::compl(SetTerm::union(vec![SetTerm::Block(2), SetTerm::evens()])),
        ];
        for t in &terms {
            for n in 0..6 {
                let tr = t.trace(n);
                for i in 0..200 {
                    let x = block_point(n, i).unwrap();
                    assert_eq!(tr.member(i), t.member(x), "{t} n={n} i={i}");
                }
            }
        }
    }

    #[test]
    fn addressed_points() {
        let p = Point::new(vec![70, 1], 2);
        assert_eq!(p, Point::Addressed { path: vec![70], index: 9 });
        assert_eq!(Point::new(vec![1, 1], 0), Point::Plain(block_point(1, 1).unwrap()));
        let t = SetTerm::diagonal_const(SetTerm::dyadic(2, [1]));
        assert!(t.member_point(&p));
        assert_eq!(p.split_block(), (70, Point::Plain(9)));
    }

    #[test]
    fn json_grammar() {
        let t = SetTerm::Union(vec![
            SetTerm::finite([1, 2]),
            SetTerm::Compl(Box::new(SetTerm::dyadic(2, [0, 3]))),
            SetTerm::lift(1, SetTerm::Block(0)),
        ]);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(
            s,
            r#"{"op":"union","args":[{"gen":"finite","elems":[1,2]},{"op":"compl","arg":{"gen":"dyadic","k":2,"residues":[0,3]}},{"gen":"lift","n":1,"inner":{"gen":"block","n":0}}]}"#
        );
        let back: SetTerm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<SetTerm>(r#"{"gen":"dyadic","k":1,"residues":[2]}"#).is_err());
        assert!(serde_json::from_str::<SetTerm>(r#"{"gen":"nope"}"#).is_err());
    }
}
