//! Asymptotic density: exact values on the decidable class, Cesàro estimates
//! with error bounds, prefix enumeration and emptiness decisions.
//!
//! Terms without diagonal families go through [`PeriodicNf`]. Terms with
//! diagonal families are split block by block: the density of `t` is
//! `Σ_n 2^-(n+1) d(trace(t, n))`, and beyond the term's [`Profile`]
//! threshold the traces repeat with the profile period, which turns the
//! infinite tail into a geometric series.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::normal_form::{PeriodicNf, DEFAULT_MAX_PERIOD};
use super::term::{block_of, block_point, block_prefix_len, order_of_two, Family, FamilySubst, SetTerm};
use crate::error::{Error, Result};
use crate::rational::Q;

/// Default cap on prefix lengths.
pub const DEFAULT_MAX_PREFIX: u64 = 1 << 20;
/// Largest block-trace period the evaluators will unroll.
pub const MAX_TRACE_PERIOD: u64 = 4096;
/// Largest number of distinct vanishing families handled in one term.
const MAX_FAMILIES: usize = 6;

/// Eventual behaviour of `n ↦ trace(t, n)`.
///
/// For `n ≥ threshold` the trace, with every vanishing family replaced by a
/// fixed set, depends only on `n mod period`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub threshold: u32,
    pub period: u64,
    pub families: Vec<Family>,
}

impl Profile {
    pub fn of(t: &SetTerm) -> Profile {
        match t {
            SetTerm::Finite(s) => Profile {
                threshold: s.iter().map(|&x| block_of(x).0 + 1).max().unwrap_or(0),
                period: 1,
                families: vec![],
            },
            SetTerm::Dyadic { k, .. } => Profile { threshold: *k, period: 1, families: vec![] },
            SetTerm::Residue { m, .. } => {
                let a = m.trailing_zeros();
                Profile { threshold: a, period: order_of_two(m >> a), families: vec![] }
            }
            SetTerm::Block(n) | SetTerm::Lift(n, _) => {
                Profile { threshold: n + 1, period: 1, families: vec![] }
            }
            SetTerm::Diagonal(fam) => Profile {
                threshold: fam.threshold(),
                period: 1,
                families: if fam.is_vanishing() { vec![fam.clone()] } else { vec![] },
            },
            SetTerm::Compl(inner) => Profile::of(inner),
            SetTerm::Union(a) | SetTerm::Inter(a) | SetTerm::Diff(a) => {
                let mut p = Profile { threshold: 0, period: 1, families: vec![] };
                for t in a {
                    let q = Profile::of(t);
                    p.threshold = p.threshold.max(q.threshold);
                    p.period = p.period.lcm(&q.period);
                    for f in q.families {
                        if !p.families.contains(&f) {
                            p.families.push(f);
                        }
                    }
                }
                p
            }
        }
    }

    /// Sum of the vanishing-family bounds at block `n`.
    pub fn family_bound(&self, n: u32) -> Q {
        self.families.iter().filter_map(|f| f.vanishing_bound(n)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityKind {
    Exact,
    Estimate,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    pub kind: DensityKind,
    pub value: Q,
    pub prefix_length: Option<u64>,
    pub error_bound: Option<Q>,
}

impl DensityReport {
    pub fn exact(value: Q) -> DensityReport {
        DensityReport { kind: DensityKind::Exact, value, prefix_length: None, error_bound: None }
    }

    pub fn unknown() -> DensityReport {
        DensityReport {
            kind: DensityKind::Unknown,
            value: Q::zero(),
            prefix_length: None,
            error_bound: None,
        }
    }

    pub fn exact_value(&self) -> Option<&Q> {
        (self.kind == DensityKind::Exact).then_some(&self.value)
    }
}

impl std::fmt::Display for DensityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            DensityKind::Exact => write!(f, "exact {}", self.value),
            DensityKind::Unknown => write!(f, "unknown"),
            DensityKind::Estimate => {
                write!(f, "estimate {} N={}", self.value, self.prefix_length.unwrap_or(0))?;
                match &self.error_bound {
                    Some(b) => write!(f, " bound={b}"),
                    None => write!(f, " bound=none"),
                }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ReportRepr {
    kind: DensityKind,
    num: String,
    den: String,
    prefix: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound: Option<Q>,
}

impl Serialize for DensityReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReportRepr {
            kind: self.kind,
            num: self.value.numer().to_string(),
            den: self.value.denom().to_string(),
            prefix: self.prefix_length,
            bound: self.error_bound.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityReport {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ReportRepr::deserialize(d)?;
        let value = format!("{}/{}", r.num, r.den)
            .parse()
            .map_err(serde::de::Error::custom)?;
        Ok(DensityReport { kind: r.kind, value, prefix_length: r.prefix, error_bound: r.bound })
    }
}

/// Exact asymptotic density, or `unknown` outside the decidable class.
pub fn exact_density(t: &SetTerm) -> DensityReport {
    match density_value(t) {
        Some(v) => DensityReport::exact(v),
        None => DensityReport::unknown(),
    }
}

pub(crate) fn density_value(t: &SetTerm) -> Option<Q> {
    density_at_depth(t, 0)
}

/// Block splits allowed for a term whose periodic form is too large.
const MAX_FALLBACK_DEPTH: u32 = 3;
/// Largest profile threshold the block split will unroll.
const MAX_THRESHOLD: u32 = 1 << 12;

fn density_at_depth(t: &SetTerm, depth: u32) -> Option<Q> {
    if !t.has_diagonal() {
        let direct = match t {
            SetTerm::Dyadic { k, residues } => Some(Q(num_rational::BigRational::new(
                residues.len().into(),
                num_bigint::BigInt::from(1u8) << *k as usize,
            ))),
            _ => PeriodicNf::build(t, DEFAULT_MAX_PERIOD)
                .map(|nf| nf.density())
                .or_else(|| residue_combination_density(t)),
        };
        if direct.is_some() || depth >= MAX_FALLBACK_DEPTH {
            return direct;
        }
    }
    let depth = if t.has_diagonal() { depth } else { depth + 1 };
    let prof = Profile::of(t);
    if prof.period > MAX_TRACE_PERIOD
        || prof.families.len() > MAX_FAMILIES
        || prof.threshold > MAX_THRESHOLD
    {
        return None;
    }
    let mut sum = Q::zero();
    for n in 0..prof.threshold {
        let d = density_at_depth(&t.trace(n), depth)?;
        sum = sum + d * Q::pow2_neg(n + 1);
    }
    let p = prof.period as u32;
    let mut tail = Q::zero();
    for r in 0..p {
        let n = prof.threshold + r;
        let v = generic_block_density(t, n, &prof, depth)?;
        tail = tail + v * Q::pow2_neg(n + 1);
    }
    // Σ_{j≥0} 2^{-jp} = 1 / (1 - 2^{-p})
    let geometric = Q::one() / (Q::one() - Q::pow2_neg(p));
    Some(sum + tail * geometric)
}

/// Density of the generic trace at block `n`, provided the vanishing families
/// only affect a density-zero set there.
fn generic_block_density(t: &SetTerm, n: u32, prof: &Profile, depth: u32) -> Option<Q> {
    let lo = t.trace_with(n, FamilySubst::Empty);
    if prof.families.is_empty() {
        return density_at_depth(&lo, depth);
    }
    let hi = t.trace_with(n, FamilySubst::Full);
    // every assignment of the families lies between lo ∩ hi and lo ∪ hi
    let spread = SetTerm::diff(vec![
        SetTerm::union(vec![lo.clone(), hi.clone()]),
        SetTerm::inter(vec![lo.clone(), hi]),
    ]);
    if prof.families.len() > 1 {
        // mixed assignments are not covered by the two extremes
        return None;
    }
    if density_at_depth(&spread, depth)? == Q::zero() {
        density_at_depth(&lo, depth)
    } else {
        None
    }
}

/// Most distinct residue atoms combined by inclusion–exclusion.
const MAX_ATOMS: usize = 12;
/// Largest modulus or class count formed while intersecting atoms.
const MAX_CRT_MODULUS: i128 = 1 << 62;
const MAX_CRT_CLASSES: usize = 1 << 16;

/// A leaf as a residue atom `(m, S)`; `None` for finite sets, which do not move densities.
fn leaf_atom(t: &SetTerm) -> Option<Option<(i128, Vec<i128>)>> {
    match t {
        SetTerm::Finite(_) => Some(None),
        SetTerm::Residue { m, residues } => Some(Some((*m as i128, residues.iter().map(|&r| r as i128).collect()))),
        SetTerm::Dyadic { k, residues } if *k < 62 => {
            Some(Some((1 << k, residues.iter().map(|&r| r as i128).collect())))
        }
        SetTerm::Block(n) if *n < 61 => Some(Some((1 << (n + 1), vec![(1 << n) - 1]))),
        _ => None,
    }
}

fn collect_atoms(t: &SetTerm, atoms: &mut Vec<(i128, Vec<i128>)>) -> Option<()> {
    match t {
        SetTerm::Union(args) | SetTerm::Inter(args) | SetTerm::Diff(args) => {
            args.iter().try_for_each(|a| collect_atoms(a, atoms))
        }
        SetTerm::Compl(a) => collect_atoms(a, atoms),
        leaf => {
            if let Some(atom) = leaf_atom(leaf)? {
                if !atoms.contains(&atom) {
                    atoms.push(atom);
                }
            }
            Some(())
        }
    }
}

/// Truth of `t` when exactly the atoms in `sat` hold.
fn holds(t: &SetTerm, atoms: &[(i128, Vec<i128>)], sat: usize) -> bool {
    match t {
        SetTerm::Union(args) => args.iter().any(|a| holds(a, atoms, sat)),
        SetTerm::Inter(args) => args.iter().all(|a| holds(a, atoms, sat)),
        SetTerm::Diff(args) => holds(&args[0], atoms, sat) && !args[1..].iter().any(|a| holds(a, atoms, sat)),
        SetTerm::Compl(a) => !holds(a, atoms, sat),
        leaf => match leaf_atom(leaf).flatten() {
            Some(atom) => sat >> atoms.iter().position(|a| *a == atom).expect("collected") & 1 == 1,
            None => false,
        },
    }
}

/// Density of the intersection of the atoms selected by `mask`, by the Chinese remainder theorem.
fn intersection_density(atoms: &[(i128, Vec<i128>)], mask: usize) -> Option<Q> {
    let mut modulus = 1i128;
    let mut classes = vec![0i128];
    for (i, (m, rs)) in atoms.iter().enumerate() {
        if mask >> i & 1 == 0 {
            continue;
        }
        let e = modulus.extended_gcd(m);
        let g = e.gcd;
        let lcm = modulus / g * m;
        if lcm > MAX_CRT_MODULUS {
            return None;
        }
        let mut next = Vec::new();
        for &r in &classes {
            for &s in rs {
                if (s - r) % g != 0 {
                    continue;
                }
                // r + modulus·u with modulus·u ≡ s - r (mod m)
                let step = m / g;
                let u = ((s - r) / g % step * (e.x % step)).rem_euclid(step);
                next.push((r + modulus * u).rem_euclid(lcm));
            }
            if next.len() > MAX_CRT_CLASSES {
                return None;
            }
        }
        modulus = lcm;
        classes = next;
    }
    Some(Q::ratio_u64(classes.len() as u64, 1) / Q(num_rational::BigRational::from_integer(modulus.into())))
}

/// Exact density of a Boolean combination of residue classes and finite sets whose
/// period is too large to enumerate.
fn residue_combination_density(t: &SetTerm) -> Option<Q> {
    let mut atoms = Vec::new();
    collect_atoms(t, &mut atoms)?;
    let k = atoms.len();
    if k > MAX_ATOMS {
        return None;
    }
    let mut exact = (0..1usize << k).map(|mask| intersection_density(&atoms, mask)).collect::<Option<Vec<_>>>()?;
    // superset Möbius inversion: density of "exactly these atoms hold"
    for i in 0..k {
        for mask in 0..1usize << k {
            if mask >> i & 1 == 0 {
                let with = exact[mask | 1 << i].clone();
                exact[mask] = exact[mask].clone() - with;
            }
        }
    }
    Some((0..1usize << k).filter(|&sat| holds(t, &atoms, sat)).map(|sat| exact[sat].clone()).sum())
}

/// Emptiness for the same class: a nonempty residue part has positive density, and
/// otherwise only points of the finite leaves can belong to `t`.
fn residue_combination_empty(t: &SetTerm) -> Option<bool> {
    if residue_combination_density(t)?.is_positive() {
        return Some(false);
    }
    let mut points = BTreeSet::new();
    finite_points(t, &mut points);
    Some(!points.into_iter().any(|x| t.member(x)))
}

fn finite_points(t: &SetTerm, out: &mut BTreeSet<u64>) {
    match t {
        SetTerm::Finite(s) => out.extend(s.iter().copied()),
        SetTerm::Union(args) | SetTerm::Inter(args) | SetTerm::Diff(args) => {
            args.iter().for_each(|a| finite_points(a, out))
        }
        SetTerm::Compl(a) => finite_points(a, out),
        _ => {}
    }
}

/// `|{i < len : i ∈ t}| / len` with an error bound when the term's structure gives one.
pub fn cesaro_density(t: &SetTerm, len: u64, max_prefix: u64) -> Result<DensityReport> {
    if len == 0 {
        return Err(Error::InvalidArgument("prefix length must be at least 1".into()));
    }
    let bits = prefix(t, len, max_prefix)?;
    let count = bits.iter().filter(|&&b| b).count() as u64;
    Ok(DensityReport {
        kind: DensityKind::Estimate,
        value: Q::ratio_u64(count, len),
        prefix_length: Some(len),
        error_bound: count_error_bound(t, len).map(|e| Q::ratio_u64(e, len)),
    })
}

/// Bound on `|count(t, len) - len·d(t)|`.
pub fn count_error_bound(t: &SetTerm, len: u64) -> Option<u64> {
    if !t.has_diagonal() {
        if let SetTerm::Dyadic { k, .. } = t {
            if *k < 63 {
                return Some(1u64 << k);
            }
        }
        let nf = PeriodicNf::build(t, DEFAULT_MAX_PERIOD)?;
        return Some(nf.period() + nf.exceptional_points() as u64);
    }
    // blocks n with 2^n ≤ len; everything further out weighs at most len·2^-(n+1) in total
    let mut total = 1u64;
    let mut n = 0u32;
    while n < 64 && (1u64 << n) <= len {
        let sub = block_prefix_len(n, len);
        total = total.checked_add(count_error_bound(&t.trace(n), sub.max(1))? + 1)?;
        n += 1;
    }
    Some(total)
}

/// Membership bits of `t` on `0..len`.
pub fn prefix(t: &SetTerm, len: u64, max_prefix: u64) -> Result<Vec<bool>> {
    if len > max_prefix {
        return Err(Error::ResourceLimit { requested: len, max: max_prefix });
    }
    Ok(prefix_unchecked(t, len))
}

pub(crate) fn prefix_unchecked(t: &SetTerm, len: u64) -> Vec<bool> {
    let n = len as usize;
    match t {
        SetTerm::Finite(s) => {
            let mut v = vec![false; n];
            for &x in s.range(..len) {
                v[x as usize] = true;
            }
            v
        }
        SetTerm::Dyadic { k, residues } => {
            if *k >= 63 || (1u64 << k) >= len {
                let mut v = vec![false; n];
                for &r in residues.range(..len) {
                    v[r as usize] = true;
                }
                v
            } else {
                let mask = (1u64 << k) - 1;
                let mut table = vec![false; (mask + 1) as usize];
                for &r in residues {
                    table[r as usize] = true;
                }
                (0..len).map(|x| table[(x & mask) as usize]).collect()
            }
        }
        SetTerm::Residue { m, residues } => {
            let mut table = vec![false; (*m).min(len) as usize];
            for &r in residues.range(..(*m).min(len)) {
                table[r as usize] = true;
            }
            if *m >= len {
                table
            } else {
                (0..len).map(|x| table[(x % m) as usize]).collect()
            }
        }
        SetTerm::Block(b) => {
            let mut v = vec![false; n];
            scatter(&mut v, *b, &vec![true; block_prefix_len(*b, len) as usize]);
            v
        }
        SetTerm::Lift(b, inner) => {
            let mut v = vec![false; n];
            let sub = block_prefix_len(*b, len);
            if sub > 0 {
                scatter(&mut v, *b, &prefix_unchecked(inner, sub));
            }
            v
        }
        SetTerm::Diagonal(fam) => {
            let mut v = vec![false; n];
            let mut b = 0u32;
            while b < 64 && block_prefix_len(b, len) > 0 {
                let sub = block_prefix_len(b, len);
                scatter(&mut v, b, &prefix_unchecked(&fam.member(b), sub));
                b += 1;
            }
            v
        }
        SetTerm::Union(a) => fold_bits(a, len, false, |x, y| x || y),
        SetTerm::Inter(a) => fold_bits(a, len, true, |x, y| x && y),
        SetTerm::Diff(a) => match a.split_first() {
            None => vec![false; n],
            Some((first, rest)) => {
                let mut v = prefix_unchecked(first, len);
                for t in rest {
                    for (x, y) in v.iter_mut().zip(prefix_unchecked(t, len)) {
                        *x = *x && !y;
                    }
                }
                v
            }
        },
        SetTerm::Compl(inner) => prefix_unchecked(inner, len).into_iter().map(|b| !b).collect(),
    }
}

fn scatter(v: &mut [bool], block: u32, inner: &[bool]) {
    for (i, &bit) in inner.iter().enumerate() {
        if bit {
            // block_prefix_len guarantees the point is in range
            v[block_point(block, i as u64).unwrap() as usize] = true;
        }
    }
}

fn fold_bits(a: &[SetTerm], len: u64, unit: bool, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    let mut v = vec![unit; len as usize];
    for t in a {
        for (x, y) in v.iter_mut().zip(prefix_unchecked(t, len)) {
            *x = op(*x, y);
        }
    }
    v
}

/// Exact emptiness where decidable.
pub fn decide_empty(t: &SetTerm) -> Option<bool> {
    empty_at_depth(t, 0)
}

fn empty_at_depth(t: &SetTerm, depth: u32) -> Option<bool> {
    if t.is_syntactically_empty() {
        return Some(true);
    }
    if !t.has_diagonal() {
        let direct = PeriodicNf::build(t, DEFAULT_MAX_PERIOD)
            .map(|nf| nf.is_empty())
            .or_else(|| residue_combination_empty(t));
        if direct.is_some() || depth >= MAX_FALLBACK_DEPTH {
            return direct;
        }
    }
    let depth = if t.has_diagonal() { depth } else { depth + 1 };
    let prof = Profile::of(t);
    if prof.period > MAX_TRACE_PERIOD || prof.threshold > MAX_THRESHOLD {
        return None;
    }
    for n in 0..prof.threshold {
        if !empty_at_depth(&t.trace(n), depth)? {
            return Some(false);
        }
    }
    for r in 0..prof.period as u32 {
        let n = prof.threshold + r;
        let lo = t.trace_with(n, FamilySubst::Empty);
        if prof.families.is_empty() {
            if !empty_at_depth(&lo, depth)? {
                return Some(false);
            }
            continue;
        }
        if prof.families.len() > 1 {
            return None;
        }
        let hi = t.trace_with(n, FamilySubst::Full);
        if !(empty_at_depth(&lo, depth)? && empty_at_depth(&hi, depth)?) {
            return None;
        }
    }
    Some(true)
}

/// Exact extensional equality where decidable.
pub fn decide_equal(a: &SetTerm, b: &SetTerm) -> Option<bool> {
    let sym = SetTerm::union(vec![
        SetTerm::diff(vec![a.clone(), b.clone()]),
        SetTerm::diff(vec![b.clone(), a.clone()]),
    ]);
    decide_empty(&sym)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_count(t: &SetTerm, len: u64) -> u64 {
        (0..len).filter(|&x| t.member(x)).count() as u64
    }

    #[test]
    fn residue_fallback_matches_normal_form() {
        let r = |m: u64, rs: &[u64]| SetTerm::Residue { m, residues: rs.iter().copied().collect() };
        let cases = [
            SetTerm::union(vec![r(6, &[0, 1]), r(10, &[3]), SetTerm::finite([4, 5])]),
            SetTerm::diff(vec![SetTerm::dyadic(3, [1, 2, 5]), r(3, &[0]), SetTerm::Block(1)]),
            SetTerm::compl(SetTerm::inter(vec![r(4, &[1, 3]), r(6, &[1, 5]), r(9, &[0, 4])])),
        ];
        for t in cases {
            let nf = PeriodicNf::build(&t, DEFAULT_MAX_PERIOD).unwrap().density();
            assert_eq!(residue_combination_density(&t), Some(nf), "{t}");
        }
        let big = SetTerm::union(vec![r(17, &[0]), r(18, &[0]), r(1 << 20, &[0])]);
        let expected = Q::new(1, 17) + Q::new(1, 18) - Q::new(1, 306) + Q::new(1, 1 << 20)
            - Q::new(1, 17 << 20)
            - Q::new(1, 9 << 20)
            + Q::new(1, 153 << 20);
        assert_eq!(density_value(&big), Some(expected));
        let twice = SetTerm::union(vec![big.clone(), SetTerm::finite([1, 35])]);
        assert_eq!(decide_equal(&big, &twice), Some(false));
        assert_eq!(decide_equal(&big, &SetTerm::union(vec![big.clone(), SetTerm::finite([34])])), Some(true));
        assert_eq!(decide_empty(&SetTerm::diff(vec![SetTerm::finite([3, 34]), big])), Some(false));
    }

    #[test]
    fn prefix_examples() {
        let bits = |t: &SetTerm, n| -> String {
            prefix(t, n, DEFAULT_MAX_PREFIX)
                .unwrap()
                .into_iter()
                .map(|b| if b { '1' } else { '0' })
                .collect()
        };
        assert_eq!(bits(&SetTerm::finite([0, 2]), 4), "1010");
        assert_eq!(bits(&SetTerm::dyadic(1, [1]), 6), "010101");
        // B1 = {1, 5, 9, ...}
        assert_eq!(bits(&SetTerm::Block(1), 8), "01000100");
        assert!(matches!(
            prefix(&SetTerm::Block(1), 1 << 21, DEFAULT_MAX_PREFIX),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn prefix_matches_membership() {
        let terms = [
            SetTerm::diagonal_const(SetTerm::residue(3, [1])),
            SetTerm::Diagonal(Family::Multiples { offset: 2 }),
            SetTerm::lift(2, SetTerm::compl(SetTerm::finite([1]))),
            SetTerm::Diff(vec![SetTerm::full(), SetTerm::Block(0), SetTerm::dyadic(3, [7])]),
        ];
        for t in &terms {
            let bits = prefix(t, 3000, DEFAULT_MAX_PREFIX).unwrap();
            for (x, b) in bits.iter().enumerate() {
                assert_eq!(*b, t.member(x as u64), "{t} at {x}");
            }
        }
    }

    #[test]
    fn exact_density_examples() {
        assert_eq!(exact_density(&SetTerm::dyadic(1, [0])), DensityReport::exact(Q::new(1, 2)));
        assert_eq!(exact_density(&SetTerm::finite([7, 11])), DensityReport::exact(Q::zero()));
        assert_eq!(exact_density(&SetTerm::Block(2)), DensityReport::exact(Q::new(1, 8)));
        // brute-force oracle for Block(2) at N = 2^20
        let n = 1u64 << 20;
        let est = Q::ratio_u64(brute_count(&SetTerm::Block(2), n), n);
        assert!((est - Q::new(1, 8)).abs() <= Q::pow2_neg(10));
    }

    #[test]
    fn diagonal_densities() {
        let evens = SetTerm::evens();
        let lifted = SetTerm::diagonal_const(evens.clone());
        assert_eq!(density_value(&lifted), Some(Q::new(1, 2)));
        let twice = lifted.clone().tower_lift(1);
        assert_eq!(density_value(&twice), Some(Q::new(1, 2)));
        // block-weighted sum of the per-block 1/(n+1) is log 2: not rational
        assert_eq!(density_value(&SetTerm::Diagonal(Family::Multiples { offset: 0 })), None);
        // the family is irrelevant once intersected with a finite union of blocks
        let t = SetTerm::inter(vec![
            SetTerm::Diagonal(Family::Multiples { offset: 0 }),
            SetTerm::blocks_below(3),
        ]);
        let expected = Q::new(1, 2) + Q::new(1, 4) * Q::new(1, 2) + Q::new(1, 8) * Q::new(1, 3);
        assert_eq!(density_value(&t), Some(expected));
    }

    #[test]
    fn far_blocks_fall_back_to_block_split() {
        let far = SetTerm::lift(1000, SetTerm::finite([3]));
        assert_eq!(density_value(&far), Some(Q::zero()));
        let co = SetTerm::compl(SetTerm::lift(70, SetTerm::full()));
        assert_eq!(density_value(&co), Some(Q::one() - Q::pow2_neg(71)));
        let inside = SetTerm::diff(vec![far.clone(), SetTerm::Block(1000)]);
        assert_eq!(decide_empty(&inside), Some(true));
        assert_eq!(decide_empty(&far), Some(false));
    }

    #[test]
    fn residue_profile_period() {
        let p = Profile::of(&SetTerm::residue(12, [1]));
        assert_eq!(p.threshold, 2);
        assert_eq!(p.period, 2); // order of 2 mod 3
    }

    #[test]
    fn cesaro_examples() {
        let r = cesaro_density(&SetTerm::dyadic(1, [0]), 10, DEFAULT_MAX_PREFIX).unwrap();
        assert_eq!(r.value, Q::new(1, 2));
        let r = cesaro_density(&SetTerm::finite(0..10), 100, DEFAULT_MAX_PREFIX).unwrap();
        assert_eq!(r.value, Q::new(1, 10));
        let n = 1u64 << 16;
        let r = cesaro_density(&SetTerm::Block(0), n, DEFAULT_MAX_PREFIX).unwrap();
        assert!((r.value.clone() - Q::new(1, 2)).abs() <= Q::pow2_neg(8));
        assert_eq!(r.error_bound, Some(Q::ratio_u64(2, n)));
    }

    #[test]
    fn emptiness_decisions() {
        assert_eq!(decide_empty(&SetTerm::inter(vec![SetTerm::Block(1), SetTerm::Block(2)])), Some(true));
        let d = SetTerm::diagonal_const(SetTerm::evens());
        assert_eq!(decide_empty(&SetTerm::inter(vec![d.clone(), SetTerm::compl(d.clone())])), Some(true));
        assert_eq!(decide_empty(&d), Some(false));
        assert_eq!(
            decide_equal(&SetTerm::union(vec![SetTerm::evens(), SetTerm::odds()]), &SetTerm::full()),
            Some(true)
        );
    }
}
