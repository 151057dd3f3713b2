//! Brute-force reference semantics written against the definitions only.
#![allow(dead_code)]

use seqclosure::natset::{Family, SetTerm};

/// `(n, i)` with `x + 1 = 2^n (2i + 1)`, by repeated halving.
pub fn block(x: u64) -> (u32, u64) {
    let mut y = x as u128 + 1;
    let mut n = 0;
    while y % 2 == 0 {
        y /= 2;
        n += 1;
    }
    (n, ((y - 1) / 2) as u64)
}

fn family_member(f: &Family, n: u32, i: u64) -> bool {
    match f {
        Family::Const { inner } => member(inner, i),
        Family::Listed { head, tail } => match head.get(n as usize) {
            Some(t) => member(t, i),
            None => member(tail, i),
        },
        Family::Multiples { offset } => i % (n as u64 + 1 + offset) == 0,
        Family::Pow2Multiples { offset } => {
            let k = n + 1 + offset;
            k >= 64 && i == 0 || k < 64 && i % (1u64 << k) == 0
        }
    }
}

pub fn member(t: &SetTerm, x: u64) -> bool {
    match t {
        SetTerm::Finite(s) => s.contains(&x),
        SetTerm::Dyadic { k, residues } if *k >= 64 => residues.contains(&x),
        SetTerm::Dyadic { k, residues } => residues.contains(&(x % (1u64 << k))),
        SetTerm::Residue { m, residues } => residues.contains(&(x % m)),
        SetTerm::Block(n) => block(x).0 == *n,
        SetTerm::Lift(n, inner) => {
            let (m, i) = block(x);
            m == *n && member(inner, i)
        }
        SetTerm::Diagonal(f) => {
            let (n, i) = block(x);
            family_member(f, n, i)
        }
        SetTerm::Union(args) => args.iter().any(|a| member(a, x)),
        SetTerm::Inter(args) => args.iter().all(|a| member(a, x)),
        SetTerm::Diff(args) => member(&args[0], x) && !args[1..].iter().any(|a| member(a, x)),
        SetTerm::Compl(a) => !member(a, x),
    }
}

/// `|t ∩ {0, …, len-1}|`.
pub fn count(t: &SetTerm, len: u64) -> u64 {
    (0..len).filter(|&x| member(t, x)).count() as u64
}

/// `|S| / 2^k` as a reduced pair, for dyadic sets.
pub fn dyadic_measure(k: u32, residues: usize) -> (u64, u64) {
    let (mut num, mut den) = (residues as u64, 1u64 << k);
    while num % 2 == 0 && den > 1 {
        num /= 2;
        den /= 2;
    }
    if num == 0 {
        den = 1;
    }
    (num, den)
}

/// `x mod m` for the point `x` addressed by `path` and `index`.
pub fn residue(path: &[u32], index: u64, m: u64) -> u64 {
    let m = m as u128;
    match path.split_first() {
        None => (index as u128 % m) as u64,
        Some((&n, rest)) => {
            let i = residue(rest, index, m as u64) as u128;
            let mut p = 1u128 % m;
            for _ in 0..n {
                p = p * 2 % m;
            }
            ((p * ((2 * i + 1) % m) + m - 1) % m) as u64
        }
    }
}

fn family_member_addr(f: &Family, n: u32, path: &[u32], index: u64) -> bool {
    match f {
        Family::Const { inner } => member_addr(inner, path, index),
        Family::Listed { head, tail } => member_addr(head.get(n as usize).unwrap_or(tail), path, index),
        Family::Multiples { offset } => residue(path, index, n as u64 + 1 + offset) == 0,
        Family::Pow2Multiples { offset } => {
            let k = n + 1 + offset;
            if k >= 64 {
                path.is_empty() && index == 0
            } else {
                residue(path, index, 1 << k) == 0
            }
        }
    }
}

/// Membership of the point `x^{path[0]}_{x^{path[1]}_{..index}}`, which may exceed `u64`.
pub fn member_addr(t: &SetTerm, path: &[u32], index: u64) -> bool {
    let Some((&n, rest)) = path.split_first() else { return member(t, index) };
    match t {
        // addressed points lie beyond every u64
        SetTerm::Finite(_) => false,
        SetTerm::Dyadic { k, .. } if *k >= 64 => unimplemented!("reference stops at k < 64"),
        SetTerm::Dyadic { k, residues } => residues.contains(&residue(path, index, 1 << k)),
        SetTerm::Residue { m, residues } => residues.contains(&residue(path, index, *m)),
        SetTerm::Block(b) => *b == n,
        SetTerm::Lift(b, inner) => *b == n && member_addr(inner, rest, index),
        SetTerm::Diagonal(f) => family_member_addr(f, n, rest, index),
        SetTerm::Union(args) => args.iter().any(|a| member_addr(a, path, index)),
        SetTerm::Inter(args) => args.iter().all(|a| member_addr(a, path, index)),
        SetTerm::Diff(args) => {
            member_addr(&args[0], path, index) && !args[1..].iter().any(|a| member_addr(a, path, index))
        }
        SetTerm::Compl(a) => !member_addr(a, path, index),
    }
}
