//! Seeded generators of random terms for property suites.

use rand::Rng;

use super::term::{Family, SetTerm};

/// Random Dyadic term of level `1..=max_k` with a random residue set.
pub fn dyadic<R: Rng>(rng: &mut R, max_k: u32) -> SetTerm {
    let k = rng.gen_range(1..=max_k);
    let residues: Vec<u64> = (0..1u64 << k).filter(|_| rng.gen_bool(0.5)).collect();
    SetTerm::dyadic(k, residues)
}

fn leaf<R: Rng>(rng: &mut R) -> SetTerm {
    match rng.gen_range(0..5) {
        0 => SetTerm::finite((0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..200))),
        1 => dyadic(rng, 4),
        2 => {
            let m = rng.gen_range(2..=12u64);
            SetTerm::residue(m, (0..m).filter(|_| rng.gen_bool(0.4)))
        }
        3 => SetTerm::Block(rng.gen_range(0..6)),
        _ => SetTerm::lift(rng.gen_range(0..4), dyadic(rng, 3)),
    }
}

/// Random term without diagonal families; densities are exact with small periods.
pub fn periodic_term<R: Rng>(rng: &mut R, depth: u32) -> SetTerm {
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    let arity = rng.gen_range(2..=3);
    let args: Vec<SetTerm> = (0..arity).map(|_| periodic_term(rng, depth - 1)).collect();
    match rng.gen_range(0..4) {
        0 => SetTerm::Union(args),
        1 => SetTerm::Inter(args),
        2 => SetTerm::Diff(args),
        _ => SetTerm::Compl(Box::new(args.into_iter().next().unwrap())),
    }
}

/// Random decidable term, possibly containing a constant diagonal family.
pub fn decidable_term<R: Rng>(rng: &mut R, depth: u32) -> SetTerm {
    let base = periodic_term(rng, depth);
    if !rng.gen_bool(0.3) {
        return base;
    }
    let diag = SetTerm::Diagonal(Family::Const { inner: Box::new(dyadic(rng, 3)) });
    match rng.gen_range(0..3) {
        0 => SetTerm::Union(vec![diag, base]),
        1 => SetTerm::Inter(vec![diag, base]),
        _ => SetTerm::Diff(vec![diag, base]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natset::exact_density;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_terms_are_valid_and_deterministic() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let t = decidable_term(&mut a, 3);
            assert_eq!(t, decidable_term(&mut b, 3));
            t.validate().unwrap();
            assert!(exact_density(&t).exact_value().is_some(), "{t}");
        }
    }
}
