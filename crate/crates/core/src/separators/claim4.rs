use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::measure::{FinSupp, Measure};
use crate::natset::{Point, SetTerm};
use crate::rational::Q;

use super::{
    finish, lambda_id, record, BlockOracle, CertKind, Certificate, DyadicCellOracle, Quantity, Rel,
    SeparationInput, Separator, StreamEntry, Structure,
};

/// An ℱ-member small for a subsequence of a stream of block-supported measures.
///
/// Block `l` of the witness is `a_l`, produced by the oracle against the measures
/// selected so far; `k_{n+1}` is the first later index whose measure is below
/// `δ/2` on the blocks built so far.
pub struct Claim4 {
    pub oracle: Box<dyn BlockOracle>,
}

impl Default for Claim4 {
    fn default() -> Self {
        Claim4 { oracle: Box::new(DyadicCellOracle::default()) }
    }
}

impl Separator for Claim4 {
    fn name(&self) -> &'static str {
        "claim4"
    }

    fn describe(&self) -> &'static str {
        "F-member small on a subsequence of a stream of block-supported measures"
    }

    fn separate(&self, input: &SeparationInput) -> Result<Certificate> {
        let delta = input.delta()?;
        let mu = input.target;
        if mu.level() < 2 {
            return Err(Error::InvalidArgument("claim4 needs a target of level at least 2".into()));
        }
        let lam = |k: usize| &input.stream[k].measure;
        let half = delta.clone() / Q::from_int(2);
        let small_on = |k: usize, t: &SetTerm| -> Result<bool> { Ok(lam(k).eval_or_err(t)? < half) };

        let mut a = vec![SetTerm::full()];
        let mut blocks = vec![SetTerm::Block(0)];
        let mut selected = Vec::new();
        let mut last_support = 0u32;
        let last_block = |k: usize| -> Result<u32> {
            let support = lam(k).block_support().ok_or_else(|| {
                Error::InvalidArgument(format!("lambda{k} is not carried by finitely many blocks"))
            })?;
            Ok(support.last().copied().unwrap_or(0))
        };
        let mut first = None;
        for k in 0..input.stream.len() {
            if small_on(k, &blocks[0])? {
                first = Some(k);
                break;
            }
        }
        let k0 = first.ok_or_else(|| Error::ExhaustedStream("no measure is small on B_0".into()))?;
        last_support = last_support.max(last_block(k0)?);
        selected.push(k0);

        let mut selecting = true;
        let mut l = 1u32;
        loop {
            if !selecting && l > last_support {
                break;
            }
            let eps = Q::ratio_u64(1, l as u64 + 1);
            let eps_prime = delta.clone() * Q::pow2_neg(l + 1);
            let lambdas: Vec<&Measure> = selected.iter().map(|&k| lam(k)).collect();
            let a_l = self.oracle.separate(&mu, l, &lambdas, &eps, &eps_prime).ok_or_else(|| {
                Error::OracleFailure(format!("{} found no set in block {l}", self.oracle.name()))
            })?;
            blocks.push(SetTerm::lift(l, a_l.clone()));
            a.push(a_l);
            if selecting {
                let built = SetTerm::union(blocks.clone());
                let after = selected.last().map_or(0, |&k| k + 1);
                let mut next = None;
                for k in after..input.stream.len() {
                    if small_on(k, &built)? {
                        next = Some(k);
                        break;
                    }
                }
                match next {
                    Some(k) => {
                        last_support = last_support.max(last_block(k)?);
                        selected.push(k);
                    }
                    None => selecting = false,
                }
            }
            l += 1;
        }
        let last = l - 1;
        let tail = SetTerm::compl(SetTerm::blocks_below(last + 1));
        let mut parts = blocks.clone();
        parts.push(tail.clone());
        let f = SetTerm::union(parts);

        let mut c = Certificate::new(CertKind::FMembership, self.name(), f.clone(), delta.clone());
        c.truncation = input.stream.len();
        c.subsequence = selected.iter().map(|&k| k as u64).collect();
        c.notes.push(format!("oracle {}; blocks 0..={last} built", self.oracle.name()));
        c.measures.insert("target".into(), Measure::Level(mu));
        for &k in &selected {
            c.measures.insert(lambda_id(k), lam(k).clone());
        }
        for (n, inner) in a.iter().enumerate() {
            let n = n as u32;
            let bound = Q::one() - Q::ratio_u64(1, n as u64 + 1);
            record(&mut c, "target", Quantity::Block { n }, f.clone(), Some((Rel::Gt, bound)))?;
            c.structure.push(Structure::BlockEquals { n, inner: inner.clone() });
        }
        for (n, &k) in selected.iter().enumerate() {
            let id = lambda_id(k);
            let upto = SetTerm::union(blocks[..=n].to_vec());
            record(&mut c, &id, Quantity::Eval, upto, Some((Rel::Lt, half.clone())))?;
            for (l, b) in blocks.iter().enumerate().skip(n + 1) {
                let bound = delta.clone() * Q::pow2_neg(l as u32 + 1);
                record(&mut c, &id, Quantity::Eval, b.clone(), Some((Rel::Lt, bound)))?;
            }
            record(&mut c, &id, Quantity::Eval, tail.clone(), Some((Rel::Eq, Q::zero())))?;
            record(&mut c, &id, Quantity::Eval, f.clone(), Some((Rel::Le, delta.clone())))?;
        }
        record(&mut c, "target", Quantity::Eval, f, Some((Rel::Eq, Q::one())))?;
        finish(c)
    }
}

fn atom<R: Rng>(rng: &mut R, level: u32, block: u32) -> Point {
    let mut path = vec![block];
    for _ in 2..level {
        path.push(rng.gen_range(0..4));
    }
    Point::new(path, rng.gen_range(0..64))
}

/// A stream of atomic measures carried by finitely many blocks, drifting to later blocks.
pub fn synthetic_block_stream<R: Rng>(rng: &mut R, len: usize, level: u32) -> Vec<StreamEntry> {
    (0..len)
        .map(|k| {
            let block = rng.gen_range(k as u32 / 2..=k as u32 + 2);
            let measure = match rng.gen_range(0..4) {
                0 => Measure::FinSupp(FinSupp::dirac_at(atom(rng, level, block))),
                1 => {
                    let pts: BTreeSet<Point> = (0..rng.gen_range(2..4)).map(|_| atom(rng, level, block)).collect();
                    Measure::FinSupp(FinSupp::uniform(pts.into_iter().collect()).expect("nonempty"))
                }
                2 => {
                    let pts = vec![atom(rng, level, block), atom(rng, level, block + 1)];
                    Measure::FinSupp(FinSupp::uniform(pts).expect("nonempty"))
                }
                _ if level >= 3 => Measure::block_lifted(block, Measure::point_limit(rng.gen_range(0..8))),
                _ => Measure::block_lifted(block, Measure::dirac(rng.gen_range(0..64))),
            };
            StreamEntry::new(measure)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LevelMeasure;
    use crate::separators::verify;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn input(level: u32, stream: Vec<StreamEntry>) -> SeparationInput {
        SeparationInput::new(LevelMeasure::new(level).unwrap())
            .with_delta(Q::new(1, 10))
            .with_stream(stream)
    }

    #[test]
    fn hand_built_stream() {
        let stream = (0..4u32)
            .map(|b| StreamEntry::new(Measure::FinSupp(FinSupp::dirac_at(Point::new(vec![b], 1)))))
            .collect();
        let c = Claim4::default().separate(&input(2, stream)).unwrap();
        assert!(verify(&c).ok, "{:?}", verify(&c).diagnostic);
        // δ_{x^0_1} is large on B_0, so k_0 = 1
        assert_eq!(c.subsequence, vec![1, 2, 3]);
        for k in [1, 2, 3] {
            assert_eq!(c.measures[&lambda_id(k)].eval(&c.witness_set), Some(Q::zero()));
        }
    }

    #[test]
    fn synthetic_streams_verify() {
        for (seed, level) in [(1u64, 2), (2, 2), (3, 3)] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let stream = synthetic_block_stream(&mut rng, 12, level);
            let c = Claim4::default().separate(&input(level, stream)).unwrap();
            assert!(verify(&c).ok, "seed {seed}: {:?}", verify(&c).diagnostic);
            assert!(!c.subsequence.is_empty());
        }
    }

    #[test]
    fn unsupported_measure_is_rejected() {
        let stream = vec![StreamEntry::new(Measure::point_limit(1))];
        assert!(matches!(Claim4::default().separate(&input(2, stream)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn exhausted_stream() {
        let stream = vec![StreamEntry::new(Measure::dirac(0))];
        assert!(matches!(Claim4::default().separate(&input(2, stream)), Err(Error::ExhaustedStream(_))));
    }
}
