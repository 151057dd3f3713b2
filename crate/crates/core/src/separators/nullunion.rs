use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::natset::SetTerm;
use crate::rational::Q;

use super::claim3::first_block_below;
use super::{finish, record, CertKind, Certificate, Quantity, Rel, SeparationInput, Separator, Structure};

/// A null set containing a tail of each of a sequence of null sets.
///
/// `A = ⋃_i (A_i ∖ B_{<n_i})` where `n_i` is chosen so that the block values of
/// `A_0, …, A_i` sum to less than `1/(i+1)` from block `n_i` on. At level 1 the
/// blocks are singletons.
pub struct NullUnion;

impl NullUnion {
    fn below(level: u32, n: u32) -> SetTerm {
        if level == 1 {
            SetTerm::finite(0..n as u64)
        } else {
            SetTerm::blocks_below(n)
        }
    }
}

impl Separator for NullUnion {
    fn name(&self) -> &'static str {
        "nullunion"
    }

    fn describe(&self) -> &'static str {
        "null set covering a tail of each of a sequence of null sets"
    }

    fn separate(&self, input: &SeparationInput) -> Result<Certificate> {
        let delta = input.delta.clone().unwrap_or_else(|| Q::new(1, 2));
        let mu = input.target;
        for (i, t) in input.terms.iter().enumerate() {
            match mu.eval(t) {
                Some(z) if z.is_zero() => {}
                Some(z) => return Err(Error::NonNullInput(format!("A_{i} = {t} has measure {z}"))),
                None => return Err(Error::NonNullInput(format!("A_{i} = {t} has no resolvable measure"))),
            }
        }
        let mut schedule: Vec<u32> = Vec::with_capacity(input.terms.len());
        for i in 0..input.terms.len() {
            let from = schedule.last().map_or(0, |&n| n + 1);
            let bound = Q::ratio_u64(1, i as u64 + 1);
            schedule.push(first_block_below(&mu, &input.terms[..=i], from, &bound)?);
        }
        let trimmed: Vec<SetTerm> = input
            .terms
            .iter()
            .zip(&schedule)
            .map(|(t, &n)| SetTerm::diff(vec![t.clone(), Self::below(mu.level(), n)]))
            .collect();
        let a = SetTerm::union(trimmed.clone());

        let mut c = Certificate::new(CertKind::NullUnion, self.name(), a.clone(), delta);
        c.truncation = input.terms.len();
        c.schedule = schedule.iter().map(|&n| n as u64).collect();
        c.measures.insert("target".into(), Measure::Level(mu));
        for i in 0..input.terms.len() {
            let from = schedule[i];
            let q = Quantity::TailSupSum { from, extra: input.terms[1..=i].to_vec() };
            let bound = Q::ratio_u64(1, i as u64 + 1);
            record(&mut c, "target", q, input.terms[0].clone(), Some((Rel::Lt, bound)))?;
        }
        for (t, tr) in input.terms.iter().zip(trimmed) {
            record(&mut c, "target", Quantity::Eval, t.clone(), Some((Rel::Eq, Q::zero())))?;
            c.structure.push(Structure::Covers { term: tr });
        }
        record(&mut c, "target", Quantity::Eval, a, Some((Rel::Eq, Q::zero())))?;
        finish(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LevelMeasure;
    use crate::natset::{decide_empty, Family};
    use crate::separators::verify;

    fn input(level: u32, terms: Vec<SetTerm>) -> SeparationInput {
        SeparationInput::new(LevelMeasure::new(level).unwrap()).with_terms(terms)
    }

    #[test]
    fn finite_sets_at_level_one() {
        let c = NullUnion.separate(&input(1, vec![SetTerm::finite([0]), SetTerm::finite([1])])).unwrap();
        assert_eq!(c.schedule, vec![1, 2]);
        assert_eq!(decide_empty(&c.witness_set), Some(true));
        assert!(verify(&c).ok);
    }

    #[test]
    fn squares_and_powers() {
        let terms = vec![
            SetTerm::Diagonal(Family::Pow2Multiples { offset: 0 }),
            SetTerm::Diagonal(Family::Multiples { offset: 0 }),
            SetTerm::diagonal_const(SetTerm::finite([0, 1, 2])),
        ];
        let c = NullUnion.separate(&input(2, terms.clone())).unwrap();
        assert!(verify(&c).ok, "{:?}", verify(&c).diagnostic);
        assert_eq!(c.measures["target"].eval(&c.witness_set), Some(Q::zero()));
        assert!(c.schedule.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_positive_input() {
        let err = NullUnion.separate(&input(2, vec![SetTerm::diagonal_const(SetTerm::evens())]));
        assert!(matches!(err, Err(Error::NonNullInput(_))));
    }

    #[test]
    fn empty_input() {
        let c = NullUnion.separate(&input(3, vec![])).unwrap();
        assert_eq!(c.witness_set, SetTerm::empty());
        assert!(verify(&c).ok);
    }
}
