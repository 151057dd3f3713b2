use crate::error::{Error, Result};
use crate::natset::{decide_empty, decide_equal, SetTerm};
use crate::rational::Q;

use super::{FinSupp, Measure};

/// `m(· ∩ y) / m(y)`. Finitely supported inputs stay finitely supported.
pub fn restrict_rescale(m: &Measure, y: &SetTerm) -> Result<Measure> {
    let mass = m.eval(y).ok_or(Error::UndefinedMass)?;
    if mass.is_zero() {
        return Err(Error::ZeroMass);
    }
    Ok(match m {
        Measure::FinSupp(f) => Measure::FinSupp(f.restrict(y)?),
        _ => Measure::Restricted { restrict: Box::new(m.clone()), to: y.clone() },
    })
}

/// Checks that the terms are pairwise disjoint and cover ℕ.
pub fn validate_partition(parts: &[SetTerm]) -> Result<()> {
    let undecided = |what: &str| Error::PartitionInvalid(format!("cannot decide {what}"));
    for (i, a) in parts.iter().enumerate() {
        for b in &parts[i + 1..] {
            let meet = SetTerm::inter(vec![a.clone(), b.clone()]);
            match decide_empty(&meet) {
                Some(true) => {}
                Some(false) => {
                    return Err(Error::PartitionInvalid(format!("{a} and {b} overlap")))
                }
                None => return Err(undecided("disjointness")),
            }
        }
    }
    match decide_equal(&SetTerm::union(parts.to_vec()), &SetTerm::full()) {
        Some(true) => Ok(()),
        Some(false) => Err(Error::PartitionInvalid("parts do not cover the naturals".into())),
        None => Err(undecided("coverage")),
    }
}

/// The measure with density `f = Σ_j c_j χ_{A_j}` with respect to `m`.
pub fn reweight(m: &Measure, f: &[(SetTerm, Q)]) -> Result<Measure> {
    if let Some((_, c)) = f.iter().find(|(_, c)| c.is_negative()) {
        return Err(Error::InvalidArgument(format!("negative density value {c}")));
    }
    let parts: Vec<SetTerm> = f.iter().map(|(a, _)| a.clone()).collect();
    validate_partition(&parts)?;
    let mut integral = Q::zero();
    for (a, c) in f {
        integral = integral + m.eval(a).ok_or(Error::UndefinedMass)? * c;
    }
    if integral != Q::one() {
        return Err(Error::Normalization(integral));
    }
    Ok(match m {
        Measure::FinSupp(fs) => {
            let masses = fs.iter().map(|(p, w)| {
                let c = f
                    .iter()
                    .find(|(a, _)| a.member_point(p))
                    .map(|(_, c)| c.clone())
                    .unwrap_or_else(Q::zero);
                (p.clone(), w.clone() * c)
            });
            Measure::FinSupp(FinSupp::from_masses(masses)?)
        }
        _ => Measure::Reweighted { reweight: Box::new(m.clone()), density: f.to_vec() },
    })
}

/// `max_{t ∈ g} |m1(t) − m2(t)|`.
pub fn generator_distance(m1: &Measure, m2: &Measure, g: &[SetTerm]) -> Result<Q> {
    let mut d = Q::zero();
    for t in g {
        d = d.max((m1.eval_or_err(t)? - m2.eval_or_err(t)?).abs());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natset::Point;

    fn mu1() -> Measure {
        Measure::level(1).unwrap()
    }

    fn two_on(y: SetTerm) -> Vec<(SetTerm, Q)> {
        vec![(y.clone(), Q::from_int(2)), (SetTerm::compl(y), Q::zero())]
    }

    #[test]
    fn restriction_examples() {
        let r = restrict_rescale(&mu1(), &SetTerm::evens()).unwrap();
        assert_eq!(r.eval(&SetTerm::evens()), Some(Q::one()));
        assert_eq!(r.eval(&SetTerm::dyadic(2, [0])), Some(Q::new(1, 2)));
        let u = Measure::FinSupp(
            FinSupp::uniform(vec![Point::Plain(3), Point::Plain(5)]).unwrap(),
        );
        assert_eq!(restrict_rescale(&u, &SetTerm::finite([3])).unwrap(), Measure::dirac(3));
        assert_eq!(restrict_rescale(&mu1(), &SetTerm::finite([3])), Err(Error::ZeroMass));
        let osc = SetTerm::inter(vec![
            SetTerm::residue(3, [0]),
            SetTerm::diagonal_const(SetTerm::residue(3, [0])),
        ]);
        assert_eq!(restrict_rescale(&Measure::level(2).unwrap(), &osc), Err(Error::UndefinedMass));
    }

    #[test]
    fn reweight_examples() {
        let nu = reweight(&mu1(), &two_on(SetTerm::evens())).unwrap();
        assert_eq!(nu.eval(&SetTerm::evens()), Some(Q::one()));
        assert_eq!(nu.eval(&SetTerm::dyadic(2, [0])), Some(Q::new(1, 2)));
        let u = Measure::FinSupp(FinSupp::uniform_below(1));
        assert_eq!(reweight(&u, &two_on(SetTerm::finite([0]))).unwrap(), Measure::dirac(0));
        assert!(matches!(
            reweight(&mu1(), &two_on(SetTerm::dyadic(2, [0]))),
            Err(Error::Normalization(_))
        ));
        assert!(matches!(
            reweight(&mu1(), &[(SetTerm::evens(), Q::one()), (SetTerm::full(), Q::zero())]),
            Err(Error::PartitionInvalid(_))
        ));
        assert!(matches!(
            reweight(&mu1(), &[(SetTerm::evens(), Q::one())]),
            Err(Error::PartitionInvalid(_))
        ));
    }

    #[test]
    fn distances() {
        let g = vec![SetTerm::evens()];
        assert_eq!(generator_distance(&mu1(), &mu1(), &g), Ok(Q::zero()));
        assert_eq!(generator_distance(&Measure::dirac(0), &Measure::dirac(1), &g), Ok(Q::one()));
        let u = Measure::FinSupp(FinSupp::uniform_below(9));
        assert_eq!(generator_distance(&u, &mu1(), &[SetTerm::dyadic(1, [0])]), Ok(Q::zero()));
        let bad = vec![SetTerm::inter(vec![
            SetTerm::residue(3, [0]),
            SetTerm::diagonal_const(SetTerm::residue(3, [0])),
        ])];
        let mu2 = Measure::level(2).unwrap();
        assert!(matches!(generator_distance(&mu2, &mu2, &bad), Err(Error::UndefinedValue(_))));
    }
}
