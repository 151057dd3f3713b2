use crate::error::{Error, Result};
use crate::measure::{decompose, Measure};
use crate::natset::SetTerm;
use crate::rational::Q;

use super::{finish, record, CertKind, Certificate, Quantity, Rel, SeparationInput, Separator};

/// `F = ℕ ∖ supp ν` for a finitely supported `ν`.
pub struct FinSuppSeparator;

impl Separator for FinSuppSeparator {
    fn name(&self) -> &'static str {
        "finsupp"
    }

    fn describe(&self) -> &'static str {
        "complement of the support of a finitely supported nu"
    }

    fn separate(&self, input: &SeparationInput) -> Result<Certificate> {
        let delta = input.delta()?;
        let Measure::FinSupp(nu) = input.nu()? else {
            return Err(Error::InvalidArgument("nu must be finitely supported".into()));
        };
        let f = nu.support_complement();
        let mut c = Certificate::new(CertKind::Orthogonality, self.name(), f.clone(), delta);
        c.measures.insert("target".into(), Measure::Level(input.target));
        c.measures.insert("nu".into(), Measure::FinSupp(nu.clone()));
        record(&mut c, "target", Quantity::Eval, f.clone(), Some((Rel::Eq, Q::one())))?;
        record(&mut c, "nu", Quantity::Eval, f, Some((Rel::Eq, Q::zero())))?;
        c.notes.push("exact: target(F) = 1 and nu(F) = 0".into());
        finish(c)
    }
}

/// A target-null set `C` carrying all atoms of `ν`.
///
/// Succeeds when the non-atomic part of `ν` relative to the target's blocks has
/// mass below `δ`.
pub struct StrongSeparator;

impl StrongSeparator {
    pub fn carrier(nu: &Measure, level: u32, delta: &Q) -> Result<SetTerm> {
        let d = decompose(nu, level)?;
        let (_, diffuse) = d.atomic_split();
        let diffuse_mass: Q = diffuse.iter().map(|c| c.weight.clone()).sum();
        if diffuse_mass >= *delta {
            return Err(Error::OracleFailure(format!(
                "non-atomic mass {diffuse_mass} is not below {delta}"
            )));
        }
        d.atomic_carrier()
    }
}

impl Separator for StrongSeparator {
    fn name(&self) -> &'static str {
        "strong"
    }

    fn describe(&self) -> &'static str {
        "target-null carrier of the atoms of nu"
    }

    fn separate(&self, input: &SeparationInput) -> Result<Certificate> {
        let delta = input.delta()?;
        let nu = input.nu()?;
        let level = input.target.level();
        let v = Self::carrier(nu, level, &delta)?;
        let total = nu.eval_or_err(&SetTerm::full())?;
        let mut c = Certificate::new(CertKind::StrongOrthogonality, self.name(), v.clone(), delta.clone());
        c.measures.insert("target".into(), Measure::Level(input.target));
        c.measures.insert("nu".into(), nu.clone());
        record(&mut c, "nu", Quantity::Eval, v.clone(), Some((Rel::Gt, total - &delta)))?;
        let t = record(&mut c, "target", Quantity::Eval, v.clone(), Some((Rel::Eq, Q::zero())));
        if !matches!(t, Ok(ref z) if z.is_zero()) {
            return Err(Error::OracleFailure(format!("carrier {v} is not target-null")));
        }
        finish(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{FinSupp, LevelMeasure};
    use crate::natset::Point;
    use crate::separators::verify;

    fn input(level: u32, nu: Measure) -> SeparationInput {
        SeparationInput::new(LevelMeasure::new(level).unwrap()).with_delta(Q::new(1, 10)).with_nu(nu)
    }

    #[test]
    fn finsupp_examples() {
        let nu = FinSupp::uniform(vec![Point::Plain(0), Point::Plain(3), Point::new(vec![2], 5)]).unwrap();
        for level in 1..=3 {
            let c = FinSuppSeparator.separate(&input(level, Measure::FinSupp(nu.clone()))).unwrap();
            assert!(verify(&c).ok);
            assert_eq!(c.entries[0].value, Q::one());
            assert_eq!(c.entries[1].value, Q::zero());
        }
        let err = FinSuppSeparator.separate(&input(2, Measure::point_limit(0)));
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn strong_on_atoms() {
        let nu = Measure::mixture(vec![
            (Q::new(1, 2), Measure::point_limit(3)),
            (Q::new(1, 4), Measure::dirac(7)),
            (Q::new(1, 4), Measure::block_lifted(2, Measure::dirac(1))),
        ])
        .unwrap();
        let c = StrongSeparator.separate(&input(2, nu)).unwrap();
        assert!(verify(&c).ok, "{:?}", verify(&c).diagnostic);
        assert_eq!(c.entries[0].value, Q::one());
    }

    #[test]
    fn strong_refuses_diffuse_mass() {
        let nu = Measure::mixture(vec![
            (Q::new(1, 2), Measure::point_limit(3)),
            (Q::new(1, 2), Measure::level(2).unwrap()),
        ])
        .unwrap();
        assert!(matches!(StrongSeparator.separate(&input(2, nu)), Err(Error::OracleFailure(_))));
    }
}
