use crate::error::{Error, Result};
use crate::measure::{decompose, Decomposition, FinSupp, Measure};
use crate::natset::SetTerm;
use crate::rational::Q;

use super::stream::{WitnessStream, MAX_SKIP};

/// Stage `s` of `inner` conditioned on the complement of `A_s`.
///
/// `schedule[i]` is `A_{i+1}`; stage `s` uses `A_s` (stage 0 uses `A_1`) and
/// the last entry repeats. An empty schedule leaves the stream unchanged.
pub struct Extracted {
    inner: Box<dyn WitnessStream>,
    schedule: Vec<SetTerm>,
}

impl Extracted {
    fn keep(&self, s: u64) -> SetTerm {
        match self.schedule.len() {
            0 => SetTerm::full(),
            len => {
                let i = (s.max(1) as usize - 1).min(len - 1);
                SetTerm::compl(self.schedule[i].clone())
            }
        }
    }

    fn effective(&self, s: u64, keep: &SetTerm) -> Result<(u64, Q)> {
        for e in s..=s + MAX_SKIP {
            let mass = self.inner.eval_stage(e, keep)?;
            if mass.is_positive() {
                return Ok((e, mass));
            }
        }
        Err(Error::ZeroMass)
    }
}

impl WitnessStream for Extracted {
    fn level(&self) -> u32 {
        self.inner.level()
    }

    fn provenance(&self) -> String {
        format!("extract({}, {} sets)", self.inner.provenance(), self.schedule.len())
    }

    fn stage(&self, s: u64) -> Result<FinSupp> {
        let keep = self.keep(s);
        let (e, _) = self.effective(s, &keep)?;
        self.inner.stage(e)?.restrict(&keep)
    }

    fn eval_stage(&self, s: u64, t: &SetTerm) -> Result<Q> {
        let keep = self.keep(s);
        let (e, mass) = self.effective(s, &keep)?;
        Ok(self.inner.eval_stage(e, &SetTerm::inter(vec![t.clone(), keep]))? / mass)
    }
}

/// Checks `ν″(A_n) < 1/n` and `ν′(ℕ ∖ A_n) < 1/n` for the schedule entries `A_1, A_2, …`.
pub fn check_schedule(d: &Decomposition, schedule: &[SetTerm]) -> Result<()> {
    let (atoms, diffuse) = d.atomic_split();
    let mass = |parts: &[crate::measure::Component], t: &SetTerm| -> Result<Q> {
        let mut sum = Q::zero();
        for c in parts {
            sum = sum + c.measure.eval_or_err(t)? * &c.weight;
        }
        Ok(sum)
    };
    for (i, a) in schedule.iter().enumerate() {
        let bound = Q::ratio_u64(1, i as u64 + 1);
        let inside = mass(&diffuse, a)?;
        if inside >= bound {
            return Err(Error::ScheduleViolation(format!(
                "non-atomic mass {inside} of A_{} is not below {bound}",
                i + 1
            )));
        }
        let outside = mass(&atoms, &SetTerm::compl(a.clone()))?;
        if outside >= bound {
            return Err(Error::ScheduleViolation(format!(
                "atomic mass {outside} off A_{} is not below {bound}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Schedule `A_n = ` the atomic carrier, constant in `n`.
pub fn atomic_schedule(d: &Decomposition, len: usize) -> Result<Vec<SetTerm>> {
    let (atoms, _) = d.atomic_split();
    if atoms.is_empty() {
        return Ok(vec![]);
    }
    Ok(vec![d.atomic_carrier()?; len])
}

/// Restricts a stream converging to `nu` to the complements of the schedule sets.
pub fn nonatomic_witness_extract(
    stream: Box<dyn WitnessStream>,
    nu: &Measure,
    ambient_level: u32,
    schedule: Vec<SetTerm>,
) -> Result<Extracted> {
    let d = decompose(nu, ambient_level)?;
    check_schedule(&d, &schedule)?;
    Ok(Extracted { inner: stream, schedule })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::converge::converge_check;
    use crate::hierarchy::stream::{level_stream, witness_for, Constant};
    use crate::measure::dyadic_preset;

    fn half_atom_half_density() -> Measure {
        Measure::mixture(vec![
            (Q::new(1, 2), Measure::dirac(0)),
            (Q::new(1, 2), Measure::level(1).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn empty_schedule_is_identity() {
        let mu1 = Measure::level(1).unwrap();
        let ex = nonatomic_witness_extract(level_stream(1), &mu1, 1, vec![]).unwrap();
        for s in [0, 5, 17] {
            assert_eq!(ex.stage(s).unwrap(), level_stream(1).stage(s).unwrap());
        }
    }

    #[test]
    fn dirac_drops_the_atom() {
        let nu = Measure::dirac(0);
        let st = Box::new(Constant { measure: FinSupp::uniform_below(3) });
        let ex = nonatomic_witness_extract(st, &nu, 1, vec![SetTerm::finite([0])]).unwrap();
        let expected = FinSupp::uniform_below(3).restrict(&SetTerm::finite([1, 2, 3])).unwrap();
        assert_eq!(ex.stage(4).unwrap(), expected);
    }

    #[test]
    fn mixed_extraction_converges() {
        let nu = half_atom_half_density();
        let d = decompose(&nu, 1).unwrap();
        let schedule = atomic_schedule(&d, 8).unwrap();
        assert_eq!(schedule[0], SetTerm::finite([0]));
        let ex = nonatomic_witness_extract(witness_for(&nu).unwrap(), &nu, 1, schedule).unwrap();
        let target = d.normalized_nonatomic().unwrap();
        let r = converge_check(&ex, &target, &dyadic_preset(4), &Q::new(1, 25), 1000).unwrap();
        assert!(r.pass, "{}", r.verdict_line());
    }

    #[test]
    fn violations_are_reported() {
        let nu = half_atom_half_density();
        // the bound for A_1 is 1, for A_2 it is 1/2
        let full = vec![SetTerm::full(); 2];
        let err = nonatomic_witness_extract(level_stream(1), &nu, 1, full);
        assert!(matches!(err, Err(Error::ScheduleViolation(_))));
        let wrong_atom = vec![SetTerm::finite([1]); 2];
        let err = nonatomic_witness_extract(level_stream(1), &nu, 1, wrong_atom);
        assert!(matches!(err, Err(Error::ScheduleViolation(_))));
    }
}
