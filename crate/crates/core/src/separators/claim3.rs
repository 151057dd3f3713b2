use crate::error::{Error, Result};
use crate::measure::{LevelMeasure, Measure};
use crate::natset::{Profile, SetTerm};
use crate::rational::Q;

use super::{
    finish, lambda_id, record, CertKind, Certificate, Quantity, Rel, SeparationInput, Separator,
    StrongSeparator, Structure,
};

/// How far past a term's threshold the block schedule search looks.
pub const SCHEDULE_SEARCH: u32 = 1 << 12;

/// An ℱ-member avoiding a stream of measures that each live on a target-null set.
///
/// With `U_i = V_0 ∪ … ∪ V_i` and blocks `n_0 < n_1 < …` chosen so that
/// `μ′_n(U_i) < 1/(i+1)` for `n ≥ n_i`, the witness removes `U_i` from the
/// blocks `n_i ≤ n < n_{i+1}`.
pub struct Claim3;

/// Least `n ≥ from` with `tail_sup_bound(t, n) < bound`.
pub(crate) fn first_block_below(mu: &LevelMeasure, t: &[SetTerm], from: u32, bound: &Q) -> Result<u32> {
    let reach = t.iter().map(|x| Profile::of(x).threshold).max().unwrap_or(0).max(from);
    for n in from..=reach.saturating_add(SCHEDULE_SEARCH) {
        let mut sum = Q::zero();
        for x in t {
            let s = mu
                .tail_sup_bound(x, n)
                .ok_or_else(|| Error::DecayUnresolvable(format!("per-block values of {x}")))?;
            sum = sum + s;
        }
        if sum < *bound {
            return Ok(n);
        }
    }
    Err(Error::DecayUnresolvable(format!(
        "no block in {from}..={} brings the tail below {bound}",
        reach.saturating_add(SCHEDULE_SEARCH)
    )))
}

impl Separator for Claim3 {
    fn name(&self) -> &'static str {
        "claim3"
    }

    fn describe(&self) -> &'static str {
        "F-member of small measure for a stream living on target-null sets"
    }

    fn separate(&self, input: &SeparationInput) -> Result<Certificate> {
        let delta = input.delta()?;
        let mu = input.target;
        if mu.level() < 2 {
            return Err(Error::InvalidArgument("claim3 needs a target of level at least 2".into()));
        }
        let mut vs = Vec::with_capacity(input.stream.len());
        for (k, e) in input.stream.iter().enumerate() {
            let v = match &e.v {
                Some(v) => v.clone(),
                None => StrongSeparator::carrier(&e.measure, mu.level(), &delta)?,
            };
            match mu.eval(&v) {
                None => return Err(Error::DecayUnresolvable(format!("target on {v}"))),
                Some(z) if !z.is_zero() => {
                    return Err(Error::InvalidArgument(format!("{v} has target measure {z}")))
                }
                Some(_) => {}
            }
            let total = e.measure.eval_or_err(&SetTerm::full())?;
            let on_v = e.measure.eval_or_err(&v)?;
            if let Some(b) = &e.bound {
                if *b != on_v {
                    return Err(Error::CertificateInvalid(format!(
                        "lambda{k} on {v} is {on_v}, stream claims {b}"
                    )));
                }
            }
            if on_v <= total - &delta {
                return Err(Error::InvalidArgument(format!("lambda{k} has mass {on_v} on {v}")));
            }
            vs.push(v);
        }
        let us: Vec<SetTerm> =
            (0..vs.len()).map(|i| SetTerm::union(vs[..=i].to_vec())).collect();
        let mut schedule = Vec::with_capacity(us.len());
        for (i, u) in us.iter().enumerate() {
            let from = schedule.last().map_or(0, |&n: &u32| n + 1);
            schedule.push(first_block_below(&mu, std::slice::from_ref(u), from, &Q::ratio_u64(1, i as u64 + 1))?);
        }
        let mut segments = Vec::with_capacity(us.len());
        let mut samples = Vec::new();
        for (i, u) in us.iter().enumerate() {
            let lo = schedule[i];
            let range = match schedule.get(i + 1) {
                Some(&hi) => {
                    samples.push((i, lo));
                    if hi - 1 > lo {
                        samples.push((i, hi - 1));
                    }
                    SetTerm::union((lo..hi).map(SetTerm::Block).collect())
                }
                None => {
                    samples.push((i, lo));
                    samples.push((i, lo + 1));
                    SetTerm::compl(SetTerm::blocks_below(lo))
                }
            };
            segments.push(SetTerm::diff(vec![range, u.clone()]));
        }
        let f = if us.is_empty() { SetTerm::full() } else { SetTerm::union(segments) };

        let mut c = Certificate::new(CertKind::FMembership, self.name(), f.clone(), delta.clone());
        c.truncation = input.stream.len();
        c.schedule = schedule.iter().map(|&n| n as u64).collect();
        c.subsequence = (0..input.stream.len() as u64).collect();
        c.measures.insert("target".into(), Measure::Level(mu));
        for (k, e) in input.stream.iter().enumerate() {
            c.measures.insert(lambda_id(k), e.measure.clone());
        }
        for (k, v) in vs.iter().enumerate() {
            let total = input.stream[k].measure.eval_or_err(&SetTerm::full())?;
            record(&mut c, &lambda_id(k), Quantity::Eval, v.clone(), Some((Rel::Gt, total - &delta)))?;
            record(&mut c, "target", Quantity::Eval, v.clone(), Some((Rel::Eq, Q::zero())))?;
        }
        for (i, u) in us.iter().enumerate() {
            let bound = Q::ratio_u64(1, i as u64 + 1);
            record(&mut c, "target", Quantity::TailSup { from: schedule[i] }, u.clone(), Some((Rel::Lt, bound)))?;
        }
        for (i, n) in samples {
            let bound = Q::one() - Q::ratio_u64(1, i as u64 + 1);
            record(&mut c, "target", Quantity::Block { n }, f.clone(), Some((Rel::Gt, bound)))?;
            c.structure.push(Structure::BlockComplement { n, removed: us[i].clone() });
        }
        for k in 0..vs.len() {
            record(&mut c, &lambda_id(k), Quantity::Eval, f.clone(), Some((Rel::Lt, delta.clone())))?;
        }
        record(&mut c, "target", Quantity::Eval, f, Some((Rel::Eq, Q::one())))?;
        finish(c)
    }
}
