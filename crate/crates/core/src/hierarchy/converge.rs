use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::natset::SetTerm;
use crate::rational::Q;

use super::stream::WitnessStream;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergenceRow {
    pub stage: u64,
    pub generator_id: usize,
    pub witness: Q,
    pub target: Q,
    pub distance: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    pub horizon: u64,
    pub tol: Q,
    pub rows: Vec<ConvergenceRow>,
    /// Generator distance at each stage `0..=horizon`.
    pub distances: Vec<Q>,
    /// Least stage from which every later distance is within `tol`.
    pub settle_stage: Option<u64>,
    pub pass: bool,
}

impl ConvergenceReport {
    pub fn distance_at(&self, stage: u64) -> Option<&Q> {
        self.distances.get(stage as usize)
    }

    pub fn verdict_line(&self) -> String {
        let verdict = if self.pass { "pass" } else { "fail" };
        match self.settle_stage {
            Some(s) => format!(
                "# verdict {verdict}: within {} from stage {s} to horizon {}",
                self.tol, self.horizon
            ),
            None => format!(
                "# verdict {verdict}: final distance exceeds {} at horizon {}",
                self.tol, self.horizon
            ),
        }
    }

    /// Plot-ready rows followed by the verdict line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "stage,generator_id,witness_num,witness_den,target_num,target_den,dist_num,dist_den\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.stage,
                r.generator_id,
                r.witness.numer(),
                r.witness.denom(),
                r.target.numer(),
                r.target.denom(),
                r.distance.numer(),
                r.distance.denom()
            );
        }
        out.push_str(&self.verdict_line());
        out.push('\n');
        out
    }
}

/// Tabulates `generator_distance(stage_s, target, g)` for `s ≤ horizon`.
///
/// The verdict passes when the distance stays within `tol` on at least the
/// second half of the horizon.
pub fn converge_check(
    stream: &dyn WitnessStream,
    target: &Measure,
    g: &[SetTerm],
    tol: &Q,
    horizon: u64,
) -> Result<ConvergenceReport> {
    let stages = horizon as usize + 1;
    let mut per_gen = Vec::with_capacity(g.len());
    for t in g {
        let target_value = target
            .eval(t)
            .ok_or_else(|| Error::UndefinedValue(format!("{target} on {t}")))?;
        per_gen.push((target_value, stream.eval_stages(t, horizon)?));
    }
    let mut rows = Vec::with_capacity(stages * g.len());
    let mut distances = Vec::with_capacity(stages);
    for s in 0..stages {
        let mut d = Q::zero();
        for (i, (target_value, values)) in per_gen.iter().enumerate() {
            let distance = (values[s].clone() - target_value).abs();
            d = d.max(distance.clone());
            rows.push(ConvergenceRow {
                stage: s as u64,
                generator_id: i,
                witness: values[s].clone(),
                target: target_value.clone(),
                distance,
            });
        }
        distances.push(d);
    }
    let settle_stage = match distances.iter().rposition(|d| d > tol) {
        None => Some(0),
        Some(last) if last + 1 < stages => Some(last as u64 + 1),
        Some(_) => None,
    };
    let pass = settle_stage.is_some_and(|s| s <= horizon / 2);
    Ok(ConvergenceReport { horizon, tol: tol.clone(), rows, distances, settle_stage, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::stream::{level_stream, Constant};
    use crate::measure::{dyadic_preset, FinSupp};

    #[test]
    fn level_one_closed_form() {
        let g = [SetTerm::dyadic(1, [0])];
        let r = converge_check(&*level_stream(1), &Measure::level(1).unwrap(), &g, &Q::new(1, 50), 200)
            .unwrap();
        for n in 0..=200u64 {
            // ⌈(n+1)/2⌉ evens in {0..n}
            let expected = (Q::ratio_u64((n + 2) / 2, n + 1) - Q::new(1, 2)).abs();
            assert_eq!(r.distances[n as usize], expected);
            assert!(r.distances[n as usize] <= Q::ratio_u64(1, n + 1));
        }
        assert!(r.pass);
    }

    #[test]
    fn constant_stream() {
        let d = Measure::dirac(0);
        let st = Constant { measure: FinSupp::dirac(0) };
        let r = converge_check(&st, &d, &dyadic_preset(3), &Q::new(1, 1000), 20).unwrap();
        assert!(r.distances.iter().all(|d| d.is_zero()));
        assert_eq!(r.settle_stage, Some(0));
        assert!(r.pass);
    }

    #[test]
    fn honest_negative() {
        let r = converge_check(
            &*level_stream(1),
            &Measure::level(1).unwrap(),
            &dyadic_preset(4),
            &Q::new(1, 1_000_000_000),
            1,
        )
        .unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn level_two_diagonal_passes() {
        let mu2 = Measure::level(2).unwrap();
        let g: Vec<SetTerm> = dyadic_preset(4).into_iter().map(|m| m.tower_lift(1)).collect();
        let r = converge_check(&*level_stream(2), &mu2, &g, &Q::new(1, 50), 1000).unwrap();
        assert!(r.pass, "{}", r.verdict_line());
        let csv = r.to_csv();
        assert!(csv.starts_with("stage,generator_id,witness_num"));
        assert_eq!(csv.lines().count(), 2 + 1001 * 20);
    }
}
