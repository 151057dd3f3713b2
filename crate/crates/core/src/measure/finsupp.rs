use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::natset::{Point, SetTerm};
use crate::rational::Q;

/// A finitely supported probability measure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFinSupp", deny_unknown_fields)]
pub struct FinSupp {
    points: Vec<Point>,
    weights: Vec<Q>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFinSupp {
    points: Vec<Point>,
    weights: Vec<Q>,
}

impl TryFrom<RawFinSupp> for FinSupp {
    type Error = Error;

    fn try_from(r: RawFinSupp) -> Result<FinSupp> {
        FinSupp::new(r.points, r.weights)
    }
}

impl FinSupp {
    pub fn new(points: Vec<Point>, weights: Vec<Q>) -> Result<FinSupp> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidArgument(
                "support and weights must be non-empty and of equal length".into(),
            ));
        }
        let distinct: BTreeSet<&Point> = points.iter().collect();
        if distinct.len() != points.len() {
            return Err(Error::InvalidArgument("support points must be distinct".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
            return Err(Error::InvalidArgument(format!("weight {w} is not positive")));
        }
        let total: Q = weights.iter().sum();
        if total != Q::one() {
            return Err(Error::Normalization(total));
        }
        Ok(FinSupp { points, weights })
    }

    /// Builds from possibly repeated points with non-negative masses, normalizing the total.
    pub fn from_masses<I: IntoIterator<Item = (Point, Q)>>(masses: I) -> Result<FinSupp> {
        let mut acc: BTreeMap<Point, Q> = BTreeMap::new();
        for (p, w) in masses {
            if w.is_negative() {
                return Err(Error::InvalidArgument(format!("negative mass {w}")));
            }
            if !w.is_zero() {
                let e = acc.entry(p).or_insert_with(Q::zero);
                *e = e.clone() + w;
            }
        }
        let total: Q = acc.values().sum();
        if total.is_zero() {
            return Err(Error::ZeroMass);
        }
        let (points, weights) = acc.into_iter().map(|(p, w)| (p, w / &total)).unzip();
        Ok(FinSupp { points, weights })
    }

    pub fn dirac(x: u64) -> FinSupp {
        FinSupp { points: vec![Point::Plain(x)], weights: vec![Q::one()] }
    }

    pub fn dirac_at(p: Point) -> FinSupp {
        FinSupp { points: vec![p], weights: vec![Q::one()] }
    }

    /// Uniform measure on the given distinct points.
    pub fn uniform(points: Vec<Point>) -> Result<FinSupp> {
        let n = points.len() as u64;
        if n == 0 {
            return Err(Error::InvalidArgument("empty support".into()));
        }
        let w = Q::ratio_u64(1, n);
        FinSupp::new(points, vec![w; n as usize])
    }

    pub fn uniform_below(n: u64) -> FinSupp {
        FinSupp {
            points: (0..=n).map(Point::Plain).collect(),
            weights: vec![Q::ratio_u64(1, n + 1); (n + 1) as usize],
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &Q)> {
        self.points.iter().zip(&self.weights)
    }

    pub fn eval(&self, t: &SetTerm) -> Q {
        let mut traced: HashMap<&[u32], SetTerm> = HashMap::new();
        let mut sum = Q::zero();
        for (p, w) in self.iter() {
            let hit = match p {
                Point::Plain(x) => t.member(*x),
                Point::Addressed { path, index } => traced
                    .entry(path.as_slice())
                    .or_insert_with(|| path.iter().fold(t.clone(), |acc, &n| acc.trace(n)))
                    .member(*index),
            };
            if hit {
                sum = sum + w;
            }
        }
        sum
    }

    /// Image under the lift into block `n`.
    pub fn push_into(&self, n: u32) -> FinSupp {
        FinSupp {
            points: self.points.iter().map(|p| p.push_into(n)).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Conditional measure on `y`.
    pub fn restrict(&self, y: &SetTerm) -> Result<FinSupp> {
        FinSupp::from_masses(
            self.iter().filter(|(p, _)| y.member_point(p)).map(|(p, w)| (p.clone(), w.clone())),
        )
    }

    /// Outermost blocks carrying the support.
    pub fn blocks(&self) -> BTreeSet<u32> {
        self.points.iter().map(|p| p.split_block().0).collect()
    }

    /// Complement of the support, a set of full measure for every diffuse measure.
    pub fn support_complement(&self) -> SetTerm {
        let (plain, addressed): (Vec<&Point>, Vec<&Point>) =
            self.points.iter().partition(|p| p.as_plain().is_some());
        let mut parts = vec![SetTerm::finite(plain.iter().filter_map(|p| p.as_plain()))];
        parts.extend(addressed.iter().map(|p| p.to_term()));
        SetTerm::compl(SetTerm::union(parts))
    }
}
