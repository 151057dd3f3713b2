//! Separating sets for orthogonal measures, each returned with a certificate.

mod certificate;
mod claim3;
mod claim4;
mod nullunion;
mod oracle;
mod simple;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{LevelMeasure, Measure};
use crate::natset::SetTerm;
use crate::rational::Q;

pub use certificate::{verify, CertKind, Certificate, Entry, Quantity, Rel, Structure, Verdict};
pub use claim3::Claim3;
pub use claim4::{synthetic_block_stream, Claim4};
pub use nullunion::NullUnion;
pub use oracle::{BlockOracle, DyadicCellOracle};
pub use simple::{FinSuppSeparator, StrongSeparator};

/// One element of an input stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamEntry {
    pub measure: Measure,
    /// A target-null set carrying most of the measure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<SetTerm>,
    /// The claimed value of the measure on `v`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Q>,
}

impl StreamEntry {
    pub fn new(measure: Measure) -> StreamEntry {
        StreamEntry { measure, v: None, bound: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparationInput {
    pub target: LevelMeasure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Measure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stream: Vec<StreamEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<SetTerm>,
}

impl SeparationInput {
    pub fn new(target: LevelMeasure) -> SeparationInput {
        SeparationInput { target, delta: None, nu: None, stream: vec![], terms: vec![] }
    }

    pub fn with_delta(mut self, delta: Q) -> SeparationInput {
        self.delta = Some(delta);
        self
    }

    pub fn with_nu(mut self, nu: Measure) -> SeparationInput {
        self.nu = Some(nu);
        self
    }

    pub fn with_stream(mut self, stream: Vec<StreamEntry>) -> SeparationInput {
        self.stream = stream;
        self
    }

    pub fn with_terms(mut self, terms: Vec<SetTerm>) -> SeparationInput {
        self.terms = terms;
        self
    }

    fn delta(&self) -> Result<Q> {
        match &self.delta {
            Some(d) if d.is_positive() && *d < Q::one() => Ok(d.clone()),
            Some(d) => Err(Error::InvalidArgument(format!("delta {d} is not in (0, 1)"))),
            None => Err(Error::InvalidArgument("delta is required".into())),
        }
    }

    fn nu(&self) -> Result<&Measure> {
        self.nu.as_ref().ok_or_else(|| Error::InvalidArgument("nu is required".into()))
    }
}

pub trait Separator: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn separate(&self, input: &SeparationInput) -> Result<Certificate>;
}

/// Named separation strategies.
pub struct Registry {
    entries: Vec<Box<dyn Separator>>,
}

impl Registry {
    pub fn empty() -> Registry {
        Registry { entries: vec![] }
    }

    pub fn standard() -> Registry {
        let mut r = Registry::empty();
        r.register(Box::new(FinSuppSeparator));
        r.register(Box::new(StrongSeparator));
        r.register(Box::new(Claim3));
        r.register(Box::new(Claim4::default()));
        r.register(Box::new(NullUnion));
        r
    }

    /// Adds a strategy, replacing any with the same name.
    pub fn register(&mut self, s: Box<dyn Separator>) {
        self.entries.retain(|e| e.name() != s.name());
        self.entries.push(s);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Separator> {
        self.entries.iter().find(|e| e.name() == name).map(|e| &**e)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn run(&self, name: &str, input: &SeparationInput) -> Result<Certificate> {
        let s = self.get(name).ok_or_else(|| {
            Error::InvalidArgument(format!("unknown method {name:?}, expected one of {:?}", self.names()))
        })?;
        s.separate(input)
    }
}

/// Records `quantity` or fails with `UndefinedValue`.
fn record(
    c: &mut Certificate,
    measure: &str,
    quantity: Quantity,
    term: SetTerm,
    check: Option<(Rel, Q)>,
) -> Result<Q> {
    let what = format!("{measure} on {term}");
    c.record(measure, quantity, term, check).ok_or(Error::UndefinedValue(what))
}

/// Fails with `CertificateInvalid` unless the certificate re-verifies.
fn finish(c: Certificate) -> Result<Certificate> {
    let v = verify(&c);
    match v.diagnostic {
        None => Ok(c),
        Some(msg) => Err(Error::CertificateInvalid(msg)),
    }
}

fn lambda_id(k: usize) -> String {
    format!("lambda{k}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::FinSupp;

    #[test]
    fn registry_lookup() {
        let r = Registry::standard();
        assert_eq!(r.names(), vec!["finsupp", "strong", "claim3", "claim4", "nullunion"]);
        let input = SeparationInput::new(LevelMeasure::new(2).unwrap());
        assert!(matches!(r.run("nope", &input), Err(Error::InvalidArgument(_))));
        assert!(matches!(r.run("finsupp", &input), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn certificate_round_trip() {
        let input = SeparationInput::new(LevelMeasure::new(2).unwrap())
            .with_delta(Q::new(1, 8))
            .with_nu(Measure::FinSupp(FinSupp::uniform_below(3)));
        let json = serde_json::to_string(&input).unwrap();
        assert_eq!(serde_json::from_str::<SeparationInput>(&json).unwrap(), input);
        let c = Registry::standard().run("finsupp", &input).unwrap();
        let back: Certificate = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(verify(&back).ok);
    }

    #[test]
    fn tampered_relation_fails() {
        let input = SeparationInput::new(LevelMeasure::new(1).unwrap())
            .with_delta(Q::new(1, 8))
            .with_nu(Measure::dirac(4));
        let mut c = Registry::standard().run("finsupp", &input).unwrap();
        c.entries[1].check = Some((Rel::Gt, Q::zero()));
        assert!(!verify(&c).ok);
        let mut c = Registry::standard().run("finsupp", &input).unwrap();
        c.witness_set = SetTerm::full();
        let v = verify(&c);
        assert!(!v.ok && v.diagnostic.is_some());
    }
}
