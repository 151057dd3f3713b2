//! Certificates: every recorded value is re-evaluated from the embedded
//! measures and terms, and every recorded inequality is re-checked.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::measure::{LevelMeasure, Measure};
use crate::natset::{decide_empty, decide_equal, SetTerm};
use crate::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertKind {
    Orthogonality,
    StrongOrthogonality,
    FMembership,
    NullUnion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "q", rename_all = "snake_case")]
pub enum Quantity {
    /// `m(term)`.
    Eval,
    /// `μ′_n(term ∩ B_n)` for a level measure.
    Block { n: u32 },
    /// Bound on `sup_{n ≥ from} μ′_n(term ∩ B_n)` for a level measure.
    TailSup { from: u32 },
    /// Sum of the tail-sup bounds of `term` and each of `extra`.
    TailSupSum { from: u32, extra: Vec<SetTerm> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rel {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "=")]
    Eq,
}

impl Rel {
    pub fn holds(self, lhs: &Q, rhs: &Q) -> bool {
        match self {
            Rel::Lt => lhs < rhs,
            Rel::Le => lhs <= rhs,
            Rel::Gt => lhs > rhs,
            Rel::Eq => lhs == rhs,
        }
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub measure: String,
    #[serde(flatten)]
    pub quantity: Quantity,
    pub term: SetTerm,
    pub value: Q,
    /// `value rel bound`, when the entry carries an inequality.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<(Rel, Q)>,
}

/// Extensional facts about the witness set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "fact", rename_all = "snake_case")]
pub enum Structure {
    /// `trace(witness, n) = ℕ ∖ trace(removed, n)`.
    BlockComplement { n: u32, removed: SetTerm },
    /// `trace(witness, n) = inner`.
    BlockEquals { n: u32, inner: SetTerm },
    /// `term ⊆ witness`.
    Covers { term: SetTerm },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertKind,
    pub method: String,
    pub witness_set: SetTerm,
    pub delta: Q,
    /// Number of stream entries the construction saw.
    pub truncation: usize,
    /// Block indices `(n_i)`.
    #[serde(default)]
    pub schedule: Vec<u64>,
    /// Selected stream indices `(k_n)`.
    #[serde(default)]
    pub subsequence: Vec<u64>,
    pub measures: BTreeMap<String, Measure>,
    pub entries: Vec<Entry>,
    #[serde(default)]
    pub structure: Vec<Structure>,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    /// The first failing check.
    pub diagnostic: Option<String>,
}

impl Verdict {
    fn fail(msg: String) -> Verdict {
        Verdict { ok: false, diagnostic: Some(msg) }
    }
}

impl Certificate {
    pub fn new(kind: CertKind, method: &str, witness_set: SetTerm, delta: Q) -> Certificate {
        Certificate {
            kind,
            method: method.to_string(),
            witness_set,
            delta,
            truncation: 0,
            schedule: vec![],
            subsequence: vec![],
            measures: BTreeMap::new(),
            entries: vec![],
            structure: vec![],
            notes: vec![],
        }
    }

    /// Evaluates and records a quantity. `None` when it is not resolvable.
    pub fn record(
        &mut self,
        measure: &str,
        quantity: Quantity,
        term: SetTerm,
        check: Option<(Rel, Q)>,
    ) -> Option<Q> {
        let value = compute(self.measures.get(measure)?, &quantity, &term)?;
        self.entries.push(Entry { measure: measure.into(), quantity, term, value: value.clone(), check });
        Some(value)
    }
}

fn level_of(m: &Measure) -> Option<&LevelMeasure> {
    match m {
        Measure::Level(l) => Some(l),
        _ => None,
    }
}

fn compute(m: &Measure, q: &Quantity, t: &SetTerm) -> Option<Q> {
    match q {
        Quantity::Eval => m.eval(t),
        Quantity::Block { n } => level_of(m)?.block_value(t, *n),
        Quantity::TailSup { from } => level_of(m)?.tail_sup_bound(t, *from),
        Quantity::TailSupSum { from, extra } => {
            let l = level_of(m)?;
            let mut sum = l.tail_sup_bound(t, *from)?;
            for e in extra {
                sum = sum + l.tail_sup_bound(e, *from)?;
            }
            Some(sum)
        }
    }
}

/// `t ⊆ w` because every union argument of `t` is one of `w`.
fn covers_syntactically(w: &SetTerm, t: &SetTerm) -> bool {
    fn args(x: &SetTerm) -> &[SetTerm] {
        match x {
            SetTerm::Union(v) => v,
            _ => std::slice::from_ref(x),
        }
    }
    w == t || args(t).iter().all(|x| args(w).contains(x))
}

fn strictly_increasing(v: &[u64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

/// Re-checks the certificate from scratch.
pub fn verify(c: &Certificate) -> Verdict {
    if !c.delta.is_positive() {
        return Verdict::fail(format!("delta {} is not positive", c.delta));
    }
    for (i, e) in c.entries.iter().enumerate() {
        let Some(m) = c.measures.get(&e.measure) else {
            return Verdict::fail(format!("entry {i}: unknown measure {:?}", e.measure));
        };
        match compute(m, &e.quantity, &e.term) {
            None => {
                return Verdict::fail(format!("entry {i}: {} on {} is not resolvable", e.measure, e.term))
            }
            Some(v) if v != e.value => {
                return Verdict::fail(format!(
                    "entry {i}: {} on {} recomputes to {v}, recorded {}",
                    e.measure, e.term, e.value
                ))
            }
            Some(_) => {}
        }
        if let Some((rel, rhs)) = &e.check {
            if !rel.holds(&e.value, rhs) {
                return Verdict::fail(format!(
                    "entry {i}: {} on {}: {} {rel} {rhs} fails",
                    e.measure, e.term, e.value
                ));
            }
        }
    }
    for (i, s) in c.structure.iter().enumerate() {
        let holds = match s {
            Structure::BlockComplement { n, removed } => decide_equal(
                &c.witness_set.trace(*n),
                &SetTerm::compl(removed.trace(*n)),
            ),
            Structure::BlockEquals { n, inner } => decide_equal(&c.witness_set.trace(*n), inner),
            Structure::Covers { term } if covers_syntactically(&c.witness_set, term) => Some(true),
            Structure::Covers { term } => {
                decide_empty(&SetTerm::diff(vec![term.clone(), c.witness_set.clone()]))
            }
        };
        if holds != Some(true) {
            return Verdict::fail(format!("structure {i} ({s:?}) does not hold"));
        }
    }
    if !strictly_increasing(&c.schedule) {
        return Verdict::fail("block schedule is not strictly increasing".into());
    }
    if !strictly_increasing(&c.subsequence) {
        return Verdict::fail("subsequence is not strictly increasing".into());
    }
    if let Err(msg) = defining_inequalities(c) {
        return Verdict::fail(msg);
    }
    Verdict { ok: true, diagnostic: None }
}

/// The inequalities that define the certificate kind, evaluated directly.
fn defining_inequalities(c: &Certificate) -> Result<(), String> {
    let eval = |id: &str, t: &SetTerm| -> Result<Q, String> {
        let m = c.measures.get(id).ok_or_else(|| format!("missing measure {id:?}"))?;
        m.eval(t).ok_or_else(|| format!("{id} on {t} is not resolvable"))
    };
    let f = &c.witness_set;
    let one = Q::one();
    match c.kind {
        CertKind::Orthogonality => {
            let target = eval("target", f)?;
            let nu = eval("nu", f)?;
            if !(target > one - &c.delta && nu < c.delta) {
                return Err(format!("target(F) = {target}, nu(F) = {nu} with delta {}", c.delta));
            }
        }
        CertKind::StrongOrthogonality => {
            let nu = eval("nu", f)?;
            let total = eval("nu", &SetTerm::full())?;
            let target = eval("target", f)?;
            if !(nu > total.clone() - &c.delta && target.is_zero()) {
                return Err(format!("nu(C) = {nu} of {total}, target(C) = {target}"));
            }
        }
        CertKind::FMembership => {
            let target = eval("target", f)?;
            if target != one {
                return Err(format!("target(F) = {target}, not 1"));
            }
            for k in &c.subsequence {
                let v = eval(&format!("lambda{k}"), f)?;
                if v > c.delta {
                    return Err(format!("lambda{k}(F) = {v} exceeds {}", c.delta));
                }
            }
        }
        CertKind::NullUnion => {
            let target = eval("target", f)?;
            if !target.is_zero() {
                return Err(format!("target(A) = {target}, not 0"));
            }
        }
    }
    Ok(())
}
