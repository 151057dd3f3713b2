//! Splitting a structured measure into its block-supported part, the atoms
//! off the blocks, and a non-atomic remainder.
//!
//! The blocks depend on the ambient level: at level 1 they are the
//! singletons `{n}`, above it they are the sets `B_n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::natset::SetTerm;
use crate::rational::Q;

use super::Measure;

/// Number of leading blocks whose mass part0 is required to capture.
pub const TAIL_BLOCKS: u32 = 16;
/// Non-atomicity is certified for `ε = 2^-j`, `j = 1..=NONATOMIC_STEPS`.
pub const NONATOMIC_STEPS: u32 = 10;
const MAX_CELL_LEVEL: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentClass {
    BlockSupported,
    OffBlockAtom,
    NonAtomic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub weight: Q,
    pub measure: Measure,
    pub atomic: bool,
}

/// One step of the non-atomicity certificate: the `2^k` cells
/// `φ_level(Dyadic(k, {r}))` each carry part2-mass below `2^-j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonAtomicStep {
    pub j: u32,
    pub cell_level: u32,
    pub k: u32,
    pub max_cell: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub ambient_level: u32,
    pub part0: Vec<Component>,
    pub part1: Vec<Component>,
    pub part2: Vec<Component>,
    pub tail_bound: Q,
    pub nonatomic: Vec<NonAtomicStep>,
}

fn eval_parts(parts: &[Component], t: &SetTerm) -> Option<Q> {
    let mut sum = Q::zero();
    for c in parts {
        sum = sum + c.measure.eval(t)? * &c.weight;
    }
    Some(sum)
}

fn normalized(parts: &[Component]) -> Result<Measure> {
    let mass: Q = parts.iter().map(|c| &c.weight).sum();
    if mass.is_zero() {
        return Err(Error::ZeroMass);
    }
    if let [only] = parts {
        return Ok(only.measure.clone());
    }
    Measure::mixture(parts.iter().map(|c| (c.weight.clone() / &mass, c.measure.clone())).collect())
}

impl Decomposition {
    pub fn part(&self, i: usize) -> &[Component] {
        match i {
            0 => &self.part0,
            1 => &self.part1,
            _ => &self.part2,
        }
    }

    /// Value of part `i` (0, 1 or 2) on `t`.
    pub fn eval_part(&self, i: usize, t: &SetTerm) -> Option<Q> {
        eval_parts(self.part(i), t)
    }

    pub fn eval_total(&self, t: &SetTerm) -> Option<Q> {
        Some(self.eval_part(0, t)? + self.eval_part(1, t)? + self.eval_part(2, t)?)
    }

    pub fn mass(&self, i: usize) -> Q {
        self.part(i).iter().map(|c| &c.weight).sum()
    }

    fn components(&self) -> impl Iterator<Item = &Component> {
        self.part0.iter().chain(&self.part1).chain(&self.part2)
    }

    /// Atomic and non-atomic parts `ν′`, `ν″` as component lists.
    pub fn atomic_split(&self) -> (Vec<Component>, Vec<Component>) {
        self.components().cloned().partition(|c| c.atomic)
    }

    /// `ν″ / ν″(K)`.
    pub fn normalized_nonatomic(&self) -> Result<Measure> {
        normalized(&self.atomic_split().1)
    }

    /// A set carrying every atom and null for every non-atomic component.
    pub fn atomic_carrier(&self) -> Result<SetTerm> {
        let carriers: Result<Vec<SetTerm>> =
            self.atomic_split().0.iter().map(|c| carrier(&c.measure)).collect();
        Ok(SetTerm::union(carriers?))
    }

    /// Re-evaluates the non-atomicity certificate of part2.
    pub fn verify_nonatomic(&self) -> bool {
        if self.part2.is_empty() {
            return self.nonatomic.is_empty();
        }
        if self.nonatomic.len() != NONATOMIC_STEPS as usize {
            return false;
        }
        self.nonatomic.iter().enumerate().all(|(idx, step)| {
            step.j == idx as u32 + 1
                && max_cell_mass(&self.part2, step.cell_level, step.k).as_ref() == Some(&step.max_cell)
                && step.max_cell < Q::pow2_neg(step.j)
        })
    }
}

/// Decomposes a structured measure relative to the blocks of the given ambient level.
pub fn decompose(m: &Measure, ambient_level: u32) -> Result<Decomposition> {
    if ambient_level == 0 {
        return Err(Error::InvalidArgument("ambient level must be at least 1".into()));
    }
    let mut leaves = Vec::new();
    flatten(m, Q::one(), &mut leaves)?;
    let mut d = Decomposition {
        ambient_level,
        part0: vec![],
        part1: vec![],
        part2: vec![],
        tail_bound: Q::zero(),
        nonatomic: vec![],
    };
    let outside = if ambient_level == 1 {
        SetTerm::compl(SetTerm::finite(0..TAIL_BLOCKS as u64))
    } else {
        SetTerm::compl(SetTerm::blocks_below(TAIL_BLOCKS))
    };
    for (weight, leaf) in leaves {
        let class = classify(&leaf, ambient_level)?;
        let component = Component { weight, atomic: is_atomic(&leaf), measure: leaf };
        match class {
            ComponentClass::BlockSupported => {
                let tail = component.measure.eval(&outside).ok_or_else(|| {
                    Error::Unstructured(format!("tail of {} unresolved", component.measure))
                })?;
                d.tail_bound = d.tail_bound + tail * &component.weight;
                d.part0.push(component);
            }
            ComponentClass::OffBlockAtom | ComponentClass::NonAtomic => {
                check_null_on_blocks(&component.measure, ambient_level)?;
                if class == ComponentClass::OffBlockAtom {
                    d.part1.push(component);
                } else {
                    d.part2.push(component);
                }
            }
        }
    }
    if !d.part2.is_empty() {
        let level = d.part2.iter().map(|c| cell_level(&c.measure)).max().unwrap_or(1);
        let mut k = 1;
        for j in 1..=NONATOMIC_STEPS {
            let eps = Q::pow2_neg(j);
            loop {
                if k > MAX_CELL_LEVEL {
                    return Err(Error::Unstructured(format!(
                        "part2 keeps a cell of mass at least {eps} at dyadic level {MAX_CELL_LEVEL}"
                    )));
                }
                let max = max_cell_mass(&d.part2, level, k).ok_or_else(|| {
                    Error::Unstructured("part2 has no exact value on a dyadic cell".into())
                })?;
                if max < eps {
                    d.nonatomic.push(NonAtomicStep { j, cell_level: level, k, max_cell: max });
                    break;
                }
                k += 1;
            }
        }
    }
    Ok(d)
}

fn flatten(m: &Measure, w: Q, out: &mut Vec<(Q, Measure)>) -> Result<()> {
    if w.is_zero() {
        return Ok(());
    }
    match m {
        Measure::Mixture { mix } => {
            for (v, inner) in mix {
                flatten(inner, w.clone() * v, out)?;
            }
        }
        Measure::Restricted { restrict, to } if matches!(**restrict, Measure::Mixture { .. }) => {
            let mut inner = Vec::new();
            flatten(restrict, Q::one(), &mut inner)?;
            let mass = m_eval(restrict, to)?;
            for (v, leaf) in inner {
                let part = m_eval(&leaf, to)?;
                if !part.is_zero() {
                    let r = Measure::Restricted { restrict: Box::new(leaf), to: to.clone() };
                    out.push((w.clone() * v * part / &mass, r));
                }
            }
        }
        Measure::Reweighted { reweight, density } if matches!(**reweight, Measure::Mixture { .. }) => {
            let mut inner = Vec::new();
            flatten(reweight, Q::one(), &mut inner)?;
            for (v, leaf) in inner {
                let mut integral = Q::zero();
                for (a, c) in density {
                    integral = integral + m_eval(&leaf, a)? * c;
                }
                if !integral.is_zero() {
                    let scaled = density.iter().map(|(a, c)| (a.clone(), c.clone() / &integral)).collect();
                    let r = Measure::Reweighted { reweight: Box::new(leaf), density: scaled };
                    out.push((w.clone() * v * integral, r));
                }
            }
        }
        _ => out.push((w, m.clone())),
    }
    Ok(())
}

fn m_eval(m: &Measure, t: &SetTerm) -> Result<Q> {
    m.eval(t).ok_or_else(|| Error::Unstructured(format!("{m} has no exact value on {t}")))
}

fn classify(m: &Measure, ambient: u32) -> Result<ComponentClass> {
    Ok(match m {
        Measure::FinSupp(_) => ComponentClass::BlockSupported,
        Measure::PointLimit { .. } => ComponentClass::OffBlockAtom,
        Measure::Level(l) if ambient >= 2 && l.level() == 1 => ComponentClass::BlockSupported,
        Measure::Level(_) => ComponentClass::NonAtomic,
        Measure::BlockLifted { .. } if ambient >= 2 => ComponentClass::BlockSupported,
        Measure::BlockLifted { inner, .. } => match classify(inner, 1)? {
            ComponentClass::BlockSupported if is_atomic(inner) => ComponentClass::BlockSupported,
            ComponentClass::BlockSupported | ComponentClass::OffBlockAtom if is_atomic(inner) => {
                ComponentClass::OffBlockAtom
            }
            _ => ComponentClass::NonAtomic,
        },
        Measure::Restricted { restrict: base, .. } | Measure::Reweighted { reweight: base, .. } => {
            classify(base, ambient)?
        }
        Measure::Mixture { .. } => {
            return Err(Error::Unstructured("nested mixture under a restriction".into()))
        }
    })
}

/// Whether the measure is purely atomic.
fn is_atomic(m: &Measure) -> bool {
    match m {
        Measure::FinSupp(_) | Measure::PointLimit { .. } => true,
        Measure::Level(_) => false,
        Measure::BlockLifted { inner, .. } => is_atomic(inner),
        Measure::Restricted { restrict: base, .. } | Measure::Reweighted { reweight: base, .. } => {
            is_atomic(base)
        }
        Measure::Mixture { mix } => mix.iter().all(|(_, m)| is_atomic(m)),
    }
}

/// A set of full measure for an atomic measure that every non-atomic tower measure annihilates.
fn carrier(m: &Measure) -> Result<SetTerm> {
    match m {
        Measure::FinSupp(f) => Ok(SetTerm::compl(f.support_complement())),
        Measure::PointLimit { limit_point } => {
            Ok(SetTerm::diagonal_const(SetTerm::finite([*limit_point])))
        }
        Measure::BlockLifted { block, inner } => Ok(SetTerm::lift(*block, carrier(inner)?)),
        Measure::Restricted { restrict: base, .. } | Measure::Reweighted { reweight: base, .. } => {
            carrier(base)
        }
        Measure::Mixture { mix } => {
            Ok(SetTerm::union(mix.iter().map(|(_, m)| carrier(m)).collect::<Result<_>>()?))
        }
        Measure::Level(_) => Err(Error::Unstructured(format!("{m} has no atoms"))),
    }
}

fn check_null_on_blocks(m: &Measure, ambient: u32) -> Result<()> {
    for b in 0..TAIL_BLOCKS {
        let block = if ambient == 1 { SetTerm::finite([b as u64]) } else { SetTerm::Block(b) };
        if m_eval(m, &block)? != Q::zero() {
            return Err(Error::Unstructured(format!("{m} charges block {b}")));
        }
    }
    Ok(())
}

/// Tower level whose lifted dyadic cells split the measure evenly.
fn cell_level(m: &Measure) -> u32 {
    match m {
        Measure::Level(l) => l.level(),
        Measure::BlockLifted { inner, .. } => cell_level(inner) + 1,
        Measure::Restricted { restrict: base, .. } | Measure::Reweighted { reweight: base, .. } => {
            cell_level(base)
        }
        Measure::Mixture { mix } => mix.iter().map(|(_, m)| cell_level(m)).max().unwrap_or(1),
        Measure::FinSupp(_) | Measure::PointLimit { .. } => 1,
    }
}

fn max_cell_mass(parts: &[Component], level: u32, k: u32) -> Option<Q> {
    let mut max = Q::zero();
    for r in 0..1u64 << k {
        let cell = SetTerm::dyadic(k, [r]).tower_lift(level - 1);
        max = max.max(eval_parts(parts, &cell)?);
    }
    Some(max)
}
