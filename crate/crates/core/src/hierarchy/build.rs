use serde::Serialize;

use crate::config::DEFAULT_MAX_LEVEL;
use crate::error::{Error, Result};
use crate::measure::{dyadic_preset, lebesgue, LevelMeasure};
use crate::natset::SetTerm;
use crate::rational::Q;

/// A level of the tower together with the generators it is tested on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelBuild {
    level: u32,
    measure: LevelMeasure,
    /// The dyadic sets `M` behind the ℱ′ generators.
    dyadic: Vec<SetTerm>,
    /// `φ_α(M)` for each `M` in `dyadic`.
    generators: Vec<SetTerm>,
    /// ℱ-members added during experiments.
    named: Vec<(String, SetTerm)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorRow {
    pub id: String,
    pub term: SetTerm,
    pub value: Q,
    pub lebesgue: Option<Q>,
}

impl LevelBuild {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn measure(&self) -> &LevelMeasure {
        &self.measure
    }

    pub fn generators(&self) -> &[SetTerm] {
        &self.generators
    }

    pub fn dyadic_sets(&self) -> &[SetTerm] {
        &self.dyadic
    }

    pub fn named(&self) -> &[(String, SetTerm)] {
        &self.named
    }

    pub fn add_named(&mut self, name: impl Into<String>, t: SetTerm) {
        self.named.push((name.into(), t));
    }

    /// `⋃_n φ_{α-1}(M)^n`: the lift of a lower-level generator into every block.
    pub fn wire(&self, lower: &SetTerm) -> SetTerm {
        SetTerm::diagonal_const(lower.clone())
    }

    /// Values on the generator family with their Lebesgue counterparts.
    pub fn generator_table(&self) -> Result<Vec<GeneratorRow>> {
        let mut rows = Vec::new();
        for (i, (m, g)) in self.dyadic.iter().zip(&self.generators).enumerate() {
            rows.push(GeneratorRow {
                id: format!("g{i}"),
                term: g.clone(),
                value: self.value(g)?,
                lebesgue: lebesgue(m),
            });
        }
        for (name, t) in &self.named {
            rows.push(GeneratorRow {
                id: name.clone(),
                term: t.clone(),
                value: self.value(t)?,
                lebesgue: None,
            });
        }
        Ok(rows)
    }

    fn value(&self, t: &SetTerm) -> Result<Q> {
        self.measure.eval(t).ok_or_else(|| Error::UndefinedValue(t.to_string()))
    }
}

/// μ⁽¹⁾ = asymptotic density on the dyadic generators of level at most `max_k`.
pub fn build_level1(max_k: u32) -> LevelBuild {
    let dyadic = dyadic_preset(max_k);
    LevelBuild {
        level: 1,
        measure: LevelMeasure::density(),
        generators: dyadic.clone(),
        dyadic,
        named: vec![],
    }
}

/// The canonical successor of a build whose blocks all carry copies of `base`.
pub fn canonical_pair(base: &LevelBuild) -> Result<LevelBuild> {
    for g in base.generators.iter().chain(base.named.iter().map(|(_, t)| t)) {
        if base.measure.eval(g).is_none() {
            return Err(Error::InexactBase(g.to_string()));
        }
    }
    let measure = LevelMeasure::new(base.level + 1)?;
    let generators: Vec<SetTerm> = base.generators.iter().map(|g| base.wire(g)).collect();
    for (m, g) in base.dyadic.iter().zip(&generators) {
        let value = measure.eval(g).ok_or_else(|| Error::InexactBase(g.to_string()))?;
        if Some(&value) != lebesgue(m).as_ref() {
            return Err(Error::InexactBase(format!("{g} evaluates to {value}")));
        }
    }
    Ok(LevelBuild {
        level: base.level + 1,
        measure,
        dyadic: base.dyadic.clone(),
        generators,
        named: vec![],
    })
}

/// The uniform tower build at `level`, for `1 ≤ level ≤ max_level`.
pub fn build_level(level: u32, max_level: u32, max_k: u32) -> Result<LevelBuild> {
    if level == 0 || level > max_level {
        return Err(Error::LevelOutOfRange { level, max: max_level });
    }
    let mut b = build_level1(max_k);
    while b.level < level {
        b = canonical_pair(&b)?;
    }
    Ok(b)
}

/// [`build_level`] with the default maximum level.
pub fn preset(level: u32) -> Result<LevelBuild> {
    build_level(level, DEFAULT_MAX_LEVEL, crate::config::DEFAULT_GENERATOR_LEVEL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::natset::Family;

    #[test]
    fn level_one_values() {
        let b = build_level1(4);
        let mu = b.measure();
        assert_eq!(mu.eval(&SetTerm::dyadic(1, [0])), Some(Q::new(1, 2)));
        assert_eq!(mu.eval(&SetTerm::finite(0..100)), Some(Q::zero()));
        assert_eq!(mu.eval(&SetTerm::full()), Some(Q::one()));
        for row in b.generator_table().unwrap() {
            assert_eq!(Some(row.value), row.lebesgue);
        }
    }

    #[test]
    fn canonical_pair_examples() {
        let b2 = canonical_pair(&build_level1(4)).unwrap();
        let mu = b2.measure();
        assert_eq!(mu.eval(&SetTerm::diagonal_const(SetTerm::evens())), Some(Q::new(1, 2)));
        assert_eq!(mu.eval(&SetTerm::Block(5)), Some(Q::zero()));
        // per-block level-1 values 1 - 1/(n+1)
        let f = SetTerm::compl(SetTerm::Diagonal(Family::Multiples { offset: 0 }));
        assert_eq!(mu.eval(&f), Some(Q::one()));
        for row in b2.generator_table().unwrap() {
            assert_eq!(Some(row.value), row.lebesgue);
        }
    }

    #[test]
    fn inexact_base_is_rejected() {
        let mut b = build_level1(2);
        b.add_named("log2", SetTerm::Diagonal(Family::Multiples { offset: 0 }));
        assert!(matches!(canonical_pair(&b), Err(Error::InexactBase(_))));
    }

    #[test]
    fn level_range() {
        assert!(matches!(preset(0), Err(Error::LevelOutOfRange { .. })));
        assert!(matches!(preset(4), Err(Error::LevelOutOfRange { .. })));
        assert_eq!(preset(3).unwrap().level(), 3);
    }
}
