//! Syllables and normal forms of free-product elements.
//!
//! An element of `A_1 * ... * A_m * F_k` is stored as its unique alternating
//! syllable sequence: adjacent syllables lie in distinct factors and every
//! syllable is nontrivial. Each free generator counts as its own infinite
//! cyclic factor, so "distinct factors" covers the free part as well.

use serde::{Deserialize, Serialize};
use std::fmt;

/// One syllable of a normal form.
///
/// Abelian coordinates follow the factor's generator order: the first `rank`
/// entries are free-abelian (any integer), the remaining ones are torsion
/// coordinates kept reduced into `0..d_j`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Syllable {
    Abelian { factor: usize, coords: Vec<i64> },
    Free { gen: usize, exp: i64 },
}

impl Syllable {
    /// The factor slot this syllable lives in, with free generators mapped
    /// after the abelian factors so slots are comparable across kinds.
    pub fn factor_slot(&self, abelian_count: usize) -> usize {
        match self {
            Syllable::Abelian { factor, .. } => *factor,
            Syllable::Free { gen, .. } => abelian_count + *gen,
        }
    }
}

/// A group element in normal form.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NormalForm {
    pub(crate) syllables: Vec<Syllable>,
}

impl NormalForm {
    pub fn identity() -> Self {
        NormalForm { syllables: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn syllable_count(&self) -> usize {
        self.syllables.len()
    }

    /// Builds a normal form from raw syllables without reduction.
    /// Callers must guarantee alternation and nontriviality.
    pub(crate) fn from_reduced(syllables: Vec<Syllable>) -> Self {
        NormalForm { syllables }
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let mut first = true;
        for syl in &self.syllables {
            if !first {
                write!(f, "·")?;
            }
            first = false;
            match syl {
                Syllable::Abelian { factor, coords } => {
                    write!(f, "A{}{:?}", factor, coords)?;
                }
                Syllable::Free { gen, exp } => {
                    write!(f, "F{}^{}", gen, exp)?;
                }
            }
        }
        Ok(())
    }
}
