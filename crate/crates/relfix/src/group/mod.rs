//! Free products of finitely generated abelian factors and a free part.
//!
//! A [`GroupSpec`] fixes the factors, the finite generating set `X` (all
//! declared generators plus any adjoined extra letters) and the peripheral
//! structure: an abelian factor is peripheral exactly when its free-abelian
//! rank is at least 2, i.e. when it is not virtually cyclic.

mod metrics;
mod syllable;
mod window;

pub use syllable::{NormalForm, Syllable};
pub use window::{DomainIter, DomainWindow};

use crate::error::{Error, Result};
use dashmap::DashMap;
use std::collections::BTreeMap;
use std::fmt;

/// A finitely generated abelian free factor `Z^rank x Z_{d_1} x ... x Z_{d_s}`.
///
/// The generator list names the free-abelian generators first, then one
/// generator per torsion order, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianFactor {
    pub name: String,
    pub rank: usize,
    pub torsion: Vec<u64>,
    pub generator_names: Vec<String>,
}

impl AbelianFactor {
    pub fn coord_count(&self) -> usize {
        self.rank + self.torsion.len()
    }

    /// Order of the cyclic direct summand behind coordinate `i` (None = infinite).
    pub fn coord_order(&self, i: usize) -> Option<u64> {
        if i < self.rank {
            None
        } else {
            Some(self.torsion[i - self.rank])
        }
    }
}

/// Identifies one declared generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    /// Coordinate `coord` of abelian factor `factor`.
    Abelian { factor: usize, coord: usize },
    /// Free generator number `index`.
    Free { index: usize },
}

#[derive(Debug, Clone)]
pub struct GeneratorInfo {
    pub name: String,
    pub kind: GenKind,
}

/// A letter of the finite generating set `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum XLetter {
    /// Declared generator (flat index into [`GroupSpec::generators`]).
    Gen { id: usize, inv: bool },
    /// Adjoined element (index into [`GroupSpec::extras`]).
    Extra { id: usize, inv: bool },
}

impl XLetter {
    pub fn inverse(self) -> XLetter {
        match self {
            XLetter::Gen { id, inv } => XLetter::Gen { id, inv: !inv },
            XLetter::Extra { id, inv } => XLetter::Extra { id, inv: !inv },
        }
    }
}

/// A letter of a word handed to [`GroupSpec::word_to_normal_form`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Letter {
    /// `generator^exp`, by declared name.
    Gen { id: usize, exp: i64 },
    /// A whole peripheral element `(factor, coords)`.
    Peripheral { factor: usize, coords: Vec<i64> },
}

/// The group `A_1 * ... * A_m * F_k` with its generating data.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub factors: Vec<AbelianFactor>,
    pub free_generators: Vec<String>,
    /// Flat generator table: abelian generators in factor order, then free ones.
    pub generators: Vec<GeneratorInfo>,
    /// Extra letters adjoined to `X` (conjugators of an automorphism).
    /// Canonicalized: no identity, nothing equal to a declared letter,
    /// closed under inversion, deduplicated.
    pub extras: Vec<NormalForm>,
    /// Per abelian factor: true iff the factor is peripheral.
    pub peripheral: Vec<bool>,
    name_index: BTreeMap<String, usize>,
    xlen_cache: DashMap<NormalForm, u64>,
}

impl GroupSpec {
    pub fn new(factors: Vec<AbelianFactor>, free_generators: Vec<String>) -> Result<Self> {
        let mut generators = Vec::new();
        let mut name_index = BTreeMap::new();
        for (fi, factor) in factors.iter().enumerate() {
            if factor.generator_names.len() != factor.coord_count() {
                return Err(Error::Validation(format!(
                    "factor `{}` declares {} generators but rank+torsion = {}",
                    factor.name,
                    factor.generator_names.len(),
                    factor.coord_count()
                )));
            }
            for (ci, name) in factor.generator_names.iter().enumerate() {
                let id = generators.len();
                if name_index.insert(name.clone(), id).is_some() {
                    return Err(Error::DuplicateName(name.clone()));
                }
                generators.push(GeneratorInfo {
                    name: name.clone(),
                    kind: GenKind::Abelian { factor: fi, coord: ci },
                });
            }
            let mut prev = None;
            for &d in &factor.torsion {
                if d < 2 {
                    return Err(Error::BadTorsion(format!(
                        "torsion order {d} in factor `{}` must be >= 2",
                        factor.name
                    )));
                }
                if let Some(p) = prev {
                    if d % p != 0 {
                        return Err(Error::BadTorsion(format!(
                            "torsion orders of factor `{}` must form a divisor chain; {p} does not divide {d}",
                            factor.name
                        )));
                    }
                }
                prev = Some(d);
            }
        }
        for (gi, name) in free_generators.iter().enumerate() {
            let id = generators.len();
            if name_index.insert(name.clone(), id).is_some() {
                return Err(Error::DuplicateName(name.clone()));
            }
            generators.push(GeneratorInfo {
                name: name.clone(),
                kind: GenKind::Free { index: gi },
            });
        }
        let peripheral = factors.iter().map(is_nrh_factor).collect();
        Ok(GroupSpec {
            factors,
            free_generators,
            generators,
            extras: Vec::new(),
            peripheral,
            name_index,
            xlen_cache: DashMap::new(),
        })
    }

    pub fn generator_id(&self, name: &str) -> Option<usize> {
        self.name_index.get(name).copied()
    }

    pub fn is_peripheral(&self, factor: usize) -> bool {
        self.peripheral[factor]
    }

    pub fn peripheral_factors(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.factors.len()).filter(|&f| self.peripheral[f])
    }

    pub fn has_extras(&self) -> bool {
        !self.extras.is_empty()
    }

    /// Adjoins `f` and `f^-1` to `X`, skipping the identity and elements that
    /// already occur as declared letters or adjoined ones.
    pub fn adjoin_extra(&mut self, f: &NormalForm) {
        if f.is_identity() || self.as_declared_letter(f).is_some() {
            return;
        }
        let inv = self.invert(f);
        if !self.extras.contains(f) {
            self.extras.push(f.clone());
        }
        if !self.extras.contains(&inv) {
            self.extras.push(inv);
        }
        self.xlen_cache.clear();
    }

    /// All letters of `X` in canonical order (generators first, then extras;
    /// positive sign before negative).
    pub fn x_letters(&self) -> Vec<XLetter> {
        let mut out = Vec::with_capacity(2 * (self.generators.len() + self.extras.len()));
        for id in 0..self.generators.len() {
            out.push(XLetter::Gen { id, inv: false });
            out.push(XLetter::Gen { id, inv: true });
        }
        for id in 0..self.extras.len() {
            out.push(XLetter::Extra { id, inv: false });
            out.push(XLetter::Extra { id, inv: true });
        }
        out
    }

    /// The group element represented by one `X` letter.
    pub fn x_letter_value(&self, letter: XLetter) -> NormalForm {
        match letter {
            XLetter::Gen { id, inv } => self.generator_power(id, if inv { -1 } else { 1 }),
            XLetter::Extra { id, inv } => {
                if inv {
                    self.invert(&self.extras[id])
                } else {
                    self.extras[id].clone()
                }
            }
        }
    }

    /// If `g` equals a declared letter `x^{+-1}`, returns that letter.
    pub fn as_declared_letter(&self, g: &NormalForm) -> Option<XLetter> {
        for id in 0..self.generators.len() {
            if *g == self.generator_power(id, 1) {
                return Some(XLetter::Gen { id, inv: false });
            }
            if *g == self.generator_power(id, -1) {
                return Some(XLetter::Gen { id, inv: true });
            }
        }
        None
    }

    /// If `g` equals the value of some letter of `X`, returns it.
    pub fn as_x_letter(&self, g: &NormalForm) -> Option<XLetter> {
        if let Some(l) = self.as_declared_letter(g) {
            return Some(l);
        }
        for id in 0..self.extras.len() {
            if *g == self.extras[id] {
                return Some(XLetter::Extra { id, inv: false });
            }
            if self.invert(&self.extras[id]) == *g {
                return Some(XLetter::Extra { id, inv: true });
            }
        }
        None
    }

    /// `generator^exp` as a normal form.
    pub fn generator_power(&self, id: usize, exp: i64) -> NormalForm {
        let info = &self.generators[id];
        match info.kind {
            GenKind::Abelian { factor, coord } => {
                let mut coords = vec![0i64; self.factors[factor].coord_count()];
                coords[coord] = exp;
                match self.reduce_abelian(factor, coords) {
                    Some(c) => NormalForm::from_reduced(vec![Syllable::Abelian { factor, coords: c }]),
                    None => NormalForm::identity(),
                }
            }
            GenKind::Free { index } => {
                if exp == 0 {
                    NormalForm::identity()
                } else {
                    NormalForm::from_reduced(vec![Syllable::Free { gen: index, exp }])
                }
            }
        }
    }

    /// A whole abelian-factor element as a normal form (identity if zero).
    pub fn abelian_element(&self, factor: usize, coords: Vec<i64>) -> NormalForm {
        match self.reduce_abelian(factor, coords) {
            Some(c) => NormalForm::from_reduced(vec![Syllable::Abelian { factor, coords: c }]),
            None => NormalForm::identity(),
        }
    }

    /// Reduces abelian coordinates (torsion entries into `0..d`); None if zero.
    fn reduce_abelian(&self, factor: usize, mut coords: Vec<i64>) -> Option<Vec<i64>> {
        let f = &self.factors[factor];
        debug_assert_eq!(coords.len(), f.coord_count());
        for i in f.rank..coords.len() {
            let d = f.torsion[i - f.rank] as i64;
            coords[i] = coords[i].rem_euclid(d);
        }
        if coords.iter().all(|&c| c == 0) {
            None
        } else {
            Some(coords)
        }
    }

    fn negate_syllable(&self, s: &Syllable) -> Syllable {
        match s {
            Syllable::Abelian { factor, coords } => {
                let neg: Vec<i64> = coords.iter().map(|c| -c).collect();
                let reduced = self
                    .reduce_abelian(*factor, neg)
                    .expect("negating a nonzero abelian syllable stays nonzero");
                Syllable::Abelian { factor: *factor, coords: reduced }
            }
            Syllable::Free { gen, exp } => Syllable::Free { gen: *gen, exp: -exp },
        }
    }

    fn same_factor(a: &Syllable, b: &Syllable) -> bool {
        match (a, b) {
            (Syllable::Abelian { factor: f1, .. }, Syllable::Abelian { factor: f2, .. }) => f1 == f2,
            (Syllable::Free { gen: g1, .. }, Syllable::Free { gen: g2, .. }) => g1 == g2,
            _ => false,
        }
    }

    /// Merges two same-factor syllables; None when the product is trivial.
    fn merge_syllables(&self, a: &Syllable, b: &Syllable) -> Option<Syllable> {
        match (a, b) {
            (
                Syllable::Abelian { factor, coords: c1 },
                Syllable::Abelian { coords: c2, .. },
            ) => {
                let sum: Vec<i64> = c1.iter().zip(c2).map(|(x, y)| x + y).collect();
                self.reduce_abelian(*factor, sum)
                    .map(|coords| Syllable::Abelian { factor: *factor, coords })
            }
            (Syllable::Free { gen, exp: e1 }, Syllable::Free { exp: e2, .. }) => {
                let e = e1 + e2;
                (e != 0).then_some(Syllable::Free { gen: *gen, exp: e })
            }
            _ => unreachable!("merge_syllables called on distinct factors"),
        }
    }

    pub fn multiply(&self, a: &NormalForm, b: &NormalForm) -> NormalForm {
        let mut out: Vec<Syllable> = a.syllables.clone();
        for s in &b.syllables {
            match out.last() {
                Some(last) if Self::same_factor(last, s) => {
                    let last = out.pop().expect("nonempty");
                    if let Some(merged) = self.merge_syllables(&last, s) {
                        out.push(merged);
                    }
                }
                _ => out.push(s.clone()),
            }
        }
        NormalForm::from_reduced(out)
    }

    pub fn invert(&self, g: &NormalForm) -> NormalForm {
        let syllables = g.syllables.iter().rev().map(|s| self.negate_syllable(s)).collect();
        NormalForm::from_reduced(syllables)
    }

    pub fn pow(&self, g: &NormalForm, e: i64) -> NormalForm {
        if e == 0 {
            return NormalForm::identity();
        }
        let base = if e < 0 { self.invert(g) } else { g.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = NormalForm::identity();
        let mut sq = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.multiply(&acc, &sq);
            }
            n >>= 1;
            if n > 0 {
                sq = self.multiply(&sq, &sq);
            }
        }
        acc
    }

    pub fn conjugate(&self, g: &NormalForm, by: &NormalForm) -> NormalForm {
        let inv = self.invert(by);
        self.multiply(&self.multiply(&inv, g), by)
    }

    /// Folds a word of letters into its normal form.
    pub fn word_to_normal_form(&self, word: &[Letter]) -> Result<NormalForm> {
        let mut acc = NormalForm::identity();
        for letter in word {
            let value = match letter {
                Letter::Gen { id, exp } => {
                    if *id >= self.generators.len() {
                        return Err(Error::UnknownGenerator(format!("#{id}")));
                    }
                    self.generator_power(*id, *exp)
                }
                Letter::Peripheral { factor, coords } => {
                    if *factor >= self.factors.len() || !self.peripheral[*factor] {
                        return Err(Error::Validation(format!(
                            "factor #{factor} is not peripheral"
                        )));
                    }
                    let v = self.abelian_element(*factor, coords.clone());
                    if v.is_identity() {
                        return Err(Error::ZeroPeripheralLetter);
                    }
                    v
                }
            };
            acc = self.multiply(&acc, &value);
        }
        Ok(acc)
    }

    /// Membership in the factor subgroup `H_f` (identity or one `f`-syllable).
    pub fn in_factor(&self, g: &NormalForm, factor: usize) -> bool {
        match g.syllables.as_slice() {
            [] => true,
            [Syllable::Abelian { factor: f, .. }] => *f == factor,
            _ => false,
        }
    }

    /// All nonzero elements of abelian factor `f` whose coordinates have
    /// cyclic length at most `bound`, in lexicographic coordinate order.
    pub fn factor_ball(&self, factor: usize, bound: u64) -> Vec<NormalForm> {
        let f = &self.factors[factor];
        let mut out = Vec::new();
        let ranges: Vec<Vec<i64>> = (0..f.coord_count())
            .map(|i| coord_values(f.coord_order(i), bound))
            .collect();
        let mut coords = vec![0i64; f.coord_count()];
        enumerate_coords(&ranges, 0, &mut coords, &mut |c| {
            if c.iter().any(|&x| x != 0) {
                out.push(NormalForm::from_reduced(vec![Syllable::Abelian {
                    factor,
                    coords: c.to_vec(),
                }]));
            }
        });
        out
    }

    /// Renders a normal form as a word over the declared generators.
    pub fn render(&self, g: &NormalForm) -> String {
        if g.is_identity() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for syl in &g.syllables {
            match syl {
                Syllable::Abelian { factor, coords } => {
                    let f = &self.factors[*factor];
                    for (i, &c) in coords.iter().enumerate() {
                        if c == 0 {
                            continue;
                        }
                        let name = &f.generator_names[i];
                        if c == 1 {
                            parts.push(name.clone());
                        } else {
                            parts.push(format!("{name}^{c}"));
                        }
                    }
                }
                Syllable::Free { gen, exp } => {
                    let name = &self.free_generators[*gen];
                    if *exp == 1 {
                        parts.push(name.clone());
                    } else {
                        parts.push(format!("{name}^{exp}"));
                    }
                }
            }
        }
        parts.join(" ")
    }

    pub(crate) fn xlen_cache(&self) -> &DashMap<NormalForm, u64> {
        &self.xlen_cache
    }

    /// Stable fingerprint of the group data (FNV-1a over a canonical rendering).
    pub fn digest(&self) -> String {
        let mut text = String::new();
        for f in &self.factors {
            text.push_str(&format!(
                "factor {} rank {} torsion {:?} gens {:?};",
                f.name, f.rank, f.torsion, f.generator_names
            ));
        }
        text.push_str(&format!("free {:?};", self.free_generators));
        for e in &self.extras {
            text.push_str(&format!("extra {};", self.render(e)));
        }
        let mut hash: u64 = 0xcbf29ce484222325;
        for byte in text.bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
        format!("{hash:016x}")
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for factor in &self.factors {
            write!(
                f,
                "factor {} (rank {}, torsion {:?}, gens {}) ",
                factor.name,
                factor.rank,
                factor.torsion,
                factor.generator_names.join(",")
            )?;
        }
        if !self.free_generators.is_empty() {
            write!(f, "free {}", self.free_generators.join(","))?;
        }
        Ok(())
    }
}

/// Not virtually cyclic, i.e. free-abelian rank at least 2. Rank <= 1 factors
/// (with or without torsion) and finite factors are virtually cyclic and are
/// excluded from the peripheral structure.
pub fn is_nrh_factor(f: &AbelianFactor) -> bool {
    f.rank >= 2
}

/// Representatives of one cyclic coordinate with cyclic length <= bound.
pub(crate) fn coord_values(order: Option<u64>, bound: u64) -> Vec<i64> {
    match order {
        None => {
            let b = bound as i64;
            (-b..=b).collect()
        }
        Some(d) => {
            let mut vals: Vec<i64> = (0..d as i64)
                .filter(|&c| c.min(d as i64 - c) <= bound as i64)
                .collect();
            vals.sort_unstable();
            vals
        }
    }
}

pub(crate) fn enumerate_coords(
    ranges: &[Vec<i64>],
    idx: usize,
    coords: &mut Vec<i64>,
    emit: &mut dyn FnMut(&[i64]),
) {
    if idx == ranges.len() {
        emit(coords);
        return;
    }
    for &v in &ranges[idx] {
        coords[idx] = v;
        enumerate_coords(ranges, idx + 1, coords, emit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgroups;

    #[test]
    fn nrh_rule() {
        let rank2 = AbelianFactor {
            name: "A".into(),
            rank: 2,
            torsion: vec![],
            generator_names: vec!["a".into(), "b".into()],
        };
        assert!(is_nrh_factor(&rank2));
        let rank1 = AbelianFactor {
            name: "C".into(),
            rank: 1,
            torsion: vec![],
            generator_names: vec!["c".into()],
        };
        assert!(!is_nrh_factor(&rank1));
        let finite = AbelianFactor {
            name: "D".into(),
            rank: 0,
            torsion: vec![2, 4],
            generator_names: vec!["u".into(), "v".into()],
        };
        assert!(!is_nrh_factor(&finite));
    }

    #[test]
    fn multiply_merges_and_cancels() {
        let g = testgroups::g1();
        let a2b = g.word(&[("a", 2), ("b", 1)]);
        let binv_t = g.word(&[("b", -1), ("t", 1)]);
        let prod = g.multiply(&a2b, &binv_t);
        assert_eq!(
            prod.syllables(),
            &[
                Syllable::Abelian { factor: 0, coords: vec![2, 0] },
                Syllable::Free { gen: 0, exp: 1 }
            ]
        );
    }

    #[test]
    fn invert_reverses_and_negates() {
        let g = testgroups::g1();
        let el = g.word(&[("a", 1), ("b", 2), ("t", 3)]);
        let inv = g.invert(&el);
        assert_eq!(
            inv.syllables(),
            &[
                Syllable::Free { gen: 0, exp: -3 },
                Syllable::Abelian { factor: 0, coords: vec![-1, -2] }
            ]
        );
        assert!(g.multiply(&el, &inv).is_identity());
        assert_eq!(g.invert(&NormalForm::identity()), NormalForm::identity());
    }

    #[test]
    fn torsion_arithmetic_wraps() {
        let g = testgroups::torsion_group();
        // u has infinite order, v has order 2, w has order 4
        let v = g.word(&[("v", 1)]);
        assert!(g.multiply(&v, &v).is_identity());
        let w = g.word(&[("w", 3)]);
        let w2 = g.word(&[("w", -1)]);
        assert_eq!(w, w2);
    }

    #[test]
    fn duplicate_names_rejected() {
        let factor = AbelianFactor {
            name: "A".into(),
            rank: 2,
            torsion: vec![],
            generator_names: vec!["a".into(), "a".into()],
        };
        assert!(matches!(
            GroupSpec::new(vec![factor], vec![]),
            Err(Error::DuplicateName(_))
        ));
    }
}
