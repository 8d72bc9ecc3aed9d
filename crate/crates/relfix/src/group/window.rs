//! Finite enumeration windows.
//!
//! Balls of the relative Cayley graph are infinite (every peripheral coset is
//! one edge away), so every enumeration and every "distance to Fix" in this
//! crate is taken over a window: a bound on the syllable count and a bound on
//! each syllable coordinate.

use super::{coord_values, enumerate_coords, GroupSpec, NormalForm, Syllable};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// `{ g : at most max_syllables syllables, every coordinate of every syllable
/// has cyclic length at most max_coord }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainWindow {
    pub max_syllables: u64,
    pub max_coord: u64,
}

impl DomainWindow {
    pub fn new(max_syllables: u64, max_coord: u64) -> Self {
        DomainWindow { max_syllables, max_coord }
    }

    pub fn contains(&self, spec: &GroupSpec, g: &NormalForm) -> bool {
        if g.syllable_count() as u64 > self.max_syllables {
            return false;
        }
        g.syllables().iter().all(|s| self.syllable_in_bounds(spec, s))
    }

    fn syllable_in_bounds(&self, spec: &GroupSpec, s: &Syllable) -> bool {
        match s {
            Syllable::Abelian { factor, coords } => {
                let f = &spec.factors[*factor];
                coords.iter().enumerate().all(|(i, &c)| match f.coord_order(i) {
                    None => c.unsigned_abs() <= self.max_coord,
                    Some(d) => {
                        let c = c.rem_euclid(d as i64) as u64;
                        c.min(d - c) <= self.max_coord
                    }
                })
            }
            Syllable::Free { exp, .. } => exp.unsigned_abs() <= self.max_coord,
        }
    }
}

/// One "factor slot": an abelian factor or a single free generator.
fn slot_count(spec: &GroupSpec) -> usize {
    spec.factors.len() + spec.free_generators.len()
}

/// All window-bounded nonzero syllables of one slot, in canonical order.
fn slot_syllables(spec: &GroupSpec, slot: usize, max_coord: u64) -> Vec<Syllable> {
    if slot < spec.factors.len() {
        let f = &spec.factors[slot];
        let ranges: Vec<Vec<i64>> = (0..f.coord_count())
            .map(|i| coord_values(f.coord_order(i), max_coord))
            .collect();
        let mut out = Vec::new();
        let mut coords = vec![0i64; f.coord_count()];
        enumerate_coords(&ranges, 0, &mut coords, &mut |c| {
            if c.iter().any(|&x| x != 0) {
                out.push(Syllable::Abelian { factor: slot, coords: c.to_vec() });
            }
        });
        out
    } else {
        let gen = slot - spec.factors.len();
        let b = max_coord as i64;
        (-b..=b)
            .filter(|&e| e != 0)
            .map(|exp| Syllable::Free { gen, exp })
            .collect()
    }
}

/// Streams every element of the window exactly once, identity first, then by
/// syllable count and lexicographic slot/coordinate order. The output set is
/// closed under inversion.
pub struct DomainIter<'a> {
    spec: &'a GroupSpec,
    window: DomainWindow,
    /// per-slot syllable menus, computed once
    menus: Vec<Vec<Syllable>>,
    /// stack of (slot, index into menu) choices for the current element
    stack: Vec<(usize, usize)>,
    target_len: u64,
    done: bool,
    emitted_identity: bool,
}

impl<'a> DomainIter<'a> {
    pub fn new(spec: &'a GroupSpec, window: DomainWindow) -> Self {
        let menus = (0..slot_count(spec))
            .map(|s| slot_syllables(spec, s, window.max_coord))
            .collect();
        DomainIter {
            spec,
            window,
            menus,
            stack: Vec::new(),
            target_len: 1,
            done: false,
            emitted_identity: false,
        }
    }

    fn current(&self) -> NormalForm {
        let syllables = self
            .stack
            .iter()
            .map(|&(slot, idx)| self.menus[slot][idx].clone())
            .collect();
        NormalForm::from_reduced(syllables)
    }

    /// Advances the choice stack to the next sequence of the current length;
    /// false when exhausted.
    fn advance(&mut self) -> bool {
        loop {
            // try to extend to target length
            while (self.stack.len() as u64) < self.target_len {
                let banned = self.stack.last().map(|&(s, _)| s);
                match self.first_slot(0, banned) {
                    Some(slot) => self.stack.push((slot, 0)),
                    None => break,
                }
            }
            if self.stack.len() as u64 == self.target_len {
                return true;
            }
            // backtrack
            if !self.increment() {
                return false;
            }
        }
    }

    /// Smallest usable slot >= from, avoiding `banned`, with a nonempty menu.
    fn first_slot(&self, from: usize, banned: Option<usize>) -> Option<usize> {
        (from..self.menus.len()).find(|&s| Some(s) != banned && !self.menus[s].is_empty())
    }

    /// Moves the deepest position to its next value; pops when exhausted.
    fn increment(&mut self) -> bool {
        while let Some((slot, idx)) = self.stack.pop() {
            if idx + 1 < self.menus[slot].len() {
                self.stack.push((slot, idx + 1));
                return true;
            }
            let banned = self.stack.last().map(|&(s, _)| s);
            if let Some(next_slot) = self.first_slot(slot + 1, banned) {
                self.stack.push((next_slot, 0));
                return true;
            }
        }
        false
    }
}

impl Iterator for DomainIter<'_> {
    type Item = NormalForm;

    fn next(&mut self) -> Option<NormalForm> {
        if self.done {
            return None;
        }
        if !self.emitted_identity {
            self.emitted_identity = true;
            if self.window.max_syllables == 0 {
                self.done = true;
            }
            return Some(NormalForm::identity());
        }
        loop {
            if self.stack.is_empty() {
                if self.target_len > self.window.max_syllables {
                    self.done = true;
                    return None;
                }
                if !self.advance() {
                    self.target_len += 1;
                    if self.target_len > self.window.max_syllables {
                        self.done = true;
                        return None;
                    }
                    continue;
                }
                return Some(self.current());
            }
            if self.increment() && self.advance() {
                return Some(self.current());
            }
            self.stack.clear();
            self.target_len += 1;
            if self.target_len > self.window.max_syllables {
                self.done = true;
                return None;
            }
        }
    }
}

impl GroupSpec {
    /// Yields each element of the window exactly once, in a deterministic
    /// order (identity first, then by syllable count).
    pub fn enumerate_domain(&self, window: DomainWindow) -> DomainIter<'_> {
        DomainIter::new(self, window)
    }

    /// Deterministic seeded draw from the window. Uniform over alternating
    /// syllable patterns (length, then slots, then coordinates), which is not
    /// uniform over elements.
    pub fn random_element<R: Rng>(&self, window: DomainWindow, rng: &mut R) -> NormalForm {
        let usable: Vec<usize> = (0..slot_count(self))
            .filter(|&s| !slot_syllables(self, s, window.max_coord).is_empty())
            .collect();
        if usable.is_empty() || window.max_syllables == 0 {
            return NormalForm::identity();
        }
        let len = rng.gen_range(0..=window.max_syllables);
        let mut syllables = Vec::with_capacity(len as usize);
        let mut prev: Option<usize> = None;
        for _ in 0..len {
            let choices: Vec<usize> = usable.iter().copied().filter(|&s| Some(s) != prev).collect();
            if choices.is_empty() {
                break;
            }
            let slot = choices[rng.gen_range(0..choices.len())];
            let menu = slot_syllables(self, slot, window.max_coord);
            syllables.push(menu[rng.gen_range(0..menu.len())].clone());
            prev = Some(slot);
        }
        NormalForm::from_reduced(syllables)
    }

    /// Convenience used throughout the test suites.
    pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Builds a word from `(name, exponent)` pairs; panics on unknown names.
    pub fn word(&self, letters: &[(&str, i64)]) -> NormalForm {
        let word: Vec<super::Letter> = letters
            .iter()
            .map(|&(name, exp)| super::Letter::Gen {
                id: self
                    .generator_id(name)
                    .unwrap_or_else(|| panic!("unknown generator `{name}`")),
                exp,
            })
            .collect();
        self.word_to_normal_form(&word).expect("valid word")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgroups;

    #[test]
    fn window_zero_is_identity_only() {
        let g = testgroups::g1();
        let all: Vec<_> = g.enumerate_domain(DomainWindow::new(0, 3)).collect();
        assert_eq!(all, vec![NormalForm::identity()]);
    }

    #[test]
    fn g1_window_1_1_has_11_elements() {
        let g = testgroups::g1();
        let all: Vec<_> = g.enumerate_domain(DomainWindow::new(1, 1)).collect();
        assert_eq!(all.len(), 11);
        let expected = [
            g.word(&[("a", 1)]),
            g.word(&[("a", -1)]),
            g.word(&[("b", 1)]),
            g.word(&[("b", -1)]),
            g.word(&[("a", 1), ("b", 1)]),
            g.word(&[("a", -1), ("b", -1)]),
            g.word(&[("a", 1), ("b", -1)]),
            g.word(&[("a", -1), ("b", 1)]),
            g.word(&[("t", 1)]),
            g.word(&[("t", -1)]),
            NormalForm::identity(),
        ];
        for e in &expected {
            assert!(all.contains(e), "missing {e}");
        }
    }

    #[test]
    fn enumeration_unique_and_inversion_closed() {
        let g = testgroups::g1();
        let w = DomainWindow::new(2, 2);
        let all: Vec<_> = g.enumerate_domain(w).collect();
        let set: std::collections::BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len(), "duplicates emitted");
        for e in &all {
            assert!(set.contains(&g.invert(e)));
            assert!(w.contains(&g, e));
        }
    }

    #[test]
    fn random_elements_stay_in_window_and_are_deterministic() {
        let g = testgroups::g2();
        let w = DomainWindow::new(3, 2);
        let mut r1 = GroupSpec::seeded_rng(0);
        let mut r2 = GroupSpec::seeded_rng(0);
        for _ in 0..200 {
            let x = g.random_element(w, &mut r1);
            let y = g.random_element(w, &mut r2);
            assert_eq!(x, y);
            assert!(w.contains(&g, &x));
        }
    }
}
