//! Word metrics: `|g|_{X ∪ H}` (relative length) and `|g|_X`.

use super::{GroupSpec, NormalForm, Syllable};
use crate::error::{Error, Result};
use std::collections::{HashMap, VecDeque};

impl GroupSpec {
    /// Minimal number of declared `X` letters spelling one syllable inside
    /// its own factor.
    pub fn syllable_x_cost(&self, s: &Syllable) -> u64 {
        match s {
            Syllable::Abelian { factor, coords } => {
                let f = &self.factors[*factor];
                let mut cost = 0u64;
                for (i, &c) in coords.iter().enumerate() {
                    match f.coord_order(i) {
                        None => cost += c.unsigned_abs(),
                        Some(d) => {
                            let c = c.rem_euclid(d as i64) as u64;
                            cost += c.min(d - c);
                        }
                    }
                }
                cost
            }
            Syllable::Free { exp, .. } => exp.unsigned_abs(),
        }
    }

    /// `d_{X∪H}(1, g)`: peripheral syllables cost one H-edge, everything else
    /// is spelled in declared letters. Exact whenever no extra letters have
    /// been adjoined; with extras it is an upper bound for the enlarged
    /// alphabet (extra letters are honored only by [`GroupSpec::x_length`]).
    pub fn rel_length(&self, g: &NormalForm) -> u64 {
        g.syllables()
            .iter()
            .map(|s| match s {
                Syllable::Abelian { factor, .. } if self.peripheral[*factor] => 1,
                other => self.syllable_x_cost(other),
            })
            .sum()
    }

    pub fn rel_dist(&self, g: &NormalForm, h: &NormalForm) -> u64 {
        self.rel_length(&self.multiply(&self.invert(g), h))
    }

    /// Closed form for `|g|_X` over the declared generators only.
    pub fn x_length_closed_form(&self, g: &NormalForm) -> u64 {
        g.syllables().iter().map(|s| self.syllable_x_cost(s)).sum()
    }

    /// `d_X(1, g)` over the full `X` (declared generators plus extras).
    ///
    /// Without extras this is the closed form. With extras it runs a memoized
    /// bidirectional BFS over the `X` Cayley graph and fails loudly once the
    /// search radius exceeds `cap`; it never approximates.
    pub fn x_length_capped(&self, g: &NormalForm, cap: u64) -> Result<u64> {
        if !self.has_extras() {
            return Ok(self.x_length_closed_form(g));
        }
        if let Some(hit) = self.xlen_cache().get(g) {
            return Ok(*hit);
        }
        let d = self.bidirectional_bfs(g, cap)?;
        self.xlen_cache().insert(g.clone(), d);
        Ok(d)
    }

    /// `d_X(1, g)` with the default radius cap.
    pub fn x_length(&self, g: &NormalForm) -> Result<u64> {
        self.x_length_capped(g, DEFAULT_BFS_CAP)
    }

    pub fn x_dist(&self, g: &NormalForm, h: &NormalForm) -> Result<u64> {
        self.x_length(&self.multiply(&self.invert(g), h))
    }

    fn bidirectional_bfs(&self, g: &NormalForm, cap: u64) -> Result<u64> {
        if g.is_identity() {
            return Ok(0);
        }
        let letters: Vec<NormalForm> = self
            .x_letters()
            .into_iter()
            .map(|l| self.x_letter_value(l))
            .collect();
        let mut fwd: HashMap<NormalForm, u64> = HashMap::new();
        let mut bwd: HashMap<NormalForm, u64> = HashMap::new();
        fwd.insert(NormalForm::identity(), 0);
        bwd.insert(g.clone(), 0);
        let mut fq: VecDeque<NormalForm> = VecDeque::from([NormalForm::identity()]);
        let mut bq: VecDeque<NormalForm> = VecDeque::from([g.clone()]);
        let mut fdepth = 0u64;
        let mut bdepth = 0u64;
        loop {
            if fdepth + bdepth >= cap {
                return Err(Error::RadiusCapExceeded { cap });
            }
            // expand the smaller frontier one full level
            let expand_fwd = fq.len() <= bq.len();
            let (queue, own, other, depth) = if expand_fwd {
                (&mut fq, &mut fwd, &bwd, &mut fdepth)
            } else {
                (&mut bq, &mut bwd, &fwd, &mut bdepth)
            };
            if queue.is_empty() {
                return Err(Error::RadiusCapExceeded { cap });
            }
            *depth += 1;
            let mut next = VecDeque::new();
            let mut best: Option<u64> = None;
            while let Some(v) = queue.pop_front() {
                let dv = own[&v];
                for letter in &letters {
                    let w = self.multiply(&v, letter);
                    if own.contains_key(&w) {
                        continue;
                    }
                    own.insert(w.clone(), dv + 1);
                    if let Some(&dw) = other.get(&w) {
                        let total = dv + 1 + dw;
                        best = Some(best.map_or(total, |b: u64| b.min(total)));
                    }
                    next.push_back(w);
                }
            }
            *queue = next;
            // any meeting found after a complete level is already minimal:
            // a shorter path would have produced a smaller candidate within
            // the levels expanded so far
            if let Some(d) = best {
                return Ok(d);
            }
        }
    }
}

pub const DEFAULT_BFS_CAP: u64 = 24;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgroups;

    #[test]
    fn rel_length_examples() {
        let g = testgroups::g1();
        let el = g.word(&[("a", 2), ("b", 3), ("t", 1), ("a", 1)]);
        assert_eq!(g.rel_length(&el), 3);
        assert_eq!(g.rel_length(&NormalForm::identity()), 0);
        let t5 = g.word(&[("t", 5)]);
        assert_eq!(g.rel_length(&t5), 5);
    }

    #[test]
    fn x_length_closed_form_examples() {
        let g = testgroups::g1();
        let el = g.word(&[("a", 2), ("b", 3)]);
        assert_eq!(g.x_length(&el).unwrap(), 5);
        assert_eq!(g.x_length(&NormalForm::identity()).unwrap(), 0);
    }

    #[test]
    fn x_length_with_extras_uses_bfs() {
        let mut g = testgroups::g1();
        let f = g.word(&[("a", 1), ("t", 1)]); // a·t as one new letter
        g.adjoin_extra(&f);
        assert_eq!(g.x_length(&f).unwrap(), 1);
        // a·t·t = f·t
        let el = g.word(&[("a", 1), ("t", 2)]);
        assert_eq!(g.x_length(&el).unwrap(), 2);
        // closed form would say 3
        assert_eq!(g.x_length_closed_form(&el), 3);
    }

    #[test]
    fn x_length_cap_fails_loudly() {
        let mut g = testgroups::g1();
        let f = g.word(&[("a", 1), ("t", 1)]);
        g.adjoin_extra(&f);
        let far = g.word(&[("t", 12)]);
        assert!(matches!(
            g.x_length_capped(&far, 3),
            Err(Error::RadiusCapExceeded { .. })
        ));
    }

    #[test]
    fn torsion_costs_take_short_way_around() {
        let g = testgroups::torsion_group();
        let w3 = g.word(&[("w", 3)]); // order 4: w^3 = w^-1, cost 1
        assert_eq!(g.x_length(&w3).unwrap(), 1);
        assert_eq!(g.rel_length(&w3), 1);
    }
}
