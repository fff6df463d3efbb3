//! Index bookkeeping for the hybrid Landau-Ginzburg theory at infinity.
//!
//! A genus-`g` LG invariant with `k` markings, `m` of which carry
//! `zeta_3^2` monodromy, is nonzero only when `m = 2g - 2 (mod 3)`; its
//! virtual dimension is `k`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LgError {
    #[error("m = {m} exceeds the number of markings k = {k}")]
    TooManyTwisted { m: u32, k: u32 },
    #[error("m = {m} is not congruent to 2g - 2 mod 3 for g = {g}")]
    Residue { g: u32, m: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LgIndex {
    pub genus: u32,
    pub m: u32,
    pub k: u32,
    pub d_prime: u32,
}

/// The residue of `2g - 2` modulo 3, in `0..3`.
fn residue(g: u32) -> u32 {
    (2 * (g % 3) + 1) % 3
}

impl LgIndex {
    pub fn check(&self) -> Result<(), LgError> {
        if self.m > self.k {
            return Err(LgError::TooManyTwisted { m: self.m, k: self.k });
        }
        if self.m % 3 != residue(self.genus) {
            return Err(LgError::Residue { g: self.genus, m: self.m });
        }
        Ok(())
    }
}

/// All `m` in `0..=m_max` with `m = 2g - 2 (mod 3)`, ascending.
pub fn lg_admissible_m(g: u32, m_max: u32) -> Vec<u32> {
    (residue(g)..=m_max).step_by(3).collect()
}

pub fn lg_vdim(index: LgIndex) -> Result<u32, LgError> {
    index.check()?;
    Ok(index.k)
}

/// Pairs `(m, d')` over which the genus-`g` generating series runs.
pub fn potential_index_set(g: u32, m_max: u32, d_max: u32) -> Vec<(u32, u32)> {
    lg_admissible_m(g, m_max).into_iter().flat_map(|m| (0..=d_max).map(move |d| (m, d))).collect()
}

/// Invariants `N_{g,m,d'}` supplied from outside; only admissible indices
/// are accepted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvariantTable {
    entries: BTreeMap<(u32, u32, u32), Rat>,
}

impl InvariantTable {
    pub fn new() -> InvariantTable {
        InvariantTable::default()
    }

    /// Records `N_{g,m,d'}` (all markings twisted, so `k = m`).
    pub fn insert(&mut self, g: u32, m: u32, d_prime: u32, value: Rat) -> Result<Option<Rat>, LgError> {
        LgIndex { genus: g, m, k: m, d_prime }.check()?;
        Ok(self.entries.insert((g, m, d_prime), value))
    }

    pub fn get(&self, g: u32, m: u32, d_prime: u32) -> Option<&Rat> {
        self.entries.get(&(g, m, d_prime))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissible_sequences() {
        assert_eq!(lg_admissible_m(0, 13), vec![1, 4, 7, 10, 13]);
        assert_eq!(lg_admissible_m(1, 12), vec![0, 3, 6, 9, 12]);
        assert_eq!(lg_admissible_m(2, 5), vec![2, 5]);
        assert_eq!(lg_admissible_m(0, 0), Vec::<u32>::new());
    }

    #[test]
    fn vdim_examples() {
        assert_eq!(lg_vdim(LgIndex { genus: 0, m: 1, k: 1, d_prime: 0 }), Ok(1));
        assert_eq!(lg_vdim(LgIndex { genus: 1, m: 0, k: 0, d_prime: 5 }), Ok(0));
        assert_eq!(lg_vdim(LgIndex { genus: 0, m: 2, k: 2, d_prime: 0 }), Err(LgError::Residue { g: 0, m: 2 }));
        assert_eq!(lg_vdim(LgIndex { genus: 0, m: 4, k: 1, d_prime: 0 }), Err(LgError::TooManyTwisted { m: 4, k: 1 }));
    }

    #[test]
    fn index_sets() {
        assert_eq!(potential_index_set(0, 4, 1), vec![(1, 0), (1, 1), (4, 0), (4, 1)]);
        assert_eq!(potential_index_set(1, 0, 0), vec![(0, 0)]);
        assert!(potential_index_set(0, 0, 5).is_empty());
    }

    #[test]
    fn table_rejects_inadmissible_indices() {
        let mut t = InvariantTable::new();
        assert_eq!(t.insert(0, 1, 0, Rat::frac(1, 3)), Ok(None));
        assert!(t.insert(0, 2, 0, Rat::ONE).is_err());
        assert_eq!(t.get(0, 1, 0), Some(&Rat::frac(1, 3)));
        assert_eq!(t.len(), 1);
    }
}
