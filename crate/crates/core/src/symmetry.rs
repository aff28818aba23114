//! The local symmetry group D₂ₙ×D₂ₙ acting on 8-subsets of the n² product
//! effects: orbit representatives, orbit expansion and Burnside counting.
//!
//! Product effect eᵢ⊗eⱼ carries the 1-based index n(i−1)+j; an
//! [`EffectSubset`] stores index `k` as bit `k−1` of a `u64`, so subset
//! operations are limited to n ≤ 8.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composite::{BipartiteState, StateKey};
use crate::error::{Error, Result};
use crate::polygon::{wrap_index, LocalTransform, PolygonModel, Sign};

/// Number of product effects in every subset.
pub const SUBSET_SIZE: u32 = 8;

/// Largest polygon whose n² product effects fit in a `u64` mask.
pub const MAX_SUBSET_N: usize = 8;

/// T_A ⊗ T_B with its cached permutation of product-effect indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub alice: LocalTransform,
    pub bob: LocalTransform,
    /// `perm[k]` is the 0-based image of 0-based product index `k`.
    perm: Vec<u8>,
}

impl GroupElement {
    pub fn new(model: &PolygonModel, alice: LocalTransform, bob: LocalTransform) -> Result<Self> {
        let n = model.n;
        let pa = model.effect_permutation(&alice)?;
        let pb = model.effect_permutation(&bob)?;
        let mut perm = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                perm.push((n * (pa[i] - 1) + (pb[j] - 1)) as u8);
            }
        }
        Ok(GroupElement { alice, bob, perm })
    }

    pub fn identity(model: &PolygonModel) -> Self {
        let id = LocalTransform::identity(model.n);
        GroupElement::new(model, id, id).expect("identity always matches")
    }

    /// 1-based permutation of product indices, `out[k-1] = image of k`.
    pub fn index_permutation(&self) -> Vec<usize> {
        self.perm.iter().map(|&p| p as usize + 1).collect()
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &GroupElement, model: &PolygonModel) -> Result<GroupElement> {
        GroupElement::new(model, self.alice.compose(&other.alice), self.bob.compose(&other.bob))
    }

    /// Image of a subset.
    #[inline]
    pub fn act(&self, s: EffectSubset) -> EffectSubset {
        let mut m = s.0;
        let mut out = 0u64;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            out |= 1u64 << self.perm[i];
            m &= m - 1;
        }
        EffectSubset(out)
    }

    /// `T_A Φ T_Bᵀ`.
    pub fn apply_state(&self, state: &BipartiteState) -> BipartiteState {
        state.apply_local(&self.alice, &self.bob)
    }

    /// Cycle lengths of the index permutation.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let len = self.perm.len();
        let mut seen = vec![false; len];
        let mut out = Vec::new();
        for start in 0..len {
            if seen[start] {
                continue;
            }
            let mut c = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.perm[k] as usize;
                c += 1;
            }
            out.push(c);
        }
        out
    }

    /// Number of 8-subsets left invariant: selections of whole cycles whose
    /// lengths sum to 8.
    pub fn fixed_subset_count(&self) -> u64 {
        let target = SUBSET_SIZE as usize;
        let mut ways = vec![0u64; target + 1];
        ways[0] = 1;
        for c in self.cycle_lengths() {
            if c > target {
                continue;
            }
            for s in (c..=target).rev() {
                ways[s] += ways[s - c];
            }
        }
        ways[target]
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}⊗{}", self.alice, self.bob)
    }
}

/// All 4n² elements; Alice-major over (rotations k=1..n, reflections k=1..n).
pub fn group_elements(model: &PolygonModel) -> Result<Vec<GroupElement>> {
    let locals = model.transformations();
    let mut out = Vec::with_capacity(locals.len() * locals.len());
    for a in &locals {
        for b in &locals {
            out.push(GroupElement::new(model, *a, *b)?);
        }
    }
    Ok(out)
}

/// A set of product-effect indices as a bitmask (index k ↦ bit k−1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EffectSubset(pub u64);

impl EffectSubset {
    pub fn from_indices(indices: &[usize]) -> Self {
        EffectSubset(indices.iter().fold(0u64, |m, &k| m | 1u64 << (k - 1)))
    }

    /// 1-based indices in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        let mut m = self.0;
        let mut out = Vec::with_capacity(m.count_ones() as usize);
        while m != 0 {
            out.push(m.trailing_zeros() as usize + 1);
            m &= m - 1;
        }
        out
    }

    pub fn len(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    /// (i, j) pairs, 1-based, for product index n(i−1)+j.
    pub fn effect_pairs(&self, n: usize) -> Vec<(usize, usize)> {
        self.indices()
            .into_iter()
            .map(|k| ((k - 1) / n + 1, (k - 1) % n + 1))
            .collect()
    }
}

/// Which orbit member is the representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representative {
    /// Integer-minimal bitmask.
    #[default]
    Min,
    /// Integer-maximal bitmask (used to cross-check the vertex set).
    Max,
}

/// The group together with its cached permutations, for subset operations.
pub struct SymmetryGroup {
    pub n: usize,
    pub elements: Vec<GroupElement>,
}

impl SymmetryGroup {
    pub fn new(model: &PolygonModel) -> Result<Self> {
        if model.n > MAX_SUBSET_N {
            return Err(Error::invalid(format!(
                "subset operations support n ≤ {MAX_SUBSET_N} (got {})",
                model.n
            )));
        }
        Ok(SymmetryGroup {
            n: model.n,
            elements: group_elements(model)?,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn canonical_form(&self, s: EffectSubset) -> EffectSubset {
        self.elements.iter().map(|g| g.act(s)).min().unwrap_or(s)
    }

    pub fn is_canonical(&self, s: EffectSubset) -> bool {
        self.is_representative(s, Representative::Min)
    }

    /// Early-exit check that no image is below (Min) / above (Max) `s`.
    pub fn is_representative(&self, s: EffectSubset, choice: Representative) -> bool {
        match choice {
            Representative::Min => self.elements.iter().all(|g| g.act(s) >= s),
            Representative::Max => self.elements.iter().all(|g| g.act(s) <= s),
        }
    }

    /// Distinct images of `s`, ascending.
    pub fn orbit(&self, s: EffectSubset) -> Vec<EffectSubset> {
        let mut out: Vec<EffectSubset> = self.elements.iter().map(|g| g.act(s)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn orbit_size(&self, s: EffectSubset) -> usize {
        self.orbit(s).len()
    }

    /// All orbit representatives among the 8-subsets, in ascending bitmask
    /// order. Work is split by the highest set bit and merged in order.
    pub fn orbit_representatives(&self, choice: Representative) -> Vec<EffectSubset> {
        let bits = (self.n * self.n) as u32;
        let k = SUBSET_SIZE;
        match choice {
            Representative::Min => (k - 1..bits)
                .into_par_iter()
                .map(|top| {
                    let mut found = Vec::new();
                    for_each_subset(top, k - 1, |low| {
                        let s = EffectSubset(low | (1u64 << top));
                        if self.is_representative(s, choice) {
                            found.push(s);
                        }
                    });
                    found
                })
                .flatten()
                .collect(),
            Representative::Max => {
                // The group is transitive on product effects, so the maximal
                // member of every orbit contains the top bit.
                let top = bits - 1;
                // Remaining 7 bits lie in 0..top; partition by their highest.
                (k - 2..top)
                    .into_par_iter()
                    .map(|hi| {
                        let mut found = Vec::new();
                        for_each_subset(hi, k - 2, |low| {
                            let s = EffectSubset(low | (1u64 << hi) | (1u64 << top));
                            if self.is_representative(s, choice) {
                                found.push(s);
                            }
                        });
                        found
                    })
                    .flatten()
                    .collect()
            }
        }
    }

    pub fn burnside_orbit_count(&self) -> Result<u64> {
        let total: u64 = self.elements.iter().map(GroupElement::fixed_subset_count).sum();
        let order = self.order() as u64;
        if total % order != 0 {
            return Err(Error::inconsistent(format!(
                "fixed-point total {total} is not divisible by group order {order}"
            )));
        }
        Ok(total / order)
    }

    /// Fixed-point counts on a (2n)×(2n) grid. Rows and columns are ordered
    /// 𝕀, r, …, rⁿ⁻¹, f, rf, …, rⁿ⁻¹f with r = 𝒯₁⁺ and f = 𝒯ₙ⁻, so that
    /// rᵃ = 𝒯ₐ⁺ and rᵃf = 𝒯ₐ⁻.
    pub fn fixed_point_table(&self, model: &PolygonModel) -> Result<Vec<Vec<u64>>> {
        let n = self.n;
        let order: Vec<LocalTransform> = [Sign::Plus, Sign::Minus]
            .into_iter()
            .flat_map(|s| (0..n).map(move |a| (wrap_index(a as i64, n), s)))
            .map(|(k, s)| model.transformation(k, s))
            .collect::<Result<_>>()?;
        order
            .iter()
            .map(|a| {
                order
                    .iter()
                    .map(|b| Ok(GroupElement::new(model, *a, *b)?.fixed_subset_count()))
                    .collect()
            })
            .collect()
    }
}

/// Visits every `count`-subset of bits `0..width` in increasing integer order
/// (Gosper's hack).
pub fn for_each_subset(width: u32, count: u32, mut visit: impl FnMut(u64)) {
    if count > width {
        return;
    }
    if count == 0 {
        visit(0);
        return;
    }
    let limit = 1u64 << width;
    let mut s: u64 = (1u64 << count) - 1;
    while s < limit {
        visit(s);
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
}

pub fn burnside_orbit_count(model: &PolygonModel) -> Result<u64> {
    SymmetryGroup::new(model)?.burnside_orbit_count()
}

/// Deduplicated orbit {T_A Φ T_Bᵀ} of a state under D₂ₙ×D₂ₙ, sorted by key.
pub fn state_orbit(state: &BipartiteState, model: &PolygonModel) -> Vec<BipartiteState> {
    let locals = model.transformations();
    let mut seen: BTreeMap<StateKey, BipartiteState> = BTreeMap::new();
    for a in &locals {
        for b in &locals {
            let img = state.apply_local(a, b);
            seen.entry(img.key()).or_insert(img);
        }
    }
    seen.into_values().collect()
}

/// Binomial coefficient, exact in u64 for the sizes used here.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::build_model;

    fn group(n: usize) -> (PolygonModel, SymmetryGroup) {
        let m = build_model(n).unwrap();
        let g = SymmetryGroup::new(&m).unwrap();
        (m, g)
    }

    #[test]
    fn group_orders() {
        assert_eq!(group(4).1.order(), 64);
        assert_eq!(group(5).1.order(), 100);
        let (m, _) = group(6);
        let id = GroupElement::identity(&m);
        assert_eq!(id.index_permutation(), (1..=36).collect::<Vec<_>>());
    }

    #[test]
    fn cached_permutation_follows_index_rule() {
        let (m, g) = group(5);
        for el in &g.elements {
            let pa = m.effect_permutation(&el.alice).unwrap();
            let pb = m.effect_permutation(&el.bob).unwrap();
            let perm = el.index_permutation();
            for i in 1..=5 {
                for j in 1..=5 {
                    assert_eq!(perm[5 * (i - 1) + j - 1], 5 * (pa[i - 1] - 1) + pb[j - 1]);
                }
            }
        }
    }

    /// r_A f_A ⊗ 𝕀_B with r = 𝒯₁⁺ and f = 𝒯₄⁻ on the square.
    fn rf_identity(m: &PolygonModel) -> GroupElement {
        let rf = m
            .transformation(1, Sign::Plus)
            .unwrap()
            .compose(&m.transformation(4, Sign::Minus).unwrap());
        GroupElement::new(m, rf, LocalTransform::identity(4)).unwrap()
    }

    #[test]
    fn square_rf_fixes_two_rows_and_flips_pairs() {
        let (m, _) = group(4);
        let g = rf_identity(&m);
        let fixed = EffectSubset::from_indices(&[1, 2, 3, 4, 9, 10, 11, 12]);
        assert_eq!(g.act(fixed), fixed);
        for (a, b) in [(5, 13), (6, 14), (7, 15), (8, 16)] {
            assert_eq!(g.act(EffectSubset::from_indices(&[a])), EffectSubset::from_indices(&[b]));
            assert_eq!(g.act(EffectSubset::from_indices(&[b])), EffectSubset::from_indices(&[a]));
        }
        assert_eq!(g.fixed_subset_count(), 646);
    }

    #[test]
    fn fixed_counts_examples() {
        let (m, _) = group(4);
        assert_eq!(GroupElement::identity(&m).fixed_subset_count(), 12870);
        let r = m.transformation(1, Sign::Plus).unwrap();
        assert_eq!(GroupElement::new(&m, r, r).unwrap().fixed_subset_count(), 6);
    }

    #[test]
    fn identity_fixes_everything() {
        for n in 4..=8 {
            let m = build_model(n).unwrap();
            let total = binomial((n * n) as u64, 8);
            assert_eq!(GroupElement::identity(&m).fixed_subset_count(), total);
        }
    }

    #[test]
    fn square_orbit_count_and_representatives() {
        let (_, g) = group(4);
        assert_eq!(g.burnside_orbit_count().unwrap(), 283);
        let reps = g.orbit_representatives(Representative::Min);
        assert_eq!(reps.len(), 283);
        assert!(reps.windows(2).all(|w| w[0] < w[1]));
        let total: usize = reps.iter().map(|&s| g.orbit_size(s)).sum();
        assert_eq!(total as u64, binomial(16, 8));
        for &s in &reps {
            assert_eq!(64 % g.orbit_size(s), 0);
            assert_eq!(s.len(), 8);
        }
        assert_eq!(g.orbit_representatives(Representative::Max).len(), 283);
    }

    #[test]
    fn canonical_form_is_idempotent_and_unique() {
        let (_, g) = group(4);
        let s = EffectSubset::from_indices(&[2, 5, 7, 8, 11, 12, 13, 16]);
        let c = g.canonical_form(s);
        assert_eq!(g.canonical_form(c), c);
        let orbit = g.orbit(s);
        assert_eq!(orbit.iter().filter(|&&x| g.is_canonical(x)).count(), 1);
        assert!(orbit.contains(&c));
    }

    #[test]
    fn subset_enumeration_order() {
        let mut seen = Vec::new();
        for_each_subset(5, 2, |s| seen.push(s));
        assert_eq!(seen.len(), 10);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        let mut none = 0;
        for_each_subset(2, 3, |_| none += 1);
        assert_eq!(none, 0);
    }

    #[test]
    fn rejects_large_polygons() {
        let m = build_model(9).unwrap();
        assert!(SymmetryGroup::new(&m).is_err());
    }

    #[test]
    fn effect_pairs_decode_index_rule() {
        let s = EffectSubset::from_indices(&[1, 6, 16]);
        assert_eq!(s.effect_pairs(4), vec![(1, 1), (2, 2), (4, 4)]);
    }
}
