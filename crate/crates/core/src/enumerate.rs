//! Extreme states of the maximal bipartite composition.
//!
//! Every vertex of the normalized state polytope is the unique solution of
//! eight independent facet equalities `eᵢᵀΦeⱼ = 0` plus normalization. Only
//! one 8-subset per symmetry orbit is solved; extreme solutions are then
//! expanded by the group and deduplicated.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composite::{is_symmetric, product_indices, product_state, BipartiteState, StateKey};
use crate::error::{Error, Result};
use crate::library::canonical_entangled_states;
use crate::linalg::{solve, Mat3};
use crate::polygon::PolygonModel;
use crate::symmetry::{state_orbit, EffectSubset, Representative, SymmetryGroup};
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateStatus {
    RankDeficient,
    PositivityViolated,
    Extreme,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSolution {
    pub subset: EffectSubset,
    pub state: Option<BipartiteState>,
    pub status: CandidateStatus,
}

/// Solves the facet system of an 8-subset and classifies the outcome.
pub fn solve_candidate(model: &PolygonModel, subset: EffectSubset, tol: &Tolerances) -> CandidateSolution {
    let n = model.n;
    let mut a = [[0.0; 9]; 9];
    let mut b = [0.0; 9];
    for (row, (i, j)) in subset.effect_pairs(n).into_iter().take(8).enumerate() {
        a[row] = model.ray_effects[i - 1].outer(&model.ray_effects[j - 1]).0;
    }
    a[8][8] = 1.0;
    b[8] = 1.0;

    let Some(x) = solve(&a, &b, tol.rank) else {
        return CandidateSolution {
            subset,
            state: None,
            status: CandidateStatus::RankDeficient,
        };
    };
    let state = BipartiteState(Mat3(x));
    let status = if state.min_product_effect_value(model) >= -tol.tau {
        CandidateStatus::Extreme
    } else {
        CandidateStatus::PositivityViolated
    };
    CandidateSolution {
        subset,
        state: Some(state),
        status,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum VertexKind {
    Product { alice: usize, bob: usize },
    Entangled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Vertex {
    pub state: BipartiteState,
    pub kind: VertexKind,
}

/// Sizes of the representative / unique-solution / feasible sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CandidateStats {
    pub representatives: usize,
    pub unique_solution: usize,
    pub feasible: usize,
    pub distinct_feasible_states: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Enumeration {
    pub n: usize,
    /// Product vertices in index order n(i−1)+j, then entangled ones by key.
    pub vertices: Vec<Vertex>,
    pub stats: CandidateStats,
}

impl Enumeration {
    pub fn total(&self) -> usize {
        self.vertices.len()
    }

    pub fn product_count(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| matches!(v.kind, VertexKind::Product { .. }))
            .count()
    }

    pub fn entangled_count(&self) -> usize {
        self.total() - self.product_count()
    }

    pub fn entangled(&self) -> impl Iterator<Item = &BipartiteState> {
        self.vertices
            .iter()
            .filter(|v| v.kind == VertexKind::Entangled)
            .map(|v| &v.state)
    }

    pub fn contains(&self, state: &BipartiteState) -> bool {
        self.vertices.iter().any(|v| v.state.max_abs_diff(state) <= 1e-6)
    }
}

/// All vertices of the maximal composition, certified post hoc.
pub fn enumerate_extreme_states(
    model: &PolygonModel,
    choice: Representative,
    tol: &Tolerances,
) -> Result<Enumeration> {
    let group = SymmetryGroup::new(model)?;
    let reps = group.orbit_representatives(choice);
    let solutions: Vec<CandidateSolution> = reps
        .par_iter()
        .map(|&s| solve_candidate(model, s, tol))
        .collect();

    let mut stats = CandidateStats {
        representatives: reps.len(),
        ..Default::default()
    };
    let mut distinct: BTreeMap<StateKey, BipartiteState> = BTreeMap::new();
    for sol in &solutions {
        if sol.status != CandidateStatus::RankDeficient {
            stats.unique_solution += 1;
        }
        if sol.status == CandidateStatus::Extreme {
            stats.feasible += 1;
            let state = sol.state.expect("extreme solutions carry a state");
            distinct.entry(state.key()).or_insert(state);
        }
    }
    stats.distinct_feasible_states = distinct.len();

    let mut all: BTreeMap<StateKey, BipartiteState> = BTreeMap::new();
    for (key, state) in &distinct {
        if all.contains_key(key) {
            continue;
        }
        for img in state_orbit(state, model) {
            all.entry(img.key()).or_insert(img);
        }
    }

    let mut products = Vec::new();
    let mut entangled = Vec::new();
    for state in all.into_values() {
        match product_indices(&state, model) {
            Some((alice, bob)) => products.push(Vertex {
                state: product_state(&model.states[alice - 1], &model.states[bob - 1]),
                kind: VertexKind::Product { alice, bob },
            }),
            None => entangled.push(Vertex {
                state,
                kind: VertexKind::Entangled,
            }),
        }
    }
    products.sort_by_key(|v| match v.kind {
        VertexKind::Product { alice, bob } => (alice, bob),
        VertexKind::Entangled => unreachable!(),
    });
    let mut vertices = products;
    vertices.extend(entangled);

    certify(model, &vertices, tol)?;
    Ok(Enumeration {
        n: model.n,
        vertices,
        stats,
    })
}

/// Every vertex must be valid, sit on facets of rank 8, and be separated
/// from every other vertex by more than the dedup resolution.
fn certify(model: &PolygonModel, vertices: &[Vertex], tol: &Tolerances) -> Result<()> {
    for v in vertices {
        if !crate::composite::is_valid_state_with(&v.state, model, tol.tau) {
            return Err(Error::inconsistent(format!(
                "enumerated vertex {:?} fails positivity",
                v.state.entries()
            )));
        }
        let r = v.state.facet_rank(model, 1e-7);
        if r != 8 {
            return Err(Error::inconsistent(format!(
                "enumerated vertex {:?} has active facet rank {r}",
                v.state.entries()
            )));
        }
    }
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            if a.state.max_abs_diff(&b.state) <= 1e-6 {
                return Err(Error::inconsistent(
                    "two enumerated vertices coincide within 1e-6; dedup key split a vertex",
                ));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementClass {
    pub id: usize,
    pub representative: BipartiteState,
    pub members: Vec<BipartiteState>,
    pub size: usize,
    pub matched_name: Option<String>,
    /// Whether some member of the class is a symmetric matrix.
    pub symmetric: bool,
    /// Class that Swap maps this one onto, when different from itself.
    pub swap_related_to: Option<usize>,
}

/// Partitions the entangled vertices into D₂ₙ×D₂ₙ orbits and labels them
/// with the named library states.
pub fn classify_entangled(model: &PolygonModel, enumeration: &Enumeration) -> Result<Vec<EntanglementClass>> {
    let entangled: BTreeMap<StateKey, BipartiteState> =
        enumeration.entangled().map(|s| (s.key(), *s)).collect();
    let mut assigned: BTreeSet<StateKey> = BTreeSet::new();
    let mut classes: Vec<EntanglementClass> = Vec::new();

    for (key, state) in &entangled {
        if assigned.contains(key) {
            continue;
        }
        let orbit = state_orbit(state, model);
        let mut members = Vec::with_capacity(orbit.len());
        for img in orbit {
            let k = img.key();
            let Some(stored) = entangled.get(&k) else {
                return Err(Error::inconsistent(
                    "orbit of an entangled vertex leaves the enumerated vertex set",
                ));
            };
            assigned.insert(k);
            members.push(*stored);
        }
        members.sort_by_key(BipartiteState::key);
        classes.push(EntanglementClass {
            id: 0,
            representative: members[0],
            size: members.len(),
            symmetric: members.iter().any(is_symmetric),
            members,
            matched_name: None,
            swap_related_to: None,
        });
    }

    classes.sort_by(|a, b| a.size.cmp(&b.size).then(a.representative.key().cmp(&b.representative.key())));
    for (id, c) in classes.iter_mut().enumerate() {
        c.id = id;
    }

    let find = |classes: &[EntanglementClass], s: &BipartiteState| {
        classes
            .iter()
            .position(|c| c.members.iter().any(|m| m.max_abs_diff(s) <= 1e-6))
    };

    for named in canonical_entangled_states(model.n) {
        let idx = find(&classes, &named.state).ok_or_else(|| {
            Error::inconsistent(format!(
                "named state {} is not a member of any enumerated class",
                named.name
            ))
        })?;
        let label = &mut classes[idx].matched_name;
        *label = Some(match label.take() {
            Some(prev) => format!("{prev},{}", named.name),
            None => named.name.to_string(),
        });
    }

    for i in 0..classes.len() {
        let swapped = classes[i].representative.swap();
        let j = find(&classes, &swapped)
            .ok_or_else(|| Error::inconsistent("swap of a class representative is not a vertex"))?;
        classes[i].swap_related_to = (j != i).then_some(j);
    }
    Ok(classes)
}
