//! Bipartite states and effects of the maximal composition, represented as
//! 3×3 matrices (row-major `a₁..a₉`).

use serde::{Deserialize, Serialize};

use crate::linalg::{rank, Mat3, Vec3};
use crate::polygon::{LocalTransform, PolygonModel, UNIT};
use crate::TAU;

/// A normalized bipartite state Φ. Serialized as a row-major 9-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BipartiteState(pub Mat3);

/// A bipartite effect; product effects are `e fᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BipartiteEffect(pub Mat3);

impl BipartiteEffect {
    pub fn product(e: &Vec3, f: &Vec3) -> Self {
        BipartiteEffect(e.outer(f))
    }

    /// u⊗uᵀ.
    pub fn unit() -> Self {
        BipartiteEffect(UNIT.outer(&UNIT))
    }

    /// `Tr[Eᵀ Φ]`.
    pub fn prob(&self, state: &BipartiteState) -> f64 {
        self.0.frobenius(&state.0)
    }

    /// Minimum of `Tr[Eᵀ ωᵢωⱼᵀ]` over all product vertices.
    pub fn min_on_product_states(&self, model: &PolygonModel) -> f64 {
        model
            .states
            .iter()
            .flat_map(|a| model.states.iter().map(move |b| self.0.bilinear(a, b)))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `ω_A ω_Bᵀ`.
pub fn product_state(omega_a: &Vec3, omega_b: &Vec3) -> BipartiteState {
    BipartiteState(omega_a.outer(omega_b))
}

/// `eᵀ Φ f`.
pub fn joint_prob(e: &Vec3, f: &Vec3, state: &BipartiteState) -> f64 {
    state.0.bilinear(e, f)
}

/// Rounded-entry identity of a state; two states are equal iff keys match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(pub [i64; 9]);

pub const KEY_SCALE: f64 = 1e7;

impl BipartiteState {
    pub fn new(m: Mat3) -> Self {
        BipartiteState(m)
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        BipartiteState(Mat3::from_rows(rows))
    }

    pub fn entries(&self) -> [f64; 9] {
        self.0 .0
    }

    pub fn key(&self) -> StateKey {
        StateKey(self.0 .0.map(|v| {
            let r = (v * KEY_SCALE).round() as i64;
            // fold -0 and ±1-ulp jitter at exact zero into 0
            if r == 0 {
                0
            } else {
                r
            }
        }))
    }

    /// `Tr[(u⊗uᵀ)ᵀ Φ]`, i.e. the (3,3) entry.
    pub fn normalization(&self) -> f64 {
        self.0.get(2, 2)
    }

    /// Minimum of `eᵢᵀ Φ eⱼ` over all n² ray-extremal product effects.
    pub fn min_product_effect_value(&self, model: &PolygonModel) -> f64 {
        model
            .ray_effects
            .iter()
            .flat_map(|e| model.ray_effects.iter().map(move |f| self.0.bilinear(e, f)))
            .fold(f64::INFINITY, f64::min)
    }

    /// `Φᵀ`.
    pub fn swap(&self) -> BipartiteState {
        BipartiteState(self.0.transpose())
    }

    /// `T_A Φ T_Bᵀ`.
    pub fn apply_local(&self, ta: &LocalTransform, tb: &LocalTransform) -> BipartiteState {
        BipartiteState(ta.matrix * self.0 * tb.matrix.transpose())
    }

    /// `weight·self + (1−weight)·other`.
    pub fn mix(&self, other: &BipartiteState, weight: f64) -> BipartiteState {
        BipartiteState(self.0.scale(weight) + other.0.scale(1.0 - weight))
    }

    pub fn max_abs_diff(&self, other: &BipartiteState) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    /// Row vectors `vec(e fᵀ)` of every product facet active at this state
    /// (`|eᵀΦf| ≤ tol`).
    pub fn active_facets(&self, model: &PolygonModel, tol: f64) -> Vec<[f64; 9]> {
        let mut rows = Vec::new();
        for e in &model.ray_effects {
            for f in &model.ray_effects {
                if self.0.bilinear(e, f).abs() <= tol {
                    rows.push(e.outer(f).0);
                }
            }
        }
        rows
    }

    /// Rank of the active product facets. A valid state is a vertex of the
    /// normalized polytope iff this is 8.
    pub fn facet_rank(&self, model: &PolygonModel, tol: f64) -> usize {
        rank(&self.active_facets(model, tol), 1e-9)
    }
}

/// Normalization within τ and positivity on every ray-extremal product effect.
pub fn is_valid_state(state: &BipartiteState, model: &PolygonModel) -> bool {
    is_valid_state_with(state, model, TAU)
}

pub fn is_valid_state_with(state: &BipartiteState, model: &PolygonModel, tol: f64) -> bool {
    state.0.is_finite()
        && (state.normalization() - 1.0).abs() <= tol
        && state.min_product_effect_value(model) >= -tol
}

pub fn is_symmetric(state: &BipartiteState) -> bool {
    state.0.max_abs_diff(&state.0.transpose()) <= TAU
}

/// Symmetric and positive semidefinite.
pub fn is_inner_product_state(state: &BipartiteState) -> bool {
    is_symmetric(state) && state.0.min_symmetric_eigenvalue() >= -TAU
}

/// Whether the state equals one of the n² product vertices ωᵢωⱼᵀ.
pub fn product_indices(state: &BipartiteState, model: &PolygonModel) -> Option<(usize, usize)> {
    for (i, a) in model.states.iter().enumerate() {
        for (j, b) in model.states.iter().enumerate() {
            if product_state(a, b).max_abs_diff(state) <= 1e-7 {
                return Some((i + 1, j + 1));
            }
        }
    }
    None
}

pub fn is_product_vertex(state: &BipartiteState, model: &PolygonModel) -> bool {
    product_indices(state, model).is_some()
}

/// Parse a row-major 9-element JSON array into a state.
pub fn state_from_json(text: &str) -> Result<BipartiteState, String> {
    let v: Vec<f64> = serde_json::from_str(text).map_err(|e| format!("malformed state JSON: {e}"))?;
    let arr: [f64; 9] = v
        .try_into()
        .map_err(|v: Vec<f64>| format!("state must have 9 entries, got {}", v.len()))?;
    if arr.iter().any(|x| !x.is_finite()) {
        return Err("state entries must be finite".into());
    }
    Ok(BipartiteState(Mat3(arr)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::phi_j;
    use crate::polygon::{build_model, Sign};

    #[test]
    fn product_state_entries() {
        let m = build_model(4).unwrap();
        let w4 = m.state(4).unwrap();
        let p = product_state(&w4, &w4);
        assert!((p.0.get(0, 0) - 2f64.sqrt()).abs() < 1e-12);
        for n in 4..=8 {
            let m = build_model(n).unwrap();
            for a in &m.states {
                for b in &m.states {
                    assert!((product_state(a, b).normalization() - 1.0).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn product_probability_factorizes() {
        let m = build_model(5).unwrap();
        let w1 = m.state(1).unwrap();
        let e1 = m.effect(1).unwrap();
        assert!((joint_prob(&e1, &e1, &product_state(&w1, &w1)) - 1.0).abs() < 1e-12);
        for (i, a) in m.states.iter().enumerate() {
            for b in &m.states {
                let e = m.ray_effects[i];
                let f = m.complements[(i + 2) % 5];
                let want = e.dot(a) * f.dot(b);
                assert!((joint_prob(&e, &f, &product_state(a, b)) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pair_and_matrix_forms_agree() {
        let m = build_model(6).unwrap();
        let phi = phi_j(&m);
        for e in &m.ray_effects {
            for f in &m.complements {
                let a = joint_prob(e, f, &phi);
                let b = BipartiteEffect::product(e, f).prob(&phi);
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn odd_phi_j_gives_inner_product() {
        let m = build_model(5).unwrap();
        let phi = phi_j(&m);
        let all: Vec<Vec3> = m.ray_effects.iter().chain(&m.complements).copied().collect();
        for e in &all {
            for f in &all {
                assert!((joint_prob(e, f, &phi) - e.dot(f)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn even_phi_j_closed_form() {
        use std::f64::consts::PI;
        for n in [4usize, 6, 8] {
            let m = build_model(n).unwrap();
            let phi = phi_j(&m);
            let nf = n as f64;
            for i in 1..=n {
                for j in 1..=n {
                    let want = 0.25 / (PI / nf).cos()
                        * (2.0 * (i as f64 - j as f64) * PI / nf - PI / nf).cos()
                        + 0.25;
                    // Tr[(eᵢeⱼᵀ)Φ] = eⱼᵀΦeᵢ
                    let got = joint_prob(&m.effect(j).unwrap(), &m.effect(i).unwrap(), &phi);
                    assert!((got - want).abs() < 1e-12, "n={n} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn validity_examples() {
        let m5 = build_model(5).unwrap();
        assert!(is_valid_state(&phi_j(&m5), &m5));
        let w = m5.state(1).unwrap();
        let doubled = BipartiteState(product_state(&w, &w).0.scale(2.0));
        assert!(!is_valid_state(&doubled, &m5));
        // identity on the square: brute-force positivity scan finds a negative entry
        let m4 = build_model(4).unwrap();
        let id = BipartiteState(Mat3::IDENTITY);
        let min = m4
            .ray_effects
            .iter()
            .flat_map(|e| m4.ray_effects.iter().map(move |f| e.dot(f)))
            .fold(f64::INFINITY, f64::min);
        assert!(min < -1e-3);
        assert!(!is_valid_state(&id, &m4));
    }

    #[test]
    fn local_action_on_products_and_identity() {
        let m = build_model(5).unwrap();
        let id = crate::polygon::LocalTransform::identity(5);
        let phi = crate::library::phi_h();
        assert_eq!(phi.apply_local(&id, &id).max_abs_diff(&phi), 0.0);
        let ta = m.transformation(2, Sign::Minus).unwrap();
        let tb = m.transformation(3, Sign::Plus).unwrap();
        let (a, b) = (m.state(1).unwrap(), m.state(4).unwrap());
        let lhs = product_state(&a, &b).apply_local(&ta, &tb);
        let rhs = product_state(&ta.matrix.mul_vec(&a), &tb.matrix.mul_vec(&b));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn swap_examples() {
        let m = build_model(5).unwrap();
        let (w1, w2) = (m.state(1).unwrap(), m.state(2).unwrap());
        assert_eq!(product_state(&w1, &w2).swap(), product_state(&w2, &w1));
        let j = phi_j(&m);
        assert_eq!(j.swap(), j);
        let h = crate::library::phi_h();
        assert_eq!(h.swap().swap(), h);
    }

    #[test]
    fn symmetry_predicates() {
        let m5 = build_model(5).unwrap();
        let j = phi_j(&m5);
        assert!(is_symmetric(&j) && is_inner_product_state(&j));
        let lib = crate::library::hexagon_library();
        let get = |name: &str| lib.iter().find(|s| s.name == name).unwrap().state;
        assert!(is_symmetric(&get("II")));
        assert!(!is_symmetric(&get("IV")));
    }

    #[test]
    fn key_folds_negative_zero() {
        let a = BipartiteState(Mat3([-0.0, 1e-12, -1e-12, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]));
        let b = BipartiteState(Mat3([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]));
        assert_eq!(a.key(), b.key());
    }

    #[test]
    fn state_json_parsing() {
        let s = state_from_json("[1,0,0,0,1,0,0,0,1]").unwrap();
        assert_eq!(s.0, Mat3::IDENTITY);
        assert!(state_from_json("[1,2]").is_err());
        assert!(state_from_json("{not json").is_err());
    }
}
