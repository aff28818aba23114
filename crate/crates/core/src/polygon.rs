//! The elementary regular-polygon model: pure states, extremal effects,
//! reversible transformations and the orthogonality structure of effects.
//!
//! Indices follow the 1..n convention throughout the public API: an index
//! reduced modulo `n` yields `n` rather than `0` (see [`wrap_index`]).

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::TAU;

/// Reduces any integer into `1..=n`, returning `n` where `k mod n == 0`.
pub fn wrap_index(k: i64, n: usize) -> usize {
    let n = n as i64;
    let r = k.rem_euclid(n);
    if r == 0 {
        n as usize
    } else {
        r as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Rotation (`+1`) or reflection (`−1`) branch of a dihedral element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// The n-gon model. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonModel {
    pub n: usize,
    pub r_n: f64,
    pub parity: Parity,
    /// Pure states ω₁..ωₙ.
    pub states: Vec<Vec3>,
    /// Ray-extremal effects e₁..eₙ.
    pub ray_effects: Vec<Vec3>,
    /// Complementary extremal effects ē₁..ēₙ. Ray-extremal only for even n.
    pub complements: Vec<Vec3>,
    pub unit: Vec3,
    pub null: Vec3,
}

pub const UNIT: Vec3 = Vec3::new(0.0, 0.0, 1.0);
pub const NULL: Vec3 = Vec3::new(0.0, 0.0, 0.0);

/// Builds the n-gon model for `n ≥ 4`.
pub fn build_model(n: usize) -> Result<PolygonModel> {
    if n < 4 {
        return Err(Error::invalid(format!(
            "polygon order must be at least 4 (got {n}); n < 4 are simplices"
        )));
    }
    let nf = n as f64;
    let r_n = (1.0 / (PI / nf).cos()).sqrt();
    let parity = Parity::of(n);

    let states: Vec<Vec3> = (1..=n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / nf;
            Vec3::new(r_n * a.cos(), r_n * a.sin(), 1.0)
        })
        .collect();

    let ray_effects: Vec<Vec3> = (1..=n)
        .map(|i| match parity {
            Parity::Even => {
                let a = (2 * i - 1) as f64 * PI / nf;
                Vec3::new(r_n * a.cos(), r_n * a.sin(), 1.0).scale(0.5)
            }
            Parity::Odd => {
                let a = 2.0 * PI * i as f64 / nf;
                Vec3::new(r_n * a.cos(), r_n * a.sin(), 1.0).scale(1.0 / (1.0 + r_n * r_n))
            }
        })
        .collect();

    let complements = ray_effects.iter().map(|e| UNIT - *e).collect();

    Ok(PolygonModel {
        n,
        r_n,
        parity,
        states,
        ray_effects,
        complements,
        unit: UNIT,
        null: NULL,
    })
}

/// `e(ω) = e·ω`.
pub fn effect_value(e: &Vec3, omega: &Vec3) -> f64 {
    e.dot(omega)
}

impl PolygonModel {
    fn check_index(&self, i: usize) -> Result<usize> {
        if (1..=self.n).contains(&i) {
            Ok(i - 1)
        } else {
            Err(Error::invalid(format!("index {i} outside 1..={}", self.n)))
        }
    }

    /// ωᵢ for `i ∈ 1..=n`.
    pub fn state(&self, i: usize) -> Result<Vec3> {
        Ok(self.states[self.check_index(i)?])
    }

    /// eᵢ for `i ∈ 1..=n`.
    pub fn effect(&self, i: usize) -> Result<Vec3> {
        Ok(self.ray_effects[self.check_index(i)?])
    }

    /// ēᵢ = u − eᵢ for `i ∈ 1..=n`.
    pub fn complement_effect(&self, i: usize) -> Result<Vec3> {
        Ok(self.complements[self.check_index(i)?])
    }

    /// Whether ēᵢ are themselves ray-extremal (true exactly for even n).
    pub fn complements_are_ray_extremal(&self) -> bool {
        self.parity == Parity::Even
    }

    /// u − e.
    pub fn complement(&self, e: &Vec3) -> Vec3 {
        self.unit - *e
    }

    /// Σᵢ eᵢ = c·u, with c = n/(1+r²) for odd n and n/2 for even n.
    pub fn effect_sum_coefficient(&self) -> f64 {
        match self.parity {
            Parity::Even => self.n as f64 / 2.0,
            Parity::Odd => self.n as f64 / (1.0 + self.r_n * self.r_n),
        }
    }

    /// The reversible transformation 𝒯ₖˢ.
    pub fn transformation(&self, k: usize, s: Sign) -> Result<LocalTransform> {
        if !(1..=self.n).contains(&k) {
            return Err(Error::invalid(format!(
                "transformation index {k} outside 1..={}",
                self.n
            )));
        }
        Ok(LocalTransform::new(self.n, k, s))
    }

    /// All 2n reversible transformations: rotations k = 1..n, then reflections.
    pub fn transformations(&self) -> Vec<LocalTransform> {
        [Sign::Plus, Sign::Minus]
            .into_iter()
            .flat_map(|s| (1..=self.n).map(move |k| (k, s)))
            .map(|(k, s)| LocalTransform::new(self.n, k, s))
            .collect()
    }

    /// Index of the vertex matching `v` within [`TAU`]-scaled tolerance.
    pub fn match_state(&self, v: &Vec3) -> Option<usize> {
        nearest(&self.states, v).map(|i| i + 1)
    }

    /// Index of the ray effect matching `v`.
    pub fn match_effect(&self, v: &Vec3) -> Option<usize> {
        nearest(&self.ray_effects, v).map(|i| i + 1)
    }

    /// The permutation π with T·eᵢ = e_{π(i)}, as a 1-based vector
    /// (`perm[i-1] = π(i)`).
    pub fn effect_permutation(&self, t: &LocalTransform) -> Result<Vec<usize>> {
        if t.n != self.n {
            return Err(Error::invalid(format!(
                "transformation of a {}-gon applied to a {}-gon",
                t.n, self.n
            )));
        }
        self.ray_effects
            .iter()
            .enumerate()
            .map(|(i, e)| {
                self.match_effect(&t.matrix.mul_vec(e)).ok_or_else(|| {
                    Error::inconsistent(format!(
                        "image of e{} under T{}{} is not a ray effect",
                        i + 1,
                        t.k,
                        t.sign
                    ))
                })
            })
            .collect()
    }

    /// Same as [`Self::effect_permutation`] for the vertex set.
    pub fn state_permutation(&self, t: &LocalTransform) -> Result<Vec<usize>> {
        self.states
            .iter()
            .enumerate()
            .map(|(i, w)| {
                self.match_state(&t.matrix.mul_vec(w)).ok_or_else(|| {
                    Error::inconsistent(format!(
                        "image of w{} under T{}{} is not a vertex",
                        i + 1,
                        t.k,
                        t.sign
                    ))
                })
            })
            .collect()
    }

    /// Orthogonality graph over {eᵢ} ∪ {ēᵢ}; defined for odd n only.
    pub fn orthogonality_graph(&self) -> Result<OrthogonalityGraph> {
        if self.parity == Parity::Even {
            return Err(Error::unsupported(
                "orthogonality graph is only defined for odd polygons",
            ));
        }
        let nodes: Vec<ExtremeEffect> = (1..=self.n)
            .map(ExtremeEffect::Ray)
            .chain((1..=self.n).map(ExtremeEffect::Complement))
            .collect();
        let vectors: Vec<Vec3> = nodes.iter().map(|node| self.extreme_effect(*node)).collect();
        let adjacency = vectors
            .iter()
            .enumerate()
            .map(|(a, va)| {
                vectors
                    .iter()
                    .enumerate()
                    .filter(|&(b, vb)| a != b && va.dot(vb).abs() <= TAU)
                    .map(|(b, _)| b)
                    .collect()
            })
            .collect();
        Ok(OrthogonalityGraph { nodes, adjacency })
    }

    pub fn extreme_effect(&self, node: ExtremeEffect) -> Vec3 {
        match node {
            ExtremeEffect::Ray(i) => self.ray_effects[i - 1],
            ExtremeEffect::Complement(i) => self.complements[i - 1],
        }
    }
}

fn nearest(set: &[Vec3], v: &Vec3) -> Option<usize> {
    // Distinct vertices/effects are ≥ 0.1 apart for n ≤ 12, so any match
    // within 1e-6 is unambiguous.
    set.iter()
        .enumerate()
        .map(|(i, w)| (i, w.max_abs_diff(v)))
        .filter(|&(_, d)| d <= 1e-6)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

/// An element 𝒯ₖˢ of the dihedral group acting on one polygon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalTransform {
    pub n: usize,
    pub k: usize,
    pub sign: Sign,
    pub matrix: Mat3,
}

impl LocalTransform {
    fn new(n: usize, k: usize, sign: Sign) -> Self {
        let a = 2.0 * PI * (k % n) as f64 / n as f64;
        let (sin, cos) = a.sin_cos();
        let s = sign.value();
        let matrix = Mat3::from_rows([[cos, -s * sin, 0.0], [sin, s * cos, 0.0], [0.0, 0.0, 1.0]]);
        LocalTransform { n, k, sign, matrix }
    }

    pub fn identity(n: usize) -> Self {
        LocalTransform::new(n, n, Sign::Plus)
    }

    /// `self ∘ other` (apply `other` first), in closed form:
    /// R(a)R(b) = R(a+b), R(a)F(b) = F(a+b), F(a)R(b) = F(a−b), F(a)F(b) = R(a−b).
    pub fn compose(&self, other: &LocalTransform) -> LocalTransform {
        assert_eq!(self.n, other.n, "composing transforms of different polygons");
        let (a, b) = (self.k as i64, other.k as i64);
        let (k, sign) = match (self.sign, other.sign) {
            (Sign::Plus, Sign::Plus) => (a + b, Sign::Plus),
            (Sign::Plus, Sign::Minus) => (a + b, Sign::Minus),
            (Sign::Minus, Sign::Plus) => (a - b, Sign::Minus),
            (Sign::Minus, Sign::Minus) => (a - b, Sign::Plus),
        };
        LocalTransform::new(self.n, wrap_index(k, self.n), sign)
    }

    pub fn inverse(&self) -> LocalTransform {
        match self.sign {
            Sign::Plus => LocalTransform::new(self.n, wrap_index(-(self.k as i64), self.n), Sign::Plus),
            Sign::Minus => *self,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.sign == Sign::Plus && self.k == self.n
    }
}

impl fmt::Display for LocalTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}{}", self.k, self.sign)
    }
}

/// A node of the orthogonality graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExtremeEffect {
    Ray(usize),
    Complement(usize),
}

impl fmt::Display for ExtremeEffect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtremeEffect::Ray(i) => write!(f, "e{i}"),
            ExtremeEffect::Complement(i) => write!(f, "~e{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityGraph {
    pub nodes: Vec<ExtremeEffect>,
    /// `adjacency[a]` lists node positions orthogonal to node `a`.
    pub adjacency: Vec<Vec<usize>>,
}

impl OrthogonalityGraph {
    pub fn neighbors(&self, node: ExtremeEffect) -> Vec<ExtremeEffect> {
        let Some(pos) = self.nodes.iter().position(|&x| x == node) else {
            return Vec::new();
        };
        let mut out: Vec<ExtremeEffect> = self.adjacency[pos].iter().map(|&b| self.nodes[b]).collect();
        out.sort();
        out
    }

    pub fn degree(&self, node: ExtremeEffect) -> usize {
        self.neighbors(node).len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_simplices() {
        for n in 0..4 {
            assert!(matches!(build_model(n), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn square_vertex_four_sits_on_x_axis() {
        let m = build_model(4).unwrap();
        let w4 = m.state(4).unwrap();
        let r4 = 2f64.powf(0.25);
        assert!((m.r_n - 1.189207115002721).abs() < 1e-12);
        assert!(w4.max_abs_diff(&Vec3::new(r4, 0.0, 1.0)) < 1e-12);
    }

    #[test]
    fn pentagon_effects_click_on_own_vertex() {
        let m = build_model(5).unwrap();
        for i in 1..=5 {
            let v = effect_value(&m.effect(i).unwrap(), &m.state(i).unwrap());
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn effect_on_unit_vector() {
        let m5 = build_model(5).unwrap();
        // 1/(1 + sec 36°), evaluated independently
        let want = 1.0 / (1.0 + 1.0 / (36f64.to_radians()).cos());
        assert!((want - 0.447213595499958).abs() < 1e-12);
        for e in &m5.ray_effects {
            assert!((effect_value(e, &UNIT) - want).abs() < 1e-12);
        }
        let m4 = build_model(4).unwrap();
        for e in &m4.ray_effects {
            assert!((effect_value(e, &UNIT) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn hexagon_antipodal_effects_sum_to_unit() {
        let m = build_model(6).unwrap();
        for i in 1..=6 {
            let sum = m.effect(i).unwrap() + m.effect(wrap_index(i as i64 + 3, 6)).unwrap();
            assert!(sum.max_abs_diff(&UNIT) < 1e-12);
        }
    }

    #[test]
    fn complement_of_trivial_effects() {
        let m = build_model(5).unwrap();
        assert_eq!(m.complement(&UNIT), NULL);
        assert_eq!(m.complement(&NULL), UNIT);
        let m8 = build_model(8).unwrap();
        for i in 1..=8 {
            let c = m8.complement(&m8.effect(i).unwrap());
            assert_eq!(m8.match_effect(&c), Some(wrap_index(i as i64 + 4, 8)));
        }
    }

    #[test]
    fn transformation_index_checked() {
        let m = build_model(5).unwrap();
        assert!(m.transformation(0, Sign::Plus).is_err());
        assert!(m.transformation(6, Sign::Minus).is_err());
        let id = m.transformation(5, Sign::Plus).unwrap();
        assert!(id.matrix.max_abs_diff(&Mat3::IDENTITY) < 1e-12);
    }

    #[test]
    fn square_rotation_advances_vertex() {
        let m = build_model(4).unwrap();
        let t = m.transformation(1, Sign::Plus).unwrap();
        let img = t.matrix.mul_vec(&m.state(1).unwrap());
        assert_eq!(m.match_state(&img), Some(2));
        assert_eq!(m.effect_permutation(&t).unwrap(), vec![2, 3, 4, 1]);
    }

    #[test]
    fn pentagon_reflection_is_involution() {
        let m = build_model(5).unwrap();
        let t = m.transformation(1, Sign::Minus).unwrap();
        let sq = t.matrix * t.matrix;
        for w in &m.states {
            assert!(sq.mul_vec(w).max_abs_diff(w) < 1e-12);
        }
    }

    #[test]
    fn square_reversing_reflection_exists() {
        let m = build_model(4).unwrap();
        let found = m
            .transformations()
            .iter()
            .any(|t| m.effect_permutation(t).unwrap() == vec![4, 3, 2, 1]);
        assert!(found);
        assert_eq!(
            m.effect_permutation(&m.transformation(4, Sign::Minus).unwrap()).unwrap(),
            vec![4, 3, 2, 1]
        );
    }

    #[test]
    fn identity_permutation() {
        let m = build_model(7).unwrap();
        let p = m.effect_permutation(&LocalTransform::identity(7)).unwrap();
        assert_eq!(p, (1..=7).collect::<Vec<_>>());
    }

    #[test]
    fn compose_matches_matrix_product() {
        for n in 4..=8 {
            let m = build_model(n).unwrap();
            let all = m.transformations();
            for a in &all {
                for b in &all {
                    let c = a.compose(b);
                    assert!(c.matrix.max_abs_diff(&(a.matrix * b.matrix)) < 1e-12, "{a} {b}");
                }
                assert!(a.compose(&a.inverse()).is_identity());
            }
        }
    }

    #[test]
    fn pentagon_orthogonality_neighbors() {
        let m = build_model(5).unwrap();
        let g = m.orthogonality_graph().unwrap();
        assert_eq!(
            g.neighbors(ExtremeEffect::Ray(1)),
            vec![ExtremeEffect::Ray(3), ExtremeEffect::Ray(4), ExtremeEffect::Complement(1)]
        );
        let d = m.effect(1).unwrap().dot(&m.complement_effect(1).unwrap());
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn heptagon_ray_degree_is_three() {
        // brute force over all pairs of extreme effects
        let m = build_model(7).unwrap();
        let all: Vec<Vec3> = m.ray_effects.iter().chain(m.complements.iter()).copied().collect();
        for (r, e) in m.ray_effects.iter().enumerate() {
            let deg = all
                .iter()
                .enumerate()
                .filter(|&(j, f)| j != r && e.dot(f).abs() < 1e-9)
                .count();
            assert_eq!(deg, 3);
        }
        let g = m.orthogonality_graph().unwrap();
        for r in 1..=7 {
            assert_eq!(g.degree(ExtremeEffect::Ray(r)), 3);
        }
    }

    #[test]
    fn even_orthogonality_graph_unsupported() {
        let m = build_model(6).unwrap();
        assert!(matches!(m.orthogonality_graph(), Err(Error::Unsupported(_))));
    }
}
