//! Named entangled states: the maximally-entangled analogue Φ_J for every n,
//! the pentagon's second class Φ_H, and the six hexagon class
//! representatives Φ_I..Φ_VI.

use std::f64::consts::PI;

use serde::Serialize;

use crate::composite::{is_symmetric, is_valid_state, BipartiteState};
use crate::linalg::Mat3;
use crate::polygon::{build_model, Parity, PolygonModel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedState {
    pub name: &'static str,
    pub state: BipartiteState,
}

fn r_n(n: usize) -> f64 {
    (1.0 / (PI / n as f64).cos()).sqrt()
}

/// Φ_J: identity for odd n, rotation by π/n in the upper block for even n.
pub fn phi_j(model: &PolygonModel) -> BipartiteState {
    phi_j_for(model.n)
}

pub fn phi_j_for(n: usize) -> BipartiteState {
    if n % 2 == 1 {
        return BipartiteState(Mat3::IDENTITY);
    }
    let (s, c) = (PI / n as f64).sin_cos();
    BipartiteState::from_rows([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])
}

/// The pentagon's non-maximal class representative.
pub fn phi_h() -> BipartiteState {
    let r = r_n(5);
    let (s, c) = (PI / 5.0).sin_cos();
    let off = -r.powi(6) * s / (8.0 * (1.0 + r * r));
    let z = -r.powi(3) / (4.0 * s);
    BipartiteState::from_rows([[-c, off, 0.0], [off, c, z], [0.0, z, 1.0]])
}

/// Φ_III with the given signs on entries (1,3), (2,3), (3,1), (3,2).
pub fn phi_iii_variant(signs: [f64; 4]) -> BipartiteState {
    let r = r_n(6);
    BipartiteState::from_rows([
        [-1.0 / (3.0 * r * r), -1.0 / r.powi(4), signs[0] * 2.0 / (3.0 * r.powi(3))],
        [-1.0 / r.powi(4), 0.0, signs[1] / (2.0 * r)],
        [signs[2] * 2.0 / (3.0 * r.powi(3)), signs[3] / (2.0 * r), 1.0],
    ])
}

/// Sign pattern of Φ_III as printed: third column positive, third row negative.
pub const PHI_III_PRINTED_SIGNS: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

/// The six hexagon representatives, Φ_III in its printed form.
pub fn hexagon_library() -> Vec<NamedState> {
    let r = r_n(6);
    let r2 = r * r;
    let r3 = r2 * r;
    let named = |name, rows| NamedState {
        name,
        state: BipartiteState::from_rows(rows),
    };
    vec![
        NamedState {
            name: "I",
            state: phi_j_for(6),
        },
        named(
            "II",
            [
                [1.0 / (15.0 * r2), 0.7, 2.0 / (3.0 * r3)],
                [0.7, 1.0 / (5.0 * r2), 3.0 / (5.0 * r)],
                [2.0 / (3.0 * r3), 3.0 / (5.0 * r), 1.0],
            ],
        ),
        NamedState {
            name: "III",
            state: phi_iii_variant(PHI_III_PRINTED_SIGNS),
        },
        named(
            "IV",
            [
                [1.0 / (7.0 * r2), 9.0 / 14.0, 10.0 / (21.0 * r3)],
                [11.0 / 14.0, 1.0 / (7.0 * r2), 5.0 / (7.0 * r)],
                [6.0 / (7.0 * r3), 3.0 / (7.0 * r), 1.0],
            ],
        ),
        named(
            "V",
            [
                [1.0 / (7.0 * r2), 11.0 / 14.0, 6.0 / (7.0 * r3)],
                [9.0 / 14.0, 1.0 / (7.0 * r2), 3.0 / (7.0 * r)],
                [10.0 / (21.0 * r3), 5.0 / (7.0 * r), 1.0],
            ],
        ),
        named(
            "VI",
            [
                [-1.0 / (2.0 * r2), -1.0 / r2.powi(2), 1.0 / (3.0 * r3)],
                [-1.0 / r2.powi(2), 1.0 / (2.0 * r2), -1.0 / (2.0 * r)],
                [1.0 / (3.0 * r3), -1.0 / (2.0 * r), 1.0],
            ],
        ),
    ]
}

/// The named library for `n`: {J} for n=4 and n ≥ 7, {J, H} for n=5,
/// {I..VI} for n=6.
pub fn canonical_entangled_states(n: usize) -> Vec<NamedState> {
    match n {
        5 => vec![
            NamedState {
                name: "J",
                state: phi_j_for(5),
            },
            NamedState {
                name: "H",
                state: phi_h(),
            },
        ],
        6 => hexagon_library(),
        _ => vec![NamedState {
            name: "J",
            state: phi_j_for(n),
        }],
    }
}

/// Looks up a named state; "J" is accepted for every n, "I" is an alias of
/// "J" on the hexagon.
pub fn named_state(n: usize, name: &str) -> Option<BipartiteState> {
    if name == "J" {
        return Some(phi_j_for(n));
    }
    canonical_entangled_states(n)
        .into_iter()
        .find(|s| s.name == name)
        .map(|s| s.state)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignVariant {
    /// Signs of entries (1,3), (2,3), (3,1), (3,2).
    pub signs: [i8; 4],
    pub valid: bool,
    pub extreme: bool,
    pub symmetric: bool,
    pub printed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignResolution {
    pub variants: Vec<SignVariant>,
    pub note: String,
}

/// Tests every sign pattern of the third row/column of Φ_III for validity
/// and extremality on the hexagon.
pub fn resolve_phi_iii_signs() -> SignResolution {
    let model = build_model(6).expect("hexagon");
    debug_assert_eq!(model.parity, Parity::Even);
    let mut variants = Vec::with_capacity(16);
    for mask in 0u8..16 {
        let signs: [i8; 4] = std::array::from_fn(|b| if mask >> (3 - b) & 1 == 1 { -1 } else { 1 });
        let state = phi_iii_variant(signs.map(f64::from));
        let valid = is_valid_state(&state, &model);
        let extreme = valid && state.facet_rank(&model, 1e-9) == 8;
        variants.push(SignVariant {
            signs,
            valid,
            extreme,
            symmetric: is_symmetric(&state),
            printed: signs.map(f64::from) == PHI_III_PRINTED_SIGNS,
        });
    }
    let good: Vec<&SignVariant> = variants.iter().filter(|v| v.extreme).collect();
    let printed_ok = good.iter().any(|v| v.printed);
    let any_sym = good.iter().any(|v| v.symmetric);
    let note = format!(
        "Phi_III: {} of 16 sign variants are valid extreme states (printed variant {}); \
         symmetric valid variant {}; the printed matrix is used",
        good.len(),
        if printed_ok { "included" } else { "NOT included" },
        if any_sym { "exists" } else { "does not exist, so Phi_III is asymmetric" },
    );
    SignResolution { variants, note }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_membership() {
        let names = |n| {
            canonical_entangled_states(n)
                .into_iter()
                .map(|s| s.name)
                .collect::<Vec<_>>()
        };
        assert_eq!(names(5), vec!["J", "H"]);
        assert_eq!(names(6), vec!["I", "II", "III", "IV", "V", "VI"]);
        assert_eq!(names(4), vec!["J"]);
        assert_eq!(names(9), vec!["J"]);
    }

    #[test]
    fn square_phi_j_is_quarter_turn_rotation() {
        let s = 0.5f64.sqrt();
        let want = BipartiteState::from_rows([[s, s, 0.0], [-s, s, 0.0], [0.0, 0.0, 1.0]]);
        assert!(phi_j_for(4).max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn library_states_are_valid_and_extreme() {
        for n in 4..=6 {
            let model = build_model(n).unwrap();
            for s in canonical_entangled_states(n) {
                assert!(is_valid_state(&s.state, &model), "n={n} {}", s.name);
                assert_eq!(s.state.facet_rank(&model, 1e-9), 8, "n={n} {}", s.name);
            }
        }
    }

    #[test]
    fn phi_iii_resolution_keeps_printed_variant() {
        let res = resolve_phi_iii_signs();
        let extreme: Vec<_> = res.variants.iter().filter(|v| v.extreme).collect();
        assert_eq!(extreme.len(), 2);
        assert!(extreme.iter().any(|v| v.printed));
        assert!(extreme.iter().all(|v| !v.symmetric));
        assert!(res.note.contains("asymmetric"));
    }
}
