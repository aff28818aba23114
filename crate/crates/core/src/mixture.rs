//! Noisy entangled states: Hardy witnesses under product noise and the
//! entanglement versus CHSH-nonlocality gap for maximally mixed noise.

use serde::Serialize;

use crate::composite::{product_state, BipartiteEffect, BipartiteState};
use crate::error::{Error, Result};
use crate::library::{phi_h, phi_j};
use crate::linalg::Mat3;
use crate::nonlocality::{behaviour_for, chsh_max, chsh_values, hardy_scan, HardyWitness, MeasurementLabel, MeasurementTuple};
use crate::polygon::{build_model, Parity, PolygonModel, UNIT};
use crate::TAU;

/// Bisection steps for threshold cross-checks.
pub const BISECTION_STEPS: usize = 40;

/// `weight·base + (1−weight)·noise`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoisyState {
    pub base: BipartiteState,
    pub noise: BipartiteState,
    pub weight: f64,
    pub mixed: BipartiteState,
}

impl NoisyState {
    pub fn new(base: BipartiteState, noise: BipartiteState, weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) || !weight.is_finite() {
            return Err(Error::invalid(format!("mixing weight {weight} outside [0,1]")));
        }
        Ok(NoisyState {
            mixed: base.mix(&noise, weight),
            base,
            noise,
            weight,
        })
    }
}

/// u⊗u: a single 1 at (3,3).
pub fn maximally_mixed() -> BipartiteState {
    BipartiteState(UNIT.outer(&UNIT))
}

/// pΦ_J + (1−p)u⊗u.
pub fn werner_state(model: &PolygonModel, p: f64) -> BipartiteState {
    phi_j(model).mix(&maximally_mixed(), p)
}

/// The entangled effect pair (E_ab, Ē_ab = u⊗u − E_ab).
pub fn entangled_effect(model: &PolygonModel) -> (BipartiteEffect, BipartiteEffect) {
    let n = model.n as f64;
    let e = match model.parity {
        Parity::Odd => Mat3::IDENTITY.scale(1.0 / (1.0 + model.r_n * model.r_n)),
        Parity::Even => {
            let (s, c) = (std::f64::consts::PI / n).sin_cos();
            Mat3::from_rows([[-c, -s, 0.0], [s, -c, 0.0], [0.0, 0.0, 1.0]]).scale(0.5)
        }
    };
    let bar = BipartiteEffect::unit().0 - e;
    (BipartiteEffect(e), BipartiteEffect(bar))
}

/// Sufficient entanglement test: either entangled effect is negative.
pub fn witness_entanglement(state: &BipartiteState, model: &PolygonModel) -> bool {
    let (e, bar) = entangled_effect(model);
    e.prob(state) < -TAU || bar.prob(state) < -TAU
}

fn witness_margin(state: &BipartiteState, model: &PolygonModel) -> f64 {
    let (e, bar) = entangled_effect(model);
    e.prob(state).min(bar.prob(state))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub n: usize,
    /// max CHSH of Φ_J.
    pub b_max: f64,
    /// Weight above which the entangled-effect witness fires.
    pub p_e: f64,
    /// Weight at which max CHSH of the noisy state reaches 2.
    pub p_nl: f64,
    /// 8r²/[b_max(r²+1)² + (r²−1)²] for odd n, 2/b_max for even n.
    pub p_nl_formula: f64,
    pub gap_exists: bool,
}

/// Smallest p ∈ [0,1] where some tuple of pΦ + (1−p)u⊗u reaches |CHSH| = 2.
fn chsh_crossing(model: &PolygonModel) -> Result<f64> {
    let at_one = chsh_values(&phi_j(model), model);
    let at_zero = chsh_values(&maximally_mixed(), model);
    let mut best = f64::INFINITY;
    for (&v1, &v0) in at_one.iter().zip(&at_zero) {
        if v0.abs() >= 2.0 - TAU {
            return Err(Error::inconsistent("maximally mixed state violates the local bound"));
        }
        let slope = v1 - v0;
        if slope.abs() <= f64::EPSILON {
            continue;
        }
        for target in [2.0, -2.0] {
            let p = (target - v0) / slope;
            if (0.0..=1.0 + TAU).contains(&p) {
                best = best.min(p);
            }
        }
    }
    if best.is_finite() {
        Ok(best.min(1.0))
    } else {
        Err(Error::inconsistent(format!("no CHSH violation for n = {}", model.n)))
    }
}

/// Entanglement and CHSH-nonlocality thresholds of pΦ_J + (1−p)u⊗u.
///
/// `b_max` must be the live CHSH maximum of Φ_J; p_NL is taken from the
/// exact crossing of the piecewise-linear max CHSH curve.
pub fn noise_thresholds(model: &PolygonModel, b_max: f64) -> Result<ThresholdReport> {
    if b_max.is_nan() || b_max <= 0.0 {
        return Err(Error::invalid(format!("b_max must be positive, got {b_max}")));
    }
    let live = chsh_max(&phi_j(model), model).value;
    if (live - b_max).abs() > 1e-9 {
        return Err(Error::inconsistent(format!(
            "b_max {b_max} disagrees with the computed maximum {live}"
        )));
    }
    let r2 = model.r_n * model.r_n;
    let (p_e, p_nl_formula) = match model.parity {
        Parity::Odd => (r2 / 2.0, 8.0 * r2 / (b_max * (r2 + 1.0).powi(2) + (r2 - 1.0).powi(2))),
        Parity::Even => (0.5, 2.0 / b_max),
    };
    let p_nl = chsh_crossing(model)?;
    Ok(ThresholdReport {
        n: model.n,
        b_max,
        p_e,
        p_nl,
        p_nl_formula,
        gap_exists: p_e < p_nl - TAU,
    })
}

/// Bisection for the first p where `pred` holds, assuming monotonicity.
pub fn bisect(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Direct scan: weight at which the witness trace turns negative.
pub fn bisect_witness_threshold(model: &PolygonModel) -> f64 {
    bisect(0.0, 1.0, |p| witness_margin(&werner_state(model, p), model) < 0.0)
}

/// Direct scan: weight at which max CHSH reaches 2.
pub fn bisect_chsh_threshold(model: &PolygonModel) -> f64 {
    bisect(0.0, 1.0, |p| {
        let s = werner_state(model, p);
        chsh_max(&s, model).value >= 2.0
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedHardy {
    pub n: usize,
    pub epsilon: f64,
    /// 1-based product noise ωᵢ⊗ωⱼ.
    pub product: (usize, usize),
    pub witness: HardyWitness,
    /// The four Hardy cells of the noise state alone.
    pub noise_cells: [f64; 4],
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("epsilon {epsilon} outside (0,1]")))
    }
}

fn hardy_cells(state: &BipartiteState, model: &PolygonModel, t: &MeasurementTuple) -> [f64; 4] {
    let b = behaviour_for(state, model, t);
    let [z1, z2, z3] = b.hardy_residuals();
    [b.table[0][0], z1, z2, z3]
}

fn mixed_witness(
    model: &PolygonModel,
    base: &BipartiteState,
    product: (usize, usize),
    tuple: &MeasurementTuple,
    epsilon: f64,
) -> Result<MixedHardy> {
    let noise = product_state(&model.states[product.0 - 1], &model.states[product.1 - 1]);
    let mixed = NoisyState::new(*base, noise, epsilon)?.mixed;
    let b = behaviour_for(&mixed, model, tuple);
    Ok(MixedHardy {
        n: model.n,
        epsilon,
        product,
        witness: HardyWitness::from_behaviour(&b),
        noise_cells: hardy_cells(&noise, model, tuple),
    })
}

/// Hardy witness of εΦ_J + (1−ε)ω_r⊗ω_s for even n.
///
/// The tuple is the optimal one for Φ_J; (r,s) is the first product state on
/// which all four Hardy cells vanish.
pub fn hardy_mixed_even(n: usize, epsilon: f64) -> Result<MixedHardy> {
    let model = build_model(n)?;
    if model.parity == Parity::Odd {
        return Err(Error::unsupported("mixed Hardy construction needs an even gon"));
    }
    check_epsilon(epsilon)?;
    let phi = phi_j(&model);
    let scan = hardy_scan(&phi, &model, TAU);
    for tuple in &scan.ties {
        for i in 1..=n {
            for j in 1..=n {
                let noise = product_state(&model.states[i - 1], &model.states[j - 1]);
                if hardy_cells(&noise, &model, tuple).iter().all(|c| c.abs() <= TAU) {
                    return mixed_witness(&model, &phi, (i, j), tuple, epsilon);
                }
            }
        }
    }
    Err(Error::inconsistent("no product state annihilates the Hardy cells"))
}

/// Product noise choices admitted for the pentagon.
pub const PENTAGON_PRODUCTS: [(usize, usize); 5] = [(3, 4), (3, 5), (4, 3), (4, 4), (5, 3)];

/// Measurement tuple used for each pentagon product noise.
pub fn pentagon_tuple(product: (usize, usize)) -> Result<MeasurementTuple> {
    let (e1, e5, eb2) = (MeasurementLabel::plus(1), MeasurementLabel::plus(5), MeasurementLabel::minus(2));
    match product {
        (3, 4) | (4, 3) | (4, 4) => Ok(MeasurementTuple::new(e1, eb2, e1, eb2)),
        (3, 5) => Ok(MeasurementTuple::new(e1, e5, e1, eb2)),
        (5, 3) => Ok(MeasurementTuple::new(e1, eb2, e1, e5)),
        (i, j) => Err(Error::unsupported(format!("product noise w{i}⊗w{j} is not covered"))),
    }
}

/// Hardy witness of εΦ_H + (1−ε)ωᵢ⊗ωⱼ on the pentagon.
pub fn hardy_mixed_pentagon(epsilon: f64, product: (usize, usize)) -> Result<MixedHardy> {
    let tuple = pentagon_tuple(product)?;
    check_epsilon(epsilon)?;
    let model = build_model(5)?;
    mixed_witness(&model, &phi_h(), product, &tuple, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::{is_valid_state, joint_prob};
    use crate::nonlocality::hardy_check;

    #[test]
    fn maximally_mixed_factorizes() {
        let m = build_model(5).unwrap();
        let uu = maximally_mixed();
        assert!(is_valid_state(&uu, &m));
        for e in &m.ray_effects {
            for f in &m.ray_effects {
                assert!((joint_prob(e, f, &uu) - 0.2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn entangled_effects_are_valid_and_witness() {
        for n in 4..=9 {
            let m = build_model(n).unwrap();
            let (e, bar) = entangled_effect(&m);
            assert!(e.min_on_product_states(&m) >= -TAU, "n={n}");
            assert!(bar.min_on_product_states(&m) >= -TAU, "n={n}");
            let r2 = m.r_n * m.r_n;
            if n % 2 == 1 {
                assert!((bar.prob(&maximally_mixed()) - r2 / (1.0 + r2)).abs() < 1e-12);
                assert!((bar.prob(&phi_j(&m)) - (r2 - 2.0) / (1.0 + r2)).abs() < 1e-12);
            }
            assert!(witness_entanglement(&phi_j(&m), &m));
            assert!(!witness_entanglement(&product_state(&m.states[0], &m.states[1]), &m));
        }
    }

    #[test]
    fn witness_flips_at_threshold() {
        let m = build_model(5).unwrap();
        let pe = m.r_n * m.r_n / 2.0;
        assert!(witness_entanglement(&werner_state(&m, pe + 0.01), &m));
        assert!(!witness_entanglement(&werner_state(&m, pe - 0.01), &m));
        assert!((bisect_witness_threshold(&m) - pe).abs() < 1e-9);
    }

    #[test]
    fn square_has_no_gap() {
        let m = build_model(4).unwrap();
        let r = noise_thresholds(&m, 4.0).unwrap();
        assert!((r.p_nl - 0.5).abs() < 1e-12 && (r.p_e - 0.5).abs() < 1e-12);
        assert!(!r.gap_exists);
    }

    #[test]
    fn pentagon_gap() {
        let m = build_model(5).unwrap();
        let b = chsh_max(&phi_j(&m), &m).value;
        let r = noise_thresholds(&m, b).unwrap();
        assert!((r.p_e - 0.618033988749895).abs() < 1e-9);
        assert!(r.gap_exists);
        assert!((bisect_chsh_threshold(&m) - r.p_nl).abs() < 1e-6);
    }

    #[test]
    fn threshold_errors() {
        let m = build_model(5).unwrap();
        assert!(matches!(noise_thresholds(&m, 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(noise_thresholds(&m, 3.5), Err(Error::InternalInconsistency(_))));
    }

    #[test]
    fn even_mixed_hardy() {
        for (n, eps, want) in [(4, 1.0, 0.5), (6, 0.5, 0.125), (8, 0.1, 0.1 * (std::f64::consts::PI / 8.0).sin().powi(2))] {
            let h = hardy_mixed_even(n, eps).unwrap();
            assert!((h.witness.success - want).abs() < 1e-12, "n={n}");
            assert!(h.noise_cells.iter().all(|c| c.abs() < 1e-12));
        }
        assert!(matches!(hardy_mixed_even(5, 0.5), Err(Error::Unsupported(_))));
        assert!(matches!(hardy_mixed_even(6, 0.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn pentagon_mixed_hardy() {
        let s = 1.0 - 0.4 * 5f64.sqrt();
        for p in PENTAGON_PRODUCTS {
            for eps in [0.1, 0.5, 1.0] {
                let h = hardy_mixed_pentagon(eps, p).unwrap();
                assert!(h.noise_cells.iter().all(|c| c.abs() < 1e-12), "{p:?}");
                assert!((h.witness.success - eps * s).abs() < 1e-12, "{p:?}");
                assert!(h.witness.residuals.iter().all(|r| r.abs() < 1e-12));
            }
        }
        let t = pentagon_tuple((3, 5)).unwrap();
        assert_eq!(t.alice[1], MeasurementLabel::plus(5));
        assert!(matches!(hardy_mixed_pentagon(0.5, (1, 1)), Err(Error::Unsupported(_))));
        let b = behaviour_for(&phi_h(), &build_model(5).unwrap(), &pentagon_tuple((4, 4)).unwrap());
        assert!(hardy_check(&b, 1e-9).is_some());
    }
}
