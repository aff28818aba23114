//! Behaviours from bipartite states and extremal dichotomic measurements,
//! exhaustive Hardy scans and CHSH maximization.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composite::BipartiteState;
use crate::linalg::Vec3;
use crate::polygon::{wrap_index, Parity, PolygonModel};
use crate::TAU;

/// Which effect of the pair {eᵢ, ēᵢ} carries the `+` outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Plus,
    Minus,
}

/// (effect index, orientation): `Plus` is {eᵢ, ēᵢ}, `Minus` is {ēᵢ, eᵢ}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MeasurementLabel {
    pub effect: usize,
    pub orientation: Orientation,
}

impl MeasurementLabel {
    pub const fn plus(effect: usize) -> Self {
        MeasurementLabel {
            effect,
            orientation: Orientation::Plus,
        }
    }

    pub const fn minus(effect: usize) -> Self {
        MeasurementLabel {
            effect,
            orientation: Orientation::Minus,
        }
    }

    /// For even n, ēᵢ = e_{i+n/2}, so {ēᵢ, eᵢ} is relabeled as
    /// {e_{i+n/2}, ē_{i+n/2}}. Odd labels are already unique.
    pub fn canonical(self, n: usize) -> Self {
        match (n % 2, self.orientation) {
            (0, Orientation::Minus) => MeasurementLabel::plus(wrap_index((self.effect + n / 2) as i64, n)),
            _ => self,
        }
    }

    /// Human-readable `{plus,minus}` with effects written e1, ~e1.
    pub fn describe(&self, n: usize) -> String {
        let i = self.effect;
        let (a, b) = if n % 2 == 0 {
            let j = wrap_index((i + n / 2) as i64, n);
            (format!("e{i}"), format!("e{j}"))
        } else {
            (format!("e{i}"), format!("~e{i}"))
        };
        match self.orientation {
            Orientation::Plus => format!("{{{a},{b}}}"),
            Orientation::Minus => format!("{{{b},{a}}}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DichotomicMeasurement {
    pub plus: Vec3,
    pub minus: Vec3,
    pub label: MeasurementLabel,
}

impl DichotomicMeasurement {
    pub fn from_label(model: &PolygonModel, label: MeasurementLabel) -> Self {
        let e = model.ray_effects[label.effect - 1];
        let ebar = model.complements[label.effect - 1];
        let (plus, minus) = match label.orientation {
            Orientation::Plus => (e, ebar),
            Orientation::Minus => (ebar, e),
        };
        DichotomicMeasurement { plus, minus, label }
    }

    fn effects(&self) -> [Vec3; 2] {
        [self.plus, self.minus]
    }
}

/// The 2n extremal dichotomic measurements: (i, +) and (i, −) for i = 1..n.
pub fn measurement_set(model: &PolygonModel) -> Vec<DichotomicMeasurement> {
    (1..=model.n)
        .flat_map(|i| [MeasurementLabel::plus(i), MeasurementLabel::minus(i)])
        .map(|l| DichotomicMeasurement::from_label(model, l))
        .collect()
}

/// Four measurements: Alice's 𝓜₁, 𝓜₂ and Bob's 𝓝₁, 𝓝₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MeasurementTuple {
    pub alice: [MeasurementLabel; 2],
    pub bob: [MeasurementLabel; 2],
}

impl MeasurementTuple {
    pub fn new(a1: MeasurementLabel, a2: MeasurementLabel, b1: MeasurementLabel, b2: MeasurementLabel) -> Self {
        MeasurementTuple {
            alice: [a1, a2],
            bob: [b1, b2],
        }
    }

    pub fn canonical(self, n: usize) -> Self {
        MeasurementTuple {
            alice: self.alice.map(|l| l.canonical(n)),
            bob: self.bob.map(|l| l.canonical(n)),
        }
    }

    pub fn describe(&self, n: usize) -> String {
        format!(
            "M1={} M2={} N1={} N2={}",
            self.alice[0].describe(n),
            self.alice[1].describe(n),
            self.bob[0].describe(n),
            self.bob[1].describe(n)
        )
    }
}

/// Outcome columns of a behaviour block.
pub const OUTCOMES: [&str; 4] = ["++", "+-", "-+", "--"];

/// p(a,b|x,y) with rows 𝓜₁𝓝₁, 𝓜₁𝓝₂, 𝓜₂𝓝₁, 𝓜₂𝓝₂ and columns
/// (+,+), (+,−), (−,+), (−,−).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Behaviour {
    pub table: [[f64; 4]; 4],
    pub measurements: MeasurementTuple,
}

impl Behaviour {
    /// `x, y ∈ {1,2}`, `a, b ∈ {+1, −1}`.
    pub fn p(&self, a: i8, b: i8, x: usize, y: usize) -> f64 {
        let row = 2 * (x - 1) + (y - 1);
        let col = 2 * usize::from(a < 0) + usize::from(b < 0);
        self.table[row][col]
    }

    /// ⟨𝓜ₓ𝓝ᵧ⟩ = Σ ab·p(a,b|x,y).
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let r = &self.table[2 * (x - 1) + (y - 1)];
        r[0] - r[1] - r[2] + r[3]
    }

    /// Largest deviation from normalization of any block.
    pub fn normalization_error(&self) -> f64 {
        self.table
            .iter()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest dependence of a marginal on the other party's input.
    pub fn signaling(&self) -> f64 {
        let t = &self.table;
        let alice = |row: usize| t[row][0] + t[row][1];
        let bob = |row: usize| t[row][0] + t[row][2];
        [
            (alice(0) - alice(1)).abs(),
            (alice(2) - alice(3)).abs(),
            (bob(0) - bob(2)).abs(),
            (bob(1) - bob(3)).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.table.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// The three Hardy zero cells: p(+,+|𝓜₁𝓝₂), p(+,+|𝓜₂𝓝₁), p(−,−|𝓜₂𝓝₂).
    pub fn hardy_residuals(&self) -> [f64; 3] {
        [self.table[1][0], self.table[2][0], self.table[3][3]]
    }
}

/// Behaviour of a state under two measurements per side.
pub fn behaviour(
    state: &BipartiteState,
    a1: &DichotomicMeasurement,
    a2: &DichotomicMeasurement,
    b1: &DichotomicMeasurement,
    b2: &DichotomicMeasurement,
) -> Behaviour {
    let mut table = [[0.0; 4]; 4];
    for (x, ma) in [a1, a2].into_iter().enumerate() {
        for (y, nb) in [b1, b2].into_iter().enumerate() {
            for (ia, ea) in ma.effects().iter().enumerate() {
                for (ib, fb) in nb.effects().iter().enumerate() {
                    table[2 * x + y][2 * ia + ib] = state.0.bilinear(ea, fb);
                }
            }
        }
    }
    Behaviour {
        table,
        measurements: MeasurementTuple::new(a1.label, a2.label, b1.label, b2.label),
    }
}

/// Behaviour for a labeled tuple on a given model.
pub fn behaviour_for(state: &BipartiteState, model: &PolygonModel, t: &MeasurementTuple) -> Behaviour {
    let m = |l| DichotomicMeasurement::from_label(model, l);
    behaviour(state, &m(t.alice[0]), &m(t.alice[1]), &m(t.bob[0]), &m(t.bob[1]))
}

/// Success probability p(+,+|𝓜₁𝓝₁) when the three zero cells vanish within
/// `tol` and the success exceeds `tol`.
pub fn hardy_check(b: &Behaviour, tol: f64) -> Option<f64> {
    let [z1, z2, z3] = b.hardy_residuals();
    let success = b.table[0][0];
    (z1 <= tol && z2 <= tol && z3 <= tol && success > tol).then_some(success)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyWitness {
    pub measurements: MeasurementTuple,
    pub success: f64,
    pub residuals: [f64; 3],
}

impl HardyWitness {
    pub fn from_behaviour(b: &Behaviour) -> Self {
        HardyWitness {
            measurements: b.measurements,
            success: b.table[0][0],
            residuals: b.hardy_residuals(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyScan {
    /// Best witness; `None` when no tuple satisfies the Hardy conditions.
    pub best: Option<HardyWitness>,
    /// All canonical tuples within 1e-9 of the best success, sorted.
    pub ties: Vec<MeasurementTuple>,
    /// Largest p(+,+|𝓜₁𝓝₁) over tuples meeting the three zero constraints,
    /// whether or not it is positive.
    pub max_constrained_success: f64,
    pub post_quantum: bool,
}

impl HardyScan {
    pub fn success(&self) -> Option<f64> {
        self.best.as_ref().map(|w| w.success)
    }
}

/// Outcome probabilities of every measurement pair: `[pp, pm, mp, mm]`.
fn pair_table(state: &BipartiteState, ms: &[DichotomicMeasurement]) -> Vec<Vec<[f64; 4]>> {
    ms.iter()
        .map(|a| {
            ms.iter()
                .map(|b| {
                    [
                        state.0.bilinear(&a.plus, &b.plus),
                        state.0.bilinear(&a.plus, &b.minus),
                        state.0.bilinear(&a.minus, &b.plus),
                        state.0.bilinear(&a.minus, &b.minus),
                    ]
                })
                .collect()
        })
        .collect()
}

/// Exhaustive Hardy scan over all ordered 4-tuples of extremal measurements.
pub fn hardy_scan(state: &BipartiteState, model: &PolygonModel, tol: f64) -> HardyScan {
    let ms = measurement_set(model);
    let p = pair_table(state, &ms);
    let k = ms.len();

    // per-partition: (max success of witnesses, witness tuples within 1e-9
    // of it, max constrained success)
    type Partial = (f64, Vec<(usize, usize, usize, usize)>, f64);
    let merge = |mut a: Partial, b: Partial| -> Partial {
        match a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal) {
            _ if (a.0 - b.0).abs() <= TAU => {
                a.0 = a.0.max(b.0);
                a.1.extend(b.1);
            }
            Ordering::Less => {
                a.0 = b.0;
                a.1 = b.1;
            }
            _ => {}
        }
        a.2 = a.2.max(b.2);
        a
    };

    let (best, mut ties, constrained) = (0..k)
        .into_par_iter()
        .map(|a1| {
            let mut acc: Partial = (f64::NEG_INFINITY, Vec::new(), f64::NEG_INFINITY);
            for a2 in 0..k {
                for b2 in 0..k {
                    if p[a1][b2][0] > tol || p[a2][b2][3] > tol {
                        continue;
                    }
                    for b1 in 0..k {
                        if p[a2][b1][0] > tol {
                            continue;
                        }
                        let s = p[a1][b1][0];
                        acc.2 = acc.2.max(s);
                        if s > tol {
                            acc = merge(acc, (s, vec![(a1, a2, b1, b2)], f64::NEG_INFINITY));
                        }
                    }
                }
            }
            acc
        })
        .reduce(|| (f64::NEG_INFINITY, Vec::new(), f64::NEG_INFINITY), merge);

    // keep only tuples within 1e-9 of the final maximum
    ties.retain(|&(a1, _, b1, _)| best - p[a1][b1][0] <= TAU);
    let to_tuple = |(a1, a2, b1, b2): (usize, usize, usize, usize)| {
        MeasurementTuple::new(ms[a1].label, ms[a2].label, ms[b1].label, ms[b2].label)
    };
    let mut canon: Vec<MeasurementTuple> = ties.iter().map(|&t| to_tuple(t).canonical(model.n)).collect();
    canon.sort();
    canon.dedup();

    let best_witness = ties
        .iter()
        .map(|&t| to_tuple(t))
        .min_by_key(|t| t.canonical(model.n))
        .map(|t| HardyWitness::from_behaviour(&behaviour_for(state, model, &t)));
    let post_quantum = best_witness
        .as_ref()
        .is_some_and(|w| w.success > QuantumConstants::get().hardy_quantum_max);
    HardyScan {
        best: best_witness,
        ties: canon,
        max_constrained_success: if constrained.is_finite() { constrained } else { 0.0 },
        post_quantum,
    }
}

/// ⟨11⟩+⟨12⟩+⟨21⟩−⟨22⟩.
pub fn chsh_value(b: &Behaviour) -> f64 {
    b.correlator(1, 1) + b.correlator(1, 2) + b.correlator(2, 1) - b.correlator(2, 2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshMax {
    /// max |CHSH| over all ordered tuples.
    pub value: f64,
    /// Signed CHSH value at the maximizing tuple.
    pub signed: f64,
    pub measurements: MeasurementTuple,
}

/// Correlator ⟨ab⟩ for every pair of measurements.
fn correlator_table(state: &BipartiteState, ms: &[DichotomicMeasurement]) -> Vec<Vec<f64>> {
    pair_table(state, ms)
        .into_iter()
        .map(|row| row.into_iter().map(|c| c[0] - c[1] - c[2] + c[3]).collect())
        .collect()
}

/// CHSH values of every ordered tuple (a₁, a₂, b₁, b₂) in row-major order
/// over measurement_set indices.
pub fn chsh_values(state: &BipartiteState, model: &PolygonModel) -> Vec<f64> {
    let ms = measurement_set(model);
    let c = correlator_table(state, &ms);
    let k = ms.len();
    let mut out = Vec::with_capacity(k.pow(4));
    for a1 in 0..k {
        for a2 in 0..k {
            for b1 in 0..k {
                for b2 in 0..k {
                    out.push(c[a1][b1] + c[a1][b2] + c[a2][b1] - c[a2][b2]);
                }
            }
        }
    }
    out
}

/// Maximum |CHSH| over all ordered tuples of extremal measurements.
pub fn chsh_max(state: &BipartiteState, model: &PolygonModel) -> ChshMax {
    let ms = measurement_set(model);
    let c = correlator_table(state, &ms);
    let k = ms.len();
    let (value, signed, idx) = (0..k)
        .into_par_iter()
        .map(|a1| {
            let mut best = (f64::NEG_INFINITY, 0.0, (a1, 0, 0, 0));
            for a2 in 0..k {
                for b1 in 0..k {
                    for b2 in 0..k {
                        let v = c[a1][b1] + c[a1][b2] + c[a2][b1] - c[a2][b2];
                        if v.abs() > best.0 + TAU {
                            best = (v.abs(), v, (a1, a2, b1, b2));
                        }
                    }
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, 0.0, (usize::MAX, 0, 0, 0)),
            |a, b| {
                if b.0 > a.0 + TAU || ((b.0 - a.0).abs() <= TAU && b.2 < a.2) {
                    b
                } else {
                    a
                }
            },
        );
    let (a1, a2, b1, b2) = idx;
    ChshMax {
        value,
        signed,
        measurements: MeasurementTuple::new(ms[a1].label, ms[a2].label, ms[b1].label, ms[b2].label),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantumConstants {
    /// (5√5 − 11)/2.
    pub hardy_quantum_max: f64,
    /// 2√2.
    pub tsirelson: f64,
}

impl QuantumConstants {
    pub fn get() -> Self {
        QuantumConstants {
            hardy_quantum_max: (5.0 * 5f64.sqrt() - 11.0) / 2.0,
            tsirelson: 2.0 * 2f64.sqrt(),
        }
    }
}

pub fn quantum_reference_constants() -> QuantumConstants {
    QuantumConstants::get()
}

impl fmt::Display for MeasurementTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = |m: &MeasurementLabel| {
            format!(
                "{}{}",
                m.effect,
                if m.orientation == Orientation::Plus { "+" } else { "-" }
            )
        };
        write!(
            f,
            "({},{};{},{})",
            l(&self.alice[0]),
            l(&self.alice[1]),
            l(&self.bob[0]),
            l(&self.bob[1])
        )
    }
}

/// Whether the model's complements coincide with ray effects (even n), in
/// which case the measurement set lists every physical measurement twice.
pub fn has_duplicate_labels(model: &PolygonModel) -> bool {
    model.parity == Parity::Even
}
