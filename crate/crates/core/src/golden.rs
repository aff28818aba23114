//! Reference values loaded from an embedded JSON table, and comparisons of
//! live results against them.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlocality::{MeasurementLabel, MeasurementTuple};

const EMBEDDED: &str = include_str!("../golden/golden.json");

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Golden {
    pub orbit_counts: BTreeMap<usize, u64>,
    pub subset_counts: BTreeMap<usize, u64>,
    pub group_orders: BTreeMap<usize, usize>,
    pub fixed_point_grid: FixedPointGrid,
    pub enumeration: BTreeMap<usize, EnumerationGolden>,
    pub hardy_even: BTreeMap<usize, f64>,
    pub hardy_odd_none: Vec<usize>,
    pub pentagon: PentagonGolden,
    pub hexagon_table: Vec<TableRow>,
    pub chsh: ChshGolden,
    pub quantum: QuantumGolden,
    pub werner: BTreeMap<usize, WernerGolden>,
    pub mixed_hardy: MixedGolden,
    pub tolerances: GoldenTolerances,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct FixedPointGrid {
    pub n: usize,
    pub rows: Vec<Vec<u64>>,
    pub sum: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct EnumerationGolden {
    pub total: Option<usize>,
    pub product: usize,
    pub entangled: Option<usize>,
    pub class_sizes: Option<Vec<usize>>,
    pub class_count: Option<usize>,
    pub class_names: Vec<String>,
    #[serde(default)]
    pub symmetric: Vec<String>,
    #[serde(default)]
    pub asymmetric: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PentagonGolden {
    pub tuple: [String; 4],
    pub behaviour: [[f64; 4]; 4],
    pub success: f64,
    pub primed_tuple: [String; 4],
    pub primed_behaviour: [[f64; 4]; 4],
    pub primed_success: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TableRow {
    pub state: String,
    pub tuple: [String; 4],
    pub success: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ChshGolden {
    pub square_max: f64,
    pub odd_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct QuantumGolden {
    pub hardy_quantum_max: f64,
    pub tsirelson: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct WernerGolden {
    pub p_e: Option<f64>,
    pub p_nl: Option<f64>,
    pub gap_exists: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct MixedGolden {
    pub pentagon_success: f64,
    pub pentagon_products: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct GoldenTolerances {
    pub probability: f64,
    pub scan: f64,
    pub threshold: f64,
}

impl Golden {
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED).expect("embedded golden table is well formed")
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("golden table: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// `"5+"` → (5, +), `"2-"` → (2, −).
pub fn parse_label(text: &str) -> Result<MeasurementLabel> {
    let t = text.trim();
    let (num, sign) = t.split_at(t.len().saturating_sub(1));
    let effect: usize = num
        .parse()
        .map_err(|_| Error::invalid(format!("bad measurement label '{text}'")))?;
    match sign {
        "+" => Ok(MeasurementLabel::plus(effect)),
        "-" => Ok(MeasurementLabel::minus(effect)),
        _ => Err(Error::invalid(format!("bad measurement label '{text}'"))),
    }
}

pub fn parse_tuple<S: AsRef<str>>(labels: &[S]) -> Result<MeasurementTuple> {
    if labels.len() != 4 {
        return Err(Error::invalid("a measurement tuple has four labels"));
    }
    let l: Vec<MeasurementLabel> = labels.iter().map(|s| parse_label(s.as_ref())).collect::<Result<_>>()?;
    Ok(MeasurementTuple::new(l[0], l[1], l[2], l[3]))
}

/// Outcome of one golden comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn exact<T: PartialEq + std::fmt::Debug>(name: impl Into<String>, got: T, want: T) -> Self {
        Check {
            name: name.into(),
            passed: got == want,
            detail: format!("got {got:?}, expected {want:?}"),
        }
    }

    pub fn close(name: impl Into<String>, got: f64, want: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            passed: (got - want).abs() <= tol,
            detail: format!("got {got:.15}, expected {want:.15} (tol {tol:e})"),
        }
    }

    pub fn holds(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
