//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::composite::{is_inner_product_state, is_symmetric, is_valid_state_with, product_indices, state_from_json, BipartiteState};
use crate::enumerate::{classify_entangled, enumerate_extreme_states, EntanglementClass, Enumeration, VertexKind};
use crate::error::Error;
use crate::golden::{parse_tuple, Check, Golden};
use crate::library::{hexagon_library, named_state, phi_j, resolve_phi_iii_signs};
use crate::mixture::{
    bisect_chsh_threshold, bisect_witness_threshold, hardy_mixed_even, hardy_mixed_pentagon, noise_thresholds,
    witness_entanglement,
};
use crate::nonlocality::{behaviour_for, chsh_max, chsh_value, hardy_check, hardy_scan, quantum_reference_constants, MeasurementTuple};
use crate::polygon::{build_model, Parity, PolygonModel};
use crate::report::{csv_float, csv_line, snapped_entries, to_json};
use crate::symmetry::{binomial, state_orbit, Representative, SymmetryGroup, SUBSET_SIZE};
use crate::Tolerances;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "POLYGON_GPT_WORKERS";

#[derive(Debug, Clone, Parser)]
#[command(name = "polygon-gpt", version, about = "Entanglement and nonlocality in regular-polygon probabilistic theories")]
pub struct RunConfig {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Output format (fig5 defaults to csv, everything else to json).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Compare results with the golden table; exit 2 on mismatch.
    #[arg(long, global = true)]
    pub check: bool,
    /// Golden table overriding the embedded one.
    #[arg(long, global = true, value_name = "PATH")]
    pub golden: Option<PathBuf>,
    /// Worker threads for parallel scans.
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// Validity / positivity tolerance.
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Relative pivot tolerance for facet systems.
    #[arg(long = "rank-tol", global = true)]
    pub rank_tol: Option<f64>,
    /// Zero-constraint tolerance for Hardy checks.
    #[arg(long = "hardy-tol", global = true)]
    pub hardy_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepresentativeArg {
    Min,
    Max,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// States, effects and transformations of the n-gon.
    Model(NArg),
    /// Burnside orbit count and fixed-point table.
    Orbits(NArg),
    /// Extreme states of the bipartite composition and their classes.
    Enumerate(EnumerateArgs),
    /// Validity, extremality and class of a single state.
    Classify(StateArgs),
    /// Exhaustive Hardy scan (or a single tuple with --tuple).
    Hardy(HardyArgs),
    /// Maximal CHSH value over extremal measurements.
    Chsh(StateArgs),
    /// Entanglement and CHSH thresholds of noisy maximally entangled states.
    Werner(NArg),
    /// Hardy witness of an entangled state mixed with product noise.
    HardyMixed(MixedArgs),
    /// Maximal Hardy success of the maximally entangled even-gon states.
    Fig5(Fig5Args),
}

#[derive(Debug, Clone, Args)]
pub struct NArg {
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    /// Orbit representative convention.
    #[arg(long, value_enum, default_value_t = RepresentativeArg::Min)]
    pub representative: RepresentativeArg,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long)]
    pub n: usize,
    /// Library name (J, H, I..VI) or a 9-element row-major JSON array.
    #[arg(long, default_value = "J")]
    pub state: String,
}

#[derive(Debug, Clone, Args)]
pub struct HardyArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Evaluate one tuple, e.g. "1+,5+,1+,2-" (M1,M2,N1,N2).
    #[arg(long)]
    pub tuple: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct MixedArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub epsilon: f64,
    /// Product noise "i,j" (pentagon only).
    #[arg(long)]
    pub product: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct Fig5Args {
    #[arg(long = "min-n", default_value_t = 4)]
    pub min_n: usize,
    #[arg(long = "max-n", default_value_t = 20)]
    pub max_n: usize,
}

/// Failure classes mapped to exit codes 1 and 2.
#[derive(Debug)]
enum Failure {
    Invalid(String),
    Inconsistent(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InternalInconsistency(_) => Failure::Inconsistent(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Inconsistent(format!("serialization: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

struct Output {
    text: String,
    checks: Vec<Check>,
}

struct Context {
    tol: Tolerances,
    format: Option<Format>,
    check: bool,
    golden: Option<Golden>,
}

impl Context {
    fn golden(&self) -> Option<&Golden> {
        self.golden.as_ref().filter(|_| self.check)
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

/// Parses arguments, runs the command and writes the report.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return 0;
                }
                _ => 1,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    run_config(&config, out, err)
}

/// Runs an already parsed configuration.
pub fn run_config(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = prepare(config).and_then(|ctx| match config.global.workers {
        Some(0) => Err(Failure::Invalid("worker count must be at least 1".into())),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Failure::Inconsistent(format!("thread pool: {e}")))?
            .install(|| dispatch(&config.command, &ctx)),
        None => dispatch(&config.command, &ctx),
    });
    match result {
        Ok(output) => {
            let _ = writeln!(out, "{}", output.text.trim_end());
            let failed: Vec<&Check> = output.checks.iter().filter(|c| !c.passed).collect();
            if config.global.check {
                for c in &output.checks {
                    let tag = if c.passed { "ok" } else { "FAIL" };
                    let _ = writeln!(err, "check {tag}: {} ({})", c.name, c.detail);
                }
            }
            if failed.is_empty() {
                0
            } else {
                let _ = writeln!(err, "error: {} golden check(s) failed", failed.len());
                2
            }
        }
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Inconsistent(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn prepare(config: &RunConfig) -> CliResult<Context> {
    let g = &config.global;
    let mut tol = Tolerances::default();
    for (slot, value, name) in [
        (&mut tol.tau, g.tau, "tau"),
        (&mut tol.rank, g.rank_tol, "rank-tol"),
        (&mut tol.hardy, g.hardy_tol, "hardy-tol"),
    ] {
        if let Some(v) = value {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(Failure::Invalid(format!("{name} must lie in (0,1), got {v}")));
            }
            *slot = v;
        }
    }
    let golden = match (&g.golden, g.check) {
        (Some(path), _) => Some(Golden::load(path)?),
        (None, true) => Some(Golden::embedded()),
        (None, false) => None,
    };
    Ok(Context {
        tol,
        format: g.format,
        check: g.check,
        golden,
    })
}

fn dispatch(command: &Command, ctx: &Context) -> CliResult<Output> {
    match command {
        Command::Model(a) => cmd_model(a.n, ctx),
        Command::Orbits(a) => cmd_orbits(a.n, ctx),
        Command::Enumerate(a) => cmd_enumerate(a, ctx),
        Command::Classify(a) => cmd_classify(a, ctx),
        Command::Hardy(a) => cmd_hardy(a, ctx),
        Command::Chsh(a) => cmd_chsh(a, ctx),
        Command::Werner(a) => cmd_werner(a.n, ctx),
        Command::HardyMixed(a) => cmd_hardy_mixed(a, ctx),
        Command::Fig5(a) => cmd_fig5(a, ctx),
    }
}

fn json_only(ctx: &Context, command: &str) -> CliResult<()> {
    match ctx.format(Format::Json) {
        Format::Json => Ok(()),
        Format::Csv => Err(Failure::Invalid(format!("{command} has no csv output"))),
    }
}

fn json_output<T: Serialize>(value: &T, checks: Vec<Check>) -> CliResult<Output> {
    Ok(Output {
        text: to_json(value)?,
        checks,
    })
}

fn parse_state(model: &PolygonModel, text: &str, ctx: &Context) -> CliResult<(String, BipartiteState)> {
    let t = text.trim();
    let (label, state) = if t.starts_with('[') {
        let s = state_from_json(t).map_err(|e| Failure::Invalid(format!("malformed state: {e}")))?;
        ("custom".to_string(), s)
    } else {
        let s = named_state(model.n, t)
            .ok_or_else(|| Failure::Invalid(format!("no library state '{t}' for n = {}", model.n)))?;
        (t.to_string(), s)
    };
    if !is_valid_state_with(&state, model, ctx.tol.tau) {
        return Err(Failure::Invalid(format!("state '{label}' is not a valid bipartite state")));
    }
    Ok((label, state))
}

fn cmd_model(n: usize, ctx: &Context) -> CliResult<Output> {
    json_only(ctx, "model")?;
    let m = build_model(n)?;
    let graph = match m.orthogonality_graph() {
        Ok(g) => Some(
            g.nodes
                .iter()
                .map(|&v| (v.to_string(), g.neighbors(v).iter().map(|w| w.to_string()).collect::<Vec<_>>()))
                .collect::<Vec<_>>(),
        ),
        Err(_) => None,
    };
    let min_value = m
        .ray_effects
        .iter()
        .chain(&m.complements)
        .flat_map(|e| m.states.iter().map(move |s| e.dot(s)))
        .fold(f64::INFINITY, f64::min);
    let mut checks = Vec::new();
    if ctx.check {
        checks.push(Check::holds("effects are nonnegative on states", min_value >= -ctx.tol.tau, format!("min {min_value:e}")));
    }
    let report = json!({
        "n": m.n,
        "parity": m.parity,
        "r_n": m.r_n,
        "states": m.states,
        "ray_effects": m.ray_effects,
        "complements": m.complements,
        "complements_are_ray_extremal": m.complements_are_ray_extremal(),
        "effect_sum_coefficient": m.effect_sum_coefficient(),
        "transformations": m.transformations().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "orthogonality_graph": graph,
    });
    json_output(&report, checks)
}

fn cmd_orbits(n: usize, ctx: &Context) -> CliResult<Output> {
    json_only(ctx, "orbits")?;
    let m = build_model(n)?;
    let group = SymmetryGroup::new(&m)?;
    let count = group.burnside_orbit_count()?;
    let table = group.fixed_point_table(&m)?;
    let subsets = binomial((n * n) as u64, SUBSET_SIZE as u64);
    let mut checks = Vec::new();
    if let Some(g) = ctx.golden() {
        if let Some(&want) = g.orbit_counts.get(&n) {
            checks.push(Check::exact(format!("orbit count n={n}"), count, want));
        }
        if let Some(&want) = g.subset_counts.get(&n) {
            checks.push(Check::exact(format!("subset count n={n}"), subsets, want));
        }
        if let Some(&want) = g.group_orders.get(&n) {
            checks.push(Check::exact(format!("group order n={n}"), group.order(), want));
        }
        if g.fixed_point_grid.n == n {
            checks.push(Check::exact("fixed-point grid", table.clone(), g.fixed_point_grid.rows.clone()));
            let sum: u64 = table.iter().flatten().sum();
            checks.push(Check::exact("fixed-point grid sum", sum, g.fixed_point_grid.sum));
        }
    }
    let report = json!({
        "n": n,
        "group_order": group.order(),
        "subset_count": subsets,
        "orbit_count": count,
        "fixed_point_table": table,
    });
    json_output(&report, checks)
}

#[derive(Serialize)]
struct ClassReport {
    id: usize,
    size: usize,
    name: Option<String>,
    has_symmetric_member: bool,
    swap_related_to: Option<usize>,
    representative: [f64; 9],
}

impl From<&EntanglementClass> for ClassReport {
    fn from(c: &EntanglementClass) -> Self {
        ClassReport {
            id: c.id,
            size: c.size,
            name: c.matched_name.clone(),
            has_symmetric_member: c.symmetric,
            swap_related_to: c.swap_related_to,
            representative: snapped_entries(&c.representative),
        }
    }
}

fn enumerate_and_classify(m: &PolygonModel, choice: Representative, ctx: &Context) -> CliResult<(Enumeration, Vec<EntanglementClass>)> {
    let e = enumerate_extreme_states(m, choice, &ctx.tol)?;
    let classes = classify_entangled(m, &e)?;
    Ok((e, classes))
}

fn enumeration_checks(n: usize, e: &Enumeration, classes: &[EntanglementClass], g: &Golden) -> Vec<Check> {
    let mut checks = Vec::new();
    let Some(want) = g.enumeration.get(&n) else {
        return checks;
    };
    if let Some(t) = want.total {
        checks.push(Check::exact(format!("total vertices n={n}"), e.total(), t));
    }
    checks.push(Check::exact(format!("product vertices n={n}"), e.product_count(), want.product));
    if let Some(t) = want.entangled {
        checks.push(Check::exact(format!("entangled vertices n={n}"), e.entangled_count(), t));
    }
    let sizes: Vec<usize> = classes.iter().map(|c| c.size).collect();
    if let Some(s) = &want.class_sizes {
        checks.push(Check::exact(format!("class sizes n={n}"), sizes.clone(), s.clone()));
    }
    if let Some(k) = want.class_count {
        checks.push(Check::exact(format!("class count n={n}"), classes.len(), k));
    }
    let mut names: Vec<String> = classes.iter().filter_map(|c| c.matched_name.clone()).collect();
    names.sort();
    let mut want_names = want.class_names.clone();
    want_names.sort();
    checks.push(Check::exact(format!("one class per library state n={n}"), names, want_names));
    if n == 6 {
        let lib = hexagon_library();
        for (names, expect) in [(&want.symmetric, true), (&want.asymmetric, false)] {
            for name in names {
                let sym = lib.iter().find(|s| s.name == name.as_str()).map(|s| is_symmetric(&s.state));
                checks.push(Check::exact(format!("Phi_{name} symmetric"), sym, Some(expect)));
            }
        }
    }
    checks
}

fn cmd_enumerate(a: &EnumerateArgs, ctx: &Context) -> CliResult<Output> {
    let m = build_model(a.n)?;
    let choice = match a.representative {
        RepresentativeArg::Min => Representative::Min,
        RepresentativeArg::Max => Representative::Max,
    };
    let (e, classes) = enumerate_and_classify(&m, choice, ctx)?;
    let checks = ctx.golden().map(|g| enumeration_checks(a.n, &e, &classes, g)).unwrap_or_default();
    match ctx.format(Format::Json) {
        Format::Csv => {
            let class_of = |s: &BipartiteState| classes.iter().find(|c| c.members.contains(s)).map(|c| c.id);
            let mut lines = vec![csv_line(
                ["index", "kind", "alice", "bob", "class"]
                    .into_iter()
                    .map(String::from)
                    .chain((1..=3).flat_map(|r| (1..=3).map(move |c| format!("phi{r}{c}")))),
            )];
            for (i, v) in e.vertices.iter().enumerate() {
                let (kind, alice, bob, class) = match v.kind {
                    VertexKind::Product { alice, bob } => ("product", alice.to_string(), bob.to_string(), String::new()),
                    VertexKind::Entangled => (
                        "entangled",
                        String::new(),
                        String::new(),
                        class_of(&v.state).map(|c| c.to_string()).unwrap_or_default(),
                    ),
                };
                lines.push(csv_line(
                    [i.to_string(), kind.into(), alice, bob, class]
                        .into_iter()
                        .chain(snapped_entries(&v.state).iter().map(|&x| csv_float(x))),
                ));
            }
            Ok(Output {
                text: lines.join("\n"),
                checks,
            })
        }
        Format::Json => {
            let notes: Vec<String> = if a.n == 6 { vec![resolve_phi_iii_signs().note] } else { Vec::new() };
            let report = json!({
                "n": a.n,
                "total_vertices": e.total(),
                "product_count": e.product_count(),
                "entangled_count": e.entangled_count(),
                "stats": e.stats,
                "classes": classes.iter().map(ClassReport::from).collect::<Vec<_>>(),
                "notes": notes,
            });
            json_output(&report, checks)
        }
    }
}

fn cmd_classify(a: &StateArgs, ctx: &Context) -> CliResult<Output> {
    json_only(ctx, "classify")?;
    let m = build_model(a.n)?;
    let (label, state) = parse_state(&m, &a.state, ctx)?;
    let rank = state.facet_rank(&m, 1e-7);
    let extreme = rank == 8;
    let product = product_indices(&state, &m);
    let mut class = serde_json::Value::Null;
    if extreme && product.is_none() {
        let (_, classes) = enumerate_and_classify(&m, Representative::Min, ctx)?;
        let orbit = state_orbit(&state, &m);
        let hit = classes
            .iter()
            .find(|c| c.members.iter().any(|x| x.max_abs_diff(&state) <= 1e-6))
            .ok_or_else(|| Failure::Inconsistent("extreme entangled state not found among enumerated vertices".into()))?;
        class = json!({
            "id": hit.id,
            "name": hit.matched_name,
            "size": hit.size,
            "orbit_size": orbit.len(),
            "symmetric_member": hit.symmetric,
        });
    }
    let report = json!({
        "n": a.n,
        "state": label,
        "matrix": snapped_entries(&state),
        "valid": true,
        "facet_rank": rank,
        "extreme": extreme,
        "product": product,
        "symmetric": is_symmetric(&state),
        "inner_product_state": is_inner_product_state(&state),
        "entanglement_witnessed": witness_entanglement(&state, &m),
        "class": class,
    });
    json_output(&report, Vec::new())
}

fn tuple_from_arg(text: &str) -> CliResult<MeasurementTuple> {
    let parts: Vec<&str> = text.split(',').collect();
    Ok(parse_tuple(&parts)?)
}

fn check_tuple_range(m: &PolygonModel, t: &MeasurementTuple) -> CliResult<()> {
    let ok = t.alice.iter().chain(&t.bob).all(|l| (1..=m.n).contains(&l.effect));
    if ok {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("effect index outside 1..{}", m.n)))
    }
}

fn hardy_checks(m: &PolygonModel, label: &str, state: &BipartiteState, success: Option<f64>, g: &Golden) -> CliResult<Vec<Check>> {
    let n = m.n;
    let tol = g.tolerances;
    let mut checks = Vec::new();
    if label == "J" {
        if let Some(&want) = g.hardy_even.get(&n) {
            checks.push(Check::close(format!("Hardy success Phi_J n={n}"), success.unwrap_or(f64::NAN), want, tol.scan));
        }
        if g.hardy_odd_none.contains(&n) {
            checks.push(Check::exact(format!("no Hardy witness Phi_J n={n}"), success, None));
        }
    }
    if n == 5 && label == "H" {
        let p = &g.pentagon;
        checks.push(Check::close("pentagon scan maximum", success.unwrap_or(f64::NAN), p.success, tol.probability));
        for (tuple, table, want, name) in [
            (&p.tuple, &p.behaviour, p.success, "pentagon behaviour"),
            (&p.primed_tuple, &p.primed_behaviour, p.primed_success, "primed pentagon behaviour"),
        ] {
            let b = behaviour_for(state, m, &parse_tuple(tuple)?);
            let diff = b.table.iter().flatten().zip(table.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            checks.push(Check::holds(name, diff <= tol.probability, format!("max deviation {diff:e}")));
            let s = hardy_check(&b, 1e-9);
            checks.push(Check::close(format!("{name} success"), s.unwrap_or(f64::NAN), want, tol.probability));
        }
    }
    if n == 6 {
        for row in g.hexagon_table.iter().filter(|r| r.state == label) {
            let t = parse_tuple(&row.tuple)?;
            let s = hardy_check(&behaviour_for(state, m, &t), 1e-9);
            checks.push(Check::close(format!("Phi_{label} {}", t.describe(n)), s.unwrap_or(f64::NAN), row.success, tol.probability));
        }
    }
    Ok(checks)
}

fn cmd_hardy(a: &HardyArgs, ctx: &Context) -> CliResult<Output> {
    json_only(ctx, "hardy")?;
    let m = build_model(a.state.n)?;
    let (label, state) = parse_state(&m, &a.state.state, ctx)?;
    let q = quantum_reference_constants();
    if let Some(text) = &a.tuple {
        let t = tuple_from_arg(text)?;
        check_tuple_range(&m, &t)?;
        let b = behaviour_for(&state, &m, &t);
        let report = json!({
            "n": m.n,
            "state": label,
            "measurements": t.describe(m.n),
            "behaviour": b.table,
            "hardy_success": hardy_check(&b, ctx.tol.hardy),
            "residuals": b.hardy_residuals(),
            "chsh": chsh_value(&b),
            "signaling": b.signaling(),
        });
        return json_output(&report, Vec::new());
    }
    let scan = hardy_scan(&state, &m, ctx.tol.hardy);
    let checks = match ctx.golden() {
        Some(g) => hardy_checks(&m, &label, &state, scan.success(), g)?,
        None => Vec::new(),
    };
    let witness = scan.best.as_ref().map(|w| {
        let b = behaviour_for(&state, &m, &w.measurements);
        json!({
            "measurements": w.measurements.describe(m.n),
            "labels": w.measurements.to_string(),
            "success": w.success,
            "residuals": w.residuals,
            "behaviour": b.table,
        })
    });
    let report = json!({
        "n": m.n,
        "state": label,
        "success": scan.success(),
        "witness": witness,
        "tie_count": scan.ties.len(),
        "ties": scan.ties.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "max_constrained_success": scan.max_constrained_success,
        "post_quantum": scan.post_quantum,
        "hardy_quantum_max": q.hardy_quantum_max,
    });
    json_output(&report, checks)
}

fn cmd_chsh(a: &StateArgs, ctx: &Context) -> CliResult<Output> {
    json_only(ctx, "chsh")?;
    let m = build_model(a.n)?;
    let (label, state) = parse_state(&m, &a.state, ctx)?;
    let c = chsh_max(&state, &m);
    let q = quantum_reference_constants();
    let mut checks = Vec::new();
    if let (Some(g), "J") = (ctx.golden(), label.as_str()) {
        match (a.n, m.parity) {
            (4, _) => checks.push(Check::close("CHSH max Phi_J n=4", c.value, g.chsh.square_max, g.tolerances.scan)),
            (_, Parity::Odd) => checks.push(Check::holds(
                format!("CHSH Phi_J n={} within Tsirelson", a.n),
                c.value <= g.chsh.odd_bound + g.tolerances.scan,
                format!("{} vs {}", c.value, g.chsh.odd_bound),
            )),
            (_, Parity::Even) => checks.push(Check::holds(
                format!("CHSH Phi_J n={} below 4", a.n),
                c.value < 4.0 - g.tolerances.scan,
                format!("{}", c.value),
            )),
        }
    }
    let report = json!({
        "n": a.n,
        "state": label,
        "chsh_max": c.value,
        "signed_value": c.signed,
        "measurements": c.measurements.describe(a.n),
        "labels": c.measurements.to_string(),
        "local_bound_violated": c.value > 2.0 + ctx.tol.tau,
        "exceeds_tsirelson": c.value > q.tsirelson + ctx.tol.tau,
        "tsirelson": q.tsirelson,
    });
    json_output(&report, checks)
}

fn cmd_werner(n: usize, ctx: &Context) -> CliResult<Output> {
    json_only(ctx, "werner")?;
    let m = build_model(n)?;
    let b_max = chsh_max(&phi_j(&m), &m).value;
    let r = noise_thresholds(&m, b_max)?;
    let witness_scan = bisect_witness_threshold(&m);
    let chsh_scan = bisect_chsh_threshold(&m);
    let mut checks = Vec::new();
    if let Some(g) = ctx.golden() {
        let tol = g.tolerances.threshold;
        checks.push(Check::close("witness bisection matches p_E", witness_scan, r.p_e, tol));
        checks.push(Check::close("CHSH bisection matches p_NL", chsh_scan, r.p_nl, tol));
        if let Some(w) = g.werner.get(&n) {
            checks.push(Check::exact(format!("gap n={n}"), r.gap_exists, w.gap_exists));
            if let Some(pe) = w.p_e {
                checks.push(Check::close(format!("p_E n={n}"), r.p_e, pe, g.tolerances.scan));
            }
            if let Some(pnl) = w.p_nl {
                checks.push(Check::close(format!("p_NL n={n}"), r.p_nl, pnl, g.tolerances.scan));
            }
        }
    }
    let report = json!({
        "n": n,
        "b_max": r.b_max,
        "p_e": r.p_e,
        "p_nl": r.p_nl,
        "p_nl_formula": r.p_nl_formula,
        "gap_exists": r.gap_exists,
        "witness_bisection": witness_scan,
        "chsh_bisection": chsh_scan,
    });
    json_output(&report, checks)
}

fn parse_product(text: &str) -> CliResult<(usize, usize)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [i, j] => match (i.parse(), j.parse()) {
            (Ok(i), Ok(j)) => Ok((i, j)),
            _ => Err(Failure::Invalid(format!("bad product '{text}'"))),
        },
        _ => Err(Failure::Invalid(format!("product must be 'i,j', got '{text}'"))),
    }
}

fn cmd_hardy_mixed(a: &MixedArgs, ctx: &Context) -> CliResult<Output> {
    json_only(ctx, "hardy-mixed")?;
    let m = build_model(a.n)?;
    let h = match m.parity {
        Parity::Even => {
            if a.product.is_some() {
                return Err(Failure::Invalid("product noise is chosen automatically for even n".into()));
            }
            hardy_mixed_even(a.n, a.epsilon)?
        }
        Parity::Odd if a.n == 5 => {
            let p = a.product.as_deref().map(parse_product).transpose()?.unwrap_or((4, 4));
            hardy_mixed_pentagon(a.epsilon, p)?
        }
        Parity::Odd => return Err(Error::unsupported("mixed Hardy construction covers even n and the pentagon").into()),
    };
    let mut checks = Vec::new();
    if let Some(g) = ctx.golden() {
        let base = if a.n == 5 {
            Some(g.mixed_hardy.pentagon_success)
        } else {
            g.hardy_even.get(&a.n).copied().or(Some((std::f64::consts::PI / a.n as f64).sin().powi(2)))
        };
        if let Some(b) = base {
            checks.push(Check::close("mixed Hardy success", h.witness.success, a.epsilon * b, g.tolerances.probability));
        }
    }
    let report = json!({
        "n": h.n,
        "epsilon": h.epsilon,
        "product": [h.product.0, h.product.1],
        "measurements": h.witness.measurements.describe(h.n),
        "labels": h.witness.measurements.to_string(),
        "success": h.witness.success,
        "residuals": h.witness.residuals,
        "noise_cells": h.noise_cells,
    });
    json_output(&report, checks)
}

fn cmd_fig5(a: &Fig5Args, ctx: &Context) -> CliResult<Output> {
    if a.min_n > a.max_n {
        return Err(Failure::Invalid("min-n exceeds max-n".into()));
    }
    let q = quantum_reference_constants();
    let mut rows = Vec::new();
    for n in (a.min_n.max(4)..=a.max_n).filter(|n| n % 2 == 0) {
        let m = build_model(n)?;
        let s = hardy_scan(&phi_j(&m), &m, ctx.tol.hardy).success().unwrap_or(0.0);
        rows.push((n, s));
    }
    let mut checks = Vec::new();
    if let Some(g) = ctx.golden() {
        for &(n, s) in &rows {
            let want = (std::f64::consts::PI / n as f64).sin().powi(2);
            checks.push(Check::close(format!("fig5 n={n}"), s, want, g.tolerances.scan));
        }
    }
    match ctx.format(Format::Csv) {
        Format::Csv => {
            let mut lines = vec!["n,hardy_success,hardy_quantum_max".to_string()];
            lines.extend(rows.iter().map(|&(n, s)| csv_line([n.to_string(), csv_float(s), csv_float(q.hardy_quantum_max)])));
            Ok(Output {
                text: lines.join("\n"),
                checks,
            })
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|&(n, s)| json!({"n": n, "hardy_success": s, "hardy_quantum_max": q.hardy_quantum_max}))
                .collect();
            json_output(&v, checks)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("polygon-gpt").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn orbits_square() {
        let (code, out, _) = run_args(&["orbits", "--n", "4", "--check"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["orbit_count"], 283);
    }

    #[test]
    fn bad_inputs_exit_one() {
        assert_eq!(run_args(&["orbits", "--n", "3"]).0, 1);
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&["chsh", "--n", "5", "--state", "[1,2"]).0, 1);
        assert_eq!(run_args(&["chsh", "--n", "5", "--state", "Q"]).0, 1);
        assert_eq!(run_args(&["hardy-mixed", "--n", "7", "--epsilon", "0.5"]).0, 1);
        assert_eq!(run_args(&["orbits", "--n", "4", "--workers", "0"]).0, 1);
        assert_eq!(run_args(&["orbits", "--n", "4", "--tau", "-1"]).0, 1);
    }

    #[test]
    fn failing_golden_exits_two() {
        let dir = std::env::temp_dir().join(format!("pg-golden-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("golden.json");
        let text = include_str!("../golden/golden.json").replace("\"4\": 283", "\"4\": 284");
        std::fs::write(&path, text).unwrap();
        let (code, _, err) = run_args(&["orbits", "--n", "4", "--check", "--golden", path.to_str().unwrap()]);
        assert_eq!(code, 2, "{err}");
        assert!(err.contains("FAIL"));
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run_args(&["--help"]).0, 0);
    }
}
