//! The `orlicz-korn` command line.
//!
//! Every subcommand writes `<command>.csv` (and sometimes extra CSV/JSON files)
//! into `--out-dir`, plus `<command>.manifest.json`. A manifest, or any JSON
//! object with a `"command"` key and flag names as keys, can be passed back
//! through `--config` to replay the run.
//!
//! Exit codes: 0 success, 1 verdict failure, 2 usage or configuration error.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::balance::{check_balance, check_balance_mode, classify_catalog_pairs, BalanceReport};
use crate::bogovskii::{self, BogovskiiConfig};
use crate::error::{Error, Result};
use crate::fields::radial::{ball_grid, radial_spike, radial_test_field, unit_ball_volume};
use crate::fields::suites::{bump_fields, smooth_fields, SUITE_SEED};
use crate::fields::{divergence, io, korn_ratio, negative_norm_lower_bound, poincare_ratio, trivial_upper_bound, Grid, GridField, Mode, Operator, SuiteSummary};
use crate::hardy::{self, DEFAULT_RANDOM_TRIALS};
use crate::laminate::{self, blowup_curve, build_laminate, first_moment_ratio, moment, realize_field, Matrix2, Realization};
use crate::young::catalog::{self, CatalogEntry, CATALOG_VERSION};
use crate::YoungFunction;

pub const THREADS_ENV: &str = "ORLICZ_KORN_THREADS";
const SPIKE_RADII: [f64; 5] = [0.2, 0.1, 0.05, 0.025, 0.0125];
const REALIZE_SAMPLES: usize = 1 << 18;

#[derive(Debug, Parser, Serialize)]
#[command(name = "orlicz-korn", version, about = "Orlicz-space Korn inequality experiments", args_override_self = true)]
#[serde(rename_all = "kebab-case")]
pub struct Cli {
    /// Directory receiving CSV, JSON and manifest files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// JSON catalog replacing the shipped one for name lookups.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    /// Seed for the generated smooth and random field suites.
    #[arg(long, global = true, default_value_t = SUITE_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    #[serde(skip)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Test both balance conditions for a pair (A, B).
    CheckBalance(CheckBalance),
    /// Classify every shipped example pair.
    ClassifyExamples(NoArgs),
    /// Hardy operator ratios over the fixed trial family.
    VerifyHardy(VerifyHardy),
    /// Korn ratios ‖∇u‖_B / ‖Eu‖_A over a field suite.
    VerifyKorn(VerifyKorn),
    /// Laminate blow-up table, optionally realized as a field.
    LaminateDemo(LaminateDemo),
    /// Bogovskii operator: divergence residuals and norm ratios.
    Bogovskii(BogovskiiCmd),
    /// Poincaré ratios ‖u − Πu‖_A / ‖Eu‖_A over a field suite.
    Poincare(PoincareCmd),
    /// Negative-norm lower bounds against the trivial upper bound.
    NegativeNorm(NegativeNormCmd),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckBalance(_) => "check-balance",
            Command::ClassifyExamples(_) => "classify-examples",
            Command::VerifyHardy(_) => "verify-hardy",
            Command::VerifyKorn(_) => "verify-korn",
            Command::LaminateDemo(_) => "laminate-demo",
            Command::Bogovskii(_) => "bogovskii",
            Command::Poincare(_) => "poincare",
            Command::NegativeNorm(_) => "negative-norm",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct NoArgs {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Holds,
    Fails,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CheckBalance {
    /// Catalog name or inline JSON function.
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: String,
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: String,
    /// Require the conditions for every t > 0 instead of near infinity.
    #[arg(long)]
    pub global: bool,
    /// Exit with 1 when the verdict differs.
    #[arg(long, value_enum)]
    pub expect: Option<Expect>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct VerifyHardy {
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: String,
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: String,
    /// Length of the interval (0, L).
    #[arg(long = "L", default_value_t = 1.0)]
    #[serde(rename = "L")]
    pub l: f64,
    #[arg(long, default_value_t = DEFAULT_RANDOM_TRIALS)]
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum KornSuite {
    Smooth,
    Random,
    Laminate,
    Radial,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct VerifyKorn {
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: String,
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: String,
    /// Cells per axis.
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, value_enum, default_value = "zero_bc")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "ED")]
    pub operator: Operator,
    #[arg(long, value_enum, default_value = "smooth")]
    pub suite: KornSuite,
    /// Fields in the suite; laminate orders 1..=count; radial spikes per half decade.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Lamination depth for the laminate suite.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct LaminateDemo {
    #[arg(long, default_value_t = 10)]
    pub m_max: usize,
    #[arg(long = "A", default_value = "L1")]
    #[serde(rename = "A")]
    pub a: String,
    /// Defaults to A.
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: Option<String>,
    /// Side of the square (0, r)².
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Realize the order m-max laminate and compare moments.
    #[arg(long)]
    pub realize: bool,
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
    /// Cells per axis of the dumped field.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BogovskiiSuite {
    Smooth,
    Spike,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BogovskiiCmd {
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: String,
    #[arg(long = "B")]
    #[serde(rename = "B")]
    pub b: String,
    #[arg(long, value_enum, default_value = "smooth")]
    pub suite: BogovskiiSuite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FieldSuite {
    Smooth,
    Random,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PoincareCmd {
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: String,
    #[arg(long, default_value_t = 12)]
    pub grid: usize,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, value_enum, default_value = "zero_bc")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "ED")]
    pub operator: Operator,
    #[arg(long, value_enum, default_value = "smooth")]
    pub suite: FieldSuite,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct NegativeNormCmd {
    #[arg(long = "A")]
    #[serde(rename = "A")]
    pub a: String,
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Smooth and random fields each.
    #[arg(long, default_value_t = 3)]
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub command: String,
    pub params: serde_json::Value,
    pub catalog_version: String,
    pub seed: u64,
    pub tool_version: String,
    /// Unix seconds; `SOURCE_DATE_EPOCH` when set.
    pub timestamp: u64,
}

/// Outcome of a subcommand before it is mapped to an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

struct Context {
    out_dir: PathBuf,
    catalog: Option<Vec<CatalogEntry>>,
    seed: u64,
}

impl Context {
    fn resolve(&self, name_or_json: &str) -> Result<(String, YoungFunction)> {
        let Some(entries) = &self.catalog else {
            return catalog::resolve(name_or_json);
        };
        if name_or_json.trim_start().starts_with('{') {
            return catalog::resolve(name_or_json);
        }
        entries
            .iter()
            .find(|e| e.name == name_or_json.trim())
            .map(|e| (e.name.clone(), e.function.clone()))
            .ok_or_else(|| Error::UnknownFunction {
                name: name_or_json.to_string(),
                available: entries.iter().map(|e| e.name.as_str()).collect::<Vec<_>>().join(", "),
            })
    }

    fn path(&self, file: &str) -> PathBuf {
        self.out_dir.join(file)
    }

    fn write_csv<T: Serialize>(&self, file: &str, rows: &[T]) -> Result<PathBuf> {
        let path = self.path(file);
        let mut w = csv::Writer::from_path(&path)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(path)
    }

    fn write_json<T: Serialize>(&self, file: &str, value: &T) -> Result<PathBuf> {
        let path = self.path(file);
        serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), value)?;
        Ok(path)
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(Verdict::Pass) => 0,
        Ok(Verdict::Fail) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn configure_threads() {
    let Ok(v) = std::env::var(THREADS_ENV) else { return };
    match v.trim().parse::<usize>() {
        // a second call in the same process keeps the first pool
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("warning: ignoring {THREADS_ENV}={v}"),
    }
}

/// Replaces `--config <file>` by the flags it holds.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(i) = argv.iter().position(|a| a == "--config" || a.to_string_lossy().starts_with("--config=")) else {
        return Ok(argv);
    };
    let mut rest = argv.clone();
    let flag = rest.remove(i).to_string_lossy().into_owned();
    let path = match flag.strip_prefix("--config=") {
        Some(p) => PathBuf::from(p),
        None if i < rest.len() => PathBuf::from(rest.remove(i)),
        None => return Err(Error::Config("--config needs a file".into())),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut out = vec![rest.first().cloned().unwrap_or_else(|| "orlicz-korn".into())];
    out.extend(config_args(&value)?.into_iter().map(OsString::from));
    out.extend(rest.into_iter().skip(1));
    Ok(out)
}

/// Converts a config object (or a manifest) to argv after the program name.
pub fn config_args(value: &serde_json::Value) -> Result<Vec<String>> {
    let obj = value.as_object().ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
    let command = obj
        .get("command")
        .and_then(|c| c.as_str())
        .ok_or_else(|| Error::Config("config needs a \"command\" string".into()))?;
    let flags = match obj.get("params") {
        Some(p) => p.as_object().ok_or_else(|| Error::Config("\"params\" must be an object".into()))?,
        None => obj,
    };
    let mut args = vec![command.to_string()];
    for (key, v) in flags {
        if key == "command" {
            continue;
        }
        match v {
            serde_json::Value::Null | serde_json::Value::Bool(false) => {}
            serde_json::Value::Bool(true) => args.push(format!("--{key}")),
            serde_json::Value::String(s) => args.extend([format!("--{key}"), s.clone()]),
            serde_json::Value::Number(n) => args.extend([format!("--{key}"), n.to_string()]),
            other => return Err(Error::Config(format!("unsupported value for {key}: {other}"))),
        }
    }
    Ok(args)
}

fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub fn execute(cli: &Cli) -> Result<Verdict> {
    std::fs::create_dir_all(&cli.out_dir)?;
    let catalog = match &cli.catalog {
        Some(p) => Some(catalog::load_catalog(&std::fs::read_to_string(p)?)?),
        None => None,
    };
    let ctx = Context { out_dir: cli.out_dir.clone(), catalog, seed: cli.seed };
    let (verdict, seed) = match &cli.command {
        Command::CheckBalance(c) => (check_balance_cmd(&ctx, c)?, ctx.seed),
        Command::ClassifyExamples(_) => (classify_cmd(&ctx)?, ctx.seed),
        Command::VerifyHardy(c) => (verify_hardy_cmd(&ctx, c)?, hardy::SEED),
        Command::VerifyKorn(c) => (verify_korn_cmd(&ctx, c)?, ctx.seed),
        Command::LaminateDemo(c) => (laminate_cmd(&ctx, c)?, laminate::QUADRATURE_SEED),
        Command::Bogovskii(c) => (bogovskii_cmd(&ctx, c)?, ctx.seed),
        Command::Poincare(c) => (poincare_cmd(&ctx, c)?, ctx.seed),
        Command::NegativeNorm(c) => (negative_norm_cmd(&ctx, c)?, ctx.seed),
    };
    let mut params = serde_json::to_value(cli)?;
    if let (Some(p), serde_json::Value::Object(sub)) = (params.as_object_mut(), serde_json::to_value(&cli.command)?) {
        p.extend(sub);
    }
    let manifest = ExperimentManifest {
        command: cli.command.name().to_string(),
        params,
        catalog_version: if cli.catalog.is_some() { "custom".into() } else { CATALOG_VERSION.into() },
        seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: timestamp(),
    };
    let path = ctx.write_json(&format!("{}.manifest.json", cli.command.name()), &manifest)?;
    println!("manifest: {}", path.display());
    Ok(verdict)
}

fn report(path: &Path) {
    println!("wrote {}", path.display());
}

#[derive(Serialize)]
struct BalanceRow<'a> {
    #[serde(rename = "name_A")]
    name_a: &'a str,
    #[serde(rename = "name_B")]
    name_b: &'a str,
    cond11: bool,
    cond12: bool,
    c: f64,
    t0: f64,
    c11: f64,
    t0_11: f64,
    c12: f64,
    t0_12: f64,
    holds: bool,
    label: &'a str,
}

impl<'a> BalanceRow<'a> {
    fn new(name_a: &'a str, name_b: &'a str, r: &BalanceReport) -> Self {
        Self {
            name_a,
            name_b,
            cond11: r.cond_1_1.holds,
            cond12: r.cond_1_2.holds,
            c: r.witness_c,
            t0: r.threshold_t0,
            c11: r.cond_1_1.witness_constant,
            t0_11: r.cond_1_1.threshold_t0.value(),
            c12: r.cond_1_2.witness_constant,
            t0_12: r.cond_1_2.threshold_t0.value(),
            holds: r.holds(),
            label: "",
        }
    }
}

fn check_balance_cmd(ctx: &Context, c: &CheckBalance) -> Result<Verdict> {
    let (na, a) = ctx.resolve(&c.a)?;
    let (nb, b) = ctx.resolve(&c.b)?;
    let r = check_balance_mode(&a, &b, c.global);
    report(&ctx.write_csv("check-balance.csv", &[BalanceRow::new(&na, &nb, &r)])?);
    report(&ctx.write_json("check-balance.json", &r)?);
    println!(
        "{na} / {nb}: first condition {}, second condition {}, c = {}, t0 = {}",
        holds_word(r.cond_1_1.holds),
        holds_word(r.cond_1_2.holds),
        r.witness_c,
        r.threshold_t0
    );
    Ok(match c.expect {
        Some(Expect::Holds) if !r.holds() => Verdict::Fail,
        Some(Expect::Fails) if r.holds() => Verdict::Fail,
        _ => Verdict::Pass,
    })
}

fn holds_word(h: bool) -> &'static str {
    if h {
        "holds"
    } else {
        "fails"
    }
}

fn classify_cmd(ctx: &Context) -> Result<Verdict> {
    let pairs = classify_catalog_pairs();
    let rows: Vec<BalanceRow> = pairs.iter().map(|(p, r)| BalanceRow { label: p.label, ..BalanceRow::new(p.a, p.b, r) }).collect();
    report(&ctx.write_csv("classify-examples.csv", &rows)?);
    for (p, r) in &pairs {
        println!("{:<58} {:<6} c = {:<10.4} t0 = {}", p.label, holds_word(r.holds()), r.witness_c, r.threshold_t0);
    }
    Ok(if pairs.iter().all(|(_, r)| r.holds()) { Verdict::Pass } else { Verdict::Fail })
}

#[derive(Serialize)]
struct HardyRow<'a> {
    kind: &'static str,
    label: &'a str,
    delta: Option<f64>,
    ratio_avg: f64,
    ratio_dual: f64,
    witness_c: f64,
}

#[derive(Serialize)]
struct HardySummary<'a> {
    name_a: &'a str,
    name_b: &'a str,
    worst_avg: f64,
    worst_avg_label: &'a str,
    worst_dual: f64,
    worst_dual_label: &'a str,
    refined_avg: f64,
    refined_dual: f64,
    stable: bool,
    growth_avg: f64,
    growth_dual: f64,
    balance_holds: bool,
    bounded: bool,
    balance: &'a BalanceReport,
}

fn verify_hardy_cmd(ctx: &Context, c: &VerifyHardy) -> Result<Verdict> {
    let (na, a) = ctx.resolve(&c.a)?;
    let (nb, b) = ctx.resolve(&c.b)?;
    if !(c.l > 0.0 && c.l.is_finite()) {
        return Err(Error::Config(format!("--L must be positive, got {}", c.l)));
    }
    let balance = check_balance(&a, &b);
    let r = hardy::verify_with_balance(&a, &b, c.l, c.trials, &balance);
    let mut rows: Vec<HardyRow> = r
        .ratios
        .iter()
        .map(|(label, avg, dual)| HardyRow { kind: "trial", label, delta: None, ratio_avg: *avg, ratio_dual: *dual, witness_c: balance.witness_c })
        .collect();
    rows.extend(r.sweep.iter().map(|s| HardyRow {
        kind: "sweep",
        label: "spike",
        delta: Some(s.delta),
        ratio_avg: s.ratio_avg,
        ratio_dual: s.ratio_dual,
        witness_c: balance.witness_c,
    }));
    report(&ctx.write_csv("verify-hardy.csv", &rows)?);
    let summary = HardySummary {
        name_a: &na,
        name_b: &nb,
        worst_avg: r.worst_avg.ratio_avg,
        worst_avg_label: &r.worst_avg.label,
        worst_dual: r.worst_dual.ratio_dual,
        worst_dual_label: &r.worst_dual.label,
        refined_avg: r.refined_avg,
        refined_dual: r.refined_dual,
        stable: r.stable,
        growth_avg: r.growth_avg,
        growth_dual: r.growth_dual,
        balance_holds: r.balance_holds,
        bounded: r.bounded(),
        balance: &balance,
    };
    report(&ctx.write_json("verify-hardy.json", &summary)?);
    println!(
        "{na} / {nb}: worst averaging ratio {:.4} ({}), worst dual ratio {:.4} ({}), bounded: {}",
        summary.worst_avg,
        summary.worst_avg_label,
        summary.worst_dual,
        summary.worst_dual_label,
        summary.bounded
    );
    Ok(if r.balance_holds && !r.bounded() { Verdict::Fail } else { Verdict::Pass })
}

#[derive(Serialize)]
struct RatioRow<'a> {
    index: usize,
    label: String,
    ratio: f64,
    kernel_member: bool,
    suite_max: f64,
    top_decile_median: f64,
    witness_c: Option<f64>,
    name_a: &'a str,
    name_b: Option<&'a str>,
}

/// Per-field ratios; kernel members are reported as NaN and excluded from the summary.
fn ratio_rows<'a, F>(fields: &[(String, GridField)], name_a: &'a str, name_b: Option<&'a str>, witness_c: Option<f64>, ratio: F) -> Result<(Vec<RatioRow<'a>>, SuiteSummary)>
where
    F: Fn(&GridField) -> Result<f64>,
{
    let mut raw = Vec::with_capacity(fields.len());
    for (_, u) in fields {
        raw.push(match ratio(u) {
            Ok(r) => Some(r),
            Err(Error::KernelMembership { .. }) => None,
            Err(e) => return Err(e),
        });
    }
    let members = raw.iter().filter(|r| r.is_none()).count();
    let summary = SuiteSummary::from_ratios(raw.iter().flatten().copied().collect(), members);
    let rows = fields
        .iter()
        .zip(&raw)
        .enumerate()
        .map(|(index, ((label, _), r))| RatioRow {
            index,
            label: label.clone(),
            ratio: r.unwrap_or(f64::NAN),
            kernel_member: r.is_none(),
            suite_max: summary.max,
            top_decile_median: summary.top_decile_median,
            witness_c,
            name_a,
            name_b,
        })
        .collect();
    Ok((rows, summary))
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::Config(format!("--dim must be 2 or 3, got {dim}")))
    }
}

fn generated_suite(grid: &Grid, suite: FieldSuite, count: usize, zero_bc: bool, seed: u64) -> Vec<(String, GridField)> {
    match suite {
        FieldSuite::Smooth => smooth_fields(grid.dim, count, zero_bc, seed).iter().enumerate().map(|(i, f)| (format!("smooth-{i}"), f.sample(grid))).collect(),
        FieldSuite::Random => bump_fields(grid.dim, count, seed ^ 1).iter().enumerate().map(|(i, f)| (format!("random-{i}"), f.sample(grid))).collect(),
    }
}

fn korn_fields(ctx: &Context, c: &VerifyKorn, a: &YoungFunction) -> Result<Vec<(String, GridField)>> {
    let zero_bc = c.mode == Mode::ZeroBc;
    match c.suite {
        KornSuite::Smooth | KornSuite::Random => {
            check_dim(c.dim)?;
            let grid = Grid::unit_cube(c.dim, c.grid)?;
            let s = if c.suite == KornSuite::Smooth { FieldSuite::Smooth } else { FieldSuite::Random };
            Ok(generated_suite(&grid, s, c.count, zero_bc, ctx.seed))
        }
        KornSuite::Laminate => {
            if c.dim != 2 {
                return Err(Error::Config("the laminate suite is planar; use --dim 2".into()));
            }
            (1..=c.count).map(|m| Ok((format!("laminate-m{m}"), realize_field(&build_laminate(m, 1.0)?, 1.0, c.depth, c.grid)?))).collect()
        }
        KornSuite::Radial => {
            check_dim(c.dim)?;
            let grid = ball_grid(c.dim, c.grid)?;
            let w = unit_ball_volume(c.dim);
            (0..c.count)
                .map(|k| {
                    let delta = w * 10f64.powf(-0.5 * k as f64);
                    let mut f = radial_test_field(&radial_spike(a, c.dim, delta), &grid)?;
                    f.u.boundary_flag = true;
                    Ok((format!("radial-delta={delta:e}"), f.u))
                })
                .collect()
        }
    }
}

fn verify_korn_cmd(ctx: &Context, c: &VerifyKorn) -> Result<Verdict> {
    let (na, a) = ctx.resolve(&c.a)?;
    let (nb, b) = ctx.resolve(&c.b)?;
    let fields = korn_fields(ctx, c, &a)?;
    let balance = check_balance(&a, &b);
    let (rows, s) = ratio_rows(&fields, &na, Some(&nb), Some(balance.witness_c), |u| korn_ratio(&a, &b, u, c.mode, c.operator))?;
    report(&ctx.write_csv("verify-korn.csv", &rows)?);
    println!("{na} / {nb}: sup ratio {:.6}, top-decile median {:.6}, kernel members {}", s.max, s.top_decile_median, s.kernel_members);
    Ok(if balance.holds() && !s.is_finite() { Verdict::Fail } else { Verdict::Pass })
}

#[derive(Serialize)]
struct BlowupOut {
    m: usize,
    t_m: f64,
    sym_moment: f64,
    full_moment: f64,
    ratio: f64,
    first_moment_ratio: f64,
    witness_c: f64,
}

#[derive(Serialize)]
struct RealizedRow {
    m: usize,
    depth: usize,
    quantity: &'static str,
    exact: f64,
    realized: f64,
    relative_error: f64,
}

fn laminate_cmd(ctx: &Context, c: &LaminateDemo) -> Result<Verdict> {
    let (na, a) = ctx.resolve(&c.a)?;
    let (nb, b) = match &c.b {
        Some(s) => ctx.resolve(s)?,
        None => (na.clone(), a.clone()),
    };
    if c.m_max > laminate::MAX_ORDER {
        return Err(Error::Config(format!("--m-max is at most {}", laminate::MAX_ORDER)));
    }
    let witness_c = check_balance(&a, &b).witness_c;
    let rows: Vec<BlowupOut> = blowup_curve(&a, &b, c.m_max, c.r)?
        .into_iter()
        .map(|r| {
            Ok(BlowupOut {
                m: r.m,
                t_m: r.t_m,
                sym_moment: r.sym_moment,
                full_moment: r.full_moment,
                ratio: r.ratio,
                first_moment_ratio: first_moment_ratio(r.m)?,
                witness_c,
            })
        })
        .collect::<Result<_>>()?;
    report(&ctx.write_csv("laminate-demo.csv", &rows)?);
    println!("{na} / {nb}, r = {}", c.r);
    for r in &rows {
        println!("m = {:>2}  t_m = {:<12.6e} ratio = {:<12.6} first-moment ratio = {:.6}", r.m, r.t_m, r.ratio, r.first_moment_ratio);
    }
    if c.realize {
        let l = build_laminate(c.m_max, 1.0)?;
        let rz = Realization::new(&l, c.r, c.depth)?;
        let checks: [(&'static str, fn(&Matrix2) -> f64); 3] =
            [("|X|", |x| x.norm()), ("|X|^2", |x| x.norm().powi(2)), ("|Xsym|", |x| x.sym().norm())];
        let realized: Vec<RealizedRow> = checks
            .iter()
            .map(|(quantity, phi)| {
                let exact = moment(&l, phi);
                let got = rz.mean_of(phi, REALIZE_SAMPLES);
                RealizedRow { m: c.m_max, depth: c.depth, quantity: *quantity, exact, realized: got, relative_error: (got - exact).abs() / exact.abs().max(f64::MIN_POSITIVE) }
            })
            .collect();
        report(&ctx.write_csv("laminate-demo-realized.csv", &realized)?);
        let u = rz.sample(c.grid)?;
        let path = ctx.path("laminate-field.csv");
        io::write_csv(&u, BufWriter::new(File::create(&path)?))?;
        report(&path);
    }
    Ok(Verdict::Pass)
}

#[derive(Serialize)]
struct BogovskiiRow<'a> {
    index: usize,
    label: String,
    ratio: f64,
    div_residual: f64,
    boundary_layer: f64,
    suite_max: f64,
    witness_c: f64,
    name_a: &'a str,
    name_b: &'a str,
}

#[derive(Serialize)]
struct ResidualRow {
    x: f64,
    y: f64,
    z: f64,
    f: f64,
    residual: f64,
}

fn bogovskii_cmd(ctx: &Context, c: &BogovskiiCmd) -> Result<Verdict> {
    let (na, a) = ctx.resolve(&c.a)?;
    let (nb, b) = ctx.resolve(&c.b)?;
    check_dim(c.dim)?;
    let cfg = BogovskiiConfig::new(&Grid::unit_cube(c.dim, c.grid)?)?;
    let (suite, labels): (Vec<Vec<f64>>, Vec<String>) = match c.suite {
        BogovskiiSuite::Smooth => {
            let s = bogovskii::smooth_suite(&cfg);
            let n = s.len();
            (s, (0..n).map(|i| format!("smooth-{i}")).collect())
        }
        BogovskiiSuite::Spike => (bogovskii::spike_suite(&cfg, &SPIKE_RADII), SPIKE_RADII.iter().map(|r| format!("spike-radius={r}")).collect()),
    };
    let witness_c = check_balance(&a, &b).witness_c;
    let mut rows = Vec::with_capacity(suite.len());
    let mut first_residual = None;
    for (i, f) in suite.iter().enumerate() {
        let u = cfg.apply(f)?;
        let ratio = bogovskii::norm_bound_ratio(&cfg, &a, &b, f)?;
        rows.push(BogovskiiRow {
            index: i,
            label: labels[i].clone(),
            ratio,
            div_residual: bogovskii::div_residual(&u, f),
            boundary_layer: bogovskii::boundary_layer(&u, 2),
            suite_max: 0.0,
            witness_c,
            name_a: &na,
            name_b: &nb,
        });
        if first_residual.is_none() {
            let d = divergence(&u);
            first_residual = Some(
                (0..cfg.grid.cell_count())
                    .map(|k| {
                        let x = cfg.grid.cell_center(k);
                        ResidualRow { x: x[0], y: x[1], z: x[2], f: f[k], residual: d[k] - f[k] }
                    })
                    .collect::<Vec<_>>(),
            );
        }
    }
    let sup = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    for r in &mut rows {
        r.suite_max = sup;
    }
    report(&ctx.write_csv("bogovskii.csv", &rows)?);
    if let Some(res) = first_residual {
        report(&ctx.write_csv("bogovskii-residual.csv", &res)?);
    }
    for r in &rows {
        println!("{:<22} ratio = {:<12.6} div residual = {:.3e}", r.label, r.ratio, r.div_residual);
    }
    Ok(if rows.iter().all(|r| r.ratio.is_finite()) { Verdict::Pass } else { Verdict::Fail })
}

fn poincare_cmd(ctx: &Context, c: &PoincareCmd) -> Result<Verdict> {
    let (na, a) = ctx.resolve(&c.a)?;
    check_dim(c.dim)?;
    let grid = Grid::unit_cube(c.dim, c.grid)?;
    let fields = generated_suite(&grid, c.suite, c.count, c.mode == Mode::ZeroBc, ctx.seed);
    let (rows, s) = ratio_rows(&fields, &na, None, None, |u| poincare_ratio(&a, u, c.mode, c.operator))?;
    report(&ctx.write_csv("poincare.csv", &rows)?);
    println!("{na}: sup ratio {:.6}, top-decile median {:.6}, kernel members {}", s.max, s.top_decile_median, s.kernel_members);
    Ok(if s.is_finite() { Verdict::Pass } else { Verdict::Fail })
}

#[derive(Serialize)]
struct NegativeRow<'a> {
    index: usize,
    label: &'a str,
    component: usize,
    lower: f64,
    upper: f64,
    upper_constant: f64,
    dictionary_size: usize,
    name_a: &'a str,
}

fn negative_norm_cmd(ctx: &Context, c: &NegativeNormCmd) -> Result<Verdict> {
    let (na, a) = ctx.resolve(&c.a)?;
    check_dim(c.dim)?;
    let grid = Grid::unit_cube(c.dim, c.grid)?;
    let mut fields = generated_suite(&grid, FieldSuite::Smooth, c.count, false, ctx.seed);
    fields.extend(generated_suite(&grid, FieldSuite::Random, c.count, true, ctx.seed));
    let upper_constant = 2.0 * (c.dim as f64).sqrt();
    let mut rows = Vec::new();
    for (index, (label, u)) in fields.iter().enumerate() {
        let cells = u.cell_values();
        for k in 0..c.dim {
            let v: Vec<f64> = cells.iter().map(|x| x[k]).collect();
            let lb = negative_norm_lower_bound(&a, &grid, &v)?;
            let ub = trivial_upper_bound(&a, &grid, &v);
            rows.push(NegativeRow { index, label, component: k, lower: lb.value, upper: ub, upper_constant, dictionary_size: lb.dictionary_size, name_a: &na });
        }
    }
    report(&ctx.write_csv("negative-norm.csv", &rows)?);
    let violations = rows.iter().filter(|r| r.lower > r.upper * (1.0 + 1e-9)).count();
    println!("{na}: {} components, {violations} violations", rows.len());
    Ok(if violations == 0 { Verdict::Pass } else { Verdict::Fail })
}
