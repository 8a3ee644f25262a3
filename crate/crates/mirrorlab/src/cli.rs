//! Command-line front end: argument and config resolution, dispatch, and
//! report emission.
//!
//! Parameters are resolved in increasing priority from the command's
//! defaults, the `--config` file, the MIRRORLAB_SEED environment variable
//! (seed only) and explicit flags. The resolved values are echoed in every
//! JSON report, so a report records exactly what produced it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::Error;
use crate::fukaya::{functor_check, mu2_closed};
use crate::gw::{
    differential_table, disc_series, leibniz_check, relation_residual, sphere_count_c, terms_well_formed,
    theta_at_moment, window_walls,
};
use crate::kahler::sampling::{
    calibrate_c_base, certify_points, collect_by_region, continuity_check, SampleSpec, CONTINUITY_TOL,
};
use crate::kahler::{
    c_base_from_log2, monodromy_class, potential_metric, transport_fractions, FiberPoint, C_BASE_LOG2,
};
use crate::lattice::{fmt_q, parse_q, q, LatticeVector, MomentPoint, RationalVector2, Q};
use crate::report::{fnum, to_pretty, Status};
use crate::tropical::{facet_csv, render_svg, tile_of, tiles_in_window, TileOf};

/// Exit status for malformed invocations (BSD EX_USAGE).
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "mirrorlab", version, about = "Exact and numerical checks for the abelian-surface mirror")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// key=value file overriding the command's defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Add wall-clock timing to JSON reports (they are then no longer
    /// byte-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Theta products against triangle counts for a triple i < j < k.
    Functor(FunctorArgs),
    /// Tropical tiling: SVG picture, facet CSV or tile list.
    Trop(TropArgs),
    /// Seeded positive-definiteness certificate of the fiber metric.
    MetricCheck(MetricArgs),
    /// Disc series at a moment point against the theta function.
    DiscSeries(DiscArgs),
    /// The sphere-count series in a finite window.
    SphereC(SphereArgs),
    /// Multiplication-by-s table between levels j − i − 1 and j − i.
    Differential(DifferentialArgs),
    /// Leibniz rule for the differential at a positive real point.
    Leibniz(LeibnizArgs),
    /// Monodromy classes on the fundamental domain and transport fractions.
    Monodromy(MonodromyArgs),
}

#[derive(Debug, Args)]
pub struct FunctorArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub i: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Largest τ-exponent compared, as an integer or p/q.
    #[arg(long)]
    pub cutoff: Option<String>,
}

#[derive(Debug, Args)]
pub struct TropArgs {
    /// x0,y0,x1,y1 in ξ coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Norm bound of the tiles listed in the facet CSV.
    #[arg(long)]
    pub radius: Option<String>,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(long = "T")]
    pub t: Option<String>,
    #[arg(long)]
    pub l: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
    /// Samples per region.
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// `frozen`, `auto` (calibrate on the samples), `2^j` or a number.
    #[arg(long = "c-base")]
    pub c_base: Option<String>,
    /// Candidate batches of 65536 drawn before giving up on a region.
    #[arg(long = "max-batches")]
    pub max_batches: Option<String>,
}

#[derive(Debug, Args)]
pub struct DiscArgs {
    /// ξ1,ξ2,η with rational entries.
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long)]
    pub cutoff: Option<String>,
}

#[derive(Debug, Args)]
pub struct SphereArgs {
    #[arg(long = "max-order")]
    pub max_order: Option<String>,
    /// Radius of the tile window.
    #[arg(long)]
    pub window: Option<String>,
}

#[derive(Debug, Args)]
pub struct DifferentialArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub i: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<String>,
    #[arg(long)]
    pub cutoff: Option<String>,
}

#[derive(Debug, Args)]
pub struct LeibnizArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub i: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<String>,
    /// |x1|,|x2|.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub tau: Option<String>,
    #[arg(long)]
    pub cutoff: Option<String>,
    /// Order through which the sphere count C is kept.
    #[arg(long = "c-order")]
    pub c_order: Option<String>,
    /// Window radius used for C.
    #[arg(long)]
    pub window: Option<String>,
}

#[derive(Debug, Args)]
pub struct MonodromyArgs {
    /// Random points for the antisymmetry check.
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
}

/// A resolved invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub timing: bool,
}

/// A finished run: the report body and its status.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub bytes: Vec<u8>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => Status::Fail.exit_code(),
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<Error> for CliError {
    /// Library errors all stem from inputs outside an operation's domain.
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn defaults(command: &str) -> &'static [(&'static str, &'static str)] {
    match command {
        "functor" => &[("i", "0"), ("j", "1"), ("k", "2"), ("cutoff", "20")],
        "trop" => &[("window", "-3,-3,3,3"), ("radius", "1")],
        "metric-check" => &[
            ("T", "0.1"),
            ("l", "40"),
            ("p", "17"),
            ("samples", "500"),
            ("seed", "7"),
            ("c-base", "frozen"),
            ("max-batches", "64"),
        ],
        "disc-series" => &[("A", "0,0,1/2"), ("cutoff", "15")],
        "sphere-c" => &[("max-order", "4"), ("window", "9")],
        "differential" => &[("i", "0"), ("j", "2"), ("cutoff", "15")],
        "leibniz" => &[
            ("i", "0"),
            ("j", "2"),
            ("x", "1,1"),
            ("tau", "0.1"),
            ("cutoff", "15"),
            ("c-order", "3"),
            ("window", "9"),
        ],
        "monodromy" => &[("samples", "50"), ("seed", "7")],
        _ => &[],
    }
}

fn command_flags(c: &Command) -> (&'static str, Vec<(&'static str, &Option<String>)>) {
    match c {
        Command::Functor(a) => ("functor", vec![("i", &a.i), ("j", &a.j), ("k", &a.k), ("cutoff", &a.cutoff)]),
        Command::Trop(a) => ("trop", vec![("window", &a.window), ("radius", &a.radius)]),
        Command::MetricCheck(a) => (
            "metric-check",
            vec![
                ("T", &a.t),
                ("l", &a.l),
                ("p", &a.p),
                ("samples", &a.samples),
                ("seed", &a.seed),
                ("c-base", &a.c_base),
                ("max-batches", &a.max_batches),
            ],
        ),
        Command::DiscSeries(a) => ("disc-series", vec![("A", &a.a), ("cutoff", &a.cutoff)]),
        Command::SphereC(a) => ("sphere-c", vec![("max-order", &a.max_order), ("window", &a.window)]),
        Command::Differential(a) => ("differential", vec![("i", &a.i), ("j", &a.j), ("cutoff", &a.cutoff)]),
        Command::Leibniz(a) => (
            "leibniz",
            vec![
                ("i", &a.i),
                ("j", &a.j),
                ("x", &a.x),
                ("tau", &a.tau),
                ("cutoff", &a.cutoff),
                ("c-order", &a.c_order),
                ("window", &a.window),
            ],
        ),
        Command::Monodromy(a) => ("monodromy", vec![("samples", &a.samples), ("seed", &a.seed)]),
    }
}

/// Parse a key=value config file. Blank lines, `#` comments and `[section]`
/// headers are skipped; values may be quoted. `format` and `output` are
/// accepted as keys too.
pub fn parse_config(text: &str, origin: &str) -> Result<Vec<(String, String, usize)>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(usage(format!("{origin}:{}: expected key = value, found {line:?}", n + 1)));
        };
        let k = k.trim();
        let mut v = v.trim();
        if v.len() >= 2 && ((v.starts_with('"') && v.ends_with('"')) || (v.starts_with('\'') && v.ends_with('\''))) {
            v = &v[1..v.len() - 1];
        }
        if k.is_empty() {
            return Err(usage(format!("{origin}:{}: empty key", n + 1)));
        }
        out.push((k.to_string(), v.to_string(), n + 1));
    }
    Ok(out)
}

/// Resolve defaults, config file, environment and flags into a RunConfig.
pub fn resolve(cli: &Cli, env_seed: Option<String>) -> Result<RunConfig, CliError> {
    let (command, flags) = command_flags(&cli.command);
    let defs = defaults(command);
    let mut params: BTreeMap<String, String> = defs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    let mut format = None;
    let mut output = None;
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        for (k, v, line) in parse_config(&text, &path.display().to_string())? {
            match k.as_str() {
                "format" => {
                    format = Some(
                        Format::from_str(&v, true)
                            .map_err(|_| usage(format!("{}:{line}: unknown format {v:?}", path.display())))?,
                    )
                }
                "output" => output = Some(PathBuf::from(v)),
                _ if params.contains_key(&k) => {
                    params.insert(k, v);
                }
                _ => {
                    return Err(usage(format!(
                        "{}:{line}: unknown key {k:?} for {command} (expected one of: {})",
                        path.display(),
                        defs.iter().map(|d| d.0).collect::<Vec<_>>().join(", ")
                    )))
                }
            }
        }
    }
    if let Some(s) = env_seed {
        if params.contains_key("seed") {
            params.insert("seed".into(), s);
        }
    }
    for (k, v) in flags {
        if let Some(v) = v {
            params.insert(k.to_string(), v.clone());
        }
    }
    Ok(RunConfig {
        command: command.to_string(),
        params,
        format: cli.format.or(format).unwrap_or(Format::Json),
        output: cli.output.clone().or(output),
        timing: cli.timing,
    })
}

// Typed parameter access with flag-named diagnostics.
fn get<'a>(c: &'a RunConfig, key: &str) -> &'a str {
    c.params.get(key).map(String::as_str).unwrap_or("")
}

fn p_int(c: &RunConfig, key: &str) -> Result<i64, CliError> {
    get(c, key).trim().parse().map_err(|_| usage(format!("--{key}: expected an integer, got {:?}", get(c, key))))
}

fn p_uint(c: &RunConfig, key: &str) -> Result<u64, CliError> {
    get(c, key)
        .trim()
        .parse()
        .map_err(|_| usage(format!("--{key}: expected a nonnegative integer, got {:?}", get(c, key))))
}

fn p_f64(c: &RunConfig, key: &str) -> Result<f64, CliError> {
    let v: f64 =
        get(c, key).trim().parse().map_err(|_| usage(format!("--{key}: expected a number, got {:?}", get(c, key))))?;
    if !v.is_finite() {
        return Err(usage(format!("--{key}: must be finite")));
    }
    Ok(v)
}

fn p_q(c: &RunConfig, key: &str) -> Result<Q, CliError> {
    parse_q(get(c, key).trim()).map_err(|_| usage(format!("--{key}: expected a rational, got {:?}", get(c, key))))
}

fn p_cutoff(c: &RunConfig, key: &str) -> Result<Q, CliError> {
    let v = p_q(c, key)?;
    if v < q(0) {
        return Err(usage(format!("--{key}: must be nonnegative")));
    }
    Ok(v)
}

fn p_list<T>(c: &RunConfig, key: &str, n: usize, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, CliError> {
    let raw = get(c, key);
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(usage(format!("--{key}: expected {n} comma-separated values, got {raw:?}")));
    }
    parts.iter().map(|p| f(p).ok_or_else(|| usage(format!("--{key}: cannot parse {p:?}")))).collect()
}

fn p_tau(c: &RunConfig, key: &str) -> Result<f64, CliError> {
    let t = p_f64(c, key)?;
    if !(t > 0.0 && t < 1.0) {
        return Err(usage(format!("--{key}: must lie in (0, 1), got {t}")));
    }
    Ok(t)
}

/// A result before serialization.
struct Body {
    status: Status,
    json: Value,
    csv: Option<String>,
    svg: Option<String>,
}

/// Run a resolved configuration and serialize the report.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let body = match cfg.command.as_str() {
        "functor" => run_functor(cfg)?,
        "trop" => run_trop(cfg)?,
        "metric-check" => run_metric(cfg)?,
        "disc-series" => run_disc(cfg)?,
        "sphere-c" => run_sphere(cfg)?,
        "differential" => run_differential(cfg)?,
        "leibniz" => run_leibniz(cfg)?,
        "monodromy" => run_monodromy(cfg)?,
        other => return Err(usage(format!("unknown command {other:?}"))),
    };
    let bytes = match cfg.format {
        Format::Json => {
            let mut report = json!({
                "command": cfg.command,
                "config": cfg.params,
                "status": body.status.as_str(),
                "result": body.json,
            });
            if cfg.timing {
                report["timing_ms"] = fnum(start.elapsed().as_secs_f64() * 1e3);
            }
            to_pretty(&report).into_bytes()
        }
        Format::Csv => body
            .csv
            .ok_or_else(|| usage(format!("{} has no csv output", cfg.command)))?
            .into_bytes(),
        Format::Svg => body
            .svg
            .ok_or_else(|| usage(format!("{} has no svg output", cfg.command)))?
            .into_bytes(),
    };
    Ok(Outcome { status: body.status, bytes })
}

/// Write the outcome where the configuration says.
pub fn emit(cfg: &RunConfig, out: &Outcome) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => write_file(path, &out.bytes),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&out.bytes)
                .map_err(|e| CliError::Runtime(format!("cannot write standard output: {e}")))
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Parse, resolve, run and emit; returns the process exit code.
pub fn main_with_args<I, T>(args: I, env_seed: Option<String>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = resolve(&cli, env_seed).and_then(|cfg| {
        let out = run(&cfg)?;
        emit(&cfg, &out)?;
        Ok(out.status)
    });
    match result {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("mirrorlab: {}", e.message());
            e.exit_code()
        }
    }
}

fn run_functor(c: &RunConfig) -> Result<Body, CliError> {
    let (i, j, k) = (p_int(c, "i")?, p_int(c, "j")?, p_int(c, "k")?);
    let cutoff = p_cutoff(c, "cutoff")?;
    let rep = functor_check(i, j, k, &cutoff)?;
    let mut csv = String::from("e1_1,e1_2,e2_1,e2_2,e_1,e_2,matches\n");
    for p in &rep.pairs {
        for (e, ok) in &p.per_rep {
            let _ = writeln!(csv, "{},{},{},{},{},{},{}", p.e1.n1, p.e1.n2, p.e2.n1, p.e2.n2, e.n1, e.n2, ok);
        }
    }
    Ok(Body { status: Status::from_bool(rep.all_match()), json: rep.to_json(), csv: Some(csv), svg: None })
}

fn parse_window(c: &RunConfig) -> Result<[Q; 4], CliError> {
    let v = p_list(c, "window", 4, |s| parse_q(s).ok())?;
    let w: [Q; 4] = [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()];
    if w[0] >= w[2] || w[1] >= w[3] {
        return Err(usage("--window: need x0 < x1 and y0 < y1"));
    }
    Ok(w)
}

fn run_trop(c: &RunConfig) -> Result<Body, CliError> {
    let w = parse_window(c)?;
    let radius = p_cutoff(c, "radius")?;
    let tiles = tiles_in_window(&w);
    // Each listed tile must own its center point.
    let mut ok = true;
    let list: Vec<Value> = tiles
        .iter()
        .map(|t| {
            let (c1, c2) = t.center();
            let own = matches!(tile_of(&RationalVector2::ints(c1, c2)), TileOf::Tile(u) if u == *t);
            ok &= own;
            json!({
                "m": [t.m1, t.m2],
                "center": [c1, c2],
                "vertices": t.vertices().iter().map(|v| [v.0, v.1]).collect::<Vec<_>>(),
                "center_in_tile": own,
            })
        })
        .collect();
    let json = json!({
        "window": w.iter().map(fmt_q).collect::<Vec<_>>(),
        "tiles": list,
    });
    Ok(Body { status: Status::from_bool(ok), json, csv: Some(facet_csv(&radius)), svg: Some(render_svg(&w)) })
}

fn parse_c_base(c: &RunConfig) -> Result<CBase, CliError> {
    let raw = get(c, "c-base").trim().to_string();
    if raw == "frozen" {
        return Ok(CBase::Log2(C_BASE_LOG2));
    }
    if raw == "auto" {
        return Ok(CBase::Auto);
    }
    if let Some(j) = raw.strip_prefix("2^") {
        let j: i32 = j.parse().map_err(|_| usage(format!("--c-base: cannot parse exponent in {raw:?}")))?;
        return Ok(CBase::Log2(j));
    }
    let v: f64 = raw
        .parse()
        .map_err(|_| usage(format!("--c-base: expected frozen, auto, 2^j or a positive number, got {raw:?}")))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(usage("--c-base: must be positive"));
    }
    Ok(CBase::Value(v))
}

enum CBase {
    Log2(i32),
    Auto,
    Value(f64),
}

/// Allowed relative deviation of the deep-VII metric from T²·(8/3)·I.
pub const SEVEN_TOL: f64 = 0.1;

/// The potential part of the metric at r_x = r_y = r_z = T^(l/3) against
/// T²·(8/3)·I: returns the largest relative deviation.
pub fn seven_deviation(t: f64, l: u32, p: u32) -> (f64, [[f64; 3]; 3]) {
    let l3 = l as f64 / 3.0;
    let q = FiberPoint::from_logs([l3, l3, l3], t, l, p);
    let m = potential_metric(&q);
    let target = t * t * 8.0 / 3.0;
    let mut dev = 0.0f64;
    for i in 0..3 {
        for k in 0..3 {
            let want = if i == k { target } else { 0.0 };
            dev = dev.max((m[i][k] - want).abs() / target);
        }
    }
    (dev, m)
}

fn run_metric(c: &RunConfig) -> Result<Body, CliError> {
    let t = p_tau(c, "T")?;
    let l = p_uint(c, "l")?;
    let p = p_uint(c, "p")?;
    if l == 0 || p == 0 || l > 1000 || p > 1000 {
        return Err(usage("--l and --p must lie in 1..=1000"));
    }
    let (l, p) = (l as u32, p as u32);
    let spec = SampleSpec {
        t,
        l,
        p,
        seed: p_uint(c, "seed")?,
        per_region: p_uint(c, "samples")? as usize,
        max_batches: p_uint(c, "max-batches")?,
    };
    let points = collect_by_region(&spec);
    let (c_base, log2, calibrated) = match parse_c_base(c)? {
        CBase::Log2(j) => (c_base_from_log2(j, t, l), Some(j), false),
        CBase::Value(v) => (v, None, false),
        CBase::Auto => {
            let all: Vec<FiberPoint> = points.values().flatten().copied().collect();
            match calibrate_c_base(&all, t, l, -1000, 0) {
                Some(j) => (c_base_from_log2(j, t, l), Some(j), true),
                None => (c_base_from_log2(0, t, l), Some(0), true),
            }
        }
    };
    let cert = certify_points(&spec, &points, c_base);
    let jumps = continuity_check(&spec, &points, 1.0);
    let max_jump = jumps.iter().fold(0.0f64, |a, j| a.max(j.max_jump));
    let (dev, seven) = seven_deviation(t, l, p);
    let mut status = cert.status();
    if spec.per_region > 0 {
        status = status.combine(Status::from_bool(max_jump <= CONTINUITY_TOL && dev <= SEVEN_TOL));
    }
    let mut json = cert.to_json();
    json["c_base_log2"] = log2.map(Value::from).unwrap_or(Value::Null);
    json["c_base_calibrated"] = Value::from(calibrated);
    json["continuity"] = json!({
        "tolerance": fnum(CONTINUITY_TOL),
        "max_jump": fnum(max_jump),
        "boundaries": jumps.iter().map(|j| json!({
            "regions": [j.a.name(), j.b.name()],
            "pairs": j.pairs,
            "max_jump": fnum(j.max_jump),
        })).collect::<Vec<_>>(),
    });
    json["center_check"] = json!({
        "potential_matrix": seven.iter().map(|r| r.iter().map(|x| fnum(*x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "target_diagonal": fnum(t * t * 8.0 / 3.0),
        "max_relative_deviation": fnum(dev),
        "tolerance": fnum(SEVEN_TOL),
    });
    let mut csv = String::from("region,samples,min_eig,min_rel_eig,pd_failures,max_fd_gradient_rel,max_fd_hessian_rel\n");
    for r in &cert.regions {
        let _ = writeln!(
            csv,
            "{},{},{:.16e},{:.16e},{},{:.16e},{:.16e}",
            r.region.name(),
            r.samples,
            r.min_eig,
            r.min_rel_eig,
            r.pd_failures,
            r.max_fd_gradient,
            r.max_fd_hessian
        );
    }
    Ok(Body { status, json, csv: Some(csv), svg: None })
}

fn series_csv(s: &crate::series::TauSeries) -> String {
    let mut out = String::from("exponent,coefficient\n");
    for (e, c) in s.terms() {
        let _ = writeln!(out, "{},{}", fmt_q(e), fmt_q(c));
    }
    out
}

fn run_disc(c: &RunConfig) -> Result<Body, CliError> {
    let a = p_list(c, "A", 3, |s| parse_q(s).ok())?;
    let a = MomentPoint::new(a[0].clone(), a[1].clone(), a[2].clone());
    let cutoff = p_cutoff(c, "cutoff")?;
    let disc = disc_series(&a, &cutoff)?;
    let theta = theta_at_moment(&a, &cutoff)?;
    let normalized = disc.shift(&-a.eta.clone());
    let ok = disc.agrees_with(&theta) && disc.cutoff() == theta.cutoff();
    let json = json!({
        "A": [fmt_q(&a.xi1), fmt_q(&a.xi2), fmt_q(&a.eta)],
        "disc_series": disc.to_json(),
        "normalized": normalized.to_json(),
        "theta_series": theta.to_json(),
        "agree": ok,
    });
    Ok(Body { status: Status::from_bool(ok), json, csv: Some(series_csv(&disc)), svg: None })
}

fn run_sphere(c: &RunConfig) -> Result<Body, CliError> {
    let max_order = p_cutoff(c, "max-order")?;
    let radius = p_int(c, "window")?;
    if !(1..=30).contains(&radius) {
        return Err(usage("--window: radius must lie in 1..=30"));
    }
    let (series, terms) = sphere_count_c(&max_order, radius);
    let i = crate::tropical::Tile::new(0, 0);
    let constant_ok = series.coeff(&q(0)) == q(1) && series.terms().keys().all(|e| e >= &q(0));
    let signs_ok = terms_well_formed(&i, &terms);
    let walls = window_walls(radius);
    let walls_ok = walls.iter().all(|w| relation_residual(&w.degrees) == (0, 0, 0));
    let ok = constant_ok && signs_ok && walls_ok;
    let json = json!({
        "window_radius": radius,
        "max_order": fmt_q(&max_order),
        "series": series.to_json(),
        "g_terms": terms.iter().map(|t| json!({
            "total_degree": t.class.total_degree,
            "degrees": t.class.degrees.iter().map(|(u, d)| json!([[u.m1, u.m2], d])).collect::<Vec<_>>(),
            "coefficient": fmt_q(&t.coefficient),
        })).collect::<Vec<_>>(),
        "checks": {
            "constant_term_one": constant_ok,
            "sign_conditions": signs_ok,
            "wall_relations_exact": walls_ok,
            "walls_in_window": walls.len(),
        },
        "note": "terms beyond the constant depend on the window; they are reported, not asserted",
    });
    Ok(Body { status: Status::from_bool(ok), json, csv: Some(series_csv(&series)), svg: None })
}

fn run_differential(c: &RunConfig) -> Result<Body, CliError> {
    let (i, j) = (p_int(c, "i")?, p_int(c, "j")?);
    let cutoff = p_cutoff(c, "cutoff")?;
    let table = differential_table(i, j, &cutoff)?;
    // Oracle: the triangle counts of the triple (i, i+1, j) with the level-one
    // input fixed at 0.
    let mut ok = true;
    for (e, row) in &table.entries {
        let mu = mu2_closed(i, i + 1, j, &LatticeVector::ZERO, e, &cutoff)?;
        for (et, s) in row {
            ok &= mu.get(et).is_some_and(|m| m.agrees_with(s));
        }
    }
    let mut json = table.to_json();
    json["matches_triangle_counts"] = Value::from(ok);
    let mut csv = String::from("e_in_1,e_in_2,e_out_1,e_out_2,exponent,coefficient\n");
    for (e, row) in &table.entries {
        for (et, s) in row {
            for (x, k) in s.terms() {
                let _ = writeln!(csv, "{},{},{},{},{},{}", e.n1, e.n2, et.n1, et.n2, fmt_q(x), fmt_q(k));
            }
        }
    }
    Ok(Body { status: Status::from_bool(ok), json, csv: Some(csv), svg: None })
}

fn run_leibniz(c: &RunConfig) -> Result<Body, CliError> {
    let (i, j) = (p_int(c, "i")?, p_int(c, "j")?);
    let x = p_list(c, "x", 2, |s| s.parse::<f64>().ok().filter(|v| *v > 0.0 && v.is_finite()))?;
    let tau = p_tau(c, "tau")?;
    let cutoff = p_cutoff(c, "cutoff")?;
    let c_order = p_cutoff(c, "c-order")?;
    let radius = p_int(c, "window")?;
    if !(1..=30).contains(&radius) {
        return Err(usage("--window: radius must lie in 1..=30"));
    }
    let (cs, _) = sphere_count_c(&c_order, radius);
    let rep = leibniz_check(i, j, (x[0], x[1]), tau, &cutoff, &cs)?;
    let mut csv = String::from("e1,e2,lhs,rhs,residual,bound,status\n");
    for it in &rep.items {
        let _ = writeln!(
            csv,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            it.e.n1,
            it.e.n2,
            it.lhs.value,
            it.rhs.value,
            (it.lhs.value - it.rhs.value).abs(),
            it.lhs.err + it.rhs.err,
            it.status.as_str()
        );
    }
    Ok(Body { status: rep.status(), json: rep.to_json(), csv: Some(csv), svg: None })
}

/// Corner samples of the fundamental parallelogram (−3,−3) + [0,1]γ′ + [0,1]γ″,
/// a quarter of the way in from each corner, with their expected classes.
pub fn monodromy_corners() -> Vec<(&'static str, RationalVector2, (i64, i64))> {
    let p = |a: i64, b: i64| RationalVector2::new(Q::new(a.into(), 4.into()), Q::new(b.into(), 4.into()));
    // Corners (0,0), (−1,−2), (−2,−1), (−3,−3) moved toward the center (−3/2,−3/2).
    vec![
        ("upper_right", p(-3, -3), (0, 0)),
        ("gamma1_corner", p(-7, -9), (0, 1)),
        ("gamma2_corner", p(-9, -7), (1, 0)),
        ("bottom_left", p(-9, -9), (1, 1)),
    ]
}

/// A seeded rational point strictly inside the fundamental parallelogram,
/// off tile boundaries.
pub fn monodromy_sample(seed: u64, index: u64) -> RationalVector2 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let (s, t): (i64, i64) = (rng.gen_range(1..1000), rng.gen_range(1..1000));
        // (−3,−3) + (s/1000)(2,1) + (t/1000)(1,2)
        let xi = RationalVector2::new(
            Q::new((2 * s + t - 3000).into(), 1000.into()),
            Q::new((s + 2 * t - 3000).into(), 1000.into()),
        );
        if matches!(tile_of(&xi), TileOf::Tile(_)) {
            return xi;
        }
    }
}

fn run_monodromy(c: &RunConfig) -> Result<Body, CliError> {
    let n = p_uint(c, "samples")?;
    let seed = p_uint(c, "seed")?;
    let mut ok = true;
    let mut csv = String::from("label,xi1,xi2,f1,f2\n");
    let corners: Vec<Value> = monodromy_corners()
        .into_iter()
        .map(|(label, xi, want)| {
            let got = monodromy_class(&xi).ok();
            ok &= got == Some(want);
            if let Some((f1, f2)) = got {
                let _ = writeln!(csv, "{label},{},{},{f1},{f2}", fmt_q(&xi.a), fmt_q(&xi.b));
            }
            json!({
                "label": label,
                "xi": [fmt_q(&xi.a), fmt_q(&xi.b)],
                "class": got.map(|g| json!([g.0, g.1])),
                "expected": [want.0, want.1],
            })
        })
        .collect();
    let mut anti = Vec::new();
    for k in 0..n {
        let xi = monodromy_sample(seed, k);
        let a = monodromy_class(&xi)?;
        let b = monodromy_class(&xi.neg())?;
        let good = b == (-a.0, -a.1);
        ok &= good;
        let _ = writeln!(csv, "sample_{k},{},{},{},{}", fmt_q(&xi.a), fmt_q(&xi.b), a.0, a.1);
        anti.push(json!({"xi": [fmt_q(&xi.a), fmt_q(&xi.b)], "class": [a.0, a.1], "class_neg": [b.0, b.1], "antisymmetric": good}));
    }
    // Transport fractions at a fixed set of C³-patch points.
    let pts = [(1.0, 1.0, 1.0), (0.1, 1.0, 1.0), (0.01, 0.5, 2.0), (1e-3, 1e-3, 1.0), (0.3, 0.2, 0.1)];
    let mut max_sum_err = 0.0f64;
    let fr: Vec<Value> = pts
        .iter()
        .map(|&(a, b, cc)| {
            let f = transport_fractions(&FiberPoint::new(a, b, cc, 0.1, 40, 17));
            max_sum_err = max_sum_err.max((f.iter().sum::<f64>() - 1.0).abs());
            json!({"r": [fnum(a), fnum(b), fnum(cc)], "fractions": f.iter().map(|x| fnum(*x)).collect::<Vec<_>>()})
        })
        .collect();
    ok &= max_sum_err <= 1e-14;
    let json = json!({
        "corners": corners,
        "antisymmetry": anti,
        "transport": fr,
        "max_fraction_sum_error": fnum(max_sum_err),
    });
    Ok(Body { status: Status::from_bool(ok), json, csv: Some(csv), svg: None })
}
