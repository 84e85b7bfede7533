//! The `zal` command line.
//!
//! Every command parameter is a key resolved from, in decreasing priority,
//! a `--key` flag, a `ZAL_KEY` environment variable, a `key = value` config
//! file and the built-in default. The resolved keys go into
//! `manifest.json` in the output directory together with a SHA-256 of every
//! file written, and `zal rerun --manifest FILE` replays a run from it.
//!
//! Exit codes: 0 success, 1 audit failure, 2 usage or parameter error,
//! 3 zero-count integrity failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgMatches, Command};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::averaging::{averaged_im_log_zeta, calibration_sweep, write_averaged_csv, IterationParams};
use crate::error::{Error, Result};
use crate::kernel::{Kernel, KernelFamily, KernelSpec};
use crate::primesum::{
    kernel_coefficients, mean_value_check, residual_audit, sieve_primes, write_residual_csv,
    ResidualAudit,
};
use crate::report::{AuditReport, Verdict};
use crate::rszeta::{self, critical_sample, drift_audit, locate_zeros, write_samples_csv};
use crate::stats::{
    draw_samples, exp_moment, moment_growth_from_sets, tail_probability, union_bound_audit,
    SampleMode, SampleSet, UnionBoundParams,
};
use crate::zerotable::{load_table_file, validate_window};

pub const EXIT_OK: i32 = 0;
pub const EXIT_AUDIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTEGRITY: i32 = 3;

pub const ENV_PREFIX: &str = "ZAL_";
pub const MANIFEST_NAME: &str = "manifest.json";

/// A command parameter. `default: None` marks a required key; an empty
/// default means "unset".
struct Key {
    name: &'static str,
    default: Option<&'static str>,
    help: &'static str,
}

const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key {
        name,
        default: Some(default),
        help,
    }
}

const fn required(name: &'static str, help: &'static str) -> Key {
    Key {
        name,
        default: None,
        help,
    }
}

const KERNEL: &[Key] = &[
    key("family", "smooth-bump-squared", "kernel family: smooth-bump-squared or fejer"),
    key("lambda", "1", "half-width of the support of the Fourier transform"),
    key("grid-step", "0.02", "kernel tabulation step"),
    key("truncation-tolerance", "1e-9", "kernel tabulation tolerance"),
];

const ZETA_POINT: &[Key] = &[required("t", "height on the critical line")];

const ZETA_ZEROS: &[Key] = &[
    key("t-min", "0", "lower end of the range (values below 2 are raised to 2)"),
    required("t-max", "upper end of the range"),
    key("reference", "", "reference table to validate against"),
    key("match-tol", "1e-6", "largest ordinate discrepancy counted as a match"),
    key("decimals", "10", "decimals written per ordinate"),
];

const ZETA_SCAN: &[Key] = &[
    required("t-min", "first height"),
    required("t-max", "last height"),
    key("count", "101", "number of equally spaced heights"),
];

const AVG_POINT: &[Key] = &[
    required("tau", "centre height"),
    required("h", "the scale H"),
    key("tol", "1e-6", "absolute accuracy"),
];

const RESIDUAL: &[Key] = &[
    key("tau-min", "1e4", "lower end of the τ range"),
    key("tau-max", "1e6", "upper end of the τ range"),
    key("h-min", "2", "lower end of the h range"),
    key("h-max", "10", "upper end of the h range"),
    key("n", "1000", "number of samples"),
    key("seed", "1", "random seed"),
    key("tol", "1e-3", "accuracy of each average"),
    key("bound", "10", "pass threshold on the largest |residual|"),
    key("T", "1e6", "T in the split point"),
    key("V", "4", "V in the split point"),
];

const MEANVALUE: &[Key] = &[
    key("k", "1", "moment order (comma-separated list allowed)"),
    key("T", "1e6", "heights are drawn from [T, 2T]"),
    key("x", "", "prime cutoff (default: largest with x^k <= T/log T)"),
    key("h", "", "coefficients are the kernel transform at log p / h (default: log x / lambda)"),
    key("n", "10000", "number of samples"),
    key("seed", "1", "random seed"),
];

const SAMPLE: &[Key] = &[
    key("T", "1e6", "heights are drawn as uT, u uniform on [0, 1]"),
    key("n", "1000", "number of samples"),
    key("seed", "1", "random seed"),
    key("mode", "raw", "raw or averaged"),
    key("h", "", "the scale H in averaged mode"),
    key("tol", "1e-3", "accuracy of each average"),
];

const TAIL: &[Key] = &[key("v-grid", "0,0.5,1,1.5,2,2.5,3,3.5,4", "thresholds V")];

const MOMENTS: &[Key] = &[
    key("k", "1", "moment orders (comma-separated)"),
    key("T", "1e6", "heights T (comma-separated, ascending)"),
    key("n", "10000", "samples per T"),
    key("seed", "1", "random seed"),
];

const PROP21: &[Key] = &[
    key("t-min", "2", "lower end of the pair range"),
    key("t-max", "1e6", "upper end of the pair range"),
    key("pairs", "10000", "number of random pairs"),
    key("seed", "1", "random seed"),
    key("bound", "-10", "pass threshold on the minimum"),
];

const PROP22: &[Key] = &[
    key("T", "1e6", "T"),
    key("V", "4", "V"),
    key("epsilon", "0.25", "ε"),
    key("a-grid", "1,2,4,8,16,32,64", "values of a to sweep"),
    key("K-grid", "1.25,1.5,2,2.5,3,3.5,3.9", "values of K to sweep"),
    key("n", "10000", "number of heights per seed"),
    key("seed", "1", "calibration seed"),
    key("holdout-seed", "2", "held-out seed"),
    key("tol", "1e-3", "accuracy of each average"),
];

const PROP24: &[Key] = &[
    key("T", "1e6", "T"),
    key("V", "4", "V"),
    key("epsilon", "0.25", "ε"),
    key("K", "2", "K"),
    key("n", "10000", "number of heights"),
    key("seed", "3", "random seed"),
    key("tol", "1e-2", "accuracy of each average"),
    key("slack", "0", "added to the right side"),
];

const PROP32: &[Key] = &[
    key("k", "1,2,3", "moment orders"),
    key("T", "1e6", "heights are drawn from [T, 2T]"),
    key("h", "", "coefficient scale (default: log x / lambda for each k)"),
    key("n", "10000", "number of samples"),
    key("seed", "1", "random seed"),
];

const REPORT: &[Key] = &[key("input", "", "directory of JSON reports (default: the output directory)")];

type Runner = fn(&mut Ctx) -> Result<Outcome>;

struct Spec {
    group: &'static str,
    name: &'static str,
    about: &'static str,
    keys: &'static [&'static [Key]],
    run: Runner,
}

const SPECS: &[Spec] = &[
    Spec { group: "kernel", name: "inspect", about: "tabulate a kernel and check its axioms", keys: &[KERNEL], run: run_kernel_inspect },
    Spec { group: "zeta", name: "point", about: "θ, Z, N and S at one height", keys: &[ZETA_POINT], run: run_zeta_point },
    Spec { group: "zeta", name: "zeros", about: "certified zero ordinates in a range", keys: &[ZETA_ZEROS], run: run_zeta_zeros },
    Spec { group: "zeta", name: "scan", about: "θ, Z, N and S on a grid", keys: &[ZETA_SCAN], run: run_zeta_scan },
    Spec { group: "avg", name: "point", about: "the kernel average I(τ, H)", keys: &[AVG_POINT, KERNEL], run: run_avg_point },
    Spec { group: "primes", name: "residual", about: "I(τ, h) minus its prime-sum approximation", keys: &[RESIDUAL, KERNEL], run: run_residual },
    Spec { group: "primes", name: "meanvalue", about: "Monte Carlo mean value of a Dirichlet polynomial", keys: &[MEANVALUE, KERNEL], run: run_meanvalue },
    Spec { group: "stats", name: "sample", about: "draw π S(uT) or I(uT, H)", keys: &[SAMPLE, KERNEL], run: run_stats_sample },
    Spec { group: "stats", name: "tail", about: "tail probabilities with Wilson intervals", keys: &[SAMPLE, TAIL, KERNEL], run: run_stats_tail },
    Spec { group: "stats", name: "moments", about: "exponential moments across T", keys: &[MOMENTS], run: run_stats_moments },
    Spec { group: "verify", name: "prop21", about: "lower bound on the drift of π S", keys: &[PROP21], run: run_prop21 },
    Spec { group: "verify", name: "prop22", about: "iteration event, calibrated over (a, K)", keys: &[PROP22, KERNEL], run: run_prop22 },
    Spec { group: "verify", name: "prop24", about: "cascade union bound", keys: &[PROP24, KERNEL], run: run_prop24 },
    Spec { group: "verify", name: "prop31", about: "prime-sum approximation residual", keys: &[RESIDUAL, KERNEL], run: run_residual },
    Spec { group: "verify", name: "prop32", about: "mean-value estimate for k in a list", keys: &[PROP32, KERNEL], run: run_prop32 },
    Spec { group: "report", name: "", about: "summarize JSON reports as CSV and text", keys: &[REPORT], run: run_report },
];

fn find_spec(group: &str, name: &str) -> Option<&'static Spec> {
    SPECS.iter().find(|s| s.group == group && s.name == name)
}

fn all_keys(spec: &Spec) -> impl Iterator<Item = &'static Key> {
    spec.keys.iter().flat_map(|g| g.iter())
}

fn key_args(spec: &Spec) -> Vec<Arg> {
    all_keys(spec)
        .map(|k| {
            let help = match k.default {
                None => format!("{} (required)", k.help),
                Some("") => k.help.to_string(),
                Some(d) => format!("{} [default: {d}]", k.help),
            };
            Arg::new(k.name)
                .long(k.name)
                .value_name("VALUE")
                .num_args(1)
                .allow_hyphen_values(true)
                .help(help)
        })
        .collect()
}

fn command() -> Command {
    let mut root = Command::new("zal")
        .about("Numerical laboratory for the argument of the zeta function on the critical line")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("threads")
                .long("threads")
                .global(true)
                .value_parser(clap::value_parser!(usize))
                .help("worker threads [default: available parallelism]"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .global(true)
                .value_name("DIR")
                .help("output directory [default: zal-out]"),
        )
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .help("key = value defaults"),
        );
    let mut groups: Vec<&str> = Vec::new();
    for s in SPECS {
        if !groups.contains(&s.group) {
            groups.push(s.group);
        }
    }
    for g in groups {
        let members: Vec<&Spec> = SPECS.iter().filter(|s| s.group == g).collect();
        if members.len() == 1 && members[0].name.is_empty() {
            root = root.subcommand(Command::new(g).about(members[0].about).args(key_args(members[0])));
            continue;
        }
        let mut sub = Command::new(g).subcommand_required(true);
        for s in members {
            sub = sub.subcommand(Command::new(s.name).about(s.about).args(key_args(s)));
        }
        root = root.subcommand(sub);
    }
    root.subcommand(
        Command::new("rerun")
            .about("replay a run from its manifest and compare the outputs")
            .arg(
                Arg::new("manifest")
                    .long("manifest")
                    .value_name("FILE")
                    .required(true),
            ),
    )
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        out.insert(normalize_key(k.trim()), v.trim().to_string());
    }
    Ok(out)
}

fn normalize_key(k: &str) -> String {
    k.replace('_', "-")
}

/// Environment variable carrying `key`: `t-max` → `ZAL_T_MAX`.
pub fn env_name(key: &str) -> String {
    format!("{ENV_PREFIX}{}", key.replace('-', "_").to_uppercase())
}

/// Resolve every key of `spec`: flag > environment > file > default.
fn resolve(
    spec: &Spec,
    flags: &BTreeMap<String, String>,
    env: &BTreeMap<String, String>,
    file: &BTreeMap<String, String>,
) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for k in all_keys(spec) {
        let v = flags
            .get(k.name)
            .or_else(|| env.get(&env_name(k.name)))
            .or_else(|| file.get(k.name))
            .cloned()
            .or_else(|| k.default.map(str::to_string));
        match v {
            Some(v) => {
                out.insert(k.name.to_string(), v);
            }
            None => {
                return Err(Error::InvalidSpec(format!(
                    "missing required parameter --{}",
                    k.name
                )))
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub config: BTreeMap<String, String>,
    pub outputs: Vec<OutputRecord>,
}

struct Outcome {
    verdict: Option<Verdict>,
    summary: String,
}

impl Outcome {
    fn done(summary: String) -> Self {
        Outcome {
            verdict: None,
            summary,
        }
    }

    fn audit(report: &AuditReport, summary: String) -> Self {
        Outcome {
            verdict: Some(report.verdict),
            summary,
        }
    }
}

struct Ctx {
    config: BTreeMap<String, String>,
    out: PathBuf,
    outputs: Vec<OutputRecord>,
    kernel: Option<Kernel>,
}

impl Ctx {
    fn raw(&self, k: &str) -> &str {
        self.config.get(k).map(String::as_str).unwrap_or("")
    }

    fn is_set(&self, k: &str) -> bool {
        !self.raw(k).is_empty()
    }

    fn f64(&self, k: &str) -> Result<f64> {
        let s = self.raw(k);
        s.parse::<f64>()
            .ok()
            .filter(|v| !v.is_nan())
            .ok_or_else(|| Error::InvalidSpec(format!("--{k}: `{s}` is not a number")))
    }

    fn u64(&self, k: &str) -> Result<u64> {
        let s = self.raw(k);
        // accept integral values written like 1e5
        s.parse::<u64>()
            .ok()
            .or_else(|| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| *v >= 0.0 && v.fract() == 0.0 && *v < 1.8e19)
                    .map(|v| v as u64)
            })
            .ok_or_else(|| Error::InvalidSpec(format!("--{k}: `{s}` is not a nonnegative integer")))
    }

    fn list(&self, k: &str) -> Result<Vec<f64>> {
        self.raw(k)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidSpec(format!("--{k}: `{s}` is not a number")))
            })
            .collect()
    }

    fn kernel(&mut self) -> Result<&Kernel> {
        if self.kernel.is_none() {
            let family: KernelFamily = self.raw("family").parse()?;
            let spec = KernelSpec {
                family,
                support_halfwidth: self.f64("lambda")?,
                grid_step: self.f64("grid-step")?,
                truncation_tolerance: self.f64("truncation-tolerance")?,
            };
            self.kernel = Some(Kernel::build(spec)?);
        }
        Ok(self.kernel.as_ref().expect("just built"))
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::create_dir_all(&self.out)?;
        fs::write(self.out.join(name), bytes)?;
        self.outputs.push(OutputRecord {
            file: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    fn write_report(&mut self, name: &str, report: &AuditReport) -> Result<()> {
        let mut text = report.to_json();
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Integrity { .. } => EXIT_INTEGRITY,
        _ => EXIT_USAGE,
    }
}

/// Run `zal` with the process environment.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env: BTreeMap<String, String> = std::env::vars()
        .filter(|(k, _)| k.starts_with(ENV_PREFIX))
        .collect();
    dispatch_with_env(argv, &env)
}

/// Run `zal` with an explicit set of `ZAL_*` variables.
pub fn dispatch_with_env<I, T>(argv: I, env: &BTreeMap<String, String>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run_matches(&matches, env) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("zal: {e}");
            exit_code_for(&e)
        }
    }
}

fn run_matches(m: &ArgMatches, env: &BTreeMap<String, String>) -> Result<i32> {
    if let Some(&n) = m.get_one::<usize>("threads") {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = m
        .get_one::<String>("out")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("zal-out"));
    let (group, gm) = m.subcommand().expect("subcommand required");
    if group == "rerun" {
        let path = gm.get_one::<String>("manifest").expect("required");
        let out = m.get_one::<String>("out").map(PathBuf::from);
        return rerun(Path::new(path), out);
    }
    let (spec, leaf) = match gm.subcommand() {
        Some((name, lm)) => (find_spec(group, name), lm),
        None => (find_spec(group, ""), gm),
    };
    let spec = spec.expect("clap only accepts known commands");
    let mut flags = BTreeMap::new();
    for k in all_keys(spec) {
        if let Some(v) = leaf.get_one::<String>(k.name) {
            flags.insert(k.name.to_string(), v.clone());
        }
    }
    let config_path = m
        .get_one::<String>("config")
        .cloned()
        .or_else(|| env.get(&env_name("config")).cloned());
    let file = match config_path {
        Some(p) => parse_config(&fs::read_to_string(&p)?)?,
        None => BTreeMap::new(),
    };
    let config = resolve(spec, &flags, env, &file)?;
    let (code, _) = execute(spec, config, out)?;
    Ok(code)
}

fn execute(spec: &Spec, config: BTreeMap<String, String>, out: PathBuf) -> Result<(i32, Manifest)> {
    let mut ctx = Ctx {
        config,
        out,
        outputs: Vec::new(),
        kernel: None,
    };
    let outcome = (spec.run)(&mut ctx)?;
    let mut command = vec![spec.group.to_string()];
    if !spec.name.is_empty() {
        command.push(spec.name.to_string());
    }
    let manifest = Manifest {
        tool: "zal".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command,
        config: ctx.config.clone(),
        outputs: ctx.outputs.clone(),
    };
    fs::create_dir_all(&ctx.out)?;
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(ctx.out.join(MANIFEST_NAME), text)?;
    print!("{}", outcome.summary);
    let code = match outcome.verdict {
        Some(Verdict::Fail) => EXIT_AUDIT_FAILED,
        _ => EXIT_OK,
    };
    Ok((code, manifest))
}

fn rerun(path: &Path, out: Option<PathBuf>) -> Result<i32> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(path)?)?;
    let (group, name) = match manifest.command.as_slice() {
        [g] => (g.as_str(), ""),
        [g, n] => (g.as_str(), n.as_str()),
        _ => return Err(Error::InvalidSpec("manifest command is malformed".into())),
    };
    let spec = find_spec(group, name)
        .ok_or_else(|| Error::InvalidSpec(format!("unknown command in manifest: {group} {name}")))?;
    let out = out.unwrap_or_else(|| path.parent().unwrap_or(Path::new(".")).join("rerun"));
    let (code, fresh) = execute(spec, manifest.config.clone(), out)?;
    let mismatched: Vec<&str> = manifest
        .outputs
        .iter()
        .filter(|o| !fresh.outputs.contains(o))
        .map(|o| o.file.as_str())
        .collect();
    if mismatched.is_empty() && fresh.outputs.len() == manifest.outputs.len() {
        println!("rerun: {} outputs reproduced byte-identically", fresh.outputs.len());
        Ok(code)
    } else {
        println!("rerun: outputs differ: {}", mismatched.join(", "));
        Ok(EXIT_AUDIT_FAILED)
    }
}

fn run_kernel_inspect(ctx: &mut Ctx) -> Result<Outcome> {
    let k = ctx.kernel()?.clone();
    let desc = k.description();
    let inv = crate::kernel::check_invariants(&k);
    let mut csv = String::from("x,phi,cdf\n");
    let extent = k.effective_halfwidth(2).unwrap_or(10.0).max(1.0);
    for i in 0..=400 {
        let x = -extent + 2.0 * extent * i as f64 / 400.0;
        let _ = writeln!(csv, "{x},{},{}", k.phi(x), k.cdf(x));
    }
    let mut ft = String::from("lambda,phi_hat\n");
    let lam = k.support_halfwidth();
    for i in 0..=200 {
        let l = -1.25 * lam + 2.5 * lam * i as f64 / 200.0;
        let _ = writeln!(ft, "{l},{}", k.phi_hat(l));
    }
    ctx.write("kernel_phi.csv", csv.as_bytes())?;
    ctx.write("kernel_phi_hat.csv", ft.as_bytes())?;
    let report = AuditReport::new("kernel-invariants")
        .param("kernel", &desc)
        .stat("checks", &inv)
        .with_verdict(if inv.values().all(|c| c.passed) { Verdict::Pass } else { Verdict::Fail });
    ctx.write_report("kernel.json", &report)?;
    let mut s = format!(
        "kernel {} lambda={} extent={:?} nodes={}\n",
        desc.family, desc.support_halfwidth, desc.table_extent, desc.table_nodes
    );
    for (name, c) in &inv {
        let _ = writeln!(s, "  {name:<16} {} ({:e})", if c.passed { "ok" } else { "FAIL" }, c.worst);
    }
    Ok(Outcome::audit(&report, s))
}

fn run_zeta_point(ctx: &mut Ctx) -> Result<Outcome> {
    let t = ctx.f64("t")?;
    let s = critical_sample(t)?;
    let mut buf = Vec::new();
    write_samples_csv(&mut buf, &[s])?;
    ctx.write("point.csv", &buf)?;
    let text = String::from_utf8(buf).expect("ASCII");
    let row = text.lines().nth(1).unwrap_or("").to_string();
    Ok(Outcome::done(format!("{row}\n")))
}

fn run_zeta_zeros(ctx: &mut Ctx) -> Result<Outcome> {
    let t_min = ctx.f64("t-min")?.max(2.0);
    let t_max = ctx.f64("t-max")?;
    let decimals = ctx.u64("decimals")? as usize;
    let zeros = locate_zeros(t_min, t_max)?;
    let mut buf = Vec::new();
    zeros.write_text(&mut buf, decimals)?;
    ctx.write("zeros.txt", &buf)?;
    let mut s = format!(
        "{} zeros in [{t_min}, {t_max}], first index {}\n",
        zeros.len(),
        zeros.first_index
    );
    if ctx.is_set("reference") {
        let table = load_table_file(ctx.raw("reference"))?;
        let tol = ctx.f64("match-tol")?;
        // compare over the range the table covers
        let hi = (table.ordinates.last().copied().unwrap_or(t_min) + tol).min(t_max);
        let report = validate_window(&zeros, &table, tol, t_min, hi);
        ctx.write_report("validation.json", &report)?;
        let _ = writeln!(
            s,
            "validation against {}: {} (matched {}, missing {}, spurious {}, max discrepancy {:e})",
            table.provenance,
            report.verdict,
            report.stat_u64("matched").unwrap_or(0),
            report.stat_u64("missing").unwrap_or(0),
            report.stat_u64("spurious").unwrap_or(0),
            report.stat_f64("max_discrepancy").unwrap_or(f64::NAN)
        );
        return Ok(Outcome::audit(&report, s));
    }
    Ok(Outcome::done(s))
}

fn run_zeta_scan(ctx: &mut Ctx) -> Result<Outcome> {
    let (a, b) = (ctx.f64("t-min")?, ctx.f64("t-max")?);
    let n = ctx.u64("count")?.max(1) as usize;
    let ts: Vec<f64> = (0..n)
        .map(|i| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect();
    let samples = rszeta::scan(&ts).into_iter().collect::<Result<Vec<_>>>()?;
    let mut buf = Vec::new();
    write_samples_csv(&mut buf, &samples)?;
    ctx.write("scan.csv", &buf)?;
    let max_s = samples.iter().map(|s| s.s.abs()).fold(0.0, f64::max);
    Ok(Outcome::done(format!("{n} heights in [{a}, {b}], max |S| = {max_s:.6}\n")))
}

fn run_avg_point(ctx: &mut Ctx) -> Result<Outcome> {
    let (tau, h, tol) = (ctx.f64("tau")?, ctx.f64("h")?, ctx.f64("tol")?);
    let s = averaged_im_log_zeta(tau, h, ctx.kernel()?, tol)?;
    let mut buf = Vec::new();
    write_averaged_csv(&mut buf, &[s])?;
    ctx.write("avg.csv", &buf)?;
    Ok(Outcome::done(format!(
        "I({tau}, {h}) = {} ± {:e} over [{}, {}], {} zeros\n",
        s.value, s.quad_error, s.window[0], s.window[1], s.zeros
    )))
}

fn run_residual(ctx: &mut Ctx) -> Result<Outcome> {
    let cfg = ResidualAudit {
        tau_range: [ctx.f64("tau-min")?, ctx.f64("tau-max")?],
        h_range: [ctx.f64("h-min")?, ctx.f64("h-max")?],
        n_samples: ctx.u64("n")? as usize,
        tol: ctx.f64("tol")?,
        bound: ctx.f64("bound")?,
        t_split: ctx.f64("T")?,
        v_split: ctx.f64("V")?,
    };
    let seed = ctx.u64("seed")?;
    let kernel = ctx.kernel()?.clone();
    let limit = (kernel.support_halfwidth() * cfg.h_range[1]).exp().ceil() as u64 + 1;
    let table = sieve_primes(limit.max(2))?;
    let (report, rows) = residual_audit(&cfg, &kernel, &table, seed)?;
    let mut buf = Vec::new();
    write_residual_csv(&mut buf, &rows)?;
    ctx.write("residual.csv", &buf)?;
    ctx.write_report("residual.json", &report)?;
    let s = format!(
        "residual over {} samples: max |r| = {:.6} (bound {}) -> {}\n",
        rows.len(),
        report.stat_f64("max_abs_residual").unwrap_or(f64::NAN),
        cfg.bound,
        report.verdict
    );
    Ok(Outcome::audit(&report, s))
}

/// Largest integer `x` with `x^k <= T / log T`.
pub fn default_prime_cutoff(t_max: f64, k: u32) -> f64 {
    let cap = t_max / t_max.ln();
    let mut x = cap.powf(1.0 / k as f64).floor();
    while x > 2.0 && x.powi(k as i32) > cap {
        x -= 1.0;
    }
    x
}

fn mean_value_reports(ctx: &mut Ctx, ks: &[f64], fixed_x: Option<f64>) -> Result<Vec<AuditReport>> {
    let t_max = ctx.f64("T")?;
    let n = ctx.u64("n")? as usize;
    let seed = ctx.u64("seed")?;
    let h_fixed = if ctx.is_set("h") { Some(ctx.f64("h")?) } else { None };
    let kernel = ctx.kernel()?.clone();
    let mut reports = Vec::new();
    for &kf in ks {
        if kf < 1.0 || kf.fract() != 0.0 {
            return Err(Error::InvalidSpec(format!("k must be a positive integer, got {kf}")));
        }
        let k = kf as u32;
        let x = fixed_x.unwrap_or_else(|| default_prime_cutoff(t_max, k));
        let h = h_fixed.unwrap_or(x.ln() / kernel.support_halfwidth());
        let table = sieve_primes((x as u64).max(2))?;
        let coeffs = kernel_coefficients(&kernel, h, x, &table)?;
        let r = mean_value_check(&coeffs, x, k, t_max, n, seed)?.param("h", h);
        reports.push(r);
    }
    Ok(reports)
}

fn mean_value_summary(reports: &[AuditReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let _ = writeln!(
            s,
            "k={} x={} moment={:.6e} reference={:.6e} ratio={:.4} (upper {:.4}) -> {}",
            r.params["k"],
            r.params["x"],
            r.stat_f64("moment").unwrap_or(f64::NAN),
            r.stat_f64("reference").unwrap_or(f64::NAN),
            r.stat_f64("ratio").unwrap_or(f64::NAN),
            r.stat_f64("ratio_upper").unwrap_or(f64::NAN),
            r.verdict
        );
    }
    s
}

fn combined(name: &str, reports: &[AuditReport]) -> AuditReport {
    let verdict = if reports.iter().any(|r| r.verdict == Verdict::Fail) {
        Verdict::Fail
    } else if reports.iter().all(|r| r.verdict == Verdict::Pass) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    AuditReport::new(name)
        .field("reports", reports)
        .with_verdict(verdict)
}

fn run_meanvalue(ctx: &mut Ctx) -> Result<Outcome> {
    let ks = ctx.list("k")?;
    let x = if ctx.is_set("x") { Some(ctx.f64("x")?) } else { None };
    let reports = mean_value_reports(ctx, &ks, x)?;
    let report = combined("mean-value-set", &reports);
    ctx.write_report("meanvalue.json", &report)?;
    Ok(Outcome::audit(&report, mean_value_summary(&reports)))
}

fn run_prop32(ctx: &mut Ctx) -> Result<Outcome> {
    let ks = ctx.list("k")?;
    let reports = mean_value_reports(ctx, &ks, None)?;
    let report = combined("prop32", &reports);
    ctx.write_report("prop32.json", &report)?;
    Ok(Outcome::audit(&report, mean_value_summary(&reports)))
}

fn sample_set(ctx: &mut Ctx) -> Result<SampleSet> {
    let t_max = ctx.f64("T")?;
    let n = ctx.u64("n")? as usize;
    let seed = ctx.u64("seed")?;
    let mode = match ctx.raw("mode") {
        "raw" => SampleMode::Raw,
        "averaged" => SampleMode::Averaged {
            h: ctx.f64("h")?,
            tol: ctx.f64("tol")?,
        },
        other => return Err(Error::InvalidSpec(format!("--mode: unknown mode `{other}`"))),
    };
    let kernel = match mode {
        SampleMode::Raw => None,
        SampleMode::Averaged { .. } => Some(ctx.kernel()?.clone()),
    };
    draw_samples(t_max, n, seed, mode, kernel.as_ref())
}

fn run_stats_sample(ctx: &mut Ctx) -> Result<Outcome> {
    let set = sample_set(ctx)?;
    let mut csv = String::from("index,u,t,value\n");
    // kept samples are in index order; skipped ones are interleaved by index
    let mut kept = set.u.iter().zip(&set.values);
    let skipped: BTreeMap<u64, &str> = set.skipped.iter().map(|s| (s.index, s.reason.as_str())).collect();
    for i in 0..set.n as u64 {
        if skipped.contains_key(&i) {
            continue;
        }
        let (u, v) = kept.next().expect("counts agree");
        let _ = writeln!(csv, "{i},{u},{},{v}", u * set.t_max);
    }
    ctx.write("samples.csv", csv.as_bytes())?;
    let mut text = serde_json::to_string_pretty(&set.skipped)?;
    text.push('\n');
    ctx.write("skipped.json", text.as_bytes())?;
    let n = set.len() as f64;
    let mean = set.values.iter().sum::<f64>() / n.max(1.0);
    let var = set.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(Outcome::done(format!(
        "{} samples ({} skipped): mean {mean:.6}, variance {var:.6}\n",
        set.len(),
        set.skipped.len()
    )))
}

fn run_stats_tail(ctx: &mut Ctx) -> Result<Outcome> {
    let grid = ctx.list("v-grid")?;
    let set = sample_set(ctx)?;
    let curve = tail_probability(&set, &grid)?;
    let mut buf = Vec::new();
    curve.write_csv(&mut buf)?;
    ctx.write("tail.csv", &buf)?;
    let mut s = format!("{} samples ({} skipped)\n", set.len(), set.skipped.len());
    for i in 0..grid.len() {
        let _ = writeln!(
            s,
            "  P[|x| >= {}] = {:.6} [{:.6}, {:.6}]",
            grid[i], curve.p_hat[i], curve.ci_lo[i], curve.ci_hi[i]
        );
    }
    Ok(Outcome::done(s))
}

fn run_stats_moments(ctx: &mut Ctx) -> Result<Outcome> {
    let ks = ctx.list("k")?;
    let ts = ctx.list("T")?;
    let n = ctx.u64("n")? as usize;
    let seed = ctx.u64("seed")?;
    let sets = ts
        .iter()
        .map(|&t| draw_samples(t, n, seed, SampleMode::Raw, None))
        .collect::<Result<Vec<_>>>()?;
    let mut csv = String::from("logT,k,nu_hat,stderr\n");
    let mut s = String::new();
    let mut scans = Vec::new();
    for &k in &ks {
        let scan = moment_growth_from_sets(k, &sets)?;
        for r in &scan.rows {
            let _ = writeln!(csv, "{},{},{},{}", r.log_t, r.k, r.nu_hat, r.stderr);
            let _ = writeln!(s, "logT={:.4} k={k} nu={:.6} ± {:.6}", r.log_t, r.nu_hat, r.stderr);
        }
        if sets.len() > 1 {
            let _ = writeln!(s, "k={k}: slope against log log T {:.4}, trend {}", scan.slope, scan.trend);
        }
        scans.push(scan);
    }
    for (set, &t) in sets.iter().zip(&ts) {
        for &k in &ks {
            if let Some(mu) = exp_moment(set, k)?.mu_hat {
                let _ = writeln!(s, "T={t} k={k}: mean |zeta|^(2k) estimate {mu:.6}");
            }
        }
    }
    ctx.write("moments.csv", csv.as_bytes())?;
    let mut text = serde_json::to_string_pretty(&scans)?;
    text.push('\n');
    ctx.write("moments.json", text.as_bytes())?;
    Ok(Outcome::done(s))
}

fn run_prop21(ctx: &mut Ctx) -> Result<Outcome> {
    let report = drift_audit(
        ctx.f64("t-min")?,
        ctx.f64("t-max")?,
        ctx.u64("pairs")? as usize,
        ctx.u64("seed")?,
        ctx.f64("bound")?,
    )?;
    ctx.write_report("prop21.json", &report)?;
    let s = format!(
        "min of drift over {} pairs: {:.6} (bound {}) -> {}\n",
        report.stat_u64("evaluated").unwrap_or(0),
        report.stat_f64("min_slack").unwrap_or(f64::NAN),
        ctx.raw("bound"),
        report.verdict
    );
    Ok(Outcome::audit(&report, s))
}

fn run_prop22(ctx: &mut Ctx) -> Result<Outcome> {
    let base = IterationParams {
        t_max: ctx.f64("T")?,
        v: ctx.f64("V")?,
        eps: ctx.f64("epsilon")?,
        k: 2.0,
        a: 1.0,
        tol: ctx.f64("tol")?,
    };
    let a_grid = ctx.list("a-grid")?;
    let k_grid = ctx.list("K-grid")?;
    let n = ctx.u64("n")? as usize;
    let (seed, hold) = (ctx.u64("seed")?, ctx.u64("holdout-seed")?);
    let kernel = ctx.kernel()?.clone();
    let res = calibration_sweep(&base, &a_grid, &k_grid, n, seed, hold, &kernel)?;
    let report = res
        .report
        .clone()
        .field("calibration", &res.calibration)
        .field("holdout", &res.holdout)
        .field("doubling_increases", &res.doubling_increases);
    ctx.write_report("prop22.json", &report)?;
    let hits = res.calibration.iter().map(|c| c.premises_hit).max().unwrap_or(0);
    let s = match res.selected {
        Some((a, k)) => format!("selected a={a}, K={k} ({hits} premise hits) -> {}\n", report.verdict),
        None => format!(
            "no (a, K) in the grid without counterexamples ({hits} premise hits at most) -> {}\n",
            report.verdict
        ),
    };
    Ok(Outcome::audit(&report, s))
}

fn run_prop24(ctx: &mut Ctx) -> Result<Outcome> {
    let p = UnionBoundParams {
        t_max: ctx.f64("T")?,
        v: ctx.f64("V")?,
        eps: ctx.f64("epsilon")?,
        k: ctx.f64("K")?,
        tol: ctx.f64("tol")?,
        slack: ctx.f64("slack")?,
    };
    let n = ctx.u64("n")? as usize;
    let seed = ctx.u64("seed")?;
    let kernel = ctx.kernel()?.clone();
    let report = union_bound_audit(&p, &kernel, n, seed)?;
    ctx.write_report("prop24.json", &report)?;
    let s = format!(
        "left {:.6} vs right {:.6} -> {}\n",
        report.stat_f64("left").unwrap_or(f64::NAN),
        report.stat_f64("right").unwrap_or(f64::NAN),
        report.verdict
    );
    Ok(Outcome::audit(&report, s))
}

fn run_report(ctx: &mut Ctx) -> Result<Outcome> {
    let dir = if ctx.is_set("input") {
        PathBuf::from(ctx.raw("input"))
    } else {
        ctx.out.clone()
    };
    let mut names: Vec<PathBuf> = fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .filter(|p| p.file_name().is_some_and(|n| n != MANIFEST_NAME && n != "summary.json"))
        .collect();
    names.sort();
    let mut csv = String::from("file,name,verdict,statistic,value\n");
    let mut text = String::new();
    for path in &names {
        let Ok(report) = serde_json::from_str::<AuditReport>(&fs::read_to_string(path)?) else {
            continue;
        };
        let file = path.file_name().unwrap_or_default().to_string_lossy().to_string();
        let _ = writeln!(text, "{file}: {} -> {}", report.name, report.verdict);
        for (k, v) in &report.statistics {
            if let Some(x) = v.as_f64() {
                let _ = writeln!(csv, "{file},{},{},{k},{x}", report.name, report.verdict);
                let _ = writeln!(text, "    {k} = {x}");
            }
        }
    }
    if text.is_empty() {
        text.push_str("no reports found\n");
    }
    ctx.write("summary.csv", csv.as_bytes())?;
    ctx.write("summary.txt", text.as_bytes())?;
    Ok(Outcome::done(text))
}
