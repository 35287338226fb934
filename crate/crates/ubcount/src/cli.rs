//! Command-line front end. [`run`] takes the argument list and output
//! streams and returns the process exit status.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use ubcount_core::counting::{DEFAULT_DELTA, DEFAULT_EPSILON};
use ubcount_core::sat::DEFAULT_CONFLICT_LIMIT;
use ubcount_core::{
    approx_count, count_exact_projected, find_is, find_ubs, gen_theorem1, gen_theorem2, ubcount,
    CountError, FamilyError, FamilyInstance, Formula, PacParams, ProjectionSet, SolverConfig, SupportSet, UbCountJob,
    VarOrderStrategy, VarSet,
};

use crate::bench::{self, BenchInstance, CompareConfig};
use crate::deadline::WallDeadline;
use crate::dimacs::{self, XorPolicy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRE_TIMEOUT: i32 = 3;
pub const EXIT_COUNT_TIMEOUT: i32 = 4;

const DEFAULT_TIMEOUT_S: f64 = 5000.0;

#[derive(Debug, Parser)]
#[command(name = "ubcount", version, about = "Projected model counting with upper bound supports")]
#[command(after_help = "Exit status: 0 ok, 1 usage error, 2 parse error, \
3 preprocessing timed out (fallback result printed), 4 counting timed out.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute an independent support or an upper bound support.
    FindSupport(FindSupportArgs),
    /// Count the projected models of a formula.
    Count(CountArgs),
    /// Run both counting pipelines over a set of instances.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Is,
    Ubs,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    NonprojFirst,
    ProjOnly,
    Index,
    OccAsc,
}

impl From<StrategyArg> for VarOrderStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::NonprojFirst => VarOrderStrategy::NonProjectionFirst,
            StrategyArg::ProjOnly => VarOrderStrategy::ProjectionOnly,
            StrategyArg::Index => VarOrderStrategy::IndexOrder,
            StrategyArg::OccAsc => VarOrderStrategy::OccurrenceAscending,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Human,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Projection set file (variable ids); overrides "c ind" lines.
    #[arg(long, value_name = "FILE")]
    pub proj: Option<PathBuf>,
    /// Per-check conflict budget for definability queries (0 = unlimited).
    #[arg(long, default_value_t = DEFAULT_CONFLICT_LIMIT)]
    pub conflict_limit: u64,
    /// Variable order for the upper bound support search.
    #[arg(long, value_enum, default_value_t = StrategyArg::NonprojFirst)]
    pub strategy: StrategyArg,
    /// Preprocessing time limit in seconds.
    #[arg(long, default_value_t = DEFAULT_TIMEOUT_S)]
    pub timeout_pre: f64,
    /// Random seed. Required with --format json.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = FormatArg::Human)]
    pub format: FormatArg,
    /// Include wall-clock timings in JSON output.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FindSupportArgs {
    /// DIMACS CNF file.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Ubs)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct CountArgs {
    /// DIMACS CNF file.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Ubs)]
    pub mode: ModeArg,
    /// Tolerance of the approximate count.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Failure probability of the approximate count.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    /// Counting time limit in seconds.
    #[arg(long, default_value_t = DEFAULT_TIMEOUT_S)]
    pub timeout_count: f64,
    /// Count by enumeration instead of hashing.
    #[arg(long)]
    pub exact: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// DIMACS files with "c ind" lines. Without any, the built-in family
    /// suite is run.
    pub inputs: Vec<PathBuf>,
    /// Directory for records.jsonl and summary.csv, or for generated files.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Write the first extremal family instance of size N to DIR and exit.
    #[arg(long, value_name = "N")]
    pub gen_theorem1: Option<u32>,
    /// Write the second extremal family instance of size N to DIR and exit.
    #[arg(long, value_name = "N")]
    pub gen_theorem2: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_CONFLICT_LIMIT)]
    pub conflict_limit: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::NonprojFirst)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = DEFAULT_TIMEOUT_S)]
    pub timeout_pre: f64,
    #[arg(long, default_value_t = DEFAULT_TIMEOUT_S)]
    pub timeout_count: f64,
    /// Instances processed in parallel.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

/// Failure carrying an exit status and a message for stderr.
struct Fail(i32, String);

fn usage(msg: impl Into<String>) -> Fail {
    Fail(EXIT_USAGE, msg.into())
}

fn limit(n: u64) -> Option<u64> {
    (n > 0).then_some(n)
}

fn check_timeout(name: &str, secs: f64) -> Result<(), Fail> {
    if secs.is_nan() || secs < 0.0 {
        return Err(usage(format!("--{name} must be a nonnegative number of seconds")));
    }
    Ok(())
}

fn load(path: &Path, proj: Option<&Path>) -> Result<(Formula, ProjectionSet), Fail> {
    let bytes = std::fs::read(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let doc = dimacs::parse_bytes(&bytes)
        .map_err(|e| Fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let projection = match proj {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            dimacs::parse_projection_file(&text, doc.formula.num_vars())
                .map_err(|e| Fail(EXIT_PARSE, format!("{}: {e}", p.display())))?
        }
        None => doc.projection.ok_or_else(|| {
            usage(format!(
                "{}: no projection set (add \"c ind\" lines or pass --proj)",
                path.display()
            ))
        })?,
    };
    Ok((doc.formula, projection))
}

fn seed_of(common: &Common) -> Result<u64, Fail> {
    match (common.seed, common.format) {
        (Some(s), _) => Ok(s),
        (None, FormatArg::Json) => Err(usage("--format json requires --seed")),
        (None, FormatArg::Human) => Ok(0),
    }
}

fn ids(s: &VarSet) -> Vec<u32> {
    s.ids()
}

/// Ordered key/value report rendered as `key=value` lines or one JSON
/// object.
struct Report {
    fields: Vec<(&'static str, Value)>,
    timings: Vec<(&'static str, f64)>,
}

impl Report {
    fn new() -> Report {
        Report {
            fields: Vec::new(),
            timings: Vec::new(),
        }
    }

    fn put(&mut self, key: &'static str, v: impl Into<Value>) {
        self.fields.push((key, v.into()));
    }

    fn time(&mut self, key: &'static str, secs: f64) {
        self.timings.push((key, secs));
    }

    fn render(&self, format: FormatArg, timings: bool) -> String {
        match format {
            FormatArg::Human => {
                let mut out = String::new();
                for (k, v) in &self.fields {
                    let text = match v {
                        Value::String(s) => s.clone(),
                        Value::Array(a) => a
                            .iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(" "),
                        other => other.to_string(),
                    };
                    out.push_str(&format!("{k}={text}\n"));
                }
                for (k, t) in &self.timings {
                    out.push_str(&format!("{k}={t:.3}\n"));
                }
                out
            }
            FormatArg::Json => {
                let mut map = Map::new();
                for (k, v) in &self.fields {
                    map.insert((*k).to_string(), v.clone());
                }
                if timings {
                    for (k, t) in &self.timings {
                        map.insert((*k).to_string(), json!(t));
                    }
                }
                let mut s = serde_json::to_string(&Value::Object(map)).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

fn support_report(r: &mut Report, s: &SupportSet) {
    r.put("kind", s.kind.as_str());
    r.put("size", s.len());
    r.put("vars", ids(&s.vars));
    r.put("minimal", s.minimal);
    r.put("timed_out", s.timed_out);
}

fn compute_support(
    f: &Formula,
    p: &ProjectionSet,
    mode: ModeArg,
    common: &Common,
) -> Result<Option<SupportSet>, Fail> {
    let cfg = SolverConfig::default().with_conflict_limit(limit(common.conflict_limit));
    let deadline = WallDeadline::after_secs(common.timeout_pre);
    let found = match mode {
        ModeArg::Ubs => find_ubs(f, p, common.strategy.into(), &cfg, &deadline),
        ModeArg::Is => find_is(f, p, &cfg, &deadline),
        ModeArg::None => return Ok(None),
    };
    found
        .map(Some)
        .map_err(|e| usage(format!("support computation failed: {e}")))
}

fn cmd_find_support(a: &FindSupportArgs) -> Result<(String, i32), Fail> {
    check_timeout("timeout-pre", a.common.timeout_pre)?;
    let seed = seed_of(&a.common)?;
    if a.mode == ModeArg::None {
        return Err(usage("find-support needs --mode is or --mode ubs"));
    }
    let (f, p) = load(&a.input, a.common.proj.as_deref())?;
    let start = Instant::now();
    let s = compute_support(&f, &p, a.mode, &a.common)?.expect("mode is not none");
    let pre = start.elapsed().as_secs_f64();
    let mut r = Report::new();
    support_report(&mut r, &s);
    r.put("projection_size", p.len());
    r.put("seed", seed);
    r.time("pre_time_s", pre);
    let code = if s.timed_out { EXIT_PRE_TIMEOUT } else { EXIT_OK };
    Ok((r.render(a.common.format, a.common.timings), code))
}

fn cmd_count(a: &CountArgs) -> Result<(String, i32), Fail> {
    check_timeout("timeout-pre", a.common.timeout_pre)?;
    check_timeout("timeout-count", a.timeout_count)?;
    let seed = seed_of(&a.common)?;
    let pac = PacParams::new(a.epsilon, a.delta).map_err(|e| usage(e.to_string()))?;
    let (f, p) = load(&a.input, a.common.proj.as_deref())?;
    let mut r = Report::new();
    r.put("mode", match a.mode {
        ModeArg::Is => "IS",
        ModeArg::Ubs => "UBS",
        ModeArg::None => "none",
    });
    r.put("epsilon", pac.epsilon);
    r.put("delta", pac.delta);
    r.put("seed", seed);

    let counting = SolverConfig::unlimited();
    let start = Instant::now();
    let (support, fell_back) = if a.exact || a.mode != ModeArg::Ubs {
        match compute_support(&f, &p, a.mode, &a.common)? {
            Some(s) => {
                let t = s.timed_out;
                (s.vars, t)
            }
            None => (p.clone(), false),
        }
    } else {
        let job = UbCountJob {
            strategy: a.common.strategy.into(),
            definability: SolverConfig::default()
                .with_conflict_limit(limit(a.common.conflict_limit)),
            counting: counting.clone(),
            pac,
            seed,
        };
        let pre_deadline = WallDeadline::after_secs(a.common.timeout_pre);
        let mut pre_time = 0.0;
        let mut count_start = start;
        let res = ubcount(&f, &p, &job, &pre_deadline, || {
            pre_time = start.elapsed().as_secs_f64();
            count_start = Instant::now();
            WallDeadline::after_secs(a.timeout_count)
        })
        .map_err(|e| usage(e.to_string()))?;
        r.put("support_size", res.support.len());
        r.put("support_timed_out", res.support.timed_out);
        r.put("fell_back", res.fell_back);
        r.put("exact", res.count.as_ref().map(|c| c.exact).unwrap_or(false));
        r.time("pre_time_s", pre_time);
        r.time("count_time_s", count_start.elapsed().as_secs_f64());
        let code = match &res.count {
            Ok(c) => {
                r.put("count", c.to_string());
                if res.support.timed_out { EXIT_PRE_TIMEOUT } else { EXIT_OK }
            }
            Err(e) => {
                r.put("count", Value::Null);
                r.put("status", count_status(e));
                EXIT_COUNT_TIMEOUT
            }
        };
        return Ok((r.render(a.common.format, a.common.timings), code));
    };
    let pre_time = start.elapsed().as_secs_f64();
    r.put("support_size", support.len());
    r.put("support_timed_out", fell_back);
    r.put("fell_back", false);

    let start = Instant::now();
    let deadline = WallDeadline::after_secs(a.timeout_count);
    let count = if a.exact {
        count_exact_projected(&f, &support, None, &counting, &deadline)
            .map(|c| format!("{}*2^0", c.value))
    } else {
        approx_count(&f, &support, pac, seed, &counting, &deadline).map(|c| {
            r.put("exact", c.exact);
            c.to_string()
        })
    };
    if a.exact {
        r.put("exact", true);
    }
    r.time("pre_time_s", pre_time);
    r.time("count_time_s", start.elapsed().as_secs_f64());
    let code = match count {
        Ok(c) => {
            r.put("count", c);
            if fell_back { EXIT_PRE_TIMEOUT } else { EXIT_OK }
        }
        Err(e) => {
            if !a.exact {
                r.put("exact", false);
            }
            r.put("count", Value::Null);
            r.put("status", count_status(&e));
            EXIT_COUNT_TIMEOUT
        }
    };
    Ok((r.render(a.common.format, a.common.timings), code))
}

fn count_status(e: &CountError) -> String {
    match e {
        CountError::Timeout => "timeout".into(),
        other => other.to_string(),
    }
}

fn cmd_bench(a: &BenchArgs) -> Result<(String, i32), Fail> {
    check_timeout("timeout-pre", a.timeout_pre)?;
    check_timeout("timeout-count", a.timeout_count)?;
    if a.gen_theorem1.is_some() || a.gen_theorem2.is_some() {
        let mut out = String::new();
        std::fs::create_dir_all(&a.out)
            .map_err(|e| usage(format!("cannot create {}: {e}", a.out.display())))?;
        for (n, gen) in [
            (a.gen_theorem1, gen_theorem1 as fn(u32) -> Result<FamilyInstance, FamilyError>),
            (a.gen_theorem2, gen_theorem2),
        ] {
            let Some(n) = n else { continue };
            let inst = gen(n).map_err(|e| usage(e.to_string()))?;
            let text = dimacs::emit(&inst.formula, Some(&inst.projection), XorPolicy::Reject)
                .expect("families are plain CNF");
            let path = a.out.join(format!("{}.cnf", inst.name));
            std::fs::write(&path, text)
                .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            out.push_str(&format!("wrote={}\n", path.display()));
        }
        return Ok((out, EXIT_OK));
    }
    let pac = PacParams::new(a.epsilon, a.delta).map_err(|e| usage(e.to_string()))?;
    let instances = if a.inputs.is_empty() {
        bench::family_suite()
    } else {
        let mut v = Vec::new();
        for path in &a.inputs {
            let (formula, projection) = load(path, None)?;
            v.push(BenchInstance {
                id: path.display().to_string(),
                formula,
                projection,
            });
        }
        v
    };
    let cfg = CompareConfig {
        pac,
        seed: a.seed,
        conflict_limit: limit(a.conflict_limit),
        strategy: a.strategy.into(),
        timeout_pre: Duration::from_secs_f64(a.timeout_pre),
        timeout_count: Duration::from_secs_f64(a.timeout_count),
        workers: a.workers,
    };
    let records = bench::compare_run(&instances, &cfg);
    bench::write_results(&a.out, &records)
        .map_err(|e| usage(format!("cannot write results to {}: {e}", a.out.display())))?;
    let timeout = cfg.timeout_pre + cfg.timeout_count;
    let s = bench::summarize(&records, timeout);
    let opt = |x: Option<f64>| x.map_or("NA".to_string(), |v| format!("{v:.6}"));
    let mut out = String::new();
    out.push_str(&format!("instances={}\n", s.instances));
    out.push_str(&format!("records={}\n", records.len()));
    out.push_str(&format!("solved_is={}\n", s.solved_is));
    out.push_str(&format!("solved_ubs={}\n", s.solved_ubs));
    out.push_str(&format!("par2_is={}\n", opt(s.par2_is)));
    out.push_str(&format!("par2_ubs={}\n", opt(s.par2_ubs)));
    out.push_str(&format!(
        "geomean_abs_error={}\n",
        opt(s.geomean_abs_error.map(|g| g.value))
    ));
    out.push_str(&format!(
        "geomean_zero_substitutions={}\n",
        s.geomean_abs_error.map_or(0, |g| g.substitutions)
    ));
    out.push_str(&format!("mean_signed_error={}\n", opt(s.mean_signed_error)));
    out.push_str(&format!("out={}\n", a.out.display()));
    Ok((out, EXIT_OK))
}

/// Parses `args` (program name first), runs the command, writes the
/// result to `out` and diagnostics to `err`, and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::FindSupport(a) => cmd_find_support(a),
        Command::Count(a) => cmd_count(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            let _ = out.flush();
            code
        }
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}
