//! Evaluation harness: the log-ratio error between two counts, PAR-2
//! scoring, aggregate error statistics, and a runner comparing the
//! independent-support pipeline against upper-bound counting.

use std::io::{self, BufRead, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use ubcount_core::{
    approx_count, find_is, gen_theorem1, gen_theorem2, ubcount, ApproxCount, CountError, Formula,
    PacParams, ProjectionSet, SolverConfig, UbCountJob, VarOrderStrategy,
};

use crate::deadline::WallDeadline;

/// Floor substituted for zero entries in [`geomean_abs`].
pub const GEOMEAN_FLOOR: f64 = 1.0 / 1024.0;

/// Which support a run counted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "IS")]
    Is,
    #[serde(rename = "UBS")]
    Ubs,
    #[serde(rename = "none")]
    None,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Is => "IS",
            Mode::Ubs => "UBS",
            Mode::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Solved,
    Timeout,
    Memout,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::Timeout => "timeout",
            Status::Memout => "memout",
        }
    }
}

/// A count as `mantissa * 2^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountValue {
    pub mantissa: u64,
    pub exponent: u32,
}

impl CountValue {
    pub fn log2(self) -> f64 {
        if self.mantissa == 0 {
            f64::NEG_INFINITY
        } else {
            (self.mantissa as f64).log2() + f64::from(self.exponent)
        }
    }
}

impl From<&ApproxCount> for CountValue {
    fn from(c: &ApproxCount) -> Self {
        CountValue {
            mantissa: c.mantissa,
            exponent: c.exponent,
        }
    }
}

/// One pipeline run on one instance. Written one per line as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub mode: Mode,
    pub support_size: usize,
    pub pre_time_s: f64,
    pub count_time_s: f64,
    pub status: Status,
    pub count: Option<CountValue>,
}

impl RunRecord {
    pub fn elapsed_s(&self) -> f64 {
        self.pre_time_s + self.count_time_s
    }
}

/// `log₂ c_ubs − log₂ c_is`. A zero count on one side gives a signed
/// infinity; two zero counts compare equal.
pub fn error_metric(c_ubs: CountValue, c_is: CountValue) -> f64 {
    match (c_ubs.mantissa == 0, c_is.mantissa == 0) {
        (true, true) => 0.0,
        (true, false) => f64::NEG_INFINITY,
        (false, true) => f64::INFINITY,
        (false, false) => c_ubs.log2() - c_is.log2(),
    }
}

/// Mean score with unsolved runs charged `2 * timeout`. `None` on an
/// empty list.
pub fn par2(records: &[RunRecord], timeout: Duration) -> Option<f64> {
    if records.is_empty() {
        return None;
    }
    let t = timeout.as_secs_f64();
    let total: f64 = records
        .iter()
        .map(|r| match r.status {
            Status::Solved => r.elapsed_s(),
            _ => 2.0 * t,
        })
        .sum();
    Some(total / records.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoMean {
    pub value: f64,
    /// Zero entries replaced by [`GEOMEAN_FLOOR`].
    pub substitutions: usize,
    /// Non-finite entries left out.
    pub excluded: usize,
}

/// Geometric mean of `|e|`. Zeros become [`GEOMEAN_FLOOR`]; infinities and
/// NaN are excluded. `None` when nothing is left.
pub fn geomean_abs(errors: &[f64]) -> Option<GeoMean> {
    let mut sum = 0.0;
    let mut n = 0usize;
    let mut substitutions = 0;
    let mut excluded = 0;
    for &e in errors {
        if !e.is_finite() {
            excluded += 1;
            continue;
        }
        let mut a = e.abs();
        if a == 0.0 {
            a = GEOMEAN_FLOOR;
            substitutions += 1;
        }
        sum += a.ln();
        n += 1;
    }
    (n > 0).then(|| GeoMean {
        value: (sum / n as f64).exp(),
        substitutions,
        excluded,
    })
}

/// Arithmetic mean of the finite signed errors.
pub fn mean_signed(errors: &[f64]) -> Option<f64> {
    let finite: Vec<f64> = errors.iter().copied().filter(|e| e.is_finite()).collect();
    (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchInstance {
    pub id: String,
    pub formula: Formula,
    pub projection: ProjectionSet,
}

/// The two extremal families for `n = 4, 8, 16, 32`.
pub fn family_suite() -> Vec<BenchInstance> {
    let mut out = Vec::new();
    for n in [4u32, 8, 16, 32] {
        for inst in [gen_theorem1(n), gen_theorem2(n)] {
            let inst = inst.expect("valid family size");
            out.push(BenchInstance {
                id: inst.name,
                formula: inst.formula,
                projection: inst.projection,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub pac: PacParams,
    pub seed: u64,
    pub conflict_limit: Option<u64>,
    pub strategy: VarOrderStrategy,
    pub timeout_pre: Duration,
    pub timeout_count: Duration,
    pub workers: usize,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            pac: PacParams::default(),
            seed: 0,
            conflict_limit: Some(ubcount_core::sat::DEFAULT_CONFLICT_LIMIT),
            strategy: VarOrderStrategy::default(),
            timeout_pre: Duration::from_secs(5000),
            timeout_count: Duration::from_secs(5000),
            workers: 1,
        }
    }
}

fn status_of(r: &Result<ApproxCount, CountError>) -> (Status, Option<CountValue>) {
    match r {
        Ok(c) => (Status::Solved, Some(c.into())),
        Err(_) => (Status::Timeout, None),
    }
}

fn run_is(inst: &BenchInstance, cfg: &CompareConfig) -> RunRecord {
    let defin = SolverConfig::default().with_conflict_limit(cfg.conflict_limit);
    let start = Instant::now();
    let pre = WallDeadline::after(cfg.timeout_pre);
    let support = find_is(&inst.formula, &inst.projection, &defin, &pre)
        .map(|s| s.vars)
        .unwrap_or_else(|_| inst.projection.clone());
    let pre_time_s = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let deadline = WallDeadline::after(cfg.timeout_count);
    let count = approx_count(
        &inst.formula,
        &support,
        cfg.pac,
        cfg.seed,
        &SolverConfig::unlimited(),
        &deadline,
    );
    let (status, count) = status_of(&count);
    RunRecord {
        instance: inst.id.clone(),
        mode: Mode::Is,
        support_size: support.len(),
        pre_time_s,
        count_time_s: start.elapsed().as_secs_f64(),
        status,
        count,
    }
}

fn run_ubs(inst: &BenchInstance, cfg: &CompareConfig) -> RunRecord {
    let job = UbCountJob {
        strategy: cfg.strategy,
        definability: SolverConfig::default().with_conflict_limit(cfg.conflict_limit),
        counting: SolverConfig::unlimited(),
        pac: cfg.pac,
        seed: cfg.seed,
    };
    let start = Instant::now();
    let pre = WallDeadline::after(cfg.timeout_pre);
    let mut pre_time_s = 0.0;
    let mut count_start = start;
    let result = ubcount(&inst.formula, &inst.projection, &job, &pre, || {
        pre_time_s = start.elapsed().as_secs_f64();
        count_start = Instant::now();
        WallDeadline::after(cfg.timeout_count)
    });
    let count_time_s = count_start.elapsed().as_secs_f64();
    match result {
        Ok(r) => {
            let (status, count) = status_of(&r.count);
            RunRecord {
                instance: inst.id.clone(),
                mode: Mode::Ubs,
                support_size: r.support.len(),
                pre_time_s,
                count_time_s,
                status,
                count,
            }
        }
        Err(_) => RunRecord {
            instance: inst.id.clone(),
            mode: Mode::Ubs,
            support_size: inst.projection.len(),
            pre_time_s: start.elapsed().as_secs_f64(),
            count_time_s: 0.0,
            status: Status::Timeout,
            count: None,
        },
    }
}

/// Runs both pipelines on every instance, using `cfg.workers` threads.
/// Records come back ordered by instance id, IS before UBS.
pub fn compare_run(instances: &[BenchInstance], cfg: &CompareConfig) -> Vec<RunRecord> {
    let next = AtomicUsize::new(0);
    let out = Mutex::new(Vec::with_capacity(instances.len() * 2));
    std::thread::scope(|scope| {
        for _ in 0..cfg.workers.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(inst) = instances.get(i) else { break };
                let pair = [run_is(inst, cfg), run_ubs(inst, cfg)];
                out.lock().expect("worker panicked").extend(pair);
            });
        }
    });
    let mut records = out.into_inner().expect("worker panicked");
    records.sort_by(|a, b| a.instance.cmp(&b.instance).then(a.mode.cmp(&b.mode)));
    records
}

/// Error per instance solved by both pipelines, in instance order.
pub fn paired_errors(records: &[RunRecord]) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for r in records.iter().filter(|r| r.mode == Mode::Ubs) {
        let is = records
            .iter()
            .find(|o| o.mode == Mode::Is && o.instance == r.instance);
        if let (Some(u), Some(i)) = (r.count, is.and_then(|o| o.count)) {
            out.push((r.instance.clone(), error_metric(u, i)));
        }
    }
    out
}

pub fn write_jsonl<W: Write>(mut w: W, records: &[RunRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> io::Result<Vec<RunRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    instance: &'a str,
    mode: &'static str,
    support_size: usize,
    pre_time_s: f64,
    count_time_s: f64,
    status: &'static str,
    mantissa: Option<u64>,
    exponent: Option<u32>,
    error: Option<f64>,
}

/// CSV summary, one row per record. The error column is filled on UBS
/// rows whose instance was solved by both pipelines.
pub fn write_csv<W: Write>(w: W, records: &[RunRecord]) -> csv::Result<()> {
    let errors = paired_errors(records);
    let mut wr = csv::Writer::from_writer(w);
    for r in records {
        let error = (r.mode == Mode::Ubs)
            .then(|| errors.iter().find(|(id, _)| *id == r.instance).map(|e| e.1))
            .flatten();
        wr.serialize(CsvRow {
            instance: &r.instance,
            mode: r.mode.as_str(),
            support_size: r.support_size,
            pre_time_s: r.pre_time_s,
            count_time_s: r.count_time_s,
            status: r.status.as_str(),
            mantissa: r.count.map(|c| c.mantissa),
            exponent: r.count.map(|c| c.exponent),
            error,
        })?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub instances: usize,
    pub solved_is: usize,
    pub solved_ubs: usize,
    pub par2_is: Option<f64>,
    pub par2_ubs: Option<f64>,
    pub geomean_abs_error: Option<GeoMean>,
    pub mean_signed_error: Option<f64>,
}

pub fn summarize(records: &[RunRecord], timeout: Duration) -> Summary {
    let of = |m: Mode| records.iter().filter(|r| r.mode == m).cloned().collect::<Vec<_>>();
    let (is, ubs) = (of(Mode::Is), of(Mode::Ubs));
    let solved = |rs: &[RunRecord]| rs.iter().filter(|r| r.status == Status::Solved).count();
    let errors: Vec<f64> = paired_errors(records).into_iter().map(|e| e.1).collect();
    Summary {
        instances: is.len().max(ubs.len()),
        solved_is: solved(&is),
        solved_ubs: solved(&ubs),
        par2_is: par2(&is, timeout),
        par2_ubs: par2(&ubs, timeout),
        geomean_abs_error: geomean_abs(&errors),
        mean_signed_error: mean_signed(&errors),
    }
}

/// Writes `records.jsonl` and `summary.csv` under `dir`.
pub fn write_results(dir: &Path, records: &[RunRecord]) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    write_jsonl(
        io::BufWriter::new(std::fs::File::create(dir.join("records.jsonl"))?),
        records,
    )?;
    write_csv(std::fs::File::create(dir.join("summary.csv"))?, records)
        .map_err(io::Error::other)?;
    Ok(())
}
