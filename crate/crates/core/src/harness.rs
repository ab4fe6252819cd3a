//! Experiment grids: (instance × seed) cells run in parallel, one CSV row
//! per cell, plus summary statistics of the milestone counts.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algorithms::{self, Algorithm, Milestones, Representation, RunSpec, Targets, TracePoint};
use crate::edge::DEFAULT_COVER_BUDGET;
use crate::error::{Error, Result};
use crate::gen;
use crate::graph::Instance;
use crate::oracle::{self, DEFAULT_ENUMERATION_BOUND};

/// Environment variable holding the worker thread count.
pub const WORKERS_ENV: &str = "TWOHOP_WORKERS";

/// Hard cap on default budgets.
pub const BUDGET_CAP: u64 = 100_000_000;

/// Below this size the optimum is computed even when no target needs it,
/// so the ratio column is filled in.
pub const AUTO_ORACLE_N: usize = 16;

pub const CSV_HEADER: [&str; 15] = [
    "config_hash",
    "algo",
    "n",
    "m",
    "p1",
    "instance_id",
    "seed",
    "budget",
    "eval_feasible",
    "eval_ratio32",
    "eval_opt",
    "final_cost",
    "opt_cost",
    "ratio",
    "wall_ms",
];

const NOT_REACHED: &str = "NOT_REACHED";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceSource {
    /// `count` i.i.d. instances; instance `i` is drawn from a seed derived
    /// from `seed` and `i`.
    Random {
        n: usize,
        p1: f64,
        count: usize,
        seed: u64,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algo: Algorithm,
    pub representation: Representation,
    pub instances: InstanceSource,
    pub seeds: Vec<u64>,
    pub budget: u64,
    pub targets: Targets,
    #[serde(default)]
    pub trace_every: Option<u64>,
    #[serde(default = "default_cover_budget")]
    pub cover_budget: u64,
    #[serde(default = "default_oracle_bound")]
    pub oracle_bound: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_cover_budget() -> u64 {
    DEFAULT_COVER_BUDGET
}

fn default_oracle_bound() -> usize {
    DEFAULT_ENUMERATION_BOUND
}

/// The fields that determine every record except seed and timing.
#[derive(Serialize)]
struct HashedFields<'a> {
    algo: Algorithm,
    representation: Representation,
    instances: &'a InstanceSource,
    budget: u64,
    targets: Targets,
    trace_every: Option<u64>,
    cover_budget: u64,
    oracle_bound: usize,
}

impl ExperimentConfig {
    pub fn new(algo: Algorithm, instances: InstanceSource, seeds: Vec<u64>, budget: u64, targets: Targets) -> Self {
        Self {
            algo,
            representation: algo.representation(),
            instances,
            seeds,
            budget,
            targets,
            trace_every: None,
            cover_budget: DEFAULT_COVER_BUDGET,
            oracle_bound: DEFAULT_ENUMERATION_BOUND,
            out: None,
        }
    }

    fn spec(&self) -> RunSpec {
        RunSpec {
            algo: self.algo,
            representation: self.representation,
            budget: self.budget,
            targets: self.targets,
            trace_every: self.trace_every,
            check_invariants: false,
            cover_budget: self.cover_budget,
        }
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON of every
    /// field except the seed list and the output path.
    pub fn hash(&self) -> String {
        let fields = HashedFields {
            algo: self.algo,
            representation: self.representation,
            instances: &self.instances,
            budget: self.budget,
            targets: self.targets,
            trace_every: self.trace_every,
            cover_budget: self.cover_budget,
            oracle_bound: self.oracle_bound,
        };
        let json = serde_json::to_string(&fields).expect("config serializes");
        hex::encode(&Sha256::digest(json.as_bytes())[..8])
    }

    /// Checked before any run starts.
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("no seeds".into()));
        }
        let mut spec = self.spec();
        // the oracle check below replaces the run-level one
        spec.targets = Targets::default();
        spec.validate(None)?;
        match &self.instances {
            InstanceSource::Random { n, p1, count, .. } => {
                if *n == 0 || *count == 0 {
                    return Err(Error::Config("need n >= 1 and at least one instance".into()));
                }
                if !(0.0..=1.0).contains(p1) {
                    return Err(Error::Config(format!("p1 must lie in [0, 1], got {p1}")));
                }
                if self.targets.needs_oracle() && *n > self.oracle_bound {
                    return Err(Error::Config(format!(
                        "targets {} need the exact optimum, which is limited to n <= {}",
                        self.targets, self.oracle_bound
                    )));
                }
            }
            InstanceSource::File { path } => {
                if path.as_os_str().is_empty() {
                    return Err(Error::Config("empty instance path".into()));
                }
            }
        }
        Ok(())
    }

    /// Instances in id order.
    pub fn instances(&self) -> Result<Vec<Instance>> {
        match &self.instances {
            InstanceSource::Random { n, p1, count, seed } => {
                (0..*count).map(|i| gen::random_instance(*n, *p1, instance_seed(*seed, i))).collect()
            }
            InstanceSource::File { path } => {
                let inst = Instance::parse(&fs::read_to_string(path)?)?;
                if self.targets.needs_oracle() && inst.n() > self.oracle_bound {
                    return Err(Error::Config(format!(
                        "{}: n = {} is beyond the oracle bound",
                        path.display(),
                        inst.n()
                    )));
                }
                Ok(vec![inst])
            }
        }
    }

    fn p1(&self) -> Option<f64> {
        match self.instances {
            InstanceSource::Random { p1, .. } => Some(p1),
            InstanceSource::File { .. } => None,
        }
    }

    fn wants_oracle(&self, n: usize) -> bool {
        self.targets.needs_oracle() || n <= AUTO_ORACLE_N.min(self.oracle_bound)
    }
}

/// Seed of random instance `i` in a family seeded with `base`. Kept on a
/// separate ChaCha stream so instance and run seeds never share a keystream.
pub fn instance_seed(base: u64, i: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(i as u64 + 1);
    rng.next_u64()
}

/// Default budget for a target set: the bound shape of the slowest
/// requested target times 100, capped at [`BUDGET_CAP`].
pub fn default_budget(algo: Algorithm, n: usize, targets: Targets) -> u64 {
    let n64 = n.max(2) as u64;
    let m = n64 * (n64 + 1) / 2;
    let ln = (n64 as f64).ln().ceil() as u64;
    let pow = |b: u64, e: u32| b.saturating_pow(e);
    let feasible = match algo {
        Algorithm::EaEdge | Algorithm::Gsemo2 => m * ln,
        Algorithm::Gsemo => m * n64 * ln,
        Algorithm::Gsemo1 => m * n64,
        Algorithm::EaVertex => pow(n64, 4),
    };
    let ratio = match algo {
        Algorithm::EaEdge | Algorithm::Gsemo1 => pow(m, 6).saturating_mul(n64),
        Algorithm::Gsemo => pow(m, 6).saturating_mul(n64 * n64),
        Algorithm::Gsemo2 => pow(m, 4).saturating_mul(n64),
        Algorithm::EaVertex => pow(n64, 4),
    };
    let shape = if targets.ratio32 || targets.optimal { ratio.max(feasible) } else { feasible };
    shape.saturating_mul(100).min(BUDGET_CAP)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub algo: Algorithm,
    pub n: usize,
    pub m: usize,
    pub p1: Option<f64>,
    pub instance_id: usize,
    pub seed: u64,
    pub budget: u64,
    pub milestones: Milestones,
    pub final_cost: Option<u64>,
    pub opt_cost: Option<u64>,
    pub ratio: Option<f64>,
    pub wall_ms: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TracePoint>,
}

impl RunRecord {
    /// Equality ignoring wall time and trace.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        let strip = |r: &RunRecord| RunRecord { wall_ms: 0, trace: Vec::new(), ..r.clone() };
        strip(self) == strip(other)
    }
}

fn run_cell(
    cfg: &ExperimentConfig,
    hash: &str,
    inst: &Instance,
    instance_id: usize,
    opt: Option<u64>,
    seed: u64,
) -> Result<RunRecord> {
    let start = Instant::now();
    let out = algorithms::run(&cfg.spec(), inst, seed, opt)?;
    let ratio = match (out.final_cost, opt) {
        (Some(c), Some(o)) => Some(c as f64 / o as f64),
        _ => None,
    };
    Ok(RunRecord {
        config_hash: hash.to_string(),
        algo: cfg.algo,
        n: inst.n(),
        m: inst.m(),
        p1: cfg.p1(),
        instance_id,
        seed,
        budget: cfg.budget,
        milestones: out.milestones,
        final_cost: out.final_cost,
        opt_cost: opt,
        ratio,
        wall_ms: start.elapsed().as_millis() as u64,
        trace: out.trace,
    })
}

/// Worker count from [`WORKERS_ENV`], else rayon's default.
pub fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(k),
            _ => Err(Error::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(rayon::current_num_threads()),
    }
}

fn pool() -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(worker_count()?).build().map_err(|e| Error::Config(e.to_string()))
}

/// Optima of the instances the config wants them for, `None` elsewhere.
fn optima(cfg: &ExperimentConfig, instances: &[Instance]) -> Result<Vec<Option<u64>>> {
    instances
        .iter()
        .map(|inst| {
            if cfg.wants_oracle(inst.n()) {
                Ok(Some(oracle::optimum_with_bound(inst, cfg.oracle_bound)?.cost))
            } else {
                Ok(None)
            }
        })
        .collect()
}

/// Runs every (instance, seed) cell; records come back ordered by instance
/// id, then by position in the seed list. Writes the CSV, a manifest for
/// replay and, if tracing, a JSON-lines trace file next to `cfg.out`.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let hash = cfg.hash();
    let instances = cfg.instances()?;
    let opts = optima(cfg, &instances)?;
    let cells: Vec<(usize, u64)> = (0..instances.len()).flat_map(|i| cfg.seeds.iter().map(move |&s| (i, s))).collect();
    let records: Vec<RunRecord> = pool()?.install(|| {
        cells.par_iter().map(|&(i, seed)| run_cell(cfg, &hash, &instances[i], i, opts[i], seed)).collect::<Result<_>>()
    })?;
    if let Some(out) = &cfg.out {
        write_csv(out, &records)?;
        let mut registry = ConfigRegistry::load_or_default(&manifest_path(out))?;
        registry.insert(cfg);
        registry.save(&manifest_path(out))?;
        if cfg.trace_every.is_some() {
            let lines: Vec<String> = records
                .iter()
                .map(|r| serde_json::to_string(r).map_err(|e| Error::Io(e.to_string())))
                .collect::<Result<_>>()?;
            fs::write(out.with_extension("trace.jsonl"), lines.join("\n") + "\n")?;
        }
    }
    Ok(records)
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Configs by hash, for replaying individual records.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigRegistry {
    configs: BTreeMap<String, ExperimentConfig>,
}

impl ConfigRegistry {
    pub fn insert(&mut self, cfg: &ExperimentConfig) -> String {
        let hash = cfg.hash();
        self.configs.insert(hash.clone(), cfg.clone());
        hash
    }

    pub fn get(&self, hash: &str) -> Option<&ExperimentConfig> {
        self.configs.get(hash)
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn load_or_default(path: &Path) -> Result<Self> {
        match fs::read_to_string(path) {
            Ok(text) => {
                serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(path, text + "\n")?;
        Ok(())
    }

    /// Re-executes one cell from its config hash.
    pub fn replay(&self, hash: &str, instance_id: usize, seed: u64) -> Result<RunRecord> {
        let cfg = self.get(hash).ok_or_else(|| Error::Config(format!("unknown config hash {hash}")))?;
        let instances = cfg.instances()?;
        let inst = instances
            .get(instance_id)
            .ok_or_else(|| Error::Config(format!("config {hash} has no instance {instance_id}")))?;
        let opt = optima(cfg, std::slice::from_ref(inst))?[0];
        run_cell(cfg, hash, inst, instance_id, opt, seed)
    }
}

fn opt_field<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn milestone_field(v: Option<u64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_else(|| NOT_REACHED.to_string())
}

pub fn csv_string(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.config_hash.clone(),
            r.algo.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            opt_field(r.p1),
            r.instance_id.to_string(),
            r.seed.to_string(),
            r.budget.to_string(),
            milestone_field(r.milestones.feasible),
            milestone_field(r.milestones.ratio32),
            milestone_field(r.milestones.optimal),
            opt_field(r.final_cost),
            opt_field(r.opt_cost),
            opt_field(r.ratio),
            r.wall_ms.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    fs::write(path, csv_string(records)?)?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let headers = rd.headers().map_err(|e| Error::Parse { line: 1, message: e.to_string() })?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(Error::Parse { line: 1, message: format!("unexpected header {headers:?}") });
    }
    let mut out = Vec::new();
    for (k, row) in rd.records().enumerate() {
        let line = k + 2;
        let row = row.map_err(|e| Error::Parse { line, message: e.to_string() })?;
        let bad = |col: &str, v: &str| Error::Parse { line, message: format!("bad {col} `{v}`") };
        let num = |i: usize| -> Result<u64> { row[i].parse().map_err(|_| bad(CSV_HEADER[i], &row[i])) };
        let maybe = |i: usize| -> Result<Option<u64>> {
            if row[i].is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        let maybe_f = |i: usize| -> Result<Option<f64>> {
            if row[i].is_empty() {
                Ok(None)
            } else {
                row[i].parse().map(Some).map_err(|_| bad(CSV_HEADER[i], &row[i]))
            }
        };
        let milestone = |i: usize| -> Result<Option<u64>> {
            if &row[i] == NOT_REACHED {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        out.push(RunRecord {
            config_hash: row[0].to_string(),
            algo: row[1].parse()?,
            n: num(2)? as usize,
            m: num(3)? as usize,
            p1: maybe_f(4)?,
            instance_id: num(5)? as usize,
            seed: num(6)?,
            budget: num(7)?,
            milestones: Milestones { feasible: milestone(8)?, ratio32: milestone(9)?, optimal: milestone(10)? },
            final_cost: maybe(11)?,
            opt_cost: maybe(12)?,
            ratio: maybe_f(13)?,
            wall_ms: num(14)?,
            trace: Vec::new(),
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Feasible,
    Ratio32,
    Optimal,
}

impl Target {
    pub const ALL: [Target; 3] = [Target::Feasible, Target::Ratio32, Target::Optimal];

    pub fn of(self, m: &Milestones) -> Option<u64> {
        match self {
            Target::Feasible => m.feasible,
            Target::Ratio32 => m.ratio32,
            Target::Optimal => m.optimal,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Feasible => "feasible",
            Target::Ratio32 => "ratio32",
            Target::Optimal => "optimal",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub algo: Algorithm,
    pub target: Target,
    pub n: usize,
    pub m: usize,
    pub runs: usize,
    pub reached: usize,
    /// Over reached runs only.
    pub median: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
}

/// Least-squares slope of `ln(median)` against `ln(m)`, with a 95% normal band.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub algo: Algorithm,
    pub target: Target,
    pub points: usize,
    pub slope: f64,
    pub std_err: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    pub slopes: Vec<SlopeFit>,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Returns `(slope, standard error)`; the error is 0 for two points.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let k = xs.len();
    if k < 2 || ys.len() != k {
        return None;
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let se = if k > 2 {
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
        (rss / (k - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Some((slope, se))
}

pub fn summarize(records: &[RunRecord]) -> Summary {
    let mut groups: BTreeMap<(Algorithm, Target, usize), (usize, Vec<f64>, usize)> = BTreeMap::new();
    for r in records {
        for t in Target::ALL {
            let g = groups.entry((r.algo, t, r.n)).or_insert((r.m, Vec::new(), 0));
            g.2 += 1;
            if let Some(v) = t.of(&r.milestones) {
                g.1.push(v as f64);
            }
        }
    }
    let mut summary = Summary::default();
    for ((algo, target, n), (m, mut vals, runs)) in groups {
        if vals.is_empty() {
            // targets nobody reached are omitted, not reported as zeros
            continue;
        }
        vals.sort_by(f64::total_cmp);
        summary.rows.push(SummaryRow {
            algo,
            target,
            n,
            m,
            runs,
            reached: vals.len(),
            median: Some(quantile(&vals, 0.5)),
            q1: Some(quantile(&vals, 0.25)),
            q3: Some(quantile(&vals, 0.75)),
        });
    }
    let mut series: BTreeMap<(Algorithm, Target), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for row in &summary.rows {
        if let Some(med) = row.median.filter(|&v| v > 0.0) {
            let s = series.entry((row.algo, row.target)).or_default();
            s.0.push((row.m as f64).ln());
            s.1.push(med.ln());
        }
    }
    for ((algo, target), (xs, ys)) in series {
        if let Some((slope, se)) = ols_slope(&xs, &ys) {
            summary.slopes.push(SlopeFit {
                algo,
                target,
                points: xs.len(),
                slope,
                std_err: se,
                lo: slope - 1.96 * se,
                hi: slope + 1.96 * se,
            });
        }
    }
    summary
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = |v: Option<f64>| v.map(|v| format!("{v:.1}")).unwrap_or_else(|| "-".into());
        writeln!(
            f,
            "{:<10} {:<9} {:>4} {:>6} {:>9} {:>12} {:>12} {:>12}",
            "algo", "target", "n", "m", "reached", "median", "q1", "q3"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<10} {:<9} {:>4} {:>6} {:>4}/{:<4} {:>12} {:>12} {:>12}",
                r.algo.name(),
                r.target.to_string(),
                r.n,
                r.m,
                r.reached,
                r.runs,
                cell(r.median),
                cell(r.q1),
                cell(r.q3)
            )?;
        }
        if !self.slopes.is_empty() {
            writeln!(f)?;
            writeln!(f, "{:<10} {:<9} {:>6} {:>8} {:>18}", "algo", "target", "points", "slope", "95% band")?;
            for s in &self.slopes {
                writeln!(
                    f,
                    "{:<10} {:<9} {:>6} {:>8.3} {:>8.3} .. {:<8.3}",
                    s.algo.name(),
                    s.target.to_string(),
                    s.points,
                    s.slope,
                    s.lo,
                    s.hi
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_cfg(
        algo: Algorithm,
        n: usize,
        count: usize,
        seeds: Vec<u64>,
        budget: u64,
        targets: Targets,
    ) -> ExperimentConfig {
        ExperimentConfig::new(algo, InstanceSource::Random { n, p1: 0.5, count, seed: 3 }, seeds, budget, targets)
    }

    fn synthetic(algo: Algorithm, n: usize, feasible: u64) -> RunRecord {
        RunRecord {
            config_hash: "x".into(),
            algo,
            n,
            m: n * (n + 1) / 2,
            p1: Some(0.5),
            instance_id: 0,
            seed: 0,
            budget: 1,
            milestones: Milestones { feasible: Some(feasible), ratio32: None, optimal: None },
            final_cost: None,
            opt_cost: None,
            ratio: None,
            wall_ms: 0,
            trace: Vec::new(),
        }
    }

    #[test]
    fn budget_one_gives_initial_evaluation_only() {
        let cfg = random_cfg(Algorithm::EaEdge, 6, 1, vec![1], 1, Targets::FEASIBLE);
        let recs = run_grid(&cfg).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].milestones.feasible.is_none_or(|e| e == 1));
        assert_eq!(recs[0].opt_cost, Some(oracle::optimum(&cfg.instances().unwrap()[0]).unwrap().cost));
    }

    #[test]
    fn identical_configs_give_identical_csv() {
        let cfg = random_cfg(Algorithm::Gsemo2, 8, 2, vec![1, 2, 3], 5_000, Targets::ALL);
        let strip = |recs: Vec<RunRecord>| recs.into_iter().map(|r| RunRecord { wall_ms: 0, ..r }).collect::<Vec<_>>();
        let a = csv_string(&strip(run_grid(&cfg).unwrap())).unwrap();
        let b = csv_string(&strip(run_grid(&cfg).unwrap())).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 7);
        assert!(a.starts_with("config_hash,algo,n,m,p1,instance_id,seed,budget,eval_feasible,eval_ratio32,eval_opt,final_cost,opt_cost,ratio,wall_ms\n"));
    }

    #[test]
    fn csv_round_trip() {
        let cfg = random_cfg(Algorithm::EaVertex, 7, 2, vec![5, 6], 50, Targets::ALL);
        let recs = run_grid(&cfg).unwrap();
        let mut with_gap = recs.clone();
        with_gap[0].milestones.optimal = None;
        with_gap[0].p1 = None;
        with_gap[1].ratio = Some(1.2345678901234567);
        assert_eq!(parse_csv(&csv_string(&with_gap).unwrap()).unwrap(), with_gap);
        assert!(parse_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn hash_ignores_seeds_and_output() {
        let a = random_cfg(Algorithm::Gsemo, 8, 1, vec![1], 10, Targets::FEASIBLE);
        let mut b = a.clone();
        b.seeds = vec![4, 5];
        b.out = Some("x.csv".into());
        assert_eq!(a.hash(), b.hash());
        b.budget = 11;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn oracle_targets_rejected_beyond_bound() {
        let cfg = random_cfg(Algorithm::EaEdge, 30, 1, vec![1], 10, Targets::RATIO32);
        assert!(matches!(run_grid(&cfg), Err(Error::Config(_))));
        let cfg = random_cfg(Algorithm::EaEdge, 30, 1, vec![1], 10, Targets::FEASIBLE);
        assert!(run_grid(&cfg).unwrap()[0].opt_cost.is_none());
        let mut cfg = random_cfg(Algorithm::EaVertex, 6, 1, vec![1], 10, Targets::FEASIBLE);
        cfg.representation = Representation::Edge;
        assert!(matches!(run_grid(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn replay_from_registry() {
        let cfg = random_cfg(Algorithm::Gsemo1, 7, 2, vec![11, 12], 3_000, Targets::ALL);
        let recs = run_grid(&cfg).unwrap();
        let mut reg = ConfigRegistry::default();
        let h = reg.insert(&cfg);
        for r in &recs {
            assert!(reg.replay(&h, r.instance_id, r.seed).unwrap().same_outcome(r));
        }
        assert!(reg.replay("nope", 0, 0).is_err());
    }

    #[test]
    fn grid_writes_files() {
        let dir = std::env::temp_dir().join(format!("twohop-grid-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let out = dir.join("runs.csv");
        let mut cfg = random_cfg(Algorithm::EaEdge, 6, 1, vec![1, 2], 2_000, Targets::FEASIBLE);
        cfg.out = Some(out.clone());
        cfg.trace_every = Some(500);
        let recs = run_grid(&cfg).unwrap();
        let back = parse_csv(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(back.len(), 2);
        assert!(back.iter().zip(&recs).all(|(a, b)| a.same_outcome(b)));
        let reg = ConfigRegistry::load_or_default(&manifest_path(&out)).unwrap();
        assert_eq!(reg.get(&cfg.hash()), Some(&cfg));
        assert!(out.with_extension("trace.jsonl").exists());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn summary_slopes() {
        let flat: Vec<RunRecord> = [8, 16, 32].iter().map(|&n| synthetic(Algorithm::EaEdge, n, 500)).collect();
        let s = summarize(&flat);
        assert_eq!(s.rows.len(), 3);
        assert!(s.slopes[0].slope.abs() < 1e-9);

        let linear: Vec<RunRecord> =
            [8, 16, 32, 64].iter().map(|&n| synthetic(Algorithm::Gsemo, n, (n * (n + 1) / 2) as u64)).collect();
        let s = summarize(&linear);
        assert!((s.slopes[0].slope - 1.0).abs() < 0.01);
        assert!(s.to_string().contains("gsemo"));
    }

    #[test]
    fn quartiles() {
        let recs: Vec<RunRecord> = (1..=5).map(|v| synthetic(Algorithm::EaEdge, 8, v)).collect();
        let row = &summarize(&recs).rows[0];
        assert_eq!((row.q1, row.median, row.q3), (Some(2.0), Some(3.0), Some(4.0)));
        assert_eq!(row.runs, 5);
    }

    #[test]
    fn default_budgets() {
        let m = 36 * 37 / 2;
        assert_eq!(default_budget(Algorithm::EaEdge, 36, Targets::FEASIBLE), 100 * m * 4);
        assert_eq!(default_budget(Algorithm::Gsemo1, 8, Targets::FEASIBLE), 100 * 36 * 8);
        assert_eq!(default_budget(Algorithm::EaVertex, 8, Targets::RATIO32), 100 * 4096);
        assert_eq!(default_budget(Algorithm::Gsemo, 8, Targets::RATIO32), BUDGET_CAP);
    }

    #[test]
    fn worker_env_parse() {
        assert!(worker_count().unwrap() >= 1);
    }
}
