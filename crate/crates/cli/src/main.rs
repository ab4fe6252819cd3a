use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use twohop::algorithms::{Algorithm, Targets};
use twohop::certifier::{self, Certificate};
use twohop::gen::{self, PlantKind};
use twohop::harness::{self, ConfigRegistry, ExperimentConfig, InstanceSource};
use twohop::oracle;
use twohop::vertex;
use twohop::{EdgeSolution, HopTree, Instance, VertexSolution};

/// Evolutionary algorithms for 2-hop spanning trees with weights 1 and 2.
#[derive(Parser)]
#[command(name = "twohop", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a grid of (instance, seed) cells and write one CSV row per cell.
    Run(RunArgs),
    /// Write a random or planted instance.
    Gen(GenArgs),
    /// Print the exact optimum of an instance.
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = oracle::DEFAULT_ENUMERATION_BOUND)]
        bound: usize,
    },
    /// Check a feasible solution for the 3/2 certificate.
    Certify {
        instance: PathBuf,
        /// `edge:<len>:<hex>` or `vertex:<len>:<hex>`.
        solution: String,
        /// Apply refuting moves until the tree is certified.
        #[arg(long)]
        improve: bool,
    },
    /// Median/IQR of milestone counts per (algorithm, n) from a results CSV.
    Summarize { csv: PathBuf },
    /// Re-run one record from the manifest written next to a results CSV.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        hash: String,
        #[arg(long, default_value_t = 0)]
        instance_id: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    algo: Algorithm,
    /// Number of non-root vertices of the random instances.
    #[arg(long, required_unless_present = "instance")]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    p1: f64,
    /// Seeds per instance, starting at `--seed`.
    #[arg(long, default_value_t = 30)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random instances.
    #[arg(long, default_value_t = 1)]
    instances: usize,
    /// Seed of the instance family; defaults to `--seed`.
    #[arg(long)]
    instance_seed: Option<u64>,
    /// Read a single instance from a file instead.
    #[arg(long, conflicts_with_all = ["n", "instances", "instance_seed"])]
    instance: Option<PathBuf>,
    /// Maximum evaluations per run; defaults to 100 times the bound shape.
    #[arg(long)]
    budget: Option<u64>,
    /// Comma-separated subset of feasible, ratio32, optimal.
    #[arg(long, default_value = "feasible")]
    target: Targets,
    /// Results CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sample potentials every this many evaluations.
    #[arg(long)]
    trace_every: Option<u64>,
    /// Print the summary table to stderr.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    p1: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// op1 … op7 or cluster<h>; writes the gadget tree and witness as comments.
    #[arg(long)]
    plant: Option<PlantKind>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_instance(path: &PathBuf) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Instance::parse(&text).with_context(|| format!("parsing {}", path.display()))?)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_run(a: RunArgs) -> Result<()> {
    if a.trials == 0 {
        bail!("--trials must be positive");
    }
    let instances = match &a.instance {
        Some(path) => InstanceSource::File { path: path.clone() },
        None => InstanceSource::Random {
            n: a.n.expect("clap enforces --n"),
            p1: a.p1,
            count: a.instances,
            seed: a.instance_seed.unwrap_or(a.seed),
        },
    };
    let n = match &a.instance {
        Some(path) => read_instance(path)?.n(),
        None => a.n.unwrap_or_default(),
    };
    let budget = a.budget.unwrap_or_else(|| harness::default_budget(a.algo, n, a.target));
    let seeds = (a.seed..a.seed + a.trials).collect();
    let mut cfg = ExperimentConfig::new(a.algo, instances, seeds, budget, a.target);
    cfg.trace_every = a.trace_every;
    cfg.out = a.out.clone();
    let records = harness::run_grid(&cfg)?;
    if a.out.is_none() {
        print!("{}", harness::csv_string(&records)?);
    } else {
        eprintln!("{} records, config {}", records.len(), cfg.hash());
    }
    if a.summary {
        eprint!("{}", harness::summarize(&records));
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let text = match a.plant {
        None => gen::random_instance(a.n, a.p1, a.seed)?.serialize(),
        Some(kind) => {
            let p = gen::planted_instance(kind, a.n, a.seed)?;
            let parents: Vec<String> = p.tree.parents()[1..].iter().map(|v| v.to_string()).collect();
            let mut s = format!("# plant {kind} seed {}\n# tree parents {}\n", a.seed, parents.join(" "));
            s += &format!("# tree {}\n", p.tree.to_edge_solution(&p.instance).to_text());
            if let Some(x3) = &p.x3 {
                s += &format!("# x3 {}\n", x3.to_text());
            }
            if let Some(w) = &p.witness {
                s += &format!("# witness {w}\n");
            }
            s + &p.instance.serialize()
        }
    };
    emit(a.out.as_ref(), &text)
}

fn parse_tree(inst: &Instance, solution: &str) -> Result<HopTree> {
    if solution.starts_with("vertex:") {
        let x = VertexSolution::parse_text(inst, solution)?;
        vertex::build_tree(inst, &x).context("the empty child set has no tree")
    } else {
        let x = EdgeSolution::parse_text(inst, solution)?;
        HopTree::from_edge_solution(inst, &x).context("solution is not a feasible 2-hop tree")
    }
}

fn cmd_certify(instance: PathBuf, solution: String, improve: bool) -> Result<()> {
    let inst = read_instance(&instance)?;
    let t = parse_tree(&inst, solution.trim())?;
    if improve {
        let (t2, moves) = certifier::improve_until_certified(&inst, &t)?;
        println!("Certified after {moves} moves, cost {} -> {}", t.cost(&inst), t2.cost(&inst));
        println!("{}", t2.to_edge_solution(&inst).to_text());
        return Ok(());
    }
    match certifier::certify_three_halves(&inst, &t)? {
        Certificate::Certified => println!("Certified cost={}", t.cost(&inst)),
        Certificate::Refuted(mv) => println!("Refuted {mv}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Oracle { instance, bound } => {
            let inst = read_instance(&instance)?;
            let opt = oracle::optimum_with_bound(&inst, bound)?;
            let children: Vec<String> = opt.children.iter().map(|v| v.to_string()).collect();
            println!("cost {}", opt.cost);
            println!("children {}", children.join(" "));
            Ok(())
        }
        Cmd::Certify { instance, solution, improve } => cmd_certify(instance, solution, improve),
        Cmd::Summarize { csv } => {
            let text = fs::read_to_string(&csv).with_context(|| format!("reading {}", csv.display()))?;
            print!("{}", harness::summarize(&harness::parse_csv(&text)?));
            Ok(())
        }
        Cmd::Replay { manifest, hash, instance_id, seed } => {
            let reg = ConfigRegistry::load_or_default(&manifest)?;
            if reg.is_empty() {
                bail!("{} holds no configs", manifest.display());
            }
            let rec = reg.replay(&hash, instance_id, seed)?;
            print!("{}", harness::csv_string(&[rec])?);
            Ok(())
        }
    }
}
