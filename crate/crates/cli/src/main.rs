use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use slkcat::blocks::{Composition, JordanType};
use slkcat::kloc::{Geometry, Kind, Variant};
use slkcat::report::{Convention, KernelsReport};
use slkcat::sweep::{self, RelationKind, SweepConfig};

#[derive(Parser)]
#[command(
    name = "slkcat",
    version,
    about = "Exact checks of sl_k actions on modular blocks, tensor space and flag geometries"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simple counts against weight multiplicities.
    Blocks(Common),
    /// Grothendieck-group relations.
    Relations {
        #[command(flatten)]
        common: Common,
        /// sl2, serre, quotient or all.
        #[arg(long, default_value = "all")]
        relation: RelationKind,
    },
    /// Degenerate affine Hecke relations on M ⊗ V^{⊗d}.
    Daha {
        /// dim V
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Number of tensor factors in M = V^{⊗m}.
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[command(flatten)]
        io: Io,
    },
    /// Convention search, then kernel relations in localized K-theory.
    Kernels {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of CK0, CK1, P0, P1.
        #[arg(long, default_value = "CK0,CK1,P0,P1", value_delimiter = ',')]
        variant: Vec<Variant>,
        /// ef, serre, twist or all.
        #[arg(long, default_value = "all")]
        relation: KernelRelation,
    },
    /// Fixed-point matrix of one kernel.
    Dump {
        /// Source block, e.g. 1,1.
        #[arg(long)]
        a: Composition,
        #[arg(long)]
        i: usize,
        #[arg(long, default_value = "E")]
        kind: KindArg,
        #[arg(long, default_value = "CK0")]
        variant: Variant,
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Args)]
struct Common {
    /// Largest n (or exactly |λ| when --lambda is given).
    #[arg(long)]
    n: Option<usize>,
    /// Largest k.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Restrict to one Jordan type, e.g. 2,1.
    #[arg(long)]
    lambda: Option<JordanType>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    io: Io,
}

#[derive(Args)]
struct Io {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Inject a sign fault into the first raising operator.
    #[arg(long)]
    perturb: bool,
    /// Print a one-line summary to stderr.
    #[arg(long)]
    summary: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum KernelRelation {
    Ef,
    Serre,
    Twist,
    All,
}

impl std::str::FromStr for KernelRelation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ef" | "commute" => Ok(KernelRelation::Ef),
            "serre" => Ok(KernelRelation::Serre),
            "twist" => Ok(KernelRelation::Twist),
            "all" => Ok(KernelRelation::All),
            _ => Err(format!("unknown relation {s}; expected ef, serre, twist or all")),
        }
    }
}

#[derive(Clone, Copy)]
struct KindArg(Kind);

impl std::str::FromStr for KindArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "E" | "e" => Ok(KindArg(Kind::E)),
            "F" | "f" => Ok(KindArg(Kind::F)),
            _ => Err(format!("unknown kind {s}; expected E or F")),
        }
    }
}

struct Usage(String);

impl Common {
    fn config(&self) -> Result<SweepConfig, Usage> {
        let n_max = match (&self.lambda, self.n) {
            (Some(l), Some(n)) if l.n() != n => {
                return Err(Usage(format!("--lambda {l} is a partition of {}, not of --n {n}", l.n())))
            }
            (Some(l), _) => l.n(),
            (None, n) => n.unwrap_or(SweepConfig::default().n_max),
        };
        if n_max < 1 {
            return Err(Usage("--n must be at least 1".into()));
        }
        if self.k < 2 {
            return Err(Usage("--k must be at least 2".into()));
        }
        if self.jobs == Some(0) {
            return Err(Usage("--jobs must be positive".into()));
        }
        Ok(SweepConfig { n_max, k_max: self.k, lambda: self.lambda.clone(), jobs: self.jobs, perturb: self.io.perturb })
    }
}

fn emit<T: Serialize>(io: &Io, value: &T, passed: bool, summary: &str) -> Result<ExitCode, Usage> {
    let mut json = serde_json::to_string_pretty(value).expect("reports serialize");
    json.push('\n');
    match &io.out {
        Some(path) => std::fs::write(path, json).map_err(|e| Usage(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().write_all(json.as_bytes()).map_err(|e| Usage(format!("stdout: {e}")))?,
    }
    if io.summary {
        eprintln!("{} {summary}", if passed { "PASS" } else { "FAIL" });
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn failure_matrix(report: &KernelsReport) {
    eprintln!("no convention passes the search instances:");
    eprintln!("sigma orientation dilation shift_sign failures");
    for t in &report.search {
        let c = t.convention;
        eprintln!("{:>5} {:>11} {:>8} {:>10} {:>8}", c.sigma, c.orientation, c.dilation, c.shift_sign, t.failures);
    }
}

fn run(cli: Cli) -> Result<ExitCode, Usage> {
    match cli.cmd {
        Cmd::Blocks(common) => {
            let cfg = common.config()?;
            let tables = sweep::block_tables(&cfg);
            let ok = tables.iter().all(|t| t.all_match());
            emit(&common.io, &tables, ok, &format!("{} block tables", tables.len()))
        }
        Cmd::Relations { common, relation } => {
            let cfg = common.config()?;
            let reports = sweep::relations_sweep(&cfg, relation);
            let ok = reports.iter().all(|r| r.passed());
            let count: usize = reports.iter().map(|r| r.relations.len()).sum();
            emit(&common.io, &reports, ok, &format!("{count} relation instances"))
        }
        Cmd::Daha { n, m, d, io } => {
            let report = sweep::daha_report(n, m, d, io.perturb).map_err(|e| Usage(e.to_string()))?;
            let ok = report.passed() && report.epsilon.is_some();
            let eps = report.epsilon.map_or("none".to_string(), |e| e.to_string());
            emit(&io, &report, ok, &format!("epsilon = {eps}"))
        }
        Cmd::Kernels { common, variant, relation } => {
            let cfg = common.config()?;
            let mut variants = variant;
            variants.sort();
            variants.dedup();
            let (core, serre_n) = match relation {
                KernelRelation::Ef => (variants.clone(), 0),
                KernelRelation::Serre => (variants.clone(), cfg.n_max),
                KernelRelation::Twist => (Vec::new(), 0),
                KernelRelation::All => (variants.clone(), cfg.n_max),
            };
            let mut report = sweep::kernels_sweep(&cfg, &core, serre_n);
            if let (Some(conv), KernelRelation::Twist | KernelRelation::All) = (report.convention, relation) {
                report.relations.extend(sweep::twist_sweep(&cfg, conv));
            }
            if relation == KernelRelation::Serre {
                report.relations.retain(|r| r.relation.starts_with("serre"));
            }
            if report.convention.is_none() {
                failure_matrix(&report);
            }
            let ok = report.passed();
            let summary = match report.convention {
                Some(c) => format!(
                    "sigma = {}, orientation = {}, dilation = {}, shift_sign = {}; {} relation instances",
                    c.sigma,
                    c.orientation,
                    c.dilation,
                    c.shift_sign,
                    report.relations.len()
                ),
                None => "no uniform convention".to_string(),
            };
            emit(&common.io, &report, ok, &summary)
        }
        Cmd::Dump { a, i, kind, variant, io } => {
            if i == 0 || i >= a.k() {
                return Err(Usage(format!("--i must lie in 1..{}", a.k())));
            }
            let g = Geometry { n: a.n(), conv: Convention::STANDARD, perturb: io.perturb };
            let k = g.kernel(kind.0, variant, &a, i).map_err(|e| Usage(e.to_string()))?;
            let dump = k.dump(kind.0, variant, i, Convention::STANDARD);
            emit(&io, &dump, true, &format!("{} entries", dump.entries.len()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
