//! Parallel verification sweeps over blocks, nodes and kernel variants.

use rayon::prelude::*;

use crate::blocks::{count_simples, enumerate_compositions, partitions, weight_space_dim, Composition, JordanType};
use crate::daha::{verify_daha, DahaError, TensorContext};
use crate::k0::{verify_quotient_intertwines, verify_serre_and_commute, verify_sl2_block_relation, K0Model};
use crate::kloc::{verify_commute, verify_ef_relation, verify_serre, verify_twist, Geometry, Kind, Variant};
use crate::report::{
    BlockRow, BlockTable, Convention, ConventionTrial, DahaReport, KernelsReport, RelationReport, RelationsReport,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub n_max: usize,
    pub k_max: usize,
    pub lambda: Option<JordanType>,
    pub jobs: Option<usize>,
    pub perturb: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { n_max: 4, k_max: 3, lambda: None, jobs: None, perturb: false }
    }
}

impl SweepConfig {
    /// Sizes `n` covered: just `|λ|` when a Jordan type is pinned.
    pub fn ns(&self) -> Vec<usize> {
        match &self.lambda {
            Some(l) => vec![l.n()],
            None => (1..=self.n_max).collect(),
        }
    }

    pub fn ks(&self) -> Vec<usize> {
        (2..=self.k_max).collect()
    }

    /// Jordan types for size `n`.
    pub fn lambdas(&self, n: usize) -> Vec<JordanType> {
        match &self.lambda {
            Some(l) => vec![l.clone()],
            None => partitions(n),
        }
    }

    /// Runs `f` on a pool with the configured worker count.
    pub fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match self.jobs {
            Some(j) => rayon::ThreadPoolBuilder::new().num_threads(j).build().expect("thread pool").install(f),
            None => f(),
        }
    }
}

/// `c_λ(a)` against the weight multiplicity for every `(λ, k, a)` in range.
pub fn block_tables(cfg: &SweepConfig) -> Vec<BlockTable> {
    let mut out = Vec::new();
    for n in cfg.ns() {
        for lambda in cfg.lambdas(n) {
            for k in cfg.ks() {
                let blocks = enumerate_compositions(n, k)
                    .into_iter()
                    .map(|a| BlockRow {
                        simples: count_simples(&lambda, &a).expect("same n"),
                        weight_dim: weight_space_dim(&lambda, k, &a),
                        a,
                    })
                    .collect();
                out.push(BlockTable { n, k, lambda: lambda.clone(), blocks });
            }
        }
    }
    out
}

/// Which Grothendieck-group identities to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    Sl2,
    Serre,
    Quotient,
    All,
}

impl std::str::FromStr for RelationKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sl2" => Ok(RelationKind::Sl2),
            "serre" | "commute" => Ok(RelationKind::Serre),
            "quotient" => Ok(RelationKind::Quotient),
            "all" => Ok(RelationKind::All),
            _ => Err(format!("unknown relation {s}; expected sl2, serre, quotient or all")),
        }
    }
}

/// Grothendieck-group relations over every `(n, k)` in range.
pub fn relations_sweep(cfg: &SweepConfig, which: RelationKind) -> Vec<RelationsReport> {
    let mut tasks = Vec::new();
    for n in cfg.ns() {
        for k in cfg.ks() {
            tasks.push((n, k));
        }
    }
    cfg.run(|| {
        tasks
            .par_iter()
            .map(|&(n, k)| {
                let model = K0Model { k, perturb: cfg.perturb };
                let mut rel = Vec::new();
                if matches!(which, RelationKind::Sl2 | RelationKind::All) {
                    for a in enumerate_compositions(n, k) {
                        for i in 1..k {
                            rel.push(verify_sl2_block_relation(&model, &a, i));
                        }
                    }
                }
                if matches!(which, RelationKind::Serre | RelationKind::All) {
                    rel.extend(verify_serre_and_commute(&model, n));
                }
                if matches!(which, RelationKind::Quotient | RelationKind::All) {
                    for lambda in cfg.lambdas(n) {
                        rel.extend(verify_quotient_intertwines(&lambda, k));
                    }
                }
                RelationsReport { n, k, relations: rel }
            })
            .collect()
    })
}

pub fn daha_report(n: usize, m: usize, d: usize, perturb: bool) -> Result<DahaReport, DahaError> {
    Ok(verify_daha(&TensorContext::new(n, m, d)?, perturb))
}

/// Every dAHA context with `n ≤ n_max`, `m ≤ m_max`, `2 ≤ d ≤ d_max`.
pub fn daha_sweep(n_max: usize, m_max: usize, d_max: usize, perturb: bool) -> Vec<DahaReport> {
    let mut ctxs = Vec::new();
    for n in 1..=n_max {
        for m in 0..=m_max {
            for d in 2..=d_max {
                ctxs.push((n, m, d));
            }
        }
    }
    ctxs.par_iter().map(|&(n, m, d)| daha_report(n, m, d, perturb).expect("valid context")).collect()
}

/// One uniform sign must serve every context.
pub fn uniform_epsilon(reports: &[DahaReport]) -> Option<i8> {
    let first = reports.first()?.epsilon?;
    reports.iter().all(|r| r.epsilon == Some(first)).then_some(first)
}

/// A kernel relation instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Check {
    Ef(usize),
    Commute(usize, usize),
    Serre(Kind, usize, usize),
}

fn instances(n: usize, k: usize, serre: bool) -> Vec<(Composition, Check)> {
    let mut out = Vec::new();
    for a in enumerate_compositions(n, k) {
        for i in 1..k {
            out.push((a.clone(), Check::Ef(i)));
        }
        for i in 1..k {
            for j in 1..k {
                if i != j {
                    out.push((a.clone(), Check::Commute(i, j)));
                }
            }
        }
        if serre {
            for i in 1..k {
                for j in [i.wrapping_sub(1), i + 1] {
                    if j >= 1 && j < k {
                        for kind in [Kind::E, Kind::F] {
                            out.push((a.clone(), Check::Serre(kind, i, j)));
                        }
                    }
                }
            }
        }
    }
    out
}

fn run_check(g: &Geometry, variant: Variant, a: &Composition, c: Check) -> Vec<RelationReport> {
    let r = match c {
        Check::Ef(i) => verify_ef_relation(g, a, i, variant).map(|r| vec![r]),
        Check::Commute(i, j) => verify_commute(g, a, i, j, variant).map(|r| vec![r]),
        Check::Serre(kind, i, j) => verify_serre(g, variant, kind, a, i, j),
    };
    r.expect("valid instance")
}

/// EF and commutation relations for `variants` on every block with `n ≤ n_max`, `k ≤ k_max`;
/// graded Serre as well for `k ≥ 3` and `n ≤ serre_n_max`.
pub fn kernel_relations(
    cfg: &SweepConfig,
    conv: Convention,
    variants: &[Variant],
    serre_n_max: usize,
) -> Vec<RelationReport> {
    let mut tasks = Vec::new();
    for n in cfg.ns() {
        for k in cfg.ks() {
            for &v in variants {
                for (a, c) in instances(n, k, k >= 3 && n <= serre_n_max) {
                    tasks.push((n, v, a, c));
                }
            }
        }
    }
    // Expensive instances first so the pool stays busy.
    let mut order: Vec<usize> = (0..tasks.len()).collect();
    order.sort_by_key(|&ix| std::cmp::Reverse(tasks[ix].0));
    let results: Vec<(usize, Vec<RelationReport>)> = cfg.run(|| {
        order
            .par_iter()
            .map(|&ix| {
                let (n, v, a, c) = &tasks[ix];
                let g = Geometry { n: *n, conv, perturb: cfg.perturb };
                (ix, run_check(&g, *v, a, *c))
            })
            .collect()
    });
    let mut results = results;
    results.sort_by_key(|(ix, _)| *ix);
    results.into_iter().flat_map(|(_, r)| r).collect()
}

/// `CK0 → P0` and `CK1 → P1` twist checks for every block, node and kind.
pub fn twist_sweep(cfg: &SweepConfig, conv: Convention) -> Vec<RelationReport> {
    let mut tasks = Vec::new();
    for n in cfg.ns() {
        for k in cfg.ks() {
            for a in enumerate_compositions(n, k) {
                for i in 1..k {
                    for kind in [Kind::E, Kind::F] {
                        for pair in [(Variant::CK0, Variant::P0), (Variant::CK1, Variant::P1)] {
                            tasks.push((n, a.clone(), i, kind, pair));
                        }
                    }
                }
            }
        }
    }
    cfg.run(|| {
        tasks
            .par_iter()
            .map(|(n, a, i, kind, (from, to))| {
                let g = Geometry { n: *n, conv, perturb: cfg.perturb };
                verify_twist(&g, *kind, *from, *to, a, *i).expect("valid instance")
            })
            .collect()
    })
}

/// Failure counts of each candidate convention on the instances with `n ≤ 2`.
pub fn search_conventions(perturb: bool) -> Vec<ConventionTrial> {
    let cfg = SweepConfig { n_max: 2, k_max: 3, lambda: None, jobs: None, perturb };
    Convention::candidates()
        .into_par_iter()
        .map(|conv| {
            let reports = kernel_relations(&cfg, conv, &[Variant::CK0], 0);
            ConventionTrial { convention: conv, failures: reports.iter().filter(|r| r.status.failed()).count() }
        })
        .collect()
}

/// Convention search followed by the full sweep under the first convention
/// that passes every search instance.
pub fn kernels_sweep(cfg: &SweepConfig, variants: &[Variant], serre_n_max: usize) -> KernelsReport {
    let search = cfg.run(|| search_conventions(cfg.perturb));
    let convention = search.iter().find(|t| t.failures == 0).map(|t| t.convention);
    let relations = match convention {
        Some(conv) => kernel_relations(cfg, conv, variants, serre_n_max),
        None => Vec::new(),
    };
    KernelsReport { n: cfg.n_max, k: cfg.k_max, convention, search, relations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_table_spot_values() {
        let cfg = SweepConfig {
            n_max: 3,
            k_max: 2,
            lambda: Some(JordanType::new(vec![2, 1]).unwrap()),
            ..Default::default()
        };
        let t = block_tables(&cfg);
        assert_eq!(t.len(), 1);
        let simples: Vec<usize> = t[0].blocks.iter().map(|r| r.simples).collect();
        assert_eq!(simples, vec![1, 2, 2, 1]);
        assert!(t[0].all_match());
    }

    #[test]
    fn search_finds_standard() {
        let trials = search_conventions(false);
        let first = trials.iter().find(|t| t.failures == 0).unwrap();
        assert_eq!(first.convention, Convention::STANDARD);
    }

    #[test]
    fn relations_small() {
        let cfg = SweepConfig { n_max: 3, k_max: 3, ..Default::default() };
        assert!(relations_sweep(&cfg, RelationKind::All).iter().all(|r| r.passed()));
    }
}
