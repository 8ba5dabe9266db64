//! Campaign drivers for random monitor placements and truncated μ, plus the
//! seeded graph sources they run on.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::agrid::{agrid, campaign_degree, write_rows, DRule, RunFailure};
use crate::error::{ensure_domain, Error, Result};
use crate::graph::Graph;
use crate::ident::{compute_mu_truncated_with, mu_with_path_count, MuOptions};
use crate::placement::{mdmp, random_placement, TieBreak};
use crate::rng::derive_seed;
use crate::routing::RoutingScheme;
use crate::topology::gen_erdos_renyi;

/// Attempts before a connected random graph is given up on.
pub const CONNECT_ATTEMPTS: u64 = 10_000;

/// First weakly connected G(n, p) among the seeds derived from `seed`.
pub fn connected_erdos_renyi(n: usize, p: f64, seed: u64, directed: bool) -> Result<Graph> {
    for attempt in 0..CONNECT_ATTEMPTS {
        let g = gen_erdos_renyi(n, p, derive_seed(seed, attempt), directed)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::domain(format!("no connected G({n}, {p}) within {CONNECT_ATTEMPTS} draws")))
}

/// `⌊2m/n⌋`, at least 1.
pub fn average_degree_floor(g: &Graph) -> usize {
    (2 * g.edge_count() / g.node_count().max(1)).max(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RandomMonitorRow {
    pub run: usize,
    pub n: usize,
    pub inputs: String,
    pub outputs: String,
    pub mu: usize,
    pub pairs_examined: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedRow {
    pub run: usize,
    pub n: usize,
    pub d: usize,
    pub alpha_g: usize,
    pub alpha_ga: usize,
    pub mu_alpha_g: usize,
    pub mu_alpha_ga: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table<R> {
    pub rows: Vec<R>,
    pub failures: Vec<RunFailure>,
}

impl<R: Serialize> Table<R> {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(out, &self.rows)
    }
}

fn joined(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn collect<R>(outcomes: Vec<(usize, u64, Result<R>)>) -> Table<R> {
    let mut t = Table {
        rows: Vec::new(),
        failures: Vec::new(),
    };
    for (run, seed, o) in outcomes {
        match o {
            Ok(r) => t.rows.push(r),
            Err(e) => t.failures.push(RunFailure {
                run,
                seed,
                message: e.to_string(),
            }),
        }
    }
    t
}

/// μ under `runs` uniformly random placements of `k_in + k_out` monitors.
pub fn random_monitor_campaign(
    g: &Graph,
    k_in: usize,
    k_out: usize,
    runs: usize,
    seed: u64,
    scheme: RoutingScheme,
    opts: &MuOptions,
) -> Result<Table<RandomMonitorRow>> {
    ensure_domain!(runs >= 1, "campaign needs at least one run");
    let outcomes = (0..runs)
        .into_par_iter()
        .map(|run| {
            let s = derive_seed(seed, run as u64);
            let row = random_placement(g, k_in, k_out, s).and_then(|chi| {
                let (r, _) = mu_with_path_count(g, &chi, scheme, opts)?;
                Ok(RandomMonitorRow {
                    run,
                    n: g.node_count(),
                    inputs: joined(&chi.inputs),
                    outputs: joined(&chi.outputs),
                    mu: r.mu,
                    pairs_examined: r.pairs_examined,
                    seed: s,
                })
            });
            (run, s, row)
        })
        .collect();
    Ok(collect(outcomes))
}

/// μ_α on `G` and on a boosted `G^A` per run, with α the floored average
/// degree of each graph.
pub fn truncated_campaign<F>(
    source: F,
    d_rule: DRule,
    bump: bool,
    runs: usize,
    seed: u64,
    scheme: RoutingScheme,
    opts: &MuOptions,
) -> Result<Table<TruncatedRow>>
where
    F: Fn(u64) -> Result<Graph> + Sync,
{
    ensure_domain!(runs >= 1, "campaign needs at least one run");
    let outcomes = (0..runs)
        .into_par_iter()
        .map(|run| {
            let s = derive_seed(seed, run as u64);
            let row = (|| {
                let g = source(s)?;
                let d = campaign_degree(&g, d_rule, bump);
                let boosted = agrid(&g, d, s)?;
                let chi_g = mdmp(&g, d, &TieBreak::AscendingId)?;
                let alpha_g = average_degree_floor(&g);
                let alpha_ga = average_degree_floor(&boosted.augmented);
                let rg = compute_mu_truncated_with(&g, &chi_g, scheme, alpha_g, opts)?;
                let rga = compute_mu_truncated_with(&boosted.augmented, &boosted.placement, scheme, alpha_ga, opts)?;
                Ok(TruncatedRow {
                    run,
                    n: g.node_count(),
                    d,
                    alpha_g,
                    alpha_ga,
                    mu_alpha_g: rg.mu,
                    mu_alpha_ga: rga.mu,
                    seed: s,
                })
            })();
            (run, s, row)
        })
        .collect();
    Ok(collect(outcomes))
}

/// Percentage of rows per value.
pub fn histogram(values: impl IntoIterator<Item = usize>) -> BTreeMap<usize, f64> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut total = 0usize;
    for v in values {
        *counts.entry(v).or_default() += 1;
        total += 1;
    }
    counts
        .into_iter()
        .map(|(k, c)| (k, 100.0 * c as f64 / total as f64))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramRow {
    pub graph: &'static str,
    pub mu: usize,
    pub percent: f64,
}

impl Table<TruncatedRow> {
    pub fn histogram_rows(&self) -> Vec<HistogramRow> {
        let mut out = Vec::new();
        for (graph, h) in [
            ("G", histogram(self.rows.iter().map(|r| r.mu_alpha_g))),
            ("GA", histogram(self.rows.iter().map(|r| r.mu_alpha_ga))),
        ] {
            out.extend(h.into_iter().map(|(mu, percent)| HistogramRow { graph, mu, percent }));
        }
        out
    }
}

pub fn write_histogram<W: Write>(out: W, rows: &[HistogramRow]) -> Result<()> {
    write_rows(out, rows)
}
