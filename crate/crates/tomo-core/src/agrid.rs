//! Degree boosting by random edge addition followed by minimal-degree
//! monitor selection, plus the cost/benefit calculators and the campaign
//! driver that compares μ before and after boosting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_domain, Error, Result};
use crate::graph::Graph;
use crate::ident::{mu_with_path_count, MuOptions};
use crate::placement::{mdmp, MonitorPlacement, TieBreak};
use crate::rng::{derive_seed, rng};
use crate::routing::RoutingScheme;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgridResult {
    pub augmented: Graph,
    pub added_edges: Vec<(usize, usize)>,
    pub placement: MonitorPlacement,
    pub seed: u64,
    pub d: usize,
}

pub fn agrid(g: &Graph, d: usize, seed: u64) -> Result<AgridResult> {
    agrid_with(g, d, seed, &TieBreak::AscendingId)
}

pub fn agrid_with(g: &Graph, d: usize, seed: u64, tie_break: &TieBreak) -> Result<AgridResult> {
    ensure_domain!(!g.is_directed(), "degree boosting runs on undirected graphs");
    let n = g.node_count();
    ensure_domain!(d >= 1, "target degree must be at least 1");
    ensure_domain!(d < n, "target degree {d} unreachable with {n} nodes");
    let added_edges = boost_degree(g, d, seed);
    let augmented = g.with_added_edges(&added_edges)?;
    let placement = mdmp(&augmented, d, tie_break)?;
    Ok(AgridResult {
        augmented,
        added_edges,
        placement,
        seed,
        d,
    })
}

/// Visits nodes in ascending id; a node still short of `d` neighbours gets
/// `d - deg` new ones drawn uniformly from its non-neighbours.
fn boost_degree(g: &Graph, d: usize, seed: u64) -> Vec<(usize, usize)> {
    let n = g.node_count();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.out_neighbors(v).iter().copied().collect()).collect();
    let mut r = rng(seed);
    let mut added = Vec::new();
    for v in 0..n {
        let deg = adj[v].len();
        if deg >= d {
            continue;
        }
        let pool: Vec<usize> = (0..n).filter(|&w| w != v && !adj[v].contains(&w)).collect();
        let mut picks: Vec<usize> = sample(&mut r, pool.len(), d - deg).into_iter().map(|i| pool[i]).collect();
        picks.sort_unstable();
        for w in picks {
            adj[v].insert(w);
            adj[w].insert(v);
            added.push((v.min(w), v.max(w)));
        }
    }
    added
}

/// Costs for the benefit/cost tradeoff. Times index the horizon.
#[derive(Clone, Debug, Default)]
pub struct CostBenefitInput {
    pub edge_cost: BTreeMap<(usize, usize), BigRational>,
    pub test_cost_base: BTreeMap<usize, BigRational>,
    pub test_cost_aug: BTreeMap<usize, BigRational>,
    pub horizon: Vec<usize>,
}

impl CostBenefitInput {
    fn edge(&self, e: (usize, usize)) -> Result<&BigRational> {
        let key = (e.0.min(e.1), e.0.max(e.1));
        let c = self
            .edge_cost
            .get(&key)
            .ok_or_else(|| Error::domain(format!("no cost for edge {key:?}")))?;
        ensure_domain!(*c >= BigRational::zero(), "negative cost for edge {key:?}");
        Ok(c)
    }

    fn at(series: &BTreeMap<usize, BigRational>, t: usize, name: &str) -> Result<BigRational> {
        let c = series
            .get(&t)
            .cloned()
            .ok_or_else(|| Error::domain(format!("no {name} cost at time {t}")))?;
        ensure_domain!(c >= BigRational::zero(), "negative {name} cost at time {t}");
        Ok(c)
    }

    fn added_cost(&self, added: &[(usize, usize)]) -> Result<BigRational> {
        added
            .iter()
            .try_fold(BigRational::zero(), |acc, &e| Ok(acc + self.edge(e)?))
    }
}

/// `Σ_t B_G(t) / (Σ_e C(e) + Σ_t B_GA(t))`.
pub fn kappa_tradeoff(cbi: &CostBenefitInput, added: &[(usize, usize)]) -> Result<BigRational> {
    ensure_domain!(!cbi.horizon.is_empty(), "empty time horizon");
    let mut base = BigRational::zero();
    let mut aug = BigRational::zero();
    for &t in &cbi.horizon {
        base += CostBenefitInput::at(&cbi.test_cost_base, t, "base")?;
        aug += CostBenefitInput::at(&cbi.test_cost_aug, t, "augmented")?;
    }
    let den = cbi.added_cost(added)? + aug;
    ensure_domain!(!den.is_zero(), "tradeoff denominator is zero");
    Ok(base / den)
}

/// `B_GA(t) - Σ_e C(e)`.
pub fn beta_step(cbi: &CostBenefitInput, t: usize, added: &[(usize, usize)]) -> Result<BigRational> {
    Ok(CostBenefitInput::at(&cbi.test_cost_aug, t, "augmented")? - cbi.added_cost(added)?)
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Target degree as a function of the node count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DRule {
    /// `⌈log₂ n⌉`
    Log,
    /// `⌈√(log₂ n)⌉`
    SqrtLog,
    Fixed(usize),
}

impl DRule {
    pub fn value(&self, n: usize) -> usize {
        match *self {
            DRule::Log => ceil_log2(n),
            DRule::SqrtLog => {
                // smallest s with s² >= log₂ n, i.e. 2^(s²) >= n
                let l = ceil_log2(n);
                (0..).find(|s| s * s >= l).unwrap()
            }
            DRule::Fixed(d) => d,
        }
    }
}

fn ceil_log2(n: usize) -> usize {
    n.max(1).next_power_of_two().trailing_zeros() as usize
}

impl fmt::Display for DRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DRule::Log => f.write_str("log"),
            DRule::SqrtLog => f.write_str("sqrtlog"),
            DRule::Fixed(d) => write!(f, "fixed:{d}"),
        }
    }
}

impl FromStr for DRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(DRule::Log),
            "sqrtlog" => Ok(DRule::SqrtLog),
            _ => s
                .strip_prefix("fixed:")
                .and_then(|k| k.parse().ok())
                .filter(|&k| k >= 1)
                .map(DRule::Fixed)
                .ok_or_else(|| Error::domain(format!("bad degree rule {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub d_rule: DRule,
    /// Raise d by one when the graph already has minimum degree >= d.
    pub bump: bool,
    pub runs: usize,
    pub seed: u64,
    pub scheme: RoutingScheme,
    pub path_budget: usize,
}

/// Target degree actually used for a graph: the rule value, optionally
/// bumped, clamped so that `2d` monitors fit.
pub fn campaign_degree(g: &Graph, rule: DRule, bump: bool) -> usize {
    let n = g.node_count();
    let mut d = rule.value(n).max(1);
    let delta = (0..n).map(|v| g.degree(v)).min().unwrap_or(0);
    if bump && d <= delta {
        d += 1;
    }
    d.min(n / 2).max(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CampaignRow {
    pub run: usize,
    pub n: usize,
    pub d: usize,
    pub mu_g: usize,
    pub mu_ga: usize,
    pub delta_g: usize,
    pub delta_ga: usize,
    pub edges_added: usize,
    pub paths_g: Option<usize>,
    pub paths_ga: Option<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunFailure {
    pub run: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Campaign {
    pub rows: Vec<CampaignRow>,
    pub failures: Vec<RunFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CampaignSummary {
    pub runs: usize,
    pub greater: usize,
    pub equal: usize,
    pub less: usize,
    pub max_increment: usize,
}

impl CampaignSummary {
    pub fn fractions(&self) -> (f64, f64, f64) {
        let t = self.runs.max(1) as f64;
        (self.greater as f64 / t, self.equal as f64 / t, self.less as f64 / t)
    }
}

impl Campaign {
    pub fn summary(&self) -> CampaignSummary {
        let mut s = CampaignSummary {
            runs: self.rows.len(),
            greater: 0,
            equal: 0,
            less: 0,
            max_increment: 0,
        };
        for r in &self.rows {
            match r.mu_ga.cmp(&r.mu_g) {
                std::cmp::Ordering::Greater => {
                    s.greater += 1;
                    s.max_increment = s.max_increment.max(r.mu_ga - r.mu_g);
                }
                std::cmp::Ordering::Equal => s.equal += 1,
                std::cmp::Ordering::Less => s.less += 1,
            }
        }
        s
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(out, &self.rows)
    }
}

pub(crate) fn write_rows<W: Write, R: Serialize>(out: W, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

fn min_degree(g: &Graph) -> usize {
    (0..g.node_count()).map(|v| g.degree(v)).min().unwrap_or(0)
}

/// One row per run. The graph source receives the run's derived seed.
pub fn agrid_campaign<F>(source: F, cfg: &CampaignConfig) -> Result<Campaign>
where
    F: Fn(u64) -> Result<Graph> + Sync,
{
    ensure_domain!(cfg.runs >= 1, "campaign needs at least one run");
    let outcomes: Vec<(usize, u64, Result<CampaignRow>)> = (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let seed = derive_seed(cfg.seed, run as u64);
            (run, seed, campaign_run(&source, cfg, run, seed))
        })
        .collect();
    let mut campaign = Campaign {
        rows: Vec::new(),
        failures: Vec::new(),
    };
    for (run, seed, outcome) in outcomes {
        match outcome {
            Ok(row) => campaign.rows.push(row),
            Err(e) => campaign.failures.push(RunFailure {
                run,
                seed,
                message: e.to_string(),
            }),
        }
    }
    Ok(campaign)
}

fn campaign_run<F>(source: &F, cfg: &CampaignConfig, run: usize, seed: u64) -> Result<CampaignRow>
where
    F: Fn(u64) -> Result<Graph>,
{
    let g = source(seed)?;
    let d = campaign_degree(&g, cfg.d_rule, cfg.bump);
    let boosted = agrid(&g, d, seed)?;
    let opts = MuOptions {
        path_budget: cfg.path_budget,
        ..MuOptions::default()
    };
    let chi_g = mdmp(&g, d, &TieBreak::AscendingId)?;
    let (rg, paths_g) = mu_with_path_count(&g, &chi_g, cfg.scheme, &opts)?;
    let (rga, paths_ga) = mu_with_path_count(&boosted.augmented, &boosted.placement, cfg.scheme, &opts)?;
    Ok(CampaignRow {
        run,
        n: g.node_count(),
        d,
        mu_g: rg.mu,
        mu_ga: rga.mu,
        delta_g: min_degree(&g),
        delta_ga: min_degree(&boosted.augmented),
        edges_added: boosted.added_edges.len(),
        paths_g,
        paths_ga,
        seed,
    })
}
