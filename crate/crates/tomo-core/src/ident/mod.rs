//! Maximal identifiability: the exact search, its truncated variant, the
//! structural upper bounds, and the measurement simulator.

mod bounds;
mod measure;
mod search;
mod truncation;

pub use bounds::{bounds_report, BoundsReport};
pub use measure::{consistent_failure_sets, consistent_with, simulate_measurement, FailureSolutions};
pub use search::{combinations, search_mu, SearchOutcome};
pub use truncation::error_fraction_bound;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_domain, Result};
use crate::graph::Graph;
use crate::placement::MonitorPlacement;
use crate::routing::{enumerate_csp_paths_with, CspOptions, RoutingScheme, SeparationOracle, WalkOracle, DEFAULT_PATH_BUDGET};

/// Two distinct node sets crossed by exactly the same measurement paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPair {
    #[serde(rename = "U")]
    pub u: Vec<usize>,
    #[serde(rename = "W")]
    pub w: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentReport {
    pub mu: usize,
    pub witness: Option<WitnessPair>,
    pub scheme: RoutingScheme,
    pub alpha: Option<usize>,
    pub pairs_examined: u64,
    /// The search hit its cap before finding an unseparated pair.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub lower_bound_only: bool,
}

impl IdentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[derive(Clone, Debug)]
pub struct MuOptions {
    pub k_cap: Option<usize>,
    pub path_budget: usize,
    /// Input nodes that may end simple paths but never start them.
    pub endpoint_only: Vec<usize>,
}

impl Default for MuOptions {
    fn default() -> Self {
        MuOptions {
            k_cap: None,
            path_budget: DEFAULT_PATH_BUDGET,
            endpoint_only: Vec::new(),
        }
    }
}

/// Builds the separation oracle for a scheme: an enumerated path index for
/// simple paths, reachability for walks.
pub fn build_oracle<'a>(
    g: &'a Graph,
    chi: &MonitorPlacement,
    scheme: RoutingScheme,
    opts: &MuOptions,
) -> Result<Box<dyn SeparationOracle + 'a>> {
    Ok(match scheme {
        RoutingScheme::Csp => Box::new(enumerate_csp_paths_with(
            g,
            chi,
            &CspOptions {
                path_budget: opts.path_budget,
                endpoint_only: opts.endpoint_only.clone(),
            },
        )?),
        _ => Box::new(WalkOracle::new(g, chi, scheme)?),
    })
}

pub fn compute_mu(g: &Graph, chi: &MonitorPlacement, scheme: RoutingScheme, k_cap: Option<usize>) -> Result<IdentReport> {
    compute_mu_with(
        g,
        chi,
        scheme,
        &MuOptions {
            k_cap,
            ..MuOptions::default()
        },
    )
}

pub fn compute_mu_with(g: &Graph, chi: &MonitorPlacement, scheme: RoutingScheme, opts: &MuOptions) -> Result<IdentReport> {
    if let Some(cap) = opts.k_cap {
        ensure_domain!(cap >= 1, "k_cap must be at least 1");
    }
    let oracle = build_oracle(g, chi, scheme, opts)?;
    let limit = opts.k_cap.unwrap_or(usize::MAX);
    Ok(report(search_mu(oracle.as_ref(), limit), scheme, None))
}

/// μ restricted to pairs with both sides of size at most `alpha`. When no
/// such pair is unseparated the answer is vacuous and equals the node count.
pub fn compute_mu_truncated(g: &Graph, chi: &MonitorPlacement, scheme: RoutingScheme, alpha: usize) -> Result<IdentReport> {
    compute_mu_truncated_with(g, chi, scheme, alpha, &MuOptions::default())
}

pub fn compute_mu_truncated_with(
    g: &Graph,
    chi: &MonitorPlacement,
    scheme: RoutingScheme,
    alpha: usize,
    opts: &MuOptions,
) -> Result<IdentReport> {
    ensure_domain!(alpha >= 1, "alpha must be at least 1");
    let oracle = build_oracle(g, chi, scheme, opts)?;
    let mut outcome = search_mu(oracle.as_ref(), alpha);
    if outcome.witness.is_none() {
        // Larger levels add no pairs once both sides are capped at alpha.
        outcome.mu = oracle.node_count();
        outcome.capped = false;
    }
    Ok(report(outcome, scheme, Some(alpha)))
}

fn report(outcome: SearchOutcome, scheme: RoutingScheme, alpha: Option<usize>) -> IdentReport {
    IdentReport {
        mu: outcome.mu,
        witness: outcome.witness.map(|(u, w)| WitnessPair {
            u: u.to_vec(),
            w: w.to_vec(),
        }),
        scheme,
        alpha,
        pairs_examined: outcome.pairs_examined,
        lower_bound_only: outcome.capped,
    }
}

/// μ together with the simple-path count when the scheme enumerates paths.
pub fn mu_with_path_count(
    g: &Graph,
    chi: &MonitorPlacement,
    scheme: RoutingScheme,
    opts: &MuOptions,
) -> Result<(IdentReport, Option<usize>)> {
    let limit = opts.k_cap.unwrap_or(usize::MAX);
    if scheme == RoutingScheme::Csp {
        let idx = enumerate_csp_paths_with(
            g,
            chi,
            &CspOptions {
                path_budget: opts.path_budget,
                endpoint_only: opts.endpoint_only.clone(),
            },
        )?;
        let r = report(search_mu(&idx, limit), scheme, None);
        Ok((r, Some(idx.len())))
    } else {
        let oracle = WalkOracle::new(g, chi, scheme)?;
        Ok((report(search_mu(&oracle, limit), scheme, None), None))
    }
}
