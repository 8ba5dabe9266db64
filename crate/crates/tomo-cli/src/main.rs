use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tomo::agrid::{agrid_campaign, agrid_with, campaign_degree, CampaignConfig, DRule};
use tomo::embed::{find_embedding, DistanceRequirement, Requirement};
use tomo::experiment::{connected_erdos_renyi, random_monitor_campaign, truncated_campaign, write_histogram};
use tomo::graphml::{read_graphml, write_graphml};
use tomo::ident::{bounds_report, compute_mu_truncated_with, compute_mu_with, MuOptions};
use tomo::placement::{chi_grid, chi_tree, is_monitor_balanced, mdmp, random_placement, Balance, TieBreak};
use tomo::routing::{enumerate_csp_paths_with, CspOptions, RoutingScheme, DEFAULT_PATH_BUDGET};
use tomo::topology::{gen_hypergrid, gen_random_dag, gen_tree, random_line_free_tree, Orientation, TreeSpec};
use tomo::{Error, Graph, MonitorPlacement};

#[derive(Parser)]
#[command(name = "tomo", version, about = "Maximal identifiability of node failures in Boolean network tomography")]
struct Cli {
    /// Worker threads for the parallel searches.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute μ (or μ_α with --alpha) and the structural bounds.
    Mu(MuArgs),
    /// Structural bounds, line-freeness and monitor balance.
    Bounds(GraphPlacement),
    /// Boost the minimum degree and pick monitors.
    Agrid(AgridArgs),
    /// Seeded campaigns emitting CSV.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Search for an order embedding between two DAGs.
    Embed(EmbedArgs),
    /// List simple measurement paths, one per line.
    Paths(GraphPlacement),
    /// Write a generated or ingested graph as GraphML.
    Export(GraphOnly),
}

#[derive(Args, Clone)]
struct Source {
    /// Generator: hypergrid:n=4,d=2[,directed] | tree:complete-binary,depth=3,downward
    /// | tree:random,nodes=12 | er:n=8,p=0.3[,directed] | dag:n=7,p=0.4
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    gen: Option<String>,
    /// GraphML input file.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GraphOnly {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphPlacement {
    #[command(flatten)]
    source: Source,
    /// grid | tree | mdmp:d=3 | random:in=2,out=2 | file:placement.json
    #[arg(long)]
    chi: String,
    #[arg(long, default_value = "csp")]
    scheme: String,
    #[arg(long, default_value_t = DEFAULT_PATH_BUDGET)]
    path_budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MuArgs {
    #[command(flatten)]
    base: GraphPlacement,
    #[arg(long)]
    alpha: Option<usize>,
    #[arg(long)]
    k_cap: Option<usize>,
    /// Input nodes that may end but never start a simple path.
    #[arg(long, value_delimiter = ',')]
    endpoint_only: Vec<usize>,
}

#[derive(Args)]
struct AgridArgs {
    #[command(flatten)]
    source: Source,
    /// log | sqrtlog | fixed:k
    #[arg(long, default_value = "log")]
    d_rule: String,
    /// Add one to d when the graph already has minimum degree >= d.
    #[arg(long)]
    bump: bool,
    /// Also write the boosted graph as GraphML.
    #[arg(long)]
    graphml_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CampaignArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value = "log")]
    d_rule: String,
    #[arg(long)]
    bump: bool,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value = "csp")]
    scheme: String,
    #[arg(long, default_value_t = DEFAULT_PATH_BUDGET)]
    path_budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Experiment {
    /// μ(G) against μ(G^A) per run.
    Agrid(CampaignArgs),
    /// μ under random monitor placements.
    RandomMonitors {
        #[command(flatten)]
        campaign: CampaignArgs,
        /// Input and output nodes per placement.
        #[arg(long, default_value_t = 2)]
        monitors: usize,
        /// Boost the graph first (using --d-rule) and place monitors on G^A.
        #[arg(long)]
        augment: bool,
    },
    /// μ_α with α the floored average degree, on G and G^A.
    Truncated {
        #[command(flatten)]
        campaign: CampaignArgs,
        /// Write the percentage histogram here.
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EmbedArgs {
    /// Source DAG generator.
    #[arg(long)]
    g: String,
    /// Target DAG generator.
    #[arg(long)]
    h: String,
    /// any | di | dp
    #[arg(long, default_value = "any")]
    require: String,
    #[arg(long)]
    bijective: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum CliError {
    Tomo(Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Tomo(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Tomo(Error::Io(e))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Parsed `kind:key=value,flag,...`.
struct Spec<'a> {
    kind: &'a str,
    keys: Vec<(&'a str, Option<&'a str>)>,
}

impl<'a> Spec<'a> {
    fn parse(s: &'a str) -> Self {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let keys = rest
            .split(',')
            .filter(|p| !p.is_empty())
            .map(|p| match p.split_once('=') {
                Some((k, v)) => (k, Some(v)),
                None => (p, None),
            })
            .collect();
        Spec { kind, keys }
    }

    fn flag(&self, name: &str) -> bool {
        self.keys.iter().any(|(k, v)| *k == name && v.is_none())
    }

    fn get<T: std::str::FromStr>(&self, name: &str) -> CliResult<Option<T>> {
        match self.keys.iter().find(|(k, _)| *k == name) {
            Some((_, Some(v))) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("bad value for {name}: {v:?}"))),
            Some((_, None)) => usage(format!("{name} needs a value")),
            None => Ok(None),
        }
    }

    fn need<T: std::str::FromStr>(&self, name: &str) -> CliResult<T> {
        self.get(name)?
            .ok_or_else(|| CliError::Usage(format!("{} spec needs {name}=", self.kind)))
    }
}

/// A graph plus whatever the generator knows about canonical placements.
struct Built {
    graph: Graph,
    grid: Option<(usize, usize)>,
    tree: Option<TreeSpec>,
}

fn orientation(spec: &Spec) -> Orientation {
    if spec.flag("upward") {
        Orientation::Upward
    } else if spec.flag("undirected") {
        Orientation::Undirected
    } else {
        Orientation::Downward
    }
}

fn generate(text: &str, seed: u64) -> CliResult<Built> {
    let spec = Spec::parse(text);
    let plain = |graph| Built {
        graph,
        grid: None,
        tree: None,
    };
    match spec.kind {
        "hypergrid" | "grid" => {
            let (n, d) = (spec.need("n")?, spec.get("d")?.unwrap_or(2));
            let (graph, _) = gen_hypergrid(n, d, spec.flag("directed"))?;
            Ok(Built {
                graph,
                grid: Some((n, d)),
                tree: None,
            })
        }
        "tree" => {
            let t = if spec.flag("random") {
                random_line_free_tree(spec.need("nodes")?, seed, orientation(&spec))?
            } else {
                TreeSpec::complete_binary(spec.need("depth")?, orientation(&spec))
            };
            Ok(Built {
                graph: gen_tree(&t)?,
                grid: None,
                tree: Some(t),
            })
        }
        "er" => Ok(plain(connected_erdos_renyi(
            spec.need("n")?,
            spec.need("p")?,
            seed,
            spec.flag("directed"),
        )?)),
        "dag" => Ok(plain(gen_random_dag(spec.need("n")?, spec.need("p")?, seed)?)),
        other => usage(format!("unknown generator {other:?}")),
    }
}

fn load(source: &Source) -> CliResult<Built> {
    load_with_seed(source, source.seed)
}

fn load_with_seed(source: &Source, seed: u64) -> CliResult<Built> {
    match (&source.gen, &source.input) {
        (Some(g), None) => generate(g, seed),
        (None, Some(path)) => {
            let import = read_graphml(path)?;
            if import.self_loops_dropped > 0 {
                eprintln!("dropped {} self-loop(s)", import.self_loops_dropped);
            }
            Ok(Built {
                graph: import.graph,
                grid: None,
                tree: None,
            })
        }
        _ => usage("exactly one of --gen and --in is required"),
    }
}

fn placement(built: &Built, text: &str, seed: u64) -> CliResult<MonitorPlacement> {
    let spec = Spec::parse(text);
    Ok(match spec.kind {
        "grid" => match built.grid {
            Some((n, d)) => chi_grid(n, d)?,
            None => return usage("--chi grid needs a hypergrid generator"),
        },
        "tree" => match &built.tree {
            Some(t) => chi_tree(t)?,
            None => return usage("--chi tree needs a tree generator"),
        },
        "mdmp" => mdmp(&built.graph, spec.need("d")?, &TieBreak::AscendingId)?,
        "random" => random_placement(&built.graph, spec.need("in")?, spec.need("out")?, seed)?,
        "file" => {
            let path = text.strip_prefix("file:").unwrap_or_default();
            MonitorPlacement::from_json(&fs::read_to_string(path)?)?
        }
        other => return usage(format!("unknown placement {other:?}")),
    })
}

fn scheme(text: &str) -> CliResult<RoutingScheme> {
    Ok(text.parse()?)
}

fn d_rule(text: &str) -> CliResult<DRule> {
    Ok(text.parse()?)
}

fn emit(out: &Option<PathBuf>, body: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, body)?,
        None => io::stdout().write_all(body)?,
    }
    Ok(())
}

fn emit_json(out: &Option<PathBuf>, value: serde_json::Value) -> CliResult<()> {
    let mut text = serde_json::to_string(&value).expect("json value serializes");
    text.push('\n');
    emit(out, text.as_bytes())
}

fn cmd_mu(a: &MuArgs) -> CliResult<()> {
    let built = load(&a.base.source)?;
    let chi = placement(&built, &a.base.chi, a.base.source.seed)?;
    let scheme = scheme(&a.base.scheme)?;
    let opts = MuOptions {
        k_cap: a.k_cap,
        path_budget: a.base.path_budget,
        endpoint_only: a.endpoint_only.clone(),
    };
    let report = match a.alpha {
        Some(alpha) => compute_mu_truncated_with(&built.graph, &chi, scheme, alpha, &opts)?,
        None => compute_mu_with(&built.graph, &chi, scheme, &opts)?,
    };
    let bounds = bounds_report(&built.graph, &chi);
    emit_json(&a.base.out, json!({ "report": report, "bounds": bounds }))
}

fn cmd_bounds(a: &GraphPlacement) -> CliResult<()> {
    let built = load(&a.source)?;
    let chi = placement(&built, &a.chi, a.source.seed)?;
    let g = &built.graph;
    let bounds = bounds_report(g, &chi);
    let is_tree = !g.is_directed() && g.is_connected() && g.edge_count() + 1 == g.node_count();
    let balance = if is_tree {
        match is_monitor_balanced(g, &chi)? {
            Balance::Balanced => json!({ "monitor_balanced": true, "witness": null }),
            Balance::Unbalanced(w) => json!({ "monitor_balanced": false, "witness": w }),
        }
    } else {
        json!(null)
    };
    emit_json(&a.out, json!({ "bounds": bounds, "balance": balance }))
}

fn cmd_agrid(a: &AgridArgs) -> CliResult<()> {
    let built = load(&a.source)?;
    let d = campaign_degree(&built.graph, d_rule(&a.d_rule)?, a.bump);
    let r = agrid_with(&built.graph, d, a.source.seed, &TieBreak::AscendingId)?;
    if let Some(path) = &a.graphml_out {
        fs::write(path, write_graphml(&r.augmented))?;
    }
    emit_json(
        &a.out,
        json!({
            "d": r.d,
            "seed": r.seed,
            "edges_before": built.graph.edge_count(),
            "edges_after": r.augmented.edge_count(),
            "added_edges": r.added_edges,
            "placement": r.placement,
        }),
    )
}

fn campaign_options(c: &CampaignArgs) -> MuOptions {
    MuOptions {
        path_budget: c.path_budget,
        ..MuOptions::default()
    }
}

fn report_failures(failures: &[tomo::agrid::RunFailure]) -> CliResult<()> {
    for f in failures {
        eprintln!("run {} (seed {}) failed: {}", f.run, f.seed, f.message);
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Tomo(Error::domain(format!("{} run(s) failed", failures.len()))))
    }
}

fn graph_source(c: &CampaignArgs) -> impl Fn(u64) -> tomo::Result<Graph> + Sync + '_ {
    move |seed| match load_with_seed(&c.source, seed) {
        Ok(b) => Ok(b.graph),
        Err(CliError::Tomo(e)) => Err(e),
        Err(CliError::Usage(m)) => Err(Error::domain(m)),
    }
}

fn cmd_experiment(e: &Experiment) -> CliResult<()> {
    match e {
        Experiment::Agrid(c) => {
            load(&c.source)?;
            let cfg = CampaignConfig {
                d_rule: d_rule(&c.d_rule)?,
                bump: c.bump,
                runs: c.runs,
                seed: c.source.seed,
                scheme: scheme(&c.scheme)?,
                path_budget: c.path_budget,
            };
            let campaign = agrid_campaign(graph_source(c), &cfg)?;
            let mut buf = Vec::new();
            campaign.write_csv(&mut buf)?;
            emit(&c.out, &buf)?;
            let s = campaign.summary();
            let (gt, eq, lt) = s.fractions();
            eprintln!(
                "runs {} greater {:.3} equal {:.3} less {:.3} max increment {}",
                s.runs, gt, eq, lt, s.max_increment
            );
            report_failures(&campaign.failures)
        }
        Experiment::RandomMonitors {
            campaign: c,
            monitors,
            augment,
        } => {
            let built = load(&c.source)?;
            let mut g = built.graph;
            if *augment {
                let d = campaign_degree(&g, d_rule(&c.d_rule)?, c.bump);
                g = agrid_with(&g, d, c.source.seed, &TieBreak::AscendingId)?.augmented;
            }
            let table = random_monitor_campaign(
                &g,
                *monitors,
                *monitors,
                c.runs,
                c.source.seed,
                scheme(&c.scheme)?,
                &campaign_options(c),
            )?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            emit(&c.out, &buf)?;
            report_failures(&table.failures)
        }
        Experiment::Truncated { campaign: c, histogram } => {
            load(&c.source)?;
            let table = truncated_campaign(
                graph_source(c),
                d_rule(&c.d_rule)?,
                c.bump,
                c.runs,
                c.source.seed,
                scheme(&c.scheme)?,
                &campaign_options(c),
            )?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            emit(&c.out, &buf)?;
            if let Some(path) = histogram {
                let mut h = Vec::new();
                write_histogram(&mut h, &table.histogram_rows())?;
                fs::write(path, h)?;
            }
            report_failures(&table.failures)
        }
    }
}

fn cmd_embed(a: &EmbedArgs) -> CliResult<()> {
    let g = generate(&a.g, a.seed)?.graph;
    let h = generate(&a.h, a.seed)?.graph;
    let distance = match a.require.as_str() {
        "any" => DistanceRequirement::Any,
        "di" => DistanceRequirement::Increasing,
        "dp" => DistanceRequirement::Preserving,
        other => return usage(format!("unknown requirement {other:?}")),
    };
    let found = find_embedding(
        &g,
        &h,
        Requirement {
            bijective: a.bijective,
            distance,
        },
    )?;
    let text = found.map_or_else(|| "null".to_string(), |f| f.to_json());
    println!("{text}");
    Ok(())
}

fn cmd_paths(a: &GraphPlacement) -> CliResult<()> {
    let built = load(&a.source)?;
    let chi = placement(&built, &a.chi, a.source.seed)?;
    if scheme(&a.scheme)? != RoutingScheme::Csp {
        return usage("only simple-path routing can be listed");
    }
    let idx = enumerate_csp_paths_with(
        &built.graph,
        &chi,
        &CspOptions {
            path_budget: a.path_budget,
            ..CspOptions::default()
        },
    )?;
    emit(&a.out, idx.to_text().as_bytes())
}

fn cmd_export(a: &GraphOnly) -> CliResult<()> {
    let built = load(&a.source)?;
    emit(&a.out, write_graphml(&built.graph).as_bytes())
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.cmd {
        Cmd::Mu(a) => cmd_mu(a),
        Cmd::Bounds(a) => cmd_bounds(a),
        Cmd::Agrid(a) => cmd_agrid(a),
        Cmd::Experiment(e) => cmd_experiment(e),
        Cmd::Embed(a) => cmd_embed(a),
        Cmd::Paths(a) => cmd_paths(a),
        Cmd::Export(a) => cmd_export(a),
    }
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Usage(_) => 2,
        CliError::Tomo(Error::Domain(_) | Error::Capacity(_)) => 2,
        CliError::Tomo(Error::BudgetExceeded { .. }) => 3,
        CliError::Tomo(Error::Parse { .. } | Error::Io(_)) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if cli.workers > 0 {
        pool = pool.num_threads(cli.workers);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Tomo(t) => eprintln!("error: {t}"),
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
