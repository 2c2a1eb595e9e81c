//! Command line front end: load systems of constraints, run causal
//! ordering, query separations, apply interventions, predict effects,
//! verify numerically, and export graphs.
//!
//! Exit codes: 0 on success, 1 on domain errors (unsolvable systems,
//! non-cluster targets, targets in the incomplete part, ...), 2 on usage
//! and parse errors.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use causal_ordering::dot::{bipartite_to_dot, cluster_graph_to_dot, mixed_graph_to_dot};
use causal_ordering::interventions::{
    perfect_intervene, predict_perfect_effects, predict_soft_effects, soft_intervene,
    InterventionSpec, PerfectInterventionSpec, SoftInterventionSpec,
};
use causal_ordering::markov::{
    decluster, marginalize, markov_ordering_graph, markov_ordering_restricted,
};
use causal_ordering::matching::perfect_matching;
use causal_ordering::numeric::{
    verify_intervention_effects, verify_markov, VerifyReport,
};
use causal_ordering::ordering::{order_cd, order_msc, order_pm, orient};
use causal_ordering::separation::{d_separated, sigma_separated};
use causal_ordering::system::{bipartite_of, load_system, system_to_json, SystemOfConstraints};
use causal_ordering::{DirectedClusterGraph, DirectedMixedGraph, Error};

#[derive(Parser)]
#[command(
    name = "causal-ordering",
    about = "Causal ordering graphs, Markov ordering graphs, separation queries, interventions, and numeric verification for systems of constraints",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Msc,
    Pm,
    Cd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Exportable {
    Bipartite,
    Co,
    Mo,
}

#[derive(Subcommand)]
enum Command {
    /// Load a system file and check every declared invariant.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Compute the causal ordering graph.
    Order {
        #[arg(long)]
        input: PathBuf,
        /// msc: minimal self-contained sets; pm: perfect matching; cd:
        /// coarse decomposition (works on any input).
        #[arg(long, value_enum, default_value = "cd")]
        algorithm: Algorithm,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
    /// Compute the Markov ordering graph.
    Markov {
        #[arg(long)]
        input: PathBuf,
        /// Restrict to the complete and overcomplete parts.
        #[arg(long)]
        restricted: bool,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
    /// d-separation query on the Markov ordering graph of a system, or on
    /// an explicit graph file.
    Dsep(SeparationArgs),
    /// sigma-separation query on the matched directed graph of a system,
    /// or on an explicit graph file.
    Sigsep(SeparationArgs),
    /// Apply an intervention and write the intervened system.
    Intervene {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        intervention: InterventionArgs,
        /// Output path; `-` writes to standard output.
        #[arg(long)]
        output: String,
    },
    /// Predict which variables an intervention can and cannot move.
    Predict {
        #[arg(long)]
        input: PathBuf,
        /// Soft intervention target (a constraint id).
        #[arg(long, conflicts_with = "perfect")]
        soft: Option<String>,
        /// Perfect intervention targets, `f:v[,f:v...]`.
        #[arg(long)]
        perfect: Option<String>,
    },
    /// Sample the system and verify Markov and intervention predictions.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Intervention to verify: inline `f:v=VAL[,f:v=VAL...]` or
        /// `@spec.json` holding {"soft": {...}} or {"perfect": {...}}.
        #[arg(long)]
        intervention: Option<String>,
        /// Write the JSON report here (`-` for standard output).
        #[arg(long)]
        report: Option<String>,
    },
    /// Export a derived graph.
    Export {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        what: Exportable,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
}

#[derive(Args)]
struct SeparationArgs {
    /// System file; the query graph is derived from it.
    #[arg(long, conflicts_with = "graph")]
    input: Option<PathBuf>,
    /// Graph file: {"vertices": [...], "directed": [[a,b],...],
    /// "bidirected": [[a,b],...]} or the cluster form
    /// {"clusters": [[ids],...], "edges": [["v", index],...]}.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Comma-separated vertex ids.
    #[arg(long, value_delimiter = ',')]
    x: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    y: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    given: Vec<String>,
}

#[derive(Args)]
struct InterventionArgs {
    /// Perfect intervention, `f:v=VAL[,f:v=VAL...]`.
    #[arg(long, conflicts_with_all = ["soft", "coeff", "constant", "form"])]
    perfect: Option<String>,
    /// Soft intervention target (a constraint id).
    #[arg(long)]
    soft: Option<String>,
    /// Coefficient for the soft intervention, `id=VAL`; repeatable.
    #[arg(long)]
    coeff: Vec<String>,
    /// Constant for the soft intervention.
    #[arg(long)]
    constant: Option<f64>,
    /// Functional form for the soft intervention; defaults to the form of
    /// the targeted constraint.
    #[arg(long)]
    form: Option<String>,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        match error {
            Error::Parse(_) => Failure::Usage(error.to_string()),
            _ => Failure::Domain(error.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &PathBuf) -> Result<SystemOfConstraints, Failure> {
    load_system(path).map_err(Failure::from)
}

fn parse_perfect_pairs(text: &str, with_values: bool) -> Result<Vec<(String, String, f64)>, Failure> {
    let mut pairs = Vec::new();
    for part in text.split(',') {
        let (target, value) = match part.split_once('=') {
            Some((target, value)) => {
                let value: f64 = value.parse().map_err(|_| {
                    Failure::Usage(format!("bad intervention value in `{part}`"))
                })?;
                (target, value)
            }
            None if !with_values => (part, 0.0),
            None => {
                return Err(Failure::Usage(format!(
                    "expected `f:v=VALUE`, got `{part}`"
                )))
            }
        };
        let (f, v) = target.split_once(':').ok_or_else(|| {
            Failure::Usage(format!("expected `f:v`, got `{target}`"))
        })?;
        pairs.push((f.trim().to_string(), v.trim().to_string(), value));
    }
    Ok(pairs)
}

fn parse_soft_spec(
    system: &SystemOfConstraints,
    args: &InterventionArgs,
) -> Result<SoftInterventionSpec, Failure> {
    let target = args
        .soft
        .clone()
        .ok_or_else(|| Failure::Usage("one of --perfect or --soft is required".to_string()))?;
    let original = system
        .constraint(&target)
        .ok_or_else(|| Failure::Domain(format!("unknown constraint `{target}`")))?;
    let form = match args.form.as_deref() {
        None => original.form,
        Some(text) => serde_json::from_value(serde_json::Value::String(text.to_string()))
            .map_err(|_| Failure::Usage(format!("unknown form `{text}`")))?,
    };
    let mut coefficients = std::collections::BTreeMap::new();
    for entry in &args.coeff {
        let (id, value) = entry
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("expected `id=VALUE`, got `{entry}`")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Failure::Usage(format!("bad coefficient in `{entry}`")))?;
        coefficients.insert(id.trim().to_string(), value);
    }
    Ok(SoftInterventionSpec {
        target,
        form,
        coefficients,
        constant: args.constant,
    })
}

fn parse_verify_intervention(
    text: &str,
) -> Result<InterventionSpec, Failure> {
    if let Some(path) = text.strip_prefix('@') {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read `{path}`: {e}")))?;
        return serde_json::from_str(&raw)
            .map_err(|e| Failure::Usage(format!("bad intervention spec: {e}")));
    }
    Ok(InterventionSpec::Perfect(PerfectInterventionSpec {
        pairs: parse_perfect_pairs(text, true)?,
    }))
}

fn id_set(ids: &[String]) -> BTreeSet<String> {
    ids.iter()
        .filter(|s| !s.is_empty())
        .cloned()
        .collect()
}

fn print_cluster_graph(
    graph: &DirectedClusterGraph,
    exogenous: &BTreeSet<String>,
    format: Format,
) {
    match format {
        Format::Dot => print!("{}", cluster_graph_to_dot(graph, exogenous)),
        Format::Json => print!("{}", graph.to_json()),
    }
}

fn print_mixed_graph(graph: &DirectedMixedGraph, exogenous: &BTreeSet<String>, format: Format) {
    match format {
        Format::Dot => print!("{}", mixed_graph_to_dot(graph, exogenous)),
        Format::Json => print!("{}", graph.to_json()),
    }
}

fn separation_graph(
    args: &SeparationArgs,
    sigma: bool,
) -> Result<DirectedMixedGraph, Failure> {
    if let Some(input) = &args.input {
        let system = load(input)?;
        let graph = bipartite_of(&system);
        if sigma {
            // The matched directed graph with constraint vertices
            // marginalized out; cyclic whenever the system has feedback.
            let matching = perfect_matching(&graph.endogenous_subgraph())
                .map_err(|_| Failure::Domain(
                    "sigma-separation needs a self-contained endogenous part".to_string(),
                ))?;
            let oriented = orient(&graph, &matching).map_err(Failure::from)?;
            Ok(marginalize(&oriented, graph.constraints()).map_err(Failure::from)?)
        } else {
            Ok(markov_ordering_restricted(&graph))
        }
    } else if let Some(path) = &args.graph {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read `{}`: {e}", path.display())))?;
        if serde_json::from_str::<serde_json::Value>(&text)
            .map_err(|e| Failure::Usage(e.to_string()))?
            .get("clusters")
            .is_some()
        {
            let clustered =
                DirectedClusterGraph::from_json(&text).map_err(Failure::from)?;
            Ok(decluster(&clustered))
        } else {
            Ok(DirectedMixedGraph::from_json(&text).map_err(Failure::from)?)
        }
    } else {
        Err(Failure::Usage(
            "one of --input or --graph is required".to_string(),
        ))
    }
}

fn run_separation(args: &SeparationArgs, sigma: bool) -> Result<(), Failure> {
    let graph = separation_graph(args, sigma)?;
    let x = id_set(&args.x);
    let y = id_set(&args.y);
    let z = id_set(&args.given);
    let separated = if sigma {
        sigma_separated(&graph, &x, &y, &z).map_err(Failure::from)?
    } else {
        d_separated(&graph, &x, &y, &z).map_err(Failure::from)?
    };
    println!("separated: {separated}");
    Ok(())
}

fn format_set(ids: &BTreeSet<String>) -> String {
    if ids.is_empty() {
        "(none)".to_string()
    } else {
        ids.iter().cloned().collect::<Vec<_>>().join(", ")
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { input } => {
            let system = load(&input)?;
            for lonely in system.isolated_variables() {
                eprintln!("warning: variable `{lonely}` appears in no constraint");
            }
            println!(
                "valid: {} variables ({} exogenous), {} constraints",
                system.variables.len(),
                system.exogenous_ids().len(),
                system.constraints.len()
            );
            Ok(())
        }
        Command::Order {
            input,
            algorithm,
            format,
        } => {
            let system = load(&input)?;
            let graph = bipartite_of(&system);
            let ordering = match algorithm {
                Algorithm::Msc => order_msc(&graph).map_err(Failure::from)?,
                Algorithm::Pm => order_pm(&graph).map_err(Failure::from)?,
                Algorithm::Cd => order_cd(&graph),
            };
            print_cluster_graph(&ordering, graph.exogenous(), format);
            Ok(())
        }
        Command::Markov {
            input,
            restricted,
            format,
        } => {
            let system = load(&input)?;
            let graph = bipartite_of(&system);
            let markov = if restricted {
                markov_ordering_restricted(&graph)
            } else {
                markov_ordering_graph(&graph)
            };
            print_mixed_graph(&markov, graph.exogenous(), format);
            Ok(())
        }
        Command::Dsep(args) => run_separation(&args, false),
        Command::Sigsep(args) => run_separation(&args, true),
        Command::Intervene {
            input,
            intervention,
            output,
        } => {
            let system = load(&input)?;
            let intervened = if let Some(text) = &intervention.perfect {
                let pairs = parse_perfect_pairs(text, true)?;
                perfect_intervene(&system, &PerfectInterventionSpec { pairs })
                    .map_err(Failure::from)?
            } else {
                let spec = parse_soft_spec(&system, &intervention)?;
                soft_intervene(&system, &spec).map_err(Failure::from)?
            };
            let text = system_to_json(&intervened);
            if output == "-" {
                print!("{text}");
            } else {
                std::fs::write(&output, text)
                    .map_err(|e| Failure::Domain(format!("cannot write `{output}`: {e}")))?;
            }
            Ok(())
        }
        Command::Predict {
            input,
            soft,
            perfect,
        } => {
            let system = load(&input)?;
            let graph = bipartite_of(&system);
            let prediction = if let Some(target) = soft {
                predict_soft_effects(&graph, &target).map_err(Failure::from)?
            } else if let Some(text) = perfect {
                let pairs = parse_perfect_pairs(&text, false)?;
                let targets_f: Vec<String> = pairs.iter().map(|(f, _, _)| f.clone()).collect();
                let targets_v: Vec<String> = pairs.iter().map(|(_, v, _)| v.clone()).collect();
                predict_perfect_effects(&graph, &targets_f, &targets_v).map_err(Failure::from)?
            } else {
                return Err(Failure::Usage(
                    "one of --soft or --perfect is required".to_string(),
                ));
            };
            println!("generic: {}", format_set(&prediction.generic));
            println!("none: {}", format_set(&prediction.none));
            Ok(())
        }
        Command::Verify {
            input,
            alpha,
            n,
            seed,
            intervention,
            report,
        } => {
            let system = load(&input)?;
            let (markov, solvability) =
                verify_markov(&system, alpha, n, seed).map_err(Failure::from)?;
            let mut interventions = Vec::new();
            if let Some(text) = &intervention {
                let spec = parse_verify_intervention(text)?;
                interventions.push(
                    verify_intervention_effects(&system, &spec, n, seed)
                        .map_err(Failure::from)?,
                );
            }

            println!("solvability:");
            for entry in &solvability {
                println!(
                    "  {:60} solvable={} condition={:.3e}",
                    format_set(&entry.cluster),
                    entry.solvable,
                    entry.condition
                );
            }
            println!(
                "markov: alpha={} n={} seed={} | {} independences, {} rejected | {} dependences, {} rejected{}",
                markov.alpha,
                markov.n,
                markov.seed,
                markov.independent_total,
                markov.independent_rejections,
                markov.dependent_total,
                markov.dependent_rejections,
                if markov.sigma_checked {
                    format!(" | sigma mismatches: {}", markov.sigma_mismatches)
                } else {
                    String::new()
                }
            );
            for query in &markov.queries {
                println!(
                    "  {} _||_ {} | {{{}}}: predicted={} r={:+.4} p={:.4}",
                    query.x,
                    query.y,
                    query.z.iter().cloned().collect::<Vec<_>>().join(", "),
                    if query.predicted_independent { "indep" } else { "dep" },
                    query.partial_corr,
                    query.p_value
                );
            }
            for check in &interventions {
                println!("intervention: {}", check.description);
                for non_effect in &check.non_effects {
                    println!(
                        "  non-effect {}: max |diff| = {:.3e} ({})",
                        non_effect.variable,
                        non_effect.max_abs_diff,
                        if non_effect.within_tolerance { "ok" } else { "MOVED" }
                    );
                }
                for generic in &check.generic_effects {
                    println!(
                        "  generic {}: KS = {:.4}",
                        generic.variable, generic.ks_statistic
                    );
                }
            }

            let failed_independences = markov.independent_rejections;
            let moved = interventions
                .iter()
                .flat_map(|c| &c.non_effects)
                .filter(|c| !c.within_tolerance)
                .count();
            if let Some(path) = report {
                let full = VerifyReport {
                    markov: markov.queries.clone(),
                    interventions: interventions.clone(),
                    solvability: solvability.clone(),
                };
                let mut text =
                    serde_json::to_string_pretty(&full).expect("report serializes");
                text.push('\n');
                if path == "-" {
                    print!("{text}");
                } else {
                    std::fs::write(&path, text)
                        .map_err(|e| Failure::Domain(format!("cannot write `{path}`: {e}")))?;
                }
            }
            if failed_independences > 0 || moved > 0 {
                return Err(Failure::Domain(format!(
                    "{failed_independences} predicted independences rejected, {moved} predicted non-effects moved"
                )));
            }
            Ok(())
        }
        Command::Export {
            input,
            what,
            format,
        } => {
            let system = load(&input)?;
            let graph = bipartite_of(&system);
            match what {
                Exportable::Bipartite => match format {
                    Format::Dot => print!("{}", bipartite_to_dot(&graph)),
                    Format::Json => print!("{}", graph.to_json()),
                },
                Exportable::Co => {
                    print_cluster_graph(&order_cd(&graph), graph.exogenous(), format)
                }
                Exportable::Mo => print_mixed_graph(
                    &markov_ordering_graph(&graph),
                    graph.exogenous(),
                    format,
                ),
            }
            Ok(())
        }
    }
}
