//! Batch front-end: parse operator and tensor files, run the decision
//! procedures and solvers, and emit JSON reports and DOT graphs.
//!
//! Exit codes: `0` for a computed verdict or solve, `2` when an iteration
//! gives up without an answer (undetermined — never a refutation), `1`
//! for malformed input. Reports are versioned (`"schema": "pfgame/1"`)
//! and deterministic apart from their `timestamp` field.

use crate::decide::{
    decide_existence, decide_uniqueness, second_eigenvector, DecideError, Verdict,
};
use crate::dsl::{parse_operator, print_operator};
use crate::expr::{Operator, Sign};
use crate::games::{build_digraph, build_hypergraph, tensor_digraph, tensor_hypergraph, GameKind};
use crate::nodeset::NodeSet;
use crate::numerics::{
    mean_payoff, solve_ergodic, tensor_eigenpair, SolveConfig, SolveError,
};
use crate::tensor::Tensor;
use crate::transform::{recession, signature};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Decide robust existence and uniqueness of eigenvectors of monotone
/// additively homogeneous operators, and verify the verdicts numerically.
#[derive(Parser)]
#[command(name = "pfgame", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the full JSON report to this file.
    #[arg(long, global = true, value_name = "OUT")]
    json: Option<PathBuf>,
    /// Solver stop tolerance (Hilbert seminorm of successive iterates).
    #[arg(long, global = true, default_value_t = 1e-10, value_name = "REAL")]
    tol: f64,
    /// Solver iteration cap.
    #[arg(long, global = true, default_value_t = 100_000, value_name = "INT")]
    max_iters: usize,
    /// Seed recorded in reports, for reproducible batch workflows.
    #[arg(long, global = true, default_value_t = 0, value_name = "INT")]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether every additive perturbation of the operator has an
    /// eigenvector (no disjoint dominions in the game at infinity).
    DecideExistence {
        /// Operator file (header `operator n=<int>`, one coordinate per line).
        file: PathBuf,
    },
    /// Decide whether an eigenvector is unique up to additive constants
    /// (no disjoint dominions in the local game at the eigenvector).
    DecideUniqueness {
        /// Operator file.
        file: PathBuf,
        /// Decide at this eigenvector, given as comma-separated reals.
        #[arg(long, value_name = "VECTOR", conflicts_with = "solve")]
        at: Option<String>,
        /// Solve the ergodic equation first and decide at the found
        /// eigenvector (the default when --at is absent).
        #[arg(long)]
        solve: bool,
    },
    /// Solve the ergodic equation T(u) = λe + u by damped value iteration.
    Solve {
        /// Operator file.
        file: PathBuf,
    },
    /// Estimate the mean payoff vector Tᵏ(0)/k.
    MeanPayoff {
        /// Operator file.
        file: PathBuf,
        /// Number of iterations.
        #[arg(long, value_name = "INT")]
        k: usize,
    },
    /// Print the signature of a generalized-means operator: shifts
    /// deleted, finite nonzero means collapsed to max/min, zero-parameter
    /// means made uniform.
    Signature {
        /// Operator file.
        file: PathBuf,
    },
    /// Print the recession operator: the scaling limit k⁻¹·T(k·x).
    Recession {
        /// Operator file.
        file: PathBuf,
    },
    /// Export a game graph as DOT.
    Export {
        /// Operator file.
        file: PathBuf,
        /// Which graph: hypergraphs of either player at infinity (hplus,
        /// hminus), the convex-case digraph at infinity (ginf), or their
        /// local versions at a point (hu-plus, hu-minus, gu).
        #[arg(long, value_enum)]
        graph: GraphChoice,
        /// Base point for the local graphs, comma-separated.
        #[arg(long, value_name = "VECTOR",
              required_if_eq_any([("graph", "hu-plus"), ("graph", "hu-minus"), ("graph", "gu")]))]
        at: Option<String>,
        /// Keep only inclusion-minimal hyperarc tails.
        #[arg(long)]
        minimal: bool,
        /// Output path for the DOT file.
        #[arg(long, value_name = "OUT")]
        dot: PathBuf,
    },
    /// Decide whether a positive tensor has a positive eigenvector for
    /// every positive reweighting of its pattern.
    TensorDecide {
        /// Tensor file (header `tensor <d> <n>`, one entry per line).
        file: PathBuf,
    },
    /// Compute a positive tensor eigenpair through the additive conjugate.
    TensorSolve {
        /// Tensor file.
        file: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphChoice {
    Hplus,
    Hminus,
    Ginf,
    HuPlus,
    HuMinus,
    Gu,
}

impl GraphChoice {
    fn name(self) -> &'static str {
        match self {
            GraphChoice::Hplus => "hplus",
            GraphChoice::Hminus => "hminus",
            GraphChoice::Ginf => "ginf",
            GraphChoice::HuPlus => "hu-plus",
            GraphChoice::HuMinus => "hu-minus",
            GraphChoice::Gu => "gu",
        }
    }

    fn is_local(self) -> bool {
        matches!(
            self,
            GraphChoice::HuPlus | GraphChoice::HuMinus | GraphChoice::Gu
        )
    }
}

struct Outcome {
    command: &'static str,
    input: PathBuf,
    human: String,
    result: serde_json::Value,
    exit: i32,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if !outcome.human.is_empty() {
                println!("{}", outcome.human.trim_end());
            }
            if let Some(path) = &cli.json {
                let envelope = json!({
                    "schema": "pfgame/1",
                    "command": outcome.command,
                    "input": outcome.input.display().to_string(),
                    "seed": cli.seed,
                    "timestamp": std::time::SystemTime::now()
                        .duration_since(std::time::UNIX_EPOCH)
                        .map(|d| d.as_secs())
                        .unwrap_or(0),
                    "result": outcome.result,
                });
                let mut text = serde_json::to_string_pretty(&envelope).expect("valid JSON");
                text.push('\n');
                if let Err(err) = std::fs::write(path, text) {
                    eprintln!("error: cannot write {}: {err}", path.display());
                    return 1;
                }
            }
            outcome.exit
        }
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    }
}

fn solve_config(cli: &Cli) -> SolveConfig {
    SolveConfig {
        tolerance: cli.tol,
        max_iters: cli.max_iters,
        ..SolveConfig::default()
    }
}

fn read_operator(path: &Path) -> Result<Operator, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| format!("cannot read {}: {err}", path.display()))?;
    parse_operator(&text).map_err(|err| format!("{}: {err}", path.display()))
}

fn read_tensor(path: &Path) -> Result<Tensor, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| format!("cannot read {}: {err}", path.display()))?;
    text.parse::<Tensor>()
        .map_err(|err| format!("{}: {err}", path.display()))
}

fn parse_vector(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("`{}` is not a real number", piece.trim()))
        })
        .collect()
}

fn format_vector(v: &[f64]) -> String {
    let mut out = String::from("(");
    for (k, x) in v.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{x}");
    }
    out.push(')');
    out
}

fn describe_verdict(verdict: &Verdict) -> String {
    match verdict {
        Verdict::NoDisjointDominions => "no disjoint dominions".to_string(),
        Verdict::DisjointDominions {
            min_dominion,
            max_dominion,
        } => format!(
            "disjoint dominions: Min has {min_dominion}, Max has {max_dominion}"
        ),
    }
}

fn execute(cli: &Cli) -> Result<Outcome, String> {
    match &cli.command {
        Command::DecideExistence { file } => {
            let op = read_operator(file)?;
            let report = decide_existence(&op).map_err(|err| err.to_string())?;
            let mut human = describe_verdict(&report.verdict);
            match report.verdict {
                Verdict::NoDisjointDominions => {
                    human.push_str(": every additive perturbation has an eigenvector");
                }
                Verdict::DisjointDominions { .. } => {
                    human.push_str("; some additive perturbation has no eigenvector");
                }
            }
            Ok(Outcome {
                command: "decide-existence",
                input: file.clone(),
                human,
                result: report.to_json_value(),
                exit: 0,
            })
        }
        Command::DecideUniqueness { file, at, .. } => {
            let op = read_operator(file)?;
            let u = match at {
                Some(text) => parse_vector(text)?,
                None => match solve_ergodic(&op, &vec![0.0; op.n()], &solve_config(cli)) {
                    Ok(witness) => witness.u,
                    Err(SolveError::Input(err)) => return Err(err.to_string()),
                    Err(err @ SolveError::NonConvergence { .. }) => {
                        return Ok(undetermined("decide-uniqueness", file, &err))
                    }
                },
            };
            let report = decide_uniqueness(&op, &u).map_err(|err| match err {
                DecideError::NotAnEigenvector { residual } => format!(
                    "{} is not an eigenvector (residual {residual:e}); pass an exact \
                     eigenvector with --at or let --solve find one",
                    format_vector(&u)
                ),
                other => other.to_string(),
            })?;
            let mut result = report.to_json_value();
            result["at"] = json!(u);
            let mut human = format!("at u = {}: {}", format_vector(&u), describe_verdict(&report.verdict));
            if let Verdict::DisjointDominions {
                min_dominion,
                max_dominion,
            } = report.verdict
            {
                let v = second_eigenvector(&op, &u, min_dominion, max_dominion)
                    .map_err(|err| err.to_string())?;
                let _ = write!(
                    human,
                    "\nsecond eigenvector: {} (differs nonconstantly)",
                    format_vector(&v)
                );
                result["second_eigenvector"] = json!(v);
            } else {
                human.push_str(": the eigenvector is unique up to additive constants");
            }
            Ok(Outcome {
                command: "decide-uniqueness",
                input: file.clone(),
                human,
                result,
                exit: 0,
            })
        }
        Command::Solve { file } => {
            let op = read_operator(file)?;
            match solve_ergodic(&op, &vec![0.0; op.n()], &solve_config(cli)) {
                Ok(witness) => Ok(Outcome {
                    command: "solve",
                    input: file.clone(),
                    human: format!(
                        "lambda = {}\nu = {}\nresidual = {:e} after {} iterations",
                        witness.lambda,
                        format_vector(&witness.u),
                        witness.residual,
                        witness.iterations
                    ),
                    result: witness.to_json_value(),
                    exit: 0,
                }),
                Err(SolveError::Input(err)) => Err(err.to_string()),
                Err(err @ SolveError::NonConvergence { .. }) => {
                    Ok(undetermined("solve", file, &err))
                }
            }
        }
        Command::MeanPayoff { file, k } => {
            if *k == 0 {
                return Err("--k must be at least 1".to_string());
            }
            let op = read_operator(file)?;
            let payoff = mean_payoff(&op, *k);
            Ok(Outcome {
                command: "mean-payoff",
                input: file.clone(),
                human: format!("T^k(0)/k = {} at k = {k}", format_vector(&payoff)),
                result: json!({ "k": k, "mean_payoff": payoff }),
                exit: 0,
            })
        }
        Command::Signature { file } => {
            let op = read_operator(file)?;
            let sig = signature(&op).map_err(|err| err.to_string())?;
            let text = print_operator(&sig);
            Ok(Outcome {
                command: "signature",
                input: file.clone(),
                human: text.trim_end().to_string(),
                result: json!({ "operator": text }),
                exit: 0,
            })
        }
        Command::Recession { file } => {
            let op = read_operator(file)?;
            let text = print_operator(&recession(&op));
            Ok(Outcome {
                command: "recession",
                input: file.clone(),
                human: text.trim_end().to_string(),
                result: json!({ "operator": text }),
                exit: 0,
            })
        }
        Command::Export {
            file,
            graph,
            at,
            minimal,
            dot,
        } => {
            let op = read_operator(file)?;
            let game = if graph.is_local() {
                let u = parse_vector(at.as_deref().expect("clap enforces --at"))?;
                op.eval(&u).map_err(|err| err.to_string())?;
                GameKind::LocalAt(u)
            } else {
                if at.is_some() {
                    return Err(format!(
                        "--at does not apply to {}: the game at infinity has no base point",
                        graph.name()
                    ));
                }
                GameKind::AtInfinity
            };
            let (dot_text, graph_json) = match graph {
                GraphChoice::Hplus | GraphChoice::HuPlus => {
                    hypergraph_export(&op, &game, Sign::Plus, *minimal)?
                }
                GraphChoice::Hminus | GraphChoice::HuMinus => {
                    hypergraph_export(&op, &game, Sign::Minus, *minimal)?
                }
                GraphChoice::Ginf | GraphChoice::Gu => {
                    let digraph = build_digraph(&op, &game).map_err(|err| err.to_string())?;
                    let edges: Vec<serde_json::Value> = digraph
                        .edges()
                        .map(|(i, j)| json!([i + 1, j + 1]))
                        .collect();
                    (
                        digraph.to_dot(),
                        json!({ "n": digraph.n(), "edges": edges }),
                    )
                }
            };
            std::fs::write(dot, &dot_text)
                .map_err(|err| format!("cannot write {}: {err}", dot.display()))?;
            Ok(Outcome {
                command: "export",
                input: file.clone(),
                human: format!("wrote {} ({})", dot.display(), graph.name()),
                result: json!({
                    "graph": graph.name(),
                    "minimal": minimal,
                    "dot": dot.display().to_string(),
                    "content": graph_json,
                }),
                exit: 0,
            })
        }
        Command::TensorDecide { file } => {
            let tensor = read_tensor(file)?;
            let n = tensor.n();
            let classes = tensor_digraph(&tensor).final_classes();
            let (robust, reach) = if classes.len() == 1 {
                let oracle = tensor_hypergraph(&tensor);
                let reached = oracle.reach(classes[0]);
                (reached == NodeSet::full(n), reached)
            } else {
                (false, NodeSet::empty())
            };
            let mut human = format!(
                "positive eigenvector for every positive instance: {}",
                if robust { "YES" } else { "NO" }
            );
            for class in &classes {
                let _ = write!(human, "\nfinal class {class}");
            }
            if classes.len() == 1 && !robust {
                let _ = write!(
                    human,
                    "\nstates {} stay out of reach of the final class",
                    reach.complement(n)
                );
            }
            let mut result = json!({
                "robust_existence": robust,
                "final_classes": classes.iter().map(|c| c.one_based()).collect::<Vec<_>>(),
            });
            if classes.len() == 1 {
                result["reach"] = json!(reach.one_based());
            }
            Ok(Outcome {
                command: "tensor-decide",
                input: file.clone(),
                human,
                result,
                exit: 0,
            })
        }
        Command::TensorSolve { file } => {
            let tensor = read_tensor(file)?;
            match tensor_eigenpair(&tensor, &solve_config(cli)) {
                Ok(pair) => Ok(Outcome {
                    command: "tensor-solve",
                    input: file.clone(),
                    human: format!(
                        "lambda = {}\nu = {}\nresidual = {:e} after {} iterations",
                        pair.lambda,
                        format_vector(&pair.u),
                        pair.residual,
                        pair.iterations
                    ),
                    result: pair.to_json_value(),
                    exit: 0,
                }),
                Err(SolveError::Input(err)) => Err(err.to_string()),
                Err(err @ SolveError::NonConvergence { .. }) => {
                    Ok(undetermined("tensor-solve", file, &err))
                }
            }
        }
    }
}

fn hypergraph_export(
    op: &Operator,
    game: &GameKind,
    sign: Sign,
    minimal: bool,
) -> Result<(String, serde_json::Value), String> {
    if op.n() > 20 {
        return Err("hypergraph export materializes all tails and needs n <= 20".to_string());
    }
    let graph = build_hypergraph(op, game, sign);
    let json = if minimal {
        graph.minimal_tails().to_json_value()
    } else {
        graph.to_json_value()
    };
    Ok((graph.to_dot(minimal), json))
}

fn undetermined(command: &'static str, input: &Path, err: &SolveError) -> Outcome {
    let SolveError::NonConvergence {
        iterations,
        last_diff,
        residual,
    } = err
    else {
        unreachable!("only nonconvergence is undetermined");
    };
    let mut result = json!({
        "status": "undetermined",
        "iterations": iterations,
        "last_diff": last_diff,
    });
    if let Some(r) = residual {
        result["residual"] = json!(r);
    }
    Outcome {
        command,
        input: input.to_path_buf(),
        human: format!("undetermined: {err}"),
        result,
        exit: 2,
    }
}
