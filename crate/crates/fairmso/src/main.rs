//! Command-line interface for the fair vertex-set solver.
//!
//! Exit codes: 0 = answered, 2 = infeasible / property fails, 1 = error.

use std::collections::BTreeSet;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use fairmso::cvd;
use fairmso::graph::{mask_from, mask_vec, Graph, ModulatedGraph};
use fairmso::hardness::{
    binpack_to_dtuple, dtuple_to_fairfo, instance_metadata, BinPackingInstance, DTupleInstance,
};
use fairmso::logic::{evaluate, parse_formula, Formula, Preset, SetSpec};
use fairmso::oracle::{oracle_decision, oracle_min, Property};
use fairmso::solver::{solve_decision, solve_min, EvalCache, SolveConfig};

#[derive(Parser)]
#[command(name = "fairmso", version, about = "Fair vertex problems on cluster-modulated graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a fair vertex problem exactly via the shape pipeline.
    Solve(SolveArgs),
    /// Answer by brute-force enumeration (small graphs only).
    Oracle(OracleArgs),
    /// Compute a minimum cluster vertex deletion set.
    Cvd {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        json: bool,
    },
    /// Generate a hard instance from a packing problem.
    GenHard(GenHardArgs),
    /// Verify a claimed witness set.
    Check(CheckArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// Formula file (s-expression over Free).
    #[arg(long, conflicts_with = "problem")]
    formula: Option<String>,
    /// Built-in problem: vc, fvs, oct, ds, sigma-rho.
    #[arg(long)]
    problem: Option<String>,
    /// Sigma set for sigma-rho: comma list, or `N`.
    #[arg(long)]
    sigma: Option<String>,
    /// Rho set for sigma-rho: comma list, `N`, or `coN:list`.
    #[arg(long)]
    rho: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: String,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Decide this budget instead of minimizing.
    #[arg(long)]
    k: Option<u64>,
    /// Override the truncation threshold (odd).
    #[arg(long)]
    alpha: Option<u64>,
    /// Override the counting cap.
    #[arg(long)]
    gamma: Option<u64>,
    /// Modulator vertices, comma-separated; overrides the graph file.
    #[arg(long)]
    modulator: Option<String>,
    #[arg(long)]
    json: bool,
    /// Print the witness shape.
    #[arg(long)]
    dump_shapes: bool,
    /// Worker cap, accepted for interface stability (solver is sequential).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    graph: String,
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenHardArgs {
    #[arg(long, conflicts_with = "dtuple")]
    binpack: Option<String>,
    #[arg(long)]
    dtuple: Option<String>,
    /// Output prefix; writes PREFIX.graph, PREFIX.mso, PREFIX.meta.
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    graph: String,
    #[command(flatten)]
    problem: ProblemArgs,
    /// The claimed witness, comma-separated vertex indices (empty = ∅).
    #[arg(long, default_value = "")]
    set: String,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn parse_set_spec(text: &str) -> Result<SetSpec, String> {
    if text == "N" {
        return Ok(SetSpec::All);
    }
    let (cofinite, list) = match text.strip_prefix("coN:") {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let mut set = BTreeSet::new();
    for tok in list.split(',').filter(|t| !t.is_empty()) {
        set.insert(tok.parse::<u32>().map_err(|e| format!("bad set entry `{tok}`: {e}"))?);
    }
    Ok(if cofinite { SetSpec::Cofinite(set) } else { SetSpec::Finite(set) })
}

fn parse_index_list(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad index `{t}`: {e}")))
        .collect()
}

/// Resolve the problem flags into a formula plus an optional preset.
fn resolve_problem(args: &ProblemArgs) -> Result<(Formula, Option<Preset>), String> {
    match (&args.formula, &args.problem) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            let f = parse_formula(&text).map_err(|e| e.to_string())?;
            Ok((f, None))
        }
        (None, Some(name)) => {
            let preset = match name.as_str() {
                "vc" => Preset::Vc,
                "fvs" => Preset::Fvs,
                "oct" => Preset::Oct,
                "ds" => Preset::Ds,
                "sigma-rho" => {
                    let sigma = parse_set_spec(
                        args.sigma.as_deref().ok_or("sigma-rho needs --sigma")?,
                    )?;
                    let rho =
                        parse_set_spec(args.rho.as_deref().ok_or("sigma-rho needs --rho")?)?;
                    Preset::SigmaRho { sigma, rho }
                }
                other => return Err(format!("unknown problem `{other}`")),
            };
            preset.validate().map_err(|e| e.to_string())?;
            Ok((fairmso::logic::preset_formula(&preset), Some(preset)))
        }
        _ => Err("exactly one of --formula / --problem is required".into()),
    }
}

fn load_graph(path: &str) -> Result<(Graph, Option<Vec<usize>>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    Graph::parse(&text).map_err(|e| e.to_string())
}

fn run() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Cvd { graph, json } => cmd_cvd(&graph, json),
        Command::GenHard(args) => cmd_gen_hard(args),
        Command::Check(args) => cmd_check(args),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, String> {
    let _ = args.jobs;
    let (g, file_modulator) = load_graph(&args.graph)?;
    let (formula, preset) = resolve_problem(&args.problem)?;
    let modulator = match &args.modulator {
        Some(text) => parse_index_list(text)?,
        None => file_modulator.unwrap_or_else(|| cvd::find_modulator_min(&g)),
    };
    let mg = ModulatedGraph::new(g, modulator.clone()).map_err(|e| e.to_string())?;

    let mut heuristic = false;
    let cfg = match (&preset, args.alpha, args.gamma) {
        (Some(p), None, None) => match SolveConfig::for_preset(p) {
            Some(cfg) => cfg,
            None => {
                let (cfg, params) =
                    SolveConfig::from_formula(&formula, mg.d(), None, None)
                        .map_err(|e| e.to_string())?;
                heuristic = params.heuristic;
                cfg
            }
        },
        _ => {
            let (cfg, params) =
                SolveConfig::from_formula(&formula, mg.d(), args.alpha, args.gamma)
                    .map_err(|e| e.to_string())?;
            heuristic = params.heuristic;
            cfg
        }
    };

    let property = match &preset {
        Some(p) => Property::Preset(p.clone()),
        None => Property::Formula(formula.clone()),
    };
    let solution = match args.k {
        Some(k) => {
            let mut cache = EvalCache::new();
            solve_decision(&mg, &property, &cfg, k, &mut cache).map_err(|e| e.to_string())?
        }
        None => solve_min(&mg, &property, &cfg).map_err(|e| e.to_string())?,
    };

    match solution {
        Some(sol) => {
            let witness = mask_vec(sol.witness);
            if args.json {
                let mut obj = json!({
                    "k_star": sol.k,
                    "witness": witness,
                    "modulator": modulator,
                    "alpha": cfg.alpha,
                    "heuristic_parameters": heuristic,
                });
                if args.dump_shapes {
                    obj["shape"] = json!(format!("{:?}", sol.shape));
                }
                println!("{obj}");
            } else {
                let set = witness
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                println!("k*={} X={{{}}}", sol.k, set);
                println!("modulator={:?}", modulator);
                if heuristic {
                    println!("heuristic-parameters=true");
                }
                if args.dump_shapes {
                    println!("shape={:?}", sol.shape);
                }
            }
            Ok(ExitCode::from(0))
        }
        None => {
            if args.json {
                println!("{}", json!({ "feasible": false, "modulator": modulator }));
            } else {
                println!("infeasible");
            }
            Ok(ExitCode::from(2))
        }
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode, String> {
    let (g, _) = load_graph(&args.graph)?;
    let (formula, preset) = resolve_problem(&args.problem)?;
    let property = match preset {
        Some(p) => Property::Preset(p),
        None => Property::Formula(formula),
    };
    match args.k {
        Some(k) => {
            let witness =
                oracle_decision(&g, &property, k as usize).map_err(|e| e.to_string())?;
            match witness {
                Some(x) => {
                    if args.json {
                        println!("{}", json!({ "k": k, "witness": mask_vec(x) }));
                    } else {
                        println!("yes X={:?}", mask_vec(x));
                    }
                    Ok(ExitCode::from(0))
                }
                None => {
                    if args.json {
                        println!("{}", json!({ "feasible": false }));
                    } else {
                        println!("no");
                    }
                    Ok(ExitCode::from(2))
                }
            }
        }
        None => match oracle_min(&g, &property).map_err(|e| e.to_string())? {
            Some((k, x)) => {
                if args.json {
                    println!("{}", json!({ "k_star": k, "witness": mask_vec(x) }));
                } else {
                    println!("k*={} X={:?}", k, mask_vec(x));
                }
                Ok(ExitCode::from(0))
            }
            None => {
                if args.json {
                    println!("{}", json!({ "feasible": false }));
                } else {
                    println!("infeasible");
                }
                Ok(ExitCode::from(2))
            }
        },
    }
}

fn cmd_cvd(path: &str, json: bool) -> Result<ExitCode, String> {
    let (g, _) = load_graph(path)?;
    let d = cvd::find_modulator_min(&g);
    if json {
        println!("{}", json!({ "modulator": d, "size": d.len() }));
    } else {
        println!("modulator={:?} size={}", d, d.len());
    }
    Ok(ExitCode::from(0))
}

fn cmd_gen_hard(args: GenHardArgs) -> Result<ExitCode, String> {
    let dt = match (&args.binpack, &args.dtuple) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            let bp = BinPackingInstance::parse(&text).map_err(|e| e.to_string())?;
            binpack_to_dtuple(&bp)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            DTupleInstance::parse(&text).map_err(|e| e.to_string())?
        }
        _ => return Err("exactly one of --binpack / --dtuple is required".into()),
    };
    let inst = dtuple_to_fairfo(&dt).map_err(|e| e.to_string())?;
    for w in &inst.warnings {
        eprintln!("warning: {w}");
    }
    let expected = if dt.tuples.iter().map(|t| t.iter().sum::<u64>()).sum::<u64>() <= 24 {
        Some(dt.brute_force())
    } else {
        None
    };
    let write = |suffix: &str, content: &str| -> Result<(), String> {
        let path = format!("{}.{}", args.out, suffix);
        std::fs::write(&path, content).map_err(|e| format!("{path}: {e}"))
    };
    write("graph", &inst.graph.to_text(Some(&inst.modulator)))?;
    write("mso", &format!("{}\n", inst.formula))?;
    write("meta", &instance_metadata(&dt, &inst, expected))?;
    println!(
        "wrote {}.graph {}.mso {}.meta (n={}, k={})",
        args.out,
        args.out,
        args.out,
        inst.graph.n(),
        inst.k
    );
    Ok(ExitCode::from(0))
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode, String> {
    let (g, _) = load_graph(&args.graph)?;
    let (formula, _) = resolve_problem(&args.problem)?;
    let witness = parse_index_list(&args.set)?;
    if let Some(&v) = witness.iter().find(|&&v| v >= g.n()) {
        return Err(format!("witness vertex {v} out of range"));
    }
    let x = mask_from(witness.iter().copied());
    let holds = evaluate(&g, x, &formula);
    let fc = g.fair_cost(x) as u64;
    let within = args.k.map_or(true, |k| fc <= k);
    let ok = holds && within;
    if args.json {
        println!(
            "{}",
            json!({ "satisfies": holds, "fair_cost": fc, "within_budget": within, "ok": ok })
        );
    } else {
        println!("satisfies={holds} fair_cost={fc} within_budget={within}");
    }
    Ok(ExitCode::from(if ok { 0 } else { 2 }))
}
