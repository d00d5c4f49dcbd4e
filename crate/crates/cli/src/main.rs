//! Command-line front end: generate → fractional → solve → rounds →
//! verify, plus the exhaustive oracle, flow decomposition, and DOT
//! export. Exit codes: 0 success/pass, 1 check failure, 2 usage or
//! parse error, 3 infeasible, 4 scale guard, 70 internal invariant
//! breach.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use unsplit_core::instances::{
    gen_cost_of_confluence, gen_from_disjoint_paths, gen_nonintegral, gen_random,
    gen_random_single_source, gen_tightness, DemandRegime, RandomSize,
};
use unsplit_core::solver::SolveRun;
use unsplit_core::{
    check_bipartite_tree, check_confluence, check_load_bound, check_load_bound_with,
    check_unsplittable, decompose, rat, route_four_rounds, route_general_rounds, route_six_rounds,
    solve_lower, solve_reversed, solve_upper, Direction, Flow, Instance, Rational, RoundsError,
    SolveError, UnsplittableSolution, VertexId,
};

use unsplit_cli::dot;
use unsplit_cli::formats::{
    emit_decomposition, emit_flow, emit_instance, emit_plan, emit_solution, number, parse_flow,
    parse_instance, parse_skeleton, parse_solution, FormatError,
};
use unsplit_cli::report::{render, NamedCheck, ReportFormat};

#[derive(Parser)]
#[command(
    name = "unsplit",
    about = "Exact tools for unsplittable transshipment routing",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark instance
    Gen(GenArgs),
    /// Route the balances fractionally or report a deficient cut
    Fractional {
        instance: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Round a fractional flow into one path per source-sink pair
    Solve {
        instance: PathBuf,
        flow: PathBuf,
        #[arg(long, value_enum, default_value_t = Variant::Upper)]
        variant: Variant,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Serve every sink within a bounded number of waves
    Rounds {
        instance: PathBuf,
        flow: PathBuf,
        #[arg(long, value_enum, default_value_t = Scheme::General)]
        scheme: Scheme,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check a solution file against its instance
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        /// Reference flow for the load-bound check
        #[arg(long)]
        flow: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Variant::Upper)]
        variant: Variant,
        #[arg(long, value_enum, default_value_t = Fmt::Text)]
        format: Fmt,
    },
    /// Exhaustively decide unsplittable feasibility on small instances
    Oracle {
        instance: PathBuf,
        /// Demand integral path values
        #[arg(long)]
        integral: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Split a flow into source-sink paths and leftover cycles
    Decompose {
        instance: PathBuf,
        flow: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Render the instance, and optionally a solution, as Graphviz
    Dot {
        instance: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Width parameter for the tightness and confluence families
    #[arg(long)]
    q: Option<u32>,
    /// Sharing parameter for the tightness family
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    vertices: Option<usize>,
    /// Random source-to-sink paths superposed into the flow
    #[arg(long)]
    paths: Option<usize>,
    /// Extra zero-flow arcs for topology variety
    #[arg(long, default_value_t = 0)]
    extra_arcs: usize,
    #[arg(long, value_enum, default_value_t = Regime::Third)]
    regime: Regime,
    /// Start every random path at vertex 0
    #[arg(long)]
    single_source: bool,
    /// Base graph for the reduction family: an instance file whose
    /// balances and capacities are ignored
    #[arg(long)]
    base: Option<PathBuf>,
    /// Terminal pair for the reduction family, as `source:sink`
    #[arg(long = "pair")]
    pairs: Vec<String>,
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Where to write the companion flow, for families that have one
    #[arg(long)]
    flow_out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Tightness,
    Confluence,
    Nonintegral,
    Reduction,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Regime {
    Quarter,
    Third,
    Below,
    Equal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    Upper,
    Lower,
    Reversed,
    Auto,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scheme {
    General,
    Six,
    Four,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fmt {
    Text,
    Kv,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn check() -> Self {
        Failure {
            code: 1,
            message: String::new(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn infeasible(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }

    fn scale(message: impl Into<String>) -> Self {
        Failure {
            code: 4,
            message: message.into(),
        }
    }

    fn breach(message: impl Into<String>) -> Self {
        Failure {
            code: 70,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Fractional { instance, out } => cmd_fractional(&instance, out.as_deref()),
        Command::Solve {
            instance,
            flow,
            variant,
            out,
        } => cmd_solve(&instance, &flow, variant, out.as_deref()),
        Command::Rounds {
            instance,
            flow,
            scheme,
            out,
        } => cmd_rounds(&instance, &flow, scheme, out.as_deref()),
        Command::Verify {
            instance,
            solution,
            flow,
            variant,
            format,
        } => cmd_verify(&instance, &solution, flow.as_deref(), variant, format),
        Command::Oracle {
            instance,
            integral,
            out,
        } => cmd_oracle(&instance, integral, out.as_deref()),
        Command::Decompose {
            instance,
            flow,
            out,
        } => cmd_decompose(&instance, &flow, out.as_deref()),
        Command::Dot {
            instance,
            solution,
            out,
        } => cmd_dot(&instance, solution.as_deref(), out.as_deref()),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn in_file(path: &Path, err: FormatError) -> Failure {
    Failure::usage(format!("{}: {err}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read_text(path)?).map_err(|e| in_file(path, e))
}

fn load_flow(path: &Path, inst: &Instance) -> Result<Flow, Failure> {
    parse_flow(&read_text(path)?, inst).map_err(|e| in_file(path, e))
}

fn load_solution(path: &Path) -> Result<UnsplittableSolution, Failure> {
    parse_solution(&read_text(path)?).map_err(|e| in_file(path, e))
}

fn max_supply(inst: &Instance) -> Rational {
    inst.sources()
        .iter()
        .map(|&s| inst.balance(s).clone())
        .max()
        .unwrap_or_else(|| rat(0))
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let (inst, flow) = match args.family {
        Family::Tightness => {
            let q = args.q.ok_or_else(|| Failure::usage("tightness needs --q"))?;
            let (inst, flow) =
                gen_tightness(q, args.k).map_err(|e| Failure::usage(e.to_string()))?;
            (inst, Some(flow))
        }
        Family::Confluence => {
            let q = args.q.ok_or_else(|| Failure::usage("confluence needs --q"))?;
            let inst = gen_cost_of_confluence(q).map_err(|e| Failure::usage(e.to_string()))?;
            (inst, None)
        }
        Family::Nonintegral => {
            let (inst, flow) = gen_nonintegral();
            (inst, Some(flow))
        }
        Family::Reduction => {
            let base = args
                .base
                .as_deref()
                .ok_or_else(|| Failure::usage("reduction needs --base"))?;
            let (vertices, base_arcs) =
                parse_skeleton(&read_text(base)?).map_err(|e| in_file(base, e))?;
            let pairs = args
                .pairs
                .iter()
                .map(|raw| parse_pair(raw))
                .collect::<Result<Vec<_>, Failure>>()?;
            let inst = gen_from_disjoint_paths(&vertices, &base_arcs, &pairs)
                .map_err(|e| Failure::usage(e.to_string()))?;
            (inst, None)
        }
        Family::Random => {
            let size = RandomSize {
                vertices: args
                    .vertices
                    .ok_or_else(|| Failure::usage("random needs --vertices"))?,
                paths: args
                    .paths
                    .ok_or_else(|| Failure::usage("random needs --paths"))?,
                extra_arcs: args.extra_arcs,
            };
            let regime = match args.regime {
                Regime::Quarter => DemandRegime::Quarter,
                Regime::Third => DemandRegime::Third,
                Regime::Below => DemandRegime::Below,
                Regime::Equal => DemandRegime::Equal,
            };
            let (inst, flow) = if args.single_source {
                gen_random_single_source(args.seed, size, regime)
            } else {
                gen_random(args.seed, size, regime)
            };
            (inst, Some(flow))
        }
    };
    write_out(args.out.as_deref(), &emit_instance(&inst))?;
    match (args.flow_out.as_deref(), flow) {
        (None, _) => Ok(()),
        (Some(path), Some(flow)) => write_out(Some(path), &emit_flow(&inst, &flow)),
        (Some(_), None) => Err(Failure::usage(
            "this family has no companion flow for --flow-out",
        )),
    }
}

fn parse_pair(raw: &str) -> Result<(VertexId, VertexId), Failure> {
    let bad = || Failure::usage(format!("bad --pair `{raw}`, expected `source:sink`"));
    let (s, t) = raw.split_once(':').ok_or_else(bad)?;
    Ok((
        VertexId(s.trim().parse().map_err(|_| bad())?),
        VertexId(t.trim().parse().map_err(|_| bad())?),
    ))
}

fn cmd_fractional(instance: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    match unsplit_core::fractional::solve_fractional(&inst) {
        Ok(flow) => write_out(out, &emit_flow(&inst, &flow)),
        Err(cut) => {
            let side: Vec<String> = cut.side.iter().map(|v| v.to_string()).collect();
            Err(Failure::infeasible(format!(
                "no feasible flow: cut capacity {} is short by {}; super-source side {{{}}}",
                number(&cut.capacity),
                number(&cut.deficiency),
                side.join(", ")
            )))
        }
    }
}

fn solve_failure(err: SolveError) -> Failure {
    match err {
        SolveError::Internal(msg) => Failure::breach(format!("internal invariant failed: {msg}")),
        other => Failure::usage(other.to_string()),
    }
}

fn run_variant(inst: &Instance, x: &Flow, variant: Variant) -> Result<SolveRun, SolveError> {
    match variant {
        Variant::Upper => solve_upper(inst, x),
        Variant::Lower => solve_lower(inst, x),
        Variant::Reversed => solve_reversed(inst, x),
        Variant::Auto => {
            if max_supply(inst) < inst.max_demand() {
                solve_reversed(inst, x)
            } else {
                solve_upper(inst, x)
            }
        }
    }
}

fn cmd_solve(
    instance: &Path,
    flow: &Path,
    variant: Variant,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    let x = load_flow(flow, &inst)?;
    let run = run_variant(&inst, &x, variant).map_err(solve_failure)?;
    write_out(out, &emit_solution(&run.solution, Some(&run.stats)))
}

fn cmd_rounds(
    instance: &Path,
    flow: &Path,
    scheme: Scheme,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    let x = load_flow(flow, &inst)?;
    let plan = match scheme {
        Scheme::General => route_general_rounds(&inst, &x),
        Scheme::Six => route_six_rounds(&inst, &x),
        Scheme::Four => route_four_rounds(&inst, &x),
    }
    .map_err(|e| match e {
        RoundsError::NetworkTooLarge => Failure::scale(e.to_string()),
        RoundsError::DemandAboveCapacity { .. }
        | RoundsError::BoundaryOpen
        | RoundsError::DemandTooLarge { .. } => Failure::infeasible(e.to_string()),
        RoundsError::FlowOverCapacity(_) => Failure::usage(e.to_string()),
        RoundsError::Solve(inner) => solve_failure(inner),
    })?;
    write_out(out, &emit_plan(&plan))
}

fn cmd_verify(
    instance: &Path,
    solution: &Path,
    flow: Option<&Path>,
    variant: Variant,
    format: Fmt,
) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    let sol = load_solution(solution)?;
    let mut checks = vec![NamedCheck {
        name: "unsplittable",
        report: check_unsplittable(&inst, &sol),
    }];
    if let Some(path) = flow {
        let x = load_flow(path, &inst)?;
        let report = match variant {
            Variant::Upper => check_load_bound(&inst, &x, &sol, Direction::Upper),
            Variant::Lower => check_load_bound(&inst, &x, &sol, Direction::Lower),
            Variant::Reversed => {
                check_load_bound_with(&inst, &x, &sol, Direction::Upper, &max_supply(&inst))
            }
            Variant::Auto => {
                let margin = inst.max_demand().min(max_supply(&inst));
                check_load_bound_with(&inst, &x, &sol, Direction::Upper, &margin)
            }
        };
        checks.push(NamedCheck {
            name: "load-bound",
            report,
        });
    }
    if variant != Variant::Reversed {
        checks.push(NamedCheck {
            name: "confluence",
            report: check_confluence(&inst, &sol),
        });
    }
    checks.push(NamedCheck {
        name: "pairing-forest",
        report: check_bipartite_tree(&inst, &sol),
    });
    let fmt = match format {
        Fmt::Text => ReportFormat::Text,
        Fmt::Kv => ReportFormat::Kv,
    };
    let (text, all_pass) = render(&checks, fmt);
    print!("{text}");
    if all_pass {
        Ok(())
    } else {
        Err(Failure::check())
    }
}

fn cmd_oracle(instance: &Path, integral: bool, out: Option<&Path>) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    let feasibility = unsplit_core::brute_force_feasible(&inst, integral)
        .map_err(|guard| Failure::scale(guard.to_string()))?;
    if !feasibility.feasible {
        let kind = if integral { "integral unsplittable" } else { "unsplittable" };
        return Err(Failure::infeasible(format!(
            "no {kind} transshipment exists"
        )));
    }
    let witness = feasibility
        .witness
        .expect("feasible verdicts carry a witness");
    write_out(out, &emit_solution(&witness, None))
}

fn cmd_decompose(instance: &Path, flow: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    let x = load_flow(flow, &inst)?;
    let dec = decompose(&inst, &x).map_err(|e| Failure::usage(e.to_string()))?;
    write_out(out, &emit_decomposition(&dec))
}

fn cmd_dot(instance: &Path, solution: Option<&Path>, out: Option<&Path>) -> Result<(), Failure> {
    let inst = load_instance(instance)?;
    let sol = solution.map(load_solution).transpose()?;
    write_out(out, &dot::render_dot(&inst, sol.as_ref()))
}
