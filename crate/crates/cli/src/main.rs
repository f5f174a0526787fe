//! `cagrover` command-line driver.
//!
//! Exit codes: 0 success, 2 input error, 3 infeasible, 4 capacity.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cagrover::bench::{
    brute_force, run_experiment, select, strategy_for, write_results_csv, CoverInstance,
    KappaRange, SolutionSet, StrategySpec,
};
use cagrover::constraints::{BlockKind, Selection, Strategy};
use cagrover::grover::Mode;
use cagrover::noise::{
    count_rows, run_noisy, write_counts_csv, NoiseModel, NoisyProgram, ShotPlan,
};
use cagrover::prep::{build_initializer, dicke11_circuit, dicke1_circuit, ghz_x_circuit};
use cagrover::resources::{proposition_check, tally, write_cost_csv, Proposition, StrategyCost};
use cagrover::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

const THREADS_VAR: &str = "CAGROVER_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "cagrover",
    version,
    about = "Grover search with constraint-aware initial states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report the selected sets, |F| and the optimal query count.
    Preprocess {
        #[command(flatten)]
        input: InputArgs,
        /// Also write the selected sets as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Success probability at one query count.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        /// Query count or `auto`.
        #[arg(long, default_value = "auto")]
        kappa: KappaRange,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Success probability over a range of query counts, one block of rows
    /// per strategy.
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        /// `a..b`, a single count, or `auto` for 0..2*kappa_opt.
        #[arg(long, default_value = "auto")]
        kappa: KappaRange,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-run solution counts under depolarizing noise.
    Noise {
        #[command(flatten)]
        input: InputArgs,
        /// Query count, range or `auto`.
        #[arg(long, default_value = "auto")]
        kappa: KappaRange,
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resource tallies and cost-model checks.
    Resources {
        #[command(subcommand)]
        what: ResourceCommand,
    },
}

#[derive(Subcommand, Debug)]
enum ResourceCommand {
    /// `S, O, D, kappa, R` per strategy and metric.
    Strategies {
        #[command(flatten)]
        input: InputArgs,
        /// Oracle cost `O`, the same for every strategy.
        #[arg(long, default_value_t = 0.0)]
        oracle: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tally of one preparation block.
    Block {
        #[arg(value_enum)]
        kind: BlockArg,
        /// Block size.
        mu: usize,
        /// Parity for `ghz`.
        #[arg(long, default_value_t = 0)]
        parity: u8,
    },
    /// Sufficient condition of one proposition.
    Proposition {
        #[arg(value_enum)]
        kind: PropositionArg,
        #[arg(long)]
        mu: usize,
        /// `O + D` of the strategy being improved on.
        #[arg(long)]
        od: f64,
        /// Preparation cost after the change; defaults to the reference
        /// construction's increase.
        #[arg(long)]
        s_next: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        s_prev: f64,
        /// `|F| / |S|` before the change; defaults to the smallest value the
        /// proposition allows.
        #[arg(long)]
        search_ratio: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BlockArg {
    Dicke1,
    Dicke11,
    Ghz,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PropositionArg {
    P1,
    P2,
    P3,
}

impl From<PropositionArg> for Proposition {
    fn from(p: PropositionArg) -> Self {
        match p {
            PropositionArg::P1 => Proposition::P1,
            PropositionArg::P2 => Proposition::P2,
            PropositionArg::P3 => Proposition::P3,
        }
    }
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Instance file (`universe:`, `subset <i>:`, optional `target:`).
    #[arg(long)]
    instance: PathBuf,
    /// uniform, cardinality, parity, mixed or sets:<c|r|p><j>,...; repeat
    /// for several strategies.
    #[arg(long, default_value = "cardinality")]
    strategy: Vec<StrategySpec>,
    /// Overlap threshold for cardinality and mixed preprocessing.
    #[arg(long)]
    eta: Option<usize>,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = 250)]
    shots: usize,
    /// 1000 shots per run instead of `--shots`.
    #[arg(long)]
    full_plan: bool,
    #[arg(long, default_value_t = 2026)]
    seed: u64,
    /// Error rate per one-qubit gate.
    #[arg(long, default_value_t = 1e-5)]
    p1: f64,
    /// Error rate per two-qubit gate.
    #[arg(long, default_value_t = 1e-4)]
    p2: f64,
}

impl PlanArgs {
    fn plan(&self) -> Result<ShotPlan> {
        let shots = if self.full_plan { 1000 } else { self.shots };
        ShotPlan::new(self.runs, shots, self.seed)
    }

    fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.p1, self.p2)
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Apply the gate-level diffusion circuit instead of the matrix-free
    /// reflection.
    #[arg(long)]
    exact: bool,
    /// Add noisy columns from trajectory sampling.
    #[arg(long)]
    noisy: bool,
    #[command(flatten)]
    plan: PlanArgs,
}

impl RunArgs {
    fn mode(&self) -> Result<Mode> {
        Ok(if self.noisy {
            Mode::CircuitNoisy {
                noise: self.plan.noise()?,
                plan: self.plan.plan()?,
            }
        } else if self.exact {
            Mode::CircuitExact
        } else {
            Mode::Ideal
        })
    }
}

struct Loaded {
    instance: CoverInstance,
    specs: Vec<StrategySpec>,
}

impl InputArgs {
    fn load(&self) -> Result<Loaded> {
        let text = std::fs::read_to_string(&self.instance)?;
        let instance = CoverInstance::parse(&text)?;
        let takes_eta = |s: &StrategySpec| {
            matches!(
                s,
                StrategySpec::Cardinality { .. } | StrategySpec::Mixed { .. }
            )
        };
        if self.eta.is_some() && !self.strategy.iter().any(takes_eta) {
            return Err(Error::Domain(
                "--eta needs a cardinality or mixed strategy".into(),
            ));
        }
        let specs = self
            .strategy
            .iter()
            .map(|s| match (s, self.eta) {
                (StrategySpec::Cardinality { .. }, Some(eta)) => StrategySpec::Cardinality { eta },
                (StrategySpec::Mixed { .. }, Some(eta)) => StrategySpec::Mixed { eta },
                (other, _) => other.clone(),
            })
            .collect();
        Ok(Loaded { instance, specs })
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) => 3,
        Error::Capacity(_) => 4,
        _ => 2,
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn set_line(prefix: char, source: usize, members: &std::collections::BTreeSet<usize>) -> String {
    let vars: Vec<String> = members.iter().map(|i| (i + 1).to_string()).collect();
    format!("{prefix}{} {{{}}}", source + 1, vars.join(", "))
}

fn report(
    spec: &StrategySpec,
    instance: &CoverInstance,
    strategy: &Strategy,
    solutions: &SolutionSet,
) {
    let sel = &strategy.selection;
    println!("strategy: {spec}");
    println!("variables: {}", instance.num_variables());
    println!("disjoint sets:");
    for s in &sel.disjoint_sets {
        let kind = match s.kind {
            BlockKind::Dicke { weight } => format!("weight {weight}"),
            BlockKind::Ghz { parity } => format!("parity {parity}"),
        };
        println!("  {} {kind}", set_line('C', s.source, &s.members));
    }
    if !sel.reduced_sets.is_empty() {
        println!("reduced sets:");
        for r in &sel.reduced_sets {
            let (lo, hi) = r.weight_window();
            println!(
                "  {} weight {lo}..={hi} overlap {}",
                set_line('R', r.source, &r.members),
                r.overlap
            );
        }
    }
    println!("|F| = {}", strategy.search_space);
    println!("reduction factor = {}", strategy.reduction_factor());
    println!("|S| = {}", solutions.len());
    match strategy.kappa_opt {
        Some(k) => println!("kappa_opt = {k}"),
        None => println!("kappa_opt = none"),
    }
}

fn write_sets_csv(out: &mut dyn Write, label: &str, sel: &Selection) -> Result<()> {
    let vars = |m: &std::collections::BTreeSet<usize>| {
        m.iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    for s in &sel.disjoint_sets {
        let (kind, value) = match s.kind {
            BlockKind::Dicke { weight } => ("dicke", weight),
            BlockKind::Ghz { parity } => ("ghz", usize::from(parity)),
        };
        writeln!(
            out,
            "{label},{kind},{},{},{value},0",
            s.source + 1,
            vars(&s.members)
        )?;
    }
    for r in &sel.reduced_sets {
        writeln!(
            out,
            "{label},reduced,{},{},{},{}",
            r.source + 1,
            vars(&r.members),
            r.target,
            r.overlap
        )?;
    }
    Ok(())
}

fn cmd_preprocess(input: &InputArgs, out: Option<&Path>) -> Result<()> {
    let Loaded { instance, specs } = input.load()?;
    let solutions = brute_force(&instance)?;
    let mut csv = out.map(|p| output(Some(p))).transpose()?;
    if let Some(w) = csv.as_mut() {
        writeln!(w, "strategy,kind,source,variables,value,overlap")?;
    }
    for (i, spec) in specs.iter().enumerate() {
        if i > 0 {
            println!();
        }
        let strategy = strategy_for(&instance, spec, &solutions)?;
        report(spec, &instance, &strategy, &solutions);
        if let Some(w) = csv.as_mut() {
            write_sets_csv(w.as_mut(), &spec.to_string(), &strategy.selection)?;
        }
    }
    if let Some(mut w) = csv {
        w.flush()?;
    }
    if solutions.is_empty() {
        return Err(Error::Infeasible("the instance has no solution".into()));
    }
    Ok(())
}

fn cmd_run(
    input: &InputArgs,
    kappa: &KappaRange,
    run: &RunArgs,
    out: Option<&Path>,
    sweep: bool,
) -> Result<()> {
    let Loaded { instance, specs } = input.load()?;
    let mode = run.mode()?;
    let mut rows = Vec::new();
    for spec in &specs {
        let range = match kappa {
            KappaRange::Auto if sweep => {
                let sols = brute_force(&instance)?;
                if sols.is_empty() {
                    return Err(Error::Infeasible("the instance has no solution".into()));
                }
                let k = strategy_for(&instance, spec, &sols)?.kappa_opt.unwrap_or(0);
                KappaRange::Range(0..=2 * k)
            }
            other => other.clone(),
        };
        rows.extend(run_experiment(&instance, spec, &range, &mode)?.rows);
    }
    let mut w = output(out)?;
    write_results_csv(&mut w, &rows)?;
    w.flush()?;
    Ok(())
}

fn cmd_noise(
    input: &InputArgs,
    kappa: &KappaRange,
    plan: &PlanArgs,
    out: Option<&Path>,
) -> Result<()> {
    let Loaded { instance, specs } = input.load()?;
    let (noise, shot_plan) = (plan.noise()?, plan.plan()?);
    let solutions = brute_force(&instance)?;
    if solutions.is_empty() {
        return Err(Error::Infeasible("the instance has no solution".into()));
    }
    let predicate = solutions.predicate();
    let mut rows = Vec::new();
    for spec in &specs {
        let strategy = strategy_for(&instance, spec, &solutions)?;
        let range = match kappa {
            KappaRange::Auto => {
                let k = strategy.kappa_opt.unwrap_or(0);
                k..=k
            }
            KappaRange::Range(r) => r.clone(),
        };
        let init = build_initializer(&strategy.selection, strategy.n)?;
        let program = NoisyProgram::grover(&init, &predicate, *range.end())?;
        let outcome = run_noisy(&program, &shot_plan, &noise)?;
        for k in range {
            eprintln!(
                "{spec} kappa {k}: mean {} std {} over {} runs",
                outcome.mean_fraction(k),
                outcome.std_fraction(k),
                outcome.runs()
            );
            rows.extend(count_rows(&strategy.label, k, &outcome, "noisy"));
        }
    }
    let mut w = output(out)?;
    write_counts_csv(&mut w, &rows)?;
    w.flush()?;
    Ok(())
}

fn cmd_resources(what: &ResourceCommand) -> Result<()> {
    match what {
        ResourceCommand::Strategies { input, oracle, out } => {
            let Loaded { instance, specs } = input.load()?;
            let solutions = brute_force(&instance)?;
            if solutions.is_empty() {
                return Err(Error::Infeasible("the instance has no solution".into()));
            }
            let mut costs = Vec::new();
            for spec in &specs {
                let sel = select(&instance, spec)?;
                let strategy = strategy_for(&instance, spec, &solutions)?;
                let init = build_initializer(&sel, instance.num_variables())?;
                costs.push((
                    spec.to_string(),
                    StrategyCost::of(&init, *oracle, strategy.kappa_opt.unwrap_or(0))?,
                ));
            }
            let mut w = output(out.as_deref())?;
            write_cost_csv(&mut w, &costs)?;
            w.flush()?;
        }
        ResourceCommand::Block { kind, mu, parity } => {
            let c = match kind {
                BlockArg::Dicke1 => dicke1_circuit(*mu)?,
                BlockArg::Dicke11 => dicke11_circuit(*mu)?,
                BlockArg::Ghz => ghz_x_circuit(*mu, *parity)?,
            };
            let t = tally(&c, false);
            println!("gates,two_qubit,depth");
            println!("{},{},{}", t.total_gates, t.two_qubit_gates, t.depth);
        }
        ResourceCommand::Proposition {
            kind,
            mu,
            od,
            s_next,
            s_prev,
            search_ratio,
        } => {
            let p = Proposition::from(*kind);
            let s_next = s_next.unwrap_or(s_prev + p.reference_delta(*mu));
            let ratio = search_ratio.unwrap_or(p.min_search_ratio());
            let c = proposition_check(p, *mu, s_next, *s_prev, *od, ratio)?;
            println!("proposition,mu,od,rhs,sufficient");
            println!("{kind:?},{mu},{od},{},{}", c.rhs, c.sufficient);
        }
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize =
            v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                Error::Domain(format!("{THREADS_VAR}={v} is not a positive integer"))
            })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Domain(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Preprocess { input, out } => cmd_preprocess(input, out.as_deref()),
        Command::Simulate {
            input,
            kappa,
            run,
            out,
        } => cmd_run(input, kappa, run, out.as_deref(), false),
        Command::Sweep {
            input,
            kappa,
            run,
            out,
        } => cmd_run(input, kappa, run, out.as_deref(), true),
        Command::Noise {
            input,
            kappa,
            plan,
            out,
        } => cmd_noise(input, kappa, plan, out.as_deref()),
        Command::Resources { what } => cmd_resources(what),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
