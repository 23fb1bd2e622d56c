//! `posthoc` — post hoc false positive bounds over reference families.
//!
//! Subcommands: `validate` (forest check and structure summary), `bound`
//! (evaluate a bound on a selection or along top-k selections), `calibrate`
//! (budgets from p-values), `envelope` (bound curves as CSV), `simulate`
//! (the seeded experiment harness) and `ratio-curve` (the analytic
//! DKW/Simes comparison).
//!
//! Exit codes: 0 success, 1 for I/O or parse failures, 2 for domain and
//! precondition failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use posthoc_core::bounds::{
    v_bar, v_bar_envelope, v_star, v_star_bruteforce, v_tilde, ForestEvaluator, Selection,
};
use posthoc_core::calibration::{calibrate_family, CalibrationConfig, CalibrationMethod};
use posthoc_core::family::{build_index, validate_forest};
use posthoc_core::simulation::{
    envelope, ratio_curve, sort_order, EnvelopeMethod, RatioCurveInput, SignalLayout,
    SimulationConfig,
};

use posthoc_cli::error::CliError;
use posthoc_cli::formats::{g17, read_pvalues, read_selection, FamilyFile};
use posthoc_cli::sim::{run_simulation, thread_count, SimulateSpec};

#[derive(Parser)]
#[command(name = "posthoc", version, about = "Post hoc false positive bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the forest condition and report the family structure.
    Validate(ValidateArgs),
    /// Evaluate a post hoc bound on a selection.
    Bound(BoundArgs),
    /// Attach calibrated budgets to regions from p-values.
    Calibrate(CalibrateArgs),
    /// Bound curves over the top-k selections, as CSV.
    Envelope(EnvelopeArgs),
    /// Run the simulation experiment and write envelope/coverage files.
    Simulate(SimulateArgs),
    /// The analytic DKW/Simes expectation ratio as a function of effect size.
    RatioCurve(RatioCurveArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// Family JSON file.
    #[arg(long)]
    family: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundMethod {
    /// Optimal bound on forest families.
    Star,
    /// Subset-minimum bound (equals the optimal bound on forests).
    Tilde,
    /// Single-member interpolation bound.
    Bar,
    /// Exhaustive oracle (m <= 20).
    Brute,
}

#[derive(Args)]
struct BoundArgs {
    /// Family JSON file with budgets.
    #[arg(long)]
    family: PathBuf,
    /// Selection file: one 1-based index per line.
    #[arg(long, conflicts_with_all = ["topk", "all_topk"])]
    selection: Option<PathBuf>,
    /// Evaluate on the k smallest p-values of --pvalues.
    #[arg(long, requires = "pvalues", conflicts_with = "all_topk")]
    topk: Option<u32>,
    /// P-value file for --topk.
    #[arg(long)]
    pvalues: Option<PathBuf>,
    /// Emit `k,bound` CSV for every top-k selection of this p-value file.
    #[arg(long, value_name = "PVALUES")]
    all_topk: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: BoundMethod,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Dkw,
    Gw,
}

impl From<MethodArg> for CalibrationMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Dkw => CalibrationMethod::Dkw,
            MethodArg::Gw => CalibrationMethod::Gw,
        }
    }
}

#[derive(Args)]
struct CalibrateArgs {
    /// Family JSON file; budgets in it are ignored.
    #[arg(long)]
    regions: PathBuf,
    /// P-value file, one decimal per line.
    #[arg(long)]
    pvalues: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "dkw")]
    method: MethodArg,
}

#[derive(Args)]
struct EnvelopeArgs {
    /// P-value file, one decimal per line.
    #[arg(long)]
    pvalues: PathBuf,
    /// Calibrated family for a `star` column.
    #[arg(long)]
    family: Option<PathBuf>,
    /// Add a `simes` column at this level.
    #[arg(long)]
    simes_alpha: Option<f64>,
    /// Add a `bonf` column at this level.
    #[arg(long)]
    bonferroni_alpha: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    m: u32,
    /// Atom size; m must equal s * 2^q.
    #[arg(long)]
    s: u32,
    /// Tree depth; the partition has 2^q blocks.
    #[arg(long)]
    q: u32,
    /// Number of signal atoms.
    #[arg(long = "K1")]
    k1: u32,
    /// Signal fraction inside each signal atom, in (0, 1].
    #[arg(long)]
    r: f64,
    /// Effect size.
    #[arg(long)]
    mu: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Hybrid split: Simes at (1-gamma)*alpha, tree at gamma*alpha.
    #[arg(long, default_value_t = 0.02)]
    gamma: f64,
    #[arg(long)]
    reps: u32,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    /// Scatter the signal atoms instead of keeping them adjacent.
    #[arg(long)]
    scatter_signal: bool,
    #[arg(long, value_enum, default_value = "dkw")]
    method: MethodArg,
}

#[derive(Args)]
struct RatioCurveArgs {
    #[arg(long)]
    m: f64,
    /// Region size; defaults to m^(2/3).
    #[arg(long)]
    s: Option<f64>,
    /// Number of regions; defaults to m/s.
    #[arg(long = "K")]
    k: Option<f64>,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    mu_from: f64,
    #[arg(long)]
    mu_to: f64,
    #[arg(long)]
    mu_step: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Validate(args) => run_validate(args),
        Command::Bound(args) => run_bound(args).map(|()| 0),
        Command::Calibrate(args) => run_calibrate(args).map(|()| 0),
        Command::Envelope(args) => run_envelope(args).map(|()| 0),
        Command::Simulate(args) => run_simulate(args).map(|()| 0),
        Command::RatioCurve(args) => run_ratio_curve(args).map(|()| 0),
    }
}

fn run_validate(args: ValidateArgs) -> Result<u8, CliError> {
    let file = FamilyFile::read(&args.family)?;
    let family = file.to_family_structure()?;
    let report = validate_forest(&family);
    match report.witness {
        None => {
            let index = build_index(&family)?;
            println!("forest: true");
            println!("m: {}", family.m());
            println!("members: {}", family.len());
            println!("atoms: {}", index.atom_count());
            println!("max_depth: {}", index.max_depth());
            println!("disjoint_capacity: {}", index.leaf_count());
            Ok(0)
        }
        Some((a, b)) => {
            println!("forest: false");
            println!("witness: R{} R{}", a + 1, b + 1);
            Ok(2)
        }
    }
}

fn run_bound(args: BoundArgs) -> Result<(), CliError> {
    let family = FamilyFile::read(&args.family)?.to_family()?;

    if let Some(pvalues_path) = &args.all_topk {
        let pvalues = read_pvalues(pvalues_path)?;
        if pvalues.m() != family.m() {
            return Err(CliError::domain(format!(
                "family has m = {} but {} p-values were given",
                family.m(),
                pvalues.m()
            )));
        }
        let order = sort_order(&pvalues);
        let values = match args.method {
            BoundMethod::Star => ForestEvaluator::new(&family)?.envelope(&order),
            BoundMethod::Tilde => {
                if validate_forest(&family).is_forest {
                    ForestEvaluator::new(&family)?.envelope(&order)
                } else {
                    per_prefix(&order, |sel| v_tilde(&family, sel))?
                }
            }
            BoundMethod::Bar => v_bar_envelope(&family, &order),
            BoundMethod::Brute => per_prefix(&order, |sel| v_star_bruteforce(&family, sel))?,
        };
        let mut out = String::from("k,bound\n");
        for (i, v) in values.iter().enumerate() {
            out.push_str(&format!("{},{v}\n", i + 1));
        }
        print!("{out}");
        return Ok(());
    }

    let selection = if let Some(path) = &args.selection {
        read_selection(path, family.m())?
    } else if let Some(k) = args.topk {
        let pvalues_path = args.pvalues.as_ref().expect("clap enforces --pvalues");
        let pvalues = read_pvalues(pvalues_path)?;
        if pvalues.m() != family.m() {
            return Err(CliError::domain(format!(
                "family has m = {} but {} p-values were given",
                family.m(),
                pvalues.m()
            )));
        }
        if k > family.m() {
            return Err(CliError::domain(format!(
                "topk = {k} exceeds m = {}",
                family.m()
            )));
        }
        let order = sort_order(&pvalues);
        Selection::new(order[..k as usize].to_vec()).expect("top-k indices are valid")
    } else {
        return Err(CliError::domain(
            "one of --selection, --topk or --all-topk is required",
        ));
    };

    let value = match args.method {
        BoundMethod::Star => v_star(&family, &selection)?,
        BoundMethod::Tilde => v_tilde(&family, &selection)?,
        BoundMethod::Bar => v_bar(&family, &selection),
        BoundMethod::Brute => v_star_bruteforce(&family, &selection)?,
    };
    println!("{value}");
    Ok(())
}

fn per_prefix<F>(order: &[u32], mut eval: F) -> Result<Vec<u32>, CliError>
where
    F: FnMut(&Selection) -> Result<u32, posthoc_core::bounds::BoundError>,
{
    let mut out = Vec::with_capacity(order.len());
    for k in 1..=order.len() {
        let sel = Selection::new(order[..k].to_vec()).expect("order indices are valid");
        out.push(eval(&sel)?);
    }
    Ok(out)
}

fn run_calibrate(args: CalibrateArgs) -> Result<(), CliError> {
    let file = FamilyFile::read(&args.regions)?;
    if file.members.is_empty() {
        return Err(CliError::parse(&args.regions, "no regions"));
    }
    let regions = file.to_regions()?;
    let pvalues = read_pvalues(&args.pvalues)?;
    if file.m != pvalues.m() {
        return Err(CliError::domain(format!(
            "regions file has m = {} but {} p-values were given",
            file.m,
            pvalues.m()
        )));
    }
    let config = CalibrationConfig::new(args.alpha, regions.len(), args.method.into());
    let family = calibrate_family(&regions, &pvalues, &config)?;
    print!("{}", FamilyFile::from_family(&family).to_json_pretty());
    Ok(())
}

fn run_envelope(args: EnvelopeArgs) -> Result<(), CliError> {
    let pvalues = read_pvalues(&args.pvalues)?;
    let mut columns: Vec<(&str, Vec<u32>)> = Vec::new();
    if let Some(path) = &args.family {
        let family = FamilyFile::read(path)?.to_family()?;
        if family.m() != pvalues.m() {
            return Err(CliError::domain(format!(
                "family has m = {} but {} p-values were given",
                family.m(),
                pvalues.m()
            )));
        }
        let env = envelope(&pvalues, EnvelopeMethod::Forest { family: &family }, None)?;
        columns.push(("star", env.values().to_vec()));
    }
    if let Some(alpha) = args.simes_alpha {
        let env = envelope(&pvalues, EnvelopeMethod::Simes { alpha }, None)?;
        columns.push(("simes", env.values().to_vec()));
    }
    if let Some(alpha) = args.bonferroni_alpha {
        let env = envelope(&pvalues, EnvelopeMethod::Bonferroni { alpha }, None)?;
        columns.push(("bonf", env.values().to_vec()));
    }
    if columns.is_empty() {
        return Err(CliError::domain(
            "nothing to compute: pass --family, --simes-alpha or --bonferroni-alpha",
        ));
    }
    let mut out = String::from("k");
    for (name, _) in &columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for i in 0..pvalues.m() as usize {
        out.push_str(&format!("{}", i + 1));
        for (_, values) in &columns {
            out.push_str(&format!(",{}", values[i]));
        }
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let config = SimulationConfig {
        m: args.m,
        s: args.s,
        q: args.q,
        k1: args.k1,
        r: args.r,
        mu: args.mu,
        alpha: args.alpha,
        seed: args.seed,
        reps: args.reps,
        layout: if args.scatter_signal {
            SignalLayout::Scattered
        } else {
            SignalLayout::Adjacent
        },
    };
    let spec = SimulateSpec {
        config,
        gamma: args.gamma,
        method: args.method.into(),
    };
    let files = run_simulation(&spec, &args.out_dir, thread_count()?)?;
    eprintln!(
        "wrote {} replicate envelopes, {} and {}",
        files.rep_files.len(),
        files.mean_file.display(),
        files.coverage_file.display()
    );
    Ok(())
}

fn run_ratio_curve(args: RatioCurveArgs) -> Result<(), CliError> {
    if args.mu_step <= 0.0 || args.mu_step.is_nan() {
        return Err(CliError::domain("mu-step must be positive"));
    }
    if args.mu_to < args.mu_from {
        return Err(CliError::domain("mu-to must not be below mu-from"));
    }
    let s = args.s.unwrap_or_else(|| args.m.powf(2.0 / 3.0));
    let k = args.k.unwrap_or(args.m / s);
    let steps = ((args.mu_to - args.mu_from) / args.mu_step + 1e-9).floor() as usize;
    let mu_grid: Vec<f64> = (0..=steps)
        .map(|i| args.mu_from + i as f64 * args.mu_step)
        .collect();
    let input = RatioCurveInput {
        m: args.m,
        s,
        k,
        r: args.r,
        alpha: args.alpha,
        mu_grid,
    };
    let curve = ratio_curve(&input)?;
    let mut out = String::from("mu,ratio\n");
    for (mu, ratio) in curve {
        out.push_str(&format!("{},{}\n", g17(mu), g17(ratio)));
    }
    print!("{out}");
    Ok(())
}
