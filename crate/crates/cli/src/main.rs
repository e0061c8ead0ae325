use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use powerops::dl_engine::RelationSpec;
use powerops::powerop::{power_operation_value, sigma_dl_coefficient};
use powerops::suites::{self, SuiteError, VerifyConfig, ALL_SUITES, DEFAULT_MAX_PRIME, DEFAULT_PRECISION};

#[derive(Parser)]
#[command(name = "powerops", version, about = "Power operations and Dyer-Lashof identities for a height-3 formal group law")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and print a report.
    Verify(VerifyArgs),
    /// Compute a single quantity.
    #[command(subcommand)]
    Compute(ComputeCommand),
    /// Solve for unknown coefficients.
    #[command(subcommand)]
    Solve(SolveCommand),
}

#[derive(Args, Clone)]
struct Common {
    /// Odd prime; repeat or comma-separate for several.
    #[arg(long = "p", value_delimiter = ',', required = true)]
    p: Vec<u32>,
    /// p-adic digits carried.
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    /// Exclusive bound on the x-degree.
    #[arg(long)]
    xdeg: Option<u32>,
    /// Exclusive bound on the alpha-degree.
    #[arg(long)]
    adeg: Option<u32>,
    /// Largest prime accepted.
    #[arg(long, default_value_t = DEFAULT_MAX_PRIME)]
    max_prime: u32,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized checks; overrides POWEROPS_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Run exact comparisons and checks gated at large primes.
    #[arg(long)]
    expensive: bool,
    /// Samples for randomized identity tests.
    #[arg(long, default_value_t = 64)]
    samples: usize,
}

#[derive(Subcommand)]
enum ComputeCommand {
    /// Normal form of the power operation on the class of index i.
    PowerOp {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        i: u32,
        /// Also print the Dyer-Lashof coefficient for operation k.
        #[arg(long)]
        k: Option<u32>,
    },
}

#[derive(Subcommand)]
enum SolveCommand {
    /// The sigma coefficients of the DL factorization.
    Sigma {
        #[arg(long = "p")]
        p: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_PRIME)]
        max_prime: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn config(c: &Common) -> VerifyConfig {
    VerifyConfig { precision: c.precision, xdeg: c.xdeg, adeg: c.adeg, max_prime: c.max_prime, ..VerifyConfig::default() }
}

fn verify(args: VerifyArgs) -> Result<bool, SuiteError> {
    let mut cfg = config(&args.common);
    cfg.seed = suites::resolve_seed(args.seed)?;
    cfg.expensive = args.expensive;
    cfg.samples = args.samples;
    let names: Vec<&str> = if args.suite == "all" { ALL_SUITES.to_vec() } else { vec![args.suite.as_str()] };
    let report = suites::run(&args.common.p, &names, &cfg)?;
    match args.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json()),
    }
    Ok(report.all_pass())
}

fn compute(cmd: ComputeCommand) -> Result<bool, SuiteError> {
    let ComputeCommand::PowerOp { common, i, k } = cmd;
    let cfg = config(&common);
    for &p in &common.p {
        cfg.check_prime(p)?;
        let fgl = cfg.fgl(p)?;
        let res = power_operation_value(&fgl, i).map_err(|e| SuiteError::Config(e.to_string()))?;
        println!("{}", res.render());
        if let Some(k) = k {
            let c = sigma_dl_coefficient(&res, k).map_err(|e| SuiteError::Config(e.to_string()))?;
            println!("Q^{k} coefficient: {}", c.v3part.symmetric_mod_p().unwrap_or(0));
        }
    }
    Ok(true)
}

fn solve(cmd: SolveCommand) -> Result<bool, SuiteError> {
    let SolveCommand::Sigma { p, max_prime } = cmd;
    let cfg = VerifyConfig { max_prime, ..VerifyConfig::default() };
    cfg.check_prime(p)?;
    let spec = RelationSpec::new(p).map_err(|e| SuiteError::Config(e.to_string()))?;
    match spec.solve_sigma() {
        Ok(sol) => {
            for (i, s) in sol.sigma.iter().enumerate() {
                println!("sigma_{} = {}", i + 1, s);
            }
            let residual = spec.sigma_residual(&sol.sigma);
            let ok = residual.is_zero();
            println!("{}", if ok { "verified: substitution residual 0" } else { "NOT verified" });
            Ok(ok)
        }
        Err(e) => {
            println!("no solution: {e}");
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Compute(c) => compute(c),
        Command::Solve(s) => solve(s),
    };
    match out {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
