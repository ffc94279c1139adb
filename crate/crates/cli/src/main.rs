use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use workbench_cli::config::{CONFIG_ENV, SUITES};
use workbench_cli::output::{emit, machine_lines};
use workbench_cli::{run_suites, CliError, Format, SuiteConfig, EXIT_INPUT};

#[derive(Parser, Debug)]
#[command(name = "workbench", about = "Runs finite model-construction checks and reports the results")]
struct Args {
    /// Suites to run: laws, adjunction, lattice, cobar, fibrancy, modal, duality, groebner, theory, or all.
    suites: Vec<String>,
    /// Configuration file; defaults to the file named by CWF_WORKBENCH_CONFIG.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Category files or builtin names (terminal, walking-arrow, square, discrete2, empty).
    #[arg(long, value_delimiter = ',')]
    category: Vec<String>,
    /// Internal-category file or builtin name (codiscrete-interval, or a category name).
    #[arg(long)]
    internal_category: Option<String>,
    /// Table theory file.
    #[arg(long)]
    theory: Option<PathBuf>,
    /// Presentation files.
    #[arg(long, value_delimiter = ',')]
    presentation: Vec<PathBuf>,
    /// Builtin stages for the duality roster: f2, f3, f4, f2y, f2e, f2xy.
    #[arg(long, value_delimiter = ',')]
    stages: Vec<String>,
    /// Cube dimension bound.
    #[arg(long)]
    d: Option<usize>,
    /// Cobar truncation level.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Lex operations for the modal suite: identity, open:top, open:bot.
    #[arg(long, value_delimiter = ',')]
    t_instance: Vec<String>,
    /// Cobar instances: discrete<k> or arrow<k>.
    #[arg(long, value_delimiter = ',')]
    instance: Vec<String>,
    /// Enumeration budget per check.
    #[arg(long)]
    budget: Option<u64>,
    /// Seed for sampled checks.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "lines")]
    format: Format,
    /// Treat inconclusive searches as passing.
    #[arg(long)]
    allow_inconclusive: bool,
    /// Also write the machine-readable lines to this file.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn config(args: &Args) -> Result<SuiteConfig, CliError> {
    let mut c = match &args.config {
        Some(p) => SuiteConfig::load(p)?,
        None => SuiteConfig::from_env()?,
    };
    if !args.suites.is_empty() {
        c.suites = args.suites.clone();
    }
    let set = |dst: &mut Vec<String>, src: &[String]| {
        if !src.is_empty() {
            *dst = src.to_vec();
        }
    };
    set(&mut c.category, &args.category);
    set(&mut c.stages, &args.stages);
    set(&mut c.t_instance, &args.t_instance);
    set(&mut c.instance, &args.instance);
    if !args.presentation.is_empty() {
        c.presentation = args.presentation.clone();
    }
    if args.internal_category.is_some() {
        c.internal_category = args.internal_category.clone();
    }
    if args.theory.is_some() {
        c.theory = args.theory.clone();
    }
    c.d = args.d.unwrap_or(c.d);
    c.n = args.n.unwrap_or(c.n);
    c.budget = args.budget.unwrap_or(c.budget);
    c.seed = args.seed.unwrap_or(c.seed);
    c.allow_inconclusive |= args.allow_inconclusive;
    Ok(c)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = config(&args).and_then(|c| run_suites(&c));
    let run = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("workbench: {e}");
            if matches!(e, CliError::Config(_)) {
                eprintln!("suites: {}; default config from ${CONFIG_ENV}", SUITES.join(", "));
            }
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    if let Some(path) = &args.output {
        let text: String = machine_lines(&run).into_iter().map(|l| l + "\n").collect();
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("workbench: {}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    if emit(&run, args.format, &mut out, &mut err).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(EXIT_INPUT as u8);
    }
    ExitCode::from(run.exit_code() as u8)
}
