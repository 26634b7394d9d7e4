use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mpx::harness::{geometry_suite, lemma_suite, run_experiment, ExperimentConfig, LemmaReport};
use mpx::Result;

#[derive(Parser)]
#[command(name = "mpx", version, about = "Mirror-prox with universal step sizes for monotone variational inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSV traces.
    Run(RunArgs),
    /// Run the lemma and geometry property suites; exit code 0 on a full pass.
    Verify {
        /// Seeds to check (comma separated).
        #[arg(long, default_value = "0,1,2,3,4,5,6,7,8,9", value_delimiter = ',')]
        seeds: Vec<u64>,
    },
}

/// Flags override values read from `--config`.
#[derive(Args)]
struct RunArgs {
    /// key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// euclidean | entropy | cube
    #[arg(long)]
    geometry: Option<String>,
    /// fixed | unorm | bsmooth | bbounded | stoch | adaptlb
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    iters: Option<String>,
    /// One seed or a comma-separated list.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    /// sphere | component
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    g0: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    /// Step of the fixed policy.
    #[arg(long)]
    eta: Option<String>,
    /// Bregman diameter override (must exceed the analytic value).
    #[arg(long)]
    diameter: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::parse(&std::fs::read_to_string(path)?)?,
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("problem", &self.problem),
            ("geometry", &self.geometry),
            ("policy", &self.policy),
            ("iters", &self.iters),
            ("seed", &self.seed),
            ("sigma", &self.sigma),
            ("noise", &self.noise),
            ("g0", &self.g0),
            ("c", &self.c),
            ("theta", &self.theta),
            ("eta", &self.eta),
            ("diameter", &self.diameter),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.output_path = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn run(args: &RunArgs) -> Result<()> {
    let cfg = args.config()?;
    let result = run_experiment(&cfg)?;
    for r in &result.reports {
        let m = &r.meta;
        println!(
            "problem={} geometry={} policy={} seed={} T={} final_gap={:.6e} max_Z={:.6e} eta1={:.6e}{}",
            m.problem,
            m.geometry,
            m.policy,
            m.seed,
            m.iters,
            r.final_gap().unwrap_or(f64::NAN),
            m.max_z,
            m.eta_first,
            if m.eta_exceeds_one { " (eta1 > 1)" } else { "" }
        );
    }
    match &result.summary.slope {
        Ok(s) => println!("slope={:.4} r2={:.4} window={}..{}", s.slope, s.r_squared, s.window.0, s.window.1),
        Err(e) => println!("slope=NA ({e})"),
    }
    for f in &result.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn print_report(kind: &str, r: &LemmaReport) -> bool {
    for c in &r.checks {
        println!(
            "{} seed={} {:<45} cases={:<5} failures={} worst_margin={:.3e}",
            if c.pass() { "PASS" } else { "FAIL" },
            r.seed,
            format!("{kind}: {}", c.name),
            c.cases,
            c.failures,
            c.worst_margin
        );
    }
    r.all_pass()
}

fn verify(seeds: &[u64]) -> Result<bool> {
    let mut ok = true;
    for &seed in seeds {
        ok &= print_report("lemma", &lemma_suite(seed)?);
        ok &= print_report("geometry", &geometry_suite(seed)?);
    }
    println!("{}", if ok { "verify: all checks passed" } else { "verify: FAILURES" });
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => run(args).map(|_| true),
        Command::Verify { seeds } => verify(seeds),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
