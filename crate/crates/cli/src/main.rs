use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use haarwalk_cli::presets::{preset, PRESETS};
use haarwalk_cli::{exit, run, with_threads, Command, ExperimentConfig, RunError, Scenario};

#[derive(Parser)]
#[command(name = "haarwalk", version, about = "Nonstationary random walks on compact abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON experiment config.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Named preset (see `haarwalk presets`).
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
    /// Root seed; overrides the config.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads for Monte Carlo trials.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Birkhoff averages over independent trials.
    Simulate,
    /// Exact distance to Haar measure along the walk.
    Converge,
    /// Large-deviation tail estimate and exponential fit.
    Ldtail,
    /// Strict aperiodicity of each family member.
    AperiodicCheck,
    /// Constructive contraction certificate.
    Certify,
    /// Walks that fail to converge.
    Counterexample {
        #[arg(value_enum)]
        scenario: ScenarioArg,
    },
    /// List the named presets.
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    DiracRotation,
    ShrinkingSupport,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, RunError> {
    let mut cfg = match (&cli.config, &cli.preset) {
        (Some(_), Some(_)) => return Err(RunError::Config("give --config or --preset, not both".into())),
        (None, None) => return Err(RunError::Config("one of --config or --preset is required".into())),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        (None, Some(name)) => preset(name)?,
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for undecided verdicts.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let command = match cli.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Converge => Command::Converge,
        Cmd::Ldtail => Command::Ldtail,
        Cmd::AperiodicCheck => Command::AperiodicCheck,
        Cmd::Certify => Command::Certify,
        Cmd::Counterexample { scenario: ScenarioArg::DiracRotation } => Command::Counterexample(Scenario::DiracRotation),
        Cmd::Counterexample { scenario: ScenarioArg::ShrinkingSupport } => {
            Command::Counterexample(Scenario::ShrinkingSupport)
        }
        Cmd::Presets => {
            for (name, about) in PRESETS {
                println!("{name:<18} {about}");
            }
            return ExitCode::SUCCESS;
        }
    };
    let result = load(&cli).and_then(|cfg| {
        with_threads(cli.threads, || run(command, &cfg, cli.preset.as_deref(), &cli.out)).and_then(|r| r)
    });
    let code = match result {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    debug_assert!([exit::OK, exit::HYPOTHESIS, exit::UNDECIDED, exit::USAGE, exit::RESOLUTION, exit::IO].contains(&code));
    ExitCode::from(code as u8)
}
