use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gatemdp::harness::{self, ExperimentConfig, ExperimentKind, HarnessError};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "gatemdp",
    version,
    about = "Single-qubit state preparation and gate compilation via MDPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for programs that steer every cell (or --start) into --target.
    StatePrep(RunArgs),
    /// Prepare (HT)^n|0> for each --n with the {I, H, T} gateset.
    HtStates(RunArgs),
    /// Compile targets with the MDP and with brute force.
    Compile(RunArgs),
    /// Compile targets with brute force only.
    BruteForce(RunArgs),
    /// Per-cell optimal values and program lengths as CSV.
    Landscape(RunArgs),
    /// Run the reference reproduction checks.
    VerifyTables(RunArgs),
}

/// Flags override values read from --config.
#[derive(Args, Default)]
struct RunArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    /// Bloch grid resolution (cap radius π/k).
    #[arg(long)]
    k: Option<String>,
    /// ihst, iht, rzry or rzry:<l>.
    #[arg(long)]
    gateset: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// Policy evaluation tolerance.
    #[arg(long)]
    tol: Option<String>,
    /// Sphere samples for state-prep dynamics.
    #[arg(long)]
    samples: Option<String>,
    /// Extraction episodes per start cell.
    #[arg(long)]
    restarts: Option<String>,
    #[arg(long)]
    max_len: Option<String>,
    /// off, on or auto.
    #[arg(long)]
    shuffle: Option<String>,
    /// Start cell: north, south or band,sector.
    #[arg(long)]
    start: Option<String>,
    /// Exact start state as theta,phi.
    #[arg(long)]
    start_state: Option<String>,
    /// Target cell: north, south or band,sector.
    #[arg(long)]
    target: Option<String>,
    /// Comma-separated powers for ht-states.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    delta_bin: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    rollouts: Option<String>,
    #[arg(long)]
    rollout_len: Option<String>,
    /// Extraction episodes for compilation.
    #[arg(long)]
    episodes: Option<String>,
    /// Brute-force depth limit.
    #[arg(long)]
    max_n: Option<String>,
    /// One target quaternion per line.
    #[arg(long)]
    target_file: Option<String>,
    /// Number of Haar-random targets when no target file is given.
    #[arg(long)]
    targets: Option<String>,
    /// Report path; landscapes also write a .csv next to it.
    #[arg(long)]
    output: Option<String>,
    /// Worker thread cap.
    #[arg(long)]
    threads: Option<String>,
    /// parallel or sequential.
    #[arg(long)]
    exec: Option<String>,
}

impl RunArgs {
    fn pairs(&self) -> Vec<(&'static str, &String)> {
        let fields = [
            ("seed", &self.seed),
            ("k", &self.k),
            ("gateset", &self.gateset),
            ("gamma", &self.gamma),
            ("tol", &self.tol),
            ("samples", &self.samples),
            ("restarts", &self.restarts),
            ("max_len", &self.max_len),
            ("shuffle", &self.shuffle),
            ("start", &self.start),
            ("start_state", &self.start_state),
            ("target", &self.target),
            ("n", &self.n),
            ("delta_bin", &self.delta_bin),
            ("eps", &self.eps),
            ("rollouts", &self.rollouts),
            ("rollout_len", &self.rollout_len),
            ("episodes", &self.episodes),
            ("max_n", &self.max_n),
            ("target_file", &self.target_file),
            ("targets", &self.targets),
            ("output", &self.output),
            ("threads", &self.threads),
            ("exec", &self.exec),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
            .collect()
    }
}

fn config_for(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::new(kind),
    };
    if config.kind != kind {
        return Err(HarnessError::Config(format!(
            "config file is for `{}`, not `{kind}`",
            config.kind
        )));
    }
    for (key, value) in args.pairs() {
        config.set(key, value)?;
    }
    Ok(config)
}

fn execute(kind: ExperimentKind, args: &RunArgs) -> Result<bool, HarnessError> {
    let config = config_for(kind, args)?;
    config.validate()?;
    if let Some(n) = config.threads {
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        #[cfg(not(feature = "parallel"))]
        let _ = n;
    }
    let output = harness::run(&config)?;
    if kind == ExperimentKind::Verify {
        if let Some(reports) = output.report["result"].as_array() {
            for r in reports {
                let status = if r["passed"].as_bool() == Some(true) {
                    "PASS"
                } else {
                    "FAIL"
                };
                eprintln!(
                    "[{status}] criterion {:>2} {}: {}",
                    r["id"],
                    r["name"].as_str().unwrap_or(""),
                    r["measured"].as_str().unwrap_or("")
                );
            }
        }
    }
    match &config.output {
        Some(path) => harness::write_outputs(&output, path)?,
        None => match &output.csv {
            Some(csv) => print!("{csv}"),
            None => println!(
                "{}",
                serde_json::to_string_pretty(&output.report).expect("reports serialize")
            ),
        },
    }
    Ok(output.success)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let doc = json!({ "schema_version": harness::SCHEMA_VERSION, "error": { "kind": "usage", "message": e.to_string().trim() } });
            eprintln!("{doc}");
            return ExitCode::from(2);
        }
    };
    let (kind, args) = match &cli.command {
        Command::StatePrep(a) => (ExperimentKind::StatePrep, a),
        Command::HtStates(a) => (ExperimentKind::HtStates, a),
        Command::Compile(a) => (ExperimentKind::Compile, a),
        Command::BruteForce(a) => (ExperimentKind::BruteForce, a),
        Command::Landscape(a) => (ExperimentKind::Landscape, a),
        Command::VerifyTables(a) => (ExperimentKind::Verify, a),
    };
    match execute(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(if matches!(e, HarnessError::Config(_)) {
                2
            } else {
                1
            })
        }
    }
}
