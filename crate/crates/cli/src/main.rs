use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use resolvent_core::campaign::{self, CampaignConfig, CampaignKind, Outcome};
use resolvent_core::LabError;

const EXIT_VALIDATION: u8 = 1;
const EXIT_ACCEPTANCE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "resolvent-lab", version, about = "Resolvent solver and decay verification campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for every randomized probe; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a campaign and write its artifacts.
    Run { config: PathBuf },
    /// Parse and validate a campaign config without running it.
    Validate { config: PathBuf },
    /// List the campaign kinds.
    ListCampaigns,
}

fn load(path: &Path, cli: &Cli) -> Result<CampaignConfig, LabError> {
    let mut config = CampaignConfig::load(path)?;
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(o) = &cli.out {
        config.output = Some(o.clone());
    }
    config.validate()?;
    Ok(config)
}

fn exit_code(e: &LabError) -> u8 {
    match e {
        LabError::Acceptance(_) => EXIT_ACCEPTANCE,
        e if campaign::is_validation_error(e) => EXIT_VALIDATION,
        _ => EXIT_INTERNAL,
    }
}

fn report(outcome: &Outcome) {
    for r in &outcome.records {
        for c in &r.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            println!("{verdict} {}: {} = {:.4e} (tolerance {:.4e})", r.id, c.name, c.value, c.tolerance);
        }
    }
    // one summary line per slope line
    let mut kinds: Vec<&str> = Vec::new();
    for row in &outcome.sweep_rows {
        if !kinds.contains(&row.norm_kind.as_str()) {
            kinds.push(&row.norm_kind);
        }
    }
    for k in kinds {
        let rows: Vec<_> = outcome.sweep_rows.iter().filter(|r| r.norm_kind == k).collect();
        let mut fits: Vec<(f64, f64, bool)> = Vec::new();
        for r in &rows {
            if !fits.iter().any(|f| f.0 == r.lambda_arg) {
                fits.push((r.lambda_arg, r.fitted_slope, rows.iter().filter(|x| x.lambda_arg == r.lambda_arg).all(|x| x.verdict == "pass")));
            }
        }
        let passed = fits.iter().filter(|f| f.2).count();
        let slopes: Vec<String> = fits.iter().map(|f| format!("{:+.3}", f.1)).collect();
        let verdict = if passed == fits.len() { "PASS" } else { "FAIL" };
        println!(
            "{verdict} line {k}: theoretical slope {:+.3}, fitted [{}], {passed}/{} arguments",
            rows[0].theoretical_slope,
            slopes.join(", "),
            fits.len()
        );
    }
}

fn run(path: &Path, cli: &Cli) -> Result<(), LabError> {
    let config = load(path, cli)?;
    let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let out = config.output.clone().unwrap_or_else(|| PathBuf::from("results").join(&config.name));
    let start = Instant::now();
    let outcome = campaign::run_with_workers(&config, workers)?;
    let wall = start.elapsed().as_secs_f64();
    report(&outcome);
    let manifest = campaign::write_artifacts(&out, &config, &outcome, workers, wall)?;
    println!("wrote {} files to {} in {wall:.1} s", manifest.files.len() + 1, out.display());
    outcome.into_verdict().map(|_| ())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::ListCampaigns => {
            for k in CampaignKind::ALL {
                println!("{:<16} {}", k.name(), k.summary());
            }
            Ok(())
        }
        Command::Validate { config } => load(config, &cli).map(|c| println!("{}: valid {} campaign", c.name, c.kind.name())),
        Command::Run { config } => run(config, &cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            let label = match code {
                EXIT_VALIDATION => "validation error",
                EXIT_ACCEPTANCE => "acceptance failure",
                _ => "internal error",
            };
            eprintln!("{label}: {e}");
            ExitCode::from(code)
        }
    }
}
