use clap::Parser;
use resfin_cli::{exit_code, run, CliError, Input, Options, COMMANDS, USAGE};
use std::path::PathBuf;
use std::process::ExitCode;

/// Certify finite models, paradoxes and matrix approximations.
#[derive(Parser, Debug)]
#[command(name = "resfin", version, after_help = USAGE)]
struct Args {
    /// Subcommand name, see below.
    command: String,
    /// Input files in the order the command expects.
    inputs: Vec<PathBuf>,
    /// Scale as a rational `p/q`.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    window: Option<usize>,
    /// Radius cap for shift balls.
    #[arg(long)]
    ball: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// `name=value`, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn options(args: &Args) -> Result<Options, CliError> {
    let epsilon = match &args.epsilon {
        None => None,
        Some(s) => Some(
            resfin_core::rational::parse(s)
                .ok_or_else(|| CliError::Usage(format!("--epsilon {s}: expected a rational p/q")))?,
        ),
    };
    let tol = args
        .tol
        .iter()
        .map(|t| {
            t.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Usage(format!("--tol {t}: expected name=value")))
        })
        .collect::<Result<_, _>>()?;
    let cap_atoms = match std::env::var("RESFIN_CAP_ATOMS") {
        Ok(v) => Some(v.parse().map_err(|_| CliError::Usage(format!("RESFIN_CAP_ATOMS={v}: not a count")))?),
        Err(_) => None,
    };
    Ok(Options {
        epsilon,
        window: args.window,
        ball: args.ball,
        horizon: args.horizon,
        seed: args.seed,
        tol,
        cap_atoms,
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    if !COMMANDS.contains(&args.command.as_str()) {
        eprintln!("error: unknown command {:?}\n\n{USAGE}", args.command);
        return ExitCode::from(2);
    }
    let result = options(&args).and_then(|opts| {
        let inputs = args.inputs.iter().map(|p| Input::read(p)).collect::<Result<Vec<_>, _>>()?;
        run(&args.command, &inputs, &opts)
    });
    let code = exit_code(&result);
    match result {
        Ok(artifact) => {
            let json = artifact.to_json();
            match &args.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, json) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{json}"),
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
