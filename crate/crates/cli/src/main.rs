use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use privsig::io::{execute, Options};
use privsig::rational::parse;

#[derive(Parser)]
#[command(name = "privsig", version, about = "Exact privacy-constrained signal construction and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare `gamma` and `gamma_b` in the Blackwell order.
    CheckDominance(Common),
    /// Minimum-informative extension of `gamma`.
    MinExtension {
        #[command(flatten)]
        common: Common,
        /// `one` for a single extension, `vertices` for all vertex extensions.
        #[arg(long, default_value = "one")]
        mode: String,
    },
    /// Frontier support and a canonical frontier distribution for `privacy`.
    Frontier(Common),
    /// Composite undominated signal for a frontier `gamma`.
    Synthesize {
        #[command(flatten)]
        common: Common,
        /// Index into the vertex extensions.
        #[arg(long, conflicts_with = "extension_weights")]
        extension_index: Option<usize>,
        /// Comma-separated convex weights over the vertex extensions.
        #[arg(long, value_delimiter = ',')]
        extension_weights: Option<Vec<String>>,
        /// JSON file with per-branch interval assignments.
        #[arg(long)]
        reorder: Option<PathBuf>,
    },
    /// Run the invariant checks on a stored artifact.
    Verify {
        #[command(flatten)]
        common: Common,
        /// `gamma`, `gamma_b`, `tau` or `composite`; defaults to the richest present.
        #[arg(long)]
        artifact: Option<String>,
    },
    /// CSV of posterior coordinates and weights.
    PlotData {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        artifact: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Problem file.
    file: PathBuf,
    /// Add decimal renderings with this many digits next to exact values.
    #[arg(long)]
    decimals: Option<usize>,
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<(String, i32), String> {
    let mut opts = Options::default();
    let (verb, common) = match cli.command {
        Command::CheckDominance(c) => ("check-dominance", c),
        Command::MinExtension { common, mode } => {
            opts.mode = Some(mode);
            ("min-extension", common)
        }
        Command::Frontier(c) => ("frontier", c),
        Command::Synthesize { common, extension_index, extension_weights, reorder } => {
            opts.extension_index = extension_index;
            opts.extension_weights = extension_weights
                .map(|ws| ws.iter().map(|w| parse(w.trim()).map_err(|e| e.to_string())).collect())
                .transpose()?;
            opts.reorder = reorder.as_ref().map(read).transpose()?;
            ("synthesize", common)
        }
        Command::Verify { common, artifact } => {
            opts.artifact = artifact;
            ("verify", common)
        }
        Command::PlotData { common, artifact } => {
            opts.artifact = artifact;
            ("plot-data", common)
        }
    };
    opts.decimals = common.decimals;
    let text = read(&common.file)?;
    let out = execute(verb, &text, &opts);
    Ok((out.stdout, out.exit_code))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((stdout, code)) => {
            print!("{stdout}");
            ExitCode::from(code as u8)
        }
        Err(msg) => {
            eprintln!("privsig: {msg}");
            ExitCode::from(2)
        }
    }
}
