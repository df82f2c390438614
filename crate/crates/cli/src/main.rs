//! `tw`: check, evaluate and experiment with system T programs.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tw", version, about = "Workbench for Goedel's system T")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Type-check every definition and the main term of a file.
    Check { file: PathBuf },
    /// Evaluate the main term of a file, which must have ground type.
    Eval {
        file: PathBuf,
        /// Abort after this many machine steps.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Apply the selection function to the predicate in FILE and print a prefix.
    Eps {
        file: PathBuf,
        #[arg(long, default_value_t = 64)]
        prefix: u64,
    },
    /// Least n with f(n-bar) = f(infinity) for the functional in FILE.
    Modulus {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        max: u64,
    },
    /// Run a canned demonstration.
    Demo {
        #[arg(value_enum)]
        which: Demo,
        #[arg(long, default_value_t = 100_000)]
        bound: u64,
        /// Use a constant function instead of the Kreisel function.
        #[arg(long)]
        control: bool,
    },
    /// Property checks over generated terms.
    Fuzz {
        #[arg(long = "type", default_value = "(nat -> bool) -> bool")]
        ty: String,
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        mode: FuzzMode,
        #[arg(long, default_value_t = 40)]
        max_size: usize,
        /// Prefix length for `--mode eps`.
        #[arg(long, default_value_t = 64)]
        prefix: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Demo {
    Kreisel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FuzzMode {
    Constancy,
    Eps,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = commands::Output::new(cli.json);
    let result = match cli.command {
        Command::Check { file } => commands::check(&out, &file),
        Command::Eval { file, budget } => commands::eval(&out, &file, budget),
        Command::Eps { file, prefix } => commands::eps(&out, &file, prefix),
        Command::Modulus { file, max } => commands::modulus(&out, &file, max),
        Command::Demo {
            which: Demo::Kreisel,
            bound,
            control,
        } => commands::kreisel(&out, bound, control),
        Command::Fuzz {
            ty,
            count,
            seed,
            mode,
            max_size,
            prefix,
        } => commands::fuzz(
            &out,
            &ty,
            count,
            seed,
            matches!(mode, FuzzMode::Eps),
            max_size,
            prefix,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tw: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}
