mod commands;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use k3lattice::Error;
use report::Report;

#[derive(Parser)]
#[command(name = "k3lat", version, about = "Exact lattice computations for K3[n]-type lattices")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coprime factorizations (r, s) of 1-n classifying embedding orbits.
    Pn {
        #[arg(long)]
        n: u64,
    },
    /// Index of the reflection group W in the orientation-preserving group.
    Windex {
        #[arg(long)]
        n: u64,
    },
    /// Action of an isometry on the discriminant group.
    Residual {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value = "k3")]
        lattice: String,
    },
    /// Whether an isometry lies in W.
    InW {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        lattice: String,
    },
    /// The genus-2 isometry of Hilb(7) in polarization degrees 2 and 4.
    Example7,
    /// Chern character and Chern class conversions in degree i, with the
    /// σ-linearity and twist checks.
    Chern {
        #[arg(long)]
        i: u32,
    },
    /// Invariant checks for a single n.
    Verify {
        #[arg(long)]
        n: u64,
    },
    /// Order bound r(n, i), or the cyclic order for --d/--e.
    ExtOrder {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        i: Option<u64>,
        #[arg(long, allow_negative_numbers = true)]
        d: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        e: Option<i64>,
    },
    /// Order of the middle Mukai extension class from sampled reflections.
    MukaiMiddle {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 12)]
        gens: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Number of non-birational moduli spaces, |P_n|.
    CountNonbirational {
        #[arg(long)]
        n: u64,
    },
    /// Every invariant suite and sweep.
    VerifyAll {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn dispatch(cmd: Command) -> k3lattice::Result<Report> {
    match cmd {
        Command::Pn { n } => commands::pn(n),
        Command::Windex { n } => commands::windex(n),
        Command::Residual { matrix, lattice } => commands::residual(&lattice, &matrix),
        Command::InW { matrix, lattice } => commands::in_w(&lattice, &matrix),
        Command::Example7 => commands::example7(),
        Command::Chern { i } => commands::chern_cmd(i),
        Command::Verify { n } => commands::verify_n(n),
        Command::ExtOrder { n, i, d, e } => commands::ext_order(n, i, d, e),
        Command::MukaiMiddle { n, gens, seed } => commands::mukai_middle(n, gens, seed),
        Command::CountNonbirational { n } => commands::count_nonbirational(n),
        Command::VerifyAll { seed } => Ok(commands::verify_all(seed)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.render_json());
            } else {
                println!("{}", report.render_human());
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::OutOfRange(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
