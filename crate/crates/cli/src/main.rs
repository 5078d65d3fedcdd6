//! `qcluster`: drive seed mutation, DT expansion, Grassmannian counts and
//! identity checks from a JSON session document.

mod commands;
mod session;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Flags, Report, Route};
use session::{Session, SessionSpec};

#[derive(Parser)]
#[command(name = "qcluster", version, about = "Exact quantum cluster computations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Which construction `expand` runs (default: mutation)
    #[arg(long, global = true, value_enum)]
    route: Option<Route>,
    /// Truncation degree for potentials
    #[arg(long, global = true)]
    degree_cap: Option<usize>,
    /// Entrywise bound on cone classes; one value applies to every vertex.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    cone_bound: Option<Vec<i64>>,
    /// Field sizes for point counts, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    primes: Option<Vec<u32>>,
    /// Enumeration budget for Grassmannian counts.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads for point counting
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Compare stdout with `<dir>/<command>-<session>.txt`.
    #[arg(long, global = true)]
    golden: Option<PathBuf>,
    /// With --golden, overwrite the golden file instead of comparing.
    #[arg(long, global = true, requires = "golden")]
    bless: bool,
    /// Write the JSON report to this path (`-` for stdout).
    #[arg(long, global = true)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Mutate the seed (and QP, if a potential is given) along ks.
    Mutate { session: PathBuf },
    /// Cluster monomial for (ks, lam) with positivity and Lefschetz checks.
    Expand { session: PathBuf },
    /// Grassmannian point counts against F-coefficients.
    Count { session: PathBuf },
    /// Dilogarithm identities, and two-route agreement for a session.
    IdentityCheck { session: Option<PathBuf> },
}

fn load(path: &Path, degree_cap: Option<usize>) -> Result<Session, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    SessionSpec::parse(&text)?.validate(degree_cap)
}

fn golden_name(cmd: &str, session: Option<&Path>) -> String {
    let stem = session.and_then(Path::file_stem).map_or("suite".into(), |s| s.to_string_lossy().into_owned());
    format!("{cmd}-{stem}.txt")
}

fn run(cli: &Cli) -> Result<(Report, String, Option<PathBuf>), String> {
    let flags = Flags {
        route: cli.route,
        cone_bound: cli.cone_bound.clone(),
        primes: cli.primes.clone(),
        budget: cli.budget,
    };
    let cap = cli.degree_cap;
    Ok(match &cli.cmd {
        Cmd::Mutate { session } => (commands::mutate(&load(session, cap)?)?, "mutate".into(), Some(session.clone())),
        Cmd::Expand { session } => {
            (commands::expand(&load(session, cap)?, &flags)?, "expand".into(), Some(session.clone()))
        }
        Cmd::Count { session } => (commands::count(&load(session, cap)?, &flags)?, "count".into(), Some(session.clone())),
        Cmd::IdentityCheck { session } => {
            let s = session.as_deref().map(|p| load(p, cap)).transpose()?;
            (commands::identity_check(s.as_ref(), &flags)?, "identity-check".into(), session.clone())
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    let (report, cmd, session) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", report.text);
    let mut ok = report.ok;
    if let Some(path) = &cli.json {
        let body = serde_json::to_string_pretty(&report.json).expect("serializable") + "\n";
        if path.as_os_str() == "-" {
            print!("{body}");
        } else if let Err(e) = std::fs::write(path, body) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if let Some(dir) = &cli.golden {
        let file = dir.join(golden_name(&cmd, session.as_deref()));
        if cli.bless {
            if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&file, &report.text)) {
                eprintln!("error: {}: {e}", file.display());
                return ExitCode::from(2);
            }
        } else {
            match std::fs::read_to_string(&file) {
                Ok(expected) if expected == report.text => {}
                Ok(_) => {
                    eprintln!("golden mismatch: {}", file.display());
                    ok = false;
                }
                Err(e) => {
                    eprintln!("error: {}: {e}", file.display());
                    return ExitCode::from(2);
                }
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
