mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pyradesign_core::acceptance::Tier;

/// Construct, analyze and verify symmetric designs with the parameters of
/// binary projective point-hyperplane designs.
#[derive(Parser)]
#[command(name = "pyradesign", version)]
pub struct Cli {
    /// Also write the run report as JSON to this path.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,

    /// Wall-clock cap for automorphism and isomorphism searches.
    #[arg(long, global = true)]
    pub budget_seconds: Option<u64>,

    /// Worker threads for parallel searches.
    #[arg(long, global = true, env = "PYRADESIGN_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build a design from scratch or from a decomposition witness.
    #[command(subcommand)]
    Construct(Construct),
    /// Same as `construct sum`.
    Sum {
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a design file as a symmetric design.
    Verify { design: PathBuf },
    /// Report lines, center points, center blocks and the PG criterion.
    Analyze(Analyze),
    /// Split a design at a center block into its two components.
    Decompose(Decompose),
    /// Run the sum construction over many block bijections.
    DeltaSearch(DeltaSearch),
    /// Clique search in the collinearity graph of the 2m-subsets of an n-set.
    #[command(subcommand)]
    Search(Search),
    /// Build or verify a pyramidal group certificate.
    #[command(subcommand)]
    Group(Group),
    /// All automorphisms fixing a point set pointwise.
    Stabilizer(Stabilizer),
    /// Check the structure theorem for a certificate.
    #[command(subcommand)]
    Theorem(Theorem),
    /// Run the acceptance suite for a tier.
    Accept {
        #[arg(value_parser = parse_tier)]
        tier: Tier,
    },
    /// Manage an on-disk design catalog.
    #[command(subcommand)]
    Catalog(Catalog),
}

fn parse_tier(s: &str) -> Result<Tier, String> {
    s.parse().map_err(|e: pyradesign_core::DesignError| e.to_string())
}

#[derive(Subcommand)]
pub enum Construct {
    /// Points and hyperplane complements of PG(r-1, 2).
    Pg {
        #[arg(long)]
        rank: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sum of two component designs along a bijection.
    Sum {
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
pub struct Analyze {
    pub design: PathBuf,
    #[arg(long)]
    pub center_blocks: bool,
    #[arg(long)]
    pub pg_criterion: bool,
    #[arg(long)]
    pub lines: bool,
    /// Write the analysis JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct Decompose {
    pub design: PathBuf,
    /// Index of the center block O in canonical order.
    #[arg(long)]
    pub block: usize,
    /// Points of Z, a subset of O missing one point; defaults to O minus its largest point.
    #[arg(long, value_delimiter = ',')]
    pub z: Option<Vec<usize>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SumFilter {
    All,
    Pg,
    NonPg,
}

#[derive(Args)]
pub struct DeltaSearch {
    #[arg(long)]
    pub design_o: PathBuf,
    #[arg(long)]
    pub design_z: PathBuf,
    /// Sample this many bijections instead of enumerating all of them.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SumFilter::All)]
    pub filter: SumFilter,
    /// Write the matching designs as a JSON array.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum Search {
    Cliques {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Exact clique size; omit to list maximal cliques.
        #[arg(long)]
        size: Option<usize>,
        /// Maximum number of graph vertices.
        #[arg(long, default_value_t = pyradesign_core::geometry::DEFAULT_VERTEX_BUDGET)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
pub enum Group {
    Build {
        design: PathBuf,
        #[arg(long)]
        block: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Verify {
        design: PathBuf,
        certificate: PathBuf,
    },
}

#[derive(Args)]
pub struct Stabilizer {
    pub design: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub fixed: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum Theorem {
    Verify { design: PathBuf, certificate: PathBuf },
}

#[derive(Subcommand)]
pub enum Catalog {
    Add {
        #[arg(long)]
        dir: PathBuf,
        design: PathBuf,
        #[arg(long = "tag")]
        tags: Vec<String>,
    },
    List {
        #[arg(long)]
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(report) => {
            println!("{report}");
            if let Some(path) = &cli.report {
                let json = serde_json::to_string_pretty(&report).expect("serializable");
                if let Err(e) = std::fs::write(path, json + "\n") {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::FAILURE;
                }
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
