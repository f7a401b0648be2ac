use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use output::Outcome;

#[derive(Parser, Debug)]
#[command(name = "hc", version, about = "Harmonic group actions on graphs, maximal graphs and their surfaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Print only the payload as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for searches and sweeps.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Group catalog JSON; defaults to the shipped catalog.
    #[arg(long, global = true, env = "HC_CATALOG", value_name = "FILE")]
    pub catalog: Option<PathBuf>,
    /// Also write the full result envelope to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Permutation groups and (2,3)-generating pairs.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Group actions on multigraphs.
    #[command(subcommand)]
    Action(ActionCmd),
    /// Harmonic covers of trees.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Maximal graphs and the genus classification.
    #[command(subcommand)]
    Maximal(MaximalCmd),
    /// Oriented 3-regular graphs and surface genus.
    #[command(subcommand)]
    Surface(SurfaceCmd),
}

#[derive(Args, Debug, Clone)]
pub struct GroupArg {
    /// Catalog name, family such as `psl2:7` or `sym:4`, or a group JSON file.
    #[arg(long)]
    pub group: String,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// Required order of the product τσ.
    #[arg(long)]
    pub product_order: Option<u64>,
    /// Explicit pair `τ,σ` in cycle notation, or `[[..],[..]]` image lists.
    #[arg(long, conflicts_with = "product_order")]
    pub pair: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum GroupCmd {
    /// Order, degree, generators and order spectrum.
    Order(GroupArg),
    /// Elements, optionally only those of the given orders.
    Elements {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, num_args = 1..)]
        orders: Vec<u64>,
    },
    /// Left cosets of the subgroup generated by `--subgroup`.
    Cosets {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, num_args = 1.., required = true)]
        subgroup: Vec<String>,
    },
    /// Generating pairs (τ, σ) with |τ| = 2 and |σ| = 3.
    Search {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        product_order: Option<u64>,
        /// Use every involution, not one per conjugacy class.
        #[arg(long)]
        all: bool,
        /// Accepted for symmetry with the spec grammar; only `2 3` is supported.
        #[arg(long, num_args = 2, default_values_t = [2, 3])]
        orders: Vec<u64>,
    },
    /// Sections of the group catalog.
    Catalog {
        #[arg(long)]
        order: Option<u64>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ActionArg {
    /// Action JSON file.
    #[arg(long)]
    pub action: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum ActionCmd {
    /// Faithfulness, harmonicity and flipped edges.
    Check {
        #[command(flatten)]
        action: ActionArg,
        /// Also check every subgroup quotient.
        #[arg(long)]
        subgroups: bool,
    },
    /// Quotient graph and projection morphism.
    Quotient {
        #[command(flatten)]
        action: ActionArg,
        /// Generators of the subgroup; defaults to the whole group.
        #[arg(long, num_args = 1..)]
        subgroup: Vec<String>,
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Replace each flipped edge by an interchanged parallel pair.
    Unflip(ActionArg),
    /// Fold interchanged pairs back into flipped edges.
    Flip {
        #[command(flatten)]
        action: ActionArg,
        /// Edges whose orbits stay unflipped.
        #[arg(long, num_args = 1..)]
        keep: Vec<u32>,
    },
    /// Harmonicity and degree of a graph morphism.
    Morphism {
        #[arg(long)]
        morphism: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SpecArg {
    /// Cover spec JSON file.
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum CoverCmd {
    /// Build the cover; the output spec carries the total graph.
    Build {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Local ramification data and R.
    Profile(SpecArg),
    /// Riemann–Hurwitz check.
    Rh {
        #[command(flatten)]
        spec: SpecArg,
        /// Use the transcribed sign `−R`.
        #[arg(long)]
        strict: bool,
    },
    /// Branch case and maximality.
    Classify(SpecArg),
    /// Random covers checking m·f·n = |G| at every base vertex.
    Random {
        /// Group to use; defaults to every catalog group up to `--max-order`.
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        max_base: usize,
        #[arg(long, default_value_t = 24)]
        max_order: u64,
        /// Include the generated specs in the payload.
        #[arg(long)]
        emit: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum MaximalCmd {
    /// Build the maximal cover of a (2,3)-generating pair.
    Build {
        #[command(flatten)]
        group: GroupArg,
        #[command(flatten)]
        pair: PairArgs,
        /// Compare with the covers built from S = {ρ, ρ⁻¹}, ρ ∈ τ⟨σ⟩.
        #[arg(long)]
        rho: bool,
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Maximal graph groups of one genus.
    Classify {
        #[arg(long)]
        genus: u64,
        /// Report every generating pair.
        #[arg(long)]
        all: bool,
        /// Trust catalog sections whose completeness cannot be checked.
        #[arg(long)]
        assume_complete: bool,
    },
    /// Classification table over a genus range.
    Table {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long)]
        assume_complete: bool,
    },
    /// Whether A_n or S_n is (2,3)-generated.
    Miller {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Family {
    Alt,
    Sym,
}

#[derive(Subcommand, Debug)]
pub enum SurfaceCmd {
    /// Traced LHT paths and surface genus of an oriented graph.
    Genus {
        #[arg(long)]
        oriented: PathBuf,
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// |G|(k − 6) = 12k(g − 1) on the canonical orientation.
    Check44 {
        #[command(flatten)]
        group: GroupArg,
        #[command(flatten)]
        pair: PairArgs,
        /// Check every pair from the canonical search.
        #[arg(long, conflicts_with = "pair")]
        all: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = commands::run(&cli).unwrap_or_else(Outcome::from_error);
    match outcome.emit(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
