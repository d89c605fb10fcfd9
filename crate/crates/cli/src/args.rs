//! Command line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "coarsekit",
    version,
    about = "Check coarse invariants of finite truncations"
)]
pub struct Cli {
    /// Report format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// The report as a JSON document.
    #[value(alias = "json")]
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a document and check it is well formed.
    Validate { doc: PathBuf },
    /// Look for a level certifying that a family is uniformly bounded.
    Bounded { target: PathBuf, family: PathBuf },
    /// Star of two bounded families, with a certificate for the result.
    Star {
        target: PathBuf,
        f: PathBuf,
        g: PathBuf,
        /// Write the star as a family document.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify a witness for an invariant, or search for one.
    Check(CheckArgs),
    /// Lift a witness on one piece to the colimit of a system.
    Lift(LiftArgs),
    /// Properties of maps.
    #[command(subcommand)]
    MapCheck(MapCheck),
    /// Generate one of the built-in example systems.
    Corpus(CorpusArgs),
    /// Bounded searches over every piece and the colimit.
    #[command(subcommand)]
    Probe(Probe),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Invariant {
    Asdim,
    Exactness,
    Pinch,
    Amenability,
    PropertyA,
    Apc,
    Metrizability,
}

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::Asdim => "asdim",
            Invariant::Exactness => "exactness",
            Invariant::Pinch => "pinch",
            Invariant::Amenability => "amenability",
            Invariant::PropertyA => "property-a",
            Invariant::Apc => "apc",
            Invariant::Metrizability => "metrizability",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Greedy,
}

/// Which input family a witness quantifies over. Overrides the witness's own.
#[derive(Debug, Clone, Default, Args)]
pub struct InputArgs {
    /// 1-based level of the space, or of `--piece` in a system.
    #[arg(long, conflicts_with = "input")]
    pub level: Option<usize>,
    /// Piece the level refers to.
    #[arg(long, requires = "level")]
    pub piece: Option<String>,
    /// A family document to use as the input.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub invariant: Invariant,
    /// A space or system document.
    pub target: PathBuf,
    #[arg(long, required_unless_present = "search", conflicts_with = "search")]
    pub witness: Option<PathBuf>,
    /// Search instead of verifying (asdim, apc, metrizability).
    #[arg(long)]
    pub search: bool,
    /// Dimension bound for asdim.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    /// Floating point tolerance for pinch.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Attempts per target for an apc search.
    #[arg(long, default_value_t = 64)]
    pub budget: usize,
    #[command(flatten)]
    pub on: InputArgs,
    /// Write a found witness.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    #[arg(value_enum)]
    pub invariant: Invariant,
    pub system: PathBuf,
    /// The piece the witness lives on (not used by metrizability).
    #[arg(long = "from")]
    pub from: Option<String>,
    #[arg(long)]
    pub witness: PathBuf,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Input on the piece: a piece level, or a family over the ambient set.
    #[arg(long, conflicts_with = "input")]
    pub level: Option<usize>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Write the lifted witness.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum MapCheck {
    /// Every generator of the source maps into a bounded family.
    Bornologous {
        source: PathBuf,
        map: PathBuf,
        dest: PathBuf,
    },
    /// Two maps into a space are close at some level.
    Close {
        f: PathBuf,
        g: PathBuf,
        #[arg(long)]
        codomain: PathBuf,
    },
    /// A map into a metric space is slowly oscillating on a given scale.
    So {
        source: PathBuf,
        map: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, required_unless_present = "search", conflicts_with = "search")]
        witness: Option<PathBuf>,
        #[arg(long, requires = "eps")]
        search: bool,
        #[arg(long)]
        eps: Option<String>,
        #[command(flatten)]
        on: InputArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorpusKind {
    C0,
    DisjointUnion,
    UnitInterval,
    Random,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(value_enum)]
    pub kind: CorpusKind,
    /// Output directory.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Longest tuple length (c0).
    #[arg(long, default_value_t = 2)]
    pub s_max: usize,
    /// Entries range over [-box, box] (c0).
    #[arg(long = "box", default_value_t = 1)]
    pub box_: i64,
    /// Comma separated ball radii.
    #[arg(long, default_value = "1,2,4")]
    pub radii: String,
    /// Comma separated path lengths (disjoint-union).
    #[arg(long, default_value = "3,3")]
    pub islands: String,
    /// Number of pieces (unit-interval).
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 12)]
    pub max_points: usize,
    #[arg(long, default_value_t = 4)]
    pub max_pieces: usize,
    #[arg(long, default_value_t = 3)]
    pub max_depth: usize,
}

#[derive(Debug, Subcommand)]
pub enum Probe {
    /// Greedy search for asymptotic property C witnesses.
    Apc {
        system: PathBuf,
        #[arg(long, default_value_t = 3)]
        prefix_len: usize,
        #[arg(long, default_value_t = 64)]
        budget: usize,
    },
}
