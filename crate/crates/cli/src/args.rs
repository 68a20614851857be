use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "metablock", version, about = "Split metacyclic p-groups, their fusion and block invariants")]
pub struct Cli {
    /// Use arbitrary-precision integers instead of 64-bit ones.
    #[arg(long, global = true)]
    pub arbitrary_precision: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Subgroups, classes and characters of D.
    Structure(StructureArgs),
    /// Block invariants (k, k0, k1, l) with bound checks.
    Invariants(BlockArgs),
    /// The automorphism alpha, focal subgroup and F-class census.
    Fusion(FusionArgs),
    /// Run every property check over a parameter grid.
    Verify(VerifyArgs),
    /// Replay the arithmetic steps of the proofs.
    Replay(ReplayArgs),
    /// Brute-force cross-check of all closed forms at one point.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct GroupArgs {
    /// Odd prime p.
    #[arg(long)]
    pub p: u64,
    /// x has order p^m.
    #[arg(long)]
    pub m: u32,
    /// y has order p^n.
    #[arg(long)]
    pub n: u32,
    /// y x y^-1 = x^(1+p^l); defaults to m - 1.
    #[arg(long)]
    pub l: Option<u32>,
}

impl GroupArgs {
    pub fn l(&self) -> u32 {
        self.l.unwrap_or_else(|| self.m.saturating_sub(1))
    }
}

#[derive(Debug, Args)]
pub struct StructureArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Recompute everything by brute force and compare.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BlockArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Inertial index, a divisor of p - 1.
    #[arg(long)]
    pub e: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FusionArgs {
    #[command(flatten)]
    pub block: BlockArgs,
    /// Recompute the census and focal subgroup by brute force and compare.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    K1,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest prime, largest m and largest n of the grid.
    #[arg(long, num_args = 3, value_names = ["PMAX", "MMAX", "NMAX"])]
    pub sweep: Option<Vec<u64>>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Only run the formula checks.
    #[arg(long)]
    pub skip_oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Replay {
    Amc,
    K2,
    P5,
    Primes,
    TwoSquares,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long, value_enum)]
    pub which: Replay,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub e: Option<u64>,
    /// Inclusive prime range for `primes` and `two-squares`.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub range: Option<Vec<u64>>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Restrict block checks to one inertial index.
    #[arg(long)]
    pub e: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}
