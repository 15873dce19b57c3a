use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lambcoin_core::{CalculusVariant, Discipline, Strategy};

#[derive(Debug, Parser)]
#[command(
    name = "lambcoin",
    version,
    about = "Workbench for the lambda calculus with a fair coin"
)]
pub struct Cli {
    /// Output mode.
    #[arg(long, value_enum, global = true, default_value_t = Format::Human)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    /// One JSON record per invocation.
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a closed term under a typing discipline.
    Typecheck {
        #[arg(long, value_enum, default_value_t = System::Simple)]
        system: System,
        #[command(flatten)]
        input: TermInput,
        #[command(flatten)]
        calculus: CalculusArg,
    },
    /// Print the principal simple type scheme of a closed term.
    Infer {
        #[command(flatten)]
        input: TermInput,
        #[command(flatten)]
        calculus: CalculusArg,
    },
    /// Reduce with a deterministic strategy and print the trace.
    Reduce {
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        #[command(flatten)]
        input: TermInput,
        #[command(flatten)]
        calculus: CalculusArg,
        #[command(flatten)]
        fuel: FuelArg,
    },
    /// Print every reachable normal-form distribution.
    Explore {
        #[command(flatten)]
        input: TermInput,
        #[command(flatten)]
        calculus: CalculusArg,
        #[command(flatten)]
        fuel: FuelArg,
    },
    /// Decide whether all reduction paths reach the same distribution.
    Confluence {
        #[command(flatten)]
        input: TermInput,
        #[command(flatten)]
        calculus: CalculusArg,
        #[command(flatten)]
        fuel: FuelArg,
    },
    /// Compare two distribution files under all elimination contexts.
    Equiv {
        /// First distribution: a `.dist` file, `-` for stdin, or literal `{ ... }` text.
        left: String,
        /// Second distribution, as above.
        right: String,
        /// Type of the support terms, e.g. `B->B`.
        #[arg(long = "type", value_name = "TYPE")]
        ty: String,
        #[command(flatten)]
        equiv: EquivArgs,
        #[command(flatten)]
        calculus: CalculusArg,
    },
    /// Check that a sub-affine term reaches only equivalent distributions.
    #[command(name = "computational-confluence")]
    ComputationalConfluence {
        #[command(flatten)]
        input: TermInput,
        #[command(flatten)]
        equiv: EquivArgs,
    },
    /// Run a built-in scenario.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
}

#[derive(Debug, Args)]
pub struct TermInput {
    /// The term, or `-` to read standard input.
    #[arg(
        value_name = "TERM",
        required_unless_present = "file",
        conflicts_with = "file"
    )]
    pub term: Option<String>,
    /// Read the term from a file.
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalculusArg {
    #[arg(long, value_enum, default_value_t = Calculus::Plain)]
    pub calculus: Calculus,
}

#[derive(Debug, Args)]
pub struct FuelArg {
    /// Exploration budget in visited terms.
    #[arg(long, env = "LAMBCOIN_FUEL", default_value_t = lambcoin_core::DEFAULT_FUEL)]
    pub fuel: u64,
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    /// Largest argument size in enumerated contexts.
    #[arg(long, default_value_t = lambcoin_core::DEFAULT_SIZE_BOUND)]
    pub size_bound: usize,
    /// Evaluate plugged terms along the call-by-value path only.
    #[arg(long)]
    pub single_path: bool,
    #[command(flatten)]
    pub fuel: FuelArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum System {
    Simple,
    Affine,
    Subaffine,
}

impl From<System> for Discipline {
    fn from(s: System) -> Self {
        match s {
            System::Simple => Discipline::Simple,
            System::Affine => Discipline::Affine,
            System::Subaffine => Discipline::SubAffine,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Calculus {
    Plain,
    /// Coins reduce to `0 +[1/2] 1`.
    Internal,
}

impl From<Calculus> for CalculusVariant {
    fn from(c: Calculus) -> Self {
        match c {
            Calculus::Plain => CalculusVariant::Plain,
            Calculus::Internal => CalculusVariant::Internalized,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Cbn,
    Cbv,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Cbn => Strategy::CallByName,
            StrategyArg::Cbv => Strategy::CallByValue,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Figure1,
    Section4,
    Internalized,
}
