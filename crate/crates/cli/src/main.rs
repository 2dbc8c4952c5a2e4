mod commands;
mod config;
mod report;
mod tables;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::Outcome;

#[derive(Parser, Debug)]
#[command(name = "quatgraph", version, about = "Ramanujan Cayley graphs from definite quaternion orders")]
pub struct Cli {
    /// Emit machine-readable JSON (reports on stdout, errors on stderr).
    #[arg(long, global = true)]
    pub json: bool,
    /// Leave the timestamp out of reports so reruns are byte-identical.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 20240601)]
    pub seed: u64,
    /// key=value file supplying defaults for any flag; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct OrderArgs {
    /// Ramified prime P.
    #[arg(long = "P", value_name = "P")]
    pub big_p: i64,
    /// Auxiliary prime Q (default: smallest admissible).
    #[arg(long = "Q", value_name = "Q")]
    pub big_q: Option<i64>,
    /// T with T^2 = -P mod Q (default: smallest).
    #[arg(long = "T", value_name = "T", requires = "big_q")]
    pub big_t: Option<i64>,
    /// Use the (Q, T) of the worked examples instead of the smallest choice.
    #[arg(long, conflicts_with = "big_q")]
    pub reference: bool,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// Congruence modulus m (default: the known one for P).
    #[arg(long)]
    pub m: Option<u32>,
    /// Which congruence pair at m to use.
    #[arg(long = "h", default_value_t = 0)]
    pub h_index: usize,
    /// Largest G(Z/mZ) for which a product table is built.
    #[arg(long, default_value_t = quatgraph::finite::DEFAULT_TABLE_CAP)]
    pub table_cap: usize,
    /// Largest group order for the subgroup search.
    #[arg(long, default_value_t = quatgraph::congruence::DEFAULT_SUBGROUP_CAP)]
    pub subgroup_cap: usize,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// The prime q.
    #[arg(long, conflicts_with = "auto_q", required_unless_present = "auto_q")]
    pub q: Option<i64>,
    /// Use the smallest admissible q.
    #[arg(long)]
    pub auto_q: bool,
    /// psl or pgl.
    #[arg(long, default_value = "psl")]
    pub mode: quatgraph::graph::Mode,
    /// Use the other square root of -P in the splitting map.
    #[arg(long)]
    pub other_root: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    /// Largest vertex count for the dense eigensolver.
    #[arg(long, default_value_t = quatgraph::spectrum::DEFAULT_DENSE_CAP)]
    pub dense_cap: usize,
    /// Slack in the comparison with 2 sqrt(p).
    #[arg(long, default_value_t = quatgraph::spectrum::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Include every eigenvalue in the report.
    #[arg(long)]
    pub eigenvalues: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Basis, norm form and discriminant of the Ibukiyama order.
    Order(OrderArgs),
    /// The unit group modulo +-1.
    Units(OrderArgs),
    /// Class number of the definite algebra of discriminant D.
    ClassNumber {
        #[arg(long)]
        disc: u64,
    },
    /// Elements of norm p^k up to left multiplication by units.
    NormClasses {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long = "p")]
        p: i64,
        /// Exponent k (norm p^k).
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Congruence pairs (m, H) with certificates.
    CongruencePairs {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = quatgraph::finite::DEFAULT_TABLE_CAP)]
        table_cap: usize,
        #[arg(long, default_value_t = quatgraph::congruence::DEFAULT_SUBGROUP_CAP)]
        subgroup_cap: usize,
    },
    /// The p+1 generators of the congruence subgroup.
    Generators {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long = "p")]
        p: i64,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Ball growth of the generators against the (p+1)-regular tree.
    TreeCheck {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long = "p")]
        p: i64,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 4)]
        radius: usize,
    },
    /// Build the Cayley graph and export it.
    Graph {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long = "p")]
        p: i64,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        graph: GraphArgs,
        /// edgelist, dot or json.
        #[arg(long, default_value = "edgelist")]
        format: quatgraph::export::Format,
        /// Output file (default: stdout).
        #[arg(long, short)]
        output: Option<std::path::PathBuf>,
    },
    /// Adjacency spectrum and Ramanujan verdict.
    Spectrum {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long = "p")]
        p: i64,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        spectrum: SpectrumArgs,
        /// Exit with status 2 unless the graph is Ramanujan.
        #[arg(long)]
        check_ramanujan: bool,
    },
    /// Everything from the order to the spectral verdict.
    Pipeline {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long = "p")]
        p: i64,
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        spectrum: SpectrumArgs,
        /// Directory for graph.edgelist and report.json.
        #[arg(long)]
        output_dir: Option<std::path::PathBuf>,
    },
    /// Recompute the worked tables and compare with the published values.
    VerifyTables,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let json = argv.iter().any(|a| a == "--json");
    let argv = match config::merge(argv) {
        Ok(a) => a,
        Err(e) => return report::fail(json, "usage", &format!("{e:#}")),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            if json {
                return report::fail(true, "usage", e.render().to_string().trim());
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match commands::run(&cli) {
        Ok(outcome) => {
            report::emit(&cli, &outcome);
            match outcome {
                Outcome { passed: true, .. } => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            }
        }
        Err(e) => report::fail(cli.json, "error", &format!("{e:#}")),
    }
}
