//! `dotline` — command-line front end for the dotline property-graph
//! engine: load and save graph files, evaluate path expressions, build
//! endogenous indices, project views, derive virtual edges, and run the
//! classical algorithms over them. Every command is available both as a
//! one-shot invocation and as a line in the interactive `repl` session,
//! with identical output.

mod repl;
mod session;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use session::Session;

#[derive(Parser, Debug)]
#[command(
    name = "dotline",
    version,
    about = "Query, index, and transform property graphs",
    disable_help_subcommand = true
)]
pub struct Cli {
    /// Graph file loaded before the command runs (default: empty graph).
    #[arg(short, long, global = true, value_name = "FILE")]
    pub graph: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Load a graph file into the session, validating it.
    Load { path: PathBuf },
    /// Write the session graph to a file in canonical form.
    Save { path: PathBuf },
    /// Evaluate a path expression from one or more root vertices.
    Query(QueryArgs),
    /// Build or probe an index stored inside the graph itself.
    #[command(subcommand)]
    Index(IndexCommand),
    /// Project the graph onto another graph type.
    #[command(subcommand)]
    View(ViewCommand),
    /// Run a path expression from every root, collecting root-to-result pairs.
    Derive(DeriveArgs),
    /// Shortest hop path between two vertices along edges with one label.
    Path(PathArgs),
    /// Vertices ranked by out-degree over edges with one label.
    Rank(RankArgs),
    /// Print vertex and edge counts.
    Stats,
    /// Interactive session: the same commands, one per line.
    Repl,
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    /// Root vertex id; repeat the flag for multiple roots.
    #[arg(long = "root", required = true, value_name = "ID")]
    pub roots: Vec<String>,

    /// Path expression to evaluate.
    #[arg(long, value_name = "TEXT")]
    pub expr: String,

    /// Keep only the first occurrence of each element.
    #[arg(long)]
    pub unique: bool,

    /// Drop the root vertices from the results.
    #[arg(long)]
    pub exclude_roots: bool,

    /// Output shape.
    #[arg(long, value_enum, default_value_t = Format::Ids)]
    pub format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ids,
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum IndexCommand {
    /// Index every vertex bearing a key, storing the tree as graph data.
    Build {
        #[arg(long, value_name = "KEY")]
        key: String,
    },
    /// Look up vertices whose indexed key equals a value.
    Lookup {
        #[arg(long, value_name = "KEY")]
        key: String,
        /// Literal: `true`/`false`, else integer, else float, else text.
        #[arg(long, value_name = "VALUE")]
        value: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum ViewCommand {
    /// Undirected simple graph: loops dropped, parallel pairs collapsed.
    Simple,
    /// Structure-only view: every edge with its label and endpoints.
    Semantic,
    /// Numeric edge weights read from a property.
    Weighted {
        #[arg(long, value_name = "KEY")]
        key: String,
        /// Weight for edges missing the key (omit to make that an error).
        #[arg(long, value_name = "NUMBER")]
        default: Option<f64>,
    },
    /// Report how far the graph is from RDF shape (absolute-URI names).
    Rdf,
}

#[derive(Args, Debug)]
pub struct DeriveArgs {
    /// Vertex-ending path expression to derive edges from.
    #[arg(long, value_name = "TEXT")]
    pub expr: String,

    /// Label for the derived edges.
    #[arg(long, value_name = "LABEL")]
    pub label: String,

    /// ALL or a comma-separated vertex id list.
    #[arg(long, default_value = "ALL", value_name = "ROOTS")]
    pub roots: String,

    /// Write the derived edges into the session graph.
    #[arg(long)]
    pub materialize: bool,
}

#[derive(Args, Debug)]
pub struct PathArgs {
    #[arg(long, value_name = "ID")]
    pub from: String,

    #[arg(long, value_name = "ID")]
    pub to: String,

    /// Label of the (typically derived) edges to walk.
    #[arg(long, value_name = "LABEL")]
    pub via_derived: String,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    /// Label of the (typically derived) edges to count.
    #[arg(long, value_name = "LABEL")]
    pub via_derived: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut session = Session::new();
    if matches!(cli.command, Command::Repl) {
        if let Some(path) = &cli.graph {
            if let Err(e) = session.load_graph(path) {
                eprintln!("{}", session.paint_error(&e));
                return e.exit_code();
            }
        }
        return repl::run(&mut session);
    }
    match session.execute(cli) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", session.paint_error(&e));
            e.exit_code()
        }
    }
}
