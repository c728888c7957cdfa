//! Command-line front end: construct or load a bipartite distance-regular
//! graph, run the uniform-structure pipeline, and print a text or JSON
//! report.
//!
//! Exit codes: 0 all checks pass and at least one Q-polynomial ordering
//! exists; 1 invalid input or no ordering; 2 not distance-regular; 3 not
//! bipartite; 4 the scalar field is unsupported; 5 an internal cross-check
//! failed.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use drg_core::report::{
    list_builtin, render_json, render_text, run, AnalysisRequest, GraphSource, OutputFormat,
    VerifyLevel,
};

#[derive(Parser)]
#[command(name = "drg", version, about = "Uniform structures of bipartite Q-polynomial distance-regular graphs", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyArg {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a graph and classify each Q-polynomial structure.
    Analyze {
        /// Graph source: hypercube:D, folded:D, mcfarland:t, edgefile:PATH,
        /// or incfile:PATH.
        #[arg(long)]
        graph: String,
        /// Base vertex for the subconstituent data.
        #[arg(long, default_value_t = 0)]
        vertex: usize,
        /// "all", or a comma-separated permutation of 0..=D fixing 0.
        #[arg(long, default_value = "all")]
        ordering: String,
        #[arg(long, value_enum, default_value_t = OutputArg::Text)]
        output: OutputArg,
        #[arg(long, value_enum, default_value_t = VerifyArg::Full)]
        verify: VerifyArg,
    },
    /// List the built-in graph constructors.
    List,
}

fn parse_ordering(arg: &str) -> Result<Option<Vec<usize>>, String> {
    if arg == "all" {
        return Ok(None);
    }
    let perm: Result<Vec<usize>, _> = arg.split(',').map(|s| s.trim().parse()).collect();
    match perm {
        Ok(p) if !p.is_empty() => Ok(Some(p)),
        _ => Err(format!("--ordering wants \"all\" or a comma list, got {arg:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", list_builtin());
            ExitCode::SUCCESS
        }
        Command::Analyze {
            graph,
            vertex,
            ordering,
            output,
            verify,
        } => {
            let source = match GraphSource::parse(&graph) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(e.exit_code() as u8);
                }
            };
            let ordering = match parse_ordering(&ordering) {
                Ok(o) => o,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(1);
                }
            };
            let request = AnalysisRequest {
                source,
                base_vertex: vertex,
                ordering,
                output: match output {
                    OutputArg::Text => OutputFormat::Text,
                    OutputArg::Json => OutputFormat::Json,
                },
                verify: match verify {
                    VerifyArg::Fast => VerifyLevel::Fast,
                    VerifyArg::Full => VerifyLevel::Full,
                },
            };
            match run(&request) {
                Ok(doc) => {
                    match request.output {
                        OutputFormat::Text => print!("{}", render_text(&doc)),
                        OutputFormat::Json => print!("{}", render_json(&doc)),
                    }
                    if doc.orderings.is_empty() {
                        eprintln!("error: no Q-polynomial ordering exists for this graph");
                        ExitCode::from(1)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
