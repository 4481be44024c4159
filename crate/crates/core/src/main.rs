use std::io::{self, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lwebb::cli::{run_repl, Session, SessionConfig, Status};
use lwebb::loader::MAP_ENV;
use lwebb::parse_module_file;

/// LWeb^B interpreter: Horn clauses with embedded implications, page modules
/// and length-bounded proof search.
#[derive(Parser)]
#[command(name = "lwebb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Default proof-step bound for queries that give none.
    #[arg(long, global = true, value_name = "N")]
    bound: Option<u64>,

    /// Resolution map: one `prefix -> replacement` rule per line.
    #[arg(long, global = true, value_name = "FILE", env = MAP_ENV)]
    map: Option<PathBuf>,

    #[arg(long, global = true)]
    no_occurs_check: bool,

    /// Print every rule application of each answer.
    #[arg(long, global = true)]
    trace: bool,

    /// Print every answer.
    #[arg(long, global = true, conflicts_with = "max_solutions")]
    all: bool,

    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    max_solutions: usize,

    /// Wall-clock cap for unbounded queries, in milliseconds.
    #[arg(long, global = true, value_name = "MS", default_value_t = 30_000)]
    wall_cap: u64,

    /// Page to run queries inside (repeatable, outermost first).
    #[arg(long, global = true, value_name = "ORIGIN")]
    load: Vec<String>,

    /// File of plain clauses added to the program.
    #[arg(long, global = true, value_name = "FILE")]
    program: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one query, e.g. `?- (1000) www.d.com/lists => path(a,b).`
    Run { query: String },
    /// Interactive loop.
    Repl,
    /// Parse page files and report errors.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match real_main(cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            Status::Error
        }
    };
    ExitCode::from(status.code() as u8)
}

fn real_main(cli: Cli) -> anyhow::Result<Status> {
    if let Command::Check { files } = &cli.command {
        return check(files);
    }
    let config = SessionConfig {
        default_bound: cli.bound,
        map: cli.map.clone(),
        occurs_check: !cli.no_occurs_check,
        trace: cli.trace,
        max_solutions: if cli.all { usize::MAX } else { cli.max_solutions },
        wall_cap_ms: cli.wall_cap,
        ..SessionConfig::default()
    };
    let mut session = Session::new(config)?;
    for path in &cli.program {
        session.add_program_file(path)?;
    }
    for origin in &cli.load {
        session.load(origin)?;
    }
    match cli.command {
        Command::Run { query } => Ok(run(&session, &query)),
        Command::Repl => {
            let stdin = io::stdin();
            let prompt = stdin.is_terminal();
            run_repl(&mut session, &mut stdin.lock(), &mut io::stdout(), &mut io::stderr(), prompt)?;
            Ok(Status::Success)
        }
        Command::Check { .. } => unreachable!(),
    }
}

/// The search is never dropped: after a wall-cap abort it can hold a large
/// heap, and freeing it would only delay process exit.
fn run(session: &Session, query: &str) -> Status {
    let q = match session.prepare(query) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("error: {e}");
            return e.status();
        }
    };
    let mut sols = std::mem::ManuallyDrop::new(session.start(&q));
    match session.collect(&q, &mut sols) {
        Ok(report) => {
            print!("{}", report.render());
            let _ = io::stdout().flush();
            if let Some(e) = &report.error {
                eprintln!("error: {e}");
            }
            report.status
        }
        Err(e) => {
            match e.status() {
                Status::WallCap => eprintln!("error: {e} (no answer within the cap)"),
                _ => eprintln!("error: {e}"),
            }
            e.status()
        }
    }
}

fn check(files: &[PathBuf]) -> anyhow::Result<Status> {
    let mut status = Status::Success;
    for f in files {
        let text = std::fs::read_to_string(f).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", f.display()))?;
        match parse_module_file(&text, &f.display().to_string()) {
            Ok(defs) => println!("{}: ok ({} definitions)", f.display(), defs.len()),
            Err(e) => {
                eprintln!("error: {e}");
                status = Status::Error;
            }
        }
    }
    Ok(status)
}
