use std::io::{self, BufRead, Write};

use super::{render_solution, Prepared, Session, Status};
use crate::engine::Solutions;

const HELP: &str = "\
queries:   ?- [(N)] goal.      (the ?- may be omitted)
commands:  :load ORIGIN        run later queries inside the page
           :bound N | off      default bound for queries without one
           :trace on | off
           :quit
after an answer, `;` asks for the next one (up to --max-solutions)
";

struct Pending {
    sols: Solutions,
    q: Prepared,
    shown: usize,
}

/// Reads queries and commands until `:quit` or end of input. Errors are
/// reported on `err` and never end the loop.
pub fn run_repl(
    session: &mut Session,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
    prompt: bool,
) -> io::Result<()> {
    let mut pending: Option<Pending> = None;
    let mut buf = String::new();
    loop {
        if prompt {
            write!(out, "{}", if buf.is_empty() { "?- " } else { "|  " })?;
            out.flush()?;
        }
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok(());
        }
        let line = line.trim();
        if buf.is_empty() {
            if line == ";" {
                match pending.take() {
                    Some(p) => pending = next_answer(session, p, out, err)?,
                    None => writeln!(err, "no query to continue")?,
                }
                continue;
            }
            pending = None;
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            if let Some(cmd) = line.strip_prefix(':') {
                if !command(session, cmd.trim(), out, err)? {
                    return Ok(());
                }
                continue;
            }
        }
        if !buf.is_empty() {
            buf.push(' ');
        }
        buf.push_str(line);
        if !buf.ends_with('.') {
            continue;
        }
        let text = std::mem::take(&mut buf);
        match session.prepare(&text) {
            Ok(q) => {
                let sols = session.start(&q);
                pending = next_answer(session, Pending { sols, q, shown: 0 }, out, err)?;
            }
            Err(e) => writeln!(err, "error: {e}")?,
        }
    }
}

/// Prints the next answer; keeps the search if more may be asked for.
fn next_answer(
    session: &Session,
    mut p: Pending,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<Option<Pending>> {
    match p.sols.next() {
        Some(Ok(s)) => {
            out.write_all(render_solution(&s, &p.q.vars, p.q.bound.is_some()).as_bytes())?;
            p.shown += 1;
            Ok((p.shown < session.config().max_solutions).then_some(p))
        }
        Some(Err(e)) => {
            writeln!(err, "error: {e}")?;
            Ok(None)
        }
        None => {
            let status = if p.sols.bound_cut() { Status::BoundExhausted } else { Status::Failure };
            match status {
                Status::BoundExhausted => writeln!(out, "unknown (bound exhausted)")?,
                _ if p.shown == 0 => writeln!(out, "no")?,
                _ => writeln!(out, "no more answers")?,
            }
            Ok(None)
        }
    }
}

/// Runs a `:command`; false means quit.
fn command(session: &mut Session, cmd: &str, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<bool> {
    let (name, arg) = cmd.split_once(char::is_whitespace).map_or((cmd, ""), |(n, a)| (n, a.trim()));
    match (name, arg) {
        ("quit" | "q", _) => return Ok(false),
        ("help" | "h", _) => out.write_all(HELP.as_bytes())?,
        ("load", origin) if !origin.is_empty() => match session.load(origin) {
            Ok(page) => writeln!(out, "loaded /{} ({} definitions)", page.root, page.defs.len())?,
            Err(e) => writeln!(err, "error: {e}")?,
        },
        ("bound", "off") => {
            session.config_mut().default_bound = None;
            writeln!(out, "bound off")?;
        }
        ("bound", n) => match n.parse::<u64>() {
            Ok(m) => {
                session.config_mut().default_bound = Some(m);
                writeln!(out, "bound {m}")?;
            }
            Err(_) => writeln!(err, "error: :bound expects a natural number or `off`")?,
        },
        ("trace", "on") => {
            session.config_mut().trace = true;
            writeln!(out, "trace on")?;
        }
        ("trace", "off") => {
            session.config_mut().trace = false;
            writeln!(out, "trace off")?;
        }
        _ => writeln!(err, "error: unknown command `:{cmd}` (try :help)")?,
    }
    Ok(true)
}
