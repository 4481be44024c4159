//! Query sessions shared by the `lwebb` binary, the REPL and the C ABI.

mod repl;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

pub use repl::run_repl;

use crate::builtins::BuiltinError;
use crate::engine::{Engine, Solution, Solutions, SolveError, SolveOptions};
use crate::loader::{desugar_link, LoadError, Loader, ModulePage, ResolutionMap};
use crate::syntax::{parse_program, parse_query, Goal, ParseError, Program, Query, Var};

/// Guard on pending tasks plus choicepoints for unbounded runs, roughly 2 GB.
pub const DEFAULT_MAX_FRAMES: usize = 4_000_000;

/// Process exit status of a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Failure = 1,
    BoundExhausted = 2,
    Error = 3,
    /// Wall-clock cap (or the memory guard) stopped an unbounded run.
    WallCap = 4,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Clone, Debug)]
pub struct SessionConfig {
    pub default_bound: Option<u64>,
    pub map: Option<PathBuf>,
    pub occurs_check: bool,
    pub trace: bool,
    pub max_solutions: usize,
    /// Applies to unbounded queries only.
    pub wall_cap_ms: u64,
    pub max_frames: Option<usize>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            default_bound: None,
            map: None,
            occurs_check: true,
            trace: false,
            max_solutions: 1,
            wall_cap_ms: 30_000,
            max_frames: Some(DEFAULT_MAX_FRAMES),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("{origin}: {source}")]
    Builtin { origin: String, source: BuiltinError },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("cannot read {path}: {cause}")]
    Io { path: String, cause: String },
}

impl SessionError {
    pub fn status(&self) -> Status {
        match self {
            SessionError::Solve(e) if e.is_resource() => Status::WallCap,
            _ => Status::Error,
        }
    }
}

/// A parsed query ready to run: page wrappers applied and links resolved.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub goal: Goal,
    pub bound: Option<u64>,
    /// Named query variables, in order of first occurrence.
    pub vars: Vec<Var>,
}

/// Answers of one query, as printed by the CLI.
#[derive(Clone, Debug)]
pub struct Report {
    pub status: Status,
    pub bounded: bool,
    pub vars: Vec<Var>,
    pub solutions: Vec<Solution>,
    /// Set when enumeration stopped on an error after some answers.
    pub error: Option<String>,
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.solutions {
            out.push_str(&render_solution(s, &self.vars, self.bounded));
        }
        if self.solutions.is_empty() {
            match self.status {
                Status::Failure => out.push_str("no\n"),
                Status::BoundExhausted => out.push_str("unknown (bound exhausted)\n"),
                _ => {}
            }
        }
        out
    }
}

/// Bindings, optional trace and the `yes` line of one answer.
pub fn render_solution(s: &Solution, vars: &[Var], bounded: bool) -> String {
    let mut out = String::new();
    if let Some(t) = &s.trace {
        out.push_str(&t.export());
    }
    for v in vars {
        if let Some(t) = s.answer.get(v) {
            let _ = writeln!(out, "{v} = {t}");
        }
    }
    if bounded {
        let _ = writeln!(out, "yes, length = {}", s.length);
    } else {
        out.push_str("yes\n");
    }
    out
}

/// Loaded pages, a plain program and the engine settings of one user.
pub struct Session {
    config: SessionConfig,
    loader: Arc<Loader>,
    program: Program,
    pages: Vec<Arc<ModulePage>>,
}

impl Session {
    pub fn new(config: SessionConfig) -> Result<Session, SessionError> {
        let map = match &config.map {
            Some(path) => ResolutionMap::from_file(path)?,
            None => ResolutionMap::new(),
        };
        Ok(Session { config, loader: Arc::new(Loader::new(map)), program: Program::empty(), pages: Vec::new() })
    }

    /// Replaces the resolution map. Pages already loaded stay loaded.
    pub fn set_map(&mut self, path: Option<PathBuf>) -> Result<(), SessionError> {
        let map = match &path {
            Some(p) => ResolutionMap::from_file(p)?,
            None => ResolutionMap::new(),
        };
        self.loader = Arc::new(Loader::new(map));
        self.config.map = path;
        Ok(())
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn config_mut(&mut self) -> &mut SessionConfig {
        &mut self.config
    }

    pub fn loader(&self) -> &Arc<Loader> {
        &self.loader
    }

    pub fn pages(&self) -> &[Arc<ModulePage>] {
        &self.pages
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    /// Resolves a page; later queries run inside its scope. Pages loaded
    /// later are nested inside earlier ones.
    pub fn load(&mut self, origin: &str) -> Result<Arc<ModulePage>, SessionError> {
        let page = self.loader.resolve(origin)?;
        self.pages.push(page.clone());
        Ok(page)
    }

    /// Appends plain clauses (closed, one per statement) to the program.
    pub fn add_program_text(&mut self, text: &str, origin: &str) -> Result<usize, SessionError> {
        let clauses = parse_program(text, origin)?;
        for c in &clauses {
            self.loader
                .builtins()
                .check_clause(c)
                .map_err(|source| SessionError::Builtin { origin: origin.to_string(), source })?;
        }
        let n = clauses.len();
        let all: Vec<_> = self.program.clauses.iter().cloned().chain(clauses).collect();
        self.program = Program::new(all, self.program.macros.iter().cloned().collect::<Vec<_>>());
        Ok(n)
    }

    pub fn add_program_file(&mut self, path: &std::path::Path) -> Result<usize, SessionError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SessionError::Io { path: path.display().to_string(), cause: e.to_string() })?;
        self.add_program_text(&text, &path.display().to_string())
    }

    /// Parses `text` (the `?-` and final `.` may be omitted) and wraps it in
    /// the loaded pages.
    pub fn prepare(&self, text: &str) -> Result<Prepared, SessionError> {
        let Query { bound, goal } = parse_query(&normalize_query(text))?;
        let vars: Vec<Var> = goal.free_vars().into_iter().filter(|v| !v.name().starts_with('_')).collect();
        let wrapped = self.pages.iter().rev().fold(goal, |g, page| desugar_link(page, g));
        let goal = self.loader.resolve_goal(&wrapped)?;
        Ok(Prepared { goal, bound: bound.or(self.config.default_bound), vars })
    }

    fn engine(&self, bounded: bool) -> Engine {
        let unbounded_guard = !bounded;
        let options = SolveOptions {
            occurs_check: self.config.occurs_check,
            trace: self.config.trace,
            deadline: unbounded_guard.then(|| Instant::now() + Duration::from_millis(self.config.wall_cap_ms)),
            max_frames: if unbounded_guard { self.config.max_frames } else { None },
        };
        Engine::new().with_resolver(self.loader.clone()).with_options(options)
    }

    /// Starts the search; pull answers from the returned stream.
    pub fn start(&self, q: &Prepared) -> Solutions {
        match q.bound {
            Some(m) => self.engine(true).pv_bounded(&self.program, &q.goal, m),
            None => self.engine(false).solve(&self.program, &q.goal),
        }
    }

    /// Runs a query to at most `max_solutions` answers.
    pub fn run(&self, text: &str) -> Result<Report, SessionError> {
        let q = self.prepare(text)?;
        let mut sols = self.start(&q);
        self.collect(&q, &mut sols)
    }

    /// Draws up to `max_solutions` answers from a started search. The search
    /// stays with the caller, who may discard it without freeing it.
    pub fn collect(&self, q: &Prepared, sols: &mut Solutions) -> Result<Report, SessionError> {
        let mut report = Report {
            status: Status::Failure,
            bounded: q.bound.is_some(),
            vars: q.vars.clone(),
            solutions: Vec::new(),
            error: None,
        };
        while report.solutions.len() < self.config.max_solutions.max(1) {
            match sols.next() {
                Some(Ok(s)) => report.solutions.push(s),
                Some(Err(e)) if report.solutions.is_empty() => return Err(e.into()),
                Some(Err(e)) => {
                    report.error = Some(e.to_string());
                    break;
                }
                None => break,
            }
        }
        report.status = if !report.solutions.is_empty() {
            Status::Success
        } else if sols.bound_cut() {
            Status::BoundExhausted
        } else {
            Status::Failure
        };
        Ok(report)
    }
}

/// Adds the `?-` prefix and the final `.` when missing.
pub fn normalize_query(text: &str) -> String {
    let t = text.trim();
    let mut s = if t.starts_with("?-") { t.to_string() } else { format!("?- {t}") };
    if !s.ends_with('.') {
        s.push('.');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixtures() -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
    }

    #[test]
    fn bounded_program_query() {
        let mut s = Session::new(SessionConfig::default()).unwrap();
        s.add_program_text("p.", "prog").unwrap();
        let r = s.run("?- (10) p.").unwrap();
        assert_eq!(r.status, Status::Success);
        assert_eq!(r.render(), "yes, length = 2\n");
        assert_eq!(s.run("?- (0) p.").unwrap().status, Status::BoundExhausted);
        assert_eq!(s.run("q").unwrap().render(), "no\n");
    }

    #[test]
    fn loaded_pages_wrap_queries() {
        let cfg = SessionConfig { map: Some(fixtures().join("d.com.map")), ..Default::default() };
        let mut s = Session::new(cfg).unwrap();
        s.load("www.d.com/arcs").unwrap();
        let r = s.run("edge(tokyo, Z)").unwrap();
        assert_eq!(r.render(), "Z = beizing\nyes\n");
        let r = s.run("(100) edge(tokyo, Z)").unwrap();
        assert!(r.render().starts_with("Z = beizing\nyes, length = "));
    }

    #[test]
    fn builtin_heads_rejected_in_programs() {
        let mut s = Session::new(SessionConfig::default()).unwrap();
        assert!(matches!(s.add_program_text("neq(a,b).", "prog"), Err(SessionError::Builtin { .. })));
    }

    #[test]
    fn query_normalization() {
        assert_eq!(normalize_query("p"), "?- p.");
        assert_eq!(normalize_query("?- (3) p."), "?- (3) p.");
    }
}
