//! Resolves page references (paths and URLs) to parsed macro definitions and
//! turns hyperlink goals into page-implication goals.

use std::collections::HashMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use crate::builtins::{BuiltinError, BuiltinTable};
use crate::syntax::{parse_module_file, Goal, LinkImpl, MacroBody, MacroDef, Name, ParseError};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);
pub const MAX_REDIRECTS: u32 = 3;

/// Environment variable naming the resolution map file.
pub const MAP_ENV: &str = "LWEBB_MAP";

#[derive(Clone, Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot fetch `{origin}`: {cause}")]
    Fetch { origin: String, cause: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("page `{origin}` defines no macro `/{root}`")]
    RootMissing { origin: String, root: String },
    #[error("page `{origin}`: {source}")]
    Builtin { origin: String, source: BuiltinError },
    #[error("bad resolution map line {line}: {text}")]
    Map { line: usize, text: String },
}

/// A web page: its macro definitions and the macro named after it.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulePage {
    pub origin: String,
    pub defs: Arc<[MacroDef]>,
    pub root: Name,
}

/// Something that can turn a link token into a page during proof search.
pub trait LinkResolver: Send + Sync {
    fn resolve_link(&self, origin: &str) -> Result<Arc<ModulePage>, LoadError>;
}

/// Ordered `prefix -> replacement` rewrites. The first matching rule wins and
/// the result is not rewritten again.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResolutionMap {
    rules: Vec<(String, String)>,
}

impl ResolutionMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_rule(mut self, prefix: impl Into<String>, replacement: impl Into<String>) -> Self {
        self.rules.push((prefix.into(), replacement.into()));
        self
    }

    /// Parses map text. Relative local replacements are taken relative to
    /// `base_dir` when given.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self, LoadError> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split(['%', '#']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((prefix, repl)) = line.split_once("->") else {
                return Err(LoadError::Map { line: i + 1, text: raw.to_string() });
            };
            let (prefix, mut repl) = (prefix.trim().to_string(), repl.trim().to_string());
            if prefix.is_empty() || repl.is_empty() {
                return Err(LoadError::Map { line: i + 1, text: raw.to_string() });
            }
            if let Some(dir) = base_dir {
                if !is_remote(&repl) && !repl.starts_with("file:") && Path::new(&repl).is_relative() {
                    repl = dir.join(&repl).to_string_lossy().into_owned();
                }
            }
            rules.push((prefix, repl));
        }
        Ok(ResolutionMap { rules })
    }

    pub fn from_file(path: &Path) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|e| LoadError::Fetch {
            origin: path.display().to_string(),
            cause: e.to_string(),
        })?;
        Self::parse(&text, path.parent())
    }

    pub fn apply(&self, origin: &str) -> String {
        for (prefix, repl) in &self.rules {
            if let Some(rest) = origin.strip_prefix(prefix.as_str()) {
                return format!("{repl}{rest}");
            }
        }
        origin.to_string()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

fn is_remote(location: &str) -> bool {
    location.starts_with("http://") || location.starts_with("https://")
}

/// Retrieves page text for a location.
pub trait Fetch: Send + Sync {
    fn fetch(&self, location: &str) -> Result<String, String>;
}

/// Reads `file:` URLs and bare paths.
#[derive(Debug, Default)]
pub struct FileFetcher;

impl Fetch for FileFetcher {
    fn fetch(&self, location: &str) -> Result<String, String> {
        let path = location.strip_prefix("file://").or_else(|| location.strip_prefix("file:")).unwrap_or(location);
        std::fs::read_to_string(path).map_err(|e| e.to_string())
    }
}

/// Plain HTTP GET with a global timeout and a redirect limit.
pub struct HttpFetcher {
    agent: ureq::Agent,
}

impl HttpFetcher {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .max_redirects(MAX_REDIRECTS)
            .http_status_as_error(true)
            .build();
        HttpFetcher { agent: config.into() }
    }
}

impl Default for HttpFetcher {
    fn default() -> Self {
        HttpFetcher::new(DEFAULT_TIMEOUT)
    }
}

impl Fetch for HttpFetcher {
    fn fetch(&self, location: &str) -> Result<String, String> {
        let mut resp = self
            .agent
            .get(location)
            .header("Accept", "text/plain")
            .call()
            .map_err(|e| e.to_string())?;
        if let Some(ct) = resp.headers().get("content-type") {
            let ct = ct.to_str().unwrap_or("");
            if !ct.starts_with("text/") {
                return Err(format!("response is not text (content-type `{ct}`)"));
            }
        }
        let mut body = String::new();
        resp.body_mut().as_reader().read_to_string(&mut body).map_err(|e| e.to_string())?;
        Ok(body)
    }
}

type CacheCell = Arc<Mutex<Option<Arc<ModulePage>>>>;

/// Page loader with a process-lifetime cache keyed by rewritten origin.
pub struct Loader {
    map: ResolutionMap,
    local: Box<dyn Fetch>,
    remote: Box<dyn Fetch>,
    builtins: BuiltinTable,
    cache: Mutex<HashMap<String, CacheCell>>,
    fetches: AtomicUsize,
}

impl Default for Loader {
    fn default() -> Self {
        Loader::new(ResolutionMap::new())
    }
}

impl Loader {
    pub fn new(map: ResolutionMap) -> Self {
        Loader::with_fetchers(map, Box::new(FileFetcher), Box::new(HttpFetcher::default()))
    }

    pub fn with_fetchers(map: ResolutionMap, local: Box<dyn Fetch>, remote: Box<dyn Fetch>) -> Self {
        Loader {
            map,
            local,
            remote,
            builtins: BuiltinTable::new(),
            cache: Mutex::new(HashMap::new()),
            fetches: AtomicUsize::new(0),
        }
    }

    pub fn builtins(&self) -> &BuiltinTable {
        &self.builtins
    }

    pub fn map(&self) -> &ResolutionMap {
        &self.map
    }

    /// Number of fetches performed (cache misses).
    pub fn fetch_count(&self) -> usize {
        self.fetches.load(Ordering::SeqCst)
    }

    pub fn resolve(&self, origin: &str) -> Result<Arc<ModulePage>, LoadError> {
        let location = self.map.apply(origin);
        let cell = {
            let mut cache = self.cache.lock().unwrap();
            cache.entry(location.clone()).or_default().clone()
        };
        let mut slot = cell.lock().unwrap();
        if let Some(page) = slot.as_ref() {
            return Ok(page.clone());
        }
        self.fetches.fetch_add(1, Ordering::SeqCst);
        let fetcher = if is_remote(&location) { &self.remote } else { &self.local };
        let text = fetcher
            .fetch(&location)
            .map_err(|cause| LoadError::Fetch { origin: origin.to_string(), cause })?;
        let page = Arc::new(self.build_page(origin, &location, &text)?);
        *slot = Some(page.clone());
        Ok(page)
    }

    fn build_page(&self, origin: &str, location: &str, text: &str) -> Result<ModulePage, LoadError> {
        let defs = parse_module_file(text, location)?;
        for d in &defs {
            if let MacroBody::Clause(c) = &d.body {
                self.builtins
                    .check_clause(c)
                    .map_err(|source| LoadError::Builtin { origin: origin.to_string(), source })?;
            }
        }
        let candidates = [basename(origin), basename(location)];
        let root = candidates
            .iter()
            .find(|b| defs.iter().any(|d| &*d.name == b.as_str()))
            .ok_or_else(|| LoadError::RootMissing { origin: origin.to_string(), root: candidates[0].clone() })?;
        Ok(ModulePage { origin: origin.to_string(), defs: defs.into(), root: root.as_str().into() })
    }

    /// Replaces every hyperlink in the goal structure (not inside clause
    /// bodies) with its resolved page implication.
    pub fn resolve_goal(&self, g: &Goal) -> Result<Goal, LoadError> {
        Ok(match g {
            Goal::Atom(_) | Goal::MacroRef(_) => g.clone(),
            Goal::Conj(l, r) => Goal::conj(self.resolve_goal(l)?, self.resolve_goal(r)?),
            Goal::ClauseImpl(c, body) => Goal::ClauseImpl(c.clone(), Arc::new(self.resolve_goal(body)?)),
            Goal::LinkImpl(l) => Goal::LinkImpl(LinkImpl {
                root: l.root.clone(),
                defs: l.defs.clone(),
                body: Arc::new(self.resolve_goal(&l.body)?),
            }),
            Goal::Link { origin, body } => {
                let page = self.resolve(origin)?;
                desugar_link(&page, self.resolve_goal(body)?)
            }
            Goal::Exists(v, body) => Goal::exists(v.clone(), self.resolve_goal(body)?),
        })
    }
}

impl LinkResolver for Loader {
    fn resolve_link(&self, origin: &str) -> Result<Arc<ModulePage>, LoadError> {
        self.resolve(origin)
    }
}

/// Last path segment with any extension removed: `www.d.com/lists` gives
/// `lists`, `fixtures/arcs.lw` gives `arcs`.
fn basename(origin: &str) -> String {
    let trimmed = origin.trim_end_matches('/');
    let seg = trimmed.rsplit('/').next().unwrap_or(trimmed);
    let seg = seg.split(['?', '#']).next().unwrap_or(seg);
    match seg.rsplit_once('.') {
        Some((stem, _)) if !stem.is_empty() => stem.to_string(),
        _ => seg.to_string(),
    }
}

/// `/root : defs => body` for a loaded page.
pub fn desugar_link(page: &ModulePage, body: Goal) -> Goal {
    Goal::LinkImpl(LinkImpl { root: page.root.clone(), defs: page.defs.clone(), body: Arc::new(body) })
}

/// Map file path from an explicit flag, falling back to [`MAP_ENV`].
pub fn map_path_from_env(explicit: Option<PathBuf>) -> Option<PathBuf> {
    explicit.or_else(|| std::env::var_os(MAP_ENV).map(PathBuf::from))
}
