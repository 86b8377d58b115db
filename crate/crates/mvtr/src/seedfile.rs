use std::fmt;
use std::path::{Path, PathBuf};

use mvtr_core::hodge::{SeedKeyError, Seeds};
use mvtr_core::q::parse_q;

pub const DEFAULT_SEEDS: &str = include_str!("../seeds/default.toml");
pub const SEED_ENV: &str = "MVTR_SEEDS";
const VERSION: i64 = 1;

#[derive(Clone, Debug)]
pub struct SeedFile {
    /// `None` for the built-in file
    pub path: Option<PathBuf>,
    pub seeds: Seeds,
    /// `(key, value, source)` sorted by key
    pub provenance: Vec<(String, String, String)>,
}

#[derive(Debug)]
pub enum SeedFileError {
    Io(PathBuf, std::io::Error),
    Parse(String),
    Version(String),
    Key { key: String, why: String },
}

impl fmt::Display for SeedFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedFileError::Io(p, e) => write!(f, "cannot read seed file {}: {}", p.display(), e),
            SeedFileError::Parse(m) => write!(f, "malformed seed file: {}", m),
            SeedFileError::Version(m) => write!(f, "seed file version: {}", m),
            SeedFileError::Key { key, why } => write!(f, "seed key `{}`: {}", key, why),
        }
    }
}

impl SeedFile {
    pub fn label(&self) -> String {
        match &self.path {
            Some(p) => p.display().to_string(),
            None => "<built-in>".into(),
        }
    }

    /// Entries of genus at most `g`.
    pub fn provenance_through(&self, g: u32) -> Vec<(String, String, String)> {
        self.provenance.iter().filter(|(k, _, _)| key_genus(k).is_some_and(|x| x <= g)).cloned().collect()
    }
}

fn key_genus(key: &str) -> Option<u32> {
    key.split(':').nth(1)?.parse().ok()
}

/// Explicit path, then `$MVTR_SEEDS`, then the built-in file.
pub fn load(path: Option<&Path>) -> Result<SeedFile, SeedFileError> {
    let path = path.map(Path::to_path_buf).or_else(|| std::env::var_os(SEED_ENV).map(PathBuf::from));
    match path {
        None => parse(DEFAULT_SEEDS, None),
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| SeedFileError::Io(p.clone(), e))?;
            parse(&text, Some(p))
        }
    }
}

pub fn parse(text: &str, path: Option<PathBuf>) -> Result<SeedFile, SeedFileError> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| SeedFileError::Parse(e.to_string()))?;
    for k in doc.keys() {
        if !matches!(k.as_str(), "version" | "seeds" | "provenance") {
            return Err(SeedFileError::Parse(format!("unknown top-level entry `{}`", k)));
        }
    }
    match doc.get("version") {
        None => {}
        Some(toml::Value::Integer(VERSION)) => {}
        Some(v) => return Err(SeedFileError::Version(format!("expected {}, found {}", VERSION, v))),
    }
    let empty = toml::Table::new();
    let table = |name: &str| -> Result<&toml::Table, SeedFileError> {
        match doc.get(name) {
            None => Ok(&empty),
            Some(toml::Value::Table(t)) => Ok(t),
            Some(_) => Err(SeedFileError::Parse(format!("`{}` must be a table", name))),
        }
    };
    let values = table("seeds")?;
    let sources = table("provenance")?;

    let mut seeds = Seeds::default();
    let mut provenance = Vec::new();
    for (key, v) in values {
        let bad = |why: &str| SeedFileError::Key { key: key.clone(), why: why.into() };
        let s = v.as_str().ok_or_else(|| bad("value must be a \"p/q\" string"))?;
        let q = parse_q(s).ok_or_else(|| bad("value is not an exact rational"))?;
        seeds.insert_key(key, q).map_err(|e| match e {
            SeedKeyError::UnknownKind(k) => bad(&format!("unknown kind `{}`", k)),
            SeedKeyError::BadNumber(_) => bad("malformed genus or index list"),
        })?;
        let src = match sources.get(key) {
            Some(toml::Value::String(s)) => s.clone(),
            Some(_) => return Err(bad("provenance must be a string")),
            None => return Err(bad("no provenance entry")),
        };
        provenance.push((key.clone(), s.trim().to_string(), src));
    }
    if let Some(k) = sources.keys().find(|k| !values.contains_key(*k)) {
        return Err(SeedFileError::Key { key: k.clone(), why: "provenance without a seed value".into() });
    }
    provenance.sort();
    Ok(SeedFile { path, seeds, provenance })
}
