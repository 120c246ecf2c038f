//! Persisted values. The first line is `TDESC-CACHE v1`; every other line
//! holds four tab-separated fields: canonical invariant, value `p/q`, engine
//! tag and a comma-separated seed list (`-` when empty).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::exact::{format_value, parse_value, Value};
use crate::grammar::parse_invariant;
use crate::invariant::Invariant;
use crate::recursion::{BaseProvider, BaseUnavailable};

pub const HEADER: &str = "TDESC-CACHE v1";

/// Environment variable naming the default cache file.
pub const CACHE_ENV: &str = "TDESC_CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EngineTag {
    Recursion,
    Oracle,
    Table,
}

impl EngineTag {
    pub fn name(self) -> &'static str {
        match self {
            EngineTag::Recursion => "recursion",
            EngineTag::Oracle => "oracle",
            EngineTag::Table => "table",
        }
    }
}

impl fmt::Display for EngineTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "recursion" => Ok(EngineTag::Recursion),
            "oracle" => Ok(EngineTag::Oracle),
            "table" => Ok(EngineTag::Table),
            other => Err(format!("unknown engine tag {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CacheEntry {
    pub value: Value,
    pub engine: EngineTag,
    pub seeds: Vec<u64>,
}

/// Two values recorded for the same invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct Conflict {
    pub invariant: Invariant,
    pub existing: CacheEntry,
    pub incoming: CacheEntry,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ({}) vs {} ({})",
            self.invariant,
            format_value(&self.existing.value),
            self.existing.engine,
            format_value(&self.incoming.value),
            self.incoming.engine
        )
    }
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("missing or wrong header, expected {HEADER:?}")]
    Header,
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("conflicting values: {}", .0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; "))]
    Conflicts(Vec<Conflict>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CacheFile {
    entries: BTreeMap<Invariant, CacheEntry>,
}

impl CacheFile {
    pub fn new() -> Self {
        CacheFile::default()
    }

    pub fn get(&self, inv: &Invariant) -> Option<&CacheEntry> {
        self.entries.get(inv)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Invariant, &CacheEntry)> {
        self.entries.iter()
    }

    /// Adds an entry. An equal value merges the seed lists; a different
    /// value is a conflict and leaves the file unchanged.
    pub fn insert(&mut self, inv: Invariant, entry: CacheEntry) -> Result<(), Box<Conflict>> {
        match self.entries.get_mut(&inv) {
            None => {
                self.entries.insert(inv, entry);
                Ok(())
            }
            Some(old) if old.value == entry.value => {
                for s in entry.seeds {
                    if !old.seeds.contains(&s) {
                        old.seeds.push(s);
                    }
                }
                old.seeds.sort_unstable();
                Ok(())
            }
            Some(old) => Err(Box::new(Conflict { invariant: inv, existing: old.clone(), incoming: entry })),
        }
    }

    pub fn parse(text: &str) -> Result<CacheFile, CacheError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end() == HEADER => {}
            _ => return Err(CacheError::Header),
        }
        let mut file = CacheFile::new();
        let mut conflicts = Vec::new();
        for (k, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let syntax = |reason: String| CacheError::Syntax { line: k + 1, reason };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(syntax(format!("expected 4 tab-separated fields, found {}", fields.len())));
            }
            let inv = parse_invariant(fields[0]).map_err(|e| syntax(e.to_string()))?;
            let value = parse_value(fields[1]).ok_or_else(|| syntax(format!("bad value {:?}", fields[1])))?;
            let engine = fields[2].parse().map_err(syntax)?;
            let seeds = match fields[3].trim() {
                "" | "-" => Vec::new(),
                s => s
                    .split(',')
                    .map(|x| x.trim().parse::<u64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| syntax(format!("bad seed list: {e}")))?,
            };
            if let Err(c) = file.insert(inv, CacheEntry { value, engine, seeds }) {
                conflicts.push(*c);
            }
        }
        if conflicts.is_empty() {
            Ok(file)
        } else {
            Err(CacheError::Conflicts(conflicts))
        }
    }

    pub fn load(path: &Path) -> Result<CacheFile, CacheError> {
        CacheFile::parse(&std::fs::read_to_string(path)?)
    }

    /// Loads `path`, or starts empty when it does not exist yet.
    pub fn load_or_new(path: &Path) -> Result<CacheFile, CacheError> {
        if path.exists() {
            CacheFile::load(path)
        } else {
            Ok(CacheFile::new())
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), CacheError> {
        std::fs::write(path, self.to_string())?;
        Ok(())
    }
}

impl fmt::Display for CacheFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER}")?;
        for (inv, e) in &self.entries {
            let seeds = if e.seeds.is_empty() {
                "-".to_string()
            } else {
                e.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
            };
            writeln!(f, "{inv}\t{}\t{}\t{seeds}", format_value(&e.value), e.engine)?;
        }
        Ok(())
    }
}

/// Base values read from a cache file.
#[derive(Clone, Debug, Default)]
pub struct TableProvider {
    pub table: CacheFile,
}

impl TableProvider {
    pub fn new(table: CacheFile) -> Self {
        TableProvider { table }
    }
}

impl BaseProvider for TableProvider {
    fn base(&self, inv: &Invariant) -> Result<Value, BaseUnavailable> {
        self.table
            .get(inv)
            .map(|e| e.value.clone())
            .ok_or_else(|| BaseUnavailable { invariant: inv.clone(), reason: "not in the table".into() })
    }

    fn tag(&self) -> &str {
        "table"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int_value;

    fn p(s: &str) -> Invariant {
        parse_invariant(s).unwrap()
    }

    #[test]
    fn round_trip() {
        let mut f = CacheFile::new();
        f.insert(
            p("<tau_0(2) tau_1(2)^2>_2"),
            CacheEntry { value: int_value(1), engine: EngineTag::Oracle, seeds: vec![1, 2] },
        )
        .unwrap();
        f.insert(
            p("<tau_1(1) tau_1(2)^2>_2"),
            CacheEntry { value: int_value(3), engine: EngineTag::Recursion, seeds: vec![] },
        )
        .unwrap();
        let text = f.to_string();
        assert!(text.starts_with("TDESC-CACHE v1\n"));
        assert_eq!(CacheFile::parse(&text).unwrap(), f);
    }

    #[test]
    fn conflicts_are_reported() {
        let text = "TDESC-CACHE v1\n<tau_0(2)^2>_1\t1\toracle\t1\n<tau_0(2)^2>_1\t2\ttable\t-\n";
        match CacheFile::parse(text) {
            Err(CacheError::Conflicts(c)) => assert_eq!(c.len(), 1),
            other => panic!("expected a conflict, got {other:?}"),
        }
        let agreeing = "TDESC-CACHE v1\n<tau_0(2)^2>_1\t1\toracle\t1\n<tau_0(2)^2>_1\t1\trecursion\t2\n";
        assert_eq!(CacheFile::parse(agreeing).unwrap().get(&p("<tau_0(2)^2>_1")).unwrap().seeds, vec![1, 2]);
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(CacheFile::parse("nope\n"), Err(CacheError::Header)));
        assert!(matches!(
            CacheFile::parse("TDESC-CACHE v1\n<tau_0(2)^2>_1\t1\n"),
            Err(CacheError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            CacheFile::parse("TDESC-CACHE v1\n<tau_0(2)^2>_1\tx\toracle\t-\n"),
            Err(CacheError::Syntax { .. })
        ));
    }
}
