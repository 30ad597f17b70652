//! Append-only JSONL store of exact Kloosterman sums.
//!
//! One entry per line:
//! `{"version":"0.1.0","key":"5|...","order":8,"terms":[[0,"2"],[4,"-1"]]}`.
//! Lines from another tool version or that fail to parse are skipped and
//! counted. Each entry is written with a single `write` on a file opened in
//! append mode, so concurrent writers never interleave within a line.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rug::Integer;
use serde::{Deserialize, Serialize};

use poincare_core::cyclotomic::CyclotomicInteger;
use poincare_core::kloosterman::SumCache;

pub const FILE_NAME: &str = "kloosterman-v1.jsonl";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize, Deserialize)]
pub struct CacheEntry {
    pub version: String,
    pub key: String,
    pub order: u64,
    pub terms: Vec<(u64, String)>,
}

impl CacheEntry {
    fn new(key: &str, v: &CyclotomicInteger) -> CacheEntry {
        CacheEntry {
            version: VERSION.to_string(),
            key: key.to_string(),
            order: v.order(),
            terms: v.terms().map(|(t, c)| (t, c.to_string())).collect(),
        }
    }

    fn value(&self) -> Option<CyclotomicInteger> {
        if self.order == 0 {
            return None;
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (t, c) in &self.terms {
            if *t >= self.order {
                return None;
            }
            terms.push((*t, c.parse::<Integer>().ok()?));
        }
        Some(CyclotomicInteger::from_terms(self.order, terms))
    }
}

pub struct JsonlCache {
    path: PathBuf,
    entries: Mutex<HashMap<String, CyclotomicInteger>>,
    writer: Mutex<Option<File>>,
    skipped: usize,
}

impl JsonlCache {
    pub fn open(dir: &Path) -> std::io::Result<JsonlCache> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(FILE_NAME);
        let mut entries = HashMap::new();
        let mut skipped = 0;
        if path.exists() {
            for line in BufReader::new(File::open(&path)?).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let parsed = serde_json::from_str::<CacheEntry>(&line)
                    .ok()
                    .filter(|e| e.version == VERSION)
                    .and_then(|e| e.value().map(|v| (e.key, v)));
                match parsed {
                    Some((k, v)) => {
                        entries.insert(k, v);
                    }
                    None => skipped += 1,
                }
            }
        }
        Ok(JsonlCache {
            path,
            entries: Mutex::new(entries),
            writer: Mutex::new(None),
            skipped,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Lines ignored while loading.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    fn append(&self, line: &str) -> std::io::Result<()> {
        let mut w = self.writer.lock().unwrap();
        if w.is_none() {
            *w = Some(OpenOptions::new().create(true).append(true).open(&self.path)?);
        }
        w.as_mut().unwrap().write_all(line.as_bytes())
    }
}

impl SumCache for JsonlCache {
    fn get(&self, key: &str) -> Option<CyclotomicInteger> {
        self.entries.lock().unwrap().get(key).cloned()
    }

    fn put(&self, key: &str, value: &CyclotomicInteger) {
        {
            let mut e = self.entries.lock().unwrap();
            if e.contains_key(key) {
                return;
            }
            e.insert(key.to_string(), value.clone());
        }
        let mut line = serde_json::to_string(&CacheEntry::new(key, value)).expect("entry serializes");
        line.push('\n');
        if let Err(err) = self.append(&line) {
            eprintln!("warning: cache write to {} failed: {err}", self.path.display());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corrupt_lines() {
        let dir = tempfile::tempdir().unwrap();
        let v = CyclotomicInteger::from_terms(8, [(0, Integer::from(2)), (5, Integer::from(-3))]);
        {
            let c = JsonlCache::open(dir.path()).unwrap();
            c.put("a", &v);
            c.put("a", &v);
        }
        let path = dir.path().join(FILE_NAME);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        writeln!(f, "{{not json").unwrap();
        writeln!(f, "{{\"version\":\"0.0.0\",\"key\":\"b\",\"order\":1,\"terms\":[]}}").unwrap();
        writeln!(f, "{{\"version\":\"{VERSION}\",\"key\":\"c\",\"order\":4,\"terms\":[[9,\"1\"]]}}").unwrap();
        let c = JsonlCache::open(dir.path()).unwrap();
        assert_eq!(c.skipped(), 3);
        assert_eq!(c.len(), 1);
        assert!(c.get("a").unwrap().value_eq(&v));
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().filter(|l| l.contains("\"a\"")).count(), 1);
    }
}
