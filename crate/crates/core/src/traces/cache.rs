use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use super::TraceReport;
use crate::error::Result;

/// Trace reports keyed by request hash, optionally persisted as one JSON file.
///
/// Readers share the map; writes go through a single writer that rewrites the
/// file via a temporary sibling and a rename, so a crash never leaves a torn file.
#[derive(Debug, Default)]
pub struct TraceCache {
    path: Option<PathBuf>,
    entries: RwLock<BTreeMap<String, TraceReport>>,
    writer: Mutex<()>,
}

impl TraceCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (or starts) a cache file. A missing file is an empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let entries = match fs::read_to_string(&path) {
            Ok(text) if !text.trim().is_empty() => serde_json::from_str(&text)?,
            Ok(_) => BTreeMap::new(),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(Self {
            path: Some(path),
            entries: RwLock::new(entries),
            writer: Mutex::new(()),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<TraceReport> {
        self.entries.read().expect("cache lock").get(key).cloned()
    }

    pub fn insert(&self, report: TraceReport) -> Result<()> {
        let _guard = self.writer.lock().expect("cache writer lock");
        let snapshot = {
            let mut map = self.entries.write().expect("cache lock");
            map.insert(report.cache_key.clone(), report);
            self.path.as_ref().map(|_| serde_json::to_string_pretty(&*map))
        };
        if let (Some(path), Some(text)) = (&self.path, snapshot) {
            let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
            fs::write(&tmp, text?)?;
            fs::rename(&tmp, path)?;
        }
        Ok(())
    }
}
