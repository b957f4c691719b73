//! Per-bus analysis cache for resumable scans.
//!
//! On disk the cache is one JSON object per line. Entries are keyed by a
//! fingerprint of the variant and the bus; an entry is only reused when both
//! the fingerprint and [`SCHEMA_VERSION`] match and the stored record passes
//! the consistency checks in [`BusAnalysis::try_from`].

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{BusAnalysis, Engine};
use crate::error::{Error, Result};
use crate::report::{ResultRecord, SCHEMA_VERSION};
use crate::variant::VariantSpec;

/// Hex SHA-256 of the variant's canonical JSON.
pub fn fingerprint(variant: &VariantSpec) -> String {
    let canonical = serde_json::to_vec(variant).expect("variants always serialize");
    hex::encode(Sha256::digest(&canonical))
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    schema_version: u32,
    fingerprint: String,
    record: ResultRecord,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScanCache {
    entries: BTreeMap<(String, u32), ResultRecord>,
}

impl ScanCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, analysis: &BusAnalysis) {
        self.entries.insert(
            (fingerprint(&analysis.variant), analysis.bus),
            ResultRecord::from(analysis),
        );
    }

    pub fn get(&self, variant: &VariantSpec, bus: u32) -> Option<BusAnalysis> {
        let record = self.entries.get(&(fingerprint(variant), bus))?;
        if record.variant != *variant {
            return None;
        }
        BusAnalysis::try_from(record.clone()).ok()
    }

    /// Number of entries recorded for `variant`.
    pub fn usable_for(&self, variant: &VariantSpec) -> usize {
        let fp = fingerprint(variant);
        self.entries.keys().filter(|(f, _)| *f == fp).count()
    }

    /// Reads a cache file. A missing file is an empty cache. Lines that do
    /// not parse, carry another schema version or fail validation are
    /// skipped, each with a warning.
    pub fn load(path: &Path) -> Result<(ScanCache, Vec<String>)> {
        Self::load_filtered(path, None)
    }

    /// Like [`ScanCache::load`], keeping only entries for `variant`.
    pub fn load_for(path: &Path, variant: &VariantSpec) -> Result<(ScanCache, Vec<String>)> {
        Self::load_filtered(path, Some(&fingerprint(variant)))
    }

    fn load_filtered(path: &Path, wanted: Option<&str>) -> Result<(ScanCache, Vec<String>)> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Ok((ScanCache::new(), Vec::new()))
            }
            Err(e) => return Err(Error::io(path, e)),
        };
        let mut cache = ScanCache::new();
        let mut warnings = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let warn = |msg: String| format!("{}:{}: {msg}; entry skipped", path.display(), n + 1);
            let entry: CacheLine = match serde_json::from_str(line) {
                Ok(e) => e,
                Err(e) => {
                    warnings.push(warn(format!("malformed line ({e})")));
                    continue;
                }
            };
            if entry.schema_version != SCHEMA_VERSION {
                warnings.push(warn(format!("schema version {}", entry.schema_version)));
                continue;
            }
            if fingerprint(&entry.record.variant) != entry.fingerprint {
                warnings.push(warn("fingerprint does not match the stored variant".into()));
                continue;
            }
            if wanted.is_some_and(|w| w != entry.fingerprint) {
                warnings.push(warn(format!(
                    "fingerprint mismatch (variant `{}`)",
                    entry.record.variant.name()
                )));
                continue;
            }
            if let Err(e) = BusAnalysis::try_from(entry.record.clone()) {
                warnings.push(warn(e.to_string()));
                continue;
            }
            cache
                .entries
                .insert((entry.fingerprint, entry.record.bus), entry.record);
        }
        Ok((cache, warnings))
    }

    /// Writes the whole cache to a sibling temporary file and renames it over
    /// `path`, so an interrupted save leaves the previous file intact.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = temp_path(path);
        let write = || -> std::io::Result<()> {
            let mut file = fs::File::create(&tmp)?;
            let mut buf = Vec::new();
            for ((fp, _), record) in &self.entries {
                let line = CacheLine {
                    schema_version: SCHEMA_VERSION,
                    fingerprint: fp.clone(),
                    record: record.clone(),
                };
                serde_json::to_writer(&mut buf, &line)?;
                buf.push(b'\n');
            }
            file.write_all(&buf)?;
            file.sync_all()?;
            fs::rename(&tmp, path)
        };
        write().map_err(|e| {
            let _ = fs::remove_file(&tmp);
            Error::io(path, e)
        })
    }
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_else(|| "cache".into());
    name.push(".tmp");
    path.with_file_name(name)
}

/// Analyzes `bus`, reusing a cached record when available. Returns the
/// analysis and whether it was freshly computed. A realism filter bypasses
/// the cache, since the fingerprint does not cover it.
pub fn analyze_cached(
    engine: &Engine,
    cache: &mut ScanCache,
    variant: &VariantSpec,
    bus: u32,
) -> Result<(BusAnalysis, bool)> {
    if engine.options().realism.is_active() {
        return Ok((engine.analyze_bus(bus, variant)?, true));
    }
    if let Some(hit) = cache.get(variant, bus) {
        return Ok((hit, false));
    }
    let analysis = engine.analyze_bus(bus, variant)?;
    cache.insert(&analysis);
    Ok((analysis, true))
}
