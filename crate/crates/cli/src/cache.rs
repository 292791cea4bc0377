//! Single-file JSON result cache keyed by "kind:n:digits:method".
//!
//! Access takes a whole-file advisory lock (flock) so concurrent invocations
//! serialize cleanly. Unknown schema versions are rejected, never migrated.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::os::unix::io::AsRawFd;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize, Clone)]
pub struct CacheEntry {
    pub value: String,
    pub error_bound: String,
    pub created_at: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CacheFile {
    pub schema_version: u32,
    pub entries: BTreeMap<String, CacheEntry>,
}

impl Default for CacheFile {
    fn default() -> Self {
        CacheFile { schema_version: SCHEMA_VERSION, entries: BTreeMap::new() }
    }
}

pub fn cache_key(kind: &str, n: i32, digits: u32, method: &str) -> String {
    format!("{kind}:{n}:{digits}:{method}")
}

struct Locked {
    file: File,
}

impl Locked {
    fn acquire(path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(path)?;
        let rc = unsafe { libc::flock(file.as_raw_fd(), libc::LOCK_EX) };
        if rc != 0 {
            return Err(std::io::Error::last_os_error());
        }
        Ok(Locked { file })
    }

    fn read(&mut self) -> Result<CacheFile, String> {
        let mut buf = String::new();
        self.file
            .read_to_string(&mut buf)
            .map_err(|e| format!("cache read failed: {e}"))?;
        if buf.trim().is_empty() {
            return Ok(CacheFile::default());
        }
        let parsed: CacheFile =
            serde_json::from_str(&buf).map_err(|e| format!("cache is not valid JSON: {e}"))?;
        if parsed.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "cache schema_version {} is not supported (expected {SCHEMA_VERSION})",
                parsed.schema_version
            ));
        }
        Ok(parsed)
    }

    fn write(&mut self, cache: &CacheFile) -> Result<(), String> {
        let body = serde_json::to_string_pretty(cache).expect("cache serializes");
        self.file.set_len(0).map_err(|e| e.to_string())?;
        self.file.seek(SeekFrom::Start(0)).map_err(|e| e.to_string())?;
        self.file.write_all(body.as_bytes()).map_err(|e| e.to_string())?;
        self.file.write_all(b"\n").map_err(|e| e.to_string())?;
        Ok(())
    }
}

impl Drop for Locked {
    fn drop(&mut self) {
        unsafe { libc::flock(self.file.as_raw_fd(), libc::LOCK_UN) };
    }
}

pub fn lookup(path: &Path, key: &str) -> Result<Option<CacheEntry>, String> {
    if !path.exists() {
        return Ok(None);
    }
    let mut locked = Locked::acquire(path).map_err(|e| e.to_string())?;
    Ok(locked.read()?.entries.get(key).cloned())
}

pub fn store(path: &Path, key: &str, value: String, error_bound: String) -> Result<(), String> {
    let mut locked = Locked::acquire(path).map_err(|e| e.to_string())?;
    let mut cache = locked.read()?;
    let created_at = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    cache
        .entries
        .insert(key.to_string(), CacheEntry { value, error_bound, created_at });
    locked.write(&cache)
}

pub fn read_all(path: &Path) -> Result<CacheFile, String> {
    if !path.exists() {
        return Ok(CacheFile::default());
    }
    let mut locked = Locked::acquire(path).map_err(|e| e.to_string())?;
    locked.read()
}

pub fn clear(path: &Path) -> Result<(), String> {
    if path.exists() {
        std::fs::remove_file(path).map_err(|e| e.to_string())?;
    }
    Ok(())
}
