//! Content-addressed on-disk store of rendered characters.
//!
//! Each entry is a JSON file named by the SHA-256 of its key, holding the
//! key, the payload and the payload's SHA-256. Writers hold an exclusive
//! lock on `.lock` in the cache directory and publish through a rename.

use std::fs::{self, File, OpenOptions};
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "QCHAR_CACHE_DIR";

/// Bumped whenever the rendered output changes.
const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    sha256: String,
    payload: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit(String),
    Miss,
    /// The entry existed but failed its checksum or did not parse.
    Corrupt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Status {
    pub dir: PathBuf,
    pub entries: usize,
    pub bytes: u64,
}

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Key of one computation request.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub command: String,
    pub family: String,
    pub args: String,
    pub max_height: Option<u32>,
    pub max_terms: Option<usize>,
    pub t: bool,
    pub format: String,
}

impl CacheKey {
    pub fn render(&self) -> String {
        let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
        format!(
            "v{FORMAT_VERSION}|{}|{}|{}|h={}|n={}|t={}|{}",
            self.command,
            self.family,
            self.args,
            opt(self.max_height.map(|h| h.to_string())),
            opt(self.max_terms.map(|h| h.to_string())),
            self.t as u8,
            self.format
        )
    }
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// `$QCHAR_CACHE_DIR`, else `$XDG_CACHE_HOME/qchar`, else `~/.cache/qchar`.
    pub fn from_env() -> Self {
        if let Some(d) = std::env::var_os(CACHE_DIR_ENV) {
            return Cache::new(d);
        }
        if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
            return Cache::new(Path::new(&d).join("qchar"));
        }
        match std::env::var_os("HOME") {
            Some(h) => Cache::new(Path::new(&h).join(".cache").join("qchar")),
            None => Cache::new(std::env::temp_dir().join("qchar-cache")),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn entry_path(&self, key: &str) -> PathBuf {
        self.dir
            .join(format!("{}.json", sha256_hex(key.as_bytes())))
    }

    fn lock(&self, exclusive: bool) -> io::Result<File> {
        fs::create_dir_all(&self.dir)?;
        let f = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(self.dir.join(".lock"))?;
        if exclusive {
            f.lock()?;
        } else {
            f.lock_shared()?;
        }
        Ok(f)
    }

    pub fn get(&self, key: &str) -> io::Result<Lookup> {
        let path = self.entry_path(key);
        if !path.exists() {
            return Ok(Lookup::Miss);
        }
        let _guard = self.lock(false)?;
        let raw = match fs::read_to_string(&path) {
            Ok(r) => r,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Lookup::Miss),
            Err(_) => return Ok(Lookup::Corrupt),
        };
        let Ok(entry) = serde_json::from_str::<Entry>(&raw) else {
            return Ok(Lookup::Corrupt);
        };
        if entry.key != key || entry.sha256 != sha256_hex(entry.payload.as_bytes()) {
            return Ok(Lookup::Corrupt);
        }
        Ok(Lookup::Hit(entry.payload))
    }

    pub fn put(&self, key: &str, payload: &str) -> io::Result<()> {
        let _guard = self.lock(true)?;
        let entry = Entry {
            key: key.to_string(),
            sha256: sha256_hex(payload.as_bytes()),
            payload: payload.to_string(),
        };
        let path = self.entry_path(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(&entry).map_err(io::Error::other)?)?;
        fs::rename(&tmp, &path)
    }

    /// Cached payload, or `compute` stored on a miss or a corrupt entry.
    pub fn get_or_compute<E, F>(&self, key: &str, compute: F) -> Result<(String, Lookup), E>
    where
        F: FnOnce() -> Result<String, E>,
        E: From<io::Error>,
    {
        let found = self.get(key)?;
        if let Lookup::Hit(p) = found {
            return Ok((p.clone(), Lookup::Hit(p)));
        }
        let payload = compute()?;
        self.put(key, &payload)?;
        Ok((payload, found))
    }

    pub fn status(&self) -> io::Result<Status> {
        let mut st = Status {
            dir: self.dir.clone(),
            entries: 0,
            bytes: 0,
        };
        if !self.dir.exists() {
            return Ok(st);
        }
        for e in fs::read_dir(&self.dir)? {
            let e = e?;
            if e.path().extension().is_some_and(|x| x == "json") {
                st.entries += 1;
                st.bytes += e.metadata()?.len();
            }
        }
        Ok(st)
    }

    /// Removes every entry; returns how many were removed.
    pub fn clear(&self) -> io::Result<usize> {
        if !self.dir.exists() {
            return Ok(0);
        }
        let _guard = self.lock(true)?;
        let mut n = 0;
        for e in fs::read_dir(&self.dir)? {
            let p = e?.path();
            if p.extension().is_some_and(|x| x == "json") {
                fs::remove_file(p)?;
                n += 1;
            }
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_get_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        assert_eq!(c.get("k").unwrap(), Lookup::Miss);
        c.put("k", "payload\n").unwrap();
        assert_eq!(c.get("k").unwrap(), Lookup::Hit("payload\n".into()));
        assert_eq!(c.status().unwrap().entries, 1);

        let path = c.entry_path("k");
        let raw = fs::read_to_string(&path)
            .unwrap()
            .replace("payload", "poyload");
        fs::write(&path, raw).unwrap();
        assert_eq!(c.get("k").unwrap(), Lookup::Corrupt);
        let (p, how) = c
            .get_or_compute::<io::Error, _>("k", || Ok("payload\n".into()))
            .unwrap();
        assert_eq!((p.as_str(), how), ("payload\n", Lookup::Corrupt));
        assert_eq!(c.get("k").unwrap(), Lookup::Hit("payload\n".into()));
        assert_eq!(c.clear().unwrap(), 1);
        assert_eq!(c.get("k").unwrap(), Lookup::Miss);
    }

    #[test]
    fn digest() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
