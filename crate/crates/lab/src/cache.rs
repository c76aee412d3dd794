//! On-disk Gröbner basis cache keyed by SHA-256 of the input presentation.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use algebroid_core::algebra::GroebnerCache;
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "ALGEBROID_LAB_CACHE";

/// Entries live at `dir/ab/abcdef...`. Each file holds the full key on its
/// first line, so a hash collision reads as a miss.
#[derive(Clone, Debug)]
pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn new(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(DiskCache { dir })
    }

    /// `--cache` wins over the environment; with neither, caching is off.
    pub fn from_options(flag: Option<&Path>) -> std::io::Result<Option<Self>> {
        let dir = match flag {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
        };
        dir.map(DiskCache::new).transpose()
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        let hash: String = Sha256::digest(key.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        self.dir.join(&hash[..2]).join(&hash)
    }

    fn escape(key: &str) -> String {
        key.replace('\\', "\\\\").replace('\n', "\\n")
    }
}

impl GroebnerCache for DiskCache {
    fn get(&self, key: &str) -> Option<String> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let (stored, value) = text.split_once('\n')?;
        (stored == Self::escape(key)).then(|| value.to_string())
    }

    fn put(&self, key: &str, value: &str) {
        let path = self.path(key);
        let Some(parent) = path.parent() else { return };
        if fs::create_dir_all(parent).is_err() {
            return;
        }
        // Write then rename so concurrent readers never see a partial entry.
        let tmp = parent.join(format!(
            ".tmp-{}-{:?}",
            std::process::id(),
            std::thread::current().id()
        ));
        let ok = fs::File::create(&tmp).and_then(|mut f| {
            f.write_all(Self::escape(key).as_bytes())?;
            f.write_all(b"\n")?;
            f.write_all(value.as_bytes())
        });
        if ok.is_ok() {
            let _ = fs::rename(&tmp, &path);
        } else {
            let _ = fs::remove_file(&tmp);
        }
    }
}
