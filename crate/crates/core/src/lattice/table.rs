use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use sha2::{Digest, Sha256};

use super::{canonical, resolvent_sum, FermiRadius, LuneSum, Momentum};

const HEADER: &str = "alpha,kx,ky,kz,kF_squared,value,count";

/// Identifies a table entry up to the lattice symmetries of `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LuneKey {
    alpha_bits: u64,
    k: Momentum,
    kf: (bool, u64),
}

impl LuneKey {
    pub fn new(alpha: f64, k: Momentum, radius: FermiRadius) -> Self {
        LuneKey { alpha_bits: alpha.to_bits(), k: canonical(k), kf: radius.key_bits() }
    }
}

/// Memoized lune sums `D_α(k, k_F)`, optionally persisted as one CSV file per entry.
///
/// Only canonical momenta (sorted absolute values) are stored. Reads run
/// concurrently; a miss computes the value outside the lock and inserts it
/// under exclusive access.
#[derive(Debug, Default)]
pub struct LuneSumTable {
    entries: RwLock<HashMap<LuneKey, LuneSum>>,
    cache_dir: Option<PathBuf>,
}

impl LuneSumTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// A table backed by `dir`, which is created if missing.
    pub fn with_cache_dir(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(LuneSumTable { entries: RwLock::default(), cache_dir: Some(dir) })
    }

    pub fn cache_dir(&self) -> Option<&Path> {
        self.cache_dir.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `D_α(k, k_F)`, computed once per canonical key.
    pub fn get(&self, alpha: f64, k: Momentum, radius: FermiRadius) -> LuneSum {
        let key = LuneKey::new(alpha, k, radius);
        if let Some(hit) = self.entries.read().unwrap().get(&key) {
            return *hit;
        }
        let canon = canonical(k);
        let file = self.cache_dir.as_ref().map(|d| d.join(cache_file_name(alpha, canon, radius)));
        let value = file
            .as_deref()
            .and_then(|f| read_entry(f, alpha, canon, radius))
            .unwrap_or_else(|| {
                let fresh = resolvent_sum(alpha, canon, radius);
                if let Some(f) = &file {
                    // a failed write only costs a recomputation later
                    let _ = write_entry(f, alpha, canon, radius, fresh);
                }
                fresh
            });
        *self.entries.write().unwrap().entry(key).or_insert(value)
    }

    pub fn value(&self, alpha: f64, k: Momentum, radius: FermiRadius) -> f64 {
        self.get(alpha, k, radius).value
    }
}

fn cache_file_name(alpha: f64, k: Momentum, radius: FermiRadius) -> String {
    let id = format!("alpha={alpha:?};k={},{},{};kF_squared={}", k[0], k[1], k[2], radius.label());
    let digest = Sha256::digest(id.as_bytes());
    format!("{}.csv", hex::encode(&digest[..16]))
}

fn row(alpha: f64, k: Momentum, radius: FermiRadius) -> String {
    format!("{alpha:?},{},{},{},{}", k[0], k[1], k[2], radius.label())
}

fn write_entry(path: &Path, alpha: f64, k: Momentum, radius: FermiRadius, sum: LuneSum) -> std::io::Result<()> {
    let body = format!("{HEADER}\n{},{:?},{}\n", row(alpha, k, radius), sum.value, sum.count);
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, body)?;
    fs::rename(tmp, path)
}

fn read_entry(path: &Path, alpha: f64, k: Momentum, radius: FermiRadius) -> Option<LuneSum> {
    let text = fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    if lines.next()? != HEADER {
        return None;
    }
    let line = lines.next()?;
    let prefix = row(alpha, k, radius);
    let rest = line.strip_prefix(&prefix)?.strip_prefix(',')?;
    let (value, count) = rest.split_once(',')?;
    Some(LuneSum { value: value.parse().ok()?, count: count.parse().ok()? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_momenta_share_one_entry() {
        let table = LuneSumTable::new();
        let r = FermiRadius::from_kf2(10).unwrap();
        let a = table.get(1.0, [2, -1, 0], r);
        let b = table.get(1.0, [0, 1, -2], r);
        assert_eq!(a, b);
        assert_eq!(table.len(), 1);
        assert_eq!(a, resolvent_sum(1.0, [2, -1, 0], r));
    }

    #[test]
    fn disk_cache_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let r = FermiRadius::from_kf2(50).unwrap();
        let cold = LuneSumTable::with_cache_dir(dir.path()).unwrap().get(2.0, [1, 1, 0], r);
        let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(files.len(), 1);
        let warm = LuneSumTable::with_cache_dir(dir.path()).unwrap().get(2.0, [1, 1, 0], r);
        assert_eq!(cold.value.to_bits(), warm.value.to_bits());
        assert_eq!(cold.count, warm.count);
    }

    #[test]
    fn corrupted_cache_file_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let r = FermiRadius::from_kf2(5).unwrap();
        let name = cache_file_name(1.0, [0, 0, 1], r);
        fs::write(dir.path().join(name), "garbage").unwrap();
        let table = LuneSumTable::with_cache_dir(dir.path()).unwrap();
        assert_eq!(table.get(1.0, [1, 0, 0], r), resolvent_sum(1.0, [1, 0, 0], r));
    }
}
