use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{solve_weight, WeightError, WeightFunction};
use crate::wick::Ensemble;

/// Overrides the cache directory.
pub const CACHE_ENV_VAR: &str = "WICKINT_CACHE_DIR";

/// On-disk JSON cache of solved weights, one file per `(ensemble, kappa)`.
#[derive(Clone, Debug)]
pub struct WeightCache {
    dir: PathBuf,
}

impl WeightCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$WICKINT_CACHE_DIR`, else the platform cache directory plus `wickint`.
    pub fn from_env() -> Option<Self> {
        if let Some(dir) = std::env::var_os(CACHE_ENV_VAR) {
            return Some(Self::new(dir));
        }
        dirs::cache_dir().map(|d| Self::new(d.join("wickint")))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, ensemble: Ensemble, kappa: u32) -> PathBuf {
        self.dir.join(format!("{ensemble}-kappa{kappa}.json"))
    }

    /// A missing or unreadable entry is a miss.
    pub fn load(&self, ensemble: Ensemble, kappa: u32) -> Option<WeightFunction> {
        let text = fs::read_to_string(self.path_for(ensemble, kappa)).ok()?;
        let w: WeightFunction = serde_json::from_str(&text).ok()?;
        (w.ensemble() == ensemble && w.kappa() == kappa).then_some(w)
    }

    /// Writes through a temporary file and an atomic rename.
    pub fn store(&self, weight: &WeightFunction) -> Result<(), WeightError> {
        fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer_pretty(&mut tmp, weight)?;
        tmp.write_all(b"\n")?;
        tmp.persist(self.path_for(weight.ensemble(), weight.kappa()))
            .map_err(|e| WeightError::Io(e.error))?;
        Ok(())
    }

    pub fn load_or_solve(&self, ensemble: Ensemble, kappa: u32) -> Result<WeightFunction, WeightError> {
        if let Some(w) = self.load(ensemble, kappa) {
            return Ok(w);
        }
        let w = solve_weight(ensemble, kappa)?;
        // an unwritable cache only costs a recomputation next time
        let _ = self.store(&w);
        Ok(w)
    }
}
