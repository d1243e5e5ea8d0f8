//! Per-step cone cache for filtration runs.
//!
//! An entry is keyed by the format version, `n`, the mode, the working
//! coordinates and the exact generator prefix (labels and vectors). The key
//! is stored inside the entry and rechecked on load together with the cone
//! itself; anything that does not match is treated as a miss.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use nefcone::engine::{Candidate, Filtration, Setup};

use crate::error::{CliError, CliResult};
use crate::files::{self, ConeFile, StepFile, VERSION};

pub const ENV_CACHE_DIR: &str = "NEFCONE_CACHE_DIR";

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Entry {
    format: String,
    version: u32,
    key: String,
    n: usize,
    mode: String,
    prefix: Vec<String>,
    records: Vec<StepFile>,
    cone: ConeFile,
}

const FORMAT: &str = "nefcone-cache";

pub struct Cache {
    dir: PathBuf,
}

/// Hash of everything a cached step depends on.
pub fn key(setup: &Setup, prefix: &[Candidate]) -> String {
    let mut h = Sha256::new();
    h.update(format!("{FORMAT} v{VERSION}\nn={}\nmode={}\n", setup.n, setup.mode.as_str()));
    h.update(format!("coordinates={}\n", setup.ambient.labels().join(";")));
    for c in prefix {
        let v: Vec<String> = c.vector.iter().map(i64::to_string).collect();
        h.update(format!("{}:{}\n", c.label, v.join(",")));
    }
    hex::encode(h.finalize())
}

impl Cache {
    /// `--cache` wins over the environment; neither means no caching.
    pub fn open(flag: Option<&Path>) -> CliResult<Option<Cache>> {
        let dir = match flag {
            Some(d) => d.to_path_buf(),
            None => match std::env::var_os(ENV_CACHE_DIR) {
                Some(d) if !d.is_empty() => PathBuf::from(d),
                _ => return Ok(None),
            },
        };
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Some(Cache { dir }))
    }

    fn path(&self, setup: &Setup, step: usize, key: &str) -> PathBuf {
        self.dir
            .join(format!("n{}-{}-{:03}-{}.json", setup.n, setup.mode.as_str(), step, &key[..16]))
    }

    /// The cached filtration after `prefix`, if a valid entry exists.
    pub fn load(&self, setup: &Arc<Setup>, prefix: &[Candidate]) -> Option<Filtration> {
        let key = key(setup, prefix);
        let path = self.path(setup, prefix.len(), &key);
        let entry: Entry = files::read_json(&path).ok()?;
        let labels: Vec<String> = prefix.iter().map(|c| c.label.clone()).collect();
        if entry.format != FORMAT
            || entry.version != VERSION
            || entry.key != key
            || entry.n != setup.n
            || entry.mode != setup.mode.as_str()
            || entry.prefix != labels
            || entry.records.len() != prefix.len() + 1
        {
            return None;
        }
        let cone = entry.cone.to_cone_in(setup.ambient.clone()).ok()?;
        cone.generators()?;
        let records = entry
            .records
            .iter()
            .map(StepFile::to_record)
            .collect::<CliResult<Vec<_>>>()
            .ok()?;
        let same_generators = records
            .iter()
            .skip(1)
            .zip(&labels)
            .all(|(r, l)| r.generator.as_deref() == Some(l.as_str()));
        if !same_generators {
            return None;
        }
        Filtration::resume(setup.clone(), cone, records).ok()
    }

    pub fn store(&self, setup: &Setup, prefix: &[Candidate], f: &Filtration) -> CliResult<()> {
        let key = key(setup, prefix);
        let entry = Entry {
            format: FORMAT.into(),
            version: VERSION,
            key: key.clone(),
            n: setup.n,
            mode: setup.mode.as_str().into(),
            prefix: prefix.iter().map(|c| c.label.clone()).collect(),
            records: f.records().iter().map(StepFile::from_record).collect(),
            cone: ConeFile::from_cone(f.cone(), true),
        };
        let path = self.path(setup, prefix.len(), &key);
        // Write then rename, so an interrupted run never leaves half a file.
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, files::to_text(&entry)).map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))
    }
}
