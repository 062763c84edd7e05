//! Revisioned in-memory project store with write-through to disk.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use fqfd_core::project::{self, HoqProject};

use crate::error::ApiError;

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub revision: u64,
    pub project: Arc<HoqProject>,
}

#[derive(Debug, Default)]
pub struct Store {
    data_dir: Option<PathBuf>,
    projects: Mutex<HashMap<String, Snapshot>>,
}

/// Ids double as file stems, so they are kept filesystem-safe.
pub fn check_id(id: &str) -> Result<(), ApiError> {
    let ok =
        !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_');
    if ok {
        Ok(())
    } else {
        Err(ApiError::new("InvalidId", "ids are 1-64 characters from [A-Za-z0-9_-]").at("id"))
    }
}

impl Store {
    pub fn in_memory() -> Self {
        Store::default()
    }

    /// Opens a store backed by `dir`, loading every valid `<id>.json` in it.
    pub fn open(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        let mut projects = HashMap::new();
        for entry in std::fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().is_none_or(|e| e != "json") {
                continue;
            }
            let Some(id) = path.file_stem().and_then(|s| s.to_str()) else { continue };
            if check_id(id).is_err() {
                continue;
            }
            match project::load(&path) {
                Ok(p) => {
                    projects.insert(id.to_string(), Snapshot { revision: 1, project: Arc::new(p) });
                }
                Err(e) => tracing::warn!(path = %path.display(), error = %e, "skipping project file"),
            }
        }
        Ok(Store { data_dir: Some(dir), projects: Mutex::new(projects) })
    }

    pub fn data_dir(&self) -> Option<&Path> {
        self.data_dir.as_deref()
    }

    pub fn get(&self, id: &str) -> Result<Snapshot, ApiError> {
        self.projects.lock().expect("store lock").get(id).cloned().ok_or_else(|| ApiError::not_found(id))
    }

    /// Applies `edit` to the current document under the store lock.
    ///
    /// `expected` is the caller's revision (0 for "must not exist yet"). When
    /// `create` is false the project must already exist. An edit that leaves
    /// the document unchanged keeps the revision.
    pub fn update<F>(&self, id: &str, expected: Option<u64>, create: bool, edit: F) -> Result<Snapshot, ApiError>
    where
        F: FnOnce(Option<&HoqProject>) -> Result<HoqProject, ApiError>,
    {
        let mut map = self.projects.lock().expect("store lock");
        let current = map.get(id);
        if current.is_none() && !create {
            return Err(ApiError::not_found(id));
        }
        let revision = current.map_or(0, |s| s.revision);
        if let Some(want) = expected {
            if want != revision {
                return Err(ApiError::new(
                    "RevisionMismatch",
                    format!("expected revision {want}, current revision is {revision}"),
                ));
            }
        }
        let next = edit(current.map(|s| s.project.as_ref()))?;
        if let Some(s) = current {
            if *s.project == next {
                return Ok(s.clone());
            }
        }
        if let Some(dir) = &self.data_dir {
            project::save(&next, dir.join(format!("{id}.json")))?;
        }
        let snapshot = Snapshot { revision: revision + 1, project: Arc::new(next) };
        map.insert(id.to_string(), snapshot.clone());
        Ok(snapshot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fqfd_core::project::bundled_project;

    #[test]
    fn ids_are_restricted() {
        assert!(check_id("dryer_2-b").is_ok());
        for bad in ["", "../x", "a b", "x.json", &"a".repeat(65)] {
            assert!(check_id(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn revisions_advance_only_on_change() {
        let store = Store::in_memory();
        let p = bundled_project();
        let s1 = store.update("a", Some(0), true, |_| Ok(p.clone())).unwrap();
        assert_eq!(s1.revision, 1);
        let s2 = store.update("a", None, true, |_| Ok(p.clone())).unwrap();
        assert_eq!(s2.revision, 1);
        let err = store.update("a", Some(7), true, |_| Ok(p.clone())).unwrap_err();
        assert_eq!(err.code, "RevisionMismatch");
        assert_eq!(store.update("b", None, false, |_| Ok(p.clone())).unwrap_err().code, "NotFound");
    }

    #[test]
    fn disk_store_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        store.update("dryer", None, true, |_| Ok(bundled_project())).unwrap();
        std::fs::write(dir.path().join("broken.json"), "{").unwrap();
        let again = Store::open(dir.path()).unwrap();
        assert_eq!(*again.get("dryer").unwrap().project, bundled_project());
        assert_eq!(again.get("broken").unwrap_err().code, "NotFound");
    }
}
