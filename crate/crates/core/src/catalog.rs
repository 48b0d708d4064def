//! On-disk catalog: one `<id>.json` design file per entry plus `index.json`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::satisfies_pg_criterion;
use crate::blockset::{validate_symmetric_design, Design};
use crate::io::{design_from_json, design_to_json, IoError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    /// Hex sha256 of the canonical design JSON.
    pub id: String,
    /// `(v, block_size, lambda)`.
    pub parameters: (usize, usize, usize),
    pub tags: BTreeSet<String>,
    pub provenance: String,
}

pub fn design_id(design: &Design) -> String {
    hex::encode(Sha256::digest(design_to_json(design).as_bytes()))
}

pub struct Catalog {
    root: PathBuf,
}

impl Catalog {
    /// Opens (creating if needed) the catalog directory.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, IoError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|source| IoError::Read {
            path: root.display().to_string(),
            source,
        })?;
        Ok(Catalog { root })
    }

    fn index_path(&self) -> PathBuf {
        self.root.join("index.json")
    }

    pub fn design_path(&self, id: &str) -> PathBuf {
        self.root.join(format!("{id}.json"))
    }

    pub fn list(&self) -> Result<Vec<CatalogEntry>, IoError> {
        let path = self.index_path();
        if !path.exists() {
            return Ok(Vec::new());
        }
        let text = read(&path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn load(&self, id: &str) -> Result<Design, IoError> {
        design_from_json(&read(&self.design_path(id))?)
    }

    /// Adds a design, or merges tags into the existing entry with the same id.
    ///
    /// The design must be a valid symmetric design. A `pg` or `non-pg` tag is
    /// added automatically when the parameters are in the criterion's domain.
    pub fn add(&self, design: &Design, tags: &[String], provenance: &str) -> Result<CatalogEntry, IoError> {
        let report = validate_symmetric_design(design).map_err(crate::error::DesignError::from)?;
        let id = design_id(design);
        let mut tags: BTreeSet<String> = tags.iter().cloned().collect();
        if report.class_rank().is_some() {
            let pg = satisfies_pg_criterion(design)?;
            tags.insert(if pg { "pg" } else { "non-pg" }.to_string());
        }

        let mut entries = self.list()?;
        let entry = match entries.iter_mut().find(|e| e.id == id) {
            Some(e) => {
                e.tags.extend(tags);
                e.clone()
            }
            None => {
                let e = CatalogEntry {
                    id: id.clone(),
                    parameters: (report.v, report.block_size, report.lambda),
                    tags,
                    provenance: provenance.to_string(),
                };
                entries.push(e.clone());
                entries.sort_by(|a, b| a.id.cmp(&b.id));
                e
            }
        };
        write(&self.design_path(&id), &(design_to_json(design) + "\n"))?;
        let index = serde_json::to_string_pretty(&entries).expect("serializable");
        write(&self.index_path(), &(index + "\n"))?;
        Ok(entry)
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockset::testing::d7;
    use crate::geometry::pg_hyperplane_complement_design as pg;

    #[test]
    fn id_is_stable_under_reserialization() {
        let d = d7();
        let shuffled = design_from_json(
            r#"{"v":7,"blocks":[[6,5,4,3],[1,2,3,6],[0,1,3,4],[0,1,5,6],[0,2,3,5],[0,2,4,6],[1,2,4,5]]}"#,
        )
        .unwrap();
        assert_eq!(design_id(&d), design_id(&shuffled));
    }

    #[test]
    fn add_list_and_merge() {
        let dir = tempfile::tempdir().unwrap();
        let cat = Catalog::open(dir.path().join("cat")).unwrap();
        assert!(cat.list().unwrap().is_empty());
        let e = cat.add(&pg(4).unwrap(), &["sum".into()], "construct pg 4").unwrap();
        assert_eq!(e.parameters, (15, 8, 4));
        assert!(e.tags.contains("pg") && e.tags.contains("sum"));
        let e2 = cat
            .add(&pg(4).unwrap(), &["pyramidal-verified".into()], "again")
            .unwrap();
        assert_eq!(e2.provenance, "construct pg 4");
        assert_eq!(e2.tags.len(), 3);
        cat.add(&d7(), &[], "d7").unwrap();
        let all = cat.list().unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(cat.load(&e.id).unwrap(), pg(4).unwrap());
    }

    #[test]
    fn rejects_invalid_design() {
        let dir = tempfile::tempdir().unwrap();
        let cat = Catalog::open(dir.path()).unwrap();
        let bad = Design::from_point_lists(3, [vec![0, 1], vec![0, 2]]).unwrap();
        assert!(cat.add(&bad, &[], "x").is_err());
    }
}
