//! Restart files for long counting runs.
//!
//! A checkpoint is a single JSON object followed by a newline:
//!
//! ```text
//! {"format":"multiplets-checkpoint","version":1,"pattern":[0,2],"limit":10000000000,
//!  "segment_length":10000000,"covered_through":420000000,"segments_completed":42,
//!  "partial_count":1904163,"checksum":"<64 hex digits>"}
//! ```
//!
//! `covered_through` is the watermark: every constellation whose smallest
//! element is at most this value is included in `partial_count`, and none
//! beyond it. `checksum` is the lowercase hex SHA-256 of the canonical
//! payload produced by [`Checkpoint::canonical_payload`], one `key=value`
//! line per field in the order listed above (pattern written as `0,2,6`).
//! Files with unknown fields, another format tag, another version or a
//! checksum mismatch are refused.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::patterns::OffsetPattern;

pub const CHECKPOINT_FORMAT: &str = "multiplets-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub pattern: OffsetPattern,
    pub limit: u64,
    pub segment_length: u64,
    pub covered_through: u64,
    pub segments_completed: u64,
    pub partial_count: u64,
    pub checksum: String,
}

impl Checkpoint {
    pub fn new(
        pattern: OffsetPattern,
        limit: u64,
        segment_length: u64,
        covered_through: u64,
        segments_completed: u64,
        partial_count: u64,
    ) -> Self {
        let mut cp = Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            pattern,
            limit,
            segment_length,
            covered_through,
            segments_completed,
            partial_count,
            checksum: String::new(),
        };
        cp.checksum = cp.compute_checksum();
        cp
    }

    pub fn canonical_payload(&self) -> String {
        format!(
            "format={}\nversion={}\npattern={}\nlimit={}\nsegment_length={}\n\
             covered_through={}\nsegments_completed={}\npartial_count={}\n",
            self.format,
            self.version,
            self.pattern,
            self.limit,
            self.segment_length,
            self.covered_through,
            self.segments_completed,
            self.partial_count,
        )
    }

    fn compute_checksum(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_payload().as_bytes()))
    }

    /// Writes via a temporary sibling and a rename, so a crash mid-write
    /// leaves the previous checkpoint intact.
    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut line = serde_json::to_string(self).expect("checkpoint serialises");
        line.push('\n');
        let tmp = path.with_extension("tmp");
        let mut file = fs::File::create(&tmp).map_err(io)?;
        file.write_all(line.as_bytes()).map_err(io)?;
        file.sync_all().map_err(io)?;
        fs::rename(&tmp, path).map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let integrity = |reason: String| Error::Integrity {
            path: path.to_path_buf(),
            reason,
        };
        let cp: Checkpoint = serde_json::from_str(text.trim_end())
            .map_err(|e| integrity(format!("unreadable: {e}")))?;
        if cp.format != CHECKPOINT_FORMAT {
            return Err(integrity(format!("unknown format tag {:?}", cp.format)));
        }
        if cp.version != CHECKPOINT_VERSION {
            return Err(integrity(format!("unsupported version {}", cp.version)));
        }
        if cp.checksum != cp.compute_checksum() {
            return Err(integrity("checksum mismatch".into()));
        }
        if cp.covered_through > cp.limit {
            return Err(integrity(format!(
                "watermark {} lies beyond limit {}",
                cp.covered_through, cp.limit
            )));
        }
        Ok(cp)
    }
}
