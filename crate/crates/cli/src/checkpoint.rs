//! Versioned checkpoint record for resumable range verification.
//!
//! A checkpoint stores the largest bound `f` such that every odd integer
//! in `[1, f]` has been verified, together with the policy that produced
//! it. The file is a small text record:
//!
//! ```text
//! collatz-lab checkpoint v1
//! frontier=1000000
//! policy=drop
//! created_at=2026-01-01T00:00:00Z
//! ```
//!
//! Writes go to a temporary file in the same directory followed by a
//! rename, so an interrupted write can never corrupt the previous record.
//! Unknown future versions are refused, not guessed at.

use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::{SecondsFormat, Utc};
use collatz_lab::lab::ScanPolicy;

pub const FORMAT_VERSION: u32 = 1;
const HEADER: &str = "collatz-lab checkpoint v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    /// Largest contiguously verified bound, anchored at 1.
    pub frontier: u64,
    pub policy: ScanPolicy,
    /// RFC 3339 timestamp of the write; informational only.
    pub created_at: String,
    pub format_version: u32,
}

impl Checkpoint {
    pub fn new(frontier: u64, policy: ScanPolicy) -> Self {
        Checkpoint {
            frontier,
            policy,
            created_at: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
            format_version: FORMAT_VERSION,
        }
    }

    pub fn load(path: &Path) -> Result<Checkpoint, String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read checkpoint {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("checkpoint {}: {e}", path.display()))
    }

    fn parse(text: &str) -> Result<Checkpoint, String> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if header != HEADER {
            if let Some(version) = header.strip_prefix("collatz-lab checkpoint v") {
                return Err(format!(
                    "format version {version} is not supported (this build reads v{FORMAT_VERSION})"
                ));
            }
            return Err("not a collatz-lab checkpoint".to_string());
        }
        let mut frontier = None;
        let mut policy = None;
        let mut created_at = None;
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("malformed line {line:?}"))?;
            match key {
                "frontier" => {
                    frontier =
                        Some(value.parse::<u64>().map_err(|e| format!("bad frontier: {e}"))?);
                }
                "policy" => {
                    policy = Some(value.parse::<ScanPolicy>()?);
                }
                "created_at" => created_at = Some(value.to_string()),
                _ => return Err(format!("unknown key {key:?}")),
            }
        }
        Ok(Checkpoint {
            frontier: frontier.ok_or("missing frontier")?,
            policy: policy.ok_or("missing policy")?,
            created_at: created_at.ok_or("missing created_at")?,
            format_version: FORMAT_VERSION,
        })
    }

    fn render(&self) -> String {
        format!(
            "{HEADER}\nfrontier={}\npolicy={}\ncreated_at={}\n",
            self.frontier, self.policy, self.created_at
        )
    }

    /// Write-new-then-rename, so the previous checkpoint stays intact until
    /// the replacement is fully on disk.
    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let mut tmp_name = path.as_os_str().to_owned();
        tmp_name.push(".tmp");
        let tmp = std::path::PathBuf::from(tmp_name);
        {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(self.render().as_bytes())?;
            file.sync_all()?;
        }
        fs::rename(&tmp, path)
    }
}
