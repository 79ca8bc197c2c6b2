use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::Plan;

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Run record written next to the CSV outputs. Timestamps live here and
/// nowhere else, so the tables stay byte-identical across reruns.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub plan: &'a Plan,
    pub seed_root: u64,
    pub started: String,
    pub finished: String,
    pub files: Vec<FileDigest>,
    /// Digest over the concatenated per-file digests, in file order.
    pub digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes every `(name, body)` into `dir`, then `manifest.json`.
pub fn write_outputs(
    dir: &Path,
    command: &str,
    plan: &Plan,
    started: chrono::DateTime<chrono::Utc>,
    files: &[(String, String)],
) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut digests = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        digests.push(FileDigest {
            name: name.clone(),
            bytes: body.len(),
            sha256: sha256_hex(body.as_bytes()),
        });
    }
    let joined: String = digests
        .iter()
        .map(|d| format!("{}  {}\n", d.sha256, d.name))
        .collect();
    let manifest = RunManifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        plan,
        seed_root: plan.seed,
        started: started.to_rfc3339(),
        finished: chrono::Utc::now().to_rfc3339(),
        digest: sha256_hex(joined.as_bytes()),
        files: digests,
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
