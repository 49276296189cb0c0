//! Emitted files and the run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use isoprofile::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_sha256: String,
    pub versions: Versions,
    pub mode: String,
    pub seed: Option<u64>,
    pub threads: usize,
    pub wall_clock_seconds: f64,
    pub files: Vec<FileRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Versions {
    pub isoprofile: &'static str,
    pub cli: &'static str,
}

/// Collects every file written by one run.
pub struct OutputDir {
    root: PathBuf,
    command: String,
    config_hash: String,
    files: Vec<FileRecord>,
    started: Instant,
}

impl OutputDir {
    pub fn create(root: &Path, command: &str, config_hash: &str) -> Result<OutputDir> {
        std::fs::create_dir_all(root)?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            files: Vec::new(),
            started: Instant::now(),
        })
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        std::fs::write(self.root.join(name), bytes)?;
        self.files.push(FileRecord {
            path: name.to_string(),
            bytes: bytes.len(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    /// Header row, data rows, then `# key: value` metadata lines.
    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>], meta: &[(&str, String)]) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let csv_err = |e: csv::Error| isoprofile::Error::Io(std::io::Error::other(e));
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(row).map_err(csv_err)?;
        }
        let mut bytes = w.into_inner().map_err(|e| isoprofile::Error::Io(e.into_error()))?;
        let mut block = format!("# command: {}\n# config_sha256: {}\n", self.command, self.config_hash);
        for (k, v) in meta {
            block.push_str(&format!("# {k}: {v}\n"));
        }
        bytes.extend_from_slice(block.as_bytes());
        self.write_bytes(name, &bytes)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        self.write_bytes(name, text.as_bytes())
    }

    /// Writes `manifest.json` last; it is the only file with a timestamp-like
    /// field (the wall-clock duration).
    pub fn finish(self, mode: String, seed: Option<u64>) -> Result<RunManifest> {
        let manifest = RunManifest {
            command: self.command.clone(),
            config_sha256: self.config_hash.clone(),
            versions: Versions {
                isoprofile: isoprofile::VERSION,
                cli: env!("CARGO_PKG_VERSION"),
            },
            mode,
            seed,
            threads: rayon::current_num_threads(),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            files: self.files,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(self.root.join("manifest.json"), text)?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path(), "ball", "abc").unwrap();
        out.write_csv("x.csv", &["a", "b"], &[vec!["1".into(), "p,q".into()]], &[("group", "Z".into())])
            .unwrap();
        let text = std::fs::read_to_string(dir.path().join("x.csv")).unwrap();
        assert_eq!(text, "a,b\n1,\"p,q\"\n# command: ball\n# config_sha256: abc\n# group: Z\n");
        let m = out.finish("exact".into(), None).unwrap();
        assert_eq!(m.files.len(), 1);
        assert_eq!(m.files[0].sha256, hex::encode(Sha256::digest(text.as_bytes())));
        assert!(dir.path().join("manifest.json").exists());
    }
}
