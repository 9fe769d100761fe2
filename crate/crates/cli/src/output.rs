use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::failure::Failure;

/// Output directory; every artifact written through it gets a `.meta.json` sidecar.
pub struct Outputs {
    dir: PathBuf,
    config: RunConfig,
    config_sha: String,
    pub written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    file: &'a str,
    sha256: String,
    config_sha256: &'a str,
    config: &'a RunConfig,
    version: &'static str,
    seed: Option<u64>,
    subcommand: &'a str,
}

fn hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Outputs {
    pub fn create(config: &RunConfig) -> Result<Self, Failure> {
        let dir = config.out.clone().expect("resolved");
        fs::create_dir_all(&dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
        let config_sha = hex(&serde_json::to_vec(config).expect("config serializes"));
        Ok(Outputs { dir, config: config.clone(), config_sha, written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Record a file already written at `path(name)`.
    pub fn seal(&mut self, name: &str) -> Result<PathBuf, Failure> {
        let path = self.path(name);
        let bytes = fs::read(&path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        let meta = Sidecar {
            file: name,
            sha256: hex(&bytes),
            config_sha256: &self.config_sha,
            config: &self.config,
            version: env!("CARGO_PKG_VERSION"),
            seed: self.config.seed,
            subcommand: self.config.subcommand.as_deref().unwrap_or(""),
        };
        let meta_path = self.path(&format!("{name}.meta.json"));
        write(&meta_path, serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n")?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<PathBuf, Failure> {
        write(&self.path(name), body)?;
        self.seal(name)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, Failure> {
        self.text(name, &(serde_json::to_string_pretty(value).expect("value serializes") + "\n"))
    }

    /// Header plus rows, formatted with full round-trip precision.
    pub fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, Failure> {
        let mut body = header.join(",") + "\n";
        for r in rows {
            body += &r.join(",");
            body.push('\n');
        }
        self.text(name, &body)
    }

    /// A gnuplot script plotting columns of `csv` against its first column.
    pub fn gnuplot(&mut self, csv: &str, title: &str, columns: &[(usize, &str)], logscale_y: bool) -> Result<PathBuf, Failure> {
        let stem = csv.trim_end_matches(".csv");
        let mut s = format!("set datafile separator ','\nset terminal pngcairo size 900,600\nset output '{stem}.png'\nset title '{title}'\nset key autotitle columnhead\n");
        if logscale_y {
            s += "set logscale y\n";
        }
        let plots: Vec<String> = columns.iter().map(|(c, style)| format!("'{csv}' using 1:{c} with {style}")).collect();
        s += &format!("plot {}\n", plots.join(", "));
        self.text(&format!("{stem}.gp"), &s)
    }
}

fn write(path: &Path, body: impl AsRef<[u8]>) -> Result<(), Failure> {
    fs::write(path, body).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_hashes_content() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig { subcommand: Some("check".into()), out: Some(dir.path().to_path_buf()), ..RunConfig::default() };
        let mut out = Outputs::create(&cfg).unwrap();
        out.text("a.txt", "abc").unwrap();
        let meta: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("a.txt.meta.json")).unwrap()).unwrap();
        assert_eq!(meta["sha256"], "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(meta["subcommand"], "check");
    }
}
