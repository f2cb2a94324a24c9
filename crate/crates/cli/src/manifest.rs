use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{CommandFactory, Parser};
use serde::{Deserialize, Serialize};

use crate::args::{Cli, Command};
use crate::commands::{execute, sha256_hex, InputRecord, Output};

pub const STDOUT_FILE: &str = "stdout.txt";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub argv: Vec<String>,
    pub inputs: Vec<InputRecord>,
    pub seed: Option<u64>,
    pub outputs: Vec<OutputRecord>,
}

fn command_name(argv: &[String]) -> String {
    let mut words = Vec::new();
    if let Ok(mut m) = Cli::command().try_get_matches_from(argv) {
        while let Some((name, sub)) = m.remove_subcommand() {
            words.push(name);
            m = sub;
        }
    }
    words.join(" ")
}

fn output_records(out: &Output) -> Vec<OutputRecord> {
    let mut records = vec![OutputRecord {
        file: STDOUT_FILE.into(),
        sha256: sha256_hex(out.stdout.as_bytes()),
    }];
    records.extend(out.files.iter().map(|(name, bytes)| OutputRecord {
        file: name.clone(),
        sha256: sha256_hex(bytes),
    }));
    records
}

pub fn write_run(dir: &Path, argv: &[String], out: &Output) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let write = |name: &str, bytes: &[u8]| {
        let path = dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display()))
    };
    write(STDOUT_FILE, out.stdout.as_bytes())?;
    for (name, bytes) in &out.files {
        write(name, bytes)?;
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").into(),
        command: command_name(argv),
        argv: argv.to_vec(),
        inputs: out.inputs.clone(),
        seed: out.seed,
        outputs: output_records(out),
    };
    write(MANIFEST_FILE, serde_json::to_string_pretty(&manifest)?.as_bytes())
}

/// Checks the recorded inputs, re-runs the command in memory and compares
/// every output digest.
pub fn replay(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let manifest: Manifest =
        serde_json::from_str(&text).with_context(|| format!("{} is not a manifest", path.display()))?;

    for input in &manifest.inputs {
        if input.sha256 == "builtin" {
            continue;
        }
        let bytes = fs::read(&input.source)
            .with_context(|| format!("recorded input {} is missing", input.source))?;
        if sha256_hex(&bytes) != input.sha256 {
            bail!("input {} changed since the run was recorded", input.source);
        }
    }

    let cli = Cli::try_parse_from(&manifest.argv).context("recorded argv no longer parses")?;
    if matches!(cli.command, Command::Replay { .. }) {
        bail!("a replay manifest cannot itself be replayed");
    }
    let out = execute(&cli.command)?;
    let fresh = output_records(&out);

    let mut mismatches = Vec::new();
    for rec in &manifest.outputs {
        match fresh.iter().find(|f| f.file == rec.file) {
            Some(f) if f.sha256 == rec.sha256 => {}
            Some(_) => mismatches.push(format!("{} differs", rec.file)),
            None => mismatches.push(format!("{} was not produced", rec.file)),
        }
    }
    for f in &fresh {
        if !manifest.outputs.iter().any(|r| r.file == f.file) {
            mismatches.push(format!("{} is new", f.file));
        }
    }
    if !mismatches.is_empty() {
        bail!("replay mismatch: {}", mismatches.join("; "));
    }
    let mut summary = String::new();
    writeln!(
        summary,
        "replayed `{}`: {} outputs identical",
        manifest.command,
        manifest.outputs.len()
    )?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_name_skips_global_flags() {
        let argv: Vec<String> = ["pfacap", "--threads", "2", "capacity", "stability", "schedule", "--val", "0.5", "--delta", "0.1", "--n-list", "3,4"]
            .map(String::from)
            .to_vec();
        assert_eq!(command_name(&argv), "capacity stability schedule");
    }
}
