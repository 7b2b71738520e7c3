//! `--config` files: one `key=value` per line, keys named like the long flags.
//!
//! A key that was not given on the command line is appended as `--key value`;
//! `key=true` appends a bare switch and `key=false` is skipped.

use std::path::Path;

use anyhow::{anyhow, Context, Result};

/// The value of `--config` in `argv`, if present.
pub fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--" {
            break;
        }
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key=value", i + 1))?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(anyhow!("line {}: empty key", i + 1));
        }
        entries.push((key.to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

fn given(argv: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefix = format!("--{key}=");
    argv.iter()
        .skip(1)
        .take_while(|a| *a != "--")
        .any(|a| *a == flag || a.starts_with(&prefix))
}

/// `argv` with the config entries that the command line did not set appended.
pub fn merge(argv: &[String], path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let entries = parse(&text).with_context(|| format!("parsing config {}", path.display()))?;
    let mut out = argv.to_vec();
    for (key, value) in entries {
        if key == "config" || given(argv, &key) {
            continue;
        }
        match value.as_str() {
            "false" => {}
            "true" => out.push(format!("--{key}")),
            _ => {
                out.push(format!("--{key}"));
                out.extend(value.split_whitespace().map(str::to_string));
            }
        }
    }
    Ok(out)
}
