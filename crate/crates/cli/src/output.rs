use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;
use crate::manifest::RunManifest;

#[derive(Serialize)]
struct Wrapped<'a, T: Serialize> {
    manifest: &'a RunManifest,
    result: &'a T,
}

/// JSON with the manifest embedded.
pub fn emit_json<T: Serialize>(out: Option<&Path>, manifest: &RunManifest, result: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(&Wrapped { manifest, result }).expect("serializable");
    text.push('\n');
    write_text(out, &text)
}

/// CSV with a `.manifest.json` sidecar, or the manifest on stderr when the
/// table goes to stdout.
pub fn emit_csv(out: Option<&Path>, manifest: &RunManifest, header: &str, rows: &[String]) -> Result<(), CliError> {
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    let manifest_json = serde_json::to_string_pretty(manifest).expect("serializable") + "\n";
    match out {
        Some(path) => {
            write_text(Some(path), &text)?;
            write_text(Some(&sidecar(path)), &manifest_json)
        }
        None => {
            eprint!("{manifest_json}");
            write_text(None, &text)
        }
    }
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes()).and_then(|_| lock.flush()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

/// `"0.1, 0.2,0.5"` into numbers.
pub fn parse_list(name: &str, text: &str) -> Result<Vec<f64>, CliError> {
    let values: Vec<f64> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| CliError::Usage(format!("--{name}: cannot parse `{s}`"))))
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err(CliError::Usage(format!("--{name}: empty list")));
    }
    Ok(values)
}
