//! Output plumbing: every artifact opens with a metadata header carrying the
//! tool version and an echo of the effective configuration, and goes either
//! to a file or to stdout. Nothing here depends on wall-clock time, so runs
//! with identical flags and seed are byte-identical.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const TOOL_NAME: &str = "monogeom";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Key-value metadata echoed into every artifact.
#[derive(Debug, Clone)]
pub struct Meta {
    entries: Vec<(String, String)>,
}

impl Meta {
    pub fn new(subcommand: &str) -> Self {
        Self {
            entries: vec![
                ("tool".into(), format!("{TOOL_NAME} {TOOL_VERSION}")),
                ("subcommand".into(), subcommand.into()),
            ],
        }
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    /// `# key=value` comment lines for CSV artifacts.
    pub fn csv_header(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out
    }

    /// Ordered JSON object for JSON artifacts.
    pub fn json_value(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (k, v) in &self.entries {
            map.insert(k.clone(), serde_json::Value::String(v.clone()));
        }
        serde_json::Value::Object(map)
    }
}

/// Write to the path, or to stdout when the path is `None` or `-`.
pub fn write_artifact(path: Option<&Path>, content: &str) -> Result<(), String> {
    match path {
        Some(p) if p != Path::new("-") => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)
                        .map_err(|e| format!("cannot create {}: {e}", parent.display()))?;
                }
            }
            fs::write(p, content).map_err(|e| format!("cannot write {}: {e}", p.display()))
        }
        _ => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| format!("cannot write to stdout: {e}"))
        }
    }
}

/// Resolve a directory flag against `MONOGEOM_KITTI_ROOT` when absent.
pub fn dir_or_kitti_default(
    flag: Option<PathBuf>,
    flag_name: &str,
    subdir: &str,
) -> Result<PathBuf, String> {
    if let Some(dir) = flag {
        return Ok(dir);
    }
    match std::env::var_os("MONOGEOM_KITTI_ROOT") {
        Some(root) => Ok(PathBuf::from(root).join(subdir)),
        None => Err(format!(
            "--{flag_name} not given and MONOGEOM_KITTI_ROOT is unset"
        )),
    }
}

/// Frame ids: the `--ids` file if given (one id per line), otherwise the
/// sorted `*.txt` stems of the directory.
pub fn resolve_ids(ids_file: Option<&Path>, fallback_dir: &Path) -> Result<Vec<String>, String> {
    if let Some(path) = ids_file {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read ids file {}: {e}", path.display()))?;
        let ids: Vec<String> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        if ids.is_empty() {
            return Err(format!("ids file {} is empty", path.display()));
        }
        return Ok(ids);
    }
    let mut ids = Vec::new();
    let entries = fs::read_dir(fallback_dir)
        .map_err(|e| format!("cannot list {}: {e}", fallback_dir.display()))?;
    for entry in entries {
        let entry = entry.map_err(|e| format!("cannot list {}: {e}", fallback_dir.display()))?;
        if let Some(name) = entry.file_name().to_str() {
            if let Some(stem) = name.strip_suffix(".txt") {
                ids.push(stem.to_string());
            }
        }
    }
    if ids.is_empty() {
        return Err(format!(
            "no .txt files found in {}",
            fallback_dir.display()
        ));
    }
    ids.sort();
    Ok(ids)
}
