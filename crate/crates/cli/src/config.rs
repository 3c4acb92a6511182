use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

pub const THREADS_ENV: &str = "EQDIST_THREADS";

/// Reads a JSON object from `path`; `threads` is split off, the rest is kept for the command.
pub fn load(path: Option<&Path>) -> anyhow::Result<(Option<usize>, Map<String, Value>)> {
    let Some(path) = path else {
        return Ok((None, Map::new()));
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let Value::Object(mut map) = value else {
        bail!("{} must hold a JSON object", path.display());
    };
    let threads = match map.remove("threads") {
        None | Some(Value::Null) => None,
        Some(v) => Some(serde_json::from_value(v).context("config field threads")?),
    };
    Ok((threads, map))
}

/// Deserializes the command part of a config file into the command's option record.
pub fn command_options<T: DeserializeOwned + Default>(map: Map<String, Value>) -> anyhow::Result<T> {
    if map.is_empty() {
        return Ok(T::default());
    }
    serde_json::from_value(Value::Object(map)).context("config file")
}

/// `EQDIST_THREADS`, then `--threads`, then the config file, then the available parallelism.
pub fn resolve_threads(flag: Option<usize>, file: Option<usize>) -> anyhow::Result<usize> {
    let env = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            Some(v.trim().parse::<usize>().with_context(|| format!("{THREADS_ENV}={v:?}"))?)
        }
        _ => None,
    };
    let threads = env
        .or(flag)
        .or(file)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        bail!("thread count must be positive");
    }
    Ok(threads)
}

/// Path of the JSON summary written next to a CSV output.
pub fn summary_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        out.with_extension("summary.json")
    } else {
        out.with_extension("json")
    }
}
