//! Declarative config file (TOML) mirroring the CLI flags. Flags override
//! file values; the file supplies defaults for wide campaigns.

use std::path::Path;

#[derive(Debug, Default)]
pub struct ConfigFile {
    doc: Option<toml::Value>,
}

impl ConfigFile {
    pub fn empty() -> Self {
        ConfigFile { doc: None }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("config file {}: {e}", path.display()))?;
        let doc: toml::Value = text
            .parse()
            .map_err(|e| anyhow::anyhow!("config file {}: {e}", path.display()))?;
        Ok(ConfigFile { doc: Some(doc) })
    }

    fn get(&self, section: &str, key: &str) -> Option<&toml::Value> {
        self.doc.as_ref()?.get(section)?.get(key)
    }

    pub fn f64(&self, section: &str, key: &str) -> Option<f64> {
        self.get(section, key).and_then(|v| match v {
            toml::Value::Float(f) => Some(*f),
            toml::Value::Integer(i) => Some(*i as f64),
            _ => None,
        })
    }

    pub fn u64(&self, section: &str, key: &str) -> Option<u64> {
        self.get(section, key)
            .and_then(|v| v.as_integer())
            .and_then(|i| u64::try_from(i).ok())
    }

    pub fn i32(&self, section: &str, key: &str) -> Option<i32> {
        self.get(section, key)
            .and_then(|v| v.as_integer())
            .and_then(|i| i32::try_from(i).ok())
    }

    pub fn usize(&self, section: &str, key: &str) -> Option<usize> {
        self.get(section, key)
            .and_then(|v| v.as_integer())
            .and_then(|i| usize::try_from(i).ok())
    }

    pub fn string(&self, section: &str, key: &str) -> Option<String> {
        self.get(section, key)
            .and_then(|v| v.as_str())
            .map(|s| s.to_string())
    }

    pub fn f64_list(&self, section: &str, key: &str) -> Option<Vec<f64>> {
        self.get(section, key).and_then(|v| v.as_array()).map(|a| {
            a.iter()
                .filter_map(|v| match v {
                    toml::Value::Float(f) => Some(*f),
                    toml::Value::Integer(i) => Some(*i as f64),
                    _ => None,
                })
                .collect()
        })
    }

    pub fn i32_list(&self, section: &str, key: &str) -> Option<Vec<i32>> {
        self.get(section, key).and_then(|v| v.as_array()).map(|a| {
            a.iter()
                .filter_map(|v| v.as_integer())
                .filter_map(|i| i32::try_from(i).ok())
                .collect()
        })
    }
}

/// Seed resolution: explicit flag, then config `[run] seed`, then the
/// `PERCLAB_SEED` environment variable, then 1.
pub fn resolve_seed(flag: Option<u64>, config: &ConfigFile) -> anyhow::Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(s) = config.u64("run", "seed") {
        return Ok(s);
    }
    match std::env::var("PERCLAB_SEED") {
        Ok(text) => text
            .parse::<u64>()
            .map_err(|_| anyhow::anyhow!("PERCLAB_SEED must be an unsigned integer, got '{text}'")),
        Err(_) => Ok(1),
    }
}

/// Comma-separated list parser for `--angles` / `--radii` style flags.
pub fn parse_list<T: std::str::FromStr>(text: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| anyhow::anyhow!("cannot parse '{s}': {e}"))
        })
        .collect()
}
