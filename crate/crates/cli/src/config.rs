//! Flat `key = value` config files. Flags take precedence over file values,
//! which take precedence over built-in defaults.

use std::collections::HashMap;
use std::path::Path;

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let mut values = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "{}:{}: expected `key = value`",
                    path.display(),
                    lineno + 1
                ));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| format!("config key `{key}`: invalid value `{raw}`")),
        }
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, String> {
        self.parsed(key)
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, String> {
        self.parsed(key)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, String> {
        self.parsed(key)
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>, String> {
        self.parsed(key)
    }
}
