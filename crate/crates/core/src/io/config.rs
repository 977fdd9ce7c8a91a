use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A command and its parameters as flat `key=value` lines.
///
/// The first line names the command (`command=...`); every other key is a
/// parameter. Keys are written sorted so equal configs serialize equally.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    pub command: String,
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(command: impl Into<String>) -> Self {
        ExperimentConfig {
            command: command.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.params.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Params(format!("cannot parse {key}={v}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command={}\n", self.command);
        for (k, v) in &self.params {
            writeln!(out, "{k}={v}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: k + 1,
                msg: "expected key=value".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key == "command" {
                cfg.command = value.to_string();
            } else {
                cfg.params.insert(key.to_string(), value.to_string());
            }
        }
        if cfg.command.is_empty() {
            return Err(Error::Parse {
                line: 1,
                msg: "missing command=".into(),
            });
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::new("simulate");
        c.set("seed", 7).set("birth_rate", 1.5).set("lifetime", "exp:2");
        let text = c.to_text();
        assert_eq!(text, "command=simulate\nbirth_rate=1.5\nlifetime=exp:2\nseed=7\n");
        let back = ExperimentConfig::from_text(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.get::<u64>("seed").unwrap(), Some(7));
        assert_eq!(back.get_or::<f64>("missing", 2.0).unwrap(), 2.0);
        assert!(back.get::<u64>("lifetime").is_err());
    }

    #[test]
    fn rejects_garbage() {
        assert!(ExperimentConfig::from_text("seed=1\n").is_err());
        assert!(matches!(
            ExperimentConfig::from_text("command=x\nnonsense\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
