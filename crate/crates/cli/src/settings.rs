//! `key = value` configuration files. Command-line flags take precedence.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::Failure;

#[derive(Debug, Default)]
pub struct FileSettings {
    path: String,
    values: BTreeMap<String, String>,
}

impl FileSettings {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&path.display().to_string(), &text)
    }

    pub fn parse(path: &str, text: &str) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Failure::config(format!("{path}:{}: expected key = value", n + 1))
            })?;
            let key = key.trim().trim_start_matches("--").to_string();
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(Failure::config(format!(
                    "{path}:{}: duplicate key `{key}`",
                    n + 1
                )));
            }
        }
        Ok(Self {
            path: path.to_string(),
            values,
        })
    }

    /// The flag value if given, else the parsed file value.
    pub fn pick<T: FromStr>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        let from_file = self.values.remove(key);
        if flag.is_some() {
            return Ok(flag);
        }
        from_file
            .map(|v| {
                v.parse().map_err(|e| {
                    Failure::config(format!("{}: bad value for `{key}`: {e}", self.path))
                })
            })
            .transpose()
    }

    /// Repeatable flags; the file form is a comma-separated list.
    pub fn pick_list<T: FromStr>(&mut self, key: &str, flag: Vec<T>) -> Result<Vec<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        let from_file = self.values.remove(key);
        if !flag.is_empty() {
            return Ok(flag);
        }
        let Some(v) = from_file else {
            return Ok(flag);
        };
        v.split(',')
            .map(|item| {
                item.trim().parse().map_err(|e| {
                    Failure::config(format!("{}: bad value for `{key}`: {e}", self.path))
                })
            })
            .collect()
    }

    pub fn pick_switch(&mut self, key: &str, flag: bool) -> Result<bool, Failure> {
        Ok(self.pick(key, flag.then_some(true))?.unwrap_or(false))
    }

    /// Rejects keys the subcommand does not understand.
    pub fn finish(self) -> Result<(), Failure> {
        match self.values.keys().next() {
            None => Ok(()),
            Some(key) => Err(Failure::config(format!(
                "{}: key `{key}` does not apply to this command",
                self.path
            ))),
        }
    }
}
