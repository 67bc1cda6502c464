//! Flat `key = value` configuration with `[section]` headers.
//!
//! Keys before the first header belong to `[common]`. A command reads its own
//! section first and falls back to `[common]`. Unknown keys in a command's
//! section are an error, so typos do not silently fall back to defaults.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

pub const SECTIONS: [&str; 8] = [
    "common", "tf", "eta", "minimize", "decompose", "gamma", "recovery", "symmetry",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Default)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = "common".to_string();
        for (no, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| ConfigError(format!("line {}: {msg}", no + 1));
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| at(format!("unterminated section header {line:?}")))?
                    .trim()
                    .to_ascii_lowercase();
                if !SECTIONS.contains(&name.as_str()) {
                    return Err(at(format!("unknown section [{name}]")));
                }
                current = name;
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected key = value, got {line:?}")))?;
            let k = k.trim().to_ascii_lowercase();
            if k.is_empty() {
                return Err(at("empty key".into()));
            }
            let sec = sections.entry(current.clone()).or_default();
            if sec.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(at(format!("duplicate key {k:?} in [{current}]")));
            }
        }
        Ok(Self { sections })
    }

    /// View for one command.
    pub fn section(&self, name: &str) -> Section<'_> {
        Section {
            name: name.to_string(),
            own: self.sections.get(name),
            common: self.sections.get("common"),
            used: RefCell::new(BTreeSet::new()),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    let t = line.trim_start();
    if t.starts_with('#') || t.starts_with(';') {
        return "";
    }
    match line.find(" #") {
        Some(i) => &line[..i],
        None => line,
    }
}

pub struct Section<'a> {
    name: String,
    own: Option<&'a BTreeMap<String, String>>,
    common: Option<&'a BTreeMap<String, String>>,
    used: RefCell<BTreeSet<String>>,
}

impl Section<'_> {
    pub fn raw(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.own
            .and_then(|m| m.get(key))
            .or_else(|| self.common.and_then(|m| m.get(key)))
            .map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| ConfigError(format!("[{}] {key} = {v:?}: {e}", self.name)))
            })
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<T>()
                            .map_err(|e| ConfigError(format!("[{}] {key}: item {s:?}: {e}", self.name)))
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key).map(str::to_ascii_lowercase).as_deref() {
            None => Ok(default),
            Some("true" | "yes" | "1" | "on") => Ok(true),
            Some("false" | "no" | "0" | "off") => Ok(false),
            Some(v) => Err(ConfigError(format!("[{}] {key} = {v:?} is not a boolean", self.name))),
        }
    }

    /// Errors on keys of this command's own section that were never read.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        if let Some(own) = self.own {
            let unknown: Vec<&str> = own.keys().filter(|k| !used.contains(*k)).map(String::as_str).collect();
            if !unknown.is_empty() {
                return Err(ConfigError(format!("[{}] unknown keys: {}", self.name, unknown.join(", "))));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn section_overrides_common() {
        let c = Config::parse("eps = 0.1\nn = 64\n\n[eta]\neps = 0.05 # finer\n").unwrap();
        let s = c.section("eta");
        assert_eq!(s.get::<f64>("eps").unwrap(), Some(0.05));
        assert_eq!(s.get::<usize>("n").unwrap(), Some(64));
        assert_eq!(c.section("gamma").get::<f64>("eps").unwrap(), Some(0.1));
    }

    #[test]
    fn lists_and_booleans() {
        let c = Config::parse("[gamma]\neps_list = 0.1, 0.05,0.025\ndump = yes").unwrap();
        let s = c.section("gamma");
        assert_eq!(s.list::<f64>("eps_list").unwrap(), Some(vec![0.1, 0.05, 0.025]));
        assert!(s.bool_or("dump", false).unwrap());
        s.finish().unwrap();
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Config::parse("[nope]\n").is_err());
        assert!(Config::parse("eps 0.1\n").is_err());
        assert!(Config::parse("eps = 1\neps = 2\n").is_err());
        assert!(Config::parse("[eta\n").is_err());
        let c = Config::parse("[eta]\nepz = 0.1\n").unwrap();
        let s = c.section("eta");
        let _ = s.get::<f64>("eps");
        assert!(s.finish().is_err());
        assert!(s.get::<f64>("epz").is_ok());
    }

    #[test]
    fn comments_are_ignored() {
        let c = Config::parse("# header\n; also\n[tf]\nn = 128 # points\n").unwrap();
        assert_eq!(c.section("tf").get::<usize>("n").unwrap(), Some(128));
    }
}
