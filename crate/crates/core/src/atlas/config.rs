use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Parses `key = value` lines. Blank lines and lines starting with `#` are
/// ignored; a trailing `# comment` after a value is stripped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config {
                line: n + 1,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(Error::Config {
                line: n + 1,
                message: "empty key or value".into(),
            });
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::Config {
                line: n + 1,
                message: format!("duplicate key `{k}`"),
            });
        }
    }
    Ok(out)
}
