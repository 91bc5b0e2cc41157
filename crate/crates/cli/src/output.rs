use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::config::sha256_hex;

pub const VERSION: &str = concat!("ch ", env!("CARGO_PKG_VERSION"));

/// Version line and config hash carried by every output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub hash: String,
}

impl Provenance {
    pub fn new(hash: impl Into<String>) -> Self {
        Provenance { hash: hash.into() }
    }

    /// Comment lines for the top of a CSV or script file.
    pub fn header(&self, comment: &str) -> String {
        format!("{comment} {VERSION}\n{comment} config_hash {}\n", self.hash)
    }

    /// `value` as a JSON object with `version` and `config_hash` added.
    pub fn stamp<T: Serialize>(&self, value: &T) -> Result<Value> {
        let mut v = serde_json::to_value(value)?;
        let Value::Object(map) = &mut v else { bail!("only JSON objects can be stamped") };
        map.insert("version".into(), Value::String(VERSION.into()));
        map.insert("config_hash".into(), Value::String(self.hash.clone()));
        Ok(v)
    }

    pub fn write_json<T: Serialize>(&self, path: &Path, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&self.stamp(value)?)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
    }

    /// Writes the header comments, then whatever `body` produces.
    pub fn write_text(&self, path: &Path, comment: &str, body: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<()> {
        let mut buf = self.header(comment).into_bytes();
        body(&mut buf)?;
        fs::write(path, buf).with_context(|| format!("cannot write {}", path.display()))
    }
}

/// Hash of the canonical JSON form of `value`.
pub fn sha256_of<T: Serialize>(value: &T) -> Result<String> {
    Ok(sha256_hex(&serde_json::to_vec(value)?))
}

/// Reads the `config_hash` of a stamped JSON value.
pub fn hash_of(v: &Value) -> Option<&str> {
    v.get("config_hash").and_then(Value::as_str)
}

/// Python script plotting `u` per output time from a `t,x,u,...` CSV.
pub fn plot_script(csv_name: &str, title: &str) -> String {
    format!(
        r##"import sys

import matplotlib.pyplot as plt
import pandas as pd

df = pd.read_csv("{csv_name}", comment="#")
fig, (ax_u, ax_f) = plt.subplots(1, 2, figsize=(11, 4))
for t, g in df.groupby("t"):
    ax_u.plot(g["x"], g["u"], label=f"t = {{t:g}}")
    ax_f.plot(g["x"], g["F"], label=f"t = {{t:g}}")
ax_u.set_xlabel("x")
ax_u.set_ylabel("u")
ax_f.set_xlabel("x")
ax_f.set_ylabel("F")
ax_u.legend(fontsize="small")
fig.suptitle("{title}")
fig.tight_layout()
out = sys.argv[1] if len(sys.argv) > 1 else "{stem}.png"
fig.savefig(out, dpi=150)
"##,
        stem = csv_name.trim_end_matches(".csv"),
    )
}

pub fn write_plot_script(dir: &Path, name: &str, csv_name: &str, title: &str, prov: &Provenance) -> Result<()> {
    prov.write_text(&dir.join(name), "#", |w| w.write_all(plot_script(csv_name, title).as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stamp_adds_both_keys() {
        let p = Provenance::new("abc");
        let v = p.stamp(&serde_json::json!({"x": 1})).unwrap();
        assert_eq!(hash_of(&v), Some("abc"));
        assert_eq!(v["version"], VERSION);
        assert!(p.stamp(&[1, 2]).is_err());
    }

    #[test]
    fn header_has_version_and_hash() {
        let h = Provenance::new("abc").header("#");
        assert_eq!(h, format!("# {VERSION}\n# config_hash abc\n"));
    }
}
