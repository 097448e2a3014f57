use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tool version and config hash stamped on every output file.
#[derive(Clone, Debug)]
pub struct Header {
    pub config_sha256: String,
}

impl Header {
    pub fn comment_block(&self) -> String {
        format!("# rotlab {VERSION}\n# config_sha256 {}\n", self.config_sha256)
    }

    pub fn json(&self) -> Value {
        json!({ "tool": "rotlab", "version": VERSION, "config_sha256": self.config_sha256 })
    }
}

/// Single writer for one output directory.
pub struct OutDir {
    dir: PathBuf,
    header: Header,
}

impl OutDir {
    pub fn create(dir: &Path, header: Header) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(OutDir { dir: dir.to_path_buf(), header })
    }

    fn write(&self, name: &str, body: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
    }

    /// `{"header": .., <fields of value>}`.
    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut doc = serde_json::Map::new();
        doc.insert("header".into(), self.header.json());
        match serde_json::to_value(value)? {
            Value::Object(m) => doc.extend(m),
            other => {
                doc.insert("data".into(), other);
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Comment header followed by whatever `body` writes.
    pub fn text<F>(&self, name: &str, body: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<()>,
    {
        let mut buf = self.header.comment_block().into_bytes();
        body(&mut buf)?;
        self.write(name, &buf)
    }
}

/// Strip `#` lines, for reading our own CSV and dat files back.
pub fn without_comments(text: &str) -> (Vec<&str>, Vec<&str>) {
    text.lines().partition(|l| l.starts_with('#'))
}

/// Config hash named in a comment block or JSON header.
pub fn header_hash(text: &str) -> Option<String> {
    if let Ok(v) = serde_json::from_str::<Value>(text) {
        return v["header"]["config_sha256"].as_str().map(String::from);
    }
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# config_sha256 ").map(|h| h.trim().to_string()))
}
