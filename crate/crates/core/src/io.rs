//! Structured-text (TOML) file helpers.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub fn from_toml_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_toml_string<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| Error::Parse(e.to_string()))
}

/// Reads and parses a TOML file; failures name the file and the offending key.
pub fn load_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::File {
        path: path.to_path_buf(),
        field: "-".into(),
        msg: e.to_string(),
    })?;
    toml::from_str(&text).map_err(|e| Error::File {
        path: path.to_path_buf(),
        field: toml_field(&text, &e),
        msg: e.message().to_string(),
    })
}

pub fn save_toml<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_toml_string(value)?)?;
    Ok(())
}

// Best effort: the key on the line where parsing stopped.
fn toml_field(text: &str, e: &toml::de::Error) -> String {
    let Some(span) = e.span() else {
        return "-".into();
    };
    let start = text[..span.start.min(text.len())]
        .rfind('\n')
        .map_or(0, |i| i + 1);
    let line = text[start..].lines().next().unwrap_or("");
    match line.split_once('=') {
        Some((key, _)) => key.trim().to_string(),
        None => line.trim().trim_matches(['[', ']']).to_string(),
    }
}
