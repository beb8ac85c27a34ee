//! Ordered key/value reports, rendered as `key: value` text or as
//! tab-separated machine lines.

use std::fmt::Write as _;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn extend(&mut self, other: Report) -> &mut Self {
        self.entries.extend(other.entries);
        self
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}: {v}");
        }
        out
    }

    /// One `key<TAB>value` line per entry. Tabs and newlines inside values
    /// are replaced by spaces.
    pub fn machine(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let v = v.replace(['\t', '\n'], " ");
            let _ = writeln!(out, "{k}\t{v}");
        }
        out
    }
}
