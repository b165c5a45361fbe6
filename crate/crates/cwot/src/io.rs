//! Text formats: measure files and `key = value` configuration files.
//!
//! A measure file starts with a header line `d n` followed by `n` lines
//! `w x_1 ... x_d`. Blank lines and lines starting with `#` are ignored.
//! Floats are written in shortest round-trip form.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use cwot_core::DiscreteMeasure;

use crate::error::{Error, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_num<T: FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::input(format!("line {line}: cannot parse `{tok}`")))
}

pub fn parse_measure(text: &str) -> Result<DiscreteMeasure> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| Error::input("empty measure file"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(Error::input(format!("line {hline}: header must be `d n`")));
    }
    let dim: usize = parse_num(head[0], hline)?;
    let n: usize = parse_num(head[1], hline)?;
    let mut points = Vec::with_capacity(n * dim);
    let mut weights = Vec::with_capacity(n);
    for (line, body) in lines {
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != dim + 1 {
            return Err(Error::input(format!(
                "line {line}: expected a weight and {dim} coordinates, found {} fields",
                toks.len()
            )));
        }
        weights.push(parse_num::<f64>(toks[0], line)?);
        for t in &toks[1..] {
            points.push(parse_num::<f64>(t, line)?);
        }
    }
    if weights.len() != n {
        return Err(Error::input(format!(
            "header announces {n} atoms, found {}",
            weights.len()
        )));
    }
    Ok(DiscreteMeasure::new(dim, points, weights)?)
}

pub fn format_measure(m: &DiscreteMeasure) -> String {
    let mut out = format!("{} {}\n", m.dim(), m.len());
    for (x, w) in m.atoms() {
        write!(out, "{w:?}").unwrap();
        for c in x {
            write!(out, " {c:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_measure(path: &Path) -> Result<DiscreteMeasure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    parse_measure(&text).map_err(|e| match e {
        Error::Input(msg) => Error::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_measure(path: &Path, m: &DiscreteMeasure) -> Result<()> {
    fs::write(path, format_measure(m))
        .map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

/// A parsed `key = value` file. `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (line, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| Error::input(format!("line {}: expected `key = value`", line + 1)))?;
            let key = k.trim().to_string();
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::input(format!("line {}: duplicate key `{key}`", line + 1)));
            }
        }
        Ok(KeyValues { entries })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Rejects keys outside `allowed`, catching typos.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.entries.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::input(format!(
                "unknown key `{k}`; expected one of {}",
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.entries.insert(key.to_string(), value);
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::input(format!("key `{key}`: cannot parse `{v}`")))
            })
            .transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::input(format!("missing key `{key}`")))
    }

    /// A comma- or whitespace-separated list; empty if the key is absent.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let Some(v) = self.raw(key) else {
            return Ok(Vec::new());
        };
        v.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::input(format!("key `{key}`: cannot parse `{t}`")))
            })
            .collect()
    }
}
