//! Plain-text analysis reports and model-vs-data residual tables.

use std::fmt::Display;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ordered `key = value` lines. Floating values are written with the
/// shortest representation that round-trips.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.entries.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn number<T: Scalar>(&mut self, key: &str, value: T) -> &mut Self {
        self.entries.push((key.to_owned(), format!("{value:e}")));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(out, "{k} = {v}")?;
        }
        Ok(())
    }

    /// Parses text produced by [`Report::write`]. Blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| Error::InvalidArgument(format!("report line {}: missing ' = '", i + 1)))?;
            entries.push((k.trim().to_owned(), v.trim().to_owned()));
        }
        Ok(Self { entries })
    }
}

/// Writes `p,data,model,residual` rows, residual = data − model.
pub fn write_residuals<T: Scalar, W: Write>(mut out: W, p: &[T], data: &[T], model: &[T]) -> Result<()> {
    if p.len() != data.len() || p.len() != model.len() {
        return Err(Error::InvalidArgument(format!(
            "residual columns differ in length: {} / {} / {}",
            p.len(),
            data.len(),
            model.len()
        )));
    }
    let io = |e: io::Error| Error::InvalidArgument(format!("write failed: {e}"));
    writeln!(out, "p,data,model,residual").map_err(io)?;
    for ((&x, &d), &m) in p.iter().zip(data).zip(model) {
        writeln!(out, "{x:.11e},{d:.11e},{m:.11e},{:.11e}", d - m).map_err(io)?;
    }
    Ok(())
}
