//! Text format for topology descriptors.
//!
//! One rule per line: `src_start src_end dst_start dst_end p`, ranges
//! half-open. `#` starts a comment. An optional `neurons N` line sets the
//! network size; otherwise it is the largest range end.

use std::path::Path;

use spikeforge_core::{ConnectRule, IdRange, TopologyDescriptor};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid descriptor: {0}")]
    Invalid(#[from] spikeforge_core::CoreError),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn field<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, DescriptorError> {
    tok.parse().map_err(|_| DescriptorError::Parse { line, message: format!("bad {what} `{tok}`") })
}

pub fn parse(text: &str) -> Result<TopologyDescriptor, DescriptorError> {
    let mut neurons = None;
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        match toks.as_slice() {
            ["neurons", n] => neurons = Some(field::<u32>(n, line, "neuron count")?),
            [a, b, c, d, p] => rules.push(ConnectRule::new(
                IdRange::new(field(a, line, "id")?, field(b, line, "id")?),
                IdRange::new(field(c, line, "id")?, field(d, line, "id")?),
                field(p, line, "probability")?,
            )),
            _ => {
                return Err(DescriptorError::Parse {
                    line,
                    message: format!("expected 5 fields, found {}", toks.len()),
                })
            }
        }
    }
    Ok(match neurons {
        Some(n) => TopologyDescriptor::new(n, rules)?,
        None => TopologyDescriptor::from_rules(rules)?,
    })
}

pub fn read(path: &Path) -> Result<TopologyDescriptor, DescriptorError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| DescriptorError::Io { path: path.display().to_string(), source })?;
    parse(&text)
}

pub fn format(desc: &TopologyDescriptor) -> String {
    let mut out = format!("neurons {}\n", desc.neurons());
    for r in desc.rules() {
        out.push_str(&format!("{} {} {} {} {}\n", r.src.start, r.src.end, r.dst.start, r.dst.end, r.p));
    }
    out
}
