//! Line-oriented text formats.
//!
//! Relations:
//!
//! ```text
//! # comment
//! rel <m> <n>
//! t_1 … t_m
//! ```
//!
//! Partitions list one block per line after a `part <n>` header.
//! Comment lines start with `#`; blank lines are ignored everywhere.

use crate::error::{GqError, Result};
use crate::partition::EquivPartition;
use crate::relation::{FiniteRelation, Universe};

/// Non-blank, non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_usize(field: &str, line: usize) -> Result<usize> {
    field
        .parse()
        .map_err(|_| GqError::parse(line, format!("`{field}` is not a non-negative integer")))
}

fn parse_header(line: usize, header: &str, keyword: &str, count: usize) -> Result<Vec<usize>> {
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != count + 1 || fields[0] != keyword {
        return Err(GqError::parse(
            line,
            format!("malformed header `{header}`, expected `{keyword}` with {count} integers"),
        ));
    }
    fields[1..].iter().map(|f| parse_usize(f, line)).collect()
}

pub fn parse_relation(text: &str) -> Result<FiniteRelation> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| GqError::parse(0, "missing `rel <m> <n>` header"))?;
    let dims = parse_header(hline, header, "rel", 2)?;
    let (m, n) = (dims[0], dims[1]);
    let universe = Universe::new(n).map_err(|e| GqError::parse(hline, e.to_string()))?;
    let mut rel =
        FiniteRelation::empty(universe, m).map_err(|e| GqError::parse(hline, e.to_string()))?;
    let mut tuple = Vec::with_capacity(m);
    for (lineno, line) in lines {
        tuple.clear();
        for field in line.split_whitespace() {
            let x = parse_usize(field, lineno)?;
            if x >= n {
                return Err(GqError::parse(
                    lineno,
                    format!("coordinate {x} out of range for n = {n}"),
                ));
            }
            tuple.push(x);
        }
        if tuple.len() != m {
            return Err(GqError::parse(
                lineno,
                format!("expected {m} coordinates, found {}", tuple.len()),
            ));
        }
        rel.insert(&tuple)?;
    }
    Ok(rel)
}

/// Canonical form: header, then members in ascending encoded order.
pub fn serialize_relation(rel: &FiniteRelation) -> String {
    let mut out = format!("rel {} {}\n", rel.arity(), rel.n());
    for t in rel.tuples() {
        let fields: Vec<String> = t.iter().map(|x| x.to_string()).collect();
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_partition(text: &str) -> Result<EquivPartition> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| GqError::parse(0, "missing `part <n>` header"))?;
    let n = parse_header(hline, header, "part", 1)?[0];
    let mut blocks = Vec::new();
    let mut last_line = hline;
    for (lineno, line) in lines {
        last_line = lineno;
        let block = line
            .split_whitespace()
            .map(|f| parse_usize(f, lineno))
            .collect::<Result<Vec<_>>>()?;
        blocks.push(block);
    }
    EquivPartition::from_blocks(n, &blocks).map_err(|e| GqError::parse(last_line, e.to_string()))
}

pub fn serialize_partition(psi: &EquivPartition) -> String {
    let mut out = format!("part {}\n", psi.universe().size());
    for block in psi.blocks() {
        let fields: Vec<String> = block.iter().map(|x| x.to_string()).collect();
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}
