//! Text format for posets.
//!
//! ```text
//! poset v1
//! # comment
//! elements a b top
//! rel a < top
//! rel b < top
//! ```
//!
//! Relations may be any generating set; the closure is taken on load.

use std::collections::HashMap;

use thiserror::Error;

use super::{Poset, PosetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected header `poset v1`")]
    MissingHeader { line: usize },
    #[error("line {line}: `elements` declared more than once")]
    RepeatedElements { line: usize },
    #[error("no `elements` line")]
    NoElements,
    #[error("line {line}: unknown element `{name}`")]
    UnknownElement { line: usize, name: String },
    #[error("line {line}: malformed line `{text}`")]
    Malformed { line: usize, text: String },
    #[error(transparent)]
    Poset(#[from] PosetError),
}

pub fn parse_poset(text: &str) -> Result<Poset, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, l)) if l.split_whitespace().eq(["poset", "v1"]) => {}
        Some((line, _)) => return Err(ParseError::MissingHeader { line }),
        None => return Err(ParseError::MissingHeader { line: 1 }),
    }

    let mut labels: Option<Vec<String>> = None;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut relations = Vec::new();
    for (line, l) in lines {
        let mut tokens = l.split_whitespace();
        match tokens.next() {
            Some("elements") => {
                if labels.is_some() {
                    return Err(ParseError::RepeatedElements { line });
                }
                let names: Vec<String> = tokens.map(str::to_owned).collect();
                for (i, name) in names.iter().enumerate() {
                    if index.insert(name.clone(), i).is_some() {
                        return Err(PosetError::DuplicateElement(name.clone()).into());
                    }
                }
                labels = Some(names);
            }
            Some("rel") => {
                let rest: Vec<&str> = tokens.collect();
                let [a, "<", b] = rest.as_slice() else {
                    return Err(ParseError::Malformed {
                        line,
                        text: l.to_owned(),
                    });
                };
                let lookup = |name: &str| {
                    index
                        .get(name)
                        .copied()
                        .ok_or_else(|| ParseError::UnknownElement {
                            line,
                            name: name.to_owned(),
                        })
                };
                relations.push((lookup(a)?, lookup(b)?));
            }
            _ => {
                return Err(ParseError::Malformed {
                    line,
                    text: l.to_owned(),
                })
            }
        }
    }
    let labels = labels.ok_or(ParseError::NoElements)?;
    Ok(Poset::from_relations(labels, &relations)?)
}

/// Writes a poset with its cover relations.
pub fn write_poset(p: &Poset) -> String {
    let mut out = String::from("poset v1\n");
    out.push_str("elements ");
    out.push_str(&p.labels().join(" "));
    out.push('\n');
    for (x, y) in p.covers() {
        out.push_str(&format!("rel {} < {}\n", p.label(x), p.label(y)));
    }
    out
}
