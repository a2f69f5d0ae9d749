//! JSON form: `{"ground": ["1","2"], "sets": {"a": ["1"], "b": ["1","2"]}}`.
//! A `schema` key is accepted and ignored on input.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{RepError, Representation};
use crate::poset::Poset;

#[derive(Deserialize)]
struct RepFile {
    ground: Vec<String>,
    sets: BTreeMap<String, Vec<String>>,
}

/// Parses a representation of `p`; sets are keyed by element label.
pub fn parse_representation(p: &Poset, text: &str) -> Result<Representation, RepError> {
    let file: RepFile = serde_json::from_str(text).map_err(|e| RepError::Json(e.to_string()))?;
    let mut index = HashMap::new();
    for (i, l) in file.ground.iter().enumerate() {
        if index.insert(l.as_str(), i).is_some() {
            return Err(RepError::DuplicateLabel(l.clone()));
        }
    }
    let w = file.ground.len();
    let mut sets: Vec<Option<FixedBitSet>> = vec![None; p.len()];
    for (name, members) in &file.sets {
        let x = p
            .index_of(name)
            .ok_or_else(|| RepError::UnknownElement(name.clone()))?;
        let mut b = FixedBitSet::with_capacity(w);
        for m in members {
            let &i = index
                .get(m.as_str())
                .ok_or_else(|| RepError::UnknownLabel(m.clone()))?;
            b.insert(i);
        }
        sets[x] = Some(b);
    }
    let sets = sets
        .into_iter()
        .enumerate()
        .map(|(x, s)| s.ok_or_else(|| RepError::MissingElement(p.label(x).to_owned())))
        .collect::<Result<Vec<_>, _>>()?;
    Representation::new(file.ground, sets)
}

/// JSON value with sets listed in element order and members in ground order.
pub fn representation_to_json(p: &Poset, r: &Representation) -> Value {
    let mut sets = Map::new();
    for x in p.elements() {
        sets.insert(p.label(x).to_owned(), json!(r.set_labels(x)));
    }
    json!({ "ground": r.ground(), "sets": sets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::canonical_representation;

    fn lambda() -> Poset {
        Poset::from_relations(["a", "b", "top"], &[(0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn round_trip() {
        let p = lambda();
        let r = canonical_representation(&p);
        let text = representation_to_json(&p, &r).to_string();
        assert_eq!(
            text,
            r#"{"ground":["a","b","top"],"sets":{"a":["a"],"b":["b"],"top":["a","b","top"]}}"#
        );
        assert_eq!(parse_representation(&p, &text).unwrap(), r);
    }

    #[test]
    fn schema_key_ignored() {
        let text =
            r#"{"schema":"poset-cube/1","ground":["1","2"],"sets":{"a":["1"],"b":["2"],"top":["1","2"]}}"#;
        let r = parse_representation(&lambda(), text).unwrap();
        assert_eq!(r.ground_size(), 2);
    }

    #[test]
    fn errors() {
        let p = lambda();
        let orphan = r#"{"ground":["1","2","3"],"sets":{"a":["1"],"b":["2"],"top":["1","2"]}}"#;
        assert_eq!(
            parse_representation(&p, orphan),
            Err(RepError::OrphanLabel("3".into()))
        );
        let unknown = r#"{"ground":["1"],"sets":{"a":["1"],"b":["2"],"top":["1"]}}"#;
        assert_eq!(
            parse_representation(&p, unknown),
            Err(RepError::UnknownLabel("2".into()))
        );
        let missing = r#"{"ground":["1"],"sets":{"a":["1"],"b":["1"]}}"#;
        assert_eq!(
            parse_representation(&p, missing),
            Err(RepError::MissingElement("top".into()))
        );
        let stray = r#"{"ground":["1"],"sets":{"zz":["1"]}}"#;
        assert_eq!(
            parse_representation(&p, stray),
            Err(RepError::UnknownElement("zz".into()))
        );
        assert!(matches!(parse_representation(&p, "{"), Err(RepError::Json(_))));
    }
}
