use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write;

use poset_cube::{Poset, Representation};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Numeric labels in numeric order, then everything else lexicographically.
fn label_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// Hasse diagram, bottom to top, one rank per height.
pub fn hasse(p: &Poset, rep: Option<&Representation>) -> String {
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=box];\n");
    for x in p.elements() {
        let mut label = p.label(x).to_owned();
        if let Some(r) = rep {
            let mut members = r.set_labels(x);
            members.sort_by(|a, b| label_order(a, b));
            write!(label, " {{{}}}", members.join(",")).unwrap();
        }
        writeln!(out, "  {} [label={}];", quote(p.label(x)), quote(&label)).unwrap();
    }
    let mut ranks: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for (x, r) in p.ranks().into_iter().enumerate() {
        ranks.entry(r).or_default().push(p.label(x));
    }
    for names in ranks.values() {
        let ids: Vec<String> = names.iter().map(|n| quote(n)).collect();
        writeln!(out, "  {{ rank=same; {}; }}", ids.join("; ")).unwrap();
    }
    for (x, y) in p.covers() {
        writeln!(out, "  {} -> {};", quote(p.label(x)), quote(p.label(y))).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use poset_cube::representation::canonical_representation;

    #[test]
    fn lambda_with_sets() {
        let p = Poset::from_relations(["a", "b", "top"], &[(0, 2), (1, 2)]).unwrap();
        let text = hasse(&p, Some(&canonical_representation(&p)));
        assert!(text.contains("\"a\" [label=\"a {a}\"];"));
        assert!(text.contains("\"top\" [label=\"top {a,b,top}\"];"));
        assert_eq!(text.matches("->").count(), 2);
        assert!(text.contains("{ rank=same; \"a\"; \"b\"; }"));
    }

    #[test]
    fn numeric_labels_sort_numerically() {
        let mut v = vec!["10", "2", "x", "1"];
        v.sort_by(|a, b| label_order(a, b));
        assert_eq!(v, ["1", "2", "10", "x"]);
    }
}
