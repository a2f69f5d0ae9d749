//! Polynomial-time tests for the three properties and for the classes that
//! decide when `iir`, `dim2` and `cw` reach `|P|`.

use std::fmt;

use serde::Serialize;

use crate::poset::{block_decomposition, component_decomposition, Decomposition, Elem, Poset};
use crate::representation::PropertyViolation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    NoBlockIsChain,
    TwoDown,
    ParallelPair,
}

impl Property {
    pub const ALL: [Property; 3] = [
        Property::NoBlockIsChain,
        Property::TwoDown,
        Property::ParallelPair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::NoBlockIsChain => "no-block-is-chain",
            Property::TwoDown => "two-down",
            Property::ParallelPair => "parallel-pair",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BlockClass {
    A,
    A234,
    B,
    Z,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Witness {
    /// A concrete violation, with the labels of the elements involved.
    Violation {
        violation: PropertyViolation,
        elements: Vec<String>,
    },
    /// The first of several conjoined properties that fails.
    FailedProperty { report: Box<PropertyReport> },
    /// The decomposition a class test was decided on.
    Decomposition {
        kind: String,
        parts: Vec<Vec<String>>,
        classes: Vec<Vec<BlockClass>>,
        /// Index of the part that decided a negative verdict.
        failing_part: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub holds: bool,
    pub witness: Option<Witness>,
}

/// `x` is comparable to every other element.
pub fn is_chain_block_element(p: &Poset, x: Elem) -> bool {
    p.strict_below(x).count_ones(..) + p.strict_above(x).count_ones(..) + 1 == p.len()
}

/// Some `z` parallel to `y` has `D(y) ⊆ D(z)`.
pub fn two_down_holds_at(p: &Poset, y: Elem) -> bool {
    p.elements()
        .any(|z| p.parallel(y, z) && p.strict_below(y).is_subset(p.strict_below(z)))
}

/// Either some `y' >= y` parallel to `x` has `D(x) ⊆ D(y')`, or some
/// `x' >= x` parallel to `y` has `D(y) ⊆ D(x')`.
pub fn parallel_pair_holds_at(p: &Poset, x: Elem, y: Elem) -> bool {
    let one_side = |x: Elem, y: Elem| {
        p.closed_above(y)
            .ones()
            .any(|u| p.parallel(x, u) && p.strict_below(x).is_subset(p.strict_below(u)))
    };
    one_side(x, y) || one_side(y, x)
}

/// Smallest violation of `which`, if any.
pub fn property_violation(p: &Poset, which: Property) -> Option<PropertyViolation> {
    match which {
        Property::NoBlockIsChain => p
            .elements()
            .find(|&x| is_chain_block_element(p, x))
            .map(|element| PropertyViolation::ChainBlock { element }),
        Property::TwoDown => p
            .elements()
            .find(|&y| p.lower_covers(y).len() >= 2 && !two_down_holds_at(p, y))
            .map(|element| PropertyViolation::TwoDown { element }),
        Property::ParallelPair => p
            .elements()
            .flat_map(|x| (x + 1..p.len()).map(move |y| (x, y)))
            .find(|&(x, y)| p.parallel(x, y) && !parallel_pair_holds_at(p, x, y))
            .map(|(x, y)| PropertyViolation::ParallelPair { x, y }),
    }
}

/// First violation among the three properties, in declaration order.
pub fn find_violation(p: &Poset) -> Option<PropertyViolation> {
    Property::ALL.iter().find_map(|&w| property_violation(p, w))
}

fn violation_elements(p: &Poset, v: PropertyViolation) -> Vec<String> {
    let ids = match v {
        PropertyViolation::ChainBlock { element } | PropertyViolation::TwoDown { element } => {
            vec![element]
        }
        PropertyViolation::ParallelPair { x, y } => vec![x, y],
    };
    ids.into_iter().map(|x| p.label(x).to_owned()).collect()
}

pub fn check_property(p: &Poset, which: Property) -> PropertyReport {
    let v = property_violation(p, which);
    PropertyReport {
        property: which.name().to_owned(),
        holds: v.is_none(),
        witness: v.map(|violation| Witness::Violation {
            violation,
            elements: violation_elements(p, violation),
        }),
    }
}

/// All three properties; equivalent to `iir(P) = |P|`.
pub fn in_miir(p: &Poset) -> PropertyReport {
    let failed = Property::ALL
        .iter()
        .map(|&w| check_property(p, w))
        .find(|r| !r.holds);
    PropertyReport {
        property: "miir".to_owned(),
        holds: failed.is_none(),
        witness: failed.map(|r| Witness::FailedProperty { report: Box::new(r) }),
    }
}

fn decomposition_witness(d: &Decomposition, failing_part: Option<usize>) -> Witness {
    Witness::Decomposition {
        kind: match d.kind {
            crate::poset::DecompositionKind::Block => "block".to_owned(),
            crate::poset::DecompositionKind::Component => "component".to_owned(),
        },
        parts: d.parts.iter().map(|q| q.labels().to_vec()).collect(),
        classes: d.parts.iter().map(classify_block_class).collect(),
        failing_part,
    }
}

/// In MIIR, or the first block is a chain and every later block is in MIIR.
pub fn in_nmiir(p: &Poset) -> PropertyReport {
    let miir = in_miir(p);
    let d = block_decomposition(p);
    if miir.holds {
        return PropertyReport {
            property: "nmiir".to_owned(),
            holds: true,
            witness: Some(decomposition_witness(&d, None)),
        };
    }
    let failing = if !d.parts[0].is_chain() {
        Some(0)
    } else {
        (1..d.len()).find(|&i| !in_miir(&d.parts[i]).holds)
    };
    PropertyReport {
        property: "nmiir".to_owned(),
        holds: failing.is_none(),
        witness: Some(decomposition_witness(&d, failing)),
    }
}

fn is_b(p: &Poset) -> bool {
    let d = component_decomposition(p);
    if d.len() != 2 {
        return false;
    }
    let (a, b) = (&d.parts[0], &d.parts[1]);
    (a.is_chain() && a.len() >= 2 && b.len() == 1) || (b.is_chain() && b.len() >= 2 && a.len() == 1)
}

fn is_z(p: &Poset) -> bool {
    if p.len() != 4 {
        return false;
    }
    let d = component_decomposition(p);
    let mut sizes: Vec<usize> = d.parts.iter().map(Poset::len).collect();
    sizes.sort_unstable();
    sizes == [1, 1, 2]
}

/// Which of the classes `A`, `A234`, `B`, `Z` contain `p`.
pub fn classify_block_class(p: &Poset) -> Vec<BlockClass> {
    let mut out = Vec::new();
    if p.is_antichain() && p.len() >= 2 {
        out.push(BlockClass::A);
        if p.len() <= 4 {
            out.push(BlockClass::A234);
        }
    }
    if is_b(p) {
        out.push(BlockClass::B);
    }
    if is_z(p) {
        out.push(BlockClass::Z);
    }
    out
}

fn in_classes(p: &Poset, allowed: &[BlockClass]) -> bool {
    classify_block_class(p).iter().any(|c| allowed.contains(c))
}

const MTD_CLASSES: [BlockClass; 3] = [BlockClass::A234, BlockClass::B, BlockClass::Z];
const MCW_TOP_CLASSES: [BlockClass; 3] = [BlockClass::A, BlockClass::B, BlockClass::Z];

/// Every block is in `A234 ∪ B ∪ {Z}`; equivalent to `dim2(P) = |P|`.
pub fn in_mtd(p: &Poset) -> PropertyReport {
    let d = block_decomposition(p);
    let failing = d.parts.iter().position(|q| !in_classes(q, &MTD_CLASSES));
    PropertyReport {
        property: "mtd".to_owned(),
        holds: failing.is_none(),
        witness: Some(decomposition_witness(&d, failing)),
    }
}

/// The last block is in `A ∪ B ∪ {Z}` and the blocks below it form a poset
/// in MTD; equivalent to `cw(P) = |P|`.
pub fn in_mcw(p: &Poset) -> PropertyReport {
    let d = block_decomposition(p);
    let t = d.len();
    let failing = if !in_classes(&d.parts[t - 1], &MCW_TOP_CLASSES) {
        Some(t - 1)
    } else if t > 1 {
        let lower: Vec<Elem> = d.embeddings[..t - 1].iter().flatten().copied().collect();
        let rest = p
            .induced_subposet(&lower)
            .expect("ids in range")
            .expect("non-empty");
        if in_mtd(&rest).holds {
            None
        } else {
            d.parts[..t - 1].iter().position(|q| !in_classes(q, &MTD_CLASSES))
        }
    } else {
        None
    };
    PropertyReport {
        property: "mcw".to_owned(),
        holds: failing.is_none(),
        witness: Some(decomposition_witness(&d, failing)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{disjoint_sum, vertical_sum};

    fn a(n: usize) -> Poset {
        Poset::antichain(n).unwrap()
    }
    fn c(n: usize) -> Poset {
        Poset::chain(n).unwrap()
    }
    fn lambda() -> Poset {
        vertical_sum(&[a(2), Poset::single()]).unwrap()
    }
    fn v() -> Poset {
        vertical_sum(&[Poset::single(), a(2)]).unwrap()
    }
    fn z() -> Poset {
        disjoint_sum(&[c(2), Poset::single(), Poset::single()]).unwrap()
    }

    #[test]
    fn antichain_has_all_properties() {
        for w in Property::ALL {
            assert!(check_property(&a(3), w).holds, "{w}");
        }
    }

    #[test]
    fn lambda_violations() {
        let r = check_property(&lambda(), Property::NoBlockIsChain);
        assert_eq!(
            property_violation(&lambda(), Property::NoBlockIsChain),
            Some(PropertyViolation::ChainBlock { element: 2 })
        );
        assert!(!r.holds);
        assert_eq!(
            property_violation(&lambda(), Property::TwoDown),
            Some(PropertyViolation::TwoDown { element: 2 })
        );
    }

    #[test]
    fn two_chains_fail_parallel_pair() {
        let p = disjoint_sum(&[c(2), c(2)]).unwrap();
        assert_eq!(
            property_violation(&p, Property::ParallelPair),
            Some(PropertyViolation::ParallelPair { x: 1, y: 3 })
        );
    }

    #[test]
    fn miir_and_nmiir() {
        assert!(!in_miir(&c(4)).holds);
        assert!(in_miir(&a(2)).holds);
        assert!(in_nmiir(&c(5)).holds);
        assert!(in_nmiir(&v()).holds);
        assert!(!in_nmiir(&lambda()).holds);
    }

    #[test]
    fn classes() {
        assert_eq!(classify_block_class(&a(7)), vec![BlockClass::A]);
        assert_eq!(classify_block_class(&a(3)), vec![BlockClass::A, BlockClass::A234]);
        let b = disjoint_sum(&[c(3), Poset::single()]).unwrap();
        assert_eq!(classify_block_class(&b), vec![BlockClass::B]);
        assert_eq!(classify_block_class(&z()), vec![BlockClass::Z]);
        assert!(classify_block_class(&c(3)).is_empty());
    }

    #[test]
    fn mtd_and_mcw() {
        assert!(in_mtd(&vertical_sum(&[a(2), a(2)]).unwrap()).holds);
        assert!(!in_mtd(&a(5)).holds);
        assert!(in_mtd(&z()).holds);
        assert!(in_mcw(&a(5)).holds);
        assert!(in_mcw(&vertical_sum(&[a(2), a(5)]).unwrap()).holds);
        assert!(!in_mcw(&c(2)).holds);
        assert!(!in_mcw(&vertical_sum(&[a(5), a(2)]).unwrap()).holds);
    }
}
