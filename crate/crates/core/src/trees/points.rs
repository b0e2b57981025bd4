use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::Value;

use super::{DaryTree, Shape, StepSet};
use crate::error::{Error, Result};

/// A labelled point `(x, y, word)`: `x` is the depth, `y` the label and
/// `word` the sequence of slots (1-based) leading to it from the origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
    pub word: Vec<u8>,
}

impl Point {
    pub fn new(x: i64, y: i64, word: &[u8]) -> Self {
        Point {
            x,
            y,
            word: word.to_vec(),
        }
    }
}

/// Point-set encoding of an embedded tree with respect to step vectors
/// `a_l = (1, b_l)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmbeddedPointSet {
    pub points: BTreeSet<Point>,
}

/// Why a point set does not encode an embedded tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointSetViolation {
    /// `(0, 0, ε)` is absent.
    MissingRoot,
    /// A point other than the origin has the empty word.
    ExtraRoot(Point),
    /// A word uses a letter outside `1..=d`.
    BadLetter(Point),
    /// No point equals this one minus a step vector with the matching word.
    Orphan(Point),
}

impl fmt::Display for PointSetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointSetViolation::MissingRoot => write!(f, "root (0,0,ε) missing"),
            PointSetViolation::ExtraRoot(p) => write!(f, "point {p:?} has the empty word but is not the root"),
            PointSetViolation::BadLetter(p) => write!(f, "point {p:?} uses a letter outside the alphabet"),
            PointSetViolation::Orphan(p) => write!(f, "point {p:?} has no parent"),
        }
    }
}

impl EmbeddedPointSet {
    pub fn from_points<I: IntoIterator<Item = Point>>(points: I) -> Self {
        EmbeddedPointSet {
            points: points.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Rebuilds the tree from a valid point set.
    pub fn to_tree(&self, steps: &StepSet) -> Result<DaryTree> {
        if let Err(v) = validate_point_set(self, steps) {
            return Err(Error::InvalidArgument(format!("invalid point set: {v}")));
        }
        let words: BTreeSet<&[u8]> = self.points.iter().map(|p| p.word.as_slice()).collect();
        let d = steps.arity();
        fn build(prefix: &mut Vec<u8>, words: &BTreeSet<&[u8]>, d: usize) -> Shape {
            if !words.contains(prefix.as_slice()) {
                return Shape::Leaf;
            }
            let mut ch = Vec::with_capacity(d);
            for slot in 1..=d as u8 {
                prefix.push(slot);
                ch.push(build(prefix, words, d));
                prefix.pop();
            }
            Shape::Node(ch)
        }
        let mut prefix = Vec::new();
        DaryTree::new(d, build(&mut prefix, &words, d))
    }

    /// JSON array of `[x, y, "word"]` triples; letters are written as digits.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.points
                .iter()
                .map(|p| {
                    let w: String = p.word.iter().map(|l| l.to_string()).collect();
                    serde_json::json!([p.x, p.y, w])
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse("expected a JSON array".into()))?;
        let mut points = BTreeSet::new();
        for item in arr {
            let triple = item
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| Error::Parse(format!("bad point {item}")))?;
            let x = triple[0]
                .as_i64()
                .ok_or_else(|| Error::Parse(format!("bad x in {item}")))?;
            let y = triple[1]
                .as_i64()
                .ok_or_else(|| Error::Parse(format!("bad y in {item}")))?;
            let w = triple[2]
                .as_str()
                .ok_or_else(|| Error::Parse(format!("bad word in {item}")))?;
            let word = w
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Parse(format!("bad letter `{c}`")))
                })
                .collect::<Result<Vec<u8>>>()?;
            points.insert(Point { x, y, word });
        }
        Ok(EmbeddedPointSet { points })
    }
}

/// Encodes each internal node as `(depth, label, slot word)`.
pub fn to_point_set(tree: &DaryTree, steps: &StepSet) -> Result<EmbeddedPointSet> {
    let e = super::embed(tree, steps)?;
    Ok(EmbeddedPointSet::from_points(e.internal.into_iter().map(|n| Point {
        x: n.word.len() as i64,
        y: n.label,
        word: n.word,
    })))
}

/// Checks that the origin is the unique point with the empty word and that
/// every other point is a parent point displaced by the step of its last
/// letter.
pub fn validate_point_set(ps: &EmbeddedPointSet, steps: &StepSet) -> std::result::Result<(), PointSetViolation> {
    let root = Point::new(0, 0, &[]);
    if !ps.points.contains(&root) {
        return Err(PointSetViolation::MissingRoot);
    }
    let d = steps.arity();
    let mut by_word: BTreeMap<&[u8], Vec<&Point>> = BTreeMap::new();
    for p in &ps.points {
        by_word.entry(p.word.as_slice()).or_default().push(p);
    }
    for p in &ps.points {
        if p.word.is_empty() {
            if *p != root {
                return Err(PointSetViolation::ExtraRoot(p.clone()));
            }
            continue;
        }
        if p.word.iter().any(|&l| l == 0 || l as usize > d) {
            return Err(PointSetViolation::BadLetter(p.clone()));
        }
        let (last, parent_word) = p.word.split_last().expect("nonempty");
        let b = steps.increment(*last as usize - 1);
        let has_parent = by_word
            .get(parent_word)
            .is_some_and(|cands| cands.iter().any(|q| q.x + 1 == p.x && q.y + b == p.y));
        if !has_parent {
            return Err(PointSetViolation::Orphan(p.clone()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::enumerate_trees;

    #[test]
    fn size_one_tree_is_the_origin() {
        let ps = to_point_set(&DaryTree::parse("(•,•,•)", 3).unwrap(), &StepSet::ternary()).unwrap();
        assert_eq!(ps.points.into_iter().collect::<Vec<_>>(), vec![Point::new(0, 0, &[])]);
    }

    #[test]
    fn binary_path_configuration_example() {
        let steps = StepSet::new(vec![1, -1]).unwrap();
        let ps = EmbeddedPointSet::from_points([
            Point::new(0, 0, &[]),
            Point::new(1, 1, &[1]),
            Point::new(1, -1, &[2]),
            Point::new(2, 0, &[1, 2]),
            Point::new(2, -2, &[2, 2]),
        ]);
        assert_eq!(validate_point_set(&ps, &steps), Ok(()));
        let tree = ps.to_tree(&steps).unwrap();
        assert_eq!(tree.size(), 5);
        assert_eq!(to_point_set(&tree, &steps).unwrap(), ps);
    }

    #[test]
    fn orphan_is_reported() {
        let ps = EmbeddedPointSet::from_points([Point::new(0, 0, &[]), Point::new(5, 0, &[1])]);
        assert_eq!(
            validate_point_set(&ps, &StepSet::ternary()),
            Err(PointSetViolation::Orphan(Point::new(5, 0, &[1])))
        );
    }

    #[test]
    fn first_condition_violations() {
        let steps = StepSet::ternary();
        assert_eq!(
            validate_point_set(&EmbeddedPointSet::default(), &steps),
            Err(PointSetViolation::MissingRoot)
        );
        let ps = EmbeddedPointSet::from_points([Point::new(0, 0, &[]), Point::new(0, 1, &[])]);
        assert!(matches!(
            validate_point_set(&ps, &steps),
            Err(PointSetViolation::ExtraRoot(_))
        ));
        let ps = EmbeddedPointSet::from_points([Point::new(0, 0, &[]), Point::new(1, 1, &[4])]);
        assert!(matches!(
            validate_point_set(&ps, &steps),
            Err(PointSetViolation::BadLetter(_))
        ));
    }

    #[test]
    fn round_trip_over_all_small_trees() {
        let steps = StepSet::ternary();
        for n in 1..=5 {
            for tree in enumerate_trees(3, n).unwrap() {
                let ps = to_point_set(&tree, &steps).unwrap();
                assert_eq!(validate_point_set(&ps, &steps), Ok(()));
                assert_eq!(ps.to_tree(&steps).unwrap(), tree);
                let back = EmbeddedPointSet::from_json(&ps.to_json()).unwrap();
                assert_eq!(back, ps);
            }
        }
    }

    #[test]
    fn json_shape() {
        let ps = EmbeddedPointSet::from_points([Point::new(0, 0, &[]), Point::new(1, 1, &[1])]);
        assert_eq!(ps.to_json().to_string(), r#"[[0,0,""],[1,1,"1"]]"#);
    }
}
