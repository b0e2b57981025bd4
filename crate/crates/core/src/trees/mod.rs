//! Concrete d-ary trees, their natural embedding, and exhaustive enumeration.

mod enumerate;
mod points;

pub use enumerate::{default_cap, enumerate_trees, CompositionOrder, TreeEnumerator};
pub use points::{to_point_set, validate_point_set, EmbeddedPointSet, Point, PointSetViolation};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Label increments `(b_1, ..., b_d)`, one per child slot from left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StepSet {
    increments: Vec<i64>,
}

impl StepSet {
    pub fn new(increments: Vec<i64>) -> Result<Self> {
        if increments.is_empty() {
            return Err(Error::InvalidArgument("a step set needs at least one increment".into()));
        }
        Ok(StepSet { increments })
    }

    /// `(-1, 0, +1)`.
    pub fn ternary() -> Self {
        StepSet {
            increments: vec![-1, 0, 1],
        }
    }

    /// `(-1, +1)`.
    pub fn binary() -> Self {
        StepSet {
            increments: vec![-1, 1],
        }
    }

    /// Increments `-h..=h` for `(2h+1)`-ary trees.
    pub fn odd(h: usize) -> Self {
        let h = h as i64;
        StepSet {
            increments: (-h..=h).collect(),
        }
    }

    /// Increments `-h..=-1, 1..=h` for `(2h)`-ary trees.
    pub fn even(h: usize) -> Self {
        let h = h as i64;
        StepSet {
            increments: (-h..=h).filter(|&b| b != 0).collect(),
        }
    }

    /// Natural step set for arity `d` (`odd` or `even` as appropriate).
    pub fn natural(d: usize) -> Result<Self> {
        match d {
            0 => Err(Error::InvalidArgument("arity must be positive".into())),
            1 => Ok(StepSet { increments: vec![0] }),
            d if d % 2 == 1 => Ok(Self::odd(d / 2)),
            d => Ok(Self::even(d / 2)),
        }
    }

    /// Odd increments `±1, ±3, ..., ±(2h-1)` for `(2h)`-ary trees; `h = 2`
    /// gives the `{±1, ±3}` model.
    pub fn spread_even(h: usize) -> Self {
        let h = h as i64;
        let mut inc: Vec<i64> = (1..=h).rev().map(|k| -(2 * k - 1)).collect();
        inc.extend((1..=h).map(|k| 2 * k - 1));
        StepSet { increments: inc }
    }

    pub fn arity(&self) -> usize {
        self.increments.len()
    }

    pub fn increments(&self) -> &[i64] {
        &self.increments
    }

    pub fn increment(&self, slot: usize) -> i64 {
        self.increments[slot]
    }

    /// Whether the multiset of increments is closed under negation.
    pub fn is_symmetric(&self) -> bool {
        let mut a = self.increments.clone();
        let mut b: Vec<i64> = self.increments.iter().map(|x| -x).collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }

    pub fn max_increment(&self) -> i64 {
        *self.increments.iter().max().expect("nonempty")
    }

    pub fn min_increment(&self) -> i64 {
        *self.increments.iter().min().expect("nonempty")
    }
}

/// Shape of a d-ary tree: an external node or an internal node with its
/// child slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    Leaf,
    Node(Vec<Shape>),
}

impl Shape {
    pub fn size(&self) -> usize {
        match self {
            Shape::Leaf => 0,
            Shape::Node(ch) => 1 + ch.iter().map(Shape::size).sum::<usize>(),
        }
    }

    fn mirrored(&self) -> Shape {
        match self {
            Shape::Leaf => Shape::Leaf,
            Shape::Node(ch) => Shape::Node(ch.iter().rev().map(Shape::mirrored).collect()),
        }
    }

    fn check_arity(&self, d: usize) -> bool {
        match self {
            Shape::Leaf => true,
            Shape::Node(ch) => ch.len() == d && ch.iter().all(|c| c.check_arity(d)),
        }
    }
}

/// Rooted ordered tree in which every internal node has exactly `arity`
/// child slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DaryTree {
    arity: usize,
    root: Shape,
}

impl DaryTree {
    pub fn new(arity: usize, root: Shape) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidArgument("arity must be positive".into()));
        }
        if !root.check_arity(arity) {
            return Err(Error::InvalidArgument(format!("shape is not {arity}-ary")));
        }
        Ok(DaryTree { arity, root })
    }

    /// The size-0 tree: a single external node.
    pub fn leaf(arity: usize) -> Self {
        DaryTree {
            arity,
            root: Shape::Leaf,
        }
    }

    /// A chain of `len` internal nodes, each hanging in `slot` of its parent.
    pub fn chain(arity: usize, slot: usize, len: usize) -> Self {
        assert!(slot < arity);
        let mut shape = Shape::Leaf;
        for _ in 0..len {
            let mut ch = vec![Shape::Leaf; arity];
            ch[slot] = shape;
            shape = Shape::Node(ch);
        }
        DaryTree { arity, root: shape }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn root(&self) -> &Shape {
        &self.root
    }

    /// Number of internal nodes.
    pub fn size(&self) -> usize {
        self.root.size()
    }

    pub fn external_count(&self) -> usize {
        (self.arity - 1) * self.size() + 1
    }

    /// Reverses the order of child slots at every node.
    pub fn mirrored(&self) -> DaryTree {
        DaryTree {
            arity: self.arity,
            root: self.root.mirrored(),
        }
    }

    /// Parses the nested-parentheses form, e.g. `(•,•,•)`. A bare `•` is
    /// the empty tree of the given arity; `.` is accepted in place of `•`.
    pub fn parse(text: &str, arity: usize) -> Result<Self> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let root = parse_shape(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Parse(format!("trailing input at position {pos}")));
        }
        DaryTree::new(arity, root)
    }

    fn check_steps(&self, steps: &StepSet) -> Result<()> {
        if steps.arity() == self.arity {
            Ok(())
        } else {
            Err(Error::ArityMismatch {
                tree: self.arity,
                steps: steps.arity(),
            })
        }
    }
}

fn parse_shape(chars: &[char], pos: &mut usize) -> Result<Shape> {
    match chars.get(*pos) {
        Some('•') | Some('.') => {
            *pos += 1;
            Ok(Shape::Leaf)
        }
        Some('(') => {
            *pos += 1;
            let mut children = vec![parse_shape(chars, pos)?];
            loop {
                match chars.get(*pos) {
                    Some(',') => {
                        *pos += 1;
                        children.push(parse_shape(chars, pos)?);
                    }
                    Some(')') => {
                        *pos += 1;
                        return Ok(Shape::Node(children));
                    }
                    other => {
                        return Err(Error::Parse(format!(
                            "expected `,` or `)` at {}, found {other:?}",
                            *pos
                        )))
                    }
                }
            }
        }
        other => Err(Error::Parse(format!(
            "expected `•` or `(` at {}, found {other:?}",
            *pos
        ))),
    }
}

impl fmt::Display for DaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(s: &Shape, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match s {
                Shape::Leaf => write!(f, "•"),
                Shape::Node(ch) => {
                    write!(f, "(")?;
                    for (i, c) in ch.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        go(c, f)?;
                    }
                    write!(f, ")")
                }
            }
        }
        go(&self.root, f)
    }
}

/// An internal node located by its slot word from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeLabel {
    /// Slots taken from the root, 1-based.
    pub word: Vec<u8>,
    pub label: i64,
}

/// Labels of a tree under a step set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    /// Internal nodes in preorder.
    pub internal: Vec<NodeLabel>,
    /// Positions of external nodes, left to right.
    pub external: Vec<i64>,
}

/// Natural embedding: the root is at 0 and the child in slot `l` of a node at
/// `j` sits at `j + b_l`.
pub fn embed(tree: &DaryTree, steps: &StepSet) -> Result<Embedding> {
    tree.check_steps(steps)?;
    let mut out = Embedding {
        internal: Vec::with_capacity(tree.size()),
        external: Vec::with_capacity(tree.external_count()),
    };
    let mut word = Vec::new();
    walk_embed(&tree.root, 0, steps, &mut word, &mut out);
    Ok(out)
}

fn walk_embed(s: &Shape, label: i64, steps: &StepSet, word: &mut Vec<u8>, out: &mut Embedding) {
    match s {
        Shape::Leaf => out.external.push(label),
        Shape::Node(ch) => {
            out.internal.push(NodeLabel {
                word: word.clone(),
                label,
            });
            for (slot, c) in ch.iter().enumerate() {
                word.push(slot as u8 + 1);
                walk_embed(c, label + steps.increment(slot), steps, word, out);
                word.pop();
            }
        }
    }
}

/// Number of internal nodes at each label.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelHistogram {
    pub counts: BTreeMap<i64, usize>,
}

impl LabelHistogram {
    pub fn count(&self, label: i64) -> usize {
        self.counts.get(&label).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Largest label present; `None` stands for minus infinity (empty tree).
    pub fn max_label(&self) -> Option<i64> {
        self.counts.keys().next_back().copied()
    }
}

pub fn label_histogram(tree: &DaryTree, steps: &StepSet) -> Result<LabelHistogram> {
    tree.check_steps(steps)?;
    let mut h = LabelHistogram::default();
    fn go(s: &Shape, label: i64, steps: &StepSet, h: &mut LabelHistogram) {
        if let Shape::Node(ch) = s {
            *h.counts.entry(label).or_insert(0) += 1;
            for (slot, c) in ch.iter().enumerate() {
                go(c, label + steps.increment(slot), steps, h);
            }
        }
    }
    go(&tree.root, 0, steps, &mut h);
    Ok(h)
}

/// Largest internal label, or `None` for the empty tree.
pub fn max_label(tree: &DaryTree, steps: &StepSet) -> Result<Option<i64>> {
    Ok(label_histogram(tree, steps)?.max_label())
}

/// Edge-type counts `(m_1, ..., m_d)` along a root-to-leaf path; `m_l`
/// counts edges into slot `l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DepthProfile(pub Vec<u32>);

impl DepthProfile {
    pub fn depth(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// `sum_l (l-1) m_l` with 1-based `l`: how far the edge types push the
    /// leaf index to the right.
    pub fn weighted_shift(&self) -> u64 {
        self.0.iter().enumerate().map(|(i, &m)| i as u64 * m as u64).sum()
    }
}

impl fmt::Display for DepthProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// External nodes numbered left to right, each with its depth profile.
pub fn leaf_profiles(tree: &DaryTree) -> Vec<(usize, DepthProfile)> {
    let mut out = Vec::with_capacity(tree.external_count());
    let mut counts = vec![0u32; tree.arity];
    fn go(s: &Shape, counts: &mut Vec<u32>, out: &mut Vec<(usize, DepthProfile)>) {
        match s {
            Shape::Leaf => {
                let idx = out.len();
                out.push((idx, DepthProfile(counts.clone())));
            }
            Shape::Node(ch) => {
                for (slot, c) in ch.iter().enumerate() {
                    counts[slot] += 1;
                    go(c, counts, out);
                    counts[slot] -= 1;
                }
            }
        }
    }
    go(&tree.root, &mut counts, &mut out);
    out
}
