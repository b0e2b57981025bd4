use super::{DaryTree, Shape};
use crate::error::{Error, Result};

/// Order in which the subtree-size compositions of a node are visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompositionOrder {
    /// `(0, .., 0, n-1)` first, `(n-1, 0, .., 0)` last.
    #[default]
    Lex,
    /// The reverse of `Lex`.
    ReverseLex,
}

/// Largest size `enumerate_trees` accepts without an explicit cap.
pub fn default_cap(arity: usize) -> usize {
    match arity {
        0..=2 => 16,
        3 => 12,
        4 => 9,
        _ => 7,
    }
}

/// Every `arity`-ary tree with `size` internal nodes, exactly once, in
/// lexicographic composition order. Sizes above [`default_cap`] are refused.
pub fn enumerate_trees(arity: usize, size: usize) -> Result<TreeEnumerator> {
    TreeEnumerator::new(arity, size, default_cap(arity), CompositionOrder::Lex)
}

/// Streaming enumerator over all trees of one size.
///
/// Trees are produced by an odometer over the tree: the subtree-size
/// composition at the root varies slowest, and within a composition the
/// first child varies slowest. Advancing never allocates more than one tree.
#[derive(Debug, Clone)]
pub struct TreeEnumerator {
    arity: usize,
    order: CompositionOrder,
    current: Option<Shape>,
    fixed_root: bool,
}

impl TreeEnumerator {
    pub fn new(arity: usize, size: usize, cap: usize, order: CompositionOrder) -> Result<Self> {
        check(arity, size, cap)?;
        Ok(TreeEnumerator {
            arity,
            order,
            current: Some(first(arity, size, order)),
            fixed_root: false,
        })
    }

    /// Only the trees whose root children have the given sizes. The
    /// partitions over all compositions of `size - 1` cover every tree once.
    pub fn with_root_sizes(arity: usize, sizes: &[usize], cap: usize, order: CompositionOrder) -> Result<Self> {
        if sizes.len() != arity {
            return Err(Error::InvalidArgument(format!(
                "{} root sizes for arity {arity}",
                sizes.len()
            )));
        }
        let size = 1 + sizes.iter().sum::<usize>();
        check(arity, size, cap)?;
        let root = Shape::Node(sizes.iter().map(|&s| first(arity, s, order)).collect());
        Ok(TreeEnumerator {
            arity,
            order,
            current: Some(root),
            fixed_root: true,
        })
    }

    /// All weak compositions of `total` into `parts` parts, in `Lex` order.
    pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if parts == 0 {
            return out;
        }
        let mut c = first_composition(total, parts, CompositionOrder::Lex);
        loop {
            out.push(c.clone());
            if !next_composition(&mut c, CompositionOrder::Lex) {
                return out;
            }
        }
    }
}

impl Iterator for TreeEnumerator {
    type Item = DaryTree;

    fn next(&mut self) -> Option<DaryTree> {
        let shape = self.current.as_mut()?;
        let out = DaryTree {
            arity: self.arity,
            root: shape.clone(),
        };
        let advanced = match shape {
            Shape::Node(ch) if self.fixed_root => advance_children(ch, self.order),
            _ => advance(shape, self.order),
        };
        if !advanced {
            self.current = None;
        }
        Some(out)
    }
}

fn check(arity: usize, size: usize, cap: usize) -> Result<()> {
    if arity < 2 {
        return Err(Error::InvalidArgument(format!(
            "enumeration needs arity >= 2, got {arity}"
        )));
    }
    if size > cap {
        return Err(Error::EnumerationCap { arity, size, cap });
    }
    Ok(())
}

fn first_composition(total: usize, parts: usize, order: CompositionOrder) -> Vec<usize> {
    let mut c = vec![0; parts];
    match order {
        CompositionOrder::Lex => c[parts - 1] = total,
        CompositionOrder::ReverseLex => c[0] = total,
    }
    c
}

/// Steps `c` to its successor; leaves it untouched and returns false at the end.
fn next_composition(c: &mut [usize], order: CompositionOrder) -> bool {
    let d = c.len();
    match order {
        CompositionOrder::Lex => {
            // raise the entry just before the last nonzero tail entry
            let Some(p) = (1..d).rev().find(|&k| c[k] > 0) else {
                return false;
            };
            let i = p - 1;
            let tail: usize = c[i + 1..].iter().sum();
            c[i] += 1;
            for x in &mut c[i + 1..] {
                *x = 0;
            }
            c[d - 1] = tail - 1;
            true
        }
        CompositionOrder::ReverseLex => {
            let Some(i) = (0..d.saturating_sub(1)).rev().find(|&k| c[k] > 0) else {
                return false;
            };
            let tail: usize = c[i + 1..].iter().sum();
            c[i] -= 1;
            for x in &mut c[i + 1..] {
                *x = 0;
            }
            c[i + 1] = tail + 1;
            true
        }
    }
}

fn first(arity: usize, size: usize, order: CompositionOrder) -> Shape {
    if size == 0 {
        return Shape::Leaf;
    }
    let comp = first_composition(size - 1, arity, order);
    Shape::Node(comp.into_iter().map(|s| first(arity, s, order)).collect())
}

fn advance(shape: &mut Shape, order: CompositionOrder) -> bool {
    let Shape::Node(children) = shape else {
        return false;
    };
    if advance_children(children, order) {
        return true;
    }
    let mut sizes: Vec<usize> = children.iter().map(Shape::size).collect();
    if !next_composition(&mut sizes, order) {
        return false;
    }
    let arity = children.len();
    for (c, s) in children.iter_mut().zip(sizes) {
        *c = first(arity, s, order);
    }
    true
}

fn advance_children(children: &mut [Shape], order: CompositionOrder) -> bool {
    let arity = children.len();
    for i in (0..arity).rev() {
        if advance(&mut children[i], order) {
            for c in &mut children[i + 1..] {
                let s = c.size();
                *c = first(arity, s, order);
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// d-ary trees of size n: binom(dn, n) / ((d-1)n + 1), by exact integers.
    fn fuss_catalan(d: u64, n: u64) -> u64 {
        let mut b: u128 = 1;
        for i in 0..n {
            b = b * (d * n - i) as u128 / (i + 1) as u128;
        }
        (b / ((d - 1) * n + 1) as u128) as u64
    }

    #[test]
    fn ternary_small_counts() {
        assert_eq!(enumerate_trees(3, 0).unwrap().count(), 1);
        assert_eq!(enumerate_trees(3, 2).unwrap().count(), 3);
        assert_eq!(enumerate_trees(3, 5).unwrap().count(), 273);
    }

    #[test]
    fn counts_match_fuss_catalan() {
        for (d, max) in [(2usize, 9usize), (3, 7), (4, 5), (5, 4)] {
            for n in 0..=max {
                let trees: Vec<_> = enumerate_trees(d, n).unwrap().collect();
                assert_eq!(trees.len() as u64, fuss_catalan(d as u64, n as u64), "d={d} n={n}");
                let distinct: HashSet<_> = trees.iter().collect();
                assert_eq!(distinct.len(), trees.len());
                assert!(trees.iter().all(|t| t.size() == n));
            }
        }
    }

    #[test]
    fn reverse_order_enumerates_same_set() {
        let a: HashSet<_> = enumerate_trees(3, 5).unwrap().collect();
        let b: HashSet<_> = TreeEnumerator::new(3, 5, 12, CompositionOrder::ReverseLex)
            .unwrap()
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn root_partitions_cover_everything() {
        let total: usize = TreeEnumerator::compositions(4, 3)
            .iter()
            .map(|c| {
                TreeEnumerator::with_root_sizes(3, c, 12, CompositionOrder::Lex)
                    .unwrap()
                    .count()
            })
            .sum();
        assert_eq!(total, 273);
    }

    #[test]
    fn first_tree_is_right_chain() {
        let first = enumerate_trees(3, 3).unwrap().next().unwrap();
        assert_eq!(first, DaryTree::chain(3, 2, 3));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_trees(3, 13),
            Err(Error::EnumerationCap {
                arity: 3,
                size: 13,
                cap: 12
            })
        ));
        assert!(TreeEnumerator::new(3, 9, 8, CompositionOrder::Lex).is_err());
    }

    #[test]
    fn compositions_in_lex_order() {
        assert_eq!(
            TreeEnumerator::compositions(2, 3),
            vec![
                vec![0, 0, 2],
                vec![0, 1, 1],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![1, 1, 0],
                vec![2, 0, 0]
            ]
        );
    }
}
