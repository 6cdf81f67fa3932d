//! Canonical unlabeled rooted strictly r-furcating tree shapes.
//!
//! Every internal node has exactly `r` children, held in a fixed canonical
//! order (leaf count ascending, then serialization text), so two isomorphic
//! trees are representationally identical and shape equality is plain value
//! equality. Shapes are immutable after construction and cheap to clone;
//! identical subtrees may share storage.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// A rooted tree prior to canonical ordering, as produced by a parser or a
/// test that shuffles children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawTree {
    Leaf,
    Internal(Vec<RawTree>),
}

impl RawTree {
    pub fn leaf() -> Self {
        RawTree::Leaf
    }

    pub fn internal(children: Vec<RawTree>) -> Self {
        RawTree::Internal(children)
    }
}

#[derive(Debug)]
pub(crate) struct ShapeNode {
    /// Empty for a leaf, exactly `r` entries for an internal node.
    pub(crate) children: Vec<Arc<ShapeNode>>,
    /// Number of leaves in the subtree rooted here.
    pub(crate) leaves: u64,
    /// Canonical serialization of this subtree, without the trailing ';'.
    pub(crate) text: String,
}

impl ShapeNode {
    fn leaf() -> Arc<Self> {
        Arc::new(ShapeNode {
            children: Vec::new(),
            leaves: 1,
            text: "*".to_string(),
        })
    }

    fn internal(mut children: Vec<Arc<ShapeNode>>) -> Arc<Self> {
        children.sort_by(|a, b| {
            a.leaves
                .cmp(&b.leaves)
                .then_with(|| a.text.as_bytes().cmp(b.text.as_bytes()))
        });
        let leaves = children.iter().map(|c| c.leaves).sum();
        let mut text =
            String::with_capacity(2 + children.iter().map(|c| c.text.len() + 1).sum::<usize>());
        text.push('(');
        for (i, c) in children.iter().enumerate() {
            if i > 0 {
                text.push(',');
            }
            text.push_str(&c.text);
        }
        text.push(')');
        Arc::new(ShapeNode {
            children,
            leaves,
            text,
        })
    }

    pub(crate) fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Structural statistics of a shape: the multiset of descendant-leaf counts
/// `m(v)` over internal nodes `v`, and the height (number of internal nodes
/// on a longest root-to-leaf path).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeStats {
    /// Non-decreasing; one entry per internal node.
    pub m_values: Vec<u64>,
    pub height: u64,
}

/// A canonical unlabeled strictly r-furcating rooted tree shape.
#[derive(Clone)]
pub struct TreeShape {
    arity: u32,
    root: Arc<ShapeNode>,
}

impl TreeShape {
    /// The single-leaf shape for the given arity.
    pub fn leaf(arity: u32) -> Result<Self> {
        if arity < 2 {
            return Err(Error::InvalidArity(arity));
        }
        Ok(TreeShape {
            arity,
            root: ShapeNode::leaf(),
        })
    }

    /// Joins exactly `r` subtrees of shared arity `r` under a new root.
    pub fn compose(subtrees: &[TreeShape]) -> Result<Self> {
        let first = subtrees.first().ok_or(Error::WrongSubtreeCount {
            expected: 2,
            got: 0,
        })?;
        let arity = first.arity;
        for t in subtrees {
            if t.arity != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    got: t.arity,
                });
            }
        }
        if subtrees.len() != arity as usize {
            return Err(Error::WrongSubtreeCount {
                expected: arity,
                got: subtrees.len(),
            });
        }
        let children = subtrees.iter().map(|t| Arc::clone(&t.root)).collect();
        Ok(TreeShape {
            arity,
            root: ShapeNode::internal(children),
        })
    }

    /// Canonical form of a raw tree: children recursively sorted by
    /// (leaf count, serialization text). Idempotent on canonical input.
    pub fn canonicalize(raw: &RawTree, arity: u32) -> Result<Self> {
        if arity < 2 {
            return Err(Error::InvalidArity(arity));
        }
        fn build(raw: &RawTree, arity: u32) -> Result<Arc<ShapeNode>> {
            match raw {
                RawTree::Leaf => Ok(ShapeNode::leaf()),
                RawTree::Internal(children) => {
                    if children.len() != arity as usize {
                        return Err(Error::WrongChildCount {
                            expected: arity,
                            got: children.len(),
                        });
                    }
                    let built = children
                        .iter()
                        .map(|c| build(c, arity))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(ShapeNode::internal(built))
                }
            }
        }
        Ok(TreeShape {
            arity,
            root: build(raw, arity)?,
        })
    }

    /// Parses the shape grammar `node ';'` with `node := '*' | '(' node (',' node)+ ')'`,
    /// requiring exactly `r` children per internal node. Whitespace is ignored.
    pub fn parse(text: &str, arity: u32) -> Result<Self> {
        let raw = parse_raw(text)?;
        TreeShape::canonicalize(&raw, arity)
    }

    /// Canonical serialization, e.g. `(*,(*,*,*),(*,*,*));`.
    pub fn to_text(&self) -> String {
        let mut s = self.root.text.clone();
        s.push(';');
        s
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    /// Number of leaves n.
    pub fn leaf_count(&self) -> u64 {
        self.root.leaves
    }

    /// Number of internal nodes w = (n - 1) / (r - 1).
    pub fn internal_count(&self) -> u64 {
        (self.root.leaves - 1) / (self.arity as u64 - 1)
    }

    pub fn is_leaf(&self) -> bool {
        self.root.is_leaf()
    }

    /// Root subtrees as shapes, in canonical order. Empty for a leaf.
    pub fn children(&self) -> Vec<TreeShape> {
        self.root
            .children
            .iter()
            .map(|c| TreeShape {
                arity: self.arity,
                root: Arc::clone(c),
            })
            .collect()
    }

    /// Leaf counts of the root subtrees, in canonical (non-decreasing) order.
    pub fn root_child_sizes(&self) -> Vec<u64> {
        self.root.children.iter().map(|c| c.leaves).collect()
    }

    /// The multiset of m(v) over internal nodes plus the tree height.
    pub fn node_stats(&self) -> NodeStats {
        fn walk(node: &ShapeNode, out: &mut Vec<u64>) -> u64 {
            if node.is_leaf() {
                return 0;
            }
            out.push(node.leaves);
            1 + node
                .children
                .iter()
                .map(|c| walk(c, out))
                .max()
                .unwrap_or(0)
        }
        let mut m_values = Vec::new();
        let height = walk(&self.root, &mut m_values);
        m_values.sort_unstable();
        NodeStats { m_values, height }
    }

    /// True iff n is a power of r and every internal node's r subtrees are
    /// identical shapes.
    pub fn is_fully_symmetric(&self) -> bool {
        fn sym(node: &ShapeNode) -> bool {
            if node.is_leaf() {
                return true;
            }
            let first = &node.children[0];
            node.children.iter().all(|c| c.text == first.text) && sym(first)
        }
        is_power_of(self.leaf_count(), self.arity as u64) && sym(&self.root)
    }

    /// Parent links over internal nodes in preorder: entry i is the preorder
    /// index of the nearest internal ancestor of internal node i (root first,
    /// `None` for the root). Used by brute-force history enumeration.
    pub fn internal_parents(&self) -> Vec<Option<usize>> {
        fn walk(node: &ShapeNode, parent: Option<usize>, out: &mut Vec<Option<usize>>) {
            if node.is_leaf() {
                return;
            }
            let idx = out.len();
            out.push(parent);
            for c in &node.children {
                walk(c, Some(idx), out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, None, &mut out);
        out
    }

    /// Structure with unordered children, for shuffle tests.
    pub fn to_raw(&self) -> RawTree {
        fn walk(node: &ShapeNode) -> RawTree {
            if node.is_leaf() {
                RawTree::Leaf
            } else {
                RawTree::Internal(node.children.iter().map(|c| walk(c)).collect())
            }
        }
        walk(&self.root)
    }

    pub(crate) fn root_node(&self) -> &Arc<ShapeNode> {
        &self.root
    }
}

pub(crate) fn is_power_of(mut n: u64, base: u64) -> bool {
    debug_assert!(base >= 2);
    while n > 1 {
        if !n.is_multiple_of(base) {
            return false;
        }
        n /= base;
    }
    n == 1
}

impl PartialEq for TreeShape {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.root.text == other.root.text
    }
}

impl Eq for TreeShape {}

impl PartialOrd for TreeShape {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TreeShape {
    fn cmp(&self, other: &Self) -> Ordering {
        self.arity
            .cmp(&other.arity)
            .then_with(|| self.root.text.as_bytes().cmp(other.root.text.as_bytes()))
    }
}

impl Hash for TreeShape {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.arity.hash(state);
        self.root.text.hash(state);
    }
}

impl fmt::Display for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.root.text)
    }
}

impl fmt::Debug for TreeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeShape(r={}, {};)", self.arity, self.root.text)
    }
}

fn parse_raw(text: &str) -> Result<RawTree> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;

    fn skip_ws(bytes: &[u8], pos: &mut usize) {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    }

    fn node(bytes: &[u8], pos: &mut usize) -> Result<RawTree> {
        skip_ws(bytes, pos);
        match bytes.get(*pos) {
            Some(b'*') => {
                *pos += 1;
                Ok(RawTree::Leaf)
            }
            Some(b'(') => {
                *pos += 1;
                let mut children = vec![node(bytes, pos)?];
                loop {
                    skip_ws(bytes, pos);
                    match bytes.get(*pos) {
                        Some(b',') => {
                            *pos += 1;
                            children.push(node(bytes, pos)?);
                        }
                        Some(b')') => {
                            *pos += 1;
                            return Ok(RawTree::Internal(children));
                        }
                        Some(other) => {
                            return Err(Error::Parse {
                                pos: *pos,
                                msg: format!("expected ',' or ')', found {:?}", *other as char),
                            });
                        }
                        None => {
                            return Err(Error::Parse {
                                pos: *pos,
                                msg: "unclosed '('".to_string(),
                            });
                        }
                    }
                }
            }
            Some(other) => Err(Error::Parse {
                pos: *pos,
                msg: format!("expected '*' or '(', found {:?}", *other as char),
            }),
            None => Err(Error::Parse {
                pos: *pos,
                msg: "unexpected end of input".to_string(),
            }),
        }
    }

    let tree = node(bytes, &mut pos)?;
    skip_ws(bytes, &mut pos);
    match bytes.get(pos) {
        Some(b';') => {
            pos += 1;
        }
        _ => {
            return Err(Error::Parse {
                pos,
                msg: "expected ';'".to_string(),
            });
        }
    }
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(Error::Parse {
            pos,
            msg: "trailing input after ';'".to_string(),
        });
    }
    Ok(tree)
}
