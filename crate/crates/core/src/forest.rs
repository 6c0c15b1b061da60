//! Predecessor forests and their closed windows.
//!
//! A [`PredecessorForest`] is a regressive map on the nodes `1..N`: every
//! node other than the root `0` points at a strictly smaller node. Walking
//! the map from any node therefore ends at the root, and the set of nodes
//! pointing at a given node (its successor fiber) always lies above it.
//!
//! A [`Window`] is a finite set of nodes closed under the predecessor map.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CascadeError, Result};

/// A node of the truncated universe `0..N`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for NodeId {
    fn from(value: u32) -> Self {
        NodeId(value)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, PartialEq, Eq)]
struct ForestData {
    // pred[0] is a placeholder; the root has no predecessor.
    pred: Vec<NodeId>,
    children: Vec<Vec<NodeId>>,
}

/// A total regressive predecessor map on `1..N` with root `0`.
///
/// Cloning is cheap: the map is shared behind an `Arc`, so windows and
/// automorphisms can carry their forest around.
#[derive(Clone)]
pub struct PredecessorForest {
    inner: Arc<ForestData>,
}

impl PartialEq for PredecessorForest {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner == other.inner
    }
}

impl Eq for PredecessorForest {}

impl fmt::Debug for PredecessorForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries((1..self.universe_size()).map(|k| (k, self.inner.pred[k].0)))
            .finish()
    }
}

impl PredecessorForest {
    /// Builds a forest from `parents[k] = pred(k + 1)`, so the universe has
    /// `parents.len() + 1` nodes.
    pub fn from_parents(parents: &[u32]) -> Result<Self> {
        let n = parents.len() + 1;
        let mut pred = Vec::with_capacity(n);
        pred.push(NodeId::ROOT);
        for (k, &p) in parents.iter().enumerate() {
            let node = k as u32 + 1;
            if p >= node {
                return Err(CascadeError::domain(format!(
                    "predecessor map is not regressive: pred({node}) = {p}"
                )));
            }
            pred.push(NodeId(p));
        }
        Ok(Self::from_checked(pred))
    }

    /// Builds a forest from explicit `(node, pred(node))` pairs. Every node
    /// in `1..universe_size` must appear exactly once.
    pub fn new(universe_size: usize, pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        if universe_size == 0 {
            return Err(CascadeError::domain("universe must contain the root"));
        }
        let mut parents: Vec<Option<u32>> = vec![None; universe_size - 1];
        for (node, p) in pairs {
            if node == 0 || node as usize >= universe_size {
                return Err(CascadeError::domain(format!(
                    "node {node} has no predecessor slot in a universe of size {universe_size}"
                )));
            }
            let slot = &mut parents[node as usize - 1];
            if slot.is_some() {
                return Err(CascadeError::domain(format!(
                    "predecessor of {node} given twice"
                )));
            }
            *slot = Some(p);
        }
        let parents = parents
            .into_iter()
            .enumerate()
            .map(|(k, p)| {
                p.ok_or_else(|| CascadeError::domain(format!("predecessor of {} missing", k + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parents(&parents)
    }

    /// Every nonzero node points at the root.
    pub fn star(universe_size: usize) -> Result<Self> {
        Self::new(universe_size, (1..universe_size as u32).map(|k| (k, 0)))
    }

    /// `pred(k) = k - 1`.
    pub fn chain(universe_size: usize) -> Result<Self> {
        Self::new(universe_size, (1..universe_size as u32).map(|k| (k, k - 1)))
    }

    /// Samples `pred(k)` uniformly from `0..k` for each `k`, deterministically
    /// from `seed`.
    pub fn random(universe_size: usize, seed: u64) -> Result<Self> {
        if universe_size == 0 {
            return Err(CascadeError::domain(
                "random forest needs at least one node",
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self::random_with(universe_size, &mut rng))
    }

    pub(crate) fn random_with<R: Rng>(universe_size: usize, rng: &mut R) -> Self {
        let mut pred = Vec::with_capacity(universe_size);
        pred.push(NodeId::ROOT);
        for k in 1..universe_size as u32 {
            pred.push(NodeId(rng.random_range(0..k)));
        }
        Self::from_checked(pred)
    }

    fn from_checked(pred: Vec<NodeId>) -> Self {
        let mut children = vec![Vec::new(); pred.len()];
        for (k, p) in pred.iter().enumerate().skip(1) {
            children[p.index()].push(NodeId(k as u32));
        }
        PredecessorForest {
            inner: Arc::new(ForestData { pred, children }),
        }
    }

    pub fn universe_size(&self) -> usize {
        self.inner.pred.len()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.index() < self.universe_size()
    }

    fn check(&self, node: NodeId) -> Result<()> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(CascadeError::domain(format!(
                "node {node} outside universe of size {}",
                self.universe_size()
            )))
        }
    }

    /// `None` for the root and for nodes outside the universe.
    pub fn pred(&self, node: NodeId) -> Option<NodeId> {
        if node == NodeId::ROOT || !self.contains(node) {
            None
        } else {
            Some(self.inner.pred[node.index()])
        }
    }

    /// The fiber `{η : pred(η) = ξ}`, in ascending order.
    pub fn successors(&self, node: NodeId) -> Result<&[NodeId]> {
        self.check(node)?;
        Ok(&self.inner.children[node.index()])
    }

    /// Same as [`successors`](Self::successors) for nodes already known to be in range.
    pub(crate) fn children(&self, node: NodeId) -> &[NodeId] {
        &self.inner.children[node.index()]
    }

    /// Smallest pred-closed superset of `nodes`.
    pub fn rho_closure(&self, nodes: impl IntoIterator<Item = NodeId>) -> Result<Window> {
        let mut seen = vec![false; self.universe_size()];
        for node in nodes {
            self.check(node)?;
            let mut cur = node;
            while !seen[cur.index()] {
                seen[cur.index()] = true;
                match self.pred(cur) {
                    Some(p) => cur = p,
                    None => break,
                }
            }
        }
        let nodes = seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(k, _)| NodeId(k as u32))
            .collect();
        Ok(Window {
            forest: self.clone(),
            nodes,
        })
    }

    pub fn is_rho_closed(&self, nodes: impl IntoIterator<Item = NodeId>) -> Result<bool> {
        let set: BTreeSet<NodeId> = nodes.into_iter().collect();
        for &node in &set {
            self.check(node)?;
        }
        Ok(set
            .iter()
            .all(|&node| self.pred(node).is_none_or(|p| set.contains(&p))))
    }

    /// Wraps `nodes` as a window, rejecting sets that are not closed.
    pub fn window(&self, nodes: impl IntoIterator<Item = NodeId>) -> Result<Window> {
        let set: BTreeSet<NodeId> = nodes.into_iter().collect();
        if !self.is_rho_closed(set.iter().copied())? {
            return Err(CascadeError::domain(format!(
                "node set {:?} is not closed under the predecessor map",
                set.iter().map(|n| n.0).collect::<Vec<_>>()
            )));
        }
        Ok(Window {
            forest: self.clone(),
            nodes: set.into_iter().collect(),
        })
    }

    /// The whole universe as a window.
    pub fn full_window(&self) -> Window {
        Window {
            forest: self.clone(),
            nodes: (0..self.universe_size() as u32).map(NodeId).collect(),
        }
    }

    pub fn empty_window(&self) -> Window {
        Window {
            forest: self.clone(),
            nodes: Vec::new(),
        }
    }

    /// Two nodes `β ≠ γ` outside the closed set `a` such that `γ` is not a
    /// successor of `β` and no successor of `β` lies in `a`.
    ///
    /// Picks the two least nodes `γ < β` outside `a ∪ pred[a]`; returns
    /// `(β, γ)`. Fails with [`CascadeError::Capacity`] when the truncated
    /// universe has fewer than two such nodes.
    pub fn fresh_separation(&self, a: &Window) -> Result<(NodeId, NodeId)> {
        self.check_same(a)?;
        let mut blocked = vec![false; self.universe_size()];
        for &node in a.nodes() {
            blocked[node.index()] = true;
            if let Some(p) = self.pred(node) {
                blocked[p.index()] = true;
            }
        }
        let mut free = (0..self.universe_size() as u32)
            .map(NodeId)
            .filter(|n| !blocked[n.index()]);
        match (free.next(), free.next()) {
            (Some(gamma), Some(beta)) => Ok((beta, gamma)),
            _ => Err(CascadeError::Capacity(format!(
                "universe of size {} has fewer than two nodes outside the support {a}",
                self.universe_size()
            ))),
        }
    }

    pub(crate) fn check_same(&self, w: &Window) -> Result<()> {
        if &w.forest == self {
            Ok(())
        } else {
            Err(CascadeError::domain("window belongs to a different forest"))
        }
    }

    /// Line-oriented text form: `N`, then `node pred` for every nonzero node.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.universe_size());
        for k in 1..self.universe_size() {
            out.push_str(&format!("{} {}\n", k, self.inner.pred[k].0));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (first_line, header) = lines
            .next()
            .ok_or_else(|| CascadeError::parse(1, "missing universe size"))?;
        let n: usize = header.parse().map_err(|_| {
            CascadeError::parse(first_line, format!("bad universe size `{header}`"))
        })?;
        if n == 0 {
            return Err(CascadeError::parse(
                first_line,
                "universe size must be at least 1",
            ));
        }
        let mut parents: Vec<Option<u32>> = vec![None; n - 1];
        for (line, text) in lines {
            let fields: Vec<&str> = text.split_whitespace().collect();
            let [node, pred] = fields[..] else {
                return Err(CascadeError::parse(line, "expected `node pred`"));
            };
            let node: u32 = node
                .parse()
                .map_err(|_| CascadeError::parse(line, format!("bad node `{node}`")))?;
            let pred: u32 = pred
                .parse()
                .map_err(|_| CascadeError::parse(line, format!("bad predecessor `{pred}`")))?;
            if node == 0 || node as usize >= n {
                return Err(CascadeError::parse(
                    line,
                    format!("node {node} out of range 1..{n}"),
                ));
            }
            if pred >= node {
                return Err(CascadeError::parse(
                    line,
                    format!("pred({node}) = {pred} is not below {node}"),
                ));
            }
            let slot = &mut parents[node as usize - 1];
            if slot.replace(pred).is_some() {
                return Err(CascadeError::parse(
                    line,
                    format!("node {node} listed twice"),
                ));
            }
        }
        if let Some(k) = parents.iter().position(Option::is_none) {
            return Err(CascadeError::parse(
                text.lines().count(),
                format!("predecessor of node {} missing", k + 1),
            ));
        }
        Self::from_parents(&parents.into_iter().map(Option::unwrap).collect::<Vec<_>>())
    }
}

impl FromStr for PredecessorForest {
    type Err = CascadeError;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

/// A finite set of nodes closed under the predecessor map, in ascending order.
#[derive(Clone, PartialEq, Eq)]
pub struct Window {
    forest: PredecessorForest,
    nodes: Vec<NodeId>,
}

impl Window {
    pub fn forest(&self) -> &PredecessorForest {
        &self.forest
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }

    /// Position of `node` in the ascending order of the window.
    pub fn position(&self, node: NodeId) -> Option<usize> {
        self.nodes.binary_search(&node).ok()
    }

    pub fn is_subset(&self, other: &Window) -> bool {
        self.nodes.iter().all(|&n| other.contains(n))
    }

    /// Union of two windows of the same forest; closed again.
    pub fn union(&self, other: &Window) -> Result<Window> {
        self.forest.check_same(other)?;
        let nodes: BTreeSet<NodeId> = self.nodes.iter().chain(&other.nodes).copied().collect();
        Ok(Window {
            forest: self.forest.clone(),
            nodes: nodes.into_iter().collect(),
        })
    }
}

impl fmt::Debug for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.nodes.iter().map(|n| n.0))
            .finish()
    }
}

/// Sorted decimal list, space separated.
impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node_list(f, &self.nodes)
    }
}

pub(crate) fn write_node_list(f: &mut impl fmt::Write, nodes: &[NodeId]) -> fmt::Result {
    for (k, n) in nodes.iter().enumerate() {
        if k > 0 {
            f.write_char(' ')?;
        }
        write!(f, "{n}")?;
    }
    Ok(())
}

/// Parses `"3,5"`, `"3 5"` or `""` into nodes.
pub fn parse_node_list(text: &str) -> Result<Vec<NodeId>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u32>()
                .map(NodeId)
                .map_err(|_| CascadeError::parse(1, format!("bad node `{t}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<NodeId> {
        v.iter().copied().map(NodeId).collect()
    }

    fn fork3() -> PredecessorForest {
        PredecessorForest::new(4, [(1, 0), (2, 0), (3, 1)]).unwrap()
    }

    #[test]
    fn successors_read_the_fiber() {
        let f = fork3();
        assert_eq!(f.successors(NodeId(0)).unwrap(), ids(&[1, 2]).as_slice());
        assert!(f.successors(NodeId(3)).unwrap().is_empty());
        let chain = PredecessorForest::chain(4).unwrap();
        assert_eq!(chain.successors(NodeId(1)).unwrap(), ids(&[2]).as_slice());
        assert!(matches!(
            f.successors(NodeId(4)),
            Err(CascadeError::Domain(_))
        ));
    }

    #[test]
    fn closure_examples() {
        let f = fork3();
        assert_eq!(
            f.rho_closure(ids(&[3])).unwrap().nodes(),
            ids(&[0, 1, 3]).as_slice()
        );
        assert!(f.rho_closure([]).unwrap().is_empty());
        let chain = PredecessorForest::chain(3).unwrap();
        assert_eq!(
            chain.rho_closure(ids(&[2, 1])).unwrap().nodes(),
            ids(&[0, 1, 2]).as_slice()
        );
        assert!(f.rho_closure(ids(&[9])).is_err());
    }

    #[test]
    fn closedness_examples() {
        let f = PredecessorForest::star(3).unwrap();
        assert!(f.is_rho_closed(ids(&[0, 1])).unwrap());
        assert!(!f.is_rho_closed(ids(&[1])).unwrap());
        assert!(f.is_rho_closed([]).unwrap());
        assert!(f.window(ids(&[1])).is_err());
    }

    #[test]
    fn fresh_separation_examples() {
        let f = PredecessorForest::star(6).unwrap();
        let a = f.window(ids(&[0])).unwrap();
        assert_eq!(f.fresh_separation(&a).unwrap(), (NodeId(2), NodeId(1)));

        let g = PredecessorForest::new(5, [(1, 0), (2, 0), (3, 1), (4, 0)]).unwrap();
        let a = g.window(ids(&[0, 1, 3])).unwrap();
        assert_eq!(g.fresh_separation(&a).unwrap(), (NodeId(4), NodeId(2)));

        let full = g.full_window();
        assert!(matches!(
            g.fresh_separation(&full),
            Err(CascadeError::Capacity(_))
        ));
    }

    #[test]
    fn random_forest_is_deterministic_and_regressive() {
        let one = PredecessorForest::random(1, 3).unwrap();
        assert_eq!(one.universe_size(), 1);
        let two = PredecessorForest::random(2, 99).unwrap();
        assert_eq!(two.pred(NodeId(1)), Some(NodeId(0)));
        assert_eq!(
            PredecessorForest::random(5, 7).unwrap(),
            PredecessorForest::random(5, 7).unwrap()
        );
        assert!(PredecessorForest::random(0, 7).is_err());
    }

    #[test]
    fn text_round_trip_and_errors() {
        let f = PredecessorForest::random(9, 4).unwrap();
        assert_eq!(PredecessorForest::parse_text(&f.to_text()).unwrap(), f);

        let err = PredecessorForest::parse_text("3\n1 0\n2 2\n").unwrap_err();
        assert_eq!(err, CascadeError::parse(3, "pred(2) = 2 is not below 2"));
        assert!(matches!(
            PredecessorForest::parse_text("3\n1 0\n"),
            Err(CascadeError::Parse { .. })
        ));
        assert!(matches!(
            PredecessorForest::parse_text("x\n"),
            Err(CascadeError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn windows_display_sorted() {
        let f = fork3();
        let w = f.rho_closure(ids(&[3, 2])).unwrap();
        assert_eq!(w.to_string(), "0 1 2 3");
        assert_eq!(parse_node_list("3, 5 7").unwrap(), ids(&[3, 5, 7]));
        assert!(parse_node_list("").unwrap().is_empty());
    }
}
