//! Vectors and matrices over F2 indexed by the nodes of a window, and the
//! star-span solver.
//!
//! The star of `ξ` inside a window `K` is `ξ` together with those successors
//! of `ξ` that lie in `K`. Ordering `K` so that every child comes before its
//! parent makes the matrix of star vectors upper triangular with unit
//! diagonal, so the stars form a basis of `F2^K` and any target vector is a
//! unique XOR of stars, found by back-substitution.
//!
//! Height convention: `forest_height(K, ξ)` is the length of the longest
//! descending child chain from `ξ` inside `K` (leaves of `K` have height 0).
//! Children always have strictly smaller height than their parent, so the
//! star ordering sorts by *ascending* height, ties broken by ascending node
//! id. That puts every child before its parent.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{CascadeError, Result};
use crate::forest::{write_node_list, NodeId, Window};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A bit vector indexed by the nodes of a window, in the window's ascending
/// node order.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Vector {
    window: Window,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(window: &Window) -> Self {
        F2Vector {
            window: window.clone(),
            words: vec![0; words_for(window.len())],
        }
    }

    /// `bits[k]` is the entry of the `k`-th smallest node of the window.
    pub fn from_bits(window: &Window, bits: &[bool]) -> Result<Self> {
        if bits.len() != window.len() {
            return Err(CascadeError::domain(format!(
                "vector of length {} does not match window of size {}",
                bits.len(),
                window.len()
            )));
        }
        let mut v = Self::zeros(window);
        for (k, &b) in bits.iter().enumerate() {
            if b {
                v.flip_pos(k);
            }
        }
        Ok(v)
    }

    /// Characteristic vector of `nodes`, which must all lie in the window.
    pub fn indicator(window: &Window, nodes: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut v = Self::zeros(window);
        for node in nodes {
            let pos = window.position(node).ok_or_else(|| {
                CascadeError::domain(format!("node {node} not in window {window}"))
            })?;
            v.set_pos(pos, true);
        }
        Ok(v)
    }

    /// Parses a 0/1 string in the window's ascending node order.
    pub fn parse_bits(window: &Window, text: &str) -> Result<Self> {
        let bits = text
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(CascadeError::parse(1, format!("bad bit `{c}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(window, &bits)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    pub fn get_pos(&self, pos: usize) -> bool {
        (self.words[pos / WORD] >> (pos % WORD)) & 1 == 1
    }

    pub fn set_pos(&mut self, pos: usize, value: bool) {
        let mask = 1u64 << (pos % WORD);
        if value {
            self.words[pos / WORD] |= mask;
        } else {
            self.words[pos / WORD] &= !mask;
        }
    }

    fn flip_pos(&mut self, pos: usize) {
        self.words[pos / WORD] ^= 1u64 << (pos % WORD);
    }

    pub fn get(&self, node: NodeId) -> Result<bool> {
        self.window
            .position(node)
            .map(|p| self.get_pos(p))
            .ok_or_else(|| CascadeError::domain(format!("node {node} not in window")))
    }

    pub fn xor_assign(&mut self, other: &F2Vector) -> Result<()> {
        if self.window != other.window {
            return Err(CascadeError::domain(
                "vectors are indexed by different windows",
            ));
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Nodes carrying a 1.
    pub fn support(&self) -> Vec<NodeId> {
        (0..self.len())
            .filter(|&k| self.get_pos(k))
            .map(|k| self.window.nodes()[k])
            .collect()
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len())
            .map(|k| if self.get_pos(k) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vector({:?} : {})", self.window, self.to_bit_string())
    }
}

/// A dense 0/1 matrix whose rows and columns are labelled by nodes.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: Vec<NodeId>,
    cols: Vec<NodeId>,
    data: Vec<Vec<u64>>,
}

impl F2Matrix {
    pub fn zeros(rows: Vec<NodeId>, cols: Vec<NodeId>) -> Self {
        let data = vec![vec![0; words_for(cols.len())]; rows.len()];
        F2Matrix { rows, cols, data }
    }

    pub fn row_order(&self) -> &[NodeId] {
        &self.rows
    }

    pub fn col_order(&self) -> &[NodeId] {
        &self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r][c / WORD] >> (c % WORD)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let mask = 1u64 << (c % WORD);
        if value {
            self.data[r][c / WORD] |= mask;
        } else {
            self.data[r][c / WORD] &= !mask;
        }
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols.len()
    }

    /// Every entry below the diagonal is 0 and every diagonal entry is 1.
    pub fn is_upper_unitriangular(&self) -> bool {
        self.is_square()
            && (0..self.rows.len()).all(|r| self.get(r, r) && (0..r).all(|c| !self.get(r, c)))
    }

    /// Solves `U x = rhs` for an upper triangular `U` by back-substitution.
    /// A zero on the diagonal is reported as a domain error.
    pub fn back_substitute(&self, rhs: &[bool]) -> Result<Vec<bool>> {
        let n = self.rows.len();
        if !self.is_square() || rhs.len() != n {
            return Err(CascadeError::domain(
                "back-substitution needs a square system",
            ));
        }
        let mut x = vec![false; n];
        for r in (0..n).rev() {
            if !self.get(r, r) {
                return Err(CascadeError::domain(format!("zero pivot at row {r}")));
            }
            let mut acc = rhs[r];
            for (c, &xc) in x.iter().enumerate().skip(r + 1) {
                acc ^= self.get(r, c) && xc;
            }
            x[r] = acc;
        }
        Ok(x)
    }

    /// First line lists the column node ordering; then one line of
    /// contiguous `0`/`1` characters per row.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_node_list(&mut out, &self.cols).expect("writing to a String");
        out.push('\n');
        for r in 0..self.rows.len() {
            for c in 0..self.cols.len() {
                out.push(if self.get(r, c) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Heights of all window nodes, indexed by window position.
fn heights(k: &Window) -> Vec<usize> {
    let forest = k.forest();
    let mut h = vec![0usize; k.len()];
    // children are larger than their parent, so a descending sweep sees
    // every child before the parent
    for pos in (0..k.len()).rev() {
        let node = k.nodes()[pos];
        h[pos] = forest
            .children(node)
            .iter()
            .filter_map(|&c| k.position(c))
            .map(|cp| h[cp] + 1)
            .max()
            .unwrap_or(0);
    }
    h
}

/// Length of the longest descending child chain from `node` inside `k`.
pub fn forest_height(k: &Window, node: NodeId) -> Result<usize> {
    let pos = k
        .position(node)
        .ok_or_else(|| CascadeError::domain(format!("node {node} not in window {k}")))?;
    Ok(heights(k)[pos])
}

/// Characteristic vector of `{ξ} ∪ (succ(ξ) ∩ K)`.
pub fn star_vector(k: &Window, node: NodeId) -> Result<F2Vector> {
    if !k.contains(node) {
        return Err(CascadeError::domain(format!(
            "node {node} not in window {k}"
        )));
    }
    let children = k
        .forest()
        .children(node)
        .iter()
        .copied()
        .filter(|&c| k.contains(c));
    F2Vector::indicator(k, std::iter::once(node).chain(children))
}

/// Window nodes sorted by ascending height, ties by ascending id. Every
/// child precedes its parent.
pub fn star_order(k: &Window) -> Vec<NodeId> {
    let h = heights(k);
    let mut order: Vec<(usize, NodeId)> = k
        .nodes()
        .iter()
        .enumerate()
        .map(|(p, &n)| (h[p], n))
        .collect();
    order.sort();
    order.into_iter().map(|(_, n)| n).collect()
}

/// The matrix whose column for `ξ` is the star vector of `ξ`, with rows and
/// columns both in [`star_order`].
pub fn star_matrix(k: &Window) -> Result<F2Matrix> {
    if k.is_empty() {
        return Err(CascadeError::domain("star matrix of an empty window"));
    }
    let order = star_order(k);
    let mut at = vec![0usize; k.len()];
    for (idx, &n) in order.iter().enumerate() {
        at[k.position(n).expect("ordered node is in window")] = idx;
    }
    let mut m = F2Matrix::zeros(order.clone(), order.clone());
    for (col, &node) in order.iter().enumerate() {
        m.set(col, col, true);
        for &child in k.forest().children(node) {
            if let Some(p) = k.position(child) {
                m.set(at[p], col, true);
            }
        }
    }
    Ok(m)
}

/// The unique set `S ⊆ K` whose star vectors XOR to `target`.
pub fn solve_star_span(k: &Window, target: &F2Vector) -> Result<BTreeSet<NodeId>> {
    if target.window() != k {
        return Err(CascadeError::domain(
            "target is not indexed by the given window",
        ));
    }
    if k.is_empty() {
        return Ok(BTreeSet::new());
    }
    let m = star_matrix(k)?;
    let rhs: Vec<bool> = m
        .row_order()
        .iter()
        .map(|&n| target.get_pos(k.position(n).expect("ordered node is in window")))
        .collect();
    let x = m
        .back_substitute(&rhs)
        .expect("star matrix is unit upper triangular");
    Ok(m.col_order()
        .iter()
        .zip(x)
        .filter(|(_, b)| *b)
        .map(|(&n, _)| n)
        .collect())
}

/// XOR of the star vectors of `coefficients`.
pub fn combine_stars(
    k: &Window,
    coefficients: impl IntoIterator<Item = NodeId>,
) -> Result<F2Vector> {
    let mut acc = F2Vector::zeros(k);
    for node in coefficients {
        acc.xor_assign(&star_vector(k, node)?)?;
    }
    Ok(acc)
}
