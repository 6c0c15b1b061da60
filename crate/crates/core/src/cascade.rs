//! Finite conditions and the one-step cascade automorphisms acting on them.
//!
//! A condition is a finite partial 0/1 function on `(node, row, bit)`
//! coordinates. The generator at `(ξ, i, s)` flips, along the bit set `s`,
//! the row `(ξ, i)` and every row `(η, i)` with `η` a successor of `ξ`.
//! Generators commute and are involutions, so every product is stored in
//! the canonical per-row normal form: a map from `(node, row)` to the
//! accumulated toggle set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{CascadeError, Result};
use crate::f2linalg::{solve_star_span, F2Vector};
use crate::forest::{NodeId, PredecessorForest, Window};

/// One coordinate of the condition space.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coordinate {
    pub node: NodeId,
    pub row: u32,
    pub bit: u32,
}

impl Coordinate {
    pub fn new(node: u32, row: u32, bit: u32) -> Self {
        Coordinate {
            node: NodeId(node),
            row,
            bit,
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.node, self.row, self.bit)
    }
}

/// A finite partial function from coordinates to bits.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Condition {
    entries: BTreeMap<Coordinate, bool>,
}

impl Condition {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a condition, rejecting a coordinate given two different values.
    pub fn from_entries(entries: impl IntoIterator<Item = (Coordinate, bool)>) -> Result<Self> {
        let mut c = Condition::new();
        for (coord, value) in entries {
            if let Some(old) = c.entries.insert(coord, value) {
                if old != value {
                    return Err(CascadeError::domain(format!(
                        "coordinate {coord} assigned both values"
                    )));
                }
            }
        }
        Ok(c)
    }

    pub fn get(&self, coord: Coordinate) -> Option<bool> {
        self.entries.get(&coord).copied()
    }

    pub fn insert(&mut self, coord: Coordinate, value: bool) -> Option<bool> {
        self.entries.insert(coord, value)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Coordinate, bool)> + '_ {
        self.entries.iter().map(|(&c, &v)| (c, v))
    }

    pub fn domain(&self) -> impl Iterator<Item = Coordinate> + '_ {
        self.entries.keys().copied()
    }

    /// Nodes mentioned by some coordinate of the domain.
    pub fn node_support(&self) -> BTreeSet<NodeId> {
        self.entries.keys().map(|c| c.node).collect()
    }

    /// Keeps only the coordinates accepted by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(Coordinate) -> bool) -> Condition {
        Condition {
            entries: self
                .entries
                .iter()
                .filter(|(&c, _)| keep(c))
                .map(|(&c, &v)| (c, v))
                .collect(),
        }
    }

    /// Restriction to the rows whose node lies in `a`.
    pub fn restrict_to_window(&self, a: &Window) -> Condition {
        self.restrict(|c| a.contains(c.node))
    }

    /// `self ⊆ other` as partial functions; `other` extends `self`.
    pub fn is_extended_by(&self, other: &Condition) -> bool {
        self.entries
            .iter()
            .all(|(c, v)| other.entries.get(c) == Some(v))
    }

    /// No coordinate carries different values in the two conditions.
    pub fn is_compatible(&self, other: &Condition) -> bool {
        self.entries
            .iter()
            .all(|(c, v)| other.entries.get(c).is_none_or(|w| w == v))
    }

    /// Serializes as a condition file with header `box N R B`.
    pub fn to_text(&self, header: BoxHeader) -> String {
        let mut out = format!("box {} {} {}\n", header.nodes, header.rows, header.bits);
        for (c, v) in self.iter() {
            out.push_str(&format!("{} {} {} {}\n", c.node, c.row, c.bit, u8::from(v)));
        }
        out
    }

    /// Parses a condition file; every coordinate must lie inside the header box.
    pub fn parse_text(text: &str) -> Result<(BoxHeader, Condition)> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, htext) = lines
            .next()
            .ok_or_else(|| CascadeError::parse(1, "missing `box N R B` header"))?;
        let fields: Vec<&str> = htext.split_whitespace().collect();
        let ["box", n, r, b] = fields[..] else {
            return Err(CascadeError::parse(hline, "expected `box N R B`"));
        };
        let num = |t: &str, line: usize| {
            t.parse::<u32>()
                .map_err(|_| CascadeError::parse(line, format!("bad number `{t}`")))
        };
        let header = BoxHeader {
            nodes: num(n, hline)?,
            rows: num(r, hline)?,
            bits: num(b, hline)?,
        };
        let mut cond = Condition::new();
        for (line, t) in lines {
            let fields: Vec<&str> = t.split_whitespace().collect();
            let [node, row, bit, value] = fields[..] else {
                return Err(CascadeError::parse(line, "expected `node row bit value`"));
            };
            let coord = Coordinate::new(num(node, line)?, num(row, line)?, num(bit, line)?);
            let value = match value {
                "0" => false,
                "1" => true,
                _ => return Err(CascadeError::parse(line, format!("bad value `{value}`"))),
            };
            if !header.contains(coord) {
                return Err(CascadeError::parse(
                    line,
                    format!("coordinate {coord} outside box"),
                ));
            }
            if cond.insert(coord, value).is_some_and(|old| old != value) {
                return Err(CascadeError::parse(
                    line,
                    format!("conflicting value at {coord}"),
                ));
            }
        }
        Ok((header, cond))
    }
}

impl fmt::Debug for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (c, v)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}:{}={}", c.node, c.row, c.bit, u8::from(v))?;
        }
        f.write_str("}")
    }
}

impl FromIterator<(Coordinate, bool)> for Condition {
    /// Later entries overwrite earlier ones.
    fn from_iter<I: IntoIterator<Item = (Coordinate, bool)>>(iter: I) -> Self {
        Condition {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Dimensions named by a condition file header: nodes `0..nodes`, rows
/// `0..rows`, bits `0..bits`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct BoxHeader {
    pub nodes: u32,
    pub rows: u32,
    pub bits: u32,
}

impl BoxHeader {
    pub fn contains(&self, c: Coordinate) -> bool {
        c.node.0 < self.nodes && c.row < self.rows && c.bit < self.bits
    }
}

/// A condition together with the closed window certifying its node support.
///
/// The certificate is the closure of the mentioned nodes; no coordinates are
/// added to the condition itself.
#[derive(Clone)]
pub struct Packet {
    condition: Condition,
    support: Window,
}

impl Packet {
    /// Packet whose node support is certified by its closure.
    pub fn certified(condition: Condition, forest: &PredecessorForest) -> Result<Self> {
        let support = forest.rho_closure(condition.node_support())?;
        Ok(Packet { condition, support })
    }

    /// Packet whose node support must itself be closed.
    pub fn exact(condition: Condition, forest: &PredecessorForest) -> Result<Self> {
        let support = forest.window(condition.node_support())?;
        Ok(Packet { condition, support })
    }

    pub fn condition(&self) -> &Condition {
        &self.condition
    }

    /// The closed window certifying the node support.
    pub fn support(&self) -> &Window {
        &self.support
    }

    pub fn node_support(&self) -> BTreeSet<NodeId> {
        self.condition.node_support()
    }
}

impl PartialEq for Packet {
    fn eq(&self, other: &Self) -> bool {
        self.condition == other.condition
    }
}

impl Eq for Packet {}

impl PartialOrd for Packet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Packet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.condition.cmp(&other.condition)
    }
}

impl fmt::Debug for Packet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Packet{:?}", self.condition)
    }
}

/// A finite or cofinite set of bit indices.
///
/// `exceptions` is the set itself when finite and its complement when
/// cofinite.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ToggleSet {
    cofinite: bool,
    exceptions: BTreeSet<u32>,
}

impl ToggleSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Every bit.
    pub fn full() -> Self {
        Self::cofinite([])
    }

    pub fn finite(bits: impl IntoIterator<Item = u32>) -> Self {
        ToggleSet {
            cofinite: false,
            exceptions: bits.into_iter().collect(),
        }
    }

    /// All bits except `missing`.
    pub fn cofinite(missing: impl IntoIterator<Item = u32>) -> Self {
        ToggleSet {
            cofinite: true,
            exceptions: missing.into_iter().collect(),
        }
    }

    pub fn singleton(bit: u32) -> Self {
        Self::finite([bit])
    }

    pub fn is_cofinite(&self) -> bool {
        self.cofinite
    }

    pub fn exceptions(&self) -> &BTreeSet<u32> {
        &self.exceptions
    }

    pub fn is_empty(&self) -> bool {
        !self.cofinite && self.exceptions.is_empty()
    }

    pub fn contains(&self, bit: u32) -> bool {
        self.exceptions.contains(&bit) != self.cofinite
    }

    /// Symmetric difference.
    pub fn xor(&self, other: &ToggleSet) -> ToggleSet {
        ToggleSet {
            cofinite: self.cofinite != other.cofinite,
            exceptions: self
                .exceptions
                .symmetric_difference(&other.exceptions)
                .copied()
                .collect(),
        }
    }

    /// No bit lies in both sets. At least one set must be finite for this
    /// to be possible.
    pub fn is_disjoint_from(&self, bits: &BTreeSet<u32>) -> bool {
        bits.iter().all(|&b| !self.contains(b))
    }

    /// Members below `bound`, ascending.
    pub fn members_below(&self, bound: u32) -> impl Iterator<Item = u32> + '_ {
        (0..bound).filter(move |&b| self.contains(b))
    }
}

impl fmt::Display for ToggleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.cofinite { "cofin{" } else { "fin{" })?;
        for (k, b) in self.exceptions.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ToggleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ToggleSet {
    type Err = CascadeError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (cofinite, rest) = if let Some(r) = s.strip_prefix("cofin{") {
            (true, r)
        } else if let Some(r) = s.strip_prefix("fin{") {
            (false, r)
        } else {
            return Err(CascadeError::parse(
                1,
                format!("toggle set `{s}` must start with fin{{ or cofin{{"),
            ));
        };
        let body = rest
            .strip_suffix('}')
            .ok_or_else(|| CascadeError::parse(1, format!("toggle set `{s}` is missing `}}`")))?;
        let exceptions = body
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| CascadeError::parse(1, format!("bad bit `{t}`")))
            })
            .collect::<Result<_>>()?;
        Ok(ToggleSet {
            cofinite,
            exceptions,
        })
    }
}

/// One factor `τ_{ξ,i,s}` of a factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub node: NodeId,
    pub row: u32,
    pub toggles: ToggleSet,
}

/// An element of the cascade group in row-toggle normal form.
///
/// Only generators and their products can be constructed, so every value
/// is a genuine group element.
#[derive(Clone, PartialEq, Eq)]
pub struct CascadeAutomorphism {
    forest: PredecessorForest,
    rows: BTreeMap<(NodeId, u32), ToggleSet>,
}

impl CascadeAutomorphism {
    pub fn identity(forest: &PredecessorForest) -> Self {
        CascadeAutomorphism {
            forest: forest.clone(),
            rows: BTreeMap::new(),
        }
    }

    /// `τ_{ξ,i,s}`: toggles row `(ξ, i)` and each row `(η, i)` with `η` a
    /// successor of `ξ`, along `s`.
    pub fn generator(
        forest: &PredecessorForest,
        node: NodeId,
        row: u32,
        toggles: ToggleSet,
    ) -> Result<Self> {
        if toggles.is_empty() {
            return Err(CascadeError::DegenerateGenerator { node: node.0, row });
        }
        let succ = forest.successors(node)?;
        let rows = std::iter::once(node)
            .chain(succ.iter().copied())
            .map(|n| ((n, row), toggles.clone()))
            .collect();
        Ok(CascadeAutomorphism {
            forest: forest.clone(),
            rows,
        })
    }

    pub fn forest(&self) -> &PredecessorForest {
        &self.forest
    }

    pub fn is_identity(&self) -> bool {
        self.rows.is_empty()
    }

    /// Accumulated toggle set of row `(node, row)`; `None` when untouched.
    pub fn row_toggle(&self, node: NodeId, row: u32) -> Option<&ToggleSet> {
        self.rows.get(&(node, row))
    }

    pub fn row_toggles(&self) -> impl Iterator<Item = ((NodeId, u32), &ToggleSet)> + '_ {
        self.rows.iter().map(|(&k, v)| (k, v))
    }

    /// Whether the coordinate's bit is flipped.
    pub fn flips(&self, c: Coordinate) -> bool {
        self.rows
            .get(&(c.node, c.row))
            .is_some_and(|s| s.contains(c.bit))
    }

    /// Group product; the group is abelian so the order is irrelevant.
    pub fn compose(&self, other: &CascadeAutomorphism) -> Result<Self> {
        if self.forest != other.forest {
            return Err(CascadeError::domain(
                "automorphisms act over different forests",
            ));
        }
        let mut rows = self.rows.clone();
        for (key, s) in &other.rows {
            let merged = match rows.remove(key) {
                Some(t) => t.xor(s),
                None => s.clone(),
            };
            if !merged.is_empty() {
                rows.insert(*key, merged);
            }
        }
        Ok(CascadeAutomorphism {
            forest: self.forest.clone(),
            rows,
        })
    }

    /// Flips each entry of `q` whose bit lies in its row's toggle set.
    pub fn apply(&self, q: &Condition) -> Condition {
        q.iter().map(|(c, v)| (c, v != self.flips(c))).collect()
    }

    /// True iff no row over `a` is toggled.
    pub fn fixes_rows_over(&self, a: &Window) -> Result<bool> {
        self.forest.check_same(a)?;
        Ok(self.rows.keys().all(|(n, _)| !a.contains(*n)))
    }

    /// Recovers a generator factorization over the whole universe.
    ///
    /// Per row, the cofinite-flag pattern is solved once with full-ω
    /// generators, then each finitely many residual bit pattern is solved
    /// with single-bit generators. Composing the returned factors gives back
    /// `self`.
    pub fn factorize(&self) -> Vec<GeneratorSpec> {
        let universe = self.forest.full_window();
        let mut by_row: BTreeMap<u32, Vec<(NodeId, &ToggleSet)>> = BTreeMap::new();
        for (&(n, r), s) in &self.rows {
            by_row.entry(r).or_default().push((n, s));
        }
        let mut out = Vec::new();
        for (row, entries) in by_row {
            let solve = |nodes: Vec<NodeId>| {
                let target =
                    F2Vector::indicator(&universe, nodes).expect("row nodes are in universe");
                solve_star_span(&universe, &target).expect("same window")
            };
            let tails: Vec<NodeId> = entries
                .iter()
                .filter(|(_, s)| s.is_cofinite())
                .map(|(n, _)| *n)
                .collect();
            for node in solve(tails) {
                out.push(GeneratorSpec {
                    node,
                    row,
                    toggles: ToggleSet::full(),
                });
            }
            let bits: BTreeSet<u32> = entries
                .iter()
                .flat_map(|(_, s)| s.exceptions().iter().copied())
                .collect();
            for bit in bits {
                // residual after the tail generators: membership XOR tail flag
                let nodes = entries
                    .iter()
                    .filter(|(_, s)| s.contains(bit) != s.is_cofinite())
                    .map(|(n, _)| *n)
                    .collect();
                for node in solve(nodes) {
                    out.push(GeneratorSpec {
                        node,
                        row,
                        toggles: ToggleSet::singleton(bit),
                    });
                }
            }
        }
        out
    }

    /// Product of the given generators.
    pub fn from_generators(forest: &PredecessorForest, factors: &[GeneratorSpec]) -> Result<Self> {
        factors.iter().try_fold(Self::identity(forest), |acc, g| {
            acc.compose(&Self::generator(forest, g.node, g.row, g.toggles.clone())?)
        })
    }
}

impl fmt::Debug for CascadeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.rows.iter().map(|((n, r), s)| (format!("{n}:{r}"), s)))
            .finish()
    }
}

/// The bits `n` at which `q` constrains row `(β, i)` or one of the rows
/// `(η, i)` with `η` a successor of `β`.
pub fn shield_set(
    q: &Condition,
    beta: NodeId,
    row: u32,
    forest: &PredecessorForest,
) -> Result<BTreeSet<u32>> {
    let succ = forest.successors(beta)?;
    Ok(q.domain()
        .filter(|c| c.row == row && (c.node == beta || succ.binary_search(&c.node).is_ok()))
        .map(|c| c.bit)
        .collect())
}

/// Extends both conditions to the union of their domains, padding with 0.
pub fn pad_common_domain(p: &Condition, q: &Condition) -> (Condition, Condition) {
    let pad = |x: &Condition, y: &Condition| {
        let mut out = x.clone();
        for c in y.domain() {
            out.entries.entry(c).or_insert(false);
        }
        out
    };
    (pad(p, q), pad(q, p))
}

/// An automorphism fixing every row over `a` that carries the padded `p`
/// onto the padded `q`.
///
/// Per `(row, bit)` the difference pattern lives on `K`, the closure of the
/// mentioned nodes outside `a`. It is solved by star-span and realised by
/// single-bit generators. `K` may contain ancestors lying in `a`, but the
/// pattern vanishes there and so does the solution, so no generator sits
/// over `a`.
pub fn transport(
    p: &Condition,
    q: &Condition,
    a: &Window,
    forest: &PredecessorForest,
) -> Result<CascadeAutomorphism> {
    forest.check_same(a)?;
    let (pp, qp) = pad_common_domain(p, q);
    let mut diffs: BTreeMap<(u32, u32), Vec<NodeId>> = BTreeMap::new();
    for (c, v) in pp.iter() {
        let w = qp.get(c).expect("padded to a common domain");
        if a.contains(c.node) {
            if v != w {
                return Err(CascadeError::Precondition(format!(
                    "conditions disagree at {c}, which lies over the support"
                )));
            }
        } else if v != w {
            diffs.entry((c.row, c.bit)).or_default().push(c.node);
        }
    }
    let outside = pp.node_support().into_iter().filter(|n| !a.contains(*n));
    let k = forest.rho_closure(outside)?;
    let mut pi = CascadeAutomorphism::identity(forest);
    for ((row, bit), nodes) in diffs {
        let target = F2Vector::indicator(&k, nodes)?;
        let coefficients = solve_star_span(&k, &target)?;
        assert!(
            coefficients.iter().all(|n| !a.contains(*n)),
            "star-span solution touched the support"
        );
        for node in coefficients {
            pi = pi.compose(&CascadeAutomorphism::generator(
                forest,
                node,
                row,
                ToggleSet::singleton(bit),
            )?)?;
        }
    }
    assert!(
        pi.fixes_rows_over(a)?,
        "transport must fix rows over the support"
    );
    assert_eq!(pi.apply(&pp), qp, "transport must carry p' to q'");
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: u32, r: u32, b: u32) -> Coordinate {
        Coordinate::new(n, r, b)
    }

    fn fork() -> PredecessorForest {
        PredecessorForest::star(3).unwrap()
    }

    #[test]
    fn toggle_xor_examples() {
        let a = ToggleSet::finite([1, 2]);
        let b = ToggleSet::finite([2, 3]);
        assert_eq!(a.xor(&b), ToggleSet::finite([1, 3]));

        let x = ToggleSet::cofinite([1]);
        let y = ToggleSet::cofinite([2]);
        let z = x.xor(&y);
        // pointwise oracle over bits 0..5, tails agree (both excluded)
        for n in 0..5 {
            assert_eq!(z.contains(n), x.contains(n) != y.contains(n));
        }
        assert!(!z.contains(1000));
        assert_eq!(z, ToggleSet::finite([1, 2]));

        assert!(a.xor(&a).is_empty());
        assert!(x.xor(&ToggleSet::finite([7])).is_cofinite());
    }

    #[test]
    fn toggle_text_form() {
        assert_eq!(ToggleSet::finite([2, 1]).to_string(), "fin{1,2}");
        assert_eq!(ToggleSet::cofinite([0]).to_string(), "cofin{0}");
        assert_eq!("cofin{}".parse::<ToggleSet>().unwrap(), ToggleSet::full());
        assert_eq!(
            "fin{ 3, 1 }".parse::<ToggleSet>().unwrap(),
            ToggleSet::finite([1, 3])
        );
        assert!("{1}".parse::<ToggleSet>().is_err());
        assert!("fin{1".parse::<ToggleSet>().is_err());
    }

    #[test]
    fn generator_examples() {
        let f = fork();
        let g = CascadeAutomorphism::generator(&f, NodeId(0), 4, ToggleSet::singleton(5)).unwrap();
        let rows: Vec<_> = g.row_toggles().map(|(k, s)| (k, s.clone())).collect();
        assert_eq!(
            rows,
            vec![
                ((NodeId(0), 4), ToggleSet::singleton(5)),
                ((NodeId(1), 4), ToggleSet::singleton(5)),
                ((NodeId(2), 4), ToggleSet::singleton(5)),
            ]
        );
        let leaf =
            CascadeAutomorphism::generator(&f, NodeId(1), 0, ToggleSet::singleton(5)).unwrap();
        assert_eq!(leaf.row_toggles().count(), 1);
        let full = CascadeAutomorphism::generator(&f, NodeId(0), 0, ToggleSet::full()).unwrap();
        assert!(full.row_toggles().all(|(_, s)| s.is_cofinite()));
        assert_eq!(full.row_toggles().count(), 3);

        assert!(matches!(
            CascadeAutomorphism::generator(&f, NodeId(0), 0, ToggleSet::empty()),
            Err(CascadeError::DegenerateGenerator { node: 0, row: 0 })
        ));
        assert!(CascadeAutomorphism::generator(&f, NodeId(7), 0, ToggleSet::full()).is_err());
    }

    #[test]
    fn compose_examples() {
        let f = fork();
        let g1 =
            CascadeAutomorphism::generator(&f, NodeId(0), 0, ToggleSet::finite([1, 2])).unwrap();
        let g2 =
            CascadeAutomorphism::generator(&f, NodeId(1), 0, ToggleSet::cofinite([2])).unwrap();
        assert!(g1.compose(&g1).unwrap().is_identity());
        assert_eq!(g1.compose(&g2).unwrap(), g2.compose(&g1).unwrap());

        let h = CascadeAutomorphism::generator(&f, NodeId(2), 1, ToggleSet::singleton(0)).unwrap();
        let both = g1.compose(&h).unwrap();
        assert_eq!(
            both.row_toggles().count(),
            g1.row_toggles().count() + h.row_toggles().count()
        );

        let other = PredecessorForest::chain(3).unwrap();
        let x = CascadeAutomorphism::generator(&other, NodeId(0), 0, ToggleSet::full()).unwrap();
        assert!(g1.compose(&x).is_err());
    }

    #[test]
    fn apply_examples() {
        let f = fork();
        let q = Condition::from_entries([(c(0, 1, 3), false)]).unwrap();
        assert_eq!(CascadeAutomorphism::identity(&f).apply(&q), q);
        let g = CascadeAutomorphism::generator(&f, NodeId(0), 1, ToggleSet::singleton(3)).unwrap();
        assert_eq!(g.apply(&q).get(c(0, 1, 3)), Some(true));
        let other_row = Condition::from_entries([(c(0, 2, 3), false), (c(1, 2, 0), true)]).unwrap();
        assert_eq!(g.apply(&other_row), other_row);
    }

    #[test]
    fn shield_set_examples() {
        let f = fork();
        let q =
            Condition::from_entries([(c(0, 0, 2), true), (c(1, 0, 5), false), (c(0, 1, 7), true)])
                .unwrap();
        assert_eq!(
            shield_set(&q, NodeId(0), 0, &f).unwrap(),
            BTreeSet::from([2, 5])
        );
        assert!(shield_set(&Condition::new(), NodeId(0), 0, &f)
            .unwrap()
            .is_empty());
        let far = Condition::from_entries([(c(2, 0, 1), true)]).unwrap();
        assert!(shield_set(&far, NodeId(1), 0, &f).unwrap().is_empty());
    }

    #[test]
    fn fixes_rows_over_examples() {
        let f = PredecessorForest::new(4, [(1, 0), (2, 0), (3, 2)]).unwrap();
        let a = f.window([NodeId(0), NodeId(1)]).unwrap();
        let outside = CascadeAutomorphism::generator(&f, NodeId(2), 0, ToggleSet::full()).unwrap();
        assert!(outside.fixes_rows_over(&a).unwrap());
        let inside =
            CascadeAutomorphism::generator(&f, NodeId(1), 0, ToggleSet::singleton(0)).unwrap();
        assert!(!inside.fixes_rows_over(&a).unwrap());
        assert!(CascadeAutomorphism::identity(&f)
            .fixes_rows_over(&a)
            .unwrap());
        // the root's generator touches 1 and 2; 1 is in a
        let root = CascadeAutomorphism::generator(&f, NodeId(0), 0, ToggleSet::full()).unwrap();
        assert!(!root.fixes_rows_over(&a).unwrap());
    }

    #[test]
    fn pad_examples() {
        let p = Condition::from_entries([(c(0, 0, 0), true)]).unwrap();
        let (pp, qp) = pad_common_domain(&p, &Condition::new());
        assert_eq!(pp, p);
        assert_eq!(qp, Condition::from_entries([(c(0, 0, 0), false)]).unwrap());
        let (a, b) = pad_common_domain(&p, &p);
        assert_eq!((a, b), (p.clone(), p.clone()));
        let q = Condition::from_entries([(c(1, 0, 0), true)]).unwrap();
        let (pp, qp) = pad_common_domain(&p, &q);
        assert_eq!(pp.len(), 2);
        assert_eq!(qp.len(), 2);
        assert_eq!(pp.get(c(1, 0, 0)), Some(false));
        assert_eq!(qp.get(c(0, 0, 0)), Some(false));
    }

    #[test]
    fn transport_identity_when_equal() {
        let f = fork();
        let p = Condition::from_entries([(c(1, 0, 0), true), (c(0, 0, 1), false)]).unwrap();
        let a = f.window([NodeId(0)]).unwrap();
        assert!(transport(&p, &p, &a, &f).unwrap().is_identity());
    }

    #[test]
    fn transport_single_leaf_difference() {
        let f = fork();
        let p = Condition::from_entries([(c(2, 0, 3), false)]).unwrap();
        let q = Condition::from_entries([(c(2, 0, 3), true)]).unwrap();
        let pi = transport(&p, &q, &f.empty_window(), &f).unwrap();
        let expected =
            CascadeAutomorphism::generator(&f, NodeId(2), 0, ToggleSet::singleton(3)).unwrap();
        assert_eq!(pi, expected);
    }

    #[test]
    fn transport_on_a_chain_uses_two_stars() {
        // 0 <- 1 <- 2, support {0}; p and q differ only at node 1
        let f = PredecessorForest::chain(3).unwrap();
        let a = f.window([NodeId(0)]).unwrap();
        let p = Condition::from_entries([(c(1, 0, 0), false), (c(2, 0, 0), false)]).unwrap();
        let q = Condition::from_entries([(c(1, 0, 0), true), (c(2, 0, 0), false)]).unwrap();
        let pi = transport(&p, &q, &a, &f).unwrap();
        let g1 = CascadeAutomorphism::generator(&f, NodeId(1), 0, ToggleSet::singleton(0)).unwrap();
        let g2 = CascadeAutomorphism::generator(&f, NodeId(2), 0, ToggleSet::singleton(0)).unwrap();
        assert_eq!(pi, g1.compose(&g2).unwrap());
        assert_eq!(pi.apply(&p), q);
        assert!(pi.fixes_rows_over(&a).unwrap());
    }

    #[test]
    fn transport_rejects_disagreement_over_support() {
        let f = fork();
        let a = f.window([NodeId(0)]).unwrap();
        let p = Condition::from_entries([(c(0, 0, 0), true)]).unwrap();
        let q = Condition::from_entries([(c(0, 0, 0), false)]).unwrap();
        assert!(matches!(
            transport(&p, &q, &a, &f),
            Err(CascadeError::Precondition(_))
        ));
        // padding counts: p says 1, q is silent (padded to 0)
        assert!(transport(&p, &Condition::new(), &a, &f).is_err());
    }

    #[test]
    fn factorization_recomposes() {
        let f = PredecessorForest::new(5, [(1, 0), (2, 0), (3, 1), (4, 1)]).unwrap();
        let g = CascadeAutomorphism::generator(&f, NodeId(1), 0, ToggleSet::cofinite([2, 4]))
            .unwrap()
            .compose(
                &CascadeAutomorphism::generator(&f, NodeId(0), 0, ToggleSet::finite([2, 9]))
                    .unwrap(),
            )
            .unwrap()
            .compose(&CascadeAutomorphism::generator(&f, NodeId(3), 2, ToggleSet::full()).unwrap())
            .unwrap();
        let factors = g.factorize();
        assert_eq!(
            CascadeAutomorphism::from_generators(&f, &factors).unwrap(),
            g
        );
    }

    #[test]
    fn packets_validate_support() {
        let f = fork();
        let off = Condition::from_entries([(c(1, 0, 0), true)]).unwrap();
        assert!(Packet::exact(off.clone(), &f).is_err());
        let p = Packet::certified(off, &f).unwrap();
        assert_eq!(p.support().nodes(), &[NodeId(0), NodeId(1)]);
        let closed = Condition::from_entries([(c(1, 0, 0), true), (c(0, 0, 0), false)]).unwrap();
        assert!(Packet::exact(closed, &f).is_ok());
    }

    #[test]
    fn condition_file_round_trip_and_errors() {
        let header = BoxHeader {
            nodes: 3,
            rows: 2,
            bits: 4,
        };
        let q = Condition::from_entries([(c(0, 1, 3), true), (c(2, 0, 0), false)]).unwrap();
        let text = q.to_text(header);
        assert_eq!(text, "box 3 2 4\n0 1 3 1\n2 0 0 0\n");
        assert_eq!(Condition::parse_text(&text).unwrap(), (header, q));
        assert!(matches!(
            Condition::parse_text("box 3 2 4\n0 2 0 1\n"),
            Err(CascadeError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Condition::parse_text("box 3 2 4\n0 0 0 1\n0 0 0 0\n"),
            Err(CascadeError::Parse { line: 3, .. })
        ));
        assert!(Condition::parse_text("3 2 4\n").is_err());
        assert!(Condition::from_entries([(c(0, 0, 0), true), (c(0, 0, 0), false)]).is_err());
    }
}
