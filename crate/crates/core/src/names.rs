//! Rank-1 names over a finite coordinate box and their packet normal form.
//!
//! A name is a finite set of pairs `(m, p)`. Under a total assignment `g` of
//! the box it evaluates to `{m : p ⊆ g for some (m, p)}`. Total assignments
//! play the role of generic filters: every question about forcing becomes a
//! sweep over assignments.
//!
//! A name is *supported* by a closed window `A` when flipping `g` along any
//! single-bit generator at a node outside `A` never changes its value. For
//! such names the value depends only on the rows over `A`, which is what
//! [`normalize`] exploits to rewrite the name as a [`PacketScheme`] over `A`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cascade::{
    CascadeAutomorphism, Condition, Coordinate, GeneratorSpec, Packet, ToggleSet,
};
use crate::error::{CascadeError, Result};
use crate::forest::{parse_node_list, PredecessorForest, Window};

/// Default bound on the natural numbers `m` used by generated names.
pub const DEFAULT_MAX_M: u32 = 8;

/// Version tag of the canonical packet enumeration used by two-layer codes.
pub const ENUMERATION_VERSION: &str = "lex-v1";

/// The largest number of free coordinates a sweep will enumerate.
const MAX_SWEEP_BITS: usize = 26;

/// A finite box of coordinates: nodes of a window, rows `0..rows`, bits
/// `0..bits`. Coordinates are indexed in `(node, row, bit)` order.
#[derive(Clone, PartialEq, Eq)]
pub struct CoordinateBox {
    nodes: Window,
    rows: u32,
    bits: u32,
}

impl CoordinateBox {
    pub fn new(nodes: Window, rows: u32, bits: u32) -> Result<Self> {
        if nodes.is_empty() || rows == 0 || bits == 0 {
            return Err(CascadeError::domain("coordinate box must be nonempty"));
        }
        Ok(CoordinateBox { nodes, rows, bits })
    }

    pub fn nodes(&self) -> &Window {
        &self.nodes
    }

    pub fn forest(&self) -> &PredecessorForest {
        self.nodes.forest()
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Number of coordinates.
    pub fn len(&self) -> usize {
        self.nodes.len() * (self.rows * self.bits) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index_of(&self, c: Coordinate) -> Option<usize> {
        if c.row >= self.rows || c.bit >= self.bits {
            return None;
        }
        let pos = self.nodes.position(c.node)?;
        Some((pos * self.rows as usize + c.row as usize) * self.bits as usize + c.bit as usize)
    }

    pub fn coordinate(&self, index: usize) -> Coordinate {
        let bits = self.bits as usize;
        let rows = self.rows as usize;
        Coordinate {
            node: self.nodes.nodes()[index / (rows * bits)],
            row: ((index / bits) % rows) as u32,
            bit: (index % bits) as u32,
        }
    }

    pub fn contains(&self, c: Coordinate) -> bool {
        self.index_of(c).is_some()
    }

    pub fn coordinates(&self) -> impl Iterator<Item = Coordinate> + '_ {
        (0..self.len()).map(|k| self.coordinate(k))
    }

    fn check_condition(&self, p: &Condition) -> Result<Vec<(usize, bool)>> {
        p.iter()
            .map(|(c, v)| {
                self.index_of(c).map(|k| (k, v)).ok_or_else(|| {
                    CascadeError::domain(format!("coordinate {c} lies outside the box"))
                })
            })
            .collect()
    }

    /// Box coordinates flipped by `tau`.
    fn flipped_indices(&self, tau: &CascadeAutomorphism) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| tau.flips(self.coordinate(k)))
            .collect()
    }

    /// Every single-bit generator `τ_{ξ,i,{n}}` with `ξ` a box node outside `a`.
    pub fn off_support_generators(&self, a: &Window) -> Vec<GeneratorSpec> {
        let mut out = Vec::new();
        for &node in self.nodes.nodes() {
            if a.contains(node) {
                continue;
            }
            for row in 0..self.rows {
                for bit in 0..self.bits {
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
}

impl fmt::Debug for CoordinateBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "box(nodes={}, rows={}, bits={})",
            self.nodes, self.rows, self.bits
        )
    }
}

/// A total 0/1 function on a coordinate box.
#[derive(Clone, PartialEq, Eq)]
pub struct Assignment<'b> {
    cbox: &'b CoordinateBox,
    values: Vec<bool>,
}

impl<'b> Assignment<'b> {
    pub fn zeros(cbox: &'b CoordinateBox) -> Self {
        Assignment {
            cbox,
            values: vec![false; cbox.len()],
        }
    }

    /// Coordinate `k` (in box order) takes bit `k` of `code`. Boxes with
    /// more than 64 coordinates leave the rest at 0.
    pub fn from_code(cbox: &'b CoordinateBox, code: u64) -> Self {
        let values = (0..cbox.len())
            .map(|k| k < 64 && (code >> k) & 1 == 1)
            .collect();
        Assignment { cbox, values }
    }

    pub fn random<R: Rng>(cbox: &'b CoordinateBox, rng: &mut R) -> Self {
        let values = (0..cbox.len()).map(|_| rng.random()).collect();
        Assignment { cbox, values }
    }

    /// The assignment extending `p` that is 0 elsewhere.
    pub fn extending(cbox: &'b CoordinateBox, p: &Condition) -> Result<Self> {
        let mut g = Self::zeros(cbox);
        for (k, v) in cbox.check_condition(p)? {
            g.values[k] = v;
        }
        Ok(g)
    }

    pub fn coordinate_box(&self) -> &'b CoordinateBox {
        self.cbox
    }

    pub fn get(&self, c: Coordinate) -> Result<bool> {
        self.cbox
            .index_of(c)
            .map(|k| self.values[k])
            .ok_or_else(|| CascadeError::domain(format!("coordinate {c} lies outside the box")))
    }

    pub fn get_index(&self, k: usize) -> bool {
        self.values[k]
    }

    pub fn set(&mut self, c: Coordinate, value: bool) -> Result<()> {
        let k = self
            .cbox
            .index_of(c)
            .ok_or_else(|| CascadeError::domain(format!("coordinate {c} lies outside the box")))?;
        self.values[k] = value;
        Ok(())
    }

    /// `τ·g`: flips every coordinate whose row toggle contains its bit.
    pub fn apply(&self, tau: &CascadeAutomorphism) -> Assignment<'b> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| v != tau.flips(self.cbox.coordinate(k)))
            .collect();
        Assignment {
            cbox: self.cbox,
            values,
        }
    }

    fn flip_indices(&mut self, indices: &[usize]) {
        for &k in indices {
            self.values[k] = !self.values[k];
        }
    }

    /// Whether `p ⊆ g`. Coordinates outside the box are a domain error.
    pub fn extends(&self, p: &Condition) -> Result<bool> {
        Ok(self
            .cbox
            .check_condition(p)?
            .into_iter()
            .all(|(k, v)| self.values[k] == v))
    }

    /// The assignment as a condition defined on every box coordinate.
    pub fn to_condition(&self) -> Condition {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &v)| (self.cbox.coordinate(k), v))
            .collect()
    }
}

impl fmt::Debug for Assignment<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = self
            .values
            .iter()
            .map(|&v| if v { '1' } else { '0' })
            .collect();
        write!(f, "Assignment({bits})")
    }
}

/// Anything that can be read as a set of `(m, condition)` pairs.
pub trait RankOneName {
    fn pairs(&self) -> Box<dyn Iterator<Item = (u32, &Condition)> + '_>;
}

/// An unnormalized rank-1 name: arbitrary finite conditions paired with
/// naturals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawName {
    pairs: BTreeSet<(u32, Condition)>,
}

impl RawName {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, Condition)>) -> Self {
        RawName {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, m: u32, p: Condition) -> bool {
        self.pairs.insert((m, p))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Every coordinate mentioned by some condition of the name.
    pub fn mentioned(&self) -> BTreeSet<Coordinate> {
        self.pairs.iter().flat_map(|(_, p)| p.domain()).collect()
    }
}

impl RankOneName for RawName {
    fn pairs(&self) -> Box<dyn Iterator<Item = (u32, &Condition)> + '_> {
        Box::new(self.pairs.iter().map(|(m, p)| (*m, p)))
    }
}

/// A name with its conditions resolved to box indices, ready for sweeps.
struct Compiled {
    pairs: Vec<(u32, Vec<(usize, bool)>)>,
}

impl Compiled {
    fn new(name: &dyn RankOneName, cbox: &CoordinateBox) -> Result<Self> {
        let pairs = name
            .pairs()
            .map(|(m, p)| Ok((m, cbox.check_condition(p)?)))
            .collect::<Result<_>>()?;
        Ok(Compiled { pairs })
    }

    fn eval_with(&self, value: impl Fn(usize) -> bool) -> BTreeSet<u32> {
        self.pairs
            .iter()
            .filter(|(_, p)| p.iter().all(|&(k, v)| value(k) == v))
            .map(|(m, _)| *m)
            .collect()
    }

    fn eval(&self, g: &Assignment<'_>) -> BTreeSet<u32> {
        self.eval_with(|k| g.values[k])
    }

    fn contains(&self, m: u32, g: &Assignment<'_>) -> bool {
        self.pairs
            .iter()
            .any(|(n, p)| *n == m && p.iter().all(|&(k, v)| g.values[k] == v))
    }
}

/// `{m : p ⊆ g for some (m, p) in the name}`.
pub fn evaluate(name: &dyn RankOneName, g: &Assignment<'_>) -> Result<BTreeSet<u32>> {
    Ok(Compiled::new(name, g.cbox)?.eval(g))
}

/// Controls the assignment sweeps of [`check_support`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    /// Boxes with at most this many coordinates are swept exhaustively.
    pub exhaustive_limit: usize,
    /// Number of random assignments drawn for larger boxes.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            exhaustive_limit: 16,
            samples: 4096,
            seed: 0,
        }
    }
}

impl SweepConfig {
    /// Runs `f` on every assignment (small boxes) or on a seeded sample,
    /// stopping at the first `false`. Returns `(exhaustive, visited)`.
    pub(crate) fn for_each_assignment<'b>(
        &self,
        cbox: &'b CoordinateBox,
        mut f: impl FnMut(&Assignment<'b>) -> bool,
    ) -> (bool, usize) {
        if cbox.len() <= self.exhaustive_limit.min(63) {
            let total = 1u64 << cbox.len();
            for code in 0..total {
                if !f(&Assignment::from_code(cbox, code)) {
                    return (true, code as usize + 1);
                }
            }
            (true, total as usize)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            for k in 0..self.samples {
                if !f(&Assignment::random(cbox, &mut rng)) {
                    return (false, k + 1);
                }
            }
            (false, self.samples)
        }
    }
}

/// A generator and an assignment on which the name's value changes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportCounterexample {
    pub generator: GeneratorSpec,
    pub assignment: Condition,
}

/// Outcome of [`check_support`], with the scale at which it was checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportVerdict {
    pub supported: bool,
    /// All assignments of the box were swept (otherwise a seeded sample).
    pub exhaustive: bool,
    /// Assignments examined per generator.
    pub assignments_checked: usize,
    pub counterexample: Option<SupportCounterexample>,
}

/// Checks that every single-bit generator at a box node outside `a` leaves
/// the name's value unchanged on every (or every sampled) assignment.
pub fn check_support(
    name: &dyn RankOneName,
    a: &Window,
    cbox: &CoordinateBox,
    config: &SweepConfig,
) -> Result<SupportVerdict> {
    let forest = cbox.forest();
    forest.check_same(a)?;
    let compiled = Compiled::new(name, cbox)?;
    let generators: Vec<(GeneratorSpec, Vec<usize>)> = cbox
        .off_support_generators(a)
        .into_iter()
        .map(|g| {
            let tau = CascadeAutomorphism::generator(forest, g.node, g.row, g.toggles.clone())?;
            Ok((g, cbox.flipped_indices(&tau)))
        })
        .collect::<Result<_>>()?;

    let mut counterexample = None;
    let (exhaustive, checked) = config.for_each_assignment(cbox, |g| {
        let base = compiled.eval(g);
        for (spec, flips) in &generators {
            let mut moved = g.clone();
            moved.flip_indices(flips);
            if compiled.eval(&moved) != base {
                counterexample = Some(SupportCounterexample {
                    generator: spec.clone(),
                    assignment: g.to_condition(),
                });
                return false;
            }
        }
        true
    });
    Ok(SupportVerdict {
        supported: counterexample.is_none(),
        exhaustive,
        assignments_checked: checked,
        counterexample,
    })
}

/// Truth value of `m ∈ name` decided by `p`, if `p` decides it: every total
/// extension of `p` in the box agrees.
pub fn decided_value(
    name: &dyn RankOneName,
    p: &Condition,
    m: u32,
    cbox: &CoordinateBox,
) -> Result<Option<bool>> {
    let compiled = Compiled::new(name, cbox)?;
    decided_compiled(&compiled, p, m, cbox)
}

fn decided_compiled(
    compiled: &Compiled,
    p: &Condition,
    m: u32,
    cbox: &CoordinateBox,
) -> Result<Option<bool>> {
    let base = Assignment::extending(cbox, p)?;
    let fixed: BTreeSet<usize> = cbox
        .check_condition(p)?
        .into_iter()
        .map(|(k, _)| k)
        .collect();
    let free: Vec<usize> = (0..cbox.len()).filter(|k| !fixed.contains(k)).collect();
    if free.len() > MAX_SWEEP_BITS {
        return Err(CascadeError::domain(format!(
            "{} free coordinates is too many to sweep",
            free.len()
        )));
    }
    let mut seen = [false; 2];
    let mut g = base;
    for code in 0u64..(1u64 << free.len()) {
        for (j, &k) in free.iter().enumerate() {
            g.values[k] = (code >> j) & 1 == 1;
        }
        seen[usize::from(compiled.contains(m, &g))] = true;
        if seen[0] && seen[1] {
            return Ok(None);
        }
    }
    Ok(Some(seen[1]))
}

/// Whether the restriction of `p` to the rows over `a` decides `m ∈ name`
/// with the same truth value as `p`.
///
/// `p` must decide `m`; otherwise a precondition error is returned. Support
/// of the name is not checked here.
pub fn decision_invariant(
    name: &dyn RankOneName,
    a: &Window,
    p: &Condition,
    m: u32,
    cbox: &CoordinateBox,
) -> Result<bool> {
    cbox.forest().check_same(a)?;
    let compiled = Compiled::new(name, cbox)?;
    let Some(value) = decided_compiled(&compiled, p, m, cbox)? else {
        return Err(CascadeError::Precondition(format!(
            "condition {p:?} does not decide {m}"
        )));
    };
    let r = p.restrict_to_window(a);
    Ok(decided_compiled(&compiled, &r, m, cbox)? == Some(value))
}

/// A support window and, per natural `m`, a family of packets over it.
#[derive(Clone, PartialEq, Eq)]
pub struct PacketScheme {
    support: Window,
    families: BTreeMap<u32, BTreeSet<Packet>>,
}

impl PacketScheme {
    /// Rejects packets whose certified support is not inside `support`.
    pub fn new(support: Window, families: BTreeMap<u32, BTreeSet<Packet>>) -> Result<Self> {
        for (m, family) in &families {
            for packet in family {
                if !packet.support().is_subset(&support)
                    || packet.support().forest() != support.forest()
                {
                    return Err(CascadeError::domain(format!(
                        "packet {packet:?} of family {m} is not supported by {support}"
                    )));
                }
            }
        }
        let families = families
            .into_iter()
            .filter(|(_, f)| !f.is_empty())
            .collect();
        Ok(PacketScheme { support, families })
    }

    pub fn support(&self) -> &Window {
        &self.support
    }

    /// The family for `m`; empty when absent.
    pub fn family(&self, m: u32) -> impl Iterator<Item = &Packet> + '_ {
        self.families.get(&m).into_iter().flatten()
    }

    pub fn families(&self) -> &BTreeMap<u32, BTreeSet<Packet>> {
        &self.families
    }

    pub fn packet_count(&self) -> usize {
        self.families.values().map(BTreeSet::len).sum()
    }

    pub fn to_raw_name(&self) -> RawName {
        RawName::from_pairs(
            self.families
                .iter()
                .flat_map(|(m, f)| f.iter().map(move |p| (*m, p.condition().clone()))),
        )
    }

    /// Text form: `support: <nodes>`, then `m: {n:r:b=v, ...} {...}` per
    /// nonempty family.
    pub fn to_text(&self) -> String {
        let mut out = format!("support: {}\n", self.support);
        for (m, family) in &self.families {
            out.push_str(&format!("{m}:"));
            for p in family {
                out.push(' ');
                out.push_str(&packet_block(p.condition()));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str, forest: &PredecessorForest) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines
            .next()
            .ok_or_else(|| CascadeError::parse(1, "missing `support:` header"))?;
        let nodes = header
            .strip_prefix("support:")
            .ok_or_else(|| CascadeError::parse(hline, "expected `support: <nodes>`"))?;
        let support = forest
            .window(parse_node_list(nodes).map_err(|e| relocate(e, hline))?)
            .map_err(|e| CascadeError::parse(hline, e.to_string()))?;
        let mut families: BTreeMap<u32, BTreeSet<Packet>> = BTreeMap::new();
        for (line, t) in lines {
            let (m, rest) = t
                .split_once(':')
                .ok_or_else(|| CascadeError::parse(line, "expected `m: <packets>`"))?;
            let m: u32 = m
                .trim()
                .parse()
                .map_err(|_| CascadeError::parse(line, format!("bad family index `{m}`")))?;
            let family = families.entry(m).or_default();
            for block in parse_packet_blocks(rest).map_err(|e| relocate(e, line))? {
                let packet = Packet::certified(block, forest)
                    .map_err(|e| CascadeError::parse(line, e.to_string()))?;
                family.insert(packet);
            }
        }
        Self::new(support, families)
    }
}

impl RankOneName for PacketScheme {
    fn pairs(&self) -> Box<dyn Iterator<Item = (u32, &Condition)> + '_> {
        Box::new(
            self.families
                .iter()
                .flat_map(|(m, f)| f.iter().map(move |p| (*m, p.condition()))),
        )
    }
}

impl fmt::Debug for PacketScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn relocate(e: CascadeError, line: usize) -> CascadeError {
    match e {
        CascadeError::Parse { message, .. } => CascadeError::Parse { line, message },
        other => other,
    }
}

fn packet_block(p: &Condition) -> String {
    let body: Vec<String> = p
        .iter()
        .map(|(c, v)| format!("{}:{}:{}={}", c.node, c.row, c.bit, u8::from(v)))
        .collect();
    format!("{{{}}}", body.join(", "))
}

fn parse_packet_blocks(text: &str) -> Result<Vec<Condition>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body_start = rest
            .strip_prefix('{')
            .ok_or_else(|| CascadeError::parse(0, "packet block must start with `{`"))?;
        let end = body_start
            .find('}')
            .ok_or_else(|| CascadeError::parse(0, "unterminated packet block"))?;
        let mut cond = Condition::new();
        for entry in body_start[..end]
            .split(',')
            .map(str::trim)
            .filter(|e| !e.is_empty())
        {
            let bad = || CascadeError::parse(0, format!("bad packet entry `{entry}`"));
            let (coord, value) = entry.split_once('=').ok_or_else(bad)?;
            let parts: Vec<u32> = coord
                .split(':')
                .map(|t| t.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            let [n, r, b] = parts[..] else {
                return Err(bad());
            };
            let value = match value.trim() {
                "0" => false,
                "1" => true,
                _ => return Err(bad()),
            };
            if cond
                .insert(Coordinate::new(n, r, b), value)
                .is_some_and(|old| old != value)
            {
                return Err(bad());
            }
        }
        out.push(cond);
        rest = body_start[end + 1..].trim_start();
    }
    Ok(out)
}

/// Rewrites a supported name as a packet scheme over `a` with the same
/// value on every assignment of the box.
///
/// For each `m`, the family collects the restrictions to the rows over `a`
/// of the assignments that put `m` in the name, trimmed to the coordinates
/// the name mentions. Since the value depends only on mentioned coordinates,
/// the sweep runs over assignments of those coordinates.
pub fn normalize(
    name: &RawName,
    a: &Window,
    cbox: &CoordinateBox,
    config: &SweepConfig,
) -> Result<PacketScheme> {
    let verdict = check_support(name, a, cbox, config)?;
    if !verdict.supported {
        return Err(CascadeError::Precondition(format!(
            "name is not supported by {a}: {:?}",
            verdict.counterexample
        )));
    }
    let forest = cbox.forest();
    let compiled = Compiled::new(name, cbox)?;
    let mentioned: Vec<usize> = name
        .mentioned()
        .into_iter()
        .map(|c| cbox.index_of(c).expect("checked by compile"))
        .collect();
    if mentioned.len() > MAX_SWEEP_BITS {
        return Err(CascadeError::domain(format!(
            "{} mentioned coordinates is too many to sweep",
            mentioned.len()
        )));
    }
    let over_a: Vec<(usize, usize)> = mentioned
        .iter()
        .enumerate()
        .filter(|(_, &k)| a.contains(cbox.coordinate(k).node))
        .map(|(j, &k)| (j, k))
        .collect();

    let mut families: BTreeMap<u32, BTreeSet<Packet>> = BTreeMap::new();
    let mut values = vec![false; cbox.len()];
    for code in 0u64..(1u64 << mentioned.len()) {
        for (j, &k) in mentioned.iter().enumerate() {
            values[k] = (code >> j) & 1 == 1;
        }
        let ms = compiled.eval_with(|k| values[k]);
        if ms.is_empty() {
            continue;
        }
        let restriction: Condition = over_a
            .iter()
            .map(|&(j, k)| (cbox.coordinate(k), (code >> j) & 1 == 1))
            .collect();
        let packet = Packet::certified(restriction, forest)?;
        for m in ms {
            families.entry(m).or_default().insert(packet.clone());
        }
    }
    PacketScheme::new(a.clone(), families)
}

/// The canonical enumeration of all conditions over a box.
///
/// A condition is listed as its entries in coordinate order; lists are
/// compared lexicographically on `(coordinate index, value)` pairs, a
/// proper prefix coming first. The empty condition has rank 0.
#[derive(Clone, Debug)]
pub struct PacketEnumeration<'b> {
    cbox: &'b CoordinateBox,
    // suffix[c] = 3^(n - c): number of entry lists using only indices >= c
    suffix: Vec<u128>,
}

impl<'b> PacketEnumeration<'b> {
    pub fn new(cbox: &'b CoordinateBox) -> Result<Self> {
        let n = cbox.len();
        let mut suffix = vec![1u128; n + 1];
        for c in (0..n).rev() {
            suffix[c] = suffix[c + 1].checked_mul(3).ok_or_else(|| {
                CascadeError::domain(format!(
                    "box with {n} coordinates is too large to enumerate"
                ))
            })?;
        }
        Ok(PacketEnumeration { cbox, suffix })
    }

    /// Number of conditions over the box.
    pub fn total(&self) -> u128 {
        self.suffix[0]
    }

    pub fn rank(&self, p: &Condition) -> Result<u128> {
        let entries = self.cbox.check_condition(p)?;
        let mut rank = 0u128;
        let mut next = 0usize;
        for (c, v) in entries {
            // the prefix ending here
            rank += 1;
            // lists whose next entry is smaller than (c, v)
            for d in next..c {
                rank += 2 * self.suffix[d + 1];
            }
            if v {
                rank += self.suffix[c + 1];
            }
            next = c + 1;
        }
        Ok(rank)
    }

    pub fn unrank(&self, mut rank: u128) -> Result<Condition> {
        if rank >= self.total() {
            return Err(CascadeError::domain(format!(
                "rank {rank} beyond enumeration of size {}",
                self.total()
            )));
        }
        let mut out = Condition::new();
        let mut next = 0usize;
        while rank > 0 {
            rank -= 1;
            let mut chosen = None;
            for c in next..self.cbox.len() {
                let block = self.suffix[c + 1];
                if rank < 2 * block {
                    let v = rank >= block;
                    rank -= if v { block } else { 0 };
                    chosen = Some((c, v));
                    break;
                }
                rank -= 2 * block;
            }
            let (c, v) = chosen.expect("rank below total always resolves");
            out.insert(self.cbox.coordinate(c), v);
            next = c + 1;
        }
        Ok(out)
    }
}

/// A support window plus, per `m`, the ranks of its packets in the
/// canonical enumeration of the box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoLayerCode {
    pub coordinate_box: CoordinateBox,
    pub support: Window,
    pub packet_indices: BTreeMap<u32, BTreeSet<u128>>,
}

/// Codes a scheme by its support and the canonical ranks of its packets.
pub fn two_layer_code(scheme: &PacketScheme, cbox: &CoordinateBox) -> Result<TwoLayerCode> {
    let enumeration = PacketEnumeration::new(cbox)?;
    let mut packet_indices = BTreeMap::new();
    for (m, family) in scheme.families() {
        let ranks = family
            .iter()
            .map(|p| enumeration.rank(p.condition()))
            .collect::<Result<BTreeSet<_>>>()?;
        packet_indices.insert(*m, ranks);
    }
    Ok(TwoLayerCode {
        coordinate_box: cbox.clone(),
        support: scheme.support().clone(),
        packet_indices,
    })
}

impl TwoLayerCode {
    pub fn decode(&self) -> Result<PacketScheme> {
        let enumeration = PacketEnumeration::new(&self.coordinate_box)?;
        let forest = self.support.forest();
        let mut families = BTreeMap::new();
        for (m, ranks) in &self.packet_indices {
            let family = ranks
                .iter()
                .map(|&k| Packet::certified(enumeration.unrank(k)?, forest))
                .collect::<Result<BTreeSet<_>>>()?;
            families.insert(*m, family);
        }
        PacketScheme::new(self.support.clone(), families)
    }

    pub fn to_text(&self) -> String {
        let b = &self.coordinate_box;
        let mut out = format!(
            "enumeration: {ENUMERATION_VERSION}\nbox: nodes={} rows={} bits={}\nsupport: {}\n",
            b.nodes()
                .nodes()
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(","),
            b.rows(),
            b.bits(),
            self.support
        );
        for (m, ranks) in &self.packet_indices {
            let list: Vec<String> = ranks.iter().map(u128::to_string).collect();
            out.push_str(&format!("{m}: {}\n", list.join(",")));
        }
        out
    }

    pub fn parse_text(text: &str, forest: &PredecessorForest) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next_header = |key: &str| -> Result<(usize, String)> {
            let (line, t) = lines
                .next()
                .ok_or_else(|| CascadeError::parse(0, format!("missing `{key}` header")))?;
            let value = t
                .strip_prefix(key)
                .ok_or_else(|| CascadeError::parse(line, format!("expected `{key}`")))?;
            Ok((line, value.trim().to_string()))
        };
        let (vline, version) = next_header("enumeration:")?;
        if version != ENUMERATION_VERSION {
            return Err(CascadeError::parse(
                vline,
                format!("unknown enumeration `{version}`"),
            ));
        }
        let (bline, btext) = next_header("box:")?;
        let mut nodes = None;
        let mut rows = None;
        let mut bits = None;
        for field in btext.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| CascadeError::parse(bline, format!("bad box field `{field}`")))?;
            match k {
                "nodes" => nodes = Some(parse_node_list(v).map_err(|e| relocate(e, bline))?),
                "rows" => rows = v.parse::<u32>().ok(),
                "bits" => bits = v.parse::<u32>().ok(),
                _ => {
                    return Err(CascadeError::parse(
                        bline,
                        format!("unknown box field `{k}`"),
                    ))
                }
            }
        }
        let (Some(nodes), Some(rows), Some(bits)) = (nodes, rows, bits) else {
            return Err(CascadeError::parse(
                bline,
                "box needs nodes=, rows= and bits=",
            ));
        };
        let window = forest
            .window(nodes)
            .map_err(|e| CascadeError::parse(bline, e.to_string()))?;
        let coordinate_box = CoordinateBox::new(window, rows, bits)
            .map_err(|e| CascadeError::parse(bline, e.to_string()))?;
        let (sline, stext) = next_header("support:")?;
        let support = forest
            .window(parse_node_list(&stext).map_err(|e| relocate(e, sline))?)
            .map_err(|e| CascadeError::parse(sline, e.to_string()))?;
        let mut packet_indices = BTreeMap::new();
        for (line, t) in lines {
            let (m, rest) = t
                .split_once(':')
                .ok_or_else(|| CascadeError::parse(line, "expected `m: k1,k2,...`"))?;
            let m: u32 = m
                .trim()
                .parse()
                .map_err(|_| CascadeError::parse(line, format!("bad family index `{m}`")))?;
            let ranks = rest
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<u128>()
                        .map_err(|_| CascadeError::parse(line, format!("bad index `{s}`")))
                })
                .collect::<Result<BTreeSet<_>>>()?;
            packet_indices.insert(m, ranks);
        }
        Ok(TwoLayerCode {
            coordinate_box,
            support,
            packet_indices,
        })
    }
}

/// Whether two names take the same value on every assignment of the box.
/// Exhaustive; intended for boxes of at most a few dozen coordinates.
pub fn same_semantics(
    x: &dyn RankOneName,
    y: &dyn RankOneName,
    cbox: &CoordinateBox,
) -> Result<bool> {
    if cbox.len() > MAX_SWEEP_BITS {
        return Err(CascadeError::domain(
            "box too large for an exhaustive comparison",
        ));
    }
    let cx = Compiled::new(x, cbox)?;
    let cy = Compiled::new(y, cbox)?;
    Ok((0u64..(1u64 << cbox.len())).all(|code| {
        let g = Assignment::from_code(cbox, code);
        cx.eval(&g) == cy.eval(&g)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::NodeId;

    fn c(n: u32, r: u32, b: u32) -> Coordinate {
        Coordinate::new(n, r, b)
    }

    fn cond(entries: &[(u32, u32, u32, bool)]) -> Condition {
        Condition::from_entries(entries.iter().map(|&(n, r, b, v)| (c(n, r, b), v))).unwrap()
    }

    /// fork 0 <- {1, 2}, one row, two bits: 6 coordinates
    fn setup() -> (PredecessorForest, CoordinateBox) {
        let f = PredecessorForest::star(3).unwrap();
        let b = CoordinateBox::new(f.full_window(), 1, 2).unwrap();
        (f, b)
    }

    #[test]
    fn box_indexing_round_trips() {
        let (_, b) = setup();
        assert_eq!(b.len(), 6);
        for k in 0..b.len() {
            assert_eq!(b.index_of(b.coordinate(k)), Some(k));
        }
        assert_eq!(b.index_of(c(0, 1, 0)), None);
        assert_eq!(b.index_of(c(3, 0, 0)), None);
    }

    #[test]
    fn evaluate_examples() {
        let (f, b) = setup();
        let r = cond(&[(0, 0, 0, true)]);
        let scheme = PacketScheme::new(
            f.window([NodeId(0)]).unwrap(),
            BTreeMap::from([(
                3,
                BTreeSet::from([Packet::certified(r.clone(), &f).unwrap()]),
            )]),
        )
        .unwrap();
        let g = Assignment::extending(&b, &r).unwrap();
        assert!(evaluate(&scheme, &g).unwrap().contains(&3));

        assert!(evaluate(&RawName::new(), &g).unwrap().is_empty());

        let p = cond(&[(1, 0, 0, true)]);
        let p2 = cond(&[(1, 0, 0, false)]);
        let name = RawName::from_pairs([(0, p), (0, p2.clone())]);
        let g = Assignment::extending(&b, &p2).unwrap();
        assert_eq!(evaluate(&name, &g).unwrap(), BTreeSet::from([0]));

        let outside = RawName::from_pairs([(0, cond(&[(0, 5, 0, true)]))]);
        assert!(evaluate(&outside, &g).is_err());
    }

    #[test]
    fn support_examples() {
        let (f, b) = setup();
        let a = f.window([NodeId(0)]).unwrap();
        let scheme_name = RawName::from_pairs([
            (0, cond(&[(0, 0, 1, true)])),
            (2, cond(&[(0, 0, 0, false)])),
        ]);
        let v = check_support(&scheme_name, &a, &b, &SweepConfig::default()).unwrap();
        assert!(v.supported && v.exhaustive);
        assert_eq!(v.assignments_checked, 64);

        let leaf = RawName::from_pairs([(0, cond(&[(2, 0, 1, true)]))]);
        let v = check_support(&leaf, &a, &b, &SweepConfig::default()).unwrap();
        assert!(!v.supported);
        let ce = v.counterexample.unwrap();
        assert!(ce.generator.node == NodeId(2) || ce.generator.node == NodeId(0));

        assert!(
            check_support(&RawName::new(), &a, &b, &SweepConfig::default())
                .unwrap()
                .supported
        );
    }

    #[test]
    fn decision_examples() {
        let (f, b) = setup();
        let a = f.window([NodeId(0)]).unwrap();
        let name = RawName::from_pairs([(0, cond(&[(0, 0, 1, true)]))]);
        let p = cond(&[(0, 0, 1, true), (0, 0, 0, false)]);
        assert!(decision_invariant(&name, &a, &p, 0, &b).unwrap());

        // p mentions a node off the support, so does the deciding coordinate
        let off = RawName::from_pairs([(0, cond(&[(1, 0, 0, true)]))]);
        let p = cond(&[(1, 0, 0, true)]);
        assert!(!decision_invariant(&off, &a, &p, 0, &b).unwrap());

        let undecided = cond(&[(0, 0, 0, true)]);
        assert!(matches!(
            decision_invariant(&name, &a, &undecided, 0, &b),
            Err(CascadeError::Precondition(_))
        ));
    }

    #[test]
    fn normalize_examples() {
        let (f, b) = setup();
        let a = f.window([NodeId(0)]).unwrap();
        let p = cond(&[(0, 0, 0, true)]);
        let name = RawName::from_pairs([(0, p.clone())]);
        let s = normalize(&name, &a, &b, &SweepConfig::default()).unwrap();
        assert_eq!(
            s.family(0)
                .map(|x| x.condition().clone())
                .collect::<Vec<_>>(),
            vec![p]
        );
        assert!(same_semantics(&s, &name, &b).unwrap());

        let empty = normalize(&RawName::new(), &a, &b, &SweepConfig::default()).unwrap();
        assert_eq!(empty.packet_count(), 0);

        // idempotence on a scheme-induced name
        let again = normalize(&s.to_raw_name(), &a, &b, &SweepConfig::default()).unwrap();
        assert_eq!(again, s);

        let unsupported = RawName::from_pairs([(0, cond(&[(1, 0, 0, true)]))]);
        assert!(matches!(
            normalize(&unsupported, &a, &b, &SweepConfig::default()),
            Err(CascadeError::Precondition(_))
        ));
    }

    #[test]
    fn normalize_collapses_an_orbit() {
        // (0, p ∧ x) for both values x of an off-support coordinate is the
        // same as (0, p)
        let (f, b) = setup();
        let a = f.window([NodeId(0)]).unwrap();
        let name = RawName::from_pairs([
            (1, cond(&[(0, 0, 0, true), (1, 0, 1, true)])),
            (1, cond(&[(0, 0, 0, true), (1, 0, 1, false)])),
        ]);
        let s = normalize(&name, &a, &b, &SweepConfig::default()).unwrap();
        let packets: Vec<_> = s.family(1).map(|p| p.condition().clone()).collect();
        assert_eq!(packets, vec![cond(&[(0, 0, 0, true)])]);
        assert!(same_semantics(&s, &name, &b).unwrap());
    }

    #[test]
    fn enumeration_matches_sorted_listing() {
        // oracle: list all 3^n conditions, sort the (index, value) lists
        let f = PredecessorForest::star(2).unwrap();
        let b = CoordinateBox::new(f.full_window(), 1, 2).unwrap();
        let n = b.len();
        let mut all: Vec<Vec<(usize, bool)>> = Vec::new();
        for code in 0..3usize.pow(n as u32) {
            let mut x = code;
            let mut list = Vec::new();
            for k in 0..n {
                match x % 3 {
                    1 => list.push((k, false)),
                    2 => list.push((k, true)),
                    _ => {}
                }
                x /= 3;
            }
            all.push(list);
        }
        all.sort();
        let e = PacketEnumeration::new(&b).unwrap();
        assert_eq!(e.total(), 81);
        for (k, list) in all.iter().enumerate() {
            let p: Condition = list.iter().map(|&(i, v)| (b.coordinate(i), v)).collect();
            assert_eq!(e.rank(&p).unwrap(), k as u128);
            assert_eq!(e.unrank(k as u128).unwrap(), p);
        }
        assert!(e.unrank(81).is_err());
    }

    #[test]
    fn code_examples() {
        let (f, b) = setup();
        let a = f.window([NodeId(0)]).unwrap();
        let empty = PacketScheme::new(a.clone(), BTreeMap::new()).unwrap();
        assert!(two_layer_code(&empty, &b)
            .unwrap()
            .packet_indices
            .is_empty());

        // {(0,0,1)=0}: prefix lists below it are [], and lists starting with
        // (0,0,0)=* : 1 + 2*3^5 = 487
        let p = cond(&[(0, 0, 1, false)]);
        let scheme = PacketScheme::new(
            a.clone(),
            BTreeMap::from([(4, BTreeSet::from([Packet::certified(p, &f).unwrap()]))]),
        )
        .unwrap();
        let code = two_layer_code(&scheme, &b).unwrap();
        assert_eq!(code.packet_indices[&4], BTreeSet::from([487]));
        assert_eq!(code.decode().unwrap(), scheme);

        let text = code.to_text();
        assert_eq!(
            text,
            "enumeration: lex-v1\nbox: nodes=0,1,2 rows=1 bits=2\nsupport: 0\n4: 487\n"
        );
        assert_eq!(TwoLayerCode::parse_text(&text, &f).unwrap(), code);
    }

    #[test]
    fn scheme_text_round_trip() {
        let (f, _) = setup();
        let a = f.window([NodeId(0), NodeId(1)]).unwrap();
        let packets = [cond(&[(0, 0, 1, true), (1, 0, 0, false)]), Condition::new()];
        let scheme = PacketScheme::new(
            a,
            BTreeMap::from([
                (
                    0,
                    packets
                        .iter()
                        .map(|p| Packet::certified(p.clone(), &f).unwrap())
                        .collect(),
                ),
                (
                    5,
                    BTreeSet::from([Packet::certified(cond(&[(1, 0, 1, true)]), &f).unwrap()]),
                ),
            ]),
        )
        .unwrap();
        let text = scheme.to_text();
        assert_eq!(
            text,
            "support: 0 1\n0: {} {0:0:1=1, 1:0:0=0}\n5: {1:0:1=1}\n"
        );
        assert_eq!(PacketScheme::parse_text(&text, &f).unwrap(), scheme);

        assert!(matches!(
            PacketScheme::parse_text("support: 0\n0: {2:0:0=1}\n", &f),
            Err(CascadeError::Domain(_))
        ));
        assert!(matches!(
            PacketScheme::parse_text("support: 0\n0: {2:0:0=7}\n", &f),
            Err(CascadeError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn scheme_rejects_packets_off_support() {
        let (f, _) = setup();
        let a = f.window([NodeId(0)]).unwrap();
        let off = Packet::certified(cond(&[(1, 0, 0, true)]), &f).unwrap();
        assert!(PacketScheme::new(a, BTreeMap::from([(0, BTreeSet::from([off]))])).is_err());
    }
}
