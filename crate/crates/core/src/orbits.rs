//! Finite 2-group actions and translation-invariant quotients of `F2^d`.
//!
//! Groups are small and kept as explicit element lists. A group is a
//! 2-group exactly when its order is a power of two, so that is the
//! certificate checked on construction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{CascadeError, Result};

/// A permutation of `0..n` in one-line notation: `self.0[x]` is the image of `x`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(pub Vec<u32>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n as u32).collect())
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut image: Vec<u32> = (0..n as u32).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x as usize >= n || std::mem::replace(&mut used[x as usize], true) {
                    return Err(CascadeError::domain(format!(
                        "bad cycle entry {x} for {n} points"
                    )));
                }
                image[x as usize] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation(image))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    pub fn is_valid(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        self.0
            .iter()
            .all(|&x| (x as usize) < seen.len() && !std::mem::replace(&mut seen[x as usize], true))
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(k, &x)| k as u32 == x)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (k, &x) in self.0.iter().enumerate() {
            inv[x as usize] = k as u32;
        }
        Permutation(inv)
    }

    pub fn pow(&self, mut e: usize) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.compose(self);
            k += 1;
        }
        k
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A finite 2-group of permutations of `0..set_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAction {
    set_size: usize,
    elements: Vec<Permutation>,
}

impl FiniteAction {
    /// Validates an explicit element list: identity, closure, inverses, and
    /// order a power of two.
    pub fn from_elements(
        set_size: usize,
        elements: impl IntoIterator<Item = Permutation>,
    ) -> Result<Self> {
        let set: BTreeSet<Permutation> = elements.into_iter().collect();
        for p in &set {
            if p.degree() != set_size || !p.is_valid() {
                return Err(CascadeError::domain(format!(
                    "{p:?} is not a permutation of {set_size} points"
                )));
            }
        }
        if !set.contains(&Permutation::identity(set_size)) {
            return Err(CascadeError::domain("element list lacks the identity"));
        }
        for a in &set {
            if !set.contains(&a.inverse()) {
                return Err(CascadeError::domain(format!("inverse of {a:?} missing")));
            }
            for b in &set {
                if !set.contains(&a.compose(b)) {
                    return Err(CascadeError::domain(format!(
                        "product of {a:?} and {b:?} missing"
                    )));
                }
            }
        }
        certify_two_group(set_size, set.into_iter().collect())
    }

    pub fn set_size(&self) -> usize {
        self.set_size
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

fn certify_two_group(set_size: usize, elements: Vec<Permutation>) -> Result<FiniteAction> {
    if elements.len().is_power_of_two() {
        return Ok(FiniteAction { set_size, elements });
    }
    // some element has order 2^k * q with q odd > 1; its 2^k-th power has order q
    for g in &elements {
        let order = g.order();
        let two_part = 1usize << order.trailing_zeros();
        if order != two_part {
            let witness = g.pow(two_part);
            return Err(CascadeError::NotTwoGroup {
                group_order: elements.len(),
                witness_order: witness.order(),
                witness: witness.0,
            });
        }
    }
    unreachable!("a group whose order is not a power of two has an element of odd prime order")
}

/// The group generated by `generators`, rejected unless it is a 2-group.
pub fn close_group(set_size: usize, generators: &[Permutation]) -> Result<FiniteAction> {
    for g in generators {
        if g.degree() != set_size || !g.is_valid() {
            return Err(CascadeError::domain(format!(
                "{g:?} is not a permutation of {set_size} points"
            )));
        }
    }
    let id = Permutation::identity(set_size);
    let mut seen: BTreeSet<Permutation> = BTreeSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = g.compose(&x);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    certify_two_group(set_size, seen.into_iter().collect())
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Orbits of the action, each sorted, listed by least element.
pub fn orbit_partition(action: &FiniteAction) -> Vec<Vec<u32>> {
    let n = action.set_size;
    let mut ds = DisjointSet::new(n);
    for g in &action.elements {
        for x in 0..n {
            ds.union(x, g.apply(x as u32) as usize);
        }
    }
    let mut orbits: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for x in 0..n {
        let root = ds.find(x);
        orbits.entry(root).or_default().push(x as u32);
    }
    orbits.into_values().collect()
}

/// The least point fixed by the whole group. Only defined for odd set size,
/// where one always exists.
pub fn odd_fixed_point(action: &FiniteAction) -> Result<u32> {
    if action.set_size.is_multiple_of(2) {
        return Err(CascadeError::Precondition(format!(
            "set size {} is even; no fixed point is guaranteed",
            action.set_size
        )));
    }
    Ok(orbit_partition(action)
        .into_iter()
        .filter(|o| o.len() == 1)
        .map(|o| o[0])
        .min()
        .expect("orbits of a 2-group on an odd set include a singleton"))
}

/// A labelling of `F2^d`; vector `v` is the integer whose bit `j` is
/// coordinate `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationPartition {
    dimension: u32,
    labels: Vec<u32>,
}

/// Largest supported dimension.
pub const MAX_DIMENSION: u32 = 20;

impl TranslationPartition {
    pub fn new(dimension: u32, labels: Vec<u32>) -> Result<Self> {
        if dimension > MAX_DIMENSION {
            return Err(CascadeError::domain(format!(
                "dimension {dimension} exceeds {MAX_DIMENSION}"
            )));
        }
        if labels.len() != 1usize << dimension {
            return Err(CascadeError::domain(format!(
                "{} labels for {} vectors",
                labels.len(),
                1usize << dimension
            )));
        }
        Ok(TranslationPartition { dimension, labels })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn label(&self, v: u32) -> u32 {
        self.labels[v as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// `d`, then one `bits label` line per vector.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.dimension);
        for (v, l) in self.labels.iter().enumerate() {
            out.push_str(&format!(
                "{} {l}\n",
                vector_string(v as u32, self.dimension)
            ));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines
            .next()
            .ok_or_else(|| CascadeError::parse(1, "missing dimension"))?;
        let d: u32 = header
            .parse()
            .map_err(|_| CascadeError::parse(hline, format!("bad dimension `{header}`")))?;
        if d > MAX_DIMENSION {
            return Err(CascadeError::parse(
                hline,
                format!("dimension {d} exceeds {MAX_DIMENSION}"),
            ));
        }
        let mut labels: Vec<Option<u32>> = vec![None; 1 << d];
        for (line, t) in lines {
            let fields: Vec<&str> = t.split_whitespace().collect();
            let [bits, label] = fields[..] else {
                return Err(CascadeError::parse(line, "expected `bits label`"));
            };
            if bits.len() != d as usize {
                return Err(CascadeError::parse(
                    line,
                    format!("vector `{bits}` does not have length {d}"),
                ));
            }
            let mut v = 0u32;
            for (j, ch) in bits.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => v |= 1 << j,
                    _ => return Err(CascadeError::parse(line, format!("bad bit `{ch}`"))),
                }
            }
            let label: u32 = label
                .parse()
                .map_err(|_| CascadeError::parse(line, format!("bad label `{label}`")))?;
            if labels[v as usize].replace(label).is_some() {
                return Err(CascadeError::parse(
                    line,
                    format!("vector `{bits}` labelled twice"),
                ));
            }
        }
        if let Some(v) = labels.iter().position(Option::is_none) {
            return Err(CascadeError::parse(
                text.lines().count(),
                format!("vector `{}` has no label", vector_string(v as u32, d)),
            ));
        }
        Self::new(d, labels.into_iter().map(Option::unwrap).collect())
    }
}

/// Coordinate `j` of `v` as the `j`-th character.
pub fn vector_string(v: u32, d: u32) -> String {
    (0..d)
        .map(|j| if (v >> j) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Result of [`quotient_analysis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientAnalysis {
    pub invariant: bool,
    /// Reduced basis of `W = {v : v ~ 0}` when invariant; empty otherwise.
    pub subspace_basis: Vec<u32>,
    /// Number of classes. Equals `2^(d - dim W)` when invariant.
    pub class_count: usize,
    /// `(q, q', v)` with `q ~ q'` but `q + v ≁ q' + v`, when not invariant.
    pub witness: Option<(u32, u32, u32)>,
}

/// XOR basis kept in reduced form, one vector per leading bit.
#[derive(Default)]
struct XorBasis {
    by_lead: BTreeMap<u32, u32>,
}

impl XorBasis {
    fn reduce(&self, mut v: u32) -> u32 {
        for (&lead, &b) in self.by_lead.iter().rev() {
            if (v >> lead) & 1 == 1 {
                v ^= b;
            }
        }
        v
    }

    fn insert(&mut self, v: u32) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let lead = 31 - r.leading_zeros();
        for b in self.by_lead.values_mut() {
            if (*b >> lead) & 1 == 1 {
                *b ^= r;
            }
        }
        self.by_lead.insert(lead, r);
        true
    }
}

/// Decides whether the labelling is invariant under translations and, if
/// so, identifies the class of `0` as a subspace whose cosets are the
/// classes.
pub fn quotient_analysis(partition: &TranslationPartition) -> QuotientAnalysis {
    let labels = &partition.labels;
    let n = labels.len() as u32;
    let class_count = labels.iter().collect::<BTreeSet<_>>().len();
    let base = labels[0];
    let fail = |w: (u32, u32, u32)| QuotientAnalysis {
        invariant: false,
        subspace_basis: Vec::new(),
        class_count,
        witness: Some(w),
    };

    // grow span(W) one independent member at a time, checking it stays in W
    let mut basis = XorBasis::default();
    let mut span: Vec<u32> = vec![0];
    for w in (0..n).filter(|&v| labels[v as usize] == base) {
        if basis.insert(w) {
            for k in 0..span.len() {
                let s = span[k];
                if labels[(s ^ w) as usize] != base {
                    return fail((0, s, w));
                }
                span.push(s ^ w);
            }
        }
    }
    let generators: Vec<u32> = basis.by_lead.values().copied().collect();

    // each class is a union of cosets of W ...
    for q in 0..n {
        for &b in &generators {
            if labels[(q ^ b) as usize] != labels[q as usize] {
                return fail((0, b, q));
            }
        }
    }
    // ... and distinct cosets carry distinct labels
    let mut rep_of: BTreeMap<u32, u32> = BTreeMap::new();
    for q in 0..n {
        let rep = basis.reduce(q);
        match rep_of.get(&labels[q as usize]) {
            Some(&other) if other != rep => {
                let q1 = (0..n)
                    .find(|&x| labels[x as usize] == labels[q as usize] && basis.reduce(x) == other)
                    .expect("representative was recorded from a member");
                return fail((q1, q, q1));
            }
            Some(_) => {}
            None => {
                rep_of.insert(labels[q as usize], rep);
            }
        }
    }
    debug_assert_eq!(class_count, (n as usize) >> generators.len());
    QuotientAnalysis {
        invariant: true,
        subspace_basis: generators,
        class_count,
        witness: None,
    }
}
