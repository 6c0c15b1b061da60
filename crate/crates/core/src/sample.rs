//! Seeded generators for random test instances.
//!
//! Everything takes an explicit RNG so that a verification run is a pure
//! function of its seed.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::cascade::{CascadeAutomorphism, Condition, Coordinate};
use crate::error::Result;
use crate::forest::{NodeId, PredecessorForest, Window};
use crate::names::{decided_value, CoordinateBox, RankOneName, RawName};

pub fn forest<R: Rng>(rng: &mut R, universe_size: usize) -> PredecessorForest {
    PredecessorForest::random_with(universe_size.max(1), rng)
}

/// A random closed window with at most `max_len` nodes drawn from `within`
/// (the whole universe when `None`). May be empty.
pub fn window<R: Rng>(
    rng: &mut R,
    forest: &PredecessorForest,
    within: Option<&Window>,
    max_len: usize,
) -> Window {
    let pool: Vec<NodeId> = match within {
        Some(w) => w.nodes().to_vec(),
        None => forest.full_window().nodes().to_vec(),
    };
    let target = rng.random_range(0..=max_len.min(pool.len()));
    let mut order = pool;
    order.shuffle(rng);
    let mut nodes: BTreeSet<NodeId> = BTreeSet::new();
    for v in order {
        if nodes.len() >= target {
            break;
        }
        let closure = forest.rho_closure([v]).expect("node from the forest");
        let mut grown = nodes.clone();
        grown.extend(closure.nodes().iter().copied());
        if grown.len() <= max_len {
            nodes = grown;
        }
    }
    forest.window(nodes).expect("union of closures is closed")
}

/// A random nonempty closed window of exactly `len` nodes, or fewer if the
/// universe is smaller.
pub fn window_of_len<R: Rng>(rng: &mut R, forest: &PredecessorForest, len: usize) -> Window {
    let len = len.clamp(1, forest.universe_size());
    // grow from the root by adding random children of the current set
    let mut nodes: BTreeSet<NodeId> = BTreeSet::from([NodeId::ROOT]);
    while nodes.len() < len {
        let frontier: Vec<NodeId> = nodes
            .iter()
            .flat_map(|&v| forest.children(v).iter().copied())
            .filter(|c| !nodes.contains(c))
            .collect();
        match frontier.choose(rng) {
            Some(&c) => {
                nodes.insert(c);
            }
            None => break,
        }
    }
    forest.window(nodes).expect("grown downward from the root")
}

/// A random condition on `size` distinct coordinates of the box.
pub fn condition<R: Rng>(rng: &mut R, cbox: &CoordinateBox, size: usize) -> Condition {
    let mut idx: Vec<usize> = (0..cbox.len()).collect();
    idx.shuffle(rng);
    idx.into_iter()
        .take(size.min(cbox.len()))
        .map(|k| (cbox.coordinate(k), rng.random_bool(0.5)))
        .collect()
}

/// A random condition whose coordinates all lie over `a` (when `over_a`) or
/// all outside it.
pub fn condition_split<R: Rng>(
    rng: &mut R,
    cbox: &CoordinateBox,
    a: &Window,
    over_a: bool,
    size: usize,
) -> Condition {
    let mut idx: Vec<usize> = (0..cbox.len())
        .filter(|&k| a.contains(cbox.coordinate(k).node) == over_a)
        .collect();
    idx.shuffle(rng);
    idx.into_iter()
        .take(size)
        .map(|k| (cbox.coordinate(k), rng.random_bool(0.5)))
        .collect()
}

/// The orbit of `p` under the single-bit generators at box nodes outside `a`.
fn off_support_orbit(
    p: &Condition,
    a: &Window,
    cbox: &CoordinateBox,
) -> Result<BTreeSet<Condition>> {
    let forest = cbox.forest();
    let gens: Vec<CascadeAutomorphism> = cbox
        .off_support_generators(a)
        .into_iter()
        .map(|g| CascadeAutomorphism::generator(forest, g.node, g.row, g.toggles))
        .collect::<Result<_>>()?;
    let mut seen = BTreeSet::from([p.clone()]);
    let mut queue = VecDeque::from([p.clone()]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = g.apply(&x);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}

/// A random name supported by `a` over the box.
///
/// Each pair is built from a condition over `a` joined with the whole
/// off-support orbit of a small condition outside `a`, so the set of
/// assignments meeting some pair is invariant under every generator fixing
/// `a`. A few redundant extensions of existing pairs are added to give the
/// normal form something to discard.
pub fn supported_name<R: Rng>(
    rng: &mut R,
    cbox: &CoordinateBox,
    a: &Window,
    max_m: u32,
) -> Result<RawName> {
    let mut name = RawName::new();
    let pairs = rng.random_range(1..=3);
    for _ in 0..pairs {
        let m = rng.random_range(0..max_m.max(1));
        let (k_in, k_out) = (rng.random_range(0..=2), rng.random_range(0..=2));
        let core = condition_split(rng, cbox, a, true, k_in);
        let outside = condition_split(rng, cbox, a, false, k_out);
        for o in off_support_orbit(&outside, a, cbox)? {
            let mut p = core.clone();
            for (c, v) in o.iter() {
                p.insert(c, v);
            }
            name.insert(m, p);
        }
    }
    let existing: Vec<(u32, Condition)> = name.pairs().map(|(m, p)| (m, p.clone())).collect();
    for _ in 0..rng.random_range(0..=2) {
        let (m, p) = existing.choose(rng).expect("at least one pair").clone();
        let mut q = p.clone();
        let extra = condition(rng, cbox, 2);
        for (c, v) in extra.iter() {
            if q.get(c).is_none() {
                q.insert(c, v);
            }
        }
        name.insert(m, q);
    }
    Ok(name)
}

/// A one-pair name mentioning a single coordinate at the least box node
/// outside `a`; unsupported by `a` whenever such a node exists.
pub fn unsupported_name(cbox: &CoordinateBox, a: &Window) -> Option<RawName> {
    let node = cbox
        .nodes()
        .nodes()
        .iter()
        .copied()
        .find(|n| !a.contains(*n))?;
    let p = Condition::from_iter([(
        Coordinate {
            node,
            row: 0,
            bit: 0,
        },
        true,
    )]);
    Some(RawName::from_pairs([(0, p)]))
}

/// Extends `p` one random coordinate at a time until it decides `m`.
pub fn deciding_condition<R: Rng>(
    rng: &mut R,
    name: &RawName,
    cbox: &CoordinateBox,
    m: u32,
    start: Condition,
) -> Result<Condition> {
    let mut p = start;
    loop {
        if decided_value(name, &p, m, cbox)?.is_some() {
            return Ok(p);
        }
        let free: Vec<Coordinate> = cbox.coordinates().filter(|c| p.get(*c).is_none()).collect();
        let c = *free
            .choose(rng)
            .expect("a total condition decides everything");
        p.insert(c, rng.random_bool(0.5));
    }
}

/// A box of at most `max_coords` coordinates on a random forest, with the
/// node window drawn from the whole universe.
pub fn small_box<R: Rng>(rng: &mut R, max_coords: usize) -> CoordinateBox {
    let max_coords = max_coords.max(1);
    let rows = if max_coords >= 4 && rng.random_bool(0.3) {
        2
    } else {
        1
    };
    let bits = rng.random_range(1..=3.min(max_coords / rows).max(1)) as u32;
    let max_nodes = (max_coords / (rows * bits as usize)).max(1);
    let len = rng.random_range(1..=max_nodes.min(7));
    let extra = rng.random_range(0..=3);
    let f = forest(rng, len + extra);
    let w = window_of_len(rng, &f, len);
    CoordinateBox::new(w, rows as u32, bits).expect("nonempty box")
}
