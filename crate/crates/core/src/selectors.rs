//! Equality patterns between rows, the complement-swap witness, canonical
//! selectors on trace-separated triples, and lifting choice through
//! products.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::cascade::{shield_set, CascadeAutomorphism, Condition, Coordinate, ToggleSet};
use crate::error::{CascadeError, Result};
use crate::forest::{NodeId, Window};
use crate::names::{Assignment, CoordinateBox, SweepConfig};

/// Bit `n` is set when rows `(β, i)` and `(γ, i)` agree at `n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EqualityPattern {
    bits: Vec<bool>,
}

impl EqualityPattern {
    pub fn window_bits(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn complement(&self) -> EqualityPattern {
        EqualityPattern {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

impl fmt::Display for EqualityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for EqualityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EqualityPattern({self})")
    }
}

pub fn equality_pattern(
    g: &Assignment<'_>,
    beta: NodeId,
    gamma: NodeId,
    row: u32,
) -> Result<EqualityPattern> {
    if beta == gamma {
        return Err(CascadeError::domain(
            "equality pattern needs two distinct nodes",
        ));
    }
    let bits = (0..g.coordinate_box().bits())
        .map(|n| {
            Ok(g.get(Coordinate {
                node: beta,
                row,
                bit: n,
            })? == g.get(Coordinate {
                node: gamma,
                row,
                bit: n,
            })?)
        })
        .collect::<Result<_>>()?;
    Ok(EqualityPattern { bits })
}

/// The three facts a swap witness certifies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapCertificate {
    /// `τ(q) = q`.
    pub condition_fixed: bool,
    /// `τ` toggles no row over the support.
    pub fixes_support: bool,
    /// On every checked assignment the equality pattern flips exactly at
    /// the toggled bits of the window.
    pub pattern_flips_on_toggle: bool,
    pub assignments_checked: usize,
    pub exhaustive: bool,
}

impl SwapCertificate {
    pub fn all_pass(&self) -> bool {
        self.condition_fixed && self.fixes_support && self.pattern_flips_on_toggle
    }
}

/// A fresh pair `(β, γ)` and a cofinite toggle on row `(β, i)` that fixes
/// the condition and the support while exchanging the equality pattern of
/// the pair with its complement on the toggled bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapWitness {
    pub beta: NodeId,
    pub gamma: NodeId,
    pub row: u32,
    pub shield: BTreeSet<u32>,
    pub toggle: ToggleSet,
    pub certificate: SwapCertificate,
}

impl SwapWitness {
    pub fn automorphism(&self, cbox: &CoordinateBox) -> Result<CascadeAutomorphism> {
        CascadeAutomorphism::generator(cbox.forest(), self.beta, self.row, self.toggle.clone())
    }

    pub fn to_text(&self) -> String {
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let shield: Vec<String> = self.shield.iter().map(u32::to_string).collect();
        let c = &self.certificate;
        format!(
            "swap-witness\n\
             beta: {}\n\
             gamma: {}\n\
             row: {}\n\
             shield: {{{}}}\n\
             toggle: {}\n\
             condition-fixed: {}\n\
             fixes-support: {}\n\
             pattern-flipped: {} ({} assignments, {})\n",
            self.beta,
            self.gamma,
            self.row,
            shield.join(","),
            self.toggle,
            verdict(c.condition_fixed),
            verdict(c.fixes_support),
            verdict(c.pattern_flips_on_toggle),
            c.assignments_checked,
            if c.exhaustive {
                "exhaustive"
            } else {
                "sampled"
            },
        )
    }
}

/// Builds and certifies the complement-swap witness for `q` against the
/// support `a` on row `row`.
///
/// The fresh pair comes from [`PredecessorForest::fresh_separation`]
/// and must lie in the box; the toggle is `ω ∖ shield`.
///
/// [`PredecessorForest::fresh_separation`]: crate::forest::PredecessorForest::fresh_separation
pub fn swap_witness(
    q: &Condition,
    a: &Window,
    row: u32,
    cbox: &CoordinateBox,
    config: &SweepConfig,
) -> Result<SwapWitness> {
    let forest = cbox.forest();
    let (beta, gamma) = forest.fresh_separation(a)?;
    if !cbox.nodes().contains(beta) || !cbox.nodes().contains(gamma) {
        return Err(CascadeError::Capacity(format!(
            "fresh pair ({beta}, {gamma}) does not fit in the box nodes {}",
            cbox.nodes()
        )));
    }
    if row >= cbox.rows() {
        return Err(CascadeError::domain(format!("row {row} outside the box")));
    }
    let shield = shield_set(q, beta, row, forest)?;
    let toggle = ToggleSet::cofinite(shield.iter().copied());
    let tau = CascadeAutomorphism::generator(forest, beta, row, toggle.clone())?;

    let condition_fixed = tau.apply(q) == *q;
    let fixes_support = tau.fixes_rows_over(a)?;

    let mut pattern_ok = true;
    let (exhaustive, checked) = config.for_each_assignment(cbox, |g| {
        let before = equality_pattern(g, beta, gamma, row).expect("pair lies in the box");
        let after =
            equality_pattern(&g.apply(&tau), beta, gamma, row).expect("pair lies in the box");
        let ok = (0..cbox.bits()).all(|n| {
            let flipped = before.bits[n as usize] != after.bits[n as usize];
            flipped == toggle.contains(n)
        });
        pattern_ok &= ok;
        ok
    });

    Ok(SwapWitness {
        beta,
        gamma,
        row,
        shield,
        toggle,
        certificate: SwapCertificate {
            condition_fixed,
            fixes_support,
            pattern_flips_on_toggle: pattern_ok,
            assignments_checked: checked,
            exhaustive,
        },
    })
}

/// The set of nodes supporting one member of a family, inside a fixed window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceProfile {
    window: Window,
    nodes: BTreeSet<NodeId>,
}

impl TraceProfile {
    pub fn new(window: &Window, nodes: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let nodes: BTreeSet<NodeId> = nodes.into_iter().collect();
        if let Some(n) = nodes.iter().find(|n| !window.contains(**n)) {
            return Err(CascadeError::domain(format!(
                "profile node {n} outside window {window}"
            )));
        }
        Ok(TraceProfile {
            window: window.clone(),
            nodes,
        })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    /// Characteristic sequence in the window's ascending node order.
    pub fn code(&self) -> Vec<bool> {
        self.window
            .nodes()
            .iter()
            .map(|n| self.nodes.contains(n))
            .collect()
    }
}

/// Index of the profile with the lexicographically least code.
pub fn canonical_selector(profiles: &[TraceProfile]) -> Result<usize> {
    if profiles.len() != 3 {
        return Err(CascadeError::domain(format!(
            "expected 3 profiles, got {}",
            profiles.len()
        )));
    }
    if profiles.iter().any(|p| p.window != profiles[0].window) {
        return Err(CascadeError::domain("profiles live in different windows"));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if profiles[i].nodes == profiles[j].nodes {
                return Err(CascadeError::NotTraceSeparated(i, j));
            }
        }
    }
    Ok((0..3)
        .min_by_key(|&k| profiles[k].code())
        .expect("three profiles"))
}

/// Nonempty sets `A_t` of element ids, indexed by `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedFamily {
    sets: BTreeMap<u32, BTreeSet<u32>>,
}

impl IndexedFamily {
    pub fn new(sets: BTreeMap<u32, BTreeSet<u32>>) -> Result<Self> {
        if let Some((t, _)) = sets.iter().find(|(_, s)| s.is_empty()) {
            return Err(CascadeError::domain(format!(
                "member {t} of the family is empty"
            )));
        }
        Ok(IndexedFamily { sets })
    }

    pub fn sets(&self) -> &BTreeMap<u32, BTreeSet<u32>> {
        &self.sets
    }

    pub fn is_choice(&self, f: &BTreeMap<u32, u32>) -> bool {
        f.len() == self.sets.len()
            && self
                .sets
                .iter()
                .all(|(t, s)| f.get(t).is_some_and(|a| s.contains(a)))
    }
}

/// Projects a choice function on `t ↦ A_t × {0..k}` to one on `t ↦ A_t`.
pub fn lift_choice(
    family: &IndexedFamily,
    k: u32,
    f: &BTreeMap<u32, (u32, u32)>,
) -> Result<BTreeMap<u32, u32>> {
    if let Some(t) = f.keys().find(|t| !family.sets.contains_key(t)) {
        return Err(CascadeError::domain(format!(
            "choice map defined at {t}, which is not an index"
        )));
    }
    family
        .sets
        .iter()
        .map(|(t, set)| match f.get(t) {
            Some(&(a, j)) if set.contains(&a) && j < k => Ok((*t, a)),
            Some(&(a, j)) => Err(CascadeError::domain(format!(
                "choice ({a}, {j}) at {t} lies outside A_{t} × [{k}]"
            ))),
            None => Err(CascadeError::domain(format!("choice map undefined at {t}"))),
        })
        .collect()
}
