//! Pair relations of a finite flow: P, D, Ω, SP and WD, together with the
//! product, quotient and factor checks built on them.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::check::CheckList;
use crate::finflow::{
    fixed_point_set, induced_theta, verify_ideal_structure, verify_theta, ElemId, FactorMap, FiniteFlow, FlowError,
    MinimalStructure, TransMonoid, DEFAULT_ELEMENT_CAP,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelationKind {
    #[serde(rename = "P")]
    Proximal,
    #[serde(rename = "D")]
    Distal,
    #[serde(rename = "Omega")]
    Omega,
    #[serde(rename = "SP")]
    StronglyProximal,
    #[serde(rename = "WD")]
    WeaklyDistal,
    #[serde(rename = "custom")]
    Custom,
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RelationKind::Proximal => "P",
            RelationKind::Distal => "D",
            RelationKind::Omega => "Omega",
            RelationKind::StronglyProximal => "SP",
            RelationKind::WeaklyDistal => "WD",
            RelationKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("proximal routes disagree on ({x}, {y}): collapser {collapser}, ideal route {ideal_route}")]
    ProximalRouteMismatch { x: usize, y: usize, collapser: bool, ideal_route: bool },
    #[error("not an icer: {property} fails at {witness:?}")]
    NotIcer { property: &'static str, witness: Vec<usize> },
    #[error("generator counts differ: {0} vs {1}")]
    GeneratorMismatch(usize, usize),
    #[error("relation is over {found} states, flow has {expected}")]
    SizeMismatch { expected: usize, found: usize },
}

/// A relation on `0..n` stored as a dense `n × n` bitset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairRelation {
    n: usize,
    kind: RelationKind,
    bits: FixedBitSet,
}

impl PairRelation {
    pub fn empty(n: usize, kind: RelationKind) -> Self {
        PairRelation { n, kind, bits: FixedBitSet::with_capacity(n * n) }
    }

    pub fn full(n: usize, kind: RelationKind) -> Self {
        let mut r = Self::empty(n, kind);
        r.bits.insert_range(..);
        r
    }

    pub fn diagonal(n: usize, kind: RelationKind) -> Self {
        Self::from_fn(n, kind, |x, y| x == y)
    }

    pub fn from_fn(n: usize, kind: RelationKind, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut r = Self::empty(n, kind);
        for x in 0..n {
            for y in 0..n {
                if f(x, y) {
                    r.bits.insert(x * n + y);
                }
            }
        }
        r
    }

    pub fn from_pairs(n: usize, kind: RelationKind, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(n, kind);
        for (x, y) in pairs {
            r.insert(x, y);
        }
        r
    }

    pub fn states(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> RelationKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: RelationKind) -> Self {
        self.kind = kind;
        self
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.bits.contains(x * self.n + y)
    }

    /// Inserts both `(x, y)` and `(y, x)`.
    pub fn insert(&mut self, x: usize, y: usize) {
        self.bits.insert(x * self.n + y);
        self.bits.insert(y * self.n + x);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// Ordered pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits.ones().map(move |i| (i / self.n, i % self.n))
    }

    /// Unordered pairs `x < y`.
    pub fn off_diagonal_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs().filter(|(x, y)| x < y)
    }

    pub fn complement(&self, kind: RelationKind) -> Self {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        PairRelation { n: self.n, kind, bits }
    }

    pub fn union(&self, other: &Self, kind: RelationKind) -> Self {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        PairRelation { n: self.n, kind, bits }
    }

    pub fn intersection(&self, other: &Self, kind: RelationKind) -> Self {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        PairRelation { n: self.n, kind, bits }
    }

    pub fn difference(&self, other: &Self, kind: RelationKind) -> Self {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        PairRelation { n: self.n, kind, bits }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn same_pairs(&self, other: &Self) -> bool {
        self.bits == other.bits
    }

    /// First pair of `self` missing from `other`.
    pub fn first_outside(&self, other: &Self) -> Option<(usize, usize)> {
        self.bits.difference(&other.bits).next().map(|i| (i / self.n, i % self.n))
    }

    pub fn is_diagonal(&self) -> bool {
        self.same_pairs(&Self::diagonal(self.n, self.kind))
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n * self.n
    }

    pub fn reflexivity_violation(&self) -> Option<usize> {
        (0..self.n).find(|&x| !self.contains(x, x))
    }

    pub fn symmetry_violation(&self) -> Option<(usize, usize)> {
        self.pairs().find(|&(x, y)| !self.contains(y, x))
    }

    pub fn transitivity_violation(&self) -> Option<(usize, usize, usize)> {
        for (x, y) in self.pairs() {
            for z in 0..self.n {
                if self.contains(y, z) && !self.contains(x, z) {
                    return Some((x, y, z));
                }
            }
        }
        None
    }

    pub fn is_equivalence(&self) -> bool {
        self.reflexivity_violation().is_none()
            && self.symmetry_violation().is_none()
            && self.transitivity_violation().is_none()
    }

    /// First `(generator, x, y)` with `(x, y)` in the relation but
    /// `(g x, g y)` not.
    pub fn invariance_violation(&self, flow: &FiniteFlow) -> Option<(usize, usize, usize)> {
        for (x, y) in self.pairs() {
            for (i, g) in flow.generators().iter().enumerate() {
                if !self.contains(g[x], g[y]) {
                    return Some((i, x, y));
                }
            }
        }
        None
    }

    pub fn is_invariant(&self, flow: &FiniteFlow) -> bool {
        self.invariance_violation(flow).is_none()
    }

    pub fn cell(&self, x: usize) -> Cell {
        Cell { center: x, members: (0..self.n).filter(|&y| self.contains(x, y)).collect(), kind: self.kind }
    }

    /// Classes of an equivalence relation, ordered by least member.
    pub fn classes(&self) -> Option<Vec<Vec<usize>>> {
        if !self.is_equivalence() {
            return None;
        }
        let mut seen = vec![false; self.n];
        let mut out = vec![];
        for x in 0..self.n {
            if seen[x] {
                continue;
            }
            let class: Vec<usize> = (0..self.n).filter(|&y| self.contains(x, y)).collect();
            for &y in &class {
                seen[y] = true;
            }
            out.push(class);
        }
        Some(out)
    }

    /// Image under `f × f` as a relation on `0..m`.
    pub fn image(&self, f: &[usize], m: usize, kind: RelationKind) -> Self {
        let mut r = Self::empty(m, kind);
        for (x, y) in self.pairs() {
            r.bits.insert(f[x] * m + f[y]);
        }
        r
    }

    /// `(f × f)^{-1}` of `self`, a relation on `0..f.len()`.
    pub fn preimage(&self, f: &[usize], kind: RelationKind) -> Self {
        Self::from_fn(f.len(), kind, |x, y| self.contains(f[x], f[y]))
    }
}

impl Serialize for PairRelation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            kind: RelationKind,
            states: usize,
            pairs: Vec<(usize, usize)>,
        }
        Repr { kind: self.kind, states: self.n, pairs: self.pairs().collect() }.serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub center: usize,
    pub members: Vec<usize>,
    pub kind: RelationKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// `p(x) = p(y)`.
    Collapser { element: ElemId },
    /// No element identifies the pair.
    NoCollapser,
    /// A minimal idempotent fixing both points.
    FixedBy { idempotent: ElemId },
    NoFixingIdempotent,
    /// Every element of every minimal ideal identifies the pair.
    EveryIdealCollapses { ideals: usize },
    /// `p ∈ ideal` separates the pair and `u` (with `u∘p = p`) fixes the
    /// separated images, an almost periodic off-diagonal limit.
    Separated { ideal: usize, element: ElemId, idempotent: ElemId, image: (usize, usize) },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: RelationKind,
    pub pair: (usize, usize),
    pub member: bool,
    pub witness: Witness,
}

/// Monoid, minimal structure and relation table of one flow.
#[derive(Clone, Debug)]
pub struct FlowAnalysis {
    pub flow: FiniteFlow,
    pub monoid: TransMonoid,
    pub structure: MinimalStructure,
    pub relations: RelationTable,
}

impl FlowAnalysis {
    pub fn new(flow: &FiniteFlow) -> Result<Self, RelationError> {
        Self::with_cap(flow, DEFAULT_ELEMENT_CAP)
    }

    pub fn with_cap(flow: &FiniteFlow, cap: usize) -> Result<Self, RelationError> {
        let monoid = TransMonoid::close_with_cap(flow, cap)?;
        let structure = MinimalStructure::new(&monoid);
        let relations = RelationTable::compute(&monoid, &structure)?;
        Ok(FlowAnalysis { flow: flow.clone(), monoid, structure, relations })
    }

    pub fn states(&self) -> usize {
        self.flow.states()
    }

    pub fn is_minimal(&self) -> bool {
        self.monoid.is_minimal_flow()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationTable {
    pub omega: PairRelation,
    pub proximal: PairRelation,
    pub strongly_proximal: PairRelation,
    pub distal: PairRelation,
    pub weakly_distal: PairRelation,
}

/// Pairs fixed by some minimal idempotent.
pub fn omega(m: &TransMonoid, ms: &MinimalStructure) -> PairRelation {
    let n = m.degree();
    let mut r = PairRelation::empty(n, RelationKind::Omega);
    for u in ms.all_idempotents() {
        let fixed = fixed_point_set(m, u).expect("minimal idempotent");
        for &x in &fixed {
            for &y in &fixed {
                r.bits.insert(x * n + y);
            }
        }
    }
    r
}

/// Pairs identified by some element, cross-checked against "some minimal
/// ideal identifies the pair entirely".
pub fn proximal(m: &TransMonoid, ms: &MinimalStructure) -> Result<PairRelation, RelationError> {
    let n = m.degree();
    let mut by_element = PairRelation::empty(n, RelationKind::Proximal);
    for p in 0..m.len() {
        mark_collapsed(m, p, &mut by_element);
    }
    let by_ideal = PairRelation::from_fn(n, RelationKind::Proximal, |x, y| {
        ms.ideals().iter().any(|ideal| ideal.members.iter().all(|&p| m.apply(p, x) == m.apply(p, y)))
    });
    if let Some((x, y)) = by_element.first_outside(&by_ideal).or_else(|| by_ideal.first_outside(&by_element)) {
        return Err(RelationError::ProximalRouteMismatch {
            x,
            y,
            collapser: by_element.contains(x, y),
            ideal_route: by_ideal.contains(x, y),
        });
    }
    Ok(by_element)
}

fn mark_collapsed(m: &TransMonoid, p: ElemId, r: &mut PairRelation) {
    let n = m.degree();
    let map = m.element(p);
    for x in 0..n {
        for y in x..n {
            if map[x] == map[y] {
                r.insert(x, y);
            }
        }
    }
}

/// Pairs identified by every element of every minimal ideal.
pub fn strongly_proximal(m: &TransMonoid, ms: &MinimalStructure) -> PairRelation {
    let n = m.degree();
    let mut r = PairRelation::full(n, RelationKind::StronglyProximal);
    for ideal in ms.ideals() {
        for &p in &ideal.members {
            let map = m.element(p);
            for x in 0..n {
                for y in 0..n {
                    if map[x] != map[y] {
                        r.bits.set(x * n + y, false);
                    }
                }
            }
        }
    }
    r
}

pub fn distal_rel(proximal: &PairRelation) -> PairRelation {
    proximal.complement(RelationKind::Distal)
}

pub fn weakly_distal_rel(strongly_proximal: &PairRelation) -> PairRelation {
    strongly_proximal.complement(RelationKind::WeaklyDistal)
}

impl RelationTable {
    pub fn compute(m: &TransMonoid, ms: &MinimalStructure) -> Result<Self, RelationError> {
        let omega = omega(m, ms);
        let proximal = proximal(m, ms)?;
        let strongly_proximal = strongly_proximal(m, ms);
        let distal = distal_rel(&proximal);
        let weakly_distal = weakly_distal_rel(&strongly_proximal);
        Ok(RelationTable { omega, proximal, strongly_proximal, distal, weakly_distal })
    }

    pub fn states(&self) -> usize {
        self.proximal.states()
    }

    pub fn get(&self, kind: RelationKind) -> Option<&PairRelation> {
        match kind {
            RelationKind::Proximal => Some(&self.proximal),
            RelationKind::Distal => Some(&self.distal),
            RelationKind::Omega => Some(&self.omega),
            RelationKind::StronglyProximal => Some(&self.strongly_proximal),
            RelationKind::WeaklyDistal => Some(&self.weakly_distal),
            RelationKind::Custom => None,
        }
    }

    pub fn verdict(&self, m: &TransMonoid, ms: &MinimalStructure, kind: RelationKind, x: usize, y: usize) -> Option<Verdict> {
        let collapser = || (0..m.len()).find(|&p| m.apply(p, x) == m.apply(p, y));
        let separated = || {
            ms.ideals().iter().enumerate().find_map(|(k, ideal)| {
                let p = *ideal.members.iter().find(|&&p| m.apply(p, x) != m.apply(p, y))?;
                let u = ms.group_identity_of(m, p)?;
                Some(Witness::Separated { ideal: k, element: p, idempotent: u, image: (m.apply(p, x), m.apply(p, y)) })
            })
        };
        let (member, witness) = match kind {
            RelationKind::Proximal | RelationKind::Distal => {
                let w = match collapser() {
                    Some(p) => Witness::Collapser { element: p },
                    None => Witness::NoCollapser,
                };
                let in_p = matches!(w, Witness::Collapser { .. });
                (if kind == RelationKind::Proximal { in_p } else { !in_p }, w)
            }
            RelationKind::Omega => {
                match ms.all_idempotents().into_iter().find(|&u| m.apply(u, x) == x && m.apply(u, y) == y) {
                    Some(u) => (true, Witness::FixedBy { idempotent: u }),
                    None => (false, Witness::NoFixingIdempotent),
                }
            }
            RelationKind::StronglyProximal | RelationKind::WeaklyDistal => {
                let w = separated().unwrap_or(Witness::EveryIdealCollapses { ideals: ms.ideals().len() });
                let in_sp = matches!(w, Witness::EveryIdealCollapses { .. });
                (if kind == RelationKind::StronglyProximal { in_sp } else { !in_sp }, w)
            }
            RelationKind::Custom => return None,
        };
        Some(Verdict { kind, pair: (x, y), member, witness })
    }

    /// Relation-level identities on one flow.
    pub fn verify(&self, flow: &FiniteFlow, m: &TransMonoid, ms: &MinimalStructure) -> CheckList {
        let n = self.states();
        let mut c = CheckList::new();
        let p = &self.proximal;
        let sp = &self.strongly_proximal;
        let d = &self.distal;
        let wd = &self.weakly_distal;
        let om = &self.omega;
        let pair = |v: Option<(usize, usize)>| v.map(|(x, y)| json!([x, y]));

        c.expect_none("SP is an equivalence relation", equivalence_witness(sp));
        c.expect_none(
            "P ⊔ D = X×X",
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| p.contains(x, y) == d.contains(x, y)).map(|(x, y)| json!([x, y])),
        );
        c.expect_none(
            "SP ⊔ WD = X×X",
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| sp.contains(x, y) == wd.contains(x, y)).map(|(x, y)| json!([x, y])),
        );
        c.expect_none("SP ⊆ P", pair(sp.first_outside(p)));
        c.expect_none("D ⊆ WD", pair(d.first_outside(wd)));
        let wd_formula = p.difference(sp, RelationKind::WeaklyDistal).union(d, RelationKind::WeaklyDistal);
        c.expect_none("WD = (P∖SP) ∪ D", pair(wd.first_outside(&wd_formula).or_else(|| wd_formula.first_outside(wd))));
        c.expect_none("P ∩ Ω ⊆ Δ", p.intersection(om, RelationKind::Custom).off_diagonal_pairs().next().map(|(x, y)| json!([x, y])));
        c.expect_none("D ∩ Δ = ∅", (0..n).filter(|&x| d.contains(x, x)).map(|x| json!(x)));

        let mut omega_cells = vec![];
        for x in 0..n {
            let mut union = vec![false; n];
            for u in ms.all_idempotents() {
                if m.apply(u, x) == x {
                    for y in fixed_point_set(m, u).expect("minimal idempotent") {
                        union[y] = true;
                    }
                }
            }
            let expected: Vec<usize> = (0..n).filter(|&y| union[y]).collect();
            if om.cell(x).members != expected {
                omega_cells.push(json!({"x": x, "cell": om.cell(x).members, "union": expected}));
            }
        }
        c.expect_none("Ω[x] = ⋃ fixed-point sets of minimal idempotents fixing x", omega_cells);

        c.expect_none(
            "(x,y) ∈ SP ⟺ s(x,y) ∈ P for every s",
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter_map(|(x, y)| {
                let all = (0..m.len()).all(|s| p.contains(m.apply(s, x), m.apply(s, y)));
                (all != sp.contains(x, y)).then(|| json!([x, y]))
            }),
        );
        c.expect_none(
            "(x,y) ∈ D ⟺ s(x,y) ∈ D for every s",
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter_map(|(x, y)| {
                let all = (0..m.len()).all(|s| d.contains(m.apply(s, x), m.apply(s, y)));
                (all != d.contains(x, y)).then(|| json!([x, y]))
            }),
        );
        for rel in [sp, d, om] {
            c.expect_none(
                &format!("{} is invariant", rel.kind()),
                rel.invariance_violation(flow).map(|(g, x, y)| json!({"generator": g, "pair": [x, y]})),
            );
        }
        c
    }
}

fn equivalence_witness(r: &PairRelation) -> Option<Value> {
    if let Some(x) = r.reflexivity_violation() {
        return Some(json!({"reflexive": x}));
    }
    if let Some((x, y)) = r.symmetry_violation() {
        return Some(json!({"symmetric": [x, y]}));
    }
    r.transitivity_violation().map(|(x, y, z)| json!({"transitive": [x, y, z]}))
}

/// P is an equivalence ⟺ one minimal ideal ⟺ P = SP, and the same for
/// "P is closed under the action".
pub fn check_unique_ideal_equiv(a: &FlowAnalysis) -> CheckList {
    let t = &a.relations;
    let m = &a.monoid;
    let n = a.states();
    let unique = a.structure.ideals().len() == 1;
    let p_equiv = t.proximal.is_equivalence();
    let p_is_sp = t.proximal.same_pairs(&t.strongly_proximal);
    let summary = json!({"unique_ideal": unique, "p_equivalence": p_equiv, "p_equals_sp": p_is_sp});
    let mut c = CheckList::new();
    c.expect("P equivalence ⟺ unique minimal ideal ⟺ P = SP", unique == p_equiv && unique == p_is_sp, || summary.clone());
    let escape = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| t.proximal.contains(x, y))
        .find_map(|(x, y)| {
            (0..m.len()).find(|&s| !t.proximal.contains(m.apply(s, x), m.apply(s, y))).map(|s| (x, y, s))
        });
    c.expect("P closed under the action ⟺ unique minimal ideal", escape.is_none() == unique, || {
        json!({"unique_ideal": unique, "escape": escape.map(|(x, y, s)| json!({"pair": [x, y], "element": s}))})
    });
    c
}

/// Coordinatewise action on `a.states() × b.states()`, state `(x, y)`
/// numbered `x * |B| + y`.
pub fn product_flow(a: &FiniteFlow, b: &FiniteFlow) -> Result<FiniteFlow, RelationError> {
    if a.generators().len() != b.generators().len() {
        return Err(RelationError::GeneratorMismatch(a.generators().len(), b.generators().len()));
    }
    let nb = b.states();
    let generators = a
        .generators()
        .iter()
        .zip(b.generators())
        .map(|(g, h)| (0..a.states() * nb).map(|s| g[s / nb] * nb + h[s % nb]).collect())
        .collect();
    Ok(FiniteFlow::new(a.states() * nb, generators)?)
}

/// Binary-product characterizations checked over every pair of product
/// points.
pub fn check_product_theorems(a: &FiniteFlow, b: &FiniteFlow, cap: usize) -> Result<CheckList, RelationError> {
    let prod = product_flow(a, b)?;
    let fx = FlowAnalysis::with_cap(a, cap)?;
    let fy = FlowAnalysis::with_cap(b, cap)?;
    let fp = FlowAnalysis::with_cap(&prod, cap)?;
    let nb = b.states();
    let proj_x: Vec<usize> = (0..prod.states()).map(|s| s / nb).collect();
    let proj_y: Vec<usize> = (0..prod.states()).map(|s| s % nb).collect();
    let theta_x = induced_theta(&FactorMap::new(prod.clone(), a.clone(), proj_x.clone())?, &fp.monoid, &fx.monoid)?;
    let theta_y = induced_theta(&FactorMap::new(prod.clone(), b.clone(), proj_y.clone())?, &fp.monoid, &fy.monoid)?;
    let (tx, ty, tp) = (&fx.relations, &fy.relations, &fp.relations);
    let ns = prod.states();
    let all_pairs = || (0..ns).flat_map(move |s| (0..ns).map(move |t| (s, t)));
    let split = |s: usize, t: usize| ((s / nb, t / nb), (s % nb, t % nb));
    let witness = |s: usize, t: usize| {
        let ((x, x2), (y, y2)) = split(s, t);
        json!({"points": [[x, y], [x2, y2]]})
    };
    let product_j = fp.structure.all_idempotents();

    let mut c = CheckList::new();
    c.expect_none(
        "SP(X×Y) ⟺ SP in both coordinates",
        all_pairs().filter_map(|(s, t)| {
            let ((x, x2), (y, y2)) = split(s, t);
            let rhs = tx.strongly_proximal.contains(x, x2) && ty.strongly_proximal.contains(y, y2);
            (tp.strongly_proximal.contains(s, t) != rhs).then(|| witness(s, t))
        }),
    );
    c.expect_none(
        "D(X×Y) ⟺ D in some coordinate",
        all_pairs().filter_map(|(s, t)| {
            let ((x, x2), (y, y2)) = split(s, t);
            let rhs = tx.distal.contains(x, x2) || ty.distal.contains(y, y2);
            (tp.distal.contains(s, t) != rhs).then(|| witness(s, t))
        }),
    );
    c.expect_none(
        "Ω(X×Y) ⟺ a common minimal idempotent fixes both coordinates",
        all_pairs().filter_map(|(s, t)| {
            let ((x, x2), (y, y2)) = split(s, t);
            let common = product_j.iter().any(|&w| {
                let (ux, uy) = (theta_x[w], theta_y[w]);
                fx.monoid.apply(ux, x) == x
                    && fx.monoid.apply(ux, x2) == x2
                    && fy.monoid.apply(uy, y) == y
                    && fy.monoid.apply(uy, y2) == y2
            });
            (tp.omega.contains(s, t) != common).then(|| witness(s, t))
        }),
    );
    c.expect_none(
        "Ω(X×Y) ⟹ Ω in both coordinates",
        all_pairs().filter_map(|(s, t)| {
            let ((x, x2), (y, y2)) = split(s, t);
            (tp.omega.contains(s, t) && !(tx.omega.contains(x, x2) && ty.omega.contains(y, y2))).then(|| witness(s, t))
        }),
    );
    c.expect_none(
        "WD(X×Y) ⟺ WD in some coordinate",
        all_pairs().filter_map(|(s, t)| {
            let ((x, x2), (y, y2)) = split(s, t);
            let rhs = tx.weakly_distal.contains(x, x2) || ty.weakly_distal.contains(y, y2);
            (tp.weakly_distal.contains(s, t) != rhs).then(|| witness(s, t))
        }),
    );
    for (name, proj, rel, target, n) in [
        ("X", &proj_x, &tp.strongly_proximal, &tx.strongly_proximal, a.states()),
        ("Y", &proj_y, &tp.strongly_proximal, &ty.strongly_proximal, nb),
    ] {
        let img = rel.image(proj, n, RelationKind::StronglyProximal);
        c.expect(&format!("π_{name}(SP(X×Y)) = SP({name})"), img.same_pairs(target), || {
            json!({"image": img.pairs().collect::<Vec<_>>()})
        });
    }
    for (name, proj, rel, target, n) in
        [("X", &proj_x, &tp.omega, &tx.omega, a.states()), ("Y", &proj_y, &tp.omega, &ty.omega, nb)]
    {
        let img = rel.image(proj, n, RelationKind::Omega);
        c.expect(&format!("π_{name}(Ω(X×Y)) = Ω({name})"), img.same_pairs(target), || {
            json!({"image": img.pairs().collect::<Vec<_>>()})
        });
    }
    for (name, proj, target, n) in
        [("X", &proj_x, &tx.proximal, a.states()), ("Y", &proj_y, &ty.proximal, nb)]
    {
        let img = tp.proximal.image(proj, n, RelationKind::Proximal);
        c.expect_none(&format!("π_{name}(P(X×Y)) ⊆ P({name})"), img.first_outside(target).map(|(x, y)| json!([x, y])));
    }
    let lhs = tp.proximal.is_equivalence();
    let rhs = tx.proximal.is_equivalence() && ty.proximal.is_equivalence();
    c.expect("P(X×Y) equivalence ⟺ P(X), P(Y) equivalences", lhs == rhs, || json!({"product": lhs, "factors": rhs}));
    Ok(c)
}

/// The factor onto the classes of an icer; class `k` is the `k`-th class
/// ordered by least member.
pub fn quotient_by_icer(flow: &FiniteFlow, relation: &PairRelation) -> Result<FactorMap, RelationError> {
    let n = flow.states();
    if relation.states() != n {
        return Err(RelationError::SizeMismatch { expected: n, found: relation.states() });
    }
    if let Some(x) = relation.reflexivity_violation() {
        return Err(RelationError::NotIcer { property: "reflexive", witness: vec![x] });
    }
    if let Some((x, y)) = relation.symmetry_violation() {
        return Err(RelationError::NotIcer { property: "symmetric", witness: vec![x, y] });
    }
    if let Some((x, y, z)) = relation.transitivity_violation() {
        return Err(RelationError::NotIcer { property: "transitive", witness: vec![x, y, z] });
    }
    if let Some((g, x, y)) = relation.invariance_violation(flow) {
        return Err(RelationError::NotIcer { property: "invariant", witness: vec![g, x, y] });
    }
    let classes = relation.classes().expect("equivalence checked");
    let mut class_of = vec![0; n];
    for (k, class) in classes.iter().enumerate() {
        for &x in class {
            class_of[x] = k;
        }
    }
    let generators = flow
        .generators()
        .iter()
        .map(|g| classes.iter().map(|class| class_of[g[class[0]]]).collect())
        .collect();
    let target = FiniteFlow::new(classes.len(), generators)?;
    Ok(FactorMap::new(flow.clone(), target, class_of)?)
}

/// Every fiber pairwise in `rel`.
fn fibers_within(f: &FactorMap, rel: &PairRelation, distinct_only: bool) -> bool {
    (0..f.target().states()).all(|y| {
        let fiber = f.fiber(y);
        fiber.iter().all(|&a| fiber.iter().all(|&b| (distinct_only && a == b) || rel.contains(a, b)))
    })
}

#[derive(Clone, Debug)]
pub struct FactorAnalysis {
    pub factor: FactorMap,
    pub source: FlowAnalysis,
    pub target: FlowAnalysis,
    pub theta: Vec<ElemId>,
}

impl FactorAnalysis {
    pub fn new(factor: FactorMap, cap: usize) -> Result<Self, RelationError> {
        let source = FlowAnalysis::with_cap(factor.source(), cap)?;
        let target = FlowAnalysis::with_cap(factor.target(), cap)?;
        let theta = induced_theta(&factor, &source.monoid, &target.monoid)?;
        Ok(FactorAnalysis { factor, source, target, theta })
    }

    pub fn is_proximal(&self) -> bool {
        fibers_within(&self.factor, &self.source.relations.proximal, false)
    }

    pub fn is_distal(&self) -> bool {
        fibers_within(&self.factor, &self.source.relations.distal, true)
    }
}

/// Image, preimage and fiber statements for one factor map.
pub fn check_factor_theorems(fa: &FactorAnalysis) -> CheckList {
    let f = fa.factor.point_map();
    let ny = fa.target.states();
    let (sx, sy) = (&fa.source.relations, &fa.target.relations);
    let pair = |v: Option<(usize, usize)>| v.map(|(x, y)| json!([x, y]));
    let proximal = fa.is_proximal();
    let distal = fa.is_distal();

    let mut c = CheckList::new();
    c.extend(verify_theta(&fa.source.monoid, &fa.target.monoid, &fa.theta, &fa.source.structure, &fa.target.structure));

    let p_img = sx.proximal.image(f, ny, RelationKind::Proximal);
    c.expect_none("π×π(P(X)) ⊆ P(Y)", pair(p_img.first_outside(&sy.proximal)));
    let d_img = sx.distal.image(f, ny, RelationKind::Distal);
    c.expect_none("π×π(D(X)) ⊇ D(Y)", pair(sy.distal.first_outside(&d_img)));
    let om_img = sx.omega.image(f, ny, RelationKind::Omega);
    c.expect_none("π×π(Ω(X)) = Ω(Y)", pair(om_img.first_outside(&sy.omega).or_else(|| sy.omega.first_outside(&om_img))));
    let sp_img = sx.strongly_proximal.image(f, ny, RelationKind::StronglyProximal);
    c.expect_none("π×π(SP(X)) ⊆ SP(Y)", pair(sp_img.first_outside(&sy.strongly_proximal)));

    let p_pre = sy.proximal.preimage(f, RelationKind::Proximal);
    let d_pre = sy.distal.preimage(f, RelationKind::Distal);
    let om_pre = sy.omega.preimage(f, RelationKind::Omega);
    let sp_pre = sy.strongly_proximal.preimage(f, RelationKind::StronglyProximal);
    let wd_pre = sy.weakly_distal.preimage(f, RelationKind::WeaklyDistal);
    c.expect_none("P(X) ⊆ (π×π)⁻¹P(Y)", pair(sx.proximal.first_outside(&p_pre)));
    c.expect_none("(π×π)⁻¹D(Y) ⊆ D(X)", pair(d_pre.first_outside(&sx.distal)));
    c.expect_none("Ω(X) ⊆ (π×π)⁻¹Ω(Y)", pair(sx.omega.first_outside(&om_pre)));
    c.expect_none("(π×π)⁻¹WD(Y) ⊆ WD(X)", pair(wd_pre.first_outside(&sx.weakly_distal)));

    if proximal {
        c.expect_none("π proximal ⟹ P(X) = (π×π)⁻¹P(Y)", pair(p_pre.first_outside(&sx.proximal)));
        c.expect_none("π proximal ⟹ SP(X) = (π×π)⁻¹SP(Y)", pair(sp_pre.first_outside(&sx.strongly_proximal).or_else(|| sx.strongly_proximal.first_outside(&sp_pre))));
        let wd_img = sx.weakly_distal.image(f, ny, RelationKind::WeaklyDistal);
        c.expect_none("π proximal ⟹ π×π(WD(X)) ⊆ WD(Y)", pair(wd_img.first_outside(&sy.weakly_distal)));
        let r_pi = PairRelation::from_fn(f.len(), RelationKind::Custom, |x, y| f[x] == f[y]);
        c.expect_none("π proximal ⟹ R_π ⊆ SP(X)", pair(r_pi.first_outside(&sx.strongly_proximal)));
    }
    if distal {
        c.expect_none("π distal ⟹ D(X) = (π×π)⁻¹D(Y)", pair(sx.distal.first_outside(&d_pre)));
        c.expect_none("π distal ⟹ Ω(X) = (π×π)⁻¹Ω(Y)", pair(om_pre.first_outside(&sx.omega)));
    }

    // Base points that are almost periodic: some minimal idempotent u of
    // E(X) has θ(u) fixing y, and u·π⁻¹(y) is an almost periodic subset.
    let source_j = fa.source.structure.all_idempotents();
    let target_j = fa.target.structure.all_idempotents();
    c.expect_none(
        "fiber over an almost periodic point contains an almost periodic set",
        (0..ny).filter_map(|y| {
            let ap = target_j.iter().any(|&w| fa.target.monoid.apply(w, y) == y);
            if !ap {
                return None;
            }
            let fiber = fa.factor.fiber(y);
            let ok = source_j.iter().any(|&u| {
                fa.target.monoid.apply(fa.theta[u], y) == y
                    && fa.source.monoid.image_of_set(u, &fiber).iter().all(|x| fiber.binary_search(x).is_ok())
            });
            (!ok).then(|| json!({"base_point": y}))
        }),
    );
    c
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SectionReport {
    Skipped { reason: String },
    Checked { checks: CheckList },
}

/// For a minimal target: `w ∈ E(Y)` minimal is idempotent iff `(w y, y) ∈
/// P(Y)` for every `y`; for `p` in a minimal ideal of `E(X)`, `θ(p)` is
/// idempotent iff `(π(p x), π(x)) ∈ P(Y)` for every `x`.
pub fn idempotent_section_check(fa: &FactorAnalysis) -> SectionReport {
    if !fa.target.is_minimal() {
        return SectionReport::Skipped { reason: "target flow is not minimal".into() };
    }
    let (my, ms_y) = (&fa.target.monoid, &fa.target.structure);
    let (mx, ms_x) = (&fa.source.monoid, &fa.source.structure);
    let py = &fa.target.relations.proximal;
    let mut c = CheckList::new();
    c.expect_none(
        "minimal w ∈ E(Y): w² = w ⟺ (w y, y) ∈ P(Y) ∀y",
        ms_y.ideals().iter().flat_map(|i| i.members.iter().copied()).filter_map(|w| {
            let cond = (0..my.degree()).all(|y| py.contains(my.apply(w, y), y));
            (cond != my.is_idempotent(w)).then(|| json!({"w": w}))
        }),
    );
    c.expect_none(
        "p minimal in E(X): θ(p)² = θ(p) ⟺ (π(p x), π(x)) ∈ P(Y) ∀x",
        ms_x.ideals().iter().flat_map(|i| i.members.iter().copied()).filter_map(|p| {
            let w = fa.theta[p];
            let cond = (0..mx.degree()).all(|x| py.contains(fa.factor.apply(mx.apply(p, x)), fa.factor.apply(x)));
            (cond != my.is_idempotent(w)).then(|| json!({"p": p, "theta": w}))
        }),
    );
    SectionReport::Checked { checks: c }
}

/// Everything checkable on a single flow.
pub fn check_flow(a: &FlowAnalysis) -> CheckList {
    let mut c = verify_ideal_structure(&a.monoid, &a.structure);
    c.extend(a.relations.verify(&a.flow, &a.monoid, &a.structure));
    c.extend(check_unique_ideal_equiv(a));
    c
}
