//! Finite flows and the algebra of their enveloping semigroups.
//!
//! A [`FiniteFlow`] is a finite state set with a list of generating self-maps.
//! [`TransMonoid::close`] produces the generated unital monoid, which for a
//! finite state set coincides with the enveloping semigroup. Composition is
//! `(p∘q)(x) = p(q(x))` throughout and the left ideal generated by `p` is
//! `{s∘p : s ∈ S}`.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::check::CheckList;

/// Default cap on the number of monoid elements.
pub const DEFAULT_ELEMENT_CAP: usize = 1_000_000;

/// Monoids at most this large get a dense composition table.
const DENSE_TABLE_LIMIT: usize = 256;

/// Index of an element inside a [`TransMonoid`].
pub type ElemId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("flow must have at least one state")]
    NoStates,
    #[error("flow must have at least one generator")]
    NoGenerators,
    #[error("generator {index} has {len} images, expected {states}")]
    GeneratorLength { index: usize, len: usize, states: usize },
    #[error("generator {index} maps state {state} to {image}, outside 0..{states}")]
    ImageOutOfRange { index: usize, state: usize, image: usize, states: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("monoid too large: more than {cap} elements")]
    MonoidTooLarge { cap: usize },
    #[error("element {0} is not idempotent")]
    NotIdempotent(ElemId),
    #[error("not a factor map: {0}")]
    NotFactor(String),
    #[error("state set {0:?} is not invariant")]
    NotInvariant(Vec<usize>),
}

/// A finite state set `0..states` with generating self-maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteFlow {
    states: usize,
    generators: Vec<Vec<usize>>,
}

impl FiniteFlow {
    pub fn new(states: usize, generators: Vec<Vec<usize>>) -> Result<Self, FlowError> {
        if states == 0 {
            return Err(FlowError::NoStates);
        }
        if generators.is_empty() {
            return Err(FlowError::NoGenerators);
        }
        for (index, g) in generators.iter().enumerate() {
            if g.len() != states {
                return Err(FlowError::GeneratorLength { index, len: g.len(), states });
            }
            if let Some((state, &image)) = g.iter().enumerate().find(|(_, &y)| y >= states) {
                return Err(FlowError::ImageOutOfRange { index, state, image, states });
            }
        }
        Ok(FiniteFlow { states, generators })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    /// Parses the line format: `states: N` followed by one image list per
    /// generator. Lines starting with `#` and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, FlowError> {
        let mut states = None;
        let mut generators = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match states {
                None => {
                    let rest = line.strip_prefix("states:").ok_or_else(|| FlowError::Parse {
                        line: line_no,
                        message: "expected `states: N`".into(),
                    })?;
                    let n = rest.trim().parse::<usize>().map_err(|e| FlowError::Parse {
                        line: line_no,
                        message: format!("bad state count: {e}"),
                    })?;
                    states = Some(n);
                }
                Some(n) => {
                    let images = line
                        .split_whitespace()
                        .map(|tok| tok.parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| FlowError::Parse {
                            line: line_no,
                            message: format!("bad image: {e}"),
                        })?;
                    if images.len() != n {
                        return Err(FlowError::Parse {
                            line: line_no,
                            message: format!("expected {n} images, found {}", images.len()),
                        });
                    }
                    generators.push(images);
                }
            }
        }
        let states = states.ok_or(FlowError::Parse { line: 0, message: "missing `states:` line".into() })?;
        FiniteFlow::new(states, generators)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("states: {}\n", self.states);
        for g in &self.generators {
            let line: Vec<String> = g.iter().map(|y| y.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn without_generator(&self, index: usize) -> Option<FiniteFlow> {
        if self.generators.len() <= 1 || index >= self.generators.len() {
            return None;
        }
        let mut generators = self.generators.clone();
        generators.remove(index);
        Some(FiniteFlow { states: self.states, generators })
    }

    /// Restricts the flow to an invariant subset. The subset's states are
    /// relabelled `0..k` in increasing order; the returned vector maps new
    /// labels to old ones.
    pub fn subflow(&self, subset: &[usize]) -> Result<(FiniteFlow, Vec<usize>), FlowError> {
        let mut members: Vec<usize> = subset.to_vec();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(FlowError::NoStates);
        }
        let mut relabel = vec![usize::MAX; self.states];
        for (new, &old) in members.iter().enumerate() {
            if old >= self.states {
                return Err(FlowError::NotInvariant(members.clone()));
            }
            relabel[old] = new;
        }
        let mut generators = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            let mut image = Vec::with_capacity(members.len());
            for &x in &members {
                let y = relabel[g[x]];
                if y == usize::MAX {
                    return Err(FlowError::NotInvariant(members.clone()));
                }
                image.push(y);
            }
            generators.push(image);
        }
        Ok((FiniteFlow { states: members.len(), generators }, members))
    }
}

/// The unital transformation monoid generated by a flow's generators.
///
/// Elements are numbered breadth-first by word length starting from the
/// identity (index 0); within one length they are ordered lexicographically
/// by image array.
#[derive(Clone, Debug)]
pub struct TransMonoid {
    degree: usize,
    data: Vec<u32>,
    index: HashMap<Box<[u32]>, ElemId>,
    generators: Vec<ElemId>,
    left_cayley: Vec<ElemId>,
    table: Option<Vec<u32>>,
}

impl TransMonoid {
    pub fn close(flow: &FiniteFlow) -> Result<Self, FlowError> {
        Self::close_with_cap(flow, DEFAULT_ELEMENT_CAP)
    }

    pub fn close_with_cap(flow: &FiniteFlow, cap: usize) -> Result<Self, FlowError> {
        let n = flow.states();
        let gens: Vec<Vec<u32>> =
            flow.generators().iter().map(|g| g.iter().map(|&y| y as u32).collect()).collect();
        let mut data: Vec<u32> = (0..n as u32).collect();
        let mut index: HashMap<Box<[u32]>, ElemId> = HashMap::new();
        index.insert(data.clone().into_boxed_slice(), 0);
        let mut frontier: Vec<ElemId> = vec![0];
        let mut buf = vec![0u32; n];
        while !frontier.is_empty() {
            let mut level: Vec<Vec<u32>> = Vec::new();
            for &p in &frontier {
                for g in &gens {
                    let pm = &data[p * n..(p + 1) * n];
                    for x in 0..n {
                        buf[x] = g[pm[x] as usize];
                    }
                    if !index.contains_key(buf.as_slice()) {
                        level.push(buf.clone());
                    }
                }
            }
            level.sort_unstable();
            level.dedup();
            frontier.clear();
            for map in level {
                let id = index.len();
                if id >= cap {
                    return Err(FlowError::MonoidTooLarge { cap });
                }
                data.extend_from_slice(&map);
                index.insert(map.into_boxed_slice(), id);
                frontier.push(id);
            }
        }
        let generators: Vec<ElemId> = gens.iter().map(|g| index[g.as_slice()]).collect();
        let len = index.len();
        let mut left_cayley = Vec::with_capacity(len * gens.len());
        for p in 0..len {
            let pm = &data[p * n..(p + 1) * n];
            for g in &gens {
                for x in 0..n {
                    buf[x] = g[pm[x] as usize];
                }
                left_cayley.push(index[buf.as_slice()]);
            }
        }
        let mut monoid = TransMonoid { degree: n, data, index, generators, left_cayley, table: None };
        if len <= DENSE_TABLE_LIMIT {
            let mut table = Vec::with_capacity(len * len);
            for p in 0..len {
                for q in 0..len {
                    table.push(monoid.compose_slow(p, q) as u32);
                }
            }
            monoid.table = Some(table);
        }
        Ok(monoid)
    }

    /// Number of states acted on.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn identity(&self) -> ElemId {
        0
    }

    pub fn generators(&self) -> &[ElemId] {
        &self.generators
    }

    pub fn element(&self, p: ElemId) -> &[u32] {
        &self.data[p * self.degree..(p + 1) * self.degree]
    }

    #[inline]
    pub fn apply(&self, p: ElemId, x: usize) -> usize {
        self.data[p * self.degree + x] as usize
    }

    pub fn lookup(&self, map: &[u32]) -> Option<ElemId> {
        self.index.get(map).copied()
    }

    /// `p∘q`, i.e. `x ↦ p(q(x))`.
    pub fn compose(&self, p: ElemId, q: ElemId) -> ElemId {
        match &self.table {
            Some(t) => t[p * self.len() + q] as usize,
            None => self.compose_slow(p, q),
        }
    }

    fn compose_slow(&self, p: ElemId, q: ElemId) -> ElemId {
        let pm = self.element(p);
        let map: Vec<u32> = self.element(q).iter().map(|&y| pm[y as usize]).collect();
        self.index[map.as_slice()]
    }

    /// `g∘p` for the `i`-th generator `g`.
    pub fn left_by_generator(&self, i: usize, p: ElemId) -> ElemId {
        self.left_cayley[p * self.generators.len() + i]
    }

    pub fn is_idempotent(&self, p: ElemId) -> bool {
        self.compose(p, p) == p
    }

    pub fn rank(&self, p: ElemId) -> usize {
        let mut seen = vec![false; self.degree];
        self.element(p).iter().filter(|&&y| !std::mem::replace(&mut seen[y as usize], true)).count()
    }

    pub fn elements(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks(self.degree)
    }

    /// A flow generated by every element; closing it gives back this monoid.
    pub fn as_flow(&self) -> FiniteFlow {
        let generators =
            self.elements().map(|m| m.iter().map(|&y| y as usize).collect()).collect();
        FiniteFlow { states: self.degree, generators }
    }

    /// The left ideal `{s∘p : s ∈ S}` by breadth-first search on the left
    /// Cayley graph.
    pub fn left_ideal_of(&self, p: ElemId) -> Vec<ElemId> {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([p]);
        seen[p] = true;
        let mut out = vec![];
        while let Some(q) = queue.pop_front() {
            out.push(q);
            for i in 0..self.generators.len() {
                let r = self.left_by_generator(i, q);
                if !seen[r] {
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Image of a state set under `p`, sorted and deduplicated.
    pub fn image_of_set(&self, p: ElemId, set: &[usize]) -> Vec<usize> {
        let mut img: Vec<usize> = set.iter().map(|&x| self.apply(p, x)).collect();
        img.sort_unstable();
        img.dedup();
        img
    }

    /// The orbit `{s(x) : s ∈ S}`.
    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        for p in 0..self.len() {
            seen[self.apply(p, x)] = true;
        }
        (0..self.degree).filter(|&y| seen[y]).collect()
    }

    /// Every orbit is the whole state set.
    pub fn is_minimal_flow(&self) -> bool {
        (0..self.degree).all(|x| self.orbit(x).len() == self.degree)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeftIdeal {
    pub members: Vec<ElemId>,
    pub is_minimal: bool,
}

impl LeftIdeal {
    pub fn contains(&self, p: ElemId) -> bool {
        self.members.binary_search(&p).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdempotentSet {
    pub members: Vec<ElemId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivIdempotentPair {
    pub u: ElemId,
    pub u_ideal: usize,
    pub v: ElemId,
    pub v_ideal: usize,
}

/// All inclusion-minimal left ideals, ordered by least member.
///
/// `S¹p` is the set reachable from `p` in the left Cayley graph, so the
/// minimal left ideals are exactly its terminal strongly connected components.
pub fn minimal_left_ideals(m: &TransMonoid) -> Vec<LeftIdeal> {
    let mut graph = DiGraph::<(), ()>::with_capacity(m.len(), m.len() * m.generators().len());
    let nodes: Vec<_> = (0..m.len()).map(|_| graph.add_node(())).collect();
    for p in 0..m.len() {
        for i in 0..m.generators().len() {
            let q = m.left_by_generator(i, p);
            if q != p {
                graph.add_edge(nodes[p], nodes[q], ());
            }
        }
    }
    let sccs = tarjan_scc(&graph);
    let mut comp = vec![0usize; m.len()];
    for (c, scc) in sccs.iter().enumerate() {
        for n in scc {
            comp[n.index()] = c;
        }
    }
    let mut ideals: Vec<LeftIdeal> = sccs
        .iter()
        .enumerate()
        .filter(|(c, scc)| {
            scc.iter().all(|n| {
                (0..m.generators().len()).all(|i| comp[m.left_by_generator(i, n.index())] == *c)
            })
        })
        .map(|(_, scc)| {
            let mut members: Vec<ElemId> = scc.iter().map(|n| n.index()).collect();
            members.sort_unstable();
            LeftIdeal { members, is_minimal: true }
        })
        .collect();
    ideals.sort_by_key(|i| i.members[0]);
    ideals
}

pub fn idempotents(m: &TransMonoid, ideal: &LeftIdeal) -> IdempotentSet {
    IdempotentSet { members: ideal.members.iter().copied().filter(|&p| m.is_idempotent(p)).collect() }
}

/// Minimal ideals together with their idempotents, computed once.
#[derive(Clone, Debug)]
pub struct MinimalStructure {
    ideals: Vec<LeftIdeal>,
    idempotents: Vec<IdempotentSet>,
    ideal_of: Vec<Option<usize>>,
}

impl MinimalStructure {
    pub fn new(m: &TransMonoid) -> Self {
        let ideals = minimal_left_ideals(m);
        let idempotents = ideals.iter().map(|i| idempotents(m, i)).collect();
        let mut ideal_of = vec![None; m.len()];
        for (k, ideal) in ideals.iter().enumerate() {
            for &p in &ideal.members {
                ideal_of[p] = Some(k);
            }
        }
        MinimalStructure { ideals, idempotents, ideal_of }
    }

    pub fn ideals(&self) -> &[LeftIdeal] {
        &self.ideals
    }

    pub fn idempotents_of(&self, ideal: usize) -> &[ElemId] {
        &self.idempotents[ideal].members
    }

    /// `J`, the minimal idempotents of every ideal, sorted.
    pub fn all_idempotents(&self) -> Vec<ElemId> {
        let mut all: Vec<ElemId> = self.idempotents.iter().flat_map(|s| s.members.iter().copied()).collect();
        all.sort_unstable();
        all
    }

    pub fn ideal_of(&self, p: ElemId) -> Option<usize> {
        self.ideal_of[p]
    }

    pub fn in_minimal_ideal(&self, p: ElemId) -> bool {
        self.ideal_of[p].is_some()
    }

    pub fn is_minimal_idempotent(&self, m: &TransMonoid, p: ElemId) -> bool {
        self.in_minimal_ideal(p) && m.is_idempotent(p)
    }

    /// The idempotent `u` of `p`'s ideal with `u∘p = p`, i.e. the identity of
    /// the group `uM` containing `p`.
    pub fn group_identity_of(&self, m: &TransMonoid, p: ElemId) -> Option<ElemId> {
        let k = self.ideal_of[p]?;
        self.idempotents_of(k).iter().copied().find(|&u| m.compose(u, p) == p)
    }

    /// Cross-ideal pairs `u ∼ v`: `u∘v = v` and `v∘u = u`.
    pub fn equivalent_pairs(&self, m: &TransMonoid) -> Vec<EquivIdempotentPair> {
        let mut out = vec![];
        for i in 0..self.ideals.len() {
            for j in i + 1..self.ideals.len() {
                for &u in self.idempotents_of(i) {
                    for &v in self.idempotents_of(j) {
                        if are_equivalent(m, u, v) {
                            out.push(EquivIdempotentPair { u, u_ideal: i, v, v_ideal: j });
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn are_equivalent(m: &TransMonoid, u: ElemId, v: ElemId) -> bool {
    m.compose(u, v) == v && m.compose(v, u) == u
}

pub fn equivalent_idempotents(m: &TransMonoid) -> Vec<EquivIdempotentPair> {
    MinimalStructure::new(m).equivalent_pairs(m)
}

/// `F_u = {x : u(x) = x}`.
pub fn fixed_point_set(m: &TransMonoid, u: ElemId) -> Result<Vec<usize>, FlowError> {
    if !m.is_idempotent(u) {
        return Err(FlowError::NotIdempotent(u));
    }
    Ok((0..m.degree()).filter(|&x| m.apply(u, x) == x).collect())
}

/// An equivariant surjection between flows with the same number of
/// generators, paired by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorMap {
    source: FiniteFlow,
    target: FiniteFlow,
    point_map: Vec<usize>,
}

impl FactorMap {
    pub fn new(source: FiniteFlow, target: FiniteFlow, point_map: Vec<usize>) -> Result<Self, FlowError> {
        if source.generators().len() != target.generators().len() {
            return Err(FlowError::NotFactor(format!(
                "generator counts differ: {} vs {}",
                source.generators().len(),
                target.generators().len()
            )));
        }
        if point_map.len() != source.states() {
            return Err(FlowError::NotFactor("point map length differs from source size".into()));
        }
        let mut hit = vec![false; target.states()];
        for &y in &point_map {
            if y >= target.states() {
                return Err(FlowError::NotFactor(format!("image {y} outside target")));
            }
            hit[y] = true;
        }
        if let Some(y) = hit.iter().position(|h| !h) {
            return Err(FlowError::NotFactor(format!("target state {y} not hit")));
        }
        for (i, (g, h)) in source.generators().iter().zip(target.generators()).enumerate() {
            for x in 0..source.states() {
                if point_map[g[x]] != h[point_map[x]] {
                    return Err(FlowError::NotFactor(format!(
                        "equivariance fails for generator {i} at state {x}"
                    )));
                }
            }
        }
        Ok(FactorMap { source, target, point_map })
    }

    pub fn identity(flow: &FiniteFlow) -> Self {
        FactorMap { source: flow.clone(), target: flow.clone(), point_map: (0..flow.states()).collect() }
    }

    pub fn source(&self) -> &FiniteFlow {
        &self.source
    }

    pub fn target(&self) -> &FiniteFlow {
        &self.target
    }

    pub fn point_map(&self) -> &[usize] {
        &self.point_map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.point_map[x]
    }

    /// States of the fiber over `y`, sorted.
    pub fn fiber(&self, y: usize) -> Vec<usize> {
        (0..self.source.states()).filter(|&x| self.point_map[x] == y).collect()
    }
}

/// The element map `θ` with `θ(p)∘π = π∘p`.
pub fn induced_theta(f: &FactorMap, source: &TransMonoid, target: &TransMonoid) -> Result<Vec<ElemId>, FlowError> {
    let ny = f.target().states();
    let mut theta = Vec::with_capacity(source.len());
    let mut map = vec![u32::MAX; ny];
    for p in 0..source.len() {
        map.iter_mut().for_each(|v| *v = u32::MAX);
        for x in 0..source.degree() {
            let y = f.apply(x);
            let img = f.apply(source.apply(p, x)) as u32;
            if map[y] == u32::MAX {
                map[y] = img;
            } else if map[y] != img {
                return Err(FlowError::NotFactor(format!(
                    "element {p} does not descend: fiber over {y} spreads"
                )));
            }
        }
        match target.lookup(&map) {
            Some(q) => theta.push(q),
            None => {
                return Err(FlowError::NotFactor(format!("image of element {p} is not in the target monoid")))
            }
        }
    }
    Ok(theta)
}

/// Exhaustive verification of the minimal-ideal algebra on one monoid.
pub fn verify_ideal_structure(m: &TransMonoid, ms: &MinimalStructure) -> CheckList {
    let mut checks = CheckList::new();
    checks.expect("minimal ideal exists", !ms.ideals().is_empty(), || json!(null));

    checks.expect_none(
        "Mp = M",
        ms.ideals().iter().enumerate().flat_map(|(k, ideal)| {
            ideal.members.iter().filter_map(move |&p| {
                let mut mp: Vec<ElemId> = ideal.members.iter().map(|&s| m.compose(s, p)).collect();
                mp.sort_unstable();
                mp.dedup();
                (mp != ideal.members).then(|| json!({"ideal": k, "p": p}))
            })
        }),
    );

    checks.expect_none(
        "J_M nonempty",
        (0..ms.ideals().len()).filter(|&k| ms.idempotents_of(k).is_empty()).map(|k| json!({"ideal": k})),
    );

    checks.expect_none(
        "pu = p",
        ms.ideals().iter().enumerate().flat_map(|(k, ideal)| {
            ms.idempotents_of(k).iter().flat_map(move |&u| {
                ideal.members.iter().filter(move |&&p| m.compose(p, u) != p).map(move |&p| json!({"p": p, "u": u}))
            })
        }),
    );

    let mut group_failures = vec![];
    let mut h_classes: Vec<(usize, ElemId, Vec<ElemId>)> = vec![];
    for (k, ideal) in ms.ideals().iter().enumerate() {
        for &u in ms.idempotents_of(k) {
            let mut g: Vec<ElemId> = ideal.members.iter().map(|&p| m.compose(u, p)).collect();
            g.sort_unstable();
            g.dedup();
            if let Err(why) = check_group(m, u, &g) {
                group_failures.push(json!({"ideal": k, "u": u, "reason": why}));
            }
            h_classes.push((k, u, g));
        }
    }
    checks.expect_none("uM is a group with identity u", group_failures);

    checks.expect_none(
        "uM ∩ vM = ∅ for u ≠ v in J_M",
        h_classes.iter().enumerate().flat_map(|(i, (k, u, g))| {
            h_classes[i + 1..].iter().filter_map(move |(k2, v, h)| {
                (k == k2 && g.iter().any(|p| h.binary_search(p).is_ok())).then(|| json!({"u": u, "v": v}))
            })
        }),
    );

    checks.expect_none(
        "distinct idempotents of one ideal are not equivalent",
        (0..ms.ideals().len()).flat_map(|k| {
            let js = ms.idempotents_of(k);
            js.iter().enumerate().flat_map(move |(i, &u)| {
                js[i + 1..].iter().filter(move |&&v| are_equivalent(m, u, v)).map(move |&v| json!({"u": u, "v": v}))
            })
        }),
    );

    checks.expect_none(
        "every idempotent has an equivalent partner in every other ideal",
        (0..ms.ideals().len()).flat_map(|k| {
            ms.idempotents_of(k).iter().flat_map(move |&u| {
                (0..ms.ideals().len()).filter(move |&k2| k2 != k).filter_map(move |k2| {
                    (!ms.idempotents_of(k2).iter().any(|&v| are_equivalent(m, u, v)))
                        .then(|| json!({"u": u, "ideal": k2}))
                })
            })
        }),
    );

    checks.expect_none(
        "F_u = uX",
        ms.all_idempotents().into_iter().filter_map(|u| {
            let fixed = fixed_point_set(m, u).ok()?;
            let image = m.image_of_set(u, &(0..m.degree()).collect::<Vec<_>>());
            (fixed != image).then(|| json!({"u": u}))
        }),
    );
    checks
}

fn check_group(m: &TransMonoid, u: ElemId, g: &[ElemId]) -> Result<(), String> {
    if g.binary_search(&u).is_err() {
        return Err("identity missing".into());
    }
    for &a in g {
        if m.compose(u, a) != a || m.compose(a, u) != a {
            return Err(format!("u is not an identity for {a}"));
        }
        let mut has_inverse = false;
        for &b in g {
            let ab = m.compose(a, b);
            if g.binary_search(&ab).is_err() {
                return Err(format!("not closed: {a}∘{b}"));
            }
            has_inverse |= ab == u;
        }
        if !has_inverse {
            return Err(format!("{a} has no inverse"));
        }
    }
    Ok(())
}

/// Checks that `θ` is a homomorphism mapping minimal ideals onto minimal
/// ideals.
pub fn verify_theta(
    source: &TransMonoid,
    target: &TransMonoid,
    theta: &[ElemId],
    source_ms: &MinimalStructure,
    target_ms: &MinimalStructure,
) -> CheckList {
    let mut checks = CheckList::new();
    // identity and right multiplication by generators determine the rest by
    // induction on word length
    let unit = (theta[source.identity()] != target.identity()).then(|| json!({"p": source.identity(), "q": source.identity()}));
    checks.expect_none(
        "θ(p∘q) = θ(p)∘θ(q)",
        unit.into_iter().chain((0..source.len()).flat_map(|p| {
            source.generators().iter().filter_map(move |&q| {
                (theta[source.compose(p, q)] != target.compose(theta[p], theta[q])).then(|| json!({"p": p, "q": q}))
            })
        })),
    );
    let mut images: Vec<Vec<ElemId>> = source_ms
        .ideals()
        .iter()
        .map(|i| {
            let mut img: Vec<ElemId> = i.members.iter().map(|&p| theta[p]).collect();
            img.sort_unstable();
            img.dedup();
            img
        })
        .collect();
    images.sort();
    images.dedup();
    let mut targets: Vec<Vec<ElemId>> = target_ms.ideals().iter().map(|i| i.members.clone()).collect();
    targets.sort();
    checks.expect("θ maps minimal ideals onto minimal ideals", images == targets, || {
        json!({"images": images, "target_ideals": targets})
    });
    checks
}
