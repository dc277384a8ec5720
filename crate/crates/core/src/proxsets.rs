//! Proximal, I-proximal and strongly proximal sets of a finite flow.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::check::CheckList;
use crate::finflow::{ElemId, MinimalStructure, TransMonoid};
use crate::relations::{FlowAnalysis, PairRelation, RelationKind};

/// Largest candidate size enumerated by [`check_ra_proximal_equiv`].
pub const RA_SUBSET_CAP: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProxError {
    #[error("empty state set")]
    Empty,
    #[error("set {0:?} is proximal but no minimal ideal collapses it")]
    NoCollapsingIdeal(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProximalSet {
    pub members: Vec<usize>,
    pub collapser: ElemId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IProximalSet {
    pub ideal: usize,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StronglyProximalSet {
    pub members: Vec<usize>,
    pub maximal: bool,
}

fn collapses(m: &TransMonoid, p: ElemId, set: &[usize]) -> bool {
    set.iter().all(|&x| m.apply(p, x) == m.apply(p, set[0]))
}

/// Some element with a singleton image on `set`.
pub fn is_proximal_set(m: &TransMonoid, set: &[usize]) -> Result<Option<ProximalSet>, ProxError> {
    if set.is_empty() {
        return Err(ProxError::Empty);
    }
    Ok((0..m.len())
        .find(|&p| collapses(m, p, set))
        .map(|p| ProximalSet { members: sorted(set), collapser: p }))
}

/// A minimal ideal every element of which collapses `set`.
pub fn minimal_ideal_collapse(m: &TransMonoid, ms: &MinimalStructure, set: &[usize]) -> Result<Option<usize>, ProxError> {
    let found = ms.ideals().iter().position(|ideal| ideal.members.iter().all(|&p| collapses(m, p, set)));
    if found.is_none() && is_proximal_set(m, set)?.is_some() {
        return Err(ProxError::NoCollapsingIdeal(sorted(set)));
    }
    Ok(found)
}

/// Classes of `x ≃ y ⟺ p(x) = p(y) for all p in the ideal`.
pub fn i_proximal_partition(m: &TransMonoid, ms: &MinimalStructure, ideal: usize) -> Vec<IProximalSet> {
    let members = &ms.ideals()[ideal].members;
    partition_by(m.degree(), |x, y| members.iter().all(|&p| m.apply(p, x) == m.apply(p, y)))
        .into_iter()
        .map(|members| IProximalSet { ideal, members })
        .collect()
}

/// Classes of `x ≡ y ⟺ p(x) = p(y) for every p in every minimal ideal`.
pub fn max_strongly_proximal_sets(m: &TransMonoid, ms: &MinimalStructure) -> Vec<StronglyProximalSet> {
    partition_by(m.degree(), |x, y| {
        ms.ideals().iter().all(|i| i.members.iter().all(|&p| m.apply(p, x) == m.apply(p, y)))
    })
    .into_iter()
    .map(|members| StronglyProximalSet { members, maximal: true })
    .collect()
}

fn partition_by(n: usize, mut same: impl FnMut(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = vec![];
    for x in 0..n {
        match classes.iter().position(|c| same(c[0], x)) {
            Some(k) => classes[k].push(x),
            None => classes.push(vec![x]),
        }
    }
    classes
}

fn sorted(set: &[usize]) -> Vec<usize> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Distinct maximal fibers of all elements; a set is proximal iff it lies
/// inside one of them.
pub struct FiberIndex {
    n: usize,
    fibers: Vec<FixedBitSet>,
}

impl FiberIndex {
    pub fn new(m: &TransMonoid) -> Self {
        let n = m.degree();
        let mut fibers: Vec<FixedBitSet> = vec![];
        for p in 0..m.len() {
            let map = m.element(p);
            for y in 0..n as u32 {
                let mut f = FixedBitSet::with_capacity(n);
                for (x, &img) in map.iter().enumerate() {
                    if img == y {
                        f.insert(x);
                    }
                }
                if f.count_ones(..) > 1 {
                    fibers.push(f);
                }
            }
        }
        fibers.sort_by_key(|f| std::cmp::Reverse(f.count_ones(..)));
        let mut maximal: Vec<FixedBitSet> = vec![];
        for f in fibers {
            if !maximal.iter().any(|g| f.is_subset(g)) {
                maximal.push(f);
            }
        }
        FiberIndex { n, fibers: maximal }
    }

    pub fn is_proximal(&self, set: &[usize]) -> bool {
        let mut distinct = set.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() <= 1 {
            return true;
        }
        let mut s = FixedBitSet::with_capacity(self.n);
        s.extend(distinct);
        self.fibers.iter().any(|f| s.is_subset(f))
    }
}

fn subsets_up_to(n: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut current = vec![];
    fn rec(start: usize, n: usize, cap: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        if current.len() == cap {
            return;
        }
        for x in start..n {
            current.push(x);
            rec(x + 1, n, cap, current, out);
            current.pop();
        }
    }
    rec(0, n, cap, &mut current, &mut out);
    out
}

/// P is an equivalence ⟺ every translate `r(A)` of a proximal set `A` is
/// proximal. Candidates are all proximal sets of size at most
/// [`RA_SUBSET_CAP`] together with every I-proximal class.
pub fn check_ra_proximal_equiv(a: &FlowAnalysis) -> CheckList {
    let m = &a.monoid;
    let index = FiberIndex::new(m);
    let mut candidates: Vec<Vec<usize>> =
        subsets_up_to(m.degree(), RA_SUBSET_CAP).into_iter().filter(|s| index.is_proximal(s)).collect();
    for k in 0..a.structure.ideals().len() {
        candidates.extend(i_proximal_partition(m, &a.structure, k).into_iter().map(|c| c.members));
    }
    candidates.sort();
    candidates.dedup();
    let escape = candidates.iter().find_map(|set| {
        (0..m.len()).find_map(|r| {
            let img = m.image_of_set(r, set);
            (!index.is_proximal(&img)).then(|| (set.clone(), r, img))
        })
    });
    let p_equiv = a.relations.proximal.is_equivalence();
    let mut c = CheckList::new();
    c.expect("P equivalence ⟺ r(A) proximal for all proximal A and all r", p_equiv == escape.is_none(), || {
        json!({
            "p_equivalence": p_equiv,
            "escape": escape.as_ref().map(|(s, r, img)| json!({"set": s, "element": r, "image": img})),
        })
    });
    c
}

/// Set-level statements for one flow.
pub fn check_proxsets(a: &FlowAnalysis) -> CheckList {
    let (m, ms) = (&a.monoid, &a.structure);
    let n = m.degree();
    let mut c = CheckList::new();
    let partitions: Vec<Vec<IProximalSet>> = (0..ms.ideals().len()).map(|k| i_proximal_partition(m, ms, k)).collect();
    let strongly = max_strongly_proximal_sets(m, ms);

    c.expect_none(
        "I-proximal classes are collapsed by the ideal and maximal",
        partitions.iter().flatten().filter_map(|class| {
            let members = &ms.ideals()[class.ideal].members;
            let collapsed = members.iter().all(|&p| collapses(m, p, &class.members));
            let extendable = (0..n).filter(|x| class.members.binary_search(x).is_err()).any(|x| {
                let mut bigger = class.members.clone();
                bigger.push(x);
                members.iter().all(|&p| collapses(m, p, &bigger))
            });
            (!collapsed || extendable).then(|| json!({"ideal": class.ideal, "class": class.members}))
        }),
    );
    c.expect_none(
        "distinct I-proximal classes have distinct images",
        partitions.iter().enumerate().flat_map(|(k, classes)| {
            let members = &ms.ideals()[k].members;
            classes.iter().enumerate().flat_map(move |(i, a)| {
                classes[i + 1..].iter().filter_map(move |b| {
                    members
                        .iter()
                        .find(|&&p| m.apply(p, a.members[0]) == m.apply(p, b.members[0]))
                        .map(|&p| json!({"ideal": k, "a": a.members, "b": b.members, "p": p}))
                })
            })
        }),
    );
    c.expect_none(
        "I-proximal classes contain an almost periodic point and are J_I-closed",
        partitions.iter().flatten().filter_map(|class| {
            let js = ms.idempotents_of(class.ideal);
            let has_ap = class.members.iter().any(|&x| js.iter().any(|&u| m.apply(u, x) == x));
            let closed = js.iter().all(|&u| class.members.iter().all(|&x| class.members.binary_search(&m.apply(u, x)).is_ok()));
            (!has_ap || !closed).then(|| json!({"ideal": class.ideal, "class": class.members}))
        }),
    );

    let mut intersections: Vec<Vec<usize>> = vec![];
    let mut choice = vec![0usize; partitions.len()];
    'outer: loop {
        let mut inter: Vec<usize> = (0..n).collect();
        for (k, &i) in choice.iter().enumerate() {
            inter.retain(|x| partitions[k][i].members.binary_search(x).is_ok());
        }
        if !inter.is_empty() {
            intersections.push(inter);
        }
        for k in 0..choice.len() {
            choice[k] += 1;
            if choice[k] < partitions[k].len() {
                continue 'outer;
            }
            choice[k] = 0;
        }
        break;
    }
    intersections.sort();
    let mut refinement: Vec<Vec<usize>> = strongly.iter().map(|s| s.members.clone()).collect();
    refinement.sort();
    c.expect("maximal strongly proximal sets = intersections of per-ideal classes", refinement == intersections, || {
        json!({"refinement": refinement, "intersections": intersections})
    });

    let union = PairRelation::from_fn(n, RelationKind::StronglyProximal, |x, y| {
        strongly.iter().any(|s| s.members.binary_search(&x).is_ok() && s.members.binary_search(&y).is_ok())
    });
    let sp = &a.relations.strongly_proximal;
    c.expect_none(
        "SP = ⋃ A×A over maximal strongly proximal sets",
        union.first_outside(sp).or_else(|| sp.first_outside(&union)).map(|(x, y)| json!([x, y])),
    );
    c.expect_none(
        "maximal strongly proximal sets are pairwise disjoint",
        strongly.iter().enumerate().flat_map(|(i, s)| {
            strongly[i + 1..]
                .iter()
                .filter(move |t| t.members.iter().any(|x| s.members.binary_search(x).is_ok()))
                .map(move |t| json!([s.members, t.members]))
        }),
    );
    c.expect_none(
        "uA is a singleton for every minimal idempotent u",
        strongly.iter().flat_map(|s| {
            ms.all_idempotents().into_iter().filter_map(move |u| {
                (m.image_of_set(u, &s.members).len() != 1).then(|| json!({"set": s.members, "u": u}))
            })
        }),
    );
    c.expect_none(
        "uA ⊆ A for every minimal idempotent u",
        strongly.iter().flat_map(|s| {
            ms.all_idempotents().into_iter().filter_map(move |u| {
                let img = m.image_of_set(u, &s.members);
                img.iter().any(|x| s.members.binary_search(x).is_err()).then(|| json!({"set": s.members, "u": u, "image": img}))
            })
        }),
    );
    c.expect_none(
        "every proximal set is collapsed by a whole minimal ideal",
        subsets_up_to(n, RA_SUBSET_CAP).into_iter().filter_map(|set| match minimal_ideal_collapse(m, ms, &set) {
            Err(e) => Some(json!({"set": set, "error": e.to_string()})),
            Ok(_) => None,
        }),
    );
    c.extend(check_ra_proximal_equiv(a));
    c
}

#[derive(Clone, Debug, Serialize)]
pub struct ProxsetsReport {
    pub partitions: Vec<Vec<Vec<usize>>>,
    pub strongly_proximal_sets: Vec<Vec<usize>>,
}

impl ProxsetsReport {
    pub fn new(m: &TransMonoid, ms: &MinimalStructure) -> Self {
        ProxsetsReport {
            partitions: (0..ms.ideals().len())
                .map(|k| i_proximal_partition(m, ms, k).into_iter().map(|c| c.members).collect())
                .collect(),
            strongly_proximal_sets: max_strongly_proximal_sets(m, ms).into_iter().map(|s| s.members).collect(),
        }
    }
}
