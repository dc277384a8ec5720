//! Seeded random flows and the theorem suites run over them.
//!
//! Instance `k` of a suite is generated from its own ChaCha stream, so runs
//! are reproducible and independent of thread scheduling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::check::{CheckList, TheoremCheck};
use crate::finflow::{FiniteFlow, FlowError, MinimalStructure, TransMonoid, DEFAULT_ELEMENT_CAP};
use crate::proxsets::check_proxsets;
use crate::relations::{
    check_factor_theorems, check_flow, check_product_theorems, idempotent_section_check, quotient_by_icer,
    FactorAnalysis, FlowAnalysis, PairRelation, RelationError, RelationKind, SectionReport,
};

/// Counterexamples kept in a summary; the failure count is always exact.
pub const MAX_REPORTED: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FuzzError {
    #[error("instance count must be at least 1")]
    ZeroCount,
    #[error("bad size range: {0}")]
    BadRange(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Flows,
    Products,
    Factors,
    Proxsets,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Flows, Suite::Products, Suite::Factors, Suite::Proxsets];

    fn stream_tag(self) -> u64 {
        match self {
            // proxsets shares the flow corpus
            Suite::Flows | Suite::Proxsets => 0,
            Suite::Products => 1,
            Suite::Factors => 2,
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "flows" => Ok(Suite::Flows),
            "products" => Ok(Suite::Products),
            "factors" => Ok(Suite::Factors),
            "proxsets" => Ok(Suite::Proxsets),
            _ => Err(format!("unknown suite {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub min_states: usize,
    pub max_states: usize,
    pub min_generators: usize,
    pub max_generators: usize,
    pub cap: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 1,
            count: 100,
            min_states: 2,
            max_states: 6,
            min_generators: 1,
            max_generators: 3,
            cap: DEFAULT_ELEMENT_CAP,
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<(), FuzzError> {
        if self.count == 0 {
            return Err(FuzzError::ZeroCount);
        }
        if self.min_states == 0 || self.min_states > self.max_states {
            return Err(FuzzError::BadRange(format!("states {}..={}", self.min_states, self.max_states)));
        }
        if self.min_generators == 0 || self.min_generators > self.max_generators {
            return Err(FuzzError::BadRange(format!("generators {}..={}", self.min_generators, self.max_generators)));
        }
        Ok(())
    }
}

/// One generated test case. Factor instances carry the classes of the icer
/// to quotient by.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub index: usize,
    pub flows: Vec<FiniteFlow>,
    pub classes: Option<Vec<Vec<usize>>>,
}

fn rng_for(seed: u64, suite: Suite, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ suite.stream_tag().wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(index as u64);
    rng
}

/// A third of the generators are permutations, the rest arbitrary maps.
pub fn random_flow<R: Rng>(rng: &mut R, states: usize, generators: usize) -> FiniteFlow {
    let gens = (0..generators)
        .map(|_| {
            if rng.gen_ratio(1, 3) {
                let mut p: Vec<usize> = (0..states).collect();
                p.shuffle(rng);
                p
            } else {
                (0..states).map(|_| rng.gen_range(0..states)).collect()
            }
        })
        .collect();
    FiniteFlow::new(states, gens).expect("random flow is well formed")
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) -> bool {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra == rb {
        return false;
    }
    parent[ra.max(rb)] = ra.min(rb);
    true
}

/// Smallest invariant equivalence containing `seeds`.
pub fn congruence_closure(flow: &FiniteFlow, seeds: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let n = flow.states();
    let mut parent: Vec<usize> = (0..n).collect();
    for &(a, b) in seeds {
        union(&mut parent, a, b);
    }
    loop {
        let mut changed = false;
        for x in 0..n {
            let r = find(&mut parent, x);
            for g in flow.generators() {
                changed |= union(&mut parent, g[x], g[r]);
            }
        }
        if !changed {
            break;
        }
    }
    let mut classes: Vec<Vec<usize>> = vec![];
    let mut slot = vec![usize::MAX; n];
    for x in 0..n {
        let r = find(&mut parent, x);
        if slot[r] == usize::MAX {
            slot[r] = classes.len();
            classes.push(vec![]);
        }
        classes[slot[r]].push(x);
    }
    classes
}

fn classes_relation(n: usize, classes: &[Vec<usize>]) -> PairRelation {
    let mut class_of = vec![0; n];
    for (k, c) in classes.iter().enumerate() {
        for &x in c {
            class_of[x] = k;
        }
    }
    PairRelation::from_fn(n, RelationKind::Custom, |x, y| class_of[x] == class_of[y])
}

/// The orbit of an almost periodic point, which is a minimal subflow.
fn minimal_subflow<R: Rng>(rng: &mut R, flow: &FiniteFlow, cap: usize) -> Option<FiniteFlow> {
    let m = TransMonoid::close_with_cap(flow, cap).ok()?;
    let ms = MinimalStructure::new(&m);
    let j = ms.all_idempotents();
    let u = *j.choose(rng)?;
    let mut ap: Vec<usize> = (0..m.degree()).map(|x| m.apply(u, x)).collect();
    ap.sort_unstable();
    ap.dedup();
    let x = *ap.choose(rng)?;
    flow.subflow(&m.orbit(x)).ok().map(|(f, _)| f)
}

pub fn generate(suite: Suite, cfg: &FuzzConfig, index: usize) -> Instance {
    let mut rng = rng_for(cfg.seed, suite, index);
    let draw = |rng: &mut ChaCha8Rng, max_states: usize, gens: usize| {
        let n = rng.gen_range(cfg.min_states..=max_states.max(cfg.min_states));
        random_flow(rng, n, gens)
    };
    match suite {
        Suite::Flows | Suite::Proxsets => {
            let g = rng.gen_range(cfg.min_generators..=cfg.max_generators);
            Instance { index, flows: vec![draw(&mut rng, cfg.max_states, g)], classes: None }
        }
        Suite::Products => {
            // product state spaces grow quadratically, so factors stay small
            let g = rng.gen_range(cfg.min_generators..=cfg.max_generators);
            let max = cfg.max_states.min(4);
            let a = draw(&mut rng, max, g);
            let b = if index % 4 == 3 { a.clone() } else { draw(&mut rng, max, g) };
            Instance { index, flows: vec![a, b], classes: None }
        }
        Suite::Factors => {
            let g = rng.gen_range(cfg.min_generators..=cfg.max_generators);
            let mut flow = draw(&mut rng, cfg.max_states, g);
            if index % 2 == 1 {
                if let Some(sub) = minimal_subflow(&mut rng, &flow, cfg.cap) {
                    flow = sub;
                }
            }
            let n = flow.states();
            let k = rng.gen_range(0..=n);
            let seeds: Vec<(usize, usize)> = (0..k).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
            let classes = congruence_closure(&flow, &seeds);
            Instance { index, flows: vec![flow], classes: Some(classes) }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum InstanceOutcome {
    Checked { checks: CheckList, section_checked: bool },
    Skipped { reason: String },
}

fn skip_or_fail(e: RelationError) -> InstanceOutcome {
    match e {
        RelationError::Flow(FlowError::MonoidTooLarge { cap }) => {
            InstanceOutcome::Skipped { reason: format!("monoid exceeds {cap} elements") }
        }
        other => {
            let mut checks = CheckList::new();
            checks.push(TheoremCheck::fail("instance analysis", json!(other.to_string())));
            InstanceOutcome::Checked { checks, section_checked: false }
        }
    }
}

pub fn run_instance(suite: Suite, inst: &Instance, cap: usize) -> InstanceOutcome {
    let result = (|| -> Result<InstanceOutcome, RelationError> {
        let mut section_checked = false;
        let checks = match suite {
            Suite::Flows => check_flow(&FlowAnalysis::with_cap(&inst.flows[0], cap)?),
            Suite::Proxsets => check_proxsets(&FlowAnalysis::with_cap(&inst.flows[0], cap)?),
            Suite::Products => check_product_theorems(&inst.flows[0], &inst.flows[1], cap)?,
            Suite::Factors => {
                let flow = &inst.flows[0];
                let classes = inst.classes.as_deref().unwrap_or(&[]);
                let rel = classes_relation(flow.states(), classes);
                let fa = FactorAnalysis::new(quotient_by_icer(flow, &rel)?, cap)?;
                let mut c = check_factor_theorems(&fa);
                if let SectionReport::Checked { checks } = idempotent_section_check(&fa) {
                    section_checked = true;
                    c.extend(checks);
                }
                c
            }
        };
        Ok(InstanceOutcome::Checked { checks, section_checked })
    })();
    result.unwrap_or_else(skip_or_fail)
}

fn failing_names(outcome: &InstanceOutcome) -> Vec<String> {
    match outcome {
        InstanceOutcome::Checked { checks, .. } => checks.failures().map(|c| c.name.clone()).collect(),
        InstanceOutcome::Skipped { .. } => vec![],
    }
}

fn drop_generator(inst: &Instance, i: usize) -> Option<Instance> {
    let flows = inst.flows.iter().map(|f| f.without_generator(i)).collect::<Option<Vec<_>>>()?;
    Some(Instance { flows, ..inst.clone() })
}

/// Removes generators one at a time while `check` keeps failing.
pub fn minimize(suite: Suite, inst: &Instance, check: &str, cap: usize) -> Instance {
    let mut current = inst.clone();
    loop {
        let gens = current.flows[0].generators().len();
        let smaller = (0..gens).filter_map(|i| drop_generator(&current, i)).find(|cand| {
            failing_names(&run_instance(suite, cand, cap)).iter().any(|n| n == check)
        });
        match smaller {
            Some(s) => current = s,
            None => return current,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckTally {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub index: usize,
    pub check: String,
    pub flows: Vec<String>,
    pub classes: Option<Vec<Vec<usize>>>,
    pub detail: Option<serde_json::Value>,
    pub minimized: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzSummary {
    pub suite: Suite,
    pub config: FuzzConfig,
    pub checked: usize,
    pub skipped: usize,
    pub failed_instances: usize,
    pub section_checked: usize,
    /// In order of first appearance.
    pub tallies: Vec<CheckTally>,
    pub counterexamples: Vec<Counterexample>,
}

impl FuzzSummary {
    pub fn all_passed(&self) -> bool {
        self.failed_instances == 0
    }

    /// Total failures over the named checks; unknown names count nothing.
    pub fn failures_of(&self, names: &[&str]) -> usize {
        self.tallies.iter().filter(|t| names.contains(&t.name.as_str())).map(|t| t.failed).sum()
    }

    pub fn tally(&self, name: &str) -> Option<&CheckTally> {
        self.tallies.iter().find(|t| t.name == name)
    }
}

pub fn run_suite(suite: Suite, cfg: &FuzzConfig) -> Result<FuzzSummary, FuzzError> {
    cfg.validate()?;
    let results: Vec<(Instance, InstanceOutcome)> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let inst = generate(suite, cfg, i);
            let out = run_instance(suite, &inst, cfg.cap);
            (inst, out)
        })
        .collect();

    let mut summary = FuzzSummary {
        suite,
        config: *cfg,
        checked: 0,
        skipped: 0,
        failed_instances: 0,
        section_checked: 0,
        tallies: vec![],
        counterexamples: vec![],
    };
    let mut pending = vec![];
    for (inst, out) in &results {
        match out {
            InstanceOutcome::Skipped { .. } => summary.skipped += 1,
            InstanceOutcome::Checked { checks, section_checked } => {
                summary.checked += 1;
                summary.section_checked += *section_checked as usize;
                for c in checks.iter() {
                    let pos = match summary.tallies.iter().position(|t| t.name == c.name) {
                        Some(p) => p,
                        None => {
                            summary.tallies.push(CheckTally { name: c.name.clone(), passed: 0, failed: 0 });
                            summary.tallies.len() - 1
                        }
                    };
                    if c.passed {
                        summary.tallies[pos].passed += 1;
                    } else {
                        summary.tallies[pos].failed += 1;
                    }
                }
                if let Some(first) = checks.failures().next() {
                    summary.failed_instances += 1;
                    if pending.len() < MAX_REPORTED {
                        pending.push((inst, first.clone()));
                    }
                }
            }
        }
    }
    summary.counterexamples = pending
        .into_par_iter()
        .map(|(inst, check)| {
            let small = minimize(suite, inst, &check.name, cfg.cap);
            Counterexample {
                index: inst.index,
                check: check.name,
                flows: inst.flows.iter().map(FiniteFlow::to_text).collect(),
                classes: inst.classes.clone(),
                detail: check.counterexample,
                minimized: small.flows.iter().map(FiniteFlow::to_text).collect(),
            }
        })
        .collect();
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;

    fn small(count: usize) -> FuzzConfig {
        FuzzConfig { count, max_states: 4, ..FuzzConfig::default() }
    }

    #[test]
    fn zero_count_rejected() {
        assert_eq!(run_suite(Suite::Flows, &small(0)).unwrap_err(), FuzzError::ZeroCount);
        let bad = FuzzConfig { min_states: 5, max_states: 3, ..small(1) };
        assert!(matches!(bad.validate(), Err(FuzzError::BadRange(_))));
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = FuzzConfig::default();
        for suite in Suite::ALL {
            for i in 0..10 {
                assert_eq!(generate(suite, &cfg, i), generate(suite, &cfg, i));
            }
        }
        assert_ne!(generate(Suite::Flows, &cfg, 0), generate(Suite::Flows, &cfg, 1));
        assert_eq!(generate(Suite::Flows, &cfg, 5).flows, generate(Suite::Proxsets, &cfg, 5).flows);
    }

    #[test]
    fn instances_respect_ranges() {
        let cfg = FuzzConfig::default();
        for i in 0..50 {
            let inst = generate(Suite::Flows, &cfg, i);
            let f = &inst.flows[0];
            assert!((2..=6).contains(&f.states()));
            assert!((1..=3).contains(&f.generators().len()));
        }
    }

    #[test]
    fn congruence_closure_is_invariant() {
        let cfg = FuzzConfig::default();
        for i in 0..40 {
            let inst = generate(Suite::Factors, &cfg, i);
            let f = &inst.flows[0];
            let rel = classes_relation(f.states(), inst.classes.as_ref().unwrap());
            assert!(rel.is_equivalence());
            assert!(rel.is_invariant(f));
        }
        let f = seeds::rotation(4);
        assert_eq!(congruence_closure(&f, &[(0, 2)]), vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(congruence_closure(&f, &[(0, 1)]).len(), 1);
    }

    #[test]
    fn cap_exceeding_instances_are_skipped() {
        let cfg = FuzzConfig { cap: 2, ..small(10) };
        let s = run_suite(Suite::Flows, &cfg).unwrap();
        assert!(s.skipped > 0);
        assert_eq!(s.checked + s.skipped, 10);
    }

    #[test]
    fn summaries_are_reproducible() {
        let a = run_suite(Suite::Flows, &small(20)).unwrap();
        let b = run_suite(Suite::Flows, &small(20)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn minimization_drops_irrelevant_generators() {
        // the D characterization of products fails on the Morse model
        // square; an extra identity generator does not matter
        let mut gens = seeds::morse_two_ideal().generators().to_vec();
        gens.push((0..4).collect());
        let f = FiniteFlow::new(4, gens).unwrap();
        let inst = Instance { index: 0, flows: vec![f.clone(), f], classes: None };
        let name = "D(X×Y) ⟺ D in some coordinate";
        assert!(failing_names(&run_instance(Suite::Products, &inst, DEFAULT_ELEMENT_CAP)).iter().any(|n| n == name));
        let small = minimize(Suite::Products, &inst, name, DEFAULT_ELEMENT_CAP);
        assert_eq!(small.flows[0].generators().len(), 2);
    }

    #[test]
    fn factor_suite_reaches_section_check() {
        let s = run_suite(Suite::Factors, &small(30)).unwrap();
        assert!(s.section_checked > 0);
    }
}
