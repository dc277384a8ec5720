//! Versioned JSON reports and their plain-text projection.

use serde::Serialize;
use serde_json::{json, Value};

use crate::check::CheckList;
use crate::circles::{self, CircleParams, CirclePoint, Limit, Tier};
use crate::finflow::{FiniteFlow, DEFAULT_ELEMENT_CAP};
use crate::proxsets::{check_proxsets, ProxsetsReport};
use crate::relations::{check_flow, FlowAnalysis, RelationError, RelationTable};
use crate::subshift::{self, BiSeq, EvidenceParams, Outcome, ProximalLabel, StrongLabel};
use crate::ternary::{self, SpLabel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct IdealSummary {
    pub size: usize,
    pub idempotents: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonoidSummary {
    pub size: usize,
    pub minimal_ideals: Vec<IdealSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowVerdicts {
    pub distal: bool,
    pub proximal_flow: bool,
    pub weakly_distal: bool,
    pub p_equivalence: bool,
    pub p_equals_sp: bool,
    pub minimal: bool,
    pub summary: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    pub schema: u32,
    pub flow: FiniteFlow,
    pub monoid: MonoidSummary,
    pub relations: RelationTable,
    pub proxsets: ProxsetsReport,
    pub verdicts: FlowVerdicts,
    pub checks: CheckList,
    pub all_passed: bool,
}

fn verdicts(a: &FlowAnalysis) -> FlowVerdicts {
    let t = &a.relations;
    let n = a.states();
    let distal = t.proximal.is_diagonal();
    let proximal_flow = t.proximal.is_full();
    let weakly_distal = t.strongly_proximal.is_diagonal();
    let p_equivalence = t.proximal.is_equivalence();
    let p_equals_sp = t.proximal.same_pairs(&t.strongly_proximal);
    let mut summary = vec![];
    if distal {
        summary.push("distal: P = Δ".to_string());
    }
    if proximal_flow && p_equals_sp {
        summary.push("proximal flow: P = X×X = SP".to_string());
    } else if proximal_flow {
        summary.push("proximal flow: P = X×X".to_string());
    }
    if !p_equivalence {
        summary.push("P is not an equivalence relation".to_string());
    }
    if !p_equals_sp {
        summary.push("SP ⊊ P".to_string());
    }
    if !distal {
        summary.push(format!("weakly distal: {}", if weakly_distal { "yes" } else { "no" }));
    }
    summary.push(format!(
        "{} of {} unordered pairs proximal, {} strongly proximal",
        t.proximal.off_diagonal_pairs().count(),
        n * (n - 1) / 2,
        t.strongly_proximal.off_diagonal_pairs().count()
    ));
    FlowVerdicts { distal, proximal_flow, weakly_distal, p_equivalence, p_equals_sp, minimal: a.is_minimal(), summary }
}

/// Full pipeline on one flow: closure, ideals, relations, proximal sets
/// and every single-flow theorem check.
pub fn analyze(flow: &FiniteFlow, cap: usize) -> Result<AnalyzeReport, RelationError> {
    let a = FlowAnalysis::with_cap(flow, cap)?;
    let mut checks = check_flow(&a);
    checks.extend(check_proxsets(&a));
    let monoid = MonoidSummary {
        size: a.monoid.len(),
        minimal_ideals: a
            .structure
            .ideals()
            .iter()
            .enumerate()
            .map(|(k, i)| IdealSummary { size: i.members.len(), idempotents: a.structure.idempotents_of(k).to_vec() })
            .collect(),
    };
    let all_passed = checks.all_passed();
    Ok(AnalyzeReport {
        schema: SCHEMA_VERSION,
        flow: flow.clone(),
        monoid,
        proxsets: ProxsetsReport::new(&a.monoid, &a.structure),
        verdicts: verdicts(&a),
        relations: a.relations.clone(),
        checks,
        all_passed,
    })
}

pub fn analyze_default(flow: &FiniteFlow) -> Result<AnalyzeReport, RelationError> {
    analyze(flow, DEFAULT_ELEMENT_CAP)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example {
    Mt,
    Chacon,
    Ternary,
    Cc,
}

impl Example {
    pub const ALL: [Example; 4] = [Example::Mt, Example::Chacon, Example::Ternary, Example::Cc];

    pub fn name(self) -> &'static str {
        match self {
            Example::Mt => "mt",
            Example::Chacon => "chacon",
            Example::Ternary => "ternary",
            Example::Cc => "cc",
        }
    }
}

impl std::str::FromStr for Example {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Example::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| format!("unknown example {s:?}"))
    }
}

/// Smallest radius `≤ max` at which the two windows differ.
pub fn first_window_difference(x: &BiSeq, y: &BiSeq, max: u64) -> Option<u64> {
    let (wx, wy) = (x.window(max), y.window(max));
    let c = max as usize;
    (0..=max).find(|&n| {
        let k = n as usize;
        wx[c - k] != wy[c - k] || wx[c + k] != wy[c + k]
    })
}

fn mt_report(params: EvidenceParams) -> Result<Value, subshift::SubshiftError> {
    let rows = subshift::morse_table(params)?;
    let pick = |f: &dyn Fn(&subshift::PairClassification) -> bool| -> Vec<[String; 2]> {
        rows.iter().filter(|r| f(r)).map(|r| [r.x.clone(), r.y.clone()]).collect()
    };
    let evidence_p = pick(&|r| r.proximal == ProximalLabel::EvidenceP);
    let proven_d = pick(&|r| r.proximal == ProximalLabel::ProvenD);
    let inconclusive = pick(&|r| r.proximal == ProximalLabel::Inconclusive);
    let p_not_sp = rows
        .iter()
        .filter(|r| r.proximal == ProximalLabel::EvidenceP)
        .all(|r| r.strong == StrongLabel::EvidenceNotSp);
    let a = BiSeq::morse_a();
    let ha = subshift::adic_factor_h(&a)?;
    let hab = subshift::adic_factor_h(&BiSeq::morse_a_bar())?;
    let hb = subshift::adic_factor_h(&BiSeq::morse_b())?;
    Ok(json!({
        "schema": SCHEMA_VERSION,
        "example": "mt",
        "params": params,
        "windows": {
            "a[-4..4)": subshift::word_string(&a.block(-4, 4)),
            "a[-3..3]": subshift::word_string(&a.window(3)),
            "dual(a)[-4..4)": subshift::word_string(&BiSeq::morse_a_bar().block(-4, 4)),
        },
        "pairs": rows,
        "evidence_p": evidence_p,
        "proven_d": proven_d,
        "inconclusive": inconclusive,
        "every_p_pair_evidence_not_sp": p_not_sp,
        "adic": {
            "radius": 512,
            "h_a_eq_h_abar": first_window_difference(&ha, &hab, 512).is_none(),
            "h_a_h_b_first_difference": first_window_difference(&ha, &hb, 512),
        },
    }))
}

fn chacon_report() -> Result<Value, subshift::SubshiftError> {
    let mut lengths = vec![];
    let mut recursion_ok = true;
    let mut prev = subshift::chacon_block(0)?;
    lengths.push(prev.len());
    for k in 1..=8 {
        let b = subshift::chacon_block(k)?;
        let mut expected = prev.clone();
        expected.extend_from_slice(&prev);
        expected.push(1);
        expected.extend_from_slice(&prev);
        recursion_ok &= b == expected && b.len() as u64 == subshift::chacon_len(k);
        lengths.push(b.len());
        prev = b;
    }
    let params = EvidenceParams { depth: 4, gap: 729, horizon: 6561 };
    let pair = subshift::classify_pair(&BiSeq::ChaconX1, &BiSeq::ChaconX2, params)?;
    let times = subshift::agreement_times(&BiSeq::ChaconX1, &BiSeq::ChaconX2, params.depth, params.horizon);
    Ok(json!({
        "schema": SCHEMA_VERSION,
        "example": "chacon",
        "block_lengths": lengths,
        "recursion_verified": recursion_ok,
        "b2": subshift::word_string(&subshift::chacon_block(2)?),
        "x2[-13..=13]": subshift::word_string(&BiSeq::ChaconX2.block(-13, 14)),
        "pair": pair,
        "agreement_times": {
            "count": times.len(),
            "min": times.first(),
            "max": times.last(),
        },
    }))
}

fn ternary_report() -> Value {
    let pts = ternary::sample();
    let mut pairs = vec![];
    for (i, (ni, x)) in pts.iter().enumerate() {
        for (nj, y) in &pts[i..] {
            let v = ternary::sp_classify(x, y);
            pairs.push(json!({"x": ni, "y": nj, "pair_type": v.pair_type, "label": v.label, "edge": ternary::omega_edge_check(x, y)}));
        }
    }
    let sp = |i: usize, j: usize| ternary::sp_classify(&pts[i].1, &pts[j].1).label == SpLabel::InSp;
    let n = pts.len();
    let transitive = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(sp(i, j) && sp(j, k)) || sp(i, k))));
    let classes: Vec<Vec<&str>> = {
        let mut seen = vec![false; n];
        let mut out = vec![];
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let class: Vec<usize> = (0..n).filter(|&j| sp(i, j)).collect();
            class.iter().for_each(|&j| seen[j] = true);
            out.push(class.iter().map(|&j| pts[j].0.as_str()).collect());
        }
        out
    };
    json!({
        "schema": SCHEMA_VERSION,
        "example": "ternary",
        "points": pts.iter().map(|(name, p)| json!({"name": name, "descriptor": p.to_string()})).collect::<Vec<_>>(),
        "pairs": pairs,
        "in_sp_transitive": transitive,
        "sp_classes": classes,
    })
}

fn cc_report(params: CircleParams) -> Value {
    let limits: Vec<Value> = [0.1, 1.0, 3.0]
        .iter()
        .map(|&alpha| {
            let c = circles::asymptotic_class(CirclePoint::new(Tier::C(2), alpha), params.max_steps, params.epsilon);
            json!({"alpha": alpha, "class": c})
        })
        .collect();
    let c2_ok = limits.iter().all(|v| {
        let c: circles::AsymptoticClass = serde_json::from_value(v["class"].clone()).expect("round trip");
        matches!((c.forward, c.backward), (Limit::ToC0 { .. }, Limit::ToCenter { .. }))
    });
    let grid_entries: Vec<_> = [(1.0, 2.0), (1.0, 1.0)].iter().flat_map(|&(a, b)| circles::pair_grid(a, b, params)).collect();
    let mismatches = grid_entries.iter().filter(|e| (e.label == circles::PairLabel::EvidenceP) != e.table).count();
    let grid: Vec<Value> = grid_entries
        .iter()
        .map(|e| json!({"p": e.p.tier, "alpha": e.p.angle, "q": e.q.tier, "beta": e.q.angle, "label": e.label, "table": e.table}))
        .collect();
    let mut worst = 0.0f64;
    for t in circles::sample_tiers() {
        for k in 0..32 {
            let p = CirclePoint::new(t, k as f64 * std::f64::consts::PI / 32.0);
            let q = circles::step_inverse(circles::step(p));
            let d = (q.angle - p.angle).abs();
            worst = worst.max(d.min(std::f64::consts::PI - d));
        }
    }
    json!({
        "schema": SCHEMA_VERSION,
        "example": "cc",
        "params": params,
        "c2_limits": limits,
        "c2_limits_as_expected": c2_ok,
        "grid": grid,
        "grid_mismatches": mismatches,
        "round_trip_within_tolerance": worst <= circles::ANGLE_TOLERANCE,
    })
}

/// The golden scenario of one example with default parameters.
pub fn reproduce(example: Example) -> Result<Value, String> {
    match example {
        Example::Mt => mt_report(EvidenceParams::default()).map_err(|e| e.to_string()),
        Example::Chacon => chacon_report().map_err(|e| e.to_string()),
        Example::Ternary => Ok(ternary_report()),
        Example::Cc => Ok(cc_report(CircleParams::default())),
    }
}

/// Pretty JSON with a trailing newline; the canonical on-disk form.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Indented `key: value` rendering of a JSON value.
pub fn render_text(value: &Value) -> String {
    let mut out = String::new();
    render_into(value, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        Value::Array(a) if a.iter().all(|x| x.as_array().is_some_and(|r| r.iter().all(|y| !y.is_object() && !y.is_array()))) => {
            Some(a.iter().filter_map(scalar).collect::<Vec<_>>().join(" "))
        }
        _ => None,
    }
}

fn render_into(value: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match scalar(v) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_into(v, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for v in items {
                match scalar(v) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_into(v, depth + 1, out);
                    }
                }
            }
        }
        other => {
            if let Some(s) = scalar(other) {
                out.push_str(&format!("{pad}{s}\n"));
            }
        }
    }
}

/// True when a Morse table matches the expected proximal structure.
pub fn mt_matches_expectation(report: &Value) -> bool {
    let set = |key: &str| -> Vec<(String, String)> {
        report[key]
            .as_array()
            .map(|a| {
                let mut v: Vec<(String, String)> = a
                    .iter()
                    .map(|p| (p[0].as_str().unwrap_or("").to_string(), p[1].as_str().unwrap_or("").to_string()))
                    .collect();
                v.sort();
                v
            })
            .unwrap_or_default()
    };
    let s = |a: &str, b: &str| (a.to_string(), b.to_string());
    let mut want_p = vec![
        s("a", "b"),
        s("a", "bbar"),
        s("b", "abar"),
        s("abar", "bbar"),
        s("shift(a,1)", "shift(b,1)"),
    ];
    want_p.sort();
    let mut want_d = vec![s("a", "abar"), s("b", "bbar")];
    want_d.sort();
    set("evidence_p") == want_p && set("proven_d") == want_d && report["every_p_pair_evidence_not_sp"] == json!(true)
}

/// Outcome tag of a verdict, for terse text.
pub fn outcome_tag(o: &Outcome) -> &'static str {
    match o {
        Outcome::ProximalWitness { .. } => "proximal_witness",
        Outcome::DistalAtAllShifts => "distal_at_all_shifts",
        Outcome::SyndeticUpToHorizon { .. } => "syndetic_up_to_horizon",
        Outcome::GapViolation { .. } => "gap_violation",
        Outcome::Inconclusive => "inconclusive",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;

    #[test]
    fn analyze_seeds() {
        let r = analyze_default(&seeds::identity(3)).unwrap();
        assert!(r.verdicts.distal && r.all_passed);
        assert!(r.verdicts.summary.iter().any(|s| s == "distal: P = Δ"));
        let r = analyze_default(&seeds::constants()).unwrap();
        assert!(r.verdicts.summary.iter().any(|s| s == "proximal flow: P = X×X = SP"));
        let r = analyze_default(&seeds::morse_two_ideal()).unwrap();
        assert!(!r.verdicts.p_equivalence && !r.verdicts.p_equals_sp);
        assert!(r.verdicts.summary.iter().any(|s| s == "weakly distal: yes"));
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["schema"], json!(1));
    }

    #[test]
    fn reports_are_deterministic() {
        for e in Example::ALL {
            let a = to_json_string(&reproduce(e).unwrap());
            let b = to_json_string(&reproduce(e).unwrap());
            assert_eq!(a, b, "{}", e.name());
        }
    }

    #[test]
    fn golden_expectations() {
        let mt = reproduce(Example::Mt).unwrap();
        assert!(mt_matches_expectation(&mt));
        assert_eq!(mt["windows"]["a[-4..4)"], json!("10011001"));
        assert_eq!(mt["adic"]["h_a_eq_h_abar"], json!(true));
        let ch = reproduce(Example::Chacon).unwrap();
        assert_eq!(ch["block_lengths"][8], json!(9841));
        assert_eq!(ch["recursion_verified"], json!(true));
        let te = reproduce(Example::Ternary).unwrap();
        assert_eq!(te["in_sp_transitive"], json!(true));
        let cc = reproduce(Example::Cc).unwrap();
        assert_eq!(cc["grid_mismatches"], json!(0));
        assert_eq!(cc["c2_limits_as_expected"], json!(true));
    }

    #[test]
    fn text_projection() {
        let t = render_text(&json!({"a": 1, "b": {"c": [1, 2]}, "d": [{"e": true}]}));
        assert_eq!(t, "a: 1\nb:\n  c: [1, 2]\nd:\n  -\n    e: true\n");
    }

    #[test]
    fn example_names() {
        for e in Example::ALL {
            assert_eq!(e.name().parse::<Example>().unwrap(), e);
        }
        assert!("xyz".parse::<Example>().is_err());
    }
}
