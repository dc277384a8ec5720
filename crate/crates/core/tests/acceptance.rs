//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dynlab::circles::{self, CircleParams, CirclePoint, PairLabel, Tier};
use dynlab::fuzz::{self, FuzzConfig, FuzzSummary, Suite};
use dynlab::subshift::{self, BiSeq, EvidenceParams, Outcome, ProximalLabel, StrongLabel};
use dynlab::ternary::{self, SpLabel, TernarySeq};

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn failing_checks(s: &FuzzSummary) -> String {
    let bad: Vec<String> = s.tallies.iter().filter(|t| t.failed > 0).map(|t| format!("{} ({})", t.name, t.failed)).collect();
    if bad.is_empty() {
        "none".into()
    } else {
        bad.join("; ")
    }
}

fn suite(suite: Suite, count: usize) -> (FuzzSummary, Duration) {
    let cfg = FuzzConfig { seed: 1, count, min_states: 2, max_states: 6, min_generators: 1, max_generators: 3, ..Default::default() };
    let t = Instant::now();
    let s = fuzz::run_suite(suite, &cfg).expect("valid config");
    (s, t.elapsed())
}

const FLOW_CHECKS: [&str; 14] = [
    "SP is an equivalence relation",
    "P ⊔ D = X×X",
    "SP ⊔ WD = X×X",
    "SP ⊆ P",
    "D ⊆ WD",
    "WD = (P∖SP) ∪ D",
    "P ∩ Ω ⊆ Δ",
    "Ω[x] = ⋃ fixed-point sets of minimal idempotents fixing x",
    "P equivalence ⟺ unique minimal ideal ⟺ P = SP",
    "uM is a group with identity u",
    "pu = p",
    "Mp = M",
    "distinct idempotents of one ideal are not equivalent",
    "every idempotent has an equivalent partner in every other ideal",
];

fn criterion_1() -> Verdict {
    let (s, took) = suite(Suite::Flows, 500);
    let mut names = FLOW_CHECKS.to_vec();
    names.push("instance analysis");
    let failures = s.failures_of(&names);
    let missing: Vec<&str> = FLOW_CHECKS.iter().copied().filter(|n| s.tally(n).is_none_or(|t| t.passed + t.failed != s.checked)).collect();
    let ok = failures == 0 && missing.is_empty() && s.checked + s.skipped == 500 && took < Duration::from_secs(60);
    verdict(
        ok,
        format!(
            "{} flows checked, {} skipped, {} counterexamples, {:.2} s, untallied checks: {:?}",
            s.checked,
            s.skipped,
            failures,
            took.as_secs_f64(),
            missing
        ),
    )
}

fn criterion_2() -> Verdict {
    let (s, took) = suite(Suite::Products, 100);
    verdict(
        s.all_passed() && s.checked > 0,
        format!("{} products checked, {} failing, {:.2} s, failures: {}", s.checked, s.failed_instances, took.as_secs_f64(), failing_checks(&s)),
    )
}

fn criterion_3() -> Verdict {
    let (s, took) = suite(Suite::Factors, 100);
    verdict(
        s.all_passed() && s.checked > 0,
        format!(
            "{} quotients checked ({} reached the section check), {} failing, {:.2} s, failures: {}",
            s.checked,
            s.section_checked,
            s.failed_instances,
            took.as_secs_f64(),
            failing_checks(&s)
        ),
    )
}

fn criterion_4() -> Verdict {
    let (s, took) = suite(Suite::Proxsets, 500);
    verdict(
        s.all_passed() && s.checked > 0,
        format!("{} flows checked, {} failing, {:.2} s, failures: {}", s.checked, s.failed_instances, took.as_secs_f64(), failing_checks(&s)),
    )
}

fn pair_set(pairs: &[(&str, &str)]) -> BTreeSet<(String, String)> {
    pairs.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect()
}

fn criterion_5() -> Verdict {
    let t = Instant::now();
    let params = EvidenceParams { depth: 8, gap: 256, horizon: 4096 };
    let rows = subshift::morse_table(params).expect("table");
    let took = t.elapsed();
    let of = |label: ProximalLabel| -> BTreeSet<(String, String)> {
        rows.iter().filter(|r| r.proximal == label).map(|r| (r.x.clone(), r.y.clone())).collect()
    };
    let want_p = pair_set(&[("a", "b"), ("a", "bbar"), ("b", "abar"), ("abar", "bbar"), ("shift(a,1)", "shift(b,1)")]);
    let want_d = pair_set(&[("a", "abar"), ("b", "bbar")]);
    let p_not_sp = rows.iter().filter(|r| r.proximal == ProximalLabel::EvidenceP).all(|r| {
        r.strong == StrongLabel::EvidenceNotSp
            && matches!(r.syndetic.as_ref().map(|v| &v.outcome), Some(Outcome::GapViolation { .. }))
    });
    let ok = rows.len() == 15 && of(ProximalLabel::EvidenceP) == want_p && of(ProximalLabel::ProvenD) == want_d && p_not_sp && took < Duration::from_secs(30);
    verdict(
        ok,
        format!(
            "{} pairs, evidence-P {:?}, proven-D {:?}, P pairs not SP: {}, {:.2} s",
            rows.len(),
            of(ProximalLabel::EvidenceP),
            of(ProximalLabel::ProvenD),
            p_not_sp,
            took.as_secs_f64()
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut block = vec![0u8];
    let mut recursion = true;
    for k in 1..=8 {
        let mut next = block.clone();
        next.extend_from_slice(&block);
        next.push(1);
        next.extend_from_slice(&block);
        block = next;
        recursion &= subshift::chacon_block(k).expect("block") == block;
    }
    let len_ok = block.len() == 9841 && subshift::chacon_len(8) == 9841;
    let (x1, x2) = (BiSeq::ChaconX1, BiSeq::ChaconX2);
    let witness = subshift::proximal_witness(&x1, &x2, 4, 6561);
    let syndetic = subshift::syndetic_check(&x1, &x2, 4, 729, 6561).expect("valid params");
    let witness_ok = matches!(witness.outcome, Outcome::ProximalWitness { t } if t.unsigned_abs() <= 6561);
    let gap_ok = matches!(syndetic.outcome, Outcome::GapViolation { .. });
    verdict(
        recursion && len_ok && witness_ok && gap_ok,
        format!(
            "recursion to k = 8: {}, |B_8| = {}, witness {:?}, syndetic {:?}",
            recursion,
            block.len(),
            witness.outcome,
            syndetic.outcome
        ),
    )
}

fn criterion_7() -> Verdict {
    let h = |x: BiSeq| subshift::adic_factor_h(&x).expect("binary point");
    let (ha, habar, hb) = (h(BiSeq::morse_a()), h(BiSeq::morse_a_bar()), h(BiSeq::morse_b()));
    let same = ha.window(512) == habar.window(512);
    let differ = (0..=512).find(|&n| ha.window(n) != hb.window(n));
    verdict(same && differ.is_some(), format!("H(a) = H(abar) on radius 512: {same}, H(a) vs H(b) first differ at radius {differ:?}"))
}

/// Number of differing coordinates inside `[-n, n]`.
fn differences(x: &TernarySeq, y: &TernarySeq, n: u64) -> usize {
    x.window(n).iter().zip(y.window(n)).filter(|(a, b)| **a != *b).count()
}

fn criterion_8() -> Verdict {
    let pts = ternary::sample();
    let n = pts.len();
    let mut mismatches = vec![];
    for (i, (ni, x)) in pts.iter().enumerate() {
        for (nj, y) in &pts[i..] {
            let agreeable = differences(x, y, 500) == differences(x, y, 1500);
            let in_sp = ternary::sp_classify(x, y).label == SpLabel::InSp;
            if agreeable != in_sp {
                mismatches.push(format!("({ni}, {nj})"));
            }
        }
    }
    let sp = |i: usize, j: usize| ternary::sp_classify(&pts[i].1, &pts[j].1).label == SpLabel::InSp;
    let transitive = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(sp(i, j) && sp(j, k)) || sp(i, k))));
    verdict(n == 12 && mismatches.is_empty() && transitive, format!("{n} points, mismatches {mismatches:?}, InSP transitive: {transitive}"))
}

fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

fn criterion_9() -> Verdict {
    let r0 = Tier::c(0).radius();
    let mut limits = vec![];
    for alpha in [0.1, 1.0, 3.0] {
        let start = CirclePoint::new(Tier::c(2), alpha);
        let (mut p, mut fwd) = (start, None);
        for k in 1..=10_000u64 {
            p = circles::step(p);
            if (p.radius() - r0).abs() < 1e-3 {
                fwd = Some(k);
                break;
            }
        }
        let (mut q, mut bwd) = (start, None);
        for k in 1..=10_000u64 {
            q = circles::step_inverse(q);
            if q.radius() < 1e-3 {
                bwd = Some(k);
                break;
            }
        }
        limits.push((alpha, fwd, bwd));
    }
    let limits_ok = limits.iter().all(|(_, f, b)| f.is_some() && b.is_some());

    let params = CircleParams::default();
    let tiers = circles::sample_tiers();
    let mut grid_mismatch = 0;
    for &s in &tiers {
        for &t in &tiers {
            let (p, q) = (CirclePoint::new(s, 1.0), CirclePoint::new(t, 2.0));
            if (circles::pair_class(p, q, params) == PairLabel::EvidenceP) != circles::table_in_p(p, q) {
                grid_mismatch += 1;
            }
        }
    }

    let mut worst = 0.0f64;
    for &t in &tiers {
        for k in 0..64 {
            let p = CirclePoint::new(t, k as f64 * PI / 64.0 + 0.013);
            let back = circles::step_inverse(circles::step(p));
            worst = worst.max(angle_distance(back.angle, p.angle));
        }
    }
    let ok = limits_ok && tiers.len() == 10 && grid_mismatch == 0 && worst <= 1e-9;
    verdict(
        ok,
        format!(
            "C2 limits (alpha, forward steps, backward steps) {limits:?}, grid {}x{} mismatches {grid_mismatch}, worst round trip {worst:.2e}",
            tiers.len(),
            tiers.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("finite-semigroup theorem suite", criterion_1),
        ("product suite", criterion_2),
        ("factor suite", criterion_3),
        ("proximal-set suite", criterion_4),
        ("Morse-square table", criterion_5),
        ("Chacon blocks and pair", criterion_6),
        ("adic factor", criterion_7),
        ("ternary sample", criterion_8),
        ("circle cascade", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        println!("criterion {} ({name}): {}  {}", i + 1, if v.ok { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.ok);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
