use dynlab::finflow::DEFAULT_ELEMENT_CAP;
use dynlab::proxsets::check_proxsets;
use dynlab::relations::{check_factor_theorems, check_flow, quotient_by_icer, FactorAnalysis, FlowAnalysis};
use dynlab::{seeds, CheckList, FiniteFlow, PairRelation, RelationKind};

fn passed(checks: &CheckList, name: &str) -> bool {
    checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("no check {name:?}")).passed
}

#[test]
fn seed_corpus_passes_flow_checks() {
    for (name, flow) in seeds::corpus() {
        let a = FlowAnalysis::new(&flow).unwrap();
        let failed: Vec<_> = check_flow(&a).failures().map(|c| c.name.clone()).collect();
        assert!(failed.is_empty(), "{name}: {failed:?}");
    }
}

#[test]
fn collapsing_two_fixed_points_breaks_the_distal_equality() {
    let x = FiniteFlow::new(2, vec![vec![0, 1]]).unwrap();
    let pi = quotient_by_icer(&x, &PairRelation::full(2, RelationKind::Custom)).unwrap();
    let fa = FactorAnalysis::new(pi, DEFAULT_ELEMENT_CAP).unwrap();
    assert!(fa.is_distal());
    let checks = check_factor_theorems(&fa);
    assert!(!passed(&checks, "π distal ⟹ D(X) = (π×π)⁻¹D(Y)"));
    assert!(passed(&checks, "π distal ⟹ Ω(X) = (π×π)⁻¹Ω(Y)"));
    assert!(passed(&checks, "π×π(D(X)) ⊇ D(Y)"));
}

#[test]
fn two_ideal_model_moves_a_singleton_class() {
    let a = FlowAnalysis::new(&seeds::morse_two_ideal()).unwrap();
    let checks = check_proxsets(&a);
    assert!(passed(&checks, "uA is a singleton for every minimal idempotent u"));
    assert!(!passed(&checks, "uA ⊆ A for every minimal idempotent u"));
    assert!(passed(&checks, "SP = ⋃ A×A over maximal strongly proximal sets"));
}
