//! Small named flows used as fixtures and examples.

use crate::finflow::FiniteFlow;

/// One fixed generator: the identity on `n` points.
pub fn identity(n: usize) -> FiniteFlow {
    FiniteFlow::new(n, vec![(0..n).collect()]).expect("valid flow")
}

/// `{0,1}` with the two constant maps.
pub fn constants() -> FiniteFlow {
    FiniteFlow::new(2, vec![vec![0, 0], vec![1, 1]]).expect("valid flow")
}

/// `x ↦ x+1 mod n`.
pub fn rotation(n: usize) -> FiniteFlow {
    FiniteFlow::new(n, vec![(0..n).map(|x| (x + 1) % n).collect()]).expect("valid flow")
}

/// Finite Morse model on `{a, b, ā, b̄} = {0, 1, 2, 3}`.
///
/// `u1` sends `a, b ↦ b` and `ā, b̄ ↦ b̄`; `v1` sends `b, ā ↦ b` and
/// `a, b̄ ↦ b̄`. The two rank-2 idempotents have different kernels, so the
/// monoid has two minimal left ideals and the proximal relation is not
/// transitive.
pub fn morse_two_ideal() -> FiniteFlow {
    FiniteFlow::new(4, vec![vec![1, 1, 3, 3], vec![3, 1, 1, 3]]).expect("valid flow")
}

/// As [`morse_two_ideal`] with the second pair of idempotents
/// (`a, b ↦ a` etc.) adjoined: each minimal ideal then has two idempotents.
pub fn morse_four_idempotent() -> FiniteFlow {
    FiniteFlow::new(4, vec![vec![1, 1, 3, 3], vec![3, 1, 1, 3], vec![0, 0, 2, 2], vec![0, 2, 2, 0]])
        .expect("valid flow")
}

pub const MORSE_LABELS: [&str; 4] = ["a", "b", "ā", "b̄"];

/// Every named fixture, for corpus-style sweeps.
pub fn corpus() -> Vec<(&'static str, FiniteFlow)> {
    vec![
        ("identity2", identity(2)),
        ("constants", constants()),
        ("rotation3", rotation(3)),
        ("morse_two_ideal", morse_two_ideal()),
        ("morse_four_idempotent", morse_four_idempotent()),
        ("rotation_with_collapse", FiniteFlow::new(3, vec![vec![1, 2, 0], vec![0, 0, 1]]).expect("valid flow")),
        ("two_blocks", FiniteFlow::new(4, vec![vec![0, 1, 0, 1], vec![2, 2, 3, 3]]).expect("valid flow")),
    ]
}
