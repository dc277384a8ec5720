//! Named theorem checks with counterexample slots.

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome of verifying one statement on one instance.
///
/// `counterexample` is `None` exactly when the check passed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub name: String,
    pub passed: bool,
    pub counterexample: Option<Value>,
}

impl TheoremCheck {
    pub fn pass(name: impl Into<String>) -> Self {
        TheoremCheck { name: name.into(), passed: true, counterexample: None }
    }

    pub fn fail(name: impl Into<String>, counterexample: Value) -> Self {
        TheoremCheck { name: name.into(), passed: false, counterexample: Some(counterexample) }
    }
}

/// Ordered collection of checks; ordering is insertion order so reports are
/// reproducible.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CheckList {
    checks: Vec<TheoremCheck>,
}

impl CheckList {
    pub fn new() -> Self {
        CheckList::default()
    }

    /// Records `name`, failing with the first counterexample yielded by
    /// `witnesses` if there is one.
    pub fn expect_none<I>(&mut self, name: &str, witnesses: I)
    where
        I: IntoIterator<Item = Value>,
    {
        match witnesses.into_iter().next() {
            None => self.checks.push(TheoremCheck::pass(name)),
            Some(cex) => self.checks.push(TheoremCheck::fail(name, cex)),
        }
    }

    pub fn expect(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> Value) {
        if ok {
            self.checks.push(TheoremCheck::pass(name));
        } else {
            self.checks.push(TheoremCheck::fail(name, detail()));
        }
    }

    pub fn push(&mut self, check: TheoremCheck) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: CheckList) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TheoremCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn iter(&self) -> impl Iterator<Item = &TheoremCheck> {
        self.checks.iter()
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }
}

impl IntoIterator for CheckList {
    type Item = TheoremCheck;
    type IntoIter = std::vec::IntoIter<TheoremCheck>;

    fn into_iter(self) -> Self::IntoIter {
        self.checks.into_iter()
    }
}
