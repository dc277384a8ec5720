//! Points of `{0,1,2}^ℤ` with eventually periodic tails, and the
//! edge / agreeable / opposed classification of pairs.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TernaryError {
    #[error("letter {0} is outside {{0,1,2}}")]
    BadLetter(u8),
    #[error("tail period must be nonempty")]
    EmptyPeriod,
    #[error("cannot parse ternary point {0:?}")]
    Parse(String),
}

/// `… L L L center R R R …` with `center[0]` at coordinate `start`. The left
/// period ends at `start - 1`, the right period begins right after the
/// center.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TernarySeq {
    left: Vec<u8>,
    center: Vec<u8>,
    start: i64,
    right: Vec<u8>,
}

fn check_letters(w: &[u8]) -> Result<(), TernaryError> {
    match w.iter().find(|&&c| c > 2) {
        Some(&c) => Err(TernaryError::BadLetter(c)),
        None => Ok(()),
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

impl TernarySeq {
    pub fn new(left: Vec<u8>, center: Vec<u8>, start: i64, right: Vec<u8>) -> Result<Self, TernaryError> {
        if left.is_empty() || right.is_empty() {
            return Err(TernaryError::EmptyPeriod);
        }
        check_letters(&left)?;
        check_letters(&center)?;
        check_letters(&right)?;
        Ok(TernarySeq { left, center, start, right })
    }

    pub fn constant(c: u8) -> Result<Self, TernaryError> {
        Self::new(vec![c], vec![], 0, vec![c])
    }

    /// Eventually 0 on both sides with 1-blocks of growing length in the
    /// middle.
    pub fn z() -> Self {
        let w = |s: &str| s.bytes().map(|c| c - b'0').collect::<Vec<u8>>();
        let mut center = w("00011000");
        center.extend(w("110001110001111000"));
        Self::new(vec![0], center, -8, vec![0]).expect("valid point")
    }

    fn end(&self) -> i64 {
        self.start + self.center.len() as i64
    }

    pub fn letter(&self, i: i64) -> u8 {
        if i < self.start {
            let p = self.left.len() as i64;
            let back = (self.start - 1 - i).rem_euclid(p);
            self.left[(p - 1 - back) as usize]
        } else if i >= self.end() {
            self.right[((i - self.end()) % self.right.len() as i64) as usize]
        } else {
            self.center[(i - self.start) as usize]
        }
    }

    /// Coordinates `lo..hi`.
    pub fn block(&self, lo: i64, hi: i64) -> Vec<u8> {
        (lo..hi).map(|i| self.letter(i)).collect()
    }

    pub fn window(&self, n: u64) -> Vec<u8> {
        self.block(-(n as i64), n as i64 + 1)
    }

    /// `(σ^k x)_i = x_{i+k}`.
    pub fn shift(&self, k: i64) -> Self {
        TernarySeq { start: self.start - k, ..self.clone() }
    }

    /// Copy with coordinate `i` replaced by `c`.
    pub fn with_letter(&self, i: i64, c: u8) -> Result<Self, TernaryError> {
        check_letters(&[c])?;
        let lo = self.start.min(i);
        let hi = self.end().max(i + 1);
        // re-anchor the tails at whole periods so they read unchanged
        let pl = self.left.len() as i64;
        let pr = self.right.len() as i64;
        let lo = self.start - (self.start - lo + pl - 1) / pl * pl;
        let hi = self.end() + (hi - self.end() + pr - 1) / pr * pr;
        let mut center = self.block(lo, hi);
        center[(i - lo) as usize] = c;
        Ok(TernarySeq { left: self.left.clone(), center, start: lo, right: self.right.clone() })
    }

    /// Applies a permutation of the three symbols.
    pub fn permute(&self, perm: [u8; 3]) -> Self {
        let map = |w: &[u8]| w.iter().map(|&c| perm[c as usize]).collect();
        TernarySeq { left: map(&self.left), center: map(&self.center), start: self.start, right: map(&self.right) }
    }
}

impl fmt::Display for TernarySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = |w: &[u8]| w.iter().map(|c| char::from(b'0' + c)).collect::<String>();
        write!(f, "({}){}@{}({})", d(&self.left), d(&self.center), self.start, d(&self.right))
    }
}

impl std::str::FromStr for TernarySeq {
    type Err = TernaryError;

    /// `(L)center@start(R)`, a single digit for a constant point, or `z`.
    fn from_str(s: &str) -> Result<Self, TernaryError> {
        let err = || TernaryError::Parse(s.to_string());
        let s = s.trim();
        if s == "z" {
            return Ok(TernarySeq::z());
        }
        let digits = |t: &str| -> Result<Vec<u8>, TernaryError> {
            t.bytes().map(|c| if c.is_ascii_digit() { Ok(c - b'0') } else { Err(err()) }).collect()
        };
        if s.len() == 1 {
            return TernarySeq::constant(digits(s)?[0]);
        }
        let rest = s.strip_prefix('(').ok_or_else(err)?;
        let (left, rest) = rest.split_once(')').ok_or_else(err)?;
        let (center, rest) = rest.split_once('@').ok_or_else(err)?;
        let (start, rest) = rest.split_once('(').ok_or_else(err)?;
        let right = rest.strip_suffix(')').ok_or_else(err)?;
        let start = start.parse().map_err(|_| err())?;
        TernarySeq::new(digits(left)?, digits(center)?, start, digits(right)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairType {
    /// Differ at every coordinate.
    Edge,
    /// Differ at infinitely many coordinates but not everywhere.
    Opposed,
    /// Differ at finitely many coordinates.
    Agreeable,
}

/// Per-side summary used by [`pair_type`].
struct TailScan {
    /// Some coordinate on the tail agrees.
    agrees_somewhere: bool,
    /// Some coordinate on the tail differs.
    differs_somewhere: bool,
}

fn scan(x: &TernarySeq, y: &TernarySeq, coords: impl Iterator<Item = i64>) -> TailScan {
    let mut s = TailScan { agrees_somewhere: false, differs_somewhere: false };
    for i in coords {
        if x.letter(i) == y.letter(i) {
            s.agrees_somewhere = true;
        } else {
            s.differs_somewhere = true;
        }
    }
    s
}

/// Exact: beyond both centers the pair is jointly periodic with period
/// `lcm(p, q)`, so one joint period per side decides each tail.
pub fn pair_type(x: &TernarySeq, y: &TernarySeq) -> PairType {
    let lo = x.start.min(y.start);
    let hi = x.end().max(y.end());
    let lr = x.right.len() / gcd(x.right.len(), y.right.len()) * y.right.len();
    let ll = x.left.len() / gcd(x.left.len(), y.left.len()) * y.left.len();
    let mid = scan(x, y, lo..hi);
    let right = scan(x, y, hi..hi + lr as i64);
    let left = scan(x, y, lo - ll as i64..lo);
    if !(mid.agrees_somewhere || right.agrees_somewhere || left.agrees_somewhere) {
        PairType::Edge
    } else if right.differs_somewhere || left.differs_somewhere {
        PairType::Opposed
    } else {
        PairType::Agreeable
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpLabel {
    InSp,
    NotInSp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpVerdict {
    pub x: String,
    pub y: String,
    pub label: SpLabel,
    pub pair_type: PairType,
}

/// Strongly proximal exactly when mutually agreeable.
pub fn sp_classify(x: &TernarySeq, y: &TernarySeq) -> SpVerdict {
    let pair_type = pair_type(x, y);
    let label = if pair_type == PairType::Agreeable { SpLabel::InSp } else { SpLabel::NotInSp };
    SpVerdict { x: x.to_string(), y: y.to_string(), label, pair_type }
}

/// Edges are exactly the almost periodic pairs.
pub fn omega_edge_check(x: &TernarySeq, y: &TernarySeq) -> bool {
    pair_type(x, y) == PairType::Edge
}

/// Bounded evidence search over shifts only: smallest `|t| ≤ H` (positive
/// first) at which the radius-`n` windows agree.
pub fn shift_witness(x: &TernarySeq, y: &TernarySeq, n: u64, horizon: u64) -> Option<i64> {
    let (n, h) = (n as i64, horizon as i64);
    (0..=h)
        .flat_map(|k| if k == 0 { vec![0] } else { vec![k, -k] })
        .find(|&t| (t - n..=t + n).all(|i| x.letter(i) == y.letter(i)))
}

/// The twelve-point sample: constants, `z` and its shifts, and local
/// perturbations and relabelings.
pub fn sample() -> Vec<(String, TernarySeq)> {
    let c = |k| TernarySeq::constant(k).expect("valid point");
    let z = TernarySeq::z();
    let periodic = TernarySeq::new(vec![0, 1, 2], vec![], 0, vec![0, 1, 2]).expect("valid point");
    let periodic_shifted = TernarySeq::new(vec![1, 2, 0], vec![], 0, vec![1, 2, 0]).expect("valid point");
    vec![
        ("0̄".into(), c(0)),
        ("1̄".into(), c(1)),
        ("2̄".into(), c(2)),
        ("z".into(), z.clone()),
        ("σ³z".into(), z.shift(3)),
        ("σ⁻⁷z".into(), z.shift(-7)),
        ("z with x₀ = 2".into(), z.with_letter(0, 2).expect("valid letter")),
        ("0̄ with x₅ = 1".into(), c(0).with_letter(5, 1).expect("valid letter")),
        ("z with 1↔2".into(), z.permute([0, 2, 1])),
        ("(012)".into(), periodic),
        ("(120)".into(), periodic_shifted),
        ("0̄.1̄".into(), TernarySeq::new(vec![0], vec![], 0, vec![1]).expect("valid point")),
    ]
}
