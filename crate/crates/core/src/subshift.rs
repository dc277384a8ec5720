//! Finitely described bi-infinite sequences over small alphabets and
//! finite-horizon evidence for proximality of pairs of them.
//!
//! Coordinates are `i64`. The shift acts by `(σ^k x)_i = x_{i+k}`.

use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Highest Chacón level [`chacon_block`] will materialize.
pub const MAX_CHACON_LEVEL: usize = 15;

/// Highest level reachable by letter lookup (`|B_k|` must fit in `u64`).
const MAX_CHACON_INDEX_LEVEL: usize = 38;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubshiftError {
    #[error("substitution image of letter {0} is empty")]
    EmptyImage(u8),
    #[error("substitution image of letter {letter} uses letter {found} outside the alphabet")]
    LetterOutOfRange { letter: u8, found: u8 },
    #[error("seed {left}.{right} is not extendable")]
    BadSeed { left: u8, right: u8 },
    #[error("chacon level {0} exceeds the limit {MAX_CHACON_LEVEL}")]
    ChaconTooLarge(usize),
    #[error("address letters must be 1, 2 or 3, found {0}")]
    BadAddress(u8),
    #[error("address cycle must be nonempty")]
    EmptyCycle,
    #[error("sequence is not binary")]
    NotBinary,
    #[error("parameters out of range: {0}")]
    BadParams(String),
    #[error("cannot parse sequence descriptor {0:?}")]
    Descriptor(String),
}

/// A letter-to-word substitution on `0..rule.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Substitution {
    name: String,
    rule: Vec<Vec<u8>>,
}

impl Substitution {
    pub fn new(name: impl Into<String>, rule: Vec<Vec<u8>>) -> Result<Self, SubshiftError> {
        let k = rule.len() as u8;
        for (l, img) in rule.iter().enumerate() {
            if img.is_empty() {
                return Err(SubshiftError::EmptyImage(l as u8));
            }
            if let Some(&found) = img.iter().find(|&&c| c >= k) {
                return Err(SubshiftError::LetterOutOfRange { letter: l as u8, found });
            }
        }
        Ok(Substitution { name: name.into(), rule })
    }

    /// `0 ↦ 0110`, `1 ↦ 1001`.
    pub fn morse_square() -> Self {
        Substitution::new("morse_square", vec![vec![0, 1, 1, 0], vec![1, 0, 0, 1]]).expect("valid rule")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet_size(&self) -> usize {
        self.rule.len()
    }

    pub fn image(&self, letter: u8) -> &[u8] {
        &self.rule[letter as usize]
    }

    pub fn apply(&self, word: &[u8]) -> Vec<u8> {
        word.iter().flat_map(|&c| self.rule[c as usize].iter().copied()).collect()
    }

    /// Commutes with `c ↦ 1 - c` on a binary alphabet.
    pub fn is_complement_symmetric(&self) -> bool {
        self.rule.len() == 2 && self.rule[0].iter().zip(&self.rule[1]).all(|(a, b)| *a == 1 - *b)
            && self.rule[0].len() == self.rule[1].len()
    }
}

#[derive(Debug, Default)]
struct Expansion {
    left: Vec<u8>,
    right: Vec<u8>,
}

/// Lazily expanded fixed point `… σ^k(l) . σ^k(r) …` shared between clones.
#[derive(Clone, Debug)]
pub struct FixedPoint {
    left: u8,
    right: u8,
    substitution: Arc<Substitution>,
    cache: Arc<Mutex<Expansion>>,
}

impl PartialEq for FixedPoint {
    fn eq(&self, other: &Self) -> bool {
        self.left == other.left && self.right == other.right && self.substitution == other.substitution
    }
}

impl Eq for FixedPoint {}

impl FixedPoint {
    pub fn new(left: u8, right: u8, substitution: Substitution) -> Result<Self, SubshiftError> {
        let k = substitution.alphabet_size() as u8;
        if left >= k || right >= k {
            return Err(SubshiftError::BadSeed { left, right });
        }
        let li = substitution.image(left);
        let ri = substitution.image(right);
        if li.last() != Some(&left) || ri.first() != Some(&right) || li.len() < 2 || ri.len() < 2 {
            return Err(SubshiftError::BadSeed { left, right });
        }
        let cache = Expansion { left: vec![left], right: vec![right] };
        Ok(FixedPoint { left, right, substitution: Arc::new(substitution), cache: Arc::new(Mutex::new(cache)) })
    }

    pub fn seed(&self) -> (u8, u8) {
        (self.left, self.right)
    }

    pub fn substitution(&self) -> &Substitution {
        &self.substitution
    }

    /// Coordinates `lo..hi`.
    fn block(&self, lo: i64, hi: i64) -> Vec<u8> {
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        let need_left = (-lo).max(0) as usize;
        let need_right = hi.max(0) as usize;
        while cache.left.len() < need_left {
            cache.left = self.substitution.apply(&cache.left);
        }
        while cache.right.len() < need_right {
            cache.right = self.substitution.apply(&cache.right);
        }
        let ll = cache.left.len() as i64;
        (lo..hi)
            .map(|i| if i < 0 { cache.left[(ll + i) as usize] } else { cache.right[i as usize] })
            .collect()
    }
}

/// `|B_k| = (3^{k+1} - 1) / 2`.
pub fn chacon_len(k: usize) -> u64 {
    (3u64.pow(k as u32 + 1) - 1) / 2
}

/// `B_0 = 0`, `B_{k+1} = B_k B_k 1 B_k`.
pub fn chacon_block(k: usize) -> Result<Vec<u8>, SubshiftError> {
    if k > MAX_CHACON_LEVEL {
        return Err(SubshiftError::ChaconTooLarge(k));
    }
    let mut b = vec![0u8];
    for _ in 0..k {
        let mut next = Vec::with_capacity(3 * b.len() + 1);
        next.extend_from_slice(&b);
        next.extend_from_slice(&b);
        next.push(1);
        next.extend_from_slice(&b);
        b = next;
    }
    Ok(b)
}

/// Letter `i` of `B_k` without materializing the block.
pub fn chacon_letter(k: usize, i: u64) -> u8 {
    let (mut k, mut i) = (k, i);
    while k > 0 {
        let len = chacon_len(k - 1);
        if i < len {
        } else if i < 2 * len {
            i -= len;
        } else if i == 2 * len {
            return 1;
        } else {
            i -= 2 * len + 1;
        }
        k -= 1;
    }
    debug_assert_eq!(i, 0);
    0
}

fn level_covering(extent: u64) -> usize {
    (0..=MAX_CHACON_INDEX_LEVEL).find(|&k| chacon_len(k) >= extent).expect("coordinate out of range")
}

/// `B_{-∞} . B_∞`: `B_∞` starts at 0, `B_{-∞}` ends at -1.
fn chacon_x1_letter(i: i64) -> u8 {
    if i >= 0 {
        chacon_letter(level_covering(i as u64 + 1), i as u64)
    } else {
        let k = level_covering(i.unsigned_abs());
        chacon_letter(k, chacon_len(k) - i.unsigned_abs())
    }
}

/// An address `ξ ∈ {1,2,3}^ℕ` given as a finite prefix followed by a
/// repeating cycle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Address {
    pub prefix: Vec<u8>,
    pub cycle: Vec<u8>,
}

impl Address {
    pub fn new(prefix: Vec<u8>, cycle: Vec<u8>) -> Result<Self, SubshiftError> {
        if cycle.is_empty() {
            return Err(SubshiftError::EmptyCycle);
        }
        if let Some(&c) = prefix.iter().chain(&cycle).find(|&&c| !(1..=3).contains(&c)) {
            return Err(SubshiftError::BadAddress(c));
        }
        Ok(Address { prefix, cycle })
    }

    pub fn get(&self, k: usize) -> u8 {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.cycle[(k - self.prefix.len()) % self.cycle.len()]
        }
    }
}

/// Start of `D_k` relative to `D_0`, negated: `D_k` occupies
/// `[-offset_k, -offset_k + |B_k|)`.
fn address_offset(addr: &Address, k: usize) -> u64 {
    let mut off = 0u64;
    for j in 0..k {
        off += match addr.get(j) {
            1 => 0,
            2 => chacon_len(j),
            _ => 2 * chacon_len(j) + 1,
        };
    }
    off
}

fn chacon_xi_letter(addr: &Address, i: i64) -> u8 {
    let mut off = 0u64;
    for k in 0..=MAX_CHACON_INDEX_LEVEL {
        let lo = -(off as i64);
        let hi = lo + chacon_len(k) as i64;
        if i >= lo && i < hi {
            return chacon_letter(k, (i - lo) as u64);
        }
        off += match addr.get(k) {
            1 => 0,
            2 => chacon_len(k),
            _ => 2 * chacon_len(k) + 1,
        };
    }
    panic!("coordinate {i} is not reached by the address")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BiSeq {
    SubstFixed(FixedPoint),
    ChaconX1,
    /// `B_{-∞} 1 B_∞` with the spacer at coordinate 0.
    ChaconX2,
    /// `D_0` sits at coordinate `anchor`.
    ChaconXi { address: Address, anchor: i64 },
    /// `center[0]` sits at coordinate `start`.
    EventuallyConstant { center: Vec<u8>, start: i64, left: u8, right: u8 },
    Shift(Box<BiSeq>, i64),
    Dual(Box<BiSeq>),
    Adic(Box<BiSeq>),
}

impl BiSeq {
    /// Morse-square fixed point with seed `x_{-1}.x_0 = left.right`.
    pub fn morse(left: u8, right: u8) -> Self {
        BiSeq::SubstFixed(FixedPoint::new(left, right, Substitution::morse_square()).expect("valid seed"))
    }

    /// Seed `1.1`.
    pub fn morse_a() -> Self {
        Self::morse(1, 1)
    }

    /// Seed `0.1`.
    pub fn morse_b() -> Self {
        Self::morse(0, 1)
    }

    /// Seed `0.0`.
    pub fn morse_a_bar() -> Self {
        Self::morse(0, 0)
    }

    /// Seed `1.0`.
    pub fn morse_b_bar() -> Self {
        Self::morse(1, 0)
    }

    pub fn constant(c: u8) -> Self {
        BiSeq::EventuallyConstant { center: vec![], start: 0, left: c, right: c }
    }

    /// ξ-addressed Chacón point. Addresses ending in constant 1 or constant 3
    /// only cover a half-line; they resolve to the shift of `x₁` that
    /// agrees with the covered half.
    pub fn chacon_xi(address: Address, anchor: i64) -> Self {
        let p = address.prefix.len();
        if address.cycle.iter().all(|&c| c == 1) {
            let off = address_offset(&address, p) as i64;
            return BiSeq::ChaconX1.shift(off - anchor);
        }
        if address.cycle.iter().all(|&c| c == 3) {
            let end = -(address_offset(&address, p) as i64) + chacon_len(p) as i64;
            return BiSeq::ChaconX1.shift(-end - anchor);
        }
        BiSeq::ChaconXi { address, anchor }
    }

    pub fn shift(self, k: i64) -> Self {
        match self {
            BiSeq::Shift(inner, j) if j + k == 0 => *inner,
            BiSeq::Shift(inner, j) => BiSeq::Shift(inner, j + k),
            other if k == 0 => other,
            other => BiSeq::Shift(Box::new(other), k),
        }
    }

    pub fn dual(self) -> Result<Self, SubshiftError> {
        if self.alphabet_size() > 2 {
            return Err(SubshiftError::NotBinary);
        }
        Ok(match self {
            BiSeq::Dual(inner) => *inner,
            other => BiSeq::Dual(Box::new(other)),
        })
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            BiSeq::SubstFixed(f) => f.substitution().alphabet_size(),
            BiSeq::ChaconX1 | BiSeq::ChaconX2 | BiSeq::ChaconXi { .. } | BiSeq::Adic(_) => 2,
            BiSeq::EventuallyConstant { center, left, right, .. } => {
                center.iter().chain([left, right]).copied().max().unwrap_or(0) as usize + 1
            }
            BiSeq::Shift(inner, _) | BiSeq::Dual(inner) => inner.alphabet_size().max(2),
        }
    }

    pub fn letter(&self, i: i64) -> u8 {
        match self {
            BiSeq::SubstFixed(f) => f.block(i, i + 1)[0],
            BiSeq::ChaconX1 => chacon_x1_letter(i),
            BiSeq::ChaconX2 => match i {
                0 => 1,
                i if i > 0 => chacon_x1_letter(i - 1),
                i => chacon_x1_letter(i),
            },
            BiSeq::ChaconXi { address, anchor } => chacon_xi_letter(address, i - anchor),
            BiSeq::EventuallyConstant { center, start, left, right } => {
                if i < *start {
                    *left
                } else if i >= start + center.len() as i64 {
                    *right
                } else {
                    center[(i - start) as usize]
                }
            }
            BiSeq::Shift(inner, k) => inner.letter(i + k),
            BiSeq::Dual(inner) => 1 - inner.letter(i),
            BiSeq::Adic(inner) => (inner.letter(i) + inner.letter(i + 1)) % 2,
        }
    }

    /// Coordinates `lo..hi`.
    pub fn block(&self, lo: i64, hi: i64) -> Vec<u8> {
        if hi <= lo {
            return vec![];
        }
        match self {
            BiSeq::SubstFixed(f) => f.block(lo, hi),
            BiSeq::Shift(inner, k) => inner.block(lo + k, hi + k),
            BiSeq::Dual(inner) => inner.block(lo, hi).into_iter().map(|c| 1 - c).collect(),
            BiSeq::Adic(inner) => {
                let b = inner.block(lo, hi + 1);
                b.windows(2).map(|w| (w[0] + w[1]) % 2).collect()
            }
            _ => (lo..hi).map(|i| self.letter(i)).collect(),
        }
    }

    /// Coordinates `[-n, n]`.
    pub fn window(&self, n: u64) -> Vec<u8> {
        let n = n as i64;
        self.block(-n, n + 1)
    }

    /// Structural normal form: a base generator, a net shift and a dual
    /// parity, with complement-symmetric seeds and binary constant tails
    /// pushed into the parity.
    fn normal_form(&self) -> (BiSeq, i64, bool) {
        match self {
            BiSeq::Shift(inner, k) => {
                let (b, s, d) = inner.normal_form();
                (b, s + k, d)
            }
            BiSeq::Dual(inner) => {
                let (b, s, d) = inner.normal_form();
                (b, s, !d)
            }
            BiSeq::SubstFixed(f) if f.substitution().is_complement_symmetric() && f.seed().1 == 1 => {
                let (l, r) = f.seed();
                let flipped = FixedPoint::new(1 - l, 1 - r, f.substitution().clone()).expect("complement seed");
                (BiSeq::SubstFixed(flipped), 0, true)
            }
            BiSeq::EventuallyConstant { center, start, left, right }
                if self.alphabet_size() <= 2 && *right == 1 =>
            {
                let flipped = BiSeq::EventuallyConstant {
                    center: center.iter().map(|c| 1 - c).collect(),
                    start: *start,
                    left: 1 - left,
                    right: 0,
                };
                (flipped, 0, true)
            }
            other => (other.clone(), 0, false),
        }
    }

    /// `other` is provably the coordinatewise complement of `self`.
    pub fn is_dual_of(&self, other: &BiSeq) -> bool {
        let (b1, s1, d1) = self.normal_form();
        let (b2, s2, d2) = other.normal_form();
        b1 == b2 && s1 == s2 && d1 != d2
    }
}

fn digits(d: &[u8]) -> String {
    d.iter().map(|c| char::from(b'0' + c)).collect()
}

pub fn word_string(w: &[u8]) -> String {
    digits(w)
}

impl fmt::Display for BiSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BiSeq::SubstFixed(p) if p.substitution().name() == "morse_square" => {
                let name = match p.seed() {
                    (1, 1) => "a",
                    (0, 1) => "b",
                    (0, 0) => "abar",
                    _ => "bbar",
                };
                f.write_str(name)
            }
            BiSeq::SubstFixed(p) => write!(f, "fixed({},{},{})", p.substitution().name(), p.seed().0, p.seed().1),
            BiSeq::ChaconX1 => f.write_str("x1"),
            BiSeq::ChaconX2 => f.write_str("x2"),
            BiSeq::ChaconXi { address, anchor } => {
                write!(f, "xi({};{};{})", digits(&address.prefix), digits(&address.cycle), anchor)
            }
            BiSeq::EventuallyConstant { center, start, left, right } => {
                write!(f, "ec({};{};{};{})", left, digits(center), start, right)
            }
            BiSeq::Shift(inner, k) => write!(f, "shift({inner},{k})"),
            BiSeq::Dual(inner) => write!(f, "dual({inner})"),
            BiSeq::Adic(inner) => write!(f, "adic({inner})"),
        }
    }
}

/// Parses the descriptors printed by `Display`: `a`, `b`, `abar`, `bbar`
/// (also `ā`, `b̄`), `x1`, `x2`, `const(c)`, `ec(l;center;start;r)`,
/// `xi(prefix;cycle[;anchor])`, `shift(s,k)`, `sigma(s)`, `dual(s)`,
/// `adic(s)`.
pub fn parse_descriptor(s: &str) -> Result<BiSeq, SubshiftError> {
    let err = || SubshiftError::Descriptor(s.to_string());
    let s = s.trim();
    match s {
        "a" => return Ok(BiSeq::morse_a()),
        "b" => return Ok(BiSeq::morse_b()),
        "abar" | "ā" => return Ok(BiSeq::morse_a_bar()),
        "bbar" | "b̄" => return Ok(BiSeq::morse_b_bar()),
        "x1" => return Ok(BiSeq::ChaconX1),
        "x2" => return Ok(BiSeq::ChaconX2),
        _ => {}
    }
    let open = s.find('(').ok_or_else(err)?;
    if !s.ends_with(')') {
        return Err(err());
    }
    let head = &s[..open];
    let body = &s[open + 1..s.len() - 1];
    let word = |t: &str| -> Result<Vec<u8>, SubshiftError> {
        t.bytes().map(|c| if c.is_ascii_digit() { Ok(c - b'0') } else { Err(err()) }).collect()
    };
    let num = |t: &str| t.trim().parse::<i64>().map_err(|_| err());
    match head {
        "const" => Ok(BiSeq::constant(num(body)? as u8)),
        "ec" => {
            let parts: Vec<&str> = body.split(';').collect();
            if parts.len() != 4 {
                return Err(err());
            }
            Ok(BiSeq::EventuallyConstant {
                left: num(parts[0])? as u8,
                center: word(parts[1].trim())?,
                start: num(parts[2])?,
                right: num(parts[3])? as u8,
            })
        }
        "xi" => {
            let parts: Vec<&str> = body.split(';').collect();
            if parts.len() < 2 || parts.len() > 3 {
                return Err(err());
            }
            let address = Address::new(word(parts[0].trim())?, word(parts[1].trim())?)?;
            let anchor = if parts.len() == 3 { num(parts[2])? } else { 0 };
            Ok(BiSeq::chacon_xi(address, anchor))
        }
        "fixed" => {
            let parts: Vec<&str> = body.split(',').collect();
            if parts.len() != 3 || parts[0].trim() != "morse_square" {
                return Err(err());
            }
            Ok(BiSeq::SubstFixed(FixedPoint::new(num(parts[1])? as u8, num(parts[2])? as u8, Substitution::morse_square())?))
        }
        "sigma" => Ok(parse_descriptor(body)?.shift(1)),
        "dual" => parse_descriptor(body)?.dual(),
        "adic" => adic_factor_h(&parse_descriptor(body)?),
        "shift" => {
            let comma = body.rfind(',').ok_or_else(err)?;
            Ok(parse_descriptor(&body[..comma])?.shift(num(&body[comma + 1..])?))
        }
        _ => Err(err()),
    }
}

/// `H(x)_i = x_i + x_{i+1} mod 2`.
pub fn adic_factor_h(x: &BiSeq) -> Result<BiSeq, SubshiftError> {
    if x.alphabet_size() > 2 {
        return Err(SubshiftError::NotBinary);
    }
    Ok(BiSeq::Adic(Box::new(x.clone())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Outcome {
    /// Radius-`n` windows around `t` agree.
    ProximalWitness { t: i64 },
    /// The sequences are complements, so they never agree anywhere.
    DistalAtAllShifts,
    SyndeticUpToHorizon { max_gap: u64 },
    /// No agreement time in `start..=end`.
    GapViolation { start: i64, end: i64 },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceVerdict {
    pub depth: u64,
    pub horizon: u64,
    pub gap: Option<u64>,
    pub outcome: Outcome,
}

/// Times `t ∈ [-H, H]` where the radius-`n` windows around `t` agree.
pub fn agreement_times(x: &BiSeq, y: &BiSeq, n: u64, horizon: u64) -> Vec<i64> {
    let (n, h) = (n as i64, horizon as i64);
    let bx = x.block(-h - n, h + n + 1);
    let by = y.block(-h - n, h + n + 1);
    // run[i]: length of the agreement run ending at coordinate -h-n+i
    let mut run = vec![0usize; bx.len()];
    let mut len = 0;
    for i in 0..bx.len() {
        len = if bx[i] == by[i] { len + 1 } else { 0 };
        run[i] = len;
    }
    let width = (2 * n + 1) as usize;
    (-h..=h).filter(|&t| run[(t + h + 2 * n) as usize] >= width).collect()
}

/// First agreement time in `[-H, H]` by increasing `|t|`, positive first.
pub fn proximal_witness(x: &BiSeq, y: &BiSeq, n: u64, horizon: u64) -> EvidenceVerdict {
    let verdict = |outcome| EvidenceVerdict { depth: n, horizon, gap: None, outcome };
    if x.is_dual_of(y) {
        return verdict(Outcome::DistalAtAllShifts);
    }
    let times = agreement_times(x, y, n, horizon);
    let best = times.into_iter().min_by_key(|&t| (t.unsigned_abs(), t < 0));
    verdict(match best {
        Some(t) => Outcome::ProximalWitness { t },
        None => Outcome::Inconclusive,
    })
}

/// Syndeticity of the agreement times at depth `n` inside `[-H, H]`.
pub fn syndetic_check(x: &BiSeq, y: &BiSeq, n: u64, gap: u64, horizon: u64) -> Result<EvidenceVerdict, SubshiftError> {
    if gap == 0 || gap > horizon {
        return Err(SubshiftError::BadParams(format!("need 0 < g <= H, got g = {gap}, H = {horizon}")));
    }
    let times = agreement_times(x, y, n, horizon);
    let h = horizon as i64;
    let g = gap as i64;
    // scan upward from -H for g consecutive times without agreement
    let mut free_start = -h;
    let mut outcome = None;
    for &t in times.iter().chain(std::iter::once(&(h + 1))) {
        if t - free_start >= g {
            outcome = Some(Outcome::GapViolation { start: free_start, end: free_start + g - 1 });
            break;
        }
        free_start = t + 1;
    }
    let outcome = outcome.unwrap_or_else(|| {
        let max_gap = times.windows(2).map(|w| (w[1] - w[0]) as u64).max().unwrap_or(0);
        Outcome::SyndeticUpToHorizon { max_gap }
    });
    Ok(EvidenceVerdict { depth: n, horizon, gap: Some(gap), outcome })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceParams {
    pub depth: u64,
    pub gap: u64,
    pub horizon: u64,
}

impl Default for EvidenceParams {
    fn default() -> Self {
        EvidenceParams { depth: 8, gap: 256, horizon: 4096 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProximalLabel {
    EvidenceP,
    ProvenD,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrongLabel {
    EvidenceNotSp,
    SyndeticUpToHorizon,
    ProvenNotSp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairClassification {
    pub x: String,
    pub y: String,
    pub params: EvidenceParams,
    pub proximal: ProximalLabel,
    pub strong: StrongLabel,
    pub witness: EvidenceVerdict,
    pub syndetic: Option<EvidenceVerdict>,
}

/// Bundles [`proximal_witness`] and [`syndetic_check`] into labels that
/// claim no more than the evidence: a complement pair is proven distal and
/// hence not strongly proximal, everything else is horizon-bounded.
pub fn classify_pair(x: &BiSeq, y: &BiSeq, params: EvidenceParams) -> Result<PairClassification, SubshiftError> {
    let witness = proximal_witness(x, y, params.depth, params.horizon);
    let (proximal, strong, syndetic) = match witness.outcome {
        Outcome::DistalAtAllShifts => (ProximalLabel::ProvenD, StrongLabel::ProvenNotSp, None),
        _ => {
            let s = syndetic_check(x, y, params.depth, params.gap, params.horizon)?;
            let strong = match s.outcome {
                Outcome::GapViolation { .. } => StrongLabel::EvidenceNotSp,
                _ => StrongLabel::SyndeticUpToHorizon,
            };
            let proximal = match witness.outcome {
                Outcome::ProximalWitness { .. } => ProximalLabel::EvidenceP,
                _ => ProximalLabel::Inconclusive,
            };
            (proximal, strong, Some(s))
        }
    };
    Ok(PairClassification { x: x.to_string(), y: y.to_string(), params, proximal, strong, witness, syndetic })
}

/// The six Morse-square points `a, b, ā, b̄, σa, σb`.
pub fn morse_points() -> Vec<BiSeq> {
    vec![
        BiSeq::morse_a(),
        BiSeq::morse_b(),
        BiSeq::morse_a_bar(),
        BiSeq::morse_b_bar(),
        BiSeq::morse_a().shift(1),
        BiSeq::morse_b().shift(1),
    ]
}

/// All 15 unordered pairs of [`morse_points`], in lexicographic index order.
pub fn morse_table(params: EvidenceParams) -> Result<Vec<PairClassification>, SubshiftError> {
    let pts = morse_points();
    let mut out = vec![];
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            out.push(classify_pair(&pts[i], &pts[j], params)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(w: &[u8]) -> String {
        word_string(w)
    }

    #[test]
    fn morse_a_coordinates() {
        let a = BiSeq::morse_a();
        assert_eq!(s(&a.block(-4, 4)), "10011001");
        assert_eq!(s(&a.window(3)), "0011001");
        assert_eq!(s(&BiSeq::morse_a().dual().unwrap().block(-4, 4)), "01100110");
    }

    #[test]
    fn seeds_read_their_center() {
        for (seq, l, r) in [
            (BiSeq::morse_a(), 1, 1),
            (BiSeq::morse_b(), 0, 1),
            (BiSeq::morse_a_bar(), 0, 0),
            (BiSeq::morse_b_bar(), 1, 0),
        ] {
            assert_eq!(seq.block(-1, 1), vec![l, r]);
        }
    }

    #[test]
    fn non_extendable_seed_rejected() {
        let q = Substitution::new("t", vec![vec![0, 1], vec![1, 0]]).unwrap();
        // rule(1) = 10 does not end in 1
        assert!(matches!(FixedPoint::new(1, 0, q), Err(SubshiftError::BadSeed { .. })));
        assert!(matches!(Substitution::new("e", vec![vec![], vec![1]]), Err(SubshiftError::EmptyImage(0))));
    }

    #[test]
    fn chacon_blocks() {
        assert_eq!(s(&chacon_block(0).unwrap()), "0");
        assert_eq!(s(&chacon_block(1).unwrap()), "0010");
        assert_eq!(s(&chacon_block(2).unwrap()), "0010001010010");
        assert_eq!(chacon_block(3).unwrap().len(), 40);
        assert!(matches!(chacon_block(MAX_CHACON_LEVEL + 1), Err(SubshiftError::ChaconTooLarge(_))));
        for k in 0..8 {
            let b = chacon_block(k).unwrap();
            let mut expected = b.clone();
            expected.extend_from_slice(&b);
            expected.push(1);
            expected.extend_from_slice(&b);
            assert_eq!(chacon_block(k + 1).unwrap(), expected);
            assert_eq!(b.len() as u64, chacon_len(k));
            for (i, &c) in b.iter().enumerate() {
                assert_eq!(chacon_letter(k, i as u64), c);
            }
        }
    }

    #[test]
    fn chacon_x2_has_spacer_between_blocks() {
        let b2 = chacon_block(2).unwrap();
        let x2 = BiSeq::ChaconX2;
        let n = b2.len() as i64;
        let mut expected = b2.clone();
        expected.push(1);
        expected.extend_from_slice(&b2);
        assert_eq!(x2.block(-n, n + 1), expected);
        assert_eq!(s(&x2.block(-13, 14)), "001000101001010010001010010");
    }

    #[test]
    fn chacon_xi_degenerate_addresses() {
        let ones = Address::new(vec![2], vec![1]).unwrap();
        let x = BiSeq::chacon_xi(ones.clone(), 0);
        assert_eq!(x, BiSeq::ChaconX1.shift(1));
        let threes = Address::new(vec![], vec![3]).unwrap();
        assert_eq!(BiSeq::chacon_xi(threes, 0), BiSeq::ChaconX1.shift(-1));
        // the covered half agrees with the recursion
        let b = chacon_block(4).unwrap();
        for (i, &c) in b.iter().enumerate() {
            assert_eq!(x.letter(i as i64 - 1), c);
        }
    }

    #[test]
    fn chacon_xi_mixed_address_matches_blocks() {
        let addr = Address::new(vec![], vec![2, 3, 1]).unwrap();
        let x = BiSeq::chacon_xi(addr.clone(), 0);
        let k = 6;
        let off = address_offset(&addr, k) as i64;
        let b = chacon_block(k).unwrap();
        assert_eq!(x.block(-off, -off + b.len() as i64), b);
        assert_eq!(x.letter(0), 0);
    }

    #[test]
    fn shift_and_dual_windows() {
        let a = BiSeq::morse_a();
        let sa = a.clone().shift(3);
        assert_eq!(sa.window(5), a.block(-2, 9));
        assert_eq!(a.clone().dual().unwrap().dual().unwrap(), a);
        assert!(BiSeq::EventuallyConstant { center: vec![2], start: 0, left: 0, right: 0 }.dual().is_err());
    }

    #[test]
    fn morse_fixedness() {
        let a = BiSeq::morse_a();
        let q = Substitution::morse_square();
        for n in [1i64, 4, 16, 64] {
            let w = a.block(-n, n);
            assert_eq!(q.apply(&w), a.block(-4 * n, 4 * n));
        }
    }

    #[test]
    fn dual_detection() {
        let a = BiSeq::morse_a();
        assert!(a.is_dual_of(&BiSeq::morse_a_bar()));
        assert!(BiSeq::morse_b().is_dual_of(&BiSeq::morse_b_bar()));
        assert!(!a.is_dual_of(&BiSeq::morse_b_bar()));
        assert!(a.clone().shift(2).is_dual_of(&a.clone().dual().unwrap().shift(2)));
        assert!(!a.is_dual_of(&a));
        assert!(BiSeq::constant(0).is_dual_of(&BiSeq::constant(1)));
    }

    #[test]
    fn witness_examples() {
        let (a, b) = (BiSeq::morse_a(), BiSeq::morse_b());
        assert_eq!(proximal_witness(&a, &a, 8, 4096).outcome, Outcome::ProximalWitness { t: 0 });
        assert_eq!(proximal_witness(&a, &BiSeq::morse_a_bar(), 8, 4096).outcome, Outcome::DistalAtAllShifts);
        assert!(matches!(proximal_witness(&a, &b, 8, 4096).outcome, Outcome::ProximalWitness { .. }));
    }

    #[test]
    fn syndetic_examples() {
        let a = BiSeq::morse_a();
        let v = syndetic_check(&a, &a, 4, 16, 64).unwrap();
        assert_eq!(v.outcome, Outcome::SyndeticUpToHorizon { max_gap: 1 });
        let v = syndetic_check(&a, &BiSeq::morse_b(), 4, 256, 4096).unwrap();
        assert!(matches!(v.outcome, Outcome::GapViolation { .. }));
        assert!(syndetic_check(&a, &a, 4, 0, 10).is_err());
        assert!(syndetic_check(&a, &a, 4, 11, 10).is_err());
    }

    #[test]
    fn chacon_pair_agrees_on_the_left_only() {
        let (x1, x2) = (BiSeq::ChaconX1, BiSeq::ChaconX2);
        let times = agreement_times(&x1, &x2, 4, 6561);
        assert!(!times.is_empty());
        assert!(times.iter().all(|&t| t < 0));
    }

    /// Independent agreement oracle: compare letters one at a time.
    fn agrees_at(x: &BiSeq, y: &BiSeq, n: i64, t: i64) -> bool {
        (t - n..=t + n).all(|i| x.letter(i) == y.letter(i))
    }

    #[test]
    fn agreement_times_match_letterwise_oracle() {
        let pts = morse_points();
        for x in &pts {
            for y in &pts {
                let fast = agreement_times(x, y, 3, 200);
                let slow: Vec<i64> = (-200..=200).filter(|&t| agrees_at(x, y, 3, t)).collect();
                assert_eq!(fast, slow, "{x} {y}");
            }
        }
    }

    #[test]
    fn adic_examples() {
        let h0 = adic_factor_h(&BiSeq::constant(0)).unwrap();
        assert!(h0.window(20).iter().all(|&c| c == 0));
        let ha = adic_factor_h(&BiSeq::morse_a()).unwrap();
        let hab = adic_factor_h(&BiSeq::morse_a_bar()).unwrap();
        assert_eq!(ha.window(64), hab.window(64));
        let hb = adic_factor_h(&BiSeq::morse_b()).unwrap();
        assert!((0..16).any(|n| ha.window(n) != hb.window(n)));
        let t = BiSeq::EventuallyConstant { center: vec![2], start: 0, left: 0, right: 0 };
        assert_eq!(adic_factor_h(&t), Err(SubshiftError::NotBinary));
        let a = BiSeq::morse_a();
        let w = a.block(-5, 7);
        let expected: Vec<u8> = w.windows(2).map(|p| (p[0] + p[1]) % 2).collect();
        assert_eq!(ha.window(5), expected);
    }

    #[test]
    fn descriptors_round_trip() {
        let cases = [
            "a",
            "bbar",
            "x1",
            "x2",
            "shift(a,1)",
            "dual(shift(b,-3))",
            "adic(a)",
            "ec(0;0110;-2;0)",
            "xi(;231;0)",
            "const(1)",
        ];
        for c in cases {
            let seq = parse_descriptor(c).unwrap();
            assert_eq!(parse_descriptor(&seq.to_string()).unwrap(), seq, "{c}");
        }
        assert_eq!(parse_descriptor("sigma(a)").unwrap(), BiSeq::morse_a().shift(1));
        assert!(parse_descriptor("q").is_err());
        assert!(parse_descriptor("xi(4;1)").is_err());
    }

    fn arb_seq() -> impl Strategy<Value = BiSeq> {
        let base = prop_oneof![
            (0u8..2, 0u8..2).prop_map(|(l, r)| BiSeq::morse(l, r)),
            Just(BiSeq::ChaconX1),
            Just(BiSeq::ChaconX2),
            (proptest::collection::vec(0u8..2, 0..6), -5i64..5, 0u8..2, 0u8..2)
                .prop_map(|(center, start, left, right)| BiSeq::EventuallyConstant { center, start, left, right }),
        ];
        (base, -20i64..20, any::<bool>()).prop_map(|(b, k, d)| {
            let s = b.shift(k);
            if d { s.dual().unwrap() } else { s }
        })
    }

    proptest! {
        #[test]
        fn windows_are_nested(x in arb_seq(), n in 0u64..30, extra in 0u64..30) {
            let small = x.window(n);
            let big = x.window(n + extra);
            prop_assert_eq!(&big[extra as usize..extra as usize + small.len()], &small[..]);
        }

        #[test]
        fn shift_window_reindexes(x in arb_seq(), k in -40i64..40, n in 0u64..20) {
            let shifted = x.clone().shift(k).window(n);
            let wide = x.window(n + k.unsigned_abs());
            let start = (k + k.abs()) as usize;
            prop_assert_eq!(&wide[start..start + shifted.len()], &shifted[..]);
        }

        #[test]
        fn dual_is_an_involution(x in arb_seq(), n in 0u64..30) {
            prop_assert_eq!(x.clone().dual().unwrap().dual().unwrap().window(n), x.window(n));
        }

        #[test]
        fn dual_detection_is_sound(x in arb_seq(), y in arb_seq(), n in 0u64..40) {
            if x.is_dual_of(&y) {
                let (wx, wy) = (x.window(n), y.window(n));
                prop_assert!(wx.iter().zip(&wy).all(|(p, q)| p != q));
            }
        }

        #[test]
        fn witness_depth_monotone(x in arb_seq(), y in arb_seq(), n in 1u64..8) {
            if let Outcome::ProximalWitness { t } = proximal_witness(&x, &y, n, 300).outcome {
                for m in 0..n {
                    prop_assert!(agreement_times(&x, &y, m, 300).contains(&t));
                }
            }
        }

        #[test]
        fn gap_violation_depth_monotone(x in arb_seq(), y in arb_seq(), n in 0u64..6) {
            if let Outcome::GapViolation { .. } = syndetic_check(&x, &y, n, 40, 300).unwrap().outcome {
                let deeper = syndetic_check(&x, &y, n + 1 + n % 3, 40, 300).unwrap();
                prop_assert!(
                    matches!(deeper.outcome, Outcome::GapViolation { .. }),
                    "{:?}",
                    deeper
                );
            }
        }
    }
}
