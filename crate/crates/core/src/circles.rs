//! A cascade on countably many concentric circles around a center point:
//! `C_n` of radius `1 - n/(n²+1)` and `D_n` of radius `1/n`, with
//! `D_2 = C_1`.
//!
//! Tiers move along the chains
//! `C_2 → C_4 → …`, `… → C_5 → C_3 → C_1`, `C_1 → D_4 → D_6 → …` and
//! `… → D_5 → D_3 → C_2`; `C_0` and the center are fixed. The angle moves
//! by `α ↦ α + s·sin α` with `s = 1/t` on `C_t` and `s = 1/n` on `D_n`.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_MAX_STEPS: u64 = 10_000;
pub const ANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tier {
    C(u64),
    /// `n ≥ 3`; `D(2)` is stored as `C(1)`.
    D(u64),
    Center,
}

impl Tier {
    pub fn c(n: u64) -> Tier {
        Tier::C(n)
    }

    /// Panics for `n < 2`.
    pub fn d(n: u64) -> Tier {
        assert!(n >= 2, "D circles start at n = 2");
        if n == 2 { Tier::C(1) } else { Tier::D(n) }
    }

    pub fn radius(self) -> f64 {
        match self {
            Tier::C(n) => {
                let n = n as f64;
                1.0 - n / (n * n + 1.0)
            }
            Tier::D(n) => 1.0 / n as f64,
            Tier::Center => 0.0,
        }
    }

    pub fn is_fixed(self) -> bool {
        matches!(self, Tier::C(0) | Tier::Center)
    }

    /// Next tier and the coefficient `s` of the angle update.
    fn forward(self) -> (Tier, f64) {
        match self {
            Tier::C(0) | Tier::Center => (self, 0.0),
            Tier::C(1) => (Tier::D(4), 0.5),
            Tier::C(t) if t % 2 == 0 => (Tier::C(t + 2), 1.0 / t as f64),
            Tier::C(t) => (Tier::C(t - 2), 1.0 / t as f64),
            Tier::D(3) => (Tier::C(2), 1.0 / 3.0),
            Tier::D(n) if n % 2 == 0 => (Tier::D(n + 2), 1.0 / n as f64),
            Tier::D(n) => (Tier::D(n - 2), 1.0 / n as f64),
        }
    }

    /// Previous tier and the coefficient used on it.
    fn backward(self) -> (Tier, f64) {
        let prev = match self {
            Tier::C(0) | Tier::Center => return (self, 0.0),
            Tier::C(2) => Tier::D(3),
            Tier::C(t) if t % 2 == 0 => Tier::C(t - 2),
            Tier::C(t) => Tier::C(t + 2),
            Tier::D(4) => Tier::C(1),
            Tier::D(n) if n % 2 == 0 => Tier::D(n - 2),
            Tier::D(n) => Tier::D(n + 2),
        };
        (prev, prev.forward().1)
    }

    /// Forward asymptotic to `C_0`, backward to the center.
    pub fn in_forward_family(self) -> bool {
        match self {
            Tier::C(t) => t > 0 && t % 2 == 0,
            Tier::D(n) => n % 2 == 1,
            Tier::Center => false,
        }
    }

    /// Forward asymptotic to the center, backward to `C_0`.
    pub fn in_backward_family(self) -> bool {
        match self {
            Tier::C(t) => t % 2 == 1,
            Tier::D(n) => n % 2 == 0,
            Tier::Center => false,
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tier::C(n) => write!(f, "C{n}"),
            Tier::D(n) => write!(f, "D{n}"),
            Tier::Center => f.write_str("i"),
        }
    }
}

impl FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("bad tier {s:?}");
        match s.trim() {
            "i" | "center" => Ok(Tier::Center),
            t if t.starts_with('C') => Ok(Tier::C(t[1..].parse().map_err(|_| bad())?)),
            t if t.starts_with('D') => {
                let n: u64 = t[1..].parse().map_err(|_| bad())?;
                if n < 2 { Err(bad()) } else { Ok(Tier::d(n)) }
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for Tier {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tier {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CirclePoint {
    pub tier: Tier,
    /// In `[0, π)`; zero on the center.
    pub angle: f64,
}

pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(PI);
    if r >= PI { 0.0 } else { r }
}

impl CirclePoint {
    pub fn new(tier: Tier, angle: f64) -> Self {
        let angle = if tier == Tier::Center { 0.0 } else { normalize_angle(angle) };
        CirclePoint { tier, angle }
    }

    pub fn center() -> Self {
        CirclePoint { tier: Tier::Center, angle: 0.0 }
    }

    pub fn radius(&self) -> f64 {
        self.tier.radius()
    }

    pub fn is_fixed(&self) -> bool {
        self.tier.is_fixed()
    }

    pub fn approx_eq(&self, other: &CirclePoint, tol: f64) -> bool {
        if self.tier != other.tier {
            return false;
        }
        let d = (self.angle - other.angle).abs();
        d.min(PI - d) <= tol
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tier {
            Tier::Center => f.write_str("i"),
            t => write!(f, "({t}, {})", self.angle),
        }
    }
}

pub fn step(p: CirclePoint) -> CirclePoint {
    let (tier, s) = p.tier.forward();
    CirclePoint::new(tier, p.angle + s * p.angle.sin())
}

/// Solves `β = α + s·sin α` for `α ∈ [0, π)`; monotone since `s < 1`.
fn invert_angle(beta: f64, s: f64) -> f64 {
    if s == 0.0 {
        return beta;
    }
    let mut a = beta;
    for _ in 0..100 {
        let g = a + s * a.sin() - beta;
        let next = a - g / (1.0 + s * a.cos());
        let next = next.clamp(0.0, PI);
        if (next - a).abs() < 1e-15 {
            return next;
        }
        a = next;
    }
    a
}

pub fn step_inverse(p: CirclePoint) -> CirclePoint {
    let (tier, s) = p.tier.backward();
    CirclePoint::new(tier, invert_angle(p.angle, s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Limit {
    ToC0 { steps: u64 },
    ToCenter { steps: u64 },
    Fixed,
    Inconclusive,
}

impl Limit {
    fn target(self) -> Option<u8> {
        match self {
            Limit::ToC0 { .. } => Some(0),
            Limit::ToCenter { .. } => Some(1),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticClass {
    pub forward: Limit,
    pub backward: Limit,
}

fn run_limit(p: CirclePoint, max_steps: u64, eps: f64, f: fn(CirclePoint) -> CirclePoint) -> Limit {
    if p.is_fixed() {
        return Limit::Fixed;
    }
    let c0 = Tier::C(0).radius();
    let mut q = p;
    for steps in 1..=max_steps {
        q = f(q);
        let r = q.radius();
        if (c0 - r).abs() < eps {
            return Limit::ToC0 { steps };
        }
        if r < eps {
            return Limit::ToCenter { steps };
        }
    }
    Limit::Inconclusive
}

/// Radial classification of forward and backward orbits: the first step at
/// which the radius comes within `ε` of `C_0`'s radius or of zero.
pub fn asymptotic_class(p: CirclePoint, max_steps: u64, eps: f64) -> AsymptoticClass {
    AsymptoticClass {
        forward: run_limit(p, max_steps, eps, step),
        backward: run_limit(p, max_steps, eps, step_inverse),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairLabel {
    EvidenceP,
    EvidenceD,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleParams {
    pub max_steps: u64,
    pub epsilon: f64,
}

impl Default for CircleParams {
    fn default() -> Self {
        CircleParams { max_steps: DEFAULT_MAX_STEPS, epsilon: DEFAULT_EPSILON }
    }
}

/// Proximal exactly when both orbits share a radial limit in the same time
/// direction, or one point is the center and the other tends to it. Only
/// radii are compared.
pub fn pair_class(p: CirclePoint, q: CirclePoint, params: CircleParams) -> PairLabel {
    if p.approx_eq(&q, ANGLE_TOLERANCE) {
        return PairLabel::EvidenceP;
    }
    let a = asymptotic_class(p, params.max_steps, params.epsilon);
    let b = asymptotic_class(q, params.max_steps, params.epsilon);
    let to_center = |c: AsymptoticClass| c.forward.target() == Some(1) || c.backward.target() == Some(1);
    let proximal = match (p.tier, q.tier) {
        (Tier::Center, _) => to_center(b),
        (_, Tier::Center) => to_center(a),
        _ => {
            (a.forward.target().is_some() && a.forward.target() == b.forward.target())
                || (a.backward.target().is_some() && a.backward.target() == b.backward.target())
        }
    };
    if proximal { PairLabel::EvidenceP } else { PairLabel::EvidenceD }
}

/// Closed-form membership in the proximal relation: the diagonal, pairs
/// within one family, and pairs of a non-fixed point with the center.
pub fn table_in_p(p: CirclePoint, q: CirclePoint) -> bool {
    if p.approx_eq(&q, ANGLE_TOLERANCE) {
        return true;
    }
    let moving = |t: Tier| t.in_forward_family() || t.in_backward_family();
    match (p.tier, q.tier) {
        (Tier::Center, t) | (t, Tier::Center) => moving(t),
        (s, t) => {
            (s.in_forward_family() && t.in_forward_family()) || (s.in_backward_family() && t.in_backward_family())
        }
    }
}

/// Strong proximality is trivial: every off-diagonal proximal pair has
/// an off-diagonal limit on `C_0 ∪ {i}`.
pub fn table_in_sp(p: CirclePoint, q: CirclePoint) -> bool {
    p.approx_eq(&q, ANGLE_TOLERANCE)
}

/// Tiers of the sampled grid.
pub fn sample_tiers() -> Vec<Tier> {
    vec![
        Tier::Center,
        Tier::C(0),
        Tier::C(1),
        Tier::C(2),
        Tier::C(3),
        Tier::C(4),
        Tier::C(5),
        Tier::D(3),
        Tier::D(4),
        Tier::D(5),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub p: CirclePoint,
    pub q: CirclePoint,
    pub label: PairLabel,
    pub table: bool,
}

/// `(t_i, α) × (t_j, β)` over [`sample_tiers`].
pub fn pair_grid(alpha: f64, beta: f64, params: CircleParams) -> Vec<GridEntry> {
    let tiers = sample_tiers();
    let mut out = Vec::with_capacity(tiers.len() * tiers.len());
    for &s in &tiers {
        for &t in &tiers {
            let (p, q) = (CirclePoint::new(s, alpha), CirclePoint::new(t, beta));
            out.push(GridEntry { p, q, label: pair_class(p, q, params), table: table_in_p(p, q) });
        }
    }
    out
}

/// Writes `iteration,tier,angle,radius` rows for `steps` forward steps.
pub fn write_trajectory<W: Write>(p: CirclePoint, steps: u64, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "tier", "angle", "radius"])?;
    let mut q = p;
    for k in 0..=steps {
        w.write_record([k.to_string(), q.tier.to_string(), format!("{:.12}", q.angle), format!("{:.12}", q.radius())])?;
        q = step(q);
    }
    w.flush()?;
    Ok(())
}
