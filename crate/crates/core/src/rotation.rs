//! Rotation by a rational `a = p/q` on the circle `ℝ/ℤ`, charted as
//! `[−1/2, 1/2)`, with exact arc algebra and hitting sets
//! `N(x, U) = {n ≥ 1 : x + n·a ∈ U}`.
//!
//! Everything is exact rational arithmetic. The rational model is periodic
//! with period `q`; results past `q` iterates describe that periodic model,
//! and every report carries an `injective` flag saying whether the horizon
//! stayed below `q`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ipsets::{self, IntSet, IpSetError};
use crate::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RotationError {
    #[error("iterate {n} exceeds horizon {horizon}")]
    HorizonExceeded { n: i64, horizon: u64 },
    #[error("no admissible iterate up to horizon {horizon}")]
    HorizonExhausted { horizon: u64 },
    #[error("arc set has empty interior")]
    EmptyInterior,
    #[error("invalid rotation number {0}")]
    InvalidAlpha(String),
    #[error("cannot parse {what}: {input}")]
    Parse { what: &'static str, input: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Closure(#[from] IpSetError),
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Canonical representative of `x mod 1` in `[−1/2, 1/2)`.
fn wrap(x: &BigRational) -> BigRational {
    let shift = (x + half()).floor();
    x - shift
}

pub fn parse_rational(text: &str) -> Result<BigRational, RotationError> {
    BigRational::from_str(text.trim()).map_err(|_| RotationError::Parse {
        what: "rational",
        input: text.to_string(),
    })
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A point of the circle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(BigRational);

impl Angle {
    pub fn new(x: BigRational) -> Self {
        Angle(wrap(&x))
    }

    pub fn zero() -> Self {
        Angle(BigRational::zero())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn rotate(&self, by: &BigRational) -> Angle {
        Angle::new(&self.0 + by)
    }

    pub fn negate(&self) -> Angle {
        Angle::new(-&self.0)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl FromStr for Angle {
    type Err = RotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s).map(Angle::new)
    }
}

impl Serialize for Angle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Interval of the chart `[−1/2, 1/2)` with explicit endpoint flags.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigRational,
    lo_closed: bool,
    hi: BigRational,
    hi_closed: bool,
}

impl Interval {
    fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Less => false,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Greater => true,
        }
    }

    fn contains(&self, x: &BigRational) -> bool {
        let above = match self.lo.cmp(x) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Greater => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval { lo, lo_closed, hi, hi_closed }
    }

    fn shifted(&self, by: &BigRational) -> Interval {
        Interval {
            lo: &self.lo + by,
            lo_closed: self.lo_closed,
            hi: &self.hi + by,
            hi_closed: self.hi_closed,
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            format_rational(&self.lo),
            format_rational(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Finite union of arcs, kept as sorted disjoint chart intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ArcSet {
    intervals: Vec<Interval>,
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet::default()
    }

    pub fn full() -> Self {
        ArcSet {
            intervals: vec![Interval {
                lo: -half(),
                lo_closed: true,
                hi: half(),
                hi_closed: false,
            }],
        }
    }

    /// The arc running counterclockwise from `lo` to `hi` (real endpoints,
    /// `0 ≤ hi − lo ≤ 1`), wrapped onto the circle.
    pub fn arc(
        lo: BigRational,
        lo_closed: bool,
        hi: BigRational,
        hi_closed: bool,
    ) -> Result<Self, RotationError> {
        let len = &hi - &lo;
        if len.is_negative() || len > BigRational::one() {
            return Err(RotationError::Parse {
                what: "arc",
                input: format!("{},{}", format_rational(&lo), format_rational(&hi)),
            });
        }
        if len == BigRational::one() {
            return Ok(ArcSet::full());
        }
        Ok(ArcSet::from_pieces(vec![Interval { lo, lo_closed, hi, hi_closed }]))
    }

    /// Open arc `(lo, hi)`.
    pub fn open(lo: BigRational, hi: BigRational) -> Result<Self, RotationError> {
        ArcSet::arc(lo, false, hi, false)
    }

    /// `[lo, hi)`.
    pub fn closed_open(lo: BigRational, hi: BigRational) -> Result<Self, RotationError> {
        ArcSet::arc(lo, true, hi, false)
    }

    /// Brings arbitrary real intervals (each of length < 1) into canonical form.
    fn from_pieces(pieces: Vec<Interval>) -> Self {
        let chart = Interval {
            lo: -half(),
            lo_closed: true,
            hi: half(),
            hi_closed: false,
        };
        let mut parts = Vec::new();
        for p in pieces {
            if p.is_empty() {
                continue;
            }
            let k = (&p.lo + half()).floor();
            let p = p.shifted(&-k);
            for s in [BigRational::zero(), -BigRational::one()] {
                let piece = p.shifted(&s).intersect(&chart);
                if !piece.is_empty() {
                    parts.push(piece);
                }
            }
        }
        ArcSet { intervals: merge(parts) }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: &Angle) -> bool {
        self.intervals.iter().any(|i| i.contains(&x.0))
    }

    pub fn has_interior(&self) -> bool {
        self.intervals.iter().any(|i| i.lo < i.hi)
    }

    pub fn measure(&self) -> BigRational {
        self.intervals.iter().map(|i| &i.hi - &i.lo).sum()
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        ArcSet { intervals: merge(all) }
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let mut out = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                let c = a.intersect(b);
                if !c.is_empty() {
                    out.push(c);
                }
            }
        }
        ArcSet { intervals: merge(out) }
    }

    /// `U + by`.
    pub fn rotate(&self, by: &BigRational) -> ArcSet {
        ArcSet::from_pieces(self.intervals.iter().map(|i| i.shifted(by)).collect())
    }

    /// `−U`.
    pub fn negate(&self) -> ArcSet {
        ArcSet::from_pieces(
            self.intervals
                .iter()
                .map(|i| Interval {
                    lo: -&i.hi,
                    lo_closed: i.hi_closed,
                    hi: -&i.lo,
                    hi_closed: i.lo_closed,
                })
                .collect(),
        )
    }

    pub fn is_symmetric(&self) -> bool {
        self.negate() == *self
    }

    /// `U ∩ −U`.
    pub fn symmetric_core(&self) -> ArcSet {
        self.intersect(&self.negate())
    }
}

fn merge(mut parts: Vec<Interval>) -> Vec<Interval> {
    parts.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
    let mut out: Vec<Interval> = Vec::new();
    for p in parts {
        if let Some(last) = out.last_mut() {
            let touches = match p.lo.cmp(&last.hi) {
                Ordering::Less => true,
                Ordering::Equal => last.hi_closed || p.lo_closed,
                Ordering::Greater => false,
            };
            if touches {
                match p.hi.cmp(&last.hi) {
                    Ordering::Greater => {
                        last.hi = p.hi;
                        last.hi_closed = p.hi_closed;
                    }
                    Ordering::Equal => last.hi_closed |= p.hi_closed,
                    Ordering::Less => {}
                }
                continue;
            }
        }
        out.push(p);
    }
    out
}

impl fmt::Display for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("empty");
        }
        let parts: Vec<String> = self.intervals.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("|"))
    }
}

/// Parses `full`, `empty`, `lo,hi` (open), or bracketed forms such as
/// `[0,1/8)`; several arcs may be joined with `|`.
impl FromStr for ArcSet {
    type Err = RotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || RotationError::Parse {
            what: "arc",
            input: s.to_string(),
        };
        let mut out = ArcSet::empty();
        for item in s.split('|') {
            let item = item.trim();
            let arc = match item {
                "full" => ArcSet::full(),
                "empty" => ArcSet::empty(),
                _ => {
                    let (lo_closed, rest) = match item.chars().next() {
                        Some('[') => (true, &item[1..]),
                        Some('(') => (false, &item[1..]),
                        _ => (false, item),
                    };
                    let (hi_closed, rest) = match rest.chars().last() {
                        Some(']') => (true, &rest[..rest.len() - 1]),
                        Some(')') => (false, &rest[..rest.len() - 1]),
                        _ => (false, rest),
                    };
                    let (lo, hi) = rest.split_once(',').ok_or_else(err)?;
                    ArcSet::arc(parse_rational(lo)?, lo_closed, parse_rational(hi)?, hi_closed)?
                }
            };
            out = out.union(&arc);
        }
        Ok(out)
    }
}

impl Serialize for ArcSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ArcSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

pub const DEFAULT_ALPHA: (i64, i64) = (610, 987);

/// Rotation number and iterate horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationConfig {
    alpha: BigRational,
    horizon: u64,
}

impl Default for RotationConfig {
    fn default() -> Self {
        RotationConfig::new(
            BigRational::new(BigInt::from(DEFAULT_ALPHA.0), BigInt::from(DEFAULT_ALPHA.1)),
            (DEFAULT_ALPHA.1 - 1) as u64,
        )
        .expect("valid default")
    }
}

impl RotationConfig {
    pub fn new(alpha: BigRational, horizon: u64) -> Result<Self, RotationError> {
        let alpha = wrap(&alpha);
        if alpha.is_zero() {
            return Err(RotationError::InvalidAlpha(format_rational(&alpha)));
        }
        Ok(RotationConfig { alpha, horizon })
    }

    pub fn with_horizon(&self, horizon: u64) -> Self {
        RotationConfig {
            alpha: self.alpha.clone(),
            horizon,
        }
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Denominator `q` of the rotation number: the orbit period.
    pub fn period(&self) -> &BigInt {
        self.alpha.denom()
    }

    /// Whether `n ↦ n·a` is injective on `[0..horizon]`.
    pub fn injective(&self) -> bool {
        BigInt::from(self.horizon) < *self.period()
    }

    fn point(&self, n: &BigInt) -> Angle {
        Angle::new(&self.alpha * BigRational::from_integer(n.clone()))
    }
}

/// `n·a mod 1`.
pub fn orbit_point(n: i64, cfg: &RotationConfig) -> Result<Angle, RotationError> {
    if n.unsigned_abs() > cfg.horizon {
        return Err(RotationError::HorizonExceeded { n, horizon: cfg.horizon });
    }
    Ok(cfg.point(&BigInt::from(n)))
}

/// Membership oracle for `x + n·a ∈ U`, tabulated per residue `n mod q`
/// when `q` is small.
struct OrbitMembership<'a> {
    table: Option<(u64, u64, Vec<bool>)>,
    x: Angle,
    arcs: &'a ArcSet,
    cfg: &'a RotationConfig,
}

const TABLE_LIMIT: u64 = 1 << 22;

impl<'a> OrbitMembership<'a> {
    fn new(x: &Angle, arcs: &'a ArcSet, cfg: &'a RotationConfig) -> Self {
        let q = cfg.alpha.denom().to_u64().filter(|&q| q <= TABLE_LIMIT);
        let table = q.map(|q| {
            let p = cfg.alpha.numer().mod_floor(&BigInt::from(q)).to_u64().expect("p mod q");
            let unit = BigRational::new(BigInt::one(), BigInt::from(q));
            let table = (0..q)
                .map(|r| arcs.contains(&x.rotate(&(&unit * BigInt::from(r)))))
                .collect();
            (q, p, table)
        });
        OrbitMembership {
            table,
            x: x.clone(),
            arcs,
            cfg,
        }
    }

    fn hits(&self, n: &BigInt) -> bool {
        match &self.table {
            Some((q, p, table)) => {
                let r = n.mod_floor(&BigInt::from(*q)).to_u64().expect("residue");
                let idx = (r as u128 * *p as u128 % *q as u128) as usize;
                table[idx]
            }
            None => self.arcs.contains(&self.x.rotate(self.cfg.point(n).value())),
        }
    }

    fn hits_u64(&self, n: u64) -> bool {
        match &self.table {
            Some((q, p, table)) => table[((n % q) as u128 * *p as u128 % *q as u128) as usize],
            None => self.hits(&BigInt::from(n)),
        }
    }
}

/// `{n ∈ [1..horizon] : x + n·a ∈ U}` as machine integers.
pub fn hitting_times(x: &Angle, u: &ArcSet, cfg: &RotationConfig) -> Vec<u64> {
    let oracle = OrbitMembership::new(x, u, cfg);
    (1..=cfg.horizon).filter(|&n| oracle.hits_u64(n)).collect()
}

/// `N(x, U)` truncated to `[1..horizon]`.
pub fn hitting_set(x: &Angle, u: &ArcSet, cfg: &RotationConfig) -> IntSet {
    hitting_times(x, u, cfg).into_iter().map(BigInt::from).collect()
}

/// `N(U, V) = {n ≥ 1 : U ∩ (V − n·a) ≠ ∅}` up to the horizon, by arc algebra.
pub fn return_times(u: &ArcSet, v: &ArcSet, cfg: &RotationConfig) -> Vec<u64> {
    (1..=cfg.horizon)
        .filter(|&n| {
            let back = -(&cfg.alpha * BigRational::from_integer(BigInt::from(n)));
            !u.intersect(&v.rotate(&back)).is_empty()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop31Report {
    pub verdict: Verdict,
    pub horizon: u64,
    pub return_times: usize,
    pub differences: usize,
    /// Differences `n − m > 0` not in `N(U,V)`.
    pub violations: Vec<u64>,
    /// Elements of `N(U,V)` up to `horizon/2` never realized as a difference.
    pub unrealized: Vec<u64>,
    /// Size of `N(U,V) ∩ (horizon/2, horizon]`, not checked for realization.
    pub edge_band: usize,
    pub injective: bool,
}

/// Compares `N(U,V)` with `(N(0,V) − N(0,U))_+` on the window.
pub fn check_prop301(u: &ArcSet, v: &ArcSet, cfg: &RotationConfig) -> Result<Prop31Report, RotationError> {
    if !u.has_interior() || !v.has_interior() {
        return Err(RotationError::EmptyInterior);
    }
    let nuv = return_times(u, v, cfg);
    let nu = hitting_times(&Angle::zero(), u, cfg);
    let nv = hitting_times(&Angle::zero(), v, cfg);
    let h = cfg.horizon as usize;
    let mut is_diff = vec![false; h + 1];
    for &b in &nv {
        for &a in &nu {
            if b > a {
                is_diff[(b - a) as usize] = true;
            }
        }
    }
    let mut in_nuv = vec![false; h + 1];
    for &n in &nuv {
        in_nuv[n as usize] = true;
    }
    let violations: Vec<u64> = (1..=h).filter(|&d| is_diff[d] && !in_nuv[d]).map(|d| d as u64).collect();
    let unrealized: Vec<u64> = nuv
        .iter()
        .copied()
        .filter(|&n| 2 * n <= cfg.horizon && !is_diff[n as usize])
        .collect();
    let edge_band = nuv.iter().filter(|&&n| 2 * n > cfg.horizon).count();
    let verdict = if !violations.is_empty() {
        Verdict::Fail
    } else if unrealized.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(Prop31Report {
        verdict,
        horizon: cfg.horizon,
        return_times: nuv.len(),
        differences: is_diff.iter().filter(|&&b| b).count(),
        violations,
        unrealized,
        edge_band,
        injective: cfg.injective(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrentSip {
    pub generators: IntSet,
    /// Size of `SIP(F)_+` checked against `N(0,U)`.
    pub certified: usize,
    pub certificate: bool,
    pub injective: bool,
}

/// Greedy `F` with `SIP(F)_+ ⊂ N(0, U)`: at each step intersect the
/// pullbacks of `U ∩ −U` along `SIP(F)` and take the least larger return.
pub fn build_recurrent_sip(
    u: &ArcSet,
    depth: usize,
    cfg: &RotationConfig,
) -> Result<RecurrentSip, RotationError> {
    let core = u.symmetric_core();
    if !core.contains(&Angle::zero()) {
        return Err(RotationError::Precondition("0 is not in U ∩ −U".into()));
    }
    let mut gens = IntSet::new();
    while gens.len() < depth {
        let sip = ipsets::sip_closure(&gens)?;
        let mut v = core.clone();
        for n in sip.iter() {
            let back = -(&cfg.alpha * BigRational::from_integer(n.clone()));
            v = v.intersect(&core.rotate(&back));
        }
        let floor = sip.max().cloned().unwrap_or_default();
        let start = floor.to_u64().expect("fits") + 1;
        let oracle = OrbitMembership::new(&Angle::zero(), &v, cfg);
        let m = (start..=cfg.horizon)
            .find(|&m| oracle.hits_u64(m))
            .ok_or(RotationError::HorizonExhausted { horizon: cfg.horizon })?;
        gens = gens.union(&IntSet::from_i64s(&[m as i64]));
    }
    // Certificate: fresh closure, direct rational orbit points.
    let sip_plus = ipsets::positive_part(&ipsets::sip_closure(&gens)?);
    let certificate = sip_plus.iter().all(|n| u.contains(&cfg.point(n)));
    Ok(RecurrentSip {
        generators: gens,
        certified: sip_plus.len(),
        certificate,
        injective: cfg.injective(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub t: u64,
    /// Largest orbit value over `SIP(A)_+` before the step.
    pub s: Angle,
    /// Same value after adding `t`.
    pub new_max: Angle,
    pub doubled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainEnd {
    /// No extension exists up to the horizon.
    NoExtension,
    MaxDepth,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub seed: IntSet,
    pub chain: IntSet,
    pub depth: usize,
    pub steps: Vec<ChainStep>,
    pub s0: Angle,
    /// `⌈log2(c / s0)⌉ + 1` with `c` the right end of `U_half`; absent when `s0 = 0`.
    pub depth_bound: Option<u32>,
    pub end: ChainEnd,
    /// Upper end of the exhaustive search in the final step.
    pub searched_to: u64,
    pub doubling_holds: bool,
    pub bound_holds: bool,
    pub injective: bool,
}

fn max_orbit(set: &IntSet, cfg: &RotationConfig) -> Angle {
    set.iter()
        .filter(|n| n.is_positive())
        .map(|n| cfg.point(n))
        .max()
        .unwrap_or_else(Angle::zero)
}

/// Extends `seed` one element at a time, always taking the least `t`
/// beyond every element of `SIP(A)` with `t + SIP(A) ⊂ N(0, U_half)`.
pub fn extension_chain(
    u_half: &ArcSet,
    seed: &IntSet,
    max_depth: usize,
    cfg: &RotationConfig,
) -> Result<ChainReport, RotationError> {
    let [arc] = u_half.intervals() else {
        return Err(RotationError::Precondition("U_half must be a single arc".into()));
    };
    if arc.lo().is_negative() {
        return Err(RotationError::Precondition("U_half must lie in [0, 1/2)".into()));
    }
    if seed.is_empty() || seed.min().is_some_and(|m| !m.is_positive()) {
        return Err(RotationError::Precondition("seed must be a nonempty set of positive integers".into()));
    }
    let upper = arc.hi().clone();

    let oracle = OrbitMembership::new(&Angle::zero(), u_half, cfg);
    let sip = ipsets::sip_closure(seed)?;
    if let Some(bad) = sip.iter().find(|n| n.is_positive() && !oracle.hits(n)) {
        return Err(RotationError::Precondition(format!(
            "{bad} is in SIP(seed)_+ but not in N(0, U_half)"
        )));
    }

    let s0 = max_orbit(&sip, cfg);
    let depth_bound = (!s0.value().is_zero()).then(|| {
        // Least k with 2^k · s0 ≥ upper.
        let mut k = 0u32;
        let mut v = s0.value().clone();
        while v < upper {
            v *= BigInt::from(2);
            k += 1;
        }
        k + 1
    });

    let mut chain = seed.clone();
    let mut steps = Vec::new();
    let mut end = ChainEnd::MaxDepth;
    let mut searched_to = 0;
    while chain.len() < max_depth {
        let sip = ipsets::sip_closure(&chain)?;
        let s = max_orbit(&sip, cfg);
        // Second route: positive sums of the symmetrized set.
        let ip_sym = ipsets::ip_closure(&ipsets::symmetrize(&chain))?;
        let s_alt = max_orbit(&ip_sym, cfg);
        if s != s_alt {
            return Err(RotationError::Precondition(format!(
                "SIP and IP(A±) disagree: {s} vs {s_alt}"
            )));
        }
        let sigma = sip.max().and_then(|m| m.to_u64()).unwrap_or(0);
        let shifts: Vec<i64> = sip.iter().map(|n| n.to_i64().expect("fits")).collect();
        let found = (sigma + 1..=cfg.horizon).find(|&t| {
            shifts.iter().all(|&n| oracle.hits_u64((t as i64 + n) as u64))
        });
        match found {
            Some(t) => {
                chain = chain.union(&IntSet::from_i64s(&[t as i64]));
                let new_max = max_orbit(&ipsets::sip_closure(&chain)?, cfg);
                let doubled = *new_max.value() >= s.value() * BigInt::from(2);
                steps.push(ChainStep { t, s, new_max, doubled });
            }
            None => {
                end = ChainEnd::NoExtension;
                searched_to = cfg.horizon;
                break;
            }
        }
    }
    let depth = chain.len();
    Ok(ChainReport {
        seed: seed.clone(),
        doubling_holds: steps.iter().all(|s| s.doubled),
        bound_holds: depth_bound.is_none_or(|b| depth as u32 <= b),
        chain,
        depth,
        steps,
        s0,
        depth_bound,
        end,
        searched_to,
        injective: cfg.injective(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn cfg(h: u64) -> RotationConfig {
        RotationConfig::default().with_horizon(h)
    }

    #[test]
    fn orbit_examples() {
        let c = cfg(100);
        assert_eq!(orbit_point(5, &c).unwrap(), Angle::new(r("89/987")));
        assert_eq!(orbit_point(0, &c).unwrap(), Angle::zero());
        assert_eq!(orbit_point(8, &c).unwrap(), Angle::new(r("-55/987")));
        assert!(orbit_point(101, &c).is_err());
    }

    #[test]
    fn angle_wraps_into_chart() {
        assert_eq!(Angle::new(r("1/2")).value(), &r("-1/2"));
        assert_eq!(Angle::new(r("7/4")).value(), &r("-1/4"));
        assert_eq!(Angle::new(r("-1/2")).value(), &r("-1/2"));
    }

    #[test]
    fn arc_algebra() {
        let u: ArcSet = "-1/8,1/8".parse().unwrap();
        assert!(u.is_symmetric());
        assert!(!u.contains(&Angle::new(r("1/8"))));
        let plus: ArcSet = "[0,1/8)".parse().unwrap();
        let minus: ArcSet = "(-1/8,0]".parse().unwrap();
        assert_eq!(plus.union(&minus), u);
        assert_eq!(plus.intersect(&minus).to_string(), "[0,0]");
        assert!(!plus.intersect(&minus).has_interior());
        // Wrapping across the cut at ±1/2.
        let w = u.rotate(&r("1/2"));
        assert_eq!(w.to_string(), "[-1/2,-3/8)|(3/8,1/2)");
        assert!(w.contains(&Angle::new(r("1/2"))));
        assert_eq!(w.measure(), r("1/4"));
        assert_eq!(w.rotate(&r("-1/2")), u);
        assert_eq!(ArcSet::from_str("[0,1)").unwrap(), ArcSet::full());
        assert_eq!(plus.negate(), minus);
    }

    #[test]
    fn hitting_examples() {
        let c = cfg(13);
        let u: ArcSet = "-1/8,1/8".parse().unwrap();
        assert_eq!(hitting_set(&Angle::zero(), &u, &c), IntSet::from_i64s(&[5, 8, 13]));
        let plus: ArcSet = "[0,1/8)".parse().unwrap();
        assert_eq!(hitting_set(&Angle::zero(), &plus, &c), IntSet::from_i64s(&[5, 13]));
        assert_eq!(hitting_times(&Angle::zero(), &ArcSet::full(), &c), (1..=13).collect::<Vec<_>>());
        let c = cfg(34);
        assert_eq!(
            hitting_set(&Angle::zero(), &u, &c),
            IntSet::from_i64s(&[5, 8, 13, 16, 18, 21, 26, 29, 34])
        );
    }

    #[test]
    fn table_and_direct_paths_agree() {
        let u: ArcSet = "[-1/5,1/7)|(1/3,2/5]".parse().unwrap();
        let c = cfg(400);
        let x = Angle::new(r("3/11"));
        let table = OrbitMembership::new(&x, &u, &c);
        let direct = OrbitMembership { table: None, x: x.clone(), arcs: &u, cfg: &c };
        for n in -400i64..=400 {
            assert_eq!(table.hits(&BigInt::from(n)), direct.hits(&BigInt::from(n)), "{n}");
        }
    }

    #[test]
    fn prop31_examples() {
        let u: ArcSet = "-1/8,1/8".parse().unwrap();
        // 36·a = 246/987 is barely inside N(U,U); the only orbit point that
        // realizes it as a difference is m = 969, past this window.
        let rep = check_prop301(&u, &u, &cfg(200)).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive, "{rep:?}");
        assert_eq!(rep.unrealized, vec![36]);
        assert!(rep.violations.is_empty());
        let rep = check_prop301(&u, &u, &cfg(1100)).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{rep:?}");
        assert!(!rep.injective);
        let full = ArcSet::full();
        assert_eq!(check_prop301(&full, &full, &cfg(50)).unwrap().verdict, Verdict::Pass);
        let a: ArcSet = "0,1/100".parse().unwrap();
        // V ≈ U + 2a, so 2 ∈ N(U,V), but no orbit point up to 10 hits U.
        let b: ArcSet = "233/987,243/987".parse().unwrap();
        let rep = check_prop301(&a, &b, &cfg(10)).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive, "{rep:?}");
        let point: ArcSet = "[0,0]".parse().unwrap();
        assert_eq!(check_prop301(&point, &u, &cfg(10)), Err(RotationError::EmptyInterior));
    }

    #[test]
    fn recurrent_sip_examples() {
        let u: ArcSet = "-1/8,1/8".parse().unwrap();
        let c = cfg(10_000);
        let one = build_recurrent_sip(&u, 1, &c).unwrap();
        assert_eq!(one.generators, IntSet::from_i64s(&[5]));
        assert!(one.certificate);
        let two = build_recurrent_sip(&u, 2, &c).unwrap();
        assert!(two.certificate);
        assert_eq!(two.generators.len(), 2);
        let full = build_recurrent_sip(&ArcSet::full(), 3, &c).unwrap();
        assert_eq!(full.generators, IntSet::from_i64s(&[1, 2, 4]));
        let off: ArcSet = "1/10,1/5".parse().unwrap();
        assert!(matches!(build_recurrent_sip(&off, 1, &c), Err(RotationError::Precondition(_))));
    }

    #[test]
    fn chain_from_thirteen_extends() {
        let plus: ArcSet = "[0,1/8)".parse().unwrap();
        let rep = extension_chain(&plus, &IntSet::from_i64s(&[13]), 10, &cfg(100_000)).unwrap();
        // 13, 26, 39 map to 34/987, 68/987, 102/987, all below 1/8.
        assert_eq!(rep.steps[0].t, 26);
        assert_eq!(rep.s0, Angle::new(r("34/987")));
        assert!(rep.doubling_holds);
        assert!(rep.bound_holds);
        assert_eq!(rep.end, ChainEnd::NoExtension);
    }

    #[test]
    fn chain_precondition() {
        let plus: ArcSet = "[0,1/8)".parse().unwrap();
        // 8·a wraps to −55/987, outside U_+.
        assert!(matches!(
            extension_chain(&plus, &IntSet::from_i64s(&[8]), 5, &cfg(1000)),
            Err(RotationError::Precondition(_))
        ));
    }
}
