//! Finite difference sets, subset-sum closures and the windowed
//! Ramsey/Hindman style searches built on them.
//!
//! `D(A) = A − A`, `IP(A)` is the set of all subset sums (the empty sum is
//! 0) and `SIP(A) = D(IP(A))`. Everything here works on finite sets; search
//! answers are relative to the window they were asked about.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::expansion::{self, SignType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IpSetError {
    #[error("operation needs a nonempty set")]
    EmptyInput,
    #[error("{size} generators exceed the subset-sum cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("{pairs} difference pairs exceed the pair budget of {budget}")]
    PairBudgetExceeded { pairs: u128, budget: u128 },
    #[error("search budget of {budget} nodes exhausted after exploring {explored}")]
    BudgetExhausted { budget: u64, explored: u64 },
    #[error("domain error: {0}")]
    Domain(String),
}

/// Limits on closure sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureCap {
    /// Maximum number of generators for a subset-sum closure.
    pub max_generators: usize,
    /// Maximum number of ordered pairs examined by a difference set.
    pub max_pairs: u128,
}

impl Default for ClosureCap {
    fn default() -> Self {
        ClosureCap {
            max_generators: 22,
            max_pairs: 1 << 26,
        }
    }
}

/// Finite sorted set of integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntSet {
    elements: Vec<BigInt>,
}

impl IntSet {
    pub fn new() -> Self {
        IntSet::default()
    }

    fn from_sorted_dedup(elements: Vec<BigInt>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        IntSet { elements }
    }

    pub fn from_i64s(values: &[i64]) -> Self {
        values.iter().map(|&v| BigInt::from(v)).collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BigInt] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.elements.iter()
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn min(&self) -> Option<&BigInt> {
        self.elements.first()
    }

    pub fn max(&self) -> Option<&BigInt> {
        self.elements.last()
    }

    pub fn is_subset(&self, other: &IntSet) -> bool {
        self.elements.iter().all(|x| other.contains(x))
    }

    pub fn is_symmetric(&self) -> bool {
        self.elements.iter().all(|x| self.contains(&-x))
    }

    pub fn union(&self, other: &IntSet) -> IntSet {
        self.iter().chain(other.iter()).cloned().collect()
    }

    pub fn negate(&self) -> IntSet {
        IntSet::from_sorted_dedup(self.elements.iter().rev().map(|x| -x).collect())
    }

    pub fn translate(&self, by: &BigInt) -> IntSet {
        IntSet::from_sorted_dedup(self.elements.iter().map(|x| x + by).collect())
    }

    /// First element (in order) present in exactly one of the two sets.
    pub fn first_difference(&self, other: &IntSet) -> Option<BigInt> {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.elements, &other.elements);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => return Some(a[i].clone()),
                std::cmp::Ordering::Greater => return Some(b[j].clone()),
            }
        }
        a.get(i).or(b.get(j)).cloned()
    }

    /// Elements as `i64`, if they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.elements.iter().map(|x| x.to_i64()).collect()
    }
}

impl FromIterator<BigInt> for IntSet {
    fn from_iter<I: IntoIterator<Item = BigInt>>(iter: I) -> Self {
        let mut v: Vec<BigInt> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IntSet { elements: v }
    }
}

impl<'a> IntoIterator for &'a IntSet {
    type Item = &'a BigInt;
    type IntoIter = std::slice::Iter<'a, BigInt>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

// Big integers travel as decimal strings.
impl Serialize for IntSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.elements.iter().map(|x| x.to_string()).collect();
        strs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// `A ∪ −A`.
pub fn symmetrize(a: &IntSet) -> IntSet {
    a.union(&a.negate())
}

/// `A ∩ ℕ` with ℕ = {1, 2, ...}.
pub fn positive_part(a: &IntSet) -> IntSet {
    let start = a.elements.partition_point(|x| !x.is_positive());
    IntSet::from_sorted_dedup(a.elements[start..].to_vec())
}

pub fn difference_set(a: &IntSet) -> Result<IntSet, IpSetError> {
    difference_set_capped(a, &ClosureCap::default())
}

pub fn difference_set_capped(a: &IntSet, cap: &ClosureCap) -> Result<IntSet, IpSetError> {
    if a.is_empty() {
        return Err(IpSetError::EmptyInput);
    }
    let pairs = (a.len() as u128) * (a.len() as u128);
    if pairs > cap.max_pairs {
        return Err(IpSetError::PairBudgetExceeded {
            pairs,
            budget: cap.max_pairs,
        });
    }
    let mut out = Vec::with_capacity(pairs as usize);
    for x in a {
        for y in a {
            out.push(x - y);
        }
    }
    Ok(out.into_iter().collect())
}

pub fn ip_closure(a: &IntSet) -> Result<IntSet, IpSetError> {
    ip_closure_capped(a, &ClosureCap::default())
}

/// All subset sums, built one generator at a time.
pub fn ip_closure_capped(a: &IntSet, cap: &ClosureCap) -> Result<IntSet, IpSetError> {
    if a.len() > cap.max_generators {
        return Err(IpSetError::CapExceeded {
            size: a.len(),
            cap: cap.max_generators,
        });
    }
    let mut sums = vec![BigInt::zero()];
    for x in a {
        let shifted: Vec<BigInt> = sums.iter().map(|s| s + x).collect();
        sums = merge_sorted(sums, shifted);
    }
    Ok(IntSet::from_sorted_dedup(sums))
}

fn merge_sorted(a: Vec<BigInt>, b: Vec<BigInt>) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut a = a.into_iter().peekable();
    let mut b = b.into_iter().peekable();
    loop {
        let next = match (a.peek(), b.peek()) {
            (Some(x), Some(y)) => match x.cmp(y) {
                std::cmp::Ordering::Less => a.next(),
                std::cmp::Ordering::Greater => b.next(),
                std::cmp::Ordering::Equal => {
                    b.next();
                    a.next()
                }
            },
            (Some(_), None) => a.next(),
            (None, Some(_)) => b.next(),
            (None, None) => break,
        };
        out.extend(next);
    }
    out
}

pub fn sip_closure(a: &IntSet) -> Result<IntSet, IpSetError> {
    sip_closure_capped(a, &ClosureCap::default())
}

/// `IP(A) − IP(A)`.
pub fn sip_closure_capped(a: &IntSet, cap: &ClosureCap) -> Result<IntSet, IpSetError> {
    let ip = ip_closure_capped(a, cap)?;
    difference_set_capped(&ip, cap)
}

/// Outcome of comparing `SIP(B)` with `IP(B ∪ −B)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma11Report {
    pub holds: bool,
    pub sip: IntSet,
    pub ip_of_symmetrized: IntSet,
    pub first_difference: Option<String>,
}

pub fn verify_lemma11(b: &IntSet) -> Result<Lemma11Report, IpSetError> {
    verify_lemma11_capped(b, &ClosureCap::default())
}

pub fn verify_lemma11_capped(b: &IntSet, cap: &ClosureCap) -> Result<Lemma11Report, IpSetError> {
    if b.is_empty() {
        return Err(IpSetError::EmptyInput);
    }
    if let Some(x) = b.iter().find(|x| !x.is_positive()) {
        return Err(IpSetError::Domain(format!(
            "{x} is not a positive integer"
        )));
    }
    let sip = sip_closure_capped(b, cap)?;
    let ip_sym = ip_closure_capped(&symmetrize(b), &ClosureCap {
        max_generators: cap.max_generators * 2,
        ..*cap
    })?;
    let first = sip.first_difference(&ip_sym);
    Ok(Lemma11Report {
        holds: first.is_none(),
        sip,
        ip_of_symmetrized: ip_sym,
        first_difference: first.map(|x| x.to_string()),
    })
}

/// Total coloring of `[1..N]` by `colors` classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    classes: Vec<u32>,
    colors: u32,
}

impl Coloring {
    /// `classes[i]` is the color of `i + 1`.
    pub fn new(classes: Vec<u32>) -> Result<Self, IpSetError> {
        if classes.is_empty() {
            return Err(IpSetError::EmptyInput);
        }
        let colors = classes.iter().max().map_or(0, |m| m + 1);
        Ok(Coloring { classes, colors })
    }

    pub fn from_fn(domain_max: u64, f: impl Fn(u64) -> u32) -> Result<Self, IpSetError> {
        Coloring::new((1..=domain_max).map(f).collect())
    }

    pub fn domain_max(&self) -> u64 {
        self.classes.len() as u64
    }

    pub fn colors(&self) -> u32 {
        self.colors
    }

    /// Color of `t`, for `1 ≤ t ≤ N`.
    pub fn class_of(&self, t: u64) -> Option<u32> {
        if t == 0 {
            return None;
        }
        self.classes.get((t - 1) as usize).copied()
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }
}

/// Search result with the number of nodes explored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome<T> {
    pub found: Option<T>,
    pub explored: u64,
}

struct Counter {
    explored: u64,
    budget: u64,
}

impl Counter {
    fn tick(&mut self) -> Result<(), IpSetError> {
        self.explored += 1;
        if self.explored > self.budget {
            return Err(IpSetError::BudgetExhausted {
                budget: self.budget,
                explored: self.explored - 1,
            });
        }
        Ok(())
    }
}

fn to_intset(values: &[u64]) -> IntSet {
    values.iter().map(|&v| BigInt::from(v)).collect()
}

/// Lexicographically first `L ⊂ [1..N]` with `|L| = m` and `D(L)_+`
/// monochromatic.
pub fn search_mono_difference(
    c: &Coloring,
    m: usize,
    budget: u64,
) -> Result<SearchOutcome<IntSet>, IpSetError> {
    if m < 2 {
        return Err(IpSetError::Domain("cardinality must be at least 2".into()));
    }
    let n = c.domain_max();
    let mut counter = Counter { explored: 0, budget };
    let mut chosen = Vec::with_capacity(m);

    fn rec(
        c: &Coloring,
        n: u64,
        m: usize,
        chosen: &mut Vec<u64>,
        color: Option<u32>,
        counter: &mut Counter,
    ) -> Result<bool, IpSetError> {
        if chosen.len() == m {
            return Ok(true);
        }
        let start = chosen.last().map_or(1, |&x| x + 1);
        let remaining = (m - chosen.len()) as u64;
        for x in start..=n {
            if x + remaining - 1 > n {
                break;
            }
            counter.tick()?;
            let mut col = color;
            let ok = chosen.iter().all(|&y| {
                let k = c.class_of(x - y).expect("difference lies in window");
                match col {
                    None => {
                        col = Some(k);
                        true
                    }
                    Some(prev) => prev == k,
                }
            });
            if !ok {
                continue;
            }
            chosen.push(x);
            if rec(c, n, m, chosen, col, counter)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    let found = rec(c, n, m, &mut chosen, None, &mut counter)?;
    Ok(SearchOutcome {
        found: found.then(|| to_intset(&chosen)),
        explored: counter.explored,
    })
}

/// Lexicographically first `L` with `IP(L)_+ ⊂ [1..N]` monochromatic.
pub fn search_mono_ip(
    c: &Coloring,
    m: usize,
    budget: u64,
) -> Result<SearchOutcome<IntSet>, IpSetError> {
    if m < 2 {
        return Err(IpSetError::Domain("cardinality must be at least 2".into()));
    }
    let n = c.domain_max();
    let mut counter = Counter { explored: 0, budget };
    let mut chosen = Vec::with_capacity(m);
    let mut sums: Vec<u64> = vec![0];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        c: &Coloring,
        n: u64,
        m: usize,
        chosen: &mut Vec<u64>,
        sums: &mut Vec<u64>,
        color: Option<u32>,
        counter: &mut Counter,
    ) -> Result<bool, IpSetError> {
        if chosen.len() == m {
            return Ok(true);
        }
        let start = chosen.last().map_or(1, |&x| x + 1);
        let total: u64 = chosen.iter().sum();
        let remaining = (m - chosen.len()) as u64;
        for x in start..=n {
            // Smallest completion x, x+1, ..., x+remaining-1 must fit.
            let least_tail = remaining * x + remaining * (remaining - 1) / 2;
            if total + least_tail > n {
                break;
            }
            counter.tick()?;
            let col = color.or_else(|| c.class_of(x));
            let ok = sums
                .iter()
                .all(|&s| c.class_of(s + x) == col);
            if !ok {
                continue;
            }
            let before = sums.len();
            for i in 0..before {
                let v = sums[i] + x;
                sums.push(v);
            }
            chosen.push(x);
            if rec(c, n, m, chosen, sums, col, counter)? {
                return Ok(true);
            }
            chosen.pop();
            sums.truncate(before);
        }
        Ok(false)
    }

    let found = rec(c, n, m, &mut chosen, &mut sums, None, &mut counter)?;
    Ok(SearchOutcome {
        found: found.then(|| to_intset(&chosen)),
        explored: counter.explored,
    })
}

/// Restriction on the generator sets tried by [`search_translated_sip`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessShape {
    /// Any `m`-subset of `[1..window]`.
    Any,
    /// Blocks beyond `t0` and each other, all of one sign type.
    Beyond,
}

/// A translated SIP set found inside the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslatedSip {
    pub t0: String,
    pub generators: IntSet,
}

/// Smallest `t0 ∈ [0..window]`, then lexicographically first `A ⊂ [1..window]`
/// with `|A| = m` and `(t0 + SIP(A))_+ ⊂ S`.
pub fn search_translated_sip(
    s: &IntSet,
    m: usize,
    window: u64,
    shape: WitnessShape,
    budget: u64,
) -> Result<SearchOutcome<TranslatedSip>, IpSetError> {
    if m < 1 {
        return Err(IpSetError::Domain("cardinality must be at least 1".into()));
    }
    let target: BTreeSet<i128> = s
        .iter()
        .map(|x| {
            x.to_i128()
                .ok_or_else(|| IpSetError::Domain(format!("{x} does not fit the search window")))
        })
        .collect::<Result<_, _>>()?;
    let mut counter = Counter { explored: 0, budget };
    let t0_start = match shape {
        WitnessShape::Any => 0,
        WitnessShape::Beyond => 1,
    };
    for t0 in t0_start..=window {
        let t0 = t0 as i128;
        if t0 > 0 && !target.contains(&t0) {
            continue;
        }
        let mut search = TsipSearch {
            target: &target,
            m,
            window,
            shape,
            t0,
            chosen: Vec::with_capacity(m),
            sums: vec![0],
            block_type: None,
            counter: &mut counter,
        };
        if search.rec()? {
            let generators = to_intset(&search.chosen);
            return Ok(SearchOutcome {
                found: Some(TranslatedSip {
                    t0: t0.to_string(),
                    generators,
                }),
                explored: counter.explored,
            });
        }
    }
    Ok(SearchOutcome {
        found: None,
        explored: counter.explored,
    })
}

struct TsipSearch<'a> {
    target: &'a BTreeSet<i128>,
    m: usize,
    window: u64,
    shape: WitnessShape,
    t0: i128,
    chosen: Vec<u64>,
    /// `SIP(chosen)` as a multiset of signed sums.
    sums: Vec<i128>,
    block_type: Option<SignType>,
    counter: &'a mut Counter,
}

impl TsipSearch<'_> {
    fn rec(&mut self) -> Result<bool, IpSetError> {
        if self.chosen.len() == self.m {
            return Ok(true);
        }
        let (start, step) = self.candidates();
        let mut x = start;
        while x <= self.window {
            self.counter.tick()?;
            if self.admissible(x) {
                let ty = self.block_type;
                if self.shape == WitnessShape::Beyond {
                    self.block_type = Some(expansion::sign_type(&BigInt::from(x)));
                }
                let before = self.sums.len();
                for i in 0..before {
                    let s = self.sums[i];
                    self.sums.push(s + x as i128);
                    self.sums.push(s - x as i128);
                }
                self.chosen.push(x);
                if self.rec()? {
                    return Ok(true);
                }
                self.chosen.pop();
                self.sums.truncate(before);
                self.block_type = ty;
            }
            x += step;
        }
        Ok(false)
    }

    /// First candidate and stride. Under `Beyond` the next block must be a
    /// multiple of `3^(top index of the previous block)`.
    fn candidates(&self) -> (u64, u64) {
        let after = self.chosen.last().map_or(1, |&x| x + 1);
        match self.shape {
            WitnessShape::Any => (after, 1),
            WitnessShape::Beyond => {
                let prev = self
                    .chosen
                    .last()
                    .map_or(self.t0, |&x| x as i128);
                let top = expansion::reduced_expansion(&BigInt::from(prev))
                    .last_index()
                    .expect("t0 and blocks are nonzero");
                match 3u64.checked_pow(top) {
                    Some(step) => (after.div_ceil(step) * step, step),
                    None => (u64::MAX, 1),
                }
            }
        }
    }

    fn admissible(&self, x: u64) -> bool {
        if self.shape == WitnessShape::Beyond {
            let ty = expansion::sign_type(&BigInt::from(x));
            if self.block_type.is_some_and(|t| t != ty) {
                return false;
            }
        }
        let x = x as i128;
        self.sums.iter().all(|&s| {
            [self.t0 + s + x, self.t0 + s - x]
                .iter()
                .all(|&v| v <= 0 || self.target.contains(&v))
        })
    }
}

/// `SIP(A)` as the set of all `Σ ε_a a` with `ε_a ∈ {−1, 0, 1}`.
pub fn signed_sums(a: &IntSet) -> IntSet {
    let mut sums = vec![BigInt::zero()];
    for x in a {
        let mut next = Vec::with_capacity(sums.len() * 3);
        for s in &sums {
            next.push(s - x);
            next.push(s.clone());
            next.push(s + x);
        }
        sums = next;
    }
    sums.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> IntSet {
        IntSet::from_i64s(v)
    }

    #[test]
    fn symmetrize_and_positive_part() {
        assert_eq!(symmetrize(&set(&[1, 3])), set(&[-3, -1, 1, 3]));
        assert_eq!(symmetrize(&set(&[])), set(&[]));
        assert_eq!(symmetrize(&set(&[-2, 2])), set(&[-2, 2]));
        assert_eq!(positive_part(&set(&[-3, 0, 2, 5])), set(&[2, 5]));
        assert_eq!(positive_part(&set(&[-1])), set(&[]));
        assert_eq!(positive_part(&set(&[1, 2])), set(&[1, 2]));
    }

    #[test]
    fn difference_set_examples() {
        assert_eq!(
            difference_set(&set(&[1, 4, 9])).unwrap(),
            set(&[-8, -5, -3, 0, 3, 5, 8])
        );
        assert_eq!(difference_set(&set(&[7])).unwrap(), set(&[0]));
        assert_eq!(difference_set(&set(&[1, 2])).unwrap(), set(&[-1, 0, 1]));
        assert_eq!(difference_set(&set(&[])), Err(IpSetError::EmptyInput));
    }

    #[test]
    fn ip_closure_examples() {
        assert_eq!(
            ip_closure(&set(&[1, 3, 9])).unwrap(),
            set(&[0, 1, 3, 4, 9, 10, 12, 13])
        );
        assert_eq!(ip_closure(&set(&[])).unwrap(), set(&[0]));
        assert_eq!(ip_closure(&set(&[5])).unwrap(), set(&[0, 5]));
    }

    #[test]
    fn ip_closure_cap() {
        let a: IntSet = (1..=23).map(BigInt::from).collect();
        assert_eq!(
            ip_closure(&a),
            Err(IpSetError::CapExceeded { size: 23, cap: 22 })
        );
        let cap = ClosureCap { max_generators: 2, ..Default::default() };
        assert!(ip_closure_capped(&set(&[1, 2, 3]), &cap).is_err());
    }

    #[test]
    fn sip_closure_examples() {
        assert_eq!(
            sip_closure(&set(&[1, 3])).unwrap(),
            (-4..=4).map(BigInt::from).collect()
        );
        // Subset sums use each generator at most once, so 10 ∉ SIP({5}).
        assert_eq!(sip_closure(&set(&[5])).unwrap(), set(&[-5, 0, 5]));
        assert_eq!(sip_closure(&set(&[])).unwrap(), set(&[0]));
    }

    #[test]
    fn lemma11_examples() {
        for b in [&[1, 3][..], &[2], &[1, 2, 4]] {
            let r = verify_lemma11(&set(b)).unwrap();
            assert!(r.holds, "{b:?}");
            assert_eq!(r.sip, signed_sums(&set(b)));
        }
        assert_eq!(verify_lemma11(&set(&[2])).unwrap().sip, set(&[-2, 0, 2]));
        assert_eq!(verify_lemma11(&set(&[])), Err(IpSetError::EmptyInput));
        assert!(matches!(verify_lemma11(&set(&[0, 1])), Err(IpSetError::Domain(_))));
    }

    #[test]
    fn closure_identities_on_samples() {
        for a in [&[0, 1, 5][..], &[-3, 0, 2], &[0], &[0, 7, 8, 100]] {
            let a = set(a);
            let with_zero = a.clone();
            let without: IntSet = a.iter().filter(|x| !x.is_zero()).cloned().collect();
            assert_eq!(ip_closure(&with_zero).unwrap(), ip_closure(&without).unwrap());
        }
        for a in [&[1, 4][..], &[-3, 2, 9], &[5]] {
            let a = set(a);
            let lhs = difference_set(&a).unwrap().union(&symmetrize(&a));
            let rhs = difference_set(&a.union(&set(&[0]))).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn mono_difference_examples() {
        let parity = Coloring::from_fn(20, |t| (t % 2) as u32).unwrap();
        let r = search_mono_difference(&parity, 3, u64::MAX).unwrap();
        assert_eq!(r.found, Some(set(&[1, 3, 5])));
        let constant = Coloring::from_fn(5, |_| 0).unwrap();
        let r = search_mono_difference(&constant, 2, u64::MAX).unwrap();
        assert_eq!(r.found, Some(set(&[1, 2])));
        let small = Coloring::from_fn(4, |t| (t % 2) as u32).unwrap();
        assert_eq!(search_mono_difference(&small, 4, u64::MAX).unwrap().found, None);
    }

    #[test]
    fn mono_ip_examples() {
        let parity = Coloring::from_fn(20, |t| (t % 2) as u32).unwrap();
        let r = search_mono_ip(&parity, 2, u64::MAX).unwrap();
        assert_eq!(r.found, Some(set(&[2, 4])));
        let constant = Coloring::from_fn(10, |_| 0).unwrap();
        assert_eq!(
            search_mono_ip(&constant, 2, u64::MAX).unwrap().found,
            Some(set(&[1, 2]))
        );
    }

    #[test]
    fn search_budget_reports_progress() {
        let parity = Coloring::from_fn(20, |t| (t % 2) as u32).unwrap();
        let err = search_mono_difference(&parity, 3, 2).unwrap_err();
        assert_eq!(err, IpSetError::BudgetExhausted { budget: 2, explored: 2 });
    }

    #[test]
    fn translated_sip_examples() {
        let threes: IntSet = (1..=20).map(|k| BigInt::from(3 * k)).collect();
        let r = search_translated_sip(&threes, 2, 60, WitnessShape::Any, u64::MAX).unwrap();
        let found = r.found.unwrap();
        assert_eq!(found.t0, "0");
        assert_eq!(found.generators, set(&[3, 6]));

        let all: IntSet = (1..=30).map(BigInt::from).collect();
        let found = search_translated_sip(&all, 2, 30, WitnessShape::Any, u64::MAX)
            .unwrap()
            .found
            .unwrap();
        assert_eq!((found.t0.as_str(), found.generators), ("0", set(&[1, 2])));
    }

    #[test]
    fn translated_sip_revalidates() {
        let target: IntSet = (1..=200).filter(|t| t % 7 != 3).map(BigInt::from).collect();
        let found = search_translated_sip(&target, 2, 60, WitnessShape::Any, u64::MAX)
            .unwrap()
            .found
            .unwrap();
        let t0: BigInt = found.t0.parse().unwrap();
        let sip = sip_closure(&found.generators).unwrap();
        assert!(positive_part(&sip.translate(&t0)).is_subset(&target));
    }

    #[test]
    fn serde_uses_decimal_strings() {
        let s = set(&[-2, 10]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"["-2","10"]"#);
        assert_eq!(serde_json::from_str::<IntSet>(&json).unwrap(), s);
    }
}
