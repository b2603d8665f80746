//! Strictly increasing positive sequences ("+functions"), refinement by
//! subset sums, and the construction of beyond-ascending SIP witnesses and
//! their sign-change residue cycles.
//!
//! A +function is infinite; here it is a stored prefix plus an optional
//! producer that extends it on demand. Every operation takes an explicit
//! budget and fails with [`RefineError::Exhausted`] instead of truncating.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expansion::{self, pow3, reduced_expansion, Sign, SignType};
use crate::ipsets::{self, ClosureCap, IntSet, IpSetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("producer exhausted: needed {needed}, found {available}")]
    Exhausted { needed: usize, available: usize },
    #[error("sequence is not a +function at position {position}: {reason}")]
    NotIncreasing { position: usize, reason: String },
    #[error("witness needs at least {needed} blocks, has {have}")]
    TooFewBlocks { needed: usize, have: usize },
    #[error("modulus must be odd and at least 3, got {0}")]
    InvalidModulus(u32),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error(transparent)]
    Closure(#[from] IpSetError),
}

/// Prefix of a +function, extendable from a producer.
pub struct PlusFn {
    values: Vec<BigInt>,
    source: Option<Box<dyn Iterator<Item = BigInt>>>,
}

impl fmt::Debug for PlusFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlusFn")
            .field("values", &self.values)
            .field("open", &self.source.is_some())
            .finish()
    }
}

impl PlusFn {
    /// A finite prefix with no producer behind it.
    pub fn from_values(values: Vec<BigInt>) -> Result<Self, RefineError> {
        for (i, v) in values.iter().enumerate() {
            check_next(i, i.checked_sub(1).map(|p| &values[p]), v)?;
        }
        Ok(PlusFn { values, source: None })
    }

    pub fn from_i64s(values: &[i64]) -> Result<Self, RefineError> {
        PlusFn::from_values(values.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn from_source(source: impl Iterator<Item = BigInt> + 'static) -> Self {
        PlusFn {
            values: Vec::new(),
            source: Some(Box::new(source)),
        }
    }

    pub fn from_producer(producer: &Producer) -> Self {
        producer.build()
    }

    pub fn prefix(&self) -> &[BigInt] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Extends the stored prefix to `len` values if the producer allows.
    /// Returns the stored length afterwards.
    pub fn pull(&mut self, len: usize) -> Result<usize, RefineError> {
        while self.values.len() < len {
            let Some(source) = self.source.as_mut() else { break };
            match source.next() {
                Some(v) => {
                    check_next(self.values.len(), self.values.last(), &v)?;
                    self.values.push(v);
                }
                None => self.source = None,
            }
        }
        Ok(self.values.len())
    }

    pub fn get(&mut self, index: usize) -> Result<&BigInt, RefineError> {
        if self.pull(index + 1)? <= index {
            return Err(RefineError::Exhausted {
                needed: index + 1,
                available: self.values.len(),
            });
        }
        Ok(&self.values[index])
    }
}

fn check_next(position: usize, prev: Option<&BigInt>, next: &BigInt) -> Result<(), RefineError> {
    if !next.is_positive() {
        return Err(RefineError::NotIncreasing {
            position,
            reason: format!("{next} is not positive"),
        });
    }
    if let Some(p) = prev {
        if next <= p {
            return Err(RefineError::NotIncreasing {
                position,
                reason: format!("{next} does not exceed {p}"),
            });
        }
    }
    Ok(())
}

/// Named producers for +functions, shared by the CLI and the test suites.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Producer {
    /// `3^first, 3^(first+1), ...`
    Powers3 { first: u32 },
    /// `start, start + step, ...`
    Arithmetic { start: u64, step: u64 },
    /// Fixed finite list.
    List(Vec<i64>),
    /// Seeded random `m·3^a` with `m` of the given sign type and each term
    /// beyond the previous one.
    Spaced { seed: u64, sign_type: SignType },
}

impl Producer {
    pub fn build(&self) -> PlusFn {
        match self {
            Producer::Powers3 { first } => {
                PlusFn::from_source((*first..).map(pow3))
            }
            Producer::Arithmetic { start, step } => {
                let (start, step) = (BigInt::from(*start), BigInt::from(*step));
                PlusFn::from_source((0u64..).map(move |n| &start + &step * n))
            }
            Producer::List(values) => PlusFn::from_source(
                values.clone().into_iter().map(BigInt::from),
            ),
            Producer::Spaced { seed, sign_type } => {
                PlusFn::from_source(SpacedProducer::new(*seed, *sign_type))
            }
        }
    }
}

struct SpacedProducer {
    rng: ChaCha8Rng,
    sign_type: SignType,
    next_exponent: u32,
    multipliers: Vec<u64>,
}

impl SpacedProducer {
    fn new(seed: u64, sign_type: SignType) -> Self {
        let multipliers = (1..=121u64)
            .filter(|m| m % 3 != 0)
            .filter(|&m| expansion::sign_type(&BigInt::from(m)) == sign_type)
            .collect();
        SpacedProducer {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sign_type,
            next_exponent: 0,
            multipliers,
        }
    }
}

impl Iterator for SpacedProducer {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let m = self.multipliers[self.rng.gen_range(0..self.multipliers.len())];
        let exponent = self.next_exponent + self.rng.gen_range(0..2);
        let value = BigInt::from(m) * pow3(exponent);
        let top = reduced_expansion(&value).last_index().expect("nonzero");
        debug_assert_eq!(expansion::sign_type(&value), self.sign_type);
        self.next_exponent = top;
        Some(value)
    }
}

/// `IP(k2) ⊂ IP(k1)`, checked on the stored prefixes.
pub fn is_refinement(k2: &[BigInt], k1: &[BigInt]) -> Result<bool, RefineError> {
    is_refinement_capped(k2, k1, &ClosureCap::default())
}

pub fn is_refinement_capped(
    k2: &[BigInt],
    k1: &[BigInt],
    cap: &ClosureCap,
) -> Result<bool, RefineError> {
    let s1: IntSet = k1.iter().cloned().collect();
    let s2: IntSet = k2.iter().cloned().collect();
    if s2.is_subset(&s1) {
        return Ok(true);
    }
    let ip1 = ipsets::ip_closure_capped(&s1, cap)?;
    let ip2 = ipsets::ip_closure_capped(&s2, cap)?;
    Ok(ip2.is_subset(&ip1))
}

/// Which half of the refinement lemma produced a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LemmaCase {
    /// Subsequence of terms whose lowest index exceeds the level.
    Direct,
    /// Consecutive triple sums of terms with lowest index equal to the
    /// level and lowest digit `delta`.
    TripleSums { delta: Sign },
}

/// A value together with the source positions it is the sum of.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Tracked {
    value: BigInt,
    parts: Vec<usize>,
}

/// One refinement step at `level`: every input has lowest index `≥ level`,
/// every output has lowest index `> level` (i.e. is `≡ 0 mod 3^level`).
fn lemma_step(
    items: &[Tracked],
    level: u32,
    want: usize,
) -> Result<(LemmaCase, Vec<Tracked>), RefineError> {
    let mut direct = Vec::new();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let r = reduced_expansion(&item.value);
        let (j1, sign) = r.terms()[0];
        if j1 < level {
            return Err(RefineError::Domain(format!(
                "term {i} ({}) has lowest index {j1} below level {level}",
                item.value
            )));
        }
        if j1 > level {
            direct.push(item.clone());
        } else if sign == Sign::Plus {
            plus.push(item);
        } else {
            minus.push(item);
        }
    }
    if direct.len() >= want {
        return Ok((LemmaCase::Direct, direct));
    }
    for (delta, bucket) in [(Sign::Plus, &plus), (Sign::Minus, &minus)] {
        if bucket.len() / 3 >= want {
            let sums = bucket
                .chunks_exact(3)
                .map(|c| Tracked {
                    value: &c[0].value + &c[1].value + &c[2].value,
                    parts: c.iter().flat_map(|t| t.parts.iter().copied()).collect(),
                })
                .collect();
            return Ok((LemmaCase::TripleSums { delta }, sums));
        }
    }
    Err(RefineError::Exhausted {
        needed: want,
        available: direct.len().max(plus.len() / 3).max(minus.len() / 3),
    })
}

/// Result of [`refine_beyond`].
#[derive(Debug)]
pub struct Refined {
    pub values: PlusFn,
    pub case: LemmaCase,
    /// Number of input terms examined.
    pub consumed: usize,
}

/// Refines `k` so that every produced term is `≡ 0 mod 3^level`, assuming
/// every examined term of `k` already has lowest index `≥ level`.
/// At most `budget` terms of `k` are examined.
pub fn refine_beyond(
    k: &mut PlusFn,
    level: u32,
    request: usize,
    budget: usize,
) -> Result<Refined, RefineError> {
    if level == 0 {
        return Err(RefineError::Domain("level must be positive".into()));
    }
    if request == 0 {
        return Err(RefineError::Domain("request must be positive".into()));
    }
    let available = k.pull(budget)?.min(budget);
    let items: Vec<Tracked> = k.prefix()[..available]
        .iter()
        .enumerate()
        .map(|(i, v)| Tracked {
            value: v.clone(),
            parts: vec![i],
        })
        .collect();
    let (case, mut out) = lemma_step(&items, level, request)?;
    out.truncate(request);
    Ok(Refined {
        values: PlusFn::from_values(out.into_iter().map(|t| t.value).collect())?,
        case,
        consumed: available,
    })
}

/// Finite prefix of a beyond-ascending, type-homogeneous block sequence
/// together with its base point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SipWitness {
    #[serde(with = "crate::bigstr")]
    t0: BigInt,
    #[serde(with = "crate::bigstr::vec")]
    blocks: Vec<BigInt>,
    block_type: SignType,
}

impl SipWitness {
    /// Validates: `t0 > 0`, first block beyond `t0`, each block beyond the
    /// previous one, all blocks positive and of one sign type.
    pub fn new(t0: BigInt, blocks: Vec<BigInt>) -> Result<Self, RefineError> {
        if !t0.is_positive() {
            return Err(RefineError::Domain(format!("t0 = {t0} is not positive")));
        }
        let Some(first) = blocks.first() else {
            return Err(RefineError::TooFewBlocks { needed: 1, have: 0 });
        };
        let block_type = expansion::sign_type(first);
        let mut prev = &t0;
        for (i, b) in blocks.iter().enumerate() {
            if !b.is_positive() {
                return Err(RefineError::Domain(format!("block {i} = {b} is not positive")));
            }
            if !expansion::is_beyond(b, prev).expect("nonzero operands") {
                return Err(RefineError::Domain(format!("block {i} = {b} is not beyond {prev}")));
            }
            if expansion::sign_type(b) != block_type {
                return Err(RefineError::Domain(format!(
                    "block {i} = {b} is not of {block_type} type"
                )));
            }
            prev = b;
        }
        Ok(SipWitness { t0, blocks, block_type })
    }

    pub fn t0(&self) -> &BigInt {
        &self.t0
    }

    pub fn blocks(&self) -> &[BigInt] {
        &self.blocks
    }

    pub fn block_type(&self) -> SignType {
        self.block_type
    }

    /// `(t0 + SIP(first n blocks))_+`.
    pub fn translated_sip(&self, n: usize, cap: &ClosureCap) -> Result<IntSet, RefineError> {
        let gens: IntSet = self.blocks[..n.min(self.blocks.len())].iter().cloned().collect();
        let sip = ipsets::sip_closure_capped(&gens, cap)?;
        Ok(ipsets::positive_part(&sip.translate(&self.t0)))
    }
}

/// Tuning for [`build_sip_witness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessOptions {
    /// Maximum number of producer terms consumed.
    pub budget: usize,
    /// Lower bound for the first refinement level; raising it pushes every
    /// positive element of `SIP(blocks)` above `3^(min_first_index)`.
    pub min_first_index: Option<u32>,
    /// Number of leading blocks certified by brute-force closure.
    pub certify_blocks: usize,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            budget: 1 << 16,
            min_first_index: None,
            certify_blocks: 8,
        }
    }
}

/// Output of [`build_sip_witness`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessBuild {
    pub witness: SipWitness,
    /// Number of leading producer terms summed into `t0`.
    pub n0: usize,
    /// First block of each refinement round, in order.
    #[serde(with = "crate::bigstr::vec")]
    pub round_heads: Vec<BigInt>,
    /// Producer positions (0-based) summed into each selected block.
    pub provenance: Vec<Vec<usize>>,
    pub consumed: usize,
    pub certified_blocks: usize,
}

/// Builds `t0 = u + k0(1) + ... + k0(N0) > 0` (minimal `N0`) and blocks
/// `k(1) ≻ t0`, `k(n+1) ≻ k(n)`, all of one sign type, with every
/// `t0 + Σ ε_n k(n)` a member of `u + SIP(k0)`.
pub fn build_sip_witness(
    u: &BigInt,
    k0: &mut PlusFn,
    depth: usize,
    opts: &WitnessOptions,
) -> Result<WitnessBuild, RefineError> {
    if depth == 0 {
        return Err(RefineError::Domain("depth must be positive".into()));
    }
    let mut window = opts.budget.clamp(1, 64);
    loop {
        let available = k0.pull(window)?.min(window);
        match witness_attempt(u, &k0.prefix()[..available], depth, opts) {
            Err(RefineError::Exhausted { .. })
                if available == window && window < opts.budget =>
            {
                window = (window * 2).min(opts.budget);
            }
            other => return other,
        }
    }
}

fn witness_attempt(
    u: &BigInt,
    k0: &[BigInt],
    depth: usize,
    opts: &WitnessOptions,
) -> Result<WitnessBuild, RefineError> {
    let mut t0 = u.clone();
    let mut n0 = 0;
    while !t0.is_positive() {
        let Some(v) = k0.get(n0) else {
            return Err(RefineError::Exhausted {
                needed: n0 + 1,
                available: k0.len(),
            });
        };
        t0 += v;
        n0 += 1;
    }

    let mut current: Vec<Tracked> = k0[n0..]
        .iter()
        .enumerate()
        .map(|(i, v)| Tracked {
            value: v.clone(),
            parts: vec![n0 + i],
        })
        .collect();

    let max_rounds = 2 * depth - 1;
    let top_t0 = reduced_expansion(&t0).last_index().expect("t0 > 0");
    let mut next_level = (top_t0 + 1).max(opts.min_first_index.unwrap_or(0));
    let mut heads: Vec<Tracked> = Vec::new();
    let mut counts = [0usize; 2];
    let winner = loop {
        let round = heads.len();
        let want = max_rounds - round;
        // Every term of the next sequence must be beyond 3^next_level.
        let target = next_level + 2;
        loop {
            let Some(level) = current.iter().map(|t| lowest(&t.value)).min() else {
                return Err(RefineError::Exhausted { needed: want, available: 0 });
            };
            if level >= target {
                break;
            }
            current = lemma_step(&current, level, want)?.1;
        }
        let head = current.remove(0);
        let ty = expansion::sign_type(&head.value);
        let slot = type_slot(ty);
        counts[slot] += 1;
        next_level = reduced_expansion(&head.value).last_index().expect("positive") + 1;
        heads.push(head);
        if counts[slot] == depth {
            break ty;
        }
    };

    let selected: Vec<&Tracked> = heads
        .iter()
        .filter(|h| expansion::sign_type(&h.value) == winner)
        .collect();
    let witness = SipWitness::new(
        t0.clone(),
        selected.iter().map(|h| h.value.clone()).collect(),
    )
    .map_err(|e| RefineError::Certification(e.to_string()))?;
    let provenance: Vec<Vec<usize>> = selected.iter().map(|h| h.parts.clone()).collect();
    let certified = certify(&witness, k0, n0, &provenance, opts.certify_blocks)?;
    let consumed = heads
        .iter()
        .flat_map(|h| h.parts.iter())
        .max()
        .map_or(n0, |&m| m + 1);
    Ok(WitnessBuild {
        witness,
        n0,
        round_heads: heads.into_iter().map(|h| h.value).collect(),
        provenance,
        consumed,
        certified_blocks: certified,
    })
}

fn lowest(v: &BigInt) -> u32 {
    expansion::lowest_index(v)
}

fn type_slot(t: SignType) -> usize {
    match t {
        SignType::Positive => 0,
        SignType::Negative => 1,
    }
}

fn certify(
    w: &SipWitness,
    k0: &[BigInt],
    n0: usize,
    provenance: &[Vec<usize>],
    certify_blocks: usize,
) -> Result<usize, RefineError> {
    let fail = |msg: String| Err(RefineError::Certification(msg));
    // Blocks are sums of pairwise disjoint producer terms past N0.
    let mut seen = std::collections::BTreeSet::new();
    for (b, parts) in w.blocks.iter().zip(provenance) {
        let sum: BigInt = parts.iter().map(|&i| &k0[i]).sum();
        if &sum != b {
            return fail(format!("block {b} does not equal the sum of its parts"));
        }
        for &i in parts {
            if i < n0 || !seen.insert(i) {
                return fail(format!("producer term {i} is reused"));
            }
        }
    }
    // (t0 + SIP(F))_+ = t0 + SIP(F)_+ on the leading blocks.
    let n = certify_blocks.min(w.blocks.len());
    let gens: IntSet = w.blocks[..n].iter().cloned().collect();
    let sip = ipsets::sip_closure(&gens)?;
    let lhs = ipsets::positive_part(&sip.translate(&w.t0));
    let rhs = ipsets::positive_part(&sip).translate(&w.t0);
    let lhs_plus_t0: IntSet = lhs.iter().filter(|x| **x != w.t0).cloned().collect();
    if lhs_plus_t0 != rhs {
        return fail(format!(
            "translated positive part differs at {:?}",
            lhs_plus_t0.first_difference(&rhs)
        ));
    }
    Ok(n)
}

/// Sums `s_0, ..., s_{K-1}` obtained by flipping blocks `2, 4, ..., 2i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueCycle {
    pub modulus: u32,
    #[serde(with = "crate::bigstr::vec")]
    pub sums: Vec<BigInt>,
    pub z: Vec<u64>,
    pub residues: Vec<u32>,
    /// `z(s_i) − z(s_{i-1})` for `i = 1..K-1`.
    pub z_steps: Vec<i64>,
    /// Expected step: `+2` for positive-type blocks, `−2` for negative.
    pub expected_step: i64,
    pub surjective: bool,
}

impl ResidueCycle {
    pub fn steps_consistent(&self) -> bool {
        self.z_steps.iter().all(|&d| d == self.expected_step)
    }
}

pub fn build_residue_cycle(w: &SipWitness, modulus: u32) -> Result<ResidueCycle, RefineError> {
    if modulus < 3 || modulus.is_multiple_of(2) {
        return Err(RefineError::InvalidModulus(modulus));
    }
    let k = modulus as usize;
    let needed = 2 * k + 1;
    if w.blocks.len() < needed {
        return Err(RefineError::TooFewBlocks {
            needed,
            have: w.blocks.len(),
        });
    }
    let blocks = &w.blocks[..needed];
    let mut sums = Vec::with_capacity(k);
    let mut current: BigInt = &w.t0 + blocks.iter().sum::<BigInt>();
    sums.push(current.clone());
    for i in 1..k {
        // Flip k(2i) (1-based).
        current -= &blocks[2 * i - 1] * BigInt::from(2);
        sums.push(current.clone());
    }
    let z: Vec<u64> = sums
        .iter()
        .map(|s| expansion::z_count(s).map_err(|e| RefineError::Certification(e.to_string())))
        .collect::<Result<_, _>>()?;
    let residues: Vec<u32> = z.iter().map(|&v| (v % modulus as u64) as u32).collect();
    let z_steps = z.windows(2).map(|p| p[1] as i64 - p[0] as i64).collect();
    let mut hit = vec![false; k];
    for &r in &residues {
        hit[r as usize] = true;
    }
    let expected_step = match w.block_type {
        SignType::Positive => 2,
        SignType::Negative => -2,
    };
    Ok(ResidueCycle {
        modulus,
        sums,
        z,
        residues,
        z_steps,
        expected_step,
        surjective: hit.iter().all(|&h| h),
    })
}

/// `t0 = 1` with blocks `3^1, ..., 3^count`.
pub fn powers_of_three_witness(t0: u64, count: u32) -> Result<SipWitness, RefineError> {
    let t0 = BigInt::from(t0);
    let first = reduced_expansion(&t0)
        .last_index()
        .ok_or_else(|| RefineError::Domain("t0 must be positive".into()))?;
    SipWitness::new(t0, (first..first + count).map(pow3).collect())
}

/// Checks `value − t0 ∈ SIP(blocks)` by solving for the signed digits of a
/// beyond-ascending block sequence greedily from the top block down.
pub fn in_translated_sip(w: &SipWitness, value: &BigInt) -> bool {
    let mut rest = value - &w.t0;
    for b in w.blocks.iter().rev() {
        let j1 = expansion::lowest_index(b);
        let scale = pow3(j1 - 1);
        // Signed multiple of this block needed to clear everything above j1.
        let bound = &scale / BigInt::from(2) + BigInt::one();
        if rest.abs() < bound {
            continue;
        }
        if (&rest - b).abs() < (&rest + b).abs() {
            rest -= b;
        } else {
            rest += b;
        }
    }
    rest.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| big(x)).collect()
    }

    #[test]
    fn plus_fn_rejects_non_increasing() {
        assert!(PlusFn::from_i64s(&[1, 2, 2]).is_err());
        assert!(PlusFn::from_i64s(&[0, 2]).is_err());
        let mut k = PlusFn::from_source(vec![big(3), big(1)].into_iter());
        assert!(matches!(k.pull(2), Err(RefineError::NotIncreasing { position: 1, .. })));
    }

    #[test]
    fn refinement_examples() {
        assert!(is_refinement(&ints(&[3, 6]), &ints(&[1, 2, 3, 6])).unwrap());
        assert!(is_refinement(&ints(&[12, 39]), &ints(&[1, 4, 7, 10, 13, 16])).unwrap());
        assert!(!is_refinement(&ints(&[5]), &ints(&[1, 3])).unwrap());
    }

    #[test]
    fn refine_beyond_direct_case() {
        let mut k = PlusFn::from_source((1..=30).map(BigInt::from));
        let r = refine_beyond(&mut k, 1, 5, 30).unwrap();
        assert_eq!(r.case, LemmaCase::Direct);
        assert_eq!(r.values.prefix(), ints(&[3, 6, 9, 12, 15]).as_slice());

        let mut k = Producer::Arithmetic { start: 9, step: 9 }.build();
        let r = refine_beyond(&mut k, 2, 2, 20).unwrap();
        assert_eq!(r.case, LemmaCase::Direct);
        assert_eq!(r.values.prefix(), ints(&[9, 18]).as_slice());
    }

    #[test]
    fn refine_beyond_triple_sums() {
        let mut k = Producer::Arithmetic { start: 1, step: 3 }.build();
        let r = refine_beyond(&mut k, 1, 3, 30).unwrap();
        assert_eq!(r.case, LemmaCase::TripleSums { delta: Sign::Plus });
        assert_eq!(r.values.prefix(), ints(&[12, 39, 66]).as_slice());
        assert!(is_refinement(r.values.prefix(), &k.prefix()[..9]).unwrap());
    }

    #[test]
    fn refine_beyond_errors() {
        // 4 has lowest index 1, below level 2.
        let mut k = PlusFn::from_i64s(&[3, 4, 9]).unwrap();
        assert!(matches!(refine_beyond(&mut k, 2, 1, 10), Err(RefineError::Domain(_))));
        let mut k = PlusFn::from_i64s(&[1, 4]).unwrap();
        assert!(matches!(
            refine_beyond(&mut k, 1, 1, 10),
            Err(RefineError::Exhausted { .. })
        ));
    }

    #[test]
    fn witness_from_powers_of_three() {
        let mut k0 = Producer::Powers3 { first: 1 }.build();
        let b = build_sip_witness(&big(0), &mut k0, 7, &WitnessOptions::default()).unwrap();
        assert_eq!(b.witness.t0(), &big(3));
        assert_eq!(b.n0, 1);
        assert_eq!(b.witness.block_type(), SignType::Positive);
        assert_eq!(b.witness.blocks().len(), 7);
        for blk in b.witness.blocks() {
            assert_eq!(reduced_expansion(blk).len(), 1, "{blk} is a power of 3");
        }
    }

    #[test]
    fn witness_with_negative_offset() {
        let mut k0 = Producer::Powers3 { first: 1 }.build();
        let b = build_sip_witness(&big(-5), &mut k0, 2, &WitnessOptions::default()).unwrap();
        assert_eq!(b.witness.t0(), &big(7));
        assert_eq!(b.n0, 2);
        assert!(expansion::lowest_index(&b.witness.blocks()[0]) >= 4);
    }

    #[test]
    fn witness_exhaustion() {
        let mut k0 = PlusFn::from_i64s(&[3, 9, 27]).unwrap();
        let err = build_sip_witness(&big(0), &mut k0, 7, &WitnessOptions::default());
        assert!(matches!(err, Err(RefineError::Exhausted { .. })));
    }

    #[test]
    fn witness_through_triple_sums() {
        let mut k0 = Producer::Arithmetic { start: 1, step: 3 }.build();
        let opts = WitnessOptions { budget: 1 << 14, ..Default::default() };
        let b = build_sip_witness(&big(0), &mut k0, 1, &opts).unwrap();
        assert!(b.provenance.iter().all(|p| p.len() > 1));
        assert!(expansion::lowest_index(&b.witness.blocks()[0]) >= 4);
    }

    #[test]
    fn residue_cycle_powers_of_three() {
        let w = powers_of_three_witness(1, 7).unwrap();
        let c = build_residue_cycle(&w, 3).unwrap();
        assert_eq!(c.sums, ints(&[3280, 3262, 3100]));
        assert_eq!(c.z, vec![0, 2, 4]);
        assert_eq!(c.residues, vec![0, 2, 1]);
        assert!(c.steps_consistent());
        assert!(c.surjective);
    }

    #[test]
    fn residue_cycle_negative_type() {
        // 2·3^m = −3^m + 3^(m+1): lowest digit negative.
        let blocks: Vec<BigInt> = (0..7).map(|i| big(2) * pow3(1 + 2 * i)).collect();
        let w = SipWitness::new(big(1), blocks).unwrap();
        assert_eq!(w.block_type(), SignType::Negative);
        let c = build_residue_cycle(&w, 3).unwrap();
        assert_eq!(c.expected_step, -2);
        assert!(c.steps_consistent(), "{:?}", c.z_steps);
        assert!(c.surjective);
    }

    #[test]
    fn residue_cycle_errors() {
        let w = powers_of_three_witness(1, 7).unwrap();
        assert_eq!(build_residue_cycle(&w, 4), Err(RefineError::InvalidModulus(4)));
        assert_eq!(
            build_residue_cycle(&w, 5),
            Err(RefineError::TooFewBlocks { needed: 11, have: 7 })
        );
    }

    #[test]
    fn witness_validation() {
        assert!(SipWitness::new(big(1), ints(&[3, 9])).is_ok());
        // 4 = 1 + 3 overlaps the index of t0 = 1.
        assert!(SipWitness::new(big(1), ints(&[4])).is_err());
        // 9 is positive type, 54 = 2·27 negative type.
        assert!(SipWitness::new(big(1), ints(&[9, 54])).is_err());
        assert!(SipWitness::new(big(0), ints(&[9])).is_err());
    }

    #[test]
    fn translated_sip_membership_matches_closure() {
        let w = SipWitness::new(big(2), ints(&[9, 27 * 4, 2187])).unwrap();
        let cap = ClosureCap::default();
        let set = w.translated_sip(3, &cap).unwrap();
        for v in 1..=3000 {
            let v = big(v);
            assert_eq!(set.contains(&v), in_translated_sip(&w, &v), "{v}");
        }
    }
}
