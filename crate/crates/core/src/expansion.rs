//! Balanced base-b expansions of integers.
//!
//! Every integer `t` has exactly one expansion `t = Σ ε_n b^(n-1)` with
//! `|ε_n| ≤ (b-1)/2` and finitely many nonzero digits. For `b = 3` the
//! nonzero digits are `±1` and the list of their positions is the
//! *reduced expansion*, which drives the sign type, the beyond relation and
//! the sign-change count `z`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpansionError {
    #[error("base must be odd and at least 3, got {0}")]
    InvalidBase(u32),
    #[error("modulus must be odd and at least 3, got {0}")]
    InvalidModulus(u32),
    #[error("the beyond relation is undefined for 0")]
    UndefinedRelation,
    #[error("sign-change count is defined on positive integers only, got {0}")]
    NonPositive(BigInt),
}

/// A digit sign in a reduced balanced-ternary expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Minus => "-",
            Sign::Plus => "+",
        })
    }
}

/// Positive type: first and last nonzero digits agree (0 counts as positive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignType {
    Positive,
    Negative,
}

impl fmt::Display for SignType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignType::Positive => "Positive",
            SignType::Negative => "Negative",
        })
    }
}

/// Dense digit vector of a balanced base-b expansion; `digits[0]` is the
/// coefficient of `b^0`. Trailing zeros are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedDigits {
    base: u32,
    digits: Vec<i32>,
}

impl BalancedDigits {
    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[i32] {
        &self.digits
    }

    /// Σ ε_n b^(n-1).
    pub fn value(&self) -> BigInt {
        let b = BigInt::from(self.base);
        self.digits
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, &d| acc * &b + BigInt::from(d))
    }
}

fn check_odd(b: u32) -> bool {
    b >= 3 && b % 2 == 1
}

/// Repeated centered Euclidean step `t = ε + b·s` with `|ε| ≤ (b-1)/2`.
pub fn expand_balanced(t: &BigInt, base: u32) -> Result<BalancedDigits, ExpansionError> {
    if !check_odd(base) {
        return Err(ExpansionError::InvalidBase(base));
    }
    let b = BigInt::from(base);
    let half = (base / 2) as i32;
    let mut digits = Vec::new();
    let mut rest = t.clone();
    while !rest.is_zero() {
        let r = rest.mod_floor(&b).to_i32().expect("residue below base");
        let eps = if r > half { r - base as i32 } else { r };
        rest = (rest - eps) / &b;
        digits.push(eps);
    }
    Ok(BalancedDigits { base, digits })
}

/// Sparse balanced-ternary expansion: strictly increasing 1-based indices
/// with a sign each. `t = Σ sign_i · 3^(index_i - 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedExpansion {
    terms: Vec<(u32, Sign)>,
}

impl ReducedExpansion {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(u32, Sign)] {
        &self.terms
    }

    pub fn indices(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms.iter().map(|&(j, _)| j)
    }

    pub fn signs(&self) -> impl Iterator<Item = Sign> + '_ {
        self.terms.iter().map(|&(_, s)| s)
    }

    /// `j_1(t)`, the lowest index.
    pub fn first_index(&self) -> Option<u32> {
        self.terms.first().map(|&(j, _)| j)
    }

    /// `j_r(t)`, the highest index.
    pub fn last_index(&self) -> Option<u32> {
        self.terms.last().map(|&(j, _)| j)
    }

    pub fn first_sign(&self) -> Option<Sign> {
        self.terms.first().map(|&(_, s)| s)
    }

    pub fn last_sign(&self) -> Option<Sign> {
        self.terms.last().map(|&(_, s)| s)
    }

    pub fn value(&self) -> BigInt {
        self.terms.iter().fold(BigInt::zero(), |acc, &(j, s)| {
            let p = pow3(j - 1);
            match s {
                Sign::Plus => acc + p,
                Sign::Minus => acc - p,
            }
        })
    }

    pub fn sign_type(&self) -> SignType {
        match (self.first_sign(), self.last_sign()) {
            (Some(a), Some(b)) if a != b => SignType::Negative,
            _ => SignType::Positive,
        }
    }

    /// Number of adjacent sign alternations.
    pub fn sign_changes(&self) -> u64 {
        self.terms
            .windows(2)
            .filter(|w| w[0].1 != w[1].1)
            .count() as u64
    }
}

impl fmt::Display for ReducedExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (j, s)) in self.terms.iter().enumerate() {
            if i > 0 || *s == Sign::Minus {
                write!(f, "{s}")?;
            }
            write!(f, "3^{}", j - 1)?;
        }
        Ok(())
    }
}

/// `3^k` as a big integer.
pub fn pow3(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(3u32), k as usize)
}

pub fn reduced_expansion(t: &BigInt) -> ReducedExpansion {
    let three = BigInt::from(3u32);
    let mut terms = Vec::new();
    let mut rest = t.clone();
    let mut index = 1u32;
    while !rest.is_zero() {
        let r = rest.mod_floor(&three);
        if r.is_one() {
            terms.push((index, Sign::Plus));
            rest -= 1;
        } else if !r.is_zero() {
            terms.push((index, Sign::Minus));
            rest += 1;
        }
        rest /= &three;
        index += 1;
    }
    ReducedExpansion { terms }
}

pub fn sign_type(t: &BigInt) -> SignType {
    reduced_expansion(t).sign_type()
}

/// `t ≻ s`: every index of `t` exceeds every index of `s`.
pub fn is_beyond(t: &BigInt, s: &BigInt) -> Result<bool, ExpansionError> {
    if t.is_zero() || s.is_zero() {
        return Err(ExpansionError::UndefinedRelation);
    }
    let jt = lowest_index(t);
    let js = reduced_expansion(s).last_index().expect("nonzero has an index");
    Ok(jt > js)
}

/// `j_1(t)` for `t ≠ 0`: one more than the 3-adic valuation.
pub fn lowest_index(t: &BigInt) -> u32 {
    debug_assert!(!t.is_zero());
    let three = BigInt::from(3u32);
    let mut v = t.abs();
    let mut j = 1;
    while v.is_multiple_of(&three) {
        v /= &three;
        j += 1;
    }
    j
}

/// Sign-change count `z(t)` for `t ≥ 1`.
pub fn z_count(t: &BigInt) -> Result<u64, ExpansionError> {
    if !t.is_positive() {
        return Err(ExpansionError::NonPositive(t.clone()));
    }
    Ok(reduced_expansion(t).sign_changes())
}

/// `z(t) mod K` for odd `K ≥ 3`.
pub fn color_class(t: &BigInt, modulus: u32) -> Result<u32, ExpansionError> {
    if !check_odd(modulus) {
        return Err(ExpansionError::InvalidModulus(modulus));
    }
    Ok((z_count(t)? % modulus as u64) as u32)
}

/// Machine-word fast path for `z`, used by the exhaustive window searches.
pub fn z_count_u64(mut t: u64) -> u64 {
    let mut changes = 0;
    let mut last: Option<bool> = None;
    while t != 0 {
        let plus = match t % 3 {
            0 => {
                t /= 3;
                continue;
            }
            1 => {
                t -= 1;
                true
            }
            _ => {
                t += 1;
                false
            }
        };
        if last.is_some_and(|l| l != plus) {
            changes += 1;
        }
        last = Some(plus);
        t /= 3;
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    /// Brute force: every digit vector of the given length whose value is `t`.
    fn all_vectors_for(t: i64, base: i64, len: u32) -> Vec<Vec<i64>> {
        let e = base / 2;
        let mut out = Vec::new();
        let total = (base as u64).pow(len);
        for code in 0..total {
            let mut c = code;
            let mut digits = Vec::new();
            let mut value = 0i64;
            let mut p = 1i64;
            for _ in 0..len {
                let d = (c % base as u64) as i64 - e;
                c /= base as u64;
                value += d * p;
                p *= base;
                digits.push(d);
            }
            if value == t {
                while digits.last() == Some(&0) {
                    digits.pop();
                }
                out.push(digits);
            }
        }
        out
    }

    #[test]
    fn expand_examples_match_enumeration() {
        for (t, want) in [(5, vec![-1, -1, 1]), (-4, vec![-1, -1])] {
            let oracle = all_vectors_for(t, 3, 4);
            assert_eq!(oracle, vec![want.clone()]);
            let got = expand_balanced(&big(t), 3).unwrap();
            let got: Vec<i64> = got.digits().iter().map(|&d| d as i64).collect();
            assert_eq!(got, want);
        }
        assert!(expand_balanced(&big(0), 7).unwrap().digits().is_empty());
    }

    #[test]
    fn invalid_bases() {
        assert_eq!(expand_balanced(&big(1), 4), Err(ExpansionError::InvalidBase(4)));
        assert_eq!(expand_balanced(&big(1), 1), Err(ExpansionError::InvalidBase(1)));
        assert!(expand_balanced(&big(1), 5).is_ok());
    }

    #[test]
    fn reduced_examples() {
        let r = reduced_expansion(&big(13));
        assert_eq!(r.indices().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(r.signs().all(|s| s == Sign::Plus));
        assert!(reduced_expansion(&big(0)).is_empty());
        let r = reduced_expansion(&big(2));
        assert_eq!(r.terms(), &[(1, Sign::Minus), (2, Sign::Plus)]);
        assert_eq!(r.to_string(), "-3^0+3^1");
    }

    #[test]
    fn sign_type_examples() {
        assert_eq!(sign_type(&big(4)), SignType::Positive);
        assert_eq!(sign_type(&big(5)), SignType::Negative);
        assert_eq!(sign_type(&big(0)), SignType::Positive);
    }

    #[test]
    fn beyond_examples() {
        assert!(is_beyond(&big(9), &big(3)).unwrap());
        assert!(is_beyond(&big(12), &big(1)).unwrap());
        assert!(!is_beyond(&big(4), &big(3)).unwrap());
        assert_eq!(is_beyond(&big(0), &big(3)), Err(ExpansionError::UndefinedRelation));
        assert_eq!(is_beyond(&big(3), &big(0)), Err(ExpansionError::UndefinedRelation));
    }

    #[test]
    fn z_examples() {
        assert_eq!(z_count(&big(9)).unwrap(), 0);
        assert_eq!(z_count(&big(5)).unwrap(), 1);
        assert_eq!(z_count(&big(7)).unwrap(), 2);
        assert!(matches!(z_count(&big(0)), Err(ExpansionError::NonPositive(_))));
        assert!(matches!(z_count(&big(-7)), Err(ExpansionError::NonPositive(_))));
    }

    #[test]
    fn color_examples() {
        assert_eq!(color_class(&big(13), 3).unwrap(), 0);
        assert_eq!(color_class(&big(5), 3).unwrap(), 1);
        assert_eq!(color_class(&big(7), 3).unwrap(), 2);
        assert_eq!(color_class(&big(7), 4), Err(ExpansionError::InvalidModulus(4)));
    }

    #[test]
    fn fast_z_agrees() {
        for t in 1..20_000u64 {
            assert_eq!(z_count_u64(t), z_count(&BigInt::from(t)).unwrap(), "t = {t}");
        }
    }

    #[test]
    fn appending_top_block_keeps_z() {
        for t in 1..=3i64.pow(8) {
            let bt = big(t);
            let top = reduced_expansion(&bt).last_index().unwrap();
            let z = z_count(&bt).unwrap();
            for m in top + 1..top + 4 {
                assert_eq!(z_count(&(&bt + pow3(m - 1))).unwrap(), z);
            }
        }
    }
}
