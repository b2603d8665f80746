//! Upward-closed families of subsets of a finite universe `[1..u]`.
//!
//! Subsets are bitmasks (bit `i` is element `i + 1`). A family is stored as
//! the antichain of its minimal members; every predicate is decided by
//! exhaustive enumeration of the `2^u` subsets.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard limit on the universe size for any family value.
pub const MAX_UNIVERSE: u32 = 20;

/// Default cap for the quadratic checks (classification, sharp dual).
pub const DEFAULT_CAP: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("universe size {universe} outside 1..={cap}")]
    UniverseTooLarge { universe: u32, cap: u32 },
    #[error("element {element} outside universe [1..{universe}]")]
    ElementOutOfRange { element: u32, universe: u32 },
    #[error("universe mismatch: {left} vs {right}")]
    UniverseMismatch { left: u32, right: u32 },
    #[error("family is not proper")]
    Improper,
    #[error("window width {width} exceeds cap {cap}")]
    WindowTooLarge { width: u32, cap: u32 },
    #[error("cannot parse subset list: {0}")]
    Parse(String),
}

/// A subset of `[1..u]` as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_elements(elements: &[u32], universe: u32) -> Result<Self, FamilyError> {
        let mut bits = 0u32;
        for &e in elements {
            if e == 0 || e > universe {
                return Err(FamilyError::ElementOutOfRange { element: e, universe });
            }
            bits |= 1 << (e - 1);
        }
        Ok(Subset(bits))
    }

    pub fn full(universe: u32) -> Self {
        Subset(full_mask(universe))
    }

    pub fn elements(self) -> Vec<u32> {
        (0..32).filter(|i| self.0 >> i & 1 == 1).map(|i| i + 1).collect()
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn meets(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements().iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn full_mask(universe: u32) -> u32 {
    if universe >= 32 {
        u32::MAX
    } else {
        (1u32 << universe) - 1
    }
}

fn check_universe(universe: u32, cap: u32) -> Result<(), FamilyError> {
    if universe == 0 || universe > cap.min(MAX_UNIVERSE) {
        return Err(FamilyError::UniverseTooLarge {
            universe,
            cap: cap.min(MAX_UNIVERSE),
        });
    }
    Ok(())
}

/// Parses `"1,2;2,3"` into subsets; `"{}"` or an empty item is `∅`.
pub fn parse_subsets(text: &str, universe: u32) -> Result<Vec<Subset>, FamilyError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|item| {
            let item = item.trim().trim_start_matches('{').trim_end_matches('}');
            let elements = item
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u32>().map_err(|e| FamilyError::Parse(format!("{s}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Subset::from_elements(&elements, universe)
        })
        .collect()
}

/// Upward-closed family on `[1..universe]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Family {
    universe: u32,
    minimal: Vec<Subset>,
}

impl Family {
    /// Upward closure of `generators`.
    pub fn generated(
        universe: u32,
        generators: impl IntoIterator<Item = Subset>,
    ) -> Result<Self, FamilyError> {
        check_universe(universe, MAX_UNIVERSE)?;
        let mask = full_mask(universe);
        let mut gens: Vec<Subset> = Vec::new();
        for g in generators {
            if g.0 & !mask != 0 {
                let element = 32 - (g.0 & !mask).leading_zeros();
                return Err(FamilyError::ElementOutOfRange { element, universe });
            }
            gens.push(g);
        }
        Ok(Family {
            universe,
            minimal: minimal_of(gens),
        })
    }

    pub fn from_lists(universe: u32, lists: &[&[u32]]) -> Result<Self, FamilyError> {
        let gens = lists
            .iter()
            .map(|l| Subset::from_elements(l, universe))
            .collect::<Result<Vec<_>, _>>()?;
        Family::generated(universe, gens)
    }

    /// Family of all members satisfying `pred`, which must be upward closed.
    pub fn from_predicate(universe: u32, pred: impl Fn(Subset) -> bool) -> Result<Self, FamilyError> {
        check_universe(universe, MAX_UNIVERSE)?;
        let table: Vec<bool> = (0..=full_mask(universe)).map(|b| pred(Subset(b))).collect();
        Ok(Family::from_table(universe, &table))
    }

    fn from_table(universe: u32, table: &[bool]) -> Self {
        let minimal = (0..table.len() as u32)
            .filter(|&b| table[b as usize])
            .filter(|&b| (0..universe).all(|i| b >> i & 1 == 0 || !table[(b & !(1 << i)) as usize]))
            .map(Subset)
            .collect::<Vec<_>>();
        Family {
            universe,
            minimal: sort_subsets(minimal),
        }
    }

    /// The whole power set `P`.
    pub fn power_set(universe: u32) -> Result<Self, FamilyError> {
        Family::generated(universe, [Subset::EMPTY])
    }

    /// `P_+`: all nonempty subsets.
    pub fn nonempty_sets(universe: u32) -> Result<Self, FamilyError> {
        Family::generated(universe, (0..universe).map(|i| Subset(1 << i)))
    }

    pub fn empty(universe: u32) -> Result<Self, FamilyError> {
        Family::generated(universe, [])
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn minimal(&self) -> &[Subset] {
        &self.minimal
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.minimal.iter().any(|m| m.is_subset_of(s))
    }

    fn table(&self) -> Vec<bool> {
        (0..=full_mask(self.universe)).map(|b| self.contains(Subset(b))).collect()
    }

    pub fn members(&self) -> Vec<Subset> {
        (0..=full_mask(self.universe))
            .map(Subset)
            .filter(|&s| self.contains(s))
            .collect()
    }

    pub fn is_proper(&self) -> bool {
        !self.minimal.is_empty() && !self.minimal.contains(&Subset::EMPTY)
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.minimal.iter().all(|&m| other.contains(m))
    }

    /// `F* = {B : B meets every member of F}`.
    pub fn dual(&self) -> Family {
        let minimal = &self.minimal;
        let table: Vec<bool> = (0..=full_mask(self.universe))
            .map(|b| minimal.iter().all(|m| m.meets(Subset(b))))
            .collect();
        Family::from_table(self.universe, &table)
    }

    /// `F1 · F2`: upward closure of `{A1 ∩ A2}`.
    pub fn join(&self, other: &Family) -> Result<Family, FamilyError> {
        self.same_universe(other)?;
        let gens = self
            .minimal
            .iter()
            .flat_map(|a| other.minimal.iter().map(move |b| Subset(a.0 & b.0)));
        Family::generated(self.universe, gens)
    }

    /// Closed under pairwise intersection (and upward closed by construction).
    pub fn is_filter(&self) -> bool {
        self.minimal
            .iter()
            .all(|a| self.minimal.iter().all(|b| self.contains(Subset(a.0 & b.0))))
    }

    /// `A ∪ B ∈ F ⟹ A ∈ F or B ∈ F`. Checking `A ∪ B` minimal suffices;
    /// splits of larger members are handled by upward closure.
    pub fn is_ramsey(&self) -> bool {
        self.ramsey_counterexample().is_none()
    }

    fn ramsey_counterexample(&self) -> Option<(Subset, Subset)> {
        for m in &self.minimal {
            // Enumerate submasks a of m; b = m \ a.
            let mut a = m.0;
            loop {
                let b = m.0 & !a;
                if !self.contains(Subset(a)) && !self.contains(Subset(b)) {
                    return Some((Subset(a), Subset(b)));
                }
                if a == 0 {
                    break;
                }
                a = (a - 1) & m.0;
            }
        }
        None
    }

    pub fn classify(&self, cap: u32) -> Result<Classification, FamilyError> {
        check_universe(self.universe, cap)?;
        let dual = self.dual();
        Ok(Classification {
            proper: self.is_proper(),
            filter: self.is_filter(),
            ramsey: self.is_ramsey(),
            dual_is_filter: dual.is_filter(),
        })
    }

    /// `F# = {A : A ∩ B ∈ F for all B ∈ F}`.
    pub fn sharp_dual(&self, cap: u32) -> Result<Family, FamilyError> {
        check_universe(self.universe, cap)?;
        if !self.is_proper() {
            return Err(FamilyError::Improper);
        }
        let table = self.table();
        let members = self.members();
        let sharp: Vec<bool> = (0..=full_mask(self.universe))
            .map(|a| members.iter().all(|b| table[(a & b.0) as usize]))
            .collect();
        Ok(Family::from_table(self.universe, &sharp))
    }

    fn same_universe(&self, other: &Family) -> Result<(), FamilyError> {
        if self.universe != other.universe {
            return Err(FamilyError::UniverseMismatch {
                left: self.universe,
                right: other.universe,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.minimal.iter().map(|m| m.to_string()).collect();
        write!(f, "up({}) on [1..{}]", parts.join(" "), self.universe)
    }
}

fn sort_subsets(mut v: Vec<Subset>) -> Vec<Subset> {
    v.sort_by_key(|s| (s.len(), s.elements()));
    v
}

fn minimal_of(mut gens: Vec<Subset>) -> Vec<Subset> {
    gens.sort_by_key(|s| s.len());
    gens.dedup();
    let mut out: Vec<Subset> = Vec::new();
    for g in gens {
        if !out.iter().any(|m| m.is_subset_of(g)) {
            out.push(g);
        }
    }
    sort_subsets(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub proper: bool,
    pub filter: bool,
    pub ramsey: bool,
    pub dual_is_filter: bool,
}

/// Outcome of one clause of the sharp-dual report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    /// `None` when the clause's hypothesis does not apply.
    pub holds: Option<bool>,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharpReport {
    pub family: Family,
    pub sharp: Family,
    pub clauses: Vec<Clause>,
}

impl SharpReport {
    pub fn all_hold(&self) -> bool {
        self.clauses.iter().all(|c| c.holds != Some(false))
    }
}

fn first_outside(a: &Family, b: &Family) -> Option<String> {
    a.members()
        .into_iter()
        .find(|&s| !b.contains(s))
        .map(|s| s.to_string())
}

fn equality(a: &Family, b: &Family) -> Option<String> {
    first_outside(a, b).or_else(|| first_outside(b, a))
}

/// Checks the four sharp-dual clauses:
/// (a) `F#` is a filter inside `F ∩ F*`; (b) `F# = (F*)#`;
/// (c) for a filter, `F# = F` and `(F#)# = F#`; (d) for a Ramsey family,
/// `F# = F*`.
pub fn prop51_report(f: &Family, cap: u32) -> Result<SharpReport, FamilyError> {
    let sharp = f.sharp_dual(cap)?;
    let dual = f.dual();
    let mut clauses = Vec::new();

    let a_cex = if !sharp.is_filter() {
        Some(format!("{sharp} is not a filter"))
    } else {
        sharp
            .members()
            .into_iter()
            .find(|&s| !f.contains(s) || !dual.contains(s))
            .map(|s| s.to_string())
    };
    clauses.push(Clause {
        name: "a".into(),
        holds: Some(a_cex.is_none()),
        counterexample: a_cex,
    });

    let b_cex = equality(&sharp, &dual.sharp_dual(cap)?);
    clauses.push(Clause {
        name: "b".into(),
        holds: Some(b_cex.is_none()),
        counterexample: b_cex,
    });

    let c = if f.is_filter() {
        let cex = equality(&sharp, f).or_else(|| equality(&sharp.sharp_dual(cap).ok()?, &sharp));
        Clause {
            name: "c".into(),
            holds: Some(cex.is_none()),
            counterexample: cex,
        }
    } else {
        Clause {
            name: "c".into(),
            holds: None,
            counterexample: None,
        }
    };
    clauses.push(c);

    let d = if f.is_ramsey() {
        let cex = equality(&sharp, &dual);
        Clause {
            name: "d".into(),
            holds: Some(cex.is_none()),
            counterexample: cex,
        }
    } else {
        Clause {
            name: "d".into(),
            holds: None,
            counterexample: None,
        }
    };
    clauses.push(d);

    Ok(SharpReport {
        family: f.clone(),
        sharp,
        clauses,
    })
}

/// Every upward-closed family on `[1..universe]`, proper or not.
/// Feasible for `universe ≤ 4` (65536 candidate collections).
pub fn all_families(universe: u32) -> Result<Vec<Family>, FamilyError> {
    check_universe(universe, 4)?;
    let n = 1usize << universe;
    let mut out = Vec::new();
    for collection in 0u64..(1u64 << n) {
        let table: Vec<bool> = (0..n).map(|b| collection >> b & 1 == 1).collect();
        let upward = (0..n).all(|b| {
            !table[b] || (0..universe).all(|i| table[b | (1 << i)])
        });
        if upward {
            out.push(Family::from_table(universe, &table));
        }
    }
    Ok(out)
}

/// Random proper family: the upward closure of 1..=4 random nonempty sets.
pub fn random_proper_family<R: Rng>(rng: &mut R, universe: u32) -> Result<Family, FamilyError> {
    check_universe(universe, MAX_UNIVERSE)?;
    let count = rng.gen_range(1..=4);
    let gens: Vec<Subset> = (0..count)
        .map(|_| Subset(rng.gen_range(1..=full_mask(universe))))
        .collect();
    Family::generated(universe, gens)
}

/// How a translate is clipped to the window `[1..W]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindowSemantics {
    /// `(A + n) ∩ [1..W]`; elements pushed out are lost.
    Truncated,
    /// Translation mod `W`; no element is lost.
    Cyclic,
}

/// Window for the invariant hull and core: translates `τ_n` for `|n| ≤ max_shift`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub width: u32,
    pub max_shift: u32,
    pub semantics: WindowSemantics,
}

impl Window {
    pub fn truncated(width: u32) -> Self {
        Window {
            width,
            max_shift: width,
            semantics: WindowSemantics::Truncated,
        }
    }

    pub fn cyclic(width: u32) -> Self {
        Window {
            width,
            max_shift: width,
            semantics: WindowSemantics::Cyclic,
        }
    }

    fn check(&self, f: &Family) -> Result<(), FamilyError> {
        check_universe(self.width, MAX_UNIVERSE)
            .map_err(|_| FamilyError::WindowTooLarge { width: self.width, cap: MAX_UNIVERSE })?;
        if f.universe != self.width {
            return Err(FamilyError::UniverseMismatch {
                left: f.universe,
                right: self.width,
            });
        }
        Ok(())
    }

    pub fn translate(&self, s: Subset, n: i64) -> Subset {
        let w = self.width as i64;
        let mask = full_mask(self.width);
        match self.semantics {
            WindowSemantics::Truncated => {
                if n.abs() >= w {
                    Subset::EMPTY
                } else if n >= 0 {
                    Subset((s.0 << n) & mask)
                } else {
                    Subset(s.0 >> (-n))
                }
            }
            WindowSemantics::Cyclic => {
                let k = n.rem_euclid(w) as u32;
                if k == 0 {
                    s
                } else {
                    Subset(((s.0 << k) | (s.0 >> (self.width - k))) & mask)
                }
            }
        }
    }

    fn shifts(&self) -> impl Iterator<Item = i64> {
        let r = self.max_shift as i64;
        -r..=r
    }
}

/// Invariant hull on the window: upward closure of all translates of members.
pub fn gamma_window(f: &Family, window: &Window) -> Result<Family, FamilyError> {
    window.check(f)?;
    let gens: Vec<Subset> = f
        .minimal
        .iter()
        .flat_map(|&m| window.shifts().map(move |n| window.translate(m, n)))
        .collect();
    Family::generated(f.universe, gens)
}

/// Invariant core on the window: members all of whose translates are members.
pub fn tilde_gamma_window(f: &Family, window: &Window) -> Result<Family, FamilyError> {
    window.check(f)?;
    Family::from_predicate(f.universe, |s| {
        window.shifts().all(|n| f.contains(window.translate(s, n)))
    })
}
