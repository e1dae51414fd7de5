//! Value sets of polynomials and rational functions over intervals, the
//! intersection count with a multiplicative subgroup, iterated product
//! sets, and the extremal subgroup order found by exhaustive search.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::field::FieldContext;
use crate::poly::{EvalOutcome, PolySpec, RationalSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValueSetError {
    #[error("interval length must satisfy 1 <= H <= p, got H={len} with p={p}")]
    BadLength { len: u64, p: u64 },
    #[error("interval offset must be a residue mod p, got u={offset} with p={p}")]
    BadOffset { offset: u64, p: u64 },
    #[error("work cap of {cap} set insertions exceeded")]
    WorkCapExceeded { cap: u64 },
    #[error("no interval of length {len} has its value set inside a subgroup")]
    NoContainment { len: u64 },
}

/// The interval `{u+1, ..., u+H}` of `H` consecutive integers, taken as
/// residues mod `p`. May wrap past `p - 1`; `wraps` reports when it does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalSpec {
    offset: u64,
    len: u64,
}

impl IntervalSpec {
    pub fn new(offset: u64, len: u64, p: u64) -> Result<Self, ValueSetError> {
        if len == 0 || len > p {
            return Err(ValueSetError::BadLength { len, p });
        }
        if offset >= p {
            return Err(ValueSetError::BadOffset { offset, p });
        }
        Ok(IntervalSpec { offset, len })
    }

    #[inline]
    pub fn offset(&self) -> u64 {
        self.offset
    }

    #[inline]
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false // length is at least 1 by construction
    }

    /// True when `u + H > p`, i.e. the residues wrap past `p - 1`.
    pub fn wraps(&self, p: u64) -> bool {
        self.offset + self.len > p
    }

    /// The residues `u+1, ..., u+H` reduced mod `p`, in interval order.
    pub fn residues(&self, p: u64) -> impl Iterator<Item = u64> + '_ {
        let offset = self.offset;
        (1..=self.len).map(move |i| {
            let x = offset + i;
            if x >= p {
                x - p
            } else {
                x
            }
        })
    }
}

/// `{r(x) : x in I, g(x) != 0}`; poles are excluded, not errors.
pub fn value_set(r: &RationalSpec, interval: &IntervalSpec) -> BTreeSet<u64> {
    let p = r.p();
    interval
        .residues(p)
        .filter_map(|x| match r.eval(x) {
            EvalOutcome::Value(v) => Some(v),
            EvalOutcome::Pole => None,
        })
        .collect()
}

pub fn value_set_poly(f: &PolySpec, interval: &IntervalSpec) -> BTreeSet<u64> {
    interval.residues(f.p()).map(|x| f.eval(x)).collect()
}

/// Exact `#(r(I) ∩ G)`.
pub fn count_intersection(
    r: &RationalSpec,
    interval: &IntervalSpec,
    group: &crate::field::SubgroupSpec,
) -> u64 {
    value_set(r, interval)
        .iter()
        .filter(|&&v| group.contains(v))
        .count() as u64
}

pub fn count_intersection_poly(
    f: &PolySpec,
    interval: &IntervalSpec,
    group: &crate::field::SubgroupSpec,
) -> u64 {
    value_set_poly(f, interval)
        .iter()
        .filter(|&&v| group.contains(v))
        .count() as u64
}

/// Default cap on set insertions during product-set enumeration.
pub const DEFAULT_WORK_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSetResult {
    pub nu: u32,
    pub cardinality: u64,
    /// Enumerated elements, retained only when the set stays below
    /// `ELEMENT_RETENTION_CAP`.
    pub elements: Option<BTreeSet<u64>>,
}

pub const ELEMENT_RETENTION_CAP: usize = 1 << 16;

/// Exact cardinality of the ν-fold product set of `f(I)` inside `F_p`,
/// by iterated set products with deduplication.
pub fn product_set_cardinality(
    f: &PolySpec,
    interval: &IntervalSpec,
    nu: u32,
    work_cap: u64,
) -> Result<ProductSetResult, ValueSetError> {
    assert!(nu >= 1);
    let p = f.p();
    let base: Vec<u64> = value_set_poly(f, interval).into_iter().collect();
    let mut current: BTreeSet<u64> = base.iter().copied().collect();
    let mut work = 0u64;
    for _ in 1..nu {
        let mut next = BTreeSet::new();
        for &a in &current {
            for &b in &base {
                work += 1;
                if work > work_cap {
                    return Err(ValueSetError::WorkCapExceeded { cap: work_cap });
                }
                next.insert(crate::field::mul_mod(a, b, p));
            }
        }
        current = next;
    }
    let cardinality = current.len() as u64;
    let elements = (current.len() <= ELEMENT_RETENTION_CAP).then_some(current);
    Ok(ProductSetResult {
        nu,
        cardinality,
        elements,
    })
}

/// Result of the extremal search: the smallest subgroup order `T` and the
/// least offset `u` whose interval has all its values inside the subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TfResult {
    pub order: u64,
    pub offset: u64,
    pub subgroup: crate::field::SubgroupSpec,
}

/// Moduli up to this bound get a per-subgroup membership bitmap; beyond it
/// the scan falls back to exponentiation per probe.
const MEMBER_TABLE_LIMIT: u64 = 1 << 22;

/// Smallest `T | p-1` admitting an offset `u` with `f({u+1..u+H})` inside
/// the subgroup of order `T` and `0` not a value. Divisors are scanned
/// ascending and ties broken by the least `u`.
pub fn t_f(f: &PolySpec, h: u64, ctx: &FieldContext) -> Result<TfResult, ValueSetError> {
    t_r(&RationalSpec::from_poly(f.clone()), h, ctx)
}

/// Rational variant: poles only shrink the value set and do not disqualify
/// an offset, unless they empty it entirely.
pub fn t_r(r: &RationalSpec, h: u64, ctx: &FieldContext) -> Result<TfResult, ValueSetError> {
    let p = ctx.p();
    IntervalSpec::new(0, h, p)?;
    for &order in ctx.divisors() {
        let group = ctx.subgroup(order).expect("divisor of p-1");
        let table = (p <= MEMBER_TABLE_LIMIT).then(|| group.member_table());
        let accept = |x: u64| match &table {
            Some(t) => t[x as usize],
            None => group.contains(x),
        };
        let check = |u: u64| -> bool {
            let interval = IntervalSpec { offset: u, len: h };
            let mut any_value = false;
            for x in interval.residues(p) {
                match r.eval(x) {
                    EvalOutcome::Pole => continue,
                    EvalOutcome::Value(v) => {
                        if v == 0 || !accept(v) {
                            return false;
                        }
                        any_value = true;
                    }
                }
            }
            any_value
        };
        let found = scan_offsets(p, check);
        if let Some(offset) = found {
            return Ok(TfResult {
                order,
                offset,
                subgroup: group,
            });
        }
    }
    Err(ValueSetError::NoContainment { len: h })
}

#[cfg(feature = "parallel")]
fn scan_offsets(p: u64, check: impl Fn(u64) -> bool + Sync) -> Option<u64> {
    // Deterministic minimum over offsets regardless of worker interleaving.
    (0..p).into_par_iter().find_first(|&u| check(u))
}

#[cfg(not(feature = "parallel"))]
fn scan_offsets(p: u64, check: impl Fn(u64) -> bool + Sync) -> Option<u64> {
    (0..p).find(|&u| check(u))
}

/// One JSON-lines record of a counting run.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CountRecord {
    pub p: u64,
    pub f: String,
    pub u: u64,
    #[serde(rename = "H")]
    pub h: u64,
    #[serde(rename = "T")]
    pub t: u64,
    pub count: u64,
}
