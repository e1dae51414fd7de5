//! Reference bound formulas, the exact pigeonhole inequality check, and
//! the instance sweep that confronts exact intersection counts with the
//! bound values.
//!
//! The bound formulas carry unspecified constants and `p^o(1)` factors
//! that are set to 1 here, so the sweep reports ratios and never asserts
//! them. Only exact proven inequalities are asserted elsewhere.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::field::{inv_mod, mul_mod, FieldContext, SubgroupSpec};
use crate::poly::PolySpec;
use crate::value_sets::{count_intersection_poly, IntervalSpec};

/// `(1 + H^((d+1)/4) p^(-1/(4d))) H^(1/(2d)) T^(1/2)`.
pub fn rhs_nfig(h: u64, t: u64, p: u64, d: u32) -> f64 {
    let (h, t, p, d) = (h as f64, t as f64, p as f64, d as f64);
    (1.0 + h.powf((d + 1.0) / 4.0) * p.powf(-1.0 / (4.0 * d))) * h.powf(1.0 / (2.0 * d)) * t.sqrt()
}

/// `min(H^(2 - 1/d), H^(-(d-1)(d-2)/(2d)) p^(1/(2d)))`.
pub fn rhs_tfh(h: u64, p: u64, d: u32) -> f64 {
    let (h, p, d) = (h as f64, p as f64, d as f64);
    let first = h.powf(2.0 - 1.0 / d);
    let second = h.powf(-(d - 1.0) * (d - 2.0) / (2.0 * d)) * p.powf(1.0 / (2.0 * d));
    first.min(second)
}

/// `(1 + H^(3/4) p^(-1/8)) T^(1/2)`, the quadratic square-free case.
pub fn rhs_quadr(h: u64, t: u64, p: u64) -> f64 {
    let (h, t, p) = (h as f64, t as f64, p as f64);
    (1.0 + h.powf(0.75) * p.powf(-0.125)) * t.sqrt()
}

/// Reference lower-bound shape `min(H^2, H^(1/2) p^(1/2))` for the
/// linear-fractional extremal order; report-only like the others.
pub fn rhs_tr_lower(h: u64, p: u64) -> f64 {
    let (h, p) = (h as f64, p as f64);
    (h * h).min(h.sqrt() * p.sqrt())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HarnessError {
    #[error("not applicable: {0}")]
    Inapplicable(&'static str),
    #[error("invalid sweep grid field `{field}`: {reason}")]
    BadGrid {
        field: &'static str,
        reason: String,
    },
}

/// Outcome of the exact pigeonhole inequality check: the best ratio
/// `λ* != 1` must account for at least `(k^2 - 2k) / T` value pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PigeonholeReport {
    /// `k = #(f(I) ∩ G)`.
    pub k: u64,
    pub lambda_star: u64,
    /// Ordered pairs `(x, y)` with both values in the subgroup and
    /// `f(x) ≡ λ* f(y)`.
    pub pairs: u64,
    /// Numerator of the threshold `k(k - 2) / T`.
    pub threshold_num: u64,
    pub order: u64,
    pub pass: bool,
}

impl PigeonholeReport {
    pub fn threshold(&self) -> f64 {
        self.threshold_num as f64 / self.order as f64
    }
}

/// Checks the pigeonhole inequality for a quadratic `f` on interval `I`
/// against subgroup `G`. Applicable when `k >= 4`, `0` is not a value of
/// `f` on `I`, and the subgroup is nontrivial. The inequality is proven,
/// so `pass == false` indicates a bug.
pub fn pigeonhole_check(
    f: &PolySpec,
    interval: &IntervalSpec,
    group: &SubgroupSpec,
) -> Result<PigeonholeReport, HarnessError> {
    let p = f.p();
    if group.order() < 2 {
        return Err(HarnessError::Inapplicable("subgroup has no lambda != 1"));
    }
    // Multiplicities of each subgroup value over x in I; zero values make
    // the instance inapplicable (containment arguments exclude them).
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for x in interval.residues(p) {
        let v = f.eval(x);
        if v == 0 {
            return Err(HarnessError::Inapplicable("0 is a value of f on I"));
        }
        if group.contains(v) {
            *counts.entry(v).or_insert(0) += 1;
        }
    }
    let k = counts.len() as u64;
    if k < 4 {
        return Err(HarnessError::Inapplicable("fewer than 4 subgroup values"));
    }
    // Accumulate ordered pair counts per ratio λ = v / w over value pairs.
    let values: Vec<(u64, u64)> = counts.into_iter().collect();
    let mut per_lambda: HashMap<u64, u64> = HashMap::new();
    for &(v, cv) in &values {
        for &(w, cw) in &values {
            let lambda = mul_mod(v, inv_mod(w, p), p);
            if lambda == 1 {
                continue;
            }
            *per_lambda.entry(lambda).or_insert(0) += cv * cw;
        }
    }
    let (lambda_star, pairs) = per_lambda
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .expect("k >= 4 guarantees a nontrivial ratio");
    let threshold_num = k * (k - 2);
    // Exact comparison pairs / 1 >= k(k-2) / T by cross multiplication.
    let pass = pairs as u128 * group.order() as u128 >= threshold_num as u128;
    Ok(PigeonholeReport {
        k,
        lambda_star,
        pairs,
        threshold_num,
        order: group.order(),
        pass,
    })
}

/// Which reference formula a sweep confronts the exact counts with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Nfig,
    Quadr,
}

/// Sweep configuration: primes, seeded polynomial family, interval
/// lengths, offsets, and a divisor filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepGrid {
    pub primes: Vec<u64>,
    pub degree: u32,
    pub polys_per_prime: u32,
    pub seed: u64,
    pub h_values: Vec<u64>,
    pub u_values: Vec<u64>,
    /// Keep only subgroup orders up to this bound, when set.
    pub max_order: Option<u64>,
    pub bound: BoundKind,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<(), HarnessError> {
        for &p in &self.primes {
            if !crate::field::is_prime(p) || p < 3 {
                return Err(HarnessError::BadGrid {
                    field: "primes",
                    reason: format!("{p} is not an odd prime"),
                });
            }
        }
        if self.degree < 2 {
            return Err(HarnessError::BadGrid {
                field: "degree",
                reason: format!("bounds need degree >= 2, got {}", self.degree),
            });
        }
        if self.h_values.iter().any(|&h| h == 0) {
            return Err(HarnessError::BadGrid {
                field: "h_values",
                reason: "interval length 0".into(),
            });
        }
        if self.bound == BoundKind::Quadr && self.degree != 2 {
            return Err(HarnessError::BadGrid {
                field: "bound",
                reason: "the quadratic bound requires degree 2".into(),
            });
        }
        Ok(())
    }
}

/// One sweep row: instance parameters, the exact count, the bound value
/// with constants set to 1, and their ratio.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub p: u64,
    pub f_coeffs: String,
    pub u: u64,
    #[serde(rename = "H")]
    pub h: u64,
    #[serde(rename = "T")]
    pub t: u64,
    pub count: u64,
    pub bound: f64,
    pub ratio: f64,
}

/// Seeded monic polynomials of the grid's degree; square-free when the
/// quadratic bound is selected.
fn sample_polys(grid: &SweepGrid, p: u64) -> Vec<PolySpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed ^ p);
    let mut polys = Vec::with_capacity(grid.polys_per_prime as usize);
    while polys.len() < grid.polys_per_prime as usize {
        let mut coeffs = vec![1u64];
        for _ in 0..grid.degree {
            coeffs.push(rng.gen_range(0..p));
        }
        let f = PolySpec::new(p, &coeffs);
        if grid.bound == BoundKind::Quadr && !f.is_square_free().unwrap_or(false) {
            continue;
        }
        polys.push(f);
    }
    polys
}

fn sweep_one_prime(grid: &SweepGrid, p: u64) -> Vec<BoundReport> {
    let ctx = FieldContext::new(p).expect("validated prime");
    let mut rows = Vec::new();
    for f in sample_polys(grid, p) {
        let coeff_str = f
            .coeffs()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(":");
        for &u in &grid.u_values {
            if u >= p {
                continue;
            }
            for &h in &grid.h_values {
                if h > p {
                    continue;
                }
                let interval = IntervalSpec::new(u, h, p).expect("validated");
                for &t in ctx.divisors() {
                    if grid.max_order.is_some_and(|m| t > m) {
                        continue;
                    }
                    let group = ctx.subgroup(t).expect("divisor");
                    let count = count_intersection_poly(&f, &interval, &group);
                    let bound = match grid.bound {
                        BoundKind::Nfig => rhs_nfig(h, t, p, grid.degree),
                        BoundKind::Quadr => rhs_quadr(h, t, p),
                    };
                    rows.push(BoundReport {
                        p,
                        f_coeffs: coeff_str.clone(),
                        u,
                        h,
                        t,
                        count,
                        bound,
                        ratio: count as f64 / bound,
                    });
                }
            }
        }
    }
    rows
}

/// Runs the sweep; rows come out in lexicographic instance order
/// regardless of how the work is scheduled.
pub fn ratio_sweep(grid: &SweepGrid) -> Result<Vec<BoundReport>, HarnessError> {
    grid.validate()?;
    let mut primes = grid.primes.clone();
    primes.sort_unstable();
    primes.dedup();

    #[cfg(feature = "parallel")]
    let rows: Vec<BoundReport> = primes
        .par_iter()
        .map(|&p| sweep_one_prime(grid, p))
        .reduce(Vec::new, |mut acc, mut chunk| {
            acc.append(&mut chunk);
            acc
        });
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<BoundReport> = primes
        .iter()
        .flat_map(|&p| sweep_one_prime(grid, p))
        .collect();

    Ok(rows)
}

/// Summary emitted alongside a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub instances: usize,
    pub max_ratio: f64,
    pub note: &'static str,
}

pub const SWEEP_NOTE: &str =
    "bound values omit the unspecified absolute constant and the p^o(1) factor; ratios are reported, not asserted";

pub fn summarize(rows: &[BoundReport]) -> SweepSummary {
    SweepSummary {
        instances: rows.len(),
        max_ratio: rows.iter().map(|r| r.ratio).fold(0.0, f64::max),
        note: SWEEP_NOTE,
    }
}

pub const CSV_HEADER: &str = "p,f_coeffs,u,H,T,count,bound,ratio";

/// Writes the sweep CSV with a header row; bounds and ratios are printed
/// with six significant digits.
pub fn write_reports_csv<W: Write>(out: &mut W, rows: &[BoundReport]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{:.6e},{:.6e}",
            r.p, r.f_coeffs, r.u, r.h, r.t, r.count, r.bound, r.ratio
        )?;
    }
    Ok(())
}

/// Parses one CSV data row back into a report; round-trips `write_reports_csv`.
pub fn parse_report_row(line: &str) -> Option<BoundReport> {
    let mut parts = line.split(',');
    let p = parts.next()?.parse().ok()?;
    let f_coeffs = parts.next()?.to_string();
    let u = parts.next()?.parse().ok()?;
    let h = parts.next()?.parse().ok()?;
    let t = parts.next()?.parse().ok()?;
    let count = parts.next()?.parse().ok()?;
    let bound = parts.next()?.parse().ok()?;
    let ratio = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some(BoundReport {
        p,
        f_coeffs,
        u,
        h,
        t,
        count,
        bound,
        ratio,
    })
}
