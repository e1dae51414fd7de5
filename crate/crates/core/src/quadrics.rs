//! Integer conics: classification, exact counting of integral points in a
//! box by two independent algorithms, congruence pair counting for
//! `f(x) ≡ λ f(y) (mod p)`, and the centered integer lift of `v Q_λ`.

use std::collections::HashMap;

use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::field::{gcd, mul_mod};
use crate::poly::{build_q_lambda, ConicModP, PolyError, PolySpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadricError {
    #[error("the zero polynomial is not a conic")]
    ZeroPolynomial,
    #[error("multiplier v = {v} is not invertible mod {p}")]
    NonInvertibleMultiplier { v: u64, p: u64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `A X^2 + B X Y + C Y^2 + D X + E Y + F` with integer coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntConic {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub e: i64,
    pub f: i64,
}

/// Classification used by the point-count bound: the bound applies to the
/// nondegenerate, non-parabolic case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConicClass {
    /// The 3x3 determinant vanishes: the conic splits into lines over the
    /// algebraic closure.
    Degenerate,
    /// Nonzero determinant with `B^2 - 4AC = 0`.
    ParabolaType,
    /// Nonzero determinant and `B^2 - 4AC != 0`.
    NondegenerateConic,
}

impl IntConic {
    pub fn new(a: i64, b: i64, c: i64, d: i64, e: i64, f: i64) -> Self {
        IntConic { a, b, c, d, e, f }
    }

    pub fn coeffs(&self) -> [i64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs() == [0; 6]
    }

    /// `B^2 - 4AC`.
    pub fn delta(&self) -> i128 {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        b * b - 4 * a * c
    }

    /// Determinant of `[[2A, B, D], [B, 2C, E], [D, E, 2F]]`.
    pub fn det3(&self) -> i128 {
        let [a, b, c, d, e, f] = self.coeffs().map(|x| x as i128);
        let (a2, c2, f2) = (2 * a, 2 * c, 2 * f);
        a2 * (c2 * f2 - e * e) - b * (b * f2 - e * d) + d * (b * e - c2 * d)
    }

    pub fn classify(&self) -> Result<ConicClass, QuadricError> {
        if self.is_zero() {
            return Err(QuadricError::ZeroPolynomial);
        }
        if self.det3() == 0 {
            Ok(ConicClass::Degenerate)
        } else if self.delta() == 0 {
            Ok(ConicClass::ParabolaType)
        } else {
            Ok(ConicClass::NondegenerateConic)
        }
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        let [a, b, c, d, e, f] = self.coeffs().map(|v| v as i128);
        a * x * x + b * x * y + c * y * y + d * x + e * y + f
    }

    /// Counts integral zeros in `[0, H] x [0, H]` with the double loop.
    pub fn count_points_box_naive(&self, h: u64) -> u64 {
        count_columns_range(self, 0, h, |conic, x| {
            (0..=h as i128)
                .filter(|&y| conic.eval(x, y) == 0)
                .count() as u64
        })
    }

    /// Counts integral zeros in `[0, H] x [0, H]` by solving the quadratic
    /// in `y` column by column with exact integer square roots.
    pub fn count_points_box_columns(&self, h: u64) -> u64 {
        let h_i = h as i128;
        let mut total = 0u64;
        for x in 0..=h_i {
            let qa = self.c as i128;
            let qb = self.b as i128 * x + self.e as i128;
            let qc = (self.a as i128 * x + self.d as i128) * x + self.f as i128;
            total += count_quadratic_roots_in_range(qa, qb, qc, h_i);
        }
        total
    }

    /// Runs both counting algorithms; they are required to agree.
    ///
    /// # Panics
    ///
    /// Panics if the two algorithms disagree, which indicates a bug.
    pub fn count_points_box(&self, h: u64) -> u64 {
        let naive = self.count_points_box_naive(h);
        let columns = self.count_points_box_columns(h);
        assert_eq!(
            naive, columns,
            "point counters disagree on {self:?} with box {h}"
        );
        naive
    }
}

#[cfg(feature = "parallel")]
fn count_columns_range(
    conic: &IntConic,
    lo: u64,
    hi: u64,
    per_column: impl Fn(&IntConic, i128) -> u64 + Sync,
) -> u64 {
    (lo..=hi)
        .into_par_iter()
        .map(|x| per_column(conic, x as i128))
        .sum()
}

#[cfg(not(feature = "parallel"))]
fn count_columns_range(
    conic: &IntConic,
    lo: u64,
    hi: u64,
    per_column: impl Fn(&IntConic, i128) -> u64 + Sync,
) -> u64 {
    (lo..=hi).map(|x| per_column(conic, x as i128)).sum()
}

/// Number of integer roots of `qa y^2 + qb y + qc = 0` with `0 <= y <= h`.
/// Degenerate columns (vanishing leading coefficients) fall back to the
/// linear and constant cases.
fn count_quadratic_roots_in_range(qa: i128, qb: i128, qc: i128, h: i128) -> u64 {
    if qa == 0 {
        if qb == 0 {
            return if qc == 0 { (h + 1) as u64 } else { 0 };
        }
        // qb y = -qc
        if qc % qb != 0 {
            return 0;
        }
        let y = -qc / qb;
        return u64::from(y >= 0 && y <= h);
    }
    let disc = qb * qb - 4 * qa * qc;
    if disc < 0 {
        return 0;
    }
    let Some(s) = exact_isqrt(disc as u128) else {
        return 0;
    };
    let s = s as i128;
    let mut count = 0;
    let mut seen_first = None;
    for root_num in [-qb + s, -qb - s] {
        if root_num % (2 * qa) != 0 {
            continue;
        }
        let y = root_num / (2 * qa);
        if Some(y) == seen_first {
            continue; // double root
        }
        seen_first = Some(y);
        if y >= 0 && y <= h {
            count += 1;
        }
    }
    count
}

/// Exact integer square root: `Some(r)` iff `n = r^2`.
pub fn exact_isqrt(n: u128) -> Option<u128> {
    if n < 2 {
        return Some(n);
    }
    // Newton iteration on u128, then exact correction.
    let mut x = 1u128 << (n.ilog2() / 2 + 1);
    loop {
        let next = (x + n / x) / 2;
        if next >= x {
            break;
        }
        x = next;
    }
    while x.checked_mul(x).map_or(true, |s| s > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|s| s <= n) {
        x += 1;
    }
    (x * x == n).then_some(x)
}

/// Exact count of pairs `(x, y)` in `{1..H}^2` with `f(x) ≡ λ f(y) (mod p)`,
/// via a value-indexed map over `y` and a lookup over `x`.
pub fn congruence_pairs(f: &PolySpec, lambda: u64, h: u64) -> u64 {
    let p = f.p();
    let lambda = lambda % p;
    let mut by_value: HashMap<u64, u64> = HashMap::new();
    for y in 1..=h {
        let v = mul_mod(lambda, f.eval(y % p), p);
        *by_value.entry(v).or_insert(0) += 1;
    }
    (1..=h)
        .map(|x| by_value.get(&f.eval(x % p)).copied().unwrap_or(0))
        .sum()
}

/// The integer lift of `v Q_λ` with coefficients in `(-p/2, p/2]`, plus the
/// bound on `|z|` for which every congruence solution in the box satisfies
/// `F(x, y) = z p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenteredLift {
    pub conic: IntConic,
    pub v: u64,
    pub lambda: u64,
    /// `ceil(max_{(x,y) in {1..H}^2} |F(x, y)| / p)`.
    pub z_range: i128,
}

/// Reduces every coefficient of `v Q_λ(X, Y)` into `(-p/2, p/2]` and
/// computes the z-range over the box `{1..H}^2`.
pub fn centered_lift(
    f: &PolySpec,
    lambda: u64,
    v: u64,
    h: u64,
) -> Result<CenteredLift, QuadricError> {
    let p = f.p();
    if gcd(v % p, p) != 1 {
        return Err(QuadricError::NonInvertibleMultiplier { v, p });
    }
    let q = build_q_lambda(f, lambda)?;
    let scaled: Vec<i64> = q
        .coeffs
        .iter()
        .map(|&c| center(mul_mod(c, v % p, p), p))
        .collect();
    let conic = IntConic::new(
        scaled[0], scaled[1], scaled[2], scaled[3], scaled[4], scaled[5],
    );
    let p_i = p as i128;
    let max_abs = max_abs_on_box(&conic, h);
    let z_range = (max_abs + p_i - 1) / p_i;
    Ok(CenteredLift {
        conic,
        v: v % p,
        lambda: lambda % p,
        z_range,
    })
}

/// Unique representative of `c` in `(-p/2, p/2]` for odd `p`.
fn center(c: u64, p: u64) -> i64 {
    if 2 * c <= p {
        c as i64
    } else {
        c as i64 - p as i64
    }
}

#[cfg(feature = "parallel")]
fn max_abs_on_box(conic: &IntConic, h: u64) -> i128 {
    (1..=h)
        .into_par_iter()
        .map(|x| {
            (1..=h as i128)
                .map(|y| conic.eval(x as i128, y).abs())
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

#[cfg(not(feature = "parallel"))]
fn max_abs_on_box(conic: &IntConic, h: u64) -> i128 {
    (1..=h as i128)
        .flat_map(|x| (1..=h as i128).map(move |y| conic.eval(x, y).abs()))
        .max()
        .unwrap_or(0)
}

/// Spot check on a grid that the lift agrees with `v Q_λ` mod `p`.
pub fn lift_congruent_on_grid(lift: &CenteredLift, q: &ConicModP, grid: u64) -> bool {
    let p = q.p();
    for x in 0..=grid {
        for y in 0..=grid {
            let lifted = lift.conic.eval(x as i128, y as i128).rem_euclid(p as i128) as u64;
            let expect = mul_mod(lift.v, q.eval(x % p, y % p), p);
            if lifted != expect {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::is_prime;

    #[test]
    fn classify_examples() {
        let circle = IntConic::new(1, 0, 1, 0, 0, -25);
        assert_eq!(circle.classify().unwrap(), ConicClass::NondegenerateConic);

        let line_pair = IntConic::new(1, 0, -1, 0, 0, 0);
        assert_eq!(line_pair.classify().unwrap(), ConicClass::Degenerate);

        // X^2 - Y = 0.
        let parabola = IntConic::new(1, 0, 0, 0, -1, 0);
        assert_eq!(parabola.classify().unwrap(), ConicClass::ParabolaType);

        assert_eq!(
            IntConic::new(0, 0, 0, 0, 0, 0).classify(),
            Err(QuadricError::ZeroPolynomial)
        );
    }

    #[test]
    fn count_examples() {
        let circle = IntConic::new(1, 0, 1, 0, 0, -25);
        assert_eq!(circle.count_points_box(10), 4); // (0,5),(5,0),(3,4),(4,3)

        let hyperbola = IntConic::new(0, 1, 0, 0, 0, -6);
        assert_eq!(hyperbola.count_points_box(6), 4); // divisor pairs of 6

        let empty = IntConic::new(1, 0, 1, 0, 0, 1);
        assert_eq!(empty.count_points_box(100), 0);
    }

    #[test]
    fn exact_isqrt_small() {
        for n in 0..2000u128 {
            match exact_isqrt(n) {
                Some(r) => assert_eq!(r * r, n),
                None => {
                    let r = (n as f64).sqrt() as u128;
                    for c in r.saturating_sub(1)..=r + 1 {
                        assert_ne!(c * c, n);
                    }
                }
            }
        }
        assert_eq!(exact_isqrt(u128::MAX), None);
        let big = (1u128 << 60) - 1;
        assert_eq!(exact_isqrt(big * big), Some(big));
    }

    #[test]
    fn counters_agree_on_degenerate_columns() {
        // C = 0 exercises the linear fallback; all-zero columns the constant one.
        for conic in [
            IntConic::new(1, 0, 0, 0, -1, 0),
            IntConic::new(0, 0, 0, 1, 0, -3),
            IntConic::new(0, 1, 0, 0, 0, 0),
            IntConic::new(1, -1, 0, 0, 0, 0),
        ] {
            for h in [0u64, 1, 5, 40] {
                assert_eq!(
                    conic.count_points_box_naive(h),
                    conic.count_points_box_columns(h),
                    "{conic:?} h={h}"
                );
            }
        }
    }

    #[test]
    fn congruence_pairs_examples() {
        // λ = 1 always admits the diagonal.
        let f = PolySpec::new(7, &[1, 2, 3]);
        for h in 1..=7 {
            assert!(congruence_pairs(&f, 1, h) >= h);
        }

        // f = X^2, λ = 4, p = 7, H = 3: exactly (2,1), (3,2), (1,3).
        let sq = PolySpec::new(7, &[1, 0, 0]);
        assert_eq!(congruence_pairs(&sq, 4, 3), 3);

        assert!(congruence_pairs(&sq, 3, 1) <= 1);
    }

    #[test]
    fn congruence_pairs_sum_over_lambda() {
        // When f has no root in {1..H}, each pair lands on exactly one λ in
        // F_p^*, so the counts over all λ sum to H^2.
        for p in (3..30u64).filter(|&p| is_prime(p)) {
            for coeffs in [[1u64, 0, 1], [1, 1, 2], [2, 3, 1]] {
                let f = PolySpec::new(p, &coeffs);
                for h in 1..=p.min(12) {
                    if (1..=h).any(|x| f.eval(x % p) == 0) {
                        continue;
                    }
                    let total: u64 = (1..p).map(|l| congruence_pairs(&f, l, h)).sum();
                    assert_eq!(total, h * h, "p={p} h={h}");
                }
            }
        }
    }

    #[test]
    fn centered_lift_identity_case() {
        // λ = 1, v = 1, f = X^2: F = X^2 - Y^2 with coefficients unchanged.
        let f = PolySpec::new(101, &[1, 0, 0]);
        let lift = centered_lift(&f, 1, 1, 10).unwrap();
        assert_eq!(lift.conic.coeffs(), [1, 0, -1, 0, 0, 0]);
    }

    #[test]
    fn centered_lift_congruence_grid() {
        let f = PolySpec::new(103, &[5, 17, 42]);
        let q = build_q_lambda(&f, 7).unwrap();
        let lift = centered_lift(&f, 7, 31, 10).unwrap();
        assert!(lift_congruent_on_grid(&lift, &q, 10));
        for c in lift.conic.coeffs() {
            assert!(2 * c.abs() as u64 <= 103);
        }
    }

    #[test]
    fn z_range_covers_box() {
        let f = PolySpec::new(97, &[1, 3, 5]);
        let lift = centered_lift(&f, 9, 11, 8).unwrap();
        for x in 1..=8i128 {
            for y in 1..=8i128 {
                assert!(lift.conic.eval(x, y).abs() <= lift.z_range * 97);
            }
        }
    }
}
