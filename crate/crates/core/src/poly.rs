//! Univariate polynomials and rational functions over `F_p`, the conic
//! `Q_λ(X,Y) = f(X) - λ f(Y)` for quadratic `f`, and exact multivariate
//! integer polynomials used for the product-difference construction.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::field::{add_mod, inv_mod, mul_mod, pow_mod, sub_mod};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial must have degree at least 1")]
    DegreeTooSmall,
    #[error("expected degree {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("lambda must be a nonzero residue")]
    ZeroLambda,
    #[error("numerator and denominator are not coprime")]
    NotCoprime,
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("vectors must be nonempty")]
    EmptyVector,
    #[error("vectors have mismatched lengths {0} and {1}")]
    MismatchedLengths(usize, usize),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// A polynomial over `F_p`, coefficients highest degree first:
/// `a0 X^d + a1 X^(d-1) + ... + ad`, with `a0 != 0` unless `d = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolySpec {
    p: u64,
    coeffs: Vec<u64>,
}

impl PolySpec {
    /// Builds a polynomial from coefficients listed highest degree first.
    /// Coefficients are reduced mod `p` and leading zeros stripped.
    pub fn new(p: u64, coeffs: &[u64]) -> Self {
        let mut c: Vec<u64> = coeffs.iter().map(|&a| a % p).collect();
        while c.len() > 1 && c[0] == 0 {
            c.remove(0);
        }
        if c.is_empty() {
            c.push(0);
        }
        PolySpec { p, coeffs: c }
    }

    pub fn zero(p: u64) -> Self {
        PolySpec {
            p,
            coeffs: vec![0],
        }
    }

    pub fn constant(p: u64, a: u64) -> Self {
        PolySpec {
            p,
            coeffs: vec![a % p],
        }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Coefficients highest degree first.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> u64 {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0]
    }

    /// Horner evaluation at `x`.
    pub fn eval(&self, x: u64) -> u64 {
        let x = x % self.p;
        let mut acc = 0u64;
        for &c in &self.coeffs {
            acc = add_mod(mul_mod(acc, x, self.p), c, self.p);
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self) -> PolySpec {
        let d = self.degree();
        if d == 0 {
            return PolySpec::zero(self.p);
        }
        let mut out = Vec::with_capacity(d);
        for (i, &c) in self.coeffs.iter().take(d).enumerate() {
            let power = (d - i) as u64;
            out.push(mul_mod(c, power % self.p, self.p));
        }
        PolySpec::new(self.p, &out)
    }

    /// Scales so the leading coefficient is 1.
    pub fn monic(&self) -> PolySpec {
        if self.is_zero() || self.leading() == 1 {
            return self.clone();
        }
        let inv = inv_mod(self.leading(), self.p);
        let coeffs: Vec<u64> = self
            .coeffs
            .iter()
            .map(|&c| mul_mod(c, inv, self.p))
            .collect();
        PolySpec {
            p: self.p,
            coeffs,
        }
    }

    fn rem(&self, other: &PolySpec) -> PolySpec {
        assert!(!other.is_zero());
        let p = self.p;
        let mut r = self.coeffs.clone();
        let dn = other.degree();
        let lead_inv = inv_mod(other.leading(), p);
        loop {
            while r.len() > 1 && r[0] == 0 {
                r.remove(0);
            }
            if (r.len() == 1 && r[0] == 0) || r.len() - 1 < dn {
                break;
            }
            let factor = mul_mod(r[0], lead_inv, p);
            for i in 0..=dn {
                let t = mul_mod(factor, other.coeffs[i], p);
                r[i] = sub_mod(r[i], t, p);
            }
        }
        PolySpec::new(p, &r)
    }

    /// Monic gcd by the classical Euclidean algorithm.
    pub fn gcd(a: &PolySpec, b: &PolySpec) -> PolySpec {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// True iff `gcd(f, f')` is constant.
    pub fn is_square_free(&self) -> Result<bool, PolyError> {
        if self.degree() < 1 {
            return Err(PolyError::DegreeTooSmall);
        }
        let g = PolySpec::gcd(self, &self.derivative());
        Ok(g.degree() == 0)
    }
}

impl fmt::Display for PolySpec {
    /// Canonical text form, e.g. `2*X^2 + X + 3 mod 7`.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            let power = d - i;
            if c == 0 && !(d == 0 && i == 0) {
                continue;
            }
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            match power {
                0 => write!(out, "{c}")?,
                _ => {
                    if c != 1 {
                        write!(out, "{c}*")?;
                    }
                    if power == 1 {
                        write!(out, "X")?;
                    } else {
                        write!(out, "X^{power}")?;
                    }
                }
            }
        }
        if first {
            write!(out, "0")?;
        }
        write!(out, " mod {}", self.p)
    }
}

impl FromStr for PolySpec {
    type Err = PolyError;

    /// Parses the canonical text form produced by `Display`.
    fn from_str(s: &str) -> Result<Self, PolyError> {
        let (body, modulus) = s
            .rsplit_once("mod")
            .ok_or_else(|| PolyError::Parse(format!("missing 'mod p' suffix in {s:?}")))?;
        let p: u64 = modulus
            .trim()
            .parse()
            .map_err(|_| PolyError::Parse(format!("bad modulus in {s:?}")))?;
        let mut by_power: BTreeMap<usize, u64> = BTreeMap::new();
        for term in body.split('+') {
            let term = term.trim();
            if term.is_empty() {
                continue;
            }
            let (coeff, power) = parse_term(term, p)?;
            let entry = by_power.entry(power).or_insert(0);
            *entry = add_mod(*entry, coeff, p);
        }
        let d = by_power.keys().max().copied().unwrap_or(0);
        let mut coeffs = vec![0u64; d + 1];
        for (power, c) in by_power {
            coeffs[d - power] = c;
        }
        Ok(PolySpec::new(p, &coeffs))
    }
}

fn parse_term(term: &str, p: u64) -> Result<(u64, usize), PolyError> {
    let bad = || PolyError::Parse(format!("bad term {term:?}"));
    if let Some(rest) = term.strip_suffix('X') {
        let rest = rest.trim().trim_end_matches('*').trim();
        let c = if rest.is_empty() {
            1
        } else {
            rest.parse::<u64>().map_err(|_| bad())? % p
        };
        return Ok((c, 1));
    }
    if let Some((head, pow)) = term.split_once("X^") {
        let power: usize = pow.trim().parse().map_err(|_| bad())?;
        let head = head.trim().trim_end_matches('*').trim();
        let c = if head.is_empty() {
            1
        } else {
            head.parse::<u64>().map_err(|_| bad())? % p
        };
        return Ok((c, power));
    }
    let c = term.parse::<u64>().map_err(|_| bad())? % p;
    Ok((c, 0))
}

/// Evaluation outcome of a rational function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalOutcome {
    Value(u64),
    Pole,
}

/// A rational function `r = f / g` with coprime `f, g` over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSpec {
    numerator: PolySpec,
    denominator: PolySpec,
}

impl RationalSpec {
    pub fn new(numerator: PolySpec, denominator: PolySpec) -> Result<Self, PolyError> {
        assert_eq!(numerator.p(), denominator.p());
        if denominator.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        let g = PolySpec::gcd(&numerator, &denominator);
        if g.degree() > 0 {
            return Err(PolyError::NotCoprime);
        }
        Ok(RationalSpec {
            numerator,
            denominator,
        })
    }

    /// Wraps a polynomial as `f / 1`.
    pub fn from_poly(f: PolySpec) -> Self {
        let p = f.p();
        RationalSpec {
            numerator: f,
            denominator: PolySpec::constant(p, 1),
        }
    }

    pub fn p(&self) -> u64 {
        self.numerator.p()
    }

    pub fn numerator(&self) -> &PolySpec {
        &self.numerator
    }

    pub fn denominator(&self) -> &PolySpec {
        &self.denominator
    }

    pub fn is_poly(&self) -> bool {
        self.denominator.degree() == 0
    }

    /// `f(x) * g(x)^(-1)`, or `Pole` when the denominator vanishes.
    pub fn eval(&self, x: u64) -> EvalOutcome {
        let g = self.denominator.eval(x);
        if g == 0 {
            return EvalOutcome::Pole;
        }
        let f = self.numerator.eval(x);
        EvalOutcome::Value(mul_mod(f, inv_mod(g, self.p()), self.p()))
    }
}

/// The conic `f(X) - λ f(Y)` over `F_p`, stored as the six coefficients of
/// `A X^2 + B X Y + C Y^2 + D X + E Y + F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConicModP {
    p: u64,
    /// `[A, B, C, D, E, F]`, residues mod `p`.
    pub coeffs: [u64; 6],
}

impl ConicModP {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn eval(&self, x: u64, y: u64) -> u64 {
        let p = self.p;
        let [a, b, c, d, e, f] = self.coeffs;
        let mut acc = mul_mod(a, mul_mod(x, x, p), p);
        acc = add_mod(acc, mul_mod(b, mul_mod(x, y, p), p), p);
        acc = add_mod(acc, mul_mod(c, mul_mod(y, y, p), p), p);
        acc = add_mod(acc, mul_mod(d, x, p), p);
        acc = add_mod(acc, mul_mod(e, y, p), p);
        add_mod(acc, f, p)
    }

    /// Determinant of `[[2A, B, D], [B, 2C, E], [D, E, 2F]]` mod `p`.
    pub fn det3_mod(&self) -> u64 {
        let p = self.p;
        let [a, b, c, d, e, f] = self.coeffs;
        let two = 2 % p;
        let (a2, c2, f2) = (mul_mod(two, a, p), mul_mod(two, c, p), mul_mod(two, f, p));
        // 2A(2C·2F - E²) - B(B·2F - E·D) + D(B·E - 2C·D)
        let m1 = mul_mod(a2, sub_mod(mul_mod(c2, f2, p), mul_mod(e, e, p), p), p);
        let m2 = mul_mod(b, sub_mod(mul_mod(b, f2, p), mul_mod(e, d, p), p), p);
        let m3 = mul_mod(d, sub_mod(mul_mod(b, e, p), mul_mod(c2, d, p), p), p);
        add_mod(sub_mod(m1, m2, p), m3, p)
    }
}

/// Builds `Q_λ(X,Y) = f(X) - λ f(Y)` for quadratic `f = a0 X^2 + a1 X + a2`:
/// coefficients `(a0, 0, -λ a0, a1, -λ a1, a2 (1 - λ))` reduced mod `p`.
pub fn build_q_lambda(f: &PolySpec, lambda: u64) -> Result<ConicModP, PolyError> {
    let p = f.p();
    if f.degree() != 2 {
        return Err(PolyError::WrongDegree {
            expected: 2,
            got: f.degree(),
        });
    }
    if lambda % p == 0 {
        return Err(PolyError::ZeroLambda);
    }
    let lambda = lambda % p;
    let [a0, a1, a2] = [f.coeffs()[0], f.coeffs()[1], f.coeffs()[2]];
    let neg = |x: u64| sub_mod(0, x, p);
    Ok(ConicModP {
        p,
        coeffs: [
            a0,
            0,
            neg(mul_mod(lambda, a0, p)),
            a1,
            neg(mul_mod(lambda, a1, p)),
            mul_mod(a2, sub_mod(1, lambda, p), p),
        ],
    })
}

/// A monomial exponent vector ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over the integers with arbitrary
/// precision coefficients. Zero coefficients are pruned eagerly, so the
/// zero polynomial is the empty map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPolyZ {
    vars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl MultiPolyZ {
    pub fn zero(vars: usize) -> Self {
        MultiPolyZ {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: BigInt) -> Self {
        let mut out = Self::zero(vars);
        out.add_term(vec![0; vars], c);
        out
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: BigInt) {
        assert_eq!(exponents.len(), self.vars);
        if c.is_zero() {
            return;
        }
        let key = Monomial(exponents);
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPolyZ) -> MultiPolyZ {
        assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.0.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPolyZ) -> MultiPolyZ {
        assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.0.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &MultiPolyZ) -> MultiPolyZ {
        assert_eq!(self.vars, other.vars);
        let mut out = MultiPolyZ::zero(self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let exps: Vec<u32> = m1.0.iter().zip(&m2.0).map(|(a, b)| a + b).collect();
                out.add_term(exps, c1 * c2);
            }
        }
        out
    }

    /// Evaluates at the residue vector `values` modulo `p`.
    pub fn eval_mod(&self, values: &[u64], p: u64) -> u64 {
        assert_eq!(values.len(), self.vars);
        let bp = BigInt::from(p);
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in values.iter().zip(&m.0) {
                if e > 0 {
                    term *= BigInt::from(pow_mod(*v, e as u64, p));
                }
            }
            acc += term;
        }
        let r = acc % &bp;
        let r = if r.is_negative() { r + &bp } else { r };
        u64::try_from(r).unwrap()
    }
}

/// Builds the product-difference polynomial in `Z_1, ..., Z_d`:
///
/// `prod_i (x_i^d + sum_{k=0}^{d-1} Z_{d-k} x_i^k)
///  - prod_i (y_i^d + sum_{k=0}^{d-1} Z_{d-k} y_i^k)`.
///
/// Entries of `x` and `y` are positive integers; coefficients are exact.
pub fn build_pxy(x: &[u64], y: &[u64], d: usize) -> Result<MultiPolyZ, PolyError> {
    if x.is_empty() || y.is_empty() {
        return Err(PolyError::EmptyVector);
    }
    if x.len() != y.len() {
        return Err(PolyError::MismatchedLengths(x.len(), y.len()));
    }
    assert!(d >= 1);
    let product = |entries: &[u64]| -> MultiPolyZ {
        let mut acc = MultiPolyZ::constant(d, BigInt::one());
        for &e in entries {
            let mut factor = MultiPolyZ::zero(d);
            let e = BigInt::from(e);
            // Constant term e^d.
            factor.add_term(vec![0; d], pow_big(&e, d));
            // Z_{d-k} carries coefficient e^k; variable Z_j is index j-1.
            for k in 0..d {
                let mut exps = vec![0u32; d];
                exps[d - k - 1] = 1;
                factor.add_term(exps, pow_big(&e, k));
            }
            acc = acc.mul(&factor);
        }
        acc
    };
    Ok(product(x).sub(&product(y)))
}

fn pow_big(base: &BigInt, exp: usize) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let r = RationalSpec::new(PolySpec::new(7, &[1, 1]), PolySpec::new(7, &[1, 2])).unwrap();
        assert_eq!(r.eval(5), EvalOutcome::Pole);
        let f = RationalSpec::from_poly(PolySpec::new(7, &[1, 0, 1]));
        assert_eq!(f.eval(3), EvalOutcome::Value(3));
        let id = RationalSpec::from_poly(PolySpec::new(7, &[1, 0]));
        assert_eq!(id.eval(5), EvalOutcome::Value(5));
    }

    #[test]
    fn square_free_examples() {
        assert!(PolySpec::new(7, &[1, 0, 1]).is_square_free().unwrap());
        assert!(!PolySpec::new(7, &[1, 2, 1]).is_square_free().unwrap());
        assert!(PolySpec::new(7, &[1, 3]).is_square_free().unwrap());
        assert_eq!(
            PolySpec::constant(7, 3).is_square_free(),
            Err(PolyError::DegreeTooSmall)
        );
    }

    #[test]
    fn square_free_matches_root_multiplicity_small_primes() {
        // Brute force: a monic quadratic has a repeated factor iff it has a
        // double root, i.e. some r with f(r) = 0 and f'(r) = 0.
        for p in (3..50u64).filter(|&p| crate::field::is_prime(p)) {
            for a1 in 0..p {
                for a2 in 0..p {
                    let f = PolySpec::new(p, &[1, a1, a2]);
                    let fd = f.derivative();
                    let has_double_root = (0..p).any(|r| f.eval(r) == 0 && fd.eval(r) == 0);
                    assert_eq!(f.is_square_free().unwrap(), !has_double_root, "p={p} f={f}");
                }
            }
        }
    }

    #[test]
    fn q_lambda_examples() {
        let q = build_q_lambda(&PolySpec::new(7, &[1, 1, 1]), 2).unwrap();
        assert_eq!(q.coeffs, [1, 0, 5, 1, 5, 6]);
        let q = build_q_lambda(&PolySpec::new(5, &[1, 0, 0]), 1).unwrap();
        assert_eq!(q.coeffs, [1, 0, 4, 0, 0, 0]);
        let q = build_q_lambda(&PolySpec::new(11, &[1, 0, 3]), 3).unwrap();
        assert_eq!(q.coeffs, [1, 0, 8, 0, 0, 5]);
    }

    #[test]
    fn q_lambda_errors() {
        assert_eq!(
            build_q_lambda(&PolySpec::new(7, &[1, 1]), 2),
            Err(PolyError::WrongDegree {
                expected: 2,
                got: 1
            })
        );
        assert_eq!(
            build_q_lambda(&PolySpec::new(7, &[1, 1, 1]), 0),
            Err(PolyError::ZeroLambda)
        );
    }

    #[test]
    fn q_lambda_matches_defining_identity_exhaustive() {
        for p in (3..50u64).filter(|&p| crate::field::is_prime(p)) {
            for (a0, a1, a2, lambda) in [(1, 2, 3, 2), (3, 0, 1, p - 1), (2, 5 % p, 1, 1)] {
                let f = PolySpec::new(p, &[a0, a1, a2]);
                if f.degree() != 2 {
                    continue;
                }
                let q = build_q_lambda(&f, lambda).unwrap();
                for x in 0..p {
                    for y in 0..p {
                        let want = sub_mod(f.eval(x), mul_mod(lambda % p, f.eval(y), p), p);
                        assert_eq!(q.eval(x, y), want);
                    }
                }
            }
        }
    }

    #[test]
    fn pxy_hand_examples() {
        // nu=1, d=1, x=(4), y=(9): constant -5.
        let q = build_pxy(&[4], &[9], 1).unwrap();
        assert_eq!(q.terms().len(), 1);
        assert_eq!(q.terms()[&Monomial(vec![0])], BigInt::from(-5));

        // Permutation gives the zero polynomial.
        assert!(build_pxy(&[1, 2], &[2, 1], 1).unwrap().is_zero());

        // (1+Z1)(2+Z1) - (1+Z1)(3+Z1) = -Z1 - 1.
        let q = build_pxy(&[1, 2], &[1, 3], 1).unwrap();
        assert_eq!(q.terms()[&Monomial(vec![0])], BigInt::from(-1));
        assert_eq!(q.terms()[&Monomial(vec![1])], BigInt::from(-1));
        assert_eq!(q.terms().len(), 2);
    }

    #[test]
    fn pxy_total_degree_bounded_by_nu() {
        let q = build_pxy(&[3, 7, 9], &[2, 2, 8], 3).unwrap();
        assert!(q.total_degree() <= 3);
    }

    #[test]
    fn pxy_errors() {
        assert_eq!(build_pxy(&[], &[], 1), Err(PolyError::EmptyVector));
        assert_eq!(
            build_pxy(&[1], &[1, 2], 1),
            Err(PolyError::MismatchedLengths(1, 2))
        );
    }

    #[test]
    fn display_parse_round_trip() {
        for coeffs in [vec![1u64, 0, 1], vec![2, 3], vec![0], vec![5], vec![1, 6, 0, 4]] {
            let f = PolySpec::new(7, &coeffs);
            let back: PolySpec = f.to_string().parse().unwrap();
            assert_eq!(back, f, "round trip through {:?}", f.to_string());
        }
    }

    #[test]
    fn rational_invariants() {
        assert_eq!(
            RationalSpec::new(PolySpec::new(7, &[1, 1]), PolySpec::zero(7)),
            Err(PolyError::ZeroDenominator)
        );
        // (X+1)^2 / (X+1) is not coprime.
        assert_eq!(
            RationalSpec::new(PolySpec::new(7, &[1, 2, 1]), PolySpec::new(7, &[1, 1])),
            Err(PolyError::NotCoprime)
        );
    }

    #[test]
    fn gcd_monic_and_correct() {
        let p = 13;
        // (X+2)(X+5) and (X+2)(X+7) share X+2.
        let a = PolySpec::new(p, &[1, 7, 10]);
        let b = PolySpec::new(p, &[1, 9, 1]);
        assert_eq!(PolySpec::gcd(&a, &b), PolySpec::new(p, &[1, 2]));
    }
}
