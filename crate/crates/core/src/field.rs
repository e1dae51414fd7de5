//! Prime field arithmetic, factorization of the group order `p - 1`, and
//! the multiplicative subgroups of `F_p^*`.
//!
//! The modulus is capped at `2^62` so that every intermediate product fits
//! in 128 bits. Within that range primality testing is deterministic and
//! factorization of `p - 1` uses trial division followed by Brent's cycle
//! method with fixed parameters, so identical inputs always produce
//! identical contexts.

use thiserror::Error;

/// Exclusive upper bound on the modulus; keeps `a * b` within `u128`.
pub const MAX_PRIME: u64 = 1 << 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus must satisfy 3 <= p < 2^62, got {0}")]
    OutOfRange(u64),
    #[error("{order} does not divide p - 1 = {totient}")]
    NotADivisor { order: u64, totient: u64 },
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

/// Square-and-multiply exponentiation modulo `p`.
pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    base %= p;
    let mut acc: u64 = 1 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo the prime `p`, via Fermat's little theorem.
///
/// # Panics
///
/// Panics if `a ≡ 0 (mod p)`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "zero has no inverse mod {p}");
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin primality test, valid for all `n < 2^64`.
///
/// The witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is known to
/// be sufficient for the full 64-bit range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of the rho cycle method. Parameters are fixed, so the
/// factor found for a given `n` never varies between runs.
fn brent_rho(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime(n) && n % 2 == 1);
    for c in 1..64u64 {
        let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
        let mut x;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut q = 1u64;
        let m = 128u64;
        let mut r = 1u64;
        'outer: while d == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0u64;
            while k < r && d == 1 {
                let ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                d = gcd(q, n);
                if d == n {
                    // Backtrack one step at a time from the saved point.
                    y = ys;
                    loop {
                        y = f(y);
                        d = gcd(x.abs_diff(y), n);
                        if d > 1 {
                            break;
                        }
                    }
                    break 'outer;
                }
                k += m;
            }
            r *= 2;
        }
        if d > 1 && d < n {
            return d;
        }
    }
    unreachable!("rho failed on {n} with all tried increments");
}

/// Full factorization of `n` as sorted `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    for q in 2..10_000u64 {
        if q * q > n {
            break;
        }
        if n % q == 0 {
            let mut e = 0;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
    }
    // Remaining cofactor has no prime factor below 10^4.
    let mut stack = Vec::new();
    if n > 1 {
        stack.push(n);
    }
    let mut large: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if is_prime(m) {
            large.push(m);
        } else {
            let d = brent_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    large.sort_unstable();
    let mut i = 0;
    while i < large.len() {
        let p = large[i];
        let mut e = 0u32;
        while i < large.len() && large[i] == p {
            e += 1;
            i += 1;
        }
        out.push((p, e));
    }
    out.sort_unstable();
    out
}

/// All divisors of the integer described by `factors`, sorted ascending.
pub fn divisors_from_factorization(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(q, e) in factors {
        let prev = divs.clone();
        let mut power = 1u64;
        for _ in 0..e {
            power *= q;
            for d in &prev {
                divs.push(d * power);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// A prime `p` together with the factorization of `p - 1` and the full
/// divisor list, i.e. every admissible subgroup order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldContext {
    p: u64,
    totient_factorization: Vec<(u64, u32)>,
    divisors: Vec<u64>,
    least_primitive_root: u64,
}

impl FieldContext {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 3 || p >= MAX_PRIME {
            return Err(FieldError::OutOfRange(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let totient_factorization = factorize(p - 1);
        let divisors = divisors_from_factorization(&totient_factorization);
        let least_primitive_root = least_primitive_root(p, &totient_factorization);
        Ok(FieldContext {
            p,
            totient_factorization,
            divisors,
            least_primitive_root,
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn totient_factorization(&self) -> &[(u64, u32)] {
        &self.totient_factorization
    }

    /// All divisors of `p - 1`, ascending; these are exactly the orders of
    /// the multiplicative subgroups of `F_p^*`.
    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    /// Least primitive root of `p`, found by ascending search.
    pub fn primitive_root(&self) -> u64 {
        self.least_primitive_root
    }

    /// The unique subgroup of order `order`, which must divide `p - 1`.
    pub fn subgroup(&self, order: u64) -> Result<SubgroupSpec, FieldError> {
        if order == 0 || (self.p - 1) % order != 0 {
            return Err(FieldError::NotADivisor {
                order,
                totient: self.p - 1,
            });
        }
        let membership_exponent = (self.p - 1) / order;
        let generator = pow_mod(self.least_primitive_root, membership_exponent, self.p);
        Ok(SubgroupSpec {
            p: self.p,
            order,
            generator,
            membership_exponent,
        })
    }
}

fn least_primitive_root(p: u64, factors: &[(u64, u32)]) -> u64 {
    'candidate: for g in 2..p {
        for &(q, _) in factors {
            if pow_mod(g, (p - 1) / q, p) == 1 {
                continue 'candidate;
            }
        }
        return g;
    }
    // p = 3 has root 2, caught above; p >= 3 always has a primitive root.
    unreachable!("no primitive root found for prime {p}")
}

/// The subgroup of `F_p^*` of order `order`: membership is `x^order ≡ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupSpec {
    p: u64,
    order: u64,
    generator: u64,
    membership_exponent: u64,
}

impl SubgroupSpec {
    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn order(&self) -> u64 {
        self.order
    }

    /// An element of multiplicative order exactly `order`.
    #[inline]
    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// `(p - 1) / order`; `x` is a member iff `x` is a power of
    /// `g^membership_exponent` for a primitive root `g`.
    #[inline]
    pub fn membership_exponent(&self) -> u64 {
        self.membership_exponent
    }

    /// Membership test: `x != 0` and `x^order ≡ 1 (mod p)`.
    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        x % self.p != 0 && pow_mod(x, self.order, self.p) == 1
    }

    /// Enumerates all `order` members as successive generator powers.
    /// Intended for desk-scale orders; allocates `order` entries.
    pub fn members(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.order as usize);
        let mut x = 1u64;
        loop {
            out.push(x);
            x = mul_mod(x, self.generator, self.p);
            if x == 1 {
                break;
            }
        }
        out
    }

    /// Membership bitmap indexed by residue; only for moduli small enough
    /// to hold the table in memory.
    pub(crate) fn member_table(&self) -> Vec<bool> {
        let mut table = vec![false; self.p as usize];
        let mut x = 1u64;
        loop {
            table[x as usize] = true;
            x = mul_mod(x, self.generator, self.p);
            if x == 1 {
                break;
            }
        }
        table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_p13() {
        let ctx = FieldContext::new(13).unwrap();
        assert_eq!(ctx.totient_factorization(), &[(2, 2), (3, 1)]);
        assert_eq!(ctx.divisors(), &[1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn context_p7() {
        let ctx = FieldContext::new(7).unwrap();
        assert_eq!(ctx.divisors(), &[1, 2, 3, 6]);
    }

    #[test]
    fn composite_rejected() {
        assert_eq!(FieldContext::new(15).unwrap_err(), FieldError::NotPrime(15));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(
            FieldContext::new(2),
            Err(FieldError::OutOfRange(2))
        ));
        assert!(matches!(
            FieldContext::new(MAX_PRIME),
            Err(FieldError::OutOfRange(_))
        ));
    }

    #[test]
    fn subgroup_members_p13_t4() {
        let ctx = FieldContext::new(13).unwrap();
        let g = ctx.subgroup(4).unwrap();
        let mut members = g.members();
        members.sort_unstable();
        assert_eq!(members, vec![1, 5, 8, 12]);
        // 2 is the least primitive root of 13 and the generator is 2^3 = 8.
        assert_eq!(ctx.primitive_root(), 2);
        assert_eq!(g.generator(), 8);
    }

    #[test]
    fn trivial_subgroup() {
        let ctx = FieldContext::new(7).unwrap();
        let g = ctx.subgroup(1).unwrap();
        assert_eq!(g.members(), vec![1]);
    }

    #[test]
    fn non_divisor_rejected() {
        let ctx = FieldContext::new(7).unwrap();
        assert_eq!(
            ctx.subgroup(4).unwrap_err(),
            FieldError::NotADivisor {
                order: 4,
                totient: 6
            }
        );
    }

    #[test]
    fn contains_examples() {
        let ctx = FieldContext::new(13).unwrap();
        let g4 = ctx.subgroup(4).unwrap();
        assert!(g4.contains(12));
        assert!(!g4.contains(0));
        let g12 = ctx.subgroup(12).unwrap();
        assert!(g12.contains(5));
    }

    #[test]
    fn subgroup_structure_exhaustive_small_primes() {
        for p in (3..100u64).filter(|&p| is_prime(p)) {
            let ctx = FieldContext::new(p).unwrap();
            let product: u64 = ctx
                .totient_factorization()
                .iter()
                .map(|&(q, e)| q.pow(e))
                .product();
            assert_eq!(product, p - 1);
            let expected_len: usize = ctx
                .totient_factorization()
                .iter()
                .map(|&(_, e)| e as usize + 1)
                .product();
            assert_eq!(ctx.divisors().len(), expected_len);
            assert_eq!(*ctx.divisors().first().unwrap(), 1);
            assert_eq!(*ctx.divisors().last().unwrap(), p - 1);

            for &t in ctx.divisors() {
                let g = ctx.subgroup(t).unwrap();
                let members = g.members();
                assert_eq!(members.len() as u64, t);
                // Closure under multiplication.
                let set: std::collections::HashSet<u64> = members.iter().copied().collect();
                for &a in &members {
                    for &b in &members {
                        assert!(set.contains(&mul_mod(a, b, p)));
                    }
                }
                // contains agrees with the enumerated list.
                for x in 0..p {
                    assert_eq!(g.contains(x), set.contains(&x), "p={p} T={t} x={x}");
                }
                // Generator order is exactly t.
                assert_eq!(pow_mod(g.generator(), t, p), 1);
                for &(q, _) in factorize(t).iter() {
                    assert_ne!(pow_mod(g.generator(), t / q, p), 1);
                }
            }

            // Nesting by divisibility.
            for &t1 in ctx.divisors() {
                for &t2 in ctx.divisors() {
                    if t2 % t1 == 0 {
                        let small: std::collections::HashSet<u64> =
                            ctx.subgroup(t1).unwrap().members().into_iter().collect();
                        let big: std::collections::HashSet<u64> =
                            ctx.subgroup(t2).unwrap().members().into_iter().collect();
                        assert!(small.is_subset(&big));
                    }
                }
            }
        }
    }

    #[test]
    fn factorize_large_semiprime() {
        // 1000003 * 1000033 has no factor below the trial division cutoff.
        let n = 1_000_003u64 * 1_000_033u64;
        assert_eq!(factorize(n), vec![(1_000_003, 1), (1_000_033, 1)]);
    }

    #[test]
    fn large_prime_context() {
        let p = 4_611_686_018_427_387_847; // largest prime below 2^62
        assert!(is_prime(p));
        let ctx = FieldContext::new(p).unwrap();
        let product: u64 = ctx
            .totient_factorization()
            .iter()
            .map(|&(q, e)| q.pow(e))
            .product();
        assert_eq!(product, p - 1);
    }
}
