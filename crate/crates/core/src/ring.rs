//! Coefficient arithmetic shared by the polynomial and series types.
//!
//! `Rational` is arbitrary precision and always in lowest terms with a
//! positive denominator; both invariants are maintained by the backing type.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Coefficient ring for the truncated series type. Implementors must be
/// honest commutative rings; `is_zero` must agree with equality to `zero`.
pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn from_bigint(n: &BigInt) -> Self;

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
}

impl Ring for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
}

impl Ring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn from_bigint(n: &BigInt) -> Self {
        n.clone()
    }
}

/// Convenience constructor used pervasively in tests.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// n! as a `BigInt`; n is small everywhere this is used.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::from(1);
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Largest exponent to which any prime divides `n` (0 for |n| = 1).
/// Plain trial division; denominators in this crate stay desk-sized.
pub fn max_prime_power(n: &BigInt) -> u32 {
    let mut n = n.abs();
    if Zero::is_zero(&n) {
        panic!("max_prime_power of zero");
    }
    let mut best = 0u32;
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if Zero::is_zero(&(&n % &p)) {
            let mut e = 0u32;
            while Zero::is_zero(&(&n % &p)) {
                n /= &p;
                e += 1;
            }
            best = best.max(e);
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if n > BigInt::from(1) {
        best = best.max(1);
    }
    best
}

/// True when every prime factor of `d` divides `k`; this is exactly the
/// condition "q with denominator d lies in Z[1/k]".
pub fn denominator_divides_power(d: &BigInt, k: i64) -> bool {
    let mut d = d.abs();
    if d.is_one() {
        return true;
    }
    if k == 0 {
        return false;
    }
    let k = BigInt::from(k.unsigned_abs());
    // Repeatedly strip gcd(d, k^∞): d is cleared iff all its primes divide k.
    loop {
        let g = num_integer::Integer::gcd(&d, &k);
        if g.is_one() {
            return d.is_one();
        }
        while Zero::is_zero(&(&d % &g)) {
            d /= &g;
        }
        if d.is_one() {
            return true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(factorial(10), BigInt::from(3_628_800));
    }

    #[test]
    fn prime_power_heights() {
        assert_eq!(max_prime_power(&BigInt::from(1)), 0);
        assert_eq!(max_prime_power(&BigInt::from(24)), 3); // 2^3 * 3
        assert_eq!(max_prime_power(&BigInt::from(6)), 1);
        assert_eq!(max_prime_power(&BigInt::from(720)), 4); // 2^4 * 3^2 * 5
        assert_eq!(max_prime_power(&BigInt::from(-9)), 2);
        assert_eq!(max_prime_power(&BigInt::from(1024)), 10);
    }

    #[test]
    fn z_inverted_k_membership() {
        // 1/24 ∈ Z[1/6] since 24 = 2^3·3 and both primes divide 6.
        assert!(denominator_divides_power(&BigInt::from(24), 6));
        assert!(!denominator_divides_power(&BigInt::from(24), 2));
        assert!(denominator_divides_power(&BigInt::from(1), 0));
        assert!(!denominator_divides_power(&BigInt::from(2), 3));
        assert!(denominator_divides_power(&BigInt::from(8), -2));
    }
}
