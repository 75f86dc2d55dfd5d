//! Coefficient fields: the rationals and prime fields of arbitrary size.
//!
//! Coefficients are always stored as [`BigRational`]. Over a prime field the
//! stored value is an integer in `0..p`; every arithmetic helper here returns
//! values already reduced for the field it was called on.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Coefficient type shared by all polynomials.
pub type Coeff = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(BigUint),
    #[error("division by zero in {0}")]
    DivisionByZero(Field),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(BigUint),
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Field {
    /// Prime field `F_p`; `p` is checked for primality.
    pub fn prime(p: impl Into<BigUint>) -> Result<Field, FieldError> {
        let p = p.into();
        if is_prime(&p) {
            Ok(Field::Prime(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    /// `0` for the rationals, `p` for `F_p`.
    pub fn characteristic(&self) -> BigUint {
        match self {
            Field::Rationals => BigUint::zero(),
            Field::Prime(p) => p.clone(),
        }
    }

    /// Field of characteristic `c` (`0` means the rationals).
    pub fn from_characteristic(c: u64) -> Result<Field, FieldError> {
        if c == 0 {
            Ok(Field::Rationals)
        } else {
            Field::prime(BigUint::from(c))
        }
    }

    /// True when the integer `m` is zero in this field.
    pub fn divides(&self, m: u64) -> bool {
        match self {
            Field::Rationals => m == 0,
            Field::Prime(p) => (BigUint::from(m) % p).is_zero(),
        }
    }

    pub fn normalize(&self, c: &Coeff) -> Result<Coeff, FieldError> {
        match self {
            Field::Rationals => Ok(c.clone()),
            Field::Prime(p) => {
                let p = BigInt::from_biguint(Sign::Plus, p.clone());
                let den = c.denom().mod_floor(&p);
                if den.is_zero() {
                    return Err(FieldError::DivisionByZero(self.clone()));
                }
                let inv = mod_inverse(&den, &p).expect("p is prime");
                let v = (c.numer().mod_floor(&p) * inv).mod_floor(&p);
                Ok(BigRational::from_integer(v))
            }
        }
    }

    pub fn from_int(&self, v: i64) -> Coeff {
        self.normalize(&BigRational::from_integer(BigInt::from(v)))
            .expect("integers have unit denominators")
    }

    pub fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match self {
            Field::Rationals => a + b,
            Field::Prime(p) => reduce_int(a.numer() + b.numer(), p),
        }
    }

    pub fn sub(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match self {
            Field::Rationals => a - b,
            Field::Prime(p) => reduce_int(a.numer() - b.numer(), p),
        }
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match self {
            Field::Rationals => a * b,
            Field::Prime(p) => reduce_int(a.numer() * b.numer(), p),
        }
    }

    pub fn neg(&self, a: &Coeff) -> Coeff {
        match self {
            Field::Rationals => -a,
            Field::Prime(p) => reduce_int(-a.numer(), p),
        }
    }

    pub fn inv(&self, a: &Coeff) -> Result<Coeff, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero(self.clone()));
        }
        match self {
            Field::Rationals => Ok(a.recip()),
            Field::Prime(p) => {
                let p = BigInt::from_biguint(Sign::Plus, p.clone());
                let inv = mod_inverse(a.numer(), &p).expect("nonzero residue");
                Ok(BigRational::from_integer(inv))
            }
        }
    }

    pub fn pow(&self, a: &Coeff, e: u32) -> Coeff {
        match self {
            Field::Rationals => num_traits::pow(a.clone(), e as usize),
            Field::Prime(p) => {
                let p = BigInt::from_biguint(Sign::Plus, p.clone());
                BigRational::from_integer(a.numer().modpow(&BigInt::from(e), &p))
            }
        }
    }

    /// Canonical `m`-th root of a constant, if one exists in the field.
    ///
    /// Over `Q` the real root is returned (positive for even `m`). Over `F_p`
    /// the least residue among all `m`-th roots is returned.
    pub fn nth_root(&self, a: &Coeff, m: u32) -> Option<Coeff> {
        if a.is_zero() {
            return Some(a.clone());
        }
        match self {
            Field::Rationals => {
                let neg = a.is_negative();
                if neg && m.is_multiple_of(2) {
                    return None;
                }
                let num = a.numer().abs();
                let den = a.denom().clone();
                let rn = num.nth_root(m);
                let rd = den.nth_root(m);
                if pow_eq(&rn, m, &num) && pow_eq(&rd, m, &den) {
                    let r = BigRational::new(rn, rd);
                    Some(if neg { -r } else { r })
                } else {
                    None
                }
            }
            Field::Prime(p) => {
                let a = a.numer().to_biguint().expect("reduced residue");
                nth_root_mod_prime(&a, m, p).map(|r| BigRational::from_integer(r.into()))
            }
        }
    }

    /// Element as a residue modulo `q`, for coefficients living in a field
    /// whose reduction modulo the prime `q` makes sense.
    pub fn reduce_mod(&self, c: &Coeff, q: u64) -> Option<u64> {
        let qb = BigInt::from(q);
        match self {
            Field::Prime(p) if p != &BigUint::from(q) => None,
            _ => {
                let den = c.denom().mod_floor(&qb);
                if den.is_zero() {
                    return None;
                }
                let inv = mod_inverse(&den, &qb)?;
                (c.numer().mod_floor(&qb) * inv).mod_floor(&qb).to_u64()
            }
        }
    }
}

fn pow_eq(r: &BigInt, m: u32, target: &BigInt) -> bool {
    &num_traits::pow(r.clone(), m as usize) == target
}

fn reduce_int(v: BigInt, p: &BigUint) -> Coeff {
    let p = BigInt::from_biguint(Sign::Plus, p.clone());
    BigRational::from_integer(v.mod_floor(&p))
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

const SMALL_PRIMES: [u32; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

/// Miller-Rabin with the first fifteen prime bases. Deterministic for every
/// input below 3.1e23 and a strong probable-prime test above that.
pub fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &sp in SMALL_PRIMES.iter() {
        let sp = BigUint::from(sp);
        if n == &sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'bases: for &b in SMALL_PRIMES.iter() {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

pub fn is_prime_u64(n: u64) -> bool {
    is_prime(&BigUint::from(n))
}

/// All `m`-th roots of `a` modulo the prime `p`, least residue first is
/// returned; `None` when `a` is not an `m`-th power.
pub fn nth_root_mod_prime(a: &BigUint, m: u32, p: &BigUint) -> Option<BigUint> {
    let a = a % p;
    if a.is_zero() {
        return Some(a);
    }
    if m == 0 {
        return if a.is_one() { Some(a) } else { None };
    }
    let one = BigUint::one();
    let pm1 = p - &one;
    let mb = BigUint::from(m);
    let d = mb.gcd(&pm1);
    if a.modpow(&(&pm1 / &d), p) != one {
        return None;
    }
    // y^d = a, then x = y^u with u*m = d (mod p-1).
    let y = root_of_divisor_degree(&a, &d, p)?;
    let (u, _) = bezout(&BigInt::from(mb), &BigInt::from(pm1.clone()));
    let u = u
        .mod_floor(&BigInt::from(pm1.clone()))
        .to_biguint()
        .unwrap();
    let x = y.modpow(&u, p);
    debug_assert_eq!(x.modpow(&BigUint::from(m), p), a);
    let unity = roots_of_unity(&d, p);
    unity.iter().map(|z| (&x * z) % p).min()
}

fn bezout(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.x, e.y)
}

fn small_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        while n.is_multiple_of(f) {
            out.push(f);
            n /= f;
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// d divides p - 1 and a is a d-th power residue.
fn root_of_divisor_degree(a: &BigUint, d: &BigUint, p: &BigUint) -> Option<BigUint> {
    let d64 = d.to_u64()?;
    let mut cur = a.clone();
    let mut remaining = d64;
    for r in small_factors(d64) {
        remaining /= r;
        let candidates = prime_degree_roots(&cur, r, p)?;
        let rem = BigUint::from(remaining);
        let pm1 = p - BigUint::one();
        let exp = &pm1 / rem.gcd(&pm1);
        cur = candidates
            .into_iter()
            .find(|y| y.modpow(&exp, p).is_one())?;
    }
    Some(cur)
}

// All r-th roots of a modulo p, where r is prime, r | p - 1 and a is an r-th residue.
fn prime_degree_roots(a: &BigUint, r: u64, p: &BigUint) -> Option<Vec<BigUint>> {
    let one = BigUint::one();
    let pm1 = p - &one;
    let rb = BigUint::from(r);
    let mut e = 0u32;
    let mut s = pm1.clone();
    while (&s % &rb).is_zero() {
        s /= &rb;
        e += 1;
    }
    // non r-th residue
    let mut z = BigUint::from(2u32);
    let test = &pm1 / &rb;
    while z.modpow(&test, p).is_one() {
        z += 1u32;
    }
    let g = z.modpow(&s, p); // order r^e
    let inv_r = if s.is_one() {
        BigUint::zero()
    } else {
        let i = mod_inverse(&BigInt::from(r), &BigInt::from(s.clone()))?;
        i.to_biguint().unwrap()
    };
    let x0 = a.modpow(&inv_r, p);
    // w^r must equal a / x0^r, an element of the r-Sylow subgroup
    let x0r = x0.modpow(&rb, p);
    let x0r_inv = mod_inverse(&BigInt::from(x0r), &BigInt::from(p.clone()))?
        .to_biguint()
        .unwrap();
    let target = (a * x0r_inv) % p;
    let log = sylow_log(&target, &g, r, e, p)?;
    if log % r != 0 {
        return None;
    }
    let w = g.modpow(&BigUint::from(log / r), p);
    let root = (x0 * w) % p;
    let gamma = g.modpow(&rb.pow(e - 1), p);
    let mut out = Vec::with_capacity(r as usize);
    let mut zeta = BigUint::one();
    for _ in 0..r {
        out.push((&root * &zeta) % p);
        zeta = (zeta * &gamma) % p;
    }
    Some(out)
}

// Discrete log of h to base g in a cyclic group of order r^e (Pohlig-Hellman).
fn sylow_log(h: &BigUint, g: &BigUint, r: u64, e: u32, p: &BigUint) -> Option<u64> {
    let rb = BigUint::from(r);
    let gamma = g.modpow(&rb.pow(e.saturating_sub(1)), p);
    let g_inv = mod_inverse(&BigInt::from(g.clone()), &BigInt::from(p.clone()))?
        .to_biguint()
        .unwrap();
    let mut log: u64 = 0;
    let mut rpow: u64 = 1;
    for i in 0..e {
        let c = (h * g_inv.modpow(&BigUint::from(log), p)) % p;
        let hk = c.modpow(&rb.pow(e - 1 - i), p);
        let mut acc = BigUint::one();
        let mut digit = None;
        for l in 0..r {
            if acc == hk {
                digit = Some(l);
                break;
            }
            acc = (acc * &gamma) % p;
        }
        log += digit? * rpow;
        rpow = rpow.checked_mul(r)?;
    }
    Some(log)
}

// The d-th roots of unity in F_p for d | p - 1.
fn roots_of_unity(d: &BigUint, p: &BigUint) -> Vec<BigUint> {
    let one = BigUint::one();
    let d64 = d.to_u64().unwrap_or(1) as usize;
    let pm1 = p - &one;
    let cof = &pm1 / d;
    let mut set = std::collections::BTreeSet::new();
    set.insert(one.clone());
    let mut base = BigUint::from(2u32);
    while set.len() < d64 && base < *p {
        let h = base.modpow(&cof, p);
        let snapshot: Vec<_> = set.iter().cloned().collect();
        let mut pw = h.clone();
        while !pw.is_one() {
            for s in &snapshot {
                set.insert((s * &pw) % p);
            }
            pw = (pw * &h) % p;
        }
        base += 1u32;
    }
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u32) -> Field {
        Field::prime(BigUint::from(p)).unwrap()
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..200).filter(|&n| is_prime_u64(n)).collect();
        let naive: Vec<u64> = (0..200u64)
            .filter(|&n| n >= 2 && (2..n).all(|d| n % d != 0))
            .collect();
        assert_eq!(primes, naive);
        assert!(is_prime(
            &"170141183460469231731687303715884105727".parse().unwrap()
        ));
        assert!(!is_prime(
            &"170141183460469231731687303715884105729".parse().unwrap()
        ));
        assert!(Field::prime(BigUint::from(9u32)).is_err());
    }

    #[test]
    fn prime_field_normalizes_fractions() {
        let f = fp(5);
        let c = f.normalize(&BigRational::new(2.into(), 3.into())).unwrap();
        // 3 * 4 = 12 = 2 mod 5
        assert_eq!(c, BigRational::from_integer(4.into()));
        assert!(f.normalize(&BigRational::new(1.into(), 10.into())).is_err());
    }

    #[test]
    fn modular_roots_match_brute_force() {
        for p in [2u32, 3, 5, 7, 11, 13, 17, 31, 37, 41, 73, 97] {
            let f = fp(p);
            for m in 1..=7u32 {
                for a in 0..p {
                    let brute: Vec<u32> = (0..p)
                        .filter(|x| (*x as u64).pow(m) % p as u64 == a as u64)
                        .collect();
                    let got = f.nth_root(&BigRational::from_integer(a.into()), m);
                    let expected = brute
                        .first()
                        .map(|x| BigRational::from_integer((*x).into()));
                    assert_eq!(got, expected, "p={p} m={m} a={a}");
                }
            }
        }
    }

    #[test]
    fn rational_roots() {
        let q = Field::Rationals;
        let c = BigRational::new(8.into(), 27.into());
        assert_eq!(
            q.nth_root(&c, 3),
            Some(BigRational::new(2.into(), 3.into()))
        );
        assert_eq!(
            q.nth_root(&-c.clone(), 3),
            Some(BigRational::new((-2).into(), 3.into()))
        );
        assert_eq!(q.nth_root(&-c, 2), None);
        assert_eq!(q.nth_root(&BigRational::from_integer(2.into()), 2), None);
    }
}
