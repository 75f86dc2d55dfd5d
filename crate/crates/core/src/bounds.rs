//! Torsion-order arithmetic: the `d!` upper bound, certified divisors of
//! the torsion order of very general Fano hypersurfaces, cyclic-cover degree
//! thresholds and the dimension split `N = n + r`.
//!
//! Real-valued cutoffs are decided in integer arithmetic:
//! `m <= d - log2 N` becomes `N <= 2^(d-m)` and `log2(m+1) <= n` becomes
//! `m + 1 <= 2^n`.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::field::is_prime_u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("N must be at least 3, got {0}")]
    OutOfRange(u64),
    #[error("characteristic must be 0 or a prime, got {0}")]
    BadChar(u64),
    #[error("m must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("d must be at least 1")]
    BadDegree,
}

/// `N = n + r` with `2^(n-1) - 2 <= r <= 2^n - 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[allow(non_snake_case)]
pub struct DimensionSplit {
    pub N: u64,
    pub n: u64,
    pub r: u64,
}

#[allow(non_snake_case)]
pub fn dimension_split(N: u64) -> Result<DimensionSplit, BoundsError> {
    if N < 3 {
        return Err(BoundsError::OutOfRange(N));
    }
    let mut found = None;
    for n in 1..64u64 {
        if n > N {
            break;
        }
        let r = N - n;
        let lo = (1u128 << (n - 1)).saturating_sub(2);
        let hi = (1u128 << n) - 2;
        if lo <= r as u128 && r as u128 <= hi {
            assert!(found.is_none(), "split of {N} is not unique");
            found = Some(DimensionSplit { N, n, r });
        }
    }
    Ok(found.expect("every N >= 3 has a split"))
}

pub fn factorial_upper(d: u64) -> BigUint {
    (2..=d).fold(BigUint::one(), |acc, k| acc * k)
}

/// Which statement certifies that `m` divides the torsion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// `m <= d - log2 N`, `m` invertible.
    LogCutoff,
    /// `m <= d - n` for the dimension split, `m` invertible.
    SplitCutoff,
    /// Prime power `p^j` with `d >= p^j * ceil((N+2)/(p^j+1))`, `p` odd or
    /// `N` even; characteristic zero only.
    PrimePower,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::LogCutoff => "log-cutoff",
            Provenance::SplitCutoff => "split-cutoff",
            Provenance::PrimePower => "prime-power",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divisor {
    pub m: u64,
    pub provenance: Vec<Provenance>,
}

impl Divisor {
    pub fn has(&self, p: Provenance) -> bool {
        self.provenance.contains(&p)
    }
}

fn check_char(char: u64) -> Result<(), BoundsError> {
    if char == 0 || is_prime_u64(char) {
        Ok(())
    } else {
        Err(BoundsError::BadChar(char))
    }
}

/// `4 <= d <= N + 1`.
#[allow(non_snake_case)]
pub fn is_fano(N: u64, d: u64) -> bool {
    d >= 4 && d <= N + 1
}

// N <= 2^k
fn at_most_power_of_two(n: u64, k: u64) -> bool {
    k >= 64 || n <= 1u64 << k
}

/// Divisors `m >= 2` from the two cutoffs, each tagged with every cutoff
/// it satisfies. Empty outside the Fano range.
#[allow(non_snake_case)]
pub fn hypersurface_divisors(N: u64, d: u64, char: u64) -> Result<Vec<Divisor>, BoundsError> {
    check_char(char)?;
    let split = dimension_split(N)?;
    if !is_fano(N, d) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for m in 2..=d {
        if char != 0 && m % char == 0 {
            continue;
        }
        let mut provenance = Vec::new();
        if at_most_power_of_two(N, d - m) {
            provenance.push(Provenance::LogCutoff);
        }
        if m + split.n <= d {
            provenance.push(Provenance::SplitCutoff);
        }
        if !provenance.is_empty() {
            out.push(Divisor { m, provenance });
        }
    }
    Ok(out)
}

fn prime_power_base(q: u64) -> Option<u64> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|p| q.is_multiple_of(*p))?;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
    }
    (r == 1).then_some(p)
}

/// Prime powers `p^j <= d` with `d >= p^j * ceil((N+2)/(p^j+1))` and
/// `p` odd or `N` even.
#[allow(non_snake_case)]
pub fn prime_power_divisors(N: u64, d: u64) -> Vec<u64> {
    (2..=d)
        .filter(|&q| match prime_power_base(q) {
            Some(p) => (p % 2 == 1 || N.is_multiple_of(2)) && d >= q * (N + 2).div_ceil(q + 1),
            None => false,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[allow(non_snake_case)]
pub struct BoundReport {
    pub N: u64,
    pub d: u64,
    pub char: u64,
    pub fano_valid: bool,
    pub divisors: Vec<Divisor>,
    #[serde(serialize_with = "as_decimal")]
    pub combined: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub upper: BigUint,
    pub divides_upper: bool,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl BoundReport {
    pub fn divisor(&self, m: u64) -> Option<&Divisor> {
        self.divisors.iter().find(|d| d.m == m)
    }

    pub fn combined_divisible_by(&self, k: u64) -> bool {
        (&self.combined % BigUint::from(k)) == BigUint::from(0u32)
    }
}

/// Every certified divisor, their lcm and the `d!` bound.
#[allow(non_snake_case)]
pub fn combined_report(N: u64, d: u64, char: u64) -> Result<BoundReport, BoundsError> {
    if d == 0 {
        return Err(BoundsError::BadDegree);
    }
    let mut divisors = hypersurface_divisors(N, d, char)?;
    if char == 0 && is_fano(N, d) {
        for q in prime_power_divisors(N, d) {
            match divisors.iter_mut().find(|x| x.m == q) {
                Some(x) => x.provenance.push(Provenance::PrimePower),
                None => divisors.push(Divisor {
                    m: q,
                    provenance: vec![Provenance::PrimePower],
                }),
            }
        }
        divisors.sort_by_key(|x| x.m);
    }
    let combined = divisors
        .iter()
        .fold(BigUint::one(), |acc, x| acc.lcm(&BigUint::from(x.m)));
    let upper = factorial_upper(d);
    let divides_upper = (&upper % &combined) == BigUint::from(0u32);
    assert!(
        divides_upper || !is_fano(N, d),
        "certified divisors of degree {d} do not divide {d}!"
    );
    Ok(BoundReport {
        N,
        d,
        char,
        fano_valid: is_fano(N, d),
        divisors,
        combined,
        upper,
        divides_upper,
    })
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N = {}, d = {}, char = {}", self.N, self.d, self.char)?;
        if !self.fano_valid {
            writeln!(f, "d is outside the Fano range: no divisors certified")?;
        } else {
            writeln!(f, "{:>6}  provenance", "m")?;
            for x in &self.divisors {
                let tags: Vec<String> = x.provenance.iter().map(|p| p.to_string()).collect();
                writeln!(f, "{:>6}  {}", x.m, tags.join(", "))?;
            }
        }
        writeln!(f, "combined divides d!: {}", self.divides_upper)?;
        write!(f, "combined={} upper={}", self.combined, self.upper)
    }
}

/// Degree thresholds for `m:1` cyclic covers of `P^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[allow(non_snake_case)]
pub struct CyclicBound {
    pub N: u64,
    pub m: u64,
    pub n: u64,
    pub epsilon: u64,
    /// `m * (ceil((n+1)/m) + epsilon)`, using the dimension split.
    pub min_degree_split: u64,
    /// `m * (ceil((ceil(log2 N) + 1)/m) + 2)`.
    pub min_degree_log: u64,
}

/// 1 if `m` divides `n`, `n-1` or `n-2`, else 2.
pub fn cyclic_epsilon(n: u64, m: u64) -> u64 {
    if (0..3).any(|k| n >= k && (n - k).is_multiple_of(m)) {
        1
    } else {
        2
    }
}

fn ceil_log2(n: u64) -> u64 {
    (64 - (n - 1).leading_zeros()) as u64
}

#[allow(non_snake_case)]
pub fn cyclic_bounds(N: u64, m: u64) -> Result<CyclicBound, BoundsError> {
    if m < 2 {
        return Err(BoundsError::BadModulus(m));
    }
    let split = dimension_split(N)?;
    let n = split.n;
    let epsilon = cyclic_epsilon(n, m);
    Ok(CyclicBound {
        N,
        m,
        n,
        epsilon,
        min_degree_split: m * ((n + 1).div_ceil(m) + epsilon),
        min_degree_log: m * ((ceil_log2(N) + 1).div_ceil(m) + 2),
    })
}

impl fmt::Display for CyclicBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "N = {}, m = {}, n = {}, epsilon = {}",
            self.N, self.m, self.n, self.epsilon
        )?;
        writeln!(
            f,
            "minimal degree (dimension split): {}",
            self.min_degree_split
        )?;
        write!(
            f,
            "minimal degree (log2 N):          {}",
            self.min_degree_log
        )
    }
}

/// Integers `n >= 2` with `log2(m+1) <= n <= N + 1 - m`.
#[allow(non_snake_case)]
pub fn asok_range(N: u64, m: u64) -> Vec<u64> {
    let hi = match (N + 1).checked_sub(m) {
        Some(h) => h,
        None => return Vec::new(),
    };
    (2..=hi).filter(|&n| n >= 64 || m < 1u64 << n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits() {
        let s = |n| {
            let d = dimension_split(n).unwrap();
            (d.n, d.r)
        };
        assert_eq!(s(3), (2, 1));
        assert_eq!(s(4), (2, 2));
        assert_eq!(s(5), (3, 2));
        assert_eq!(s(99), (7, 92));
        assert_eq!(dimension_split(2), Err(BoundsError::OutOfRange(2)));
        for n in 3..5000 {
            let d = dimension_split(n).unwrap();
            assert_eq!(d.n + d.r, n);
        }
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial_upper(1), BigUint::from(1u32));
        assert_eq!(factorial_upper(5), BigUint::from(120u32));
        assert_eq!(factorial_upper(100).to_string().len(), 158);
    }

    #[test]
    fn quintic_fourfold() {
        let ms = |c| -> Vec<u64> {
            hypersurface_divisors(4, 5, c)
                .unwrap()
                .iter()
                .map(|x| x.m)
                .collect()
        };
        assert_eq!(ms(0), vec![2, 3]);
        assert_eq!(ms(2), vec![3]);
        assert_eq!(ms(3), vec![2]);
        assert_eq!(hypersurface_divisors(4, 5, 4), Err(BoundsError::BadChar(4)));
        let r = combined_report(4, 5, 0).unwrap();
        assert_eq!(r.combined, BigUint::from(30u32));
        assert!(r.divides_upper);
    }

    #[test]
    fn split_beats_log_cutoff() {
        let d = hypersurface_divisors(9, 8, 0).unwrap();
        let five = d.iter().find(|x| x.m == 5).unwrap();
        assert_eq!(five.provenance, vec![Provenance::SplitCutoff]);
        assert!(d
            .iter()
            .find(|x| x.m == 4)
            .unwrap()
            .has(Provenance::LogCutoff));
        assert!(d.iter().all(|x| x.m <= 5));
    }

    #[test]
    fn prime_powers() {
        let q = prime_power_divisors(99, 100);
        assert!(q.contains(&25));
        assert!(!q.contains(&125));
        assert!(q.iter().all(|x| !x.is_power_of_two()));
        let q = prime_power_divisors(4, 5);
        assert!(q.contains(&5) && q.contains(&2));
    }

    #[test]
    fn outside_fano_range() {
        let r = combined_report(4, 7, 0).unwrap();
        assert!(!r.fano_valid);
        assert!(r.divisors.is_empty());
        assert_eq!(r.combined, BigUint::from(1u32));
        assert_eq!(r.upper, BigUint::from(5040u32));
    }

    #[test]
    fn cyclic() {
        let c = cyclic_bounds(3, 2).unwrap();
        assert_eq!(
            (c.n, c.epsilon, c.min_degree_split, c.min_degree_log),
            (2, 1, 6, 8)
        );
        let c = cyclic_bounds(7, 5).unwrap();
        assert_eq!((c.n, c.epsilon, c.min_degree_split), (3, 2, 15));
        for n in 0..40 {
            for m in 2..10 {
                let e = cyclic_epsilon(n, m);
                assert_eq!(e == 1, n % m <= 2);
            }
        }
    }

    #[test]
    fn asok() {
        assert_eq!(asok_range(3, 2), vec![2]);
        assert!(asok_range(3, 3).is_empty());
        assert_eq!(asok_range(100, 2), (2..=99).collect::<Vec<_>>());
        assert_eq!(asok_range(20, 7), (3..=14).collect::<Vec<_>>());
    }
}
