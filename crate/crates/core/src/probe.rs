//! Finite-field probes: a brute-force search for singular points over
//! `F_q` (`q = p` or `p^2`) and a heuristic integrality test.
//!
//! Neither probe proves anything positive. Finding no singular `F_q`-point
//! says nothing about points over extensions or in characteristic zero, and
//! a squarefree restriction to random lines is only evidence of
//! irreducibility. Reported witnesses, however, are exact.

use std::collections::HashMap;
use std::fmt;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{is_prime_u64, Field};
use crate::hypersurface::HypersurfaceSpec;
use crate::poly::{mth_root, PolyContext, PolyError, Polynomial, Substitution};

/// Largest number of projective points a smoothness scan will visit.
pub const MAX_POINTS: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error("q = {0} is not a prime or the square of a prime below 2^20")]
    BadFieldSize(u64),
    #[error("coefficients do not reduce to F_{0}")]
    FieldMismatch(u64),
    #[error("unit parameter `{0}` needs a value")]
    UnassignedParameter(String),
    #[error("{0} points exceed the scan limit")]
    AmbientTooLarge(u128),
    #[error("input is zero")]
    ZeroInput,
    #[error("input is a nonzero constant")]
    ConstantInput,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

type Result<T> = std::result::Result<T, ProbeError>;

/// `F_p` or `F_p[w]/(w^2 + c1 w + c0)`; elements are pairs `a + b w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteField {
    pub p: u64,
    pub degree: u32,
    c0: u64,
    c1: u64,
}

type Elem = (u64, u64);

impl FiniteField {
    pub fn new(q: u64) -> Result<Self> {
        if !(2..=1 << 20).contains(&q) {
            return Err(ProbeError::BadFieldSize(q));
        }
        if is_prime_u64(q) {
            return Ok(FiniteField {
                p: q,
                degree: 1,
                c0: 0,
                c1: 0,
            });
        }
        let p = (q as f64).sqrt().round() as u64;
        if p * p != q || !is_prime_u64(p) {
            return Err(ProbeError::BadFieldSize(q));
        }
        // monic quadratic without roots
        for c1 in 0..p {
            for c0 in 1..p {
                if (0..p).all(|x| (x * x + c1 * x + c0) % p != 0) {
                    return Ok(FiniteField {
                        p,
                        degree: 2,
                        c0,
                        c1,
                    });
                }
            }
        }
        unreachable!("every prime field has an irreducible quadratic")
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.degree)
    }

    fn elem(&self, index: u64) -> Elem {
        (index % self.p, index / self.p)
    }

    fn embed(&self, a: u64) -> Elem {
        (a % self.p, 0)
    }

    fn add(&self, x: Elem, y: Elem) -> Elem {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    fn mul(&self, x: Elem, y: Elem) -> Elem {
        let p = self.p as u128;
        let (a, b, c, d) = (x.0 as u128, x.1 as u128, y.0 as u128, y.1 as u128);
        let bd = b * d % p;
        let r0 = (a * c + (p - bd) * self.c0 as u128) % p;
        let r1 = (a * d + b * c + (p - bd) * self.c1 as u128) % p;
        (r0 as u64, r1 as u64)
    }

    fn format(&self, x: Elem) -> String {
        match (self.degree, x.1) {
            (1, _) | (_, 0) => x.0.to_string(),
            _ if x.0 == 0 => format!("{}*w", x.1),
            _ => format!("{}+{}*w", x.0, x.1),
        }
    }

    /// Minimal polynomial of `w` for `q = p^2`.
    pub fn modulus(&self) -> Option<String> {
        (self.degree == 2).then(|| match self.c1 {
            0 => format!("w^2 + {}", self.c0),
            c1 => format!("w^2 + {c1}*w + {}", self.c0),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Smoothness,
    Integrality,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    NoSingularPointFound,
    SingularPoint { point: Vec<String> },
    ProbablyIrreducible { trials: u32, squarefree_lines: u32 },
    ReducibleWitness { factor: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub kind: ProbeKind,
    /// Size of the field used.
    pub q: u64,
    /// Minimal polynomial of `w` when `q` is a square.
    pub modulus: Option<String>,
    /// Points visited in enumeration order up to and including any witness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points_examined: Option<u64>,
    pub seed: Option<u64>,
    pub verdict: Verdict,
}

impl ProbeReport {
    pub fn found_witness(&self) -> bool {
        matches!(
            self.verdict,
            Verdict::SingularPoint { .. } | Verdict::ReducibleWitness { .. }
        )
    }
}

impl fmt::Display for ProbeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ProbeKind::Smoothness => "smoothness",
            ProbeKind::Integrality => "integrality",
        };
        writeln!(f, "probe: {kind}")?;
        writeln!(f, "field: F_{}", self.q)?;
        if let Some(m) = &self.modulus {
            writeln!(f, "w satisfies: {m} = 0")?;
        }
        if let Some(s) = self.seed {
            writeln!(f, "seed: {s}")?;
        }
        if let Some(n) = self.points_examined {
            writeln!(f, "points examined: {n}")?;
        }
        match &self.verdict {
            Verdict::NoSingularPointFound => write!(
                f,
                "verdict: no singular F_{}-point found (not a proof of smoothness)",
                self.q
            ),
            Verdict::SingularPoint { point } => {
                write!(f, "verdict: singular point ({})", point.join(" : "))
            }
            Verdict::ProbablyIrreducible {
                trials,
                squarefree_lines,
            } => write!(
                f,
                "verdict: probably irreducible ({squarefree_lines}/{trials} random lines squarefree)"
            ),
            Verdict::ReducibleWitness { factor, reason } => {
                write!(f, "verdict: reducible, factor {factor} ({reason})")
            }
        }
    }
}

/// Sparse polynomial with coefficients in the prime field, indexed by the
/// positions of the projective coordinates.
struct Reduced {
    terms: Vec<(Vec<(usize, u32)>, u64)>,
}

impl Reduced {
    fn eval(&self, k: &FiniteField, powers: &[Vec<Elem>]) -> Elem {
        let mut acc = (0, 0);
        for (mono, c) in &self.terms {
            let mut v = k.embed(*c);
            for &(i, e) in mono {
                v = k.mul(v, powers[i][e as usize]);
            }
            acc = k.add(acc, v);
        }
        acc
    }
}

/// Replaces each unit parameter by its assigned integer and drops the
/// parameters from the context.
pub fn assign_parameters(p: &Polynomial, values: &[(String, i64)]) -> Result<Polynomial> {
    let ctx = p.ctx();
    let unit = ctx.unit_params();
    if unit.is_empty() {
        return Ok(p.clone());
    }
    let forms: Vec<String> = ctx
        .form_variables()
        .iter()
        .map(|&i| ctx.name(i).to_string())
        .collect();
    let target = PolyContext::new(ctx.field().clone(), &forms, &[] as &[String])?;
    let mut sub = Substitution::new(&target);
    for name in unit {
        let v = values
            .iter()
            .find(|(k, _)| k == name)
            .ok_or_else(|| ProbeError::UnassignedParameter(name.to_string()))?;
        sub = sub.with(name, Polynomial::from_int(&target, v.1));
    }
    Ok(p.substitute(&sub)?)
}

fn reduce(p: &Polynomial, prime: u64) -> Result<Reduced> {
    if let Field::Prime(c) = p.field() {
        if *c != prime.into() {
            return Err(ProbeError::FieldMismatch(prime));
        }
    }
    let terms = p
        .reduce_coefficients(prime)
        .ok_or(ProbeError::FieldMismatch(prime))?;
    Ok(Reduced {
        terms: terms
            .into_iter()
            .map(|(m, c)| (m.iter().collect(), c))
            .collect(),
    })
}

/// Number of points of `P^{v-1}(F_q)`, saturating.
pub fn projective_point_count(q: u64, v: usize) -> u128 {
    (0..v).fold(0u128, |acc, _| {
        acc.saturating_mul(q as u128).saturating_add(1)
    })
}

/// The `index`-th normalized point in lexicographic order: the first nonzero
/// coordinate is 1, and points with a later leading 1 come first.
fn point_at(k: &FiniteField, v: usize, mut index: u64) -> Vec<Elem> {
    let q = k.size();
    for lead in (0..v).rev() {
        let tail = (v - 1 - lead) as u32;
        let size = q.pow(tail);
        if index < size {
            let mut pt = vec![(0, 0); v];
            pt[lead] = (1, 0);
            let mut rest = index;
            for pos in (lead + 1..v).rev() {
                pt[pos] = k.elem(rest % q);
                rest /= q;
            }
            return pt;
        }
        index -= size;
    }
    unreachable!("index beyond the point count")
}

struct Scan {
    field: FiniteField,
    vars: usize,
    max_exp: Vec<u32>,
    polys: Vec<Reduced>,
}

impl Scan {
    fn singular_at(&self, index: u64) -> bool {
        let pt = point_at(&self.field, self.vars, index);
        let powers: Vec<Vec<Elem>> = pt
            .iter()
            .zip(&self.max_exp)
            .map(|(&x, &e)| {
                let mut row = Vec::with_capacity(e as usize + 1);
                row.push((1, 0));
                for i in 0..e as usize {
                    row.push(self.field.mul(row[i], x));
                }
                row
            })
            .collect();
        self.polys
            .iter()
            .all(|p| p.eval(&self.field, &powers) == (0, 0))
    }

    #[cfg(feature = "parallel")]
    fn first_singular(&self, total: u64) -> Option<u64> {
        use rayon::prelude::*;
        (0..total)
            .into_par_iter()
            .find_first(|&i| self.singular_at(i))
    }

    #[cfg(not(feature = "parallel"))]
    fn first_singular(&self, total: u64) -> Option<u64> {
        (0..total).find(|&i| self.singular_at(i))
    }
}

/// Scans every point of the ambient projective space over `F_q` for a
/// common zero of the equation and all its partial derivatives. The
/// lexicographically least singular point is reported.
pub fn smoothness_probe(
    spec: &HypersurfaceSpec,
    q: u64,
    assignments: &[(String, i64)],
) -> Result<ProbeReport> {
    let field = FiniteField::new(q)?;
    let eq = assign_parameters(&spec.equation, assignments)?;
    if eq.is_zero() {
        return Err(ProbeError::ZeroInput);
    }
    let v = eq.ctx().num_vars();
    let total = projective_point_count(q, v);
    if total > MAX_POINTS {
        return Err(ProbeError::AmbientTooLarge(total));
    }
    let mut polys = vec![reduce(&eq, field.p)?];
    for i in 0..v {
        polys.push(reduce(&eq.derivative(i), field.p)?);
    }
    let max_exp = (0..v).map(|i| eq.degree_in(i)).collect();
    let scan = Scan {
        field,
        vars: v,
        max_exp,
        polys,
    };
    let total = total as u64;
    let (verdict, examined) = match scan.first_singular(total) {
        Some(i) => {
            let pt = point_at(&field, v, i);
            (
                Verdict::SingularPoint {
                    point: pt.iter().map(|&x| field.format(x)).collect(),
                },
                i + 1,
            )
        }
        None => (Verdict::NoSingularPointFound, total),
    };
    Ok(ProbeReport {
        kind: ProbeKind::Smoothness,
        q,
        modulus: field.modulus(),
        points_examined: Some(examined),
        seed: None,
        verdict,
    })
}

// Dense univariate polynomials over F_l, lowest degree first.
mod univariate {
    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn mul(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % l as u128) as u64;
            }
        }
        trim(out)
    }

    pub fn derivative(a: &[u64], l: u64) -> Vec<u64> {
        trim(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| ((i as u128 * c as u128) % l as u128) as u64)
                .collect(),
        )
    }

    fn inv(a: u64, l: u64) -> u64 {
        pow(a, l - 2, l)
    }

    fn pow(mut b: u64, mut e: u64, l: u64) -> u64 {
        let mut acc = 1u128;
        let mut base = b as u128 % l as u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % l as u128;
            }
            base = base * base % l as u128;
            e >>= 1;
        }
        b = acc as u64;
        b
    }

    fn rem(a: &[u64], b: &[u64], l: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        let lead_inv = inv(*b.last().unwrap(), l) as u128;
        while r.len() >= b.len() {
            let c = (*r.last().unwrap() as u128 * lead_inv % l as u128) as u64;
            let shift = r.len() - b.len();
            for (i, &y) in b.iter().enumerate() {
                let sub = (c as u128 * y as u128 % l as u128) as u64;
                r[shift + i] = (r[shift + i] + l - sub) % l;
            }
            r = trim(r);
        }
        r
    }

    pub fn gcd_degree(a: &[u64], b: &[u64], l: u64) -> usize {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, l);
            a = b;
            b = r;
        }
        a.len().saturating_sub(1)
    }
}

fn random_prime(rng: &mut ChaCha8Rng) -> u64 {
    let mut c = rng.gen_range(10_000u64..60_000);
    while !is_prime_u64(c) {
        c += 1;
    }
    c
}

/// Heuristic check that `p` defines an integral hypersurface.
///
/// A variable dividing `p` or an `l`-th root for a prime `l` dividing the
/// degree is an exact witness of reducibility (unit parameters and
/// constants count as units). Otherwise `trials` random lines over a random
/// prime field are tested for squarefree restrictions.
pub fn integrality_probe(p: &Polynomial, trials: u32, seed: u64) -> Result<ProbeReport> {
    if p.is_zero() {
        return Err(ProbeError::ZeroInput);
    }
    let ctx = p.ctx().clone();
    let forms = ctx.form_variables();
    let deg = p.form_degree().unwrap_or(0);
    if deg == 0 {
        return Err(ProbeError::ConstantInput);
    }
    let report = |verdict: Verdict| ProbeReport {
        kind: ProbeKind::Integrality,
        q: 0,
        modulus: None,
        points_examined: None,
        seed: Some(seed),
        verdict,
    };

    let content = p.monomial_content().restrict(|i| !ctx.is_unit_param(i));
    if let Some((i, _)) = content.iter().next() {
        if deg > 1 {
            return Ok(report(Verdict::ReducibleWitness {
                factor: ctx.name(i).to_string(),
                reason: "variable factor".into(),
            }));
        }
    }
    for l in (2..=deg).filter(|&l| deg.is_multiple_of(l) && is_prime_u64(l as u64)) {
        if let Ok(r) = mth_root(p, l, true) {
            return Ok(report(Verdict::ReducibleWitness {
                factor: r.root.to_string(),
                reason: format!("the input is a unit times the {l}-th power of the factor"),
            }));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = match p.field() {
        Field::Prime(c) => c
            .to_u64()
            .filter(|&c| c < 1 << 32)
            .ok_or(ProbeError::FieldMismatch(0))?,
        Field::Rationals => loop {
            let l = random_prime(&mut rng);
            if p.reduce_coefficients(l).is_some() {
                break l;
            }
        },
    };
    let reduced = p
        .reduce_coefficients(l)
        .ok_or(ProbeError::FieldMismatch(l))?;
    let is_form: HashMap<usize, bool> = (0..ctx.num_vars())
        .map(|i| (i, forms.contains(&i)))
        .collect();
    let mut squarefree = 0;
    for _ in 0..trials {
        let line: Vec<(u64, u64)> = (0..ctx.num_vars())
            .map(|i| {
                if is_form[&i] {
                    (rng.gen_range(0..l), rng.gen_range(0..l))
                } else {
                    (rng.gen_range(1..l), 0)
                }
            })
            .collect();
        let mut restriction: Vec<u64> = Vec::new();
        for (mono, c) in &reduced {
            let mut term = vec![*c];
            for (i, e) in mono.iter() {
                let lin = univariate::trim(vec![line[i].0, line[i].1]);
                for _ in 0..e {
                    term = univariate::mul(&term, &lin, l);
                }
            }
            if restriction.len() < term.len() {
                restriction.resize(term.len(), 0);
            }
            for (k, t) in term.iter().enumerate() {
                restriction[k] = (restriction[k] + t) % l;
            }
        }
        let restriction = univariate::trim(restriction);
        let dr = univariate::derivative(&restriction, l);
        if restriction.len() > 1
            && !dr.is_empty()
            && univariate::gcd_degree(&restriction, &dr, l) == 0
        {
            squarefree += 1;
        }
    }
    let mut r = report(Verdict::ProbablyIrreducible {
        trials,
        squarefree_lines: squarefree,
    });
    r.q = l;
    Ok(r)
}

/// Exact recheck of a smoothness witness given as field-element indices.
pub fn is_singular_point(eq: &Polynomial, q: u64, point: &[u64]) -> Result<bool> {
    let field = FiniteField::new(q)?;
    let pt: Vec<Elem> = point.iter().map(|&i| field.elem(i)).collect();
    let v = eq.ctx().num_vars();
    let mut polys = vec![reduce(eq, field.p)?];
    for i in 0..v {
        polys.push(reduce(&eq.derivative(i), field.p)?);
    }
    let powers: Vec<Vec<Elem>> = pt
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut row = vec![(1, 0)];
            for e in 0..eq.degree_in(i) as usize {
                row.push(field.mul(row[e], x));
            }
            row
        })
        .collect();
    Ok(polys.iter().all(|p| p.eval(&field, &powers) == (0, 0)))
}
