//! Symbols mod `m`, Steinberg-sum witnesses and universal relations.
//!
//! Equality of symbols in Milnor K-theory is never decided here. What is
//! checked are the polynomial identities behind the relations: every
//! propagation step is justified by a witness `b_1 + ... + b_k = c^m`, and
//! instantiation and kill-polynomial construction certify their
//! preconditions exactly.

use std::fmt;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::field::Field;
use crate::hypersurface::HypersurfaceSpec;
use crate::poly::{
    indexed_names, parse, Ctx, PolyContext, PolyError, Polynomial, Substitution, VerificationResult,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MilnorError {
    #[error("entry {0} is zero")]
    ZeroEntry(usize),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u32),
    #[error("lambda = {lambda} is not a unit modulo {m}")]
    LambdaNotUnit { lambda: u32, m: u32 },
    #[error("witness {index} does not verify: residual {residual}")]
    WitnessFailure { index: usize, residual: String },
    #[error("image of {0} vanishes")]
    VanishingImage(String),
    #[error("the kill polynomial divides the image of a_{0}")]
    DividesF(usize),
    #[error("the kill polynomial is identically zero")]
    ZeroEquation,
    #[error("relation text: {0}")]
    Format(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A symbol `(a_1, ..., a_n)` in `K_n^M / m`; entries are nonzero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Symbol {
    pub m: u32,
    entries: Vec<Polynomial>,
}

impl Symbol {
    pub fn new(m: u32, entries: Vec<Polynomial>) -> Result<Self, MilnorError> {
        if m < 2 {
            return Err(MilnorError::BadModulus(m));
        }
        if let Some(i) = entries.iter().position(Polynomial::is_zero) {
            return Err(MilnorError::ZeroEntry(i + 1));
        }
        Ok(Symbol { m, entries })
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn degree(&self) -> usize {
        self.entries.len()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Entries `b_i` and a root `c` with `b_1 + ... + b_k = c^m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteinbergWitness {
    pub entries: Vec<Polynomial>,
    pub root: Polynomial,
}

impl SteinbergWitness {
    pub fn verify(&self, m: u32) -> Result<VerificationResult, MilnorError> {
        verify_steinberg_sum(&self.entries, &self.root, m)
    }

    fn embed(&self, ctx: &Ctx) -> Result<Self, PolyError> {
        Ok(SteinbergWitness {
            entries: self
                .entries
                .iter()
                .map(|e| e.embed(ctx))
                .collect::<Result<_, _>>()?,
            root: self.root.embed(ctx)?,
        })
    }
}

/// Checks `sum(entries) = c^m` exactly.
pub fn verify_steinberg_sum(
    entries: &[Polynomial],
    c: &Polynomial,
    m: u32,
) -> Result<VerificationResult, MilnorError> {
    if let Some(i) = entries.iter().position(Polynomial::is_zero) {
        return Err(MilnorError::ZeroEntry(i + 1));
    }
    let mut diff = -c.pow(m);
    for e in entries {
        diff = diff.checked_add(e)?;
    }
    Ok(VerificationResult::from_difference(diff))
}

/// The ring `k[x_1..x_n, y_1..y_s]` of a relation.
pub fn relation_context(n: usize, s: usize, field: Field) -> Ctx {
    let mut names = indexed_names("x", 1, n);
    names.extend(indexed_names("y", 1, s));
    PolyContext::new(field, &names, &[]).expect("generated names are valid")
}

/// `(x_1, ..., x_n) = lambda * (a_1, ..., a_n)` in `K_n^M / m` of the
/// function field of `k[x, y]`, with the witnesses that justify it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniversalRelation {
    pub m: u32,
    pub n: usize,
    pub s: usize,
    pub lambda: u32,
    #[serde(skip)]
    ctx: Ctx,
    rhs: Vec<Polynomial>,
    witnesses: Vec<SteinbergWitness>,
}

impl UniversalRelation {
    /// Assembles a relation, checking structure and every witness.
    pub fn new(
        m: u32,
        lambda: u32,
        ctx: Ctx,
        n: usize,
        s: usize,
        rhs: Vec<Polynomial>,
        witnesses: Vec<SteinbergWitness>,
    ) -> Result<Self, MilnorError> {
        if m < 2 {
            return Err(MilnorError::BadModulus(m));
        }
        if lambda.gcd(&m) != 1 {
            return Err(MilnorError::LambdaNotUnit { lambda, m });
        }
        if rhs.len() != n {
            return Err(MilnorError::Format(format!(
                "expected {n} right-hand entries, found {}",
                rhs.len()
            )));
        }
        if let Some(i) = rhs.iter().position(Polynomial::is_zero) {
            return Err(MilnorError::ZeroEntry(i + 1));
        }
        let rel = UniversalRelation {
            m,
            n,
            s,
            lambda: lambda % m,
            ctx,
            rhs,
            witnesses,
        };
        rel.check_witnesses()?;
        Ok(rel)
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    /// Left-hand symbol `(x_1, ..., x_n)`.
    pub fn lhs(&self) -> Vec<Polynomial> {
        (0..self.n)
            .map(|i| Polynomial::var_index(&self.ctx, i))
            .collect()
    }

    pub fn rhs(&self) -> &[Polynomial] {
        &self.rhs
    }

    pub fn witnesses(&self) -> &[SteinbergWitness] {
        &self.witnesses
    }

    /// Re-verifies every stored witness.
    pub fn verify_witnesses(&self) -> Result<Vec<VerificationResult>, MilnorError> {
        self.witnesses.iter().map(|w| w.verify(self.m)).collect()
    }

    fn check_witnesses(&self) -> Result<(), MilnorError> {
        for (k, r) in self.verify_witnesses()?.into_iter().enumerate() {
            if let VerificationResult::Fail { residual } = r {
                return Err(MilnorError::WitnessFailure {
                    index: k + 1,
                    residual: residual.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "relation m={} n={} s={} lambda={}\n",
            self.m, self.n, self.s, self.lambda
        );
        for a in &self.rhs {
            out.push_str(&a.to_string());
            out.push('\n');
        }
        for (k, w) in self.witnesses.iter().enumerate() {
            out.push_str(&format!(
                "witness {} entries={} root={}\n",
                k + 1,
                w.entries.len(),
                w.root
            ));
            for e in &w.entries {
                out.push_str(&e.to_string());
                out.push('\n');
            }
        }
        out
    }

    /// Reads the format written by [`UniversalRelation::to_text`]; the
    /// witnesses are re-verified.
    pub fn from_text(text: &str, field: Field) -> Result<Self, MilnorError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| MilnorError::Format("empty input".into()))?;
        let fields = key_values(header, "relation")?;
        let get = |k: &str| -> Result<u64, MilnorError> {
            fields
                .iter()
                .find(|(key, _)| key == k)
                .ok_or_else(|| MilnorError::Format(format!("header is missing `{k}`")))?
                .1
                .parse()
                .map_err(|_| MilnorError::Format(format!("`{k}` is not an integer")))
        };
        let (m, n, s, lambda) = (get("m")?, get("n")?, get("s")?, get("lambda")?);
        let ctx = relation_context(n as usize, s as usize, field);
        let mut rhs = Vec::new();
        for _ in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| MilnorError::Format("missing right-hand entry".into()))?;
            rhs.push(parse(line, &ctx)?);
        }
        let mut witnesses = Vec::new();
        while let Some(line) = lines.next() {
            let (head, root) = line
                .split_once("root=")
                .ok_or_else(|| MilnorError::Format(format!("expected a witness line: {line}")))?;
            let kv = key_values(head.trim(), "witness")?;
            let count: usize = kv
                .iter()
                .find(|(k, _)| k == "entries")
                .and_then(|(_, v)| v.parse().ok())
                .ok_or_else(|| MilnorError::Format("witness needs entries=<k>".into()))?;
            let root = parse(root, &ctx)?;
            let mut entries = Vec::with_capacity(count);
            for _ in 0..count {
                let line = lines
                    .next()
                    .ok_or_else(|| MilnorError::Format("truncated witness".into()))?;
                entries.push(parse(line, &ctx)?);
            }
            witnesses.push(SteinbergWitness { entries, root });
        }
        UniversalRelation::new(
            m as u32,
            lambda as u32,
            ctx,
            n as usize,
            s as usize,
            rhs,
            witnesses,
        )
    }
}

fn key_values(line: &str, keyword: &str) -> Result<Vec<(String, String)>, MilnorError> {
    let mut words = line.split_whitespace();
    if words.next() != Some(keyword) {
        return Err(MilnorError::Format(format!("expected `{keyword}` line")));
    }
    Ok(words
        .filter_map(|w| w.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect())
}

impl fmt::Display for UniversalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs: Vec<String> = self.lhs().iter().map(|p| p.to_string()).collect();
        let rhs: Vec<String> = self.rhs.iter().map(|p| p.to_string()).collect();
        let lambda = if self.lambda == 1 {
            String::new()
        } else {
            format!("{}*", self.lambda)
        };
        write!(f, "({}) = {}({})", lhs.join(","), lambda, rhs.join(","))
    }
}

/// `(x_1) = (x_1 y_1^m)` over the rationals.
pub fn base_relation(m: u32) -> Result<UniversalRelation, MilnorError> {
    base_relation_over(m, Field::Rationals)
}

pub fn base_relation_over(m: u32, field: Field) -> Result<UniversalRelation, MilnorError> {
    if m < 2 {
        return Err(MilnorError::BadModulus(m));
    }
    let ctx = relation_context(1, 1, field);
    let a1 = Polynomial::var_index(&ctx, 0) * Polynomial::var_index(&ctx, 1).pow(m);
    UniversalRelation::new(m, 1, ctx, 1, 1, vec![a1], Vec::new())
}

/// Passes from degree `n` to `n + 1` with `2s + 1` y-variables.
///
/// The old entries stay as they are, and the new last entry is
/// `x_{n+1} (y_{s+1}^m - sum a'_i)` where `a'_i` is `a_i` with `y_j` moved to
/// `y_{s+1+j}`. The witness `(a'_1, ..., a'_n, y_{s+1}^m - sum a'_i)` with
/// root `y_{s+1}` is appended.
pub fn propagate_relation(rel: &UniversalRelation) -> Result<UniversalRelation, MilnorError> {
    let (n, s, m) = (rel.n, rel.s, rel.m);
    let ctx = relation_context(n + 1, 2 * s + 1, rel.ctx.field().clone());
    let y = |j: usize| Polynomial::var_index(&ctx, n + 1 + j - 1);

    let mut shift = Substitution::new(&ctx);
    for j in 1..=s {
        shift.set(&format!("y{j}"), y(s + 1 + j));
    }
    let shifted: Vec<Polynomial> = rel
        .rhs
        .iter()
        .map(|a| a.substitute(&shift))
        .collect::<Result<_, _>>()?;
    let root = y(s + 1);
    let last = &root.pow(m) - &Polynomial::sum(&ctx, &shifted);

    let mut witness_entries = shifted;
    witness_entries.push(last.clone());
    let mut witnesses: Vec<SteinbergWitness> = rel
        .witnesses
        .iter()
        .map(|w| w.embed(&ctx))
        .collect::<Result<_, _>>()?;
    witnesses.push(SteinbergWitness {
        entries: witness_entries,
        root,
    });

    let mut rhs: Vec<Polynomial> = rel
        .rhs
        .iter()
        .map(|a| a.embed(&ctx))
        .collect::<Result<_, _>>()?;
    rhs.push(Polynomial::var_index(&ctx, n) * last);
    UniversalRelation::new(m, rel.lambda, ctx, n + 1, 2 * s + 1, rhs, witnesses)
}

/// The canonical chain: the base relation propagated `n - 1` times.
pub fn propagated_chain(m: u32, n: usize, field: Field) -> Result<UniversalRelation, MilnorError> {
    let mut rel = base_relation_over(m, field)?;
    for _ in 1..n {
        rel = propagate_relation(&rel)?;
    }
    Ok(rel)
}

/// Result of pushing a relation through a substitution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instantiation {
    pub lhs: Symbol,
    pub rhs: Symbol,
    pub lambda: u32,
}

fn apply_all(
    rel: &UniversalRelation,
    phi: &Substitution,
) -> Result<(Vec<Polynomial>, Vec<Polynomial>), MilnorError> {
    let mut lhs = Vec::with_capacity(rel.n);
    for (i, x) in rel.lhs().iter().enumerate() {
        let img = x.substitute(phi)?;
        if img.is_zero() {
            return Err(MilnorError::VanishingImage(format!("x{}", i + 1)));
        }
        lhs.push(img);
    }
    let mut rhs = Vec::with_capacity(rel.n);
    for (i, a) in rel.rhs.iter().enumerate() {
        let img = a.substitute(phi)?;
        if img.is_zero() {
            return Err(MilnorError::VanishingImage(format!("a{}", i + 1)));
        }
        rhs.push(img);
    }
    Ok((lhs, rhs))
}

/// Applies `phi` to both sides after checking that no image vanishes, so
/// that the relation holds for the images.
pub fn instantiate_relation(
    rel: &UniversalRelation,
    phi: &Substitution,
) -> Result<Instantiation, MilnorError> {
    let (lhs, rhs) = apply_all(rel, phi)?;
    Ok(Instantiation {
        lhs: Symbol::new(rel.m, lhs)?,
        rhs: Symbol::new(rel.m, rhs)?,
        lambda: rel.lambda,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KillPolynomial {
    pub hypersurface: HypersurfaceSpec,
    /// The images `phi(a_i)`, all nonzero and none divisible by `F`.
    pub images: Vec<Polynomial>,
    /// Irreducibility of `F` is left to the integrality probe.
    pub irreducibility: &'static str,
}

/// `F = c^m - sum phi(a_i)`, the polynomial on whose zero set the symbol
/// `(phi(x_1), ..., phi(x_n))` dies.
pub fn kill_polynomial(
    rel: &UniversalRelation,
    phi: &Substitution,
    c: &Polynomial,
) -> Result<KillPolynomial, MilnorError> {
    let (_, images) = apply_all(rel, phi)?;
    let ctx = phi.target();
    let sum = Polynomial::sum(ctx, &images);
    let f = c.pow(rel.m).checked_sub(&sum)?;
    if f.is_zero() {
        return Err(MilnorError::ZeroEquation);
    }
    for (i, img) in images.iter().enumerate() {
        if img.div_exact(&f)?.is_some() {
            return Err(MilnorError::DividesF(i + 1));
        }
    }
    let spec = HypersurfaceSpec::projective(f, "kill polynomial c^m - sum phi(a_i)")
        .with_parameters(&[
            ("m", rel.m as i64),
            ("n", rel.n as i64),
            ("s", rel.s as i64),
        ]);
    Ok(KillPolynomial {
        hypersurface: spec,
        images,
        irreducibility: "unchecked",
    })
}
