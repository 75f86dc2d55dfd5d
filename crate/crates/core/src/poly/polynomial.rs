use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::field::{Coeff, Field};

use super::{Ctx, Monomial, PolyError};

/// Polynomial with coefficients in the context's field.
///
/// Terms are kept in a map ordered by graded-lex, so the canonical printed
/// form walks it backwards. Zero coefficients are never stored.
#[derive(Clone)]
pub struct Polynomial {
    ctx: Ctx,
    terms: BTreeMap<Monomial, Coeff>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        same_ctx(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

fn same_ctx(a: &Ctx, b: &Ctx) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn accumulate(field: &Field, terms: &mut BTreeMap<Monomial, Coeff>, m: Monomial, c: Coeff) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match terms.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = field.add(o.get(), &c);
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

impl Polynomial {
    pub fn zero(ctx: &Ctx) -> Self {
        Polynomial {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Ctx) -> Self {
        Polynomial::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &Ctx, v: i64) -> Self {
        let c = ctx.field().from_int(v);
        Polynomial::from_term(ctx, Monomial::one(), c)
    }

    /// Constant polynomial; fails over `F_p` when the denominator vanishes.
    pub fn constant(ctx: &Ctx, c: &Coeff) -> Result<Self, PolyError> {
        let c = ctx.field().normalize(c)?;
        Ok(Polynomial::from_term(ctx, Monomial::one(), c))
    }

    pub fn var(ctx: &Ctx, name: &str) -> Result<Self, PolyError> {
        Ok(Polynomial::var_index(ctx, ctx.var_index(name)?))
    }

    pub fn var_index(ctx: &Ctx, i: usize) -> Self {
        Polynomial::monomial(ctx, Monomial::var(i, 1))
    }

    pub fn monomial(ctx: &Ctx, m: Monomial) -> Self {
        Polynomial::from_term(ctx, m, Coeff::one())
    }

    /// Single term; `c` must already be reduced for the context's field.
    pub(crate) fn from_term(ctx: &Ctx, m: Monomial, c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial {
            ctx: ctx.clone(),
            terms,
        }
    }

    pub(crate) fn from_map(ctx: &Ctx, terms: BTreeMap<Monomial, Coeff>) -> Self {
        debug_assert!(terms.values().all(|c| !c.is_zero()));
        Polynomial {
            ctx: ctx.clone(),
            terms,
        }
    }

    /// Builds a polynomial from arbitrary `(monomial, coefficient)` pairs.
    pub fn from_terms(
        ctx: &Ctx,
        terms: impl IntoIterator<Item = (Monomial, Coeff)>,
    ) -> Result<Self, PolyError> {
        let field = ctx.field();
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            let c = field.normalize(&c)?;
            accumulate(field, &mut map, m, c);
        }
        Ok(Polynomial::from_map(ctx, map))
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn field(&self) -> &Field {
        self.ctx.field()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical order: graded-lex descending.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coeff)> + '_ {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn contains_monomial(&self, m: &Monomial) -> bool {
        self.terms.contains_key(m)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn trailing_term(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next()
    }

    /// The value when the polynomial is constant (zero included).
    pub fn constant_value(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    /// Single term, any coefficient.
    pub fn is_term(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    fn term_form_degree(&self, m: &Monomial) -> u32 {
        m.degree_where(|i| !self.ctx.is_unit_param(i))
    }

    /// Degree counting only the non-parameter variables.
    pub fn form_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| self.term_form_degree(m)).max()
    }

    /// Homogeneous in the non-parameter variables. The zero polynomial counts.
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| self.term_form_degree(m));
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Homogeneous with the given weights, returning the common weight.
    pub fn weighted_degree(&self, weight: impl Fn(usize) -> i64) -> Option<i64> {
        let mut degs = self
            .terms
            .keys()
            .map(|m| m.iter().map(|(i, e)| weight(i) * e as i64).sum::<i64>());
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms
            .keys()
            .map(|m| m.exponent(var))
            .max()
            .unwrap_or(0)
    }

    pub fn min_degree_in(&self, var: usize) -> u32 {
        self.terms
            .keys()
            .map(|m| m.exponent(var))
            .min()
            .unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(var) > 0)
    }

    /// Indices of the variables that occur, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut seen = vec![false; self.ctx.num_vars()];
        for m in self.terms.keys() {
            for (i, _) in m.iter() {
                seen[i] = true;
            }
        }
        (0..seen.len()).filter(|&i| seen[i]).collect()
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |acc, m| acc.gcd(m))
    }

    fn check_ctx(&self, other: &Polynomial) -> Result<(), PolyError> {
        if same_ctx(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(PolyError::ContextMismatch)
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ctx(other)?;
        let field = self.field();
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(field, &mut terms, m.clone(), c.clone());
        }
        Ok(Polynomial::from_map(&self.ctx, terms))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ctx(other)?;
        let field = self.field();
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(field, &mut terms, m.clone(), field.neg(c));
        }
        Ok(Polynomial::from_map(&self.ctx, terms))
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ctx(other)?;
        let field = self.field();
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                accumulate(field, &mut terms, m1.mul(m2), field.mul(c1, c2));
            }
        }
        Ok(Polynomial::from_map(&self.ctx, terms))
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(&self.ctx);
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            return Polynomial::from_term(&self.ctx, m.pow(e), self.field().pow(c, e));
        }
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, c: &Coeff) -> Polynomial {
        let field = self.field();
        if c.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, d)| (m.clone(), field.mul(c, d)))
            .collect();
        Polynomial::from_map(&self.ctx, terms)
    }

    pub fn scale_int(&self, v: i64) -> Polynomial {
        self.scale(&self.field().from_int(v))
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(n, c)| (n.mul(m), c.clone()))
            .collect();
        Polynomial::from_map(&self.ctx, terms)
    }

    /// `self / m` when `m` divides every term.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Polynomial> {
        let mut terms = BTreeMap::new();
        for (n, c) in &self.terms {
            terms.insert(n.div(m)?, c.clone());
        }
        Some(Polynomial::from_map(&self.ctx, terms))
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &Polynomial) -> Result<Option<Polynomial>, PolyError> {
        self.check_ctx(divisor)?;
        let field = self.field();
        let (dm, dc) = match divisor.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(PolyError::ZeroInput),
        };
        let dc_inv = field.inv(&dc)?;
        let mut rem = self.clone();
        let mut quo = BTreeMap::new();
        while let Some((m, c)) = rem.leading_term() {
            let Some(qm) = m.div(&dm) else {
                return Ok(None);
            };
            let qc = field.mul(c, &dc_inv);
            let t = Polynomial::from_term(&self.ctx, qm.clone(), qc.clone());
            rem = &rem - &(&t * divisor);
            quo.insert(qm, qc);
        }
        Ok(Some(Polynomial::from_map(&self.ctx, quo)))
    }

    /// Deletes every term that contains `var`.
    pub fn reduce_mod_variable(&self, var: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exponent(var) == 0)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Polynomial::from_map(&self.ctx, terms)
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let field = self.field();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                continue;
            }
            let dm = m.div(&Monomial::var(var, 1)).unwrap();
            accumulate(
                field,
                &mut terms,
                dm,
                field.mul(c, &field.from_int(e as i64)),
            );
        }
        Polynomial::from_map(&self.ctx, terms)
    }

    /// Homogenizes with respect to the form degree using `var`, which must
    /// not already occur.
    pub fn homogenize(&self, var: usize) -> Result<Polynomial, PolyError> {
        if self.involves(var) {
            return Err(PolyError::VariablePresent(self.ctx.name(var).to_string()));
        }
        let d = self.form_degree().unwrap_or(0);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let k = d - self.term_form_degree(m);
                (m.mul(&Monomial::var(var, k)), c.clone())
            })
            .collect();
        Ok(Polynomial::from_map(&self.ctx, terms))
    }

    /// Sets `var = 1`; the input must be homogeneous.
    pub fn dehomogenize(&self, var: usize) -> Result<Polynomial, PolyError> {
        if !self.is_homogeneous() {
            return Err(PolyError::NotHomogeneous);
        }
        Ok(self.set_variable_to_one(var))
    }

    pub(crate) fn set_variable_to_one(&self, var: usize) -> Polynomial {
        let field = self.field();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            accumulate(field, &mut terms, m.restrict(|i| i != var), c.clone());
        }
        Polynomial::from_map(&self.ctx, terms)
    }

    /// Same polynomial viewed in `target`, matching variables by name.
    pub fn embed(&self, target: &Ctx) -> Result<Polynomial, PolyError> {
        self.substitute(&Substitution::new(target))
    }

    /// Ring homomorphism image. Unassigned variables go to the variable of
    /// the same name in the target context.
    pub fn substitute(&self, sub: &Substitution) -> Result<Polynomial, PolyError> {
        let target = &sub.target;
        let src_field = self.field();
        let dst_field = target.field();
        if src_field != dst_field && *src_field != Field::Rationals {
            return Err(PolyError::ContextMismatch);
        }
        let support = self.support();
        let mut images: HashMap<usize, Polynomial> = HashMap::with_capacity(support.len());
        for &i in &support {
            let name = self.ctx.name(i);
            let img = match sub.images.get(name) {
                Some(p) => {
                    if !same_ctx(p.ctx(), target) {
                        return Err(PolyError::ContextMismatch);
                    }
                    p.clone()
                }
                None => Polynomial::var(target, name)?,
            };
            images.insert(i, img);
        }
        let mut powers: HashMap<(usize, u32), Polynomial> = HashMap::new();
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let c = dst_field.normalize(c)?;
            if c.is_zero() {
                continue;
            }
            let mut prod = Polynomial::from_term(target, Monomial::one(), c);
            for (i, e) in m.iter() {
                let img = &images[&i];
                let p = if e == 1 {
                    img
                } else {
                    powers.entry((i, e)).or_insert_with(|| img.pow(e))
                };
                prod = &prod * p;
                if prod.is_zero() {
                    break;
                }
            }
            for (pm, pc) in prod.terms {
                accumulate(dst_field, &mut out, pm, pc);
            }
        }
        Ok(Polynomial::from_map(target, out))
    }

    /// Substitution inside the polynomial's own context, by variable name.
    pub fn substitute_names(&self, images: &[(&str, Polynomial)]) -> Result<Polynomial, PolyError> {
        let mut sub = Substitution::new(&self.ctx);
        for (name, p) in images {
            self.ctx.var_index(name)?;
            sub = sub.with(name, p.clone());
        }
        self.substitute(&sub)
    }

    /// Renames variables inside the same context.
    pub fn rename(&self, pairs: &[(&str, &str)]) -> Result<Polynomial, PolyError> {
        let images: Vec<(&str, Polynomial)> = pairs
            .iter()
            .map(|(a, b)| Ok((*a, Polynomial::var(&self.ctx, b)?)))
            .collect::<Result<_, PolyError>>()?;
        self.substitute_names(&images)
    }

    /// Evaluates every variable at an integer residue modulo the prime `q`.
    /// Coefficients are reduced modulo `q`; `None` if a denominator vanishes.
    pub fn eval_mod(&self, point: &[u64], q: u64) -> Option<u64> {
        let field = self.field();
        let mut acc: u128 = 0;
        let q128 = q as u128;
        for (m, c) in &self.terms {
            let mut v = field.reduce_mod(c, q)? as u128;
            for (i, e) in m.iter() {
                v = v * pow_mod(point[i] as u128, e, q128) % q128;
            }
            acc = (acc + v) % q128;
        }
        Some(acc as u64)
    }

    /// Coefficients reduced to residues modulo `q` together with their
    /// monomials, for fast repeated evaluation.
    pub fn reduce_coefficients(&self, q: u64) -> Option<Vec<(Monomial, u64)>> {
        let field = self.field();
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms() {
            let r = field.reduce_mod(c, q)?;
            if r != 0 {
                out.push((m.clone(), r));
            }
        }
        Some(out)
    }

    pub fn sum<'a>(ctx: &Ctx, items: impl IntoIterator<Item = &'a Polynomial>) -> Polynomial {
        let mut acc = Polynomial::zero(ctx);
        for p in items {
            acc = &acc + p;
        }
        acc
    }

    pub fn product<'a>(ctx: &Ctx, items: impl IntoIterator<Item = &'a Polynomial>) -> Polynomial {
        let mut acc = Polynomial::one(ctx);
        for p in items {
            acc = &acc * p;
        }
        acc
    }

    /// Integer coefficient if the coefficient of `m` is an integer.
    pub fn integer_coefficient(&self, m: &Monomial) -> Option<BigInt> {
        let c = self.coefficient(m);
        c.is_integer().then(|| c.to_integer())
    }
}

fn pow_mod(mut b: u128, mut e: u32, q: u128) -> u128 {
    let mut acc = 1 % q;
    b %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    acc
}

/// Images of variables for [`Polynomial::substitute`], all living in `target`.
#[derive(Clone, Debug)]
pub struct Substitution {
    target: Ctx,
    images: HashMap<String, Polynomial>,
}

impl Substitution {
    pub fn new(target: &Ctx) -> Self {
        Substitution {
            target: target.clone(),
            images: HashMap::new(),
        }
    }

    pub fn with(mut self, name: &str, image: Polynomial) -> Self {
        self.images.insert(name.to_string(), image);
        self
    }

    pub fn set(&mut self, name: &str, image: Polynomial) {
        self.images.insert(name.to_string(), image);
    }

    pub fn target(&self) -> &Ctx {
        &self.target
    }

    pub fn image(&self, name: &str) -> Option<&Polynomial> {
        self.images.get(name)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            /// Panics if the operands live in different contexts; use the
            /// `checked_*` methods to get an error instead.
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$checked(rhs).expect("operands share a context")
            }
        }
        impl $trait<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let field = self.field();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), field.neg(c)))
            .collect();
        Polynomial::from_map(&self.ctx, terms)
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::parse::write_polynomial(f, self)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
