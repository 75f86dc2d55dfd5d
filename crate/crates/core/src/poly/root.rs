//! Extraction of `m`-th roots of polynomials.
//!
//! The root is built term by term from the top: once the leading part `q` of
//! the root is known, the next term is `lt(P - q^m) / (m * lt(q)^(m-1))`.
//! Any inexact monomial division, or a candidate whose `m`-th power drops
//! below the trailing term of `P`, proves that `P` is not an `m`-th power.
//! When the characteristic `p` divides `m`, `p`-th roots are taken first by
//! dividing exponents, which is exact because `a^p = a` in `F_p`.

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::parse::monomial_to_string;
use super::{Monomial, PolyError, Polynomial};
use crate::field::Field;

/// `unit * root^m` equals the input. `unit` is `1` in strict mode and
/// otherwise a constant times a monomial in unit parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MthRoot {
    pub root: Polynomial,
    pub unit: Polynomial,
}

/// Finds `q` with `u * q^m = p`.
///
/// With `units_are_powers` the unit part (leading constant and the common
/// monomial in unit parameters) is split off first and the returned root is
/// monic. Without it `u = 1` and constants must have an `m`-th root in the
/// field itself; the root's leading coefficient is then the canonical root
/// returned by [`Field::nth_root`].
pub fn mth_root(p: &Polynomial, m: u32, units_are_powers: bool) -> Result<MthRoot, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroInput);
    }
    assert!(m >= 1, "root degree must be positive");
    let ctx = p.ctx().clone();
    let field = ctx.field().clone();

    let (unit, mut target) = if units_are_powers {
        let content = p.monomial_content().restrict(|i| ctx.is_unit_param(i));
        let stripped = p
            .div_monomial(&content)
            .expect("content divides every term");
        let lc = stripped.leading_term().unwrap().1.clone();
        let monic = stripped.scale(&field.inv(&lc)?);
        (Polynomial::from_term(&ctx, content, lc), monic)
    } else {
        (Polynomial::one(&ctx), p.clone())
    };

    let mut rest = m;
    if let Field::Prime(pr) = &field {
        if let Some(pr) = pr.to_u32() {
            while rest.is_multiple_of(pr) {
                target = frobenius_root(&target, pr)?;
                rest /= pr;
            }
        }
    }
    let root = if rest == 1 {
        target
    } else {
        peel(&target, rest)?
    };
    debug_assert_eq!(&unit * &root.pow(m), *p);
    Ok(MthRoot { root, unit })
}

fn not_a_power(p: &Polynomial, m: u32, witness: &Monomial) -> PolyError {
    PolyError::NotAPower {
        m,
        witness: monomial_to_string(p.ctx(), witness),
    }
}

fn frobenius_root(p: &Polynomial, pr: u32) -> Result<Polynomial, PolyError> {
    let mut terms = Vec::with_capacity(p.num_terms());
    for (mono, c) in p.terms() {
        match mono.root(pr) {
            Some(r) => terms.push((r, c.clone())),
            None => return Err(not_a_power(p, pr, mono)),
        }
    }
    Polynomial::from_terms(p.ctx(), terms)
}

// m is invertible in the field here.
fn peel(p: &Polynomial, m: u32) -> Result<Polynomial, PolyError> {
    let ctx = p.ctx();
    let field = ctx.field();
    let (lm, lc) = p.leading_term().unwrap();
    let (tm, _) = p.trailing_term().unwrap();
    let root_m = lm.root(m).ok_or_else(|| not_a_power(p, m, lm))?;
    let root_c = field.nth_root(lc, m).ok_or_else(|| not_a_power(p, m, lm))?;
    let lead = Polynomial::from_term(ctx, root_m.clone(), root_c.clone());
    // m * lt(q)^(m-1) is fixed once the leading term is known
    let denom_m = root_m.pow(m - 1);
    let denom_c = field.mul(&field.from_int(m as i64), &field.pow(&root_c, m - 1));
    let denom_inv = field.inv(&denom_c)?;

    let mut q = lead;
    loop {
        let diff = p - &q.pow(m);
        let Some((dm, dc)) = diff.leading_term() else {
            return Ok(q);
        };
        let next_m = dm.div(&denom_m).ok_or_else(|| not_a_power(p, m, dm))?;
        if next_m.pow(m) < *tm {
            return Err(not_a_power(p, m, dm));
        }
        let next_c = field.mul(dc, &denom_inv);
        debug_assert!(!next_c.is_zero());
        q = &q + &Polynomial::from_term(ctx, next_m, next_c);
    }
}
