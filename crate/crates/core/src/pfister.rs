//! Fermat-Pfister forms of degree `m`.
//!
//! `Pf_{m,n} = sum_j c_j y_j^m` over `j < 2^n`, where `c_j = prod (-x_i)^{e_i}`
//! for the binary digits `e_i` of `j`. The forms satisfy the split
//! `Pf_{m,n} = Pf_{m,n-1}(y_0..) - x_n Pf_{m,n-1}(y_{2^{n-1}}..)` and the
//! telescoping `Pf_{m,n} = y_0^m - sum a_i` with `a_i = x_i Pf_{m,i-1}` on the
//! window `y_{2^{i-1}}, ..., y_{2^i - 1}`.

use serde::Serialize;
use thiserror::Error;

use crate::field::Field;
use crate::hypersurface::HypersurfaceSpec;
use crate::milnor::{propagated_chain, relation_context, MilnorError, UniversalRelation};
use crate::poly::{
    indexed_names, Ctx, Monomial, PolyContext, PolyError, Polynomial, VerificationResult,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PfisterError {
    #[error("degree must be at least 2, got {0}")]
    BadDegree(u32),
    #[error("coefficient index {j} is outside 0..{size}")]
    IndexOutOfRange { j: usize, size: usize },
    #[error("parameter {0} is zero")]
    ZeroParameter(usize),
    #[error("the characteristic divides m = {0}")]
    CharDividesM(u32),
    #[error("canonical relation differs from the propagated chain at entry {0}")]
    EquivalenceFailure(usize),
    #[error("too many folds: {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Milnor(#[from] MilnorError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Largest fold count accepted; `2^n` coordinates are created.
pub const MAX_FOLDS: usize = 16;

/// `k[x_1..x_n, y_0..y_{2^n - 1}]`.
pub fn pfister_context(n: usize, field: Field) -> Ctx {
    let mut names = indexed_names("x", 1, n);
    names.extend(indexed_names("y", 0, 1 << n));
    PolyContext::new(field, &names, &[]).expect("generated names are valid")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PfisterForm {
    pub m: u32,
    pub n: usize,
    pub body: Polynomial,
    pub coefficients: Vec<Polynomial>,
}

impl PfisterForm {
    pub fn ctx(&self) -> &Ctx {
        self.body.ctx()
    }
}

fn check_args(m: u32, n: usize) -> Result<(), PfisterError> {
    if m < 2 {
        return Err(PfisterError::BadDegree(m));
    }
    if n > MAX_FOLDS {
        return Err(PfisterError::TooLarge(n));
    }
    Ok(())
}

// c_j in a context whose first variables are x_1..x_n.
fn coefficient_in(ctx: &Ctx, j: usize) -> Polynomial {
    let mut bits = Vec::new();
    let mut rest = j;
    let mut i = 0;
    while rest > 0 {
        if rest & 1 == 1 {
            bits.push((i, 1));
        }
        rest >>= 1;
        i += 1;
    }
    let sign = if bits.len() % 2 == 0 { 1 } else { -1 };
    Polynomial::monomial(ctx, Monomial::from_pairs(bits)).scale_int(sign)
}

/// `sum_j c_j(x) y_{offset + j}^m` for `j < 2^n`, built directly in `ctx`
/// where `x_i` has index `i - 1` and `y_k` has index `y_base + k`.
fn form_in(ctx: &Ctx, m: u32, n: usize, y_base: usize, offset: usize) -> Polynomial {
    let mut terms = Vec::with_capacity(1 << n);
    for j in 0..(1usize << n) {
        let c = coefficient_in(ctx, j);
        let (cm, cc) = c.leading_term().unwrap();
        let mono = cm.mul(&Monomial::var(y_base + offset + j, m));
        terms.push((mono, cc.clone()));
    }
    Polynomial::from_terms(ctx, terms).expect("integer coefficients")
}

/// `Pf_{m,n}` over the rationals, with `Pf_{m,0} = y_0^m`.
pub fn pfister_form(m: u32, n: usize) -> Result<PfisterForm, PfisterError> {
    pfister_form_over(m, n, Field::Rationals)
}

pub fn pfister_form_over(m: u32, n: usize, field: Field) -> Result<PfisterForm, PfisterError> {
    check_args(m, n)?;
    let ctx = pfister_context(n, field);
    let body = form_in(&ctx, m, n, n, 0);
    let coefficients = (0..1usize << n).map(|j| coefficient_in(&ctx, j)).collect();
    Ok(PfisterForm {
        m,
        n,
        body,
        coefficients,
    })
}

/// `c_j = prod (-x_i)^{e_i}` where `j = sum e_i 2^{i-1}`.
pub fn pfister_coefficient(m: u32, n: usize, j: usize) -> Result<Polynomial, PfisterError> {
    check_args(m, n)?;
    if j >= 1 << n {
        return Err(PfisterError::IndexOutOfRange { j, size: 1 << n });
    }
    Ok(coefficient_in(&pfister_context(n, Field::Rationals), j))
}

/// `a_i = x_i Pf_{m,i-1}(y_{2^{i-1}}, ..., y_{2^i - 1})` in the relation
/// ring with `i` x-variables and `2^i - 1` y-variables.
pub fn pfister_a(m: u32, i: usize) -> Result<Polynomial, PfisterError> {
    check_args(m, i)?;
    if i == 0 {
        return Err(PfisterError::IndexOutOfRange { j: 0, size: 0 });
    }
    let ctx = relation_context(i, (1 << i) - 1, Field::Rationals);
    Ok(a_in(&ctx, m, i, i - 1))
}

// a_i in a context with x_1.. at 0.. and y_k at y_base + k; y_0 itself is
// never touched, so it may be absent.
fn a_in(ctx: &Ctx, m: u32, i: usize, y_base: usize) -> Polynomial {
    let window = form_in(ctx, m, i - 1, y_base, 1 << (i - 1));
    Polynomial::var_index(ctx, i - 1) * window
}

/// Checks the split and the telescoping identity for `Pf_{m,n}` exactly.
pub fn verify_pfister_identities(m: u32, n: usize) -> Result<VerificationResult, PfisterError> {
    let form = pfister_form(m, n)?;
    verify_pfister_body(m, n, &form.body)
}

/// Same checks against an arbitrary candidate body in the context of
/// [`pfister_context`]. The residual is the first failing identity's
/// right-hand side minus `body`.
pub fn verify_pfister_body(
    m: u32,
    n: usize,
    body: &Polynomial,
) -> Result<VerificationResult, PfisterError> {
    check_args(m, n)?;
    if n == 0 {
        return Err(PfisterError::IndexOutOfRange { j: 0, size: 0 });
    }
    let ctx = body.ctx().clone();
    let y = |k: usize| n + k;

    // split, assembled from the (n-1)-fold form renamed onto each half
    let lower = pfister_form_over(m, n - 1, ctx.field().clone())?;
    let half = 1usize << (n - 1);
    let first = lower.body.embed(&ctx)?;
    let mut second_names: Vec<(String, String)> = Vec::with_capacity(half);
    for k in 0..half {
        second_names.push((format!("y{k}"), format!("y{}", k + half)));
    }
    let pairs: Vec<(&str, &str)> = second_names
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    let second = first.rename(&pairs)?;
    let split = &first - &(Polynomial::var_index(&ctx, n - 1) * second);
    let r = VerificationResult::from_difference(split.checked_sub(body)?);
    if !r.is_pass() {
        return Ok(r);
    }

    // telescope, from the a_i family
    let mut tele = Polynomial::var_index(&ctx, y(0)).pow(m);
    for i in 1..=n {
        tele = &tele - &a_in(&ctx, m, i, y(0));
    }
    Ok(VerificationResult::from_difference(tele.checked_sub(body)?))
}

/// The relation with `s = 2^n - 1` and entries `a_1, ..., a_n`, after
/// checking that it coincides entrywise with the propagated chain. The
/// chain's witnesses are kept.
pub fn canonical_relation(m: u32, n: usize) -> Result<UniversalRelation, PfisterError> {
    check_args(m, n)?;
    let chain = propagated_chain(m, n, Field::Rationals)?;
    let ctx = chain.ctx().clone();
    for i in 1..=n {
        let a = a_in(&ctx, m, i, n - 1);
        if a != chain.rhs()[i - 1] {
            return Err(PfisterError::EquivalenceFailure(i));
        }
    }
    Ok(chain)
}

/// The hypersurface `sum_j prod (-chi_i)^{e_i} y_j^m = 0` in `P^{2^n - 1}`.
///
/// The `chi_i` are constants of the field or polynomials in parameters of
/// their own context; every variable of that context becomes a unit
/// parameter of the output.
pub fn pfister_hypersurface(m: u32, chi: &[Polynomial]) -> Result<HypersurfaceSpec, PfisterError> {
    check_args(m, chi.len())?;
    let n = chi.len();
    let field = match chi.first() {
        Some(c) => c.field().clone(),
        None => Field::Rationals,
    };
    if field.divides(m as u64) {
        return Err(PfisterError::CharDividesM(m));
    }
    if let Some(i) = chi.iter().position(Polynomial::is_zero) {
        return Err(PfisterError::ZeroParameter(i + 1));
    }
    let ys = indexed_names("y", 0, 1 << n);
    let params: Vec<String> = chi
        .first()
        .map(|c| c.ctx().names().to_vec())
        .unwrap_or_default();
    let ctx = PolyContext::with_params(field, &ys, &params)?;
    let chi: Vec<Polynomial> = chi
        .iter()
        .map(|c| c.embed(&ctx))
        .collect::<Result<_, _>>()?;
    let mut eq = Polynomial::zero(&ctx);
    for j in 0..(1usize << n) {
        let mut c = Polynomial::var_index(&ctx, j).pow(m);
        for (i, x) in chi.iter().enumerate() {
            if j >> i & 1 == 1 {
                c = c * -x;
            }
        }
        eq = eq + c;
    }
    Ok(HypersurfaceSpec::projective(eq, "Pfister hypersurface")
        .with_parameters(&[("m", m as i64), ("n", n as i64)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    #[test]
    fn zero_fold_form() {
        for m in 2..5 {
            let f = pfister_form(m, 0).unwrap();
            assert_eq!(f.body.to_string(), format!("y0^{m}"));
        }
    }

    #[test]
    fn two_fold_quadratic_form() {
        let f = pfister_form(2, 2).unwrap();
        assert_eq!(
            f.body,
            parse("y0^2 - x1*y1^2 - x2*y2^2 + x1*x2*y3^2", f.ctx()).unwrap()
        );
        let cs: Vec<String> = f.coefficients.iter().map(|c| c.to_string()).collect();
        assert_eq!(cs, ["1", "-x1", "-x2", "x1*x2"]);
    }

    #[test]
    fn coefficients() {
        assert_eq!(pfister_coefficient(2, 3, 0).unwrap().to_string(), "1");
        assert_eq!(pfister_coefficient(2, 3, 1).unwrap().to_string(), "-x1");
        assert_eq!(pfister_coefficient(2, 3, 5).unwrap().to_string(), "x1*x3");
        assert_eq!(
            pfister_coefficient(2, 3, 8),
            Err(PfisterError::IndexOutOfRange { j: 8, size: 8 })
        );
    }

    #[test]
    fn a_family() {
        assert_eq!(pfister_a(4, 1).unwrap().to_string(), "x1*y1^4");
        assert_eq!(
            pfister_a(2, 2).unwrap().to_string(),
            "-x1*x2*y3^2 + x2*y2^2"
        );
        for i in 1..5 {
            let a = pfister_a(3, i).unwrap();
            for (mono, _) in a.terms() {
                let ydeg: u32 = mono.iter().filter(|(v, _)| *v >= i).map(|(_, e)| e).sum();
                assert_eq!(ydeg, 3);
            }
        }
    }

    #[test]
    fn identities_hold() {
        assert!(verify_pfister_identities(2, 1).unwrap().is_pass());
        assert!(verify_pfister_identities(3, 3).unwrap().is_pass());
    }

    #[test]
    fn mutated_sign_fails_with_expected_residual() {
        let f = pfister_form(2, 2).unwrap();
        let bad = parse("y0^2 - x1*y1^2 - x2*y2^2 - x1*x2*y3^2", f.ctx()).unwrap();
        let r = verify_pfister_body(2, 2, &bad).unwrap();
        assert_eq!(r.residual().unwrap().to_string(), "2*x1*x2*y3^2");

        let f7 = pfister_form_over(2, 2, Field::from_characteristic(7).unwrap()).unwrap();
        let bad = parse("y0^2 - x1*y1^2 - x2*y2^2 - x1*x2*y3^2", f7.ctx()).unwrap();
        let r = verify_pfister_body(2, 2, &bad).unwrap();
        assert_eq!(r.residual().unwrap().to_string(), "2*x1*x2*y3^2");
    }

    #[test]
    fn canonical_relation_matches_chain() {
        let r = canonical_relation(2, 1).unwrap();
        assert_eq!(r.to_string(), "(x1) = (x1*y1^2)");
        let r = canonical_relation(5, 3).unwrap();
        assert_eq!(r.s, 7);
        assert_eq!(r.rhs()[1], parse("x2*y2^5 - x1*x2*y3^5", r.ctx()).unwrap());
    }

    #[test]
    fn hypersurfaces() {
        let p = PolyContext::new(Field::Rationals, &["u", "v"], &[]).unwrap();
        let chi = [parse("u", &p).unwrap(), parse("v", &p).unwrap()];
        let h = pfister_hypersurface(2, &chi).unwrap();
        assert_eq!(
            h.equation,
            parse("y0^2 - u*y1^2 - v*y2^2 + u*v*y3^2", h.equation.ctx()).unwrap()
        );
        assert_eq!(h.degree, 2);
        assert!(h.equation.is_homogeneous());

        let t = PolyContext::new(Field::Rationals, &["t"], &["t"]).unwrap();
        let h = pfister_hypersurface(3, &[parse("t", &t).unwrap()]).unwrap();
        assert_eq!(h.equation.to_string(), "-y1^3*t + y0^3");

        let f3 = PolyContext::new(Field::from_characteristic(3).unwrap(), &["t"], &[]).unwrap();
        assert_eq!(
            pfister_hypersurface(3, &[parse("t", &f3).unwrap()]),
            Err(PfisterError::CharDividesM(3))
        );
        assert_eq!(
            pfister_hypersurface(2, &[Polynomial::zero(&p)]),
            Err(PfisterError::ZeroParameter(1))
        );
    }
}
