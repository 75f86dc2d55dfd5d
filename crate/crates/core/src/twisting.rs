//! Polynomials of twisting type modulo `m`.
//!
//! A homogeneous `g` in `x_0, ..., x_n` is of twisting type when it contains
//! every pure power `x_i^{deg g}` and its reduction modulo each `x_i` is an
//! `m`-th power. An inhomogeneous input is homogenized first.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::field::Field;
use crate::poly::{indexed_names, mth_root, Ctx, Monomial, PolyContext, PolyError, Polynomial};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwistingError {
    #[error("input polynomial is zero")]
    ZeroInput,
    #[error("degree too small: e*m = {em} must exceed n = {n}")]
    DegreeTooSmall { em: u32, n: usize },
    #[error("G does not contain x{0}^e")]
    MissingPurePower(usize),
    #[error("G must be homogeneous in x0..x{0}")]
    NotHomogeneous(usize),
    #[error("expected variables x0..x{n}, context has {found}")]
    WrongVariables { n: usize, found: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableCheck {
    pub variable: String,
    /// Coefficient of `x_i^{deg g}` (a polynomial in unit parameters), if present.
    pub pure_power_coefficient: Option<String>,
    /// Root of `g mod x_i`, when it is an `m`-th power.
    pub root: Option<String>,
    /// Unit factor split off in front of the root.
    pub unit: Option<String>,
    /// Why `g mod x_i` is not an `m`-th power.
    pub obstruction: Option<String>,
}

impl VariableCheck {
    pub fn passes(&self) -> bool {
        self.pure_power_coefficient.is_some() && self.root.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistingReport {
    pub input: Polynomial,
    pub homogenized: bool,
    pub m: u32,
    pub degree: u32,
    pub degree_divisible_by_m: bool,
    pub units_are_powers: bool,
    pub variables: Vec<VariableCheck>,
    pub verdict: bool,
}

impl fmt::Display for TwistingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "polynomial: {}", self.input)?;
        if self.homogenized {
            writeln!(f, "homogenized: yes")?;
        }
        writeln!(f, "m: {}", self.m)?;
        writeln!(f, "degree: {}", self.degree)?;
        writeln!(
            f,
            "degree divisible by m: {}",
            yes_no(self.degree_divisible_by_m)
        )?;
        writeln!(
            f,
            "units are m-th powers: {}",
            yes_no(self.units_are_powers)
        )?;
        for v in &self.variables {
            let pure = match &v.pure_power_coefficient {
                Some(c) => format!("contains {}^{} (coefficient {c})", v.variable, self.degree),
                None => format!("missing {}^{}", v.variable, self.degree),
            };
            let root = match (&v.root, &v.unit, &v.obstruction) {
                (Some(r), Some(u), _) if u != "1" => {
                    format!("mod {} = {u} * ({r})^{}", v.variable, self.m)
                }
                (Some(r), _, _) => format!("mod {} = ({r})^{}", v.variable, self.m),
                (None, _, Some(o)) => format!("mod {}: {o}", v.variable),
                (None, _, None) => format!("mod {}: not an m-th power", v.variable),
            };
            writeln!(f, "{}: {pure}; {root}", v.variable)?;
        }
        write!(
            f,
            "verdict: {}",
            if self.verdict {
                "twisting type"
            } else {
                "not twisting type"
            }
        )
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Decides whether `p` is of twisting type modulo `m`.
///
/// An inhomogeneous `p` is homogenized with `homogenizing_var`, which is
/// added in front of the variables if the context lacks it. Every form
/// variable of the (possibly extended) context is checked.
pub fn is_twisting_type(
    p: &Polynomial,
    m: u32,
    units_are_powers: bool,
    homogenizing_var: &str,
) -> Result<TwistingReport, TwistingError> {
    if p.is_zero() {
        return Err(TwistingError::ZeroInput);
    }
    let (g, homogenized) = if p.is_homogeneous() {
        (p.clone(), false)
    } else {
        let ctx = p.ctx();
        let q = match ctx.index_of(homogenizing_var) {
            Some(_) => p.clone(),
            None => {
                let mut vars: Vec<String> = vec![homogenizing_var.to_string()];
                let mut params = Vec::new();
                for (i, name) in ctx.names().iter().enumerate() {
                    if ctx.is_unit_param(i) {
                        params.push(name.clone());
                    } else {
                        vars.push(name.clone());
                    }
                }
                let ext = PolyContext::with_params(ctx.field().clone(), &vars, &params)?;
                p.embed(&ext)?
            }
        };
        let var = q.ctx().var_index(homogenizing_var)?;
        (q.homogenize(var)?, true)
    };
    let ctx = g.ctx().clone();
    let degree = g.form_degree().unwrap_or(0);
    let mut variables = Vec::new();
    for i in ctx.form_variables() {
        variables.push(check_variable(&g, &ctx, i, degree, m, units_are_powers));
    }
    let degree_divisible_by_m = degree % m == 0;
    let verdict = degree_divisible_by_m && variables.iter().all(VariableCheck::passes);
    Ok(TwistingReport {
        input: g,
        homogenized,
        m,
        degree,
        degree_divisible_by_m,
        units_are_powers,
        variables,
        verdict,
    })
}

fn check_variable(
    g: &Polynomial,
    ctx: &Ctx,
    i: usize,
    degree: u32,
    m: u32,
    units_are_powers: bool,
) -> VariableCheck {
    let pure = Monomial::var(i, degree);
    // coefficient of x_i^deg as a polynomial in the unit parameters
    let mut coeff = Polynomial::zero(ctx);
    for (mono, c) in g.terms() {
        if mono.restrict(|v| !ctx.is_unit_param(v)) == pure {
            let param_part = mono.restrict(|v| ctx.is_unit_param(v));
            coeff = coeff + Polynomial::monomial(ctx, param_part).scale(c);
        }
    }
    let pure_power_coefficient = (!coeff.is_zero()).then(|| coeff.to_string());
    let reduced = g.reduce_mod_variable(i);
    let (root, unit, obstruction) = if reduced.is_zero() {
        (Some("0".to_string()), None, None)
    } else {
        match mth_root(&reduced, m, units_are_powers) {
            Ok(r) => (Some(r.root.to_string()), Some(r.unit.to_string()), None),
            Err(e) => {
                let mut why = e.to_string();
                if !units_are_powers {
                    if let Ok(r) = mth_root(&reduced, m, true) {
                        why = format!(
                            "{why}; the unit factor {} is not a power with exponent {m} in {}",
                            r.unit,
                            ctx.field()
                        );
                    }
                }
                (None, None, Some(why))
            }
        }
    };
    VariableCheck {
        variable: ctx.name(i).to_string(),
        pure_power_coefficient,
        root,
        unit,
        obstruction,
    }
}

fn check_standard_vars(ctx: &Ctx, n: usize) -> Result<(), TwistingError> {
    let expected = indexed_names("x", 0, n + 1);
    let forms: Vec<&str> = ctx
        .form_variables()
        .into_iter()
        .map(|i| ctx.name(i))
        .collect();
    if forms != expected.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(TwistingError::WrongVariables {
            n,
            found: forms.join(","),
        });
    }
    Ok(())
}

/// `G^m + x_0^{em-n} x_1 ... x_n` for `G` homogeneous of degree `e` in
/// `x_0..x_n` containing every `x_i^e`.
pub fn make_twisting_g(g: &Polynomial, m: u32, n: usize) -> Result<Polynomial, TwistingError> {
    let ctx = g.ctx();
    check_standard_vars(ctx, n)?;
    if g.is_zero() {
        return Err(TwistingError::ZeroInput);
    }
    if !g.is_homogeneous() {
        return Err(TwistingError::NotHomogeneous(n));
    }
    let e = g.form_degree().unwrap_or(0);
    if e * m <= n as u32 {
        return Err(TwistingError::DegreeTooSmall { em: e * m, n });
    }
    let forms = ctx.form_variables();
    for (i, &v) in forms.iter().enumerate() {
        let present = g
            .terms()
            .any(|(mono, _)| mono.restrict(|w| !ctx.is_unit_param(w)) == Monomial::var(v, e));
        if !present {
            return Err(TwistingError::MissingPurePower(i));
        }
    }
    let tail = Monomial::from_pairs(
        std::iter::once((forms[0], e * m - n as u32)).chain(forms[1..].iter().map(|&v| (v, 1))),
    );
    Ok(g.pow(m) + Polynomial::monomial(ctx, tail))
}

/// `k[x_0..x_n]` with the unit parameter `t`.
pub fn proof_context(n: usize, field: Field) -> Ctx {
    PolyContext::with_params(field, &indexed_names("x", 0, n + 1), &["t".to_string()])
        .expect("generated names are valid")
}

/// `ceil((n + 1) / m)`.
pub fn proof_exponent(m: u32, n: usize) -> u32 {
    (n as u32 + 1).div_ceil(m)
}

/// `t (x_0^c + ... + x_n^c)^m - (-1)^n x_0^{mc-n} x_1 ... x_n` with
/// `c = ceil((n+1)/m)`, homogeneous of degree `mc <= m + n`.
pub fn make_proof_g(m: u32, n: usize, field: Field) -> Polynomial {
    let ctx = proof_context(n, field);
    proof_g_in(&ctx, m, n)
}

/// Same polynomial built in a context whose first `n + 1` variables are
/// `x_0..x_n` and which has a unit parameter `t`.
pub(crate) fn proof_g_in(ctx: &Ctx, m: u32, n: usize) -> Polynomial {
    let c = proof_exponent(m, n);
    let t = Polynomial::var(ctx, "t").expect("context declares t");
    let mut s = Polynomial::zero(ctx);
    for i in 0..=n {
        s = s + Polynomial::monomial(ctx, Monomial::var(i, c));
    }
    let tail =
        Monomial::from_pairs(std::iter::once((0, m * c - n as u32)).chain((1..=n).map(|i| (i, 1))));
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    t * s.pow(m) - Polynomial::monomial(ctx, tail).scale_int(sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn ctx(n: usize) -> Ctx {
        PolyContext::new(Field::Rationals, &indexed_names("x", 0, n + 1), &[]).unwrap()
    }

    #[test]
    fn tangent_conic() {
        let c = ctx(2);
        let g = parse("x0^2+x1^2+x2^2-2*x0*x1-2*x0*x2-2*x1*x2", &c).unwrap();
        let r = is_twisting_type(&g, 2, false, "x0").unwrap();
        assert!(r.verdict, "{r}");
        assert_eq!(r.variables[0].root.as_deref(), Some("x1 - x2"));
    }

    #[test]
    fn power_plus_monomial() {
        let c = ctx(2);
        let big_g = parse("x0^2 + x1^2 + x2^2", &c).unwrap();
        let g = make_twisting_g(&big_g, 2, 2).unwrap();
        assert_eq!(g, parse("(x0^2+x1^2+x2^2)^2 + x0^2*x1*x2", &c).unwrap());
        assert!(is_twisting_type(&g, 2, false, "x0").unwrap().verdict);

        let g3 = make_twisting_g(&parse("x0 + x1 + x2", &c).unwrap(), 3, 2).unwrap();
        assert_eq!(g3, parse("(x0+x1+x2)^3 + x0*x1*x2", &c).unwrap());
    }

    #[test]
    fn missing_pure_power() {
        let c = ctx(2);
        assert_eq!(
            make_twisting_g(&parse("x0^2 + x1*x2", &c).unwrap(), 2, 2),
            Err(TwistingError::MissingPurePower(1))
        );
        assert_eq!(
            make_twisting_g(&parse("x0 + x1 + x2", &c).unwrap(), 2, 2),
            Err(TwistingError::DegreeTooSmall { em: 2, n: 2 })
        );
        let g = parse("(x0^2+x1^2+x2^2)^2 + x0^2*x1*x2 - x1^4", &c).unwrap();
        let r = is_twisting_type(&g, 2, false, "x0").unwrap();
        assert!(!r.verdict);
        assert!(r.variables[1].pure_power_coefficient.is_none());
        assert!(r.to_string().contains("missing x1^4"));
    }

    #[test]
    fn proof_polynomials() {
        let g = make_proof_g(3, 2, Field::Rationals);
        assert_eq!(g, parse("t*(x0+x1+x2)^3 - x0*x1*x2", g.ctx()).unwrap());
        let g = make_proof_g(2, 2, Field::Rationals);
        assert_eq!(
            g,
            parse("t*(x0^2+x1^2+x2^2)^2 - x0^2*x1*x2", g.ctx()).unwrap()
        );
        for m in 2..6 {
            for n in 1..8 {
                let g = make_proof_g(m, n, Field::Rationals);
                let d = g.form_degree().unwrap();
                assert!(d <= m + n as u32);
                assert_eq!(d, m * proof_exponent(m, n));
            }
        }
    }

    #[test]
    fn unit_policy_decides_proof_polynomials() {
        let g = make_proof_g(3, 2, Field::Rationals);
        let strict = is_twisting_type(&g, 3, false, "x0").unwrap();
        assert!(!strict.verdict);
        let why = strict.variables[1].obstruction.as_ref().unwrap();
        assert!(why.contains("unit factor t"), "{why}");
        assert!(is_twisting_type(&g, 3, true, "x0").unwrap().verdict);
        let reduced = g.reduce_mod_variable(0);
        let expected = parse("t*(x1+x2)^3", g.ctx()).unwrap();
        assert_eq!(reduced, expected);
    }

    #[test]
    fn inhomogeneous_input_is_homogenized() {
        let c = PolyContext::new(Field::Rationals, &["x1", "x2"], &[]).unwrap();
        // dehomogenized tangent conic
        let b = parse("1 + x1^2 + x2^2 - 2*x1 - 2*x2 - 2*x1*x2", &c).unwrap();
        let r = is_twisting_type(&b, 2, false, "x0").unwrap();
        assert!(r.homogenized);
        assert!(r.verdict);
        assert_eq!(r.variables.len(), 3);
        assert_eq!(
            is_twisting_type(&Polynomial::zero(&c), 2, true, "x0"),
            Err(TwistingError::ZeroInput)
        );
    }
}
