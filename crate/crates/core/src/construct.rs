//! Equations of the degenerations used to certify torsion-order divisors:
//! the hypersurface `Z`, its blow-up along `x_0 = ... = x_n = 0`, the
//! special fibre with its rational section, the cyclic-cover branch
//! divisor, and explicit smooth examples.

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{cyclic_bounds, dimension_split, BoundsError, DimensionSplit};
use crate::field::{is_prime_u64, Coeff, Field};
use crate::hypersurface::{Ambient, HypersurfaceSpec};
use crate::pfister::{pfister_coefficient, pfister_hypersurface, PfisterError};
use crate::poly::{
    indexed_names, Ctx, Monomial, PolyContext, PolyError, Polynomial, Substitution,
    VerificationResult,
};
use crate::twisting::{proof_exponent, proof_g_in};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("degree {d} is below m + n = {min}")]
    DegreeTooSmall { d: u32, min: u32 },
    #[error("the characteristic divides m = {0}")]
    CharDividesM(u32),
    #[error("m must be at least 2, got {0}")]
    BadModulus(u32),
    #[error("degree {d} is below the cyclic-cover threshold {threshold}")]
    DegreeBelowThreshold { d: u32, threshold: u32 },
    #[error("m = {m} does not divide d = {d}")]
    NotDivisible { m: u32, d: u32 },
    #[error("p = {0} must be a prime coprime to m")]
    BadPrime(u64),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Pfister(#[from] PfisterError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

type Result<T> = std::result::Result<T, ConstructError>;

fn sign(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[allow(non_snake_case)]
fn checked_split(N: u32, m: u32, field: &Field) -> Result<DimensionSplit> {
    if m < 2 {
        return Err(ConstructError::BadModulus(m));
    }
    if field.divides(m as u64) {
        return Err(ConstructError::CharDividesM(m));
    }
    Ok(dimension_split(N as u64)?)
}

fn names(prefix: &str, start: usize, count: usize) -> Vec<String> {
    indexed_names(prefix, start, count)
}

fn context(field: &Field, vars: &[String], params: &[String]) -> Ctx {
    PolyContext::with_params(field.clone(), vars, params).expect("generated names are valid")
}

/// `c_j` as a polynomial in the variables `x1..xn` of `ctx`.
fn coefficient(ctx: &Ctx, m: u32, n: usize, j: usize) -> Result<Polynomial> {
    Ok(pfister_coefficient(m, n, j)?.embed(ctx)?)
}

fn x0_power(ctx: &Ctx, e: i64) -> Polynomial {
    assert!(e >= 0, "negative exponent {e} of x0");
    Polynomial::monomial(ctx, Monomial::var(0, e as u32))
}

fn var(ctx: &Ctx, name: &str) -> Polynomial {
    Polynomial::var(ctx, name).expect("variable declared")
}

fn xs_product(ctx: &Ctx, from: usize, n: usize) -> Polynomial {
    let mut p = Polynomial::one(ctx);
    for i in from..=n {
        p = p * var(ctx, &format!("x{i}"));
    }
    p
}

/// `sum_{j=1}^r x0^{n - deg c_j} c_j w_j^m + (-1)^n x1...xn w_{r+1}^m`
/// where `w` names the fibre coordinates.
fn fibre_sum(ctx: &Ctx, w: &str, m: u32, split: &DimensionSplit) -> Result<Polynomial> {
    let (n, r) = (split.n as usize, split.r as usize);
    let mut f = Polynomial::zero(ctx);
    for j in 1..=r {
        let c = coefficient(ctx, m, n, j)?;
        let deg = c.total_degree().unwrap_or(0) as i64;
        f = f + x0_power(ctx, n as i64 - deg) * c * var(ctx, &format!("{w}{j}")).pow(m);
    }
    let last = xs_product(ctx, 1, n).scale_int(sign(n)) * var(ctx, &format!("{w}{}", r + 1)).pow(m);
    Ok(f + last)
}

fn proof_g_degree(m: u32, n: usize) -> u32 {
    m * proof_exponent(m, n)
}

/// Context `k[x0..xn, y1..y_{r+1}]` with unit parameter `t`.
fn z_context(field: &Field, split: &DimensionSplit) -> Ctx {
    let mut vars = names("x", 0, split.n as usize + 1);
    vars.extend(names("y", 1, split.r as usize + 1));
    context(field, &vars, &["t".to_string()])
}

/// `F = g x0^{m+n-deg g} + sum_j x0^{n-deg c_j} c_j y_j^m + (-1)^n x1...xn y_{r+1}^m`
/// of degree `m + n` in `P^{N+1}`; a degree `d > m + n` is recorded as the
/// extra factor `x0^{d-m-n}`.
#[allow(non_snake_case)]
pub fn build_Z(N: u32, d: u32, m: u32, field: &Field) -> Result<HypersurfaceSpec> {
    let split = checked_split(N, m, field)?;
    let n = split.n as usize;
    let min = m + n as u32;
    if d < min {
        return Err(ConstructError::DegreeTooSmall { d, min });
    }
    let ctx = z_context(field, &split);
    let g = proof_g_in(&ctx, m, n);
    let g_deg = proof_g_degree(m, n) as i64;
    let f = g * x0_power(&ctx, (m as usize + n) as i64 - g_deg) + fibre_sum(&ctx, "y", m, &split)?;
    assert!(f.is_homogeneous() && f.form_degree() == Some(min));
    let mut spec = HypersurfaceSpec::projective(f, "hypersurface Z of the degeneration")
        .with_parameters(&[
            ("N", N as i64),
            ("d", d as i64),
            ("m", m as i64),
            ("n", n as i64),
            ("r", split.r as i64),
        ]);
    spec.extra_x0_power = d - min;
    Ok(spec)
}

/// The blow-up of `Z` with its generic fibre and exceptional fibre.
#[derive(Debug, Clone, Serialize)]
pub struct BlowUp {
    /// Bihomogeneous in `x0..xn` (weight `(1,0)`), `z0` (weight `(-1,1)`)
    /// and `z1..z_{r+1}` (weight `(0,1)`).
    pub equation: HypersurfaceSpec,
    /// `x0 = 1`: a degree-`m` hypersurface in `P^{r+1}` over `k(x1..xn)`.
    pub generic_fibre: HypersurfaceSpec,
    /// `z0 = 0` in the generic fibre: a hypersurface in `P^r`.
    pub d_eta: HypersurfaceSpec,
}

fn y_context(field: &Field, split: &DimensionSplit) -> Ctx {
    let mut vars = names("x", 0, split.n as usize + 1);
    vars.extend(names("z", 0, split.r as usize + 2));
    context(field, &vars, &["t".to_string()])
}

/// Fibre coordinates `prefix{start}..` as form variables over `k(x1..xn, extra)`.
fn fibre_context(
    field: &Field,
    prefix: &str,
    start: usize,
    count: usize,
    n: usize,
    extra: &[&str],
) -> Ctx {
    let mut params = names("x", 1, n);
    params.extend(extra.iter().map(|s| s.to_string()));
    context(field, &names(prefix, start, count), &params)
}

fn bundle_spec(
    equation: Polynomial,
    source: &str,
    base: i64,
    fibre: i64,
    params: &[(&str, i64)],
) -> HypersurfaceSpec {
    HypersurfaceSpec {
        equation,
        ambient: Ambient::Bundle {
            base_degree: base,
            fibre_degree: fibre,
        },
        degree: fibre as u32,
        source: source.to_string(),
        parameters: Vec::new(),
        extra_x0_power: 0,
    }
    .with_parameters(params)
}

#[allow(non_snake_case)]
pub fn build_Y(N: u32, m: u32, field: &Field) -> Result<BlowUp> {
    let split = checked_split(N, m, field)?;
    let (n, r) = (split.n as usize, split.r as usize);
    let ctx = y_context(field, &split);
    let g = proof_g_in(&ctx, m, n);
    let g_deg = proof_g_degree(m, n) as i64;
    let eq = g * x0_power(&ctx, (m as usize + n) as i64 - g_deg) * var(&ctx, "z0").pow(m)
        + fibre_sum(&ctx, "z", m, &split)?;
    let z0 = n + 1;
    let weights = |i: usize| -> (i64, i64) {
        if i <= n {
            (1, 0)
        } else if i == z0 {
            (-1, 1)
        } else {
            (0, 1)
        }
    };
    let base = eq.weighted_degree(|i| {
        if ctx.is_unit_param(i) {
            0
        } else {
            weights(i).0
        }
    });
    let fibre = eq.weighted_degree(|i| {
        if ctx.is_unit_param(i) {
            0
        } else {
            weights(i).1
        }
    });
    assert_eq!((base, fibre), (Some(n as i64), Some(m as i64)));
    let params = [
        ("N", N as i64),
        ("m", m as i64),
        ("n", n as i64),
        ("r", r as i64),
    ];

    let gctx = fibre_context(field, "z", 0, r + 2, n, &["t"]);
    let generic = eq.set_variable_to_one(0).embed(&gctx)?;
    let mut generic_fibre =
        HypersurfaceSpec::projective(generic, "generic fibre of the blow-up (x0 = 1)")
            .with_parameters(&params);
    generic_fibre.ambient = Ambient::Projective { dim: r + 1 };

    let dctx = fibre_context(field, "z", 1, r + 1, n, &[]);
    let zero = Polynomial::zero(&gctx);
    let d_eta = generic_fibre
        .equation
        .substitute_names(&[("z0", zero)])?
        .embed(&dctx)?;
    let d_eta =
        HypersurfaceSpec::projective(d_eta, "exceptional divisor over the generic point (z0 = 0)")
            .with_parameters(&params);

    Ok(BlowUp {
        equation: bundle_spec(
            eq,
            "blow-up of Z along x0 = ... = xn = 0",
            n as i64,
            m as i64,
            &params,
        ),
        generic_fibre,
        d_eta,
    })
}

/// Checks that `D_eta`, after renaming `z_j -> y_j` (`j <= r`) and
/// `z_{r+1} -> y_{2^n - 1}`, is the Pfister hypersurface for `(x1..xn)`
/// with the remaining `y` set to zero.
#[allow(non_snake_case)]
pub fn check_d_eta_in_pfister(N: u32, m: u32, field: &Field) -> Result<VerificationResult> {
    let blow = build_Y(N, m, field)?;
    let split = dimension_split(N as u64)?;
    let (n, r) = (split.n as usize, split.r as usize);
    let xctx = context(field, &names("x", 1, n), &[]);
    let chi: Vec<Polynomial> = (1..=n).map(|i| var(&xctx, &format!("x{i}"))).collect();
    let pf = pfister_hypersurface(m, &chi)?.equation;
    let pctx = pf.ctx().clone();
    let top = (1usize << n) - 1;
    let mut sub = Substitution::new(&pctx);
    for j in 1..=r {
        sub = sub.with(&format!("z{j}"), var(&pctx, &format!("y{j}")));
    }
    sub = sub.with(&format!("z{}", r + 1), var(&pctx, &format!("y{top}")));
    let renamed = blow.d_eta.equation.substitute(&sub)?;
    let zero = Polynomial::zero(&pctx);
    let killed: Vec<(String, Polynomial)> = std::iter::once(0)
        .chain(r + 1..top)
        .map(|j| (format!("y{j}"), zero.clone()))
        .collect();
    let killed: Vec<(&str, Polynomial)> = killed
        .iter()
        .map(|(k, v)| (k.as_str(), v.clone()))
        .collect();
    let restricted = pf.substitute_names(&killed)?;
    Ok(VerificationResult::from_difference(restricted - renamed))
}

/// The special fibre (`t = 0`, `x0 = 1`) over `k(x1..xn)` in the
/// coordinates `z0..z_{r+1}`.
#[allow(non_snake_case)]
pub fn special_fiber(N: u32, m: u32, field: &Field) -> Result<Polynomial> {
    let blow = build_Y(N, m, field)?;
    let gen = &blow.generic_fibre.equation;
    let zero = Polynomial::zero(gen.ctx());
    let split = dimension_split(N as u64)?;
    let ctx = fibre_context(field, "z", 0, split.r as usize + 2, split.n as usize, &[]);
    Ok(gen.substitute_names(&[("t", zero)])?.embed(&ctx)?)
}

/// Substitutes integer values for `z0..z_{r+1}` in the special fibre.
pub fn evaluate_section(special: &Polynomial, z: &[i64]) -> Result<VerificationResult> {
    let ctx = special.ctx();
    let images: Vec<(String, Polynomial)> = z
        .iter()
        .enumerate()
        .map(|(j, v)| (format!("z{j}"), Polynomial::from_int(ctx, *v)))
        .collect();
    let images: Vec<(&str, Polynomial)> = images
        .iter()
        .map(|(k, v)| (k.as_str(), v.clone()))
        .collect();
    Ok(VerificationResult::from_difference(
        special.substitute_names(&images)?,
    ))
}

/// The section `z0 = z_{r+1} = 1`, `z_j = 0` lies on the special fibre.
#[allow(non_snake_case)]
pub fn check_special_fiber_section(N: u32, m: u32, field: &Field) -> Result<VerificationResult> {
    let special = special_fiber(N, m, field)?;
    let r = dimension_split(N as u64)?.r as usize;
    let mut z = vec![0; r + 2];
    z[0] = 1;
    z[r + 1] = 1;
    evaluate_section(&special, &z)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentCheck {
    pub label: String,
    pub value: i64,
    /// `value > 0` is required rather than `value >= 0`.
    pub strict: bool,
    pub holds: bool,
}

/// The three lower bounds on exponents of `x0` in the branch polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentReport {
    pub d: u32,
    pub m: u32,
    pub n: u32,
    pub g_degree: u32,
    pub checks: Vec<ExponentCheck>,
}

impl ExponentReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn values(&self) -> Vec<i64> {
        self.checks.iter().map(|c| c.value).collect()
    }
}

impl fmt::Display for ExponentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "d = {}, m = {}, n = {}, deg g = {}",
            self.d, self.m, self.n, self.g_degree
        )?;
        for c in &self.checks {
            let rel = if c.strict { "positive" } else { "non-negative" };
            let mark = if c.holds { "ok" } else { "FAILS" };
            writeln!(f, "  {:<40} = {:>4}  {rel:<12} {mark}", c.label, c.value)?;
        }
        write!(f, "all exponents non-negative: {}", self.all_hold())
    }
}

/// Evaluates the exponent inequalities at `d` without any threshold check;
/// the middle one uses the bound `deg c_j <= n - 1`.
pub fn cyclic_exponents(n: u32, d: u32, m: u32) -> ExponentReport {
    let g_degree = proof_g_degree(m, n as usize);
    let (d_, m_, n_, g_) = (d as i64, m as i64, n as i64, g_degree as i64);
    let check = |label: &str, value: i64, strict: bool| ExponentCheck {
        label: label.to_string(),
        value,
        strict,
        holds: if strict { value > 0 } else { value >= 0 },
    };
    ExponentReport {
        d,
        m,
        n,
        g_degree,
        checks: vec![
            check("d - deg g - m + 1", d_ - g_ - m_ + 1, true),
            check(
                "d - 2m + 1 - deg c_j (deg c_j <= n-1)",
                d_ - 2 * m_ + 2 - n_,
                false,
            ),
            check("d - m - n + 1", d_ - m_ - n_ + 1, true),
        ],
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CyclicCover {
    pub branch: HypersurfaceSpec,
    /// `F~ - y1^m` with `y0` the exceptional coordinate and `y1` the cover
    /// coordinate.
    pub blowup: HypersurfaceSpec,
    /// `-x1 y1^m + sum_{j=2}^r c_j y_j^m + (-1)^n x1...xn y_{r+1}^m`.
    pub d_eta: HypersurfaceSpec,
    pub exponents: ExponentReport,
}

/// Branch divisor, blow-up and exceptional fibre for the `m:1` cyclic cover
/// of `P^N` of branch degree `d`.
#[allow(non_snake_case)]
pub fn build_cyclic(N: u32, d: u32, m: u32, field: &Field) -> Result<CyclicCover> {
    let split = checked_split(N, m, field)?;
    if !d.is_multiple_of(m) {
        return Err(ConstructError::NotDivisible { m, d });
    }
    let threshold = cyclic_bounds(N as u64, m as u64)?.min_degree_split as u32;
    if d < threshold {
        return Err(ConstructError::DegreeBelowThreshold { d, threshold });
    }
    let (n, r) = (split.n as usize, split.r as usize);
    let exponents = cyclic_exponents(n as u32, d, m);
    assert!(exponents.all_hold());
    let g_deg = proof_g_degree(m, n) as i64;
    let (d_, m_, n_) = (d as i64, m as i64, n as i64);
    let params = [
        ("N", N as i64),
        ("d", d_),
        ("m", m_),
        ("n", n_),
        ("r", r as i64),
    ];

    // The branch polynomial and its proper transform share everything but
    // the factor y0^m on the first term.
    let assemble = |ctx: &Ctx, y0: Polynomial| -> Result<Polynomial> {
        let x1m = var(ctx, "x1").pow(m - 1);
        let g = proof_g_in(ctx, m, n);
        let mut f = &x1m * &g * x0_power(ctx, d_ - g_deg - m_ + 1) * y0;
        for j in 2..=r {
            let c = coefficient(ctx, m, n, j)?;
            let e = d_ - 2 * m_ + 1 - c.total_degree().unwrap_or(0) as i64;
            f = f + x1m.clone() * x0_power(ctx, e) * c * var(ctx, &format!("y{j}")).pow(m);
        }
        let last = xs_product(ctx, 2, n).scale_int(sign(n))
            * x0_power(ctx, d_ - m_ - n_ + 1)
            * var(ctx, &format!("y{}", r + 1)).pow(m);
        Ok(f + last)
    };

    let mut vars = names("x", 0, n + 1);
    vars.extend(names("y", 2, r));
    let bctx = context(field, &vars, &["t".to_string()]);
    let f = assemble(&bctx, Polynomial::one(&bctx))?;
    assert!(f.is_homogeneous() && f.form_degree() == Some(d));
    let branch = HypersurfaceSpec::projective(f, "branch divisor of the cyclic cover")
        .with_parameters(&params);

    let mut vars = names("x", 0, n + 1);
    vars.extend(names("y", 0, r + 2));
    let uctx = context(field, &vars, &["t".to_string()]);
    let y0 = var(&uctx, "y0").pow(m);
    let tilde = assemble(&uctx, y0)?;
    let cover = tilde - var(&uctx, "y1").pow(m);
    let base_weight = |i: usize| -> i64 {
        match i {
            _ if uctx.is_unit_param(i) => 0,
            _ if i <= n => 1,
            _ if i == n + 1 => -1,
            _ if i == n + 2 => d_ / m_ - 1,
            _ => 0,
        }
    };
    let fibre_weight = |i: usize| -> i64 { i64::from(i > n && !uctx.is_unit_param(i)) };
    assert_eq!(cover.weighted_degree(base_weight), Some(d_ - m_));
    assert_eq!(cover.weighted_degree(fibre_weight), Some(m_));
    let blowup = bundle_spec(cover, "cyclic cover of the blow-up", d_ - m_, m_, &params);

    let dctx = fibre_context(field, "y", 1, r + 1, n, &[]);
    let mut eta = var(&dctx, "x1").scale_int(-1) * var(&dctx, "y1").pow(m);
    for j in 2..=r {
        eta = eta + coefficient(&dctx, m, n, j)? * var(&dctx, &format!("y{j}")).pow(m);
    }
    eta = eta
        + xs_product(&dctx, 1, n).scale_int(sign(n)) * var(&dctx, &format!("y{}", r + 1)).pow(m);
    let d_eta = HypersurfaceSpec::projective(
        eta,
        "exceptional divisor of the cyclic cover over the generic point",
    )
    .with_parameters(&params);

    Ok(CyclicCover {
        branch,
        blowup,
        d_eta,
        exponents,
    })
}

/// Coefficient field of the explicit examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleMode {
    /// Over `Q(s)` with `t` replaced by the prime `p`.
    RationalS,
    /// Over `F_p(s, t)`.
    FiniteST,
}

/// `F x0^{d-m-n} + s (sum x_i^d + sum y_j^d)`.
#[allow(non_snake_case)]
pub fn build_explicit_example(
    N: u32,
    d: u32,
    m: u32,
    p: u64,
    mode: ExampleMode,
) -> Result<HypersurfaceSpec> {
    if !is_prime_u64(p) || (m as u64).is_multiple_of(p) {
        return Err(ConstructError::BadPrime(p));
    }
    let field = match mode {
        ExampleMode::RationalS => Field::Rationals,
        ExampleMode::FiniteST => Field::from_characteristic(p).expect("p is prime"),
    };
    let z = build_Z(N, d, m, &field)?;
    let zctx = z.equation.ctx();
    let vars: Vec<String> = zctx
        .form_variables()
        .iter()
        .map(|&i| zctx.name(i).to_string())
        .collect();
    let params: Vec<String> = match mode {
        ExampleMode::RationalS => vec!["s".into()],
        ExampleMode::FiniteST => vec!["s".into(), "t".into()],
    };
    let ctx = context(&field, &vars, &params);
    let mut sub = Substitution::new(&ctx);
    if mode == ExampleMode::RationalS {
        let c = Coeff::from_integer(BigInt::from(p));
        sub = sub.with("t", Polynomial::constant(&ctx, &c)?);
    }
    let f = z.equation.substitute(&sub)? * x0_power(&ctx, z.extra_x0_power as i64);
    let mut fermat = Polynomial::zero(&ctx);
    for v in &vars {
        fermat = fermat + var(&ctx, v).pow(d);
    }
    let eq = f + var(&ctx, "s") * fermat;
    assert!(eq.is_homogeneous() && eq.form_degree() == Some(d));
    let mut params = z.parameters.clone();
    params.push(("p".into(), p as i64));
    let mut spec = HypersurfaceSpec::projective(eq, "explicit smooth example");
    spec.parameters = params;
    Ok(spec)
}
