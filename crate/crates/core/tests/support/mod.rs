//! Randomized suites shared by the property tests and the acceptance run.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use torsion_core::field::Field;
use torsion_core::poly::{mth_root, parse, Ctx, Monomial, PolyContext, Polynomial};
use torsion_core::residue::{iterated_residue, residue_determinant, MonomialSymbol};

pub const CASES: u32 = 1000;

pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

type RawTerm = (Vec<u32>, i64, i64);

fn raw_poly(vars: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Vec<RawTerm>> {
    prop::collection::vec(
        (
            prop::collection::vec(0..=max_deg, vars),
            -9i64..=9,
            prop::sample::select(vec![1i64, 2, 3, 5]),
        ),
        0..=max_terms,
    )
}

fn build(ctx: &Ctx, raw: &[RawTerm]) -> Polynomial {
    Polynomial::from_terms(
        ctx,
        raw.iter().map(|(e, n, d)| {
            let mono = Monomial::from_pairs(e.iter().enumerate().map(|(i, &k)| (i, k)));
            (mono, BigRational::new(BigInt::from(*n), BigInt::from(*d)))
        }),
    )
    .unwrap()
}

fn ctx_for(field: Field, vars: &[&str], params: &[&str]) -> Ctx {
    PolyContext::with_params(field, vars, params).unwrap()
}

fn report<V: std::fmt::Debug>(
    r: Result<(), proptest::test_runner::TestError<V>>,
    cases: u32,
) -> Result<u32, String> {
    r.map(|_| cases).map_err(|e| e.to_string())
}

pub fn ring_axioms(field: Field, vars: &[&str], cases: u32) -> Result<u32, String> {
    let ctx = ctx_for(field, vars, &[]);
    let n = vars.len();
    let strat = (raw_poly(n, 2, 5), raw_poly(n, 2, 5), raw_poly(n, 2, 5));
    let result = runner(cases).run(&strat, |(a, b, c)| {
        let (a, b, c) = (build(&ctx, &a), build(&ctx, &b), build(&ctx, &c));
        let zero = Polynomial::zero(&ctx);
        let one = Polynomial::one(&ctx);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &zero, a.clone());
        prop_assert_eq!(&a * &one, a.clone());
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        prop_assert_eq!(&a + &(-&a), zero.clone());
        prop_assert_eq!(a.pow(2), &a * &a);
        Ok(())
    });
    report(result, cases)
}

pub fn mth_root_round_trip(field: Field, roots: Vec<u32>, cases: u32) -> Result<u32, String> {
    let vars = ["x", "y", "z"];
    let ctx = ctx_for(field, &vars, &["t"]);
    let strat = (raw_poly(4, 2, 4), prop::sample::select(roots), 1u32..=3);
    let result = runner(cases).run(&strat, |(raw, m, tpow)| {
        let p = build(&ctx, &raw);
        if p.is_zero() {
            return Ok(());
        }
        let power = p.pow(m);
        let strict = mth_root(&power, m, false).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(strict.unit.is_one());
        prop_assert_eq!(strict.root.pow(m), power.clone());

        let scaled = power.scale_int(-2) * Polynomial::var(&ctx, "t").unwrap().pow(tpow);
        let loose = mth_root(&scaled, m, true).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&loose.unit * &loose.root.pow(m), scaled);

        let x = Polynomial::var(&ctx, "x").unwrap();
        if !p.is_constant() {
            let twisted = &power * &x;
            let deg = twisted.degree_in(0);
            if !deg.is_multiple_of(m) {
                prop_assert!(mth_root(&twisted, m, true).is_err());
            }
        }
        Ok(())
    });
    report(result, cases)
}

pub fn parse_print_round_trip(field: Field, cases: u32) -> Result<u32, String> {
    let ctx = ctx_for(field, &["x0", "x1", "y1", "y2"], &["s", "t"]);
    let strat = raw_poly(6, 3, 6);
    let result = runner(cases).run(&strat, |raw| {
        let p = build(&ctx, &raw);
        let text = p.to_string();
        let back = parse(&text, &ctx).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_string(), text);
        Ok(())
    });
    report(result, cases)
}

fn symbol_strategy() -> impl Strategy<Value = (u32, usize, usize, Vec<Vec<i64>>, i64)> {
    (2u32..=12, 1usize..=4, 0usize..=2).prop_flat_map(|(m, n, extra)| {
        let cols = n + extra;
        (
            Just(m),
            Just(n),
            Just(cols),
            prop::collection::vec(prop::collection::vec(-20i64..=20, cols), n),
            -20i64..=20,
        )
    })
}

fn names(cols: usize) -> Vec<String> {
    (1..=cols).map(|i| format!("x{i}")).collect()
}

fn residue_along(s: &MonomialSymbol, order: &[usize]) -> Result<u32, TestCaseError> {
    let names: Vec<&str> = order.iter().map(|&c| s.vars[c].as_str()).collect();
    iterated_residue(s, &names).map_err(|e| TestCaseError::fail(e.to_string()))
}

/// Swapping two entries negates every iterated residue; scaling and
/// splitting one entry as a product are linear; the composed residue
/// agrees with the determinant formula.
pub fn residue_laws(cases: u32) -> Result<u32, String> {
    let strat = symbol_strategy().prop_flat_map(|(m, n, cols, rows, c)| {
        (
            Just((m, n, cols, rows, c)),
            Just((0..cols).collect::<Vec<_>>()).prop_shuffle(),
            prop::collection::vec(-20i64..=20, cols),
            0..n,
            0..n,
            -20i64..=20,
        )
    });
    let result = runner(cases).run(&strat, |((m, n, cols, rows, c), perm, other, i, j, e)| {
        let mk =
            |rows: Vec<Vec<i64>>, c: i64| MonomialSymbol::new(m, c, names(cols), rows).unwrap();
        let s = mk(rows.clone(), c);
        let order = &perm[..n];
        let base = residue_along(&s, order)?;
        prop_assert_eq!(base, residue_determinant(&s, order));

        let mut swapped = rows.clone();
        swapped.swap(i, j);
        let sw = residue_along(&mk(swapped, c), order)?;
        if i == j {
            prop_assert_eq!(sw, base);
        } else {
            prop_assert_eq!((sw + base) % m, 0);
        }

        let scaled = residue_along(&mk(rows.clone(), c * e), order)?;
        prop_assert_eq!(scaled as i64, (base as i64 * e).rem_euclid(m as i64));

        let mut with_other = rows.clone();
        with_other[i] = other.clone();
        let mut summed = rows.clone();
        summed[i] = rows[i].iter().zip(&other).map(|(a, b)| a + b).collect();
        let lhs = residue_along(&mk(summed, c), order)?;
        let rhs = (base + residue_along(&mk(with_other, c), order)?) % m;
        prop_assert_eq!(lhs, rhs);

        let reduced: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.iter().map(|a| a + m as i64).collect())
            .collect();
        prop_assert_eq!(residue_along(&mk(reduced, c), order)?, base);
        Ok(())
    });
    report(result, cases)
}

/// Every suite with its name, for the acceptance summary.
pub fn all_suites(cases: u32) -> Vec<(&'static str, Result<u32, String>)> {
    let f7 = || Field::from_characteristic(7).unwrap();
    vec![
        (
            "ring axioms over Q",
            ring_axioms(Field::Rationals, &["x", "y", "z"], cases),
        ),
        (
            "ring axioms over F_7",
            ring_axioms(f7(), &["x", "y", "z", "w"], cases),
        ),
        (
            "m-th roots over Q",
            mth_root_round_trip(Field::Rationals, vec![2, 3, 4], cases),
        ),
        (
            "m-th roots over F_7",
            mth_root_round_trip(f7(), vec![2, 3, 7], cases),
        ),
        (
            "parse/print over Q",
            parse_print_round_trip(Field::Rationals, cases),
        ),
        ("parse/print over F_7", parse_print_round_trip(f7(), cases)),
        ("residue laws", residue_laws(cases)),
    ]
}
