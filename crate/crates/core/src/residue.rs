//! Tame residues of symbols whose entries are monomials.
//!
//! A symbol `e * (u_1 x^{A_1}, ..., u_n x^{A_n})` over a base whose constants
//! are `m`-th powers only depends on the exponent matrix `A` mod `m` and the
//! multiple `e`. Expanding one row multilinearly along `x_v` gives the
//! residue rule `sum_j (-1)^{j-1} A[j][v] * (rows without j, column v
//! dropped)`; terms using `x_v` in two slots contain `(x_v, x_v) = (x_v, -1)`
//! and vanish. Iterating the rule along `v_1, ..., v_n` is a Laplace expansion,
//! so the full iterated residue is `e * det A[:, (v_1..v_n)]`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidueError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u32),
    #[error("row {row} has {found} exponents, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` repeated in the residue order")]
    RepeatedVariable(String),
    #[error("order has {given} variables but the symbol has degree {degree}")]
    OrderIncomplete { given: usize, degree: usize },
    #[error("symbol text: {0}")]
    Format(String),
}

/// `coeff * (x^{rows[0]}, ..., x^{rows[n-1]})` with exponents mod `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MonomialSymbol {
    pub m: u32,
    pub coeff: u32,
    pub vars: Vec<String>,
    pub rows: Vec<Vec<u32>>,
}

impl MonomialSymbol {
    pub fn new(
        m: u32,
        coeff: i64,
        vars: Vec<String>,
        rows: Vec<Vec<i64>>,
    ) -> Result<Self, ResidueError> {
        if m < 2 {
            return Err(ResidueError::BadModulus(m));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != vars.len() {
                return Err(ResidueError::RaggedRow {
                    row: i + 1,
                    found: r.len(),
                    expected: vars.len(),
                });
            }
        }
        let md = m as i64;
        Ok(MonomialSymbol {
            m,
            coeff: coeff.rem_euclid(md) as u32,
            vars,
            rows: rows
                .into_iter()
                .map(|r| r.into_iter().map(|e| e.rem_euclid(md) as u32).collect())
                .collect(),
        })
    }

    /// `e * (x_1, ..., x_n)` on variables `x1..xn`.
    pub fn generator(m: u32, n: usize, e: i64) -> Result<Self, ResidueError> {
        let vars = (1..=n).map(|i| format!("x{i}")).collect();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        MonomialSymbol::new(m, e, vars, rows)
    }

    pub fn zero(m: u32, vars: Vec<String>) -> Self {
        MonomialSymbol {
            m,
            coeff: 0,
            vars,
            rows: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == 0
    }

    pub fn scaled(&self, e: i64) -> MonomialSymbol {
        let m = self.m as i64;
        let c = (self.coeff as i64 * e.rem_euclid(m)).rem_euclid(m) as u32;
        let mut out = self.clone();
        out.coeff = c;
        out.normalize()
    }

    /// Reduces everything mod `m` and returns the zero symbol when a row is
    /// zero (a unit times an `m`-th power) or two rows coincide.
    pub fn normalize(&self) -> MonomialSymbol {
        let m = self.m;
        let rows: Vec<Vec<u32>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e % m).collect())
            .collect();
        let coeff = self.coeff % m;
        let zero_row = rows.iter().any(|r| r.iter().all(|&e| e == 0));
        let repeated = (0..rows.len()).any(|i| (i + 1..rows.len()).any(|j| rows[i] == rows[j]));
        if coeff == 0 || zero_row || repeated {
            return MonomialSymbol::zero(m, self.vars.clone());
        }
        MonomialSymbol {
            m,
            coeff,
            vars: self.vars.clone(),
            rows,
        }
    }

    pub fn var_index(&self, name: &str) -> Result<usize, ResidueError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| ResidueError::UnknownVariable(name.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "symbol m={} coeff={} vars={}\n",
            self.m,
            self.coeff,
            self.vars.join(",")
        );
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(u32::to_string).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ResidueError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| ResidueError::Format("empty input".into()))?;
        let mut words = header.split_whitespace();
        if words.next() != Some("symbol") {
            return Err(ResidueError::Format("expected a `symbol` header".into()));
        }
        let (mut m, mut coeff, mut vars) = (None, None, None);
        for w in words {
            match w.split_once('=') {
                Some(("m", v)) => m = v.parse::<u32>().ok(),
                Some(("coeff", v)) => coeff = v.parse::<i64>().ok(),
                Some(("vars", v)) => {
                    vars = Some(
                        v.split(',')
                            .filter(|s| !s.is_empty())
                            .map(str::to_string)
                            .collect::<Vec<_>>(),
                    )
                }
                _ => return Err(ResidueError::Format(format!("unexpected `{w}`"))),
            }
        }
        let m = m.ok_or_else(|| ResidueError::Format("missing or bad m".into()))?;
        let coeff = coeff.ok_or_else(|| ResidueError::Format("missing or bad coeff".into()))?;
        let vars = vars.ok_or_else(|| ResidueError::Format("missing vars".into()))?;
        let mut rows = Vec::new();
        for line in lines {
            let row = line
                .split_whitespace()
                .map(|c| c.parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| ResidueError::Format(format!("bad exponent row `{line}`")))?;
            rows.push(row);
        }
        MonomialSymbol::new(m, coeff, vars, rows)
    }
}

impl fmt::Display for MonomialSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff == 0 {
            return write!(f, "0");
        }
        let entries: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let parts: Vec<String> = r
                    .iter()
                    .zip(&self.vars)
                    .filter(|(e, _)| **e > 0)
                    .map(|(e, v)| {
                        if *e == 1 {
                            v.clone()
                        } else {
                            format!("{v}^{e}")
                        }
                    })
                    .collect();
                if parts.is_empty() {
                    "1".to_string()
                } else {
                    parts.join("*")
                }
            })
            .collect();
        let prefix = if self.coeff == 1 {
            String::new()
        } else {
            format!("{}*", self.coeff)
        };
        write!(f, "{prefix}({}) mod {}", entries.join(", "), self.m)
    }
}

/// Formal `Z/m`-combination of monomial symbols of one degree.
///
/// Terms are stored with rows sorted (the sign of the sorting permutation
/// goes into the coefficient), so symbols differing by a row permutation
/// are merged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolSum {
    pub m: u32,
    pub vars: Vec<String>,
    pub degree: usize,
    terms: BTreeMap<Vec<Vec<u32>>, u32>,
}

impl SymbolSum {
    pub fn zero(m: u32, vars: Vec<String>, degree: usize) -> Self {
        SymbolSum {
            m,
            vars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_symbol(s: &MonomialSymbol) -> Self {
        let mut out = SymbolSum::zero(s.m, s.vars.clone(), s.degree());
        out.add(s.coeff as u64, s.rows.clone());
        out
    }

    fn add(&mut self, coeff: u64, mut rows: Vec<Vec<u32>>) {
        let m = self.m as u64;
        let probe = MonomialSymbol {
            m: self.m,
            coeff: (coeff % m) as u32,
            vars: self.vars.clone(),
            rows: rows.clone(),
        }
        .normalize();
        if probe.is_zero() {
            return;
        }
        rows = probe.rows;
        // insertion sort, tracking the parity of the permutation
        let mut odd = false;
        for i in 1..rows.len() {
            let mut j = i;
            while j > 0 && rows[j - 1] > rows[j] {
                rows.swap(j - 1, j);
                odd = !odd;
                j -= 1;
            }
        }
        let c = if odd {
            m - probe.coeff as u64
        } else {
            probe.coeff as u64
        };
        let entry = self.terms.entry(rows).or_insert(0);
        *entry = ((*entry as u64 + c) % m) as u32;
        self.terms.retain(|_, c| *c != 0);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The terms as normalized symbols.
    pub fn symbols(&self) -> Vec<MonomialSymbol> {
        self.terms
            .iter()
            .map(|(rows, c)| MonomialSymbol {
                m: self.m,
                coeff: *c,
                vars: self.vars.clone(),
                rows: rows.clone(),
            })
            .collect()
    }

    /// Value of a degree-0 sum, i.e. its coefficient in `Z/m`.
    pub fn scalar(&self) -> Option<u32> {
        (self.degree == 0).then(|| self.terms.get(&Vec::new()).copied().unwrap_or(0))
    }
}

impl fmt::Display for SymbolSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        if let Some(c) = self.scalar() {
            return write!(f, "{c} mod {}", self.m);
        }
        let parts: Vec<String> = self.symbols().iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Residue along `x_v = 0` of every term of `s`; the column `v` is removed.
pub fn tame_residue_sum(s: &SymbolSum, v: usize) -> SymbolSum {
    let mut vars = s.vars.clone();
    vars.remove(v);
    let mut out = SymbolSum::zero(s.m, vars, s.degree.saturating_sub(1));
    if s.degree == 0 {
        return out;
    }
    let m = s.m as u64;
    for (rows, c) in &s.terms {
        for (j, row) in rows.iter().enumerate() {
            let a = row[v] as u64;
            if a == 0 {
                continue;
            }
            let sign = if j % 2 == 0 { 1 } else { m - 1 };
            let coeff = (*c as u64 * a % m) * sign % m;
            let rest: Vec<Vec<u32>> = rows
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, r)| {
                    let mut r = r.clone();
                    r.remove(v);
                    r
                })
                .collect();
            out.add(coeff, rest);
        }
    }
    out
}

/// Residue of a single symbol along the variable in column `v`.
pub fn tame_residue(s: &MonomialSymbol, v: usize) -> SymbolSum {
    tame_residue_sum(&SymbolSum::from_symbol(&s.normalize()), v)
}

fn order_indices(s: &MonomialSymbol, order: &[&str]) -> Result<Vec<String>, ResidueError> {
    let mut seen: Vec<String> = Vec::new();
    for name in order {
        s.var_index(name)?;
        if seen.iter().any(|x| x == name) {
            return Err(ResidueError::RepeatedVariable(name.to_string()));
        }
        seen.push(name.to_string());
    }
    if order.len() < s.degree() {
        return Err(ResidueError::OrderIncomplete {
            given: order.len(),
            degree: s.degree(),
        });
    }
    Ok(seen)
}

/// Composes residues along `order`, returning the final element of `Z/m`.
///
/// The order must list at least as many distinct variables as the degree;
/// residues taken after the degree has dropped to zero give zero.
pub fn iterated_residue(s: &MonomialSymbol, order: &[&str]) -> Result<u32, ResidueError> {
    let order = order_indices(s, order)?;
    let mut cur = SymbolSum::from_symbol(&s.normalize());
    for name in &order {
        let v = cur
            .vars
            .iter()
            .position(|x| x == name)
            .expect("order checked against the variables");
        if cur.degree == 0 {
            return Ok(0);
        }
        cur = tame_residue_sum(&cur, v);
    }
    Ok(cur.scalar().unwrap_or(0))
}

/// `coeff * det(rows restricted to the columns)` mod `m`: the iterated
/// residue along an order of exactly `degree` variables.
pub fn residue_determinant(s: &MonomialSymbol, columns: &[usize]) -> u32 {
    let n = s.degree();
    assert_eq!(columns.len(), n, "one column per row");
    let m = BigInt::from(s.m);
    let mut a: Vec<Vec<BigInt>> = s
        .rows
        .iter()
        .map(|r| columns.iter().map(|&c| BigInt::from(r[c])).collect())
        .collect();
    let det = bareiss(&mut a);
    (det * BigInt::from(s.coeff))
        .mod_floor(&m)
        .to_u32()
        .unwrap()
}

// Fraction-free Gaussian elimination over the integers.
fn bareiss(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = BigInt::from(1);
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Ordered column sets along which `certify_order` takes residues.
///
/// Every `degree`-subset of the variables that occur is used when there are
/// at most `SUBSET_LIMIT` of them; otherwise the natural and reversed
/// windows and all cyclic rotations of both.
pub fn certification_orders(s: &MonomialSymbol) -> Vec<Vec<usize>> {
    const SUBSET_LIMIT: usize = 20_000;
    let n = s.degree();
    let used: Vec<usize> = (0..s.vars.len())
        .filter(|&c| s.rows.iter().any(|r| r[c] != 0))
        .collect();
    if n == 0 {
        return vec![Vec::new()];
    }
    if used.len() < n {
        return Vec::new();
    }
    if binomial(used.len(), n) <= SUBSET_LIMIT as u128 {
        let mut out = Vec::new();
        let mut pick = Vec::with_capacity(n);
        subsets(&used, n, 0, &mut pick, &mut out);
        for o in &mut out {
            o.reverse();
        }
        return out;
    }
    let k = used.len();
    let mut out = Vec::new();
    for shift in 0..k {
        let window: Vec<usize> = (0..n).map(|i| used[(shift + i) % k]).collect();
        let mut rev = window.clone();
        rev.reverse();
        out.push(rev);
        out.push(window);
    }
    out
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return acc;
        }
    }
    acc
}

fn subsets(
    items: &[usize],
    k: usize,
    from: usize,
    pick: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if pick.len() == k {
        out.push(pick.clone());
        return;
    }
    for i in from..items.len() {
        if items.len() - i < k - pick.len() {
            break;
        }
        pick.push(items[i]);
        subsets(items, k, i + 1, pick, out);
        pick.pop();
    }
}

/// Least `e >= 1` such that every tested iterated residue of `e * s`
/// vanishes: a certified lower bound for the order of `s`.
pub fn certify_order(s: &MonomialSymbol) -> u32 {
    let s = s.normalize();
    if s.is_zero() {
        return 1;
    }
    let m = s.m;
    let mut g = m;
    for cols in certification_orders(&s) {
        let r = residue_determinant(&s, &cols);
        g = g.gcd(&r);
        if g == 1 {
            break;
        }
    }
    // e * r = 0 mod m for every residue r iff m / gcd(m, r's) divides e
    m / g
}
