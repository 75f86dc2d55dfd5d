//! Command-line front end. [`run`] never exits the process; it returns the
//! exit code (0 success, 1 failed verification or probe witness, 2 usage or
//! input error) together with everything that should go to stdout.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::bounds::{asok_range, combined_report, cyclic_bounds, dimension_split};
use crate::construct::{
    build_Y, build_Z, build_cyclic, build_explicit_example, check_d_eta_in_pfister,
    check_special_fiber_section, ExampleMode,
};
use crate::field::Field;
use crate::hypersurface::HypersurfaceSpec;
use crate::milnor::propagated_chain;
use crate::pfister::{
    canonical_relation, pfister_form_over, pfister_hypersurface, verify_pfister_body,
};
use crate::poly::{parse_with_inferred_context, Polynomial, VerificationResult};
use crate::probe::{integrality_probe, smoothness_probe, ProbeReport};
use crate::residue::{certify_order, iterated_residue, MonomialSymbol};
use crate::twisting::is_twisting_type;

/// Largest `N` the equation builders accept from the command line.
const MAX_DIMENSION: u32 = 4096;

#[derive(Parser, Debug)]
#[command(
    name = "torsion",
    version,
    about = "Exact constructions and checks for torsion orders of hypersurfaces"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized probes (echoed in the output).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Characteristic of the coefficient field: 0 or a prime.
    #[arg(long = "char", global = true, default_value_t = 0)]
    characteristic: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fermat-Pfister forms and their hypersurfaces.
    Pfister(PfisterArgs),
    /// Universal relations `(x1,...,xn) = (a1,...,an)` with Steinberg witnesses.
    Relation(RelationArgs),
    /// Decide whether a polynomial is of twisting type modulo m.
    Twisting(TwistingArgs),
    /// Residues and order certificates of monomial symbols.
    Residue(ResidueArgs),
    /// Emit the equations of the degenerations.
    Construct(ConstructArgs),
    /// Finite-field smoothness and integrality probes.
    Probe(ProbeArgs),
    /// Certified divisors of torsion orders and degree thresholds.
    Bounds(BoundsArgs),
    /// Explicit smooth examples, optionally probed over a finite field.
    Example(ExampleArgs),
}

#[derive(Args, Debug)]
struct PfisterArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    n: usize,
    /// Check the split and telescoping identities exactly.
    #[arg(long)]
    verify: bool,
    /// Comma-separated parameters chi_1,...,chi_n: emit the hypersurface
    /// with x_i replaced by chi_i.
    #[arg(long, value_delimiter = ',')]
    chi: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct RelationArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    n: usize,
    /// Re-verify every Steinberg witness.
    #[arg(long)]
    verify: bool,
    /// Print the machine-readable relation format instead.
    #[arg(long)]
    raw: bool,
}

#[derive(Args, Debug)]
struct TwistingArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    poly_file: String,
    /// Require unit parameters and constants to be m-th powers in the field.
    #[arg(long)]
    strict_units: bool,
    /// Variable used to homogenize an inhomogeneous input.
    #[arg(long, default_value = "x0")]
    homogenize_with: String,
    /// Names treated as unit parameters.
    #[arg(long, value_delimiter = ',', default_value = "t,s")]
    units: Vec<String>,
}

#[derive(Args, Debug)]
struct ResidueArgs {
    /// Symbol file.
    #[arg(long)]
    file: String,
    /// Residue order, comma-separated; defaults to the variables reversed.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<String>>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ConstructKind {
    Z,
    Y,
    #[value(name = "y0-check")]
    Y0Check,
    Cyclic,
    Example,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Qs,
    Fpst,
}

impl From<Mode> for ExampleMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Qs => ExampleMode::RationalS,
            Mode::Fpst => ExampleMode::FiniteST,
        }
    }
}

#[derive(Args, Debug)]
#[allow(non_snake_case)]
struct ConstructArgs {
    #[arg(value_enum)]
    kind: ConstructKind,
    #[arg(long = "N")]
    N: u32,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long, value_enum, default_value_t = Mode::Qs)]
    mode: Mode,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ProbeKindArg {
    Smooth,
    Integral,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    #[arg(value_enum)]
    kind: ProbeKindArg,
    /// Polynomial file; `# unit parameters:` and `# ambient: ... over F_p`
    /// header lines are honoured.
    #[arg(long)]
    file: String,
    /// Field size for the smoothness scan (p or p^2).
    #[arg(long)]
    q: Option<u64>,
    /// Values of unit parameters, e.g. `s=1,t=3`.
    #[arg(long, value_delimiter = ',')]
    assign: Vec<String>,
    /// Additional unit parameter names.
    #[arg(long, value_delimiter = ',')]
    units: Vec<String>,
    /// Random lines for the integrality probe.
    #[arg(long, default_value_t = 32)]
    trials: u32,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
#[allow(non_snake_case)]
struct BoundsArgs {
    #[command(subcommand)]
    sub: Option<BoundsSub>,
    #[arg(long = "N")]
    N: Option<u64>,
    #[arg(long)]
    d: Option<u64>,
    /// Also report whether these integers divide the combined bound.
    #[arg(long, value_delimiter = ',')]
    check_divisor: Vec<u64>,
}

#[derive(Subcommand, Debug)]
#[allow(non_snake_case)]
enum BoundsSub {
    /// Degree thresholds for cyclic covers.
    Cyclic {
        #[arg(long = "N")]
        N: u64,
        #[arg(long)]
        m: u64,
    },
    /// Degrees n with log2(m+1) <= n <= N+1-m.
    Asok {
        #[arg(long = "N")]
        N: u64,
        #[arg(long)]
        m: u64,
    },
}

#[derive(Args, Debug)]
#[allow(non_snake_case)]
struct ExampleArgs {
    #[arg(long = "N")]
    N: u32,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    p: u64,
    #[arg(long, value_enum, default_value_t = Mode::Qs)]
    mode: Mode,
    /// Scan P^{N+1}(F_q) for singular points.
    #[arg(long)]
    probe_q: Option<u64>,
    /// Value of s for the probe.
    #[arg(long, default_value_t = 1)]
    s: i64,
    /// Value of t for the probe (`fpst` mode).
    #[arg(long, default_value_t = 1)]
    t: i64,
}

struct Out {
    code: i32,
    text: String,
    json: Value,
}

impl Out {
    fn ok(text: String, json: Value) -> Self {
        Out {
            code: 0,
            text,
            json,
        }
    }

    fn verdict(pass: bool, text: String, json: Value) -> Self {
        Out {
            code: if pass { 0 } else { 1 },
            text,
            json,
        }
    }
}

type Res = Result<Out, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let format = cli.format;
    let outcome = catch_unwind(AssertUnwindSafe(|| dispatch(&cli)));
    match outcome {
        Ok(Ok(out)) => {
            let body = match format {
                Format::Text => {
                    let mut t = out.text;
                    if !t.ends_with('\n') {
                        t.push('\n');
                    }
                    t
                }
                Format::Json => {
                    format!(
                        "{}\n",
                        serde_json::to_string_pretty(&out.json).expect("valid json")
                    )
                }
            };
            (out.code, body)
        }
        Ok(Err(msg)) => match format {
            Format::Text => (2, format!("error: {msg}\n")),
            Format::Json => (2, format!("{}\n", json!({ "error": msg }))),
        },
        Err(_) => (2, "error: internal failure\n".to_string()),
    }
}

fn dispatch(cli: &Cli) -> Res {
    let field = Field::from_characteristic(cli.characteristic).map_err(err)?;
    match &cli.command {
        Command::Pfister(a) => pfister(a, field),
        Command::Relation(a) => relation(a, field),
        Command::Twisting(a) => twisting(a, field),
        Command::Residue(a) => residue(a),
        Command::Construct(a) => construct(a, field),
        Command::Probe(a) => probe(a, field, cli.seed.unwrap_or(0)),
        Command::Bounds(a) => bounds(a, cli.characteristic),
        Command::Example(a) => example(a),
    }
}

fn verification_json(r: &VerificationResult) -> Value {
    serde_json::to_value(r).expect("serializable")
}

fn pfister(a: &PfisterArgs, field: Field) -> Res {
    if let Some(chi) = &a.chi {
        if chi.len() != a.n {
            return Err(format!(
                "--chi has {} entries, expected n = {}",
                chi.len(),
                a.n
            ));
        }
        let joined = chi.join(" + ");
        let probe = parse_with_inferred_context(&joined, field.clone(), &[]).map_err(err)?;
        let ctx = probe.ctx().clone();
        let chi: Vec<Polynomial> = chi
            .iter()
            .map(|c| crate::poly::parse(c, &ctx))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let spec = pfister_hypersurface(a.m, &chi).map_err(err)?;
        let json = serde_json::to_value(&spec).expect("serializable");
        return Ok(Out::ok(spec.to_string(), json));
    }
    let form = pfister_form_over(a.m, a.n, field.clone()).map_err(err)?;
    let coefficients: Vec<String> = form.coefficients.iter().map(|c| c.to_string()).collect();
    let mut text = format!(
        "# Fermat-Pfister form, m={} n={} over {field}\n# coefficients: {}\n{}\n",
        a.m,
        a.n,
        coefficients.join(", "),
        form.body
    );
    let mut json = json!({
        "m": a.m,
        "n": a.n,
        "field": field.to_string(),
        "form": form.body.to_string(),
        "coefficients": coefficients,
    });
    let mut pass = true;
    if a.verify {
        let r = verify_pfister_body(a.m, a.n, &form.body).map_err(err)?;
        pass = r.is_pass();
        writeln!(text, "identities: {r}").unwrap();
        json["identities"] = verification_json(&r);
    }
    Ok(Out::verdict(pass, text, json))
}

fn relation(a: &RelationArgs, field: Field) -> Res {
    let rel = if field == Field::Rationals {
        canonical_relation(a.m, a.n).map_err(err)?
    } else {
        propagated_chain(a.m, a.n, field.clone()).map_err(err)?
    };
    if a.raw {
        let json = json!({ "relation": rel.to_text() });
        return Ok(Out::ok(rel.to_text(), json));
    }
    let mut text = format!(
        "relation m={} n={} over {field}\n{rel}\nlambda = {}\n",
        a.m, a.n, rel.lambda
    );
    for (i, e) in rel.rhs().iter().enumerate() {
        writeln!(text, "a{} = {e}", i + 1).unwrap();
    }
    let mut json = json!({
        "m": a.m,
        "n": a.n,
        "field": field.to_string(),
        "lambda": rel.lambda,
        "lhs": rel.lhs().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "rhs": rel.rhs().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
    });
    let mut pass = true;
    if a.verify {
        let results = rel.verify_witnesses().map_err(err)?;
        let ok = results.iter().filter(|r| r.is_pass()).count();
        pass = ok == results.len();
        writeln!(text, "witnesses: {ok}/{} verified", results.len()).unwrap();
        json["witnesses_verified"] = json!(ok);
        json["witnesses_total"] = json!(results.len());
    }
    Ok(Out::verdict(pass, text, json))
}

fn read_file(path: &str) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
}

/// Field and unit parameters announced in header comments.
fn header_info(text: &str) -> (Option<Field>, Vec<String>) {
    let mut field = None;
    let mut units = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("# unit parameters:") {
            units.extend(
                rest.split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty()),
            );
        }
        if let Some(rest) = line.strip_prefix("# ambient:") {
            if let Some(idx) = rest.find(" over ") {
                let name = rest[idx + 6..].split(';').next().unwrap_or("").trim();
                field = match name {
                    "Q" => Some(Field::Rationals),
                    _ => name
                        .strip_prefix("F_")
                        .and_then(|p| p.parse::<u64>().ok())
                        .and_then(|p| Field::from_characteristic(p).ok()),
                };
            }
        }
    }
    (field, units)
}

fn read_polynomial(path: &str, field: Field, extra_units: &[String]) -> Result<Polynomial, String> {
    let text = read_file(path)?;
    let (header_field, mut units) = header_info(&text);
    units.extend(extra_units.iter().cloned());
    let field = match (header_field, &field) {
        (Some(h), Field::Rationals) => h,
        (Some(h), f) if h != *f => {
            return Err(format!("file is over {h} but --char asks for {f}"));
        }
        _ => field,
    };
    let units: Vec<&str> = units.iter().map(String::as_str).collect();
    parse_with_inferred_context(&text, field, &units).map_err(|e| format!("{path}: {e}"))
}

fn twisting(a: &TwistingArgs, field: Field) -> Res {
    let p = read_polynomial(&a.poly_file, field, &a.units)?;
    let report = is_twisting_type(&p, a.m, !a.strict_units, &a.homogenize_with).map_err(err)?;
    let json = serde_json::to_value(&report).expect("serializable");
    Ok(Out::verdict(report.verdict, report.to_string(), json))
}

fn residue(a: &ResidueArgs) -> Res {
    let text = read_file(&a.file)?;
    let s = MonomialSymbol::from_text(&text).map_err(|e| format!("{}: {e}", a.file))?;
    let order: Vec<String> = match &a.order {
        Some(o) => o.clone(),
        None => s.vars.iter().rev().cloned().collect(),
    };
    let order_refs: Vec<&str> = order.iter().map(String::as_str).collect();
    let value = iterated_residue(&s, &order_refs).map_err(err)?;
    let bound = certify_order(&s);
    let normalized = s.normalize();
    let text = format!(
        "symbol: {s}\nnormalized: {normalized}\nresidue along {}: {value} mod {}\ncertified order: at least {bound}\n",
        order.join(","),
        s.m
    );
    let json = json!({
        "m": s.m,
        "symbol": s.to_string(),
        "normalized": normalized.to_string(),
        "order": order,
        "residue": value,
        "certified_order_lower_bound": bound,
    });
    Ok(Out::ok(text, json))
}

fn spec_json(spec: &HypersurfaceSpec) -> Value {
    serde_json::to_value(spec).expect("serializable")
}

#[allow(non_snake_case)]
fn check_dimension(N: u32) -> Result<(), String> {
    if N > MAX_DIMENSION {
        return Err(format!(
            "N = {N} exceeds the supported maximum {MAX_DIMENSION}"
        ));
    }
    Ok(())
}

fn construct(a: &ConstructArgs, field: Field) -> Res {
    check_dimension(a.N)?;
    let need_d = || {
        a.d.ok_or_else(|| "--d is required for this construction".to_string())
    };
    match a.kind {
        ConstructKind::Z => {
            let spec = build_Z(a.N, need_d()?, a.m, &field).map_err(err)?;
            Ok(Out::ok(spec.to_string(), spec_json(&spec)))
        }
        ConstructKind::Y => {
            let b = build_Y(a.N, a.m, &field).map_err(err)?;
            let check = check_d_eta_in_pfister(a.N, a.m, &field).map_err(err)?;
            let text = format!(
                "{}\n\n{}\n\n{}\n# D_eta inside the Pfister hypersurface: {check}\n",
                b.equation, b.generic_fibre, b.d_eta
            );
            let json = json!({
                "blowup": spec_json(&b.equation),
                "generic_fibre": spec_json(&b.generic_fibre),
                "d_eta": spec_json(&b.d_eta),
                "d_eta_in_pfister": verification_json(&check),
            });
            Ok(Out::verdict(check.is_pass(), text, json))
        }
        ConstructKind::Y0Check => {
            let v = check_special_fiber_section(a.N, a.m, &field).map_err(err)?;
            let r = dimension_split(a.N as u64).map_err(err)?.r as usize;
            let mut section = vec![0; r + 2];
            section[0] = 1;
            section[r + 1] = 1;
            let shown: Vec<String> = section.iter().map(|z| z.to_string()).collect();
            let residual = v.residual().map_or("0".to_string(), |p| p.to_string());
            let text = format!(
                "special fibre of N={} m={} at t=0, section z = ({})\nresidual: {residual}\nverdict: {}\n",
                a.N,
                a.m,
                shown.join(", "),
                if v.is_pass() { "pass" } else { "fail" }
            );
            let mut json = verification_json(&v);
            json["N"] = json!(a.N);
            json["m"] = json!(a.m);
            json["t"] = json!(0);
            json["section"] = json!(section);
            Ok(Out::verdict(v.is_pass(), text, json))
        }
        ConstructKind::Cyclic => {
            let c = build_cyclic(a.N, need_d()?, a.m, &field).map_err(err)?;
            let text = format!(
                "{}\n\n{}\n\n{}\n\n{}\n",
                c.branch, c.blowup, c.d_eta, c.exponents
            );
            let json = json!({
                "branch": spec_json(&c.branch),
                "blowup": spec_json(&c.blowup),
                "d_eta": spec_json(&c.d_eta),
                "exponents": serde_json::to_value(&c.exponents).expect("serializable"),
            });
            Ok(Out::ok(text, json))
        }
        ConstructKind::Example => {
            let p = a.p.ok_or("--p is required for the example")?;
            let spec =
                build_explicit_example(a.N, need_d()?, a.m, p, a.mode.into()).map_err(err)?;
            Ok(Out::ok(spec.to_string(), spec_json(&spec)))
        }
    }
}

fn parse_assignments(items: &[String]) -> Result<Vec<(String, i64)>, String> {
    items
        .iter()
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| format!("assignment `{item}` is not of the form name=value"))?;
            let v = v
                .trim()
                .parse::<i64>()
                .map_err(|_| format!("assignment `{item}` needs an integer value"))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn probe_out(r: ProbeReport) -> Out {
    let json = serde_json::to_value(&r).expect("serializable");
    Out::verdict(!r.found_witness(), r.to_string(), json)
}

fn probe(a: &ProbeArgs, field: Field, seed: u64) -> Res {
    let p = read_polynomial(&a.file, field, &a.units)?;
    match a.kind {
        ProbeKindArg::Smooth => {
            let q = a.q.ok_or("--q is required for the smoothness probe")?;
            let values = parse_assignments(&a.assign)?;
            let spec = HypersurfaceSpec::projective(p, &a.file);
            Ok(probe_out(smoothness_probe(&spec, q, &values).map_err(err)?))
        }
        ProbeKindArg::Integral => Ok(probe_out(
            integrality_probe(&p, a.trials, seed).map_err(err)?,
        )),
    }
}

fn factorization(n: &BigUint) -> String {
    let mut parts = Vec::new();
    let mut rest = n.clone();
    let mut p = 2u64;
    while !rest.is_one() && p < 1_000_000 {
        let bp = BigUint::from(p);
        let mut e = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e == 1 {
            parts.push(p.to_string());
        } else if e > 1 {
            parts.push(format!("{p}^{e}"));
        }
        p += 1;
    }
    if !rest.is_one() {
        parts.push(rest.to_string());
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" * ")
    }
}

fn bounds(a: &BoundsArgs, characteristic: u64) -> Res {
    match &a.sub {
        Some(BoundsSub::Cyclic { N, m }) => {
            let c = cyclic_bounds(*N, *m).map_err(err)?;
            let json = serde_json::to_value(c).expect("serializable");
            Ok(Out::ok(c.to_string(), json))
        }
        Some(BoundsSub::Asok { N, m }) => {
            let range = asok_range(*N, *m);
            let shown: Vec<String> = range.iter().map(u64::to_string).collect();
            let text = format!(
                "N = {N}, m = {m}\nadmissible degrees n: {}\n",
                if shown.is_empty() {
                    "none".to_string()
                } else {
                    shown.join(" ")
                }
            );
            Ok(Out::ok(text, json!({ "N": N, "m": m, "degrees": range })))
        }
        None => {
            let n = a.N.ok_or("--N is required")?;
            let d = a.d.ok_or("--d is required")?;
            if d > 100_000 {
                return Err(format!("d = {d} is too large"));
            }
            dimension_split(n).map_err(err)?;
            let r = combined_report(n, d, characteristic).map_err(err)?;
            let mut text = r.to_string();
            text.push('\n');
            let factors = factorization(&r.combined);
            writeln!(text, "combined factorization: {factors}").unwrap();
            let digits = r.upper.to_string().len();
            writeln!(text, "upper has {digits} digits").unwrap();
            let mut json = serde_json::to_value(&r).expect("serializable");
            let mut checks = Vec::new();
            for k in &a.check_divisor {
                let yes = *k != 0 && r.combined_divisible_by(*k);
                writeln!(
                    text,
                    "{k} divides combined: {}",
                    if yes { "yes" } else { "no" }
                )
                .unwrap();
                checks.push(json!({ "k": k, "divides": yes }));
            }
            json["checks"] = Value::Array(checks);
            json["upper_digits"] = json!(digits);
            json["combined_factorization"] = json!(factors);
            json["combined_u64"] = json!(r.combined.to_u64());
            Ok(Out::ok(text, json))
        }
    }
}

fn example(a: &ExampleArgs) -> Res {
    check_dimension(a.N)?;
    let spec = build_explicit_example(a.N, a.d, a.m, a.p, a.mode.into()).map_err(err)?;
    let mut text = spec.to_string();
    text.push('\n');
    let mut json = json!({ "example": spec_json(&spec) });
    let mut pass = true;
    if let Some(q) = a.probe_q {
        let mut values = vec![("s".to_string(), a.s)];
        if a.mode == Mode::Fpst {
            values.push(("t".to_string(), a.t));
        }
        let r = smoothness_probe(&spec, q, &values).map_err(err)?;
        pass = !r.found_witness();
        writeln!(text, "\n{r}").unwrap();
        json["probe"] = serde_json::to_value(&r).expect("serializable");
    }
    Ok(Out::verdict(pass, text, json))
}
