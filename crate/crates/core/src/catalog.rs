//! Whitelisted function names accepted by problem files and the CLI.
//!
//! | name                     | roles                         |
//! |--------------------------|-------------------------------|
//! | `zero`, `const(c)`       | every role (`g` only if `c = 0`) |
//! | `heaviside(center)`      | regulated                     |
//! | `weierstrass(tol)`       | regulated (`weierstrass` alone uses 1e-12) |
//! | `step([p..], [v..])`     | regulated, right-continuous, `len(v) = len(p) + 1` |
//! | `gstar`                  | regulated, coupling           |
//! | `ramp`                   | regulated (`t`), integrand    |
//! | `k41`                    | integrand `1/(3√(5+t))`       |
//! | `h42`                    | integrand `1 + 2t sin(t⁻²) − (2/t) cos(t⁻²)` |
//! | `osc42`                  | integrand `2t sin(t⁻²) − (2/t) cos(t⁻²)` |
//! | `numeric(name)`          | integrand without its antiderivative |
//! | `f41`                    | forcing `x sin(x)/(3√(5+t))`  |
//! | `f42`                    | forcing `sin(x) + osc42(t)`   |
//! | `linear(λ)`              | forcing `λ x`                 |
//! | `ramp(c)`                | coupling `c t`                |
//!
//! Every name may also be written `expr(name)`.

use crate::error::CatalogError;
use crate::integrate::Integrand;
use crate::operator::{BoundData, Coupling, Forcing, ProblemSpec};
use crate::regulated::{RegulatedFn, StepFn};

/// Default truncation tolerance for a bare `weierstrass`.
pub const WEIERSTRASS_TOL: f64 = 1e-12;

/// A parsed `name(arg, ...)`; arguments stay as trimmed text.
#[derive(Debug, Clone, PartialEq)]
pub struct Call {
    pub name: String,
    pub args: Vec<String>,
}

/// Splits `name(a, [b, c], d)` at top-level commas.
pub fn parse(text: &str) -> Result<Call, CatalogError> {
    let text = text.trim();
    let syntax = || CatalogError::Syntax(text.to_string());
    let Some(open) = text.find('(') else {
        if text.is_empty() || !text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(syntax());
        }
        return Ok(Call { name: text.to_string(), args: Vec::new() });
    };
    if !text.ends_with(')') {
        return Err(syntax());
    }
    let name = text[..open].trim();
    if name.is_empty() {
        return Err(syntax());
    }
    let inner = &text[open + 1..text.len() - 1];
    let mut args = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(syntax());
                }
            }
            ',' if depth == 0 => {
                args.push(inner[start..i].trim().to_string());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(syntax());
    }
    let last = inner[start..].trim();
    if !last.is_empty() || !args.is_empty() {
        args.push(last.to_string());
    }
    if args.iter().any(|a| a.is_empty()) {
        return Err(syntax());
    }
    Ok(Call { name: name.to_string(), args })
}

/// Unwraps `expr(name)` to `name`.
fn resolve(text: &str) -> Result<Call, CatalogError> {
    let call = parse(text)?;
    if call.name == "expr" {
        return match call.args.as_slice() {
            [inner] => resolve(inner),
            _ => Err(arguments("expr", "expects one catalog name")),
        };
    }
    Ok(call)
}

fn arguments(name: &str, reason: impl Into<String>) -> CatalogError {
    CatalogError::Arguments { name: name.to_string(), reason: reason.into() }
}

fn number(name: &str, arg: &str) -> Result<f64, CatalogError> {
    arg.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| arguments(name, format!("`{arg}` is not a finite number")))
}

fn list(name: &str, arg: &str) -> Result<Vec<f64>, CatalogError> {
    let inner = arg
        .strip_prefix('[')
        .and_then(|a| a.strip_suffix(']'))
        .ok_or_else(|| arguments(name, format!("`{arg}` is not a [..] list")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|v| number(name, v.trim())).collect()
}

fn no_args(call: &Call) -> Result<(), CatalogError> {
    if call.args.is_empty() {
        Ok(())
    } else {
        Err(arguments(&call.name, "takes no arguments"))
    }
}

fn one_number(call: &Call) -> Result<f64, CatalogError> {
    match call.args.as_slice() {
        [a] => number(&call.name, a),
        _ => Err(arguments(&call.name, "expects one number")),
    }
}

fn role(call: &Call, role: &'static str) -> CatalogError {
    if KNOWN.contains(&call.name.as_str()) {
        CatalogError::Role { name: call.name.clone(), role }
    } else {
        CatalogError::Unknown(call.name.clone())
    }
}

const KNOWN: &[&str] = &[
    "zero", "const", "heaviside", "weierstrass", "step", "gstar", "ramp", "k41", "h42", "osc42",
    "numeric", "f41", "f42", "linear", "expr",
];

fn inv_t2(t: f64) -> f64 {
    1.0 / (t * t)
}

/// `2t sin(t⁻²) − (2/t) cos(t⁻²)`, set to 0 at the singular point.
fn osc42(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let s = inv_t2(t);
    2.0 * t * s.sin() - 2.0 / t * s.cos()
}

/// `t² sin(t⁻²)`, continuous with value 0 at 0.
fn osc42_primitive(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t * inv_t2(t).sin()
    }
}

fn k41(t: f64) -> f64 {
    1.0 / (3.0 * (5.0 + t).sqrt())
}

pub fn integrand(text: &str) -> Result<Integrand, CatalogError> {
    let call = resolve(text)?;
    match call.name.as_str() {
        "zero" => no_args(&call).map(|_| Integrand::zero()),
        "const" => one_number(&call).map(Integrand::constant),
        "ramp" => no_args(&call).map(|_| Integrand::new("ramp", |t| t).with_antiderivative(|t| 0.5 * t * t)),
        "k41" => no_args(&call).map(|_| {
            Integrand::new("k41", k41).with_antiderivative(|t| 2.0 / 3.0 * ((5.0 + t).sqrt() - 5f64.sqrt()))
        }),
        "osc42" => no_args(&call).map(|_| {
            Integrand::new("osc42", osc42)
                .with_antiderivative(osc42_primitive)
                .with_singularity(0.0)
        }),
        "h42" => no_args(&call).map(|_| {
            Integrand::new("h42", |t| if t == 0.0 { 0.0 } else { 1.0 + osc42(t) })
                .with_antiderivative(|t| t + osc42_primitive(t))
                .with_singularity(0.0)
        }),
        "numeric" => match call.args.as_slice() {
            [inner] => Ok(integrand(inner)?.numeric_only()),
            _ => Err(arguments("numeric", "expects one catalog name")),
        },
        _ => Err(role(&call, "an integrand")),
    }
}

pub fn regulated(text: &str) -> Result<RegulatedFn, CatalogError> {
    let call = resolve(text)?;
    match call.name.as_str() {
        "zero" => no_args(&call).map(|_| RegulatedFn::zero()),
        "const" => one_number(&call).map(RegulatedFn::constant),
        "heaviside" => Ok(RegulatedFn::heaviside(one_number(&call)?)?),
        "weierstrass" => {
            let tol = if call.args.is_empty() { WEIERSTRASS_TOL } else { one_number(&call)? };
            Ok(RegulatedFn::weierstrass(tol)?)
        }
        "step" => match call.args.as_slice() {
            [p, v] => {
                let (points, values) = (list("step", p)?, list("step", v)?);
                Ok(RegulatedFn::step(text.trim(), StepFn::right_continuous(points, values)?))
            }
            _ => Err(arguments("step", "expects ([points], [values])")),
        },
        "gstar" => no_args(&call).map(|_| RegulatedFn::g_star()),
        "ramp" if call.args.is_empty() => Ok(RegulatedFn::closed_form("ramp", |t| t).monotone_between(Vec::new())?),
        _ => Err(role(&call, "a regulated function")),
    }
}

pub fn forcing(text: &str) -> Result<Forcing, CatalogError> {
    let call = resolve(text)?;
    match call.name.as_str() {
        "zero" => no_args(&call).map(|_| Forcing::zero()),
        "const" => one_number(&call).map(Forcing::constant),
        "f41" => no_args(&call).map(|_| Forcing::new("f41", |t, x| x * x.sin() * k41(t))),
        "f42" => no_args(&call).map(|_| Forcing::new("f42", |_, x| x.sin()).with_source(integrand("osc42").unwrap())),
        "linear" => {
            let lambda = one_number(&call)?;
            Ok(Forcing::new(format!("linear({lambda})"), move |_, x| lambda * x))
        }
        _ => Err(role(&call, "a forcing f(t,x)")),
    }
}

pub fn coupling(text: &str) -> Result<Coupling, CatalogError> {
    let call = resolve(text)?;
    match call.name.as_str() {
        "zero" => no_args(&call).map(|_| Coupling::zero()),
        "const" if one_number(&call)? == 0.0 => Ok(Coupling::zero()),
        "gstar" => no_args(&call).map(|_| Coupling::g_star()),
        "ramp" => {
            let c = one_number(&call)?;
            Ok(Coupling::new(format!("ramp({c})"), move |t, _| c * t))
        }
        _ => Err(role(&call, "a coupling g(t,x)")),
    }
}

/// Heaviside-driven reference problem: `f = f41`, `g = g*`, `u = H(· − ½)`,
/// `β = 4`, `η = ¼`, `k = k41`, `h ≡ 1`, `M = 1`.
pub fn heaviside_problem() -> ProblemSpec {
    ProblemSpec::new(
        forcing("f41").unwrap(),
        Coupling::g_star(),
        RegulatedFn::heaviside(0.5).unwrap(),
        4.0,
        0.25,
        BoundData { k: integrand("k41").unwrap(), h: Integrand::constant(1.0), m: 1.0 },
    )
    .expect("reference data is valid")
}

/// Weierstrass-driven reference problem: `f = f42`, `g = g*`, `u = W`,
/// `β = −1/6`, `η = ⅔`, `k ≡ 0`, `h = h42`, `M = 1`.
pub fn weierstrass_problem() -> ProblemSpec {
    ProblemSpec::new(
        forcing("f42").unwrap(),
        Coupling::g_star(),
        RegulatedFn::weierstrass(WEIERSTRASS_TOL).unwrap(),
        -1.0 / 6.0,
        2.0 / 3.0,
        BoundData { k: Integrand::zero(), h: integrand("h42").unwrap(), m: 1.0 },
    )
    .expect("reference data is valid")
}
