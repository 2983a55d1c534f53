//! Problem files.
//!
//! A problem file is a TOML document:
//!
//! ```toml
//! f = "f41"
//! g = "gstar"
//! u = "heaviside(0.5)"
//! beta = 4
//! eta = "1/4"
//!
//! [bounds]
//! k = "k41"
//! h = "const(1)"
//! M = 1
//!
//! [options]          # optional, every key optional
//! tol = 1e-8
//! grid = 1025
//! max_iter = 200
//! damping = 1.0
//! ```
//!
//! Numbers may be written as TOML numbers or as `"p/q"` strings, so that
//! values like β = −1/6 are stored exactly as the quotient the reader sees.
//! Function entries use the names of [`distbvp::catalog`].

use std::ops::Range;
use std::path::Path;

use distbvp::catalog;
use distbvp::{BoundData, Interpolation, ProblemSpec, SolveOptions};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounds {
    k: Spanned<String>,
    h: Spanned<String>,
    #[serde(rename = "M")]
    m: Spanned<Number>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    tol: Option<Spanned<Number>>,
    grid: Option<Spanned<i64>>,
    max_iter: Option<Spanned<i64>>,
    damping: Option<Spanned<Number>>,
    quad_tol: Option<Spanned<Number>>,
    interpolation: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    f: Spanned<String>,
    g: Spanned<String>,
    u: Spanned<String>,
    beta: Spanned<Number>,
    eta: Spanned<Number>,
    bounds: RawBounds,
    #[serde(default)]
    options: RawOptions,
}

/// The textual inputs, echoed in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemEcho {
    pub f: String,
    pub g: String,
    pub u: String,
    pub beta: f64,
    pub eta: f64,
    pub k: String,
    pub h: String,
    #[serde(rename = "M")]
    pub m: f64,
}

/// Solver settings read from `[options]`; unset keys stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FileOptions {
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub max_iter: Option<usize>,
    pub damping: Option<f64>,
    pub quad_tol: Option<f64>,
    pub interpolation: Option<Interpolation>,
}

impl FileOptions {
    pub fn apply_to(&self, mut o: SolveOptions) -> SolveOptions {
        if let Some(v) = self.tol {
            o.tol = v;
        }
        if let Some(v) = self.grid {
            o.grid = v;
        }
        if let Some(v) = self.max_iter {
            o.max_iter = v;
        }
        if let Some(v) = self.damping {
            o.damping = v;
        }
        if self.quad_tol.is_some() {
            o.quad_tol = self.quad_tol;
        }
        if let Some(v) = self.interpolation {
            o.interpolation = v;
        }
        o
    }
}

#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub spec: ProblemSpec,
    pub echo: ProblemEcho,
    pub options: FileOptions,
}

/// 1-based line and column of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, col)
}

struct Ctx<'a> {
    origin: &'a str,
    text: &'a str,
}

impl Ctx<'_> {
    fn error(&self, span: Range<usize>, message: impl Into<String>) -> CliError {
        let (line, column) = line_col(self.text, span.start);
        CliError::Parse {
            origin: self.origin.to_string(),
            line,
            column,
            message: message.into(),
        }
    }

    fn number(&self, key: &str, v: &Spanned<Number>) -> Result<f64, CliError> {
        let parsed = match v.get_ref() {
            Number::Int(i) => Some(*i as f64),
            Number::Float(x) => Some(*x),
            Number::Text(s) => parse_fraction(s),
        };
        match parsed {
            Some(x) if x.is_finite() => Ok(x),
            _ => Err(self.error(v.span(), format!("`{key}` must be a finite number or a fraction \"p/q\""))),
        }
    }

    fn count(&self, key: &str, v: &Spanned<i64>) -> Result<usize, CliError> {
        usize::try_from(*v.get_ref()).map_err(|_| self.error(v.span(), format!("`{key}` must be nonnegative")))
    }

    fn catalog<T>(
        &self,
        v: &Spanned<String>,
        resolve: impl FnOnce(&str) -> Result<T, distbvp::CatalogError>,
    ) -> Result<T, CliError> {
        resolve(v.get_ref()).map_err(|e| self.error(v.span(), e.to_string()))
    }
}

/// `"p/q"`, `"-p/q"` or a plain decimal in a string.
fn parse_fraction(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((p, q)) => Some(p.trim().parse::<f64>().ok()? / q.trim().parse::<f64>().ok()?),
        None => s.trim().parse().ok(),
    }
}

impl ProblemFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// `origin` names the source in diagnostics.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let ctx = Ctx { origin, text };
        let raw: RawProblem = toml::from_str(text).map_err(|e| {
            let span = e.span().unwrap_or(0..0);
            ctx.error(span, e.message().to_string())
        })?;

        let f = ctx.catalog(&raw.f, catalog::forcing)?;
        let g = ctx.catalog(&raw.g, catalog::coupling)?;
        let u = ctx.catalog(&raw.u, catalog::regulated)?;
        let k = ctx.catalog(&raw.bounds.k, catalog::integrand)?;
        let h = ctx.catalog(&raw.bounds.h, catalog::integrand)?;
        let beta = ctx.number("beta", &raw.beta)?;
        let eta = ctx.number("eta", &raw.eta)?;
        let m = ctx.number("M", &raw.bounds.m)?;
        if !(0.0..=1.0).contains(&eta) {
            return Err(ctx.error(raw.eta.span(), format!("eta = {eta} out of [0,1]")));
        }
        if m < 0.0 {
            return Err(ctx.error(raw.bounds.m.span(), format!("M = {m} must be nonnegative")));
        }

        let o = &raw.options;
        let options = FileOptions {
            tol: o.tol.as_ref().map(|v| ctx.number("tol", v)).transpose()?,
            grid: o.grid.as_ref().map(|v| ctx.count("grid", v)).transpose()?,
            max_iter: o.max_iter.as_ref().map(|v| ctx.count("max_iter", v)).transpose()?,
            damping: o.damping.as_ref().map(|v| ctx.number("damping", v)).transpose()?,
            quad_tol: o.quad_tol.as_ref().map(|v| ctx.number("quad_tol", v)).transpose()?,
            interpolation: o
                .interpolation
                .as_ref()
                .map(|v| parse_interpolation(v.get_ref()).ok_or_else(|| ctx.error(v.span(), "interpolation must be \"hermite\" or \"linear\"")))
                .transpose()?,
        };

        let echo = ProblemEcho {
            f: raw.f.get_ref().clone(),
            g: raw.g.get_ref().clone(),
            u: raw.u.get_ref().clone(),
            beta,
            eta,
            k: raw.bounds.k.get_ref().clone(),
            h: raw.bounds.h.get_ref().clone(),
            m,
        };
        let spec = ProblemSpec::new(f, g, u, beta, eta, BoundData { k, h, m })
            .map_err(|e| ctx.error(raw.g.span(), e.to_string()))?;
        Ok(ProblemFile { spec, echo, options })
    }
}

pub fn parse_interpolation(s: &str) -> Option<Interpolation> {
    match s {
        "hermite" => Some(Interpolation::Hermite),
        "linear" => Some(Interpolation::Linear),
        _ => None,
    }
}
