//! JSON family-spec files.
//!
//! ```json
//! {
//!   "name": "coin",
//!   "kind": "finite",
//!   "n": 1,
//!   "points": [0, 1],
//!   "C": "0",
//!   "F": ["x"],
//!   "psi": "ln(1 + exp(theta1))",
//!   "domain": {"lower": [null], "upper": [null]}
//! }
//! ```
//!
//! `C` and `F` are expressions in `x`; `psi` is an expression in `theta1..thetan`
//! (`theta` is accepted when `n = 1`). Real-line specs may set `quadrature_order`.

use serde::Deserialize;

use super::{CustomModel, ExponentialFamilySpec, MeasuredSpace, Model, DEFAULT_QUADRATURE_ORDER};
use crate::error::{Error, Result};
use crate::expr::Expr;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Kind {
    Finite,
    RealLine,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Domain {
    #[serde(default)]
    lower: Option<Vec<Option<f64>>>,
    #[serde(default)]
    upper: Option<Vec<Option<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default)]
    name: Option<String>,
    kind: Kind,
    n: usize,
    #[serde(rename = "C")]
    carrier: String,
    #[serde(rename = "F")]
    statistics: Vec<String>,
    psi: String,
    #[serde(default)]
    domain: Domain,
    #[serde(default)]
    points: Option<Vec<f64>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(default)]
    quadrature_order: Option<usize>,
}

fn field_expr(src: &str, vars: &[&str], field: &str) -> Result<Expr> {
    Expr::parse(src, vars).map_err(|e| match e {
        Error::Parse { column, message } => Error::Parse {
            column,
            message: format!("in {field}: {message}"),
        },
        other => other,
    })
}

impl ExponentialFamilySpec {
    /// Parses a JSON family spec and validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
            column: e.column(),
            message: format!("line {}: {e}", e.line()),
        })?;
        let n = raw.n;
        if n == 0 {
            return Err(Error::Spec("n must be at least 1".into()));
        }
        if raw.statistics.len() != n {
            return Err(Error::Spec(format!(
                "expected {n} statistics in F, found {}",
                raw.statistics.len()
            )));
        }
        let carrier = field_expr(&raw.carrier, &["x"], "C")?;
        let statistics = raw
            .statistics
            .iter()
            .enumerate()
            .map(|(i, s)| field_expr(s, &["x"], &format!("F[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let theta_names: Vec<String> = (1..=n).map(|i| format!("theta{i}")).collect();
        let mut vars: Vec<&str> = theta_names.iter().map(String::as_str).collect();
        if n == 1 {
            vars.push("theta");
        }
        let psi = field_expr(&raw.psi, &vars, "psi")?;

        let bounds = |b: Option<Vec<Option<f64>>>, which: &str| -> Result<Vec<Option<f64>>> {
            match b {
                None => Ok(vec![None; n]),
                Some(v) if v.len() == n => Ok(v),
                Some(v) => Err(Error::Spec(format!(
                    "domain.{which} has {} entries, expected {n}",
                    v.len()
                ))),
            }
        };
        let lower = bounds(raw.domain.lower, "lower")?;
        let upper = bounds(raw.domain.upper, "upper")?;
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if let (Some(a), Some(b)) = (lo, hi) {
                if a >= b {
                    return Err(Error::Spec(format!("empty domain in coordinate {}", i + 1)));
                }
            }
        }

        let space = match raw.kind {
            Kind::Finite => {
                let values = raw
                    .points
                    .ok_or_else(|| Error::Spec("finite spec needs a \"points\" array".into()))?;
                let mut sorted = values.clone();
                sorted.sort_by(f64::total_cmp);
                sorted.dedup();
                if sorted.len() != values.len() || values.len() < 2 {
                    return Err(Error::Spec("finite spec needs at least two distinct points".into()));
                }
                let labels = match raw.labels {
                    Some(l) if l.len() == values.len() => l,
                    Some(_) => return Err(Error::Spec("labels and points differ in length".into())),
                    None => values.iter().map(|v| v.to_string()).collect(),
                };
                MeasuredSpace::Finite { labels, values }
            }
            Kind::RealLine => {
                if raw.points.is_some() {
                    return Err(Error::Spec("\"points\" is only valid for finite specs".into()));
                }
                let order = raw.quadrature_order.unwrap_or(DEFAULT_QUADRATURE_ORDER);
                if order == 0 {
                    return Err(Error::Spec("quadrature_order must be at least 1".into()));
                }
                MeasuredSpace::RealLine {
                    quadrature_order: order,
                }
            }
        };

        let spec = Self {
            name: raw.name.unwrap_or_else(|| "custom".into()),
            space,
            dim: n,
            model: Model::Custom(Box::new(CustomModel {
                carrier,
                statistics,
                psi,
                lower,
                upper,
            })),
        };
        spec.rank_check()?;
        let theta = spec.default_theta();
        let mass = spec.normalization(&theta)?;
        if mass.is_nan() || (mass - 1.0).abs() > 1e-6 {
            return Err(Error::Spec(format!(
                "density does not integrate to 1 at theta = {theta:?} (mass {mass})"
            )));
        }
        Ok(spec)
    }

    /// Reads and parses a spec file.
    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Spec(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
