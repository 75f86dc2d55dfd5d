use std::fmt;

use serde::Serialize;

use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ambient {
    /// Projective space of the given dimension; coordinates are the form
    /// variables of the equation's context.
    Projective { dim: usize },
    /// Affine chart or generic fibre of the given dimension.
    Affine { dim: usize },
    /// Projectivized bundle: the equation is bihomogeneous with these
    /// degrees in the base and fibre coordinates.
    Bundle { base_degree: i64, fibre_degree: i64 },
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Projective { dim } => write!(f, "P^{dim}"),
            Ambient::Affine { dim } => write!(f, "A^{dim}"),
            Ambient::Bundle {
                base_degree,
                fibre_degree,
            } => write!(
                f,
                "projective bundle, bidegree ({base_degree}, {fibre_degree})"
            ),
        }
    }
}

/// An equation together with where it lives and how it was produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypersurfaceSpec {
    pub equation: Polynomial,
    pub ambient: Ambient,
    /// Degree in the form variables (unit parameters excluded).
    pub degree: u32,
    /// Human-readable name of the construction.
    pub source: String,
    /// Named integer parameters (`N`, `d`, `m`, `n`, `r`, ...).
    pub parameters: Vec<(String, i64)>,
    /// The hypersurface of degree `d` is the union of this one with
    /// `{x0^extra_x0_power = 0}`.
    #[serde(skip_serializing_if = "is_zero")]
    pub extra_x0_power: u32,
}

fn is_zero(v: &u32) -> bool {
    *v == 0
}

impl HypersurfaceSpec {
    pub fn projective(equation: Polynomial, source: &str) -> Self {
        let dim = equation.ctx().form_variables().len().saturating_sub(1);
        let degree = equation.form_degree().unwrap_or(0);
        HypersurfaceSpec {
            equation,
            ambient: Ambient::Projective { dim },
            degree,
            source: source.to_string(),
            parameters: Vec::new(),
            extra_x0_power: 0,
        }
    }

    pub fn with_parameters(mut self, params: &[(&str, i64)]) -> Self {
        self.parameters
            .extend(params.iter().map(|(k, v)| (k.to_string(), *v)));
        self
    }

    pub fn parameter(&self, name: &str) -> Option<i64> {
        self.parameters
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
    }

    /// Full degree once the extra power of `x0` is included.
    pub fn total_degree(&self) -> u32 {
        self.degree + self.extra_x0_power
    }
}

impl fmt::Display for HypersurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# source: {}", self.source)?;
        let params: Vec<String> = self
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        if !params.is_empty() {
            writeln!(f, "# parameters: {}", params.join(" "))?;
        }
        let ctx = self.equation.ctx();
        writeln!(
            f,
            "# ambient: {} over {}; degree {}",
            self.ambient,
            ctx.field(),
            self.degree
        )?;
        let unit = ctx.unit_params();
        if !unit.is_empty() {
            writeln!(f, "# unit parameters: {}", unit.join(","))?;
        }
        if self.extra_x0_power > 0 {
            writeln!(
                f,
                "# extra factor x0^{} raises the total degree to {}",
                self.extra_x0_power,
                self.total_degree()
            )?;
        }
        write!(f, "{}", self.equation)
    }
}
