use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::field::Field;

use super::PolyError;

/// Shared handle to a context; polynomials hold one of these.
pub type Ctx = Arc<PolyContext>;

/// Ordered variable names, the coefficient field, and which variables are
/// unit parameters.
///
/// Unit parameters model invertible constants of the base field that have all
/// `m`-th roots (a transcendental `t`, or `s`). They are ordinary variables for
/// arithmetic but do not count towards the degree of a form.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyContext {
    field: Field,
    names: Vec<String>,
    unit: Vec<bool>,
    index: HashMap<String, usize>,
}

impl fmt::Debug for PolyContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolyContext")
            .field("field", &self.field)
            .field("variables", &self.names)
            .field("unit_params", &self.unit_params())
            .finish()
    }
}

impl PolyContext {
    pub fn new<S: AsRef<str>>(
        field: Field,
        variables: &[S],
        unit_params: &[S],
    ) -> Result<Ctx, PolyError> {
        let mut index = HashMap::new();
        let mut names = Vec::with_capacity(variables.len());
        for (i, v) in variables.iter().enumerate() {
            let v = v.as_ref();
            if !is_identifier(v) {
                return Err(PolyError::BadVariableName(v.to_string()));
            }
            if index.insert(v.to_string(), i).is_some() {
                return Err(PolyError::DuplicateVariable(v.to_string()));
            }
            names.push(v.to_string());
        }
        let mut unit = vec![false; names.len()];
        for u in unit_params {
            let u = u.as_ref();
            match index.get(u) {
                Some(&i) => unit[i] = true,
                None => return Err(PolyError::UnknownVariable(u.to_string())),
            }
        }
        Ok(Arc::new(PolyContext {
            field,
            names,
            unit,
            index,
        }))
    }

    /// Variables followed by unit parameters, in that order.
    pub fn with_params<S: AsRef<str>>(
        field: Field,
        variables: &[S],
        params: &[S],
    ) -> Result<Ctx, PolyError> {
        let mut all: Vec<String> = variables.iter().map(|v| v.as_ref().to_string()).collect();
        all.extend(params.iter().map(|p| p.as_ref().to_string()));
        let params: Vec<String> = params.iter().map(|p| p.as_ref().to_string()).collect();
        PolyContext::new(field, &all, &params)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn var_index(&self, name: &str) -> Result<usize, PolyError> {
        self.index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    pub fn is_unit_param(&self, i: usize) -> bool {
        self.unit[i]
    }

    pub fn unit_params(&self) -> Vec<&str> {
        self.names
            .iter()
            .zip(&self.unit)
            .filter(|(_, u)| **u)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    /// Indices of the variables that are not unit parameters.
    pub fn form_variables(&self) -> Vec<usize> {
        (0..self.names.len()).filter(|&i| !self.unit[i]).collect()
    }

    /// Same variables and parameters over another field.
    pub fn over(&self, field: Field) -> Ctx {
        Arc::new(PolyContext {
            field,
            ..self.clone()
        })
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `prefix{start}, prefix{start+1}, ..., prefix{start+count-1}`.
pub fn indexed_names(prefix: &str, start: usize, count: usize) -> Vec<String> {
    (start..start + count)
        .map(|i| format!("{prefix}{i}"))
        .collect()
}
