//! Polynomial vector fields, the Duffing oscillator and the JSON system
//! configuration format.

use serde::{Deserialize, Serialize};

use crate::basis::{basis_size, MAX_BASIS_SIZE, MAX_DIM, MAX_ORDER};
use crate::error::{KoopmanError, Result};
use crate::koopman::{NamedObservable, ObservableSet};
use crate::polyalg::{affine_substitute, canonicalize, evaluate, Monomial, Polynomial};

/// Largest exponent (and total degree) accepted anywhere in a config.
pub const MAX_DEGREE: u32 = 64;
pub const DEFAULT_NUM_STEPS: usize = 100;

/// `dx/dt = f(x)` with polynomial components.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<Polynomial>,
}

impl VectorField {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let m = components.len();
        if m == 0 {
            return Err(KoopmanError::InvalidArgument(
                "vector field needs at least one component".into(),
            ));
        }
        for c in &components {
            if c.dim() != m {
                return Err(KoopmanError::DimensionMismatch {
                    expected: m,
                    found: c.dim(),
                });
            }
        }
        Ok(VectorField { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    /// Largest total degree over all components.
    pub fn degree(&self) -> u32 {
        self.components.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| evaluate(c, x)).collect()
    }

    pub(crate) fn evaluate_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c
                .terms()
                .iter()
                .map(|t| {
                    t.exp
                        .iter()
                        .zip(x)
                        .fold(t.coef, |acc, (&e, &xi)| acc * xi.powi(e as i32))
                })
                .sum();
        }
    }
}

/// `q' = p/M`, `p' = -k q - k a² ε q³`.
pub fn duffing_vector_field(mass: f64, stiffness: f64, unit: f64, epsilon: f64) -> Result<VectorField> {
    if mass == 0.0 || !mass.is_finite() {
        return Err(KoopmanError::InvalidArgument(format!(
            "mass must be nonzero and finite, got {mass}"
        )));
    }
    let f1 = canonicalize([Monomial::new(1.0 / mass, vec![0, 1])], 2)?;
    let f2 = canonicalize(
        [
            Monomial::new(-stiffness, vec![1, 0]),
            Monomial::new(-stiffness * epsilon * unit * unit, vec![3, 0]),
        ],
        2,
    )?;
    VectorField::new(vec![f1, f2])
}

/// Field in `y = (x - center) / half_width`:
/// `g_j(y) = f_j(center + half_width ∘ y) / half_width_j`.
pub fn rescale_to_unit_box(vf: &VectorField, center: &[f64], half_width: &[f64]) -> Result<VectorField> {
    if half_width.len() != vf.dim() {
        return Err(KoopmanError::DimensionMismatch {
            expected: vf.dim(),
            found: half_width.len(),
        });
    }
    let components = vf
        .components
        .iter()
        .zip(half_width)
        .map(|(f, &h)| Ok(affine_substitute(f, center, half_width)?.scale(1.0 / h)))
        .collect::<Result<Vec<_>>>()?;
    VectorField::new(components)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Observables {
    /// One observable per state coordinate.
    Identity,
    Custom(ObservableSet),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub name: String,
    pub states: Vec<String>,
    pub vf: VectorField,
    pub domain_center: Vec<f64>,
    pub domain_half_width: Vec<f64>,
    pub initial_state: Vec<f64>,
    pub order: usize,
    pub t_final: f64,
    pub num_steps: usize,
    pub observables: Observables,
}

impl SystemSpec {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Observables in the original coordinates, with identity expanded.
    pub fn observable_set(&self) -> ObservableSet {
        match &self.observables {
            Observables::Identity => ObservableSet::identity(&self.states),
            Observables::Custom(set) => set.clone(),
        }
    }

    /// Uniform grid `linspace(0, t_final, num_steps)`.
    pub fn time_grid(&self) -> Vec<f64> {
        linspace(0.0, self.t_final, self.num_steps)
    }
}

pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (n - 1) as f64;
            let mut t: Vec<f64> = (0..n).map(|k| start + k as f64 * step).collect();
            t[n - 1] = end;
            t
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    coef: f64,
    exp: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyDoc {
    terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NamedPolyDoc {
    name: String,
    terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainDoc {
    center: Vec<f64>,
    half_width: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ObservablesDoc {
    Keyword(String),
    List(Vec<NamedPolyDoc>),
}

fn default_num_steps() -> usize {
    DEFAULT_NUM_STEPS
}

fn default_observables() -> ObservablesDoc {
    ObservablesDoc::Keyword("identity".into())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    name: String,
    states: Vec<String>,
    dynamics: Vec<PolyDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<DomainDoc>,
    initial_state: Vec<f64>,
    order: usize,
    t_final: f64,
    #[serde(default = "default_num_steps")]
    num_steps: usize,
    #[serde(default = "default_observables")]
    observables: ObservablesDoc,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> KoopmanError {
    KoopmanError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn invalid(message: impl Into<String>) -> KoopmanError {
    KoopmanError::Validation(message.into())
}

fn terms_to_polynomial(terms: &[TermDoc], m: usize, path: &str) -> Result<Polynomial> {
    for (t, term) in terms.iter().enumerate() {
        if term.exp.len() != m {
            return Err(schema(
                format!("{path}.terms[{t}].exp"),
                format!("expected {m} exponents, found {}", term.exp.len()),
            ));
        }
        if !term.coef.is_finite() {
            return Err(schema(format!("{path}.terms[{t}].coef"), "coefficient must be finite"));
        }
        if let Some(e) = term.exp.iter().find(|&&e| e > MAX_DEGREE) {
            return Err(invalid(format!(
                "{path}.terms[{t}].exp: exponent {e} exceeds cap {MAX_DEGREE}"
            )));
        }
    }
    let poly = canonicalize(terms.iter().map(|t| Monomial::new(t.coef, t.exp.clone())), m)?;
    if poly.degree() > MAX_DEGREE {
        return Err(invalid(format!(
            "{path}: total degree {} exceeds cap {MAX_DEGREE}",
            poly.degree()
        )));
    }
    Ok(poly)
}

fn polynomial_to_terms(p: &Polynomial) -> Vec<TermDoc> {
    p.terms()
        .iter()
        .map(|t| TermDoc {
            coef: t.coef,
            exp: t.exp.clone(),
        })
        .collect()
}

fn check_len(path: &str, v: &[f64], m: usize) -> Result<()> {
    if v.len() != m {
        return Err(schema(path, format!("expected {m} entries, found {}", v.len())));
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(schema(format!("{path}[{i}]"), "value must be finite"));
    }
    Ok(())
}

/// Parse and validate a JSON system configuration.
pub fn parse_system_config(text: &str) -> Result<SystemSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ConfigDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let mut path = e.path().to_string();
        let message = e.inner().to_string();
        if let Some(field) = message
            .strip_prefix("missing field `")
            .and_then(|rest| rest.split('`').next())
        {
            path = if path == "." {
                field.to_string()
            } else {
                format!("{path}.{field}")
            };
        }
        schema(path, message)
    })?;
    spec_from_doc(doc)
}

fn spec_from_doc(doc: ConfigDoc) -> Result<SystemSpec> {
    let m = doc.states.len();
    if m == 0 || m > MAX_DIM {
        return Err(invalid(format!(
            "states: dimension {m} outside supported range 1..={MAX_DIM}"
        )));
    }
    for (i, s) in doc.states.iter().enumerate() {
        if s.is_empty() || doc.states[..i].contains(s) {
            return Err(invalid(format!("states[{i}]: names must be nonempty and unique")));
        }
    }
    if doc.dynamics.len() != m {
        return Err(schema(
            "dynamics",
            format!("expected {m} components, found {}", doc.dynamics.len()),
        ));
    }
    let components = doc
        .dynamics
        .iter()
        .enumerate()
        .map(|(j, p)| terms_to_polynomial(&p.terms, m, &format!("dynamics[{j}]")))
        .collect::<Result<Vec<_>>>()?;
    let vf = VectorField::new(components)?;

    let (center, half_width) = match doc.domain {
        Some(d) => (d.center, d.half_width),
        None => (vec![0.0; m], vec![1.0; m]),
    };
    check_len("domain.center", &center, m)?;
    check_len("domain.half_width", &half_width, m)?;
    if let Some(i) = half_width.iter().position(|&h| h <= 0.0) {
        return Err(invalid(format!("domain.half_width[{i}] must be positive")));
    }
    check_len("initial_state", &doc.initial_state, m)?;
    for i in 0..m {
        if (doc.initial_state[i] - center[i]).abs() > half_width[i] {
            return Err(invalid(format!(
                "initial_state[{i}] = {} lies outside the domain [{}, {}]",
                doc.initial_state[i],
                center[i] - half_width[i],
                center[i] + half_width[i]
            )));
        }
    }

    if doc.order > MAX_ORDER {
        return Err(invalid(format!("order {} exceeds {MAX_ORDER}", doc.order)));
    }
    let n = basis_size(doc.order, m);
    if n > MAX_BASIS_SIZE as u128 {
        return Err(invalid(format!(
            "order {} with {m} states gives basis size {n} > {MAX_BASIS_SIZE}",
            doc.order
        )));
    }
    if !(doc.t_final > 0.0 && doc.t_final.is_finite()) {
        return Err(invalid(format!("t_final must be positive, got {}", doc.t_final)));
    }
    if doc.num_steps < 2 {
        return Err(invalid(format!("num_steps must be at least 2, got {}", doc.num_steps)));
    }

    let observables = match doc.observables {
        ObservablesDoc::Keyword(k) if k == "identity" => {
            if doc.order < 1 {
                return Err(invalid("observables: identity observables have degree 1 > order 0"));
            }
            Observables::Identity
        }
        ObservablesDoc::Keyword(k) => {
            return Err(schema(
                "observables",
                format!("expected \"identity\" or a list of observables, found \"{k}\""),
            ))
        }
        ObservablesDoc::List(list) => {
            if list.is_empty() {
                return Err(invalid("observables: list is empty"));
            }
            let mut items = Vec::with_capacity(list.len());
            for (i, o) in list.iter().enumerate() {
                let path = format!("observables[{i}]");
                if o.name.is_empty() || list[..i].iter().any(|p| p.name == o.name) {
                    return Err(invalid(format!("{path}.name must be nonempty and unique")));
                }
                let poly = terms_to_polynomial(&o.terms, m, &path)?;
                if poly.degree() as usize > doc.order {
                    return Err(invalid(format!(
                        "{path}: degree {} exceeds order {}",
                        poly.degree(),
                        doc.order
                    )));
                }
                items.push(NamedObservable::new(o.name.clone(), poly));
            }
            Observables::Custom(ObservableSet::new(items)?)
        }
    };

    Ok(SystemSpec {
        name: doc.name,
        states: doc.states,
        vf,
        domain_center: center,
        domain_half_width: half_width,
        initial_state: doc.initial_state,
        order: doc.order,
        t_final: doc.t_final,
        num_steps: doc.num_steps,
        observables,
    })
}

/// Canonical JSON rendering; parsing it yields the same `SystemSpec`.
pub fn serialize_system_config(spec: &SystemSpec) -> String {
    let doc = ConfigDoc {
        name: spec.name.clone(),
        states: spec.states.clone(),
        dynamics: spec
            .vf
            .components()
            .iter()
            .map(|p| PolyDoc {
                terms: polynomial_to_terms(p),
            })
            .collect(),
        domain: Some(DomainDoc {
            center: spec.domain_center.clone(),
            half_width: spec.domain_half_width.clone(),
        }),
        initial_state: spec.initial_state.clone(),
        order: spec.order,
        t_final: spec.t_final,
        num_steps: spec.num_steps,
        observables: match &spec.observables {
            Observables::Identity => default_observables(),
            Observables::Custom(set) => ObservablesDoc::List(
                set.items()
                    .iter()
                    .map(|o| NamedPolyDoc {
                        name: o.name.clone(),
                        terms: polynomial_to_terms(&o.poly),
                    })
                    .collect(),
            ),
        },
    };
    serde_json::to_string_pretty(&doc).expect("config document always serializes")
}
