//! The problem datum: spaces, the finite sets `C ⊆ X` and `D ⊆ Y`, the
//! tabulated operators `f: C → L(X, U)` and `g: D → L(Y, V)`, the coupling
//! map `A: X → Y`, and an optional starting index `x′`.
//!
//! An [`Instance`] can only be obtained through validation, either from
//! [`InstanceParts`] or from a JSON document via [`load_instance`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{mat_apply, NumericsError, RationalMatrix, RationalVector};
use crate::orders::{ConeOrder, FinitePoset, OrderError, OrderSpec, DEFAULT_MAX_POINTS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid instance at {path}: {message}")]
    Invalid { path: String, message: String },
    #[error("A maps C[{c_index}] = {point} to {image}, which is not a point of D")]
    Domain { c_index: usize, point: String, image: String },
    #[error("{what} index {index} out of range (size {len})")]
    Index { what: &'static str, index: usize, len: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn invalid(path: impl Into<String>, message: impl ToString) -> ModelError {
    ModelError::Invalid { path: path.into(), message: message.to_string() }
}

/// One of the four spaces `X`, `Y`, `U`, `V` together with its order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceSpec {
    order: ConeOrder,
}

impl SpaceSpec {
    pub fn new(dim: usize, order: OrderSpec) -> Result<Self, OrderError> {
        Ok(SpaceSpec { order: ConeOrder::new(dim, order)? })
    }

    pub fn componentwise(dim: usize) -> Result<Self, OrderError> {
        Self::new(dim, OrderSpec::Componentwise)
    }

    pub fn from_order(order: ConeOrder) -> Self {
        SpaceSpec { order }
    }

    pub fn dim(&self) -> usize {
        self.order.dim()
    }

    pub fn order(&self) -> &ConeOrder {
        &self.order
    }
}

/// One linear map per point of the indexing set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorTable {
    pub matrices: Vec<RationalMatrix>,
}

impl OperatorTable {
    pub fn constant(matrix: RationalMatrix, len: usize) -> Self {
        OperatorTable { matrices: vec![matrix; len] }
    }

    pub fn domain_size(&self) -> usize {
        self.matrices.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CouplingMap {
    Linear(RationalMatrix),
    /// `values[k]` is the image of `C[k]`.
    Table(Vec<RationalVector>),
}

/// Unvalidated components of an instance, for programmatic construction.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceParts {
    pub x: SpaceSpec,
    pub y: SpaceSpec,
    pub u: SpaceSpec,
    pub v: SpaceSpec,
    pub c: Vec<RationalVector>,
    pub d: Vec<RationalVector>,
    pub f: OperatorTable,
    pub g: OperatorTable,
    pub a: CouplingMap,
    pub x_prime: Option<usize>,
    pub meta: Option<serde_json::Value>,
}

/// A validated problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    x: SpaceSpec,
    y: SpaceSpec,
    u: SpaceSpec,
    v: SpaceSpec,
    c: FinitePoset,
    d: FinitePoset,
    f: OperatorTable,
    g: OperatorTable,
    a: CouplingMap,
    x_prime: Option<usize>,
    meta: Option<serde_json::Value>,
    images: Vec<RationalVector>,
    image_index: Vec<usize>,
}

impl Instance {
    pub fn from_parts(parts: InstanceParts) -> Result<Self, ModelError> {
        Self::from_parts_with_cap(parts, DEFAULT_MAX_POINTS)
    }

    pub fn from_parts_with_cap(parts: InstanceParts, cap: usize) -> Result<Self, ModelError> {
        let InstanceParts { x, y, u, v, c, d, f, g, a, x_prime, meta } = parts;

        let c = build_set("C", c, &x, cap)?;
        let d = build_set("D", d, &y, cap)?;
        check_table("f", &f, c.len(), u.dim(), x.dim())?;
        check_table("g", &g, d.len(), v.dim(), y.dim())?;

        let images = match &a {
            CouplingMap::Linear(m) => {
                if m.rows() != y.dim() || m.cols() != x.dim() {
                    return Err(invalid(
                        "A.matrix",
                        format!("expected {}x{}, found {}x{}", y.dim(), x.dim(), m.rows(), m.cols()),
                    ));
                }
                c.points().iter().map(|p| mat_apply(m, p)).collect::<Result<Vec<_>, _>>()?
            }
            CouplingMap::Table(values) => {
                if values.len() != c.len() {
                    return Err(invalid(
                        "A.values",
                        format!("expected one value per point of C ({}), found {}", c.len(), values.len()),
                    ));
                }
                for (k, w) in values.iter().enumerate() {
                    if w.dim() != y.dim() {
                        return Err(invalid(format!("A.values[{k}]"), format!("expected dimension {}", y.dim())));
                    }
                }
                values.clone()
            }
        };
        let image_index = images
            .iter()
            .enumerate()
            .map(|(k, w)| {
                d.index_of(w).ok_or_else(|| ModelError::Domain {
                    c_index: k,
                    point: format!("{:?}", c.point(k)),
                    image: format!("{w:?}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        if let Some(k) = x_prime {
            if k >= c.len() {
                return Err(invalid("x_prime", format!("index {k} out of range for |C| = {}", c.len())));
            }
        }

        Ok(Instance { x, y, u, v, c, d, f, g, a, x_prime, meta, images, image_index })
    }

    pub fn to_parts(&self) -> InstanceParts {
        InstanceParts {
            x: self.x.clone(),
            y: self.y.clone(),
            u: self.u.clone(),
            v: self.v.clone(),
            c: self.c.points().to_vec(),
            d: self.d.points().to_vec(),
            f: self.f.clone(),
            g: self.g.clone(),
            a: self.a.clone(),
            x_prime: self.x_prime,
            meta: self.meta.clone(),
        }
    }

    pub fn x_space(&self) -> &SpaceSpec {
        &self.x
    }

    pub fn y_space(&self) -> &SpaceSpec {
        &self.y
    }

    pub fn u_space(&self) -> &SpaceSpec {
        &self.u
    }

    pub fn v_space(&self) -> &SpaceSpec {
        &self.v
    }

    pub fn c(&self) -> &FinitePoset {
        &self.c
    }

    pub fn d(&self) -> &FinitePoset {
        &self.d
    }

    pub fn f(&self) -> &OperatorTable {
        &self.f
    }

    pub fn g(&self) -> &OperatorTable {
        &self.g
    }

    pub fn coupling(&self) -> &CouplingMap {
        &self.a
    }

    pub fn x_prime(&self) -> Option<usize> {
        self.x_prime
    }

    pub fn meta(&self) -> Option<&serde_json::Value> {
        self.meta.as_ref()
    }

    /// `f(C[c])` as a `dim(U) × dim(X)` matrix.
    pub fn f_matrix(&self, c: usize) -> &RationalMatrix {
        &self.f.matrices[c]
    }

    /// `g(D[d])` as a `dim(V) × dim(Y)` matrix.
    pub fn g_matrix(&self, d: usize) -> &RationalMatrix {
        &self.g.matrices[d]
    }

    /// `A(C[c])`, always a point of `D`.
    pub fn image(&self, c: usize) -> &RationalVector {
        &self.images[c]
    }

    /// Index in `D` of `A(C[c])`.
    pub fn image_index(&self, c: usize) -> usize {
        self.image_index[c]
    }

    /// `U` and `V` are both one-dimensional (real pairings).
    pub fn is_scalar(&self) -> bool {
        self.u.dim() == 1 && self.v.dim() == 1
    }

    /// `f(C[c])(z)`, a point of `U`.
    pub fn apply_f(&self, c: usize, z: &RationalVector) -> Result<RationalVector, ModelError> {
        self.check_c(c)?;
        Ok(mat_apply(self.f_matrix(c), z)?)
    }

    /// `A(C[c])`, a point of `D`.
    pub fn apply_a(&self, c: usize) -> Result<RationalVector, ModelError> {
        self.check_c(c)?;
        Ok(self.images[c].clone())
    }

    fn check_c(&self, c: usize) -> Result<(), ModelError> {
        if c >= self.c.len() {
            return Err(ModelError::Index { what: "C", index: c, len: self.c.len() });
        }
        Ok(())
    }
}

fn build_set(name: &str, points: Vec<RationalVector>, space: &SpaceSpec, cap: usize) -> Result<FinitePoset, ModelError> {
    if points.is_empty() {
        return Err(invalid(name, "set must be nonempty"));
    }
    for (k, p) in points.iter().enumerate() {
        if p.dim() != space.dim() {
            return Err(invalid(
                format!("{name}[{k}]"),
                format!("expected dimension {}, found {}", space.dim(), p.dim()),
            ));
        }
    }
    FinitePoset::with_cap(points, space.order().clone(), cap).map_err(|e| match e {
        OrderError::DuplicatePoint { first, second } => {
            invalid(format!("{name}[{second}]"), format!("duplicates {name}[{first}]"))
        }
        other => invalid(name, other),
    })
}

fn check_table(name: &str, table: &OperatorTable, len: usize, rows: usize, cols: usize) -> Result<(), ModelError> {
    if table.domain_size() != len {
        return Err(invalid(name, format!("expected {len} matrices, found {}", table.domain_size())));
    }
    for (k, m) in table.matrices.iter().enumerate() {
        if m.rows() != rows || m.cols() != cols {
            return Err(invalid(
                format!("{name}[{k}]"),
                format!("expected {rows}x{cols}, found {}x{}", m.rows(), m.cols()),
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceDocument {
    dim: usize,
    order: OrderSpec,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpacesDocument {
    #[serde(rename = "X")]
    x: SpaceDocument,
    #[serde(rename = "Y")]
    y: SpaceDocument,
    #[serde(rename = "U")]
    u: SpaceDocument,
    #[serde(rename = "V")]
    v: SpaceDocument,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum CouplingDocument {
    Linear { matrix: RationalMatrix },
    Table { values: Vec<RationalVector> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDocument {
    spaces: SpacesDocument,
    #[serde(rename = "C")]
    c: Vec<RationalVector>,
    #[serde(rename = "D")]
    d: Vec<RationalVector>,
    f: Vec<RationalMatrix>,
    g: Vec<RationalMatrix>,
    #[serde(rename = "A")]
    a: CouplingDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_prime: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

fn space_from_doc(name: &str, doc: SpaceDocument) -> Result<SpaceSpec, ModelError> {
    SpaceSpec::new(doc.dim, doc.order).map_err(|e| invalid(format!("spaces.{name}"), e))
}

fn space_to_doc(space: &SpaceSpec) -> SpaceDocument {
    SpaceDocument { dim: space.dim(), order: space.order().spec().clone() }
}

/// Parses and validates an instance document with the default point cap.
pub fn load_instance(document: &[u8]) -> Result<Instance, ModelError> {
    load_instance_with_cap(document, DEFAULT_MAX_POINTS)
}

pub fn load_instance_with_cap(document: &[u8], cap: usize) -> Result<Instance, ModelError> {
    let de = &mut serde_json::Deserializer::from_slice(document);
    let doc: InstanceDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = match e.path().to_string().as_str() {
            "?" | "." => "document root".to_string(),
            p => p.to_string(),
        };
        ModelError::Parse { path, message: e.into_inner().to_string() }
    })?;
    let parts = InstanceParts {
        x: space_from_doc("X", doc.spaces.x)?,
        y: space_from_doc("Y", doc.spaces.y)?,
        u: space_from_doc("U", doc.spaces.u)?,
        v: space_from_doc("V", doc.spaces.v)?,
        c: doc.c,
        d: doc.d,
        f: OperatorTable { matrices: doc.f },
        g: OperatorTable { matrices: doc.g },
        a: match doc.a {
            CouplingDocument::Linear { matrix } => CouplingMap::Linear(matrix),
            CouplingDocument::Table { values } => CouplingMap::Table(values),
        },
        x_prime: doc.x_prime,
        meta: doc.meta,
    };
    Instance::from_parts_with_cap(parts, cap)
}

/// Pretty-printed JSON; `load_instance` inverts it exactly.
pub fn save_instance(i: &Instance) -> Vec<u8> {
    let doc = InstanceDocument {
        spaces: SpacesDocument {
            x: space_to_doc(&i.x),
            y: space_to_doc(&i.y),
            u: space_to_doc(&i.u),
            v: space_to_doc(&i.v),
        },
        c: i.c.points().to_vec(),
        d: i.d.points().to_vec(),
        f: i.f.matrices.clone(),
        g: i.g.matrices.clone(),
        a: match &i.a {
            CouplingMap::Linear(m) => CouplingDocument::Linear { matrix: m.clone() },
            CouplingMap::Table(values) => CouplingDocument::Table { values: values.clone() },
        },
        x_prime: i.x_prime,
        meta: i.meta.clone(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("instance documents always serialize");
    out.push(b'\n');
    out
}
