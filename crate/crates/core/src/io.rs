//! JSON documents for structures, metrics, Hamiltonians, maps and flow
//! configurations. Matrices are row-major arrays of 64-bit floats.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{HamiltonianTriple, Monomial};
use crate::error::{HkError, Result};
use crate::linalg::{from_rows, to_rows};
use crate::maps::MapFamily;
use crate::structures::{standard_triple, Dimension, HkStructure, MetricField, OrientationSignature, Triple};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDoc {
    pub kind: String,
    #[serde(default, alias = "params", skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

impl MetricDoc {
    pub fn euclidean() -> Self {
        Self { kind: "euclidean".into(), data: None }
    }

    pub fn to_metric(&self, n: Dimension) -> Result<MetricField> {
        let o = n.order();
        let data = || self.data.clone().ok_or_else(|| HkError::Invalid(format!("metric '{}' needs data", self.kind)));
        let metric = match self.kind.as_str() {
            "euclidean" => MetricField::euclidean(n),
            "diag" => {
                let d: Vec<f64> = parse(data()?)?;
                if d.len() != o {
                    return Err(HkError::DimensionMismatch { expected: o, got: d.len() });
                }
                MetricField::Constant(DMatrix::from_diagonal(&DVector::from_vec(d)))
            }
            "matrix" => {
                let rows: Vec<Vec<f64>> = parse(data()?)?;
                MetricField::Constant(square(&rows, o)?)
            }
            "matrix-fn-id" => {
                let id: String = parse(data()?)?;
                MetricField::builtin(&id, o)?
            }
            "diag-poly" => {
                #[derive(Deserialize)]
                struct P {
                    base: Vec<f64>,
                    quad: Vec<Vec<f64>>,
                }
                let p: P = parse(data()?)?;
                if p.base.len() != o {
                    return Err(HkError::DimensionMismatch { expected: o, got: p.base.len() });
                }
                MetricField::DiagPoly {
                    base: DVector::from_vec(p.base),
                    quad: square(&p.quad, o)?,
                }
            }
            "conformal" => {
                #[derive(Deserialize)]
                struct P {
                    #[serde(default)]
                    phi0: f64,
                    grad: Vec<f64>,
                }
                let p: P = parse(data()?)?;
                if p.grad.len() != o {
                    return Err(HkError::DimensionMismatch { expected: o, got: p.grad.len() });
                }
                MetricField::Conformal {
                    phi0: p.phi0,
                    grad: DVector::from_vec(p.grad),
                }
            }
            other => return Err(HkError::Invalid(format!("unknown metric kind '{other}'"))),
        };
        Ok(metric)
    }
}

fn parse<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| HkError::Invalid(e.to_string()))
}

fn square(rows: &[Vec<f64>], order: usize) -> Result<DMatrix<f64>> {
    let m = from_rows(rows)?;
    crate::linalg::require_order(&m, order)?;
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignsDoc {
    pub signs: Vec<i64>,
}

/// Either `{standard: {signs}}`, three matrices of rows, or three flat
/// row-major arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TripleDoc {
    Standard { standard: SignsDoc },
    Rows(Vec<Vec<Vec<f64>>>),
    Flat(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureDoc {
    #[serde(default = "schema")]
    pub schema: u32,
    pub n: usize,
    #[serde(default = "MetricDoc::euclidean")]
    pub metric: MetricDoc,
    #[serde(rename = "Y")]
    pub y: TripleDoc,
}

fn schema() -> u32 {
    SCHEMA_VERSION
}

impl StructureDoc {
    pub fn standard(signature: &OrientationSignature) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            n: signature.dimension().n(),
            metric: MetricDoc::euclidean(),
            y: TripleDoc::Standard {
                standard: SignsDoc { signs: signature.signs() },
            },
        }
    }

    /// Explicit matrices of a constant structure at the origin.
    pub fn from_structure(s: &HkStructure) -> Self {
        let x = s.origin();
        let g = s.metric().eval(&x);
        let metric = if s.metric().is_euclidean() {
            MetricDoc::euclidean()
        } else {
            MetricDoc {
                kind: "matrix".into(),
                data: Some(serde_json::to_value(to_rows(&g)).expect("finite matrix")),
            }
        };
        Self {
            schema: SCHEMA_VERSION,
            n: s.dim().n(),
            metric,
            y: TripleDoc::Rows(s.triple_at(&x).iter().map(to_rows).collect()),
        }
    }

    pub fn to_structure(&self) -> Result<HkStructure> {
        let n = Dimension::new(self.n)?;
        let metric = self.metric.to_metric(n)?;
        match &self.y {
            TripleDoc::Standard { standard } => {
                let sig = OrientationSignature::from_signs(&standard.signs)?;
                if sig.dimension() != n {
                    return Err(HkError::DimensionMismatch { expected: n.n(), got: sig.dimension().n() });
                }
                if metric.is_euclidean() {
                    Ok(HkStructure::standard(&sig))
                } else {
                    HkStructure::from_constant(metric, standard_triple(&sig))
                }
            }
            TripleDoc::Rows(ms) => {
                let ys = three(ms.iter().map(|r| square(r, n.order())).collect::<Result<Vec<_>>>()?)?;
                HkStructure::from_constant(metric, ys)
            }
            TripleDoc::Flat(ms) => {
                let o = n.order();
                let ys = three(
                    ms.iter()
                        .map(|v| {
                            if v.len() != o * o {
                                return Err(HkError::DimensionMismatch { expected: o * o, got: v.len() });
                            }
                            Ok(DMatrix::from_row_slice(o, o, v))
                        })
                        .collect::<Result<Vec<_>>>()?,
                )?;
                HkStructure::from_constant(metric, ys)
            }
        }
    }
}

fn three(v: Vec<DMatrix<f64>>) -> Result<Triple> {
    let len = v.len();
    <[DMatrix<f64>; 3]>::try_from(v).map_err(|_| HkError::Invalid(format!("expected 3 matrices, got {len}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HamiltonianDoc {
    Quadratic {
        q: Vec<Vec<Vec<f64>>>,
        #[serde(default)]
        b: Option<Vec<Vec<f64>>>,
    },
    Polynomial {
        terms: Vec<Vec<Monomial>>,
    },
    Preset {
        name: String,
    },
}

impl HamiltonianDoc {
    pub fn to_hamiltonians(&self, order: usize) -> Result<HamiltonianTriple> {
        match self {
            HamiltonianDoc::Quadratic { q, b } => {
                let qs = three(q.iter().map(|r| square(r, order)).collect::<Result<Vec<_>>>()?)?;
                let bs = match b {
                    Some(b) => {
                        if b.len() != 3 {
                            return Err(HkError::Invalid(format!("expected 3 linear terms, got {}", b.len())));
                        }
                        std::array::from_fn(|a| DVector::from_vec(b[a].clone()))
                    }
                    None => std::array::from_fn(|_| DVector::zeros(order)),
                };
                HamiltonianTriple::quadratic(qs, bs)
            }
            HamiltonianDoc::Polynomial { terms } => {
                if terms.len() != 3 {
                    return Err(HkError::Invalid(format!("expected 3 term lists, got {}", terms.len())));
                }
                HamiltonianTriple::polynomial(order, std::array::from_fn(|a| terms[a].clone()))
            }
            HamiltonianDoc::Preset { name } => match name.as_str() {
                "zero" => Ok(HamiltonianTriple::zero(order)),
                "quaternionic-oscillator" => Ok(HamiltonianTriple::quaternionic_oscillator(order)),
                "single-radial" => Ok(HamiltonianTriple::single_radial(order)),
                other => Err(HkError::Invalid(format!("unknown Hamiltonian preset '{other}'"))),
            },
        }
    }
}

/// `{structure, hamiltonians, x0, T, steps}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub structure: StructureDoc,
    pub hamiltonians: HamiltonianDoc,
    pub x0: Vec<f64>,
    #[serde(rename = "T")]
    pub t: f64,
    pub steps: usize,
}

/// A linear map: explicit rows or a named family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapDoc {
    Matrix { matrix: Vec<Vec<f64>> },
    Family {
        family: String,
        #[serde(default)]
        alpha: Option<usize>,
        #[serde(default)]
        t: Option<f64>,
        #[serde(default)]
        lambda: Option<f64>,
    },
    Rows(Vec<Vec<f64>>),
}

impl MapDoc {
    pub fn to_matrix(&self, n: usize) -> Result<DMatrix<f64>> {
        match self {
            MapDoc::Matrix { matrix } | MapDoc::Rows(matrix) => square(matrix, 4 * n),
            MapDoc::Family { family, alpha, t, lambda } => {
                let need = |v: Option<f64>, name: &str| v.ok_or_else(|| HkError::Invalid(format!("family '{family}' needs '{name}'")));
                let label = || -> Result<usize> {
                    let a = alpha.ok_or_else(|| HkError::Invalid(format!("family '{family}' needs 'alpha'")))?;
                    if !(1..=3).contains(&a) {
                        return Err(HkError::LabelOutOfRange(a));
                    }
                    Ok(a - 1)
                };
                let fam = match family.as_str() {
                    "scale" => MapFamily::Scale(need(*lambda, "lambda")?),
                    "exp-Y" => MapFamily::ExpY { alpha: label()?, t: need(*t, "t")? },
                    "exp-Yhat" => MapFamily::ExpYhat { alpha: label()?, t: need(*t, "t")? },
                    "block-swap" => MapFamily::BlockSwap,
                    other => return Err(HkError::Invalid(format!("unknown map family '{other}'"))),
                };
                fam.jacobian(n)
            }
        }
    }
}
