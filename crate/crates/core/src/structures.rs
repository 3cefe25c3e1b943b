//! Hyperkähler structure triples on `R^{4n}`.
//!
//! A structure is a Riemannian metric `g(x)` together with three matrix
//! fields `Y_α(x)` (the coordinate matrices of the complex structures `J_α`)
//! satisfying `Y_α Y_β = ε_{αβγ} Y_γ − δ_{αβ} I` and `g Y_α = −(g Y_α)^T`.
//!
//! Labels `α ∈ {1, 2, 3}` are stored 0-based (`0, 1, 2`) throughout the
//! crate; reports and serialized output use 1-based labels.
//!
//! A 2-form is represented only by its antisymmetric coefficient matrix `K`,
//! evaluated as `ω(v, w) = vᵀ K w`. The Kähler forms are `K_α = g Y_α` and
//! the contravariant tensors are `M_α = Y_α g⁻¹`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Matrix3, Matrix4, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HkError, Result};
use crate::linalg::{antisymmetry_defect, epsilon3, require_order, sup_norm};

/// Default tolerance for admitting floating-point structures.
pub const ADMISSION_TOL: f64 = 1e-10;

/// Quaternionic dimension `n`; the manifold is `R^{4n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(HkError::ZeroDimension);
        }
        Ok(Self(n))
    }

    pub fn from_order(order: usize) -> Result<Self> {
        if order == 0 || !order.is_multiple_of(4) {
            return Err(HkError::Invalid(format!(
                "order {order} is not a positive multiple of 4"
            )));
        }
        Ok(Self(order / 4))
    }

    pub fn n(self) -> usize {
        self.0
    }

    /// Matrix order `4n`.
    pub fn order(self) -> usize {
        4 * self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn from_sign(s: i64) -> Result<Self> {
        match s {
            1 => Ok(Orientation::Positive),
            -1 => Ok(Orientation::Negative),
            _ => Err(HkError::Invalid(format!("orientation sign must be ±1, got {s}"))),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

/// Per-block orientation of a structure in standard form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrientationSignature(Vec<Orientation>);

impl OrientationSignature {
    pub fn new(blocks: Vec<Orientation>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(HkError::ZeroDimension);
        }
        Ok(Self(blocks))
    }

    pub fn all_positive(n: Dimension) -> Self {
        Self(vec![Orientation::Positive; n.n()])
    }

    pub fn from_signs(signs: &[i64]) -> Result<Self> {
        Self::new(
            signs
                .iter()
                .map(|&s| Orientation::from_sign(s))
                .collect::<Result<_>>()?,
        )
    }

    pub fn random<R: Rng + ?Sized>(n: Dimension, rng: &mut R) -> Self {
        Self(
            (0..n.n())
                .map(|_| {
                    if rng.random::<bool>() {
                        Orientation::Positive
                    } else {
                        Orientation::Negative
                    }
                })
                .collect(),
        )
    }

    pub fn dimension(&self) -> Dimension {
        Dimension(self.0.len())
    }

    pub fn blocks(&self) -> &[Orientation] {
        &self.0
    }

    pub fn signs(&self) -> Vec<i64> {
        self.0.iter().map(|o| o.sign() as i64).collect()
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|o| o.flipped()).collect())
    }

    /// Product of the block signs.
    pub fn parity(&self) -> f64 {
        self.0.iter().map(|o| o.sign()).product()
    }
}

impl fmt::Display for OrientationSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<&str> = self
            .0
            .iter()
            .map(|o| match o {
                Orientation::Positive => "+",
                Orientation::Negative => "-",
            })
            .collect();
        write!(f, "({})", s.join(","))
    }
}

#[rustfmt::skip]
const POSITIVE_BLOCKS: [[f64; 16]; 3] = [
    [ 0.0, 1.0, 0.0, 0.0,
     -1.0, 0.0, 0.0, 0.0,
      0.0, 0.0, 0.0, 1.0,
      0.0, 0.0,-1.0, 0.0],
    [ 0.0, 0.0, 0.0, 1.0,
      0.0, 0.0, 1.0, 0.0,
      0.0,-1.0, 0.0, 0.0,
     -1.0, 0.0, 0.0, 0.0],
    [ 0.0, 0.0, 1.0, 0.0,
      0.0, 0.0, 0.0,-1.0,
     -1.0, 0.0, 0.0, 0.0,
      0.0, 1.0, 0.0, 0.0],
];

#[rustfmt::skip]
const NEGATIVE_BLOCKS: [[f64; 16]; 3] = [
    [ 0.0, 0.0, 1.0, 0.0,
      0.0, 0.0, 0.0, 1.0,
     -1.0, 0.0, 0.0, 0.0,
      0.0,-1.0, 0.0, 0.0],
    [ 0.0, 0.0, 0.0,-1.0,
      0.0, 0.0, 1.0, 0.0,
      0.0,-1.0, 0.0, 0.0,
      1.0, 0.0, 0.0, 0.0],
    [ 0.0,-1.0, 0.0, 0.0,
      1.0, 0.0, 0.0, 0.0,
      0.0, 0.0, 0.0, 1.0,
      0.0, 0.0,-1.0, 0.0],
];

/// The 4×4 standard complex structure with label `alpha` (0-based).
pub fn standard_block(alpha: usize, orientation: Orientation) -> Matrix4<f64> {
    let data = match orientation {
        Orientation::Positive => &POSITIVE_BLOCKS[alpha],
        Orientation::Negative => &NEGATIVE_BLOCKS[alpha],
    };
    Matrix4::from_row_slice(data)
}

/// Block-diagonal standard triple for the given signature.
pub fn standard_triple(signature: &OrientationSignature) -> [DMatrix<f64>; 3] {
    let order = signature.dimension().order();
    std::array::from_fn(|alpha| {
        let mut y = DMatrix::zeros(order, order);
        for (a, &o) in signature.blocks().iter().enumerate() {
            y.view_mut((4 * a, 4 * a), (4, 4))
                .copy_from(&standard_block(alpha, o));
        }
        y
    })
}

/// Whether a derivative came from a closed form or from finite differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeSource {
    Analytic,
    FiniteDifference,
}

type MatrixFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;
type MatrixDerivFn = Arc<dyn Fn(&DVector<f64>, usize) -> DMatrix<f64> + Send + Sync>;
type TripleFn = Arc<dyn Fn(&DVector<f64>) -> [DMatrix<f64>; 3] + Send + Sync>;
type TripleDerivFn = Arc<dyn Fn(&DVector<f64>, usize) -> [DMatrix<f64>; 3] + Send + Sync>;

/// A point-dependent metric given by a callable, with optional analytic
/// derivative `∂g/∂x^k`.
#[derive(Clone)]
pub struct FunctionMetric {
    pub id: String,
    order: usize,
    eval: MatrixFn,
    derivative: Option<MatrixDerivFn>,
}

impl fmt::Debug for FunctionMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionMetric")
            .field("id", &self.id)
            .field("order", &self.order)
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

/// Riemannian metric field on a single chart of `R^{4n}`.
#[derive(Debug, Clone)]
pub enum MetricField {
    Euclidean { order: usize },
    Constant(DMatrix<f64>),
    /// `g_ii(x) = base_i + Σ_k quad[i,k] (x^k)²`, off-diagonal entries zero.
    DiagPoly {
        base: DVector<f64>,
        quad: DMatrix<f64>,
    },
    /// `g(x) = exp(2 (phi0 + grad·x)) I`.
    Conformal { phi0: f64, grad: DVector<f64> },
    Function(FunctionMetric),
}

/// Central-difference step for metric derivatives.
pub fn metric_fd_step(x: &DVector<f64>) -> f64 {
    1e-5 * x.norm().max(1.0)
}

/// Central-difference step for structure derivatives, `eps^{1/3} max(1, |x|)`.
pub fn structure_fd_step(x: &DVector<f64>) -> f64 {
    f64::EPSILON.cbrt() * x.norm().max(1.0)
}

impl MetricField {
    pub fn euclidean(n: Dimension) -> Self {
        MetricField::Euclidean { order: n.order() }
    }

    pub fn function<F>(id: impl Into<String>, order: usize, eval: F) -> Self
    where
        F: Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    {
        MetricField::Function(FunctionMetric {
            id: id.into(),
            order,
            eval: Arc::new(eval),
            derivative: None,
        })
    }

    pub fn function_with_derivative<F, D>(id: impl Into<String>, order: usize, eval: F, deriv: D) -> Self
    where
        F: Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
        D: Fn(&DVector<f64>, usize) -> DMatrix<f64> + Send + Sync + 'static,
    {
        MetricField::Function(FunctionMetric {
            id: id.into(),
            order,
            eval: Arc::new(eval),
            derivative: Some(Arc::new(deriv)),
        })
    }

    /// Named metrics addressable from JSON by `matrix-fn-id`.
    pub fn builtin(id: &str, order: usize) -> Result<Self> {
        match id {
            "radial-conformal" => Ok(Self::function_with_derivative(
                id,
                order,
                move |x| DMatrix::identity(order, order) * (1.0 + x.norm_squared()),
                move |x, k| DMatrix::identity(order, order) * (2.0 * x[k]),
            )),
            "euclidean" => Ok(MetricField::Euclidean { order }),
            _ => Err(HkError::Invalid(format!("unknown metric function id '{id}'"))),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            MetricField::Euclidean { order } => *order,
            MetricField::Constant(g) => g.nrows(),
            MetricField::DiagPoly { base, .. } => base.len(),
            MetricField::Conformal { grad, .. } => grad.len(),
            MetricField::Function(f) => f.order,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, MetricField::Euclidean { .. } | MetricField::Constant(_))
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self, MetricField::Euclidean { .. })
    }

    pub fn eval(&self, x: &DVector<f64>) -> DMatrix<f64> {
        match self {
            MetricField::Euclidean { order } => DMatrix::identity(*order, *order),
            MetricField::Constant(g) => g.clone(),
            MetricField::DiagPoly { base, quad } => {
                let sq = x.map(|v| v * v);
                DMatrix::from_diagonal(&(base + quad * sq))
            }
            MetricField::Conformal { phi0, grad } => {
                let o = grad.len();
                DMatrix::identity(o, o) * (2.0 * (phi0 + grad.dot(x))).exp()
            }
            MetricField::Function(f) => (f.eval)(x),
        }
    }

    pub fn has_analytic_derivative(&self) -> bool {
        match self {
            MetricField::Function(f) => f.derivative.is_some(),
            _ => true,
        }
    }

    /// `∂g/∂x^k` at `x`, analytic when available, otherwise central differences.
    pub fn derivative(&self, x: &DVector<f64>, k: usize) -> (DMatrix<f64>, DerivativeSource) {
        let o = self.order();
        match self {
            MetricField::Euclidean { .. } | MetricField::Constant(_) => {
                (DMatrix::zeros(o, o), DerivativeSource::Analytic)
            }
            MetricField::DiagPoly { quad, .. } => {
                let d = DVector::from_fn(o, |i, _| 2.0 * quad[(i, k)] * x[k]);
                (DMatrix::from_diagonal(&d), DerivativeSource::Analytic)
            }
            MetricField::Conformal { grad, .. } => {
                (self.eval(x) * (2.0 * grad[k]), DerivativeSource::Analytic)
            }
            MetricField::Function(f) => match &f.derivative {
                Some(d) => (d(x, k), DerivativeSource::Analytic),
                None => (self.fd_derivative(x, k), DerivativeSource::FiniteDifference),
            },
        }
    }

    /// Central finite difference of the metric, step `1e-5 max(1, |x|)`.
    pub fn fd_derivative(&self, x: &DVector<f64>, k: usize) -> DMatrix<f64> {
        let h = metric_fd_step(x);
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += h;
        xm[k] -= h;
        (self.eval(&xp) - self.eval(&xm)) / (2.0 * h)
    }

    /// Cholesky factor of `g(x)`; fails with a degenerate-metric error.
    pub fn cholesky(&self, x: &DVector<f64>) -> Result<Cholesky<f64, nalgebra::Dyn>> {
        let g = self.eval(x);
        if crate::linalg::symmetry_defect(&g) > 1e-12 * sup_norm(&g).max(1.0) {
            return Err(HkError::DegenerateMetric);
        }
        Cholesky::new(g).ok_or(HkError::DegenerateMetric)
    }

    pub fn inverse(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        match self {
            MetricField::Euclidean { order } => Ok(DMatrix::identity(*order, *order)),
            _ => Ok(self.cholesky(x)?.inverse()),
        }
    }
}

/// Three 4n×4n matrices, one per label.
pub type Triple = [DMatrix<f64>; 3];

#[derive(Clone)]
enum TripleField {
    Constant(Triple),
    Function {
        eval: TripleFn,
        derivative: Option<TripleDerivFn>,
    },
}

/// A hyperkähler structure: metric plus quaternionic triple.
#[derive(Clone)]
pub struct HkStructure {
    dim: Dimension,
    metric: MetricField,
    triple: TripleField,
    /// Set when the metric is Euclidean and every coordinate 4-block is an
    /// invariant subspace of the triple, with the given orientations.
    standard: Option<OrientationSignature>,
}

impl fmt::Debug for HkStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HkStructure")
            .field("n", &self.dim.n())
            .field("metric", &self.metric)
            .field("constant", &self.is_constant())
            .field("standard", &self.standard.as_ref().map(|s| s.to_string()))
            .finish()
    }
}

impl HkStructure {
    /// Constant block-diagonal structure with identity metric.
    pub fn standard(signature: &OrientationSignature) -> Self {
        let dim = signature.dimension();
        Self {
            dim,
            metric: MetricField::euclidean(dim),
            triple: TripleField::Constant(standard_triple(signature)),
            standard: Some(signature.clone()),
        }
    }

    pub fn standard_positive(n: usize) -> Result<Self> {
        Ok(Self::standard(&OrientationSignature::all_positive(Dimension::new(n)?)))
    }

    /// Constant triple with a metric; validated at the origin with
    /// [`ADMISSION_TOL`].
    pub fn from_constant(metric: MetricField, ys: Triple) -> Result<Self> {
        let s = Self::from_constant_unchecked(metric, ys)?;
        s.admit()?;
        Ok(s)
    }

    /// Constant triple without validating the quaternionic relations.
    pub fn from_constant_unchecked(metric: MetricField, ys: Triple) -> Result<Self> {
        let dim = Dimension::from_order(metric.order())?;
        for y in &ys {
            require_order(y, dim.order())?;
        }
        Ok(Self {
            dim,
            metric,
            triple: TripleField::Constant(ys),
            standard: None,
        })
    }

    /// Point-dependent triple; validated at the origin.
    pub fn from_fn<F>(metric: MetricField, eval: F) -> Result<Self>
    where
        F: Fn(&DVector<f64>) -> Triple + Send + Sync + 'static,
    {
        Self::from_fn_impl(metric, Arc::new(eval), None)
    }

    pub fn from_fn_with_derivative<F, D>(metric: MetricField, eval: F, deriv: D) -> Result<Self>
    where
        F: Fn(&DVector<f64>) -> Triple + Send + Sync + 'static,
        D: Fn(&DVector<f64>, usize) -> Triple + Send + Sync + 'static,
    {
        Self::from_fn_impl(metric, Arc::new(eval), Some(Arc::new(deriv)))
    }

    fn from_fn_impl(metric: MetricField, eval: TripleFn, derivative: Option<TripleDerivFn>) -> Result<Self> {
        let dim = Dimension::from_order(metric.order())?;
        let s = Self {
            dim,
            metric,
            triple: TripleField::Function { eval, derivative },
            standard: None,
        };
        let ys = s.triple_at(&s.origin());
        for y in &ys {
            require_order(y, dim.order())?;
        }
        s.admit()?;
        Ok(s)
    }

    fn admit(&self) -> Result<()> {
        let x = self.origin();
        let g = self.metric.eval(&x);
        self.metric.cholesky(&x)?;
        let report = quaternionic_residuals(&g, &self.triple_at(&x))?;
        let scale = sup_norm(&g).max(1.0);
        if report.algebra > ADMISSION_TOL || report.orthogonality > ADMISSION_TOL * scale {
            return Err(HkError::NotQuaternionic {
                algebra: report.algebra,
                orthogonality: report.orthogonality,
            });
        }
        Ok(())
    }

    pub(crate) fn with_block_signature(mut self, signature: OrientationSignature) -> Self {
        self.standard = Some(signature);
        self
    }

    pub fn origin(&self) -> DVector<f64> {
        DVector::zeros(self.dim.order())
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.dim.order()
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    /// True when the triple does not depend on the point.
    pub fn is_constant(&self) -> bool {
        matches!(self.triple, TripleField::Constant(_))
    }

    /// Per-block orientations when the coordinate blocks are adapted to the
    /// structure (standard structures and their duals).
    pub fn block_signature(&self) -> Option<&OrientationSignature> {
        self.standard.as_ref()
    }

    pub fn triple_at(&self, x: &DVector<f64>) -> Triple {
        match &self.triple {
            TripleField::Constant(ys) => ys.clone(),
            TripleField::Function { eval, .. } => eval(x),
        }
    }

    /// The constant triple, when the structure has one.
    pub fn constant_triple(&self) -> Option<&Triple> {
        match &self.triple {
            TripleField::Constant(ys) => Some(ys),
            TripleField::Function { .. } => None,
        }
    }

    /// `∂Y_α/∂x^i` at `x`.
    pub fn triple_derivative(&self, x: &DVector<f64>, i: usize) -> (Triple, DerivativeSource) {
        let o = self.order();
        match &self.triple {
            TripleField::Constant(_) => (
                std::array::from_fn(|_| DMatrix::zeros(o, o)),
                DerivativeSource::Analytic,
            ),
            TripleField::Function {
                derivative: Some(d), ..
            } => (d(x, i), DerivativeSource::Analytic),
            TripleField::Function { eval, .. } => {
                let h = structure_fd_step(x);
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let p = eval(&xp);
                let m = eval(&xm);
                (
                    std::array::from_fn(|a| (&p[a] - &m[a]) / (2.0 * h)),
                    DerivativeSource::FiniteDifference,
                )
            }
        }
    }

    /// Kähler forms `K_α = g Y_α` and contravariant `M_α = Y_α g⁻¹` at `x`.
    pub fn kahler_form(&self, x: &DVector<f64>) -> Result<FormTriple> {
        if x.len() != self.order() {
            return Err(HkError::DimensionMismatch {
                expected: self.order(),
                got: x.len(),
            });
        }
        let g = self.metric.eval(x);
        let g_inv = self.metric.inverse(x)?;
        let ys = self.triple_at(x);
        Ok(FormTriple {
            k: std::array::from_fn(|a| &g * &ys[a]),
            m: std::array::from_fn(|a| &ys[a] * &g_inv),
        })
    }

    pub fn verify_quaternionic(&self, x: &DVector<f64>, tol: f64) -> Result<QuaternionicReport> {
        let g = self.metric.eval(x);
        let mut r = quaternionic_residuals(&g, &self.triple_at(x))?;
        r.tol = tol;
        r.pass = r.algebra <= tol && r.orthogonality <= tol;
        Ok(r)
    }

    /// `J̃_α = H⁻¹ Y_α H` with `H = h₀ I + h_α Y_α`, for a unit quaternion `h`.
    pub fn quaternion_action(&self, h: [f64; 4], x: &DVector<f64>) -> Result<Triple> {
        let norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(HkError::NonUnitQuaternion(norm));
        }
        let ys = self.triple_at(x);
        let o = self.order();
        let mut hm = DMatrix::identity(o, o) * h[0];
        let mut hinv = DMatrix::identity(o, o) * h[0];
        for a in 0..3 {
            hm += &ys[a] * h[a + 1];
            hinv -= &ys[a] * h[a + 1];
        }
        Ok(std::array::from_fn(|a| &hinv * &ys[a] * &hm))
    }
}

/// Coefficient matrices of the Kähler forms at a point.
#[derive(Debug, Clone)]
pub struct FormTriple {
    /// `K_α = g Y_α` (antisymmetric).
    pub k: Triple,
    /// `M_α = Y_α g⁻¹` (antisymmetric).
    pub m: Triple,
}

impl FormTriple {
    /// Largest violation among `K_αᵀ = −K_α`, `M_αᵀ = −M_α`,
    /// `K_α g⁻¹ K_β = ε K_γ − δ g`, `M_α g M_β = ε M_γ − δ g⁻¹`, `K_α M_α = −I`.
    pub fn identity_residual(&self, g: &DMatrix<f64>) -> Result<f64> {
        let g_inv = crate::linalg::inverse(g)?;
        let o = g.nrows();
        let mut worst = 0.0_f64;
        for a in 0..3 {
            worst = worst.max(antisymmetry_defect(&self.k[a]));
            worst = worst.max(antisymmetry_defect(&self.m[a]));
            let km = &self.k[a] * &self.m[a] + DMatrix::<f64>::identity(o, o);
            worst = worst.max(sup_norm(&km));
            for b in 0..3 {
                let mut rk = &self.k[a] * &g_inv * &self.k[b];
                let mut rm = &self.m[a] * g * &self.m[b];
                for c in 0..3 {
                    let e = epsilon3(a, b, c);
                    if e != 0.0 {
                        rk -= &self.k[c] * e;
                        rm -= &self.m[c] * e;
                    }
                }
                if a == b {
                    rk += g;
                    rm += &g_inv;
                }
                worst = worst.max(sup_norm(&rk)).max(sup_norm(&rm));
            }
        }
        Ok(worst)
    }

    /// `ω = c_α ω_α` as a coefficient matrix.
    pub fn combine(&self, c: &SphereCoefficient) -> DMatrix<f64> {
        c.combine(&self.k)
    }
}

/// Residuals of the quaternionic relations and of `g`-orthogonality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuaternionicReport {
    /// `max_{α,β} ‖Y_α Y_β − ε_{αβγ} Y_γ + δ_{αβ} I‖_∞`.
    pub algebra: f64,
    /// `max_α ‖g Y_α + (g Y_α)ᵀ‖_∞`.
    pub orthogonality: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Validator used to admit raw matrix triples.
pub fn quaternionic_residuals(g: &DMatrix<f64>, ys: &Triple) -> Result<QuaternionicReport> {
    let o = g.nrows();
    require_order(g, o)?;
    for y in ys {
        require_order(y, o)?;
    }
    let mut algebra = 0.0_f64;
    let mut orthogonality = 0.0_f64;
    for a in 0..3 {
        orthogonality = orthogonality.max(antisymmetry_defect(&(g * &ys[a])));
        for b in 0..3 {
            let mut r = &ys[a] * &ys[b];
            for c in 0..3 {
                let e = epsilon3(a, b, c);
                if e != 0.0 {
                    r -= &ys[c] * e;
                }
            }
            if a == b {
                for i in 0..o {
                    r[(i, i)] += 1.0;
                }
            }
            algebra = algebra.max(sup_norm(&r));
        }
    }
    Ok(QuaternionicReport {
        algebra,
        orthogonality,
        tol: 0.0,
        pass: algebra == 0.0 && orthogonality == 0.0,
    })
}

/// Coefficients `R_{αβ} = −tr(Ỹ_α Y_β) / (4n)` of `Ỹ` in the basis `Y`.
pub fn trace_pairing(tilde: &Triple, base: &Triple) -> Matrix3<f64> {
    let order = base[0].nrows() as f64;
    Matrix3::from_fn(|a, b| -(&tilde[a] * &base[b]).trace() / order)
}

/// Unit 3-vector selecting `ω = c_α ω_α` on the Kähler sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereCoefficient(Vector3<f64>);

impl SphereCoefficient {
    pub fn new(c: [f64; 3]) -> Result<Self> {
        let v = Vector3::from(c);
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(HkError::NonUnitSphere(norm));
        }
        Ok(Self(v))
    }

    pub fn normalized(c: [f64; 3]) -> Result<Self> {
        let v = Vector3::from(c);
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(HkError::NonUnitSphere(norm));
        }
        Ok(Self(v / norm))
    }

    pub fn axis(alpha: usize) -> Self {
        let mut v = Vector3::zeros();
        v[alpha] = 1.0;
        Self(v)
    }

    /// Uniform point on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                return Self(v / n);
            }
        }
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn get(&self, alpha: usize) -> f64 {
        self.0[alpha]
    }

    pub fn combine(&self, ms: &Triple) -> DMatrix<f64> {
        &ms[0] * self.0[0] + &ms[1] * self.0[1] + &ms[2] * self.0[2]
    }
}
