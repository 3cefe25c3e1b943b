//! Hyperhamiltonian vector fields, Lie derivatives of the symplectic triple,
//! flow integration with variational equations, and the canonical-flow
//! certificate.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::connection::{christoffel, GradientData};
use crate::error::{HkError, Result};
use crate::invariants::{block_restrict, p1_pairing, BlockIndex};
use crate::linalg::{epsilon3, sup_norm};
use crate::maps::{canonical_compare, recover_rotation_triples, standardize_at_point, CanonicalFlag, RotationReport, RotationStatus};
use crate::structures::{standard_triple, HkStructure, OrientationSignature, SphereCoefficient, Triple};

/// One term `coeff · Π_i x_i^{powers_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

impl Monomial {
    fn eval(&self, x: &DVector<f64>) -> f64 {
        self.powers
            .iter()
            .enumerate()
            .fold(self.coeff, |acc, (i, &p)| acc * x[i].powi(p as i32))
    }

    /// `∂^{d_i} (x_i^{p_i})` for the listed derivative counts.
    fn eval_derivative(&self, x: &DVector<f64>, counts: &[(usize, u32)]) -> f64 {
        let mut v = self.coeff;
        for (i, &p) in self.powers.iter().enumerate() {
            let d: u32 = counts.iter().filter(|(k, _)| *k == i).map(|(_, c)| c).sum();
            if d > p {
                return 0.0;
            }
            let falling: u32 = (0..d).map(|m| p - m).product();
            v *= falling as f64 * x[i].powi((p - d) as i32);
        }
        v
    }

    pub fn degree(&self) -> u32 {
        self.powers.iter().sum()
    }
}

type ScalarTripleFn = Arc<dyn Fn(&DVector<f64>) -> [f64; 3] + Send + Sync>;

/// Three scalar fields `H^α` with gradient and Hessian access.
#[derive(Clone)]
pub enum HamiltonianTriple {
    /// `H^α = ½ xᵀ Q_α x + b_αᵀ x` (each `Q_α` symmetric).
    Quadratic { q: [DMatrix<f64>; 3], b: [DVector<f64>; 3] },
    Polynomial { order: usize, terms: [Vec<Monomial>; 3] },
    /// Opaque callable; derivatives by central differences.
    Function { order: usize, eval: ScalarTripleFn },
}

impl std::fmt::Debug for HamiltonianTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HamiltonianTriple::Quadratic { q, b } => f.debug_struct("Quadratic").field("q", q).field("b", b).finish(),
            HamiltonianTriple::Polynomial { order, terms } => f
                .debug_struct("Polynomial")
                .field("order", order)
                .field("terms", terms)
                .finish(),
            HamiltonianTriple::Function { order, .. } => f.debug_struct("Function").field("order", order).finish(),
        }
    }
}

impl HamiltonianTriple {
    pub fn quadratic(q: [DMatrix<f64>; 3], b: [DVector<f64>; 3]) -> Result<Self> {
        let o = q[0].nrows();
        for a in 0..3 {
            crate::linalg::require_order(&q[a], o)?;
            if b[a].len() != o {
                return Err(HkError::DimensionMismatch { expected: o, got: b[a].len() });
            }
        }
        let q = q.map(|m| (&m + m.transpose()) * 0.5);
        Ok(HamiltonianTriple::Quadratic { q, b })
    }

    pub fn polynomial(order: usize, terms: [Vec<Monomial>; 3]) -> Result<Self> {
        for t in terms.iter().flatten() {
            if t.powers.len() != order {
                return Err(HkError::DimensionMismatch { expected: order, got: t.powers.len() });
            }
        }
        Ok(HamiltonianTriple::Polynomial { order, terms })
    }

    pub fn function<F>(order: usize, eval: F) -> Self
    where
        F: Fn(&DVector<f64>) -> [f64; 3] + Send + Sync + 'static,
    {
        HamiltonianTriple::Function { order, eval: Arc::new(eval) }
    }

    pub fn zero(order: usize) -> Self {
        HamiltonianTriple::Quadratic {
            q: std::array::from_fn(|_| DMatrix::zeros(order, order)),
            b: std::array::from_fn(|_| DVector::zeros(order)),
        }
    }

    /// `H^α = |x|²/2` for every label.
    pub fn quaternionic_oscillator(order: usize) -> Self {
        HamiltonianTriple::Quadratic {
            q: std::array::from_fn(|_| DMatrix::identity(order, order)),
            b: std::array::from_fn(|_| DVector::zeros(order)),
        }
    }

    /// `H = (|x|²/2, 0, 0)`.
    pub fn single_radial(order: usize) -> Self {
        HamiltonianTriple::Quadratic {
            q: std::array::from_fn(|a| {
                if a == 0 {
                    DMatrix::identity(order, order)
                } else {
                    DMatrix::zeros(order, order)
                }
            }),
            b: std::array::from_fn(|_| DVector::zeros(order)),
        }
    }

    /// Random polynomial triple: `terms` monomials per component, total
    /// degree in `1..=max_degree`, coefficients uniform in `[-1, 1]`.
    pub fn random_polynomial<R: Rng + ?Sized>(order: usize, max_degree: u32, terms: usize, rng: &mut R) -> Self {
        let comps = std::array::from_fn(|_| {
            (0..terms)
                .map(|_| {
                    let deg = rng.random_range(1..=max_degree);
                    let mut powers = vec![0u32; order];
                    for _ in 0..deg {
                        powers[rng.random_range(0..order)] += 1;
                    }
                    Monomial {
                        coeff: rng.random_range(-1.0..1.0),
                        powers,
                    }
                })
                .collect()
        });
        HamiltonianTriple::Polynomial { order, terms: comps }
    }

    /// Random quadratic triple with symmetric `Q_α` entries in `[-1, 1]`.
    pub fn random_quadratic<R: Rng + ?Sized>(order: usize, rng: &mut R) -> Self {
        let q = std::array::from_fn(|_| {
            let a = DMatrix::from_fn(order, order, |_, _| rng.random_range(-1.0..1.0));
            (&a + a.transpose()) * 0.5
        });
        HamiltonianTriple::Quadratic {
            q,
            b: std::array::from_fn(|_| DVector::zeros(order)),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            HamiltonianTriple::Quadratic { b, .. } => b[0].len(),
            HamiltonianTriple::Polynomial { order, .. } | HamiltonianTriple::Function { order, .. } => *order,
        }
    }

    pub fn is_quadratic(&self) -> bool {
        matches!(self, HamiltonianTriple::Quadratic { .. })
    }

    pub fn has_analytic_hessian(&self) -> bool {
        !matches!(self, HamiltonianTriple::Function { .. })
    }

    pub fn value(&self, x: &DVector<f64>) -> [f64; 3] {
        match self {
            HamiltonianTriple::Quadratic { q, b } => {
                std::array::from_fn(|a| 0.5 * x.dot(&(&q[a] * x)) + b[a].dot(x))
            }
            HamiltonianTriple::Polynomial { terms, .. } => {
                std::array::from_fn(|a| terms[a].iter().map(|t| t.eval(x)).sum())
            }
            HamiltonianTriple::Function { eval, .. } => eval(x),
        }
    }

    /// `P^α = ∇H^α`.
    pub fn gradient(&self, x: &DVector<f64>) -> [DVector<f64>; 3] {
        let o = self.order();
        match self {
            HamiltonianTriple::Quadratic { q, b } => std::array::from_fn(|a| &q[a] * x + &b[a]),
            HamiltonianTriple::Polynomial { terms, .. } => std::array::from_fn(|a| {
                DVector::from_fn(o, |k, _| terms[a].iter().map(|t| t.eval_derivative(x, &[(k, 1)])).sum())
            }),
            HamiltonianTriple::Function { eval, .. } => {
                let h = f64::EPSILON.cbrt() * x.norm().max(1.0);
                let mut out: [DVector<f64>; 3] = std::array::from_fn(|_| DVector::zeros(o));
                for k in 0..o {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[k] += h;
                    xm[k] -= h;
                    let (vp, vm) = (eval(&xp), eval(&xm));
                    for a in 0..3 {
                        out[a][k] = (vp[a] - vm[a]) / (2.0 * h);
                    }
                }
                out
            }
        }
    }

    /// `D^α = ∇∇H^α`, symmetric.
    pub fn hessian(&self, x: &DVector<f64>) -> [DMatrix<f64>; 3] {
        let o = self.order();
        match self {
            HamiltonianTriple::Quadratic { q, .. } => q.clone(),
            HamiltonianTriple::Polynomial { terms, .. } => std::array::from_fn(|a| {
                let mut d = DMatrix::zeros(o, o);
                for i in 0..o {
                    for j in i..o {
                        let v: f64 = terms[a].iter().map(|t| t.eval_derivative(x, &[(i, 1), (j, 1)])).sum();
                        d[(i, j)] = v;
                        d[(j, i)] = v;
                    }
                }
                d
            }),
            HamiltonianTriple::Function { eval, .. } => {
                let h = f64::EPSILON.powf(0.25) * x.norm().max(1.0);
                let f0 = eval(x);
                let mut out: [DMatrix<f64>; 3] = std::array::from_fn(|_| DMatrix::zeros(o, o));
                for i in 0..o {
                    for j in i..o {
                        let shifted = |si: f64, sj: f64| {
                            let mut y = x.clone();
                            y[i] += si * h;
                            y[j] += sj * h;
                            eval(&y)
                        };
                        let v: [f64; 3] = if i == j {
                            let (p, m) = (shifted(1.0, 0.0), shifted(-1.0, 0.0));
                            std::array::from_fn(|a| (p[a] - 2.0 * f0[a] + m[a]) / (h * h))
                        } else {
                            let (pp, pm, mp, mm) =
                                (shifted(1.0, 1.0), shifted(1.0, -1.0), shifted(-1.0, 1.0), shifted(-1.0, -1.0));
                            std::array::from_fn(|a| (pp[a] - pm[a] - mp[a] + mm[a]) / (4.0 * h * h))
                        };
                        for a in 0..3 {
                            out[a][(i, j)] = v[a];
                            out[a][(j, i)] = v[a];
                        }
                    }
                }
                out
            }
        }
    }

    pub fn gradient_data(&self, x: &DVector<f64>) -> Result<GradientData> {
        GradientData::new(self.gradient(x), self.hessian(x))
    }
}

/// Autonomous vector field with Jacobian access.
pub trait VectorField {
    fn order(&self) -> usize;
    fn eval(&self, x: &DVector<f64>) -> DVector<f64>;
    /// `Df^i_j = ∂f^i/∂x^j`.
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

/// `f^i = Σ_α M_α^{ij} ∂_j H^α`.
pub struct HyperhamField<'a> {
    h: &'a HamiltonianTriple,
    s: &'a HkStructure,
    /// `M_α` when both metric and triple are constant.
    constant_m: Option<Triple>,
}

impl<'a> HyperhamField<'a> {
    pub fn new(h: &'a HamiltonianTriple, s: &'a HkStructure) -> Result<Self> {
        if h.order() != s.order() {
            return Err(HkError::DimensionMismatch { expected: s.order(), got: h.order() });
        }
        let constant_m = if s.is_constant() && s.metric().is_constant() {
            Some(s.kahler_form(&s.origin())?.m)
        } else {
            None
        };
        Ok(Self { h, s, constant_m })
    }

    fn m_at(&self, x: &DVector<f64>) -> Triple {
        match &self.constant_m {
            Some(m) => m.clone(),
            None => self
                .s
                .kahler_form(x)
                .map(|f| f.m)
                .unwrap_or_else(|_| std::array::from_fn(|_| DMatrix::from_element(x.len(), x.len(), f64::NAN))),
        }
    }
}

impl VectorField for HyperhamField<'_> {
    fn order(&self) -> usize {
        self.s.order()
    }

    fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        let m = self.m_at(x);
        let p = self.h.gradient(x);
        &m[0] * &p[0] + &m[1] * &p[1] + &m[2] * &p[2]
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        if let (Some(m), true) = (&self.constant_m, self.h.has_analytic_hessian()) {
            let d = self.h.hessian(x);
            return &m[0] * &d[0] + &m[1] * &d[1] + &m[2] * &d[2];
        }
        fd_jacobian(self, x)
    }
}

fn fd_jacobian<F: VectorField + ?Sized>(f: &F, x: &DVector<f64>) -> DMatrix<f64> {
    let o = f.order();
    let h = f64::EPSILON.cbrt() * x.norm().max(1.0);
    let mut j = DMatrix::zeros(o, o);
    for k in 0..o {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += h;
        xm[k] -= h;
        j.set_column(k, &((f.eval(&xp) - f.eval(&xm)) / (2.0 * h)));
    }
    j
}

/// `ẋ = A x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearField {
    pub a: DMatrix<f64>,
}

impl LinearField {
    /// `ẋ = x`, which is not hyperhamiltonian.
    pub fn expansion(order: usize) -> Self {
        Self { a: DMatrix::identity(order, order) }
    }
}

impl VectorField for LinearField {
    fn order(&self) -> usize {
        self.a.nrows()
    }

    fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x
    }

    fn jacobian(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.a.clone()
    }
}

pub fn hyperham_field(h: &HamiltonianTriple, s: &HkStructure, x: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(HyperhamField::new(h, s)?.eval(x))
}

/// `λ^α_j = f^i K^α_{ij}`.
pub fn lambda_contraction(h: &HamiltonianTriple, s: &HkStructure, x: &DVector<f64>, alpha: usize) -> Result<DVector<f64>> {
    let f = hyperham_field(h, s, x)?;
    let k = s.kahler_form(x)?.k;
    Ok(k[alpha].transpose() * f)
}

/// `P^α_j + ε_{αβγ} P^β_k (Y_γ)^k_j`.
pub fn lambda_expansion(h: &HamiltonianTriple, s: &HkStructure, x: &DVector<f64>, alpha: usize) -> DVector<f64> {
    let p = h.gradient(x);
    let ys = s.triple_at(x);
    let mut out = p[alpha].clone();
    for b in 0..3 {
        for c in 0..3 {
            let e = epsilon3(alpha, b, c);
            if e != 0.0 {
                out += ys[c].transpose() * &p[b] * e;
            }
        }
    }
    out
}

/// Coefficient matrix of `L_X ω_α` for the hyperhamiltonian field `X`.
///
/// With `λ^α = ι_X ω_α`, returns `(∂λ) − (∂λ)ᵀ` where
/// `∂_i λ^α_j = D^α_{ij} + ε_{αβγ}[(D^β Y_γ)_{ij} + P^β_k (∂_i Y_γ)^k_j]` and
/// `∂_i Y_γ = −[A_i, Y_γ]` from the Levi-Civita connection; the last term is
/// absent for a constant triple on a constant metric.
pub fn lie_derivative_omega(h: &HamiltonianTriple, s: &HkStructure, alpha: usize, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    if alpha > 2 {
        return Err(HkError::LabelOutOfRange(alpha + 1));
    }
    if h.order() != s.order() {
        return Err(HkError::DimensionMismatch { expected: s.order(), got: h.order() });
    }
    let o = s.order();
    let ys = s.triple_at(x);
    let grad = h.gradient_data(x)?;
    let mut dl = grad.d[alpha].clone();
    for b in 0..3 {
        for c in 0..3 {
            let e = epsilon3(alpha, b, c);
            if e != 0.0 {
                dl += &grad.d[b] * &ys[c] * e;
            }
        }
    }
    if !(s.is_constant() && s.metric().is_constant()) {
        let gamma = christoffel(s.metric(), x)?;
        for i in 0..o {
            let a_i = gamma.connection_matrix(i);
            for b in 0..3 {
                for c in 0..3 {
                    let e = epsilon3(alpha, b, c);
                    if e == 0.0 {
                        continue;
                    }
                    let dy = &ys[c] * &a_i - &a_i * &ys[c];
                    let row = dy.transpose() * &grad.p[b];
                    for j in 0..o {
                        dl[(i, j)] += e * row[j];
                    }
                }
            }
        }
    }
    Ok(&dl - dl.transpose())
}

/// `L_X ω` for `ω = c_α ω_α`.
pub fn lie_derivative_sphere(h: &HamiltonianTriple, s: &HkStructure, c: &SphereCoefficient, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(s.order(), s.order());
    for a in 0..3 {
        out += lie_derivative_omega(h, s, a, x)? * c.get(a);
    }
    Ok(out)
}

/// `L_X ω = ½(p_α ω_α + q_α ω̂_α)` in four dimensions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LieDecomposition {
    pub p: [f64; 3],
    pub q: [f64; 3],
    /// Sup-norm gap between the reconstruction and the direct `L_X ω`.
    pub residual: f64,
}

/// Closed-form `p, q` for `n = 1`, flat metric, positive standard triple.
pub fn lie_decompose_4d(h: &HamiltonianTriple, c: &SphereCoefficient, x: &DVector<f64>) -> Result<LieDecomposition> {
    if h.order() != 4 {
        return Err(HkError::UnsupportedDimension(h.order() / 4));
    }
    let d = h.hessian(x);
    // d(a, i, j) = ∂_i ∂_j H^a with 1-based coordinates.
    let dd = |a: usize, i: usize, j: usize| d[a][(i - 1, j - 1)];
    let lap = |a: usize| (0..4).map(|i| d[a][(i, i)]).sum::<f64>();
    let (c1, c2, c3) = (c.get(0), c.get(1), c.get(2));
    let p = [
        c2 * lap(2) - c3 * lap(1),
        c3 * lap(0) - c1 * lap(2),
        c1 * lap(1) - c2 * lap(0),
    ];
    let s1 = |a| dd(a, 1, 1) - dd(a, 2, 2) + dd(a, 3, 3) - dd(a, 4, 4);
    let s2 = |a| dd(a, 1, 1) - dd(a, 2, 2) - dd(a, 3, 3) + dd(a, 4, 4);
    let s3 = |a| dd(a, 1, 1) + dd(a, 2, 2) - dd(a, 3, 3) - dd(a, 4, 4);
    let q1 = c1 * (s1(1) - 2.0 * (dd(2, 1, 2) + dd(2, 3, 4))) - c2 * s1(0) - 2.0 * c2 * dd(2, 1, 4)
        + 2.0 * c2 * dd(2, 2, 3)
        + 2.0 * c3 * ((dd(0, 1, 2) + dd(0, 3, 4)) + (dd(1, 1, 4) - dd(1, 2, 3)));
    let q2 = c1 * (s2(2) + 2.0 * (dd(1, 1, 2) - dd(1, 3, 4))) - c3 * (s2(0) - 2.0 * (dd(1, 1, 3) + dd(1, 2, 4)))
        - 2.0 * c2 * ((dd(0, 1, 2) - dd(0, 3, 4)) + (dd(2, 1, 3) + dd(2, 2, 4)));
    let q3 = c2 * (-s3(2) + 2.0 * (dd(0, 1, 4) + dd(0, 2, 3))) + c3 * (s3(1) + 2.0 * (dd(0, 1, 3) - dd(0, 2, 4)))
        - 2.0 * c1 * (dd(1, 1, 4) + dd(1, 2, 3))
        - 2.0 * c1 * dd(2, 1, 3)
        + 2.0 * c1 * dd(2, 2, 4);
    let q = [q1, q2, q3];

    let s = HkStructure::standard_positive(1)?;
    let direct = lie_derivative_sphere(h, &s, c, x)?;
    let k = standard_triple(&OrientationSignature::all_positive(s.dim()));
    let kh = standard_triple(&OrientationSignature::all_positive(s.dim()).flipped());
    let mut rebuilt = DMatrix::zeros(4, 4);
    for a in 0..3 {
        rebuilt += (&k[a] * p[a] + &kh[a] * q[a]) * 0.5;
    }
    Ok(LieDecomposition {
        p,
        q,
        residual: sup_norm(&(rebuilt - direct)),
    })
}

/// `d/dt P₂(ι_a* φ_t*ω)` at `t = 0`, i.e. `2 P₁(ι_a* L_Xω, ι_a* ω)`.
pub fn volume_rate(h: &HamiltonianTriple, s: &HkStructure, c: &SphereCoefficient, x: &DVector<f64>, block: BlockIndex) -> Result<f64> {
    let l = lie_derivative_sphere(h, s, c, x)?;
    let k = s.kahler_form(x)?.combine(c);
    Ok(2.0 * p1_pairing(&block_restrict(&l, block), &block_restrict(&k, block)))
}

/// Sampled trajectory and variational matrices `Λ(t) = ∂x(t)/∂x(0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowResult {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub jacobians: Vec<DMatrix<f64>>,
    pub method: &'static str,
    pub step: f64,
    pub steps: usize,
}

impl FlowResult {
    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("flow has at least one sample")
    }

    pub fn final_jacobian(&self) -> &DMatrix<f64> {
        self.jacobians.last().expect("flow has at least one sample")
    }
}

/// Classical fourth-order Runge–Kutta for `ẋ = f(x)` jointly with `Λ̇ = Df Λ`.
pub fn integrate<F: VectorField + ?Sized>(field: &F, x0: &DVector<f64>, t_end: f64, steps: usize) -> Result<FlowResult> {
    if steps == 0 {
        return Err(HkError::Invalid("steps must be at least 1".into()));
    }
    let o = field.order();
    if x0.len() != o {
        return Err(HkError::DimensionMismatch { expected: o, got: x0.len() });
    }
    let dt = t_end / steps as f64;
    let mut x = x0.clone();
    let mut lam = DMatrix::identity(o, o);
    let mut out = FlowResult {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        jacobians: Vec::with_capacity(steps + 1),
        method: "rk4",
        step: dt,
        steps,
    };
    out.times.push(0.0);
    out.states.push(x.clone());
    out.jacobians.push(lam.clone());
    let rhs = |x: &DVector<f64>, l: &DMatrix<f64>| (field.eval(x), field.jacobian(x) * l);
    for k in 1..=steps {
        let (k1x, k1l) = rhs(&x, &lam);
        let (k2x, k2l) = rhs(&(&x + &k1x * (dt / 2.0)), &(&lam + &k1l * (dt / 2.0)));
        let (k3x, k3l) = rhs(&(&x + &k2x * (dt / 2.0)), &(&lam + &k2l * (dt / 2.0)));
        let (k4x, k4l) = rhs(&(&x + &k3x * dt), &(&lam + &k3l * dt));
        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dt / 6.0);
        lam += (k1l + k2l * 2.0 + k3l * 2.0 + k4l) * (dt / 6.0);
        if x.iter().chain(lam.iter()).any(|v| !v.is_finite()) {
            return Err(HkError::Divergence {
                last_valid_time: (k - 1) as f64 * dt,
            });
        }
        out.times.push(k as f64 * dt);
        out.states.push(x.clone());
        out.jacobians.push(lam.clone());
    }
    Ok(out)
}

pub fn integrate_flow(h: &HamiltonianTriple, s: &HkStructure, x0: &DVector<f64>, t_end: f64, steps: usize) -> Result<FlowResult> {
    integrate(&HyperhamField::new(h, s)?, x0, t_end, steps)
}

/// Canonical tolerance for flows.
pub const FLOW_CANONICAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateSample {
    pub t: f64,
    /// `|Σ_a P₂(ι_a* Λᵀ K_α Λ) − Σ_a P₂(ι_a* K_α)|` per label.
    pub sum_residual: [f64; 3],
    /// Largest per-block volume or cross-pairing deviation.
    pub block_residual: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalCertificate {
    pub samples: Vec<CertificateSample>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares `Λ(t)ᵀ K_α(x(t)) Λ(t)` with `K_α(x₀)` block by block.
pub fn certify_canonical_flow(result: &FlowResult, s: &HkStructure) -> Result<CanonicalCertificate> {
    certify_with_tol(result, s, FLOW_CANONICAL_TOL)
}

pub fn certify_with_tol(result: &FlowResult, s: &HkStructure, tol: f64) -> Result<CanonicalCertificate> {
    let x0 = &result.states[0];
    let before = s.kahler_form(x0)?.k;
    let frame = if s.block_signature().is_some() {
        DMatrix::identity(s.order(), s.order())
    } else {
        standardize_at_point(&s.metric().eval(x0), &s.triple_at(x0))?.lambda
    };
    let mut samples = Vec::with_capacity(result.times.len());
    let mut worst = 0.0_f64;
    for ((t, x), lam) in result.times.iter().zip(&result.states).zip(&result.jacobians) {
        let k_t = s.kahler_form(x)?.k;
        let after: Triple = std::array::from_fn(|a| lam.transpose() * &k_t[a] * lam);
        let flag: CanonicalFlag = canonical_compare(&before, &after, &frame, tol)?;
        let sum_residual = std::array::from_fn(|a| flag.label_sum_residual[a]);
        let block_residual = flag.blocks.iter().map(|b| b.residual).fold(0.0, f64::max);
        worst = worst.max(flag.residual);
        samples.push(CertificateSample {
            t: *t,
            sum_residual,
            block_residual,
            residual: flag.residual,
        });
    }
    Ok(CanonicalCertificate {
        samples,
        max_residual: worst,
        tol,
        pass: worst <= tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationSample {
    pub t: f64,
    pub orthogonality_residual: f64,
    /// `None` when `Λ(t)` is not orthogonal (the flow is not hyperkähler).
    pub rotation: Option<RotationReport>,
    pub hyperkahler: bool,
}

/// `R(t)` from `Λ(t)⁻¹ Y_α Λ(t) = R_{αβ}(t) Y_β` along a flow.
pub fn sphere_rotation_of_flow(result: &FlowResult, s: &HkStructure, tol: f64) -> Result<Vec<RotationSample>> {
    let mut out = Vec::with_capacity(result.times.len());
    let x0 = &result.states[0];
    let g0 = s.metric().eval(x0);
    let y0 = s.triple_at(x0);
    for ((t, x), lam) in result.times.iter().zip(&result.states).zip(&result.jacobians) {
        let g = s.metric().eval(x);
        let orth = sup_norm(&(lam.transpose() * &g * lam - &g0)) / sup_norm(&g0).max(1.0);
        if orth > tol {
            out.push(RotationSample {
                t: *t,
                orthogonality_residual: orth,
                rotation: None,
                hyperkahler: false,
            });
            continue;
        }
        let inv = crate::linalg::inverse(lam)?;
        let yt = s.triple_at(x);
        let tilde: Triple = std::array::from_fn(|a| &inv * &yt[a] * lam);
        let rep = recover_rotation_triples(&y0, &tilde, tol)?;
        let ok = rep.status == RotationStatus::Accepted;
        out.push(RotationSample {
            t: *t,
            orthogonality_residual: orth,
            rotation: Some(rep),
            hyperkahler: ok,
        });
    }
    Ok(out)
}

/// `R(t)` as a plain matrix when accepted.
pub fn rotation_matrix(sample: &RotationSample) -> Option<Matrix3<f64>> {
    sample.rotation.as_ref().and_then(|r| r.rotation())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{axis_rotation, expm, sup_norm3};
    use crate::structures::{standard_triple, OrientationSignature};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn std_pos() -> HkStructure {
        HkStructure::standard_positive(1).unwrap()
    }

    #[test]
    fn field_examples() {
        let s = std_pos();
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(hyperham_field(&HamiltonianTriple::zero(4), &s, &e1).unwrap(), DVector::zeros(4));
        let f = hyperham_field(&HamiltonianTriple::quaternionic_oscillator(4), &s, &e1).unwrap();
        assert_eq!(f, DVector::from_vec(vec![0.0, -1.0, -1.0, -1.0]));
        let ys = s.triple_at(&e1);
        let x = DVector::from_vec(vec![0.3, -0.1, 0.7, 0.2]);
        let f = hyperham_field(&HamiltonianTriple::single_radial(4), &s, &x).unwrap();
        assert_eq!(f, &ys[0] * &x);
    }

    #[test]
    fn lambda_identity_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for signs in [vec![1], vec![-1, 1]] {
            let s = HkStructure::standard(&OrientationSignature::from_signs(&signs).unwrap());
            let h = HamiltonianTriple::random_polynomial(s.order(), 3, 6, &mut rng);
            let x = DVector::from_fn(s.order(), |_, _| rng.random_range(-1.0..1.0));
            for a in 0..3 {
                let l1 = lambda_contraction(&h, &s, &x, a).unwrap();
                let l2 = lambda_expansion(&h, &s, &x, a);
                assert!((l1 - l2).amax() < 1e-10);
            }
        }
    }

    #[test]
    fn oscillator_lie_derivative() {
        let s = std_pos();
        let h = HamiltonianTriple::quaternionic_oscillator(4);
        let x = DVector::from_vec(vec![0.1, 0.2, 0.3, 0.4]);
        let ys = s.triple_at(&x);
        let l = lie_derivative_omega(&h, &s, 0, &x).unwrap();
        assert!(sup_norm(&(l - (&ys[2] - &ys[1]) * 2.0)) < 1e-14);
        let single = lie_derivative_omega(&HamiltonianTriple::single_radial(4), &s, 0, &x).unwrap();
        assert_eq!(sup_norm(&single), 0.0);
        assert_eq!(sup_norm(&lie_derivative_omega(&HamiltonianTriple::zero(4), &s, 1, &x).unwrap()), 0.0);
    }

    #[test]
    fn oscillator_decomposition() {
        let h = HamiltonianTriple::quaternionic_oscillator(4);
        let c = SphereCoefficient::normalized([0.3, -0.5, 0.8]).unwrap();
        let d = lie_decompose_4d(&h, &c, &DVector::from_element(4, 0.2)).unwrap();
        let (c1, c2, c3) = (c.get(0), c.get(1), c.get(2));
        let expected = [4.0 * (c2 - c3), 4.0 * (c3 - c1), 4.0 * (c1 - c2)];
        for a in 0..3 {
            assert!((d.p[a] - expected[a]).abs() < 1e-12);
            assert!(d.q[a].abs() < 1e-12);
        }
        assert!(d.residual < 1e-12);
    }

    #[test]
    fn decomposition_closed_forms_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..50 {
            let h = HamiltonianTriple::random_polynomial(4, 3, 8, &mut rng);
            let c = SphereCoefficient::random(&mut rng);
            let x = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
            let d = lie_decompose_4d(&h, &c, &x).unwrap();
            assert!(d.residual < 1e-12, "{}", d.residual);
        }
        let h8 = HamiltonianTriple::zero(8);
        assert_eq!(
            lie_decompose_4d(&h8, &SphereCoefficient::axis(0), &DVector::zeros(8)),
            Err(HkError::UnsupportedDimension(2))
        );
    }

    #[test]
    fn flow_examples() {
        let s = std_pos();
        let x0 = DVector::from_vec(vec![0.5, -0.2, 0.1, 0.3]);
        let r = integrate_flow(&HamiltonianTriple::zero(4), &s, &x0, 1.0, 10).unwrap();
        assert_eq!(r.final_state(), &x0);
        assert_eq!(r.final_jacobian(), &DMatrix::identity(4, 4));

        let ys = standard_triple(&OrientationSignature::all_positive(s.dim()));
        let r = integrate_flow(&HamiltonianTriple::single_radial(4), &s, &x0, 1.0, 1000).unwrap();
        assert!(sup_norm(&(r.final_jacobian() - expm(&ys[0]))) < 1e-8);
        let norm0 = x0.norm();
        assert!(r.states.iter().all(|x| (x.norm() - norm0).abs() < 1e-9));

        let sum = &ys[0] + &ys[1] + &ys[2];
        let t = 2.0 * std::f64::consts::PI;
        let r = integrate_flow(&HamiltonianTriple::quaternionic_oscillator(4), &s, &x0, t, 1000).unwrap();
        assert!(sup_norm(&(r.final_jacobian() - expm(&(&sum * t)))) < 1e-8);
        assert!(r.states.iter().all(|x| (x.norm() - norm0).abs() < 1e-9));
    }

    #[test]
    fn divergence_is_reported() {
        let s = std_pos();
        // H¹ = x₁⁴ x₂ blows up in finite time from a large initial point.
        let h = HamiltonianTriple::polynomial(
            4,
            [
                vec![Monomial { coeff: 1.0, powers: vec![3, 3, 0, 0] }],
                vec![],
                vec![],
            ],
        )
        .unwrap();
        let x0 = DVector::from_vec(vec![5.0, 5.0, 0.0, 0.0]);
        match integrate_flow(&h, &s, &x0, 10.0, 100) {
            Err(HkError::Divergence { last_valid_time }) => assert!(last_valid_time < 10.0),
            other => panic!("expected divergence, got {:?}", other.map(|r| r.times.len())),
        }
    }

    #[test]
    fn certificate_examples() {
        let s = std_pos();
        let x0 = DVector::from_element(4, 0.3);
        let r = integrate_flow(&HamiltonianTriple::zero(4), &s, &x0, 1.0, 10).unwrap();
        let c = certify_canonical_flow(&r, &s).unwrap();
        assert!(c.pass);
        assert_eq!(c.max_residual, 0.0);

        let r = integrate(&LinearField::expansion(4), &x0, 1.0, 1000).unwrap();
        let c = certify_canonical_flow(&r, &s).unwrap();
        assert!(!c.pass);
        let last = c.samples.last().unwrap();
        let expected = 4f64.exp() - 1.0;
        assert!(((last.sum_residual[0] - expected) / expected).abs() < 1e-3);
    }

    #[test]
    fn radial_flow_rotation() {
        let s = std_pos();
        let x0 = DVector::from_element(4, 0.5);
        let r = integrate_flow(&HamiltonianTriple::single_radial(4), &s, &x0, 1.0, 200).unwrap();
        let rot = sphere_rotation_of_flow(&r, &s, 1e-8).unwrap();
        for sample in &rot {
            let m = rotation_matrix(sample).expect("hyperkähler flow");
            assert!(sup_norm3(&(m - axis_rotation(0, 2.0 * sample.t))) < 1e-8);
        }
        let r0 = integrate_flow(&HamiltonianTriple::zero(4), &s, &x0, 1.0, 5).unwrap();
        for sample in sphere_rotation_of_flow(&r0, &s, 1e-12).unwrap() {
            assert_eq!(rotation_matrix(&sample).unwrap(), Matrix3::identity());
        }
    }

    #[test]
    fn anisotropic_flow_canonical_not_hyperkahler() {
        let s = std_pos();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let h = HamiltonianTriple::random_quadratic(4, &mut rng);
        let x0 = DVector::from_element(4, 0.3);
        let r = integrate_flow(&h, &s, &x0, 1.0, 1000).unwrap();
        assert!(certify_canonical_flow(&r, &s).unwrap().pass);
        let rot = sphere_rotation_of_flow(&r, &s, 1e-8).unwrap();
        assert!(!rot.last().unwrap().hyperkahler);
    }

    #[test]
    fn function_hamiltonian_matches_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let poly = HamiltonianTriple::random_polynomial(4, 3, 5, &mut rng);
        let p2 = poly.clone();
        let f = HamiltonianTriple::function(4, move |x| p2.value(x));
        let x = DVector::from_vec(vec![0.2, 0.4, -0.3, 0.1]);
        for a in 0..3 {
            assert!((poly.gradient(&x)[a].clone() - f.gradient(&x)[a].clone()).amax() < 1e-8);
            assert!((poly.hessian(&x)[a].clone() - f.hessian(&x)[a].clone()).amax() < 1e-5);
        }
    }
}
