//! Levi-Civita connection data, covariant constancy of the triple, and the
//! `Θ_{αβγ}` four-form whose vanishing carries the general-metric case of
//! the canonical-flow theorem.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{HkError, Result};
use crate::invariants::BlockIndex;
use crate::linalg::{permutations4, sup_norm, symmetry_defect};
use crate::structures::{DerivativeSource, HkStructure, MetricField, Triple};

/// Christoffel symbols `Γ^j_{ik}` at a point, stored in `(j, i, k)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelData {
    order: usize,
    gamma: Vec<f64>,
    pub source: DerivativeSource,
}

impl ChristoffelData {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            gamma: vec![0.0; order * order * order],
            source: DerivativeSource::Analytic,
        }
    }

    /// Builds from a closure `(j, i, k) ↦ Γ^j_{ik}`; rejects asymmetric input.
    pub fn from_fn(order: usize, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let c = Self::from_fn_unchecked(order, f);
        let asym = c.max_asymmetry();
        if asym > 0.0 {
            return Err(HkError::AsymmetricConnection(asym));
        }
        Ok(c)
    }

    /// No symmetry check; used for the torsionful control experiments.
    pub fn from_fn_unchecked(order: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut gamma = Vec::with_capacity(order * order * order);
        for j in 0..order {
            for i in 0..order {
                for k in 0..order {
                    gamma.push(f(j, i, k));
                }
            }
        }
        Self {
            order,
            gamma,
            source: DerivativeSource::Analytic,
        }
    }

    /// Random symbols with entries uniform in `[-1, 1]`, symmetric in `(i, k)`.
    pub fn random_symmetric<R: Rng + ?Sized>(order: usize, rng: &mut R) -> Self {
        let mut c = Self::zeros(order);
        for j in 0..order {
            for i in 0..order {
                for k in i..order {
                    let v = rng.random_range(-1.0..1.0);
                    c.set(j, i, k, v);
                    c.set(j, k, i, v);
                }
            }
        }
        c
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    fn idx(&self, j: usize, i: usize, k: usize) -> usize {
        (j * self.order + i) * self.order + k
    }

    /// `Γ^j_{ik}`.
    pub fn get(&self, j: usize, i: usize, k: usize) -> f64 {
        self.gamma[self.idx(j, i, k)]
    }

    pub fn set(&mut self, j: usize, i: usize, k: usize, v: f64) {
        let p = self.idx(j, i, k);
        self.gamma[p] = v;
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for j in 0..self.order {
            for i in 0..self.order {
                for k in i + 1..self.order {
                    worst = worst.max((self.get(j, i, k) - self.get(j, k, i)).abs());
                }
            }
        }
        worst
    }

    /// Connection matrix `(A_i)^j_k = Γ^j_{ik}`, row `j`, column `k`.
    pub fn connection_matrix(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.order, self.order, |j, k| self.get(j, i, k))
    }
}

/// First and second derivatives of a Hamiltonian triple at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientData {
    /// `P^β_k = ∂_k H^β`.
    pub p: [DVector<f64>; 3],
    /// `D^α_{ij} = ∂_i ∂_j H^α`.
    pub d: [DMatrix<f64>; 3],
}

impl GradientData {
    /// Validates that each Hessian is symmetric to round-off.
    pub fn new(p: [DVector<f64>; 3], d: [DMatrix<f64>; 3]) -> Result<Self> {
        for h in &d {
            let asym = symmetry_defect(h);
            if asym > 1e-9 * sup_norm(h).max(1.0) {
                return Err(HkError::AsymmetricHessian(asym));
            }
        }
        Ok(Self { p, d })
    }

    pub fn random<R: Rng + ?Sized>(order: usize, rng: &mut R) -> Self {
        let p = std::array::from_fn(|_| DVector::from_fn(order, |_, _| rng.random_range(-1.0..1.0)));
        let d = std::array::from_fn(|_| {
            let a = DMatrix::from_fn(order, order, |_, _| rng.random_range(-1.0..1.0));
            (&a + a.transpose()) * 0.5
        });
        Self { p, d }
    }

    pub fn order(&self) -> usize {
        self.p[0].len()
    }
}

/// Levi-Civita symbols `Γ^j_{ik} = ½ g^{jl}(∂_i g_{lk} + ∂_k g_{li} − ∂_l g_{ik})`.
pub fn christoffel(metric: &MetricField, x: &DVector<f64>) -> Result<ChristoffelData> {
    let o = metric.order();
    if x.len() != o {
        return Err(HkError::DimensionMismatch { expected: o, got: x.len() });
    }
    let g_inv = metric.inverse(x)?;
    let mut source = DerivativeSource::Analytic;
    let dg: Vec<DMatrix<f64>> = (0..o)
        .map(|l| {
            let (d, s) = metric.derivative(x, l);
            if s == DerivativeSource::FiniteDifference {
                source = s;
            }
            d
        })
        .collect();
    let mut c = ChristoffelData::zeros(o);
    c.source = source;
    // Lowered symbols Γ_{l,ik}, then raise with g^{jl}.
    let mut lowered = vec![0.0; o];
    for i in 0..o {
        for k in i..o {
            for (l, low) in lowered.iter_mut().enumerate() {
                *low = 0.5 * (dg[i][(l, k)] + dg[k][(l, i)] - dg[l][(i, k)]);
            }
            for j in 0..o {
                let v: f64 = (0..o).map(|l| g_inv[(j, l)] * lowered[l]).sum();
                c.set(j, i, k, v);
                c.set(j, k, i, v);
            }
        }
    }
    Ok(c)
}

/// `max_{i,γ} ‖∂_i Y_γ + [A_i, Y_γ]‖_∞`.
pub fn covariant_constancy_residual(s: &HkStructure, x: &DVector<f64>) -> Result<f64> {
    let gamma = christoffel(s.metric(), x)?;
    let ys = s.triple_at(x);
    let mut worst = 0.0_f64;
    for i in 0..s.order() {
        let (dy, _) = s.triple_derivative(x, i);
        let a = gamma.connection_matrix(i);
        for c in 0..3 {
            let r = &dy[c] + &a * &ys[c] - &ys[c] * &a;
            worst = worst.max(sup_norm(&r));
        }
    }
    Ok(worst)
}

fn check_labels(labels: [usize; 3]) -> Result<()> {
    for &l in &labels {
        if l > 2 {
            return Err(HkError::LabelOutOfRange(l + 1));
        }
    }
    if labels[0] == labels[1] || labels[1] == labels[2] || labels[0] == labels[2] {
        return Err(HkError::RepeatedLabels);
    }
    Ok(())
}

/// Coefficient of `Ω_a` in
/// `ι_a*[K^α_{ℓm} P^β_q ([A_i, Y_γ])^q_j dx^i∧dx^j∧dx^ℓ∧dx^m]`,
/// evaluated as the full ε-contraction over the block (labels 0-based).
///
/// The structure is expected to be in standard form at `x`.
pub fn theta_form(
    gamma: &ChristoffelData,
    grad: &GradientData,
    s: &HkStructure,
    x: &DVector<f64>,
    labels: [usize; 3],
    block: BlockIndex,
) -> Result<f64> {
    check_labels(labels)?;
    let [alpha, beta, gam] = labels;
    let o = s.order();
    if gamma.order() != o || grad.order() != o {
        return Err(HkError::DimensionMismatch {
            expected: o,
            got: gamma.order().min(grad.order()),
        });
    }
    if block.get() > s.dim().n() {
        return Err(HkError::BlockOutOfRange { index: block.get(), n: s.dim().n() });
    }
    let forms = s.kahler_form(x)?;
    let ys = s.triple_at(x);
    let k = &forms.k[alpha];
    let y = &ys[gam];
    let p = &grad.p[beta];
    let off = block.offset();
    // w_i[j] = Σ_q P_q [A_i, Y]^q_j for i, j in the block.
    let mut w = [[0.0; 4]; 4];
    for (ii, row) in w.iter_mut().enumerate() {
        let a = gamma.connection_matrix(off + ii);
        let comm = &a * y - y * &a;
        for (jj, entry) in row.iter_mut().enumerate() {
            *entry = (0..o).map(|q| p[q] * comm[(q, off + jj)]).sum();
        }
    }
    Ok(block_contract(k, &w, off))
}

/// `Σ ε_{ijℓm} W_{ij} K_{ℓm}` with indices in the block starting at `off`.
fn block_contract(k: &DMatrix<f64>, w: &[[f64; 4]; 4], off: usize) -> f64 {
    let mut total = 0.0;
    for (perm, sign) in permutations4() {
        total += sign * w[perm[0]][perm[1]] * k[(off + perm[2], off + perm[3])];
    }
    total
}

/// Coefficient of `Ω_a` in `ι_a*[K^α_{ℓm} D^β_{iq} (Y_γ)^q_j dx^i∧dx^j∧dx^ℓ∧dx^m]`.
pub fn hessian_volume_term(
    d: &DMatrix<f64>,
    ys: &Triple,
    k: &Triple,
    labels: [usize; 3],
    block: BlockIndex,
) -> Result<f64> {
    check_labels(labels)?;
    let [alpha, _, gam] = labels;
    let dy = d * &ys[gam];
    let off = block.offset();
    let w: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| dy[(off + i, off + j)]));
    Ok(block_contract(&k[alpha], &w, off))
}
