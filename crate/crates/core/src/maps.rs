//! Classification of maps (strongly hyperkähler, hyperkähler, canonical),
//! rotation recovery, pointwise standardization, and dual / Dirac structures.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{HkError, Result};
use crate::invariants::{block_restrict, p1_pairing, p2_block, BlockIndex};
use crate::linalg::{
    block_diag, inverse, inverse_sqrt_spd, matrix3_rows, require_order, sup_norm, sup_norm3,
};
use crate::structures::{
    quaternionic_residuals, standard_block, trace_pairing, HkStructure, MetricField, Orientation,
    OrientationSignature, SphereCoefficient, Triple,
};

/// Orthogonality and strong-invariance tolerance.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
/// Residual of `Ỹ_α − R_{αβ} Y_β` for hyperkähler maps.
pub const SPAN_TOL: f64 = 1e-9;
/// Canonical block-volume tolerance.
pub const CANONICAL_TOL: f64 = 1e-8;
/// Extra sphere points checked by the canonical test.
pub const CANONICAL_SPHERE_SAMPLES: usize = 10;
const CANONICAL_SEED: u64 = 0x5eed_cafe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RotationStatus {
    Accepted,
    NotInSpan,
    NotOrthogonal,
    OrientationViolation,
}

/// Outcome of expanding a candidate triple in the basis of a reference one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationReport {
    #[serde(serialize_with = "ser_matrix3")]
    pub r: Matrix3<f64>,
    pub span_residual: f64,
    pub orthogonality_residual: f64,
    pub det: f64,
    pub status: RotationStatus,
}

impl RotationReport {
    pub fn accepted(&self) -> bool {
        self.status == RotationStatus::Accepted
    }

    pub fn rotation(&self) -> Option<Matrix3<f64>> {
        self.accepted().then_some(self.r)
    }
}

fn ser_matrix3<S: serde::Serializer>(m: &Matrix3<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&matrix3_rows(m), s)
}

/// Expands `tilde` as `Ỹ_α = R_{αβ} Y_β` with `R_{αβ} = −tr(Ỹ_α Y_β)/(4n)`.
pub fn recover_rotation_triples(base: &Triple, tilde: &Triple, tol: f64) -> Result<RotationReport> {
    let o = base[0].nrows();
    for m in base.iter().chain(tilde.iter()) {
        require_order(m, o)?;
    }
    let r = trace_pairing(tilde, base);
    let mut span_residual = 0.0_f64;
    for a in 0..3 {
        let rebuilt = &base[0] * r[(a, 0)] + &base[1] * r[(a, 1)] + &base[2] * r[(a, 2)];
        span_residual = span_residual.max(sup_norm(&(&tilde[a] - rebuilt)));
    }
    let orthogonality_residual = sup_norm3(&(r.transpose() * r - Matrix3::identity()));
    let det = r.determinant();
    let status = if span_residual > tol {
        RotationStatus::NotInSpan
    } else if orthogonality_residual > tol {
        RotationStatus::NotOrthogonal
    } else if (det - 1.0).abs() > tol {
        RotationStatus::OrientationViolation
    } else {
        RotationStatus::Accepted
    };
    Ok(RotationReport {
        r,
        span_residual,
        orthogonality_residual,
        det,
        status,
    })
}

/// Rotation recovery against the structure's own triple at `x`.
pub fn recover_rotation(s: &HkStructure, tilde: &Triple, x: &DVector<f64>, tol: f64) -> Result<RotationReport> {
    recover_rotation_triples(&s.triple_at(x), tilde, tol)
}

/// `Λ⁻¹ Y_α Λ` for each label.
pub fn conjugate_triple(ys: &Triple, lambda: &DMatrix<f64>) -> Result<Triple> {
    let inv = inverse(lambda)?;
    Ok(std::array::from_fn(|a| &inv * &ys[a] * lambda))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flag {
    pub pass: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperkahlerFlag {
    pub pass: bool,
    pub residual: f64,
    pub rotation: RotationReport,
}

/// Pulled-back block data for one 4-dimensional invariant block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockReport {
    pub block: usize,
    /// `P₂` of the block of `ΛᵀK_αΛ`, per label.
    pub volumes: [f64; 3],
    /// `P₂` of the block of `K_α` (the identity-map value).
    pub reference: [f64; 3],
    /// `P₁` between distinct labels of the pulled-back block, order (12, 13, 23).
    pub cross: [f64; 3],
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalFlag {
    pub pass: bool,
    pub residual: f64,
    /// Largest `|Σ_a P₂(ΛᵀKΛ)_a − Σ_a P₂(K)_a|` over ω₁, ω₂, ω₃ and sampled sphere points.
    pub sum_residual: f64,
    /// The same quantity for ω₁, ω₂, ω₃ separately.
    pub label_sum_residual: [f64; 3],
    pub blocks: Vec<BlockReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub orthogonal: Flag,
    pub strongly_hyperkahler: Flag,
    pub hyperkahler: HyperkahlerFlag,
    pub canonical: CanonicalFlag,
}

/// Classifies a linear map (a Jacobian at `x`) for the structure `s`.
///
/// Block quantities are computed in a frame where the structure is standard:
/// the coordinate frame for block-adapted structures, otherwise the frame
/// returned by [`standardize_at_point`].
pub fn classify_linear_map(lambda: &DMatrix<f64>, s: &HkStructure, x: &DVector<f64>) -> Result<ClassificationReport> {
    let g = s.metric().eval(x);
    let ys = s.triple_at(x);
    let frame = if s.block_signature().is_some() {
        DMatrix::identity(s.order(), s.order())
    } else {
        standardize_at_point(&g, &ys)?.lambda
    };
    classify_in_frame(lambda, &g, &ys, &frame)
}

/// Classification with an explicit standardizing frame `S`
/// (`SᵀgS = I`, `S⁻¹Y_αS` block diagonal).
pub fn classify_in_frame(
    lambda: &DMatrix<f64>,
    g: &DMatrix<f64>,
    ys: &Triple,
    frame: &DMatrix<f64>,
) -> Result<ClassificationReport> {
    let o = g.nrows();
    require_order(lambda, o)?;
    require_order(frame, o)?;
    let lambda_inv = inverse(lambda)?;
    let tilde: Triple = std::array::from_fn(|a| &lambda_inv * &ys[a] * lambda);

    let gscale = sup_norm(g).max(1.0);
    let orth_res = sup_norm(&(lambda.transpose() * g * lambda - g)) / gscale;
    let orthogonal = orth_res <= ORTHOGONALITY_TOL;

    let strong_res = (0..3).map(|a| sup_norm(&(&tilde[a] - &ys[a]))).fold(0.0, f64::max);
    let rotation = recover_rotation_triples(ys, &tilde, SPAN_TOL)?;
    let hk_res = rotation
        .span_residual
        .max(rotation.orthogonality_residual)
        .max((rotation.det - 1.0).abs());

    let forms: Triple = std::array::from_fn(|a| g * &ys[a]);
    let canonical = canonical_check(&forms, lambda, frame)?;

    Ok(ClassificationReport {
        orthogonal: Flag { pass: orthogonal, residual: orth_res },
        strongly_hyperkahler: Flag {
            pass: orthogonal && strong_res <= ORTHOGONALITY_TOL,
            residual: strong_res.max(orth_res),
        },
        hyperkahler: HyperkahlerFlag {
            pass: orthogonal && rotation.accepted(),
            residual: hk_res.max(orth_res),
            rotation,
        },
        canonical,
    })
}

/// Block-volume test of a map for the forms `K_α`, in the frame `S`.
pub fn canonical_check(forms: &Triple, lambda: &DMatrix<f64>, frame: &DMatrix<f64>) -> Result<CanonicalFlag> {
    let after: Triple = std::array::from_fn(|a| lambda.transpose() * &forms[a] * lambda);
    canonical_compare(forms, &after, frame, CANONICAL_TOL)
}

/// Compares pulled-back forms `after` with `before`, both in original
/// coordinates, block by block in the standardizing frame `S`.
///
/// Passes when the summed block volumes agree for ω₁, ω₂, ω₃ and sampled
/// sphere points, and when every block's volumes and cross pairings are
/// individually preserved.
pub fn canonical_compare(before: &Triple, after: &Triple, frame: &DMatrix<f64>, tol: f64) -> Result<CanonicalFlag> {
    let o = before[0].nrows();
    require_order(frame, o)?;
    let n = o / 4;
    let framed: Triple = std::array::from_fn(|a| frame.transpose() * &before[a] * frame);
    let moved: Triple = std::array::from_fn(|a| frame.transpose() * &after[a] * frame);

    let mut blocks = Vec::with_capacity(n);
    let mut block_res = 0.0_f64;
    for b in 0..n {
        let idx = BlockIndex::from_zero(b);
        let before: [Matrix4<f64>; 3] = std::array::from_fn(|a| block_restrict(&framed[a], idx));
        let after: [Matrix4<f64>; 3] = std::array::from_fn(|a| block_restrict(&moved[a], idx));
        let volumes = std::array::from_fn(|a| p2_block(&after[a]));
        let reference = std::array::from_fn(|a| p2_block(&before[a]));
        let pairs = [(0, 1), (0, 2), (1, 2)];
        let cross = pairs.map(|(a, c)| p1_pairing(&after[a], &after[c]));
        let cross_ref = pairs.map(|(a, c)| p1_pairing(&before[a], &before[c]));
        let mut r = 0.0_f64;
        for a in 0..3 {
            r = r.max((volumes[a] - reference[a]).abs());
            r = r.max((cross[a] - cross_ref[a]).abs());
        }
        block_res = block_res.max(r);
        blocks.push(BlockReport {
            block: b + 1,
            volumes,
            reference,
            cross,
            residual: r,
        });
    }

    let summed = |k: &DMatrix<f64>| -> f64 {
        (0..n).map(|b| p2_block(&block_restrict(k, BlockIndex::from_zero(b)))).sum()
    };
    let mut label_sum_residual = [0.0; 3];
    for a in 0..3 {
        label_sum_residual[a] = (summed(&moved[a]) - summed(&framed[a])).abs();
    }
    let mut sum_res = label_sum_residual.iter().copied().fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(CANONICAL_SEED);
    for _ in 0..CANONICAL_SPHERE_SAMPLES {
        let c = SphereCoefficient::random(&mut rng);
        sum_res = sum_res.max((summed(&c.combine(&moved)) - summed(&c.combine(&framed))).abs());
    }
    let residual = sum_res.max(block_res);
    Ok(CanonicalFlag {
        pass: residual <= tol,
        residual,
        sum_residual: sum_res,
        label_sum_residual,
        blocks,
    })
}

/// Residuals of the block conditions on `Λ = (A_{ij})` for a block-adapted
/// structure: `(max_{i≠j} ‖Σ_m A_miᵀ K^α_mm A_mj‖, max_i ‖Σ_m A_miᵀ K^α_mm A_mi − R_{αβ} K^β_ii‖)`.
pub fn hk_map_residuals(lambda: &DMatrix<f64>, s: &HkStructure, r: &Matrix3<f64>) -> Result<(f64, f64)> {
    if s.block_signature().is_none() || !s.is_constant() {
        return Err(HkError::NotStandardForm);
    }
    let o = s.order();
    require_order(lambda, o)?;
    let n = s.dim().n();
    let k = s.kahler_form(&s.origin())?.k;
    let blk = |m: &DMatrix<f64>, i: usize, j: usize| m.view((4 * i, 4 * j), (4, 4)).into_owned();
    let mut off = 0.0_f64;
    let mut diag = 0.0_f64;
    for a in 0..3 {
        for i in 0..n {
            for j in 0..n {
                let mut sum = DMatrix::<f64>::zeros(4, 4);
                for m in 0..n {
                    sum += blk(lambda, m, i).transpose() * blk(&k[a], m, m) * blk(lambda, m, j);
                }
                if i == j {
                    for b in 0..3 {
                        sum -= blk(&k[b], i, i) * r[(a, b)];
                    }
                    diag = diag.max(sup_norm(&sum));
                } else {
                    off = off.max(sup_norm(&sum));
                }
            }
        }
    }
    Ok((off, diag))
}

/// Result of pointwise standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    /// `Λ` with `Λᵀ g₀ Λ = I` and `Λ⁻¹ J_α Λ` standard, `det Λ > 0`.
    pub lambda: DMatrix<f64>,
    pub signature: OrientationSignature,
}

/// Frame columns relative to `u` for each block orientation.
fn block_frame(ys: &Triple, u: &DVector<f64>, orientation: Orientation) -> [DVector<f64>; 4] {
    match orientation {
        Orientation::Positive => [u.clone(), -(&ys[0] * u), -(&ys[2] * u), -(&ys[1] * u)],
        Orientation::Negative => [u.clone(), &ys[2] * u, -(&ys[0] * u), &ys[1] * u],
    }
}

/// Brings `(g₀, J)` to standard form at a point.
///
/// Whitens `g₀` with its inverse square root, then builds orthonormal
/// quaternionic block frames from the coordinate vector with the largest
/// component in the remaining complement (ties go to the lowest index).
/// Every block but the last uses the positive pattern; the last uses whichever
/// pattern makes `det Λ > 0`, so the returned signature is `(+,…,+,±)`.
pub fn standardize_at_point(g0: &DMatrix<f64>, ys: &Triple) -> Result<Standardization> {
    let o = g0.nrows();
    if o == 0 || !o.is_multiple_of(4) {
        return Err(HkError::Invalid(format!("order {o} is not a positive multiple of 4")));
    }
    let report = quaternionic_residuals(g0, ys)?;
    let scale = sup_norm(g0).max(1.0);
    if report.algebra > 1e-8 || report.orthogonality > 1e-8 * scale {
        return Err(HkError::NotQuaternionic {
            algebra: report.algebra,
            orthogonality: report.orthogonality,
        });
    }
    let w = inverse_sqrt_spd(g0)?;
    let w_inv = inverse(&w)?;
    let white: Triple = std::array::from_fn(|a| &w_inv * &ys[a] * &w);

    let n = o / 4;
    let mut frame = DMatrix::<f64>::zeros(o, o);
    let mut blocks = Vec::with_capacity(n);
    for b in 0..n {
        let done = frame.columns(0, 4 * b).into_owned();
        let project = |v: DVector<f64>| &v - &done * (done.transpose() * &v);
        let mut best: Option<(f64, DVector<f64>)> = None;
        for k in 0..o {
            let p = project(DVector::from_fn(o, |i, _| if i == k { 1.0 } else { 0.0 }));
            let norm = p.norm();
            if best.as_ref().is_none_or(|(bn, _)| norm > *bn + 1e-12) {
                best = Some((norm, p));
            }
        }
        let (norm, p) = best.expect("order is positive");
        if norm < 1e-8 {
            return Err(HkError::Singular);
        }
        let u = p / norm;
        let orientation = if b + 1 < n {
            Orientation::Positive
        } else {
            let mut trial = frame.clone();
            for (c, col) in block_frame(&white, &u, Orientation::Positive).iter().enumerate() {
                trial.set_column(4 * b + c, col);
            }
            if (&w * trial).determinant() > 0.0 {
                Orientation::Positive
            } else {
                Orientation::Negative
            }
        };
        for (c, col) in block_frame(&white, &u, orientation).iter().enumerate() {
            // Re-orthogonalize against earlier blocks to suppress drift.
            let v = project(col.clone());
            let nv = v.norm();
            frame.set_column(4 * b + c, &(v / nv));
        }
        blocks.push(orientation);
    }
    let lambda = &w * frame;
    Ok(Standardization {
        lambda,
        signature: OrientationSignature::new(blocks)?,
    })
}

/// Largest deviation of `(Λᵀg₀Λ, Λ⁻¹J_αΛ)` from `(I, standard(signature))`.
pub fn standard_form_residual(g0: &DMatrix<f64>, ys: &Triple, st: &Standardization) -> Result<f64> {
    let o = g0.nrows();
    let mut r = sup_norm(&(st.lambda.transpose() * g0 * &st.lambda - DMatrix::<f64>::identity(o, o)));
    let conj = conjugate_triple(ys, &st.lambda)?;
    let std = crate::structures::standard_triple(&st.signature);
    for a in 0..3 {
        r = r.max(sup_norm(&(&conj[a] - &std[a])));
    }
    Ok(r)
}

/// Per-block orientation-reversing conjugation used to build dual structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualMode {
    /// `ρ₀ = diag(−1, 1, 1, 1)` on each block.
    Reversing,
    /// `η₀`: exchange of the first two coordinates of each block.
    ParityReversing,
}

impl DualMode {
    pub fn block_map(self) -> Matrix4<f64> {
        match self {
            DualMode::Reversing => Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 1.0, 1.0, 1.0)),
            DualMode::ParityReversing => {
                let mut m = Matrix4::zeros();
                m[(0, 1)] = 1.0;
                m[(1, 0)] = 1.0;
                m[(2, 2)] = 1.0;
                m[(3, 3)] = 1.0;
                m
            }
        }
    }

    pub fn matrix(self, n: usize) -> DMatrix<f64> {
        let b = self.block_map();
        let blk = DMatrix::from_fn(4, 4, |i, j| b[(i, j)]);
        block_diag(&vec![blk; n])
    }
}

/// `R₀⁻¹ Y_α R₀` with `R₀` applied on every block; the metric is kept.
pub fn dual_structure(s: &HkStructure, mode: DualMode) -> Result<HkStructure> {
    let sig = s.block_signature().ok_or(HkError::NotStandardForm)?;
    let ys = s.constant_triple().ok_or(HkError::NotStandardForm)?;
    let r0 = mode.matrix(s.dim().n());
    // R₀ is an involution, so R₀⁻¹ = R₀.
    let dual: Triple = std::array::from_fn(|a| &r0 * &ys[a] * &r0);
    Ok(HkStructure::from_constant(s.metric().clone(), dual)?.with_block_signature(sig.flipped()))
}

/// A pair of mutually dual structures sharing one metric.
#[derive(Debug, Clone)]
pub struct DiracStructure {
    pub plus: HkStructure,
    pub minus: HkStructure,
}

impl DiracStructure {
    pub fn new(plus: HkStructure, mode: DualMode) -> Result<Self> {
        let minus = dual_structure(&plus, mode)?;
        Ok(Self { plus, minus })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiracReport {
    pub plus: CanonicalFlag,
    pub minus: CanonicalFlag,
    pub agree: bool,
}

pub fn dirac_canonical_check(d: &DiracStructure, lambda: &DMatrix<f64>) -> Result<DiracReport> {
    let x = d.plus.origin();
    let plus = classify_linear_map(lambda, &d.plus, &x)?.canonical;
    let minus = classify_linear_map(lambda, &d.minus, &x)?.canonical;
    Ok(DiracReport {
        agree: plus.pass == minus.pass,
        plus,
        minus,
    })
}

type MapFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
type JacobianFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;

/// A map of `R^{4n}` with its Jacobian `Λ^i_j = ∂φ^i/∂x^j`.
#[derive(Clone)]
pub struct PointMap {
    order: usize,
    map: MapFn,
    jacobian: Option<JacobianFn>,
}

impl std::fmt::Debug for PointMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PointMap")
            .field("order", &self.order)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl PointMap {
    pub fn linear(lambda: DMatrix<f64>) -> Self {
        let l2 = lambda.clone();
        Self {
            order: lambda.nrows(),
            map: Arc::new(move |x| &l2 * x),
            jacobian: Some(Arc::new(move |_| lambda.clone())),
        }
    }

    pub fn from_fn<F>(order: usize, map: F) -> Self
    where
        F: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        Self {
            order,
            map: Arc::new(map),
            jacobian: None,
        }
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.map)(x)
    }

    /// Analytic Jacobian when supplied, otherwise central differences.
    pub fn jacobian_at(&self, x: &DVector<f64>) -> DMatrix<f64> {
        if let Some(j) = &self.jacobian {
            return j(x);
        }
        let h = crate::structures::structure_fd_step(x);
        let mut jac = DMatrix::zeros(self.order, self.order);
        for k in 0..self.order {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let col = ((self.map)(&xp) - (self.map)(&xm)) / (2.0 * h);
            jac.set_column(k, &col);
        }
        jac
    }

    pub fn classify_at(&self, s: &HkStructure, x: &DVector<f64>) -> Result<ClassificationReport> {
        classify_linear_map(&self.jacobian_at(x), s, x)
    }
}

/// Named linear map families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapFamily {
    /// `diag(λ, λ, 1/λ, 1/λ)` on every block.
    Scale(f64),
    /// `exp(t Y_α)` for the positive standard triple.
    ExpY { alpha: usize, t: f64 },
    /// `exp(t Ŷ_α)` for the negative standard triple.
    ExpYhat { alpha: usize, t: f64 },
    /// Exchange of blocks 1 and 2.
    BlockSwap,
}

impl MapFamily {
    pub fn jacobian(self, n: usize) -> Result<DMatrix<f64>> {
        let o = 4 * n;
        let per_block = |b: Matrix4<f64>| {
            let blk = DMatrix::from_fn(4, 4, |i, j| b[(i, j)]);
            block_diag(&vec![blk; n])
        };
        match self {
            MapFamily::Scale(l) => {
                if l == 0.0 || !l.is_finite() {
                    return Err(HkError::Singular);
                }
                Ok(per_block(Matrix4::from_diagonal(&nalgebra::Vector4::new(l, l, 1.0 / l, 1.0 / l))))
            }
            MapFamily::ExpY { alpha, t } | MapFamily::ExpYhat { alpha, t } => {
                if alpha > 2 {
                    return Err(HkError::LabelOutOfRange(alpha + 1));
                }
                let o_ = if matches!(self, MapFamily::ExpY { .. }) {
                    Orientation::Positive
                } else {
                    Orientation::Negative
                };
                let y = per_block(standard_block(alpha, o_));
                Ok((y * t).exp())
            }
            MapFamily::BlockSwap => {
                if n < 2 {
                    return Err(HkError::UnsupportedDimension(n));
                }
                let mut m = DMatrix::identity(o, o);
                for i in 0..4 {
                    m[(i, i)] = 0.0;
                    m[(4 + i, 4 + i)] = 0.0;
                    m[(i, 4 + i)] = 1.0;
                    m[(4 + i, i)] = 1.0;
                }
                Ok(m)
            }
        }
    }
}

/// Metric of a forward-scrambled structure: `g = T⁻ᵀ T⁻¹` with `Y' = T Y T⁻¹`.
pub fn scrambled(signature: &OrientationSignature, t: &DMatrix<f64>) -> Result<(DMatrix<f64>, Triple)> {
    let t_inv = inverse(t)?;
    let ys = crate::structures::standard_triple(signature);
    let g = t_inv.transpose() * &t_inv;
    let g = (&g + g.transpose()) * 0.5;
    Ok((g, std::array::from_fn(|a| t * &ys[a] * &t_inv)))
}

/// Structure from a scrambled pair, with a constant metric.
pub fn scrambled_structure(signature: &OrientationSignature, t: &DMatrix<f64>) -> Result<HkStructure> {
    let (g, ys) = scrambled(signature, t)?;
    HkStructure::from_constant(MetricField::Constant(g), ys)
}
