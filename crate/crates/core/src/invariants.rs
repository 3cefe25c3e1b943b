//! The Pfaffian-type invariant `P_m`, the pairing `P_1`, and block volumes.
//!
//! `P_m(K) = (1/(2^m m!)) Σ ε_{i₁j₁…i_mj_m} K_{i₁j₁}⋯K_{i_mj_m}` is the signed
//! square root of `det K`; the sign carries orientation, so it is always
//! computed by expansion and never from the determinant.

use nalgebra::{DMatrix, Matrix4};
use serde::Serialize;

use crate::error::{HkError, Result};
use crate::linalg::{antisymmetry_defect, permutations4, require_square, sup_norm};

const ANTISYMMETRY_TOL: f64 = 1e-12;

/// 1-based index of a 4×4 diagonal block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BlockIndex(usize);

impl BlockIndex {
    pub fn new(a: usize, n: usize) -> Result<Self> {
        if a == 0 || a > n {
            return Err(HkError::BlockOutOfRange { index: a, n });
        }
        Ok(Self(a))
    }

    /// Block from a 0-based position.
    pub fn from_zero(a: usize) -> Self {
        Self(a + 1)
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// First coordinate of the block, 0-based.
    pub fn offset(self) -> usize {
        4 * (self.0 - 1)
    }
}

/// Coefficient of `Ω_a = dx^{4a−3}∧dx^{4a−2}∧dx^{4a−1}∧dx^{4a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourFormCoefficient {
    pub value: f64,
    pub block: BlockIndex,
}

fn check_antisymmetric(k: &DMatrix<f64>) -> Result<usize> {
    let order = require_square(k)?;
    if order % 2 == 1 {
        return Err(HkError::OddOrder(order));
    }
    let defect = antisymmetry_defect(k);
    if defect > ANTISYMMETRY_TOL * sup_norm(k).max(1.0) {
        return Err(HkError::NotAntisymmetric(defect));
    }
    Ok(order)
}

/// `P₂` of a 4×4 antisymmetric matrix (no validation).
pub fn p2_block(k: &Matrix4<f64>) -> f64 {
    k[(0, 1)] * k[(2, 3)] - k[(0, 2)] * k[(1, 3)] + k[(0, 3)] * k[(1, 2)]
}

/// Recursive expansion along the first remaining index.
fn pfaffian_rec(k: &DMatrix<f64>, idx: &[usize]) -> f64 {
    match idx.len() {
        0 => 1.0,
        2 => k[(idx[0], idx[1])],
        4 => {
            let [a, b, c, d] = [idx[0], idx[1], idx[2], idx[3]];
            k[(a, b)] * k[(c, d)] - k[(a, c)] * k[(b, d)] + k[(a, d)] * k[(b, c)]
        }
        _ => {
            let first = idx[0];
            let mut total = 0.0;
            let mut rest = Vec::with_capacity(idx.len() - 2);
            for j in 1..idx.len() {
                let kij = k[(first, idx[j])];
                if kij == 0.0 {
                    continue;
                }
                rest.clear();
                rest.extend(idx[1..].iter().enumerate().filter(|&(p, _)| p + 1 != j).map(|(_, &v)| v));
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                total += sign * kij * pfaffian_rec(k, &rest);
            }
            total
        }
    }
}

/// `P_m(K)` for an antisymmetric matrix of order `2m`.
pub fn pfaffian_invariant(k: &DMatrix<f64>) -> Result<f64> {
    let order = check_antisymmetric(k)?;
    let idx: Vec<usize> = (0..order).collect();
    Ok(pfaffian_rec(k, &idx))
}

/// `P₁(A, B) = (1/8) ε_{ijkm} A_{ij} B_{km}`.
pub fn p1_pairing(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    let mut s = 0.0;
    for (p, sign) in permutations4() {
        s += sign * a[(p[0], p[1])] * b[(p[2], p[3])];
    }
    s / 8.0
}

/// `P₂(A) = P₁(A, A)` on a 4×4 antisymmetric matrix.
pub fn p2(a: &Matrix4<f64>) -> f64 {
    p2_block(a)
}

/// `(P_m(ΛᵀKΛ), P_m(K) det Λ)`.
pub fn transform_rule_check(k: &DMatrix<f64>, lambda: &DMatrix<f64>) -> Result<(f64, f64)> {
    let order = check_antisymmetric(k)?;
    crate::linalg::require_order(lambda, order)?;
    let moved = lambda.transpose() * k * lambda;
    // Re-antisymmetrize to strip round-off before the validated expansion.
    let moved = (&moved - moved.transpose()) * 0.5;
    let lhs = pfaffian_invariant(&moved)?;
    let rhs = pfaffian_invariant(k)? * lambda.determinant();
    Ok((lhs, rhs))
}

/// The `a`-th diagonal 4×4 block: coefficient matrix of `ι_a* ω`.
pub fn block_restrict(k: &DMatrix<f64>, a: BlockIndex) -> Matrix4<f64> {
    let o = a.offset();
    Matrix4::from_fn(|i, j| k[(o + i, o + j)])
}

pub fn block_count(k: &DMatrix<f64>) -> usize {
    k.nrows() / 4
}

/// `P₂` of every diagonal block of `ΛᵀKΛ`.
pub fn block_volumes(k: &DMatrix<f64>, lambda: &DMatrix<f64>) -> Vec<FourFormCoefficient> {
    let moved = lambda.transpose() * k * lambda;
    (0..block_count(k))
        .map(|a| {
            let block = BlockIndex::from_zero(a);
            FourFormCoefficient {
                value: p2_block(&block_restrict(&moved, block)),
                block,
            }
        })
        .collect()
}

/// `Σ_a P₂(ι_a*(ΛᵀKΛ))`.
pub fn block_volume_sum(k: &DMatrix<f64>, lambda: &DMatrix<f64>) -> Result<f64> {
    check_antisymmetric(k)?;
    crate::linalg::require_order(lambda, k.nrows())?;
    Ok(block_volumes(k, lambda).iter().map(|v| v.value).sum())
}
