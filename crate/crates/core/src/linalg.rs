//! Small dense-matrix helpers shared by the other modules.

use nalgebra::{DMatrix, DVector, Matrix3};

use crate::error::{HkError, Result};

/// Levi-Civita symbol on three 0-based labels.
pub fn epsilon3(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Levi-Civita symbol on four 0-based indices in `0..4`.
pub fn epsilon4(i: usize, j: usize, k: usize, l: usize) -> f64 {
    let idx = [i, j, k, l];
    for a in 0..4 {
        if idx[a] > 3 {
            return 0.0;
        }
        for b in a + 1..4 {
            if idx[a] == idx[b] {
                return 0.0;
            }
        }
    }
    let mut inversions = 0;
    for a in 0..4 {
        for b in a + 1..4 {
            if idx[a] > idx[b] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All 24 permutations of `0..4` with their signs.
pub fn permutations4() -> Vec<([usize; 4], f64)> {
    let mut out = Vec::with_capacity(24);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let s = epsilon4(i, j, k, l);
                    if s != 0.0 {
                        out.push(([i, j, k, l], s));
                    }
                }
            }
        }
    }
    out
}

/// Largest absolute entry.
pub fn sup_norm(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn sup_norm3(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn sup_norm_vec(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest entry of `|K + K^T|`.
pub fn antisymmetry_defect(k: &DMatrix<f64>) -> f64 {
    sup_norm(&(k + k.transpose()))
}

pub fn symmetry_defect(k: &DMatrix<f64>) -> f64 {
    sup_norm(&(k - k.transpose()))
}

pub fn require_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(HkError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn require_order(m: &DMatrix<f64>, order: usize) -> Result<()> {
    let n = require_square(m)?;
    if n != order {
        return Err(HkError::DimensionMismatch {
            expected: order,
            got: n,
        });
    }
    Ok(())
}

pub fn inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    require_square(m)?;
    m.clone().try_inverse().ok_or(HkError::Singular)
}

/// Rotation matrix about coordinate axis `axis` (0-based) by `angle`, in the
/// convention `R = [[1,0,0],[0,c,-s],[0,s,c]]` for the first axis.
pub fn axis_rotation(axis: usize, angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    let (a, b) = match axis {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let mut r = Matrix3::zeros();
    r[(axis, axis)] = 1.0;
    r[(a, a)] = c;
    r[(a, b)] = -s;
    r[(b, a)] = s;
    r[(b, b)] = c;
    r
}

/// Block-diagonal direct sum of square blocks.
pub fn block_diag(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let order: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(order, order);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        off += b.nrows();
    }
    out
}

/// Inverse symmetric square root of an SPD matrix, `g^{-1/2}`.
pub fn inverse_sqrt_spd(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    require_square(g)?;
    let eig = g.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(HkError::DegenerateMetric);
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// Matrix exponential.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().exp()
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn matrix3_rows(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[(i, j)];
        }
    }
    out
}

pub fn from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(HkError::Invalid("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}
