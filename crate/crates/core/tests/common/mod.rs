//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use hyperkahler::{HamiltonianTriple, HkStructure};
use nalgebra::{DMatrix, DVector};

/// Normalized ε-sum over all permutations of `0..2m` (brute force).
pub fn brute_pfaffian(k: &DMatrix<f64>) -> f64 {
    let order = k.nrows();
    let m = order / 2;
    let mut idx: Vec<usize> = (0..order).collect();
    let mut total = 0.0;
    permute(&mut idx, 0, 1.0, &mut |p, sign| {
        let mut term = sign;
        for pair in p.chunks(2) {
            term *= k[(pair[0], pair[1])];
        }
        total += term;
    });
    let norm = (1..=m).fold(1.0, |acc, i| acc * 2.0 * i as f64);
    total / norm
}

fn permute(v: &mut Vec<usize>, start: usize, sign: f64, f: &mut dyn FnMut(&[usize], f64)) {
    if start == v.len() {
        f(v, sign);
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        let s = if i == start { sign } else { -sign };
        permute(v, start + 1, s, f);
        v.swap(start, i);
    }
}

/// `f = Σ_α Y_α g⁻¹ ∇H^α`, assembled directly from the structure matrices.
pub fn field(h: &HamiltonianTriple, s: &HkStructure, x: &DVector<f64>) -> DVector<f64> {
    let ys = s.triple_at(x);
    let g_inv = s.metric().eval(x).try_inverse().unwrap();
    let p = h.gradient(x);
    (0..3).fold(DVector::zeros(x.len()), |acc, a| acc + &ys[a] * (&g_inv * &p[a]))
}

fn fd_jacobian(h: &HamiltonianTriple, s: &HkStructure, x: &DVector<f64>) -> DMatrix<f64> {
    let o = x.len();
    let step = 1e-6;
    let mut j = DMatrix::zeros(o, o);
    for k in 0..o {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[k] += step;
        xm[k] -= step;
        j.set_column(k, &((field(h, s, &xp) - field(h, s, &xm)) / (2.0 * step)));
    }
    j
}

/// Short flow by RK4 with a finite-difference variational equation.
pub fn short_flow(h: &HamiltonianTriple, s: &HkStructure, x0: &DVector<f64>, t: f64, steps: usize) -> (DVector<f64>, DMatrix<f64>) {
    let o = x0.len();
    let dt = t / steps as f64;
    let mut x = x0.clone();
    let mut l = DMatrix::identity(o, o);
    let rhs = |x: &DVector<f64>, l: &DMatrix<f64>| (field(h, s, x), fd_jacobian(h, s, x) * l);
    for _ in 0..steps {
        let (a1, b1) = rhs(&x, &l);
        let (a2, b2) = rhs(&(&x + &a1 * (dt / 2.0)), &(&l + &b1 * (dt / 2.0)));
        let (a3, b3) = rhs(&(&x + &a2 * (dt / 2.0)), &(&l + &b2 * (dt / 2.0)));
        let (a4, b4) = rhs(&(&x + &a3 * dt), &(&l + &b3 * dt));
        x += (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (dt / 6.0);
        l += (b1 + b2 * 2.0 + b3 * 2.0 + b4) * (dt / 6.0);
    }
    (x, l)
}

/// `Λ_εᵀ K_α(φ_ε x) Λ_ε`.
fn pullback(h: &HamiltonianTriple, s: &HkStructure, x: &DVector<f64>, alpha: usize, eps: f64) -> DMatrix<f64> {
    let (y, l) = short_flow(h, s, x, eps, 8);
    let k = s.metric().eval(&y) * &s.triple_at(&y)[alpha];
    l.transpose() * k * l
}

/// `L_X ω_α` as a Richardson-extrapolated central difference quotient of
/// the pulled-back form.
pub fn fd_lie_derivative(h: &HamiltonianTriple, s: &HkStructure, x: &DVector<f64>, alpha: usize) -> DMatrix<f64> {
    let quotient = |eps: f64| (pullback(h, s, x, alpha, eps) - pullback(h, s, x, alpha, -eps)) / (2.0 * eps);
    let eps = 1e-2;
    (quotient(eps / 2.0) * 4.0 - quotient(eps)) / 3.0
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.amax()
}

/// Components (ω∧ω)_{ijkl}, i<j<k<l, of ω = ½ K_ij dx^i∧dx^j, within each 4-block.
pub fn wedge_square(k: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::new();
    for b in 0..k.nrows() / 4 {
        let (i, j, l, m) = (4 * b, 4 * b + 1, 4 * b + 2, 4 * b + 3);
        out.push(2.0 * (k[(i, j)] * k[(l, m)] - k[(i, l)] * k[(j, m)] + k[(i, m)] * k[(j, l)]));
    }
    out
}
