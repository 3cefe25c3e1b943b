//! Acceptance suite: one line per criterion, tolerances as specified.
//! Runs with `harness = false`; exits non-zero when any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use hyperkahler::dynamics::{certify_canonical_flow, integrate, lie_decompose_4d, rotation_matrix, sphere_rotation_of_flow, Monomial};
use hyperkahler::invariants::{block_restrict, p2, BlockIndex};
use hyperkahler::maps::{
    classify_linear_map, dirac_canonical_check, dual_structure, scrambled, standard_form_residual, standardize_at_point,
    DiracStructure, DualMode, MapFamily,
};
use hyperkahler::structures::quaternionic_residuals;
use hyperkahler::{
    integrate_flow, pfaffian_invariant, standard_block, theta_form, transform_rule_check, ChristoffelData, GradientData,
    HamiltonianTriple, HkStructure, LinearField, Orientation, OrientationSignature, SphereCoefficient,
};
use nalgebra::{DMatrix, DVector, Matrix3, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn sig(s: &[i64]) -> OrientationSignature {
    OrientationSignature::from_signs(s).unwrap()
}

fn all_signatures(n: usize) -> Vec<OrientationSignature> {
    (0..1usize << n)
        .map(|bits| sig(&(0..n).map(|a| if bits >> a & 1 == 1 { -1 } else { 1 }).collect::<Vec<_>>()))
        .collect()
}

fn random_matrix<R: Rng>(rng: &mut R, o: usize) -> DMatrix<f64> {
    DMatrix::from_fn(o, o, |_, _| rng.random_range(-1.0..1.0))
}

fn random_antisym<R: Rng>(rng: &mut R, o: usize) -> DMatrix<f64> {
    let a = random_matrix(rng, o);
    &a - a.transpose()
}

fn c1_standard_algebra() -> Outcome {
    let mut worst = 0.0_f64;
    let mut count = 0;
    for n in 1..=4 {
        for s in all_signatures(n) {
            let st = HkStructure::standard(&s);
            let x = st.origin();
            let g = st.metric().eval(&x);
            let r = quaternionic_residuals(&g, &st.triple_at(&x)).unwrap();
            worst = worst.max(r.algebra).max(r.orthogonality);
            count += 1;
        }
    }
    let mut comm = 0.0_f64;
    for a in 0..3 {
        for b in 0..3 {
            let y = standard_block(a, Orientation::Positive);
            let yh = standard_block(b, Orientation::Negative);
            comm = comm.max((y * yh - yh * y).amax());
        }
    }
    Outcome {
        pass: worst == 0.0 && comm == 0.0,
        detail: format!("{count} signatures n=1..4: relation/antisymmetry residual {worst:e}, max |[Y_a, Yhat_b]| {comm:e}"),
    }
}

fn c2_orientation_invariant() -> Outcome {
    let mut exact = true;
    for a in 0..3 {
        exact &= p2(&standard_block(a, Orientation::Positive)) == 1.0;
        exact &= p2(&standard_block(a, Orientation::Negative)) == -1.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut det_rel = 0.0_f64;
    let mut rule_rel = 0.0_f64;
    for order in [4, 8] {
        for _ in 0..1000 {
            let k = random_antisym(&mut rng, order);
            let p = pfaffian_invariant(&k).unwrap();
            let det = k.determinant();
            det_rel = det_rel.max((p * p - det).abs() / det.abs());
            let lam = random_matrix(&mut rng, order);
            let (l, r) = transform_rule_check(&k, &lam).unwrap();
            rule_rel = rule_rel.max((l - r).abs() / r.abs().max(l.abs()));
        }
    }
    Outcome {
        pass: exact && det_rel <= 1e-9 && rule_rel <= 1e-9,
        detail: format!("P2(Y)=+1, P2(Yhat)=-1 exact: {exact}; max rel |P^2-Det| {det_rel:.2e}; max rel transform-rule gap {rule_rel:.2e} (m=2,4; 1000 each)"),
    }
}

fn c3_remark_rotation() -> Outcome {
    let s = HkStructure::standard_positive(1).unwrap();
    let x0 = DVector::from_vec(vec![0.6, -0.3, 0.2, 0.5]);
    let flow = integrate_flow(&HamiltonianTriple::single_radial(4), &s, &x0, 2.0 * PI, 1000).unwrap();
    let samples = sphere_rotation_of_flow(&flow, &s, 1e-8).unwrap();
    let mut off = 0.0_f64;
    let mut angle_err = 0.0_f64;
    let mut accepted = true;
    for smp in &samples {
        let Some(r) = rotation_matrix(smp) else {
            accepted = false;
            continue;
        };
        // Pattern: fixed axis 1, (ω₂, ω₃) rotated with ω̃₂ = cos θ ω₂ − sin θ ω₃.
        let theta = r[(2, 1)].atan2(r[(1, 1)]);
        let pattern = Matrix3::new(1.0, 0.0, 0.0, 0.0, theta.cos(), -theta.sin(), 0.0, theta.sin(), theta.cos());
        off = off.max((r - pattern).amax());
        let expected = 2.0 * smp.t;
        let d = (theta - expected).rem_euclid(2.0 * PI);
        angle_err = angle_err.max(d.min(2.0 * PI - d));
    }
    Outcome {
        pass: accepted && off <= 1e-8,
        detail: format!(
            "{} samples on [0, 2π]: all hyperkähler {accepted}; off-pattern max {off:.2e}; |θ(t) − 2t| max {angle_err:.2e}",
            samples.len()
        ),
    }
}

fn c4_remark_scaling() -> Outcome {
    let s = HkStructure::standard_positive(1).unwrap();
    let x = s.origin();
    let mut ok = true;
    let mut worst = 0.0_f64;
    for lam in [2.0, 5.0, 0.1] {
        let m = MapFamily::Scale(lam).jacobian(1).unwrap();
        let r = classify_linear_map(&m, &s, &x).unwrap();
        worst = worst.max(r.canonical.residual);
        ok &= r.canonical.residual <= 1e-10 && !r.orthogonal.pass && !r.hyperkahler.pass;
    }
    Outcome {
        pass: ok,
        detail: format!("λ ∈ {{2, 5, 0.1}}: canonical residual max {worst:.2e}, non-orthogonal and non-hyperkähler: {ok}"),
    }
}

fn c5_lie_coefficients() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let osc = HamiltonianTriple::quaternionic_oscillator(4);
    let mut osc_err = 0.0_f64;
    for _ in 0..100 {
        let c = SphereCoefficient::random(&mut rng);
        let x = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
        let d = lie_decompose_4d(&osc, &c, &x).unwrap();
        let (c1, c2, c3) = (c.get(0), c.get(1), c.get(2));
        let p = [4.0 * (c2 - c3), 4.0 * (c3 - c1), 4.0 * (c1 - c2)];
        for a in 0..3 {
            osc_err = osc_err.max((d.p[a] - p[a]).abs()).max(d.q[a].abs());
        }
    }
    // Radial single Hamiltonians a|x|² + b|x|⁴ in each slot.
    let mut radial_q = 0.0_f64;
    let mut radial_q_quadratic = 0.0_f64;
    for i in 0..100 {
        let a = rng.random_range(-1.0..1.0);
        // Every other case is purely quadratic; the rest carry a genuine |x|⁴ term.
        let b = if i % 2 == 0 { 0.0 } else { rng.random_range(-1.0..1.0) };
        let mut terms = Vec::new();
        for i in 0..4 {
            let mut p = vec![0; 4];
            p[i] = 2;
            terms.push(Monomial { coeff: a, powers: p.clone() });
            for j in 0..4 {
                let mut q = p.clone();
                q[j] += 2;
                terms.push(Monomial { coeff: b, powers: q });
            }
        }
        let slot = rng.random_range(0..3);
        let mut comps: [Vec<Monomial>; 3] = Default::default();
        comps[slot] = terms;
        let h = HamiltonianTriple::polynomial(4, comps).unwrap();
        let c = SphereCoefficient::random(&mut rng);
        let x = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
        let d = lie_decompose_4d(&h, &c, &x).unwrap();
        let q = d.q.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        radial_q = radial_q.max(q);
        if b == 0.0 {
            radial_q_quadratic = radial_q_quadratic.max(q);
        }
    }
    // Generic cubic triples against the pullback oracle.
    let s = HkStructure::standard_positive(1).unwrap();
    let kp = hyperkahler::standard_triple(&sig(&[1]));
    let kn = hyperkahler::standard_triple(&sig(&[-1]));
    let mut fd_err = 0.0_f64;
    for _ in 0..100 {
        let h = HamiltonianTriple::random_polynomial(4, 3, 8, &mut rng);
        let c = SphereCoefficient::random(&mut rng);
        let x = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
        let d = lie_decompose_4d(&h, &c, &x).unwrap();
        let mut rebuilt = DMatrix::zeros(4, 4);
        let mut oracle = DMatrix::zeros(4, 4);
        for a in 0..3 {
            rebuilt += (&kp[a] * d.p[a] + &kn[a] * d.q[a]) * 0.5;
            oracle += common::fd_lie_derivative(&h, &s, &x, a) * c.get(a);
        }
        fd_err = fd_err.max((rebuilt - oracle).amax());
    }
    Outcome {
        pass: osc_err <= 1e-10 && radial_q <= 1e-8 && fd_err <= 1e-6,
        detail: format!("oscillator p/q error {osc_err:.2e} (100 c); radial max |q| {radial_q:.2e} (quadratic-only subset {radial_q_quadratic:.2e}); cubic vs pullback oracle {fd_err:.2e} (100 points)"),
    }
}

fn c6_canonical_flows() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let configs = [sig(&[1]), sig(&[-1]), sig(&[1, 1]), sig(&[1, -1])];
    let mut worst_by: Vec<f64> = vec![0.0; configs.len()];
    // Cubic fields can blow up before T = 1; such draws are redrawn (trajectory
    // must exist on [0, 1] and stay in the box |x|∞ ≤ 10) and counted.
    let mut redrawn = 0;
    for _ in 0..100 {
        for (ci, sg) in configs.iter().enumerate() {
            let s = HkStructure::standard(sg);
            let o = s.order();
            let flow = loop {
                let h = HamiltonianTriple::random_polynomial(o, 4, 6, &mut rng);
                let x0 = DVector::from_fn(o, |_, _| rng.random_range(-0.5..0.5));
                match integrate_flow(&h, &s, &x0, 1.0, 1000) {
                    Ok(f) if f.states.iter().all(|x| x.amax() <= 10.0) => break f,
                    _ => redrawn += 1,
                }
            };
            let cert = certify_canonical_flow(&flow, &s).unwrap();
            worst_by[ci] = worst_by[ci].max(cert.max_residual);
        }
    }
    let worst = worst_by.iter().copied().fold(0.0, f64::max);
    let s = HkStructure::standard(&sig(&[1, -1]));
    let ctrl = integrate(&LinearField::expansion(8), &DVector::from_element(8, 0.1), 1.0, 1000).unwrap();
    let cert = certify_canonical_flow(&ctrl, &s).unwrap();
    let last = &ctrl.jacobians[1000];
    let expected = 4f64.exp() - 1.0;
    let mut ctrl_rel = 0.0_f64;
    for b in 0..2 {
        for a in 0..3 {
            let k = s.kahler_form(&s.origin()).unwrap().k;
            let blk = block_restrict(&(last.transpose() * &k[a] * last), BlockIndex::from_zero(b));
            let before = block_restrict(&k[a], BlockIndex::from_zero(b));
            let r = (p2(&blk) - p2(&before)).abs();
            ctrl_rel = ctrl_rel.max((r - expected).abs() / expected);
        }
    }
    Outcome {
        pass: worst <= 1e-6 && !cert.pass && ctrl_rel <= 1e-3,
        detail: format!(
            "max residual by signature (+) {:.2e}, (-) {:.2e}, (+,+) {:.2e}, (+,-) {:.2e}; redrawn (blow-up) {redrawn}; control fails {} with per-block rel error {ctrl_rel:.2e}",
            worst_by[0],
            worst_by[1],
            worst_by[2],
            worst_by[3],
            !cert.pass
        ),
    }
}

fn c7_theta() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let labels = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];
    let mut worst = 0.0_f64;
    for orient in [1, -1] {
        let s = HkStructure::standard(&sig(&[orient]));
        let x = s.origin();
        for _ in 0..1000 {
            let gamma = ChristoffelData::random_symmetric(4, &mut rng);
            let grad = GradientData::random(4, &mut rng);
            for l in labels {
                worst = worst.max(theta_form(&gamma, &grad, &s, &x, l, BlockIndex::from_zero(0)).unwrap().abs());
            }
        }
    }
    let s = HkStructure::standard_positive(1).unwrap();
    let mut control = f64::INFINITY;
    for _ in 0..100 {
        let mut gamma = ChristoffelData::random_symmetric(4, &mut rng);
        let v = gamma.get(0, 0, 3);
        gamma.set(0, 0, 3, v + 1.0);
        let grad = GradientData::random(4, &mut rng);
        let t = theta_form(&gamma, &grad, &s, &s.origin(), [0, 1, 2], BlockIndex::from_zero(0)).unwrap();
        control = control.min(t.abs());
    }
    Outcome {
        pass: worst <= 1e-12 && control > 1e-3,
        detail: format!("max |Θ| {worst:.2e} (1000 Γ × 6 label orders × 2 orientations); asymmetrized control min |Θ₁₂₃| {control:.2e}"),
    }
}

fn c8_standardization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0_f64;
    let mut sig_ok = 0;
    let mut parity_ok = 0;
    let mut redrawn = 0;
    let total = 200;
    for i in 0..total {
        let n = 1 + i % 3;
        let o = 4 * n;
        let sg = OrientationSignature::random(hyperkahler::Dimension::new(n).unwrap(), &mut rng);
        // Forming T Y T⁻¹ in floating point already costs ~cond(T)·ε of quaternionic
        // accuracy; redraw T until cond(T) ≤ 1e3 so the input itself is good to 1e-9.
        let t = loop {
            let t = random_matrix(&mut rng, o);
            let sv = t.clone().svd(false, false).singular_values;
            if sv.max() <= 1e3 * sv.min() {
                break t;
            }
            redrawn += 1;
        };
        let (g, ys) = scrambled(&sg, &t).unwrap();
        let st = standardize_at_point(&g, &ys).unwrap();
        worst = worst.max(standard_form_residual(&g, &ys, &st).unwrap());
        if st.signature == sg {
            sig_ok += 1;
        }
        if st.signature.parity() == sg.parity() * t.determinant().signum() {
            parity_ok += 1;
        }
    }
    Outcome {
        pass: worst <= 1e-9 && sig_ok == total,
        detail: format!(
            "{total} instances n=1..3: standard-form residual max {worst:.2e}; signature recovered exactly {sig_ok}/{total}; parity·sign(det T) consistent {parity_ok}/{total}; ill-conditioned T redrawn {redrawn}"
        ),
    }
}

fn c9_duality() -> Outcome {
    let mut exact = true;
    let mut sphere_gap = 0.0_f64;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 1..=4 {
        for sg in all_signatures(n) {
            let s = HkStructure::standard(&sg);
            for mode in [DualMode::Reversing, DualMode::ParityReversing] {
                let d = dual_structure(&s, mode).unwrap();
                let k = s.kahler_form(&s.origin()).unwrap().k;
                let kd = d.kahler_form(&d.origin()).unwrap().k;
                for a in 0..3 {
                    let wedge = common::wedge_square(&k[a]);
                    let wedge_d = common::wedge_square(&kd[a]);
                    exact &= wedge_d.iter().zip(&wedge).all(|(x, y)| *x == -*y);
                    for b in 0..n {
                        let idx = BlockIndex::from_zero(b);
                        exact &= p2(&block_restrict(&kd[a], idx)) == -p2(&block_restrict(&k[a], idx));
                    }
                }
                for _ in 0..5 {
                    let c = SphereCoefficient::random(&mut rng);
                    let (w, wd) = (c.combine(&k), c.combine(&kd));
                    for b in 0..n {
                        let idx = BlockIndex::from_zero(b);
                        sphere_gap = sphere_gap.max((p2(&block_restrict(&wd, idx)) + p2(&block_restrict(&w, idx))).abs());
                    }
                }
            }
        }
    }
    let mut agree = 0;
    let mut canonical_seen = 0;
    let total = 200;
    for i in 0..total {
        let n = 1 + i % 2;
        let o = 4 * n;
        let sg = OrientationSignature::random(hyperkahler::Dimension::new(n).unwrap(), &mut rng);
        let mode = if i % 4 < 2 { DualMode::Reversing } else { DualMode::ParityReversing };
        let d = DiracStructure::new(HkStructure::standard(&sg), mode).unwrap();
        let lam = match i % 5 {
            0 => random_matrix(&mut rng, o),
            1 => MapFamily::Scale(rng.random_range(0.2..4.0)).jacobian(n).unwrap(),
            2 => {
                let ys = hyperkahler::standard_triple(&sg);
                let mut gen = DMatrix::zeros(o, o);
                for a in 0..3 {
                    gen += &ys[a] * rng.random_range(-1.0..1.0);
                }
                gen.exp()
            }
            3 => {
                let s = HkStructure::standard(&sg);
                let h = HamiltonianTriple::random_polynomial(o, 3, 5, &mut rng);
                let x0 = DVector::from_fn(o, |_, _| rng.random_range(-0.5..0.5));
                integrate_flow(&h, &s, &x0, 0.5, 200).unwrap().final_jacobian().clone()
            }
            _ => DMatrix::identity(o, o) + random_matrix(&mut rng, o) * 0.05,
        };
        let r = dirac_canonical_check(&d, &lam).unwrap();
        if r.agree {
            agree += 1;
        }
        if r.plus.pass {
            canonical_seen += 1;
        }
    }
    Outcome {
        pass: exact && sphere_gap <= 1e-12 && agree == total,
        detail: format!("standard forms: blockwise P2 and ω∧ω flip exact for n=1..4, both modes: {exact}; random sphere forms |P2(ŵ)+P2(w)| max {sphere_gap:.2e}; Dirac flags agree {agree}/{total} ({canonical_seen} canonical)"),
    }
}

fn c10_group() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let s = HkStructure::standard_positive(1).unwrap();
    let x = s.origin();
    let y: [Matrix4<f64>; 3] = std::array::from_fn(|a| standard_block(a, Orientation::Positive));
    let yh: [Matrix4<f64>; 3] = std::array::from_fn(|a| standard_block(a, Orientation::Negative));
    let to_d = |m: Matrix4<f64>| DMatrix::from_fn(4, 4, |i, j| m[(i, j)]);
    let mut strong = 0;
    let mut hk = 0;
    let mut so3 = 0.0_f64;
    for _ in 0..200 {
        let mut gen = Matrix4::zeros();
        for a in 0..3 {
            gen += yh[a] * rng.random_range(-3.0..3.0);
        }
        let r = classify_linear_map(&to_d(gen).exp(), &s, &x).unwrap();
        if r.strongly_hyperkahler.pass {
            strong += 1;
        }
        let mut gen = Matrix4::zeros();
        for a in 0..3 {
            gen += y[a] * rng.random_range(-3.0..3.0) + yh[a] * rng.random_range(-3.0..3.0);
        }
        let r = classify_linear_map(&to_d(gen).exp(), &s, &x).unwrap();
        if r.hyperkahler.pass {
            hk += 1;
            let m = r.hyperkahler.rotation.r;
            so3 = so3
                .max((m.transpose() * m - Matrix3::identity()).amax())
                .max((m.determinant() - 1.0).abs());
        }
    }
    Outcome {
        pass: strong == 200 && hk == 200 && so3 <= 1e-10,
        detail: format!("exp(span Yhat) strongly hyperkähler {strong}/200; exp(span Y ∪ Yhat) hyperkähler {hk}/200; SO(3) defect {so3:.2e}"),
    }
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        ("standard-structure algebra", c1_standard_algebra, Duration::from_secs(1)),
        ("orientation invariant P_m", c2_orientation_invariant, Duration::from_secs(10)),
        ("radial flow rotates (ω₂, ω₃)", c3_remark_rotation, Duration::from_secs(5)),
        ("anisotropic scaling is canonical", c4_remark_scaling, Duration::from_secs(1)),
        ("4D Lie-derivative coefficients", c5_lie_coefficients, Duration::from_secs(30)),
        ("hyperhamiltonian flows are canonical", c6_canonical_flows, Duration::from_secs(300)),
        ("Θ vanishes for symmetric Γ", c7_theta, Duration::from_secs(30)),
        ("pointwise standardization", c8_standardization, Duration::from_secs(30)),
        ("dual and Dirac structures", c9_duality, Duration::from_secs(10)),
        ("exponentials of the 4D group", c10_group, Duration::from_secs(30)),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = Vec::new();
    println!("acceptance: {} criteria", criteria.len());
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= *budget;
        println!(
            "criterion {:>2} {} {name}: {} [{:.2}s / budget {}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
