//! Identity suite behind `hk verify`.

use clap::Args;
use hyperkahler::connection::hessian_volume_term;
use hyperkahler::dynamics::volume_rate;
use hyperkahler::invariants::p2;
use hyperkahler::structures::quaternionic_residuals;
use hyperkahler::*;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::output::{emit, num, CliResult, Outcome, Table};
use crate::Common;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Random instances per floating-point check.
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    exact: bool,
    residual: f64,
    tol: f64,
    pass: bool,
}

impl Check {
    fn exact(name: &'static str, residual: f64) -> Self {
        Self { name, exact: true, residual, tol: 0.0, pass: residual == 0.0 }
    }

    fn float(name: &'static str, residual: f64, default_tol: f64, over: Option<f64>) -> Self {
        let tol = over.unwrap_or(default_tol);
        Self { name, exact: false, residual, tol, pass: residual <= tol }
    }
}

fn signatures(n: usize) -> Vec<OrientationSignature> {
    (0..1usize << n)
        .map(|bits| {
            let signs: Vec<i64> = (0..n).map(|a| if bits >> a & 1 == 1 { -1 } else { 1 }).collect();
            OrientationSignature::from_signs(&signs).expect("nonempty")
        })
        .collect()
}

fn antisym<R: Rng>(rng: &mut R, o: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(o, o, |_, _| rng.random_range(-1.0..1.0));
    &a - a.transpose()
}

pub fn run(common: &Common, args: &VerifyArgs) -> CliResult<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let tol = common.tol;
    let mut checks = Vec::new();

    let mut quat = 0.0_f64;
    for n in 1..=4 {
        for s in signatures(n) {
            let st = HkStructure::standard(&s);
            let x = st.origin();
            let r = quaternionic_residuals(&st.metric().eval(&x), &st.triple_at(&x)).map_err(|e| e.to_string())?;
            quat = quat.max(r.algebra).max(r.orthogonality);
        }
    }
    checks.push(Check::exact("quaternionic-relations", quat));

    let mut comm = 0.0_f64;
    let mut p2_values = Vec::new();
    for a in 0..3 {
        let y = standard_block(a, Orientation::Positive);
        let yh = standard_block(a, Orientation::Negative);
        p2_values.push(json!({"label": a + 1, "P2_Y": p2(&y), "P2_Yhat": p2(&yh)}));
        for b in 0..3 {
            let yb = standard_block(b, Orientation::Negative);
            comm = comm.max((y * yb - yb * y).amax());
        }
    }
    checks.push(Check::exact("commutator-Y-Yhat", comm));
    let p2_gap = (0..3)
        .map(|a| {
            (p2(&standard_block(a, Orientation::Positive)) - 1.0)
                .abs()
                .max((p2(&standard_block(a, Orientation::Negative)) + 1.0).abs())
        })
        .fold(0.0, f64::max);
    checks.push(Check::exact("P2-standard-values", p2_gap));

    let (mut det_rel, mut rule_rel) = (0.0_f64, 0.0_f64);
    for order in [4, 8] {
        for _ in 0..args.cases {
            let k = antisym(&mut rng, order);
            let p = pfaffian_invariant(&k).map_err(|e| e.to_string())?;
            let d = k.determinant();
            det_rel = det_rel.max((p * p - d).abs() / d.abs());
            let lam = DMatrix::from_fn(order, order, |_, _| rng.random_range(-1.0..1.0));
            let (l, r) = transform_rule_check(&k, &lam).map_err(|e| e.to_string())?;
            rule_rel = rule_rel.max((l - r).abs() / l.abs().max(r.abs()));
        }
    }
    checks.push(Check::float("pfaffian-squared-determinant", det_rel, 1e-9, tol));
    checks.push(Check::float("pfaffian-transform-rule", rule_rel, 1e-9, tol));

    let labels = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];
    let (mut theta, mut hess) = (0.0_f64, 0.0_f64);
    for s in signatures(1) {
        let st = HkStructure::standard(&s);
        let x = st.origin();
        let ys = st.triple_at(&x);
        let k = st.kahler_form(&x).map_err(|e| e.to_string())?.k;
        for _ in 0..args.cases {
            let gamma = ChristoffelData::random_symmetric(4, &mut rng);
            let grad = GradientData::random(4, &mut rng);
            for l in labels {
                let block = BlockIndex::from_zero(0);
                theta = theta.max(theta_form(&gamma, &grad, &st, &x, l, block).map_err(|e| e.to_string())?.abs());
                hess = hess.max(hessian_volume_term(&grad.d[l[1]], &ys, &k, l, block).map_err(|e| e.to_string())?.abs());
            }
        }
    }
    checks.push(Check::float("theta-vanishing", theta, 1e-12, tol));
    checks.push(Check::float("hessian-contraction", hess, 1e-12, tol));

    let mut rate = 0.0_f64;
    for s in signatures(1) {
        let st = HkStructure::standard(&s);
        for _ in 0..args.cases.min(50) {
            let h = HamiltonianTriple::random_polynomial(4, 4, 6, &mut rng);
            let c = SphereCoefficient::random(&mut rng);
            let x = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
            let r = volume_rate(&h, &st, &c, &x, BlockIndex::from_zero(0)).map_err(|e| e.to_string())?;
            rate = rate.max(r.abs());
        }
    }
    checks.push(Check::float("four-dimensional-volume-rate", rate, 1e-10, tol));

    let mut flip = 0.0_f64;
    for n in 1..=3 {
        for s in signatures(n) {
            let st = HkStructure::standard(&s);
            for mode in [DualMode::Reversing, DualMode::ParityReversing] {
                let d = dual_structure(&st, mode).map_err(|e| e.to_string())?;
                let k = st.kahler_form(&st.origin()).map_err(|e| e.to_string())?.k;
                let kd = d.kahler_form(&d.origin()).map_err(|e| e.to_string())?.k;
                for a in 0..3 {
                    for b in 0..n {
                        let i = BlockIndex::from_zero(b);
                        flip = flip.max((p2(&block_restrict(&kd[a], i)) + p2(&block_restrict(&k[a], i))).abs());
                    }
                }
            }
        }
    }
    checks.push(Check::exact("dual-blockwise-sign-flip", flip));

    let pass = checks.iter().all(|c| c.pass);
    let mut table = Table::new(&["check", "exact", "residual", "tol", "pass"]);
    for c in &checks {
        table.push(vec![c.name.into(), c.exact.to_string(), num(c.residual), num(c.tol), c.pass.to_string()]);
    }
    let report = json!({
        "command": "verify",
        "seed": common.seed,
        "cases": args.cases,
        "P2": p2_values,
        "checks": checks,
        "pass": pass,
    });
    emit(common, report, &table)?;
    Ok(Outcome::from_pass(pass))
}
