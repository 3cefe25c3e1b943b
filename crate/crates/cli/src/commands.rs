use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use hyperkahler::dynamics::{certify_canonical_flow, rotation_matrix, FlowResult};
use hyperkahler::invariants::p2;
use hyperkahler::io::{FlowConfig, HamiltonianDoc, MapDoc, StructureDoc};
use hyperkahler::linalg::{matrix3_rows, to_rows};
use hyperkahler::maps::{scrambled, standard_form_residual, CANONICAL_TOL, ORTHOGONALITY_TOL};
use hyperkahler::*;
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::output::{emit, json_bytes, document, num, write_bytes, CliResult, Outcome, Table};
use crate::{Common, Format, StructureSource};

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn err(e: HkError) -> String {
    e.to_string()
}

pub fn parse_floats(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect()
}

pub fn parse_signs(s: &str) -> CliResult<OrientationSignature> {
    let signs: Vec<i64> = if s.contains(',') {
        s.split(',')
            .map(|t| match t.trim() {
                "+" | "1" | "+1" => Ok(1),
                "-" | "-1" => Ok(-1),
                other => Err(format!("bad orientation sign '{other}'")),
            })
            .collect::<CliResult<_>>()?
    } else {
        s.chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(format!("bad orientation sign '{other}'")),
            })
            .collect::<CliResult<_>>()?
    };
    OrientationSignature::from_signs(&signs).map_err(err)
}

fn load_structure(src: &StructureSource) -> CliResult<HkStructure> {
    match (&src.structure, &src.signs) {
        (Some(_), Some(_)) => Err("give either --structure or --signs, not both".into()),
        (Some(p), None) => read_json::<StructureDoc>(p)?.to_structure().map_err(err),
        (None, Some(s)) => Ok(HkStructure::standard(&parse_signs(s)?)),
        (None, None) => Ok(HkStructure::standard(&OrientationSignature::from_signs(&[1]).expect("one block"))),
    }
}

fn point(s: &HkStructure, x: &Option<String>) -> CliResult<DVector<f64>> {
    match x {
        None => Ok(s.origin()),
        Some(text) => {
            let v = parse_floats(text)?;
            if v.len() != s.order() {
                return Err(format!("point has {} coordinates, structure needs {}", v.len(), s.order()));
            }
            Ok(DVector::from_vec(v))
        }
    }
}

fn signature_json(s: &HkStructure) -> Value {
    match s.block_signature() {
        Some(sig) => json!({"signs": sig.signs(), "display": sig.to_string()}),
        None => Value::Null,
    }
}

/// Axis and angle of a rotation matrix.
fn axis_angle(r: &Matrix3<f64>) -> (Vector3<f64>, f64) {
    let angle = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos();
    let v = Vector3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
    if v.norm() > 1e-12 {
        return (v.normalize(), angle);
    }
    if angle < 1e-6 {
        return (Vector3::zeros(), 0.0);
    }
    // Half-turn: the axis spans the column space of R + I.
    let m = r + Matrix3::identity();
    let col = (0..3).map(|j| m.column(j).into_owned()).max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("3 columns");
    (col.normalize(), angle)
}

// ---------------------------------------------------------------- classify

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Orthogonal,
    StronglyHyperkahler,
    Hyperkahler,
    Canonical,
    NotCanonical,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Scale,
    #[value(name = "exp-Y")]
    ExpY,
    #[value(name = "exp-Yhat")]
    ExpYhat,
    BlockSwap,
    /// Seeded random element of exp(span Ŷ).
    RandomHat,
    /// Seeded random element of exp(span Y ∪ Ŷ).
    RandomFull,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub structure: StructureSource,
    /// Map JSON: `{matrix}`, rows, or `{family, alpha, t, lambda}`.
    #[arg(long, conflicts_with = "family")]
    pub map: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Label 1..3 for exp-Y / exp-Yhat.
    #[arg(long)]
    pub alpha: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Point of evaluation (comma-separated); defaults to the origin.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Exit 1 unless the map has this property.
    #[arg(long, value_enum)]
    pub expect: Option<Expect>,
}

fn random_group_element(s: &HkStructure, seed: u64, full: bool) -> CliResult<DMatrix<f64>> {
    let sig = s.block_signature().ok_or("random group families need a standard structure")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ys = standard_triple(sig);
    let yh = standard_triple(&sig.flipped());
    let o = s.order();
    let mut gen = DMatrix::zeros(o, o);
    for a in 0..3 {
        gen += &yh[a] * rng.random_range(-3.0..3.0);
        if full {
            gen += &ys[a] * rng.random_range(-3.0..3.0);
        }
    }
    Ok(gen.exp())
}

pub fn classify(common: &Common, args: &ClassifyArgs) -> CliResult<Outcome> {
    let s = load_structure(&args.structure)?;
    let n = s.dim().n();
    let lambda = match (&args.map, args.family) {
        (Some(p), _) => read_json::<MapDoc>(p)?.to_matrix(n).map_err(err)?,
        (None, Some(Family::RandomHat)) => random_group_element(&s, common.seed, false)?,
        (None, Some(Family::RandomFull)) => random_group_element(&s, common.seed, true)?,
        (None, Some(f)) => {
            let family = match f {
                Family::Scale => "scale",
                Family::ExpY => "exp-Y",
                Family::ExpYhat => "exp-Yhat",
                _ => "block-swap",
            };
            MapDoc::Family {
                family: family.into(),
                alpha: args.alpha,
                t: args.t,
                lambda: args.lambda,
            }
            .to_matrix(n)
            .map_err(err)?
        }
        (None, None) => return Err("give --map or --family".into()),
    };
    let x = point(&s, &args.x)?;
    let r = classify_linear_map(&lambda, &s, &x).map_err(err)?;
    let rotation = r.hyperkahler.rotation.rotation().map(|m| {
        let (axis, angle) = axis_angle(&m);
        json!({"R": matrix3_rows(&m), "axis": [axis[0], axis[1], axis[2]], "angle": angle})
    });
    let mut table = Table::new(&["property", "pass", "residual"]);
    table.push(vec!["orthogonal".into(), r.orthogonal.pass.to_string(), num(r.orthogonal.residual)]);
    table.push(vec!["strongly-hyperkahler".into(), r.strongly_hyperkahler.pass.to_string(), num(r.strongly_hyperkahler.residual)]);
    table.push(vec!["hyperkahler".into(), r.hyperkahler.pass.to_string(), num(r.hyperkahler.residual)]);
    table.push(vec!["canonical".into(), r.canonical.pass.to_string(), num(r.canonical.residual)]);
    let pass = match args.expect {
        None => true,
        Some(Expect::Orthogonal) => r.orthogonal.pass,
        Some(Expect::StronglyHyperkahler) => r.strongly_hyperkahler.pass,
        Some(Expect::Hyperkahler) => r.hyperkahler.pass,
        Some(Expect::Canonical) => r.canonical.pass,
        Some(Expect::NotCanonical) => !r.canonical.pass,
    };
    let report = json!({
        "command": "classify",
        "signature": signature_json(&s),
        "map": to_rows(&lambda),
        "orthogonal": r.orthogonal,
        "strongly_hyperkahler": r.strongly_hyperkahler,
        "hyperkahler": {"pass": r.hyperkahler.pass, "residual": r.hyperkahler.residual, "rotation": rotation,
                         "status": r.hyperkahler.rotation.status},
        "canonical": r.canonical,
        "tolerances": {"orthogonality": ORTHOGONALITY_TOL, "canonical": CANONICAL_TOL},
        "expect": args.expect.map(|e| format!("{e:?}")),
        "pass": pass,
    });
    emit(common, report, &table)?;
    Ok(Outcome::from_pass(pass))
}

// ------------------------------------------------------------- standardize

#[derive(Args, Debug)]
pub struct StandardizeArgs {
    /// Structure JSON with explicit metric and triple.
    #[arg(long, conflicts_with = "random")]
    pub input: Option<PathBuf>,
    /// Scramble a random standard structure with this many blocks (seeded).
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
}

pub fn standardize(common: &Common, args: &StandardizeArgs) -> CliResult<Outcome> {
    let tol = common.tol.unwrap_or(1e-9);
    let (g, ys, scrambled_from) = match (&args.input, args.random) {
        (Some(p), _) => {
            let s = read_json::<StructureDoc>(p)?.to_structure().map_err(err)?;
            let x = point(&s, &args.x)?;
            (s.metric().eval(&x), s.triple_at(&x), None)
        }
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let sig = OrientationSignature::random(Dimension::new(n).map_err(err)?, &mut rng);
            let t = DMatrix::from_fn(4 * n, 4 * n, |_, _| rng.random_range(-1.0..1.0));
            let (g, ys) = scrambled(&sig, &t).map_err(err)?;
            (g, ys, Some((sig, t.determinant())))
        }
        (None, None) => return Err("give --input or --random".into()),
    };
    let st = standardize_at_point(&g, &ys).map_err(err)?;
    let residual = standard_form_residual(&g, &ys, &st).map_err(err)?;
    let pass = residual <= tol;
    let scramble = scrambled_from.map(|(sig, det)| {
        json!({
            "signature": sig.signs(),
            "det_T": det,
            "signature_recovered": st.signature == sig,
            "parity_consistent": st.signature.parity() == sig.parity() * det.signum(),
        })
    });
    let mut table = Table::new(&["row"]);
    table.header = (1..=st.lambda.ncols()).map(|j| format!("c{j}")).collect();
    for row in to_rows(&st.lambda) {
        table.push(row.iter().map(|v| num(*v)).collect());
    }
    let report = json!({
        "command": "standardize",
        "lambda": to_rows(&st.lambda),
        "signature": {"signs": st.signature.signs(), "display": st.signature.to_string()},
        "residual": residual,
        "tol": tol,
        "scrambled": scramble,
        "pass": pass,
    });
    emit(common, report, &table)?;
    Ok(Outcome::from_pass(pass))
}

// -------------------------------------------------------------------- flow

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FlowPreset {
    /// H^α = |x|²/2 for every label.
    QuaternionicOscillator,
    /// H = (|x|²/2, 0, 0).
    SingleRadial,
    /// ẋ = x, not hyperhamiltonian (negative control).
    Expansion,
}

#[derive(Args, Debug)]
pub struct FlowArgs {
    /// Flow config JSON `{structure, hamiltonians, x0, T, steps}`.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<FlowPreset>,
    #[arg(long)]
    pub time: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Also write the trajectory CSV (t, x1..x4n) here.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Number of evenly spaced diagnostic samples.
    #[arg(long, default_value_t = 11)]
    pub samples: usize,
}

#[allow(clippy::large_enum_variant)]
enum FlowInput {
    Hamiltonian(HamiltonianTriple),
    Expansion,
}

fn trajectory_table(flow: &FlowResult) -> Table {
    let o = flow.states[0].len();
    let mut header = vec!["t".to_string()];
    header.extend((1..=o).map(|i| format!("x{i}")));
    let mut table = Table { header, rows: Vec::new() };
    for (t, x) in flow.times.iter().zip(&flow.states) {
        let mut row = vec![format!("{t:e}")];
        row.extend(x.iter().map(|v| format!("{v:e}")));
        table.push(row);
    }
    table
}

pub fn flow(common: &Common, args: &FlowArgs) -> CliResult<Outcome> {
    let default_x0 = [0.6, -0.3, 0.2, 0.5];
    let (s, input, mut x0, mut t_end, mut steps, label) = match (&args.config, args.preset) {
        (Some(p), _) => {
            let cfg: FlowConfig = read_json(p)?;
            let s = cfg.structure.to_structure().map_err(err)?;
            let h = cfg.hamiltonians.to_hamiltonians(s.order()).map_err(err)?;
            (s, FlowInput::Hamiltonian(h), cfg.x0, cfg.t, cfg.steps, "config".to_string())
        }
        (None, Some(preset)) => {
            let s = HkStructure::standard_positive(1).map_err(err)?;
            let (input, t) = match preset {
                FlowPreset::QuaternionicOscillator => (FlowInput::Hamiltonian(HamiltonianTriple::quaternionic_oscillator(4)), 1.0),
                FlowPreset::SingleRadial => (FlowInput::Hamiltonian(HamiltonianTriple::single_radial(4)), 2.0 * PI),
                FlowPreset::Expansion => (FlowInput::Expansion, 1.0),
            };
            let name = preset.to_possible_value().expect("named").get_name().to_string();
            (s, input, default_x0.to_vec(), t, 1000, name)
        }
        (None, None) => return Err("give --config or --preset".into()),
    };
    if let Some(t) = args.time {
        t_end = t;
    }
    if let Some(n) = args.steps {
        steps = n;
    }
    if let Some(text) = &args.x0 {
        x0 = parse_floats(text)?;
    }
    if x0.len() != s.order() {
        return Err(format!("x0 has {} coordinates, structure needs {}", x0.len(), s.order()));
    }
    let x0 = DVector::from_vec(x0);
    let result = match &input {
        FlowInput::Hamiltonian(h) => integrate_flow(h, &s, &x0, t_end, steps),
        FlowInput::Expansion => integrate(&LinearField::expansion(s.order()), &x0, t_end, steps),
    };
    let flow = match result {
        Ok(f) => f,
        Err(HkError::Divergence { last_valid_time }) => {
            let report = json!({
                "command": "flow",
                "input": label,
                "status": "diverged",
                "last_valid_time": last_valid_time,
                "T": t_end,
                "steps": steps,
                "pass": false,
            });
            write_bytes(common.out.as_deref(), &json_bytes(&document(report)))?;
            return Ok(Outcome::Diverged);
        }
        Err(e) => return Err(err(e)),
    };
    let cert = match common.tol {
        Some(tol) => hyperkahler::dynamics::certify_with_tol(&flow, &s, tol),
        None => certify_canonical_flow(&flow, &s),
    }
    .map_err(err)?;
    let rotations = sphere_rotation_of_flow(&flow, &s, ORTHOGONALITY_TOL).map_err(err)?;
    let count = args.samples.max(2).min(flow.times.len());
    let picks: Vec<usize> = (0..count).map(|k| k * steps / (count - 1)).collect();
    let blocks = s.dim().n();
    let samples: Vec<Value> = picks
        .iter()
        .map(|&i| {
            let c = &cert.samples[i];
            let rot = &rotations[i];
            let rotation = rotation_matrix(rot).map(|m| {
                let (axis, angle) = axis_angle(&m);
                json!({"R": matrix3_rows(&m), "axis": [axis[0], axis[1], axis[2]], "angle": angle})
            });
            let mut v = json!({
                "t": c.t,
                "residual": c.residual,
                "block_residual": c.block_residual,
                "sum_residual": c.sum_residual,
                "hyperkahler": rot.hyperkahler,
                "rotation": rotation,
            });
            if matches!(input, FlowInput::Expansion) {
                v["expected_block_residual"] = json!((4.0 * c.t).exp() - 1.0);
                v["block_volumes"] = json!(block_volumes_at(&s, &flow.jacobians[i], blocks));
            }
            v
        })
        .collect();
    let pass = cert.pass;
    let table = trajectory_table(&flow);
    if let Some(p) = &args.trajectory {
        write_bytes(Some(p), &table.to_csv()?)?;
    }
    let report = json!({
        "command": "flow",
        "input": label,
        "status": "ok",
        "signature": signature_json(&s),
        "method": flow.method,
        "T": t_end,
        "steps": steps,
        "step": flow.step,
        "x0": x0.as_slice(),
        "final_state": flow.final_state().as_slice(),
        "certificate": {"pass": cert.pass, "tol": cert.tol, "max_residual": cert.max_residual},
        "samples": samples,
        "pass": pass,
    });
    match common.format {
        Format::Json => emit(common, report, &table)?,
        Format::Csv => write_bytes(common.out.as_deref(), &table.to_csv()?)?,
    }
    Ok(Outcome::from_pass(pass))
}

/// `P₂` of each block of `ΛᵀK₁Λ`.
fn block_volumes_at(s: &HkStructure, lam: &DMatrix<f64>, blocks: usize) -> Vec<f64> {
    let k = &s.kahler_form(&s.origin()).expect("standard structure").k[0];
    let pulled = lam.transpose() * k * lam;
    (0..blocks).map(|b| p2(&block_restrict(&pulled, BlockIndex::from_zero(b)))).collect()
}

// --------------------------------------------------------------------- lie

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum LiePreset {
    QuaternionicOscillator,
    SingleRadial,
}

#[derive(Args, Debug)]
pub struct LieArgs {
    #[arg(long, conflicts_with = "hamiltonians")]
    pub preset: Option<LiePreset>,
    /// Hamiltonian triple JSON (four-dimensional).
    #[arg(long)]
    pub hamiltonians: Option<PathBuf>,
    /// Sphere coefficients `c1,c2,c3` (normalized); seeded random if absent.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Random samples when `--c` is absent.
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
}

pub fn lie(common: &Common, args: &LieArgs) -> CliResult<Outcome> {
    let tol = common.tol.unwrap_or(1e-10);
    let h = match (&args.hamiltonians, args.preset) {
        (Some(p), _) => read_json::<HamiltonianDoc>(p)?.to_hamiltonians(4).map_err(err)?,
        (None, Some(LiePreset::QuaternionicOscillator)) => HamiltonianTriple::quaternionic_oscillator(4),
        (None, Some(LiePreset::SingleRadial)) => HamiltonianTriple::single_radial(4),
        (None, None) => return Err("give --preset or --hamiltonians".into()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let cs: Vec<SphereCoefficient> = match &args.c {
        Some(text) => {
            let v = parse_floats(text)?;
            let c: [f64; 3] = v.try_into().map_err(|_| "--c needs three numbers".to_string())?;
            vec![SphereCoefficient::normalized(c).map_err(err)?]
        }
        None => (0..args.samples).map(|_| SphereCoefficient::random(&mut rng)).collect(),
    };
    let mut table = Table::new(&["sample", "c1", "c2", "c3", "p1", "p2", "p3", "q1", "q2", "q3", "residual"]);
    let mut rows = Vec::new();
    let mut pass = true;
    for (i, c) in cs.iter().enumerate() {
        let x = match &args.x {
            Some(text) => {
                let v = parse_floats(text)?;
                if v.len() != 4 {
                    return Err("--x needs four coordinates".into());
                }
                DVector::from_vec(v)
            }
            None => DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0)),
        };
        let d = lie_decompose_4d(&h, c, &x).map_err(err)?;
        let cv = c.as_vector();
        let mut row = json!({"c": [cv[0], cv[1], cv[2]], "x": x.as_slice(), "p": d.p, "q": d.q, "residual": d.residual});
        let mut ok = d.residual <= tol;
        if args.preset == Some(LiePreset::QuaternionicOscillator) {
            let expected = [4.0 * (cv[1] - cv[2]), 4.0 * (cv[2] - cv[0]), 4.0 * (cv[0] - cv[1])];
            let gap = (0..3).map(|a| (d.p[a] - expected[a]).abs().max(d.q[a].abs())).fold(0.0, f64::max);
            row["expected_p"] = json!(expected);
            row["expected_gap"] = json!(gap);
            ok &= gap <= tol;
        }
        pass &= ok;
        let mut cells = vec![i.to_string(), num(cv[0]), num(cv[1]), num(cv[2])];
        cells.extend(d.p.iter().chain(&d.q).map(|v| num(*v)));
        cells.push(num(d.residual));
        table.push(cells);
        rows.push(row);
    }
    let report = json!({
        "command": "lie",
        "convention": "L_X omega = (p_a omega_a + q_a omegahat_a) / 2",
        "samples": rows,
        "tol": tol,
        "pass": pass,
    });
    emit(common, report, &table)?;
    Ok(Outcome::from_pass(pass))
}

// -------------------------------------------------------------------- dual

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Reversing,
    ParityReversing,
}

#[derive(Args, Debug)]
pub struct DualArgs {
    #[command(flatten)]
    pub structure: StructureSource,
    #[arg(long, value_enum, default_value_t = ModeArg::Reversing)]
    pub mode: ModeArg,
    /// Optional map JSON for the Dirac canonicity comparison.
    #[arg(long)]
    pub map: Option<PathBuf>,
}

pub fn dual(common: &Common, args: &DualArgs) -> CliResult<Outcome> {
    let s = load_structure(&args.structure)?;
    let mode = match args.mode {
        ModeArg::Reversing => DualMode::Reversing,
        ModeArg::ParityReversing => DualMode::ParityReversing,
    };
    let d = DiracStructure::new(s, mode).map_err(err)?;
    let k = d.plus.kahler_form(&d.plus.origin()).map_err(err)?.k;
    let kd = d.minus.kahler_form(&d.minus.origin()).map_err(err)?.k;
    let mut table = Table::new(&["label", "block", "P2", "P2_dual"]);
    let mut blocks = Vec::new();
    let mut flip = true;
    for a in 0..3 {
        for b in 0..d.plus.dim().n() {
            let i = BlockIndex::from_zero(b);
            let (v, vd) = (p2(&block_restrict(&k[a], i)), p2(&block_restrict(&kd[a], i)));
            flip &= vd == -v;
            table.push(vec![(a + 1).to_string(), (b + 1).to_string(), num(v), num(vd)]);
            blocks.push(json!({"label": a + 1, "block": b + 1, "P2": v, "P2_dual": vd}));
        }
    }
    let dirac = match &args.map {
        Some(p) => {
            let lam = read_json::<MapDoc>(p)?.to_matrix(d.plus.dim().n()).map_err(err)?;
            Some(dirac_canonical_check(&d, &lam).map_err(err)?)
        }
        None => None,
    };
    let pass = flip && dirac.as_ref().is_none_or(|r| r.agree);
    let report = json!({
        "command": "dual",
        "mode": format!("{:?}", args.mode),
        "signature": signature_json(&d.plus),
        "dual_signature": signature_json(&d.minus),
        "dual_structure": StructureDoc::from_structure(&d.minus),
        "blocks": blocks,
        "sign_flip": flip,
        "dirac": dirac,
        "pass": pass,
    });
    emit(common, report, &table)?;
    Ok(Outcome::from_pass(pass))
}
