use std::fs;
use std::path::Path;

use nambu::bianchi::{
    classify, derivation_algebra, derivation_algebra_direct, generating_form, is_unimodular, span_dimension, synthesize,
    witt_embedding_check, BianchiLabel,
};
use nambu::dynamics::{integrate_system, kepler_action_angle, NambuSystem, SpinSystem, Trajectory};
use nambu::io::{multivector_from_str, nlie_from_str, nlie_to_value, pair_from_str};
use nambu::linalg::RatMatrix;
use nambu::nlie::{NLieStructure, TupleWitness};
use nambu::njacobi::JacobiOp;
use nambu::npoisson::{casimir_polynomials, is_n_poisson, poisson_compat};
use nambu::poly::format_rational;
use nambu::{int, parse_rational, Error, Poly, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{Builtin, Cli, Command, Kind, Outcome};

type CliResult<T> = std::result::Result<T, String>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn at(path: &Path) -> impl Fn(Error) -> String + '_ {
    move |e| format!("{}: {e}", path.display())
}

fn rationals(text: &str) -> CliResult<Vec<Rational>> {
    text.split(',').map(|s| parse_rational(s).map_err(|e| e.to_string())).collect()
}

fn floats(text: &str) -> CliResult<Vec<f64>> {
    text.split(',').map(|s| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"))).collect()
}

fn polys(ps: &[Poly]) -> Value {
    ps.iter().map(|p| Value::String(p.to_string())).collect()
}

fn one_based(t: &TupleWitness) -> Value {
    let shift = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
    json!({ "u": shift(&t.u), "w": shift(&t.w) })
}

fn matrix(m: &RatMatrix) -> Value {
    m.to_rows().iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>()).collect()
}

fn verdict(holds: bool, witness: Option<Value>) -> serde_json::Map<String, Value> {
    let mut map = serde_json::Map::new();
    map.insert("verdict".into(), Value::Bool(holds));
    if let Some(w) = witness {
        map.insert("witness".into(), w);
    }
    map
}

fn done(ok: bool, map: serde_json::Map<String, Value>) -> CliResult<Outcome> {
    Ok(Outcome { ok, report: Value::Object(map), raw: None })
}

fn load_algebra(path: &Path) -> CliResult<NLieStructure> {
    nlie_from_str(&read(path)?).map_err(at(path))
}

fn random_basis(dim: usize, seed: u64) -> RatMatrix {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let rows = (0..dim).map(|_| (0..dim).map(|_| int(r.gen_range(-3..=3))).collect()).collect();
        let g = RatMatrix::from_rows(rows).expect("square");
        if g.det().map(|d| d != int(0)).unwrap_or(false) {
            return g;
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::CheckNlie { file } => {
            let p = load_algebra(file)?;
            let v = p.check_n_jacobi();
            let mut map = verdict(v.holds, v.witness.as_ref().map(one_based));
            map.insert("dim".into(), json!(p.dim()));
            map.insert("arity".into(), json!(p.arity()));
            done(v.holds, map)
        }
        Command::CheckPoisson { file } => {
            let t = multivector_from_str(&read(file)?).map_err(at(file))?;
            let v = is_n_poisson(&t);
            let mut map = verdict(v.holds, v.witness.as_deref().map(polys));
            map.insert("decomposable".into(), json!(t.is_decomposable()));
            let origin = vec![int(0); t.num_vars()];
            map.insert("rank_at_origin".into(), json!(t.derived_rank(&origin).map_err(at(file))?));
            if let (Some(d), true) = (cli.max_degree, v.holds) {
                let cas = casimir_polynomials(&t, d).map_err(at(file))?;
                map.insert("casimirs".into(), polys(&cas));
            }
            done(v.holds, map)
        }
        Command::CheckJacobi { file } => {
            let op: JacobiOp = pair_from_str(&read(file)?).map_err(at(file))?;
            let v = op.is_n_jacobi();
            let mut map = verdict(v.holds, v.witness.as_deref().map(polys));
            map.insert("box_poisson".into(), json!(is_n_poisson(op.boxv()).holds));
            map.insert("nabla_decomposable".into(), json!(op.nabla().is_decomposable()));
            done(v.holds, map)
        }
        Command::Classify { file } => {
            let p = load_algebra(file)?;
            let label = classify(&p).map_err(at(file))?;
            let form = generating_form(&p).map_err(at(file))?;
            let mut map = serde_json::Map::new();
            map.insert("label".into(), Value::String(label.to_string()));
            map.insert("label_data".into(), serde_json::to_value(&label).expect("serializable"));
            if let Some(l) = label.lambda_f64() {
                map.insert("lambda_approx".into(), json!(l));
            }
            map.insert("generating_form".into(), matrix(form.matrix()));
            map.insert("unimodular".into(), json!(is_unimodular(&p).map_err(at(file))?));
            done(true, map)
        }
        Command::Derivations { file } => {
            let p = load_algebra(file)?;
            let basis = derivation_algebra(&p).map_err(at(file))?;
            let direct = derivation_algebra_direct(&p).map_err(at(file))?;
            let dim = span_dimension(&basis);
            let agree = dim == span_dimension(&direct) && span_dimension(&[basis.clone(), direct].concat()) == dim;
            let mut map = serde_json::Map::new();
            map.insert("dimension".into(), json!(dim));
            map.insert("routes_agree".into(), json!(agree));
            map.insert("basis".into(), basis.iter().map(|d| matrix(d.matrix())).collect());
            done(agree, map)
        }
        Command::Synthesize { kind, n, lambda, rank, index, random_basis: shuffle } => {
            let need_lambda = || -> CliResult<Rational> {
                rationals(lambda.as_deref().ok_or("--lambda is required for this kind")?).and_then(|v| match v[..] {
                    [ref l] => Ok(l.clone()),
                    _ => Err("--lambda takes one value".into()),
                })
            };
            let label = match kind {
                Kind::Unimodular => BianchiLabel::Unimodular {
                    rank: rank.ok_or("--rank is required for the unimodular kind")?,
                    index: index.ok_or("--index is required for the unimodular kind")?,
                },
                Kind::Plus => BianchiLabel::lambda_plus(&need_lambda()?),
                Kind::Minus => BianchiLabel::lambda_minus(&need_lambda()?),
                Kind::PsiOne => BianchiLabel::PsiOne,
                Kind::PsiZero => BianchiLabel::PsiZero,
            };
            let mut p = synthesize(&label, *n).map_err(|e| e.to_string())?;
            if *shuffle {
                p = p.change_basis(&random_basis(p.dim(), cli.seed)).map_err(|e| e.to_string())?;
            }
            let value = nlie_to_value(&p);
            Ok(Outcome { ok: true, raw: Some(format!("{}\n", nambu::io::to_pretty(&value))), report: value })
        }
        Command::Compat { first, second } => compat(first, second),
        Command::Hereditary { file, us } => {
            let p = load_algebra(file)?;
            let vs = us.iter().map(|u| rationals(u)).collect::<CliResult<Vec<_>>>()?;
            if let Some(bad) = vs.iter().find(|v| v.len() != p.dim()) {
                return Err(format!("--u: expected {} coordinates, got {}", p.dim(), bad.len()));
            }
            let q = p.hereditary(&vs).map_err(at(file))?;
            let v = q.check_n_jacobi();
            let mut map = verdict(v.holds, v.witness.as_ref().map(one_based));
            map.insert("algebra".into(), nlie_to_value(&q));
            done(v.holds, map)
        }
        Command::Integrate { system, builtin, x0, h, steps, b, mu, mass, k } => {
            let (sys, default_x0) = match (system, builtin) {
                (Some(path), _) => {
                    let sys = nambu::io::system_from_str(&read(path)?).map_err(at(path))?;
                    (sys, None)
                }
                (None, Some(Builtin::Spin)) => {
                    let b = rationals(b)?;
                    let b: [Rational; 3] = b.try_into().map_err(|_| "--B takes three components".to_string())?;
                    let mu = parse_rational(mu).map_err(|e| e.to_string())?;
                    let sys = SpinSystem::standard(b, mu).nambu_system().map_err(|e| e.to_string())?;
                    (sys, Some(vec![1.0, 0.0, 0.0]))
                }
                (None, Some(Builtin::Kepler)) => {
                    let mass = parse_rational(mass).map_err(|e| e.to_string())?;
                    let k = parse_rational(k).map_err(|e| e.to_string())?;
                    let sys = kepler_action_angle(&mass, &k).map_err(|e| e.to_string())?;
                    (sys, Some(vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]))
                }
                (None, None) => return Err("one of --system or --builtin is required".into()),
            };
            let x0 = match (x0, default_x0) {
                (Some(text), _) => floats(text)?,
                (None, Some(d)) => d,
                (None, None) => return Err("--x0 is required with --system".into()),
            };
            integrate(&sys, &x0, *h, *steps, cli.tolerance)
        }
        Command::WittDemo => {
            let report = witt_embedding_check().map_err(|e| e.to_string())?;
            let mut map = verdict(report.passed(), None);
            map.insert("brackets".into(), polys(&report.brackets));
            map.insert("expected".into(), polys(&report.expected));
            map.insert("schouten_self_zero".into(), json!(report.schouten_self_zero));
            done(report.passed(), map)
        }
    }
}

fn compat(first: &Path, second: &Path) -> CliResult<Outcome> {
    let (a, b) = (read(first)?, read(second)?);
    let is_algebra = |text: &str, path: &Path| -> CliResult<bool> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))?;
        Ok(v.get("arity").is_some())
    };
    if is_algebra(&a, first)? != is_algebra(&b, second)? {
        return Err("both inputs must be algebras or both multivectors".into());
    }
    if is_algebra(&a, first)? {
        let p = nlie_from_str(&a).map_err(at(first))?;
        let q = nlie_from_str(&b).map_err(at(second))?;
        let v = NLieStructure::compat(&p, &q).map_err(|e| e.to_string())?;
        done(v.holds, verdict(v.holds, v.witness.as_ref().map(one_based)))
    } else {
        let p = multivector_from_str(&a).map_err(at(first))?;
        let q = multivector_from_str(&b).map_err(at(second))?;
        let v = poisson_compat(&p, &q).map_err(|e| e.to_string())?;
        done(v.holds, verdict(v.holds, v.witness.as_deref().map(polys)))
    }
}

/// Holds when the run finishes and every first integral stays within the
/// tolerance; otherwise the witness names the failure.
fn integrate(sys: &NambuSystem, x0: &[f64], h: f64, steps: usize, tolerance: f64) -> CliResult<Outcome> {
    if !(h.is_finite() && h > 0.0) {
        return Err(format!("--h must be positive, got {h}"));
    }
    let traj: Trajectory = integrate_system(sys, x0, h, steps).map_err(|e| e.to_string())?;
    let worst = traj
        .max_drift
        .iter()
        .enumerate()
        .find(|(_, d)| !(**d <= tolerance))
        .map(|(i, d)| json!({ "monitor": i + 1, "drift": d }));
    let witness = match &traj.error {
        Some(e) => Some(json!({ "stopped": e, "t": traj.times.last() })),
        None => worst,
    };
    let ok = witness.is_none();
    let mut map = verdict(ok, witness);
    map.insert("steps".into(), json!(traj.times.len().saturating_sub(1)));
    map.insert("final_state".into(), json!(traj.last()));
    map.insert("max_drift".into(), json!(traj.max_drift));
    if !ok {
        eprintln!("first-integral check failed: {}", map["witness"]);
    }
    Ok(Outcome { ok, report: Value::Object(map), raw: Some(traj.to_csv()) })
}
