//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use nambu::bianchi::{self, BianchiLabel};
use nambu::dynamics::{self, SpinSystem};
use nambu::linalg::unit_vector;
use nambu::nlie::NLieStructure;
use nambu::njacobi::JacobiOp;
use nambu::npoisson::{dual_nvector, is_n_poisson};
use nambu::{int, rat, MultiVector, OneForm, Poly, RatMatrix};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1_vector_product_jacobi() -> Outcome {
    for n in 2..=4 {
        let p = NLieStructure::vector_product_algebra(n).map_err(|e| e.to_string())?;
        ensure(p.check_n_jacobi().holds, format!("n = {n} fails check_n_jacobi"))?;
        ensure(raw_nlie_witness(&p).is_none(), format!("n = {n} fails the raw identity"))?;
    }
    Ok("vector-product algebras n = 2, 3, 4 satisfy the n-ary Jacobi identity".into())
}

fn c2_decomposable_poisson() -> Outcome {
    let mut r = rng(2);
    for k in 0..50 {
        let m = if k % 2 == 0 { 4 } else { 5 };
        let t = if m == 4 {
            hamiltonian_type_tensor(&rand_poly(&mut r, 4, 1, 2), &[rand_poly(&mut r, 4, 2, 3)])
        } else {
            let hs = rand_polys(&mut r, 5, 2, 2);
            hamiltonian_type_tensor(&rand_poly(&mut r, 5, 1, 2), &hs)
        };
        if t.is_zero() {
            continue;
        }
        ensure(t.is_decomposable(), format!("instance {k} not decomposable"))?;
        let v = is_n_poisson(&t);
        ensure(v.holds, format!("instance {k} (m = {m}) fails is_n_poisson, witness {:?}", v.witness))?;
    }
    let sum = MultiVector::blade(6, &[0, 1, 2]).checked_add(&MultiVector::blade(6, &[3, 4, 5])).unwrap();
    let v = is_n_poisson(&sum);
    let w = v.witness.ok_or("sum of blades has no witness")?;
    ensure(!v.holds && w.iter().all(|p| p.num_terms() == 1), "witness is not a monomial tuple")?;
    ensure(raw_fi_witness(&sum).is_some(), "raw fundamental identity does not fail on the sum of blades")?;
    let shown: Vec<String> = w.iter().map(ToString::to_string).collect();
    Ok(format!("50 decomposable cubic 3-vectors are Poisson; ∂123+∂456 fails with witness ({})", shown.join(", ")))
}

fn c3_dual_tensors() -> Outcome {
    let mut r = rng(3);
    for k in 0..20 {
        let p = rand_bianchi_algebra(&mut r, 3);
        ensure(p.check_n_jacobi().holds, format!("instance {k} is not a 3-Lie algebra"))?;
        let t = dual_nvector(&p);
        ensure(is_n_poisson(&t).holds, format!("dual of instance {k} fails is_n_poisson"))?;
        if k < 2 {
            ensure(raw_fi_witness(&t).is_none(), format!("raw identity rejects dual of instance {k}"))?;
        }
    }
    let atomic = nambu::io::nlie_from_str(include_str!("../../../data/atomic4.json")).unwrap();
    let prod = NLieStructure::direct_product(&atomic, &NLieStructure::vector_product_algebra(3).unwrap()).unwrap();
    ensure(prod.check_n_jacobi().holds, "direct product is not a 3-Lie algebra")?;
    let v = is_n_poisson(&dual_nvector(&prod));
    ensure(!v.holds && v.witness.is_some(), "dual of the direct product passed")?;
    Ok("20 random 4-dim 3-Lie duals are 3-Poisson; the 8-dim direct product's dual is not".into())
}

fn c4_s_complex() -> Outcome {
    let mut r = rng(4);
    for k in 0..100 {
        let m = r.gen_range(2..=4);
        let n = r.gen_range(2..=m);
        let op = JacobiOp::new(rand_multivector(&mut r, m, n, 2, 2), rand_multivector(&mut r, m, n - 1, 2, 2)).unwrap();
        let delta: Op = Box::new(|fs: &[Poly]| eval_pair(op.nabla(), op.boxv(), fs));
        // pair level
        ensure(op.s_op().s_op().is_zero(), format!("s² ≠ 0 on pair {k}"))?;
        let i_s = op.s_op().insert_unity_op().unwrap();
        let s_i = op.insert_unity_op().unwrap().s_op();
        ensure(i_s.checked_add(&s_i).unwrap() == op, format!("homotopy fails on pair {k}"))?;
        // functional level
        let fs = rand_polys(&mut r, m, n + 2, 2);
        let ss = s_fun(s_fun(Box::new(|x: &[Poly]| eval_pair(op.nabla(), op.boxv(), x))));
        ensure(ss(&fs).is_zero(), format!("functional s² ≠ 0 on instance {k}"))?;
        let s_delta = s_fun(Box::new(|x: &[Poly]| eval_pair(op.nabla(), op.boxv(), x)));
        let sp = op.s_op();
        ensure(
            s_delta(&fs[..n + 1]) == eval_pair(sp.nabla(), sp.boxv(), &fs[..n + 1]),
            format!("s_op disagrees with the functional s on instance {k}"),
        )?;
        let lhs = unity_fun(s_fun(Box::new(|x: &[Poly]| eval_pair(op.nabla(), op.boxv(), x))));
        let rhs = s_fun(unity_fun(Box::new(|x: &[Poly]| eval_pair(op.nabla(), op.boxv(), x))));
        let args = &fs[..n];
        ensure(&lhs(args) + &rhs(args) == delta(args), format!("functional homotopy fails on instance {k}"))?;
    }
    Ok("s² = 0 and i∘s + s∘i = id on 100 random operators, pairwise and functionally".into())
}

fn c5_jacobi_chain() -> Outcome {
    let mut r = rng(5);
    let started = Instant::now();
    for k in 0..20 {
        let m = if k % 4 == 3 { 4 } else { 3 };
        let nabla = if m == 3 {
            MultiVector::volume(3).mul_poly(&rand_poly(&mut r, 3, 1, 2)).unwrap()
        } else {
            hamiltonian_type_tensor(&Poly::constant(4, rand_nonzero_rat(&mut r)), &[rand_poly(&mut r, 4, 2, 2)])
        };
        if nabla.is_zero() {
            continue;
        }
        let h = rand_poly(&mut r, m, 2, 3);
        let op = JacobiOp::from_poisson_and_form(&nabla, &OneForm::exact(&h)).map_err(|e| e.to_string())?;
        ensure(op.boxv() == &nabla.contract(&h).unwrap(), "box is not ∇_h")?;
        let v = op.is_n_jacobi();
        ensure(v.holds, format!("instance {k} fails is_n_jacobi, witness {:?}", v.witness))?;
        ensure(is_n_poisson(op.boxv()).holds, format!("instance {k}: box is not Poisson"))?;
        ensure(op.nabla().is_decomposable(), format!("instance {k}: nabla not decomposable"))?;
        ensure(is_n_poisson(op.nabla()).holds, format!("instance {k}: nabla not Poisson"))?;
        for (_, dv) in op.boxv().derived_vectors().unwrap() {
            ensure(dv.wedge(op.nabla()).unwrap().is_zero(), format!("instance {k}: derived vector of box leaves ∇"))?;
        }
        let fs = rand_polys(&mut r, m, 2, 2);
        let x = op.nabla().hamiltonian_field(&fs).unwrap();
        let lhs = MultiVector::lie_derivative(&x, op.boxv()).unwrap();
        let hh = op.boxv().apply(&fs).unwrap();
        ensure(lhs == op.nabla().contract(&hh).unwrap(), format!("instance {k}: ∇_f(□) ≠ ∇_h"))?;
        let raw = raw_jacobi_witness(&|gs: &[Poly]| eval_pair(op.nabla(), op.boxv(), gs), 3, &slot_basis(m));
        ensure(raw.is_none(), format!("instance {k}: raw oracle disagrees"))?;
    }
    // and a negative instance on which both routes must reject
    let bad = JacobiOp::new(MultiVector::blade(4, &[0, 1, 2]).mul_poly(&Poly::var(4, 3)).unwrap(), MultiVector::blade(4, &[0, 3])).unwrap();
    let raw = raw_jacobi_witness(&|gs: &[Poly]| eval_pair(bad.nabla(), bad.boxv(), gs), 3, &slot_basis(4));
    ensure(!bad.is_n_jacobi().holds && raw.is_some(), "negative instance not rejected by both routes")?;
    Ok(format!("20 operators ∇ + s(∇_h) are Jacobi with all corollaries; raw oracle agrees ({:.1}s)", started.elapsed().as_secs_f64()))
}

fn c6_classification() -> Outcome {
    let mut r = rng(6);
    let n = 3;
    let mut labels = Vec::new();
    for rank in 0..=n + 1 {
        for index in (rank + 1) / 2..=rank {
            labels.push(BianchiLabel::Unimodular { rank, index });
        }
    }
    for l in [rat(1, 2), int(1), int(2), rat(7, 3)] {
        labels.push(BianchiLabel::lambda_plus(&l));
        labels.push(BianchiLabel::lambda_minus(&l));
    }
    labels.push(BianchiLabel::PsiOne);
    labels.push(BianchiLabel::PsiZero);
    for label in &labels {
        let p = bianchi::synthesize(label, n).unwrap();
        let got = bianchi::classify(&p).map_err(|e| e.to_string())?;
        ensure(&got == label, format!("classify(synthesize({label})) = {got}"))?;
        for _ in 0..30 {
            let q = p.change_basis(&rand_invertible(&mut r, n + 1)).unwrap();
            let got = bianchi::classify(&q).map_err(|e| e.to_string())?;
            ensure(&got == label, format!("{label} changed to {got} under a basis change"))?;
        }
    }
    let atomic = nambu::io::nlie_from_str(include_str!("../../../data/atomic4.json")).unwrap();
    let got = bianchi::classify(&atomic).unwrap();
    ensure(got == BianchiLabel::Unimodular { rank: 1, index: 1 }, format!("atomic example labelled {got}"))?;
    Ok(format!("{} labels round-trip and survive 30 basis changes each; [e1,e2,e3]=e4 is {got}", labels.len()))
}

fn c7_derivations() -> Outcome {
    let p = nambu::io::nlie_from_str(include_str!("../../../data/atomic4.json")).unwrap();
    let ders = bianchi::derivation_algebra(&p).unwrap();
    let direct = bianchi::derivation_algebra_direct(&p).unwrap();
    ensure(bianchi::span_dimension(&ders) == bianchi::span_dimension(&direct), "the form equation and the direct system disagree")?;
    let field = |entries: &[(usize, usize, i64)]| {
        let mut m = RatMatrix::zeros(4, 4);
        for &(i, j, v) in entries {
            m[(i, j)] = int(v);
        }
        bianchi::operator_of_field_matrix(&m)
    };
    let listed = [
        field(&[(0, 3, 1)]),
        field(&[(1, 3, 1)]),
        field(&[(2, 3, 1)]),
        field(&[(3, 3, 1), (0, 0, 1)]),
        field(&[(3, 3, 1), (1, 1, 1)]),
        field(&[(3, 3, 1), (2, 2, 1)]),
        field(&[(0, 0, 1), (1, 1, -1)]),
        field(&[(1, 1, 1), (2, 2, -1)]),
        field(&[(2, 2, 1), (0, 0, -1)]),
    ];
    for (k, d) in listed.iter().enumerate() {
        ensure(bianchi::in_span(d, &ders), format!("listed derivation {k} missing"))?;
        ensure(p.is_derivation(d).unwrap(), format!("listed derivation {k} is not a derivation"))?;
    }
    let e = |i| unit_vector(4, i);
    for (k, (a, b)) in [(1, 2), (0, 2), (0, 1)].into_iter().enumerate() {
        let inner = p.inner_derivation(&[e(a), e(b)]).unwrap();
        ensure(bianchi::in_span(&inner, &listed[..3]), format!("inner derivation {k} not among x4∂i"))?;
    }
    let mut dims = Vec::new();
    for n in 2..=4 {
        let vp = NLieStructure::vector_product_algebra(n).unwrap();
        let d = bianchi::derivation_algebra(&vp).unwrap();
        ensure(d.len() == n * (n + 1) / 2, format!("vector product n = {n} has {} derivations", d.len()))?;
        ensure(d.len() == bianchi::derivation_algebra_direct(&vp).unwrap().len(), "direct count differs")?;
        dims.push(d.len());
    }
    Ok(format!("atomic example: {}-dim derivation algebra holds all 9 listed fields; vector products give {:?}", ders.len(), dims))
}

fn c8_witt() -> Outcome {
    let rep = bianchi::witt_embedding_check().unwrap();
    ensure(rep.brackets == rep.expected, format!("brackets {:?}", rep.brackets.iter().map(ToString::to_string).collect::<Vec<_>>()))?;
    ensure(rep.schouten_self_zero, "schouten self-bracket nonzero")?;
    let x = |i| Poly::var(3, i);
    let f = &(&x(0) * &x(2)) - &x(1).pow(2);
    let pf = hamiltonian_type_tensor(&Poly::one(3), &[f]);
    ensure(eval_mv(&pf, &[x(0), x(2)]) == x(1).scale(&int(2)), "independent evaluation disagrees")?;
    Ok("{x1,x2}=x1, {x1,x3}=2x2, {x2,x3}=x3 and [P_F,P_F]=0".into())
}

fn c9_dynamics() -> Outcome {
    let spin = SpinSystem::standard([int(0), int(0), int(1)], int(1));
    let sys = spin.nambu_system().unwrap();
    let s0 = [1.0, 0.0, 0.0];
    let traj = dynamics::rk4_integrate(
        &dynamics::dynamics_field(&sys).unwrap(),
        &s0,
        1e-3,
        10_000,
        &[spin.big_f.clone(), spin.s_dot_b()],
    )
    .unwrap();
    ensure(traj.error.is_none(), "spin integration aborted")?;
    ensure(traj.max_drift.iter().all(|d| *d < 1e-9), format!("spin drift {:?}", traj.max_drift))?;
    let t_end = *traj.times.last().unwrap();
    let err = dynamics::max_abs_diff(traj.last(), &spin.closed_form(s0, t_end));
    ensure(err < 1e-6, format!("endpoint error {err:e}"))?;
    let endpoint_error = |h: f64, steps: usize| {
        let tr = dynamics::integrate_system(&sys, &s0, h, steps).unwrap();
        dynamics::max_abs_diff(tr.last(), &spin.closed_form(s0, h * steps as f64))
    };
    let factor = endpoint_error(0.1, 100) / endpoint_error(0.05, 200);
    ensure((12.0..=20.0).contains(&factor), format!("order factor {factor}"))?;
    let kepler = dynamics::kepler_action_angle(&int(1), &int(1)).unwrap();
    let tr = dynamics::integrate_system(&kepler, &[1.0, 1.0, 1.0, 0.1, 0.2, 0.3], 1e-2, 1000).unwrap();
    ensure(tr.error.is_none(), "kepler integration aborted")?;
    let kd = tr.max_drift.iter().copied().fold(0.0, f64::max);
    ensure(kd < 1e-8, format!("kepler drift {kd:e}"))?;
    Ok(format!("spin drift {:.1e}, endpoint error {err:.1e}, order factor {factor:.2}; kepler drift {kd:.1e}", traj.max_drift.iter().copied().fold(0.0, f64::max)))
}

fn c10_compat() -> Outcome {
    let mut r = rng(10);
    for n in 3..=4 {
        let p = NLieStructure::vector_product_algebra(n).unwrap();
        for k in 1..=3 {
            for _ in 0..3 {
                let vs: Vec<_> = (0..k).map(|_| rand_vector(&mut r, n + 1)).collect();
                let ws: Vec<_> = (0..k).map(|_| rand_vector(&mut r, n + 1)).collect();
                ensure(p.comp_condition_k(&vs, &ws).map_err(|e| e.to_string())?, format!("C fails, n = {n}, k = {k}"))?;
            }
        }
    }
    let p5 = NLieStructure::vector_product_algebra(5).unwrap();
    let vs: Vec<_> = (0..3).map(|_| rand_vector(&mut r, 6)).collect();
    let ws: Vec<_> = (0..3).map(|_| rand_vector(&mut r, 6)).collect();
    ensure(p5.comp_condition_k(&vs, &ws).unwrap(), "third-order condition fails on the 5-ary vector product")?;
    let (mut yes, mut no) = (0, 0);
    for k in 0..30 {
        let p = rand_bianchi_algebra(&mut r, 3);
        let q = if k % 2 == 0 {
            // pieces of one generating form are mutually compatible
            let pieces = bianchi::atomic_decomposition(&p).unwrap();
            match pieces.first() {
                Some(piece) => piece.scale(&rand_nonzero_rat(&mut r)),
                None => p.scale(&int(2)),
            }
        } else {
            rand_bianchi_algebra(&mut r, 3)
        };
        let compat = NLieStructure::compat(&p, &q).unwrap().holds;
        let both = p.checked_add(&q).unwrap().check_n_jacobi().holds && p.checked_sub(&q).unwrap().check_n_jacobi().holds;
        ensure(compat == both, format!("pair {k}: compat = {compat}, sum/difference Jacobi = {both}"))?;
        if compat {
            yes += 1;
        } else {
            no += 1;
        }
    }
    ensure(yes > 0 && no > 0, format!("pairs not mixed: {yes} compatible, {no} not"))?;
    Ok(format!("C(v|w) = 0 for k = 1..3 on n = 3, 4 (and k = 3 on n = 5); polarization agrees on 30 pairs ({yes} compatible, {no} not)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("n-Jacobi identity for vector-product algebras", c1_vector_product_jacobi),
        ("decomposable Poisson 3-vectors and the sum-of-blades counterexample", c2_decomposable_poisson),
        ("dual tensor dichotomy", c3_dual_tensors),
        ("s-complex identities", c4_s_complex),
        ("Jacobi corollary chain with raw oracle", c5_jacobi_chain),
        ("classification round-trip and basis invariance", c6_classification),
        ("derivation algebras", c7_derivations),
        ("Witt embedding", c8_witt),
        ("Nambu dynamics integration", c9_dynamics),
        ("compatibility combinatorics", c10_compat),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
