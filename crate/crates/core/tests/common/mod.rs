//! Test-only oracles and generators. Evaluation here deliberately avoids the
//! library's contraction code: multivectors are applied through explicit
//! Jacobian determinants, and operator identities are checked functionally.
#![allow(dead_code)]

use nambu::bianchi::{synthesize, BianchiLabel};
use nambu::combinatorics::{increasing_tuples, permutations, perm_sign};
use nambu::nlie::NLieStructure;
use nambu::{int, rat, MultiVector, Poly, RatMatrix, Rational};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type Op<'a> = Box<dyn Fn(&[Poly]) -> Poly + Sync + 'a>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_rat(r: &mut impl Rng) -> Rational {
    rat(r.gen_range(-3..=3), r.gen_range(1..=3))
}

pub fn rand_nonzero_rat(r: &mut impl Rng) -> Rational {
    loop {
        let c = rand_rat(r);
        if c != int(0) {
            return c;
        }
    }
}

pub fn rand_poly(r: &mut impl Rng, m: usize, max_deg: u32, terms: usize) -> Poly {
    let mut p = Poly::zero(m);
    for _ in 0..terms {
        let mut exps = vec![0u32; m];
        let deg = r.gen_range(0..=max_deg);
        for _ in 0..deg {
            exps[r.gen_range(0..m)] += 1;
        }
        p = &p + &Poly::monomial(m, exps, rand_rat(r));
    }
    p
}

pub fn rand_multivector(r: &mut impl Rng, m: usize, k: usize, max_deg: u32, comps: usize) -> MultiVector {
    let tuples = increasing_tuples(m, k);
    let picked = (0..comps).map(|_| (tuples[r.gen_range(0..tuples.len())].clone(), rand_poly(r, m, max_deg, 2)));
    picked.fold(MultiVector::zero(m, k), |acc, (idx, p)| {
        acc.checked_add(&MultiVector::from_components(m, k, [(idx, p)]).unwrap()).unwrap()
    })
}

pub fn rand_vector(r: &mut impl Rng, dim: usize) -> Vec<Rational> {
    (0..dim).map(|_| rand_rat(r)).collect()
}

pub fn rand_invertible(r: &mut impl Rng, dim: usize) -> RatMatrix {
    loop {
        let rows = (0..dim).map(|_| (0..dim).map(|_| int(r.gen_range(-2..=2))).collect()).collect();
        let g = RatMatrix::from_rows(rows).unwrap();
        if g.det().unwrap() != int(0) {
            return g;
        }
    }
}

pub fn rand_label(r: &mut impl Rng, n: usize) -> BianchiLabel {
    let lambda = [rat(1, 2), int(1), int(2), rat(7, 3)][r.gen_range(0..4)].clone();
    match r.gen_range(0..5) {
        0 => {
            let rank = r.gen_range(1..=n + 1);
            let index = r.gen_range((rank + 1) / 2..=rank);
            BianchiLabel::Unimodular { rank, index }
        }
        1 => BianchiLabel::lambda_plus(&lambda),
        2 => BianchiLabel::lambda_minus(&lambda),
        3 => BianchiLabel::PsiOne,
        _ => BianchiLabel::PsiZero,
    }
}

/// A valid `(n+1)`-dimensional n-Lie algebra in a random basis.
pub fn rand_bianchi_algebra(r: &mut impl Rng, n: usize) -> NLieStructure {
    let label = rand_label(r, n);
    synthesize(&label, n).unwrap().change_basis(&rand_invertible(r, n + 1)).unwrap()
}

/// Determinant by permutation expansion.
pub fn det_poly(rows: &[Vec<Poly>], m: usize) -> Poly {
    let k = rows.len();
    permutations(k).into_iter().fold(Poly::zero(m), |acc, perm| {
        let term = perm.iter().enumerate().fold(Poly::one(m), |t, (i, &j)| &t * &rows[i][j]);
        if perm_sign(&perm) > 0 {
            &acc + &term
        } else {
            &acc - &term
        }
    })
}

/// `V(f_1,…,f_k) = Σ_I V^I det(∂_{i_a} f_b)`.
pub fn eval_mv(v: &MultiVector, fs: &[Poly]) -> Poly {
    let m = v.num_vars();
    assert_eq!(fs.len(), v.degree());
    if v.degree() == 0 {
        return v.get(&[]);
    }
    let grads: Vec<Vec<Poly>> = fs.iter().map(|f| (0..m).map(|i| f.partial(i).unwrap()).collect()).collect();
    v.components().fold(Poly::zero(m), |acc, (idx, coef)| {
        let rows: Vec<Vec<Poly>> = idx.iter().map(|&i| grads.iter().map(|g| g[i].clone()).collect()).collect();
        &acc + &(coef * &det_poly(&rows, m))
    })
}

/// `Δ(f) = ∇(f) + Σ_i (−1)^{i−1} f_i □(f̂_i)` from first principles.
pub fn eval_pair(nabla: &MultiVector, boxv: &MultiVector, fs: &[Poly]) -> Poly {
    let mut acc = eval_mv(nabla, fs);
    for i in 0..fs.len() {
        let rest: Vec<Poly> = fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()).collect();
        let t = &fs[i] * &eval_mv(boxv, &rest);
        acc = if i % 2 == 0 { &acc + &t } else { &acc - &t };
    }
    acc
}

/// Raw n-ary Jacobi identity
/// `Δ(f, Δ(g)) − Σ_i Δ(g_1,…,Δ(f, g_i),…,g_n)` for an operator of arity `n`.
pub fn raw_jacobi_defect(op: &(dyn Fn(&[Poly]) -> Poly + Sync), fs: &[Poly], gs: &[Poly]) -> Poly {
    let mut args = fs.to_vec();
    args.push(op(gs));
    let mut acc = op(&args);
    for i in 0..gs.len() {
        let mut inner = fs.to_vec();
        inner.push(gs[i].clone());
        let mut outer = gs.to_vec();
        outer[i] = op(&inner);
        acc = &acc - &op(&outer);
    }
    acc
}

/// Slot functions `{1, x_a, x_a x_b}`.
pub fn slot_basis(m: usize) -> Vec<Poly> {
    Poly::monomials_up_to(m, 0, 2)
}

/// Searches increasing tuples of slot functions for a nonzero raw defect.
/// Inner brackets are cached: `Δ(g)` per `g`-tuple and `Δ(f, b)` per
/// `f`-tuple and basis element.
pub fn raw_jacobi_witness(
    op: &(dyn Fn(&[Poly]) -> Poly + Sync),
    n: usize,
    basis: &[Poly],
) -> Option<(Vec<Poly>, Vec<Poly>)> {
    let f_tuples = increasing_tuples(basis.len(), n - 1);
    let g_tuples = increasing_tuples(basis.len(), n);
    let pick = |t: &[usize]| -> Vec<Poly> { t.iter().map(|&i| basis[i].clone()).collect() };
    let inner_g: Vec<Poly> = g_tuples.par_iter().map(|gt| op(&pick(gt))).collect();
    f_tuples.par_iter().find_map_first(|ft| {
        let fs = pick(ft);
        let with_f: Vec<Poly> = basis
            .iter()
            .map(|b| {
                let mut a = fs.clone();
                a.push(b.clone());
                op(&a)
            })
            .collect();
        g_tuples.iter().zip(&inner_g).find_map(|(gt, dg)| {
            let gs = pick(gt);
            let mut args = fs.clone();
            args.push(dg.clone());
            let mut acc = op(&args);
            for (i, &gi) in gt.iter().enumerate() {
                let mut outer = gs.clone();
                outer[i] = with_f[gi].clone();
                acc = &acc - &op(&outer);
            }
            (!acc.is_zero()).then(|| (fs.clone(), gs))
        })
    })
}

/// Fundamental identity of a multivector checked through its bracket.
pub fn raw_fi_witness(v: &MultiVector) -> Option<(Vec<Poly>, Vec<Poly>)> {
    let basis = Poly::monomials_up_to(v.num_vars(), 1, 2);
    raw_jacobi_witness(&|fs: &[Poly]| eval_mv(v, fs), v.degree(), &basis)
}

/// Raw n-ary Jacobi identity on basis vectors of an n-Lie algebra.
pub fn raw_nlie_witness(p: &NLieStructure) -> Option<(Vec<usize>, Vec<usize>)> {
    let d = p.dim();
    let n = p.arity();
    let e = |i: usize| nambu::linalg::unit_vector(d, i);
    let br = |vs: &[Vec<Rational>]| p.bracket(vs).unwrap();
    for u in increasing_tuples(d, n - 1) {
        for w in increasing_tuples(d, n) {
            let us: Vec<_> = u.iter().map(|&i| e(i)).collect();
            let ws: Vec<_> = w.iter().map(|&i| e(i)).collect();
            let mut lhs_args = us.clone();
            lhs_args.push(br(&ws));
            let mut total = br(&lhs_args);
            for i in 0..n {
                let mut inner = us.clone();
                inner.push(ws[i].clone());
                let mut outer = ws.clone();
                outer[i] = br(&inner);
                total = nambu::linalg::vec_sub(&total, &br(&outer));
            }
            if !nambu::linalg::vec_is_zero(&total) {
                return Some((u, w));
            }
        }
    }
    None
}

/// `s(Γ)(f_1,…,f_{k+1}) = Σ_i (−1)^{i−1} f_i Γ(f̂_i)`.
pub fn s_fun<'a>(g: Op<'a>) -> Op<'a> {
    Box::new(move |fs: &[Poly]| {
        let m = fs[0].num_vars();
        (0..fs.len()).fold(Poly::zero(m), |acc, i| {
            let rest: Vec<Poly> = fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()).collect();
            let t = &fs[i] * &g(&rest);
            if i % 2 == 0 {
                &acc + &t
            } else {
                &acc - &t
            }
        })
    })
}

/// `Γ(1, f_2,…,f_k)`.
pub fn unity_fun<'a>(g: Op<'a>) -> Op<'a> {
    Box::new(move |fs: &[Poly]| {
        let m = fs.first().map_or(0, Poly::num_vars);
        let mut args = vec![Poly::one(m)];
        args.extend_from_slice(fs);
        g(&args)
    })
}

/// `(L_X Γ)(f) = X(Γ(f)) − Σ_i Γ(…, X f_i, …)` for a vector field `X`.
pub fn lie_fun<'a>(x: &'a MultiVector, g: Op<'a>) -> Op<'a> {
    Box::new(move |fs: &[Poly]| {
        let mut acc = x.derive(&g(fs)).unwrap();
        for i in 0..fs.len() {
            let mut args = fs.to_vec();
            args[i] = x.derive(&fs[i]).unwrap();
            acc = &acc - &g(&args);
        }
        acc
    })
}

/// `(L_f Γ)(g) = f Γ(g) − Σ_i Γ(…, f g_i, …)`.
pub fn mult_lie_fun<'a>(f: &'a Poly, g: Op<'a>) -> Op<'a> {
    Box::new(move |gs: &[Poly]| {
        let mut acc = f * &g(gs);
        for i in 0..gs.len() {
            let mut args = gs.to_vec();
            args[i] = f * &gs[i];
            acc = &acc - &g(&args);
        }
        acc
    })
}

pub fn mv_op(v: &MultiVector) -> Op<'_> {
    Box::new(move |fs: &[Poly]| eval_mv(v, fs))
}

pub fn rand_polys(r: &mut impl Rng, m: usize, k: usize, max_deg: u32) -> Vec<Poly> {
    (0..k).map(|_| rand_poly(r, m, max_deg, 3)).collect()
}

/// `f · (dh_1 ∧ … ∧ dh_k)⌋∂_1∧…∧∂_m`: decomposable and Poisson for any
/// choice of polynomials.
pub fn hamiltonian_type_tensor(f: &Poly, hs: &[Poly]) -> MultiVector {
    let m = f.num_vars();
    MultiVector::volume(m).contract_all(hs).unwrap().mul_poly(f).unwrap()
}
