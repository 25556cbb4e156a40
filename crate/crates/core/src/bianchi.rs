//! Classification of `(n+1)`-dimensional n-Lie algebras through their
//! generating bilinear forms.
//!
//! The dual tensor of such an algebra is `T = α⌋V`, where `V = ∂_1∧…∧∂_{n+1}`
//! and the 1-form is inserted into the last slot. The linear form
//! `α = Σ a_ij x_j dx_i` is recorded as the matrix `‖a_ij‖`. With this
//! orientation `[e1,e2,e3] = e4` has `a_44 = +1` and the vector-product
//! algebra has the identity matrix.
//!
//! A basis change `G` acts as `A ↦ det(G)⁻¹ GᵀAG`. Since the scalar can be
//! absorbed by rescaling one basis vector outside the relevant block, labels
//! only see `A` up to congruence and a nonzero factor.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::multivec::MultiVector;
use crate::nlie::{LinearOperator, NLieStructure};
use crate::npoisson::{algebra_from_dual, dual_nvector};
use crate::poly::{format_rational, int, rat, Poly, Rational};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GeneratingForm {
    matrix: RatMatrix,
}

impl GeneratingForm {
    pub fn new(matrix: RatMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() < 2 {
            return Err(Error::DimMismatch { expected: matrix.rows(), got: matrix.cols() });
        }
        Ok(GeneratingForm { matrix })
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_symmetric(&self) -> bool {
        self.matrix.is_symmetric()
    }

    pub fn symmetric_part(&self) -> RatMatrix {
        self.matrix.add(&self.matrix.transpose()).expect("square").scale(&rat(1, 2))
    }

    pub fn skew_part(&self) -> RatMatrix {
        self.matrix.sub(&self.matrix.transpose()).expect("square").scale(&rat(1, 2))
    }

    /// The 1-form `α_i = Σ_j a_ij x_j` on the dual space.
    pub fn alpha(&self) -> Vec<Poly> {
        let m = self.dim();
        (0..m)
            .map(|i| {
                (0..m).fold(Poly::zero(m), |acc, j| &acc + &Poly::var(m, j).scale(&self.matrix[(i, j)]))
            })
            .collect()
    }
}

/// Isomorphism class of an `(n+1)`-dimensional n-Lie algebra. The
/// non-unimodular invariant is stored as `λ²`, which is always rational.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum BianchiLabel {
    Unimodular { rank: usize, index: usize },
    PsiLambdaPlus {
        #[serde(serialize_with = "ser_rational")]
        lambda_sq: Rational,
    },
    PsiLambdaMinus {
        #[serde(serialize_with = "ser_rational")]
        lambda_sq: Rational,
    },
    PsiOne,
    PsiZero,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Exact square root of a non-negative rational, if it has one.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

impl BianchiLabel {
    pub fn lambda_plus(lambda: &Rational) -> Self {
        BianchiLabel::PsiLambdaPlus { lambda_sq: lambda * lambda }
    }

    pub fn lambda_minus(lambda: &Rational) -> Self {
        BianchiLabel::PsiLambdaMinus { lambda_sq: lambda * lambda }
    }

    /// `λ` as a float (exact square roots are taken exactly first).
    pub fn lambda_f64(&self) -> Option<f64> {
        match self {
            BianchiLabel::PsiLambdaPlus { lambda_sq } | BianchiLabel::PsiLambdaMinus { lambda_sq } => Some(
                rational_sqrt(lambda_sq)
                    .map(|l| crate::poly::rational_to_f64(&l))
                    .unwrap_or_else(|| crate::poly::rational_to_f64(lambda_sq).sqrt()),
            ),
            _ => None,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            BianchiLabel::Unimodular { rank, index } => {
                if *rank > n + 1 || *index > *rank || 2 * index < *rank {
                    return Err(Error::Precondition(format!(
                        "Unimodular label needs r ≤ n+1 and ⌈r/2⌉ ≤ m ≤ r, got r = {rank}, m = {index}"
                    )));
                }
            }
            BianchiLabel::PsiLambdaPlus { lambda_sq } | BianchiLabel::PsiLambdaMinus { lambda_sq } => {
                if !lambda_sq.is_positive() {
                    return Err(Error::Precondition("λ must be positive".into()));
                }
            }
            BianchiLabel::PsiOne | BianchiLabel::PsiZero => {}
        }
        if n < 1 {
            return Err(Error::Precondition("arity must be at least 1".into()));
        }
        Ok(())
    }
}

impl fmt::Display for BianchiLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lam = |sq: &Rational| match rational_sqrt(sq) {
            Some(l) => format_rational(&l),
            None => format!("sqrt({})", format_rational(sq)),
        };
        match self {
            BianchiLabel::Unimodular { rank, index } => write!(f, "Unimodular{{r={rank}, m={index}}}"),
            BianchiLabel::PsiLambdaPlus { lambda_sq } => write!(f, "PsiLambdaPlus{{lambda={}}}", lam(lambda_sq)),
            BianchiLabel::PsiLambdaMinus { lambda_sq } => write!(f, "PsiLambdaMinus{{lambda={}}}", lam(lambda_sq)),
            BianchiLabel::PsiOne => write!(f, "PsiOne"),
            BianchiLabel::PsiZero => write!(f, "PsiZero"),
        }
    }
}

fn check_shape(p: &NLieStructure) -> Result<()> {
    if p.dim() != p.arity() + 1 {
        return Err(Error::DimMismatch { expected: p.arity() + 1, got: p.dim() });
    }
    Ok(())
}

/// `a_ij` with `α_i = (−1)^{n−i} T^{(all but i)}` (0-based `i`).
pub fn generating_form(p: &NLieStructure) -> Result<GeneratingForm> {
    check_shape(p)?;
    let n = p.arity();
    let dim = n + 1;
    let t = dual_nvector(p);
    let mut a = RatMatrix::zeros(dim, dim);
    for i in 0..dim {
        let comp: Vec<usize> = (0..dim).filter(|&j| j != i).collect();
        let coef = t.get(&comp);
        let sign = if (n - i) % 2 == 1 { -Rational::one() } else { Rational::one() };
        for j in 0..dim {
            let mut e = vec![0; dim];
            e[j] = 1;
            a[(i, j)] = &sign * &coef.coefficient(&e);
        }
    }
    GeneratingForm::new(a)
}

/// The algebra whose dual tensor is `α⌋(∂_1∧…∧∂_{n+1})`.
pub fn algebra_from_form(form: &GeneratingForm) -> Result<NLieStructure> {
    let dim = form.dim();
    let t = MultiVector::volume(dim).contract_form_last(&form.alpha())?;
    algebra_from_dual(&t)
}

pub fn is_unimodular(p: &NLieStructure) -> Result<bool> {
    Ok(generating_form(p)?.is_symmetric())
}

/// Label of a valid `(n+1)`-dimensional n-Lie algebra.
pub fn classify(p: &NLieStructure) -> Result<BianchiLabel> {
    check_shape(p)?;
    if !p.check_n_jacobi().holds {
        return Err(Error::Precondition("structure fails the n-ary Jacobi identity".into()));
    }
    classify_form(&generating_form(p)?)
}

/// Label read off a generating form (no Jacobi check).
pub fn classify_form(form: &GeneratingForm) -> Result<BianchiLabel> {
    let a = form.matrix();
    if a.is_symmetric() {
        let (pos, neg) = a.signature()?;
        return Ok(BianchiLabel::Unimodular { rank: pos + neg, index: pos.max(neg) });
    }
    let s = form.symmetric_part();
    let k = form.skew_part();
    if k.rank() != 2 {
        return Err(Error::Inconsistent(format!("skew part has rank {}, expected 2", k.rank())));
    }
    let (_, pivots) = k.rref();
    let plane = RatMatrix::from_cols(a.rows(), &[k.col(pivots[0]), k.col(pivots[1])]);
    // col(S) ⊆ col(K) is α∧dα = 0 for a linear α
    let joined = RatMatrix::from_cols(a.rows(), &[plane.col(0), plane.col(1)]);
    for j in 0..s.cols() {
        let with = RatMatrix::from_cols(a.rows(), &[plane.col(0), plane.col(1), s.col(j)]);
        if with.rank() > joined.rank() {
            return Err(Error::Inconsistent("symmetric part leaves the plane of the skew part".into()));
        }
    }
    let restrict = |m: &RatMatrix| plane.transpose().mul(m).and_then(|x| x.mul(&plane)).expect("shapes");
    let s2 = restrict(&s);
    let k2 = restrict(&k);
    let det_s = s2.det()?;
    let det_k = k2.det()?;
    debug_assert!(det_k.is_positive());
    if s2.is_zero() {
        return Ok(BianchiLabel::PsiZero);
    }
    if det_s.is_zero() {
        return Ok(BianchiLabel::PsiOne);
    }
    let lambda_sq = det_s.abs() / (det_k * int(4));
    Ok(if det_s.is_positive() {
        BianchiLabel::PsiLambdaPlus { lambda_sq }
    } else {
        BianchiLabel::PsiLambdaMinus { lambda_sq }
    })
}

/// Canonical generating form of a label in dimension `n + 1`.
pub fn canonical_form(label: &BianchiLabel, n: usize) -> Result<GeneratingForm> {
    label.validate(n)?;
    let dim = n + 1;
    let mut a = RatMatrix::zeros(dim, dim);
    let skew = |a: &mut RatMatrix| {
        a[(0, 1)] = rat(-1, 2);
        a[(1, 0)] = rat(1, 2);
    };
    match label {
        BianchiLabel::Unimodular { rank, index } => {
            for i in 0..*rank {
                a[(i, i)] = if i < *index { int(1) } else { int(-1) };
            }
        }
        BianchiLabel::PsiLambdaPlus { lambda_sq } | BianchiLabel::PsiLambdaMinus { lambda_sq } => {
            let sign = if matches!(label, BianchiLabel::PsiLambdaPlus { .. }) { int(1) } else { int(-1) };
            match rational_sqrt(lambda_sq) {
                Some(l) => {
                    a[(1, 1)] = &sign * &l;
                    a[(0, 0)] = l;
                }
                // same class: (y1, y2) ↦ (t y1, y2 / t) turns diag(λ, ±λ) into diag(λ², ±1)
                None => {
                    a[(0, 0)] = lambda_sq.clone();
                    a[(1, 1)] = sign;
                }
            }
            skew(&mut a);
        }
        BianchiLabel::PsiOne => {
            a[(0, 0)] = int(1);
            skew(&mut a);
        }
        BianchiLabel::PsiZero => skew(&mut a),
    }
    GeneratingForm::new(a)
}

/// The canonical algebra carrying `label`.
pub fn synthesize(label: &BianchiLabel, n: usize) -> Result<NLieStructure> {
    algebra_from_form(&canonical_form(label, n)?)
}

/// Labels are complete invariants, and `λ²` is compared exactly.
pub fn is_isomorphic(p: &NLieStructure, q: &NLieStructure) -> Result<bool> {
    if p.dim() != q.dim() || p.arity() != q.arity() {
        return Ok(false);
    }
    Ok(classify(p)? == classify(q)?)
}

/// The linear vector field `X = Σ_i (D e_i)_j x_j ∂_i` on the dual space that
/// corresponds to an operator `D`; its matrix is `Dᵀ`.
pub fn vector_field_of(d: &LinearOperator) -> MultiVector {
    let m = d.dim();
    let mt = d.matrix().transpose();
    let comps = (0..m).map(|i| {
        let coef = (0..m).fold(Poly::zero(m), |acc, j| &acc + &Poly::var(m, j).scale(&mt[(i, j)]));
        (vec![i], coef)
    });
    MultiVector::from_components(m, 1, comps).expect("valid field")
}

/// Operator whose linear vector field has matrix `m` (`X^i = Σ_j m_ij x_j`).
pub fn operator_of_field_matrix(m: &RatMatrix) -> LinearOperator {
    LinearOperator::new(m.transpose()).expect("square")
}

/// Derivations as infinitesimal conformal symmetries of the generating form:
/// the field matrices `M` with `MᵀB + BM = tr(M)B`, returned as operators.
pub fn derivation_algebra(p: &NLieStructure) -> Result<Vec<LinearOperator>> {
    let b = generating_form(p)?.matrix().clone();
    let n = b.rows();
    let unknown = |i: usize, j: usize| i * n + j;
    let mut sys = RatMatrix::zeros(n * n, n * n);
    for pr in 0..n {
        for q in 0..n {
            let row = pr * n + q;
            for k in 0..n {
                // (MᵀB)_pq = Σ_k M_kp B_kq
                sys[(row, unknown(k, pr))] += &b[(k, q)];
                // (BM)_pq = Σ_k B_pk M_kq
                sys[(row, unknown(k, q))] += &b[(pr, k)];
                // −tr(M) B_pq
                sys[(row, unknown(k, k))] -= &b[(pr, q)];
            }
        }
    }
    Ok(sys
        .nullspace()
        .into_iter()
        .map(|v| {
            let rows: Vec<Vec<Rational>> = v.chunks(n).map(<[Rational]>::to_vec).collect();
            operator_of_field_matrix(&RatMatrix::from_rows(rows).expect("square"))
        })
        .collect())
}

/// Derivations straight from `D[e_I] = Σ[…, D e_i, …]` on basis tuples; valid
/// for any dimension.
pub fn derivation_algebra_direct(p: &NLieStructure) -> Result<Vec<LinearOperator>> {
    let n = p.dim();
    let tuples = crate::combinatorics::increasing_tuples(n, p.arity());
    let mut cols = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let mut e = RatMatrix::zeros(n, n);
            e[(a, b)] = Rational::one();
            let d = LinearOperator::new(e)?;
            let col: Vec<Rational> =
                tuples.iter().flat_map(|w| NLieStructure::derivative_at(&d, p, w)).collect();
            cols.push(col);
        }
    }
    let rows = cols.first().map_or(0, Vec::len);
    if rows == 0 {
        return Ok((0..n * n).map(|k| unit_operator(n, k)).collect());
    }
    let sys = RatMatrix::from_cols(rows, &cols);
    Ok(sys
        .nullspace()
        .into_iter()
        .map(|v| {
            let rows: Vec<Vec<Rational>> = v.chunks(n).map(<[Rational]>::to_vec).collect();
            LinearOperator::new(RatMatrix::from_rows(rows).expect("square")).expect("square")
        })
        .collect())
}

fn unit_operator(n: usize, k: usize) -> LinearOperator {
    let mut e = RatMatrix::zeros(n, n);
    e[(k / n, k % n)] = Rational::one();
    LinearOperator::new(e).expect("square")
}

/// Dimension of the span of a list of operators.
pub fn span_dimension(ops: &[LinearOperator]) -> usize {
    if ops.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<Rational>> = ops.iter().map(|o| o.matrix().to_rows().concat()).collect();
    RatMatrix::from_rows(rows).expect("equal sizes").rank()
}

/// `true` if `op` lies in the span of `basis`.
pub fn in_span(op: &LinearOperator, basis: &[LinearOperator]) -> bool {
    let mut all = basis.to_vec();
    all.push(op.clone());
    span_dimension(&all) == span_dimension(basis)
}

/// Pieces of the generating form: rank-one symmetric parts from congruence
/// diagonalization plus the skew part. Each piece generates an algebra, and
/// their sum is the original one.
pub fn atomic_decomposition(p: &NLieStructure) -> Result<Vec<NLieStructure>> {
    let form = generating_form(p)?;
    let s = form.symmetric_part();
    let k = form.skew_part();
    let (pm, d) = s.congruence_diagonalize()?;
    let pinv = pm.inverse()?;
    let n = s.rows();
    let mut pieces = Vec::new();
    for (idx, dk) in d.iter().enumerate() {
        if dk.is_zero() {
            continue;
        }
        // S = Σ d_k r_k r_kᵀ with r_k the k-th row of P⁻¹
        let r = pinv.row(idx);
        let mut piece = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                piece[(i, j)] = dk * &r[i] * &r[j];
            }
        }
        pieces.push(algebra_from_form(&GeneratingForm::new(piece)?)?);
    }
    if !k.is_zero() {
        pieces.push(algebra_from_form(&GeneratingForm::new(k)?)?);
    }
    Ok(pieces)
}

/// Result of the Witt-algebra embedding check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittReport {
    /// `{x1,x2}`, `{x1,x3}`, `{x2,x3}`
    pub brackets: [Poly; 3],
    pub expected: [Poly; 3],
    pub schouten_self_zero: bool,
}

impl WittReport {
    pub fn passed(&self) -> bool {
        self.brackets == self.expected && self.schouten_self_zero
    }
}

/// Builds `P_F = dF⌋(∂1∧∂2∧∂3)` with `F = x1x3 − x2²`, and checks the
/// brackets `{x1,x2} = x1`, `{x1,x3} = 2x2`, `{x2,x3} = x3` and `⌈P_F,P_F⌋ = 0`.
pub fn witt_embedding_check() -> Result<WittReport> {
    let m = 3;
    let x = |i: usize| Poly::var(m, i);
    let f = &(&x(0) * &x(2)) - &x(1).pow(2);
    let pf = MultiVector::volume(m).contract(&f)?;
    let brackets = [pf.apply(&[x(0), x(1)])?, pf.apply(&[x(0), x(2)])?, pf.apply(&[x(1), x(2)])?];
    let expected = [x(0), x(1).scale(&int(2)), x(2)];
    let schouten_self_zero = MultiVector::schouten(&pf, &pf)?.is_zero();
    Ok(WittReport { brackets, expected, schouten_self_zero })
}
