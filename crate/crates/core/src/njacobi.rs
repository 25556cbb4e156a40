//! First-order skew n-differential operators in canonical form
//! `Δ = ∇ + s(□)`, stored as the pair `(∇, □)`.
//!
//! `s(Γ)(f1,…,f_{k+1}) = Σ_i (−1)^{i−1} f_i Γ(f1,…,f̂_i,…,f_{k+1})`.

use rayon::prelude::*;

use crate::combinatorics::increasing_tuples;
use crate::error::{Error, Result};
use crate::multivec::{MultiVector, OneForm};
use crate::npoisson::is_n_poisson;
use crate::poly::{int, Poly};
use crate::verdict::Verdict;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct JacobiOp {
    nabla: MultiVector,
    boxv: MultiVector,
}

/// The two Jacobi defects `(Δ¹, Δ⁰)` for one tuple of functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Defects {
    pub first: MultiVector,
    pub zeroth: MultiVector,
}

impl Defects {
    pub fn is_zero(&self) -> bool {
        self.first.is_zero() && self.zeroth.is_zero()
    }
}

impl JacobiOp {
    /// `nabla` of degree `n ≥ 1`, `boxv` of degree `n − 1`.
    pub fn new(nabla: MultiVector, boxv: MultiVector) -> Result<Self> {
        if nabla.num_vars() != boxv.num_vars() {
            return Err(Error::VarCountMismatch { left: nabla.num_vars(), right: boxv.num_vars() });
        }
        if nabla.degree() == 0 || boxv.degree() + 1 != nabla.degree() {
            return Err(Error::Degree(format!(
                "degrees must be (n, n−1) with n ≥ 1, got ({}, {})",
                nabla.degree(),
                boxv.degree()
            )));
        }
        Ok(JacobiOp { nabla, boxv })
    }

    /// A pure multi-derivation `(V, 0)`.
    pub fn derivation(nabla: MultiVector) -> Result<Self> {
        let boxv = MultiVector::zero(nabla.num_vars(), nabla.degree().saturating_sub(1));
        Self::new(nabla, boxv)
    }

    pub fn zero(num_vars: usize, arity: usize) -> Self {
        JacobiOp { nabla: MultiVector::zero(num_vars, arity), boxv: MultiVector::zero(num_vars, arity - 1) }
    }

    pub fn nabla(&self) -> &MultiVector {
        &self.nabla
    }

    pub fn boxv(&self) -> &MultiVector {
        &self.boxv
    }

    pub fn arity(&self) -> usize {
        self.nabla.degree()
    }

    pub fn num_vars(&self) -> usize {
        self.nabla.num_vars()
    }

    pub fn is_zero(&self) -> bool {
        self.nabla.is_zero() && self.boxv.is_zero()
    }

    /// `Δ(f) = ∇(f) + Σ_i (−1)^{i−1} f_i □(f̂_i)`.
    pub fn apply(&self, fs: &[Poly]) -> Result<Poly> {
        let n = self.arity();
        if fs.len() != n {
            return Err(Error::ArityMismatch { expected: n, got: fs.len() });
        }
        let mut acc = self.nabla.apply(fs)?;
        if self.boxv.is_zero() {
            return Ok(acc);
        }
        for i in 0..n {
            let rest: Vec<Poly> = fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()).collect();
            let t = &fs[i] * &self.boxv.apply(&rest)?;
            acc = if i % 2 == 1 { &acc - &t } else { &acc + &t };
        }
        Ok(acc)
    }

    /// `s(∇ + s(□)) = s(∇)`, i.e. `(V, W) ↦ (0, V)`.
    pub fn s_op(&self) -> JacobiOp {
        JacobiOp { nabla: MultiVector::zero(self.num_vars(), self.arity() + 1), boxv: self.nabla.clone() }
    }

    /// `Δ(1, ·)`, which equals `□`.
    pub fn insert_unity(&self) -> MultiVector {
        self.boxv.clone()
    }

    /// `Δ(1, ·)` as an operator of arity `n − 1`; requires `n ≥ 2`.
    pub fn insert_unity_op(&self) -> Result<JacobiOp> {
        JacobiOp::derivation(self.boxv.clone())
    }

    pub fn checked_add(&self, other: &JacobiOp) -> Result<JacobiOp> {
        JacobiOp::new(self.nabla.checked_add(&other.nabla)?, self.boxv.checked_add(&other.boxv)?)
    }

    /// Lie derivative along a vector field, componentwise (it commutes with `s`).
    pub fn lie_derivative(&self, x: &MultiVector) -> Result<JacobiOp> {
        JacobiOp::new(MultiVector::lie_derivative(x, &self.nabla)?, MultiVector::lie_derivative(x, &self.boxv)?)
    }

    /// The defects `Δ¹(f1,…,f_{n−1})` and `Δ⁰(f1,…,f_{n−1})`:
    ///
    /// ```text
    /// X_i = □_{f̂_i},  h = (−1)^{n−1} □(f)
    /// Δ¹ = ∇_f(∇) + Σ_i (−1)^{i−1} (f_i X_i(∇) − X_i ∧ ∇_{f_i}) + (1−n) h ∇
    /// Δ⁰ = ∇_f(□) − ∇_h + Σ_i (−1)^{i−1} (f_i X_i(□) − X_i ∧ □_{f_i}) + (1−n) h □
    /// ```
    pub fn jacobi_defects(&self, fs: &[Poly]) -> Result<Defects> {
        let n = self.arity();
        if fs.len() + 1 != n {
            return Err(Error::ArityMismatch { expected: n - 1, got: fs.len() });
        }
        let m = self.num_vars();
        let nf = self.nabla.hamiltonian_field(fs)?;
        let mut first = MultiVector::lie_derivative(&nf, &self.nabla)?;
        let mut zeroth = if n >= 2 { MultiVector::lie_derivative(&nf, &self.boxv)? } else { MultiVector::zero(m, 0) };
        if n >= 2 && !self.boxv.is_zero() {
            let h = self.boxv.apply(fs)?;
            let h = if (n - 1) % 2 == 1 { -h } else { h };
            zeroth = zeroth.minus(&self.nabla.contract(&h)?);
            for i in 0..n - 1 {
                let rest: Vec<Poly> = fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()).collect();
                let xi = self.boxv.contract_all(&rest)?;
                let t1 = MultiVector::lie_derivative(&xi, &self.nabla)?
                    .mul_poly(&fs[i])?
                    .minus(&xi.wedge(&self.nabla.contract(&fs[i])?)?);
                let t0 = MultiVector::lie_derivative(&xi, &self.boxv)?
                    .mul_poly(&fs[i])?
                    .minus(&xi.wedge(&self.boxv.contract(&fs[i])?)?);
                if i % 2 == 1 {
                    first = first.minus(&t1);
                    zeroth = zeroth.minus(&t0);
                } else {
                    first = first.plus(&t1);
                    zeroth = zeroth.plus(&t0);
                }
            }
            let c = int(1 - n as i64);
            first = first.plus(&self.nabla.mul_poly(&h)?.scale(&c));
            zeroth = zeroth.plus(&self.boxv.mul_poly(&h)?.scale(&c));
        }
        Ok(Defects { first, zeroth })
    }

    /// Decides the n-ary Jacobi identity by requiring both defects to vanish
    /// on all increasing tuples of slot functions from `{1, x_a, x_a x_b}`.
    /// The defects are at most second order in each slot, so this basis is
    /// complete.
    pub fn is_n_jacobi(&self) -> Verdict<Vec<Poly>> {
        let n = self.arity();
        if n <= 1 || self.is_zero() {
            // a single first-order operator satisfies the identity vacuously
            return Verdict::pass();
        }
        let basis = jacobi_slot_basis(self.num_vars());
        let witness = increasing_tuples(basis.len(), n - 1).into_par_iter().find_map_first(|t| {
            let fs: Vec<Poly> = t.iter().map(|&i| basis[i].clone()).collect();
            let d = self.jacobi_defects(&fs).expect("arity matches");
            (!d.is_zero()).then_some(fs)
        });
        Verdict::from_witness(witness)
    }

    /// `(∇, ω⌋∇)` for an n-Poisson ∇ of rank n and a closed 1-form ω.
    pub fn from_poisson_and_form(nabla: &MultiVector, omega: &OneForm) -> Result<JacobiOp> {
        if omega.num_vars() != nabla.num_vars() {
            return Err(Error::VarCountMismatch { left: nabla.num_vars(), right: omega.num_vars() });
        }
        if !omega.is_closed() {
            return Err(Error::Precondition("the 1-form is not closed".into()));
        }
        if !nabla.is_decomposable() || !is_n_poisson(nabla).holds {
            return Err(Error::Precondition("∇ must be n-Poisson of rank n".into()));
        }
        JacobiOp::new(nabla.clone(), nabla.contract_form(omega.components())?)
    }
}

pub fn jacobi_slot_basis(num_vars: usize) -> Vec<Poly> {
    Poly::monomials_up_to(num_vars, 0, 2)
}

/// The normal-form bracket in coordinates `y1,…,yn` (the first `n` chart
/// coordinates): `det‖∂f_i/∂y_j‖ + Σ_k (−1)^{k−1} f_k det_k`, where `det_k`
/// drops row `k` and column `n`.
pub fn canonical_bracket(m: usize, n: usize, fs: &[Poly]) -> Result<Poly> {
    if n > m || n == 0 {
        return Err(Error::Precondition(format!("need 1 ≤ n ≤ m, got n = {n}, m = {m}")));
    }
    if fs.len() != n {
        return Err(Error::ArityMismatch { expected: n, got: fs.len() });
    }
    if let Some(bad) = fs.iter().find(|f| f.num_vars() != m) {
        return Err(Error::VarCountMismatch { left: m, right: bad.num_vars() });
    }
    let jac: Vec<Vec<Poly>> = fs.iter().map(|f| (0..n).map(|j| f.d(j)).collect()).collect();
    let mut acc = poly_det(&jac, m);
    for k in 0..n {
        let minor: Vec<Vec<Poly>> = jac
            .iter()
            .enumerate()
            .filter(|(r, _)| *r != k)
            .map(|(_, row)| row[..n - 1].to_vec())
            .collect();
        let t = &fs[k] * &poly_det(&minor, m);
        acc = if k % 2 == 1 { &acc - &t } else { &acc + &t };
    }
    Ok(acc)
}

/// Determinant of a square matrix of polynomials by cofactor expansion.
fn poly_det(a: &[Vec<Poly>], m: usize) -> Poly {
    match a.len() {
        0 => Poly::one(m),
        1 => a[0][0].clone(),
        len => {
            let mut acc = Poly::zero(m);
            for (j, pivot) in a[0].iter().enumerate() {
                if pivot.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> = a[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect())
                    .collect();
                debug_assert_eq!(minor.len(), len - 1);
                let t = pivot * &poly_det(&minor, m);
                acc = if j % 2 == 1 { &acc - &t } else { &acc + &t };
            }
            acc
        }
    }
}
