//! n-Poisson (Nambu–Poisson) tensors: the fundamental identity, duals of
//! n-Lie algebras, function scaling, wedge compatibility and Casimirs.

use std::ops::Deref;

use num_traits::Zero;
use rayon::prelude::*;

use crate::combinatorics::increasing_tuples;
use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::multivec::MultiVector;
use crate::nlie::NLieStructure;
use crate::poly::{Poly, Rational};
use crate::verdict::Verdict;

/// An n-vector offered as an n-Poisson structure (degree ≥ 2); it is only a
/// candidate until [`is_n_poisson`] confirms it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PoissonCandidate(MultiVector);

impl PoissonCandidate {
    pub fn new(tensor: MultiVector) -> Result<Self> {
        if tensor.degree() < 2 {
            return Err(Error::Degree(format!("a Poisson candidate needs degree ≥ 2, got {}", tensor.degree())));
        }
        Ok(PoissonCandidate(tensor))
    }

    pub fn tensor(&self) -> &MultiVector {
        &self.0
    }

    pub fn into_tensor(self) -> MultiVector {
        self.0
    }
}

impl Deref for PoissonCandidate {
    type Target = MultiVector;
    fn deref(&self) -> &MultiVector {
        &self.0
    }
}

/// Per-slot test functions for the fundamental identity: every monomial of
/// degree 1 or 2.
pub fn fi_slot_basis(num_vars: usize) -> Vec<Poly> {
    Poly::monomials_up_to(num_vars, 1, 2)
}

/// `L_{X_{f1,…,f_{n−1}}} Λ`; it vanishes for all `f` iff Λ is n-Poisson.
pub fn fi_defect(lambda: &MultiVector, fs: &[Poly]) -> Result<MultiVector> {
    let x = lambda.hamiltonian_field(fs)?;
    MultiVector::lie_derivative(&x, lambda)
}

/// Searches increasing tuples over `basis` (of length `slots`) for the first
/// one where `defect` is nonzero.
pub(crate) fn search_slots<F>(basis: &[Poly], slots: usize, defect: F) -> Option<Vec<Poly>>
where
    F: Fn(&[Poly]) -> bool + Sync,
{
    increasing_tuples(basis.len(), slots).into_par_iter().find_map_first(|t| {
        let fs: Vec<Poly> = t.iter().map(|&i| basis[i].clone()).collect();
        defect(&fs).then_some(fs)
    })
}

/// Fundamental-identity oracle over all increasing tuples of degree-≤2
/// monomials. Degree ≤ 1 tensors are vacuously Poisson.
pub fn fi_oracle(lambda: &MultiVector) -> Verdict<Vec<Poly>> {
    let n = lambda.degree();
    if n <= 1 || lambda.is_zero() {
        return Verdict::pass();
    }
    let basis = fi_slot_basis(lambda.num_vars());
    Verdict::from_witness(search_slots(&basis, n - 1, |fs| {
        !fi_defect(lambda, fs).expect("arity matches").is_zero()
    }))
}

/// Cheap necessary condition for `n > 2`: a Poisson n-vector is
/// decomposable. Returns `Some(false)` when the condition already rules the
/// tensor out, `None` when it is inconclusive.
pub fn poisson_prefilter(lambda: &MultiVector) -> Option<bool> {
    if lambda.degree() > 2 && !lambda.is_zero() && !lambda.is_decomposable() {
        return Some(false);
    }
    None
}

/// Decides whether `lambda` is n-Poisson. The decomposability pre-filter is
/// consulted first; the witness is always produced by the oracle.
pub fn is_n_poisson(lambda: &MultiVector) -> Verdict<Vec<Poly>> {
    if let Some(false) = poisson_prefilter(lambda) {
        let v = fi_oracle(lambda);
        debug_assert!(!v.holds, "non-decomposable tensor passed the FI oracle");
        return v;
    }
    fi_oracle(lambda)
}

/// The tensor `T = Σ [x_I] ∂_I` on the dual of an n-Lie algebra, with linear
/// coefficients `[x_I] = Σ_j c_I^j x_j`.
pub fn dual_nvector(p: &NLieStructure) -> MultiVector {
    let m = p.dim();
    let comps = p.constants().map(|(idx, value)| {
        let coef = Poly::from_terms(
            m,
            value.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| {
                let mut e = vec![0; m];
                e[j] = 1;
                (e, c.clone())
            }),
        )
        .expect("exponent length m");
        (idx.clone(), coef)
    });
    MultiVector::from_components(m, p.arity(), comps).expect("valid constants")
}

/// Reads structure constants back from a tensor with linear coefficients.
pub fn algebra_from_dual(t: &MultiVector) -> Result<NLieStructure> {
    let m = t.num_vars();
    let mut out = NLieStructure::zero(m, t.degree());
    for (idx, p) in t.components() {
        if p.degree().is_some_and(|d| d != 1) || !p.constant_term().is_zero() {
            return Err(Error::Precondition(format!("coefficient {p} at {idx:?} is not linear")));
        }
        let value: Vec<Rational> = (0..m)
            .map(|j| {
                let mut e = vec![0; m];
                e[j] = 1;
                p.coefficient(&e)
            })
            .collect();
        out.set(idx, value)?;
    }
    Ok(out)
}

/// `fΛ`, refused unless Λ is n-Poisson and decomposable.
pub fn scale(f: &Poly, lambda: &MultiVector) -> Result<MultiVector> {
    if !lambda.is_decomposable() {
        return Err(Error::Precondition("scaling needs a decomposable tensor".into()));
    }
    if !is_n_poisson(lambda).holds {
        return Err(Error::Precondition("scaling needs an n-Poisson tensor".into()));
    }
    lambda.mul_poly(f)
}

/// Compatibility of two n-vectors: `Y_f(V) + X_f(W) = 0` for all slot tuples,
/// where `X`, `Y` are the Hamiltonian fields of `V`, `W`.
pub fn poisson_compat(v: &MultiVector, w: &MultiVector) -> Result<Verdict<Vec<Poly>>> {
    if v.num_vars() != w.num_vars() {
        return Err(Error::VarCountMismatch { left: v.num_vars(), right: w.num_vars() });
    }
    if v.degree() != w.degree() {
        return Err(Error::Degree(format!("degrees {} and {} differ", v.degree(), w.degree())));
    }
    let n = v.degree();
    if n <= 1 {
        return Ok(Verdict::pass());
    }
    let basis = fi_slot_basis(v.num_vars());
    Ok(Verdict::from_witness(search_slots(&basis, n - 1, |fs| {
        let x = v.hamiltonian_field(fs).expect("arity");
        let y = w.hamiltonian_field(fs).expect("arity");
        let a = MultiVector::lie_derivative(&y, v).expect("chart");
        let b = MultiVector::lie_derivative(&x, w).expect("chart");
        !a.plus(&b).is_zero()
    })))
}

/// The three conditions for `Δ∧∇` to be multi-Poisson when both factors are
/// multi-Poisson of rank equal to their degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeCompat {
    /// `⌈Δ,∇⌋ = 0`
    pub schouten_vanishes: bool,
    /// `Δ_{g}(∇) ∧ Δ = 0` for all `g`
    pub delta_condition: bool,
    /// `∇_{h}(Δ) ∧ ∇ = 0` for all `h`
    pub nabla_condition: bool,
}

impl WedgeCompat {
    pub fn all(&self) -> bool {
        self.schouten_vanishes && self.delta_condition && self.nabla_condition
    }
}

/// Checks the wedge-compatibility conditions. Together they imply that
/// `Δ∧∇` is Poisson; they are not necessary (`∂1∧∂2` and `x1∂3` give a
/// Poisson wedge with nonzero Schouten bracket). Under the rank hypothesis the
/// two mixed conditions are C^∞-multilinear in the slots, so coordinate
/// functions suffice.
pub fn wedge_compat_check(delta: &MultiVector, nabla: &MultiVector) -> Result<WedgeCompat> {
    for (name, t) in [("Δ", delta), ("∇", nabla)] {
        if !t.is_decomposable() || !is_n_poisson(t).holds {
            return Err(Error::Precondition(format!("{name} must be multi-Poisson of rank equal to its degree")));
        }
    }
    let schouten_vanishes = MultiVector::schouten(delta, nabla)?.is_zero();
    let delta_condition = mixed_condition(delta, nabla)?;
    let nabla_condition = mixed_condition(nabla, delta)?;
    Ok(WedgeCompat { schouten_vanishes, delta_condition, nabla_condition })
}

/// `A_{g}(B) ∧ A = 0` over coordinate tuples `g`.
fn mixed_condition(a: &MultiVector, b: &MultiVector) -> Result<bool> {
    let m = a.num_vars();
    if a.degree() == 0 {
        return Ok(true);
    }
    let coords: Vec<Poly> = (0..m).map(|i| Poly::var(m, i)).collect();
    let witness = search_slots(&coords, a.degree() - 1, |gs| {
        let x = a.hamiltonian_field(gs).expect("arity");
        let l = MultiVector::lie_derivative(&x, b).expect("chart");
        !l.wedge(a).expect("chart").is_zero()
    });
    Ok(witness.is_none())
}

/// Basis of the polynomial Casimirs of degree ≤ `max_degree`: the functions
/// annihilated by every Hamiltonian field. Coordinate tuples suffice since
/// Hamiltonian fields are C^∞-linear in the differentials.
pub fn casimir_polynomials(lambda: &MultiVector, max_degree: u32) -> Result<Vec<Poly>> {
    if max_degree < 1 {
        return Err(Error::Precondition("max_degree must be at least 1".into()));
    }
    let n = lambda.degree();
    if n == 0 {
        return Err(Error::Degree("Casimirs need a tensor of degree ≥ 1".into()));
    }
    let m = lambda.num_vars();
    let monos = Poly::monomials_up_to(m, 0, max_degree);
    let coords: Vec<Poly> = (0..m).map(|i| Poly::var(m, i)).collect();
    let fields: Vec<MultiVector> = increasing_tuples(m, n - 1)
        .into_iter()
        .map(|t| lambda.hamiltonian_field(&t.iter().map(|&i| coords[i].clone()).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    // rows indexed by (field, output monomial); columns by input monomial
    let mut row_index = std::collections::BTreeMap::new();
    let mut entries: Vec<(usize, usize, Rational)> = Vec::new();
    for (col, mono) in monos.iter().enumerate() {
        for (fi, x) in fields.iter().enumerate() {
            let image = x.derive(mono)?;
            for (e, c) in image.terms() {
                let next = row_index.len();
                let r = *row_index.entry((fi, e.clone())).or_insert(next);
                entries.push((r, col, c.clone()));
            }
        }
    }
    let mut mat = RatMatrix::zeros(row_index.len(), monos.len());
    for (r, c, v) in entries {
        mat[(r, c)] += v;
    }
    let null = if row_index.is_empty() {
        (0..monos.len()).map(|j| crate::linalg::unit_vector(monos.len(), j)).collect()
    } else {
        mat.nullspace()
    };
    Ok(null
        .into_iter()
        .map(|v| {
            monos
                .iter()
                .zip(&v)
                .filter(|(_, c)| !c.is_zero())
                .fold(Poly::zero(m), |acc, (mono, c)| &acc + &mono.scale(c))
        })
        .collect())
}
