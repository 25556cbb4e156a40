//! Finite-dimensional n-Lie algebras given by structure constants.
//!
//! Every identity here is multilinear, so it is checked on basis tuples only.
//! Skew-symmetry lets us restrict further to strictly increasing tuples.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{increasing_tuples, merge_sign, sort_with_sign};
use crate::error::{Error, Result};
use crate::linalg::{unit_vector, vec_add, vec_is_zero, vec_scale, vec_sub, RatMatrix};
use crate::poly::Rational;
use crate::verdict::Verdict;

/// An `n`-ary skew bracket on `K^N`, stored by its values on increasing basis
/// tuples. Tuples whose value is zero are not stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NLieStructure {
    dim: usize,
    arity: usize,
    constants: BTreeMap<Vec<usize>, Vec<Rational>>,
}

/// A linear operator on `K^N`; column `j` is the image of `e_j`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearOperator {
    matrix: RatMatrix,
}

/// Failure location for a Jacobi or compatibility check: the frozen
/// `(n−1)`-tuple `u` and the argument tuple `w` (0-based basis indices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TupleWitness {
    pub u: Vec<usize>,
    pub w: Vec<usize>,
}

impl LinearOperator {
    pub fn new(matrix: RatMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimMismatch { expected: matrix.rows(), got: matrix.cols() });
        }
        Ok(LinearOperator { matrix })
    }

    pub fn zero(dim: usize) -> Self {
        LinearOperator { matrix: RatMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        LinearOperator { matrix: RatMatrix::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        self.matrix.mul_vec(v).expect("operator and vector dimensions agree")
    }

    pub fn compose(&self, other: &LinearOperator) -> LinearOperator {
        LinearOperator { matrix: self.matrix.mul(&other.matrix).expect("same dim") }
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &LinearOperator) -> LinearOperator {
        let ab = self.matrix.mul(&other.matrix).expect("same dim");
        let ba = other.matrix.mul(&self.matrix).expect("same dim");
        LinearOperator { matrix: ab.sub(&ba).expect("same dim") }
    }

    pub fn add(&self, other: &LinearOperator) -> LinearOperator {
        LinearOperator { matrix: self.matrix.add(&other.matrix).expect("same dim") }
    }

    pub fn sub(&self, other: &LinearOperator) -> LinearOperator {
        LinearOperator { matrix: self.matrix.sub(&other.matrix).expect("same dim") }
    }

    pub fn scale(&self, c: &Rational) -> LinearOperator {
        LinearOperator { matrix: self.matrix.scale(c) }
    }

    pub fn trace(&self) -> Rational {
        self.matrix.trace()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// The operator as an arity-1 structure.
    pub fn as_structure(&self) -> NLieStructure {
        let n = self.dim();
        let mut s = NLieStructure::zero(n, 1);
        for j in 0..n {
            s.set(&[j], self.matrix.col(j)).expect("valid index");
        }
        s
    }
}

impl NLieStructure {
    pub fn zero(dim: usize, arity: usize) -> Self {
        NLieStructure { dim, arity, constants: BTreeMap::new() }
    }

    /// Builds from `(indices, value)` pairs; indices in any order (the
    /// permutation sign is applied), repeated tuples summed.
    pub fn from_constants<I>(dim: usize, arity: usize, constants: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Vec<Rational>)>,
    {
        let mut s = Self::zero(dim, arity);
        for (idx, value) in constants {
            s.add_constant(&idx, &value)?;
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn constants(&self) -> impl Iterator<Item = (&Vec<usize>, &Vec<Rational>)> {
        self.constants.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.constants.is_empty()
    }

    fn validate(&self, idx: &[usize], value: &[Rational]) -> Result<()> {
        if idx.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: idx.len() });
        }
        if value.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: value.len() });
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.dim) {
            return Err(Error::IndexOutOfRange { index: bad + 1, bound: self.dim });
        }
        Ok(())
    }

    /// Adds `value` to `[e_{idx}]`.
    pub fn add_constant(&mut self, idx: &[usize], value: &[Rational]) -> Result<()> {
        self.validate(idx, value)?;
        let Some((sorted, sign)) = sort_with_sign(idx) else {
            return if vec_is_zero(value) {
                Ok(())
            } else {
                Err(Error::Inconsistent(format!("nonzero bracket on repeated indices {idx:?}")))
            };
        };
        let value = if sign < 0 { vec_scale(value, &-Rational::one()) } else { value.to_vec() };
        let current = self.constants.remove(&sorted).unwrap_or_else(|| vec![Rational::zero(); self.dim]);
        let sum = vec_add(&current, &value);
        if !vec_is_zero(&sum) {
            self.constants.insert(sorted, sum);
        }
        Ok(())
    }

    /// Overwrites `[e_{idx}]`.
    pub fn set(&mut self, idx: &[usize], value: Vec<Rational>) -> Result<()> {
        self.validate(idx, &value)?;
        let (sorted, sign) = sort_with_sign(idx)
            .ok_or_else(|| Error::Inconsistent(format!("repeated indices {idx:?}")))?;
        let value = if sign < 0 { vec_scale(&value, &-Rational::one()) } else { value };
        if vec_is_zero(&value) {
            self.constants.remove(&sorted);
        } else {
            self.constants.insert(sorted, value);
        }
        Ok(())
    }

    /// `[e_{i1},…,e_{in}]` for basis indices in any order.
    pub fn bracket_basis(&self, idx: &[usize]) -> Vec<Rational> {
        match sort_with_sign(idx) {
            None => vec![Rational::zero(); self.dim],
            Some((sorted, sign)) => match self.constants.get(&sorted) {
                None => vec![Rational::zero(); self.dim],
                Some(v) if sign < 0 => vec_scale(v, &-Rational::one()),
                Some(v) => v.clone(),
            },
        }
    }

    /// Multilinear bracket of arbitrary vectors: `Σ_I det(minor_I) [e_I]`.
    pub fn bracket(&self, vs: &[Vec<Rational>]) -> Result<Vec<Rational>> {
        if vs.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: vs.len() });
        }
        if let Some(bad) = vs.iter().find(|v| v.len() != self.dim) {
            return Err(Error::DimMismatch { expected: self.dim, got: bad.len() });
        }
        let mut out = vec![Rational::zero(); self.dim];
        for (idx, value) in &self.constants {
            let minor = RatMatrix::from_rows(
                idx.iter().map(|&i| vs.iter().map(|v| v[i].clone()).collect()).collect(),
            )?;
            let det = if self.arity == 0 { Rational::one() } else { minor.det()? };
            if !det.is_zero() {
                out = vec_add(&out, &vec_scale(value, &det));
            }
        }
        Ok(out)
    }

    fn basis(&self, i: usize) -> Vec<Rational> {
        unit_vector(self.dim, i)
    }

    /// `P_{u1,…,uk}(w…) = P(u1,…,uk, w…)`, an `(n−k)`-ary structure.
    pub fn hereditary(&self, us: &[Vec<Rational>]) -> Result<NLieStructure> {
        if us.len() >= self.arity {
            return Err(Error::ArityMismatch { expected: self.arity.saturating_sub(1), got: us.len() });
        }
        let arity = self.arity - us.len();
        let mut out = Self::zero(self.dim, arity);
        for tuple in increasing_tuples(self.dim, arity) {
            let mut args = us.to_vec();
            args.extend(tuple.iter().map(|&i| self.basis(i)));
            out.set(&tuple, self.bracket(&args)?)?;
        }
        Ok(out)
    }

    /// `ad_u : v ↦ [u1,…,u_{n−1}, v]`.
    pub fn inner_derivation(&self, us: &[Vec<Rational>]) -> Result<LinearOperator> {
        if self.arity == 0 || us.len() != self.arity - 1 {
            return Err(Error::ArityMismatch { expected: self.arity.saturating_sub(1), got: us.len() });
        }
        let cols: Vec<Vec<Rational>> = (0..self.dim)
            .map(|j| {
                let mut args = us.to_vec();
                args.push(self.basis(j));
                self.bracket(&args)
            })
            .collect::<Result<_>>()?;
        Ok(LinearOperator { matrix: RatMatrix::from_cols(self.dim, &cols) })
    }

    /// Inner derivation along basis vectors.
    pub fn inner_derivation_basis(&self, u: &[usize]) -> LinearOperator {
        let us: Vec<Vec<Rational>> = u.iter().map(|&i| self.basis(i)).collect();
        self.inner_derivation(&us).expect("arity checked by caller")
    }

    /// `[D(Q)](w) = D(Q(w)) − Σ_i Q(…, D w_i, …)` on a basis tuple.
    pub fn derivative_at(d: &LinearOperator, q: &NLieStructure, w: &[usize]) -> Vec<Rational> {
        let mut out = d.apply(&q.bracket_basis(w));
        for pos in 0..w.len() {
            // Q(…, D e_{w_pos}, …) expanded over the column of D
            let col = d.matrix.col(w[pos]);
            for (j, c) in col.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut idx = w.to_vec();
                idx[pos] = j;
                out = vec_sub(&out, &vec_scale(&q.bracket_basis(&idx), c));
            }
        }
        out
    }

    /// The `D`-derivative `D(Q)` as a structure of the same arity.
    pub fn derivative_by(d: &LinearOperator, q: &NLieStructure) -> Result<NLieStructure> {
        if d.dim() != q.dim {
            return Err(Error::DimMismatch { expected: q.dim, got: d.dim() });
        }
        let mut out = Self::zero(q.dim, q.arity);
        for w in increasing_tuples(q.dim, q.arity) {
            let v = Self::derivative_at(d, q, &w);
            out.set(&w, v)?;
        }
        Ok(out)
    }

    /// The derivation rule on all increasing basis tuples; returns the first failing tuple.
    pub fn derivation_witness(&self, d: &LinearOperator) -> Result<Option<Vec<usize>>> {
        if d.dim() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: d.dim() });
        }
        Ok(increasing_tuples(self.dim, self.arity)
            .into_iter()
            .find(|w| !vec_is_zero(&Self::derivative_at(d, self, w))))
    }

    pub fn is_derivation(&self, d: &LinearOperator) -> Result<bool> {
        Ok(self.derivation_witness(d)?.is_none())
    }

    /// The n-ary Jacobi identity, checked as `ad_u(P) = 0` for every increasing
    /// basis `(n−1)`-tuple `u`. Arity ≤ 1 is vacuous.
    pub fn check_n_jacobi(&self) -> Verdict<TupleWitness> {
        if self.arity <= 1 || self.is_zero() {
            return Verdict::pass();
        }
        let us = increasing_tuples(self.dim, self.arity - 1);
        let witness = us.into_par_iter().find_map_first(|u| {
            let d = self.inner_derivation_basis(&u);
            increasing_tuples(self.dim, self.arity)
                .into_iter()
                .find(|w| !vec_is_zero(&Self::derivative_at(&d, self, w)))
                .map(|w| TupleWitness { u: u.clone(), w })
        });
        Verdict::from_witness(witness)
    }

    /// `Comp(P,Q;u) = P_u(Q) + Q_u(P)` evaluated on the basis tuple `w`.
    pub fn comp_at(p: &NLieStructure, q: &NLieStructure, u: &[Vec<Rational>], w: &[usize]) -> Result<Vec<Rational>> {
        let dp = p.inner_derivation(u)?;
        let dq = q.inner_derivation(u)?;
        Ok(vec_add(&Self::derivative_at(&dp, q, w), &Self::derivative_at(&dq, p, w)))
    }

    /// Compatibility: `Comp(P,Q;u) = 0` for all basis tuples. Arity-1
    /// structures are always compatible.
    pub fn compat(p: &NLieStructure, q: &NLieStructure) -> Result<Verdict<TupleWitness>> {
        if p.dim != q.dim {
            return Err(Error::DimMismatch { expected: p.dim, got: q.dim });
        }
        if p.arity != q.arity {
            return Err(Error::ArityMismatch { expected: p.arity, got: q.arity });
        }
        if p.arity <= 1 {
            return Ok(Verdict::pass());
        }
        let us = increasing_tuples(p.dim, p.arity - 1);
        let witness = us.into_par_iter().find_map_first(|u| {
            let dp = p.inner_derivation_basis(&u);
            let dq = q.inner_derivation_basis(&u);
            increasing_tuples(p.dim, p.arity)
                .into_iter()
                .find(|w| {
                    let v = vec_add(&Self::derivative_at(&dp, q, w), &Self::derivative_at(&dq, p, w));
                    !vec_is_zero(&v)
                })
                .map(|w| TupleWitness { u: u.clone(), w })
        });
        Ok(Verdict::from_witness(witness))
    }

    /// `[ad_v, ad_u] = Σ_i ad_{u1,…,[v,u_i],…,u_{n−1}}`.
    pub fn commutator_check(&self, us: &[Vec<Rational>], vs: &[Vec<Rational>]) -> Result<bool> {
        let lhs = self.inner_derivation(vs)?.commutator(&self.inner_derivation(us)?);
        let mut rhs = LinearOperator::zero(self.dim);
        for i in 0..us.len() {
            let mut args = vs.to_vec();
            args.push(us[i].clone());
            let moved = self.bracket(&args)?;
            let mut shifted = us.to_vec();
            shifted[i] = moved;
            rhs = rhs.add(&self.inner_derivation(&shifted)?);
        }
        Ok(lhs == rhs)
    }

    /// The k-th order compatibility condition `C(v|w) = 0`, with
    /// `C = Σ_{I ∋ 1} ⟨(v,w)_I | (w,v)_I⟩` and
    /// `⟨a|b⟩(u) = Comp(P_a, P_b; u)`. Checked on all increasing basis tuples
    /// for `u` and for the arguments. Requires `1 ≤ k ≤ n`; for `k ≥ n−1` the condition is empty.
    pub fn comp_condition_k(&self, vs: &[Vec<Rational>], ws: &[Vec<Rational>]) -> Result<bool> {
        let k = vs.len();
        if ws.len() != k {
            return Err(Error::ArityMismatch { expected: k, got: ws.len() });
        }
        if k == 0 || k > self.arity {
            return Err(Error::Precondition(format!(
                "compatibility order k = {k} out of range 1..={} for arity {}",
                self.arity, self.arity
            )));
        }
        // hereditary structures of arity ≤ 1 impose no condition
        let arity = self.arity - k;
        if arity <= 1 {
            return Ok(true);
        }
        let pairs: Vec<(NLieStructure, NLieStructure)> = interleavings(k)
            .into_iter()
            .map(|mask| {
                let a: Vec<Vec<Rational>> = (0..k).map(|s| if mask[s] { vs[s].clone() } else { ws[s].clone() }).collect();
                let b: Vec<Vec<Rational>> = (0..k).map(|s| if mask[s] { ws[s].clone() } else { vs[s].clone() }).collect();
                Ok((self.hereditary(&a)?, self.hereditary(&b)?))
            })
            .collect::<Result<_>>()?;
        for u in increasing_tuples(self.dim, arity - 1) {
            let u_vecs: Vec<Vec<Rational>> = u.iter().map(|&i| self.basis(i)).collect();
            for w in increasing_tuples(self.dim, arity) {
                let mut total = vec![Rational::zero(); self.dim];
                for (pa, pb) in &pairs {
                    total = vec_add(&total, &Self::comp_at(pa, pb, &u_vecs, &w)?);
                }
                if !vec_is_zero(&total) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn checked_add(&self, other: &NLieStructure) -> Result<NLieStructure> {
        self.combine(other, &Rational::one())
    }

    pub fn checked_sub(&self, other: &NLieStructure) -> Result<NLieStructure> {
        self.combine(other, &-Rational::one())
    }

    fn combine(&self, other: &NLieStructure, c: &Rational) -> Result<NLieStructure> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: other.dim });
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: other.arity });
        }
        let mut out = self.clone();
        for (idx, v) in &other.constants {
            out.add_constant(idx, &vec_scale(v, c))?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> NLieStructure {
        let mut out = Self::zero(self.dim, self.arity);
        if !c.is_zero() {
            for (idx, v) in &self.constants {
                out.constants.insert(idx.clone(), vec_scale(v, c));
            }
        }
        out
    }

    /// `P ⊕ Q` on `K^{N_P} ⊕ K^{N_Q}`; brackets mixing the summands vanish.
    pub fn direct_product(p: &NLieStructure, q: &NLieStructure) -> Result<NLieStructure> {
        if p.arity != q.arity {
            return Err(Error::ArityMismatch { expected: p.arity, got: q.arity });
        }
        let dim = p.dim + q.dim;
        let mut out = Self::zero(dim, p.arity);
        for (idx, v) in &p.constants {
            let mut value = v.clone();
            value.resize(dim, Rational::zero());
            out.constants.insert(idx.clone(), value);
        }
        for (idx, v) in &q.constants {
            let shifted: Vec<usize> = idx.iter().map(|i| i + p.dim).collect();
            let mut value = vec![Rational::zero(); p.dim];
            value.extend(v.iter().cloned());
            out.constants.insert(shifted, value);
        }
        Ok(out)
    }

    /// The n-vector product on `R^{n+1}`: `[e_I] = sign(I, j) e_j` where `j`
    /// is the index missing from `I`.
    pub fn vector_product_algebra(n: usize) -> Result<NLieStructure> {
        if n < 2 {
            return Err(Error::Precondition(format!("vector product needs n ≥ 2, got {n}")));
        }
        let dim = n + 1;
        let mut out = Self::zero(dim, n);
        for j in 0..dim {
            let idx: Vec<usize> = (0..dim).filter(|&i| i != j).collect();
            let sign = merge_sign(&idx, &[j]).expect("disjoint");
            let mut v = vec![Rational::zero(); dim];
            v[j] = Rational::from_integer(sign.into());
            out.constants.insert(idx, v);
        }
        Ok(out)
    }

    /// Expresses the structure in the basis `e'_j = G e_j` (columns of `G`):
    /// `Q(e'_I) = G⁻¹ P(G e_I)`.
    pub fn change_basis(&self, g: &RatMatrix) -> Result<NLieStructure> {
        if g.rows() != self.dim || g.cols() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: g.rows() });
        }
        let ginv = g.inverse()?;
        let cols: Vec<Vec<Rational>> = (0..self.dim).map(|j| g.col(j)).collect();
        let mut out = Self::zero(self.dim, self.arity);
        for idx in increasing_tuples(self.dim, self.arity) {
            let args: Vec<Vec<Rational>> = idx.iter().map(|&i| cols[i].clone()).collect();
            let v = ginv.mul_vec(&self.bracket(&args)?)?;
            out.set(&idx, v)?;
        }
        Ok(out)
    }
}

/// Boolean masks `I ⊆ {1..k}` with `1 ∈ I`: position `s` takes `v_s` when set.
fn interleavings(k: usize) -> Vec<Vec<bool>> {
    (0..1usize << (k - 1))
        .map(|bits| {
            let mut mask = vec![true];
            mask.extend((1..k).map(|s| bits & (1 << (s - 1)) != 0));
            mask
        })
        .collect()
}
