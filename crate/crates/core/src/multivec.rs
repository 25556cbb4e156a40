//! Skew-symmetric multivector fields with polynomial coefficients.
//!
//! A degree-`k` multivector `V = Σ V^I ∂_{i1}∧…∧∂_{ik}` is stored by its
//! strictly increasing index tuples `I` (0-based). It is identified with the
//! skew multi-derivation `V(f1,…,fk) = Σ_I V^I det(∂_{i_a} f_b)`.
//!
//! Contraction `f⌋V` puts `df` into the first slot, so that
//! `V(f1,…,fk) = fk⌋…⌋f1⌋V`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;

use crate::combinatorics::{complement, increasing_tuples, merge_sign, sort_with_sign};
use crate::error::{Error, Result};
use crate::linalg::rank_of_rows;
use crate::poly::{format_rational, Poly, Rational};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiVector {
    num_vars: usize,
    degree: usize,
    components: BTreeMap<Vec<usize>, Poly>,
}

/// Degree-1 multivector.
pub type VectorField = MultiVector;

impl MultiVector {
    pub fn zero(num_vars: usize, degree: usize) -> Self {
        MultiVector { num_vars, degree, components: BTreeMap::new() }
    }

    /// Degree-0 multivector holding a single function.
    pub fn scalar(f: Poly) -> Self {
        let mut v = Self::zero(f.num_vars(), 0);
        if !f.is_zero() {
            v.components.insert(Vec::new(), f);
        }
        v
    }

    /// The constant blade `∂_{i1}∧…∧∂_{ik}` (0-based, any order; the sign of
    /// the sorting permutation is applied).
    pub fn blade(num_vars: usize, indices: &[usize]) -> Self {
        let mut v = Self::zero(num_vars, indices.len());
        v.add_term(indices, Poly::one(num_vars));
        v
    }

    /// The top-degree volume `∂_1∧…∧∂_m`.
    pub fn volume(num_vars: usize) -> Self {
        Self::blade(num_vars, &(0..num_vars).collect::<Vec<_>>())
    }

    /// Builds from `(indices, coefficient)` pairs in any order; repeated
    /// tuples are summed and tuples with repeated indices are dropped.
    pub fn from_components<I>(num_vars: usize, degree: usize, comps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Poly)>,
    {
        let mut v = Self::zero(num_vars, degree);
        for (idx, p) in comps {
            if idx.len() != degree {
                return Err(Error::Degree(format!("index tuple {idx:?} has length {}, expected {degree}", idx.len())));
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= num_vars) {
                return Err(Error::IndexOutOfRange { index: bad + 1, bound: num_vars });
            }
            if p.num_vars() != num_vars {
                return Err(Error::VarCountMismatch { left: num_vars, right: p.num_vars() });
            }
            v.add_term(&idx, p);
        }
        Ok(v)
    }

    /// Adds `p ∂_{indices}` with the indices in any order.
    pub(crate) fn add_term(&mut self, indices: &[usize], p: Poly) {
        if p.is_zero() {
            return;
        }
        let Some((sorted, sign)) = sort_with_sign(indices) else {
            return;
        };
        let p = if sign < 0 { -p } else { p };
        match self.components.entry(sorted) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = &*e.get() + &p;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.components.iter()
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// Coefficient at an increasing tuple.
    pub fn get(&self, indices: &[usize]) -> Poly {
        self.components.get(indices).cloned().unwrap_or_else(|| Poly::zero(self.num_vars))
    }

    /// The function held by a degree-0 multivector.
    pub fn as_scalar(&self) -> Poly {
        debug_assert_eq!(self.degree, 0);
        self.get(&[])
    }

    fn check_same(&self, other: &MultiVector) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: other.num_vars });
        }
        Ok(())
    }

    fn check_poly(&self, f: &Poly) -> Result<()> {
        if self.num_vars != f.num_vars() {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: f.num_vars() });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &MultiVector) -> Result<MultiVector> {
        self.check_same(other)?;
        if self.degree != other.degree {
            return Err(Error::Degree(format!("cannot add degrees {} and {}", self.degree, other.degree)));
        }
        let mut out = self.clone();
        for (i, p) in &other.components {
            out.add_term(i, p.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MultiVector) -> Result<MultiVector> {
        self.checked_add(&other.neg())
    }

    /// Sum, panicking on mismatched chart or degree (internal use).
    pub(crate) fn plus(&self, other: &MultiVector) -> MultiVector {
        self.checked_add(other).expect("matching multivectors")
    }

    pub(crate) fn minus(&self, other: &MultiVector) -> MultiVector {
        self.checked_sub(other).expect("matching multivectors")
    }

    pub fn neg(&self) -> MultiVector {
        self.map(|p| -p)
    }

    pub fn scale(&self, c: &Rational) -> MultiVector {
        self.map(|p| p.scale(c))
    }

    /// Pointwise product `fV`.
    pub fn mul_poly(&self, f: &Poly) -> Result<MultiVector> {
        self.check_poly(f)?;
        Ok(self.map(|p| p * f))
    }

    fn map(&self, f: impl Fn(&Poly) -> Poly) -> MultiVector {
        let mut out = Self::zero(self.num_vars, self.degree);
        for (i, p) in &self.components {
            let q = f(p);
            if !q.is_zero() {
                out.components.insert(i.clone(), q);
            }
        }
        out
    }

    /// Evaluates every coefficient at a point, giving a constant multivector.
    pub fn at_point(&self, point: &[Rational]) -> Result<MultiVector> {
        let mut out = Self::zero(self.num_vars, self.degree);
        for (i, p) in &self.components {
            out.add_term(i, Poly::constant(self.num_vars, p.evaluate(point)?));
        }
        Ok(out)
    }

    /// Maximal total degree of the coefficients.
    pub fn coefficient_degree(&self) -> Option<u32> {
        self.components.values().filter_map(Poly::degree).max()
    }

    // ---- exterior algebra ----

    /// `A ∧ B`. If the degrees add past `m` the result is the zero
    /// multivector of that degree.
    pub fn wedge(&self, other: &MultiVector) -> Result<MultiVector> {
        self.check_same(other)?;
        let mut out = Self::zero(self.num_vars, self.degree + other.degree);
        for (i, p) in &self.components {
            for (j, q) in &other.components {
                let Some(sign) = merge_sign(i, j) else { continue };
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                idx.sort_unstable();
                let c = p * q;
                out.add_term(&idx, if sign < 0 { -c } else { c });
            }
        }
        Ok(out)
    }

    /// Inserts the one-form `Σ α_i dx_i` into the first slot.
    pub fn contract_form(&self, alpha: &[Poly]) -> Result<MultiVector> {
        if self.degree == 0 {
            return Err(Error::Degree("cannot contract a degree-0 multivector".into()));
        }
        if alpha.len() != self.num_vars {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: alpha.len() });
        }
        let mut out = Self::zero(self.num_vars, self.degree - 1);
        for (idx, p) in &self.components {
            for (pos, &i) in idx.iter().enumerate() {
                if alpha[i].is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(pos);
                let t = &alpha[i] * p;
                out.add_term(&rest, if pos % 2 == 1 { -t } else { t });
            }
        }
        Ok(out)
    }

    /// Inserts `Σ α_i dx_i` into the last slot.
    pub fn contract_form_last(&self, alpha: &[Poly]) -> Result<MultiVector> {
        let first = self.contract_form(alpha)?;
        Ok(if (self.degree - 1) % 2 == 1 { first.neg() } else { first })
    }

    /// `df⌋V`.
    pub fn contract(&self, f: &Poly) -> Result<MultiVector> {
        self.check_poly(f)?;
        self.contract_form(&f.gradient())
    }

    /// `dx_a⌋V` for the 0-based coordinate `a`.
    pub fn contract_coordinate(&self, a: usize) -> Result<MultiVector> {
        if self.degree == 0 {
            return Err(Error::Degree("cannot contract a degree-0 multivector".into()));
        }
        if a >= self.num_vars {
            return Err(Error::IndexOutOfRange { index: a + 1, bound: self.num_vars });
        }
        let mut out = Self::zero(self.num_vars, self.degree - 1);
        for (idx, p) in &self.components {
            if let Some(pos) = idx.iter().position(|&i| i == a) {
                let mut rest = idx.clone();
                rest.remove(pos);
                out.add_term(&rest, if pos % 2 == 1 { -p.clone() } else { p.clone() });
            }
        }
        Ok(out)
    }

    /// Successive contraction with coordinate covectors `dx_{a1}, dx_{a2}, …`.
    pub fn contract_coordinates(&self, tuple: &[usize]) -> Result<MultiVector> {
        let mut v = self.clone();
        for &a in tuple {
            v = v.contract_coordinate(a)?;
        }
        Ok(v)
    }

    /// Successive contraction `f_k⌋…⌋f_1⌋V`.
    pub fn contract_all(&self, fs: &[Poly]) -> Result<MultiVector> {
        let mut v = self.clone();
        for f in fs {
            v = v.contract(f)?;
        }
        Ok(v)
    }

    /// The multi-derivation value `V(f1,…,fk)`.
    pub fn apply(&self, fs: &[Poly]) -> Result<Poly> {
        if fs.len() != self.degree {
            return Err(Error::ArityMismatch { expected: self.degree, got: fs.len() });
        }
        Ok(self.contract_all(fs)?.as_scalar())
    }

    /// `X_{f1,…,f_{n-1}}`, so that `X(g) = Λ(f1,…,f_{n-1},g)`.
    pub fn hamiltonian_field(&self, fs: &[Poly]) -> Result<VectorField> {
        if self.degree == 0 || fs.len() != self.degree - 1 {
            return Err(Error::ArityMismatch { expected: self.degree.saturating_sub(1), got: fs.len() });
        }
        self.contract_all(fs)
    }

    /// Action of a vector field on a function.
    pub fn derive(&self, g: &Poly) -> Result<Poly> {
        if self.degree != 1 {
            return Err(Error::Degree(format!("expected a vector field, got degree {}", self.degree)));
        }
        self.check_poly(g)?;
        let mut acc = Poly::zero(self.num_vars);
        for (idx, p) in &self.components {
            acc = &acc + &(p * &g.d(idx[0]));
        }
        Ok(acc)
    }

    /// `L_X V` for a vector field `X`.
    pub fn lie_derivative(x: &VectorField, v: &MultiVector) -> Result<MultiVector> {
        x.check_same(v)?;
        if x.degree != 1 {
            return Err(Error::Degree(format!("Lie derivative needs a vector field, got degree {}", x.degree)));
        }
        let mut out = Self::zero(v.num_vars, v.degree);
        for (idx, p) in &v.components {
            out.add_term(idx, x.derive(p)?);
        }
        let dx: Vec<(usize, Vec<Poly>)> = x.components.iter().map(|(i, p)| (i[0], p.gradient())).collect();
        for (idx, p) in &v.components {
            for pos in 0..idx.len() {
                // -∂_{i_pos} X^j · V^I moved to slot j
                for (j, grad) in &dx {
                    let c = &grad[idx[pos]];
                    if c.is_zero() {
                        continue;
                    }
                    let mut target = idx.clone();
                    target[pos] = *j;
                    out.add_term(&target, -(c * p));
                }
            }
        }
        Ok(out)
    }

    /// Schouten–Nijenhuis bracket, reconstructed by evaluating its defining
    /// formula on coordinate-function tuples:
    ///
    /// `⌈A,B⌋(f) = Σ_{|I|=k-1} ±A(f_I, B(f_Ī)) − Σ_{|J|=k} ±B(A(f_J), f_J̄)`.
    pub fn schouten(a: &MultiVector, b: &MultiVector) -> Result<MultiVector> {
        a.check_same(b)?;
        let m = a.num_vars;
        let (k, l) = (a.degree, b.degree);
        if k + l == 0 {
            return Err(Error::Degree("Schouten bracket of two functions is undefined".into()));
        }
        let deg = k + l - 1;
        let mut out = Self::zero(m, deg);
        if deg > m || a.is_zero() || b.is_zero() {
            return Ok(out);
        }
        let coords: Vec<Poly> = (0..m).map(|i| Poly::var(m, i)).collect();
        let positions: Vec<usize> = (0..deg).collect();
        let comps: Vec<(Vec<usize>, Poly)> = increasing_tuples(m, deg)
            .into_par_iter()
            .map(|tuple| {
                let f: Vec<Poly> = tuple.iter().map(|&t| coords[t].clone()).collect();
                let mut acc = Poly::zero(m);
                if k >= 1 {
                    for sub in increasing_tuples(deg, k - 1) {
                        let rest = complement(&sub, &positions);
                        let sign = merge_sign(&sub, &rest).expect("disjoint");
                        let inner = b.apply(&pick(&f, &rest)).expect("arity");
                        let mut args = pick(&f, &sub);
                        args.push(inner);
                        let t = a.apply(&args).expect("arity");
                        acc = if sign < 0 { &acc - &t } else { &acc + &t };
                    }
                }
                if k <= deg {
                    for sub in increasing_tuples(deg, k) {
                        let rest = complement(&sub, &positions);
                        let sign = merge_sign(&sub, &rest).expect("disjoint");
                        let inner = a.apply(&pick(&f, &sub)).expect("arity");
                        let mut args = vec![inner];
                        args.extend(pick(&f, &rest));
                        let t = b.apply(&args).expect("arity");
                        acc = if sign < 0 { &acc + &t } else { &acc - &t };
                    }
                }
                (tuple, acc)
            })
            .collect();
        for (idx, p) in comps {
            out.add_term(&idx, p);
        }
        Ok(out)
    }

    // ---- rank and decomposability ----

    /// All derived vectors `V_{a1,…,a_{k-1}}` over increasing coordinate tuples.
    pub fn derived_vectors(&self) -> Result<Vec<(Vec<usize>, VectorField)>> {
        if self.degree == 0 {
            return Err(Error::Degree("derived vectors need degree ≥ 1".into()));
        }
        increasing_tuples(self.num_vars, self.degree - 1)
            .into_iter()
            .map(|t| Ok((t.clone(), self.contract_coordinates(&t)?)))
            .collect()
    }

    /// Dimension of the span of the derived vectors at a point.
    pub fn derived_rank(&self, point: &[Rational]) -> Result<usize> {
        if point.len() != self.num_vars {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: point.len() });
        }
        let mut rows = Vec::new();
        for (_, x) in self.derived_vectors()? {
            let row: Vec<Rational> = (0..self.num_vars)
                .map(|i| x.get(&[i]).evaluate(point))
                .collect::<Result<_>>()?;
            if row.iter().any(|r| !r.is_zero()) {
                rows.push(row);
            }
        }
        Ok(rank_of_rows(&rows, self.num_vars))
    }

    /// Decomposability test: `V_{a1,…,a_{k-1}} ∧ V = 0` identically for every
    /// increasing coordinate tuple. Returns the first violating tuple
    /// (0-based) or `None` when decomposable. Degrees 0 and 1 are trivially
    /// decomposable, as is the zero multivector.
    pub fn decomposability_witness(&self) -> Option<Vec<usize>> {
        if self.degree <= 1 || self.is_zero() || self.degree == self.num_vars {
            return None;
        }
        increasing_tuples(self.num_vars, self.degree - 1).into_par_iter().find_map_first(|t| {
            let x = self.contract_coordinates(&t).expect("degree ≥ 1");
            let w = x.wedge(self).expect("same chart");
            (!w.is_zero()).then_some(t)
        })
    }

    pub fn is_decomposable(&self) -> bool {
        self.decomposability_witness().is_none()
    }

    /// Checks `V_{a,c} ∧ V_b + V_{b,c} ∧ V_a = 0` for all coordinate covectors
    /// `a ≤ b` and increasing `(k−2)`-tuples `c`. Returns the first violating
    /// `(a, b, c)` or `None`.
    pub fn symmetric_wedge_witness(&self) -> Result<Option<(usize, usize, Vec<usize>)>> {
        if self.degree <= 2 {
            return Err(Error::Degree(format!("needs degree > 2, got {}", self.degree)));
        }
        let m = self.num_vars;
        let singles: Vec<MultiVector> = (0..m).map(|a| self.contract_coordinate(a)).collect::<Result<_>>()?;
        let cs = increasing_tuples(m, self.degree - 2);
        let mut jobs = Vec::new();
        for a in 0..m {
            for b in a..m {
                for c in &cs {
                    jobs.push((a, b, c.clone()));
                }
            }
        }
        Ok(jobs.into_par_iter().find_map_first(|(a, b, c)| {
            let vac = singles[a].contract_coordinates(&c).expect("degree");
            let vbc = singles[b].contract_coordinates(&c).expect("degree");
            let lhs = vac.wedge(&singles[b]).expect("chart").plus(&vbc.wedge(&singles[a]).expect("chart"));
            (!lhs.is_zero()).then_some((a, b, c))
        }))
    }

    pub fn symmetric_wedge_condition(&self) -> Result<bool> {
        Ok(self.symmetric_wedge_witness()?.is_none())
    }

    /// Re-embeds on a chart with more (or fewer) coordinates.
    pub fn with_num_vars(&self, num_vars: usize) -> Result<MultiVector> {
        let mut out = Self::zero(num_vars, self.degree);
        for (idx, p) in &self.components {
            if idx.iter().any(|&i| i >= num_vars) {
                return Err(Error::VarCountMismatch { left: self.num_vars, right: num_vars });
            }
            out.add_term(idx, p.with_num_vars(num_vars)?);
        }
        Ok(out)
    }
}

fn pick(f: &[Poly], positions: &[usize]) -> Vec<Poly> {
    positions.iter().map(|&p| f[p].clone()).collect()
}

impl fmt::Display for MultiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|(idx, p)| {
                let blade: Vec<String> = idx.iter().map(|i| format!("d{}", i + 1)).collect();
                let coef = if p.num_terms() > 1 { format!("({p})") } else { p.to_string() };
                if blade.is_empty() {
                    coef
                } else {
                    format!("{coef} {}", blade.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A differential 1-form `Σ α_i dx_i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OneForm {
    components: Vec<Poly>,
}

impl OneForm {
    pub fn new(components: Vec<Poly>) -> Result<Self> {
        let m = components.len();
        if let Some(bad) = components.iter().find(|p| p.num_vars() != m) {
            return Err(Error::VarCountMismatch { left: m, right: bad.num_vars() });
        }
        Ok(OneForm { components })
    }

    pub fn zero(num_vars: usize) -> Self {
        OneForm { components: vec![Poly::zero(num_vars); num_vars] }
    }

    /// The exact form `dF`.
    pub fn exact(f: &Poly) -> Self {
        OneForm { components: f.gradient() }
    }

    pub fn num_vars(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    /// `dα` as the skew matrix `w_ij = ∂_i α_j − ∂_j α_i`, the coefficient of
    /// `dx_i∧dx_j` for `i < j`.
    pub fn exterior_derivative(&self) -> Vec<Vec<Poly>> {
        let m = self.num_vars();
        (0..m)
            .map(|i| (0..m).map(|j| &self.components[j].d(i) - &self.components[i].d(j)).collect())
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.exterior_derivative().iter().flatten().all(Poly::is_zero)
    }

    /// Components of the 3-form `α∧dα` at increasing triples, zero ones omitted.
    pub fn alpha_wedge_dalpha(&self) -> BTreeMap<[usize; 3], Poly> {
        let w = self.exterior_derivative();
        let a = &self.components;
        let m = self.num_vars();
        let mut out = BTreeMap::new();
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let c = &(&(&a[i] * &w[j][k]) - &(&a[j] * &w[i][k])) + &(&a[k] * &w[i][j]);
                    if !c.is_zero() {
                        out.insert([i, j, k], c);
                    }
                }
            }
        }
        out
    }

    pub fn is_integrable(&self) -> bool {
        self.alpha_wedge_dalpha().is_empty()
    }

    pub fn evaluate_linear_coefficients(&self) -> Option<Vec<Vec<Rational>>> {
        let m = self.num_vars();
        let mut rows = Vec::with_capacity(m);
        for p in &self.components {
            if p.degree().is_some_and(|d| d > 1) || !p.constant_term().is_zero() {
                return None;
            }
            rows.push(
                (0..m)
                    .map(|j| {
                        let mut e = vec![0; m];
                        e[j] = 1;
                        p.coefficient(&e)
                    })
                    .collect(),
            );
        }
        Some(rows)
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| format!("({p}) dx{}", i + 1))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Formats a constant multivector coefficient list for diagnostics.
pub fn describe_constant(v: &MultiVector) -> String {
    v.components()
        .map(|(i, p)| format!("{:?}:{}", i.iter().map(|x| x + 1).collect::<Vec<_>>(), format_rational(&p.constant_term())))
        .collect::<Vec<_>>()
        .join(", ")
}

impl MultiVector {
    /// `true` if every coefficient is a constant.
    pub fn is_constant(&self) -> bool {
        self.components.values().all(Poly::is_constant)
    }

    /// Constant blade with coefficient `c`.
    pub fn constant_blade(num_vars: usize, indices: &[usize], c: Rational) -> Self {
        let mut v = Self::zero(num_vars, indices.len());
        v.add_term(indices, Poly::constant(num_vars, c));
        v
    }
}
