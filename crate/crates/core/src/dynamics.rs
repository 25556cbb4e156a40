//! Nambu dynamics: Hamiltonian fields of n-Poisson tensors, a fixed-step RK4
//! integrator with first-integral monitoring, and two worked systems (Kepler
//! in action-angle variables, a spin in a magnetic field).
//!
//! Rational functions appear only as pointwise scale factors and in the
//! hereditary bracket table; the exact checkers never see them.

use std::fmt;

use crate::error::{Error, Result};
use crate::multivec::{MultiVector, VectorField};
use crate::npoisson::is_n_poisson;
use crate::poly::{int, rat, rational_to_f64, Poly, Rational};

/// Quotient of two polynomials in the same variables.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if num.num_vars() != den.num_vars() {
            return Err(Error::VarCountMismatch { left: num.num_vars(), right: den.num_vars() });
        }
        if den.is_zero() {
            return Err(Error::Numeric("zero denominator".into()));
        }
        Ok(RationalFunction { num, den }.reduced())
    }

    pub fn from_poly(p: Poly) -> Self {
        let den = Poly::one(p.num_vars());
        RationalFunction { num: p, den }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels a common monomial factor when the denominator is a monomial.
    fn reduced(self) -> Self {
        if self.den.num_terms() != 1 || self.num.is_zero() {
            return self;
        }
        let (dexp, dc) = self.den.terms().next().map(|(e, c)| (e.clone(), c.clone())).expect("one term");
        let common: Vec<u32> = (0..dexp.len())
            .map(|i| self.num.terms().map(|(e, _)| e[i]).min().unwrap_or(0).min(dexp[i]))
            .collect();
        let shift = |p: &Poly| {
            Poly::from_terms(
                p.num_vars(),
                p.terms().map(|(e, c)| (e.iter().zip(&common).map(|(a, b)| a - b).collect(), c / &dc)),
            )
            .expect("same variables")
        };
        RationalFunction { num: shift(&self.num), den: shift(&self.den) }
    }

    pub fn mul(&self, other: &RationalFunction) -> Result<Self> {
        Self::new(self.num.checked_mul(&other.num)?, self.den.checked_mul(&other.den)?)
    }

    pub fn add(&self, other: &RationalFunction) -> Result<Self> {
        let num = self.num.checked_mul(&other.den)?.checked_add(&other.num.checked_mul(&self.den)?)?;
        Self::new(num, self.den.checked_mul(&other.den)?)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Quotient rule.
    pub fn partial(&self, i: usize) -> Result<Self> {
        let num = self.num.partial(i)?.checked_mul(&self.den)?.checked_sub(&self.num.checked_mul(&self.den.partial(i)?)?)?;
        Self::new(num, self.den.pow(2))
    }

    /// `None` on the pole set or when the value is not finite.
    pub fn eval_f64(&self, x: &[f64]) -> Option<f64> {
        let d = self.den.eval_f64(x);
        let v = self.num.eval_f64(x) / d;
        (d != 0.0 && v.is_finite()).then_some(v)
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one(self.den.num_vars()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// An n-Poisson tensor with `n − 1` Hamiltonians, optionally multiplied by a
/// rational scale factor that is only ever evaluated pointwise.
#[derive(Clone, Debug)]
pub struct NambuSystem {
    tensor: MultiVector,
    hamiltonians: Vec<Poly>,
    factor: Option<RationalFunction>,
}

impl NambuSystem {
    pub fn new(tensor: MultiVector, hamiltonians: Vec<Poly>) -> Result<Self> {
        if tensor.degree() < 1 || hamiltonians.len() + 1 != tensor.degree() {
            return Err(Error::ArityMismatch { expected: tensor.degree().saturating_sub(1), got: hamiltonians.len() });
        }
        for h in &hamiltonians {
            if h.num_vars() != tensor.num_vars() {
                return Err(Error::VarCountMismatch { left: tensor.num_vars(), right: h.num_vars() });
            }
        }
        // f ∂_1∧…∧∂_m is Poisson for every f, so the oracle is only needed below top degree
        if tensor.degree() < tensor.num_vars() {
            let v = is_n_poisson(&tensor);
            if !v.holds {
                return Err(Error::Precondition(format!(
                    "tensor is not n-Poisson, witness {:?}",
                    v.witness.unwrap_or_default().iter().map(ToString::to_string).collect::<Vec<_>>()
                )));
            }
        }
        Ok(NambuSystem { tensor, hamiltonians, factor: None })
    }

    pub fn with_factor(mut self, factor: RationalFunction) -> Result<Self> {
        if factor.num().num_vars() != self.dim() {
            return Err(Error::VarCountMismatch { left: self.dim(), right: factor.num().num_vars() });
        }
        self.factor = Some(factor);
        Ok(self)
    }

    pub fn tensor(&self) -> &MultiVector {
        &self.tensor
    }

    pub fn hamiltonians(&self) -> &[Poly] {
        &self.hamiltonians
    }

    pub fn factor(&self) -> Option<&RationalFunction> {
        self.factor.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.tensor.num_vars()
    }

    /// Field values at `x`, including the scale factor.
    pub fn field_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        let field = dynamics_field(self)?;
        eval_field(&field, self.factor.as_ref(), x)
    }

    /// `X(H_i)` for every Hamiltonian; all vanish identically.
    pub fn first_integral_residuals(&self) -> Result<Vec<Poly>> {
        let field = dynamics_field(self)?;
        self.hamiltonians.iter().map(|h| field.derive(h)).collect()
    }
}

/// The polynomial part of the equation of motion `df/dt = {H_1,…,H_{n−1},f}`.
pub fn dynamics_field(sys: &NambuSystem) -> Result<VectorField> {
    sys.tensor.hamiltonian_field(&sys.hamiltonians)
}

fn eval_field(field: &VectorField, factor: Option<&RationalFunction>, x: &[f64]) -> Result<Vec<f64>> {
    let m = field.num_vars();
    if x.len() != m {
        return Err(Error::DimMismatch { expected: m, got: x.len() });
    }
    let scale = match factor {
        Some(r) => r.eval_f64(x).ok_or_else(|| Error::Numeric(format!("scale factor singular at {x:?}")))?,
        None => 1.0,
    };
    Ok((0..m).map(|i| scale * field.get(&[i]).eval_f64(x)).collect())
}

/// `L_X Λ = 0` as a polynomial identity.
pub fn check_preserved_bracket(field: &VectorField, lambda: &MultiVector) -> Result<bool> {
    Ok(MultiVector::lie_derivative(field, lambda)?.is_zero())
}

/// The bivector `F⌋(f ∂_1∧∂_2∧∂_3)` of the hereditary bracket with `F` frozen.
pub fn hereditary_bivector(f: &Poly, big_f: &Poly) -> Result<MultiVector> {
    if f.num_vars() != 3 || big_f.num_vars() != 3 {
        return Err(Error::DimMismatch { expected: 3, got: f.num_vars().max(big_f.num_vars()) });
    }
    MultiVector::volume(3).mul_poly(f)?.contract(big_f)
}

/// `{S_j,S_k} = f ε_{jkl} ∂F/∂S_l` for `j, k = 1..3`. `F` may be a rational
/// function (for instance with a power of `S_3` in the denominator).
pub fn hereditary_poisson_table(f: &Poly, big_f: &RationalFunction) -> Result<[[RationalFunction; 3]; 3]> {
    if f.num_vars() != 3 || big_f.num().num_vars() != 3 {
        return Err(Error::DimMismatch { expected: 3, got: f.num_vars() });
    }
    let fr = RationalFunction::from_poly(f.clone());
    let grad: Vec<RationalFunction> = (0..3).map(|l| big_f.partial(l)).collect::<Result<_>>()?;
    let zero = RationalFunction::from_poly(Poly::zero(3));
    let mut table: [[RationalFunction; 3]; 3] = Default::default();
    for (j, row) in table.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            *cell = if j == k {
                zero.clone()
            } else {
                let l = 3 - j - k;
                let eps = levi_civita(j, k, l);
                fr.mul(&grad[l])?.scale(&int(eps))
            };
        }
    }
    Ok(table)
}

impl Default for RationalFunction {
    fn default() -> Self {
        RationalFunction::from_poly(Poly::zero(3))
    }
}

fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// Pointwise bracket table for `f = ½`,
/// `F = S_1² + S_2² + (cosh(2λS_3)/sinh λ − 1/λ)/(2λ)`.
pub fn nonstandard_spin_table(lambda: f64, s: [f64; 3]) -> [[f64; 3]; 3] {
    let grad = [2.0 * s[0], 2.0 * s[1], (2.0 * lambda * s[2]).sinh() / lambda.sinh()];
    let mut t = [[0.0; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            if j != k {
                let l = 3 - j - k;
                t[j][k] = 0.5 * levi_civita(j, k, l) as f64 * grad[l];
            }
        }
    }
    t
}

/// A spin `S ∈ R³` in a magnetic field `B` with moment `μ`, described by the
/// ternary tensor `f ∂_1∧∂_2∧∂_3` and a frozen function `F`.
#[derive(Clone, Debug)]
pub struct SpinSystem {
    pub b: [Rational; 3],
    pub mu: Rational,
    pub f: Poly,
    pub big_f: Poly,
}

impl SpinSystem {
    /// `f = ½`, `F = S²`.
    pub fn standard(b: [Rational; 3], mu: Rational) -> Self {
        let s = |i| Poly::var(3, i);
        let s2 = &(&(&s(0) * &s(0)) + &(&s(1) * &s(1))) + &(&s(2) * &s(2));
        SpinSystem { b, mu, f: Poly::constant(3, rat(1, 2)), big_f: s2 }
    }

    /// `H = −μ S·B`.
    pub fn hamiltonian(&self) -> Poly {
        (0..3).fold(Poly::zero(3), |acc, i| &acc + &Poly::var(3, i).scale(&(-&self.mu * &self.b[i])))
    }

    pub fn s_dot_b(&self) -> Poly {
        (0..3).fold(Poly::zero(3), |acc, i| &acc + &Poly::var(3, i).scale(&self.b[i]))
    }

    pub fn tensor(&self) -> Result<MultiVector> {
        MultiVector::volume(3).mul_poly(&self.f)
    }

    /// Hamiltonians ordered `(H, F)` so that the field is `μ S×B` in the
    /// standard description.
    pub fn nambu_system(&self) -> Result<NambuSystem> {
        NambuSystem::new(self.tensor()?, vec![self.hamiltonian(), self.big_f.clone()])
    }

    /// Exact solution of `dS/dt = μ S×B`: rotation about `B` by `−μ|B|t`.
    pub fn closed_form(&self, s0: [f64; 3], t: f64) -> [f64; 3] {
        let b: Vec<f64> = self.b.iter().map(rational_to_f64).collect();
        let norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return s0;
        }
        let k = [b[0] / norm, b[1] / norm, b[2] / norm];
        let theta = -rational_to_f64(&self.mu) * norm * t;
        let (sin, cos) = theta.sin_cos();
        let kxs = [k[1] * s0[2] - k[2] * s0[1], k[2] * s0[0] - k[0] * s0[2], k[0] * s0[1] - k[1] * s0[0]];
        let kds = k[0] * s0[0] + k[1] * s0[1] + k[2] * s0[2];
        std::array::from_fn(|i| s0[i] * cos + kxs[i] * sin + k[i] * kds * (1.0 - cos))
    }
}

/// Kepler flow in action-angle variables `(J_1,J_2,J_3,φ_1,φ_2,φ_3)`: the
/// volume 6-vector with Hamiltonians `J_1, J_2, J_3, φ_1−φ_2, φ_2−φ_3` and
/// pointwise factor `ν = 2mk²/(J_1+J_2+J_3)³`.
pub fn kepler_action_angle(mass: &Rational, k: &Rational) -> Result<NambuSystem> {
    let v = |i| Poly::var(6, i);
    let hams = vec![v(0), v(1), v(2), &v(3) - &v(4), &v(4) - &v(5)];
    let total = &(&v(0) + &v(1)) + &v(2);
    let nu = RationalFunction::new(Poly::constant(6, int(2) * mass * k * k), total.pow(3))?;
    NambuSystem::new(MultiVector::volume(6), hams)?.with_factor(nu)
}

/// `ν = 2mk²/(ΣJ)³` at a point.
pub fn kepler_nu(mass: f64, k: f64, j: [f64; 3]) -> Result<f64> {
    let s = j[0] + j[1] + j[2];
    if s == 0.0 {
        return Err(Error::Numeric("ΣJ = 0 is singular".into()));
    }
    Ok(2.0 * mass * k * k / s.powi(3))
}

/// Integrated path with first-integral monitoring.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// `|M_i(x(t)) − M_i(x_0)|` per step and monitor.
    pub drift_history: Vec<Vec<f64>>,
    /// Maximum of the history per monitor.
    pub max_drift: Vec<f64>,
    /// Set when integration stopped early on a non-finite or singular state.
    pub error: Option<String>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Rows `t, state…, drift…` with a header.
    pub fn to_csv(&self) -> String {
        let m = self.states.first().map_or(0, Vec::len);
        let k = self.max_drift.len();
        let mut out = String::from("t");
        (1..=m).for_each(|i| out.push_str(&format!(",x{i}")));
        (1..=k).for_each(|i| out.push_str(&format!(",drift{i}")));
        out.push('\n');
        for ((t, x), d) in self.times.iter().zip(&self.states).zip(&self.drift_history) {
            out.push_str(&format!("{t}"));
            x.iter().chain(d).for_each(|v| out.push_str(&format!(",{v:e}")));
            out.push('\n');
        }
        out
    }
}

/// Classical fixed-step RK4 on `dx/dt = rhs(x)`.
pub fn rk4<F>(rhs: F, x0: &[f64], h: f64, steps: usize, monitors: &[Poly]) -> Result<Trajectory>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Precondition("step size must be positive".into()));
    }
    if steps == 0 {
        return Err(Error::Precondition("need at least one step".into()));
    }
    for mon in monitors {
        if mon.num_vars() != x0.len() {
            return Err(Error::VarCountMismatch { left: x0.len(), right: mon.num_vars() });
        }
    }
    let start: Vec<f64> = monitors.iter().map(|p| p.eval_f64(x0)).collect();
    let drift = |x: &[f64]| -> Vec<f64> { monitors.iter().zip(&start).map(|(p, s)| (p.eval_f64(x) - s).abs()).collect() };
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.to_vec()],
        drift_history: vec![vec![0.0; monitors.len()]],
        max_drift: vec![0.0; monitors.len()],
        error: None,
    };
    let axpy = |x: &[f64], a: f64, k: &[f64]| -> Vec<f64> { x.iter().zip(k).map(|(xi, ki)| xi + a * ki).collect() };
    let mut x = x0.to_vec();
    for step in 1..=steps {
        let next = (|| -> Result<Vec<f64>> {
            let k1 = rhs(&x)?;
            let k2 = rhs(&axpy(&x, h / 2.0, &k1))?;
            let k3 = rhs(&axpy(&x, h / 2.0, &k2))?;
            let k4 = rhs(&axpy(&x, h, &k3))?;
            Ok((0..x.len()).map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect())
        })();
        match next {
            Ok(nx) if nx.iter().all(|v| v.is_finite()) => x = nx,
            Ok(_) => {
                traj.error = Some(format!("non-finite state at step {step}"));
                break;
            }
            Err(e) => {
                traj.error = Some(format!("step {step}: {e}"));
                break;
            }
        }
        let d = drift(&x);
        for (m, v) in traj.max_drift.iter_mut().zip(&d) {
            *m = m.max(*v);
        }
        traj.times.push(step as f64 * h);
        traj.states.push(x.clone());
        traj.drift_history.push(d);
    }
    Ok(traj)
}

/// RK4 on a polynomial vector field.
pub fn rk4_integrate(field: &VectorField, x0: &[f64], h: f64, steps: usize, monitors: &[Poly]) -> Result<Trajectory> {
    if field.degree() != 1 {
        return Err(Error::Degree(format!("expected a vector field, got degree {}", field.degree())));
    }
    if x0.len() != field.num_vars() {
        return Err(Error::DimMismatch { expected: field.num_vars(), got: x0.len() });
    }
    rk4(|x| eval_field(field, None, x), x0, h, steps, monitors)
}

/// RK4 on a Nambu system, monitoring its Hamiltonians.
pub fn integrate_system(sys: &NambuSystem, x0: &[f64], h: f64, steps: usize) -> Result<Trajectory> {
    if x0.len() != sys.dim() {
        return Err(Error::DimMismatch { expected: sys.dim(), got: x0.len() });
    }
    let field = dynamics_field(sys)?;
    // a singular start is an input error, later singularities only stop the run
    eval_field(&field, sys.factor(), x0)?;
    rk4(|x| eval_field(&field, sys.factor(), x), x0, h, steps, sys.hamiltonians())
}

/// Largest absolute difference between two states.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
