//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A [`Poly`] lives on a fixed chart with `num_vars` coordinates
//! `x1, ..., xm`. Terms are kept in a `BTreeMap` keyed by exponent vector, so
//! iteration order (and therefore serialization) is deterministic. Zero
//! coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number; always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Exponent vector of a monomial, one entry per chart coordinate.
pub type Exponents = Vec<u32>;

/// Builds `num/den` as a reduced rational. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-1.25"` or `"1e-3"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(s) {
        return Ok(Rational::from_integer(n));
    }
    parse_decimal(s).ok_or_else(|| Error::Parse(format!("cannot read {s:?} as a rational")))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&digits).ok()?);
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if neg { -value } else { value })
}

/// Formats a rational as `"p"` or `"p/q"`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    num_vars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl Poly {
    pub fn zero(num_vars: usize) -> Self {
        Poly { num_vars, terms: BTreeMap::new() }
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, Rational::one())
    }

    pub fn constant(num_vars: usize, c: Rational) -> Self {
        Self::monomial(num_vars, vec![0; num_vars], c)
    }

    /// The coordinate function `x_{i+1}` (0-based `i`).
    pub fn var(num_vars: usize, i: usize) -> Self {
        assert!(i < num_vars, "coordinate index {i} out of range for {num_vars} variables");
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Self::monomial(num_vars, e, Rational::one())
    }

    pub fn monomial(num_vars: usize, exps: Exponents, c: Rational) -> Self {
        assert_eq!(exps.len(), num_vars, "exponent vector length must equal num_vars");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Poly { num_vars, terms }
    }

    /// Sums the given terms, merging repeated exponent vectors.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = Poly::zero(num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::VarCountMismatch { left: num_vars, right: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&a| a == 0))
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&vec![0; self.num_vars]).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same(&self, other: &Poly) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: other.num_vars });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        let mut out = Poly::zero(self.num_vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.num_vars);
        }
        Poly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.num_vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to the 0-based coordinate `i`.
    pub fn partial(&self, i: usize) -> Result<Poly> {
        if i >= self.num_vars {
            return Err(Error::IndexOutOfRange { index: i + 1, bound: self.num_vars });
        }
        let mut out = Poly::zero(self.num_vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c * Rational::from_integer(BigInt::from(e[i])));
        }
        Ok(out)
    }

    /// Partial derivative, panicking on a bad index. Internal callers only
    /// pass indices bounded by `num_vars`.
    pub(crate) fn d(&self, i: usize) -> Poly {
        self.partial(i).expect("coordinate index in range")
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.num_vars).map(|i| self.d(i)).collect()
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.num_vars {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: point.len() });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &a) in point.iter().zip(e) {
                if a > 0 {
                    t *= num_traits::pow(x.clone(), a as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating-point evaluation; used only by the numeric integrator.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.num_vars);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(rational_to_f64(c), |t, (&a, &x)| t * x.powi(a as i32))
            })
            .sum()
    }

    /// Substitutes polynomials for the coordinates: `p(q_1, ..., q_m)`.
    pub fn compose(&self, subs: &[Poly]) -> Result<Poly> {
        if subs.len() != self.num_vars {
            return Err(Error::VarCountMismatch { left: self.num_vars, right: subs.len() });
        }
        let target = subs.first().map_or(0, |q| q.num_vars);
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (q, &a) in subs.iter().zip(e) {
                if a > 0 {
                    t = t.checked_mul(&q.pow(a))?;
                }
            }
            out = out.checked_add(&t)?;
        }
        Ok(out)
    }

    /// Re-embeds the polynomial on a chart with `num_vars` coordinates,
    /// keeping the first `min(old, new)` coordinates. Fails if a dropped
    /// coordinate actually occurs.
    pub fn with_num_vars(&self, num_vars: usize) -> Result<Poly> {
        let mut out = Poly::zero(num_vars);
        for (e, c) in &self.terms {
            if e.iter().skip(num_vars).any(|&a| a > 0) {
                return Err(Error::VarCountMismatch { left: self.num_vars, right: num_vars });
            }
            let mut ne = vec![0; num_vars];
            for (slot, &a) in ne.iter_mut().zip(e) {
                *slot = a;
            }
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Every monomial of total degree `lo..=hi`, in graded lexicographic order.
    pub fn monomials_up_to(num_vars: usize, lo: u32, hi: u32) -> Vec<Poly> {
        let mut out = Vec::new();
        for deg in lo..=hi {
            let mut exps = Vec::new();
            compositions(num_vars, deg, &mut vec![0; num_vars], 0, &mut exps);
            out.extend(exps.into_iter().map(|e| Poly::monomial(num_vars, e, Rational::one())));
        }
        out
    }
}

fn compositions(m: usize, remaining: u32, cur: &mut Vec<u32>, pos: usize, out: &mut Vec<Exponents>) {
    if m == 0 {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos == m - 1 {
        cur[pos] = remaining;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        compositions(m, remaining - a, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        self.checked_add(rhs).expect("polynomial variable counts differ")
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        self.checked_sub(rhs).expect("polynomial variable counts differ")
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        self.checked_mul(rhs).expect("polynomial variable counts differ")
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Text form: `c x1^a1 x2^a2 ...` terms joined by `+`/`-`, highest degree first.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (k, (e, c)) in ordered.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| if a == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, a) })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else {
                if !abs.is_one() {
                    write!(f, "{} ", format_rational(&abs))?;
                }
                write!(f, "{}", vars.join(" "))?;
            }
        }
        Ok(())
    }
}

impl Poly {
    /// Parses the text form produced by `Display` on a chart with `num_vars`
    /// coordinates. Factors inside a term may be separated by spaces or `*`.
    pub fn parse(num_vars: usize, text: &str) -> Result<Poly> {
        let cleaned = text.replace('*', " ");
        // Split into signed terms at every top-level `+` or `-`.
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut negative = false;
        let mut current = String::new();
        for ch in cleaned.chars() {
            if ch == '+' || ch == '-' {
                if !current.trim().is_empty() {
                    pieces.push((negative, std::mem::take(&mut current)));
                    negative = false;
                }
                if ch == '-' {
                    negative = !negative;
                }
            } else {
                current.push(ch);
            }
        }
        if current.trim().is_empty() {
            if !pieces.is_empty() || cleaned.contains(['+', '-']) || cleaned.trim().is_empty() {
                return Err(Error::Parse(format!("incomplete polynomial {text:?}")));
            }
        } else {
            pieces.push((negative, current));
        }
        let mut out = Poly::zero(num_vars);
        for (neg, term) in pieces {
            let mut coef = if neg { -Rational::one() } else { Rational::one() };
            let mut exps = vec![0u32; num_vars];
            for tok in term.split_whitespace() {
                if let Some(var) = tok.strip_prefix('x') {
                    let (idx, pow) = match var.split_once('^') {
                        Some((i, p)) => {
                            let p = p.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?;
                            (i, p)
                        }
                        None => (var, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| Error::Parse(format!("bad variable {tok:?}")))?;
                    if idx == 0 || idx > num_vars {
                        return Err(Error::IndexOutOfRange { index: idx, bound: num_vars });
                    }
                    exps[idx - 1] += pow;
                } else {
                    coef *= parse_rational(tok)?;
                }
            }
            out.add_term(exps, coef);
        }
        Ok(out)
    }
}
