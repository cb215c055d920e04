//! Sparse multivariate polynomials over a generic coefficient domain.

use crate::exponent::{binomial, Exponent};
use crate::scalar::Scalar;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Error type shared by the in-process API.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainError {
    DimensionMismatch { expected: usize, got: usize },
    NonSquare { rows: usize, cols: usize },
    EmptyMatrix,
    InvalidArgument(String),
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            DomainError::NonSquare { rows, cols } => {
                write!(f, "matrix is not square: {rows}x{cols}")
            }
            DomainError::EmptyMatrix => write!(f, "empty matrix"),
            DomainError::InvalidArgument(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for DomainError {}

/// Sparse polynomial: a term map keyed by exponent vector. No zero
/// coefficients are stored; the term map iterates in ascending graded-lex
/// order.
#[derive(Clone, PartialEq)]
pub struct Polynomial<K: Scalar> {
    nvars: usize,
    terms: BTreeMap<Exponent, K>,
}

impl<K: Scalar> Polynomial<K> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: K) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Exponent::zero(nvars), c);
        p
    }

    pub fn monomial(nvars: usize, e: Exponent, c: K) -> Self {
        assert_eq!(e.len(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(e, c);
        p
    }

    /// The variable `x_{i+1}` as a polynomial.
    pub fn variable(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, Exponent::unit(nvars, i), K::one())
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, K)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &K)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> K {
        self.terms.get(e).cloned().unwrap_or_else(K::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Exponent::degree).max().unwrap_or(0)
    }

    /// Largest exponent in graded-lex order; `None` for the zero polynomial.
    pub fn leading_exponent(&self) -> Option<&Exponent> {
        self.terms.keys().next_back()
    }

    pub fn add_term(&mut self, e: Exponent, c: K) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn scaled(&self, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.clone() * c.clone());
        }
        out
    }

    /// Applies `f` to every coefficient, converting the domain.
    pub fn map_coeffs<L: Scalar>(&self, f: impl Fn(&K) -> L) -> Polynomial<L> {
        let mut out = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn to_approx(&self) -> Polynomial<K::Approx> {
        self.map_coeffs(|c| c.to_approx())
    }

    /// Embeds into a ring with `extra` additional trailing variables.
    pub fn pad_vars(&self, extra: usize) -> Self {
        let mut out = Self::zero(self.nvars + extra);
        for (e, c) in &self.terms {
            out.add_term(e.pad(extra), c.clone());
        }
        out
    }

    /// Iterated partial derivative by the multi-index `beta` (no 1/beta!
    /// factor).
    pub fn diff(&self, beta: &Exponent) -> Self {
        assert_eq!(beta.len(), self.nvars);
        let mut out = Self::zero(self.nvars);
        'term: for (e, c) in &self.terms {
            let mut coef = c.clone();
            let mut shifted = Vec::with_capacity(self.nvars);
            for i in 0..self.nvars {
                let (ei, bi) = (e.get(i), beta.get(i));
                if ei < bi {
                    continue 'term;
                }
                // falling factorial e_i (e_i-1) ... (e_i-b_i+1)
                for k in 0..bi {
                    coef = coef * K::from_int((ei - k) as i64);
                }
                shifted.push(ei - bi);
            }
            out.add_term(Exponent::from_slice(&shifted), coef);
        }
        out
    }

    pub fn diff_var(&self, i: usize) -> Self {
        self.diff(&Exponent::unit(self.nvars, i))
    }

    pub fn eval(&self, pt: &[K]) -> K {
        assert_eq!(pt.len(), self.nvars);
        // power tables avoid recomputing x_i^e across terms
        let mut maxes = vec![0u32; self.nvars];
        for e in self.terms.keys() {
            for i in 0..self.nvars {
                maxes[i] = maxes[i].max(e.get(i));
            }
        }
        let powers: Vec<Vec<K>> = (0..self.nvars)
            .map(|i| {
                let mut row = Vec::with_capacity(maxes[i] as usize + 1);
                row.push(K::one());
                for k in 1..=maxes[i] as usize {
                    let prev = row[k - 1].clone();
                    row.push(prev * pt[i].clone());
                }
                row
            })
            .collect();
        let mut acc = K::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for i in 0..self.nvars {
                let ei = e.get(i);
                if ei > 0 {
                    term = term * powers[i][ei as usize].clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Taylor shift: returns `q` with `q(y) = p(y + xi)`.
    ///
    /// The coefficient of `y^alpha` in the result is the normalized
    /// derivative `d^alpha(p)(xi) / alpha!`.
    pub fn shift(&self, xi: &[K]) -> Self {
        assert_eq!(xi.len(), self.nvars);
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            // expand prod_i (y_i + xi_i)^{e_i} one variable at a time
            let mut acc: Vec<(Vec<u32>, K)> = vec![(Vec::new(), c.clone())];
            for i in 0..self.nvars {
                let ei = e.get(i);
                let mut next = Vec::with_capacity(acc.len() * (ei as usize + 1));
                let mut xi_pows = Vec::with_capacity(ei as usize + 1);
                xi_pows.push(K::one());
                for k in 1..=ei as usize {
                    let prev: K = xi_pows[k - 1].clone();
                    xi_pows.push(prev * xi[i].clone());
                }
                for (stem, coef) in &acc {
                    for k in 0..=ei {
                        let b = K::from_int(binomial(ei, k));
                        let scale = b * xi_pows[(ei - k) as usize].clone();
                        if scale.is_zero() {
                            continue;
                        }
                        let mut stem2 = stem.clone();
                        stem2.push(k);
                        next.push((stem2, coef.clone() * scale));
                    }
                }
                acc = next;
            }
            for (stem, coef) in acc {
                out.add_term(Exponent::from_slice(&stem), coef);
            }
        }
        out
    }

    /// Scales so the largest coefficient magnitude is 1 (float domains) or
    /// divides out the rational content and a power of two bringing the
    /// largest coefficient into [1/2, 1) (exact domain; both operations are
    /// error-free). Keeps iterated constructions numerically and
    /// symbolically tame without leaving the ideal they generate.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let coeffs: Vec<K> = self.terms.values().cloned().collect();
        if let Some(content) = K::content(&coeffs) {
            let primitive = self.scaled(&(K::one() / content));
            let m = primitive
                .terms
                .values()
                .map(Scalar::magnitude)
                .fold(0.0f64, f64::max);
            if m.is_finite() && m > 0.0 {
                let pow2 = 2.0f64.powi(m.log2().ceil() as i32);
                if pow2.is_finite() && pow2 > 0.0 {
                    return primitive.scaled(&(K::one() / K::from_f64_lossless(pow2)));
                }
            }
            return primitive;
        }
        let m = coeffs.iter().map(Scalar::magnitude).fold(0.0f64, f64::max);
        if m == 0.0 {
            return self.clone();
        }
        let inv = K::from_f64_lossless(1.0 / m);
        self.scaled(&inv)
    }

    /// Canonical scalar-multiple representative: the monic form (leading
    /// graded-lex coefficient 1). Two polynomials are scalar multiples of
    /// each other exactly when their monic forms agree.
    pub fn monic(&self) -> Self {
        match self.leading_exponent() {
            None => self.clone(),
            Some(e) => {
                let lead = self.terms.get(e).cloned().unwrap();
                self.scaled(&(K::one() / lead))
            }
        }
    }

    /// Approximate equality for dedup: exact equality in the exact domain,
    /// coefficient-wise relative comparison otherwise.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if K::EXACT {
            return self == other;
        }
        if self.terms.len() != other.terms.len() {
            return false;
        }
        let scale = self
            .terms
            .values()
            .chain(other.terms.values())
            .map(Scalar::magnitude)
            .fold(0.0f64, f64::max)
            .max(1e-300);
        self.terms.iter().all(|(e, c)| {
            let d = other.coeff(e);
            (c.clone() - d).magnitude() <= tol * scale
        })
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        self.to_string_with_fmt(names, |c| format!("{c}"))
    }

    /// Graded-lex-descending rendering with a caller-chosen coefficient
    /// formatter (e.g. fixed 17-significant-digit floats).
    pub fn to_string_with_fmt(&self, names: &[String], fmt: impl Fn(&K) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (e, c) in self.terms.iter().rev() {
            let (mag, neg) = split_sign(&fmt(c));
            if s.is_empty() {
                if neg {
                    s.push_str("- ");
                }
            } else if neg {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            let mut factors = Vec::new();
            if mag != "1" || e.is_constant() {
                factors.push(mag);
            }
            for i in 0..self.nvars {
                let ei = e.get(i);
                if ei == 1 {
                    factors.push(names[i].clone());
                } else if ei > 1 {
                    factors.push(format!("{}^{}", names[i], ei));
                }
            }
            s.push_str(&factors.join("*"));
        }
        s
    }
}

fn split_sign(s: &str) -> (String, bool) {
    if let Some(rest) = s.strip_prefix('-') {
        (rest.to_string(), true)
    } else {
        (s.to_string(), false)
    }
}

impl<K: Scalar> fmt::Debug for Polynomial<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.to_string_with(&names))
    }
}

impl<K: Scalar> Add for Polynomial<K> {
    type Output = Polynomial<K>;
    fn add(self, rhs: Polynomial<K>) -> Polynomial<K> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self;
        for (e, c) in rhs.terms {
            out.add_term(e, c);
        }
        out
    }
}

impl<K: Scalar> Sub for Polynomial<K> {
    type Output = Polynomial<K>;
    fn sub(self, rhs: Polynomial<K>) -> Polynomial<K> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self;
        for (e, c) in rhs.terms {
            out.add_term(e, -c);
        }
        out
    }
}

impl<K: Scalar> Neg for Polynomial<K> {
    type Output = Polynomial<K>;
    fn neg(self) -> Polynomial<K> {
        let nvars = self.nvars;
        let terms = self.terms.into_iter().map(|(e, c)| (e, -c)).collect();
        Polynomial { nvars, terms }
    }
}

impl<K: Scalar> Mul for Polynomial<K> {
    type Output = Polynomial<K>;
    fn mul(self, rhs: Polynomial<K>) -> Polynomial<K> {
        (&self) * (&rhs)
    }
}

impl<K: Scalar> Mul for &Polynomial<K> {
    type Output = Polynomial<K>;
    fn mul(self, rhs: &Polynomial<K>) -> Polynomial<K> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1.add(e2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

/// A polynomial system together with variable names and an optional
/// approximate root.
#[derive(Clone, Debug)]
pub struct PolySystem<K: Scalar> {
    pub nvars: usize,
    pub polys: Vec<Polynomial<K>>,
    pub varnames: Vec<String>,
    pub point: Option<Vec<K>>,
}

impl<K: Scalar> PolySystem<K> {
    pub fn new(nvars: usize, polys: Vec<Polynomial<K>>) -> Self {
        for p in &polys {
            assert_eq!(p.nvars(), nvars);
        }
        PolySystem {
            nvars,
            polys,
            varnames: (1..=nvars).map(|i| format!("x{i}")).collect(),
            point: None,
        }
    }

    pub fn with_point(mut self, pt: Vec<K>) -> Self {
        assert_eq!(pt.len(), self.nvars);
        self.point = Some(pt);
        self
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.nvars);
        self.varnames = names;
        self
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn to_approx(&self) -> PolySystem<K::Approx> {
        PolySystem {
            nvars: self.nvars,
            polys: self.polys.iter().map(Polynomial::to_approx).collect(),
            varnames: self.varnames.clone(),
            point: self
                .point
                .as_ref()
                .map(|pt| pt.iter().map(Scalar::to_approx).collect()),
        }
    }

    /// Jacobian matrix of polynomials: entry (i, j) is d f_i / d x_j.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial<K>>> {
        self.polys
            .iter()
            .map(|p| (0..self.nvars).map(|j| p.diff_var(j)).collect())
            .collect()
    }

    pub fn eval_all(&self, pt: &[K]) -> Vec<K> {
        self.polys.iter().map(|p| p.eval(pt)).collect()
    }

    pub fn residual_max(&self, pt: &[K]) -> f64 {
        self.eval_all(pt)
            .iter()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::scalar::Rat;

    fn p(terms: &[(i64, &[u32])]) -> Polynomial<Rat> {
        Polynomial::from_terms(
            terms[0].1.len(),
            terms
                .iter()
                .map(|(c, e)| (Exponent::from_slice(e), Rat::from_int(*c))),
        )
    }

    #[test]
    fn add_cancels_and_keeps_identity() {
        let x1 = p(&[(1, &[1, 0])]);
        let neg = p(&[(-1, &[1, 0])]);
        assert!((x1.clone() + neg).is_zero());
        let q = p(&[(1, &[1, 0]), (1, &[0, 2])]);
        assert_eq!(q.clone() + Polynomial::zero(2), q);
    }

    #[test]
    fn add_collects_terms() {
        // (x1 + x2^2) + (x1^2 + x2^2) = x1 + x1^2 + 2 x2^2
        let a = p(&[(1, &[1, 0]), (1, &[0, 2])]);
        let b = p(&[(1, &[2, 0]), (1, &[0, 2])]);
        let want = p(&[(1, &[1, 0]), (1, &[2, 0]), (2, &[0, 2])]);
        assert_eq!(a + b, want);
    }

    #[test]
    fn mul_binomial_and_expansion() {
        let x1 = p(&[(1, &[1, 0])]);
        let x2 = p(&[(1, &[0, 1])]);
        assert_eq!(&x1 * &x2, p(&[(1, &[1, 1])]));

        let s = p(&[(1, &[1, 0]), (1, &[0, 1])]);
        let sq = &s * &s;
        assert_eq!(sq, p(&[(1, &[2, 0]), (2, &[1, 1]), (1, &[0, 2])]));

        // (x1 - x2 + x1^2) * x2 = x1 x2 - x2^2 + x1^2 x2
        let a = p(&[(1, &[1, 0]), (-1, &[0, 1]), (1, &[2, 0])]);
        let got = &a * &x2;
        assert_eq!(got, p(&[(1, &[1, 1]), (-1, &[0, 2]), (1, &[2, 1])]));
    }

    #[test]
    fn diff_power_rule() {
        let q = p(&[(1, &[0, 2])]);
        assert_eq!(q.diff(&Exponent::from_slice(&[0, 2])), p(&[(2, &[0, 0])]));
        let r = p(&[(1, &[1, 0]), (1, &[0, 2])]);
        assert_eq!(r.diff(&Exponent::from_slice(&[1, 0])), p(&[(1, &[0, 0])]));
    }

    #[test]
    fn diff_caprasse_fragment() {
        // d^2/(dx1 dx2) of x1^3 x3 - 4 x1 x2^2 x3 = -8 x2 x3
        let q = Polynomial::from_terms(
            4,
            [
                (Exponent::from_slice(&[3, 0, 1, 0]), Rat::from_int(1)),
                (Exponent::from_slice(&[1, 2, 1, 0]), Rat::from_int(-4)),
            ],
        );
        let d = q.diff(&Exponent::from_slice(&[1, 1, 0, 0]));
        assert_eq!(
            d,
            Polynomial::from_terms(
                4,
                [(Exponent::from_slice(&[0, 1, 1, 0]), Rat::from_int(-8))]
            )
        );
    }

    #[test]
    fn eval_simple() {
        let q = p(&[(1, &[1, 0]), (1, &[0, 2])]);
        assert!(q.eval(&[Rat::from_int(0), Rat::from_int(0)]).is_zero());
        let r = p(&[(1, &[2, 0]), (1, &[0, 2])]);
        assert_eq!(
            r.eval(&[Rat::from_int(1), Rat::from_int(1)]),
            Rat::from_int(2)
        );
    }

    #[test]
    fn taylor_shift_univariate() {
        // shift(x^2, 1) = y^2 + 2y + 1
        let q = Polynomial::from_terms(1, [(Exponent::from_slice(&[2]), Rat::from_int(1))]);
        let s = q.shift(&[Rat::from_int(1)]);
        assert_eq!(
            s,
            Polynomial::from_terms(
                1,
                [
                    (Exponent::from_slice(&[2]), Rat::from_int(1)),
                    (Exponent::from_slice(&[1]), Rat::from_int(2)),
                    (Exponent::from_slice(&[0]), Rat::from_int(1)),
                ]
            )
        );
        // shift by 0 is the identity
        assert_eq!(q.shift(&[Rat::from_int(0)]), q);
    }

    #[test]
    fn shift_kills_constant_term_at_root() {
        // z + z^2 - 7x^3 - 8x^2 at (0, 0, -1) (variables x, y, z)
        let q = Polynomial::from_terms(
            3,
            [
                (Exponent::from_slice(&[0, 0, 1]), Rat::from_int(1)),
                (Exponent::from_slice(&[0, 0, 2]), Rat::from_int(1)),
                (Exponent::from_slice(&[3, 0, 0]), Rat::from_int(-7)),
                (Exponent::from_slice(&[2, 0, 0]), Rat::from_int(-8)),
            ],
        );
        let s = q.shift(&[Rat::from_int(0), Rat::from_int(0), Rat::from_int(-1)]);
        assert!(s.coeff(&Exponent::zero(3)).is_zero());
    }

    #[test]
    fn display_descending() {
        let q = p(&[(1, &[1, 0]), (-4, &[1, 1]), (2, &[0, 1])]);
        let names = vec!["x1".to_string(), "x2".to_string()];
        assert_eq!(q.to_string_with(&names), "- 4*x1*x2 + x1 + 2*x2");
    }
}
