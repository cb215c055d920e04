//! Exponent vectors and graded-lexicographic monomial enumeration.

use std::cmp::Ordering;
use std::fmt;

/// Exponent vector of a monomial in `n` variables.
///
/// The `Ord` instance is graded lexicographic with the first variable most
/// significant: compare total degree first, then the exponent vectors
/// lexicographically. This is the one monomial order used throughout the
/// crate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn zero(nvars: usize) -> Self {
        Exponent(vec![0; nvars])
    }

    pub fn from_slice(e: &[u32]) -> Self {
        Exponent(e.to_vec())
    }

    /// Unit vector: the exponent of the variable `i`.
    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Exponent(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.len(), other.len());
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn add_unit(&self, i: usize) -> Exponent {
        let mut e = self.0.clone();
        e[i] += 1;
        Exponent(e)
    }

    /// Componentwise difference, `None` if any component would go negative.
    pub fn checked_sub(&self, other: &Exponent) -> Option<Exponent> {
        debug_assert_eq!(self.len(), other.len());
        let mut out = Vec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Exponent(out))
    }

    pub fn sub_unit(&self, i: usize) -> Option<Exponent> {
        if self.0[i] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i] -= 1;
        Some(Exponent(e))
    }

    pub fn divides(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// beta! as an i64; total degrees in this crate stay far below overflow.
    pub fn factorial(&self) -> i64 {
        self.0.iter().map(|&e| factorial(e)).product()
    }

    /// Pads with `extra` trailing zero exponents (embedding into a larger
    /// variable ring).
    pub fn pad(&self, extra: usize) -> Exponent {
        let mut e = self.0.clone();
        e.extend(std::iter::repeat(0).take(extra));
        Exponent(e)
    }

    /// Prepends `extra` leading zero exponents.
    pub fn shift_right(&self, extra: usize) -> Exponent {
        let mut e = vec![0; extra];
        e.extend_from_slice(&self.0);
        Exponent(e)
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

pub fn factorial(e: u32) -> i64 {
    (1..=e as i64).product()
}

pub fn binomial(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// All exponents in `n` variables of total degree exactly `d`.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(pos: usize, rem: u32, cur: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if pos + 1 == cur.len() {
            cur[pos] = rem;
            out.push(Exponent::from_slice(cur));
            return;
        }
        for e in 0..=rem {
            cur[pos] = e;
            rec(pos + 1, rem - e, cur, out);
        }
    }
    if nvars == 0 {
        if d == 0 {
            out.push(Exponent::zero(0));
        }
        return out;
    }
    rec(0, d, &mut cur, &mut out);
    out.sort();
    out
}

/// All exponents of total degree at most `d`, sorted ascending in the graded
/// lexicographic order.
pub fn monomials_upto(nvars: usize, d: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    for deg in 0..=d {
        out.extend(monomials_of_degree(nvars, deg));
    }
    out
}

/// Number of monomials of degree at most `d` in `n` variables: C(d+n, n).
pub fn count_monomials_upto(nvars: usize, d: u32) -> usize {
    let mut acc: u128 = 1;
    for i in 1..=nvars as u128 {
        acc = acc * (d as u128 + i) / i;
    }
    acc as usize
}
