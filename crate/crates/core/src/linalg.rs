//! Dense matrices over the coefficient domain with tolerance-aware rank,
//! null space, reduced echelon form, and determinants.
//!
//! Rank decisions are exact in the exact domain and threshold-based in the
//! float domains. Large kernels (Macaulay matrices) go through Householder
//! QR with column pivoting; rank thresholds there compare the triangular
//! factor's diagonal against its largest entry, which tracks the singular
//! value gap closely on the structured matrices this crate produces.

use crate::poly::DomainError;
use crate::scalar::{FloatScalar, Scalar};

use std::ops::{Add, Mul, Sub};

#[derive(Clone, PartialEq)]
pub struct Matrix<K> {
    rows: usize,
    cols: usize,
    data: Vec<K>,
}

impl<K: Scalar> Matrix<K> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![K::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, K::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> K) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<K>>) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nr * nc);
        for r in rows {
            assert_eq!(r.len(), nc);
            data.extend(r);
        }
        Matrix {
            rows: nr,
            cols: nc,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &K {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: K) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[K] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[K]) -> Vec<K> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = K::zero();
                for c in 0..self.cols {
                    acc = acc + self.get(r, c).clone() * v[c].clone();
                }
                acc
            })
            .collect()
    }

    pub fn matmul(&self, other: &Matrix<K>) -> Matrix<K> {
        assert_eq!(self.cols, other.rows);
        Matrix::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = K::zero();
            for k in 0..self.cols {
                acc = acc + self.get(r, k).clone() * other.get(k, c).clone();
            }
            acc
        })
    }

    pub fn transpose(&self) -> Matrix<K> {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn map<L: Scalar>(&self, f: impl Fn(&K) -> L) -> Matrix<L> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }
}

impl<K: Scalar> std::fmt::Debug for Matrix<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Outcome of a rank computation: the permutations place a numerically
/// invertible `rank x rank` block in the leading position.
#[derive(Clone, Debug)]
pub struct RankResult {
    pub rank: usize,
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    pub tol_used: f64,
}

/// Rank via Gaussian elimination with complete pivoting.
///
/// Exact domain: pivots are exact nonzero tests and `tol` is ignored. Float
/// domains: elimination stops when the best remaining pivot falls below
/// `tol` times the largest entry of the input.
pub fn numerical_rank<K: Scalar>(m: &Matrix<K>, tol: f64) -> Result<RankResult, DomainError> {
    numerical_rank_with_work(m, tol).map(|(r, _)| r)
}

fn numerical_rank_with_work<K: Scalar>(
    m: &Matrix<K>,
    tol: f64,
) -> Result<(RankResult, Matrix<K>), DomainError> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(DomainError::EmptyMatrix);
    }
    let mut work = m.clone();
    let scale0 = work.max_magnitude();
    let threshold = if K::EXACT { 0.0 } else { tol * scale0 };
    let mut rows_avail: Vec<usize> = (0..m.rows()).collect();
    let mut cols_avail: Vec<usize> = (0..m.cols()).collect();
    let mut row_sel = Vec::new();
    let mut col_sel = Vec::new();
    let maxr = m.rows().min(m.cols());
    for _ in 0..maxr {
        let mut best = (0usize, 0usize, -1.0f64);
        for (ri, &r) in rows_avail.iter().enumerate() {
            for (ci, &c) in cols_avail.iter().enumerate() {
                let mag = work.get(r, c).magnitude();
                if mag > best.2 {
                    best = (ri, ci, mag);
                }
            }
        }
        let (ri, ci, mag) = best;
        let (pr, pc) = (rows_avail[ri], cols_avail[ci]);
        let accept = if K::EXACT {
            !work.get(pr, pc).is_zero()
        } else {
            mag > threshold
        };
        if !accept {
            break;
        }
        let piv = work.get(pr, pc).clone();
        for &r in &rows_avail {
            if r == pr || work.get(r, pc).is_zero() {
                continue;
            }
            let factor = work.get(r, pc).clone() / piv.clone();
            for c in 0..m.cols() {
                let v = work.get(r, c).clone() - factor.clone() * work.get(pr, c).clone();
                work.set(r, c, v);
            }
        }
        row_sel.push(pr);
        col_sel.push(pc);
        rows_avail.remove(ri);
        cols_avail.remove(ci);
    }
    let rank = row_sel.len();
    let mut row_perm = row_sel;
    row_perm.extend(rows_avail);
    let mut col_perm = col_sel;
    col_perm.extend(cols_avail);
    Ok((
        RankResult {
            rank,
            row_perm,
            col_perm,
            tol_used: threshold,
        },
        work,
    ))
}

/// Reduced row echelon form: scanning columns in
/// `col_order`, a row qualifies as a pivot when its entry exceeds `tol`
/// times that row's largest magnitude; among qualifiers the largest entry
/// wins. Returns the reduced matrix and the pivot columns (original column
/// indices, in pivot order).
pub fn row_echelon_ordered<K: Scalar>(
    m: &Matrix<K>,
    tol: f64,
    col_order: &[usize],
) -> (Matrix<K>, Vec<usize>) {
    let mut work = m.clone();
    let (nr, _nc) = (work.rows(), work.cols());
    let mut pivots = Vec::new();
    let mut next_row = 0usize;
    for &c in col_order {
        if next_row >= nr {
            break;
        }
        // pick pivot among rows >= next_row
        let mut best: Option<(usize, f64)> = None;
        for r in next_row..nr {
            let mag = work.get(r, c).magnitude();
            let qualifies = if K::EXACT {
                !work.get(r, c).is_zero()
            } else {
                let row_max = work.row(r).iter().map(Scalar::magnitude).fold(0.0, f64::max);
                row_max > 0.0 && mag > tol * row_max
            };
            if qualifies && best.map_or(true, |(_, bm)| mag > bm) {
                best = Some((r, mag));
            }
        }
        let Some((pr, _)) = best else { continue };
        work.swap_rows(next_row, pr);
        let piv = work.get(next_row, c).clone();
        let inv = K::one() / piv;
        for cc in 0..work.cols() {
            let v = work.get(next_row, cc).clone() * inv.clone();
            work.set(next_row, cc, v);
        }
        for r in 0..nr {
            if r == next_row || work.get(r, c).is_zero() {
                continue;
            }
            let factor = work.get(r, c).clone();
            for cc in 0..work.cols() {
                let v = work.get(r, cc).clone() - factor.clone() * work.get(next_row, cc).clone();
                work.set(r, cc, v);
            }
        }
        pivots.push(c);
        next_row += 1;
    }
    (work, pivots)
}

/// Reduced row echelon form scanning columns left to right.
pub fn row_echelon<K: Scalar>(m: &Matrix<K>, tol: f64) -> (Matrix<K>, Vec<usize>) {
    let order: Vec<usize> = (0..m.cols()).collect();
    row_echelon_ordered(m, tol, &order)
}

impl<K: Scalar> Matrix<K> {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Basis of the (approximate) kernel `{v : Mv = 0}`, with the same rank
/// decision as [`numerical_rank`] so that rank + nullity = cols at every
/// tolerance. Float domains additionally orthonormalize the basis
/// (modified Gram-Schmidt); the exact domain returns the reduced basis
/// (unit on its free coordinate, solved on the pivot coordinates).
pub fn null_space<K: Scalar>(m: &Matrix<K>, tol: f64) -> Vec<Vec<K>> {
    if m.rows() == 0 {
        // no constraints: the whole space
        return (0..m.cols())
            .map(|i| {
                let mut v = vec![K::zero(); m.cols()];
                v[i] = K::one();
                v
            })
            .collect();
    }
    let (rr, work) = match numerical_rank_with_work(m, tol) {
        Ok(x) => x,
        Err(_) => return Vec::new(),
    };
    let n = m.cols();
    let mut basis = Vec::new();
    for &free in &rr.col_perm[rr.rank..] {
        let mut v = vec![K::zero(); n];
        v[free] = K::one();
        // the selected block is upper triangular in pivot order:
        // back-substitute from the last pivot upward
        for k in (0..rr.rank).rev() {
            let (pr, pc) = (rr.row_perm[k], rr.col_perm[k]);
            let mut acc = work.get(pr, free).clone();
            for &pcj in rr.col_perm[k + 1..rr.rank].iter() {
                acc = acc + work.get(pr, pcj).clone() * v[pcj].clone();
            }
            v[pc] = -(acc / work.get(pr, pc).clone());
        }
        basis.push(v);
    }
    if K::EXACT {
        basis
    } else {
        gram_schmidt(basis)
    }
}

/// Modified Gram-Schmidt with the conjugate inner product. Norms pass
/// through f64, which is exact for the float domains this is used on.
fn gram_schmidt<K: Scalar>(vs: Vec<Vec<K>>) -> Vec<Vec<K>> {
    let mut out: Vec<Vec<K>> = Vec::with_capacity(vs.len());
    for mut v in vs {
        for _ in 0..2 {
            for u in &out {
                let mut dot = K::zero();
                for (a, b) in u.iter().zip(&v) {
                    dot = dot + a.conjugate() * b.clone();
                }
                for (b, a) in v.iter_mut().zip(u) {
                    *b = b.clone() - dot.clone() * a.clone();
                }
            }
        }
        let norm = v.iter().map(|x| x.magnitude().powi(2)).sum::<f64>().sqrt();
        if norm > 0.0 {
            let inv = K::from_f64_lossless(1.0 / norm);
            for b in &mut v {
                *b = b.clone() * inv.clone();
            }
            out.push(v);
        }
    }
    out
}

/// Echelon pivot columns of a (well-conditioned, e.g. orthonormal) row
/// basis, scanned in the given column order: a column is a pivot when its
/// residual after orthogonal projection onto the span of the columns
/// already accepted exceeds `tol` times the largest column norm. Projection
/// is numerically far more reliable than elimination-based pivot tests when
/// near-ties occur.
pub fn pivot_columns_by_projection<F: FloatScalar>(
    m: &Matrix<F>,
    tol: f64,
    col_order: &[usize],
) -> Vec<usize> {
    let rows = m.rows();
    let mut pivots = Vec::new();
    // residual vectors of every column, downdated as pivots are accepted
    let mut order: Vec<usize> = col_order.to_vec();
    let mut res: Vec<Vec<F>> = col_order
        .iter()
        .map(|&c| (0..rows).map(|r| m.get(r, c).clone()).collect())
        .collect();
    while pivots.len() < rows && !order.is_empty() {
        let norms: Vec<f64> = res
            .iter()
            .map(|v| v.iter().map(|x| x.magnitude().powi(2)).sum::<f64>().sqrt())
            .collect();
        // threshold against the strongest remaining column so near-noise
        // residues never outrank genuine structure further down the scan
        let rmax = norms.iter().copied().fold(0.0f64, f64::max);
        if rmax <= 0.0 {
            break;
        }
        let Some(pos) = norms.iter().position(|&r| r > tol * rmax) else {
            break;
        };
        let c = order.remove(pos);
        let mut u = res.remove(pos);
        let inv = F::from_f64(1.0 / norms[pos]);
        for x in &mut u {
            *x = x.clone() * inv.clone();
        }
        for v in &mut res {
            let mut dot = F::zero();
            for (a, b) in u.iter().zip(v.iter()) {
                dot = dot + a.conjugate() * b.clone();
            }
            for (b, a) in v.iter_mut().zip(&u) {
                *b = b.clone() - dot.clone() * a.clone();
            }
        }
        pivots.push(c);
    }
    pivots
}

/// Reduces a row basis against the given pivot columns: returns the matrix
/// `C m` whose pivot-column submatrix is the identity (each row has
/// coefficient 1 on its own pivot, 0 on the others). The pivot submatrix
/// must be invertible, which [`pivot_columns_by_projection`] guarantees.
pub fn reduce_rows_to_pivots<F: FloatScalar>(
    m: &Matrix<F>,
    pivots: &[usize],
) -> Result<Matrix<F>, DomainError> {
    let k = m.rows();
    assert_eq!(pivots.len(), k);
    let p = Matrix::from_fn(k, k, |r, c| m.get(r, pivots[c]).clone());
    // C = P^{-1}, assembled column by column
    let mut cmat = Matrix::zeros(k, k);
    for i in 0..k {
        let mut e = vec![F::zero(); k];
        e[i] = F::one();
        let y = lu_solve(&p, &e, 1e-14)?;
        for (r, v) in y.into_iter().enumerate() {
            cmat.set(r, i, v);
        }
    }
    Ok(cmat.matmul(m))
}

/// Householder QR with column pivoting; holds the triangular factor and the
/// pivot permutation. `rank` thresholds the diagonal against its largest
/// entry.
pub struct PivotedQr<F: FloatScalar> {
    r: Matrix<F>,
    col_perm: Vec<usize>,
    diag_mags: Vec<f64>,
    /// Unit Householder vectors (step k spans rows k..m), kept so Q^T can
    /// be applied for least-squares corrections.
    reflectors: Vec<Vec<F>>,
}

impl<F: FloatScalar> PivotedQr<F> {
    pub fn factor(a: &Matrix<F>) -> Self {
        let mut r = a.clone();
        let (m, n) = (r.rows(), r.cols());
        let kmax = m.min(n);
        let mut col_perm: Vec<usize> = (0..n).collect();
        let mut diag_mags = Vec::with_capacity(kmax);
        let mut reflectors: Vec<Vec<F>> = Vec::with_capacity(kmax);
        // squared column norms, downdated per step and refreshed on
        // cancellation
        let mut norms2: Vec<f64> = (0..n)
            .map(|c| (0..m).map(|rr| r.get(rr, c).magnitude().powi(2)).sum())
            .collect();
        let orig2 = norms2.clone();
        for k in 0..kmax {
            // pivot column
            let mut best = k;
            for c in k + 1..n {
                if norms2[c] > norms2[best] {
                    best = c;
                }
            }
            if best != k {
                r.swap_cols(k, best);
                col_perm.swap(k, best);
                norms2.swap(k, best);
            }
            // Householder vector from column k, rows k..m
            let norm: f64 = (k..m)
                .map(|rr| r.get(rr, k).magnitude().powi(2))
                .sum::<f64>()
                .sqrt();
            if norm == 0.0 {
                diag_mags.push(0.0);
                reflectors.push(Vec::new());
                norms2[k] = 0.0;
                continue;
            }
            let x0 = r.get(k, k).clone();
            let x0mag = x0.magnitude();
            // alpha = -sign(x0) * norm, extended to the complex phase
            let alpha = if x0mag == 0.0 {
                F::from_f64(-norm)
            } else {
                x0.scale(-norm / x0mag)
            };
            let mut v: Vec<F> = (k..m).map(|rr| r.get(rr, k).clone()).collect();
            v[0] = v[0].clone() - alpha.clone();
            let vnorm: f64 = v.iter().map(|x| x.magnitude().powi(2)).sum::<f64>().sqrt();
            if vnorm > 0.0 {
                let inv = 1.0 / vnorm;
                for x in &mut v {
                    *x = x.scale(inv);
                }
                // apply H = I - 2 v v* to the trailing block
                for c in k..n {
                    let mut dot = F::zero();
                    for (idx, rr) in (k..m).enumerate() {
                        dot = dot + v[idx].conjugate() * r.get(rr, c).clone();
                    }
                    let dot2 = dot.scale(2.0);
                    for (idx, rr) in (k..m).enumerate() {
                        let nv = r.get(rr, c).clone() - v[idx].clone() * dot2.clone();
                        r.set(rr, c, nv);
                    }
                }
                reflectors.push(v);
            } else {
                reflectors.push(Vec::new());
            }
            r.set(k, k, alpha.clone());
            for rr in k + 1..m {
                r.set(rr, k, F::zero());
            }
            diag_mags.push(alpha.magnitude());
            // downdate trailing column norms
            for c in k + 1..n {
                let d = r.get(k, c).magnitude().powi(2);
                norms2[c] -= d;
                if norms2[c] < 1e-8 * orig2[c] || norms2[c] < 0.0 {
                    norms2[c] = (k + 1..m)
                        .map(|rr| r.get(rr, c).magnitude().powi(2))
                        .sum();
                }
            }
        }
        PivotedQr {
            r,
            col_perm,
            diag_mags,
            reflectors,
        }
    }

    pub fn rank(&self, tol: f64) -> usize {
        let dmax = self.diag_mags.iter().copied().fold(0.0f64, f64::max);
        if dmax == 0.0 {
            return 0;
        }
        let mut rank = 0;
        for &d in &self.diag_mags {
            if d > tol * dmax {
                rank += 1;
            } else {
                break;
            }
        }
        rank
    }

    /// Orthonormal kernel basis of the factored matrix at tolerance `tol`.
    pub fn kernel(&self, tol: f64) -> Vec<Vec<F>> {
        let rank = self.rank(tol);
        let n = self.r.cols();
        let nfree = n - rank;
        let mut basis = Vec::with_capacity(nfree);
        for jf in 0..nfree {
            let fcol = rank + jf;
            // back-substitute R11 x = -R12[:, jf]
            let mut x = vec![F::zero(); rank];
            for i in (0..rank).rev() {
                let mut acc = -self.r.get(i, fcol).clone();
                for k in i + 1..rank {
                    acc = acc - self.r.get(i, k).clone() * x[k].clone();
                }
                x[i] = acc / self.r.get(i, i).clone();
            }
            let mut v = vec![F::zero(); n];
            for (i, xv) in x.into_iter().enumerate() {
                v[self.col_perm[i]] = xv;
            }
            v[self.col_perm[fcol]] = F::one();
            basis.push(v);
        }
        gram_schmidt(basis)
    }

    /// Applies Q^T (the product of the stored reflections) to a vector of
    /// length `rows`.
    fn apply_qt(&self, x: &mut [F]) {
        let m = self.r.rows();
        for (k, v) in self.reflectors.iter().enumerate() {
            if v.is_empty() {
                continue;
            }
            let mut dot = F::zero();
            for (idx, rr) in (k..m).enumerate() {
                dot = dot + v[idx].conjugate() * x[rr].clone();
            }
            let dot2 = dot.scale(2.0);
            for (idx, rr) in (k..m).enumerate() {
                x[rr] = x[rr].clone() - v[idx].clone() * dot2.clone();
            }
        }
    }

    /// Minimum-norm correction `d` with `A d ~ r` through the stored
    /// factorization, truncated at `rank`.
    fn lstsq_correction(&self, residual: &[F], rank: usize) -> Vec<F> {
        let mut qtr = residual.to_vec();
        self.apply_qt(&mut qtr);
        let mut y = vec![F::zero(); rank];
        for i in (0..rank).rev() {
            let mut acc = qtr[i].clone();
            for k in i + 1..rank {
                acc = acc - self.r.get(i, k).clone() * y[k].clone();
            }
            y[i] = acc / self.r.get(i, i).clone();
        }
        let mut d = vec![F::zero(); self.r.cols()];
        for (i, yv) in y.into_iter().enumerate() {
            d[self.col_perm[i]] = yv;
        }
        d
    }

    /// One step of iterative refinement of an (approximate) kernel basis
    /// against the original matrix: v <- v - A+ (A v), re-orthonormalized.
    /// Near the rank boundary the back-substituted kernel carries an error
    /// of order (condition x epsilon); a single correction step pushes the
    /// structural zeros well below echelon thresholds.
    pub fn refine_kernel(&self, a: &Matrix<F>, basis: Vec<Vec<F>>, tol: f64) -> Vec<Vec<F>> {
        let rank = self.rank(tol);
        let refined = basis
            .into_iter()
            .map(|mut v| {
                let r = a.mul_vec(&v);
                let d = self.lstsq_correction(&r, rank);
                for (x, dv) in v.iter_mut().zip(d) {
                    *x = x.clone() - dv;
                }
                v
            })
            .collect();
        gram_schmidt(refined)
    }
}

impl<K: Scalar> Matrix<K> {
    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }
}

/// Scalar determinant: exact elimination in the exact domain, partially
/// pivoted LU otherwise.
pub fn det<K: Scalar>(m: &Matrix<K>) -> Result<K, DomainError> {
    if m.rows() != m.cols() {
        return Err(DomainError::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(K::one());
    }
    let mut work = m.clone();
    let mut acc = K::one();
    let mut sign_flip = false;
    for k in 0..n {
        let mut best = k;
        for r in k + 1..n {
            if work.get(r, k).magnitude() > work.get(best, k).magnitude() {
                best = r;
            }
        }
        if work.get(best, k).is_zero() {
            return Ok(K::zero());
        }
        if best != k {
            work.swap_rows(k, best);
            sign_flip = !sign_flip;
        }
        let piv = work.get(k, k).clone();
        acc = acc * piv.clone();
        for r in k + 1..n {
            if work.get(r, k).is_zero() {
                continue;
            }
            let factor = work.get(r, k).clone() / piv.clone();
            for c in k..n {
                let v = work.get(r, c).clone() - factor.clone() * work.get(k, c).clone();
                work.set(r, c, v);
            }
        }
    }
    Ok(if sign_flip { -acc } else { acc })
}

/// Solves the square system `A x = b` by partially pivoted LU. Fails when
/// the best pivot is negligible relative to the matrix scale.
pub fn lu_solve<F: FloatScalar>(a: &Matrix<F>, b: &[F], tol: f64) -> Result<Vec<F>, DomainError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(DomainError::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    assert_eq!(b.len(), n);
    let mut work = a.clone();
    let mut rhs = b.to_vec();
    let scale0 = work.max_magnitude().max(f64::MIN_POSITIVE);
    for k in 0..n {
        let mut best = k;
        for r in k + 1..n {
            if work.get(r, k).magnitude() > work.get(best, k).magnitude() {
                best = r;
            }
        }
        if work.get(best, k).magnitude() <= tol * scale0 {
            return Err(DomainError::InvalidArgument(format!(
                "singular linear system (pivot {} at column {k})",
                work.get(best, k).magnitude()
            )));
        }
        if best != k {
            work.swap_rows(k, best);
            rhs.swap(k, best);
        }
        let piv = work.get(k, k).clone();
        for r in k + 1..n {
            if work.get(r, k).is_zero() {
                continue;
            }
            let factor = work.get(r, k).clone() / piv.clone();
            for c in k..n {
                let v = work.get(r, c).clone() - factor.clone() * work.get(k, c).clone();
                work.set(r, c, v);
            }
            let v = rhs[r].clone() - factor.clone() * rhs[k].clone();
            rhs[r] = v;
        }
    }
    let mut x = vec![F::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i].clone();
        for k in i + 1..n {
            acc = acc - work.get(i, k).clone() * x[k].clone();
        }
        x[i] = acc / work.get(i, i).clone();
    }
    Ok(x)
}

/// Minimum-norm-residual solve of an overdetermined system `A x = b` via
/// pivoted QR (ranks below `tol` are truncated).
pub fn least_squares<F: FloatScalar>(
    a: &Matrix<F>,
    b: &[F],
    tol: f64,
) -> Result<Vec<F>, DomainError> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    // stack b as an extra column so the reflections apply to it too
    let mut aug = Matrix::zeros(m, n + 1);
    for r in 0..m {
        for c in 0..n {
            aug.set(r, c, a.get(r, c).clone());
        }
        aug.set(r, n, b[r].clone());
    }
    // factor only the leading n columns: pivot among them
    let qr = PivotedQr::factor_with_fixed_tail(&aug, n);
    let rank = qr.rank(tol);
    if rank == 0 {
        return Err(DomainError::InvalidArgument(
            "zero-rank least squares system".into(),
        ));
    }
    let mut y = vec![F::zero(); rank];
    for i in (0..rank).rev() {
        let mut acc = qr.r.get(i, n).clone();
        for k in i + 1..rank {
            acc = acc - qr.r.get(i, k).clone() * y[k].clone();
        }
        y[i] = acc / qr.r.get(i, i).clone();
    }
    let mut x = vec![F::zero(); n];
    for (i, yv) in y.into_iter().enumerate() {
        x[qr.col_perm[i]] = yv;
    }
    Ok(x)
}

impl<F: FloatScalar> PivotedQr<F> {
    /// Same as [`PivotedQr::factor`] but never pivots the trailing
    /// `cols - fixed` columns (used to carry a right-hand side).
    fn factor_with_fixed_tail(a: &Matrix<F>, fixed: usize) -> Self {
        let mut r = a.clone();
        let (m, n) = (r.rows(), r.cols());
        let kmax = m.min(fixed);
        let mut col_perm: Vec<usize> = (0..n).collect();
        let mut diag_mags = Vec::with_capacity(kmax);
        for k in 0..kmax {
            let mut best = k;
            let mut best_n2 = -1.0f64;
            for c in k..fixed {
                let n2: f64 = (k..m).map(|rr| r.get(rr, c).magnitude().powi(2)).sum();
                if n2 > best_n2 {
                    best_n2 = n2;
                    best = c;
                }
            }
            if best != k {
                r.swap_cols(k, best);
                col_perm.swap(k, best);
            }
            let norm = best_n2.max(0.0).sqrt();
            if norm == 0.0 {
                diag_mags.push(0.0);
                continue;
            }
            let x0 = r.get(k, k).clone();
            let x0mag = x0.magnitude();
            let alpha = if x0mag == 0.0 {
                F::from_f64(-norm)
            } else {
                x0.scale(-norm / x0mag)
            };
            let mut v: Vec<F> = (k..m).map(|rr| r.get(rr, k).clone()).collect();
            v[0] = v[0].clone() - alpha.clone();
            let vnorm: f64 = v.iter().map(|x| x.magnitude().powi(2)).sum::<f64>().sqrt();
            if vnorm > 0.0 {
                let inv = 1.0 / vnorm;
                for x in &mut v {
                    *x = x.scale(inv);
                }
                for c in k..n {
                    let mut dot = F::zero();
                    for (idx, rr) in (k..m).enumerate() {
                        dot = dot + v[idx].conjugate() * r.get(rr, c).clone();
                    }
                    let dot2 = dot.scale(2.0);
                    for (idx, rr) in (k..m).enumerate() {
                        let nv = r.get(rr, c).clone() - v[idx].clone() * dot2.clone();
                        r.set(rr, c, nv);
                    }
                }
            }
            r.set(k, k, alpha.clone());
            for rr in k + 1..m {
                r.set(rr, k, F::zero());
            }
            diag_mags.push(alpha.magnitude());
        }
        PivotedQr {
            r,
            col_perm,
            diag_mags,
            reflectors: Vec::new(),
        }
    }
}

/// Ring elements a cofactor determinant can run over (scalars and
/// polynomials).
pub trait RingOps: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn ring_zero_like(&self) -> Self;
    fn is_ring_zero(&self) -> bool;
}

impl<K: Scalar> RingOps for K {
    fn ring_zero_like(&self) -> Self {
        K::zero()
    }
    fn is_ring_zero(&self) -> bool {
        self.is_zero()
    }
}

impl<K: Scalar> RingOps for crate::poly::Polynomial<K> {
    fn ring_zero_like(&self) -> Self {
        crate::poly::Polynomial::zero(self.nvars())
    }
    fn is_ring_zero(&self) -> bool {
        self.is_zero()
    }
}

/// Cofactor-expansion determinant over any commutative ring. Intended for
/// the small bordered blocks of the deflation construction (size <= ~12).
pub fn det_cofactor<R: RingOps>(rows: &[Vec<R>]) -> R {
    let k = rows.len();
    debug_assert!(rows.iter().all(|r| r.len() == k));
    if k == 1 {
        return rows[0][0].clone();
    }
    let mut acc = rows[0][0].ring_zero_like();
    for j in 0..k {
        if rows[0][j].is_ring_zero() {
            continue;
        }
        let minor: Vec<Vec<R>> = (1..k)
            .map(|r| {
                (0..k)
                    .filter(|&c| c != j)
                    .map(|c| rows[r][c].clone())
                    .collect()
            })
            .collect();
        let term = rows[0][j].clone() * det_cofactor(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}
