//! Local dual space at an approximate root via Macaulay multiplicity
//! matrices: multiplicity, nil-index, breadth, and an orthogonal primal-dual
//! basis pair.
//!
//! The kernel of the degree-`d` Macaulay matrix encodes the functionals of
//! order at most `d` annihilating every listed multiple of the system. Its
//! dimension stabilizes one degree past the nil-index; echelonizing the
//! stabilized kernel against the graded-lexicographic order produces a dual
//! basis whose leading exponents form the primal exponent set `E`.

use crate::exponent::{monomials_upto, Exponent};
use crate::linalg::{pivot_columns_by_projection, reduce_rows_to_pivots, Matrix, PivotedQr};
use crate::poly::{DomainError, PolySystem, Polynomial};
use crate::scalar::{FloatScalar, Scalar};

use std::collections::BTreeMap;
use std::fmt;

pub const DEFAULT_D_MAX: u32 = 32;

#[derive(Debug)]
pub enum DualError {
    /// Kernel dimension still growing at `d_max`: the point is likely not an
    /// isolated root at this tolerance.
    NotStabilized { d_max: u32, dims: Vec<usize> },
    /// The echelonized kernel is not closed under derivation: the leading
    /// exponents do not form a connected-to-1 set.
    StructureBroken(String),
    Domain(DomainError),
}

impl fmt::Display for DualError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualError::NotStabilized { d_max, dims } => write!(
                f,
                "Macaulay kernel dimension still growing at d_max = {d_max} (dims {dims:?}); \
                 root may be non-isolated or the tolerance too loose"
            ),
            DualError::StructureBroken(msg) => write!(f, "{msg}"),
            DualError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DualError {}

impl From<DomainError> for DualError {
    fn from(e: DomainError) -> Self {
        DualError::Domain(e)
    }
}

/// Element of the dual space, stored by normalized coefficients: the map
/// sends the exponent `beta` to the coefficient of `(1/beta!) d^beta`.
#[derive(Clone, Debug)]
pub struct DualFunctional<F: FloatScalar> {
    coeffs: BTreeMap<Exponent, F>,
    order: u32,
}

impl<F: FloatScalar> DualFunctional<F> {
    pub fn from_coeffs(coeffs: BTreeMap<Exponent, F>) -> Self {
        let order = coeffs.keys().map(Exponent::degree).max().unwrap_or(0);
        DualFunctional { coeffs, order }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &BTreeMap<Exponent, F> {
        &self.coeffs
    }

    pub fn coeff(&self, beta: &Exponent) -> F {
        self.coeffs.get(beta).cloned().unwrap_or_else(F::zero)
    }

    /// Applies the functional to `p` at the point `xi`:
    /// sum of c_beta * d^beta(p)(xi) / beta!.
    pub fn apply(&self, p: &Polynomial<F>, xi: &[F]) -> F {
        let shifted = p.shift(xi);
        let mut acc = F::zero();
        for (beta, c) in &self.coeffs {
            acc = acc + c.clone() * shifted.coeff(beta);
        }
        acc
    }

    /// The derivation d/d(partial_i), mapping (1/b!) d^b to
    /// (1/(b-e_i)!) d^(b-e_i); this is the transpose action of
    /// multiplication by (x_i - xi_i).
    pub fn derive(&self, i: usize) -> DualFunctional<F> {
        let mut coeffs = BTreeMap::new();
        for (beta, c) in &self.coeffs {
            if let Some(b2) = beta.sub_unit(i) {
                coeffs.insert(b2, c.clone());
            }
        }
        DualFunctional::from_coeffs(coeffs)
    }
}

/// Multiplicity structure at an isolated root: primal exponents `E`, the
/// orthogonal dual basis, multiplicity, and nil-index.
#[derive(Clone, Debug)]
pub struct MultiplicityStructure<F: FloatScalar> {
    e_set: Vec<Exponent>,
    dual: Vec<DualFunctional<F>>,
    nil_index: u32,
    kernel_dims: Vec<usize>,
}

impl<F: FloatScalar> MultiplicityStructure<F> {
    pub fn e_set(&self) -> &[Exponent] {
        &self.e_set
    }

    pub fn dual_basis(&self) -> &[DualFunctional<F>] {
        &self.dual
    }

    pub fn delta(&self) -> usize {
        self.e_set.len()
    }

    pub fn nil_index(&self) -> u32 {
        self.nil_index
    }

    /// Kernel dimensions of the Macaulay matrices for d = 1, 2, ... up to
    /// stabilization (diagnostic).
    pub fn kernel_dims(&self) -> &[usize] {
        &self.kernel_dims
    }

    pub fn nvars(&self) -> usize {
        self.e_set[0].len()
    }

    /// Number of order-1 dual elements, the corank of the Jacobian.
    pub fn breadth(&self) -> usize {
        self.dual.iter().filter(|l| l.order() == 1).count()
    }

    /// nu_{alpha_i, beta}: the normalized coefficient of d^beta in the i-th
    /// dual element.
    pub fn nu(&self, i: usize, beta: &Exponent) -> F {
        self.dual[i].coeff(beta)
    }

    /// The numeric multiplication matrix of (x_i - xi_i) on the local
    /// quotient ring in the primal basis: entry (j, k) is
    /// nu_{alpha_j, alpha_k + e_i}.
    pub fn mult_matrix(&self, var: usize) -> Matrix<F> {
        let d = self.delta();
        Matrix::from_fn(d, d, |j, k| {
            let target = self.e_set[k].add_unit(var);
            self.nu(j, &target)
        })
    }

    pub fn mult_matrices(&self) -> Vec<Matrix<F>> {
        (0..self.nvars()).map(|i| self.mult_matrix(i)).collect()
    }

    /// nu_{alpha_i, gamma} for gamma outside E^+, reconstructed as
    /// [M^gamma]_{i, 1} from the numeric multiplication matrices applied in
    /// index order. Returns 0 beyond the nil-index (nilpotency).
    pub fn nu_outside_eplus(&self, gamma: &Exponent, i: usize) -> F {
        if gamma.degree() > self.nil_index {
            return F::zero();
        }
        let mats = self.mult_matrices();
        let mut v = vec![F::zero(); self.delta()];
        v[0] = F::one();
        for j in (0..self.nvars()).rev() {
            for _ in 0..gamma.get(j) {
                v = mats[j].mul_vec(&v);
            }
        }
        v[i].clone()
    }

    /// E^+ = union of E + e_i; partial(E) = E^+ minus E.
    pub fn partial_e(&self) -> Vec<Exponent> {
        let mut out = std::collections::BTreeSet::new();
        for alpha in &self.e_set {
            for i in 0..self.nvars() {
                let t = alpha.add_unit(i);
                if !self.e_set.contains(&t) {
                    out.insert(t);
                }
            }
        }
        out.into_iter().collect()
    }
}

/// The Macaulay multiplicity matrix of degree `d`: rows indexed by pairs
/// (multiplier monomial beta with |beta| < d, polynomial index i), columns
/// by derivative exponents |alpha| <= d in ascending graded-lex order; the
/// entry is the plain derivative d^alpha(x^beta f_i) evaluated at `xi`.
pub fn macaulay_matrix<K: Scalar>(
    f: &PolySystem<K>,
    xi: &[K],
    d: u32,
) -> Result<Matrix<K>, DomainError> {
    if d < 1 {
        return Err(DomainError::InvalidArgument("d must be >= 1".into()));
    }
    if xi.len() != f.nvars {
        return Err(DomainError::DimensionMismatch {
            expected: f.nvars,
            got: xi.len(),
        });
    }
    Ok(build_macaulay(f, xi, d, false))
}

/// Internal scaled variant used for kernel computations: entries are Taylor
/// coefficients (the 1/alpha! normalization), which both conditions the
/// matrix and makes kernel vectors come out in normalized dual coordinates.
fn build_macaulay<K: Scalar>(f: &PolySystem<K>, xi: &[K], d: u32, scaled: bool) -> Matrix<K> {
    let n = f.nvars;
    let cols = monomials_upto(n, d);
    let col_index: BTreeMap<&Exponent, usize> = cols.iter().zip(0..).collect();
    let mults = monomials_upto(n, d - 1);
    let mut m = Matrix::zeros(mults.len() * f.polys.len(), cols.len());
    let mut r = 0usize;
    for beta in &mults {
        for p in &f.polys {
            // x^beta * p, then Taylor coefficients at xi
            let shifted_mult = Polynomial::from_terms(
                n,
                p.terms().map(|(e, c)| (e.add(beta), c.clone())),
            );
            let taylor = shifted_mult.shift(xi);
            // largest Taylor coefficient at any degree: float cancellation
            // noise lives at ~eps times this scale
            let full_scale = taylor
                .terms()
                .map(|(_, c)| c.magnitude())
                .fold(0.0f64, f64::max);
            let mut norm2 = 0.0f64;
            for (alpha, c) in taylor.terms() {
                if alpha.degree() > d {
                    continue;
                }
                let idx = col_index[alpha];
                norm2 += c.magnitude().powi(2);
                let v = if scaled {
                    c.clone()
                } else {
                    c.clone() * K::from_int(alpha.factorial())
                };
                m.set(r, idx, v);
            }
            if scaled && !K::EXACT {
                let norm = norm2.sqrt();
                if norm <= 1e-12 * full_scale {
                    // the truncated row is cancellation residue, not data;
                    // normalizing it would inject a unit garbage row
                    for c in 0..m.cols() {
                        m.set(r, c, K::zero());
                    }
                } else if norm > 0.0 {
                    // unit 2-norm rows keep the rank threshold meaningful
                    let inv = K::from_f64_lossless(1.0 / norm);
                    for c in 0..m.cols() {
                        let v = m.get(r, c).clone() * inv.clone();
                        m.set(r, c, v);
                    }
                }
            }
            r += 1;
        }
    }
    m
}

/// Computes the multiplicity structure at the (approximate) root `xi`.
///
/// Iterates d = 1, 2, ... computing Macaulay kernels until the dimension
/// stabilizes, then echelonizes the stabilized kernel against descending
/// graded-lex so the pivot exponents form `E` and the rows are the dual
/// basis of the orthogonal primal-dual pair. A simple root yields the
/// trivial structure (delta = 1, nil-index 0).
pub fn dual_space<K: Scalar>(
    f: &PolySystem<K>,
    xi: &[K],
    tol: f64,
    d_max: u32,
) -> Result<MultiplicityStructure<K::Approx>, DualError> {
    if xi.len() != f.nvars {
        return Err(DomainError::DimensionMismatch {
            expected: f.nvars,
            got: xi.len(),
        }
        .into());
    }
    let fa = f.to_approx();
    let xia: Vec<K::Approx> = xi.iter().map(Scalar::to_approx).collect();
    let mut dims: Vec<usize> = Vec::new();
    for d in 1..=d_max {
        let m = build_macaulay(&fa, &xia, d, true);
        let qr = PivotedQr::factor(&m);
        let dim = m.cols() - qr.rank(tol);
        if dims.last() == Some(&dim) {
            if dim == 0 {
                return Err(DualError::StructureBroken(
                    "Macaulay kernel is empty: the point is not a root of the system \
                     to within the tolerance (tighten the point or loosen tol)"
                        .into(),
                ));
            }
            let kernel = qr.refine_kernel(&m, qr.kernel(tol), tol);
            return echelonize_kernel(kernel, f.nvars, d, tol, dims);
        }
        dims.push(dim);
    }
    Err(DualError::NotStabilized { d_max, dims })
}

fn echelonize_kernel<F: FloatScalar>(
    kernel: Vec<Vec<F>>,
    nvars: usize,
    d: u32,
    tol: f64,
    dims: Vec<usize>,
) -> Result<MultiplicityStructure<F>, DualError> {
    let cols = monomials_upto(nvars, d);
    let km = Matrix::from_rows(kernel);
    // descending graded-lex scan: the column list is sorted ascending, so
    // reverse it. Pivot columns are found by orthogonal projection (stable
    // under the near-ties elimination pivoting trips over), then the basis
    // is reduced against them.
    let order: Vec<usize> = (0..cols.len()).rev().collect();
    let pivots = pivot_columns_by_projection(&km, tol, &order);
    if pivots.len() != km.rows() {
        return Err(DualError::StructureBroken(format!(
            "kernel echelonization lost rank: {} pivots from {} vectors",
            pivots.len(),
            km.rows()
        )));
    }
    let reduced = reduce_rows_to_pivots(&km, &pivots)?;
    // assemble functionals, dropping sub-tolerance noise
    let mut rows: Vec<(Exponent, DualFunctional<F>)> = Vec::with_capacity(pivots.len());
    for (row, &pc) in pivots.iter().enumerate() {
        let row_max = reduced
            .row(row)
            .iter()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max);
        let mut coeffs = BTreeMap::new();
        for (c, exp) in cols.iter().enumerate() {
            let v = reduced.get(row, c);
            if v.magnitude() > tol * row_max {
                coeffs.insert(exp.clone(), v.clone());
            }
        }
        rows.push((cols[pc].clone(), DualFunctional::from_coeffs(coeffs)));
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let e_set: Vec<Exponent> = rows.iter().map(|(e, _)| e.clone()).collect();
    let dual: Vec<DualFunctional<F>> = rows.into_iter().map(|(_, f)| f).collect();
    if e_set.is_empty() || !e_set[0].is_constant() {
        return Err(DualError::StructureBroken(
            "dual space does not contain the evaluation functional".into(),
        ));
    }
    for alpha in &e_set {
        if alpha.is_constant() {
            continue;
        }
        let connected = (0..nvars)
            .filter_map(|i| alpha.sub_unit(i))
            .any(|down| e_set.contains(&down));
        if !connected {
            return Err(DualError::StructureBroken(format!(
                "primal exponent {alpha} is not connected to 1"
            )));
        }
    }
    let nil_index = dual.iter().map(DualFunctional::order).max().unwrap_or(0);
    Ok(MultiplicityStructure {
        e_set,
        dual,
        nil_index,
        kernel_dims: dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn sys(nvars: usize, polys: Vec<Vec<(i64, Vec<u32>)>>) -> PolySystem<Rat> {
        PolySystem::new(
            nvars,
            polys
                .into_iter()
                .map(|terms| {
                    Polynomial::from_terms(
                        nvars,
                        terms
                            .into_iter()
                            .map(|(c, e)| (Exponent::from_slice(&e), Rat::from_int(c))),
                    )
                })
                .collect(),
        )
    }

    fn origin(n: usize) -> Vec<Rat> {
        vec![Rat::from_int(0); n]
    }

    #[test]
    fn macaulay_first_degree_entries() {
        // {x1 + x2^2, x1^2 + x2^2} at the origin: Mac_1 = [[0,1,0],[0,0,0]]
        // (columns 1, x2, x1)
        let f = sys(2, vec![
            vec![(1, vec![1, 0]), (1, vec![0, 2])],
            vec![(1, vec![2, 0]), (1, vec![0, 2])],
        ]);
        let m = macaulay_matrix(&f, &origin(2), 1).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 3));
        // column order ascending grlex: 1 < x2 < x1
        let expect = [[0, 0, 1], [0, 0, 0]];
        for r in 0..2 {
            for c in 0..3 {
                assert_eq!(*m.get(r, c), Rat::from_int(expect[r][c]));
            }
        }
    }

    #[test]
    fn dual_space_breadth_one_example() {
        // {x1 + x2^2, x1^2 + x2^2}: delta = 2, o = 1, dual {1, d2}
        let f = sys(2, vec![
            vec![(1, vec![1, 0]), (1, vec![0, 2])],
            vec![(1, vec![2, 0]), (1, vec![0, 2])],
        ]);
        let ms = dual_space(&f, &origin(2), 1e-8, 16).unwrap();
        assert_eq!(ms.delta(), 2);
        assert_eq!(ms.nil_index(), 1);
        assert_eq!(ms.breadth(), 1);
        assert_eq!(
            ms.e_set(),
            &[Exponent::from_slice(&[0, 0]), Exponent::from_slice(&[0, 1])]
        );
        // second functional is exactly d2
        let l1 = &ms.dual_basis()[1];
        assert_eq!(l1.coeffs().len(), 1);
        assert!((l1.coeff(&Exponent::from_slice(&[0, 1])).to_approx() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dual_space_multiplicity_three_example() {
        // {x1 - x2 + x1^2, x1 - x2 + x2^2}: delta 3, o 2,
        // E = {1, x1, x1^2}, dual {1, d1+d2, d2 + (d1^2/2 + d1 d2 + d2^2/2)}
        let f = sys(2, vec![
            vec![(1, vec![1, 0]), (-1, vec![0, 1]), (1, vec![2, 0])],
            vec![(1, vec![1, 0]), (-1, vec![0, 1]), (1, vec![0, 2])],
        ]);
        let ms = dual_space(&f, &origin(2), 1e-8, 16).unwrap();
        assert_eq!(ms.delta(), 3);
        assert_eq!(ms.nil_index(), 2);
        assert_eq!(
            ms.e_set(),
            &[
                Exponent::from_slice(&[0, 0]),
                Exponent::from_slice(&[1, 0]),
                Exponent::from_slice(&[2, 0])
            ]
        );
        let l1 = &ms.dual_basis()[1];
        assert!((l1.coeff(&Exponent::from_slice(&[0, 1])) - 1.0).abs() < 1e-9);
        let l2 = &ms.dual_basis()[2];
        // normalized coefficients of d2, d1^2, d1 d2, d2^2 are all 1
        for e in [[0u32, 1], [2, 0], [1, 1], [0, 2]] {
            assert!(
                (l2.coeff(&Exponent::from_slice(&e)) - 1.0).abs() < 1e-9,
                "coefficient at {e:?}"
            );
        }
    }

    #[test]
    fn simple_root_is_trivial() {
        let f = sys(2, vec![vec![(1, vec![1, 0])], vec![(1, vec![0, 1])]]);
        let ms = dual_space(&f, &origin(2), 1e-8, 8).unwrap();
        assert_eq!(ms.delta(), 1);
        assert_eq!(ms.nil_index(), 0);
        assert_eq!(ms.breadth(), 0);
    }

    #[test]
    fn duality_and_closedness() {
        let f = sys(2, vec![
            vec![(1, vec![1, 0]), (-1, vec![0, 1]), (1, vec![2, 0])],
            vec![(1, vec![1, 0]), (-1, vec![0, 1]), (1, vec![0, 2])],
        ]);
        let ms = dual_space(&f, &origin(2), 1e-8, 16).unwrap();
        let fa = f.to_approx();
        let xi = [0.0, 0.0];
        // every dual element annihilates every polynomial
        for l in ms.dual_basis() {
            for p in &fa.polys {
                assert!(l.apply(p, &xi).abs() < 1e-9);
            }
        }
        // derivations stay inside the span of earlier elements
        for (j, l) in ms.dual_basis().iter().enumerate() {
            for i in 0..2 {
                let dl = l.derive(i);
                // subtract the known expansion sum_k nu_{alpha_j, alpha_k+e_i} Lambda_k
                let mut resid = dl.coeffs().clone();
                for k in 0..j {
                    let c = ms.nu(j, &ms.e_set()[k].add_unit(i));
                    for (e, v) in ms.dual_basis()[k].coeffs() {
                        let cur = resid.get(e).cloned().unwrap_or(0.0) - c * v;
                        resid.insert(e.clone(), cur);
                    }
                }
                for (_, v) in resid {
                    assert!(v.abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn orthogonality_matrix_is_identity() {
        let f = sys(2, vec![
            vec![(1, vec![1, 0]), (-1, vec![0, 1]), (1, vec![2, 0])],
            vec![(1, vec![1, 0]), (-1, vec![0, 1]), (1, vec![0, 2])],
        ]);
        let ms = dual_space(&f, &origin(2), 1e-8, 16).unwrap();
        for (i, l) in ms.dual_basis().iter().enumerate() {
            for (j, alpha) in ms.e_set().iter().enumerate() {
                // Lambda_i((x - xi)^{alpha_j}) in normalized coordinates is
                // just the coefficient at alpha_j
                let v = l.coeff(alpha);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn non_isolated_root_fails_to_stabilize() {
        // x1^2 alone in two variables: the origin lies on a curve of zeros
        let f = sys(2, vec![vec![(1, vec![2, 0])]]);
        match dual_space(&f, &origin(2), 1e-8, 6) {
            Err(DualError::NotStabilized { .. }) => {}
            other => panic!("expected NotStabilized, got {other:?}"),
        }
    }
}
