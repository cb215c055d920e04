//! Iterative deflation by first-order differentials: partition the Jacobian
//! around a numerically invertible block, form the differentials spanning
//! its kernel with polynomial coefficients, and append bordered minors of
//! the Jacobian until the root becomes simple.
//!
//! All added polynomials are determinants of (r+1) x (r+1) blocks of the
//! polynomial Jacobian, so their coefficients stay exact in the input
//! coefficients.

use crate::linalg::{det_cofactor, numerical_rank, Matrix, RankResult};
use crate::poly::{DomainError, PolySystem, Polynomial};
use crate::rng::XorShift64;
use crate::scalar::{FloatScalar, Scalar};

use std::fmt;

#[derive(Debug)]
pub enum DeflateError {
    /// The Jacobian already has full column rank at the point.
    AlreadySimple,
    /// max_iter deflation steps did not reach a simple root.
    NotDeflated { iterations: usize, last_rank: usize },
    InvalidKernelIndex { index: usize, corank: usize },
    Domain(DomainError),
}

impl fmt::Display for DeflateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeflateError::AlreadySimple => write!(f, "root is already simple; nothing to deflate"),
            DeflateError::NotDeflated {
                iterations,
                last_rank,
            } => write!(
                f,
                "not deflated to a simple root after {iterations} iterations (rank {last_rank}); \
                 the root may be non-isolated or the point/tolerance inadequate"
            ),
            DeflateError::InvalidKernelIndex { index, corank } => {
                write!(f, "kernel index {index} out of range (corank {corank})")
            }
            DeflateError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DeflateError {}

impl From<DomainError> for DeflateError {
    fn from(e: DomainError) -> Self {
        DeflateError::Domain(e)
    }
}

/// Row/column permutations putting the Jacobian into the form
/// `[[A, B], [C, D]]` with `A` of size `rank x rank` invertible at the
/// point.
#[derive(Clone, Debug)]
pub struct BlockPartition {
    pub rank: usize,
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    pub tol_used: f64,
}

impl From<RankResult> for BlockPartition {
    fn from(r: RankResult) -> Self {
        BlockPartition {
            rank: r.rank,
            row_perm: r.row_perm,
            col_perm: r.col_perm,
            tol_used: r.tol_used,
        }
    }
}

/// Chooses the invertible block of the Jacobian at `xi`.
pub fn block_partition<K: Scalar>(
    f: &PolySystem<K>,
    xi: &[K],
    tol: f64,
) -> Result<BlockPartition, DeflateError> {
    let jac = f.jacobian();
    let jnum = Matrix::from_fn(f.len(), f.nvars, |i, j| jac[i][j].eval(xi));
    Ok(numerical_rank(&jnum, tol)?.into())
}

/// One first-order differential with polynomial coefficients:
/// `sum_j coeffs[j] * d/dx_j`.
#[derive(Clone, Debug)]
pub struct KernelDifferential<K: Scalar> {
    pub coeffs: Vec<Polynomial<K>>,
}

impl<K: Scalar> KernelDifferential<K> {
    /// Evaluates the coefficient vector at a point.
    pub fn eval_at(&self, xi: &[K]) -> Vec<K> {
        self.coeffs.iter().map(|p| p.eval(xi)).collect()
    }

    /// Applies the differential to a polynomial.
    pub fn apply(&self, p: &Polynomial<K>) -> Polynomial<K> {
        let n = p.nvars();
        let mut acc = Polynomial::zero(n);
        for (j, lambda) in self.coeffs.iter().enumerate() {
            if lambda.is_zero() {
                continue;
            }
            acc = acc + lambda * &p.diff_var(j);
        }
        acc
    }
}

/// The `c = n - rank` differentials whose coefficient vectors span the
/// kernel of the Jacobian at `xi` (Cramer construction: the coefficient on
/// the i-th free column is `det A`, the coefficients on pivot columns are
/// signed minors of `[A | B_i]`).
pub fn kernel_differentials<K: Scalar>(
    f: &PolySystem<K>,
    xi: &[K],
    tol: f64,
) -> Result<Vec<KernelDifferential<K>>, DeflateError> {
    let bp = block_partition(f, xi, tol)?;
    if bp.rank == f.nvars {
        return Err(DeflateError::AlreadySimple);
    }
    let jac = f.jacobian();
    let n = f.nvars;
    let r = bp.rank;
    let corank = n - r;
    let mut out = Vec::with_capacity(corank);
    for i in 0..corank {
        let free_col = bp.col_perm[r + i];
        let mut coeffs = vec![Polynomial::zero(n); n];
        // det A on the free direction (empty block: 1)
        let det_a = if r == 0 {
            Polynomial::constant(n, K::one())
        } else {
            let a: Vec<Vec<Polynomial<K>>> = (0..r)
                .map(|ri| {
                    (0..r)
                        .map(|ci| jac[bp.row_perm[ri]][bp.col_perm[ci]].clone())
                        .collect()
                })
                .collect();
            det_cofactor(&a)
        };
        coeffs[free_col] = det_a;
        // Cramer: lambda_k = -det(A with column k replaced by B_i)
        for k in 0..r {
            let ak: Vec<Vec<Polynomial<K>>> = (0..r)
                .map(|ri| {
                    (0..r)
                        .map(|ci| {
                            if ci == k {
                                jac[bp.row_perm[ri]][free_col].clone()
                            } else {
                                jac[bp.row_perm[ri]][bp.col_perm[ci]].clone()
                            }
                        })
                        .collect()
                })
                .collect();
            coeffs[bp.col_perm[k]] = -det_cofactor(&ak);
        }
        out.push(KernelDifferential { coeffs });
    }
    Ok(out)
}

/// Bordered minors of the Jacobian for a direction `a` in kernel-column
/// coordinates: for every non-pivot row `j`, the determinant of the
/// `(r+1) x (r+1)` block `[A, sum_i a_i B_i; C_j, sum_i a_i D_{j,i}]`.
/// Identically zero results are dropped; survivors carry the row index.
fn bordered_minors<K: Scalar>(
    jac: &[Vec<Polynomial<K>>],
    bp: &BlockPartition,
    direction: &[K],
    nvars: usize,
) -> Vec<Polynomial<K>> {
    let r = bp.rank;
    let corank = nvars - r;
    debug_assert_eq!(direction.len(), corank);
    let border_col = |row: usize| -> Polynomial<K> {
        let mut acc = Polynomial::zero(nvars);
        for (i, a) in direction.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            acc = acc + jac[row][bp.col_perm[r + i]].scaled(a);
        }
        acc
    };
    let mut out = Vec::new();
    for j in 0..jac.len() {
        if bp.row_perm[..r].contains(&j) {
            continue;
        }
        let mut block: Vec<Vec<Polynomial<K>>> = Vec::with_capacity(r + 1);
        for &pr in &bp.row_perm[..r] {
            let mut row: Vec<Polynomial<K>> = (0..r)
                .map(|ci| jac[pr][bp.col_perm[ci]].clone())
                .collect();
            row.push(border_col(pr));
            block.push(row);
        }
        let mut last: Vec<Polynomial<K>> = (0..r)
            .map(|ci| jac[j][bp.col_perm[ci]].clone())
            .collect();
        last.push(border_col(j));
        block.push(last);
        // scale at which determinant coefficients are pure roundoff
        let zero_scale: f64 = block
            .iter()
            .map(|row| {
                row.iter()
                    .flat_map(|p| p.terms().map(|(_, c)| c.magnitude()))
                    .fold(0.0f64, f64::max)
                    .max(1e-300)
            })
            .product::<f64>()
            * factorial_f64(r + 1);
        let d = det_cofactor(&block);
        if d.is_zero() {
            continue;
        }
        if !K::EXACT {
            let maxc = d.terms().map(|(_, c)| c.magnitude()).fold(0.0, f64::max);
            if maxc <= 1e-12 * zero_scale {
                continue;
            }
        }
        out.push(d);
    }
    out
}

fn factorial_f64(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product::<f64>().max(1.0)
}

/// Appends the bordered minors for the selected kernel indices (0-based,
/// within `0..corank`). Duplicates and scalar multiples of existing
/// polynomials are pruned; added polynomials are normalized.
pub fn deflate_once<K: Scalar>(
    f: &PolySystem<K>,
    xi: &[K],
    i_set: &[usize],
    tol: f64,
) -> Result<PolySystem<K>, DeflateError> {
    let bp = block_partition(f, xi, tol)?;
    if bp.rank == f.nvars {
        return Err(DeflateError::AlreadySimple);
    }
    let corank = f.nvars - bp.rank;
    if i_set.is_empty() {
        return Err(DeflateError::InvalidKernelIndex {
            index: 0,
            corank,
        });
    }
    for &i in i_set {
        if i >= corank {
            return Err(DeflateError::InvalidKernelIndex { index: i, corank });
        }
    }
    let jac = f.jacobian();
    let mut out = f.clone();
    for &i in i_set {
        let mut direction = vec![K::zero(); corank];
        direction[i] = K::one();
        for cand in bordered_minors(&jac, &bp, &direction, f.nvars) {
            // the single-step API keeps the determinants verbatim
            push_if_new(&mut out, cand, false);
        }
    }
    Ok(out)
}

fn push_if_new<K: Scalar>(sys: &mut PolySystem<K>, cand: Polynomial<K>, normalize: bool) -> bool {
    let monic = cand.monic();
    for p in &sys.polys {
        if p.monic().approx_eq(&monic, 1e-9) {
            return false;
        }
    }
    // rescaling keeps coefficients near unit size across iterations (rank
    // thresholds and double conversions degrade otherwise); the exact
    // domain divides by content and a power of two, which is error-free
    let stored = if normalize { cand.normalized() } else { cand };
    sys.polys.push(stored);
    true
}

/// Which kernel directions each iteration of [`deflate_until_simple`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// One random linear combination of the kernel columns per iteration
    /// (coefficients uniform on [-1, 1] from the seeded generator). A single
    /// generic differential reduces the nil-index every step.
    Single,
    /// All kernel columns individually.
    All,
}

#[derive(Clone, Debug)]
pub struct DeflationStep<K: Scalar> {
    pub rank_before: usize,
    pub corank: usize,
    pub added: Vec<Polynomial<K>>,
    pub total_after: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug)]
pub struct DeflationReport<K: Scalar> {
    pub steps: Vec<DeflationStep<K>>,
    pub simple: bool,
    pub seed: u64,
}

impl<K: Scalar> DeflationReport<K> {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }
}

/// One deflation round in place: partitions the current Jacobian, applies
/// the strategy's differentials, and appends the surviving bordered minors.
/// Returns the step record, or `AlreadySimple` when the rank is full.
pub fn deflate_step<K: Scalar>(
    sys: &mut PolySystem<K>,
    xi: &[K],
    tol: f64,
    strategy: Strategy,
    rng: &mut XorShift64,
) -> Result<DeflationStep<K>, DeflateError> {
    let bp = block_partition(sys, xi, tol)?;
    if bp.rank == sys.nvars {
        return Err(DeflateError::AlreadySimple);
    }
    let corank = sys.nvars - bp.rank;
    let jac = sys.jacobian();
    let directions: Vec<Vec<K>> = match strategy {
        // a 1-dimensional kernel needs no combination; keeping the raw
        // column makes breadth-one runs seed-independent and exact
        Strategy::Single if corank == 1 => vec![vec![K::one()]],
        Strategy::Single => {
            vec![(0..corank)
                .map(|_| K::from_f64_lossless(rng.unit()))
                .collect()]
        }
        Strategy::All => (0..corank)
            .map(|i| {
                let mut d = vec![K::zero(); corank];
                d[i] = K::one();
                d
            })
            .collect(),
    };
    let mut added = Vec::new();
    let mut max_residual = 0.0f64;
    for dir in directions {
        for cand in bordered_minors(&jac, &bp, &dir, sys.nvars) {
            if push_if_new(sys, cand, true) {
                let p = sys.polys.last().unwrap();
                max_residual = max_residual.max(p.eval(xi).magnitude());
                added.push(p.clone());
            }
        }
    }
    Ok(DeflationStep {
        rank_before: bp.rank,
        corank,
        added,
        total_after: sys.polys.len(),
        max_residual,
    })
}

/// Like [`deflate_until_simple`] with one damped Gauss-Newton step
/// (least-squares, step halved) re-polishing the point after every
/// deflation round, to combat drift when the starting point is coarse.
/// Returns the final point alongside the system; conversions back into the
/// exact domain are error-free (dyadic). Polishing is opt-in: the plain
/// driver never moves the point.
pub fn deflate_until_simple_polished<K: Scalar>(
    f: &PolySystem<K>,
    xi: &[K],
    tol: f64,
    max_iter: usize,
    strategy: Strategy,
    seed: u64,
) -> Result<(PolySystem<K>, Vec<K>, DeflationReport<K>), DeflateError> {
    let mut sys = f.clone();
    let mut pt = xi.to_vec();
    let mut rng = XorShift64::new(seed);
    let mut steps = Vec::new();
    for _ in 0..max_iter {
        match deflate_step(&mut sys, &pt, tol, strategy, &mut rng) {
            Err(DeflateError::AlreadySimple) => {
                return Ok((
                    sys,
                    pt,
                    DeflationReport {
                        steps,
                        simple: true,
                        seed,
                    },
                ))
            }
            Err(e) => return Err(e),
            Ok(step) => steps.push(step),
        }
        // one damped least-squares Newton step on the current system
        let fa = sys.to_approx();
        let pa: Vec<K::Approx> = pt.iter().map(Scalar::to_approx).collect();
        let eval = crate::newton::EvalSystem::new(fa.nvars, fa.polys);
        let res = eval.residual(&pa);
        let jac = eval.jacobian_at(&pa);
        let neg: Vec<K::Approx> = res.iter().map(|x| -x.clone()).collect();
        if let Ok(delta) = crate::linalg::least_squares(&jac, &neg, 1e-14) {
            pt = pa
                .iter()
                .zip(delta)
                .map(|(p, d)| K::from_approx(p.clone() + d.scale(0.5)))
                .collect();
        }
    }
    let last_rank = block_partition(&sys, &pt, tol)?.rank;
    if last_rank == sys.nvars {
        return Ok((
            sys,
            pt,
            DeflationReport {
                steps,
                simple: true,
                seed,
            },
        ));
    }
    Err(DeflateError::NotDeflated {
        iterations: max_iter,
        last_rank,
    })
}

/// Deflates until the Jacobian at the point has full column rank.
///
/// The returned report records per-iteration ranks, the polynomials added,
/// and the residuals of the added polynomials at the point.
pub fn deflate_until_simple<K: Scalar>(
    f: &PolySystem<K>,
    xi: &[K],
    tol: f64,
    max_iter: usize,
    strategy: Strategy,
    seed: u64,
) -> Result<(PolySystem<K>, DeflationReport<K>), DeflateError> {
    let mut sys = f.clone();
    let mut rng = XorShift64::new(seed);
    let mut steps = Vec::new();
    for _ in 0..max_iter {
        match deflate_step(&mut sys, xi, tol, strategy, &mut rng) {
            Err(DeflateError::AlreadySimple) => {
                return Ok((
                    sys,
                    DeflationReport {
                        steps,
                        simple: true,
                        seed,
                    },
                ))
            }
            Err(e) => return Err(e),
            Ok(step) => steps.push(step),
        }
    }
    let last_rank = block_partition(&sys, xi, tol)?.rank;
    if last_rank == sys.nvars {
        return Ok((
            sys,
            DeflationReport {
                steps,
                simple: true,
                seed,
            },
        ));
    }
    Err(DeflateError::NotDeflated {
        iterations: max_iter,
        last_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::exponent::Exponent;
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

    fn illustrative() -> PolySystem<Rat> {
        // {x1 + x2^2, x1^2 + x2^2} with a multiplicity-2 root at the origin
        sys(2, vec![
            vec![(1, vec![1, 0]), (1, vec![0, 2])],
            vec![(1, vec![2, 0]), (1, vec![0, 2])],
        ])
    }

    fn origin(n: usize) -> Vec<Rat> {
        vec![Rat::from_int(0); n]
    }

    #[test]
    fn kernel_differential_cramer_form() {
        let f = illustrative();
        let ks = kernel_differentials(&f, &origin(2), 1e-8).unwrap();
        assert_eq!(ks.len(), 1);
        // lambda = (-2 x2, 1) up to sign: det A = 1 on the free column,
        // -B on the pivot column
        let at = ks[0].eval_at(&origin(2));
        // evaluated at the root the vector spans ker J = span{(0,1)}
        assert!(at[0].is_zero());
        assert!(!at[1].is_zero());
        // kernel property J(xi) v = 0 at a nearby generic check: apply to
        // the system and evaluate
        for p in &f.polys {
            assert!(ks[0].apply(p).eval(&origin(2)).is_zero());
        }
    }

    #[test]
    fn kernel_differentials_identity_when_jacobian_vanishes() {
        // all first partials vanish at the origin: differentials are d_i
        let f = sys(4, vec![
            vec![(1, vec![4, 0, 0, 0]), (-1, vec![0, 1, 1, 1])],
            vec![(1, vec![0, 4, 0, 0]), (-1, vec![1, 0, 1, 1])],
            vec![(1, vec![0, 0, 4, 0]), (-1, vec![1, 1, 0, 1])],
            vec![(1, vec![0, 0, 0, 4]), (-1, vec![1, 1, 1, 0])],
        ]);
        let ks = kernel_differentials(&f, &origin(4), 1e-8).unwrap();
        assert_eq!(ks.len(), 4);
        for k in &ks {
            let consts: Vec<bool> = k
                .coeffs
                .iter()
                .map(|p| !p.is_zero() && p.total_degree() == 0)
                .collect();
            assert_eq!(consts.iter().filter(|&&b| b).count(), 1);
        }
    }

    #[test]
    fn deflate_once_adds_the_bordered_minor() {
        let f = illustrative();
        let g = deflate_once(&f, &origin(2), &[0], 1e-8).unwrap();
        assert_eq!(g.len(), 3);
        // the added polynomial is +-(2 x2 - 4 x1 x2)
        let added = &g.polys[2];
        let want = Polynomial::from_terms(
            2,
            [
                (Exponent::from_slice(&[0, 1]), Rat::from_int(2)),
                (Exponent::from_slice(&[1, 1]), Rat::from_int(-4)),
            ],
        );
        assert!(added == &want || added == &want.clone().scaled(&Rat::from_int(-1)));
    }

    #[test]
    fn duplicate_inputs_yield_one_new_polynomial() {
        // {x1^2, x1^2}: both bordered minors coincide, one survives pruning
        let f = sys(2, vec![vec![(1, vec![2, 0])], vec![(1, vec![2, 0])]]);
        let g = deflate_once(&f, &origin(2), &[0, 1], 1e-8).unwrap();
        assert_eq!(g.len(), 3);
    }

    #[test]
    fn illustrative_deflates_in_one_iteration() {
        let f = illustrative();
        let (g, report) =
            deflate_until_simple(&f, &origin(2), 1e-8, 10, Strategy::Single, 0).unwrap();
        assert!(report.simple);
        assert_eq!(report.iterations(), 1);
        assert_eq!(g.len(), 3);
    }

    #[test]
    fn polished_driver_tightens_a_coarse_point() {
        // float domain, point off by 1e-4: the polished driver still
        // reaches a simple root and moves the point toward the origin
        let f = illustrative().to_approx();
        let start = vec![2e-4, -1e-4];
        let (_, pt, report) =
            deflate_until_simple_polished(&f, &start, 1e-3, 10, Strategy::Single, 0).unwrap();
        assert!(report.simple);
        let drift0 = 2e-4_f64;
        let drift = pt.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
        assert!(drift < drift0, "polish did not improve the point: {drift}");
    }

    #[test]
    fn already_simple_is_an_error() {
        let f = sys(2, vec![vec![(1, vec![1, 0])], vec![(1, vec![0, 1])]]);
        assert!(matches!(
            deflate_once(&f, &origin(2), &[0], 1e-8),
            Err(DeflateError::AlreadySimple)
        ));
    }
}
