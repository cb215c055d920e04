//! Newton iteration with convergence diagnostics, random square subsystem
//! extraction, simple-root verification, and the combined refinement of a
//! root together with its multiplicity structure.

use crate::dual::MultiplicityStructure;
use crate::extended::{build_extended_with_matrices, build_parametric_matrices, ExtendedSystem};
use crate::linalg::{least_squares, lu_solve, numerical_rank, Matrix};
use crate::poly::{DomainError, PolySystem, Polynomial};
use crate::rng::XorShift64;
use crate::scalar::{FloatScalar, Scalar};

use std::fmt;

#[derive(Debug)]
pub enum NewtonError {
    NotEnoughEquations { have: usize, need: usize },
    NoConvergence { seeds_tried: Vec<u64> },
    Domain(DomainError),
    Dual(crate::dual::DualError),
}

impl fmt::Display for NewtonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NewtonError::NotEnoughEquations { have, need } => {
                write!(f, "cannot square up: {have} equations for {need} unknowns")
            }
            NewtonError::NoConvergence { seeds_tried } => {
                write!(f, "Newton did not converge (seeds tried: {seeds_tried:?})")
            }
            NewtonError::Domain(e) => write!(f, "{e}"),
            NewtonError::Dual(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for NewtonError {}

impl From<DomainError> for NewtonError {
    fn from(e: DomainError) -> Self {
        NewtonError::Domain(e)
    }
}

/// A polynomial system prepared for repeated evaluation: gradients are
/// differentiated once up front.
#[derive(Clone, Debug)]
pub struct EvalSystem<F: FloatScalar> {
    nvars: usize,
    polys: Vec<Polynomial<F>>,
    grads: Vec<Vec<Polynomial<F>>>,
}

impl<F: FloatScalar> EvalSystem<F> {
    pub fn new(nvars: usize, polys: Vec<Polynomial<F>>) -> Self {
        let grads = polys
            .iter()
            .map(|p| (0..nvars).map(|j| p.diff_var(j)).collect())
            .collect();
        EvalSystem {
            nvars,
            polys,
            grads,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> &[Polynomial<F>] {
        &self.polys
    }

    pub fn residual(&self, pt: &[F]) -> Vec<F> {
        self.polys.iter().map(|p| p.eval(pt)).collect()
    }

    pub fn residual_max(&self, pt: &[F]) -> f64 {
        self.residual(pt)
            .iter()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max)
    }

    pub fn jacobian_at(&self, pt: &[F]) -> Matrix<F> {
        Matrix::from_fn(self.polys.len(), self.nvars, |i, j| {
            self.grads[i][j].eval(pt)
        })
    }
}

/// A square system obtained from random real linear combinations of an
/// (over)determined system. The combination matrix is retained and the
/// construction is reproducible from the seed.
#[derive(Clone, Debug)]
pub struct SquareSystem<F: FloatScalar> {
    pub source: EvalSystem<F>,
    /// m x M combination coefficients; `None` means the identity (the
    /// source was already square and randomization was declined).
    pub combo_matrix: Option<Vec<Vec<f64>>>,
    pub seed: u64,
}

impl<F: FloatScalar> SquareSystem<F> {
    pub fn unknowns(&self) -> usize {
        self.source.nvars()
    }

    pub fn residual(&self, pt: &[F]) -> Vec<F> {
        let full = self.source.residual(pt);
        match &self.combo_matrix {
            None => full,
            Some(c) => combine(c, &full),
        }
    }

    pub fn jacobian_at(&self, pt: &[F]) -> Matrix<F> {
        let j = self.source.jacobian_at(pt);
        match &self.combo_matrix {
            None => j,
            Some(c) => {
                let m = c.len();
                Matrix::from_fn(m, self.unknowns(), |r, col| {
                    let mut acc = F::zero();
                    for (k, w) in c[r].iter().enumerate() {
                        if *w != 0.0 {
                            acc = acc + j.get(k, col).scale(*w);
                        }
                    }
                    acc
                })
            }
        }
    }
}

fn combine<F: FloatScalar>(c: &[Vec<f64>], vals: &[F]) -> Vec<F> {
    c.iter()
        .map(|row| {
            let mut acc = F::zero();
            for (k, w) in row.iter().enumerate() {
                if *w != 0.0 {
                    acc = acc + vals[k].scale(*w);
                }
            }
            acc
        })
        .collect()
}

/// Takes `m = nvars` random linear combinations of the system, with
/// coefficients i.i.d. uniform on [-1, 1] from the seeded generator. With
/// `keep_square` set and an already-square input, returns it unchanged.
pub fn randomize_square<F: FloatScalar>(
    sys: EvalSystem<F>,
    seed: u64,
    keep_square: bool,
) -> Result<SquareSystem<F>, NewtonError> {
    let need = sys.nvars();
    let have = sys.len();
    if have < need {
        return Err(NewtonError::NotEnoughEquations { have, need });
    }
    if keep_square && have == need {
        return Ok(SquareSystem {
            source: sys,
            combo_matrix: None,
            seed,
        });
    }
    let mut rng = XorShift64::new(seed);
    let combo: Vec<Vec<f64>> = (0..need)
        .map(|_| (0..have).map(|_| rng.unit()).collect())
        .collect();
    Ok(SquareSystem {
        source: sys,
        combo_matrix: Some(combo),
        seed,
    })
}

/// One Newton iterate: the point reached, the max-norm residual of the
/// source system there, and the max-norm of the step that produced it.
#[derive(Clone, Debug)]
pub struct NewtonIterate<F: FloatScalar> {
    pub point: Vec<F>,
    pub residual: f64,
    pub step: f64,
}

#[derive(Clone, Debug)]
pub struct NewtonTrace<F: FloatScalar> {
    pub iterates: Vec<NewtonIterate<F>>,
    pub converged: bool,
    pub quadratic_flag: bool,
    /// Fitted constant C in step_{k+1} <= C step_k^2 over the last usable
    /// transitions (diagnostic only).
    pub quadratic_constant: Option<f64>,
    /// A singular Jacobian was hit before convergence.
    pub singular: bool,
}

impl<F: FloatScalar> NewtonTrace<F> {
    pub fn last_point(&self) -> &[F] {
        &self.iterates.last().expect("nonempty trace").point
    }

    pub fn iterations(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }
}

enum StepKind {
    Square,
    LeastSquares,
}

fn newton_loop<F: FloatScalar>(
    residual: &dyn Fn(&[F]) -> Vec<F>,
    jacobian: &dyn Fn(&[F]) -> Matrix<F>,
    source_residual_max: &dyn Fn(&[F]) -> f64,
    start: &[F],
    tol: f64,
    max_iter: usize,
    kind: StepKind,
) -> NewtonTrace<F> {
    let mut pt = start.to_vec();
    let mut iterates = vec![NewtonIterate {
        point: pt.clone(),
        residual: source_residual_max(&pt),
        step: 0.0,
    }];
    let mut converged = false;
    let mut singular = false;
    for _ in 0..max_iter {
        let f = residual(&pt);
        let j = jacobian(&pt);
        let neg_f: Vec<F> = f.iter().map(|x| -x.clone()).collect();
        let solve = match kind {
            StepKind::Square => lu_solve(&j, &neg_f, 1e-14),
            StepKind::LeastSquares => least_squares(&j, &neg_f, 1e-14),
        };
        let delta = match solve {
            Ok(d) => d,
            Err(_) => {
                singular = true;
                break;
            }
        };
        let step = delta.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        for (p, d) in pt.iter_mut().zip(&delta) {
            *p = p.clone() + d.clone();
        }
        iterates.push(NewtonIterate {
            point: pt.clone(),
            residual: source_residual_max(&pt),
            step,
        });
        if step < tol {
            converged = true;
            break;
        }
    }
    let (quadratic_flag, quadratic_constant) = classify_convergence(&iterates, converged);
    NewtonTrace {
        iterates,
        converged,
        quadratic_flag,
        quadratic_constant,
        singular,
    }
}

/// Order estimate from consecutive step norms. Steps below the float noise
/// floor or above 0.5 are excluded; the estimate comes from the last usable
/// triple: p = log(s_{k+1}/s_k) / log(s_k/s_{k-1}), quadratic when p >= 1.5.
fn classify_convergence<F: FloatScalar>(
    iterates: &[NewtonIterate<F>],
    converged: bool,
) -> (bool, Option<f64>) {
    let steps: Vec<f64> = iterates
        .iter()
        .skip(1)
        .map(|it| it.step)
        .filter(|&s| s > 1e-13 && s < 0.5)
        .collect();
    if steps.len() < 3 {
        // not enough history: an immediate collapse from an already-good
        // start still counts as regular convergence
        let flag = converged && iterates.last().map_or(false, |it| it.residual < 1e-9);
        return (flag, None);
    }
    let mut order_est = None;
    let mut cfit: Option<f64> = None;
    for w in steps.windows(3).rev() {
        let (s0, s1, s2) = (w[0], w[1], w[2]);
        let d1 = (s1 / s0).ln();
        let d2 = (s2 / s1).ln();
        if d1 < 0.0 && d2 < 0.0 {
            order_est = Some(d2 / d1);
            cfit = Some(s2 / (s1 * s1));
            break;
        }
    }
    match order_est {
        Some(p) => (p >= 1.5, cfit),
        None => (false, None),
    }
}

/// Standard Newton iteration on a square system: solves `J delta = -F` by
/// partially pivoted LU, stopping when the step max-norm drops below `tol`.
/// A singular Jacobian ends the trace with `converged = false` rather than
/// an error.
pub fn newton_iterate<F: FloatScalar>(
    sq: &SquareSystem<F>,
    start: &[F],
    tol: f64,
    max_iter: usize,
) -> NewtonTrace<F> {
    assert_eq!(start.len(), sq.unknowns());
    newton_loop(
        &|pt| sq.residual(pt),
        &|pt| sq.jacobian_at(pt),
        &|pt| sq.source.residual_max(pt),
        start,
        tol,
        max_iter,
        StepKind::Square,
    )
}

/// Gauss-Newton on an overdetermined system: each step solves the linear
/// least-squares problem `min |J delta + F|` by pivoted QR. On square
/// systems this coincides with [`newton_iterate`] without randomization.
pub fn gauss_newton<F: FloatScalar>(
    sys: &EvalSystem<F>,
    start: &[F],
    tol: f64,
    max_iter: usize,
) -> NewtonTrace<F> {
    assert_eq!(start.len(), sys.nvars());
    newton_loop(
        &|pt| sys.residual(pt),
        &|pt| sys.jacobian_at(pt),
        &|pt| sys.residual_max(pt),
        start,
        tol,
        max_iter,
        StepKind::LeastSquares,
    )
}

/// Verdict of a simple-root check.
#[derive(Clone, Debug)]
pub struct SimpleCheck {
    pub simple: bool,
    pub residual: f64,
    pub rank: usize,
    pub unknowns: usize,
}

/// True iff the residual max-norm is at most `tol` and the Jacobian at the
/// point has full column rank at tolerance `tol`.
pub fn verify_simple<F: FloatScalar>(
    polys: &[Polynomial<F>],
    nvars: usize,
    point: &[F],
    tol: f64,
) -> Result<SimpleCheck, DomainError> {
    let sys = EvalSystem::new(nvars, polys.to_vec());
    let residual = sys.residual_max(point);
    let j = sys.jacobian_at(point);
    let rank = numerical_rank(&j, tol)?.rank;
    Ok(SimpleCheck {
        simple: residual <= tol && rank == nvars,
        residual,
        rank,
        unknowns: nvars,
    })
}

/// Result of refining a root together with its multiplicity structure.
#[derive(Clone, Debug)]
pub struct RefinedStructure<F: FloatScalar> {
    /// Refined point (first n coordinates of the extended solution).
    pub point: Vec<F>,
    /// Refined values of the mu parameters, aligned with
    /// `extended.pm.mu_vars()`.
    pub mu: Vec<F>,
    pub trace: NewtonTrace<F>,
    pub seeds_tried: Vec<u64>,
}

impl<F: FloatScalar> RefinedStructure<F> {
    /// nu_{alpha_i, gamma} at the refined parameters, for any gamma: matrix
    /// entries read off directly, everything else reconstructed through the
    /// numeric multiplication matrices.
    pub fn nu_at(
        &self,
        pm: &crate::extended::ParametricMatrixSet,
        gamma: &crate::exponent::Exponent,
        i: usize,
    ) -> F {
        pm.nu_from_values(&self.mu, gamma, i)
    }
}

/// Builds the extended system for the structure's primal exponents,
/// squares it up with a seeded random combination, and Newton-iterates from
/// the approximate point and structure constants. On a singular Jacobian or
/// non-convergence the randomization seed is advanced (up to 3 attempts).
///
/// Returns the extended system alongside the refinement so callers can
/// inspect or re-verify it.
#[allow(clippy::type_complexity)]
pub fn refine_with_structure<K: Scalar>(
    f: &PolySystem<K>,
    xi: &[K],
    ms: &MultiplicityStructure<K::Approx>,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<(ExtendedSystem<K>, RefinedStructure<K::Approx>), NewtonError> {
    let pm = build_parametric_matrices(ms.e_set())?;
    let ext = build_extended_with_matrices(f, pm, None)?;
    let start_mu: Vec<K::Approx> = ext
        .pm
        .mu_vars()
        .iter()
        .map(|mv| {
            let i = ms
                .e_set()
                .iter()
                .position(|a| a == &mv.alpha)
                .expect("mu row exponent is in E");
            ms.nu(i, &mv.target)
        })
        .collect();
    let mut start: Vec<K::Approx> = xi.iter().map(Scalar::to_approx).collect();
    start.extend(start_mu);
    let refined = refine_extended_from(&ext, &start, tol, max_iter, seed)?;
    Ok((ext, refined))
}

/// Newton refinement on an already-built extended system from an explicit
/// start vector (point coordinates followed by mu values). Retries with
/// fresh randomization seeds (up to 3) on singular Jacobians or
/// non-convergence.
pub fn refine_extended_from<K: Scalar>(
    ext: &ExtendedSystem<K>,
    start: &[K::Approx],
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<RefinedStructure<K::Approx>, NewtonError> {
    assert_eq!(start.len(), ext.total_unknowns());
    let n = ext.pm.nvars();
    let eval = EvalSystem::new(
        ext.total_unknowns(),
        ext.polys.iter().map(Polynomial::to_approx).collect(),
    );
    let mut seeds_tried = Vec::new();
    for attempt in 0..3 {
        let s = seed + attempt;
        seeds_tried.push(s);
        let sq = randomize_square(eval.clone(), s, false)?;
        let trace = newton_iterate(&sq, start, tol, max_iter);
        if trace.converged && !trace.singular {
            let sol = trace.last_point().to_vec();
            let (point, mu) = sol.split_at(n);
            return Ok(RefinedStructure {
                point: point.to_vec(),
                mu: mu.to_vec(),
                trace,
                seeds_tried,
            });
        }
    }
    Err(NewtonError::NoConvergence { seeds_tried })
}
