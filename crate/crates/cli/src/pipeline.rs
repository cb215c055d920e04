//! Orchestration of the two deflation pipelines and the dual-space report.

use crate::parse::DomainSystem;
use crate::report::{Counts, DualTerm, NuEntry, Report, TraceEntry};
use singular_deflate::determinantal::{deflate_until_simple, Strategy};
use singular_deflate::dual::{dual_space, MultiplicityStructure, DEFAULT_D_MAX};
use singular_deflate::extended::build_extended_system;
use singular_deflate::newton::{
    newton_iterate, randomize_square, refine_with_structure, verify_simple, EvalSystem,
};
use singular_deflate::{Exponent, FloatScalar, PolySystem, Polynomial, Rat, Scalar};
use std::fmt;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Determinantal,
    Mu,
    DualOnly,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Determinantal => "determinantal",
            Method::Mu => "mu",
            Method::DualOnly => "dual-only",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub method: Method,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub output: OutputFormat,
    pub symbolic_point: bool,
    pub no_randomize: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            method: Method::DualOnly,
            tol: 1e-8,
            max_iter: 50,
            seed: 0,
            strategy: Strategy::Single,
            output: OutputFormat::Text,
            symbolic_point: false,
            no_randomize: false,
        }
    }
}

/// Pipeline failures, mapped to process exit codes 2 and 3 (parse errors
/// carry code 1).
#[derive(Debug)]
pub enum RunError {
    Numeric(String),
    NonConvergence(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Numeric(m) => write!(f, "numeric failure: {m}"),
            RunError::NonConvergence(m) => write!(f, "no convergence: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

pub fn run(config: &RunConfig, sys: &DomainSystem) -> Result<Report, RunError> {
    let domain = sys.domain_name();
    match sys {
        DomainSystem::Rational(s) => run_typed(config, s, domain),
        DomainSystem::Float(s) => run_typed(config, s, domain),
        DomainSystem::Complex(s) => run_typed(config, s, domain),
    }
}

/// The breadth-2 family: {x1^3 + x1^2 - x2^2, x2^3 + x2^2 - x3, ...,
/// x_{n-1}^3 + x_{n-1}^2 - x_n, x_n^2} with the origin as the root.
pub fn emit_family(n: usize) -> Result<DomainSystem, RunError> {
    if n < 2 {
        return Err(RunError::Numeric("family requires n >= 2".into()));
    }
    let unit = |i: usize, p: u32| {
        let mut e = vec![0u32; n];
        e[i] = p;
        Exponent::from_slice(&e)
    };
    let mut polys: Vec<Polynomial<Rat>> = Vec::with_capacity(n);
    polys.push(Polynomial::from_terms(
        n,
        [
            (unit(0, 3), Rat::from_int(1)),
            (unit(0, 2), Rat::from_int(1)),
            (unit(1, 2), Rat::from_int(-1)),
        ],
    ));
    for k in 1..n - 1 {
        polys.push(Polynomial::from_terms(
            n,
            [
                (unit(k, 3), Rat::from_int(1)),
                (unit(k, 2), Rat::from_int(1)),
                (unit(k + 1, 1), Rat::from_int(-1)),
            ],
        ));
    }
    polys.push(Polynomial::from_terms(
        n,
        [(unit(n - 1, 2), Rat::from_int(1))],
    ));
    let sys = PolySystem::new(n, polys).with_point(vec![Rat::from_int(0); n]);
    Ok(DomainSystem::Rational(sys))
}

fn require_point<K: Scalar>(s: &PolySystem<K>) -> Result<Vec<K>, RunError> {
    s.point
        .clone()
        .ok_or_else(|| RunError::Numeric("this method needs a `point` line".into()))
}

fn coeff_string<K: Scalar>(c: &K) -> String {
    if K::EXACT {
        return format!("{c}");
    }
    let (re, im) = c.to_re_im();
    if im == 0.0 {
        format!("{re:.16e}")
    } else {
        format!("({re:.16e}+{im:.16e}i)")
    }
}

fn poly_strings<K: Scalar>(polys: &[Polynomial<K>], names: &[String]) -> Vec<String> {
    polys
        .iter()
        .map(|p| p.to_string_with_fmt(names, coeff_string::<K>))
        .collect()
}

fn re_im<K: Scalar>(v: &K) -> [f64; 2] {
    let (re, im) = v.to_re_im();
    [re, im]
}

fn structure_into_report<F: FloatScalar>(ms: &MultiplicityStructure<F>, report: &mut Report) {
    report.multiplicity = Some(ms.delta());
    report.nil_index = Some(ms.nil_index());
    report.breadth = Some(ms.breadth());
    report.e_set = Some(ms.e_set().iter().map(|e| e.as_slice().to_vec()).collect());
    report.dual_basis = Some(
        ms.dual_basis()
            .iter()
            .map(|l| {
                l.coeffs()
                    .iter()
                    .map(|(e, c)| DualTerm {
                        exponent: e.as_slice().to_vec(),
                        coefficient: re_im(c),
                    })
                    .collect()
            })
            .collect(),
    );
}

fn trace_into_report<F: FloatScalar>(
    trace: &singular_deflate::newton::NewtonTrace<F>,
    report: &mut Report,
) {
    report.newton_trace = Some(
        trace
            .iterates
            .iter()
            .map(|it| TraceEntry {
                point: it.point.iter().map(re_im).collect(),
                residual: it.residual,
                step: it.step,
            })
            .collect(),
    );
    report.quadratic_convergence = Some(trace.quadratic_flag);
}

fn run_typed<K: Scalar>(
    config: &RunConfig,
    sys: &PolySystem<K>,
    domain: &str,
) -> Result<Report, RunError> {
    let mut report = Report::new(config.method.name(), domain, config.tol, config.seed);
    fn timings(report: &mut Report, name: &str, t: Instant) {
        report
            .timings_ms
            .insert(name.to_string(), t.elapsed().as_secs_f64() * 1e3);
    }
    match config.method {
        Method::DualOnly => {
            let pt = require_point(sys)?;
            let t = Instant::now();
            let ms = dual_space(sys, &pt, config.tol, DEFAULT_D_MAX)
                .map_err(|e| RunError::Numeric(e.to_string()))?;
            timings(&mut report, "dual_ms", t);
            structure_into_report(&ms, &mut report);
            // full structure-constant table up to the nil-index
            let mut nu = Vec::new();
            for (i, alpha) in ms.e_set().iter().enumerate() {
                for l in [ms.dual_basis()[i].coeffs()] {
                    for (beta, c) in l {
                        if !ms.e_set().contains(beta) {
                            nu.push(NuEntry {
                                alpha: alpha.as_slice().to_vec(),
                                beta: beta.as_slice().to_vec(),
                                value: re_im(c),
                            });
                        }
                    }
                }
            }
            report.nu_values = Some(nu);
            report.counts = Counts {
                polys: sys.len(),
                vars: sys.nvars,
                iterations: ms.kernel_dims().len(),
            };
            Ok(report)
        }
        Method::Determinantal => {
            let pt = require_point(sys)?;
            let t = Instant::now();
            let (deflated, def_report) = deflate_until_simple(
                sys,
                &pt,
                config.tol,
                config.max_iter,
                config.strategy,
                config.seed,
            )
            .map_err(|e| RunError::Numeric(e.to_string()))?;
            timings(&mut report, "deflate_ms", t);
            report.deflated_system = Some(poly_strings(&deflated.polys, &deflated.varnames));
            report.counts = Counts {
                polys: deflated.len(),
                vars: deflated.nvars,
                iterations: def_report.iterations(),
            };
            // polish the root on the deflated system and verify simplicity
            let t = Instant::now();
            let approx = deflated.to_approx();
            let eval = EvalSystem::new(approx.nvars, approx.polys.clone());
            let keep_square = config.no_randomize;
            let sq = randomize_square(eval, config.seed, keep_square)
                .map_err(|e| RunError::Numeric(e.to_string()))?;
            let start: Vec<<K as Scalar>::Approx> = pt.iter().map(Scalar::to_approx).collect();
            let trace = newton_iterate(&sq, &start, config.tol.min(1e-10), config.max_iter);
            timings(&mut report, "newton_ms", t);
            if !trace.converged {
                report.status = "newton did not converge".into();
                trace_into_report(&trace, &mut report);
                return Err(RunError::NonConvergence(
                    "Newton on the deflated system did not converge".into(),
                ));
            }
            let t = Instant::now();
            let check = verify_simple(
                &approx.polys,
                approx.nvars,
                trace.last_point(),
                config.tol,
            )
            .map_err(|e| RunError::Numeric(e.to_string()))?;
            timings(&mut report, "verify_ms", t);
            report.refined_point = Some(trace.last_point().iter().map(re_im).collect());
            trace_into_report(&trace, &mut report);
            report.verified_simple = Some(check.simple);
            if !check.simple {
                report.status = format!(
                    "root not verified simple (rank {} of {})",
                    check.rank, check.unknowns
                );
                return Err(RunError::NonConvergence(report.status.clone()));
            }
            Ok(report)
        }
        Method::Mu => {
            let pt = require_point(sys)?;
            let t = Instant::now();
            let ms = dual_space(sys, &pt, config.tol, DEFAULT_D_MAX)
                .map_err(|e| RunError::Numeric(e.to_string()))?;
            timings(&mut report, "dual_ms", t);
            structure_into_report(&ms, &mut report);
            if config.symbolic_point {
                // emit the deflation ideal generators with the point symbolic
                let t = Instant::now();
                let ext = build_extended_system(sys, ms.e_set(), None)
                    .map_err(|e| RunError::Numeric(e.to_string()))?;
                timings(&mut report, "extended_ms", t);
                let names = extended_names(&sys.varnames, ext.pm.mu_vars().len());
                report.extended_system = Some(poly_strings(&ext.polys, &names));
                report.counts = Counts {
                    polys: ext.polys.len(),
                    vars: ext.total_unknowns(),
                    iterations: 0,
                };
                return Ok(report);
            }
            let t = Instant::now();
            let (ext, refined) =
                refine_with_structure(sys, &pt, &ms, config.tol.min(1e-10), config.max_iter, config.seed)
                    .map_err(|e| RunError::NonConvergence(e.to_string()))?;
            timings(&mut report, "newton_ms", t);
            let names = extended_names(&sys.varnames, ext.pm.mu_vars().len());
            report.extended_system = Some(poly_strings(&ext.polys, &names));
            report.counts = Counts {
                polys: ext.polys.len(),
                vars: ext.total_unknowns(),
                iterations: refined.trace.iterations(),
            };
            report.refined_point = Some(refined.point.iter().map(re_im).collect());
            report.seeds_tried = Some(refined.seeds_tried.clone());
            trace_into_report(&refined.trace, &mut report);
            // recovered structure constants, matrix entries first
            let mut nu: Vec<NuEntry> = ext
                .pm
                .mu_vars()
                .iter()
                .zip(&refined.mu)
                .map(|(mv, v)| NuEntry {
                    alpha: mv.alpha.as_slice().to_vec(),
                    beta: mv.target.as_slice().to_vec(),
                    value: re_im(v),
                })
                .collect();
            for (i, alpha) in ms.e_set().iter().enumerate() {
                for beta in ms.dual_basis()[i].coeffs().keys() {
                    let in_matrix = ext
                        .pm
                        .mu_vars()
                        .iter()
                        .any(|mv| &mv.alpha == alpha && &mv.target == beta);
                    if !in_matrix && !ms.e_set().contains(beta) {
                        nu.push(NuEntry {
                            alpha: alpha.as_slice().to_vec(),
                            beta: beta.as_slice().to_vec(),
                            value: re_im(&refined.nu_at(&ext.pm, beta, i)),
                        });
                    }
                }
            }
            report.nu_values = Some(nu);
            let t = Instant::now();
            let eval_polys: Vec<Polynomial<<K as Scalar>::Approx>> =
                ext.polys.iter().map(Polynomial::to_approx).collect();
            let mut at = refined.point.clone();
            at.extend(refined.mu.iter().cloned());
            let check = verify_simple(&eval_polys, ext.total_unknowns(), &at, config.tol)
                .map_err(|e| RunError::Numeric(e.to_string()))?;
            timings(&mut report, "verify_ms", t);
            report.verified_simple = Some(check.simple);
            if !check.simple {
                report.status = format!(
                    "extended root not verified simple (rank {} of {})",
                    check.rank, check.unknowns
                );
                return Err(RunError::NonConvergence(report.status.clone()));
            }
            Ok(report)
        }
    }
}

fn extended_names(varnames: &[String], mu_count: usize) -> Vec<String> {
    let mut names: Vec<String> = varnames.to_vec();
    for i in 1..=mu_count {
        names.push(format!("mu{i}"));
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_system;

    #[test]
    fn family_sizes() {
        for (n, npolys) in [(2usize, 2usize), (3, 3), (5, 5)] {
            match emit_family(n).unwrap() {
                DomainSystem::Rational(s) => {
                    assert_eq!(s.len(), npolys);
                    assert_eq!(s.nvars, n);
                    assert!(s.point.is_some());
                }
                _ => panic!("family is rational"),
            }
        }
        assert!(emit_family(1).is_err());
    }

    #[test]
    fn float_coefficients_roundtrip_through_printing() {
        let src = "vars x y\npoly 14*x + 33*y - 3*sqrt(5)*(x^2 + 4*x*y + 4*y^2 + 2) + sqrt(7)\n";
        let DomainSystem::Float(sys) = parse_system(src).unwrap() else {
            panic!("expected float domain");
        };
        let printed = format!(
            "vars x y\npoly {}\n",
            sys.polys[0].to_string_with_fmt(&sys.varnames, coeff_string::<f64>)
        );
        let DomainSystem::Float(back) = parse_system(&printed).unwrap() else {
            panic!("expected float domain");
        };
        // 17 significant digits reproduce every binary64 coefficient exactly
        assert_eq!(sys.polys[0], back.polys[0]);
    }
}
