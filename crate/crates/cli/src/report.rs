//! Run report: JSON-serializable (schema 1) and a human-readable rendering.

use serde::Serialize;
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Debug, Clone)]
pub struct DualTerm {
    pub exponent: Vec<u32>,
    /// (re, im)
    pub coefficient: [f64; 2],
}

#[derive(Serialize, Debug, Clone)]
pub struct NuEntry {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub value: [f64; 2],
}

#[derive(Serialize, Debug, Clone)]
pub struct TraceEntry {
    pub point: Vec<[f64; 2]>,
    pub residual: f64,
    pub step: f64,
}

#[derive(Serialize, Debug, Clone, Default)]
pub struct Counts {
    pub polys: usize,
    pub vars: usize,
    pub iterations: usize,
}

#[derive(Serialize, Debug, Clone)]
pub struct Report {
    pub schema: u32,
    pub method: String,
    pub domain: String,
    pub tol: f64,
    pub seed: u64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nil_index: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub breadth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_set: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_basis: Option<Vec<Vec<DualTerm>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_values: Option<Vec<NuEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deflated_system: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extended_system: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refined_point: Option<Vec<[f64; 2]>>,
    pub counts: Counts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub newton_trace: Option<Vec<TraceEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadratic_convergence: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified_simple: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds_tried: Option<Vec<u64>>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(method: &str, domain: &str, tol: f64, seed: u64) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            method: method.to_string(),
            domain: domain.to_string(),
            tol,
            seed,
            status: "ok".to_string(),
            multiplicity: None,
            nil_index: None,
            breadth: None,
            e_set: None,
            dual_basis: None,
            nu_values: None,
            deflated_system: None,
            extended_system: None,
            refined_point: None,
            counts: Counts::default(),
            newton_trace: None,
            quadratic_convergence: None,
            verified_simple: None,
            seeds_tried: None,
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!(
            "method {} (domain {}, tol {:e}, seed {})",
            self.method, self.domain, self.tol, self.seed
        ));
        if let Some(m) = self.multiplicity {
            line(format!(
                "multiplicity {m}, nil-index {}, breadth {}",
                self.nil_index.unwrap_or(0),
                self.breadth.unwrap_or(0)
            ));
        }
        if let Some(e) = &self.e_set {
            let names: Vec<String> = e.iter().map(|x| mono_name(x)).collect();
            line(format!("primal exponents E: {{{}}}", names.join(", ")));
        }
        if let Some(basis) = &self.dual_basis {
            line("dual basis (coefficients of (1/b!) d^b):".to_string());
            for (i, f) in basis.iter().enumerate() {
                let terms: Vec<String> = f
                    .iter()
                    .map(|t| format!("{} {}", fmt_c(t.coefficient), mono_name(&t.exponent)))
                    .collect();
                line(format!("  L{i} = {}", terms.join(" + ")));
            }
        }
        if let Some(nu) = &self.nu_values {
            line("structure constants nu:".to_string());
            for entry in nu {
                line(format!(
                    "  nu[{}, {}] = {}",
                    mono_name(&entry.alpha),
                    mono_name(&entry.beta),
                    fmt_c(entry.value)
                ));
            }
        }
        if let Some(polys) = &self.deflated_system {
            line(format!("deflated system ({} polynomials):", polys.len()));
            for p in polys {
                line(format!("  {p}"));
            }
        }
        if let Some(polys) = &self.extended_system {
            line(format!("extended system ({} polynomials):", polys.len()));
            for p in polys {
                line(format!("  {p}"));
            }
        }
        line(format!(
            "counts: {} polynomials, {} unknowns, {} iterations",
            self.counts.polys, self.counts.vars, self.counts.iterations
        ));
        if let Some(trace) = &self.newton_trace {
            line("newton trace (residual, step):".to_string());
            for (k, t) in trace.iter().enumerate() {
                line(format!("  it {k}: residual {:.3e} step {:.3e}", t.residual, t.step));
            }
        }
        if let Some(q) = self.quadratic_convergence {
            line(format!("quadratic convergence: {q}"));
        }
        if let Some(pt) = &self.refined_point {
            let coords: Vec<String> = pt.iter().map(|c| fmt_c(*c)).collect();
            line(format!("refined point: ({})", coords.join(", ")));
        }
        if let Some(v) = self.verified_simple {
            line(format!("verified simple root: {v}"));
        }
        if let Some(seeds) = &self.seeds_tried {
            if seeds.len() > 1 {
                line(format!("randomization seeds tried: {seeds:?}"));
            }
        }
        let timing: Vec<String> = self
            .timings_ms
            .iter()
            .map(|(k, v)| format!("{k} {v:.2} ms"))
            .collect();
        line(format!("timings: {}", timing.join(", ")));
        line(format!("status: {}", self.status));
        out
    }
}

fn mono_name(e: &[u32]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0)
        .map(|(i, &p)| {
            if p == 1 {
                format!("x{}", i + 1)
            } else {
                format!("x{}^{p}", i + 1)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

fn fmt_c([re, im]: [f64; 2]) -> String {
    if im == 0.0 {
        format!("{re:.12}")
    } else if re == 0.0 {
        format!("{im:.12}i")
    } else if im < 0.0 {
        format!("{re:.12}{im:.12}i")
    } else {
        format!("{re:.12}+{im:.12}i")
    }
}
