//! `deflate`: deflation of isolated singular roots of polynomial systems.
//!
//! ```text
//! deflate --method {determinantal|mu|dual-only} --input FILE
//!         [--tol T] [--seed S] [--max-iter K] [--strategy {single|all}]
//!         [--symbolic-point] [--family-n N] [--output {text|json}]
//!         [--no-randomize]
//! ```
//!
//! Exit codes: 0 success, 1 parse error, 2 numeric failure,
//! 3 non-convergence.

mod parse;
mod pipeline;
mod report;

use pipeline::{emit_family, run, Method, OutputFormat, RunConfig, RunError};
use singular_deflate::determinantal::Strategy;
use std::process::ExitCode;

fn usage() -> &'static str {
    "usage: deflate --method {determinantal|mu|dual-only} --input FILE\n\
     \x20              [--tol T] [--seed S] [--max-iter K] [--strategy {single|all}]\n\
     \x20              [--symbolic-point] [--family-n N] [--output {text|json}]\n\
     \x20              [--no-randomize]"
}

struct Args {
    config: RunConfig,
    input: Option<String>,
    family_n: Option<usize>,
}

fn parse_args(argv: &[String]) -> Result<Args, String> {
    let mut config = RunConfig::default();
    let mut input = None;
    let mut family_n = None;
    let mut method_given = false;
    let mut it = argv.iter();
    while let Some(arg) = it.next() {
        let mut value = |name: &str| -> Result<String, String> {
            it.next()
                .cloned()
                .ok_or_else(|| format!("{name} needs a value"))
        };
        match arg.as_str() {
            "--method" => {
                method_given = true;
                config.method = match value("--method")?.as_str() {
                    "determinantal" => Method::Determinantal,
                    "mu" => Method::Mu,
                    "dual-only" => Method::DualOnly,
                    other => return Err(format!("unknown method {other}")),
                };
            }
            "--input" => input = Some(value("--input")?),
            "--tol" => {
                config.tol = value("--tol")?
                    .parse()
                    .map_err(|_| "bad --tol value".to_string())?;
                if config.tol <= 0.0 {
                    return Err("--tol must be positive".into());
                }
            }
            "--seed" => {
                config.seed = value("--seed")?
                    .parse()
                    .map_err(|_| "bad --seed value".to_string())?;
            }
            "--max-iter" => {
                config.max_iter = value("--max-iter")?
                    .parse()
                    .map_err(|_| "bad --max-iter value".to_string())?;
                if config.max_iter == 0 {
                    return Err("--max-iter must be at least 1".into());
                }
            }
            "--strategy" => {
                config.strategy = match value("--strategy")?.as_str() {
                    "single" => Strategy::Single,
                    "all" => Strategy::All,
                    other => return Err(format!("unknown strategy {other}")),
                };
            }
            "--symbolic-point" => config.symbolic_point = true,
            "--no-randomize" => config.no_randomize = true,
            "--family-n" => {
                family_n = Some(
                    value("--family-n")?
                        .parse()
                        .map_err(|_| "bad --family-n value".to_string())?,
                );
            }
            "--output" => {
                config.output = match value("--output")?.as_str() {
                    "text" => OutputFormat::Text,
                    "json" => OutputFormat::Json,
                    other => return Err(format!("unknown output format {other}")),
                };
            }
            "--help" | "-h" => return Err(String::new()),
            other => return Err(format!("unknown flag {other}")),
        }
    }
    if !method_given {
        return Err("--method is required".into());
    }
    if input.is_none() && family_n.is_none() {
        return Err("either --input FILE or --family-n N is required".into());
    }
    Ok(Args {
        config,
        input,
        family_n,
    })
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let args = match parse_args(&argv) {
        Ok(a) => a,
        Err(msg) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            eprintln!("{}", usage());
            return ExitCode::from(1);
        }
    };
    let system = if let Some(n) = args.family_n {
        match emit_family(n) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    } else {
        let path = args.input.as_deref().unwrap();
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {path}: {e}");
                return ExitCode::from(1);
            }
        };
        match parse::parse_system(&text) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("parse error: {e}");
                return ExitCode::from(1);
            }
        }
    };
    match run(&args.config, &system) {
        Ok(report) => {
            match args.config.output {
                OutputFormat::Json => println!("{}", report.to_json()),
                OutputFormat::Text => print!("{}", report.to_text()),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                RunError::Numeric(_) => ExitCode::from(2),
                RunError::NonConvergence(_) => ExitCode::from(3),
            }
        }
    }
}
