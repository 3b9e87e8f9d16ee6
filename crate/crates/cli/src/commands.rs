//! The three subcommands. Each returns its exit code together with the
//! report for standard output and diagnostics for standard error.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use credal_core::net::{VerifyOptions, DEFAULT_GENERATOR_CAP};
use credal_core::{sample, JointModel, PreciseNet};
use serde::Serialize;
use serde_json::{json, Value};

use crate::format::{Failure, NetworkFile};
use crate::query::{self, QueryFile};

/// Random positive combinations checked per unit of verification budget.
pub const AUDIT_COMBINATIONS_PER_BUDGET: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn report(code: i32, report: &impl Serialize, stderr: String) -> Outcome {
        Outcome { code, stdout: serde_json::to_string_pretty(report).expect("serializable") + "\n", stderr }
    }

    /// `validity` adds `"valid": false` to the report, as `validate` does.
    fn failure(failure: Failure, validity: bool) -> Outcome {
        let stderr = format!("error: {failure}\n");
        match failure {
            Failure::Input { message, certificate } => {
                let mut report = json!({ "error": message, "certificate": certificate });
                if validity {
                    report["valid"] = json!(false);
                }
                Outcome::report(2, &report, stderr)
            }
            Failure::Parse(_) => Outcome { code: 3, stdout: String::new(), stderr },
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn load_joint(file: &NetworkFile, cap: usize) -> Result<JointModel, Failure> {
    let net = file.build()?;
    let mut jm = JointModel::build(net, cap)?;
    file.apply_mutations(&mut jm)?;
    Ok(jm)
}

pub fn validate(net: &Path) -> Outcome {
    let run = || -> Result<Value, Failure> {
        let net = NetworkFile::parse(&read(net)?)?.build()?;
        Ok(json!({
            "valid": true,
            "nodes": net.dag().nodes(),
            "generator_count": net.generator_count(),
        }))
    };
    match run() {
        Ok(report) => Outcome::report(0, &report, String::new()),
        Err(f) => Outcome::failure(f, true),
    }
}

pub fn query(net: &Path, queries: &Path, seed: u64, cap: usize) -> Outcome {
    let run = || -> Result<Value, Failure> {
        let file = NetworkFile::parse(&read(net)?)?;
        let queries = QueryFile::parse(&read(queries)?)?;
        let jm = load_joint(&file, cap)?;
        let results = queries
            .queries
            .iter()
            .enumerate()
            .map(|(i, q)| {
                query::evaluate(&jm, q, seed, i).map_err(|f| match f {
                    Failure::Input { message, certificate } => {
                        Failure::Input { message: format!("query {i}: {message}"), certificate }
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(json!({ "seed": seed, "generator_count": jm.generators().len(), "results": results }))
    };
    match run() {
        Ok(report) => Outcome::report(0, &report, String::new()),
        Err(f) => Outcome::failure(f, false),
    }
}

/// Runs the requirement sweeps with `budget` random gambles per context and
/// the positivity audit with `5 · budget` random combinations.
pub fn verify(net: &Path, budget: usize, seed: u64) -> Outcome {
    let run = || -> Result<(bool, Value, String), Failure> {
        let file = NetworkFile::parse(&read(net)?)?;
        let jm = load_joint(&file, DEFAULT_GENERATOR_CAP)?;
        let options = VerifyOptions { samples: budget, seed, ..VerifyOptions::default() };
        let requirements = jm.verify_requirements(&options)?;
        let precise = PreciseNet::from_witnesses(jm.net())?;
        let mut rng = sample::substream(seed, u64::MAX - 1);
        let audit = precise.positivity_audit(&jm, budget * AUDIT_COMBINATIONS_PER_BUDGET, &mut rng)?;
        let passed = requirements.passed && audit.passed();

        let mut stderr = String::new();
        for v in requirements.violations() {
            let _ = writeln!(
                stderr,
                "{:?} violation: node {} given {:?} irrelevant [{}] gamble {:?}: joint {} local {}",
                v.requirement,
                v.node,
                v.given,
                v.irrelevant.iter().map(|n| n.as_str()).collect::<Vec<_>>().join(", "),
                v.gamble,
                v.joint,
                v.local
            );
        }
        if let Some(cert) = &requirements.coherence.zero_combination {
            let _ = writeln!(stderr, "joint generators admit a vanishing combination over {} generators", cert.len());
        }
        for f in &requirements.coherence.nonpositive_accepted {
            let _ = writeln!(stderr, "nonpositive gamble accepted: {f:?}");
        }
        for f in &requirements.coherence.positive_rejected {
            let _ = writeln!(stderr, "positive gamble rejected: {f:?}");
        }
        for g in &requirements.smallest.violations {
            let _ = writeln!(
                stderr,
                "generator {} (node {} given {:?}) has factor {:?} outside the local model",
                g.index, g.node, g.given, g.factor
            );
        }
        for a in &audit.failures {
            let _ = writeln!(stderr, "positivity audit: combination {:?} has expectation {}", a.terms, a.expectation);
        }
        if passed {
            let _ = writeln!(stderr, "all checks passed ({} generators)", jm.generators().len());
        }
        let report = json!({
            "seed": seed,
            "budget": budget,
            "generator_count": jm.generators().len(),
            "passed": passed,
            "counterexamples": requirements.violations().collect::<Vec<_>>(),
            "requirements": requirements,
            "positivity": audit,
        });
        Ok((passed, report, stderr))
    };
    match run() {
        Ok((passed, report, stderr)) => Outcome::report(if passed { 0 } else { 1 }, &report, stderr),
        Err(f) => Outcome::failure(f, false),
    }
}
