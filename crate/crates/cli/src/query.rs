//! Query files and their evaluation against a joint model.

use std::collections::BTreeMap;

use credal_core::net::VerifyOptions;
use credal_core::{lp, sample, Configuration, Domain, Gamble, JointModel, NodeId, Rational};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::format::{configuration, Failure};

pub const DEFAULT_SAMPLES: usize = 10;

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

/// A gamble given as a table over `scope`, the first listed variable
/// varying slowest.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GambleSpec {
    pub scope: Vec<String>,
    pub values: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Query {
    /// Coherence of the joint model, or of one local model when `node` is set.
    Coherence {
        #[serde(default)]
        node: Option<String>,
        #[serde(default)]
        given: BTreeMap<String, String>,
    },
    Member {
        gamble: GambleSpec,
    },
    ConditionMember {
        given: BTreeMap<String, String>,
        gamble: GambleSpec,
    },
    MarginalMember {
        marginal: Vec<String>,
        #[serde(default)]
        given: BTreeMap<String, String>,
        gamble: GambleSpec,
    },
    LowerPrevision {
        #[serde(default)]
        given: BTreeMap<String, String>,
        gamble: GambleSpec,
    },
    /// Without `given`, every configuration of the parents and `irrelevant`
    /// is checked.
    IrrelevanceCheck {
        node: String,
        #[serde(default)]
        irrelevant: Vec<String>,
        #[serde(default)]
        given: Option<BTreeMap<String, String>>,
        #[serde(default)]
        gambles: Vec<Vec<Rational>>,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    VerifyAll {
        #[serde(default = "default_samples")]
        samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryFile {
    pub queries: Vec<Query>,
}

impl QueryFile {
    pub fn parse(text: &str) -> Result<QueryFile, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::Parse(e.to_string()))
    }
}

fn node_ids(ids: &[String]) -> Vec<NodeId> {
    ids.iter().map(|s| NodeId::from(s.as_str())).collect()
}

/// Reorders a listed-order table into the sorted scope order used
/// internally.
pub fn gamble(domain: &Domain, spec: &GambleSpec) -> Result<Gamble, Failure> {
    let ids = node_ids(&spec.scope);
    let scope = domain.scope(&ids)?;
    if scope.len() != ids.len() {
        return Err(Failure::input(format!("repeated variable in gamble scope {:?}", spec.scope)));
    }
    if spec.values.len() != scope.cardinality() {
        return Err(Failure::input(format!(
            "gamble on {scope} needs {} values, got {}",
            scope.cardinality(),
            spec.values.len()
        )));
    }
    let mut strides = vec![1; ids.len()];
    for k in (0..ids.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * domain.space(&ids[k + 1])?.len();
    }
    let table = scope
        .configs()
        .map(|c| {
            let at: usize = ids.iter().zip(&strides).map(|(n, s)| c.value_of(n).expect("listed node") * s).sum();
            spec.values[at].clone()
        })
        .collect();
    Ok(Gamble::new(scope, table)?)
}

pub fn evaluate(jm: &JointModel, query: &Query, seed: u64, index: usize) -> Result<Value, Failure> {
    let domain = jm.net().domain();
    let config = |labels: &BTreeMap<String, String>| configuration(domain, labels);
    Ok(match query {
        Query::Coherence { node: None, .. } => {
            let combination = lp::zero_combination(jm.generators())?;
            // weights are nonnegative; keep the support only
            let certificate =
                combination.map(|w| w.into_iter().enumerate().filter(|(_, v)| v.is_positive()).collect::<Vec<_>>());
            json!({ "kind": "coherence", "coherent": certificate.is_none(), "certificate": certificate })
        }
        Query::Coherence { node: Some(node), given } => {
            let given = config(given)?;
            let cone = jm.net().local(&NodeId::from(node.as_str()))?.cone(&given)?;
            let report = cone.is_coherent()?;
            json!({
                "kind": "coherence",
                "node": node,
                "given": domain.labels(&given),
                "coherent": report.coherent,
                "witness": report.witness,
                "certificate": report.certificate,
            })
        }
        Query::Member { gamble: g } => {
            json!({ "kind": "member", "member": jm.member(&gamble(domain, g)?)? })
        }
        Query::ConditionMember { given, gamble: g } => {
            json!({ "kind": "condition-member", "member": jm.condition_member(&config(given)?, &gamble(domain, g)?)? })
        }
        Query::MarginalMember { marginal, given, gamble: g } => {
            let scope = domain.scope(&node_ids(marginal))?;
            let member = jm.marginal_member(&scope, &config(given)?, &gamble(domain, g)?)?;
            json!({ "kind": "marginal-member", "member": member })
        }
        Query::LowerPrevision { given, gamble: g } => {
            let (given, f) = (config(given)?, gamble(domain, g)?);
            json!({
                "kind": "lower-prevision",
                "lower": jm.lower_prevision(&given, &f)?,
                "upper": jm.upper_prevision(&given, &f)?,
            })
        }
        Query::IrrelevanceCheck { node, irrelevant, given, gambles, samples } => {
            let s = NodeId::from(node.as_str());
            let net = jm.net();
            let own = net.own_scope(&s)?.clone();
            let irrelevant = domain.scope(&node_ids(irrelevant))?;
            let contexts: Vec<Configuration> = match given {
                Some(labels) => vec![config(labels)?],
                None => net.parent_scope(&s)?.union(&irrelevant).configs().collect(),
            };
            let mut rng = sample::substream(seed, index as u64);
            let mut fs = gambles.iter().map(|t| Gamble::new(own.clone(), t.clone())).collect::<Result<Vec<_>, _>>()?;
            fs.extend((0..*samples).map(|_| sample::gamble(&mut rng, &own)));
            let mut checked = 0;
            let mut violations = Vec::new();
            for context in &contexts {
                let cone = net.local(&s)?.cone(&context.restrict(net.parent_scope(&s)?)?)?;
                let mut local_fs = fs.clone();
                for g in cone.assessment() {
                    local_fs.push(g.clone());
                    local_fs.push(g.negate());
                }
                let report = jm.check_irrelevance(&s, &irrelevant, context, &local_fs)?;
                checked += report.checked;
                violations.extend(report.violations);
            }
            json!({
                "kind": "irrelevance-check",
                "result": if violations.is_empty() { "pass" } else { "fail" },
                "checked": checked,
                "violations": violations,
            })
        }
        Query::VerifyAll { samples } => {
            let report =
                jm.verify_requirements(&VerifyOptions { samples: *samples, seed, ..VerifyOptions::default() })?;
            json!({ "kind": "verify-all", "passed": report.passed, "report": report })
        }
    })
}
