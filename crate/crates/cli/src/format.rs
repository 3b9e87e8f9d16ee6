//! JSON file formats. Rationals are strings (`"3"`, `"-1/4"`).

use std::collections::BTreeMap;

use credal_core::{
    AssessmentCone, Configuration, CredalNet, Dag, Domain, Error, Gamble, JointModel, LocalAssessment, NodeId,
    Rational, VariableSpace,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Why a command could not produce its normal report.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{message}")]
    Input { message: String, certificate: Option<Value> },
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Failure {
        Failure::Input { message: message.into(), certificate: None }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Parse(_) => 3,
            Failure::Input { .. } => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::input(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableEntry {
    pub id: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalEntry {
    pub node: String,
    #[serde(default)]
    pub given: BTreeMap<String, String>,
    #[serde(default)]
    pub gambles: Vec<Vec<Rational>>,
}

/// Negates, in the joint model only, the joint generators built from the
/// `index`-th gamble of the local model for `node` given `given`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mutation {
    pub node: String,
    #[serde(default)]
    pub given: BTreeMap<String, String>,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub variables: Vec<VariableEntry>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub local_models: Vec<LocalEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mutations: Vec<Mutation>,
}

/// Builds a configuration from `node: value` labels.
pub fn configuration(domain: &Domain, labels: &BTreeMap<String, String>) -> Result<Configuration, Failure> {
    let pairs: Vec<(NodeId, &str)> = labels.iter().map(|(n, v)| (NodeId::from(n.as_str()), v.as_str())).collect();
    Ok(domain.config(pairs.iter().map(|(n, v)| (n, *v)))?)
}

impl NetworkFile {
    pub fn parse(text: &str) -> Result<NetworkFile, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn from_net(net: &CredalNet) -> NetworkFile {
        let domain = net.domain();
        let variables =
            domain.spaces().map(|s| VariableEntry { id: s.id().to_string(), values: s.values().to_vec() }).collect();
        let edges = net.dag().edges().map(|(p, c)| (p.to_string(), c.to_string())).collect();
        let mut local_models = Vec::new();
        for local in net.locals() {
            for (x, cone) in local.cones().iter().enumerate() {
                local_models.push(LocalEntry {
                    node: local.node().to_string(),
                    given: domain.labels(&local.parents().config_at(x)),
                    gambles: cone.assessment().iter().map(|g| g.table().to_vec()).collect(),
                });
            }
        }
        NetworkFile { variables, edges, local_models, mutations: Vec::new() }
    }

    pub fn domain(&self) -> Result<Domain, Failure> {
        let spaces = self
            .variables
            .iter()
            .map(|v| VariableSpace::new(v.id.as_str(), v.values.iter().cloned()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Domain::new(spaces)?)
    }

    /// Validates the graph and local models. Semantic failures carry a
    /// certificate where one exists: the cycle, the missing configuration,
    /// or a vanishing combination for an incoherent local model.
    pub fn build(&self) -> Result<CredalNet, Failure> {
        let domain = self.domain()?;
        let nodes = self.variables.iter().map(|v| NodeId::from(v.id.as_str()));
        let edges = self.edges.iter().map(|(p, c)| (NodeId::from(p.as_str()), NodeId::from(c.as_str())));
        let dag = Dag::new(nodes, edges)?;
        let mut assessments = Vec::with_capacity(self.local_models.len());
        for entry in &self.local_models {
            let node = NodeId::from(entry.node.as_str());
            let own = domain.scope([&node])?;
            let given = configuration(&domain, &entry.given)?;
            let gambles = entry
                .gambles
                .iter()
                .map(|g| Gamble::new(own.clone(), g.clone()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| {
                    Failure::input(format!("local model for {node} given {}: {e}", domain.describe(&given)))
                })?;
            assessments.push(LocalAssessment { node, given, gambles });
        }
        let local_cones: Vec<(NodeId, String, Vec<Gamble>)> =
            assessments.iter().map(|a| (a.node.clone(), domain.describe(&a.given), a.gambles.clone())).collect();
        CredalNet::from_assessments(domain, dag, assessments).map_err(|e| {
            let certificate = match &e {
                Error::Cycle(path) => Some(json!({ "cycle": path })),
                Error::MissingLocalModel { node, given } => {
                    Some(json!({ "missing": { "node": node, "given": given } }))
                }
                Error::IncoherentLocalModel { node, given } => {
                    local_cones.iter().find(|(n, g, _)| n == node && g == given).and_then(|(_, _, gambles)| {
                        let scope = gambles.first()?.scope().clone();
                        let report = AssessmentCone::new(scope, gambles.clone()).ok()?.is_coherent().ok()?;
                        Some(json!({ "node": node, "given": given, "vanishing_combination": report.certificate }))
                    })
                }
                _ => None,
            };
            Failure::Input { message: e.to_string(), certificate }
        })
    }

    /// Applies the file's mutations to a joint model built from it.
    pub fn apply_mutations(&self, jm: &mut JointModel) -> Result<(), Failure> {
        for m in &self.mutations {
            let given = configuration(jm.net().domain(), &m.given)?;
            jm.flip_local_generator(&NodeId::from(m.node.as_str()), &given, m.index)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = r#"{
        "variables": [{"id": "a", "values": ["a0", "a1"]}, {"id": "b", "values": ["b0", "b1"]}],
        "edges": [["a", "b"]],
        "local_models": [
            {"node": "a", "gambles": []},
            {"node": "b", "given": {"a": "a0"}, "gambles": [["1", "-1/2"]]},
            {"node": "b", "given": {"a": "a1"}, "gambles": []}
        ]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let file = NetworkFile::parse(CHAIN).unwrap();
        let net = file.build().unwrap();
        let again = NetworkFile::parse(&NetworkFile::from_net(&net).to_json()).unwrap().build().unwrap();
        assert_eq!(net, again);
    }

    #[test]
    fn classifies_failures() {
        assert_eq!(NetworkFile::parse("{").unwrap_err().exit_code(), 3);
        assert_eq!(NetworkFile::parse(&CHAIN.replace("\"-1/2\"", "-0.5")).unwrap_err().exit_code(), 3);
        assert_eq!(NetworkFile::parse(&CHAIN.replace("\"-1/2\"", "\"-1/0\"")).unwrap_err().exit_code(), 3);
        let short = NetworkFile::parse(&CHAIN.replace("[\"1\", \"-1/2\"]", "[\"1\"]")).unwrap();
        assert_eq!(short.build().unwrap_err().exit_code(), 2);
        let unknown = NetworkFile::parse(&CHAIN.replace("{\"a\": \"a1\"}", "{\"a\": \"a7\"}")).unwrap();
        assert_eq!(unknown.build().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn incoherent_local_model_has_certificate() {
        let text = CHAIN.replace("[\"1\", \"-1/2\"]", "[\"-1\", \"-1\"]");
        let Failure::Input { certificate, .. } = NetworkFile::parse(&text).unwrap().build().unwrap_err() else {
            panic!("expected an input failure");
        };
        let certificate = certificate.expect("certificate");
        assert_eq!(certificate["node"], "b");
        assert_eq!(certificate["given"], "{a=a0}");
        assert!(certificate["vanishing_combination"]["assessment_weights"].is_array());
    }

    #[test]
    fn cycle_is_listed() {
        let text = CHAIN.replace("[[\"a\", \"b\"]]", "[[\"a\", \"b\"], [\"b\", \"a\"]]");
        let Failure::Input { certificate, .. } = NetworkFile::parse(&text).unwrap().build().unwrap_err() else {
            panic!("expected an input failure");
        };
        assert_eq!(certificate.unwrap()["cycle"], json!(["a", "b", "a"]));
    }
}
