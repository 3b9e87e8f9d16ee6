//! Finite variable spaces, scopes and configurations.
//!
//! Every enumeration in the crate walks configurations in lexicographic order:
//! nodes sorted by id, the first node most significant, and the values of a
//! node in the order they were declared.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque node label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> NodeId {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

/// The possibility space of one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableSpace {
    id: NodeId,
    values: Vec<String>,
}

impl VariableSpace {
    pub fn new<S: Into<String>>(id: impl Into<NodeId>, values: impl IntoIterator<Item = S>) -> Result<Self> {
        let id = id.into();
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if values.is_empty() {
            return Err(Error::EmptySpace(id));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::DuplicateValue { node: id, value: v.clone() });
            }
        }
        Ok(VariableSpace { id, values })
    }

    pub fn id(&self) -> &NodeId {
        &self.id
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.values
            .iter()
            .position(|v| v == label)
            .ok_or_else(|| Error::UnknownValue { node: self.id.clone(), value: label.to_string() })
    }
}

/// All variable spaces of a network, keyed by node id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Domain {
    spaces: BTreeMap<NodeId, VariableSpace>,
}

impl Domain {
    pub fn new(spaces: impl IntoIterator<Item = VariableSpace>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for space in spaces {
            let id = space.id.clone();
            if map.insert(id.clone(), space).is_some() {
                return Err(Error::DuplicateNode(id));
            }
        }
        Ok(Domain { spaces: map })
    }

    pub fn space(&self, id: &NodeId) -> Result<&VariableSpace> {
        self.spaces.get(id).ok_or_else(|| Error::UnknownNode(id.clone()))
    }

    pub fn spaces(&self) -> impl Iterator<Item = &VariableSpace> {
        self.spaces.values()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> {
        self.spaces.keys()
    }

    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    /// Canonical scope over the given nodes; repeated ids collapse.
    pub fn scope<'a, I>(&self, ids: I) -> Result<Scope>
    where
        I: IntoIterator<Item = &'a NodeId>,
    {
        let mut nodes: Vec<NodeId> = ids.into_iter().cloned().collect();
        nodes.sort();
        nodes.dedup();
        let sizes = nodes.iter().map(|n| self.space(n).map(VariableSpace::len)).collect::<Result<_>>()?;
        Ok(Scope { nodes, sizes })
    }

    /// The scope of every node in the domain.
    pub fn full_scope(&self) -> Scope {
        Scope {
            nodes: self.spaces.keys().cloned().collect(),
            sizes: self.spaces.values().map(VariableSpace::len).collect(),
        }
    }

    /// Builds a configuration from `(node, value label)` pairs.
    pub fn config<'a, I>(&self, pairs: I) -> Result<Configuration>
    where
        I: IntoIterator<Item = (&'a NodeId, &'a str)>,
    {
        let mut assigned: BTreeMap<NodeId, usize> = BTreeMap::new();
        for (node, label) in pairs {
            let idx = self.space(node)?.index_of(label)?;
            if assigned.insert(node.clone(), idx).is_some() {
                return Err(Error::DuplicateNode(node.clone()));
            }
        }
        let scope = self.scope(assigned.keys())?;
        Configuration::new(scope, assigned.into_values().collect())
    }

    /// `{a=a0, b=b1}` using value labels.
    pub fn describe(&self, config: &Configuration) -> String {
        let parts: Vec<String> = config
            .scope
            .nodes
            .iter()
            .zip(&config.values)
            .map(|(n, &v)| match self.spaces.get(n) {
                Some(space) => format!("{n}={}", space.values[v]),
                None => format!("{n}=#{v}"),
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    /// Value labels keyed by node, the form used in files and reports.
    pub fn labels(&self, config: &Configuration) -> BTreeMap<String, String> {
        config
            .scope
            .nodes
            .iter()
            .zip(&config.values)
            .map(|(n, &v)| {
                let label = self.spaces.get(n).map_or_else(|| format!("#{v}"), |s| s.values[v].clone());
                (n.to_string(), label)
            })
            .collect()
    }
}

/// A sorted set of nodes together with their domain sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Scope {
    nodes: Vec<NodeId>,
    sizes: Vec<usize>,
}

impl Scope {
    pub fn empty() -> Scope {
        Scope::default()
    }

    /// Builds a scope from `(node, domain size)` pairs without a [`Domain`].
    pub fn from_sizes<I, N>(pairs: I) -> Result<Scope>
    where
        I: IntoIterator<Item = (N, usize)>,
        N: Into<NodeId>,
    {
        let mut pairs: Vec<(NodeId, usize)> = pairs.into_iter().map(|(n, k)| (n.into(), k)).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateNode(w[0].0.clone()));
            }
        }
        if let Some((n, _)) = pairs.iter().find(|(_, k)| *k == 0) {
            return Err(Error::EmptySpace(n.clone()));
        }
        let (nodes, sizes) = pairs.into_iter().unzip();
        Ok(Scope { nodes, sizes })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of configurations; 1 for the empty scope.
    pub fn cardinality(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn position(&self, node: &NodeId) -> Option<usize> {
        self.nodes.binary_search(node).ok()
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.position(node).is_some()
    }

    pub fn is_subset(&self, other: &Scope) -> bool {
        self.nodes.iter().all(|n| other.contains(n))
    }

    pub fn is_disjoint(&self, other: &Scope) -> bool {
        self.nodes.iter().all(|n| !other.contains(n))
    }

    pub fn union(&self, other: &Scope) -> Scope {
        let mut pairs: BTreeMap<NodeId, usize> = self.pairs().collect();
        pairs.extend(other.pairs());
        let (nodes, sizes) = pairs.into_iter().unzip();
        Scope { nodes, sizes }
    }

    pub fn intersection(&self, other: &Scope) -> Scope {
        self.filter(|n| other.contains(n))
    }

    pub fn difference(&self, other: &Scope) -> Scope {
        self.filter(|n| !other.contains(n))
    }

    fn filter(&self, keep: impl Fn(&NodeId) -> bool) -> Scope {
        let (nodes, sizes) = self.pairs().filter(|(n, _)| keep(n)).unzip();
        Scope { nodes, sizes }
    }

    fn pairs(&self) -> impl Iterator<Item = (NodeId, usize)> + '_ {
        self.nodes.iter().cloned().zip(self.sizes.iter().copied())
    }

    /// Lexicographic rank weights: `index = Σ value_i * stride_i`.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.sizes.len()];
        for i in (0..self.sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.sizes[i + 1];
        }
        strides
    }

    pub fn config_at(&self, mut index: usize) -> Configuration {
        assert!(index < self.cardinality(), "configuration index out of range");
        let mut values = vec![0; self.sizes.len()];
        for (slot, &size) in values.iter_mut().zip(&self.sizes).rev() {
            *slot = index % size;
            index /= size;
        }
        Configuration { scope: self.clone(), values }
    }

    /// All configurations in lexicographic order.
    pub fn configs(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.cardinality()).map(move |i| self.config_at(i))
    }

    /// For each configuration of `self` (in order), the index of its
    /// restriction to `sub`. Requires `sub ⊆ self`.
    pub(crate) fn projection_map(&self, sub: &Scope) -> Vec<usize> {
        let sub_strides = sub.strides();
        let weights: Vec<usize> = self.nodes.iter().map(|n| sub.position(n).map_or(0, |p| sub_strides[p])).collect();
        let mut out = Vec::with_capacity(self.cardinality());
        let mut digits = vec![0usize; self.len()];
        let mut current = 0usize;
        for _ in 0..self.cardinality() {
            out.push(current);
            // odometer increment, last digit fastest
            for pos in (0..digits.len()).rev() {
                digits[pos] += 1;
                current += weights[pos];
                if digits[pos] < self.sizes[pos] {
                    break;
                }
                current -= weights[pos] * digits[pos];
                digits[pos] = 0;
            }
        }
        out
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.nodes.iter().map(NodeId::as_str).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

/// One value index per node of a scope.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    scope: Scope,
    values: Vec<usize>,
}

impl Configuration {
    pub fn new(scope: Scope, values: Vec<usize>) -> Result<Self> {
        if values.len() != scope.len() {
            return Err(Error::TableLength { expected: scope.len(), actual: values.len() });
        }
        for ((node, &size), &v) in scope.nodes.iter().zip(&scope.sizes).zip(&values) {
            if v >= size {
                return Err(Error::ValueOutOfRange { node: node.clone(), index: v });
            }
        }
        Ok(Configuration { scope, values })
    }

    /// The unique configuration of the empty scope.
    pub fn empty() -> Configuration {
        Configuration { scope: Scope::empty(), values: Vec::new() }
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value_of(&self, node: &NodeId) -> Option<usize> {
        self.scope.position(node).map(|p| self.values[p])
    }

    /// Lexicographic rank within its scope.
    pub fn index(&self) -> usize {
        self.scope.strides().iter().zip(&self.values).map(|(s, v)| s * v).sum()
    }

    pub fn restrict(&self, sub: &Scope) -> Result<Configuration> {
        if !sub.is_subset(&self.scope) {
            return Err(Error::ScopeNotContained { inner: sub.to_string(), outer: self.scope.to_string() });
        }
        let values = sub.nodes.iter().map(|n| self.value_of(n).expect("subset")).collect();
        Ok(Configuration { scope: sub.clone(), values })
    }

    /// Joins two configurations on disjoint scopes.
    pub fn merge(&self, other: &Configuration) -> Result<Configuration> {
        if !self.scope.is_disjoint(&other.scope) {
            return Err(Error::ScopeOverlap { left: self.scope.to_string(), right: other.scope.to_string() });
        }
        let scope = self.scope.union(&other.scope);
        let values =
            scope.nodes.iter().map(|n| self.value_of(n).or_else(|| other.value_of(n)).expect("union")).collect();
        Ok(Configuration { scope, values })
    }

    /// True when both agree on every shared node.
    pub fn agrees_with(&self, other: &Configuration) -> bool {
        self.scope.nodes.iter().zip(&self.values).all(|(n, v)| other.value_of(n).is_none_or(|w| w == *v))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.scope.nodes.iter().zip(&self.values).map(|(n, v)| format!("{n}=#{v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
