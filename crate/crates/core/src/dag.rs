//! Directed acyclic graphs and the node sets derived from them.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::space::NodeId;

pub type NodeSet = BTreeSet<NodeId>;

/// A directed graph over sorted node ids. Construction checks endpoints and
/// duplicate edges; acyclicity is checked by [`Dag::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    nodes: Vec<NodeId>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

/// Outcome of [`Dag::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validation {
    /// A topological order; ties are broken by node id.
    Acyclic(Vec<NodeId>),
    /// A closed walk `v0 -> v1 -> ... -> v0`.
    Cycle(Vec<NodeId>),
}

impl Dag {
    pub fn new<I, E>(nodes: I, edges: E) -> Result<Dag>
    where
        I: IntoIterator<Item = NodeId>,
        E: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut nodes: Vec<NodeId> = nodes.into_iter().collect();
        nodes.sort();
        for w in nodes.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateNode(w[0].clone()));
            }
        }
        let index = |n: &NodeId| nodes.binary_search(n).map_err(|_| Error::UnknownNode(n.clone()));
        let mut parents = vec![Vec::new(); nodes.len()];
        let mut children = vec![Vec::new(); nodes.len()];
        let mut seen = BTreeSet::new();
        for (from, to) in edges {
            let (p, c) = (index(&from)?, index(&to)?);
            if p == c {
                return Err(Error::SelfLoop(from));
            }
            if !seen.insert((p, c)) {
                return Err(Error::DuplicateEdge(from, to));
            }
            parents[c].push(p);
            children[p].push(c);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        Ok(Dag { nodes, parents, children })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> {
        self.children
            .iter()
            .enumerate()
            .flat_map(move |(p, cs)| cs.iter().map(move |&c| (&self.nodes[p], &self.nodes[c])))
    }

    fn index(&self, s: &NodeId) -> Result<usize> {
        self.nodes.binary_search(s).map_err(|_| Error::UnknownNode(s.clone()))
    }

    fn collect(&self, idx: impl IntoIterator<Item = usize>) -> NodeSet {
        idx.into_iter().map(|i| self.nodes[i].clone()).collect()
    }

    pub fn parents(&self, s: &NodeId) -> Result<NodeSet> {
        Ok(self.collect(self.parents[self.index(s)?].iter().copied()))
    }

    pub fn children(&self, s: &NodeId) -> Result<NodeSet> {
        Ok(self.collect(self.children[self.index(s)?].iter().copied()))
    }

    /// Nodes reachable from `s` by a nonempty directed path.
    pub fn descendants(&self, s: &NodeId) -> Result<NodeSet> {
        let start = self.index(s)?;
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = self.children[start].clone();
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                stack.extend(&self.children[v]);
            }
        }
        Ok(self.collect((0..self.nodes.len()).filter(|&i| seen[i])))
    }

    /// `G \ (P(s) ∪ {s} ∪ D(s))`.
    pub fn non_parent_non_descendants(&self, s: &NodeId) -> Result<NodeSet> {
        let parents = self.parents(s)?;
        let descendants = self.descendants(s)?;
        Ok(self.nodes.iter().filter(|&t| t != s && !parents.contains(t) && !descendants.contains(t)).cloned().collect())
    }

    pub fn roots(&self) -> NodeSet {
        self.collect((0..self.nodes.len()).filter(|&i| self.parents[i].is_empty()))
    }

    pub fn leaves(&self) -> NodeSet {
        self.collect((0..self.nodes.len()).filter(|&i| self.children[i].is_empty()))
    }

    pub fn validate(&self) -> Validation {
        // Kahn's algorithm with the smallest ready id first.
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..self.nodes.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(v) = ready.pop_first() {
            order.push(self.nodes[v].clone());
            for &c in &self.children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() == self.nodes.len() {
            Validation::Acyclic(order)
        } else {
            Validation::Cycle(self.find_cycle())
        }
    }

    /// Topological order, or the cycle as an error.
    pub fn topological_order(&self) -> Result<Vec<NodeId>> {
        match self.validate() {
            Validation::Acyclic(order) => Ok(order),
            Validation::Cycle(cycle) => Err(Error::Cycle(cycle)),
        }
    }

    fn find_cycle(&self) -> Vec<NodeId> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let mut mark = vec![Mark::New; self.nodes.len()];
        for root in 0..self.nodes.len() {
            if mark[root] != Mark::New {
                continue;
            }
            // explicit DFS stack of (node, next child position)
            let mut path: Vec<(usize, usize)> = vec![(root, 0)];
            mark[root] = Mark::Open;
            while let Some(&mut (v, ref mut next)) = path.last_mut() {
                if let Some(&c) = self.children[v].get(*next) {
                    *next += 1;
                    match mark[c] {
                        Mark::New => {
                            mark[c] = Mark::Open;
                            path.push((c, 0));
                        }
                        Mark::Open => {
                            let start = path.iter().position(|&(u, _)| u == c).expect("open node is on the path");
                            let mut cycle: Vec<NodeId> =
                                path[start..].iter().map(|&(u, _)| self.nodes[u].clone()).collect();
                            cycle.push(self.nodes[c].clone());
                            return cycle;
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[v] = Mark::Done;
                    path.pop();
                }
            }
        }
        unreachable!("find_cycle called on an acyclic graph")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(xs: &[&str]) -> Vec<NodeId> {
        xs.iter().map(|&s| s.into()).collect()
    }

    fn set(xs: &[&str]) -> NodeSet {
        ids(xs).into_iter().collect()
    }

    fn dag(nodes: &[&str], edges: &[(&str, &str)]) -> Dag {
        Dag::new(ids(nodes), edges.iter().map(|&(a, b)| (a.into(), b.into()))).unwrap()
    }

    #[test]
    fn chain_sets() {
        let g = dag(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        assert_eq!(g.descendants(&"a".into()).unwrap(), set(&["b", "c"]));
        assert_eq!(g.roots(), set(&["a"]));
        assert_eq!(g.leaves(), set(&["c"]));
        assert_eq!(g.non_parent_non_descendants(&"c".into()).unwrap(), set(&["a"]));
        assert_eq!(g.non_parent_non_descendants(&"a".into()).unwrap(), set(&[]));
        assert_eq!(g.validate(), Validation::Acyclic(ids(&["a", "b", "c"])));
    }

    #[test]
    fn single_node_is_root_and_leaf() {
        let g = dag(&["a"], &[]);
        assert!(g.parents(&"a".into()).unwrap().is_empty());
        assert!(g.descendants(&"a".into()).unwrap().is_empty());
        assert_eq!(g.roots(), set(&["a"]));
        assert_eq!(g.leaves(), set(&["a"]));
    }

    #[test]
    fn collider_sets() {
        let g = dag(&["a", "b", "c"], &[("a", "c"), ("b", "c")]);
        assert_eq!(g.children(&"a".into()).unwrap(), set(&["c"]));
        assert_eq!(g.parents(&"c".into()).unwrap(), set(&["a", "b"]));
        assert_eq!(g.non_parent_non_descendants(&"a".into()).unwrap(), set(&["b"]));
    }

    #[test]
    fn cycles_are_certified() {
        let g = dag(&["a", "b"], &[("a", "b"), ("b", "a")]);
        assert_eq!(g.validate(), Validation::Cycle(ids(&["a", "b", "a"])));
        assert!(matches!(g.topological_order(), Err(Error::Cycle(_))));
        let empty = dag(&[], &[]);
        assert_eq!(empty.validate(), Validation::Acyclic(vec![]));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(Dag::new(ids(&["a"]), [("a".into(), "z".into())]), Err(Error::UnknownNode(_))));
        assert!(matches!(Dag::new(ids(&["a"]), [("a".into(), "a".into())]), Err(Error::SelfLoop(_))));
        let dup = Dag::new(ids(&["a", "b"]), [("a".into(), "b".into()), ("a".into(), "b".into())]);
        assert!(matches!(dup, Err(Error::DuplicateEdge(..))));
        assert!(matches!(Dag::new(ids(&["a", "a"]), []), Err(Error::DuplicateNode(_))));
        assert!(matches!(dag(&["a"], &[]).parents(&"q".into()), Err(Error::UnknownNode(_))));
    }

    /// Random DAG: edges only go from lower to higher rank in a shuffled order.
    fn arb_dag() -> impl Strategy<Value = Dag> {
        (1usize..7)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                    proptest::collection::vec(any::<bool>(), n * n),
                )
            })
            .prop_map(|(n, rank, bits)| {
                let names: Vec<NodeId> = (0..n).map(|i| NodeId::new(format!("v{i}"))).collect();
                let mut edges = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if rank[i] < rank[j] && bits[i * n + j] {
                            edges.push((names[i].clone(), names[j].clone()));
                        }
                    }
                }
                Dag::new(names, edges).unwrap()
            })
    }

    proptest! {
        #[test]
        fn partition_and_closure(g in arb_dag()) {
            prop_assert!(matches!(g.validate(), Validation::Acyclic(_)));
            prop_assert!(!g.leaves().is_empty());
            let all: NodeSet = g.nodes().iter().cloned().collect();
            for s in g.nodes() {
                let p = g.parents(s).unwrap();
                let d = g.descendants(s).unwrap();
                let n = g.non_parent_non_descendants(s).unwrap();
                prop_assert!(p.is_disjoint(&d));
                prop_assert!(p.is_disjoint(&n) && d.is_disjoint(&n));
                prop_assert!(!p.contains(s) && !d.contains(s) && !n.contains(s));
                let mut union: NodeSet = p.union(&d).cloned().collect();
                union.extend(n.iter().cloned());
                union.insert(s.clone());
                prop_assert_eq!(&union, &all);
                for t in &d {
                    prop_assert!(g.descendants(t).unwrap().is_subset(&d));
                }
            }
        }

        #[test]
        fn back_edge_creates_cycle(g in arb_dag()) {
            let Validation::Acyclic(order) = g.validate() else { unreachable!() };
            // an edge from last to first closes a cycle whenever a path exists
            if order.len() >= 2 {
                let (first, last) = (order[0].clone(), order[order.len() - 1].clone());
                if g.descendants(&first).unwrap().contains(&last) {
                    let mut edges: Vec<(NodeId, NodeId)> = g.edges().map(|(a, b)| (a.clone(), b.clone())).collect();
                    edges.push((last, first));
                    let cyclic = Dag::new(g.nodes().to_vec(), edges).unwrap();
                    let Validation::Cycle(c) = cyclic.validate() else { panic!("expected a cycle") };
                    prop_assert_eq!(c.first(), c.last());
                }
            }
        }
    }
}
