//! Credal networks under epistemic irrelevance.
//!
//! Each node `s` carries, for every configuration of its parents, a coherent
//! local cone on `X_s`. The joint model is the positive hull of the products
//! `I_{x_{P(s) ∪ N(s)}} · f` over every node, every parent configuration,
//! every configuration of the non-parent non-descendants `N(s)`, and every
//! local generator `f` (assessment gambles and singleton indicators of
//! `X_s`). Queries on the joint are conic membership programs over that
//! generator list.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::cone::{AssessmentCone, CoherenceReport};
use crate::dag::Dag;
use crate::error::{Error, Result};
use crate::gamble::Gamble;
use crate::lp::{self, Supremum};
use crate::rational::Rational;
use crate::sample;
use crate::space::{Configuration, Domain, NodeId, Scope};

pub const DEFAULT_GENERATOR_CAP: usize = 100_000;

/// Subsets of `N(s)` are enumerated exhaustively up to this size.
pub const EXHAUSTIVE_SUBSET_LIMIT: usize = 3;

/// Number of subsets of `N(s)` checked when `N(s)` is larger.
pub const SAMPLED_SUBSETS: usize = 8;

/// The local cones of one node, indexed by parent configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalModel {
    node: NodeId,
    parents: Scope,
    cones: Vec<AssessmentCone>,
}

impl LocalModel {
    pub fn node(&self) -> &NodeId {
        &self.node
    }

    pub fn parents(&self) -> &Scope {
        &self.parents
    }

    pub fn cones(&self) -> &[AssessmentCone] {
        &self.cones
    }

    pub fn cone(&self, given: &Configuration) -> Result<&AssessmentCone> {
        if given.scope() != &self.parents {
            return Err(Error::SpaceMismatch { expected: self.parents.to_string(), actual: given.scope().to_string() });
        }
        Ok(&self.cones[given.index()])
    }
}

/// One local assessment as supplied by a caller: the node, the parent
/// configuration it is conditional on, and its gambles on `X_s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalAssessment {
    pub node: NodeId,
    pub given: Configuration,
    pub gambles: Vec<Gamble>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct NodeStructure {
    own: Scope,
    parents: Scope,
    npnd: Scope,
}

/// A validated network: acyclic graph, variable spaces, and coherent local
/// models for every node and parent configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CredalNet {
    domain: Domain,
    dag: Dag,
    locals: Vec<LocalModel>,
    structure: Vec<NodeStructure>,
}

impl CredalNet {
    pub fn from_assessments(domain: Domain, dag: Dag, assessments: Vec<LocalAssessment>) -> Result<CredalNet> {
        for n in dag.nodes() {
            domain.space(n)?;
        }
        if let Some(extra) = domain.node_ids().find(|n| dag.nodes().binary_search(n).is_err()) {
            return Err(Error::UnknownNode(extra.clone()));
        }
        dag.topological_order()?;

        let mut structure = Vec::with_capacity(dag.nodes().len());
        let mut slots: Vec<Vec<Option<Vec<Gamble>>>> = Vec::new();
        for s in dag.nodes() {
            let own = domain.scope([s])?;
            let parents = domain.scope(&dag.parents(s)?)?;
            let npnd = domain.scope(&dag.non_parent_non_descendants(s)?)?;
            slots.push(vec![None; parents.cardinality()]);
            structure.push(NodeStructure { own, parents, npnd });
        }

        for a in assessments {
            let i = dag.nodes().binary_search(&a.node).map_err(|_| Error::UnknownNode(a.node.clone()))?;
            let st = &structure[i];
            if a.given.scope() != &st.parents {
                return Err(Error::SpaceMismatch {
                    expected: st.parents.to_string(),
                    actual: a.given.scope().to_string(),
                });
            }
            let slot = &mut slots[i][a.given.index()];
            if slot.is_some() {
                return Err(Error::DuplicateLocalModel { node: a.node, given: domain.describe(&a.given) });
            }
            *slot = Some(a.gambles);
        }

        let mut locals = Vec::with_capacity(structure.len());
        for ((s, st), node_slots) in dag.nodes().iter().zip(&structure).zip(slots) {
            let mut cones = Vec::with_capacity(node_slots.len());
            for (x, gambles) in node_slots.into_iter().enumerate() {
                let given = st.parents.config_at(x);
                let describe = || domain.describe(&given);
                let gambles = gambles.ok_or_else(|| Error::MissingLocalModel { node: s.clone(), given: describe() })?;
                if gambles.iter().any(Gamble::is_zero) {
                    return Err(Error::ZeroAssessment { node: s.clone(), given: describe() });
                }
                let cone = AssessmentCone::new(st.own.clone(), gambles)?;
                if !cone.is_coherent()?.coherent {
                    return Err(Error::IncoherentLocalModel { node: s.clone(), given: describe() });
                }
                cones.push(cone);
            }
            locals.push(LocalModel { node: s.clone(), parents: st.parents.clone(), cones });
        }
        Ok(CredalNet { domain, dag, locals, structure })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn locals(&self) -> &[LocalModel] {
        &self.locals
    }

    fn position(&self, s: &NodeId) -> Result<usize> {
        self.dag.nodes().binary_search(s).map_err(|_| Error::UnknownNode(s.clone()))
    }

    pub fn local(&self, s: &NodeId) -> Result<&LocalModel> {
        Ok(&self.locals[self.position(s)?])
    }

    pub fn parent_scope(&self, s: &NodeId) -> Result<&Scope> {
        Ok(&self.structure[self.position(s)?].parents)
    }

    pub fn npnd_scope(&self, s: &NodeId) -> Result<&Scope> {
        Ok(&self.structure[self.position(s)?].npnd)
    }

    pub fn own_scope(&self, s: &NodeId) -> Result<&Scope> {
        Ok(&self.structure[self.position(s)?].own)
    }

    /// The local coherence report (with its witness mass function) for every
    /// node and parent configuration, in node then configuration order.
    pub fn local_witnesses(&self) -> Result<Vec<Vec<CoherenceReport>>> {
        self.locals.iter().map(|l| l.cones.iter().map(AssessmentCone::is_coherent).collect()).collect()
    }

    /// `Σ_s Σ_{x_P} |X_{N(s)}| · (|A_{s|x_P}| + |X_s|)`.
    pub fn generator_count(&self) -> u128 {
        self.locals
            .iter()
            .zip(&self.structure)
            .map(|(l, st)| {
                let per_context = st.npnd.cardinality() as u128;
                l.cones.iter().map(|c| per_context * (c.assessment().len() + c.size()) as u128).sum::<u128>()
            })
            .sum()
    }
}

/// Which local generator a joint generator was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "index")]
pub enum LocalGenerator {
    Assessment(usize),
    Indicator(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorOrigin {
    pub node: NodeId,
    pub parents: Configuration,
    pub npnd: Configuration,
    pub local: LocalGenerator,
    /// The gamble on `X_s` multiplied by the context indicator.
    pub factor: Gamble,
}

/// The joint model: a materialised generator list over `X_G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointModel {
    net: CredalNet,
    full: Scope,
    generators: Vec<Gamble>,
    origins: Vec<GeneratorOrigin>,
}

impl JointModel {
    pub fn build(net: CredalNet, cap: usize) -> Result<JointModel> {
        let count = net.generator_count();
        if count > cap as u128 {
            return Err(Error::CapExceeded { count, cap });
        }
        let full = net.domain.full_scope();
        let mut generators = Vec::with_capacity(count as usize);
        let mut origins = Vec::with_capacity(count as usize);
        for (s, (local, st)) in net.dag.nodes().iter().zip(net.locals.iter().zip(&net.structure)) {
            let context = st.parents.union(&st.npnd);
            let context_of = full.projection_map(&context);
            let value_of = full.projection_map(&st.own);
            for (x, cone) in local.cones.iter().enumerate() {
                let parents = st.parents.config_at(x);
                let factors = cone
                    .assessment()
                    .iter()
                    .cloned()
                    .enumerate()
                    .map(|(i, g)| (LocalGenerator::Assessment(i), g))
                    .chain(st.own.configs().enumerate().map(|(i, c)| {
                        (LocalGenerator::Indicator(i), Gamble::indicator(&c, &st.own).expect("own scope"))
                    }))
                    .collect::<Vec<_>>();
                for npnd in st.npnd.configs() {
                    let hit = parents.merge(&npnd)?.index();
                    for (kind, factor) in &factors {
                        let table = context_of
                            .iter()
                            .zip(&value_of)
                            .map(|(&c, &v)| if c == hit { factor.table()[v].clone() } else { Rational::zero() })
                            .collect();
                        generators.push(Gamble::new(full.clone(), table)?);
                        origins.push(GeneratorOrigin {
                            node: s.clone(),
                            parents: parents.clone(),
                            npnd: npnd.clone(),
                            local: *kind,
                            factor: factor.clone(),
                        });
                    }
                }
            }
        }
        Ok(JointModel { net, full, generators, origins })
    }

    pub fn net(&self) -> &CredalNet {
        &self.net
    }

    pub fn full_scope(&self) -> &Scope {
        &self.full
    }

    pub fn generators(&self) -> &[Gamble] {
        &self.generators
    }

    pub fn origins(&self) -> &[GeneratorOrigin] {
        &self.origins
    }

    /// Negates the joint generators built from one local assessment gamble,
    /// leaving the local models untouched. Exists to exercise the verifier.
    pub fn flip_local_generator(&mut self, node: &NodeId, parents: &Configuration, index: usize) -> Result<usize> {
        let mut flipped = 0;
        for (g, o) in self.generators.iter_mut().zip(self.origins.iter_mut()) {
            if &o.node == node && &o.parents == parents && o.local == LocalGenerator::Assessment(index) {
                *g = g.negate();
                o.factor = o.factor.negate();
                flipped += 1;
            }
        }
        if flipped == 0 {
            return Err(Error::GeneratorIndex(index));
        }
        Ok(flipped)
    }

    fn lift(&self, f: &Gamble) -> Result<Gamble> {
        f.extend(&self.full)
    }

    /// Nonnegative weights on the generators reproducing `f`, if `f ∈ D_G`.
    pub fn decompose(&self, f: &Gamble) -> Result<Option<Vec<Rational>>> {
        let f = self.lift(f)?;
        if f.is_zero() {
            return Err(Error::ZeroGamble);
        }
        Ok(lp::conic_membership(f.table(), &self.generators)?.coefficients)
    }

    /// `f ∈ posi(generators)`, with `f` cylindrically extended to `X_G`.
    pub fn member(&self, f: &Gamble) -> Result<bool> {
        let f = self.lift(f)?;
        if f.is_zero() {
            return Err(Error::ZeroGamble);
        }
        Ok(lp::conic_membership(f.table(), &self.generators)?.member)
    }

    /// Membership of `f` in the model conditioned on `given`:
    /// `I_{given} · f ∈ D_G`.
    pub fn condition_member(&self, given: &Configuration, f: &Gamble) -> Result<bool> {
        if !given.scope().is_disjoint(f.scope()) {
            return Err(Error::ScopeOverlap { left: given.scope().to_string(), right: f.scope().to_string() });
        }
        if f.is_zero() {
            return Err(Error::ZeroGamble);
        }
        let indicator = Gamble::indicator(given, &self.full)?;
        self.member(&indicator.mul(&self.lift(f)?))
    }

    /// Membership of `f ∈ G(X_O)` in the conditional marginal on `O` given
    /// `given`.
    pub fn marginal_member(&self, marginal: &Scope, given: &Configuration, f: &Gamble) -> Result<bool> {
        if !marginal.is_disjoint(given.scope()) {
            return Err(Error::ScopeOverlap { left: marginal.to_string(), right: given.scope().to_string() });
        }
        if !f.scope().is_subset(marginal) {
            return Err(Error::ScopeNotContained { inner: f.scope().to_string(), outer: marginal.to_string() });
        }
        self.condition_member(given, f)
    }

    /// `sup { μ : I_{given} · (f - μ) ∈ D_G }`; `given` may be empty.
    pub fn lower_prevision(&self, given: &Configuration, f: &Gamble) -> Result<Rational> {
        if !given.scope().is_disjoint(f.scope()) {
            return Err(Error::ScopeOverlap { left: given.scope().to_string(), right: f.scope().to_string() });
        }
        let indicator = Gamble::indicator(given, &self.full)?;
        let target = indicator.mul(&self.lift(f)?);
        match lp::max_shift(target.table(), indicator.table(), &self.generators)? {
            Supremum::Finite(v) => Ok(v),
            _ => Err(Error::IncoherentModel),
        }
    }

    pub fn upper_prevision(&self, given: &Configuration, f: &Gamble) -> Result<Rational> {
        Ok(-self.lower_prevision(given, &f.negate())?)
    }

    /// For every gamble `f` on `X_s`, compares `I_{x_{P(s) ∪ I}} · f ∈ D_G`
    /// with membership in the local cone for `x_{P(s)}`.
    pub fn check_irrelevance(
        &self,
        s: &NodeId,
        irrelevant: &Scope,
        given: &Configuration,
        gambles: &[Gamble],
    ) -> Result<IrrelevanceReport> {
        let npnd = self.net.npnd_scope(s)?;
        if !irrelevant.is_subset(npnd) {
            let nodes = irrelevant.nodes().iter().filter(|n| !npnd.contains(n)).cloned().collect();
            return Err(Error::NotIrrelevant { node: s.clone(), nodes });
        }
        let parents = self.net.parent_scope(s)?;
        let context = parents.union(irrelevant);
        if given.scope() != &context {
            return Err(Error::SpaceMismatch { expected: context.to_string(), actual: given.scope().to_string() });
        }
        let own = self.net.own_scope(s)?;
        let cone = self.net.local(s)?.cone(&given.restrict(parents)?)?;
        let requirement = if irrelevant.is_empty() { Requirement::G1 } else { Requirement::G2 };
        let mut report = IrrelevanceReport { checked: 0, violations: Vec::new() };
        for f in gambles {
            if f.scope() != own {
                return Err(Error::SpaceMismatch { expected: own.to_string(), actual: f.scope().to_string() });
            }
            if f.is_zero() {
                continue;
            }
            let joint = self.marginal_member(own, given, f)?;
            let local = cone.member(f)?;
            report.checked += 1;
            if joint != local {
                report.violations.push(Violation {
                    requirement,
                    node: s.clone(),
                    given: self.net.domain.labels(given),
                    irrelevant: irrelevant.nodes().to_vec(),
                    gamble: f.table().to_vec(),
                    joint,
                    local,
                });
            }
        }
        Ok(report)
    }

    /// Sweeps G1 and G2 through [`JointModel::check_irrelevance`], checks
    /// coherence of the joint, and certifies that every generator is the
    /// product of a context indicator with a locally desirable gamble.
    pub fn verify_requirements(&self, options: &VerifyOptions) -> Result<RequirementsReport> {
        let domain = &self.net.domain;
        let mut g1 = SweepSummary::default();
        let mut g2 = SweepSummary::default();
        let mut task = 0u64;
        for (s, local) in self.net.dag.nodes().iter().zip(&self.net.locals) {
            let own = self.net.own_scope(s)?;
            let npnd = self.net.npnd_scope(s)?;
            let mut subset_rng = sample::substream(options.seed, u64::MAX - task);
            let subsets = irrelevant_subsets(npnd, &mut subset_rng);
            for (x, cone) in local.cones.iter().enumerate() {
                let parents = local.parents.config_at(x);
                for subset in &subsets {
                    for xi in subset.configs() {
                        let given = parents.merge(&xi)?;
                        let mut rng = sample::substream(options.seed, task);
                        task += 1;
                        let mut gambles: Vec<Gamble> = Vec::new();
                        for g in cone.assessment() {
                            gambles.push(g.clone());
                            gambles.push(g.negate());
                        }
                        gambles.extend((0..options.samples).map(|_| sample::gamble(&mut rng, own)));
                        let report = self.check_irrelevance(s, subset, &given, &gambles)?;
                        let summary = if subset.is_empty() { &mut g1 } else { &mut g2 };
                        summary.checked += report.checked;
                        summary.violations.extend(report.violations);
                    }
                }
            }
        }

        let coherence = self.check_coherence(options)?;

        let mut smallest = StructuralCertificate {
            generators: self.generators.len(),
            per_node: BTreeMap::new(),
            violations: Vec::new(),
        };
        for (i, o) in self.origins.iter().enumerate() {
            *smallest.per_node.entry(o.node.clone()).or_insert(0) += 1;
            let cone = self.net.local(&o.node)?.cone(&o.parents)?;
            let context = o.parents.merge(&o.npnd)?;
            let rebuilt = Gamble::indicator(&context, &self.full)?.mul(&o.factor.extend(&self.full)?);
            let factor_desirable = cone.member(&o.factor)?;
            if !factor_desirable || rebuilt != self.generators[i] {
                smallest.violations.push(GeneratorViolation {
                    index: i,
                    node: o.node.clone(),
                    given: domain.labels(&o.parents),
                    context: domain.labels(&o.npnd),
                    factor: o.factor.table().to_vec(),
                    factor_desirable,
                });
            }
        }

        let passed = g1.violations.is_empty()
            && g2.violations.is_empty()
            && coherence.passed()
            && smallest.violations.is_empty();
        Ok(RequirementsReport {
            seed: options.seed,
            samples: options.samples,
            generator_count: self.generators.len(),
            local_extension: g1,
            irrelevance: g2,
            coherence,
            smallest,
            passed,
        })
    }

    fn check_coherence(&self, options: &VerifyOptions) -> Result<CoherenceCheck> {
        let zero_combination = lp::zero_combination(&self.generators)?
            .map(|w| w.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect::<Vec<_>>());
        let mut check = CoherenceCheck { zero_combination, ..CoherenceCheck::default() };
        let mut rng = sample::substream(options.seed, u64::MAX / 2);
        for c in self.full.configs() {
            let indicator = Gamble::indicator(&c, &self.full)?;
            check.positive_checked += 1;
            if !self.member(&indicator)? {
                check.positive_rejected.push(indicator.table().to_vec());
            }
            check.nonpositive_checked += 1;
            let neg = indicator.negate();
            if self.member(&neg)? {
                check.nonpositive_accepted.push(neg.table().to_vec());
            }
        }
        for _ in 0..options.sign_samples {
            let pos = sample::positive(&mut rng, &self.full);
            check.positive_checked += 1;
            if !self.member(&pos)? {
                check.positive_rejected.push(pos.table().to_vec());
            }
            let neg = sample::nonpositive(&mut rng, &self.full);
            check.nonpositive_checked += 1;
            if self.member(&neg)? {
                check.nonpositive_accepted.push(neg.table().to_vec());
            }
        }
        Ok(check)
    }
}

/// Subsets of `N(s)` to test: all of them when `|N(s)|` is small, otherwise
/// the empty set, `N(s)` itself and random subsets up to the sample budget.
fn irrelevant_subsets<R: Rng + ?Sized>(npnd: &Scope, rng: &mut R) -> Vec<Scope> {
    let nodes = npnd.nodes();
    let pick = |mask: u64| {
        let chosen = nodes.iter().zip(npnd.sizes()).enumerate().filter(|(i, _)| mask >> i & 1 == 1);
        Scope::from_sizes(chosen.map(|(_, (n, &k))| (n.clone(), k))).expect("subset of a valid scope")
    };
    if nodes.len() <= EXHAUSTIVE_SUBSET_LIMIT {
        return (0..1u64 << nodes.len()).map(pick).collect();
    }
    let full_mask = if nodes.len() >= 64 { u64::MAX } else { (1u64 << nodes.len()) - 1 };
    let mut masks = vec![0, full_mask];
    let mut attempts = 0;
    while masks.len() < SAMPLED_SUBSETS && attempts < 1000 {
        attempts += 1;
        let m = rng.gen::<u64>() & full_mask;
        if !masks.contains(&m) {
            masks.push(m);
        }
    }
    masks.sort_unstable();
    masks.into_iter().map(pick).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Random gambles per `(s, x_{P(s) ∪ I})` in the G1/G2 sweep.
    pub samples: usize,
    /// Random positive and nonpositive gambles in the coherence check.
    pub sign_samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 10, sign_samples: 20, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Requirement {
    G1,
    G2,
}

/// A gamble on which the joint and the local model disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub requirement: Requirement,
    pub node: NodeId,
    /// The conditioning configuration `x_{P(s) ∪ I}`.
    pub given: BTreeMap<String, String>,
    pub irrelevant: Vec<NodeId>,
    pub gamble: Vec<Rational>,
    pub joint: bool,
    pub local: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IrrelevanceReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl IrrelevanceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CoherenceCheck {
    /// Sparse `(generator index, weight)` pairs of a vanishing combination.
    pub zero_combination: Option<Vec<(usize, Rational)>>,
    pub positive_checked: usize,
    pub positive_rejected: Vec<Vec<Rational>>,
    pub nonpositive_checked: usize,
    pub nonpositive_accepted: Vec<Vec<Rational>>,
}

impl CoherenceCheck {
    pub fn passed(&self) -> bool {
        self.zero_combination.is_none() && self.positive_rejected.is_empty() && self.nonpositive_accepted.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorViolation {
    pub index: usize,
    pub node: NodeId,
    pub given: BTreeMap<String, String>,
    pub context: BTreeMap<String, String>,
    pub factor: Vec<Rational>,
    pub factor_desirable: bool,
}

/// Every generator is `I_{x_{P(s) ∪ N(s)}} · f` with `f` locally
/// desirable, so it belongs to any joint satisfying G1 and G2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralCertificate {
    pub generators: usize,
    pub per_node: BTreeMap<NodeId, usize>,
    pub violations: Vec<GeneratorViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RequirementsReport {
    pub seed: u64,
    pub samples: usize,
    pub generator_count: usize,
    pub local_extension: SweepSummary,
    pub irrelevance: SweepSummary,
    pub coherence: CoherenceCheck,
    pub smallest: StructuralCertificate,
    pub passed: bool,
}

impl RequirementsReport {
    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.local_extension.violations.iter().chain(&self.irrelevance.violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::sample::NetworkShape;
    use crate::space::VariableSpace;
    use proptest::prelude::*;
    use rand::Rng;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| Rational::from(x)).collect()
    }

    fn id(s: &str) -> NodeId {
        NodeId::from(s)
    }

    fn binary_domain(names: &[&str]) -> Domain {
        Domain::new(names.iter().map(|n| VariableSpace::new(*n, [format!("{n}0"), format!("{n}1")]).unwrap())).unwrap()
    }

    fn config(domain: &Domain, pairs: &[(&str, &str)]) -> Configuration {
        let pairs: Vec<(NodeId, &str)> = pairs.iter().map(|(n, l)| (id(n), *l)).collect();
        domain.config(pairs.iter().map(|(n, l)| (n, *l))).unwrap()
    }

    fn gamble(domain: &Domain, node: &str, xs: &[i64]) -> Gamble {
        Gamble::new(domain.scope([&id(node)]).unwrap(), v(xs)).unwrap()
    }

    fn assess(node: &str, given: Configuration, gambles: Vec<Gamble>) -> LocalAssessment {
        LocalAssessment { node: id(node), given, gambles }
    }

    /// a → b with `b | a0` assessed by (1,-1) and everything else vacuous.
    fn chain() -> CredalNet {
        let d = binary_domain(&["a", "b"]);
        let dag = Dag::new([id("a"), id("b")], [(id("a"), id("b"))]).unwrap();
        let locals = vec![
            assess("a", Configuration::empty(), vec![]),
            assess("b", config(&d, &[("a", "a0")]), vec![gamble(&d, "b", &[1, -1])]),
            assess("b", config(&d, &[("a", "a1")]), vec![]),
        ];
        CredalNet::from_assessments(d, dag, locals).unwrap()
    }

    #[test]
    fn single_node_generators() {
        let d = binary_domain(&["x"]);
        let dag = Dag::new([id("x")], []).unwrap();
        let net = CredalNet::from_assessments(
            d.clone(),
            dag,
            vec![assess("x", Configuration::empty(), vec![gamble(&d, "x", &[1, -1])])],
        )
        .unwrap();
        let jm = JointModel::build(net, DEFAULT_GENERATOR_CAP).unwrap();
        let tables: Vec<Vec<Rational>> = jm.generators().iter().map(|g| g.table().to_vec()).collect();
        assert_eq!(tables, vec![v(&[1, -1]), v(&[1, 0]), v(&[0, 1])]);
    }

    #[test]
    fn vacuous_chain_generators() {
        let d = binary_domain(&["a", "b"]);
        let dag = Dag::new([id("a"), id("b")], [(id("a"), id("b"))]).unwrap();
        let locals = vec![
            assess("a", Configuration::empty(), vec![]),
            assess("b", config(&d, &[("a", "a0")]), vec![]),
            assess("b", config(&d, &[("a", "a1")]), vec![]),
        ];
        let net = CredalNet::from_assessments(d, dag, locals).unwrap();
        assert_eq!(net.generator_count(), 6);
        let jm = JointModel::build(net, DEFAULT_GENERATOR_CAP).unwrap();
        let tables: Vec<Vec<Rational>> = jm.generators().iter().map(|g| g.table().to_vec()).collect();
        // order (a,b): a0b0, a0b1, a1b0, a1b1
        assert_eq!(
            tables,
            vec![
                v(&[1, 1, 0, 0]),
                v(&[0, 0, 1, 1]),
                v(&[1, 0, 0, 0]),
                v(&[0, 1, 0, 0]),
                v(&[0, 0, 1, 0]),
                v(&[0, 0, 0, 1]),
            ]
        );
    }

    #[test]
    fn independent_pair_uses_other_node_as_context() {
        let d = binary_domain(&["a", "b"]);
        let dag = Dag::new([id("a"), id("b")], []).unwrap();
        let locals = vec![
            assess("a", Configuration::empty(), vec![gamble(&d, "a", &[2, -1])]),
            assess("b", Configuration::empty(), vec![]),
        ];
        let net = CredalNet::from_assessments(d.clone(), dag, locals).unwrap();
        assert_eq!(net.npnd_scope(&id("a")).unwrap().nodes(), &[id("b")]);
        // a: 2 contexts × (1 + 2), b: 2 contexts × 2
        assert_eq!(net.generator_count(), 10);
        let jm = JointModel::build(net, DEFAULT_GENERATOR_CAP).unwrap();
        assert_eq!(jm.generators()[0].table(), &v(&[2, 0, -1, 0])[..]);
        for b in ["b0", "b1"] {
            let given = config(&d, &[("b", b)]);
            assert!(jm.condition_member(&given, &gamble(&d, "a", &[2, -1])).unwrap());
            assert!(!jm.condition_member(&given, &gamble(&d, "a", &[-2, 1])).unwrap());
            assert!(jm.condition_member(&given, &gamble(&d, "a", &[3, -1])).unwrap());
        }
    }

    #[test]
    fn cap_is_checked_before_building() {
        let net = chain();
        assert_eq!(net.generator_count(), 7);
        assert_eq!(JointModel::build(net.clone(), 6).unwrap_err(), Error::CapExceeded { count: 7, cap: 6 });
        assert_eq!(JointModel::build(net, 7).unwrap().generators().len(), 7);
    }

    #[test]
    fn chain_queries() {
        let net = chain();
        let d = net.domain().clone();
        let jm = JointModel::build(net, DEFAULT_GENERATOR_CAP).unwrap();
        let f = gamble(&d, "b", &[1, -1]);
        assert!(jm.condition_member(&config(&d, &[("a", "a0")]), &f).unwrap());
        assert!(!jm.condition_member(&config(&d, &[("a", "a1")]), &f).unwrap());
        // unconditionally, (1,-1) on b is not desirable: a1 gives no support
        assert!(!jm.member(&f).unwrap());
        let b = d.scope([&id("b")]).unwrap();
        assert!(jm.marginal_member(&b, &config(&d, &[("a", "a0")]), &f).unwrap());
        assert_eq!(jm.lower_prevision(&config(&d, &[("a", "a0")]), &gamble(&d, "b", &[1, 0])).unwrap(), rat(1, 2));
        assert_eq!(jm.lower_prevision(&Configuration::empty(), &gamble(&d, "b", &[1, 0])).unwrap(), rat(0, 1));
        assert_eq!(jm.upper_prevision(&Configuration::empty(), &gamble(&d, "a", &[1, 0])).unwrap(), rat(1, 1));
        assert_eq!(
            jm.lower_prevision(&Configuration::empty(), &Gamble::constant(Scope::empty(), rat(3, 1))).unwrap(),
            rat(3, 1)
        );
    }

    #[test]
    fn query_errors() {
        let net = chain();
        let d = net.domain().clone();
        let jm = JointModel::build(net, DEFAULT_GENERATOR_CAP).unwrap();
        assert_eq!(jm.member(&gamble(&d, "b", &[0, 0])).unwrap_err(), Error::ZeroGamble);
        let given = config(&d, &[("b", "b0")]);
        assert!(matches!(jm.condition_member(&given, &gamble(&d, "b", &[1, 0])), Err(Error::ScopeOverlap { .. })));
        let a = d.scope([&id("a")]).unwrap();
        assert!(matches!(
            jm.marginal_member(&a, &config(&d, &[("a", "a0")]), &gamble(&d, "a", &[1, 0])),
            Err(Error::ScopeOverlap { .. })
        ));
        let ab = d.full_scope();
        let err = jm.check_irrelevance(
            &id("a"),
            &ab.intersection(&d.scope([&id("b")]).unwrap()),
            &config(&d, &[("b", "b0")]),
            &[],
        );
        assert_eq!(err.unwrap_err(), Error::NotIrrelevant { node: id("a"), nodes: vec![id("b")] });
    }

    #[test]
    fn ingestion_errors() {
        let d = binary_domain(&["a", "b"]);
        let dag = || Dag::new([id("a"), id("b")], [(id("a"), id("b"))]).unwrap();
        let missing =
            vec![assess("a", Configuration::empty(), vec![]), assess("b", config(&d, &[("a", "a0")]), vec![])];
        assert!(matches!(CredalNet::from_assessments(d.clone(), dag(), missing), Err(Error::MissingLocalModel { .. })));
        let dup = vec![assess("a", Configuration::empty(), vec![]), assess("a", Configuration::empty(), vec![])];
        assert!(matches!(CredalNet::from_assessments(d.clone(), dag(), dup), Err(Error::DuplicateLocalModel { .. })));
        let incoherent = vec![
            assess("a", Configuration::empty(), vec![]),
            assess("b", config(&d, &[("a", "a0")]), vec![]),
            assess("b", config(&d, &[("a", "a1")]), vec![gamble(&d, "b", &[1, -1]), gamble(&d, "b", &[-1, 1])]),
        ];
        let err = CredalNet::from_assessments(d.clone(), dag(), incoherent).unwrap_err();
        assert_eq!(err, Error::IncoherentLocalModel { node: id("b"), given: "{a=a1}".into() });
        let zero = vec![assess("a", Configuration::empty(), vec![gamble(&d, "a", &[0, 0])])];
        assert!(matches!(CredalNet::from_assessments(d.clone(), dag(), zero), Err(Error::ZeroAssessment { .. })));
        let cyclic = Dag::new([id("a"), id("b")], [(id("a"), id("b")), (id("b"), id("a"))]).unwrap();
        assert!(matches!(CredalNet::from_assessments(d.clone(), cyclic, vec![]), Err(Error::Cycle(_))));
    }

    #[test]
    fn singleton_indicators_are_generated() {
        let mut rng = sample::rng(7);
        for _ in 0..20 {
            let jm =
                JointModel::build(sample::network(&mut rng, &NetworkShape::default()), DEFAULT_GENERATOR_CAP).unwrap();
            for c in jm.full_scope().configs() {
                let ind = Gamble::indicator(&c, jm.full_scope()).unwrap();
                assert!(jm.generators().contains(&ind));
            }
        }
    }

    #[test]
    fn requirements_hold_on_chain() {
        let jm = JointModel::build(chain(), DEFAULT_GENERATOR_CAP).unwrap();
        let report = jm.verify_requirements(&VerifyOptions::default()).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.generator_count, 7);
        assert!(report.local_extension.checked > 0);
        assert!(report.irrelevance.checked == 0);
    }

    #[test]
    fn flipped_generator_is_caught() {
        let net = chain();
        let d = net.domain().clone();
        let mut jm = JointModel::build(net, DEFAULT_GENERATOR_CAP).unwrap();
        assert_eq!(jm.flip_local_generator(&id("b"), &config(&d, &[("a", "a0")]), 0).unwrap(), 1);
        assert!(jm.flip_local_generator(&id("b"), &config(&d, &[("a", "a1")]), 0).is_err());
        let report = jm.verify_requirements(&VerifyOptions::default()).unwrap();
        assert!(!report.passed);
        let v = report.violations().next().expect("a G1 violation");
        assert_eq!(v.requirement, Requirement::G1);
        assert_eq!(v.node, id("b"));
        assert_eq!(report.smallest.violations.len(), 1);
    }

    #[test]
    fn subsets_are_exhaustive_for_small_context() {
        let scope = Scope::from_sizes([("p", 2), ("q", 2), ("r", 2)]).unwrap();
        let subsets = irrelevant_subsets(&scope, &mut sample::rng(0));
        assert_eq!(subsets.len(), 8);
        assert!(subsets.contains(&Scope::empty()));
        assert!(subsets.contains(&scope));
        let wide = Scope::from_sizes([("p", 2), ("q", 2), ("r", 2), ("s", 2), ("t", 2)]).unwrap();
        let sampled = irrelevant_subsets(&wide, &mut sample::rng(0));
        assert_eq!(sampled.len(), SAMPLED_SUBSETS);
        assert!(sampled.contains(&Scope::empty()) && sampled.contains(&wide));
    }

    /// a → b → c with (2,-1) assessed for c given b0.
    fn three_chain() -> CredalNet {
        let d = binary_domain(&["a", "b", "c"]);
        let dag = Dag::new([id("a"), id("b"), id("c")], [(id("a"), id("b")), (id("b"), id("c"))]).unwrap();
        let locals = vec![
            assess("a", Configuration::empty(), vec![gamble(&d, "a", &[1, -3])]),
            assess("b", config(&d, &[("a", "a0")]), vec![]),
            assess("b", config(&d, &[("a", "a1")]), vec![gamble(&d, "b", &[-1, 1])]),
            assess("c", config(&d, &[("b", "b0")]), vec![gamble(&d, "c", &[2, -1])]),
            assess("c", config(&d, &[("b", "b1")]), vec![]),
        ];
        CredalNet::from_assessments(d, dag, locals).unwrap()
    }

    #[test]
    fn earlier_node_is_irrelevant_given_parent() {
        let net = three_chain();
        let d = net.domain().clone();
        let jm = JointModel::build(net, DEFAULT_GENERATOR_CAP).unwrap();
        let c = d.scope([&id("c")]).unwrap();
        let probes = [[2, -1], [-2, 1], [3, -1], [1, -1], [1, 1], [-1, 0], [5, -3]];
        for b in ["b0", "b1"] {
            let answers: Vec<Vec<bool>> = ["a0", "a1"]
                .iter()
                .map(|a| {
                    let given = config(&d, &[("a", a), ("b", b)]);
                    probes.iter().map(|f| jm.marginal_member(&c, &given, &gamble(&d, "c", f)).unwrap()).collect()
                })
                .collect();
            assert_eq!(answers[0], answers[1], "given {b}");
        }
        let given = config(&d, &[("a", "a1"), ("b", "b0")]);
        let a = d.scope([&id("a")]).unwrap();
        let gambles = [gamble(&d, "c", &[2, -1]), gamble(&d, "c", &[-2, 1]), gamble(&d, "c", &[1, -1])];
        let report = jm.check_irrelevance(&id("c"), &a, &given, &gambles).unwrap();
        assert!(report.passed());
        assert_eq!(report.checked, 3);
        assert!(jm.verify_requirements(&VerifyOptions::default()).unwrap().passed);
    }

    #[test]
    fn single_node_matches_local_cone() {
        let d = binary_domain(&["x"]);
        let dag = Dag::new([id("x")], []).unwrap();
        let local = gamble(&d, "x", &[1, -2]);
        let net =
            CredalNet::from_assessments(d.clone(), dag, vec![assess("x", Configuration::empty(), vec![local.clone()])])
                .unwrap();
        let cone = net.local(&id("x")).unwrap().cone(&Configuration::empty()).unwrap().clone();
        let jm = JointModel::build(net, DEFAULT_GENERATOR_CAP).unwrap();
        for f in [[1, -1], [-1, 2], [1, -2], [1, -3], [0, 1], [-1, -1]] {
            let f = gamble(&d, "x", &f);
            assert_eq!(jm.member(&f).unwrap(), cone.member(&f).unwrap());
        }
        assert!(jm.member(&gamble(&d, "x", &[1, -1])).unwrap());
    }

    #[test]
    fn empty_conditioning_is_identity() {
        let net = three_chain();
        let jm = JointModel::build(net, DEFAULT_GENERATOR_CAP).unwrap();
        let mut rng = sample::rng(3);
        for _ in 0..30 {
            let f = sample::gamble(&mut rng, jm.full_scope());
            let direct = jm.member(&f).unwrap();
            assert_eq!(jm.condition_member(&Configuration::empty(), &f).unwrap(), direct);
            assert_eq!(jm.marginal_member(&jm.full_scope().clone(), &Configuration::empty(), &f).unwrap(), direct);
        }
    }

    #[test]
    fn isolated_vacuous_roots_pass() {
        let d = Domain::new([
            VariableSpace::new("p", ["0", "1", "2"]).unwrap(),
            VariableSpace::new("q", ["0", "1"]).unwrap(),
            VariableSpace::new("r", ["0", "1"]).unwrap(),
        ])
        .unwrap();
        let dag = Dag::new([id("p"), id("q"), id("r")], []).unwrap();
        let locals = ["p", "q", "r"].iter().map(|n| assess(n, Configuration::empty(), vec![])).collect();
        let jm =
            JointModel::build(CredalNet::from_assessments(d, dag, locals).unwrap(), DEFAULT_GENERATOR_CAP).unwrap();
        let report = jm.verify_requirements(&VerifyOptions::default()).unwrap();
        assert!(report.passed);
        assert!(report.irrelevance.checked > 0);
    }

    #[test]
    fn rebuild_is_deterministic() {
        let a = JointModel::build(three_chain(), DEFAULT_GENERATOR_CAP).unwrap();
        let b = JointModel::build(three_chain(), DEFAULT_GENERATOR_CAP).unwrap();
        assert_eq!(a.generators(), b.generators());
        assert_eq!(a.origins(), b.origins());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn random_joints_are_coherent(seed in any::<u64>()) {
            let mut rng = sample::rng(seed);
            let net = sample::network(&mut rng, &NetworkShape { max_nodes: 3, ..NetworkShape::default() });
            let jm = JointModel::build(net, DEFAULT_GENERATOR_CAP).unwrap();
            prop_assert!(lp::zero_combination(jm.generators()).unwrap().is_none());
            let f = sample::nonpositive(&mut rng, jm.full_scope());
            prop_assert!(!jm.member(&f).unwrap());
        }

        #[test]
        fn generators_are_members_and_closed(seed in any::<u64>()) {
            let mut rng = sample::rng(seed);
            let net = sample::network(&mut rng, &NetworkShape { max_nodes: 3, ..NetworkShape::default() });
            let jm = JointModel::build(net, DEFAULT_GENERATOR_CAP).unwrap();
            let n = jm.generators().len();
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let (gi, gj) = (&jm.generators()[i], &jm.generators()[j]);
            prop_assert!(jm.member(gi).unwrap());
            let w = sample::weight(&mut rng);
            prop_assert!(jm.member(&gi.scale(&w)).unwrap());
            let sum = gi.add(gj);
            prop_assert!(jm.member(&sum).unwrap());
        }

        #[test]
        fn local_and_joint_agree(seed in any::<u64>()) {
            let mut rng = sample::rng(seed);
            let net = sample::network(&mut rng, &NetworkShape { max_nodes: 3, ..NetworkShape::default() });
            let jm = JointModel::build(net, DEFAULT_GENERATOR_CAP).unwrap();
            let report = jm.verify_requirements(&VerifyOptions { samples: 2, sign_samples: 2, seed }).unwrap();
            prop_assert!(report.passed, "{:?}", report);
        }
    }
}
