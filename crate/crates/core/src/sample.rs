//! Seeded random gambles for verification sweeps.
//!
//! Entries are small fractions `p/q` with `|p| ≤ 8` and `1 ≤ q ≤ 4`, which
//! keeps the linear programs they feed small.

use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cone::AssessmentCone;
use crate::dag::Dag;
use crate::gamble::Gamble;
use crate::net::{CredalNet, LocalAssessment};
use crate::rational::Rational;
use crate::space::{Domain, NodeId, Scope, VariableSpace};

pub const MAX_NUMERATOR: i64 = 8;
pub const MAX_DENOMINATOR: i64 = 4;

pub type SweepRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SweepRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for a sub-task, so results do not depend on
/// the order in which tasks run.
pub fn substream(seed: u64, task: u64) -> SweepRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

pub fn small_rational<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64) -> Rational {
    Rational::new(rng.gen_range(lo..=hi), rng.gen_range(1..=MAX_DENOMINATOR))
}

fn fill<R: Rng + ?Sized>(rng: &mut R, scope: &Scope, lo: i64, hi: i64) -> Gamble {
    loop {
        let table: Vec<Rational> = (0..scope.cardinality()).map(|_| small_rational(rng, lo, hi)).collect();
        if table.iter().any(|v| !v.is_zero()) {
            return Gamble::new(scope.clone(), table).expect("table sized to scope");
        }
    }
}

/// A nonzero gamble with entries of either sign.
pub fn gamble<R: Rng + ?Sized>(rng: &mut R, scope: &Scope) -> Gamble {
    fill(rng, scope, -MAX_NUMERATOR, MAX_NUMERATOR)
}

/// A gamble with `f ≤ 0` and `f ≠ 0`.
pub fn nonpositive<R: Rng + ?Sized>(rng: &mut R, scope: &Scope) -> Gamble {
    fill(rng, scope, -MAX_NUMERATOR, 0)
}

/// A gamble with `f ≥ 0` and `f ≠ 0`.
pub fn positive<R: Rng + ?Sized>(rng: &mut R, scope: &Scope) -> Gamble {
    fill(rng, scope, 0, MAX_NUMERATOR)
}

/// A strictly positive weight.
pub fn weight<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    small_rational(rng, 1, MAX_NUMERATOR)
}

/// A nonzero gamble with entries `p/q`, `|p| ≤ 3`, `1 ≤ q ≤ 4`.
pub fn assessment_gamble<R: Rng + ?Sized>(rng: &mut R, scope: &Scope) -> Gamble {
    fill(rng, scope, -3, 3)
}

/// Up to `max` assessment gambles forming a coherent cone; gambles are
/// dropped from the end until the cone is coherent.
pub fn coherent_assessment<R: Rng + ?Sized>(rng: &mut R, scope: &Scope, max: usize) -> Vec<Gamble> {
    let count = rng.gen_range(0..=max);
    let mut gambles: Vec<Gamble> = (0..count).map(|_| assessment_gamble(rng, scope)).collect();
    while !gambles.is_empty() {
        let cone = AssessmentCone::new(scope.clone(), gambles.clone()).expect("gambles on scope");
        if cone.is_coherent().expect("well-formed program").coherent {
            break;
        }
        gambles.pop();
    }
    gambles
}

/// Bounds for [`network`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkShape {
    pub max_nodes: usize,
    pub min_values: usize,
    pub max_values: usize,
    pub max_gambles: usize,
}

impl Default for NetworkShape {
    fn default() -> Self {
        NetworkShape { max_nodes: 4, min_values: 2, max_values: 3, max_gambles: 2 }
    }
}

/// A random network with nodes `n0, n1, …`, values `v0, v1, …`, edges
/// `ni → nj` (i < j) drawn with probability one half, and coherent local
/// models.
pub fn network<R: Rng + ?Sized>(rng: &mut R, shape: &NetworkShape) -> CredalNet {
    let k = rng.gen_range(1..=shape.max_nodes);
    let ids: Vec<NodeId> = (0..k).map(|i| NodeId::new(format!("n{i}"))).collect();
    let spaces = ids.iter().map(|id| {
        let size = rng.gen_range(shape.min_values..=shape.max_values);
        VariableSpace::new(id.clone(), (0..size).map(|v| format!("v{v}"))).expect("nonempty distinct values")
    });
    let domain = Domain::new(spaces.collect::<Vec<_>>()).expect("distinct ids");
    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if rng.gen_bool(0.5) {
                edges.push((ids[i].clone(), ids[j].clone()));
            }
        }
    }
    let dag = Dag::new(ids.clone(), edges).expect("forward edges only");
    let mut assessments = Vec::new();
    for s in &ids {
        let own = domain.scope([s]).expect("known node");
        let parents = domain.scope(&dag.parents(s).expect("known node")).expect("known nodes");
        for given in parents.configs() {
            let gambles = coherent_assessment(rng, &own, shape.max_gambles);
            assessments.push(LocalAssessment { node: s.clone(), given, gambles });
        }
    }
    CredalNet::from_assessments(domain, dag, assessments).expect("coherent random network")
}
