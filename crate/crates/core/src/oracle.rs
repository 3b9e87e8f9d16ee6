//! Independent checks that do not go through the simplex solver.
//!
//! [`fm_membership`] decides conic membership by Gaussian elimination
//! followed by Fourier–Motzkin elimination. [`PreciseNet`] is a Bayesian
//! network with strictly positive local mass functions; its joint
//! expectation is strictly positive on every generator of a joint model
//! whose local cones admit those mass functions as witnesses.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::cone::{expectation, CoherenceReport};
use crate::error::{Error, Result};
use crate::gamble::Gamble;
use crate::net::{CredalNet, JointModel};
use crate::rational::Rational;
use crate::sample;
use crate::space::{Configuration, NodeId, Scope};

pub const FM_MAX_DIM: usize = 8;
pub const FM_MAX_RAYS: usize = 64;

/// `coeffs · λ ≤ rhs`, with the set of original inequalities it was
/// combined from.
#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<Rational>,
    rhs: Rational,
    history: u64,
}

impl Row {
    /// Scales so that the first nonzero coefficient has absolute value one.
    fn normalize(mut self) -> Row {
        if let Some(lead) = self.coeffs.iter().find(|v| !v.is_zero()).map(Rational::abs) {
            let inv = lead.recip();
            for v in &mut self.coeffs {
                *v *= &inv;
            }
            self.rhs *= &inv;
        }
        self
    }
}

/// Decides `target ∈ {Σ λ_k ray_k : λ ≥ 0}` without linear programming.
///
/// The equality system is first reduced to row echelon form; the pivot
/// variables are substituted into their sign constraints and the remaining
/// variables are removed by Fourier–Motzkin elimination, discarding any
/// combination built from more original rows than one plus the number of
/// variables eliminated so far.
pub fn fm_membership<R: AsRef<[Rational]>>(target: &[Rational], rays: &[R]) -> Result<bool> {
    let dim = target.len();
    let m = rays.len();
    if dim > FM_MAX_DIM || m > FM_MAX_RAYS {
        return Err(Error::SizeGuard { dim, rays: m });
    }
    for (row, r) in rays.iter().enumerate() {
        if r.as_ref().len() != dim {
            return Err(Error::DimensionMismatch { row, expected: dim, actual: r.as_ref().len() });
        }
    }
    if target.iter().all(Zero::is_zero) {
        return Err(Error::ZeroTarget);
    }

    // augmented matrix [A | t], A[i][k] = ray_k[i]
    let mut a: Vec<Vec<Rational>> = (0..dim)
        .map(|i| {
            let mut row: Vec<Rational> = rays.iter().map(|r| r.as_ref()[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(p) = (r..dim).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in &mut a[r] {
            *v *= &inv;
        }
        for i in 0..dim {
            if i != r && !a[i][c].is_zero() {
                let factor = a[i][c].clone();
                let (pivot_row, row) = if i < r {
                    let (lo, hi) = a.split_at_mut(r);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = a.split_at_mut(i);
                    (&lo[r], &mut hi[0])
                };
                for (v, p) in row.iter_mut().zip(pivot_row) {
                    v.sub_mul_assign(&factor, p);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == dim {
            break;
        }
    }
    if a[r..].iter().any(|row| !row[m].is_zero()) {
        return Ok(false);
    }

    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    let mut rows = Vec::new();
    // λ_pivot = t' - Σ a'_j λ_j ≥ 0
    for (i, _) in pivots.iter().enumerate() {
        let coeffs = free.iter().map(|&j| a[i][j].clone()).collect();
        rows.push(Row { coeffs, rhs: a[i][m].clone(), history: 0 });
    }
    // λ_j ≥ 0
    for (k, _) in free.iter().enumerate() {
        let mut coeffs = vec![Rational::zero(); free.len()];
        coeffs[k] = -Rational::one();
        rows.push(Row { coeffs, rhs: Rational::zero(), history: 0 });
    }
    for (i, row) in rows.iter_mut().enumerate() {
        row.history = 1u64 << i;
    }
    Ok(eliminate(rows, free.len()))
}

fn eliminate(mut rows: Vec<Row>, vars: usize) -> bool {
    let mut remaining: Vec<usize> = (0..vars).collect();
    let mut eliminated = 0u32;
    while !remaining.is_empty() {
        // cheapest variable first
        let (pos_in_remaining, &var) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &j)| {
                let pos = rows.iter().filter(|r| r.coeffs[j].is_positive()).count();
                let neg = rows.iter().filter(|r| r.coeffs[j].is_negative()).count();
                pos * neg
            })
            .expect("nonempty");
        remaining.swap_remove(pos_in_remaining);
        eliminated += 1;

        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), Vec::new());
        for row in rows {
            match row.coeffs[var].signum() {
                1 => pos.push(row),
                -1 => neg.push(row),
                _ => next.push(row),
            }
        }
        for p in &pos {
            for n in &neg {
                let history = p.history | n.history;
                if history.count_ones() > eliminated + 1 {
                    continue;
                }
                let a = -&n.coeffs[var];
                let b = p.coeffs[var].clone();
                let coeffs = p.coeffs.iter().zip(&n.coeffs).map(|(x, y)| &a * x + &b * y).collect();
                let rhs = &a * &p.rhs + &b * &n.rhs;
                next.push(Row { coeffs, rhs, history }.normalize());
            }
        }

        let mut seen: HashMap<(Vec<Rational>, Rational), usize> = HashMap::new();
        rows = Vec::with_capacity(next.len());
        for row in next {
            if row.coeffs.iter().all(Zero::is_zero) {
                if row.rhs.is_negative() {
                    return false;
                }
                continue;
            }
            match seen.get(&(row.coeffs.clone(), row.rhs.clone())) {
                Some(&i) => {
                    if row.history.count_ones() < rows[i].history.count_ones() {
                        rows[i].history = row.history;
                    }
                }
                None => {
                    seen.insert((row.coeffs.clone(), row.rhs.clone()), rows.len());
                    rows.push(row);
                }
            }
        }
    }
    rows.iter().all(|r| !r.rhs.is_negative())
}

/// A Bayesian network on the same graph and spaces as a credal network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreciseNet {
    full: Scope,
    nodes: Vec<NodeId>,
    own: Vec<Scope>,
    parents: Vec<Scope>,
    /// `pmfs[s][x_P]` is the mass function of node `s` given `x_P`.
    pmfs: Vec<Vec<Vec<Rational>>>,
}

impl PreciseNet {
    pub fn new(net: &CredalNet, pmfs: Vec<Vec<Vec<Rational>>>) -> Result<PreciseNet> {
        let domain = net.domain();
        let nodes = net.dag().nodes().to_vec();
        let mut own = Vec::new();
        let mut parents = Vec::new();
        if pmfs.len() != nodes.len() {
            return Err(Error::TableLength { expected: nodes.len(), actual: pmfs.len() });
        }
        for (s, tables) in nodes.iter().zip(&pmfs) {
            let o = net.own_scope(s)?.clone();
            let p = net.parent_scope(s)?.clone();
            if tables.len() != p.cardinality() {
                return Err(Error::TableLength { expected: p.cardinality(), actual: tables.len() });
            }
            for (x, pmf) in tables.iter().enumerate() {
                let invalid = |reason: &str| Error::InvalidPmf {
                    node: s.clone(),
                    given: domain.describe(&p.config_at(x)),
                    reason: reason.to_string(),
                };
                if pmf.len() != o.cardinality() {
                    return Err(invalid("wrong length"));
                }
                if !pmf.iter().all(Rational::is_positive) {
                    return Err(invalid("not strictly positive"));
                }
                if pmf.iter().sum::<Rational>() != Rational::one() {
                    return Err(invalid("does not sum to one"));
                }
            }
            own.push(o);
            parents.push(p);
        }
        Ok(PreciseNet { full: domain.full_scope(), nodes, own, parents, pmfs })
    }

    /// Uses the coherence witness of every local cone.
    pub fn from_witnesses(net: &CredalNet) -> Result<PreciseNet> {
        let pmfs = net
            .local_witnesses()?
            .into_iter()
            .map(|reports| {
                reports.into_iter().map(|r: CoherenceReport| r.witness.expect("coherent local cone")).collect()
            })
            .collect();
        PreciseNet::new(net, pmfs)
    }

    pub fn full_scope(&self) -> &Scope {
        &self.full
    }

    pub fn local(&self, s: &NodeId, given: &Configuration) -> Result<&[Rational]> {
        let i = self.nodes.binary_search(s).map_err(|_| Error::UnknownNode(s.clone()))?;
        if given.scope() != &self.parents[i] {
            return Err(Error::SpaceMismatch {
                expected: self.parents[i].to_string(),
                actual: given.scope().to_string(),
            });
        }
        Ok(&self.pmfs[i][given.index()])
    }

    /// `p_G(x) = Π_s p_{s|x_P(s)}(x_s)`.
    pub fn global_mass(&self, x: &Configuration) -> Result<Rational> {
        if x.scope() != &self.full {
            return Err(Error::SpaceMismatch { expected: self.full.to_string(), actual: x.scope().to_string() });
        }
        let mut p = Rational::one();
        for i in 0..self.nodes.len() {
            let xp = x.restrict(&self.parents[i])?.index();
            let xs = x.restrict(&self.own[i])?.index();
            p *= &self.pmfs[i][xp][xs];
        }
        Ok(p)
    }

    /// The mass function on `X_G` in lexicographic order.
    pub fn global_table(&self) -> Result<Vec<Rational>> {
        self.full.configs().map(|x| self.global_mass(&x)).collect()
    }

    /// Marginal mass function on `scope`.
    pub fn marginal(&self, scope: &Scope) -> Result<Vec<Rational>> {
        if !scope.is_subset(&self.full) {
            return Err(Error::ScopeNotContained { inner: scope.to_string(), outer: self.full.to_string() });
        }
        let map = self.full.projection_map(scope);
        let mut out = vec![Rational::zero(); scope.cardinality()];
        for (p, &i) in self.global_table()?.into_iter().zip(&map) {
            out[i] += &p;
        }
        Ok(out)
    }

    pub fn expectation(&self, f: &Gamble) -> Result<Rational> {
        let f = f.extend(&self.full)?;
        Ok(expectation(&self.global_table()?, f.table()))
    }

    /// Checks `E_G(h) > 0` on every generator of `jm` and on `combos` random
    /// positive combinations of them.
    pub fn positivity_audit<R: Rng + ?Sized>(
        &self,
        jm: &JointModel,
        combos: usize,
        rng: &mut R,
    ) -> Result<AuditReport> {
        let net = jm.net();
        for (i, local) in net.locals().iter().enumerate() {
            for (x, cone) in local.cones().iter().enumerate() {
                for (k, g) in cone.assessment().iter().enumerate() {
                    if !expectation(&self.pmfs[i][x], g.table()).is_positive() {
                        return Err(Error::WitnessMismatch {
                            node: local.node().clone(),
                            given: net.domain().describe(&local.parents().config_at(x)),
                            index: k,
                        });
                    }
                }
            }
        }

        let p = self.global_table()?;
        let generators = jm.generators();
        let values: Vec<Rational> = generators.iter().map(|g| expectation(&p, g.table())).collect();
        let mut report =
            AuditReport { generators_checked: generators.len(), combinations_checked: 0, failures: Vec::new() };
        for (i, v) in values.iter().enumerate() {
            if !v.is_positive() {
                report.failures.push(AuditFailure { terms: vec![(i, Rational::one())], expectation: v.clone() });
            }
        }
        if generators.is_empty() {
            return Ok(report);
        }
        for _ in 0..combos {
            let k = rng.gen_range(1..=generators.len().min(6));
            let terms: Vec<(usize, Rational)> =
                (0..k).map(|_| (rng.gen_range(0..generators.len()), sample::weight(rng))).collect();
            // linearity: E(Σ w h) = Σ w E(h), recomputed from the table
            let mut h = vec![Rational::zero(); p.len()];
            for (i, w) in &terms {
                for (acc, v) in h.iter_mut().zip(generators[*i].table()) {
                    *acc += &(w * v);
                }
            }
            let e = expectation(&p, &h);
            report.combinations_checked += 1;
            if !e.is_positive() {
                report.failures.push(AuditFailure { terms, expectation: e });
            }
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditFailure {
    /// `(generator index, weight)` pairs.
    pub terms: Vec<(usize, Rational)>,
    pub expectation: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub generators_checked: usize,
    pub combinations_checked: usize,
    pub failures: Vec<AuditFailure>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}
