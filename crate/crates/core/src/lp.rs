//! Exact rational linear programming.
//!
//! A dense two-phase tableau simplex over [`Rational`]. Pivots skip zero
//! entries, which keeps the cost proportional to the fill of the tableau
//! rather than its full size. Entering columns follow Dantzig's largest
//! coefficient rule until a run of degenerate pivots is seen, after which the
//! solve switches permanently to Bland's rule; Bland's rule cannot cycle, and
//! before the switch every non-degenerate pivot strictly improves the
//! objective, so every solve terminates.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN_LIMIT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Ge,
    Le,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize objective·x` subject to the constraints, with every variable
/// nonnegative unless marked free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    num_vars: usize,
    constraints: Vec<Constraint>,
    objective: Vec<Rational>,
    free: Vec<bool>,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> LinearSystem {
        LinearSystem {
            num_vars,
            constraints: Vec::new(),
            objective: vec![Rational::zero(); num_vars],
            free: vec![false; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constrain(&mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) -> &mut Self {
        self.constraints.push(Constraint { coefficients, relation, rhs });
        self
    }

    pub fn maximize(&mut self, objective: Vec<Rational>) -> &mut Self {
        self.objective = objective;
        self
    }

    /// Lifts the implicit `x[var] ≥ 0` bound.
    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.free[var] = true;
        self
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Exact substitution check of bounds and constraints.
    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars {
            return false;
        }
        if x.iter().zip(&self.free).any(|(v, free)| !free && v.is_negative()) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs: Rational = c.coefficients.iter().zip(x).map(|(a, v)| a * v).sum();
            match c.relation {
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
                Relation::Le => lhs <= c.rhs,
            }
        })
    }

    fn check_dimensions(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                row: usize::MAX,
                expected: self.num_vars,
                actual: self.objective.len(),
            });
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != self.num_vars {
                return Err(Error::DimensionMismatch { row, expected: self.num_vars, actual: c.coefficients.len() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Optimal point, or a feasible point when unbounded.
    pub witness: Option<Vec<Rational>>,
    pub objective: Option<Rational>,
}

pub fn solve(sys: &LinearSystem) -> Result<LpOutcome> {
    sys.check_dimensions()?;
    Ok(Tableau::build(sys).run(sys))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Rule {
    Dantzig,
    Bland,
}

struct Tableau {
    /// `rows[i]` holds the constraint coefficients followed by the rhs.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs, followed by the current objective value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    num_cols: usize,
    /// Columns `first_artificial..num_cols` are artificial.
    first_artificial: usize,
    /// Tableau column pairs `(plus, minus)` per original variable.
    columns: Vec<(usize, Option<usize>)>,
    rule: Rule,
    degenerate_run: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl Tableau {
    fn build(sys: &LinearSystem) -> Tableau {
        let mut columns = Vec::with_capacity(sys.num_vars);
        let mut next = 0;
        for &free in &sys.free {
            if free {
                columns.push((next, Some(next + 1)));
                next += 2;
            } else {
                columns.push((next, None));
                next += 1;
            }
        }
        let structural = next;

        // Normalise to a nonnegative right-hand side.
        let normalised: Vec<(Vec<Rational>, Relation, Rational)> = sys
            .constraints
            .iter()
            .map(|c| {
                let mut coeffs = vec![Rational::zero(); structural];
                for (j, a) in c.coefficients.iter().enumerate() {
                    let (plus, minus) = columns[j];
                    coeffs[plus] = a.clone();
                    if let Some(m) = minus {
                        coeffs[m] = -a;
                    }
                }
                if c.rhs.is_negative() {
                    let relation = match c.relation {
                        Relation::Eq => Relation::Eq,
                        Relation::Ge => Relation::Le,
                        Relation::Le => Relation::Ge,
                    };
                    (coeffs.into_iter().map(|a| -a).collect(), relation, -&c.rhs)
                } else {
                    (coeffs, c.relation, c.rhs.clone())
                }
            })
            .collect();

        let num_slack = normalised.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let num_artificial = normalised.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let first_artificial = structural + num_slack;
        let num_cols = first_artificial + num_artificial;

        let mut rows = Vec::with_capacity(normalised.len());
        let mut basis = Vec::with_capacity(normalised.len());
        let (mut slack, mut artificial) = (structural, first_artificial);
        for (coeffs, relation, rhs) in normalised {
            let mut row = coeffs;
            row.resize(num_cols + 1, Rational::zero());
            row[num_cols] = rhs;
            match relation {
                Relation::Le => {
                    row[slack] = Rational::one();
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                    row[artificial] = Rational::one();
                    basis.push(artificial);
                    artificial += 1;
                }
                Relation::Eq => {
                    row[artificial] = Rational::one();
                    basis.push(artificial);
                    artificial += 1;
                }
            }
            rows.push(row);
        }

        // Phase 1 objective: maximise -Σ artificials.
        let mut cost = vec![Rational::zero(); num_cols + 1];
        for (row, &b) in rows.iter().zip(&basis) {
            if b >= first_artificial {
                for (c, v) in cost.iter_mut().zip(row) {
                    if !v.is_zero() {
                        *c -= v;
                    }
                }
            }
        }
        for c in &mut cost[first_artificial..num_cols] {
            *c = Rational::zero();
        }

        Tableau { rows, cost, basis, num_cols, first_artificial, columns, rule: Rule::Dantzig, degenerate_run: 0 }
    }

    fn run(mut self, sys: &LinearSystem) -> LpOutcome {
        if self.first_artificial < self.num_cols {
            loop {
                match self.step(self.num_cols) {
                    Step::Pivoted => continue,
                    Step::Optimal => break,
                    Step::Unbounded => unreachable!("phase 1 objective is bounded above by zero"),
                }
            }
            if self.cost[self.num_cols].is_negative() {
                return LpOutcome { status: LpStatus::Infeasible, witness: None, objective: None };
            }
            self.drive_out_artificials();
        }

        self.install_objective(&sys.objective);
        self.rule = Rule::Dantzig;
        self.degenerate_run = 0;
        let status = loop {
            match self.step(self.first_artificial) {
                Step::Pivoted => continue,
                Step::Optimal => break LpStatus::Optimal,
                Step::Unbounded => break LpStatus::Unbounded,
            }
        };
        let witness = self.point();
        let objective = (status == LpStatus::Optimal).then(|| sys.objective_value(&witness));
        LpOutcome { status, witness: Some(witness), objective }
    }

    /// One simplex iteration restricted to columns `< limit`.
    fn step(&mut self, limit: usize) -> Step {
        let entering = match self.rule {
            Rule::Bland => (0..limit).find(|&j| self.cost[j].is_negative()),
            Rule::Dantzig => {
                let mut best: Option<usize> = None;
                for j in 0..limit {
                    if self.cost[j].is_negative() && best.is_none_or(|b| self.cost[j] < self.cost[b]) {
                        best = Some(j);
                    }
                }
                best
            }
        };
        let Some(col) = entering else {
            return Step::Optimal;
        };

        let rhs = self.num_cols;
        let mut leaving: Option<(usize, Rational)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if !row[col].is_positive() {
                continue;
            }
            let ratio = &row[rhs] / &row[col];
            let better = match &leaving {
                None => true,
                Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
            };
            if better {
                leaving = Some((i, ratio));
            }
        }
        let Some((row, ratio)) = leaving else {
            return Step::Unbounded;
        };
        if ratio.is_zero() {
            self.degenerate_run += 1;
            if self.degenerate_run >= DEGENERATE_RUN_LIMIT {
                self.rule = Rule::Bland;
            }
        } else {
            self.degenerate_run = 0;
        }
        self.pivot(row, col);
        Step::Pivoted
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let support: Vec<usize> = (0..=self.num_cols).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for &j in &support {
                row[j].sub_mul_assign(&factor, &pivot_row[j]);
            }
        }
        if !self.cost[c].is_zero() {
            let factor = self.cost[c].clone();
            for &j in &support {
                self.cost[j].sub_mul_assign(&factor, &pivot_row[j]);
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// After a feasible phase 1, pivots zero-level artificials out of the
    /// basis and drops rows that turn out to be redundant.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.rows.swap_remove(i);
                    self.basis.swap_remove(i);
                }
            }
        }
    }

    fn install_objective(&mut self, objective: &[Rational]) {
        let mut c = vec![Rational::zero(); self.num_cols];
        for (j, coef) in objective.iter().enumerate() {
            let (plus, minus) = self.columns[j];
            c[plus] = coef.clone();
            if let Some(m) = minus {
                c[m] = -coef;
            }
        }
        let mut cost: Vec<Rational> = c.iter().map(|v| -v).collect();
        cost.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for (k, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    cost[k] += &(cb * v);
                }
            }
        }
        self.cost = cost;
    }

    fn point(&self) -> Vec<Rational> {
        let mut raw = vec![Rational::zero(); self.num_cols];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            raw[b] = row[self.num_cols].clone();
        }
        self.columns
            .iter()
            .map(|&(plus, minus)| match minus {
                Some(m) => &raw[plus] - &raw[m],
                None => raw[plus].clone(),
            })
            .collect()
    }
}

/// Result of a conic membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    /// Nonnegative weights with `Σ λ_k ray_k = target`, when a member.
    pub coefficients: Option<Vec<Rational>>,
}

fn check_rays<R: AsRef<[Rational]>>(dim: usize, rays: &[R]) -> Result<()> {
    for (row, r) in rays.iter().enumerate() {
        if r.as_ref().len() != dim {
            return Err(Error::DimensionMismatch { row, expected: dim, actual: r.as_ref().len() });
        }
    }
    Ok(())
}

/// For each coordinate, a ray that is a positive multiple of its unit vector,
/// if every coordinate has one.
fn unit_rays<R: AsRef<[Rational]>>(dim: usize, rays: &[R]) -> Option<Vec<(usize, Rational)>> {
    let mut found: Vec<Option<(usize, Rational)>> = vec![None; dim];
    for (k, r) in rays.iter().enumerate() {
        let r = r.as_ref();
        let mut nonzero = r.iter().enumerate().filter(|(_, v)| !v.is_zero());
        if let (Some((x, v)), None) = (nonzero.next(), nonzero.next()) {
            if v.is_positive() && found[x].is_none() {
                found[x] = Some((k, v.clone()));
            }
        }
    }
    found.into_iter().collect()
}

fn has_negative(r: &[Rational]) -> bool {
    r.iter().any(Rational::is_negative)
}

/// Decides `target ∈ {Σ λ_k ray_k : λ ≥ 0}` for a nonzero target.
///
/// When the rays include a positive multiple of every unit vector, the test
/// becomes `Σ λ_k ray_k ≤ target` over the rays with a negative entry, the
/// other rays being redundant.
pub fn conic_membership<R: AsRef<[Rational]>>(target: &[Rational], rays: &[R]) -> Result<Membership> {
    let dim = target.len();
    check_rays(dim, rays)?;
    if target.iter().all(Zero::is_zero) {
        return Err(Error::ZeroTarget);
    }
    let not_member = Membership { member: false, coefficients: None };

    if let Some(units) = unit_rays(dim, rays) {
        let active: Vec<usize> = (0..rays.len()).filter(|&k| has_negative(rays[k].as_ref())).collect();
        let mut sys = LinearSystem::new(active.len());
        for (x, t) in target.iter().enumerate() {
            let coeffs: Vec<Rational> = active.iter().map(|&k| rays[k].as_ref()[x].clone()).collect();
            if coeffs.iter().all(Zero::is_zero) {
                if t.is_negative() {
                    return Ok(not_member);
                }
                continue;
            }
            sys.constrain(coeffs, Relation::Le, t.clone());
        }
        let outcome = solve(&sys)?;
        if outcome.status == LpStatus::Infeasible {
            return Ok(not_member);
        }
        let lambda = outcome.witness.expect("feasible");
        let mut coefficients = vec![Rational::zero(); rays.len()];
        let mut residual = target.to_vec();
        for (&k, l) in active.iter().zip(&lambda) {
            if l.is_zero() {
                continue;
            }
            for (res, v) in residual.iter_mut().zip(rays[k].as_ref()) {
                res.sub_mul_assign(l, v);
            }
            coefficients[k] = l.clone();
        }
        for (x, res) in residual.iter().enumerate() {
            if !res.is_zero() {
                let (k, scale) = &units[x];
                coefficients[*k] += &(res / scale);
            }
        }
        return Ok(Membership { member: true, coefficients: Some(coefficients) });
    }

    let mut sys = LinearSystem::new(rays.len());
    for (x, t) in target.iter().enumerate() {
        let coeffs: Vec<Rational> = rays.iter().map(|r| r.as_ref()[x].clone()).collect();
        if coeffs.iter().all(Zero::is_zero) {
            if !t.is_zero() {
                return Ok(not_member);
            }
            continue;
        }
        sys.constrain(coeffs, Relation::Eq, t.clone());
    }
    let outcome = solve(&sys)?;
    match outcome.status {
        LpStatus::Infeasible => Ok(not_member),
        _ => Ok(Membership { member: true, coefficients: outcome.witness }),
    }
}

/// A convex combination of the rays (weights summing to one) that vanishes,
/// if one exists.
pub fn zero_combination<R: AsRef<[Rational]>>(rays: &[R]) -> Result<Option<Vec<Rational>>> {
    let Some(first) = rays.first() else {
        return Ok(None);
    };
    let dim = first.as_ref().len();
    check_rays(dim, rays)?;

    // With every unit vector present (up to scale), a vanishing combination
    // must put weight on some other ray; the unit rays absorb the slack.
    if let Some(units) = unit_rays(dim, rays) {
        let unit_set: Vec<bool> = {
            let mut s = vec![false; rays.len()];
            for (k, _) in &units {
                s[*k] = true;
            }
            s
        };
        let others: Vec<usize> = (0..rays.len()).filter(|&k| !unit_set[k]).collect();
        if others.is_empty() {
            return Ok(None);
        }
        let mut sys = LinearSystem::new(others.len());
        for x in 0..dim {
            let coeffs: Vec<Rational> = others.iter().map(|&k| rays[k].as_ref()[x].clone()).collect();
            // rows without a positive entry hold automatically
            if coeffs.iter().any(Rational::is_positive) {
                sys.constrain(coeffs, Relation::Le, Rational::zero());
            }
        }
        sys.constrain(vec![Rational::one(); others.len()], Relation::Eq, Rational::one());
        let outcome = solve(&sys)?;
        if outcome.status == LpStatus::Infeasible {
            return Ok(None);
        }
        let lambda = outcome.witness.expect("feasible");
        let mut weights = vec![Rational::zero(); rays.len()];
        let mut residual = vec![Rational::zero(); dim];
        for (&k, l) in others.iter().zip(&lambda) {
            for (res, v) in residual.iter_mut().zip(rays[k].as_ref()) {
                res.sub_mul_assign(l, v);
            }
            weights[k] = l.clone();
        }
        for (x, res) in residual.iter().enumerate() {
            if !res.is_zero() {
                let (k, scale) = &units[x];
                weights[*k] = res / scale;
            }
        }
        let total: Rational = weights.iter().sum();
        let inv = total.recip();
        return Ok(Some(weights.into_iter().map(|w| w * &inv).collect()));
    }

    let mut sys = LinearSystem::new(rays.len());
    for x in 0..dim {
        let coeffs: Vec<Rational> = rays.iter().map(|r| r.as_ref()[x].clone()).collect();
        if coeffs.iter().all(Zero::is_zero) {
            continue;
        }
        sys.constrain(coeffs, Relation::Eq, Rational::zero());
    }
    sys.constrain(vec![Rational::one(); rays.len()], Relation::Eq, Rational::one());
    let outcome = solve(&sys)?;
    Ok(match outcome.status {
        LpStatus::Infeasible => None,
        _ => outcome.witness,
    })
}

/// True iff some nontrivial nonnegative combination of the rays is zero.
pub fn contains_zero<R: AsRef<[Rational]>>(rays: &[R]) -> Result<bool> {
    Ok(zero_combination(rays)?.is_some())
}

/// The value of `sup { μ : target - μ·shift ∈ posi(rays ∪ unit vectors) }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Supremum {
    Finite(Rational),
    Unbounded,
    /// No `μ` at all qualifies.
    Empty,
}

/// Largest `μ` with `target - μ·shift = Σ λ_k ray_k + slack`, `λ ≥ 0`,
/// `slack ≥ 0`. Rays without a negative entry are absorbed by the slack and
/// dropped.
pub fn max_shift<R: AsRef<[Rational]>>(target: &[Rational], shift: &[Rational], rays: &[R]) -> Result<Supremum> {
    let dim = target.len();
    check_rays(dim, rays)?;
    if shift.len() != dim {
        return Err(Error::DimensionMismatch { row: 0, expected: dim, actual: shift.len() });
    }
    let active: Vec<usize> = (0..rays.len()).filter(|&k| has_negative(rays[k].as_ref())).collect();
    let mu = active.len();
    let mut sys = LinearSystem::new(mu + 1);
    sys.set_free(mu);
    for x in 0..dim {
        let mut row: Vec<Rational> = active.iter().map(|&k| rays[k].as_ref()[x].clone()).collect();
        row.push(shift[x].clone());
        if row.iter().all(Zero::is_zero) {
            if target[x].is_negative() {
                return Ok(Supremum::Empty);
            }
            continue;
        }
        sys.constrain(row, Relation::Le, target[x].clone());
    }
    let mut objective = vec![Rational::zero(); mu + 1];
    objective[mu] = Rational::one();
    sys.maximize(objective);
    let outcome = solve(&sys)?;
    Ok(match outcome.status {
        LpStatus::Optimal => Supremum::Finite(outcome.objective.expect("optimal")),
        LpStatus::Unbounded => Supremum::Unbounded,
        LpStatus::Infeasible => Supremum::Empty,
    })
}

/// A functional `w` with `w·target = -1` and `w·ray ≥ 0` for every ray,
/// which exists exactly when `target` lies outside the cone.
pub fn separating_functional<R: AsRef<[Rational]>>(target: &[Rational], rays: &[R]) -> Result<Option<Vec<Rational>>> {
    let dim = target.len();
    check_rays(dim, rays)?;
    let mut sys = LinearSystem::new(dim);
    for j in 0..dim {
        sys.set_free(j);
    }
    for r in rays {
        sys.constrain(r.as_ref().to_vec(), Relation::Ge, Rational::zero());
    }
    sys.constrain(target.to_vec(), Relation::Ge, -Rational::one());
    sys.maximize(target.iter().map(|v| -v).collect());
    let outcome = solve(&sys)?;
    match (outcome.status, outcome.objective) {
        (LpStatus::Optimal, Some(v)) if v.is_positive() => Ok(outcome.witness),
        _ => Ok(None),
    }
}
