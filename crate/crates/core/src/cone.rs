//! Finitely generated sets of desirable gambles.
//!
//! An [`AssessmentCone`] stores an assessment `A` and represents its natural
//! extension, the positive hull of `A` together with every positive gamble.
//! On a finite space the positive gambles are generated by the singleton
//! indicators, so every query is a linear program over `A` plus those
//! indicators.

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamble::{Gamble, Sign};
use crate::lp::{self, LinearSystem, LpStatus, Relation, Supremum};
use crate::rational::Rational;
use crate::sample;
use crate::space::Scope;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssessmentCone {
    scope: Scope,
    assessment: Vec<Gamble>,
}

/// A vanishing positive combination of assessment gambles and singleton
/// indicators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeroCertificate {
    pub assessment_weights: Vec<Rational>,
    pub indicator_weights: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoherenceReport {
    pub coherent: bool,
    /// Strictly positive mass function under which every assessment gamble
    /// has strictly positive expectation.
    pub witness: Option<Vec<Rational>>,
    pub certificate: Option<ZeroCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignDiagnostics {
    pub checked: usize,
    /// First nonpositive gamble found to be desirable.
    pub violation: Option<Gamble>,
}

impl AssessmentCone {
    pub fn new(scope: Scope, assessment: Vec<Gamble>) -> Result<AssessmentCone> {
        for g in &assessment {
            if g.scope() != &scope {
                return Err(Error::SpaceMismatch { expected: scope.to_string(), actual: g.scope().to_string() });
            }
            if g.is_zero() {
                return Err(Error::ZeroGamble);
            }
        }
        Ok(AssessmentCone { scope, assessment })
    }

    /// The cone of all positive gambles.
    pub fn vacuous(scope: Scope) -> AssessmentCone {
        AssessmentCone { scope, assessment: Vec::new() }
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn assessment(&self) -> &[Gamble] {
        &self.assessment
    }

    pub fn size(&self) -> usize {
        self.scope.cardinality()
    }

    fn indicator(&self, x: usize) -> Vec<Rational> {
        let mut e = vec![Rational::zero(); self.size()];
        e[x] = Rational::one();
        e
    }

    /// Assessment gambles followed by the singleton indicators.
    pub fn rays(&self) -> Vec<Vec<Rational>> {
        let mut rays: Vec<Vec<Rational>> = self.assessment.iter().map(|g| g.table().to_vec()).collect();
        rays.extend((0..self.size()).map(|x| self.indicator(x)));
        rays
    }

    fn check_scope(&self, f: &Gamble) -> Result<()> {
        if f.scope() != &self.scope {
            return Err(Error::SpaceMismatch { expected: self.scope.to_string(), actual: f.scope().to_string() });
        }
        Ok(())
    }

    /// Decides whether zero lies outside the natural extension by maximising
    /// the smallest margin `ε` over mass functions `p`:
    /// `E_p(f) ≥ ε` for every assessed `f`, `p(x) ≥ ε`, `Σ p = 1`.
    pub fn is_coherent(&self) -> Result<CoherenceReport> {
        let n = self.size();
        let eps = n;
        let mut sys = LinearSystem::new(n + 1);
        for g in &self.assessment {
            let mut row: Vec<Rational> = g.table().to_vec();
            row.push(-Rational::one());
            sys.constrain(row, Relation::Ge, Rational::zero());
        }
        for x in 0..n {
            let mut row = vec![Rational::zero(); n + 1];
            row[x] = Rational::one();
            row[eps] = -Rational::one();
            sys.constrain(row, Relation::Ge, Rational::zero());
        }
        let mut total = vec![Rational::one(); n + 1];
        total[eps] = Rational::zero();
        sys.constrain(total, Relation::Eq, Rational::one());
        let mut objective = vec![Rational::zero(); n + 1];
        objective[eps] = Rational::one();
        sys.maximize(objective);

        let outcome = lp::solve(&sys)?;
        let margin = outcome.objective.clone().unwrap_or_else(Rational::zero);
        if outcome.status == LpStatus::Optimal && margin.is_positive() {
            let mut p = outcome.witness.expect("optimal");
            p.truncate(n);
            return Ok(CoherenceReport { coherent: true, witness: Some(p), certificate: None });
        }

        let weights = lp::zero_combination(&self.rays())?
            .expect("no positive-margin mass function implies a vanishing combination");
        let indicator_weights = weights[self.assessment.len()..].to_vec();
        let mut assessment_weights = weights;
        assessment_weights.truncate(self.assessment.len());
        Ok(CoherenceReport {
            coherent: false,
            witness: None,
            certificate: Some(ZeroCertificate { assessment_weights, indicator_weights }),
        })
    }

    /// Membership in the natural extension. The zero gamble is never a
    /// member.
    pub fn member(&self, f: &Gamble) -> Result<bool> {
        self.check_scope(f)?;
        if f.is_zero() {
            if lp::contains_zero(&self.rays())? {
                log::warn!("zero gamble queried against an incoherent assessment on {}", self.scope);
            }
            return Ok(false);
        }
        Ok(lp::conic_membership(f.table(), &self.rays())?.member)
    }

    /// `sup { μ : f - μ ∈ natex(A) }`, the exact optimum of the underlying
    /// linear program. Whether the supremum is attained is not decided.
    pub fn lower_prevision(&self, f: &Gamble) -> Result<Rational> {
        self.check_scope(f)?;
        if !self.is_coherent()?.coherent {
            return Err(Error::IncoherentModel);
        }
        let ones = vec![Rational::one(); self.size()];
        match lp::max_shift(f.table(), &ones, &self.assessment)? {
            Supremum::Finite(v) => Ok(v),
            _ => Err(Error::IncoherentModel),
        }
    }

    pub fn upper_prevision(&self, f: &Gamble) -> Result<Rational> {
        Ok(-self.lower_prevision(&f.negate())?)
    }

    /// Checks that no nonpositive gamble is desirable: every `-I_x`, then
    /// `samples` random nonpositive gambles.
    pub fn sign_diagnostics<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> Result<SignDiagnostics> {
        let mut checked = 0;
        let singles = self.scope.configs().map(|c| Gamble::indicator(&c, &self.scope).map(|g| g.negate()));
        for f in singles {
            let f = f?;
            checked += 1;
            if self.member(&f)? {
                return Ok(SignDiagnostics { checked, violation: Some(f) });
            }
        }
        for _ in 0..samples {
            let f = sample::nonpositive(rng, &self.scope);
            debug_assert_eq!(f.sign(), Sign::NonPositive);
            checked += 1;
            if self.member(&f)? {
                return Ok(SignDiagnostics { checked, violation: Some(f) });
            }
        }
        Ok(SignDiagnostics { checked, violation: None })
    }
}

impl CoherenceReport {
    /// Recomputes the certificate's combination; zero for a valid one.
    pub fn certificate_sum(&self, cone: &AssessmentCone) -> Option<Vec<Rational>> {
        let cert = self.certificate.as_ref()?;
        let mut sum = vec![Rational::zero(); cone.size()];
        for (w, g) in cert.assessment_weights.iter().zip(cone.assessment()) {
            for (s, v) in sum.iter_mut().zip(g.table()) {
                *s += &(w * v);
            }
        }
        for (s, w) in sum.iter_mut().zip(&cert.indicator_weights) {
            *s += w;
        }
        Some(sum)
    }
}

/// `Σ_x p(x) f(x)`.
pub fn expectation(pmf: &[Rational], f: &[Rational]) -> Rational {
    pmf.iter().zip(f).map(|(p, v)| p * v).sum()
}

/// True when `pmf` is strictly positive, sums to one and gives every
/// assessment gamble strictly positive expectation.
pub fn is_witness(cone: &AssessmentCone, pmf: &[Rational]) -> bool {
    pmf.len() == cone.size()
        && pmf.iter().all(Rational::is_positive)
        && pmf.iter().sum::<Rational>() == Rational::one()
        && cone.assessment().iter().all(|g| expectation(pmf, g.table()).is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fm_membership;
    use crate::rational::rat;
    use crate::sample;
    use proptest::prelude::*;

    fn binary() -> Scope {
        Scope::from_sizes([("x", 2)]).unwrap()
    }

    fn g(scope: &Scope, xs: &[i64]) -> Gamble {
        Gamble::new(scope.clone(), xs.iter().map(|&v| Rational::from(v)).collect()).unwrap()
    }

    fn cone(xs: &[&[i64]]) -> AssessmentCone {
        let s = binary();
        AssessmentCone::new(s.clone(), xs.iter().map(|t| g(&s, t)).collect()).unwrap()
    }

    #[test]
    fn rejects_zero_and_foreign_gambles() {
        let s = binary();
        assert!(matches!(AssessmentCone::new(s.clone(), vec![g(&s, &[0, 0])]), Err(Error::ZeroGamble)));
        let other = Scope::from_sizes([("y", 2)]).unwrap();
        assert!(matches!(AssessmentCone::new(s, vec![g(&other, &[1, 0])]), Err(Error::SpaceMismatch { .. })));
    }

    #[test]
    fn sure_loss_is_incoherent() {
        let c = cone(&[&[-1, -1]]);
        let report = c.is_coherent().unwrap();
        assert!(!report.coherent);
        assert!(report.certificate_sum(&c).unwrap().iter().all(Zero::is_zero));
        let cert = report.certificate.unwrap();
        // (-1,-1) + (1,0) + (0,1) = 0, normalised to total weight one
        assert_eq!(cert.assessment_weights, vec![rat(1, 3)]);
        assert_eq!(cert.indicator_weights, vec![rat(1, 3), rat(1, 3)]);
    }

    #[test]
    fn opposite_pair_is_incoherent() {
        let c = cone(&[&[1, -1], &[-1, 1]]);
        let report = c.is_coherent().unwrap();
        assert!(!report.coherent);
        assert!(report.certificate_sum(&c).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn single_bet_is_coherent() {
        let c = cone(&[&[1, -1]]);
        // hand-checked witness: 3/4 - 1/4 = 1/2 > 0
        let hand = vec![rat(3, 4), rat(1, 4)];
        assert_eq!(expectation(&hand, c.assessment()[0].table()), rat(1, 2));
        assert!(is_witness(&c, &hand));
        let report = c.is_coherent().unwrap();
        assert!(report.coherent);
        let p = report.witness.unwrap();
        assert!(is_witness(&c, &p));
        // the solver maximises the smallest margin, which lands on (2/3, 1/3)
        assert_eq!(p, vec![rat(2, 3), rat(1, 3)]);
    }

    #[test]
    fn membership_examples() {
        let s = binary();
        let vacuous = AssessmentCone::vacuous(s.clone());
        assert!(vacuous.member(&g(&s, &[1, 1])).unwrap());
        assert!(!vacuous.member(&g(&s, &[-1, 0])).unwrap());
        let c = cone(&[&[1, -2]]);
        assert!(c.member(&g(&s, &[1, -1])).unwrap());
        assert!(!c.member(&g(&s, &[-1, 2])).unwrap());
        assert!(!c.member(&g(&s, &[0, 0])).unwrap());
        let other = Scope::from_sizes([("y", 2)]).unwrap();
        assert!(c.member(&g(&other, &[1, 1])).is_err());
    }

    #[test]
    fn membership_agrees_with_elimination_oracle() {
        let c = cone(&[&[1, -2]]);
        for t in [[-1i64, 2], [1, -1], [1, -3], [2, -4], [-1, -1], [0, 1], [3, -7]] {
            let f: Vec<Rational> = t.iter().map(|&v| Rational::from(v)).collect();
            assert_eq!(fm_membership(&f, &c.rays()).unwrap(), c.member(&g(&binary(), &t)).unwrap(), "{t:?}");
        }
    }

    #[test]
    fn lower_previsions() {
        let s = binary();
        let vacuous = AssessmentCone::vacuous(s.clone());
        assert_eq!(vacuous.lower_prevision(&g(&s, &[3, -2])).unwrap(), rat(-2, 1));
        assert_eq!(vacuous.upper_prevision(&g(&s, &[3, -2])).unwrap(), rat(3, 1));
        let c = cone(&[&[1, -1]]);
        assert_eq!(c.lower_prevision(&Gamble::constant(s.clone(), rat(5, 1))).unwrap(), rat(5, 1));
        // (1,0) - 1/2 = 1/2·(1,-1)
        assert_eq!(c.lower_prevision(&g(&s, &[1, 0])).unwrap(), rat(1, 2));
        assert_eq!(c.upper_prevision(&g(&s, &[1, 0])).unwrap(), rat(1, 1));
        let bad = cone(&[&[-1, -1]]);
        assert!(matches!(bad.lower_prevision(&g(&s, &[1, 0])), Err(Error::IncoherentModel)));
    }

    #[test]
    fn sign_diagnostics_examples() {
        let mut rng = sample::rng(7);
        let ok = cone(&[&[1, -1]]).sign_diagnostics(0, &mut rng).unwrap();
        assert_eq!(ok.checked, 2);
        assert!(ok.violation.is_none());
        let bad = cone(&[&[-1, -1]]);
        let report = bad.sign_diagnostics(10, &mut rng).unwrap();
        assert!(report.violation.is_some());
        assert!(bad.member(&g(&binary(), &[-1, -1])).unwrap());
        let vacuous = AssessmentCone::vacuous(binary()).sign_diagnostics(20, &mut rng).unwrap();
        assert!(vacuous.violation.is_none());
    }

    fn arb_cone() -> impl Strategy<Value = AssessmentCone> {
        (1usize..5).prop_flat_map(|n| {
            let entry = (-3i64..=3, 1i64..=4).prop_map(|(p, q)| rat(p, q));
            proptest::collection::vec(proptest::collection::vec(entry, n), 0..4).prop_map(move |rows| {
                let s = Scope::from_sizes([("x", n)]).unwrap();
                let gambles = rows
                    .into_iter()
                    .filter(|t| t.iter().any(|v| !v.is_zero()))
                    .map(|t| Gamble::new(s.clone(), t).unwrap())
                    .collect();
                AssessmentCone::new(s, gambles).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn closure_under_scaling_and_sums(c in arb_cone(), seed in any::<u64>()) {
            let mut rng = sample::rng(seed);
            let f = sample::gamble(&mut rng, c.scope());
            let h = sample::gamble(&mut rng, c.scope());
            let lambda = sample::weight(&mut rng);
            let fm = c.member(&f).unwrap();
            if fm {
                prop_assert!(c.member(&f.scale(&lambda)).unwrap());
                let sum = f.add(&h);
                if c.member(&h).unwrap() && !sum.is_zero() {
                    prop_assert!(c.member(&sum).unwrap());
                }
            }
            let pos = sample::positive(&mut rng, c.scope());
            prop_assert!(c.member(&pos).unwrap());
        }

        #[test]
        fn coherent_cones_reject_nonpositive_and_contradictions(c in arb_cone(), seed in any::<u64>()) {
            let report = c.is_coherent().unwrap();
            if report.coherent {
                prop_assert!(is_witness(&c, report.witness.as_ref().unwrap()));
                let mut rng = sample::rng(seed);
                let neg = sample::nonpositive(&mut rng, c.scope());
                prop_assert!(!c.member(&neg).unwrap());
                let f = sample::gamble(&mut rng, c.scope());
                prop_assert!(!(c.member(&f).unwrap() && c.member(&f.negate()).unwrap()));
            } else {
                prop_assert!(report.certificate_sum(&c).unwrap().iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn redundant_generators_change_nothing(c in arb_cone(), seed in any::<u64>()) {
            prop_assume!(!c.assessment().is_empty());
            let mut rng = sample::rng(seed);
            let mut combo = Gamble::zero(c.scope().clone());
            for a in c.assessment() {
                combo = combo.add(&a.scale(&sample::weight(&mut rng)));
            }
            prop_assume!(!combo.is_zero());
            let mut more = c.assessment().to_vec();
            more.push(combo);
            let bigger = AssessmentCone::new(c.scope().clone(), more).unwrap();
            for _ in 0..4 {
                let f = sample::gamble(&mut rng, c.scope());
                prop_assert_eq!(c.member(&f).unwrap(), bigger.member(&f).unwrap());
            }
        }
    }
}
