//! Exact gambles on finite configuration spaces.

use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::{Configuration, Scope};

/// Sign classification of a gamble against the zero gamble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    /// `f ≥ 0` and `f ≠ 0`.
    StrictlyPositive,
    /// `f ≤ 0` and `f ≠ 0`.
    NonPositive,
    Zero,
    Mixed,
}

/// A rational-valued map on the configurations of a scope, stored densely in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gamble {
    scope: Scope,
    table: Vec<Rational>,
}

impl Gamble {
    pub fn new(scope: Scope, table: Vec<Rational>) -> Result<Gamble> {
        let expected = scope.cardinality();
        if table.len() != expected {
            return Err(Error::TableLength { expected, actual: table.len() });
        }
        Ok(Gamble { scope, table })
    }

    pub fn constant(scope: Scope, value: Rational) -> Gamble {
        let table = vec![value; scope.cardinality()];
        Gamble { scope, table }
    }

    pub fn zero(scope: Scope) -> Gamble {
        Gamble::constant(scope, Rational::zero())
    }

    /// The indicator of `config`, cylindrically extended to `target`.
    /// The empty configuration yields the constant 1.
    pub fn indicator(config: &Configuration, target: &Scope) -> Result<Gamble> {
        let local = config.scope();
        if !local.is_subset(target) {
            return Err(Error::ScopeNotContained { inner: local.to_string(), outer: target.to_string() });
        }
        let hit = config.index();
        let table = target
            .projection_map(local)
            .into_iter()
            .map(|i| if i == hit { Rational::one() } else { Rational::zero() })
            .collect();
        Ok(Gamble { scope: target.clone(), table })
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn into_table(self) -> Vec<Rational> {
        self.table
    }

    pub fn value(&self, config: &Configuration) -> Result<&Rational> {
        let local = config.restrict(&self.scope)?;
        Ok(&self.table[local.index()])
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(Zero::is_zero)
    }

    /// Cylindrical extension: `result(x_target) = self(x_scope)`.
    pub fn extend(&self, target: &Scope) -> Result<Gamble> {
        if !self.scope.is_subset(target) {
            return Err(Error::ScopeNotContained { inner: self.scope.to_string(), outer: target.to_string() });
        }
        if &self.scope == target {
            return Ok(self.clone());
        }
        let table = target.projection_map(&self.scope).into_iter().map(|i| self.table[i].clone()).collect();
        Ok(Gamble { scope: target.clone(), table })
    }

    /// Applies `op` pointwise after extending both operands to the union scope.
    fn zip_with(&self, other: &Gamble, op: impl Fn(&Rational, &Rational) -> Rational) -> Gamble {
        let (left, right);
        let (l, r) = if self.scope == other.scope {
            (self, other)
        } else {
            let union = self.scope.union(&other.scope);
            left = self.extend(&union).expect("subset of union");
            right = other.extend(&union).expect("subset of union");
            (&left, &right)
        };
        let table = l.table.iter().zip(&r.table).map(|(a, b)| op(a, b)).collect();
        Gamble { scope: l.scope.clone(), table }
    }

    pub fn add(&self, other: &Gamble) -> Gamble {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Gamble) -> Gamble {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Gamble) -> Gamble {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, factor: &Rational) -> Gamble {
        Gamble { scope: self.scope.clone(), table: self.table.iter().map(|v| v * factor).collect() }
    }

    pub fn negate(&self) -> Gamble {
        Gamble { scope: self.scope.clone(), table: self.table.iter().map(|v| -v).collect() }
    }

    /// `self - c` for a constant `c`.
    pub fn shift(&self, c: &Rational) -> Gamble {
        Gamble { scope: self.scope.clone(), table: self.table.iter().map(|v| v - c).collect() }
    }

    pub fn min_value(&self) -> &Rational {
        self.table.iter().min().expect("scopes have at least one configuration")
    }

    pub fn max_value(&self) -> &Rational {
        self.table.iter().max().expect("scopes have at least one configuration")
    }

    pub fn sign(&self) -> Sign {
        let pos = self.table.iter().any(Rational::is_positive);
        let neg = self.table.iter().any(Rational::is_negative);
        match (pos, neg) {
            (false, false) => Sign::Zero,
            (true, false) => Sign::StrictlyPositive,
            (false, true) => Sign::NonPositive,
            (true, true) => Sign::Mixed,
        }
    }
}

impl AsRef<[Rational]> for Gamble {
    fn as_ref(&self) -> &[Rational] {
        &self.table
    }
}

impl Add for &Gamble {
    type Output = Gamble;
    fn add(self, rhs: &Gamble) -> Gamble {
        Gamble::add(self, rhs)
    }
}

impl Sub for &Gamble {
    type Output = Gamble;
    fn sub(self, rhs: &Gamble) -> Gamble {
        Gamble::sub(self, rhs)
    }
}

impl Neg for &Gamble {
    type Output = Gamble;
    fn neg(self) -> Gamble {
        self.negate()
    }
}
