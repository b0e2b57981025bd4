//! Exact truncated formal power series.
//!
//! A [`Series`] is generic over its coefficient ring. Two rings are used
//! throughout the crate: plain rationals ([`Coefficient`], giving
//! [`TruncatedSeries`]) and sparse polynomials in marking variables
//! ([`MarkPolynomial`], giving [`PolySeries`]). Every operation is exact.

mod poly;
mod solve;
mod truncated;

pub use poly::{MarkPolynomial, Marks};
pub use solve::{fixed_point_solve, Factor, ProductEquation, ProductSystem};
pub use truncated::{inflate, PolySeries, Series, TruncatedSeries};

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational coefficient, always kept in lowest terms with a positive
/// denominator.
pub type Coefficient = BigRational;

/// Shorthand for an integral coefficient.
pub fn coef(n: i64) -> Coefficient {
    Coefficient::from_integer(BigInt::from(n))
}

/// Shorthand for the coefficient `num/den`.
pub fn ratio(num: i64, den: i64) -> Coefficient {
    Coefficient::new(BigInt::from(num), BigInt::from(den))
}

/// Extracts an integer from a coefficient, failing if it has a denominator.
pub fn to_integer(c: &Coefficient) -> Result<BigInt> {
    if c.is_integer() {
        Ok(c.to_integer())
    } else {
        Err(Error::NotIntegral(c.to_string()))
    }
}

/// Coefficient ring of a [`Series`].
///
/// `Ctx` carries whatever an element needs to know to build zeros and ones
/// (nothing for rationals, the variable list for mark polynomials).
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    type Ctx: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn zero_in(ctx: &Self::Ctx) -> Self;
    fn from_scalar(ctx: &Self::Ctx, c: Coefficient) -> Self;
    fn one_in(ctx: &Self::Ctx) -> Self {
        Self::from_scalar(ctx, Coefficient::one())
    }

    fn vanishes(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn sub_assign(&mut self, other: &Self);
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &Coefficient) -> Self;

    /// `self += a * b`, without materialising the product where possible.
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        let p = a.mul(b);
        self.add_assign(&p);
    }

    /// The element as a scalar, if it is one.
    fn as_scalar(&self) -> Option<Coefficient>;

    fn is_identity(&self) -> bool {
        self.as_scalar().is_some_and(|c| c.is_one())
    }
}

impl Ring for Coefficient {
    type Ctx = ();

    fn ctx(&self) {}
    fn zero_in(_: &()) -> Self {
        Coefficient::zero()
    }
    fn from_scalar(_: &(), c: Coefficient) -> Self {
        c
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &Coefficient) -> Self {
        self * c
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if !Zero::is_zero(a) && !Zero::is_zero(b) {
            *self += a * b;
        }
    }
    fn as_scalar(&self) -> Option<Coefficient> {
        Some(self.clone())
    }
}

/// True when every coefficient is a nonnegative rational.
pub fn is_nonnegative(s: &TruncatedSeries) -> bool {
    s.coeffs().iter().all(|c| !c.is_negative())
}

/// Outcome of comparing two sides of a series identity.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub order: usize,
    /// First power of `z` where the sides differ.
    pub first_mismatch: Option<usize>,
}

impl IdentityCheck {
    pub fn compare<C: Ring>(name: impl Into<String>, lhs: &Series<C>, rhs: &Series<C>) -> Self {
        IdentityCheck {
            name: name.into(),
            order: lhs.order().min(rhs.order()),
            first_mismatch: lhs.first_difference(rhs),
        }
    }

    pub fn holds(&self) -> bool {
        self.first_mismatch.is_none()
    }

    /// Turns a failed check into a consistency error.
    pub fn into_result(self) -> Result<()> {
        match self.first_mismatch {
            None => Ok(()),
            Some(n) => Err(Error::Consistency(format!("{} fails at z^{n}", self.name))),
        }
    }
}
