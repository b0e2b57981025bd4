//! Characteristic polynomials of step sets, their small roots, and the
//! formal solution family for `(2d+1)`-ary trees with increments `-d..=d`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{
    coef, fixed_point_solve, ratio, IdentityCheck, MarkPolynomial, Marks, PolySeries, Ring, TruncatedSeries,
};
use crate::ternary::{series_t, series_x};
use crate::trees::StepSet;

/// A Laurent polynomial in `X` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    pub terms: BTreeMap<i64, i64>,
}

impl LaurentPoly {
    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// `P(1/X)`.
    pub fn reflect(&self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(&e, &c)| (-e, c)).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.reflect()
    }

    /// `X^shift P(X)` evaluated at a power series, `shift` large enough
    /// that no negative power remains.
    pub fn eval_shifted(&self, x: &TruncatedSeries, shift: i64) -> Result<TruncatedSeries> {
        let mut out = TruncatedSeries::zero(&(), x.order());
        for (&e, &c) in &self.terms {
            let k = e + shift;
            if k < 0 {
                return Err(Error::InvalidArgument(format!("shift {shift} leaves X^{k}")));
            }
            out = out.try_add(&x.pow(k as u32).scale(&coef(c)))?;
        }
        Ok(out)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&e, &c)| {
                let mono = match e {
                    0 => String::new(),
                    1 => "X".to_string(),
                    e => format!("X^{e}"),
                };
                match (c, mono.is_empty()) {
                    (c, true) => c.to_string(),
                    (1, false) => mono,
                    (c, false) => format!("{c}*{mono}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `P(X) = sum_l X^(b_l)`.
pub fn characteristic_poly(steps: &StepSet) -> LaurentPoly {
    let mut terms = BTreeMap::new();
    for &b in steps.increments() {
        *terms.entry(b).or_insert(0) += 1;
    }
    LaurentPoly { terms }
}

/// `1 - z T^(|S|-1) P(X) = 0` for a step set, with `T` the tree series of
/// the matching arity.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicEquation {
    pub steps: StepSet,
    pub p: LaurentPoly,
    pub t: TruncatedSeries,
}

impl CharacteristicEquation {
    pub fn new(steps: &StepSet, order: usize) -> Result<Self> {
        Ok(CharacteristicEquation {
            steps: steps.clone(),
            p: characteristic_poly(steps),
            t: series_t(steps.arity(), order)?,
        })
    }

    /// `X^k - z T^(d-1) X^k P(X)` with `k = -min(b)`, which vanishes exactly
    /// when `X` is a root.
    pub fn residual(&self, x: &TruncatedSeries) -> Result<TruncatedSeries> {
        let k = -self.p.min_exponent().unwrap_or(0).min(0);
        let rhs = self
            .t
            .pow(self.steps.arity() as u32 - 1)
            .try_mul(&self.p.eval_shifted(x, k)?)?
            .shift_up(1);
        x.pow(k as u32).try_sub(&rhs)
    }
}

/// The small root of the binary characteristic equation, `X = z T (1 + X^2)`.
pub fn binary_x(order: usize) -> Result<TruncatedSeries> {
    let t = series_t(2, order)?;
    let f = |x: &TruncatedSeries| t.try_mul(&x.pow(2).one_plus()).map(|s| s.shift_up(1));
    fixed_point_solve(f, &TruncatedSeries::zero(&(), 0), order)
}

/// Outcome of substituting the small root into the characteristic equation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharRootReport {
    pub steps: Vec<i64>,
    pub order: usize,
    /// Valuation of the residual, `None` when it vanishes to `order`.
    pub residual_valuation: Option<usize>,
}

impl CharRootReport {
    pub fn holds(&self) -> bool {
        self.residual_valuation.is_none()
    }
}

/// Checks that the series `X` solves the characteristic equation, for the
/// ternary and binary step sets.
pub fn verify_char_root(steps: &StepSet, order: usize) -> Result<CharRootReport> {
    let x = if *steps == StepSet::ternary() {
        series_x(order)?
    } else if *steps == StepSet::binary() {
        binary_x(order)?
    } else {
        return Err(Error::InvalidArgument(format!(
            "no power-series root known for steps {:?}",
            steps.increments()
        )));
    };
    let eq = CharacteristicEquation::new(steps, order)?;
    let r = eq.residual(&x)?;
    Ok(CharRootReport {
        steps: steps.increments().to_vec(),
        order,
        residual_valuation: (!r.is_zero()).then(|| r.valuation()),
    })
}

/// Outcome of substituting the formal family into the `(2d+1)`-ary system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormalFamilyReport {
    pub d: usize,
    /// Truncation order in `w = z^(1/d)`.
    pub order: usize,
    pub lambda_degree: u32,
    pub js: Vec<i64>,
    /// First `(j, power of w, power of lambda)` where the system fails.
    pub first_mismatch: Option<(i64, usize, u32)>,
}

impl FormalFamilyReport {
    pub fn holds(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// `a(w^d)` from `a(z)`, truncated at `w^order`.
fn in_root_variable(a: &TruncatedSeries, d: usize, order: usize) -> TruncatedSeries {
    let mut c = vec![coef(0); order + 1];
    for (n, v) in a.coeffs().iter().enumerate() {
        if n * d <= order {
            c[n * d] = v.clone();
        }
    }
    TruncatedSeries::new((), c)
}

/// The root of `X^d = z T^(2d) (1 + X + ... + X^(2d))` with `X ~ z^(1/d)`, as a
/// series in `w = z^(1/d)`.
pub fn odd_root_series(d: usize, order: usize) -> Result<TruncatedSeries> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let t = in_root_variable(&series_t(2 * d + 1, order / d)?, d, order);
    let t2 = t.pow(2);
    let alpha = ratio(1, d as i64);
    let f = |x: &TruncatedSeries| -> Result<TruncatedSeries> {
        let mut p = TruncatedSeries::one(&(), x.order());
        for i in 1..=2 * d as u32 {
            p = p.try_add(&x.pow(i))?;
        }
        Ok(t2.try_mul(&p.pow_rational(&alpha)?)?.shift_up(1))
    };
    fixed_point_solve(f, &TruncatedSeries::zero(&(), 0), order)
}

/// Substitutes `T_j = T (1 - l X^(d+1+j))(1 - l X^(2d+3+j)) / ((1 - l X^(d+2+j))(1 - l X^(2d+2+j)))`
/// into `T_j = 1 + z prod_{k=-d}^{d} T_{j+k}` for `j = 0..=2d`, working in
/// `w = z^(1/d)` to `w^order` and modulo `l^(lambda_degree+1)`.
pub fn formal_family_check(d: usize, order: usize, lambda_degree: u32) -> Result<FormalFamilyReport> {
    formal_family_check_with_root(d, &odd_root_series(d, order)?, lambda_degree)
}

/// [`formal_family_check`] with a caller-supplied root series in `w`.
pub fn formal_family_check_with_root(d: usize, x: &TruncatedSeries, lambda_degree: u32) -> Result<FormalFamilyReport> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let order = x.order();
    let t = in_root_variable(&series_t(2 * d + 1, order / d)?, d, order);
    let marks = Marks::new(&["lambda"]);
    let lambda = MarkPolynomial::variable(&marks, 0);
    let js: Vec<i64> = (0..=2 * d as i64).collect();
    let max_power = 2 * d + 3 + 3 * d;
    let mut x_powers = vec![TruncatedSeries::one(&(), order)];
    for _ in 0..max_power {
        let next = x_powers.last().expect("nonempty").try_mul(x)?;
        x_powers.push(next);
    }
    let cut = |s: PolySeries| s.truncate_degree(0, lambda_degree);
    let linear = |k: usize| x_powers[k].to_poly(&marks).mul_coeff(&lambda);
    let geometric = |k: usize| -> Result<PolySeries> {
        let y = linear(k);
        let mut term = PolySeries::one(&marks, order);
        let mut sum = term.clone();
        for _ in 0..lambda_degree {
            term = cut(term.try_mul(&y)?);
            sum = sum.try_add(&term)?;
        }
        Ok(sum)
    };
    let member = |j: i64| -> Result<PolySeries> {
        let k = |off: usize| (j + off as i64) as usize;
        let mut s = t.to_poly(&marks);
        s = cut(s.try_mul(&linear(k(d + 1)).neg().one_plus())?);
        s = cut(s.try_mul(&linear(k(2 * d + 3)).neg().one_plus())?);
        s = cut(s.try_mul(&geometric(k(d + 2))?)?);
        Ok(cut(s.try_mul(&geometric(k(2 * d + 2))?)?))
    };
    let mut members = BTreeMap::new();
    for j in -(d as i64)..=3 * d as i64 {
        members.insert(j, member(j)?);
    }
    let mut first_mismatch = None;
    for &j in &js {
        let mut prod = PolySeries::one(&marks, order);
        for k in -(d as i64)..=d as i64 {
            prod = cut(prod.try_mul(&members[&(j + k)])?);
        }
        let rhs = prod.shift_up(d).one_plus();
        let lhs = &members[&j];
        if let Some(n) = lhs.first_difference(&rhs) {
            let mut diff = lhs.coeff(n).clone();
            diff.sub_assign(rhs.coeff(n));
            let power = diff.terms().map(|(e, _)| e[0]).min().unwrap_or(0);
            first_mismatch = Some((j, n, power));
            break;
        }
    }
    Ok(FormalFamilyReport {
        d,
        order,
        lambda_degree,
        js,
        first_mismatch,
    })
}

/// Checks that the ternary root is the Motzkin root `M(t) = t (1 + M + M^2)`
/// composed with `t = z T^2`.
pub fn motzkin_composition(order: usize) -> Result<IdentityCheck> {
    let m = fixed_point_solve(
        |m: &TruncatedSeries| m.try_add(&m.pow(2)).map(|s| s.one_plus().shift_up(1)),
        &TruncatedSeries::zero(&(), 0),
        order,
    )?;
    let t = series_t(3, order)?;
    let inner = t.pow(2).shift_up(1);
    let mut composed = TruncatedSeries::zero(&(), order);
    for k in (0..=order).rev() {
        composed = composed.try_mul(&inner)?.add_constant(m.coeff(k));
    }
    Ok(IdentityCheck::compare("X = M(z T^2)", &series_x(order)?, &composed))
}
