use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{coef, Coefficient, MarkPolynomial, Marks, Ring};
use crate::error::{Error, Result};

/// Formal power series in `z` known up to and including `z^order`.
///
/// Binary operations truncate to the smaller of the two orders. The
/// operator impls (`&a + &b`, `&a * &b`, ...) panic when the coefficient
/// contexts differ; the `try_*` methods report that as an error instead.
#[derive(Clone, PartialEq)]
pub struct Series<C: Ring> {
    ctx: C::Ctx,
    coeffs: Vec<C>,
}

/// Series with rational coefficients.
pub type TruncatedSeries = Series<Coefficient>;
/// Series whose coefficients are polynomials in marking variables.
pub type PolySeries = Series<MarkPolynomial>;

impl<C: Ring> Series<C> {
    /// Builds a series of order `coeffs.len() - 1`.
    pub fn new(ctx: C::Ctx, coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least its constant term");
        Series { ctx, coeffs }
    }

    pub fn zero(ctx: &C::Ctx, order: usize) -> Self {
        Series {
            ctx: ctx.clone(),
            coeffs: vec![C::zero_in(ctx); order + 1],
        }
    }

    pub fn constant(ctx: &C::Ctx, c: C, order: usize) -> Self {
        let mut s = Self::zero(ctx, order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(ctx: &C::Ctx, order: usize) -> Self {
        Self::constant(ctx, C::one_in(ctx), order)
    }

    /// `c * z^k`, truncated at `order`.
    pub fn monomial(ctx: &C::Ctx, k: usize, c: C, order: usize) -> Self {
        let mut s = Self::zero(ctx, order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// The series `z`.
    pub fn z(ctx: &C::Ctx, order: usize) -> Self {
        Self::monomial(ctx, 1, C::one_in(ctx), order)
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Coefficient of `z^n`; panics beyond the truncation order.
    pub fn coeff(&self, n: usize) -> &C {
        assert!(
            n <= self.order(),
            "coefficient {n} beyond truncation order {}",
            self.order()
        );
        &self.coeffs[n]
    }

    /// Index of the first nonzero coefficient, or `order + 1` if there is none.
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.vanishes())
            .unwrap_or(self.coeffs.len())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation() > self.order()
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot raise precision by truncation");
        Series {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    /// Index of the first coefficient where the two series differ, compared
    /// up to the smaller order. `None` when they agree.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        let n = self.order().min(other.order());
        (0..=n).find(|&k| self.coeffs[k] != other.coeffs[k])
    }

    /// Equality up to the smaller of the two orders.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.first_difference(other).is_none()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::IncompatibleMarks {
                left: vec![format!("{:?}", self.ctx)],
                right: vec![format!("{:?}", other.ctx)],
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| {
                let mut c = self.coeffs[k].clone();
                c.add_assign(&other.coeffs[k]);
                c
            })
            .collect();
        Ok(Series {
            ctx: self.ctx.clone(),
            coeffs,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| {
                let mut c = self.coeffs[k].clone();
                c.sub_assign(&other.coeffs[k]);
                c
            })
            .collect();
        Ok(Series {
            ctx: self.ctx.clone(),
            coeffs,
        })
    }

    /// Truncated Cauchy product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.order().min(other.order());
        let mut coeffs = vec![C::zero_in(&self.ctx); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.vanishes() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.vanishes() {
                    coeffs[i + j].mul_add_assign(a, b);
                }
            }
        }
        Ok(Series {
            ctx: self.ctx.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        Series {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(Ring::neg).collect(),
        }
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        Series {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(),
        }
    }

    /// Multiplies every coefficient by the ring element `c`.
    pub fn mul_coeff(&self, c: &C) -> Self {
        Series {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        }
    }

    /// Adds the ring element `c` to the constant term.
    pub fn add_constant(&self, c: &C) -> Self {
        let mut s = self.clone();
        s.coeffs[0].add_assign(c);
        s
    }

    /// `1 + self`.
    pub fn one_plus(&self) -> Self {
        self.add_constant(&C::one_in(&self.ctx))
    }

    /// `1 - self`.
    pub fn one_minus(&self) -> Self {
        self.neg().add_constant(&C::one_in(&self.ctx))
    }

    /// Multiplies by `z^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        let mut coeffs = vec![C::zero_in(&self.ctx); n + 1];
        if k <= n {
            coeffs[k..].clone_from_slice(&self.coeffs[..=n - k]);
        }
        Series {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    /// Divides by `z^k`; the order drops by `k`. Fails unless the valuation
    /// is at least `k`.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        let v = self.valuation();
        if v < k {
            return Err(Error::InexactDivision {
                dividend: v,
                divisor: k,
            });
        }
        if k > self.order() {
            return Err(Error::PrecisionLoss { got: 0, needed: k });
        }
        Ok(Series {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Series::one(&self.ctx, self.order());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse. The constant term must be a nonzero scalar.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.coeffs[0]
            .as_scalar()
            .filter(|c| !c.vanishes())
            .ok_or_else(|| Error::NonUnitConstant(self.coeffs[0].to_string()))?;
        let inv0 = c0.recip();
        let neg_inv0 = -inv0.clone();
        let n = self.order();
        let mut r: Vec<C> = Vec::with_capacity(n + 1);
        r.push(C::from_scalar(&self.ctx, inv0));
        for m in 1..=n {
            let mut acc = C::zero_in(&self.ctx);
            for i in 1..=m {
                if !self.coeffs[i].vanishes() {
                    acc.mul_add_assign(&self.coeffs[i], &r[m - i]);
                }
            }
            r.push(acc.scale(&neg_inv0));
        }
        Ok(Series {
            ctx: self.ctx.clone(),
            coeffs: r,
        })
    }

    /// `self / other` for a divisor with a unit constant term.
    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.recip()?)
    }

    /// Exact quotient when the divisor has positive valuation `v`: both are
    /// divided by `z^v` first, so the result has order `min(orders) - v`.
    pub fn div_exact(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let v = other.valuation();
        if v > other.order() {
            return Err(Error::NonUnitConstant("0".into()));
        }
        let num = self.shift_down(v)?;
        let den = other.shift_down(v)?;
        num.try_div(&den)
    }

    /// Square root with constant term 1; the constant term of `self` must be 1.
    pub fn sqrt(&self) -> Result<Self> {
        if !self.coeffs[0].is_identity() {
            return Err(Error::SqrtConstant(self.coeffs[0].to_string()));
        }
        let half = Coefficient::new(1.into(), 2.into());
        let n = self.order();
        let mut s: Vec<C> = Vec::with_capacity(n + 1);
        s.push(C::one_in(&self.ctx));
        for m in 1..=n {
            let mut acc = self.coeffs[m].clone();
            for i in 1..m {
                let p = s[i].mul(&s[m - i]);
                acc.sub_assign(&p);
            }
            s.push(acc.scale(&half));
        }
        Ok(Series {
            ctx: self.ctx.clone(),
            coeffs: s,
        })
    }

    /// `self^alpha` for rational `alpha`, constant term 1 required; uses
    /// `n g_n = sum_{i=1}^n (alpha*i - (n - i)) f_i g_{n-i}`.
    pub fn pow_rational(&self, alpha: &Coefficient) -> Result<Self> {
        if !self.coeffs[0].is_identity() {
            return Err(Error::NonUnitConstant(format!(
                "rational power needs constant term 1, found {}",
                self.coeffs[0]
            )));
        }
        let n = self.order();
        let mut g: Vec<C> = Vec::with_capacity(n + 1);
        g.push(C::one_in(&self.ctx));
        for m in 1..=n {
            let mut acc = C::zero_in(&self.ctx);
            for i in 1..=m {
                if self.coeffs[i].vanishes() {
                    continue;
                }
                let w = alpha * coef(i as i64) - coef((m - i) as i64);
                let p = self.coeffs[i].mul(&g[m - i]).scale(&w);
                acc.add_assign(&p);
            }
            g.push(acc.scale(&coef(m as i64).recip()));
        }
        Ok(Series {
            ctx: self.ctx.clone(),
            coeffs: g,
        })
    }

    /// Applies `f` to each coefficient, producing a series over another ring.
    pub fn map<D: Ring>(&self, ctx: &D::Ctx, f: impl Fn(&C) -> D) -> Series<D> {
        Series {
            ctx: ctx.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

impl TruncatedSeries {
    /// Rational series from integer coefficients.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Series::new((), coeffs.iter().map(|&c| coef(c)).collect())
    }

    /// Embeds the series as constant-coefficient polynomials over `vars`.
    pub fn to_poly(&self, vars: &Marks) -> PolySeries {
        self.map(vars, |c| MarkPolynomial::constant(vars, c.clone()))
    }
}

impl PolySeries {
    /// Substitutes `value` for marking variable `i`, dropping it.
    pub fn specialize(&self, i: usize, value: &Coefficient) -> PolySeries {
        let vars = self.ctx().without(i);
        self.map(&vars, |p| p.specialize(i, value))
    }

    /// Substitutes `value` for the marking variable called `name`.
    pub fn specialize_named(&self, name: &str, value: &Coefficient) -> Result<PolySeries> {
        let i = self
            .ctx()
            .index_of(name)
            .ok_or_else(|| Error::InvalidArgument(format!("no marking variable `{name}`")))?;
        Ok(self.specialize(i, value))
    }

    /// Sets every marking variable to 1.
    pub fn eval_ones(&self) -> TruncatedSeries {
        self.map(&(), |p| p.eval_ones())
    }

    /// Evaluates all marking variables at `point`.
    pub fn eval_marks(&self, point: &[Coefficient]) -> TruncatedSeries {
        self.map(&(), |p| p.eval(point))
    }

    /// Substitutes `x_i + shift` for `x_i` in every coefficient.
    pub fn shift_var(&self, i: usize, shift: &Coefficient) -> PolySeries {
        let vars = self.ctx().clone();
        self.map(&vars, |p| p.shift_var(i, shift))
    }

    pub fn with_marks(&self, vars: &Marks) -> PolySeries {
        self.map(vars, |p| p.with_marks(vars))
    }

    pub fn lift(&self, target: &Marks) -> Result<PolySeries> {
        let coeffs = self
            .coeffs()
            .iter()
            .map(|p| p.lift(target))
            .collect::<Result<Vec<_>>>()?;
        Ok(Series::new(target.clone(), coeffs))
    }

    /// Largest total mark degree at each order.
    pub fn mark_degrees(&self) -> Vec<Option<u32>> {
        self.coeffs().iter().map(|p| p.total_degree()).collect()
    }

    /// Drops every term whose degree in variable `i` exceeds `max`.
    pub fn truncate_degree(&self, i: usize, max: u32) -> PolySeries {
        let vars = self.ctx().clone();
        self.map(&vars, |p| {
            MarkPolynomial::from_terms(
                &vars,
                p.terms()
                    .filter(|(e, _)| e[i] <= max)
                    .map(|(e, c)| (e.to_vec(), c.clone())),
            )
        })
    }
}

/// `a(z * u^step)` as a series in `z` with a single marking variable `u`.
pub fn inflate(a: &TruncatedSeries, vars: &Marks, var: usize, step: u32) -> Result<PolySeries> {
    if step == 0 {
        return Err(Error::InvalidArgument("inflate step must be at least 1".into()));
    }
    if var >= vars.len() {
        return Err(Error::InvalidArgument(format!("no marking variable at index {var}")));
    }
    let coeffs = a
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let mut e = vec![0; vars.len()];
            e[var] = step * n as u32;
            MarkPolynomial::monomial(vars, e, c.clone())
        })
        .collect();
    Ok(Series::new(vars.clone(), coeffs))
}

/// Series are themselves ring elements, with the truncation order as part
/// of the context. Mixed orders truncate to the smaller one.
impl<C: Ring> Ring for Series<C> {
    type Ctx = (C::Ctx, usize);

    fn ctx(&self) -> Self::Ctx {
        (self.ctx.clone(), self.order())
    }
    fn zero_in(ctx: &Self::Ctx) -> Self {
        Series::zero(&ctx.0, ctx.1)
    }
    fn from_scalar(ctx: &Self::Ctx, c: Coefficient) -> Self {
        Series::constant(&ctx.0, C::from_scalar(&ctx.0, c), ctx.1)
    }
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn add_assign(&mut self, other: &Self) {
        *self = self.try_add(other).expect("series contexts differ");
    }
    fn sub_assign(&mut self, other: &Self) {
        *self = self.try_sub(other).expect("series contexts differ");
    }
    fn neg(&self) -> Self {
        Series::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("series contexts differ")
    }
    fn scale(&self, c: &Coefficient) -> Self {
        Series::scale(self, c)
    }
    fn as_scalar(&self) -> Option<Coefficient> {
        if self.coeffs[1..].iter().all(|c| c.vanishes()) {
            self.coeffs[0].as_scalar()
        } else {
            None
        }
    }
}

impl<C: Ring> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.vanishes() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let body = c.to_string();
            let wrapped = if body.contains(' ') { format!("({body})") } else { body };
            match n {
                0 => write!(f, "{wrapped}")?,
                1 => write!(f, "{wrapped}*z")?,
                _ => write!(f, "{wrapped}*z^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

impl<C: Ring> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series({self})")
    }
}

impl<C: Ring> Add for &Series<C> {
    type Output = Series<C>;
    fn add(self, rhs: Self) -> Series<C> {
        self.try_add(rhs).expect("series contexts differ")
    }
}

impl<C: Ring> Sub for &Series<C> {
    type Output = Series<C>;
    fn sub(self, rhs: Self) -> Series<C> {
        self.try_sub(rhs).expect("series contexts differ")
    }
}

impl<C: Ring> Mul for &Series<C> {
    type Output = Series<C>;
    fn mul(self, rhs: Self) -> Series<C> {
        self.try_mul(rhs).expect("series contexts differ")
    }
}

impl<C: Ring> Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        Series::neg(self)
    }
}

impl<C: Ring> Add for Series<C> {
    type Output = Series<C>;
    fn add(self, rhs: Self) -> Series<C> {
        &self + &rhs
    }
}

impl<C: Ring> Sub for Series<C> {
    type Output = Series<C>;
    fn sub(self, rhs: Self) -> Series<C> {
        &self - &rhs
    }
}

impl<C: Ring> Mul for Series<C> {
    type Output = Series<C>;
    fn mul(self, rhs: Self) -> Series<C> {
        &self * &rhs
    }
}
