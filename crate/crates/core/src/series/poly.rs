use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Coefficient, Ring};
use crate::error::{Error, Result};

/// Ordered list of marking-variable names shared by a family of polynomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Marks(Arc<[String]>);

impl Marks {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        Marks(names.iter().map(|s| s.as_ref().to_string()).collect())
    }

    /// No marking variables at all.
    pub fn empty() -> Self {
        Marks(Arc::from(Vec::new()))
    }

    /// `prefix0, prefix1, ..., prefix{count-1}`.
    pub fn indexed(prefix: &str, count: usize) -> Self {
        let names: Vec<String> = (0..count).map(|i| format!("{prefix}{i}")).collect();
        Marks::new(&names)
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// The same list with variable `i` removed.
    pub fn without(&self, i: usize) -> Marks {
        let names: Vec<&String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, n)| n)
            .collect();
        Marks::new(&names)
    }

    pub(crate) fn check_same(&self, other: &Marks) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::IncompatibleMarks {
                left: self.0.to_vec(),
                right: other.0.to_vec(),
            })
        }
    }
}

impl fmt::Debug for Marks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Sparse polynomial in the marking variables, with exact coefficients.
///
/// Terms are keyed by exponent vectors of length `vars.len()`. No term with
/// a zero coefficient is ever stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MarkPolynomial {
    vars: Marks,
    terms: BTreeMap<Vec<u32>, Coefficient>,
}

impl MarkPolynomial {
    pub fn zero(vars: &Marks) -> Self {
        MarkPolynomial {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Marks, c: Coefficient) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    /// The variable at position `i`.
    pub fn variable(vars: &Marks, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, Coefficient::one())
    }

    pub fn monomial(vars: &Marks, exponents: Vec<u32>, c: Coefficient) -> Self {
        assert_eq!(exponents.len(), vars.len(), "exponent vector length");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(exponents, c);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated exponents.
    pub fn from_terms<I>(vars: &Marks, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Coefficient)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &Marks {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Coefficient)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Coefficient {
        self.terms.get(exponents).cloned().unwrap_or_else(Coefficient::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// Constant part (coefficient of the empty monomial).
    pub fn constant_part(&self) -> Coefficient {
        self.coefficient(&vec![0; self.vars.len()])
    }

    /// Largest total degree of a stored term; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    pub fn sum_of_coefficients(&self) -> Coefficient {
        self.terms.values().fold(Coefficient::zero(), |acc, c| acc + c)
    }

    pub fn eval(&self, point: &[Coefficient]) -> Coefficient {
        assert_eq!(point.len(), self.vars.len(), "evaluation point dimension");
        let mut total = Coefficient::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    term *= num_traits::pow(x.clone(), k as usize);
                }
            }
            total += term;
        }
        total
    }

    /// Value at `u_i = 1` for every variable.
    pub fn eval_ones(&self) -> Coefficient {
        self.sum_of_coefficients()
    }

    /// Substitutes `value` for variable `i`, dropping it from the variable list.
    pub fn specialize(&self, i: usize, value: &Coefficient) -> MarkPolynomial {
        let vars = self.vars.without(i);
        let mut out = MarkPolynomial::zero(&vars);
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let k = rest.remove(i);
            let w = c * num_traits::pow(value.clone(), k as usize);
            out.add_term(rest, w);
        }
        out
    }

    /// Substitutes `x_i + shift` for `x_i`.
    pub fn shift_var(&self, i: usize, shift: &Coefficient) -> MarkPolynomial {
        let mut out = MarkPolynomial::zero(&self.vars);
        for (e, c) in &self.terms {
            let k = e[i];
            // (x + s)^k = sum_r C(k, r) x^r s^(k-r)
            let mut binom = BigInt::one();
            for r in (0..=k).rev() {
                let mut e2 = e.clone();
                e2[i] = r;
                let w = c * Coefficient::from_integer(binom.clone()) * num_traits::pow(shift.clone(), (k - r) as usize);
                out.add_term(e2, w);
                // C(k, r-1) = C(k, r) * r / (k - r + 1)
                if r > 0 {
                    binom = binom * BigInt::from(r) / BigInt::from(k - r + 1);
                }
            }
        }
        out
    }

    /// Same terms under a new variable list of equal length.
    pub fn with_marks(&self, vars: &Marks) -> MarkPolynomial {
        assert_eq!(vars.len(), self.vars.len(), "renaming must keep the variable count");
        MarkPolynomial {
            vars: vars.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Re-expresses the polynomial over a larger variable list, matching
    /// variables by name.
    pub fn lift(&self, target: &Marks) -> Result<MarkPolynomial> {
        let map: Vec<usize> = self
            .vars
            .names()
            .iter()
            .map(|n| {
                target.index_of(n).ok_or_else(|| Error::IncompatibleMarks {
                    left: self.vars.names().to_vec(),
                    right: target.names().to_vec(),
                })
            })
            .collect::<Result<_>>()?;
        let mut out = MarkPolynomial::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (k, &pos) in map.iter().enumerate() {
                e2[pos] = e[k];
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.vars.check_same(&other.vars)?;
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.vars.check_same(&other.vars)?;
        Ok(Ring::mul(self, other))
    }

    pub fn pow(&self, k: u32) -> MarkPolynomial {
        let mut acc = MarkPolynomial::constant(&self.vars, Coefficient::one());
        for _ in 0..k {
            acc = Ring::mul(&acc, self);
        }
        acc
    }

    fn add_term(&mut self, e: Vec<u32>, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }
}

impl Ring for MarkPolynomial {
    type Ctx = Marks;

    fn ctx(&self) -> Marks {
        self.vars.clone()
    }
    fn zero_in(ctx: &Marks) -> Self {
        MarkPolynomial::zero(ctx)
    }
    fn from_scalar(ctx: &Marks, c: Coefficient) -> Self {
        MarkPolynomial::constant(ctx, c)
    }
    fn vanishes(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.vars, other.vars);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
    fn sub_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.vars, other.vars);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), -c);
        }
    }
    fn neg(&self) -> Self {
        MarkPolynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = MarkPolynomial::zero(&self.vars);
        out.mul_add_assign(self, other);
        out
    }
    fn scale(&self, c: &Coefficient) -> Self {
        if c.is_zero() {
            return MarkPolynomial::zero(&self.vars);
        }
        MarkPolynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        debug_assert_eq!(a.vars, b.vars);
        if a.terms.is_empty() || b.terms.is_empty() {
            return;
        }
        let n = self.vars.len();
        let mut key = vec![0u32; n];
        let max_deg = |p: &Self| p.terms.keys().flatten().copied().max().unwrap_or(0);
        let packable = n <= 4 && max_deg(a) + max_deg(b) < 1 << 16;
        if packable && a.terms.values().chain(b.terms.values()).all(|c| c.is_integer()) {
            let pack = |e: &[u32]| e.iter().fold(0u64, |acc, &x| (acc << 16) | x as u64);
            let bs: Vec<(u64, &BigInt)> = b.terms.iter().map(|(e, c)| (pack(e), c.numer())).collect();
            let mut acc: HashMap<u64, BigInt> = HashMap::new();
            for (ea, ca) in &a.terms {
                let ka = pack(ea);
                let ca = ca.numer();
                for (kb, cb) in &bs {
                    let prod = ca * *cb;
                    match acc.entry(ka + kb) {
                        Entry::Occupied(mut o) => *o.get_mut() += prod,
                        Entry::Vacant(v) => {
                            v.insert(prod);
                        }
                    }
                }
            }
            for (k, c) in acc {
                let e = (0..n).map(|i| ((k >> (16 * (n - 1 - i))) & 0xffff) as u32).collect();
                self.add_term(e, Coefficient::from_integer(c));
            }
            return;
        }
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                for k in 0..n {
                    key[k] = ea[k] + eb[k];
                }
                let prod = ca * cb;
                match self.terms.get_mut(key.as_slice()) {
                    Some(slot) => *slot += prod,
                    None => {
                        self.terms.insert(key.clone(), prod);
                    }
                }
            }
        }
        self.terms.retain(|_, c| !c.is_zero());
    }
    fn as_scalar(&self) -> Option<Coefficient> {
        if self.is_constant() {
            Some(self.constant_part())
        } else {
            None
        }
    }
}

impl fmt::Display for MarkPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest total degree first reads more naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (idx, (e, c)) in terms.into_iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .zip(self.vars.names())
                .filter(|(k, _)| **k > 0)
                .map(|(k, name)| if *k == 1 { name.clone() } else { format!("{name}^{k}") })
                .collect();
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MarkPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MarkPolynomial({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::coef;

    fn u() -> Marks {
        Marks::new(&["u"])
    }

    #[test]
    fn zero_terms_are_dropped() {
        let x = MarkPolynomial::variable(&u(), 0);
        let mut p = x.clone();
        p.sub_assign(&x);
        assert!(p.vanishes());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn shift_var_expands_binomially() {
        // (t)^2 with t = u - 1 -> u^2 - 2u + 1
        let t2 = MarkPolynomial::monomial(&u(), vec![2], coef(1));
        let p = t2.shift_var(0, &coef(-1));
        assert_eq!(p.coefficient(&[2]), coef(1));
        assert_eq!(p.coefficient(&[1]), coef(-2));
        assert_eq!(p.coefficient(&[0]), coef(1));
    }

    #[test]
    fn integer_and_rational_products_agree() {
        let m = Marks::new(&["a", "b", "c"]);
        let p = MarkPolynomial::from_terms(
            &m,
            [
                (vec![1, 0, 2], coef(3)),
                (vec![0, 1, 0], coef(-5)),
                (vec![0, 0, 0], coef(2)),
            ],
        );
        let q = MarkPolynomial::from_terms(
            &m,
            [
                (vec![2, 1, 0], coef(7)),
                (vec![0, 1, 0], coef(5)),
                (vec![0, 0, 1], coef(-1)),
            ],
        );
        let half = crate::series::ratio(1, 2);
        let via_rationals = Ring::mul(&p.scale(&half), &q).scale(&coef(2));
        let direct = Ring::mul(&p, &q);
        assert_eq!(direct, via_rationals);
        assert_eq!(direct.coefficient(&[0, 2, 0]), coef(-25));
        assert_eq!(direct.coefficient(&[0, 1, 0]), coef(10));
    }

    #[test]
    fn specialize_drops_variable() {
        let m = Marks::new(&["a", "b"]);
        let p = MarkPolynomial::from_terms(&m, [(vec![1, 2], coef(3)), (vec![0, 1], coef(1))]);
        let q = p.specialize(1, &coef(2));
        assert_eq!(q.vars().names(), &["a".to_string()]);
        assert_eq!(q.coefficient(&[1]), coef(12));
        assert_eq!(q.coefficient(&[0]), coef(2));
    }

    #[test]
    fn mismatched_marks_are_rejected() {
        let a = MarkPolynomial::variable(&Marks::new(&["u"]), 0);
        let b = MarkPolynomial::variable(&Marks::new(&["v"]), 0);
        assert!(matches!(a.try_add(&b), Err(Error::IncompatibleMarks { .. })));
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn display_is_readable() {
        let m = Marks::new(&["u0", "u1"]);
        let p = MarkPolynomial::from_terms(
            &m,
            [(vec![2, 0], coef(1)), (vec![1, 1], coef(2)), (vec![0, 0], coef(-1))],
        );
        assert_eq!(p.to_string(), "u0^2 + 2*u0*u1 - 1");
    }

    #[test]
    fn eval_ones_sums_coefficients() {
        let m = Marks::new(&["u0", "u1"]);
        let p = MarkPolynomial::from_terms(&m, [(vec![2, 0], coef(1)), (vec![1, 1], coef(2))]);
        assert_eq!(p.eval_ones(), coef(3));
        assert_eq!(p.eval(&[coef(2), coef(3)]), coef(4 + 12));
    }
}
