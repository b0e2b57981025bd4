use super::{Ring, Series};
use crate::error::{Error, Result};

/// Solves `y = f(y)` to order `order` for a map that is a contraction in the
/// `z`-adic metric.
///
/// Iterate `p` feeds `f` the previous iterate, extended by the seed's
/// coefficient at `z^p`, so each application only works at the precision it
/// can actually certify. Coefficients already fixed must not move; if they do,
/// the map is reported as a non-contraction. A final application at full
/// order confirms stabilisation, for at most `order + 2` applications.
pub fn fixed_point_solve<C, F>(f: F, seed: &Series<C>, order: usize) -> Result<Series<C>>
where
    C: Ring,
    F: Fn(&Series<C>) -> Result<Series<C>>,
{
    let ctx = seed.ctx().clone();
    let seed_coeff = |k: usize| {
        if k <= seed.order() {
            seed.coeff(k).clone()
        } else {
            C::zero_in(&ctx)
        }
    };

    let mut current: Vec<C> = Vec::with_capacity(order + 1);
    for p in 0..=order {
        let mut input = current.clone();
        input.push(seed_coeff(p));
        let input = Series::new(ctx.clone(), input);
        let out = f(&input)?;
        if out.order() < p {
            return Err(Error::PrecisionLoss {
                got: out.order(),
                needed: p,
            });
        }
        if let Some(k) = out.first_difference(&input).filter(|&k| k < p) {
            return Err(Error::NonContraction { iteration: p, index: k });
        }
        current = out.truncate(p).into_coeffs();
    }

    let result = Series::new(ctx, current);
    let check = f(&result)?;
    if check.order() < order {
        return Err(Error::PrecisionLoss {
            got: check.order(),
            needed: order,
        });
    }
    if let Some(k) = check.first_difference(&result) {
        return Err(Error::NonContraction {
            iteration: order + 1,
            index: k,
        });
    }
    Ok(result)
}

/// A factor on the right-hand side of a [`ProductEquation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// One of the system's unknown series.
    Unknown(usize),
    /// A series supplied in advance (boundary values).
    Known(usize),
}

/// `S_i = 1 + weight * z * prod(factors)`.
#[derive(Debug, Clone)]
pub struct ProductEquation<C: Ring> {
    pub weight: C,
    pub factors: Vec<Factor>,
}

/// A system of product equations, one per unknown series.
///
/// Every right-hand side carries a factor `z`, so the coefficient of `z^n` in
/// each unknown depends only on coefficients below `n`. The solver therefore
/// sweeps order by order: at step `n` all unknowns receive their `z^n`
/// coefficient from partial products that are extended by one coefficient per
/// step, which keeps the cost at one Cauchy-product row per factor per order.
#[derive(Debug, Clone)]
pub struct ProductSystem<C: Ring> {
    ctx: C::Ctx,
    known: Vec<Series<C>>,
    equations: Vec<ProductEquation<C>>,
}

impl<C: Ring> ProductSystem<C> {
    pub fn new(ctx: C::Ctx) -> Self {
        ProductSystem {
            ctx,
            known: Vec::new(),
            equations: Vec::new(),
        }
    }

    /// Registers a boundary series and returns its handle.
    pub fn add_known(&mut self, s: Series<C>) -> Factor {
        self.known.push(s);
        Factor::Known(self.known.len() - 1)
    }

    /// Appends the equation for the next unknown and returns its index.
    pub fn add_equation(&mut self, eq: ProductEquation<C>) -> usize {
        self.equations.push(eq);
        self.equations.len() - 1
    }

    pub fn num_unknowns(&self) -> usize {
        self.equations.len()
    }

    pub fn solve(&self, order: usize) -> Result<Vec<Series<C>>> {
        for k in &self.known {
            if k.order() < order {
                return Err(Error::PrecisionLoss {
                    got: k.order(),
                    needed: order,
                });
            }
        }
        for eq in &self.equations {
            for f in &eq.factors {
                let ok = match *f {
                    Factor::Unknown(i) => i < self.equations.len(),
                    Factor::Known(i) => i < self.known.len(),
                };
                if !ok {
                    return Err(Error::InvalidArgument(format!("dangling factor {f:?}")));
                }
            }
        }

        let zero = C::zero_in(&self.ctx);
        let one = C::one_in(&self.ctx);
        let m = self.equations.len();
        let mut unknowns: Vec<Vec<C>> = vec![vec![one.clone()]; m];
        // prefix[i][f] holds coefficients of factors[0] * ... * factors[f+1]
        let mut prefix: Vec<Vec<Vec<C>>> = self
            .equations
            .iter()
            .map(|eq| vec![Vec::with_capacity(order); eq.factors.len().saturating_sub(1)])
            .collect();

        for n in 1..=order {
            let row = n - 1;
            let mut next: Vec<C> = Vec::with_capacity(m);
            for (i, eq) in self.equations.iter().enumerate() {
                let coeff_of = |f: Factor, k: usize| -> &C {
                    match f {
                        Factor::Unknown(j) => &unknowns[j][k],
                        Factor::Known(j) => self.known[j].coeff(k),
                    }
                };
                let value = if eq.factors.is_empty() {
                    if row == 0 {
                        one.clone()
                    } else {
                        zero.clone()
                    }
                } else {
                    for f in 1..eq.factors.len() {
                        let mut acc = zero.clone();
                        for a in 0..=row {
                            let left = if f == 1 {
                                coeff_of(eq.factors[0], a)
                            } else {
                                &prefix[i][f - 2][a]
                            };
                            let right = coeff_of(eq.factors[f], row - a);
                            if !left.vanishes() && !right.vanishes() {
                                acc.mul_add_assign(left, right);
                            }
                        }
                        prefix[i][f - 1].push(acc);
                    }
                    match prefix[i].last() {
                        Some(p) => p[row].clone(),
                        None => coeff_of(eq.factors[0], row).clone(),
                    }
                };
                next.push(if eq.weight.is_identity() {
                    value
                } else {
                    value.mul(&eq.weight)
                });
            }
            for (u, c) in unknowns.iter_mut().zip(next) {
                u.push(c);
            }
        }

        Ok(unknowns.into_iter().map(|c| Series::new(self.ctx.clone(), c)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{coef, TruncatedSeries};

    #[test]
    fn geometric_fixed_point() {
        // y = 1 + z y
        let f = |y: &TruncatedSeries| Ok(TruncatedSeries::one(&(), y.order()) + y.shift_up(1));
        let seed = TruncatedSeries::one(&(), 0);
        let y = fixed_point_solve(f, &seed, 6).unwrap();
        assert_eq!(y, TruncatedSeries::from_ints(&[1; 7]));
    }

    #[test]
    fn ternary_fixed_point() {
        // y = z (1 + y)^3
        let f = |y: &TruncatedSeries| Ok(y.one_plus().pow(3).shift_up(1));
        let y = fixed_point_solve(f, &TruncatedSeries::zero(&(), 0), 5).unwrap();
        assert_eq!(y, TruncatedSeries::from_ints(&[0, 1, 3, 12, 55, 273]));
    }

    #[test]
    fn seeds_do_not_matter() {
        let f = |y: &TruncatedSeries| Ok(y.one_plus().pow(3).shift_up(1));
        let a = fixed_point_solve(f, &TruncatedSeries::zero(&(), 0), 8).unwrap();
        let b = fixed_point_solve(f, &TruncatedSeries::from_ints(&[0, 7, -3, 1]), 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_contraction_is_detected() {
        // y = y + z never stabilises
        let f = |y: &TruncatedSeries| Ok(y + &TruncatedSeries::z(&(), y.order()));
        let err = fixed_point_solve(f, &TruncatedSeries::zero(&(), 0), 5).unwrap_err();
        assert!(matches!(err, Error::NonContraction { .. }));
        // y = 2y moves the constant term
        let g = |y: &TruncatedSeries| Ok(y.scale(&coef(2)));
        assert!(fixed_point_solve(g, &TruncatedSeries::one(&(), 0), 5).is_err());
    }

    #[test]
    fn product_system_matches_fixed_point() {
        // y = 1 + z y^3 as a one-unknown system
        let mut sys = ProductSystem::<crate::series::Coefficient>::new(());
        sys.add_equation(ProductEquation {
            weight: coef(1),
            factors: vec![Factor::Unknown(0); 3],
        });
        let y = &sys.solve(6).unwrap()[0];
        assert_eq!(y, &TruncatedSeries::from_ints(&[1, 1, 3, 12, 55, 273, 1428]));
    }

    #[test]
    fn product_system_with_known_and_weight() {
        // y = 1 + 2 z K with K = 1/(1-z)
        let mut sys = ProductSystem::new(());
        let k = sys.add_known(TruncatedSeries::from_ints(&[1, 1, 1, 1]));
        sys.add_equation(ProductEquation {
            weight: coef(2),
            factors: vec![k],
        });
        let y = &sys.solve(3).unwrap()[0];
        assert_eq!(y, &TruncatedSeries::from_ints(&[1, 2, 2, 2]));
    }
}
