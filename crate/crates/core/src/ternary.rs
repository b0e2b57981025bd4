//! The tree series `T`, `T̃ = T - 1` and the auxiliary series `X`, together
//! with closed coefficient formulas and a floating-point evaluation of `T̃`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::series::{
    coef, fixed_point_solve, is_nonnegative, Coefficient, Factor, IdentityCheck, ProductEquation, ProductSystem,
    TruncatedSeries,
};

/// Constants attached to the ternary tree series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryConstants {
    /// Radius of convergence of `T` and `T̃`.
    pub radius_of_convergence: Coefficient,
}

impl Default for TernaryConstants {
    fn default() -> Self {
        TernaryConstants {
            radius_of_convergence: dary_radius(3),
        }
    }
}

/// `(d-1)^(d-1) / d^d`, the radius of convergence of the `d`-ary tree series.
pub fn dary_radius(d: u32) -> Coefficient {
    assert!(d >= 2, "arity must be at least 2");
    let num = BigInt::from(d - 1).pow(d - 1);
    let den = BigInt::from(d).pow(d);
    Coefficient::new(num, den)
}

pub(crate) fn big_binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        BigInt::zero()
    } else {
        binomial(BigInt::from(n), BigInt::from(k))
    }
}

/// Number of ternary trees with `n` internal nodes, `binom(3n, n) / (2n + 1)`.
pub fn ternary_count(n: u64) -> BigInt {
    dary_power_coeff(3, n, 1)
}

/// Number of `d`-ary trees with `n` internal nodes.
pub fn dary_count(d: u64, n: u64) -> BigInt {
    dary_power_coeff(d, n, 1)
}

/// `[z^n] T(z)^k = k/(dn+k) * binom(dn+k, n)` for `T = 1 + z T^d`.
pub fn dary_power_coeff(d: u64, n: u64, k: u64) -> BigInt {
    if k == 0 {
        return if n == 0 { BigInt::one() } else { BigInt::zero() };
    }
    let m = d * n + k;
    big_binomial(m, n) * BigInt::from(k) / BigInt::from(m)
}

/// Ternary case of [`dary_power_coeff`].
pub fn t_power_coeff(n: u64, k: u64) -> BigInt {
    dary_power_coeff(3, n, k)
}

/// `[z^n] T̃(z)^l = (l/n) binom(dn, n-l)`, with the `n = 0` and `l = 0` cases.
pub fn ttilde_power_coeff(d: u64, n: u64, l: u64) -> BigInt {
    if l == 0 {
        return if n == 0 { BigInt::one() } else { BigInt::zero() };
    }
    if n == 0 || l > n {
        return BigInt::zero();
    }
    big_binomial(d * n, n - l) * BigInt::from(l) / BigInt::from(n)
}

/// `[z^n] T^k` through `T^k = sum_l binom(k, l) T̃^l`.
pub fn power_coeff_by_binomial_sum(d: u64, n: u64, k: u64) -> BigInt {
    (0..=k).map(|l| big_binomial(k, l) * ttilde_power_coeff(d, n, l)).sum()
}

/// `T = 1 + z T^d` to order `order`.
pub fn series_t(d: usize, order: usize) -> Result<TruncatedSeries> {
    if d == 0 {
        return Err(Error::InvalidArgument("arity must be positive".into()));
    }
    let mut sys = ProductSystem::new(());
    sys.add_equation(ProductEquation {
        weight: coef(1),
        factors: vec![Factor::Unknown(0); d],
    });
    Ok(sys.solve(order)?.remove(0))
}

/// `T̃ = T - 1`, the fixed point of `T̃ = z (1 + T̃)^d`.
pub fn series_ttilde(d: usize, order: usize) -> Result<TruncatedSeries> {
    Ok(series_t(d, order)?.add_constant(&coef(-1)))
}

/// The series `X` with `X(0) = 0` and `X = z (1+X+X^2)^3 / (1+X^2)^2`.
pub fn series_x(order: usize) -> Result<TruncatedSeries> {
    let f = |x: &TruncatedSeries| {
        let x2 = x * x;
        let q = x.one_plus().try_add(&x2)?;
        let den = x2.one_plus().pow(2);
        Ok(q.pow(3).try_div(&den)?.shift_up(1))
    };
    fixed_point_solve(f, &TruncatedSeries::zero(&(), 0), order)
}

/// Checks every stated property of `X` to order `order`: the defining
/// equation, `X = z T^2 (1 + X + X^2)`, `T (1 + X^2) = 1 + X + X^2`,
/// `(T - 1)(1 + X^2) = X`, the square-root form
/// `X = (1 - sqrt(1 - 4 T̃^2)) / (2 T̃)`, and nonnegativity.
pub fn verify_x_identities(order: usize) -> Result<Vec<IdentityCheck>> {
    let x = series_x(order)?;
    let t = series_t(3, order + 1)?;
    let tt = t.add_constant(&coef(-1));
    let t = t.truncate(order);
    let z = TruncatedSeries::z(&(), order);
    let x2 = &x * &x;
    let q = x.one_plus().try_add(&x2)?;
    let mut checks = vec![
        IdentityCheck::compare(
            "X (1+X^2)^2 = z (1+X+X^2)^3",
            &(&x * &x2.one_plus().pow(2)),
            &(&z * &q.pow(3)),
        ),
        IdentityCheck::compare("X = z T^2 (1+X+X^2)", &x, &(&(&z * &t.pow(2)) * &q)),
        IdentityCheck::compare("T (1+X^2) = 1+X+X^2", &(&t * &x2.one_plus()), &q),
        IdentityCheck::compare("(T-1)(1+X^2) = X", &(&t.add_constant(&coef(-1)) * &x2.one_plus()), &x),
    ];

    // (1 - sqrt(1 - 4 T̃^2)) / (2 T̃), exact division by a valuation-one series
    let root = (&tt * &tt).scale(&coef(-4)).one_plus().sqrt()?;
    let by_root = root.one_minus().div_exact(&tt.scale(&coef(2)))?;
    checks.push(IdentityCheck::compare(
        "X = (1 - sqrt(1 - 4 T~^2)) / (2 T~)",
        &x,
        &by_root,
    ));

    let sign = if is_nonnegative(&x) {
        None
    } else {
        x.coeffs().iter().position(|c| *c < Coefficient::zero())
    };
    checks.push(IdentityCheck {
        name: "X has nonnegative coefficients".into(),
        order,
        first_mismatch: sign,
    });
    checks.push(IdentityCheck {
        name: "X(0) = 0".into(),
        order,
        first_mismatch: if x.coeff(0).is_zero() { None } else { Some(0) },
    });
    Ok(checks)
}

/// Real value of `T̃(z)` for `z` in `[-4/27, 4/27]` by the trigonometric
/// (positive `z`) and radical (negative `z`) solutions of the cubic.
pub fn cardano_eval(z: f64) -> Result<f64> {
    let rho = 4.0 / 27.0;
    if !(-rho..=rho).contains(&z) {
        return Err(Error::InvalidArgument(format!("z = {z} outside [-4/27, 4/27]")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z > 0.0 {
        let angle = (27.0 * z / (4.0 - 27.0 * z)).sqrt().atan() / 3.0;
        Ok(2.0 / (3.0 * z).sqrt() * angle.sin() - 1.0)
    } else {
        let a = (4.0 - 27.0 * z).sqrt();
        let b = (-27.0 * z).sqrt();
        let num = (4.0 * (a + b)).cbrt() - (4.0 * (a - b)).cbrt();
        Ok(num / (2.0 * (-3.0 * z).sqrt()) - 1.0)
    }
}

/// `sum_{n <= n_max} [z^n] T̃ * z^n` in floating point.
pub fn ttilde_partial_sum(z: f64, n_max: u64) -> f64 {
    let mut total = 0.0;
    let mut zn = 1.0;
    for n in 1..=n_max {
        zn *= z;
        let c: f64 = ternary_count(n).to_string().parse().expect("integer");
        total += c * zn;
    }
    total
}

/// Ratio `27|z|/4` of the geometric tail bounding the partial sum above.
pub fn ttilde_tail_ratio(z: f64) -> f64 {
    27.0 * z.abs() / 4.0
}
