//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use embedded_trees::label_marks::{sj_closed, sj_pm_closed, sj_pm_system, sj_system, verify_gen1};
use embedded_trees::leaf_depths::{
    dary_leaf_depth_count, dary_leaf_depth_table, dary_table_total, leaf_depth_count, leaf_depth_distribution,
    leaf_depth_table, profiles,
};
use embedded_trees::oracle::{oracle_leaf_depths, run_suite, OracleConfig, SuiteParams};
use embedded_trees::series::{coef, Coefficient, IdentityCheck};
use embedded_trees::small_labels::{integer_coeffs, t0_coeff, t1_coeff, tj_closed, tj_system, verify_lambda_family};
use embedded_trees::ternary::{dary_power_coeff, power_coeff_by_binomial_sum, series_t, verify_x_identities};
use num_bigint::BigInt;

type Outcome = Result<String, String>;

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn identities(checks: Vec<IdentityCheck>) -> Result<usize, String> {
    let n = checks.len();
    match checks.into_iter().find(|c| !c.holds()) {
        None => Ok(n),
        Some(c) => Err(format!("{} fails at z^{}", c.name, c.first_mismatch.unwrap_or(0))),
    }
}

fn bigs(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn sequence_by_three_routes(j: i64, want: &[i64], formula: fn(u64) -> embedded_trees::Result<BigInt>) -> Outcome {
    let want = bigs(want);
    let sys = integer_coeffs(&tj_system(j, 6).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let closed = integer_coeffs(&tj_closed(j, 6).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let direct: Vec<BigInt> = (0..=6)
        .map(formula)
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    check(sys == want, || format!("system gives {sys:?}"))?;
    check(closed == want, || format!("closed form gives {closed:?}"))?;
    check(direct == want, || format!("coefficient formula gives {direct:?}"))?;
    Ok(format!("{:?} by system, closed form and coefficient formula", want))
}

fn criterion_1() -> Outcome {
    sequence_by_three_routes(0, &[1, 1, 2, 6, 22, 91, 408], t0_coeff)
}

fn criterion_2() -> Outcome {
    sequence_by_three_routes(1, &[1, 1, 3, 11, 46, 209, 1006], t1_coeff)
}

fn criterion_3() -> Outcome {
    let mut n = 0;
    for j in -1..=10 {
        let c = IdentityCheck::compare(
            format!("T_{j}"),
            &tj_closed(j, 30).map_err(|e| e.to_string())?,
            &tj_system(j, 30).map_err(|e| e.to_string())?,
        );
        n += identities(vec![c])?;
    }
    for j in -1..=6 {
        let a = IdentityCheck::compare(
            format!("S_{j}(z,u)"),
            &sj_closed(j, 20).map_err(|e| e.to_string())?,
            &sj_system(j, 20).map_err(|e| e.to_string())?,
        );
        let b = IdentityCheck::compare(
            format!("S_{j}(z,u0,u1)"),
            &sj_pm_closed(j, 20).map_err(|e| e.to_string())?,
            &sj_pm_system(j, 20).map_err(|e| e.to_string())?,
        );
        n += identities(vec![a, b])?;
    }
    Ok(format!("{n} closed-form/system identities exact"))
}

fn suite(name: &str, params: SuiteParams) -> Result<usize, String> {
    let r = run_suite(name, &params).map_err(|e| e.to_string())?;
    if r.passed() {
        Ok(r.cases.len())
    } else {
        Err(r.to_text())
    }
}

fn criterion_4() -> Outcome {
    let small = suite(
        "small-labels",
        SuiteParams {
            j_max: Some(8),
            n_max: Some(8),
            ..Default::default()
        },
    )?;
    let marks = suite(
        "label-marks",
        SuiteParams {
            j_max: Some(3),
            m_max: Some(2),
            n_max: Some(8),
            ..Default::default()
        },
    )?;
    let leaves = suite(
        "leaf-depths",
        SuiteParams {
            n_max: Some(8),
            ..Default::default()
        },
    )?;
    Ok(format!(
        "oracle agrees on {small} small-label, {marks} label-mark and {leaves} leaf-depth cases (n <= 8)"
    ))
}

fn criterion_5() -> Outcome {
    let mut cells = 0usize;
    for n in 1..=8u64 {
        for s in 0..=2 * n {
            for m in profiles(3, n as u32) {
                let (a, b, c) = (m.0[0] as u64, m.0[1] as u64, m.0[2] as u64);
                let ternary = leaf_depth_count(n, s, a, b, c);
                let gen = dary_leaf_depth_count(3, n, s, &m.0);
                check(ternary == gen, || format!("n={n} s={s} m={m}: {ternary} vs {gen}"))?;
                cells += 1;
            }
            let total: Coefficient = leaf_depth_distribution(n, s).into_values().sum();
            check(total == coef(1), || format!("distribution n={n} s={s} sums to {total}"))?;
        }
        let table = leaf_depth_table(n);
        for ((s, m), c) in &table {
            let mirrored = (
                2 * n - s,
                embedded_trees::trees::DepthProfile(vec![m.0[2], m.0[1], m.0[0]]),
            );
            check(table.get(&mirrored) == Some(c), || {
                format!("mirror fails at n={n} s={s} m={m}")
            })?;
        }
    }
    Ok(format!(
        "{cells} cells agree, distributions sum to 1, mirror symmetry holds (n <= 8)"
    ))
}

fn criterion_6() -> Outcome {
    for d in 2..=4u64 {
        for n in 0..=6u64 {
            let (sum, want) = dary_table_total(d, n);
            check(sum == want, || format!("d={d} n={n}: total {sum}, expected {want}"))?;
        }
    }
    let cfg = OracleConfig::with_cap(10);
    for n in 1..=10u64 {
        let oracle = oracle_leaf_depths(2, n as usize, &cfg).map_err(|e| e.to_string())?;
        let table = dary_leaf_depth_table(2, n);
        check(oracle == table, || format!("binary table differs from oracle at n={n}"))?;
    }
    Ok("totals hold for d = 2,3,4, n <= 6; binary table matches oracle for n <= 10".into())
}

fn criterion_7() -> Outcome {
    let mut n_checked = 0;
    for d in 2..=4u64 {
        let t = series_t(d as usize, 20).map_err(|e| e.to_string())?;
        let mut power = embedded_trees::series::TruncatedSeries::one(&(), 20);
        for k in 0..=6u64 {
            for n in 0..=20u64 {
                let closed = dary_power_coeff(d, n, k);
                let sum = power_coeff_by_binomial_sum(d, n, k);
                let conv = power.coeff(n as usize);
                check(closed == sum, || {
                    format!("d={d} n={n} k={k}: binomial {closed} vs sum {sum}")
                })?;
                check(Coefficient::from_integer(closed.clone()) == *conv, || {
                    format!("d={d} n={n} k={k}: binomial {closed} vs convolution {conv}")
                })?;
                n_checked += 1;
            }
            power = power.try_mul(&t).map_err(|e| e.to_string())?;
        }
    }
    Ok(format!("{n_checked} (d, n, k) triples agree by three routes"))
}

fn criterion_8() -> Outcome {
    let n = identities(verify_x_identities(50).map_err(|e| e.to_string())?)?;
    Ok(format!(
        "{n} identities of X hold to order 50, coefficients nonnegative"
    ))
}

fn criterion_9() -> Outcome {
    let lambda = verify_lambda_family(-3..=5, 12, 6).map_err(|e| e.to_string())?;
    if let Some(c) = lambda.iter().find(|c| !c.holds()) {
        return Err(format!("lambda family fails at j={}: {:?}", c.j, c.first_mismatch));
    }
    let mut n = 0;
    for m in 0..=3 {
        n += identities(verify_gen1(m, 12).map_err(|e| e.to_string())?)?;
    }
    Ok(format!(
        "lambda family for j = -3..5 and {n} continued-fraction identities for m = 0..3"
    ))
}

fn criterion_10() -> Outcome {
    let n = suite("cardano", SuiteParams::default())?;
    Ok(format!("{n} evaluation points within tolerance"))
}

fn main() -> ExitCode {
    let criteria: [(fn() -> Outcome, Duration); 10] = [
        (criterion_1, Duration::from_secs(1)),
        (criterion_2, Duration::from_secs(1)),
        (criterion_3, Duration::from_secs(30)),
        (criterion_4, Duration::from_secs(600)),
        (criterion_5, Duration::MAX),
        (criterion_6, Duration::MAX),
        (criterion_7, Duration::MAX),
        (criterion_8, Duration::MAX),
        (criterion_9, Duration::MAX),
        (criterion_10, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (status, detail) = match outcome {
            Ok(msg) if took <= *limit => ("PASS", msg),
            Ok(msg) => ("FAIL", format!("{msg}, but took longer than {limit:?}")),
            Err(msg) => ("FAIL", msg),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2}: {status} ({:.2?}) {detail}", i + 1, took);
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
