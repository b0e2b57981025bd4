//! Brute-force recounts by exhaustive enumeration, and verification suites
//! that compare them (and the closed forms) against the series machinery.
//!
//! The `oracle_*` functions only use tree enumeration and the tree
//! statistics in [`crate::trees`].

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::label_marks::{self, s_general_system, verify_gen1};
use crate::leaf_depths::{dary_leaf_depth_table, leaf_depth_table};
use crate::series::{Coefficient, IdentityCheck, MarkPolynomial, Marks};
use crate::small_labels::{self, small_label_family, verify_lambda_family};
use crate::ternary::{cardano_eval, ttilde_partial_sum, ttilde_tail_ratio};
use crate::trees::{label_histogram, leaf_profiles, CompositionOrder, DaryTree, DepthProfile, StepSet, TreeEnumerator};

/// Largest size the oracle enumerates by default for each arity.
pub fn oracle_cap(arity: usize) -> usize {
    match arity {
        0..=2 => 10,
        3 => 8,
        4 => 6,
        _ => 5,
    }
}

/// Enumeration bound and visiting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Overrides [`oracle_cap`] when set.
    pub cap: Option<usize>,
    pub order: CompositionOrder,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            cap: None,
            order: CompositionOrder::Lex,
        }
    }
}

impl OracleConfig {
    pub fn with_cap(cap: usize) -> Self {
        OracleConfig {
            cap: Some(cap),
            ..Self::default()
        }
    }

    pub fn cap_for(&self, arity: usize) -> usize {
        self.cap.unwrap_or_else(|| oracle_cap(arity))
    }
}

/// Runs `visit` on every tree of size `n`, one enumerator per root-size
/// composition in parallel, and merges the per-partition results in
/// composition order.
fn over_trees<A, V, M>(arity: usize, n: usize, cfg: &OracleConfig, init: A, visit: V, merge: M) -> Result<A>
where
    A: Clone + Send + Sync,
    V: Fn(&mut A, &DaryTree) + Sync,
    M: Fn(&mut A, A),
{
    let cap = cfg.cap_for(arity);
    if n == 0 {
        let mut acc = init;
        for t in TreeEnumerator::new(arity, 0, cap, cfg.order)? {
            visit(&mut acc, &t);
        }
        return Ok(acc);
    }
    let parts = TreeEnumerator::compositions(n - 1, arity);
    let partials: Vec<A> = parts
        .par_iter()
        .map(|sizes| {
            let mut acc = init.clone();
            for t in TreeEnumerator::with_root_sizes(arity, sizes, cap, cfg.order)? {
                visit(&mut acc, &t);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut out = init;
    for p in partials {
        merge(&mut out, p);
    }
    Ok(out)
}

fn merge_counts<K: Ord>(into: &mut BTreeMap<K, BigInt>, from: BTreeMap<K, BigInt>) {
    for (k, v) in from {
        *into.entry(k).or_insert_with(BigInt::zero) += v;
    }
}

/// Number of trees of size `n` by largest internal label; the empty tree
/// is filed under `None`.
pub fn oracle_max_labels(steps: &StepSet, n: usize, cfg: &OracleConfig) -> Result<BTreeMap<Option<i64>, BigInt>> {
    let steps_ok = steps.clone();
    over_trees(
        steps.arity(),
        n,
        cfg,
        BTreeMap::new(),
        move |acc: &mut BTreeMap<Option<i64>, BigInt>, t| {
            let m = label_histogram(t, &steps_ok).expect("arity checked").max_label();
            *acc.entry(m).or_insert_with(BigInt::zero) += 1;
        },
        merge_counts,
    )
}

/// Number of trees of size `n` whose internal labels are all at most `j`.
pub fn oracle_small_labels(steps: &StepSet, j: i64, n: usize, cfg: &OracleConfig) -> Result<BigInt> {
    let hist = oracle_max_labels(steps, n, cfg)?;
    Ok(hist
        .into_iter()
        .filter(|(m, _)| m.is_none_or(|m| m <= j))
        .map(|(_, c)| c)
        .sum())
}

/// Sum over ternary trees of size `n` of `prod_l u_l^(internal nodes at labels j-l or j+l)`,
/// for marks `u0, ..., u{m}`.
pub fn oracle_label_marks(n: usize, j: i64, m: usize, cfg: &OracleConfig) -> Result<MarkPolynomial> {
    let steps = StepSet::ternary();
    let tally = over_trees(
        3,
        n,
        cfg,
        BTreeMap::new(),
        |acc: &mut BTreeMap<Vec<u32>, BigInt>, t| {
            let h = label_histogram(t, &steps).expect("arity checked");
            let mut e = vec![0u32; m + 1];
            for (&label, &c) in &h.counts {
                let dist = (label - j).unsigned_abs() as usize;
                if dist <= m {
                    e[dist] += c as u32;
                }
            }
            *acc.entry(e).or_insert_with(BigInt::zero) += 1;
        },
        merge_counts,
    )?;
    let marks = Marks::indexed("u", m + 1);
    Ok(MarkPolynomial::from_terms(
        &marks,
        tally.into_iter().map(|(e, c)| (e, Coefficient::from_integer(c))),
    ))
}

/// Number of `d`-ary trees of size `n` by leaf index and depth profile.
pub fn oracle_leaf_depths(arity: usize, n: usize, cfg: &OracleConfig) -> Result<BTreeMap<(u64, DepthProfile), BigInt>> {
    over_trees(
        arity,
        n,
        cfg,
        BTreeMap::new(),
        |acc: &mut BTreeMap<(u64, DepthProfile), BigInt>, t| {
            for (s, p) in leaf_profiles(t) {
                *acc.entry((s as u64, p)).or_insert_with(BigInt::zero) += 1;
            }
        },
        merge_counts,
    )
}

/// First tree of size `n` satisfying `pred`, for mismatch reports.
fn witness(arity: usize, n: usize, cfg: &OracleConfig, pred: impl Fn(&DaryTree) -> bool) -> Option<String> {
    TreeEnumerator::new(arity, n, cfg.cap_for(arity), cfg.order)
        .ok()?
        .find(|t| pred(t))
        .map(|t| t.to_string())
}

/// Outcome of one comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseStatus {
    Match,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub status: CaseStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<String>,
    /// A tree exhibiting the disagreement, when one applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CaseResult {
    fn compare<T: PartialEq + fmt::Display>(name: impl Into<String>, expected: &T, actual: &T) -> Self {
        if expected == actual {
            CaseResult::matched(name)
        } else {
            CaseResult {
                name: name.into(),
                status: CaseStatus::Mismatch,
                expected: Some(expected.to_string()),
                actual: Some(actual.to_string()),
                witness: None,
            }
        }
    }

    fn matched(name: impl Into<String>) -> Self {
        CaseResult {
            name: name.into(),
            status: CaseStatus::Match,
            expected: None,
            actual: None,
            witness: None,
        }
    }

    fn from_identity(c: IdentityCheck) -> Self {
        match c.first_mismatch {
            None => CaseResult::matched(c.name),
            Some(k) => CaseResult {
                name: c.name,
                status: CaseStatus::Mismatch,
                expected: Some(format!("agreement to z^{}", c.order)),
                actual: Some(format!("first difference at z^{k}")),
                witness: None,
            },
        }
    }

    pub fn is_match(&self) -> bool {
        self.status == CaseStatus::Match
    }
}

/// Result of a verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub parameters: BTreeMap<String, String>,
    pub cases: Vec<CaseResult>,
    /// Wall-clock time; left out of the serialized forms so that reports
    /// are reproducible byte for byte.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(CaseResult::is_match)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.is_match())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["passed"] = self.passed().into();
        v
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("suite {} ({})\n", self.suite, params.join(", ")));
        for c in &self.cases {
            match c.status {
                CaseStatus::Match => out.push_str(&format!("  ok        {}\n", c.name)),
                CaseStatus::Mismatch => {
                    out.push_str(&format!("  MISMATCH  {}\n", c.name));
                    if let (Some(e), Some(a)) = (&c.expected, &c.actual) {
                        out.push_str(&format!("            expected {e}\n            actual   {a}\n"));
                    }
                    if let Some(w) = &c.witness {
                        out.push_str(&format!("            witness  {w}\n"));
                    }
                }
            }
        }
        let bad = self.mismatches().count();
        out.push_str(&format!(
            "{}: {} cases, {} mismatches\n",
            if bad == 0 { "PASS" } else { "FAIL" },
            self.cases.len(),
            bad
        ));
        out
    }
}

/// The suites [`run_suite`] knows, `all` excluded.
pub const SUITES: [&str; 7] = [
    "small-labels",
    "label-marks",
    "leaf-depths",
    "closed-vs-system",
    "gen1",
    "lambda-family",
    "cardano",
];

/// Parameter ranges for a suite; unset fields take per-suite defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteParams {
    pub d: Option<usize>,
    pub j_max: Option<i64>,
    pub m_max: Option<usize>,
    pub n_max: Option<usize>,
    pub order: Option<usize>,
    pub cap: Option<usize>,
}

impl SuiteParams {
    fn oracle(&self) -> OracleConfig {
        OracleConfig {
            cap: self.cap,
            order: CompositionOrder::Lex,
        }
    }

    fn n_max(&self, arity: usize) -> usize {
        let cap = self.cap.unwrap_or_else(|| oracle_cap(arity));
        self.n_max.unwrap_or(cap)
    }
}

/// Runs a named suite; `all` runs every suite into one report.
pub fn run_suite(name: &str, params: &SuiteParams) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut parameters = BTreeMap::new();
    let cases = match name {
        "small-labels" => small_labels_suite(params, &mut parameters)?,
        "label-marks" => label_marks_suite(params, &mut parameters)?,
        "leaf-depths" => leaf_depths_suite(params, &mut parameters)?,
        "closed-vs-system" => closed_vs_system_suite(params, &mut parameters)?,
        "gen1" => gen1_suite(params, &mut parameters)?,
        "lambda-family" => lambda_suite(params, &mut parameters)?,
        "cardano" => cardano_suite(&mut parameters),
        "all" => {
            let mut cases = Vec::new();
            for s in SUITES {
                let r = run_suite(s, params)?;
                for (k, v) in r.parameters {
                    parameters.insert(format!("{s}.{k}"), v);
                }
                cases.extend(r.cases.into_iter().map(|mut c| {
                    c.name = format!("{s}: {}", c.name);
                    c
                }));
            }
            cases
        }
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(VerificationReport {
        suite: name.to_string(),
        parameters,
        cases,
        elapsed: start.elapsed(),
    })
}

fn small_labels_suite(p: &SuiteParams, params: &mut BTreeMap<String, String>) -> Result<Vec<CaseResult>> {
    let d = p.d.unwrap_or(3);
    let steps = StepSet::natural(d)?;
    let j_max = p.j_max.unwrap_or(6);
    let n_max = p.n_max(d);
    params.insert("d".into(), d.to_string());
    params.insert("j_max".into(), j_max.to_string());
    params.insert("n_max".into(), n_max.to_string());
    let family = small_label_family(&steps, j_max, n_max)?;
    let cfg = p.oracle();
    let mut cases = Vec::new();
    for n in 0..=n_max {
        let hist = oracle_max_labels(&steps, n, &cfg)?;
        for j in -1..=j_max {
            let oracle: BigInt = hist
                .iter()
                .filter(|(m, _)| m.is_none_or(|m| m <= j))
                .map(|(_, c)| c)
                .sum();
            let series = family.get(j).expect("family covers -1..=j_max").coeff(n);
            let mut case = CaseResult::compare(format!("T_{j} [z^{n}]"), &Coefficient::from_integer(oracle), series);
            if !case.is_match() {
                case.witness = witness(d, n, &cfg, |t| {
                    label_histogram(t, &steps).is_ok_and(|h| h.max_label().is_none_or(|m| m <= j))
                });
            }
            cases.push(case);
        }
    }
    Ok(cases)
}

fn label_marks_suite(p: &SuiteParams, params: &mut BTreeMap<String, String>) -> Result<Vec<CaseResult>> {
    let j_max = p.j_max.unwrap_or(3);
    let m_max = p.m_max.unwrap_or(2);
    let n_max = p.n_max(3);
    params.insert("j_max".into(), j_max.to_string());
    params.insert("m_max".into(), m_max.to_string());
    params.insert("n_max".into(), n_max.to_string());
    let cfg = p.oracle();
    let mut cases = Vec::new();
    for m in 0..=m_max {
        let fam = s_general_system(m, n_max)?;
        for j in -j_max..=j_max {
            for n in 0..=n_max {
                let oracle = oracle_label_marks(n, j, m, &cfg)?;
                cases.push(CaseResult::compare(
                    format!("S_{j} m={m} [z^{n}]"),
                    &oracle,
                    fam.get(j).coeff(n),
                ));
            }
        }
    }
    Ok(cases)
}

fn leaf_depths_suite(p: &SuiteParams, params: &mut BTreeMap<String, String>) -> Result<Vec<CaseResult>> {
    let d = p.d.unwrap_or(3);
    let n_max = p.n_max(d);
    params.insert("d".into(), d.to_string());
    params.insert("n_max".into(), n_max.to_string());
    let cfg = p.oracle();
    let mut cases = Vec::new();
    for n in 1..=n_max {
        let oracle = oracle_leaf_depths(d, n, &cfg)?;
        let mut tables = vec![("general", dary_leaf_depth_table(d as u64, n as u64))];
        if d == 3 {
            tables.push(("ternary", leaf_depth_table(n as u64)));
        }
        for (which, table) in tables {
            let mut keys: Vec<_> = oracle.keys().chain(table.keys()).cloned().collect();
            keys.sort();
            keys.dedup();
            let bad: Vec<_> = keys.iter().filter(|k| oracle.get(k) != table.get(k)).collect();
            let name = format!("{which} formula, n={n}, {} cells", keys.len());
            match bad.first() {
                None => cases.push(CaseResult::matched(name)),
                Some(&key) => {
                    let show =
                        |v: Option<&BigInt>| format!("{} at s={}, m={}", v.cloned().unwrap_or_default(), key.0, key.1);
                    let (s, prof) = key.clone();
                    cases.push(CaseResult {
                        name: format!("{name}, {} differ", bad.len()),
                        status: CaseStatus::Mismatch,
                        expected: Some(show(oracle.get(key))),
                        actual: Some(show(table.get(key))),
                        witness: witness(d, n, &cfg, |t| {
                            leaf_profiles(t).into_iter().any(|(i, q)| i as u64 == s && q == prof)
                        }),
                    });
                }
            }
        }
    }
    Ok(cases)
}

fn closed_vs_system_suite(p: &SuiteParams, params: &mut BTreeMap<String, String>) -> Result<Vec<CaseResult>> {
    let j_max = p.j_max.unwrap_or(10);
    let order = p.order.unwrap_or(30);
    let marked_j = j_max.min(6);
    let marked_order = order.min(20);
    params.insert("j_max".into(), j_max.to_string());
    params.insert("order".into(), order.to_string());
    params.insert("marked_j_max".into(), marked_j.to_string());
    params.insert("marked_order".into(), marked_order.to_string());
    let mut cases: Vec<CaseResult> = small_labels::closed_vs_system(j_max, order)?
        .into_iter()
        .map(CaseResult::from_identity)
        .collect();
    cases.extend(
        label_marks::closed_vs_system(-1..=marked_j, marked_order)?
            .into_iter()
            .map(CaseResult::from_identity),
    );
    Ok(cases)
}

fn gen1_suite(p: &SuiteParams, params: &mut BTreeMap<String, String>) -> Result<Vec<CaseResult>> {
    let m_max = p.m_max.unwrap_or(3);
    let order = p.order.unwrap_or(12);
    params.insert("m_max".into(), m_max.to_string());
    params.insert("order".into(), order.to_string());
    let mut cases = Vec::new();
    for m in 0..=m_max {
        cases.extend(verify_gen1(m, order)?.into_iter().map(CaseResult::from_identity));
    }
    Ok(cases)
}

fn lambda_suite(p: &SuiteParams, params: &mut BTreeMap<String, String>) -> Result<Vec<CaseResult>> {
    let j_max = p.j_max.unwrap_or(5);
    let order = p.order.unwrap_or(12);
    let degree = 6;
    params.insert("j_range".into(), format!("-3..={j_max}"));
    params.insert("order".into(), order.to_string());
    params.insert("lambda_degree".into(), degree.to_string());
    Ok(verify_lambda_family(-3..=j_max, order, degree)?
        .into_iter()
        .map(|c| match c.first_mismatch {
            None => CaseResult::matched(format!("lambda family j={}", c.j)),
            Some((n, k)) => CaseResult {
                name: format!("lambda family j={}", c.j),
                status: CaseStatus::Mismatch,
                expected: Some("identity".into()),
                actual: Some(format!("differs at z^{n} lambda^{k}")),
                witness: None,
            },
        })
        .collect())
}

/// Points and tolerances of the Cardano check, with the number of terms.
pub const CARDANO_POINTS: [(f64, f64); 4] = [(0.05, 1e-12), (-0.05, 1e-12), (0.1, 1e-6), (-0.1, 1e-6)];
pub const CARDANO_TERMS: u64 = 40;

fn cardano_suite(params: &mut BTreeMap<String, String>) -> Vec<CaseResult> {
    params.insert("terms".into(), CARDANO_TERMS.to_string());
    CARDANO_POINTS
        .iter()
        .map(|&(z, tol)| {
            let name = format!("z={z}, tolerance {tol:e}");
            let closed = cardano_eval(z);
            let partial = ttilde_partial_sum(z, CARDANO_TERMS);
            match closed {
                Ok(c) if (c - partial).abs() < tol => CaseResult::matched(name),
                Ok(c) => CaseResult {
                    name,
                    status: CaseStatus::Mismatch,
                    expected: Some(format!("{partial:.17e} (tail ratio {:.3e})", ttilde_tail_ratio(z))),
                    actual: Some(format!("{c:.17e}, difference {:.3e}", (c - partial).abs())),
                    witness: None,
                },
                Err(e) => CaseResult {
                    name,
                    status: CaseStatus::Mismatch,
                    expected: Some(format!("{partial:.17e}")),
                    actual: Some(e.to_string()),
                    witness: None,
                },
            }
        })
        .collect()
}
