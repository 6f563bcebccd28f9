//! The zigzag experiments: the limit `L(α)`, floor-sum interval counts of the
//! Lebesgue partitions of `z`, and the quadratic-variation experiments on
//! `z`, `p` and `q`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::follmer::{make_fm, make_smooth_cut, SecondDerivativeProfile};
use crate::partition::{lebesgue_count, make_rho, make_sigma, make_tau, LevelGrid, Partition};
use crate::path::{CadlagPath, Zigzag};
use crate::qv::{estimate_limit, path_values, stopped_sum_from_values, LimitDiagnostic, Tolerance};
use crate::sum::CompensatedSum;
use crate::time::{Side, Time};

/// A grid shift `α ∈ [0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shift(f64);

impl Shift {
    pub fn new(alpha: f64) -> Result<Self> {
        if (0.0..1.0).contains(&alpha) {
            Ok(Shift(alpha))
        } else {
            Err(domain(format!("alpha = {alpha} must lie in [0, 1)")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Terms in the direct sum of the oracle before the integral tail.
pub const ORACLE_TERMS: u64 = 10_000;
/// Error bound of [`l_alpha_oracle`] (midpoint tail error plus rounding).
pub const ORACLE_BOUND: f64 = 1e-11;

/// `L(α)` from the telescoped series together with an independent value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LAlphaResult {
    pub alpha: f64,
    pub series_value: f64,
    pub oracle_value: f64,
    pub terms_used: usize,
    /// Bound on `|series_value − L(α)|`.
    pub tail_bound: f64,
}

/// `2·Σ_{l=1}^{K} [l/(α+l)² − l/(α+l+1)²]`, without any tail.
pub fn l_alpha_partial(alpha: f64, terms: usize) -> f64 {
    let mut acc = CompensatedSum::new();
    for l in 1..=terms {
        let l = l as f64;
        acc += l / ((alpha + l) * (alpha + l)) - l / ((alpha + l + 1.0) * (alpha + l + 1.0));
    }
    2.0 * acc.value()
}

/// `L(α) = 2·Σ_{l≥1} [l/(α+l)² − l/(α+l+1)²]` from `terms` series terms plus
/// a tail correction.
///
/// Summation by parts turns the first `K` terms into
/// `Σ_{l≤K} (l+α)^{−2} − K·(K+1+α)^{−2}`, so the missing tail is
/// `2·[K·(K+1+α)^{−2} + Σ_{l>K} (l+α)^{−2}]`. The last sum is evaluated by
/// Euler–Maclaurin to third order; the remainder is below
/// `2/(30·(K+1+α)^5)`.
pub fn l_alpha_series(alpha: f64, terms: usize) -> Result<LAlphaResult> {
    let alpha = Shift::new(alpha)?.value();
    if terms == 0 {
        return Err(domain("terms must be at least 1"));
    }
    let k = terms as f64;
    let x0 = k + 1.0 + alpha;
    let em_tail = 1.0 / x0 + 1.0 / (2.0 * x0 * x0) + 1.0 / (6.0 * x0 * x0 * x0);
    let mut acc = CompensatedSum::new();
    acc += l_alpha_partial(alpha, terms);
    acc += 2.0 * k / (x0 * x0);
    acc += 2.0 * em_tail;
    let series_value = acc.value();
    let tail_bound = 2.0 / (30.0 * x0.powi(5)) + 8.0 * f64::EPSILON * series_value;
    Ok(LAlphaResult {
        alpha,
        series_value,
        oracle_value: l_alpha_oracle(alpha)?,
        terms_used: terms,
        tail_bound,
    })
}

/// `L(α) = 2·Σ_{l≥1} (l+α)^{−2}` by direct backward summation of the first
/// [`ORACLE_TERMS`] terms plus the midpoint tail `∫_{N+1/2}^∞ (x+α)^{−2} dx`.
/// Defined for `α ∈ [0, 1]`.
pub fn l_alpha_oracle(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(domain(format!("alpha = {alpha} must lie in [0, 1]")));
    }
    let n = ORACLE_TERMS as f64;
    let mut acc = CompensatedSum::new();
    acc += 1.0 / (n + 0.5 + alpha);
    for l in (1..=ORACLE_TERMS).rev() {
        let a = l as f64 + alpha;
        acc += 1.0 / (a * a);
    }
    Ok(2.0 * acc.value())
}

/// Whether `(k+α)²·m ≤ n`, i.e. `k + α ≤ √(n/m)`.
fn fits(k: u64, alpha: f64, m: u64, n: u64) -> bool {
    let a = k as f64 + alpha;
    a * a * (m as f64) <= n as f64
}

/// `⌊√(n/m) − α⌋`, exact for dyadic `α` and `n ≤ 2^40`.
fn floor_root_minus(n: u64, m: u64, alpha: f64) -> u64 {
    let mut k = ((n as f64 / m as f64).sqrt() - alpha).floor().max(0.0) as u64;
    while fits(k + 1, alpha, m, n) {
        k += 1;
    }
    while k > 0 && !fits(k, alpha, m, n) {
        k -= 1;
    }
    k
}

/// `⌊n/(l+α)²⌋`: the number of `m ≥ 1` with `(l+α)²·m ≤ n`.
fn floor_ratio(n: u64, l: u64, alpha: f64) -> u64 {
    let a = l as f64 + alpha;
    let mut m = (n as f64 / (a * a)).floor() as u64;
    while fits(l, alpha, m + 1, n) {
        m += 1;
    }
    while m > 0 && !fits(l, alpha, m, n) {
        m -= 1;
    }
    m
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(domain("n must be at least 1"))
    } else {
        Ok(())
    }
}

/// `2·Σ_{m=1}^{n} ⌊√(n/m) − α⌋`.
pub fn count_formula(n: u64, alpha: f64) -> Result<u64> {
    check_n(n)?;
    let alpha = Shift::new(alpha)?.value();
    Ok(2 * (1..=n).map(|m| floor_root_minus(n, m, alpha)).sum::<u64>())
}

/// `count_formula(n, α) / n`.
pub fn empirical_l(n: u64, alpha: f64) -> Result<f64> {
    Ok(count_formula(n, alpha)? as f64 / n as f64)
}

/// `(l, L_l)` for `l = 1..⌊√n⌋`, with
/// `L_l = ⌊n/(l+α)²⌋ − ⌊n/(l+1+α)²⌋` the number of `m` whose floor term equals `l`.
pub fn bucket_counts(n: u64, alpha: f64) -> Result<Vec<(u64, u64)>> {
    check_n(n)?;
    let alpha = Shift::new(alpha)?.value();
    let top = (n as f64).sqrt().floor() as u64;
    let top = if (top + 1) * (top + 1) <= n {
        top + 1
    } else if top * top > n {
        top - 1
    } else {
        top
    };
    Ok((1..=top)
        .map(|l| (l, floor_ratio(n, l, alpha) - floor_ratio(n, l + 1, alpha)))
        .collect())
}

/// Floor-sum count against the interval count of the Lebesgue partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountResult {
    pub n: u64,
    pub alpha: f64,
    pub formula_count: u64,
    pub geometric_count: Option<u64>,
    /// `geometric_count − formula_count`.
    pub boundary_offset: Option<i64>,
    /// Consecutive interior breakpoints of the partition lie on adjacent levels.
    pub unit_steps: Option<bool>,
}

/// Interval count of `ρⁿ(α)` by level-crossing enumeration, without storing
/// the partition.
pub fn geometric_count(n: u64, alpha: f64) -> Result<(u64, bool)> {
    let grid = LevelGrid::inv_sqrt(n, Shift::new(alpha)?.value())?;
    let c = lebesgue_count(&CadlagPath::zigzag(Zigzag::z()), &grid)?;
    Ok((c.intervals, c.unit_steps))
}

pub fn count_result(n: u64, alpha: f64, with_geometry: bool) -> Result<CountResult> {
    let formula_count = count_formula(n, alpha)?;
    let geo = if with_geometry {
        Some(geometric_count(n, alpha)?)
    } else {
        None
    };
    Ok(CountResult {
        n,
        alpha,
        formula_count,
        geometric_count: geo.map(|g| g.0),
        boundary_offset: geo.map(|g| g.0 as i64 - formula_count as i64),
        unit_steps: geo.map(|g| g.1),
    })
}

/// One CSV row `experiment,alpha,n,t,value,diag`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub experiment: String,
    pub alpha: Option<f64>,
    pub n: u64,
    pub t: f64,
    pub value: f64,
    pub diag: String,
}

pub const EXPERIMENT_HEADER: &str = "experiment,alpha,n,t,value,diag";

pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = format!("{EXPERIMENT_HEADER}\n");
    for r in rows {
        let alpha = r.alpha.map(|a| a.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.experiment, alpha, r.n, r.t, r.value, r.diag
        ));
    }
    out
}

fn parity(n: u64) -> &'static str {
    if n.is_multiple_of(2) {
        "even"
    } else {
        "odd"
    }
}

fn summary_row(experiment: &str, alpha: Option<f64>, t: f64, d: &LimitDiagnostic) -> ExperimentRow {
    let diag = if d.split_detected {
        format!(
            "split even={} odd={}",
            d.even_limit.unwrap_or(f64::NAN),
            d.odd_limit.unwrap_or(f64::NAN)
        )
    } else if d.converged {
        "converged".to_string()
    } else {
        "unresolved".to_string()
    };
    ExperimentRow {
        experiment: format!("{experiment}_limit"),
        alpha,
        n: d.values.last().map(|v| v.0).unwrap_or(0),
        t,
        value: d.estimate.unwrap_or(f64::NAN),
        diag,
    }
}

/// Evaluates `f` for each `n` in parallel, keeping grid order.
fn per_n<T: Send>(n_grid: &[u64], f: impl Fn(u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    n_grid.par_iter().map(|&n| f(n)).collect()
}

fn column(n_grid: &[u64], values: &[Vec<f64>], k: usize) -> Vec<(u64, f64)> {
    n_grid.iter().zip(values).map(|(&n, v)| (n, v[k])).collect()
}

fn weighted_from_values(x: &[f64], f2: &SecondDerivativeProfile) -> f64 {
    x.windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            f2.eval(w[0]) * d * d
        })
        .collect::<CompensatedSum>()
        .value()
}

fn stopped(path: &CadlagPath, partition: &Partition, x: &[f64], t: f64) -> f64 {
    stopped_sum_from_values(path, partition, x, Time::Abs(t))
}

/// Stopped quadratic variation of `z` along `ρⁿ(α)`.
#[derive(Debug, Clone, Serialize)]
pub struct ZigzagQvReport {
    pub alpha: f64,
    /// `L(α)`.
    pub reference: f64,
    pub rows: Vec<ExperimentRow>,
    /// `(t, diagnostic over n)`.
    pub diagnostics: Vec<(f64, LimitDiagnostic)>,
}

pub fn zigzag_qv_experiment(
    alpha: f64,
    n_grid: &[u64],
    t_grid: &[f64],
    tol: Tolerance,
) -> Result<ZigzagQvReport> {
    let alpha = Shift::new(alpha)?.value();
    if let Some(t) = t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(domain(format!("t = {t} outside [0, 1]")));
    }
    let z = CadlagPath::zigzag(Zigzag::z());
    let values = per_n(n_grid, |n| {
        let rho = make_rho(n, alpha)?;
        let x = path_values(&z, &rho)?;
        Ok(t_grid
            .iter()
            .map(|&t| stopped(&z, &rho, &x, t))
            .collect::<Vec<f64>>())
    })?;
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    for (k, &t) in t_grid.iter().enumerate() {
        let col = column(n_grid, &values, k);
        for &(n, v) in &col {
            rows.push(ExperimentRow {
                experiment: "zigzag_qv".into(),
                alpha: Some(alpha),
                n,
                t,
                value: v,
                diag: parity(n).into(),
            });
        }
        let d = estimate_limit(&col, tol)?;
        rows.push(summary_row("zigzag_qv", Some(alpha), t, &d));
        diagnostics.push((t, d));
    }
    Ok(ZigzagQvReport {
        alpha,
        reference: l_alpha_oracle(alpha)?,
        rows,
        diagnostics,
    })
}

/// Quadratic variation of `p` along `σⁿ`, whose parity alternation leaves
/// `[p]_1` without a limit.
#[derive(Debug, Clone, Serialize)]
pub struct PAlternationReport {
    pub rows: Vec<ExperimentRow>,
    pub at_0_9: LimitDiagnostic,
    pub at_1: LimitDiagnostic,
    pub at_2: LimitDiagnostic,
    /// `Σ f″(p(u))(Δp)²` with the smooth cut-off profile.
    pub smooth_cut: LimitDiagnostic,
    /// `L(0) + 4`.
    pub expected_odd_at_1: f64,
    /// `L(1/2) + 4`.
    pub expected_even_at_1: f64,
    /// `L(0) + L(1/2) + 4`.
    pub expected_at_2: f64,
}

pub fn p_alternation_experiment(n_grid: &[u64], tol: Tolerance) -> Result<PAlternationReport> {
    let p = CadlagPath::zigzag(Zigzag::p());
    let cut = make_smooth_cut();
    let times = [0.9, 1.0, 2.0];
    let values = per_n(n_grid, |n| {
        let sigma = make_sigma(n)?;
        let x = path_values(&p, &sigma)?;
        let mut v: Vec<f64> = times.iter().map(|&t| stopped(&p, &sigma, &x, t)).collect();
        v.push(weighted_from_values(&x, &cut));
        Ok(v)
    })?;
    let mut rows = Vec::new();
    let mut diags = Vec::new();
    for (k, name) in ["p_qv", "p_qv", "p_qv", "p_smooth_cut"].iter().enumerate() {
        let t = if k < 3 { times[k] } else { 2.0 };
        let col = column(n_grid, &values, k);
        for &(n, v) in &col {
            rows.push(ExperimentRow {
                experiment: name.to_string(),
                alpha: None,
                n,
                t,
                value: v,
                diag: parity(n).into(),
            });
        }
        let d = estimate_limit(&col, tol)?;
        rows.push(summary_row(name, None, t, &d));
        diags.push(d);
    }
    let l0 = l_alpha_oracle(0.0)?;
    let lh = l_alpha_oracle(0.5)?;
    let mut diags = diags.into_iter();
    Ok(PAlternationReport {
        rows,
        at_0_9: diags.next().expect("four columns"),
        at_1: diags.next().expect("four columns"),
        at_2: diags.next().expect("four columns"),
        smooth_cut: diags.next().expect("four columns"),
        expected_odd_at_1: l0 + 4.0,
        expected_even_at_1: lh + 4.0,
        expected_at_2: l0 + lh + 4.0,
    })
}

/// Quadratic variation of `q` along `τⁿ` on both sides of its jump at 1.
#[derive(Debug, Clone, Serialize)]
pub struct QJumpReport {
    pub delta: f64,
    pub rows: Vec<ExperimentRow>,
    /// `[q]_1`.
    pub at_1: LimitDiagnostic,
    /// `[q]_{1+δ}`.
    pub at_1_plus_delta: LimitDiagnostic,
    /// `[q]_{1+δ} − [q]_1`.
    pub increment: LimitDiagnostic,
    /// `L(0)`.
    pub expected_increment: f64,
    /// `(Δq(1))²`.
    pub squared_path_jump: f64,
}

pub fn q_experiment(n_grid: &[u64], delta: f64, tol: Tolerance) -> Result<QJumpReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(domain(format!("delta = {delta} must lie in (0, 1)")));
    }
    let q = CadlagPath::zigzag(Zigzag::q());
    let values = per_n(n_grid, |n| {
        let tau = make_tau(n)?;
        let x = path_values(&q, &tau)?;
        let a = stopped(&q, &tau, &x, 1.0);
        let b = stopped(&q, &tau, &x, 1.0 + delta);
        Ok(vec![a, b, b - a])
    })?;
    let mut rows = Vec::new();
    let mut diags = Vec::new();
    for (k, (name, t)) in [
        ("q_qv", 1.0),
        ("q_qv", 1.0 + delta),
        ("q_increment", 1.0 + delta),
    ]
    .into_iter()
    .enumerate()
    {
        let col = column(n_grid, &values, k);
        for &(n, v) in &col {
            rows.push(ExperimentRow {
                experiment: name.into(),
                alpha: None,
                n,
                t,
                value: v,
                diag: parity(n).into(),
            });
        }
        let d = estimate_limit(&col, tol)?;
        rows.push(summary_row(name, None, t, &d));
        diags.push(d);
    }
    let jump = q.eval(1.0)? - q.left_limit(1.0)?;
    let mut diags = diags.into_iter();
    Ok(QJumpReport {
        delta,
        rows,
        at_1: diags.next().expect("three columns"),
        at_1_plus_delta: diags.next().expect("three columns"),
        increment: diags.next().expect("three columns"),
        expected_increment: l_alpha_oracle(0.0)?,
        squared_path_jump: jump * jump,
    })
}

/// Pointwise limit of `f″_m` as `m → ∞`: `w·1_{[0,1]}(w)`.
pub fn fm_limit_profile(w: f64) -> f64 {
    if (0.0..=1.0).contains(&w) {
        w
    } else {
        0.0
    }
}

/// Scan of `f″_m(q(t−))` over a dense set of times.
#[derive(Debug, Clone, Serialize)]
pub struct LeftLimitScan {
    pub samples: usize,
    /// Every sampled `q(t−)` lies in `(−∞,0] ∪ (1,∞)`.
    pub avoids_unit_interval: bool,
    /// `max |w·1_{[0,1]}(w)|` at `w = q(t−)`; zero when the limiting integrand
    /// vanishes on the sample.
    pub limit_profile_max: f64,
    /// `(m, fraction of samples with f″_m(q(t−)) ≠ 0, largest such t)`.
    pub per_m: Vec<(u32, f64, f64)>,
}

/// Uniform times `2i/count` plus hump knots on both sides of 1 (down to
/// distances about `10^{−12}`).
fn scan_times(count: usize) -> Vec<Time> {
    let mut out: Vec<Time> = (1..=count)
        .map(|i| Time::Abs(2.0 * i as f64 / count as f64))
        .collect();
    for m in 0..20u32 {
        for u in [1.0, 0.75, 0.5, 0.3] {
            let t = Time::Near {
                side: Side::Before,
                hump: m,
                dist: u,
            };
            out.push(t);
            out.push(t.reflect());
        }
    }
    out.sort();
    out.dedup();
    out
}

pub fn scan_left_limits(m_list: &[u32], count: usize) -> Result<LeftLimitScan> {
    let q = CadlagPath::zigzag(Zigzag::q());
    let times = scan_times(count);
    let left: Vec<(Time, f64)> = times.iter().map(|&t| (t, q.left_value(t))).collect();
    let avoids = left.iter().all(|&(_, w)| w <= 0.0 || w > 1.0);
    let limit_max = left
        .iter()
        .map(|&(_, w)| fm_limit_profile(w).abs())
        .fold(0.0, f64::max);
    let per_m = m_list
        .iter()
        .map(|&m| {
            let f = make_fm(m)?;
            let hits: Vec<&(Time, f64)> = left.iter().filter(|(_, w)| f.eval(*w) != 0.0).collect();
            let frac = hits.len() as f64 / left.len() as f64;
            let last = hits.last().map(|(t, _)| t.to_f64()).unwrap_or(f64::NAN);
            Ok((m, frac, last))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LeftLimitScan {
        samples: left.len(),
        avoids_unit_interval: avoids,
        limit_profile_max: limit_max,
        per_m,
    })
}

/// `Σ f″_m(q(u))(Δq)²` along `τⁿ` for each `m`, against the lower bound `L(0)`.
#[derive(Debug, Clone, Serialize)]
pub struct NonrepresentationReport {
    pub rows: Vec<ExperimentRow>,
    pub per_m: Vec<(u32, LimitDiagnostic)>,
    /// `L(0)`.
    pub lower_bound: f64,
    pub scan: LeftLimitScan,
}

pub const SCAN_SAMPLES: usize = 20_000;

pub fn nonrepresentation_experiment(
    m_list: &[u32],
    n_grid: &[u64],
    tol: Tolerance,
) -> Result<NonrepresentationReport> {
    let profiles = m_list
        .iter()
        .map(|&m| make_fm(m))
        .collect::<Result<Vec<_>>>()?;
    let q = CadlagPath::zigzag(Zigzag::q());
    let values = per_n(n_grid, |n| {
        let tau = make_tau(n)?;
        let x = path_values(&q, &tau)?;
        Ok(profiles
            .iter()
            .map(|f| weighted_from_values(&x, f))
            .collect::<Vec<f64>>())
    })?;
    let mut rows = Vec::new();
    let mut per_m = Vec::new();
    for (k, &m) in m_list.iter().enumerate() {
        let col = column(n_grid, &values, k);
        let name = format!("q_weighted_f{m}");
        for &(n, v) in &col {
            rows.push(ExperimentRow {
                experiment: name.clone(),
                alpha: None,
                n,
                t: 2.0,
                value: v,
                diag: parity(n).into(),
            });
        }
        let d = estimate_limit(&col, tol)?;
        rows.push(summary_row(&name, None, 2.0, &d));
        per_m.push((m, d));
    }
    Ok(NonrepresentationReport {
        rows,
        per_m,
        lower_bound: l_alpha_oracle(0.0)?,
        scan: scan_left_limits(m_list, SCAN_SAMPLES)?,
    })
}
