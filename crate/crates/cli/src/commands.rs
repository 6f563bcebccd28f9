use anyhow::{bail, Result};
use pathwise::follmer::{corollary_check, follmer_breakdown, TestFunction};
use pathwise::partition::{
    check_a1, check_a2, lebesgue_partition_on, LevelGrid, PartitionFamily, VerdictTolerance,
};
use pathwise::qv::{LimitDiagnostic, Tolerance};
use pathwise::zigzag_lab::{
    bucket_counts, count_result, l_alpha_series, nonrepresentation_experiment,
    p_alternation_experiment, q_experiment, rows_to_csv, zigzag_qv_experiment, ORACLE_BOUND,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, Common, Target};
use crate::input::{
    n_grid, parse_f64_list, parse_partition, parse_path, parse_u32_list, parse_u64_list,
};

/// Agreement for limits compared with their predicted values.
const LIMIT_TOL: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

/// What a subcommand produces: a CSV table, a JSON report and its checks.
pub struct Output {
    pub csv: String,
    pub report: Value,
    pub checks: Vec<Check>,
}

pub fn name(command: &Command) -> &'static str {
    match command {
        Command::LAlpha { .. } => "l-alpha",
        Command::Count { .. } => "count",
        Command::ZigzagQv { .. } => "zigzag-qv",
        Command::PAlternation { .. } => "p-alternation",
        Command::QJump { .. } => "q-jump",
        Command::Nonrepresentation { .. } => "nonrepresentation",
        Command::FormulaCheck { .. } => "formula-check",
        Command::CorollaryCheck { .. } => "corollary-check",
        Command::Assumptions { .. } => "assumptions",
        Command::LebPartition { .. } => "leb-partition",
    }
}

pub fn run(command: &Command, common: &Common) -> Result<Output> {
    match command {
        Command::LAlpha { alpha, terms } => l_alpha(*alpha, *terms),
        Command::Count { n, alpha } => count(&parse_u64_list(n)?, &parse_f64_list(alpha)?),
        Command::ZigzagQv { alpha, grid, t } => {
            zigzag_qv(*alpha, &n_grid(grid)?, &parse_f64_list(t)?)
        }
        Command::PAlternation { grid } => p_alternation(&n_grid(grid)?),
        Command::QJump { grid, delta } => q_jump(&n_grid(grid)?, *delta),
        Command::Nonrepresentation { grid, m } => {
            nonrepresentation(&parse_u32_list(m)?, &n_grid(grid)?)
        }
        Command::FormulaCheck { target, f, n, eps } => formula_check(
            target,
            common.seed,
            f,
            &parse_u64_list(n)?,
            &parse_f64_list(eps)?,
        ),
        Command::CorollaryCheck {
            target,
            f,
            n,
            resolution,
        } => corollary(target, common.seed, f, &parse_u64_list(n)?, *resolution),
        Command::Assumptions { target, n, eps, t } => assumptions(
            target,
            common.seed,
            &parse_u64_list(n)?,
            &parse_f64_list(eps)?,
            t.as_deref(),
        ),
        Command::LebPartition {
            path,
            n,
            alpha,
            c,
            r,
        } => leb_partition(path, common.seed, *n, *alpha, *c, *r),
    }
}

fn l_alpha(alpha: f64, terms: usize) -> Result<Output> {
    let r = l_alpha_series(alpha, terms)?;
    let gap = (r.series_value - r.oracle_value).abs();
    let checks = vec![check(
        "series_matches_oracle",
        gap <= r.tail_bound + ORACLE_BOUND,
        format!("|series - oracle| = {gap:.3e}"),
    )];
    let csv = format!(
        "alpha,terms,series_value,oracle_value,tail_bound\n{},{},{},{},{}\n",
        r.alpha, r.terms_used, r.series_value, r.oracle_value, r.tail_bound
    );
    Ok(Output {
        csv,
        report: json!(r),
        checks,
    })
}

fn count(ns: &[u64], alphas: &[f64]) -> Result<Output> {
    let jobs: Vec<(f64, u64)> = alphas
        .iter()
        .flat_map(|&a| ns.iter().map(move |&n| (a, n)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(a, n)| {
            let r = count_result(n, a, true)?;
            let weighted: u64 = bucket_counts(n, a)?.iter().map(|&(l, c)| l * c).sum();
            Ok((r, 2 * weighted))
        })
        .collect::<pathwise::Result<Vec<_>>>()?;
    let mut csv =
        String::from("n,alpha,formula_count,geometric_count,boundary_offset,unit_steps\n");
    let mut checks = Vec::new();
    for &a in alphas {
        let of_alpha: Vec<_> = results.iter().filter(|r| r.0.alpha == a).collect();
        let mut offsets: Vec<i64> = of_alpha
            .iter()
            .filter_map(|r| r.0.boundary_offset)
            .collect();
        offsets.sort_unstable();
        offsets.dedup();
        checks.push(check(
            format!("constant_offset_alpha_{a}"),
            offsets.len() == 1,
            format!("offsets {offsets:?}"),
        ));
        checks.push(check(
            format!("bucket_identity_alpha_{a}"),
            of_alpha.iter().all(|r| r.0.formula_count == r.1),
            "count_formula = 2 sum l L_l",
        ));
        checks.push(check(
            format!("unit_steps_alpha_{a}"),
            of_alpha.iter().all(|r| r.0.unit_steps == Some(true)),
            "interior increments equal the grid spacing",
        ));
    }
    for (r, _) in &results {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.alpha,
            r.formula_count,
            r.geometric_count.map(|g| g.to_string()).unwrap_or_default(),
            r.boundary_offset.map(|g| g.to_string()).unwrap_or_default(),
            r.unit_steps.map(|g| g.to_string()).unwrap_or_default()
        ));
    }
    let report: Vec<_> = results.iter().map(|r| r.0).collect();
    Ok(Output {
        csv,
        report: json!(report),
        checks,
    })
}

fn near(v: Option<f64>, target: f64) -> bool {
    v.is_some_and(|v| (v - target).abs() <= LIMIT_TOL)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6}"))
        .unwrap_or_else(|| "none".into())
}

fn zigzag_qv(alpha: f64, ns: &[u64], ts: &[f64]) -> Result<Output> {
    let r = zigzag_qv_experiment(alpha, ns, ts, Tolerance::default())?;
    let mut checks = Vec::new();
    for (t, d) in &r.diagnostics {
        if *t < 1.0 {
            let large: Vec<f64> = d
                .values
                .iter()
                .filter(|v| v.0 >= 10_000)
                .map(|v| v.1)
                .collect();
            if !large.is_empty() {
                let worst = large.iter().copied().fold(0.0, f64::max);
                checks.push(check(
                    format!("vanishes_before_1_t_{t}"),
                    worst <= 0.02,
                    format!("max {worst:.4}"),
                ));
            }
        } else if *t == 1.0 {
            let (n, v) = *d.values.last().expect("non-empty grid");
            checks.push(check(
                "limit_at_1",
                (v - r.reference).abs() <= LIMIT_TOL,
                format!("n={n}: {v:.6} vs L({alpha}) = {:.6}", r.reference),
            ));
        }
    }
    Ok(Output {
        csv: rows_to_csv(&r.rows),
        report: json!(r),
        checks,
    })
}

fn split_check(name: &str, d: &LimitDiagnostic, odd: f64, even: f64) -> Check {
    check(
        name,
        d.split_detected && near(d.odd_limit, odd) && near(d.even_limit, even),
        format!(
            "odd {} vs {odd:.6}, even {} vs {even:.6}",
            fmt_opt(d.odd_limit),
            fmt_opt(d.even_limit)
        ),
    )
}

fn p_alternation(ns: &[u64]) -> Result<Output> {
    let r = p_alternation_experiment(ns, Tolerance::default())?;
    let checks = vec![
        split_check(
            "split_at_1",
            &r.at_1,
            r.expected_odd_at_1,
            r.expected_even_at_1,
        ),
        check(
            "single_limit_at_2",
            near(r.at_2.odd_limit, r.expected_at_2) && near(r.at_2.even_limit, r.expected_at_2),
            format!(
                "odd {} even {} vs {:.6}",
                fmt_opt(r.at_2.odd_limit),
                fmt_opt(r.at_2.even_limit),
                r.expected_at_2
            ),
        ),
        split_check(
            "smooth_cut_split",
            &r.smooth_cut,
            r.expected_odd_at_1,
            r.expected_even_at_1,
        ),
    ];
    Ok(Output {
        csv: rows_to_csv(&r.rows),
        report: json!(r),
        checks,
    })
}

fn q_jump(ns: &[u64], delta: f64) -> Result<Output> {
    let r = q_experiment(ns, delta, Tolerance::default())?;
    let (n, v) = *r.increment.values.last().expect("non-empty grid");
    let checks = vec![check(
        "jump_equals_l0",
        (v - r.expected_increment).abs() <= LIMIT_TOL,
        format!("n={n}: {v:.6} vs {:.6}", r.expected_increment),
    )];
    Ok(Output {
        csv: rows_to_csv(&r.rows),
        report: json!(r),
        checks,
    })
}

fn nonrepresentation(ms: &[u32], ns: &[u64]) -> Result<Output> {
    let r = nonrepresentation_experiment(ms, ns, Tolerance::default())?;
    let mut checks: Vec<Check> = r
        .per_m
        .iter()
        .map(|(m, d)| {
            check(
                format!("lower_bound_m_{m}"),
                d.estimate.is_some_and(|e| e >= r.lower_bound - LIMIT_TOL),
                format!(
                    "limit {} vs L(0) = {:.6}",
                    fmt_opt(d.estimate),
                    r.lower_bound
                ),
            )
        })
        .collect();
    checks.push(check(
        "limit_profile_vanishes_on_left_limits",
        r.scan.avoids_unit_interval && r.scan.limit_profile_max == 0.0,
        format!("{} sampled times", r.scan.samples),
    ));
    Ok(Output {
        csv: rows_to_csv(&r.rows),
        report: json!(r),
        checks,
    })
}

fn formula_check(target: &Target, seed: u64, fs: &str, ns: &[u64], eps: &[f64]) -> Result<Output> {
    let path = parse_path(&target.path, seed)?;
    let family = parse_partition(&target.partition, path.domain_end())?;
    let fs = fs
        .split(',')
        .map(|f| Ok((f.trim().to_string(), TestFunction::by_name(f.trim())?)))
        .collect::<Result<Vec<_>>>()?;
    let partitions = ns
        .par_iter()
        .map(|&n| family.generate(n))
        .collect::<pathwise::Result<Vec<_>>>()?;
    let mut csv = String::from("path,family,n,f,epsilon,residual\n");
    let mut rows = Vec::new();
    let mut worst_exact = 0.0f64;
    for (n, p) in ns.iter().zip(&partitions) {
        for (fname, f) in &fs {
            for &e in eps {
                let b = follmer_breakdown(&path, p, f, e)?;
                if fname == "affine" || fname == "square" {
                    worst_exact = worst_exact.max(b.residual.abs());
                }
                csv.push_str(&format!(
                    "{},{},{n},{fname},{e},{}\n",
                    target.path,
                    family.name(),
                    b.residual
                ));
                rows.push(json!({"n": n, "f": fname, "epsilon": e, "breakdown": b}));
            }
        }
    }
    let checks = vec![check(
        "affine_and_square_residuals_vanish",
        worst_exact <= 1e-9,
        format!("max |residual| = {worst_exact:.3e}"),
    )];
    Ok(Output {
        csv,
        report: json!({"family": family.name(), "rows": rows}),
        checks,
    })
}

fn corollary(target: &Target, seed: u64, f: &str, ns: &[u64], resolution: f64) -> Result<Output> {
    let path = parse_path(&target.path, seed)?;
    let family = parse_partition(&target.partition, path.domain_end())?;
    let profile = TestFunction::by_name(f)?.second_derivative();
    let r = corollary_check(
        &path,
        &family,
        ns,
        &profile,
        resolution,
        Tolerance::default(),
    )?;
    let checks = vec![check(
        "stieltjes_matches_limit",
        r.difference.is_some_and(|d| d <= 1e-6),
        format!("difference {}", fmt_opt(r.difference)),
    )];
    let mut csv = String::from("n,weighted_sum,stieltjes\n");
    for (n, v) in &r.weighted_limit.values {
        csv.push_str(&format!("{n},{v},{}\n", r.stieltjes));
    }
    Ok(Output {
        csv,
        report: json!(r),
        checks,
    })
}

fn assumptions(
    target: &Target,
    seed: u64,
    ns: &[u64],
    eps: &[f64],
    s: Option<&str>,
) -> Result<Output> {
    let path = parse_path(&target.path, seed)?;
    let t_end = path.domain_end();
    let family = parse_partition(&target.partition, t_end)?;
    let s_list = match s {
        Some(s) => parse_f64_list(s)?,
        None => vec![0.25 * t_end, 0.5 * t_end, 0.75 * t_end, t_end],
    };
    if let PartitionFamily::Dyadic { .. } = family {
        if ns.iter().any(|&n| n > 30) {
            bail!("dyadic levels above 30 are not supported here");
        }
    }
    let tol = VerdictTolerance::default();
    let a1 = check_a1(&path, &family, eps, ns, tol)?;
    let a2 = check_a2(&path, &family, &s_list, ns, tol)?;
    let mut csv = a1.to_csv();
    csv.push_str(a2.to_csv().split_once('\n').map(|x| x.1).unwrap_or(""));
    let checks = vec![
        check(
            "A1",
            a1.verdict,
            format!("row verdicts {:?}", a1.row_verdicts),
        ),
        check(
            "A2",
            a2.verdict,
            format!("row verdicts {:?}", a2.row_verdicts),
        ),
    ];
    Ok(Output {
        csv,
        report: json!({"A1": a1, "A2": a2}),
        checks,
    })
}

fn leb_partition(
    path: &str,
    seed: u64,
    n: u64,
    alpha: f64,
    c: Option<f64>,
    r: f64,
) -> Result<Output> {
    let path = parse_path(path, seed)?;
    let grid = match c {
        Some(c) => LevelGrid::new(c, r)?,
        None => LevelGrid::inv_sqrt(n, alpha)?,
    };
    let lp = lebesgue_partition_on(&path, &grid)?;
    let mut csv = String::from("index,t,level\n");
    for (i, (t, l)) in lp.partition.points().iter().zip(&lp.levels).enumerate() {
        csv.push_str(&format!(
            "{i},{},{}\n",
            t.to_f64(),
            l.map(|l| l.to_string()).unwrap_or_default()
        ));
    }
    let unit = lp.interior_steps_are_unit();
    let checks = vec![check(
        "unit_steps",
        unit,
        "interior increments equal the grid spacing",
    )];
    let report = json!({
        "c": grid.step(),
        "r": grid.shift(),
        "intervals": lp.partition.interval_count(),
        "mesh": lp.partition.mesh(),
        "unit_steps": unit,
    });
    Ok(Output {
        csv,
        report,
        checks,
    })
}
