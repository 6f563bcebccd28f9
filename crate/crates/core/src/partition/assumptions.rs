//! Finite-`n` diagnostics for the two partition assumptions: vanishing
//! oscillation of the jump-removed path over partition intervals, and
//! convergence of left-endpoint values to left limits.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::path::CadlagPath;
use crate::time::Time;

use super::{osc_over_partition, Partition, PartitionFamily};

/// Tolerances for the empirical "values → 0" verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerdictTolerance {
    /// Multiple of machine epsilon (times `max(1, scale)`) treated as zero.
    pub eps_multiple: f64,
    /// Relative threshold, times the path's sup norm.
    pub rel: f64,
    /// A sequence also vanishes if the sup of its second half is at most
    /// `decay` times the sup of its first half and the second half is still
    /// shrinking (its last value is at most `tail_decay` times its sup).
    pub decay: f64,
    pub tail_decay: f64,
}

impl Default for VerdictTolerance {
    fn default() -> Self {
        VerdictTolerance {
            eps_multiple: 10.0,
            rel: 1e-6,
            decay: 0.5,
            tail_decay: 0.9,
        }
    }
}

impl VerdictTolerance {
    pub fn threshold(&self, scale: f64) -> f64 {
        self.eps_multiple * f64::EPSILON * scale.max(1.0) + self.rel * scale
    }
}

/// Whether a non-negative sequence (ordered by increasing `n`) is judged to
/// tend to zero: its second half is below `tol`, or it has shrunk to at most
/// `tol.decay` times the first half and is still shrinking, which rules out
/// plateaus.
pub fn vanishes(values: &[f64], tol: f64, rule: &VerdictTolerance) -> bool {
    if values.is_empty() {
        return false;
    }
    let half = values.len() / 2;
    let sup = |v: &[f64]| v.iter().copied().fold(0.0f64, f64::max);
    let tail = sup(&values[half..]);
    if tail <= tol {
        return true;
    }
    let last = values[values.len() - 1];
    half > 0 && tail <= rule.decay * sup(&values[..half]) && last <= rule.tail_decay * tail
}

/// A table of diagnostic values, one row per `ε` (or per `s`), one column
/// per `n`.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionTable {
    pub assumption: &'static str,
    pub family: String,
    pub param: String,
    pub n_grid: Vec<u64>,
    /// `(ε or s, values over n_grid)`.
    pub rows: Vec<(f64, Vec<f64>)>,
    pub row_verdicts: Vec<bool>,
    pub verdict: bool,
    pub tol: f64,
}

impl AssumptionTable {
    /// CSV with header `family,param,n,epsilon,value`; the `epsilon` column
    /// holds `s` for the left-limit table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("family,param,n,epsilon,value\n");
        for (key, values) in &self.rows {
            for (n, v) in self.n_grid.iter().zip(values) {
                out.push_str(&format!(
                    "{},{}:{},{},{},{}\n",
                    self.family, self.assumption, self.param, n, key, v
                ));
            }
        }
        out
    }
}

fn generate_all(family: &PartitionFamily, n_grid: &[u64]) -> Result<Vec<Partition>> {
    n_grid.par_iter().map(|&n| family.generate(n)).collect()
}

fn check_grids(n_grid: &[u64], keys: &[f64], what: &str) -> Result<()> {
    if n_grid.is_empty() {
        return Err(invalid("n grid is empty"));
    }
    if keys.is_empty() {
        return Err(invalid(format!("{what} grid is empty")));
    }
    Ok(())
}

/// `O(x − J_ε(x); πⁿ)` for every `ε` and `n`. The overall verdict is taken
/// at the smallest `ε`, where the values must vanish as `n` grows.
pub fn check_a1(
    path: &CadlagPath,
    family: &PartitionFamily,
    eps_grid: &[f64],
    n_grid: &[u64],
    tol: VerdictTolerance,
) -> Result<AssumptionTable> {
    check_grids(n_grid, eps_grid, "epsilon")?;
    let partitions = generate_all(family, n_grid)?;
    let threshold = tol.threshold(path.sup_norm());
    let mut rows = Vec::with_capacity(eps_grid.len());
    let mut row_verdicts = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let reduced = path.without_jumps(eps)?;
        let values = partitions
            .par_iter()
            .map(|p| osc_over_partition(&reduced, p))
            .collect::<Result<Vec<f64>>>()?;
        row_verdicts.push(vanishes(&values, threshold, &tol));
        rows.push((eps, values));
    }
    let smallest = eps_grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(AssumptionTable {
        assumption: "A1",
        family: family.name().to_string(),
        param: family.param(),
        n_grid: n_grid.to_vec(),
        verdict: row_verdicts[smallest],
        rows,
        row_verdicts,
        tol: threshold,
    })
}

/// `|x(u) − x(s−)|` where `(u, v]` is the interval of `πⁿ` containing `s`.
/// The verdict requires the values to vanish for every `s`.
pub fn check_a2(
    path: &CadlagPath,
    family: &PartitionFamily,
    s_list: &[f64],
    n_grid: &[u64],
    tol: VerdictTolerance,
) -> Result<AssumptionTable> {
    check_grids(n_grid, s_list, "s")?;
    let partitions = generate_all(family, n_grid)?;
    let threshold = tol.threshold(path.sup_norm());
    let mut rows = Vec::with_capacity(s_list.len());
    let mut row_verdicts = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let left = path.left_limit(s)?;
        let values = partitions
            .iter()
            .map(|p| {
                p.check_fits(path)?;
                let (u, _) = p.bracket(Time::Abs(s))?;
                Ok((path.value(u) - left).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        row_verdicts.push(vanishes(&values, threshold, &tol));
        rows.push((s, values));
    }
    Ok(AssumptionTable {
        assumption: "A2",
        family: family.name().to_string(),
        param: family.param(),
        n_grid: n_grid.to_vec(),
        verdict: row_verdicts.iter().all(|&v| v),
        rows,
        row_verdicts,
        tol: threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{make_named_path, make_random_walk};

    fn fixed_half() -> PartitionFamily {
        PartitionFamily::Fixed(Partition::from_f64(&[0.0, 0.5, 1.0]).unwrap())
    }

    #[test]
    fn indicator_with_fixed_partition() {
        let ind = make_named_path("indicator_half").unwrap();
        let n: Vec<u64> = (1..=6).collect();
        let a1 = check_a1(&ind, &fixed_half(), &[0.5], &n, VerdictTolerance::default()).unwrap();
        assert!(a1.rows[0].1.iter().all(|&v| v == 0.0));
        assert!(a1.verdict);
        let a2 = check_a2(&ind, &fixed_half(), &[0.5], &n, VerdictTolerance::default()).unwrap();
        assert!(a2.rows[0].1.iter().all(|&v| v == 0.0));
        assert!(a2.verdict);
    }

    #[test]
    fn constant_path_all_zero() {
        let c = CadlagPath::constant(1.5, 1.0).unwrap();
        let fam = PartitionFamily::Dyadic { t_end: 1.0 };
        let n: Vec<u64> = (0..6).collect();
        let a1 = check_a1(&c, &fam, &[0.1, 0.01], &n, VerdictTolerance::default()).unwrap();
        assert!(a1.rows.iter().all(|r| r.1.iter().all(|&v| v == 0.0)));
        let a2 = check_a2(&c, &fam, &[0.3, 1.0], &n, VerdictTolerance::default()).unwrap();
        assert!(a2.rows.iter().all(|r| r.1.iter().all(|&v| v == 0.0)));
        assert!(a1.verdict && a2.verdict);
    }

    #[test]
    fn random_walk_dyadic() {
        let w = make_random_walk(1 << 6, 1.0, 7).unwrap();
        let h = 0.125;
        let fam = PartitionFamily::Dyadic { t_end: 1.0 };
        let n: Vec<u64> = (0..=14).collect();
        let a1 = check_a1(
            &w,
            &fam,
            &[2.0 * h, h / 2.0],
            &n,
            VerdictTolerance::default(),
        )
        .unwrap();
        // jumps below ε stay in the path: each fine interval holds one jump
        assert_eq!(*a1.rows[0].1.last().unwrap(), h);
        assert!(!a1.row_verdicts[0]);
        assert!(a1.rows[1].1.iter().all(|&v| v == 0.0));
        assert!(a1.verdict);
        let a2 = check_a2(&w, &fam, &[0.25, 0.5, 0.3], &n, VerdictTolerance::default()).unwrap();
        assert!(a2.verdict);
    }

    #[test]
    fn vanishing_rule() {
        let r = VerdictTolerance::default();
        assert!(vanishes(&[1.0, 0.5, 0.2, 0.1], 1e-9, &r));
        assert!(!vanishes(&[1.0, 1.0, 1.0, 1.0], 1e-9, &r));
        assert!(!vanishes(&[1.0, 0.125, 0.125, 0.125], 1e-9, &r));
        assert!(vanishes(&[0.0, 0.0], 1e-9, &r));
        assert!(!vanishes(&[], 1.0, &r));
    }

    #[test]
    fn csv_header() {
        let ind = make_named_path("indicator_half").unwrap();
        let t = check_a2(
            &ind,
            &fixed_half(),
            &[0.5],
            &[1, 2],
            VerdictTolerance::default(),
        )
        .unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("family,param,n,epsilon,value\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
