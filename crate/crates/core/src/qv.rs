//! Partition sums and finite-`n` limit diagnostics.
//!
//! All sums run over intervals in ascending order with compensated
//! summation, so results are reproducible bit for bit.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, invalid, Error, Result};
use crate::partition::Partition;
use crate::path::CadlagPath;
use crate::sum::CompensatedSum;
use crate::time::Time;

/// `x` at every breakpoint of `π`.
pub fn path_values(path: &CadlagPath, partition: &Partition) -> Result<Vec<f64>> {
    partition.check_fits(path)?;
    Ok(partition.points().iter().map(|&t| path.value(t)).collect())
}

fn check_t(path: &CadlagPath, t: Time) -> Result<()> {
    if t < Time::Abs(0.0) || t > path.end_time() {
        Err(domain(format!(
            "t = {t} outside [0, {}]",
            path.domain_end()
        )))
    } else {
        Ok(())
    }
}

/// `μ_n[0,t] = Σ_{(u,v] ∈ π, u ≤ t} (x(v) − x(u))²`.
pub fn qv_cdf_sum(path: &CadlagPath, partition: &Partition, t: impl Into<Time>) -> Result<f64> {
    let t = t.into();
    check_t(path, t)?;
    let x = path_values(path, partition)?;
    let mut acc = CompensatedSum::new();
    for (i, (u, _)) in partition.intervals().enumerate() {
        if u > t {
            break;
        }
        let d = x[i + 1] - x[i];
        acc += d * d;
    }
    Ok(acc.value())
}

/// `Σ_{(u,v] ∈ π} (x(v∧t) − x(u∧t))²`.
pub fn qv_stopped_sum(path: &CadlagPath, partition: &Partition, t: impl Into<Time>) -> Result<f64> {
    let t = t.into();
    check_t(path, t)?;
    let x = path_values(path, partition)?;
    Ok(stopped_sum_from_values(path, partition, &x, t))
}

pub(crate) fn stopped_sum_from_values(
    path: &CadlagPath,
    partition: &Partition,
    x: &[f64],
    t: Time,
) -> f64 {
    let mut acc = CompensatedSum::new();
    for (i, (u, v)) in partition.intervals().enumerate() {
        if u >= t {
            break;
        }
        let d = if v <= t {
            x[i + 1] - x[i]
        } else {
            path.value(t) - x[i]
        };
        acc += d * d;
    }
    acc.value()
}

/// Stopped sums at every breakpoint `t_i`: `(t_i, Σ_{j<i} (Δ_j x)²)`.
pub fn qv_stopped_profile(path: &CadlagPath, partition: &Partition) -> Result<Vec<(Time, f64)>> {
    let x = path_values(path, partition)?;
    let mut acc = CompensatedSum::new();
    let mut out = Vec::with_capacity(x.len());
    out.push((partition.points()[0], 0.0));
    for (i, &t) in partition.points().iter().enumerate().skip(1) {
        let d = x[i] - x[i - 1];
        acc += d * d;
        out.push((t, acc.value()));
    }
    Ok(out)
}

/// `Σ_{(u,v] ∈ π} f″(x(u)) (x(v) − x(u))²`.
pub fn weighted_f2_sum(
    path: &CadlagPath,
    partition: &Partition,
    f2: impl Fn(f64) -> f64,
) -> Result<f64> {
    let x = path_values(path, partition)?;
    Ok(x.windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            f2(w[0]) * d * d
        })
        .collect::<CompensatedSum>()
        .value())
}

/// `Σ_{(u,v] ∈ π} f′(x(u)) (x(v) − x(u))`.
pub fn riemann_f1_sum(
    path: &CadlagPath,
    partition: &Partition,
    f1: impl Fn(f64) -> f64,
) -> Result<f64> {
    let x = path_values(path, partition)?;
    Ok(x.windows(2)
        .map(|w| f1(w[0]) * (w[1] - w[0]))
        .collect::<CompensatedSum>()
        .value())
}

/// Agreement thresholds for limit diagnostics: two values agree when they
/// differ by at most `max(abs, rel·scale)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    pub fn at(&self, scale: f64) -> f64 {
        self.abs.max(self.rel * scale.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 0.05,
            rel: 0.0,
        }
    }
}

/// Convergence verdict for a sequence indexed by `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitDiagnostic {
    pub values: Vec<(u64, f64)>,
    pub estimate: Option<f64>,
    pub even_limit: Option<f64>,
    pub odd_limit: Option<f64>,
    pub converged: bool,
    pub split_detected: bool,
    pub tol_abs: f64,
    pub tol_rel: f64,
}

/// Limit of the trailing values if the last (up to) three agree pairwise.
fn trailing_limit(values: &[f64], tol: Tolerance) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let tail = &values[values.len().saturating_sub(3)..];
    let last = *tail.last()?;
    let bound = tol.at(last);
    let agree = tail
        .iter()
        .all(|a| tail.iter().all(|b| (a - b).abs() <= bound));
    agree.then_some(last)
}

/// Diagnoses the limit of `values` (at least four, with increasing `n`).
///
/// The sequence converges when its last three values agree pairwise. Even
/// and odd `n` are also examined separately; if both parities settle on
/// limits more than `5·tol` apart the sequence is flagged as split and has
/// no estimate.
pub fn estimate_limit(values: &[(u64, f64)], tol: Tolerance) -> Result<LimitDiagnostic> {
    if values.len() < 4 {
        return Err(Error::TooFewSamples {
            needed: 4,
            got: values.len(),
        });
    }
    if values.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(invalid("n values must be strictly increasing"));
    }
    if values.iter().any(|v| !v.1.is_finite()) {
        return Err(invalid("values must be finite"));
    }
    let all: Vec<f64> = values.iter().map(|v| v.1).collect();
    let parity = |p: u64| -> Vec<f64> {
        values
            .iter()
            .filter(|v| v.0 % 2 == p)
            .map(|v| v.1)
            .collect()
    };
    let even_limit = trailing_limit(&parity(0), tol);
    let odd_limit = trailing_limit(&parity(1), tol);
    let split_detected = match (even_limit, odd_limit) {
        (Some(e), Some(o)) => (e - o).abs() > 5.0 * tol.at(e.abs().max(o.abs())),
        _ => false,
    };
    let estimate = if split_detected {
        None
    } else {
        trailing_limit(&all[all.len() - 3..], tol)
    };
    Ok(LimitDiagnostic {
        values: values.to_vec(),
        converged: estimate.is_some(),
        estimate,
        even_limit,
        odd_limit,
        split_detected,
        tol_abs: tol.abs,
        tol_rel: tol.rel,
    })
}

/// Evaluates `f` over `n_grid` in parallel (results kept in grid order) and
/// diagnoses the limit.
pub fn limit_over<F>(n_grid: &[u64], f: F, tol: Tolerance) -> Result<LimitDiagnostic>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    let values = n_grid
        .par_iter()
        .map(|&n| f(n).map(|v| (n, v)))
        .collect::<Result<Vec<_>>>()?;
    estimate_limit(&values, tol)
}

/// The grid `{N/10, N/4, N/2, N}`, each followed by its successor, so both
/// parities are represented at every scale.
pub fn paired_ladder(nmax: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for d in [10, 4, 2, 1] {
        let n = (nmax / d).max(1);
        for m in [n, n + 1] {
            if out.last().is_none_or(|&l| m > l) {
                out.push(m);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{make_dyadic, make_uniform};
    use crate::path::{make_named_path, make_random_walk};

    fn half() -> Partition {
        Partition::from_f64(&[0.0, 0.5, 1.0]).unwrap()
    }

    fn ind() -> CadlagPath {
        make_named_path("indicator_half").unwrap()
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(qv_cdf_sum(&ind(), &half(), 0.0).unwrap(), 1.0);
        let z = make_named_path("z").unwrap();
        let one = Partition::from_f64(&[0.0, 1.0]).unwrap();
        assert_eq!(qv_cdf_sum(&z, &one, 1.0).unwrap(), 0.0);
        let c = CadlagPath::constant(4.0, 1.0).unwrap();
        assert_eq!(qv_cdf_sum(&c, &half(), 1.0).unwrap(), 0.0);
        assert!(qv_cdf_sum(&c, &half(), 1.5).is_err());
    }

    #[test]
    fn stopped_examples() {
        assert_eq!(qv_stopped_sum(&ind(), &half(), 0.25).unwrap(), 0.0);
        assert_eq!(qv_stopped_sum(&ind(), &half(), 1.0).unwrap(), 1.0);
        let a = CadlagPath::affine(1.0, 0.0, 1.0).unwrap();
        for n in 0..12u32 {
            let v = qv_stopped_sum(&a, &make_dyadic(1.0, n).unwrap(), 1.0).unwrap();
            assert!((v - 2f64.powi(-(n as i32))).abs() < 1e-15);
        }
    }

    #[test]
    fn weighted_and_riemann_examples() {
        assert_eq!(weighted_f2_sum(&ind(), &half(), |_| 2.0).unwrap(), 2.0);
        assert_eq!(weighted_f2_sum(&ind(), &half(), |_| 0.0).unwrap(), 0.0);
        assert_eq!(riemann_f1_sum(&ind(), &half(), |x| 2.0 * x).unwrap(), 0.0);
        let w = make_random_walk(100, 1.0, 1).unwrap();
        let p = make_uniform(1.0, 37).unwrap();
        let r = riemann_f1_sum(&w, &p, |_| 1.0).unwrap();
        assert!((r - (w.eval(1.0).unwrap() - w.eval(0.0).unwrap())).abs() < 1e-12);
    }

    #[test]
    fn profile_matches_stopped_sums() {
        let z = make_named_path("z").unwrap();
        let p = make_uniform(1.0, 16).unwrap();
        for (t, v) in qv_stopped_profile(&z, &p).unwrap() {
            assert!((qv_stopped_sum(&z, &p, t).unwrap() - v).abs() < 1e-14);
        }
    }

    #[test]
    fn limit_examples() {
        let flat: Vec<(u64, f64)> = (1..=6).map(|n| (n, 5.0)).collect();
        let d = estimate_limit(&flat, Tolerance::default()).unwrap();
        assert!(d.converged);
        assert_eq!(d.estimate, Some(5.0));
        assert!(!d.split_detected);

        let alt: Vec<(u64, f64)> = (1..=8)
            .map(|n| (n, if n % 2 == 0 { 2.0 } else { 1.0 }))
            .collect();
        let d = estimate_limit(&alt, Tolerance::default()).unwrap();
        assert!(d.split_detected);
        assert!(!d.converged);
        assert_eq!(d.estimate, None);
        assert_eq!(d.even_limit, Some(2.0));
        assert_eq!(d.odd_limit, Some(1.0));

        assert!(matches!(
            estimate_limit(&flat[..3], Tolerance::default()),
            Err(Error::TooFewSamples { needed: 4, got: 3 })
        ));
        let unsorted = [(3, 1.0), (2, 1.0), (4, 1.0), (5, 1.0)];
        assert!(estimate_limit(&unsorted, Tolerance::default()).is_err());
    }

    #[test]
    fn ladder_shape() {
        assert_eq!(
            paired_ladder(1000),
            vec![100, 101, 250, 251, 500, 501, 1000, 1001]
        );
        assert_eq!(paired_ladder(4), vec![1, 2, 3, 4, 5]);
    }
}
