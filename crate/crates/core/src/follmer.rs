//! The change-of-variables identity along a partition sequence:
//! `f(x(T)) − f(x(0)) = lim Σ f′(x(u))Δx + ½·lim Σ f″(x(u))(Δx)² + J`, the jump
//! compensator `J`, and the Stieltjes form of the second-order term.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, invalid, Result};
use crate::partition::{Partition, PartitionFamily};
use crate::path::CadlagPath;
use crate::qv::{
    limit_over, qv_stopped_profile, riemann_f1_sum, weighted_f2_sum, LimitDiagnostic, Tolerance,
};
use crate::sum::CompensatedSum;
use crate::time::Time;

/// A real function of one real variable, shareable across threads.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A `C²` function carried as `(f, f′, f″)`.
#[derive(Clone)]
pub struct TestFunction {
    pub name: String,
    f: RealFn,
    f1: RealFn,
    f2: RealFn,
    pub valid_range: (f64, f64),
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("valid_range", &self.valid_range)
            .finish()
    }
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TestFunction {
            name: name.into(),
            f: Arc::new(f),
            f1: Arc::new(f1),
            f2: Arc::new(f2),
            valid_range: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `x ↦ a·x + b`.
    pub fn affine(a: f64, b: f64) -> Self {
        Self::new(
            format!("affine({a},{b})"),
            move |x| a * x + b,
            move |_| a,
            |_| 0.0,
        )
    }

    pub fn square() -> Self {
        Self::new("square", |x| x * x, |x| 2.0 * x, |_| 2.0)
    }

    pub fn cube() -> Self {
        Self::new("cube", |x| x * x * x, |x| 3.0 * x * x, |x| 6.0 * x)
    }

    pub fn exp() -> Self {
        Self::new("exp", f64::exp, f64::exp, f64::exp)
    }

    /// `affine` (meaning `2x + 1`), `square`, `cube` or `exp`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "affine" => Ok(Self::affine(2.0, 1.0)),
            "square" => Ok(Self::square()),
            "cube" => Ok(Self::cube()),
            "exp" => Ok(Self::exp()),
            other => Err(invalid(format!("unknown test function '{other}'"))),
        }
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn f1(&self, x: f64) -> f64 {
        (self.f1)(x)
    }

    pub fn f2(&self, x: f64) -> f64 {
        (self.f2)(x)
    }

    pub fn second_derivative(&self) -> SecondDerivativeProfile {
        SecondDerivativeProfile {
            name: self.name.clone(),
            f2: self.f2.clone(),
            valid_range: self.valid_range,
        }
    }
}

/// `f″` alone, for the weighted second-order sums.
#[derive(Clone)]
pub struct SecondDerivativeProfile {
    pub name: String,
    f2: RealFn,
    pub valid_range: (f64, f64),
}

impl fmt::Debug for SecondDerivativeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SecondDerivativeProfile")
            .field("name", &self.name)
            .finish()
    }
}

impl SecondDerivativeProfile {
    pub fn new(name: impl Into<String>, f2: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SecondDerivativeProfile {
            name: name.into(),
            f2: Arc::new(f2),
            valid_range: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn eval(&self, w: f64) -> f64 {
        (self.f2)(w)
    }
}

/// `f″_m`: 0 on `(−∞,0]`, `w` on `[0,1]`, 1 on `[1, 1+1/m]`, affine down to 0
/// on `[1+1/m, 1+2/m]`, 0 beyond.
pub fn make_fm(m: u32) -> Result<SecondDerivativeProfile> {
    if m < 1 {
        return Err(domain("m must be at least 1"));
    }
    let mf = m as f64;
    Ok(SecondDerivativeProfile::new(format!("f_{m}"), move |w| {
        if w <= 0.0 {
            0.0
        } else if w <= 1.0 {
            w
        } else if w <= 1.0 + 1.0 / mf {
            1.0
        } else if w <= 1.0 + 2.0 / mf {
            1.0 - mf * (w - 1.0 - 1.0 / mf)
        } else {
            0.0
        }
    }))
}

/// 1 on `(−∞,1]`, 0 on `[2,∞)`, cubic smoothstep in between.
pub fn make_smooth_cut() -> SecondDerivativeProfile {
    SecondDerivativeProfile::new("smooth_cut", |w| {
        if w <= 1.0 {
            1.0
        } else if w >= 2.0 {
            0.0
        } else {
            let x = w - 1.0;
            1.0 - x * x * (3.0 - 2.0 * x)
        }
    })
}

/// `J(ε) = Σ_{t ∈ D(ε)} [f(x(t)) − f(x(t−)) − f′(x(t−))Δx(t) − ½f″(x(t−))(Δx(t))²]`.
pub fn jump_term(path: &CadlagPath, f: &TestFunction, epsilon: f64) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for j in path.jump_set(epsilon)? {
        let before = path.left_value(j.time);
        let after = path.value(j.time);
        let d = j.size;
        acc += f.f(after) - f.f(before) - f.f1(before) * d - 0.5 * f.f2(before) * d * d;
    }
    Ok(acc.value())
}

/// The terms of the identity on one partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualBreakdown {
    pub f_end: f64,
    pub f_start: f64,
    pub riemann: f64,
    pub weighted: f64,
    pub jump: f64,
    /// `f(x(T)) − f(x(0)) − riemann − ½·weighted − jump`.
    pub residual: f64,
}

pub fn follmer_breakdown(
    path: &CadlagPath,
    partition: &Partition,
    f: &TestFunction,
    epsilon: f64,
) -> Result<ResidualBreakdown> {
    let f_end = f.f(path.value(path.end_time()));
    let f_start = f.f(path.value(Time::Abs(0.0)));
    let riemann = riemann_f1_sum(path, partition, |x| f.f1(x))?;
    let weighted = weighted_f2_sum(path, partition, |x| f.f2(x))?;
    let jump = jump_term(path, f, epsilon)?;
    let residual = [f_end, -f_start, -riemann, -0.5 * weighted, -jump]
        .into_iter()
        .collect::<CompensatedSum>()
        .value();
    Ok(ResidualBreakdown {
        f_end,
        f_start,
        riemann,
        weighted,
        jump,
        residual,
    })
}

/// `f(x(T)) − f(x(0)) − Σf′(x(u))Δx − ½Σf″(x(u))(Δx)² − J(ε)`.
pub fn follmer_residual(
    path: &CadlagPath,
    partition: &Partition,
    f: &TestFunction,
    epsilon: f64,
) -> Result<f64> {
    Ok(follmer_breakdown(path, partition, f, epsilon)?.residual)
}

/// A non-decreasing right-continuous step function on `[0,T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneStepFunction {
    initial: f64,
    jumps: Vec<(Time, f64)>,
    domain_end: Time,
}

impl MonotoneStepFunction {
    /// `jumps` are `(time, increment ≥ 0)` with strictly increasing times in
    /// `(0, T]`.
    pub fn new(initial: f64, jumps: Vec<(Time, f64)>, domain_end: impl Into<Time>) -> Result<Self> {
        let domain_end = domain_end.into();
        if !initial.is_finite() {
            return Err(invalid("initial value must be finite"));
        }
        if jumps.iter().any(|j| !(j.1 >= 0.0 && j.1.is_finite())) {
            return Err(invalid("increments must be finite and non-negative"));
        }
        if jumps.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(invalid("jump times must be strictly increasing"));
        }
        if jumps.first().is_some_and(|j| j.0 <= Time::Abs(0.0))
            || jumps.last().is_some_and(|j| j.0 > domain_end)
        {
            return Err(invalid("jump times must lie in (0, T]"));
        }
        Ok(MonotoneStepFunction {
            initial,
            jumps,
            domain_end,
        })
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn jumps(&self) -> &[(Time, f64)] {
        &self.jumps
    }

    pub fn domain_end(&self) -> Time {
        self.domain_end
    }

    /// Right-continuous value at `t`.
    pub fn eval(&self, t: impl Into<Time>) -> f64 {
        let t = t.into();
        let k = self.jumps.partition_point(|j| j.0 <= t);
        let mut acc = CompensatedSum::new();
        acc += self.initial;
        for j in &self.jumps[..k] {
            acc += j.1;
        }
        acc.value()
    }

    /// `F(T) − F(0)`.
    pub fn total_mass(&self) -> f64 {
        self.jumps
            .iter()
            .map(|j| j.1)
            .collect::<CompensatedSum>()
            .value()
    }
}

/// Right-continuous modification of a sampled non-decreasing function.
///
/// Samples closer than `resolution` to the start of their cluster are treated
/// as one instant: the cluster sits at its earliest time and takes the value
/// of its latest sample, so a jump seen "just after" `t` is assigned to `t`.
pub fn rc_modification(samples: &[(Time, f64)], resolution: f64) -> Result<MonotoneStepFunction> {
    if samples.is_empty() {
        return Err(crate::Error::TooFewSamples { needed: 1, got: 0 });
    }
    if resolution.is_nan() || resolution < 0.0 {
        return Err(domain("resolution must be non-negative"));
    }
    if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(invalid("sample times must be strictly increasing"));
    }
    if let Some(w) = samples.windows(2).find(|w| w[1].1 < w[0].1) {
        return Err(invalid(format!(
            "sampled function decreases at {} ({} < {})",
            w[1].0, w[1].1, w[0].1
        )));
    }
    let mut clusters: Vec<(Time, f64)> = Vec::new();
    let mut start = samples[0].0;
    for &(t, v) in samples {
        match clusters.last_mut() {
            Some(last) if t.distance(start) <= resolution => last.1 = v,
            _ => {
                start = t;
                clusters.push((t, v));
            }
        }
    }
    let initial = clusters[0].1;
    let jumps = clusters
        .windows(2)
        .filter(|w| w[1].1 > w[0].1)
        .map(|w| (w[1].0, w[1].1 - w[0].1))
        .collect();
    let end = samples[samples.len() - 1].0;
    MonotoneStepFunction::new(initial, jumps, end)
}

/// `∫_{(0,T]} g dF = Σ g(t)·ΔF(t)` over the jumps of `F`.
pub fn stieltjes_integral(g: impl Fn(Time) -> f64, measure: &MonotoneStepFunction) -> f64 {
    measure
        .jumps()
        .iter()
        .map(|&(t, inc)| g(t) * inc)
        .collect::<CompensatedSum>()
        .value()
}

/// The weighted second-order limit set against its Stieltjes form.
#[derive(Debug, Clone, Serialize)]
pub struct CorollaryReport {
    pub weighted_limit: LimitDiagnostic,
    /// `∫ f″(x(t−)) d[x]~` with `[x]~` built from the finest partition.
    pub stieltjes: f64,
    /// `|limit estimate − stieltjes|`, when the limit converged.
    pub difference: Option<f64>,
    pub measure_jumps: usize,
}

/// Compares `lim Σ f″(x(u))(Δx)²` over `n_grid` with
/// `∫ f″(x(t−)) d[x]~`, where `[x]~` is the right-continuous modification of
/// the running-max stopped sums along the partition for the largest `n`.
pub fn corollary_check(
    path: &CadlagPath,
    family: &PartitionFamily,
    n_grid: &[u64],
    f2: &SecondDerivativeProfile,
    resolution: f64,
    tol: Tolerance,
) -> Result<CorollaryReport> {
    let weighted_limit = limit_over(
        n_grid,
        |n| weighted_f2_sum(path, &family.generate(n)?, |x| f2.eval(x)),
        tol,
    )?;
    let n_max = *n_grid.iter().max().expect("grid checked non-empty");
    let partition = family.generate(n_max)?;
    let mut running = f64::NEG_INFINITY;
    let profile: Vec<(Time, f64)> = qv_stopped_profile(path, &partition)?
        .into_iter()
        .map(|(t, v)| {
            running = running.max(v);
            (t, running)
        })
        .collect();
    let measure = rc_modification(&profile, resolution)?;
    let stieltjes = stieltjes_integral(|t| f2.eval(path.left_value(t)), &measure);
    Ok(CorollaryReport {
        difference: weighted_limit.estimate.map(|e| (e - stieltjes).abs()),
        weighted_limit,
        stieltjes,
        measure_jumps: measure.jumps().len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::make_dyadic;
    use crate::path::{make_named_path, make_random_walk};

    fn ind() -> CadlagPath {
        make_named_path("indicator_half").unwrap()
    }

    fn half() -> Partition {
        Partition::from_f64(&[0.0, 0.5, 1.0]).unwrap()
    }

    #[test]
    fn jump_term_examples() {
        assert_eq!(
            jump_term(&ind(), &TestFunction::square(), 0.5).unwrap(),
            0.0
        );
        let z = make_named_path("z").unwrap();
        assert_eq!(jump_term(&z, &TestFunction::exp(), 0.1).unwrap(), 0.0);
        assert_eq!(jump_term(&ind(), &TestFunction::cube(), 0.5).unwrap(), 1.0);
        assert!(jump_term(&ind(), &TestFunction::cube(), 0.0).is_err());
    }

    #[test]
    fn residual_examples() {
        assert_eq!(
            follmer_residual(&ind(), &half(), &TestFunction::square(), 0.5).unwrap(),
            0.0
        );
        let w = make_random_walk(64, 1.0, 2).unwrap();
        let p = make_dyadic(1.0, 8).unwrap();
        let r = follmer_residual(&w, &p, &TestFunction::square(), 0.01).unwrap();
        assert!(r.abs() < 1e-12);
        for path in [
            make_named_path("z").unwrap(),
            make_named_path("q").unwrap(),
            w,
        ] {
            let p = make_dyadic(path.domain_end(), 6).unwrap();
            let r = follmer_residual(&path, &p, &TestFunction::affine(-1.5, 0.3), 0.1).unwrap();
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn profiles() {
        let f2 = make_fm(2).unwrap();
        assert_eq!(f2.eval(1.25), 1.0);
        assert_eq!(f2.eval(2.5), 0.0);
        assert!((f2.eval(1.75) - 0.5).abs() < 1e-15);
        for m in [1, 3, 10] {
            let f = make_fm(m).unwrap();
            assert_eq!(f.eval(0.0), 0.0);
            assert_eq!(f.eval(-1.0), 0.0);
            assert_eq!(f.eval(0.3), 0.3);
        }
        assert!(make_fm(0).is_err());
        let s = make_smooth_cut();
        assert_eq!(s.eval(0.5), 1.0);
        assert_eq!(s.eval(2.5), 0.0);
        assert_eq!(s.eval(1.5), 0.5);
    }

    #[test]
    fn rc_modification_examples() {
        let steps = vec![
            (Time::Abs(0.0), 0.0),
            (Time::Abs(0.5), 1.0),
            (Time::Abs(1.0), 1.0),
        ];
        let m = rc_modification(&steps, 0.0).unwrap();
        assert_eq!(m.initial(), 0.0);
        assert_eq!(m.jumps(), &[(Time::Abs(0.5), 1.0)]);

        let just_after = Time::Abs(1.0).shifted(1e-12);
        let q_like = vec![
            (Time::Abs(0.0), 0.0),
            (Time::Abs(0.5), 0.0),
            (Time::Abs(1.0), 0.0),
            (just_after, 3.29),
        ];
        let m = rc_modification(&q_like, 1e-9).unwrap();
        assert_eq!(m.eval(1.0), 3.29);
        assert_eq!(m.eval(0.999), 0.0);

        let flat = vec![(Time::Abs(0.0), 2.0), (Time::Abs(1.0), 2.0)];
        let m = rc_modification(&flat, 0.0).unwrap();
        assert_eq!(m.eval(0.7), 2.0);
        assert!(m.jumps().is_empty());

        let down = vec![(Time::Abs(0.0), 1.0), (Time::Abs(1.0), 0.5)];
        assert!(rc_modification(&down, 0.0).is_err());
    }

    #[test]
    fn stieltjes_examples() {
        let m = MonotoneStepFunction::new(0.0, vec![(Time::Abs(0.5), 1.0)], 1.0).unwrap();
        assert_eq!(stieltjes_integral(|_| 1.0, &m), m.eval(1.0) - m.eval(0.0));
        assert_eq!(stieltjes_integral(|_| 0.0, &m), 0.0);
        let path = ind();
        let f = TestFunction::square();
        assert_eq!(stieltjes_integral(|t| f.f2(path.left_value(t)), &m), 2.0);
        assert!(MonotoneStepFunction::new(0.0, vec![(Time::Abs(0.5), -1.0)], 1.0).is_err());
    }

    #[test]
    fn finite_difference_derivatives() {
        for f in [
            TestFunction::square(),
            TestFunction::cube(),
            TestFunction::exp(),
            TestFunction::affine(2.0, 1.0),
        ] {
            for &x in &[-1.3, 0.0, 0.7, 2.1] {
                let mut prev = f64::INFINITY;
                for h in [1e-1, 5e-2, 2.5e-2] {
                    let d1 = (f.f(x + h) - f.f(x - h)) / (2.0 * h) - f.f1(x);
                    let d2 = (f.f1(x + h) - f.f1(x - h)) / (2.0 * h) - f.f2(x);
                    let err = d1.abs().max(d2.abs());
                    assert!(err <= 2.0 * h * h * (1.0 + f.f(x).abs()) * 10.0);
                    assert!(err <= prev + 1e-12);
                    prev = err;
                }
            }
        }
    }

    #[test]
    fn corollary_on_indicator() {
        let fam = PartitionFamily::Fixed(half());
        let r = corollary_check(
            &ind(),
            &fam,
            &[1, 2, 3, 4],
            &TestFunction::square().second_derivative(),
            0.0,
            Tolerance::new(1e-9, 0.0),
        )
        .unwrap();
        assert_eq!(r.stieltjes, 2.0);
        assert_eq!(r.difference, Some(0.0));
    }
}
