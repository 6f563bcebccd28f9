//! Partitions of `(0,T]` and indexed partition families.

mod assumptions;
mod lebesgue;

pub use assumptions::{check_a1, check_a2, vanishes, AssumptionTable, VerdictTolerance};
pub use lebesgue::{
    lebesgue_count, lebesgue_partition, lebesgue_partition_on, make_rho, make_sigma, make_tau,
    rho_lebesgue, GridPos, LebesgueCount, LebesguePartition, LevelGrid, Value,
};

use serde::Serialize;

use crate::error::{domain, invalid, Result};
use crate::path::{CadlagPath, Interval};
use crate::time::Time;

/// Breakpoints `0 = t_0 < t_1 < … < t_k = T`; the intervals are `(t_i, t_{i+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    points: Vec<Time>,
}

impl Partition {
    pub fn new(points: Vec<Time>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("a partition needs at least two breakpoints"));
        }
        if points[0] != Time::Abs(0.0) {
            return Err(invalid("first breakpoint must be 0"));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(invalid(format!(
                "breakpoints not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Partition { points })
    }

    pub fn from_f64(points: &[f64]) -> Result<Self> {
        if points.iter().any(|t| !t.is_finite()) {
            return Err(invalid("breakpoints must be finite"));
        }
        Self::new(points.iter().map(|&t| Time::Abs(t)).collect())
    }

    /// Builds from breakpoints already known to be valid.
    pub(crate) fn from_sorted(points: Vec<Time>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        Partition { points }
    }

    pub fn points(&self) -> &[Time] {
        &self.points
    }

    pub fn domain_end(&self) -> Time {
        self.points[self.points.len() - 1]
    }

    pub fn interval_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn intervals(&self) -> impl Iterator<Item = (Time, Time)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.points.iter().map(|t| t.to_f64()).collect()
    }

    /// JSON array of breakpoints.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_f64_vec()).expect("f64 array serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Vec<f64> = serde_json::from_str(text)?;
        Self::from_f64(&v)
    }

    /// The interval `(u, v]` containing `s ∈ (0,T]`.
    pub fn bracket(&self, s: impl Into<Time>) -> Result<(Time, Time)> {
        let s = s.into();
        if s <= self.points[0] || s > self.domain_end() {
            return Err(domain(format!(
                "time {s} outside (0, {}]",
                self.domain_end()
            )));
        }
        let i = self.points.partition_point(|p| *p < s);
        Ok((self.points[i - 1], self.points[i]))
    }

    /// Largest interval length.
    pub fn mesh(&self) -> f64 {
        self.intervals()
            .map(|(u, v)| u.distance(v))
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_fits(&self, path: &CadlagPath) -> Result<()> {
        if self.domain_end() != path.end_time() {
            Err(invalid(format!(
                "partition ends at {} but the path lives on [0, {}]",
                self.domain_end(),
                path.domain_end()
            )))
        } else {
            Ok(())
        }
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_f64_vec().serialize(s)
    }
}

fn check_t_end(t_end: f64) -> Result<()> {
    if t_end.is_finite() && t_end > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("T = {t_end} must be positive")))
    }
}

/// `k` equal intervals of `(0,T]`.
pub fn make_uniform(t_end: f64, k: usize) -> Result<Partition> {
    check_t_end(t_end)?;
    if k == 0 {
        return Err(domain("uniform partition needs k ≥ 1"));
    }
    let mut points: Vec<Time> = (0..k)
        .map(|i| Time::Abs(t_end * i as f64 / k as f64))
        .collect();
    points.push(Time::Abs(t_end));
    Ok(Partition::from_sorted(points))
}

/// `2^n` equal intervals of `(0,T]`.
pub fn make_dyadic(t_end: f64, n: u32) -> Result<Partition> {
    if n > 40 {
        return Err(domain(format!("dyadic level {n} is too fine")));
    }
    make_uniform(t_end, 1usize << n)
}

/// `O(x; π)`: the largest oscillation of `x` over an interval of `π`.
pub fn osc_over_partition(path: &CadlagPath, partition: &Partition) -> Result<f64> {
    partition.check_fits(path)?;
    partition
        .intervals()
        .map(|(u, v)| path.oscillation(Interval::left_open(u, v)))
        .try_fold(0.0f64, |acc, o| o.map(|o| acc.max(o)))
}

/// An indexed family of partitions `n ↦ πⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub enum PartitionFamily {
    /// The same partition for every `n`.
    Fixed(Partition),
    /// `n` equal intervals of `(0,T]`.
    Uniform { t_end: f64 },
    /// `2^n` equal intervals of `(0,T]`.
    Dyadic { t_end: f64 },
    /// Lebesgue partitions of `z` on the grid `(ℤ + α)/√n`.
    Rho { alpha: f64 },
    /// `(0,2]`: `ρⁿ(0)` then reflected `ρⁿ(1/2)` for odd `n`, the other way
    /// round for even `n`.
    Sigma,
    /// `(0,2]`: `ρⁿ(0)` then reflected `ρⁿ(0)`.
    Tau,
}

impl PartitionFamily {
    pub fn generate(&self, n: u64) -> Result<Partition> {
        match self {
            PartitionFamily::Fixed(p) => Ok(p.clone()),
            PartitionFamily::Uniform { t_end } => make_uniform(*t_end, n as usize),
            PartitionFamily::Dyadic { t_end } => make_dyadic(
                *t_end,
                u32::try_from(n).map_err(|_| domain("dyadic level too large"))?,
            ),
            PartitionFamily::Rho { alpha } => make_rho(n, *alpha),
            PartitionFamily::Sigma => make_sigma(n),
            PartitionFamily::Tau => make_tau(n),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PartitionFamily::Fixed(_) => "fixed",
            PartitionFamily::Uniform { .. } => "uniform",
            PartitionFamily::Dyadic { .. } => "dyadic",
            PartitionFamily::Rho { .. } => "rho",
            PartitionFamily::Sigma => "sigma",
            PartitionFamily::Tau => "tau",
        }
    }

    /// Parameter column for CSV output.
    pub fn param(&self) -> String {
        match self {
            PartitionFamily::Fixed(p) => p
                .to_f64_vec()
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            PartitionFamily::Uniform { t_end } | PartitionFamily::Dyadic { t_end } => {
                format!("T={t_end}")
            }
            PartitionFamily::Rho { alpha } => format!("alpha={alpha}"),
            PartitionFamily::Sigma | PartitionFamily::Tau => String::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::make_named_path;

    #[test]
    fn uniform_and_dyadic() {
        assert_eq!(
            make_uniform(1.0, 2).unwrap().to_f64_vec(),
            vec![0.0, 0.5, 1.0]
        );
        assert_eq!(make_dyadic(1.0, 0).unwrap().to_f64_vec(), vec![0.0, 1.0]);
        assert_eq!(make_dyadic(1.0, 10).unwrap().mesh(), 2f64.powi(-10));
        assert_eq!(make_dyadic(3.0, 5).unwrap().mesh(), 3.0 * 2f64.powi(-5));
        assert!(make_uniform(1.0, 0).is_err());
    }

    #[test]
    fn validation() {
        assert!(Partition::from_f64(&[0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Partition::from_f64(&[0.1, 1.0]).is_err());
        assert!(Partition::from_f64(&[0.0]).is_err());
        let p = Partition::from_json("[0, 0.25, 1]").unwrap();
        assert_eq!(p.to_json(), "[0.0,0.25,1.0]");
    }

    #[test]
    fn bracket_examples() {
        let p = Partition::from_f64(&[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(p.bracket(0.5).unwrap(), (Time::Abs(0.0), Time::Abs(0.5)));
        assert_eq!(p.bracket(0.7).unwrap(), (Time::Abs(0.5), Time::Abs(1.0)));
        let one = Partition::from_f64(&[0.0, 1.0]).unwrap();
        assert_eq!(one.bracket(0.3).unwrap(), (Time::Abs(0.0), Time::Abs(1.0)));
        assert!(p.bracket(0.0).is_err());
        assert!(p.bracket(1.5).is_err());
    }

    #[test]
    fn mesh_and_oscillation() {
        let p = Partition::from_f64(&[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(p.mesh(), 0.5);
        let ind = make_named_path("indicator_half").unwrap();
        assert_eq!(osc_over_partition(&ind, &p).unwrap(), 1.0);
        let c = CadlagPath::constant(3.0, 1.0).unwrap();
        assert_eq!(osc_over_partition(&c, &p).unwrap(), 0.0);
        let z = make_named_path("z").unwrap();
        let wrong = Partition::from_f64(&[0.0, 2.0]).unwrap();
        assert!(osc_over_partition(&z, &wrong).is_err());
    }
}
