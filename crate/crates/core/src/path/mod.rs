//! Càdlàg paths on `[0,T]`: evaluation, left limits, jumps and oscillations.

mod zigzag;

pub(crate) use zigzag::Range;
pub use zigzag::{peak_height, z_local, Branch, Piece, Zigzag, ZigzagKind, MAX_RANGE_HUMPS};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::time::Time;

/// Number of humps materialized as window candidates in
/// [`CadlagPath::oscillation_mod`] for zigzag paths. Windows starting past
/// the last materialized hump are represented by the window at its start,
/// which moves the window by less than `4^{−40}`.
pub const OSC_MOD_HUMPS: u32 = 40;

/// How a path is stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Representation {
    Zigzag(Zigzag),
    /// Continuous, affine between knots; knots span `[0,T]`.
    PiecewiseLinear {
        knots: Vec<(f64, f64)>,
    },
    /// Right-continuous steps: `initial` until the first jump time, then the
    /// new value given by each `(time, value)` record.
    PiecewiseConstant {
        initial: f64,
        jumps: Vec<(f64, f64)>,
    },
}

/// A right-continuous path with left limits on `[0,T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CadlagPath {
    domain_end: f64,
    repr: Representation,
}

/// A jump `Δx(t) = x(t) − x(t−)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpRecord {
    pub time: Time,
    pub size: f64,
}

/// A closed interval `[a,b]` or a left-open interval `(a,b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: Time,
    pub end: Time,
    pub left_open: bool,
}

impl Interval {
    pub fn closed(a: impl Into<Time>, b: impl Into<Time>) -> Self {
        Interval {
            start: a.into(),
            end: b.into(),
            left_open: false,
        }
    }

    pub fn left_open(a: impl Into<Time>, b: impl Into<Time>) -> Self {
        Interval {
            start: a.into(),
            end: b.into(),
            left_open: true,
        }
    }

    fn is_empty(&self) -> bool {
        if self.left_open {
            self.start >= self.end
        } else {
            self.start > self.end
        }
    }
}

fn check_times_increasing(times: impl Iterator<Item = f64>, what: &str) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for t in times {
        if !t.is_finite() {
            return Err(invalid(format!("{what}: time {t} is not finite")));
        }
        if t <= prev {
            return Err(invalid(format!(
                "{what}: times must be strictly increasing ({prev} then {t})"
            )));
        }
        prev = t;
    }
    Ok(())
}

fn check_domain_end(t_end: f64) -> Result<()> {
    if t_end.is_finite() && t_end > 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "domain end T = {t_end} must be positive and finite"
        )))
    }
}

impl CadlagPath {
    pub fn zigzag(z: Zigzag) -> Self {
        CadlagPath {
            domain_end: z.domain_end(),
            repr: Representation::Zigzag(z),
        }
    }

    /// Piecewise-linear path through `knots`, which must start at 0 and be
    /// strictly increasing in time; the last knot time is `T`.
    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(invalid("piecewise-linear path needs at least two knots"));
        }
        check_times_increasing(knots.iter().map(|k| k.0), "knots")?;
        if knots[0].0 != 0.0 {
            return Err(invalid("first knot must be at time 0"));
        }
        if knots.iter().any(|k| !k.1.is_finite()) {
            return Err(invalid("knot values must be finite"));
        }
        let domain_end = knots[knots.len() - 1].0;
        Ok(CadlagPath {
            domain_end,
            repr: Representation::PiecewiseLinear { knots },
        })
    }

    /// Step path on `[0, t_end]` with jump times strictly increasing in `(0, T]`.
    pub fn piecewise_constant(t_end: f64, initial: f64, jumps: Vec<(f64, f64)>) -> Result<Self> {
        check_domain_end(t_end)?;
        check_times_increasing(jumps.iter().map(|j| j.0), "jumps")?;
        if let Some(&(t, _)) = jumps.first() {
            if t <= 0.0 {
                return Err(invalid("jump times must be positive"));
            }
        }
        if let Some(&(t, _)) = jumps.last() {
            if t > t_end {
                return Err(invalid(format!("jump time {t} exceeds T = {t_end}")));
            }
        }
        if !initial.is_finite() || jumps.iter().any(|j| !j.1.is_finite()) {
            return Err(invalid("step values must be finite"));
        }
        Ok(CadlagPath {
            domain_end: t_end,
            repr: Representation::PiecewiseConstant { initial, jumps },
        })
    }

    pub fn constant(c: f64, t_end: f64) -> Result<Self> {
        check_domain_end(t_end)?;
        Self::piecewise_linear(vec![(0.0, c), (t_end, c)])
    }

    /// `t ↦ intercept + slope·t` on `[0, t_end]`.
    pub fn affine(slope: f64, intercept: f64, t_end: f64) -> Result<Self> {
        check_domain_end(t_end)?;
        Self::piecewise_linear(vec![(0.0, intercept), (t_end, intercept + slope * t_end)])
    }

    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    pub fn end_time(&self) -> Time {
        Time::Abs(self.domain_end)
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn is_continuous(&self) -> bool {
        match &self.repr {
            Representation::Zigzag(z) => z.jump().is_none(),
            Representation::PiecewiseLinear { .. } => true,
            Representation::PiecewiseConstant { jumps, initial } => {
                let mut prev = *initial;
                jumps.iter().all(|&(_, v)| {
                    let same = v == prev;
                    prev = v;
                    same
                })
            }
        }
    }

    fn check_time(&self, t: Time) -> Result<()> {
        if t < Time::Abs(0.0) || t > self.end_time() {
            Err(domain(format!("time {t} outside [0, {}]", self.domain_end)))
        } else {
            Ok(())
        }
    }

    /// `x(t)`.
    pub fn eval(&self, t: impl Into<Time>) -> Result<f64> {
        let t = t.into();
        self.check_time(t)?;
        Ok(self.value(t))
    }

    /// `x(t)` without range checking; `t` must lie in `[0,T]`.
    pub fn value(&self, t: Time) -> f64 {
        match &self.repr {
            Representation::Zigzag(z) => z.eval(t),
            Representation::PiecewiseLinear { knots } => pl_value(knots, t.to_f64()),
            Representation::PiecewiseConstant { initial, jumps } => {
                let t = t.to_f64();
                let i = jumps.partition_point(|j| j.0 <= t);
                if i == 0 {
                    *initial
                } else {
                    jumps[i - 1].1
                }
            }
        }
    }

    /// `x(t−)`, exact from the representation.
    pub fn left_limit(&self, t: impl Into<Time>) -> Result<f64> {
        let t = t.into();
        self.check_time(t)?;
        if t <= Time::Abs(0.0) {
            return Err(domain("left limit is undefined at t = 0"));
        }
        Ok(self.left_value(t))
    }

    /// `x(t−)` without range checking.
    pub fn left_value(&self, t: Time) -> f64 {
        match &self.repr {
            Representation::Zigzag(z) => z.left_limit(t),
            Representation::PiecewiseLinear { knots } => pl_value(knots, t.to_f64()),
            Representation::PiecewiseConstant { initial, jumps } => {
                let t = t.to_f64();
                let i = jumps.partition_point(|j| j.0 < t);
                if i == 0 {
                    *initial
                } else {
                    jumps[i - 1].1
                }
            }
        }
    }

    /// All jumps, sorted by time.
    pub fn jumps(&self) -> Vec<JumpRecord> {
        match &self.repr {
            Representation::Zigzag(z) => z
                .jump()
                .map(|size| JumpRecord {
                    time: Time::Abs(1.0),
                    size,
                })
                .into_iter()
                .collect(),
            Representation::PiecewiseLinear { .. } => Vec::new(),
            Representation::PiecewiseConstant { initial, jumps } => {
                let mut prev = *initial;
                let mut out = Vec::new();
                for &(t, v) in jumps {
                    let size = v - prev;
                    if size != 0.0 {
                        out.push(JumpRecord {
                            time: Time::Abs(t),
                            size,
                        });
                    }
                    prev = v;
                }
                out
            }
        }
    }

    /// Jumps with `|Δx(t)| ≥ ε`.
    pub fn jump_set(&self, epsilon: f64) -> Result<Vec<JumpRecord>> {
        check_epsilon(epsilon)?;
        Ok(self
            .jumps()
            .into_iter()
            .filter(|j| j.size.abs() >= epsilon)
            .collect())
    }

    /// `J_ε(x)(t)`: sum of the jumps of size at least `ε` up to time `t`.
    pub fn jump_part(&self, epsilon: f64, t: impl Into<Time>) -> Result<f64> {
        let t = t.into();
        self.check_time(t)?;
        Ok(crate::sum::sum(
            self.jump_set(epsilon)?
                .into_iter()
                .filter(|j| j.time <= t)
                .map(|j| j.size),
        ))
    }

    /// `x − J_ε(x)`.
    pub fn without_jumps(&self, epsilon: f64) -> Result<CadlagPath> {
        check_epsilon(epsilon)?;
        let repr = match &self.repr {
            Representation::Zigzag(z) => {
                let mut z = z.clone();
                if let (Some(d), Some(m)) = (z.jump(), z.mirror.as_mut()) {
                    if d.abs() >= epsilon {
                        m.offset -= d;
                    }
                }
                Representation::Zigzag(z)
            }
            Representation::PiecewiseLinear { knots } => Representation::PiecewiseLinear {
                knots: knots.clone(),
            },
            Representation::PiecewiseConstant { initial, jumps } => {
                let mut prev = *initial;
                let mut removed = 0.0;
                let mut out = Vec::with_capacity(jumps.len());
                for &(t, v) in jumps {
                    let size = v - prev;
                    prev = v;
                    if size.abs() >= epsilon {
                        removed += size;
                    } else {
                        out.push((t, v - removed));
                    }
                }
                Representation::PiecewiseConstant {
                    initial: *initial,
                    jumps: out,
                }
            }
        };
        Ok(CadlagPath {
            domain_end: self.domain_end,
            repr,
        })
    }

    /// `(min, max)` of the path over `[a,b]`, or over `[a,b)` together with
    /// `x(b−)` when `right_open`. The càdlàg property makes the closure of
    /// the value set of `(a,b]` equal to that of `[a,b]`.
    pub(crate) fn range(&self, a: Time, b: Time, right_open: bool) -> Range {
        let mut acc = Range::new();
        match &self.repr {
            Representation::Zigzag(z) => return z.range(a, b, right_open),
            Representation::PiecewiseLinear { knots } => {
                let (fa, fb) = (a.to_f64(), b.to_f64());
                acc.push(pl_value(knots, fa));
                acc.push(pl_value(knots, fb));
                let i = knots.partition_point(|k| k.0 <= fa);
                for k in &knots[i..] {
                    if k.0 >= fb {
                        break;
                    }
                    acc.push(k.1);
                }
            }
            Representation::PiecewiseConstant { jumps, .. } => {
                let (fa, fb) = (a.to_f64(), b.to_f64());
                acc.push(self.value(a));
                let i = jumps.partition_point(|j| j.0 <= fa);
                for j in &jumps[i..] {
                    if j.0 > fb || (right_open && j.0 == fb) {
                        break;
                    }
                    acc.push(j.1);
                }
            }
        }
        acc
    }

    /// `ω(x; A) = sup_{s,t ∈ A} |x(t) − x(s)|`.
    pub fn oscillation(&self, interval: Interval) -> Result<f64> {
        self.check_interval(&interval)?;
        Ok(self.range(interval.start, interval.end, false).width())
    }

    /// `ω(x; ε; A) = sup {|x(t) − x(s)| : s,t ∈ A, |t − s| ≤ ε}`.
    ///
    /// The supremum is attained (or approached) by a window `[s, s+ε]` whose
    /// start or end sits at a knot or jump time, so only those windows are
    /// scanned, each also with its left limit at `s`.
    pub fn oscillation_mod(&self, epsilon: f64, interval: Interval) -> Result<f64> {
        check_epsilon(epsilon)?;
        self.check_interval(&interval)?;
        let (a, b) = (interval.start, interval.end);
        if a.distance(b) <= epsilon {
            return self.oscillation(interval);
        }
        let last_start = b.shifted(-epsilon);
        let mut starts = vec![a, last_start];
        for k in self.knot_times() {
            if k >= a && k <= b {
                starts.push(k);
                starts.push(k.shifted(-epsilon));
            }
        }
        let mut best = 0.0f64;
        for s in starts {
            let s = s.max(a).min(last_start);
            let end = s.shifted(epsilon).min(b);
            best = best.max(self.range(s, end, false).width());
            if s > a {
                let mut r = self.range(s, end, end < b);
                r.push(self.left_value(s));
                best = best.max(r.width());
            }
        }
        Ok(best)
    }

    /// Times where the path changes slope or jumps.
    fn knot_times(&self) -> Vec<Time> {
        match &self.repr {
            Representation::Zigzag(z) => z.knots(OSC_MOD_HUMPS),
            Representation::PiecewiseLinear { knots } => {
                knots.iter().map(|k| Time::Abs(k.0)).collect()
            }
            Representation::PiecewiseConstant { jumps, .. } => {
                let mut out = vec![Time::Abs(0.0)];
                out.extend(jumps.iter().map(|j| Time::Abs(j.0)));
                out.push(self.end_time());
                out
            }
        }
    }

    /// `sup_{t ∈ [0,T]} |x(t)|`.
    pub fn sup_norm(&self) -> f64 {
        let r = self.range(Time::Abs(0.0), self.end_time(), false);
        r.lo.abs().max(r.hi.abs())
    }

    /// Total variation for piecewise representations; `None` for zigzags,
    /// whose variation near 1 is infinite.
    pub fn total_variation(&self) -> Option<f64> {
        match &self.repr {
            Representation::Zigzag(_) => None,
            Representation::PiecewiseLinear { knots } => Some(crate::sum::sum(
                knots.windows(2).map(|w| (w[1].1 - w[0].1).abs()),
            )),
            Representation::PiecewiseConstant { .. } => {
                Some(crate::sum::sum(self.jumps().iter().map(|j| j.size.abs())))
            }
        }
    }

    fn check_interval(&self, interval: &Interval) -> Result<()> {
        if interval.is_empty() {
            return Err(domain(format!(
                "empty interval ({}, {}]",
                interval.start, interval.end
            )));
        }
        self.check_time(interval.start)?;
        self.check_time(interval.end)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("epsilon = {epsilon} must be positive")))
    }
}

fn pl_value(knots: &[(f64, f64)], t: f64) -> f64 {
    let i = knots.partition_point(|k| k.0 <= t);
    if i == 0 {
        return knots[0].1;
    }
    if i == knots.len() {
        return knots[knots.len() - 1].1;
    }
    let (t0, v0) = knots[i - 1];
    let (t1, v1) = knots[i];
    if t == t0 {
        return v0;
    }
    v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
}

/// One of the named demo paths: `z` (alias `zigzag_z`), `p`, `q`, or
/// `indicator_half` (the step `1_{[1/2,1]}` on `[0,1]`).
pub fn make_named_path(name: &str) -> Result<CadlagPath> {
    match name {
        "z" | "zigzag_z" => Ok(CadlagPath::zigzag(Zigzag::z())),
        "p" => Ok(CadlagPath::zigzag(Zigzag::p())),
        "q" => Ok(CadlagPath::zigzag(Zigzag::q())),
        "indicator_half" => CadlagPath::piecewise_constant(1.0, 0.0, vec![(0.5, 1.0)]),
        other => Err(invalid(format!("unknown path name '{other}'"))),
    }
}

/// Symmetric random walk with `steps` jumps of size `±sqrt(T/steps)` at
/// times `iT/steps`, started at 0 and driven by a seeded ChaCha8 stream.
pub fn make_random_walk(steps: usize, t_end: f64, seed: u64) -> Result<CadlagPath> {
    if steps == 0 {
        return Err(domain("random walk needs at least one step"));
    }
    check_domain_end(t_end)?;
    let h = (t_end / steps as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = 0.0;
    let jumps = (1..=steps)
        .map(|i| {
            level += if rng.gen::<bool>() { h } else { -h };
            (i as f64 * t_end / steps as f64, level)
        })
        .collect();
    CadlagPath::piecewise_constant(t_end, 0.0, jumps)
}

/// JSON description of a path.
#[derive(Debug, Clone, Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jumps: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl PathSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<CadlagPath> {
        let pairs = |v: &Option<Vec<[f64; 2]>>| -> Vec<(f64, f64)> {
            v.as_ref()
                .map(|v| v.iter().map(|p| (p[0], p[1])).collect())
                .unwrap_or_default()
        };
        let path = match self.kind.as_str() {
            "zigzag_z" | "z" | "p" | "q" | "indicator_half" => {
                let path = make_named_path(&self.kind)?;
                if let Some(t) = self.t_end {
                    if t != path.domain_end() {
                        return Err(invalid(format!(
                            "path '{}' lives on [0, {}], got T = {t}",
                            self.kind,
                            path.domain_end()
                        )));
                    }
                }
                path
            }
            "piecewise_linear" => {
                let knots = pairs(&self.knots);
                let path = CadlagPath::piecewise_linear(knots)?;
                if let Some(t) = self.t_end {
                    if t != path.domain_end() {
                        return Err(invalid("last knot time must equal T"));
                    }
                }
                path
            }
            "piecewise_constant" => {
                let t = self
                    .t_end
                    .ok_or_else(|| invalid("piecewise_constant needs T"))?;
                CadlagPath::piecewise_constant(t, self.initial.unwrap_or(0.0), pairs(&self.jumps))?
            }
            "random_walk" => {
                let steps = self
                    .steps
                    .ok_or_else(|| invalid("random_walk needs steps"))?;
                make_random_walk(steps, self.t_end.unwrap_or(1.0), self.seed.unwrap_or(0))?
            }
            other => return Err(Error::InvalidInput(format!("unknown path type '{other}'"))),
        };
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indicator() -> CadlagPath {
        make_named_path("indicator_half").unwrap()
    }

    #[test]
    fn eval_examples() {
        let z = make_named_path("z").unwrap();
        assert_eq!(z.eval(0.5).unwrap(), 1.0);
        assert_eq!(z.eval(0.75).unwrap(), 0.0);
        let c = CadlagPath::constant(2.5, 1.0).unwrap();
        assert_eq!(c.eval(0.3).unwrap(), 2.5);
        assert!(z.eval(1.5).is_err());
        assert!(z.eval(-0.1).is_err());
    }

    #[test]
    fn left_limit_examples() {
        let q = make_named_path("q").unwrap();
        assert_eq!(q.left_limit(1.0).unwrap(), 0.0);
        assert_eq!(indicator().left_limit(0.5).unwrap(), 0.0);
        assert_eq!(indicator().eval(0.5).unwrap(), 1.0);
        assert!(q.left_limit(0.0).is_err());
    }

    #[test]
    fn jump_set_examples() {
        let j = indicator().jump_set(0.5).unwrap();
        assert_eq!(
            j,
            vec![JumpRecord {
                time: Time::Abs(0.5),
                size: 1.0
            }]
        );
        assert!(make_named_path("z")
            .unwrap()
            .jump_set(1e-9)
            .unwrap()
            .is_empty());
        let j = make_named_path("q").unwrap().jump_set(0.5).unwrap();
        assert_eq!(
            j,
            vec![JumpRecord {
                time: Time::Abs(1.0),
                size: 1.0
            }]
        );
        assert!(indicator().jump_set(0.0).is_err());
    }

    #[test]
    fn jump_part_examples() {
        assert_eq!(indicator().jump_part(0.5, 1.0).unwrap(), 1.0);
        assert_eq!(indicator().jump_part(0.5, 0.25).unwrap(), 0.0);
        let w = make_random_walk(16, 1.0, 3).unwrap();
        assert_eq!(w.jump_part(0.5, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn oscillation_examples() {
        let z = make_named_path("z").unwrap();
        assert_eq!(z.oscillation(Interval::closed(0.0, 0.5)).unwrap(), 1.0);
        let c = CadlagPath::constant(1.0, 1.0).unwrap();
        assert_eq!(c.oscillation(Interval::closed(0.2, 0.7)).unwrap(), 0.0);
        assert_eq!(
            indicator()
                .oscillation(Interval::left_open(0.25, 0.75))
                .unwrap(),
            1.0
        );
        assert!(z.oscillation(Interval::left_open(0.5, 0.5)).is_err());
    }

    #[test]
    fn oscillation_mod_examples() {
        let a = CadlagPath::affine(1.0, 0.0, 1.0).unwrap();
        let w = a.oscillation_mod(0.1, Interval::closed(0.0, 1.0)).unwrap();
        assert!((w - 0.1).abs() < 1e-12);
        let c = CadlagPath::constant(1.0, 1.0).unwrap();
        assert_eq!(
            c.oscillation_mod(0.1, Interval::closed(0.0, 1.0)).unwrap(),
            0.0
        );
        let z = make_named_path("z").unwrap();
        let w = z.oscillation_mod(0.25, Interval::closed(0.0, 0.5)).unwrap();
        assert!((w - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oscillation_mod_sees_jump_from_left_limit() {
        let w = indicator()
            .oscillation_mod(0.1, Interval::closed(0.0, 1.0))
            .unwrap();
        assert_eq!(w, 1.0);
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(make_named_path("z").unwrap().sup_norm(), 1.0);
        assert_eq!(CadlagPath::constant(-2.0, 1.0).unwrap().sup_norm(), 2.0);
        assert_eq!(make_named_path("p").unwrap().sup_norm(), 3.0);
    }

    #[test]
    fn named_path_values() {
        let p = make_named_path("p").unwrap();
        assert_eq!(p.eval(1.0).unwrap(), 2.0);
        let q = make_named_path("q").unwrap();
        assert_eq!(q.eval(2.0).unwrap(), 2.0);
        assert!(make_named_path("nope").is_err());
    }

    #[test]
    fn random_walk_shape() {
        let w = make_random_walk(4, 1.0, 11).unwrap();
        let jumps = w.jumps();
        assert_eq!(jumps.len(), 4);
        assert!(jumps.iter().all(|j| (j.size.abs() - 0.5).abs() < 1e-15));
        assert_eq!(w, make_random_walk(4, 1.0, 11).unwrap());
        assert!(make_random_walk(0, 1.0, 1).is_err());
    }

    #[test]
    fn without_jumps_removes_large_jumps() {
        let p = make_named_path("p").unwrap().without_jumps(1.0).unwrap();
        assert!(p.is_continuous());
        assert_eq!(p.eval(1.0).unwrap(), 0.0);
        let i = indicator().without_jumps(0.5).unwrap();
        assert_eq!(i.eval(1.0).unwrap(), 0.0);
        let kept = indicator().without_jumps(2.0).unwrap();
        assert_eq!(kept, indicator());
    }

    #[test]
    fn spec_loader() {
        let s =
            PathSpec::from_json(r#"{"type":"piecewise_linear","knots":[[0,0],[1,2]]}"#).unwrap();
        assert_eq!(s.build().unwrap().eval(0.5).unwrap(), 1.0);
        let s =
            PathSpec::from_json(r#"{"type":"piecewise_linear","knots":[[0,0],[0.5,1],[0.4,2]]}"#)
                .unwrap();
        assert!(s.build().is_err());
        assert!(PathSpec::from_json(r#"{"type":"z","bogus":1}"#).is_err());
        let s = PathSpec::from_json(r#"{"type":"random_walk","steps":8,"seed":5}"#).unwrap();
        assert_eq!(s.build().unwrap().jumps().len(), 8);
        let s = PathSpec::from_json(r#"{"type":"p","T":1}"#).unwrap();
        assert!(s.build().is_err());
    }
}
