//! Lebesgue partitions `π^{c,r}`: successive hitting times of the grid
//! `c·ℤ + r` by a continuous path.
//!
//! The path is walked segment by segment (every supported continuous path is
//! affine between knots). Levels are identified by their integer index `j`
//! (level value `c·j + r`), so "the path sits on a level" and "two hits are on
//! adjacent levels" are integer statements. For the grids `(ℤ + α)/√n` used
//! with `z`, knot values are `0` or `1/√k`, and the index of such a value is
//! decided exactly by comparing `(j+α)²·k` with `n`.

use crate::error::{domain, Error, Result};
use crate::path::{peak_height, CadlagPath, Representation, Zigzag, ZigzagKind};
use crate::time::{Side, Time};

use super::Partition;

/// A path value as seen by the level grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Float(f64),
    Zero,
    /// `1/√k`.
    InvSqrt(u64),
}

impl Value {
    pub fn to_f64(self) -> f64 {
        match self {
            Value::Float(v) => v,
            Value::Zero => 0.0,
            Value::InvSqrt(k) => 1.0 / (k as f64).sqrt(),
        }
    }
}

/// Position of a value relative to the grid: the index of the highest level
/// at or below it, and whether it sits exactly on that level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPos {
    pub floor: i64,
    pub on_level: bool,
}

/// The grid `c·ℤ + r`, optionally in the exact form `(ℤ + α)/√n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelGrid {
    c: f64,
    r: f64,
    exact: Option<(u64, f64)>,
}

impl LevelGrid {
    pub fn new(c: f64, r: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(domain(format!("grid step c = {c} must be positive")));
        }
        if !(r >= 0.0 && r < c) {
            return Err(domain(format!("grid shift r = {r} must lie in [0, c)")));
        }
        Ok(LevelGrid { c, r, exact: None })
    }

    /// The grid `(ℤ + α)/√n`, i.e. `c = 1/√n`, `r = α/√n`.
    pub fn inv_sqrt(n: u64, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(domain("n must be at least 1"));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(domain(format!("alpha = {alpha} must lie in [0, 1)")));
        }
        let s = (n as f64).sqrt();
        Ok(LevelGrid {
            c: 1.0 / s,
            r: alpha / s,
            exact: Some((n, alpha)),
        })
    }

    pub fn step(&self) -> f64 {
        self.c
    }

    pub fn shift(&self) -> f64 {
        self.r
    }

    /// Value of level `j`.
    pub fn level(&self, j: i64) -> f64 {
        match self.exact {
            Some((n, alpha)) => (j as f64 + alpha) / (n as f64).sqrt(),
            None => self.c * j as f64 + self.r,
        }
    }

    pub fn position(&self, v: Value) -> GridPos {
        match (self.exact, v) {
            (Some((_, alpha)), Value::Zero) => {
                if alpha == 0.0 {
                    GridPos {
                        floor: 0,
                        on_level: true,
                    }
                } else {
                    GridPos {
                        floor: -1,
                        on_level: false,
                    }
                }
            }
            (Some((n, alpha)), Value::InvSqrt(k)) => exact_inv_sqrt_position(n, alpha, k),
            _ => self.float_position(v.to_f64()),
        }
    }

    /// Float positioning; values within a few ulps of a level snap onto it.
    fn float_position(&self, y: f64) -> GridPos {
        let j = ((y - self.r) / self.c).floor() as i64;
        let tol = 64.0 * f64::EPSILON * y.abs().max(self.c);
        for cand in [j + 1, j, j - 1] {
            if (y - self.level(cand)).abs() <= tol {
                return GridPos {
                    floor: cand,
                    on_level: true,
                };
            }
        }
        GridPos {
            floor: j,
            on_level: false,
        }
    }
}

/// Index of the highest level `(j+α)/√n ≤ 1/√k`, decided by
/// `(j+α)²·k ≤ n` (exact in `f64` for dyadic `α` and moderate `n·k`).
fn exact_inv_sqrt_position(n: u64, alpha: f64, k: u64) -> GridPos {
    let below = |j: i64| {
        let a = j as f64 + alpha;
        a < 0.0 || a * a * (k as f64) <= n as f64
    };
    let mut j = ((n as f64 / k as f64).sqrt() - alpha).floor() as i64;
    while below(j + 1) {
        j += 1;
    }
    while !below(j) {
        j -= 1;
    }
    let a = j as f64 + alpha;
    GridPos {
        floor: j,
        on_level: a >= 0.0 && a * a * (k as f64) == n as f64,
    }
}

/// How times along a segment are interpolated.
#[derive(Debug, Clone, Copy)]
enum SegTime {
    Abs(f64, f64),
    /// Within hump `m` before 1, scaled distance running from `u0` to `u1`.
    Hump {
        m: u32,
        u0: f64,
        u1: f64,
    },
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    v0: Value,
    v1: Value,
    time: SegTime,
}

impl Segment {
    fn time_at(&self, lambda: f64) -> Time {
        match self.time {
            SegTime::Abs(a, b) => {
                if lambda == 1.0 {
                    Time::Abs(b)
                } else {
                    Time::Abs(a + lambda * (b - a))
                }
            }
            SegTime::Hump { m, u0, u1 } => {
                let u = if lambda == 1.0 {
                    u1
                } else {
                    u0 + lambda * (u1 - u0)
                };
                Time::near(Side::Before, m, u)
            }
        }
    }
}

/// Level-crossing state machine shared by the partition builder and the
/// counter.
struct Walker<'g> {
    grid: &'g LevelGrid,
    /// Level of the path at the last breakpoint, if it sits on one.
    current: Option<i64>,
    last: Time,
}

impl<'g> Walker<'g> {
    fn new(grid: &'g LevelGrid, x0: Value) -> Self {
        let p = grid.position(x0);
        Walker {
            grid,
            current: p.on_level.then_some(p.floor),
            last: Time::Abs(0.0),
        }
    }

    /// Emits every new hitting time in `(start, end]` of the segment.
    fn feed(&mut self, seg: &Segment, sink: &mut impl FnMut(Time, Option<i64>)) {
        let p0 = self.grid.position(seg.v0);
        let p1 = self.grid.position(seg.v1);
        let (y0, y1) = (seg.v0.to_f64(), seg.v1.to_f64());
        let mut hit = |j: i64, walker: &mut Self| {
            if walker.current == Some(j) {
                return;
            }
            let lambda = if p1.on_level && p1.floor == j {
                1.0
            } else {
                ((walker.grid.level(j) - y0) / (y1 - y0)).clamp(0.0, 1.0)
            };
            let t = seg.time_at(lambda);
            if t <= walker.last {
                return;
            }
            walker.current = Some(j);
            walker.last = t;
            sink(t, Some(j));
        };
        if (p1.floor, p1.on_level) == (p0.floor, p0.on_level) && y0 == y1 {
            return;
        }
        if y1 > y0 {
            for j in (p0.floor + 1)..=p1.floor {
                hit(j, self);
            }
        } else {
            let first = if p0.on_level { p0.floor - 1 } else { p0.floor };
            let last = if p1.on_level { p1.floor } else { p1.floor + 1 };
            let mut j = first;
            while j >= last {
                hit(j, self);
                j -= 1;
            }
        }
    }

    /// Whether every level in `[lo, hi]` is the current one.
    fn nothing_new_between(&self, lo: Value, hi: Value) -> bool {
        let a = self.grid.position(lo);
        let b = self.grid.position(hi);
        let first = if a.on_level { a.floor } else { a.floor + 1 };
        let last = b.floor;
        first > last || (first == last && self.current == Some(first))
    }
}

/// Drives the walker along a supported continuous path.
fn walk(
    path: &CadlagPath,
    grid: &LevelGrid,
    sink: &mut impl FnMut(Time, Option<i64>),
) -> Result<()> {
    let t_end = path.end_time();
    match path.representation() {
        Representation::PiecewiseLinear { knots } => {
            let mut w = Walker::new(grid, Value::Float(knots[0].1));
            sink(Time::Abs(0.0), w.current);
            for k in knots.windows(2) {
                let seg = Segment {
                    v0: Value::Float(k[0].1),
                    v1: Value::Float(k[1].1),
                    time: SegTime::Abs(k[0].0, k[1].0),
                };
                w.feed(&seg, sink);
            }
            if w.last < t_end {
                sink(t_end, None);
            }
            Ok(())
        }
        Representation::PiecewiseConstant { initial, .. } if path.is_continuous() => {
            let p = grid.position(Value::Float(*initial));
            sink(Time::Abs(0.0), p.on_level.then_some(p.floor));
            sink(t_end, None);
            Ok(())
        }
        Representation::Zigzag(z) if *z == Zigzag::z() => {
            walk_z(grid, sink);
            Ok(())
        }
        Representation::Zigzag(z) if z.kind != ZigzagKind::Z || z.mirror.is_some() => {
            Err(Error::UnsupportedRepresentation(
                "Lebesgue partitions are built for continuous paths only; this zigzag jumps at 1"
                    .into(),
            ))
        }
        _ => Err(Error::UnsupportedRepresentation(
            "Lebesgue partitions need a continuous piecewise-linear path or z".into(),
        )),
    }
}

/// Walks `z` hump by hump and stops once no level other than the current one
/// remains reachable.
fn walk_z(grid: &LevelGrid, sink: &mut impl FnMut(Time, Option<i64>)) {
    let exact = grid.exact.is_some();
    let peak = |m: u32| {
        if exact {
            Value::InvSqrt(m as u64 + 1)
        } else {
            Value::Float(peak_height(m))
        }
    };
    let zero = if exact {
        Value::Zero
    } else {
        Value::Float(0.0)
    };
    let mut w = Walker::new(grid, zero);
    sink(Time::Abs(0.0), w.current);
    let mut m = 0u32;
    loop {
        let up = Segment {
            v0: zero,
            v1: peak(m),
            time: SegTime::Hump {
                m,
                u0: 1.0,
                u1: 0.5,
            },
        };
        let down = Segment {
            v0: peak(m),
            v1: zero,
            time: SegTime::Hump {
                m,
                u0: 0.5,
                u1: 0.25,
            },
        };
        w.feed(&up, sink);
        w.feed(&down, sink);
        m += 1;
        if w.nothing_new_between(zero, peak(m)) || m == u32::MAX {
            break;
        }
    }
    sink(Time::Abs(1.0), None);
}

/// A Lebesgue partition with the level index of each breakpoint (`None` for
/// breakpoints that are not on a grid level, and for the final cap at `T`
/// when it is not itself a hit).
#[derive(Debug, Clone, PartialEq)]
pub struct LebesguePartition {
    pub partition: Partition,
    pub levels: Vec<Option<i64>>,
}

impl LebesguePartition {
    /// Whether consecutive interior breakpoints (both hits strictly before
    /// `T`, excluding `τ_0`) sit on adjacent levels.
    pub fn interior_steps_are_unit(&self) -> bool {
        let n = self.levels.len();
        if n < 4 {
            return true;
        }
        self.levels[1..n - 1]
            .windows(2)
            .all(|w| match (w[0], w[1]) {
                (Some(a), Some(b)) => (a - b).abs() == 1,
                _ => false,
            })
    }
}

/// `π^{c,r}` on the grid.
pub fn lebesgue_partition_on(path: &CadlagPath, grid: &LevelGrid) -> Result<LebesguePartition> {
    let mut points = Vec::new();
    let mut levels = Vec::new();
    walk(path, grid, &mut |t, j| {
        if let Some(&last) = points.last() {
            if t <= last {
                // a hit exactly at T already closes the partition
                return;
            }
        }
        points.push(t);
        levels.push(j);
    })?;
    Ok(LebesguePartition {
        partition: Partition::from_sorted(points),
        levels,
    })
}

/// `π^{c,r}` for a continuous path.
pub fn lebesgue_partition(path: &CadlagPath, c: f64, r: f64) -> Result<Partition> {
    let grid = LevelGrid::new(c, r)?;
    Ok(lebesgue_partition_on(path, &grid)?.partition)
}

/// Interval count and increment check for `π^{c,r}` without storing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LebesgueCount {
    pub intervals: u64,
    /// Every pair of consecutive interior hits lies on adjacent levels.
    pub unit_steps: bool,
}

pub fn lebesgue_count(path: &CadlagPath, grid: &LevelGrid) -> Result<LebesgueCount> {
    let t_end = path.end_time();
    let mut points = 0u64;
    let mut prev: Option<(Time, Option<i64>)> = None;
    let mut unit = true;
    walk(path, grid, &mut |t, j| {
        if let Some((pt, pj)) = prev {
            if t <= pt {
                return;
            }
            if points >= 2 && t < t_end {
                match (pj, j) {
                    (Some(a), Some(b)) if (a - b).abs() == 1 => {}
                    _ => unit = false,
                }
            }
        }
        points += 1;
        prev = Some((t, j));
    })?;
    Ok(LebesgueCount {
        intervals: points - 1,
        unit_steps: unit,
    })
}

/// `ρⁿ(α)` with level indices.
pub fn rho_lebesgue(n: u64, alpha: f64) -> Result<LebesguePartition> {
    let grid = LevelGrid::inv_sqrt(n, alpha)?;
    lebesgue_partition_on(&CadlagPath::zigzag(Zigzag::z()), &grid)
}

/// `ρⁿ(α)`: the Lebesgue partition of `z` on the grid `(ℤ + α)/√n`.
pub fn make_rho(n: u64, alpha: f64) -> Result<Partition> {
    Ok(rho_lebesgue(n, alpha)?.partition)
}

/// Breakpoints of `first` on `(0,1]` followed by the mirror images `2 − t`
/// of the breakpoints of `second`.
fn concatenate_reflected(first: Partition, second: &Partition) -> Partition {
    let mut points = first.points;
    points.extend(second.points().iter().rev().skip(1).map(|t| t.reflect()));
    Partition::from_sorted(points)
}

/// `σⁿ` on `(0,2]`.
pub fn make_sigma(n: u64) -> Result<Partition> {
    let (a, b) = if n % 2 == 1 { (0.0, 0.5) } else { (0.5, 0.0) };
    Ok(concatenate_reflected(make_rho(n, a)?, &make_rho(n, b)?))
}

/// `τⁿ` on `(0,2]`.
pub fn make_tau(n: u64) -> Result<Partition> {
    let rho = make_rho(n, 0.0)?;
    Ok(concatenate_reflected(rho.clone(), &rho))
}
