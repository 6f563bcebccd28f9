//! Time points with an exact representation near `t = 1`.
//!
//! The zigzag paths oscillate infinitely often as `t → 1`, at times
//! `1 − 4^{−m}·u` that collapse to `1.0` in double precision once `m ≳ 26`.
//! A [`Time::Near`] stores such a point by its hump index `m` and scaled
//! distance `u ∈ (1/4, 1]`, on either side of 1, so that ordering and
//! evaluation stay exact for every hump.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{domain, Result};

/// Side of the pivot `t = 1` on which a [`Time::Near`] lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Before,
    After,
}

/// A time point.
///
/// `Near { side, hump, dist }` is the point at distance `4^{−hump}·dist`
/// before or after 1, with `dist ∈ (1/4, 1]`.
#[derive(Debug, Clone, Copy)]
pub enum Time {
    Abs(f64),
    Near { side: Side, hump: u32, dist: f64 },
}

/// Largest hump index for which `Near` is materialized; deeper distances
/// underflow to zero in `f64`.
pub const MAX_HUMP: u32 = 500;

impl Time {
    /// Checked absolute time.
    pub fn abs(t: f64) -> Result<Time> {
        if t.is_finite() {
            Ok(Time::Abs(t))
        } else {
            Err(domain(format!("time {t} is not finite")))
        }
    }

    /// A point in hump-local coordinates; `dist ≤ 1/4` rolls into the next
    /// hump (exactly, since scaling by 4 is exact).
    pub fn near(side: Side, hump: u32, dist: f64) -> Time {
        debug_assert!(dist > 0.0 && dist <= 1.0);
        if dist <= 0.25 {
            Time::Near {
                side,
                hump: hump + 1,
                dist: dist * 4.0,
            }
        } else {
            Time::Near { side, hump, dist }
        }
    }

    /// The point at signed offset `delta` from 1, in hump-local form.
    pub fn from_offset(delta: f64) -> Time {
        if delta == 0.0 {
            return Time::Abs(1.0);
        }
        let side = if delta < 0.0 {
            Side::Before
        } else {
            Side::After
        };
        let d = delta.abs();
        if d > 1.0 {
            return Time::Abs(1.0 + delta);
        }
        let (hump, dist) = hump_coords(d);
        Time::Near { side, hump, dist }
    }

    /// Unsigned distance to 1 for a `Near` point.
    fn near_distance(hump: u32, dist: f64) -> f64 {
        0.25f64.powi(hump as i32) * dist
    }

    /// Signed offset from 1 (exact for `Near`; rounded for `Abs`).
    pub fn offset_from_one(self) -> f64 {
        match self {
            Time::Abs(t) => t - 1.0,
            Time::Near { side, hump, dist } => {
                let d = Self::near_distance(hump, dist);
                match side {
                    Side::Before => -d,
                    Side::After => d,
                }
            }
        }
    }

    /// Nearest `f64` to this time.
    pub fn to_f64(self) -> f64 {
        match self {
            Time::Abs(t) => t,
            Time::Near { .. } => 1.0 + self.offset_from_one(),
        }
    }

    /// Hump index and scaled distance of a time in `[0, 1)`; `None` otherwise.
    pub fn before_one(self) -> Option<(u32, f64)> {
        match self {
            Time::Near {
                side: Side::Before,
                hump,
                dist,
            } => Some((hump, dist)),
            Time::Near {
                side: Side::After, ..
            } => None,
            Time::Abs(t) => {
                if !(0.0..1.0).contains(&t) {
                    None
                } else {
                    Some(hump_coords(1.0 - t))
                }
            }
        }
    }

    /// Mirror image `2 − t`.
    pub fn reflect(self) -> Time {
        match self {
            Time::Abs(t) => Time::Abs(2.0 - t),
            Time::Near { side, hump, dist } => Time::Near {
                side: match side {
                    Side::Before => Side::After,
                    Side::After => Side::Before,
                },
                hump,
                dist,
            },
        }
    }

    /// `self + dt`, kept in hump-local form when the result is near 1.
    pub fn shifted(self, dt: f64) -> Time {
        match self {
            Time::Abs(t) => Time::Abs(t + dt),
            Time::Near { .. } => Time::from_offset(self.offset_from_one() + dt),
        }
    }

    /// `|self − other|`, computed without cancellation when both are near 1.
    pub fn distance(self, other: Time) -> f64 {
        match (self, other) {
            (Time::Abs(a), Time::Abs(b)) => (a - b).abs(),
            (
                Time::Near {
                    side: sa,
                    hump: ha,
                    dist: ua,
                },
                Time::Near {
                    side: sb,
                    hump: hb,
                    dist: ub,
                },
            ) => {
                let da = Self::near_distance(ha, ua);
                let db = Self::near_distance(hb, ub);
                if sa == sb {
                    (da - db).abs()
                } else {
                    da + db
                }
            }
            _ => (self.offset_from_one() - other.offset_from_one()).abs(),
        }
    }

    pub fn max(self, other: Time) -> Time {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Time) -> Time {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Total order on times.
    pub fn total_cmp(&self, other: &Time) -> Ordering {
        match (*self, *other) {
            (Time::Abs(a), Time::Abs(b)) => a.total_cmp(&b),
            (
                Time::Near {
                    side: sa,
                    hump: ha,
                    dist: ua,
                },
                Time::Near {
                    side: sb,
                    hump: hb,
                    dist: ub,
                },
            ) => {
                // before 1, a larger hump or a smaller distance is later
                let before = ha.cmp(&hb).then(ub.total_cmp(&ua));
                match (sa, sb) {
                    (Side::Before, Side::After) => Ordering::Less,
                    (Side::After, Side::Before) => Ordering::Greater,
                    (Side::Before, Side::Before) => before,
                    (Side::After, Side::After) => before.reverse(),
                }
            }
            (Time::Abs(a), Time::Near { side, hump, dist }) => cmp_abs_near(a, side, hump, dist),
            (Time::Near { side, hump, dist }, Time::Abs(a)) => {
                cmp_abs_near(a, side, hump, dist).reverse()
            }
        }
    }
}

/// Compare `a` with `1 ∓ d`. For `a ∈ [0.5, 2]` the gap `a − 1` is exact.
/// A distance that underflows to zero still lies strictly on its side of 1.
fn cmp_abs_near(a: f64, side: Side, hump: u32, dist: f64) -> Ordering {
    let d = Time::near_distance(hump, dist);
    let gap = a - 1.0;
    let (target, side_order) = match side {
        Side::Before => (-d, Ordering::Greater),
        Side::After => (d, Ordering::Less),
    };
    match gap.partial_cmp(&target).expect("finite times") {
        Ordering::Equal if d == 0.0 => side_order,
        o => o,
    }
}

/// Hump index and scaled distance of the point at distance `d ∈ (0, 1]`
/// from 1. Hump `m` covers distances in `(4^{−m−1}, 4^{−m}]`.
pub fn hump_coords(d: f64) -> (u32, f64) {
    debug_assert!(d > 0.0 && d <= 1.0);
    let mut hump = 0u32;
    let mut scale = 1.0f64;
    while d <= scale * 0.25 && hump < MAX_HUMP {
        scale *= 0.25;
        hump += 1;
    }
    (hump, d / scale)
}

impl PartialEq for Time {
    fn eq(&self, other: &Self) -> bool {
        self.total_cmp(other) == Ordering::Equal
    }
}

impl Eq for Time {}

impl PartialOrd for Time {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Time {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

/// Serializes as the nearest `f64`.
impl serde::Serialize for Time {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

impl From<f64> for Time {
    fn from(t: f64) -> Self {
        Time::Abs(t)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Time::Abs(t) => write!(f, "{t}"),
            Time::Near { side, hump, dist } => {
                let sign = match side {
                    Side::Before => '-',
                    Side::After => '+',
                };
                write!(f, "1{sign}4^-{hump}*{dist}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hump_start_matches_absolute_time() {
        for m in 0..20u32 {
            let t = 1.0 - 0.25f64.powi(m as i32);
            assert_eq!(Time::near(Side::Before, m, 1.0), Time::Abs(t));
            assert_eq!(Time::Abs(t).before_one(), Some((m, 1.0)));
        }
    }

    #[test]
    fn peak_is_half_distance() {
        assert_eq!(Time::Abs(0.5).before_one(), Some((0, 0.5)));
        assert_eq!(Time::Abs(0.875).before_one(), Some((1, 0.5)));
    }

    #[test]
    fn deep_humps_stay_ordered() {
        let a = Time::near(Side::Before, 60, 0.5);
        let b = Time::near(Side::Before, 61, 0.9);
        let one = Time::Abs(1.0);
        assert!(a < b);
        assert!(b < one);
        assert!(one < b.reflect());
        assert!(b.reflect() < a.reflect());
        assert!(a.to_f64() == 1.0);
        let deep = Time::near(Side::Before, 10_000, 1.0);
        assert!(deep < one && one < deep.reflect());
        assert!(Time::Abs(0.5) < deep && deep.reflect() < Time::Abs(1.5));
    }

    #[test]
    fn quarter_distance_rolls_over() {
        assert_eq!(
            Time::near(Side::Before, 3, 0.25),
            Time::near(Side::Before, 4, 1.0)
        );
        assert!(matches!(
            Time::near(Side::Before, 3, 0.25),
            Time::Near { hump: 4, .. }
        ));
    }

    #[test]
    fn offsets_round_trip() {
        for &delta in &[-0.9, -0.3, -1e-9, 1e-12, 0.2, 0.75] {
            let t = Time::from_offset(delta);
            assert_eq!(t.offset_from_one(), delta);
        }
        assert_eq!(Time::from_offset(0.0), Time::Abs(1.0));
    }

    #[test]
    fn distance_across_pivot() {
        let a = Time::near(Side::Before, 40, 1.0);
        let b = a.reflect();
        assert_eq!(a.distance(b), 2.0 * 0.25f64.powi(40));
        assert_eq!(Time::Abs(0.25).distance(Time::Abs(0.75)), 0.5);
    }

    #[test]
    fn add_moves_across_pivot() {
        let a = Time::near(Side::Before, 2, 1.0);
        let b = a.shifted(0.125);
        assert!(b > Time::Abs(1.0));
        assert_eq!(b.offset_from_one(), 0.0625);
    }
}
