//! The zigzag `z` and the two-sided paths built from it.
//!
//! `z` vanishes at `t = 1 − 4^{−m}`, peaks at `(m+1)^{−1/2}` at
//! `t = 1 − 4^{−m}/2`, and is affine in between. In hump-local coordinates
//! `(m, u)` with `t = 1 − 4^{−m}·u`, `u ∈ (1/4, 1]`, both knots are exact:
//! the hump starts at `u = 1` and peaks at `u = 1/2`.

use serde::{Deserialize, Serialize};

use crate::time::{Side, Time};

/// Which named zigzag path this is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZigzagKind {
    Z,
    P,
    Q,
}

/// `sign·z(τ) + drift·t + offset`, where `τ = t` on the forward piece and
/// `τ = 2 − t` on the mirrored piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub sign: f64,
    pub drift: f64,
    pub offset: f64,
}

/// Side of `t = 1` on which a branch lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    Forward,
    Mirror,
}

/// Peak height `(m+1)^{−1/2}` of hump `m`.
pub fn peak_height(m: u32) -> f64 {
    1.0 / (m as f64 + 1.0).sqrt()
}

/// `z` at hump-local coordinates.
pub fn z_local(m: u32, u: f64) -> f64 {
    let h = peak_height(m);
    if u >= 0.5 {
        h * 2.0 * (1.0 - u)
    } else {
        h * 4.0 * (u - 0.25)
    }
}

/// Largest number of humps enumerated when a range reaches `t = 1`.
pub const MAX_RANGE_HUMPS: u32 = 100_000;

impl Branch {
    pub const fn new(sign: f64, drift: f64, offset: f64) -> Self {
        Branch {
            sign,
            drift,
            offset,
        }
    }

    /// Value at `t = 1`, where `z` vanishes by continuity.
    pub fn at_pivot(&self) -> f64 {
        self.drift + self.offset
    }

    /// Value at hump coordinates `(m, u)` of `τ`.
    pub fn at_coords(&self, piece: Piece, m: u32, u: f64) -> f64 {
        let d = 0.25f64.powi(m as i32) * u;
        let dt = match piece {
            Piece::Forward => -d,
            Piece::Mirror => d,
        };
        self.sign * z_local(m, u) + self.at_pivot() + self.drift * dt
    }

    /// Envelope of the values on the part of the piece with `τ` in
    /// `[1 − 4^{−m}, 1]`.
    fn tail_envelope(&self, piece: Piece, m: u32) -> (f64, f64) {
        let h = peak_height(m);
        let d = 0.25f64.powi(m as i32);
        let (z_lo, z_hi) = if self.sign >= 0.0 {
            (0.0, self.sign * h)
        } else {
            (self.sign * h, 0.0)
        };
        let drift_end = match piece {
            Piece::Forward => -self.drift * d,
            Piece::Mirror => self.drift * d,
        };
        let (t_lo, t_hi) = if drift_end < 0.0 {
            (drift_end, 0.0)
        } else {
            (0.0, drift_end)
        };
        let base = self.at_pivot();
        (base + z_lo + t_lo, base + z_hi + t_hi)
    }

    /// Exact `(min, max)` of the piece over `τ ∈ [lo, hi]`, where `lo` is
    /// given in hump coordinates and `hi = None` means `τ = 1`.
    pub fn range(&self, piece: Piece, lo: (u32, f64), hi: Option<(u32, f64)>) -> (f64, f64) {
        let mut acc = Range::new();
        acc.push(self.at_coords(piece, lo.0, lo.1));
        match hi {
            Some((mh, uh)) => acc.push(self.at_coords(piece, mh, uh)),
            None => acc.push(self.at_pivot()),
        }
        let lo_t = Time::Near {
            side: Side::Before,
            hump: lo.0,
            dist: lo.1,
        };
        let hi_t = hi.map(|(m, u)| Time::Near {
            side: Side::Before,
            hump: m,
            dist: u,
        });
        let inside = |k: Time| k > lo_t && hi_t.is_none_or(|h| k < h);
        let mut m = lo.0;
        loop {
            for knot in [(m, 0.5), (m + 1, 1.0)] {
                let k = Time::Near {
                    side: Side::Before,
                    hump: knot.0,
                    dist: knot.1,
                };
                if inside(k) {
                    acc.push(self.at_coords(piece, knot.0, knot.1));
                }
            }
            m += 1;
            match hi {
                Some((mh, _)) if m > mh => break,
                Some(_) => {}
                None => {
                    let (e_lo, e_hi) = self.tail_envelope(piece, m);
                    if e_lo >= acc.lo && e_hi <= acc.hi {
                        break;
                    }
                    if m - lo.0 >= MAX_RANGE_HUMPS {
                        acc.push(e_lo);
                        acc.push(e_hi);
                        break;
                    }
                }
            }
        }
        (acc.lo, acc.hi)
    }
}

/// Running `(min, max)` accumulator.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub fn new() -> Self {
        Range {
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
        }
    }

    pub fn push(&mut self, v: f64) {
        self.lo = self.lo.min(v);
        self.hi = self.hi.max(v);
    }

    pub fn merge(&mut self, (lo, hi): (f64, f64)) {
        self.lo = self.lo.min(lo);
        self.hi = self.hi.max(hi);
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn width(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }
}

/// An analytic zigzag path on `[0,1]` (forward piece only) or `[0,2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zigzag {
    pub kind: ZigzagKind,
    pub forward: Branch,
    pub mirror: Option<Branch>,
}

impl Zigzag {
    pub fn z() -> Self {
        Zigzag {
            kind: ZigzagKind::Z,
            forward: Branch::new(1.0, 0.0, 0.0),
            mirror: None,
        }
    }

    /// `z(t)` on `[0,1)`, `2 + z(2−t)` on `[1,2]`.
    pub fn p() -> Self {
        Zigzag {
            kind: ZigzagKind::P,
            forward: Branch::new(1.0, 0.0, 0.0),
            mirror: Some(Branch::new(1.0, 0.0, 2.0)),
        }
    }

    /// `−z(t) + t − 1` on `[0,1)`, `z(2−t) + t` on `[1,2]`.
    pub fn q() -> Self {
        Zigzag {
            kind: ZigzagKind::Q,
            forward: Branch::new(-1.0, 1.0, -1.0),
            mirror: Some(Branch::new(1.0, 1.0, 0.0)),
        }
    }

    pub fn domain_end(&self) -> f64 {
        if self.mirror.is_some() {
            2.0
        } else {
            1.0
        }
    }

    /// Value at `t`, which must lie in the domain.
    pub fn eval(&self, t: Time) -> f64 {
        if let Some((m, u)) = t.before_one() {
            return self.forward.at_coords(Piece::Forward, m, u);
        }
        let one = Time::Abs(1.0);
        match self.mirror {
            None => self.forward.at_pivot(),
            Some(b) => {
                if t == one {
                    b.at_pivot()
                } else {
                    let (m, u) = t.reflect().before_one().unwrap_or((0, 1.0));
                    b.at_coords(Piece::Mirror, m, u)
                }
            }
        }
    }

    /// Left limit at `t > 0`.
    pub fn left_limit(&self, t: Time) -> f64 {
        if t == Time::Abs(1.0) {
            self.forward.at_pivot()
        } else {
            self.eval(t)
        }
    }

    /// Jump at 1, if any.
    pub fn jump(&self) -> Option<f64> {
        self.mirror
            .map(|b| b.at_pivot() - self.forward.at_pivot())
            .filter(|d| *d != 0.0)
    }

    /// `(min, max)` over `[a, b]`, or over `[a, b)` when `right_open`
    /// (then `x(b−)` is included instead of `x(b)`).
    pub(crate) fn range(&self, a: Time, b: Time, right_open: bool) -> Range {
        let one = Time::Abs(1.0);
        let mut acc = Range::new();
        if a < one {
            let lo = a.before_one().expect("time in [0,1)");
            let hi = if b < one { b.before_one() } else { None };
            acc.merge(self.forward.range(Piece::Forward, lo, hi));
        }
        if let Some(branch) = self.mirror {
            let reaches_mirror = if right_open { b > one } else { b >= one };
            if reaches_mirror {
                let start = a.max(one);
                let lo = b.reflect().before_one().unwrap_or((0, 1.0));
                let hi = if start == one {
                    None
                } else {
                    start.reflect().before_one()
                };
                if start == b {
                    acc.push(self.eval(b));
                } else {
                    acc.merge(branch.range(Piece::Mirror, lo, hi));
                }
            }
        } else if b >= one && a >= one {
            acc.push(self.forward.at_pivot());
        }
        acc
    }

    /// Knot times (hump starts and peaks) for humps `0..humps` on each piece,
    /// plus the pivot and the endpoints.
    pub(crate) fn knots(&self, humps: u32) -> Vec<Time> {
        let mut out = vec![Time::Abs(0.0)];
        for m in 0..humps {
            out.push(Time::Near {
                side: Side::Before,
                hump: m,
                dist: 0.5,
            });
            out.push(Time::near(Side::Before, m + 1, 1.0));
        }
        out.push(Time::Abs(1.0));
        if self.mirror.is_some() {
            let mut mirrored: Vec<Time> =
                out[..out.len() - 1].iter().map(|t| t.reflect()).collect();
            mirrored.reverse();
            out.extend(mirrored);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_knot_values() {
        let z = Zigzag::z();
        for m in 0..30u32 {
            let start = Time::near(Side::Before, m, 1.0);
            let peak = Time::Near {
                side: Side::Before,
                hump: m,
                dist: 0.5,
            };
            assert_eq!(z.eval(start), 0.0);
            assert_eq!(z.eval(peak), peak_height(m));
        }
        assert_eq!(z.eval(Time::Abs(0.5)), 1.0);
        assert_eq!(z.eval(Time::Abs(0.75)), 0.0);
        assert_eq!(z.eval(Time::Abs(1.0)), 0.0);
    }

    #[test]
    fn first_hump_slopes() {
        let z = Zigzag::z();
        assert!((z.eval(Time::Abs(0.25)) - 0.5).abs() < 1e-15);
        assert!((z.eval(Time::Abs(0.625)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn p_and_q_pivot_values() {
        let p = Zigzag::p();
        assert_eq!(p.eval(Time::Abs(1.0)), 2.0);
        assert_eq!(p.left_limit(Time::Abs(1.0)), 0.0);
        assert_eq!(p.jump(), Some(2.0));
        let q = Zigzag::q();
        assert_eq!(q.eval(Time::Abs(1.0)), 1.0);
        assert_eq!(q.left_limit(Time::Abs(1.0)), 0.0);
        assert_eq!(q.eval(Time::Abs(2.0)), 2.0);
        assert_eq!(q.jump(), Some(1.0));
        assert_eq!(Zigzag::z().jump(), None);
    }

    #[test]
    fn range_to_pivot_terminates() {
        let z = Zigzag::z();
        let r = z.range(Time::Abs(0.75), Time::Abs(1.0), false);
        assert_eq!(r.lo, 0.0);
        assert_eq!(r.hi, peak_height(1));
        let q = Zigzag::q();
        let r = q.range(Time::Abs(0.9), Time::Abs(1.1), false);
        assert!(r.hi >= 1.0 && r.lo < 0.0);
    }

    #[test]
    fn knots_are_increasing() {
        let k = Zigzag::p().knots(10);
        assert!(k.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*k.last().unwrap(), Time::Abs(2.0));
    }
}
