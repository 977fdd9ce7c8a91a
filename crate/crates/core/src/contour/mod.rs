//! Piecewise-linear contours with positive jumps.
//!
//! A contour is a list of primitives: instantaneous upward jumps and linear
//! falls. A fall is stored as the height it drops and the speed of the
//! segment it descends, so it lasts `drop * speed` time units and decreases
//! at rate `1 / speed`. Heights stay on the dyadic grid, which keeps every
//! operation below exact.

mod codec;
mod distance;
mod excursion;
mod timechange;

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{quantize, EPS};

pub use codec::{decode, encode};
pub use distance::contour_distance;
pub use excursion::{excursions_above_min, Decomposition, Excursion};
pub use timechange::time_change;
pub(crate) use timechange::time_change_path;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Prim {
    Jump(f64),
    Fall { drop: f64, speed: f64 },
}

impl Prim {
    /// A fall given as duration and rate, the textual convention.
    pub fn fall(duration: f64, rate: f64) -> Prim {
        Prim::Fall {
            drop: duration * rate,
            speed: 1.0 / rate,
        }
    }

    /// A unit-speed fall.
    pub fn unit_fall(drop: f64) -> Prim {
        Prim::Fall { drop, speed: 1.0 }
    }

    pub fn duration(&self) -> f64 {
        match *self {
            Prim::Jump(_) => 0.0,
            Prim::Fall { drop, speed } => drop * speed,
        }
    }

    /// Signed height change.
    pub fn delta(&self) -> f64 {
        match *self {
            Prim::Jump(s) => s,
            Prim::Fall { drop, .. } => -drop,
        }
    }
}

impl fmt::Display for Prim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Prim::Jump(s) => write!(f, "J{s}"),
            Prim::Fall { drop, speed } => write!(f, "F({}, {})", drop * speed, 1.0 / speed),
        }
    }
}

/// Appends primitives while keeping the list canonical: zero-size
/// primitives vanish, adjacent jumps merge, adjacent falls of one speed merge.
#[derive(Clone, Debug, Default)]
pub struct PrimBuilder {
    prims: Vec<Prim>,
}

impl PrimBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, p: Prim) {
        match p {
            Prim::Jump(s) => self.jump(s),
            Prim::Fall { drop, speed } => self.fall(drop, speed),
        }
    }

    pub fn jump(&mut self, size: f64) {
        if size == 0.0 {
            return;
        }
        if let Some(Prim::Jump(s)) = self.prims.last_mut() {
            *s += size;
        } else {
            self.prims.push(Prim::Jump(size));
        }
    }

    pub fn fall(&mut self, drop: f64, speed: f64) {
        if drop == 0.0 {
            return;
        }
        match self.prims.last_mut() {
            Some(Prim::Fall { drop: d, speed: s }) if *s == speed => *d += drop,
            _ => self.prims.push(Prim::Fall { drop, speed }),
        }
    }

    pub fn extend<I: IntoIterator<Item = Prim>>(&mut self, it: I) {
        for p in it {
            self.push(p);
        }
    }

    pub fn finish(self) -> Vec<Prim> {
        self.prims
    }
}

/// A path made of primitives from an arbitrary start height.
#[derive(Clone, Debug, PartialEq)]
pub struct PljPath {
    pub start: f64,
    pub prims: Vec<Prim>,
}

impl PljPath {
    pub fn new(start: f64, prims: Vec<Prim>) -> Self {
        let mut b = PrimBuilder::new();
        b.extend(prims);
        PljPath {
            start,
            prims: b.finish(),
        }
    }

    pub fn end(&self) -> f64 {
        self.prims.iter().fold(self.start, |h, p| h + p.delta())
    }

    pub fn duration(&self) -> f64 {
        self.prims.iter().map(Prim::duration).sum()
    }

    /// Breakpoints `(t, x)`, both sides of every jump.
    pub fn breakpoints(&self) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, self.start)];
        let (mut t, mut h) = (0.0, self.start);
        for p in &self.prims {
            t += p.duration();
            h += p.delta();
            out.push((t, h));
        }
        out
    }
}

/// One fall with its start time and start height.
#[derive(Clone, Copy, Debug)]
pub(crate) struct FallAt {
    pub index: usize,
    pub t: f64,
    pub h: f64,
    pub drop: f64,
    pub speed: f64,
}

impl FallAt {
    fn end_t(&self) -> f64 {
        self.t + self.drop * self.speed
    }

    fn end_h(&self) -> f64 {
        self.h - self.drop
    }

    /// Height at time `t` inside this fall, exact at both ends.
    fn height_at(&self, t: f64) -> f64 {
        if t <= self.t {
            self.h
        } else if t >= self.end_t() {
            self.end_h()
        } else {
            (self.h - (t - self.t) / self.speed).clamp(self.end_h(), self.h)
        }
    }
}

/// A canonical contour: starts at 0 with a jump, stays positive in between
/// and ends exactly at 0.
#[derive(Clone, Debug)]
pub struct PljContour {
    prims: Vec<Prim>,
    falls: Vec<FallAt>,
    total: f64,
}

impl PartialEq for PljContour {
    fn eq(&self, other: &Self) -> bool {
        self.prims == other.prims
    }
}

impl PljContour {
    /// Canonicalizes and validates a primitive list. Sizes are snapped to
    /// the grid and a terminal height within `EPS` of 0 is closed exactly.
    pub fn new(prims: Vec<Prim>) -> Result<Self> {
        let mut b = PrimBuilder::new();
        for p in prims {
            match p {
                Prim::Jump(s) => {
                    if !s.is_finite() || s < 0.0 {
                        return Err(Error::InvalidContour(format!("negative jump size {s}")));
                    }
                    b.jump(quantize(s));
                }
                Prim::Fall { drop, speed } => {
                    if !drop.is_finite() || drop < 0.0 {
                        return Err(Error::InvalidContour(format!("invalid fall size {drop}")));
                    }
                    if !speed.is_finite() || speed <= 0.0 {
                        return Err(Error::InvalidContour(format!("invalid fall rate {}", 1.0 / speed)));
                    }
                    b.fall(quantize(drop), speed);
                }
            }
        }
        let mut prims = b.finish();
        match prims.first() {
            Some(Prim::Jump(_)) => {}
            _ => return Err(Error::InvalidContour("a contour must start with a jump".into())),
        }
        let mut h = 0.0;
        let n = prims.len();
        for (k, p) in prims.iter().enumerate() {
            if let Prim::Jump(_) = p {
                if k > 0 && h <= 0.0 {
                    return Err(Error::InvalidContour("contour returns to 0 before its end".into()));
                }
            }
            h += p.delta();
            if h < -EPS {
                return Err(Error::InvalidContour(format!("height {h} < 0")));
            }
            if k + 1 < n && h <= EPS && matches!(p, Prim::Fall { .. }) {
                return Err(Error::InvalidContour("contour returns to 0 before its end".into()));
            }
        }
        if h.abs() > EPS {
            return Err(Error::InvalidContour(format!("terminal height {h} is not 0")));
        }
        if h != 0.0 {
            match prims.last_mut() {
                Some(Prim::Fall { drop, .. }) => *drop += h,
                _ => return Err(Error::InvalidContour("contour must end with a fall".into())),
            }
        }
        Ok(Self::from_canonical(prims))
    }

    /// Wraps a list already known to be canonical and on the grid.
    pub(crate) fn from_canonical(prims: Vec<Prim>) -> Self {
        let mut falls = Vec::new();
        let (mut t, mut h) = (0.0, 0.0);
        for (index, p) in prims.iter().enumerate() {
            if let Prim::Fall { drop, speed } = *p {
                falls.push(FallAt {
                    index,
                    t,
                    h,
                    drop,
                    speed,
                });
            }
            t += p.duration();
            h += p.delta();
        }
        PljContour { prims, falls, total: t }
    }

    pub fn prims(&self) -> &[Prim] {
        &self.prims
    }

    /// Total duration m.
    pub fn duration(&self) -> f64 {
        self.total
    }

    pub fn max_height(&self) -> f64 {
        self.falls.iter().map(|f| f.h).fold(0.0, f64::max)
    }

    pub fn jump_count(&self) -> usize {
        self.prims.iter().filter(|p| matches!(p, Prim::Jump(_))).count()
    }

    pub fn as_path(&self) -> PljPath {
        PljPath {
            start: 0.0,
            prims: self.prims.clone(),
        }
    }

    pub(crate) fn falls(&self) -> &[FallAt] {
        &self.falls
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        if !(t >= -EPS && t <= self.total + EPS) {
            return Err(Error::out_of_range("t", t, format!("[0, {}]", self.total)));
        }
        Ok(t.clamp(0.0, self.total))
    }

    /// Index of the fall running at time `t` (right-continuous), or `None`
    /// at the terminal time.
    pub(crate) fn fall_at(&self, t: f64) -> Option<usize> {
        let k = self.falls.partition_point(|f| f.t <= t);
        if k == 0 {
            return Some(0);
        }
        let f = &self.falls[k - 1];
        if t < f.end_t() {
            Some(k - 1)
        } else {
            None
        }
    }

    /// Right-continuous value f(t).
    pub fn eval(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        Ok(match self.fall_at(t) {
            Some(k) => self.falls[k].height_at(t),
            None => 0.0,
        })
    }

    /// Left limit f(t-); equals f(0) at 0.
    pub fn eval_left(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        let k = self.falls.partition_point(|f| f.t < t);
        if k == 0 {
            return self.eval(0.0);
        }
        Ok(self.falls[k - 1].height_at(t))
    }

    /// Infimum of f over `[t1, t2]` (either order).
    pub fn inf_between(&self, t1: f64, t2: f64) -> Result<f64> {
        let (a, b) = (self.check_time(t1.min(t2))?, self.check_time(t1.max(t2))?);
        let mut m = self.eval(a)?.min(self.eval(b)?).min(self.eval_left(b)?);
        // Local minima sit at the ends of falls, just before the next jump.
        let lo = self.falls.partition_point(|f| f.end_t() <= a);
        for f in &self.falls[lo..] {
            if f.t >= b {
                break;
            }
            if f.end_t() <= b {
                m = m.min(f.end_h());
            }
        }
        Ok(m)
    }

    /// The pseudo-distance d_f(t1, t2) = f(t1) + f(t2) - 2 inf f.
    pub fn d_f(&self, t1: f64, t2: f64) -> Result<f64> {
        let m = self.inf_between(t1, t2)?;
        Ok(self.eval(t1)? - m + (self.eval(t2)? - m))
    }

    /// The path restricted to `[from, m]`, starting at f(from).
    pub fn suffix(&self, from: f64) -> Result<PljPath> {
        let from = self.check_time(from)?;
        let Some(k) = self.fall_at(from) else {
            return Ok(PljPath {
                start: 0.0,
                prims: Vec::new(),
            });
        };
        let f = self.falls[k];
        let h = f.height_at(from);
        let mut prims = Vec::with_capacity(self.prims.len() - f.index);
        if h > f.end_h() {
            prims.push(Prim::Fall {
                drop: h - f.end_h(),
                speed: f.speed,
            });
        }
        prims.extend_from_slice(&self.prims[f.index + 1..]);
        Ok(PljPath { start: h, prims })
    }

    /// Number of jumps whose span `[bottom, top)` contains `h`.
    pub fn upcrossings(&self, h: f64) -> usize {
        let mut level = 0.0;
        let mut count = 0;
        for p in &self.prims {
            if let Prim::Jump(s) = *p {
                if level <= h && h < level + s {
                    count += 1;
                }
            }
            level += p.delta();
        }
        count
    }

    /// Jump times with the heights just before and after.
    pub fn jumps(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        let (mut t, mut h) = (0.0, 0.0);
        for p in &self.prims {
            if let Prim::Jump(s) = *p {
                out.push((t, h, h + s));
            }
            t += p.duration();
            h += p.delta();
        }
        out
    }
}

/// Canonical form of a primitive list; errors if it is not a contour.
pub fn canonicalize(prims: Vec<Prim>) -> Result<PljContour> {
    PljContour::new(prims)
}

impl fmt::Display for PljContour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, p) in self.prims.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn j(s: f64) -> Prim {
        Prim::Jump(s)
    }

    pub fn f(d: f64) -> Prim {
        Prim::unit_fall(d)
    }

    pub fn t1c() -> PljContour {
        PljContour::new(vec![j(2.0), f(1.0), j(1.5), f(2.5)]).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let c = canonicalize(vec![j(2.0), f(1.0), j(1.5), f(1.5), f(1.0)]).unwrap();
        assert_eq!(c.prims(), &[j(2.0), f(1.0), j(1.5), f(2.5)]);
        let c = canonicalize(vec![j(3.0), f(3.0)]).unwrap();
        assert_eq!(c.prims(), &[j(3.0), f(3.0)]);
        assert!(canonicalize(vec![j(1.0), f(2.0)]).is_err());
        // Idempotent.
        let again = canonicalize(c.prims().to_vec()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn canonicalize_merges_and_drops() {
        let c = canonicalize(vec![j(1.0), j(1.0), f(0.0), Prim::Jump(0.0), f(2.0)]).unwrap();
        assert_eq!(c.prims(), &[j(2.0), f(2.0)]);
        // Different speeds are not merged.
        let c = canonicalize(vec![j(2.0), f(1.0), Prim::fall(2.0, 0.5)]).unwrap();
        assert_eq!(c.prims().len(), 3);
        assert_eq!(c.duration(), 3.0);
    }

    #[test]
    fn canonicalize_rejects() {
        assert!(canonicalize(vec![]).is_err());
        assert!(canonicalize(vec![f(1.0)]).is_err());
        assert!(canonicalize(vec![j(-1.0), f(1.0)]).is_err());
        assert!(canonicalize(vec![j(2.0), f(1.0)]).is_err());
        assert!(canonicalize(vec![j(1.0), f(1.0), j(1.0), f(1.0)]).is_err());
        assert!(canonicalize(vec![j(1.0), Prim::Fall { drop: 1.0, speed: 0.0 }]).is_err());
    }

    #[test]
    fn eval_examples() {
        let c = canonicalize(vec![j(3.0), f(3.0)]).unwrap();
        assert_eq!(c.eval(1.0).unwrap(), 2.0);
        let c = t1c();
        assert_eq!(c.eval(1.0).unwrap(), 2.5);
        assert_eq!(c.eval_left(1.0).unwrap(), 1.0);
        assert_eq!(c.eval(3.5).unwrap(), 0.0);
        assert_eq!(c.eval(0.0).unwrap(), 2.0);
        assert!(c.eval(3.6).is_err());
        assert!(c.eval(-1.0).is_err());
    }

    #[test]
    fn inf_and_d_f() {
        let c = t1c();
        assert_eq!(c.inf_between(0.5, 2.0).unwrap(), 1.0);
        assert_eq!(c.inf_between(1.0, 2.0).unwrap(), 1.5);
        assert_eq!(c.inf_between(0.0, 3.5).unwrap(), 0.0);
        // (root, 1.8) at t=0.2 and (child1, 2.0) at t=1.5.
        assert!((c.d_f(0.2, 1.5).unwrap() - 1.8).abs() < 1e-12);
    }

    #[test]
    fn suffix_and_upcrossings() {
        let c = t1c();
        let s = c.suffix(1.5).unwrap();
        assert_eq!(s.start, 2.0);
        assert_eq!(s.prims, vec![f(2.0)]);
        let s = c.suffix(1.0).unwrap();
        assert_eq!(s.start, 2.5);
        assert_eq!(c.suffix(3.5).unwrap().prims, vec![]);
        assert_eq!(c.upcrossings(1.2), 2);
        assert_eq!(c.upcrossings(2.4), 1);
        assert_eq!(c.upcrossings(5.0), 0);
        assert_eq!(c.upcrossings(0.0), 1);
    }
}
