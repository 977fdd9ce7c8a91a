use std::cmp::Ordering;

use super::{ChronoTree, Loc, PointRef};
use crate::error::{Error, Result};
use crate::grid::EPS;

impl ChronoTree {
    /// Climbs both points to their common individual. Returns the common
    /// index, the heights reached on it and whether each point started there.
    fn meet(&self, a: Loc, b: Loc) -> (usize, f64, f64, bool, bool) {
        let (mut i, mut hi, mut j, mut hj) = (a.idx, a.h, b.idx, b.h);
        let (mut on_i, mut on_j) = (true, true);
        while i != j {
            let (gi, gj) = (self.generation[i], self.generation[j]);
            if gi >= gj {
                hi = self.inds[i].birth;
                i = self.parent[i].expect("non-root has a parent");
                on_i = false;
            }
            if gj >= gi {
                hj = self.inds[j].birth;
                j = self.parent[j].expect("non-root has a parent");
                on_j = false;
            }
        }
        (i, hi, hj, on_i, on_j)
    }

    /// Most recent common ancestor.
    pub fn mrca(&self, p1: PointRef, p2: PointRef) -> Result<PointRef> {
        let (a, b) = (self.loc(p1)?, self.loc(p2)?);
        let (k, ha, hb, _, _) = self.meet(a, b);
        Ok(self.point(self.normalize_loc(Loc { idx: k, h: ha.min(hb) })))
    }

    /// Distance to the root, which is just the height.
    pub fn depth(&self, p: PointRef) -> Result<f64> {
        Ok(self.loc(p)?.h)
    }

    pub fn dist(&self, p1: PointRef, p2: PointRef) -> Result<f64> {
        let (a, b) = (self.loc(p1)?, self.loc(p2)?);
        let (_, ha, hb, _, _) = self.meet(a, b);
        let m = ha.min(hb);
        Ok((a.h - m) + (b.h - m))
    }

    /// Total order: `Less` means `p1` is explored first.
    pub fn order_cmp(&self, p1: PointRef, p2: PointRef) -> Result<Ordering> {
        let (a, b) = (self.loc(p1)?, self.loc(p2)?);
        Ok(self.order_loc(a, b))
    }

    pub(crate) fn order_loc(&self, a: Loc, b: Loc) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        let (_, ha, hb, on_a, _) = self.meet(a, b);
        if ha == hb {
            // One point sits on the common segment below the other's branch,
            // so it is an ancestor and comes later.
            return if on_a { Ordering::Greater } else { Ordering::Less };
        }
        // Higher on the common segment is reached first on the way down.
        hb.total_cmp(&ha)
    }

    /// Measure of the set of points explored no later than `p`.
    pub fn measure_left(&self, p: PointRef) -> Result<f64> {
        Ok(self.measure_left_loc(self.loc(p)?))
    }

    pub(crate) fn measure_left_loc(&self, l: Loc) -> f64 {
        let ind = &self.inds[l.idx];
        let kids = &self.children[l.idx];
        let n_above = kids.partition_point(|&c| self.inds[c].birth >= l.h);
        if n_above > 0 {
            let last = kids[n_above - 1];
            self.enter[last] + self.mass[last] + ind.speed * (self.inds[last].birth - l.h)
        } else {
            self.enter[l.idx] + ind.speed * (ind.death - l.h)
        }
    }

    /// Exploration process: the point reached after exploring mass `t`.
    pub fn explore(&self, t: f64) -> Result<PointRef> {
        Ok(self.point(self.explore_loc(t)?))
    }

    pub(crate) fn explore_loc(&self, t: f64) -> Result<Loc> {
        let m = self.total_measure();
        if !(t >= -EPS && t <= m + EPS) {
            return Err(Error::out_of_range("t", t, format!("[0, {m}]")));
        }
        let t = t.clamp(0.0, m);
        let mut i = 0;
        loop {
            let ind = &self.inds[i];
            let kids = &self.children[i];
            let n = kids.partition_point(|&c| self.enter[c] <= t);
            let h = if n > 0 {
                let c = kids[n - 1];
                if t < self.enter[c] + self.mass[c] {
                    i = c;
                    continue;
                }
                self.inds[c].birth - (t - self.enter[c] - self.mass[c]) / ind.speed
            } else {
                ind.death - (t - self.enter[i]) / ind.speed
            };
            return Ok(self.normalize_loc(Loc {
                idx: i,
                h: h.clamp(ind.birth, ind.death),
            }));
        }
    }

    /// Number of individuals with birth <= h < death.
    pub fn alive_count(&self, h: f64) -> usize {
        self.inds.iter().filter(|i| i.birth <= h && h < i.death).count()
    }

    /// Measure of the ancestral segment from the root to `p`.
    pub fn path_measure(&self, p: PointRef) -> Result<f64> {
        let l = self.loc(p)?;
        let mut total = 0.0;
        let (mut i, mut h) = (l.idx, l.h);
        loop {
            let ind = &self.inds[i];
            total += ind.speed * (h - ind.birth);
            match self.parent[i] {
                Some(p) => {
                    h = ind.birth;
                    i = p;
                }
                None => return Ok(total),
            }
        }
    }

    /// True when `anc` lies on the segment from the root to `p`.
    pub fn is_ancestor(&self, anc: PointRef, p: PointRef) -> Result<bool> {
        Ok(self.mrca(anc, p)? == self.normalize(anc)?)
    }
}
