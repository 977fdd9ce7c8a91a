use super::{ChronoTree, Individual, IndividualId, PointRef};
use crate::error::{Error, Result};
use crate::grid::{quantize, EPS};

impl ChronoTree {
    /// Restriction to points at height at most `r`.
    ///
    /// A surviving birth within `EPS` below `r` would become a tie with the
    /// clipped parent's death, so such levels are rejected.
    pub fn truncate(&self, r: f64) -> Result<ChronoTree> {
        if !(r > 0.0) {
            return Err(Error::out_of_range("r", r, "r > 0"));
        }
        let r = quantize(r);
        if r >= self.height() {
            return Ok(self.clone());
        }
        let mut kept = Vec::with_capacity(self.len());
        for ind in &self.inds {
            if ind.birth > r {
                continue;
            }
            if r - ind.birth <= EPS {
                return Err(Error::Ambiguous(format!(
                    "level {r} is within tolerance of the birth of individual {}",
                    ind.id
                )));
            }
            kept.push(Individual {
                death: ind.death.min(r),
                ..ind.clone()
            });
        }
        Ok(ChronoTree::build(kept))
    }

    /// The part of the tree explored at or after `p`, rooted at the root.
    ///
    /// The ancestral line of `p` becomes a single root segment, so it must
    /// carry one speed.
    pub fn subtree_right(&self, p: PointRef) -> Result<ChronoTree> {
        let l = self.loc(p)?;
        if l.h <= 0.0 {
            return Err(Error::Degenerate("the root point has no right subtree".into()));
        }
        let speed = self.inds[l.idx].speed;
        let root_id = self.inds[0].id;
        let mut out = vec![Individual {
            id: root_id,
            parent: None,
            birth: 0.0,
            death: l.h,
            speed,
        }];
        let (mut i, mut h) = (l.idx, l.h);
        loop {
            if self.inds[i].speed != speed {
                return Err(Error::Degenerate("speed varies along the ancestral line".into()));
            }
            for &c in &self.children[i] {
                if self.inds[c].birth < h {
                    self.copy_clade(c, Some(root_id), 0.0, &mut out);
                }
            }
            match self.parent[i] {
                Some(p) => {
                    h = self.inds[i].birth;
                    i = p;
                }
                None => break,
            }
        }
        Ok(ChronoTree::build(out))
    }

    /// The descendants of `p`, re-rooted at `p`.
    ///
    /// A child's birth point addressed on the child, `(c, birth_c)`, selects
    /// the clade of `c`. A branch point addressed on the parent carries two
    /// branches and is rejected, since a tree here has a single root segment.
    pub fn subtree_rooted(&self, p: PointRef) -> Result<ChronoTree> {
        let l = self.loc_raw(p)?;
        let ind = &self.inds[l.idx];
        if l.h >= ind.death {
            return Err(Error::Degenerate(format!("{p} is a leaf")));
        }
        if (l.h > ind.birth || self.parent[l.idx].is_none())
            && self.children[l.idx].iter().any(|&c| self.inds[c].birth == l.h)
        {
            return Err(Error::Degenerate(format!(
                "{p} is a branch point; address one of its branches"
            )));
        }
        let mut out = vec![Individual {
            id: ind.id,
            parent: None,
            birth: 0.0,
            death: ind.death - l.h,
            speed: ind.speed,
        }];
        for &c in &self.children[l.idx] {
            if self.inds[c].birth > l.h {
                self.copy_clade(c, Some(ind.id), l.h, &mut out);
            }
        }
        Ok(ChronoTree::build(out))
    }

    /// The clade of individual `id`, re-rooted at its birth.
    pub fn clade(&self, id: IndividualId) -> Result<ChronoTree> {
        let ind = self
            .individual(id)
            .ok_or_else(|| Error::InvalidPoint(format!("no individual {id}")))?;
        self.subtree_rooted(PointRef::new(id, ind.birth))
    }

    pub(crate) fn clade_at(&self, idx: usize) -> ChronoTree {
        let b = self.inds[idx].birth;
        let mut out = Vec::new();
        self.copy_clade(idx, None, b, &mut out);
        ChronoTree::build(out)
    }

    /// Appends `idx` and its descendants, heights shifted down by `shift`.
    fn copy_clade(&self, idx: usize, parent: Option<IndividualId>, shift: f64, out: &mut Vec<Individual>) {
        let mut stack = vec![(idx, parent)];
        while let Some((k, par)) = stack.pop() {
            let ind = &self.inds[k];
            out.push(Individual {
                id: ind.id,
                parent: par,
                birth: ind.birth - shift,
                death: ind.death - shift,
                speed: ind.speed,
            });
            for &c in &self.children[k] {
                stack.push((c, Some(ind.id)));
            }
        }
    }

    pub(crate) fn parent_idx(&self, idx: usize) -> Option<usize> {
        self.parent[idx]
    }

    pub(crate) fn children_idx(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    pub(crate) fn ind(&self, idx: usize) -> &Individual {
        &self.inds[idx]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t1() -> ChronoTree {
        ChronoTree::new(vec![Individual::root(0, 2.0), Individual::new(1, Some(0), 1.0, 2.5)]).unwrap()
    }

    fn tree(v: Vec<Individual>) -> ChronoTree {
        ChronoTree::new(v).unwrap()
    }

    #[test]
    fn truncate_examples() {
        let t = t1();
        assert_eq!(
            t.truncate(1.5).unwrap(),
            tree(vec![Individual::root(0, 1.5), Individual::new(1, Some(0), 1.0, 1.5)])
        );
        assert_eq!(t.truncate(10.0).unwrap(), t);
        assert_eq!(t.truncate(0.8).unwrap(), tree(vec![Individual::root(0, 0.8)]));
        assert!(t.truncate(0.0).is_err());
        assert!(t.truncate(-1.0).is_err());
        assert!(matches!(t.truncate(1.0), Err(Error::Ambiguous(_))));
    }

    #[test]
    fn truncation_tower() {
        let t = t1();
        for (r1, r2) in [(0.5, 1.5), (1.2, 2.2), (1.5, 10.0)] {
            let twice = t.truncate(r2).unwrap().truncate(r1).unwrap();
            assert_eq!(twice.canonical_string(), t.truncate(r1).unwrap().canonical_string());
        }
    }

    #[test]
    fn subtree_right_examples() {
        let t = t1();
        // The ancestral line of (child1, 2.0) collapses to one root segment.
        assert_eq!(
            t.subtree_right(PointRef::new(1, 2.0)).unwrap(),
            tree(vec![Individual::root(0, 2.0)])
        );
        assert_eq!(t.subtree_right(PointRef::new(0, 2.0)).unwrap(), t);
        assert!(matches!(
            t.subtree_right(PointRef::new(0, 0.0)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn subtree_right_keeps_later_siblings() {
        let t = tree(vec![
            Individual::root(0, 2.0),
            Individual::new(1, Some(0), 1.0, 2.5),
            Individual::new(2, Some(0), 0.5, 0.9),
        ]);
        let r = t.subtree_right(PointRef::new(1, 2.0)).unwrap();
        assert_eq!(
            r,
            tree(vec![Individual::root(0, 2.0), Individual::new(2, Some(0), 0.5, 0.9)])
        );
    }

    #[test]
    fn subtree_rooted_examples() {
        let t = t1();
        assert_eq!(t.subtree_rooted(PointRef::new(0, 0.0)).unwrap(), t);
        assert_eq!(
            t.subtree_rooted(PointRef::new(1, 1.0)).unwrap(),
            tree(vec![Individual::root(1, 1.5)])
        );
        assert_eq!(
            t.subtree_rooted(PointRef::new(0, 0.5)).unwrap(),
            tree(vec![Individual::root(0, 1.5), Individual::new(1, Some(0), 0.5, 2.0)])
        );
        assert!(matches!(
            t.subtree_rooted(PointRef::new(0, 1.0)),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            t.subtree_rooted(PointRef::new(1, 2.5)),
            Err(Error::Degenerate(_))
        ));
        assert_eq!(t.clade(1).unwrap(), tree(vec![Individual::root(1, 1.5)]));
    }
}
