use crate::contour::{decode, excursions_above_min, time_change, PljContour};
use crate::error::{Error, Result};
use crate::grid::EPS;
use crate::tree::ChronoTree;

/// The right subtrees hanging off the ancestral line of the point explored
/// at time `t`, each tagged with the height at which it attaches.
#[derive(Clone, Debug)]
pub struct XiMeasure {
    /// By increasing depth.
    pub atoms: Vec<(f64, ChronoTree)>,
}

impl XiMeasure {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn depths(&self) -> Vec<f64> {
        self.atoms.iter().map(|(d, _)| *d).collect()
    }

    /// Multiset key: sorted (depth, canonical serialization) pairs.
    pub fn key(&self) -> Vec<(f64, String)> {
        let mut k: Vec<(f64, String)> = self.atoms.iter().map(|(d, t)| (*d, t.canonical_string())).collect();
        k.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        k
    }
}

impl PartialEq for XiMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

fn truncated(tree: &ChronoTree, r: f64) -> Result<ChronoTree> {
    if r == f64::INFINITY {
        Ok(tree.clone())
    } else {
        tree.truncate(r)
    }
}

/// Ξ read off the tree: walk down from φ(t) and collect, on each segment of
/// the ancestral line, the clades born strictly below the line's point.
pub fn xi_extract(tree: &ChronoTree, t: f64, r: f64) -> Result<XiMeasure> {
    let tree = truncated(tree, r)?;
    let m = tree.total_measure();
    if !(t >= 0.0 && t <= m + EPS) {
        return Err(Error::out_of_range("t", t, format!("[0, {m}]")));
    }
    let l = tree.explore_loc(t)?;
    let mut atoms = Vec::new();
    let (mut i, mut h) = (l.idx, l.h);
    loop {
        for &c in tree.children_idx(i) {
            let b = tree.ind(c).birth;
            if b < h {
                atoms.push((b, tree.clade_at(c)));
            }
        }
        match tree.parent_idx(i) {
            Some(p) => {
                h = tree.ind(i).birth;
                i = p;
            }
            None => break,
        }
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(XiMeasure { atoms })
}

/// Ξ read off the contour: the excursions of the truncated contour above its
/// running minimum after `t`, decoded one by one.
pub fn xi_from_contour(c: &PljContour, t: f64, r: f64) -> Result<XiMeasure> {
    let c = if r == f64::INFINITY {
        c.clone()
    } else {
        time_change(c, r)?
    };
    let m = c.duration();
    if !(t >= 0.0 && t <= m + EPS) {
        return Err(Error::out_of_range("t", t, format!("[0, {m}]")));
    }
    // A canonical contour has no flat stretches, so the class of t is {t}.
    let d = excursions_above_min(&c, t.min(m))?;
    let mut atoms = d
        .excursions
        .iter()
        .map(|ex| Ok((ex.level, decode(&ex.path)?)))
        .collect::<Result<Vec<_>>>()?;
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(XiMeasure { atoms })
}
