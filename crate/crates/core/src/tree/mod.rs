//! Finite chronological trees.
//!
//! A [`ChronoTree`] is a finite set of individuals, each a vertical segment
//! `[birth, death]` hanging off its parent at height `birth`. Distances are
//! heights along segments, the measure has density `speed` on each segment,
//! and the total order is the depth-first exploration that descends every
//! segment from its top and enters a child when reaching its birth height,
//! so later-born children are explored first.
//!
//! Individuals are stored in exploration order; the canonical labelling of a
//! tree is simply its storage index.

mod ops;
mod transform;
mod validate;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{quantize, EPS};

pub use validate::{validate, Rule, Violation};

pub type IndividualId = u64;

fn default_speed() -> f64 {
    1.0
}

/// One lifetime segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub id: IndividualId,
    pub parent: Option<IndividualId>,
    pub birth: f64,
    pub death: f64,
    #[serde(default = "default_speed")]
    pub speed: f64,
}

impl Individual {
    pub fn new(id: IndividualId, parent: Option<IndividualId>, birth: f64, death: f64) -> Self {
        Individual {
            id,
            parent,
            birth,
            death,
            speed: 1.0,
        }
    }

    pub fn root(id: IndividualId, lifetime: f64) -> Self {
        Individual::new(id, None, 0.0, lifetime)
    }

    pub fn with_speed(mut self, speed: f64) -> Self {
        self.speed = speed;
        self
    }

    pub fn lifetime(&self) -> f64 {
        self.death - self.birth
    }
}

/// An address on the tree: a height on one individual's segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointRef {
    pub individual: IndividualId,
    pub height: f64,
}

impl PointRef {
    pub fn new(individual: IndividualId, height: f64) -> Self {
        PointRef { individual, height }
    }
}

impl fmt::Display for PointRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.individual, self.height)
    }
}

/// A validated finite chronological tree.
#[derive(Clone, Debug)]
pub struct ChronoTree {
    inds: Vec<Individual>,
    parent: Vec<Option<usize>>,
    /// Children of each individual, by decreasing birth height.
    children: Vec<Vec<usize>>,
    /// Number of ancestors.
    generation: Vec<usize>,
    /// Exploration time at which the segment's top is reached.
    enter: Vec<f64>,
    /// Measure of the individual together with all its descendants.
    mass: Vec<f64>,
    by_id: HashMap<IndividualId, usize>,
}

/// Resolved point: storage index and height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Loc {
    pub idx: usize,
    pub h: f64,
}

impl ChronoTree {
    /// Validates and builds a tree. Heights are snapped to the grid and, if
    /// the root is not born at 0, every height is shifted so that it is.
    pub fn new(individuals: Vec<Individual>) -> Result<Self> {
        let violations = validate(&individuals);
        if !violations.is_empty() {
            return Err(Error::InvalidTree(violations));
        }
        let shift = individuals
            .iter()
            .find(|i| i.parent.is_none())
            .map(|r| r.birth)
            .unwrap_or(0.0);
        let mut inds = individuals;
        for ind in &mut inds {
            ind.birth = quantize(ind.birth - shift);
            ind.death = quantize(ind.death - shift);
        }
        // Quantization can only close gaps that were already within EPS of a
        // tie, but re-check rather than assume.
        let violations = validate(&inds);
        if !violations.is_empty() {
            return Err(Error::InvalidTree(violations));
        }
        Ok(Self::build(inds))
    }

    /// Builds from individuals known to be valid and on the grid.
    pub(crate) fn build(inds: Vec<Individual>) -> Self {
        let n = inds.len();
        let pos: HashMap<IndividualId, usize> = inds.iter().enumerate().map(|(k, i)| (i.id, k)).collect();
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut root = 0;
        for (k, ind) in inds.iter().enumerate() {
            match ind.parent {
                Some(p) => kids[pos[&p]].push(k),
                None => root = k,
            }
        }
        for list in &mut kids {
            list.sort_by(|&a, &b| inds[b].birth.total_cmp(&inds[a].birth));
        }

        // Exploration order: preorder, children by decreasing birth.
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(k) = stack.pop() {
            order.push(k);
            for &c in kids[k].iter().rev() {
                stack.push(c);
            }
        }
        let mut new_index = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let mut slots: Vec<Option<Individual>> = inds.into_iter().map(Some).collect();
        let inds: Vec<Individual> = order.iter().map(|&old| slots[old].take().unwrap()).collect();
        let children: Vec<Vec<usize>> = order
            .iter()
            .map(|&old| kids[old].iter().map(|&c| new_index[c]).collect())
            .collect();
        let by_id: HashMap<IndividualId, usize> = inds.iter().enumerate().map(|(k, i)| (i.id, k)).collect();
        let parent: Vec<Option<usize>> = inds.iter().map(|i| i.parent.map(|p| by_id[&p])).collect();

        let mut generation = vec![0usize; n];
        for k in 1..n {
            generation[k] = generation[parent[k].unwrap()] + 1;
        }

        // Preorder means every descendant has a larger index.
        let mut mass = vec![0.0; n];
        for k in (0..n).rev() {
            let own = inds[k].speed * (inds[k].death - inds[k].birth);
            mass[k] = own + children[k].iter().map(|&c| mass[c]).sum::<f64>();
        }
        let mut enter = vec![0.0; n];
        for k in 0..n {
            let mut cursor = enter[k];
            let mut h = inds[k].death;
            for &c in &children[k] {
                cursor += inds[k].speed * (h - inds[c].birth);
                enter[c] = cursor;
                cursor += mass[c];
                h = inds[c].birth;
            }
        }

        ChronoTree {
            inds,
            parent,
            children,
            generation,
            enter,
            mass,
            by_id,
        }
    }

    pub fn len(&self) -> usize {
        self.inds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inds.is_empty()
    }

    /// Individuals in exploration order.
    pub fn individuals(&self) -> &[Individual] {
        &self.inds
    }

    pub fn individual(&self, id: IndividualId) -> Option<&Individual> {
        self.by_id.get(&id).map(|&k| &self.inds[k])
    }

    pub fn root(&self) -> &Individual {
        &self.inds[0]
    }

    /// Total measure m = sum of speed * lifetime.
    pub fn total_measure(&self) -> f64 {
        self.mass[0]
    }

    /// Largest height reached.
    pub fn height(&self) -> f64 {
        self.inds.iter().map(|i| i.death).fold(0.0, f64::max)
    }

    /// Sum of lifetimes (the length measure, independent of speeds).
    pub fn total_length(&self) -> f64 {
        self.inds.iter().map(|i| i.lifetime()).sum()
    }

    /// Children of an individual, by decreasing birth height.
    pub fn children_of(&self, id: IndividualId) -> Vec<IndividualId> {
        match self.by_id.get(&id) {
            Some(&k) => self.children[k].iter().map(|&c| self.inds[c].id).collect(),
            None => Vec::new(),
        }
    }

    /// Same tree with ids replaced by exploration rank.
    pub fn canonical(&self) -> ChronoTree {
        let inds = self
            .inds
            .iter()
            .enumerate()
            .map(|(k, ind)| Individual {
                id: k as IndividualId,
                parent: self.parent[k].map(|p| p as IndividualId),
                ..ind.clone()
            })
            .collect();
        Self::build(inds)
    }

    /// Canonical JSONL text; two trees are isomorphic iff these agree.
    pub fn canonical_string(&self) -> String {
        crate::io::tree_to_jsonl(&self.canonical())
    }

    pub(crate) fn loc(&self, p: PointRef) -> Result<Loc> {
        let idx = *self
            .by_id
            .get(&p.individual)
            .ok_or_else(|| Error::InvalidPoint(format!("no individual {}", p.individual)))?;
        let ind = &self.inds[idx];
        if !p.height.is_finite() || p.height < ind.birth - EPS || p.height > ind.death + EPS {
            return Err(Error::InvalidPoint(format!(
                "height {} outside [{}, {}] of individual {}",
                p.height, ind.birth, ind.death, ind.id
            )));
        }
        Ok(self.normalize_loc(Loc {
            idx,
            h: p.height.clamp(ind.birth, ind.death),
        }))
    }

    /// Unnormalized resolution: keeps a child's birth point on the child.
    pub(crate) fn loc_raw(&self, p: PointRef) -> Result<Loc> {
        let idx = *self
            .by_id
            .get(&p.individual)
            .ok_or_else(|| Error::InvalidPoint(format!("no individual {}", p.individual)))?;
        let ind = &self.inds[idx];
        if !p.height.is_finite() || p.height < ind.birth - EPS || p.height > ind.death + EPS {
            return Err(Error::InvalidPoint(format!(
                "height {} outside [{}, {}] of individual {}",
                p.height, ind.birth, ind.death, ind.id
            )));
        }
        Ok(Loc {
            idx,
            h: p.height.clamp(ind.birth, ind.death),
        })
    }

    pub(crate) fn normalize_loc(&self, l: Loc) -> Loc {
        match self.parent[l.idx] {
            Some(p) if l.h <= self.inds[l.idx].birth => Loc {
                idx: p,
                h: self.inds[l.idx].birth,
            },
            _ => l,
        }
    }

    pub(crate) fn point(&self, l: Loc) -> PointRef {
        PointRef::new(self.inds[l.idx].id, l.h)
    }

    /// Canonical representative of a point: a child's birth point is
    /// reported on the parent.
    pub fn normalize(&self, p: PointRef) -> Result<PointRef> {
        self.loc(p).map(|l| self.point(l))
    }

    /// Every segment endpoint, normalized and deduplicated.
    pub fn segment_endpoints(&self) -> Vec<PointRef> {
        let mut out = Vec::with_capacity(2 * self.len());
        for (k, ind) in self.inds.iter().enumerate() {
            out.push(self.point(Loc { idx: k, h: ind.death }));
            if k == 0 {
                out.push(self.point(Loc { idx: 0, h: ind.birth }));
            }
        }
        out
    }
}

impl PartialEq for ChronoTree {
    /// Isomorphism: identical canonical serialization.
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self.inds.iter().zip(&other.inds).enumerate().all(|(k, (a, b))| {
                a.birth == b.birth && a.death == b.death && a.speed == b.speed && self.parent[k] == other.parent[k]
            })
    }
}
