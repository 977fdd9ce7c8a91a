use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contour::{encode, time_change, PljContour};
use crate::error::{Error, Result};
use crate::grid::EPS;
use crate::tree::{ChronoTree, Individual, PointRef};

/// Random points drawn by `sojourn_check` on top of the segment endpoints.
pub const SOJOURN_RANDOM_POINTS: usize = 1000;

/// Largest `|μ([ρ, σ]) - a d(ρ, σ)|` over every segment endpoint and
/// [`SOJOURN_RANDOM_POINTS`] points explored at uniform times.
pub fn sojourn_check(tree: &ChronoTree, a: f64, seed: u64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(Error::Params(format!("sojourn must be >= 0, got {a}")));
    }
    let dev = |p: PointRef| -> Result<f64> { Ok((tree.path_measure(p)? - a * tree.depth(p)?).abs()) };
    let mut worst: f64 = 0.0;
    for p in tree.segment_endpoints() {
        worst = worst.max(dev(p)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = tree.total_measure();
    for _ in 0..SOJOURN_RANDOM_POINTS {
        let p = tree.explore(rng.random::<f64>() * m)?;
        worst = worst.max(dev(p)?);
    }
    Ok(worst)
}

/// True when every attachment height hosts exactly one child: no two
/// siblings share a birth height and no child is born at an endpoint of its
/// parent. Works on raw individuals, before validation.
pub fn is_binary(individuals: &[Individual]) -> bool {
    use std::collections::HashMap;
    let by_id: HashMap<u64, &Individual> = individuals.iter().map(|i| (i.id, i)).collect();
    let mut births: HashMap<u64, Vec<f64>> = HashMap::new();
    for ind in individuals {
        if let Some(p) = ind.parent {
            let Some(parent) = by_id.get(&p) else { return false };
            if (ind.birth - parent.birth).abs() <= EPS || (ind.birth - parent.death).abs() <= EPS {
                return false;
            }
            births.entry(p).or_default().push(ind.birth);
        }
    }
    births.values_mut().all(|b| {
        b.sort_by(f64::total_cmp);
        b.windows(2).all(|w| w[1] - w[0] > EPS)
    })
}

/// Largest equivalence class among the contour's breakpoint visits, both
/// sides of every jump included: two visits are equivalent when they share a
/// value that is also the minimum between them.
pub fn max_class_size(c: &PljContour) -> usize {
    let visits = c.as_path().breakpoints().into_iter().map(|(_, x)| x);
    // Stack of (level, visits so far) along the current running minima.
    let mut stack: Vec<(f64, usize)> = Vec::new();
    let mut worst = 0;
    for v in visits {
        while stack.last().is_some_and(|&(l, _)| l > v) {
            stack.pop();
        }
        match stack.last_mut() {
            Some((l, n)) if *l == v => *n += 1,
            _ => stack.push((v, 1)),
        }
        worst = worst.max(stack.last().unwrap().1);
    }
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassReport {
    pub binary: bool,
    pub max_class: usize,
}

impl ClassReport {
    pub fn pass(&self) -> bool {
        self.binary && self.max_class <= 3
    }
}

/// Binarity of the tree and the class-size bound on its contour.
pub fn binary_and_class_check(tree: &ChronoTree) -> ClassReport {
    ClassReport {
        binary: is_binary(tree.individuals()),
        max_class: max_class_size(&encode(tree)),
    }
}

/// Contours of the truncations at ascending `levels`, with each consecutive
/// pair checked to be related by the time change.
pub fn consistent_family(tree: &ChronoTree, levels: &[f64]) -> Result<Vec<PljContour>> {
    if levels.is_empty() {
        return Err(Error::Params("no levels".into()));
    }
    if !(levels[0] > 0.0) || levels.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Params(format!(
            "levels must be positive and ascending: {levels:?}"
        )));
    }
    let family = levels
        .iter()
        .map(|&r| tree.truncate(r).map(|t| encode(&t)))
        .collect::<Result<Vec<_>>>()?;
    for (k, w) in family.windows(2).enumerate() {
        if time_change(&w[1], levels[k])? != w[0] {
            return Err(Error::InvalidContour(format!(
                "truncations at {} and {} are not related by the time change",
                levels[k],
                levels[k + 1]
            )));
        }
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t1() -> ChronoTree {
        ChronoTree::new(vec![Individual::root(0, 2.0), Individual::new(1, Some(0), 1.0, 2.5)]).unwrap()
    }

    fn t2() -> ChronoTree {
        ChronoTree::new(vec![
            Individual::root(0, 2.0),
            Individual::new(1, Some(0), 1.0, 2.5),
            Individual::new(2, Some(0), 0.5, 0.9),
        ])
        .unwrap()
    }

    #[test]
    fn sojourn_examples() {
        assert_eq!(sojourn_check(&t1(), 1.0, 0).unwrap(), 0.0);
        let fast = ChronoTree::new(vec![
            Individual::root(0, 2.0),
            Individual::new(1, Some(0), 1.0, 2.5).with_speed(2.0),
        ])
        .unwrap();
        assert_eq!(sojourn_check(&fast, 1.0, 0).unwrap(), 1.5);
        // a = 0 reports the largest path measure.
        assert_eq!(sojourn_check(&t1(), 0.0, 0).unwrap(), 2.5);
        assert!(sojourn_check(&t1(), -1.0, 0).is_err());
    }

    #[test]
    fn binarity() {
        let r = binary_and_class_check(&t2());
        assert!(r.pass(), "{r:?}");
        assert_eq!(r.max_class, 2);
        let tied = vec![
            Individual::root(0, 2.0),
            Individual::new(1, Some(0), 1.0, 2.5),
            Individual::new(2, Some(0), 1.0, 1.5),
        ];
        assert!(!is_binary(&tied));
        assert!(ChronoTree::new(tied).is_err());
    }

    #[test]
    fn classes_count_ties() {
        // Level 1 is left four times without going lower: a vertex of degree
        // five, which no binary tree produces.
        use crate::contour::Prim;
        let mut prims = vec![Prim::Jump(2.0), Prim::unit_fall(1.0)];
        for _ in 0..3 {
            prims.extend([Prim::Jump(1.0), Prim::unit_fall(1.0)]);
        }
        prims.extend([Prim::Jump(1.0), Prim::unit_fall(2.0)]);
        let c = PljContour::new(prims).unwrap();
        assert_eq!(max_class_size(&c), 4);
    }

    #[test]
    fn family_examples() {
        let fam = consistent_family(&t1(), &[1.5, 3.0]).unwrap();
        assert_eq!(fam.len(), 2);
        assert_eq!(time_change(&fam[1], 1.5).unwrap(), fam[0]);
        assert_eq!(consistent_family(&t1(), &[2.5]).unwrap(), vec![encode(&t1())]);
        assert!(consistent_family(&t1(), &[2.0, 1.0]).is_err());
        assert!(consistent_family(&t1(), &[]).is_err());
    }
}
