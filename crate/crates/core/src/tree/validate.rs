use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{Individual, IndividualId};
use crate::grid::{EPS, MAX_HEIGHT};

/// Which invariant a violation breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    DuplicateId,
    NonFinite,
    NonPositiveSpeed,
    ZeroLifetime,
    DanglingParent,
    NoRoot,
    MultipleRoots,
    Unreachable,
    BirthOutsideParent,
    TiedBirths,
    TooHigh,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::DuplicateId => "duplicate id",
            Rule::NonFinite => "non-finite value",
            Rule::NonPositiveSpeed => "non-positive speed",
            Rule::ZeroLifetime => "zero lifetime",
            Rule::DanglingParent => "dangling parent",
            Rule::NoRoot => "no root",
            Rule::MultipleRoots => "multiple roots",
            Rule::Unreachable => "not reachable from the root",
            Rule::BirthOutsideParent => "birth outside parent's segment",
            Rule::TiedBirths => "tied birth heights",
            Rule::TooHigh => "height beyond supported range",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub individual: Option<IndividualId>,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.individual {
            Some(id) => write!(f, "individual {id}: {}", self.rule),
            None => write!(f, "{}", self.rule),
        }
    }
}

/// Lists every broken invariant; empty iff the individuals form a valid tree.
pub fn validate(individuals: &[Individual]) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |id: Option<IndividualId>, rule| out.push(Violation { individual: id, rule });

    let mut by_id: HashMap<IndividualId, &Individual> = HashMap::new();
    for ind in individuals {
        if by_id.insert(ind.id, ind).is_some() {
            push(Some(ind.id), Rule::DuplicateId);
        }
    }

    let roots: Vec<&Individual> = individuals.iter().filter(|i| i.parent.is_none()).collect();
    match roots.len() {
        0 => push(None, Rule::NoRoot),
        1 => {}
        _ => {
            for r in &roots[1..] {
                push(Some(r.id), Rule::MultipleRoots);
            }
        }
    }
    let base = roots.first().map(|r| r.birth).unwrap_or(0.0);

    let mut children: HashMap<IndividualId, Vec<&Individual>> = HashMap::new();
    for ind in individuals {
        let id = Some(ind.id);
        if !(ind.birth.is_finite() && ind.death.is_finite() && ind.speed.is_finite()) {
            push(id, Rule::NonFinite);
            continue;
        }
        if ind.speed <= 0.0 {
            push(id, Rule::NonPositiveSpeed);
        }
        if ind.death <= ind.birth {
            push(id, Rule::ZeroLifetime);
        }
        if ind.death - base > MAX_HEIGHT {
            push(id, Rule::TooHigh);
        }
        if let Some(pid) = ind.parent {
            match by_id.get(&pid) {
                None => push(id, Rule::DanglingParent),
                Some(parent) => {
                    if pid == ind.id || ind.birth <= parent.birth || ind.birth > parent.death {
                        push(id, Rule::BirthOutsideParent);
                    } else if ind.birth - parent.birth <= EPS || parent.death - ind.birth <= EPS {
                        push(id, Rule::TiedBirths);
                    }
                    children.entry(pid).or_default().push(ind);
                }
            }
        }
    }

    for kids in children.values_mut() {
        kids.sort_by(|a, b| a.birth.total_cmp(&b.birth));
        for pair in kids.windows(2) {
            if pair[1].birth - pair[0].birth <= EPS {
                push(Some(pair[1].id), Rule::TiedBirths);
            }
        }
    }

    // Reachability also rules out cycles.
    if let [root] = roots.as_slice() {
        let mut seen: HashSet<IndividualId> = HashSet::new();
        let mut stack = vec![root.id];
        seen.insert(root.id);
        while let Some(id) = stack.pop() {
            for c in children.get(&id).into_iter().flatten() {
                if seen.insert(c.id) {
                    stack.push(c.id);
                }
            }
        }
        for ind in individuals {
            if !seen.contains(&ind.id) && ind.parent.is_some_and(|p| by_id.contains_key(&p)) {
                push(Some(ind.id), Rule::Unreachable);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t1() -> Vec<Individual> {
        vec![Individual::root(0, 2.0), Individual::new(1, Some(0), 1.0, 2.5)]
    }

    fn rules(v: &[Violation]) -> Vec<Rule> {
        v.iter().map(|v| v.rule).collect()
    }

    #[test]
    fn well_formed_tree_has_no_violations() {
        assert!(validate(&t1()).is_empty());
    }

    #[test]
    fn zero_lifetime() {
        let v = validate(&[Individual::root(0, 0.0)]);
        assert_eq!(rules(&v), vec![Rule::ZeroLifetime]);
        assert_eq!(v[0].to_string(), "individual 0: zero lifetime");
    }

    #[test]
    fn tied_sibling_births() {
        let inds = vec![
            Individual::root(0, 2.0),
            Individual::new(1, Some(0), 0.7, 1.0),
            Individual::new(2, Some(0), 0.7, 1.5),
        ];
        assert_eq!(rules(&validate(&inds)), vec![Rule::TiedBirths]);
    }

    #[test]
    fn births_at_parent_endpoints_are_ties() {
        let at_death = vec![Individual::root(0, 2.0), Individual::new(1, Some(0), 2.0, 3.0)];
        assert_eq!(rules(&validate(&at_death)), vec![Rule::TiedBirths]);
        let near_birth = vec![Individual::root(0, 2.0), Individual::new(1, Some(0), 1e-10, 3.0)];
        assert_eq!(rules(&validate(&near_birth)), vec![Rule::TiedBirths]);
        let at_birth = vec![Individual::root(0, 2.0), Individual::new(1, Some(0), 0.0, 3.0)];
        assert_eq!(rules(&validate(&at_birth)), vec![Rule::BirthOutsideParent]);
    }

    #[test]
    fn structural_errors() {
        let dangling = vec![Individual::root(0, 2.0), Individual::new(1, Some(7), 1.0, 2.5)];
        assert_eq!(rules(&validate(&dangling)), vec![Rule::DanglingParent]);

        let two_roots = vec![Individual::root(0, 2.0), Individual::root(1, 1.0)];
        assert_eq!(rules(&validate(&two_roots)), vec![Rule::MultipleRoots]);

        let dup = vec![Individual::root(0, 2.0), Individual::new(0, Some(0), 1.0, 2.5)];
        assert!(rules(&validate(&dup)).contains(&Rule::DuplicateId));

        assert_eq!(rules(&validate(&[])), vec![Rule::NoRoot]);

        let cycle = vec![
            Individual::root(0, 5.0),
            Individual::new(1, Some(2), 1.0, 2.0),
            Individual::new(2, Some(1), 1.5, 3.0),
        ];
        let r = rules(&validate(&cycle));
        assert!(r.contains(&Rule::Unreachable) || r.contains(&Rule::BirthOutsideParent));

        let slow = vec![Individual::root(0, 2.0).with_speed(0.0)];
        assert_eq!(rules(&validate(&slow)), vec![Rule::NonPositiveSpeed]);

        let nan = vec![Individual::root(0, f64::NAN)];
        assert_eq!(rules(&validate(&nan)), vec![Rule::NonFinite]);
    }
}
