use super::{PljContour, Prim, PrimBuilder};
use crate::error::{Error, Result};
use crate::grid::EPS;
use crate::tree::{ChronoTree, Individual};

/// Contour of a tree: f(t) is the height of the point explored at time t.
pub fn encode(tree: &ChronoTree) -> PljContour {
    let mut b = PrimBuilder::new();
    let root = tree.ind(0);
    b.jump(root.death - root.birth);
    // (individual, next child position, current height)
    let mut stack: Vec<(usize, usize, f64)> = vec![(0, 0, root.death)];
    while let Some(top) = stack.last_mut() {
        let (i, next, h) = *top;
        let ind = tree.ind(i);
        match tree.children_idx(i).get(next) {
            Some(&c) => {
                let child = tree.ind(c);
                b.fall(h - child.birth, ind.speed);
                b.jump(child.death - child.birth);
                top.1 += 1;
                top.2 = child.birth;
                stack.push((c, 0, child.death));
            }
            None => {
                b.fall(h - ind.birth, ind.speed);
                stack.pop();
            }
        }
    }
    PljContour::from_canonical(b.finish())
}

struct Open {
    id: usize,
    birth: f64,
    speed: Option<f64>,
    /// Birth of the child explored most recently, for tie detection.
    last_child_birth: Option<f64>,
}

/// Tree coded by a contour: each jump is an individual, attached to the
/// segment being descended when the jump occurs.
pub fn decode(c: &PljContour) -> Result<ChronoTree> {
    let mut inds: Vec<Individual> = Vec::with_capacity(c.jump_count());
    let mut stack: Vec<Open> = Vec::new();
    let mut h = 0.0;
    for p in c.prims() {
        match *p {
            Prim::Jump(size) => {
                let id = inds.len();
                let parent = match stack.last() {
                    None if id == 0 => None,
                    None => return Err(Error::InvalidContour("jump from 0 after the start".into())),
                    Some(top) => {
                        let tie = h - top.birth <= EPS
                            || top.last_child_birth.is_some_and(|b| b - h <= EPS)
                            || inds[top.id].death - h <= EPS;
                        if tie {
                            return Err(Error::Ambiguous(format!(
                                "jump at height {h} ties with a neighbouring birth or death"
                            )));
                        }
                        Some(top.id as u64)
                    }
                };
                if let Some(top) = stack.last_mut() {
                    top.last_child_birth = Some(h);
                }
                inds.push(Individual {
                    id: id as u64,
                    parent,
                    birth: h,
                    death: h + size,
                    speed: 1.0,
                });
                stack.push(Open {
                    id,
                    birth: h,
                    speed: None,
                    last_child_birth: None,
                });
                h += size;
            }
            Prim::Fall { drop, speed } => {
                let target = h - drop;
                loop {
                    let top = stack
                        .last_mut()
                        .ok_or_else(|| Error::InvalidContour("fall below the root".into()))?;
                    match top.speed {
                        None => top.speed = Some(speed),
                        Some(s) if s != speed => {
                            return Err(Error::InvalidContour(format!(
                                "speed changes within individual {}",
                                top.id
                            )))
                        }
                        _ => {}
                    }
                    if target > top.birth {
                        break;
                    }
                    let done = stack.pop().unwrap();
                    inds[done.id].speed = speed;
                    if target == done.birth {
                        if let Some(parent) = stack.last_mut() {
                            parent.last_child_birth = Some(done.birth);
                        }
                        break;
                    }
                }
                if let Some(top) = stack.last() {
                    inds[top.id].speed = speed;
                }
                h = target;
            }
        }
    }
    if !stack.is_empty() || h != 0.0 {
        return Err(Error::InvalidContour("contour does not end at 0".into()));
    }
    Ok(ChronoTree::build(inds))
}
