use super::{PljContour, PljPath, Prim};
use crate::error::Result;

/// A stretch of the path strictly above its running minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct Excursion {
    /// Running-minimum level the excursion starts from.
    pub level: f64,
    /// The excursion relative to `level`: a contour from 0 back to 0.
    pub path: PljContour,
}

impl Excursion {
    /// Lifetime of the excursion.
    pub fn length(&self) -> f64 {
        self.path.duration()
    }
}

/// A path from `start` split into its running-minimum staircase and the
/// excursions above it, by decreasing level.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub start: f64,
    pub excursions: Vec<Excursion>,
}

/// Decomposes f on `[from, m]`.
pub fn excursions_above_min(c: &PljContour, from: f64) -> Result<Decomposition> {
    Ok(decompose_path(&c.suffix(from)?))
}

pub(crate) fn decompose_path(p: &PljPath) -> Decomposition {
    let mut excursions = Vec::new();
    let mut h = p.start;
    let mut min = p.start;
    let mut current: Option<Vec<Prim>> = None;
    for prim in &p.prims {
        match *prim {
            Prim::Jump(s) => {
                current.get_or_insert_with(Vec::new).push(Prim::Jump(s));
                h += s;
            }
            Prim::Fall { drop, speed } => {
                let end = h - drop;
                match current.take() {
                    None => min = end,
                    Some(mut ex) => {
                        if end > min {
                            ex.push(Prim::Fall { drop, speed });
                            current = Some(ex);
                        } else {
                            ex.push(Prim::Fall { drop: h - min, speed });
                            excursions.push(Excursion {
                                level: min,
                                path: PljContour::from_canonical(ex),
                            });
                            min = end;
                        }
                    }
                }
                h = end;
            }
        }
    }
    // A path ending above its minimum leaves an unfinished excursion; for
    // contours this cannot happen since they end at 0.
    debug_assert!(current.is_none());
    Decomposition {
        start: p.start,
        excursions,
    }
}
