use super::{PljContour, PljPath, Prim, PrimBuilder};
use crate::error::{Error, Result};
use crate::grid::quantize;

/// Excises every stretch strictly above `r`: jumps crossing `r` are clipped
/// to land on it and the path resumes when it comes back down to `r`.
pub fn time_change(c: &PljContour, r: f64) -> Result<PljContour> {
    if !(r > 0.0) {
        return Err(Error::out_of_range("r", r, "r > 0"));
    }
    let r = quantize(r);
    if r >= c.max_height() {
        return Ok(c.clone());
    }
    Ok(PljContour::from_canonical(clip_prims(0.0, c.prims(), r)))
}

/// Same excision on a path starting at or below `r`.
pub(crate) fn time_change_path(p: &PljPath, r: f64) -> PljPath {
    PljPath {
        start: p.start,
        prims: clip_prims(p.start, &p.prims, r),
    }
}

fn clip_prims(start: f64, prims: &[Prim], r: f64) -> Vec<Prim> {
    let mut b = PrimBuilder::new();
    let mut h = start;
    let mut above = false;
    for p in prims {
        match *p {
            Prim::Jump(s) => {
                if !above && h + s > r {
                    b.jump(r - h);
                    above = true;
                } else if !above {
                    b.jump(s);
                }
                h += s;
            }
            Prim::Fall { drop, speed } => {
                let end = h - drop;
                if above {
                    if end <= r {
                        b.fall(r - end, speed);
                        above = false;
                    }
                } else {
                    b.fall(drop, speed);
                }
                h = end;
            }
        }
    }
    b.finish()
}
