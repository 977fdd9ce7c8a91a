//! Reflected and killed Lévy processes, three ways: concatenated time-changed
//! copies, direct reflection, and reassembly from a Poisson point process of
//! excursions.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::path::{kill_at_zero, reflect_below, sample_path, time_change};
use super::{LevyParams, SampledPath};
use crate::contour::{self, Decomposition, Excursion, PljContour, PrimBuilder};
use crate::error::{Error, Result};
use crate::grid::quantize;

/// Copies allowed before giving up.
pub const MAX_COPIES: usize = 10_000_000;
/// Events allowed in one path before giving up.
pub const MAX_EVENTS: usize = 10_000_000;

fn exact_only(p: &LevyParams) -> Result<()> {
    p.validate()?;
    if p.beta > 0.0 {
        return Err(Error::Params("the exact constructions need beta = 0".into()));
    }
    Ok(())
}

fn check_levels(x: f64, r: f64) -> Result<()> {
    if !(x > 0.0 && x <= r) {
        return Err(Error::Params(format!("need 0 < x <= r, got x={x}, r={r}")));
    }
    Ok(())
}

/// A path of the process from `x`, reflected below `r` and killed at 0,
/// together with the number of Lévy copies consumed.
///
/// Copy `n` runs until it reaches 0, is killed, or leaves above `r` for
/// good; the portions above `r` are removed by the time change. Leaving for
/// good is decided at each upward crossing: from `r + y` a spectrally
/// positive process ever returns to `r` with probability `exp(-b y)`, `b`
/// the largest root of Ψ, and by the strong Markov property the returned
/// copy continues from `r` like a fresh one.
pub fn simulate_qxr_counted<R: Rng + ?Sized>(
    p: &LevyParams,
    x: f64,
    r: f64,
    rng: &mut R,
) -> Result<(SampledPath, usize)> {
    exact_only(p)?;
    check_levels(x, r)?;
    let (x, r) = (quantize(x), quantize(r));
    let b = p.largest_root()?;
    let speed = 1.0 / p.drift;
    let gap = (p.jump_rate > 0.0).then(|| Exp::new(p.jump_rate).unwrap());
    let kill = (p.kappa > 0.0).then(|| Exp::new(p.kappa).unwrap());
    let mut out = PrimBuilder::new();
    let mut h = x;
    let mut copies = 1;
    let mut events = 0;
    loop {
        let to_zero = h / p.drift;
        let g = gap.map_or(f64::INFINITY, |d| d.sample(rng));
        let k = kill.map_or(f64::INFINITY, |d| d.sample(rng));
        let dt = g.min(k);
        let drop = if dt >= to_zero {
            h
        } else {
            quantize(p.drift * dt).min(h)
        };
        out.fall(drop, speed);
        h -= drop;
        if h == 0.0 {
            break;
        }
        if k < g {
            copies += 1;
            out.jump(r - h);
            h = r;
        } else {
            let y = quantize(p.jump_law.sample(rng));
            if h + y <= r {
                out.jump(y);
                h += y;
            } else {
                let over = h + y - r;
                out.jump(r - h);
                h = r;
                if rng.random::<f64>() >= (-b * over).exp() {
                    copies += 1;
                }
            }
        }
        events += 1;
        if copies > MAX_COPIES || events > MAX_EVENTS {
            return Err(Error::Simulation(format!(
                "gave up after {copies} copies and {events} events"
            )));
        }
    }
    let path = SampledPath::exact(x, out.finish(), None);
    let hit = path.horizon;
    Ok((
        SampledPath {
            killed_at: Some(hit),
            ..path
        },
        copies,
    ))
}

pub fn simulate_qxr<R: Rng + ?Sized>(p: &LevyParams, x: f64, r: f64, rng: &mut R) -> Result<SampledPath> {
    simulate_qxr_counted(p, x, r, rng).map(|(path, _)| path)
}

/// The same law by brute force: sample the free process in chunks, reflect
/// below `r`, kill at 0, and restart from `r` after a killing-clock event.
pub fn simulate_reflected_direct<R: Rng + ?Sized>(p: &LevyParams, x: f64, r: f64, rng: &mut R) -> Result<SampledPath> {
    exact_only(p)?;
    check_levels(x, r)?;
    let (x, r) = (quantize(x), quantize(r));
    let chunk = (4.0 * r / p.drift).max(1.0);
    let mut out = PrimBuilder::new();
    let mut h = x;
    let mut events = 0;
    loop {
        let free = sample_path(p, h, chunk, rng)?;
        let clock_killed = free.killed_at.is_some();
        let piece = kill_at_zero(&reflect_below(&free, r)?);
        let prims = piece.prims().expect("exact sampler");
        events += prims.len();
        out.extend(prims.iter().copied());
        h = prims.iter().fold(h, |acc, q| acc + q.delta());
        let hit_zero = piece.killed_at.is_some() && h == 0.0;
        if hit_zero {
            break;
        }
        if clock_killed {
            out.jump(r - h);
            h = r;
        }
        if events > MAX_EVENTS {
            return Err(Error::Simulation(format!("gave up after {events} events")));
        }
    }
    let path = SampledPath::exact(x, out.finish(), None);
    let hit = path.horizon;
    Ok(SampledPath {
        killed_at: Some(hit),
        ..path
    })
}

/// One excursion of the free process above its minimum: a jump from 0 and
/// the path until it returns to 0.
fn free_excursion<R: Rng + ?Sized>(p: &LevyParams, rng: &mut R) -> Result<PljContour> {
    let speed = 1.0 / p.drift;
    let gap = Exp::new(p.jump_rate).unwrap();
    let mut b = PrimBuilder::new();
    let mut h = 0.0;
    while h == 0.0 {
        h = quantize(p.jump_law.sample(rng));
    }
    b.jump(h);
    let mut events = 0;
    loop {
        let g = gap.sample(rng);
        let drop = if g >= h / p.drift {
            h
        } else {
            quantize(p.drift * g).min(h)
        };
        b.fall(drop, speed);
        h -= drop;
        if h == 0.0 {
            break;
        }
        let y = quantize(p.jump_law.sample(rng));
        b.jump(y);
        h += y;
        events += 1;
        if events > MAX_EVENTS {
            return Err(Error::Simulation("excursion did not end".into()));
        }
    }
    Ok(PljContour::from_canonical(b.finish()))
}

/// Reassembles a path from its running-minimum decomposition: the minimum
/// descends at speed `a` (time `a` per unit of depth) and each excursion is
/// inserted where the minimum reaches its level.
pub fn synthesize(d: &Decomposition, a: f64) -> Result<SampledPath> {
    let mut b = PrimBuilder::new();
    let mut h = d.start;
    let stair = |b: &mut PrimBuilder, drop: f64| -> Result<()> {
        if drop > 0.0 {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Params(format!("sojourn a = {a} cannot carry a staircase")));
            }
            b.fall(drop, a);
        }
        Ok(())
    };
    for ex in &d.excursions {
        if !(ex.level >= 0.0 && ex.level <= h) {
            return Err(Error::Params(format!(
                "overlapping placement: level {} after level {h}",
                ex.level
            )));
        }
        stair(&mut b, h - ex.level)?;
        b.extend(ex.path.prims().iter().copied());
        h = ex.level;
    }
    stair(&mut b, h)?;
    let path = SampledPath::exact(d.start, b.finish(), None);
    let hit = path.horizon;
    Ok(SampledPath {
        killed_at: Some(hit),
        ..path
    })
}

/// The reflected killed path from its Poisson point process of excursions:
/// excursions arrive at rate `jump_rate * a` per unit of depth, and the one
/// starting at depth `s` is time-changed below the relative level
/// `r - x + s`. Only for (sub)critical exponents without killing.
pub fn simulate_poissonian<R: Rng + ?Sized>(p: &LevyParams, x: f64, r: f64, rng: &mut R) -> Result<SampledPath> {
    exact_only(p)?;
    check_levels(x, r)?;
    if p.is_supercritical() {
        return Err(Error::Params(
            "the Poissonian construction needs a (sub)critical exponent".into(),
        ));
    }
    let (x, r) = (quantize(x), quantize(r));
    let a = p.sojourn();
    let mut excursions = Vec::new();
    if p.jump_rate > 0.0 {
        let arrivals = Exp::new(p.jump_rate * a).unwrap();
        let mut s = 0.0;
        loop {
            s += arrivals.sample(rng);
            let level = x - quantize(s);
            if level <= 0.0 {
                break;
            }
            let f = free_excursion(p, rng)?;
            excursions.push(Excursion {
                level,
                path: contour::time_change(&f, r - level)?,
            });
        }
    }
    synthesize(&Decomposition { start: x, excursions }, a)
}

/// A coupled family `r -> X^r` for `r <= r_max`: the top path and its time
/// changes, so `X^r = X^{r'} o C^{r', r}` holds path by path.
#[derive(Clone, Debug)]
pub struct DoublyIndexed {
    pub r_max: f64,
    pub top: SampledPath,
}

impl DoublyIndexed {
    pub fn sample<R: Rng + ?Sized>(p: &LevyParams, x: f64, r_max: f64, rng: &mut R) -> Result<Self> {
        Ok(DoublyIndexed {
            r_max: quantize(r_max),
            top: simulate_qxr(p, x, r_max, rng)?,
        })
    }

    pub fn at(&self, r: f64) -> Result<SampledPath> {
        if quantize(r) >= self.r_max {
            return Ok(self.top.clone());
        }
        time_change(&self.top, r)
    }
}

/// Marginal at time `t`, the cemetery encoded as -1.
pub fn marginal(path: &SampledPath, t: f64) -> f64 {
    path.eval(t).unwrap_or(-1.0)
}
