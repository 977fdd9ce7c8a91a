use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::JumpLaw;
use crate::error::{Error, Result};
use crate::grid::{quantize, EPS};
use crate::tree::{ChronoTree, Individual};

/// Parameters of a splitting tree: births at constant rate along each
/// lifetime, i.i.d. lifetimes, optional truncation height.
#[derive(Clone, Debug, PartialEq)]
pub struct SplittingParams {
    pub birth_rate: f64,
    pub lifetime: JumpLaw,
    /// Root lifetime; drawn from `lifetime` when absent.
    pub root_lifetime: Option<f64>,
    pub truncation: Option<f64>,
    /// Law of i.i.d. per-individual speeds; unit speed when absent. Random
    /// speeds keep the splitting property but break constant sojourn.
    pub speed: Option<JumpLaw>,
    pub max_individuals: usize,
}

impl SplittingParams {
    pub fn new(birth_rate: f64, lifetime: JumpLaw) -> Self {
        SplittingParams {
            birth_rate,
            lifetime,
            root_lifetime: None,
            truncation: None,
            speed: None,
            max_individuals: 1_000_000,
        }
    }

    pub fn with_root_lifetime(mut self, l: f64) -> Self {
        self.root_lifetime = Some(l);
        self
    }

    pub fn with_truncation(mut self, r: f64) -> Self {
        self.truncation = Some(r);
        self
    }

    pub fn with_speeds(mut self, law: JumpLaw) -> Self {
        self.speed = Some(law);
        self
    }

    pub fn with_max_individuals(mut self, n: usize) -> Self {
        self.max_individuals = n;
        self
    }

    /// Mean number of children per individual.
    pub fn mean_offspring(&self) -> f64 {
        self.birth_rate * self.lifetime.mean()
    }

    pub fn is_supercritical(&self) -> bool {
        self.mean_offspring() > 1.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.birth_rate.is_finite() && self.birth_rate >= 0.0) {
            return Err(Error::Params("birth rate must be finite and >= 0".into()));
        }
        self.lifetime.validate()?;
        if let Some(s) = &self.speed {
            s.validate()?;
        }
        if let Some(l) = self.root_lifetime {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Params("root lifetime must be positive".into()));
            }
        }
        match self.truncation {
            Some(r) if !(r > 0.0) => Err(Error::Params("truncation must be positive".into())),
            None if self.is_supercritical() => Err(Error::Params(
                "a supercritical splitting tree needs a truncation height".into(),
            )),
            _ => Ok(()),
        }
    }
}

fn draw_lifetime<R: Rng + ?Sized>(law: &JumpLaw, rng: &mut R) -> f64 {
    loop {
        let l = quantize(law.sample(rng));
        if l > 0.0 {
            return l;
        }
    }
}

/// Grows the tree individual by individual. Births on each (clipped)
/// lifetime form a Poisson process; a birth that would tie with the
/// parent's endpoints or the previous sibling is redrawn.
pub fn simulate_splitting_tree<R: Rng + ?Sized>(params: &SplittingParams, rng: &mut R) -> Result<ChronoTree> {
    params.validate()?;
    let cap = params.truncation.map(quantize).unwrap_or(f64::INFINITY);
    let root_life = match params.root_lifetime {
        Some(l) => quantize(l),
        None => draw_lifetime(&params.lifetime, rng),
    };
    let mut inds = vec![Individual::root(0, root_life.min(cap))];
    let gap = (params.birth_rate > 0.0).then(|| Exp::new(params.birth_rate).unwrap());
    let mut next = 0;
    while next < inds.len() {
        let (pid, birth, death) = (inds[next].id, inds[next].birth, inds[next].death);
        next += 1;
        let Some(gap) = gap else { continue };
        let mut last = birth;
        loop {
            let t = quantize(last + gap.sample(rng));
            if t >= death {
                break;
            }
            if t - last <= EPS || death - t <= EPS {
                continue;
            }
            let life = draw_lifetime(&params.lifetime, rng);
            let child_death = (t + life).min(cap);
            if child_death - t <= EPS {
                continue;
            }
            if inds.len() >= params.max_individuals {
                return Err(Error::Simulation(format!(
                    "more than {} individuals",
                    params.max_individuals
                )));
            }
            inds.push(Individual::new(inds.len() as u64, Some(pid), t, child_death));
            last = t;
        }
    }
    if let Some(law) = &params.speed {
        for ind in &mut inds {
            ind.speed = loop {
                let s = law.sample(rng);
                if s > 0.0 {
                    break s;
                }
            };
        }
    }
    ChronoTree::new(inds)
}
