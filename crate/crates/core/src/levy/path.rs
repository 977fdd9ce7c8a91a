use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson, StandardNormal};

use super::LevyParams;
use crate::contour::{PljPath, Prim, PrimBuilder};
use crate::error::{Error, Result};
use crate::grid::quantize;

#[derive(Clone, Debug, PartialEq)]
pub enum PathRepr {
    /// Event representation: linear falls and jumps.
    Exact(Vec<Prim>),
    /// Values on the grid `k * step`, `values[0]` being the start.
    Euler { step: f64, values: Vec<f64> },
}

/// A sampled path on `[0, horizon]`; after `killed_at` it sits in the
/// cemetery.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPath {
    pub start: f64,
    pub repr: PathRepr,
    pub horizon: f64,
    pub killed_at: Option<f64>,
}

impl SampledPath {
    pub fn exact(start: f64, prims: Vec<Prim>, killed_at: Option<f64>) -> Self {
        let horizon = prims.iter().map(Prim::duration).sum();
        SampledPath {
            start,
            repr: PathRepr::Exact(prims),
            horizon,
            killed_at,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, PathRepr::Exact(_))
    }

    pub fn prims(&self) -> Option<&[Prim]> {
        match &self.repr {
            PathRepr::Exact(p) => Some(p),
            PathRepr::Euler { .. } => None,
        }
    }

    pub fn as_plj(&self) -> Option<PljPath> {
        self.prims().map(|p| PljPath {
            start: self.start,
            prims: p.to_vec(),
        })
    }

    /// Time at which the description stops: the kill time or the horizon.
    pub fn end_time(&self) -> f64 {
        self.killed_at.unwrap_or(self.horizon)
    }

    /// Value at `t`, or `None` in the cemetery or past the horizon.
    /// An exact path is right-continuous at its jumps.
    pub fn eval(&self, t: f64) -> Option<f64> {
        if !(t >= 0.0) || t > self.horizon || self.killed_at.is_some_and(|k| t >= k) {
            return None;
        }
        match &self.repr {
            PathRepr::Exact(prims) => {
                let (mut s, mut h) = (0.0, self.start);
                for p in prims {
                    match *p {
                        Prim::Jump(j) => h += j,
                        Prim::Fall { drop, speed } => {
                            let d = drop * speed;
                            if t < s + d {
                                return Some((h - (t - s) / speed).max(h - drop));
                            }
                            s += d;
                            h -= drop;
                        }
                    }
                }
                Some(h)
            }
            PathRepr::Euler { step, values } => {
                let k = ((t / step).floor() as usize).min(values.len() - 1);
                Some(values[k])
            }
        }
    }

    /// Jump times and sizes (exact paths only).
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut t = 0.0;
        for p in self.prims().unwrap_or(&[]) {
            match *p {
                Prim::Jump(j) => out.push((t, j)),
                Prim::Fall { .. } => t += p.duration(),
            }
        }
        out
    }

    /// `(t, x)` breakpoints, both sides of every jump.
    pub fn breakpoints(&self) -> Vec<(f64, f64)> {
        match &self.repr {
            PathRepr::Exact(p) => PljPath {
                start: self.start,
                prims: p.clone(),
            }
            .breakpoints(),
            PathRepr::Euler { step, values } => values.iter().enumerate().map(|(k, &v)| (k as f64 * step, v)).collect(),
        }
    }
}

/// Samples the Lévy process from `x` on `[0, horizon]`.
///
/// Without a Brownian part the simulation is exact and event driven, with
/// heights on the grid. Otherwise an Euler scheme with the parameters' step
/// is used and the result is flagged as such.
pub fn sample_path<R: Rng + ?Sized>(p: &LevyParams, x: f64, horizon: f64, rng: &mut R) -> Result<SampledPath> {
    p.validate()?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::out_of_range("horizon", horizon, "0 < horizon < inf"));
    }
    if p.beta > 0.0 {
        let step = p
            .euler_step
            .ok_or_else(|| Error::Params("beta > 0 requires an Euler step".into()))?;
        return Ok(sample_euler(p, x, horizon, step, rng));
    }
    let x = quantize(x);
    let speed = 1.0 / p.drift;
    let kill = (p.kappa > 0.0).then(|| Exp::new(p.kappa).unwrap().sample(rng));
    let stop = kill.map_or(horizon, |k| k.min(horizon));
    let gap = (p.jump_rate > 0.0).then(|| Exp::new(p.jump_rate).unwrap());
    let mut b = PrimBuilder::new();
    let mut t = 0.0;
    loop {
        let next = t + gap.map_or(f64::INFINITY, |g| g.sample(rng));
        if next >= stop {
            b.fall(quantize(p.drift * (stop - t)), speed);
            break;
        }
        b.fall(quantize(p.drift * (next - t)), speed);
        b.jump(quantize(p.jump_law.sample(rng)));
        t = next;
    }
    let mut path = SampledPath::exact(x, b.finish(), None);
    if kill.is_some_and(|k| k < horizon) {
        path.killed_at = Some(path.horizon);
    } else {
        path.horizon = horizon;
    }
    Ok(path)
}

fn sample_euler<R: Rng + ?Sized>(p: &LevyParams, x: f64, horizon: f64, step: f64, rng: &mut R) -> SampledPath {
    let n = (horizon / step).ceil() as usize;
    let sigma = (2.0 * p.beta * step).sqrt();
    let jumps = (p.jump_rate > 0.0).then(|| Poisson::new(p.jump_rate * step).unwrap());
    let kill = (p.kappa > 0.0).then(|| Exp::new(p.kappa).unwrap().sample(rng));
    let mut values = Vec::with_capacity(n + 1);
    values.push(x);
    let mut v = x;
    let mut killed_at = None;
    for k in 0..n {
        if let Some(kt) = kill {
            if kt < (k + 1) as f64 * step {
                killed_at = Some(kt);
                break;
            }
        }
        let z: f64 = StandardNormal.sample(rng);
        v += -p.drift * step + sigma * z;
        if let Some(j) = &jumps {
            let count: f64 = j.sample(rng);
            for _ in 0..count as u64 {
                v += p.jump_law.sample(rng);
            }
        }
        values.push(v);
    }
    SampledPath {
        start: x,
        repr: PathRepr::Euler { step, values },
        horizon,
        killed_at,
    }
}

/// X - (max X - r)^+: every new maximum above `r` is pushed back to `r`.
pub fn reflect_below(path: &SampledPath, r: f64) -> Result<SampledPath> {
    if path.start > r {
        return Err(Error::out_of_range("start", path.start, format!("start <= r = {r}")));
    }
    if r == f64::INFINITY {
        return Ok(path.clone());
    }
    let repr = match &path.repr {
        PathRepr::Exact(prims) => {
            let r = quantize(r);
            let mut b = PrimBuilder::new();
            let mut h = path.start;
            for p in prims {
                match *p {
                    Prim::Jump(j) => {
                        let top = (h + j).min(r);
                        b.jump(top - h);
                        h = top;
                    }
                    Prim::Fall { drop, speed } => {
                        b.fall(drop, speed);
                        h -= drop;
                    }
                }
            }
            PathRepr::Exact(b.finish())
        }
        PathRepr::Euler { step, values } => {
            let mut max = f64::NEG_INFINITY;
            let values = values
                .iter()
                .map(|&v| {
                    max = max.max(v);
                    v - (max - r).max(0.0)
                })
                .collect();
            PathRepr::Euler { step: *step, values }
        }
    };
    Ok(SampledPath { repr, ..path.clone() })
}

/// Stops the path when it first reaches 0; the kill time is exact on falls.
pub fn kill_at_zero(path: &SampledPath) -> SampledPath {
    let end = path.end_time();
    match &path.repr {
        PathRepr::Exact(prims) => {
            let mut h = path.start;
            let mut t = 0.0;
            if h <= 0.0 && !matches!(prims.first(), Some(Prim::Jump(_))) {
                return SampledPath::exact(path.start, Vec::new(), Some(0.0));
            }
            for (k, p) in prims.iter().enumerate() {
                match *p {
                    Prim::Jump(j) => h += j,
                    Prim::Fall { drop, speed } => {
                        if h - drop <= 0.0 {
                            let mut out = prims[..k].to_vec();
                            out.push(Prim::Fall { drop: h, speed });
                            let hit = t + h * speed;
                            if hit <= end {
                                return SampledPath::exact(path.start, out, Some(hit));
                            }
                        }
                        t += drop * speed;
                        h -= drop;
                    }
                }
            }
            path.clone()
        }
        PathRepr::Euler { step, values } => match values.iter().position(|&v| v <= 0.0) {
            Some(0) => SampledPath {
                repr: PathRepr::Euler {
                    step: *step,
                    values: vec![values[0]],
                },
                killed_at: Some(0.0),
                ..path.clone()
            },
            Some(k) => {
                let (a, b) = (values[k - 1], values[k]);
                let hit = (k - 1) as f64 * step + step * a / (a - b);
                let mut v = values[..k].to_vec();
                v.push(0.0);
                SampledPath {
                    repr: PathRepr::Euler { step: *step, values: v },
                    killed_at: Some(hit.min(path.killed_at.unwrap_or(f64::INFINITY))),
                    ..path.clone()
                }
            }
            None => path.clone(),
        },
    }
}

/// Excises the stretches strictly above `r` (exact paths only).
pub fn time_change(path: &SampledPath, r: f64) -> Result<SampledPath> {
    if !(r > 0.0) {
        return Err(Error::out_of_range("r", r, "r > 0"));
    }
    if path.start > r {
        return Err(Error::out_of_range("start", path.start, format!("start <= r = {r}")));
    }
    let plj = path
        .as_plj()
        .ok_or_else(|| Error::Params("time change needs an exact path".into()))?;
    let out = crate::contour::time_change_path(&plj, quantize(r));
    let mut res = SampledPath::exact(out.start, out.prims, None);
    if path.killed_at.is_some() {
        res.killed_at = Some(res.horizon);
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::JumpLaw;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn deterministic_drift() {
        let p = sample_path(&LevyParams::drift(1.0), 2.0, 1.0, &mut rng(0)).unwrap();
        assert_eq!(p.prims().unwrap(), &[Prim::unit_fall(1.0)]);
        assert_eq!(p.eval(0.5), Some(1.5));
        assert_eq!(p.eval(1.0), Some(1.0));
        assert_eq!(p.killed_at, None);
    }

    #[test]
    fn killing_is_reproducible() {
        let params = LevyParams::drift(1.0).with_kappa(1.0);
        let a = sample_path(&params, 100.0, 50.0, &mut rng(9)).unwrap();
        let b = sample_path(&params, 100.0, 50.0, &mut rng(9)).unwrap();
        assert_eq!(a, b);
        let k = a.killed_at.unwrap();
        let expected: f64 = Exp::new(1.0).unwrap().sample(&mut rng(9));
        assert!((k - expected).abs() < 1e-8);
        assert_eq!(a.eval(k + 1e-3), None);
    }

    #[test]
    fn jump_counts_are_poisson() {
        let params = LevyParams::drift(1.0).with_jumps(1.5, JumpLaw::Exp(2.0));
        let mut r = rng(4);
        let n = 10_000;
        let counts: Vec<f64> = (0..n)
            .map(|_| sample_path(&params, 5.0, 2.0, &mut r).unwrap().jumps().len() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / n as f64;
        let se = (3.0f64 / n as f64).sqrt();
        assert!((mean - 3.0).abs() < 3.0 * se, "{mean}");
    }

    #[test]
    fn mean_increment_is_minus_psi_prime() {
        let params = LevyParams::drift(1.0).with_jumps(1.0, JumpLaw::Exp(2.0));
        let mut r = rng(5);
        let n = 10_000;
        let t = 2.0;
        let xs: Vec<f64> = (0..n)
            .map(|_| sample_path(&params, 0.0, t, &mut r).unwrap().eval(t).unwrap())
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let target = -params.psi_prime0() * t;
        assert!(
            (mean - target).abs() < 3.0 * (var / n as f64).sqrt(),
            "{mean} vs {target}"
        );
    }

    #[test]
    fn euler_needs_step() {
        let mut params = LevyParams::drift(1.0);
        params.beta = 0.5;
        assert!(sample_path(&params, 1.0, 1.0, &mut rng(0)).is_err());
        let params = LevyParams::drift(1.0).with_beta(0.5, 0.01);
        let p = sample_path(&params, 1.0, 1.0, &mut rng(0)).unwrap();
        assert!(!p.is_exact());
    }

    #[test]
    fn reflection_examples() {
        let path = SampledPath::exact(
            1.0,
            vec![Prim::unit_fall(0.5), Prim::Jump(5.0), Prim::unit_fall(1.0)],
            None,
        );
        let refl = reflect_below(&path, 3.0).unwrap();
        assert_eq!(refl.eval(0.5), Some(3.0));
        assert_eq!(refl.eval(1.5), Some(2.0));
        assert_eq!(reflect_below(&path, f64::INFINITY).unwrap(), path);
        assert_eq!(reflect_below(&path, 10.0).unwrap(), path);
        assert!(reflect_below(&path, 0.5).is_err());
    }

    #[test]
    fn kill_examples() {
        let p = SampledPath::exact(2.0, vec![Prim::unit_fall(5.0)], None);
        let k = kill_at_zero(&p);
        assert_eq!(k.killed_at, Some(2.0));
        let stays = SampledPath::exact(2.0, vec![Prim::unit_fall(1.0)], None);
        assert_eq!(kill_at_zero(&stays), stays);
        // A contour read as a path starting at 0 is killed at its duration.
        let c = SampledPath::exact(
            0.0,
            vec![
                Prim::Jump(2.0),
                Prim::unit_fall(1.0),
                Prim::Jump(1.5),
                Prim::unit_fall(2.5),
            ],
            None,
        );
        let refl = reflect_below(&c, f64::INFINITY).unwrap();
        assert_eq!(kill_at_zero(&refl).killed_at, Some(3.5));
    }

    #[test]
    fn time_change_of_paths() {
        let p = SampledPath::exact(
            1.0,
            vec![Prim::unit_fall(0.5), Prim::Jump(5.0), Prim::unit_fall(5.5)],
            Some(6.0),
        );
        let tc = time_change(&p, 3.0).unwrap();
        assert_eq!(
            tc.prims().unwrap(),
            &[Prim::unit_fall(0.5), Prim::Jump(2.5), Prim::unit_fall(3.0)]
        );
        assert_eq!(tc.killed_at, Some(3.5));
    }
}
