use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::stats::adaptive_simpson;

/// Tolerance of the numeric Laplace transform.
pub const LAPLACE_TOL: f64 = 1e-10;

/// A probability law on (0, inf) for jump sizes and lifetimes.
#[derive(Clone, Debug, PartialEq)]
pub enum JumpLaw {
    /// Exponential with rate `theta` (mean `1/theta`).
    Exp(f64),
    /// Point mass.
    Fixed(f64),
    /// Finitely many values with probabilities.
    Table { values: Vec<f64>, probs: Vec<f64> },
    /// Piecewise-uniform density on `edges`, bin `k` carrying `weights[k]`.
    /// Its transform has no closed form here and is integrated numerically.
    Histogram { edges: Vec<f64>, weights: Vec<f64> },
}

impl JumpLaw {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Params(format!("jump law {self}: {m}")));
        match self {
            JumpLaw::Exp(t) if !(t.is_finite() && *t > 0.0) => bad("rate must be positive"),
            JumpLaw::Fixed(x) if !(x.is_finite() && *x > 0.0) => bad("size must be positive"),
            JumpLaw::Table { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return bad("values and probabilities must pair up");
                }
                if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return bad("values must be positive");
                }
                let total: f64 = probs.iter().sum();
                if probs.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
                    return bad("probabilities must be non-negative and sum to 1");
                }
                Ok(())
            }
            JumpLaw::Histogram { edges, weights } => {
                if edges.len() < 2 || weights.len() + 1 != edges.len() {
                    return bad("needs k+1 edges for k weights");
                }
                if !(edges[0] >= 0.0) || edges.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("edges must increase from a non-negative start");
                }
                let total: f64 = weights.iter().sum();
                if weights.iter().any(|w| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-9 {
                    return bad("weights must be non-negative and sum to 1");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            JumpLaw::Exp(t) => 1.0 / t,
            JumpLaw::Fixed(x) => *x,
            JumpLaw::Table { values, probs } => values.iter().zip(probs).map(|(v, p)| v * p).sum(),
            JumpLaw::Histogram { edges, weights } => weights
                .iter()
                .enumerate()
                .map(|(k, w)| w * 0.5 * (edges[k] + edges[k + 1]))
                .sum(),
        }
    }

    /// Laplace transform E[exp(-lambda J)].
    pub fn laplace(&self, lambda: f64) -> f64 {
        match self {
            JumpLaw::Exp(t) => t / (t + lambda),
            JumpLaw::Fixed(x) => (-lambda * x).exp(),
            JumpLaw::Table { values, probs } => values.iter().zip(probs).map(|(v, p)| p * (-lambda * v).exp()).sum(),
            JumpLaw::Histogram { edges, weights } => {
                let mut total = 0.0;
                for (k, w) in weights.iter().enumerate() {
                    if *w == 0.0 {
                        continue;
                    }
                    let (a, b) = (edges[k], edges[k + 1]);
                    let density = w / (b - a);
                    let tol = LAPLACE_TOL / weights.len() as f64;
                    total += density * adaptive_simpson(&|x: f64| (-lambda * x).exp(), a, b, tol);
                }
                total
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JumpLaw::Exp(t) => Exp::new(*t).expect("validated rate").sample(rng),
            JumpLaw::Fixed(x) => *x,
            JumpLaw::Table { values, probs } => values[pick(probs, rng)],
            JumpLaw::Histogram { edges, weights } => {
                let k = pick(weights, rng);
                edges[k] + rng.random::<f64>() * (edges[k + 1] - edges[k])
            }
        }
    }

    /// Law of J under the measure exp(-b J) dP / E[exp(-b J)].
    pub fn tilted(&self, b: f64) -> Result<JumpLaw> {
        match self {
            JumpLaw::Exp(t) => Ok(JumpLaw::Exp(t + b)),
            JumpLaw::Fixed(x) => Ok(JumpLaw::Fixed(*x)),
            JumpLaw::Table { values, probs } => {
                let w: Vec<f64> = values.iter().zip(probs).map(|(v, p)| p * (-b * v).exp()).collect();
                let total: f64 = w.iter().sum();
                Ok(JumpLaw::Table {
                    values: values.clone(),
                    probs: w.into_iter().map(|x| x / total).collect(),
                })
            }
            JumpLaw::Histogram { .. } => Err(Error::Params(
                "an exponentially tilted histogram is not a histogram".into(),
            )),
        }
    }
}

fn pick<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u = rng.random::<f64>() * weights.iter().sum::<f64>();
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

impl fmt::Display for JumpLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        match self {
            JumpLaw::Exp(t) => write!(f, "exp:{t}"),
            JumpLaw::Fixed(x) => write!(f, "fixed:{x}"),
            JumpLaw::Table { values, probs } => write!(f, "table:{}/{}", join(values), join(probs)),
            JumpLaw::Histogram { edges, weights } => write!(f, "hist:{}/{}", join(edges), join(weights)),
        }
    }
}

/// Parses `exp:θ`, `fixed:x`, `table:x1,x2/p1,p2` or `hist:e0,e1,e2/w1,w2`.
impl FromStr for JumpLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Params(format!("cannot parse jump law {s:?}"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let list = |t: &str| t.split(',').map(num).collect::<Result<Vec<f64>>>();
        let law = match kind.trim() {
            "exp" => JumpLaw::Exp(num(rest)?),
            "fixed" => JumpLaw::Fixed(num(rest)?),
            "table" => {
                let (v, p) = rest.split_once('/').ok_or_else(bad)?;
                JumpLaw::Table {
                    values: list(v)?,
                    probs: list(p)?,
                }
            }
            "hist" => {
                let (e, w) = rest.split_once('/').ok_or_else(bad)?;
                JumpLaw::Histogram {
                    edges: list(e)?,
                    weights: list(w)?,
                }
            }
            _ => return Err(bad()),
        };
        law.validate()?;
        Ok(law)
    }
}
