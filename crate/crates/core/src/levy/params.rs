use super::JumpLaw;
use crate::error::{Error, Result};

/// Bisection tolerance for the largest root.
pub const ROOT_TOL: f64 = 1e-12;

/// Spectrally positive Lévy exponent in finite-variation normal form:
/// `X_t = -drift t + sqrt(2 beta) B_t + compound Poisson(jump_rate, jump_law)`,
/// killed at rate `kappa`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevyParams {
    pub kappa: f64,
    pub drift: f64,
    pub beta: f64,
    pub jump_rate: f64,
    pub jump_law: JumpLaw,
    /// Euler step, required when `beta > 0`.
    pub euler_step: Option<f64>,
}

impl LevyParams {
    /// Pure drift, no jumps, no killing.
    pub fn drift(drift: f64) -> Self {
        LevyParams {
            kappa: 0.0,
            drift,
            beta: 0.0,
            jump_rate: 0.0,
            jump_law: JumpLaw::Fixed(1.0),
            euler_step: None,
        }
    }

    pub fn with_jumps(mut self, rate: f64, law: JumpLaw) -> Self {
        self.jump_rate = rate;
        self.jump_law = law;
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_beta(mut self, beta: f64, step: f64) -> Self {
        self.beta = beta;
        self.euler_step = Some(step);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if !finite_nonneg(self.kappa) || !finite_nonneg(self.beta) || !finite_nonneg(self.jump_rate) {
            return Err(Error::Params(
                "kappa, beta and jump_rate must be finite and >= 0".into(),
            ));
        }
        if !self.drift.is_finite() {
            return Err(Error::Params("drift must be finite".into()));
        }
        if !(self.drift > 0.0 || self.beta > 0.0) {
            return Err(Error::Params("a subordinator: need drift > 0 or beta > 0".into()));
        }
        if let Some(s) = self.euler_step {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Params("euler step must be positive".into()));
            }
        }
        self.jump_law.validate()
    }

    /// Ψ(λ) = -κ + drift λ + β λ² - rate (1 - L(λ)).
    pub fn psi(&self, lambda: f64) -> f64 {
        -self.kappa + self.drift * lambda + self.beta * lambda * lambda
            - self.jump_rate * (1.0 - self.jump_law.laplace(lambda))
    }

    /// Right derivative at 0.
    pub fn psi_prime0(&self) -> f64 {
        self.drift - self.jump_rate * self.jump_law.mean()
    }

    /// lim λ/Ψ(λ): 1/drift without Brownian part, else 0.
    pub fn sojourn(&self) -> f64 {
        if self.beta > 0.0 {
            0.0
        } else {
            1.0 / self.drift
        }
    }

    pub fn is_supercritical(&self) -> bool {
        self.kappa > 0.0 || self.psi_prime0() < 0.0
    }

    /// Largest root of Ψ; 0 for the unkilled (sub)critical case.
    pub fn largest_root(&self) -> Result<f64> {
        self.validate()?;
        if !self.is_supercritical() {
            return Ok(0.0);
        }
        let mut hi = 1.0;
        while self.psi(hi) <= 0.0 {
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::Params("no bracket for the largest root".into()));
            }
        }
        let mut lo = 0.0;
        while hi - lo > ROOT_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.psi(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Parameters of Ψ#(λ) = Ψ(λ + b) for supercritical Ψ.
    pub fn conjugate(&self) -> Result<LevyParams> {
        let b = self.largest_root()?;
        if b <= 0.0 {
            return Err(Error::Params("conjugate needs a supercritical exponent".into()));
        }
        Ok(LevyParams {
            kappa: 0.0,
            drift: self.drift + 2.0 * self.beta * b,
            beta: self.beta,
            jump_rate: self.jump_rate * self.jump_law.laplace(b),
            jump_law: self.jump_law.tilted(b)?,
            euler_step: self.euler_step,
        })
    }
}

pub fn psi_eval(p: &LevyParams, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::out_of_range("lambda", lambda, "lambda >= 0"));
    }
    Ok(p.psi(lambda))
}

pub fn sojourn_of(p: &LevyParams) -> f64 {
    p.sojourn()
}

pub fn largest_root(p: &LevyParams) -> Result<f64> {
    p.largest_root()
}

pub fn conjugate(p: &LevyParams) -> Result<LevyParams> {
    p.conjugate()
}
