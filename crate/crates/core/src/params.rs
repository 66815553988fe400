//! Exponents and the relations tying them to `α` for each estimate.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use thiserror::Error;

/// Tolerance on `α` when it is supplied explicitly rather than derived.
const ALPHA_TOLERANCE: f64 = 1e-12;

/// Conjugate exponent `p' = p / (p − 1)`.
pub fn conjugate_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("exponents must satisfy 1 < p < q < ∞ (got p = {p}, q = {q})")]
    Hls { p: f64, q: f64 },
    #[error("exponent must satisfy 1 < {name} < ∞ (got {value})")]
    Exponent { name: &'static str, value: f64 },
    #[error("alpha must lie in [0, 1) (got {0})")]
    AlphaRange(f64),
    #[error("alpha = {given} does not match the required {expected} ({relation})")]
    AlphaRelation {
        given: f64,
        expected: f64,
        relation: &'static str,
    },
    #[error("{name} must be positive (got {value})")]
    NotPositive { name: &'static str, value: f64 },
    #[error("mode {mode} needs exponent {name}")]
    Missing { mode: &'static str, name: &'static str },
}

/// The three operator estimates the search can target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum NormMode {
    /// `‖I_α F‖_q ≤ C ‖F‖_p`, `α = 1/p − 1/q`.
    Hls,
    /// `‖I_α F‖_BMO ≤ C ‖F‖_r`, `α = 1/r`.
    Bmo,
    /// `‖I'_α F‖_p ≤ C ‖F^*‖_1`, `α = 1/p'`.
    Conjugate,
}

impl NormMode {
    pub fn name(self) -> &'static str {
        match self {
            NormMode::Hls => "hls",
            NormMode::Bmo => "bmo",
            NormMode::Conjugate => "conjugate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Params {
    pub p: f64,
    pub p_prime: f64,
    pub alpha: f64,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub mu: f64,
    pub c: f64,
}

fn check_exponent(name: &'static str, value: f64) -> Result<(), ParamsError> {
    if value > 1.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ParamsError::Exponent { name, value })
    }
}

impl Params {
    /// Bare exponent `p` with `α = 1/p'`, `μ = 1` and `C = 1`.
    pub fn new(p: f64) -> Result<Self, ParamsError> {
        check_exponent("p", p)?;
        let p_prime = conjugate_exponent(p);
        Ok(Self {
            p,
            p_prime,
            alpha: 1.0 / p_prime,
            q: None,
            r: None,
            mu: 1.0,
            c: 1.0,
        })
    }

    pub fn hls(p: f64, q: f64) -> Result<Self, ParamsError> {
        if !(p > 1.0 && q > p && q.is_finite()) {
            return Err(ParamsError::Hls { p, q });
        }
        let mut params = Self::new(p)?;
        params.q = Some(q);
        params.alpha = 1.0 / p - 1.0 / q;
        Ok(params)
    }

    /// BMO mode: the domain exponent is `r`; `p` is set to `r` as well.
    pub fn bmo(r: f64) -> Result<Self, ParamsError> {
        check_exponent("r", r)?;
        let mut params = Self::new(r)?;
        params.r = Some(r);
        params.alpha = 1.0 / r;
        Ok(params)
    }

    pub fn conjugate(p: f64) -> Result<Self, ParamsError> {
        Self::new(p)
    }

    pub fn for_mode(mode: NormMode, p: Option<f64>, q: Option<f64>, r: Option<f64>) -> Result<Self, ParamsError> {
        let need = |name, v: Option<f64>| {
            v.ok_or(ParamsError::Missing {
                mode: mode.name(),
                name,
            })
        };
        match mode {
            NormMode::Hls => Self::hls(need("p", p)?, need("q", q)?),
            NormMode::Bmo => Self::bmo(need("r", r)?),
            NormMode::Conjugate => Self::conjugate(need("p", p)?),
        }
    }

    pub fn with_mu(mut self, mu: f64) -> Result<Self, ParamsError> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(ParamsError::NotPositive { name: "mu", value: mu });
        }
        self.mu = mu;
        Ok(self)
    }

    pub fn with_constant(mut self, c: f64) -> Result<Self, ParamsError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(ParamsError::NotPositive { name: "C", value: c });
        }
        self.c = c;
        Ok(self)
    }

    /// Overrides `α` after checking it against the relation `mode` requires.
    pub fn with_alpha(mut self, mode: NormMode, alpha: f64) -> Result<Self, ParamsError> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(ParamsError::AlphaRange(alpha));
        }
        let (expected, relation) = self.required_alpha(mode)?;
        if (alpha - expected).abs() > ALPHA_TOLERANCE * expected.abs().max(1.0) {
            return Err(ParamsError::AlphaRelation {
                given: alpha,
                expected,
                relation,
            });
        }
        self.alpha = alpha;
        Ok(self)
    }

    fn required_alpha(&self, mode: NormMode) -> Result<(f64, &'static str), ParamsError> {
        Ok(match mode {
            NormMode::Hls => {
                let q = self.q.ok_or(ParamsError::Missing { mode: "hls", name: "q" })?;
                (1.0 / self.p - 1.0 / q, "alpha = 1/p - 1/q")
            }
            NormMode::Bmo => {
                let r = self.r.ok_or(ParamsError::Missing { mode: "bmo", name: "r" })?;
                (1.0 / r, "alpha = 1/r")
            }
            NormMode::Conjugate => (1.0 / self.p_prime, "alpha = 1/p'"),
        })
    }

    /// `1/p + 1/p' = 1` up to rounding.
    pub fn is_consistent(&self) -> bool {
        (1.0 / self.p + 1.0 / self.p_prime - 1.0).abs() < 1e-12
    }
}
