//! Scalar schedules h ↦ s(h) and phase schedules (h, y) ↦ F_h(y).
//!
//! The serializable scalar family is c·h^a·exp(b·h); "const" and the
//! thermodynamic preset β·h^{(d−1)/d} are instances of it.

use std::fmt;
use std::sync::Arc;

use crate::error::{CoreError, Result};

/// h ↦ c · h^a · e^{b h}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

/// Symbolic value of a schedule as h → 0⁺.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitTag {
    Zero,
    Finite(f64),
    Divergent,
}

impl Schedule {
    pub fn constant(c: f64) -> Schedule {
        Schedule { c, a: 0.0, b: 0.0 }
    }

    /// β · h^{(d−1)/d}, the thermodynamic inverse-temperature scaling.
    pub fn beta_thermo(beta: f64, d: usize) -> Schedule {
        Schedule {
            c: beta,
            a: (d as f64 - 1.0) / d as f64,
            b: 0.0,
        }
    }

    /// β · h (the scaled family whose Gibbs limit is Gaussian).
    pub fn linear(beta: f64) -> Schedule {
        Schedule {
            c: beta,
            a: 1.0,
            b: 0.0,
        }
    }

    pub fn eval(&self, h: f64) -> f64 {
        self.c * h.powf(self.a) * (self.b * h).exp()
    }

    pub fn limit_tag(&self) -> LimitTag {
        if self.c == 0.0 || self.a > 0.0 {
            LimitTag::Zero
        } else if self.a == 0.0 {
            LimitTag::Finite(self.c)
        } else {
            LimitTag::Divergent
        }
    }
}

/// Real-valued phase F_h(y) attached to a pull-back, with a pointwise
/// h → 0 limit.
#[derive(Clone)]
pub enum PhaseSchedule {
    Zero,
    /// F_h(y) = coeff · h^a · ‖y‖² (limit 0 when a > 0).
    NormSq { coeff: f64, a: f64 },
    /// Arbitrary test hook; `limit` gives F₀(y).
    Custom {
        f: Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>,
        limit: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    },
}

impl PhaseSchedule {
    pub fn eval(&self, h: f64, y: &[f64]) -> f64 {
        match self {
            PhaseSchedule::Zero => 0.0,
            PhaseSchedule::NormSq { coeff, a } => {
                let n2: f64 = y.iter().map(|v| v * v).sum();
                coeff * h.powf(*a) * n2
            }
            PhaseSchedule::Custom { f, .. } => f(h, y),
        }
    }

    /// F₀(y) = lim_{h→0} F_h(y).
    pub fn limit(&self, y: &[f64]) -> f64 {
        match self {
            PhaseSchedule::Zero => 0.0,
            PhaseSchedule::NormSq { coeff, a } => {
                if *a > 0.0 {
                    0.0
                } else {
                    let n2: f64 = y.iter().map(|v| v * v).sum();
                    coeff * n2
                }
            }
            PhaseSchedule::Custom { limit, .. } => limit(y),
        }
    }
}

impl fmt::Debug for PhaseSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseSchedule::Zero => write!(f, "PhaseSchedule::Zero"),
            PhaseSchedule::NormSq { coeff, a } => {
                write!(f, "PhaseSchedule::NormSq({coeff}·h^{a}·‖y‖²)")
            }
            PhaseSchedule::Custom { .. } => write!(f, "PhaseSchedule::Custom"),
        }
    }
}

/// Geometric default h-schedule: h_k = 2^{−k}, k = 1..=n.
pub fn geometric_schedule(n: usize) -> Vec<f64> {
    (1..=n).map(|k| 0.5f64.powi(k as i32)).collect()
}

pub fn check_h_schedule(hs: &[f64]) -> Result<()> {
    if hs.is_empty() {
        return Err(CoreError::InvalidParameter("empty h schedule".into()));
    }
    for w in hs.windows(2) {
        if w[1] >= w[0] {
            return Err(CoreError::InvalidParameter(
                "h schedule must be strictly decreasing".into(),
            ));
        }
    }
    if hs[0] > 1.0 || *hs.last().unwrap() <= 0.0 {
        return Err(CoreError::InvalidParameter(
            "h schedule must lie in (0, 1]".into(),
        ));
    }
    Ok(())
}
