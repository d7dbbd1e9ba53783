//! Equal-time commutator check for the noise-corrected local field.
//!
//! Including the noise polarization in the local field multiplies the
//! canonical `[E, B]` commutator by `1 + (alpha^2 / 9)(eps_S - 1)`, with
//! `alpha = 1 + 3s` for a material with structure constant `s`. The
//! excess over one is the margin reported here.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Margin below which the commutator is considered canonical.
pub const STRICT_THRESHOLD: f64 = 0.1;
/// Margin at which the spurious term equals the canonical one.
pub const VIOLATED_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureConstant {
    s: f64,
}

impl StructureConstant {
    /// Cubic symmetry.
    pub const CUBIC: StructureConstant = StructureConstant { s: 0.0 };

    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidParameter(format!("structure constant must be finite, got {s}")));
        }
        Ok(Self { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn alpha(&self) -> f64 {
        1.0 + 3.0 * self.s
    }
}

impl Default for StructureConstant {
    fn default() -> Self {
        Self::CUBIC
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validity {
    Strict,
    Marginal,
    Violated,
}

impl Validity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Validity::Strict => "strict",
            Validity::Marginal => "marginal",
            Validity::Violated => "violated",
        }
    }
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityMargin {
    pub rho: f64,
    pub class: Validity,
}

fn check_static(eps_static: f64) -> Result<()> {
    if eps_static.is_nan() || eps_static < 1.0 {
        return Err(Error::StaticPermittivityBelowOne(eps_static));
    }
    Ok(())
}

fn margin(eps_static: f64, s: StructureConstant) -> f64 {
    let alpha = s.alpha();
    alpha * alpha * (eps_static - 1.0) / 9.0
}

/// Scalar multiplying the canonical commutator; exactly 1 in vacuum.
pub fn commutator_coefficient(eps_static: f64, s: StructureConstant) -> Result<f64> {
    check_static(eps_static)?;
    Ok(1.0 + margin(eps_static, s))
}

pub fn validity_margin(eps_static: f64, s: StructureConstant) -> Result<ValidityMargin> {
    check_static(eps_static)?;
    let rho = margin(eps_static, s);
    let class = if rho < STRICT_THRESHOLD {
        Validity::Strict
    } else if rho < VIOLATED_THRESHOLD {
        Validity::Marginal
    } else {
        Validity::Violated
    };
    Ok(ValidityMargin { rho, class })
}

/// Largest static permittivity at which the margin stays below one,
/// `9 / alpha^2 + 1`.
pub fn static_permittivity_bound(s: StructureConstant) -> f64 {
    9.0 / (s.alpha() * s.alpha()) + 1.0
}
