//! Spontaneous decay rates in units of the free-space rate `Gamma0`.
//!
//! Two independent routes are provided: the closed forms
//! [`gamma_perp`] / [`gamma_par`], and [`assemble_rates`], which builds the
//! classical, noise-only and cross contributions from the averaged delta
//! and Green tensors. Natural units `hbar = eps0 = c = 1`; the dipole
//! strength cancels in every normalized rate.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green_average::{averaged_delta, averaged_green, CavityGeometry};
use crate::permittivity::{refractive_index, Dielectric, Permittivity, RefractiveIndex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    omega_a: f64,
    dipole: Option<f64>,
}

impl Transition {
    pub fn new(omega_a: f64) -> Result<Self> {
        if !(omega_a.is_finite() && omega_a > 0.0) {
            return Err(Error::InvalidParameter(format!("transition frequency must be > 0, got {omega_a}")));
        }
        Ok(Self { omega_a, dipole: None })
    }

    /// Attaches a dipole matrix element magnitude, needed only for
    /// absolute rates.
    pub fn with_dipole(mut self, mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::InvalidParameter(format!("dipole moment must be >= 0, got {mu}")));
        }
        self.dipole = Some(mu);
        Ok(self)
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }

    pub fn dipole(&self) -> Option<f64> {
        self.dipole
    }
}

/// SI values of the constants entering `Gamma0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub eps0: f64,
    pub c: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        eps0: 8.854_187_812_8e-12,
        c: 299_792_458.0,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}

/// Free-space rate `omega^3 mu^2 / (3 pi c^3 hbar eps0)`.
pub fn gamma0(transition: &Transition, constants: &PhysicalConstants) -> Result<f64> {
    let mu = transition.dipole.ok_or(Error::MissingDipole)?;
    let w = transition.omega_a;
    Ok(w.powi(3) * mu * mu / (3.0 * PI * constants.c.powi(3) * constants.hbar * constants.eps0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalRates {
    pub perp: f64,
    pub par: f64,
}

/// Full rate decomposition, all entries in units of `Gamma0(omega_A)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    pub total: f64,
    pub perp: f64,
    pub par: f64,
    pub cl_perp: f64,
    pub cl_par: f64,
    pub noise_perp: f64,
    pub noise_par: f64,
    pub cross_perp: f64,
    pub cross_par: f64,
}

impl RateBreakdown {
    /// A negative transverse rate marks the cavity as too large.
    pub fn is_admissible(&self) -> bool {
        self.perp >= 0.0
    }

    pub fn classical_total(&self) -> f64 {
        self.cl_perp + self.cl_par
    }
}

fn check(eps: Permittivity, omega: f64) -> Result<()> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter(format!("transition frequency must be > 0, got {omega}")));
    }
    if eps.im < 0.0 {
        return Err(Error::GainMedium(eps.im));
    }
    if eps.norm_sqr() == 0.0 {
        return Err(Error::SingularPermittivity);
    }
    Ok(())
}

/// Rates with only the classical Clausius–Mosotti local-field factor.
pub fn gamma_classical(
    eps: Permittivity,
    n: RefractiveIndex,
    transition: &Transition,
    geom: &CavityGeometry,
) -> Result<ClassicalRates> {
    check(eps, transition.omega_a)?;
    let lf = eps.local_field_factor_sqr();
    let x = geom.inverse_size(transition.omega_a);
    Ok(ClassicalRates {
        perp: n.eta * lf,
        par: lf * 1.5 * eps.im / eps.norm_sqr() * x.powi(3),
    })
}

/// Transverse rate including the noise-polarization correction. May be
/// negative when the cavity is too large.
pub fn gamma_perp(
    eps: Permittivity,
    n: RefractiveIndex,
    transition: &Transition,
    geom: &CavityGeometry,
) -> Result<f64> {
    check(eps, transition.omega_a)?;
    let x = geom.inverse_size(transition.omega_a);
    let ei = eps.im;
    Ok(n.eta * (eps.local_field_factor_sqr() - 2.0 * ei * ei / 9.0)
        - ei * (eps.re + 2.0) * (2.0 / 9.0 * n.kappa - x / 3.0)
        + ei * x.powi(3) / 3.0)
}

/// Longitudinal rate including the noise-polarization correction.
pub fn gamma_par(eps: Permittivity, transition: &Transition, geom: &CavityGeometry) -> Result<f64> {
    check(eps, transition.omega_a)?;
    let x = geom.inverse_size(transition.omega_a);
    let mod2 = eps.norm_sqr();
    let braces = eps.local_field_factor_sqr() + mod2 / 9.0
        - 2.0 / 9.0 * eps.re * (eps.re + 2.0)
        - 2.0 / 9.0 * eps.im * eps.im;
    Ok(1.5 * eps.im * x.powi(3) / mod2 * braces)
}

/// Builds the rate from the averaged tensors:
///
/// * classical: `2 w^2 |(eps+2)/3|^2 Im G`
/// * noise only: `(2/9) eps_im <delta>`
/// * cross: `(4/3) w^2 eps_im Re[((eps+2)/3) G]`
///
/// each split into transverse and longitudinal parts and divided by
/// `Gamma0 = w^3 / (3 pi)` (unit dipole).
pub fn assemble_rates(
    eps: Permittivity,
    n: RefractiveIndex,
    transition: &Transition,
    geom: &CavityGeometry,
) -> Result<RateBreakdown> {
    check(eps, transition.omega_a)?;
    let w = transition.omega_a;
    let gamma0 = w.powi(3) / (3.0 * PI);
    let green = averaged_green(eps, n, w, geom)?;
    let delta = averaged_delta(geom);
    let lf = (eps.to_complex() + 2.0) / 3.0;

    let classical = |im_g: f64| 2.0 * w * w * lf.norm_sqr() * im_g / gamma0;
    let noise = |d: f64| 2.0 / 9.0 * eps.im * d / gamma0;
    let cross = |g: Complex64| 4.0 / 3.0 * w * w * eps.im * (lf * g).re / gamma0;

    let cl_perp = classical(green.im_perp);
    let cl_par = classical(green.im_par);
    let noise_perp = noise(delta.perp);
    let noise_par = noise(delta.par);
    let cross_perp = cross(green.perp());
    let cross_par = cross(green.par());
    let perp = cl_perp + noise_perp + cross_perp;
    let par = cl_par + noise_par + cross_par;
    Ok(RateBreakdown {
        total: perp + par,
        perp,
        par,
        cl_perp,
        cl_par,
        noise_perp,
        noise_par,
        cross_perp,
        cross_par,
    })
}

/// Evaluates the medium at `omega_a` and assembles the full breakdown.
pub fn rates_for_medium<D: Dielectric + ?Sized>(
    medium: &D,
    omega_a: f64,
    geom: &CavityGeometry,
) -> Result<(Permittivity, RefractiveIndex, RateBreakdown)> {
    let transition = Transition::new(omega_a)?;
    let eps = medium.epsilon(omega_a)?;
    let n = refractive_index(eps)?;
    let rates = assemble_rates(eps, n, &transition, geom)?;
    Ok((eps, n, rates))
}

/// Closed-form transverse rate for a medium at `omega_a`.
pub fn transverse_rate<D: Dielectric + ?Sized>(medium: &D, omega_a: f64, geom: &CavityGeometry) -> Result<f64> {
    let transition = Transition::new(omega_a)?;
    let eps = medium.epsilon(omega_a)?;
    let n = refractive_index(eps)?;
    gamma_perp(eps, n, &transition, geom)
}
