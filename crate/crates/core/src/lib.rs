//! Spontaneous decay of a two-level atom embedded in an absorbing
//! dielectric, with the local field corrected for both the induced and the
//! fluctuating (noise) polarization inside a Clausius–Mosotti virtual
//! cavity.
//!
//! All rates are in units of the free-space rate `Gamma0(omega_A)`, and
//! frequencies are in the units of the medium's resonance `omega_T`
//! (natural units `hbar = eps0 = c = 1`).

pub mod consistency;
pub mod decay_rates;
pub mod error;
pub mod green_average;
pub mod permittivity;
pub mod quadrature;
pub mod rmin_solver;

pub use consistency::{commutator_coefficient, validity_margin, StructureConstant, Validity, ValidityMargin};
pub use decay_rates::{
    assemble_rates, gamma0, gamma_classical, gamma_par, gamma_perp, rates_for_medium, transverse_rate,
    ClassicalRates, PhysicalConstants, RateBreakdown, Transition,
};
pub use error::{Error, Result};
pub use green_average::{
    averaged_delta, averaged_green, ball_average_oracle, AveragedDelta, AveragedGreen, CavityGeometry,
};
pub use permittivity::{
    epsilon_lorentz, epsilon_table, kk_residual, refractive_index, Dielectric, KkReport, LorentzMedium, Medium,
    Permittivity, RefractiveIndex, TabulatedMedium, DEFAULT_COUPLING,
};
pub use rmin_solver::{find_r_min, min_gamma_perp, rmin_curve, RminResult, RminRow, SpectralMinimum, SpectrumGrid};
