//! Ball-averaged short-distance Green tensor and delta tensor.
//!
//! Natural units `c = 1`. Every averaged tensor is proportional to the
//! identity, so only the coefficient of `delta_ij` is carried around.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permittivity::{Permittivity, RefractiveIndex};
use crate::quadrature::GaussLegendre;

/// Virtual-cavity size, stored both as the dimensionless `r = lambda_T / R`
/// and as the radius `R` itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityGeometry {
    r_param: f64,
    r_bar: f64,
    omega_t: f64,
}

impl CavityGeometry {
    /// From `r = lambda_T / R` with `lambda_T = 2 pi / omega_t`.
    pub fn from_r(r_param: f64, omega_t: f64) -> Result<Self> {
        check_positive("r", r_param)?;
        check_positive("omega_t", omega_t)?;
        Ok(Self { r_param, r_bar: 2.0 * PI / (omega_t * r_param), omega_t })
    }

    pub fn from_radius(r_bar: f64, omega_t: f64) -> Result<Self> {
        check_positive("cavity radius", r_bar)?;
        check_positive("omega_t", omega_t)?;
        Ok(Self { r_param: 2.0 * PI / (omega_t * r_bar), r_bar, omega_t })
    }

    pub fn r_param(&self) -> f64 {
        self.r_param
    }

    pub fn r_bar(&self) -> f64 {
        self.r_bar
    }

    pub fn omega_t(&self) -> f64 {
        self.omega_t
    }

    /// `c / (omega R)`, the expansion parameter of the rate formulas.
    pub fn inverse_size(&self, omega: f64) -> f64 {
        1.0 / (omega * self.r_bar)
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// Coefficients of `delta_ij` in the averaged transverse and longitudinal
/// delta tensors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragedDelta {
    pub perp: f64,
    pub par: f64,
}

impl AveragedDelta {
    pub fn total(&self) -> f64 {
        self.perp + self.par
    }
}

/// Coefficients of `delta_ij` in the ball-averaged Green tensor parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragedGreen {
    pub re_perp: f64,
    pub im_perp: f64,
    pub re_par: f64,
    pub im_par: f64,
}

impl AveragedGreen {
    pub fn perp(&self) -> Complex64 {
        Complex64::new(self.re_perp, self.im_perp)
    }

    pub fn par(&self) -> Complex64 {
        Complex64::new(self.re_par, self.im_par)
    }

    pub fn max_abs_diff(&self, other: &AveragedGreen) -> f64 {
        [
            self.re_perp - other.re_perp,
            self.im_perp - other.im_perp,
            self.re_par - other.re_par,
            self.im_par - other.im_par,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// The `delta_ij delta(R)` tensor split into transverse and longitudinal
/// parts, averaged over the ball. Two thirds of the unit weight is
/// transverse and one third longitudinal.
pub fn averaged_delta(geom: &CavityGeometry) -> AveragedDelta {
    let r3 = geom.r_bar.powi(3);
    AveragedDelta { perp: 1.0 / (2.0 * PI * r3), par: 1.0 / (4.0 * PI * r3) }
}

fn check_inputs(eps: Permittivity, omega: f64) -> Result<()> {
    check_positive("omega", omega)?;
    if eps.norm_sqr() == 0.0 {
        return Err(Error::SingularPermittivity);
    }
    Ok(())
}

/// Closed-form ball averages of the short-distance Green tensor.
pub fn averaged_green(
    eps: Permittivity,
    n: RefractiveIndex,
    omega: f64,
    geom: &CavityGeometry,
) -> Result<AveragedGreen> {
    check_inputs(eps, omega)?;
    let r = geom.r_bar;
    let long = 1.0 / (4.0 * PI * omega * omega * eps.norm_sqr() * r.powi(3));
    Ok(AveragedGreen {
        re_perp: 1.0 / (4.0 * PI * r) - omega * n.kappa / (6.0 * PI),
        im_perp: omega * n.eta / (6.0 * PI),
        re_par: -eps.re * long,
        im_par: eps.im * long,
    })
}

type Tensor = [[f64; 3]; 3];

/// Ball averages of the real-space tensor kernels of the short-distance
/// Green function, before the material prefactors are applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelAverages {
    /// `R_i R_j / (2R^3) + delta_ij / (2R)`
    pub transverse: Tensor,
    /// `(delta_ij - 3 R_i R_j / R^2) / R^3`, zero after angular averaging
    pub dipole: Tensor,
}

/// Volume-averages the singular kernels over the ball of radius `R` with
/// a product rule: Gauss–Legendre in radius and in `cos(theta)`, uniform
/// in azimuth. The kernels are evaluated at the Cartesian nodes directly.
pub fn kernel_averages(geom: &CavityGeometry, order: usize) -> KernelAverages {
    let radial = GaussLegendre::new(order);
    let polar = GaussLegendre::new(order);
    let n_phi = 2 * order;
    let r_bar = geom.r_bar;
    // 3 / (4 pi R^3) * int R^2 dR dOmega
    let norm = 3.0 / (4.0 * PI * r_bar.powi(3));

    let mut directions = Vec::with_capacity(order * n_phi);
    for (mu, wmu) in polar.on_interval(-1.0, 1.0) {
        let sin_t = (1.0 - mu * mu).max(0.0).sqrt();
        for k in 0..n_phi {
            let phi = 2.0 * PI * k as f64 / n_phi as f64;
            let w = wmu * 2.0 * PI / n_phi as f64;
            directions.push(([sin_t * phi.cos(), sin_t * phi.sin(), mu], w));
        }
    }

    let mut transverse = [[0.0; 3]; 3];
    let mut dipole = [[0.0; 3]; 3];
    for (radius, wr) in radial.on_interval(0.0, r_bar) {
        let shell_w = wr * radius * radius * norm;
        for (u, wa) in &directions {
            let pos = [radius * u[0], radius * u[1], radius * u[2]];
            let r2 = pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2];
            let r1 = r2.sqrt();
            let r3 = r2 * r1;
            let w = shell_w * wa;
            for i in 0..3 {
                for j in 0..3 {
                    let kron = if i == j { 1.0 } else { 0.0 };
                    let rr = pos[i] * pos[j];
                    transverse[i][j] += w * (rr / (2.0 * r3) + kron / (2.0 * r1));
                    dipole[i][j] += w * (kron - 3.0 * rr / r2) / r3;
                }
            }
        }
    }
    KernelAverages { transverse, dipole }
}

fn oracle_at_order(
    eps: Permittivity,
    n: RefractiveIndex,
    omega: f64,
    geom: &CavityGeometry,
    order: usize,
) -> AveragedGreen {
    let k = kernel_averages(geom, order);
    let eps_c = eps.to_complex();
    let n_c = n.to_complex();

    // transverse: (1/4pi){kernel + (2 i omega / 3) n delta_ij}
    let perp = Complex64::new(k.transverse[0][0], 0.0) / (4.0 * PI)
        + Complex64::new(0.0, 2.0 * omega / 3.0) * n_c / (4.0 * PI);

    // longitudinal: -1/(4 pi omega^2 eps) [ (4pi/3) delta(R) + dipole kernel ];
    // the delta function averages to 3 / (4 pi R^3) analytically
    let contact = (4.0 * PI / 3.0) * 3.0 / (4.0 * PI * geom.r_bar.powi(3));
    let par = -(contact + k.dipole[0][0]) / (4.0 * PI * omega * omega * eps_c);

    AveragedGreen { re_perp: perp.re, im_perp: perp.im, re_par: par.re, im_par: par.im }
}

/// Quadrature route to the same four scalars as [`averaged_green`]. The
/// result at `order` is compared against `2 * order`; a difference above
/// `tol` (relative to the magnitude of each scalar, floored at one) is a
/// convergence failure.
pub fn ball_average_oracle(
    eps: Permittivity,
    n: RefractiveIndex,
    omega: f64,
    geom: &CavityGeometry,
    order: usize,
    tol: f64,
) -> Result<AveragedGreen> {
    check_inputs(eps, omega)?;
    if order < 8 {
        return Err(Error::InvalidParameter(format!("quadrature order must be >= 8, got {order}")));
    }
    let coarse = oracle_at_order(eps, n, omega, geom, order);
    let fine = oracle_at_order(eps, n, omega, geom, 2 * order);
    let pairs = [
        (coarse.re_perp, fine.re_perp),
        (coarse.im_perp, fine.im_perp),
        (coarse.re_par, fine.re_par),
        (coarse.im_par, fine.im_par),
    ];
    let diff = pairs
        .iter()
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max);
    if diff.is_nan() || diff > tol {
        return Err(Error::NonConvergence { diff, tol });
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permittivity::refractive_index;
    use approx::assert_relative_eq;

    fn unit_cavity() -> CavityGeometry {
        CavityGeometry::from_radius(1.0, 1.0).unwrap()
    }

    #[test]
    fn geometry_roundtrip() {
        let g = CavityGeometry::from_r(20.0, 1.0).unwrap();
        assert_relative_eq!(g.r_param() * g.r_bar() * g.omega_t(), 2.0 * PI, epsilon = 1e-14);
        let h = CavityGeometry::from_radius(g.r_bar(), 1.0).unwrap();
        assert_relative_eq!(h.r_param(), 20.0, epsilon = 1e-13);
        assert!(CavityGeometry::from_r(0.0, 1.0).is_err());
        assert!(CavityGeometry::from_r(-1.0, 1.0).is_err());
        assert!(CavityGeometry::from_radius(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn delta_averages() {
        let d = averaged_delta(&unit_cavity());
        assert_eq!(d.perp, 1.0 / (2.0 * PI));
        assert_eq!(d.par, 1.0 / (4.0 * PI));

        let d = averaged_delta(&CavityGeometry::from_radius(2.0, 1.0).unwrap());
        assert_relative_eq!(d.perp, 1.0 / (16.0 * PI), max_relative = 1e-15);
        assert_relative_eq!(d.par, 1.0 / (32.0 * PI), max_relative = 1e-15);

        for r in [0.01, 0.3, 1.0, 7.5, 123.0] {
            let d = averaged_delta(&CavityGeometry::from_r(r, 1.0).unwrap());
            assert_eq!(d.perp / d.par, 2.0);
            // total weight of delta(R) over the ball
            assert_relative_eq!(d.total(), 3.0 / (4.0 * PI * CavityGeometry::from_r(r, 1.0).unwrap().r_bar().powi(3)), max_relative = 1e-14);
        }
    }

    #[test]
    fn vacuum_green() {
        let g = averaged_green(Permittivity::VACUUM, RefractiveIndex { eta: 1.0, kappa: 0.0 }, 1.0, &unit_cavity())
            .unwrap();
        assert_relative_eq!(g.re_perp, 1.0 / (4.0 * PI), epsilon = 1e-15);
        assert_relative_eq!(g.im_perp, 1.0 / (6.0 * PI), epsilon = 1e-15);
        assert_relative_eq!(g.re_par, -1.0 / (4.0 * PI), epsilon = 1e-15);
        assert_eq!(g.im_par, 0.0);
    }

    #[test]
    fn imaginary_eps_kills_re_par() {
        let eps = Permittivity::new(0.0, 1.0);
        let n = refractive_index(eps).unwrap();
        let g = averaged_green(eps, n, 1.0, &unit_cavity()).unwrap();
        assert_eq!(g.re_par, 0.0);
        assert!(g.im_par > 0.0);
    }

    #[test]
    fn zero_eps_rejected() {
        let eps = Permittivity::new(0.0, 0.0);
        let n = RefractiveIndex { eta: 0.0, kappa: 0.0 };
        assert_eq!(averaged_green(eps, n, 1.0, &unit_cavity()), Err(Error::SingularPermittivity));
        assert_eq!(
            ball_average_oracle(eps, n, 1.0, &unit_cavity(), 16, 1e-10),
            Err(Error::SingularPermittivity)
        );
    }

    #[test]
    fn oracle_reproduces_vacuum() {
        let g = ball_average_oracle(
            Permittivity::VACUUM,
            RefractiveIndex { eta: 1.0, kappa: 0.0 },
            1.0,
            &unit_cavity(),
            16,
            1e-10,
        )
        .unwrap();
        assert!((g.re_perp - 1.0 / (4.0 * PI)).abs() < 1e-10);
        assert!((g.im_perp - 1.0 / (6.0 * PI)).abs() < 1e-10);
        assert!((g.re_par + 1.0 / (4.0 * PI)).abs() < 1e-10);
        assert!(g.im_par.abs() < 1e-10);
    }

    #[test]
    fn dipole_kernel_averages_to_zero() {
        for r in [1.0, 5.0, 20.0, 100.0] {
            let k = kernel_averages(&CavityGeometry::from_r(r, 1.0).unwrap(), 16);
            let scale = 1.0 / CavityGeometry::from_r(r, 1.0).unwrap().r_bar().powi(3);
            for row in &k.dipole {
                for v in row {
                    assert!(v.abs() < 1e-12 * scale.max(1.0), "dipole entry {v} at r = {r}");
                }
            }
        }
    }

    #[test]
    fn transverse_kernel_is_isotropic() {
        let k = kernel_averages(&unit_cavity(), 12);
        for i in 0..3 {
            for j in 0..3 {
                // 3/R^3 int R^2 (1/(6R) + 1/(2R)) dR = 1 / R at R = 1
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((k.transverse[i][j] - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn oracle_matches_closed_form_on_resonance() {
        let eps = Permittivity::new(1.0, 2.116);
        let n = refractive_index(eps).unwrap();
        let geom = unit_cavity();
        let closed = averaged_green(eps, n, 1.0, &geom).unwrap();
        let quad = ball_average_oracle(eps, n, 1.0, &geom, 16, 1e-10).unwrap();
        assert!(closed.max_abs_diff(&quad) < 1e-6 * closed.re_perp.abs());
    }

    #[test]
    fn oracle_rejects_low_order() {
        let n = RefractiveIndex { eta: 1.0, kappa: 0.0 };
        assert!(matches!(
            ball_average_oracle(Permittivity::VACUUM, n, 1.0, &unit_cavity(), 4, 1e-10),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn scaling_with_radius() {
        let eps = Permittivity::new(1.5, 0.7);
        let n = refractive_index(eps).unwrap();
        let a = averaged_green(eps, n, 0.8, &CavityGeometry::from_radius(1.0, 1.0).unwrap()).unwrap();
        let b = averaged_green(eps, n, 0.8, &CavityGeometry::from_radius(2.0, 1.0).unwrap()).unwrap();
        let kappa_term = -0.8 * n.kappa / (6.0 * PI);
        assert_relative_eq!((b.re_perp - kappa_term) * 2.0, a.re_perp - kappa_term, max_relative = 1e-14);
        assert_eq!(a.im_perp, b.im_perp);
        assert_relative_eq!(b.re_par * 8.0, a.re_par, max_relative = 1e-14);
        assert_relative_eq!(b.im_par * 8.0, a.im_par, max_relative = 1e-14);
        // algebraic reconstruction of eps_im
        assert_relative_eq!(a.im_par * eps.norm_sqr() * 4.0 * PI * 0.64, eps.im, max_relative = 1e-14);
    }
}
