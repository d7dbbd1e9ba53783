//! Lower bound `r_min` on the cavity parameter: the smallest `r` for which
//! the transverse rate stays nonnegative across the frequency spectrum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decay_rates::transverse_rate;
use crate::error::{Error, Result};
use crate::green_average::CavityGeometry;
use crate::permittivity::{Dielectric, LorentzMedium};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_SCAN_POINTS: usize = 2000;
/// Smallest `r` probed before giving up on finding a negative rate.
pub const R_FLOOR: f64 = 1e-3;
const R_CEILING: f64 = 1e9;
const GUARD_POINTS: usize = 16;
const GOLDEN_RTOL: f64 = 1e-10;

/// Uniform grid of transition frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumGrid {
    pub omega_min: f64,
    pub omega_max: f64,
    pub count: usize,
}

impl SpectrumGrid {
    pub fn new(omega_min: f64, omega_max: f64, count: usize) -> Result<Self> {
        if !(omega_min.is_finite() && omega_max.is_finite() && omega_min > 0.0 && omega_min < omega_max) {
            return Err(Error::InvalidParameter(format!(
                "frequency range must satisfy 0 < min < max, got [{omega_min}, {omega_max}]"
            )));
        }
        if count < 2 {
            return Err(Error::GridTooShort(count, 2));
        }
        Ok(Self { omega_min, omega_max, count })
    }

    /// `[0.5, 1.5] omega_T` with `count` points; brackets the polariton
    /// gap of the default oscillator with margin.
    pub fn around_resonance(omega_t: f64, count: usize) -> Result<Self> {
        Self::new(0.5 * omega_t, 1.5 * omega_t, count)
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.omega_min && omega <= self.omega_max
    }

    /// Whether the whole lossless gap `(omega_T, omega_L)` is covered.
    pub fn covers_band_gap(&self, medium: &LorentzMedium) -> bool {
        self.contains(medium.omega_t()) && self.contains(medium.longitudinal_frequency())
    }

    pub fn step(&self) -> f64 {
        (self.omega_max - self.omega_min) / (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.omega_max
        } else {
            self.omega_min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    pub fn with_count(&self, count: usize) -> Result<Self> {
        Self::new(self.omega_min, self.omega_max, count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralMinimum {
    pub omega: f64,
    pub value: f64,
}

/// Minimum of the transverse rate over the grid. Every discrete local
/// minimum is refined by golden-section search over its two adjacent cells,
/// so narrow dips that lose the grid comparison are still resolved.
pub fn min_gamma_perp<D: Dielectric + ?Sized>(medium: &D, r: f64, grid: &SpectrumGrid) -> Result<SpectralMinimum> {
    let geom = CavityGeometry::from_r(r, medium.omega_t())?;
    let values = (0..grid.count)
        .into_par_iter()
        .map(|i| transverse_rate(medium, grid.point(i), &geom))
        .collect::<Result<Vec<f64>>>()?;

    let last = grid.count - 1;
    let mut best = SpectralMinimum { omega: f64::NAN, value: f64::INFINITY };
    for i in 0..grid.count {
        let left = if i > 0 { values[i - 1] } else { f64::INFINITY };
        let right = if i < last { values[i + 1] } else { f64::INFINITY };
        if !(values[i] <= left && values[i] <= right && (values[i] < left || values[i] < right)) {
            continue;
        }
        if values[i] < best.value {
            best = SpectralMinimum { omega: grid.point(i), value: values[i] };
        }
        let lo = grid.point(i.saturating_sub(1));
        let hi = grid.point((i + 1).min(last));
        let refined = golden_section(|w| transverse_rate(medium, w, &geom), lo, hi)?;
        if refined.value < best.value {
            best = refined;
        }
    }
    Ok(best)
}

fn golden_section(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<SpectralMinimum> {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a) > GOLDEN_RTOL * 0.5 * (a.abs() + b.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let omega = 0.5 * (a + b);
    Ok(SpectralMinimum { omega, value: f(omega)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RminResult {
    /// Damping of the medium, when it has one.
    pub gamma: Option<f64>,
    pub r_min: f64,
    /// Frequency of the spectral minimum at `r_min`.
    pub omega_critical: f64,
    /// Transverse rate at `omega_critical` for `r = r_min`.
    pub value_at_critical: f64,
    /// Final bisection bracket; the rate minimum is negative at the lower
    /// end and nonnegative at the upper end.
    pub bracket: (f64, f64),
    /// Largest rate magnitude at the bracket ends; bounds
    /// `value_at_critical`.
    pub value_tolerance: f64,
    pub tol: f64,
}

fn validate_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance must be in (0, 1e-2], got {tol}")))
    }
}

/// Brackets the sign change of `min_w Gamma_perp(w; r)` starting from
/// `r = 1`: doubling while negative, or halving down to [`R_FLOOR`] while
/// nonnegative. Returns `(lo, hi)` with a negative minimum at `lo`.
pub fn bracket_r_min<D: Dielectric + ?Sized>(medium: &D, grid: &SpectrumGrid) -> Result<(f64, f64)> {
    let f = |r: f64| min_gamma_perp(medium, r, grid).map(|m| m.value);
    if f(1.0)? < 0.0 {
        let mut lo = 1.0;
        let mut hi = 2.0;
        while f(hi)? < 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > R_CEILING {
                return Err(Error::InvalidParameter(format!(
                    "transverse rate still negative at r = {R_CEILING:e}"
                )));
            }
        }
        Ok((lo, hi))
    } else {
        let mut hi: f64 = 1.0;
        loop {
            let lo = (0.5 * hi).max(R_FLOOR);
            if f(lo)? < 0.0 {
                return Ok((lo, hi));
            }
            if lo <= R_FLOOR {
                return Err(Error::NoSignChange { r_lo: R_FLOOR, r_hi: 1.0 });
            }
            hi = lo;
        }
    }
}

/// Checks that the rate minimum does not decrease across a coarse
/// geometric scan of `[lo, hi]`.
fn monotonicity_guard<D: Dielectric + ?Sized>(medium: &D, grid: &SpectrumGrid, lo: f64, hi: f64) -> Result<()> {
    let ratio = (hi / lo).powf(1.0 / (GUARD_POINTS - 1) as f64);
    let rs: Vec<f64> = (0..GUARD_POINTS)
        .map(|i| if i + 1 == GUARD_POINTS { hi } else { lo * ratio.powi(i as i32) })
        .collect();
    let mins = rs
        .iter()
        .map(|&r| min_gamma_perp(medium, r, grid).map(|m| m.value))
        .collect::<Result<Vec<_>>>()?;
    for i in 1..mins.len() {
        let slack = 1e-12 * (1.0 + mins[i - 1].abs());
        if mins[i] < mins[i - 1] - slack {
            return Err(Error::MonotonicityViolation { r_a: rs[i - 1], r_b: rs[i] });
        }
    }
    Ok(())
}

/// Smallest `r` with a nonnegative transverse rate over `grid`, to
/// relative tolerance `tol`.
pub fn find_r_min<D: Dielectric + ?Sized>(medium: &D, grid: &SpectrumGrid, tol: f64) -> Result<RminResult> {
    validate_tol(tol)?;
    let (lo, hi) = bracket_r_min(medium, grid)?;
    monotonicity_guard(medium, grid, lo, hi)?;
    bisect_r_min(medium, grid, tol, lo, hi)
}

/// Bisection on a caller-supplied bracket; `lo` must give a negative
/// rate minimum and `hi` a nonnegative one.
pub fn bisect_r_min<D: Dielectric + ?Sized>(
    medium: &D,
    grid: &SpectrumGrid,
    tol: f64,
    mut lo: f64,
    mut hi: f64,
) -> Result<RminResult> {
    validate_tol(tol)?;
    let f = |r: f64| min_gamma_perp(medium, r, grid).map(|m| m.value);
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    if !(f_lo < 0.0 && f_hi >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bracket [{lo}, {hi}] does not straddle the sign change ({f_lo}, {f_hi})"
        )));
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm < 0.0 {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    let r_min = 0.5 * (lo + hi);
    let at = min_gamma_perp(medium, r_min, grid)?;
    Ok(RminResult {
        gamma: medium.damping(),
        r_min,
        omega_critical: at.omega,
        value_at_critical: at.value,
        bracket: (lo, hi),
        value_tolerance: f_lo.abs().max(f_hi.abs()),
        tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RminRow {
    pub gamma: f64,
    pub outcome: Result<RminResult>,
}

/// `r_min` for each damping value with the other oscillator parameters
/// taken from `base`. Rows keep input order; solver errors stay in their row.
pub fn rmin_curve(base: &LorentzMedium, gammas: &[f64], grid: &SpectrumGrid, tol: f64) -> Vec<RminRow> {
    gammas
        .par_iter()
        .map(|&gamma| RminRow {
            gamma,
            outcome: base.with_gamma(gamma).and_then(|m| {
                if gamma <= 0.0 {
                    return Err(Error::InvalidParameter(format!("gamma must be > 0, got {gamma}")));
                }
                find_r_min(&m, grid, tol)
            }),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SpectrumGrid {
        SpectrumGrid::around_resonance(1.0, DEFAULT_SCAN_POINTS).unwrap()
    }

    fn medium(gamma: f64) -> LorentzMedium {
        LorentzMedium::with_damping(gamma).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(SpectrumGrid::new(0.0, 1.0, 10).is_err());
        assert!(SpectrumGrid::new(1.0, 1.0, 10).is_err());
        assert!(SpectrumGrid::new(0.5, 1.5, 1).is_err());
        let g = SpectrumGrid::new(0.5, 1.5, 3).unwrap();
        assert_eq!(g.points(), vec![0.5, 1.0, 1.5]);
        assert!(grid().covers_band_gap(&medium(0.01)));
    }

    #[test]
    fn golden_section_parabola() {
        let m = golden_section(|x| Ok((x - 0.3).powi(2) - 1.0), 0.0, 1.0).unwrap();
        assert!((m.omega - 0.3).abs() < 1e-8);
        assert!((m.value + 1.0).abs() < 1e-15);
    }

    #[test]
    fn admissible_and_excluded_cavities() {
        let m = medium(0.01);
        assert!(min_gamma_perp(&m, 30.0, &grid()).unwrap().value > 0.0);

        let neg = min_gamma_perp(&m, 10.0, &grid()).unwrap();
        assert!(neg.value < 0.0);
        // the deepest point sits just below the resonance (0.99970), while
        // the negative window reaches into the gap
        assert!((neg.omega - 0.9997).abs() < 1e-4, "{neg:?}");
        let geom = CavityGeometry::from_r(10.0, 1.0).unwrap();
        assert!(transverse_rate(&m, 1.002, &geom).unwrap() < 0.0);
    }

    #[test]
    fn vacuum_is_flat() {
        let vac = LorentzMedium::new(1.0, 0.0, 0.01).unwrap();
        for r in [0.5, 10.0, 300.0] {
            assert_eq!(min_gamma_perp(&vac, r, &grid()).unwrap().value, 1.0);
        }
        assert!(matches!(find_r_min(&vac, &grid(), 1e-6), Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn r_min_for_small_damping() {
        let res = find_r_min(&medium(0.01), &grid(), 1e-6).unwrap();
        assert!(res.r_min > 10.0 && res.r_min < 20.0, "{res:?}");
        assert_eq!(res.gamma, Some(0.01));
        assert!(res.value_at_critical.abs() <= res.value_tolerance);
        let above = min_gamma_perp(&medium(0.01), res.r_min * (1.0 + 10.0 * res.tol), &grid()).unwrap();
        let below = min_gamma_perp(&medium(0.01), res.r_min * (1.0 - 10.0 * res.tol), &grid()).unwrap();
        assert!(above.value > 0.0 && below.value < 0.0);
    }

    #[test]
    fn restart_stability() {
        let m = medium(0.03);
        let a = find_r_min(&m, &grid(), 1e-6).unwrap();
        let b = bisect_r_min(&m, &grid(), 1e-6, 3.0, 40.0).unwrap();
        assert!((a.r_min - b.r_min).abs() <= 1e-6 * a.r_min);
    }

    #[test]
    fn tolerance_validation() {
        assert!(find_r_min(&medium(0.01), &grid(), 0.0).is_err());
        assert!(find_r_min(&medium(0.01), &grid(), 0.05).is_err());
    }

    #[test]
    fn curve_rows_follow_input() {
        let rows = rmin_curve(&medium(0.1), &[0.02, 0.02, 0.0], &grid(), 1e-6);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0], rows[1]);
        assert!(rows[2].outcome.is_err());

        let single = rmin_curve(&medium(0.1), &[0.05], &grid(), 1e-6);
        assert_eq!(single[0].outcome, find_r_min(&medium(0.05), &grid(), 1e-6));
    }
}
