//! Complex permittivity models, the refractive-index branch, and a
//! Kramers–Kronig consistency check for tabulated media.
//!
//! Frequencies are angular frequencies in the same units as the medium's
//! resonance frequency `omega_t`; permittivities are dimensionless.

use std::f64::consts::PI;
use std::io::BufRead;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Oscillator strength used in the classic single-resonance comparison model.
pub const DEFAULT_COUPLING: f64 = 0.46;

/// Minimum number of samples for a meaningful Kramers–Kronig evaluation.
pub const KK_MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Permittivity {
    pub re: f64,
    pub im: f64,
}

impl Permittivity {
    pub const VACUUM: Permittivity = Permittivity { re: 1.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    /// `|(eps + 2) / 3|^2`, the Clausius–Mosotti local-field factor squared.
    pub fn local_field_factor_sqr(self) -> f64 {
        ((self.re + 2.0).powi(2) + self.im * self.im) / 9.0
    }
}

impl From<Complex64> for Permittivity {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Principal branch `n = eta + i kappa` of `sqrt(eps)` for a passive medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefractiveIndex {
    pub eta: f64,
    pub kappa: f64,
}

impl RefractiveIndex {
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.eta, self.kappa)
    }
}

/// Principal square root of a passive permittivity.
///
/// The larger of `eta`/`kappa` comes from the half-angle formula and the
/// other from `eps_im = 2 eta kappa`, which keeps both accurate on either
/// side of the imaginary axis and yields `(0, sqrt(-eps_re))` on the
/// negative real axis (the `eps_im -> 0+` limit).
pub fn refractive_index(eps: Permittivity) -> Result<RefractiveIndex> {
    if !(eps.re.is_finite() && eps.im.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "non-finite permittivity {} + {}i",
            eps.re, eps.im
        )));
    }
    if eps.im < 0.0 {
        return Err(Error::GainMedium(eps.im));
    }
    let modulus = eps.norm();
    if modulus == 0.0 {
        return Ok(RefractiveIndex { eta: 0.0, kappa: 0.0 });
    }
    let (eta, kappa) = if eps.re >= 0.0 {
        let eta = (0.5 * (modulus + eps.re)).sqrt();
        (eta, eps.im / (2.0 * eta))
    } else {
        let kappa = (0.5 * (modulus - eps.re)).sqrt();
        (eps.im / (2.0 * kappa), kappa)
    };
    Ok(RefractiveIndex { eta, kappa })
}

/// Anything that can report a permittivity at a given angular frequency.
pub trait Dielectric: Sync {
    fn epsilon(&self, omega: f64) -> Result<Permittivity>;

    /// Resonance frequency that sets the frequency unit and the cavity
    /// parameter `r = lambda_T / R`.
    fn omega_t(&self) -> f64;

    /// Damping rate, for models that have one.
    fn damping(&self) -> Option<f64> {
        None
    }
}

/// Single-resonance Lorentz oscillator,
/// `eps(w) = 1 + (f wT)^2 / (wT^2 - w^2 - i gamma w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzMedium {
    omega_t: f64,
    coupling: f64,
    gamma: f64,
}

impl LorentzMedium {
    pub fn new(omega_t: f64, coupling: f64, gamma: f64) -> Result<Self> {
        if !(omega_t.is_finite() && omega_t > 0.0) {
            return Err(Error::InvalidParameter(format!("omega_t must be > 0, got {omega_t}")));
        }
        if !(coupling.is_finite() && coupling >= 0.0) {
            return Err(Error::InvalidParameter(format!("coupling must be >= 0, got {coupling}")));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {gamma}")));
        }
        Ok(Self { omega_t, coupling, gamma })
    }

    /// Unit resonance frequency and the default 0.46 coupling.
    pub fn with_damping(gamma: f64) -> Result<Self> {
        Self::new(1.0, DEFAULT_COUPLING, gamma)
    }

    pub fn omega_t(&self) -> f64 {
        self.omega_t
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Same oscillator with a different damping rate.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.omega_t, self.coupling, gamma)
    }

    /// `eps(0) = 1 + f^2`.
    pub fn static_epsilon(&self) -> f64 {
        1.0 + self.coupling * self.coupling
    }

    /// Upper edge of the lossless polariton gap, `wL = wT sqrt(1 + f^2)`.
    pub fn longitudinal_frequency(&self) -> f64 {
        self.omega_t * self.static_epsilon().sqrt()
    }

    /// Evaluates the model formula without the `omega >= 0` check; used for
    /// the crossing relation `eps(-w) = eps(w)*`.
    pub fn evaluate_signed(&self, omega: f64) -> Result<Permittivity> {
        let strength = (self.coupling * self.omega_t).powi(2);
        let detuning = self.omega_t * self.omega_t - omega * omega;
        let loss = self.gamma * omega;
        let denom = detuning * detuning + loss * loss;
        if denom == 0.0 {
            if strength == 0.0 {
                return Ok(Permittivity::VACUUM);
            }
            return Err(Error::Pole(omega));
        }
        Ok(Permittivity {
            re: 1.0 + strength * detuning / denom,
            im: strength * loss / denom,
        })
    }
}

impl Dielectric for LorentzMedium {
    fn epsilon(&self, omega: f64) -> Result<Permittivity> {
        epsilon_lorentz(self, omega)
    }

    fn omega_t(&self) -> f64 {
        self.omega_t
    }

    fn damping(&self) -> Option<f64> {
        Some(self.gamma)
    }
}

pub fn epsilon_lorentz(medium: &LorentzMedium, omega: f64) -> Result<Permittivity> {
    if omega.is_nan() {
        return Err(Error::InvalidParameter("frequency is NaN".into()));
    }
    if omega < 0.0 {
        return Err(Error::NegativeFrequency(omega));
    }
    if omega.is_infinite() {
        return Ok(Permittivity::VACUUM);
    }
    medium.evaluate_signed(omega)
}

/// Permittivity samples on a strictly increasing frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedMedium {
    frequencies: Vec<f64>,
    values: Vec<Permittivity>,
    omega_t: f64,
}

impl TabulatedMedium {
    pub fn new(frequencies: Vec<f64>, values: Vec<Permittivity>) -> Result<Self> {
        if frequencies.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} frequencies but {} permittivity samples",
                frequencies.len(),
                values.len()
            )));
        }
        if frequencies.len() < 2 {
            return Err(Error::GridTooShort(frequencies.len(), 2));
        }
        if frequencies.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParameter("tabulated frequencies must be finite and > 0".into()));
        }
        if frequencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("tabulated frequencies must be strictly increasing".into()));
        }
        for v in &values {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::InvalidParameter("non-finite permittivity sample".into()));
            }
            if v.im < 0.0 {
                return Err(Error::GainMedium(v.im));
            }
        }
        Ok(Self { frequencies, values, omega_t: 1.0 })
    }

    /// Sets the reference resonance frequency (default 1).
    pub fn with_omega_t(mut self, omega_t: f64) -> Result<Self> {
        if !(omega_t.is_finite() && omega_t > 0.0) {
            return Err(Error::InvalidParameter(format!("omega_t must be > 0, got {omega_t}")));
        }
        self.omega_t = omega_t;
        Ok(self)
    }

    /// Samples a dielectric model on the given grid.
    pub fn sample<D: Dielectric + ?Sized>(model: &D, frequencies: &[f64]) -> Result<Self> {
        let values = frequencies
            .iter()
            .map(|&w| model.epsilon(w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frequencies.to_vec(), values)?.with_omega_t(model.omega_t())
    }

    /// Parses the three-column `omega eps_re eps_im` text format. Blank
    /// lines and lines starting with `#` are skipped.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut frequencies = Vec::new();
        let mut values = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let lineno = idx + 1;
            let cols: Vec<&str> = trimmed.split_whitespace().collect();
            if cols.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected 3 columns, found {}", cols.len()),
                });
            }
            let mut nums = [0.0; 3];
            for (slot, col) in nums.iter_mut().zip(&cols) {
                *slot = col.parse().map_err(|e| Error::Parse {
                    line: lineno,
                    msg: format!("'{col}': {e}"),
                })?;
            }
            frequencies.push(nums[0]);
            values.push(Permittivity::new(nums[1], nums[2]));
        }
        Self::new(frequencies, values)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(std::io::BufReader::new(file))
    }

    /// Writes the table in the same format `parse` reads.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# omega eps_re eps_im\n");
        for (w, e) in self.frequencies.iter().zip(&self.values) {
            out.push_str(&format!("{w:.16e} {:.16e} {:.16e}\n", e.re, e.im));
        }
        out
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn values(&self) -> &[Permittivity] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.frequencies[0], self.frequencies[self.frequencies.len() - 1])
    }

    /// Static permittivity. Tables start above zero frequency, so this
    /// fails unless `use_lowest_sample` accepts the real part of the
    /// lowest-frequency sample as a stand-in.
    pub fn static_epsilon(&self, use_lowest_sample: bool) -> Result<f64> {
        if use_lowest_sample {
            Ok(self.values[0].re)
        } else {
            Err(Error::StaticNotCovered)
        }
    }
}

impl Dielectric for TabulatedMedium {
    fn epsilon(&self, omega: f64) -> Result<Permittivity> {
        epsilon_table(self, omega)
    }

    fn omega_t(&self) -> f64 {
        self.omega_t
    }
}

/// Componentwise linear interpolation; no extrapolation.
pub fn epsilon_table(medium: &TabulatedMedium, omega: f64) -> Result<Permittivity> {
    let (min, max) = medium.range();
    if !(omega >= min && omega <= max) {
        return Err(Error::OutOfRange { omega, min, max });
    }
    let freqs = &medium.frequencies;
    // index of the first knot strictly greater than omega
    let hi = freqs.partition_point(|&w| w <= omega);
    if hi == 0 {
        return Ok(medium.values[0]);
    }
    let lo = hi - 1;
    if freqs[lo] == omega || hi == freqs.len() {
        return Ok(medium.values[lo]);
    }
    let t = (omega - freqs[lo]) / (freqs[hi] - freqs[lo]);
    let (a, b) = (medium.values[lo], medium.values[hi]);
    Ok(Permittivity {
        re: a.re + t * (b.re - a.re),
        im: a.im + t * (b.im - a.im),
    })
}

/// Either permittivity source, as selected on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Medium {
    Lorentz(LorentzMedium),
    Table(TabulatedMedium),
}

impl Medium {
    /// `eps_S = eps(0)`. For tables see [`TabulatedMedium::static_epsilon`].
    pub fn static_epsilon(&self, use_lowest_sample: bool) -> Result<f64> {
        match self {
            Medium::Lorentz(m) => Ok(m.static_epsilon()),
            Medium::Table(t) => t.static_epsilon(use_lowest_sample),
        }
    }
}

impl Dielectric for Medium {
    fn epsilon(&self, omega: f64) -> Result<Permittivity> {
        match self {
            Medium::Lorentz(m) => m.epsilon(omega),
            Medium::Table(t) => t.epsilon(omega),
        }
    }

    fn omega_t(&self) -> f64 {
        match self {
            Medium::Lorentz(m) => m.omega_t,
            Medium::Table(t) => t.omega_t,
        }
    }

    fn damping(&self) -> Option<f64> {
        match self {
            Medium::Lorentz(m) => Some(m.gamma),
            Medium::Table(_) => None,
        }
    }
}

pub fn static_epsilon(medium: &LorentzMedium) -> f64 {
    medium.static_epsilon()
}

/// Pointwise Kramers–Kronig residuals of a tabulated medium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KkReport {
    /// Frequencies at which residuals were evaluated (interior knots).
    pub frequencies: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_abs: f64,
}

/// Residual of the real-part dispersion relation
/// `eps_re(w) - 1 - (2/pi) P int w' eps_im(w') / (w'^2 - w^2) dw'`
/// at each interior knot.
///
/// The integral runs over the tabulated range only, so the table must
/// cover the absorption spectrum. The principal value is taken by
/// subtracting `w eps_im(w)` from the numerator, which leaves a regular
/// integrand for the trapezoid rule, and adding back the closed-form
/// principal value of `1 / (w'^2 - w^2)` over the range. Endpoints are
/// skipped because that closed form diverges there.
pub fn kk_residual(medium: &TabulatedMedium) -> Result<KkReport> {
    let n = medium.len();
    if n < KK_MIN_POINTS {
        return Err(Error::GridTooShort(n, KK_MIN_POINTS));
    }
    let w = medium.frequencies();
    let g: Vec<f64> = w.iter().zip(medium.values()).map(|(w, e)| w * e.im).collect();
    let dg = nonuniform_gradient(w, &g);
    let (a, b) = medium.range();

    let mut frequencies = Vec::with_capacity(n - 2);
    let mut residuals = Vec::with_capacity(n - 2);
    let mut integrand = vec![0.0; n];
    for k in 1..n - 1 {
        let x = w[k];
        for (j, slot) in integrand.iter_mut().enumerate() {
            *slot = if j == k {
                dg[k] / (2.0 * x)
            } else {
                (g[j] - g[k]) / (w[j] * w[j] - x * x)
            };
        }
        let regular = trapezoid(w, &integrand);
        let log_term = (((b - x) * (a + x)) / ((b + x) * (x - a))).ln() / (2.0 * x);
        let pv = regular + g[k] * log_term;
        frequencies.push(x);
        residuals.push(medium.values()[k].re - 1.0 - 2.0 / PI * pv);
    }
    let max_abs = residuals.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    Ok(KkReport { frequencies, residuals, max_abs })
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Second-order finite differences on a nonuniform grid (one-sided at
/// the ends).
fn nonuniform_gradient(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        d[i] = (h0 * h0 * y[i + 1] - h1 * h1 * y[i - 1] + (h1 * h1 - h0 * h0) * y[i])
            / (h0 * h1 * (h0 + h1));
    }
    d[0] = (y[1] - y[0]) / (x[1] - x[0]);
    d[n - 1] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
    d
}

/// `count` logarithmically spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == count - 1 {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}
