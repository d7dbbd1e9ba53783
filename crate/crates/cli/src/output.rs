use serde::Serialize;

use localfield::{Permittivity, RateBreakdown, RefractiveIndex, RminRow};

/// 17 significant digits, no locale.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn validity_flag(perp: f64, par: f64) -> &'static str {
    match (perp < 0.0, par < 0.0) {
        (false, false) => "ok",
        (true, false) => "negative_perp",
        (false, true) => "negative_par",
        (true, true) => "negative_perp_par",
    }
}

/// One transition frequency. Rates are in units of the vacuum rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub omega_a: f64,
    pub eps_re: f64,
    pub eps_im: f64,
    pub eta: f64,
    pub kappa: f64,
    pub gamma_perp: f64,
    pub gamma_par: f64,
    pub gamma_total: f64,
    pub gamma_cl_perp: f64,
    pub gamma_cl_par: f64,
    pub noise_perp: f64,
    pub cross_perp: f64,
    pub validity_flag: String,
}

impl SweepRow {
    pub const HEADER: &'static str = "omega_a,eps_re,eps_im,eta,kappa,gamma_perp,gamma_par,gamma_total,\
gamma_cl_perp,gamma_cl_par,noise_perp,cross_perp,validity_flag";

    pub fn new(omega_a: f64, eps: Permittivity, n: RefractiveIndex, rates: &RateBreakdown) -> Self {
        SweepRow {
            omega_a,
            eps_re: eps.re,
            eps_im: eps.im,
            eta: n.eta,
            kappa: n.kappa,
            gamma_perp: rates.perp,
            gamma_par: rates.par,
            gamma_total: rates.total,
            gamma_cl_perp: rates.cl_perp,
            gamma_cl_par: rates.cl_par,
            noise_perp: rates.noise_perp,
            cross_perp: rates.cross_perp,
            validity_flag: validity_flag(rates.perp, rates.par).to_string(),
        }
    }

    /// The cavity-free classical curve at the same frequency.
    pub fn classical_transverse(&self) -> SweepRow {
        SweepRow {
            gamma_perp: self.gamma_cl_perp,
            gamma_par: 0.0,
            gamma_total: self.gamma_cl_perp,
            gamma_cl_par: 0.0,
            noise_perp: 0.0,
            cross_perp: 0.0,
            validity_flag: validity_flag(self.gamma_cl_perp, 0.0).to_string(),
            ..self.clone()
        }
    }

    pub fn to_csv(&self) -> String {
        let nums = [
            self.omega_a,
            self.eps_re,
            self.eps_im,
            self.eta,
            self.kappa,
            self.gamma_perp,
            self.gamma_par,
            self.gamma_total,
            self.gamma_cl_perp,
            self.gamma_cl_par,
            self.noise_perp,
            self.cross_perp,
        ];
        let mut s: Vec<String> = nums.iter().map(|v| fmt_num(*v)).collect();
        s.push(self.validity_flag.clone());
        s.join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RminRecord {
    pub gamma: Option<f64>,
    pub r_min: Option<f64>,
    pub omega_critical: Option<f64>,
    pub status: String,
}

impl RminRecord {
    pub const HEADER: &'static str = "gamma,r_min,omega_critical,status";

    pub fn to_csv(&self) -> String {
        let num = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
        format!("{},{},{},{}", num(self.gamma), num(self.r_min), num(self.omega_critical), self.status)
    }
}

impl From<RminRow> for RminRecord {
    fn from(row: RminRow) -> Self {
        let gamma = (!row.gamma.is_nan()).then_some(row.gamma);
        match row.outcome {
            Ok(res) => RminRecord {
                gamma,
                r_min: Some(res.r_min),
                omega_critical: Some(res.omega_critical),
                status: "ok".into(),
            },
            Err(e) => RminRecord { gamma, r_min: None, omega_critical: None, status: e.tag().into() },
        }
    }
}
