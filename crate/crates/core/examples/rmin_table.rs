//! Prints r_min over a range of damping values.

use localfield::rmin_solver::DEFAULT_TOL;
use localfield::{rmin_curve, LorentzMedium, SpectrumGrid};

fn main() {
    let base = LorentzMedium::with_damping(0.01).unwrap();
    let gammas: Vec<f64> = (1..=20).map(|i| 0.01 * i as f64).collect();
    for count in [2000, 4000] {
        let grid = SpectrumGrid::around_resonance(1.0, count).unwrap();
        println!("# grid points: {count}");
        for row in rmin_curve(&base, &gammas, &grid, DEFAULT_TOL) {
            match row.outcome {
                Ok(res) => println!("{:.3} {:.9} {:.6} {:e}", row.gamma, res.r_min, res.omega_critical, res.value_at_critical),
                Err(e) => println!("{:.3} {}", row.gamma, e.tag()),
            }
        }
    }
}
