//! Lowest eigenvalue of the cross-section operator by the Bessel
//! cross-product equation and by shooting, then the non-existence
//! certificate for non-negative curvature.

use dnstrip::transverse::{bessel_lambda0, nonexistence_certificate, shoot_lambda0};

fn main() -> dnstrip::Result<()> {
    let d = 1.0;
    println!("{:>6} {:>18} {:>18} {:>10}", "d*g", "bessel", "shooting", "rel diff");
    for i in 1..=9 {
        let gamma = 0.1 * i as f64 / d;
        let b = bessel_lambda0(d, gamma)?.lambda0;
        let s = shoot_lambda0(d, gamma)?.lambda0;
        println!("{:>6.2} {b:>18.12} {s:>18.12} {:>10.1e}", d * gamma, ((b - s) / s).abs());
    }
    let samples: Vec<f64> = (0..=19).map(|i| 0.05 * i as f64).collect();
    let report = nonexistence_certificate(d, &samples)?;
    println!("{} ({} samples, all pass: {})", report.verdict, report.samples.len(), report.all_pass);
    Ok(())
}
