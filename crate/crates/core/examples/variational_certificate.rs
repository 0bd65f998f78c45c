//! Searches the scaled trial families for a negative value of the shifted
//! quadratic form on three geometries: an inward bend, an S-bend with zero
//! total bending and a two-bump strip with positive total bending.

use dnstrip::scenario::preset;
use dnstrip::variational::{certify, TrialKind};

fn main() -> dnstrip::Result<()> {
    for (name, kind) in [
        ("prop1_bend", TrialKind::Prop1),
        ("prop2_sbend", TrialKind::Prop2),
        ("counterexample", TrialKind::Counterexample),
    ] {
        let g = preset(name)?.strip()?;
        let c = certify(&g, kind)?;
        println!(
            "{name:<15} {:<15} {:<15} q = {:+.6e} (sigma {:e}, epsilon {:.4}), inf spectrum <= {:.9} < {:.9}",
            kind.as_str(),
            c.verdict,
            c.q_value,
            c.sigma,
            c.epsilon,
            c.upper_bound_on_inf_spectrum,
            c.threshold
        );
    }
    Ok(())
}
