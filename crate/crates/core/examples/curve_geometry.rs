//! Reconstructs the centre line of a bent strip, reports its validity and
//! writes the curve to `curve.csv` in the working directory (or the path
//! given as the first argument).

use dnstrip::geometry::{reconstruct_curve, CurvatureProfile, ProfileSpec, StripGeometry};

fn main() -> dnstrip::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "curve.csv".into());
    let profile = CurvatureProfile::new(ProfileSpec::PolyBump { c: 0.3, s0: 2.0 })?;
    println!("total bending {:.6}", profile.total_bending()?);

    let g = StripGeometry::new(1.0, profile)?;
    println!("threshold     {:.9}", g.threshold);
    println!("validity      {:?}", g.valid);

    let curve = reconstruct_curve(&g.profile, (-6.0, 6.0), 0.01)?;
    let end = curve.last();
    println!("end point     ({:.6}, {:.6}), tangent angle {:.6}", end.x, end.y, end.theta);
    curve.save_csv(std::path::Path::new(&path))?;
    println!("wrote {path}");
    Ok(())
}
