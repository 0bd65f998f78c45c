//! Lowest eigenvalues of a straight strip under both truncations, compared
//! with the separable finite-element value and the continuum threshold.

use std::f64::consts::PI;

use dnstrip::discretize::{assemble, Grid, TruncBc};
use dnstrip::eigensolve::{solve, SolverOptions};
use dnstrip::geometry::{CurvatureProfile, StripGeometry};

fn main() -> dnstrip::Result<()> {
    let g = StripGeometry::new(1.0, CurvatureProfile::zero())?;
    for bc in [TruncBc::Dirichlet, TruncBc::Neumann] {
        let pencil = assemble(&g, &Grid::new(12.0, 480, 48, bc)?)?;
        let r = solve(&pencil, &SolverOptions { k: 3, ..Default::default() })?;
        println!("{:<9} shift {:.4}  cycles {}", bc.as_str(), r.shift, r.cycles);
        for (lam, res) in r.eigenvalues.iter().zip(&r.residuals) {
            println!("  {lam:.12}  residual {res:.1e}");
        }
    }
    println!("pi^2/4 = {:.12}", PI * PI / 4.0);
    Ok(())
}
